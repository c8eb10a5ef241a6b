"""Matrix-valued functions held entrywise on a common dyadic grid.

Factor verification, pointwise inversion and Riesz projections all work
on sampled entries; per-entry Fourier data comes from the grid FFT, so a
MatrixSymbol is only as band-limited as its construction grid allows.
Entries may be supplied as LaurentSymbols, InnerFunctions, callables of
the grid points, plain arrays, or scalars.
"""

from __future__ import annotations

import numpy as np

from .errors import GridMismatchError, SingularOperatorError
from .symbols import fft_freqs, grid_fft, grid_points


class MatrixSymbol:
    """values[i, j] holds the samples of entry (i, j) on the shared grid."""

    def __init__(self, values):
        values = np.asarray(values, dtype=complex)
        if values.ndim != 3:
            raise ValueError("expected an (rows, cols, G) sample array")
        self.values = values
        self.shape = values.shape[:2]
        self.grid = values.shape[2]

    @classmethod
    def from_entries(cls, entries, G):
        z = grid_points(G)
        rows = []
        for row in entries:
            cur = []
            for e in row:
                if isinstance(e, (int, float, complex)):
                    cur.append(np.full(G, complex(e)))
                elif isinstance(e, np.ndarray):
                    if e.size != G:
                        raise GridMismatchError("entry sampled on a different grid")
                    cur.append(e.astype(complex))
                elif callable(getattr(e, "sample", None)):
                    cur.append(e.sample(G))
                elif callable(e):
                    cur.append(np.asarray(e(z), dtype=complex))
                else:
                    raise TypeError(f"cannot grid entry of type {type(e)!r}")
            rows.append(cur)
        return cls(np.array(rows))

    # ------------------------------------------------------------- algebra
    def matmul(self, other):
        if isinstance(other, MatrixSymbol):
            if other.grid != self.grid:
                raise GridMismatchError("matrix symbols on different grids")
            a = np.moveaxis(self.values, 2, 0)
            b = np.moveaxis(other.values, 2, 0)
            return MatrixSymbol(np.moveaxis(a @ b, 0, 2))
        raise TypeError("matmul expects another MatrixSymbol")

    def matvec_values(self, vec_values):
        """Apply pointwise to a stacked vector of samples (c, G)."""
        vec_values = np.asarray(vec_values, dtype=complex)
        a = np.moveaxis(self.values, 2, 0)              # (G, r, c)
        v = np.moveaxis(vec_values, 1, 0)[..., None]    # (G, c, 1)
        return np.moveaxis((a @ v)[..., 0], 0, 1)

    def solve_values(self, vec_values, cond_cap=1e12):
        """Pointwise solve M(z) x(z) = v(z); returns (x, worst condition)."""
        a = np.moveaxis(self.values, 2, 0)
        v = np.moveaxis(np.asarray(vec_values, dtype=complex), 1, 0)[..., None]
        sv = np.linalg.svd(a, compute_uv=False)
        smin = sv[:, -1].min()
        cond = float(sv[:, 0].max() / max(smin, 1e-300))
        if smin <= 0 or cond > cond_cap:
            raise SingularOperatorError(
                f"pointwise solve is ill conditioned: cond={cond:.3e}")
        x = np.linalg.solve(a, v)[..., 0]
        return np.moveaxis(x, 0, 1), cond

    def pointwise_inverse(self, cond_cap=1e12):
        a = np.moveaxis(self.values, 2, 0)
        sv = np.linalg.svd(a, compute_uv=False)
        smin = sv[:, -1].min()
        cond = float(sv[:, 0].max() / max(smin, 1e-300))
        if smin <= 0 or cond > cond_cap:
            raise SingularOperatorError(
                f"pointwise inverse is ill conditioned: cond={cond:.3e}")
        inv = np.linalg.inv(a)
        return MatrixSymbol(np.moveaxis(inv, 0, 2)), cond

    def scale_columns(self, col_values):
        """Right-multiply by diag(col_values[j]) of per-column samples."""
        out = self.values.copy()
        for j in range(self.shape[1]):
            out[:, j, :] *= col_values[j]
        return MatrixSymbol(out)

    # ------------------------------------------------------------ analysis
    def det_values(self):
        return np.linalg.det(np.moveaxis(self.values, 2, 0))

    def entry_coeffs(self, i, j):
        """FFT-layout Fourier coefficients of entry (i, j)."""
        return grid_fft(self.values[i, j])

    def entry_tail(self, i, j, band):
        """Energy of entry (i, j) over frequencies selected by band(j)."""
        c = self.entry_coeffs(i, j)
        f = fft_freqs(self.grid)
        mask = np.array([bool(band(int(x))) for x in f])
        return float(np.sum(np.abs(c[mask]) ** 2))

    def max_tail(self, band):
        return max(self.entry_tail(i, j, band)
                   for i in range(self.shape[0])
                   for j in range(self.shape[1]))

    def max_abs_diff(self, other):
        return float(np.max(np.abs(self.values - other.values)))


def monomial_diag_values(powers, G):
    """Samples of diag(z^k) for the given integer powers."""
    z = grid_points(G)
    return [z ** int(k) for k in powers]


__all__ = ["MatrixSymbol", "monomial_diag_values"]
