"""Model spaces of finite Blaschke products.

For an inner function theta of degree n, the model space K_theta is the
n-dimensional complement of theta * H^2 inside H^2.  We work in the
orthonormal basis built from the ordered zero list (a_0, ..., a_{n-1}):

    e_k(z) = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) * prod_{j<k} b_j(z),

where b_j is the elementary Blaschke factor for a_j.  When every zero is
at the origin this is the monomial basis {1, z, ..., z^{n-1}}.

Inner products are grid averages over dyadic grids, which are exact for
trigonometric polynomials below the Nyquist frequency and alias-bounded
otherwise via the refinement policy in :mod:`dualband.symbols`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError
from .symbols import InnerFunction, LaurentSymbol, choose_grid, grid_points


@dataclass
class OperatorMatrix:
    """A dense matrix tagged with the bases its axes refer to."""

    entries: np.ndarray
    row_basis: str
    col_basis: str

    def norm2(self):
        return float(np.linalg.norm(self.entries, 2))

    def compose(self, other):
        if self.col_basis != other.row_basis:
            raise GridMismatchError(
                f"cannot compose {self.col_basis!r} after {other.row_basis!r}")
        return OperatorMatrix(self.entries @ other.entries,
                              self.row_basis, other.col_basis)

    def adjoint(self):
        return OperatorMatrix(self.entries.conj().T,
                              self.col_basis, self.row_basis)


class ModelSpaceBasis:
    """Orthonormal basis data for K_theta, theta a finite Blaschke product."""

    def __init__(self, theta):
        if not isinstance(theta, InnerFunction):
            raise TypeError("theta must be an InnerFunction")
        zeros = theta.zeros_list()
        if theta.kind == "product" and any(
                f.kind != "finite_blaschke" for f in theta.factors):
            raise ValueError("model space bases need a finite Blaschke product")
        if theta.kind == "atomic_singular":
            raise ValueError("model space bases need a finite Blaschke product")
        if len(zeros) < 1:
            raise ValueError("theta must have degree at least one")
        self.theta = theta
        self.zeros = np.asarray(zeros, dtype=complex)
        self.n = len(zeros)
        self._cache = {}

    @property
    def is_monomial(self):
        return bool(np.all(self.zeros == 0))

    def values(self, G):
        """(n, G) array of basis samples on the size-G grid."""
        got = self._cache.get(G)
        if got is not None:
            return got
        z = grid_points(G)
        out = np.empty((self.n, G), dtype=complex)
        tail = np.ones(G, dtype=complex)
        for k, a in enumerate(self.zeros):
            den = 1.0 - np.conj(a) * z
            out[k] = np.sqrt(1.0 - abs(a) ** 2) / den * tail
            tail = tail * (z - a) / den
        self._cache[G] = out
        return out

    def default_grid(self, symbols=(), extra_span=0):
        """A quadrature grid adequate for products of basis functions with
        the given symbols."""
        objs = list(symbols)
        if not self.is_monomial:
            objs.append(self.theta.as_symbol())
        return choose_grid(objs, extra_span=extra_span + 2 * self.n + 2)

    def project_values(self, fvals):
        """Coefficients <f, e_k> from samples of f."""
        V = self.values(fvals.size)
        return (V.conj() @ fvals) / fvals.size

    def synth_values(self, coeffs, G):
        """Samples of sum_k coeffs[k] e_k on the size-G grid."""
        return np.asarray(coeffs, dtype=complex) @ self.values(G)

    def gram(self, G=None):
        G = G or self.default_grid()
        V = self.values(G)
        return (V @ V.conj().T).T / G


def tm_basis(theta):
    return ModelSpaceBasis(theta)


def project_model(f, basis, G=None):
    """Coefficients of the model-space projection of f in the basis."""
    G = G or basis.default_grid([f] if isinstance(f, LaurentSymbol) else ())
    fvals = f.sample(G) if hasattr(f, "sample") else np.asarray(f)
    if fvals.size != G:
        raise GridMismatchError("sample size does not match requested grid")
    return basis.project_values(fvals)


def tto_matrix(basis, g, G=None):
    """Matrix of the compression of multiplication by g to K_theta.

    Entry (l, k) is <g e_k, e_l>.
    """
    if not isinstance(basis, ModelSpaceBasis):
        basis = ModelSpaceBasis(basis)
    if G is None:
        G = basis.default_grid([g] if isinstance(g, LaurentSymbol) else ())
    gv = g.sample(G) if hasattr(g, "sample") else np.asarray(g, dtype=complex)
    V = basis.values(G)
    M = ((V * gv) @ V.conj().T).T / G
    return OperatorMatrix(M, f"model:{basis.n}", f"model:{basis.n}")


def ctheta_matrix(basis, G=None):
    """Antilinear conjugation C f = theta * conj(z f) in basis coordinates.

    Returns the matrix R with (C v)_coords = R @ conj(v_coords); R is
    complex symmetric and R @ conj(R) is the identity.
    """
    G = G or basis.default_grid()
    z = grid_points(G)
    th = basis.theta.eval_at(z)
    V = basis.values(G)
    CV = th * np.conj(z) * np.conj(V)      # rows are C(e_k) samples
    R = (V.conj() @ CV.T) / G              # R[l, k] = <C e_k, e_l>
    return R


def ctheta_apply(basis, coeffs, R=None):
    if R is None:
        R = ctheta_matrix(basis)
    return R @ np.conj(np.asarray(coeffs, dtype=complex))


__all__ = [
    "OperatorMatrix", "ModelSpaceBasis", "tm_basis", "project_model",
    "tto_matrix", "ctheta_matrix", "ctheta_apply",
]
