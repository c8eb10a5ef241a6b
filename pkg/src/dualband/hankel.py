"""Hankel expressions for dual-band compressions with analytic symbols.

When the two-by-two symbol matrix

    Phi = [[g, conj(phi) psi g], [conj(psi) phi g, g]]

is entrywise analytic, the compression is unitarily equivalent to the
block Hankel operator built from conj(theta) Phi, so its operator norm
is a largest singular value of a finite block of anti-diagonal
coefficient slices.  When additionally one band ratio lies in
theta H^infinity the block matrix is triangular: the spectrum is the
image of the zeros of theta under g, each with doubled multiplicity,
and the inverse has the closed triangular form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dual_band import dualband_matrix
from .errors import CoefficientError, SingularOperatorError
from .model_space import tto_matrix

TOL_ANALYTIC = 1e-10


def _analytic_tail(sym):
    return float(np.sqrt(sym.tail_energy(lambda j: j < 0)))


@dataclass
class HankelNormReport:
    norm: float              # largest singular value of the block Hankel
    matrix_norm: float       # dense dual-band matrix two-norm
    gap: float
    block: np.ndarray        # the (2n, 2n) block Hankel matrix


def hankel_norm(space, g, tol_analytic=TOL_ANALYTIC):
    """Operator norm of the compression through the block Hankel matrix.

    Requires every entry of the symbol matrix to be analytic; the
    offending entry is named otherwise.  Entry (i, j) of each scalar
    block is the coefficient of index -(i + j + 1) of conj(theta) times
    the corresponding symbol entry.  For a monomial theta those vanish
    beyond its degree; in general the block is cut where the
    coefficients drop below 1e-14, so the largest singular value
    carries that truncation error at worst.
    """
    fw = space.cross_symbol("fw")
    bw = space.cross_symbol("bw")
    entries = {(0, 0): g, (0, 1): g * fw, (1, 0): g * bw, (1, 1): g}
    names = {(0, 0): "diagonal g", (0, 1): "g * conj(phi) psi",
             (1, 0): "g * conj(psi) phi", (1, 1): "diagonal g"}
    for key in ((0, 0), (0, 1), (1, 0)):
        tail = _analytic_tail(entries[key])
        if tail > tol_analytic:
            raise CoefficientError(
                f"symbol entry {names[key]} is not analytic: "
                f"co-analytic tail {tail:.3e}")

    tbs = space.theta.as_symbol().conj()
    dicts = {key: (tbs * s).coeff_dict(tol=0.0)
             for key, s in entries.items()}
    depth = space.n
    for cd in dicts.values():
        neg = [-k for k, v in cd.items() if k < 0 and abs(v) > 1e-14]
        if neg:
            depth = max(depth, max(neg))
    if depth > 4096:
        raise CoefficientError(
            f"anti-analytic coefficients reach index {-depth}; "
            "the Hankel block would be impractically large")
    blocks = {}
    for key, cd in dicts.items():
        H = np.zeros((depth, depth), dtype=complex)
        for i in range(depth):
            for j in range(depth - i):
                H[i, j] = cd.get(-(i + j + 1), 0.0)
        blocks[key] = H
    full = np.block([[blocks[(0, 0)], blocks[(0, 1)]],
                     [blocks[(1, 0)], blocks[(1, 1)]]])
    sigma = float(np.linalg.svd(full, compute_uv=False)[0])
    dense = float(np.linalg.norm(dualband_matrix(space, g).entries, 2))
    return HankelNormReport(sigma, dense, abs(sigma - dense), full)


# --------------------------------------------------------------------------
# the triangular regime
# --------------------------------------------------------------------------

@dataclass
class AnalyticSpectrumReport:
    values: list             # distinct spectrum points
    multiplicities: dict     # value -> algebraic multiplicity in the matrix
    triangle: str            # "lower" or "upper"
    dense_eigs: list
    match_gap: float


def _triangle_side(space, tol):
    tbs = space.theta.as_symbol().conj()
    fw_tail = _analytic_tail(tbs * space.cross_symbol("fw"))
    bw_tail = _analytic_tail(tbs * space.cross_symbol("bw"))
    if fw_tail <= tol:
        return "lower", fw_tail, bw_tail
    if bw_tail <= tol:
        return "upper", fw_tail, bw_tail
    raise CoefficientError(
        "neither band ratio is divisible by theta "
        f"(tails {fw_tail:.3e} forward, {bw_tail:.3e} backward); "
        "the triangular spectrum formula does not apply")


def analytic_spectrum(space, g, tol=TOL_ANALYTIC):
    """Spectrum of the compression when one band ratio kills a corner.

    With g analytic and conj(phi) psi (or its conjugate) in
    theta H^infinity, the block matrix is triangular with two equal
    diagonal blocks, so the spectrum is g evaluated at the zeros of
    theta, every point twice.  The dense eigenvalues are matched
    against the closed form and the largest match distance reported.
    """
    side, _, _ = _triangle_side(space, tol)
    g_tail = _analytic_tail(g)
    if g_tail > tol:
        raise CoefficientError(
            f"g is not analytic (co-analytic tail {g_tail:.3e}); "
            "the spectral mapping needs an analytic symbol")
    zeros = space.theta.zeros_list()
    raw = [complex(g.eval_at(z)) for z in zeros]
    values = []
    mult = {}
    for v in raw:
        hit = next((u for u in values if abs(u - v) <= 1e-9), None)
        if hit is None:
            values.append(v)
            mult[v] = 2
        else:
            mult[hit] += 2

    W = dualband_matrix(space, g).entries
    dense = np.linalg.eigvals(W)
    gap = max(min(abs(e - v) for v in values) for e in dense)
    return AnalyticSpectrumReport(
        values, mult, side,
        sorted([complex(e) for e in dense],
               key=lambda v: (abs(v), np.angle(v + 0j))),
        float(gap))


def triangular_w_inverse(space, g, tol=TOL_ANALYTIC):
    """Closed-form inverse of the triangular block matrix.

    For W = [[A, 0], [B, A]] the inverse is [[Ai, 0], [-Ai B Ai, Ai]]
    with Ai the inverse of the diagonal block (mirrored for the upper
    triangle).  Returns (W_inverse, info) with the verification
    residual max |W W_inverse - I|.
    """
    side, _, _ = _triangle_side(space, tol)
    basis = space.basis
    G = space.default_grid([g] if hasattr(g, "fourier_coeffs") else ())
    A = tto_matrix(basis, g, G=G).entries
    fw = space.cross_symbol("fw")
    bw = space.cross_symbol("bw")
    B12 = tto_matrix(basis, fw * g, G=G).entries
    B21 = tto_matrix(basis, bw * g, G=G).entries
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= 1e-12 * max(s[0], 1e-300):
        raise SingularOperatorError(
            "the diagonal block is singular; no triangular inverse")
    Ai = np.linalg.inv(A)
    n = space.n
    Wi = np.zeros((2 * n, 2 * n), dtype=complex)
    Wi[:n, :n] = Ai
    Wi[n:, n:] = Ai
    if side == "lower":
        Wi[n:, :n] = -Ai @ B21 @ Ai
    else:
        Wi[:n, n:] = -Ai @ B12 @ Ai
    W = np.block([[A, B12], [B21, A]])
    residual = float(np.max(np.abs(W @ Wi - np.eye(2 * n))))
    return Wi, {"triangle": side, "residual": residual,
                "cond_diag": float(s[0] / s[-1])}


def shift_essential_spectrum_formula(theta):
    """Essential spectrum of the dual-band shift: the boundary spectrum
    of theta alone, independent of the band data."""
    from .shift_spectra import essential_spectrum
    return essential_spectrum(theta)


__all__ = [
    "hankel_norm", "HankelNormReport", "analytic_spectrum",
    "AnalyticSpectrumReport", "triangular_w_inverse",
    "shift_essential_spectrum_formula",
]
