"""Explicit Wiener-Hopf factorizations for the shift extension family.

For the four-by-four extension symbol of the compression of z - lam the
factors are written down in closed form; no numerical factorization is
performed.  Every branch stores the minus factor M, the inverse X of
the plus factor, and diagonal powers k with

    symbol = M diag(z^k) X^{-1},   i.e.   symbol X = M diag(z^k),

which ``verify_factorization`` measures on the grid together with the
half-plane supports and determinant laws of the factors.

Four families are covered:

* ``canonical_factors``: bounded canonical factorization at any point
  off the point spectrum, in two algebraic branches (the quadratic
  discriminant scalar disc = 1 - kappa tbar^2 away from zero or at it)
  and with separate interior and exterior entry formulas.
* ``meromorphic_factors``: the R-family factorization with polynomial
  right factor, meromorphic on the minus side.
* ``hminus_split``: the unit-determinant peeling of the R-family symbol
  into a bounded-minus factor times a two-block triangular remainder.
* ``l2_factors``: unbounded (L^2) canonical factorization of that
  triangular remainder for R = z - lam, with its exceptional branch at
  theta(lam) = -1/(1 - conj(theta(0))) where the partial indices jump
  to (-1, -1, 1, 1).

``resolvent_apply`` chains the canonical factors into the standard
solve: project the lifted right-hand side between the factors and read
off the first two components.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dual_band import dualband_matrix
from .errors import (EigenvalueEncounteredError, MissingDecompositionError,
                     NoAdcError)
from .extension import build_G
from .matsym import MatrixSymbol, monomial_diag_values
from .shift_spectra import delta, delta_tilde, shift_constants
from .symbols import (LaurentSymbol, analytic_project_values,
                      difference_quotient, grid_points)

CASE_SWITCH = 1e-10     # |disc| at or below this selects the degenerate branch
CASE_WARN = 1e-6        # nonzero but tiny disc: flag ill conditioning
DET_FLOOR = 1e-11       # factor determinant this small means lam is spectral
L2_EXCEPTIONAL = 1e-10
L2_WARN = 1e-6


@dataclass
class FactorizationResult:
    kind: str
    lam: complex | None
    grid: int
    symbol: MatrixSymbol
    minus: MatrixSymbol
    plus_inverse: MatrixSymbol
    diag_powers: tuple
    det_expected: complex | None
    warnings: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)


def _default_grid(space, G):
    return G or max(4096, space.default_grid(extra_span=8))


def build_g_lambda(space, lam, G=None):
    """Extension symbol of z - lam in split form (grid MatrixSymbol)."""
    G = _default_grid(space, G)
    return build_G(space, lam=lam, G=G)


def build_g_r(space, R, G=None):
    """Extension symbol of the polynomial family member R, split form."""
    G = _default_grid(space, G)
    z = grid_points(G)
    th = space.theta.sample(G)
    tb = np.conj(th)
    rv = R.sample(G) if hasattr(R, "sample") else np.asarray(R(z))
    if space.aplus is None or space.aminus is None:
        raise MissingDecompositionError("the R-family needs the split")
    Apb = np.conj(space.aplus.sample(G))
    Am = space.aminus.sample(G)
    o = np.zeros(G, dtype=complex)
    return MatrixSymbol(np.array([
        [tb, o, o, o],
        [o, tb, o, o],
        [rv, rv * Apb * tb, th, o],
        [rv * Am * tb, rv, o, th],
    ])), rv


def build_g_tilde(space, R, G=None):
    """Triangular remainder of the R-family after the bounded peel."""
    G = _default_grid(space, G)
    z = grid_points(G)
    th = space.theta.sample(G)
    tb = np.conj(th)
    rv = R.sample(G) if hasattr(R, "sample") else np.asarray(R(z))
    o = np.zeros(G, dtype=complex)
    return MatrixSymbol(np.array([
        [tb, o, o, o],
        [o, tb, o, o],
        [rv * (1 - tb), o, th, o],
        [o, rv * (1 - tb), o, th],
    ])), rv


# --------------------------------------------------------------------------
# canonical factorization of the shift symbol
# --------------------------------------------------------------------------

def canonical_factors(space, lam, G=None):
    """Bounded canonical factorization at lam off the point spectrum.

    Branch selection: the quadratic scalar disc = 1 - kappa tbar^2
    decides between the generic entries and the degenerate ones; the
    location of lam relative to the circle decides the analytic profile
    (difference quotient inside, reproducing kernel outside).  A factor
    determinant at the eigenvalue floor aborts: no bounded canonical
    factorization exists there.
    """
    lam = complex(lam)
    G = _default_grid(space, G)
    c = shift_constants(space)
    region = "outside" if abs(lam) > 1 + 1e-10 else "inside"
    warnings = []

    if region == "inside":
        thl = complex(space.theta.eval_at(lam))
        det_lam = delta(space, lam)
    else:
        tau = complex(np.conj(space.theta.eval_at(1.0 / np.conj(lam))))
        det_lam = delta_tilde(space, lam)

    degenerate = abs(c.disc) <= CASE_SWITCH
    if degenerate:
        scale = -det_lam / c.beta
    else:
        scale = -det_lam / c.disc
        if abs(c.disc) <= CASE_WARN:
            warnings.append(
                f"quadratic scalar disc is tiny ({abs(c.disc):.3e}); "
                "the generic branch is ill conditioned")
    if abs(scale) <= DET_FLOOR:
        raise EigenvalueEncounteredError(
            f"factor determinant {scale:.3e} at lam={lam}: "
            "the point belongs to the point spectrum")

    z = grid_points(G)
    th = space.theta.sample(G)
    tb = np.conj(th)
    zl = z - lam
    if space.aplus is None or space.aminus is None:
        raise MissingDecompositionError(
            "canonical factors need the band-ratio split")
    Apb = np.conj(space.aplus.sample(G))
    Am = space.aminus.sample(G)
    o = np.zeros(G, dtype=complex)
    one = np.ones(G, dtype=complex)

    if region == "inside":
        prof = difference_quotient(space.theta, lam, z)   # analytic profile
        lower2, lower4 = -one, -one                        # X rows 3, 4
        m32, m44 = -thl * one, -thl * one
        m34, m42 = Apb * (1 - thl * tb), Am * (1 - thl * tb)
    else:
        prof = (1 - tau * th) / zl
        lower2, lower4 = tau * one, tau * one
        m32, m44 = one, one
        m34, m42 = Apb * (tb - tau), Am * (tb - tau)
    profc = prof * tb

    if not degenerate:
        c0 = c.kappa * c.tbar / c.disc
        g31 = -(c.beta / c.disc) * zl * (Apb * tb - c.alpha * c.tbar)
        g33 = (zl / c.disc) * (Apb - c.alpha
                               + c.kappa * c.tbar * Apb * (tb - c.tbar))
        g41 = (zl / c.disc) * (Am - c.beta
                               + c.kappa * c.tbar * Am * (tb - c.tbar))
        g43 = -(c.alpha / c.disc) * zl * (Am * tb - c.beta * c.tbar)
        plus_inv = MatrixSymbol(np.array([
            [th + c0, prof, -(c.alpha / c.disc) * one, o],
            [-(c.beta / c.disc) * one, o, th + c0, prof],
            [-zl, lower2, o, o],
            [o, o, -zl, lower4],
        ]))
        minus = MatrixSymbol(np.array([
            [1 + c0 * tb, profc, -(c.alpha / c.disc) * tb, o],
            [-(c.beta / c.disc) * tb, o, 1 + c0 * tb, profc],
            [g31, m32, g33, m34],
            [g41, m42, g43, m44],
        ]))
        kind = "canonical-generic"
    else:
        a = c.alpha
        tbar = c.tbar
        plus_inv = MatrixSymbol(np.array([
            [-a * (1 - th * tbar), prof, -a * tbar * one, o],
            [th, o, one, prof],
            [-tbar * a * zl, lower2, o, o],
            [-zl, o, o, lower4],
        ]))
        minus = MatrixSymbol(np.array([
            [-a * (tb - tbar), profc, -a * tbar * tb, o],
            [one, o, tb, profc],
            [(Apb - a) * zl, m32, (Apb * tb - a * tbar) * zl, m34],
            [-a * Am * (tb - tbar) * zl, m42,
             zl * (1 - a * tbar * Am * tb), m44],
        ]))
        kind = "canonical-degenerate"

    symbol = build_g_lambda(space, lam, G=G)
    res = FactorizationResult(kind, lam, G, symbol, minus, plus_inv,
                              (0, 0, 0, 0), complex(scale), warnings)
    res.extras = {"region": region, "disc": complex(c.disc),
                  "det_lambda": complex(det_lam), "minus_degree": 0}
    return res


# --------------------------------------------------------------------------
# the R family
# --------------------------------------------------------------------------

def meromorphic_factors(space, R, G=None):
    """Meromorphic factorization of the R-family symbol.

    The plus factor is the inverse of the stored matrix, analytic with
    determinant R^2; the minus side is bounded only up to the degree of
    R, which the verification treats as the allowed support.
    """
    G = _default_grid(space, G)
    symbol, rv = build_g_r(space, R, G=G)
    th = space.theta.sample(G)
    tb = np.conj(th)
    Apb = np.conj(space.aplus.sample(G))
    Am = space.aminus.sample(G)
    o = np.zeros(G, dtype=complex)
    one = np.ones(G, dtype=complex)
    plus_inv = MatrixSymbol(np.array([
        [one, o, th, o],
        [o, one, o, th],
        [o, o, -rv, o],
        [o, o, o, -rv],
    ]))
    minus = MatrixSymbol(np.array([
        [tb, o, one, o],
        [o, tb, o, one],
        [rv, rv * Apb * tb, o, Apb * rv],
        [rv * Am * tb, rv, Am * rv, o],
    ]))
    deg = _poly_degree(R)
    res = FactorizationResult("meromorphic", None, G, symbol, minus,
                              plus_inv, (0, 0, 0, 0), None)
    res.extras = {"r_values": rv, "minus_degree": deg, "region": "family"}
    return res


def _poly_degree(R):
    if isinstance(R, LaurentSymbol) and R.kind == "laurent":
        lo, hi = R.support()
        if lo >= 0:
            return int(hi)
    return None


def hminus_split(space, R, G=None):
    """Peel the R-family symbol: symbol = H * remainder, det H = 1.

    H carries all coupling to the band-ratio split and is invertible
    with constant determinant one; the remainder is the two-block
    triangular symbol handled by the L^2 factorization.  Returns
    (H, remainder, residual).
    """
    G = _default_grid(space, G)
    symbol, rv = build_g_r(space, R, G=G)
    Apb = np.conj(space.aplus.sample(G))
    Am = space.aminus.sample(G)
    o = np.zeros(G, dtype=complex)
    one = np.ones(G, dtype=complex)
    H = MatrixSymbol(np.array([
        [one, o, o, o],
        [o, one, o, o],
        [rv, rv * Apb, one, o],
        [rv * Am, rv, o, one],
    ]))
    tilde, _ = build_g_tilde(space, R, G=G)
    residual = symbol.max_abs_diff(H.matmul(tilde))
    return H, tilde, residual


# --------------------------------------------------------------------------
# L^2 factorization of the triangular remainder
# --------------------------------------------------------------------------

def l2_factors(space, lam, G=None):
    """Unbounded canonical factorization of the triangular remainder.

    Works for lam in the closed disc (boundary points need an angular
    derivative).  The generic branch has zero partial indices and factor
    determinant -(q + theta(lam))^2 with q = 1/(1 - conj(theta(0))); at
    theta(lam) = -q those factors degenerate and the exceptional branch
    takes over with indices (-1, -1, 1, 1) and determinant theta(lam)^2.
    """
    lam = complex(lam)
    if abs(lam) > 1 + 1e-10:
        raise ValueError("the L2 factorization applies inside the closed disc")
    if abs(abs(lam) - 1.0) <= 1e-10 and not space.theta.has_adc_at(lam):
        raise NoAdcError(
            f"no angular derivative at {lam}: the difference quotient "
            "does not belong to the model space")
    G = _default_grid(space, G)
    z = grid_points(G)
    th = space.theta.sample(G)
    tb = np.conj(th)
    zl = z - lam
    thl = complex(space.theta.eval_at(lam))
    tbar = np.conj(space.theta.value_at_zero())
    q = 1.0 / (1.0 - tbar)
    dq = difference_quotient(space.theta, lam, z)
    dqc = dq * tb
    o = np.zeros(G, dtype=complex)
    one = np.ones(G, dtype=complex)
    warnings = []

    gap = abs(thl + q)
    if gap <= L2_EXCEPTIONAL:
        m11 = z * dqc
        m13 = np.conj(z)
        m31 = z * (thl * tb - 1 - thl)
        m33 = -zl * np.conj(z)
        plus_inv = MatrixSymbol(np.array([
            [dq, o, th, o],
            [o, dq, o, th],
            [-one, o, -zl, o],
            [o, -one, o, -zl],
        ]))
        minus = MatrixSymbol(np.array([
            [m11, o, m13, o],
            [o, m11, o, m13],
            [m31, o, m33, o],
            [o, m31, o, m33],
        ]))
        powers = (-1, -1, 1, 1)
        det_expected = thl ** 2
        kind = "l2-exceptional"
        if gap > 1e-13:
            warnings.append(
                f"exceptional branch taken with gap {gap:.3e}; minus-side "
                "support is clean only at the exact exceptional point")
    else:
        if gap <= L2_WARN:
            warnings.append(
                f"theta(lam) sits {gap:.3e} from the exceptional value; "
                "the generic factors are nearly singular")
        m31 = zl * (q * (1 - tb) - 1)
        m32 = -1 + thl * (tb - 1)
        plus_inv = MatrixSymbol(np.array([
            [q + th, dq, o, o],
            [o, o, q + th, dq],
            [-zl, -one, o, o],
            [o, o, -zl, -one],
        ]))
        minus = MatrixSymbol(np.array([
            [q * tb + 1, dqc, o, o],
            [o, o, q * tb + 1, dqc],
            [m31, m32, o, o],
            [o, o, m31, m32],
        ]))
        powers = (0, 0, 0, 0)
        det_expected = -(q + thl) ** 2
        kind = "l2-generic"

    shift = LaurentSymbol.from_coeffs({0: -lam, 1: 1.0})
    symbol, _ = build_g_tilde(space, shift, G=G)
    res = FactorizationResult(kind, lam, G, symbol, minus, plus_inv,
                              powers, complex(det_expected), warnings)
    res.extras = {"q": complex(q), "theta_lam": thl, "gap": float(gap),
                  "minus_degree": 0, "region": "closed-disc"}
    return res


# the reduced symbol carries the tilde in the notation above
l2_factors_tilde = l2_factors


# --------------------------------------------------------------------------
# verification and the resolvent
# --------------------------------------------------------------------------

def verify_factorization(res):
    """Measure everything the factorization claims, on its own grid.

    Returns a dict of residuals: the factor identity both ways, the
    half-plane supports of the factors, and the determinant laws
    (constant and equal to the closed form, or R^2 pointwise for the
    meromorphic family).
    """
    Dw = monomial_diag_values(res.diag_powers, res.grid)
    lhs = res.symbol.matmul(res.plus_inverse)
    rhs = res.minus.scale_columns(Dw)
    out = {"identity_residual": lhs.max_abs_diff(rhs)}

    plus, cond = res.plus_inverse.pointwise_inverse()
    recon = rhs.matmul(plus)
    out["reconstruction_residual"] = recon.max_abs_diff(res.symbol)
    out["plus_cond"] = cond

    out["plus_tail"] = float(np.sqrt(res.plus_inverse.max_tail(
        lambda f: f < 0)))
    deg = res.extras.get("minus_degree")
    if deg is not None:
        out["minus_tail"] = float(np.sqrt(res.minus.max_tail(
            lambda f, d=deg: f > d)))

    det_minus = res.minus.det_values()
    det_plusinv = res.plus_inverse.det_values()
    rv = res.extras.get("r_values")
    if rv is not None:
        out["det_minus_dev"] = float(np.max(np.abs(det_minus - rv ** 2)))
        out["det_plus_inverse_dev"] = float(
            np.max(np.abs(det_plusinv - rv ** 2)))
    elif res.det_expected is not None:
        out["det_minus_dev"] = float(
            np.max(np.abs(det_minus - res.det_expected)))
        out["det_plus_inverse_dev"] = float(
            np.max(np.abs(det_plusinv - res.det_expected)))
    return out


def resolvent_apply(space, lam, h_coords, G=None):
    """Solve the compression of (z - lam) applied to f = h by factors.

    Lifts h into the extension, solves the minus factor pointwise,
    projects onto the analytic half, applies the stored plus inverse and
    reads the band coordinates back off the first two components.
    Returns (coords, diagnostics).
    """
    res = canonical_factors(space, lam, G=G)
    Gq = res.grid
    n = space.n
    h = np.asarray(h_coords, dtype=complex)
    h1 = space.half_synth(h[:n], Gq)
    h2 = space.half_synth(h[n:], Gq)
    o = np.zeros(Gq, dtype=complex)
    H = np.vstack([o, o, h1, h2])

    Y, cond = res.minus.solve_values(H)
    Yp = np.vstack([analytic_project_values(Y[i]) for i in range(4)])
    F = res.plus_inverse.matvec_values(Yp)
    coords = np.concatenate([space.basis.project_values(F[0]),
                             space.basis.project_values(F[1])])

    g = LaurentSymbol.from_coeffs({0: -lam, 1: 1.0})
    T = dualband_matrix(space, g).entries
    hn = max(float(np.linalg.norm(h)), 1e-300)
    residual = float(np.linalg.norm(T @ coords - h)) / hn
    diagnostics = {"cond_minus": cond, "residual": residual, "grid": Gq,
                   "kind": res.kind, "region": res.extras["region"],
                   "warnings": list(res.warnings)}
    return coords, diagnostics


__all__ = [
    "FactorizationResult", "build_g_lambda", "build_g_r", "build_g_tilde",
    "canonical_factors", "meromorphic_factors", "hminus_split",
    "l2_factors", "l2_factors_tilde", "verify_factorization",
    "resolvent_apply",
]
