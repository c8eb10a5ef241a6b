"""Spectra of the dual-band compression of multiplication by z.

Everything here is driven by four scalars extracted from the split
conj(psi) phi = aminus conj(theta) + aplus theta:

    alpha = conj(aplus(0)),  beta = conj value at 0 of conj(aminus),
    tbar  = conj(theta(0)),  kappa = alpha * beta.

For a point lam the compression of (z - lam) has nontrivial kernel
exactly when a two-by-two determinant vanishes:

    inside / on the circle:  delta(lam) =
        theta(lam)^2 - kappa (1 - tbar theta(lam))^2
    outside the closed disc: delta_tilde(lam) =
        1 - kappa (tbar - tau)^2,   tau = conj(theta(1 / conj(lam))).

Kernel functions are multiples of the difference quotient
(theta - theta(lam)) / (z - lam) inside, and of the reproducing kernel
at 1/conj(lam) outside.  ``point_spectrum`` solves delta = 0 in closed
form through the substitution w = theta(lam), which turns the problem
into one quadratic in w followed by polynomial root finding for
theta(lam) = w; this covers every finite Blaschke product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dual_band import dualband_matrix
from .errors import NotAnEigenvalueError
from .symbols import (LaurentSymbol, TAU_ROOT, difference_quotient,
                      grid_points)

TOL_NULL = 1e-8
TOL_BOUNDARY = 1e-10
ADC_BLOWUP = 1e3


@dataclass
class ShiftConstants:
    alpha: complex
    beta: complex
    tbar: complex
    kappa: complex
    disc: complex          # 1 - kappa * tbar^2

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "tbar": self.tbar,
                "kappa": self.kappa, "disc": self.disc}


def shift_constants(space):
    ap0, amb0 = space.split_constants()
    alpha = np.conj(ap0)
    beta = np.conj(amb0)
    tbar = np.conj(space.theta.value_at_zero())
    kappa = alpha * beta
    return ShiftConstants(complex(alpha), complex(beta), complex(tbar),
                          complex(kappa), complex(1 - kappa * tbar ** 2))


def delta(space, lam):
    """Kernel determinant for lam inside or on the circle."""
    c = shift_constants(space)
    thl = complex(space.theta.eval_at(lam))
    return thl ** 2 - c.kappa * (1 - c.tbar * thl) ** 2


def delta_tilde(space, lam):
    """Kernel determinant for lam outside the closed disc."""
    c = shift_constants(space)
    tau = np.conj(space.theta.eval_at(1.0 / np.conj(complex(lam))))
    return complex(1 - c.kappa * (c.tbar - tau) ** 2)


def _region(lam):
    r = abs(complex(lam))
    if r < 1 - TOL_BOUNDARY:
        return "inside"
    if r <= 1 + TOL_BOUNDARY:
        return "boundary"
    return "outside"


def _nullspace_2x2(m, tol=TOL_NULL):
    """(nullity, basis rows) of a 2x2 complex matrix."""
    U, s, Vh = np.linalg.svd(m)
    scale = max(s[0], 1.0)
    nullity = int(np.sum(s <= tol * scale))
    if nullity == 0:
        return 0, np.zeros((0, 2), dtype=complex)
    return nullity, np.conj(Vh[2 - nullity:, :])


def _pair_matrix_inside(c, thl):
    return np.array([[-thl, c.alpha * (1 - c.tbar * thl)],
                     [c.beta * (1 - c.tbar * thl), -thl]], dtype=complex)


def _pair_matrix_outside(c, tau):
    return np.array([[1.0, c.alpha * (c.tbar - tau)],
                     [c.beta * (c.tbar - tau), 1.0]], dtype=complex)


def eigvec_build(space, lam, G=None):
    """Kernel coordinates of the compression of (z - lam).

    Returns a (k, 2n) array of band coordinates, one row per kernel
    dimension.  Raises NotAnEigenvalueError when the two-by-two pair
    matrix is invertible at lam.
    """
    c = shift_constants(space)
    region = _region(lam)
    lam = complex(lam)
    G = G or space.default_grid(extra_span=4)
    z = grid_points(G)
    if region == "outside":
        tau = np.conj(space.theta.eval_at(1.0 / np.conj(lam)))
        m = _pair_matrix_outside(c, tau)
        profile = (1 - tau * space.theta.sample(G)) / (z - lam)
    else:
        thl = complex(space.theta.eval_at(lam))
        m = _pair_matrix_inside(c, thl)
        profile = difference_quotient(space.theta, lam, z)
    nullity, rows = _nullspace_2x2(m)
    if nullity == 0:
        raise NotAnEigenvalueError(
            f"pair matrix at {lam} has no kernel (smin relative to "
            f"scale exceeds {TOL_NULL})")
    p = space.basis.project_values(profile)
    out = np.zeros((nullity, 2 * space.n), dtype=complex)
    for i, (c1, c2) in enumerate(rows):
        out[i, :space.n] = c1 * p
        out[i, space.n:] = c2 * p
    return out


# --------------------------------------------------------------------------
# closed-form point spectrum
# --------------------------------------------------------------------------

def _front_const(theta):
    if theta.kind == "finite_blaschke":
        return complex(theta.const)
    if theta.kind == "product":
        c = 1.0 + 0j
        for f in theta.factors:
            c *= _front_const(f)
        return c
    raise ValueError("closed-form roots need a finite Blaschke product")


def _theta_poly_parts(theta):
    """(const, numerator coeffs, denominator coeffs), descending powers."""
    zeros = theta.zeros_list()
    num = np.array([1.0 + 0j])
    den = np.array([1.0 + 0j])
    for a in zeros:
        num = np.polymul(num, np.array([1.0, -a], dtype=complex))
        den = np.polymul(den, np.array([-np.conj(a), 1.0], dtype=complex))
    return _front_const(theta), num, den


def solve_theta_equals(theta, w, tol=TAU_ROOT):
    """All solutions of theta(lam) = w in the plane (finite Blaschke)."""
    const, num, den = _theta_poly_parts(theta)
    # align descending-power arrays on the constant term before combining
    m = max(len(num), len(den))
    num = np.concatenate([np.zeros(m - len(num), dtype=complex), num])
    den = np.concatenate([np.zeros(m - len(den), dtype=complex), den])
    p = const * num - complex(w) * den
    top = float(np.max(np.abs(p))) if p.size else 0.0
    if top == 0.0:
        return np.zeros(0, dtype=complex)
    keep = np.abs(p) > 1e-14 * top
    first = int(np.argmax(keep))
    p = p[first:]
    if len(p) < 2:
        return np.zeros(0, dtype=complex)
    roots = np.roots(p)
    good = []
    for r in roots:
        try:
            val = theta.eval_at(r)
        except Exception:
            continue
        if abs(val - w) <= max(tol, 1e-9 * max(1.0, abs(w))):
            good.append(complex(r))
    return np.array(good, dtype=complex)


def _w_roots(c):
    """Roots of disc * w^2 + 2 kappa tbar w - kappa = 0 with flags."""
    if abs(c.kappa) <= 1e-14:
        return [0.0 + 0j], "kappa-zero (double root at w = 0)"
    if abs(c.disc) <= 1e-14:
        return [complex(1.0 / (2 * c.tbar))], "leading term vanishes"
    s = np.sqrt(c.kappa)
    return [complex((-c.kappa * c.tbar + s) / c.disc),
            complex((-c.kappa * c.tbar - s) / c.disc)], "generic"


def _exterior_targets(c):
    """Values conj(u) with theta(1/conj(lam)) = conj(u) at exterior roots."""
    if abs(c.kappa) <= 1e-14:
        return []
    s = 1.0 / np.sqrt(c.kappa)
    return [complex(np.conj(c.tbar - s)), complex(np.conj(c.tbar + s))]


def _dedup(values, tol=1e-8):
    out = []
    for v in values:
        if all(abs(v - u) > tol for u in out):
            out.append(v)
    return out


@dataclass
class SpectrumPoint:
    lam: complex
    region: str
    det_value: complex
    kernel_dim: int
    residual: float
    coords: np.ndarray


@dataclass
class SpectrumReport:
    points: list
    constants: dict
    regime: str
    cross_check: dict = field(default_factory=dict)

    def eigenvalues(self):
        return [p.lam for p in self.points]


def point_spectrum(space, cross_check=True, G=None):
    """Every lam in the plane where the compression of z - lam has
    nontrivial kernel, with kernel dimensions, vectors and residuals.

    Interior and boundary points come from the quadratic in w =
    theta(lam); exterior points from theta(1/conj(lam)) = conj(u) at the
    two square-root branches.  A dense eigenvalue cross-check against
    the matrix of the compression of z is attached when requested.
    """
    c = shift_constants(space)
    theta = space.theta
    candidates = []
    ws, regime = _w_roots(c)
    for w in ws:
        if abs(w) > 1 + TOL_BOUNDARY:
            continue
        candidates.extend(solve_theta_equals(theta, w))
    for target in _exterior_targets(c):
        if abs(target) >= 1 - TOL_BOUNDARY:
            continue
        for mu in solve_theta_equals(theta, target):
            if 1e-12 < abs(mu) < 1 - TOL_BOUNDARY:
                candidates.append(1.0 / np.conj(mu))

    points = []
    for lam in _dedup(candidates):
        region = _region(lam)
        det_val = delta_tilde(space, lam) if region == "outside" \
            else delta(space, lam)
        try:
            coords = eigvec_build(space, lam, G=G)
        except NotAnEigenvalueError:
            continue
        g = LaurentSymbol.from_coeffs({0: -lam, 1: 1.0})
        T = dualband_matrix(space, g).entries
        res = 0.0
        for row in coords:
            nr = float(np.linalg.norm(row))
            if nr > 0:
                res = max(res, float(np.linalg.norm(T @ row)) / nr)
        points.append(SpectrumPoint(complex(lam), region, complex(det_val),
                                    coords.shape[0], res, coords))
    points.sort(key=lambda p: (round(abs(p.lam), 12),
                               np.angle(p.lam + 0j)))

    report = SpectrumReport(points, shift_constants(space).as_dict(), regime)
    if cross_check:
        report.cross_check = _matrix_cross_check(space, points)
    return report


def _matrix_cross_check(space, points):
    """Compare the closed form with dense eigenvalues of the shift."""
    Tz = dualband_matrix(space, LaurentSymbol.monomial(1)).entries
    eigs = np.linalg.eigvals(Tz)
    formula = [p.lam for p in points]
    missed = [complex(e) for e in eigs
              if formula and min(abs(e - f) for f in formula) > 1e-6]
    if not formula:
        missed = [complex(e) for e in eigs]
    spurious = [f for f in formula
                if min(abs(e - f) for e in eigs) > 1e-6]
    return {
        "matrix_eigs": sorted([complex(e) for e in eigs],
                              key=lambda v: (abs(v), np.angle(v + 0j))),
        "unmatched_matrix_eigs": missed,
        "unmatched_formula_points": spurious,
        "agrees": not missed and not spurious,
    }


# --------------------------------------------------------------------------
# boundary behaviour
# --------------------------------------------------------------------------

@dataclass
class AdcResult:
    has_adc: bool
    norms: list
    diverging: bool
    consistent: bool


def adc_test(theta, zeta, levels=5):
    """Angular-derivative diagnostics at a boundary point.

    The squared norm of the difference quotient of theta at w equals
    (1 - |theta(w)|^2) / (1 - |w|^2) exactly, so radial divergence of
    that quantity along w = r zeta witnesses the absence of an angular
    derivative without any quadrature.  Radii approach the circle in
    factor-16 steps.
    """
    zeta = complex(zeta) / abs(complex(zeta))
    norms = []
    for k in range(levels):
        r = 1.0 - 2.0 ** (-(4 * k + 6))
        w = r * zeta
        tv = theta.eval_at(w)
        val = (1.0 - abs(tv) ** 2) / (1.0 - r ** 2)
        norms.append(float(np.sqrt(max(val, 0.0))))
    increasing = all(b > a for a, b in zip(norms, norms[1:]))
    diverging = increasing and norms[-1] > ADC_BLOWUP
    rule = bool(theta.has_adc_at(zeta))
    return AdcResult(rule, norms, diverging, rule == (not diverging))


def essential_spectrum(theta_or_space, radial_levels=16):
    """Boundary points where the inner function clusters to zero.

    Returns (points, evidence): for each candidate from the structural
    boundary spectrum, the radial minimum of |theta| as supporting
    evidence; finite Blaschke products yield the empty set and the
    evidence shows the radial minimum staying away from zero at probe
    directions.
    """
    theta = getattr(theta_or_space, "theta", theta_or_space)
    pts = theta.boundary_spectrum()
    rs = 1.0 - 2.0 ** (-np.arange(3, 3 + radial_levels, dtype=float))
    evidence = {}
    for zeta in pts:
        vals = []
        for r in rs:
            try:
                vals.append(abs(theta.eval_at(r * zeta)))
            except Exception:
                vals.append(0.0)
        evidence[complex(zeta)] = float(min(vals)) if vals else 0.0
    return [complex(p) for p in pts], evidence


@dataclass
class ClassifyResult:
    lam: complex
    region: str
    verdict: str
    det_value: complex
    kernel_dim: int
    adc: AdcResult | None
    notes: str = ""


def classify(space, lam, tol_det=1e-9):
    """Place one point of the plane against the shift compression.

    Inside and outside, the verdict follows the sign of the matching
    determinant.  On the circle the decision tree is: no angular
    derivative makes the point essential; with one, a vanishing
    determinant makes it an eigenvalue; a boundary cluster point of the
    inner function is essential; anything else is a resolvent point.
    """
    lam = complex(lam)
    region = _region(lam)
    if region == "outside":
        d = delta_tilde(space, lam)
        if abs(d) <= tol_det:
            vecs = eigvec_build(space, lam)
            return ClassifyResult(lam, region, "eigenvalue", d,
                                  vecs.shape[0], None)
        return ClassifyResult(lam, region, "resolvent-point", d, 0, None)
    if region == "inside":
        d = delta(space, lam)
        if abs(d) <= tol_det:
            vecs = eigvec_build(space, lam)
            return ClassifyResult(lam, region, "eigenvalue", d,
                                  vecs.shape[0], None)
        return ClassifyResult(lam, region, "resolvent-point", d, 0, None)

    zeta = lam / abs(lam)
    adc = adc_test(space.theta, zeta)
    if not adc.has_adc:
        return ClassifyResult(lam, region, "essential", 0j, 0, adc,
                              "no angular derivative at this direction")
    d = delta(space, lam)
    if abs(d) <= tol_det:
        vecs = eigvec_build(space, lam)
        return ClassifyResult(lam, region, "eigenvalue", d,
                              vecs.shape[0], adc)
    pts, evidence = essential_spectrum(space)
    near = [p for p in pts if abs(p - zeta) <= 1e-9]
    if near:
        return ClassifyResult(lam, region, "essential", d, 0, adc,
                              "boundary cluster point of the inner function")
    return ClassifyResult(lam, region, "resolvent-point", d, 0, adc)


__all__ = [
    "ShiftConstants", "shift_constants", "delta", "delta_tilde",
    "eigvec_build", "solve_theta_equals", "point_spectrum",
    "SpectrumPoint", "SpectrumReport", "adc_test", "AdcResult",
    "essential_spectrum", "classify", "ClassifyResult",
]
