"""Dual-band subspaces and the compressions acting on them.

A dual-band space is M = phi * K_theta + psi * K_theta for unimodular
functions phi, psi whose ratio conj(phi) * psi annihilates the model
space compression (the two bands are then orthogonal).  The compression
of multiplication by g to M, expressed in the stacked band basis
{phi e_0 .. phi e_{n-1}, psi e_0 .. psi e_{n-1}}, coincides entry for
entry with the two-by-two block matrix

    W = [[ A_g,            A_{conj(phi) psi g} ],
         [ A_{conj(psi) phi g},  A_g           ]]

acting on two copies of K_theta, where A_h is the model-space
compression of h.  ``unitary_equiv_check`` measures this identity with
both sides computed independently.

The space also carries the antilinear symmetry C(phi k1 + psi k2) =
psi C_theta(k1) + phi C_theta(k2), under which every compression is
C-symmetric: T C = C T*.

A space may be "realized" (phi, psi given) or "free": only theta and the
split conj(psi) phi = aminus * conj(theta) + aplus * theta is supplied,
with aplus analytic and aminus co-analytic.  Free spaces support every
band-ratio construction (spectra, factorizations, resolvents) without
naming phi and psi; operator matrices are then formed in the two-copy
coordinates, which the block identity above makes unitarily faithful.
"""

from __future__ import annotations

import numpy as np

from .errors import (DegeneracyError, MissingDecompositionError,
                     OrthogonalityError, UnimodularityError)
from .model_space import ModelSpaceBasis, OperatorMatrix, ctheta_matrix, tto_matrix
from .symbols import InnerFunction, LaurentSymbol

TOL_ORTHO = 1e-10
TOL_UNIMOD = 1e-10
TOL_DEGEN = 1e-6
TOL_SPLIT = 1e-10


class DualBandSpace:
    """Validated dual-band data; build through :func:`build_dualband`."""

    def __init__(self, theta, basis, phi, psi, aplus, aminus, mode, report):
        self.theta = theta
        self.basis = basis
        self.phi = phi
        self.psi = psi
        self.aplus = aplus
        self.aminus = aminus
        self.mode = mode
        self.report = report
        self.n = basis.n
        self._band_cache = {}

    # ------------------------------------------------------------ sampling
    def band_values(self, G):
        """(2n, G) samples of the stacked band basis (realized mode)."""
        if self.mode != "realized":
            raise MissingDecompositionError(
                "band samples need a realized space")
        got = self._band_cache.get(G)
        if got is not None:
            return got
        V = self.basis.values(G)
        pv = self.phi.sample(G)
        sv = self.psi.sample(G)
        B = np.vstack([V * pv, V * sv])
        self._band_cache[G] = B
        return B

    def synthesize(self, coords, G):
        """Samples of the function with the given band coordinates."""
        coords = np.asarray(coords, dtype=complex)
        return coords @ self.band_values(G)

    def half_synth(self, coords_half, G):
        """Samples of a single K_theta element from basis coordinates."""
        return self.basis.synth_values(coords_half, G)

    def default_grid(self, symbols=(), extra_span=0):
        syms = list(symbols)
        if self.mode == "realized":
            for b in (self.phi, self.psi):
                if isinstance(b, LaurentSymbol):
                    syms.append(b)
        else:
            for b in (self.aplus, self.aminus):
                if isinstance(b, LaurentSymbol):
                    syms.append(b)
        return self.basis.default_grid(syms, extra_span=extra_span)

    # --------------------------------------------------------- band ratios
    def cross_symbol(self, direction="fw"):
        """conj(phi) * psi ("fw") or conj(psi) * phi ("bw"), exactly.

        Free spaces reconstruct the ratio from the analytic/co-analytic
        split, which determines it modulo nothing: the split is exact.
        """
        if self.mode == "realized":
            fw = self.phi.conj() * self.psi
            return fw if direction == "fw" else fw.conj()
        if self.aplus is None or self.aminus is None:
            raise MissingDecompositionError("free space lacks its split")
        th = self.theta.as_symbol()
        bw = self.aminus * th.conj() + self.aplus * th
        return bw.conj() if direction == "fw" else bw

    # ------------------------------------------------ split scalar values
    def split_constants(self):
        """(A_plus(0), conj-value of aminus at index 0) used by spectra.

        The second value is the evaluation at the origin of the circle
        conjugate of the co-analytic half.
        """
        if self.aplus is None or self.aminus is None:
            raise MissingDecompositionError(
                "spectral formulas need the analytic/co-analytic split")
        ap0 = complex(self.aplus.eval_at(0.0))
        amb0 = complex(self.aminus.conj().eval_at(0.0))
        return ap0, amb0


def _as_symbol(obj):
    if isinstance(obj, (int, float, complex)):
        return LaurentSymbol.constant(obj)
    return obj


def build_dualband(theta, phi=None, psi=None, aplus=None, aminus=None,
                   grid=None, tol_ortho=TOL_ORTHO, tol_unimod=TOL_UNIMOD):
    """Validate and assemble a dual-band space.

    Realized mode (phi and psi given) checks unimodularity of both bands,
    orthogonality of the bands over K_theta, and non-degeneracy (neither
    band ratio is a constant multiple of theta).  When theta is a power
    of z the split of conj(psi) phi into co-analytic and analytic halves
    around theta is extracted by frequency bookkeeping; otherwise a
    caller-supplied split is accepted after residual validation.

    Free mode (no phi/psi) requires theta, aplus, aminus.
    """
    if not isinstance(theta, InnerFunction):
        raise TypeError("theta must be an InnerFunction")
    basis = ModelSpaceBasis(theta)
    n = basis.n
    phi = _as_symbol(phi) if phi is not None else None
    psi = _as_symbol(psi) if psi is not None else None
    aplus = _as_symbol(aplus) if aplus is not None else None
    aminus = _as_symbol(aminus) if aminus is not None else None
    report = {}

    if phi is None and psi is None:
        if aplus is None or aminus is None:
            raise MissingDecompositionError(
                "free mode needs both halves of the band-ratio split")
        _validate_split_tails(aplus, aminus, report)
        return DualBandSpace(theta, basis, None, None, aplus, aminus,
                             "free", report)
    if phi is None or psi is None:
        raise ValueError("realized mode needs both phi and psi")

    G = grid or basis.default_grid(
        [s for s in (phi, psi) if isinstance(s, LaurentSymbol)],
        extra_span=4)
    for name, band in (("phi", phi), ("psi", psi)):
        dev = float(np.max(np.abs(np.abs(band.sample(G)) - 1.0)))
        report[f"unimodular_dev_{name}"] = dev
        if dev > tol_unimod:
            raise UnimodularityError(f"{name} is not unimodular: dev={dev:.3e}")

    cross = phi.conj() * psi
    ortho = float(np.max(np.abs(tto_matrix(basis, cross, G=G).entries)))
    report["orthogonality_max_entry"] = ortho
    if ortho > tol_ortho:
        raise OrthogonalityError(
            f"bands are not orthogonal: max compression entry {ortho:.3e}")

    thv = theta.sample(G)
    for name, ratio in (("fw", cross), ("bw", cross.conj())):
        rv = ratio.sample(G)
        c = np.mean(rv * np.conj(thv))
        dist = float(np.max(np.abs(rv - c * thv)))
        report[f"degeneracy_dist_{name}"] = dist
        if dist <= TOL_DEGEN:
            raise DegeneracyError(
                f"band ratio ({name}) collapses onto theta, distance {dist:.3e}")

    if aplus is not None and aminus is not None:
        _validate_split_tails(aplus, aminus, report)
        res = _split_residual(theta, cross.conj(), aplus, aminus, G)
        report["split_residual"] = res
        if res > TOL_SPLIT:
            raise MissingDecompositionError(
                f"supplied split does not reproduce the band ratio: {res:.3e}")
    elif basis.is_monomial:
        aplus, aminus = _extract_split_monomial(cross.conj(), n)
        report["split_residual"] = _split_residual(
            theta, cross.conj(), aplus, aminus, G)
    # otherwise the split stays absent; spectral formulas will demand it

    return DualBandSpace(theta, basis, phi, psi, aplus, aminus,
                         "realized", report)


def _validate_split_tails(aplus, aminus, report):
    bad_plus = aplus.tail_energy(lambda j: j < 0)
    bad_minus = aminus.tail_energy(lambda j: j > 0)
    report["aplus_coanalytic_energy"] = bad_plus
    report["aminus_analytic_energy"] = bad_minus
    if bad_plus > TOL_SPLIT ** 2:
        raise MissingDecompositionError(
            f"aplus carries negative frequencies: energy {bad_plus:.3e}")
    if bad_minus > TOL_SPLIT ** 2:
        raise MissingDecompositionError(
            f"aminus carries positive frequencies: energy {bad_minus:.3e}")


def _split_residual(theta, ratio_bw, aplus, aminus, G):
    th = theta.sample(G)
    rec = aminus.sample(G) * np.conj(th) + aplus.sample(G) * th
    return float(np.max(np.abs(ratio_bw.sample(G) - rec)))


def _extract_split_monomial(ratio_bw, n):
    """Split conj(psi) phi = aminus z^-n + aplus z^n by frequency shift."""
    # coefficients below 1e-15 are refinement-policy alias noise
    coeffs = ratio_bw.coeff_dict(tol=1e-15)
    plus = {j - n: c for j, c in coeffs.items() if j >= n}
    minus = {j + n: c for j, c in coeffs.items() if j <= -n}
    mid = {j: c for j, c in coeffs.items() if -n < j < n}
    mid_energy = sum(abs(c) ** 2 for c in mid.values())
    if mid_energy > TOL_SPLIT ** 2:
        raise OrthogonalityError(
            f"band ratio has energy {mid_energy:.3e} inside the spectral gap")
    return (LaurentSymbol.from_coeffs(plus or {0: 0.0}),
            LaurentSymbol.from_coeffs(minus or {0: 0.0}))


# --------------------------------------------------------------------------
# compressions
# --------------------------------------------------------------------------

def pm_apply(space, f, G=None):
    """Coordinates of the orthogonal projection of f onto the space."""
    G = G or space.default_grid([f] if isinstance(f, LaurentSymbol) else ())
    fv = f.sample(G) if hasattr(f, "sample") else np.asarray(f, dtype=complex)
    B = space.band_values(G)
    return (B.conj() @ fv) / G


def block_w(space, g, G=None):
    """The two-by-two block matrix over two copies of K_theta."""
    if G is None:
        G = space.default_grid([g] if isinstance(g, LaurentSymbol) else (),
                               extra_span=_span_of(g))
    basis = space.basis
    fw = space.cross_symbol("fw")
    bw = space.cross_symbol("bw")
    A = tto_matrix(basis, g, G=G).entries
    B12 = tto_matrix(basis, fw * g, G=G).entries
    B21 = tto_matrix(basis, bw * g, G=G).entries
    W = np.block([[A, B12], [B21, A]])
    return OperatorMatrix(W, f"ktheta2:{basis.n}", f"ktheta2:{basis.n}")


def _span_of(g):
    if isinstance(g, LaurentSymbol) and g.kind == "laurent":
        return g.span()
    return 0


def dualband_matrix(space, g, G=None):
    """Matrix of the compression of multiplication by g.

    Realized spaces integrate directly against the stacked band basis.
    Free spaces fall back to the block form, whose entries only require
    theta and the split; the two coordinate systems are unitarily
    identified column for column.
    """
    if space.mode != "realized":
        W = block_w(space, g, G=G)
        return OperatorMatrix(W.entries, f"dualband:{space.n}",
                              f"dualband:{space.n}")
    if G is None:
        G = space.default_grid([g] if isinstance(g, LaurentSymbol) else (),
                               extra_span=_span_of(g))
    gv = g.sample(G) if hasattr(g, "sample") else np.asarray(g, dtype=complex)
    B = space.band_values(G)
    M = ((B * gv) @ B.conj().T).T / G
    return OperatorMatrix(M, f"dualband:{space.n}", f"dualband:{space.n}")


def unitary_equiv_check(space, g, G=None):
    """max |direct dual-band matrix - assembled block matrix|."""
    T = dualband_matrix(space, g, G=G)
    W = block_w(space, g, G=G)
    return float(np.max(np.abs(T.entries - W.entries)))


def is_zero_operator(space, g, tol=1e-10):
    """The compression vanishes iff all four blocks vanish."""
    W = block_w(space, g)
    n = space.n
    blocks = {
        "diag": W.entries[:n, :n], "upper": W.entries[:n, n:],
        "lower": W.entries[n:, :n], "diag2": W.entries[n:, n:],
    }
    norms = {k: float(np.max(np.abs(v))) for k, v in blocks.items()}
    return all(v <= tol for v in norms.values()), norms


# --------------------------------------------------------------------------
# the antilinear symmetry
# --------------------------------------------------------------------------

def cm_matrix(space, G=None):
    """J with C(v) = J conj(v): block antidiagonal swap of the two bands
    composed with the model-space conjugation in each."""
    R = ctheta_matrix(space.basis, G=G)
    n = space.n
    J = np.zeros((2 * n, 2 * n), dtype=complex)
    J[:n, n:] = R
    J[n:, :n] = R
    return J


def cm_apply(space, coords, J=None):
    if J is None:
        J = cm_matrix(space)
    return J @ np.conj(np.asarray(coords, dtype=complex))


def cm_symmetry_residual(space, g, G=None):
    """max |T J - J T^t|; zero exactly when T C = C T*."""
    T = dualband_matrix(space, g, G=G).entries
    J = cm_matrix(space, G=G)
    return float(np.max(np.abs(T @ J - J @ T.T)))


__all__ = [
    "DualBandSpace", "build_dualband", "pm_apply", "block_w",
    "dualband_matrix", "unitary_equiv_check", "is_zero_operator",
    "cm_matrix", "cm_apply", "cm_symmetry_residual",
]
