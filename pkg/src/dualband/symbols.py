"""Scalar symbols on the unit circle.

Two families of objects:

* ``LaurentSymbol``, a function on the circle held in one of three forms:
  a finite Laurent expansion (exact), a rational expression
  ``z^shift * num(z) / den(z)`` (exact), or samples on a dyadic grid.
  Products, sums and circle conjugates of the exact kinds stay exact;
  sampled operands force promotion onto their grid.

* ``InnerFunction``, a finite Blaschke product, an atomic singular inner
  function, or a product of those.  Atomic factors are evaluation-only:
  asking for their Fourier coefficients raises, since no dyadic grid can
  resolve the essential singularity at a mass point.

Grid conventions: grids are the ``G``-th roots of unity, ``G`` a power of
two.  ``grid_fft(values)`` returns coefficients in standard FFT layout
(index ``m`` holds frequency ``m`` for ``m < G/2``, else ``m - G``).
Quadrature means the plain grid average, which integrates trigonometric
polynomials below the Nyquist frequency exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import CoefficientError, GridMismatchError, OffGridError, PoleError

TAU_ROOT = 1e-9      # denominator roots must stay this far from the circle
TAU_DISC = 1e-12     # Blaschke zeros must stay inside by this margin
TAU_EVAL = 1e-10     # pointwise evaluation agreement tolerance
TAU_ALIAS = 1e-12    # band-energy threshold for the grid refinement policy
GRID_START = 1024
GRID_CAP = 2 ** 20


def grid_points(G):
    """Return the G-th roots of unity, counterclockwise from 1."""
    return np.exp(2j * np.pi * np.arange(G) / G)


def grid_fft(values):
    """Samples on the dyadic grid -> Fourier coefficients, FFT layout."""
    values = np.asarray(values, dtype=complex)
    return np.fft.fft(values) / values.size


def grid_ifft(coeffs):
    coeffs = np.asarray(coeffs, dtype=complex)
    return np.fft.ifft(coeffs) * coeffs.size


def fft_freqs(G):
    """Frequency carried by each FFT index: 0..G/2-1, then -G/2..-1."""
    m = np.arange(G)
    return np.where(m < G // 2, m, m - G)


def analytic_project_values(values):
    """Pointwise projection onto nonnegative frequencies (Riesz P+)."""
    c = grid_fft(values)
    c[fft_freqs(values.size) < 0] = 0.0
    return grid_ifft(c)


def coanalytic_project_values(values):
    """Projection onto strictly negative frequencies (I - P+)."""
    c = grid_fft(values)
    c[fft_freqs(values.size) >= 0] = 0.0
    return grid_ifft(c)


def _trim(arr):
    """Drop exactly-zero leading/trailing coefficients; keep at least one."""
    arr = np.asarray(arr, dtype=complex)
    nz = np.flatnonzero(arr)
    if nz.size == 0:
        return np.zeros(1, dtype=complex), 0
    return arr[nz[0]:nz[-1] + 1], int(nz[0])


def _check_den(den):
    den, lead = _trim(den)
    if lead:
        raise PoleError("denominator vanishes at z = 0")
    if den.size > 1:
        roots = np.roots(den[::-1])
        if np.any(np.abs(np.abs(roots) - 1.0) <= TAU_ROOT):
            raise PoleError("denominator has a root on the unit circle")
    return den


class LaurentSymbol:
    """A scalar function on the unit circle.

    kind == "laurent":  value = sum coeffs[i] * z**(offset + i)
    kind == "rational": value = z**shift * num(z) / den(z)
    kind == "sampled":  values on the dyadic grid of size grid_size
    """

    __slots__ = ("kind", "coeffs", "offset", "num", "den", "shift", "values")

    def __init__(self, kind, coeffs=None, offset=0, num=None, den=None,
                 shift=0, values=None):
        self.kind = kind
        if kind == "laurent":
            self.coeffs, lead = _trim(coeffs)
            self.offset = int(offset) + lead
        elif kind == "rational":
            num, lead = _trim(num)
            self.num = num
            self.shift = int(shift) + lead
            self.den = _check_den(den)
        elif kind == "sampled":
            values = np.asarray(values, dtype=complex)
            G = values.size
            if G < 8 or G & (G - 1):
                raise ValueError("sampled grids must be powers of two, >= 8")
            self.values = values
        else:
            raise ValueError(f"unknown symbol kind {kind!r}")

    # ---------------------------------------------------------------- build
    @classmethod
    def from_coeffs(cls, coeffs, offset=0):
        if isinstance(coeffs, dict):
            if not coeffs:
                return cls("laurent", coeffs=[0.0], offset=0)
            lo = min(coeffs)
            arr = np.zeros(max(coeffs) - lo + 1, dtype=complex)
            for j, c in coeffs.items():
                arr[j - lo] = c
            return cls("laurent", coeffs=arr, offset=lo)
        return cls("laurent", coeffs=coeffs, offset=offset)

    @classmethod
    def monomial(cls, k, c=1.0):
        return cls("laurent", coeffs=[c], offset=k)

    @classmethod
    def constant(cls, c):
        return cls("laurent", coeffs=[c], offset=0)

    @classmethod
    def rational(cls, num, den, shift=0):
        return cls("rational", num=num, den=den, shift=shift)

    @classmethod
    def sampled(cls, values):
        return cls("sampled", values=values)

    # ----------------------------------------------------------- inspection
    def support(self):
        """(lowest, highest) frequency for the laurent kind."""
        if self.kind != "laurent":
            raise CoefficientError("support is only exact for laurent symbols")
        return self.offset, self.offset + self.coeffs.size - 1

    def span(self):
        """Largest |frequency| that carries mass, when exactly known."""
        if self.kind == "laurent":
            lo, hi = self.support()
            return max(abs(lo), abs(hi))
        return None

    def is_analytic(self, tol=0.0):
        """True when no energy sits below frequency 0 (exact kinds only)."""
        if self.kind == "laurent":
            lo, _ = self.support()
            if lo >= 0:
                return True
            neg = self.coeffs[:max(0, -lo)]
            return float(np.sum(np.abs(neg) ** 2)) <= tol
        c, lo, _ = self.fourier_coeffs()
        idx = np.arange(lo, lo + c.size)
        return float(np.sum(np.abs(c[idx < 0]) ** 2)) <= max(tol, TAU_ALIAS)

    # ----------------------------------------------------------- evaluation
    def eval_at(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "laurent":
            out = np.zeros(z.shape, dtype=complex)
            for i, c in enumerate(self.coeffs):
                if c != 0:
                    out = out + c * z ** (self.offset + i)
            return out if out.shape else complex(out)
        if self.kind == "rational":
            denv = np.polyval(self.den[::-1], z)
            if np.any(np.abs(denv) < 1e-13):
                raise PoleError("evaluation at a pole of the symbol")
            numv = np.polyval(self.num[::-1], z)
            out = z ** self.shift * numv / denv
            return out if out.shape else complex(out)
        # sampled: only the grid itself is addressable
        G = self.values.size
        k = np.angle(z) / (2 * np.pi) * G
        kr = np.rint(k).astype(int) % G
        if np.any(np.abs(z - grid_points(G)[kr]) > 1e-12):
            raise OffGridError("sampled symbol evaluated off its grid")
        out = self.values[kr]
        return out if out.shape else complex(out)

    def sample(self, G):
        """Values on the size-G dyadic grid."""
        if self.kind == "sampled":
            if self.values.size != G:
                raise GridMismatchError(
                    f"sampled on {self.values.size}, asked for {G}")
            return self.values.copy()
        return self.eval_at(grid_points(G))

    # ----------------------------------------------------------- transforms
    def fourier_coeffs(self, G=None):
        """Fourier coefficients over [-G/2, G/2).

        Returns (coeffs, lowest_index, alias_bound).  For the laurent kind
        with G above twice the span the result is exact and alias_bound 0;
        a too-small G aliases, as plain FFT sampling does.  For the other
        kinds G=None invokes the refinement policy (start at GRID_START,
        double until the energy in the top and bottom eighth of the index
        range drops below TAU_ALIAS, cap at GRID_CAP).
        """
        if self.kind == "laurent" and G is None:
            span = self.span()
            G = max(8, _next_pow2(2 * span + 2))
        if G is None:
            G, alias = refine_grid(self)
        else:
            alias = band_energy(self.sample(G))
        c = grid_fft(self.sample(G))
        shifted = np.concatenate([c[G // 2:], c[:G // 2]])
        return shifted, -(G // 2), float(alias)

    def coeff_dict(self, G=None, tol=0.0):
        c, lo, _ = self.fourier_coeffs(G)
        return {lo + i: v for i, v in enumerate(c) if abs(v) > tol}

    # ------------------------------------------------------------ operators
    def _promote_pair(self, other):
        if not isinstance(other, LaurentSymbol):
            other = LaurentSymbol.constant(other)
        a, b = self, other
        if a.kind == "sampled" or b.kind == "sampled":
            if a.kind == "sampled" and b.kind == "sampled":
                if a.values.size != b.values.size:
                    raise GridMismatchError("sampled symbols on different grids")
                return a, b, a.values.size
            G = a.values.size if a.kind == "sampled" else b.values.size
            return a, b, G
        return a, b, None

    def __mul__(self, other):
        a, b, G = self._promote_pair(other)
        if G is not None:
            return LaurentSymbol.sampled(a.sample(G) * b.sample(G))
        if a.kind == "laurent" and b.kind == "laurent":
            return LaurentSymbol.from_coeffs(
                np.convolve(a.coeffs, b.coeffs), a.offset + b.offset)
        ar, br = a._as_rational(), b._as_rational()
        return LaurentSymbol.rational(
            np.convolve(ar.num, br.num), np.convolve(ar.den, br.den),
            ar.shift + br.shift)

    __rmul__ = __mul__

    def __add__(self, other):
        a, b, G = self._promote_pair(other)
        if G is not None:
            return LaurentSymbol.sampled(a.sample(G) + b.sample(G))
        if a.kind == "laurent" and b.kind == "laurent":
            lo = min(a.offset, b.offset)
            hi = max(a.offset + a.coeffs.size, b.offset + b.coeffs.size)
            out = np.zeros(hi - lo, dtype=complex)
            out[a.offset - lo:a.offset - lo + a.coeffs.size] += a.coeffs
            out[b.offset - lo:b.offset - lo + b.coeffs.size] += b.coeffs
            return LaurentSymbol.from_coeffs(out, lo)
        ar, br = a._as_rational(), b._as_rational()
        m = min(ar.shift, br.shift)
        left = np.convolve(ar.num, br.den)
        right = np.convolve(br.num, ar.den)
        width = max(ar.shift - m + left.size, br.shift - m + right.size)
        num = np.zeros(width, dtype=complex)
        num[ar.shift - m:ar.shift - m + left.size] += left
        num[br.shift - m:br.shift - m + right.size] += right
        return LaurentSymbol.rational(num, np.convolve(ar.den, br.den), m)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, LaurentSymbol):
            other = LaurentSymbol.constant(other)
        return self + (other * (-1.0))

    def __rsub__(self, other):
        return (self * (-1.0)) + other

    def conj(self):
        """The circle conjugate: z -> conj(value(z)) for |z| = 1."""
        if self.kind == "laurent":
            return LaurentSymbol.from_coeffs(
                np.conj(self.coeffs[::-1]),
                -(self.offset + self.coeffs.size - 1))
        if self.kind == "rational":
            num = np.conj(self.num[::-1])
            den = np.conj(self.den[::-1])
            shift = -(self.shift + self.num.size - 1) + (self.den.size - 1)
            return LaurentSymbol.rational(num, den, shift)
        return LaurentSymbol.sampled(np.conj(self.values))

    def _as_rational(self):
        if self.kind == "rational":
            return self
        if self.kind == "laurent":
            return LaurentSymbol.rational(self.coeffs, [1.0], self.offset)
        raise CoefficientError("sampled symbols have no rational form")

    # ----------------------------------------------------------- analysis
    def analytic_split(self, G=None):
        """Split into (analytic part, strictly co-analytic part)."""
        c, lo, _ = self.fourier_coeffs(G)
        idx = np.arange(lo, lo + c.size)
        plus = {int(j): v for j, v in zip(idx, c) if j >= 0 and v != 0}
        minus = {int(j): v for j, v in zip(idx, c) if j < 0 and v != 0}
        return (LaurentSymbol.from_coeffs(plus or {0: 0.0}),
                LaurentSymbol.from_coeffs(minus or {-1: 0.0}))

    def tail_energy(self, band, G=None):
        """Energy sum(|c_j|^2) over frequencies j with band(j) True."""
        c, lo, _ = self.fourier_coeffs(G)
        idx = np.arange(lo, lo + c.size)
        mask = np.array([bool(band(int(j))) for j in idx])
        return float(np.sum(np.abs(c[mask]) ** 2))

    def is_unimodular(self, tol=TAU_EVAL, G=None):
        if G is None:
            G = GRID_START if self.kind != "sampled" else self.values.size
        v = self.sample(G)
        return bool(np.max(np.abs(np.abs(v) - 1.0)) <= tol)

    def __repr__(self):
        if self.kind == "laurent":
            return f"LaurentSymbol(laurent, support={self.support()})"
        if self.kind == "rational":
            return (f"LaurentSymbol(rational, deg_num={self.num.size - 1}, "
                    f"deg_den={self.den.size - 1}, shift={self.shift})")
        return f"LaurentSymbol(sampled, G={self.values.size})"


def _next_pow2(n):
    G = 8
    while G < n:
        G *= 2
    return G


def band_energy(values):
    """Energy in the top/bottom eighth of the frequency window."""
    G = values.size
    c = grid_fft(values)
    f = fft_freqs(G)
    mask = (f >= 3 * G // 8) | (f < -3 * G // 8)
    return float(np.sum(np.abs(c[mask]) ** 2))


def refine_grid(obj, start=GRID_START, tau=TAU_ALIAS, cap=GRID_CAP):
    """Double the grid until the outer-eighth coefficient energy is small.

    Returns (G, achieved_band_energy).  Raises CoefficientError when the
    cap is reached without convergence (for instance near an essential
    singularity on the circle).
    """
    G = start
    while True:
        e = band_energy(obj.sample(G))
        if e <= tau:
            return G, e
        if G >= cap:
            raise CoefficientError(
                f"grid refinement stalled at G={G}, band energy {e:.3e}")
        G *= 2


def choose_grid(objs, extra_span=0, start=GRID_START):
    """Common quadrature grid for products of the given symbols.

    Exact Laurent operands contribute their summed spans (products convolve
    supports); other kinds are refined individually and the result receives
    one extra doubling as a product-aliasing guard.
    """
    span_total = extra_span
    inexact = []
    for o in objs:
        if o is None:
            continue
        if isinstance(o, LaurentSymbol) and o.kind == "laurent":
            span_total += o.span()
        else:
            inexact.append(o)
    G = max(64, _next_pow2(2 * span_total + 8))
    for o in inexact:
        Go, _ = refine_grid(o, start=start)
        G = max(G, 2 * Go)
    return min(G, GRID_CAP)


# --------------------------------------------------------------------------
# inner functions
# --------------------------------------------------------------------------

class InnerFunction:
    """An inner function: finite Blaschke product, atomic singular, or
    a finite product of those.

    finite_blaschke: const * prod (z - a_k) / (1 - conj(a_k) z), |a_k| < 1
    atomic_singular: exp( sum mu_j (z + xi_j)/(z - xi_j) ), |xi_j| = 1, mu_j > 0
    """

    __slots__ = ("kind", "zeros", "const", "points", "factors")

    def __init__(self, kind, zeros=None, const=1.0, points=None, factors=None):
        self.kind = kind
        if kind == "finite_blaschke":
            zeros = np.asarray(zeros, dtype=complex)
            if zeros.size == 0:
                raise ValueError("a Blaschke factor needs at least one zero")
            if np.any(np.abs(zeros) > 1.0 - TAU_DISC):
                raise ValueError("Blaschke zeros must lie inside the disc")
            if abs(abs(const) - 1.0) > TAU_EVAL:
                raise ValueError("Blaschke front constant must be unimodular")
            self.zeros = zeros
            self.const = complex(const)
        elif kind == "atomic_singular":
            pts = [(complex(xi), float(mu)) for xi, mu in points]
            for xi, mu in pts:
                if abs(abs(xi) - 1.0) > TAU_EVAL:
                    raise ValueError("atomic mass points must sit on the circle")
                if mu <= 0:
                    raise ValueError("atomic masses must be positive")
            self.points = pts
        elif kind == "product":
            self.factors = list(factors)
            if not self.factors:
                raise ValueError("empty inner product")
        else:
            raise ValueError(f"unknown inner kind {kind!r}")

    # ---------------------------------------------------------------- build
    @classmethod
    def blaschke(cls, zeros, const=1.0):
        return cls("finite_blaschke", zeros=zeros, const=const)

    @classmethod
    def monomial(cls, n):
        """z^n as a Blaschke product with an n-fold zero at the origin."""
        if n < 1:
            raise ValueError("inner monomial needs n >= 1")
        return cls.blaschke([0.0] * n)

    @classmethod
    def atomic(cls, points):
        return cls("atomic_singular", points=points)

    @classmethod
    def product(cls, factors):
        return cls("product", factors=factors)

    # ----------------------------------------------------------- evaluation
    def eval_at(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "finite_blaschke":
            out = np.full(z.shape, self.const, dtype=complex)
            for a in self.zeros:
                out = out * (z - a) / (1.0 - np.conj(a) * z)
            return out if out.shape else complex(out)
        if self.kind == "atomic_singular":
            s = np.zeros(z.shape, dtype=complex)
            for xi, mu in self.points:
                d = z - xi
                if np.any(np.abs(d) < 1e-13):
                    raise PoleError("atomic inner function at its mass point")
                s = s + mu * (z + xi) / d
            out = np.exp(s)
            return out if out.shape else complex(out)
        out = np.ones(z.shape, dtype=complex)
        for f in self.factors:
            out = out * f.eval_at(z)
        return out if out.shape else complex(out)

    def derivative_at(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "finite_blaschke":
            # product rule over factors; stable at the zeros themselves
            facs = np.array([(z - a) / (1.0 - np.conj(a) * z)
                             for a in self.zeros])
            ders = np.array([(1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * z) ** 2
                             for a in self.zeros])
            out = np.zeros(z.shape, dtype=complex)
            for j in range(len(self.zeros)):
                rest = np.prod(np.delete(facs, j, axis=0), axis=0)
                out = out + ders[j] * rest
            out = self.const * out
            return out if out.shape else complex(out)
        if self.kind == "atomic_singular":
            val = self.eval_at(z)
            s = np.zeros(z.shape, dtype=complex)
            for xi, mu in self.points:
                s = s + mu * (-2.0 * xi) / (z - xi) ** 2
            out = val * s
            return out if out.shape else complex(out)
        vals = [f.eval_at(z) for f in self.factors]
        ders = [f.derivative_at(z) for f in self.factors]
        out = np.zeros(z.shape, dtype=complex)
        for j in range(len(self.factors)):
            term = ders[j]
            for k, v in enumerate(vals):
                if k != j:
                    term = term * v
            out = out + term
        return out if out.shape else complex(out)

    def sample(self, G):
        return self.eval_at(grid_points(G))

    def value_at_zero(self):
        if self.kind == "finite_blaschke":
            return complex(self.const * np.prod(-self.zeros))
        if self.kind == "atomic_singular":
            return complex(np.exp(-sum(mu for _, mu in self.points)))
        v = 1.0
        for f in self.factors:
            v *= f.value_at_zero()
        return complex(v)

    # ----------------------------------------------------------- structure
    def degree(self):
        if self.kind == "finite_blaschke":
            return len(self.zeros)
        if self.kind == "product":
            if all(f.kind == "finite_blaschke" for f in self.factors):
                return sum(f.degree() for f in self.factors)
        raise ValueError("degree is defined for finite Blaschke products only")

    def zeros_list(self):
        if self.kind == "finite_blaschke":
            return list(self.zeros)
        if self.kind == "product":
            out = []
            for f in self.factors:
                out.extend(f.zeros_list())
            return out
        return []

    def boundary_spectrum(self):
        """Circle points where the function cannot be continued analytically."""
        if self.kind == "finite_blaschke":
            return []
        if self.kind == "atomic_singular":
            return [xi for xi, _ in self.points]
        out = []
        for f in self.factors:
            out.extend(f.boundary_spectrum())
        return out

    def has_adc_at(self, lam):
        """Angular derivative / analytic continuation present at |lam| = 1."""
        lam = complex(lam)
        for xi in self.boundary_spectrum():
            if abs(lam - xi) <= 1e-12:
                return False
        return True

    def as_symbol(self):
        """Exact rational LaurentSymbol (finite Blaschke content only)."""
        if self.kind == "finite_blaschke":
            num = np.array([self.const], dtype=complex)
            den = np.array([1.0], dtype=complex)
            for a in self.zeros:
                num = np.convolve(num, [-a, 1.0])
                den = np.convolve(den, [1.0, -np.conj(a)])
            return LaurentSymbol.rational(num, den)
        if self.kind == "product":
            parts = [f.as_symbol() for f in self.factors]
            out = parts[0]
            for p in parts[1:]:
                out = out * p
            return out
        raise CoefficientError(
            "atomic singular inner functions have no coefficient form")

    def __repr__(self):
        if self.kind == "finite_blaschke":
            return f"InnerFunction(blaschke, degree={len(self.zeros)})"
        if self.kind == "atomic_singular":
            return f"InnerFunction(atomic, masses={len(self.points)})"
        return f"InnerFunction(product, factors={len(self.factors)})"


def difference_quotient(theta, lam, z):
    """(theta(z) - theta(lam)) / (z - lam) with the removable point filled.

    Grid nodes within 1e-13 of lam take the exact limit theta'(lam); the
    quotient itself is well conditioned everywhere else we evaluate it.
    """
    z = np.asarray(z, dtype=complex)
    lam = complex(lam)
    thl = theta.eval_at(lam)
    d = z - lam
    hit = np.abs(d) < 1e-13
    safe = np.where(hit, 1.0, d)
    out = (theta.eval_at(z) - thl) / safe
    if np.any(hit):
        out = np.where(hit, theta.derivative_at(lam), out)
    return out
