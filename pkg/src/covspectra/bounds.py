"""Distribution bounds for extreme sample eigenvalues.

Three layers:
  * finite-sample product bounds (valid for every p, n):
        P(l_1 <= x) <= prod_i P(chi2_dof <= n x / lambda_i)
        P(l_p <= x) >= 1 - prod_i P(chi2_dof >= n x / lambda_i)
  * asymptotic exponential bounds with explicit constants, driven by the
    clustering cardinals phi and xi; these are limsup/liminf statements and
    are exposed as reference curves only,
  * the Marchenko-Pastur law (density, support edges, numerically
    integrated CDF) as the identity-covariance reference.

Products run in log space: at large p the individual chi-square factors
underflow long before the product is meaningless.
"""

import math
from dataclasses import dataclass

import numpy as np

from covspectra import specfun
from covspectra.spectra import Spectrum

DOF_CONVENTIONS = ("n", "n-1")

# exp(-THEOREM2_C * phi) bounds the overshoot-failure probability;
# THEOREM2_C = sqrt(2/pi) * e^{-1} / (1 + sqrt(5))
THEOREM2_C = math.sqrt(2.0 / math.pi) * math.exp(-1.0) / (1.0 + math.sqrt(5.0))

KAPPA_LIMIT = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class BoundCurve:
    """Per-x values of one product bound with the per-eigenvalue factors."""

    x_grid: np.ndarray
    values: np.ndarray
    factors: np.ndarray  # shape (len(x_grid), p)
    dof_convention: str


@dataclass(frozen=True)
class MPLaw:
    """Marchenko-Pastur support for aspect ratio q."""

    q: float
    lambda_minus: float
    lambda_plus: float

    @classmethod
    def for_ratio(cls, q: float) -> "MPLaw":
        if not 0.0 < q < 1.0:
            raise ValueError("aspect ratio q must lie in (0,1)")
        r = math.sqrt(q)
        return cls(q=q, lambda_minus=(1.0 - r) ** 2, lambda_plus=(1.0 + r) ** 2)


def _resolve_dof(n: int, dof_convention: str) -> int:
    if dof_convention not in DOF_CONVENTIONS:
        raise ValueError(f"dof convention must be one of {DOF_CONVENTIONS}")
    dof = n if dof_convention == "n" else n - 1
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")
    return dof


def _check_bound_args(spectrum: Spectrum, n: int, x: float) -> None:
    if x < 0.0:
        raise ValueError("x must be nonnegative")
    if n <= spectrum.p:
        raise ValueError("need n > p")


def muirhead_upper_largest(spectrum: Spectrum, n: int, x: float,
                           dof_convention: str = "n") -> float:
    """Upper bound on P(l_1 <= x): product of chi-square CDF factors.

    The scaling inside each factor is n*x/lambda_i under both dof
    conventions; only the chi-square dof switches.
    """
    _check_bound_args(spectrum, n, x)
    dof = _resolve_dof(n, dof_convention)
    log_total = 0.0
    for lam in spectrum.values:
        log_total += specfun.chi2_logcdf(dof, n * x / lam)
        if log_total == -math.inf:
            return 0.0
    return math.exp(log_total)


def muirhead_lower_smallest(spectrum: Spectrum, n: int, x: float,
                            dof_convention: str = "n") -> float:
    """Lower bound on P(l_p <= x): one minus the product of survivals."""
    _check_bound_args(spectrum, n, x)
    dof = _resolve_dof(n, dof_convention)
    log_total = 0.0
    for lam in spectrum.values:
        log_total += specfun.chi2_logsf(dof, n * x / lam)
    return -math.expm1(log_total)


def muirhead_curve(spectrum: Spectrum, n: int, x_grid, which: str,
                   dof_convention: str = "n") -> BoundCurve:
    """Evaluate one Muirhead bound on a grid, keeping per-factor breakdowns."""
    if which not in ("largest", "smallest"):
        raise ValueError("which must be 'largest' or 'smallest'")
    x_grid = np.asarray(x_grid, dtype=float)
    dof = _resolve_dof(n, dof_convention)
    log_factor = specfun.chi2_logcdf if which == "largest" else specfun.chi2_logsf
    factors = np.empty((x_grid.size, spectrum.p))
    values = np.empty(x_grid.size)
    for ix, x in enumerate(x_grid):
        _check_bound_args(spectrum, n, float(x))
        logs = np.array([log_factor(dof, n * float(x) / lam) for lam in spectrum.values])
        factors[ix] = np.exp(logs)
        total = math.exp(logs.sum())
        values[ix] = total if which == "largest" else -math.expm1(logs.sum())
    return BoundCurve(x_grid=x_grid, values=values, factors=factors,
                      dof_convention=dof_convention)


def theorem2_bound(phi_value: int) -> float:
    """Asymptotic overshoot-failure bound exp(-c * phi)."""
    if phi_value < 0:
        raise ValueError("phi must be nonnegative")
    return math.exp(-THEOREM2_C * phi_value)


def theorem3_kappa_constant(kappa: float) -> float:
    """c_kappa = log(2 - kappa * sqrt(pi/2)), positive on (0, sqrt(2/pi))."""
    if not 0.0 < kappa < KAPPA_LIMIT:
        raise ValueError(f"kappa must lie in (0, sqrt(2/pi)={KAPPA_LIMIT:.10f})")
    return math.log(2.0 - kappa * math.sqrt(0.5 * math.pi))


def theorem3_bound(xi_value: int, kappa: float) -> float:
    """Asymptotic undershoot lower bound 1 - exp(-c_kappa * xi)."""
    if xi_value < 0:
        raise ValueError("xi must be nonnegative")
    c = theorem3_kappa_constant(kappa)
    return -math.expm1(-c * xi_value)


def mp_density(q: float, x: float) -> float:
    """Marchenko-Pastur density: sqrt((l+ - x)(x - l-)) / (2 pi q x) on the
    support, zero outside."""
    law = MPLaw.for_ratio(q)
    if x <= law.lambda_minus or x >= law.lambda_plus:
        return 0.0
    return math.sqrt((law.lambda_plus - x) * (x - law.lambda_minus)) / (
        2.0 * math.pi * q * x)


def _adaptive_simpson(f, a, b, tol, fa, fm, fb, whole, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0:
        return left + right
    if abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return (_adaptive_simpson(f, a, m, 0.5 * tol, fa, flm, fm, left, depth - 1)
            + _adaptive_simpson(f, m, b, 0.5 * tol, fm, frm, fb, right, depth - 1))


def _integrate(f, a, b, tol):
    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _adaptive_simpson(f, a, b, tol, fa, fm, fb, whole, 48)


def _mp_segment(law: MPLaw, a: float, b: float, tol: float) -> float:
    """Integral of the density over [a, b] within the support.

    Substituting x = l- + t^2 (below the midpoint) and x = l+ - t^2 (above)
    removes the square-root edge singularity of the density's derivative.
    """
    q = law.q
    lo, hi = law.lambda_minus, law.lambda_plus
    mid = 0.5 * (lo + hi)
    span = hi - lo

    def lower_sub(t):  # x = lo + t^2
        x = lo + t * t
        return math.sqrt(span - t * t) * t * t / (math.pi * q * x)

    def upper_sub(t):  # x = hi - t^2
        x = hi - t * t
        return math.sqrt(span - t * t) * t * t / (math.pi * q * x)

    total = 0.0
    if a < mid:
        ta, tb = math.sqrt(a - lo), math.sqrt(min(b, mid) - lo)
        total += _integrate(lower_sub, ta, tb, 0.5 * tol)
    if b > mid:
        ta, tb = math.sqrt(hi - b), math.sqrt(hi - max(a, mid))
        total += _integrate(upper_sub, ta, tb, 0.5 * tol)
    return total


def mp_cdf(q: float, x: float, tol: float = 1e-8) -> float:
    """CDF of the Marchenko-Pastur law by adaptive Simpson quadrature."""
    law = MPLaw.for_ratio(q)
    if x <= law.lambda_minus:
        return 0.0
    return _mp_segment(law, law.lambda_minus, min(x, law.lambda_plus), tol)


def mp_cdf_grid(q: float, xs, tol_per_segment: float = 1e-10) -> np.ndarray:
    """CDF at many sorted points in one incremental quadrature pass."""
    xs = np.asarray(xs, dtype=float)
    if np.any(np.diff(xs) < 0.0):
        raise ValueError("grid must be sorted ascending")
    law = MPLaw.for_ratio(q)
    out = np.empty(xs.size)
    acc = 0.0
    prev = law.lambda_minus
    for i, x in enumerate(xs):
        x = float(x)
        if x <= law.lambda_minus:
            out[i] = 0.0
            continue
        hi = min(x, law.lambda_plus)
        if hi > prev:
            acc += _mp_segment(law, prev, hi, tol_per_segment)
            prev = hi
        out[i] = acc
    return out
