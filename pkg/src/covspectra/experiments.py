"""Seeded Monte Carlo experiments.

Every estimate is a pure function of (config, master_seed): each (p, trial)
pair owns a private counter-based stream, and results are reduced in trial
order, so worker count never changes an output. Overshoot/undershoot
frequencies for one p are read off the same draws (one trial yields both
extreme eigenvalues).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from covspectra import bounds, rng, spectra, wishart
from covspectra.spectra import IdentityFamily, SpectrumFamily

_Z95 = 1.959963984540054  # 97.5% normal quantile


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared knobs for one batch of Monte Carlo estimates."""

    family: SpectrumFamily
    p_list: tuple
    q: float
    trials: int
    master_seed: int
    dof_convention: str = "n"
    horizon: int | None = None
    kappa: float = 0.5
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "p_list", tuple(int(p) for p in self.p_list))
        if not 0.0 < self.q < 1.0:
            raise ValueError("aspect ratio q must lie in (0,1)")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.dof_convention not in bounds.DOF_CONVENTIONS:
            raise ValueError(f"dof convention must be one of {bounds.DOF_CONVENTIONS}")
        if not 0.0 < self.kappa < bounds.KAPPA_LIMIT:
            raise ValueError("kappa must lie in (0, sqrt(2/pi))")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        for p in self.p_list:
            n = round(p / self.q)
            if n <= p:
                raise ValueError(f"q={self.q} gives n={n} <= p={p}")


@dataclass(frozen=True)
class SweepRow:
    p: int
    n: int
    phi: int
    xi: int
    overshoot_freq: float
    ci_low: float
    ci_high: float
    undershoot_freq: float
    uci_low: float
    uci_high: float
    thm2_bound: float
    thm3_bound: float
    mean_l1: float
    mean_lp: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple


@dataclass(frozen=True)
class CdfBoundTable:
    """Empirical extreme-eigenvalue CDFs against the finite-sample bounds."""

    x_grid: np.ndarray
    emp_cdf_l1: np.ndarray
    muirhead_upper: np.ndarray
    emp_cdf_lp: np.ndarray
    muirhead_lower: np.ndarray
    stderr: np.ndarray
    row_pass: np.ndarray
    passed: bool


@dataclass(frozen=True)
class MPCompareResult:
    ks_statistic: float
    hist_edges: np.ndarray
    hist_mass: np.ndarray
    pooled_count: int


def wilson_interval(successes: int, trials: int, z: float = _Z95):
    """Wilson score interval; behaves sanely at frequencies near 0 and 1."""
    if trials < 1:
        raise ValueError("need at least one trial")
    ph = successes / trials
    z2n = z * z / trials
    denom = 1.0 + z2n
    center = (ph + 0.5 * z2n) / denom
    half = z * math.sqrt(ph * (1.0 - ph) / trials + 0.25 * z2n / trials) / denom
    # the endpoints are exact at ph = 0 and 1; rounding must not exclude them
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def _run_trials(family, p, q, trials, master_seed, domain, workers):
    def one(t):
        return wishart.extreme_eigs_trial(
            family, p, q, rng.substream(master_seed, domain, p, t))

    if workers <= 1:
        return [one(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(trials)))


def estimate_overshoot(config: ExperimentConfig, p: int):
    """Frequency of l_1 > lambda_1 with its Wilson 95% interval."""
    records = _run_trials(config.family, p, config.q, config.trials,
                          config.master_seed, rng.DOMAIN_SWEEP, config.workers)
    k = sum(r.overshoot for r in records)
    return k / config.trials, wilson_interval(k, config.trials)


def estimate_undershoot(config: ExperimentConfig, p: int):
    """Frequency of l_p < lambda_p with its Wilson 95% interval."""
    records = _run_trials(config.family, p, config.q, config.trials,
                          config.master_seed, rng.DOMAIN_SWEEP, config.workers)
    k = sum(r.undershoot for r in records)
    return k / config.trials, wilson_interval(k, config.trials)


def sweep(config: ExperimentConfig) -> SweepResult:
    """One row per p: Monte Carlo frequencies joined with the clustering
    cardinals and the asymptotic reference bounds."""
    if not config.p_list:
        raise ValueError("p_list must be nonempty")
    if any(b <= a for a, b in zip(config.p_list, config.p_list[1:])):
        raise ValueError("p_list must be strictly ascending")
    rows = []
    for p in config.p_list:
        records = _run_trials(config.family, p, config.q, config.trials,
                              config.master_seed, rng.DOMAIN_SWEEP, config.workers)
        n = records[0].n
        k_over = sum(r.overshoot for r in records)
        k_under = sum(r.undershoot for r in records)
        ci = wilson_interval(k_over, config.trials)
        uci = wilson_interval(k_under, config.trials)
        phi_p = spectra.phi(config.family, p, config.horizon)
        xi_p = spectra.xi(config.family, p, config.kappa, config.horizon)
        rows.append(SweepRow(
            p=p, n=n, phi=phi_p, xi=xi_p,
            overshoot_freq=k_over / config.trials, ci_low=ci[0], ci_high=ci[1],
            undershoot_freq=k_under / config.trials, uci_low=uci[0], uci_high=uci[1],
            thm2_bound=bounds.theorem2_bound(phi_p),
            thm3_bound=bounds.theorem3_bound(xi_p, config.kappa),
            mean_l1=float(np.mean([r.largest_sample for r in records])),
            mean_lp=float(np.mean([r.smallest_sample for r in records]))))
    return SweepResult(rows=tuple(rows))


def cdf_vs_bound(config: ExperimentConfig, p: int, x_grid) -> CdfBoundTable:
    """Empirical CDFs of both extremes against the Muirhead bounds.

    A row passes when emp_l1 <= upper + 3*stderr and emp_lp >= lower -
    3*stderr; the 3-sigma slack turns the almost-sure inequalities into a
    statistically safe assertion. stderr is the larger of the two binomial
    standard errors, floored at 1/(2*trials).
    """
    x_grid = np.asarray(x_grid, dtype=float)
    if x_grid.size == 0 or np.any(np.diff(x_grid) <= 0.0) or x_grid[0] < 0.0:
        raise ValueError("x_grid must be ascending and nonnegative")
    records = _run_trials(config.family, p, config.q, config.trials,
                          config.master_seed, rng.DOMAIN_BOUNDS, config.workers)
    n = records[0].n
    l1 = np.array([r.largest_sample for r in records])
    lp = np.array([r.smallest_sample for r in records])
    emp_l1 = (l1[:, None] <= x_grid[None, :]).mean(axis=0)
    emp_lp = (lp[:, None] <= x_grid[None, :]).mean(axis=0)
    spec = config.family.spectrum(p)
    upper = bounds.muirhead_curve(spec, n, x_grid, "largest", config.dof_convention).values
    lower = bounds.muirhead_curve(spec, n, x_grid, "smallest", config.dof_convention).values

    def _se(f):
        return np.maximum(np.sqrt(f * (1.0 - f) / config.trials),
                          0.5 / config.trials)

    stderr = np.maximum(_se(emp_l1), _se(emp_lp))
    row_pass = (emp_l1 <= upper + 3.0 * stderr) & (emp_lp >= lower - 3.0 * stderr)
    return CdfBoundTable(
        x_grid=x_grid, emp_cdf_l1=emp_l1, muirhead_upper=upper,
        emp_cdf_lp=emp_lp, muirhead_lower=lower, stderr=stderr,
        row_pass=row_pass, passed=bool(row_pass.all()))


def mp_compare(p: int, q: float, trials: int, master_seed: int,
               workers: int = 1) -> MPCompareResult:
    """Pooled sample eigenvalues (Sigma = I forced) against the MP law.

    Returns the KS distance to the numerically integrated MP CDF plus a
    50-bin histogram over [0, 1.2*lambda_plus]; eigenvalues above the range
    (finite-p edge fluctuations) are counted in the last bin so the masses
    always sum to one.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    family = IdentityFamily(1.0)
    n = round(p / q)
    if n <= p:
        raise ValueError(f"q={q} gives n={n} <= p={p}")
    spec = family.spectrum(p)

    def one(t):
        stream = rng.substream(master_seed, rng.DOMAIN_MP, p, t)
        X = wishart.sample_gaussian_matrix(p, n, spec, stream)
        return wishart.symmetric_eigenvalues(wishart.sample_covariance(X))

    if workers <= 1:
        results = [one(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(trials)))
    pooled = np.sort(np.concatenate(results))
    total = pooled.size
    cdf = bounds.mp_cdf_grid(q, pooled)
    i = np.arange(1, total + 1)
    ks = float(max((cdf - (i - 1) / total).max(), (i / total - cdf).max()))
    hi = 1.2 * bounds.MPLaw.for_ratio(q).lambda_plus
    counts, edges = np.histogram(np.clip(pooled, 0.0, hi), bins=50, range=(0.0, hi))
    return MPCompareResult(ks_statistic=ks, hist_edges=edges,
                           hist_mass=counts / total, pooled_count=total)
