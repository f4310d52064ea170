"""Spectrum families and the eigenvalue clustering machinery.

A family produces, for every dimension p, a descending positive spectrum
lambda_{1,p} >= ... >= lambda_{p,p}. On top of that sit the clustering sets:
indices whose eigenvalue stays within a shrinking relative tolerance of the
top (J_p, tolerance 1/sqrt(m)) or bottom (H_{p,kappa}, tolerance
kappa/sqrt(m)) eigenvalue for every dimension m in [p, horizon].

The "for all m >= p" quantifier is uncheckable numerically, so every report
carries quantifier_truncated=True and the horizon it was checked under.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

_MIN_EIGENVALUE = 1e-12  # keeps all ratios finite
_GENERATOR_GRID = 1000  # sample count for the monotonicity check
_CHUNK = 2048


@dataclass(frozen=True)
class Spectrum:
    """Descending positive eigenvalues for one dimension p."""

    values: np.ndarray
    p: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if self.p < 1 or vals.shape != (self.p,):
            raise ValueError("spectrum must hold exactly p values")
        if not np.all(vals > _MIN_EIGENVALUE):
            raise ValueError(f"eigenvalues must exceed {_MIN_EIGENVALUE}")
        if np.any(np.diff(vals) > 0.0):
            raise ValueError("eigenvalues must be sorted nonincreasing")


@dataclass(frozen=True)
class ClusterReport:
    """Membership set and cardinal of one clustering condition."""

    p: int
    horizon: int
    members: tuple
    cardinal: int
    quantifier_truncated: bool = True


@dataclass(frozen=True)
class GeneratorConditionReport:
    """Finite-difference evidence for sqrt(x) g'(x) -> 0; heuristic only."""

    grid: tuple
    slopes: tuple
    passes: bool
    heuristic: bool = True


def default_horizon(p: int) -> int:
    """Horizon for the truncated quantifier; 1/sqrt(m) tolerances tighten
    with m, so violations concentrate at small m and a large horizon gives
    high-confidence membership."""
    return max(100 * p, 10_000)


def _eval_grid(g, xs):
    """Evaluate a generator on an array, tolerating scalar-only callables."""
    xs = np.asarray(xs, dtype=float)
    try:
        vals = np.asarray(g(xs), dtype=float)
        if vals.shape == xs.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(g(x)) for x in xs.ravel()]).reshape(xs.shape)


class SpectrumFamily:
    """Rule producing a Spectrum for every dimension p."""

    kind = "abstract"

    def spectrum(self, p: int) -> Spectrum:
        raise NotImplementedError

    def leading_block(self, ms: np.ndarray, k: int) -> np.ndarray:
        """lambda_{i,m} for i = 1..k as a (k, len(ms)) array; requires min(ms) >= k."""
        cols = [self.spectrum(int(m)).values[:k] for m in ms]
        return np.stack(cols, axis=1)

    def trailing_block(self, ms: np.ndarray, k: int) -> np.ndarray:
        """j-th smallest eigenvalue at each m, j = 1..k, as a (k, len(ms))
        array; requires min(ms) >= k."""
        cols = [self.spectrum(int(m)).values[-k:][::-1] for m in ms]
        return np.stack(cols, axis=1)

    def top_block(self, ms: np.ndarray) -> np.ndarray:
        """lambda_{1,m} for each m."""
        return self.leading_block(ms, 1)[0]

    def bottom_block(self, ms: np.ndarray) -> np.ndarray:
        """lambda_{m,m} for each m."""
        return np.array([self.spectrum(int(m)).values[-1] for m in ms])


class IdentityFamily(SpectrumFamily):
    """lambda * I for every p."""

    kind = "identity"

    def __init__(self, lam: float = 1.0):
        if lam <= _MIN_EIGENVALUE:
            raise ValueError("identity eigenvalue must be positive")
        self.lam = float(lam)

    def spectrum(self, p: int) -> Spectrum:
        return Spectrum(np.full(p, self.lam), p)

    def leading_block(self, ms, k):
        return np.full((k, len(ms)), self.lam)

    def trailing_block(self, ms, k):
        return np.full((k, len(ms)), self.lam)

    def top_block(self, ms):
        return np.full(len(ms), self.lam)

    def bottom_block(self, ms):
        return np.full(len(ms), self.lam)


class GeneratorFamily(SpectrumFamily):
    """lambda_{i,p} = g(i/p) for a strictly decreasing positive g on [0,1]."""

    kind = "generator"

    def __init__(self, g: Callable, description: str = ""):
        self.g = g
        self.description = description
        grid = np.linspace(0.0, 1.0, _GENERATOR_GRID)
        vals = _eval_grid(g, grid)
        if not np.all(np.isfinite(vals)) or not np.all(vals > _MIN_EIGENVALUE):
            raise ValueError("generator must be positive and finite on [0,1]")
        if not np.all(np.diff(vals) < 0.0):
            raise ValueError("generator must be strictly decreasing on [0,1]")

    def spectrum(self, p: int) -> Spectrum:
        vals = _eval_grid(self.g, np.arange(1, p + 1) / p)
        return Spectrum(vals, p)

    def leading_block(self, ms, k):
        xs = np.arange(1, k + 1, dtype=float)[:, None] / np.asarray(ms, dtype=float)[None, :]
        return _eval_grid(self.g, xs)

    def trailing_block(self, ms, k):
        ms = np.asarray(ms, dtype=float)
        js = np.arange(1, k + 1, dtype=float)[:, None]
        return _eval_grid(self.g, (ms[None, :] - js + 1.0) / ms[None, :])

    def top_block(self, ms):
        return _eval_grid(self.g, 1.0 / np.asarray(ms, dtype=float))

    def bottom_block(self, ms):
        g1 = float(_eval_grid(self.g, np.array([1.0]))[0])
        return np.full(len(ms), g1)


class DiracMixtureFamily(SpectrumFamily):
    """First ceil(delta*p) eigenvalues pinned at lam_top, the rest from a
    strictly decreasing base generator; realizes a Dirac mass of weight delta
    at the top of the limiting density."""

    kind = "dirac_mixture"

    def __init__(self, delta: float, lam_top: float, base: Callable):
        if not 0.0 < delta < 1.0:
            raise ValueError("dirac fraction must lie in (0,1)")
        self.delta = float(delta)
        self.lam_top = float(lam_top)
        self.base_family = base if isinstance(base, GeneratorFamily) else GeneratorFamily(base)
        base0 = float(_eval_grid(self.base_family.g, np.array([0.0]))[0])
        if self.lam_top < base0:
            raise ValueError("lam_top must dominate the base generator at 0")

    def _k(self, p) -> int:
        return int(math.ceil(self.delta * p))

    def spectrum(self, p: int) -> Spectrum:
        k = self._k(p)
        vals = _eval_grid(self.base_family.g, np.arange(1, p + 1) / p)
        vals[:k] = self.lam_top
        return Spectrum(vals, p)

    def leading_block(self, ms, k):
        ms = np.asarray(ms, dtype=float)
        idx = np.arange(1, k + 1, dtype=float)[:, None]
        vals = _eval_grid(self.base_family.g, idx / ms[None, :])
        kk = np.ceil(self.delta * ms)[None, :]
        return np.where(idx <= kk, self.lam_top, vals)

    def trailing_block(self, ms, k):
        ms = np.asarray(ms, dtype=float)
        js = np.arange(1, k + 1, dtype=float)[:, None]
        idx = ms[None, :] - js + 1.0  # descending rank of the j-th smallest
        vals = _eval_grid(self.base_family.g, idx / ms[None, :])
        kk = np.ceil(self.delta * ms)[None, :]
        return np.where(idx <= kk, self.lam_top, vals)

    def top_block(self, ms):
        return np.full(len(ms), self.lam_top)

    def bottom_block(self, ms):
        ms = np.asarray(ms, dtype=float)
        base1 = float(_eval_grid(self.base_family.g, np.array([1.0]))[0])
        return np.where(ms <= np.ceil(self.delta * ms), self.lam_top, base1)


class TwoBlockFamily(SpectrumFamily):
    """Half the spectrum at `top`, half at `bottom`: lambda_{i,m} = top for
    i <= ceil(m/2), else bottom."""

    kind = "twoblock"

    def __init__(self, top: float = 2.0, bottom: float = 1.0):
        if bottom <= _MIN_EIGENVALUE or top < bottom:
            raise ValueError("need top >= bottom > 0")
        self.top = float(top)
        self.bottom = float(bottom)

    def spectrum(self, p: int) -> Spectrum:
        k = (p + 1) // 2
        vals = np.full(p, self.bottom)
        vals[:k] = self.top
        return Spectrum(vals, p)

    def leading_block(self, ms, k):
        ms = np.asarray(ms)
        idx = np.arange(1, k + 1)[:, None]
        return np.where(idx <= (ms[None, :] + 1) // 2, self.top, self.bottom)

    def trailing_block(self, ms, k):
        ms = np.asarray(ms)
        js = np.arange(1, k + 1)[:, None]
        # j-th smallest sits in the bottom block iff j <= floor(m/2)
        return np.where(js <= ms[None, :] // 2, self.bottom, self.top).astype(float)

    def top_block(self, ms):
        return np.full(len(ms), self.top)

    def bottom_block(self, ms):
        ms = np.asarray(ms)
        return np.where(ms <= 1, self.top, self.bottom).astype(float)


class TableFamily(SpectrumFamily):
    """Explicit map p -> spectrum; every dimension used must be present."""

    kind = "table"

    def __init__(self, table: Mapping[int, Sequence[float]]):
        self.table = {int(p): Spectrum(np.asarray(v, dtype=float), int(p))
                      for p, v in table.items()}
        if not self.table:
            raise ValueError("table family needs at least one entry")

    def spectrum(self, p: int) -> Spectrum:
        try:
            return self.table[p]
        except KeyError:
            raise ValueError(f"table family has no spectrum for p={p}") from None


def spectrum_at(family: SpectrumFamily, p: int) -> Spectrum:
    """The family's length-p spectrum (functional form of family.spectrum)."""
    return family.spectrum(p)


def _validate_window(p: int, horizon) -> int:
    if p < 1:
        raise ValueError("p must be a positive integer")
    m = default_horizon(p) if horizon is None else int(horizon)
    if m < p:
        raise ValueError("horizon must satisfy M >= p")
    return m


def _cluster_members(family, p, horizon, tol_scale, ref_block, eig_block):
    """Indices i with |ref_m / lam_block[i,m] - 1| < tol_scale/sqrt(m) for
    all m in [p, horizon]; scanned in chunks with early exit once empty."""
    alive = np.ones(p, dtype=bool)
    m0 = p
    while m0 <= horizon and alive.any():
        ms = np.arange(m0, min(m0 + _CHUNK, horizon + 1))
        lam = eig_block(ms, p)
        ref = np.asarray(ref_block(ms), dtype=float)
        tol = tol_scale / np.sqrt(ms)
        ok = np.abs(ref[None, :] / lam - 1.0) < tol[None, :]
        alive &= ok.all(axis=1)
        m0 += _CHUNK
    return alive


def _report(p, horizon, alive) -> ClusterReport:
    members = tuple(int(i) for i in np.nonzero(alive)[0] + 1)
    return ClusterReport(p=p, horizon=horizon, members=members, cardinal=len(members))


def j_set(family: SpectrumFamily, p: int, horizon: int | None = None) -> ClusterReport:
    """Top-clustering set J_p under a finite horizon.

    J_p = {i : |lambda_{1,m}/lambda_{i,m} - 1| < 1/sqrt(m) for all m in [p, M]}.
    """
    m = _validate_window(p, horizon)
    alive = _cluster_members(family, p, m, 1.0, family.top_block,
                             family.leading_block)
    return _report(p, m, alive)


def phi(family: SpectrumFamily, p: int, horizon: int | None = None) -> int:
    """Cardinal of J_p."""
    return j_set(family, p, horizon).cardinal


def h_set_xi(family: SpectrumFamily, p: int, kappa: float,
             horizon: int | None = None) -> ClusterReport:
    """Bottom-clustering set H_{p,kappa} with tolerance kappa/sqrt(m) relative
    to the smallest eigenvalue lambda_{m,m}.

    Member j means the j-th smallest eigenvalue stays within the tolerance
    for every m in the window. Anchoring indices to the bottom (rather than
    reusing the descending rank i, which every fixed index outgrows as m
    increases) is what makes the set track the bottom cluster; the identity
    family gives all p indices, a two-block spectrum exactly its bottom half.
    """
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    m = _validate_window(p, horizon)
    alive = _cluster_members(family, p, m, kappa, family.bottom_block,
                             family.trailing_block)
    return _report(p, m, alive)


def xi(family: SpectrumFamily, p: int, kappa: float, horizon: int | None = None) -> int:
    """Cardinal of H_{p,kappa}."""
    return h_set_xi(family, p, kappa, horizon).cardinal


def generalized_j_set(family: SpectrumFamily, x, p: int,
                      horizon: int | None = None) -> ClusterReport:
    """J_p(x) for an arbitrary positive reference sequence x_m.

    `x` may be a callable m -> x_m or a mapping; it must cover every
    m in [p, horizon].
    """
    m = _validate_window(p, horizon)

    if callable(x):
        def ref_block(ms):
            return np.array([float(x(int(mm))) for mm in ms])
    else:
        def ref_block(ms):
            try:
                return np.array([float(x[int(mm)]) for mm in ms])
            except KeyError as exc:
                raise ValueError(f"reference sequence undefined at m={exc.args[0]}") from None

    alive = _cluster_members(family, p, m, 1.0, ref_block,
                             family.leading_block)
    return _report(p, m, alive)


def geometric_grid(start: float = 0.1, ratio: float = 0.25, count: int = 10):
    """Strictly decreasing geometric grid in (0,1) for the generator check."""
    if not 0.0 < start < 1.0 or not 0.0 < ratio < 1.0 or count < 8:
        raise ValueError("need 0<start<1, 0<ratio<1, count >= 8")
    return tuple(start * ratio ** k for k in range(count))


def generator_condition_check(g: Callable, grid: Sequence[float]) -> GeneratorConditionReport:
    """Finite evidence for the overshoot condition sqrt(x) g'(x) -> 0.

    Estimates g' by central differences (step x/100) on a decreasing grid and
    demands |sqrt(x) g'(x)| shrink over the last five points down to < 0.05.
    A limit claim cannot be proven from samples, hence the heuristic flag.
    """
    grid = tuple(float(x) for x in grid)
    if len(grid) < 8:
        raise ValueError("grid too short: need at least 8 points")
    if not all(0.0 < x < 1.0 for x in grid) or not all(
            a > b for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must decrease strictly inside (0,1)")
    slopes = []
    for x in grid:
        h = min(x / 100.0, 0.5 * (1.0 - x))
        gp = (float(_eval_grid(g, np.array([x + h]))[0])
              - float(_eval_grid(g, np.array([x - h]))[0])) / (2.0 * h)
        slopes.append(math.sqrt(x) * gp)
    tail = [abs(s) for s in slopes[-5:]]
    decreasing = all(b <= a * (1.0 - 1e-3) for a, b in zip(tail, tail[1:]))
    passes = decreasing and tail[-1] < 0.05
    return GeneratorConditionReport(grid=grid, slopes=tuple(slopes), passes=passes)
