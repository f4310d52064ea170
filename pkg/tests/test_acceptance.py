"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line, run at the stated tolerances and runtime budgets."""

import json
import math
import time

import numpy as np
import pytest
from scipy import integrate

from covspectra import bounds as bd
from covspectra import experiments as ex
from covspectra import specfun as sf
from covspectra import spectra as sp
from covspectra import wishart as wi
from covspectra.cli import main as cli_main


def _report(num, label, elapsed=None):
    tail = f" ({elapsed:.1f}s)" if elapsed is not None else ""
    print(f"ACCEPTANCE {num}: {label}: PASS{tail}")


def test_criterion_1_special_function_oracles():
    """Chi-square closed forms for even dof and the Gaussian tail sandwich."""
    t0 = time.monotonic()
    for x in np.linspace(0.0, 20.0, 100):
        x = float(x)
        assert abs(sf.chi2_cdf(2, x) - (-math.expm1(-0.5 * x))) < 1e-10
        assert abs(sf.chi2_cdf(4, x)
                   - (1.0 - math.exp(-0.5 * x) * (1.0 + 0.5 * x))) < 1e-10
    t = sf.gaussian_tail_bounds(0.0)
    assert abs(t.upper - t.mid) < 1e-10  # equality at the origin
    for x in np.random.RandomState(99).uniform(0.0, 20.0, 10_000):
        t = sf.gaussian_tail_bounds(float(x))
        assert t.lower <= t.mid <= t.upper
        assert t.lower > 0.0
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    _report(1, "special-function oracle suite", elapsed)


def test_criterion_2_muirhead_validation():
    """Empirical CDFs of both extremes stay on the right side of the product
    bounds for identity and two-block spectra (p=20, n=200, 2000 trials)."""
    t0 = time.monotonic()
    cases = [
        (sp.IdentityFamily(1.0), np.linspace(0.5, 2.5, 25), 11),
        (sp.TwoBlockFamily(2.0, 1.0), np.linspace(0.4, 3.6, 25), 12),
    ]
    for family, grid, seed in cases:
        config = ex.ExperimentConfig(family=family, p_list=(20,), q=0.1,
                                     trials=2000, master_seed=seed)
        table = ex.cdf_vs_bound(config, 20, grid)
        assert table.x_grid.size == 25
        assert np.all(table.emp_cdf_l1 <= table.muirhead_upper + 3.0 * table.stderr)
        assert np.all(table.emp_cdf_lp >= table.muirhead_lower - 3.0 * table.stderr)
        assert table.passed
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    _report(2, "Theorem-I bound validation (identity + two-block)", elapsed)


def test_criterion_3_overshoot_undershoot():
    """Overshoot/undershoot frequencies at desk scale: >=0.99 at p=50 and a
    nondecreasing trend along p in {10,20,40,80}."""
    t0 = time.monotonic()
    config50 = ex.ExperimentConfig(family=sp.IdentityFamily(1.0), p_list=(50,),
                                   q=0.1, trials=200, master_seed=42)
    over, _ = ex.estimate_overshoot(config50, 50)
    under, _ = ex.estimate_undershoot(config50, 50)
    assert over >= 0.99 and under >= 0.99

    config = ex.ExperimentConfig(family=sp.IdentityFamily(1.0),
                                 p_list=(10, 20, 40, 80), q=0.1,
                                 trials=200, master_seed=42)
    rows = ex.sweep(config).rows

    def joint_se(a, b):
        def se(f):
            return max(math.sqrt(f * (1.0 - f) / 200.0), 1.0 / 400.0)
        return math.sqrt(se(a) ** 2 + se(b) ** 2)

    for prev, cur in zip(rows, rows[1:]):
        slack_o = 2.0 * joint_se(prev.overshoot_freq, cur.overshoot_freq)
        slack_u = 2.0 * joint_se(prev.undershoot_freq, cur.undershoot_freq)
        assert cur.overshoot_freq >= prev.overshoot_freq - slack_o
        assert cur.undershoot_freq >= prev.undershoot_freq - slack_u
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0
    _report(3, "overshoot/undershoot trend (identity, q=0.1)", elapsed)


def test_criterion_4_marchenko_pastur():
    """Pooled eigenvalues vs the MP law at p=400: KS < 0.05; density mass and
    support edges exact to their tolerances."""
    t0 = time.monotonic()
    law = bd.MPLaw.for_ratio(0.1)
    assert abs(law.lambda_minus - (1.0 - math.sqrt(0.1)) ** 2) < 1e-12
    assert abs(law.lambda_plus - (1.0 + math.sqrt(0.1)) ** 2) < 1e-12
    assert abs(bd.mp_cdf(0.1, law.lambda_plus) - 1.0) < 1e-6
    result = ex.mp_compare(400, 0.1, 5, 7)
    assert result.pooled_count == 2000
    assert result.ks_statistic < 0.05
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    _report(4, f"Marchenko-Pastur (KS={result.ks_statistic:.4f})", elapsed)


def test_criterion_5_clustering_machinery():
    """phi on identity/two-block/dirac families plus the nesting property,
    with a brute-force enumeration oracle for the two-block case."""
    t0 = time.monotonic()
    identity = sp.IdentityFamily(1.0)
    for p in range(1, 101):
        assert sp.phi(identity, p, 10_000) == p

    two_block = sp.TwoBlockFamily(2.0, 1.0)
    for p in range(1, 101):
        assert abs(sp.phi(two_block, p, 2000) - p // 2) <= 1
    for p in (10, 20, 41):
        got = sp.phi(two_block, p, 2000)
        # direct (i, m) enumeration over the same window
        alive = [True] * p
        for m in range(p, 2001):
            lam = two_block.spectrum(m).values
            tol = 1.0 / math.sqrt(m)
            for i in range(p):
                if alive[i] and not abs(lam[0] / lam[i] - 1.0) < tol:
                    alive[i] = False
        assert got == sum(alive)

    gen = sp.GeneratorFamily(lambda x: 2.0 - x)
    prev = set()
    for p in range(1, 101):
        members = set(sp.j_set(gen, p, 10_000).members)
        assert prev <= members
        prev = members

    dirac = sp.DiracMixtureFamily(0.3, 2.0, lambda x: 1.0 - x / 2.0)
    for p in (5, 20, 50, 100):
        assert sp.phi(dirac, p, 10_000) >= math.ceil(0.3 * p)
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0
    _report(5, "clustering machinery vs enumeration oracle", elapsed)


def test_criterion_6_explicit_constants():
    """The exponential-bound constants as printed."""
    assert abs(bd.THEOREM2_C - 0.0907038) < 1e-6
    for bad in (bd.KAPPA_LIMIT, 0.8, 1.0):
        with pytest.raises(ValueError):
            bd.theorem3_bound(5, bad)
    for kappa in (0.1, 0.5, 0.7):
        direct = math.log(2.0 - kappa * math.sqrt(math.pi / 2.0))
        assert abs(bd.theorem3_kappa_constant(kappa) - direct) < 1e-12
    _report(6, "explicit theorem constants")


def test_criterion_7_density_reductions():
    """Both log densities collapse to the scaled chi-square law at p=1; the
    p=2 isotropic joint density is normalized over the ordered cone."""
    t0 = time.monotonic()

    def chi2_logpdf(n, x):
        return ((0.5 * n - 1.0) * math.log(x) - 0.5 * x
                - 0.5 * n * math.log(2.0) - sf.ln_gamma(0.5 * n))

    for n, lam, l in ((5, 1.0, 2.0), (9, 0.5, 4.0), (30, 2.0, 55.0)):
        ref = chi2_logpdf(n, l / lam) - math.log(lam)
        assert abs(wi.joint_eig_logdensity_isotropic(np.array([l]), n, lam)
                   - ref) < 1e-9
        assert abs(wi.wishart_logpdf(np.array([[l / lam]]), n, np.array([[1.0]]))
                   - chi2_logpdf(n, l / lam)) < 1e-9

    mass, _ = integrate.dblquad(
        lambda l1, l2: math.exp(
            wi.joint_eig_logdensity_isotropic(np.array([l1, l2]), 5, 1.0)),
        0.0, 80.0, lambda l2: l2 + 1e-12, lambda l2: 80.0,
        epsabs=1e-6, epsrel=1e-6)
    assert abs(mass - 1.0) < 1e-3
    _report(7, "density reductions + cone normalization", time.monotonic() - t0)


def test_criterion_8_cli_determinism(tmp_path):
    """Reruns with the same seed are byte-identical; worker count is
    invisible in the outputs."""
    t0 = time.monotonic()
    sim = ("simulate", "--family", "identity:1", "--p", "10,20", "--q", "0.1",
           "--trials", "50", "--seed", "42")
    for label, extra in (("a", []), ("b", [])):
        assert cli_main([*sim, *extra, "--out", str(tmp_path / f"sim_{label}")]) == 0
    assert (tmp_path / "sim_a/sweep.csv").read_bytes() == \
        (tmp_path / "sim_b/sweep.csv").read_bytes()
    ma = json.loads((tmp_path / "sim_a/run.json").read_text())
    mb = json.loads((tmp_path / "sim_b/run.json").read_text())
    ma.pop("wall_clock_seconds"), mb.pop("wall_clock_seconds")
    assert ma == mb

    for label, workers in (("w1", "1"), ("w4", "4")):
        assert cli_main([*sim, "--workers", workers,
                         "--out", str(tmp_path / f"sim_{label}")]) == 0
    assert (tmp_path / "sim_w1/sweep.csv").read_bytes() == \
        (tmp_path / "sim_w4/sweep.csv").read_bytes()

    mp = ("mp", "--q", "0.1", "--simulate", "--p", "60", "--trials", "3",
          "--seed", "7")
    for label, workers in (("a", "1"), ("b", "3")):
        assert cli_main([*mp, "--workers", workers,
                         "--out", str(tmp_path / f"mp_{label}")]) == 0
    for name in ("mp_density.csv", "mp_ks.csv", "mp_hist.csv"):
        assert (tmp_path / "mp_a" / name).read_bytes() == \
            (tmp_path / "mp_b" / name).read_bytes()

    bounds_cmd = ("bounds", "--family", "twoblock:2:1", "--p", "10", "--q", "0.2",
                  "--trials", "40", "--seed", "5")
    for label, workers in (("a", "1"), ("b", "4")):
        assert cli_main([*bounds_cmd, "--workers", workers,
                         "--out", str(tmp_path / f"b_{label}")]) == 0
    assert (tmp_path / "b_a/bounds.csv").read_bytes() == \
        (tmp_path / "b_b/bounds.csv").read_bytes()
    _report(8, "CLI determinism (seed + workers)", time.monotonic() - t0)
