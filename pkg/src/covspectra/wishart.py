"""Gaussian simulation, sample covariance, eigensolver, Wishart densities.

Data model: a draw is an n x p matrix with independent N(0, diag(spectrum))
rows. Rotation invariance of the eigenvalue law lets every experiment run
with a diagonal population covariance without loss of generality.
"""

import math
from dataclasses import dataclass

import numpy as np

from covspectra import _kernels, specfun
from covspectra.errors import NumericalError
from covspectra.rng import RandomStream
from covspectra.spectra import Spectrum, SpectrumFamily

# eigensolver contracts
_JACOBI_REL_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100
_RESIDUAL_LIMIT = 1e-11
_SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class TrialRecord:
    """Extremes of one Monte Carlo draw plus the stream that produced it."""

    p: int
    n: int
    largest_sample: float
    smallest_sample: float
    largest_true: float
    smallest_true: float
    overshoot: bool
    undershoot: bool
    seed: int
    stream: int


def sample_gaussian_matrix(p: int, n: int, spectrum: Spectrum,
                           stream: RandomStream) -> np.ndarray:
    """n independent rows of N(0, diag(spectrum)) as an (n, p) matrix.

    Entry (i, j) is sqrt(lambda_j) * z_ij with the z's consumed from the
    stream in row-major order, so a draw is reproducible from (seed, stream)
    alone.
    """
    if spectrum.p != p:
        raise ValueError("spectrum length must equal p")
    if n <= p:
        raise ValueError("need more samples than dimensions (n > p)")
    z = stream.normals(n * p).reshape(n, p)
    return z * np.sqrt(spectrum.values)[None, :]


def sample_covariance(X: np.ndarray) -> np.ndarray:
    """Mean-centered sample covariance with 1/n normalization.

    Runs on BLAS in both backends (a gemm is not worth reimplementing); the
    explicit symmetrization guarantees the symmetric-output contract.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need an (n, p) matrix with n >= 2")
    n = X.shape[0]
    Xc = X - X.mean(axis=0)
    M = Xc.T @ Xc
    return (M + M.T) * (0.5 / n)


def symmetric_eigenvalues(S: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of a symmetric matrix by cyclic Jacobi.

    Raises NumericalError if the final off-diagonal Frobenius residual
    exceeds 1e-11 * ||S||_F.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("matrix must be square")
    norm_f = float(np.sqrt((S * S).sum()))
    asym = float(np.abs(S - S.T).max()) if S.size else 0.0
    if asym > _SYMMETRY_TOL * max(1.0, norm_f):
        raise ValueError("matrix is not symmetric within tolerance")
    eigs, off, _ = _kernels.jacobi_eigenvalues(
        np.ascontiguousarray(S), _JACOBI_MAX_SWEEPS, _JACOBI_REL_TOL)
    if norm_f > 0.0 and off > _RESIDUAL_LIMIT * norm_f:
        raise NumericalError(
            f"Jacobi did not converge: residual {off:.3e} > {_RESIDUAL_LIMIT:.0e}*||S||")
    return eigs


def _spd_cholesky(A: np.ndarray, name: str) -> np.ndarray:
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} must be symmetric positive definite") from None


def wishart_logpdf(M: np.ndarray, n: int, Sigma: np.ndarray) -> float:
    """Log density of the Wishart law W_p(n, Sigma) at an SPD matrix M.

    log f = -(np/2) log 2 - log Gamma_p(n/2) - (n/2) log det Sigma
            - tr(Sigma^{-1} M)/2 + ((n-p-1)/2) log det M
    """
    M = np.asarray(M, dtype=float)
    Sigma = np.asarray(Sigma, dtype=float)
    p = M.shape[0]
    if M.shape != (p, p) or Sigma.shape != (p, p):
        raise ValueError("M and Sigma must be square of the same size")
    if n < p:
        raise ValueError("degrees of freedom must satisfy n >= p")
    lm = _spd_cholesky(M, "M")
    ls = _spd_cholesky(Sigma, "Sigma")
    logdet_m = 2.0 * float(np.log(np.diag(lm)).sum())
    logdet_s = 2.0 * float(np.log(np.diag(ls)).sum())
    trace_term = float(np.trace(np.linalg.solve(Sigma, M)))
    return (-0.5 * n * p * math.log(2.0)
            - specfun.multivariate_ln_gamma(p, 0.5 * n)
            - 0.5 * n * logdet_s
            - 0.5 * trace_term
            + 0.5 * (n - p - 1) * logdet_m)


def joint_eig_logdensity_isotropic(l: np.ndarray, n: int, lam: float) -> float:
    """Log joint density of Wishart eigenvalues when the covariance is lam*I.

    The orthogonal-group integral collapses to exp(-sum(l)/(2 lam)) in this
    case; ties in l make the Vandermonde factor vanish and are rejected.
    """
    l = np.asarray(l, dtype=float)
    p = l.size
    if p < 1:
        raise ValueError("need at least one eigenvalue")
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if n <= p:
        raise ValueError("degrees of freedom must satisfy n > p")
    if np.any(l <= 0.0):
        raise ValueError("eigenvalues must be positive")
    if np.any(np.diff(l) >= 0.0):
        raise ValueError("eigenvalues must be strictly descending (no ties)")
    vandermonde = 0.0
    for i in range(p - 1):
        vandermonde += float(np.log(l[i] - l[i + 1:]).sum())
    return (0.5 * p * p * math.log(math.pi)
            - 0.5 * n * p * math.log(2.0)
            - 0.5 * n * p * math.log(lam)
            - specfun.multivariate_ln_gamma(p, 0.5 * n)
            - specfun.multivariate_ln_gamma(p, 0.5 * p)
            + 0.5 * (n - p - 1) * float(np.log(l).sum())
            + vandermonde
            - float(l.sum()) / (2.0 * lam))


def extreme_eigs_trial(family: SpectrumFamily, p: int, q: float,
                       stream: RandomStream) -> TrialRecord:
    """One Monte Carlo draw: sample, form S, record extreme eigenvalues."""
    if not 0.0 < q < 1.0:
        raise ValueError("aspect ratio q must lie in (0,1)")
    n = round(p / q)
    if n <= p:
        raise ValueError(f"q={q} gives n={n} <= p={p}")
    spec = family.spectrum(p)
    X = sample_gaussian_matrix(p, n, spec, stream)
    S = sample_covariance(X)
    eigs = symmetric_eigenvalues(S)
    l1, lp = float(eigs[0]), float(eigs[-1])
    lam1, lamp = float(spec.values[0]), float(spec.values[-1])
    return TrialRecord(
        p=p, n=n,
        largest_sample=l1, smallest_sample=lp,
        largest_true=lam1, smallest_true=lamp,
        overshoot=l1 > lam1, undershoot=lp < lamp,
        seed=stream.seed, stream=stream.stream)
