"""covspectra: Monte Carlo laboratory for extreme eigenvalues of sample
covariance matrices.

Validates finite-sample product bounds on the extreme-eigenvalue
distributions, the clustering conditions that drive overestimation of the
largest (and underestimation of the smallest) eigenvalue in high dimension,
and the Marchenko-Pastur reference law, all through seeded, reproducible
simulation.
"""

__version__ = "0.1.0"
