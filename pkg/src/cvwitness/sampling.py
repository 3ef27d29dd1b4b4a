"""
Random Gaussian states and separable moment data.

These generators feed the soundness and hierarchy checks.  All take an
explicit :class:`numpy.random.Generator` so that runs are reproducible.
"""

import numpy as np

from .gaussian import CovarianceMatrix, _xxpp_to_xpxp

__all__ = [
    "random_orthosymplectic",
    "random_symplectic",
    "random_physical_cov",
    "random_pure_cov",
    "separable_mixture",
    "random_product_pure_block",
    "separable_truncated_block",
]


def _haar_unitary(rng, n):
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_orthosymplectic(rng, n_modes):
    """Passive (beam-splitter/phase) transformation in ``xpxp`` ordering."""
    u = _haar_unitary(rng, n_modes)
    x, y = u.real, u.imag
    o = np.block([[x, -y], [y, x]])
    perm = _xxpp_to_xpxp(n_modes)
    return o[np.ix_(perm, perm)]


def random_symplectic(rng, n_modes, max_squeezing=1.0):
    """``O1 diag(e^-r1, e^r1, ...) O2`` with ``r_k`` uniform in ``[0, max_squeezing]``."""
    r = rng.uniform(0.0, max_squeezing, n_modes)
    z = np.ravel(np.column_stack([np.exp(-r), np.exp(r)]))
    return random_orthosymplectic(rng, n_modes) * z @ random_orthosymplectic(rng, n_modes)


def random_physical_cov(rng, n_modes, max_squeezing=1.0, max_thermal=2.0):
    """``S diag(nu) S^T`` with symplectic eigenvalues ``nu_k`` in ``[1, 1 + max_thermal]``."""
    s = random_symplectic(rng, n_modes, max_squeezing)
    nu = np.repeat(1.0 + rng.uniform(0.0, max_thermal, n_modes), 2)
    return CovarianceMatrix((s * nu) @ s.T)


def random_pure_cov(rng, n_modes, max_squeezing=1.0):
    s = random_symplectic(rng, n_modes, max_squeezing)
    return CovarianceMatrix(s @ s.T)


def _random_product_gamma(rng, part_sizes, max_squeezing, max_thermal):
    blocks = [random_physical_cov(rng, k, max_squeezing, max_thermal).gamma
              for k in part_sizes]
    dim = sum(b.shape[0] for b in blocks)
    g = np.zeros((dim, dim))
    i = 0
    for b in blocks:
        k = b.shape[0]
        g[i:i + k, i:i + k] = b
        i += k
    return g


def separable_mixture(rng, part_sizes=(1, 1), n_components=None,
                      max_squeezing=1.0, max_thermal=1.0, mean_scale=1.5):
    """Exact moments of ``sum_k p_k (rho_k^A x rho_k^B)`` for displaced Gaussians.

    Each component is a product of physical (possibly correlated within a
    side) Gaussian states with a random displacement ``d_k``.  The mixture's
    covariance is ``sum_k p_k (gamma_k/2 + d_k d_k^T) - mu mu^T``, returned
    as a :class:`CovarianceMatrix` (``gamma`` doubled) with mean ``mu``.
    """
    if n_components is None:
        n_components = int(rng.integers(1, 6))
    p = rng.dirichlet(np.ones(n_components))
    dim = 2 * sum(part_sizes)
    second = np.zeros((dim, dim))
    mu = np.zeros(dim)
    for pk in p:
        gk = _random_product_gamma(rng, part_sizes, max_squeezing, max_thermal)
        dk = rng.normal(scale=mean_scale, size=dim)
        second += pk * (0.5 * gk + np.outer(dk, dk))
        mu += pk * dk
    cov = second - np.outer(mu, mu)
    return CovarianceMatrix(2.0 * cov, mu)


def _random_ket(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_product_pure_block(rng, levels, full_levels=None):
    """Projection of a random pure product state onto the first ``levels`` levels.

    The underlying state lives on ``full_levels >= levels`` levels per side,
    so the returned 4-index tensor generally has trace below 1.
    """
    full_levels = levels if full_levels is None else full_levels
    psi_a = _random_ket(rng, full_levels)[:levels]
    psi_b = _random_ket(rng, full_levels)[:levels]
    ket = np.outer(psi_a, psi_b)
    return np.einsum("ij,kl->ijkl", ket, ket.conj())


def separable_truncated_block(rng, levels, n_components=4, full_levels=None):
    """Convex mixture of :func:`random_product_pure_block` tensors."""
    p = rng.dirichlet(np.ones(n_components))
    return sum(pk * random_product_pure_block(rng, levels, full_levels) for pk in p)
