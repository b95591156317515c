"""Exact identities for univariate Gaussian densities.

Everything downstream (MISE matrices, mixture ISE) reduces to the fact that
the product of two Gaussian pdfs is a scaled Gaussian pdf, so the L2 inner
product of two Gaussians is itself a Gaussian pdf evaluated at the
difference of their means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class GaussianParams:
    """Location/scale pair naming the density N(mu, sigma**2)."""

    mu: float
    sigma: float

    def __post_init__(self):
        mu, sigma = float(self.mu), float(self.sigma)
        if not math.isfinite(mu):
            raise ValueError(f"mu must be finite, got {self.mu!r}")
        if not math.isfinite(sigma) or sigma <= 0.0:
            raise ValueError(f"sigma must be finite and > 0, got {self.sigma!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    def pdf(self, x):
        return phi(self.sigma, np.asarray(x, dtype=float) - self.mu)


def _check_scale(scale) -> None:
    s = np.asarray(scale, dtype=float)
    if not np.all(np.isfinite(s)) or np.any(s <= 0.0):
        raise ValueError(f"scale must be finite and > 0, got {scale!r}")


def phi(scale, z):
    """Centered Gaussian pdf with standard deviation ``scale`` evaluated at ``z``.

    Broadcasts over numpy arrays; returns a Python float for scalar input.
    """
    _check_scale(scale)
    scale = np.asarray(scale, dtype=float)
    z = np.asarray(z, dtype=float)
    out = np.exp(-0.5 * (z / scale) ** 2) / (SQRT_2PI * scale)
    return float(out) if out.ndim == 0 else out


def gaussian_product(a: GaussianParams, b: GaussianParams) -> tuple[float, GaussianParams]:
    """Write phi_a(x - mu_a) * phi_b(x - mu_b) as ``scale * phi_r(x - mu_r)``.

    Returns ``(scale, GaussianParams(mu_r, sigma_r))``.
    """
    va, vb = a.sigma**2, b.sigma**2
    total = va + vb
    scale = phi(math.sqrt(total), a.mu - b.mu)
    mu = (va * b.mu + vb * a.mu) / total
    sigma = a.sigma * b.sigma / math.sqrt(total)
    return scale, GaussianParams(mu, sigma)


def cross_inner(a: GaussianParams, b: GaussianParams) -> float:
    """L2 inner product of the two densities."""
    return phi(math.sqrt(a.sigma**2 + b.sigma**2), a.mu - b.mu)


def l2_norm_sq(g: GaussianParams) -> float:
    """Squared L2 norm, 1 / (2 sigma sqrt(pi)).

    Routed through :func:`cross_inner` so the two agree bit for bit.
    """
    return cross_inner(g, g)
