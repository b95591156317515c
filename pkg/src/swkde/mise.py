"""Exact MISE of the sliding-window Gaussian KDE and closed-form mixture ISE.

For batch densities N(mu_i, gamma_i^2), kernel bandwidth sigma and target
N(mu_t, gamma_t^2), the MISE of the weighted estimator is the quadratic

    alpha' (Phi + D) alpha - 2 theta' alpha + 1 / (2 gamma_t sqrt(pi))

where Phi is the Gram matrix of the smoothed batch densities, D holds the
per-batch integrated variances and theta the inner products with the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from swkde.gaussian import SQRT_PI, GaussianParams, phi

MAX_WINDOW = 64


@dataclass(frozen=True)
class BatchSummary:
    """Mean, standard deviation and size of one batch."""

    mu: float
    gamma: float
    n: int

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise ValueError(f"batch mean must be finite, got {self.mu!r}")
        if not math.isfinite(self.gamma) or self.gamma < 0.0:
            raise ValueError(f"batch std must be finite and >= 0, got {self.gamma!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"batch size must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class MiseComponents:
    phi_matrix: np.ndarray
    d_diag: np.ndarray
    theta: np.ndarray
    constant: float
    bandwidth: float
    target: GaussianParams

    @property
    def size(self) -> int:
        return len(self.theta)

    @property
    def lam(self) -> np.ndarray:
        """Dense ``Phi + diag(D)``."""
        return self.phi_matrix + np.diag(self.d_diag)


def build_components(
    summaries: Sequence[BatchSummary], target: GaussianParams, bandwidth: float
) -> MiseComponents:
    if len(summaries) == 0:
        raise ValueError("need at least one batch summary")
    if len(summaries) > MAX_WINDOW:
        raise ValueError(f"window of {len(summaries)} exceeds the limit of {MAX_WINDOW}")
    if not math.isfinite(bandwidth) or bandwidth <= 0.0:
        raise ValueError(f"bandwidth must be finite and > 0, got {bandwidth!r}")
    if not isinstance(target, GaussianParams):
        raise TypeError("target must be GaussianParams")

    mu = np.array([s.mu for s in summaries])
    var = np.array([s.gamma for s in summaries]) ** 2
    n = np.array([s.n for s in summaries], dtype=float)
    s2 = bandwidth**2

    phi_matrix = phi(np.sqrt(2.0 * s2 + (var[:, None] + var[None, :])), mu[:, None] - mu[None, :])
    d_diag = (1.0 / bandwidth - 1.0 / np.sqrt(s2 + var)) / (2.0 * SQRT_PI * n)
    theta = phi(np.sqrt(s2 + var + target.sigma**2), mu - target.mu)
    constant = 1.0 / (2.0 * target.sigma * SQRT_PI)
    return MiseComponents(
        phi_matrix=np.atleast_2d(phi_matrix),
        d_diag=np.atleast_1d(d_diag),
        theta=np.atleast_1d(theta),
        constant=constant,
        bandwidth=float(bandwidth),
        target=target,
    )


def _alpha(c: MiseComponents, alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if a.shape != (c.size,):
        raise ValueError(f"weight vector has shape {a.shape}, expected ({c.size},)")
    return a


def exact_mise(c: MiseComponents, alpha) -> float:
    a = _alpha(c, alpha)
    return float(a @ c.lam @ a - 2.0 * c.theta @ a + c.constant)


def ib_squared(c: MiseComponents, alpha) -> float:
    """Integrated squared bias; does not depend on the batch sizes."""
    a = _alpha(c, alpha)
    return float(a @ c.phi_matrix @ a - 2.0 * c.theta @ a + c.constant)


def iv(c: MiseComponents, alpha) -> float:
    """Integrated variance, sum_i alpha_i^2 D_ii."""
    a = _alpha(c, alpha)
    return float(np.sum(a * a * c.d_diag))


@dataclass(frozen=True)
class MixtureDensity:
    """Finite Gaussian mixture stored as parallel weight/mean/scale arrays."""

    weights: np.ndarray
    means: np.ndarray
    scales: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        m = np.asarray(self.means, dtype=float).ravel()
        s = np.asarray(self.scales, dtype=float).ravel()
        if not (w.shape == m.shape == s.shape):
            raise ValueError("weights, means and scales must have equal length")
        if w.size == 0:
            raise ValueError("mixture has no components")
        if not (np.all(np.isfinite(s)) and np.all(s > 0.0)):
            raise ValueError("component scales must be finite and > 0")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(m))):
            raise ValueError("weights and means must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "scales", s)

    @classmethod
    def from_components(cls, components: Iterable[tuple[float, GaussianParams]]) -> MixtureDensity:
        comps = list(components)
        return cls(
            weights=[w for w, _ in comps],
            means=[g.mu for _, g in comps],
            scales=[g.sigma for _, g in comps],
        )

    @property
    def components(self) -> list[tuple[float, GaussianParams]]:
        return [
            (float(w), GaussianParams(float(m), float(s)))
            for w, m, s in zip(self.weights, self.means, self.scales)
        ]

    def __len__(self) -> int:
        return self.weights.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        vals = phi(self.scales, x[..., None] - self.means) @ self.weights
        return float(vals) if np.ndim(vals) == 0 else vals


def closed_form_ise(h: MixtureDensity, target: GaussianParams) -> float:
    """Integrated squared error between mixture ``h`` and a Gaussian target.

    Raw value; tiny negatives from cancellation are not clamped here.
    """
    w, m, s = h.weights, h.means, h.scales
    var = s * s
    gram = phi(np.sqrt(var[:, None] + var[None, :]), m[:, None] - m[None, :])
    cross = phi(np.sqrt(var + target.sigma**2), m - target.mu)
    own = 1.0 / (2.0 * target.sigma * SQRT_PI)
    return float(w @ gram @ w - 2.0 * (w @ cross) + own)
