"""Sliding-window kernel density estimator over a stream of batches."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from swkde.gaussian import GaussianParams
from swkde.mise import MAX_WINDOW, BatchSummary, MiseComponents, MixtureDensity, build_components
from swkde.weights import (
    average_weights,
    current_weights,
    exponential_weights,
    solve_optimal_weights,
)

SCHEMES = ("current", "average", "exponential", "dynamic")
PARAM_MODES = ("oracle", "plugin")
STD_FLOOR = 1e-8


class DegenerateBatchError(ValueError):
    pass


class ParamModeError(ValueError):
    pass


class OutOfOrderError(ValueError):
    pass


@dataclass(frozen=True)
class Batch:
    t: int
    values: np.ndarray
    true_params: Optional[GaussianParams] = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError(f"batch {self.t} is empty")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"batch {self.t} has non-finite values")
        if int(self.t) != self.t or self.t < 0:
            raise ValueError(f"batch index must be a nonnegative integer, got {self.t!r}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "t", int(self.t))

    @property
    def n(self) -> int:
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, Batch):
            return NotImplemented
        return (
            self.t == other.t
            and self.true_params == other.true_params
            and np.array_equal(self.values, other.values)
        )


def summarize_batch(b: Batch, mode: str) -> BatchSummary:
    """Batch summary from the true parameters (oracle) or the sample (plugin).

    Plugin uses the Bessel-corrected standard deviation, floored at 1e-8.
    """
    if mode == "oracle":
        if b.true_params is None:
            raise ParamModeError(f"oracle mode needs true parameters for batch {b.t}")
        return BatchSummary(b.true_params.mu, b.true_params.sigma, b.n)
    if mode == "plugin":
        if b.n < 2:
            raise DegenerateBatchError(f"batch {b.t} has {b.n} sample(s); plugin mode needs 2")
        std = max(float(np.std(b.values, ddof=1)), STD_FLOOR)
        return BatchSummary(float(np.mean(b.values)), std, b.n)
    raise ParamModeError(f"unknown parameter mode {mode!r}")


@dataclass(frozen=True)
class TrackerConfig:
    window: int = 5
    bandwidth: float = 1.0
    scheme: str = "dynamic"
    beta: float = 0.1
    param_mode: str = "plugin"

    def __post_init__(self):
        if int(self.window) != self.window or not 1 <= self.window <= MAX_WINDOW:
            raise ValueError(f"window must be an integer in [1, {MAX_WINDOW}], got {self.window!r}")
        if not math.isfinite(self.bandwidth) or self.bandwidth <= 0.0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta!r}")
        if self.param_mode not in PARAM_MODES:
            raise ValueError(f"unknown parameter mode {self.param_mode!r}")


@dataclass
class Tracker:
    """Holds the last ``config.window`` batches, oldest first.

    Not safe for concurrent pushes; reads between pushes are fine.
    """

    config: TrackerConfig
    ring: deque = field(default_factory=deque)

    def __post_init__(self):
        self.ring = deque(self.ring, maxlen=self.config.window)

    def __len__(self) -> int:
        return len(self.ring)

    @property
    def batches(self) -> list[Batch]:
        return [b for b, _ in self.ring]

    @property
    def summaries(self) -> list[BatchSummary]:
        return [s for _, s in self.ring]

    def push(self, b: Batch) -> Tracker:
        if self.ring and b.t <= self.ring[-1][0].t:
            raise OutOfOrderError(f"batch {b.t} pushed after batch {self.ring[-1][0].t}")
        summary = summarize_batch(b, self.config.param_mode)
        self.ring.append((b, summary))
        return self

    def default_target(self) -> GaussianParams:
        """True density of the current batch (oracle) or its plugin fit."""
        b, s = self._last()
        if self.config.param_mode == "oracle":
            return b.true_params
        return GaussianParams(s.mu, s.gamma)

    def components(self, target: Union[GaussianParams, BatchSummary, None] = None) -> MiseComponents:
        target = self._target(target)
        return build_components(self.summaries, target, self.config.bandwidth)

    def weights_for(self, target: Union[GaussianParams, BatchSummary, None] = None) -> np.ndarray:
        self._last()
        w = len(self.ring)
        scheme = self.config.scheme
        if scheme == "current":
            return current_weights(w)
        if scheme == "average":
            return average_weights(w)
        if scheme == "exponential":
            return exponential_weights(w, self.config.beta)
        return solve_optimal_weights(self.components(target)).alpha

    def estimate_density(self, alpha, x):
        """Evaluate the weighted estimator at ``x`` (scalar or array)."""
        return self.current_mixture(alpha)(x)

    def current_mixture(self, alpha) -> MixtureDensity:
        a = self._alpha(alpha)
        weights, means = [], []
        for ai, b in zip(a, self.batches):
            weights.append(np.full(b.n, ai / b.n))
            means.append(b.values)
        means = np.concatenate(means)
        return MixtureDensity(
            np.concatenate(weights), means, np.full(means.size, self.config.bandwidth)
        )

    def _alpha(self, alpha) -> np.ndarray:
        a = np.asarray(alpha, dtype=float)
        if a.shape != (len(self.ring),):
            raise ValueError(f"weight vector has shape {a.shape}, window holds {len(self.ring)} batches")
        return a

    def _last(self):
        if not self.ring:
            raise ValueError("tracker holds no batches")
        return self.ring[-1]

    def _target(self, target) -> GaussianParams:
        if target is None:
            return self.default_target()
        if isinstance(target, BatchSummary):
            return GaussianParams(target.mu, target.gamma)
        return target

