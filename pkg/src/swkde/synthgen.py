"""Synthetic evolving-Gaussian datasets and their JSON-lines file format.

Means follow an unbounded random walk with U[-mu_step, mu_step] increments;
standard deviations follow a walk with U[-gamma_step, gamma_step] increments
floored at gamma0. Each batch holds a uniform random number of samples in
[n_min, n_max].

Randomness comes from four independent Philox streams derived from the seed
(spawn keys 0..3: mean walk, std walk, batch sizes, samples), so adding
samples never perturbs the parameter walks. Uniforms are built from the top
53 bits of each 64-bit draw and Gaussian samples use the inverse normal CDF,
so every draw consumes exactly one 64-bit word.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from swkde.gaussian import GaussianParams
from swkde.tracker import Batch

FORMAT_NAME = "swkde-dataset"
FORMAT_VERSION = 1

MU_STREAM, GAMMA_STREAM, SIZE_STREAM, SAMPLE_STREAM = range(4)


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    num_batches: int = 100
    mu0: float = 0.0
    gamma0: float = 1.0
    mu_step: float = 1.0
    gamma_step: float = 0.2
    n_min: int = 3
    n_max: int = 20
    start_at_origin: bool = False

    def __post_init__(self):
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if int(self.num_batches) != self.num_batches or self.num_batches < 1:
            raise ValueError(f"num_batches must be a positive integer, got {self.num_batches!r}")
        if not math.isfinite(self.mu0):
            raise ValueError("mu0 must be finite")
        if not (math.isfinite(self.gamma0) and self.gamma0 > 0):
            raise ValueError(f"gamma0 must be > 0, got {self.gamma0!r}")
        # zero step widths give a stationary dataset; negative ones are meaningless
        if not (math.isfinite(self.mu_step) and self.mu_step >= 0):
            raise ValueError(f"mu_step must be >= 0, got {self.mu_step!r}")
        if not (math.isfinite(self.gamma_step) and self.gamma_step >= 0):
            raise ValueError(f"gamma_step must be >= 0, got {self.gamma_step!r}")
        if int(self.n_min) != self.n_min or self.n_min < 1:
            raise ValueError(f"n_min must be a positive integer, got {self.n_min!r}")
        if int(self.n_max) != self.n_max or self.n_max < self.n_min:
            raise ValueError(f"n_max must be an integer >= n_min, got {self.n_max!r}")


@dataclass(frozen=True)
class Dataset:
    config: GeneratorConfig
    batches: tuple

    def __len__(self) -> int:
        return len(self.batches)


def stream(seed: int, key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(key,))))


def uniforms(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform draws on the open interval (0, 1), one 64-bit word each."""
    bits = rng.integers(0, 2**64, size=size, dtype=np.uint64, endpoint=False)
    return ((bits >> np.uint64(11)).astype(float) + 0.5) * 2.0**-53


def parameter_walk(cfg: GeneratorConfig) -> tuple[np.ndarray, np.ndarray]:
    m = cfg.num_batches
    du = 2.0 * uniforms(stream(cfg.seed, MU_STREAM), m) - 1.0
    dg = 2.0 * uniforms(stream(cfg.seed, GAMMA_STREAM), m) - 1.0
    mus, gammas = np.empty(m), np.empty(m)
    mu, gamma = cfg.mu0, cfg.gamma0
    for t in range(m):
        if t > 0 or not cfg.start_at_origin:
            mu = mu + cfg.mu_step * du[t]
            gamma = max(gamma + cfg.gamma_step * dg[t], cfg.gamma0)
        mus[t], gammas[t] = mu, gamma
    return mus, gammas


def generate(cfg: GeneratorConfig) -> Dataset:
    mus, gammas = parameter_walk(cfg)
    span = cfg.n_max - cfg.n_min + 1
    sizes = cfg.n_min + np.floor(uniforms(stream(cfg.seed, SIZE_STREAM), cfg.num_batches) * span)
    sizes = sizes.astype(int)
    z = ndtri(uniforms(stream(cfg.seed, SAMPLE_STREAM), int(sizes.sum())))

    batches = []
    start = 0
    for t, (mu, gamma, n) in enumerate(zip(mus, gammas, sizes), start=1):
        vals = mu + gamma * z[start : start + n]
        start += n
        batches.append(Batch(t, vals, GaussianParams(mu, gamma)))
    return Dataset(cfg, tuple(batches))


def save_dataset(d: Dataset, path) -> None:
    lines = [json.dumps({"format": FORMAT_NAME, "version": FORMAT_VERSION, "config": asdict(d.config)})]
    for b in d.batches:
        if b.true_params is None:
            raise ValueError(f"batch {b.t} has no true parameters to save")
        rec = {
            "t": b.t,
            "true_mu": b.true_params.mu,
            "true_gamma": b.true_params.sigma,
            "values": [float(v) for v in b.values],
        }
        lines.append(json.dumps(rec))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _field(rec: dict, name: str, lineno: int):
    if name not in rec:
        raise DatasetFormatError(f"line {lineno}: missing required field {name!r}")
    return rec[name]


def load_dataset(path) -> Dataset:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise DatasetFormatError("line 1: empty dataset file")

    def parse(line, lineno):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(rec, dict):
            raise DatasetFormatError(f"line {lineno}: expected a JSON object")
        return rec

    header = parse(lines[0], 1)
    if _field(header, "format", 1) != FORMAT_NAME:
        raise DatasetFormatError(f"line 1: not a {FORMAT_NAME} file")
    if _field(header, "version", 1) != FORMAT_VERSION:
        raise DatasetFormatError(f"line 1: unsupported format version {header['version']!r}")
    raw_cfg = _field(header, "config", 1)
    known = {f.name for f in fields(GeneratorConfig)}
    try:
        cfg = GeneratorConfig(**{k: v for k, v in raw_cfg.items() if k in known})
    except (TypeError, ValueError) as exc:
        raise DatasetFormatError(f"line 1: bad config ({exc})") from None

    batches = []
    for lineno, line in enumerate(lines[1:], start=2):
        rec = parse(line, lineno)
        t = _field(rec, "t", lineno)
        values = _field(rec, "values", lineno)
        mu = _field(rec, "true_mu", lineno)
        gamma = _field(rec, "true_gamma", lineno)
        try:
            batches.append(Batch(t, values, GaussianParams(mu, gamma)))
        except (TypeError, ValueError) as exc:
            raise DatasetFormatError(f"line {lineno}: {exc}") from None
    return Dataset(cfg, tuple(batches))
