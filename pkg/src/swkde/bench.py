"""Tracking runs, Monte-Carlo sweeps and result emission."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from swkde.gaussian import GaussianParams
from swkde.mise import MixtureDensity, build_components, closed_form_ise, exact_mise
from swkde.synthgen import Dataset, GeneratorConfig, generate
from swkde.tracker import SCHEMES, Tracker, TrackerConfig

DEFAULT_WINDOWS = (1, 2, 3, 4, 5, 6, 7, 8, 10)
DEFAULT_BANDWIDTHS = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5)

STEP_COLUMNS = ("t", "scheme", "window", "bandwidth", "ise", "exact_mise", "wall_nanos")
SUMMARY_COLUMNS = ("scheme", "sweep_variable", "sweep_value", "mean_error", "std_error", "runs")


class TrackingError(RuntimeError):
    pass


@dataclass(frozen=True)
class StepRecord:
    t: int
    scheme: str
    window: int
    bandwidth: float
    ise: float
    exact_mise: Optional[float]
    alpha: tuple
    wall_nanos: int


@dataclass(frozen=True)
class SweepSummary:
    scheme: str
    sweep_variable: str
    sweep_value: float
    mean_error: float
    std_error: float
    runs: int


def run_tracking(dataset: Dataset, cfg: TrackerConfig) -> list[StepRecord]:
    """Push every batch, weight the window and score the estimate against the truth.

    In oracle mode the closed-form MISE of the chosen weights is recorded too.
    """
    if len(dataset.batches) == 0:
        raise ValueError("dataset has no batches")
    tracker = Tracker(cfg)
    records = []
    for b in dataset.batches:
        if b.true_params is None:
            raise TrackingError(f"batch {b.t}: true parameters required to score the estimate")
        try:
            start = time.perf_counter_ns()
            tracker.push(b)
            alpha = tracker.weights_for()
            h = tracker.current_mixture(alpha)
            wall = time.perf_counter_ns() - start
            ise = max(closed_form_ise(h, b.true_params), 0.0)
            mise = None
            if cfg.param_mode == "oracle":
                c = build_components(tracker.summaries, b.true_params, cfg.bandwidth)
                mise = max(exact_mise(c, alpha), 0.0)
        except Exception as exc:
            raise TrackingError(f"batch {b.t}: {exc}") from exc
        records.append(
            StepRecord(b.t, cfg.scheme, cfg.window, cfg.bandwidth, ise, mise, tuple(alpha.tolist()), wall)
        )
    return records


def time_averaged_error(records: Sequence[StepRecord], window: int) -> float:
    """Mean ISE over steps whose window is full (the first window - 1 steps are warm-up)."""
    kept = [r.ise for r in records[window - 1 :]]
    if not kept:
        raise ValueError(f"dataset of {len(records)} batches is shorter than the window {window}")
    return float(np.mean(kept))


def _seed_errors(seed, gen_base, variable, values, schemes, base):
    dataset = generate(replace(gen_base, seed=seed))
    out = {}
    for scheme in schemes:
        for v in values:
            if variable == "window":
                cfg = replace(base, scheme=scheme, window=int(v))
            else:
                cfg = replace(base, scheme=scheme, bandwidth=float(v))
            try:
                out[scheme, v] = time_averaged_error(run_tracking(dataset, cfg), cfg.window)
            except Exception as exc:
                raise TrackingError(f"seed {seed}, scheme {scheme}, {variable} {v}: {exc}") from exc
    return out


def _sweep(seeds, variable, values, base, gen_base, schemes, jobs):
    seeds = list(seeds)
    values = list(values)
    if not seeds or not values:
        raise ValueError("need at least one seed and one sweep value")
    args = [(s, gen_base, variable, values, schemes, base) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_seed = list(pool.map(_seed_errors, *zip(*args)))
    else:
        per_seed = [_seed_errors(*a) for a in args]

    summaries = []
    for scheme in schemes:
        for v in values:
            errs = np.array([res[scheme, v] for res in per_seed])
            std = float(np.std(errs, ddof=1)) if errs.size > 1 else 0.0
            summaries.append(SweepSummary(scheme, variable, float(v), float(np.mean(errs)), std, errs.size))
    return summaries


def sweep_window(
    seeds,
    windows=DEFAULT_WINDOWS,
    base: TrackerConfig = TrackerConfig(bandwidth=1.0),
    gen_base: GeneratorConfig = GeneratorConfig(),
    schemes=SCHEMES,
    jobs: int = 1,
) -> list[SweepSummary]:
    """Error versus window size; a fresh dataset per seed, bandwidth fixed by ``base``."""
    return _sweep(seeds, "window", windows, base, gen_base, tuple(schemes), jobs)


def sweep_bandwidth(
    seeds,
    bandwidths=DEFAULT_BANDWIDTHS,
    base: TrackerConfig = TrackerConfig(window=5),
    gen_base: GeneratorConfig = GeneratorConfig(),
    schemes=SCHEMES,
    jobs: int = 1,
) -> list[SweepSummary]:
    """Error versus kernel bandwidth at the window size fixed by ``base``."""
    return _sweep(seeds, "bandwidth", bandwidths, base, gen_base, tuple(schemes), jobs)


def quadrature_ise(h: MixtureDensity, target: GaussianParams, points: int = 20001) -> float:
    """Composite Simpson estimate of the ISE; test oracle for :func:`closed_form_ise`."""
    if points < 3 or points % 2 == 0:
        raise ValueError(f"Simpson needs an odd number of points >= 3, got {points}")
    spread = 10.0 * max(float(h.scales.max()), target.sigma)
    lo = min(float(h.means.min()), target.mu) - spread
    hi = max(float(h.means.max()), target.mu) + spread
    x = np.linspace(lo, hi, points)
    return float(simpson((h(x) - target.pdf(x)) ** 2, x=x))


def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(float(v)) if isinstance(v, float) else str(v)


def _as_dict(item) -> dict:
    d = asdict(item)
    if "alpha" in d:
        d["alpha"] = list(d["alpha"])
    return d


def render_results(items: Sequence, fmt: str = "csv") -> str:
    items = list(items)
    if fmt == "json":
        return json.dumps([_as_dict(i) for i in items], indent=1) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown output format {fmt!r}")
    if items and isinstance(items[0], StepRecord):
        columns = STEP_COLUMNS
    elif not items or isinstance(items[0], SweepSummary):
        columns = SUMMARY_COLUMNS
    else:
        raise TypeError(f"cannot emit {type(items[0]).__name__}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for i in items:
        writer.writerow([_fmt(getattr(i, c)) for c in columns])
    return buf.getvalue()


def emit_results(items: Sequence, fmt: str, path) -> None:
    Path(path).write_text(render_results(items, fmt), encoding="utf-8", newline="\n")


def load_summaries(path) -> list[SweepSummary]:
    return [SweepSummary(**d) for d in json.loads(Path(path).read_text(encoding="utf-8"))]
