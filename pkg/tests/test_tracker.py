import math

import numpy as np
import pytest

from oracles import npdf, simpson
from swkde.gaussian import GaussianParams
from swkde.mise import BatchSummary, closed_form_ise
from swkde.tracker import (
    Batch,
    DegenerateBatchError,
    OutOfOrderError,
    ParamModeError,
    Tracker,
    TrackerConfig,
    summarize_batch,
)


def make_tracker(window=3, bandwidth=1.0, scheme="average", mode="plugin", beta=0.1):
    return Tracker(TrackerConfig(window, bandwidth, scheme, beta, mode))


def test_plugin_zero_variance_is_floored():
    s = summarize_batch(Batch(1, [1, 1, 1, 1]), "plugin")
    assert s == BatchSummary(1.0, 1e-8, 4)


def test_plugin_bessel_corrected():
    s = summarize_batch(Batch(1, [0, 2]), "plugin")
    assert s.mu == 1.0
    assert s.gamma == pytest.approx(math.sqrt(2), rel=1e-15)
    assert s.n == 2


def test_oracle_passthrough():
    s = summarize_batch(Batch(1, [9, 9, 9], GaussianParams(3, 0.5)), "oracle")
    assert s == BatchSummary(3.0, 0.5, 3)


def test_summary_errors():
    with pytest.raises(DegenerateBatchError):
        summarize_batch(Batch(1, [1.0]), "plugin")
    with pytest.raises(ParamModeError):
        summarize_batch(Batch(1, [1.0, 2.0]), "oracle")
    with pytest.raises(ParamModeError):
        summarize_batch(Batch(1, [1.0, 2.0]), "bogus")


@pytest.mark.parametrize("values", [[], [1.0, math.nan], [math.inf]])
def test_batch_validation(values):
    with pytest.raises(ValueError):
        Batch(0, values)


@pytest.mark.parametrize(
    "kwargs",
    [dict(window=0), dict(bandwidth=0.0), dict(scheme="median"), dict(beta=1.0), dict(param_mode="x"), dict(window=65)],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        TrackerConfig(**kwargs)


def test_window_discipline():
    tr = make_tracker(window=3)
    assert len(tr.push(Batch(1, [0.0, 1.0]))) == 1
    for t in range(2, 6):
        tr.push(Batch(t, [t, t + 1.0]))
        assert len(tr) == min(t, 3)
    assert [b.t for b in tr.batches] == [3, 4, 5]
    assert [s.mu for s in tr.summaries] == [3.5, 4.5, 5.5]


def test_out_of_order_rejected():
    tr = make_tracker()
    tr.push(Batch(5, [0.0, 1.0]))
    with pytest.raises(OutOfOrderError):
        tr.push(Batch(2, [0.0, 1.0]))
    with pytest.raises(OutOfOrderError):
        tr.push(Batch(5, [0.0, 1.0]))


@pytest.mark.parametrize("scheme", ["current", "average", "exponential", "dynamic"])
def test_single_batch_weight_is_one(scheme):
    tr = make_tracker(scheme=scheme)
    tr.push(Batch(1, [0.0, 0.5, 2.0]))
    np.testing.assert_allclose(tr.weights_for(), [1.0])


def test_average_full_window():
    tr = make_tracker(window=4)
    for t in range(1, 7):
        tr.push(Batch(t, [0.0, 1.0]))
    np.testing.assert_array_equal(tr.weights_for(), [0.25] * 4)


def test_warmup_uses_available_batches():
    tr = make_tracker(window=5, scheme="exponential")
    tr.push(Batch(1, [0.0, 1.0]))
    tr.push(Batch(2, [0.0, 1.0]))
    np.testing.assert_allclose(tr.weights_for(), [0.9, 0.1])


def test_dynamic_identical_batches():
    g = GaussianParams(0.5, 1.2)
    tr = make_tracker(window=2, scheme="dynamic", mode="oracle")
    tr.push(Batch(1, [0, 1, 2], g))
    tr.push(Batch(2, [3, 4, 5], g))
    np.testing.assert_allclose(tr.weights_for(g), [0.5, 0.5], atol=1e-9)
    np.testing.assert_allclose(tr.weights_for(), [0.5, 0.5], atol=1e-9)
    np.testing.assert_allclose(tr.weights_for(BatchSummary(0.5, 1.2, 3)), [0.5, 0.5], atol=1e-9)


def test_default_target_by_mode():
    tr = make_tracker(mode="oracle")
    tr.push(Batch(1, [0.0, 2.0], GaussianParams(7, 3)))
    assert tr.default_target() == GaussianParams(7, 3)
    tr = make_tracker(mode="plugin")
    tr.push(Batch(1, [0.0, 2.0], GaussianParams(7, 3)))
    assert tr.default_target() == GaussianParams(1.0, math.sqrt(2))


def test_empty_tracker_errors():
    tr = make_tracker()
    with pytest.raises(ValueError):
        tr.weights_for()


def test_estimate_density_examples():
    tr = make_tracker(window=1, mode="oracle")
    tr.push(Batch(1, [0.0], GaussianParams(0, 1)))
    assert tr.estimate_density([1.0], 0.0) == pytest.approx(0.3989423, abs=1e-7)
    tr = make_tracker(window=1)
    tr.push(Batch(1, [-1.0, 1.0]))
    assert tr.estimate_density([1.0], 0.0) == pytest.approx(0.2419707, abs=1e-7)


def test_estimate_density_dimension_mismatch():
    tr = make_tracker()
    tr.push(Batch(1, [0.0, 1.0]))
    with pytest.raises(ValueError):
        tr.estimate_density([0.5, 0.5], 0.0)


def filled_tracker(rng, window=4, bandwidth=0.7, scheme="dynamic"):
    tr = make_tracker(window=window, bandwidth=bandwidth, scheme=scheme)
    for t in range(1, 7):
        tr.push(Batch(t, rng.normal(t * 0.3, 1.2, int(rng.integers(3, 21)))))
    return tr


def test_current_mixture_restates_estimator():
    tr = make_tracker(window=1)
    tr.push(Batch(1, [0.0, 2.0]))
    h = tr.current_mixture([1.0])
    assert h.components == [(0.5, GaussianParams(0, 1)), (0.5, GaussianParams(2, 1))]


def test_mixture_matches_pointwise_and_integrates():
    rng = np.random.default_rng(21)
    tr = filled_tracker(rng)
    alpha = tr.weights_for()
    h = tr.current_mixture(alpha)
    assert h.weights.sum() == pytest.approx(1.0, abs=1e-12)
    xs = rng.uniform(-4, 6, 20)
    direct = [
        sum(a / b.n * np.sum(npdf(x, b.values, 0.7)) for a, b in zip(alpha, tr.batches)) for x in xs
    ]
    np.testing.assert_allclose(tr.estimate_density(alpha, xs), direct, rtol=1e-12, atol=0)
    lo = min(b.values.min() for b in tr.batches) - 7
    hi = max(b.values.max() for b in tr.batches) + 7
    assert simpson(lambda x: tr.estimate_density(alpha, x), lo, hi) == pytest.approx(1.0, abs=1e-6)
    assert np.all(tr.estimate_density(alpha, np.linspace(lo, hi, 501)) >= 0)


def test_mixture_ise_matches_quadrature():
    rng = np.random.default_rng(22)
    tr = filled_tracker(rng, scheme="average")
    target = GaussianParams(1.5, 1.3)
    h = tr.current_mixture(tr.weights_for())
    ref = simpson(lambda x: (h(x) - npdf(x, 1.5, 1.3)) ** 2, h.means.min() - 12, h.means.max() + 12)
    assert abs(closed_form_ise(h, target) - ref) < 1e-9


def test_plugin_converges_to_oracle():
    rng = np.random.default_rng(23)
    hits = 0
    for _ in range(200):
        mu, gamma = rng.uniform(-5, 5), rng.uniform(1, 3)
        b = Batch(1, rng.normal(mu, gamma, 10_000), GaussianParams(mu, gamma))
        s = summarize_batch(b, "plugin")
        hits += abs(s.mu - mu) <= 5 * gamma / 100
        assert s.gamma == pytest.approx(gamma, rel=0.05)
    assert hits >= 198
