"""Distribution primitives against closed-form oracles and invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convex_tail import (
    AtomicMixture,
    CollapsedTail,
    Distribution,
    DomainError,
    Empirical,
    EmptyTailError,
    Exponential,
    HingeFunction,
    LogNormal,
    Normal,
    Pareto,
    QuantileGrid,
    SpecParseError,
    Uniform,
    parse_distribution,
    quad_unit,
)

INV_E = math.exp(-1.0)


def grid_from(d, n=257, lo=1e-6, hi=1.0 - 1e-6):
    us = np.linspace(lo, hi, n)
    return QuantileGrid(us, np.asarray(d.quantile(us)))


def family():
    """One representative of every kind, reused by the invariant tests."""
    exp = Exponential(1.0)
    return [
        Normal(0.0, 1.0),
        Normal(-2.0, 0.5),
        Exponential(1.0),
        Exponential(2.5),
        Uniform(0.0, 1.0),
        Uniform(-1.0, 3.0),
        Pareto(2.0, 1.0),
        Pareto(1.5, 0.5),
        LogNormal(0.0, 1.0),
        Empirical([3.0, 1.0, 2.0, 2.0, 5.0]),
        AtomicMixture([(0.0, 0.5), (1.0, 0.5)]),
        AtomicMixture([(1.0, 0.2), (2.0, 0.3), (4.0, 0.5)]),
        grid_from(exp),
        CollapsedTail(exp, 1.0),
    ]


# ---------------------------------------------------------------------------
# frozen examples
# ---------------------------------------------------------------------------


def test_quantile_examples():
    assert Uniform(0.0, 1.0).quantile(0.25) == pytest.approx(0.25, abs=0)
    # analytic inversion of 1 - exp(-t)
    assert Exponential(1.0).quantile(1.0 - INV_E) == pytest.approx(1.0, rel=1e-12)
    xs = np.linspace(0.05, 0.95, 19)
    assert Exponential(1.0).quantile(xs) == pytest.approx(-np.log(1.0 - xs))
    # left continuity at the jump
    assert AtomicMixture([(0.0, 0.5), (1.0, 0.5)]).quantile(0.5) == 0.0


def test_quantile_domain():
    d = Exponential(1.0)
    for bad in (0.0, 1.0, -0.5, 1.5):
        with pytest.raises(DomainError):
            d.quantile(bad)
    with pytest.raises(DomainError):
        d.quantile(np.array([0.5, 1.0]))


def test_upper_quantile_examples():
    xs = np.linspace(0.05, 0.95, 19)
    assert Exponential(1.0).upper_quantile(xs) == pytest.approx(-np.log(xs))
    assert Pareto(2.0, 1.0).upper_quantile(xs) == pytest.approx(xs ** -0.5)
    assert Uniform(0.0, 1.0).upper_quantile(0.5) == pytest.approx(0.5)


def test_upper_quantile_deep_tail():
    # cancellation-free forms must survive x far below machine epsilon
    assert Pareto(2.0, 1.0).upper_quantile(1e-30) == pytest.approx(1e15, rel=1e-12)
    assert Exponential(2.0).upper_quantile(1e-200) == pytest.approx(
        200 * math.log(10) / 2.0, rel=1e-12)
    # atomic laws just return the top atom
    mix = AtomicMixture([(0.0, 0.5), (1.0, 0.5)])
    assert mix.upper_quantile(1e-30) == 1.0


def test_cdf_examples():
    assert Normal(0.0, 1.0).cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert Exponential(1.0).cdf(1.0) == pytest.approx(1.0 - INV_E, rel=1e-14)
    assert Empirical([1.0, 2.0, 3.0]).cdf(2.0) == pytest.approx(2.0 / 3.0)


def test_tail_expectation_examples():
    te = Exponential(1.0).tail_expectation(1.0, strict=True)
    assert te.value == pytest.approx(2.0, rel=1e-12)  # memorylessness: s + mean
    assert te.tail_prob == pytest.approx(INV_E, rel=1e-12)

    te = Uniform(0.0, 1.0).tail_expectation(0.5, strict=True)
    assert te.value == pytest.approx(0.75, rel=1e-12)
    assert te.tail_prob == pytest.approx(0.5, rel=1e-12)

    te = AtomicMixture([(0.0, 0.5), (1.0, 0.5)]).tail_expectation(1.0, strict=False)
    assert te.value == pytest.approx(1.0, abs=0)
    assert te.tail_prob == pytest.approx(0.5, abs=0)

    with pytest.raises(EmptyTailError):
        AtomicMixture([(0.0, 0.5), (1.0, 0.5)]).tail_expectation(1.0, strict=True)
    with pytest.raises(EmptyTailError):
        Uniform(0.0, 1.0).tail_expectation(2.0)


def test_stop_loss_examples():
    ts = np.linspace(0.0, 5.0, 26)
    assert Exponential(1.0).stop_loss(ts) == pytest.approx(np.exp(-ts), rel=1e-12)
    assert Uniform(0.0, 1.0).stop_loss(0.0) == pytest.approx(0.5)
    # half-normal mean
    assert Normal(0.0, 1.0).stop_loss(0.0) == pytest.approx(
        1.0 / math.sqrt(2.0 * math.pi), rel=1e-12)


def test_upper_mean_examples():
    xs = np.linspace(0.02, 0.98, 49)
    assert Uniform(0.0, 1.0).upper_mean(xs) == pytest.approx((1.0 + xs) / 2.0)
    # int of -log(1-u) from x to 1 is (1-x)(1 - log(1-x))
    assert Exponential(1.0).upper_mean(xs) == pytest.approx(1.0 - np.log(1.0 - xs))
    assert Pareto(2.0, 1.0).upper_mean(xs) == pytest.approx(2.0 / np.sqrt(1.0 - xs))


def test_sample_examples():
    with pytest.raises(DomainError):
        Uniform(0.0, 1.0).sample(0, seed=1)
    s = Uniform(0.0, 1.0).sample(10 ** 5, seed=42)
    assert abs(s.mean() - 0.5) < 0.01
    s = Exponential(1.0).sample(10 ** 5, seed=42)
    assert abs(s.mean() - 1.0) < 0.02
    # determinism
    again = Exponential(1.0).sample(10 ** 5, seed=42)
    assert np.array_equal(s, again)


# ---------------------------------------------------------------------------
# invariants across every kind
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("d", family(), ids=lambda d: type(d).__name__)
def test_quantile_monotone(d):
    xs = np.linspace(1e-4, 1.0 - 1e-4, 401)
    q = np.asarray(d.quantile(xs))
    assert np.all(np.diff(q) >= -1e-12)
    uq = np.asarray(d.upper_quantile(xs))
    assert np.all(np.diff(uq) <= 1e-12)


@pytest.mark.parametrize("d", family(), ids=lambda d: type(d).__name__)
def test_stop_loss_shape(d):
    lo, hi = d.support()
    lo = lo if math.isfinite(lo) else float(d.quantile(1e-9))
    hi = hi if math.isfinite(hi) else float(d.quantile(1.0 - 1e-9))
    ts = np.linspace(lo - 1.0, hi + 1.0, 101)
    sl = np.asarray(d.stop_loss(ts))
    assert np.all(sl >= -1e-12)
    assert np.all(np.diff(sl) <= 1e-9 * max(1.0, float(sl.max())))
    # convexity: second differences of a convex function are non-negative
    d2 = sl[:-2] - 2.0 * sl[1:-1] + sl[2:]
    assert np.all(d2 >= -1e-9 * max(1.0, float(sl.max())))
    # below the support the slope is -1: value mean - t
    assert d.stop_loss(lo - 1.0) == pytest.approx(d.mean() - (lo - 1.0), rel=1e-9)


@pytest.mark.parametrize(
    "d", [d for d in family() if d.is_non_atomic()], ids=lambda d: type(d).__name__)
def test_stop_loss_matches_quadrature(d):
    # independent route: E(Y-t)+ = int_0^{1-F(t)} (H*(v) - t) dv by quadrature
    lo, hi = d.support()
    lo = lo if math.isfinite(lo) else float(d.quantile(1e-7))
    hi = hi if math.isfinite(hi) else float(d.quantile(1.0 - 1e-7))
    for t in np.linspace(lo, hi, 50):
        width = 1.0 - float(d.cdf(t))
        if width <= 0.0:
            expected = 0.0
        else:
            expected = quad_unit(lambda v: float(d.upper_quantile(v)) - t, 0.0, width)
        assert float(d.stop_loss(t)) == pytest.approx(expected, rel=1e-7, abs=1e-10)


@pytest.mark.parametrize(
    "d", [d for d in family() if not d.is_non_atomic()], ids=lambda d: type(d).__name__)
def test_stop_loss_matches_atom_sum(d):
    # oracle: direct sum over atoms, plus the continuous part for mixed laws
    atoms = d.atoms()
    atom_mass = math.fsum(p for _, p in atoms)
    for t in np.linspace(-1.0, d.support()[1] + 1.0, 40):
        atom_part = math.fsum(p * max(v - t, 0.0) for v, p in atoms)
        if atom_mass >= 1.0 - 1e-9:
            expected = atom_part
            assert float(d.stop_loss(t)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("d", family(), ids=lambda d: type(d).__name__)
def test_upper_mean_dominates_quantile(d):
    xs = np.linspace(0.01, 0.99, 99)
    um = np.asarray(d.upper_mean(xs))
    q = np.asarray(d.quantile(xs))
    assert np.all(um >= q - 1e-9 * np.maximum(1.0, np.abs(q)))


@pytest.mark.parametrize(
    "d",
    [Normal(0.0, 1.0), Normal(3.0, 2.0), Exponential(0.7), Uniform(-1.0, 4.0),
     Pareto(2.5, 1.3), LogNormal(0.2, 0.8)],
    ids=lambda d: f"{type(d).__name__}",
)
def test_inverse_transform_round_trip(d):
    xs = np.linspace(0.005, 0.995, 100)
    back = np.asarray(d.cdf(np.asarray(d.quantile(xs))))
    assert back == pytest.approx(xs, abs=1e-9)


@pytest.mark.parametrize(
    "d",
    [Normal(0.0, 1.0), Exponential(1.0), Uniform(0.0, 1.0), Pareto(3.0, 2.0),
     LogNormal(0.0, 0.5)],
    ids=lambda d: f"{type(d).__name__}",
)
def test_total_expectation_decomposition(d):
    # E(Y | Y > s) P{Y > s} + E(Y | Y <= s) P{Y <= s} = E Y, with the lower
    # part integrated independently through the quantile
    for q_level in (0.2, 0.5, 0.8, 0.95):
        s = float(d.quantile(q_level))
        te = d.tail_expectation(s, strict=True)
        lower = quad_unit(lambda u: float(d.quantile(u)), 0.0, 1.0 - te.tail_prob)
        total = te.value * te.tail_prob + lower
        assert total == pytest.approx(d.mean(), rel=1e-9, abs=1e-9)


def test_upper_mean_equals_conditional_mean_when_strictly_increasing():
    d = Exponential(1.0)
    for x in (0.1, 0.5, 0.9):
        s = float(d.quantile(x))
        assert d.upper_mean(x) == pytest.approx(
            d.tail_expectation(s, strict=True).value, rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(mu=st.floats(-5, 5), sigma=st.floats(0.1, 4), x=st.floats(0.001, 0.999),
       y=st.floats(0.001, 0.999))
def test_normal_quantile_monotone_property(mu, sigma, x, y):
    d = Normal(mu, sigma)
    if x <= y:
        assert d.quantile(x) <= d.quantile(y) + 1e-12
    assert d.cdf(d.quantile(x)) == pytest.approx(x, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(rate=st.floats(0.1, 10), t=st.floats(-5, 50))
def test_exponential_stop_loss_property(rate, t):
    d = Exponential(rate)
    expected = (1.0 / rate - t) if t <= 0 else math.exp(-rate * t) / rate
    assert d.stop_loss(t) == pytest.approx(expected, rel=1e-12, abs=1e-300)


# ---------------------------------------------------------------------------
# kind-specific behaviour
# ---------------------------------------------------------------------------


def test_construction_rejects_infinite_tail_mean():
    with pytest.raises(DomainError):
        Pareto(1.0, 1.0)
    with pytest.raises(DomainError):
        Pareto(0.5, 1.0)
    with pytest.raises(DomainError):
        Normal(0.0, 0.0)
    with pytest.raises(DomainError):
        Uniform(1.0, 1.0)


def test_atomic_mixture_validation():
    with pytest.raises(DomainError):
        AtomicMixture([(0.0, 0.5), (1.0, 0.6)])
    with pytest.raises(DomainError):
        AtomicMixture([(0.0, -0.1), (1.0, 1.1)])
    # merging of duplicate values
    mix = AtomicMixture([(1.0, 0.25), (1.0, 0.25), (2.0, 0.5)])
    assert mix.atoms() == [(1.0, 0.5), (2.0, 0.5)]


def test_empirical_step_quantile():
    d = Empirical([1.0, 2.0, 3.0])
    # order statistic j on ((j-1)/n, j/n]
    assert d.quantile(1.0 / 3.0) == 1.0
    assert d.quantile(1.0 / 3.0 + 1e-12) == 2.0
    assert d.quantile(2.0 / 3.0) == 2.0
    assert d.quantile(0.99) == 3.0
    assert d.cdf_left(2.0) == pytest.approx(1.0 / 3.0)
    assert d.mean() == pytest.approx(2.0)


def test_quantile_grid_matches_source():
    d = Exponential(1.0)
    g = grid_from(d, n=4097)
    xs = np.linspace(0.01, 0.99, 37)
    assert np.asarray(g.quantile(xs)) == pytest.approx(
        np.asarray(d.quantile(xs)), rel=1e-6)
    assert g.upper_tail_integral(0.5) == pytest.approx(
        d.upper_tail_integral(0.5), rel=1e-6)
    assert g.mean() == pytest.approx(1.0, rel=1e-4)
    assert g.is_non_atomic()


def test_quantile_grid_atoms_and_cdf():
    # flat run between knots encodes an atom
    g = QuantileGrid([0.2, 0.4, 0.6, 0.8], [1.0, 2.0, 2.0, 3.0])
    atoms = dict(g.atoms())
    assert atoms[2.0] == pytest.approx(0.2)
    assert not g.is_non_atomic()
    assert g.cdf(2.0) == pytest.approx(0.6)       # right end of the flat run
    assert g.cdf_left(2.0) == pytest.approx(0.4)  # left end of the flat run
    with pytest.raises(DomainError):
        QuantileGrid([0.2, 0.4], [2.0, 1.0])      # decreasing ordinates
    with pytest.raises(DomainError):
        QuantileGrid([0.4, 0.2], [1.0, 2.0])      # unordered abscissas
    with pytest.raises(DomainError):
        QuantileGrid([0.2, 0.4], [1.0, 2.0], interpolation="cubic")


def test_collapsed_tail_exactness():
    base = Exponential(1.0)
    d = CollapsedTail(base, 1.0)
    assert d.atom_value == pytest.approx(2.0, rel=1e-12)
    assert d.atom_prob == pytest.approx(INV_E, rel=1e-12)
    # below the cut the law is untouched
    xs = np.linspace(0.01, 1.0 - INV_E - 1e-6, 20)
    assert np.asarray(d.quantile(xs)) == pytest.approx(np.asarray(base.quantile(xs)))
    # above it everything sits on the atom
    assert d.quantile(0.99) == d.atom_value
    assert d.mean() == pytest.approx(base.mean(), rel=1e-12)
    assert 1.0 - d.cdf_left(d.atom_value) == pytest.approx(INV_E, abs=1e-15)


def test_generic_quadrature_fallback_subclass():
    class PlainExponential(Distribution):
        """Deliberately minimal subclass exercising the base-class paths."""

        def quantile(self, x):
            arr = np.asarray(x, dtype=float)
            return -np.log1p(-arr)

        def cdf(self, t):
            arr = np.asarray(t, dtype=float)
            return np.where(arr < 0.0, 0.0, -np.expm1(-np.maximum(arr, 0.0)))

        def mean(self):
            return 1.0

        def support(self):
            return (0.0, math.inf)

    d = PlainExponential()
    ref = Exponential(1.0)
    for x in (0.0, 0.3, 0.9, 0.999):
        assert d.upper_tail_integral(x) == pytest.approx(
            ref.upper_tail_integral(x), rel=1e-9)
    assert d.stop_loss(2.0) == pytest.approx(math.exp(-2.0), rel=1e-8)
    te = d.tail_expectation(1.0, strict=True)
    assert te.value == pytest.approx(2.0, rel=1e-9)


def test_barely_integrable_law_is_refused_by_quadrature():
    from convex_tail.errors import NumericalError

    class BlowUp(Distribution):
        """Upper quantile 1/(v (1 - ln v)^2): integrable, mean 1, but the
        tail converges too slowly for the guarded quadrature."""

        def quantile(self, x):
            arr = np.asarray(x, dtype=float)
            v = 1.0 - arr
            return 1.0 / (v * np.square(1.0 - np.log(v)))

        def upper_quantile(self, x):
            arr = np.asarray(x, dtype=float)
            return 1.0 / (arr * np.square(1.0 - np.log(arr)))

        def cdf(self, t):
            raise NotImplementedError

        def mean(self):
            return 1.0

        def support(self):
            return (math.exp(-1.0) / 4.0, math.inf)

    with pytest.raises(NumericalError):
        BlowUp().upper_tail_integral(0.5)


def test_hinge_function():
    h = HingeFunction(t=2.0, a=4.0)
    assert h.kink == pytest.approx(1.75)
    assert h(2.0) == 1.0
    assert h(1.75) == 0.0
    assert h(1.0) == 0.0
    assert h(3.0) == pytest.approx(5.0)
    with pytest.raises(DomainError):
        HingeFunction(t=0.0, a=0.0)


# ---------------------------------------------------------------------------
# spec-string parsing
# ---------------------------------------------------------------------------


def test_parse_parametric_specs():
    assert isinstance(parse_distribution("normal:0,1"), Normal)
    assert isinstance(parse_distribution("exp:1"), Exponential)
    assert isinstance(parse_distribution("uniform:0,1"), Uniform)
    assert isinstance(parse_distribution("pareto:2,1"), Pareto)
    assert isinstance(parse_distribution("lognormal:0,1"), LogNormal)
    mix = parse_distribution("atoms:0:0.5,1:0.5")
    assert mix.atoms() == [(0.0, 0.5), (1.0, 0.5)]


def test_parse_file_specs(tmp_path):
    emp = tmp_path / "values.csv"
    emp.write_text("3.0\n1.0\n2.0\n")
    d = parse_distribution(f"empirical:@{emp}")
    assert isinstance(d, Empirical)
    assert d.mean() == pytest.approx(2.0)

    grid = tmp_path / "grid.csv"
    grid.write_text("x,H\n0.25,1.0\n0.5,2.0\n0.75,3.0\n")
    g = parse_distribution(f"grid:@{grid}")
    assert isinstance(g, QuantileGrid)
    assert g.quantile(0.5) == pytest.approx(2.0)


def test_parse_errors():
    for bad in ("nope", "normal:1", "exp:a", "atoms:1", "empirical:file",
                "grid:@/does/not/exist.csv", "mystery:1,2"):
        with pytest.raises(SpecParseError):
            parse_distribution(bad)


def test_atomic_spec_round_trip():
    mix = AtomicMixture([(0.5, 0.25), (1.5, 0.75)])
    again = parse_distribution(mix.spec_string())
    assert again.atoms() == mix.atoms()
