import numpy as np
import pytest

from venuepref.models import Granularity, RegionSelector
from venuepref.preference import (
    PreferenceVector,
    build_preference_vector,
    collect_global_dims,
    gini,
)

from conftest import make_record

BR = RegionSelector(Granularity.COUNTRY, "BR")


def lorenz_gini(x):
    """Independent oracle: trapezoid area under the empirical Lorenz curve,
    g = 1 - 2B with A + B = 1/2."""
    arr = np.sort(np.asarray(x, dtype=float))
    cum = np.insert(np.cumsum(arr), 0, 0.0) / arr.sum()
    # trapezoid quadrature over n equal-width slices of the population axis
    b_area = np.trapezoid(cum, dx=1.0 / arr.size)
    return 1.0 - 2.0 * b_area


def test_perfect_equality():
    for c in (0.3, 1.0, 7.5):
        assert gini([c] * 6) == pytest.approx(0.0, abs=1e-15)


def test_zero_one_pair():
    assert gini([0.0, 1.0]) == pytest.approx(0.5)


def test_one_two_three():
    assert gini([1.0, 2.0, 3.0]) == pytest.approx(2.0 / 9.0)


def test_matches_lorenz_oracle():
    rng = np.random.default_rng(123)
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        x = rng.random(n) * rng.choice([0.1, 1.0, 100.0])
        if x.sum() == 0:
            continue
        assert gini(x) == pytest.approx(lorenz_gini(x), abs=1e-9)


def test_scale_invariance():
    rng = np.random.default_rng(7)
    for _ in range(200):
        x = rng.random(int(rng.integers(2, 30)))
        for c in (1e-6, 3.0, 1e6):
            assert gini(c * x) == pytest.approx(gini(x), abs=1e-12)


def test_permutation_invariance():
    x = [5.0, 1.0, 3.0, 3.0, 0.5]
    assert gini(x) == gini(sorted(x)) == gini(sorted(x, reverse=True))


def test_range_bound():
    rng = np.random.default_rng(99)
    for _ in range(300):
        n = int(rng.integers(1, 25))
        x = rng.random(n)
        g = gini(x)
        assert 0.0 <= g <= 1.0 - 1.0 / n + 1e-12
    # one-point-takes-all approaches the bound
    assert gini([0, 0, 0, 1]) == pytest.approx(0.75)


def test_all_zero_returns_zero_with_warning():
    with pytest.warns(UserWarning, match="all-zero"):
        assert gini([0.0, 0.0]) == 0.0


def test_invalid_input():
    with pytest.raises(ValueError):
        gini([])
    with pytest.raises(ValueError):
        gini([-1.0, 2.0])


def two_region_records():
    records = []
    # BR: Café with venues of unequal |d|, Bar with identical venues
    for venue, males, females in (("c1", 4, 0), ("c2", 1, 1), ("c3", 0, 4)):
        for i in range(males):
            records.append(make_record(user=f"m-{venue}-{i}", gender="male",
                                       venue=venue, subcat="Café"))
        for i in range(females):
            records.append(make_record(user=f"f-{venue}-{i}", gender="female",
                                       venue=venue, subcat="Café"))
    for venue in ("b1", "b2"):
        records.append(make_record(user=f"m-{venue}", gender="male",
                                   venue=venue, subcat="Bar"))
        records.append(make_record(user=f"f-{venue}", gender="female",
                                   venue=venue, subcat="Bar"))
    # US: only Bar
    for venue in ("ub1", "ub2"):
        records.append(make_record(user=f"um-{venue}", gender="male",
                                   venue=venue, subcat="Bar", country="US"))
        records.append(make_record(user=f"uf-{venue}", gender="female",
                                   venue=venue, subcat="Bar", country="US"))
    return records


def test_global_dims_union_is_sorted():
    records = two_region_records()
    us = RegionSelector(Granularity.COUNTRY, "US")
    dims = collect_global_dims(records, [BR, us])
    assert dims == ["Bar", "Café"]


def test_identical_venue_differences_give_zero():
    records = two_region_records()
    vec = build_preference_vector(records, BR, ["Bar", "Café"])
    bar = vec.values[vec.dims.index("Bar")]
    cafe = vec.values[vec.dims.index("Café")]
    assert bar == pytest.approx(0.0)
    assert cafe > 0.0


def test_absent_dimension_is_zero():
    records = two_region_records()
    us = RegionSelector(Granularity.COUNTRY, "US")
    vec = build_preference_vector(records, us, ["Bar", "Café", "Zoo"])
    assert vec.values[vec.dims.index("Café")] == 0.0
    assert vec.values[vec.dims.index("Zoo")] == 0.0


def test_vector_build_is_deterministic():
    records = two_region_records()
    a = build_preference_vector(records, BR, ["Bar", "Café"])
    b = build_preference_vector(records, BR, ["Bar", "Café"])
    assert np.array_equal(a.values, b.values)


def test_values_in_unit_interval():
    records = two_region_records()
    vec = build_preference_vector(records, BR, ["Bar", "Café"])
    assert np.all(vec.values >= 0.0)
    assert np.all(vec.values <= 1.0)


def test_vector_length_checked():
    with pytest.raises(ValueError):
        PreferenceVector(region=BR, dims=["a", "b"], values=np.zeros(3))
