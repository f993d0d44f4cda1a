import pytest

from acceptance import ASSOCIATIVITY_SAMPLES, ROW_NAMES, AcceptanceSuite
from errors import PreconditionError
from quiver_hall import HallAlgebra, HallElement, sample_triples
from settings import RunConfig


@pytest.fixture(scope="module")
def suite2():
    config = RunConfig(q=2)
    return AcceptanceSuite(config, HallAlgebra(2, config.dim_bound))


@pytest.fixture(scope="module")
def suite3():
    config = RunConfig(q=3)
    return AcceptanceSuite(config, HallAlgebra(3, config.dim_bound))


def assert_clean(result):
    assert result.failures == []
    assert result.skipped == 0
    assert result.checked > 0
    assert result.status == "pass"


@pytest.mark.slow
@pytest.mark.parametrize("row", sorted(ROW_NAMES))
def test_every_row_passes_at_q2(suite2, row):
    assert_clean(suite2.run_row(row))


@pytest.mark.slow
def test_presentation_row_is_exhaustive_at_q3(suite3):
    assert suite3.hall.dim_bound == 7
    result = suite3.run_row(1)
    assert_clean(result)
    assert result.checked == 274


@pytest.mark.slow
@pytest.mark.parametrize("row", [7, 8, 10])
def test_series_rows_pass_at_q3(suite3, row):
    assert_clean(suite3.run_row(row))


@pytest.mark.slow
def test_a_low_bound_reports_partial_and_fails_the_run():
    config = RunConfig(q=3, dim_bound=6)
    report = AcceptanceSuite(config, HallAlgebra(3, 6)).run([1])
    (row,) = report["rows"]
    assert row["status"] == "partial"
    assert row["skipped"] == 6
    assert row["checked"] == 268
    assert not report["passed"]


def test_associativity_sample_depends_only_on_the_seed(suite2):
    first = sample_triples(2, 5, seed=4)
    assert first == sample_triples(2, 5, seed=4)
    assert len(first) == 5
    assert all(sum(obj.total_dim for obj in triple) <= 4 for triple in first)
    assert all(not obj.is_empty for triple in first for obj in triple)
    x, y, z = (HallElement.basis(2, obj) for obj in first[0])
    assert suite2.hall.associativity_holds(x, y, z)
    with pytest.raises(PreconditionError):
        sample_triples(2, 1, seed=0, max_total=2)


@pytest.mark.slow
def test_displayed_products_row_records_its_seed():
    config = RunConfig(q=2, seed=5)
    result = AcceptanceSuite(config, HallAlgebra(2, config.dim_bound)).run_row(2)
    assert result.details["seed"] == 5
    assert result.checked == 6 + ASSOCIATIVITY_SAMPLES
