import pytest

from nerchart import Algorithm, BenchConfig, BenchRow, fit_loglog_slope, format_rows, run_bench


def synthetic(power, c=3e-7):
    return [BenchRow(Algorithm.QUADRATIC, n, c * n ** power) for n in (64, 128, 256, 512)]


@pytest.mark.parametrize("power", [2.0, 3.0])
def test_slope_of_power_law(power):
    assert fit_loglog_slope(synthetic(power), "quadratic") == pytest.approx(power, abs=1e-9)


def test_slope_needs_three_lengths():
    rows = synthetic(2.0)[:2]
    with pytest.raises(ValueError):
        fit_loglog_slope(rows, Algorithm.QUADRATIC)
    with pytest.raises(ValueError):
        fit_loglog_slope(synthetic(2.0), Algorithm.CYK)


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig([8, 4])
    with pytest.raises(ValueError):
        BenchConfig([4, 8], repetitions=2)


def test_run_and_format():
    cfg = BenchConfig([4, 16, 32], repetitions=3, num_labels=2)
    rows = run_bench(cfg)
    assert [(r.algorithm, r.n) for r in rows] == [(a, n) for a in Algorithm for n in (4, 16, 32)]
    assert all(r.seconds > 0 for r in rows)
    lines = format_rows(rows).splitlines()
    assert lines[0] == "algorithm,n,seconds_per_sentence"
    assert lines[1].startswith("semi-markov,4,")
    assert len(lines) == 10
    # structure is deterministic
    again = run_bench(cfg)
    assert [(r.algorithm, r.n) for r in again] == [(r.algorithm, r.n) for r in rows]


def test_selected_algorithms():
    rows = run_bench(BenchConfig([2, 3, 4], repetitions=3, algorithms=["cyk"]))
    assert {r.algorithm for r in rows} == {Algorithm.CYK}
