"""Every named verification battery must pass with its default settings."""

import pytest

from clsibound import batteries


@pytest.mark.parametrize("name", sorted(batteries.REGISTRY))
def test_battery_passes(name):
    result = batteries.REGISTRY[name]()
    assert result.passed, result.line()


def test_run_batteries_filters():
    results = batteries.run_batteries(only="constant-chain")
    assert len(results) == 1
    assert results[0].name == "constant-chain"


def test_run_batteries_trial_override():
    results = batteries.run_batteries(only="entropy-interpolation", trials=5)
    assert results[0].passed
    assert "5 pairs" in results[0].detail


def test_unknown_battery_rejected():
    with pytest.raises(KeyError):
        batteries.run_batteries(only="missing")


def test_result_line_format():
    line = batteries.battery_constant_chain().line()
    assert line.startswith("constant-chain: PASS")
    assert "max residual" in line
