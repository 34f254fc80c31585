import pytest

from holodyn.figures import FIGURE_NAMES, distinct_levels, reproduce_figures, tuned_rabbit_parameter


def test_tuned_rabbit_warns_about_reduction():
    warnings = []
    c = tuned_rabbit_parameter(warnings)
    assert abs(c - complex(-0.101096, 0.956287)) < 5e-6
    assert any("reduces" in w for w in warnings)


@pytest.mark.slow
def test_figures_are_deterministic(tmp_path):
    first = reproduce_figures(tmp_path / "a", size=48, seed=3)
    second = reproduce_figures(tmp_path / "b", size=48, seed=3, threads=2)
    assert [f.name for f in first] == list(FIGURE_NAMES)
    for a, b in zip(first, second):
        assert a.path.read_bytes() == b.path.read_bytes()
        assert distinct_levels(a.path) >= 2
