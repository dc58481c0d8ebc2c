"""Tests for hybridtele constants."""

from hybridtele.constants import (
    DEFAULT_A1_GRID,
    DEFAULT_CONFIG_PATH,
    EXIT_OK,
    EXIT_TOLERANCE,
    EXIT_USAGE,
    GAMMA_GRID_POINTS,
    VALID_METHODS,
    VALID_MODELS,
)


class TestGrids:
    """Test sweep grid defaults."""

    def test_a1_grid_spans_unit_interval(self):
        """The |a1| grid runs from 0 to 1 in steps of 0.05."""
        assert DEFAULT_A1_GRID[0] == 0.0
        assert DEFAULT_A1_GRID[-1] == 1.0
        assert len(DEFAULT_A1_GRID) == 21

    def test_gamma_grid_excludes_zero(self):
        """An even point count keeps gamma = 0 off the linear grid."""
        assert GAMMA_GRID_POINTS % 2 == 0


class TestNames:
    def test_models(self):
        assert VALID_MODELS == {"ideal", "fock-basis", "apd-pair"}

    def test_methods(self):
        assert VALID_METHODS == {"coherent", "swap"}

    def test_config_path_name(self):
        assert DEFAULT_CONFIG_PATH.name == "hybridtele.conf"


class TestExitCodes:
    def test_codes_are_distinct(self):
        assert len({EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE}) == 3

    def test_tolerance_breach_is_two(self):
        assert EXIT_TOLERANCE == 2
