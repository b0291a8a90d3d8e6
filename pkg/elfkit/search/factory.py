# elfkit/search/factory.py
from elfkit.config import Config
from elfkit.exceptions import InvalidParameter
from elfkit.physics.factory import PhysicsFactory
from elfkit.search.evaluation import SearchPolicy, SlopeReading


class SearchFactory:
    """Factory to build the search policy from config."""

    @staticmethod
    def get_policy(config: Config) -> SearchPolicy:
        length, width = PhysicsFactory.get_search_dimensions(config)
        return SearchPolicy(
            elf_length=length,
            elf_width=width,
            surface_factor=config.SURFACE_FACTOR,
            wet_factor=config.SURFACE_WET_FACTOR,
            penalty_per_pct=config.SURFACE_DOWNSLOPE_PENALTY,
            max_downslope_pct=config.SURFACE_MAX_DOWNSLOPE_PCT,
            angle_step_deg=config.SEARCH_ANGLE_STEP_DEG,
            step=config.SEARCH_STEP_M,
            profile_step=config.PROFILE_STEP_M,
            reading=SearchFactory.get_slope_reading(config),
        )

    @staticmethod
    def get_slope_reading(config: Config) -> SlopeReading:
        try:
            return SlopeReading(config.SEARCH_SLOPE_READING.strip().lower())
        except ValueError as exc:
            known = ", ".join(r.value for r in SlopeReading)
            raise InvalidParameter(
                f"unknown slope reading {config.SEARCH_SLOPE_READING!r} (known: {known})"
            ) from exc
