# elfkit/physics/factory.py
from elfkit.config import Config
from elfkit.physics.aircraft import AircraftConfig, Atmosphere
from elfkit.physics.ground_roll import default_elf_width, default_search_length


class PhysicsFactory:
    """Factory to build aircraft, atmosphere and search dimensions from config."""

    @staticmethod
    def get_aircraft(config: Config) -> AircraftConfig:
        return AircraftConfig(
            mass=config.AIRCRAFT_MASS,
            wing_area=config.AIRCRAFT_WING_AREA,
            wing_span=config.AIRCRAFT_WING_SPAN,
            ld_max=config.AIRCRAFT_LD_MAX,
            mu=config.AIRCRAFT_MU,
            reaction_time=config.AIRCRAFT_REACTION_TIME,
            touchdown_speed=config.AIRCRAFT_TOUCHDOWN_SPEED,
            thrust=config.AIRCRAFT_THRUST,
        )

    @staticmethod
    def get_atmosphere(config: Config) -> Atmosphere:
        return Atmosphere(rho=config.ATMOSPHERE_RHO, g=config.ATMOSPHERE_G)

    @staticmethod
    def get_search_dimensions(config: Config) -> tuple[float, float]:
        """(elf_length, elf_width); zero config values are derived from the aircraft."""
        aircraft = PhysicsFactory.get_aircraft(config)
        length = config.SEARCH_LENGTH
        if length <= 0:
            length = default_search_length(
                aircraft,
                PhysicsFactory.get_atmosphere(config),
                uphill_pct=config.SEARCH_UPHILL_PCT,
                surface_factor=config.SURFACE_FACTOR,
            )
        width = config.SEARCH_WIDTH
        if width <= 0:
            width = default_elf_width(aircraft, config.SEARCH_WIDTH_FACTOR)
        return length, width
