# elfkit/helpers/formatting.py
import math


def format_meters(value: float) -> str:
    """Three decimals, the way lengths are reported on the command line."""
    if math.isinf(value):
        return "inf"
    return f"{value:.3f}"


def format_area(value_m2: float) -> str:
    if value_m2 >= 1e6:
        return f"{value_m2 / 1e6:.3f} km²"
    return f"{value_m2:.1f} m²"
