"""Temperature unit helpers.

Everything inside the toolkit is kelvin; celsius exists only at the
configuration/reporting boundary and as an optional basis convention for
the regression models.
"""

KELVIN_OFFSET = 273.15

CONVENTIONS = ("kelvin", "celsius")


def celsius_to_kelvin(value_c: float) -> float:
    return value_c + KELVIN_OFFSET


def kelvin_to_celsius(value_k: float) -> float:
    return value_k - KELVIN_OFFSET


def kelvin_to_convention(value_k, convention: str):
    """Convert kelvin values (scalar or array) into a basis convention."""
    if convention == "kelvin":
        return value_k
    if convention == "celsius":
        return value_k - KELVIN_OFFSET
    raise ValueError(f"unknown unit convention: {convention!r}")


def convention_to_kelvin(value, convention: str):
    if convention == "kelvin":
        return value
    if convention == "celsius":
        return value + KELVIN_OFFSET
    raise ValueError(f"unknown unit convention: {convention!r}")
