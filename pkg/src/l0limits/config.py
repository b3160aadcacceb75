"""Global numeric configuration.

All approximate comparisons in the library share a single absolute
tolerance.  Keeping one knob avoids mixed-tolerance inconsistencies
between validation, certification and limit construction.
"""

from contextlib import contextmanager

DEFAULT_TOLERANCE = 1e-9

_tolerance = DEFAULT_TOLERANCE


def tolerance() -> float:
    """Current absolute comparison tolerance."""
    return _tolerance


def set_tolerance(value: float) -> None:
    value = float(value)
    if not value > 0.0:
        raise ValueError(f"tolerance must be positive, got {value}")
    global _tolerance
    _tolerance = value


@contextmanager
def tolerance_override(value: float):
    """Temporarily replace the global tolerance (mainly for tests and CLI)."""
    previous = tolerance()
    set_tolerance(value)
    try:
        yield
    finally:
        set_tolerance(previous)
