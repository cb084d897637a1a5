"""Closed-form solution of the one-constraint problem."""
from enum import Enum


class Case(str, Enum):
    INACTIVE = "a"   # predicted distance clears the margin
    BOUNDARY = "b"   # lands exactly on the margin
    ACTIVE = "c"     # must be pushed back onto the margin


def single_constraint_closed_form(h, a_dot_udes, tau, delta, zero_tol=1e-12):
    """Multiplier and case label for one distance constraint.

    ``s = h + tau * a_dot_udes - delta`` is the predicted margin after one step
    under the nominal input. ``|s|`` below ``zero_tol`` times the magnitude of
    its terms counts as zero.
    """
    if not tau > 0:
        raise ValueError(f"time step must be positive, got {tau}")
    step = tau * a_dot_udes
    s = h + step - delta
    if abs(s) <= zero_tol * (abs(h) + abs(step) + abs(delta)):
        return 0.0, Case.BOUNDARY
    if s > 0:
        return 0.0, Case.INACTIVE
    return -s / tau, Case.ACTIVE
