"""Numerical solution of the delay differential equation (u w(u))' = w(u-1).

The function w is the density of numbers free of small prime factors.  On
(1, 2] it equals 1/u and on (2, 3] it equals (1 + log(u-1))/u; those branches
are stored as closed forms.  Beyond u = 3 the table is advanced through the
integral form  u w(u) = 1 + int_2^u w(t-1) dt  with the trapezoid rule on a
uniform grid whose step divides 1, so the delayed argument always lands on an
already computed grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ToleranceError

DEFAULT_STEP = 1e-4
DEFAULT_UMAX = 20.0


def omega_upper(u: float) -> float:
    """Three-branch closed-form upper bound for w(u); equality on [1, 3]."""
    if u < 1:
        raise DomainError(f"omega_upper requires u >= 1, got {u}")
    if u <= 2:
        return 1.0 / u
    if u <= 3:
        return (1.0 + math.log(u - 1.0)) / u
    return (1.0 + math.log(2.0)) / 3.0


@dataclass(frozen=True)
class BuchstabTable:
    """Dense grid of w values on [1, u_max] with spacing `step`."""

    u_max: float
    step: float
    values: np.ndarray  # values[k] = w(1 + k*step), read-only

    @property
    def grid(self) -> np.ndarray:
        return 1.0 + self.step * np.arange(len(self.values))


def solve_buchstab(u_max: float = DEFAULT_UMAX, step: float = DEFAULT_STEP) -> BuchstabTable:
    """Build a BuchstabTable on [1, u_max].

    `step` must divide 1 (within rounding) so that the delay t - 1 maps grid
    points to grid points; u_max is rounded up to a whole number of steps.
    """
    if u_max < 2:
        raise DomainError(f"require u_max >= 2, got {u_max}")
    if not (0 < step <= 1e-3):
        raise ToleranceError(f"require 0 < step <= 1e-3, got {step}")
    per_unit = round(1.0 / step)
    if abs(per_unit * step - 1.0) > 1e-9:
        raise ToleranceError(f"step {step} must divide 1")
    n_units = math.ceil(round((u_max - 1.0) / step) / per_unit)
    n = n_units * per_unit  # index of u_max'
    h = step
    vals = np.empty(n + 1)
    u = 1.0 + h * np.arange(n + 1)
    # closed-form branches
    k2 = min(per_unit, n)
    vals[: k2 + 1] = 1.0 / u[: k2 + 1]
    if n > per_unit:
        k3 = min(2 * per_unit, n)
        vals[per_unit + 1 : k3 + 1] = (1.0 + np.log(u[per_unit + 1 : k3 + 1] - 1.0)) / u[
            per_unit + 1 : k3 + 1
        ]
    # advance block by block; within a block all delayed values are known
    for b in range(2, n_units):
        lo = b * per_unit  # start grid index of the block (value known)
        hi = min(lo + per_unit, n)
        delayed = vals[lo - per_unit : hi - per_unit + 1]
        incr = 0.5 * h * (delayed[:-1] + delayed[1:])
        uw = u[lo] * vals[lo] + np.cumsum(incr)
        vals[lo + 1 : hi + 1] = uw / u[lo + 1 : hi + 1]
    vals.setflags(write=False)
    return BuchstabTable(u_max=float(u[n]), step=h, values=vals)


def omega(u: float, table: BuchstabTable) -> float:
    """Point value w(u): closed form on (1, 3], linear interpolation beyond."""
    if u <= 1 or u > table.u_max + 1e-12:
        raise DomainError(f"u={u} outside (1, {table.u_max}]")
    if u <= 2:
        return 1.0 / u
    if u <= 3:
        return (1.0 + math.log(u - 1.0)) / u
    t = (u - 1.0) / table.step
    k = min(int(t), len(table.values) - 2)
    frac = t - k
    return float((1.0 - frac) * table.values[k] + frac * table.values[k + 1])


def integral_form_residual(table: BuchstabTable) -> np.ndarray:
    """|u w(u) - 1 - int_2^u w(t-1) dt| at every grid point u > 2.

    The integral is evaluated by composite Simpson quadrature over the stored
    table, which is independent of the trapezoid stepping used to build it.
    """
    from scipy.integrate import cumulative_simpson

    per_unit = round(1.0 / table.step)
    n = len(table.values) - 1
    u = table.grid
    # integrand w(t-1) on t in [2, u_max]
    delayed = table.values[: n - per_unit + 1]
    integral = cumulative_simpson(delayed, dx=table.step, initial=0.0)
    lhs = u[per_unit:] * table.values[per_unit:]
    return np.abs(lhs - 1.0 - integral)
