"""Pole radius estimation by scanning ``|H_k|`` along radial lines.

For tone ``l`` the pole angle is taken to be the control angle
``2 pi f_l``; the radius is the location of the maximum of
``|H_k(r e^{i 2 pi f_l})|`` over ``r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NearSingularError
from .scenario import Scenario
from .tf import inverse_tf, transfer_function

R_MIN = 0.05
R_MAX = 1.0 - 1e-6
COARSE_POINTS = 512
RADIUS_TOL = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PoleEstimate:
    sensor: int
    tone: int
    radius: float | None
    angle: float
    peak: float
    resolution: float
    flag: str = ""

    @property
    def accepted(self) -> bool:
        return self.flag == "" and self.radius is not None


def radial_profile(scenario: Scenario, strategy: str | None, k: int, l: int, r_grid) -> np.ndarray:
    """``|H_k(r e^{i 2 pi f_l})|`` for each radius in ``r_grid``."""
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("r_grid must be a nonempty 1-D sequence")
    if r[0] < R_MIN or r[-1] > R_MAX or np.any(np.diff(r) <= 0):
        raise ValueError(f"r_grid must increase strictly within [{R_MIN}, 1 - 1e-6]")
    theta = scenario.reference.omegas[l]
    out = np.empty(r.size)
    for i, ri in enumerate(r):
        try:
            out[i] = abs(transfer_function(ri * np.exp(1j * theta), k, scenario, strategy).value)
        except NearSingularError as exc:
            raise NearSingularError(exc.step, exc.pivot, exc.norm) from ValueError(f"at r={ri!r}")
    return out


def _inv_mag(scenario, strategy, k, theta, r):
    # |1/H|; the system degenerates at zeros of H, where |1/H| is effectively infinite
    try:
        f1, _ = inverse_tf(r * np.exp(1j * theta), k, scenario, strategy)
    except NearSingularError:
        return math.inf
    return abs(f1)


def estimate_pole(
    scenario: Scenario,
    strategy: str | None,
    k: int,
    l: int,
    coarse: int = COARSE_POINTS,
    tol: float = RADIUS_TOL,
) -> PoleEstimate:
    """Radius of the ``|H_k|`` maximum on the ray at the angle of tone ``l``.

    A coarse scan of ``coarse`` radii on [0.05, 1 - 1e-6] is followed by
    golden-section refinement of the bracketing cells down to ``tol``.
    A maximum at either end of the scan is flagged
    ``unstable_or_boundary`` and no radius is reported.
    """
    theta = float(scenario.reference.omegas[l])
    grid = np.linspace(R_MIN, R_MAX, coarse)
    inv = np.array([_inv_mag(scenario, strategy, k, theta, r) for r in grid])
    i = int(np.argmin(inv))
    cell = grid[1] - grid[0]
    if i == 0 or i == coarse - 1:
        peak = math.inf if inv[i] == 0 else 1.0 / inv[i]
        return PoleEstimate(k, l, None, theta, peak, cell, "unstable_or_boundary")

    a, b = grid[i - 1], grid[i + 1]
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = _inv_mag(scenario, strategy, k, theta, c)
    fd = _inv_mag(scenario, strategy, k, theta, d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = _inv_mag(scenario, strategy, k, theta, c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = _inv_mag(scenario, strategy, k, theta, d)
    r_best, f_best = (c, fc) if fc < fd else (d, fd)
    if inv[i] < f_best:
        r_best, f_best = grid[i], inv[i]
    peak = math.inf if f_best == 0 else 1.0 / f_best
    flag = "unstable_or_boundary" if r_best >= R_MAX else ""
    return PoleEstimate(k, l, None if flag else float(r_best), theta, peak, float(b - a), flag)


def estimate_all(scenario: Scenario, strategy: str | None = None, **kw) -> list[PoleEstimate]:
    """Estimates for every (sensor, tone) pair, sensor-major."""
    return [
        estimate_pole(scenario, strategy, k, l, **kw)
        for k in range(scenario.n_sensors)
        for l in range(scenario.n_tones)
    ]


def settling_samples(excess, period: int, fraction: float = 0.05) -> int:
    """First sample after which the excess-error envelope stays below
    ``fraction`` of its initial level.

    The envelope is the running maximum of ``|excess|`` over blocks of
    ``period`` samples.
    """
    x = np.abs(np.asarray(excess, dtype=float))
    nb = x.size // period
    env = x[: nb * period].reshape(nb, period).max(axis=1)
    level = fraction * env[0]
    above = np.flatnonzero(env > level)
    if above.size == 0:
        return 0
    last = int(above[-1])
    if last == nb - 1:
        raise ValueError("excess error never settles within the record")
    return (last + 1) * period
