"""Sensor transfer functions ``H_k(z) = E_k(z) / D_k(z)`` of the equalizer.

For a point ``z`` the adaptive loop is linear, and the ratios
``E_m/E_1`` and ``Y_lj/E_1`` solve a (K + L*J)-dimensional complex system
whose first unknown is ``1/H_1(z)``.  Sensor ``k`` is handled by swapping
sensor indices 1 and ``k`` in every sensor-indexed quantity before
assembly.

Block layout (rows/cols: K sensor ratios, then L blocks of J actuators)::

    [ A  B ] [ f ]   [ u ]
    [ D  E ] [ g ] = [ v ]

The analysis takes every reference tone to be a unit-amplitude,
zero-phase cosine.  Only the estimated-path phasors enter ``G``, so a
scenario whose reference amplitudes differ from 1 is still simulated
faithfully, but its loop gain (proportional to ``A_ref**2 * mu``) is not
reflected here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NearSingularError, PathEvaluationError, PoleProximityError
from .linalg import solve
from .scenario import Scenario
from .signal_model import _FLOOR, MIN_RADIUS, TWO_PI, FirPath, path_gain

#: Distance from e^{+-i w_l} below which G is not evaluated.
POLE_GUARD = 1e-9
#: Angular offset used for the two-sided limit at a control frequency.
CONTROL_EPS = 1e-5 * TWO_PI
CONTROL_RTOL = 1e-3
#: Gain-table paths answer within this distance of a control point.
TABLE_TOL = 1e-4


@dataclass(frozen=True)
class TfSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    target_sensor: int
    z: complex
    n_sensors: int
    n_actuators: int
    n_tones: int
    strategy: str

    @property
    def A(self):
        K = self.n_sensors
        return self.matrix[:K, :K]

    @property
    def B(self):
        K = self.n_sensors
        return self.matrix[:K, K:]

    @property
    def D(self):
        K = self.n_sensors
        return self.matrix[K:, :K]

    @property
    def E(self):
        K = self.n_sensors
        return self.matrix[K:, K:]

    @property
    def u(self):
        return self.rhs[: self.n_sensors]

    @property
    def v(self):
        return self.rhs[self.n_sensors:]

    def e_block(self, F: int, C: int) -> np.ndarray:
        """J x J block of ``E`` coupling tone ``F``'s rows to tone ``C``'s unknowns."""
        J = self.n_actuators
        return self.E[F * J:(F + 1) * J, C * J:(C + 1) * J]


@dataclass(frozen=True)
class TfValue:
    z: complex
    sensor: int
    value: complex
    residual: float
    near_pole: bool = False


@dataclass(frozen=True)
class ControlGain:
    """Two-sided limit of ``H_k`` at the control frequency of tone ``l``."""

    sensor: int
    tone: int
    value: complex
    plus: complex
    minus: complex
    sides_disagree: bool
    near_pole: bool = False


@dataclass
class SweepTable:
    freqs: np.ndarray
    values: np.ndarray
    flags: list[str]
    sensor: int
    radius: float = 1.0
    strategy: str = "common"
    failed: int = field(default=0)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.values)


# ---------------------------------------------------------------------------
# scenario-derived constants
# ---------------------------------------------------------------------------


class _Model:
    """Arrays derived once per scenario."""

    def __init__(self, sc: Scenario):
        self.L, self.J, self.K = sc.n_tones, sc.n_actuators, sc.n_sensors
        self.omegas = np.asarray(sc.reference.omegas)
        self.cos_w = np.cos(self.omegas)
        self.poles = np.exp(1j * self.omegas)
        self.mu = sc.mu
        self.beta = sc.beta
        self.out_w = 1.0 - sc.gamma
        ge = np.empty((self.L, self.J, self.K), dtype=complex)
        for l, om in enumerate(self.omegas):
            z = complex(math.cos(om), math.sin(om))
            for j in range(self.J):
                for k in range(self.K):
                    ge[l, j, k] = path_gain(sc.paths.estimated[j][k], z)
        self.est_mag = np.abs(ge)
        self.est_phase = np.angle(ge)
        self.true_paths = sc.paths.true
        self.est_paths = sc.paths.estimated
        self.primary = sc.primary
        self.true_fir = _fir_stack(sc.paths.true)
        self.est_fir = _fir_stack(sc.paths.estimated)
        self.primary_fir = _fir_stack([sc.primary])

    def gains(self, z, which):
        stack = self.true_fir if which == "true" else self.est_fir
        if stack is not None:
            return _fir_eval(stack, z)
        grid = self.true_paths if which == "true" else self.est_paths
        return np.array([[path_gain(p, z, TABLE_TOL) for p in row] for row in grid])

    def primary_gains(self, z):
        return _fir_eval(self.primary_fir, z)[0]


def _fir_stack(grid):
    if not all(isinstance(p, FirPath) for row in grid for p in row):
        return None
    T = max(len(p.coeffs) for row in grid for p in row)
    out = np.zeros((len(grid), len(grid[0]), T))
    for j, row in enumerate(grid):
        for k, p in enumerate(row):
            out[j, k, : len(p.coeffs)] = p.coeffs
    return out


def _fir_eval(stack, z):
    if abs(z) < _FLOOR:
        raise PathEvaluationError(f"|z|={abs(z):.3g} below the {MIN_RADIUS} evaluation floor")
    zp = (1.0 / z) ** np.arange(stack.shape[2])
    return stack @ zp


@lru_cache(maxsize=64)
def _model(sc: Scenario) -> _Model:
    return _Model(sc)


def _check_pole(z, m: _Model, tones=None):
    for l in range(m.L) if tones is None else tones:
        p = m.poles[l]
        if abs(z - p) < POLE_GUARD or abs(z - p.conjugate()) < POLE_GUARD:
            raise PoleProximityError(z, m.omegas[l])


def _aux(z, m: _Model, perm):
    """All ``G_ljk(z)`` as an (L, J, K) array, sensor axis permuted."""
    _check_pole(z, m)
    mag = m.est_mag[:, :, perm]
    ph = m.est_phase[:, :, perm]
    beta = m.beta[:, perm]
    om = m.omegas[:, None, None]
    num = z * np.cos(om - ph) - np.cos(ph)
    den = z * z - 2.0 * z * m.cos_w + 1.0
    return (
        -2.0 * m.mu[:, None, None] * mag * m.out_w[:, :, None] * num
        / ((1.0 - beta)[:, None, :] * den[:, None, None])
    )


def _aux_scalar(z, m: _Model, l, j, k):
    _check_pole(z, m, [l])
    ph = m.est_phase[l, j, k]
    num = z * math.cos(m.omegas[l] - ph) - math.cos(ph)
    den = z * z - 2.0 * z * m.cos_w[l] + 1.0
    return -2.0 * m.mu[l] * m.est_mag[l, j, k] * m.out_w[l, j] * num / ((1.0 - m.beta[l, k]) * den)


def aux_gain_multi(z: complex, l: int, j: int, k: int, scenario: Scenario) -> complex:
    """Auxiliary function ``G_ljk(z)`` linking pseudo-error ``k`` to output ``(l, j)``."""
    return complex(_aux_scalar(complex(z), _model(scenario), l, j, k))


def aux_gain_single(z: complex, j: int, m: int, scenario: Scenario) -> complex:
    """``G_jm(z)`` of a single-frequency equalizer."""
    if scenario.n_tones != 1:
        raise ValueError(f"single-frequency G needs L=1, scenario has L={scenario.n_tones}")
    return aux_gain_multi(z, 0, j, m, scenario)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def _permutation(K, target):
    if not 0 <= target < K:
        raise IndexError(f"sensor index {target} out of range for {K} sensors")
    perm = np.arange(K)
    perm[0], perm[target] = target, 0
    return perm


def _assemble(z, sc: Scenario, target: int, strategy: str) -> TfSystem:
    m = _model(sc)
    z = complex(z)
    L, J, K = m.L, m.J, m.K
    perm = _permutation(K, target)
    G = _aux(z, m, perm)
    C = m.gains(z, "true")[:, perm]
    Ce = m.gains(z, "est")[:, perm]
    P = m.primary_gains(z)[perm]
    n = K + L * J
    M = np.zeros((n, n), dtype=complex)
    M[:K, 0] = P / P[0]
    idx = np.arange(1, K)
    M[idx, idx] = -1.0
    # B: row f, column (l, c) -> (1 - gamma_lc) C_cf
    M[:K, K:] = (m.out_w[:, :, None] * C[None, :, :]).transpose(2, 0, 1).reshape(K, L * J)
    # D: row (l, f), column c -> -G_lfc, first column zero
    D = -G.reshape(L * J, K)
    D[:, 0] = 0.0
    M[K:, :K] = D
    ratio = (m.beta / (1.0 - m.beta))[:, perm]
    S = np.einsum("Ffk,Ck,ck->FfCc", G, ratio, Ce) * m.out_w[None, None, :, :]
    if strategy == "multiple":
        S = S * np.eye(L)[:, None, :, None]
    M[K:, K:] = np.eye(L * J) - S.reshape(L * J, L * J)
    rhs = np.zeros(n, dtype=complex)
    rhs[0] = 1.0
    rhs[K:] = G[:, :, 0].reshape(L * J)
    return TfSystem(M, rhs, target, z, K, J, L, strategy)


def assemble_single(z: complex, scenario: Scenario, target_sensor: int = 0) -> TfSystem:
    """(K+J)-dimensional system for a single-frequency equalizer."""
    if scenario.n_tones != 1:
        raise ValueError(f"single-frequency assembly needs L=1, scenario has L={scenario.n_tones}")
    return _assemble(z, scenario, target_sensor, "common")


def assemble_common(z: complex, scenario: Scenario, target_sensor: int = 0) -> TfSystem:
    """(K+LJ)-dimensional system for the common pseudo-error strategy."""
    return _assemble(z, scenario, target_sensor, "common")


def assemble_multiple(z: complex, scenario: Scenario, target_sensor: int = 0) -> TfSystem:
    """As :func:`assemble_common` with the off-diagonal E blocks zeroed."""
    return _assemble(z, scenario, target_sensor, "multiple")


def assemble(z, scenario: Scenario, target_sensor: int = 0, strategy: str | None = None) -> TfSystem:
    strategy = strategy or scenario.strategy
    if strategy not in ("common", "multiple"):
        raise ValueError(f"unknown strategy {strategy!r}")
    return _assemble(z, scenario, target_sensor, strategy)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def inverse_tf(z, k: int, scenario: Scenario, strategy: str | None = None):
    """First solution entry ``f_1 = 1/H_k(z)`` and the solver residual."""
    sys_ = assemble(z, scenario, k, strategy)
    res = solve(sys_.matrix, sys_.rhs)
    return complex(res.x[0]), res.residual


def transfer_function(z, k: int, scenario: Scenario, strategy: str | None = None) -> TfValue:
    """``H_k(z)`` for sensor ``k`` (0-based).

    Raises :class:`PoleProximityError` on a control-frequency pole (use
    :func:`control_frequency_gain` there) and :class:`NearSingularError`
    when the system cannot be solved.
    """
    f1, res = inverse_tf(z, k, scenario, strategy)
    if f1 == 0:
        return TfValue(complex(z), k, complex(math.inf, 0.0), res, near_pole=True)
    return TfValue(complex(z), k, 1.0 / f1, res)


def closed_form_single(z, scenario: Scenario) -> complex:
    """Closed-form ``H_1(z)`` of a single-channel single-tone equalizer.

    At the control frequency the removable singularity is replaced by its
    limit ``beta C~ / ((1 - beta) C + beta C~)`` (``beta`` for perfect
    estimates).
    """
    if (scenario.n_tones, scenario.n_actuators, scenario.n_sensors) != (1, 1, 1):
        raise ValueError("closed form needs K = J = L = 1")
    z = complex(z)
    m = _model(scenario)
    beta = m.beta[0, 0]
    q = m.out_w[0, 0] / (1.0 - beta)
    C = path_gain(scenario.paths.true[0][0], z, TABLE_TOL)
    Ce = path_gain(scenario.paths.estimated[0][0], z, TABLE_TOL)
    p = m.poles[0]
    if abs(z - p) < POLE_GUARD or abs(z - p.conjugate()) < POLE_GUARD:
        if m.mu[0] == 0:
            return 1.0 + 0j
        if scenario.paths.perfect_estimates:
            return complex(beta)
        return beta * Ce / ((1.0 - beta) * C + beta * Ce)
    G = aux_gain_single(z, 0, 0, scenario)
    return (1.0 - q * beta * G * Ce) / (1.0 - q * G * C + q * beta * G * (C - Ce))


def control_frequency_gain(k: int, l: int, scenario: Scenario, strategy: str | None = None) -> ControlGain:
    """``H_k`` at ``e^{i w_l}`` as the mean of evaluations at ``w_l +- eps``."""
    om = scenario.reference.omegas[l]
    sides = []
    near = False
    for s in (1.0, -1.0):
        try:
            sides.append(transfer_function(np.exp(1j * (om + s * CONTROL_EPS)), k, scenario, strategy).value)
        except NearSingularError:
            sides.append(complex(math.nan, math.nan))
            near = True
    plus, minus = sides
    value = 0.5 * (plus + minus)
    near = near or not (math.isfinite(abs(plus)) and math.isfinite(abs(minus)))
    disagree = near or abs(plus - minus) > CONTROL_RTOL * max(abs(value), 1e-300)
    return ControlGain(k, l, value, plus, minus, disagree, near)


def sweep(
    scenario: Scenario,
    k: int,
    strategy: str | None = None,
    grid_size: int = 4096,
    radius: float = 1.0,
) -> SweepTable:
    """Evaluate ``H_k(radius * e^{i 2 pi f})`` on ``f = i / (2 grid_size)``.

    On the unit circle, grid points inside a control frequency's pole
    guard take the two-sided limit instead.  More than 1 % failed points
    raises :class:`RuntimeError`.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be >= 16")
    strategy = strategy or scenario.strategy
    freqs = np.arange(grid_size) * (0.5 / grid_size)
    values = np.empty(grid_size, dtype=complex)
    flags = [""] * grid_size
    failed = 0
    omegas = scenario.reference.omegas
    for i, f in enumerate(freqs):
        om = TWO_PI * f
        hit = np.flatnonzero(np.abs(om - omegas) < POLE_GUARD) if radius == 1.0 else []
        try:
            if len(hit):
                cg = control_frequency_gain(k, int(hit[0]), scenario, strategy)
                values[i] = cg.value
                flags[i] = "near_pole" if cg.near_pole else "control"
            else:
                tv = transfer_function(radius * np.exp(1j * om), k, scenario, strategy)
                values[i] = tv.value
                flags[i] = "near_pole" if tv.near_pole else ""
        except (NearSingularError, PoleProximityError, PathEvaluationError):
            values[i] = complex(math.nan, math.nan)
            flags[i] = "failed"
            failed += 1
    if failed > 0.01 * grid_size:
        raise RuntimeError(f"sweep failed at {failed} of {grid_size} points")
    return SweepTable(freqs, values, flags, k, radius, strategy, failed)


# ---------------------------------------------------------------------------
# auxiliary-function curves
# ---------------------------------------------------------------------------


def aux_gain_curve(scenario: Scenario, j: int, m: int, freqs, tone: int = 0) -> np.ndarray:
    """``G_{tone,j,m}(e^{i 2 pi f})`` over ``freqs``; NaN inside the pole guard."""
    out = np.empty(len(freqs), dtype=complex)
    for i, f in enumerate(freqs):
        try:
            out[i] = aux_gain_multi(np.exp(1j * TWO_PI * f), tone, j, m, scenario)
        except PoleProximityError:
            out[i] = complex(math.nan, math.nan)
    return out


def aux_level_width(scenario: Scenario, level: float, j: int = 0, m: int = 0, tone: int = 0,
                    start: float = 1e-3 * TWO_PI) -> float:
    """Width (radians) of the interval around ``w_tone`` where ``|G| >= level``.

    Each edge is located by bisection between ``start`` and the first
    offset (doubling outward) where ``|G|`` drops below ``level``.
    """
    om = scenario.reference.omegas[tone]

    def mag(w):
        return abs(aux_gain_multi(np.exp(1j * w), tone, j, m, scenario))

    width = 0.0
    for s in (1.0, -1.0):
        lo = start
        if mag(om + s * lo) < level:
            raise ValueError("level above |G| at the starting offset")
        hi = 2.0 * lo
        while mag(om + s * hi) >= level:
            lo, hi = hi, 2.0 * hi
            if hi > math.pi:
                raise ValueError("level never reached")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mag(om + s * mid) >= level:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        width += 0.5 * (lo + hi)
    return width
