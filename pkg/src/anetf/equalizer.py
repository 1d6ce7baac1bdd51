"""Time-domain multi-channel multi-tone active noise equalizer.

Each tone ``l`` and actuator ``j`` owns an in-phase/quadrature coefficient
pair ``w_lj``.  Secondary paths act as per-tone phasors: the contribution
of ``w_lj`` to sensor ``k`` is ``(1 - gamma_lj) * x_ljk(n) . w_lj`` where
``x_ljk`` is the reference pair rotated and scaled by ``C_jk(e^{i w_l})``.

The per-sample functions below (:func:`sensor_error`,
:func:`pseudo_error_common`, :func:`lms_step`, ...) are direct transcriptions
of the update equations.  :func:`run_simulation` runs the same recursion
through the compiled kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DivergenceError
from .scenario import EqualizerConfig, Scenario  # noqa: F401  (re-exported)
from .signal_model import (
    TWO_PI,
    filtered_reference,
    noise_matrix,
    path_gain,
    primary_noise,
    reference_matrices,
    tone_pair,
    true_filtered_reference,
)

#: Coefficient magnitude treated as divergence.
DIVERGENCE_LIMIT = 1e12
STEADY_WINDOW = 8192
STEADY_RTOL = 0.005


@dataclass(frozen=True)
class AdaptiveState:
    """Coefficients ``w[l, j] = (w, w_hat)`` at sample index ``n``."""

    w: np.ndarray
    n: int = 0

    @classmethod
    def zeros(cls, scenario: Scenario) -> AdaptiveState:
        return cls(np.zeros((scenario.n_tones, scenario.n_actuators, 2)), 0)


@dataclass
class SimulationTrace:
    """Per-sample record of a simulation run.

    ``pseudo`` has shape (N, L, K) for the multiple strategy and (N, 1, K)
    for the common one.  ``weights`` holds coefficient snapshots taken at
    samples ``0, decimation, 2*decimation, ...``.
    """

    d: np.ndarray
    e: np.ndarray
    strategy: str
    pseudo: np.ndarray | None = None
    weights: np.ndarray | None = None
    decimation: int = 0
    final_state: AdaptiveState | None = None
    backend: str = field(default=kernels.BACKEND)

    @property
    def steps(self) -> int:
        return self.e.shape[0]

    @property
    def n_sensors(self) -> int:
        return self.e.shape[1]


# ---------------------------------------------------------------------------
# per-sample reference implementation
# ---------------------------------------------------------------------------


def filter_output(l: int, j: int, n: int, state: AdaptiveState, scenario: Scenario) -> float:
    """Unweighted output ``y_lj(n) = w x_l(n) + w_hat x_hat_l(n)``."""
    x, xh = tone_pair(l, n, scenario.reference)
    w, wh = state.w[l, j]
    return w * x + wh * xh


def sensor_error(k: int, n: int, state: AdaptiveState, scenario: Scenario) -> float:
    """Residual at sensor ``k``: primary noise plus weighted secondary sound."""
    e = primary_noise(k, n, scenario.noise)
    for l in range(scenario.n_tones):
        for j in range(scenario.n_actuators):
            x, xh = true_filtered_reference(l, j, k, n, scenario.paths, scenario.reference)
            e += (1.0 - scenario.gamma[l, j]) * (x * state.w[l, j, 0] + xh * state.w[l, j, 1])
    return e


def _correction(l, k, n, state, scenario):
    b = scenario.beta[l, k]
    out = 0.0
    for j in range(scenario.n_actuators):
        x, xh = filtered_reference(l, j, k, n, scenario.paths, scenario.reference)
        out += (1.0 - scenario.gamma[l, j]) / (1.0 - b) * b * (x * state.w[l, j, 0] + xh * state.w[l, j, 1])
    return out


def pseudo_error_common(k: int, n: int, state: AdaptiveState, scenario: Scenario) -> float:
    """Common pseudo-error ``e'_k``: one signal per sensor covering all tones."""
    return sensor_error(k, n, state, scenario) + sum(
        _correction(l, k, n, state, scenario) for l in range(scenario.n_tones)
    )


def pseudo_error_multiple(l: int, k: int, n: int, state: AdaptiveState, scenario: Scenario) -> float:
    """Multiple pseudo-error ``e'_lk``: only tone ``l``'s correction is added."""
    return sensor_error(k, n, state, scenario) + _correction(l, k, n, state, scenario)


def lms_step(state: AdaptiveState, scenario: Scenario) -> AdaptiveState:
    """One filtered-x LMS update at sample ``state.n``; returns the next state."""
    n = state.n
    L, J, K = scenario.n_tones, scenario.n_actuators, scenario.n_sensors
    multiple = scenario.strategy == "multiple"
    if multiple:
        ep = [[pseudo_error_multiple(l, k, n, state, scenario) for k in range(K)] for l in range(L)]
    else:
        common = [pseudo_error_common(k, n, state, scenario) for k in range(K)]
        ep = [common] * L
    w = state.w.copy()
    for l in range(L):
        for j in range(J):
            g = np.zeros(2)
            for k in range(K):
                x = filtered_reference(l, j, k, n, scenario.paths, scenario.reference)
                coef = (1.0 - scenario.gamma[l, j]) / (1.0 - scenario.beta[l, k])
                g += coef * np.asarray(x) * ep[l][k]
            w[l, j] -= 2.0 * scenario.mu[l] * g
            if not np.all(np.abs(w[l, j]) <= DIVERGENCE_LIMIT):
                raise DivergenceError(l, j, n)
    return AdaptiveState(w, n + 1)


# ---------------------------------------------------------------------------
# kernel-driven simulation
# ---------------------------------------------------------------------------


def loop_arrays(scenario: Scenario) -> dict:
    """Per-tone path gains and update weights consumed by the kernel."""
    L, J, K = scenario.n_tones, scenario.n_actuators, scenario.n_sensors
    gt = np.empty((L, J, K), dtype=complex)
    ge = np.empty((L, J, K), dtype=complex)
    for l, om in enumerate(scenario.reference.omegas):
        z = complex(math.cos(om), math.sin(om))
        for j in range(J):
            for k in range(K):
                gt[l, j, k] = path_gain(scenario.paths.true[j][k], z)
                ge[l, j, k] = path_gain(scenario.paths.estimated[j][k], z)
    out_w = 1.0 - scenario.gamma
    ucoef = out_w[:, :, None] / (1.0 - scenario.beta)[:, None, :]
    pcoef = ucoef * scenario.beta[:, None, :]
    return {
        "gt_re": np.ascontiguousarray(gt.real), "gt_im": np.ascontiguousarray(gt.imag),
        "ge_re": np.ascontiguousarray(ge.real), "ge_im": np.ascontiguousarray(ge.imag),
        "out_w": np.ascontiguousarray(out_w), "pcoef": np.ascontiguousarray(pcoef),
        "ucoef": np.ascontiguousarray(ucoef), "mu": np.ascontiguousarray(scenario.mu),
    }


def run_simulation(
    scenario: Scenario,
    steps: int,
    *,
    strategy: str | None = None,
    record_pseudo: bool = False,
    decimation: int = 0,
    backend=None,
) -> SimulationTrace:
    """Simulate ``steps`` samples from zero coefficients.

    Raises :class:`DivergenceError` (carrying the partial trace) if any
    coefficient becomes non-finite or exceeds ``1e12`` in magnitude.
    """
    if int(steps) != steps or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    if decimation < 0:
        raise ValueError("decimation must be >= 0")
    steps = int(steps)
    scenario = scenario.with_strategy(strategy)
    multiple = scenario.strategy == "multiple"
    L, J, K = scenario.n_tones, scenario.n_actuators, scenario.n_sensors
    impl = backend or kernels._impl

    d = noise_matrix(scenario.noise, steps)
    xc, xs = reference_matrices(scenario.reference, steps)
    arrs = loop_arrays(scenario)
    w = np.zeros((L, J, 2))
    e = np.empty((steps, K))
    ep = np.empty((steps, L if multiple else 1, K)) if record_pseudo else None
    snap = np.empty(((steps - 1) // decimation + 1, L, J, 2)) if decimation else None

    done, bad_l, bad_j = impl.simulate(
        d, xc, xs, arrs["gt_re"], arrs["gt_im"], arrs["ge_re"], arrs["ge_im"],
        arrs["out_w"], arrs["pcoef"], arrs["ucoef"], arrs["mu"], multiple,
        w, e, ep, snap, max(decimation, 1), DIVERGENCE_LIMIT,
    )
    trace = SimulationTrace(
        d=d[:done], e=e[:done], strategy=scenario.strategy,
        pseudo=None if ep is None else ep[:done],
        weights=None if snap is None else snap[: (done - 1) // decimation + 1],
        decimation=decimation, final_state=AdaptiveState(w, done),
        backend="cython" if impl.__name__.endswith("_ckernels") else "python",
    )
    if bad_l >= 0:
        raise DivergenceError(bad_l, bad_j, done - 1, trace)
    return trace


# ---------------------------------------------------------------------------
# steady-state measurement
# ---------------------------------------------------------------------------


def tone_amplitude(signal, f: float, window: int) -> float:
    """Amplitude of the ``f`` component over the trailing ``window`` samples.

    Direct correlation at the exact frequency:
    ``(2/W) |sum_n s(n) exp(-i 2 pi f n)|``.
    """
    s = np.asarray(signal, dtype=float)
    if not 0.0 < f < 0.5:
        raise ValueError(f"frequency {f} outside (0, 0.5)")
    if window > s.shape[0]:
        raise ValueError(f"window {window} longer than signal ({s.shape[0]} samples)")
    if window < 2.0 / f:
        raise ValueError(f"window {window} shorter than two periods of f={f}")
    n0 = s.shape[0] - window
    n = np.arange(n0, s.shape[0])
    return float(2.0 / window * abs(np.dot(s[n0:], np.exp(-1j * TWO_PI * f * n))))


def steady_state_amplitude(signal, f: float, window: int = STEADY_WINDOW) -> tuple[float, bool]:
    """Trailing-window amplitude plus a convergence flag.

    Converged means the two half-window estimates agree to 0.5 % (or both
    sit below 1e-9, where a relative test is meaningless).
    """
    s = np.asarray(signal, dtype=float)
    window = min(window, s.shape[0])
    amp = tone_amplitude(s, f, window)
    half = window // 2
    a1 = tone_amplitude(s[: s.shape[0] - half], f, half)
    a2 = tone_amplitude(s, f, half)
    hi = max(a1, a2)
    return amp, bool(hi < 1e-9 or abs(a1 - a2) <= STEADY_RTOL * hi)
