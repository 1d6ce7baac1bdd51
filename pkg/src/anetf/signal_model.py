"""Reference tones, primary noise and acoustic path responses.

Frequencies are normalized (cycles/sample) in the open interval (0, 0.5);
angular frequencies are ``2*pi*f`` throughout.  Every type here is frozen
and every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import PathEvaluationError

TWO_PI = 2.0 * math.pi

#: Smallest |z| at which a path may be evaluated; bounds z**-t growth.
MIN_RADIUS = 0.05
_FLOOR = MIN_RADIUS * (1.0 - 1e-12)


def wrap_phase(phi: float) -> float:
    """Reduce an angle to (-pi, pi].  Idempotent."""
    r = math.remainder(float(phi), TWO_PI)
    return math.pi if r == -math.pi else r


@dataclass(frozen=True)
class ReferenceSpec:
    """Reference tones ``x_l(n) = A_l cos(2 pi f_l n + phi_l)``."""

    freqs: tuple[float, ...]
    amplitudes: tuple[float, ...]
    phases: tuple[float, ...]

    @property
    def n_tones(self) -> int:
        return len(self.freqs)

    @cached_property
    def omegas(self) -> np.ndarray:
        return TWO_PI * np.asarray(self.freqs, dtype=float)


@dataclass(frozen=True)
class NoiseField:
    """Primary noise at each sensor as a K x M table of tones.

    The first L columns correspond to the reference tones; extra columns
    (probe tones) are allowed and reach the sensors untouched by the
    controller.
    """

    freqs: tuple[float, ...]
    amplitudes: tuple[tuple[float, ...], ...]
    phases: tuple[tuple[float, ...], ...]

    @property
    def n_sensors(self) -> int:
        return len(self.amplitudes)


@dataclass(frozen=True)
class FirPath:
    """Acoustic path given by real FIR taps ``c_0, c_1, ...``."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        if not self.coeffs or not any(c != 0.0 for c in self.coeffs):
            raise ValueError("FIR path needs at least one nonzero coefficient")

    def __call__(self, z: complex) -> complex:
        return path_gain(self, z)


@dataclass(frozen=True)
class GainTablePath:
    """Acoustic path known only as complex gains at the control tones."""

    freqs: tuple[float, ...]
    magnitudes: tuple[float, ...]
    phases: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.freqs) == len(self.magnitudes) == len(self.phases)):
            raise ValueError("gain table columns must have equal length")

    def __call__(self, z: complex) -> complex:
        return path_gain(self, z)


PathResponse = FirPath | GainTablePath


@dataclass(frozen=True)
class PathMatrix:
    """True secondary paths ``C[j][k]`` and the controller's estimates.

    Grids are indexed ``[actuator][sensor]``.
    """

    true: tuple[tuple[PathResponse, ...], ...]
    estimated: tuple[tuple[PathResponse, ...], ...]
    perfect_estimates: bool = False

    @classmethod
    def perfect(cls, true) -> PathMatrix:
        true = tuple(tuple(row) for row in true)
        return cls(true=true, estimated=true, perfect_estimates=True)


IDENTITY = FirPath((1.0,))


def path_gain(path: PathResponse, z: complex, tol: float = 1e-12) -> complex:
    """Complex gain of ``path`` at the z-plane point ``z``.

    A gain table only answers at ``z = e^{+-i 2 pi f_l}`` (within ``tol``);
    the negative-frequency point returns the conjugate gain.
    """
    z = complex(z)
    if abs(z) < _FLOOR:
        raise PathEvaluationError(f"|z|={abs(z):.3g} below the {MIN_RADIUS} evaluation floor")
    if isinstance(path, FirPath):
        zi = 1.0 / z
        acc = 0j
        for c in reversed(path.coeffs):
            acc = acc * zi + c
        return acc
    for f, mag, ph in zip(path.freqs, path.magnitudes, path.phases):
        pole = complex(math.cos(TWO_PI * f), math.sin(TWO_PI * f))
        if abs(z - pole) <= tol:
            return mag * complex(math.cos(ph), math.sin(ph))
        if abs(z - pole.conjugate()) <= tol:
            return mag * complex(math.cos(ph), -math.sin(ph))
    raise PathEvaluationError(f"gain-table path has no entry at z={z!r}")


def path_gains(path: PathResponse, z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`path_gain` for FIR paths; gain tables go point by point."""
    z = np.asarray(z, dtype=complex)
    if isinstance(path, FirPath):
        if np.any(np.abs(z) < _FLOOR):
            raise PathEvaluationError(f"|z| below the {MIN_RADIUS} evaluation floor")
        return np.polyval(np.asarray(path.coeffs[::-1]), 1.0 / z)
    return np.array([path_gain(path, zz) for zz in z.ravel()]).reshape(z.shape)


def tone_pair(l: int, n: int, ref: ReferenceSpec) -> tuple[float, float]:
    """In-phase and quadrature reference samples of tone ``l`` at sample ``n``."""
    if not 0 <= l < ref.n_tones:
        raise IndexError(f"tone index {l} out of range for {ref.n_tones} tones")
    arg = TWO_PI * ref.freqs[l] * n + ref.phases[l]
    a = ref.amplitudes[l]
    return a * math.cos(arg), a * math.sin(arg)


def primary_noise(k: int, n: int, noise: NoiseField) -> float:
    """Noise sample ``d_k(n) = sum_l A_kl cos(2 pi f_l n + phi_kl)``."""
    if not 0 <= k < noise.n_sensors:
        raise IndexError(f"sensor index {k} out of range for {noise.n_sensors} sensors")
    return sum(
        a * math.cos(TWO_PI * f * n + ph)
        for f, a, ph in zip(noise.freqs, noise.amplitudes[k], noise.phases[k])
    )


def filtered_reference(
    l: int, j: int, k: int, n: int, paths: PathMatrix, ref: ReferenceSpec
) -> tuple[float, float]:
    """Reference pair of tone ``l`` shaped by the estimated path ``C~_jk``."""
    g = path_gain(paths.estimated[j][k], np.exp(1j * ref.omegas[l]))
    return _shifted_pair(l, n, ref, abs(g), math.atan2(g.imag, g.real))


def true_filtered_reference(
    l: int, j: int, k: int, n: int, paths: PathMatrix, ref: ReferenceSpec
) -> tuple[float, float]:
    """Same as :func:`filtered_reference` but through the true path ``C_jk``."""
    g = path_gain(paths.true[j][k], np.exp(1j * ref.omegas[l]))
    return _shifted_pair(l, n, ref, abs(g), math.atan2(g.imag, g.real))


def _shifted_pair(l, n, ref, mag, phase):
    if not 0 <= l < ref.n_tones:
        raise IndexError(f"tone index {l} out of range for {ref.n_tones} tones")
    arg = TWO_PI * ref.freqs[l] * n + ref.phases[l] + phase
    a = mag * ref.amplitudes[l]
    return a * math.cos(arg), a * math.sin(arg)


def noise_matrix(noise: NoiseField, steps: int) -> np.ndarray:
    """All primary-noise samples for ``n = 0..steps-1`` as an (N, K) array."""
    n = np.arange(steps, dtype=float)[:, None]
    d = np.zeros((steps, noise.n_sensors))
    for k in range(noise.n_sensors):
        for f, a, ph in zip(noise.freqs, noise.amplitudes[k], noise.phases[k]):
            if a:
                d[:, k] += a * np.cos(TWO_PI * f * n[:, 0] + ph)
    return d


def reference_matrices(ref: ReferenceSpec, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """In-phase and quadrature references for every sample, each (N, L)."""
    n = np.arange(steps, dtype=float)[:, None]
    arg = TWO_PI * np.asarray(ref.freqs)[None, :] * n + np.asarray(ref.phases)[None, :]
    amp = np.asarray(ref.amplitudes)[None, :]
    return amp * np.cos(arg), amp * np.sin(arg)
