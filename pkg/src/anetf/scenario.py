"""Scenario description: dimensions, tones, noise field, paths and settings.

A scenario is built from a plain nested mapping (the YAML document
layout) by :func:`scenario_from_dict`, which reports *every* violation at
once.  :func:`scenario_to_dict` produces the canonical form; parsing it
again yields an equal :class:`Scenario`.

Document layout::

    name: fig3_beta05
    dimensions: {actuators: J, sensors: K, tones: L}
    tones: [f_1, ..., f_L]
    reference: {amplitude: [...L], phase: [...L]}
    noise: {amplitude: [[...L] x K], phase: [[...L] x K]}
    probes: [{freq: f, amplitude: [...K], phase: [...K]}, ...]
    paths:
      true: [[path x K] x J]
      estimated: [[path x K] x J]
      perfect_estimates: true
    primary_paths: [path x K]
    equalizer: {beta: [[...K] x L], gamma: [[...J] x L], mu: [...L], strategy: common}

A path is an FIR tap list, ``{fir: [...]}``, ``identity``, or a gain
table ``{gains: [[magnitude, phase] x L]}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .errors import ScenarioError
from .signal_model import (
    FirPath,
    GainTablePath,
    NoiseField,
    PathMatrix,
    PathResponse,
    ReferenceSpec,
    wrap_phase,
)

STRATEGIES = ("common", "multiple")
BETA_GUARD = 1e-9


@dataclass(frozen=True)
class EqualizerConfig:
    """Equalizer settings.

    ``beta`` is L x K (target factor per tone and sensor), ``gamma`` is
    L x J (output attenuation per tone and actuator), ``mu`` holds one
    step size per tone.
    """

    beta: tuple[tuple[float, ...], ...]
    gamma: tuple[tuple[float, ...], ...]
    mu: tuple[float, ...]
    strategy: str = "common"


@dataclass(frozen=True)
class Scenario:
    reference: ReferenceSpec
    noise: NoiseField
    paths: PathMatrix
    equalizer: EqualizerConfig
    primary: tuple[PathResponse, ...]
    name: str = "scenario"
    description: str = ""

    @property
    def tones(self) -> tuple[float, ...]:
        return self.reference.freqs

    @property
    def n_tones(self) -> int:
        return len(self.reference.freqs)

    @property
    def n_sensors(self) -> int:
        return len(self.noise.amplitudes)

    @property
    def n_actuators(self) -> int:
        return len(self.paths.true)

    @property
    def strategy(self) -> str:
        return self.equalizer.strategy

    @cached_property
    def beta(self) -> np.ndarray:
        return np.array(self.equalizer.beta, dtype=float)

    @cached_property
    def gamma(self) -> np.ndarray:
        return np.array(self.equalizer.gamma, dtype=float)

    @cached_property
    def mu(self) -> np.ndarray:
        return np.array(self.equalizer.mu, dtype=float)

    def with_strategy(self, strategy: str | None) -> Scenario:
        if strategy is None or strategy == self.strategy:
            return self
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        return replace(self, equalizer=replace(self.equalizer, strategy=strategy))

    def with_mu(self, mu) -> Scenario:
        mu = np.broadcast_to(np.asarray(mu, dtype=float), (self.n_tones,))
        return replace(self, equalizer=replace(self.equalizer, mu=tuple(float(m) for m in mu)))


# ---------------------------------------------------------------------------
# mapping -> Scenario
# ---------------------------------------------------------------------------


class _Collector:
    def __init__(self):
        self.problems: list[str] = []

    def add(self, msg):
        self.problems.append(msg)

    def number(self, value, where):
        if isinstance(value, bool):
            self.add(f"{where} = {value!r} is not a number")
            return None
        try:
            x = float(value)
        except (TypeError, ValueError):
            self.add(f"{where} = {value!r} is not a number")
            return None
        if not math.isfinite(x):
            self.add(f"{where} = {value!r} is not finite")
            return None
        return x

    def vector(self, value, n, where, default=None, scalar_ok=False):
        if value is None:
            if default is None:
                self.add(f"{where} is missing")
                return None
            return [default] * n
        if scalar_ok and not isinstance(value, (list, tuple)):
            x = self.number(value, where)
            return None if x is None else [x] * n
        if not isinstance(value, (list, tuple)):
            self.add(f"{where} must be a list of {n} numbers")
            return None
        if len(value) != n:
            self.add(f"{where} has {len(value)} entries, expected {n}")
            return None
        out = [self.number(v, f"{where}[{i}]") for i, v in enumerate(value)]
        return None if any(v is None for v in out) else out

    def table(self, value, rows, cols, where, default=None):
        if value is None:
            if default is None:
                self.add(f"{where} is missing")
                return None
            return [[default] * cols for _ in range(rows)]
        if not isinstance(value, (list, tuple)):
            self.add(f"{where} must be a {rows}x{cols} table")
            return None
        if len(value) != rows:
            self.add(f"{where} has {len(value)} rows, expected {rows}")
            return None
        out = [self.vector(r, cols, f"{where}[{i}]") for i, r in enumerate(value)]
        return None if any(r is None for r in out) else out

    def integer(self, value, where):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            self.add(f"{where} = {value!r} must be a positive integer")
            return None
        return value


def _parse_path(c: _Collector, spec, tones, where) -> PathResponse | None:
    if spec == "identity":
        return FirPath((1.0,))
    if isinstance(spec, dict):
        if set(spec) == {"fir"}:
            spec = spec["fir"]
        elif set(spec) == {"gains"}:
            rows = spec["gains"]
            if not isinstance(rows, (list, tuple)) or len(rows) != len(tones):
                c.add(f"{where}.gains must list {len(tones)} [magnitude, phase] pairs")
                return None
            mags, phs = [], []
            for i, row in enumerate(rows):
                pair = c.vector(row, 2, f"{where}.gains[{i}]")
                if pair is None:
                    return None
                if pair[0] < 0:
                    c.add(f"{where}.gains[{i}] magnitude {pair[0]} is negative")
                    return None
                mags.append(pair[0])
                phs.append(wrap_phase(pair[1]))
            return GainTablePath(tuple(tones), tuple(mags), tuple(phs))
        else:
            c.add(f"{where} must have exactly one key, 'fir' or 'gains'")
            return None
    if not isinstance(spec, (list, tuple)) or not spec:
        c.add(f"{where} must be a nonempty FIR tap list")
        return None
    taps = [c.number(v, f"{where}[{i}]") for i, v in enumerate(spec)]
    if any(t is None for t in taps):
        return None
    if not any(t != 0.0 for t in taps):
        c.add(f"{where} FIR taps are all zero")
        return None
    return FirPath(tuple(taps))


def _parse_grid(c, grid, J, K, tones, where):
    if not isinstance(grid, (list, tuple)) or len(grid) != J:
        c.add(f"{where} must be a {J}x{K} grid (actuator x sensor)")
        return None
    out = []
    for j, row in enumerate(grid):
        if not isinstance(row, (list, tuple)) or len(row) != K:
            c.add(f"{where}[{j}] must list {K} paths")
            return None
        out.append(tuple(_parse_path(c, p, tones, f"{where}[{j}][{k}]") for k, p in enumerate(row)))
    if any(p is None for row in out for p in row):
        return None
    return tuple(out)


def scenario_from_dict(data: dict) -> Scenario:
    """Validate a scenario mapping and build the immutable :class:`Scenario`."""
    c = _Collector()
    if not isinstance(data, dict):
        raise ScenarioError("document root must be a mapping")
    known = {
        "name", "description", "dimensions", "tones", "reference", "noise",
        "probes", "paths", "primary_paths", "equalizer",
    }
    for key in data:
        if key not in known:
            c.add(f"unknown section {key!r}")

    dims = data.get("dimensions")
    if not isinstance(dims, dict):
        raise ScenarioError(c.problems + ["dimensions section is missing"])
    J = c.integer(dims.get("actuators"), "dimensions.actuators")
    K = c.integer(dims.get("sensors"), "dimensions.sensors")
    L = c.integer(dims.get("tones"), "dimensions.tones")
    if None in (J, K, L):
        raise ScenarioError(c.problems)

    tones = c.vector(data.get("tones"), L, "tones")
    if tones is not None:
        for i, f in enumerate(tones):
            if not 0.0 < f < 0.5:
                c.add(f"tones[{i}] = {f} outside (0, 0.5)")
        if len(set(tones)) != len(tones):
            c.add("tones must be pairwise distinct")
    tones_ok = tones if tones is not None else [0.25] * L

    ref = data.get("reference") or {}
    ref_amp = c.vector(ref.get("amplitude"), L, "reference.amplitude", default=1.0, scalar_ok=True)
    ref_ph = c.vector(ref.get("phase"), L, "reference.phase", default=0.0, scalar_ok=True)
    if ref_amp is not None:
        for i, a in enumerate(ref_amp):
            if a <= 0:
                c.add(f"reference.amplitude[{i}] = {a} must be > 0")

    noise = data.get("noise")
    if not isinstance(noise, dict):
        c.add("noise section is missing")
        noise = {}
    n_amp = c.table(noise.get("amplitude"), K, L, "noise.amplitude")
    n_ph = c.table(noise.get("phase"), K, L, "noise.phase", default=0.0)
    if n_amp is not None:
        for k, row in enumerate(n_amp):
            for l, a in enumerate(row):
                if a < 0:
                    c.add(f"noise.amplitude[{k}][{l}] = {a} must be >= 0")

    probe_freqs, probe_amp, probe_ph = [], [[] for _ in range(K)], [[] for _ in range(K)]
    probes = data.get("probes") or []
    if not isinstance(probes, (list, tuple)):
        c.add("probes must be a list")
        probes = []
    for i, p in enumerate(probes):
        where = f"probes[{i}]"
        if not isinstance(p, dict):
            c.add(f"{where} must be a mapping")
            continue
        f = c.number(p.get("freq"), f"{where}.freq")
        a = c.vector(p.get("amplitude"), K, f"{where}.amplitude", scalar_ok=True)
        ph = c.vector(p.get("phase"), K, f"{where}.phase", default=0.0, scalar_ok=True)
        if f is None or a is None or ph is None:
            continue
        if not 0.0 < f < 0.5:
            c.add(f"{where}.freq = {f} outside (0, 0.5)")
        if f in tones_ok or f in probe_freqs:
            c.add(f"{where}.freq = {f} duplicates another tone")
        if any(x < 0 for x in a):
            c.add(f"{where}.amplitude must be >= 0")
        probe_freqs.append(f)
        for k in range(K):
            probe_amp[k].append(a[k])
            probe_ph[k].append(ph[k])

    paths = data.get("paths")
    if not isinstance(paths, dict):
        c.add("paths section is missing")
        paths = {}
    if True in paths and "true" not in paths:
        # YAML 1.1 reads an unquoted `true:` key as the boolean
        paths = {("true" if key is True else key): v for key, v in paths.items()}
    true = _parse_grid(c, paths.get("true"), J, K, tones_ok, "paths.true") if "true" in paths else None
    if "true" not in paths:
        c.add("paths.true is missing")
    est_spec = paths.get("estimated")
    perfect = paths.get("perfect_estimates", est_spec is None)
    if not isinstance(perfect, bool):
        c.add(f"paths.perfect_estimates = {perfect!r} must be true or false")
        perfect = False
    est = None
    if est_spec is not None:
        est = _parse_grid(c, est_spec, J, K, tones_ok, "paths.estimated")
    if perfect:
        if est is not None and true is not None and est != true:
            c.add("paths.estimated differs from paths.true while perfect_estimates is set")
        est = true
    elif est_spec is None:
        c.add("paths.estimated is required unless perfect_estimates is true")

    prim_spec = data.get("primary_paths")
    if prim_spec is None:
        primary = tuple(FirPath((1.0,)) for _ in range(K))
    elif not isinstance(prim_spec, (list, tuple)) or len(prim_spec) != K:
        c.add(f"primary_paths must list {K} FIR paths")
        primary = None
    else:
        primary = tuple(_parse_path(c, p, tones_ok, f"primary_paths[{k}]") for k, p in enumerate(prim_spec))
        for k, p in enumerate(primary):
            if p is not None and not isinstance(p, FirPath):
                c.add(f"primary_paths[{k}] must be an FIR path")

    eq = data.get("equalizer")
    if not isinstance(eq, dict):
        c.add("equalizer section is missing")
        eq = {}
    beta = c.table(eq.get("beta"), L, K, "equalizer.beta")
    if beta is not None:
        for l, row in enumerate(beta):
            for k, b in enumerate(row):
                if abs(b - 1.0) <= BETA_GUARD:
                    c.add(f"equalizer.beta[{l}][{k}] = {b} violates beta != 1")
    gamma = c.table(eq.get("gamma"), L, J, "equalizer.gamma", default=0.0)
    if gamma is not None:
        for l, row in enumerate(gamma):
            for j, g in enumerate(row):
                if not 0.0 <= g <= 1.0:
                    c.add(f"equalizer.gamma[{l}][{j}] = {g} outside [0, 1]")
    mu = c.vector(eq.get("mu"), L, "equalizer.mu", scalar_ok=True)
    if mu is not None:
        for l, m in enumerate(mu):
            if m < 0:
                c.add(f"equalizer.mu[{l}] = {m} must be >= 0")
    strategy = eq.get("strategy", "common")
    if strategy not in STRATEGIES:
        c.add(f"equalizer.strategy = {strategy!r} must be one of {STRATEGIES}")

    name = data.get("name", "scenario")
    description = data.get("description", "")
    if not isinstance(name, str):
        c.add("name must be a string")
    if not isinstance(description, str):
        c.add("description must be a string")

    if c.problems:
        raise ScenarioError(c.problems)

    return Scenario(
        reference=ReferenceSpec(
            freqs=tuple(tones),
            amplitudes=tuple(ref_amp),
            phases=tuple(wrap_phase(p) for p in ref_ph),
        ),
        noise=NoiseField(
            freqs=tuple(tones) + tuple(probe_freqs),
            amplitudes=tuple(tuple(n_amp[k]) + tuple(probe_amp[k]) for k in range(K)),
            phases=tuple(
                tuple(wrap_phase(p) for p in n_ph[k]) + tuple(wrap_phase(p) for p in probe_ph[k])
                for k in range(K)
            ),
        ),
        paths=PathMatrix(true=true, estimated=est, perfect_estimates=perfect),
        equalizer=EqualizerConfig(
            beta=tuple(tuple(r) for r in beta),
            gamma=tuple(tuple(r) for r in gamma),
            mu=tuple(mu),
            strategy=strategy,
        ),
        primary=primary,
        name=name,
        description=description,
    )


# ---------------------------------------------------------------------------
# Scenario -> mapping
# ---------------------------------------------------------------------------


def _path_to_obj(p: PathResponse):
    if isinstance(p, FirPath):
        return {"fir": list(p.coeffs)}
    return {"gains": [[m, ph] for m, ph in zip(p.magnitudes, p.phases)]}


def scenario_to_dict(sc: Scenario) -> dict:
    """Canonical mapping for ``sc``; every optional section is spelled out."""
    L, K = sc.n_tones, sc.n_sensors
    out = {"name": sc.name}
    if sc.description:
        out["description"] = sc.description
    out.update(
        {
            "dimensions": {"actuators": sc.n_actuators, "sensors": K, "tones": L},
            "tones": list(sc.tones),
            "reference": {
                "amplitude": list(sc.reference.amplitudes),
                "phase": list(sc.reference.phases),
            },
            "noise": {
                "amplitude": [list(r[:L]) for r in sc.noise.amplitudes],
                "phase": [list(r[:L]) for r in sc.noise.phases],
            },
            "probes": [
                {
                    "freq": f,
                    "amplitude": [sc.noise.amplitudes[k][L + i] for k in range(K)],
                    "phase": [sc.noise.phases[k][L + i] for k in range(K)],
                }
                for i, f in enumerate(sc.noise.freqs[L:])
            ],
            "paths": {
                "true": [[_path_to_obj(p) for p in row] for row in sc.paths.true],
                "estimated": [[_path_to_obj(p) for p in row] for row in sc.paths.estimated],
                "perfect_estimates": sc.paths.perfect_estimates,
            },
            "primary_paths": [_path_to_obj(p) for p in sc.primary],
            "equalizer": {
                "beta": [list(r) for r in sc.equalizer.beta],
                "gamma": [list(r) for r in sc.equalizer.gamma],
                "mu": list(sc.equalizer.mu),
                "strategy": sc.equalizer.strategy,
            },
        }
    )
    return out


def loads(text: str) -> Scenario:
    """Parse scenario YAML text; syntax errors carry line and column."""
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ScenarioError(f"syntax error at {where}: {exc.problem}") from exc
    return scenario_from_dict(data)


def dumps(sc: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(sc), sort_keys=False, default_flow_style=None, width=100)


def parse_scenario(path) -> Scenario:
    """Read and validate a scenario file."""
    return loads(Path(path).read_text())


def fixture_names() -> list[str]:
    root = resources.files("anetf") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_scenario(name_or_path) -> Scenario:
    """Load a scenario file, or a shipped fixture by name (e.g. ``fig3_beta05``)."""
    p = Path(name_or_path)
    if p.exists():
        return parse_scenario(p)
    res = resources.files("anetf") / "scenarios" / f"{name_or_path}.yaml"
    if res.is_file():
        return loads(res.read_text())
    raise FileNotFoundError(
        f"no scenario file or fixture named {name_or_path!r}; fixtures: {', '.join(fixture_names())}"
    )


def make_scenario(
    tones,
    beta,
    mu,
    *,
    paths_true=None,
    paths_est=None,
    noise_amplitude=None,
    noise_phase=None,
    gamma=None,
    strategy="common",
    actuators=None,
    ref_amplitude=None,
    ref_phase=None,
    probes=(),
    primary=None,
    name="scenario",
) -> Scenario:
    """Programmatic constructor with the same validation as the file format.

    ``beta`` is L x K.  Paths are J x K grids of FIR tap lists (or any path
    spec the file format accepts); they default to identity.  Noise
    defaults to unit amplitude at every sensor and tone.
    """
    tones = [float(f) for f in np.atleast_1d(tones)]
    beta = np.atleast_2d(np.asarray(beta, dtype=float))
    L, K = beta.shape
    if paths_true is None:
        J = actuators or K
        paths_true = [[[1.0]] * K for _ in range(J)]
    J = len(paths_true)

    def norm_grid(g):
        return [[p.tolist() if isinstance(p, np.ndarray) else p for p in row] for row in g]

    data = {
        "name": name,
        "dimensions": {"actuators": J, "sensors": K, "tones": L},
        "tones": tones,
        "noise": {
            "amplitude": np.ones((K, L)).tolist() if noise_amplitude is None
            else np.asarray(noise_amplitude, dtype=float).reshape(K, L).tolist(),
        },
        "paths": {"true": norm_grid(paths_true)},
        "equalizer": {
            "beta": beta.tolist(),
            "mu": np.broadcast_to(np.asarray(mu, dtype=float), (L,)).tolist(),
            "strategy": strategy,
        },
        "probes": list(probes),
    }
    if noise_phase is not None:
        data["noise"]["phase"] = np.asarray(noise_phase, dtype=float).reshape(K, L).tolist()
    if paths_est is not None:
        data["paths"]["estimated"] = norm_grid(paths_est)
        data["paths"]["perfect_estimates"] = False
    if gamma is not None:
        data["equalizer"]["gamma"] = np.broadcast_to(np.asarray(gamma, dtype=float), (L, J)).tolist()
    if ref_amplitude is not None or ref_phase is not None:
        data["reference"] = {}
        if ref_amplitude is not None:
            data["reference"]["amplitude"] = np.broadcast_to(np.asarray(ref_amplitude, float), (L,)).tolist()
        if ref_phase is not None:
            data["reference"]["phase"] = np.broadcast_to(np.asarray(ref_phase, float), (L,)).tolist()
    if primary is not None:
        data["primary_paths"] = [p.tolist() if isinstance(p, np.ndarray) else p for p in primary]
    return scenario_from_dict(data)
