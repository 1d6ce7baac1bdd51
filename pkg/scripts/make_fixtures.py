"""Regenerate the scenario fixtures shipped in ``src/anetf/scenarios``.

Acoustic paths for the figure scenarios are synthetic: length-4 FIR
filters whose taps are drawn uniformly from [-1, 1] and scaled by
``rho**t`` (t = 0..3) with a NumPy ``default_rng(seed)`` generator, then
rounded to 6 decimals.  The seed and decay are written into each file.

    python scripts/make_fixtures.py
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from anetf.scenario import dumps, scenario_from_dict

OUT = Path(__file__).resolve().parents[1] / "src" / "anetf" / "scenarios"


def synthetic_paths(seed: int, actuators: int, sensors: int, rho: float) -> list:
    rng = np.random.default_rng(seed)
    taps = rng.uniform(-1.0, 1.0, (actuators, sensors, 4)) * rho ** np.arange(4)
    return np.round(taps, 6).tolist()


def base(name, description, tones, beta, mu, paths):
    beta = np.atleast_2d(beta)
    L, K = beta.shape
    return {
        "name": name,
        "description": description,
        "dimensions": {"actuators": len(paths), "sensors": K, "tones": L},
        "tones": list(tones),
        "noise": {"amplitude": np.ones((K, L)).tolist()},
        "paths": {"true": paths, "perfect_estimates": True},
        "equalizer": {"beta": beta.tolist(), "mu": mu, "strategy": "common"},
    }


def fixtures():
    yield base(
        "fig2", "Single channel at f=0.125 with identity paths; auxiliary-function study.",
        [0.125], [[0.5]], 0.01, [[[1.0]]],
    ), None
    for tag, b in (("beta0", 0.0), ("beta05", 0.5), ("beta15", 1.5)):
        seed, rho = 3, 0.5
        yield base(
            f"fig3_{tag}", f"Single channel at f=0.25, beta={b}, synthetic length-4 path.",
            [0.25], [[b]], 0.01, synthetic_paths(seed, 1, 1, rho),
        ), (seed, rho)
    seed, rho = 5, 0.5
    yield base(
        "fig4", "Four actuators and four sensors at f=0.1 with per-sensor targets.",
        [0.1], [[1.3, 0.8, 0.0, 0.2]], 0.02, synthetic_paths(seed, 4, 4, rho),
    ), (seed, rho)
    seed, rho = 8, 0.1
    yield base(
        "fig5", "Two actuators, two sensors, five tones with opposed target profiles.",
        [0.05, 0.15, 0.25, 0.35, 0.45],
        np.array([[0.1, 0.3, 0.5, 0.7, 0.9], [0.9, 0.7, 0.5, 0.3, 0.1]]).T,
        0.001, synthetic_paths(seed, 2, 2, rho),
    ), (seed, rho)
    yield base(
        "single_identity", "Single channel at f=0.25, beta=0.5, identity paths.",
        [0.25], [[0.5]], 0.01, [[[1.0]]],
    ), None


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for data, origin in fixtures():
        sc = scenario_from_dict(data)
        head = "# Generated by scripts/make_fixtures.py; do not edit by hand.\n"
        if origin:
            seed, rho = origin
            head += (
                f"# Paths: length-4 FIR, taps = round(default_rng({seed}).uniform(-1, 1, (J, K, 4))"
                f" * {rho}**t, 6).\n"
            )
        (OUT / f"{sc.name}.yaml").write_text(head + dumps(sc))
        print(f"wrote {sc.name}.yaml")


if __name__ == "__main__":
    main()
