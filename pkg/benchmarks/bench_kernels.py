"""Compare the compiled and NumPy kernel backends.

    python benchmarks/bench_kernels.py [--steps 20000] [--repeat 3]

Times the adaptive-loop simulation on the five-tone 2x2 fixture and the
dense complex solve on a 12x12 system (the size of that fixture's
transfer-function system), and checks that both backends agree.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from anetf import equalizer, linalg
from anetf.kernels import available_backends
from anetf.scenario import load_scenario
from anetf.tf import assemble


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--solves", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the NumPy backend is available")

    sc = load_scenario("fig5")
    system = assemble(0.97 * np.exp(0.3j), sc, 0)
    rows = []
    results = {}
    for name, mod in backends.items():
        t_sim, trace = best_of(lambda: equalizer.run_simulation(sc, args.steps, backend=mod), args.repeat)

        def solves():
            for _ in range(args.solves):
                x = linalg.solve(system.matrix, system.rhs, backend=mod).x
            return x

        t_solve, x = best_of(solves, args.repeat)
        results[name] = (trace.e, x)
        rows.append((name, t_sim, args.steps / t_sim, 1e6 * t_solve / args.solves))

    print(f"{'backend':<8} {'sim [s]':>10} {'samples/s':>12} {'solve [us]':>11}")
    for name, t_sim, rate, t_solve in rows:
        print(f"{name:<8} {t_sim:>10.4f} {rate:>12.0f} {t_solve:>11.1f}")
    if len(rows) == 2:
        (_, s_py, _, v_py), (_, s_cy, _, v_cy) = rows
        print(f"speed-up (python / cython): simulation x{s_py / s_cy:.0f}, solve x{v_py / v_cy:.1f}")
        e_c, x_c = results["cython"]
        e_p, x_p = results["python"]
        print(f"max |e_cython - e_python| = {np.max(np.abs(e_c - e_p)):.3g}, "
              f"max |x_cython - x_python| = {np.max(np.abs(x_c - x_p)):.3g}")


if __name__ == "__main__":
    main()
