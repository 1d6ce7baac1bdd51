"""Command-line interface: ``anetf {sim,tf,poles,gfunc,verify}``.

Exit status: 0 on success, 1 when a run or a validation check fails,
2 on usage errors (bad flags, bad values, unreadable or invalid scenario).
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import tables
from .equalizer import run_simulation, steady_state_amplitude
from .errors import ANEError, DivergenceError, ScenarioError
from .poles import estimate_all
from .scenario import load_scenario
from .tf import aux_gain_curve, sweep
from .validation import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _radius(text):
    v = float(text)
    if not 0.05 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"radius must lie in [0.05, 1], got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anetf", description="Multi-tone active noise equalizer toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, strategy=True):
        sp.add_argument("--scenario", required=True, help="scenario file or fixture name (e.g. fig5)")
        sp.add_argument("--out", default="-", help="output file ('-' for stdout)")
        if strategy:
            sp.add_argument("--strategy", choices=("common", "multiple"), help="override the scenario's strategy")

    s = sub.add_parser("sim", help="time-domain simulation; writes n, d_k, e_k")
    common(s)
    s.add_argument("--steps", type=_positive_int, default=20000)
    s.add_argument("--trace-decimation", type=_positive_int, default=1, metavar="N",
                   help="keep every N-th sample in the trace file")

    t = sub.add_parser("tf", help="frequency sweep of H_k on a circle")
    common(t)
    t.add_argument("--sensor", type=_positive_int, default=1, help="sensor number, from 1")
    t.add_argument("--grid", type=int, default=4096)
    t.add_argument("--radius", type=_radius, default=1.0)

    q = sub.add_parser("poles", help="radial pole search for every sensor and tone")
    common(q)

    g = sub.add_parser("gfunc", help="|G_jm(e^{iw})| of the auxiliary function")
    common(g, strategy=False)
    g.add_argument("--j", type=_positive_int, default=1, help="actuator number, from 1")
    g.add_argument("--m", type=_positive_int, default=1, help="sensor number, from 1")
    g.add_argument("--tone", type=_positive_int, default=1, help="tone number, from 1")
    g.add_argument("--grid", type=int, default=4096)

    v = sub.add_parser("verify", help="cross-check simulation against transfer functions")
    common(v)
    v.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    v.add_argument("--probe-freq", type=float, default=None)
    v.add_argument("--steps", type=_positive_int, default=200_000)
    return p


def _scenario(args):
    try:
        return load_scenario(args.scenario)
    except (ScenarioError, FileNotFoundError, OSError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_sim(args) -> int:
    sc = _scenario(args)
    try:
        trace = run_simulation(sc, args.steps, strategy=args.strategy)
        status = EXIT_OK
    except DivergenceError as exc:
        print(f"anetf: {exc}", file=sys.stderr)
        trace, status = exc.trace, EXIT_FAIL
    tables.write_trace_csv(args.out, trace, args.trace_decimation)
    if status == EXIT_OK and args.out != "-":
        window = min(8192, trace.steps)
        for k in range(trace.n_sensors):
            for l, f in enumerate(sc.tones):
                if window >= 2.0 / f:
                    amp, ok = steady_state_amplitude(trace.e[:, k], f, window)
                    print(f"sensor {k + 1} f={f:g}: residual {amp:.6g} "
                          f"(target {abs(sc.beta[l, k]) * sc.noise.amplitudes[k][l]:.6g})"
                          f"{'' if ok else ', not settled'}")
    return status


def cmd_tf(args) -> int:
    sc = _scenario(args)
    if args.sensor > sc.n_sensors:
        raise UsageError(f"--sensor {args.sensor} exceeds the scenario's {sc.n_sensors} sensors")
    if args.grid < 16:
        raise UsageError("--grid must be >= 16")
    table = sweep(sc, args.sensor - 1, args.strategy, args.grid, args.radius)
    tables.write_sweep_csv(args.out, table)
    return EXIT_OK


def cmd_poles(args) -> int:
    sc = _scenario(args)
    tables.write_pole_csv(args.out, estimate_all(sc, args.strategy))
    return EXIT_OK


def cmd_gfunc(args) -> int:
    sc = _scenario(args)
    if args.j > sc.n_actuators or args.m > sc.n_sensors or args.tone > sc.n_tones:
        raise UsageError("--j/--m/--tone out of range for the scenario")
    if args.grid < 16:
        raise UsageError("--grid must be >= 16")
    freqs = np.arange(args.grid) * (0.5 / args.grid)
    g = aux_gain_curve(sc, args.j - 1, args.m - 1, freqs, args.tone - 1)
    with tables._open(args.out, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["f", "mag"])
        for f, v in zip(freqs, g):
            w.writerow([tables.fmt(f), tables.fmt(abs(v))])
    return EXIT_OK


def cmd_verify(args) -> int:
    sc = _scenario(args)
    rep = run_suite(sc, args.suite, args.strategy, args.probe_freq, args.steps)
    if args.out == "-":
        print(rep.to_text())
    else:
        tables.write_report(args.out, rep)
        print(rep.to_text().splitlines()[-1])
    return EXIT_OK if rep.passed else EXIT_FAIL


COMMANDS = {"sim": cmd_sim, "tf": cmd_tf, "poles": cmd_poles, "gfunc": cmd_gfunc, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"anetf {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ANEError, RuntimeError, ValueError, OSError) as exc:
        print(f"anetf {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
