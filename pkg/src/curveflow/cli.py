"""Command-line surface: stationary curves, stability reports and region
figures, flow runs, and perturbation experiments.

Every invocation writes its outputs into --out-dir together with a
manifest.json recording the command, the full parameter set, the seed of
any randomised sweep, the package version, and the wall time.  Exit codes:
0 clean, 2 usage error, 3 blow-up detected (series still written).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

__version__ = "0.1.0"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BLOWUP = 3

THREADS_ENV = "CURVEFLOW_THREADS"


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _write_manifest(out_dir: Path, command: str, params: dict, outputs: list,
                    seed=None, wall_time: float = 0.0, quiet: bool = False):
    manifest = {
        "command": command,
        "parameters": params,
        "seed": seed,
        "version": __version__,
        "wall_time_seconds": round(wall_time, 3),
        "outputs": [str(p) for p in outputs],
    }
    path = out_dir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not quiet:
        for p in outputs:
            print(p)
    return path


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be cmin:cmax:steps")
    try:
        lo, hi = Fraction(parts[0]), Fraction(parts[1])
        steps = int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError("grid must be cmin:cmax:steps") from exc
    if steps < 2 or not hi > lo:
        raise argparse.ArgumentTypeError("grid needs cmax > cmin and steps >= 2")
    return lo, hi, steps


def _parse_init(text: str):
    kind, _, rest = text.partition(":")
    if kind == "circle":
        return ("circle", int(rest))
    if kind == "lemniscate":
        return ("lemniscate", int(rest))
    if kind == "file":
        if not rest:
            raise argparse.ArgumentTypeError("file: needs a path")
        return ("file", rest)
    if kind == "support":
        bits = rest.split(",")
        if len(bits) != 3:
            raise argparse.ArgumentTypeError("support: needs omega,n0,eta")
        return ("support", int(bits[0]), int(bits[1]), float(bits[2]))
    raise argparse.ArgumentTypeError(
        "init must be circle:omega | support:omega,n0,eta | file:path | lemniscate:j"
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=".", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="preferred tabular output format")
    common.add_argument("--quiet", action="store_true",
                        help="suppress informational output")
    parser = argparse.ArgumentParser(
        prog="curveflow",
        description="Numerical laboratory for scale-critical curve diffusion flows",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_st = sub.add_parser("stationary", parents=[common],
                          help="build a closed stationary profile and render it")
    p_st.add_argument("--j", type=int, required=True,
                      help="index of the profile family (>= 1)")
    p_st.add_argument("--samples", type=int, default=2048)
    p_st.add_argument("--profile", action="store_true",
                      help="also write the max-normalised curvature profile")

    p_sb = sub.add_parser("stability", parents=[common], help="spectral stability reports and figures")
    p_sb.add_argument("--c", type=_fraction_arg, default=None,
                      help="flow parameter (exact decimal)")
    p_sb.add_argument("--omega", type=int, default=None)
    p_sb.add_argument("--omega-max", type=int, default=None)
    p_sb.add_argument("--grid", type=_parse_grid, default=None,
                      metavar="CMIN:CMAX:STEPS")
    p_sb.add_argument("--svg", default=None, help="stability region figure path")

    p_fl = sub.add_parser("flow", parents=[common], help="integrate the curve evolution")
    p_fl.add_argument("--c", type=float, required=True)
    p_fl.add_argument("--mode", choices=("unnormalised", "length_normalised"),
                      default="unnormalised")
    p_fl.add_argument("--init", type=_parse_init, required=True,
                      metavar="circle:w|support:w,n0,eta|file:path|lemniscate:j")
    p_fl.add_argument("--samples", type=int, default=128)
    p_fl.add_argument("--t-end", type=float, default=None)
    p_fl.add_argument("--dt-safety", type=float, default=0.02)
    p_fl.add_argument("--stop-kmax", type=float, default=1e4)
    p_fl.add_argument("--record-every", type=int, default=500)
    p_fl.add_argument("--out", default="series.csv")
    p_fl.add_argument("--snapshots", default=None, metavar="DIR",
                      help="write curve snapshots into this directory")
    p_fl.add_argument("--snapshot-every", type=int, default=0,
                      help="steps between snapshots (0 = start/end only)")
    p_fl.add_argument("--filmstrip", action="store_true",
                      help="render an SVG filmstrip of rescaled snapshots")

    p_pb = sub.add_parser("perturb", parents=[common], help="instability experiment on an omega-circle")
    p_pb.add_argument("--c", type=float, required=True)
    p_pb.add_argument("--omega", type=int, required=True)
    p_pb.add_argument("--n0", type=int, default=None)
    p_pb.add_argument("--eta", type=str, default="0.04,0.02,0.01",
                      help="comma-separated amplitude ladder")
    p_pb.add_argument("--report", default="perturb_report.json")
    return parser


def cmd_stationary(args, out_dir: Path) -> int:
    import numpy as np

    from .figures import render_curve
    from .geometry import write_curve_csv
    from .stationary import (SuperLemniscateSpec, build_super_lemniscate,
                             curvature_profile)

    if args.j < 1:
        raise SystemExit(EXIT_USAGE)
    t0 = time.perf_counter()
    samples = args.samples
    # wide windings need more samples to stay resolved
    min_samples = 512 * max(1, (4 * args.j - 1) // 16)
    samples = max(samples, min_samples)
    if samples % 2:
        samples += 1
    spec = SuperLemniscateSpec(j=args.j, samples=samples)
    curve = build_super_lemniscate(spec)
    base = out_dir / f"stationary_j{args.j}"
    csv_path = base.with_suffix(".csv")
    svg_path = base.with_suffix(".svg")
    write_curve_csv(curve, csv_path)
    render_curve(curve, svg_path, title=f"j={args.j}, c=2/{(4 * args.j - 1) ** 2}")
    outputs = [csv_path, svg_path]
    if args.profile:
        s, k, theta = curvature_profile(spec)
        prof = np.column_stack([s, k / np.max(np.abs(k)), theta])
        prof_path = out_dir / f"stationary_j{args.j}_profile.csv"
        np.savetxt(prof_path, prof, delimiter=",", comments="",
                   header="s,k_over_kmax,theta", fmt="%.17g")
        outputs.append(prof_path)
    _write_manifest(out_dir, "stationary",
                    {"j": args.j, "samples": samples, "profile": args.profile},
                    outputs, wall_time=time.perf_counter() - t0, quiet=args.quiet)
    return EXIT_OK


def cmd_stability(args, out_dir: Path) -> int:
    from concurrent.futures import ThreadPoolExecutor

    from .figures import render_stability_region
    from .stability import (stability_region_grid, stability_report,
                            stable_omegas)

    t0 = time.perf_counter()
    outputs = []
    params = {
        "c": str(args.c) if args.c is not None else None,
        "omega": args.omega,
        "omega_max": args.omega_max,
        "grid": None if args.grid is None else
                f"{args.grid[0]}:{args.grid[1]}:{args.grid[2]}",
        "svg": args.svg,
    }
    payload = {}
    if args.c is not None and args.omega is not None:
        payload["report"] = stability_report(args.c, args.omega).to_dict()
    if args.c is not None and args.omega_max is not None:
        omegas = sorted(stable_omegas(args.c, args.omega_max))
        payload["stable_omegas"] = omegas
        threads = _thread_count()
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                reports = list(pool.map(
                    lambda w: stability_report(args.c, w).to_dict(),
                    range(1, args.omega_max + 1)))
        else:
            reports = [stability_report(args.c, w).to_dict()
                       for w in range(1, args.omega_max + 1)]
        payload["reports"] = reports
    if payload:
        report_path = out_dir / "stability_report.json"
        with open(report_path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        outputs.append(report_path)

    if args.grid is not None:
        lo, hi, steps = args.grid
        omega_max = args.omega_max or 30
        cs, rows = stability_region_grid(lo, hi, omega_max, steps)
        grid_path = out_dir / "stability_grid.csv"
        with open(grid_path, "w") as fh:
            fh.write("omega,c,stable,c_minus,c_plus\n")
            for omega in sorted(rows):
                th = rows[omega]["thresholds"]
                for cv, flag in zip(cs, rows[omega]["stable_mask"]):
                    fh.write(f"{omega},{cv:.17g},{int(flag)},"
                             f"{th.c_minus_float:.17g},{th.c_plus_float:.17g}\n")
        outputs.append(grid_path)
        if args.svg:
            svg_path = out_dir / args.svg
            render_stability_region(cs, rows, svg_path)
            outputs.append(svg_path)
    if not outputs:
        print("stability: nothing to do "
              "(need --omega, --omega-max, or --grid)", file=sys.stderr)
        return EXIT_USAGE
    _write_manifest(out_dir, "stability", params, outputs,
                    wall_time=time.perf_counter() - t0, quiet=args.quiet)
    return EXIT_OK


def _initial_curve(init, samples: int):
    from .geometry import circle, read_curve_csv
    from .perturbation import SupportPerturbation, build_support_curve
    from .stationary import SuperLemniscateSpec, build_super_lemniscate

    kind = init[0]
    if kind == "circle":
        if init[1] == 0:
            raise SystemExit(EXIT_USAGE)
        return circle(init[1], 1.0, samples)
    if kind == "support":
        p = SupportPerturbation(omega=init[1], n0=init[2], eta=init[3])
        return build_support_curve(p, samples)
    if kind == "lemniscate":
        spec = SuperLemniscateSpec(j=init[1], samples=max(512, samples))
        return build_super_lemniscate(spec)
    return read_curve_csv(init[1])


def cmd_flow(args, out_dir: Path) -> int:
    from .flow import FlowConfig, run
    from .geometry import write_curve_csv

    t0 = time.perf_counter()
    try:
        gamma0 = _initial_curve(args.init, args.samples)
    except ValueError as exc:
        print(f"flow: bad initial curve: {exc}", file=sys.stderr)
        return EXIT_USAGE
    config = FlowConfig(
        c=args.c, mode=args.mode, n=args.samples, dt_safety=args.dt_safety,
        t_end=args.t_end, stop_kmax=args.stop_kmax,
        record_every=args.record_every, snapshot_every=args.snapshot_every,
    )
    series = run(gamma0, config)
    out_path = out_dir / args.out
    series.write_csv(out_path)
    outputs = [out_path]
    if args.snapshots:
        snap_dir = out_dir / args.snapshots
        snap_dir.mkdir(parents=True, exist_ok=True)
        for idx, (t, curve) in enumerate(series.snapshots):
            snap_path = snap_dir / f"snapshot_{idx:04d}.csv"
            write_curve_csv(curve, snap_path)
            outputs.append(snap_path)
    if args.filmstrip and series.snapshots:
        from .figures import render_filmstrip

        film_path = out_dir / "filmstrip.svg"
        render_filmstrip(series.snapshots, film_path)
        outputs.append(film_path)
    params = {
        "c": args.c, "mode": args.mode, "init": str(args.init),
        "samples": args.samples, "t_end": args.t_end,
        "dt_safety": args.dt_safety, "stop_kmax": args.stop_kmax,
        "record_every": args.record_every,
    }
    _write_manifest(out_dir, "flow", params, outputs,
                    wall_time=time.perf_counter() - t0, quiet=args.quiet)
    if not args.quiet:
        print(f"status: {series.status}", file=sys.stderr)
        if series.blowup_bracket:
            lo, hi = series.blowup_bracket
            print(f"blow-up bracket: [{lo:.9g}, {hi:.9g}]", file=sys.stderr)
    return EXIT_BLOWUP if series.status == "blowup" else EXIT_OK


def cmd_perturb(args, out_dir: Path) -> int:
    from .perturbation import run_instability_experiment

    t0 = time.perf_counter()
    try:
        etas = [float(s) for s in args.eta.split(",") if s]
    except ValueError:
        print(f"perturb: bad --eta list {args.eta!r}", file=sys.stderr)
        return EXIT_USAGE
    if not etas or args.omega < 1:
        return EXIT_USAGE
    try:
        report = run_instability_experiment(args.c, args.omega,
                                            eta_list=etas, n0=args.n0)
    except ValueError as exc:
        print(f"perturb: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report_path = out_dir / args.report
    with open(report_path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    params = {"c": args.c, "omega": args.omega, "n0": args.n0, "eta": etas}
    _write_manifest(out_dir, "perturb", params, [report_path],
                    wall_time=time.perf_counter() - t0, quiet=args.quiet)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "stationary":
            return cmd_stationary(args, out_dir)
        if args.command == "stability":
            return cmd_stability(args, out_dir)
        if args.command == "flow":
            return cmd_flow(args, out_dir)
        if args.command == "perturb":
            return cmd_perturb(args, out_dir)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    parser.error(f"unknown command {args.command!r}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
