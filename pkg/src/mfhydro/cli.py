"""Command-line interface: run / converge / riemann subcommands."""

from __future__ import annotations

import argparse
import os
import sys

from .riemann import RiemannState, solve_riemann, write_reference_csv
from .sod import RunConfig, convergence_study, run, write_report

CONFIG_KEYS = {
    "scheme": str, "n": int, "t_end": float, "cfl": float, "gamma": float,
    "mls_degree": int, "resync_tolerance": float, "h_const": float,
    "dissipation": lambda s: s.lower() in ("1", "true", "yes"),
    "out": str, "sizes": str, "t": float, "samples": int,
}


def read_config_file(path):
    """Plain-text key=value configuration, one entry per line."""
    values = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"bad config line: {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip()
            if key not in CONFIG_KEYS:
                raise SystemExit(f"unknown config key: {key!r}")
            values[key] = CONFIG_KEYS[key](raw.strip())
    return values


def _merge(args, file_values, key, default):
    cli_value = getattr(args, key, None)
    if cli_value is not None:
        return cli_value
    if key in file_values:
        return file_values[key]
    return default


def _build_run_config(args, file_values, scheme=None, n=None):
    return RunConfig(
        scheme=scheme if scheme is not None else _merge(args, file_values, "scheme", "mls"),
        n_particles=n if n is not None else _merge(args, file_values, "n", 450),
        t_end=_merge(args, file_values, "t_end", 0.2),
        cfl=_merge(args, file_values, "cfl", 0.3),
        gamma=_merge(args, file_values, "gamma", 1.4),
        mls_degree=_merge(args, file_values, "mls_degree", 1),
        resync_tolerance=_merge(args, file_values, "resync_tolerance", 1.0e-3),
        h_const=_merge(args, file_values, "h_const", 2.0),
        dissipation=_merge(args, file_values, "dissipation", True),
    )


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mfhydro",
        description="1D meshfree shock-tube solver (SPH / MLS / B-spline)")
    parser.add_argument("--config", help="key=value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single shock-tube run")
    p_run.add_argument("--scheme", choices=("sph", "mls", "rbf"))
    p_run.add_argument("--n", type=int)
    p_run.add_argument("--t-end", dest="t_end", type=float)
    p_run.add_argument("--cfl", type=float)
    p_run.add_argument("--gamma", type=float)
    p_run.add_argument("--mls-degree", dest="mls_degree", type=int)
    p_run.add_argument("--out", required=True, help="output directory")

    p_conv = sub.add_parser("converge", help="convergence study")
    p_conv.add_argument("--scheme", choices=("sph", "mls", "rbf"))
    p_conv.add_argument("--sizes", default=None,
                        help="comma-separated particle counts")
    p_conv.add_argument("--t-end", dest="t_end", type=float)
    p_conv.add_argument("--cfl", type=float)
    p_conv.add_argument("--gamma", type=float)
    p_conv.add_argument("--out", required=True)

    p_rie = sub.add_parser("riemann", help="exact reference profile")
    p_rie.add_argument("--t", type=float)
    p_rie.add_argument("--samples", type=int)
    p_rie.add_argument("--gamma", type=float)
    p_rie.add_argument("--out", required=True, help="output CSV file")

    args = parser.parse_args(argv)
    file_values = read_config_file(args.config) if args.config else {}

    if args.command == "run":
        config = _build_run_config(args, file_values)
        config = RunConfig(**{**config.__dict__, "out_dir": args.out})
        report = run(config, log_path=os.path.join(args.out, "run.log"))
        print(f"scheme={config.scheme} N={config.n_particles} "
              f"steps={report.n_steps} "
              f"Linf(P)={report.linf_errors['P']:.4e} "
              f"contact_err={report.contact_position_error:.4f}")
        return 0

    if args.command == "converge":
        sizes_raw = _merge(args, file_values, "sizes", "150,300,600")
        sizes = [int(s) for s in str(sizes_raw).split(",")]
        config = _build_run_config(args, file_values)
        conv = convergence_study(config, sizes)
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"convergence_{config.scheme}.txt")
        with open(path, "w") as f:
            f.write(f"scheme: {config.scheme}\n")
            for n, err in zip(conv.sizes, conv.linf_pressure):
                f.write(f"N {n} linf_P {err:.6e}\n")
            f.write(f"fitted_order: {conv.fitted_order:.4f}\n")
        write_report(os.path.join(args.out, f"report_{config.scheme}.txt"),
                     conv.reports[-1], fitted_order=conv.fitted_order)
        print(f"scheme={config.scheme} sizes={conv.sizes} "
              f"fitted_order={conv.fitted_order:.3f}")
        return 0

    # riemann
    t = _merge(args, file_values, "t", 0.2)
    samples = _merge(args, file_values, "samples", 1000)
    gamma = _merge(args, file_values, "gamma", 1.4)
    sol = solve_riemann(RiemannState(1.0, 1.0, 0.0),
                        RiemannState(0.1, 0.125, 0.0), gamma)
    write_reference_csv(args.out, sol, t, samples)
    print(f"wrote {samples} samples at t={t} to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
