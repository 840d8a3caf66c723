"""Command line entry points:

    kgz2d run <config> [--out DIR] [--threads N] [--snapshots]
    kgz2d audit <suite> [--out DIR]

`run` executes the experiment named in the config and writes deterministic
CSV artifacts plus a manifest; identical config and seed give byte-identical
outputs. `audit` runs the identity/property suites that need no config.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentConfig
from .evolution import DivergenceError, evolve
from .experiments import run_experiment
from .io import write_csv, write_manifest, write_snapshot

AUDIT_SUITES = ("transform", "special", "infrastructure")


def _write_result(result, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, (header, rows) in result["series"].items():
        write_csv(out_dir / f"{name}.csv", header, rows)
    lines = [f"{k},{v!r}" for k, v in sorted(result["checks"].items())]
    (out_dir / "checks.csv").write_text(
        "check,value\n" + "\n".join(lines) + "\n", encoding="utf-8")


def cmd_run(args):
    try:
        cfg = ExperimentConfig.from_file(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(args.out or f"out-{cfg.experiment}")
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        result = run_experiment(cfg)
        if args.snapshots or cfg.binary_stride:
            stride = cfg.binary_stride or cfg.snapshot_stride
            snaps = []

            def obs(state):
                path = out_dir / f"state-{state.t:012.6f}.kgz"
                write_snapshot(path, state)
                snaps.append(path)

            evolve(cfg.grid, cfg.data, cfg.t_end, cfg.dt, stride,
                   observer=obs, keep_states=False, with_m=False)
    except DivergenceError as exc:
        print(f"error: numerical divergence: {exc}", file=sys.stderr)
        _write_result({"series": {}, "checks": {"diverged": True}}, out_dir)
        write_manifest(out_dir)
        return 3
    except (ValueError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write_result(result, out_dir)
    write_manifest(out_dir)
    for k, v in sorted(result["checks"].items()):
        print(f"{k} = {v}")
    print(f"artifacts in {out_dir}")
    return 0


def _audit_transform(rows):
    from .transform import manufactured_corpus, transform_identity_residual

    worst = 0.0
    for i, (f, g) in enumerate(manufactured_corpus(25)):
        for gamma in (0, 1, 2):
            r = transform_identity_residual(f, g, gamma, n_points=4000)
            rows.append((f"transform_pair{i}_gamma{gamma}", r))
            worst = max(worst, r)
    ok = worst < 1e-9
    return ok, f"transformation identity worst residual {worst:.3e} (< 1e-9)"


def _audit_special(rows):
    from .special import asymptotic_gap, bessel_j0, sine_bessel_integral

    v1 = sine_bessel_integral(2.0, 1.0)
    v2 = sine_bessel_integral(5.0, 3.0)
    e1 = abs(v1 - 3.0**-0.5) * 3.0**0.5
    e2 = abs(v2 - 0.25) / 0.25
    s = np.geomspace(4.0, 1e4, 4096)
    gap = float(np.max(asymptotic_gap(s)))
    rows += [("sine_bessel_2_1_rel", e1), ("sine_bessel_5_3_rel", e2),
             ("asymptotic_gap_sup", gap), ("j0_at_0", bessel_j0(0.0))]
    ok = e1 < 1e-4 and e2 < 1e-4 and gap < 0.2
    return ok, (f"sine-Bessel rel errors {e1:.2e}, {e2:.2e} (< 1e-4); "
                f"gap sup {gap:.3f} (< 0.2)")


def _audit_infrastructure(rows):
    from .spectral import SpectralGrid, band_cutoff

    g = SpectralGrid(L=12.0, N=64)
    rng = np.random.default_rng(0)
    u = rng.standard_normal((64, 64))
    rt = float(np.max(np.abs(g.inverse(g.forward(u)) - u)) / np.max(np.abs(u)))
    pl = abs(g.norm_phys(u) - g.norm_spec(g.forward(u)) / (2 * np.pi)) / g.norm_phys(u)
    xi = g.xi_abs[g.xi_abs > 0]
    pu = float(np.max(np.abs(sum(band_cutoff(xi, k) for k in range(-40, 41)) - 1.0)))
    rows += [("fft_roundtrip", rt), ("plancherel", pl), ("lp_partition", pu)]
    ok = rt < 1e-12 and pl < 1e-12 and pu < 1e-14
    return ok, (f"round-trip {rt:.2e}, Plancherel {pl:.2e} (< 1e-12); "
                f"LP partition {pu:.2e} (< 1e-14)")


def cmd_audit(args):
    runners = {"transform": _audit_transform, "special": _audit_special,
               "infrastructure": _audit_infrastructure}
    suites = AUDIT_SUITES if args.suite == "all" else (args.suite,)
    out_dir = Path(args.out or "out-audit")
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    failed = False
    for suite in suites:
        ok, msg = runners[suite](rows)
        print(f"[{'PASS' if ok else 'FAIL'}] {suite}: {msg}")
        failed |= not ok
    write_csv(out_dir / "audit.csv", ("check", "value"), rows)
    write_manifest(out_dir)
    return 1 if failed else 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="kgz2d")
    parser.add_argument("--threads", type=int, default=1,
                        help="reserved; numerics run single-threaded for determinism")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the experiment named in a config file")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--snapshots", action="store_true",
                       help="also write binary field snapshots")
    p_run.set_defaults(func=cmd_run)

    p_audit = sub.add_parser("audit", help="run an identity/property audit suite")
    p_audit.add_argument("suite", choices=AUDIT_SUITES + ("all",))
    p_audit.add_argument("--out", default=None)
    p_audit.set_defaults(func=cmd_audit)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
