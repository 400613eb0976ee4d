"""Command-line front end: ``weilzeta <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 bad input data.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

from . import __version__, errors
from .cmfield import DEFAULT_PRECISION_BITS, build_fan, load_field, resolve_spec, uncovered_samples
from .exactmath import DEFAULT_SEED, primes_up_to

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    seed: int = DEFAULT_SEED
    threads: int = 1
    precision_bits: int = DEFAULT_PRECISION_BITS
    output: Optional[str] = None


def _int_auto(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get("WEILZETA_SEED")
    env_threads = os.environ.get("WEILZETA_THREADS")
    ap = argparse.ArgumentParser(prog="weilzeta", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--seed", type=_int_auto,
                    default=_int_auto(env_seed) if env_seed else DEFAULT_SEED,
                    help="seed for randomized factoring (env WEILZETA_SEED, default 0x5EED)")
    ap.add_argument("--threads", type=int,
                    default=int(env_threads) if env_threads else (os.cpu_count() or 1),
                    help="worker count (env WEILZETA_THREADS); accepted for compatibility, work runs serially")
    ap.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION_BITS,
                    help="working precision for embeddings (>= 80)")
    ap.add_argument("--output", "-o", help="write results here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("field", help="field data")
    fsub = p.add_subparsers(dest="field_command", required=True, metavar="info")
    fi = fsub.add_parser("info", help="print validated field tables")
    fi.add_argument("spec", help="preset name or path to a JSON spec")

    p = sub.add_parser("fan", help="rays and maximal cones of the toric fan")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--check", action="store_true",
                   help="sample 10^4 points for completeness; exit 1 if any is uncovered")

    p = sub.add_parser("split", help="splitting of primes")
    p.add_argument("spec")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--p", type=int)
    grp.add_argument("--up-to", type=int)

    p = sub.add_parser("weil", help="list Weil numbers of norm n")
    p.add_argument("spec")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("count", help="counting function N(K, x) and bounded-height counts")
    p.add_argument("spec")
    p.add_argument("--x-max", type=int, required=True)
    p.add_argument("--step", type=int, default=1)

    p = sub.add_parser("coeffs", help="ideal counts b_K(n)")
    p.add_argument("spec")
    p.add_argument("--N", type=int, required=True)

    p = sub.add_parser("euler", help="local factor Z_p(K, s) as numerator / denominator in t = p^-s")
    p.add_argument("spec")
    p.add_argument("--p", type=int, required=True)

    p = sub.add_parser("theta", help="Frobenius trace theta(F_p)")
    p.add_argument("spec")
    p.add_argument("--p", type=int, required=True)

    p = sub.add_parser("rho", help="Chebotarev estimate of rho_K")
    p.add_argument("spec")
    p.add_argument("--bound", type=int, default=100_000)

    p = sub.add_parser("fit", help="leading constant of N(K, x)")
    p.add_argument("spec")
    p.add_argument("--x-max", type=int, required=True)
    p.add_argument("--rho", type=int, required=True)
    p.add_argument("--step", type=int, default=None)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("spec")
    p.add_argument("suite", choices=("bridge", "prime-coeff", "g2", "height-zeta", "all"))
    p.add_argument("--N", type=int, default=500)
    return ap


def _field(ref: str, cfg: RunConfig):
    preset = resolve_spec(ref)
    return load_field(preset.spec, cfg.precision_bits), preset.meta


def _writer(out: io.TextIOBase):
    return csv.writer(out, lineterminator="\n")


def cmd_field_info(args, cfg, out) -> int:
    f, meta = _field(args.spec, cfg)
    print(f"name: {f.name}", file=out)
    print(f"g: {f.g}", file=out)
    print(f"minpoly (ascending): {list(f.spec.minpoly)}", file=out)
    print(f"disc(minpoly): {f.disc_minpoly}", file=out)
    if f.spec.field_disc is not None:
        print(f"field_disc: {f.spec.field_disc}", file=out)
    print(f"bad primes: {sorted(f.bad_primes)}", file=out)
    print(f"ramified primes: {sorted(f.ramified_primes)}", file=out)
    print(f"w_K: {f.w_K}", file=out)
    for i, q in enumerate(f.quadrics, start=1):
        print(f"Q{i} = {q}", file=out)
    print("gram:", file=out)
    for row in f.gram:
        print("  " + " ".join(str(c) for c in row), file=out)
    if meta:
        print("meta: " + json.dumps({k: v for k, v in meta.items() if k != "provenance"}, sort_keys=True),
              file=out)
    return EXIT_OK


def cmd_fan(args, cfg, out) -> int:
    fan = build_fan(args.g, seed=cfg.seed)
    w = _writer(out)
    w.writerow(["cone", "apex", "rays"])
    for i, cone in enumerate(fan.max_cones):
        w.writerow([i, cone[0], " ".join(str(r) for r in cone)])
    if args.check:
        missed = uncovered_samples(fan, seed=cfg.seed)
        print(f"rays={len(fan.rays)} cones={len(fan.max_cones)} uncovered_samples={len(missed)}/10000",
              file=sys.stderr)
        return EXIT_VERIFY if len(missed) else EXIT_OK
    return EXIT_OK


def cmd_split(args, cfg, out) -> int:
    from .splitting import Bad, class_label, classify_prime, splitting_type

    f, _ = _field(args.spec, cfg)
    primes = [args.p] if args.p is not None else primes_up_to(args.up_to)
    w = _writer(out)
    w.writerow(["p", "class", "r_or_rprime", "places"])
    for p in primes:
        cls = classify_prime(f, p, cfg.seed)
        name, r = class_label(cls)
        places = "" if isinstance(cls, Bad) else splitting_type(f, p, cfg.seed).describe()
        w.writerow([p, name, r, places])
    return EXIT_OK


def cmd_weil(args, cfg, out) -> int:
    from .weilenum import enumerate_weil

    f, _ = _field(args.spec, cfg)
    w = _writer(out)
    w.writerow([f"x{i}" for i in range(1, f.degree + 1)] + ["n"])
    for wn in enumerate_weil(f, args.n):
        w.writerow(list(wn.coords) + [wn.n])
    return EXIT_OK


def cmd_count(args, cfg, out) -> int:
    from .weilenum import count_table

    f, _ = _field(args.spec, cfg)
    table = count_table(f, args.x_max, args.step, heights=True)
    w = _writer(out)
    w.writerow(["x", "N", "N_height"])
    for row in zip(table.grid, table.counts, table.heights_counts):
        w.writerow(row)
    return EXIT_OK


def cmd_coeffs(args, cfg, out) -> int:
    from .dirichlet import z_coeffs

    f, _ = _field(args.spec, cfg)
    b = z_coeffs(f, args.N)
    w = _writer(out)
    w.writerow(["n", "b_K"])
    for n in range(1, args.N + 1):
        w.writerow([n, str(b[n])])
    return EXIT_OK


def cmd_euler(args, cfg, out) -> int:
    from .dirichlet import euler_factor_Z

    f, _ = _field(args.spec, cfg)
    e = euler_factor_Z(f, args.p)
    print(f"p: {e.p}", file=out)
    print(f"numerator: {list(e.numerator)}", file=out)
    print(f"denominator: {list(e.denominator)}", file=out)
    return EXIT_OK


def cmd_theta(args, cfg, out) -> int:
    from .analysis import theta_frob

    f, _ = _field(args.spec, cfg)
    print(theta_frob(f, args.p), file=out)
    return EXIT_OK


def cmd_rho(args, cfg, out) -> int:
    from .analysis import rho_estimate

    f, _ = _field(args.spec, cfg)
    r = rho_estimate(f, args.bound)
    print(f"prime_bound: {r.prime_bound}", file=out)
    print(f"sample_size: {r.sample_size}", file=out)
    print(f"mean: {r.mean}", file=out)
    print(f"mean_approx: {float(r.mean):.6f}", file=out)
    print(f"rounded: {r.rounded}", file=out)
    print(f"deviation_approx: {float(r.deviation):.6f}", file=out)
    print(f"max_dev_window_approx: {float(r.max_dev_window):.6f}", file=out)
    return EXIT_OK


def cmd_fit(args, cfg, out) -> int:
    from .analysis import fit_asymptotic
    from .weilenum import count_table

    f, _ = _field(args.spec, cfg)
    step = args.step or max(1, args.x_max // 100)
    res = fit_asymptotic(count_table(f, args.x_max, step), args.rho)
    print(f"c_estimate_approx: {res.c_estimate:.6f}", file=out)
    print(f"stability_approx: {res.stability:.6f}", file=out)
    return EXIT_OK


def cmd_verify(args, cfg, out) -> int:
    from .analysis import run_suite

    f, meta = _field(args.spec, cfg)

    def reflex_loader(ref: str):
        return load_field(resolve_spec(ref).spec, cfg.precision_bits)

    reports = run_suite(f, meta, args.suite, args.N, reflex_loader=reflex_loader)
    for rep in reports:
        print(rep.summary(), file=out)
    if not reports:
        print("no applicable checks", file=out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


COMMANDS = {
    "field": cmd_field_info,
    "fan": cmd_fan,
    "split": cmd_split,
    "weil": cmd_weil,
    "count": cmd_count,
    "coeffs": cmd_coeffs,
    "euler": cmd_euler,
    "theta": cmd_theta,
    "rho": cmd_rho,
    "fit": cmd_fit,
    "verify": cmd_verify,
}


def dispatch(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    if args.precision_bits < 80:
        parser.print_usage(sys.stderr)
        print("weilzeta: error: --precision-bits must be >= 80", file=sys.stderr)
        return EXIT_USAGE
    cfg = RunConfig(args.seed, args.threads, args.precision_bits, args.output)
    buf = io.StringIO()
    try:
        code = COMMANDS[args.command](args, cfg, buf)
    except (errors.WeilZetaError, ValueError, OSError, json.JSONDecodeError, OverflowError) as exc:
        print(f"weilzeta: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    text = buf.getvalue()
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
