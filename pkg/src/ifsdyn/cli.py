"""Command-line entry point.

Every subcommand writes one CSV file (``--output``, ``-`` for stdout; the
default is ``<subcommand>.csv`` under ``$IFSDYN_OUTPUT_DIR`` or the current
directory) and prints a short summary. Exit codes: 0 success, 1 usage or
config error, 2 fixed-point iteration did not converge.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, ergodic, gallery, measure
from .io import ConfigError, load_model, write_csv, write_measure
from .symbolic import WordSampler

log = logging.getLogger("ifsdyn")

OUTPUT_DIR_ENV = "IFSDYN_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(s: str) -> list[int]:
    try:
        return [int(t) for t in s.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _model_args(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", choices=sorted(gallery.PRESETS), help="named preset system")
    g.add_argument("--config", metavar="PATH", help="JSON model config")
    p.add_argument("--output", "-o", metavar="PATH", help="CSV destination ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ifsdyn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("presets", help="list preset systems")

    p = sub.add_parser("verify", help="exact enumeration check of E[f_n] = E[h_n]")
    _model_args(p)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--cap", type=int, default=diagnostics.ENUMERATION_CAP)

    p = sub.add_parser("diagnose", help="diameter series or S/F/G mass estimates")
    _model_args(p)
    p.add_argument("--set", dest="which", choices=["S", "F", "G"], default="S")
    p.add_argument("--depths", type=_int_list, default=[50, 100, 200, 400])
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-start", type=int, default=None,
                   help="G window start (default n // 2)")
    p.add_argument("--series", type=int, metavar="LENGTH", default=None,
                   help="emit h_k, f_k, u_k/k for one sampled word of this length instead")

    p = sub.add_parser("invariant", help="fixed point of the transfer operator")
    _model_args(p)
    p.add_argument("--grid", type=float, default=1e-5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--init", default="midpoint",
                   help="'midpoint', 'dirac:X' or 'uniform:N' (default midpoint)")
    p.add_argument("--measure-output", metavar="PATH", default=None,
                   help="also write the final measure as (position, weight) CSV")

    p = sub.add_parser("chaos", help="chaos-game orbit and running average of x**k")
    _model_args(p)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x0", type=float, default=None)
    p.add_argument("--power", type=int, default=1, help="observable x**power")
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--every", type=int, default=1, help="emit every k-th row")

    p = sub.add_parser("attractor", help="certified coding-map samples")
    _model_args(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _output_path(args) -> str:
    if args.output:
        return args.output
    return str(Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{args.command}.csv")


def _load(args):
    if args.preset:
        return gallery.preset(args.preset), args.preset
    return load_model(args.config), args.config


def _meta(args, source, **extra) -> dict:
    meta = {"command": args.command, "model": source}
    for k, v in sorted(vars(args).items()):
        if k in ("command", "preset", "config", "output", "verbose", "measure_output"):
            continue
        if isinstance(v, list):
            v = ";".join(map(str, v))
        meta[k] = v
    meta.setdefault("seed", "none")
    meta.update(extra)
    return meta


def _initial_measure(init: str, model) -> measure.DiscreteMeasure:
    lo, hi = model.bounds
    kind, _, arg = init.partition(":")
    try:
        if kind == "midpoint":
            return measure.DiscreteMeasure.dirac(0.5 * (lo + hi))
        if kind == "dirac":
            x = float(arg)
            if not lo <= x <= hi:
                raise UsageError(f"--init dirac point {x} outside [{lo}, {hi}]")
            return measure.DiscreteMeasure.dirac(x)
        if kind == "uniform":
            return measure.DiscreteMeasure.uniform(lo, hi, int(arg))
    except ValueError:
        pass
    raise UsageError(f"bad --init {init!r}; use midpoint, dirac:X or uniform:N")


def cmd_presets(args) -> int:
    for name, factory in gallery.PRESETS.items():
        m = factory()
        print(f"{name}: {m.n_maps} maps on [{m.bounds[0]}, {m.bounds[1]}], weights {list(m.weights)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    model, source = _load(args)
    if args.depth < 1:
        raise UsageError("--depth must be at least 1")
    if model.n_maps**args.depth > args.cap:
        raise UsageError(f"{model.n_maps}^{args.depth} words exceeds the enumeration cap {args.cap}; "
                         "use 'diagnose' (Monte Carlo) for deeper words")
    rows = []
    for n in range(1, args.depth + 1):
        r = diagnostics.lemma1_check(model, n, cap=args.cap)
        rows.append((n, r.sum_f, r.sum_h, abs(r.sum_f - r.sum_h), r.max_abs_diff))
    write_csv(_output_path(args), _meta(args, source),
              ["n", "sum_f", "sum_h", "abs_diff", "max_termwise_diff"], rows)
    n, sf, sh, d, t = rows[-1]
    print(f"depth {n}: sum_f = {sf!r}, sum_h = {sh!r}, |diff| = {d:.3e}")
    print(f"max termwise |f_n(w) - h_n(reverse w)| over depths 1..{n}: {max(r[4] for r in rows):.3e}")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    model, source = _load(args)
    out = _output_path(args)
    if args.series is not None:
        if args.series < 1:
            raise UsageError("--series length must be at least 1")
        w = WordSampler(model, args.seed).sample(args.series)
        s = diagnostics.diam_series(model, w)
        write_csv(out, _meta(args, source), ["k", "h_k", "f_k", "cesaro_k"], s.rows())
        print(f"word of length {len(w)} (seed {args.seed}): h_n = {float(s.h[-1])!r}, "
              f"f_n = {float(s.f[-1])!r}, u_n/n = {float(s.cesaro[-1])!r}")
        return EXIT_OK
    if args.trials < 1 or not args.eps > 0 or any(n < 1 for n in args.depths):
        raise UsageError("need --trials >= 1, --eps > 0 and positive depths")
    rows = []
    for n in args.depths:
        if args.which == "S":
            est = diagnostics.estimate_S_mass(model, n, args.eps, args.trials, args.seed)
        elif args.which == "F":
            est = diagnostics.estimate_F_mass(model, n, args.eps, args.trials, args.seed)
        else:
            ws = args.window_start if args.window_start is not None else max(1, n // 2)
            if not 1 <= ws < n:
                raise UsageError(f"G window start {ws} must satisfy 1 <= start < n = {n}")
            est = diagnostics.estimate_G_mass(model, n, ws, args.eps, args.trials, args.seed)
        rows.append((n, args.eps, est.estimate, est.stderr, args.trials, args.seed))
        print(f"P_{args.which}(n={n}, eps={args.eps}) = {est.estimate:.4f} ± {est.stderr:.4f}")
    write_csv(out, _meta(args, source), ["n", "eps", "estimate", "stderr", "trials", "seed"], rows)
    return EXIT_OK


def cmd_invariant(args) -> int:
    model, source = _load(args)
    if not args.grid > 0 or not args.tol > 0 or args.max_iter < 1:
        raise UsageError("need --grid > 0, --tol > 0 and --max-iter >= 1")
    nu0 = _initial_measure(args.init, model)
    res = measure.fixed_point(model, nu0, tol=args.tol, max_iter=args.max_iter, grid=args.grid)
    meta = _meta(args, source, converged=res.converged)
    write_csv(_output_path(args), meta, ["iteration", "distance", "atom_count"],
              ((i, d, c) for i, (d, c) in enumerate(zip(res.history, res.atom_counts), start=1)))
    if args.measure_output:
        write_measure(args.measure_output, res.measure, meta)
    m1, m2 = measure.moment(res.measure, 1), measure.moment(res.measure, 2)
    status = "converged" if res.converged else "NOT converged"
    print(f"{status} after {res.iterations} iterations (last distance {res.history[-1]:.3e}, "
          f"{len(res.measure)} atoms)")
    print(f"moments: m1 = {m1:.6f}, m2 = {m2:.6f}")
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_chaos(args) -> int:
    model, source = _load(args)
    if args.n < 1 or args.every < 1 or not 0 <= args.burn_in < args.n:
        raise UsageError("need --n >= 1, --every >= 1 and 0 <= --burn-in < --n")
    lo, hi = model.bounds
    x0 = 0.5 * (lo + hi) if args.x0 is None else args.x0
    if not lo <= x0 <= hi:
        raise UsageError(f"--x0 {x0} outside [{lo}, {hi}]")
    w = WordSampler(model, args.seed).sample_array(args.n)
    xs = ergodic.orbit(model, x0, w)
    avg = ergodic.birkhoff_average(model, ergodic.Monomial(args.power), x0, w, burn_in=args.burn_in)
    js = np.arange(args.burn_in + 1, args.n + 1)
    keep = slice(args.every - 1, None, args.every)
    rows = zip(js[keep].tolist(), xs[args.burn_in:][keep].tolist(), avg[keep].tolist())
    write_csv(_output_path(args), _meta(args, source, x0=x0), ["j", "x_j", "running_average"], rows)
    print(f"running average of x**{args.power} after {args.n} steps: {float(avg[-1])!r}")
    return EXIT_OK


def cmd_attractor(args) -> int:
    model, source = _load(args)
    if args.trials < 1 or args.depth < 1 or not args.eps > 0:
        raise UsageError("need --trials >= 1, --depth >= 1 and --eps > 0")
    if any(p == 0 for p in model.weights):
        log.warning("model has zero-weight maps; samples only cover the support of the weighted maps")
    s = ergodic.attractor_sample(model, args.trials, args.depth, args.eps, args.seed)
    meta = _meta(args, source, certified=s.certified, uncertified=s.uncertified)
    write_csv(_output_path(args), meta, ["point", "radius"], s.pairs())
    print(f"certified {s.certified}/{s.trials} words (fraction {s.certified_fraction:.4f}); "
          f"{s.uncertified} uncertified")
    return EXIT_OK


COMMANDS = {
    "presets": cmd_presets,
    "verify": cmd_verify,
    "diagnose": cmd_diagnose,
    "invariant": cmd_invariant,
    "chaos": cmd_chaos,
    "attractor": cmd_attractor,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
