"""Command-line front end: ``qsl compute|figure|witness|nonmarkov|validate``.

Exit codes: 0 success, 1 validation failure, 2 bad flags or unknown figure,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import channels, csvio, figures, validation
from .channels import ChannelConfig
from .errors import QslError, UnknownFigure
from .nonmarkov import nonmarkovianity
from .speedlimit import QslRequest, kappa_tau_sweep
from .statespec import parse_state
from .witness import coherent_bell_witness, ghz_witness

COMMANDS = ("compute", "figure", "witness", "nonmarkov", "validate")
DEFAULT_GRID = "0.05:20:200"


class UsageError(Exception):
    """Bad flag values found after argparse accepted the syntax."""


def parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise UsageError(f"--grid expects min:max:points, got {text!r}") from exc
    if not lo > 0:
        raise UsageError("--grid minimum must be positive (the bound is only defined for tau > 0)")
    if not (hi > lo and n >= 2) or not math.isfinite(hi):
        raise UsageError("--grid needs max > min and at least two points")
    return np.linspace(lo, hi, n)


def read_config(path) -> list[str]:
    """Turn a ``key = value`` file into flag tokens; blank lines and # comments are skipped."""
    tokens = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{num}: expected key = value")
        flag = "--" + key.strip().replace("_", "-")
        value = value.strip()
        if value.lower() in ("true", "yes", "on"):
            tokens.append(flag)
        elif value.lower() not in ("false", "no", "off"):
            tokens += [flag, value]
    return tokens


def _channel_flags(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--channel", choices=("oun", "rtn", "nmad"), required=required)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, help="OUN memory rate or NMAD spectral width (default 0.1 kappa)")
    p.add_argument("--c", "--a", dest="c", type=float, help="RTN coupling (default 0.6 kappa)")


def _bound_flags(p: argparse.ArgumentParser, tau: float = 1.0, method: str = "bures"):
    p.add_argument("--method", default=method, choices=("rp", "bures", "relative-purity", "relative_purity"))
    p.add_argument("--norm", default="op", choices=("op", "hs", "tr"))
    p.add_argument("--tau", type=float, default=tau)
    p.add_argument("--fidelity", default="super", choices=("super", "bures"))
    p.add_argument("--no-mixed-factor", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (or .csv file for compute)")
    common.add_argument("--grid", help="min:max:points, abscissae in units of kappa*tau")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--config", help="key = value file with defaults for any flag")

    parser = argparse.ArgumentParser(prog="qsl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="tau_QSL curve for one state and channel")
    _channel_flags(p)
    p.add_argument("--state", required=True, help="e.g. bloch:1,0,0  bell:phi+  ghz:3,2,+")
    _bound_flags(p)

    p = sub.add_parser("figure", parents=[common], help="reproduce a figure as CSVs and a plot script")
    p.add_argument("ids", nargs="+", help=f"figure ids or 'all' ({', '.join(figures.figure_ids())})")
    p.add_argument("--points", type=int, default=figures.DEFAULT_POINTS)

    p = sub.add_parser("witness", parents=[common], help="group GHZ-pair states by their tau_QSL curves")
    p.add_argument("--n", type=int, default=3, choices=(2, 3, 4))
    p.add_argument("--family", default="ghz", choices=("ghz", "mcb"))
    p.add_argument("--with-minus", action="store_true", help="include the minus-sign partner of each pair")
    p.set_defaults(channel="nmad")
    _channel_flags(p, required=False)
    _bound_flags(p, tau=math.pi / 4)

    p = sub.add_parser("nonmarkov", parents=[common], help="N_L, optimal Markovian rate and negative-rate intervals")
    _channel_flags(p)
    p.add_argument("--horizon", type=float, help="time horizon (default 20/kappa)")
    p.add_argument("--csv", help="also write gamma(t) on --grid (in kappa*t) to this file")

    p = sub.add_parser("validate", parents=[common], help="run the invariant suite")
    p.add_argument("--filter", help="comma-separated substrings of property names")
    p.add_argument("--mutate", choices=sorted(validation.MUTATIONS), help="inject a documented fault")
    p.add_argument("--list", action="store_true", help="list property names and exit")
    return parser


def expand_config(argv: list[str]) -> list[str]:
    """Insert config-file flags right after the command so explicit flags win."""
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    idx = next((i for i, a in enumerate(argv) if a in COMMANDS), None)
    if idx is None:
        return argv
    return argv[: idx + 1] + read_config(known.config) + argv[idx + 1 :]


def channel_from(args) -> ChannelConfig:
    kappa = args.kappa
    if args.channel == "rtn":
        return ChannelConfig.rtn(kappa, args.c if args.c is not None else 0.6 * kappa)
    lam = args.lam if args.lam is not None else 0.1 * kappa
    return ChannelConfig.oun(kappa, lam) if args.channel == "oun" else ChannelConfig.nmad(kappa, lam)


def request_from(args) -> QslRequest:
    return QslRequest(
        method=args.method,
        norm=args.norm,
        tau=args.tau,
        fidelity=args.fidelity,
        use_mixed_factor=not args.no_mixed_factor,
    )


def _emit(text: str, out, default_name: str, stdout) -> None:
    if not out:
        stdout.write(text)
        return
    path = Path(out)
    if path.suffix.lower() != ".csv":
        path = path / default_name
    csvio.write_text(path, text)
    print(f"wrote {path}", file=sys.stderr)


def cmd_compute(args, stdout) -> int:
    cfg = channel_from(args)
    rho0 = parse_state(args.state)
    grid = parse_grid(args.grid or DEFAULT_GRID)
    pts = kappa_tau_sweep(rho0, cfg, request_from(args), grid)
    _emit(csvio.render(csvio.point_rows(pts)), args.out, "compute.csv", stdout)
    return 0


def cmd_figure(args, stdout) -> int:
    ids = figures.figure_ids() if [i.lower() for i in args.ids] == ["all"] else args.ids
    for fig_id in ids:
        figures.get_figure(fig_id)  # fail on a bad id before any work is done
    out = args.out or "figures"
    for fig_id in ids:
        paths = figures.generate(fig_id, out, points=args.points, threads=max(1, args.threads))
        print(f"{fig_id}: {len(paths) - 1} curves -> {paths[0].parent}", file=stdout)
    return 0


def cmd_witness(args, stdout) -> int:
    cfg = channel_from(args)
    req = request_from(args)
    xs = parse_grid(args.grid or DEFAULT_GRID)
    if args.family == "mcb":
        verdict = coherent_bell_witness(cfg, xs, req)
    else:
        if cfg.kind != "nmad":
            raise UsageError("the GHZ witness runs on the nmad channel")
        verdict = ghz_witness(args.n, cfg, xs, req, with_minus=args.with_minus)
    print(f"channel: {cfg.label()}", file=stdout)
    print(f"states: {sum(len(g) for g in verdict.groups)}", file=stdout)
    for i, g in enumerate(verdict.groups, 1):
        print(f"group {i}: {' '.join(g)}", file=stdout)
    if verdict.degeneracies:
        deg = ", ".join(f"r={r}:{c}" for r, c in sorted(verdict.degeneracies.items()))
        print(f"degeneracies: {deg}", file=stdout)
    print(f"group sizes: {verdict.sizes} expected: {sorted(verdict.expected_sizes)}", file=stdout)
    print(f"intra_group_max_dev: {verdict.intra_group_max_dev:.3e}", file=stdout)
    gap = verdict.inter_group_min_gap
    print(f"inter_group_min_gap: {gap:.3e}" if math.isfinite(gap) else "inter_group_min_gap: none", file=stdout)
    ok = verdict.matches_binomial and verdict.separated
    print(f"verdict: {'consistent' if ok else 'inconsistent'} with the degeneracy counts", file=stdout)
    return 0


def cmd_nonmarkov(args, stdout) -> int:
    cfg = channel_from(args)
    horizon = args.horizon if args.horizon is not None else 20.0 / cfg.kappa
    if not horizon > 0:
        raise UsageError("--horizon must be positive")
    rep = nonmarkovianity(cfg, horizon)
    print(f"channel: {cfg.label()}", file=stdout)
    print(f"horizon: {csvio.fmt(rep.horizon)}", file=stdout)
    print(f"weight: {csvio.fmt(rep.weight)}", file=stdout)
    print(f"n_l: {csvio.fmt(rep.n_l)}", file=stdout)
    print(f"gamma_star: {csvio.fmt(rep.gamma_star)}", file=stdout)
    print(f"negative_intervals: {len(rep.negative_intervals)}", file=stdout)
    for a, b in rep.negative_intervals:
        print(f"  [{csvio.fmt(a)}, {csvio.fmt(b)}]", file=stdout)
    print(f"excluded_pole_windows: {len(rep.excluded)}", file=stdout)
    for a, b in rep.excluded:
        print(f"  [{csvio.fmt(a)}, {csvio.fmt(b)}]", file=stdout)
    print(f"regime: {'non-Markovian (negative rate)' if rep.negative_intervals else 'rate nonnegative'}", file=stdout)
    if args.csv:
        xs = parse_grid(args.grid or DEFAULT_GRID)
        ts = xs / cfg.kappa
        gam = np.atleast_1d(channels.rate_unchecked(cfg, ts))
        p = np.atleast_1d(channels.decoherence_function(cfg, ts))
        rows = [(x, t, pp, g) for x, t, pp, g in zip(xs, ts, p, gam)]
        csvio.write_text(args.csv, csvio.render(rows, ("kappa_t", "t", "p_t", "gamma")))
    return 0


def cmd_validate(args, stdout) -> int:
    if args.list:
        for prop in validation.PROPERTIES:
            print(prop.name, file=stdout)
        return 0
    selected = validation.select(args.filter)
    if not selected:
        raise UsageError(f"no property matches --filter {args.filter!r}")
    if args.mutate:
        print(f"mutation active: {args.mutate}", file=stdout)
    results, flags = validation.run_suite(args.filter, args.mutate)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail} ({r.seconds:.1f}s)", file=stdout)
    for f in flags:
        print(f"FLAG {f}", file=stdout)
    failed = [r.name for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} properties passed", file=stdout)
    if failed:
        print("failed: " + ", ".join(failed), file=stdout)
    return 1 if failed else 0


HANDLERS = {
    "compute": cmd_compute,
    "figure": cmd_figure,
    "witness": cmd_witness,
    "nonmarkov": cmd_nonmarkov,
    "validate": cmd_validate,
}


def main(argv=None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        argv = expand_config(argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qsl: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse reports usage errors this way
        return int(exc.code or 0)
    if getattr(args, "threads", 1) < 1:
        print("qsl: error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return HANDLERS[args.command](args, stdout)
    except (UsageError, UnknownFigure) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"qsl {args.command}: error: {msg}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"qsl {args.command}: numeric failure in {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (QslError, ValueError) as exc:
        print(f"qsl {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
