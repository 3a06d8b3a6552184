"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 validation or CP failure, 3 cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from itertools import product
from pathlib import Path

import numpy as np

from . import channels as chn
from . import erasing as ers
from . import io as wio
from .groups import CapExceeded, GroupSpec
from .subgroups import (
    count_automorphisms,
    enumerate_automorphisms,
    enumerate_group_subgroups,
    group_homomorphisms,
)
from .weyl import PhaseExponent, WeylIndex, weyl_matrix, weyl_spectrum

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dims(text: str) -> GroupSpec:
    try:
        return GroupSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid dims {text!r}: {exc}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return val


def _emit(args, obj, summary: str) -> None:
    """Write ``obj`` to ``--out`` and print the summary, or print ``obj`` to stdout."""
    if getattr(args, "out", None):
        wio.write_json(args.out, obj)
        print(summary)
    else:
        sys.stdout.write(wio.dumps(obj))


def _load(path):
    try:
        return wio.read_json(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationFailure(f"{path}: not valid JSON ({exc})") from None


def _load_channel(path) -> chn.WeylChannel:
    obj = _load(path)
    try:
        return wio.channel_from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationFailure(f"{path}: malformed channel ({exc})") from None


# -- group commands ---------------------------------------------------------------------


def cmd_subgroups(args) -> int:
    subs = enumerate_group_subgroups(args.dims)
    if args.count_only:
        print(len(subs))
        return EXIT_OK
    obj = {"group": args.dims.to_json(), "count": len(subs), "subgroups": [s.to_json()["elements"] for s in subs]}
    _emit(args, obj, f"subgroups={len(subs)}")
    return EXIT_OK


def cmd_automorphisms(args) -> int:
    comps = args.dims.decomposition.components
    counts = [count_automorphisms(c) for c in comps]
    total = math.prod(counts)
    if not args.enumerate:
        print(total)
        return EXIT_OK
    obj = {"group": args.dims.to_json(), "count": total, "components": []}
    for comp in comps:
        mats = [[list(row) for row in a.matrix] for a in enumerate_automorphisms(comp, cap=args.cap)]
        obj["components"].append(
            {"prime": comp.p, "exponents": list(comp.exponents), "matrices": mats}
        )
    _emit(args, obj, f"automorphisms={total}")
    return EXIT_OK


def cmd_homs(args) -> int:
    homs = group_homomorphisms(args.dims)
    if args.count_only:
        print(len(homs))
        return EXIT_OK
    obj = {
        "group": args.dims.to_json(),
        "count": len(homs),
        "basis": [list(b) for b in homs[0].domain.basis] if homs else [],
        "homomorphisms": [h.to_json() for h in homs],
    }
    _emit(args, obj, f"homomorphisms={len(homs)}")
    return EXIT_OK


def cmd_weyl(args) -> int:
    spec = args.dims
    m = args.m if args.m is not None else [0] * spec.n_particles
    n = args.n if args.n is not None else [0] * spec.n_particles
    try:
        idx = WeylIndex(spec, m, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.emit == "matrix":
        obj = {"dims": list(spec.dims), "m": list(idx.m), "n": list(idx.n), "matrix": wio.matrix_to_json(weyl_matrix(idx))}
        _emit(args, obj, f"dim={spec.total_dim}")
        return EXIT_OK
    per = [weyl_spectrum(a, b, d) for a, b, d in zip(idx.m, idx.n, spec.dims)]
    phases = []
    for combo in product(*per):
        ph = PhaseExponent(0, 1)
        for x in combo:
            ph = ph * x
        phases.append(ph)
    phases.sort(key=lambda ph: ph.fraction)
    obj = {
        "dims": list(spec.dims),
        "m": list(idx.m),
        "n": list(idx.n),
        "eigenvalues": [
            {"num": ph.fraction.numerator, "den": ph.fraction.denominator, "re": ph.value.real + 0.0, "im": ph.value.imag + 0.0}
            for ph in phases
        ],
    }
    _emit(args, obj, f"eigenvalues={len(phases)}")
    return EXIT_OK


# -- channel commands -------------------------------------------------------------------


def cmd_channel_check(args) -> int:
    ch = _load_channel(args.inputs[0])
    rep = chn.validate(ch, args.tol)
    if rep.ok:
        print(f"valid cp=true min_lambda={rep.min_lambda:.12g}")
        return EXIT_OK
    for msg in rep.messages:
        print(msg)
    return EXIT_INVALID


def cmd_channel_tau2lambda(args) -> int:
    ch = _load_channel(args.inputs[0])
    try:
        sp = chn.tau_to_lambda(ch, method=args.method, tol=args.tol)
    except chn.ChannelError as exc:
        raise ValidationFailure(str(exc)) from None
    cp = sp.is_cp(args.tol)
    _emit(args, wio.spectrum_to_json(sp), f"cp={str(cp).lower()} min_lambda={sp.values.min():.12g}")
    return EXIT_OK if cp else EXIT_INVALID


def cmd_channel_lambda2tau(args) -> int:
    obj = _load(args.inputs[0])
    try:
        sp = wio.spectrum_from_json(obj)
        ch = chn.lambda_to_tau(sp, method=args.method, tol=args.tol)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationFailure(str(exc)) from None
    _emit(args, wio.channel_to_json(ch), f"entries={ch.spec.size}")
    return EXIT_OK


def cmd_channel_choi(args) -> int:
    ch = _load_channel(args.inputs[0])
    mat = chn.choi_matrix(ch)
    obj = {"dims": list(ch.spec.dims), "choi": wio.matrix_to_json(mat)}
    _emit(args, obj, f"dim={mat.shape[0]}")
    return EXIT_OK


def cmd_channel_apply(args) -> int:
    ch = _load_channel(args.inputs[0])
    if not args.rho:
        raise UsageError("channel apply needs --rho")
    obj = _load(args.rho)
    try:
        rho = wio.matrix_from_json(obj["rho"] if isinstance(obj, dict) else obj)
        out = chn.apply(ch, rho)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationFailure(str(exc)) from None
    _emit(args, {"dims": list(ch.spec.dims), "rho": wio.matrix_to_json(out)}, f"trace={np.trace(out).real:.12g}")
    return EXIT_OK


def cmd_channel_compose(args) -> int:
    if len(args.inputs) < 2:
        raise UsageError("channel compose needs at least two --in files")
    chs = [_load_channel(p) for p in args.inputs]
    out = chs[-1]
    for ch in reversed(chs[:-1]):
        try:
            out = chn.compose(ch, out)
        except chn.ChannelError as exc:
            raise ValidationFailure(str(exc)) from None
    _emit(args, wio.channel_to_json(out), f"composed={len(chs)}")
    return EXIT_OK


def cmd_channel_iterate(args) -> int:
    ch = _load_channel(args.inputs[0])
    rep = chn.iterate(ch, max_steps=args.max_steps, tol=args.tol)
    obj = {
        "converged": rep.converged,
        "steps": rep.steps,
        "start": rep.start,
        "period": rep.period,
        "cycle": [wio.channel_to_json(c) for c in rep.cycle],
    }
    summary = f"converged={str(rep.converged).lower()} period={rep.period} start={rep.start}"
    _emit(args, obj, summary)
    return EXIT_OK


def cmd_channel_extreme(args) -> int:
    if args.inputs:
        ch = _load_channel(args.inputs[0])
        ok = chn.is_extreme(ch, args.tol)
        print(f"extreme={str(ok).lower()}")
        return EXIT_OK
    if args.dims is None:
        raise UsageError("channel extreme needs --in or --dims")
    spec = args.dims
    r = args.r if args.r is not None else [0] * spec.n_particles
    s = args.s if args.s is not None else [0] * spec.n_particles
    try:
        WeylIndex(spec, r, s)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ch = chn.extreme_channel(spec, r, s)
    _emit(args, wio.channel_to_json(ch), f"extreme r={r} s={s}")
    return EXIT_OK


def cmd_transform_export(args) -> int:
    spec = args.dims
    args_table = chn.transform_arguments(spec)

    def name(code):
        m, n = spec.split(spec.decode(code))
        return "(" + " ".join(map(str, m)) + "|" + " ".join(map(str, n)) + ")"

    labels = [name(c) for c in range(spec.size)]
    rows = [[labels[i]] + [repr(float(x)) for x in args_table[i]] for i in range(spec.size)]
    text = wio.table_to_csv(["tau\\lambda"] + labels, rows)
    if args.out:
        wio.atomic_write_text(args.out, text)
        print(f"entries={spec.size * spec.size}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- erasing commands -------------------------------------------------------------------


def cmd_erasing_enumerate(args) -> int:
    chans = ers.enumerate_erasing(args.dims, phases=args.phases)
    n_sub = len({c.subgroup for c in chans})
    if args.count_only:
        print(len(chans))
        return EXIT_OK
    if not args.out:
        raise UsageError("erasing enumerate needs --out DIR")
    outdir = Path(args.out)
    width = max(5, len(str(len(chans))))
    files = []
    for i, c in enumerate(chans):
        fname = f"channel_{i:0{width}d}.json"
        obj = wio.channel_to_json(c.channel)
        obj["subgroup_order"] = c.subgroup.order
        wio.write_json(outdir / fname, obj)
        files.append({"file": fname, "subgroup_order": c.subgroup.order, "phi": list(c.hom.phi), "codomain": c.hom.codomain})
    manifest = {
        "dims": list(args.dims.dims),
        "phases": args.phases,
        "channels": len(chans),
        "subgroups": n_sub,
        "files": files,
    }
    wio.write_json(outdir / "manifest.json", manifest)
    print(f"channels={len(chans)} subgroups={n_sub}")
    return EXIT_OK


def cmd_erasing_generators(args) -> int:
    spec = args.dims
    gens = ers.generating_channels(spec)
    units = ers.unitary_generators(spec)
    obj = {
        "dims": list(spec.dims),
        "generators": [wio.channel_to_json(g.channel) for g in gens],
        "unitary_generators": [wio.channel_to_json(u) for u in units],
    }
    _emit(args, obj, f"generators={len(gens)} unitary_generators={len(units)}")
    return EXIT_OK


def cmd_erasing_kraus(args) -> int:
    ch = _load_channel(args.inputs[0])
    if not chn.is_cp(ch, args.tol):
        raise ValidationFailure("channel is not completely positive")
    try:
        er = ers.erasing_from_channel(ch, args.tol)
    except chn.ChannelError as exc:
        raise ValidationFailure(str(exc)) from None
    if er is None:
        raise ValidationFailure("not an erasing channel: some |tau| is neither 0 nor 1")
    terms = ers.kraus_operators(er)
    obj = {
        "dims": list(ch.spec.dims),
        "kraus": [
            {"r": list(t.label[0]), "s": list(t.label[1]), "probability": t.probability, "matrix": wio.matrix_to_json(t.matrix)}
            for t in terms
        ],
    }
    _emit(args, obj, f"kraus={len(terms)} probability={terms[0].probability:.12g}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=_positive, default=chn.TOL, help="numerical tolerance (default 1e-9)")
    common.add_argument("--max-group", type=int, default=None, help="override the |G| cap for enumerations")
    common.add_argument("--out", default=None, help="output file (directory for erasing enumerate)")

    ap = _Parser(prog="weylkit", description="Weyl channels, their Choi spectra and erasing channels.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("subgroups", parents=[common], help="enumerate subgroups of the index group")
    p.add_argument("--dims", type=_dims, required=True)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_subgroups)

    p = sub.add_parser("automorphisms", parents=[common], help="count or list automorphisms")
    p.add_argument("--dims", type=_dims, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--count", action="store_true", help="print the closed-form count (default)")
    g.add_argument("--enumerate", action="store_true", help="list every automorphism matrix")
    p.add_argument("--cap", type=int, default=10**7, help="refuse enumerations longer than this")
    p.set_defaults(func=cmd_automorphisms)

    p = sub.add_parser("homs", parents=[common], help="homomorphisms onto the largest cyclic factors")
    p.add_argument("--dims", type=_dims, required=True)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_homs)

    p = sub.add_parser("weyl", parents=[common], help="a Weyl operator or its spectrum")
    p.add_argument("--dims", type=_dims, required=True)
    p.add_argument("--m", type=_ints, default=None)
    p.add_argument("--n", type=_ints, default=None)
    p.add_argument("--emit", choices=("matrix", "spectrum"), default="matrix")
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("channel", help="operations on channel files")
    csub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    actions = {
        "check": cmd_channel_check,
        "tau2lambda": cmd_channel_tau2lambda,
        "lambda2tau": cmd_channel_lambda2tau,
        "choi": cmd_channel_choi,
        "apply": cmd_channel_apply,
        "compose": cmd_channel_compose,
        "iterate": cmd_channel_iterate,
        "extreme": cmd_channel_extreme,
    }
    for name, func in actions.items():
        q = csub.add_parser(name, parents=[common])
        q.add_argument("--in", dest="inputs", nargs="+", required=name != "extreme", default=[])
        q.set_defaults(func=func)
        if name in ("tau2lambda", "lambda2tau"):
            q.add_argument("--method", choices=("fft", "direct"), default="fft")
        if name == "apply":
            q.add_argument("--rho", default=None, help="density matrix JSON (rows of [re, im])")
        if name == "iterate":
            q.add_argument("--max-steps", type=int, default=1000)
        if name == "extreme":
            q.add_argument("--dims", type=_dims, default=None)
            q.add_argument("--r", type=_ints, default=None)
            q.add_argument("--s", type=_ints, default=None)

    p = sub.add_parser("transform", help="the lambda-to-tau transform")
    tsub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    q = tsub.add_parser("export", parents=[common], help="CSV of entry arguments")
    q.add_argument("--dims", type=_dims, required=True)
    q.set_defaults(func=cmd_transform_export)

    p = sub.add_parser("erasing", help="erasing channels")
    esub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    q = esub.add_parser("enumerate", parents=[common])
    q.add_argument("--dims", type=_dims, required=True)
    q.add_argument("--phases", choices=("all", "none"), default="all")
    q.add_argument("--count-only", action="store_true")
    q.set_defaults(func=cmd_erasing_enumerate)
    q = esub.add_parser("generators", parents=[common])
    q.add_argument("--dims", type=_dims, required=True)
    q.set_defaults(func=cmd_erasing_generators)
    q = esub.add_parser("kraus", parents=[common])
    q.add_argument("--in", dest="inputs", nargs=1, required=True)
    q.set_defaults(func=cmd_erasing_kraus)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.max_group is not None:
        if args.max_group < 1:
            parser.error("--max-group must be positive")
        os.environ["WEYLKIT_MAX_GROUP"] = str(args.max_group)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"weylkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"weylkit: refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationFailure, chn.ChannelError) as exc:
        print(f"weylkit: invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
