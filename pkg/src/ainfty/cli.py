"""Batch command line front end.

Every subcommand re-runs the relevant checker before emitting anything and
fails loudly on violation.  Exit codes: 0 success, 1 parse or input error,
2 mathematical-invariant violation (with a named witness on stderr).
"""
from __future__ import annotations

import argparse
import math
import sys

from . import io_text as io
from .exactlin import QQ
from .complexes import homology_contraction, verify_complex
from .io_text import ParseError, _fmt_val


class InvariantViolation(Exception):
    pass


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(str(e))


def _require(rep, what):
    if not rep:
        raise InvariantViolation("%s: %s" % (what, rep.message))


def _emit_chain_labels(field, basis, chain):
    if not chain:
        return "0"
    return " + ".join("%s*%s" % (io.fmt_scalar(field, v), basis.label(k))
                      for k, v in sorted(chain.items()))


def _ops_table(S, word):
    """Rows `m3 a b c = chain` (or tensor rows for coalgebra kinds)."""
    basis = S.carrier.basis
    field = S.carrier.field
    out = []
    for n in sorted(S.ops):
        for keys, val in sorted(S.ops[n].items()):
            if not val:
                continue
            if S.kind == "algebra":
                lhs = "%s%d %s" % (word, n,
                                   " ".join(basis.label(k) for k in keys))
                out.append("%s = %s" % (lhs, _emit_chain_labels(field, basis, val)))
            else:
                terms = " + ".join(
                    "%s*(%s)" % (io.fmt_scalar(field, v),
                                 ",".join(basis.label(k) for k in t))
                    for t, v in sorted(val.items()))
                out.append("%s%d %s = %s" % (word, n, basis.label(keys), terms))
    return out


def _plot_diagram(D, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3))
    finite = [v for iv in D.intervals for v in iv[:2] if not math.isinf(v)]
    xmax = (max(finite) if finite else 1.0) * 1.1 + 0.1
    colors = {0: "C0", 1: "C1", 2: "C2", 3: "C3"}
    for row, (b, d, k) in enumerate(sorted(D.intervals,
                                           key=lambda iv: (iv[2], iv[0]))):
        right = xmax if math.isinf(d) else d
        style = "--" if math.isinf(d) else "-"
        ax.hlines(row, b, right, colors=colors.get(k, "C4"), linestyles=style)
    ax.set_xlabel("filtration value")
    ax.set_ylabel("bar")
    title = "barcode" if D.kind == "classical" else "Delta_%d barcode" % D.arity
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _write_out(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _plot_path(args, stem):
    if args.out:
        base = args.out.rsplit(".", 1)[0]
        return base + ".png"
    return stem + ".png"


def _cmd_homology(args):
    from .perturbation import check_contraction
    C = io.parse_complex(_read(args.input), io.parse_field(args.field))
    _require(verify_complex(C), "d^2 = 0 failed")
    H, con = homology_contraction(C)
    _require(check_contraction(con), "contraction identities failed")
    out = ["# betti"]
    out += ["%d %d" % (n, H.dim(n)) for n in H.basis.degrees()]
    out += ["# contraction", io.emit_contraction(con).rstrip("\n")]
    _write_out(args, "\n".join(out) + "\n")
    return 0


def _cmd_transfer(args):
    from .dgalg import check_dga, stasheff_defect
    from .transfer import gap_check, transfer_full
    A = io.parse_dga(_read(args.input), io.parse_field(args.field))
    _require(check_dga(A), "dg-algebra axioms failed")
    S, F, complete, st = transfer_full(A, max_arity=args.max_arity)
    for n in range(1, S.certified_arity + 1):
        rep = stasheff_defect(S, n)
        if not rep.is_zero():
            raise InvariantViolation("Stasheff defect at arity %d: %s"
                                     % (n, rep.message))
    out = _ops_table(S, "m")
    if complete:
        q = next(q for q in range(2, S.certified_arity // 2 + 2)
                 if 2 * q - 2 <= S.certified_arity and gap_check(st, q))
        out.append("complete (gap q=%d)" % q)
    else:
        out.append("incomplete (certified to arity %d)" % S.certified_arity)
    _write_out(args, "\n".join(out) + "\n")
    return 0


def _cmd_bpl(args):
    from .perturbation import (NilpotenceExceeded, Perturbation, bpl,
                               check_contraction)
    field = io.parse_field(args.field)
    con = io.parse_contraction(_read(args.input), field)
    _require(check_contraction(con), "contraction identities failed")
    delta = io.parse_perturbation(_read(args.perturbation), field, con.big)
    p = Perturbation(delta, con)
    _require(p.check(), "perturbation invalid")
    try:
        new, dd = bpl(con, p)
    except NilpotenceExceeded as e:
        raise InvariantViolation(str(e))
    _require(check_contraction(new), "perturbed contraction failed")
    _write_out(args, io.emit_contraction(new))
    return 0


def _cmd_tensor_trick(args):
    from .dgalg import check_dgc, stasheff_defect
    from .perturbation import check_contraction, tensor_trick
    field = io.parse_field(args.field)
    Cg = io.parse_dgc(_read(args.input), field)
    _require(check_dgc(Cg), "dg-coalgebra axioms failed")
    con = io.parse_contraction(_read(args.contraction), field)
    _require(check_contraction(con), "contraction identities failed")
    S = tensor_trick(Cg, con, max_arity=args.max_arity)
    for n in range(1, S.certified_arity + 1):
        rep = stasheff_defect(S, n)
        if not rep.is_zero():
            raise InvariantViolation("co-Stasheff defect at arity %d: %s"
                                     % (n, rep.message))
    _write_out(args, "\n".join(_ops_table(S, "delta")) + "\n")
    return 0


def _cloud_cmd(args, build):
    from .persistence import rips, cech
    pts = io.parse_points(_read(args.input))
    try:
        F = (rips if build == "rips" else cech)(pts, args.max_eps, args.max_dim)
    except ValueError as e:
        raise ParseError(str(e))
    _write_out(args, io.emit_filtered(F))
    return 0


def _cmd_barcode(args):
    from .persistence import barcode
    F = io.parse_filtered(_read(args.input))
    D = barcode(F, io.parse_field(args.field))
    _write_out(args, io.emit_diagram(D))
    if args.plot:
        _plot_diagram(D, _plot_path(args, "barcode"))
    return 0


def _cmd_bottleneck(args):
    from .persistence import bottleneck
    D1 = io.parse_diagram(_read(args.input))
    D2 = io.parse_diagram(_read(args.other))
    _write_out(args, _fmt_val(bottleneck(D1, D2)) + "\n")
    return 0


def _cmd_delta_barcode(args):
    from .persistence import delta_barcode
    F = io.parse_filtered(_read(args.input))
    D = delta_barcode(F, args.arity, args.degree,
                      max_arity=max(args.max_arity, args.arity))
    _write_out(args, io.emit_diagram(D))
    if args.plot:
        _plot_diagram(D, _plot_path(args, "delta_barcode"))
    return 0


def _parser():
    ap = argparse.ArgumentParser(prog="ainfty")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, field=True):
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--verbose", action="store_true")
        if field:
            p.add_argument("--field", default="rational",
                           help="prime p or 'rational'")

    p = sub.add_parser("homology", help="Betti table + contraction certificate")
    p.add_argument("input")
    common(p)

    p = sub.add_parser("transfer", help="transferred A-infinity operations")
    p.add_argument("input")
    p.add_argument("--max-arity", type=int, default=6)
    common(p)

    p = sub.add_parser("bpl", help="perturb a contraction")
    p.add_argument("input", help="contraction file")
    p.add_argument("perturbation", help="perturbation file (d lines)")
    common(p)

    p = sub.add_parser("tensor-trick", help="transferred coalgebra operations")
    p.add_argument("input", help="dg-coalgebra file")
    p.add_argument("contraction", help="contraction file")
    p.add_argument("--max-arity", type=int, default=4)
    common(p)

    for name in ("rips", "cech"):
        p = sub.add_parser(name, help="point cloud to filtered complex")
        p.add_argument("input")
        p.add_argument("--max-eps", type=float, required=True)
        p.add_argument("--max-dim", type=int, default=2)
        common(p, field=False)

    p = sub.add_parser("barcode", help="filtered complex to diagram")
    p.add_argument("input")
    p.add_argument("--plot", action="store_true",
                   help="also render the barcode to a png next to the output")
    common(p)

    p = sub.add_parser("bottleneck", help="distance between two diagrams")
    p.add_argument("input")
    p.add_argument("other")
    common(p, field=False)

    p = sub.add_parser("delta-barcode", help="Delta_n diagram + rank table")
    p.add_argument("input")
    p.add_argument("--arity", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--max-arity", type=int, default=0)
    p.add_argument("--plot", action="store_true",
                   help="also render the barcode to a png next to the output")
    common(p, field=False)

    return ap


_DISPATCH = {
    "homology": _cmd_homology,
    "transfer": _cmd_transfer,
    "bpl": _cmd_bpl,
    "tensor-trick": _cmd_tensor_trick,
    "rips": lambda a: _cloud_cmd(a, "rips"),
    "cech": lambda a: _cloud_cmd(a, "cech"),
    "barcode": _cmd_barcode,
    "bottleneck": _cmd_bottleneck,
    "delta-barcode": _cmd_delta_barcode,
}


def run(argv):
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    if getattr(args, "max_arity", 2) and getattr(args, "max_arity", 2) < 0:
        print("error: max arity must be >= 2", file=sys.stderr)
        return 1
    try:
        return _DISPATCH[args.cmd](args)
    except ParseError as e:
        print("parse error: %s" % e, file=sys.stderr)
        return 1
    except InvariantViolation as e:
        print("invariant violation: %s" % e, file=sys.stderr)
        return 2
    except ValueError as e:
        print("invariant violation: %s" % e, file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
