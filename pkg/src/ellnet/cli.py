"""Batch command-line interface.

Subcommands cover exact net tables, analytic parameters, sign prediction
and verification, distribution reports, denominator nets, the
sequence-to-curve construction, and the special-form signed sequence.

Exit codes: 0 success, 1 any verification mismatch, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from math import gcd

from mpmath import mp

from .curves import Curve, curve, curve_from_eds, division_poly_eval
from .denoms import denom_config, denom_value, shipsey_signs, signed_denominator_net
from .errors import EllnetError, NotOnCurveError, ParseError
from .nets import SCALED, NetTable, box_indices, net_config
from .signs import calibrated_predictor
from .stats import sign_counts

DIGITS = 30  # significant decimal digits for real-valued output


def parse_curve_spec(text: str) -> Curve:
    """Five whitespace-separated exact rationals a1 a2 a3 a4 a6.

    Rationals are written p/q in lowest terms, integers bare. Inputs not
    in lowest terms are normalized with a warning on stderr.
    """
    tokens = text.split()
    if len(tokens) != 5:
        raise ParseError(
            f"curve spec needs 5 coefficients, got {len(tokens)}", line=1
        )
    return curve(*[_parse_rational(t, 1, i + 1) for i, t in enumerate(tokens)])


def _parse_rational(token: str, line: int, column: int) -> Fraction:
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {token!r}: {exc}", line, column) from None
    if "/" in token:
        num, den = token.split("/", 1)
        try:
            if gcd(int(num), int(den)) not in (0, 1) or int(den) < 0:
                print(f"warning: {token} normalized to {value}", file=sys.stderr)
        except ValueError:
            pass
    return value


def parse_points_spec(text: str, c: Curve) -> list:
    """One point per line, 'x y' as exact rationals, each verified on c."""
    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"point needs 'x y', got {len(tokens)} fields", lineno)
        x = _parse_rational(tokens[0], lineno, 1)
        y = _parse_rational(tokens[1], lineno, 2)
        try:
            points.append(c.point(x, y))
        except NotOnCurveError as exc:
            raise ParseError(f"point not on the curve: {exc}", lineno) from None
    if not points:
        raise ParseError("no points given", line=1)
    return points


def _parse_box(text: str):
    dims = []
    for part in text.split(","):
        lo, _, hi = part.partition(":")
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise ParseError(f"bad box range {part!r}") from None
        if hi < lo:
            raise ParseError(f"empty box range {part!r}")
        dims.append((lo, hi))
    return tuple(dims)


def _nstr(x) -> str:
    return mp.nstr(x, DIGITS, strip_zeros=False)


def _emit_grid(out, box, value_at):
    """Tab-separated grid: header names the v1 columns, one labeled row per
    v2 from the top of the box downward."""
    (lo1, hi1), (lo2, hi2) = box
    print("v2\\v1\t" + "\t".join(str(a) for a in range(lo1, hi1 + 1)), file=out)
    for b in range(hi2, lo2 - 1, -1):
        cells = [str(value_at((a, b))) for a in range(lo1, hi1 + 1)]
        print(f"{b}\t" + "\t".join(cells), file=out)


def _load(args):
    with open(args.curve) as fh:
        c = parse_curve_spec(fh.read())
    with open(args.points) as fh:
        points = parse_points_spec(fh.read(), c)
    return c, points


def _cmd_net_table(args, out):
    c, points = _load(args)
    table = NetTable(net_config(c, points, SCALED if args.scaled else "analytic"))
    box = _parse_box(args.box)
    if len(box) == 1:
        (lo, hi), = box
        for n in range(lo, hi + 1):
            print(f"{n}\t{table.value((n,))}", file=out)
    else:
        _emit_grid(out, box, table.value)
    return 0


def _cmd_signs_predict(args, out):
    c, points = _load(args)
    pred = calibrated_predictor(c, points, args.precision, probe=args.probe)
    box = _parse_box(args.box)
    _emit_grid(out, box, lambda v: pred.predict(v) if any(v) else 0)
    return 0


def _cmd_signs_verify(args, out):
    c, points = _load(args)
    pred = calibrated_predictor(c, points, args.precision, probe=args.probe)
    table = NetTable(net_config(c, points, SCALED))
    agree = total = 0
    for v in box_indices(_parse_box(args.box)):
        if not any(v):
            continue
        w = table.value(v)
        exact = 1 if w > 0 else -1
        predicted = pred.predict(v)
        match = predicted == exact
        agree += match
        total += 1
        print("\t".join(map(str, (*v, predicted, exact, "ok" if match else "MISMATCH"))),
              file=out)
    print(f"agree {agree}/{total}", file=out)
    return 0 if agree == total else 1


def _cmd_analytic_params(args, out):
    from .analytic import analytic_context

    c, points = _load(args)
    ctx = analytic_context(c, points, args.precision)
    print(f"q\t{_nstr(ctx.q)}", file=out)
    for i, (u, b) in enumerate(zip(ctx.u, ctx.beta), start=1):
        print(f"u{i}\t{_nstr(u)}", file=out)
        print(f"beta{i}\t{_nstr(b)}", file=out)
    print(f"k\t{ctx.k}", file=out)
    return 0


def _cmd_stats_signs(args, out):
    c, points = _load(args)
    pred = calibrated_predictor(c, points, args.precision, probe=args.probe)
    box = _parse_box(args.box)
    if any(lo != 1 for lo, _ in box):
        raise ParseError("stats boxes are positive-orthant: use 1:V per coordinate")
    sides = tuple(hi for _, hi in box)
    report = sign_counts(lambda v: pred.parity(v), args.modulus, sides)
    print(f"modulus\t{report.m}", file=out)
    print(f"box\t{','.join(map(str, report.box))}", file=out)
    print(f"total\t{report.total}", file=out)
    for j, (cnt, freq) in enumerate(zip(report.counts, report.frequencies)):
        print(f"residue {j}\t{cnt}\t{_nstr(mp.mpf(freq.numerator) / freq.denominator)}",
              file=out)
    return 0


def _cmd_denom_net(args, out):
    c, points = _load(args)
    cfg = denom_config(c, points)
    if len(points) <= 2:
        pred = calibrated_predictor(c, points, args.precision, probe=args.probe)
    else:
        from .analytic import analytic_context
        from .signs import predictor_with_twist

        pred = predictor_with_twist(analytic_context(c, points, args.precision), 0)
    box = _parse_box(args.box)
    if len(box) == 2:
        _emit_grid(out, box, lambda v: signed_denominator_net(cfg, pred, v))
    else:
        for v in box_indices(box):
            w = signed_denominator_net(cfg, pred, v)
            print("\t".join(map(str, (*v, w))), file=out)
    return 0


def _cmd_eds_curve(args, out):
    c, anchor = curve_from_eds(args.w2, args.w3, args.w4)
    print(f"curve\t{c.a1} {c.a2} {c.a3} {c.a4} {c.a6}", file=out)
    print(f"point\t{anchor.x} {anchor.y}", file=out)
    # regenerate the sequence from 1, W2, W3, W4 and compare with psi values
    w = {0: Fraction(0), 1: Fraction(1), 2: args.w2, 3: args.w3, 4: args.w4}
    for m in range(3, 19):
        w[m + 2] = (w[m + 1] * w[m - 1] * w[2] ** 2 - w[3] * w[m] ** 2) / w[m - 2]
    ok = True
    for n in range(1, 21):
        got = division_poly_eval(c, n, anchor)
        match = got == w[n]
        ok &= match
        print(f"{n}\t{got}\t{'ok' if match else 'MISMATCH ' + str(w[n])}", file=out)
    return 0 if ok else 1


def _cmd_shipsey(args, out):
    with open(args.curve) as fh:
        c = parse_curve_spec(fh.read())
    seq = shipsey_signs(c, args.length)
    for n in range(1, args.length + 1):
        print(f"{n}\t{seq[n]}", file=out)
    return 0


def _rational(text):
    return Fraction(text)


def _probe(text):
    return tuple(int(t) for t in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellnet",
        description="Exact elliptic nets, sign prediction, and denominator nets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, points=True, box=True):
        p.add_argument("--curve", required=True, help="file with 'a1 a2 a3 a4 a6'")
        if points:
            p.add_argument("--points", required=True, help="file with one 'x y' per line")
        if box:
            p.add_argument("--box", required=True,
                           help="index ranges 'V1MIN:V1MAX[,V2MIN:V2MAX]'")
        p.add_argument("--precision", type=int, default=256, help="bits (64..4096)")
        p.add_argument("--probe", type=_probe, default=None,
                       help="calibration probe, e.g. '2,2'")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("net-table", help="exact net values over a box")
    common(p)
    p.add_argument("--scaled", action="store_true",
                   help="denominator-cleared normalization")
    p.set_defaults(fn=_cmd_net_table)

    p = sub.add_parser("signs-predict", help="predicted signs over a box")
    common(p)
    p.set_defaults(fn=_cmd_signs_predict)

    p = sub.add_parser("signs-verify", help="predicted vs exact signs over a box")
    common(p)
    p.set_defaults(fn=_cmd_signs_verify)

    p = sub.add_parser("analytic-params", help="q, u_i, beta_i, k for a configuration")
    common(p, box=False)
    p.set_defaults(fn=_cmd_analytic_params)

    p = sub.add_parser("stats-signs", help="residue distribution of predicted parities")
    common(p)
    p.add_argument("--modulus", type=int, default=2)
    p.set_defaults(fn=_cmd_stats_signs)

    p = sub.add_parser("denom-net", help="signed denominator net over a box")
    common(p)
    p.set_defaults(fn=_cmd_denom_net)

    p = sub.add_parser("eds-curve", help="curve and anchor point from W2 W3 W4")
    p.add_argument("w2", type=_rational)
    p.add_argument("w3", type=_rational)
    p.add_argument("w4", type=_rational)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_eds_curve)

    p = sub.add_parser("shipsey", help="signed denominator sequence for the special form")
    p.add_argument("--curve", required=True)
    p.add_argument("--length", type=int, default=20)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_shipsey)

    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    precision = getattr(args, "precision", 256)
    if not 64 <= precision <= 4096:
        print(f"error: precision {precision} outside [64, 4096]", file=sys.stderr)
        return 2
    try:
        if args.out:
            with open(args.out, "w") as out:
                return args.fn(args, out)
        return args.fn(args, sys.stdout)
    except (EllnetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
