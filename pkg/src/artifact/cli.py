"""Batch front end: synthesis, evaluation, conversion and reduction runs.

Every command writes canonical JSON (sorted keys, rationals as "p/q"
strings).  Numbers that are approximations come as {"exact", "decimal",
"radius"} triples; the decimal is presentation only.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from . import __version__
from .b1_synthesis import (
    Halted as B1Halted,
    bw_lower_enumeration,
    eval_time,
    semidecide_bw_gt,
    spectrum_max_outside,
    synthesize_nonnegative,
)
from .dsl import DSLError, parse_seq_dsl
from .oracle_reductions import REPORT_BUDGETS, reduction_report
from .signals import (
    ComplexEnclosure,
    ComplexRational,
    TaylorSignal,
    _exact_seq,
    bandwidth_estimate,
    builtin_signal,
    conversion_parameters,
    eval_taylor,
    taylor_from_pi2,
    taylor_to_weierstrass,
    type_bound_violations,
    weierstrass_to_taylor,
)
from .toy_machine import CORPUS_ENV, Halted, corpus, parse_program, run_program

DIGITS = 12


class UsageError(Exception):
    pass


# ------------------------------------------------------------ formatting


def decimal(q: Fraction, digits: int = DIGITS) -> str:
    scaled = q * 10**digits
    n = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
    sign = "-" if n < 0 else ""
    whole, frac = divmod(abs(n), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def number(q, radius) -> dict:
    q, radius = Fraction(q), Fraction(radius)
    return {"exact": str(q), "decimal": decimal(q), "radius": str(radius)}


def enclosure(e: ComplexEnclosure) -> dict:
    return {
        "re": number(e.center.re, e.radius),
        "im": number(e.center.im, e.radius),
        "radius_note": "disk radius around (re, im)",
    }


def dump(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def emit(doc: dict, out: str | None) -> None:
    text = dump(doc)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------- parsing

_R = r"\d+(?:/\d+)?"
_COMPLEX = re.compile(rf"([-+]?{_R})(?:([-+])({_R})?i)?|([-+]?)({_R})?i")


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def parse_complex(text: str) -> ComplexRational:
    """a, a+bi, a-bi, bi or i with rational a, b."""
    m = _COMPLEX.fullmatch(text.replace(" ", ""))
    if not m:
        raise UsageError(f"not a Gaussian rational: {text!r}")
    try:
        if m.group(1) is not None:
            im = Fraction(0)
            if m.group(2):
                im = Fraction(m.group(3) or 1) * (-1 if m.group(2) == "-" else 1)
            return ComplexRational(Fraction(m.group(1)), im)
        return ComplexRational(0, Fraction(m.group(5) or 1) * (-1 if m.group(4) == "-" else 1))
    except ZeroDivisionError:
        raise UsageError(f"zero denominator in {text!r}") from None


def sequence(expr: str, arity: int):
    return parse_seq_dsl(expr, arity).sequence()


def signal_from_args(args) -> TaylorSignal:
    if args.signal and args.coeffs:
        raise UsageError("give either --signal or --coeffs, not both")
    if args.signal:
        try:
            return builtin_signal(args.signal)
        except (KeyError, ValueError) as e:
            raise UsageError(str(e.args[0]) if e.args else str(e)) from None
    if args.coeffs:
        if args.L is None:
            raise UsageError("--coeffs needs a type bound --L")
        spec = parse_seq_dsl(args.coeffs, 1)
        f = TaylorSignal(_exact_seq(spec, "closed-form"), args.L, spec.pretty())
        bad = type_bound_violations(f)
        if bad:
            raise UsageError(f"coefficients violate the type bound L={args.L} at n={bad}")
        return f
    raise UsageError("a signal is required: --signal NAME or --coeffs EXPR --L L")


def add_signal_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--signal", help="builtin: exp, sinc, zero, one, or exp:c")
    p.add_argument("--coeffs", help="DSL expression in m1 for the derivative a_n at 0")
    p.add_argument("--L", type=int, help="type bound for --coeffs")


# -------------------------------------------------------------- commands


def cmd_spectrum(args) -> dict:
    f = synthesize_nonnegative(sequence(args.gen, 1), args.k)
    doc = {"generator": args.gen, **f.to_json()}
    if args.sigma is not None:
        sigma = parse_rational(args.sigma)
        doc["sigma"] = str(sigma)
        doc["max_on_sigma_pi"] = str(spectrum_max_outside(f, sigma))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(f.spectrum.to_csv(DIGITS))
    return doc


def cmd_synth_b1(args) -> dict:
    r = sequence(args.gen, 1)
    f = synthesize_nonnegative(r, args.k)
    doc = {"generator": args.gen, **f.to_json()}
    bound = parse_rational(args.bound) if args.bound is not None else None
    doc["time_values"] = [
        {"t": str(t), **enclosure(eval_time(f, t, args.bits, args.untruncated, bound))}
        for t in map(parse_rational, args.t)
    ]
    doc["untruncated"] = args.untruncated
    if args.sigma is not None:
        sigma = parse_rational(args.sigma)
        res = semidecide_bw_gt(r, sigma, args.fuel)
        if isinstance(res, B1Halted):
            w = res.witness
            doc["bw_gt_sigma"] = {"halted": True, "k": w.k, "omega": str(w.omega), "value": str(w.value)}
        else:
            doc["bw_gt_sigma"] = {"halted": False, "fuel": res.fuel}
        doc["sigma"] = str(sigma)
    return doc


def cmd_synth_taylor(args) -> dict:
    if args.pi2:
        bound = parse_rational(args.bound)
        spec = parse_seq_dsl(args.pi2, 2)
        f = taylor_from_pi2(spec, bound)
        source = {"pi2": spec.pretty(), "bound": str(bound)}
    else:
        f = signal_from_args(args)
        source = {"signal": f.name}
    radius = Fraction(1, 1 << args.bits)
    coeffs = [{"n": n, **number(f.coefficient(n, args.bits), radius)} for n in range(args.count)]
    return {"source": source, "L": f.L, "bits": args.bits, "coefficients": coeffs}


def cmd_eval(args) -> dict:
    f = signal_from_args(args)
    z = parse_complex(args.z)
    if args.method == "taylor":
        e = eval_taylor(f, z, args.bits)
    else:
        e = taylor_to_weierstrass(f).evaluate(z, args.bits)
    return {"signal": f.name, "z": str(z), "bits": args.bits, "method": args.method, "value": enclosure(e)}


def cmd_convert(args) -> dict:
    f = signal_from_args(args)
    w = taylor_to_weierstrass(f)
    if args.to == "weierstrass":
        K, N = conversion_parameters(f.L, args.bits, args.J)
        p = w.polynomial(args.bits, args.J)
        return {
            "signal": f.name,
            "to": "weierstrass",
            "bits": args.bits,
            "J": args.J,
            "degree_bound": K,
            "coefficient_bits": N,
            "uniform_error": str(Fraction(1, 1 << args.bits)),
            "power_coefficients": [str(c) for c in p.coefficients],
        }
    back = weierstrass_to_taylor(w, f.L)
    radius = Fraction(1, 1 << args.bits)
    return {
        "signal": f.name,
        "to": "taylor",
        "bits": args.bits,
        "coefficients": [{"n": n, **number(back.coefficient(n, args.bits), radius)} for n in range(args.count)],
    }


def cmd_bw_bounds(args) -> dict:
    if args.gen:
        value = bw_lower_enumeration(sequence(args.gen, 1), args.fuel)
        return {
            "generator": args.gen,
            "fuel": args.fuel,
            "lower_bound": number(value, 0),
            "note": "certified lower bound: bw exceeds every accepted rational",
        }
    f = signal_from_args(args)
    est = bandwidth_estimate(f, args.fuel, args.bits)
    doc = {
        "signal": f.name,
        "fuel": args.fuel,
        "bits": args.bits,
        "estimate": number(est, Fraction(1, 1 << args.bits)),
        "note": "fuel-bounded estimate; the radius covers approximant error only",
    }
    if f.certificate is not None:
        doc["certificate"] = str(f.certificate)
    return doc


def cmd_reduce_totality(args) -> dict:
    if args.corpus != "default":
        os.environ[CORPUS_ENV] = args.corpus
    if args.budget < 1:
        raise UsageError("--budget must be positive")
    budgets = tuple(b for b in REPORT_BUDGETS if b < args.budget) + (args.budget,)
    return reduction_report(corpus(), budgets)


def cmd_corpus_run(args) -> dict:
    if args.source:
        with open(args.source) as fh:
            prog, name = parse_program(fh.read()), args.source
    else:
        entries = corpus()
        match = [e for e in entries if e.name == args.program or str(e.index) == args.program]
        if not match:
            raise UsageError(f"no corpus program {args.program!r}")
        prog, name = match[0].program, match[0].name
    rows = []
    for m in range(args.inputs):
        res = run_program(prog, m, args.fuel)
        if isinstance(res, Halted):
            rows.append({"input": m, "halted": True, "steps": res.steps, "output": res.output})
        else:
            rows.append({"input": m, "halted": False, "fuel": args.fuel})
    return {"program": name, "fuel": args.fuel, "runs": rows}


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="exact piecewise-linear spectrum of a B1 truncation")
    p.add_argument("--gen", required=True, help="nondecreasing generator r_m as a DSL expression in m1")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sigma", help="also report the spectrum maximum on [sigma, pi]")
    p.add_argument("--csv", help="write breakpoints as CSV")
    p.add_argument("--out")
    p.set_defaults(run=cmd_spectrum)

    p = sub.add_parser("synth-b1", help="B1 signal synthesis with time-domain values")
    p.add_argument("--gen", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", action="append", default=[], help="time point (repeatable)")
    p.add_argument("--bits", type=int, default=20)
    p.add_argument("--untruncated", action="store_true", help="radius also covers the series tail")
    p.add_argument("--bound", help="upper bound on the generator for the tail radius (default pi)")
    p.add_argument("--sigma", help="run the bw > sigma semi-decision")
    p.add_argument("--fuel", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(run=cmd_synth_b1)

    p = sub.add_parser("synth-taylor", help="Taylor coefficients of a builtin, DSL or inf-sup signal")
    add_signal_args(p)
    p.add_argument("--pi2", help="arity-2 DSL body r(m1, m2) whose inf-sup is the bandwidth")
    p.add_argument("--bound", default="4", help="range bound for --pi2 entries")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--bits", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(run=cmd_synth_taylor)

    p = sub.add_parser("eval", help="certified value of a signal at a Gaussian rational")
    add_signal_args(p)
    p.add_argument("--z", required=True, help="point such as 1/2, 3i or 1/2-3/4i")
    p.add_argument("--bits", type=int, default=20)
    p.add_argument("--method", choices=("taylor", "weierstrass"), default="taylor")
    p.add_argument("--out")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("convert", help="Taylor to Weierstrass polynomials, or the round trip back")
    add_signal_args(p)
    p.add_argument("--to", choices=("weierstrass", "taylor"), default="weierstrass")
    p.add_argument("--bits", type=int, default=16)
    p.add_argument("--J", type=int, default=1, help="disk radius for the polynomial")
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(run=cmd_convert)

    p = sub.add_parser("bw-bounds", help="bandwidth estimate of a signal or lower bound of a B1 generator")
    add_signal_args(p)
    p.add_argument("--gen", help="B1 generator; reports the lower enumeration instead")
    p.add_argument("--fuel", type=int, default=200)
    p.add_argument("--bits", type=int, default=16)
    p.add_argument("--out")
    p.set_defaults(run=cmd_bw_bounds)

    p = sub.add_parser("reduce-totality", help="totality reduction report over the program corpus")
    p.add_argument("--corpus", default="default", help=f"'default' or a corpus JSON path (also ${CORPUS_ENV})")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(run=cmd_reduce_totality)

    p = sub.add_parser("corpus-run", help="run a toy program on inputs 0..N-1")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--program", help="corpus name or index")
    g.add_argument("--source", help="program text file")
    p.add_argument("--inputs", type=int, default=8)
    p.add_argument("--fuel", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(run=cmd_corpus_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = args.run(args)
    except (UsageError, DSLError) as e:
        parser.print_usage(sys.stderr)
        print(f"artifact {args.command}: error: {e}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, LookupError, OSError) as e:
        print(f"artifact {args.command}: error: {e}", file=sys.stderr)
        return 1
    emit(doc, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
