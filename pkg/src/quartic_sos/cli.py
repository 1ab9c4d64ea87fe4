"""Command line front end: check, decompose, corpus, verify.

All deterministic output (reports, tables, certificates, JSON files) goes to
stdout or the requested file; wall-clock timings go to stderr so stdout is a
pure function of the input and the seed.

Exit codes: 0 success, 2 malformed input, 3 count certification failed,
4 hypothesis (smoothness or non-negativity) failed, 5 certificate
verification failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import List, Optional, Sequence, TextIO

from .classify import (
    HypothesisFailed,
    Representation,
    Theorem1Report,
    theorem1_check,
    verify_representation,
)
from .curves import numeric_singularity_oracle, nonnegativity_test, smoothness_test
from .forms import (
    FormError,
    QuadraticForm,
    TernaryQuartic,
    parse_quartic,
    poly_mul,
)
from .gram import build_family
from .solver import SolveConfig

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COUNTS = 3
EXIT_HYPOTHESIS = 4
EXIT_VERIFY = 5

_SEED_ENV = "QUARTIC_SOS_SEED"
_QUAD_MONOMIAL_NAMES = ("x^2", "y^2", "z^2", "y*z", "x*z", "x*y")


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------


def _fmt_num(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    z = complex(value)
    if z.imag != 0.0:
        return f"({z.real:.12g}{z.imag:+.12g}i)"
    return f"{z.real:.12g}"


def _form_text(form: QuadraticForm) -> str:
    # terms below display precision (12 significant digits) are omitted;
    # the JSON output keeps every coefficient in full precision
    floor = 1e-12 * max((abs(complex(c)) for c in form.coeffs), default=0.0)
    parts: List[str] = []
    for coeff, name in zip(form.coeffs, _QUAD_MONOMIAL_NAMES):
        if abs(complex(coeff)) <= floor:
            continue
        parts.append(f"{_fmt_num(coeff)}*{name}")
    if not parts:
        return "0"
    text = parts[0]
    for term in parts[1:]:
        text += " - " + term[1:] if term.startswith("-") else " + " + term
    return text


def _rep_lines(index: int, rep: Representation) -> List[str]:
    signs = " ".join("+" if s > 0 else "-" for s in rep.signs)
    kind = "sum of squares" if rep.is_sum_of_squares else (
        "real, mixed signs" if rep.is_real else "non-real"
    )
    tail = f"residual {rep.residual:.3g}"
    if rep.basepoint_free is not None:
        tail += ", basepoint-free" if rep.basepoint_free else ", shared base point"
    lines = [f"[{index}] signs ({signs})  {kind}  ({tail})"]
    for k, form in enumerate(rep.forms, start=1):
        lines.append(f"    p{k} = {_form_text(form)}")
    return lines


def _print_counts(report: Theorem1Report, out: TextIO) -> None:
    cr = report.count_report
    labels = {
        "complex_total": "classes",
        "real_total": "real classes",
        "psd_total": "sums of three squares",
    }
    for key, label in labels.items():
        status = "ok" if cr["pass"][key] else "MISMATCH"
        out.write(
            f"{label}: {cr['actual'][key]} "
            f"(expected {cr['expected'][key]}) [{status}]\n"
        )
    pairing = "ok" if cr["conjugate_pairing_ok"] else "MISMATCH"
    out.write(
        f"non-real classes: {cr['nonreal_total']} in "
        f"{cr['conjugate_pairs']} conjugate pairs [{pairing}]\n"
    )
    out.write(
        "split: {} sums of squares, {} mixed-sign real, {} non-real\n".format(
            report.sos_total, report.mixed_real_total, report.nonreal_total
        )
    )
    budget = "yes" if report.solution_set.budget_exhausted else "no"
    out.write(f"budget exhausted: {budget}\n")
    out.write(f"certified: {'pass' if report.passed else 'FAIL'}\n")


# ---------------------------------------------------------------------------
# input handling
# ---------------------------------------------------------------------------


def _coeff_from_json(value):
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, bool):
        raise ValueError("boolean is not a coefficient")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12) if value != int(value) else Fraction(int(value))
    raise ValueError(f"unsupported coefficient {value!r}")


def _quartic_from_json(data) -> TernaryQuartic:
    if not isinstance(data, dict):
        raise ValueError("coefficient map must be a JSON object")
    coeffs = {}
    for key, value in data.items():
        parts = [p.strip() for p in key.split(",")]
        if len(parts) != 3:
            raise ValueError(f"key {key!r} is not an exponent triple 'a,b,c'")
        expo = tuple(int(p) for p in parts)
        coeffs[expo] = _coeff_from_json(value)
    return TernaryQuartic(coeffs)


def _load_quartic(text: str, json_in: bool) -> TernaryQuartic:
    if not json_in:
        return parse_quartic(text)
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = json.loads(text)
    return _quartic_from_json(data)


def _resolve_seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get(_SEED_ENV)
    if env is not None:
        return int(env)
    return 0


def _fail_input(message: str) -> int:
    sys.stderr.write(f"error: {message}\n")
    return EXIT_INPUT


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_check(args: argparse.Namespace) -> int:
    try:
        f = _load_quartic(args.form, args.json_in)
    except (FormError, ValueError, OSError, json.JSONDecodeError) as exc:
        return _fail_input(str(exc))
    seed = _resolve_seed(args.seed)
    out = sys.stdout

    out.write(f"input: {f}\n")
    t0 = time.perf_counter()
    if f.is_rational():
        curve = smoothness_test(f)
        smooth_text = "yes" if curve.smooth else "no"
        out.write(f"smooth: {smooth_text} (exact, method {curve.method})\n")
        if curve.witness is not None:
            w = ", ".join(_fmt_num(c) for c in curve.witness)
            out.write(f"singular point near: ({w})\n")
        found_evidence = numeric_singularity_oracle(f, seed=seed)
        agree = found_evidence != curve.smooth
        out.write(
            f"numeric singularity search: "
            f"{'found' if found_evidence else 'none found'} "
            f"[{'agrees' if agree else 'DISAGREES'}]\n"
        )
        smooth = curve.smooth
    else:
        smooth = not numeric_singularity_oracle(f, seed=seed)
        out.write(
            "smooth: {} (numeric search only; exact test needs rational "
            "coefficients)\n".format("yes" if smooth else "no")
        )
    sys.stderr.write(f"timing smoothness: {time.perf_counter() - t0:.3f}s\n")

    t0 = time.perf_counter()
    family = build_family(f)
    positivity = nonnegativity_test(f, family, seed=seed)
    sys.stderr.write(f"timing nonnegativity: {time.perf_counter() - t0:.3f}s\n")
    if positivity.nonnegative is True:
        out.write("nonnegative: yes (sum-of-squares certificate found)\n")
        out.write(f"certificate floor: {positivity.ascent_max:.12g}\n")
    elif positivity.nonnegative is False:
        point = ", ".join(_fmt_num(c) for c in positivity.counterexample)
        out.write(
            f"nonnegative: no (f({point}) = "
            f"{positivity.counterexample_value:.12g})\n"
        )
    else:
        out.write("nonnegative: indeterminate at tolerance\n")
    eligible = smooth and positivity.nonnegative is True
    out.write(
        "eligible for certified counts: {}\n".format("yes" if eligible else "no")
    )
    return EXIT_OK


def _run_pipeline(f: TernaryQuartic, config: SolveConfig):
    report = theorem1_check(f, config)
    for stage, secs in report.timings.items():
        sys.stderr.write(f"timing {stage}: {secs:.3f}s\n")
    return report


def _report_json(f: TernaryQuartic, seed: int, report: Theorem1Report) -> dict:
    data = {"input": str(f), "seed": seed}
    data.update(report.to_json())
    return data


def _cmd_decompose(args: argparse.Namespace) -> int:
    try:
        f = _load_quartic(args.form, args.json_in)
    except (FormError, ValueError, OSError, json.JSONDecodeError) as exc:
        return _fail_input(str(exc))
    seed = _resolve_seed(args.seed)
    config = SolveConfig(restarts=args.restarts, master_seed=seed, threads=args.threads)
    out = sys.stdout
    out.write(f"input: {f}\n")
    try:
        report = _run_pipeline(f, config)
    except HypothesisFailed as exc:
        out.write(f"hypothesis failed: {exc.hypothesis} ({exc.detail})\n")
        out.write("no counts asserted\n")
        if args.json:
            payload = {
                "input": str(f),
                "seed": seed,
                "error": {"hypothesis": exc.hypothesis, "detail": exc.detail},
            }
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        return EXIT_HYPOTHESIS

    _print_counts(report, out)
    if args.show_all:
        chosen = list(report.representations)
        title = "all representation classes"
    elif args.sos_only:
        chosen = [r for r in report.representations if r.is_sum_of_squares]
        title = "sum-of-three-squares certificates"
    else:
        chosen = [r for r in report.representations if r.is_real]
        title = "real representation certificates"
    out.write(f"{title} ({len(chosen)}):\n")
    for i, rep in enumerate(chosen, start=1):
        for line in _rep_lines(i, rep):
            out.write(line + "\n")

    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(_report_json(f, seed, report), fh, indent=2, sort_keys=True)
            fh.write("\n")
        out.write(f"report written: {args.json}\n")
    return EXIT_OK if report.passed else EXIT_COUNTS


def random_corpus_quartic(seed: int, index: int) -> TernaryQuartic:
    """Seeded random smooth non-negative quartic.

    Sum of three random rational quadratic squares plus the strictly
    positive bump (1/100)(x^2+y^2+z^2)^2; redrawn from the same stream
    until the exact smoothness test passes.
    """
    import numpy as np

    rng = np.random.default_rng(np.random.SeedSequence([seed, 105, index]))
    bump = poly_mul(
        {(2, 0, 0): Fraction(1), (0, 2, 0): Fraction(1), (0, 0, 2): Fraction(1)},
        {(2, 0, 0): Fraction(1), (0, 2, 0): Fraction(1), (0, 0, 2): Fraction(1)},
    )
    while True:
        total: dict = {}
        for _ in range(3):
            coeffs = tuple(
                Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 4)))
                for _ in range(6)
            )
            q = QuadraticForm(coeffs).as_dict()
            if not q:
                continue
            for expo, c in poly_mul(q, q).items():
                total[expo] = total.get(expo, Fraction(0)) + c
        for expo, c in bump.items():
            total[expo] = total.get(expo, Fraction(0)) + Fraction(1, 100) * c
        f = TernaryQuartic({e: c for e, c in total.items() if c != 0})
        if smoothness_test(f).smooth:
            return f


def _cmd_corpus(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    out = sys.stdout
    entries = [("fermat", parse_quartic("x^4 + y^4 + z^4"))]
    for i in range(args.count):
        t0 = time.perf_counter()
        entries.append((f"random-{i}", random_corpus_quartic(seed, i)))
        sys.stderr.write(
            f"timing generate random-{i}: {time.perf_counter() - t0:.3f}s\n"
        )

    header = f"{'name':<10} {'classes':>7} {'real':>5} {'psd':>4} {'verdict':>8}"
    out.write(header + "\n")
    out.write("-" * len(header) + "\n")
    all_pass = True
    for name, f in entries:
        config = SolveConfig(
            restarts=args.restarts, master_seed=seed, threads=args.threads
        )
        t0 = time.perf_counter()
        try:
            report = theorem1_check(f, config)
            counts = report.solution_set.counts
            verdict = "pass" if report.passed else "FAIL"
            all_pass = all_pass and report.passed
            row = f"{name:<10} {counts[0]:>7} {counts[1]:>5} {counts[2]:>4} {verdict:>8}"
        except HypothesisFailed as exc:
            all_pass = False
            row = f"{name:<10} {'-':>7} {'-':>5} {'-':>4} {'FAIL':>8} ({exc.hypothesis})"
        sys.stderr.write(f"timing {name}: {time.perf_counter() - t0:.3f}s\n")
        out.write(row + "\n")
        out.flush()
    out.write(f"corpus: {'all pass' if all_pass else 'FAILURES'}\n")
    return EXIT_OK if all_pass else EXIT_COUNTS


def _extract_representations(data) -> List[Representation]:
    if isinstance(data, dict) and "representations" in data:
        data = data["representations"]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise ValueError("certificate JSON must be an object or a list")
    return [Representation.from_json(item) for item in data]


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        f = _load_quartic(args.form, args.json_in)
    except (FormError, ValueError, OSError, json.JSONDecodeError) as exc:
        return _fail_input(str(exc))
    try:
        with open(args.cert, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        reps = _extract_representations(data)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        return _fail_input(f"cannot read certificates: {exc}")
    if not reps:
        return _fail_input("no representations found in certificate file")

    out = sys.stdout
    out.write(f"input: {f}\n")
    failures = 0
    for i, rep in enumerate(reps, start=1):
        verdict = verify_representation(f, rep)
        status = "pass" if verdict.passed else "FAIL"
        mode = "exact" if verdict.exact else "float"
        line = (
            f"[{i}] {status}  residual {verdict.residual:.3g} ({mode})"
        )
        if verdict.basepoint_free is not None:
            line += ", basepoint-free" if verdict.basepoint_free else ", shared base point"
        out.write(line + "\n")
        if not verdict.passed:
            failures += 1
    out.write(
        f"verified {len(reps) - failures}/{len(reps)} representation(s)\n"
    )
    return EXIT_OK if failures == 0 else EXIT_VERIFY


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_form_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("form", help="quartic as an expression, e.g. 'x^4+y^4+z^4'")
    parser.add_argument(
        "--json-in",
        action="store_true",
        help="treat FORM as a JSON coefficient map (inline or a file path); "
        "keys are exponent triples 'a,b,c', values numbers or 'num/den'",
    )


def _add_seed_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"master seed (default: ${_SEED_ENV} or 0); fixes all output bytes",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quartic-sos",
        description="Quadratic representations of ternary quartics: "
        "count, classify and certify f = s1*p^2 + s2*q^2 + s3*r^2.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser(
        "check", help="smoothness and non-negativity report for a quartic"
    )
    _add_form_argument(p_check)
    _add_seed_argument(p_check)
    p_check.set_defaults(func=_cmd_check)

    p_dec = sub.add_parser(
        "decompose",
        help="find all representation classes and print certificates",
    )
    _add_form_argument(p_dec)
    _add_seed_argument(p_dec)
    p_dec.add_argument(
        "--restarts", type=int, default=20000, help="solver restarts (default 20000)"
    )
    p_dec.add_argument(
        "--threads", type=int, default=1, help="worker threads (result is identical)"
    )
    p_dec.add_argument("--json", metavar="PATH", help="write the full report as JSON")
    group = p_dec.add_mutually_exclusive_group()
    group.add_argument(
        "--all", dest="show_all", action="store_true", help="print all 63 classes"
    )
    group.add_argument(
        "--sos-only",
        action="store_true",
        help="print only the sum-of-three-squares certificates",
    )
    p_dec.set_defaults(func=_cmd_decompose)

    p_cor = sub.add_parser(
        "corpus",
        help="run the certified count on the Fermat quartic plus random "
        "smooth non-negative quartics",
    )
    _add_seed_argument(p_cor)
    p_cor.add_argument(
        "--count", type=int, default=5, help="number of random quartics (default 5)"
    )
    p_cor.add_argument(
        "--restarts", type=int, default=20000, help="solver restarts (default 20000)"
    )
    p_cor.add_argument(
        "--threads", type=int, default=1, help="worker threads (result is identical)"
    )
    p_cor.set_defaults(func=_cmd_corpus)

    p_ver = sub.add_parser(
        "verify", help="re-verify representation certificates from a JSON file"
    )
    _add_form_argument(p_ver)
    p_ver.add_argument(
        "--cert",
        metavar="PATH",
        required=True,
        help="certificate JSON: one representation, a list, or a full report",
    )
    p_ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
