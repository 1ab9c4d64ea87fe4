"""Unit tests for the hypothesis checks: smoothness, positivity, basepoints."""

from fractions import Fraction

import numpy as np

from quartic_sos.forms import (
    DEGREE4_MONOMIALS,
    QuadraticForm,
    TernaryQuartic,
    eval_quartic,
    parse_quartic,
)
from quartic_sos.gram import build_family, gram_to_quartic
from quartic_sos.curves import (
    PSD_TOL,
    basepoint_check,
    nonnegativity_test,
    numeric_singularity_oracle,
    smoothness_test,
)


def _random_quartic(rng) -> TernaryQuartic:
    coeffs = {}
    for e in DEGREE4_MONOMIALS:
        num = int(rng.integers(-9, 10))
        if num:
            coeffs[e] = Fraction(num, int(rng.integers(1, 4)))
    if not coeffs:
        coeffs[(4, 0, 0)] = Fraction(1)
    return TernaryQuartic(coeffs)


def test_smoothness_named_examples():
    assert smoothness_test(parse_quartic("x^4+y^4+z^4")).smooth
    assert smoothness_test(parse_quartic("x^4+y^4-z^4")).smooth
    status = smoothness_test(parse_quartic("(x^2+y^2+z^2)^2"))
    assert not status.smooth
    assert status.discriminant_sign == "zero"


def test_smoothness_consistency_field():
    status = smoothness_test(parse_quartic("x^4+y^4+z^4"))
    assert status.smooth == (status.discriminant_sign == "nonzero")
    assert status.method.startswith("macaulay")


def test_singular_curve_carries_witness():
    f = parse_quartic("(x^2+y^2+z^2)^2")
    status = smoothness_test(f)
    assert status.witness is not None
    x, y, z = status.witness
    # witness sits on the conic x^2 + y^2 + z^2 = 0 (unit-normalized point)
    assert abs(x * x + y * y + z * z) < 1e-8


def test_numeric_oracle_named_examples():
    assert numeric_singularity_oracle(parse_quartic("(x^2+y^2+z^2)^2"))
    assert not numeric_singularity_oracle(parse_quartic("x^4+y^4+z^4"))


def test_oracle_agrees_with_exact_test_on_random_quartics():
    rng = np.random.default_rng(np.random.SeedSequence([14, 0]))
    for _ in range(12):
        f = _random_quartic(rng)
        assert smoothness_test(f).smooth == (not numeric_singularity_oracle(f))


def test_nonnegativity_fermat_has_certificate():
    f = parse_quartic("x^4+y^4+z^4")
    family = build_family(f)
    status = nonnegativity_test(f, family)
    assert status.nonnegative is True
    cert = status.certificate
    assert cert is not None and cert.is_real
    # the certificate matrix reproduces f and is PSD within tolerance
    G = family.matrix_at(cert.lam)
    g = gram_to_quartic(G)
    worst = max(
        abs(complex(g.coefficient(e)) - complex(f.coefficient(e)))
        for e in set(g.coeffs) | set(f.coeffs)
    )
    assert worst < 1e-9
    ev = np.linalg.eigvalsh(G.to_array(complex).real)
    assert ev[0] >= -PSD_TOL * float(f.max_abs_coeff())


def test_nonnegativity_indefinite_has_counterexample():
    f = parse_quartic("x^4+y^4-z^4")
    status = nonnegativity_test(f, build_family(f))
    assert status.nonnegative is False
    assert status.counterexample is not None
    value = eval_quartic(f, status.counterexample)
    assert value < 0
    assert abs(value - status.counterexample_value) < 1e-9 * max(1.0, abs(value))


def test_nonnegativity_of_singular_but_nonnegative_quartic():
    # sum of squares of monomials; the curve is singular but f is non-negative
    f = parse_quartic("x^2*y^2 + y^2*z^2 + z^2*x^2")
    status = nonnegativity_test(f, build_family(f))
    assert status.nonnegative is True


def test_positivity_verdicts_are_scale_invariant():
    for text in ("x^4+y^4+z^4", "x^4+y^4-z^4"):
        f = parse_quartic(text)
        scaled = f.scaled(Fraction(25))
        a = nonnegativity_test(f, build_family(f))
        b = nonnegativity_test(scaled, build_family(scaled))
        assert a.nonnegative == b.nonnegative
    f = parse_quartic("x^4+y^4+z^4")
    assert smoothness_test(f.scaled(Fraction(25))).smooth == smoothness_test(f).smooth


def test_basepoint_check_named_examples():
    free = (QuadraticForm.parse("x^2"), QuadraticForm.parse("y^2"), QuadraticForm.parse("z^2"))
    assert basepoint_check(free)
    shared = (QuadraticForm.parse("x^2"), QuadraticForm.parse("x*y"), QuadraticForm.parse("x*z"))
    assert not basepoint_check(shared)
