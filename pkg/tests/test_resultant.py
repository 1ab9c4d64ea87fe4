"""Unit tests for the exact Macaulay resultant machinery."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from quartic_sos.forms import DEGREE4_MONOMIALS, TernaryQuartic, gradient, parse_quartic
from quartic_sos.resultant import (
    RESULTANT_ORDERINGS,
    DegenerateResultantError,
    charpoly_int,
    det_bareiss,
    exact_rank,
    gradient_resultant_is_nonzero,
    gradient_resultant_is_nonzero_gcp,
    integer_rescale,
    macaulay_determinants,
    macaulay_matrix,
    monomials_of_degree,
    permute_variables,
)


def _det_reference(rows):
    # Leibniz expansion; fine for n <= 6
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = 1
        for i in range(n):
            term *= rows[i][perm[i]]
        total += sign * term
    return total


def _random_quartic(rng) -> TernaryQuartic:
    coeffs = {}
    for e in DEGREE4_MONOMIALS:
        num = int(rng.integers(-9, 10))
        if num:
            coeffs[e] = Fraction(num, int(rng.integers(1, 4)))
    if not coeffs:
        coeffs[(4, 0, 0)] = Fraction(1)
    return TernaryQuartic(coeffs)


def test_det_bareiss_matches_leibniz():
    rng = np.random.default_rng(np.random.SeedSequence([13, 0]))
    for n in (1, 2, 3, 4, 5):
        for _ in range(4):
            rows = [[int(rng.integers(-9, 10)) for _ in range(n)] for _ in range(n)]
            assert det_bareiss(rows) == _det_reference(rows)


def test_det_bareiss_singular_matrix():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    assert det_bareiss(rows) == 0


def test_exact_rank_known_cases():
    assert exact_rank([[1, 2], [2, 4]]) == 1
    assert exact_rank([[1, 0], [0, 1]]) == 2
    assert exact_rank([[Fraction(1, 2), Fraction(1, 3)]]) == 1
    assert exact_rank([[0, 0], [0, 0]]) == 0


def test_monomials_of_degree_seven_count():
    mons = monomials_of_degree(7)
    assert len(mons) == 36
    assert all(sum(e) == 7 for e in mons)
    assert len(set(mons)) == 36


def test_macaulay_matrix_shape():
    cubics = list(gradient(parse_quartic("x^4+y^4+z^4")))
    M = macaulay_matrix(cubics)
    assert len(M) == 36 and all(len(r) == 36 for r in M)


def test_macaulay_determinants_fermat_nonzero():
    cubics = list(gradient(parse_quartic("x^4+y^4+z^4")))
    d_full, d_minor = macaulay_determinants(cubics)
    assert d_full != 0 and d_minor != 0


def test_gradient_resultant_named_examples():
    assert gradient_resultant_is_nonzero(parse_quartic("x^4+y^4+z^4"))
    assert gradient_resultant_is_nonzero(parse_quartic("x^4+y^4-z^4"))
    # for the perfect square both Macaulay determinants vanish under every
    # ordering; the quotient cannot decide and the GCP fallback must
    square = parse_quartic("(x^2+y^2+z^2)^2")
    with pytest.raises(DegenerateResultantError):
        gradient_resultant_is_nonzero(square)
    assert not gradient_resultant_is_nonzero_gcp(square)


def test_gcp_decision_agrees_with_quotient():
    rng = np.random.default_rng(np.random.SeedSequence([13, 1]))
    cases = [
        parse_quartic("x^4+y^4+z^4"),
        parse_quartic("x^4+y^4-z^4"),
        parse_quartic("(x^2+y^2+z^2)^2"),
        parse_quartic("x^2*y^2 + y^2*z^2 + z^2*x^2"),
        parse_quartic("(x^2+y^2)^2"),
    ]
    cases.extend(_random_quartic(rng) for _ in range(8))
    for f in cases:
        quotient = None
        for perm in RESULTANT_ORDERINGS:
            try:
                quotient = gradient_resultant_is_nonzero(f, perm)
                break
            except ArithmeticError:
                continue
        if quotient is not None:
            assert gradient_resultant_is_nonzero_gcp(f) == quotient


def test_integer_rescale_clears_denominators():
    f = TernaryQuartic({(4, 0, 0): Fraction(1, 6), (0, 4, 0): Fraction(2, 3)})
    g = integer_rescale(f)
    assert all(Fraction(c).denominator == 1 for c in g.coeffs.values())
    ratio = Fraction(g.coefficient((4, 0, 0))) / Fraction(1, 6)
    assert ratio > 0
    assert Fraction(g.coefficient((0, 4, 0))) == ratio * Fraction(2, 3)


def test_permute_variables_is_relabeling():
    f = parse_quartic("x^4 + 2*y^3*z")
    g = permute_variables(f, (1, 2, 0))
    assert dict(g.coeffs) == {(0, 0, 4): 1, (3, 1, 0): 2}
    # verdicts are invariant under relabeling
    for perm in RESULTANT_ORDERINGS:
        assert gradient_resultant_is_nonzero(permute_variables(parse_quartic("x^4+y^4+z^4"), perm))


def test_charpoly_int_matches_known_eigenvalues():
    # diag(1, 2, 3): det(tI - A) = (t-1)(t-2)(t-3) = t^3 - 6t^2 + 11t - 6
    A = [[1, 0, 0], [0, 2, 0], [0, 0, 3]]
    assert charpoly_int(A) == [1, -6, 11, -6]


def test_charpoly_int_matches_numpy_on_random_matrices():
    rng = np.random.default_rng(np.random.SeedSequence([13, 2]))
    for n in (2, 3, 4):
        for _ in range(3):
            A = [[int(rng.integers(-4, 5)) for _ in range(n)] for _ in range(n)]
            exact = charpoly_int(A)
            approx = np.poly(np.array(A, dtype=float))
            assert np.allclose(np.array(exact, dtype=float), approx, atol=1e-6)


def test_smoothness_decision_is_scale_invariant():
    f = parse_quartic("x^4+y^4+z^4")
    scaled = f.scaled(Fraction(7, 3))
    assert gradient_resultant_is_nonzero(integer_rescale(scaled))
