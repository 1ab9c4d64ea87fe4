"""Turn rank-3 Gram points into explicit signed quadratic representations.

A rank-3 Gram matrix G factors as e1 v1 v1^T + e2 v2 v2^T + e3 v3 v3^T,
which reads as f = e1 p^2 + e2 q^2 + e3 r^2 with p, q, r quadratic forms.
Real matrices factor through the eigendecomposition (signs from
eigenvalue signs); complex symmetric matrices factor by Lagrange pivoted
completion of squares, where a vanishing diagonal is handled by the
hyperbolic identity  uv = ((u+v)/2)^2 + (i(u-v)/2)^2  realized as two
successive rank-1 extractions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .forms import QuadraticForm, TernaryQuartic, quad_square
from .gram import GramFamily, SymMatrix6, build_family, gram_to_poly
from .curves import (
    CurveStatus,
    PositivityStatus,
    basepoint_check,
    nonnegativity_test,
    smoothness_test,
)
from .solver import (
    RANK_EIG_TOL,
    GramPoint,
    SolutionSet,
    SolveConfig,
    certify_count,
    solve_all,
)

#: Relative residual bound for accepted representations.
REPRESENTATION_TOL = 1e-8

#: Diagonal pivot threshold in the complex completion of squares.
PIVOT_TOL = 1e-10


class RankMismatchError(ValueError):
    """The matrix is not numerically rank 3."""


class HypothesisFailed(RuntimeError):
    """A hypothesis of the representation count theorem does not hold."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        self.detail = detail
        super().__init__(f"hypothesis failed: {hypothesis}" + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class Representation:
    """f = sum of sign_i * form_i^2, with its verification residual."""

    signs: Tuple[int, int, int]
    forms: Tuple[QuadraticForm, QuadraticForm, QuadraticForm]
    class_lambda: Tuple[complex, ...]
    residual: float
    basepoint_free: Optional[bool] = None

    @property
    def is_sum_of_squares(self) -> bool:
        return all(s == 1 for s in self.signs) and all(
            all(complex(c).imag == 0 for c in form.coeffs) for form in self.forms
        )

    @property
    def is_real(self) -> bool:
        return all(all(complex(c).imag == 0 for c in form.coeffs) for form in self.forms)

    def to_json(self) -> dict:
        return {
            "signs": list(self.signs),
            "forms": [[[complex(c).real, complex(c).imag] for c in form.coeffs]
                      for form in self.forms],
            "class_lambda": [[z.real, z.imag] for z in self.class_lambda],
            "residual": self.residual,
            "basepoint_free": self.basepoint_free,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Representation":
        forms = tuple(
            QuadraticForm(tuple(complex(re, im) if im != 0 else float(re) for re, im in coeffs))
            for coeffs in data["forms"]
        )
        return cls(
            signs=tuple(int(s) for s in data["signs"]),
            forms=forms,
            class_lambda=tuple(complex(re, im) for re, im in data["class_lambda"]),
            residual=float(data["residual"]),
            basepoint_free=data.get("basepoint_free"),
        )


def _first_significant(coeffs) -> complex:
    top = max(abs(complex(c)) for c in coeffs)
    for c in coeffs:
        if abs(complex(c)) > 1e-12 * top:
            return complex(c)
    return complex(coeffs[0])


def _canonicalize(signs: Sequence[int], vecs: Sequence[np.ndarray]):
    """Sign-flip each form so its leading coefficient points positive, sort.

    Only +-1 rescalings preserve the squared terms, so canonical output is
    a sign convention plus a lexicographic order, not a unit leading
    coefficient.
    """
    items = []
    for s, v in zip(signs, vecs):
        lead = _first_significant(v)
        if lead.real < 0 or (lead.real == 0 and lead.imag < 0):
            v = -v
        items.append((int(s), tuple(complex(c) for c in v)))
    items.sort(key=lambda t: tuple((c.real, c.imag) for c in t[1]))
    out_signs = tuple(t[0] for t in items)
    out_forms = tuple(
        QuadraticForm(tuple(c if c.imag != 0 else c.real for c in t[1])) for t in items
    )
    return out_signs, out_forms


def _relative_residual(f_coeffs: dict, signs, forms) -> float:
    total: dict = {}
    for s, form in zip(signs, forms):
        for e, c in quad_square(form).coeffs.items():
            total[e] = total.get(e, 0) + s * c
    worst = 0.0
    for e in set(f_coeffs) | set(total):
        diff = complex(f_coeffs.get(e, 0)) - complex(total.get(e, 0))
        worst = max(worst, abs(diff))
    return worst / max(abs(complex(c)) for c in f_coeffs.values())


def factor_real(G: SymMatrix6, class_lambda: Tuple[complex, ...] = ()) -> Representation:
    """Factor a real rank-3 Gram matrix through its eigendecomposition."""
    A = G.to_array(complex)
    if np.max(np.abs(A.imag)) > 0:
        raise ValueError("factor_real requires a real matrix")
    A = A.real
    norm = max(np.max(np.abs(A)), 1e-300)
    ev, U = np.linalg.eigh(A / norm)
    order = np.argsort(-np.abs(ev), kind="stable")
    if np.abs(ev[order[3]]) >= RANK_EIG_TOL:
        raise RankMismatchError(
            f"fourth singular value {np.abs(ev[order[3]]) * norm:.3e} exceeds rank-3 tolerance"
        )
    signs = []
    vecs = []
    for i in order[:3]:
        mu = ev[i] * norm
        signs.append(1 if mu > 0 else -1)
        vecs.append(np.sqrt(abs(mu)) * U[:, i])
    signs, forms = _canonicalize(signs, vecs)
    residual = _relative_residual(gram_to_poly(G), signs, forms)
    return Representation(signs=signs, forms=forms, class_lambda=tuple(class_lambda),
                          residual=residual)


def factor_complex(G: SymMatrix6, class_lambda: Tuple[complex, ...] = ()) -> Representation:
    """Factor a complex symmetric rank-3 matrix by completion of squares.

    Pivot rule: largest-modulus diagonal entry above PIVOT_TOL, else a
    rank-1 extraction along e_u + e_v at the largest off-diagonal entry
    (the first half of the hyperbolic identity; the complement surfaces
    as a diagonal pivot on the next round).  All signs are +1: complex
    squares absorb them.
    """
    A = G.to_array(complex)
    norm = max(np.max(np.abs(A)), 1e-300)
    S = A / norm
    sv = np.linalg.svd(S, compute_uv=False)
    if sv[3] >= RANK_EIG_TOL:
        raise RankMismatchError(
            f"fourth singular value {sv[3] * norm:.3e} exceeds rank-3 tolerance"
        )
    vecs = []
    for _ in range(3):
        diag = np.abs(np.diag(S))
        j = int(np.argmax(diag))
        if diag[j] > PIVOT_TOL:
            d = np.zeros(6)
            d[j] = 1.0
        else:
            off = np.abs(np.triu(S, 1))
            u, v = np.unravel_index(int(np.argmax(off)), off.shape)
            d = np.zeros(6)
            d[u] = 1.0
            d[v] = 1.0
        Sd = S @ d
        pivot = d @ Sd
        w = Sd / np.sqrt(complex(pivot))
        vecs.append(w)
        S = S - np.outer(w, w)
    root = np.sqrt(norm)
    signs, forms = _canonicalize([1, 1, 1], [root * w for w in vecs])
    residual = _relative_residual(gram_to_poly(G), signs, forms)
    return Representation(signs=signs, forms=forms, class_lambda=tuple(class_lambda),
                          residual=residual)


@dataclass(frozen=True)
class VerifyVerdict:
    """Outcome of re-expanding a representation against its quartic."""

    passed: bool
    residual: float
    basepoint_free: bool
    exact: bool


def verify_representation(f: TernaryQuartic, rep: Representation) -> VerifyVerdict:
    """Re-expand sum sign_i form_i^2 and compare to f coefficientwise.

    Exact rational arithmetic whenever every coefficient is rational;
    double precision otherwise.
    """
    rational = f.is_rational() and all(
        all(isinstance(c, (int, Fraction)) for c in form.coeffs) for form in rep.forms
    )
    if rational:
        total: dict = {}
        for s, form in zip(rep.signs, rep.forms):
            for e, c in quad_square(form).coeffs.items():
                total[e] = total.get(e, 0) + s * c
        diff = 0
        for e in set(f.coeffs) | set(total):
            diff = max(diff, abs(Fraction(f.coeffs.get(e, 0)) - Fraction(total.get(e, 0))))
        residual = float(diff / max(abs(Fraction(c)) for c in f.coeffs.values()))
        exact = True
    else:
        residual = _relative_residual(dict(f.coeffs), rep.signs, rep.forms)
        exact = False
    free = basepoint_check(rep.forms)
    return VerifyVerdict(
        passed=residual <= REPRESENTATION_TOL,
        residual=residual,
        basepoint_free=free,
        exact=exact,
    )


def classify_point(family: GramFamily, point: GramPoint) -> Representation:
    """Representation of one solver class, via the real or complex factor."""
    G = family.matrix_at(point.lam)
    if point.is_real:
        G = SymMatrix6(tuple(complex(v).real for v in G.entries))
        rep = factor_real(G, class_lambda=point.lam)
    else:
        G = SymMatrix6(tuple(complex(v) for v in G.entries))
        rep = factor_complex(G, class_lambda=point.lam)
    return rep


@dataclass(frozen=True)
class Theorem1Report:
    """Full pipeline outcome for one quartic."""

    curve: CurveStatus
    positivity: PositivityStatus
    solution_set: SolutionSet
    representations: Tuple[Representation, ...]
    count_report: dict
    sos_total: int
    mixed_real_total: int
    nonreal_total: int
    passed: bool
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def real_certificates(self) -> Tuple[Representation, ...]:
        return tuple(r for r in self.representations if r.is_real)

    def to_json(self) -> dict:
        return {
            "curve": {
                "smooth": self.curve.smooth,
                "discriminant_sign": self.curve.discriminant_sign,
                "method": self.curve.method,
            },
            "nonnegative": self.positivity.nonnegative,
            "solutions": self.solution_set.to_json(),
            "representations": [r.to_json() for r in self.representations],
            "count_report": self.count_report,
            "split": {
                "sos_total": self.sos_total,
                "mixed_real_total": self.mixed_real_total,
                "nonreal_total": self.nonreal_total,
            },
            "passed": self.passed,
        }


def theorem1_check(f: TernaryQuartic, config: SolveConfig = SolveConfig()) -> Theorem1Report:
    """Smoothness, non-negativity, rank-3 solve, classification, counts.

    For a smooth non-negative quartic the expected split is 8 sums of
    squares, 7 mixed-sign real representations, and 48 non-real classes.
    Raises HypothesisFailed (no counts asserted) when a hypothesis fails.
    """
    timings: dict = {}
    t0 = time.perf_counter()
    curve = smoothness_test(f)
    timings["smoothness"] = time.perf_counter() - t0
    if not curve.smooth:
        raise HypothesisFailed("smooth", "curve is singular; counts not asserted")
    family = build_family(f)
    t0 = time.perf_counter()
    positivity = nonnegativity_test(f, family, seed=config.master_seed)
    timings["nonnegativity"] = time.perf_counter() - t0
    if positivity.nonnegative is False:
        raise HypothesisFailed(
            "nonnegative",
            f"counterexample {positivity.counterexample} with value {positivity.counterexample_value}",
        )
    if positivity.nonnegative is None:
        raise HypothesisFailed("nonnegative", "indeterminate at tolerance")

    t0 = time.perf_counter()
    solution_set = solve_all(family, config)
    timings["solve"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    reps = []
    for point in solution_set.points:
        rep = classify_point(family, point)
        verdict = verify_representation(f, rep)
        reps.append(replace(rep, basepoint_free=verdict.basepoint_free))
    timings["classify"] = time.perf_counter() - t0
    count_report = certify_count(solution_set)

    sos_total = sum(1 for r in reps if r.is_sum_of_squares)
    mixed_real_total = sum(1 for r in reps if r.is_real and not r.is_sum_of_squares)
    nonreal_total = sum(1 for r in reps if not r.is_real)
    passed = (
        count_report["all_pass"]
        and sos_total == 8
        and mixed_real_total == 7
        and nonreal_total == 48
        and all(r.residual <= REPRESENTATION_TOL for r in reps)
    )
    return Theorem1Report(
        curve=curve,
        positivity=positivity,
        solution_set=solution_set,
        representations=tuple(reps),
        count_report=count_report,
        sos_total=sos_total,
        mixed_real_total=mixed_real_total,
        nonreal_total=nonreal_total,
        passed=passed,
        timings=timings,
    )
