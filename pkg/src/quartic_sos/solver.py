"""Locate every rank-3 point of a Gram family by seeded random restarts.

A rank-3 member G(lam) of the family has a 3-dimensional kernel.  In a
kernel chart the kernel is the column span of a 6x3 matrix N carrying the
3x3 identity on a fixed row triple and an unknown 3x3 block K on the
complementary rows, so rank(G(lam)) <= 3 becomes the bilinear system

    G(lam) . N(K) = 0        (18 equations, 15 unknowns)

solved by damped Gauss-Newton from independent complex Gaussian starts.
Converged solutions are deduplicated into classes, near-real classes are
re-polished in real arithmetic, and real classes carry the eigenvalue
signature of G(lam); signature (3,0) is the positive semidefinite case.

The family is conjugated by a seeded random orthogonal matrix before
solving.  This leaves the lam coordinates of every rank-3 point unchanged
while making kernel charts generic, and the quartic is rescaled to unit
max coefficient internally (lam scales linearly with the quartic, so
results are mapped back exactly).

Quartics close to the discriminant carry classes whose lam is enormous
(the affine family pins the base matrix at coefficient 1, so a class
whose Gram matrix is nearly a pure kernel-basis combination sits near
infinity in lam).  Such classes are invisible to any affine start
distribution; residual and distance thresholds are therefore applied
relative to max(1, |lam|), and when the restart stage returns fewer than
the 63 classes every smooth quartic carries, a deterministic completion
pass re-solves the homogenized family h G0 + sum mu_i B_i on a random
affine patch, where every class lives at ordinary-sized coordinates.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .gram import KERNEL_BASIS_TENSOR, GramFamily

#: |eigenvalue| (or singular value) above this counts toward the rank.
RANK_EIG_TOL = 1e-8

#: Kernel charts: which row triple of N carries the identity block.
CHART_ID_ROWS: Tuple[Tuple[int, int, int], ...] = tuple(
    tuple(sorted(((3 + 2 * c) % 6, (4 + 2 * c) % 6, (5 + 2 * c) % 6))) for c in range(3)
)
CHART_K_ROWS: Tuple[Tuple[int, int, int], ...] = tuple(
    tuple(sorted(set(range(6)) - set(rows))) for rows in CHART_ID_ROWS
)

_BACKTRACK = (1.0, 0.5, 0.25, 0.125, 0.0625)

# Restarts are processed in fixed-size batches regardless of worker count,
# so multi-threaded runs reproduce single-threaded output byte for byte.
_CHUNK = 4096


@dataclass(frozen=True)
class SolveConfig:
    """Knobs for the random-restart rank-3 search."""

    restarts: int = 20000
    newton_max_iters: int = 100
    convergence_tol: float = 1e-12
    dedup_tol: float = 1e-6
    real_tol: float = 1e-8
    master_seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if not (self.convergence_tol < self.real_tol < self.dedup_tol):
            raise ValueError("need convergence_tol < real_tol < dedup_tol")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")
        if self.threads < 1:
            raise ValueError("threads must be positive")


@dataclass(frozen=True)
class GramPoint:
    """One equivalence class of quadratic representations: a rank-3 lam."""

    lam: Tuple[complex, ...]
    is_real: bool
    signature: Optional[Tuple[int, int]]
    rank: int
    residual: float
    hits: int
    first_restart: int

    @property
    def is_psd(self) -> bool:
        return self.is_real and self.signature == (3, 0)

    def to_json(self) -> dict:
        return {
            "lambda": [[z.real, z.imag] for z in self.lam],
            "rank": self.rank,
            "reality": self.is_real,
            "signature": list(self.signature) if self.signature is not None else None,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class SolutionSet:
    """All rank-3 classes found, with counts and a completeness flag."""

    points: Tuple[GramPoint, ...]
    counts: Tuple[int, int, int]
    budget_exhausted: bool
    config: SolveConfig
    scale: float = 1.0

    def to_json(self) -> dict:
        return {
            "points": [p.to_json() for p in self.points],
            "counts": {
                "complex_total": self.counts[0],
                "real_total": self.counts[1],
                "psd_total": self.counts[2],
            },
            "budget_exhausted": self.budget_exhausted,
            "config": {
                "restarts": self.config.restarts,
                "newton_max_iters": self.config.newton_max_iters,
                "convergence_tol": self.config.convergence_tol,
                "dedup_tol": self.config.dedup_tol,
                "real_tol": self.config.real_tol,
                "threads": self.config.threads,
            },
            "seed": self.config.master_seed,
        }


def residual_system(family: GramFamily, lam: Sequence[complex], K) -> np.ndarray:
    """Entries of G(lam) . [K; I3], row-major, in the primary kernel chart.

    [K; I3] stacks the unknown 3x3 block over the identity, so vanishing of
    all 18 entries forces the sheared span into the kernel of G(lam),
    i.e. rank(G(lam)) <= 3.
    """
    G = family.base.to_array(complex)
    lam = np.asarray(lam, dtype=complex)
    G = G + np.einsum("i,iab->ab", lam, KERNEL_BASIS_TENSOR)
    N = np.vstack([np.asarray(K, dtype=complex).reshape(3, 3), np.eye(3)])
    return (G @ N).reshape(18)


def _assemble(lam, K, id_rows, k_rows, G0r, Btr):
    """Batched G(lam), N(K) and flattened residual F = G N.

    G0r may be one shared 6x6 base or a broadcastable (n, 6, 6) stack.
    """
    n = lam.shape[0]
    base = G0r if G0r.ndim == 3 else G0r[None]
    G = base + np.einsum("ri,iab->rab", lam, Btr)
    N = np.zeros((n, 6, 3), dtype=lam.dtype)
    rr = np.arange(n)
    for b in range(3):
        N[rr, id_rows[:, b], b] = 1.0
    Km = K.reshape(n, 3, 3)
    for a in range(3):
        for b in range(3):
            N[rr, k_rows[:, a], b] = Km[:, a, b]
    F = (G @ N).reshape(n, 18)
    return G, N, F


def _jacobian(G, N, k_rows, Btr):
    """Batched Jacobian of F wrt (lam, K): shape (n, 18, 15)."""
    n = G.shape[0]
    J = np.empty((n, 18, 15), dtype=np.result_type(G, N))
    BN = np.einsum("iab,nbc->niac", Btr, N)
    J[:, :, :6] = BN.reshape(n, 6, 18).transpose(0, 2, 1)
    rr = np.arange(n)
    for a in range(3):
        cols = G[rr, :, k_rows[:, a]]
        for b in range(3):
            block = np.zeros((n, 6, 3), dtype=J.dtype)
            block[:, :, b] = cols
            J[:, :, 6 + 3 * a + b] = block.reshape(n, 18)
    return J


def _lam_scale(lam: np.ndarray) -> np.ndarray:
    """Per-slice residual scale max(1, |lam|_inf).

    The residual G(lam) N grows linearly with lam, so convergence and
    duplicate thresholds are meaningful only relative to this scale;
    absolute thresholds would silently reject every large class.
    """
    return np.maximum(1.0, np.max(np.abs(lam), axis=-1))


def _gauss_newton(lam, K, id_rows, k_rows, G0r, Btr, max_iters, tol):
    """Damped Gauss-Newton with backtracking on a batch of starts.

    Each batch slice evolves independently of the others, which is what
    makes chunked and threaded runs bit-identical to serial ones.
    """
    lam = lam.copy()
    K = K.copy()
    n = lam.shape[0]
    base = (lambda sel: G0r[sel]) if G0r.ndim == 3 else (lambda sel: G0r)
    active = np.arange(n)
    for _ in range(max_iters):
        if active.size == 0:
            break
        G, N, F = _assemble(lam[active], K[active], id_rows[active], k_rows[active], base(active), Btr)
        nrm = np.linalg.norm(F, axis=1)
        keep = nrm >= tol * _lam_scale(lam[active])
        active = active[keep]
        if active.size == 0:
            break
        G, N, F, nrm = G[keep], N[keep], F[keep], nrm[keep]
        J = _jacobian(G, N, k_rows[active], Btr)
        JH = np.conj(np.transpose(J, (0, 2, 1)))
        A = JH @ J
        mu = 1e-12 * np.trace(A, axis1=1, axis2=2).real[:, None, None] + 1e-14
        A = A + mu * np.eye(15, dtype=A.dtype)[None]
        delta = np.linalg.solve(A, -(JH @ F[:, :, None]))[:, :, 0]
        undecided = np.ones(active.size, dtype=bool)
        for alpha in _BACKTRACK:
            idx = np.where(undecided)[0]
            if idx.size == 0:
                break
            cand_l = lam[active[idx]] + alpha * delta[idx, :6]
            cand_K = K[active[idx]] + alpha * delta[idx, 6:]
            _, _, Fc = _assemble(cand_l, cand_K, id_rows[active[idx]], k_rows[active[idx]], base(active[idx]), Btr)
            better = np.linalg.norm(Fc, axis=1) < nrm[idx]
            sel = idx[better]
            lam[active[sel]] = cand_l[better]
            K[active[sel]] = cand_K[better]
            undecided[sel] = False
        active = active[~undecided]  # stalled slices retire as non-converged
    _, _, F = _assemble(lam, K, id_rows, k_rows, G0r, Btr)
    return lam, K, np.linalg.norm(F, axis=1)


def _chart_rows(charts: np.ndarray):
    id_rows = np.array([CHART_ID_ROWS[c] for c in charts])
    k_rows = np.array([CHART_K_ROWS[c] for c in charts])
    return id_rows, k_rows


def _chart_arrays(restart_ids: np.ndarray):
    return _chart_rows(restart_ids % 3)


def _run_chunk(lo, hi, seed, G0r, Btr, max_iters, tol):
    n = hi - lo
    lam0 = np.empty((n, 6), dtype=complex)
    K0 = np.empty((n, 9), dtype=complex)
    for r in range(lo, hi):
        g = np.random.default_rng(np.random.SeedSequence([seed, r]))
        lam0[r - lo] = (g.standard_normal(6) + 1j * g.standard_normal(6)) / np.sqrt(2)
        K0[r - lo] = (g.standard_normal(9) + 1j * g.standard_normal(9)) / np.sqrt(2)
    ids = np.arange(lo, hi)
    id_rows, k_rows = _chart_arrays(ids)
    lam, K, res = _gauss_newton(lam0, K0, id_rows, k_rows, G0r, Btr, max_iters, tol)
    return lam, K, res


#: Residual band in which a stalled restart is worth re-charting: orders of
#: magnitude above tolerance yet clearly descending toward a root rather
#: than wandering.
_RESCUE_RES = 1e-2
_RESCUE_ITERS = 12
_RESCUE_CAP = 4096

#: Completion stage: batches of homogenized-family restarts, spent only
#: when the affine stage reports fewer than 63 classes.
_PROJ_BATCH = 2048
_PROJ_MAX_BATCHES = 8
_PROJ_POLISH_ITERS = 16
#: A homogenized solution maps back to an affine class lam = mu / h; past
#: this bound it is indistinguishable from the h = 0 boundary (rank-3
#: points of the bare kernel-basis pencil, which represent nothing), and
#: double precision could not certify it anyway.
_LAM_MAX = 1e6
#: Completion classes live at large lam where isolation can sit near the
#: double-precision floor, so repeated solves of the same class scatter
#: further than the restart-stage duplicate radius.  Candidates within
#: this relative radius are one class (distinct classes of the families
#: we target are separated by orders of magnitude more).
_PROJ_MERGE_REL = 1e-3


def _newton_plain(lam, K, id_rows, k_rows, base, Btr, iters):
    """Full-step Newton polish: converge fast or get discarded.

    No damping or backtracking on purpose.  This runs on points already
    believed to sit inside a quadratic convergence basin (re-charted
    stalls, completion candidates); a start that needs creeping is not
    such a point, and the caller drops it by its final residual.
    """
    lam = lam.copy()
    K = K.copy()
    for _ in range(iters):
        G, N, F = _assemble(lam, K, id_rows, k_rows, base, Btr)
        J = _jacobian(G, N, k_rows, Btr)
        JH = np.conj(np.transpose(J, (0, 2, 1)))
        A = JH @ J
        mu = 1e-12 * np.trace(A, axis1=1, axis2=2).real[:, None, None] + 1e-14
        A = A + mu * np.eye(15, dtype=A.dtype)[None]
        delta = np.linalg.solve(A, -(JH @ F[:, :, None]))[:, :, 0]
        lam = lam + delta[:, :6]
        K = K + delta[:, 6:]
    _, _, F = _assemble(lam, K, id_rows, k_rows, base, Btr)
    return lam, K, np.linalg.norm(F, axis=1)


def _best_chart(G: np.ndarray):
    """Kernel basis of a near-rank-3 matrix and its best-conditioned chart.

    Returns (chart index, K block) with the chart whose identity-row 3x3
    block of the kernel basis is farthest from singular.
    """
    _, _, Vh = np.linalg.svd(G)
    N0 = Vh[3:].conj().T
    best = None
    for c in range(3):
        block = N0[list(CHART_ID_ROWS[c]), :]
        score = np.linalg.svd(block, compute_uv=False)[-1]
        if best is None or score > best[0]:
            best = (score, c, block)
    _, c, block = best
    Nc = N0 @ np.linalg.inv(block)
    return c, Nc[list(CHART_K_ROWS[c]), :].reshape(9)


def _gn_projective(hmu, K, id_rows, k_rows, G0r, Btr, a, iters, tol):
    """Batched Gauss-Newton on the homogenized family h G0 + sum mu_i B_i.

    Unknowns per slice are (h, mu) in a random affine patch a . (h, mu)
    = 1 plus the kernel-chart block K; the system is the 18 kernel
    equations and the patch equation.  On the patch every class has
    coordinates of ordinary size, so classes at huge affine lam (tiny h)
    keep honestly sized basins here.
    """
    hmu = hmu.copy()
    K = K.copy()
    n = hmu.shape[0]
    rr = np.arange(n)
    eye16 = np.eye(16, dtype=complex)[None]
    active = np.arange(n)

    def system(sel, hmu_s, K_s):
        m = sel.size
        G = hmu_s[:, 0, None, None] * G0r[None] + np.einsum("ri,iab->rab", hmu_s[:, 1:], Btr)
        N = np.zeros((m, 6, 3), dtype=complex)
        mr = np.arange(m)
        for b in range(3):
            N[mr, id_rows[sel, b], b] = 1.0
        Km = K_s.reshape(m, 3, 3)
        for c in range(3):
            for b in range(3):
                N[mr, k_rows[sel, c], b] = Km[:, c, b]
        F = np.concatenate([(G @ N).reshape(m, 18), (hmu_s @ a - 1.0)[:, None]], axis=1)
        return G, N, F

    for _ in range(iters):
        if active.size == 0:
            break
        G, N, F = system(active, hmu[active], K[active])
        nrm = np.linalg.norm(F, axis=1)
        keep = nrm >= tol
        active = active[keep]
        if active.size == 0:
            break
        G, N, F = G[keep], N[keep], F[keep]
        m = active.size
        J = np.zeros((m, 19, 16), dtype=complex)
        J[:, :18, 0] = (G0r[None] @ N).reshape(m, 18)
        for i in range(6):
            J[:, :18, 1 + i] = (Btr[i][None] @ N).reshape(m, 18)
        mr = np.arange(m)
        for c in range(3):
            cols = G[mr, :, k_rows[active, c]]
            for b in range(3):
                block = np.zeros((m, 6, 3), dtype=complex)
                block[:, :, b] = cols
                J[:, :18, 7 + 3 * c + b] = block.reshape(m, 18)
        J[:, 18, :7] = a[None, :]
        JH = np.conj(np.transpose(J, (0, 2, 1)))
        A = JH @ J
        mu_d = 1e-12 * np.trace(A, axis1=1, axis2=2).real[:, None, None] + 1e-14
        A = A + mu_d * eye16
        delta = np.linalg.solve(A, -(JH @ F[:, :, None]))[:, :, 0]
        hmu[active] = hmu[active] + delta[:, :7]
        K[active] = K[active] + delta[:, 7:]
    _, _, F = system(rr, hmu, K)
    return hmu, K, np.linalg.norm(F, axis=1)


def _projective_classes(G0r, Btr, config: SolveConfig, classes: List[dict]) -> List[dict]:
    """Completion stage: classes recovered from the homogenized family.

    Batches are seeded streams, so the result is a pure function of the
    config.  Solutions on the h = 0 boundary or beyond _LAM_MAX are
    dropped, the rest are polished in an affine kernel chart and merged
    at the completion radius, lowest residual winning.  A candidate whose
    imaginary part is below the merge radius is pulled onto the real
    slice if real Newton reconverges there.
    """
    out: List[dict] = []
    have = [c["lam"] for c in classes]
    G0c = G0r.astype(complex)
    for batch in range(_PROJ_MAX_BATCHES):
        if len(classes) + len(out) >= 63:
            break
        g = np.random.default_rng(np.random.SeedSequence([config.master_seed, 106, batch]))
        a = (g.standard_normal(7) + 1j * g.standard_normal(7)) / np.sqrt(2)
        hmu0 = (g.standard_normal((_PROJ_BATCH, 7)) + 1j * g.standard_normal((_PROJ_BATCH, 7)))
        hmu0 /= (hmu0 @ a)[:, None]
        K0 = (g.standard_normal((_PROJ_BATCH, 9)) + 1j * g.standard_normal((_PROJ_BATCH, 9))) / np.sqrt(2)
        id_rows, k_rows = _chart_arrays(np.arange(_PROJ_BATCH))
        hmu, K, res = _gn_projective(hmu0, K0, id_rows, k_rows, G0c, Btr, a,
                                     config.newton_max_iters, config.convergence_tol)
        h = hmu[:, 0]
        finite = (res < config.convergence_tol) & (np.abs(h) > 0)
        lam_all = np.where(finite[:, None], hmu[:, 1:], 0.0) / np.where(finite, h, 1.0)[:, None]
        finite &= np.max(np.abs(lam_all), axis=1) < _LAM_MAX
        cand = []
        for i in np.flatnonzero(finite):
            lam = lam_all[i]
            if any(np.max(np.abs(lam - v)) < _PROJ_MERGE_REL * _lam_scale(lam) for v in have):
                continue
            G = G0c + np.einsum("i,iab->ab", lam, Btr)
            chart, Kc = _best_chart(G)
            rows = np.array([CHART_ID_ROWS[chart]]), np.array([CHART_K_ROWS[chart]])
            lam_f, K_f, res_f = _newton_plain(lam[None], Kc[None], rows[0], rows[1],
                                              G0c[None], Btr, _PROJ_POLISH_ITERS)
            if res_f[0] >= config.convergence_tol * _lam_scale(lam_f[0]):
                continue
            cand.append((float(res_f[0]), int(i), lam_f[0], K_f[0], chart))
        cand.sort(key=lambda t: (t[0], t[1]))
        for resv, _, lam, Kc, chart in cand:
            if any(np.max(np.abs(lam - v)) < _PROJ_MERGE_REL * _lam_scale(lam) for v in have):
                continue
            lam, Kc, chart, resv = _pull_real(lam, Kc, chart, resv, G0r, Btr, config)
            have.append(lam)
            out.append({
                "lam": lam,
                "K": Kc,
                "chart": chart,
                "residual": resv,
                "hits": 0,
                "first": config.restarts,
                "is_real": False,
            })
    return out


def _pull_real(lam, Kc, chart, res, G0r, Btr, config: SolveConfig):
    """Land a completion class on the real slice when one is in reach.

    At the scales the completion stage works at, the imaginary part of a
    real class can carry noise far above the scaled real-detection
    threshold, so the decision is made here: drop the imaginary part,
    re-chart, and keep the real point only if real Newton reconverges
    without leaving the merge radius.
    """
    scl = _lam_scale(lam)
    if np.max(np.abs(lam.imag)) >= _PROJ_MERGE_REL * scl:
        return lam, Kc, chart, res
    G = G0r + np.einsum("i,iab->ab", lam.real, Btr)
    chart_r, K_r = _best_chart(G)
    rows = np.array([CHART_ID_ROWS[chart_r]]), np.array([CHART_K_ROWS[chart_r]])
    lam_f, K_f, res_f = _newton_plain(lam.real[None], K_r.real[None], rows[0], rows[1],
                                      G0r[None], Btr, _PROJ_POLISH_ITERS)
    scl_f = _lam_scale(lam_f[0])
    if (res_f[0] < config.convergence_tol * scl_f
            and np.max(np.abs(lam_f[0] - lam.real)) < _PROJ_MERGE_REL * scl_f):
        return lam_f[0].astype(complex), K_f[0].astype(complex), chart_r, float(res_f[0])
    return lam, Kc, chart, res


def _rescue_stalled(lam, K, res, G0r, Btr, config: SolveConfig):
    """Re-chart stalled restarts and finish them with plain Newton.

    A restart whose round-robin chart happens to be near-singular at the
    root it is approaching stalls on a residual plateau: the Gauss-Newton
    model is built in coordinates that degenerate there, so damping can
    never buy a full step.  Recomputing the kernel chart at the stalled
    point restores quadratic convergence for slices that were genuinely
    close, and plain Newton silently discards the rest.
    """
    scl = _lam_scale(lam)
    near = np.flatnonzero((res >= config.convergence_tol * scl) & (res < _RESCUE_RES * scl))
    if near.size > _RESCUE_CAP:
        near = near[np.argsort(res[near], kind="stable")[:_RESCUE_CAP]]
        near.sort()
    if near.size == 0:
        empty = np.empty((0, 6), dtype=complex)
        return empty, np.empty((0, 9), dtype=complex), np.empty(0), near, near
    charts = np.empty(near.size, dtype=int)
    K0 = np.empty((near.size, 9), dtype=complex)
    for j, i in enumerate(near):
        G = G0r + np.einsum("i,iab->ab", lam[i], Btr)
        charts[j], K0[j] = _best_chart(G)
    id_rows, k_rows = _chart_rows(charts)
    lam_f, K_f, res_f = _newton_plain(
        lam[near], K0, id_rows, k_rows, G0r[None].astype(complex), Btr, _RESCUE_ITERS,
    )
    good = res_f < config.convergence_tol * _lam_scale(lam_f)
    return lam_f[good], K_f[good], res_f[good], near[good], charts[good]


def _restart_classes(G0r, Btr, config: SolveConfig) -> List[dict]:
    """Deduplicated classes found by the chunked random-restart stage."""
    R = config.restarts
    bounds = [(lo, min(lo + _CHUNK, R)) for lo in range(0, R, _CHUNK)]
    args = [(lo, hi, config.master_seed, G0r, Btr, config.newton_max_iters, config.convergence_tol)
            for lo, hi in bounds]
    if config.threads > 1 and len(bounds) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(lambda a: _run_chunk(*a), args))
    else:
        results = [_run_chunk(*a) for a in args]

    lam_all = np.concatenate([r[0] for r in results])
    K_all = np.concatenate([r[1] for r in results])
    res_all = np.concatenate([r[2] for r in results])

    ok = res_all < config.convergence_tol * _lam_scale(lam_all)
    ids = np.flatnonzero(ok)
    lam_c, K_c, res_c = lam_all[ok], K_all[ok], res_all[ok]
    charts = ids % 3
    r_lam, r_K, r_res, r_ids, r_charts = _rescue_stalled(
        lam_all, K_all, res_all, G0r, Btr, config,
    )
    if r_ids.size:
        lam_c = np.concatenate([lam_c, r_lam])
        K_c = np.concatenate([K_c, r_K])
        res_c = np.concatenate([res_c, r_res])
        ids = np.concatenate([ids, r_ids])
        charts = np.concatenate([charts, r_charts])
    return _dedup(lam_c, K_c, res_c, ids, config.dedup_tol, charts)


def solve_all(family: GramFamily, config: SolveConfig = SolveConfig()) -> SolutionSet:
    """Find all rank-3 classes of the family by random restarts.

    When the restart stage reports fewer than the 63 classes a smooth
    quartic carries, a deterministic completion pass re-solves the
    homogenized family on a random affine patch and merges in whatever
    the affine restarts missed (classes near infinity in lam, whose
    affine attraction basins are vanishingly small).
    """
    scale = float(family.source.max_abs_coeff())
    G0 = family.base.to_array(float) / scale
    Bt = KERNEL_BASIS_TENSOR

    rng = np.random.default_rng(np.random.SeedSequence([config.master_seed]))
    Q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    G0r = Q @ G0 @ Q.T
    Btr = np.einsum("ab,ibc,dc->iad", Q, Bt, Q)

    classes = _restart_classes(G0r, Btr, config)
    if len(classes) < 63:
        classes.extend(_projective_classes(G0r, Btr, config, classes))
    _polish_real(classes, G0r, Btr, config)
    _close_under_conjugation(classes, config.dedup_tol)
    points = _finalize(classes, G0, Bt, scale)

    budget_exhausted = any(c["first"] >= 0.75 * config.restarts for c in classes)
    total = len(points)
    real_total = sum(1 for p in points if p.is_real)
    psd_total = sum(1 for p in points if p.is_psd)
    return SolutionSet(
        points=tuple(points),
        counts=(total, real_total, psd_total),
        budget_exhausted=budget_exhausted,
        config=config,
        scale=scale,
    )


def _dedup(lams, Ks, res, restart_ids, tol, charts=None) -> List[dict]:
    """Greedy clustering in restart order.

    Solution separations sit many orders of magnitude above tol, so greedy
    representative matching and single-linkage clustering coincide.
    """
    classes: List[dict] = []
    reps = np.zeros((0, 6), dtype=complex)
    for i in range(lams.shape[0]):
        lam = lams[i]
        if reps.shape[0]:
            d = np.max(np.abs(reps - lam[None, :]), axis=1)
            j = int(np.argmin(d))
            if d[j] < tol * _lam_scale(lam):
                classes[j]["hits"] += 1
                continue
        classes.append({
            "lam": lam.copy(),
            "K": Ks[i].copy(),
            "chart": int(restart_ids[i]) % 3 if charts is None else int(charts[i]),
            "residual": float(res[i]),
            "hits": 1,
            "first": int(restart_ids[i]),
            "is_real": False,
        })
        reps = np.vstack([reps, lam[None, :]])
    return classes


def _polish_real(classes: List[dict], G0r, Btr, config: SolveConfig) -> None:
    """Re-run Newton in real arithmetic on near-real classes.

    A class is marked real only if the real iteration reconverges to the
    same point, turning a tolerance judgment into a convergence fact.
    Anything within the dedup radius of its own conjugate gets the attempt:
    ill conditioning can leave a real class with imaginary noise well above
    real_tol, and a class that close to the real slice could not coexist
    with a distinct conjugate partner anyway.
    """
    cand = [i for i, c in enumerate(classes)
            if np.max(np.abs(c["lam"].imag)) < config.dedup_tol * _lam_scale(c["lam"])]
    if not cand:
        return
    lam0 = np.array([classes[i]["lam"].real for i in cand])
    K0 = np.array([classes[i]["K"].real for i in cand])
    charts = np.array([classes[i]["chart"] for i in cand])
    id_rows, k_rows = _chart_rows(charts)
    lam, K, res = _gauss_newton(lam0, K0, id_rows, k_rows, G0r, Btr,
                                config.newton_max_iters, config.convergence_tol)
    for k, i in enumerate(cand):
        moved = np.max(np.abs(lam[k] - classes[i]["lam"].real))
        scl = _lam_scale(lam[k])
        if res[k] < config.convergence_tol * scl and moved < config.dedup_tol * scl:
            classes[i]["lam"] = lam[k].astype(complex)
            classes[i]["K"] = K[k].astype(complex)
            classes[i]["residual"] = float(res[k])
            classes[i]["is_real"] = True


def _close_under_conjugation(classes: List[dict], tol: float) -> None:
    """Append any missing conjugate partners.

    The family is real, so conjugating a solution gives a solution with
    identical residual; with generous restart budgets partners are found
    independently and this is a no-op.
    """
    i = 0
    while i < len(classes):
        c = classes[i]
        i += 1
        if c["is_real"]:
            continue
        conj = np.conj(c["lam"])
        radius = tol * _lam_scale(conj)
        if any(np.max(np.abs(conj - d["lam"])) < radius for d in classes):
            continue
        classes.append({
            "lam": conj,
            "K": np.conj(c["K"]),
            "chart": c["chart"],
            "residual": c["residual"],
            "hits": 0,
            "first": c["first"],
            "is_real": False,
        })


def _finalize(classes: List[dict], G0, Bt, scale: float) -> List[GramPoint]:
    points = []
    for c in classes:
        G = G0 + np.einsum("i,iab->ab", c["lam"], Bt)
        sv = np.linalg.svd(G, compute_uv=False)
        cut = RANK_EIG_TOL * max(1.0, float(sv[0]))
        rank = int((sv > cut).sum())
        signature = None
        if c["is_real"]:
            ev = np.linalg.eigvalsh(G.real)
            signature = (int((ev > cut).sum()), int((ev < -cut).sum()))
        lam_out = tuple(complex(z) * scale for z in c["lam"])
        points.append(GramPoint(
            lam=lam_out,
            is_real=bool(c["is_real"]),
            signature=signature,
            rank=rank,
            residual=c["residual"],
            hits=int(c["hits"]),
            first_restart=int(c["first"]),
        ))
    points.sort(key=_sort_key)
    return points


def _sort_key(p: GramPoint):
    sig = (p.signature[1], -p.signature[0]) if p.signature is not None else (0, 0)
    re = tuple(z.real for z in p.lam)
    im = tuple(z.imag for z in p.lam)
    return (0 if p.is_real else 1, sig, re, im)


def certify_count(solution_set: SolutionSet) -> dict:
    """Compare class counts against the smooth non-negative expectation.

    Expected: 63 classes (2^6 - 1 two-torsion points), 15 real (2^4 - 1),
    8 positive semidefinite, with the 48 non-real classes in 24 conjugate
    pairs.
    """
    expected = {"complex_total": 63, "real_total": 15, "psd_total": 8}
    actual = {
        "complex_total": solution_set.counts[0],
        "real_total": solution_set.counts[1],
        "psd_total": solution_set.counts[2],
    }
    passes = {k: actual[k] == expected[k] for k in expected}

    nonreal = [p for p in solution_set.points if not p.is_real]
    dedup_tol = solution_set.config.dedup_tol
    paired = 0
    for p in nonreal:
        conj = np.conj(np.array(p.lam))
        tol = dedup_tol * max(solution_set.scale, 1.0, float(np.max(np.abs(conj))))
        if any(np.max(np.abs(conj - np.array(q.lam))) < tol for q in nonreal):
            paired += 1
    pairing_ok = paired == len(nonreal) and len(nonreal) % 2 == 0

    return {
        "expected": expected,
        "actual": actual,
        "pass": passes,
        "nonreal_total": len(nonreal),
        "conjugate_pairs": len(nonreal) // 2 if pairing_ok else None,
        "conjugate_pairing_ok": pairing_ok,
        "budget_exhausted": solution_set.budget_exhausted,
        "all_pass": all(passes.values()) and pairing_ok,
    }
