"""Reciprocal-basis geometry and the unambiguous-discrimination optimum.

For three linearly independent states with overlap matrix entries
S12, S13, S23, the working basis is

    u1 = (1, 0, 0),  u2 = (S12, L, 0),  u3 = (S13, K/L, M/L)

with H = S12 S23 - S13, K = S23 - conj(S12) S13, L = sqrt(1 - |S12|^2)
and M^2 the Gram determinant.  The reciprocal vectors v_i (with
<v_i|u_j> = delta_ij) exist only when M > 0; a decoy lying in the span
of the two signals forces M = 0 and makes the discrimination
measurement impossible.

The inconclusive-outcome operator is

    A0 = I - P_S (|v1><v1| + |v2><v2|) - P_D |v3><v3|

and the eavesdropper's optimum maximizes (1-nu) P_S + nu P_D over the
set where A0 stays positive semidefinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import fsum

import numpy as np

from .golden import bisect_last_true, sampled_golden_max
from .states import GramData
from .tolerances import DEGENERACY_TOL, GRAM_DET_FLOOR, NUM_TOL

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class UsdGeometry:
    """Working vectors u_i, reciprocal vectors v_i and the scalars H, K, L, M.

    v-vectors (and u3 when the signals themselves coincide) are None for
    degenerate geometries.
    """

    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray | None
    v1: np.ndarray | None
    v2: np.ndarray | None
    v3: np.ndarray | None
    h: complex
    k: complex
    l: float
    m: float
    degenerate: bool


@dataclass(frozen=True)
class UsdSolution:
    """Optimal discrimination probabilities with feasibility diagnostics."""

    p_s: float
    p_d: float
    p0: float
    min_eig_a0: float
    on_det_zero: bool
    degenerate: bool
    nu: float


def gram_det(g: GramData) -> float:
    """Determinant of the 3x3 overlap matrix (equals M^2).

    Computed with exact summation and clamped to zero below the
    double-precision cancellation floor: the five O(1) terms cannot
    certify a smaller value as nonzero.
    """
    s12, s13, s23 = g.s12, g.s13, g.s23
    cross = np.conj(s12) * s13 * np.conj(s23)
    det = fsum(
        [
            1.0,
            -abs(s12) ** 2,
            -abs(s13) ** 2,
            -abs(s23) ** 2,
            2.0 * cross.real,
        ]
    )
    if det < GRAM_DET_FLOOR:
        return 0.0
    return det


def build_geometry(
    g: GramData,
    num_tol: float = NUM_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> UsdGeometry:
    """Construct the u/v vectors from overlap data.

    Rejects non-PSD overlap matrices.  Degenerate means the reciprocal
    basis does not exist: either M < degeneracy_tol (decoy inside the
    signal span) or L < degeneracy_tol (coincident signals).
    """
    g.validate(num_tol)
    s12, s13, s23 = g.s12, g.s13, g.s23
    l_sq = max(0.0, 1.0 - abs(s12) ** 2)
    l = math.sqrt(l_sq)
    h = s12 * s23 - s13
    k = s23 - np.conj(s12) * s13
    m = math.sqrt(gram_det(g))

    u1 = np.array([1.0, 0.0, 0.0], dtype=complex)
    u2 = np.array([s12, l, 0.0], dtype=complex)
    if l < degeneracy_tol:
        return UsdGeometry(u1, u2, None, None, None, None, h, k, l, m, True)
    u3 = np.array([s13, k / l, m / l], dtype=complex)
    if m < degeneracy_tol:
        return UsdGeometry(u1, u2, u3, None, None, None, h, k, l, m, True)

    v1 = np.array([1.0, -np.conj(s12) / l, np.conj(h) / (l * m)], dtype=complex)
    v2 = np.array([0.0, 1.0 / l, -np.conj(k) / (l * m)], dtype=complex)
    v3 = np.array([0.0, 0.0, l / m], dtype=complex)
    return UsdGeometry(u1, u2, u3, v1, v2, v3, h, k, l, m, False)


def build_a0(geom: UsdGeometry, p_s: float, p_d: float, num_tol: float = NUM_TOL) -> np.ndarray:
    """Inconclusive operator I - P_S (v1 v1^+ + v2 v2^+) - P_D v3 v3^+."""
    if geom.degenerate:
        raise ValueError("degenerate geometry: reciprocal basis does not exist")
    for name, p in (("p_s", p_s), ("p_d", p_d)):
        if not (-num_tol <= p <= 1.0 + num_tol):
            raise ValueError(f"{name} must lie in [0, 1]")
    proj = np.outer(geom.v1, geom.v1.conj()) + np.outer(geom.v2, geom.v2.conj())
    return np.eye(3, dtype=complex) - p_s * proj - p_d * np.outer(geom.v3, geom.v3.conj())


def _require_symmetric(g: GramData) -> tuple[float, float]:
    if not g.is_symmetric(SYMMETRY_TOL):
        raise ValueError(
            "symmetric case required: equal decoy overlaps (s13 = s23) and real s12"
        )
    return float(g.s12.real), abs(g.s13) ** 2


def gram_delta(g: GramData) -> float:
    """Delta = 1 + S12 - 2 |S13|^2: zero iff the decoy disables discrimination."""
    s12, t_sq = _require_symmetric(g)
    return 1.0 + s12 - 2.0 * t_sq


def det_a0_closed(
    g: GramData,
    p_s: float,
    p_d: float,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> float:
    """Closed-form det(A0) for the symmetric case.

    det = (2 P_D P_S + P_S^2 - P_D L^2 - P_S (2 - |S13|^2 - |S23|^2)
           - P_D P_S^2 + M^2) / M^2
    """
    _require_symmetric(g)
    l_sq = 1.0 - abs(g.s12) ** 2
    m_sq = gram_det(g)
    if math.sqrt(m_sq) < degeneracy_tol:
        raise ValueError("closed-form determinant undefined for degenerate geometry")
    num = fsum(
        [
            2.0 * p_d * p_s,
            p_s * p_s,
            -p_d * l_sq,
            -p_s * (2.0 - abs(g.s13) ** 2 - abs(g.s23) ** 2),
            -p_d * p_s * p_s,
            m_sq,
        ]
    )
    return num / m_sq


def f1(g: GramData, p_s: float) -> float:
    """det(A0) = 0 boundary solved for P_D: (P_S - Delta)/(P_S - 1 - S12)."""
    s12, _ = _require_symmetric(g)
    den = p_s - 1.0 - s12
    if abs(den) < 1e-12:
        raise ValueError("f1 is singular at p_s = 1 + s12")
    return (p_s - gram_delta(g)) / den


def optimize_usd(
    g: GramData,
    nu: float,
    num_tol: float = NUM_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
    n_samples: int = 1024,
    tol: float = 1e-10,
) -> UsdSolution:
    """Maximize (1-nu) P_S + nu P_D subject to A0 being PSD on [0,1]^2.

    The search follows the det(A0) = 0 curve P_D = f1(P_S), clipped to
    the unit box, with a full eigenvalue check at every probe (a zero
    determinant alone does not certify positivity), plus the box edges
    where the clip is active.  Degenerate geometry means discrimination
    is impossible: returns (0, 0, 1).
    """
    if not (0.0 < nu < 1.0):
        raise ValueError("nu must lie in (0, 1)")
    geom = build_geometry(g, num_tol, degeneracy_tol)
    if geom.degenerate:
        return UsdSolution(0.0, 0.0, 1.0, 1.0, False, True, nu)
    s12, _ = _require_symmetric(g)
    delta = gram_delta(g)

    b_op = np.outer(geom.v1, geom.v1.conj()) + np.outer(geom.v2, geom.v2.conj())
    c_op = np.outer(geom.v3, geom.v3.conj())
    eye = np.eye(3, dtype=complex)

    def min_eig(p_s: float, p_d: float) -> float:
        return float(np.linalg.eigvalsh(eye - p_s * b_op - p_d * c_op)[0])

    def feasible(p_s: float, p_d: float) -> bool:
        return min_eig(p_s, p_d) >= -num_tol

    def pd_on_curve(p_s: float) -> float:
        den = p_s - 1.0 - s12
        if abs(den) < 1e-12:
            # only reachable as s12 -> 0 at p_s -> 1, where the curve
            # flattens onto the P_D = 1 edge
            return 1.0 if abs(p_s - delta) < 1e-9 else 0.0
        return min(1.0, max(0.0, (p_s - delta) / den))

    def objective(p_s: float, p_d: float) -> float:
        return (1.0 - nu) * p_s + nu * p_d

    def curve_objective(p_s: float) -> float:
        p_d = pd_on_curve(p_s)
        return objective(p_s, p_d) if feasible(p_s, p_d) else -math.inf

    candidates: list[tuple[float, float]] = [(0.0, pd_on_curve(0.0))]

    ps_star, _ = sampled_golden_max(curve_objective, 0.0, 1.0, n_samples, tol)
    candidates.append((ps_star, pd_on_curve(ps_star)))

    # feasibility cliff along the curve: the feasible stretch starts at 0
    if feasible(0.0, pd_on_curve(0.0)):
        ps_edge = bisect_last_true(lambda x: curve_objective(x) > -math.inf, 0.0, 1.0, tol)
        candidates.append((ps_edge, pd_on_curve(ps_edge)))

    # box edges where the clip may bind
    if feasible(0.0, 1.0):
        ps_e = bisect_last_true(lambda x: feasible(x, 1.0), 0.0, 1.0, tol)
        candidates.append((ps_e, 1.0))
    pd_e = bisect_last_true(lambda y: feasible(0.0, y), 0.0, 1.0, tol)
    candidates.append((0.0, pd_e))

    best = (0.0, 0.0)
    best_obj = -math.inf
    for p_s, p_d in candidates:
        if not feasible(p_s, p_d):
            continue
        val = objective(p_s, p_d)
        if val > best_obj + 1e-12 or (abs(val - best_obj) <= 1e-12 and p_s > best[0]):
            best, best_obj = (p_s, p_d), val

    p_s, p_d = best
    a0 = eye - p_s * b_op - p_d * c_op
    p0 = min(1.0, max(0.0, 1.0 - (1.0 - nu) * p_s - nu * p_d))
    return UsdSolution(
        p_s=p_s,
        p_d=p_d,
        p0=p0,
        min_eig_a0=float(np.linalg.eigvalsh(a0)[0]),
        on_det_zero=bool(abs(np.linalg.det(a0).real) <= 1e-8),
        degenerate=False,
        nu=nu,
    )
