"""Decoy-state design against unambiguous discrimination.

An even-cat decoy lies exactly in the span of the two signal pulses, so
the discrimination geometry degenerates and the attack is impossible.
A squeezed vacuum only approximates that condition; its quality is
measured by

    Delta(alpha, r) = 1 + exp(-2 alpha^2)
                      - (2 / cosh r) exp(-alpha^2 (1 - tanh r)),

which this module minimizes over r (fixed alpha) and provides the
stationary-alpha relation for (fixed r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .golden import golden_min
from .states import (
    GramData,
    StatePrep,
    cat_prep,
    coherent_prep,
    gram_from_preps,
    realize,
    squeezed_prep,
)
from .tolerances import DEGENERACY_TOL, TAIL_TOL
from .usd import gram_delta, gram_det

R_SEARCH_MAX = 5.0  # beyond this the decoy intensity is impractical and
# the truncation guard in the state builder dominates


@dataclass(frozen=True)
class DecoyDesign:
    """A decoy prep with its discrimination diagnostics.

    delta and m_value come from the same overlap data; usd_disabled is
    the degeneracy verdict (m below tolerance), and mu is the decoy's
    mean photon number computed from its Fock vector.
    """

    prep: StatePrep
    gram: GramData
    delta: float
    m_value: float
    mu: float
    usd_disabled: bool


def _design(
    decoy: StatePrep,
    alpha: float,
    phi: float,
    n_cut: int,
    tail_tol: float,
    degeneracy_tol: float,
) -> DecoyDesign:
    if not alpha > 0.0:
        raise ValueError("alpha must be > 0: zero-amplitude signals make the protocol vacuous")
    u1 = coherent_prep(alpha, phi)
    u2 = coherent_prep(alpha, phi + math.pi)
    gram = gram_from_preps(u1, u2, decoy, n_cut=n_cut, tail_tol=tail_tol)
    m_value = math.sqrt(gram_det(gram))
    return DecoyDesign(
        prep=decoy,
        gram=gram,
        delta=gram_delta(gram),
        m_value=m_value,
        mu=realize(decoy, n_cut=n_cut, tail_tol=tail_tol).mean_photon_number(),
        usd_disabled=m_value < degeneracy_tol,
    )


def design_cat(
    alpha: float,
    phi: float = 0.0,
    n_cut: int = 64,
    tail_tol: float = TAIL_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> DecoyDesign:
    """Even-cat decoy for signal amplitude alpha: disables discrimination exactly."""
    return _design(cat_prep(alpha, phi), alpha, phi, n_cut, tail_tol, degeneracy_tol)


def design_squeezed(
    alpha: float,
    r: float,
    phi: float = 0.0,
    n_cut: int = 64,
    tail_tol: float = TAIL_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> DecoyDesign:
    """Squeezed-vacuum decoy |0, r> against signals of amplitude alpha."""
    return _design(squeezed_prep(r), alpha, phi, n_cut, tail_tol, degeneracy_tol)


def delta_squeezed(alpha: float, r: float) -> float:
    """Closed-form Delta for a squeezed-vacuum decoy."""
    return (
        1.0
        + math.exp(-2.0 * alpha * alpha)
        - 2.0 / math.cosh(r) * math.exp(-alpha * alpha * (1.0 - math.tanh(r)))
    )


def optimal_alpha(r: float) -> float:
    """Signal amplitude at which Delta is stationary in alpha for given r.

    alpha = sqrt(exp(-r) cosh(r) ln(exp(r) cosh(r)^2)); tends to 0 as
    r -> 0.
    """
    if r < 0.0:
        raise ValueError("r must be >= 0")
    arg = math.exp(r) * math.cosh(r) ** 2
    return math.sqrt(math.exp(-r) * math.cosh(r) * math.log(arg))


def minimize_delta(alpha: float, tol: float = 1e-10) -> tuple[float, float]:
    """Squeezing parameter minimizing Delta at fixed alpha, with the minimum.

    Bracketed golden-section over r in [0, 5]; Delta is unimodal in r
    (stationary point at sinh(2r) = 2 alpha^2).
    """
    if not alpha > 0.0:
        raise ValueError("alpha must be > 0")
    r, delta = golden_min(lambda r_: delta_squeezed(alpha, r_), 0.0, R_SEARCH_MAX, tol)
    return r, delta
