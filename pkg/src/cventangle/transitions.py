"""Tracking optimal phase-space directions along a loss sweep.

A *support pattern* is the set of quadrature components of the optimal
direction whose magnitude exceeds ``support_tol``. A change of pattern between
neighbouring grid points is a candidate transition. It must be a switch
between branches (the new support was strictly suboptimal at the previous grid
point, which rules out a component growing continuously from zero) and the
change must be worth it in both directions: on the run of grid points sharing
the new pattern, the optimum must beat the best value inside the old support
by more than ``gain_tol`` (1%) somewhere, and likewise the old branch must have
beaten the new support by more than 1% somewhere on its own run. Kept
transitions are located by bisection on the crossing of the two restricted
branches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .criteria import VERDICT_TOL, SearchConfig, evaluate, qfi_witness, squeezing_coefficient
from .errors import ConfigError

SUPPORT_TOL = 0.05
GAIN_TOL = 0.01
BRACKET_WIDTH = 1e-3
BRANCH_TOL = 1e-7


@dataclass
class TracePoint:
    eta: float
    value: float
    entangled: bool
    direction: np.ndarray
    support: tuple


@dataclass
class Transition:
    eta: float
    bracket: tuple
    support_before: tuple
    support_after: tuple
    #: Smaller of the two branch advantages.
    gain: float
    #: Criterion detects entanglement on both sides of the crossing.
    detected_both_sides: bool


@dataclass
class DirectionTrace:
    criterion: str
    partition: object
    points: list = field(default_factory=list)
    transitions: list = field(default_factory=list)

    @property
    def etas(self) -> np.ndarray:
        return np.array([p.eta for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    @property
    def discontinuous(self) -> bool:
        return any(t.detected_both_sides for t in self.transitions)


def support_pattern(direction, tol: float = SUPPORT_TOL) -> tuple:
    return tuple(bool(v) for v in np.abs(np.asarray(direction)) > tol)


def restricted_value(gamma, partition, criterion: str, support, search: SearchConfig | None = None) -> float:
    """Best criterion value with the direction confined to ``support``."""
    if criterion == "qfi_witness":
        return qfi_witness(gamma, partition, support=support).value
    if criterion == "squeezing":
        cfg = (search or SearchConfig()).with_mask(support)
        return squeezing_coefficient(gamma, partition, cfg).value
    raise ConfigError(f"criterion {criterion!r} has no optimal direction", field="criteria")


def optimal_direction_trace(
    state_at: Callable[[float], np.ndarray],
    etas: Sequence[float],
    partition,
    criterion: str,
    search: Optional[SearchConfig] = None,
    support_tol: float = SUPPORT_TOL,
    gain_tol: float = GAIN_TOL,
    bracket_width: float = BRACKET_WIDTH,
) -> DirectionTrace:
    """Criterion value and optimal direction over a monotone grid of ``eta``.

    Parameters
    ----------
    state_at : callable
        Maps ``eta`` to a covariance matrix.
    etas : sequence of float
        Strictly monotone grid.
    partition : ModePartition or str
    criterion : {"qfi_witness", "squeezing"}

    Returns
    -------
    DirectionTrace
        Per-point values and directions plus the accepted transitions.
    """
    if criterion not in ("qfi_witness", "squeezing"):
        raise ConfigError(f"criterion {criterion!r} has no optimal direction", field="criteria")
    etas = np.asarray(etas, dtype=float)
    steps = np.diff(etas)
    if etas.size < 2 or not (np.all(steps > 0) or np.all(steps < 0)):
        raise ConfigError("eta grid must be strictly monotone with at least two points", field="grid")
    trace = DirectionTrace(criterion=criterion, partition=partition)
    for eta in etas:
        res = evaluate(state_at(float(eta)), partition, criterion, search)
        d = res.optimal_direction
        trace.points.append(TracePoint(float(eta), res.value, res.entangled, d, support_pattern(d, support_tol)))

    pts = trace.points
    i = 1
    while i < len(pts):
        before, after = pts[i - 1].support, pts[i].support
        if after == before or _at_boundary(pts[i - 1], criterion) or _at_boundary(pts[i], criterion):
            i += 1
            continue
        run_end = i
        while run_end + 1 < len(pts) and pts[run_end + 1].support == after:
            run_end += 1
        # Continuous growth of a component keeps the new support optimal on
        # both sides; a branch switch means it was strictly worse before.
        prev = pts[i - 1]
        v_prev = restricted_value(state_at(prev.eta), partition, criterion, after, search)
        switched = prev.value - v_prev > BRANCH_TOL * max(abs(prev.value), 1e-12)
        gain = -np.inf
        if switched:
            gain = _best_gain(state_at, partition, criterion, pts[i : run_end + 1], before, search)
        if gain > gain_tol:
            # The old branch must also have been worth keeping before the change.
            run_start = i - 1
            while run_start > 0 and pts[run_start - 1].support == before:
                run_start -= 1
            gain = min(gain, _best_gain(state_at, partition, criterion, pts[run_start:i], after, search))
        if gain > gain_tol:
            lo, hi = pts[i - 1].eta, pts[i].eta
            lo, hi = _bisect_crossing(state_at, partition, criterion, before, after, lo, hi, bracket_width, search)
            trace.transitions.append(
                Transition(
                    eta=0.5 * (lo + hi),
                    bracket=(lo, hi),
                    support_before=before,
                    support_after=after,
                    gain=float(gain),
                    detected_both_sides=pts[i - 1].entangled and pts[i].entangled,
                )
            )
        i = run_end + 1
    return trace


def _at_boundary(point: TracePoint, criterion: str) -> bool:
    """Values on the separable boundary leave the optimal direction undefined."""
    edge = 0.0 if criterion == "qfi_witness" else 1.0
    return abs(point.value - edge) <= VERDICT_TOL


def _best_gain(state_at, partition, criterion, points, rival, search) -> float:
    """Largest relative advantage of the optimum over the ``rival`` support."""
    gain = -np.inf
    for p in points:
        other = restricted_value(state_at(p.eta), partition, criterion, rival, search)
        gain = max(gain, (p.value - other) / max(abs(p.value), 1e-300))
    return gain


def _bisect_crossing(state_at, partition, criterion, before, after, lo, hi, width, search):
    """Shrink ``[lo, hi]`` around the point where the new support starts to win."""
    while abs(hi - lo) > width:
        mid = 0.5 * (lo + hi)
        g = state_at(mid)
        v_old = restricted_value(g, partition, criterion, before, search)
        v_new = restricted_value(g, partition, criterion, after, search)
        if v_new > v_old:
            hi = mid
        else:
            lo = mid
    return lo, hi


def detection_threshold(state_at, partition, criterion: str, lo: float, hi: float, tol: float = 1e-4, search=None) -> float:
    """Bisect the verdict of ``criterion`` between an undetected ``lo`` and detected ``hi``."""
    det_lo = evaluate(state_at(lo), partition, criterion, search).entangled
    det_hi = evaluate(state_at(hi), partition, criterion, search).entangled
    if det_lo == det_hi:
        raise ValueError("verdict does not change across the bracket")
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        if evaluate(state_at(mid), partition, criterion, search).entangled == det_hi:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
