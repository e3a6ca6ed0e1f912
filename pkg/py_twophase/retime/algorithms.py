"""
Lag computation on a RetimeGraph.

min_delay_retime runs the feasibility iteration for a candidate period and
binary-searches the candidate set drawn from the W/D matrices. min_area_retime
is a greedy register-sharing heuristic, not an optimal flow formulation.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..config import config
from ..errors import InfeasibleRetiming, RetimeError
from ..models.core.mixins import SerializableMixin
from .graph import HOST

logger = logging.getLogger(__name__)


@dataclass
class LagAssignment(SerializableMixin):
    lags: dict = field(default_factory=dict)  # vertex -> lag, HOST fixed at 0
    period: float = None

    def __getitem__(self, vertex):
        return self.lags.get(vertex, 0)

    @property
    def max_abs(self):
        return max((abs(r) for r in self.lags.values()), default=0)

    @property
    def is_zero(self):
        return not any(self.lags.values())


def _feasible(graph, target):
    """Least legal lags meeting ``target``, or None when none exist."""
    eps = config.epsilon
    if any(d > target + eps for d in graph.delay.values()):
        return None
    n = len(graph.vertices)
    bound = n + 1
    r = {v: 0 for v in graph.all_vertices}
    for _ in range(n * (n + 2) + 1):
        arrival, _, sink = graph.arrivals(r)
        late = [v for v, a in arrival.items() if a > target + eps]
        if not late and sink <= target + eps:
            shift = r[HOST]
            return {v: lag - shift for v, lag in r.items()}
        for v in late:
            r[v] += 1
        if sink > target + eps:
            r[HOST] += 1
        _repair(graph, r)
        if max(r.values()) > bound:
            return None
    return None


def _repair(graph, r):
    # raising the host lag can leave edges out of the host source negative
    changed = True
    while changed:
        changed = False
        for e in graph.edges:
            if graph.retimed_weight(e, r) < 0:
                r[e.head] += -graph.retimed_weight(e, r)
                changed = True


def candidate_periods(graph):
    """Sorted distinct path delays that can bound a retimed period."""
    _, w, d = graph.wd_matrices()
    values = d[np.isfinite(w) & np.isfinite(d)]
    floor = max(graph.delay.values(), default=0.0)
    values = {round(float(x), 9) for x in values if x >= floor - config.epsilon}
    values.add(round(graph.period(), 9))
    values.add(round(floor, 9))
    return sorted(values)


def min_delay_retime(graph, target=None):
    """Lags minimizing the clock period, or meeting ``target`` when given.

    Args:
        graph (RetimeGraph): legal retiming graph
        target (float): required period in ns; omitted means minimize

    Returns:
        LagAssignment: normalized lags (host 0) and the achieved period

    Raises:
        InfeasibleRetiming: no legal lags meet ``target``; carries the best
            achievable period and its critical path
    """
    if target is not None:
        lags = _feasible(graph, target)
        if lags is not None:
            result = LagAssignment(_strip(lags), graph.period(lags))
            logger.info(f"min_delay_retime: target {target:g} met, period {result.period:g}")
            return result
        best = min_delay_retime(graph)
        delay, path = graph.critical_path(best.lags)
        raise InfeasibleRetiming(target, delay, path)

    candidates = candidate_periods(graph)
    lo, hi = 0, len(candidates) - 1
    best = _feasible(graph, candidates[hi])
    if best is None:
        raise RetimeError("original register placement failed its own period check")
    while lo < hi:
        mid = (lo + hi) // 2
        lags = _feasible(graph, candidates[mid])
        if lags is None:
            lo = mid + 1
        else:
            hi, best = mid, lags
    result = LagAssignment(_strip(best), graph.period(best))
    logger.info(
        f"min_delay_retime: period {graph.period():g} -> {result.period:g} "
        f"over {len(candidates)} candidates"
    )
    return result


def _strip(lags):
    return {v: r for v, r in lags.items() if v != HOST}


def min_area_retime(graph, lags=None, period=None):
    """Greedily share registers across fan-in and fan-out points.

    A forward move (lag - 1) at a vertex needs a register on every in-edge;
    a backward move (lag + 1) needs one on every out-edge. A move is kept
    only when it strictly lowers the shared register count and, when
    ``period`` is given, keeps the period within it. Forward moves run to a
    fixpoint before backward moves.

    Args:
        graph (RetimeGraph): legal retiming graph
        lags (LagAssignment): starting point (default: zero lags)
        period (float): period the moves must not exceed

    Returns:
        LagAssignment
    """
    r = dict(lags.lags) if lags else {}
    r[HOST] = 0
    before = graph.register_count(r)
    for step in (-1, +1):
        progress = True
        while progress:
            progress = False
            for v in graph.vertices:
                edges = graph.in_edges(v) if step < 0 else graph.out_edges(v)
                if not edges or any(graph.retimed_weight(e, r) < 1 for e in edges):
                    continue
                count = graph.register_count(r)
                r[v] = r.get(v, 0) + step
                if graph.register_count(r) < count and _within(graph, r, period):
                    progress = True
                else:
                    r[v] -= step
    after = graph.register_count(r)
    result = LagAssignment(
        {v: lag for v, lag in _strip(r).items() if lag}, graph.period(r)
    )
    logger.info(f"min_area_retime: registers {before} -> {after}")
    return result


def _within(graph, lags, period):
    return period is None or graph.period(lags) <= period + config.epsilon
