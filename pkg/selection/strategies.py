"""
Selection Strategies

Each strategy picks columns of a unit-column family from its Gram matrix
and certifies the lower Riesz bound it reached. The certificate is always
the smallest eigenvalue of the selected Gram, recomputed by eigendecomposition.
"""
import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config import get_config

logger = logging.getLogger(__name__)


def subset_lambda_min(G: np.ndarray, positions) -> float:
    positions = list(positions)
    if not positions:
        return 0.0
    sub = G[np.ix_(positions, positions)]
    return float(np.linalg.eigvalsh((sub + sub.conj().T) / 2)[0])


@dataclass
class StrategyOutcome:
    """Positions into the Gram matrix, sorted ascending"""
    positions: List[int]
    certificate: float
    trace: Dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.positions)


class SelectionStrategy(ABC):
    """
    Base class for column selection strategies.

    ``select`` returns at least ``m`` positions when it can certify a
    positive lower bound, and keeps extending while the bound stays at or
    above ``threshold``.
    """

    name: str = "strategy"
    description: str = ""

    @abstractmethod
    def select(self, G: np.ndarray, m: int, threshold: float) -> StrategyOutcome:
        pass

    def can_handle(self, n: int) -> bool:
        return True

    def get_status(self) -> Dict[str, Any]:
        return {"name": self.name, "description": self.description}


class ExhaustiveStrategy(SelectionStrategy):
    """Enumerates every subset; ground truth for small families"""

    name = "exhaustive"
    description = "exact best lambda_min per size over all subsets"

    def can_handle(self, n: int) -> bool:
        return n <= get_config().selection.exhaustive_max_n

    def best_per_size(self, G: np.ndarray) -> Dict[int, Tuple[float, Tuple[int, ...]]]:
        n = G.shape[0]
        if n > get_config().selection.exhaustive_max_n:
            raise ValueError(f"exhaustive enumeration is capped at n = {get_config().selection.exhaustive_max_n}")
        best: Dict[int, Tuple[float, Tuple[int, ...]]] = {}
        for size in range(1, n + 1):
            top = (-np.inf, ())
            # combinations come in lexicographic order; strict > keeps the first
            for combo in itertools.combinations(range(n), size):
                lam = subset_lambda_min(G, combo)
                if lam > top[0] + 1e-15:
                    top = (lam, combo)
            best[size] = top
        return best

    def select(self, G: np.ndarray, m: int, threshold: float) -> StrategyOutcome:
        best = self.best_per_size(G)
        n = G.shape[0]
        m = max(1, min(m, n))
        size = m
        while size < n and best[size + 1][0] >= threshold:
            size += 1
        lam, combo = best[size]
        return StrategyOutcome(list(combo), lam, {"frontier": {k: v[0] for k, v in best.items()}})


def pareto_frontier(G: np.ndarray) -> List[Tuple[int, float, Tuple[int, ...]]]:
    """(size, best lambda_min, first maximizing subset) for every size"""
    best = ExhaustiveStrategy().best_per_size(G)
    return [(size, lam, combo) for size, (lam, combo) in sorted(best.items())]


class _SchurState:
    """
    Y = (G_J - b)^-1 G[J, :] kept current under one-column additions.
    """

    def __init__(self, G: np.ndarray, b: float = 0.0):
        n = G.shape[0]
        self.G = G
        self.b = b
        self.diag = np.real(np.diag(G))
        self.Y = np.zeros((0, n), dtype=G.dtype)
        self.W = np.zeros((0, n), dtype=G.dtype)
        self.chosen: List[int] = []

    def margins(self) -> np.ndarray:
        """Schur complements (G_vv - b) - w_v^H (G_J - b)^-1 w_v"""
        return (self.diag - self.b) - np.real(np.sum(self.W.conj() * self.Y, axis=0))

    def add(self, p: int, s: float):
        z = self.Y[:, p].copy()
        r = self.G[p, :]
        q = (r - z.conj() @ self.W) / s
        self.Y = np.vstack([self.Y - np.outer(z, q), q[None, :]])
        self.W = np.vstack([self.W, r[None, :]])
        self.chosen.append(p)


class GreedyStrategy(SelectionStrategy):
    """
    Adds the column with the largest resulting lambda_min.

    Candidates are shortlisted by their squared distance to the span of the
    current selection; the exact lambda_min is evaluated on the shortlist only.
    """

    name = "greedy"
    description = "greedy lambda_min with Schur-margin shortlist"

    def __init__(self, lookahead: Optional[int] = None):
        self.lookahead = lookahead

    def select(self, G: np.ndarray, m: int, threshold: float) -> StrategyOutcome:
        lookahead = self.lookahead or get_config().selection.lookahead
        floor = get_config().selection.certificate_floor
        state = _SchurState(G)
        available = np.ones(G.shape[0], dtype=bool)
        history = []
        while available.any():
            margins = state.margins()
            free = np.nonzero(available)[0]
            order = free[np.lexsort((free, -np.round(margins[free], 12)))]
            best, best_lam = None, -np.inf
            for v in order[:lookahead]:
                lam = subset_lambda_min(G, sorted(state.chosen + [int(v)]))
                if lam > best_lam + 1e-15 or (abs(lam - best_lam) <= 1e-15 and int(v) < best):
                    best, best_lam = int(v), lam
            size = len(state.chosen)
            if size >= m and best_lam < max(threshold, floor):
                break
            if best_lam <= floor or margins[best] <= floor:
                logger.debug("greedy stalled at size %d (lambda_min %.3e)", size, best_lam)
                break
            state.add(best, margins[best])
            available[best] = False
            history.append(float(best_lam))
        chosen = sorted(state.chosen)
        return StrategyOutcome(chosen, subset_lambda_min(G, chosen), {"lambda_history": history})


class BarrierStrategy(SelectionStrategy):
    """
    Barrier-potential selection.

    At level b the selection keeps every eigenvalue of G_J above b. Adding v
    is admissible when the Schur complement (1 - b) - w_v^H (G_J - b)^-1 w_v
    is positive; among admissible columns the one with the smallest
    potential increase (1 + ||(G_J - b)^-1 w_v||^2) / sigma_v is taken.
    Y = (G_J - b)^-1 G[J, :] is updated by a rank-one formula per step.
    """

    name = "barrier"
    description = "barrier potential with level search"

    def run(self, G: np.ndarray, b: float) -> List[int]:
        n = G.shape[0]
        state = _SchurState(G, b)
        available = np.ones(n, dtype=bool)
        while available.any():
            sigma = state.margins()
            ok = available & (sigma > 1e-12)
            if not ok.any():
                break
            score = np.full(n, np.inf)
            score[ok] = (1.0 + np.sum(np.abs(state.Y[:, ok]) ** 2, axis=0)) / sigma[ok]
            p = int(np.argmin(score))  # first minimum is the lowest index
            state.add(p, sigma[p])
            available[p] = False
        return sorted(state.chosen)

    def select(self, G: np.ndarray, m: int, threshold: float) -> StrategyOutcome:
        cfg = get_config().selection
        levels = [cfg.barrier_start * cfg.barrier_factor ** j for j in range(cfg.barrier_levels)]
        feasible_b, feasible_J, infeasible_b = None, None, None
        largest: List[int] = []
        for b in levels:
            J = self.run(G, b)
            if len(J) > len(largest):
                largest = J
            if len(J) >= m:
                feasible_b, feasible_J = b, J
                break
            infeasible_b = b
        if feasible_J is None:
            return StrategyOutcome(largest, subset_lambda_min(G, largest), {"barrier_level": None})

        if infeasible_b is not None:
            lo, hi = feasible_b, infeasible_b
            for _ in range(cfg.barrier_refine_steps):
                mid = 0.5 * (lo + hi)
                J = self.run(G, mid)
                if len(J) >= m:
                    lo, feasible_J = mid, J
                else:
                    hi = mid
            feasible_b = lo
        logger.debug("barrier level %.4g selects %d of %d", feasible_b, len(feasible_J), G.shape[0])
        return StrategyOutcome(
            feasible_J,
            subset_lambda_min(G, feasible_J),
            {"barrier_level": feasible_b},
        )


class StrategyRegistry:
    """
    Registry of selection strategies.
    """

    def __init__(self):
        self._strategies: Dict[str, SelectionStrategy] = {}

    def register(self, strategy: SelectionStrategy):
        self._strategies[strategy.name.lower()] = strategy

    def get(self, name: str) -> SelectionStrategy:
        key = name.lower()
        if key in ("exhaustive_oracle", "oracle"):
            key = "exhaustive"
        if key not in self._strategies:
            raise ValueError(f"unknown selection strategy '{name}', expected one of {sorted(self._strategies)}")
        return self._strategies[key]

    def list_strategies(self) -> List[Dict[str, Any]]:
        return [s.get_status() for s in self._strategies.values()]


registry = StrategyRegistry()
registry.register(ExhaustiveStrategy())
registry.register(GreedyStrategy())
registry.register(BarrierStrategy())


def get_strategy(name: str) -> SelectionStrategy:
    return registry.get(name)
