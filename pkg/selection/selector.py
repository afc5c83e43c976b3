"""
Finite Selector

Restricted invertibility on finite families: pick J with
|J|/n >= (1 - eps) u^2 / ||T||^2 and certify lambda_min(Gram(F_J)) >= c u^2.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config import get_config
from errors import SelectionInfeasibleError, SingularOperatorError
from frames.bounds import gram_entries
from frames.family import VectorFamily
from frames.operators import spectral_norm
from .curves import BarrierCurve, ReferenceCurve
from .result import SelectionResult
from .strategies import get_strategy

logger = logging.getLogger(__name__)


@dataclass
class SelectorConfig:
    epsilon: float = 0.5
    delta: float = 0.5
    curve: ReferenceCurve = field(default_factory=BarrierCurve)
    strategy: str = "barrier"
    max_n: int = 5000
    # when False only a positive lower bound is demanded, not curve(epsilon)
    require_curve: bool = True

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        c = self.curve(self.epsilon)
        if not 0 < c < 1:
            raise ValueError(f"reference curve value c({self.epsilon}) = {c} is outside (0, 1)")

    def with_epsilon(self, epsilon: float, require_curve: Optional[bool] = None) -> "SelectorConfig":
        return SelectorConfig(
            epsilon=epsilon,
            delta=self.delta,
            curve=self.curve,
            strategy=self.strategy,
            max_n=self.max_n,
            require_curve=self.require_curve if require_curve is None else require_curve,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "curve": self.curve.to_dict(),
            "strategy": self.strategy,
            "max_n": self.max_n,
            "require_curve": self.require_curve,
        }


def normalize_columns(family: VectorFamily) -> Tuple[VectorFamily, np.ndarray]:
    """S e_i = f_i / ||f_i||; returns (S, norms)"""
    norms = family.norms()
    zero = norms <= get_config().tolerance.zero
    if np.any(zero):
        bad = [family.labels[i] for i in np.nonzero(zero)[0][:5]]
        raise SingularOperatorError(f"zero columns cannot be normalized: {bad}")
    S = family.with_matrix(family.matrix / norms[None, :])
    u = float(norms.min())
    s_norm, t_norm = spectral_norm(S.matrix), spectral_norm(family.matrix)
    if s_norm > t_norm / u * (1 + 1e-9):
        logger.warning("normalized norm %.6g exceeds ||T||/u = %.6g", s_norm, t_norm / u)
    return S, norms


def required_size(n: int, epsilon: float, u: float, T_norm: float) -> int:
    """m = ceil((1 - eps) n u^2 / ||T||^2)"""
    target = (1.0 - epsilon) * n * u * u / (T_norm * T_norm)
    return max(1, int(math.ceil(target - 1e-9)))


def exact_bounds(family: VectorFamily) -> Tuple[float, float]:
    if len(family) == 0:
        return 0.0, 0.0
    eig = np.linalg.eigvalsh(gram_entries(family))
    return float(eig[0]), float(eig[-1])


def finite_rit_select(
    family: VectorFamily,
    cfg: Optional[SelectorConfig] = None,
    u: Optional[float] = None,
    T_norm: Optional[float] = None,
) -> SelectionResult:
    """
    Select J from a finite family and certify its lower Riesz bound.

    Selection runs on the normalized columns; the strategy's certificate is
    lambda_min of the normalized selected Gram, so
    ||sum b_j f_j||^2 >= certificate * u^2 * sum |b_j|^2.

    Raises SelectionInfeasibleError with the best subset found when the size
    target or the required certificate cannot be met.
    """
    cfg = cfg or SelectorConfig()
    n = len(family)
    if n == 0:
        raise SelectionInfeasibleError("cannot select from an empty family")
    if n > cfg.max_n:
        raise SelectionInfeasibleError(f"family of {n} vectors exceeds the selector cap {cfg.max_n}")

    S, norms = normalize_columns(family)
    u = float(norms.min()) if u is None else float(u)
    if u <= 0 or u > norms.min() * (1 + 1e-12):
        raise ValueError(f"u = {u} must be positive and at most the smallest column norm {norms.min():.6g}")
    T_norm = spectral_norm(family.matrix) if T_norm is None else float(T_norm)

    floor = get_config().selection.certificate_floor
    required_c = cfg.curve(cfg.epsilon) if cfg.require_curve else 0.0
    m = required_size(n, cfg.epsilon, u, T_norm)

    strategy = get_strategy(cfg.strategy)
    if not strategy.can_handle(n):
        raise ValueError(f"strategy '{strategy.name}' cannot handle n = {n}")
    G = gram_entries(S)
    outcome = strategy.select(G, m, max(required_c, floor))
    labels = [family.labels[p] for p in outcome.positions]

    if outcome.certificate <= floor or outcome.size < m or outcome.certificate < required_c - 1e-12:
        raise SelectionInfeasibleError(
            f"strategy '{strategy.name}' reached |J| = {outcome.size} (need {m}) with certificate "
            f"{outcome.certificate:.4g} (need {max(required_c, floor):.4g})",
            best_subset=labels,
            certificate=outcome.certificate,
            required=required_c,
        )

    lower, upper = exact_bounds(family.subfamily(labels))
    logger.debug("selected %d of %d (need %d), certificate %.4g, lambda_min %.4g",
                 outcome.size, n, m, outcome.certificate, lower)
    return SelectionResult(
        selected=labels,
        achieved_lower=lower,
        achieved_upper=upper,
        size_ratio=outcome.size / n,
        strategy=strategy.name,
        epsilon=cfg.epsilon,
        delta=cfg.delta,
        u=u,
        T_norm=T_norm,
        certified_c=outcome.certificate,
        required_c=required_c,
        trace={"required_size": m, **outcome.trace},
        source=family,
    )
