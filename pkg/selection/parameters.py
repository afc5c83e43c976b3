"""
Blockwise Parameters

Derives eps', alpha, the truncation radius Q, the block radius P and, for
tight-frame references, the separation R' and the spacing W = 2P + R'.
Every inequality the construction relies on is recorded with its slack, and
a record that fails on re-check aborts the derivation.

Two policies:

- strict: gaps are bounded through the envelope tail (Schur bound), the
  border and separation inequalities are enforced;
- window_fit: gaps are measured on the window. The border and separation
  estimates only pick P and R' and are kept as diagnostics; the size
  conclusion is re-checked on the selection (trim-first) and the separation
  by the measured cross-term ratio.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from config import get_config
from errors import InfeasibleParametersError
from localization.envelope import Envelope
from .curves import ReferenceCurve

logger = logging.getLogger(__name__)

POLICIES = ("strict", "window_fit")


@dataclass
class InequalityRecord:
    """lhs <= rhs, slack = rhs - lhs"""
    name: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return float(self.rhs - self.lhs)

    @property
    def holds(self) -> bool:
        return self.slack >= -1e-12 * max(1.0, abs(self.rhs))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
        }


@dataclass
class DerivedParameters:
    epsilon: float
    delta: float
    epsilon_prime: float
    alpha: float
    Q: int
    P: int
    K: int
    dim: int
    A: float
    B: float
    u: float
    T_norm: float
    D_minus: float
    policy: str = "strict"
    case: str = "A"
    R_prime: Optional[int] = None
    W: Optional[int] = None
    thresholds: Dict[str, float] = field(default_factory=dict)
    records: List[InequalityRecord] = field(default_factory=list)
    diagnostics: List[InequalityRecord] = field(default_factory=list)

    @property
    def c_prime(self) -> float:
        return self.thresholds.get("c_prime", float("nan"))

    @property
    def spacing(self) -> int:
        """Distance between neighbouring block centers"""
        return self.W if self.W is not None else 2 * self.P + 1

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.records)

    def record(self, name: str) -> InequalityRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "epsilon_prime": self.epsilon_prime,
            "alpha": self.alpha,
            "Q": self.Q,
            "P": self.P,
            "R_prime": self.R_prime,
            "W": self.W,
            "K": self.K,
            "dim": self.dim,
            "A": self.A,
            "B": self.B,
            "u": self.u,
            "T_norm": self.T_norm,
            "D_minus": self.D_minus,
            "policy": self.policy,
            "case": self.case,
            "thresholds": self.thresholds,
            "records": [r.to_dict() for r in self.records],
            "diagnostics": [r.to_dict() for r in self.diagnostics],
        }


def _grid(step: float, upper: float) -> np.ndarray:
    count = int(math.floor(upper / step + 1e-9))
    return np.round(np.arange(1, count + 1) * step, 12)


def choose_epsilon_prime(epsilon: float, delta: float, curve: ReferenceCurve, step: float) -> float:
    """Smallest grid value below epsilon with c(eps)(1 - delta) <= c(eps')(1 - delta/2)"""
    target = curve(epsilon) * (1 - delta)
    for e in _grid(step, epsilon):
        if e >= epsilon - 1e-12:
            break
        if target <= curve(e) * (1 - delta / 2):
            return float(e)
    raise InfeasibleParametersError(
        f"no eps' below {epsilon} satisfies c(eps)(1-delta) <= c(eps')(1-delta/2)",
        constraint="epsilon_prime",
        record={"epsilon": epsilon, "delta": delta},
    )


def choose_alpha(epsilon: float, epsilon_prime: float, delta: float, step: float) -> float:
    """Largest grid value alpha <= delta/8 with (1-eps')(1-alpha)^2/(1+alpha)^2 >= 1-eps"""
    for a in _grid(step, delta / 8)[::-1]:
        if (1 - epsilon_prime) * (1 - a) ** 2 / (1 + a) ** 2 >= 1 - epsilon:
            return float(a)
    raise InfeasibleParametersError(
        f"no alpha <= {delta / 8:.4g} keeps the size loss within 1 - eps at eps' = {epsilon_prime}",
        constraint="alpha",
        record={"epsilon": epsilon, "epsilon_prime": epsilon_prime, "delta": delta},
    )


def derive_parameters(
    epsilon: float,
    delta: float,
    curve: ReferenceCurve,
    A: float,
    B: float,
    u: float,
    T_norm: float,
    envelope: Optional[Envelope] = None,
    dual_envelope: Optional[Envelope] = None,
    *,
    K: int = 1,
    dim: int = 1,
    D_minus: float = 1.0,
    B_dual: float = 1.0,
    B_prime: Optional[float] = None,
    policy: str = "strict",
    gap_fn: Optional[Callable[[int], float]] = None,
    density_fn: Optional[Callable[[int], float]] = None,
    max_radius: Optional[int] = None,
    covering_radius: Optional[int] = None,
) -> DerivedParameters:
    """
    Search eps', alpha, Q, P (and R', W with a dual envelope) in that order.

    ``gap_fn(Q)`` is the measured ||L_I - L_IQ|| (required for window_fit);
    ``density_fn(P)`` is the smallest box count ratio |a^-1(B_P(k))|/(2P+1)^d
    over the window (defaults to D_minus). On a finite index group
    ``covering_radius`` is the radius at which one box covers the group; P is
    then set to it and the block has no border. Raises InfeasibleParametersError
    naming the binding constraint when the window cannot accommodate it.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy '{policy}', expected one of {POLICIES}")
    if min(A, B, u, T_norm) <= 0:
        raise ValueError("A, B, u and ||T|| must be positive")
    case = "B" if dual_envelope is not None else "A"
    cfg = get_config().selection
    max_radius = cfg.max_radius if max_radius is None else int(max_radius)
    records: List[InequalityRecord] = []
    diagnostics: List[InequalityRecord] = []
    trace: Dict[str, Any] = {"epsilon": epsilon, "delta": delta, "policy": policy, "case": case}

    eps_p = choose_epsilon_prime(epsilon, delta, curve, cfg.grid_step)
    c_p = curve(eps_p)
    records.append(InequalityRecord("epsilon_prime", curve(epsilon) * (1 - delta), c_p * (1 - delta / 2)))
    alpha = choose_alpha(epsilon, eps_p, delta, cfg.grid_step)
    records.append(InequalityRecord("alpha_cap", alpha, delta / 8))
    records.append(InequalityRecord("alpha_size", 1 - epsilon, (1 - eps_p) * (1 - alpha) ** 2 / (1 + alpha) ** 2))
    trace.update(epsilon_prime=eps_p, alpha=alpha)

    # truncation radius Q
    ratio = 1.0 if case == "B" else A / B
    if case == "A":
        t = 1 - alpha - math.sqrt(1 - delta / 2)
    else:
        t = math.sqrt(1 - delta / 8) * (1 - alpha) - math.sqrt(1 - delta / 2)
    thresholds = {
        "alpha_u": alpha * u,
        "alpha_T": alpha * T_norm,
        "riesz": math.sqrt(ratio * delta * c_p * u * u / 8),
        "chain": max(t, 0.0) * math.sqrt(ratio * c_p) * u,
    }
    threshold = min(thresholds.values())
    if policy == "strict":
        if envelope is None:
            raise ValueError("strict policy needs the envelope of (F, a, G)")
        gap_of = lambda q: envelope.tail_sum(q) * math.sqrt(K) * math.sqrt(B_dual)
    else:
        if gap_fn is None:
            raise ValueError("window_fit policy needs a measured gap function")
        gap_of = gap_fn
    Q = None
    for q in range(1, max_radius + 1):
        gap = gap_of(q)
        logger.debug("Q=%d: gap %.3e vs threshold %.3e", q, gap, threshold)
        if gap <= threshold:
            Q = q
            records.append(InequalityRecord("truncation", gap, threshold))
            break
    if Q is None:
        raise InfeasibleParametersError(
            f"truncation gap stays above {threshold:.3e} up to radius {max_radius}",
            constraint="truncation",
            record={**trace, "thresholds": thresholds},
        )
    trace["Q"] = Q

    # separation for tight-frame references
    R_prime = None
    if case == "B":
        B_prime = B if B_prime is None else B_prime
        r0 = max(dual_envelope.value_at(tuple([0] * dual_envelope.group.rank)), 1e-300)
        for rp in range(1, max_radius + 1):
            tail = dual_envelope.tail_sum(rp - 1)
            if policy == "strict":
                lhs = tail * T_norm ** 2 * B_prime / (c_p * (1 - alpha) ** 2 * u * u) * K ** 2 * (2 * Q + 1) ** (2 * dim)
            else:
                lhs = K * tail / r0
            if lhs < delta / 8:
                R_prime = rp
                target = records if policy == "strict" else diagnostics
                target.append(InequalityRecord("separation", lhs, delta / 8))
                break
        if R_prime is None:
            raise InfeasibleParametersError(
                f"dual envelope tail too heavy for a separation below radius {max_radius}",
                constraint="separation",
                record=trace,
            )
        trace["R_prime"] = R_prime

    # block radius P
    density_fn = density_fn or (lambda p: D_minus)
    size_factor = (1 - eps_p) * (1 - alpha) / (1 + alpha) ** 2
    P = None
    if covering_radius is not None:
        P = max(int(covering_radius), Q + 1)
        records.append(InequalityRecord("P_exceeds_Q", Q + 1, P))
        records.append(InequalityRecord("density_window", (1 - alpha) * D_minus, density_fn(P)))
        records.append(InequalityRecord("border", 0.0, 0.0))
    for p in range(Q + 1, max_radius + 1):
        if P is not None:
            break
        if density_fn(p) < (1 - alpha) * D_minus - 1e-12:
            continue
        outer = (2 * p + R_prime) if case == "B" else (2 * p + 1)
        border_lhs = K * (outer ** dim - (2 * (p - Q) + 1) ** dim)
        border_rhs = alpha * u * u * size_factor * D_minus * (2 * p + 1) ** dim / T_norm ** 2
        if policy == "window_fit" or border_lhs <= border_rhs:
            P = p
            records.append(InequalityRecord("P_exceeds_Q", Q + 1, p))
            records.append(InequalityRecord("density_window", (1 - alpha) * D_minus, density_fn(p)))
            border = InequalityRecord("border", border_lhs, border_rhs)
            if policy == "strict":
                records.append(border)
            else:
                diagnostics.append(border)
            break
    if P is None:
        raise InfeasibleParametersError(
            f"no block radius P <= {max_radius} meets the density and border conditions",
            constraint="border",
            record=trace,
        )

    params = DerivedParameters(
        epsilon=epsilon,
        delta=delta,
        epsilon_prime=eps_p,
        alpha=alpha,
        Q=Q,
        P=P,
        K=K,
        dim=dim,
        A=A,
        B=B,
        u=u,
        T_norm=T_norm,
        D_minus=D_minus,
        policy=policy,
        case=case,
        R_prime=R_prime,
        W=2 * P + R_prime if R_prime is not None else None,
        thresholds={**thresholds, "min": threshold, "t": t, "c_prime": c_p},
        records=records,
        diagnostics=diagnostics,
    )
    for rec in records:
        if not rec.holds:
            raise InfeasibleParametersError(f"inequality '{rec.name}' fails on re-check", constraint=rec.name,
                                            record=params.to_dict())
    for rec in diagnostics:
        if not rec.holds:
            logger.warning("window estimate '%s' not met (%.4g > %.4g), re-checked on the selection",
                           rec.name, rec.lhs, rec.rhs)
    logger.info("parameters: eps'=%.3f alpha=%.3f Q=%d P=%d%s", eps_p, alpha, Q, P,
                f" R'={R_prime} W={params.W}" if R_prime is not None else "")
    return params
