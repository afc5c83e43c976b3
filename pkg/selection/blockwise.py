"""
Blockwise Selection

Selection on localized systems rendered on a finite window: truncate every
f_i to the reference coefficients within distance Q of a(i), select inside
boxes B_P(k) centred on a lattice of spacing 2P+1 (Riesz reference) or
W = 2P + R' (tight-frame reference), trim each block to B_{P-Q}(k) and
certify the union directly and through the block chain.
"""
import logging
import math
from dataclasses import dataclass
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import get_config
from density.familymap import IndexedFamilyMap
from density.group import FgaGroup
from density.indexed import box_count_range, density_indexed
from density.relations import fiber_bound
from errors import DensityError, InfeasibleParametersError, SelectionInfeasibleError
from frames.bounds import bessel_bound, frame_bounds, gram_entries, is_tight, lambda_min, riesz_bounds
from frames.family import VectorFamily
from frames.operators import dual_family, spectral_norm
from localization.maps import envelope_from_map, self_localization_check
from localization.tails import analysis_gap_norm, truncate_family
from .cross_terms import cross_term_bound, cross_term_ratio
from .parameters import DerivedParameters, derive_parameters
from .result import BlockRecord, SelectionResult
from .selector import SelectorConfig, exact_bounds, finite_rit_select

logger = logging.getLogger(__name__)


@dataclass
class _Setup:
    """Window quantities shared by both cases"""
    u: float
    T_norm: float
    K: int
    D_minus: float
    envelope: Any
    truncated_at: Dict[int, VectorFamily]


def block_centers(group: FgaGroup, lows: np.ndarray, highs: np.ndarray, P: int, spacing: int) -> np.ndarray:
    """
    Centers k on the spacing lattice whose box B_P(k) lies inside the free
    window; cyclic axes take floor(N / spacing) centers, or one when the
    spacing covers the axis. Lexicographic order.
    """
    axes = []
    for lo, hi in zip(lows, highs):
        first = int(math.ceil((lo + P) / spacing))
        last = int(math.floor((hi - P) / spacing))
        axes.append([j * spacing for j in range(first, last + 1)])
    for n in group.cyclic_moduli:
        count = max(1, n // spacing)
        axes.append([j * spacing for j in range(count)] if count > 1 else [0])
    if any(len(a) == 0 for a in axes):
        return np.zeros((0, group.rank), dtype=np.int64)
    return np.asarray(list(product(*axes)), dtype=np.int64).reshape(-1, group.rank)


def _window(fmap: IndexedFamilyMap) -> Tuple[np.ndarray, np.ndarray]:
    if fmap.group.free_rank == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return fmap.free_extent()


def _lower_density(fmap: IndexedFamilyMap) -> float:
    try:
        return float(density_indexed(fmap).lower)
    except DensityError:
        est = density_indexed(fmap, mode="sweep")
        return float(est.lower)


def _density_fn(fmap: IndexedFamilyMap):
    def inf_ratio(P: int) -> float:
        try:
            return box_count_range(fmap, P)[0]
        except DensityError:
            return 0.0
    return inf_ratio


def _setup(family: VectorFamily, fmap: IndexedFamilyMap, reference: VectorFamily) -> _Setup:
    return _Setup(
        u=float(family.norms().min()),
        T_norm=spectral_norm(family.matrix),
        K=fiber_bound(fmap),
        D_minus=_lower_density(fmap),
        envelope=envelope_from_map(family, fmap, reference),
        truncated_at={},
    )


def _gap_fn(family, fmap, reference, dual, cache: Dict[int, VectorFamily]):
    def gap(Q: int) -> float:
        cache[Q] = truncate_family(family, fmap, reference, dual, Q)
        return analysis_gap_norm(family, cache[Q])
    return gap


def _select_blocks(
    family: VectorFamily,
    truncated: VectorFamily,
    fmap: IndexedFamilyMap,
    params: DerivedParameters,
    cfg: SelectorConfig,
) -> Tuple[List[Any], List[BlockRecord], List[List[Any]], float]:
    """Per-block selection and trim; returns (J, records, block label lists, min block certificate)"""
    group = fmap.group
    lows, highs = _window(fmap)
    centers = block_centers(group, lows, highs, params.P, params.spacing)
    if len(centers) == 0:
        raise InfeasibleParametersError(
            f"no block of radius {params.P} fits the window", constraint="window", record=params.to_dict()
        )
    points = fmap.points_of(family.labels)
    strict = params.policy == "strict"
    block_cfg = cfg.with_epsilon(params.epsilon_prime, require_curve=True)
    # a box covering a finite group has no border to trim
    covers = group.is_finite and group.box_size(params.P) == group.order
    inner_radius = params.P if covers else params.P - params.Q

    selected: List[Any] = []
    records: List[BlockRecord] = []
    groups: List[List[Any]] = []
    c_blk = np.inf
    for k in centers:
        dist = group.distance(points, k[None, :])
        members = [family.labels[j] for j in np.nonzero(dist <= params.P)[0]]
        inner = {family.labels[j] for j in np.nonzero(dist <= inner_radius)[0]}
        if not members:
            continue
        if strict:
            result = finite_rit_select(truncated.subfamily(members), block_cfg)
            chosen = list(result.selected)
            kept = [l for l in chosen if l in inner]
        else:
            pool = [l for l in members if l in inner]
            if not pool:
                continue
            result = finite_rit_select(truncated.subfamily(pool), block_cfg)
            chosen = kept = list(result.selected)
        c_blk = min(c_blk, result.certified_c)
        lam = lambda_min(truncated.subfamily(kept)) if kept else 0.0
        records.append(BlockRecord(
            center=tuple(int(x) for x in k),
            size=len(members),
            selected=len(chosen),
            trimmed=len(chosen) - len(kept),
            lambda_min=lam,
            certificate=result.certified_c,
        ))
        logger.debug("block %s: %d members, %d selected, %d kept", tuple(k), len(members), len(chosen), len(kept))
        selected.extend(kept)
        groups.append(kept)
    return selected, records, groups, float(c_blk)


def _cell_volume(fmap: IndexedFamilyMap, blocks: int, spacing: int) -> float:
    """Volume of the periodic cells owned by the blocks"""
    group = fmap.group
    volume = float(blocks * spacing ** group.free_rank)
    for n in group.cyclic_moduli:
        volume *= n / max(1, n // spacing)
    return volume


def blockwise_select_caseA(
    family: VectorFamily,
    fmap: IndexedFamilyMap,
    reference: VectorFamily,
    epsilon: float,
    delta: float,
    cfg: Optional[SelectorConfig] = None,
    policy: str = "strict",
    dual: Optional[VectorFamily] = None,
) -> SelectionResult:
    """
    Blockwise selection against a Riesz reference with bounds A <= B.

    Certifies lambda_min(Gram(F_J)) directly and reports the block chain
    ((A/B) min_k lambda_min(F''_kQ))^{1/2} - ||F_J - F_JQ|| next to it. Raises
    SelectionInfeasibleError when lambda_min falls below the chain or below
    c(eps')(1 - delta/2)(A/B)u^2.
    """
    base = cfg or SelectorConfig()
    cfg = SelectorConfig(epsilon=epsilon, delta=delta, curve=base.curve, strategy=base.strategy, max_n=base.max_n)
    bounds = riesz_bounds(reference)
    if bounds.lower <= get_config().tolerance.eig_rel:
        raise InfeasibleParametersError("reference family is not a Riesz sequence", constraint="riesz_reference")
    A, B = bounds.lower, bounds.upper
    dual = dual if dual is not None else dual_family(reference, within_span=True)
    setup = _setup(family, fmap, reference)

    params = derive_parameters(
        epsilon, delta, cfg.curve, A, B, setup.u, setup.T_norm, setup.envelope.envelope,
        K=setup.K, dim=fmap.group.rank, D_minus=setup.D_minus, B_dual=bessel_bound(dual),
        policy=policy, gap_fn=_gap_fn(family, fmap, reference, dual, setup.truncated_at),
        density_fn=_density_fn(fmap), max_radius=_max_radius(fmap), covering_radius=_covering_radius(fmap),
    )
    truncated = setup.truncated_at.get(params.Q)
    if truncated is None:
        truncated = truncate_family(family, fmap, reference, dual, params.Q)
    selected, records, groups, c_blk = _select_blocks(family, truncated, fmap, params, cfg)

    claim1 = (A / B) * min(r.lambda_min for r in records)
    chain, gap_J = _chain(family, truncated, selected, claim1)
    return _finish(
        family, fmap, selected, records, params, cfg, setup,
        chain={
            "claim1": claim1,
            "gap": gap_J,
            "chain_bound": chain,
            "target": cfg.curve(params.epsilon_prime) * (1 - delta / 2) * (A / B) * setup.u ** 2,
            "c_block": c_blk,
            "A": A,
            "B": B,
        },
    )


def blockwise_select_caseB(
    family: VectorFamily,
    fmap: IndexedFamilyMap,
    reference: VectorFamily,
    epsilon: float,
    delta: float,
    cfg: Optional[SelectorConfig] = None,
    policy: str = "strict",
    group: Optional[FgaGroup] = None,
) -> SelectionResult:
    """
    Blockwise selection against a tight reference frame with a localized dual.

    Blocks sit W = 2P + R' apart. A measured cross-term ratio at or above
    delta/8, or cross terms above their envelope bound, raise
    InfeasibleParametersError.
    """
    base = cfg or SelectorConfig()
    cfg = SelectorConfig(epsilon=epsilon, delta=delta, curve=base.curve, strategy=base.strategy, max_n=base.max_n)
    fb = frame_bounds(reference)
    if not is_tight(fb, rtol=1e-9):
        raise InfeasibleParametersError(
            f"reference frame is not tight (A = {fb.lower:.6g}, B = {fb.upper:.6g})", constraint="tight_frame"
        )
    A = fb.upper
    dual = reference.scaled(1.0 / A)
    group = group or fmap.group
    dual_report = self_localization_check(dual, group=group)
    setup = _setup(family, fmap, reference)

    params = derive_parameters(
        epsilon, delta, cfg.curve, A, A, setup.u, setup.T_norm, setup.envelope.envelope,
        dual_envelope=dual_report.envelope,
        K=setup.K, dim=group.rank, D_minus=setup.D_minus, B_dual=1.0 / A, B_prime=A,
        policy=policy, gap_fn=_gap_fn(family, fmap, reference, dual, setup.truncated_at),
        density_fn=_density_fn(fmap), max_radius=_max_radius(fmap), covering_radius=_covering_radius(fmap),
    )
    truncated = setup.truncated_at.get(params.Q)
    if truncated is None:
        truncated = truncate_family(family, fmap, reference, dual, params.Q)
    selected, records, groups, c_blk = _select_blocks(family, truncated, fmap, params, cfg)

    F_JQ = truncated.subfamily(selected)
    positions = []
    offset = 0
    for g in groups:
        positions.append(np.arange(offset, offset + len(g)))
        offset += len(g)
    rho, v = cross_term_ratio(gram_entries(F_JQ), [p for p in positions if len(p)])
    c_abs = min(r.lambda_min for r in records)
    blocks = [F_JQ.matrix[:, p] @ v[p] for p in positions if len(p)]
    bound, actual = cross_term_bound(
        blocks, dual_report.envelope, params.R_prime, setup.K, params.Q, A,
        c_abs / setup.u ** 2, setup.u, setup.T_norm, dim=group.rank,
    )
    if rho >= delta / 8:
        raise InfeasibleParametersError(
            f"cross-term ratio {rho:.4g} between blocks {params.spacing} apart is not below delta/8 = {delta / 8:.4g}",
            constraint="separation",
            record={**params.to_dict(), "cross_ratio": rho},
        )
    if actual > bound * (1 + 1e-9) + get_config().tolerance.residual:
        raise InfeasibleParametersError(
            f"cross terms {actual:.4g} exceed their envelope bound {bound:.4g}",
            constraint="cross_term_bound",
            record={**params.to_dict(), "cross_actual": actual, "cross_bound": bound},
        )
    chain, gap_J = _chain(family, truncated, selected, (1 - rho) * c_abs)
    return _finish(
        family, fmap, selected, records, params, cfg, setup,
        chain={
            "cross_ratio": rho,
            "cross_ratio_limit": delta / 8,
            "cross_actual": actual,
            "cross_bound": bound,
            "block_lower": c_abs,
            "gap": gap_J,
            "chain_bound": chain,
            "target": cfg.curve(params.epsilon_prime) * (1 - delta / 2) * setup.u ** 2,
            "c_block": c_blk,
            "A": A,
            "B": A,
        },
    )


def _covering_radius(fmap: IndexedFamilyMap) -> Optional[int]:
    return fmap.group.max_radius() if fmap.group.is_finite else None


def _max_radius(fmap: IndexedFamilyMap) -> int:
    group = fmap.group
    if group.is_finite:
        return max(1, group.max_radius())
    lows, highs = fmap.free_extent()
    return max(1, int(np.max(highs - lows)) // 2)


def _chain(family: VectorFamily, truncated: VectorFamily, selected: Sequence[Any], block_lower: float) -> Tuple[float, float]:
    """((block_lower)^{1/2} - ||F_J - F_JQ||)_+^2 and the gap"""
    gap = analysis_gap_norm(family.subfamily(selected), truncated.subfamily(selected))
    root = math.sqrt(max(block_lower, 0.0)) - gap
    return (root ** 2 if root > 0 else 0.0), gap


def _finish(
    family: VectorFamily,
    fmap: IndexedFamilyMap,
    selected: List[Any],
    records: List[BlockRecord],
    params: DerivedParameters,
    cfg: SelectorConfig,
    setup: _Setup,
    chain: Dict[str, Any],
) -> SelectionResult:
    lower, upper = exact_bounds(family.subfamily(selected))
    chain["direct"] = lower
    for key in ("target", "chain_bound"):
        if lower < chain[key] - 1e-9:
            raise SelectionInfeasibleError(
                f"lambda_min(Gram(F_J)) = {lower:.4g} falls below the block {key} {chain[key]:.4g}",
                best_subset=selected,
                certificate=lower,
                required=chain[key],
            )
    volume = _cell_volume(fmap, len(records), params.spacing)
    density_J = len(selected) / volume
    ratio = density_J / setup.D_minus if setup.D_minus > 0 else 0.0
    logger.info("blockwise case %s: |J| = %d over %d blocks, lambda_min %.4g (target %.4g), density ratio %.4f",
                params.case, len(selected), len(records), lower, chain["target"], ratio)
    return SelectionResult(
        selected=list(selected),
        achieved_lower=lower,
        achieved_upper=upper,
        size_ratio=ratio,
        strategy=cfg.strategy,
        epsilon=params.epsilon,
        delta=params.delta,
        u=setup.u,
        T_norm=setup.T_norm,
        certified_c=chain["c_block"],
        required_c=cfg.curve(params.epsilon_prime),
        params=params,
        per_block=records,
        chain=chain,
        trace={"D_minus": setup.D_minus, "density_J": density_J, "cell_volume": volume,
               "envelope_verdict": setup.envelope.verdict.value},
        source=family,
        family_map=fmap,
    )
