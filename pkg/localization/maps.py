"""
Envelope extraction for (F, a, G) triples and for index-free families.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from config import get_config
from density.familymap import IndexedFamilyMap
from density.group import FgaGroup
from density.index_free import assign_centers, coefficient_matrix
from density.relations import fiber_bound, map_equivalence
from errors import LocalizationError
from frames.family import VectorFamily, label_points
from .decay import classify_decay
from .envelope import CenterAssignment, Envelope, LocalizationReport

logger = logging.getLogger(__name__)


def reference_points(reference: VectorFamily, group: FgaGroup) -> np.ndarray:
    points = label_points(reference)
    if points.shape[1] != group.rank:
        raise LocalizationError(f"reference labels have {points.shape[1]} coordinates, group rank is {group.rank}")
    return group.reduce_array(points)


def _support_scale(group: FgaGroup, points: np.ndarray) -> float:
    """Reach of the indexed points; supports well inside it count as compact"""
    if group.is_finite:
        return float(group.max_radius())
    free = points[:, : group.free_rank]
    reach = int((free.max(axis=0) - free.min(axis=0)).max()) if free.size else 0
    return float(max(reach, max((n // 2 for n in group.cyclic_moduli), default=0)))


def _minimal_envelope(group: FgaGroup, offsets: np.ndarray, magnitudes: np.ndarray, p: int) -> Envelope:
    offsets = group.centered_offsets(offsets)
    if len(offsets) == 0:
        return Envelope(group, np.zeros((0, group.rank), dtype=np.int64), np.zeros(0), p, 0)
    uniq, inverse = np.unique(offsets, axis=0, return_inverse=True)
    values = np.zeros(len(uniq))
    np.maximum.at(values, inverse.ravel(), magnitudes)
    radius = int(group.norm(uniq).max())
    return Envelope(group, uniq, values, p, radius)


def _report(envelope: Envelope, window_radius: int, indexed: np.ndarray, diagnostics: dict) -> LocalizationReport:
    envelope.window_radius = max(envelope.window_radius, window_radius)
    verdict, fit = classify_decay(
        envelope.shell_maxima(),
        dim=envelope.group.rank,
        p=envelope.p,
        support_scale=_support_scale(envelope.group, indexed),
    )
    diagnostics = dict(diagnostics)
    diagnostics["window_radius"] = envelope.window_radius
    report = LocalizationReport(envelope=envelope, minimal=True, verdict=verdict, fit=fit, diagnostics=diagnostics)
    logger.info("envelope: %d offsets, total %.4g, verdict %s (%s)",
                len(envelope.values), envelope.total(), verdict.value, fit.kind)
    return report


def envelope_from_map(
    family: VectorFamily,
    fmap: IndexedFamilyMap,
    reference: VectorFamily,
    p: int = 1,
) -> LocalizationReport:
    """
    Minimal envelope r(k) = max |<f_i, g_k'>| over pairs with a(i) - k' = k.

    Only nonzero coefficients contribute; offsets never realized carry 0.
    The report carries tail sums and the three-valued summability verdict.
    """
    group = fmap.group
    C = np.abs(coefficient_matrix(family, reference))
    rows, cols = np.nonzero(C > get_config().tolerance.zero)
    a_pts = fmap.points_of(family.labels)
    g_pts = reference_points(reference, group)

    envelope = _minimal_envelope(group, a_pts[rows] - g_pts[cols], C[rows, cols], p)
    window = _window_radius(group, a_pts, g_pts)
    return _report(envelope, window, a_pts, {"pairs": int(len(rows)), "fiber": fiber_bound(fmap)})


def _window_radius(group: FgaGroup, a_pts: np.ndarray, g_pts: np.ndarray) -> int:
    """Largest offset norm the window can realize"""
    if group.is_finite:
        return group.max_radius()
    pts = np.vstack([a_pts, g_pts])
    free = pts[:, : group.free_rank]
    reach = int((free.max(axis=0) - free.min(axis=0)).max()) if free.size else 0
    cyc = max((n // 2 for n in group.cyclic_moduli), default=0)
    return max(reach, cyc)


def envelope_index_free(
    family: VectorFamily,
    reference: VectorFamily,
    group: Optional[FgaGroup] = None,
    p: int = 1,
) -> Tuple[CenterAssignment, LocalizationReport]:
    """
    Centers k_f = argmax_n |<f, g_n>| (ties to the lexicographically smallest
    point) and the envelope r(n - k_f) = sup over f of the recentred profiles.
    """
    g_pts = label_points(reference)
    group = group if group is not None else FgaGroup.integers(g_pts.shape[1])
    g_pts = reference_points(reference, group)
    C = np.abs(coefficient_matrix(family, reference))
    if np.any(C.max(axis=1) <= get_config().tolerance.zero):
        bad = [family.labels[i] for i in np.nonzero(C.max(axis=1) <= get_config().tolerance.zero)[0]]
        raise LocalizationError(f"members {bad[:5]} have no nonzero coefficient against the reference")

    center_idx = assign_centers(C, g_pts)
    centers = g_pts[center_idx]
    assignment = CenterAssignment(group, {l: tuple(int(x) for x in c) for l, c in zip(family.labels, centers)})

    rows, cols = np.nonzero(C > get_config().tolerance.zero)
    envelope = _minimal_envelope(group, g_pts[cols] - centers[rows], C[rows, cols], p)
    window = _window_radius(group, centers, g_pts)
    return assignment, _report(envelope, window, centers, {"pairs": int(len(rows))})


def self_localization_check(reference: VectorFamily, group: Optional[FgaGroup] = None, p: int = 1) -> LocalizationReport:
    """(G, id, G) with the reference labels read as group points"""
    g_pts = label_points(reference)
    group = group if group is not None else FgaGroup.integers(g_pts.shape[1])
    fmap = IndexedFamilyMap(group, reference.labels, g_pts)
    return envelope_from_map(reference, fmap, reference, p=p)


def dominates(report: LocalizationReport, family: VectorFamily, fmap: IndexedFamilyMap,
              reference: VectorFamily, rtol: float = 1e-12) -> bool:
    """|<f_i, g_k'>| <= r(a(i) - k') for every pair in the window"""
    env = report.envelope
    group = fmap.group
    C = np.abs(coefficient_matrix(family, reference))
    a_pts = fmap.points_of(family.labels)
    g_pts = reference_points(reference, group)
    offsets = group.centered_offsets((a_pts[:, None, :] - g_pts[None, :, :]).reshape(-1, group.rank))
    table = {tuple(o): v for o, v in zip(env.offsets.tolist(), env.values)}
    bound = np.array([table.get(tuple(o), 0.0) for o in offsets.tolist()]).reshape(C.shape)
    return bool(np.all(C <= bound * (1 + rtol) + get_config().tolerance.zero))


def shift_envelope_check(
    a: IndexedFamilyMap,
    b: IndexedFamilyMap,
    report: LocalizationReport,
    family: VectorFamily,
    reference: VectorFamily,
) -> dict:
    """
    For maps with bounded difference s = sup ||a(i) - b(i)||, the envelope of
    a widened by s is a valid envelope for b.
    """
    relation = map_equivalence(a, b, compare_densities=False)
    widened = report.envelope.shifted_by(relation.sup_difference)
    candidate = LocalizationReport(widened, minimal=False, verdict=report.verdict, fit=report.fit)
    valid = dominates(candidate, family, b, reference)
    logger.debug("shifted envelope by %d: valid for b = %s", relation.sup_difference, valid)
    return {
        "shift": relation.sup_difference,
        "bounded_difference": relation.bounded_difference,
        "valid_for_b": valid,
        "envelope_total": widened.total(),
    }
