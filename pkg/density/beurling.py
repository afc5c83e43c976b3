"""
Beurling density of point sets in R^D by cube counting.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from config import get_config
from .estimate import DensityEstimate, extrapolate_sweep

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Lattice:
    """The lattice A Z^D; columns of ``basis`` are the generators"""
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return np.asarray(self.basis).shape[0]

    @property
    def covolume(self) -> float:
        return float(abs(np.linalg.det(np.asarray(self.basis, dtype=float))))

    def points(self, extent: int) -> np.ndarray:
        """Lattice points A n for n in [-extent, extent]^D"""
        grid = np.meshgrid(*[np.arange(-extent, extent + 1)] * self.dim, indexing="ij")
        n = np.stack([g.ravel() for g in grid], axis=1)
        return n @ np.asarray(self.basis, dtype=float).T


def _centers(lo: np.ndarray, hi: np.ndarray, spacing: float, per_axis_cap: int) -> np.ndarray:
    axes = []
    for a, b in zip(lo, hi):
        count = int(np.floor((b - a) / spacing)) + 1
        if count > per_axis_cap:
            axes.append(np.linspace(a, b, per_axis_cap))
        else:
            axes.append(a + spacing * np.arange(count))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def beurling_density(
    points: Union[np.ndarray, Lattice],
    r_max: float = 32.0,
    radii: Optional[Sequence[float]] = None,
    per_axis_cap: int = 64,
) -> DensityEstimate:
    """
    Lower/upper Beurling density of a finite rendering of a point set.

    Cubes of side 2R are centered on a grid of spacing R/8 inside the data
    hull eroded by R, so every counted cube lies within the rendered region.
    A Lattice descriptor yields the exact value 1/|det A|.
    """
    if isinstance(points, Lattice):
        value = 1.0 / points.covolume
        return DensityEstimate(lower=value, upper=value, exact=True)

    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return DensityEstimate(lower=0.0, upper=0.0, exact=True)
    pts = pts.reshape(pts.shape[0], -1)
    D = pts.shape[1]
    cfg = get_config().density

    tree = cKDTree(pts)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    if radii is None:
        radii = [float(2 ** k) for k in range(0, int(np.log2(max(r_max, 1.0))) + 1)]

    sweep: List[Tuple[int, float, float]] = []
    for R in radii:
        inner_lo, inner_hi = lo + R, hi - R
        if np.any(inner_lo > inner_hi):
            break
        centers = _centers(inner_lo, inner_hi, cfg.center_grid_fraction * R, per_axis_cap)
        counts = tree.query_ball_point(centers, r=R, p=np.inf, return_length=True)
        vol = (2.0 * R) ** D
        sweep.append((R, float(np.min(counts)) / vol, float(np.max(counts)) / vol))
        logger.debug("R=%g: %d centers, density in [%.4f, %.4f]", R, len(centers), sweep[-1][1], sweep[-1][2])

    lower, upper, info = extrapolate_sweep(sweep, cfg.extrapolation_tail)
    return DensityEstimate(lower=lower, upper=upper, exact=False, sweep=sweep, extrapolation=info)
