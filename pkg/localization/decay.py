"""
Decay classification for envelopes sampled on a finite window.

Summability of an infinite envelope cannot be decided from finitely many
values, so the verdict is three-valued and always carries the fit behind it.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
from sklearn.linear_model import LinearRegression

from config import get_config

logger = logging.getLogger(__name__)


class Verdict(Enum):
    SUPPORTED = "supported"
    UNSUPPORTED = "unsupported"
    INCONCLUSIVE = "inconclusive"


@dataclass
class DecayFit:
    kind: str  # compact, geometric, gaussian, polynomial, flat, none
    rate: float = 0.0
    r2: float = 0.0
    exponent: Optional[float] = None
    support_radius: Optional[int] = None
    fits: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "rate": self.rate,
            "r2": self.r2,
            "exponent": self.exponent,
            "support_radius": self.support_radius,
            "fits": self.fits,
        }


def shell_maxima(values: np.ndarray, radii: np.ndarray, length: Optional[int] = None) -> np.ndarray:
    """max of values on each shell ||k||_inf = r, zero for empty shells"""
    radii = np.asarray(radii, dtype=np.int64)
    length = int(radii.max()) + 1 if length is None else int(length)
    out = np.zeros(length)
    keep = radii < length
    np.maximum.at(out, radii[keep], np.asarray(values, dtype=float)[keep])
    return out


def _fit(x: np.ndarray, y: np.ndarray) -> Dict[str, float]:
    model = LinearRegression().fit(x.reshape(-1, 1), y)
    return {"slope": float(model.coef_[0]), "intercept": float(model.intercept_), "r2": float(model.score(x.reshape(-1, 1), y))}


def classify_decay(
    shells: np.ndarray,
    dim: int,
    p: int = 1,
    support_scale: Optional[float] = None,
) -> tuple:
    """
    Classify shell maxima s_0, s_1, ... of an envelope on a d-dimensional group.

    - all mass within a quarter of ``support_scale`` (values at or below the
      floor beyond it): compact, supported;
    - no decay at all: flat, unsupported;
    - otherwise log s is regressed on r (geometric), r^2 (gaussian) and
      log r (polynomial). A clearly decaying geometric or gaussian fit that
      explains the data at least as well as the polynomial one is supported;
      a polynomial exponent s is compared with the summability threshold -d/p.

    Returns (Verdict, DecayFit).
    """
    cfg = get_config().localization
    shells = np.asarray(shells, dtype=float)
    above = np.nonzero(shells > cfg.decay_floor)[0]
    if above.size == 0:
        return Verdict.SUPPORTED, DecayFit(kind="compact", support_radius=0)

    last = int(above[-1])
    scale = float(support_scale) if support_scale is not None else float(len(shells) - 1)
    if last == 0 or (last < len(shells) - 1 and last <= scale / 4):
        return Verdict.SUPPORTED, DecayFit(kind="compact", support_radius=last)

    r = np.arange(1, last + 1, dtype=float)
    s = shells[1: last + 1]
    mask = s > cfg.decay_floor
    r, s = r[mask], s[mask]
    if r.size < cfg.min_shells:
        return Verdict.INCONCLUSIVE, DecayFit(kind="none", support_radius=last)

    y = np.log(s)
    geometric = _fit(r, y)
    gaussian = _fit(r ** 2, y)
    polynomial = _fit(np.log(r), y)
    fits = {"geometric": geometric, "gaussian": gaussian, "polynomial": polynomial}
    threshold = -dim / p

    if geometric["slope"] >= -1e-9:
        return Verdict.UNSUPPORTED, DecayFit(kind="flat", rate=geometric["slope"], r2=geometric["r2"],
                                             exponent=polynomial["slope"], fits=fits)

    decades = float(np.log10(s.max() / s.min()))
    best_exp = max(("geometric", "gaussian"), key=lambda k: fits[k]["r2"])
    if (
        decades >= 3.0
        and fits[best_exp]["r2"] >= cfg.r2_threshold
        and fits[best_exp]["r2"] >= polynomial["r2"]
        and fits[best_exp]["slope"] < 0
    ):
        fit = fits[best_exp]
        return Verdict.SUPPORTED, DecayFit(kind=best_exp, rate=fit["slope"], r2=fit["r2"],
                                           exponent=polynomial["slope"], fits=fits)

    exponent = polynomial["slope"]
    fit = DecayFit(kind="polynomial", rate=exponent, r2=polynomial["r2"], exponent=exponent, fits=fits)
    if exponent < threshold - cfg.exponent_margin:
        return Verdict.SUPPORTED, fit
    if exponent > threshold + cfg.exponent_margin:
        return Verdict.UNSUPPORTED, fit
    logger.warning("decay exponent %.3f is within %.2f of the summability threshold %.2f",
                   exponent, cfg.exponent_margin, threshold)
    return Verdict.INCONCLUSIVE, fit
