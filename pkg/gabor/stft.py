"""
Time-frequency shifts, the short-time Fourier transform and modulation norms
on Z_n.

V_g f(x, w) = <f, M_w T_x g> = sum_k f[k] conj(g[k - x]) e^{-2 pi i w k / n},
computed row by row with numpy's FFT. Continuous-domain quantities are
approximated with the TF cell area 1/n.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd

from errors import DimensionMismatchError, GaborError
from localization.decay import DecayFit, Verdict, classify_decay, shell_maxima
from .signal import Signal, TFPoint, gaussian

logger = logging.getLogger(__name__)


def translate(phi: Signal, x: int) -> Signal:
    """(T_x phi)[k] = phi[k - x]"""
    return phi.with_samples(np.roll(phi.samples, int(x) % phi.n))


def modulate(phi: Signal, omega: int) -> Signal:
    """(M_w phi)[k] = e^{2 pi i w k / n} phi[k]"""
    k = np.arange(phi.n)
    return phi.with_samples(phi.samples * np.exp(2j * np.pi * (int(omega) % phi.n) * k / phi.n))


def tf_shift(phi: Signal, lam: Union[TFPoint, Sequence[int]]) -> Signal:
    """pi(lam) phi = M_w T_x phi"""
    lam = lam if isinstance(lam, TFPoint) else TFPoint(*lam)
    return modulate(translate(phi, lam.x), lam.omega)


def _check_pair(f: Signal, g: Signal):
    if f.n != g.n:
        raise DimensionMismatchError(f"signals live on grids of size {f.n} and {g.n}")
    if not np.any(np.abs(g.samples) > 0):
        raise GaborError("the STFT window must be nonzero")


def stft(f: Signal, g: Signal) -> np.ndarray:
    """Table V[x, w] of shape (n, n)"""
    _check_pair(f, g)
    n = f.n
    k = np.arange(n)
    shifted = g.samples[(k[None, :] - k[:, None]) % n]
    return np.fft.fft(f.samples[None, :] * shifted.conj(), axis=1)


def stft_frame(V: np.ndarray) -> pd.DataFrame:
    """|V| as a matrix: rows x, columns w"""
    n = V.shape[0]
    return pd.DataFrame(np.abs(V), index=pd.Index(np.arange(n), name="x"), columns=[f"w{j}" for j in range(V.shape[1])])


def write_stft_csv(V: np.ndarray, path: Union[str, Path]) -> Path:
    path = Path(path)
    stft_frame(V).to_csv(path, float_format="%.17g")
    return path


def energy_residual(f: Signal, g: Signal, V: Optional[np.ndarray] = None) -> float:
    """|sum |V_g f|^2 - n ||f||^2 ||g||^2| relative to the closed form"""
    V = stft(f, g) if V is None else V
    expected = f.n * f.norm() ** 2 * g.norm() ** 2
    return abs(float(np.sum(np.abs(V) ** 2)) - expected) / max(expected, 1e-300)


def covariance_deviation(f: Signal, g: Signal, mu: Union[TFPoint, Sequence[int]]) -> float:
    """max | |V_g(pi(mu) f)| - |V_g f| shifted by mu |"""
    mu = mu if isinstance(mu, TFPoint) else TFPoint(*mu)
    base = np.abs(stft(f, g))
    moved = np.abs(stft(tf_shift(f, mu), g))
    return float(np.max(np.abs(moved - np.roll(base, (mu.x, mu.omega), axis=(0, 1)))))


def modulation_norm(f: Signal, g0: Optional[Signal] = None, p: Union[int, float, str] = 1) -> float:
    """
    ||V_{g0} f||_{L^p} approximated on the grid with cell area 1/n.

    For p = 2 this equals ||f|| ||g0|| exactly.
    """
    g0 = gaussian(f.n, f.grid_spacing) if g0 is None else g0
    V = np.abs(stft(f, g0))
    cell = 1.0 / f.n
    if p in (np.inf, "inf", float("inf")):
        return float(V.max())
    p = float(p)
    if p not in (1.0, 2.0):
        raise ValueError(f"p must be 1, 2 or inf, got {p}")
    return float((np.sum(V ** p) * cell) ** (1.0 / p))


def tf_radii(n: int, center: Sequence[int] = (0, 0)) -> np.ndarray:
    """Cyclic sup-norm distance of every (x, w) from ``center``"""
    k = np.arange(n)
    dx = np.abs((k - int(center[0]) + n // 2) % n - n // 2)
    dw = np.abs((k - int(center[1]) + n // 2) % n - n // 2)
    return np.maximum(dx[:, None], dw[None, :])


@dataclass
class S0Report:
    m1: float
    norm: float
    verdict: Verdict
    fit: DecayFit
    peak: tuple

    @property
    def supported(self) -> bool:
        return self.verdict is Verdict.SUPPORTED

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m1": self.m1,
            "norm": self.norm,
            "verdict": self.verdict.value,
            "fit": self.fit.to_dict(),
            "peak": list(self.peak),
        }


def s0_diagnostic(f: Signal, g0: Optional[Signal] = None) -> S0Report:
    """
    Feichtinger-algebra diagnostic: the M^1 estimate and the decay of |V_{g0} f|
    away from its peak, classified on the 2-D TF plane.
    """
    g0 = gaussian(f.n, f.grid_spacing) if g0 is None else g0
    V = np.abs(stft(f, g0))
    peak = np.unravel_index(int(np.argmax(V)), V.shape)
    radii = tf_radii(f.n, peak)
    shells = shell_maxima(V.ravel(), radii.ravel(), f.n // 2 + 1)
    verdict, fit = classify_decay(shells, dim=2, p=1, support_scale=f.n / 2)
    m1 = float(V.sum() / f.n)
    logger.debug("S0 diagnostic: M1 %.4g, verdict %s (%s)", m1, verdict.value, fit.kind)
    return S0Report(m1=m1, norm=f.norm(), verdict=verdict, fit=fit, peak=(int(peak[0]), int(peak[1])))
