"""
Fixture Catalog

Builders for the worked instances the toolkit is checked against: maps on
Z with different densities, linear and planar orderings of a standard
basis, the operator e_n -> e_n + e_2n, copies of one localized vector, the
duplicated basis, geometrically localized families and the Gabor
half-lattice setting. ``emit_fixtures`` writes all of them to disk.

Standard basis vectors e_m, |m| <= L, live in C^(2L+1) with e_m at row m + L.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from density.familymap import IndexedFamilyMap
from density.group import FgaGroup
from frames.family import VectorFamily
from frames.io import write_family_csv, write_family_json

logger = logging.getLogger(__name__)


# -- standard basis window -------------------------------------------------

def basis_matrix(indices: Sequence[int], L: int) -> np.ndarray:
    """Columns e_m for m in ``indices`` inside C^(2L+1)"""
    indices = np.asarray(list(indices), dtype=np.int64)
    if indices.size and np.max(np.abs(indices)) > L:
        raise ValueError(f"basis index {int(np.max(np.abs(indices)))} outside the window |m| <= {L}")
    M = np.zeros((2 * L + 1, len(indices)))
    M[indices + L, np.arange(len(indices))] = 1.0
    return M


def standard_basis(L: int, labels: Optional[Sequence[Any]] = None) -> VectorFamily:
    """{e_m : |m| <= L} labelled by m"""
    idx = list(range(-L, L + 1))
    return VectorFamily(basis_matrix(idx, L), tuple(labels) if labels is not None else tuple(idx))


# -- maps on Z with different densities ------------------------------------

def rearranged_index(i: int) -> int:
    """Bijection of Z sending odd numbers onto 4Z and even numbers onto Z minus 4Z"""
    if i % 2:
        return 4 * ((i - 1) // 2)
    q, r = divmod(i // 2, 3)
    return 4 * q + r + 1


def example_maps(M: int = 96) -> Dict[str, IndexedFamilyMap]:
    """
    Three maps on I = [-M, M] into Z: identity, doubling and the rearranged
    bijection. With J the even labels the density ratios are 1/2, 1/2, 3/4.
    """
    group = FgaGroup.integers(1)
    labels = list(range(-M, M + 1))
    return {
        "identity": IndexedFamilyMap.from_function(group, labels, lambda i: (i,)),
        "double": IndexedFamilyMap.from_function(group, labels, lambda i: (2 * i,)),
        "rearranged": IndexedFamilyMap.from_function(group, labels, lambda i: (rearranged_index(i),)),
    }


def even_labels(fmap: IndexedFamilyMap) -> List[int]:
    return [l for l in fmap.labels if l % 2 == 0]


# -- linear orderings of the standard basis --------------------------------

def exotic_index(p: int) -> int:
    """
    Basis index at position p of the ordering
    ..., e_-2, e_-5, e_-3, e_-1, e_0, e_1, e_3, e_5, e_2, e_7, e_9, e_11, e_4, ...
    """
    if p == 0:
        return 0
    if p < 0:
        return -exotic_index(-p)
    q, s = divmod(p - 1, 4)
    return 6 * q + 2 * s + 1 if s < 3 else 2 * (q + 1)


def exotic_order(count: int) -> List[int]:
    return [exotic_index(p) for p in range(count)]


@dataclass
class OrderingExample:
    """A reference ordering on positions [-R, R] and the basis vectors it uses"""
    name: str
    reference: VectorFamily
    F: VectorFamily
    L: int

    def even(self) -> VectorFamily:
        return self.F.subfamily([l for l in self.F.labels if l % 2 == 0])

    def odd(self) -> VectorFamily:
        return self.F.subfamily([l for l in self.F.labels if l % 2])


def _ordering(name: str, R: int, index_of) -> OrderingExample:
    positions = list(range(-R, R + 1))
    idx = [index_of(p) for p in positions]
    L = max(abs(m) for m in idx)
    reference = VectorFamily(basis_matrix(idx, L), tuple(positions))
    used = sorted(set(idx))
    F = VectorFamily(basis_matrix(used, L), tuple(used))
    return OrderingExample(name, reference, F, L)


def ordering_example(kind: str, R: int = 512) -> OrderingExample:
    """
    ``basis``: g_p = e_p; ``intertwined``: g_2n = g_2n+1 = e_n; ``exotic``:
    the ordering of ``exotic_index``. F is the set of e_m the ordering uses.
    """
    if kind == "basis":
        return _ordering(kind, R, lambda p: p)
    if kind == "intertwined":
        return _ordering(kind, R, lambda p: p // 2)
    if kind == "exotic":
        return _ordering(kind, R, exotic_index)
    raise ValueError(f"unknown ordering '{kind}'")


# -- planar arrangement of the standard basis ------------------------------

def odd_part(n: int) -> Tuple[int, int]:
    """|n| = m 2^c with m odd"""
    n = abs(n)
    c = 0
    while n % 2 == 0:
        n //= 2
        c += 1
    return n, c


def planar_position(n: int) -> Tuple[int, int]:
    """
    (row, column) of e_n in the planar arrangement: powers of two fill row 0
    (e_0 at column 0, +-2^c at columns c+1 and -(c+1)); for n = +-m 2^c with
    m > 1 odd the row is (m-1)/4 or -(m+1)/4 and the column c or -(c+1).
    """
    if n == 0:
        return (0, 0)
    m, c = odd_part(n)
    if m == 1:
        return (0, c + 1) if n > 0 else (0, -(c + 1))
    row = (m - 1) // 4 if m % 4 == 1 else -(m + 1) // 4
    return (row, c) if n > 0 else (row, -(c + 1))


def planar_reference(L: int) -> VectorFamily:
    """{e_n : |n| <= L} labelled by their planar positions"""
    idx = list(range(-L, L + 1))
    return VectorFamily(basis_matrix(idx, L), tuple(planar_position(n) for n in idx))


def planar_row(row: int, L: int) -> List[int]:
    """Basis indices of one row, ordered by column"""
    cells = sorted((planar_position(n)[1], n) for n in range(-L, L + 1) if planar_position(n)[0] == row)
    return [n for _, n in cells]


# -- the operator e_n -> e_n + e_2n ----------------------------------------

def doubling_sum_family(labels: Sequence[int], L: int) -> VectorFamily:
    """T e_n = e_n + e_2n for n in ``labels``; needs |2n| <= L"""
    labels = list(labels)
    M = basis_matrix(labels, L) + basis_matrix([2 * n for n in labels], L)
    return VectorFamily(M, tuple(labels))


def doubling_sum_map(labels: Sequence[int], kind: str = "planar") -> IndexedFamilyMap:
    """
    Localization map for the doubling-sum family: ``planar`` sends n to the
    position of whichever of e_n, e_2n sits further right in the planar
    arrangement; ``basis`` is the identity on Z.
    """
    labels = list(labels)
    if kind == "basis":
        return IndexedFamilyMap.from_function(FgaGroup.integers(1), labels, lambda n: (n,))
    if kind != "planar":
        raise ValueError(f"unknown map kind '{kind}'")

    def pick(n: int) -> Tuple[int, int]:
        if n == 0:
            return planar_position(0)
        a, b = planar_position(n), planar_position(2 * n)
        return b if b[1] > a[1] else a

    return IndexedFamilyMap.from_function(FgaGroup.integers(2), labels, pick)


def alternating_power_sum(N: int, L: int) -> np.ndarray:
    """sum_{n=1}^{N} (-1)^n T e_{2^n}"""
    fam = doubling_sum_family([2 ** n for n in range(1, N + 1)], L)
    signs = np.array([(-1) ** n for n in range(1, N + 1)], dtype=float)
    return fam.matrix @ signs


# -- other instances -------------------------------------------------------

def localized_copies(copies: int, L: int = 32, rho: float = 0.5) -> Tuple[VectorFamily, VectorFamily]:
    """
    (F, G): ``copies`` identical vectors f = sum rho^|m| e_m against the
    standard basis, all mapped to 0.
    """
    m = np.arange(-L, L + 1)
    f = rho ** np.abs(m)
    F = VectorFamily(np.tile(f[:, None], (1, copies)), tuple(range(copies)))
    return F, standard_basis(L)


def duplicated_basis(n: int) -> VectorFamily:
    """Every e_j of C^n twice, labelled (j, 0) and (j, 1)"""
    eye = np.eye(n)
    cols = np.repeat(eye, 2, axis=1)
    return VectorFamily(cols, tuple((j, c) for j in range(n) for c in (0, 1)))


def geometric_family(W: int = 256, rho: float = 0.2, width: int = 3) -> Tuple[VectorFamily, IndexedFamilyMap, VectorFamily]:
    """
    f_i = sum_{|m| <= width} rho^|m| e_{i+m} for |i| <= W with a = id and the
    standard basis as reference (padded by ``width``).
    """
    L = W + width
    labels = list(range(-W, W + 1))
    M = np.zeros((2 * L + 1, len(labels)))
    for j, i in enumerate(labels):
        for m in range(-width, width + 1):
            M[i + m + L, j] = rho ** abs(m)
    family = VectorFamily(M, tuple(labels))
    fmap = IndexedFamilyMap.from_function(FgaGroup.integers(1), labels, lambda i: (i,))
    return family, fmap, standard_basis(L)


def random_unit_family(n: int, dim: int, seed: int, complex_valued: bool = False) -> VectorFamily:
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((dim, n))
    if complex_valued:
        M = M + 1j * rng.standard_normal((dim, n))
    return VectorFamily(M / np.linalg.norm(M, axis=0, keepdims=True))


# -- emission --------------------------------------------------------------

def _write_json(path: Path, payload: Dict[str, Any]) -> Path:
    path.write_text(json.dumps(payload, indent=1, sort_keys=True))
    return path


def emit_fixtures(target_dir: Union[str, Path], R: int = 64, L: int = 64) -> List[Path]:
    """Write every fixture below ``target_dir``; output is identical across runs"""
    from gabor.signal import TFSet, gaussian
    from gabor.systems import half_lattice_step

    out = Path(target_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    for name, fmap in example_maps().items():
        written.append(fmap.write_json(out / f"map_{name}.json"))

    for kind in ("basis", "intertwined", "exotic"):
        ex = ordering_example(kind, R)
        written.append(_write_json(out / f"ordering_{kind}.json", {
            "positions": [int(p) for p in ex.reference.labels],
            "basis_index": [int(np.argmax(np.abs(c))) - ex.L for c in ex.reference.vectors],
        }))

    written.append(_write_json(out / "planar_arrangement.json", {
        "window": L,
        "positions": {str(n): list(planar_position(n)) for n in range(-L, L + 1)},
        "row0": planar_row(0, L),
    }))

    labels = [n for n in range(-(L // 2), L // 2 + 1) if n]
    written.append(write_family_json(doubling_sum_family(labels, L), out / "doubling_sum_family.json"))
    written.append(doubling_sum_map(labels).write_json(out / "doubling_sum_map_planar.json"))

    F, _ = localized_copies(16, L=16)
    written.append(write_family_csv(F, out / "localized_copies.csv"))
    written.append(write_family_csv(duplicated_basis(8), out / "duplicated_basis.csv"))

    family, fmap, _ = geometric_family(W=32)
    written.append(write_family_csv(family, out / "geometric_family.csv"))
    written.append(fmap.write_json(out / "geometric_map.json"))

    n = 128
    written.append(gaussian(n).to_csv(out / "gaussian_128.csv"))
    h = half_lattice_step(n)
    written.append(TFSet.lattice(n, h, h).write_json(out / f"half_lattice_128_h{h}.json"))

    logger.info("wrote %d fixtures to %s", len(written), out)
    return written
