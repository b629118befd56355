"""Weighted Aluthge transforms of invertible matrices.

For invertible T = U|T| the weighted transform is |T|^lam U |T|^(1-lam),
which equals |T|^lam T |T|^(-lam): a similarity, so the spectrum is
preserved.  Only invertible inputs are supported; the partial-isometry
polar decomposition of singular matrices is out of scope.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .core import (
    as_operator,
    eig_general,
    fractional_power,
    frobenius,
    polar_decompose,
)
from .errors import SizeMismatch, Singular


@dataclass(frozen=True)
class AluthgeDecomposition:
    """Polar factors, the transformed matrix, and the similarity defect
    || |T|^(-lam) D |T|^lam - T ||_F (small for invertible T)."""

    lam: float
    unitary_factor: np.ndarray
    modulus: np.ndarray
    transformed: np.ndarray
    similarity_defect: float


def aluthge(t: np.ndarray, lam: float) -> AluthgeDecomposition:
    """Weighted Aluthge transform |T|^lam U |T|^(1-lam) for lam in [0, 1].

    lam = 0 reproduces T itself, lam = 1 gives |T| U, lam = 1/2 is the
    classical transform.  Raises Singular for non-invertible input.
    """
    t = as_operator(t)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {lam}")
    u, p = polar_decompose(t)
    left = fractional_power(p, lam)
    right = fractional_power(p, 1.0 - lam)
    transformed = left @ u @ right

    w, v = np.linalg.eigh(p)
    w = np.clip(w, 1e-300, None)
    p_neg = (v * w ** (-lam)) @ v.conj().T
    p_pos = (v * w ** lam) @ v.conj().T
    defect = frobenius(p_neg @ transformed @ p_pos - t)
    return AluthgeDecomposition(
        lam=lam,
        unitary_factor=u,
        modulus=p,
        transformed=transformed,
        similarity_defect=defect,
    )


@dataclass(frozen=True)
class AluthgeIteration:
    """Iterated transforms with per-step diagnostics.

    sequence[0] is the input; normality_defects[j] = ||[X_j, X_j*]||_F and
    spectrum_drifts[j] is the matched eigenvalue distance between X_j and
    the input.  truncated_at marks the first iterate that failed the
    invertibility check (None when all k steps ran).
    """

    sequence: tuple
    normality_defects: tuple
    spectrum_drifts: tuple
    truncated_at: Optional[int]


def _normality_defect(m: np.ndarray) -> float:
    return frobenius(m @ m.conj().T - m.conj().T @ m)


def iterate_aluthge(t: np.ndarray, lam: float, k: int) -> AluthgeIteration:
    """k-fold iteration of the transform, with spectrum-drift tracking.

    Whether the sequence converges is an open question; the diagnostics
    are reported, not asserted.
    """
    t = as_operator(t)
    if k < 0:
        raise ValueError("iteration count must be >= 0")
    # validate invertibility of the input up front
    polar_decompose(t)
    base_eigs = eig_general(t)
    seq = [t]
    defects = [_normality_defect(t)]
    drifts = [0.0]
    truncated = None
    for j in range(1, k + 1):
        try:
            step = aluthge(seq[-1], lam)
        except Singular:
            truncated = j
            break
        seq.append(step.transformed)
        defects.append(_normality_defect(step.transformed))
        drifts.append(match_spectra(eig_general(step.transformed), base_eigs))
    return AluthgeIteration(
        sequence=tuple(seq),
        normality_defects=tuple(defects),
        spectrum_drifts=tuple(drifts),
        truncated_at=truncated,
    )


def match_spectra(s1, s2) -> float:
    """Minimal max-distance over bijections between two eigenvalue multisets.

    Exact bottleneck assignment: binary search over the pairwise distances,
    feasibility by bipartite matching.
    """
    s1 = np.asarray(s1, dtype=np.complex128).ravel()
    s2 = np.asarray(s2, dtype=np.complex128).ravel()
    if s1.size != s2.size:
        raise SizeMismatch(f"multiset sizes differ: {s1.size} vs {s2.size}")
    if s1.size == 0:
        return 0.0
    dist = np.abs(s1[:, None] - s2[None, :])
    levels = np.unique(dist)
    lo, hi = 0, len(levels) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching(dist <= levels[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(levels[lo])


def _perfect_matching(adj: np.ndarray) -> bool:
    match = maximum_bipartite_matching(csr_matrix(adj.astype(np.int8)), perm_type="column")
    return bool(np.all(match >= 0))
