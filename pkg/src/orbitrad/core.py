"""Dense complex matrix primitives: the model of (M_n(C), tau).

Everything downstream works on plain complex128 numpy arrays.  The
validators below are the construction checks for the wrapped types
(operator / unitary / positive); they return the validated array so call
sites can stay compositional.  The trace used throughout is the
normalized trace tau = (1/n) Tr, the unique tracial state on M_n(C).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NotHermitian,
    Singular,
    ZeroPowerOfSingular,
)

MAX_DIM = 16

UNITARY_TOL = 1e-10
POSITIVE_TOL = 1e-10
HERMITIAN_TOL = 1e-8
SINGULAR_REL_TOL = 1e-10


# ---------------------------------------------------------------------------
# validated constructors
# ---------------------------------------------------------------------------

def as_operator(entries) -> np.ndarray:
    """Validate a square complex matrix with finite entries."""
    m = np.asarray(entries, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return m


def as_unitary(entries, tol: float = UNITARY_TOL) -> np.ndarray:
    """Validate unitarity: ||U U* - I||_F <= tol."""
    u = as_operator(entries)
    defect = frobenius(u @ u.conj().T - np.eye(u.shape[0]))
    if defect > tol:
        raise ValueError(f"not unitary: ||UU*-I||_F = {defect:.3e} > {tol:.1e}")
    return u


def as_positive(entries, tol: float = POSITIVE_TOL) -> np.ndarray:
    """Validate a positive semidefinite matrix (Hermitian, eigenvalues >= -tol)."""
    p = as_operator(entries)
    if frobenius(p - p.conj().T) > tol:
        raise ValueError("not positive: Hermitian defect exceeds tolerance")
    w = np.linalg.eigvalsh((p + p.conj().T) / 2)
    if w.min() < -tol:
        raise ValueError(f"not positive: smallest eigenvalue {w.min():.3e}")
    return p


def check_same_dim(*mats) -> int:
    n = mats[0].shape[0]
    for m in mats[1:]:
        if m.shape != (n, n):
            raise DimensionMismatch(
                f"dimension mismatch: {m.shape} vs ({n}, {n})"
            )
    return n


# ---------------------------------------------------------------------------
# trace and norms
# ---------------------------------------------------------------------------

def normalized_trace(m: np.ndarray) -> complex:
    """tau(M) = (1/n) sum of diagonal entries."""
    m = np.asarray(m)
    return complex(np.trace(m)) / m.shape[0]


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, "fro"))


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------

def eig_hermitian(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and unitary eigenvectors of a Hermitian matrix.

    Returns (w, V) with H = V diag(w) V*.  Raises NotHermitian when the
    Hermitian defect of the input exceeds 1e-8.
    """
    h = as_operator(h)
    defect = frobenius(h - h.conj().T)
    if defect > HERMITIAN_TOL:
        raise NotHermitian(f"Hermitian defect {defect:.3e} exceeds {HERMITIAN_TOL:.1e}")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def eig_general(m: np.ndarray) -> np.ndarray:
    """Eigenvalue multiset of a general square matrix (n <= 16)."""
    m = as_operator(m)
    if m.shape[0] > MAX_DIM:
        raise DimensionMismatch(f"eig_general supports n <= {MAX_DIM}")
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK safeguard
        raise NoConvergence(str(exc)) from exc


def singular_values(m: np.ndarray) -> np.ndarray:
    """Singular values in descending order."""
    return np.linalg.svd(np.asarray(m, dtype=np.complex128), compute_uv=False)


def polar_decompose(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition T = U |T| of an invertible matrix.

    U is the exactly-unitary polar factor, |T| = (T*T)^{1/2}.  Raises
    Singular when the relative smallest singular value is below 1e-10;
    near-singular inputs are rejected rather than regularized.
    """
    t = as_operator(t)
    w, s, vh = np.linalg.svd(t)
    if s[-1] < SINGULAR_REL_TOL * s[0]:
        raise Singular(
            f"matrix is numerically singular: s_min/s_max = {s[-1] / s[0]:.3e}"
        )
    u = w @ vh
    p = vh.conj().T @ (s[:, None] * vh)
    return u, (p + p.conj().T) / 2


def fractional_power(p: np.ndarray, s: float) -> np.ndarray:
    """P^s for positive semidefinite P and s in [0, 1].

    Computed in the eigenbasis of P.  The endpoints are exact:
    s=1 returns P itself, s=0 returns the identity (and requires P
    invertible).
    """
    p = as_positive(p)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"power must lie in [0, 1], got {s}")
    if s == 1.0:
        return p.copy()
    w, v = np.linalg.eigh((p + p.conj().T) / 2)
    if s == 0.0:
        if w.min() < 1e-12:
            raise ZeroPowerOfSingular(
                f"zeroth power of a singular positive matrix (min eig {w.min():.3e})"
            )
        return np.eye(p.shape[0], dtype=np.complex128)
    ws = np.clip(w, 0.0, None) ** s
    out = (v * ws) @ v.conj().T
    return (out + out.conj().T) / 2


# ---------------------------------------------------------------------------
# randomness
# ---------------------------------------------------------------------------

def derive_seed(root: int, *indices: int) -> int:
    """Deterministic child seed from a root seed and an index path."""
    ss = np.random.SeedSequence([int(root)] + [int(i) for i in indices])
    return int(ss.generate_state(1, np.uint64)[0])


def ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    """n x n matrix of i.i.d. standard complex normals."""
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def haar_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed unitary: Ginibre -> QR -> R-diagonal phase fix.

    Deterministic per seed: the same seed always yields the same matrix.
    """
    if n < 1:
        raise DimensionMismatch("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(ginibre(rng, n))
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    phase = d / np.abs(d)
    return q * phase.conj()


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Complex polynomial, coefficients in ascending degree; x^0 acts as I.

    Trailing zero coefficients are trimmed at construction so the reported
    degree has a nonzero leading coefficient (unless the polynomial is the
    constant zero).
    """

    coeffs: tuple = field()

    def __init__(self, coeffs):
        cs = tuple(complex(c) for c in coeffs)
        if not cs:
            raise ValueError("coefficient list must be non-empty")
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def poly_apply(f: Polynomial, m: np.ndarray) -> np.ndarray:
    """Horner evaluation of f(M), mapping the constant term to c0 * I."""
    m = as_operator(m)
    eye = np.eye(m.shape[0], dtype=np.complex128)
    acc = f.coeffs[-1] * eye
    for c in f.coeffs[-2::-1]:
        acc = acc @ m + c * eye
    return acc
