"""Maximization of |tau(C U A U*)| over the unitary group.

The orbit functional is ascended as the squared modulus g(U) = |f(U)|^2
with f(U) = tau(C U A U*): the square is smooth at f = 0 and has the same
maximizers.  Moving along the curve t -> exp(tX) U with X skew-Hermitian,

    d/dt g = 2 Re( conj(f) * tau(X [UAU*, C]) ),

so the Riemannian gradient (for the real inner product Re Tr(X* Y) on
skew-Hermitian matrices) is the skew part of -conj(f) [UAU*, C], scaled
by 2/n.  Steps are retracted back to the group through the unitary polar
factor, step sizes chosen by Armijo backtracking, and the whole ascent is
multi-started from Haar samples plus deterministic starts.  Every value
the optimizer ever evaluates is checked against the von Neumann singular
value bound, and the returned value is achieved by the returned unitary,
hence a certified lower bound of the true supremum.

Brute-force and closed-form oracles (`grid_oracle_2x2`, `hermitian_oracle`)
cross-validate the ascent at small n.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    as_operator,
    as_unitary,
    check_same_dim,
    derive_seed,
    frobenius,
    haar_unitary,
    normalized_trace,
    singular_values,
)
from .errors import NotHermitian, NotSkew, WrongDimension

_ARMIJO_MAX_BACKTRACKS = 60
_STALL_LIMIT = 10
_STALL_REL_TOL = 1e-14


@dataclass(frozen=True)
class OptimizerConfig:
    """Budget and tolerances for one multi-start ascent."""

    starts: int = 16
    max_iters: int = 500
    grad_tol: float = 1e-9
    step_init: float = 0.1
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        for name in ("grad_tol", "step_init"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("armijo_c", "armijo_shrink"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in (0, 1)")

    def scaled(self, factor: int) -> "OptimizerConfig":
        """Same configuration with `factor` times as many random starts."""
        return OptimizerConfig(
            starts=self.starts * factor,
            max_iters=self.max_iters,
            grad_tol=self.grad_tol,
            step_init=self.step_init,
            armijo_c=self.armijo_c,
            armijo_shrink=self.armijo_shrink,
            seed=self.seed,
        )


@dataclass(frozen=True)
class RadiusResult:
    """Best found |tau(C U A U*)| with the achieving unitary.

    `value` equals max(per_start_values) and is achieved by `maximizer`,
    so it is a certified lower bound of the true supremum.  `phase` is
    arg tau(C U A U*) at the maximizer, in [0, 2pi).
    """

    value: float
    maximizer: np.ndarray
    phase: float
    per_start_values: list
    iterations_used: list
    converged_flags: list


def orbit_objective(c: np.ndarray, a: np.ndarray, u: np.ndarray) -> complex:
    """tau(C U A U*)."""
    c, a, u = as_operator(c), as_operator(a), as_operator(u)
    check_same_dim(c, a, u)
    return normalized_trace(c @ u @ a @ u.conj().T)


def directional_derivative(c, a, u, x) -> float:
    """d/dt |tau(C e^{tX} U A U* e^{-tX})|^2 at t = 0 for skew-Hermitian X."""
    c, a, u, x = as_operator(c), as_operator(a), as_operator(u), as_operator(x)
    check_same_dim(c, a, u, x)
    if frobenius(x + x.conj().T) > 1e-10:
        raise NotSkew("direction must be skew-Hermitian")
    m = u @ a @ u.conj().T
    f = normalized_trace(c @ m)
    return 2.0 * float(np.real(np.conj(f) * normalized_trace(x @ (m @ c - c @ m))))


def von_neumann_bound(c: np.ndarray, a: np.ndarray) -> float:
    """(1/n) sum_i s_i(C) s_i(A): rigorous upper bound for |tau(C U A U*)|."""
    n = check_same_dim(as_operator(c), as_operator(a))
    return float(np.dot(singular_values(c), singular_values(a))) / n


def _polar_unitary(w: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(w)
    return u @ vh


def riemannian_ascent(value_grad, u0: np.ndarray, cfg: OptimizerConfig):
    """Armijo-backtracking ascent on the unitary group with polar retraction.

    value_grad(U) -> (value, skew-Hermitian gradient).  Returns
    (U, value, iterations, converged); the value sequence is non-decreasing.
    """
    u = u0
    g, grad = value_grad(u)
    step = cfg.step_init
    stall = 0
    for it in range(cfg.max_iters):
        grad_norm = frobenius(grad)
        if grad_norm < cfg.grad_tol:
            return u, g, it, True
        s = step
        accepted = False
        for _ in range(_ARMIJO_MAX_BACKTRACKS):
            cand = _polar_unitary(u + s * (grad @ u))
            g_new, grad_new = value_grad(cand)
            if g_new >= g + cfg.armijo_c * s * grad_norm * grad_norm:
                accepted = True
                break
            s *= cfg.armijo_shrink
        if not accepted:
            # step length collapsed: no further ascent along this gradient
            return u, g, it, True
        improvement = g_new - g
        u, g, grad = cand, g_new, grad_new
        # nearly-flat stretches need step sizes far above step_init; the
        # backtracking line search keeps large trial steps safe
        step = min(s / cfg.armijo_shrink, 1e4 * cfg.step_init)
        if improvement < _STALL_REL_TOL * max(g, 1e-300):
            stall += 1
            if stall >= _STALL_LIMIT:
                return u, g, it + 1, True
        else:
            stall = 0
    return u, g, cfg.max_iters, False


def _diag_phase_start(n: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(n) / n))


def _multistart_orbit(c, a, cfg: OptimizerConfig, extra_starts=()):
    """Run the multi-start ascent; returns (values, finals, iters, flags)."""
    n = c.shape[0]
    bound = von_neumann_bound(c, a)
    cap = bound * (1.0 + 1e-12) + 1e-12

    def value_grad(u):
        m = u @ a @ u.conj().T
        f = np.trace(c @ m) / n
        fabs = abs(f)
        assert fabs <= cap, "von Neumann trace bound violated on trajectory"
        gmat = np.conj(f) * (m @ c - c @ m)
        return fabs * fabs, (gmat.conj().T - gmat) / n

    starts = [np.eye(n, dtype=np.complex128), _diag_phase_start(n)]
    starts.extend(as_unitary(u) for u in extra_starts)
    starts.extend(haar_unitary(n, derive_seed(cfg.seed, k)) for k in range(cfg.starts))

    per_start, iters, flags, finals = [], [], [], []
    for u0 in starts:
        u, g, used, ok = riemannian_ascent(value_grad, u0, cfg)
        val = abs(np.trace(c @ u @ a @ u.conj().T)) / n
        per_start.append(val)
        iters.append(used)
        flags.append(ok)
        finals.append(u)
    return per_start, finals, iters, flags


def maximize_modulus(
    c: np.ndarray,
    a: np.ndarray,
    cfg: OptimizerConfig | None = None,
    extra_starts=(),
) -> RadiusResult:
    """Multi-start Riemannian ascent on |tau(C U A U*)|^2.

    Start list: identity, a diagonal-phase unitary, any `extra_starts`
    (e.g. warm starts), then cfg.starts Haar samples with per-start seeds
    derived from cfg.seed.  Per-start seeds depend only on the start index,
    so the best value is monotone non-decreasing in cfg.starts.  The first
    start attaining the maximum wins ties.
    """
    c, a = as_operator(c), as_operator(a)
    check_same_dim(c, a)
    if cfg is None:
        cfg = OptimizerConfig()
    per_start, finals, iters, flags = _multistart_orbit(c, a, cfg, extra_starts)
    n = c.shape[0]
    best_val = max(per_start)
    # ties within 1e-12 go to the lowest start index
    best_u = next(u for u, v in zip(finals, per_start) if v >= best_val - 1e-12)
    f_best = np.trace(c @ best_u @ a @ best_u.conj().T) / n
    return RadiusResult(
        value=best_val,
        maximizer=best_u,
        phase=float(np.angle(f_best)) % (2.0 * np.pi),
        per_start_values=per_start,
        iterations_used=iters,
        converged_flags=flags,
    )


@lru_cache(maxsize=8)
def _su2_grid(k: int) -> np.ndarray:
    """K^3 grid over SU(2): a = cos(t) e^{i p1}, b = sin(t) e^{i p2}."""
    t = np.linspace(0.0, np.pi / 2.0, k)
    p = np.linspace(0.0, 2.0 * np.pi, k, endpoint=False)
    tt, p1, p2 = np.meshgrid(t, p, p, indexing="ij")
    av = (np.cos(tt) * np.exp(1j * p1)).ravel()
    bv = (np.sin(tt) * np.exp(1j * p2)).ravel()
    u = np.empty((av.size, 2, 2), dtype=np.complex128)
    u[:, 0, 0] = av
    u[:, 0, 1] = bv
    u[:, 1, 0] = -bv.conj()
    u[:, 1, 1] = av.conj()
    return u


def grid_oracle_2x2(c: np.ndarray, a: np.ndarray, k: int = 60) -> float:
    """Brute-force max of |tau(C U A U*)| over a K^3 grid on SU(2).

    The global phase of U cancels in U A U*, so scanning SU(2) covers the
    whole of U(2).  Approaches the true value from below as K grows.
    """
    c, a = as_operator(c), as_operator(a)
    if check_same_dim(c, a) != 2:
        raise WrongDimension("grid oracle is only defined for n = 2")
    if k < 8:
        raise ValueError("grid resolution must be >= 8")
    u = _su2_grid(k)
    conj = u @ a @ u.conj().transpose(0, 2, 1)
    vals = np.abs(np.einsum("ij,mji->m", c, conj)) / 2.0
    return float(vals.max())


def hermitian_oracle(c: np.ndarray, a: np.ndarray) -> float:
    """Closed-form max of |tau(C U A U*)| for Hermitian C and A.

    tau(C U A U*) is real here, and its range over the unitary group is the
    interval between the anti-aligned and aligned eigenvalue pairings, so
    the modulus maximum is max of the aligned sum and |anti-aligned sum|,
    both divided by n.
    """
    c, a = as_operator(c), as_operator(a)
    n = check_same_dim(c, a)
    for name, m in (("C", c), ("A", a)):
        if frobenius(m - m.conj().T) > 1e-8:
            raise NotHermitian(f"{name} is not Hermitian within 1e-8")
    wc = np.sort(np.linalg.eigvalsh((c + c.conj().T) / 2))[::-1]
    wa = np.sort(np.linalg.eigvalsh((a + a.conj().T) / 2))[::-1]
    aligned = float(np.dot(wc, wa)) / n
    anti = float(np.dot(wc, wa[::-1])) / n
    return max(aligned, abs(anti))


def lmo_orbit(
    r: np.ndarray,
    b: np.ndarray,
    cfg: OptimizerConfig | None = None,
    extra_starts=(),
):
    """Maximize Re Tr(R* e^{i theta} U B U*) jointly in theta and U.

    The linear functional over the phase circle reduces to |Tr(R* U B U*)|,
    i.e. n times the orbit-modulus maximization for the pair (R*, B);
    theta is then the phase that rotates the trace onto the positive axis.
    Returns (theta, U, value) with value in UNNORMALIZED trace units.
    """
    r, b = as_operator(r), as_operator(b)
    n = check_same_dim(r, b)
    res = maximize_modulus(r.conj().T, b, cfg, extra_starts=extra_starts)
    u = res.maximizer
    t = complex(np.trace(r.conj().T @ u @ b @ u.conj().T))
    theta = (-float(np.angle(t))) % (2.0 * np.pi)
    return theta, u, n * res.value
