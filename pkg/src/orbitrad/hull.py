"""Membership in the closed absolutely convex hull of a unitary orbit.

Gamma(B) is the closure of { sum_i z_i U_i B U_i* : sum |z_i| <= 1 }; on
matrices the weak and norm closures of this convex set coincide, so the
decision is made in Frobenius norm.  Frank-Wolfe minimizes
(1/2)||A - X||_F^2 over Gamma.  The extreme points are e^{i theta} U B U*
(plus the zero element), so each linear subproblem is an orbit-radius
maximization; the line search is exact (quadratic objective, step clipped
to [0, 1]).

Plain Frank-Wolfe zig-zags at rate 1/k when the target sits on a face of
the hull, which is the generic situation here, so after every atom
addition the coefficients of the collected atoms are re-optimized over
the complex l1 ball (accelerated projected gradient on the atom Gram
matrix).  The corrected combination still lives in Gamma and is only
accepted when it improves, so the distance stays non-increasing and the
atom list remains an explicit membership certificate.

Verdicts are sound under the heuristic linear oracle: the final distance
is always a valid upper bound on the true hull distance, so Member stands
on its own, and Separated relies only on the rigorous margin

    |tau(C A)|  -  (1/n) sum_i s_i(C) s_i(B)  >  0,

a lower bound of w_C(A) minus an upper bound of w_C(B).  Anything else is
Undecided.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .core import (
    as_operator,
    as_unitary,
    check_same_dim,
    derive_seed,
    frobenius,
    ginibre,
    normalized_trace,
)
from .optimize import (
    OptimizerConfig,
    _multistart_orbit,
    _polar_unitary,
    lmo_orbit,
    maximize_modulus,
    von_neumann_bound,
)


class Verdict(str, Enum):
    MEMBER = "Member"
    SEPARATED = "Separated"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class HullAtom:
    """One term z * U B U* of a hull combination."""

    z: complex
    u: np.ndarray

    def __post_init__(self):
        if abs(self.z) > 1.0 + 1e-12:
            raise ValueError(f"|z| = {abs(self.z)} exceeds the coefficient budget")
        as_unitary(self.u)


@dataclass(frozen=True)
class FwBudget:
    max_fw_iters: int = 300
    member_tol: float = 1e-2
    lmo_cfg: OptimizerConfig = field(
        default_factory=lambda: OptimizerConfig(starts=4, max_iters=150)
    )

    def __post_init__(self):
        if self.max_fw_iters < 1:
            raise ValueError("max_fw_iters must be >= 1")
        if self.member_tol <= 0:
            raise ValueError("member_tol must be > 0")


@dataclass(frozen=True)
class MembershipOutcome:
    verdict: Verdict
    atoms: tuple
    certificate: Optional[np.ndarray]
    separation_margin: float
    final_distance: float
    fw_gap: float
    iterations: int


def hull_combine(atoms, b: np.ndarray) -> np.ndarray:
    """sum_i z_i U_i B U_i* for a list of HullAtoms."""
    b = as_operator(b)
    out = np.zeros_like(b)
    for atom in atoms:
        out = out + atom.z * (atom.u @ b @ atom.u.conj().T)
    return out


def separation_margin(c: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Rigorous margin |tau(C A)| - (1/n) sum s_i(C) s_i(B); positive means
    A is certified outside Gamma(B)."""
    c, a, b = as_operator(c), as_operator(a), as_operator(b)
    check_same_dim(c, a, b)
    return abs(normalized_trace(c @ a)) - von_neumann_bound(c, b)


def _project_l1(z: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Project onto the complex l1 ball: phases kept, moduli projected."""
    mod = np.abs(z)
    if mod.sum() <= radius:
        return z
    u = np.sort(mod)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, len(u) + 1)
    k = ks[u - (css - radius) / ks > 0][-1]
    theta = (css[k - 1] - radius) / k
    newmod = np.maximum(mod - theta, 0.0)
    safe = np.where(mod > 0, mod, 1.0)
    return z * (newmod / safe)


def _coeff_objective(z: np.ndarray, gram: np.ndarray, c: np.ndarray) -> float:
    # (1/2)||A - sum z_i M_i||^2 up to the constant (1/2)||A||^2
    return float(0.5 * np.vdot(z, gram @ z).real - np.vdot(z, c).real)


def _lasso_cd(z: np.ndarray, gram: np.ndarray, c: np.ndarray, mu: float, sweeps: int) -> np.ndarray:
    """Coordinate descent for min (1/2) z* G z - Re(z* c) + mu * sum |z_i|.

    Exact per-coordinate minimization with a complex soft threshold; each
    sweep decreases the objective, independent of the conditioning of G.
    """
    z = z.copy()
    diag = gram.diagonal().real
    cols = np.ascontiguousarray(gram.T)
    gz = gram @ z
    for _ in range(sweeps):
        shift = 0.0
        for i in range(len(z)):
            if diag[i] <= 1e-30:
                continue
            rho = c[i] - (gz[i] - diag[i] * z[i])
            mag = abs(rho)
            zi_new = 0.0 if mag <= mu else (rho / mag) * (mag - mu) / diag[i]
            dz = zi_new - z[i]
            if dz != 0.0:
                gz += cols[i] * dz
                z[i] = zi_new
                shift = max(shift, abs(dz))
        if shift < 1e-14:
            break
    return z


def _correct_coeffs(z: np.ndarray, gram: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Best feasible coefficients for min (1/2)||A - sum z_i M_i||^2 over
    sum |z_i| <= 1.

    Solves the unconstrained problem first; when its l1 norm exceeds the
    budget, bisects the lasso penalty until the path crosses the budget
    boundary, which also sparsifies the active atom set.  Always returns a
    feasible point at least as good as the input.
    """
    best = _project_l1(z)
    best_f = _coeff_objective(best, gram, c)

    free = _lasso_cd(z, gram, c, 0.0, 60)
    if np.abs(free).sum() <= 1.0:
        f = _coeff_objective(free, gram, c)
        return free if f < best_f else best

    mu_lo, mu_hi = 0.0, max(float(np.abs(c).max()), 1e-30)
    cur = free
    for _ in range(40):
        mu = 0.5 * (mu_lo + mu_hi)
        cur = _lasso_cd(cur, gram, c, mu, 15)
        if np.abs(cur).sum() > 1.0:
            mu_lo = mu
        else:
            mu_hi = mu
            f = _coeff_objective(cur, gram, c)
            if f < best_f:
                best, best_f = cur, f
    polish = _project_l1(_lasso_cd(best, gram, c, mu_hi, 60))
    if _coeff_objective(polish, gram, c) < best_f:
        best = polish
    return best


def _refine_atoms(a, b, z, units, max_steps: int = 25):
    """Descend ||A - sum z_i U_i B U_i*||^2 over the atom unitaries.

    Along the curve exp(tX) U_i the derivative is Re Tr(X G_i) with
    G_i = -z_i [M_i, R*]; the joint steepest-descent step uses the skew
    parts of all G_i with one shared Armijo step size.  Atoms with zero
    coefficient have zero gradient and stay put.  Atoms stay exactly
    unitary through the polar retraction, so the combination stays in
    Gamma for the unchanged coefficients.
    """
    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    units = list(units)
    mats = [u @ b @ u.conj().T for u in units]
    active = [i for i, zi in enumerate(z) if abs(zi) > 1e-15]

    def combo(ms):
        out = np.zeros_like(a)
        for zi, m in zip(z, ms):
            out = out + zi * m
        return out

    f = 0.5 * frobenius(a - combo(mats)) ** 2
    step = 1.0
    for _ in range(max_steps):
        r = a - combo(mats)
        rc = r.conj().T
        dirs = {}
        total = 0.0
        for i in active:
            g = -z[i] * (mats[i] @ rc - rc @ mats[i])
            d = (g - g.conj().T) / 2.0
            dirs[i] = d
            total += float(np.vdot(d, d).real)
        if total < 1e-28:
            break
        s = step
        accepted = False
        for _ in range(30):
            cand_units = list(units)
            cand_mats = list(mats)
            for i in active:
                cand_units[i] = _polar_unitary(eye + s * dirs[i]) @ units[i]
                cand_mats[i] = cand_units[i] @ b @ cand_units[i].conj().T
            f_new = 0.5 * frobenius(a - combo(cand_mats)) ** 2
            if f_new <= f - 1e-4 * s * total:
                accepted = True
                break
            s *= 0.5
        if not accepted:
            break
        if f - f_new < 1e-15 * (1.0 + f):
            units, mats, f = cand_units, cand_mats, f_new
            break
        units, mats, f = cand_units, cand_mats, f_new
        step = min(2.0 * s, 1e3)
    return units, mats


def _lmo_rich(r, b, cfg: OptimizerConfig, extra_starts):
    """lmo_orbit plus the distinct near-optimal unitaries of its multistart.

    The vertex returned is identical to lmo_orbit's under the same config
    and seeds; the runner-up ascent optima enrich the correction dictionary
    (any unitary yields a valid hull atom, so this is free soundness-wise).
    """
    n = r.shape[0]
    per_start, finals, _, _ = _multistart_orbit(r.conj().T, b, cfg, extra_starts)
    best_val = max(per_start)
    best_u = next(u for u, v in zip(finals, per_start) if v >= best_val - 1e-12)
    t = complex(np.trace(r.conj().T @ best_u @ b @ best_u.conj().T))
    theta = (-float(np.angle(t))) % (2.0 * np.pi)
    harvest = []
    if best_val > 0:
        seen = [best_u @ b @ best_u.conj().T]
        order = np.argsort(-np.asarray(per_start))
        for idx in order:
            if per_start[idx] < 0.5 * best_val or len(harvest) >= 3:
                break
            m = finals[idx] @ b @ finals[idx].conj().T
            if all(frobenius(m - m0) > 1e-8 for m0 in seen):
                seen.append(m)
                harvest.append(finals[idx])
    return theta, best_u, n * best_val, harvest


def fw_project(a: np.ndarray, b: np.ndarray, budget: Optional[FwBudget] = None) -> MembershipOutcome:
    """Frank-Wolfe projection of A onto Gamma(B) with membership verdict.

    Iterates are combinations of orbit atoms and the zero element with
    coefficient budget sum |z_i| <= 1, preserved by the line search and by
    the l1-ball correction alike.  Distinct runner-up optima of the linear
    oracle join the correction dictionary with zero coefficient, so the
    corrector can activate vertices the plain line search would take many
    zig-zag steps to reach.  The final combination is rebuilt from the atom
    list, which makes the reported distance reproducible from the returned
    atoms.
    """
    a, b = as_operator(a), as_operator(b)
    check_same_dim(a, b)
    if budget is None:
        budget = FwBudget()

    x = np.zeros_like(a)
    units: list[np.ndarray] = []
    mats: list[np.ndarray] = []      # cached U B U*
    z = np.zeros(0, dtype=np.complex128)
    warm: Optional[np.ndarray] = None
    gap = float("inf")
    dist_prev = float("inf")
    iterations = 0
    stalls = 0

    def combination(zs, ms):
        out = np.zeros_like(a)
        for zi, m in zip(zs, ms):
            out = out + zi * m
        return out

    for k in range(budget.max_fw_iters):
        r = a - x
        dist = frobenius(r)
        assert dist <= dist_prev + 1e-12, "FW distance increased"
        dist_prev = dist
        if dist <= budget.member_tol:
            break
        # warm-start the oracle with the previous vertex and the heaviest
        # active atoms: optimal vertices concentrate near the active face
        extras = [] if warm is None else [warm]
        if len(z) > 0:
            order = np.argsort(-np.abs(z))[:3]
            extras.extend(units[i] for i in order)
        cfg_k = replace(budget.lmo_cfg, seed=derive_seed(budget.lmo_cfg.seed, k))
        theta, u, val, harvest = _lmo_rich(r, b, cfg_k, extras)
        gap = val - float(np.vdot(r, x).real)
        if gap <= 0.02 * dist * dist:
            # a feasible target guarantees a vertex with gap >= dist^2, so
            # an apparently vanishing gap gets one escalated retry
            cfg_esc = replace(cfg_k.scaled(4), max_iters=4 * cfg_k.max_iters)
            theta2, u2, val2, harvest2 = _lmo_rich(r, b, cfg_esc, extras + [u])
            if val2 > val:
                theta, u, val, harvest = theta2, u2, val2, harvest2
                gap = val - float(np.vdot(r, x).real)
        warm = u
        iterations = k + 1
        took_step = False
        if gap > 1e-15 * (1.0 + dist * dist):
            # the zero element is an admissible vertex; it wins only when
            # the orbit oracle finds no positively-aligned atom
            if val > 0.0:
                new_mat = u @ b @ u.conj().T
                vertex = np.exp(1j * theta) * new_mat
                coeff = np.exp(1j * theta)
            else:
                new_mat = None
                vertex = np.zeros_like(a)
                coeff = None
            d = vertex - x
            step_gap = float(np.vdot(r, d).real)
            dd = float(np.vdot(d, d).real)
            if step_gap > 0.0 and dd > 0.0:
                gamma = min(1.0, max(0.0, step_gap / dd))
                z = (1.0 - gamma) * z
                if coeff is not None:
                    units.append(u)
                    mats.append(new_mat)
                    z = np.append(z, gamma * coeff)
                x = combination(z, mats)
                took_step = True
        for extra_u in harvest:
            units.append(extra_u)
            mats.append(extra_u @ b @ extra_u.conj().T)
            z = np.append(z, 0.0)
        improvement = 0.0
        if len(z) > 0:
            # re-optimize the atom coefficients over the l1 ball, locally
            # refine the atom unitaries against the residual, re-optimize
            # once more; accept only when the result is at least as close
            gram = np.array(
                [[np.vdot(mi, mj) for mj in mats] for mi in mats],
                dtype=np.complex128,
            )
            cvec = np.array([np.vdot(m, a) for m in mats], dtype=np.complex128)
            z_corr = _correct_coeffs(z, gram, cvec)
            ref_units, ref_mats = _refine_atoms(a, b, z_corr, units)
            ref_gram = np.array(
                [[np.vdot(mi, mj) for mj in ref_mats] for mi in ref_mats],
                dtype=np.complex128,
            )
            ref_cvec = np.array([np.vdot(m, a) for m in ref_mats], dtype=np.complex128)
            z_ref = _correct_coeffs(z_corr, ref_gram, ref_cvec)
            x_ref = combination(z_ref, ref_mats)
            if frobenius(a - x_ref) <= frobenius(a - x):
                improvement = frobenius(a - x) - frobenius(a - x_ref)
                z, units, mats, x = z_ref, ref_units, ref_mats, x_ref
        if not took_step and improvement <= 1e-10 * (1.0 + dist):
            stalls += 1
            if stalls >= 3:
                break
        else:
            stalls = 0
        # keep every weighted atom; retain recent zero-weight dictionary
        # entries as corrector candidates, bounded in number
        live = np.abs(z) > 1e-15
        idle = [i for i in range(len(z)) if not live[i]]
        keep_idle = set(idle[-64:])
        keep = [i for i in range(len(z)) if live[i] or i in keep_idle]
        z = z[keep]
        units = [units[i] for i in keep]
        mats = [mats[i] for i in keep]
        assert float(np.abs(z).sum()) <= 1.0 + 1e-12, "coefficient budget exceeded"

    live = np.abs(z) > 1e-15
    atom_objs = tuple(HullAtom(zi, uu) for zi, uu, lv in zip(z, units, live) if lv)
    x_final = hull_combine(atom_objs, b)
    residual = a - x_final
    final_distance = frobenius(residual)
    cert = residual.conj().T
    margin = separation_margin(cert, a, b)

    if final_distance <= budget.member_tol:
        return MembershipOutcome(
            Verdict.MEMBER, atom_objs, None, margin, final_distance, gap, iterations
        )
    if margin > 0.0:
        return MembershipOutcome(
            Verdict.SEPARATED, atom_objs, cert, margin, final_distance, gap, iterations
        )
    return MembershipOutcome(
        Verdict.UNDECIDED, atom_objs, None, margin, final_distance, gap, iterations
    )


@dataclass(frozen=True)
class SeparationResult:
    rigorous_margin: float
    heuristic_gap: float


def separation_check(
    a: np.ndarray, b: np.ndarray, c: np.ndarray, cfg: Optional[OptimizerConfig] = None
) -> SeparationResult:
    """Certificate quality of C against the pair (A, B).

    rigorous_margin > 0 proves w_C(A) > w_C(B), hence A outside Gamma(B);
    heuristic_gap compares two ascent lower bounds and is informative only.
    """
    a, b, c = as_operator(a), as_operator(b), as_operator(c)
    check_same_dim(a, b, c)
    rig = separation_margin(c, a, b)
    heur = maximize_modulus(c, a, cfg).value - maximize_modulus(c, b, cfg).value
    return SeparationResult(rigorous_margin=rig, heuristic_gap=heur)


@dataclass(frozen=True)
class DominanceProbe:
    num_c: int
    violations: int
    max_rigorous_margin: float
    rows: tuple


def radius_dominance_probe(
    a: np.ndarray,
    b: np.ndarray,
    num_c: int,
    cfg: Optional[OptimizerConfig] = None,
) -> DominanceProbe:
    """Sample admissible functionals C and compare w_C(A) against w_C(B).

    Samples Ginibre matrices, shifted by I/n when the trace is numerically
    zero so every probe has nonzero trace.  A positive rigorous margin on
    any probe certifies non-membership; zero violations corroborate (but do
    not prove) a Member verdict.
    """
    a, b = as_operator(a), as_operator(b)
    n = check_same_dim(a, b)
    if cfg is None:
        cfg = OptimizerConfig(starts=4, max_iters=150)
    rows = []
    violations = 0
    max_margin = -float("inf")
    for i in range(num_c):
        rng = np.random.default_rng(derive_seed(cfg.seed, 947, i))
        c = ginibre(rng, n)
        if abs(normalized_trace(c)) <= 1e-10:
            c = c + np.eye(n) / n
        res = separation_check(a, b, c, replace(cfg, seed=derive_seed(cfg.seed, 948, i)))
        rows.append(res)
        max_margin = max(max_margin, res.rigorous_margin)
        if res.rigorous_margin > 0.0:
            violations += 1
    return DominanceProbe(
        num_c=num_c,
        violations=violations,
        max_rigorous_margin=max_margin,
        rows=tuple(rows),
    )
