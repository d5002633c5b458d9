"""Small dense semidefinite/linear programs with primal-dual certificates.

A ConicProgram is a linear objective over named PSD matrix blocks and
nonnegative/free scalar blocks, subject to linear equality constraints.
Inequalities and linear matrix inequalities are entered through builder
sugar that introduces slack blocks.  All data is real; complex problems
are realified by the caller before entry.

Solving is delegated to Clarabel (an interior-point conic solver) through
cvxpy; certificates are re-verified here from scratch with an independent
arithmetic path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

DEFAULT_GAP_TOL = 1e-8
DEFAULT_FEAS_TOL = 1e-8
DEFAULT_ITER_CAP = 200

MAX_TOTAL_DIM = 512


class ProgramError(ValueError):
    pass


@dataclass
class Constraint:
    """Linear equality  sum_B <C_B, X_B> + sum_s c_s x_s == rhs."""

    terms: dict[str, np.ndarray | float]
    rhs: float


@dataclass
class ConicProgram:
    sense: str = "min"
    psd: dict[str, int] = field(default_factory=dict)
    scalars: dict[str, str] = field(default_factory=dict)  # name -> nonneg|free
    objective: dict[str, np.ndarray | float] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    _slack_count: int = 0

    # ---- builders ----

    def add_psd(self, name: str, dim: int) -> str:
        if name in self.psd or name in self.scalars:
            raise ProgramError(f"duplicate block {name!r}")
        self.psd[name] = int(dim)
        return name

    def add_scalar(self, name: str, nonneg: bool = False) -> str:
        if name in self.psd or name in self.scalars:
            raise ProgramError(f"duplicate block {name!r}")
        self.scalars[name] = "nonneg" if nonneg else "free"
        return name

    def set_objective(self, sense: str, terms: dict[str, np.ndarray | float]) -> None:
        if sense not in ("min", "max"):
            raise ProgramError(f"bad sense {sense!r}")
        self.sense = sense
        self.objective = dict(terms)

    def add_eq(self, terms: dict[str, np.ndarray | float], rhs: float) -> None:
        self.constraints.append(Constraint(dict(terms), float(rhs)))

    def add_ineq(self, terms: dict[str, np.ndarray | float], rhs: float, op: str) -> None:
        """terms <= rhs or terms >= rhs, via a nonnegative slack scalar."""
        slack = self.add_scalar(f"_slack{self._slack_count}", nonneg=True)
        self._slack_count += 1
        t = dict(terms)
        t[slack] = 1.0 if op == "<=" else -1.0 if op == ">=" else None
        if t[slack] is None:
            raise ProgramError(f"bad inequality op {op!r}")
        self.add_eq(t, rhs)

    def entry_coeff(self, dim: int, i: int, j: int, value: float = 1.0) -> np.ndarray:
        """Symmetric coefficient matrix C with <C, X> = value * X[i, j]."""
        c = np.zeros((dim, dim))
        if i == j:
            c[i, i] = value
        else:
            c[i, j] = c[j, i] = value / 2.0
        return c

    def add_lmi(
        self,
        name: str,
        terms: list[tuple[float, np.ndarray | None, str]],
        const: np.ndarray | None = None,
        dim: int | None = None,
    ) -> str:
        """Add the constraint  const + sum_j coef_j * (mask_j o X_block_j) >= 0 (PSD).

        Each term is (coef, mask, block_name) with mask None meaning all-ones.
        For a PSD block the term reads coef * mask[i,j] * X[i,j]; for a scalar
        block it reads coef * mask[i,j] * x.  Encoded as a slack PSD block S
        with entrywise equalities.
        """
        if dim is None:
            if const is not None:
                dim = const.shape[0]
            else:
                dim = self.psd[terms[0][2]]
        s = self.add_psd(name, dim)
        for i in range(dim):
            for j in range(i, dim):
                t: dict[str, np.ndarray | float] = {s: self.entry_coeff(dim, i, j)}
                rhs = const[i, j] if const is not None else 0.0
                for coef, mask, blk in terms:
                    m = coef * (mask[i, j] if mask is not None else 1.0)
                    if m == 0.0:
                        continue
                    prev = t.get(blk)
                    if blk in self.psd:
                        add = -self.entry_coeff(self.psd[blk], i, j, m)
                        t[blk] = add if prev is None else prev + add
                    else:
                        t[blk] = -m if prev is None else prev - m
                self.add_eq(t, float(rhs))
        return s

    # ---- introspection ----

    def total_dim(self) -> int:
        return sum(self.psd.values()) + len(self.scalars)

    def _check(self) -> None:
        if self.total_dim() > MAX_TOTAL_DIM:
            raise ProgramError(f"total block dimension {self.total_dim()} exceeds {MAX_TOTAL_DIM}")
        names = set(self.psd) | set(self.scalars)
        for where, terms in [("objective", self.objective)] + [
            (f"constraint {i}", c.terms) for i, c in enumerate(self.constraints)
        ]:
            for n, coef in terms.items():
                if n not in names:
                    raise ProgramError(f"{where} references unknown block {n!r}")
                if n in self.psd:
                    coef = np.asarray(coef)
                    if coef.shape != (self.psd[n], self.psd[n]):
                        raise ProgramError(f"{where}: bad coefficient shape for {n!r}")


@dataclass
class ConicSolution:
    status: str  # optimal | infeasible | unbounded | stalled
    primal_value: float
    dual_value: float
    gap: float
    blocks: dict[str, np.ndarray | float]
    eq_duals: np.ndarray
    max_eq_violation: float
    min_block_eig: float
    iterations: int
    certificate: np.ndarray | None = None  # dual improving ray when infeasible

    def block(self, name: str):
        return self.blocks[name]


def _frob(c, x) -> float:
    return float(np.sum(np.asarray(c) * np.asarray(x)))


def _build_cvxpy(p: ConicProgram, param_scalars=None, params=None):
    vars_: dict[str, cp.Variable] = {}
    for name, dim in p.psd.items():
        vars_[name] = cp.Variable((dim, dim), PSD=True, name=name)
    for name, kind in p.scalars.items():
        vars_[name] = cp.Variable(nonneg=(kind == "nonneg"), name=name)

    def expr(terms):
        e = 0
        for n, coef in terms.items():
            if n in p.psd:
                e = e + cp.sum(cp.multiply(np.asarray(coef), vars_[n]))
            else:
                e = e + float(coef) * vars_[n]
        return e

    obj_expr = expr(p.objective)
    if param_scalars is not None:
        obj_expr = obj_expr + cp.sum(
            cp.hstack([params[i] * vars_[n] for i, n in enumerate(param_scalars)])
        )
    objective = cp.Minimize(obj_expr) if p.sense == "min" else cp.Maximize(obj_expr)
    cons = [expr(c.terms) == c.rhs for c in p.constraints]
    return cp.Problem(objective, cons), vars_, cons


def _build_cvxpy_with_param(p: ConicProgram, param_scalars, params):
    return _build_cvxpy(p, param_scalars=param_scalars, params=params)


def solve(
    p: ConicProgram,
    gap_tol: float = DEFAULT_GAP_TOL,
    feas_tol: float = DEFAULT_FEAS_TOL,
    iter_cap: int = DEFAULT_ITER_CAP,
) -> ConicSolution:
    p._check()
    problem, vars_, cons = _build_cvxpy(p)
    try:
        problem.solve(
            solver=cp.CLARABEL,
            max_iter=int(iter_cap),
            tol_gap_abs=gap_tol * 1e-1,
            tol_gap_rel=gap_tol * 1e-1,
            tol_feas=feas_tol * 1e-1,
        )
    except cp.error.SolverError:
        return ConicSolution(
            status="stalled", primal_value=math.nan, dual_value=math.nan, gap=math.nan,
            blocks={}, eq_duals=np.zeros(len(p.constraints)), max_eq_violation=math.nan,
            min_block_eig=math.nan, iterations=0,
        )

    return _extract_solution(p, problem, vars_, cons, gap_tol, feas_tol)


def _extract_solution(p, problem, vars_, cons, gap_tol, feas_tol, extra_obj=None):
    stats = problem.solver_stats
    iters = int(stats.num_iters) if stats and stats.num_iters is not None else 0

    if problem.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        ray = _farkas_ray(p)
        return ConicSolution(
            status="infeasible", primal_value=math.nan, dual_value=math.nan, gap=math.nan,
            blocks={}, eq_duals=np.zeros(len(p.constraints)), max_eq_violation=math.nan,
            min_block_eig=math.nan, iterations=iters, certificate=ray,
        )
    if problem.status in (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
        return ConicSolution(
            status="unbounded", primal_value=math.nan, dual_value=math.nan, gap=math.nan,
            blocks={}, eq_duals=np.zeros(len(p.constraints)), max_eq_violation=math.nan,
            min_block_eig=math.nan, iterations=iters,
        )

    ok = problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)
    blocks: dict[str, np.ndarray | float] = {}
    for name in p.psd:
        v = vars_[name].value
        v = np.zeros((p.psd[name],) * 2) if v is None else (v + v.T) / 2
        blocks[name] = v
    for name in p.scalars:
        v = vars_[name].value
        blocks[name] = float(v) if v is not None else math.nan

    duals = np.array([float(c.dual_value) if c.dual_value is not None else 0.0 for c in cons])
    primal = float(problem.value)
    # Lagrangian sign: cvxpy reports duals y with  L = obj + y*(lhs - rhs) for
    # Minimize and  L = obj - y*(lhs - rhs) for Maximize; either way the dual
    # objective evaluates to sum_i y_i * rhs_i with the sign fixed below.
    sgn = -1.0 if p.sense == "min" else 1.0
    dual = float(sgn * sum(y * c.rhs for y, c in zip(duals, p.constraints)))

    max_eq, min_eig_ = _residuals(p, blocks)
    gap = abs(primal - dual)
    scale = 1.0 + abs(primal)
    feas_ok = max(feas_tol, 1e-6 * scale)
    status = "optimal" if ok and gap <= max(gap_tol, 1e-6 * scale) and \
        max_eq <= feas_ok and min_eig_ >= -feas_ok else "stalled"
    return ConicSolution(
        status=status, primal_value=primal, dual_value=dual, gap=gap, blocks=blocks,
        eq_duals=duals, max_eq_violation=max_eq, min_block_eig=min_eig_, iterations=iters,
    )


def _residuals(p: ConicProgram, blocks) -> tuple[float, float]:
    max_eq = 0.0
    for c in p.constraints:
        val = math.fsum(
            _frob(coef, blocks[n]) if n in p.psd else float(coef) * blocks[n]
            for n, coef in c.terms.items()
        )
        max_eq = max(max_eq, abs(val - c.rhs))
    min_eig_ = 0.0
    for name in p.psd:
        w = np.linalg.eigvalsh(blocks[name])
        min_eig_ = min(min_eig_, float(w[0]))
    for name, kind in p.scalars.items():
        if kind == "nonneg":
            min_eig_ = min(min_eig_, float(blocks[name]))
    return max_eq, min_eig_


@dataclass
class CertificateReport:
    max_eq_violation: float
    min_block_eig: float
    min_dual_slack_eig: float
    gap: float
    flagged: list[str]

    @property
    def ok(self) -> bool:
        return not self.flagged


def verify_certificate(
    p: ConicProgram, s: ConicSolution, feas_tol: float = DEFAULT_FEAS_TOL
) -> CertificateReport:
    """Recompute all residuals from scratch and flag violations."""
    for name, dim in p.psd.items():
        blk = s.blocks.get(name)
        if blk is None or np.asarray(blk).shape != (dim, dim):
            raise ProgramError(f"solution does not match program: block {name!r}")
    if len(s.eq_duals) != len(p.constraints):
        raise ProgramError("solution does not match program: constraint count")

    flagged: list[str] = []
    if s.status not in ("optimal", "stalled"):
        return CertificateReport(math.nan, math.nan, math.nan, math.nan, ["not solved"])

    max_eq, min_eig_ = _residuals(p, s.blocks)
    scale = 1.0 + abs(s.primal_value)
    if max_eq > feas_tol * scale:
        flagged.append(f"equality violation {max_eq:.3e}")
    if min_eig_ < -feas_tol * scale:
        flagged.append(f"cone violation {min_eig_:.3e}")

    # Dual slack: for min, C - sum_i y_i A_i must lie in the dual cone.
    sgn = 1.0 if p.sense == "min" else -1.0
    min_dual = 0.0
    for name, dim in p.psd.items():
        z = sgn * np.asarray(p.objective.get(name, np.zeros((dim, dim)))).astype(float).copy()
        for y, c in zip(s.eq_duals, p.constraints):
            if name in c.terms:
                z = z + y * np.asarray(c.terms[name])
        z = (z + z.T) / 2
        min_dual = min(min_dual, float(np.linalg.eigvalsh(z)[0]))
    for name, kind in p.scalars.items():
        z = sgn * float(p.objective.get(name, 0.0))
        for y, c in zip(s.eq_duals, p.constraints):
            if name in c.terms:
                z += y * float(c.terms[name])
        if kind == "nonneg":
            min_dual = min(min_dual, z)
        else:
            min_dual = min(min_dual, -abs(z))
    if s.status == "optimal" and min_dual < -1e2 * feas_tol * scale:
        flagged.append(f"dual slack violation {min_dual:.3e}")

    gap = abs(s.primal_value - s.dual_value)
    if s.status == "optimal" and gap > max(1e2 * feas_tol, 1e-6 * scale):
        flagged.append(f"duality gap {gap:.3e}")
    return CertificateReport(max_eq, min_eig_, min_dual, gap, flagged)


class ParametricObjectiveSolver:
    """Repeated solves of one program whose scalar-block objective
    coefficients vary: canonicalization is paid once.

    Only scalar blocks named in ``param_scalars`` may carry varying
    coefficients; everything else about the program is frozen at build time.
    """

    def __init__(self, p: ConicProgram, param_scalars: list[str]):
        p._check()
        self.program = p
        self.names = list(param_scalars)
        self.params = cp.Parameter(len(self.names))
        problem, vars_, cons = _build_cvxpy_with_param(p, self.names, self.params)
        self.problem = problem
        self.vars = vars_
        self.cons = cons

    def solve(
        self,
        coeffs: dict[str, float],
        gap_tol: float = DEFAULT_GAP_TOL,
        feas_tol: float = DEFAULT_FEAS_TOL,
        iter_cap: int = DEFAULT_ITER_CAP,
    ) -> ConicSolution:
        self.params.value = np.array([coeffs.get(n, 0.0) for n in self.names])
        p = self.program
        try:
            self.problem.solve(
                solver=cp.CLARABEL,
                max_iter=int(iter_cap),
                tol_gap_abs=gap_tol * 1e-1,
                tol_gap_rel=gap_tol * 1e-1,
                tol_feas=feas_tol * 1e-1,
            )
        except cp.error.SolverError:
            return ConicSolution(
                status="stalled", primal_value=math.nan, dual_value=math.nan,
                gap=math.nan, blocks={}, eq_duals=np.zeros(len(p.constraints)),
                max_eq_violation=math.nan, min_block_eig=math.nan, iterations=0,
            )
        return _extract_solution(
            p, self.problem, self.vars, self.cons, gap_tol, feas_tol,
            extra_obj={n: self.params.value[i] for i, n in enumerate(self.names)},
        )


def _farkas_ray(p: ConicProgram) -> np.ndarray | None:
    """Search for a dual improving ray proving primal infeasibility."""
    m = len(p.constraints)
    if m == 0:
        return None
    y = cp.Variable(m)
    cons = [y <= 1, y >= -1]
    for name, dim in p.psd.items():
        acc = np.zeros((dim * dim, m))
        for i, c in enumerate(p.constraints):
            if name in c.terms:
                acc[:, i] = np.asarray(c.terms[name]).ravel()
        expr = cp.reshape(acc @ y, (dim, dim), order="C")
        cons.append(expr + expr.T << 0)
    for name, kind in p.scalars.items():
        coefs = np.array([float(c.terms.get(name, 0.0)) for c in p.constraints])
        if kind == "nonneg":
            cons.append(coefs @ y <= 0)
        else:
            cons.append(coefs @ y == 0)
    b = np.array([c.rhs for c in p.constraints])
    prob = cp.Problem(cp.Maximize(b @ y), cons)
    try:
        prob.solve(solver=cp.CLARABEL)
    except cp.error.SolverError:
        return None
    if prob.status == cp.OPTIMAL and prob.value is not None and prob.value > 1e-7:
        return np.asarray(y.value)
    return None
