"""Output-condition machinery: worst-case fidelity between Hadamard-masked
Gram matrices, its unitary-alignment SDP dual, and the classical expectation
lemmas that turn fidelity constraints into success-probability bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import conic, matlin
from .bounds import gamma2

MAX_ALIGN_DIM = 32
VEC_FID_STARTS = 32


class OutcondError(ValueError):
    pass


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class VectorFamilyPair:
    """Two indexed families of unit vectors over a common index set,
    zero-padded to a common ambient dimension.  Rows are the vectors."""

    a: np.ndarray  # (m, n)
    b: np.ndarray  # (m, n)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2 or b.ndim != 2 or a.shape[0] != b.shape[0]:
            raise OutcondError("families must be 2-d with equal sizes")
        n = max(a.shape[1], b.shape[1])
        a = np.pad(a, ((0, 0), (0, n - a.shape[1])))
        b = np.pad(b, ((0, 0), (0, n - b.shape[1])))
        for fam, label in ((a, "a"), (b, "b")):
            norms = np.linalg.norm(fam, axis=1)
            if np.abs(norms - 1.0).max() > 1e-9:
                raise OutcondError(f"family {label} contains non-unit vectors")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def size(self) -> int:
        return self.a.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.a.shape[1]

    @property
    def rho(self) -> np.ndarray:
        return self.a @ self.a.T

    @property
    def sigma(self) -> np.ndarray:
        return self.b @ self.b.T


def family_pair_from_grams(rho: np.ndarray, sigma: np.ndarray) -> VectorFamilyPair:
    """Cholesky-style factorizations of two unit-diagonal PSD matrices."""
    return VectorFamilyPair(_psd_rows(rho), _psd_rows(sigma))


def _psd_rows(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    dec = matlin.spectral(g)
    if dec.values[-1] < -1e-9:
        raise OutcondError("Gram matrix is not PSD")
    vals = np.clip(dec.values, 0.0, None)
    return dec.vectors * np.sqrt(vals)


@dataclass(frozen=True)
class ClassicalDistribution:
    """Positive support values a_i with probabilities p_i."""

    support: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.probs) or not self.support:
            raise OutcondError("support/probs length mismatch")
        if any(a <= 0 for a in self.support):
            raise OutcondError("support values must be positive")
        if any(p < -1e-15 for p in self.probs):
            raise OutcondError("negative probability")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise OutcondError("probabilities must sum to 1")

    def expectation(self) -> float:
        return math.fsum(a * p for a, p in zip(self.support, self.probs))

    def inv_expectation(self) -> float:
        return math.fsum(p / a for a, p in zip(self.support, self.probs))


@dataclass(frozen=True)
class SupportBounds:
    """0 < a0 <= abar <= a1."""

    a0: float
    a1: float
    abar: float

    def __post_init__(self):
        if not (0 < self.a0 <= self.abar <= self.a1):
            raise OutcondError("need 0 < a0 <= abar <= a1")


# ------------------------------------------------------- vector fidelity

def best_alignment(pair: VectorFamilyPair) -> float:
    """max t s.t. <a_x| V |b_x> >= t for all x, over contractions V.

    The contraction is encoded as the off-diagonal block of a PSD matrix
    [[I, V], [V^T, I]]; the optimum is attained at a unitary (extreme point),
    which callers can verify via `alignment_witness`.
    """
    m, n = pair.size, pair.ambient_dim
    if n > MAX_ALIGN_DIM or m > MAX_ALIGN_DIM:
        raise OutcondError(f"dimension/size exceeds {MAX_ALIGN_DIM}")
    p = conic.ConicProgram()
    p.add_psd("T", 2 * n)
    p.add_scalar("t")
    p.set_objective("max", {"t": 1.0})
    # Pin both diagonal sub-blocks to the identity.
    for blk in (0, n):
        for i in range(n):
            for j in range(i, n):
                p.add_eq({"T": p.entry_coeff(2 * n, blk + i, blk + j)},
                         1.0 if i == j else 0.0)
    for x in range(m):
        c = np.zeros((2 * n, 2 * n))
        half = 0.5 * np.outer(pair.a[x], pair.b[x])
        c[:n, n:] = half
        c[n:, :n] = half.T
        p.add_ineq({"T": c, "t": -1.0}, 0.0, ">=")
    sol = conic.solve(p)
    if sol.status not in ("optimal", "stalled"):
        raise OutcondError(f"alignment SDP {sol.status}")
    if sol.status == "stalled" and sol.gap > 1e-5:
        raise OutcondError(f"alignment SDP stalled with gap {sol.gap:.3e}")
    return float(np.clip(sol.primal_value, -1.0, 1.0))


def alignment_witness(pair: VectorFamilyPair) -> tuple[float, np.ndarray, float]:
    """Like best_alignment, but also return the optimal V and its distance
    from unitarity (||V^T V - I||), recording the extremality property."""
    m, n = pair.size, pair.ambient_dim
    p = conic.ConicProgram()
    p.add_psd("T", 2 * n)
    p.add_scalar("t")
    p.set_objective("max", {"t": 1.0})
    for blk in (0, n):
        for i in range(n):
            for j in range(i, n):
                p.add_eq({"T": p.entry_coeff(2 * n, blk + i, blk + j)},
                         1.0 if i == j else 0.0)
    for x in range(m):
        c = np.zeros((2 * n, 2 * n))
        half = 0.5 * np.outer(pair.a[x], pair.b[x])
        c[:n, n:] = half
        c[n:, :n] = half.T
        p.add_ineq({"T": c, "t": -1.0}, 0.0, ">=")
    sol = conic.solve(p)
    v = sol.block("T")[:n, n:]
    # Snap to the nearest unitary (polar factor) without degrading the value
    # beyond numerical noise; report the pre-snap deviation.
    dev = float(np.linalg.norm(v.T @ v - np.eye(n)))
    return float(sol.primal_value), v, dev


def min_vec_fidelity(rho: np.ndarray, sigma: np.ndarray, seed: int = 0,
                     starts: int = VEC_FID_STARTS, iters: int = 300) -> tuple[float, np.ndarray]:
    """min over unit u of F(rho o uu*, sigma o uu*).

    With rho = AA^T and sigma = BB^T the objective is the trace norm of
    A^T diag(w) B at w = u o u, which is convex in w on the simplex; we run
    projected gradient descent from seeded starts and return the best value
    and its arg-min u.  The value is an upper bound on the true minimum by
    construction.
    """
    rho = np.asarray(rho, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    m = rho.shape[0]
    if np.abs(np.diag(rho) - 1.0).max() > 1e-8 or np.abs(np.diag(sigma) - 1.0).max() > 1e-8:
        raise OutcondError("unit diagonals required")
    a = _psd_rows(rho)
    b = _psd_rows(sigma)

    def value_and_grad(w: np.ndarray) -> tuple[float, np.ndarray]:
        mmat = a.T @ (w[:, None] * b)
        u_sv, s, vt = np.linalg.svd(mmat)
        g = u_sv @ vt  # subgradient of the trace norm
        grad = np.einsum("xi,ij,xj->x", a, g, b)
        return float(s.sum()), grad

    rng = np.random.default_rng(seed)
    simplex_starts = [np.full(m, 1.0 / m)]
    simplex_starts += [np.eye(m)[i] for i in range(min(m, starts - 1))]
    while len(simplex_starts) < starts:
        w = rng.dirichlet(np.ones(m))
        simplex_starts.append(w)

    best_val, best_w = math.inf, simplex_starts[0]
    for w0 in simplex_starts:
        w = w0.copy()
        step = 1.0
        val, grad = value_and_grad(w)
        for _ in range(iters):
            cand = _project_simplex(w - step * grad)
            cval, cgrad = value_and_grad(cand)
            if cval < val - 1e-14:
                w, val, grad = cand, cval, cgrad
                step *= 1.3
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        if val < best_val - 1e-12:
            best_val, best_w = val, w

    # The trace norm is nonsmooth where singular values vanish (common when
    # the ambient dimension is small), and plain projected gradient can stall
    # there; polish the best iterate with an NLP solver.
    from scipy.optimize import minimize

    res = minimize(
        lambda w: value_and_grad(np.clip(w, 0.0, None))[0], best_w,
        jac=lambda w: value_and_grad(np.clip(w, 0.0, None))[1],
        method="SLSQP", bounds=[(0.0, 1.0)] * m,
        constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1.0,
                      "jac": lambda w: np.ones(m)}],
        options={"maxiter": 200, "ftol": 1e-12},
    )
    if res.success and res.fun < best_val:
        best_val, best_w = float(res.fun), _project_simplex(np.asarray(res.x))
    return float(np.clip(best_val, 0.0, 1.0)), np.sqrt(np.clip(best_w, 0.0, None))


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(v) + 1)
    rho_idx = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho_idx] / (rho_idx + 1)
    return np.clip(v - theta, 0.0, None)


# --------------------------------------------------- classical fidelity

def dist_fidelity(p: ClassicalDistribution, q: ClassicalDistribution) -> float:
    """F(p, q) = sum_i sqrt(p_i q_i) over a shared support."""
    if p.support != q.support:
        raise OutcondError("distributions must share a support")
    return math.fsum(math.sqrt(pi * qi) for pi, qi in zip(p.probs, q.probs))


def min_expectation_under_fidelity(p: ClassicalDistribution,
                                   delta: float) -> tuple[float, float]:
    """(numerical min of E_q(A) over q with F(p,q) >= sqrt(delta),
    closed bound delta / E_p(A^{-1})).

    The numerical side solves the SDP lift: min Tr(D(a) rho) over rho >= 0
    with Tr(rho) = 1 and <u|rho|u> >= delta, u_i = sqrt(p_i); its diagonal
    is the minimizing q.
    """
    if not (0 < delta <= 1):
        raise OutcondError("delta must lie in (0, 1]")
    n = len(p.support)
    u = np.sqrt(np.asarray(p.probs))
    prog = conic.ConicProgram()
    prog.add_psd("rho", n)
    prog.set_objective("min", {"rho": np.diag(np.asarray(p.support))})
    prog.add_eq({"rho": np.eye(n)}, 1.0)
    prog.add_ineq({"rho": np.outer(u, u)}, delta, ">=")
    sol = conic.solve(prog)
    if sol.status not in ("optimal", "stalled"):
        raise OutcondError(f"fidelity SDP {sol.status}")
    closed = delta / p.inv_expectation()
    return float(sol.primal_value), closed


def inv_expectation_bound(sb: SupportBounds) -> float:
    """(a0 + a1 - abar) / (a0 a1), an upper bound on E_p(A^{-1}) over all
    distributions supported in [a0, a1] with mean abar."""
    return (sb.a0 + sb.a1 - sb.abar) / (sb.a0 * sb.a1)


def inv_expectation_lp(sb: SupportBounds, grid_points: int = 50) -> float:
    """LP oracle: maximize E_p(A^{-1}) over distributions on a grid of
    [a0, a1] with mean abar.  Independent check of inv_expectation_bound."""
    if grid_points < 2 or sb.a0 == sb.a1:
        return 1.0 / sb.abar
    grid = np.linspace(sb.a0, sb.a1, grid_points)
    res = linprog(
        c=-1.0 / grid,
        A_eq=np.vstack([np.ones_like(grid), grid]),
        b_eq=[1.0, sb.abar],
        bounds=[(0, None)] * grid_points,
        method="highs",
    )
    if not res.success:
        raise OutcondError(f"LP oracle failed: {res.message}")
    return float(-res.fun)


def product_expectation_bound(delta: float, sb: SupportBounds, k: int) -> float:
    """(delta a0 a1 / (a0 + a1 - abar))^k: success-probability bound for k
    independent copies under a product fidelity constraint."""
    if k < 1:
        raise OutcondError("k must be >= 1")
    if not (0 <= delta <= 1):
        raise OutcondError("delta must lie in [0, 1]")
    return (delta / inv_expectation_bound(sb)) ** k


# ------------------------------------------------------- gamma2 sandwich

def gamma2_error_sandwich(pair: VectorFamilyPair) -> tuple[float, float, float]:
    """(1 - sqrt(1-eps), gamma2(rho - sigma)/2, sqrt(eps)) with
    sqrt(1-eps) = best_alignment(pair); asserts lhs <= mid <= rhs."""
    t = best_alignment(pair)
    eps = max(0.0, 1.0 - t * t)
    lhs = 1.0 - t
    rhs = math.sqrt(eps)
    mid = 0.5 * gamma2(pair.rho - pair.sigma).value
    if lhs > mid + 1e-6 or mid > rhs + 1e-6:
        raise OutcondError(f"sandwich violated: {lhs} <= {mid} <= {rhs}")
    return lhs, mid, rhs
