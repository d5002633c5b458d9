"""Explicit witness transformations between the additive and multiplicative
adversary bounds, and the tensor-power feasibility checks behind the direct
product argument.

Targets must have the idempotent-like structure
(J - sigma) o (J - sigma) = lambda (J - sigma); anything else is refused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matlin
from .bounds import AdditiveWitness
from .gram import TensorInstance

LAMBDA_RESIDUAL_TOL = 1e-9
BUNDLE_TOL = 1e-8


class WitnessError(ValueError):
    pass


@dataclass(frozen=True)
class StructuredTarget:
    """A target Gram matrix with the structure the quantitative witness
    transformations require, plus the two certified scalars entering them."""

    sigma: np.ndarray
    lam: float          # (J - sigma) o (J - sigma) = lam (J - sigma)
    g2: float           # gamma2(J - sigma)
    d: float            # adv value / g2
    certified: bool = True


@dataclass
class MultWitnessBundle:
    Gamma_m: np.ndarray
    v: np.ndarray
    gamma: float
    c: float
    lam: float
    d: float
    value: float        # ln(1 + lam*gamma*d) / ln(1 + gamma)
    checks: dict = field(default_factory=dict)
    certified: bool = True

    @property
    def W(self) -> np.ndarray:
        """The SDP-form witness W = Gamma_m o vv*."""
        return self.Gamma_m * np.outer(self.v, self.v)


def lambda_of(sigma: np.ndarray, tol: float = LAMBDA_RESIDUAL_TOL) -> float | None:
    """The scalar with (J-sigma) o (J-sigma) = lambda (J-sigma), or None.

    Returns 0.0 for sigma = J (the hypothesis holds vacuously)."""
    sigma = np.asarray(sigma, dtype=float)
    if np.abs(np.diag(sigma) - 1.0).max() > 1e-9:
        raise WitnessError("sigma must have unit diagonal")
    a = 1.0 - sigma
    np.fill_diagonal(a, 0.0)
    nz = a[np.abs(a) > tol]
    if nz.size == 0:
        return 0.0
    # Best lambda in the least-squares sense; then check the max residual.
    lam = float(np.sum(nz**3) / np.sum(nz**2))
    if np.abs(a * a - lam * a).max() > tol:
        return None
    return lam


def structured_target(sigma: np.ndarray, adv_value: float, g2: float,
                      certified: bool = True) -> StructuredTarget:
    lam = lambda_of(sigma)
    if lam is None:
        raise WitnessError("target lacks the (J-sigma) o (J-sigma) = lam (J-sigma) structure")
    d = adv_value / g2 if g2 > 0 else 0.0
    return StructuredTarget(sigma=np.asarray(sigma, dtype=float), lam=lam, g2=g2,
                            d=d, certified=certified)


def normalize_witness(w: AdditiveWitness, target: StructuredTarget,
                      feas_tol: float = BUNDLE_TOL) -> np.ndarray:
    """Gamma' = (Gamma o (J - sigma)) / gamma2(J - sigma), verified to have
    norm <= d, eigenvalue-equation structure, additive feasibility, and
    objective value lam * d."""
    if w.lmi_residual > feas_tol:
        raise WitnessError(f"input witness infeasible: LMI residual {w.lmi_residual:.3e}")
    a = 1.0 - target.sigma
    np.fill_diagonal(a, 0.0)
    if target.g2 <= 0:
        return np.zeros_like(a)
    gp = (w.Gamma * a) / target.g2
    lam, d = target.lam, target.d
    norm = matlin.op_norm(gp)
    if norm > d + 1e-8:
        raise WitnessError(f"||Gamma'|| = {norm} exceeds d = {d}")
    if np.abs(gp * a - lam * gp).max() > 1e-9 * max(1.0, np.abs(gp).max()):
        raise WitnessError("Gamma' o (J - sigma) != lam Gamma'")
    achieved = matlin.op_norm(gp * a)
    if achieved < lam * d - 1e-6:
        raise WitnessError(f"Gamma' achieves {achieved} < lam*d = {lam * d}")
    return gp


def _principal_vector(mat: np.ndarray, context: str) -> tuple[np.ndarray, float]:
    dec = matlin.spectral(mat)
    top, bottom = float(dec.values[0]), float(dec.values[-1])
    if top < abs(bottom) - 1e-9:
        raise WitnessError(
            f"{context}: principal eigenvalue is negative ({top} vs {bottom}); "
            "the positive-eigenvalue assumption fails on this instance"
        )
    return dec.vectors[:, 0], top


def build_mult_witness(gamma_prime: np.ndarray, target: StructuredTarget,
                       gamma: float, tol: float = BUNDLE_TOL) -> MultWitnessBundle:
    """Gamma_m = I + gamma (d I - Gamma'), with the four bundle conditions
    verified as literal matrix inequalities."""
    if gamma <= 0:
        raise WitnessError("gamma must be positive")
    m = gamma_prime.shape[0]
    lam, d = target.lam, target.d
    v, _ = _principal_vector(gamma_prime, "multiplicative witness") if d > 0 else (
        np.eye(m)[:, 0], 0.0)
    gm = np.eye(m) + gamma * (d * np.eye(m) - gamma_prime)
    c = 1.0 + gamma
    vv = np.outer(v, v)

    checks = {
        "trace_vv": float(np.sum(gm * vv)),
        "trace_sigma_vv": float(v @ ((gm * target.sigma) @ v)),
        "lower_identity_min_eig": matlin.min_eig(gm - np.eye(m)),
        "upper_identity_min_eig": matlin.min_eig((1 + 2 * gamma * d) * np.eye(m) - gm),
    }
    checks["expected_sigma_vv"] = 1 + lam * gamma * d
    value = math.log(1 + lam * gamma * d) / math.log(c)
    bundle = MultWitnessBundle(
        Gamma_m=gm, v=v, gamma=gamma, c=c, lam=lam, d=d, value=value,
        checks=checks, certified=target.certified,
    )
    scale = 1 + abs(d) * gamma
    ok = (
        abs(checks["trace_vv"] - 1.0) <= tol
        and abs(checks["trace_sigma_vv"] - checks["expected_sigma_vv"]) <= 10 * tol * scale
        and checks["lower_identity_min_eig"] >= -tol
        and checks["upper_identity_min_eig"] >= -tol * scale
    )
    if not ok:
        raise WitnessError(f"bundle conditions violated: {checks}")
    return bundle


def check_bundle_lmis(bundle: MultWitnessBundle, deltas: list[np.ndarray],
                      tol: float = BUNDLE_TOL) -> dict:
    """The query-constraint inequalities c^-1 Gamma_m <= Gamma_m o Delta_i
    <= c Gamma_m, checked by min-eigenvalue computations."""
    gm, c = bundle.Gamma_m, bundle.c
    out = {}
    worst = 0.0
    for i, dlt in enumerate(deltas):
        gd = gm * dlt
        lo = matlin.min_eig(gd - gm / c)
        hi = matlin.min_eig(c * gm - gd)
        out[f"delta_{i + 1}_lower"] = lo
        out[f"delta_{i + 1}_upper"] = hi
        worst = min(worst, lo, hi)
    out["ok"] = worst >= -tol * (1 + matlin.op_norm(gm))
    out["worst"] = worst
    return out


@dataclass
class LimitWitnessResult:
    Gamma_m: np.ndarray
    v: np.ndarray
    gamma: float
    c: float
    b: float            # additive value carried by the input witness
    d_shift: float      # norm of the shifted witness
    ratio: float        # ln((1+gamma d)/(1+gamma(d-b))) / ln(1+gamma)
    checks: dict


def build_limit_witness(w: AdditiveWitness, sigma: np.ndarray, gamma: float,
                        feas_tol: float = BUNDLE_TOL) -> LimitWitnessResult:
    """The shifted/normalized construction behind the limiting comparison of
    the two adversary bounds, verified numerically."""
    if gamma <= 0:
        raise WitnessError("gamma must be positive")
    if w.lmi_residual > feas_tol:
        raise WitnessError(f"input witness infeasible: LMI residual {w.lmi_residual:.3e}")
    sigma = np.asarray(sigma, dtype=float)
    m = sigma.shape[0]
    a = 1.0 - sigma
    np.fill_diagonal(a, 0.0)
    if np.abs(w.Gamma * a).max() == 0.0:
        gm = np.eye(m)
        v = np.eye(m)[:, 0]
        return LimitWitnessResult(
            Gamma_m=gm, v=v, gamma=gamma, c=1 + gamma, b=0.0, d_shift=0.0,
            ratio=0.0, checks={"trace_vv": 1.0, "trace_sigma_vv": 1.0},
        )
    v, b = _principal_vector(w.Gamma * a, "limit witness")
    shift = float(v @ ((w.Gamma * sigma) @ v))
    gamma_prime = w.Gamma - shift * np.eye(m)
    d = matlin.op_norm(gamma_prime)
    denom = 1 + gamma * (d - b)
    gm = (np.eye(m) + gamma * (d * np.eye(m) - gamma_prime)) / denom
    c = 1.0 + gamma
    vv = np.outer(v, v)
    checks = {
        "trace_vv": float(np.sum(gm * vv)),
        "trace_sigma_vv": float(v @ ((gm * sigma) @ v)),
        "expected_sigma_vv": (1 + gamma * d) / denom,
    }
    scale = 1 + gamma * d
    if abs(checks["trace_vv"] - 1.0) > 10 * feas_tol * scale or \
            abs(checks["trace_sigma_vv"] - checks["expected_sigma_vv"]) > 10 * feas_tol * scale:
        raise WitnessError(f"limit-witness conditions violated: {checks}")
    ratio = math.log((1 + gamma * d) / denom) / math.log(c)
    return LimitWitnessResult(
        Gamma_m=gm, v=v, gamma=gamma, c=c, b=b, d_shift=d, ratio=ratio, checks=checks,
    )


@dataclass
class TensorCheckReport:
    k: int
    c: float
    lmi_min_eig: float          # worst residual over all (p, q) pairs and sides
    normalization: float        # Tr(Gamma_m^{(x)k} (vv*)^{(x)k})
    objective: float            # Tr(Gamma_m^{(x)k} (sigma^{(x)k} o (vv*)^{(x)k}))
    expected_objective: float   # (1 + lam*gamma*d)^k
    pairs_checked: int
    ok: bool


def tensor_witness_check(bundle: MultWitnessBundle, instance: TensorInstance,
                         tol: float = 1e-8, rel_tol: float = 1e-6) -> TensorCheckReport:
    """Feasibility of Gamma_m^{(x)k} for the lifted constraints at the same c,
    plus the product normalization and objective values."""
    k = instance.k
    gm = bundle.Gamma_m
    if gm.shape[0] ** k != instance.dim:
        raise WitnessError("bundle and tensor instance dimensions do not match")
    if instance.dim > 512:
        raise WitnessError("tensorized dimension exceeds cap")
    gk = matlin.kron_power(gm, k)
    c = bundle.c
    worst = 0.0
    pairs = 0
    for (_, _), dpq in sorted(instance.deltas.items()):
        gd = gk * dpq
        worst = min(worst, matlin.min_eig(gd - gk / c), matlin.min_eig(c * gk - gd))
        pairs += 1
    vk = bundle.v
    for _ in range(k - 1):
        vk = np.kron(vk, bundle.v)
    vvk = np.outer(vk, vk)
    normalization = float(np.sum(gk * vvk))
    objective = float(vk @ ((gk * instance.sigma_k) @ vk))
    expected = (1 + bundle.lam * bundle.gamma * bundle.d) ** k
    ok = (
        worst >= -tol * (1 + matlin.op_norm(gm)) ** k
        and abs(normalization - 1.0) <= rel_tol
        and abs(objective - expected) <= rel_tol * max(1.0, abs(expected))
    )
    return TensorCheckReport(
        k=k, c=c, lmi_min_eig=worst, normalization=normalization,
        objective=objective, expected_objective=expected, pairs_checked=pairs, ok=ok,
    )
