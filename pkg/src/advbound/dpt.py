"""Closed-form calculators for direct-product, XOR, and threshold bounds,
plus an exhaustive checker for the correlated-sign concentration lemma and
the error-parameter conversions between algorithm models.

All functions are pure scalar math; the only nontrivial computation is the
exact moment/tail enumeration in `unger_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DptError(ValueError):
    pass


@dataclass(frozen=True)
class DptParams:
    """Parameter bundle for the bound calculators.

    k      number of independent copies
    delta  success-probability parameter in [0, 1]
    gamma  multiplicative-witness step, > 0
    d      additive-bound scale, >= 0
    lam    structure constant of the target, > 0 (2 for the sign form)
    K      resource-fraction denominator, >= 1
    mu     threshold fraction in [0, 1]
    """

    k: int
    delta: float
    gamma: float = 1.0
    d: float = 0.0
    lam: float = 2.0
    K: int = 1
    mu: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise DptError("k must be a positive integer")
        if not (0 <= self.delta <= 1):
            raise DptError("delta must lie in [0, 1]")
        if self.gamma <= 0:
            raise DptError("gamma must be positive")
        if self.d < 0:
            raise DptError("d must be nonnegative")
        if self.lam <= 0:
            raise DptError("lam must be positive")
        if self.K < 1:
            raise DptError("K must be a positive integer")
        if not (0 <= self.mu <= 1):
            raise DptError("mu must lie in [0, 1]")


def relent(lam: float, mu: float) -> float:
    """Binary relative entropy D(lam || mu), with 0 ln 0 = 0."""
    if not (0 <= lam <= 1):
        raise DptError("first argument must lie in [0, 1]")
    if not (0 < mu < 1):
        raise DptError("second argument must lie in (0, 1)")
    out = 0.0
    if lam > 0:
        out += lam * math.log(lam / mu)
    if lam < 1:
        out += (1 - lam) * math.log((1 - lam) / (1 - mu))
    return out


# ----------------------------------------------------------- calculators

def product_sigma_bound(p: DptParams) -> tuple[float, bool]:
    """k ln(delta (1+2 gamma d) / (1 + gamma d (2 - lam))) / (2 ln(1+gamma)).

    Second element flags a vacuous (nonpositive) bound; the value is
    returned as-is either way.
    """
    if p.lam > 2:
        raise DptError("lam must be <= 2")
    if p.delta == 0:
        return -math.inf, True
    num = p.delta * (1 + 2 * p.gamma * p.d)
    den = 1 + p.gamma * p.d * (2 - p.lam)
    value = p.k * math.log(num / den) / (2 * math.log(1 + p.gamma))
    return value, value <= 0


def sdpt_bounds(p: DptParams, adv_value: float,
                q14: float | None = None) -> tuple[float, float | None]:
    """(k ln(3 delta / 2) / 8 * adv, k ln(3 delta / 2) / 8000 * q14)."""
    if not (2 / 3 <= p.delta <= 1):
        raise DptError("delta must lie in [2/3, 1]")
    base = p.k * math.log(1.5 * p.delta)
    main = base / 8 * adv_value
    other = base / 8000 * q14 if q14 is not None else None
    return main, other


def xor_bounds(p: DptParams, adv_value: float,
               q14: float | None = None) -> tuple[float, float | None]:
    """(k delta adv / 8, k delta q14 / 8000)."""
    main = p.k * p.delta * adv_value / 8
    other = p.k * p.delta * q14 / 8000 if q14 is not None else None
    return main, other


def phase_sdpt_bound(p: DptParams, adv_value: float) -> tuple[float, float]:
    """(k ln(delta (1+2 gamma d)) / (2 ln(1+gamma)) at d = adv,
    the gamma = 1/(delta d) specialization k delta adv / 4)."""
    d = adv_value
    if p.delta == 0 or d == 0:
        return (-math.inf if p.delta == 0 else 0.0), 0.0
    general = p.k * math.log(p.delta * (1 + 2 * p.gamma * d)) / (2 * math.log(1 + p.gamma))
    special = p.k * p.delta * d / 4
    return general, special


def threshold_tail(p: DptParams) -> tuple[float, float]:
    """(e^{k/K - k D(mu || (1+sqrt(delta))/2)}, (e^{1/K}(1+sqrt(delta))/2)^k).

    The second value is the mu = 1 corollary expression."""
    q = (1 + math.sqrt(p.delta)) / 2
    if p.mu < q - 1e-15:
        raise DptError("mu must be at least (1 + sqrt(delta)) / 2")
    tail = math.exp(p.k / p.K - p.k * relent(min(p.mu, 1.0), q))
    corollary = (math.exp(1 / p.K) * q) ** p.k
    return tail, corollary


def error_convert(mode: str, eps: float) -> float:
    """Error-parameter conversions between the coherent, non-coherent, and
    phase-oracle models."""
    if not (0 <= eps <= 1):
        raise DptError("eps must lie in [0, 1]")
    base = 1 - math.sqrt(1 - eps)
    if mode in ("coherent", "coherent_to_noncoherent_target"):
        return base
    if mode == "phase_upper":
        return base / 2
    if mode == "phase_lower":
        return base / 2 + eps / 4
    raise DptError(f"unknown mode {mode!r}")


# ------------------------------------------------- sign-moment tail lemma

@dataclass(frozen=True)
class JointSignDistribution:
    """Probabilities over {-1,+1}^k, indexed by bitmask (bit i set means
    Y_i = -1)."""

    k: int
    probs: tuple[float, ...]

    def __post_init__(self):
        if not (1 <= self.k <= 12):
            raise DptError("k must lie in 1..12")
        if len(self.probs) != 2**self.k:
            raise DptError("need 2^k probabilities")
        if any(q < -1e-15 for q in self.probs):
            raise DptError("negative probability")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise DptError("probabilities must sum to 1")

    @classmethod
    def independent(cls, biases: list[float]) -> "JointSignDistribution":
        """Product distribution with E[Y_i] = biases[i]."""
        k = len(biases)
        probs = np.ones(1)
        # bit i of the outcome mask corresponds to Y_i, so variable i must
        # occupy the 2^i stride of the kron product
        for b in biases:
            if not (-1 <= b <= 1):
                raise DptError("bias out of [-1, 1]")
            probs = np.kron(np.array([(1 + b) / 2, (1 - b) / 2]), probs)
        return cls(k=k, probs=tuple(float(x) for x in probs))

    def moments(self) -> np.ndarray:
        """E[prod_{i in S} Y_i] for every subset mask S, via the fast
        Walsh-Hadamard transform of the probability vector."""
        v = np.array(self.probs, dtype=float)
        h = 1
        n = v.size
        while h < n:
            for start in range(0, n, 2 * h):
                a = v[start:start + h].copy()
                b = v[start + h:start + 2 * h].copy()
                v[start:start + h] = a + b
                v[start + h:start + 2 * h] = a - b
            h *= 2
        return v

    def tail_probability(self, lam: float) -> float:
        """Exact Pr[sum_i Y_i >= lam * k] by enumeration."""
        total = []
        for mask, q in enumerate(self.probs):
            minus = bin(mask).count("1")
            if (self.k - 2 * minus) >= lam * self.k - 1e-12:
                total.append(q)
        return math.fsum(total)


@dataclass(frozen=True)
class UngerReport:
    k: int
    hypothesis_ok: bool
    violating_subsets: tuple[int, ...]
    tail: float
    bound: float
    conclusion_ok: bool | None  # None when the hypothesis fails (untested)


def unger_check(dist: JointSignDistribution, C: float, beta: float,
                lam: float, tol: float = 1e-12) -> UngerReport:
    """Verify the moment hypothesis E[prod_{i in S} Y_i] <= C beta^{|S|} for
    all 2^k subsets, then the tail conclusion
    Pr[sum Y_i >= lam k] <= C e^{-k D(1/2 + lam/2 || 1/2 + beta/2)}."""
    if not (beta <= lam <= 1):
        raise DptError("need beta <= lam <= 1")
    k = dist.k
    mom = dist.moments()
    violating = tuple(
        mask for mask in range(2**k)
        if mom[mask] > C * beta ** bin(mask).count("1") + tol
    )
    hypothesis_ok = not violating
    tail = dist.tail_probability(lam)
    if lam == 1 and beta == 1:
        bound = C  # D = 0 at the degenerate endpoint mu = 1 of the divergence
    else:
        bound = C * math.exp(-k * relent(0.5 + lam / 2, 0.5 + beta / 2))
    conclusion = (tail <= bound + tol) if hypothesis_ok else None
    return UngerReport(
        k=k, hypothesis_ok=hypothesis_ok, violating_subsets=violating,
        tail=tail, bound=bound, conclusion_ok=conclusion,
    )
