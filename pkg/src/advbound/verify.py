"""Verification suites: every numerical claim the library rests on, executed
over the builtin function corpus and seeded random instances, with one
residual-carrying row per check.

Suites: preliminaries, adversary, witness, outcond, dpt; `all` runs every
suite.  Results are deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds, dpt, gram, matlin, outcond, witness

SUITES = ("preliminaries", "adversary", "witness", "outcond", "dpt")


@dataclass
class CheckResult:
    suite: str
    name: str
    ok: bool
    residual: float
    tolerance: float
    detail: str = ""

    def row(self) -> dict:
        return {
            "suite": self.suite, "name": self.name,
            "ok": self.ok, "residual": self.residual,
            "tolerance": self.tolerance, "detail": self.detail,
        }


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.ok]

    def table(self) -> list[dict]:
        return [c.row() for c in self.checks]


def _check(out: list[CheckResult], suite: str, name: str, residual: float,
           tol: float, detail: str = "") -> None:
    out.append(CheckResult(
        suite=suite, name=name, ok=bool(residual <= tol),
        residual=float(residual), tolerance=float(tol), detail=detail,
    ))


def _random_psd(rng: np.random.Generator, m: int) -> np.ndarray:
    a = rng.standard_normal((m, m))
    return a @ a.T


def _random_sym(rng: np.random.Generator, m: int) -> np.ndarray:
    a = rng.standard_normal((m, m))
    return (a + a.T) / 2


def _random_gram(rng: np.random.Generator, m: int) -> np.ndarray:
    a = rng.standard_normal((m, m + 1))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    return a @ a.T


# --------------------------------------------------------- preliminaries

def suite_preliminaries(seed: int = 0, instances: int = 100) -> SuiteReport:
    rng = np.random.default_rng(seed)
    rep = SuiteReport(suite="preliminaries", seed=seed)
    cks = rep.checks

    # Hadamard product of PSD matrices stays PSD.
    worst = 0.0
    for _ in range(instances):
        m = int(rng.integers(2, 9))
        h = _random_psd(rng, m) * _random_psd(rng, m)
        scale = max(1.0, float(np.abs(h).max()))
        worst = max(worst, -matlin.min_eig(h) / scale)
    _check(cks, rep.suite, "hadamard_psd_closure", worst, 1e-6,
           f"{instances} random instances, dims <= 8")

    # ||A o B|| <= gamma2(A) ||B||.
    worst = 0.0
    for _ in range(instances):
        m = int(rng.integers(2, 9))
        a = _random_sym(rng, m)
        b = _random_sym(rng, m)
        lhs = matlin.op_norm(a * b)
        rhs = bounds.gamma2(a).value * matlin.op_norm(b)
        worst = max(worst, (lhs - rhs) / max(1.0, rhs))
    _check(cks, rep.suite, "hadamard_gamma2_norm_bound", worst, 1e-6,
           f"{instances} random instances, dims <= 8")

    # Fidelity basics and the trace-distance sandwich on random states.
    worst_self, worst_sym, worst_sand = 0.0, 0.0, 0.0
    for _ in range(30):
        m = int(rng.integers(2, 7))
        r = _random_psd(rng, m)
        r /= np.trace(r)
        s = _random_psd(rng, m)
        s /= np.trace(s)
        f = matlin.state_fidelity(r, s)
        worst_self = max(worst_self, abs(matlin.state_fidelity(r, r) - 1.0))
        worst_sym = max(worst_sym, abs(f - matlin.state_fidelity(s, r)))
        td = 0.5 * matlin.trace_norm(r - s)
        worst_sand = max(worst_sand, (1 - f) - td, td - math.sqrt(max(0.0, 1 - f * f)))
    _check(cks, rep.suite, "fidelity_self_unit", worst_self, 1e-9)
    _check(cks, rep.suite, "fidelity_symmetry", worst_sym, 1e-9)
    _check(cks, rep.suite, "fidelity_trace_distance_sandwich", worst_sand, 1e-8)

    # gamma2(J) = 1; gamma2(J - F) <= 2 for boolean builtins.
    j4 = np.ones((4, 4))
    _check(cks, rep.suite, "gamma2_of_J", abs(bounds.gamma2(j4).value - 1.0), 1e-6)
    worst = 0.0
    names = []
    for f in gram.builtin_corpus(max_n=3, boolean_only=True):
        if f.arity > 3:
            continue
        g = gram.build_gram_set(f)
        val = bounds.gamma2(g.J - g.F).value
        worst = max(worst, val - 2.0)
        names.append(f.name)
    _check(cks, rep.suite, "gamma2_JminusF_le_2", worst, 1e-6, ", ".join(names))
    return rep


# ------------------------------------------------------------- adversary

def _corpus(max_n: int):
    return [f for f in gram.builtin_corpus(max_n=max_n) if f.arity <= max_n]


def suite_adversary(seed: int = 0) -> SuiteReport:
    rep = SuiteReport(suite="adversary", seed=seed)
    cks = rep.checks

    # Primal ascent certified by the dual factorization SDP on the corpus.
    worst, names = 0.0, []
    for f in _corpus(2):
        g = gram.build_gram_set(f)
        for choice in ("F",) + (("sigma_f",) if f.is_boolean else ()):
            r = bounds.adv(g.sigma(choice), list(g.deltas), seed=seed)
            rel = r.gap / (1 + r.value) if not math.isnan(r.gap) else math.inf
            worst = max(worst, rel)
            names.append(f"{f.name}/{choice}")
    _check(cks, rep.suite, "adv_dual_certificate", worst, 1e-4, ", ".join(names))

    # ADV+- <= Adv <= 2 ADV+- on boolean corpus (sign form).
    worst = 0.0
    for f in _corpus(2):
        if not f.is_boolean:
            continue
        g = gram.build_gram_set(f)
        plain = bounds.adv(g.sigma_f, list(g.deltas), seed=seed).value
        pm = bounds.adv(g.sigma_f, list(g.deltas), seed=seed, pm=True).value
        worst = max(worst, pm - plain, plain - 2 * pm)
    _check(cks, rep.suite, "factor_of_two_bracket", worst, 1e-4)

    # Closed-form oracle: 1-bit identity has multiplicative value 1 for all c.
    worst = 0.0
    g = gram.build_gram_set(gram.builtin("ID:1"))
    for c in (1.1, 1.5, 2.0, 4.0):
        r = bounds.madv_fixed_c(g.F, list(g.deltas), c)
        worst = max(worst, abs(r.value - 1.0))
        # Independent oracle: the optimal W = [[c/2, -(c-1)/2], ...] gives
        # objective c for sigma = F and 2c - 1 for sigma = sigma_f.
        worst = max(worst, abs(r.witness["objective"] - c))
        rs = bounds.madv_fixed_c(g.sigma_f, list(g.deltas), c)
        worst = max(worst, abs(rs.witness["objective"] - (2 * c - 1)))
    _check(cks, rep.suite, "madv_identity_closed_form", worst, 1e-6,
           "c in {1.1, 1.5, 2, 4}; objective oracles c and 2c-1")

    # Sweep supremum reaches lam * adv / 2 (approached as c -> 1).
    worst, names = 0.0, []
    for fn in ("ID:1", "OR:2"):
        g = gram.build_gram_set(gram.builtin(fn))
        adv_val = bounds.adv(g.sigma_f, list(g.deltas), seed=seed).value
        sw = bounds.madv_sweep(g.sigma_f, list(g.deltas))
        worst = max(worst, (adv_val - 1e-3) - sw.value, 0.0)
        names.append(f"{fn}: sweep={sw.value:.5f} target={adv_val:.5f}")
    _check(cks, rep.suite, "madv_sweep_vs_additive", worst, 1e-9, "; ".join(names))
    return rep


# --------------------------------------------------------------- witness

def _witness_pipeline(fn: str, seed: int):
    g = gram.build_gram_set(gram.builtin(fn))
    arep = bounds.adv(g.sigma_f, list(g.deltas), seed=seed)
    aw = bounds.additive_witness(arep)
    a = 1.0 - g.sigma_f
    np.fill_diagonal(a, 0.0)
    g2 = bounds.gamma2(a).value
    tgt = witness.structured_target(g.sigma_f, arep.value, g2)
    gp = witness.normalize_witness(aw, tgt)
    return g, aw, tgt, gp


def suite_witness(seed: int = 0) -> SuiteReport:
    rep = SuiteReport(suite="witness", seed=seed)
    cks = rep.checks

    corpus = [f.name for f in _corpus(2)
              if f.is_boolean and gram.builtin(f.name).name != "CONST:1"]
    corpus = [n for n in corpus if not n.startswith("CONST")]

    worst_bundle, worst_ratio, names = 0.0, 0.0, []
    for fn in corpus:
        g, aw, tgt, gp = _witness_pipeline(fn, seed)
        gammas = [1e-3, 1.0]
        if tgt.d > 0:
            gammas.append(1.0 / (tgt.d * tgt.lam))
        for gm in gammas:
            b = witness.build_mult_witness(gp, tgt, gm)
            lm = witness.check_bundle_lmis(b, list(g.deltas))
            scale = 1 + matlin.op_norm(b.Gamma_m)
            worst_bundle = max(
                worst_bundle,
                abs(b.checks["trace_vv"] - 1.0),
                abs(b.checks["trace_sigma_vv"] - b.checks["expected_sigma_vv"]),
                -b.checks["lower_identity_min_eig"],
                -b.checks["upper_identity_min_eig"],
                -lm["worst"] / scale,
            )
        # gamma = 1/(d lam): witness value must reach lam*adv/2 in the
        # sweep sense; here we verify the closed identity at that gamma.
        if tgt.d > 0:
            gm = 1.0 / (tgt.d * tgt.lam)
            b = witness.build_mult_witness(gp, tgt, gm)
            expect = math.log(2.0) / math.log(1 + gm)
            worst_ratio = max(worst_ratio, abs(b.value - expect) / expect)
        names.append(fn)
    _check(cks, rep.suite, "mult_witness_bundle_conditions", worst_bundle, 1e-7,
           ", ".join(names))
    _check(cks, rep.suite, "mult_witness_value_identity", worst_ratio, 1e-9,
           "value = ln 2 / ln(1 + gamma) at gamma = 1/(d lam)")

    # Sweep reproduces lam * adv / 2 within 1e-3 relative (corpus subset for
    # runtime; the supremum is approached as c -> 1).
    worst = 0.0
    for fn in ("ID:1", "PARITY:2"):
        g, aw, tgt, gp = _witness_pipeline(fn, seed)
        sw = bounds.madv_sweep(g.sigma_f, list(g.deltas))
        target = tgt.lam * aw.value / 2
        worst = max(worst, (target - sw.value) / target)
    _check(cks, rep.suite, "madv_ge_half_lam_adv", worst, 1e-3)

    # Tensorized witness feasibility: k = 2 on OR:2, k = 3 on 1-bit.
    worst_lmi, worst_obj = 0.0, 0.0
    for fn, k in (("OR:2", 2), ("ID:1", 3), ("PARITY:1", 3)):
        g, aw, tgt, gp = _witness_pipeline(fn, seed)
        b = witness.build_mult_witness(gp, tgt, 0.5)
        inst = gram.tensor_instance(g, "sigma_f", k)
        t = witness.tensor_witness_check(b, inst)
        scale = (1 + matlin.op_norm(b.Gamma_m)) ** k
        worst_lmi = max(worst_lmi, -t.lmi_min_eig / scale)
        worst_obj = max(
            worst_obj,
            abs(t.normalization - 1.0),
            abs(t.objective - t.expected_objective) / max(1.0, t.expected_objective),
        )
    _check(cks, rep.suite, "tensor_witness_lmis", worst_lmi, 1e-8,
           "k=2 OR:2 (16x16); k=3 ID:1, PARITY:1 (8x8)")
    _check(cks, rep.suite, "tensor_witness_objective", worst_obj, 1e-6)

    # Limit construction: ratio approaches the additive value as gamma -> 0.
    worst = 0.0
    for fn in ("OR:2", "PARITY:2"):
        g, aw, tgt, gp = _witness_pipeline(fn, seed)
        prev_err = math.inf
        for gm in (0.1, 0.01, 0.001):
            lr = witness.build_limit_witness(aw, g.sigma_f, gm)
            err = abs(lr.ratio - lr.b)
            worst = max(worst, err - prev_err)  # must be decreasing
            prev_err = err
        worst = max(worst, prev_err - 0.01 * lr.b)  # and small at gamma = 1e-3
    _check(cks, rep.suite, "limit_witness_ratio_converges", worst, 1e-9,
           "ratio -> additive value monotonically over gamma in {0.1, 0.01, 0.001}")
    return rep


# --------------------------------------------------------------- outcond

def suite_outcond(seed: int = 0, instances: int = 50) -> SuiteReport:
    rng = np.random.default_rng(seed)
    rep = SuiteReport(suite="outcond", seed=seed)
    cks = rep.checks

    # Alignment SDP equals masked-fidelity minimization (two-sided bracket).
    worst_eq, worst_br = 0.0, 0.0
    for trial in range(instances):
        m = int(rng.integers(2, 7))
        n = int(rng.integers(2, 7))
        a = rng.standard_normal((m, n))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b = rng.standard_normal((m, n))
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        pair = outcond.VectorFamilyPair(a, b)
        t = outcond.best_alignment(pair)
        f, _ = outcond.min_vec_fidelity(pair.rho, pair.sigma, seed=seed + trial)
        worst_eq = max(worst_eq, abs(t - f))
        worst_br = max(worst_br, t - f)  # exact side never above heuristic side
    _check(cks, rep.suite, "alignment_equals_min_fidelity", worst_eq, 2e-3,
           f"{instances} random instances, dim <= 6")
    _check(cks, rep.suite, "alignment_bracket_signed", worst_br, 1e-6)

    # Expectation-vs-fidelity lemma: numerical min >= closed bound.
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(2, 6))
        support = tuple(float(x) for x in rng.uniform(0.1, 5.0, m))
        probs = rng.dirichlet(np.ones(m))
        p = outcond.ClassicalDistribution(support, tuple(float(x) for x in probs))
        delta = float(rng.uniform(0.05, 1.0))
        num, closed = outcond.min_expectation_under_fidelity(p, delta)
        worst = max(worst, closed - num)
    _check(cks, rep.suite, "expectation_fidelity_lemma", worst, 1e-8,
           "100 random (p, delta)")

    # Inverse-expectation bound equals its LP oracle.
    worst = 0.0
    for _ in range(100):
        a0 = float(rng.uniform(0.1, 2.0))
        a1 = a0 + float(rng.uniform(0.0, 3.0))
        abar = float(rng.uniform(a0, a1))
        sb = outcond.SupportBounds(a0, a1, abar)
        worst = max(worst, abs(outcond.inv_expectation_bound(sb)
                               - outcond.inv_expectation_lp(sb)))
    _check(cks, rep.suite, "inv_expectation_lp_oracle", worst, 1e-8,
           "100 random support bounds, 50-point grid")

    # Monotonicity and multiplicativity.
    p = outcond.ClassicalDistribution((1.0, 3.0), (0.5, 0.5))
    vals = [outcond.min_expectation_under_fidelity(p, d)[0]
            for d in (0.2, 0.5, 0.8, 1.0)]
    mono = max(vals[i] - vals[i + 1] for i in range(len(vals) - 1))
    _check(cks, rep.suite, "min_expectation_monotone_in_delta", max(mono, 0.0), 1e-7)
    sb = outcond.SupportBounds(1.0, 3.0, 2.0)
    v1 = outcond.product_expectation_bound(0.7, sb, 1)
    v3 = outcond.product_expectation_bound(0.7, sb, 3)
    _check(cks, rep.suite, "product_bound_multiplicative", abs(v3 - v1**3), 1e-12)

    # gamma2 sandwich on random families.
    worst = 0.0
    for trial in range(10):
        a = rng.standard_normal((4, 4))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b = rng.standard_normal((4, 4))
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        pair = outcond.VectorFamilyPair(a, b)
        lhs, mid, rhs = outcond.gamma2_error_sandwich(pair)
        worst = max(worst, lhs - mid, mid - rhs)
    _check(cks, rep.suite, "gamma2_error_sandwich", worst, 1e-6,
           "10 random dim-4 families")
    return rep


# ------------------------------------------------------------------- dpt

def suite_dpt(seed: int = 0) -> SuiteReport:
    rng = np.random.default_rng(seed)
    rep = SuiteReport(suite="dpt", seed=seed)
    cks = rep.checks

    # Calculator identities.
    worst = 0.0
    for _ in range(20):
        k = int(rng.integers(1, 20))
        delta = float(rng.uniform(0.05, 1.0))
        gm = float(rng.uniform(0.05, 3.0))
        d = float(rng.uniform(0.1, 4.0))
        p2 = dpt.DptParams(k=k, delta=delta, gamma=gm, d=d, lam=2.0)
        v, _ = dpt.product_sigma_bound(p2)
        g, _ = dpt.phase_sdpt_bound(dpt.DptParams(k=k, delta=delta, gamma=gm), d)
        worst = max(worst, abs(v - g))
    _check(cks, rep.suite, "lam2_reduces_to_phase_formula", worst, 1e-12)

    m, _ = dpt.sdpt_bounds(dpt.DptParams(k=7, delta=2 / 3), 5.0)
    _check(cks, rep.suite, "sdpt_zero_at_delta_two_thirds", abs(m), 1e-15)

    worst = 0.0
    for _ in range(20):
        k = int(rng.integers(1, 15))
        K = int(rng.integers(1, 10))
        delta = float(rng.uniform(0.0, 0.99))
        t, c = dpt.threshold_tail(dpt.DptParams(k=k, delta=delta, K=K, mu=1.0))
        worst = max(worst, abs(t - c) / max(1.0, c))
    _check(cks, rep.suite, "threshold_mu1_equals_corollary", worst, 1e-12)

    # Linearity in k where the formulas are linear.
    worst = 0.0
    for k in (1, 3, 8):
        p1 = dpt.DptParams(k=k, delta=0.9, gamma=0.7, d=1.3, lam=1.5)
        p2 = dpt.DptParams(k=2 * k, delta=0.9, gamma=0.7, d=1.3, lam=1.5)
        worst = max(worst, abs(dpt.product_sigma_bound(p2)[0]
                               - 2 * dpt.product_sigma_bound(p1)[0]))
        worst = max(worst, abs(dpt.sdpt_bounds(p2, 2.0)[0]
                               - 2 * dpt.sdpt_bounds(p1, 2.0)[0]))
        worst = max(worst, abs(dpt.xor_bounds(p2, 2.0)[0]
                               - 2 * dpt.xor_bounds(p1, 2.0)[0]))
    _check(cks, rep.suite, "calculators_linear_in_k", worst, 1e-12)

    # relent convexity in the first argument.
    worst = 0.0
    for _ in range(100):
        x, y = sorted(rng.uniform(0.0, 1.0, 2))
        mu = float(rng.uniform(0.01, 0.99))
        mid = dpt.relent((x + y) / 2, mu)
        worst = max(worst, mid - (dpt.relent(x, mu) + dpt.relent(y, mu)) / 2)
    _check(cks, rep.suite, "relent_convex", max(worst, 0.0), 1e-12)

    # Sign-moment lemma: random mixtures of product distributions whose
    # per-coordinate biases stay within [-beta, beta] satisfy the moment
    # hypothesis with C = 1; the enumerated tail obeys the bound.
    worst, hyp_fail = 0.0, 0
    for _ in range(100):
        k = int(rng.integers(2, 11))
        beta = float(rng.uniform(0.0, 0.8))
        comps = []
        for _ in range(int(rng.integers(1, 4))):
            biases = [float(b) for b in rng.uniform(-beta, beta, k)]
            comps.append(np.array(dpt.JointSignDistribution.independent(biases).probs))
        wts = rng.dirichlet(np.ones(len(comps)))
        probs = sum(w * c for w, c in zip(wts, comps))
        dist = dpt.JointSignDistribution(k=k, probs=tuple(float(x) for x in probs))
        lam = float(rng.uniform(beta, 1.0))
        r = dpt.unger_check(dist, 1.0, beta, lam)
        if not r.hypothesis_ok:
            hyp_fail += 1
            continue
        worst = max(worst, r.tail - r.bound)
    _check(cks, rep.suite, "sign_moment_tail_bound", worst, 1e-12,
           f"100 random mixtures, k <= 10; hypothesis violations: {hyp_fail}")
    _check(cks, rep.suite, "sign_moment_hypothesis_generator", float(hyp_fail), 0.0)

    # Fair-coin equality case.
    d4 = dpt.JointSignDistribution.independent([0.0] * 4)
    r = dpt.unger_check(d4, 1.0, 0.0, 1.0)
    eq_err = max(abs(r.tail - 1 / 16), abs(r.bound - 1 / 16))
    _check(cks, rep.suite, "fair_coin_equality", eq_err, 1e-15)

    # Two code paths for the same exponent: threshold_tail vs unger bound.
    worst = 0.0
    for _ in range(20):
        k = int(rng.integers(1, 12))
        K = int(rng.integers(1, 8))
        delta = float(rng.uniform(0.01, 0.95))
        mu = float(rng.uniform((1 + math.sqrt(delta)) / 2, 1.0))
        t, _ = dpt.threshold_tail(dpt.DptParams(k=k, delta=delta, K=K, mu=mu))
        # Same exponent through the sign-moment bound with beta = sqrt(delta),
        # lam = 2 mu - 1, C = e^{k/K}.
        dist = dpt.JointSignDistribution.independent([0.0] * k)
        r = dpt.unger_check(dist, math.exp(k / K), math.sqrt(delta), 2 * mu - 1)
        worst = max(worst, abs(t - r.bound) / max(1.0, r.bound))
    _check(cks, rep.suite, "threshold_unger_same_formula", worst, 1e-12)

    # Error conversions.
    worst = max(
        abs(dpt.error_convert("coherent", 0.0)),
        abs(dpt.error_convert("phase_upper", 0.0)),
        abs(dpt.error_convert("phase_lower", 0.0)),
        abs(dpt.error_convert("coherent", 0.75) - 0.5),
        abs(dpt.error_convert("phase_lower", 0.75) - 0.4375),
    )
    _check(cks, rep.suite, "error_conversions", worst, 1e-15)
    return rep


# ---------------------------------------------------------------- runner

_SUITE_FUNCS = {
    "preliminaries": suite_preliminaries,
    "adversary": suite_adversary,
    "witness": suite_witness,
    "outcond": suite_outcond,
    "dpt": suite_dpt,
}


def run_suite(name: str, seed: int = 0) -> list[SuiteReport]:
    if name == "all":
        return [_SUITE_FUNCS[s](seed=seed) for s in SUITES]
    if name not in _SUITE_FUNCS:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
    return [_SUITE_FUNCS[name](seed=seed)]
