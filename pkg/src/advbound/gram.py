"""Problem matrices built from a finite function: F, sigma_f, Delta_i, J,
tensor powers and the lifted per-copy constraint matrices.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from . import matlin

TENSOR_DIM_CAP = 512


class FunctionSpecError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteFunction:
    """Truth table f: domain -> E with domain a subset of D^n.

    Symbols are integers 0..alphabet-1 (inputs) and 0..codomain-1 (outputs).
    The domain may be a strict subset of D^n (promise problems).
    """

    arity: int
    alphabet: int
    codomain: int
    domain: tuple[tuple[int, ...], ...]
    outputs: tuple[int, ...]  # aligned with domain
    name: str = "custom"

    def __post_init__(self):
        if self.arity < 1 or self.alphabet < 2 or self.codomain < 1:
            raise FunctionSpecError("need arity >= 1, alphabet >= 2, codomain >= 1")
        if not self.domain:
            raise FunctionSpecError("empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise FunctionSpecError("duplicate domain tuples")
        if len(self.outputs) != len(self.domain):
            raise FunctionSpecError("outputs misaligned with domain")
        for t in self.domain:
            if len(t) != self.arity or any(not (0 <= s < self.alphabet) for s in t):
                raise FunctionSpecError(f"bad domain tuple {t}")
        for o in self.outputs:
            if not (0 <= o < self.codomain):
                raise FunctionSpecError(f"bad output symbol {o}")

    @property
    def is_boolean(self) -> bool:
        return self.codomain == 2

    def __call__(self, x: tuple[int, ...]) -> int:
        return self.outputs[self.domain.index(x)]


@dataclass(frozen=True)
class GramSet:
    """F, sigma_f (boolean case), Delta_1..Delta_n and J for one function."""

    func: FiniteFunction
    F: np.ndarray
    sigma_f: np.ndarray | None
    deltas: tuple[np.ndarray, ...]
    J: np.ndarray
    index: tuple[tuple[int, ...], ...]  # row/column ordering of the domain

    @property
    def dim(self) -> int:
        return self.F.shape[0]

    def sigma(self, choice: str) -> np.ndarray:
        if choice == "F":
            return self.F
        if choice == "sigma_f":
            if self.sigma_f is None:
                raise FunctionSpecError("sigma_f requires a boolean function")
            return self.sigma_f
        raise FunctionSpecError(f"unknown sigma choice {choice!r}")


@dataclass(frozen=True)
class TensorInstance:
    """sigma^{(x)k} together with the lifted constraints Delta_{p,q}."""

    k: int
    sigma_k: np.ndarray
    deltas: dict[tuple[int, int], np.ndarray] = field(hash=False)

    @property
    def dim(self) -> int:
        return self.sigma_k.shape[0]


def build_gram_set(f: FiniteFunction) -> GramSet:
    # Lexicographic domain order, fixed once and recorded.
    index = tuple(sorted(f.domain))
    out = {x: f.outputs[i] for i, x in enumerate(f.domain)}
    m = len(index)
    F = np.array([[1.0 if out[x] == out[y] else 0.0 for y in index] for x in index])
    deltas = tuple(
        np.array([[1.0 if x[i] == y[i] else 0.0 for y in index] for x in index])
        for i in range(f.arity)
    )
    J = np.ones((m, m))
    sigma_f = 2 * F - J if f.is_boolean else None
    return GramSet(func=f, F=F, sigma_f=sigma_f, deltas=deltas, J=J, index=index)


def tensor_instance(g: GramSet, sigma_choice: str, k: int) -> TensorInstance:
    if k < 1:
        raise FunctionSpecError("k must be >= 1")
    if g.dim**k > TENSOR_DIM_CAP:
        raise FunctionSpecError(f"tensorized dimension {g.dim ** k} exceeds cap {TENSOR_DIM_CAP}")
    sigma = g.sigma(sigma_choice)
    sigma_k = matlin.kron_power(sigma, k)
    deltas = {
        (p, q): lifted_delta(g.deltas[q - 1], g.dim, p, k)
        for p in range(1, k + 1)
        for q in range(1, g.func.arity + 1)
    }
    return TensorInstance(k=k, sigma_k=sigma_k, deltas=deltas)


def lifted_delta(delta_q: np.ndarray, dim: int, p: int, k: int) -> np.ndarray:
    """J^{(x)p-1} (x) Delta_q (x) J^{(x)k-p}."""
    out = np.ones((dim ** (p - 1),) * 2)
    out = np.kron(out, delta_q)
    out = np.kron(out, np.ones((dim ** (k - p),) * 2))
    return out


def xor_power(f: FiniteFunction, k: int) -> FiniteFunction:
    """Parity composed with k independent copies of a boolean function."""
    if not f.is_boolean:
        raise FunctionSpecError("xor_power requires a boolean function")
    domain = []
    outputs = []
    for combo in itertools.product(f.domain, repeat=k):
        domain.append(tuple(s for t in combo for s in t))
        outputs.append(sum(f(t) for t in combo) % 2)
    return FiniteFunction(
        arity=f.arity * k,
        alphabet=f.alphabet,
        codomain=2,
        domain=tuple(domain),
        outputs=tuple(outputs),
        name=f"XOR^{k}({f.name})",
    )


def parity_phase_check(f: FiniteFunction, k: int, tol: float = 1e-12) -> bool:
    """Whether sigma_f of the k-fold XOR equals the k-th tensor power of
    sigma_f, entrywise, under matching lexicographic orderings."""
    if not f.is_boolean:
        raise FunctionSpecError("parity_phase_check requires a boolean function")
    g = build_gram_set(f)
    lhs = build_gram_set(xor_power(f, k)).sigma_f
    rhs = tensor_instance(g, "sigma_f", k).sigma_k
    # The XOR gram set sorts concatenated tuples lexicographically, which
    # matches the kron ordering of the sorted per-copy domain.
    return bool(np.abs(lhs - rhs).max() <= tol)


# ---- built-in functions and the function-spec file format ----

def _full_domain(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.product(range(d), repeat=n))


def _boolean(name: str, n: int, rule) -> FiniteFunction:
    dom = _full_domain(n, 2)
    return FiniteFunction(
        arity=n, alphabet=2, codomain=2, domain=dom,
        outputs=tuple(rule(t) for t in dom), name=f"{name}:{n}",
    )


def builtin(spec: str) -> FiniteFunction:
    """Resolve builtin names: OR:n, AND:n, PARITY:n, MAJ:n (odd), EQ:d,
    ID:n, CONST:n."""
    m = re.fullmatch(r"([A-Za-z]+):(\d+)", spec.strip())
    if not m:
        raise FunctionSpecError(f"bad builtin spec {spec!r}")
    name, n = m.group(1).upper(), int(m.group(2))
    if n < 1:
        raise FunctionSpecError(f"bad parameter in {spec!r}")
    if name == "OR":
        return _boolean("OR", n, lambda t: int(any(t)))
    if name == "AND":
        return _boolean("AND", n, lambda t: int(all(t)))
    if name == "PARITY":
        return _boolean("PARITY", n, lambda t: sum(t) % 2)
    if name == "MAJ":
        if n % 2 == 0:
            raise FunctionSpecError("MAJ requires odd arity")
        return _boolean("MAJ", n, lambda t: int(sum(t) > n // 2))
    if name == "CONST":
        return _boolean("CONST", n, lambda t: 0)
    if name == "ID":
        dom = _full_domain(n, 2)
        outs = tuple(int("".join(map(str, t)), 2) for t in dom)
        return FiniteFunction(
            arity=n, alphabet=2, codomain=2**n, domain=dom, outputs=outs, name=f"ID:{n}"
        )
    if name == "EQ":
        if n < 2:
            raise FunctionSpecError("EQ requires alphabet size >= 2")
        dom = _full_domain(2, n)
        return FiniteFunction(
            arity=2, alphabet=n, codomain=2, domain=dom,
            outputs=tuple(int(t[0] == t[1]) for t in dom), name=f"EQ:{n}",
        )
    raise FunctionSpecError(f"unknown builtin {name!r}")


def builtin_corpus(max_n: int = 2, boolean_only: bool = False) -> list[FiniteFunction]:
    """The named test corpus: every builtin family instantiated up to max_n."""
    funcs = [builtin("ID:1")]
    for n in range(1, max_n + 1):
        for fam in ("OR", "AND", "PARITY", "CONST"):
            funcs.append(builtin(f"{fam}:{n}"))
        if n % 2 == 1 and n > 1:
            funcs.append(builtin(f"MAJ:{n}"))
    if max_n >= 2 and not boolean_only:
        funcs.append(builtin("EQ:3"))
    seen, out = set(), []
    for f in funcs:
        if f.name not in seen:
            seen.add(f.name)
            out.append(f)
    return out


def parse_function_file(text: str, name: str = "file") -> FiniteFunction:
    """Parse the flat function-spec format::

        arity: 2
        alphabet: 2
        codomain: 2
        0 0 -> 0
        0 1 -> 1
        ...

    Input tuples may be space-separated or contiguous digits; '->' and a
    unicode arrow are both accepted.  Lines starting with '#' are ignored.
    """
    fields: dict[str, int] = {}
    rows: list[tuple[tuple[int, ...], int]] = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"(arity|alphabet|codomain)\s*[:=]\s*(\d+)", line)
        if m:
            fields[m.group(1)] = int(m.group(2))
            continue
        m = re.fullmatch(r"(.+?)\s*(?:->|→)\s*(\d+)", line)
        if m:
            toks = m.group(1).split()
            if len(toks) == 1 and len(toks[0]) > 1:
                toks = list(toks[0])
            try:
                rows.append((tuple(int(t) for t in toks), int(m.group(2))))
            except ValueError as e:
                raise FunctionSpecError(f"line {ln}: bad row {raw!r}") from e
            continue
        raise FunctionSpecError(f"line {ln}: cannot parse {raw!r}")
    for key in ("arity", "alphabet", "codomain"):
        if key not in fields:
            raise FunctionSpecError(f"missing field {key!r}")
    if not rows:
        raise FunctionSpecError("no rows")
    return FiniteFunction(
        arity=fields["arity"], alphabet=fields["alphabet"], codomain=fields["codomain"],
        domain=tuple(t for t, _ in rows), outputs=tuple(o for _, o in rows), name=name,
    )


def resolve_function(spec: str) -> FiniteFunction:
    """Resolve a builtin name first, then fall back to the filesystem."""
    try:
        return builtin(spec)
    except FunctionSpecError:
        pass
    from pathlib import Path

    path = Path(spec)
    if path.is_file():
        return parse_function_file(path.read_text(), name=path.stem)
    raise FunctionSpecError(f"{spec!r} is neither a builtin nor a readable file")
