"""Core data model: vocabulary, relations, constraints, bias, assignments.

Everything downstream (oracle, solver, acquisition) works in terms of the
types defined here.  Relations are evaluated by closed-form integer
predicates rather than extensional tables, so biases with tens of
thousands of candidate constraints stay cheap to build and query.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping, Sequence


class Eval(Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    UNDECIDED = "undecided"


class RelationKind(str, Enum):
    EQ = "Eq"
    NEQ = "Neq"
    GT = "Gt"
    LT = "Lt"
    GEQ = "Geq"
    LEQ = "Leq"
    DIFF_EQ_1 = "DiffEq1"            # x_i - x_j = 1
    ABS_DIFF_EQ_1 = "AbsDiffEq1"     # |x_i - x_j| = 1
    ABS_DIFF_GT_Y = "AbsDiffGtY"     # |x_i - x_j| > y
    ABS_DIFF_EQ_Y = "AbsDiffEqY"     # |x_i - x_j| = y
    FLOOR_DIST_GT_Y = "FloorDistGtY" # |floor(x_i/3) - floor(x_j/3)| > y
    ABS_DIFF_PAIR_EQ = "AbsDiffPairEq"    # |x_i - x_j| = |x_k - x_l|
    ABS_DIFF_PAIR_NEQ = "AbsDiffPairNeq"  # |x_i - x_j| != |x_k - x_l|


QUATERNARY_KINDS = frozenset(
    {RelationKind.ABS_DIFF_PAIR_EQ, RelationKind.ABS_DIFF_PAIR_NEQ}
)

# Scope order is irrelevant for these, so scopes are stored sorted ascending.
SYMMETRIC_KINDS = frozenset(
    {
        RelationKind.EQ,
        RelationKind.NEQ,
        RelationKind.ABS_DIFF_EQ_1,
        RelationKind.ABS_DIFF_GT_Y,
        RelationKind.ABS_DIFF_EQ_Y,
        RelationKind.FLOOR_DIST_GT_Y,
    }
)

PARAMETRIC_KINDS = frozenset(
    {
        RelationKind.ABS_DIFF_GT_Y,
        RelationKind.ABS_DIFF_EQ_Y,
        RelationKind.FLOOR_DIST_GT_Y,
    }
)

# Asymmetric relations whose reversed orientation is expressible by another
# kind in the same language (x_i > x_j  <=>  x_j < x_i).
MIRROR_KIND = {
    RelationKind.GT: RelationKind.LT,
    RelationKind.LT: RelationKind.GT,
    RelationKind.GEQ: RelationKind.LEQ,
    RelationKind.LEQ: RelationKind.GEQ,
}


def arity_of(kind: RelationKind) -> int:
    return 4 if kind in QUATERNARY_KINDS else 2


_PREDICATES: dict[tuple[RelationKind, tuple[int, ...]], Callable[..., bool]] = {}


def predicate(kind: RelationKind, params: tuple[int, ...] = ()) -> Callable[..., bool]:
    """Closed-form truth test for a relation; cached per (kind, params)."""
    key = (kind, params)
    fn = _PREDICATES.get(key)
    if fn is not None:
        return fn
    if kind is RelationKind.EQ:
        fn = lambda a, b: a == b
    elif kind is RelationKind.NEQ:
        fn = lambda a, b: a != b
    elif kind is RelationKind.GT:
        fn = lambda a, b: a > b
    elif kind is RelationKind.LT:
        fn = lambda a, b: a < b
    elif kind is RelationKind.GEQ:
        fn = lambda a, b: a >= b
    elif kind is RelationKind.LEQ:
        fn = lambda a, b: a <= b
    elif kind is RelationKind.DIFF_EQ_1:
        fn = lambda a, b: a - b == 1
    elif kind is RelationKind.ABS_DIFF_EQ_1:
        fn = lambda a, b: abs(a - b) == 1
    elif kind is RelationKind.ABS_DIFF_GT_Y:
        y = params[0]
        fn = lambda a, b: abs(a - b) > y
    elif kind is RelationKind.ABS_DIFF_EQ_Y:
        y = params[0]
        fn = lambda a, b: abs(a - b) == y
    elif kind is RelationKind.FLOOR_DIST_GT_Y:
        y = params[0]
        fn = lambda a, b: abs(a // 3 - b // 3) > y
    elif kind is RelationKind.ABS_DIFF_PAIR_EQ:
        fn = lambda a, b, c, d: abs(a - b) == abs(c - d)
    elif kind is RelationKind.ABS_DIFF_PAIR_NEQ:
        fn = lambda a, b, c, d: abs(a - b) != abs(c - d)
    else:  # pragma: no cover
        raise ValueError(f"unknown relation kind {kind!r}")
    _PREDICATES[key] = fn
    return fn


def _canonical_scope(kind: RelationKind, scope: tuple[int, ...]) -> tuple[int, ...]:
    if kind in SYMMETRIC_KINDS:
        return tuple(sorted(scope))
    if kind in QUATERNARY_KINDS:
        # Sort inside each distance pair, then order the two pairs; the
        # relation is invariant under both swaps.
        p = sorted(scope[:2])
        q = sorted(scope[2:])
        if q < p:
            p, q = q, p
        return (p[0], p[1], q[0], q[1])
    return scope


@dataclass(frozen=True)
class Constraint:
    """A relation instantiated on a scope of distinct variables."""

    kind: RelationKind
    scope: tuple[int, ...]
    params: tuple[int, ...] = ()

    def __post_init__(self):
        scope = tuple(self.scope)
        if len(scope) != arity_of(self.kind):
            raise ValueError(f"{self.kind.value} needs arity {arity_of(self.kind)}, got scope {scope}")
        if len(set(scope)) != len(scope):
            raise ValueError(f"scope variables must be distinct: {scope}")
        n_params = 1 if self.kind in PARAMETRIC_KINDS else 0
        if len(self.params) != n_params:
            raise ValueError(f"{self.kind.value} takes {n_params} parameter(s), got {self.params}")
        object.__setattr__(self, "scope", _canonical_scope(self.kind, scope))
        object.__setattr__(self, "params", tuple(self.params))

    @property
    def arity(self) -> int:
        return len(self.scope)

    @property
    def scope_set(self) -> frozenset[int]:
        return frozenset(self.scope)

    def check(self, values: Sequence[int]) -> bool:
        return predicate(self.kind, self.params)(*values)

    def describe(self) -> str:
        i, j = self.scope[0], self.scope[1]
        k = self.kind
        if k is RelationKind.EQ:
            return f"x{i} = x{j}"
        if k is RelationKind.NEQ:
            return f"x{i} != x{j}"
        if k is RelationKind.GT:
            return f"x{i} > x{j}"
        if k is RelationKind.LT:
            return f"x{i} < x{j}"
        if k is RelationKind.GEQ:
            return f"x{i} >= x{j}"
        if k is RelationKind.LEQ:
            return f"x{i} <= x{j}"
        if k is RelationKind.DIFF_EQ_1:
            return f"x{i} - x{j} = 1"
        if k is RelationKind.ABS_DIFF_EQ_1:
            return f"|x{i} - x{j}| = 1"
        if k is RelationKind.ABS_DIFF_GT_Y:
            return f"|x{i} - x{j}| > {self.params[0]}"
        if k is RelationKind.ABS_DIFF_EQ_Y:
            return f"|x{i} - x{j}| = {self.params[0]}"
        if k is RelationKind.FLOOR_DIST_GT_Y:
            return f"|x{i}//3 - x{j}//3| > {self.params[0]}"
        a, b, c, d = self.scope
        op = "=" if k is RelationKind.ABS_DIFF_PAIR_EQ else "!="
        return f"|x{a} - x{b}| {op} |x{c} - x{d}|"

    def __repr__(self) -> str:
        return f"Constraint({self.describe()})"


def normalize_orientation(c: Constraint, language_kinds: Iterable[RelationKind]) -> Constraint:
    """Rewrite an asymmetric binary constraint whose scope is descending into
    its mirror relation when the language contains that mirror, so that it
    matches the canonical bias instantiation (see build_bias)."""
    mirror = MIRROR_KIND.get(c.kind)
    if mirror is not None and mirror in set(language_kinds) and c.scope[0] > c.scope[1]:
        return Constraint(mirror, (c.scope[1], c.scope[0]), c.params)
    return c


class Vocabulary:
    """Variables 0..n-1, each with a finite ordered integer domain."""

    __slots__ = ("domains",)

    def __init__(self, domains: Sequence[Sequence[int]]):
        if len(domains) < 1:
            raise ValueError("vocabulary needs at least one variable")
        cleaned = []
        for i, dom in enumerate(domains):
            values = sorted(set(int(v) for v in dom))
            if not values:
                raise ValueError(f"domain of variable {i} is empty")
            cleaned.append(tuple(values))
        self.domains: tuple[tuple[int, ...], ...] = tuple(cleaned)

    @classmethod
    def uniform(cls, n: int, values: Sequence[int]) -> "Vocabulary":
        values = tuple(values)
        return cls([values] * n)

    @classmethod
    def uniform_range(cls, n: int, lo: int, hi: int) -> "Vocabulary":
        return cls.uniform(n, range(lo, hi + 1))

    @property
    def n_variables(self) -> int:
        return len(self.domains)

    @property
    def variables(self) -> range:
        return range(len(self.domains))

    def domain(self, var: int) -> tuple[int, ...]:
        return self.domains[var]

    def contains_constraint(self, c: Constraint) -> bool:
        return all(0 <= v < self.n_variables for v in c.scope)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.domains == other.domains

    def __repr__(self) -> str:
        return f"Vocabulary({self.n_variables} vars)"


class Assignment(Mapping[int, int]):
    """A partial map from variables to domain values (an example e_Y)."""

    __slots__ = ("_vals",)

    def __init__(self, bindings: Mapping[int, int] | Iterable[tuple[int, int]]):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        self._vals: dict[int, int] = dict(sorted((int(k), int(v)) for k, v in items))

    @classmethod
    def complete(cls, values: Sequence[int]) -> "Assignment":
        return cls(enumerate(values))

    @property
    def variables(self) -> tuple[int, ...]:
        """The assigned set Y."""
        return tuple(self._vals)

    @property
    def size(self) -> int:
        return len(self._vals)

    def project(self, variables: Iterable[int]) -> "Assignment":
        vals = self._vals
        return Assignment({v: vals[v] for v in variables})

    def validate_in(self, vocab: Vocabulary) -> None:
        for var, val in self._vals.items():
            if not 0 <= var < vocab.n_variables:
                raise ValueError(f"variable {var} out of range")
            if val not in vocab.domains[var]:
                raise ValueError(f"value {val} not in domain of variable {var}")

    def render(self, n_variables: int) -> str:
        cells = [str(self._vals[i]) if i in self._vals else "-" for i in range(n_variables)]
        return "{" + ",".join(cells) + "}"

    def __getitem__(self, var: int) -> int:
        return self._vals[var]

    def __iter__(self) -> Iterator[int]:
        return iter(self._vals)

    def __len__(self) -> int:
        return len(self._vals)

    def __repr__(self) -> str:
        return "Assignment(" + ", ".join(f"x{k}={v}" for k, v in self._vals.items()) + ")"


def evaluate(c: Constraint, e: Assignment) -> Eval:
    """Tri-state check of one constraint against a (partial) assignment."""
    vals = []
    get = e.get
    for var in c.scope:
        v = get(var)
        if v is None:
            return Eval.UNDECIDED
        vals.append(v)
    return Eval.SATISFIED if c.check(vals) else Eval.VIOLATED


class Bias:
    """The mutable candidate set B, indexed per variable and per scope set."""

    def __init__(self, constraints: Iterable[Constraint] = ()):
        self._members: dict[Constraint, None] = {}
        self._by_var: dict[int, dict[Constraint, None]] = {}
        self._by_scope: dict[frozenset[int], dict[Constraint, None]] = {}
        for c in constraints:
            self.add(c)

    def add(self, c: Constraint) -> bool:
        if c in self._members:
            return False
        self._members[c] = None
        for var in c.scope:
            self._by_var.setdefault(var, {})[c] = None
        self._by_scope.setdefault(c.scope_set, {})[c] = None
        return True

    def remove(self, c: Constraint) -> bool:
        if c not in self._members:
            return False
        del self._members[c]
        for var in c.scope:
            del self._by_var[var][c]
        del self._by_scope[c.scope_set][c]
        return True

    def remove_many(self, constraints: Iterable[Constraint]) -> int:
        return sum(1 for c in constraints if self.remove(c))

    def on_variable(self, var: int) -> tuple[Constraint, ...]:
        return tuple(self._by_var.get(var, ()))

    def degree(self, var: int) -> int:
        return len(self._by_var.get(var, ()))

    def with_scope(self, scope: Iterable[int]) -> tuple[Constraint, ...]:
        return tuple(self._by_scope.get(frozenset(scope), ()))

    def validate(self) -> None:
        """Consistency check between the member set and both indices."""
        from_var = {c for d in self._by_var.values() for c in d}
        from_scope = {c for d in self._by_scope.values() for c in d}
        members = set(self._members)
        if from_var != members or from_scope != members:
            raise AssertionError("bias indices out of sync with member set")
        for c in members:
            for var in c.scope:
                assert c in self._by_var[var]
            assert c in self._by_scope[c.scope_set]

    def copy(self) -> "Bias":
        return Bias(self._members)

    def __contains__(self, c: Constraint) -> bool:
        return c in self._members

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self._members)

    def __repr__(self) -> str:
        return f"Bias({len(self._members)} constraints)"


class LearnedNetwork:
    """The network C_L acquired so far; append-mostly, duplicate-free."""

    def __init__(self, constraints: Iterable[Constraint] = ()):
        self._members: dict[Constraint, None] = {}
        for c in constraints:
            self.add(c)

    def add(self, c: Constraint) -> bool:
        if c in self._members:
            return False
        self._members[c] = None
        return True

    @property
    def constraints(self) -> tuple[Constraint, ...]:
        return tuple(self._members)

    def copy(self) -> "LearnedNetwork":
        return LearnedNetwork(self._members)

    def __contains__(self, c: Constraint) -> bool:
        return c in self._members

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self._members)

    def __repr__(self) -> str:
        return f"LearnedNetwork({len(self._members)} constraints)"


def kappa(bias: Bias, e: Assignment) -> list[Constraint]:
    """kappa_B(e): the bias constraints rejecting e, in bias order.

    For partial assignments the per-variable index restricts the scan to
    constraints touching an assigned variable; anything whose scope is not
    fully inside the assigned set is skipped.
    """
    assigned = e.variables
    vals = e._vals
    out: list[Constraint] = []
    seen: set[Constraint] = set()
    for var in assigned:
        for c in bias.on_variable(var):
            if c in seen:
                continue
            seen.add(c)
            values = []
            ok = True
            for s in c.scope:
                v = vals.get(s)
                if v is None:
                    ok = False
                    break
                values.append(v)
            if ok and not c.check(values):
                out.append(c)
    return out


def remove_violated(bias: Bias, e: Assignment) -> int:
    """B <- B \\ kappa_B(e); returns how many constraints were dropped."""
    return bias.remove_many(kappa(bias, e))


@dataclass(frozen=True)
class RelationSpec:
    """One relation of the language Gamma."""

    kind: RelationKind
    params: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))


def build_bias(vocab: Vocabulary, language: Sequence[RelationSpec]) -> Bias:
    """All canonical instantiations of the language over matching-arity scopes.

    Symmetric relations are instantiated once per unordered pair.  An
    asymmetric relation is instantiated on ascending pairs only when its
    mirror (Gt/Lt, Geq/Leq) is also in the language, otherwise on both
    orientations so every expressible constraint stays learnable.
    Quaternary relations get one canonical pairing per sorted 4-subset.
    """
    n = vocab.n_variables
    kinds = {spec.kind for spec in language}
    binary = [s for s in language if arity_of(s.kind) == 2]
    quaternary = [s for s in language if arity_of(s.kind) == 4]
    bias = Bias()
    for i in range(n):
        for j in range(i + 1, n):
            for spec in binary:
                bias.add(Constraint(spec.kind, (i, j), spec.params))
                mirror = MIRROR_KIND.get(spec.kind)
                if spec.kind not in SYMMETRIC_KINDS and (mirror is None or mirror not in kinds):
                    bias.add(Constraint(spec.kind, (j, i), spec.params))
    if quaternary:
        for a in range(n):
            for b in range(a + 1, n):
                for c in range(b + 1, n):
                    for d in range(c + 1, n):
                        for spec in quaternary:
                            bias.add(Constraint(spec.kind, (a, b, c, d), spec.params))
    return bias


@dataclass
class Instance:
    """A problem instance: vocabulary, language, target network, optional
    explicit bias.  This is the unit consumed by benchmarks, the harness and
    the session service, and the schema of the instance file format."""

    vocabulary: Vocabulary
    language: list[RelationSpec]
    target: list[Constraint]
    bias_constraints: list[Constraint] | None = None
    name: str = ""

    def build_bias(self) -> Bias:
        if self.bias_constraints is not None:
            return Bias(self.bias_constraints)
        return build_bias(self.vocabulary, self.language)

    def validate(self) -> None:
        vocab = self.vocabulary
        for c in self.target:
            if not vocab.contains_constraint(c):
                raise ValueError(f"target constraint {c} out of vocabulary range")
        scopes = [c.scope_set for c in self.target]
        if len(set(scopes)) != len(scopes):
            raise ValueError("target network is not normalized (duplicate scope)")
        if self.bias_constraints is not None:
            for c in self.bias_constraints:
                if not vocab.contains_constraint(c):
                    raise ValueError(f"bias constraint {c} out of vocabulary range")

    def target_in_bias(self) -> bool:
        bias = self.build_bias()
        return all(c in bias for c in self.target)

    def to_dict(self) -> dict:
        doc: dict = {
            "name": self.name,
            "variables": self.vocabulary.n_variables,
            "domains": [list(d) for d in self.vocabulary.domains],
            "language": [
                {"kind": s.kind.value, "params": list(s.params)} for s in self.language
            ],
            "target": [_constraint_to_dict(c) for c in self.target],
        }
        if self.bias_constraints is not None:
            doc["bias"] = [_constraint_to_dict(c) for c in self.bias_constraints]
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Instance":
        n = int(doc["variables"])
        domains = doc["domains"]
        if isinstance(domains, Mapping):
            vocab = Vocabulary.uniform_range(n, int(domains["min"]), int(domains["max"]))
        else:
            if len(domains) != n:
                raise ValueError("domains list length must equal variable count")
            vocab = Vocabulary(domains)
        language = [
            RelationSpec(RelationKind(s["kind"]), tuple(s.get("params", ())))
            for s in doc.get("language", ())
        ]
        target = [_constraint_from_dict(d) for d in doc.get("target", ())]
        bias_list = None
        if "bias" in doc:
            bias_list = [_constraint_from_dict(d) for d in doc["bias"]]
        inst = cls(
            vocabulary=vocab,
            language=language,
            target=target,
            bias_constraints=bias_list,
            name=str(doc.get("name", "")),
        )
        inst.validate()
        return inst

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Instance":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _constraint_to_dict(c: Constraint) -> dict:
    d: dict = {"kind": c.kind.value, "scope": list(c.scope)}
    if c.params:
        d["params"] = list(c.params)
    return d


def _constraint_from_dict(d: Mapping) -> Constraint:
    return Constraint(
        RelationKind(d["kind"]), tuple(d["scope"]), tuple(d.get("params", ()))
    )
