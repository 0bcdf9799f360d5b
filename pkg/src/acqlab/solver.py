"""Backtracking CSP solver and the deadline-bounded MAX-CSP query generator.

The same search engine backs four jobs: plain satisfiability (solve),
complete-example query generation maximizing bias violations (qgen, the
"max" objective), partial-example generation (qgen_partial, "max_B"), and
the small discriminating searches used while pinning down a relation.
Budgets are wall-clock; the engine polls a monotonic clock at every node.
"""

from __future__ import annotations

import random
import time
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

from .model import (
    Assignment,
    Constraint,
    QUATERNARY_KINDS,
    RelationKind,
    Vocabulary,
    predicate,
)


class VarHeuristic(Enum):
    DOM_WDEG = "domwdeg"
    BDEG = "bdeg"
    DOM = "dom"
    LEX = "lex"


class ValHeuristic(Enum):
    RANDOM = "random"
    LEX = "lex"
    MAX_V = "maxv"


class QGenMode(Enum):
    MAX_COMPLETE = "max"
    MAX_B_PARTIAL = "maxb"


class Implication(Enum):
    IMPLIED = "implied"
    NOT_IMPLIED = "not_implied"
    UNKNOWN = "unknown"


class BudgetExceeded(Exception):
    pass


@dataclass
class SearchConfig:
    var_heuristic: VarHeuristic = VarHeuristic.DOM_WDEG
    val_heuristic: ValHeuristic = ValHeuristic.RANDOM
    cut_min: float = 1.0
    cut_max: float = 5.0
    rng_seed: int = 0
    mode: QGenMode = QGenMode.MAX_COMPLETE

    def __post_init__(self):
        if not (0 < self.cut_min <= self.cut_max):
            raise ValueError("cutoffs must satisfy 0 < cut_min <= cut_max")


@dataclass
class QGenResult:
    example: Assignment | None
    violated_count: int
    hit_cut_min: bool = False
    hit_cut_max: bool = False
    proven_none: bool = False
    used_fallback: bool = False


class WdegState:
    """Constraint weights for dom/wdeg, bumped on each domain wipe-out.

    Weights persist across qgen calls inside one acquisition run and are
    reset whenever the learned network changes size.
    """

    def __init__(self):
        self.weights: dict[Constraint, int] = {}

    def weight(self, c: Constraint) -> int:
        return self.weights.get(c, 1)

    def bump(self, c: Constraint) -> None:
        self.weights[c] = self.weights.get(c, 1) + 1

    def reset(self) -> None:
        self.weights.clear()


class _Stop(Exception):
    def __init__(self, reason: str):
        self.reason = reason


# complements used so constraint negation stays in closed form where possible
_COMPLEMENT = {
    RelationKind.EQ: RelationKind.NEQ,
    RelationKind.NEQ: RelationKind.EQ,
    RelationKind.GT: RelationKind.LEQ,
    RelationKind.LEQ: RelationKind.GT,
    RelationKind.LT: RelationKind.GEQ,
    RelationKind.GEQ: RelationKind.LT,
    RelationKind.ABS_DIFF_PAIR_EQ: RelationKind.ABS_DIFF_PAIR_NEQ,
    RelationKind.ABS_DIFF_PAIR_NEQ: RelationKind.ABS_DIFF_PAIR_EQ,
}


def _as_pairs(constraints: Iterable) -> list[tuple[Constraint, bool]]:
    """Normalize hard-constraint input to (constraint, negated) pairs,
    folding negations into complement kinds when one exists."""
    out = []
    for item in constraints:
        c, neg = item if isinstance(item, tuple) else (item, False)
        if neg:
            comp = _COMPLEMENT.get(c.kind)
            if comp is not None:
                c = Constraint(comp, c.scope, c.params)
                neg = False
        out.append((c, neg))
    return out


class _BiasRecord:
    __slots__ = ("constraint", "scope", "pred", "n_unassigned", "state")

    def __init__(self, constraint: Constraint):
        self.constraint = constraint
        self.scope = constraint.scope
        self.pred = predicate(constraint.kind, constraint.params)
        self.n_unassigned = len(constraint.scope)
        self.state = 0  # 0 undecided, 1 satisfied, 2 violated, 3 dead


class _QuadHard:
    __slots__ = ("scope", "pred", "kind", "params", "constraint", "negated")

    def __init__(self, constraint: Constraint, negated: bool):
        self.constraint = constraint
        self.scope = constraint.scope
        self.kind = constraint.kind
        self.params = constraint.params
        base = predicate(constraint.kind, constraint.params)
        self.pred = (lambda *v: not base(*v)) if negated else base
        self.negated = negated


class SearchEngine:
    """One backtracking search over (a subset of) the vocabulary.

    Modes: find-one (first complete assignment, optional leaf filter),
    max-complete (branch and bound over complete solutions of the hard
    network maximizing bias violations) and max-partial (branch and bound
    over partial assignments consistent with the hard network).
    """

    MODE_ONE = "one"
    MODE_MAX = "max"
    MODE_PARTIAL = "partial"

    def __init__(
        self,
        vocab: Vocabulary,
        hard: Iterable,
        bias: Sequence[Constraint] = (),
        *,
        mode: str = MODE_ONE,
        config: SearchConfig | None = None,
        rng: random.Random | None = None,
        wdeg: WdegState | None = None,
        variables: Sequence[int] | None = None,
        leaf_accept: Callable[[list], bool] | None = None,
    ):
        self.vocab = vocab
        self.config = config or SearchConfig()
        self.rng = rng if rng is not None else random.Random(self.config.rng_seed)
        self.wdeg = wdeg if wdeg is not None else WdegState()
        self.mode = mode
        self.leaf_accept = leaf_accept
        self.search_vars = sorted(variables) if variables is not None else list(vocab.variables)
        self._in_search = set(self.search_vars)

        n = vocab.n_variables
        self.values: list[tuple[int, ...]] = [vocab.domains[i] for i in range(n)]
        self.index_of: list[dict[int, int]] = [
            {v: k for k, v in enumerate(vals)} for vals in self.values
        ]
        self.live: list[list[bool]] = [[True] * len(vals) for vals in self.values]
        self.live_count: list[int] = [len(vals) for vals in self.values]
        self.val: list[int] = [0] * n
        self.assigned: list[bool] = [False] * n
        self.skipped: list[bool] = [False] * n
        self.n_assigned = 0

        # hard constraints: binary adjacency for FC / backward checks
        self.fc_bin: list[list[tuple]] = [[] for _ in range(n)]
        self.back_bin: list[list[tuple]] = [[] for _ in range(n)]
        self.quad_by_var: list[list[_QuadHard]] = [[] for _ in range(n)]
        self.hard_list: list[tuple[Constraint, bool]] = []
        for c, neg in _as_pairs(hard):
            if any(v not in self._in_search for v in c.scope):
                continue
            self.hard_list.append((c, neg))
            if len(c.scope) == 2:
                i, j = c.scope
                p_second = _binary_pruner(c.kind, c.params, free_is_second=True, negated=neg)
                p_first = _binary_pruner(c.kind, c.params, free_is_second=False, negated=neg)
                base = predicate(c.kind, c.params)
                pred = (lambda a, b, _f=base: not _f(a, b)) if neg else base
                self.fc_bin[i].append((j, c, p_second))
                self.fc_bin[j].append((i, c, p_first))
                self.back_bin[i].append((j, pred, False))
                self.back_bin[j].append((i, pred, True))
            else:
                rec = _QuadHard(c, neg)
                for v in c.scope:
                    self.quad_by_var[v].append(rec)

        # bias records (soft side of the MAX-CSP view)
        self.bias_records: list[_BiasRecord] = [_BiasRecord(c) for c in bias]
        self.bias_by_var: list[list[_BiasRecord]] = [[] for _ in range(n)]
        for rec in self.bias_records:
            for v in rec.scope:
                self.bias_by_var[v].append(rec)
        self.active_total = len(self.bias_records)
        self.violated_now = 0
        self.excluded_now = 0  # decided-satisfied plus dead
        self.bdeg_count = [len(self.bias_by_var[i]) for i in range(n)]

        self.best_count = 0
        self.best_assignment: dict[int, int] | None = None

        self._trail: list[tuple[int, int]] = []          # pruned (var, idx)
        self._bias_trail: list[tuple[_BiasRecord, int]] = []  # (record, prior state) incl. count-only (-1)
        self.deadline_min: float | None = None
        self.deadline_max: float | None = None
        self.stop_reason: str | None = None
        self.nodes = 0

    # -- domain pruning primitives -------------------------------------

    def _prune_idx(self, x: int, idx: int) -> None:
        self.live[x][idx] = False
        self.live_count[x] -= 1
        self._trail.append((x, idx))

    def _keep_only(self, x: int, allowed: tuple[int, ...]) -> bool:
        keep = set()
        index = self.index_of[x]
        for v in allowed:
            idx = index.get(v)
            if idx is not None:
                keep.add(idx)
        live = self.live[x]
        for idx in range(len(live)):
            if live[idx] and idx not in keep:
                self._prune_idx(x, idx)
        return self.live_count[x] > 0

    def _prune_value(self, x: int, v: int) -> bool:
        idx = self.index_of[x].get(v)
        if idx is not None and self.live[x][idx]:
            self._prune_idx(x, idx)
        return self.live_count[x] > 0

    def _prune_range(self, x: int, lo: int, hi: int) -> bool:
        """Prune live values v with lo <= v <= hi."""
        vals = self.values[x]
        live = self.live[x]
        for idx in range(bisect_left(vals, lo), bisect_right(vals, hi)):
            if live[idx]:
                self._prune_idx(x, idx)
        return self.live_count[x] > 0

    def _prune_scan(self, x: int, keep_if: Callable[[int], bool]) -> bool:
        vals = self.values[x]
        live = self.live[x]
        for idx in range(len(vals)):
            if live[idx] and not keep_if(vals[idx]):
                self._prune_idx(x, idx)
        return self.live_count[x] > 0

    # -- heuristics ------------------------------------------------------

    def select_variable(self) -> int | None:
        """Next branching variable per the configured ordering; ties break
        toward the smallest index."""
        h = self.config.var_heuristic
        best_var = -1
        if h is VarHeuristic.LEX:
            for x in self.search_vars:
                if not self.assigned[x] and not self.skipped[x]:
                    return x
            return None
        if h is VarHeuristic.BDEG:
            best_score = -1
            for x in self.search_vars:
                if self.assigned[x] or self.skipped[x]:
                    continue
                s = self.bdeg_count[x]
                if s > best_score:
                    best_score = s
                    best_var = x
            return best_var if best_var >= 0 else None
        if h is VarHeuristic.DOM:
            best_score = None
            for x in self.search_vars:
                if self.assigned[x] or self.skipped[x]:
                    continue
                s = self.live_count[x]
                if best_score is None or s < best_score:
                    best_score = s
                    best_var = x
            return best_var if best_var >= 0 else None
        # dom/wdeg
        weights = self.wdeg.weights
        best_score = None
        for x in self.search_vars:
            if self.assigned[x] or self.skipped[x]:
                continue
            w = 0
            for (y, c, _p) in self.fc_bin[x]:
                if not self.assigned[y]:
                    w += weights.get(c, 1)
            for rec in self.quad_by_var[x]:
                if any(not self.assigned[s] and s != x for s in rec.scope):
                    w += weights.get(rec.constraint, 1)
            score = self.live_count[x] / w if w > 0 else float("inf")
            if best_score is None or score < best_score:
                best_score = score
                best_var = x
        return best_var if best_var >= 0 else None

    def order_values(self, x: int) -> list[int]:
        """Live values of x in the configured branching order."""
        vals = self.values[x]
        live = self.live[x]
        out = [vals[i] for i in range(len(vals)) if live[i]]
        h = self.config.val_heuristic
        if h is ValHeuristic.LEX:
            return out
        if h is ValHeuristic.RANDOM:
            self.rng.shuffle(out)
            return out
        # max_v: most conflicts against already-assigned variables, counted
        # over bias constraints whose only unassigned variable is x
        ready = [r for r in self.bias_by_var[x] if r.state == 0 and r.n_unassigned == 1]
        if not ready:
            return out
        val_arr = self.val
        scored = []
        for v in out:
            conflicts = 0
            for rec in ready:
                args = [v if s == x else val_arr[s] for s in rec.scope]
                if not rec.pred(*args):
                    conflicts += 1
            scored.append((-conflicts, v))
        scored.sort()
        return [v for (_neg, v) in scored]

    # -- assignment/backtracking ----------------------------------------

    def _assign(self, x: int, v: int) -> tuple[int, int]:
        mark = (len(self._trail), len(self._bias_trail))
        self.val[x] = v
        self.assigned[x] = True
        self.n_assigned += 1
        for rec in self.bias_by_var[x]:
            state = rec.state
            if state >= 3:
                continue
            rec.n_unassigned -= 1
            self._bias_trail.append((rec, -1))
            if rec.n_unassigned == 0 and state == 0:
                args = [self.val[s] for s in rec.scope]
                self._bias_trail.append((rec, 0))
                if rec.pred(*args):
                    rec.state = 1
                    self.excluded_now += 1
                else:
                    rec.state = 2
                    self.violated_now += 1
        return mark

    def _undo(self, x: int, mark: tuple[int, int]) -> None:
        t_mark, b_mark = mark
        while len(self._bias_trail) > b_mark:
            rec, prior = self._bias_trail.pop()
            if prior == -1:
                rec.n_unassigned += 1
            else:
                if rec.state == 1 or rec.state == 3:
                    self.excluded_now -= 1
                elif rec.state == 2:
                    self.violated_now -= 1
                rec.state = prior
        while len(self._trail) > t_mark:
            var, idx = self._trail.pop()
            self.live[var][idx] = True
            self.live_count[var] += 1
        self.assigned[x] = False
        self.n_assigned -= 1

    def _skip(self, x: int) -> tuple[int, int]:
        """Permanently exclude x in this subtree (partial mode only); bias
        constraints that still needed x can no longer be violated."""
        mark = (len(self._trail), len(self._bias_trail))
        self.skipped[x] = True
        for rec in self.bias_by_var[x]:
            if rec.state == 0:
                self._bias_trail.append((rec, 0))
                rec.state = 3
                self.excluded_now += 1
        return mark

    def _unskip(self, x: int, mark: tuple[int, int]) -> None:
        _t, b_mark = mark
        while len(self._bias_trail) > b_mark:
            rec, prior = self._bias_trail.pop()
            if prior == -1:
                rec.n_unassigned += 1
            else:
                if rec.state == 1 or rec.state == 3:
                    self.excluded_now -= 1
                elif rec.state == 2:
                    self.violated_now -= 1
                rec.state = prior
        self.skipped[x] = False

    def _forward_check(self, x: int) -> bool:
        """Forward checking from a fresh assignment of x: binary constraints
        always, quaternary ones once only a single scope variable is free."""
        a = self.val[x]
        for (y, c, pruner) in self.fc_bin[x]:
            if not self.assigned[y]:
                if not pruner(self, y, a):
                    self.wdeg.bump(c)
                    return False
        for rec in self.quad_by_var[x]:
            free = -1
            n_free = 0
            for s in rec.scope:
                if not self.assigned[s]:
                    free = s
                    n_free += 1
                    if n_free > 1:
                        break
            if n_free == 1:
                if not _quad_prune(self, rec, free):
                    self.wdeg.bump(rec.constraint)
                    return False
        return True

    def _backward_ok(self, x: int, v: int) -> bool:
        val_arr = self.val
        assigned = self.assigned
        for (y, pred, x_is_second) in self.back_bin[x]:
            if assigned[y]:
                ok = pred(val_arr[y], v) if x_is_second else pred(v, val_arr[y])
                if not ok:
                    return False
        for rec in self.quad_by_var[x]:
            args = []
            complete = True
            for s in rec.scope:
                if s == x:
                    args.append(v)
                elif assigned[s]:
                    args.append(val_arr[s])
                else:
                    complete = False
                    break
            if complete and not rec.pred(*args):
                return False
        return True

    # -- search ----------------------------------------------------------

    def _poll(self) -> None:
        self.nodes += 1
        now = time.monotonic()
        if self.deadline_max is not None and now >= self.deadline_max:
            raise _Stop("cutmax")
        if (
            self.deadline_min is not None
            and self.best_count >= 1
            and now >= self.deadline_min
        ):
            raise _Stop("cutmin")

    def _snapshot(self) -> None:
        self.best_count = self.violated_now
        self.best_assignment = {
            x: self.val[x] for x in self.search_vars if self.assigned[x]
        }

    def _search_one(self) -> bool:
        self._poll()
        if self.n_assigned == len(self.search_vars):
            if self.leaf_accept is None or self.leaf_accept(self.val):
                self.best_assignment = {x: self.val[x] for x in self.search_vars}
                return True
            return False
        x = self.select_variable()
        for v in self.order_values(x):
            mark = self._assign(x, v)
            if self._forward_check(x) and self._search_one():
                return True
            self._undo(x, mark)
        return False

    def _search_max(self) -> None:
        self._poll()
        if self.n_assigned == len(self.search_vars):
            if self.violated_now > self.best_count:
                self._snapshot()
            return
        x = self.select_variable()
        for v in self.order_values(x):
            mark = self._assign(x, v)
            ub = self.active_total - self.excluded_now
            if ub > self.best_count and self._forward_check(x):
                self._search_max()
            self._undo(x, mark)

    def _search_partial(self) -> None:
        self._poll()
        x = self.select_variable()
        if x is None:
            return
        for v in self.order_values(x):
            if not self._backward_ok(x, v):
                continue
            mark = self._assign(x, v)
            if self.violated_now > self.best_count:
                self._snapshot()
            if self.active_total - self.excluded_now > self.best_count:
                self._search_partial()
            self._undo(x, mark)
        mark = self._skip(x)
        if self.active_total - self.excluded_now > self.best_count:
            self._search_partial()
        self._unskip(x, mark)

    def run(self, *, budget_min: float | None = None, budget_max: float | None = None) -> str:
        """Run the search; returns 'exhausted', 'cutmin' or 'cutmax'."""
        now = time.monotonic()
        self.deadline_min = now + budget_min if budget_min is not None else None
        self.deadline_max = now + budget_max if budget_max is not None else None
        try:
            if self.mode == self.MODE_ONE:
                self._search_one()
            elif self.mode == self.MODE_MAX:
                self._search_max()
            else:
                self._search_partial()
        except _Stop as stop:
            self.stop_reason = stop.reason
            return stop.reason
        return "exhausted"


def _binary_pruner(kind: RelationKind, params: tuple, *, free_is_second: bool, negated: bool):
    """Domain pruner for a single binary constraint direction: given the
    value of one scope variable, drop unsupported values of the other."""
    if negated:
        base = predicate(kind, params)
        if free_is_second:
            return lambda eng, var, a: eng._prune_scan(var, lambda v: not base(a, v))
        return lambda eng, var, b: eng._prune_scan(var, lambda v: not base(v, b))
    if kind is RelationKind.EQ:
        return lambda eng, var, a: eng._keep_only(var, (a,))
    if kind is RelationKind.NEQ:
        return lambda eng, var, a: eng._prune_value(var, a)
    if kind is RelationKind.GT:
        if free_is_second:  # a > v  => keep v < a
            return lambda eng, var, a: eng._prune_range(var, a, _INF)
        return lambda eng, var, b: eng._prune_range(var, _NEG_INF, b)
    if kind is RelationKind.LT:
        if free_is_second:  # a < v
            return lambda eng, var, a: eng._prune_range(var, _NEG_INF, a)
        return lambda eng, var, b: eng._prune_range(var, b, _INF)
    if kind is RelationKind.GEQ:
        if free_is_second:  # a >= v
            return lambda eng, var, a: eng._prune_range(var, a + 1, _INF)
        return lambda eng, var, b: eng._prune_range(var, _NEG_INF, b - 1)
    if kind is RelationKind.LEQ:
        if free_is_second:
            return lambda eng, var, a: eng._prune_range(var, _NEG_INF, a - 1)
        return lambda eng, var, b: eng._prune_range(var, b + 1, _INF)
    if kind is RelationKind.DIFF_EQ_1:
        if free_is_second:  # a - v = 1
            return lambda eng, var, a: eng._keep_only(var, (a - 1,))
        return lambda eng, var, b: eng._keep_only(var, (b + 1,))
    if kind is RelationKind.ABS_DIFF_EQ_1:
        return lambda eng, var, a: eng._keep_only(var, (a - 1, a + 1))
    if kind is RelationKind.ABS_DIFF_GT_Y:
        y = params[0]
        return lambda eng, var, a: eng._prune_range(var, a - y, a + y)
    if kind is RelationKind.ABS_DIFF_EQ_Y:
        y = params[0]
        return lambda eng, var, a: eng._keep_only(var, (a - y, a + y))
    if kind is RelationKind.FLOOR_DIST_GT_Y:
        y = params[0]

        def prune(eng, var, a, _y=y):
            day = a // 3
            return eng._prune_range(var, (day - _y) * 3, (day + _y) * 3 + 2)

        return prune
    base = predicate(kind, params)  # pragma: no cover - future kinds
    if free_is_second:
        return lambda eng, var, a: eng._prune_scan(var, lambda v: base(a, v))
    return lambda eng, var, b: eng._prune_scan(var, lambda v: base(v, b))


_INF = 2**63 - 1
_NEG_INF = -(2**63)


def _quad_prune(eng: SearchEngine, rec: _QuadHard, free: int) -> bool:
    scope = rec.scope
    vals = eng.val
    if not rec.negated and rec.kind in QUATERNARY_KINDS:
        pos = scope.index(free)
        if pos < 2:
            partner = vals[scope[1 - pos]]
            dist = abs(vals[scope[2]] - vals[scope[3]])
        else:
            partner = vals[scope[5 - pos]]
            dist = abs(vals[scope[0]] - vals[scope[1]])
        if rec.kind is RelationKind.ABS_DIFF_PAIR_EQ:
            return eng._keep_only(free, (partner - dist, partner + dist))
        ok = eng._prune_value(free, partner - dist)
        if dist != 0:
            ok = eng._prune_value(free, partner + dist)
        return ok
    pred = rec.pred
    pos = scope.index(free)
    known = [vals[s] if s != free else None for s in scope]

    def keep(v: int) -> bool:
        known[pos] = v
        return pred(*known)

    return eng._prune_scan(free, keep)


def solve(
    vocab: Vocabulary,
    constraints: Iterable,
    config: SearchConfig | None = None,
    *,
    budget: float | None = None,
    rng: random.Random | None = None,
    wdeg: WdegState | None = None,
    variables: Sequence[int] | None = None,
    leaf_accept: Callable[[list], bool] | None = None,
) -> Assignment | None:
    """First complete assignment (over `variables`, default all) satisfying
    the constraints, or None when exhaustively proven unsatisfiable.

    Raises BudgetExceeded when the budget elapses with neither outcome.
    """
    engine = SearchEngine(
        vocab,
        constraints,
        mode=SearchEngine.MODE_ONE,
        config=config,
        rng=rng,
        wdeg=wdeg,
        variables=variables,
        leaf_accept=leaf_accept,
    )
    reason = engine.run(budget_max=budget)
    if engine.best_assignment is not None:
        return Assignment(engine.best_assignment)
    if reason == "exhausted":
        return None
    raise BudgetExceeded(f"solve stopped by {reason}")


def _fallback(vocab, hard, bias_list, config, rng, wdeg, partial: bool):
    """Per-constraint retry: look for an example violating one
    specific bias constraint at a time, each attempt budgeted by cut_max."""
    all_proven = True
    for c in bias_list:
        if partial:
            engine = SearchEngine(
                vocab,
                hard,
                [c],
                mode=SearchEngine.MODE_PARTIAL,
                config=_with_var(config, VarHeuristic.BDEG),
                rng=rng,
                wdeg=wdeg,
            )
            reason = engine.run(budget_max=config.cut_max)
            if engine.best_assignment is not None:
                example = Assignment(engine.best_assignment)
                return example, reason, all_proven
            if reason != "exhausted":
                all_proven = False
        else:
            try:
                sol = solve(
                    vocab,
                    list(hard) + [(c, True)],
                    config,
                    budget=config.cut_max,
                    rng=rng,
                    wdeg=wdeg,
                )
            except BudgetExceeded:
                all_proven = False
                continue
            if sol is not None:
                return sol, None, all_proven
    return None, None, all_proven


def _with_var(config: SearchConfig, var_h: VarHeuristic) -> SearchConfig:
    return SearchConfig(
        var_heuristic=var_h,
        val_heuristic=config.val_heuristic,
        cut_min=config.cut_min,
        cut_max=config.cut_max,
        rng_seed=config.rng_seed,
        mode=config.mode,
    )


def _count_violations(bias_list: Sequence[Constraint], e: Assignment) -> int:
    count = 0
    vals = dict(e.items())
    for c in bias_list:
        vs = []
        ok = True
        for s in c.scope:
            v = vals.get(s)
            if v is None:
                ok = False
                break
            vs.append(v)
        if ok and not c.check(vs):
            count += 1
    return count


def _qgen(vocab, hard, bias, config, rng, wdeg, mode) -> QGenResult:
    bias_list = list(bias)
    if not bias_list:
        return QGenResult(None, 0, proven_none=True)
    engine = SearchEngine(
        vocab,
        hard,
        bias_list,
        mode=mode,
        config=config,
        rng=rng,
        wdeg=wdeg,
    )
    reason = engine.run(budget_min=config.cut_min, budget_max=config.cut_max)
    hit_min = reason == "cutmin"
    hit_max = reason == "cutmax"
    if engine.best_assignment is not None:
        return QGenResult(
            Assignment(engine.best_assignment),
            engine.best_count,
            hit_cut_min=hit_min,
            hit_cut_max=hit_max,
        )
    if reason == "exhausted":
        return QGenResult(None, 0, proven_none=True)
    # cut_max with no usable example: per-constraint fallback
    example, _r, all_proven = _fallback(
        vocab, hard, bias_list, config, rng, wdeg, partial=(mode == SearchEngine.MODE_PARTIAL)
    )
    if example is not None:
        return QGenResult(
            example,
            _count_violations(bias_list, example),
            hit_cut_max=True,
            used_fallback=True,
        )
    return QGenResult(
        None, 0, hit_cut_max=True, proven_none=all_proven, used_fallback=True
    )


def qgen(
    vocab: Vocabulary,
    hard: Iterable,
    bias: Iterable[Constraint],
    config: SearchConfig,
    rng: random.Random | None = None,
    wdeg: WdegState | None = None,
) -> QGenResult:
    """Complete-example query generation (the "max" objective): branch and
    bound over solutions of the hard network maximizing bias violations."""
    rng = rng if rng is not None else random.Random(config.rng_seed)
    return _qgen(vocab, hard, bias, config, rng, wdeg, SearchEngine.MODE_MAX)


def qgen_partial(
    vocab: Vocabulary,
    hard: Iterable,
    bias: Iterable[Constraint],
    config: SearchConfig,
    rng: random.Random | None = None,
    wdeg: WdegState | None = None,
) -> QGenResult:
    """Partial-example query generation (the "max_B" objective): any node
    whose assignment is consistent with the hard network on fully-assigned
    scopes and violates at least one bias constraint is a candidate."""
    rng = rng if rng is not None else random.Random(config.rng_seed)
    return _qgen(vocab, hard, bias, config, rng, wdeg, SearchEngine.MODE_PARTIAL)


def is_implied(
    vocab: Vocabulary,
    constraints: Iterable[Constraint],
    c: Constraint,
    budget: float | None = None,
    config: SearchConfig | None = None,
) -> Implication:
    """Does the network entail c?  Decided by searching for a witness of
    (constraints and not-c); Unknown when the budget runs out first."""
    check_config = SearchConfig(
        var_heuristic=VarHeuristic.DOM_WDEG,
        val_heuristic=ValHeuristic.LEX,
        cut_min=(config.cut_min if config else 1.0),
        cut_max=(config.cut_max if config else 5.0),
    )
    try:
        witness = solve(
            vocab,
            list(constraints) + [(c, True)],
            check_config,
            budget=budget,
        )
    except BudgetExceeded:
        return Implication.UNKNOWN
    return Implication.IMPLIED if witness is None else Implication.NOT_IMPLIED


def gen_discriminating(
    vocab: Vocabulary,
    learned: Iterable[Constraint],
    delta: Sequence[Constraint],
    scope: Sequence[int],
    config: SearchConfig | None = None,
    budget: float | None = None,
    rng: random.Random | None = None,
) -> Assignment | None:
    """Assignment over exactly `scope` accepted by the learned network and
    violating at least one but not all of delta; None when none exists (or
    the budget runs out, which the caller treats the same way)."""
    delta = list(delta)
    if len(delta) < 2:
        return None
    scope_set = set(scope)
    hard = [c for c in learned if set(c.scope) <= scope_set]
    preds = [(c.scope, predicate(c.kind, c.params)) for c in delta]
    need = len(delta)

    def accept(val: list) -> bool:
        violated = 0
        for sc, pred in preds:
            if not pred(*(val[s] for s in sc)):
                violated += 1
        return 0 < violated < need

    try:
        return solve(
            vocab,
            hard,
            config,
            budget=budget,
            rng=rng,
            variables=sorted(scope_set),
            leaf_accept=accept,
        )
    except BudgetExceeded:
        return None
