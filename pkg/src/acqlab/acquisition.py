"""The acquisition algorithms: QuAcq, MultiAcq and MQuAcq, together with
the scope-location routines (FindScope, FindScope-2, FindAllScopes,
FindAllCons) and relation identification (FindC).

One AcquisitionRun owns all mutable state for a single interactive run:
the bias, the learned network, the scope-search rejection counter used by
FindScope-2, the collapse flag, dom/wdeg weights and the metrics.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .model import (
    Assignment,
    Constraint,
    Eval,
    Instance,
    LearnedNetwork,
    evaluate,
    kappa,
)
from .oracle import Oracle, OracleAborted
from .solver import (
    BudgetExceeded,
    Implication,
    QGenMode,
    QGenResult,
    SearchConfig,
    ValHeuristic,
    VarHeuristic,
    WdegState,
    gen_discriminating,
    is_implied,
    qgen,
    qgen_partial,
    solve,
)


class Algorithm(Enum):
    QUACQ = "quacq"
    MULTIACQ = "multiacq"
    MQUACQ = "mquacq"


class FindScopeVariant(Enum):
    V1 = 1
    V2 = 2


class Status(Enum):
    CONVERGED = "converged"
    PREMATURE_CONVERGENCE = "premature_convergence"
    COLLAPSE = "collapse"
    ABORTED = "aborted"


@dataclass
class AcquisitionConfig:
    algorithm: Algorithm = Algorithm.MQUACQ
    findscope_variant: FindScopeVariant = FindScopeVariant.V2
    search: SearchConfig = field(default_factory=SearchConfig)
    background: Sequence[Constraint] = ()
    # MultiAcq restart heuristic: cutoff inside FindAllScopes; first trigger
    # reruns the same example with reversed variable order, second moves on
    # to a fresh example with a shuffled order.
    multiacq_cutoff: float = 5.0


@dataclass
class Metrics:
    learned_size: int = 0
    total_queries: int = 0
    avg_query_size: float = 0.0
    complete_queries: int = 0
    avg_wait: float = 0.0
    max_wait: float = 0.0
    time_to_last_query: float = 0.0
    total_time: float = 0.0
    cut_min_hits: int = 0
    cut_max_hits: int = 0
    fallback_hits: int = 0

    def as_dict(self) -> dict:
        return {
            "learned_size": self.learned_size,
            "total_queries": self.total_queries,
            "avg_query_size": self.avg_query_size,
            "complete_queries": self.complete_queries,
            "avg_wait": self.avg_wait,
            "max_wait": self.max_wait,
            "time_to_last_query": self.time_to_last_query,
            "total_time": self.total_time,
            "cut_min_hits": self.cut_min_hits,
            "cut_max_hits": self.cut_max_hits,
            "fallback_hits": self.fallback_hits,
        }


@dataclass
class AcquisitionOutcome:
    status: Status
    learned: LearnedNetwork
    metrics: Metrics
    bias_remaining: int = 0


class Probe:
    """Optional instrumentation hooks; every callback is a no-op here."""

    def on_query(self, e: Assignment, answer: bool, origin: str) -> None:
        pass

    def on_scope(self, e: Assignment, scope: tuple[int, ...]) -> None:
        pass

    def on_learned(self, c: Constraint, n_queries: int, elapsed: float) -> None:
        pass


class AcquisitionRun:
    def __init__(
        self,
        instance: Instance,
        oracle: Oracle,
        config: AcquisitionConfig,
        probe: Probe | None = None,
    ):
        self.instance = instance
        self.vocab = instance.vocabulary
        self.oracle = oracle
        self.config = config
        self.probe = probe or Probe()
        self.rng = random.Random(config.search.rng_seed)
        self.bias = instance.build_bias()
        self.learned = LearnedNetwork()
        for c in config.background:
            self.learned.add(c)
            self.bias.remove(c)
        self.wdeg = WdegState()
        self.metrics = Metrics()
        self.collapse = False
        self.rej = 0  # FindScope-2 state: |kappa_B| at the last negative answer
        self._t0 = 0.0
        self._all_vars = list(self.vocab.variables)
        self._multiacq_order = list(self._all_vars)
        self._sat_witness: Assignment | None = None
        self._witnesses: list[Assignment] = []

    # -- shared plumbing --------------------------------------------------

    def _ask(self, e: Assignment, origin: str, violated: int = -1) -> bool:
        self.oracle.note(origin, violated)
        answer = self.oracle.ask(e)
        self.probe.on_query(e, answer, origin)
        if answer and e.size == self.vocab.n_variables:
            # a positive complete example satisfies everything the target
            # entails, so it certifies satisfiability of any future C_L
            self._sat_witness = e
        return answer

    def _learn(self, c: Constraint) -> None:
        self.learned.add(c)
        self.bias.remove(c)
        # C_L changed size: dom/wdeg weights restart from scratch
        self.wdeg.reset()
        self.probe.on_learned(
            c, self.oracle.log.total_queries, time.monotonic() - self._t0
        )

    def _cl_satisfiable(self) -> bool:
        # The learned network only grows, so any complete assignment still
        # satisfying it certifies satisfiability without a fresh solve.
        w = self._sat_witness
        if w is not None and all(
            evaluate(c, w) is Eval.SATISFIED for c in self.learned
        ):
            return True
        try:
            witness = solve(
                self.vocab,
                self.learned,
                self.config.search,
                budget=self.config.search.cut_max,
                wdeg=self.wdeg,
            )
        except BudgetExceeded:
            # cannot prove unsatisfiability in time; carry on optimistically
            return True
        self._sat_witness = witness
        if witness is not None:
            self._remember_witness(witness)
        return witness is not None

    def _remember_witness(self, e: Assignment) -> None:
        pool = self._witnesses
        if e not in pool:
            pool.insert(0, e)
            del pool[12:]

    def _implied_by_learned(self, c: Constraint) -> bool:
        """Does C_L entail this candidate?  Any complete assignment known to
        satisfy C_L while violating c settles it without a solver call, and
        a budget-exhausted solve conservatively counts as not implied."""
        learned_list = self.learned.constraints
        for w in self._witnesses:
            if evaluate(c, w) is Eval.VIOLATED and all(
                evaluate(lc, w) is Eval.SATISFIED for lc in learned_list
            ):
                return False
        cfg = self.config.search
        try:
            witness = solve(
                self.vocab,
                list(learned_list) + [(c, True)],
                SearchConfig(
                    var_heuristic=VarHeuristic.DOM_WDEG,
                    val_heuristic=ValHeuristic.LEX,
                    cut_min=cfg.cut_min,
                    cut_max=cfg.cut_max,
                ),
                budget=min(cfg.cut_max, 0.25),
            )
        except BudgetExceeded:
            return False
        if witness is None:
            return True
        self._remember_witness(witness)
        return False

    def _generate(self) -> QGenResult:
        cfg = self.config.search
        if cfg.mode is QGenMode.MAX_B_PARTIAL:
            result = qgen_partial(
                self.vocab, self.learned, self.bias, cfg, self.rng, self.wdeg
            )
        else:
            result = qgen(
                self.vocab, self.learned, self.bias, cfg, self.rng, self.wdeg
            )
        self.metrics.cut_min_hits += int(result.hit_cut_min)
        self.metrics.cut_max_hits += int(result.hit_cut_max)
        self.metrics.fallback_hits += int(result.used_fallback)
        return result

    def _kappa_live(
        self, cache: list[Constraint], var_set: set[int] | frozenset[int]
    ) -> list[Constraint]:
        """Filter a per-example kappa cache down to constraints still in the
        bias whose scope fits inside the given variable set.  Valid because
        the bias only ever shrinks while one example is being dissected."""
        bias = self.bias
        return [c for c in cache if set(c.scope) <= var_set and c in bias]

    # -- FindScope / FindScope-2 ------------------------------------------

    def find_scope(
        self,
        e: Assignment,
        R: list[int],
        Y: list[int],
        ask_query: bool,
        kap_cache: list[Constraint] | None = None,
    ) -> tuple[int, ...]:
        """Scope of one violated target constraint inside R+Y (FindScope or
        its query-sparing variant, per config)."""
        if kap_cache is None:
            kap_cache = kappa(self.bias, e)
        scope = self._find_scope_rec(e, list(R), list(Y), ask_query, kap_cache)
        scope = tuple(sorted(scope))
        self.probe.on_scope(e, scope)
        return scope

    def _find_scope_rec(
        self,
        e: Assignment,
        R: list[int],
        Y: list[int],
        ask_query: bool,
        kap_cache: list[Constraint],
    ) -> list[int]:
        v2 = self.config.findscope_variant is FindScopeVariant.V2
        if ask_query:
            kap_r = self._kappa_live(kap_cache, set(R))
            if not v2:
                if self._ask(e.project(R), "findscope", len(kap_r)):
                    self.bias.remove_many(kap_r)
                else:
                    return []
            else:
                # skip surely-positive (no violated candidate) and
                # surely-negative (same violation count as last "no") queries
                if kap_r:
                    if self.rej != len(kap_r):
                        if self._ask(e.project(R), "findscope", len(kap_r)):
                            self.bias.remove_many(kap_r)
                        else:
                            self.rej = len(kap_r)
                            return []
                    else:
                        return []
        if len(Y) == 1:
            return list(Y)
        half = (len(Y) + 1) // 2
        y1, y2 = Y[:half], Y[half:]
        s1 = self._find_scope_rec(e, R + y1, y2, True, kap_cache)
        s2 = self._find_scope_rec(e, R + s1, y1, bool(s1), kap_cache)
        return s1 + s2

    # -- FindC -------------------------------------------------------------

    def find_c(self, e: Assignment, scope: tuple[int, ...]) -> Constraint | None:
        """Identify the violated target relation on the located scope.

        Returns None when the candidate set empties, which the callers
        surface as a collapse.
        """
        cfg = self.config.search
        scope_set = frozenset(scope)
        learned_list = self.learned.constraints
        e_y = e.project(scope)
        violated0 = [
            c
            for c in self.bias.with_scope(scope_set)
            if evaluate(c, e_y) is Eval.VIOLATED
        ]
        if not violated0:
            return None
        if len(violated0) == 1:
            # With a single violated candidate the implication filter cannot
            # change the outcome: implied or not, this is what gets returned.
            return violated0[0]
        if e.size == self.vocab.n_variables:
            self._remember_witness(e)
        violated_implied = [c for c in violated0 if self._implied_by_learned(c)]
        if violated_implied:
            # The rejection here is already explained by the learned network
            # (the target is redundant on this scope).  Discriminating without
            # these candidates could pin a relation the hidden network does
            # not entail, so learn one of them directly: anything implied by
            # C_L is implied by the target as well.
            chosen = self.rng.choice(violated_implied)
            self.bias.remove_many([c for c in violated_implied if c is not chosen])
            return chosen
        delta = [c for c in violated0 if c in self.bias]
        if not delta:
            return None
        while True:
            e2 = gen_discriminating(
                self.vocab,
                self.learned,
                delta,
                scope,
                config=cfg,
                budget=cfg.cut_max,
                rng=self.rng,
            )
            if e2 is None:
                if not delta:
                    return None
                return self.rng.choice(delta)
            if self._ask(e2, "findc"):
                self.bias.remove_many(kappa(self.bias, e2))
                delta = [c for c in delta if evaluate(c, e2) is not Eval.VIOLATED]
            else:
                delta = [c for c in delta if evaluate(c, e2) is Eval.VIOLATED]

    # -- FindAllScopes (MultiAcq) -------------------------------------------

    def find_all_scopes(
        self,
        e: Assignment,
        Y: list[int],
        mses: list[tuple[int, ...]],
        deadline: float | None = None,
        kap_cache: list[Constraint] | None = None,
        top: bool = False,
    ) -> bool:
        if kap_cache is None:
            kap_cache = kappa(self.bias, e)
        y_set = frozenset(Y)
        if any(frozenset(m) == y_set for m in mses):
            return True
        kap = self._kappa_live(kap_cache, y_set)
        if not kap:
            return False
        if deadline is not None and mses and time.monotonic() >= deadline:
            raise _ScopeCutoff()
        if not any(frozenset(m) < y_set for m in mses):
            origin = "main" if top else "findallscopes"
            if self._ask(e.project(Y), origin, len(kap)):
                self.bias.remove_many(kap)
                return False
        flag = False
        for x in reversed(Y):
            rest = [y for y in Y if y != x]
            flag = self.find_all_scopes(e, rest, mses, deadline, kap_cache) or flag
        if not flag:
            mses.append(tuple(sorted(Y)))
            self.probe.on_scope(e, tuple(sorted(Y)))
        return True

    # -- FindAllCons (MQuAcq) -------------------------------------------------

    def find_all_cons(
        self,
        e: Assignment,
        Y: list[int],
        scopes: list[tuple[int, ...]],
        kap_cache: list[Constraint] | None = None,
        top: bool = False,
    ) -> list[tuple[int, ...]]:
        if kap_cache is None:
            kap_cache = kappa(self.bias, e)
        if self.collapse:
            return []
        kap = self._kappa_live(kap_cache, set(Y))
        scope_sets = {frozenset(s) for s in scopes}
        if not any(c.scope_set not in scope_sets for c in kap):
            return []
        nscopes: list[tuple[int, ...]] = []
        if scopes:
            s = scopes[0]  # FIFO: earliest-learned scope first
            rest = scopes[1:]
            for x in s:
                child_y = [y for y in Y if y != x]
                got = self.find_all_cons(e, child_y, rest + nscopes, kap_cache)
                nscopes.extend(got)
                if self.collapse:
                    return nscopes
        else:
            origin = "main" if top else "findallcons"
            if self._ask(e.project(Y), origin, len(kap)):
                self.bias.remove_many(kap)
            else:
                self.rej = len(kap)
                scope = self.find_scope(e, [], Y, False, kap_cache)
                c = self.find_c(e, scope)
                if c is None:
                    self.collapse = True
                    return []
                self._learn(c)
                nscopes.append(scope)
                nscopes.extend(self.find_all_cons(e, Y, list(nscopes), kap_cache))
        return nscopes

    # -- main loops -------------------------------------------------------

    def run(self) -> AcquisitionOutcome:
        self._t0 = time.monotonic()
        self.oracle.begin_run(self.vocab.n_variables)
        try:
            if self.config.algorithm is Algorithm.QUACQ:
                status = self._run_quacq()
            elif self.config.algorithm is Algorithm.MQUACQ:
                status = self._run_mquacq()
            else:
                status = self._run_multiacq()
        except OracleAborted:
            status = Status.ABORTED
        self._finish_metrics()
        return AcquisitionOutcome(
            status=status,
            learned=self.learned,
            metrics=self.metrics,
            bias_remaining=len(self.bias),
        )

    def _run_quacq(self) -> Status:
        while True:
            if not self._cl_satisfiable():
                return Status.COLLAPSE
            result = self._generate()
            if result.example is None:
                return Status.CONVERGED if result.proven_none else Status.PREMATURE_CONVERGENCE
            e = result.example
            if self._ask(e, "main", result.violated_count):
                self.bias.remove_many(kappa(self.bias, e))
            else:
                self.rej = result.violated_count
                scope = self.find_scope(e, [], list(e.variables), False)
                c = self.find_c(e, scope)
                if c is None:
                    return Status.COLLAPSE
                self._learn(c)

    def _run_mquacq(self) -> Status:
        while True:
            if not self._cl_satisfiable():
                return Status.COLLAPSE
            result = self._generate()
            if result.example is None:
                return Status.CONVERGED if result.proven_none else Status.PREMATURE_CONVERGENCE
            self.find_all_cons(
                result.example, list(result.example.variables), [], top=True
            )
            if self.collapse:
                return Status.COLLAPSE

    def _run_multiacq(self) -> Status:
        cutoff = self.config.multiacq_cutoff
        while True:
            if not self._cl_satisfiable():
                return Status.COLLAPSE
            result = self._generate()
            if result.example is None:
                return Status.CONVERGED if result.proven_none else Status.PREMATURE_CONVERGENCE
            e = result.example
            order = [x for x in self._multiacq_order if x in set(e.variables)]
            mses: list[tuple[int, ...]] = []
            try:
                self.find_all_scopes(e, order, mses, time.monotonic() + cutoff, top=True)
            except _ScopeCutoff:
                try:
                    self.find_all_scopes(
                        e, list(reversed(order)), mses, time.monotonic() + cutoff
                    )
                except _ScopeCutoff:
                    self.rng.shuffle(self._multiacq_order)
            for scope in mses:
                c = self.find_c(e, scope)
                if c is None:
                    return Status.COLLAPSE
                self._learn(c)

    def _finish_metrics(self) -> None:
        log = self.oracle.log
        m = self.metrics
        m.learned_size = len(self.learned)
        m.total_queries = log.total_queries
        m.avg_query_size = log.mean_size
        m.complete_queries = log.complete_queries(self.vocab.n_variables)
        m.avg_wait = log.mean_wait
        m.max_wait = log.max_wait
        m.time_to_last_query = log.last_asked_at
        m.total_time = time.monotonic() - self._t0


class _ScopeCutoff(Exception):
    pass


def run(
    instance: Instance,
    oracle: Oracle,
    config: AcquisitionConfig,
    probe: Probe | None = None,
) -> AcquisitionOutcome:
    """Run one acquisition session to a terminal state."""
    return AcquisitionRun(instance, oracle, config, probe).run()


def query_bound(
    n_target: int, n_vars: int, max_arity: int, n_relations: int, bias_size: int
) -> int:
    """Worst-case query budget: |C_T|*(2*a*ceil(log2 |X|) + |Gamma|) + |B|."""
    log_x = max(1, math.ceil(math.log2(max(2, n_vars))))
    return n_target * (2 * max_arity * log_x + n_relations) + bias_size


def networks_equivalent(
    vocab,
    left: Iterable[Constraint],
    right: Iterable[Constraint],
    budget: float = 5.0,
) -> bool:
    """Mutual entailment: every constraint of each network is implied by the
    other.  Unknown verdicts (budget exhaustion) count as failures."""
    left = list(left)
    right = list(right)
    for c in right:
        if is_implied(vocab, left, c, budget=budget) is not Implication.IMPLIED:
            return False
    for c in left:
        if is_implied(vocab, right, c, budget=budget) is not Implication.IMPLIED:
            return False
    return True
