import random

import pytest

from acqlab.model import (
    Assignment,
    Constraint,
    Instance,
    RelationKind,
    RelationSpec,
    Vocabulary,
)
from acqlab.solver import QGenMode, SearchConfig, ValHeuristic, VarHeuristic


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False,
        help="run the full-scale benchmark tests",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="full-scale run; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


NEQ = RelationKind.NEQ


def example1_instance() -> Instance:
    """The running example used throughout the suite: 8 variables, domains 1..8,
    target {x0!=x1, x0!=x2, x2!=x3}, language {!=}."""
    vocab = Vocabulary.uniform_range(8, 1, 8)
    target = [Constraint(NEQ, (0, 1)), Constraint(NEQ, (0, 2)), Constraint(NEQ, (2, 3))]
    return Instance(vocab, [RelationSpec(NEQ)], target, name="example1")


def generous_search(seed: int = 0, mode: QGenMode = QGenMode.MAX_COMPLETE,
                    var_h: VarHeuristic | None = None,
                    val_h: ValHeuristic = ValHeuristic.RANDOM) -> SearchConfig:
    """Budgets big enough that cutoffs never fire on toy instances."""
    if var_h is None:
        var_h = VarHeuristic.BDEG if mode is QGenMode.MAX_B_PARTIAL else VarHeuristic.DOM_WDEG
    return SearchConfig(
        var_heuristic=var_h, val_heuristic=val_h,
        cut_min=30.0, cut_max=60.0, rng_seed=seed, mode=mode,
    )


def random_binary_instance(rng: random.Random, n_vars=None, dom=None, n_target=None) -> Instance:
    """Random instance over the basic binary language with a disequality-free
    guarantee of satisfiability (constraints sampled to hold in a hidden
    assignment)."""
    n = n_vars or rng.randint(4, 8)
    d = dom or rng.randint(3, 6)
    vocab = Vocabulary.uniform_range(n, 1, d)
    hidden = [rng.randint(1, d) for _ in range(n)]
    kinds = [RelationKind.EQ, RelationKind.NEQ, RelationKind.GT, RelationKind.LT]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(pairs)
    want = n_target if n_target is not None else rng.randint(1, max(1, n - 1))
    target = []
    for (i, j) in pairs:
        if len(target) >= want:
            break
        holding = []
        a, b = hidden[i], hidden[j]
        if a == b:
            holding.append(Constraint(RelationKind.EQ, (i, j)))
        else:
            holding.append(Constraint(RelationKind.NEQ, (i, j)))
            holding.append(
                Constraint(RelationKind.GT, (i, j))
                if a > b
                else Constraint(RelationKind.LT, (i, j))
            )
        target.append(rng.choice(holding))
    language = [RelationSpec(k) for k in kinds]
    return Instance(vocab, language, target, name="random")
