"""acqlab: an interactive constraint-acquisition workbench.

Learns constraint networks from yes/no classifications of complete and
partial examples (QuAcq, MultiAcq, MQuAcq), generates queries with a
deadline-bounded MAX-CSP branch-and-bound, ships the benchmark families
used to evaluate these algorithms, and exposes a live session service so
a human can play the oracle.
"""

from .model import (
    Assignment,
    Bias,
    Constraint,
    Eval,
    Instance,
    LearnedNetwork,
    RelationKind,
    RelationSpec,
    Vocabulary,
    build_bias,
    evaluate,
    kappa,
    remove_violated,
)
from .oracle import Oracle, QueryLog, SimulatedOracle
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
from .acquisition import (
    AcquisitionConfig,
    AcquisitionOutcome,
    AcquisitionRun,
    Algorithm,
    FindScopeVariant,
    Metrics,
    Status,
    networks_equivalent,
    run,
)

__version__ = "0.1.0"
