import pytest

from acqlab import benchmarks
from acqlab.benchmarks import InvalidParams, UnknownBenchmark, extend_language
from acqlab.model import Constraint, Eval, RelationKind, evaluate
from acqlab.solver import SearchConfig, ValHeuristic, solve

K = RelationKind

# the counts the harness and tests pin exactly; zebra and examtt carry our
# documented actual bias counts where no convention reproduces the cited ones
PINNED = [
    ("sudoku", {}, 81, 810, 12960),
    ("latin", {"n": 10}, 100, 900, 19800),
    ("murder", {}, 20, 62, 760),
    ("purdey", {}, 12, 27, 264),
    ("allergy", {}, 12, 26, 264),
    ("golomb", {}, 12, 495, 1254),
    ("rlfap", {}, 50, 125, 12250),
    ("zebra", {}, 25, 62, 2100),
    ("examtt", {}, 24, 276, 2484),
    ("gtsudoku", {}, 81, 810, 12960),
]


class TestCounts:
    @pytest.mark.parametrize("name,params,nx,nt,nb", PINNED)
    def test_pinned_counts(self, name, params, nx, nt, nb):
        inst = benchmarks.build(name, **params)
        assert inst.vocabulary.n_variables == nx
        assert len(inst.target) == nt
        assert len(inst.build_bias()) == nb

    @pytest.mark.parametrize("name,params", [(n, p) for n, p, *_ in PINNED])
    def test_target_inside_bias(self, name, params):
        inst = benchmarks.build(name, **params)
        bias = inst.build_bias()
        assert all(c in bias for c in inst.target)

    @pytest.mark.parametrize("name,params", [(n, p) for n, p, *_ in PINNED])
    def test_normalized_and_duplicate_free(self, name, params):
        inst = benchmarks.build(name, **params)
        inst.validate()
        bias = inst.build_bias()
        assert len(set(bias)) == len(bias)

    def test_latin4_target_structure(self):
        inst = benchmarks.build("latin", n=4)
        assert len(inst.target) == 48  # 2 * n * C(n,2)
        for c in inst.target:
            assert c.kind is K.NEQ
            i, j = c.scope
            assert i // 4 == j // 4 or i % 4 == j % 4

    def test_domain_sizes(self):
        assert benchmarks.build("sudoku").vocabulary.domain(0) == tuple(range(1, 10))
        assert benchmarks.build("zebra").vocabulary.domain(13) == (1, 2, 3, 4, 5)
        assert len(benchmarks.build("rlfap").vocabulary.domain(0)) == 40
        assert len(benchmarks.build("examtt").vocabulary.domain(0)) == 30


class TestSatisfiability:
    @pytest.mark.parametrize(
        "name,params",
        [("zebra", {}), ("murder", {}), ("purdey", {}), ("allergy", {}),
         ("examtt", {}), ("rlfap", {}), ("latin", {"n": 6}), ("sudoku", {"box": 2})],
    )
    def test_targets_satisfiable(self, name, params):
        inst = benchmarks.build(name, **params)
        cfg = SearchConfig(cut_min=30, cut_max=60, val_heuristic=ValHeuristic.LEX)
        sol = solve(inst.vocabulary, inst.target, cfg, budget=30)
        assert sol is not None
        assert all(evaluate(c, sol) is Eval.SATISFIED for c in inst.target)


class TestFamilies:
    def test_scalability_ranges(self):
        assert len(benchmarks.build("latin", n=6).target) == 180
        assert len(benchmarks.build("latin", n=12).target) == 1584
        assert len(benchmarks.build("examtt", courses=24).target) == 276
        assert len(benchmarks.build("examtt", courses=54).target) == 1431
        assert len(benchmarks.build("rlfap", n=40).target) == 52
        assert len(benchmarks.build("rlfap", n=60).target) == 170

    def test_language_levels_grow_bias(self):
        sizes = [
            len(benchmarks.build("latin", n=5, language_level=lvl).build_bias())
            for lvl in (1, 2, 3, 4)
        ]
        assert sizes == sorted(sizes)
        assert sizes[0] < sizes[-1]
        # target still representable at every level
        inst = benchmarks.build("latin", n=5, language_level=4)
        bias = inst.build_bias()
        assert all(c in bias for c in inst.target)

    def test_extend_language_bounds(self):
        with pytest.raises(InvalidParams):
            extend_language([], 0)
        with pytest.raises(InvalidParams):
            extend_language([], 99)

    def test_rlfap_seeded_and_deterministic(self):
        a = benchmarks.build("rlfap", seed=3)
        b = benchmarks.build("rlfap", seed=3)
        c = benchmarks.build("rlfap", seed=4)
        assert a.target == b.target
        assert a.target != c.target

    def test_gtsudoku_replaces_pairs(self):
        inst = benchmarks.build("gtsudoku")
        kinds = {c.kind for c in inst.target}
        assert K.GT in kinds or K.LT in kinds
        n_ineq = sum(1 for c in inst.target if c.kind is not K.NEQ)
        assert n_ineq == 36
        base = benchmarks.build("sudoku")
        assert {c.scope_set for c in inst.target} == {c.scope_set for c in base.target}

    def test_gtsudoku_rejects_non_unit_edges(self):
        with pytest.raises(InvalidParams):
            benchmarks.build("gtsudoku", edges=[(0, 80)])

    def test_golomb_canonical_pairing_only(self):
        inst = benchmarks.build("golomb", marks=5)
        assert len(inst.target) == 5
        for c in inst.target:
            a, b, cc, d = c.scope
            assert a < b < cc < d

    def test_errors(self):
        with pytest.raises(UnknownBenchmark):
            benchmarks.build("nonesuch")
        with pytest.raises(InvalidParams):
            benchmarks.build("latin", n=1)
        with pytest.raises(InvalidParams):
            benchmarks.build("latin", bogus=3)

    def test_export_import_round_trip(self, tmp_path):
        from acqlab.model import Instance

        inst = benchmarks.build("purdey")
        path = tmp_path / "purdey.json"
        inst.dump(path)
        loaded = Instance.load(path)
        assert loaded.target == inst.target
        assert len(loaded.build_bias()) == 264
