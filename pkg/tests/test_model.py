import json
import random

import pytest

from acqlab.model import (
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
    normalize_orientation,
    remove_violated,
)

from conftest import example1_instance

K = RelationKind


class TestConstraint:
    def test_symmetric_scope_canonicalized(self):
        assert Constraint(K.NEQ, (5, 2)).scope == (2, 5)
        assert Constraint(K.NEQ, (2, 5)) == Constraint(K.NEQ, (5, 2))
        assert Constraint(K.ABS_DIFF_GT_Y, (7, 1), (3,)).scope == (1, 7)

    def test_asymmetric_scope_kept(self):
        assert Constraint(K.GT, (5, 2)).scope == (5, 2)
        assert Constraint(K.GT, (5, 2)) != Constraint(K.GT, (2, 5))
        assert Constraint(K.DIFF_EQ_1, (3, 1)).scope == (3, 1)

    def test_quaternary_pairing_canonicalized(self):
        # pairs sort internally, then between themselves; pairing is preserved
        c = Constraint(K.ABS_DIFF_PAIR_NEQ, (9, 4, 3, 1))
        assert c.scope == (1, 3, 4, 9)
        assert Constraint(K.ABS_DIFF_PAIR_NEQ, (4, 9, 1, 3)) == c
        # a different pairing of the same four variables is a different constraint
        other = Constraint(K.ABS_DIFF_PAIR_NEQ, (4, 1, 9, 3))
        assert other.scope == (1, 4, 3, 9)
        assert other != c

    def test_invalid_constraints_rejected(self):
        with pytest.raises(ValueError):
            Constraint(K.NEQ, (1, 1))
        with pytest.raises(ValueError):
            Constraint(K.NEQ, (1, 2, 3))
        with pytest.raises(ValueError):
            Constraint(K.ABS_DIFF_GT_Y, (1, 2))  # missing parameter
        with pytest.raises(ValueError):
            Constraint(K.NEQ, (1, 2), (4,))  # unexpected parameter

    def test_relation_semantics(self):
        checks = [
            (Constraint(K.EQ, (0, 1)), (2, 2), True),
            (Constraint(K.EQ, (0, 1)), (2, 3), False),
            (Constraint(K.GT, (0, 1)), (3, 2), True),
            (Constraint(K.GEQ, (0, 1)), (2, 2), True),
            (Constraint(K.LEQ, (0, 1)), (3, 2), False),
            (Constraint(K.DIFF_EQ_1, (0, 1)), (3, 2), True),
            (Constraint(K.DIFF_EQ_1, (0, 1)), (2, 3), False),
            (Constraint(K.ABS_DIFF_EQ_1, (0, 1)), (2, 3), True),
            (Constraint(K.ABS_DIFF_GT_Y, (0, 1), (2,)), (1, 5), True),
            (Constraint(K.ABS_DIFF_GT_Y, (0, 1), (2,)), (1, 3), False),
            (Constraint(K.ABS_DIFF_EQ_Y, (0, 1), (4,)), (1, 5), True),
            (Constraint(K.FLOOR_DIST_GT_Y, (0, 1), (0,)), (0, 2), False),  # same day
            (Constraint(K.FLOOR_DIST_GT_Y, (0, 1), (0,)), (0, 3), True),
        ]
        for c, vals, expect in checks:
            assert c.check(vals) is expect, (c, vals)

    def test_normalize_orientation(self):
        kinds = [K.EQ, K.NEQ, K.GT, K.LT]
        assert normalize_orientation(Constraint(K.GT, (5, 2)), kinds) == Constraint(K.LT, (2, 5))
        assert normalize_orientation(Constraint(K.GT, (2, 5)), kinds) == Constraint(K.GT, (2, 5))
        # no mirror in the language: orientation kept
        assert normalize_orientation(Constraint(K.DIFF_EQ_1, (5, 2)), kinds) == Constraint(K.DIFF_EQ_1, (5, 2))


class TestEvaluate:
    def test_violated_undecided_satisfied(self):
        c = Constraint(K.NEQ, (0, 1))
        assert evaluate(c, Assignment({0: 1, 1: 1})) is Eval.VIOLATED
        assert evaluate(c, Assignment({0: 1})) is Eval.UNDECIDED
        assert evaluate(c, Assignment({0: 1, 1: 2})) is Eval.SATISFIED

    def test_quaternary_example(self):
        # |1-3| = |7-9| = 2 violates the pairwise-distinct distance relation
        c = Constraint(K.ABS_DIFF_PAIR_NEQ, (0, 1, 2, 3))
        assert evaluate(c, Assignment.complete([1, 3, 7, 9])) is Eval.VIOLATED
        assert evaluate(c, Assignment.complete([1, 3, 7, 10])) is Eval.SATISFIED
        assert evaluate(c, Assignment({0: 1, 1: 3, 2: 7})) is Eval.UNDECIDED

    def test_evaluate_is_pure(self):
        c = Constraint(K.NEQ, (0, 1))
        e = Assignment({0: 1, 1: 1})
        assert evaluate(c, e) is evaluate(c, e)
        assert dict(e.items()) == {0: 1, 1: 1}


class TestKappa:
    def test_running_example(self):
        inst = example1_instance()
        bias = inst.build_bias()
        assert len(bias) == 28
        e = Assignment.complete([1, 1, 1, 2, 3, 4, 5, 6])
        assert sorted(c.scope for c in kappa(bias, e)) == [(0, 1), (0, 2), (1, 2)]
        all_diff = Assignment.complete([1, 2, 3, 4, 5, 6, 7, 8])
        assert kappa(bias, all_diff) == []

    def test_matches_bruteforce_on_random_assignments(self):
        rng = random.Random(7)
        vocab = Vocabulary.uniform_range(6, 1, 4)
        language = [RelationSpec(k) for k in (K.EQ, K.NEQ, K.GT, K.LT)]
        bias = build_bias(vocab, language)
        for _ in range(50):
            chosen = rng.sample(range(6), rng.randint(1, 6))
            e = Assignment({v: rng.randint(1, 4) for v in chosen})
            brute = [c for c in bias if evaluate(c, e) is Eval.VIOLATED]
            assert set(kappa(bias, e)) == set(brute)

    def test_monotone_under_projection(self):
        # kappa over a projection is a subset of kappa over the original
        rng = random.Random(3)
        inst = example1_instance()
        bias = inst.build_bias()
        for _ in range(50):
            e = Assignment.complete([rng.randint(1, 8) for _ in range(8)])
            sub = rng.sample(range(8), rng.randint(1, 8))
            assert set(kappa(bias, e.project(sub))) <= set(kappa(bias, e))


class TestBias:
    def test_remove_violated(self):
        vocab = Vocabulary.uniform_range(2, 1, 2)
        bias = Bias([Constraint(K.NEQ, (0, 1))])
        assert remove_violated(bias, Assignment({0: 1, 1: 1})) == 1
        assert len(bias) == 0
        bias = Bias([Constraint(K.NEQ, (0, 1))])
        assert remove_violated(bias, Assignment({0: 1, 1: 2})) == 0
        assert len(bias) == 1

    def test_running_example_removal_count(self):
        inst = example1_instance()
        bias = inst.build_bias()
        e = Assignment.complete([1, 1, 1, 2, 3, 4, 5, 6])
        assert remove_violated(bias, e) == 3
        assert len(bias) == 25

    def test_indices_stay_consistent(self):
        inst = example1_instance()
        bias = inst.build_bias()
        bias.validate()
        e = Assignment.complete([1, 1, 1, 2, 3, 4, 5, 6])
        bias.remove_many(kappa(bias, e))
        bias.validate()
        assert bias.degree(0) == 5  # constraints with x1 and x2 dropped
        assert not bias.with_scope((0, 1))

    def test_no_duplicates(self):
        bias = Bias()
        assert bias.add(Constraint(K.NEQ, (0, 1)))
        assert not bias.add(Constraint(K.NEQ, (1, 0)))
        assert len(bias) == 1


class TestLearnedNetwork:
    def test_no_duplicates(self):
        net = LearnedNetwork()
        assert net.add(Constraint(K.NEQ, (0, 1)))
        assert not net.add(Constraint(K.NEQ, (1, 0)))
        assert len(net) == 1


class TestBuildBias:
    def test_basic_language_counts_once_per_pair(self):
        vocab = Vocabulary.uniform_range(5, 1, 5)
        language = [RelationSpec(k) for k in (K.EQ, K.NEQ, K.GT, K.LT)]
        bias = build_bias(vocab, language)
        assert len(bias) == 4 * 10

    def test_unmirrored_asymmetric_gets_both_orientations(self):
        vocab = Vocabulary.uniform_range(3, 1, 3)
        bias = build_bias(vocab, [RelationSpec(K.DIFF_EQ_1)])
        assert len(bias) == 6
        assert Constraint(K.DIFF_EQ_1, (0, 1)) in bias
        assert Constraint(K.DIFF_EQ_1, (1, 0)) in bias
        # with the mirror present, > keeps only ascending pairs
        bias2 = build_bias(vocab, [RelationSpec(K.GT), RelationSpec(K.LT)])
        assert len(bias2) == 6
        assert Constraint(K.GT, (0, 1)) in bias2
        assert Constraint(K.GT, (1, 0)) not in bias2

    def test_quaternary_one_canonical_pairing_per_subset(self):
        vocab = Vocabulary.uniform_range(5, 0, 10)
        bias = build_bias(vocab, [RelationSpec(K.ABS_DIFF_PAIR_NEQ)])
        assert len(bias) == 5  # C(5,4)


class TestVocabularyAndAssignment:
    def test_vocabulary_invariants(self):
        with pytest.raises(ValueError):
            Vocabulary([])
        with pytest.raises(ValueError):
            Vocabulary([[]])
        v = Vocabulary([[3, 1, 2, 2]])
        assert v.domain(0) == (1, 2, 3)

    def test_projection(self):
        e = Assignment.complete([5, 6, 7, 8])
        p = e.project([2, 0])
        assert p.variables == (0, 2)
        assert p[2] == 7
        assert e.render(4) == "{5,6,7,8}"
        assert p.render(4) == "{5,-,7,-}"

    def test_validation(self):
        vocab = Vocabulary.uniform_range(2, 1, 3)
        Assignment({0: 1, 1: 3}).validate_in(vocab)
        with pytest.raises(ValueError):
            Assignment({0: 9}).validate_in(vocab)
        with pytest.raises(ValueError):
            Assignment({5: 1}).validate_in(vocab)


class TestInstanceIO:
    def test_round_trip(self, tmp_path):
        inst = example1_instance()
        path = tmp_path / "inst.json"
        inst.dump(path)
        loaded = Instance.load(path)
        assert loaded.vocabulary == inst.vocabulary
        assert loaded.target == inst.target
        assert loaded.language == inst.language
        assert len(loaded.build_bias()) == 28

    def test_shared_range_domains(self, tmp_path):
        doc = {
            "name": "t", "variables": 3, "domains": {"min": 1, "max": 4},
            "language": [{"kind": "Neq"}],
            "target": [{"kind": "Neq", "scope": [0, 2]}],
        }
        inst = Instance.from_dict(doc)
        assert inst.vocabulary.domain(2) == (1, 2, 3, 4)

    def test_explicit_bias_respected(self):
        doc = {
            "name": "t", "variables": 3, "domains": {"min": 1, "max": 2},
            "language": [{"kind": "Neq"}],
            "target": [{"kind": "Neq", "scope": [0, 1]}],
            "bias": [{"kind": "Neq", "scope": [0, 1]}, {"kind": "Eq", "scope": [0, 1]}],
        }
        inst = Instance.from_dict(doc)
        assert len(inst.build_bias()) == 2

    def test_rejects_denormalized_target(self):
        doc = {
            "name": "t", "variables": 2, "domains": {"min": 1, "max": 2},
            "language": [{"kind": "Neq"}],
            "target": [{"kind": "Neq", "scope": [0, 1]}, {"kind": "Eq", "scope": [1, 0]}],
        }
        with pytest.raises(ValueError):
            Instance.from_dict(doc)

    def test_rejects_out_of_range_scope(self):
        doc = {
            "name": "t", "variables": 2, "domains": {"min": 1, "max": 2},
            "language": [{"kind": "Neq"}],
            "target": [{"kind": "Neq", "scope": [0, 5]}],
        }
        with pytest.raises(ValueError):
            Instance.from_dict(doc)
