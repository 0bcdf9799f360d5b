"""Constructors for the benchmark problems plus the parameterized families
used in the bias-size and scalability sweeps.

The logic-puzzle side constraints (Zebra, Murder, Purdey, Allergy) and the
greater-than Sudoku inequality edges live in JSON data files next to this
module; their counts are pinned by tests.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from typing import Callable, Sequence

from .model import (
    Constraint,
    Instance,
    RelationKind,
    RelationSpec,
    Vocabulary,
    normalize_orientation,
)

import random


class UnknownBenchmark(ValueError):
    pass


class InvalidParams(ValueError):
    pass


BASIC_LANGUAGE = [
    RelationSpec(RelationKind.EQ),
    RelationSpec(RelationKind.NEQ),
    RelationSpec(RelationKind.GT),
    RelationSpec(RelationKind.LT),
]

# Relation groups appended one by one for the bias-size sweep.
_SWEEP_EXTENSIONS: list[list[RelationSpec]] = [
    [RelationSpec(RelationKind.GEQ), RelationSpec(RelationKind.LEQ)],
    [RelationSpec(RelationKind.DIFF_EQ_1), RelationSpec(RelationKind.ABS_DIFF_EQ_1)],
    [RelationSpec(RelationKind.ABS_DIFF_GT_Y, (y,)) for y in (1, 2, 4, 8, 16)],
    [RelationSpec(RelationKind.ABS_DIFF_EQ_Y, (y,)) for y in (1, 2, 4, 8, 16)],
    [RelationSpec(RelationKind.FLOOR_DIST_GT_Y, (y,)) for y in (0, 1, 2, 3, 4)],
]


def extend_language(base: Sequence[RelationSpec], level: int) -> list[RelationSpec]:
    """Language for bias level `level`: 1 is the problem's own language,
    each higher level appends the next relation group of the sweep."""
    if level < 1 or level > 1 + len(_SWEEP_EXTENSIONS):
        raise InvalidParams(f"language level must be in 1..{1 + len(_SWEEP_EXTENSIONS)}")
    out = list(base)
    have = {(s.kind, s.params) for s in out}
    for group in _SWEEP_EXTENSIONS[: level - 1]:
        for spec in group:
            if (spec.kind, spec.params) not in have:
                out.append(spec)
                have.add((spec.kind, spec.params))
    return out


def _data(name: str) -> dict:
    text = resources.files("acqlab.data").joinpath(name).read_text()
    return json.loads(text)


def _neq_clique(variables: Sequence[int]) -> list[Constraint]:
    out = []
    for a in range(len(variables)):
        for b in range(a + 1, len(variables)):
            out.append(Constraint(RelationKind.NEQ, (variables[a], variables[b])))
    return out


def _puzzle_from_data(filename: str, language: list[RelationSpec]) -> Instance:
    doc = _data(filename)
    n = doc["variables"]
    dom = doc["domain"]
    vocab = Vocabulary.uniform_range(n, dom["min"], dom["max"])
    kinds = [s.kind for s in language]
    by_scope: dict[frozenset[int], Constraint] = {}
    for group in doc["groups"]:
        for c in _neq_clique(group):
            by_scope[c.scope_set] = c
    # A clue on a within-group pair replaces the plain disequality there
    # (e.g. "green is immediately right of ivory"), keeping one constraint
    # per scope.
    for clue in doc["clues"]:
        c = Constraint(
            RelationKind(clue["kind"]), tuple(clue["scope"]), tuple(clue.get("params", ()))
        )
        by_scope[c.scope_set] = normalize_orientation(c, kinds)
    return Instance(vocab, language, list(by_scope.values()), name=doc["name"])


def sudoku(box: int = 3) -> Instance:
    """box*box grid of box^2-ary cells: all-different rows, columns, boxes."""
    if box < 2:
        raise InvalidParams("box side must be >= 2")
    n = box * box
    cells = n * n
    vocab = Vocabulary.uniform_range(cells, 1, n)
    pairs: set[tuple[int, int]] = set()
    for r in range(n):
        for c1 in range(n):
            for c2 in range(c1 + 1, n):
                pairs.add((r * n + c1, r * n + c2))          # same row
                pairs.add((c1 * n + r, c2 * n + r))          # same column
    for br in range(box):
        for bc in range(box):
            cells_in_box = [
                (br * box + dr) * n + (bc * box + dc)
                for dr in range(box)
                for dc in range(box)
            ]
            for a in range(len(cells_in_box)):
                for b in range(a + 1, len(cells_in_box)):
                    i, j = cells_in_box[a], cells_in_box[b]
                    pairs.add((min(i, j), max(i, j)))
    target = [Constraint(RelationKind.NEQ, p) for p in sorted(pairs)]
    name = "sudoku" if box == 3 else f"sudoku{n}x{n}"
    return Instance(vocab, list(BASIC_LANGUAGE), target, name=name)


def gtsudoku(edges: Sequence[tuple[int, int]] | None = None) -> Instance:
    """Sudoku with greater-than edges between neighboring cells; each edge
    (i, j) means cell i > cell j and replaces the plain disequality on that
    pair so the target stays normalized."""
    base = sudoku(3)
    if edges is None:
        doc = _data("gtsudoku_edges.json")
        edges = [tuple(e) for e in doc["edges"]]
    by_scope = {c.scope_set: c for c in base.target}
    for i, j in edges:
        key = frozenset((i, j))
        if key not in by_scope:
            raise InvalidParams(f"edge ({i},{j}) does not join neighboring cells of one unit")
        by_scope[key] = normalize_orientation(
            Constraint(RelationKind.GT, (i, j)), [s.kind for s in BASIC_LANGUAGE]
        )
    target = [by_scope[c.scope_set] for c in base.target]
    return Instance(base.vocabulary, list(BASIC_LANGUAGE), target, name="gtsudoku")


def latin(n: int = 10) -> Instance:
    """n x n Latin square: all-different rows and columns."""
    if n < 2:
        raise InvalidParams("latin square order must be >= 2")
    vocab = Vocabulary.uniform_range(n * n, 1, n)
    target = []
    for r in range(n):
        for c1 in range(n):
            for c2 in range(c1 + 1, n):
                target.append(Constraint(RelationKind.NEQ, (r * n + c1, r * n + c2)))
    for c in range(n):
        for r1 in range(n):
            for r2 in range(r1 + 1, n):
                target.append(Constraint(RelationKind.NEQ, (r1 * n + c, r2 * n + c)))
    return Instance(vocab, list(BASIC_LANGUAGE), target, name=f"latin{n}")


def zebra() -> Instance:
    language = BASIC_LANGUAGE + [
        RelationSpec(RelationKind.DIFF_EQ_1),
        RelationSpec(RelationKind.ABS_DIFF_EQ_1),
    ]
    return _puzzle_from_data("zebra.json", language)


def murder() -> Instance:
    return _puzzle_from_data("murder.json", list(BASIC_LANGUAGE))


def purdey() -> Instance:
    return _puzzle_from_data("purdey.json", list(BASIC_LANGUAGE))


def allergy() -> Instance:
    return _puzzle_from_data("allergy.json", list(BASIC_LANGUAGE))


def golomb(marks: int = 12, length: int = 85) -> Instance:
    """Simplified Golomb ruler: only quaternary distinct-distance constraints
    in the target, one canonical pairing |x_a-x_b| != |x_c-x_d| per sorted
    4-subset {a<b<c<d}; overlapping-mark (ternary) cases are excluded."""
    if marks < 4:
        raise InvalidParams("golomb needs at least 4 marks")
    vocab = Vocabulary.uniform_range(marks, 0, length)
    target = []
    for a in range(marks):
        for b in range(a + 1, marks):
            for c in range(b + 1, marks):
                for d in range(c + 1, marks):
                    target.append(
                        Constraint(RelationKind.ABS_DIFF_PAIR_NEQ, (a, b, c, d))
                    )
    language = BASIC_LANGUAGE + [
        RelationSpec(RelationKind.ABS_DIFF_PAIR_EQ),
        RelationSpec(RelationKind.ABS_DIFF_PAIR_NEQ),
    ]
    return Instance(vocab, language, target, name=f"golomb{marks}")


def examtt(courses: int = 24, distance_values: Sequence[int] = (0, 1, 2, 3, 4)) -> Instance:
    """Exam timetabling: one exam room, 3 slots per day.  Courses of the same
    semester (consecutive triples) must fall on different days, every other
    pair just needs distinct slots."""
    if courses < 4:
        raise InvalidParams("examtt needs at least 4 courses")
    days = max(10, math.ceil(courses / 3) + 2)
    vocab = Vocabulary.uniform_range(courses, 0, days * 3 - 1)
    same_semester = set()
    for g in range(0, courses - 2, 3):
        for a in (0, 1, 2):
            for b in range(a + 1, 3):
                same_semester.add((g + a, g + b))
    target = []
    for i in range(courses):
        for j in range(i + 1, courses):
            if (i, j) in same_semester:
                target.append(Constraint(RelationKind.FLOOR_DIST_GT_Y, (i, j), (0,)))
            else:
                target.append(Constraint(RelationKind.NEQ, (i, j)))
    language = BASIC_LANGUAGE + [
        RelationSpec(RelationKind.FLOOR_DIST_GT_Y, (y,)) for y in distance_values
    ]
    return Instance(vocab, language, target, name=f"examtt{courses}")


_RLFAP_TARGET_SIZES = {40: 52, 45: 88, 50: 125, 55: 148, 60: 170}


def rlfap(
    n: int = 50,
    seed: int = 0,
    n_constraints: int | None = None,
    distance_values: Sequence[int] = (1, 2, 4, 8, 16),
) -> Instance:
    """Seeded stand-in for the simplified radio link frequency assignment
    instances: distance constraints over random pairs, all satisfied by a
    hidden assignment so the target stays satisfiable."""
    if n < 4:
        raise InvalidParams("rlfap needs at least 4 variables")
    if n_constraints is None:
        n_constraints = _RLFAP_TARGET_SIZES.get(n, round(52 + (n - 40) * 5.9))
    max_pairs = n * (n - 1) // 2
    if n_constraints > max_pairs:
        raise InvalidParams("more constraints requested than variable pairs")
    rng = random.Random(seed)
    vocab = Vocabulary.uniform_range(n, 1, 40)
    hidden = [rng.randint(1, 40) for _ in range(n)]
    values = sorted(distance_values)
    target: list[Constraint] = []
    used: set[frozenset[int]] = set()
    attempts = 0
    while len(target) < n_constraints:
        attempts += 1
        if attempts > 200000:  # pragma: no cover - would need adversarial params
            raise InvalidParams("could not place the requested constraint count")
        i, j = rng.sample(range(n), 2)
        key = frozenset((i, j))
        if key in used:
            continue
        d = abs(hidden[i] - hidden[j])
        options: list[Constraint] = []
        for y in values:
            if d > y:
                options.append(Constraint(RelationKind.ABS_DIFF_GT_Y, (i, j), (y,)))
            if d == y:
                options.append(Constraint(RelationKind.ABS_DIFF_EQ_Y, (i, j), (y,)))
        if not options:
            continue
        used.add(key)
        target.append(rng.choice(options))
    language = [
        RelationSpec(RelationKind.ABS_DIFF_GT_Y, (y,)) for y in values
    ] + [RelationSpec(RelationKind.ABS_DIFF_EQ_Y, (y,)) for y in values]
    return Instance(vocab, language, target, name=f"rlfap{n}")


_BUILDERS: dict[str, Callable[..., Instance]] = {
    "sudoku": sudoku,
    "gtsudoku": gtsudoku,
    "latin": latin,
    "zebra": zebra,
    "murder": murder,
    "purdey": purdey,
    "allergy": allergy,
    "golomb": golomb,
    "examtt": examtt,
    "rlfap": rlfap,
}


def names() -> list[str]:
    return sorted(_BUILDERS)


def build(name: str, language_level: int = 1, **params) -> Instance:
    """Construct a benchmark instance by name.  `language_level` > 1 widens
    the bias language for the sweep experiments."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownBenchmark(f"unknown benchmark {name!r}; choose from {names()}")
    try:
        inst = builder(**params)
    except TypeError as exc:
        raise InvalidParams(str(exc)) from None
    if language_level != 1:
        inst.language = extend_language(inst.language, language_level)
    inst.validate()
    return inst
