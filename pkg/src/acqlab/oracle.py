"""The answering side of the acquisition protocol.

A SimulatedOracle classifies queries directly from the hidden target
network.  Any other answer source (a human behind the session service, a
scripted transcript) plugs in through the same Oracle base class, which
owns the query log and the waiting-time bookkeeping.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .model import Assignment, Constraint, Eval, evaluate


class OracleError(Exception):
    pass


class OracleAborted(OracleError):
    """The answer source went away (session abort or timeout)."""


@dataclass
class QueryRecord:
    size: int
    complete: bool
    answer: bool
    asked_at: float          # seconds since the log was started
    wait_time: float         # system time between previous answer and this ask
    answer_time: float       # time the answer source took (0 for simulated)
    origin: str = ""         # main / findscope / findc / findallscopes / findallcons
    variables: tuple[int, ...] = ()
    values: tuple[int, ...] = ()
    violated: int = -1       # |kappa_B(e)| at posting time, when the caller knows it


class QueryLog:
    """Ordered record of every query asked during one acquisition run."""

    def __init__(self):
        self.records: list[QueryRecord] = []
        self._t0 = time.monotonic()

    def restart_clock(self) -> None:
        self._t0 = time.monotonic()

    @property
    def start_time(self) -> float:
        return self._t0

    def append(self, record: QueryRecord) -> None:
        self.records.append(record)

    @property
    def total_queries(self) -> int:
        return len(self.records)

    def complete_queries(self, n_variables: int) -> int:
        return sum(1 for r in self.records if r.size == n_variables)

    @property
    def mean_size(self) -> float:
        if not self.records:
            return 0.0
        return sum(r.size for r in self.records) / len(self.records)

    @property
    def mean_wait(self) -> float:
        if not self.records:
            return 0.0
        return sum(r.wait_time for r in self.records) / len(self.records)

    @property
    def max_wait(self) -> float:
        return max((r.wait_time for r in self.records), default=0.0)

    @property
    def last_asked_at(self) -> float:
        return self.records[-1].asked_at if self.records else 0.0

    def size_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for r in self.records:
            hist[r.size] = hist.get(r.size, 0) + 1
        return dict(sorted(hist.items()))


class Oracle:
    """Base answer source: subclasses implement classify(e) -> bool.

    ask() records waiting time as the span between the previous answer being
    delivered and this query being dispatched, so a slow human answer never
    inflates the user-facing wait metrics.
    """

    def __init__(self, n_variables: int = 0):
        self.n_variables = n_variables
        self.log = QueryLog()
        self._last_done = time.monotonic()
        self._pending_origin = ""
        self._pending_violated = -1

    def begin_run(self, n_variables: int) -> None:
        self.n_variables = n_variables
        self.log.restart_clock()
        self._last_done = time.monotonic()

    def note(self, origin: str, violated: int = -1) -> None:
        """Attach metadata to the next ask (set by the acquisition loop)."""
        self._pending_origin = origin
        self._pending_violated = violated

    def classify(self, e: Assignment) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError

    def ask(self, e: Assignment) -> bool:
        if e.size == 0:
            raise ValueError("cannot ask an empty query")
        t_ask = time.monotonic()
        wait = t_ask - self._last_done
        answer = self.classify(e)
        t_done = time.monotonic()
        self._last_done = t_done
        self.log.append(
            QueryRecord(
                size=e.size,
                complete=(self.n_variables > 0 and e.size == self.n_variables),
                answer=answer,
                asked_at=t_ask - self.log.start_time,
                wait_time=wait,
                answer_time=t_done - t_ask,
                origin=self._pending_origin,
                variables=e.variables,
                values=tuple(e[v] for v in e.variables),
                violated=self._pending_violated,
            )
        )
        self._pending_origin = ""
        self._pending_violated = -1
        return answer


class SimulatedOracle(Oracle):
    """Answers from the hidden target network C_T: a query e_Y is positive
    iff no target constraint whose scope lies inside Y rejects it."""

    def __init__(self, target: Iterable[Constraint], n_variables: int = 0):
        super().__init__(n_variables)
        self.target: tuple[Constraint, ...] = tuple(target)

    def classify(self, e: Assignment) -> bool:
        for c in self.target:
            if evaluate(c, e) is Eval.VIOLATED:
                return False
        return True


class CallbackOracle(Oracle):
    """Wraps an arbitrary answer function (used for scripted tests)."""

    def __init__(self, fn: Callable[[Assignment], bool], n_variables: int = 0):
        super().__init__(n_variables)
        self._fn = fn

    def classify(self, e: Assignment) -> bool:
        return self._fn(e)


class TranscriptOracle(Oracle):
    """Replays a fixed sequence of answers; raises if the transcript runs dry."""

    def __init__(self, answers: Sequence[bool], n_variables: int = 0):
        super().__init__(n_variables)
        self._answers = list(answers)
        self._pos = 0

    def classify(self, e: Assignment) -> bool:
        if self._pos >= len(self._answers):
            raise OracleAborted("transcript exhausted")
        answer = self._answers[self._pos]
        self._pos += 1
        return answer
