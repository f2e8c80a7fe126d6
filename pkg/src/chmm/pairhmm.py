"""Global pairwise alignment with a constrained pair HMM.

The model has four states: a silent begin state plus match, insert and
delete. Match consumes one symbol of each sequence and emits the pair;
insert consumes the next symbol of x, delete the next symbol of y. Gaps open
with probability ``gap_open`` (from begin or match) and extend with
``gap_extend``; direct insert<->delete transitions do not exist. There is no
end state: an alignment is complete exactly when both sequences are
consumed.

Constraint checking sees one update per alignment operation, carrying the
state name and the emitted symbol(s), so constraints can be written against
states, symbols or both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .constraints import (
    ConstraintSpec,
    StateUpdate,
    check_constraints,
    declarative_satisfies,
    init_aggregate,
    validate_spec,
)
from .decoder import DecodeStats
from .hmm import NEG_INF, ROW_SUM_TOL

PAIR_STATES = ("begin", "match", "insert", "delete")

# 20 standard amino acids plus selenocysteine.
AMINO_ACIDS = tuple("ACDEFGHIKLMNPQRSTUVWY")


@dataclass(frozen=True)
class PairHmmParams:
    """Transition and emission parameters of the pair HMM.

    ``match_emission[i][j]`` is the joint probability of emitting the pair
    (alphabet[i], alphabet[j]) from match; ``gap_emission[i]`` the probability
    of emitting alphabet[i] from insert or delete. The match row of the
    transition matrix is (1 - 2*gap_open, gap_open, gap_open) and is shared
    by begin; insert and delete rows are (1 - gap_extend, gap_extend, 0)
    toward (match, self, other gap state).
    """

    alphabet: tuple[str, ...]
    gap_open: float
    gap_extend: float
    match_emission: tuple[tuple[float, ...], ...]
    gap_emission: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(
            self,
            "match_emission",
            tuple(tuple(float(p) for p in row) for row in self.match_emission),
        )
        object.__setattr__(
            self, "gap_emission", tuple(float(p) for p in self.gap_emission)
        )


def uniform_pair_params(
    alphabet: Sequence[str] = AMINO_ACIDS,
    gap_open: float = 0.2,
    gap_extend: float = 0.2,
) -> PairHmmParams:
    """Permissive parameters: uniform pair and gap emissions, every factor
    positive. Handy as a defaults baseline and in fixtures."""
    k = len(alphabet)
    return PairHmmParams(
        alphabet=tuple(alphabet),
        gap_open=gap_open,
        gap_extend=gap_extend,
        match_emission=tuple(tuple(1.0 / (k * k) for _ in range(k)) for _ in range(k)),
        gap_emission=tuple(1.0 / k for _ in range(k)),
    )


def validate_pair_params(params: PairHmmParams) -> list[str]:
    problems: list[str] = []
    k = len(params.alphabet)
    if k == 0:
        problems.append("alphabet is empty")
    if len(set(params.alphabet)) != k:
        problems.append("alphabet contains duplicate symbols")
    if not 0.0 <= params.gap_open <= 1.0:
        problems.append(f"gap_open {params.gap_open!r} is outside [0, 1]")
    elif 2 * params.gap_open > 1.0:
        problems.append(
            f"gap_open {params.gap_open!r} makes the match row negative (2*gap_open > 1)"
        )
    if not 0.0 <= params.gap_extend <= 1.0:
        problems.append(f"gap_extend {params.gap_extend!r} is outside [0, 1]")
    if len(params.match_emission) != k or any(
        len(row) != k for row in params.match_emission
    ):
        problems.append(f"match emission table is not {k}x{k}")
    else:
        entries = [p for row in params.match_emission for p in row]
        if any(not 0.0 <= p <= 1.0 for p in entries):
            problems.append("match emission entries must lie in [0, 1]")
        total = math.fsum(entries)
        if abs(total - 1.0) > ROW_SUM_TOL:
            problems.append(f"match emission table sums to {total!r}, expected 1")
    if len(params.gap_emission) != k:
        problems.append(f"gap emission row has {len(params.gap_emission)} entries for {k} symbols")
    else:
        if any(not 0.0 <= p <= 1.0 for p in params.gap_emission):
            problems.append("gap emission entries must lie in [0, 1]")
        total = math.fsum(params.gap_emission)
        if abs(total - 1.0) > ROW_SUM_TOL:
            problems.append(f"gap emission row sums to {total!r}, expected 1")
    return problems


@dataclass(frozen=True)
class PairChmm:
    """A validated pair HMM plus its declared side-constraints."""

    params: PairHmmParams
    constraints: tuple[ConstraintSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @cached_property
    def transition_log(self) -> dict[tuple[str, str], float]:
        """Log-probabilities of the positive transitions only."""
        p = self.params
        rows = {
            "begin": (1.0 - 2 * p.gap_open, p.gap_open, p.gap_open),
            "match": (1.0 - 2 * p.gap_open, p.gap_open, p.gap_open),
            "insert": (1.0 - p.gap_extend, p.gap_extend, 0.0),
            "delete": (1.0 - p.gap_extend, 0.0, p.gap_extend),
        }
        out: dict[tuple[str, str], float] = {}
        for src, row in rows.items():
            for dst, prob in zip(("match", "insert", "delete"), row):
                if prob > 0.0:
                    out[(src, dst)] = math.log(prob)
        return out

    @cached_property
    def match_log(self) -> dict[tuple[str, str], float]:
        p = self.params
        out: dict[tuple[str, str], float] = {}
        for i, a in enumerate(p.alphabet):
            for j, b in enumerate(p.alphabet):
                q = p.match_emission[i][j]
                if q > 0.0:
                    out[(a, b)] = math.log(q)
        return out

    @cached_property
    def gap_log(self) -> dict[str, float]:
        p = self.params
        return {
            a: math.log(q) for a, q in zip(p.alphabet, p.gap_emission) if q > 0.0
        }


def build_pair_chmm(
    params: PairHmmParams, constraints: Sequence[ConstraintSpec] = ()
) -> PairChmm:
    """Validate parameters and constraints and assemble a decodable model."""
    problems = validate_pair_params(params)
    for i, spec in enumerate(constraints):
        problems.extend(f"constraint {i}: {p}" for p in validate_spec(spec))
    if problems:
        raise ValueError("invalid pair model: " + "; ".join(problems))
    return PairChmm(params, tuple(constraints))


@dataclass(frozen=True)
class Alignment:
    """A global alignment as a sequence of operations plus its score.

    Operations are ``("match", i, j)``, ``("insert", i)`` and
    ``("delete", j)`` with 1-based positions into x and y; together they must
    consume both sequences completely and in order.
    """

    ops: tuple[tuple, ...]
    log_prob: float

    @property
    def state_string(self) -> str:
        """Begin marker plus one letter per operation, e.g. ``"biimmd"``."""
        return "b" + "".join(op[0][0] for op in self.ops)


def ops_from_letters(letters: str) -> tuple[tuple, ...]:
    """Build an operation list from a state annotation such as
    ``"b i i m m d"`` or ``"biimmd"`` (the begin marker is optional)."""
    seq = letters.replace(" ", "")
    if seq.startswith("b"):
        seq = seq[1:]
    ops: list[tuple] = []
    i = j = 0
    for ch in seq:
        if ch == "m":
            i += 1
            j += 1
            ops.append(("match", i, j))
        elif ch == "i":
            i += 1
            ops.append(("insert", i))
        elif ch == "d":
            j += 1
            ops.append(("delete", j))
        else:
            raise ValueError(f"unknown alignment letter {ch!r}")
    return tuple(ops)


def _walk_ops(x: Sequence[str], y: Sequence[str], ops) -> list[StateUpdate]:
    """Check that ops consume x and y exactly, returning the update history."""
    i = j = 0
    history: list[StateUpdate] = []
    for op in ops:
        kind = op[0]
        if kind == "match":
            i += 1
            j += 1
            if op != ("match", i, j):
                raise ValueError(f"operation {op!r} out of order (expected {('match', i, j)!r})")
            if i > len(x) or j > len(y):
                raise ValueError(f"operation {op!r} consumes beyond the sequences")
            history.append(StateUpdate("match", (x[i - 1], y[j - 1])))
        elif kind == "insert":
            i += 1
            if op != ("insert", i):
                raise ValueError(f"operation {op!r} out of order (expected {('insert', i)!r})")
            if i > len(x):
                raise ValueError(f"operation {op!r} consumes beyond sequence x")
            history.append(StateUpdate("insert", (x[i - 1],)))
        elif kind == "delete":
            j += 1
            if op != ("delete", j):
                raise ValueError(f"operation {op!r} out of order (expected {('delete', j)!r})")
            if j > len(y):
                raise ValueError(f"operation {op!r} consumes beyond sequence y")
            history.append(StateUpdate("delete", (y[j - 1],)))
        else:
            raise ValueError(f"unknown alignment operation {op!r}")
    if i != len(x) or j != len(y):
        raise ValueError(
            f"alignment consumes {i} of {len(x)} x-symbols and {j} of {len(y)} y-symbols"
        )
    return history


def _check_symbols(model_alphabet, x, y) -> None:
    known = set(model_alphabet)
    for name, seq in (("x", x), ("y", y)):
        for sym in seq:
            if sym not in known:
                raise ValueError(f"unknown symbol {sym!r} in sequence {name}")


def alignment_log_probability(
    model: PairChmm, x: Sequence[str], y: Sequence[str], alignment: Alignment
) -> float:
    """Score an explicit alignment under the model.

    Returns -inf when any transition or emission factor is zero or the
    declared constraints reject the operation history; malformed alignments
    (wrong consumption or unknown symbols) raise instead.
    """
    _check_symbols(model.params.alphabet, x, y)
    history = _walk_ops(x, y, alignment.ops)
    total = 0.0
    prev = "begin"
    for update in history:
        lt = model.transition_log.get((prev, update.state))
        if lt is None:
            return NEG_INF
        if update.state == "match":
            le = model.match_log.get((update.emitted[0], update.emitted[1]))
        else:
            le = model.gap_log.get(update.emitted[0])
        if le is None:
            return NEG_INF
        total += lt
        total += le
        prev = update.state
    for spec in model.constraints:
        if not declarative_satisfies(spec, history):
            return NEG_INF
    return total


def align(
    model: PairChmm,
    x: Sequence[str],
    y: Sequence[str],
    *,
    stats: Optional[DecodeStats] = None,
) -> Optional[Alignment]:
    """Best constraint-satisfying global alignment of x and y, or ``None``.

    Dynamic program over lattice nodes (consumed x, consumed y, state,
    constraint store), processed along anti-diagonals; one best entry is kept
    per node. Ties keep the first candidate in a fixed match/insert/delete
    expansion order, so results are deterministic.
    """
    _check_symbols(model.params.alphabet, x, y)
    x = tuple(x)
    y = tuple(y)
    nx, ny = len(x), len(y)
    specs = model.constraints
    trans = model.transition_log
    mlog = model.match_log
    glog = model.gap_log

    # cells[(i, j)] maps (state, store) -> (log_prob, parent_key, op); a
    # parent key is ((i, j), state, store) in the predecessor cell.
    cells: dict = {(0, 0): {("begin", init_aggregate(specs)): (0.0, None, None)}}
    total_entries = 1
    if stats:
        stats._note_entries(total_entries)

    for t in range(1, nx + ny + 1):
        for i in range(max(0, t - ny), min(t, nx) + 1):
            j = t - i
            cell: dict = {}

            def feed(pred_cell_key, state, le, update, op):
                nonlocal total_entries
                pred = cells.get(pred_cell_key)
                if pred is None:
                    return
                for (pstate, pstore), (plp, _pk, _op) in pred.items():
                    lt = trans.get((pstate, state))
                    if lt is None:
                        continue
                    nstore = check_constraints(specs, update, pstore)
                    if nstore is None:
                        continue
                    if stats:
                        stats.expansions += 1
                    nlp = plp + lt
                    nlp += le
                    key = (state, nstore)
                    old = cell.get(key)
                    if old is None:
                        cell[key] = (nlp, (pred_cell_key, pstate, pstore), op)
                    else:
                        if stats:
                            stats.prunes += 1
                        if nlp > old[0]:
                            cell[key] = (nlp, (pred_cell_key, pstate, pstore), op)

            if i >= 1 and j >= 1:
                le = mlog.get((x[i - 1], y[j - 1]))
                if le is not None:
                    feed(
                        (i - 1, j - 1),
                        "match",
                        le,
                        StateUpdate("match", (x[i - 1], y[j - 1])),
                        ("match", i, j),
                    )
            if i >= 1:
                le = glog.get(x[i - 1])
                if le is not None:
                    feed(
                        (i - 1, j),
                        "insert",
                        le,
                        StateUpdate("insert", (x[i - 1],)),
                        ("insert", i),
                    )
            if j >= 1:
                le = glog.get(y[j - 1])
                if le is not None:
                    feed(
                        (i, j - 1),
                        "delete",
                        le,
                        StateUpdate("delete", (y[j - 1],)),
                        ("delete", j),
                    )
            if cell:
                cells[(i, j)] = cell
                total_entries += len(cell)
                if stats:
                    stats._note_entries(total_entries)

    final = cells.get((nx, ny))
    if final is None:
        return None
    best = None
    for entry in final.values():
        if best is None or entry[0] > best[0]:
            best = entry
    ops: list[tuple] = []
    entry = best
    while entry[1] is not None:
        ops.append(entry[2])
        pred_cell_key, pstate, pstore = entry[1]
        entry = cells[pred_cell_key][(pstate, pstore)]
    ops.reverse()
    return Alignment(tuple(ops), best[0])


def align_plain(
    params: PairHmmParams,
    x: Sequence[str],
    y: Sequence[str],
    *,
    stats: Optional[DecodeStats] = None,
) -> Optional[Alignment]:
    """Classical pair-HMM alignment with no constraint machinery at all.

    The benchmark baseline, and an independent reference for the
    empty-constraint case.
    """
    model = PairChmm(params, ())
    _check_symbols(params.alphabet, x, y)
    x = tuple(x)
    y = tuple(y)
    nx, ny = len(x), len(y)
    trans = model.transition_log
    mlog = model.match_log
    glog = model.gap_log

    cells: dict = {(0, 0): {"begin": (0.0, None, None)}}
    total_entries = 1
    if stats:
        stats._note_entries(total_entries)
    for t in range(1, nx + ny + 1):
        for i in range(max(0, t - ny), min(t, nx) + 1):
            j = t - i
            cell: dict = {}

            def feed(pred_cell_key, state, le, op):
                nonlocal total_entries
                pred = cells.get(pred_cell_key)
                if pred is None:
                    return
                for pstate, (plp, _pk, _op) in pred.items():
                    lt = trans.get((pstate, state))
                    if lt is None:
                        continue
                    if stats:
                        stats.expansions += 1
                    nlp = plp + lt
                    nlp += le
                    old = cell.get(state)
                    if old is None:
                        cell[state] = (nlp, (pred_cell_key, pstate), op)
                    else:
                        if stats:
                            stats.prunes += 1
                        if nlp > old[0]:
                            cell[state] = (nlp, (pred_cell_key, pstate), op)

            if i >= 1 and j >= 1:
                le = mlog.get((x[i - 1], y[j - 1]))
                if le is not None:
                    feed((i - 1, j - 1), "match", le, ("match", i, j))
            if i >= 1:
                le = glog.get(x[i - 1])
                if le is not None:
                    feed((i - 1, j), "insert", le, ("insert", i))
            if j >= 1:
                le = glog.get(y[j - 1])
                if le is not None:
                    feed((i, j - 1), "delete", le, ("delete", j))
            if cell:
                cells[(i, j)] = cell
                total_entries += len(cell)
                if stats:
                    stats._note_entries(total_entries)

    final = cells.get((nx, ny))
    if final is None:
        return None
    best = None
    for entry in final.values():
        if best is None or entry[0] > best[0]:
            best = entry
    ops: list[tuple] = []
    entry = best
    while entry[1] is not None:
        ops.append(entry[2])
        pred_cell_key, pstate = entry[1]
        entry = cells[pred_cell_key][pstate]
    ops.reverse()
    return Alignment(tuple(ops), best[0])


def brute_force_align(
    model: PairChmm, x: Sequence[str], y: Sequence[str]
) -> Optional[Alignment]:
    """Exact reference aligner: enumerate every monotone alignment, filter by
    positive probability and declarative constraint satisfaction, maximize.

    Intended for sequences of length <= 5 or so.
    """
    _check_symbols(model.params.alphabet, x, y)
    x = tuple(x)
    y = tuple(y)
    nx, ny = len(x), len(y)
    specs = model.constraints
    trans = model.transition_log
    mlog = model.match_log
    glog = model.gap_log
    best: Optional[Alignment] = None

    def leaf(ops: list[tuple], lp: float, history: list[StateUpdate]) -> None:
        nonlocal best
        if not all(declarative_satisfies(spec, history) for spec in specs):
            return
        if best is None or lp > best.log_prob:
            best = Alignment(tuple(ops), lp)

    def walk(i, j, prev, lp, ops, history):
        if i == nx and j == ny:
            leaf(ops, lp, history)
            return
        if i < nx and j < ny:
            lt = trans.get((prev, "match"))
            le = mlog.get((x[i], y[j]))
            if lt is not None and le is not None:
                nlp = lp + lt
                nlp += le
                ops.append(("match", i + 1, j + 1))
                history.append(StateUpdate("match", (x[i], y[j])))
                walk(i + 1, j + 1, "match", nlp, ops, history)
                ops.pop()
                history.pop()
        if i < nx:
            lt = trans.get((prev, "insert"))
            le = glog.get(x[i])
            if lt is not None and le is not None:
                nlp = lp + lt
                nlp += le
                ops.append(("insert", i + 1))
                history.append(StateUpdate("insert", (x[i],)))
                walk(i + 1, j, "insert", nlp, ops, history)
                ops.pop()
                history.pop()
        if j < ny:
            lt = trans.get((prev, "delete"))
            le = glog.get(y[j])
            if lt is not None and le is not None:
                nlp = lp + lt
                nlp += le
                ops.append(("delete", j + 1))
                history.append(StateUpdate("delete", (y[j],)))
                walk(i, j + 1, "delete", nlp, ops, history)
                ops.pop()
                history.pop()

    walk(0, 0, "begin", 0.0, [], [])
    return best


def gapped_strings(
    x: Sequence[str], y: Sequence[str], alignment: Alignment, gap: str = "-"
) -> tuple[str, str]:
    """Render the two sequences with gap characters for display."""
    sep = "" if all(len(s) == 1 for s in tuple(x) + tuple(y)) else " "
    row_x: list[str] = []
    row_y: list[str] = []
    for op in alignment.ops:
        if op[0] == "match":
            row_x.append(x[op[1] - 1])
            row_y.append(y[op[2] - 1])
        elif op[0] == "insert":
            row_x.append(x[op[1] - 1])
            row_y.append(gap)
        else:
            row_x.append(gap)
            row_y.append(y[op[1] - 1])
    return sep.join(row_x), sep.join(row_y)
