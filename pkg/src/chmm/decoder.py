"""Constraint-pruned Viterbi decoding.

Decoding proceeds level by level over the observation. Every partial path is
summarized as a 5-part tuple (state, step index, log-probability, path,
constraint store); expansion extends paths only along positive-probability
edges whose updates the constraint checkers accept, and pruning keeps one
best tuple per (state, store) group. Equal stores behave identically forever,
so dropping the lower-probability member of a group can never discard the
optimum.

``constrained_viterbi`` runs the same computation with backpointers instead
of materialized paths, keyed by (level, state, store), so memory stays
proportional to the table instead of table x path length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .constraints import (
    ConstraintSpec,
    ConstraintStore,
    StateUpdate,
    check_constraints,
    declarative_satisfies,
    init_aggregate,
    validate_spec,
)
from .hmm import NEG_INF, Hmm, Run, run_log_probability, validate_model


@dataclass(frozen=True)
class Chmm:
    """An HMM together with its declared side-constraints."""

    hmm: Hmm
    constraints: tuple[ConstraintSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))


def validate_chmm(chmm: Chmm) -> list[str]:
    problems = validate_model(chmm.hmm)
    for i, spec in enumerate(chmm.constraints):
        problems.extend(f"constraint {i}: {p}" for p in validate_spec(spec))
    return problems


@dataclass(frozen=True)
class DecoderTuple:
    """One partial decode: where it is, what it scored, and its checker state."""

    state: str
    index: int
    log_prob: float
    path: tuple[str, ...]
    store: ConstraintStore


@dataclass
class DecodeStats:
    """Counters for benchmarking: accepted expansions, domination drops, and
    the largest number of table entries held at once."""

    expansions: int = 0
    prunes: int = 0
    peak_entries: int = 0

    def _note_entries(self, total: int) -> None:
        if total > self.peak_entries:
            self.peak_entries = total


def _require_valid(chmm: Chmm) -> None:
    problems = validate_chmm(chmm)
    if problems:
        raise ValueError("invalid model: " + "; ".join(problems))


def init_tuples(chmm: Chmm) -> set[DecoderTuple]:
    """The single starting tuple: initial state, empty path, fresh stores."""
    _require_valid(chmm)
    s0 = chmm.hmm.initial_state
    return {DecoderTuple(s0, 0, 0.0, (s0,), init_aggregate(chmm.constraints))}


def expand_step(
    chmm: Chmm, tuples: set[DecoderTuple], symbol: str
) -> set[DecoderTuple]:
    """Extend every tuple one step for the next observed symbol.

    A successor state survives only if both the transition and its emission
    of ``symbol`` are positive and every constraint checker accepts the
    update; all tuples must sit at the same step index.
    """
    hmm = chmm.hmm
    if symbol not in hmm.symbol_index:
        raise ValueError(f"unknown symbol {symbol!r}")
    indexes = {t.index for t in tuples}
    if len(indexes) > 1:
        raise ValueError(f"tuples span several step indexes: {sorted(indexes)}")
    e_ix = hmm.symbol_index[symbol]
    out: set[DecoderTuple] = set()
    for t in tuples:
        s_ix = hmm.state_index[t.state]
        row = hmm.transitions[s_ix]
        for j in range(1, len(hmm.states)):
            p_trans = row[j - 1]
            if p_trans <= 0.0:
                continue
            p_emit = hmm.emissions[j - 1][e_ix]
            if p_emit <= 0.0:
                continue
            nxt = hmm.states[j]
            store = check_constraints(
                chmm.constraints, StateUpdate(nxt, (symbol,)), t.store
            )
            if store is None:
                continue
            lp = t.log_prob + math.log(p_trans) + math.log(p_emit)
            out.add(DecoderTuple(nxt, t.index + 1, lp, t.path + (nxt,), store))
    return out


def prune_step(tuples: set[DecoderTuple]) -> set[DecoderTuple]:
    """Drop dominated tuples: among equal (state, store) groups keep the one
    of maximal log-probability, breaking ties toward the smallest path."""
    indexes = {t.index for t in tuples}
    if len(indexes) > 1:
        raise ValueError(f"tuples span several step indexes: {sorted(indexes)}")
    best: dict[tuple[str, ConstraintStore], DecoderTuple] = {}
    for t in tuples:
        key = (t.state, t.store)
        cur = best.get(key)
        if (
            cur is None
            or t.log_prob > cur.log_prob
            or (t.log_prob == cur.log_prob and t.path < cur.path)
        ):
            best[key] = t
    return set(best.values())


def best_tuple(tuples: set[DecoderTuple]) -> Optional[DecoderTuple]:
    """Maximum-log-probability tuple, ties toward the smallest path."""
    best: Optional[DecoderTuple] = None
    for t in tuples:
        if (
            best is None
            or t.log_prob > best.log_prob
            or (t.log_prob == best.log_prob and t.path < best.path)
        ):
            best = t
    return best


def constrained_viterbi(
    chmm: Chmm,
    observation: Sequence[str],
    *,
    prune: bool = True,
    stats: Optional[DecodeStats] = None,
) -> Optional[tuple[tuple[str, ...], float]]:
    """Most probable constraint-satisfying path for an observation.

    Returns ``(path, log_probability)`` or ``None`` when the constraints
    eliminate every positive-probability path; unsatisfiability is a result,
    not an error. With ``prune=False`` the search keeps every accepted tuple
    instead of merging (state, store) groups; this is only tractable on small
    instances and exists to measure what the pruning buys.
    """
    _require_valid(chmm)
    hmm = chmm.hmm
    specs = chmm.constraints
    try:
        obs = [hmm.symbol_index[e] for e in observation]
    except KeyError as exc:
        raise ValueError(f"unknown symbol {exc.args[0]!r}") from None
    names = hmm.states
    m = len(names) - 1
    trans_log = [
        [math.log(p) if p > 0.0 else None for p in row] for row in hmm.transitions
    ]
    emit_log = [
        [math.log(p) if p > 0.0 else None for p in row] for row in hmm.emissions
    ]
    start = init_aggregate(specs)

    if prune:
        return _decode_pruned(
            names, m, trans_log, emit_log, specs, start, obs, hmm.alphabet, stats
        )
    return _decode_unpruned(
        names, m, trans_log, emit_log, specs, start, obs, hmm.alphabet, stats
    )


def _decode_pruned(names, m, trans_log, emit_log, specs, start, obs, alphabet, stats):
    # Levels hold (log_prob, parent_key, rank) per (state index, store) key.
    # rank orders a level's entries by the lexicographic order of their
    # materialized paths, which makes tie-breaking O(1): candidate paths at
    # the next level compare as (parent rank, successor name).
    levels: list[dict] = [{(0, start): (0.0, None, 0)}]
    total = 1
    if stats:
        stats._note_entries(total)
    for e_ix in obs:
        symbol = alphabet[e_ix]
        cur = levels[-1]
        cand: dict = {}
        for key, (lp, _parent, rank) in cur.items():
            s_ix, store = key
            row = trans_log[s_ix]
            for j in range(1, m + 1):
                lt = row[j - 1]
                if lt is None:
                    continue
                le = emit_log[j - 1][e_ix]
                if le is None:
                    continue
                nstore = check_constraints(specs, StateUpdate(names[j], (symbol,)), store)
                if nstore is None:
                    continue
                if stats:
                    stats.expansions += 1
                nlp = lp + lt
                nlp += le
                nkey = (j, nstore)
                okey = (rank, names[j])
                old = cand.get(nkey)
                if old is None:
                    cand[nkey] = (nlp, key, okey)
                else:
                    if stats:
                        stats.prunes += 1
                    if nlp > old[0] or (nlp == old[0] and okey < old[2]):
                        cand[nkey] = (nlp, key, okey)
        if not cand:
            return None
        level: dict = {}
        ordered = sorted(cand.items(), key=lambda kv: kv[1][2])
        for rank, (nkey, (nlp, parent, _okey)) in enumerate(ordered):
            level[nkey] = (nlp, parent, rank)
        levels.append(level)
        total += len(level)
        if stats:
            stats._note_entries(total)

    final = levels[-1]
    best_key, best_lp = None, None
    for key, (lp, _parent, _rank) in final.items():  # iteration follows rank order
        if best_lp is None or lp > best_lp:
            best_key, best_lp = key, lp
    rev = []
    key = best_key
    for level in reversed(levels[1:]):
        rev.append(key[0])
        key = level[key][1]
    path = (names[0],) + tuple(names[j] for j in reversed(rev))
    return path, best_lp


def _decode_unpruned(names, m, trans_log, emit_log, specs, start, obs, alphabet, stats):
    # entries: (log_prob, parent index in previous level, state index, store)
    levels: list[list] = [[(0.0, -1, 0, start)]]
    total = 1
    if stats:
        stats._note_entries(total)
    for e_ix in obs:
        symbol = alphabet[e_ix]
        nxt = []
        for parent_ix, (lp, _p, s_ix, store) in enumerate(levels[-1]):
            row = trans_log[s_ix]
            for j in range(1, m + 1):
                lt = row[j - 1]
                if lt is None:
                    continue
                le = emit_log[j - 1][e_ix]
                if le is None:
                    continue
                nstore = check_constraints(specs, StateUpdate(names[j], (symbol,)), store)
                if nstore is None:
                    continue
                if stats:
                    stats.expansions += 1
                nlp = lp + lt
                nlp += le
                nxt.append((nlp, parent_ix, j, nstore))
        if not nxt:
            return None
        levels.append(nxt)
        total += len(nxt)
        if stats:
            stats._note_entries(total)

    best_ix, best_lp = None, None
    for i, (lp, _p, _j, _s) in enumerate(levels[-1]):
        if best_lp is None or lp > best_lp:
            best_ix, best_lp = i, lp
    rev = []
    ix = best_ix
    for level in reversed(levels[1:]):
        lp, parent_ix, j, _store = level[ix]
        rev.append(j)
        ix = parent_ix
    path = (names[0],) + tuple(names[j] for j in reversed(rev))
    return path, best_lp


def brute_force_constrained(
    chmm: Chmm, observation: Sequence[str]
) -> Optional[tuple[tuple[str, ...], float]]:
    """Exact reference decoder: enumerate every state sequence, keep those
    with positive probability whose full update history satisfies every
    constraint declaratively, and return the best.

    Independent of the incremental machinery on purpose; intended for small
    instances only (roughly states <= 5 and observations of length <= 10).
    """
    _require_valid(chmm)
    hmm = chmm.hmm
    specs = chmm.constraints
    for e in observation:
        if e not in hmm.symbol_index:
            raise ValueError(f"unknown symbol {e!r}")
    obs = tuple(observation)
    names = hmm.states
    m = len(names) - 1
    n = len(obs)
    best: Optional[tuple[tuple[str, ...], float]] = None

    def consider(path_states: tuple[str, ...]) -> None:
        nonlocal best
        run = Run((names[0],) + path_states, obs)
        lp = run_log_probability(hmm, run)
        if lp == NEG_INF:
            return
        history = [StateUpdate(s, (e,)) for s, e in zip(path_states, obs)]
        if not all(declarative_satisfies(spec, history) for spec in specs):
            return
        path = run.path
        if best is None or lp > best[1] or (lp == best[1] and path < best[0]):
            best = (path, lp)

    def walk(prefix: tuple[str, ...], depth: int) -> None:
        if depth == n:
            consider(prefix)
            return
        prev_ix = hmm.state_index[prefix[-1]] if prefix else 0
        e_ix = hmm.symbol_index[obs[depth]]
        for j in range(1, m + 1):
            if hmm.transitions[prev_ix][j - 1] <= 0.0:
                continue
            if hmm.emissions[j - 1][e_ix] <= 0.0:
                continue
            walk(prefix + (names[j],), depth + 1)

    walk((), 0)
    return best
