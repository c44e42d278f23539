"""Brute-force ground truth for small instances.

Everything here works from the definition of popularity (head-to-head vote
between two matchings), over all matchings of the instance including those
that leave agents unmatched.  Nothing in this module uses the structural
characterisation of popular matchings.

Only maximal matchings are enumerated, and only Pareto-optimal rank vectors
are used as challengers.  Both restrictions are exact: a popular matching is
Pareto-optimal (hence maximal), and any challenger that beats a matching is
weakly dominated by a Pareto-optimal one that beats it too.

Counting popular matchings is #P-complete once ties are allowed (already
for 3-regular bipartite graphs with every edge rank 1), so there is no
polynomial counter to fall back on; the size guard keeps enumeration in
desk range.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .model import ContractError, Instance, Matching

MAX_AGENTS = 8
MAX_POSTS = 10
MAX_MATCHINGS = 250_000


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class ComparisonResult:
    prefer_first: int
    prefer_second: int

    @property
    def delta(self) -> int:
        return self.prefer_first - self.prefer_second


def _base(inst: Instance) -> Instance:
    return inst.base()


def _to_base(inst: Instance, m: Matching) -> Matching:
    """Drop last-resort pairs and re-index posts of an augmented instance."""
    if not inst.is_augmented:
        return m
    keep = inst.real_posts()
    remap = {p: i for i, p in enumerate(keep)}
    return Matching((a, remap[p]) for a, p in m.items() if p in remap)


def _rank(inst: Instance, a: int, p: Optional[int]) -> int:
    """Tier of p for a; unmatched (None) ranks below every listed post."""
    if p is None:
        return len(inst.prefs[a])
    t = inst.tier_of(a, p)
    if t is None:
        raise ContractError(f"({a}, {p}) is not an edge")
    return t


def compare(inst: Instance, m1: Matching, m2: Matching) -> ComparisonResult:
    """Votes of agents preferring m1 over m2 and vice versa.

    On an augmented instance a last-resort post counts as being unmatched.
    """
    base = _base(inst)
    m1, m2 = _to_base(inst, m1), _to_base(inst, m2)
    first = second = 0
    for a in range(base.n_agents):
        r1, r2 = _rank(base, a, m1.get(a)), _rank(base, a, m2.get(a))
        if r1 < r2:
            first += 1
        elif r2 < r1:
            second += 1
    return ComparisonResult(first, second)


def _guard(inst: Instance) -> None:
    if inst.n_agents > MAX_AGENTS or inst.n_posts > MAX_POSTS:
        raise OracleSizeError(
            f"instance too large for exhaustive search ({inst.n_agents} agents, {inst.n_posts} posts; "
            f"limit {MAX_AGENTS}/{MAX_POSTS})"
        )


def all_matchings(inst: Instance, maximal_only: bool = False) -> Iterator[tuple[int, ...]]:
    """Every matching of an unaugmented instance as a per-agent post tuple (-1 = unmatched).

    Agents are assigned in index order, posts in list order, so the order of
    enumeration is deterministic.  ``maximal_only`` drops matchings that can
    be extended by one more edge.
    """
    lists = [inst.acceptable(a) for a in range(inst.n_agents)]
    n = inst.n_agents
    cur = [-1] * n
    used: set[int] = set()
    count = 0

    def rec(a: int):
        nonlocal count
        if a == n:
            if maximal_only and any(
                cur[x] < 0 and any(p not in used for p in lists[x]) for x in range(n)
            ):
                return
            count += 1
            if count > MAX_MATCHINGS:
                raise OracleSizeError(f"more than {MAX_MATCHINGS} matchings")
            yield tuple(cur)
            return
        cur[a] = -1
        yield from rec(a + 1)
        for p in lists[a]:
            if p not in used:
                used.add(p)
                cur[a] = p
                yield from rec(a + 1)
                used.discard(p)
        cur[a] = -1

    yield from rec(0)


def _rank_table(inst: Instance) -> np.ndarray:
    """rank[a, p] with column n_posts standing for 'unmatched'."""
    big = max((len(t) for t in inst.prefs), default=0)
    table = np.full((inst.n_agents, inst.n_posts + 1), big + 1, dtype=np.int16)
    for a, tiers in enumerate(inst.prefs):
        table[a, inst.n_posts] = len(tiers)
        for i, tier in enumerate(tiers):
            for p in tier:
                table[a, p] = i
    return table


def _rank_vectors(inst: Instance, ms: Sequence[tuple[int, ...]]) -> np.ndarray:
    if not ms:
        return np.empty((0, inst.n_agents), dtype=np.int16)
    arr = np.array(ms, dtype=np.int32).reshape(len(ms), inst.n_agents)
    arr[arr < 0] = inst.n_posts
    return _rank_table(inst)[np.arange(inst.n_agents)[None, :], arr]


def _beaten(candidates: np.ndarray, challengers: np.ndarray, chunk: int = 256) -> np.ndarray:
    """For each candidate rank vector, whether some challenger is more popular."""
    out = np.zeros(len(candidates), dtype=bool)
    for i in range(0, len(candidates), chunk):
        c = candidates[i:i + chunk, None, :]
        better = (challengers[None, :, :] < c).sum(axis=2, dtype=np.int32)
        worse = (challengers[None, :, :] > c).sum(axis=2, dtype=np.int32)
        out[i:i + chunk] = ((better - worse) > 0).any(axis=1)
    return out


def _pareto_front(vectors: np.ndarray) -> np.ndarray:
    """Rows not weakly dominated by a different row (lower rank = better)."""
    order = np.argsort(vectors.sum(axis=1), kind="stable")
    front: list[int] = []
    for i in order:
        v = vectors[i]
        if front and (vectors[front] <= v).all(axis=1).any():
            continue
        front.append(i)
    return vectors[sorted(front)]


@dataclass
class _Table:
    inst: Instance
    matchings: list[tuple[int, ...]]   # maximal matchings only
    ranks: np.ndarray
    front: np.ndarray = field(init=False)
    popular_rows: np.ndarray = field(init=False)

    def __post_init__(self):
        uniq, inverse = np.unique(self.ranks, axis=0, return_inverse=True)
        inverse = np.asarray(inverse).reshape(-1)
        # a more popular challenger can always be replaced by a Pareto-optimal
        # one that dominates it, and popular vectors are Pareto-optimal
        self.front = _pareto_front(uniq)
        beaten = _beaten(uniq, self.front)
        self.popular_rows = np.flatnonzero(~beaten[inverse])


@lru_cache(maxsize=4096)
def _table(inst: Instance) -> _Table:
    _guard(inst)
    ms = list(all_matchings(inst, maximal_only=True))
    return _Table(inst, ms, _rank_vectors(inst, ms))


def _as_matching(row: tuple[int, ...]) -> Matching:
    return Matching((a, p) for a, p in enumerate(row) if p >= 0)


def _from_base(inst: Instance, m: Matching) -> Matching:
    """Lift a base-instance matching back to ``inst`` (last resorts for the unmatched)."""
    if not inst.is_augmented:
        return m
    keep = inst.real_posts()
    return Matching({a: keep[m[a]] if a in m else inst.last_resort[a] for a in range(inst.n_agents)})


def is_popular_bruteforce(inst: Instance, m: Matching) -> bool:
    """No matching of the instance wins a head-to-head vote against m."""
    base = _base(inst)
    mb = _to_base(inst, m)
    for a, p in mb.items():
        if base.tier_of(a, p) is None:
            raise ContractError("matching uses a non-edge")
    table = _table(base)
    row = np.array([[_rank(base, a, mb.get(a)) for a in range(base.n_agents)]], dtype=np.int16)
    return not _beaten(row, table.front)[0]


def enumerate_popular(inst: Instance) -> list[Matching]:
    """All popular matchings, in enumeration order.

    For an augmented instance the result is expressed on that instance, with
    unmatched agents assigned their last-resort posts.
    """
    base = _base(inst)
    table = _table(base)
    return [_from_base(inst, _as_matching(table.matchings[i])) for i in table.popular_rows]


def count_popular(inst: Instance) -> int:
    return len(_table(_base(inst)).popular_rows)


def popular_pairs_bruteforce(inst: Instance) -> set[tuple[int, int]]:
    """(agent, post) pairs used by some popular matching; last resorts excluded."""
    out: set[tuple[int, int]] = set()
    for m in enumerate_popular(inst):
        out.update((a, p) for a, p in m.items() if not inst.is_last_resort(p))
    return out


def classify_bruteforce(inst: Instance) -> Optional[list[str]]:
    """F / S / FS per agent from all popular matchings; None if there are none."""
    pops = enumerate_popular(inst)
    if not pops:
        return None
    out = []
    for a in range(inst.n_agents):
        first = inst.prefs[a][0] if inst.prefs[a] else frozenset()
        hits = [m.get(a) in first for m in pops]
        out.append("F" if all(hits) else "S" if not any(hits) else "FS")
    return out


# -- manipulation -------------------------------------------------------------


def true_rank(inst: Instance, a: int, p: Optional[int]) -> int:
    """1-based rank of p in a's true list; unlisted, last-resort or None rank last."""
    tiers = inst.true_tiers(a)
    if p is not None:
        for i, tier in enumerate(tiers):
            if p in tier:
                return i + 1
    return len(tiers) + 1


def candidate_lists(inst: Instance) -> list[tuple[int, ...]]:
    """Every strict list of one or two real posts."""
    posts = inst.real_posts()
    out = [(p,) for p in posts]
    out += [(p, q) for p in posts for q in posts if p != q]
    return out


@dataclass(frozen=True)
class SearchResult:
    best_truthful: int   # best true rank a1 gets over popular matchings of G
    worst_truthful: int
    optimum: Optional[int]  # best guaranteed rank over better-always lists; None if no list works
    witnesses: tuple[tuple[int, ...], ...]
    # every popular outcome of every falsified instance that admits one: list -> ranks
    outcomes: dict = field(compare=False, repr=False, default_factory=dict)


def truthful_ranks(inst: Instance, a1: int) -> tuple[int, int]:
    pops = enumerate_popular(inst)
    if not pops:
        raise ContractError("instance admits no popular matching")
    ranks = [true_rank(inst, a1, m.get(a1)) for m in pops]
    return min(ranks), max(ranks)


def falsified_ranks(inst: Instance, a1: int, lst: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Sorted true ranks a1 receives across popular matchings of the falsified
    instance, or None when that instance admits no popular matching."""
    h = inst.with_list(a1, [[p] for p in lst])
    pops = enumerate_popular(h)
    if not pops:
        return None
    return tuple(sorted(true_rank(inst, a1, m.get(a1)) for m in pops))


def better_always(best_truthful: int, worst_truthful: int, ranks: Sequence[int]) -> bool:
    """(i) never worse than the best truthful outcome, (ii) sometimes better
    than the worst one."""
    return max(ranks) <= best_truthful and min(ranks) < worst_truthful


def exhaustive_strategy_search(inst: Instance, a1: int, keep_outcomes: bool = False) -> SearchResult:
    """Try every strict falsified list of length one or two for agent a1."""
    best, worst = truthful_ranks(inst, a1)
    if worst == 1:
        # always rank 1 already: condition (ii) cannot hold
        return SearchResult(best, worst, None, ())
    optimum: Optional[int] = None
    witnesses: list[tuple[int, ...]] = []
    outcomes = {}
    for lst in candidate_lists(inst):
        ranks = falsified_ranks(inst, a1, lst)
        if ranks is None:
            continue
        if keep_outcomes:
            outcomes[lst] = ranks
        if not better_always(best, worst, ranks):
            continue
        got = max(ranks)
        if optimum is None or got < optimum:
            optimum, witnesses = got, [lst]
        elif got == optimum:
            witnesses.append(lst)
    return SearchResult(best, worst, optimum, tuple(witnesses), outcomes)


def is_equilibrium_bruteforce(inst: Instance) -> tuple[bool, Optional[tuple[int, tuple[int, ...]]]]:
    """True lists form an equilibrium iff no agent has a better-always deviation."""
    for a in range(inst.n_agents):
        res = exhaustive_strategy_search(inst, a)
        if res.optimum is not None:
            return False, (a, res.witnesses[0])
    return True, None


def perfect_matching_count(n: int, edges: Iterable[tuple[int, int]]) -> int:
    """Permanent of the biadjacency matrix by exhaustive permutation."""
    from itertools import permutations

    es = set(edges)
    return sum(all((i, perm[i]) in es for i in range(n)) for perm in permutations(range(n)))
