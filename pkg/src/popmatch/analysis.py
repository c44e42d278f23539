"""Popular pairs, the F / S / FS agent classes, and the counting reduction."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from typing import Optional

from .engine import E, PopularContext, popular_matching
from .model import Instance, augment_last_resorts
from .switching import SwitchingGraph, build_switching_graph

F, S, FS = "F", "S", "FS"


def popular_pairs(ctx: PopularContext, sg: SwitchingGraph) -> frozenset[tuple[int, int]]:
    """Every (agent, post) used by at least one popular matching.

    A pair is popular iff it is in M, or its switching-graph edge
    M(a) -> p lies on a switching cycle (any edge inside a strongly connected
    component; all cycles weigh zero) or on a switching path.  Switching
    paths start at posts even in both labellings, so a DFS from those posts
    marks every edge it walks over.  Pairs with last-resort posts are kept.
    """
    pairs = set(ctx.m.items())
    scc = sg.scc_of
    for e in sg.edges:
        if scc[e.src] == scc[e.dst]:
            pairs.add((e.via, e.dst))

    starts = [
        p for p in range(sg.n_posts)
        if ctx.labels1.post[p] is E and ctx.labels2.post[p] is E
    ]
    seen = set(starts)
    stack = list(starts)
    while stack:
        u = stack.pop()
        for e in sg.out[u]:
            pairs.add((e.via, e.dst))
            if e.dst not in seen:
                seen.add(e.dst)
                stack.append(e.dst)
    return frozenset(pairs)


def real_pairs(inst: Instance, pairs: Iterable[tuple[int, int]]) -> frozenset[tuple[int, int]]:
    return frozenset((a, p) for a, p in pairs if not inst.is_last_resort(p))


def classify_agents(inst: Instance, pairs: Iterable[tuple[int, int]]) -> list[str]:
    """F if every popular pair of a is rank 1, S if none is, FS otherwise."""
    by_agent: list[list[int]] = [[] for _ in range(inst.n_agents)]
    for a, p in pairs:
        by_agent[a].append(p)
    out = []
    for a, posts in enumerate(by_agent):
        first = inst.prefs[a][0]
        hits = [p in first for p in posts]
        out.append(F if all(hits) else S if not any(hits) else FS)
    return out


def analyse(inst: Instance):
    """(ctx, switching graph, pairs, classes) for an augmented instance, or None."""
    ctx = popular_matching(inst)
    if ctx is None:
        return None
    sg = build_switching_graph(ctx)
    pairs = popular_pairs(ctx, sg)
    return ctx, sg, pairs, classify_agents(inst, pairs)


def reduction_from_regular(n: int, edges: Sequence[tuple[int, int]], degree: int = 3) -> Instance:
    """Instance whose popular matchings are the perfect matchings of a
    ``degree``-regular bipartite graph on n + n vertices.

    Every edge becomes a rank-1 edge (each agent ties all its neighbours).
    """
    es = sorted(set(edges))
    if len(es) != len(edges):
        raise ValueError("duplicate edge")
    left = [0] * n
    right = [0] * n
    for a, p in es:
        if not (0 <= a < n and 0 <= p < n):
            raise ValueError(f"edge ({a}, {p}) out of range")
        left[a] += 1
        right[p] += 1
    if any(d != degree for d in left + right):
        raise ValueError(f"graph is not {degree}-regular")
    prefs = tuple((frozenset(p for x, p in es if x == a),) for a in range(n))
    return Instance(
        tuple(f"a{i + 1}" for i in range(n)),
        tuple(f"p{i + 1}" for i in range(n)),
        prefs,
    )


def complete_bipartite(n: int) -> list[tuple[int, int]]:
    return [(a, p) for a in range(n) for p in range(n)]


def circulant(n: int, offsets: Sequence[int] = (0, 1, 2)) -> list[tuple[int, int]]:
    return [(a, (a + k) % n) for a in range(n) for k in offsets]


def pairs_json(inst: Instance, pairs: Iterable[tuple[int, int]]) -> list[dict]:
    return [{"agent": inst.agents[a], "post": inst.posts[p]} for a, p in sorted(real_pairs(inst, pairs))]


def classes_json(inst: Instance, classes: Sequence[str]) -> dict:
    return {inst.agents[a]: c for a, c in enumerate(classes)}


def maybe_analyse(inst: Instance) -> Optional[tuple]:
    return analyse(inst if inst.is_augmented else augment_last_resorts(inst))
