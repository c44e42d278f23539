"""Maximum matchings, even/odd/unreachable labelling and popular matchings.

The popular-matching routine follows the classical characterisation: a
matching is popular iff its rank-1 edges form a maximum matching of the
rank-1 graph and every agent gets a post in f(a) ∪ s(a).  After a popular
matching is found, the f/s graph is pruned a second time so the surviving
edges are exactly the ones usable by *some* popular matching; those edges
define ``choices(a)`` and the switching graph.
"""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Optional

from .model import ContractError, Instance, Matching


class Label(enum.Enum):
    EVEN = "E"
    ODD = "O"
    UNREACHABLE = "U"

    def __repr__(self):
        return self.value


E, O, U = Label.EVEN, Label.ODD, Label.UNREACHABLE


@dataclass(frozen=True)
class BipartiteGraph:
    n_agents: int
    n_posts: int
    adj: tuple[tuple[int, ...], ...]  # per agent, ascending post index

    @classmethod
    def from_edges(cls, n_agents: int, n_posts: int, edges: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        adj: list[set[int]] = [set() for _ in range(n_agents)]
        for a, p in edges:
            adj[a].add(p)
        return cls(n_agents, n_posts, tuple(tuple(sorted(s)) for s in adj))

    @property
    def radj(self) -> tuple[tuple[int, ...], ...]:
        rev: list[list[int]] = [[] for _ in range(self.n_posts)]
        for a, ps in enumerate(self.adj):
            for p in ps:
                rev[p].append(a)
        return tuple(tuple(r) for r in rev)

    def edges(self) -> list[tuple[int, int]]:
        return [(a, p) for a, ps in enumerate(self.adj) for p in ps]

    def has_edge(self, a: int, p: int) -> bool:
        return p in self.adj[a]

    def without(self, removed: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        gone = set(removed)
        return BipartiteGraph.from_edges(self.n_agents, self.n_posts, (e for e in self.edges() if e not in gone))

    def restrict_agent(self, a: int, allowed: Iterable[int]) -> "BipartiteGraph":
        keep = set(allowed)
        return BipartiteGraph.from_edges(
            self.n_agents, self.n_posts, ((x, p) for x, p in self.edges() if x != a or p in keep)
        )


@dataclass(frozen=True)
class EouLabels:
    agent: tuple[Label, ...]
    post: tuple[Label, ...]

    def posts_with(self, label: Label) -> frozenset[int]:
        return frozenset(p for p, lab in enumerate(self.post) if lab is label)

    def agents_with(self, label: Label) -> frozenset[int]:
        return frozenset(a for a, lab in enumerate(self.agent) if lab is label)


def max_matching(g: BipartiteGraph, seed: Optional[Matching] = None) -> Matching:
    """Maximum matching grown from ``seed`` by BFS augmenting paths.

    Free agents are processed once each in index order; vertices matched by
    the seed stay matched.
    """
    mate_a: dict[int, int] = dict(seed.items()) if seed else {}
    mate_p: dict[int, int] = {p: a for a, p in mate_a.items()}
    for a, p in mate_a.items():
        if not g.has_edge(a, p):
            raise ContractError(f"seed edge ({a}, {p}) not in graph")

    for root in range(g.n_agents):
        if root in mate_a:
            continue
        parent: dict[int, int] = {}  # post -> agent it was reached from
        queue = deque([root])
        free_post = None
        while queue and free_post is None:
            a = queue.popleft()
            for p in g.adj[a]:
                if p in parent:
                    continue
                parent[p] = a
                if p not in mate_p:
                    free_post = p
                    break
                queue.append(mate_p[p])
        p = free_post
        while p is not None:
            a = parent[p]
            nxt = mate_a.get(a)
            mate_a[a] = p
            mate_p[p] = a
            p = nxt
    return Matching(mate_a)


def eou_labels(g: BipartiteGraph, m: Matching) -> EouLabels:
    """Even/odd/unreachable labels w.r.t. a maximum matching ``m`` of ``g``."""
    radj = g.radj
    agent: list[Optional[Label]] = [None] * g.n_agents
    post: list[Optional[Label]] = [None] * g.n_posts
    queue: deque[tuple[str, int]] = deque()
    for a in range(g.n_agents):
        if a not in m:
            agent[a] = E
            queue.append(("a", a))
    for p in range(g.n_posts):
        if m.agent_of(p) is None:
            post[p] = E
            queue.append(("p", p))

    def mark(kind: str, v: int, lab: Label):
        labels = agent if kind == "a" else post
        if labels[v] is None:
            labels[v] = lab
            queue.append((kind, v))
        elif labels[v] is not lab:
            raise ContractError("matching is not maximum in the graph")

    while queue:
        kind, v = queue.popleft()
        if kind == "a":
            if agent[v] is E:
                for p in g.adj[v]:
                    if m.get(v) != p:
                        mark("p", p, O)
            else:
                mark("p", m[v], E)
        else:
            if post[v] is E:
                for a in radj[v]:
                    if m.get(a) != v:
                        mark("a", a, O)
            else:
                mark("a", m.agent_of(v), E)

    return EouLabels(
        tuple(U if x is None else x for x in agent),
        tuple(U if x is None else x for x in post),
    )


def rank1_graph(inst: Instance) -> BipartiteGraph:
    f = first_choices(inst)
    return BipartiteGraph.from_edges(inst.n_agents, inst.n_posts, ((a, p) for a in range(inst.n_agents) for p in f[a]))


def first_choices(inst: Instance) -> tuple[frozenset[int], ...]:
    return tuple(tiers[0] if tiers else frozenset() for tiers in inst.prefs)


def second_choices(inst: Instance, labels1: EouLabels) -> tuple[frozenset[int], ...]:
    """s(a): a's most preferred posts among those even in the rank-1 graph."""
    even = labels1.posts_with(E)
    out = []
    for tiers in inst.prefs:
        s: frozenset[int] = frozenset()
        for tier in tiers:
            if tier & even:
                s = tier & even
                break
        out.append(s)
    return tuple(out)


@dataclass(frozen=True)
class PopularContext:
    inst: Instance
    f: tuple[frozenset[int], ...]
    s: tuple[frozenset[int], ...]
    g1: BipartiteGraph
    m1: Matching
    labels1: EouLabels
    g_prime: BipartiteGraph  # f/s graph after the rank-1 pruning
    labels2: EouLabels
    g2: BipartiteGraph  # after the second pruning; edges = choices
    m: Matching
    removed_rank1: frozenset[tuple[int, int]]
    removed_popular: frozenset[tuple[int, int]]

    @property
    def choices(self) -> tuple[tuple[int, ...], ...]:
        return self.g2.adj


def _fs_graph(inst: Instance, f, s) -> BipartiteGraph:
    return BipartiteGraph.from_edges(
        inst.n_agents, inst.n_posts, ((a, p) for a in range(inst.n_agents) for p in f[a] | s[a])
    )


def _rank1_pruned(inst: Instance):
    g1 = rank1_graph(inst)
    m1 = max_matching(g1)
    labels1 = eou_labels(g1, m1)
    f = first_choices(inst)
    s = second_choices(inst, labels1)
    if any(not x for x in s):
        raise ContractError("an agent has no even post; augment the instance with last resorts first")
    g_full = _fs_graph(inst, f, s)
    removed = frozenset(
        (a, p)
        for a, p in g_full.edges()
        if (labels1.agent[a] is O and labels1.post[p] in (O, U))
        or (labels1.post[p] is O and labels1.agent[a] in (O, U))
    )
    return f, s, g1, m1, labels1, g_full.without(removed), removed


def _finish(inst, f, s, g1, m1, labels1, g_prime, removed1, m) -> PopularContext:
    labels2 = eou_labels(g_prime, m)
    removed2 = frozenset(
        (a, p)
        for a, p in g_prime.edges()
        if {labels2.agent[a], labels2.post[p]} == {O, U}
    )
    return PopularContext(
        inst=inst, f=f, s=s, g1=g1, m1=m1, labels1=labels1, g_prime=g_prime,
        labels2=labels2, g2=g_prime.without(removed2), m=m,
        removed_rank1=removed1, removed_popular=removed2,
    )


def popular_matching(inst: Instance, rank1_for: Optional[int] = None) -> Optional[PopularContext]:
    """Find a popular matching of an augmented instance, or None if none exists.

    With ``rank1_for`` set, the matching must give that agent a rank-1 post;
    None is returned when no popular matching does.
    """
    if not inst.is_augmented:
        raise ContractError("popular_matching needs an augmented instance")
    f, s, g1, m1, labels1, g_prime, removed1 = _rank1_pruned(inst)

    seed, search = m1, g_prime
    if rank1_for is not None:
        a = rank1_for
        search = g_prime.restrict_agent(a, f[a])
        if a not in m1:
            # every rank-1 post of an unmatched agent is taken (m1 is maximum);
            # handing one over keeps the rank-1 matching maximum
            options = [p for p in search.adj[a] if p in f[a]]
            if not options:
                return None
            p = options[0]
            seed = m1.replace({m1.agent_of(p): None, a: p})
    m = max_matching(search, seed)
    if len(m) < inst.n_agents:
        return None
    return _finish(inst, f, s, g1, m1, labels1, g_prime, removed1, m)


def context_for(inst: Instance, m: Matching) -> PopularContext:
    """Build the full context around a given popular matching ``m``."""
    if not inst.is_augmented:
        raise ContractError("context_for needs an augmented instance")
    f, s, g1, m1, labels1, g_prime, removed1 = _rank1_pruned(inst)
    if len(m) != inst.n_agents:
        raise ContractError("matching is not agent-complete")
    for a, p in m.items():
        if not g_prime.has_edge(a, p):
            raise ContractError(f"({inst.agents[a]}, {inst.posts[p]}) cannot be in a popular matching")
    rank1 = sum(1 for a, p in m.items() if p in f[a])
    if rank1 != len(m1):
        raise ContractError("matching is not maximum on rank-1 edges")
    return _finish(inst, f, s, g1, m1, labels1, g_prime, removed1, m)


def prune_report(ctx: PopularContext) -> tuple[frozenset[tuple[int, int]], frozenset[tuple[int, int]]]:
    """Edges removed by the rank-1 pruning and by the popular pruning."""
    return ctx.removed_rank1, ctx.removed_popular


def satisfies_characterisation(inst: Instance, m: Matching) -> bool:
    """True iff m is maximum on rank-1 edges and gives every agent f(a) ∪ s(a).

    ``m`` must be agent-complete on an augmented instance.
    """
    g1 = rank1_graph(inst)
    m1 = max_matching(g1)
    f = first_choices(inst)
    s = second_choices(inst, eou_labels(g1, m1))
    if sum(1 for a, p in m.items() if p in f[a]) != len(m1):
        return False
    return all(a in m and m[a] in f[a] | s[a] for a in range(inst.n_agents))
