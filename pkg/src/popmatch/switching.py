"""The switching graph of a popular matching.

Nodes are posts.  For each agent a and each p in choices(a) other than M(a)
there is an edge M(a) -> p, weighted by how a compares the two posts
(+1 prefers p, -1 prefers M(a), 0 indifferent).  Every edge leaving a post
is witnessed by the agent matched to it, so there are no parallel edges.

Zero-weight paths ending at an unmatched post (switching paths) and
zero-weight cycles turn one popular matching into another.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .engine import E, O, U, Label, PopularContext
from .model import ContractError, Matching

# weight of an edge by the rank-1 labels of its endpoints; None = cannot occur
TABLE1: dict[tuple[Label, Label], Optional[int]] = {
    (O, O): 0, (O, E): -1, (O, U): None,
    (E, O): +1, (E, E): 0, (E, U): None,
    (U, O): None, (U, E): -1, (U, U): 0,
}


def table1_weight(label_i: Label, label_j: Label) -> Optional[int]:
    return TABLE1[(label_i, label_j)]


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    weight: int
    via: int


@dataclass(frozen=True)
class SwitchingGraph:
    n_posts: int
    edges: tuple[Edge, ...]
    sink: tuple[bool, ...]
    component: tuple[int, ...]          # weakly connected component per post
    component_is_sink: tuple[bool, ...]  # per component id

    @cached_property
    def out(self) -> tuple[tuple[Edge, ...], ...]:
        out: list[list[Edge]] = [[] for _ in range(self.n_posts)]
        for e in self.edges:
            out[e.src].append(e)
        return tuple(tuple(x) for x in out)

    @cached_property
    def edge_map(self) -> dict[tuple[int, int], Edge]:
        return {(e.src, e.dst): e for e in self.edges}

    def in_sink_component(self, p: int) -> bool:
        return self.component_is_sink[self.component[p]]

    def non_sink_components(self) -> list[int]:
        return [c for c, is_sink in enumerate(self.component_is_sink) if not is_sink]

    def members(self, c: int) -> list[int]:
        return [p for p in range(self.n_posts) if self.component[p] == c]

    def reachable(self, src: int) -> set[int]:
        """Posts reachable from ``src`` (including ``src``)."""
        seen = {src}
        stack = [src]
        while stack:
            for e in self.out[stack.pop()]:
                if e.dst not in seen:
                    seen.add(e.dst)
                    stack.append(e.dst)
        return seen

    @cached_property
    def sccs(self) -> tuple[tuple[int, ...], ...]:
        """Strongly connected components, in reverse topological order."""
        return tuple(tuple(c) for c in _tarjan(self.n_posts, self.out))

    @cached_property
    def scc_of(self) -> tuple[int, ...]:
        idx = [0] * self.n_posts
        for i, comp in enumerate(self.sccs):
            for p in comp:
                idx[p] = i
        return tuple(idx)

    def max_weight_to(self, targets: Iterable[int]) -> list[Optional[int]]:
        """Per post, the largest weight of a path ending in ``targets``.

        None when no target is reachable.  Relies on every cycle having
        weight zero: inside a strongly connected component the weight of a
        path depends only on its endpoints, so the condensation DAG carries
        the whole computation.
        """
        targets = set(targets)
        pot = self._potentials
        best_scc: list[Optional[int]] = [None] * len(self.sccs)
        for i, comp in enumerate(self.sccs):  # sinks of the DAG first
            cands = [pot[t] for t in comp if t in targets]
            for u in comp:
                for e in self.out[u]:
                    j = self.scc_of[e.dst]
                    if j != i and best_scc[j] is not None:
                        # weight from e.dst onward is best_scc[j] - pot[e.dst]
                        cands.append(pot[u] + e.weight + best_scc[j] - pot[e.dst])
            best_scc[i] = max(cands) if cands else None
        return [None if best_scc[self.scc_of[p]] is None else best_scc[self.scc_of[p]] - pot[p]
                for p in range(self.n_posts)]

    @cached_property
    def _potentials(self) -> list[int]:
        # pot[v] - pot[u] = weight of any u->v path inside one SCC
        pot: list[Optional[int]] = [None] * self.n_posts
        for i, comp in enumerate(self.sccs):
            root = comp[0]
            pot[root] = 0
            stack = [root]
            while stack:
                u = stack.pop()
                for e in self.out[u]:
                    if self.scc_of[e.dst] != i:
                        continue
                    want = pot[u] + e.weight
                    if pot[e.dst] is None:
                        pot[e.dst] = want
                        stack.append(e.dst)
                    elif pot[e.dst] != want:
                        raise ContractError("switching graph has a cycle of non-zero weight")
        return pot  # type: ignore[return-value]

    def has_switching_path(self) -> list[bool]:
        """Per post, whether a zero-weight path from it reaches a sink."""
        w = self.max_weight_to(p for p in range(self.n_posts) if self.sink[p])
        return [x == 0 for x in w]


def _tarjan(n: int, out: Sequence[Sequence[Edge]]) -> list[list[int]]:
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            edges = out[v]
            while i < len(edges):
                w = edges[i].dst
                i += 1
                if index[w] == -1:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def _weight(inst, a: int, current: int, target: int) -> int:
    ti, tj = inst.tier_of(a, current), inst.tier_of(a, target)
    return 0 if ti == tj else (1 if tj < ti else -1)


def build_switching_graph(ctx: PopularContext) -> SwitchingGraph:
    inst, m = ctx.inst, ctx.m
    edges = []
    for a in range(inst.n_agents):
        src = m[a]
        for p in ctx.choices[a]:
            if p != src:
                edges.append(Edge(src, p, _weight(inst, a, src, p), a))
    n = inst.n_posts
    has_out = [False] * n
    for e in edges:
        has_out[e.src] = True
    sink = tuple(not x for x in has_out)

    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        ra, rb = find(e.src), find(e.dst)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots: dict[int, int] = {}
    component = []
    for p in range(n):
        component.append(roots.setdefault(find(p), len(roots)))
    is_sink = [False] * len(roots)
    for p in range(n):
        if sink[p]:
            is_sink[component[p]] = True
    return SwitchingGraph(n, tuple(edges), sink, tuple(component), tuple(is_sink))


def path_weight(sg: SwitchingGraph, nodes: Sequence[int]) -> int:
    total = 0
    for u, v in zip(nodes, nodes[1:]):
        e = sg.edge_map.get((u, v))
        if e is None:
            raise ContractError(f"no edge {u} -> {v} in the switching graph")
        total += e.weight
    return total


def apply_path(m: Matching, sg: SwitchingGraph, path: Sequence[int]) -> Matching:
    """Shift every agent on the path one post forward; the last post must be a sink."""
    if len(path) < 2:
        return m
    if len(set(path)) != len(path):
        raise ContractError("switching path repeats a post")
    if not sg.sink[path[-1]]:
        raise ContractError("switching path must end at a sink")
    if path_weight(sg, path) != 0:
        raise ContractError("switching path must have weight 0")
    updates = {}
    for u, v in zip(path, path[1:]):
        a = m.agent_of(u)
        if a is None or sg.edge_map[(u, v)].via != a:
            raise ContractError("path does not belong to this matching's switching graph")
        updates[a] = v
    return m.replace(updates)


def apply_cycle(m: Matching, sg: SwitchingGraph, cycle: Sequence[int]) -> Matching:
    """Rotate posts along a cycle given as <p1, ..., pk> (closing edge implied)."""
    if len(cycle) < 2:
        return m
    if len(set(cycle)) != len(cycle):
        raise ContractError("cycle repeats a post")
    closed = list(cycle) + [cycle[0]]
    if path_weight(sg, closed) != 0:
        raise ContractError("switching cycle must have weight 0")
    updates = {}
    for u, v in zip(closed, closed[1:]):
        a = m.agent_of(u)
        if a is None or sg.edge_map[(u, v)].via != a:
            raise ContractError("cycle does not belong to this matching's switching graph")
        updates[a] = v
    return m.replace(updates)


def tight_pair(sg: SwitchingGraph, ctx: PopularContext, q: int) -> tuple[frozenset[int], frozenset[int]]:
    """(A_q, P_q): posts reachable from q and the agents matched to them.

    Needs q in a non-sink component; then |A_q| = |P_q| and every agent of
    A_q has all its choices inside P_q.
    """
    if sg.in_sink_component(q):
        raise ContractError("tight pair needs a post in a non-sink component")
    posts = frozenset(sg.reachable(q))
    agents = frozenset(ctx.m.agent_of(p) for p in posts)
    return agents, posts


# -- desk-scale enumeration ---------------------------------------------------


def simple_paths(sg: SwitchingGraph, max_nodes: Optional[int] = None) -> Iterable[list[int]]:
    """All simple directed paths with at least one edge."""
    n = sg.n_posts
    limit = max_nodes or n

    def extend(path, seen):
        for e in sg.out[path[-1]]:
            if e.dst not in seen:
                path.append(e.dst)
                seen.add(e.dst)
                yield list(path)
                if len(path) < limit:
                    yield from extend(path, seen)
                path.pop()
                seen.discard(e.dst)

    for s in range(n):
        yield from extend([s], {s})


def simple_cycles(sg: SwitchingGraph) -> Iterable[list[int]]:
    """Each simple cycle once, rotated to start at its smallest post."""
    for s in range(sg.n_posts):
        stack = [(s, [s])]
        while stack:
            v, path = stack.pop()
            for e in sg.out[v]:
                if e.dst == s:
                    yield list(path)
                elif e.dst > s and e.dst not in path:
                    stack.append((e.dst, path + [e.dst]))


def switching_paths(sg: SwitchingGraph) -> list[list[int]]:
    return [p for p in simple_paths(sg) if sg.sink[p[-1]] and path_weight(sg, p) == 0]


def switching_cycles(sg: SwitchingGraph) -> list[list[int]]:
    return [c for c in simple_cycles(sg) if path_weight(sg, c + [c[0]]) == 0]


def matchings_by_switching(ctx: PopularContext, sg: SwitchingGraph) -> set[Matching]:
    """Every matching reachable from M by a set of vertex-disjoint switching
    paths and cycles.  Exponential; for cross-checking on small instances."""
    moves = [("path", p) for p in switching_paths(sg)] + [("cycle", c) for c in switching_cycles(sg)]
    node_sets = [frozenset(x) for _, x in moves]
    out: set[Matching] = set()

    def rec(i: int, used: frozenset, m: Matching):
        if i == len(moves):
            out.add(m)
            return
        rec(i + 1, used, m)
        if not (node_sets[i] & used):
            kind, nodes = moves[i]
            nxt = apply_path(m, sg, nodes) if kind == "path" else apply_cycle(m, sg, nodes)
            rec(i + 1, used | node_sets[i], nxt)

    rec(0, frozenset(), ctx.m)
    return out


def to_dot(sg: SwitchingGraph, ctx: PopularContext) -> str:
    inst = ctx.inst
    lines = ["digraph switching {", "  rankdir=LR;"]
    for p in range(sg.n_posts):
        label = f"{inst.posts[p]}\\n{ctx.labels1.post[p].value}"
        shape = "doublecircle" if sg.sink[p] else "circle"
        lines.append(f'  p{p} [label="{label}", shape={shape}];')
    for e in sg.edges:
        lines.append(f'  p{e.src} -> p{e.dst} [label="{e.weight:+d} {inst.agents[e.via]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
