"""Single-agent cheating strategies and the truthful-equilibrium test.

Everything works on the augmented instance (last-resort posts added).  Post
indices of real posts are identical in the plain and augmented instances,
so returned lists can be read against either.

Strategies are computed on the modified instance G~: the original instance
plus a dummy agent ``b`` whose single tie holds the posts unreachable in the
rank-1 graph, followed by its own last resort.  A popular matching M of G
lifts to M~ = M + (b, l(b)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import oracle
from .analysis import FS, S, analyse
from .engine import E, U, PopularContext, context_for, popular_matching
from .model import ContractError, Instance, Matching, augment_last_resorts
from .switching import SwitchingGraph, build_switching_graph

TRUTH_OPTIMAL = "TruthOptimal"
FALSIFY = "Falsify"


def _augmented(inst: Instance) -> Instance:
    return inst if inst.is_augmented else augment_last_resorts(inst)


@dataclass(frozen=True)
class ModifiedInstance:
    base: Instance        # augmented original
    inst: Instance        # augmented, with b appended
    b: int
    lr_b: int

    def lift(self, m: Matching) -> Matching:
        return Matching(list(m.items()) + [(self.b, self.lr_b)])


def modified_instance(inst: Instance, ctx: Optional[PopularContext] = None) -> ModifiedInstance:
    g = _augmented(inst)
    ctx = ctx or popular_matching(g)
    if ctx is None:
        raise ContractError("instance admits no popular matching")
    unreachable = ctx.labels1.posts_with(U)
    name = "b"
    while name in g.agents:
        name += "'"
    lr_b = g.n_posts
    tiers = ((frozenset(unreachable),) if unreachable else ()) + (frozenset([lr_b]),)
    gt = Instance(
        g.agents + (name,),
        g.posts + (f"l({name})",),
        g.prefs + (tiers,),
        g.last_resort + (lr_b,),
    )
    return ModifiedInstance(g, gt, g.n_agents, lr_b)


@dataclass(frozen=True)
class StrategyOutcome:
    agent: int
    kind: str
    lst: tuple[int, ...] = ()
    guaranteed: Optional[int] = None
    true_rank_before: Optional[int] = None  # rank a1 is sure of when truthful
    true_rank_after: Optional[int] = None   # rank guaranteed by the returned list

    @property
    def falsify(self) -> bool:
        return self.kind == FALSIFY

    def to_json(self, inst: Instance) -> dict:
        return {
            "agent": inst.agents[self.agent],
            "kind": self.kind,
            "list": [inst.posts[p] for p in self.lst],
            "guaranteed": None if self.guaranteed is None else inst.posts[self.guaranteed],
            "true_rank_before": self.true_rank_before,
            "true_rank_after": self.true_rank_after,
        }


@dataclass(frozen=True)
class _Lifted:
    mod: ModifiedInstance
    ctx: PopularContext        # on G~ around M~
    sg: SwitchingGraph         # G~_M~


def _lift(g: Instance, g_ctx: PopularContext) -> _Lifted:
    mod = modified_instance(g, g_ctx)
    if len(mod.inst.prefs[mod.b]) == 1:
        # b lists only l(b): G~_M~ is G_M plus an isolated l(b), which
        # would otherwise count as a spurious non-sink component
        return _Lifted(mod, g_ctx, build_switching_graph(g_ctx))
    ctx = context_for(mod.inst, mod.lift(g_ctx.m))
    return _Lifted(mod, ctx, build_switching_graph(ctx))


def _class_of(g: Instance, a1: int) -> str:
    res = analyse(g)
    if res is None:
        raise ContractError("instance admits no popular matching")
    return res[3][a1]


def strategy_s_agent(inst: Instance, a1: int, _checked: bool = False) -> StrategyOutcome:
    g = _augmented(inst)
    if not _checked and _class_of(g, a1) != S:
        raise ContractError(f"agent {g.agents[a1]} is not in class S")
    g_ctx = popular_matching(g)
    lifted = _lift(g, g_ctx)
    sg, mt = lifted.sg, lifted.ctx.m

    tiers = g.true_tiers(a1)
    home = mt[a1]
    t = oracle.true_rank(g, a1, home)   # tier of s(a1), or L+1 for l(a1)
    before = StrategyOutcome(a1, TRUTH_OPTIMAL, true_rank_before=t, true_rank_after=t)
    to_home = None
    for i in range(1, t - 1):
        for p in sorted(tiers[i]):
            if sg.in_sink_component(p):
                break
            if to_home is None:
                to_home = {u for u in range(sg.n_posts) if home in sg.reachable(u)}
            if p in to_home:
                break
        else:
            continue
        return StrategyOutcome(a1, FALSIFY, (p, _rank2_post(g, g_ctx, a1)), p, t, i + 1)
    return before


def _rank2_post(g: Instance, g_ctx: PopularContext, a1: int) -> int:
    """min s(a2), a2 the first agent holding one of a1's rank-1 posts.

    s(a2) is always a real post here: a2's post sits in a non-sink
    component, and an edge to l(a2) would connect it to a sink.
    """
    f1 = g_ctx.f[a1]
    a2 = min(a for a in range(g.n_agents) if g_ctx.m.get(a) in f1)
    p2 = min(g_ctx.s[a2])
    if g.is_last_resort(p2):
        raise ContractError("rank-2 post resolved to a last resort")
    return p2


def strategy_fs_agent(inst: Instance, a1: int, _checked: bool = False) -> StrategyOutcome:
    g = _augmented(inst)
    if not _checked and _class_of(g, a1) != FS:
        raise ContractError(f"agent {g.agents[a1]} is not in class FS")
    g_ctx = popular_matching(g, rank1_for=a1)
    if g_ctx is None:
        raise ContractError("no popular matching gives this agent a rank-1 post")
    lifted = _lift(g, g_ctx)
    sg = lifted.sg
    p = lifted.ctx.m[a1]

    worst = max(oracle.true_rank(g, a1, q) for q in g_ctx.s[a1])
    best_to_p = sg.max_weight_to([p])
    for q in sorted(g_ctx.labels1.posts_with(E)):
        if g.is_last_resort(q) or sg.in_sink_component(q):
            continue
        w = best_to_p[q]
        if w is not None and w >= 1:
            continue
        return StrategyOutcome(a1, FALSIFY, (p, q), p, worst, 1)
    return StrategyOutcome(a1, TRUTH_OPTIMAL, true_rank_before=worst, true_rank_after=worst)


def best_strategy(inst: Instance, a1: int) -> StrategyOutcome:
    g = _augmented(inst)
    cls = _class_of(g, a1)
    if cls == S:
        return strategy_s_agent(g, a1, _checked=True)
    if cls == FS:
        return strategy_fs_agent(g, a1, _checked=True)
    return StrategyOutcome(a1, TRUTH_OPTIMAL, true_rank_before=1, true_rank_after=1)


def _popular_ranks(g: Instance, h: Instance, a1: int) -> Optional[list[int]]:
    res = analyse(_augmented(h))
    if res is None:
        return None
    hh = _augmented(h)
    return [oracle.true_rank(g, a1, p) for a, p in res[2] if a == a1 and not hh.is_last_resort(p)] + (
        [oracle.true_rank(g, a1, None)] if any(a == a1 and hh.is_last_resort(p) for a, p in res[2]) else []
    )


def verify_better_always(g: Instance, h: Instance, a1: int) -> bool:
    """Better-always test using popular pairs of both instances.

    Ranks are read in a1's true list from ``g``.
    """
    gb, hb = g.base(), h.base()
    if gb.agents != hb.agents or gb.posts != hb.posts:
        raise ContractError("instances differ in agents or posts")
    for a in range(gb.n_agents):
        if a != a1 and gb.prefs[a] != hb.prefs[a]:
            raise ContractError(f"h changes the list of {gb.agents[a]}")
    truthful = _popular_ranks(gb, gb, a1)
    falsified = _popular_ranks(gb, hb, a1)
    if truthful is None or falsified is None:
        raise ContractError("both instances must admit a popular matching")
    return oracle.better_always(min(truthful), max(truthful), falsified)


@dataclass(frozen=True)
class EquilibriumVerdict:
    equilibrium: bool
    witness: Optional[StrategyOutcome] = None
    case: str = ""   # which branch of the component case split decided it

    def to_json(self, inst: Instance) -> dict:
        out: dict = {"equilibrium": self.equilibrium}
        if self.witness is not None:
            out["witness"] = self.witness.to_json(inst)
        return out


def is_truthful_equilibrium(inst: Instance) -> EquilibriumVerdict:
    """Decide whether truthful lists form an equilibrium.

    Split on the number of non-sink components of G~_M~: none means
    equilibrium, two or more means some FS agent can cheat, and exactly one
    needs a look at individual agents.
    """
    g = _augmented(inst)
    res = analyse(g)
    if res is None:
        raise ContractError("instance admits no popular matching")
    g_ctx, _, _, classes = res
    lifted = _lift(g, g_ctx)
    sg, mt = lifted.sg, lifted.ctx.m
    non_sink = sg.non_sink_components()

    if not non_sink:
        return EquilibriumVerdict(True, case="no-non-sink")

    fs_agents = [a for a, c in enumerate(classes) if c == FS]
    if len(non_sink) >= 2:
        for a in fs_agents:
            out = strategy_fs_agent(g, a, _checked=True)
            if out.falsify:
                return EquilibriumVerdict(False, out, case="several-non-sink")
        raise ContractError("two non-sink components but no FS agent can cheat")

    for a in fs_agents:
        if sg.in_sink_component(mt[a]):
            out = strategy_fs_agent(g, a, _checked=True)
            if out.falsify:
                return EquilibriumVerdict(False, out, case="fs-in-sink")
    for a, c in enumerate(classes):
        if c == S and not sg.in_sink_component(mt[a]):
            out = strategy_s_agent(g, a, _checked=True)
            if out.falsify:
                return EquilibriumVerdict(False, out, case="s-agent")
    return EquilibriumVerdict(True, case="one-non-sink")


def equilibrium_by_scan(inst: Instance) -> EquilibriumVerdict:
    """Run best_strategy for every agent; the first cheater is the witness."""
    g = _augmented(inst)
    for a in range(g.n_agents):
        out = best_strategy(g, a)
        if out.falsify:
            return EquilibriumVerdict(False, out, case="scan")
    return EquilibriumVerdict(True, case="scan")
