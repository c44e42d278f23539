import itertools

import pytest
from hypothesis import given, settings

from popmatch import oracle
from popmatch.engine import (
    E,
    O,
    U,
    BipartiteGraph,
    context_for,
    eou_labels,
    max_matching,
    popular_matching,
    prune_report,
    rank1_graph,
    satisfies_characterisation,
)
from popmatch.model import ContractError, Matching, augment_last_resorts, matching_from_names

from conftest import instances


def brute_max_matching_size(g: BipartiteGraph) -> int:
    best = 0
    edges = g.edges()
    for k in range(min(g.n_agents, g.n_posts), 0, -1):
        for combo in itertools.combinations(edges, k):
            if len({a for a, _ in combo}) == k and len({p for _, p in combo}) == k:
                return k
    return best


def names(inst, posts):
    return {inst.posts[p] for p in posts}


def test_ex1_rank1_graph(ex1_aug):
    g1 = rank1_graph(ex1_aug)
    m1 = max_matching(g1)
    # a1..a6 all want p1-p3 first; only p1, p2, p3 and one of p4/p5 can be covered
    assert len(m1) == brute_max_matching_size(g1) == 4
    labels = eou_labels(g1, m1)
    assert names(ex1_aug, labels.posts_with(O)) == {"p1", "p3"}
    assert names(ex1_aug, labels.posts_with(U)) == {"p2"}
    assert "p8" in names(ex1_aug, labels.posts_with(E))


def test_ex1_second_choices(ex1_aug):
    ctx = popular_matching(ex1_aug)
    got = {ex1_aug.agents[a]: names(ex1_aug, s) for a, s in enumerate(ctx.s)}
    assert got == {
        "a1": {"p6", "p7"}, "a2": {"p8"}, "a3": {"p8"}, "a4": {"p8"},
        "a5": {"p4"}, "a6": {"p9"}, "a7": {"p4", "p5"},
    }


def test_ex1_prune_report(ex1_aug):
    ctx = popular_matching(ex1_aug)
    step4, step9 = prune_report(ctx)
    as_names = lambda es: {(ex1_aug.agents[a], ex1_aug.posts[p]) for a, p in es}
    assert ("a4", "p3") in as_names(step4)
    assert ("a1", "p1") in as_names(step9)
    assert names(ex1_aug, ctx.labels2.posts_with(U)) == {"p1", "p2", "p8"}


def test_ex1_solution_is_popular(ex1_aug):
    ctx = popular_matching(ex1_aug)
    assert len(ctx.m) == 7
    assert satisfies_characterisation(ex1_aug, ctx.m)
    assert oracle.is_popular_bruteforce(ex1_aug, ctx.m)


def test_context_for_rejects(ex1_aug, m_eq1):
    context_for(ex1_aug, m_eq1)
    with pytest.raises(ContractError, match="agent-complete"):
        context_for(ex1_aug, m_eq1.replace({0: None}))
    # l(a2) is neither in f(a2) nor s(a2)
    with pytest.raises(ContractError, match="cannot be in a popular matching"):
        context_for(ex1_aug, m_eq1.replace({1: ex1_aug.last_resort[1]}))
    with pytest.raises(ContractError, match="augmented"):
        context_for(ex1_aug.base(), m_eq1)


def test_needs_augmented(ex1):
    with pytest.raises(ContractError):
        popular_matching(ex1)


def test_max_matching_bad_seed():
    g = BipartiteGraph.from_edges(1, 2, [(0, 0)])
    with pytest.raises(ContractError):
        max_matching(g, Matching({0: 1}))


def test_labels_reject_non_maximum():
    g = BipartiteGraph.from_edges(2, 2, [(0, 0), (0, 1), (1, 0)])
    with pytest.raises(ContractError):
        eou_labels(g, Matching({0: 0}))


def test_no_popular_matching():
    from popmatch.model import parse_instance

    inst = augment_last_resorts(parse_instance("a1: p1 p2 p3\na2: p1 p2 p3\na3: p1 p2 p3\n"))
    assert popular_matching(inst) is None
    assert oracle.count_popular(inst) == 0


def _reversed_max_matching(g: BipartiteGraph) -> Matching:
    n = g.n_agents
    rev = BipartiteGraph.from_edges(n, g.n_posts, ((n - 1 - a, p) for a, p in g.edges()))
    return Matching((n - 1 - a, p) for a, p in max_matching(rev).items())


@given(instances(6, 6))
@settings(max_examples=150, deadline=None)
def test_labels_do_not_depend_on_the_maximum_matching(inst):
    g1 = rank1_graph(augment_last_resorts(inst))
    a, b = max_matching(g1), _reversed_max_matching(g1)
    assert len(a) == len(b)
    assert eou_labels(g1, a) == eou_labels(g1, b)


@given(instances(5, 5))
@settings(max_examples=100, deadline=None)
def test_size_of_maximum_matching_from_labels(inst):
    g1 = rank1_graph(inst)
    m = max_matching(g1)
    lab = eou_labels(g1, m)
    n_odd = len(lab.agents_with(O)) + len(lab.posts_with(O))
    n_unr = len(lab.agents_with(U)) + len(lab.posts_with(U))
    assert len(m) == n_odd + n_unr // 2 == brute_max_matching_size(g1)
    # odd vertices are matched to even ones, unreachable to unreachable
    for a, p in m.items():
        pair = {lab.agent[a], lab.post[p]}
        assert pair in ({O, E}, {U})


def _lift(aug, row):
    keep = aug.real_posts()
    return Matching({a: keep[p] if p >= 0 else aug.last_resort[a] for a, p in enumerate(row)})


@given(instances(4, 4))
@settings(max_examples=120, deadline=None)
def test_characterisation_matches_the_vote_definition(inst):
    aug = augment_last_resorts(inst)
    structural = {
        m for m in (_lift(aug, row) for row in oracle.all_matchings(inst))
        if satisfies_characterisation(aug, m)
    }
    assert structural == set(oracle.enumerate_popular(aug))


@given(instances(5, 5))
@settings(max_examples=120, deadline=None)
def test_existence_and_pinned_rank1(inst):
    aug = augment_last_resorts(inst)
    pops = oracle.enumerate_popular(aug)
    ctx = popular_matching(aug)
    assert (ctx is None) == (not pops)
    if ctx is None:
        return
    assert ctx.m in set(pops)
    for a in range(inst.n_agents):
        pinned = popular_matching(aug, rank1_for=a)
        can = any(m[a] in ctx.f[a] for m in pops)
        assert (pinned is not None) == can
        if pinned is not None:
            assert pinned.m[a] in ctx.f[a]
            assert pinned.m in set(pops)


def test_matching_from_names_roundtrip(ex1_aug):
    m = matching_from_names(ex1_aug, [("a1", "p6")])
    assert m == Matching({0: 5})
