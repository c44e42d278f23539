"""Seeded corpus experiments behind the scripts in ``scripts/``."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import asdict, dataclass, field

from . import oracle
from .analysis import analyse, real_pairs
from .generate import corpus
from .manipulation import FALSIFY, best_strategy, is_truthful_equilibrium
from .model import augment_last_resorts


@dataclass(frozen=True)
class CorpusConfig:
    count: int = 500
    max_agents: int = 6
    max_posts: int = 6
    tie_probs: tuple[float, ...] = (0.0, 0.3, 0.6)
    seed: int = 0
    min_size: int = 1

    def instances(self):
        return corpus(self.count, self.max_agents, self.max_posts, self.tie_probs, self.seed, self.min_size)


@dataclass
class CrossCheckReport:
    config: CorpusConfig
    instances: int = 0
    without_popular: int = 0
    existence_mismatch: int = 0
    pairs_mismatch: int = 0
    classes_mismatch: int = 0
    seconds: float = 0.0
    failing_seeds: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.existence_mismatch or self.pairs_mismatch or self.classes_mismatch)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def cross_check(cfg: CorpusConfig) -> CrossCheckReport:
    """Structural solver against brute force, instance by instance."""
    rep = CrossCheckReport(cfg)
    t0 = time.perf_counter()
    for i, inst in cfg.instances():
        g = augment_last_resorts(inst)
        rep.instances += 1
        res = analyse(g)
        pops = oracle.enumerate_popular(g)
        if (res is None) != (not pops):
            rep.existence_mismatch += 1
            rep.failing_seeds.append(i)
            continue
        if res is None:
            rep.without_popular += 1
            continue
        if set(real_pairs(g, res[2])) != oracle.popular_pairs_bruteforce(g):
            rep.pairs_mismatch += 1
            rep.failing_seeds.append(i)
        if list(res[3]) != oracle.classify_bruteforce(g):
            rep.classes_mismatch += 1
            rep.failing_seeds.append(i)
    rep.seconds = time.perf_counter() - t0
    return rep


@dataclass
class SurveyRow:
    tie_prob: float
    instances: int = 0
    not_equilibrium: int = 0
    classes: Counter = field(default_factory=Counter)
    cheaters: Counter = field(default_factory=Counter)   # class -> agents with a Falsify outcome
    rank_gain: Counter = field(default_factory=Counter)  # true-rank improvement -> agents


def manipulation_survey(cfg: CorpusConfig, verify: bool = False) -> list[SurveyRow]:
    """How often single agents can cheat, split by tie probability.

    With ``verify`` every outcome is compared against exhaustive search and a
    mismatch raises AssertionError.
    """
    rows = {p: SurveyRow(p) for p in cfg.tie_probs}
    for i, inst in cfg.instances():
        g = augment_last_resorts(inst)
        res = analyse(g)
        if res is None:
            continue
        row = rows[cfg.tie_probs[i % len(cfg.tie_probs)]]
        row.instances += 1
        classes = res[3]
        row.classes.update(classes)
        row.not_equilibrium += not is_truthful_equilibrium(g).equilibrium
        for a in range(g.n_agents):
            out = best_strategy(g, a)
            if verify:
                want = oracle.exhaustive_strategy_search(inst, a).optimum
                got = out.true_rank_after if out.kind == FALSIFY else None
                if got != want:
                    raise AssertionError(f"instance {i}, agent {a}: strategy {got}, exhaustive {want}")
            if out.kind == FALSIFY:
                row.cheaters[classes[a]] += 1
                row.rank_gain[out.true_rank_before - out.true_rank_after] += 1
    return [rows[p] for p in cfg.tie_probs]
