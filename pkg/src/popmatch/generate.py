"""Random instances for corpora and property tests.

Each agent draws a list length uniformly from [1, n_posts], a random
sequence of that many distinct posts, and then merges each adjacent pair of
the sequence into one tie with probability ``tie_prob``.  Everything comes
from one ``random.Random(seed)``, so a seed pins the instance.
"""

from __future__ import annotations

import random
from collections.abc import Iterator
from typing import Optional

from .model import Instance


def random_instance(
    n_agents: int,
    n_posts: int,
    tie_prob: float = 0.0,
    seed: Optional[int] = None,
    rng: Optional[random.Random] = None,
) -> Instance:
    if n_agents < 1 or n_posts < 1:
        raise ValueError("need at least one agent and one post")
    if not 0.0 <= tie_prob <= 1.0:
        raise ValueError("tie_prob must be in [0, 1]")
    rng = rng or random.Random(seed)
    prefs = []
    for _ in range(n_agents):
        length = rng.randint(1, n_posts)
        seq = rng.sample(range(n_posts), length)
        tiers = [[seq[0]]]
        for p in seq[1:]:
            if rng.random() < tie_prob:
                tiers[-1].append(p)
            else:
                tiers.append([p])
        prefs.append(tuple(frozenset(t) for t in tiers))
    return Instance(
        tuple(f"a{i + 1}" for i in range(n_agents)),
        tuple(f"p{i + 1}" for i in range(n_posts)),
        tuple(prefs),
    )


def corpus(
    count: int,
    max_agents: int,
    max_posts: int,
    tie_probs=(0.0, 0.3, 0.6),
    seed: int = 0,
    min_size: int = 1,
) -> Iterator[tuple[int, Instance]]:
    """``count`` instances with sizes drawn from [min_size, max]; yields (index, instance).

    Tie probabilities cycle through ``tie_probs``.
    """
    rng = random.Random(seed)
    for i in range(count):
        n_agents = rng.randint(min_size, max_agents)
        n_posts = rng.randint(min_size, max_posts)
        yield i, random_instance(n_agents, n_posts, tie_probs[i % len(tie_probs)], rng=rng)
