#!/usr/bin/env python3
"""Tabulate how often a single agent can cheat, by tie probability.

    python scripts/manipulation_survey.py --count 600 --max-agents 5 --max-posts 5 --verify
"""

import argparse

from popmatch.experiments import CorpusConfig, manipulation_survey


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=600)
    ap.add_argument("--max-agents", type=int, default=5)
    ap.add_argument("--max-posts", type=int, default=5)
    ap.add_argument("--min-size", type=int, default=2)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--verify", action="store_true", help="check each outcome by exhaustive search")
    args = ap.parse_args()

    cfg = CorpusConfig(args.count, args.max_agents, args.max_posts, seed=args.seed, min_size=args.min_size)
    rows = manipulation_survey(cfg, verify=args.verify)
    print(f"{'ties':>5} {'inst':>5} {'!eq':>4} {'F':>5} {'S':>4} {'FS':>5} {'S cheat':>8} {'FS cheat':>9}  rank gains")
    for r in rows:
        gains = " ".join(f"{k}:{v}" for k, v in sorted(r.rank_gain.items())) or "-"
        print(
            f"{r.tie_prob:5.1f} {r.instances:5d} {r.not_equilibrium:4d} {r.classes['F']:5d} {r.classes['S']:4d} "
            f"{r.classes['FS']:5d} {r.cheaters['S']:8d} {r.cheaters['FS']:9d}  {gains}"
        )


if __name__ == "__main__":
    main()
