#!/usr/bin/env python3
"""Cross-check the structural solver against brute force on a seeded corpus.

    python scripts/crosscheck_corpus.py --count 500 --max-agents 6 --max-posts 6 --seed 0
    python scripts/crosscheck_corpus.py --json results/crosscheck.json
"""

import argparse
import json
import sys
from pathlib import Path

from popmatch.experiments import CorpusConfig, cross_check


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--max-agents", type=int, default=6)
    ap.add_argument("--max-posts", type=int, default=6)
    ap.add_argument("--tie-probs", type=float, nargs="+", default=[0.0, 0.3, 0.6])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", type=Path, help="also write the report here")
    args = ap.parse_args()

    cfg = CorpusConfig(args.count, args.max_agents, args.max_posts, tuple(args.tie_probs), args.seed)
    rep = cross_check(cfg)
    print(f"instances           {rep.instances}")
    print(f"no popular matching {rep.without_popular}")
    print(f"existence mismatch  {rep.existence_mismatch}")
    print(f"pairs mismatch      {rep.pairs_mismatch}")
    print(f"classes mismatch    {rep.classes_mismatch}")
    print(f"seconds             {rep.seconds:.2f}")
    if rep.failing_seeds:
        print(f"failing instances   {rep.failing_seeds[:20]}")
    if args.json:
        args.json.parent.mkdir(parents=True, exist_ok=True)
        args.json.write_text(json.dumps(rep.as_dict(), indent=2) + "\n")
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
