"""Compare top-down grammars against the rewriting oracle on random systems.

Prints one line per system with the pair counts and timings, then a summary.
"""

import argparse
import time

from ratrw.generators import SystemConfig, random_systems
from ratrw.grammars import enumerate_tuples
from ratrw.rewriting import reachable
from ratrw.terms import ground_terms, size
from ratrw.topdown import build_grammar, overlap_set


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--bound", type=int, default=6, help="size bound on both sides of a pair")
    ap.add_argument("--slack", type=int, default=6, help="extra size allowed for intermediate terms")
    ap.add_argument("--max-rules", type=int, default=3)
    args = ap.parse_args()

    cfg = SystemConfig(max_rules=args.max_rules)
    bad = 0
    for k, R in enumerate(random_systems(args.seed, args.count, cfg)):
        t0 = time.perf_counter()
        G = build_grammar(R)
        ours = set(enumerate_tuples(G, None, 2 * args.bound, max_component=args.bound))
        t1 = time.perf_counter()
        oracle = {(s, t) for s in ground_terms(R.alphabet, args.bound)
                  for t in reachable(R, s, None, args.bound + args.slack) if size(t) <= args.bound}
        t2 = time.perf_counter()
        ok = ours == oracle
        bad += not ok
        rules = "; ".join(map(str, R.rules))
        print(f"{k:3d} {'ok ' if ok else 'BAD'} |O|={len(overlap_set(R))} pairs={len(oracle):6d} "
              f"grammar={t1 - t0:5.2f}s oracle={t2 - t1:5.2f}s  {rules}")
    print(f"{args.count - bad}/{args.count} systems agree")


if __name__ == "__main__":
    main()
