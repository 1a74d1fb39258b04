"""Print the acceptance table; exit status 1 when any criterion fails."""

import argparse
import sys

from ratrw.checks import AcceptanceConfig, run_criterion, CRITERIA


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    args = ap.parse_args()
    cfg = AcceptanceConfig()
    results = []
    for n, *_ in CRITERIA:
        if args.only and n not in args.only:
            continue
        res = run_criterion(n, cfg)
        print(res.line(), flush=True)
        results.append(res)
    passed = sum(r.ok for r in results)
    print(f"{passed}/{len(results)} criteria pass")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
