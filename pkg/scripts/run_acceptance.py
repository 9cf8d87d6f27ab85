"""Run the acceptance criteria and print one line per criterion.

    python3 scripts/run_acceptance.py            # all fifteen
    python3 scripts/run_acceptance.py 1 5 12     # a subset
"""

import argparse
import sys

from bubblewaves import checks


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("numbers", nargs="*", type=int)
    p.add_argument("--suite", choices=sorted(checks.SUITES))
    args = p.parse_args()
    results = checks.run_checks(args.numbers or None, args.suite)
    for r in results:
        print(r.line())
        if r.detail:
            print("      " + ", ".join(f"{k}={v}" for k, v in r.detail.items()))
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
