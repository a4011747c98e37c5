"""Run the planted-partition lemma suite and print the sampled-power diagnostic."""

import sys

from h2nt import lemmas


def main():
    reports = lemmas.run_suite()
    for r in reports:
        print(r.summary())
    for d in reports[-1].diagnostics:
        print("  ", {k: round(v, 4) if isinstance(v, float) else v for k, v in d.items()})
    sys.exit(0 if all(r.passed for r in reports) else 1)


if __name__ == "__main__":
    main()
