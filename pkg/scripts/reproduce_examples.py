"""Print the published-value comparison for both worked parameter sets.

    python3 scripts/reproduce_examples.py [--json]
"""
import argparse
import json
from dataclasses import asdict

from dunkl_sobolev.config import PRESETS
from dunkl_sobolev.verify import run_verify


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    args = ap.parse_args()
    out = {}
    for name, cfg in PRESETS.items():
        report = run_verify(cfg)
        out[name] = {
            "passed": report.passed,
            "failures": [c.name for c in report.failures()],
            "discrepancies": [asdict(d) for d in report.discrepancies],
        }
        if args.json:
            continue
        print(f"== {name} ({report.seconds:.2f}s), invariants "
              f"{'pass' if report.passed else 'fail: ' + ', '.join(out[name]['failures'])}")
        print(f"{'item':<16}{'printed':>14}{'default':>16}{'paper-compat':>16}{'oracle':>16}")
        for d in report.discrepancies:
            cells = [f"{x:>16.6g}" if x is not None else f"{'-':>16}" for x in (d.default, d.compat, d.oracle)]
            printed = d.printed if len(d.printed) <= 13 else d.printed[:10] + "..."
            print(f"{d.item:<16}{printed:>14}{''.join(cells)}")
            print(f"    {d.note}")
    if args.json:
        print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
