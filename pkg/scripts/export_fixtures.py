#!/usr/bin/env python3
"""Write the benchmark fixtures as problem files for CLI experiments.

Usage: python scripts/export_fixtures.py [out_dir]

Benchmark 3 is a two-branch minimax problem; its file is the smoothed
canonical instance, so objective values reported on it differ from the
original coordinates by the canonicalization constant (printed below).
"""

import sys
from pathlib import Path

from canodual import fixtures, serialize_problem, smooth_and_canonicalize


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("fixtures")
    out.mkdir(parents=True, exist_ok=True)
    (out / "ex1.json").write_text(serialize_problem(fixtures.example1()))
    (out / "ex2.json").write_text(serialize_problem(fixtures.example2()))
    can = smooth_and_canonicalize(fixtures.example3())
    (out / "ex3.json").write_text(serialize_problem(can.to_problem()))
    print(f"wrote ex1.json, ex2.json, ex3.json to {out}/")
    print(f"ex3.json is the canonical smoothed form; original values = "
          f"reported values + {can.value_shift:g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
