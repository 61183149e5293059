#!/usr/bin/env python3
"""Smoke test for the stable_hhh Python bindings.

Expects the extension to be built already:

    cargo build -p stable-hhh-py

The shared object is loaded straight from target/ (release preferred,
then debug).  Exit code 0 means every check passed.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def load_module():
    candidates = [ROOT / "target" / p / "libstable_hhh.so" for p in ("release", "debug")]
    src = next((c for c in candidates if c.exists()), None)
    if src is None:
        sys.exit("build the bindings first: cargo build -p stable-hhh-py")
    d = Path(tempfile.mkdtemp(prefix="stable_hhh_"))
    shutil.copy2(src, d / "stable_hhh.so")
    sys.path.insert(0, str(d))
    import stable_hhh

    return stable_hhh


FAILURES = []


def check(name, ok):
    print(("ok   - " if ok else "FAIL - ") + name)
    if not ok:
        FAILURES.append(name)


def nz(table):
    return {k: v for k, v in table.items() if v}


def main():
    m = load_module()

    # Permutations: parsing, cycle data, group operations.
    w = m.Permutation(3, "(1 2 3)")
    check("three-cycle prints in cycle notation", str(w) == "(1 2 3)")
    check("three-cycle has cycle type [3]", w.cycle_type() == [3])
    check("three-cycle sends 1 to 2", w.apply(1) == 2)
    check("inverse composes to the identity", w.compose(w.inverse()) == m.Permutation(3))
    check(
        "block permutation of type (2,1)",
        m.Permutation.of_cycle_type(3, [2, 1]).cycle_type() == [2, 1],
    )

    # Closed presentation of the three-cycle: free ring, shifted unit.
    p = m.presentation(3, perm="(1 2 3)")
    check("three-cycle unit shift is (-4, 2, 0)", p.unit_shift == (-4, 2, 0))
    check("three exterior generators", len(p.exterior_degrees) == 3)
    check("first exterior degree is (-2, 0, 1)", p.exterior_degrees[0] == (-2, 0, 1))
    names = dict(p.variables())
    check("ring keeps a degree (-4, 2, 0) variable u2", names.get("u2") == (-4, 2, 0))

    # Closed table equals the Poincaré-series expansion.
    tbl = nz(p.table(-8, 4, 3, 1))
    st = nz(m.series_table(3, [3], -8, 4, 3, 1))
    check("closed table matches the series (n=3 three-cycle)", tbl == st)

    # Chain-level oracle agrees with the series for the rank-two transposition.
    ot = nz(m.oracle_table(2, -8, 4, 3, 2, perm="(1 2)", jobs=1))
    st2 = nz(m.series_table(2, [2], -8, 4, 3, 2))
    check("oracle table matches the series (n=2 transposition)", ot == st2)

    # Identity suite and JSON documents.
    check("identity suite passes at rank 3", m.verify_identities(3))
    doc = json.loads(m.compute_json(2, perm="(1 2)", q_window=(-6, 4), t_max=3, a_max=2))
    check("compute document carries the schema tag", doc["schema"] == "stable-hhh/1")
    check("compute document records the cycle type", doc["cycle_type"] == [2])
    trace = json.loads(m.simplify_json(2))
    check("simplify document records row moves", len(trace["trace"]["steps"]) > 0)

    # Conflicting twist inputs are rejected.
    try:
        m.presentation(3, perm="(1 2 3)", cycle_type=[3])
        check("conflicting twist inputs raise ValueError", False)
    except ValueError:
        check("conflicting twist inputs raise ValueError", True)

    if FAILURES:
        print(f"\n{len(FAILURES)} check(s) failed")
        sys.exit(1)
    print("\nall checks passed")


if __name__ == "__main__":
    main()
