#!/usr/bin/env python3
"""Regenerates tests/ttest_fixtures.inc.

Emits 50 paired datasets with reference t statistics and two-tailed
p-values computed by scipy, used as an independent cross-check of the
C++ paired t-test. Values are frozen into the repo so the test suite
does not depend on Python at build time.
"""

import numpy as np
from scipy import stats

OUT = "tests/ttest_fixtures.inc"


def fmt(x: float) -> str:
    return repr(float(x))


def main() -> None:
    rng = np.random.default_rng(20240817)
    rows = []
    for k in range(50):
        n = int(rng.integers(2, 101))
        scale_a = float(rng.uniform(0.5, 50.0))
        shift = float(rng.normal(0.0, 5.0))
        a = rng.normal(30.0, scale_a, size=n)
        b = a + shift + rng.normal(0.0, float(rng.uniform(0.01, 10.0)), size=n)
        t, p = stats.ttest_rel(a, b)
        rows.append((a, b, float(t), float(p)))

    with open(OUT, "w") as f:
        f.write("// Generated by tools/make_ttest_fixtures.py; do not edit.\n")
        f.write("// Each entry: paired samples a, b with the reference\n")
        f.write("// t statistic and two-tailed p-value.\n")
        f.write("static const PairedFixture kPairedFixtures[] = {\n")
        for a, b, t, p in rows:
            f.write("    {\n")
            f.write("        {" + ", ".join(fmt(x) for x in a) + "},\n")
            f.write("        {" + ", ".join(fmt(x) for x in b) + "},\n")
            f.write(f"        {fmt(t)},\n")
            f.write(f"        {fmt(p)},\n")
            f.write("    },\n")
        f.write("};\n")
    print(f"wrote {OUT} with {len(rows)} fixtures")


if __name__ == "__main__":
    main()
