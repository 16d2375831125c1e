"""The combinatorial identities behind the kernel, checked in exact arithmetic.

Every family in the suite is evaluated with ``fractions.Fraction`` or
Python integers; a single mismatch would be a genuine failure.

Run with ``python3 demos/exact_identities.py``.
"""
from coupledsv.identities import run_suite

for v in run_suite(summa_max=12, summa_nu=4):
    skipped = f", {v.skips} skipped near poles" if v.skips else ""
    print(f"{v.family:>20}: {v.passes}/{v.grid_size} hold{skipped}")
