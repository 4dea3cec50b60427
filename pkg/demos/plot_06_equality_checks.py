"""
Where no gap can occur
======================

On at most four sites, and on sites along a line, the two functionals
always agree. The randomized suites check this, along with the simplex
solver against brute-force vertex enumeration.
"""

from coulomb_sites import verify

for result in (
    verify.four_site_suite(100, seed=0),
    verify.collinear_suite(100, seed=0),
    verify.exchange_identity_suite(100, seed=0),
    verify.lp_oracle_suite(100, seed=0),
):
    status = "ok" if result.passed else "FAILED"
    print(f"{result.name:<18} {result.cases:4d} cases  max deviation "
          f"{result.max_deviation:.1e}  {status}")
