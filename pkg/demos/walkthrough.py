"""A guided tour: bounds for one valuation date, a sensitivity, and the simulator check.

Run with ``python demos/walkthrough.py``.
"""

from fdbounds import almsim, cases
from fdbounds.bounds import Scenario, bounds_report, sensitivity_grid

# %% Base case for 2019.  Currency is in billions.
case = cases.base_case(2019)
rep = bounds_report(case.bs, case.params, case.curve, case.vols)
print(f"2019: LB {rep.lb_hat:.2f}  UB {rep.ub_hat:.2f}  FDB_hat {rep.fdb_hat:.2f}  reported {case.bs.fdb_reported:.2f}")
print(f"      half-width {rep.pct('epsilon'):.2f}% of MV0, deviation {rep.pct('delta'):.2f}% of MV0")

# %% Doubling the interest-rate vol widens the gap between the bounds.
(row,) = sensitivity_grid(case.bs, case.params, case.curve, case.vols, [Scenario("vol x2", "vol", 2.0)])
print(f"vol x2: LB moves {row.d_lb:+.2f}, UB moves {row.d_ub:+.2f} (percent of reported FDB)")

# %% The Monte Carlo ledger values FDB directly and should sit between the bounds.
L, sim_rep, bracket = almsim.bracket_run(almsim.conforming(), almsim.conforming_model(paths=4000))
print(f"simulated FDB {bracket.fdb_mc}  bounds [{bracket.lb:.2f}, {bracket.ub:.2f}]  inside: {bracket.inside}")
print(f"representation residual {almsim.verify_representation(L)}")
