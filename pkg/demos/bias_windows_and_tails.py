"""Where monotone behavior can take each extreme-price auction.

Prints the theorem windows (expected-bid and payoff bounds, admissible
winning-bid segments) for structure 1A, then follows the logit continuation
path deep into large precision and watches it settle inside those windows:
the winner-bid path lands at determinant bid 11 (just above c_l = 10) and
the loser-bid path at 30 (= c_h), the mirrored biases.

Run time is a couple of minutes because the loser-bid tail needs the Newton
corrector far past the plotting range.
"""

import numpy as np

from alpha_auctions import (
    bias_window,
    enumerate_pure_nash,
    evaluate_statements,
    lb,
    nash_distance,
    solve_qre,
    t_value,
    wb,
)
from alpha_auctions.monotonicity import profile_stats

for maker, name in ((wb, "WB"), (lb, "LB")):
    spec = maker(20, 60, 160)
    window = bias_window(name, spec)
    print(f"\n{name} structure 1A: t(v) = {t_value(name, spec)}")
    print(f"  LV expected-bid window: {window.bid_window_lv}")
    print(f"  HV expected-bid window: {window.bid_window_hv}")
    print(f"  payoff cap {window.payoff_cap}, payoff floor {window.payoff_floor}")
    print(f"  admissible winning bids: {list(window.admissible_segment)}")

    p_values = sorted({p for p, _ in enumerate_pure_nash(spec, cap=160)})
    grid = [round(0.05 * k, 10) for k in range(7)]
    lam = grid[-1]
    while lam < 40:
        lam = round(lam * 1.6, 9)
        grid.append(lam)
    prev = None
    print("  lambda   E(b_l)   E(b_h)    pi_l    pi_h  dist_to_nash  statements")
    for lam in grid:
        point = solve_qre(spec, float(lam), init=prev)
        prev = point.profile
        e_bl, e_bh, pi_l, pi_h = profile_stats(spec, point.profile)
        dist, best_p = nash_distance(spec, point.profile, p_values)
        st = evaluate_statements(spec, point.profile)
        flags = "".join("-" if st[k] is None else ("y" if st[k] else "N") for k in (1, 2, 3))
        print(f"  {lam:6.2f} {e_bl:8.2f} {e_bh:8.2f} {pi_l:7.2f} {pi_h:7.2f} "
              f"{dist:10.3f}@{best_p:<3d}  1..3={flags}")
