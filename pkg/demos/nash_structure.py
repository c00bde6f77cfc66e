"""Nash equilibrium structure of extreme-price auctions on a desk-scale game.

For v=(4,8) with bids 0..8 the pure equilibria of both the winner-bid and
loser-bid auctions are exactly the ties (p,p) with p in the Nash range
{2,3,4}; payoffs split the equity surplus as (c_l + t, c_h + (ES - t)).
Equal bids are weak equilibria in the extreme-price auctions but strict in
the average-bid auction, and the mixing bounds show which winner-bid
equilibria can survive as limits of payoff-monotone behavior.
"""

from alpha_auctions import (
    MixedProfile,
    ab,
    constants,
    enumerate_pure_nash,
    is_nash,
    lb,
    mixing_bounds,
    resolve,
    strictness,
    wb,
)

V_L, V_H, P_MAX = 4, 8, 8

for maker, name in ((wb, "winner-bid"), (ab, "average-bid"), (lb, "loser-bid")):
    spec = maker(V_L, V_H, P_MAX)
    cons = constants(spec)
    pure = enumerate_pure_nash(spec)
    print(f"\n{name} auction, v=({V_L},{V_H}), bids 0..{P_MAX}")
    print(f"  Nash range {{{cons.c_l},...,{cons.c_h}}}, equity surplus {cons.equity_surplus}")
    for b_l, b_h in pure:
        out = resolve(spec, b_l, b_h)
        cert = is_nash(spec, MixedProfile.point_masses(spec, b_l, b_h))
        print(f"  ({b_l},{b_h}): transfer {out.transfer}, payoffs ({out.payoff_l},{out.payoff_h}), "
              f"{strictness(spec, b_l, b_h)}, determinant bid {cert.payoff_determinant_bid}")

print("\nwinner-bid mixing bounds on sigma_l(p) by determinant bid p:")
spec = wb(V_L, V_H, P_MAX)
for p in range(constants(spec).c_l + 1, constants(spec).c_h + 1):
    b = mixing_bounds(spec, p)
    verdict = "infeasible -> excluded" if b.infeasible else "feasible"
    print(f"  p={p}: {b.lower} <= sigma_l(p) <= {b.upper}  ({verdict})")
