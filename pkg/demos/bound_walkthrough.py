"""Compare measured worst-case terminal distances against the closed-form
stretch bound for bottom-up compression runs at several budgets."""

import numpy as np

from dsglite import (GridWorldSpec, SpannerParams, TerminalQuery,
                     achieved_distortion, bounds_profile, bud_bound, bud_lite,
                     gen_grid_world)

world = gen_grid_world(GridWorldSpec(rooms_x=4, rooms_y=3,
                                     places_per_room_side=9, seed=5))
rng = np.random.default_rng(1)
places = world.nodes_in_layer(0)
terminals = [places[i] for i in rng.choice(len(places), size=6, replace=False)]
pairs = tuple((terminals[0], t) for t in terminals[1:])

params = SpannerParams(seed=0)
profile = bounds_profile(world, pairs)
beta_spanner = params.additive_allowance(world.num_nodes, 1.0)

print(f"{'budget':>7} {'k':>5} {'l_max':>6} {'alpha_k':>8} "
      f"{'measured':>9} {'bound':>9}")
for budget in (10, 30, 60, 100, 150):
    res = bud_lite(world, TerminalQuery(pairs=pairs, budget=budget), params)
    _, table = achieved_distortion(world, res.compressed, pairs)
    measured = max(e.dist_compressed for e in table)
    report = bud_bound(profile, res.nodes_abstracted, len(pairs),
                       beta_spanner, measured_max_distance=measured)
    print(f"{budget:>7} {report.k:>5} {report.l_max:>6} {report.alpha_k:>8} "
          f"{measured:>9.1f} {report.bound_value:>9.1f}")
print("\nthe bound always dominates the measured distance. with zero")
print("iterations it reports the spanner-level guarantee; once abstraction")
print("reaches the top layer it is driven by the cross-layer edge ladder")
print("(the clamp warnings flag the exhausted middle term).")
