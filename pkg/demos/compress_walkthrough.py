"""Walk through the compression pipeline on a mid-size synthetic world.

Generates a ~1000-node three-layer world, picks terminals, builds the
pairwise spanner, and compares both compressors across a ladder of budgets.
"""

import numpy as np

from dsglite import (GridWorldSpec, SpannerParams, TerminalQuery, bud_lite,
                     build_spanner, gen_grid_world, tod_lite)

world = gen_grid_world(GridWorldSpec(rooms_x=4, rooms_y=3,
                                     places_per_room_side=9, seed=5))
print(f"world: {world.num_nodes} nodes, {world.num_edges} edges, "
      f"{world.layer_count} layers")

rng = np.random.default_rng(0)
places = world.nodes_in_layer(0)
terminals = [places[i] for i in rng.choice(len(places), size=5, replace=False)]
pairs = tuple((terminals[0], t) for t in terminals[1:])
params = SpannerParams(seed=0)

spanner = build_spanner(world, pairs, params)
print(f"spanner: {spanner.subgraph.num_nodes} nodes "
      f"({spanner.subgraph.num_edges} edges) for {len(pairs)} pairs\n")

print(f"{'budget':>7} {'alg':>4} {'size':>5} {'beta':>8} {'met':>5} {'steps':>6}")
for budget in (15, 30, 60, 120):
    query = TerminalQuery(pairs=pairs, budget=budget)
    for name, fn in (("bud", bud_lite), ("tod", tod_lite)):
        res = fn(world, query, params, spanner=spanner)
        print(f"{budget:>7} {name:>4} {res.compressed.num_nodes:>5} "
              f"{res.beta_achieved:>8.3f} {str(res.met_budget):>5} "
              f"{res.iterations_k:>6}")
print("\nbottom-up abstracts spanner paths into rooms; top-down expands the")
print("coarse skeleton toward the spanner until the budget blocks it.")
