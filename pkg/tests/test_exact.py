"""Exact model structure, branch-and-bound optimum, and the brute-force
reference."""

from __future__ import annotations

import math

import pytest

from dsglite import (SceneGraph, TerminalQuery, brute_force_oracle,
                     build_ilp_model, gen_fig3_toy, solve_exact)

from conftest import random_small_instance


def path3() -> SceneGraph:
    nodes = [(i, 0, (float(i), 0.0, 0.0), "") for i in range(3)]
    return SceneGraph(1, nodes, [(0, 1, 1.0), (1, 2, 1.0)], {}, check="basic")


# -- model structure ---------------------------------------------------------


def test_model_variable_counts():
    g = path3()
    model = build_ilp_model(g, TerminalQuery(pairs=((0, 2),), budget=3))
    assert len(model.node_vars) == 3
    assert len(model.directed_edges) == 4          # 2 edges, both orientations
    assert model.num_edge_vars == 4                # 2 * |E| * |P|


def test_model_flow_rhs():
    g = path3()
    model = build_ilp_model(g, TerminalQuery(pairs=((0, 2),), budget=3))
    assert model.flow_rhs(0, 0) == 1
    assert model.flow_rhs(0, 2) == -1
    assert model.flow_rhs(0, 1) == 0


def test_lp_export_is_bit_stable(tmp_path):
    g = path3()
    model = build_ilp_model(g, TerminalQuery(pairs=((0, 2),), budget=2))
    a, b = tmp_path / "a.lp", tmp_path / "b.lp"
    model.export_lp(a)
    model.export_lp(b)
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("\\")
    assert "Minimize" in text and "Binary" in text and text.rstrip().endswith("End")
    assert "budget:" in text and "<= 2" in text
    assert "beta >= 0" in text
    # one distortion row per pair, flow and degree rows per pair and node
    assert text.count("dist_p") == 1
    assert text.count("flow_p0_n") == 3
    assert text.count("deg_p0_n") == 3


def test_model_infeasible_below_terminal_count():
    g = path3()
    sol = solve_exact(build_ilp_model(g, TerminalQuery(pairs=((0, 2),), budget=1)))
    assert sol.status == "infeasible"
    assert math.isinf(sol.beta_opt)


# -- optimum values -----------------------------------------------------------


def test_full_budget_gives_zero_distortion():
    g, pairs = random_small_instance(3)
    q = TerminalQuery(pairs=pairs, budget=g.num_nodes)
    sol = solve_exact(build_ilp_model(g, q))
    assert sol.status == "optimal"
    assert sol.beta_opt == 0.0
    assert brute_force_oracle(g, q).beta_opt == 0.0


def test_fig3_forced_detour_distortion():
    """Excluding the short route's interior marker node leaves the 5-edge
    detour: stretch (5 - 3) / 1 = 2."""
    g, cut = gen_fig3_toy()
    q = TerminalQuery(pairs=((0, 3),), budget=g.num_nodes)
    pruned = g.subgraph([n for n in g.node_ids() if n != cut])
    keep = frozenset(pruned.node_ids())
    from dsglite.exact import _subset_beta
    model = build_ilp_model(g, q)
    assert _subset_beta(g, keep, q.pairs, model.pair_dist,
                        model.pair_wmax) == pytest.approx(2.0)
    # the unconstrained optimum keeps the short route instead
    assert solve_exact(model).beta_opt == 0.0


def test_exact_on_fig3_budgets():
    g, _ = gen_fig3_toy()
    # 4 nodes hold the length-3 route
    sol = solve_exact(build_ilp_model(g, TerminalQuery(pairs=((0, 3),), budget=4)))
    assert sol.status == "optimal"
    assert sol.beta_opt == 0.0
    assert set(sol.selected_nodes) >= {0, 1, 2, 3}
    # 3 nodes cannot connect 0 and 3 at all
    sol = solve_exact(build_ilp_model(g, TerminalQuery(pairs=((0, 3),), budget=3)))
    assert sol.status == "infeasible"


def test_solution_paths_use_selected_nodes():
    g, pairs = random_small_instance(8)
    q = TerminalQuery(pairs=pairs, budget=max(len(set(sum(map(list, pairs), []))) + 2,
                                              4))
    sol = solve_exact(build_ilp_model(g, q))
    if sol.status == "optimal":
        assert len(sol.selected_nodes) <= q.budget
        for path in sol.pair_paths:
            assert path is not None
            assert set(path) <= set(sol.selected_nodes)


@pytest.mark.parametrize("seed", range(20))
def test_exact_matches_oracle(seed):
    g, pairs = random_small_instance(seed)
    nterm = len({x for p in pairs for x in p})
    for budget in range(nterm, g.num_nodes + 1):
        q = TerminalQuery(pairs=pairs, budget=budget)
        a = brute_force_oracle(g, q)
        b = solve_exact(build_ilp_model(g, q))
        if math.isinf(a.beta_opt):
            assert math.isinf(b.beta_opt)
        else:
            assert b.beta_opt == a.beta_opt  # zero tolerance


def test_beta_opt_nonincreasing_in_budget():
    g, pairs = random_small_instance(5)
    nterm = len({x for p in pairs for x in p})
    prev = math.inf
    for budget in range(nterm, g.num_nodes + 1):
        sol = solve_exact(build_ilp_model(g, TerminalQuery(pairs=pairs,
                                                           budget=budget)))
        if math.isfinite(sol.beta_opt):
            assert sol.beta_opt <= prev + 1e-12
            prev = sol.beta_opt


def test_timeout_returns_incumbent_status():
    g, pairs = random_small_instance(0)
    q = TerminalQuery(pairs=pairs, budget=len({x for p in pairs for x in p}))
    sol = solve_exact(build_ilp_model(g, q), time_limit=0.0)
    assert sol.status in ("timeout", "infeasible")


def test_oracle_guard_rejects_large_instances():
    nodes = [(i, 0, (float(i), 0.0, 0.0), "") for i in range(21)]
    edges = [(i, i + 1, 1.0) for i in range(20)]
    g = SceneGraph(1, nodes, edges, {}, check="basic")
    with pytest.raises(ValueError):
        brute_force_oracle(g, TerminalQuery(pairs=((0, 20),), budget=21))


def test_oracle_infeasible_when_no_subset_connects():
    # star where both terminals only reach each other via the hub
    nodes = [(i, 0, (float(i), 0.0, 0.0), "") for i in range(3)]
    g = SceneGraph(1, nodes, [(0, 1, 1.0), (1, 2, 1.0)], {}, check="basic")
    sol = brute_force_oracle(g, TerminalQuery(pairs=((0, 2),), budget=2))
    assert sol.status == "infeasible"
    assert math.isinf(sol.beta_opt)
