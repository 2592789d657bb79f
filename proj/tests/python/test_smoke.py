import itertools

import pytest

import mwucb


def matchings_max(topology, weights):
    best = 0.0
    links = topology.links
    for r in range(len(links) + 1):
        for subset in itertools.combinations(range(len(links)), r):
            nodes = [n for e in subset for n in links[e]]
            if len(nodes) == len(set(nodes)):
                best = max(best, sum(weights[e] for e in subset))
    return best


def test_grid_shape():
    g = mwucb.Topology.grid(3, 3)
    assert g.node_count == 9
    assert g.link_count == 12
    assert g.links[0] == (0, 1)


def test_solver_against_enumeration():
    g = mwucb.Topology.grid(2, 3)
    w = [0.3, 0.9, 0.1, 0.5, 0.7, 0.2, 0.4][: g.link_count]
    x = mwucb.max_weight_activation(g, w)
    assert mwucb.is_admissible(g, x)
    assert sum(wi for wi, xi in zip(w, x) if xi) == pytest.approx(matchings_max(g, w), abs=0)


def test_default_hyperparams():
    assert mwucb.default_hyperparams(10**6, 0.5) == (10000, 194)


CONFIG = """
grid = [3, 3]
horizon = 3000
seed = 7

[arrivals]
kind = "fixed"
lambda = 0.11

[policy]
kind = "mw_ucb"
"""


def test_run_is_deterministic():
    cfg = mwucb.parse_config(CONFIG)
    a = mwucb.run(cfg)
    b = mwucb.run(cfg)
    assert a == b
    assert a["horizon"] == 3000
    assert a["t"][0] == 0 and a["t"][-1] == 3000
    assert a["q_T"] == a["total_backlog"][-1]
    assert a["config_hash"] == cfg.hash()


def test_zero_arrivals_keep_queues_empty():
    cfg = mwucb.parse_config(CONFIG.replace("lambda = 0.11", "lambda = 0.0"))
    assert mwucb.run(cfg)["q_T"] == 0.0


def test_coupled_run_has_no_violations():
    cfg = mwucb.parse_config(CONFIG)
    res = mwucb.coupled_run(cfg, 0.5)
    assert res["violation_count"] == 0
    assert res["imaginary"]["q_T"] <= res["original"]["q_T"] + 1e-9


def test_experiment_round_trip(tmp_path):
    out = mwucb.run_experiment(["fig4a"], tmp_path, horizon=500)
    assert out["failures"] == 0
    assert len(out["cells"]) == 3
    table = mwucb.summarize(out["manifest"])
    assert table.splitlines()[0].startswith("preset,policy,lambda")
    assert len(table.splitlines()) == 4


def test_expand_preset_pairs_environments():
    cells = mwucb.expand_preset("fig4a", horizon=100, seeds=2)
    seeds = {}
    for cell_id, cfg in cells:
        seeds.setdefault(cfg.policy, []).append(cfg.seed)
    assert len(set(tuple(v) for v in seeds.values())) == 1


def test_bad_config_raises():
    with pytest.raises(ValueError):
        mwucb.parse_config("horizon = -1")


def test_selftest():
    ok, text = mwucb.selftest()
    assert ok, text
