import numpy as np
import pytest

from geocongruence.experiments import (
    GridConfig, derive_seed, evaluate_network, m_from_dbar, parallel_map, run_distribution_compare,
    run_grid,
)
from geocongruence.errors import ParameterError
from geocongruence.generator import NpsoParams, generate


def test_m_from_dbar_rounds_half_up():
    assert [m_from_dbar(d) for d in (4, 5, 7, 12, 20)] == [2, 3, 4, 6, 10]


def test_derive_seed_is_stable_and_distinct():
    a = derive_seed(0, 12, 2.5, 0.1, 4, 0)
    assert a == derive_seed(0, 12, 2.5, 0.1, 4, 0)
    others = {derive_seed(0, 12, 2.5, 0.1, 4, 1), derive_seed(1, 12, 2.5, 0.1, 4, 0),
              derive_seed(0, 8, 2.5, 0.1, 4, 0), derive_seed(0, 12, 2.75, 0.1, 4, 0),
              derive_seed(0, 12, 2.5, 0.5, 4, 0), derive_seed(0, 12, 2.5, 0.1, 0, 0)}
    assert a not in others and len(others) == 6


def _square(x):
    return x * x


def test_parallel_map_preserves_order():
    assert parallel_map(_square, range(7), threads=2) == [x * x for x in range(7)]
    assert parallel_map(_square, [], threads=2) == []


def test_grid_seed_determinism_and_cell_independence():
    small = dict(N=40, gamma_values=(2.5,), T_values=(0.1,), realizations=2, base_seed=5)
    one = run_grid(GridConfig(dbar_values=(6,), **small), threads=1)
    two = run_grid(GridConfig(dbar_values=(4, 6), **small), threads=2)
    assert one[0].seeds == two[1].seeds
    assert one[0].values == two[1].values
    again = run_grid(GridConfig(dbar_values=(6,), **small), threads=1)
    assert again[0].values == one[0].values


def test_complete_graph_cell_fails_cleanly():
    cells = run_grid(GridConfig(N=5, dbar_values=(8,), gamma_values=(2.5,), realizations=2))
    (cell,) = cells
    assert cell.failed
    assert len(cell.errors) == 2 and all("GC undefined" in e for e in cell.errors)
    assert np.isnan(cell.mean("gc_geo"))


def test_grid_config_validation():
    with pytest.raises(ParameterError):
        GridConfig(dbar_values=())
    with pytest.raises(ParameterError):
        GridConfig(realizations=0)
    assert len(GridConfig().cells()) == 25


def test_evaluate_network_axioms_and_ranges():
    net = generate(NpsoParams(N=60, m=3, T=0.3, gamma=2.5, C=2, seed=11))
    ev = evaluate_network(net, check_axioms=True)
    assert ev.axiom_violations == 0
    for k in ("gc_geo", "gre_geo", "gc_gsp", "gre_gsp"):
        assert 0.0 <= getattr(ev, k) <= 1.0
    assert ev.gre_geo <= ev.success_rate
    assert ev.gc_geo <= ev.gc_gsp
    assert ev.n_pairs == 60 * 59 // 2 - net.n_edges


def test_tsp_length_decreases_with_density():
    lengths = []
    for dbar in (4, 12, 20):
        res = run_distribution_compare(60, dbar, 0.5, 2.5, 0, base_seed=3)
        lengths.append(res.tsp_len.mean())
        assert res.mwu.p_value < 0.05
    assert lengths[0] > lengths[1] > lengths[2]


def test_sparse_network_ptsp_is_multimodal():
    res = run_distribution_compare(100, 4, 0.5, 2.5, 0, base_seed=0)
    assert {2, 3, 4} <= set(res.hop_groups)
    assert res.dominant_hop() == 3
    assert len(res.kde_ptsp.peaks()) >= 2
