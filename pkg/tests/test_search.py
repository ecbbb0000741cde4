import numpy as np
import pytest

from conftest import perturb
from zicap.channels import ZChannel
from zicap.info import DMChannel
from zicap.optim import SearchConfig, default_lambda_grid
from zicap.regions import MERGE_TOL, BoundKind, corner_point_A, g_outer, sato_region
from zicap.search import (
    PreconditionError,
    find_capacity_points,
    max_sum_rate,
    resolve_cards,
    trace_frontier,
)

QUICK = dict(lambda_grid=default_lambda_grid(7), max_iters=80)


def quick(**kw):
    return SearchConfig(**{**QUICK, **kw})


def test_resolve_cards(fig4):
    assert resolve_cards(fig4, BoundKind.HK_INNER, SearchConfig()) == (1, 4)
    assert resolve_cards(fig4, BoundKind.THM4_OUTER, SearchConfig()) == (4, 3)
    assert resolve_cards(fig4, BoundKind.CAPACITY, SearchConfig(q_card=3)) == (1, 3)
    with pytest.raises(ValueError):
        resolve_cards(fig4, BoundKind.THM4_OUTER, SearchConfig(u_card=4))


def test_deterministic(fig4):
    a = trace_frontier(fig4, "thm4_outer", quick(restarts=3, seed=5)).points()
    b = trace_frontier(fig4, "thm4_outer", quick(restarts=3, seed=5)).points()
    assert np.array_equal(a, b)


@pytest.mark.parametrize("kind", ["hk_inner", "capacity", "sato"])
def test_restart_monotone(fig4, kind):
    small = trace_frontier(fig4, kind, quick(restarts=2, seed=1))
    big = trace_frontier(fig4, kind, quick(restarts=5, seed=1))
    for p in small.points():
        # merging near-duplicate frontier points may cost up to the merge tolerance
        assert big.slack(*p) >= -MERGE_TOL


def test_cells_and_meta(fig4):
    cfg = quick(restarts=2)
    region, cells = trace_frontier(fig4, "capacity", cfg, return_cells=True)
    assert len(cells) == 2 * len(cfg.lambda_grid)
    assert region.hulled and region.meta["tau"] == pytest.approx(1.0)
    assert region.meta["under_approximation"]
    assert len(region.meta["support"]) == len(cfg.lambda_grid)
    # every realizer reproduces a pentagon containing its frontier point
    for p, aux in zip(region.frontier, region.realizers):
        assert g_outer(aux, fig4).contains(p.r1, p.r2, tol=1e-9)


def test_capacity_intercepts(fig4):
    region = trace_frontier(fig4, "capacity", quick(restarts=4, u_card=3))
    assert region.max_r1 == pytest.approx(0.6, abs=1e-6)
    assert region.max_r2 == pytest.approx(1 - 0.468995594, abs=1e-6)


def test_capacity_precondition(fig4):
    bad = perturb(fig4, (0, 1, 0), 0.05)
    with pytest.raises(PreconditionError):
        trace_frontier(bad, "capacity", quick())
    # forcing with explicit extras runs
    region = trace_frontier(bad, "capacity", quick(), extras={"p_star": [0.5, 0.5], "tau": 1.0},
                            force=True)
    assert region.frontier


def test_outer_warns_uncertified(fig4):
    bad = perturb(fig4, (0, 1, 0), 0.05)
    with pytest.warns(UserWarning, match="Condition 1"):
        trace_frontier(bad, "thm4_outer", quick(restarts=1, q_card=1))


def test_sato_fig4(fig4):
    raw = sato_region(fig4, quick(restarts=2))
    assert not raw.hulled
    assert len(raw.frontier) == 1
    assert raw.frontier[0].r1 == pytest.approx(0.6, abs=1e-6)
    assert raw.frontier[0].r2 == pytest.approx(0.531004406, abs=1e-6)
    assert sato_region(fig4, quick(restarts=2), hull=True).hulled


def test_max_sum_rate(fig4):
    rep = max_sum_rate(fig4, SearchConfig(restarts=4))
    assert rep.certified and rep.predicate_holds and rep.condition1_certified
    pa = corner_point_A(rep.argmax, fig4)
    assert pa.point.r1 + pa.point.r2 == pytest.approx(rep.value, abs=1e-9)
    assert rep.to_dict()["value"] == rep.value


def test_max_sum_rate_uncertified(fig4):
    bad = perturb(fig4, (0, 1, 0), 0.05)
    with pytest.warns(UserWarning):
        rep = max_sum_rate(bad, SearchConfig(restarts=2))
    assert not rep.certified


def test_find_capacity_points(fig4):
    found = find_capacity_points(fig4, quick(restarts=3))
    assert found
    region = trace_frontier(fig4, "thm4_outer", quick(restarts=3))
    for point, aux in found:
        assert corner_point_A(aux, fig4).predicate
        assert region.pareto_gap(point.r1, point.r2) <= 1e-6


def test_find_capacity_points_empty():
    # Y2 reveals X1 exactly (relabeled by X2), Y1 is a very noisy copy of X1: any U
    # that tells Y1 as much as Y2 is constant, and constant-U corners are dominated
    V2 = np.zeros((2, 2, 4))
    for x1 in range(2):
        for x2 in range(2):
            V2[x1, x2, 2 * x1 + x2] = 1.0
    zc = ZChannel(DMChannel.bsc(0.4).rows, V2)
    assert find_capacity_points(zc, quick(restarts=3)) == []


def test_outer_frontier_covers_inner(fig4):
    cfg = SearchConfig(restarts=4, lambda_grid=default_lambda_grid(15))
    inner = trace_frontier(fig4, "hk_inner", cfg)
    outer = trace_frontier(fig4, "thm4_outer", cfg)
    # both are finite searches; the allowance is search slack, not a modelling gap
    assert min(outer.slack(*p) for p in inner.points()) >= -2e-3
