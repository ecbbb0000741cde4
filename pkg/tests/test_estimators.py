import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from zicap.channels import channel_to_dict, save_channel
from zicap.estimators import RateRegionEstimator, SumCapacityEstimator
from zicap.search import PreconditionError

QUICK = dict(restarts=2, n_lambdas=5, max_iters=60)


def test_params_and_clone():
    est = RateRegionEstimator(bound="capacity", u_card=3, **QUICK)
    params = est.get_params()
    assert params["bound"] == "capacity" and params["u_card"] == 3
    c = clone(est)
    assert c.get_params() == params
    c.set_params(seed=4)
    assert c.seed == 4 and est.seed == 0


def test_fit_predict(fig4, tmp_path):
    est = RateRegionEstimator(bound="capacity", u_card=3, **QUICK).fit(fig4)
    assert est.conditions_.both
    pred = est.predict([[0.1, 0.1], [0.6, 0.531], [0.0, 0.531]])
    assert pred.tolist() == [True, False, True]
    assert est.decision_function([[0.0, 0.0]])[0] > 0.2
    # same channel from a dict and from a file
    path = tmp_path / "c.json"
    save_channel(fig4, path)
    a = RateRegionEstimator(bound="capacity", u_card=3, **QUICK).fit(channel_to_dict(fig4))
    b = RateRegionEstimator(bound="capacity", u_card=3, **QUICK).fit(str(path))
    assert np.array_equal(a.frontier_, est.frontier_)
    assert np.array_equal(b.frontier_, est.frontier_)


def test_predict_validation(fig4):
    est = RateRegionEstimator(bound="sato", **QUICK)
    with pytest.raises(NotFittedError):
        est.predict([[0.1, 0.1]])
    est.fit(fig4)
    with pytest.raises(ValueError):
        est.predict([[0.1, 0.1, 0.1]])
    with pytest.raises(TypeError):
        RateRegionEstimator().fit(42)


def test_capacity_precondition(fig4):
    from conftest import perturb
    bad = perturb(fig4, (0, 1, 0), 0.05)
    with pytest.raises(PreconditionError):
        RateRegionEstimator(bound="capacity", **QUICK).fit(bad)


def test_sum_capacity(fig4):
    est = SumCapacityEstimator(restarts=3).fit(fig4)
    assert est.certified_
    assert est.value_ == pytest.approx(0.60645, abs=1e-4)
    assert est.predict([[0.3, 0.3], [0.4, 0.4]]).tolist() == [True, False]
