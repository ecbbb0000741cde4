import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import perturb
from zicap.channels import check_conditions
from zicap.regions import AuxInput
from zicap.verify import (
    appendix_b_identities,
    coincidence_suite,
    korner_marton_identity,
    random_aux,
    random_joint,
    random_modadd_channel,
    reference_invariance,
)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_korner_marton(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(1, 5))
    j = random_joint(r, n, int(r.integers(2, 4)), int(r.integers(2, 4)))
    chk = korner_marton_identity(j, n)
    assert chk.gap <= 1e-10


def test_korner_marton_n1_is_difference():
    j = np.array([[0.1, 0.2], [0.3, 0.4]])
    chk = korner_marton_identity(j)
    assert chk.lhs == pytest.approx(chk.rhs, abs=1e-15)


def test_korner_marton_bad_axes():
    with pytest.raises(ValueError):
        korner_marton_identity(np.full((2, 2, 2), 1 / 8))
    with pytest.raises(ValueError):
        korner_marton_identity(np.full((2, 2), 1 / 4), n=2)


def test_output_entropy_identities_modadd(rng):
    for _ in range(20):
        zc = random_modadd_channel(rng)
        aux = random_aux(rng, zc)
        assert appendix_b_identities(zc, aux, x2_ref=int(rng.integers(zc.n_x2))) <= 1e-12


def test_output_entropy_identity_u_equals_x1(fig4):
    aux = AuxInput.u_equals_x1([0.3, 0.7], [0.6, 0.4])
    assert appendix_b_identities(fig4, aux) <= 1e-12


def test_output_entropy_identity_breaks_when_perturbed(fig4, rng):
    bad = perturb(fig4, (slice(None), 1, 0), 0.3)
    with pytest.warns(UserWarning):
        gaps = [appendix_b_identities(bad, random_aux(rng, bad)) for _ in range(20)]
    assert max(gaps) > 1e-3


def test_reference_invariance(presets, rng):
    for zc in presets.values():
        for _ in range(5):
            assert reference_invariance(zc, random_aux(rng, zc)) <= 1e-10


def test_coincidence_small(presets):
    for zc in presets.values():
        rep = check_conditions(zc)
        res = coincidence_suite(zc, 30, 3, rep.p_star, rep.tau)
        assert res.ok, res.failures[:1]
        assert res.max_equality_gap <= 1e-12


def test_coincidence_reports_failures(fig4):
    # a wrong tau breaks the equality and every sample is reported
    res = coincidence_suite(fig4, 5, 0, [0.5, 0.5], 1.2)
    assert not res.ok and res.passed == 0
    assert all(f.check == "restricted == capacity" for f in res.failures)
    assert res.failures[0].law["p_u_x1"]
