import math

import numpy as np
import pytest

import locdens


def normal_sample(n, d, seed):
    return locdens.TestDensity.standard_normal(d).sample(n, seed)


def test_version():
    assert isinstance(locdens.__version__, str)


def test_gaussian_kernel_value():
    k = locdens.Kernel.gaussian(2)
    assert k(np.zeros(2)) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-14)
    assert k.moment([2, 0]) == pytest.approx(1.0, rel=1e-14)


def test_j_round_trip():
    k = locdens.Kernel.triweight(3)
    rng = np.random.default_rng(1)
    a = rng.uniform(-1, 1, (3, 3))
    a = a + a.T
    b = rng.uniform(-1, 1, 3)
    c, b2, a2 = locdens.invert_J(k, *locdens.apply_J(k, 0.7, b, a))
    assert c == pytest.approx(0.7, abs=1e-12)
    assert np.allclose(b2, b, atol=1e-12)
    assert np.allclose(a2, a, atol=1e-12)


def test_estimates_agree_with_truth_roughly():
    data = normal_sample(20000, 2, 3)
    k = locdens.Kernel.gaussian(2)
    x = np.array([0.2, -0.1])
    truth = locdens.TestDensity.standard_normal(2).truth(x, "log")
    for p in ["M", "K", "L"]:
        scale = "log" if p == "L" else "density"
        e = locdens.estimate(p, data, k, x, 0.4, scale)
        assert e["scale"] == scale
        assert e["gradient"].shape == (2,)
        assert e["hessian"].shape == (2, 2)
    e = locdens.estimate("L", data, k, x, 0.4, "log")
    assert e["value"] == pytest.approx(truth["value"], abs=0.1)


def test_gaussian_hyvarinen_equals_local_likelihood():
    data = normal_sample(500, 2, 4)
    k = locdens.Kernel.gaussian(2)
    x = np.array([0.3, 0.1])
    h = locdens.estimate("H", data, k, x, 0.5, "log")
    l = locdens.estimate("L", data, k, x, 0.5, "log")
    assert h["value"] is None
    assert np.allclose(h["gradient"], l["gradient"], atol=1e-10)
    assert np.allclose(h["hessian"], l["hessian"], atol=1e-10)


def test_moment_triple_single_point():
    data = np.array([[0.0, 0.0]])
    c, b, a = locdens.moment_triple(data, locdens.Kernel.gaussian(2), np.zeros(2), 1.0)
    assert c == pytest.approx(1.0 / (2.0 * math.pi))
    assert np.allclose(b, 0.0)
    assert np.allclose(a, 0.0)


def test_sylvester():
    s = np.array([[2.0, 0.3], [0.3, 1.0]])
    b = np.array([[1.0, 0.5], [-0.2, 0.4]])
    a = locdens.sylvester_solve(s, b)
    assert np.allclose(s @ a + a @ s, b + b.T, atol=1e-12)


def test_bias_constants_at_mode():
    f = locdens.TestDensity.standard_normal(1)
    p = locdens.bias_constants("K", f, np.zeros(1), locdens.Kernel.gaussian(1))
    assert p["gamma0"] == 2
    assert p["beta"] == pytest.approx(-0.5 / math.sqrt(2.0 * math.pi), rel=1e-10)


def test_errors_carry_codes():
    data = np.array([[5.0]])
    with pytest.raises(locdens.LocdensError) as err:
        locdens.estimate("L", data, locdens.Kernel.triweight(1), np.zeros(1), 0.5, "log")
    assert err.value.args[1] == "degenerate_neighborhood"
