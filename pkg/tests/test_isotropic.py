from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netgme.exact import build_isotropic, fidelity_with_max_ent
from netgme.isotropic import (
    ExponentModel,
    IsotropicParams,
    bs_fidelity_cap,
    bsa,
    cascade_visibility,
    distillation_error,
    distillation_fidelity_bound,
    entropy,
    hashing_exponent,
    log_distillation_error,
    max_ent_fidelity,
    separability_threshold,
    tensor_bsa_upper,
)

visibilities = st.floats(0.0, 1.0)
dims = st.integers(2, 6)


def entropy_oracle(d: int, p: float) -> float:
    """Base-d entropy from a dense eigensolve of the isotropic matrix."""
    lam = np.linalg.eigvalsh(build_isotropic(IsotropicParams(d, p)).matrix)
    lam = lam[lam > 1e-15]
    return float(-(lam * np.log(lam)).sum() / np.log(d))


def test_params_validation():
    with pytest.raises(ValueError):
        IsotropicParams(1, 0.5)
    with pytest.raises(ValueError):
        IsotropicParams(2, 1.5)
    assert IsotropicParams(2, 0.5).entangled
    assert not IsotropicParams(2, 1 / 3).entangled


def test_threshold():
    assert separability_threshold(2) == pytest.approx(1 / 3)
    assert separability_threshold(3) == pytest.approx(1 / 4)
    values = [separability_threshold(d) for d in range(2, 50)]
    assert all(a > b for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        separability_threshold(1)


def test_bsa_examples():
    assert bsa(IsotropicParams(2, 0.9)) == pytest.approx(0.15)
    assert bsa(IsotropicParams(2, 1 / 3)) == pytest.approx(1.0)
    for d in (2, 3, 5):
        assert bsa(IsotropicParams(d, 1.0)) == 0.0


@given(dims, visibilities, visibilities)
def test_bsa_range_and_monotone(d, p, q):
    lo, hi = sorted((p, q))
    a, b = bsa(IsotropicParams(d, lo)), bsa(IsotropicParams(d, hi))
    assert 0.0 <= b <= a <= 1.0 + 1e-12


def test_cascade_examples():
    assert cascade_visibility(0.9, 1) == pytest.approx(0.9)
    assert cascade_visibility(0.9, 2) == pytest.approx(0.81)
    assert cascade_visibility(0.9, 3) == pytest.approx(0.6561)
    with pytest.raises(ValueError):
        cascade_visibility(0.9, 0)


@pytest.mark.parametrize("p", [i / 10 for i in range(1, 10)])
def test_cascade_composition(p):
    for l1 in range(1, 7):
        for l2 in range(1, 7):
            left = cascade_visibility(cascade_visibility(p, l1), l2)
            assert left == pytest.approx(cascade_visibility(p, l1 + l2 - 1), abs=1e-12)


def test_hashing_exponent_examples():
    assert hashing_exponent(IsotropicParams(2, 1.0)) == pytest.approx(1.0)
    e95 = hashing_exponent(IsotropicParams(2, 0.95))
    assert e95 == pytest.approx(1 - entropy_oracle(2, 0.95), abs=1e-12)
    assert e95 == pytest.approx(0.710, abs=5e-4)
    assert entropy_oracle(2, 0.5) > 1
    assert hashing_exponent(IsotropicParams(2, 0.5)) == 0.0


@given(dims, visibilities)
def test_entropy_matches_dense_spectrum(d, p):
    assert entropy(IsotropicParams(d, p)) == pytest.approx(entropy_oracle(d, p), abs=1e-9)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_hashing_exponent_nondecreasing(d):
    grid = np.linspace(separability_threshold(d), 1.0, 400)
    values = [hashing_exponent(IsotropicParams(d, p)) for p in grid]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(1.0)
    assert all(v < 1.0 for v in values[:-1])


def test_distillation_bound_examples():
    zero = ExponentModel("fixed", 0.0)
    assert distillation_fidelity_bound(10, IsotropicParams(2, 0.9), zero) == 0.0
    params = IsotropicParams(2, 0.95)
    e = hashing_exponent(params)
    expected_log = math.log(2) + 6 * math.log(201) - e * 200 * math.log(2)
    assert log_distillation_error(200, params) == pytest.approx(expected_log, rel=1e-12)
    assert distillation_error(200, params) < 1e-28
    with pytest.raises(ValueError):
        distillation_fidelity_bound(0, params)


def test_distillation_bound_eventually_monotone():
    params = IsotropicParams(2, 0.95)
    bounds = [distillation_fidelity_bound(m, params) for m in range(1, 501)]
    # 1 - eps rounds to 1.0 once eps < 2**-53; strictness is checked on log(eps)
    assert all(0.0 <= b <= 1.0 for b in bounds)
    assert all(math.isfinite(log_distillation_error(m, params)) for m in range(1, 501))
    # after the polynomial prefactor peaks the bound only grows
    logs = [log_distillation_error(m, params) for m in range(1, 501)]
    start = next(i for i in range(1, 500) if logs[i] < logs[i - 1])
    assert all(b2 >= b1 for b1, b2 in zip(bounds[start:], bounds[start + 1:]))


def test_distillation_error_vanishes_in_log_space():
    params = IsotropicParams(2, 0.95)
    assert log_distillation_error(10**4, params) < math.log(1e-100)


@given(dims, st.floats(0.0, 1.0), st.integers(1, 2000))
def test_distillation_error_in_unit_interval(d, p, m):
    eps = distillation_error(m, IsotropicParams(d, p))
    assert 0.0 <= eps <= 1.0


def test_exponent_model_parse():
    assert ExponentModel.parse("hashing") == ExponentModel()
    fixed = ExponentModel.parse("fixed:0.25")
    assert fixed(IsotropicParams(2, 0.1)) == 0.25 and str(fixed) == "fixed:0.25"
    for bad in ("nope", "fixed:x", "fixed:-1"):
        with pytest.raises(ValueError):
            ExponentModel.parse(bad)


def test_fidelity_cap():
    assert bs_fidelity_cap(2) == 0.5
    assert bs_fidelity_cap(4) == 0.75
    assert bs_fidelity_cap(10**6) == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(ValueError):
        bs_fidelity_cap(1)


def test_tensor_bsa_upper():
    assert tensor_bsa_upper(IsotropicParams(2, 0.9), 5) == pytest.approx(0.15)
    assert tensor_bsa_upper(IsotropicParams(2, 0.2), 3) == 1.0
    assert tensor_bsa_upper(IsotropicParams(3, 0.7), 1) == bsa(IsotropicParams(3, 0.7))
    with pytest.raises(ValueError):
        tensor_bsa_upper(IsotropicParams(2, 0.9), 0)


@given(dims, visibilities)
def test_fidelity_formula_matches_dense(d, p):
    dense = fidelity_with_max_ent(build_isotropic(IsotropicParams(d, p)), d)
    assert dense == pytest.approx(max_ent_fidelity(IsotropicParams(d, p)), abs=1e-12)
    assert dense == pytest.approx(p + (1 - p) / d**2, abs=1e-12)
