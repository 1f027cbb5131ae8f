import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chlab.hvmodel import (
    FactorizedModel,
    LambdaSpace,
    SequentialModel,
    deterministic_model,
    joint_prob_factorized,
    joint_prob_sequential,
    lambda_covariance,
    load_model,
    model_behavior,
    model_from_dict,
    random_factorized,
    side1_average,
    side2_conditional_average,
)
from chlab.scenario import ValidationError, validate_behavior

probs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def factorized_models(draw, max_k=6):
    k = draw(st.integers(1, max_k))
    raw = draw(arrays(float, k, elements=st.floats(0.01, 1.0)))
    r1 = draw(arrays(float, (2, k), elements=probs))
    r2 = draw(arrays(float, (2, k), elements=probs))
    return FactorizedModel.build(raw / raw.sum(), r1, r2)


@st.composite
def sequential_models(draw, max_k=5):
    k = draw(st.integers(1, max_k))
    raw = draw(arrays(float, k, elements=st.floats(0.01, 1.0)))
    shape = (2, 2, k)
    return SequentialModel.build(raw / raw.sum(), draw(arrays(float, shape, elements=probs)),
                                 draw(arrays(float, shape, elements=probs)),
                                 draw(arrays(float, shape, elements=probs)))


def const_sequential(r1, r2_plus, weights=(1.0,)):
    k = len(weights)
    return SequentialModel.build(weights, np.full((2, 2, k), r1), np.full((2, 2, k), r2_plus))


TWO_POINT = SequentialModel.build([0.5, 0.5], np.tile([1.0, 0.0], (2, 2, 1)), np.tile([1.0, 0.0], (2, 2, 1)))


def test_joint_factorized_examples():
    assert joint_prob_factorized(deterministic_model([1, 1], [1, 1]), 0, 0) == 1.0
    two = FactorizedModel.build([0.5, 0.5], [[1, 0], [1, 0]], [[1, 0], [1, 0]])
    assert joint_prob_factorized(two, 0, 0) == 0.5
    half = FactorizedModel.build([1.0], [[0.5], [0.5]], [[0.5], [0.5]])
    assert joint_prob_factorized(half, 1, 1) == 0.25


def test_joint_sequential_examples():
    theta = math.radians(135.0)
    sin2 = math.sin(theta / 2) ** 2
    m = const_sequential(0.5, sin2)
    assert joint_prob_sequential(m, 0, 0) == pytest.approx(0.5 * sin2, abs=1e-15)
    assert joint_prob_sequential(const_sequential(0.7, 0.0), 1, 0) == 0.0
    assert joint_prob_sequential(TWO_POINT, 0, 1) == 0.5


def test_covariance_examples():
    assert lambda_covariance(TWO_POINT, 0, 0) == 0.25
    assert lambda_covariance(const_sequential(0.3, 0.9), 0, 0) == 0.0
    const = const_sequential(0.3, 0.9, weights=(0.2, 0.3, 0.5))
    assert lambda_covariance(const, 1, 1) == pytest.approx(0.0, abs=1e-15)


@given(st.floats(0, 1), st.floats(0, 1))
def test_one_point_covariance_is_exactly_zero(r1, r2):
    assert lambda_covariance(const_sequential(r1, r2), 0, 1) == 0.0


@given(sequential_models())
def test_covariance_identity_and_bounds(m):
    for i in range(2):
        for j in range(2):
            cov = lambda_covariance(m, i, j)
            assert -0.25 - 1e-12 <= cov <= 0.25 + 1e-12
            split = joint_prob_sequential(m, i, j) - side1_average(m, i, j) * side2_conditional_average(m, i, j)
            assert abs(split - cov) < 1e-12


def test_model_behavior_examples():
    half = FactorizedModel.build([1.0], [[0.5], [0.5]], [[0.5], [0.5]])
    b = model_behavior(half)
    assert b.joint == ((0.25, 0.25), (0.25, 0.25))
    assert b.single1 == (0.5, 0.5) and b.single2 == (0.5, 0.5)
    assert np.all(model_behavior(deterministic_model([1, 1], [1, 1])).as_vector() == 1.0)


@given(factorized_models())
def test_factorized_frechet_upper(m):
    b = model_behavior(m)
    for i in range(2):
        for j in range(2):
            assert b.joint[i][j] <= min(b.single1[i], b.single2[j]) + 1e-12
    assert validate_behavior(b).ok


@given(factorized_models())
def test_sequential_embedding_agrees_exactly(m):
    seq = m.to_sequential()
    for i in range(2):
        for j in range(2):
            assert joint_prob_sequential(seq, i, j) == joint_prob_factorized(m, i, j)
    assert np.max(np.abs(model_behavior(seq).as_vector() - model_behavior(m).as_vector())) < 1e-15


def test_weights_validation():
    with pytest.raises(ValidationError):
        LambdaSpace([0.5, 0.6])
    with pytest.raises(ValidationError):
        LambdaSpace([-0.1, 1.1])
    with pytest.raises(ValidationError):
        LambdaSpace([])
    with pytest.warns(UserWarning):
        ls = LambdaSpace([0.5, 0.5 + 5e-10])
    assert ls.weights.sum() == pytest.approx(1.0, abs=1e-15)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        LambdaSpace([0.25, 0.75])


def test_response_range_reports_index():
    with pytest.raises(ValidationError, match=r"r2\[1, 0\]"):
        FactorizedModel.build([1.0], [[0.5], [0.5]], [[0.5], [1.5]])
    with pytest.raises(ValidationError, match="shape"):
        FactorizedModel.build([0.5, 0.5], [[0.5], [0.5]], [[0.5], [0.5]])


def test_models_are_read_only():
    m = random_factorized(np.random.default_rng(0), 3)
    with pytest.raises(ValueError):
        m.r1[0, 0] = 0.0


def test_model_json(tmp_path):
    m = random_factorized(np.random.default_rng(1), 4)
    path = tmp_path / "m.json"
    path.write_text(json.dumps(m.to_dict()), encoding="utf-8")
    loaded = load_model(path)
    assert np.array_equal(loaded.r1, m.r1) and np.array_equal(loaded.weights, m.weights)
    seq = model_from_dict(json.loads(json.dumps(TWO_POINT.to_dict())))
    assert lambda_covariance(seq, 0, 0) == 0.25
    with pytest.raises(ValidationError):
        model_from_dict({"type": "continuous"})
    with pytest.raises(ValidationError):
        model_from_dict({"type": "factorized", "weights": [1.0]})


def test_signalling_model_rejected_when_pooling_breaks_frechet():
    r1 = np.zeros((2, 2, 1))
    r1[:, 0, 0] = 1.0  # side 1 fires only when b is chosen
    m = SequentialModel.build([1.0], r1, np.ones((2, 2, 1)))
    with pytest.raises(ValidationError):
        model_behavior(m)
