import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.exceptions import InvalidInputError
from app.models.schemas import GroundTruth
from app.services.evaluation.metrics import auc, membership_advantage

TRUTH = GroundTruth(member_households=frozenset({1, 2}), all_candidate_households=frozenset({1, 2, 3, 4}))


def test_perfect_predictions():
    assert membership_advantage({1: 1.0, 2: 1.0, 3: 0.0, 4: 0.0}, TRUTH) == 1.0
    assert auc({1: 1.0, 2: 1.0, 3: 0.0, 4: 0.0}, TRUTH) == 1.0


def test_constant_predictions():
    predictions = {h: 0.5 for h in TRUTH.all_candidate_households}
    assert membership_advantage(predictions, TRUTH) == 0.5
    assert auc(predictions, TRUTH) == 0.5


def test_mixed_case_by_hand():
    predictions = {1: 0.9, 2: 0.4, 3: 0.8, 4: 0.1}
    # pesos {0.8, 0.2, 0.6, 0.8}: tpr = 0.8, fpr = 0.6 / 1.4
    expected = (0.8 - 0.6 / 1.4 + 1.0) / 2.0
    assert membership_advantage(predictions, TRUTH) == pytest.approx(expected, abs=1e-9)
    assert membership_advantage(predictions, TRUTH) == pytest.approx(0.6857142857, abs=1e-9)
    assert auc(predictions, TRUTH) == pytest.approx(0.75)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 1.0).filter(lambda p: abs(p - 0.5) > 1e-6), min_size=4, max_size=4))
def test_flipping_predictions_mirrors_advantage(probabilities):
    predictions = dict(zip([1, 2, 3, 4], probabilities))
    flipped = {h: 1.0 - p for h, p in predictions.items()}
    ma = membership_advantage(predictions, TRUTH)
    assert 0.0 <= ma <= 1.0
    assert membership_advantage(flipped, TRUTH) == pytest.approx(1.0 - ma, abs=1e-9)


def test_boundary_prediction_has_no_weight():
    assert membership_advantage({1: 0.5, 2: 1.0, 3: 0.0, 4: 0.5}, TRUTH) == 1.0


def test_missing_prediction():
    with pytest.raises(InvalidInputError):
        membership_advantage({1: 0.9, 2: 0.4, 3: 0.8}, TRUTH)


def test_probability_out_of_range():
    with pytest.raises(InvalidInputError):
        membership_advantage({1: 1.2, 2: 0.4, 3: 0.8, 4: 0.1}, TRUTH)


def test_auc_needs_both_classes():
    truth = GroundTruth(member_households=frozenset({1, 2}), all_candidate_households=frozenset({1, 2}))
    with pytest.raises(InvalidInputError):
        auc({1: 0.3, 2: 0.8}, truth)


def test_members_must_be_candidates():
    with pytest.raises(ValueError):
        GroundTruth(member_households=frozenset({9}), all_candidate_households=frozenset({1}))
