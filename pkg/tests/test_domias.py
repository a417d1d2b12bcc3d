import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.exceptions import InvalidInputError
from app.models.dataset import HouseholdIndex
from app.models.schemas import ActivationMode, ActivationParams, AggregationMode, GeneratorKind
from app.models.tables import FeatureTuple
from app.services.attacks.domias import (
    CandidateSet,
    activate,
    baseline_domias,
    household_scores,
    run_attack,
    score_mst,
    score_privbayes,
)
from tests.helpers import dataset_from_rows, random_dataset


def candidates_of(rows, cards, household_size=1):
    return CandidateSet(dataset_from_rows(cards, rows, household_size), min_household_size=1)


def test_candidate_set_requires_large_households(small_dataset):
    CandidateSet(small_dataset, min_household_size=5)
    with pytest.raises(InvalidInputError):
        CandidateSet(small_dataset, min_household_size=6)
    relaxed = CandidateSet(small_dataset, min_household_size=6, relaxed=True)
    assert len(relaxed.households) == small_dataset.n_rows // 5


def test_score_mst_direct_formula():
    aux = dataset_from_rows([2, 2], [[0, 0]] + [[1, 1]] * 9)
    synth = dataset_from_rows([2, 2], [[0, 0]] * 2 + [[1, 1]] * 8)
    lambdas = score_mst(synth, aux, [FeatureTuple.pair(0, 1)], [1.0], candidates_of([[0, 0]], [2, 2]), 0.0)
    assert lambdas == pytest.approx([2.0])


def test_score_mst_weighted_sum():
    aux = dataset_from_rows([2, 2, 2], [[0, 0, 0]] + [[1, 1, 1]] * 9)
    synth = dataset_from_rows([2, 2, 2], [[0, 0, 0]] * 2 + [[1, 0, 0]] * 2 + [[1, 1, 1]] * 6)
    pairs = [FeatureTuple.pair(0, 1), FeatureTuple.pair(1, 2)]
    lambdas = score_mst(synth, aux, pairs, [0.75, 0.25], candidates_of([[0, 0, 0]], [2, 2, 2]), 0.0)
    assert lambdas == pytest.approx([2.5])


def test_score_mst_zero_aux_cell_uses_uniform_fallback():
    aux = dataset_from_rows([2, 2], [[1, 1]] * 10)
    synth = dataset_from_rows([2, 2], [[0, 0]] * 5 + [[1, 1]] * 5)
    lambdas = score_mst(synth, aux, [FeatureTuple.pair(0, 1)], [1.0], candidates_of([[0, 0]], [2, 2]), 0.0)
    assert lambdas == pytest.approx([0.5 / 0.25])


def test_score_privbayes_direct_formula():
    aux = dataset_from_rows([2], [[0]] * 3 + [[1]] * 7)
    synth = dataset_from_rows([2], [[0]] * 6 + [[1]] * 4)
    lambdas = score_privbayes(
        synth, aux, [FeatureTuple.conditional_of(0)], [1.0], candidates_of([[0]], [2]), smoothing=0.0
    )
    assert lambdas == pytest.approx([2.0])


def test_score_privbayes_empty_aux_stratum_is_finite():
    aux = dataset_from_rows([2, 3], [[0, 0]] * 5 + [[1, 1]] * 5)
    synth = dataset_from_rows([2, 3], [[0, 2]] * 4 + [[1, 2]] * 6)
    conditional = FeatureTuple.conditional_of(0, (1,))
    lambdas = score_privbayes(synth, aux, [conditional], [1.0], candidates_of([[0, 2]], [2, 3]), smoothing=0.0)
    # aux sin masa en el estrato → 1/2; sintético 0.4
    assert lambdas == pytest.approx([0.8])
    assert np.all(np.isfinite(lambdas))


def test_baseline_direct_formula():
    aux = dataset_from_rows([2], [[0]] * 5 + [[1]] * 5)
    synth = dataset_from_rows([2], [[0]] * 9 + [[1]])
    assert baseline_domias(synth, aux, candidates_of([[0]], [2]), smoothing=0.0) == pytest.approx([1.8])


def test_baseline_ignores_features_with_equal_marginals():
    aux = dataset_from_rows([2, 2], [[0, 0], [0, 1]] * 5 + [[1, 0], [1, 1]] * 5)
    synth = dataset_from_rows([2, 2], [[0, 0], [0, 1]] * 9 + [[1, 0], [1, 1]])
    assert baseline_domias(synth, aux, candidates_of([[0, 1]], [2, 2]), smoothing=0.0) == pytest.approx([1.8])


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    raw_weights=st.lists(st.floats(0.01, 1.0), min_size=1, max_size=4),
    smoothing=st.sampled_from([0.0, 0.5, 1.0]),
)
def test_self_ratio_identity(seed, raw_weights, smoothing):
    data = random_dataset([2, 3, 4, 2, 3], 60, seed=seed, household_size=1)
    candidates = CandidateSet(data.take(range(12)), min_household_size=1)
    weights = np.asarray(raw_weights) / sum(raw_weights)
    pairs = [FeatureTuple.pair(i, i + 1) for i in range(len(weights))]
    conditionals = [FeatureTuple.conditional_of(i + 1, range(i + 1)) for i in range(len(weights))]

    assert score_mst(data, data, pairs, weights, candidates, smoothing) == pytest.approx(np.ones(12), abs=1e-9)
    assert score_privbayes(data, data, conditionals, weights, candidates, smoothing) == pytest.approx(
        np.ones(12), abs=1e-9
    )
    assert baseline_domias(data, data, candidates, smoothing) == pytest.approx(np.ones(12), abs=1e-9)


def test_weighted_sum_linearity(small_dataset):
    synth = random_dataset([2, 3, 2, 4], 300, seed=99)
    candidates = CandidateSet(small_dataset, min_household_size=5)
    first, second = [FeatureTuple.pair(0, 1)], [FeatureTuple.pair(2, 3), FeatureTuple.pair(1, 3)]
    a = score_mst(synth, small_dataset, first, [1.0], candidates)
    b = score_mst(synth, small_dataset, second, [0.5, 0.5], candidates)
    combined = score_mst(synth, small_dataset, first + second, [0.4, 0.3, 0.3], candidates)
    assert combined == pytest.approx(0.4 * a + 0.6 * b)


def test_scores_follow_candidate_permutation(small_dataset):
    synth = random_dataset([2, 3, 2, 4], 300, seed=5)
    pairs = [FeatureTuple.pair(0, 1), FeatureTuple.pair(2, 3)]
    order = np.random.default_rng(0).permutation(small_dataset.n_rows)
    base = score_mst(synth, small_dataset, pairs, [0.5, 0.5], CandidateSet(small_dataset, 5))
    shuffled = score_mst(synth, small_dataset, pairs, [0.5, 0.5], CandidateSet(small_dataset.take(order), 5))
    assert shuffled == pytest.approx(base[order])


def test_scoring_input_errors(small_dataset):
    candidates = CandidateSet(small_dataset, 5)
    with pytest.raises(InvalidInputError):
        score_mst(small_dataset, small_dataset, [], [], candidates)
    with pytest.raises(InvalidInputError):
        score_mst(small_dataset, small_dataset, [FeatureTuple.pair(0, 1)], [0.5], candidates)
    other = random_dataset([2, 3, 2, 5], 50)
    with pytest.raises(InvalidInputError):
        score_mst(other, small_dataset, [FeatureTuple.pair(0, 1)], [1.0], candidates)


def test_sigmoid_activation():
    assert activate([1.0], ActivationParams()) == pytest.approx([0.5])
    assert activate([0.0], ActivationParams()) == pytest.approx([0.0])
    lambdas = [0.3, 1.7, 4.0, 0.9, 2.5]
    probabilities = activate(lambdas, ActivationParams(center_quantile=0.5))
    assert probabilities[1] == 0.5


def test_median_centering_counts_zero_lambdas():
    probabilities = activate([0.0, 1.0, 4.0], ActivationParams(center_quantile=0.5))
    assert probabilities[1] == 0.5
    assert probabilities[0] == 0.0
    assert probabilities[2] > 0.5

    mostly_zero = activate([0.0, 0.0, 2.0], ActivationParams(center_quantile=0.5))
    assert not np.any(np.isnan(mostly_zero))
    assert mostly_zero.tolist() == [0.0, 0.0, 1.0]


def test_root_activation():
    params = ActivationParams(mode=ActivationMode.ROOT, c=1.0)
    assert activate([4.0, 1.0, 0.0], params) == pytest.approx([1.0, 0.5, 0.0])
    assert activate([4.0], ActivationParams(mode=ActivationMode.ROOT, c=2.0)) == pytest.approx([1.0])


def test_activation_rejects_negative_lambda():
    with pytest.raises(InvalidInputError):
        activate([-0.1])


@settings(max_examples=100, deadline=None)
@given(
    lambdas=st.lists(st.floats(0.0, 1e6), min_size=2, max_size=30),
    mode=st.sampled_from(list(ActivationMode)),
    c=st.floats(0.1, 5.0),
)
def test_activation_is_monotone(lambdas, mode, c):
    params = ActivationParams(mode=mode, c=c, center_quantile=0.5 if mode == ActivationMode.SIGMOID else None)
    probabilities = activate(lambdas, params)
    order = np.argsort(lambdas, kind="stable")
    assert np.all(np.diff(probabilities[order]) >= 0.0)
    assert np.all((probabilities >= 0.0) & (probabilities <= 1.0))


def test_household_mean_aggregation():
    index = HouseholdIndex.from_ids(np.array([1, 1, 2, 3, 3, 3, 3, 3]))
    probabilities = [0.2, 0.8, 0.9, 0.7, 0.7, 0.7, 0.7, 0.7]
    assert household_scores(probabilities, index) == pytest.approx({1: 0.5, 2: 0.9, 3: 0.7})


def test_household_most_confident_aggregation():
    index = HouseholdIndex.from_ids(np.array([1, 1, 1]))
    scores = household_scores([0.6, 0.1, 0.8], index, AggregationMode.MOST_CONFIDENT)
    assert scores == {1: 0.1}


def test_run_attack_with_identical_synth_and_aux(small_dataset):
    candidates = CandidateSet(small_dataset, 5)
    for kind, focal in [
        (GeneratorKind.MST, [FeatureTuple.pair(0, 1)]),
        (GeneratorKind.PRIVBAYES, [FeatureTuple.conditional_of(1, (0,))]),
        (None, []),
    ]:
        result = run_attack(kind, small_dataset, small_dataset, candidates, focal=focal, weights=[1.0] * len(focal))
        assert len(result.prob_per_record) == small_dataset.n_rows
        assert len(result.prob_per_household) == small_dataset.n_rows // 5
        assert all(abs(p - 0.5) < 1e-6 for p in result.prob_per_household.values())
