import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.exceptions import InvalidInputError
from app.core.randomness import RandomSource
from app.models.dataset import Dataset
from app.models.tables import FeatureTuple, MarginalTable
from app.services.data.marginals import (
    conditional_prob,
    conditional_probabilities,
    measure_marginal,
    mutual_information,
    mutual_information_counts,
    sample_categorical,
    smoothed_probabilities,
)
from tests.helpers import naive_counts, random_dataset


@settings(max_examples=100, deadline=None)
@given(
    cardinalities=st.lists(st.integers(2, 5), min_size=2, max_size=5),
    n_rows=st.integers(1, 1000),
    seed=st.integers(0, 2**32 - 1),
    data=st.data(),
)
def test_marginal_matches_naive_counter(cardinalities, n_rows, seed, data):
    dataset = random_dataset(cardinalities, n_rows, seed=seed)
    size = data.draw(st.integers(1, len(cardinalities)))
    indices = data.draw(st.permutations(range(len(cardinalities))))[:size]
    table = measure_marginal(dataset, FeatureTuple(tuple(indices)))
    np.testing.assert_array_equal(table.cells, naive_counts(dataset, indices))
    assert table.total == n_rows


def test_marginal_of_empty_dataset_fails(small_dataset):
    with pytest.raises(InvalidInputError):
        measure_marginal(small_dataset.take([]), FeatureTuple((0,)))


def test_smoothed_probabilities():
    table = MarginalTable(FeatureTuple((0,)), np.array([3.0, 1.0]))
    assert smoothed_probabilities(table, 0.0) == pytest.approx([0.75, 0.25])
    assert smoothed_probabilities(table, 1.0) == pytest.approx([4 / 6, 2 / 6])


def test_conditional_prob_and_uniform_fallback():
    # hijo binario, padre de 3 valores; el estrato 2 está vacío
    cells = np.array([[3.0, 0.0, 0.0], [1.0, 2.0, 0.0]])
    table = MarginalTable(FeatureTuple.conditional_of(0, (1,)), cells)
    assert conditional_prob(table, 0, (0,)) == pytest.approx(0.75)
    assert conditional_prob(table, 1, (1,)) == pytest.approx(1.0)
    assert conditional_prob(table, 0, (2,)) == pytest.approx(0.5)
    assert conditional_prob(table, 0, (0,), smoothing=0.5) == pytest.approx(3.5 / 5.0)


def test_conditional_probabilities_without_parents():
    table = MarginalTable(FeatureTuple.conditional_of(0), np.array([6.0, 4.0]))
    result = conditional_probabilities(table, np.array([0, 1, 0]), np.zeros((3, 0), dtype=np.int64))
    assert result == pytest.approx([0.6, 0.4, 0.6])


def test_conditional_requires_conditional_form():
    table = MarginalTable(FeatureTuple((0, 1)), np.ones((2, 2)))
    with pytest.raises(InvalidInputError):
        conditional_prob(table, 0, (0,))


def test_mutual_information_of_identical_columns_is_entropy():
    dataset = random_dataset([4, 4], 4000, seed=2)
    values = np.column_stack([dataset.values[:, 0], dataset.values[:, 0]])
    copy = Dataset(dataset.schema, values)
    probabilities = np.bincount(values[:, 0], minlength=4) / len(values)
    entropy = -float(np.sum(probabilities * np.log(probabilities)))
    assert mutual_information(copy, 0, 1) == pytest.approx(entropy)


def test_mutual_information_of_independent_columns_is_small():
    dataset = random_dataset([3, 3], 20000, seed=5)
    assert 0.0 <= mutual_information(dataset, 0, 1) < 0.002


def test_mutual_information_requires_distinct_features(small_dataset):
    with pytest.raises(InvalidInputError):
        mutual_information(small_dataset, 1, 1)


def test_mutual_information_counts_flattens_parents():
    dataset = random_dataset([2, 2, 3], 500, seed=9)
    table = measure_marginal(dataset, FeatureTuple.conditional_of(0, (1, 2)))
    assert mutual_information_counts(table) >= 0.0
    root = measure_marginal(dataset, FeatureTuple.conditional_of(0))
    assert mutual_information_counts(root) == 0.0


def test_sample_categorical_frequencies():
    probabilities = np.tile([0.2, 0.5, 0.3], (20000, 1))
    draws = sample_categorical(probabilities, RandomSource(11))
    frequencies = np.bincount(draws, minlength=3) / len(draws)
    assert frequencies == pytest.approx([0.2, 0.5, 0.3], abs=0.015)


def test_sample_categorical_respects_degenerate_rows():
    probabilities = np.array([[0.0, 1.0], [1.0, 0.0]] * 50)
    draws = sample_categorical(probabilities, RandomSource(0))
    assert list(draws) == [1, 0] * 50


@settings(max_examples=50, deadline=None)
@given(
    cardinalities=st.lists(st.integers(2, 6), min_size=2, max_size=2),
    n_rows=st.integers(1, 500),
    seed=st.integers(0, 2**32 - 1),
    data=st.data(),
)
def test_mutual_information_is_symmetric_and_ignores_labels(cardinalities, n_rows, seed, data):
    dataset = random_dataset(cardinalities, n_rows, seed=seed)
    value = mutual_information(dataset, 0, 1)
    assert mutual_information(dataset, 1, 0) == pytest.approx(value, abs=1e-12)

    relabel = np.asarray(data.draw(st.permutations(range(cardinalities[1]))))
    values = dataset.values.copy()
    values[:, 1] = relabel[values[:, 1]]
    assert mutual_information(Dataset(dataset.schema, values), 0, 1) == pytest.approx(value, abs=1e-12)


@pytest.mark.parametrize("smoothing", [0.0, 0.5])
def test_conditional_probabilities_sum_to_one_over_the_child(smoothing):
    # el estrato (1, 2) queda vacío
    dataset = random_dataset([3, 2, 3], 200, seed=6)
    keep = ~((dataset.values[:, 1] == 1) & (dataset.values[:, 2] == 2))
    table = measure_marginal(dataset.take(np.flatnonzero(keep)), FeatureTuple.conditional_of(0, (1, 2)))
    assert table.cells[:, 1, 2].sum() == 0
    for parent_values in [(0, 0), (0, 2), (1, 0), (1, 2)]:
        parents = np.tile(parent_values, (3, 1))
        total = conditional_probabilities(table, np.arange(3), parents, smoothing).sum()
        assert total == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    cardinalities=st.lists(st.integers(2, 5), min_size=2, max_size=4),
    n_rows=st.integers(1, 500),
    seed=st.integers(0, 2**32 - 1),
)
def test_two_way_marginal_sums_to_one_way(cardinalities, n_rows, seed):
    dataset = random_dataset(cardinalities, n_rows, seed=seed)
    joint = measure_marginal(dataset, FeatureTuple((0, 1)))
    np.testing.assert_array_equal(joint.cells.sum(axis=1), measure_marginal(dataset, FeatureTuple((0,))).cells)
    np.testing.assert_array_equal(joint.cells.sum(axis=0), measure_marginal(dataset, FeatureTuple((1,))).cells)
