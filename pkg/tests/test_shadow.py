import pytest

from app.core.exceptions import EmptyFocalPointsError, InsufficientDataError
from app.models.schemas import GeneratorKind, PrivacyBudget, ShadowConfig
from app.models.tables import FeatureTuple
from app.services.attacks.shadow import (
    FocalPointWeights,
    focal_point_frequency_rows,
    mean_parent_size,
    parent_size_frequency_rows,
    run_shadow,
    top_focal_points,
)
from app.services.data.desk_data import generate_desk_dataset


def shadow_config(kind=GeneratorKind.MST, epsilon=1.0, runs=4, size=300, **kwargs) -> ShadowConfig:
    return ShadowConfig(
        generator_kind=kind,
        budget=PrivacyBudget(epsilon_total=epsilon),
        runs=runs,
        train_sample_size=size,
        base_seed=11,
        **kwargs,
    )


def weights_of(entries, runs=50) -> FocalPointWeights:
    return FocalPointWeights(
        entries={FeatureTuple.from_key(key): value for key, value in entries.items()},
        runs=runs,
        generator_kind=GeneratorKind.MST,
        epsilon=1.0,
    )


def test_single_run_gives_unit_weights(small_dataset):
    weights = run_shadow(small_dataset, shadow_config(runs=1))
    assert len(weights.entries) == small_dataset.n_features - 1
    assert all(value == 1.0 for value in weights.entries.values())


def test_frequencies_count_selections(small_dataset):
    weights = run_shadow(small_dataset, shadow_config(runs=6))
    for value in weights.entries.values():
        assert 0.0 < value <= 1.0
        assert (value * 6) == pytest.approx(round(value * 6))
    # cada corrida elige n−1 aristas
    assert sum(weights.entries.values()) == pytest.approx(small_dataset.n_features - 1)


def test_shadow_is_reproducible(small_dataset):
    config = shadow_config(kind=GeneratorKind.PRIVBAYES, runs=3)
    assert run_shadow(small_dataset, config).to_dict() == run_shadow(small_dataset, config).to_dict()


def test_parallel_tally_equals_serial(small_dataset):
    config = shadow_config(runs=4)
    assert run_shadow(small_dataset, config, workers=2).to_dict() == run_shadow(small_dataset, config).to_dict()


def test_high_epsilon_fixed_sample_selects_one_edge_set(desk_dataset):
    config = shadow_config(epsilon=1e9, runs=5, size=2000, fixed_sample=True)
    weights = run_shadow(desk_dataset, config)
    assert len(weights.entries) == desk_dataset.n_features - 1
    assert all(value == pytest.approx(1.0) for value in weights.entries.values())


def test_sample_size_larger_than_aux_fails(small_dataset):
    with pytest.raises(InsufficientDataError):
        run_shadow(small_dataset, shadow_config(size=small_dataset.n_rows + 1))


def test_top_focal_points_filters_and_normalizes():
    focal, weights = top_focal_points(weights_of({"0,1": 1.0, "1,2": 0.5, "0,3": 0.02}), min_weight=0.1)
    assert focal == [FeatureTuple.pair(0, 1), FeatureTuple.pair(1, 2)]
    assert list(weights) == pytest.approx([2 / 3, 1 / 3])


def test_top_focal_points_without_threshold_keeps_everything():
    focal, weights = top_focal_points(weights_of({"0,1": 1.0, "1,2": 0.5, "0,3": 0.02}), min_weight=0.0)
    assert len(focal) == 3
    assert float(weights.sum()) == pytest.approx(1.0, abs=1e-12)


def test_top_focal_points_breaks_ties_canonically():
    focal, _ = top_focal_points(weights_of({"2,3": 0.5, "0,4": 0.5, "1,2": 0.96}))
    assert [f.key() for f in focal] == ["1,2", "0,4", "2,3"]


def test_top_focal_points_empty_result():
    with pytest.raises(EmptyFocalPointsError):
        top_focal_points(weights_of({"0,1": 0.2}), min_weight=0.5)


def test_weights_document_round_trip():
    weights = FocalPointWeights(
        entries={FeatureTuple.conditional_of(2, (0, 1)): 0.96, FeatureTuple.conditional_of(0): 0.04},
        runs=50,
        generator_kind=GeneratorKind.PRIVBAYES,
        epsilon=10.0,
        seed=3,
    )
    loaded = FocalPointWeights.from_dict(weights.to_dict())
    assert loaded.entries == weights.entries
    assert loaded.to_dict() == weights.to_dict()


def test_frequency_rows():
    weights = FocalPointWeights(
        entries={
            FeatureTuple.conditional_of(0): 1.0,
            FeatureTuple.conditional_of(1, (0,)): 0.6,
            FeatureTuple.conditional_of(1, (0, 2)): 0.4,
            FeatureTuple.conditional_of(2, (0,)): 1.0,
        },
        runs=10,
        generator_kind=GeneratorKind.PRIVBAYES,
        epsilon=100.0,
    )
    sizes = {row["n_parents"]: row["mean_count_per_run"] for row in parent_size_frequency_rows([weights])}
    assert sizes == pytest.approx({0: 1.0, 1: 1.6, 2: 0.4})
    assert mean_parent_size(weights) == pytest.approx((1.6 + 0.8) / 3.0)
    rows = focal_point_frequency_rows([weights])
    assert rows[0]["focal_point"] == "0|"
    assert {row["frequency"] for row in rows} == {1.0, 0.6, 0.4}


@pytest.fixture(scope="module")
def desk_aux():
    return generate_desk_dataset(20_000, seed=0)


def desk_shadow(aux, kind, epsilon):
    config = ShadowConfig(
        generator_kind=kind,
        budget=PrivacyBudget(epsilon_total=epsilon),
        runs=50,
        train_sample_size=10_250,
        base_seed=5,
    )
    return run_shadow(aux, config, workers=2)


@pytest.mark.slow
def test_mst_edge_sets_settle_as_epsilon_grows(desk_aux):
    weights = {eps: desk_shadow(desk_aux, GeneratorKind.MST, eps) for eps in (1.0, 10.0, 100.0, 1000.0)}
    assert len(weights[1.0].entries) >= len(weights[1000.0].entries)
    assert weights[1000.0].metadata["modal_set_frequency"] >= 0.6
    modal = [weights[eps].metadata["modal_set_frequency"] for eps in sorted(weights)]
    assert all(later >= earlier - 0.1 for earlier, later in zip(modal, modal[1:]))


@pytest.mark.slow
def test_privbayes_parent_sets_grow_with_epsilon(desk_aux):
    weights = {eps: desk_shadow(desk_aux, GeneratorKind.PRIVBAYES, eps) for eps in (1.0, 10.0, 100.0, 1000.0)}
    assert all(len(features.parents) <= 2 for features in weights[1.0].entries)
    sizes = [mean_parent_size(weights[eps]) for eps in sorted(weights)]
    assert all(later >= earlier - 1e-9 for earlier, later in zip(sizes, sizes[1:]))
    assert sizes[-1] > sizes[0]
