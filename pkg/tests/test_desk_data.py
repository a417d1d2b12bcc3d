import numpy as np

from app.services.data.desk_data import desk_schema, generate_desk_dataset
from app.services.data.marginals import mutual_information


def test_schema_has_fifteen_features():
    schema = desk_schema()
    assert schema.n_features == 15
    kinds = [feature.kind.value for feature in schema.features]
    assert kinds.count("ordinal") == 5
    assert kinds.count("nominal") == 10


def test_exact_size_and_household_structure(desk_dataset):
    assert desk_dataset.n_rows == 4000
    sizes = desk_dataset.household_index().sizes()
    assert sum(sizes.values()) == 4000
    assert max(sizes.values()) <= 10
    assert sum(1 for size in sizes.values() if size >= 5) >= 100


def test_generation_is_deterministic():
    first = generate_desk_dataset(500, seed=4)
    second = generate_desk_dataset(500, seed=4)
    assert first.fingerprint() == second.fingerprint()
    assert generate_desk_dataset(500, seed=5).fingerprint() != first.fingerprint()


def test_household_level_features_are_shared(desk_dataset):
    state = desk_dataset.schema.index_of("state")
    for rows in desk_dataset.household_index().groups.values():
        assert len(np.unique(desk_dataset.values[rows, state])) == 1


def test_one_head_per_household(desk_dataset):
    relationship = desk_dataset.schema.index_of("relationship")
    for rows in desk_dataset.household_index().groups.values():
        assert np.sum(desk_dataset.values[rows, relationship] == 0) == 1


def test_planted_dependencies_are_visible():
    data = generate_desk_dataset(20_000, seed=0)
    index = data.schema.index_of
    planted = mutual_information(data, index("education"), index("age_band"))
    unrelated = mutual_information(data, index("gender"), index("housing"))
    assert planted > 10 * unrelated
