"""
Fixtures compartidas por las pruebas.
"""
import pytest

from app.core.randomness import RandomSource
from app.models.dataset import Dataset
from app.services.data.desk_data import generate_desk_dataset
from tests.helpers import random_dataset


@pytest.fixture
def rng() -> RandomSource:
    return RandomSource(1234)


@pytest.fixture
def small_dataset() -> Dataset:
    return random_dataset([2, 3, 2, 4], 400, seed=7, household_size=5)


@pytest.fixture(scope="session")
def desk_dataset() -> Dataset:
    return generate_desk_dataset(4000, seed=3)
