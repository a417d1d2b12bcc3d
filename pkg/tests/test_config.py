import json
import logging
import math

import pytest

from app.core.config import Settings, ToolkitConfig, load_config
from app.core.exceptions import ConfigurationError, InvalidInputError, PrivacyParameterError
from app.core.logging import setup_logging
from app.models.schemas import ActivationMode, AggregationMode


def test_defaults():
    config = load_config()
    assert config.attack.smoothing == 0.5
    assert config.attack.aggregation == AggregationMode.MEAN
    assert config.privbayes.max_parents == 4
    assert config.privacy.mi_sensitivity == pytest.approx(math.log(2))
    params = config.generator_params()
    assert params.max_cells == 10_000
    assert config.budget(10.0).measurement_fraction == pytest.approx(0.5)


def test_file_then_overrides(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(
        json.dumps({"seed": 3, "attack": {"smoothing": 1.0, "activation": {"mode": "root", "c": 2.0}}}),
        encoding="utf-8",
    )
    config = load_config(str(path), {"seed": 9, "attack": {"smoothing": None, "activation": {"c": 4.0}}})
    assert config.seed == 9
    assert config.attack.smoothing == 1.0
    assert config.attack.activation.mode == ActivationMode.ROOT
    assert config.attack.activation.c == 4.0


def test_invalid_config(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(str(tmp_path / "missing.json"))
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_config(str(path))
    with pytest.raises(ConfigurationError):
        load_config(None, {"attack": {"smoothing": -1.0}})


def test_config_hash_tracks_content():
    assert ToolkitConfig().config_hash() == ToolkitConfig().config_hash()
    assert ToolkitConfig(seed=1).config_hash() != ToolkitConfig().config_hash()


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("MIA_WORKERS", "3")
    assert Settings().WORKERS == 3
    assert ToolkitConfig(workers=2).resolved_workers() == 2


@pytest.mark.parametrize("epsilon", [0.0, -1.0])
def test_budget_rejects_non_positive_epsilon(epsilon):
    with pytest.raises(PrivacyParameterError):
        ToolkitConfig().budget(epsilon)
    with pytest.raises(InvalidInputError):
        ToolkitConfig().budget(epsilon)


def test_setup_logging_quiets_joblib(tmp_path):
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    try:
        setup_logging("DEBUG", str(tmp_path / "logs" / "run.log"))
        assert root.level == logging.DEBUG
        assert logging.getLogger("joblib").level == logging.WARNING
        assert (tmp_path / "logs" / "run.log").exists()
    finally:
        for handler in root.handlers[:]:
            root.removeHandler(handler)
            handler.close()
        for handler in handlers:
            root.addHandler(handler)
        root.setLevel(level)
