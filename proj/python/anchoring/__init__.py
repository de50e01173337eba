"""Anchoring-bias evaluation: prompt ablation, log-prob scoring, Shapley attribution and ABSS."""

import json as _json
import os as _os

from ._anchoring import (
    SUBSET_COUNT,
    TARGET_COUNT,
    ConfigError,
    NonFiniteScore,
    PromptContext,
    Scorer,
    ScorerError,
    ScoreRequest,
    SyntheticOracle,
    TokenizationMismatch,
    TransportError,
    abss_variation,
    normalize,
    odds_multiplier,
    paired_t_test,
    permutation_sign_test,
    predictive_band,
    render_prompt,
    render_target,
    selftest,
    shapley_value,
    soft_ev,
    subset_label,
    wilcoxon_pratt,
)
from . import _anchoring

__all__ = [
    "SUBSET_COUNT",
    "TARGET_COUNT",
    "ConfigError",
    "NonFiniteScore",
    "PromptContext",
    "Scorer",
    "ScorerError",
    "ScoreRequest",
    "SyntheticOracle",
    "TokenizationMismatch",
    "TransportError",
    "abss_variation",
    "config_hash",
    "load_config",
    "normalize",
    "odds_multiplier",
    "paired_t_test",
    "permutation_sign_test",
    "predictive_band",
    "render_prompt",
    "render_target",
    "run_experiment",
    "selftest",
    "shapley_value",
    "soft_ev",
    "subset_label",
    "wilcoxon_pratt",
    "write_run",
]


def _config_text(config):
    if isinstance(config, (str, _os.PathLike)) and _os.path.exists(config):
        with open(config, encoding="utf-8") as fh:
            return fh.read(), _os.path.dirname(_os.path.abspath(config))
    if isinstance(config, dict):
        return _json.dumps(config), ""
    return str(config), ""


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return _json.load(fh)


def config_hash(config):
    text, base = _config_text(config)
    return _anchoring.config_hash(text, base)


def run_experiment(config, scorer=None):
    """Run every variation; ``config`` is a dict, JSON text or a path. Returns the result record."""
    text, base = _config_text(config)
    return _json.loads(_anchoring.run_experiment_json(text, scorer, base))


def write_run(result, out_dir):
    """Store a result record as a run directory; returns the artifact names."""
    return _anchoring.write_run_json(_json.dumps(result), str(out_dir))
