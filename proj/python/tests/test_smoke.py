import json
import math
import os
import subprocess

import pytest

import anchoring as ab

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIGS = os.path.join(HERE, "..", "..", "configs")


def test_render_full_and_empty():
    full = ab.render_prompt("Scene ", "Higher than ", "Estimate?", 10)
    assert full == "Scene 10.\n\nHigher than 10?\n\nEstimate?"
    assert ab.render_prompt("Scene ", "Higher than ", "Estimate?", 10, mask=0) == ""
    assert ab.render_target(42) == "42%"
    with pytest.raises(IndexError):
        ab.render_target(101)


def test_distribution_helpers():
    probs = ab.normalize([0.0] * ab.TARGET_COUNT)
    assert ab.soft_ev(probs) == pytest.approx(50.0, abs=1e-12)
    point = [0.0] * ab.TARGET_COUNT
    point[30] = 1.0
    assert ab.predictive_band(point, 100, 200, 7) == (30.0, 30.0)


def test_tests_and_odds():
    zeros = [0.0] * 20
    assert ab.paired_t_test(zeros)["p_value"] == 1.0
    assert ab.wilcoxon_pratt(zeros)["p_value"] == 1.0
    assert ab.permutation_sign_test(zeros, 500, 1)["p_value"] == 1.0
    assert ab.odds_multiplier(0.69) == pytest.approx(2.0, abs=0.01)


def test_shapley_additive_game():
    # v(S) = sum of per-field weights: every mode returns the field's own weight.
    w = [0.5, -1.0, 2.0, 0.25]
    payoffs = [sum(w[f] for f in range(4) if m >> f & 1) for m in range(16)]
    for mode in ("subset-mean", "classic"):
        assert ab.shapley_value(payoffs, "anchor", mode) == pytest.approx(0.25, abs=1e-12)


def test_abss_reference_case():
    b = ab.abss_variation(10.0, 0.5, 0.001, 0.001, 0.001, 0.001)
    assert b["abss"] == pytest.approx(0.1 + math.tanh(0.5) + 0.15, abs=1e-12)
    assert b["c"] == 1


def test_python_scorer_runs_pipeline():
    class Flat(ab.Scorer):
        def score(self, request):
            return -math.log(101.0)

        def fingerprint(self):
            return "python/flat"

    config = {
        "model": "flat",
        "statistics": {"band_B": 200, "permutations": 200},
        "variations": [
            {
                "id": "V1-S",
                "regime": "S",
                "scene": "Scene ",
                "comparative": "Higher than ",
                "absolute": "Estimate?",
                "anchor_low": 10,
                "anchor_high": 65,
            }
        ],
    }
    result = ab.run_experiment(config, Flat())
    (v,) = result["variations"]
    assert v["ok"]
    assert v["delta_ev"] == pytest.approx(0.0, abs=1e-9)
    assert v["breakdown"]["abss"] == pytest.approx(0.0, abs=1e-12)
    assert result["scorer_fingerprint"] == "python/flat"


def test_oracle_config_run_and_write(tmp_path):
    result = ab.run_experiment(os.path.join(CONFIGS, "oracle_shift.json"))
    assert result["model_report"]["mean"] > 0.2
    names = ab.write_run(result, tmp_path)
    assert "softev.tsv" in names
    with open(tmp_path / "softev.tsv") as fh:
        assert len(fh.read().splitlines()) == 1 + 22
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config_hash"] == result["config_hash"]


def test_config_errors_surface_as_value_error():
    bad = {"variations": [{"id": "D", "regime": "D", "scene": "s ", "comparative": "c ", "absolute": "a?",
                           "anchor_low": 10, "anchor_high": 60}]}
    with pytest.raises(ab.ConfigError):
        ab.run_experiment(bad)
    assert ab.config_hash({"model": "m", "variations": "default"}) == ab.config_hash(
        {"variations": "default", "model": "m"})


def test_selftest_passes():
    assert all(passed for _, passed, _ in ab.selftest())


@pytest.mark.skipif(not os.environ.get("ANCHORBIAS_CLI"), reason="CLI path not provided")
def test_cli_selftest():
    out = subprocess.run([os.environ["ANCHORBIAS_CLI"], "selftest"], capture_output=True, text=True)
    assert out.returncode == 0, out.stdout + out.stderr
    assert out.stdout.count("PASS") == 4
