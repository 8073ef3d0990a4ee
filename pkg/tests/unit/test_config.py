"""
Configuration Tests
"""
import pytest

from models.config import FirstFrameMask, PipelineConfig
from services.exceptions import ConfigError
from services.pipeline_service import load_config


def write_config(tmp_path, text: str):
    path = tmp_path / "doa.toml"
    path.write_text(text, encoding="utf-8")
    return path


@pytest.mark.unit
class TestLoadConfig:
    """Flat key = value files validated into PipelineConfig"""

    def test_no_file_gives_defaults(self):
        cfg = load_config(None)
        assert cfg == PipelineConfig()
        assert (cfg.t1, cfg.t2, cfg.k, cfg.score_min) == (0.2, 0.7, 3, 0.8)
        assert (cfg.erosion_radius, cfg.pgt_threshold) == (5, 0.5)
        assert (cfg.lambda_, cfg.alpha, cfg.iterations, cfg.first_frame_sample_prob) == (0.8, 0.95, 15, 0.95)

    def test_empty_file_equals_defaults(self, tmp_path):
        assert load_config(write_config(tmp_path, "")) == PipelineConfig()

    def test_explicit_default_equals_omission(self, tmp_path):
        assert load_config(write_config(tmp_path, "k = 3\n")) == load_config(None)

    def test_symbol_aliases(self, tmp_path):
        cfg = load_config(write_config(tmp_path, "T1 = 0.1\nT2 = 0.6\nT = 0.4\nd = 10\nlambda = 0.5\n"))
        assert cfg.t1 == 0.1
        assert cfg.t2 == 0.6
        assert cfg.pgt_threshold == 0.4
        assert cfg.negative_distance(854, 480) == 10.0
        assert cfg.lambda_ == 0.5

    def test_field_names_work_too(self, tmp_path):
        cfg = load_config(write_config(tmp_path, "t1 = 0.15\nerosion_radius = 3\n"))
        assert cfg.t1 == 0.15
        assert cfg.erosion_radius == 3

    def test_eval_block(self, tmp_path):
        cfg = load_config(write_config(tmp_path, "eval.enabled = false\neval.tol = 4\n"))
        assert not cfg.eval.enabled
        assert cfg.eval.tol == 4
        assert cfg.eval.exclude_endpoints

    def test_ablation_switches(self, tmp_path):
        cfg = load_config(write_config(
            tmp_path, 'use_negatives = false\nfirst_frame_mask = "eroded"\nworkers = 4\n'
        ))
        assert not cfg.use_negatives
        assert cfg.first_frame_mask == FirstFrameMask.ERODED
        assert cfg.workers == 4

    def test_default_negative_distance(self):
        """round(0.15 * diagonal)"""
        assert PipelineConfig().negative_distance(854, 480) == 147.0
        assert PipelineConfig().negative_distance(128, 96) == 24.0

    def test_selection_view(self):
        cfg = PipelineConfig(T1=0.3, k=2)
        assert cfg.selection.t1 == 0.3
        assert cfg.selection.k == 2

    @pytest.mark.parametrize("text", [
        "T1 = 1.5\n",
        "k = 0\n",
        "alpha = -0.1\n",
        "T = 1.0\n",
        "unknown_key = 1\n",
        'first_frame_mask = "mystery"\n',
        "k = = 3\n",
    ])
    def test_invalid_files(self, tmp_path, text):
        with pytest.raises(ConfigError) as exc:
            load_config(write_config(tmp_path, text))
        assert exc.value.exit_code == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="missing input"):
            load_config(tmp_path / "absent.toml")
