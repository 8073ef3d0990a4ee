"""
Pytest configuration and fixtures for DOA tests
"""
import hashlib
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pytest
import ujson as json

from models.config import PipelineConfig
from models.masks import BinaryMask
from models.synth import SceneSpec
from services.pipeline_service import run_sequence
from services.synth import generate, standard_scene


# ============================================================================
# CONFIGURATION
# ============================================================================

def pytest_addoption(parser):
    """Add custom command line options"""
    parser.addoption(
        "--synth-scenes",
        action="store",
        type=int,
        default=20,
        help="Number of seeded scenes in the synthetic distractor suite"
    )


@pytest.fixture(scope="session")
def synth_scene_count(request):
    """How many standard scenes the distractor suite generates"""
    return request.config.getoption("--synth-scenes")


@pytest.fixture
def rng():
    """Seeded generator so property checks are reproducible"""
    return np.random.default_rng(20240617)


@pytest.fixture
def default_config():
    return PipelineConfig()


# ============================================================================
# SEQUENCE FIXTURES
# ============================================================================

@pytest.fixture
def make_sequence(tmp_path):
    """
    Factory that writes a synthetic sequence under tmp_path

    Usage in tests:
        seq_dir, manifest = make_sequence()                 # standard scene, seed 0
        seq_dir, manifest = make_sequence(spec=my_spec, name="static")
    """
    def _make(spec: SceneSpec = None, name: str = "seq"):
        spec = spec if spec is not None else standard_scene(0)
        seq_dir = tmp_path / name
        manifest = generate(spec, seq_dir)
        return seq_dir, manifest

    return _make


@pytest.fixture(scope="session")
def standard_run(tmp_path_factory):
    """
    Standard scene (seed 0) generated and run once with default config

    Shared by read-only integration tests; tests that modify the sequence
    directory must build their own with make_sequence.
    """
    root = tmp_path_factory.mktemp("standard")
    seq_dir = root / "standard-000"
    manifest = generate(standard_scene(0), seq_dir)
    out_dir = root / "out"
    summary = run_sequence(seq_dir, PipelineConfig(), out_dir)
    return {
        "sequence_dir": seq_dir,
        "out_dir": out_dir,
        "manifest": manifest,
        "summary": summary,
    }


# ============================================================================
# HELPER FUNCTIONS
# ============================================================================

def box_mask(width: int, height: int, x: int, y: int, w: int, h: int) -> BinaryMask:
    """Filled rectangle mask"""
    bits = np.zeros((height, width), dtype=bool)
    bits[y:y + h, x:x + w] = True
    return BinaryMask(bits=bits)


def random_mask(rng: np.random.Generator, width: int, height: int, density: float = 0.3) -> BinaryMask:
    return BinaryMask(bits=rng.random((height, width)) < density)


def tree_digest(root: Path) -> str:
    """sha256 over every file under root (relative path + bytes), in sorted order"""
    digest = hashlib.sha256()
    for path in sorted(p for p in Path(root).rglob("*") if p.is_file()):
        digest.update(path.relative_to(root).as_posix().encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()


def read_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def assert_run_artifacts(out_dir: Path, n_frames: int):
    """Validate that a run wrote every per-sequence and per-frame artifact"""
    out_dir = Path(out_dir)
    for name in ["pseudo_gt.pgm", "pseudo_gt.json", "first_frame.pgm", "plan.json", "motion/00000.pgm"]:
        assert (out_dir / name).is_file(), f"Run missing artifact: {name}"

    for t in range(1, n_frames):
        for name in [f"labels/{t:05d}.pgm", f"labels/{t:05d}.json", f"overlays/{t:05d}.ppm", f"motion/{t:05d}.pgm"]:
            assert (out_dir / name).is_file(), f"Run missing artifact: {name}"

    assert not (out_dir / "labels/00000.pgm").exists(), "Frame 0 must not get a label map"


def assert_plan_structure(plan: Dict[str, Any], n_frames: int):
    """Validate that plan.json has one well-formed record per frame >= 1"""
    required_fields = ['frame_index', 'mode', 'lambda', 'alpha', 'iterations',
                       'first_frame_sample_prob', 'pseudo_gt_path']

    assert 'sequence' in plan, "Plan missing sequence name"
    assert [r['frame_index'] for r in plan['frames']] == list(range(1, n_frames)), \
        "Plan must hold frames 1..n-1 in order"

    for record in plan['frames']:
        for field in required_fields:
            assert field in record, f"Plan record missing required field: {field}"
        assert record['mode'] in ['adapt', 'one_shot'], f"Invalid mode: {record['mode']}"
        assert 0.0 <= record['lambda'] <= 1.0
        assert record['alpha'] == plan['alpha'], "alpha must be fixed across frames"
        if record['mode'] == 'one_shot':
            assert 'label_map_path' not in record, "one_shot records carry no label map"
            assert record['lambda'] == 0.0
        else:
            assert record['label_map_path'] == f"labels/{record['frame_index']:05d}.pgm"


def assert_report_structure(report: Dict[str, Any]):
    """Validate metrics.json / evaluation responses"""
    for field in ['sequence', 'j_mean', 'f_mean', 'frames']:
        assert field in report, f"Report missing required field: {field}"

    assert 0.0 <= report['j_mean'] <= 1.0
    assert 0.0 <= report['f_mean'] <= 1.0
    for frame in report['frames']:
        assert set(frame) == {'index', 'j', 'f'}, f"Unexpected frame score keys: {sorted(frame)}"
