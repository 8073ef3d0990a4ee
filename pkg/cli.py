"""
doa - Command Line Interface

    doa run   --config <file> --sequence <dir> --out <dir> [--eval]
    doa synth --spec <file> --out <dir>
    doa eval  --pred <dir> --gt <dir> --out metrics.json

Exit codes: 0 success, 2 no foreground on frame 0, 3 format/config error,
4 dimension mismatch, 1 anything else.
"""
import logging
import os
import sys
from pathlib import Path
from typing import Optional

import click
import ujson as json
from dotenv import load_dotenv
from pydantic import ValidationError

from models.synth import SceneSpec
from services.eval_metrics import report_to_dict
from services.exceptions import DOAError, FormatError
from services.pipeline_service import evaluate_directories, load_config, run_sequence
from services.synth import generate, standard_scene
from storage.base import dumps_stable


def configure_logging() -> None:
    """Root logging from DOA_LOG_LEVEL (default WARNING)"""
    load_dotenv()
    level = os.getenv("DOA_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _fail(error: DOAError) -> None:
    click.echo(f"error: {error}", err=True)
    sys.exit(error.exit_code)


@click.group()
def doa():
    """Distractor-aware online adaptation: selection, plans and evaluation"""
    configure_logging()


@doa.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="key = value config file; defaults apply when omitted")
@click.option("--sequence", "sequence_dir", type=click.Path(), required=True,
              help="Sequence directory with frames/, flow/ and proposals/")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--eval/--no-eval", "evaluate", default=None,
              help="Force evaluation on or off (default: config eval.enabled)")
def run(config_path: Optional[str], sequence_dir: str, out_dir: str, evaluate: Optional[bool]):
    """Run the pipeline on one sequence"""
    try:
        config = load_config(config_path)
        summary = run_sequence(sequence_dir, config, out_dir, evaluate=evaluate)
    except DOAError as e:
        _fail(e)
        return

    click.echo(
        f"{summary.sequence}: {summary.n_frames} frames, pseudo-GT proposals {summary.selected_indices}, "
        f"hard negatives on {len(summary.hard_negative_frames)} frames, "
        f"one-shot on {len(summary.one_shot_frames)}"
    )
    if summary.j_mean is not None:
        click.echo(f"J mean {summary.j_mean:.4f}  F mean {summary.f_mean:.4f}")


@doa.command()
@click.option("--spec", "spec_path", type=click.Path(dir_okay=False), default=None,
              help="SceneSpec JSON file")
@click.option("--seed", type=int, default=None,
              help="Generate the standard distractor scene for this seed instead of --spec")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def synth(spec_path: Optional[str], seed: Optional[int], out_dir: str):
    """Generate a synthetic sequence"""
    try:
        if spec_path is not None:
            try:
                spec = SceneSpec.model_validate(json.loads(Path(spec_path).read_text(encoding="utf-8")))
            except FileNotFoundError:
                raise FormatError(f"missing input: {spec_path}")
            except (ValueError, ValidationError) as e:
                raise FormatError(f"{spec_path}: {e}")
        elif seed is not None:
            spec = standard_scene(seed)
        else:
            raise FormatError("either --spec or --seed is required")
        manifest = generate(spec, out_dir)
    except DOAError as e:
        _fail(e)
        return

    planted = sum(len(f.hard_negatives) for f in manifest.frames)
    click.echo(f"{manifest.name}: {manifest.n_frames} frames written to {out_dir}, {planted} planted hard negatives")


@doa.command(name="eval")
@click.option("--pred", "pred_dir", type=click.Path(), required=True)
@click.option("--gt", "gt_dir", type=click.Path(), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--tol", type=int, default=None, help="Boundary tolerance in pixels")
@click.option("--keep-endpoints", is_flag=True, help="Count first and last frame in the means")
def evaluate(pred_dir: str, gt_dir: str, out_path: str, tol: Optional[int], keep_endpoints: bool):
    """Score a prediction directory against ground truth"""
    try:
        report = evaluate_directories(pred_dir, gt_dir, tol=tol, exclude_endpoints=not keep_endpoints)
    except DOAError as e:
        _fail(e)
        return

    target = Path(out_path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dumps_stable(report_to_dict(report)), encoding="utf-8")
    click.echo(f"J mean {report.j_mean:.4f}  F mean {report.f_mean:.4f} over {len(report.frames)} frames")


if __name__ == "__main__":
    doa()
