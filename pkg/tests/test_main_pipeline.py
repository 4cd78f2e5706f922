"""End-to-end runs of the command-line entry point on desk-scale inputs."""
import json
from fractions import Fraction

import pandas as pd
import pytest

from src.adversary import RefinedParams
from src.config import LabSettings
from src.harness import CSV_COLUMNS
from src.main_pipeline import LowerBoundLab, build_parser, main, parse_levels
from src.metrics import format_hst, uniform_hst


def test_parse_levels():
    assert parse_levels("1-3") == [1, 2, 3]
    assert parse_levels("2") == [2]
    with pytest.raises(ValueError):
        parse_levels("3-1")


def test_generate_then_run(tmp_path):
    out = str(tmp_path)
    main(["--seed", "4", "--out", out, "gen-seq", "basic", "--w", "1", "--name", "b"])
    for suffix in ("space", "seq", "sizes.csv"):
        assert (tmp_path / f"b.{suffix}").exists()
    assert list(pd.read_csv(tmp_path / "b.sizes.csv")["stage"])[:2] == ["stage1", "stage2"]

    main([
        "--out", out, "--alg", "greedy,path_follower",
        "run", str(tmp_path / "b.space"), str(tmp_path / "b.seq"), "--name", "r", "--layered",
    ])
    summary = json.loads((tmp_path / "r.summary.json").read_text())
    assert summary["requests"] == 8
    assert Fraction(str(summary["opt"])) == 3
    assert Fraction(str(summary["path_follower"])) == 3
    assert (tmp_path / "r.greedy.json").exists()
    assert (tmp_path / "r.layered").read_text().splitlines()[-1].endswith(" sink 0")


def test_experiment_table(tmp_path):
    main(["--out", str(tmp_path), "--trials", "2", "--alg", "path_follower", "experiment", "refined", "--levels", "1-2"])
    table = pd.read_csv(tmp_path / "experiment.csv")
    assert list(table.columns) == CSV_COLUMNS
    assert (table["ratio"] == 1).all()


def test_oracle_report(tmp_path):
    main(["--out", str(tmp_path), "--trials", "100", "oracle", "binom-tail", "--p", "0.5", "--mu", "4", "--delta", "1"])
    report = json.loads((tmp_path / "oracle.json").read_text())
    assert report["exact"] == pytest.approx(0.5 ** 8)


def test_errors_exit_nonzero(tmp_path, capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["--out", str(tmp_path), "run", str(tmp_path / "none.space"), str(tmp_path / "none.seq")])
    assert exit_info.value.code == 1
    assert "❌ Error:" in capsys.readouterr().out


def test_universal_reads_hst_alpha_and_h(tmp_path):
    tree = tmp_path / "star.tree"
    tree.write_text(format_hst(uniform_hst(4)))
    lab = LowerBoundLab(LabSettings(out_dir=str(tmp_path)))

    args = build_parser().parse_args(["gen-seq", "universal", "--hst", str(tree), "--alpha", "1/8", "--h", "3"])
    space, seq = lab.generate(args)
    assert seq.meta["alpha"] == Fraction(1, 8)
    assert seq.meta["h"] == 3 and len(seq.chunks) == 3 * 2 * seq.meta["ell"]
    assert space.point_count == 4

    _, fallback = lab.generate(build_parser().parse_args(["gen-seq", "universal", "--hst", str(tree)]))
    assert fallback.meta["alpha"] == lab.settings.universal_alpha
    assert fallback.meta["h"] == 1


def test_beta_falls_back_to_settings(tmp_path):
    lab = LowerBoundLab(LabSettings(out_dir=str(tmp_path), desk_beta=6))
    args = build_parser().parse_args(["gen-seq", "refined", "--w", "3"])
    assert args.beta is None
    assert RefinedParams.from_settings(lab.settings, args.w, beta=args.beta).beta == 64
    assert RefinedParams.from_settings(lab.settings, args.w, desk=True, beta=args.beta).beta == 6
    line = lab.build_space(build_parser().parse_args(["gen-metric", "line"]))
    assert line.point_count == 7
    explicit = lab.build_space(build_parser().parse_args(["gen-metric", "line", "--beta", "3"]))
    assert explicit.point_count == 4
