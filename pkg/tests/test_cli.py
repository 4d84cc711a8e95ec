import json

import pytest

from tarpitnav.cli import main
from tarpitnav.config import APPS_DIR
from tests.conftest import FIXTURES, fixture_path

AD_APP = str(APPS_DIR / "ad_tarpit.yaml")


def _error(capsys) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_report_auc_from_values(capsys):
    assert main(["report", "auc", "--values", "0", "10", "20"]) == 0
    assert capsys.readouterr().out.strip() == "20.0"


def test_extract_tarpits(capsys):
    assert main(["extract-tarpits", fixture_path("traces/session.csv"), "--top-k", "0"]) == 0
    assert capsys.readouterr().out.split() == ["login"]


def test_silhouette_text_raster(tmp_path, capsys):
    output = tmp_path / "g02.txt"
    argv = ["silhouette", fixture_path("silhouette/g02_label.xml"), "--canvas", "9x16", "--text", "-o", str(output)]
    assert main(argv) == 0
    assert output.read_text(encoding="utf-8") == (FIXTURES / "silhouette" / "g02_label.txt").read_text(encoding="utf-8")


def test_run_then_report(tmp_path, capsys):
    report = str(tmp_path / "run.yaml")
    assert main(["run", AD_APP, "--oracle-motifs", "--budget", "100", "-o", report]) == 0
    capsys.readouterr()
    assert main(["report", "union", report]) == 0
    assert int(capsys.readouterr().out) >= 1
    assert main(["report", "heuristics", report]) == 0
    assert capsys.readouterr().out.startswith("heuristic")


def test_run_prints_yaml_without_output(capsys):
    assert main(["run", AD_APP, "--no-navigator", "--budget", "0"]) == 0
    assert "coverage: 1\n" in capsys.readouterr().out


def test_synth_train_classify(tmp_path, capsys):
    assert main(["dataset", "synth", "-o", str(tmp_path / "synth"), "--per-class", "3"]) == 0
    manifest = capsys.readouterr().out.strip()
    model = str(tmp_path / "model.joblib")
    assert main(["train", manifest, "-o", model]) == 0
    assert "accuracy:" in capsys.readouterr().out
    assert main(["classify", fixture_path("login_screen.xml"), "--model", model, "--top", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3
    assert all(len(line.split("\t")) == 2 for line in lines)


@pytest.mark.parametrize(
    "argv",
    [
        ["run", AD_APP],
        ["report", "union"],
        ["silhouette", "x.xml", "--canvas", "9by16", "-o", "x.png"],
        ["classify", "x.xml"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_with_two(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == 2


def test_missing_file_is_a_runtime_error(tmp_path, capsys):
    assert main(["report", "union", str(tmp_path / "missing.yaml")]) == 1
    assert _error(capsys)["error"] == "FileNotFoundError"


def test_bad_hierarchy_is_a_runtime_error(tmp_path, capsys):
    broken = tmp_path / "broken.xml"
    broken.write_text("<hierarchy><node bounds='[0,0][1,1]'>", encoding="utf-8")
    assert main(["silhouette", str(broken), "-o", str(tmp_path / "out.png")]) == 1
    error = _error(capsys)
    assert error["error"] == "MalformedDocument"
    assert error["message"]


def test_compare_needs_both_groups(tmp_path, capsys):
    assert main(["report", "compare", "--base", "a.yaml"]) == 1
    assert _error(capsys)["error"] == "ValueError"
