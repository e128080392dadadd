import csv
import hashlib
import json
from pathlib import Path

import pytest

from paranet.cli import EXIT_CONFIG, EXIT_OK, EXIT_PARTIAL, RunConfig, ConfigError, main
from paranet.netmeasure.record import FEATURE_NAMES

WEB = Path(__file__).parent / "data" / "web"
BOOKS = ["mark", "luke", "john", "acts", "judges", "exodus"]
SMALL = ["--nodes", "12", "--samples", "3", "--density", "0.1", "--seed", "3"]


def write_manifest(path, books, label=lambda b: "web-en", extra=()):
    docs = [{"id": b, "path": str(WEB / f"{b}.txt"), "language": "en",
             "dataset_label": label(b)} for b in books]
    docs.extend(extra)
    path.write_text(json.dumps({"documents": docs}), encoding="utf-8")
    return path


def tree_hashes(root):
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(Path(root).rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("run")
    manifest = write_manifest(base / "m.json", BOOKS)
    out = base / "out"
    code = main(["run", str(manifest), "--out", str(out), "--unknown", "acts", *SMALL])
    assert code == EXIT_OK
    return base, manifest, out


def test_build_single_document(tmp_path):
    manifest = write_manifest(tmp_path / "m.json", ["mark"])
    assert main(["build", str(manifest), "--out", str(tmp_path / "o"), "--nodes", "10",
                 "--samples", "2"]) == EXIT_OK
    names = sorted(p.name for p in (tmp_path / "o" / "networks").glob("*.graphml"))
    assert names == ["mark.RT.0.graphml", "mark.SS.0.graphml", "mark.SS.1.graphml",
                     "mark.SW.0.graphml", "mark.SW.1.graphml"]
    assert len(list((tmp_path / "o" / "networks").glob("*.edges"))) == 5
    assert json.loads((tmp_path / "o" / "errors.json").read_text()) == {"errors": []}

    no_ss = tmp_path / "n"
    assert main(["build", str(manifest), "--out", str(no_ss), "--nodes", "10", "--samples", "2",
                 "--no-ss"]) == EXIT_OK
    assert len(list((no_ss / "networks").glob("*.graphml"))) == 3


def test_build_is_deterministic(tmp_path):
    manifest = write_manifest(tmp_path / "m.json", ["mark"])
    for d in ("a", "b"):
        main(["build", str(manifest), "--out", str(tmp_path / d), "--nodes", "10",
              "--samples", "2"])
    assert tree_hashes(tmp_path / "a") == tree_hashes(tmp_path / "b")
    main(["build", str(manifest), "--out", str(tmp_path / "c"), "--nodes", "10",
          "--samples", "2", "--workers", "2"])
    parallel = tree_hashes(tmp_path / "c")
    serial = tree_hashes(tmp_path / "a")
    assert {k: v for k, v in parallel.items() if k.startswith("networks")} == \
        {k: v for k, v in serial.items() if k.startswith("networks")}


def test_build_records_short_and_missing_documents(tmp_path):
    (tmp_path / "short.txt").write_text("One.\n\nTwo.\n\nThree.", encoding="utf-8")
    extra = [{"id": "short", "path": str(tmp_path / "short.txt")},
             {"id": "gone", "path": str(tmp_path / "nope.txt")}]
    manifest = write_manifest(tmp_path / "m.json", ["mark"], extra=extra)
    out = tmp_path / "o"
    assert main(["build", str(manifest), "--out", str(out), "--nodes", "10",
                 "--samples", "1"]) == EXIT_PARTIAL
    errors = json.loads((out / "errors.json").read_text())["errors"]
    assert [e["document"] for e in errors] == ["short", "gone"]
    assert len(list((out / "networks").glob("mark.*.graphml"))) == 3


@pytest.mark.parametrize("flags", [["--nodes", "5"], ["--density", "0"], ["--density", "1.5"],
                                   ["--samples", "0"], ["--svm-c", "-1"], ["--svm-c", "big"]])
def test_config_errors_exit_2(tmp_path, flags, capsys):
    manifest = write_manifest(tmp_path / "m.json", ["mark"])
    assert main(["build", str(manifest), "--out", str(tmp_path / "o"), *flags]) == EXIT_CONFIG
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["command"] == "build" and record["type"] == "ConfigError"


def test_config_file_and_overrides(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"nodes_per_network": 20, "samples": 4}))
    cfg = RunConfig.load(tmp_path / "c.json", {"samples": 7, "density": None})
    assert (cfg.nodes_per_network, cfg.samples, cfg.density) == (20, 7, 0.05)
    (tmp_path / "bad.json").write_text(json.dumps({"colour": 1}))
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "bad.json", {})


def test_measure_csv_shape(run_dir):
    _, _, out = run_dir
    with open(out / "measurements.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows[0]) == 3 + 33 and rows[0][3:] == list(FEATURE_NAMES)
    assert len(rows) - 1 == len(list((out / "networks").glob("*.graphml"))) == 6 * 7


def test_measure_is_idempotent(run_dir, tmp_path):
    _, _, out = run_dir
    again = tmp_path / "again.csv"
    assert main(["measure", str(out / "networks"), "--csv", str(again), "--seed", "3"]) == EXIT_OK
    assert again.read_bytes() == (out / "measurements.csv").read_bytes()


def test_measure_names_malformed_file(tmp_path, capsys):
    (tmp_path / "nets").mkdir()
    (tmp_path / "nets" / "broken.RT.0.graphml").write_text("<graphml><oops", encoding="utf-8")
    code = main(["measure", str(tmp_path / "nets"), "--out", str(tmp_path / "o")])
    assert code == EXIT_PARTIAL
    assert "broken.RT.0.graphml" in capsys.readouterr().err
    failure = json.loads((tmp_path / "o" / "measure_failure.json").read_text())
    assert "broken.RT.0.graphml" in failure["error"]


def test_measure_empty_directory(tmp_path):
    (tmp_path / "nets").mkdir()
    assert main(["measure", str(tmp_path / "nets"), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_experiment_reports(run_dir):
    _, _, out = run_dir
    a = json.loads((out / "reports" / "criterion_a.json").read_text())["web-en"]
    b = json.loads((out / "reports" / "criterion_b.json").read_text())["web-en"]
    assert len(a) == 33 and "Q" in a
    assert len(b) == 33 and set(b["Q"]) == {"SW", "SS"}
    assert set(b["Q"]["SW"]["z"]) == set(BOOKS)


def test_experiment_cv_report(run_dir, tmp_path):
    base, _, out = run_dir
    manifest = write_manifest(tmp_path / "m.json", BOOKS,
                              label=lambda b: "syn" if b in BOOKS[:3] else "sem")
    dest = tmp_path / "o"
    args = ["experiment", str(out / "measurements.csv"), "--manifest", str(manifest),
            "--syntax-dataset", "syn", "--semantics-dataset", "sem", "--out", str(dest)]
    assert main(args) == EXIT_OK
    cv = json.loads((dest / "reports" / "cv.json").read_text())
    assert len(cv) == 33 and cv["Q"]["class"] in {"syntax", "semantics", "both", "undefined"}
    first = tree_hashes(dest)
    assert main(args) == EXIT_OK
    assert tree_hashes(dest) == first


def test_classify_outputs(run_dir):
    _, _, out = run_dir
    ev = json.loads((out / "classify" / "evaluation.json").read_text())
    # five training books, one RT and one replicate of each variant per book
    assert ev["samples"] == 15 and ev["excluded_document"] == "acts"
    assert ev["binary"]["samples"] == 15
    verdict = json.loads((out / "classify" / "verdict.json").read_text())
    assert verdict["document"] == "acts" and verdict["training_samples"] == 15
    assert verdict["sw_total"] == verdict["ss_total"] == 3
    rt = [v for v in verdict["verdicts"] if v["kind"] == "RT"]
    assert len(rt) == 1 and rt[0]["label"] in ("REAL", "SHUFFLED")
    assert set(rt[0]["margins"]) == {"REAL", "SHUFFLED"}
    model = json.loads((out / "classify" / "model.json").read_text())
    assert model["kernel"] == "linear" and model["features"] == ev["selected_features"]


def test_classify_unknown_missing(run_dir, tmp_path):
    _, _, out = run_dir
    code = main(["classify", str(out / "measurements.csv"), "--unknown", "tobit",
                 "--out", str(tmp_path / "o")])
    assert code == EXIT_CONFIG
    assert "tobit" in json.loads((tmp_path / "o" / "classify_failure.json").read_text())["error"]


def test_full_run_is_deterministic(run_dir, tmp_path):
    _, manifest, out = run_dir
    again = tmp_path / "out"
    assert main(["run", str(manifest), "--out", str(again), "--unknown", "acts", *SMALL]) == EXIT_OK
    assert tree_hashes(again) == tree_hashes(out)


def test_vote_command(tmp_path, capsys):
    f = tmp_path / "t.tsv"
    f.write_text("okeey\tokeey\tokaey\n", encoding="utf-8")
    assert main(["vote", str(f)]) == EXIT_OK
    assert capsys.readouterr().out == "okeey\n"
    main(["vote", str(f), "--output", str(tmp_path / "v.txt")])
    assert (tmp_path / "v.txt").read_text() == "okeey\n"
