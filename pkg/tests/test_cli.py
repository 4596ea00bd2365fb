import hashlib
import json
import os
import shutil
import subprocess
import sys

import pytest

from conflictnet import cli

from conftest import BORDERS_GEOJSON, FIXTURE_CSV

STAGES = ("ingest", "graph", "metrics", "embed", "aggression", "geo", "report")


@pytest.fixture()
def workspace(tmp_path):
    csv_path = tmp_path / "events.csv"
    csv_path.write_text(FIXTURE_CSV, encoding="utf-8")
    borders_path = tmp_path / "borders.geojson"
    borders_path.write_text(BORDERS_GEOJSON, encoding="utf-8")
    out_dir = tmp_path / "out"
    config = {
        "csv": str(csv_path),
        "borders": str(borders_path),
        "out": str(out_dir),
        "permutations": 500,
    }
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps(config), encoding="utf-8")
    return {
        "dir": tmp_path,
        "csv": csv_path,
        "borders": borders_path,
        "out": out_dir,
        "config": config,
        "config_path": config_path,
    }


def rewrite_config(ws, **changes):
    cfg = dict(ws["config"])
    cfg.update(changes)
    ws["config_path"].write_text(json.dumps(cfg), encoding="utf-8")


def run(ws, stage, *extra):
    return cli.main([stage, "--config", str(ws["config_path"]), *extra])


def run_all(ws, *extra):
    for stage in STAGES:
        assert run(ws, stage, *extra) == 0, f"stage {stage} failed"


def read_out(ws, name):
    return (ws["out"] / name).read_text(encoding="utf-8")


def test_full_pipeline_writes_every_artifact(workspace, capsys):
    run_all(workspace)
    produced = sorted(os.listdir(workspace["out"]))
    assert produced == [
        "aggression.csv",
        "aggression.svg",
        "betweenness_negative.csv",
        "betweenness_positive.csv",
        "chain.geojson",
        "degree_negative.csv",
        "degree_positive.csv",
        "eigenvector_negative.csv",
        "eigenvector_positive.csv",
        "embedding.csv",
        "embedding.json",
        "embedding.svg",
        "events.json",
        "graph.json",
        "metrics.json",
        "report.json",
        "row_errors.csv",
        "run_config.json",
        "scenario.json",
        "years.csv",
    ]
    out = capsys.readouterr().out
    assert "6 events, 7 organizations" in out
    assert "graph: 7 nodes, 2 positive and 7 negative ties" in out
    assert "report: merged" in out


def test_stage_outputs_are_stamped(workspace):
    run_all(workspace)
    events = json.loads(read_out(workspace, "events.json"))
    assert events["schema_version"] == "1"
    assert len(events["config_digest"]) == 64
    assert read_out(workspace, "years.csv").startswith("# schema_version=1 config_digest=")
    assert read_out(workspace, "embedding.svg").startswith("<!-- schema_version=1")
    run_config = json.loads(read_out(workspace, "run_config.json"))
    assert run_config["config"]["seed"] == 0
    assert run_config["config"]["permutations"] == 500


def test_metrics_content_shape(workspace):
    run_all(workspace)
    doc = json.loads(read_out(workspace, "metrics.json"))
    neg = doc["layers"]["negative"]
    assert set(neg["degree"]) == {"mean", "std_dev"}
    assert 0.0 <= neg["density"] <= 1.0
    assert neg["ei"]["permutations"] == 500
    assert doc["triads"]["ppp"] >= 0
    header = read_out(workspace, "degree_negative.csv").splitlines()[1]
    assert header == "actor,degree"


def test_report_hashes_match_files(workspace):
    run_all(workspace)
    report = json.loads(read_out(workspace, "report.json"))
    assert report["tool_version"]
    assert "report.json" not in report["artifacts"]
    assert "run_config.json" not in report["artifacts"]
    for name, entry in report["artifacts"].items():
        raw = (workspace["out"] / name).read_bytes()
        assert entry["sha256"] == hashlib.sha256(raw).hexdigest(), name
    assert "metrics.json" in report["artifacts"]
    assert report["config"]["permutations"] == 500


def test_ingest_reports_rejected_rows(workspace, capsys):
    broken = FIXTURE_CSV + '7MLI,05 January 2012,Battle-No change of territory,Mali,16.0,-1.0,,,Gamma Army,,1\n'
    workspace["csv"].write_text(broken, encoding="utf-8")
    assert run(workspace, "ingest") == 0
    out = capsys.readouterr().out
    assert "6 events, 7 organizations" in out
    assert "1 rows rejected (see row_errors.csv)" in out
    assert "actor_a" in read_out(workspace, "row_errors.csv")


def test_missing_csv_is_a_config_error(workspace, capsys):
    rewrite_config(workspace, csv=None)
    assert run(workspace, "ingest") == 2
    assert "config error" in capsys.readouterr().err


def test_unreadable_csv_is_an_io_error(workspace, capsys):
    rewrite_config(workspace, csv=str(workspace["dir"] / "nope.csv"))
    assert run(workspace, "ingest") == 3
    assert "cannot read" in capsys.readouterr().err


def test_missing_upstream_artifact(workspace, capsys):
    assert run(workspace, "graph") == 4
    assert "run the upstream stage first" in capsys.readouterr().err


def test_config_validation_failures(workspace, capsys):
    rewrite_config(workspace, tie_mode="sideways")
    assert run(workspace, "ingest") == 2
    assert "tie_mode" in capsys.readouterr().err

    rewrite_config(workspace, tie_mode="full", mystery_knob=1)
    assert run(workspace, "ingest") == 2
    assert "mystery_knob" in capsys.readouterr().err

    workspace["config_path"].write_text("[1, 2]", encoding="utf-8")
    assert run(workspace, "ingest") == 2
    assert "JSON object" in capsys.readouterr().err

    workspace["config_path"].write_text("{not json", encoding="utf-8")
    assert run(workspace, "ingest") == 2


def test_pipeline_error_maps_to_exit_4(workspace, capsys):
    assert run(workspace, "ingest") == 0
    assert run(workspace, "graph") == 0
    assert run(workspace, "embed", "--k", "99") == 4
    err = capsys.readouterr().err
    assert err.startswith("DimensionTooLarge:")
    assert not (workspace["out"] / "embedding.json").exists()


def test_empty_scope_fails_cleanly_at_embed(workspace, capsys):
    assert run(workspace, "ingest") == 0
    assert run(workspace, "graph", "--scope", "Atlantis") == 0
    assert run(workspace, "embed", "--scope", "Atlantis") == 4
    assert "EmptyAfterIsolateRemoval: all nodes are isolates" in capsys.readouterr().err


def test_scope_restricts_countries(workspace):
    assert run(workspace, "ingest") == 0
    assert run(workspace, "graph", "--scope", "Mali") == 0
    doc = json.loads(read_out(workspace, "graph.json"))
    assert [n["id"] for n in doc["nodes"]] == [
        "Alpha Front",
        "Beta Militia",
        "Delta Guard",
        "Gamma Army",
    ]
    ids = [n["id"] for n in doc["nodes"]]
    alpha, delta = ids.index("Alpha Front"), ids.index("Delta Guard")
    weights = {(s, d): w for s, d, w in doc["neg_edges"]}
    assert weights[(alpha, delta)] == 1.0  # the Algeria incident is out of scope

    assert run(workspace, "graph", "--scope", "Mali", "--scope", "Niger") == 0
    doc = json.loads(read_out(workspace, "graph.json"))
    assert len(doc["nodes"]) == 7


def test_tie_mode_flag_changes_graph(workspace):
    assert run(workspace, "ingest") == 0
    assert run(workspace, "graph") == 0
    full_edges = json.loads(read_out(workspace, "graph.json"))["neg_edges"]
    assert run(workspace, "graph", "--tie-mode", "paper_literal") == 0
    literal = json.loads(read_out(workspace, "graph.json"))
    assert len(literal["neg_edges"]) < len(full_edges)
    run_config = json.loads(read_out(workspace, "run_config.json"))
    assert run_config["config"]["tie_mode"] == "paper_literal"


def test_short_chain_reports_indeterminate_scenario(workspace):
    rewrite_config(workspace, scope=["Algeria"])
    assert run(workspace, "ingest") == 0
    assert run(workspace, "geo") == 0
    scenario = json.loads(read_out(workspace, "scenario.json"))
    assert scenario["label"] == "indeterminate"
    assert "reason" in scenario
    assert scenario["n_located"] == 1
    years = read_out(workspace, "years.csv").splitlines()
    assert years[-1].startswith("2013,1,4,-")  # single-event year keeps dashes


def test_geo_leaves_no_partial_output_on_bad_borders(workspace, capsys):
    assert run(workspace, "ingest") == 0
    rewrite_config(workspace, borders=str(workspace["dir"] / "missing.geojson"))
    assert run(workspace, "geo") == 3
    assert "cannot read" in capsys.readouterr().err
    assert not (workspace["out"] / "years.csv").exists()
    assert not (workspace["out"] / "chain.geojson").exists()
    assert not (workspace["out"] / "scenario.json").exists()


def test_geo_empty_chain_is_a_pipeline_error(workspace, capsys):
    rewrite_config(workspace, scope=["Atlantis"])
    assert run(workspace, "ingest") == 0
    assert run(workspace, "geo") == 4
    assert capsys.readouterr().err.startswith("EmptyChain:")
    assert not (workspace["out"] / "years.csv").exists()


def test_geo_chain_content(workspace):
    run_all(workspace)
    years = read_out(workspace, "years.csv").splitlines()
    assert years[1] == "year,n_events,victims,avg_step_km,cross_border_pct,avg_gap_days,avg_border_km"
    first = years[2].split(",")
    assert first[:3] == ["2012", "4", "9"]
    chain = json.loads(read_out(workspace, "chain.geojson"))
    kinds = [f["geometry"]["type"] for f in chain["features"]]
    assert kinds.count("Point") == 6
    assert kinds.count("LineString") == 5


def test_out_precedence_flag_env_config(workspace, monkeypatch):
    env_dir = workspace["dir"] / "env_out"
    flag_dir = workspace["dir"] / "flag_out"
    monkeypatch.setenv("CNL_OUT", str(env_dir))
    assert run(workspace, "ingest") == 0
    assert (env_dir / "events.json").exists()  # env beats config
    assert not workspace["out"].exists()

    assert run(workspace, "ingest", "--out", str(flag_dir)) == 0
    assert (flag_dir / "events.json").exists()  # flag beats env
    assert not workspace["out"].exists()


def test_seed_override_reaches_metrics(workspace):
    assert run(workspace, "ingest") == 0
    assert run(workspace, "graph") == 0
    assert run(workspace, "metrics", "--seed", "11", "--permutations", "250") == 0
    doc = json.loads(read_out(workspace, "metrics.json"))
    assert doc["seed"] == 11
    assert doc["layers"]["negative"]["ei"]["seed"] == 11
    assert doc["layers"]["negative"]["ei"]["permutations"] == 250


def test_seed_change_touches_only_mixing_outputs(workspace, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    rewrite_config(workspace, out=str(out_a))
    run_all(workspace)
    rewrite_config(workspace, out=str(out_b), seed=99)
    run_all(workspace)

    names = sorted(os.listdir(out_a))
    assert names == sorted(os.listdir(out_b))
    differing = {
        name
        for name in names
        if (out_a / name).read_bytes() != (out_b / name).read_bytes()
    }
    assert differing == {"metrics.json", "run_config.json", "report.json"}

    doc_a = json.loads((out_a / "metrics.json").read_text())
    doc_b = json.loads((out_b / "metrics.json").read_text())
    assert doc_a["seed"] == 0 and doc_b["seed"] == 99

    def strip_varying(doc):
        doc = json.loads(json.dumps(doc))  # deep copy
        doc.pop("seed")
        doc.pop("config_digest")
        for layer in doc["layers"].values():
            if layer.get("ei"):
                layer["ei"].pop("seed")
                layer["ei"].pop("p_value")
        return doc

    assert strip_varying(doc_a) == strip_varying(doc_b)
    # the observed mixing index is seed-independent; only its p-value resamples
    for layer in ("negative", "positive"):
        ei_a = doc_a["layers"][layer].get("ei")
        ei_b = doc_b["layers"][layer].get("ei")
        if ei_a and ei_b:
            assert ei_a["index"] == ei_b["index"]


def test_rerun_into_same_directory_is_byte_identical(workspace):
    run_all(workspace)
    snapshot = {
        name: (workspace["out"] / name).read_bytes()
        for name in os.listdir(workspace["out"])
    }
    shutil.rmtree(workspace["out"])
    run_all(workspace)
    for name, blob in snapshot.items():
        assert (workspace["out"] / name).read_bytes() == blob, name


def test_installed_entry_point():
    exe = shutil.which("cnl")
    if exe is None:
        pytest.skip("cnl entry point not on PATH")
    proc = subprocess.run(
        [exe, "--help"], capture_output=True, text=True, timeout=60
    )
    assert proc.returncode == 0
    assert "ingest" in proc.stdout
    assert "report" in proc.stdout


def test_module_is_runnable():
    proc = subprocess.run(
        [sys.executable, "-m", "conflictnet.cli", "ingest"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 2  # no csv configured
    assert "config error" in proc.stderr
