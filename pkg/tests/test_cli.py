import json

from dca.cli import main


def test_synth_then_run_and_analyze(tmp_path, capsys):
    session_dir = tmp_path / "session"
    assert main(["synth", "--kind", "attack", "--seed", "1", "--out", str(session_dir)]) == 0
    for name in ("signals.csv", "antigen.csv", "truth.csv"):
        assert (session_dir / name).exists()

    out = tmp_path / "run"
    args = ["run", "--signals", str(session_dir / "signals.csv"), "--antigen", str(session_dir / "antigen.csv"),
            "--truth", str(session_dir / "truth.csv"), "--out", str(out)]
    assert main(args) == 0
    assert (out / "run_000_presentations.csv").exists()
    capsys.readouterr()

    assert main(["analyze", str(out / "run_000_presentations.csv"), "--truth", str(session_dir / "truth.csv"),
                 "--antigen", str(session_dir / "antigen.csv"), "--out", str(tmp_path / "an")]) == 0
    text = capsys.readouterr().out
    assert "threshold,accuracy" in text and "presentation_ratio" in text
    assert (tmp_path / "an" / "mcav.csv").read_text() == (out / "run_000_mcav.csv").read_text()


def test_experiment_flags_and_dump(tmp_path, capsys):
    assert main(["experiment", "--mapping", "M4", "--population", "20", "--threshold-range", "0.2:0.4",
                 "--cycles", "30", "--reps", "2", "--dump-config"]) == 0
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["engine"]["population"] == 20 and cfg["engine"]["antigen_capacity"] == 1
    assert cfg["engine"]["threshold_range"] == [0.2, 0.4] and cfg["repetitions"] == 2

    config_path = tmp_path / "c.json"
    config_path.write_text(json.dumps(cfg))
    assert main(["experiment", "--config", str(config_path), "--out", str(tmp_path / "e")]) == 0
    assert (tmp_path / "e" / "run_001_mcav.csv").exists()
    assert json.loads((tmp_path / "e" / "config.json").read_text())["engine"] == cfg["engine"]


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["experiment", "--population", "0"]) == 2
    assert "engine.population" in capsys.readouterr().err
    assert main(["experiment", "--mapping", "M5", "--antigen-capacity", "5"]) == 2
    assert main(["run", "--signals", str(tmp_path / "missing.csv"), "--antigen", "x"]) == 2
