import io
import json

from playmask.cli import main
from playmask.harness import ExperimentConfig, save_config
from playmask.nets import load_checkpoint


def test_collect_play_and_train_prior(tmp_path, capsys):
    ds = tmp_path / "play.jsonl"
    assert main(["collect-play", "--n", "600", "--seed", "1", "--out", str(ds)]) == 0
    assert "600 records" in capsys.readouterr().out

    ckpt = tmp_path / "prior.ckpt"
    code = main([
        "train-prior", "--dataset", str(ds), "--out", str(ckpt),
        "--steps", "300", "--batch", "100",
    ])
    assert code == 0
    net, _, extra = load_checkpoint(ckpt)
    assert net.layer_sizes == [11, 200, 200, 10]
    assert "final_nll" in extra


def test_train_command_writes_metrics(tmp_path):
    out = tmp_path / "metrics.csv"
    code = main([
        "train", "--algo", "ddqn", "--task", "medium", "--seed", "0",
        "--budget", "3000", "--out", str(out), "--update-every", "25",
        "--initial-explore", "500",
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "step,success_rate,cumulative_infeasible,mean_loss,epsilon"
    assert len(lines) == 2  # one evaluation point at step 2500


def test_verify_tabular_passes(capsys):
    assert main(["verify-tabular", "--trials", "8", "--max-states", "8", "--max-actions", "4", "--seed", "0"]) == 0
    out = capsys.readouterr().out
    assert "8 pass, 0 vacuous, 0 fail" in out


def test_run_and_plot(tmp_path, monkeypatch):
    monkeypatch.setenv("PLAYMASK_OUT_ROOT", str(tmp_path / "root"))
    cfg = ExperimentConfig(
        algo="ddqn", band="medium", seeds=(0,), budget=2000, eval_cadence=1000,
        eval_episodes=2, update_every=50, initial_explore=300, name="clirun",
    )
    cfg_path = tmp_path / "exp.cfg"
    save_config(cfg, cfg_path)
    assert main(["run", "--config", str(cfg_path)]) == 0
    agg = tmp_path / "root" / "clirun" / "aggregate.csv"
    assert agg.exists()
    svg = tmp_path / "chart.svg"
    assert main(["plot", f"demo={agg}", "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")


def test_interactive_play_command(tmp_path, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("4\nq\n"))
    out = tmp_path / "session.jsonl"
    assert main(["play", "--seed", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    header = json.loads(lines[0])
    assert header["size"] == 1
