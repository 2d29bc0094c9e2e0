import io
import json


from trainmec.cli import main
from trainmec.experiment import child_seed
from trainmec import baselines


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_presets_listing():
    code, out, _ = run(["presets"])
    assert code == 0 and "fig1: num_subchannels" in out and "fig5_surplus" in out


def test_usage_errors_exit_one():
    assert run([])[0] == 1
    assert run(["frobnicate"])[0] == 1
    assert run(["sweep"])[0] == 1                       # neither preset nor param
    assert run(["sweep", "--preset", "fig1", "--trials", "0"])[0] == 1
    assert run(["trial", "--scheme", "nope"])[0] == 1


def test_validate(tmp_path):
    good = tmp_path / "good.yaml"
    good.write_text("num_users: 12\nchannel:\n  hpbw_deg: 20\n")
    assert run(["validate", str(good)])[0] == 0
    bad = tmp_path / "bad.cfg"
    bad.write_text("pathloss_exponent: 0\n")
    code, _, err = run(["validate", str(bad)])
    assert code == 2 and "pathloss_exponent" in err
    code, _, err = run(["validate", str(tmp_path / "missing.yaml")])
    assert code == 2


def test_trial_dump(tmp_path):
    cfg = tmp_path / "default.cfg"
    cfg.write_text("num_users: 6\nnum_subchannels: 4\n")
    code, out, _ = run(["trial", "--config", str(cfg), "--seed", "7", "--scheme", "jraco",
                        "--out", str(tmp_path / "o")])
    assert code == 0
    dump = json.loads(out)
    rec = dump["schemes"]["jraco"]
    assert len(rec["users"]) == 6 and rec["log"]
    assert json.loads((tmp_path / "o" / "trial_seed7.json").read_text()) == dump


def test_sweep_writes_identical_files(tmp_path):
    args = ["sweep", "--param", "num_users", "--values", "3", "5", "--trials", "2",
            "--seed", "42", "--scheme", "jraco", "--scheme", "usra"]
    assert run(args + ["--out", str(tmp_path / "a")])[0] == 0
    assert run(args + ["--out", str(tmp_path / "b"), "--parallel", "2"])[0] == 0
    for name in ("sweep_num_users_raw.csv", "sweep_num_users_summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    raw = (tmp_path / "a" / "sweep_num_users_raw.csv").read_text().splitlines()
    assert len(raw) == 1 + 2 * 2 * 2


def test_runtime_failure_prints_seed(tmp_path, monkeypatch):
    def boom(sc, seed):
        raise RuntimeError("kaboom")
    monkeypatch.setitem(baselines.SCHEMES, "jraco", boom)
    code, _, err = run(["sweep", "--param", "num_users", "--values", "3", "--trials", "1",
                        "--seed", "9", "--scheme", "jraco", "--out", str(tmp_path)])
    assert code == 3
    assert str(child_seed(9, 0, 0)) in err
