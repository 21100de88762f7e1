import csv
import io
from pathlib import Path

import numpy as np
import pytest

from qslkit.cli import main, parse_grid, read_config, UsageError

GOLDEN = Path(__file__).parent / "golden"
COMPUTE = [
    "compute", "--channel", "rtn", "--c", "0.6", "--kappa", "1", "--state", "bloch:1,0,0",
    "--method", "bures", "--norm", "op", "--tau", "1", "--grid", "0.01:5:200",
]


def run(argv):
    out = io.StringIO()
    code = main(argv, stdout=out)
    return code, out.getvalue()


def test_compute_golden():
    code, text = run(COMPUTE)
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    gold = list(csv.reader((GOLDEN / "compute_rtn_bloch_x.csv").open()))
    assert rows[0] == gold[0] == ["kappa_tau", "tau_qsl", "cl1", "s_l", "m_cl"]
    assert len(rows) == 201
    assert np.allclose(np.array(rows[1:], float), np.array(gold[1:], float), rtol=1e-9, atol=1e-12)


def test_compute_is_byte_deterministic(tmp_path):
    _, a = run(COMPUTE)
    _, b = run(COMPUTE + ["--threads", "4"])
    assert a == b
    assert run(COMPUTE + ["--out", str(tmp_path / "x.csv")])[0] == 0
    assert (tmp_path / "x.csv").read_text() == a
    assert run(COMPUTE + ["--out", str(tmp_path / "dir")])[0] == 0
    assert (tmp_path / "dir" / "compute.csv").read_bytes() == a.encode()


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "--state", "bloch:1,0,0"],
        ["compute", "--channel", "rtn", "--state", "bloch:1,0,0", "--grid", "0:5:10"],
        ["compute", "--channel", "rtn", "--state", "bloch:1,0,0", "--grid", "1:5"],
        ["compute", "--channel", "rtn", "--state", "bloch:9,0,0"],
        ["compute", "--channel", "rtn", "--state", "bloch:1,0,0", "--norm", "max"],
        ["compute", "--channel", "rtn", "--state", "bloch:1,0,0", "--threads", "0"],
        ["compute", "--channel", "oun", "--kappa", "-1", "--state", "bloch:1,0,0"],
        ["figure", "fig9"],
        ["nonmarkov", "--channel", "oun", "--horizon", "-1"],
        ["witness", "--channel", "oun"],
        ["validate", "--filter", "no-such-property"],
        ["bogus"],
        [],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_numeric_failure_exit_3(capsys):
    code = main(["compute", "--channel", "nmad", "--state", "chi:+,0.5", "--grid", "0.05:10:50"])
    err = capsys.readouterr().err
    assert code == 3
    assert "compute" in err and "t=8.24" in err


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nchannel = rtn\nc = 0.6\nstate = bloch:0.5,0,0\ngrid = 0.01:5:200\nmethod=bures\n")
    _, from_file = run(["compute", "--config", str(cfg), "--state", "bloch:1,0,0"])
    _, direct = run(COMPUTE)
    assert from_file == direct
    assert read_config(cfg)[:2] == ["--channel", "rtn"]
    bad = tmp_path / "bad.cfg"
    bad.write_text("channel rtn\n")
    with pytest.raises(UsageError):
        read_config(bad)


def test_parse_grid():
    assert np.allclose(parse_grid("0.5:1:3"), [0.5, 0.75, 1.0])
    for bad in ("0:1:3", "-1:1:3", "1:0.5:3", "1:2:1", "a:b:c"):
        with pytest.raises(UsageError):
            parse_grid(bad)


def test_nonmarkov_report(tmp_path):
    code, text = run(["nonmarkov", "--channel", "rtn", "--c", "0.6", "--csv", str(tmp_path / "g.csv"), "--grid", "0.1:20:50"])
    assert code == 0
    lines = dict(line.split(": ", 1) for line in text.splitlines() if ": " in line and not line.startswith(" "))
    assert lines["negative_intervals"] == "4"
    assert float(lines["weight"]) == pytest.approx(2.0)
    assert (tmp_path / "g.csv").read_text().startswith("kappa_t,t,p_t,gamma\n")
    code, text = run(["nonmarkov", "--channel", "oun"])
    assert "negative_intervals: 0" in text


def test_witness_command():
    code, text = run(["witness", "--n", "3", "--grid", "0.05:20:40"])
    assert code == 0
    assert "group 1: GHZ3,1+" in text and "group 2: GHZ3,2+ GHZ3,3+ GHZ3,4+" in text
    assert "verdict: consistent" in text
    code, text = run(["witness", "--family", "mcb", "--tau", "1", "--grid", "0.05:20:40"])
    assert "group 1: mcb:phi+ mcb:phi- mcb:psi+ mcb:psi-" in text


def test_figure_command(tmp_path):
    code, text = run(["figure", "fig1d", "--out", str(tmp_path), "--points", "10", "--threads", "2"])
    assert code == 0 and "fig1d: 2 curves" in text
    assert sorted(p.name for p in (tmp_path / "fig1d").iterdir()) == ["oun_chi+.csv", "oun_chi+_q0.5.csv", "plot.gp"]


def test_validate_filter_and_mutation():
    code, text = run(["validate", "--filter", "norms.chain"])
    assert code == 0 and text.startswith("PASS norms.chain")
    code, text = run(["validate", "--filter", "channels", "--mutate", "pt-sign"])
    assert code == 1
    assert "FAIL channels.p_consistency" in text and "failed: channels.p_consistency" in text
    code, text = run(["validate", "--list"])
    assert "qsl.closed_forms" in text.split()
