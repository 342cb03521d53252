import csv
import io
import json

import numpy as np
import pytest

from schursim import cli

SWEEP_HEADER = [
    "n",
    "J",
    "gamma",
    "hz",
    "L",
    "T",
    "order_param",
    "order_param_limit",
    "concurrence",
    "rescaled_concurrence",
    "CR_limit",
    "wall_seconds",
]


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def test_blocks_json_schema(capsys):
    code, out = run_cli(capsys, ["blocks", "--n", "4", "--kind", "sum_zz", "--out", "-"])
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 4 and doc["kind"] == "sum_zz"
    ms = [blk["m"] for blk in doc["blocks"]]
    assert ms == [0, 1, 2]
    for blk in doc["blocks"]:
        d = blk["d"]
        assert d == 4 - 2 * blk["m"] + 1
        mat = np.array(blk["real"]) + 1j * np.array(blk["imag"])
        assert mat.shape == (d, d)
        # values round-trip exactly through the JSON
        assert np.max(np.abs(mat - mat.conj().T)) == 0.0


def test_blocks_kvec_and_sector_filter(capsys):
    code, out = run_cli(
        capsys,
        ["blocks", "--n", "5", "--kvec", "1,0,1", "--sectors", "0,2", "--out", "-"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["kvec"] == [1, 0, 1]
    assert [blk["m"] for blk in doc["blocks"]] == [0, 2]


def test_blocks_rejects_kind_kvec_combination(capsys):
    code, _ = run_cli(capsys, ["blocks", "--n", "4", "--kind", "sum_x", "--kvec", "0,0,1"])
    assert code == cli.EXIT_CONFIG
    code, _ = run_cli(capsys, ["blocks", "--n", "4"])
    assert code == cli.EXIT_CONFIG
    code, _ = run_cli(capsys, ["blocks", "--n", "4", "--kind", "sum_q"])
    assert code == cli.EXIT_CONFIG


def test_lmg_sweep_schema_and_determinism(capsys):
    argv = [
        "lmg-sweep",
        "--ns", "8",
        "--gamma", "0.5",
        "--hz", "0.4,1.6",
        "--layers", "8",
        "--total-time", "4.0",
        "--out", "-",
    ]
    code, out1 = run_cli(capsys, argv)
    assert code == 0
    header, rows = parse_csv(out1)
    assert header == SWEEP_HEADER
    assert len(rows) == 2
    assert [r[3] for r in rows] == ["0.40000000000000002", "1.6000000000000001"]

    _, out2 = run_cli(capsys, argv)
    _, rows2 = parse_csv(out2)
    # identical numbers modulo the timing column
    assert [r[:-1] for r in rows] == [r[:-1] for r in rows2]


def test_lmg_sweep_default_grid_and_file_output(capsys, tmp_path):
    target = tmp_path / "sweep.csv"
    code = cli.main(
        [
            "lmg-sweep",
            "--ns", "6",
            "--hz-min", "0.0",
            "--hz-max", "1.0",
            "--hz-step", "0.5",
            "--layers", "6",
            "--total-time", "3.0",
            "--out", str(target),
        ]
    )
    assert code == 0
    header, rows = parse_csv(target.read_text())
    assert header == SWEEP_HEADER
    assert [r[3] for r in rows] == ["0", "0.5", "1"]
    # limits column agrees with the closed form
    from schursim import lmg

    for row in rows:
        hz = float(row[3])
        assert abs(float(row[7]) - lmg.order_parameter_limit(hz)) < 1e-15


def test_threads_env_does_not_change_values(capsys, monkeypatch):
    argv = [
        "lmg-sweep",
        "--ns", "8",
        "--hz", "0.3,0.9,1.7",
        "--layers", "6",
        "--total-time", "3.0",
        "--out", "-",
    ]
    monkeypatch.setenv(cli.THREADS_ENV, "1")
    _, out1 = run_cli(capsys, argv)
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    _, out2 = run_cli(capsys, argv)
    _, rows1 = parse_csv(out1)
    _, rows2 = parse_csv(out2)
    assert [r[:-1] for r in rows1] == [r[:-1] for r in rows2]


def test_bench_reports_exponent(capsys):
    code, out = run_cli(
        capsys, ["bench", "--task", "twirl", "--ns", "8,16", "--reps", "1", "--out", "-"]
    )
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["task", "n", "repetitions", "median_seconds"]
    assert rows[-1][0] == "twirl-exponent"
    float(rows[-1][3])  # the fitted slope parses as a number
    assert len(rows) == 3


def test_shadows_csv_schema_and_reproducibility(capsys):
    argv = [
        "shadows",
        "--n", "2",
        "--seed", "3",
        "--snapshots", "200",
        "--protocol", "both",
        "--out", "-",
    ]
    code, out1 = run_cli(capsys, argv)
    assert code == 0
    header, rows = parse_csv(out1)
    assert header == [
        "protocol",
        "observable",
        "truth",
        "estimate",
        "std_error",
        "empirical_variance",
        "variance_bound",
        "n_snapshots",
    ]
    protocols = {r[0] for r in rows}
    assert protocols == {"symmetrized", "deep"}
    assert len(rows) == 2 * len(cli.GENERATOR_KINDS)
    sum_x = [r for r in rows if r[0] == "symmetrized" and r[1] == "sum_x"][0]
    assert abs(float(sum_x[2]) - 1.0) < 1e-12  # truth for |+><+| is 1

    _, out2 = run_cli(capsys, argv)
    assert out1 == out2  # no timing columns, so byte-identical


def test_shadows_seed_is_required(capsys):
    code, _ = run_cli(capsys, ["shadows", "--n", "2", "--snapshots", "10"])
    assert code == cli.EXIT_CONFIG


def test_shadows_resource_guard(capsys):
    code, _ = run_cli(
        capsys,
        ["shadows", "--n", "64", "--seed", "1", "--snapshots", "10", "--protocol", "symmetrized"],
    )
    assert code == cli.EXIT_RESOURCE


def test_verify_command_and_fault_injection(capsys, tmp_path):
    report = tmp_path / "report.json"
    code, _ = run_cli(capsys, ["verify", "--ns", "2,3", "--report", str(report)])
    assert code == 0
    doc = json.loads(report.read_text())
    assert doc["passed"] is True

    code, _ = run_cli(
        capsys,
        ["verify", "--ns", "2", "--inject-fault", "global-y-sign", "--report", str(report)],
    )
    assert code == cli.EXIT_VERIFY
    doc = json.loads(report.read_text())
    assert doc["passed"] is False
    bad = [c["name"] for c in doc["checks"] if not c["passed"]]
    assert bad == ["generator-blocks-dense-n2"]


def test_verify_rejects_large_registers(capsys):
    code, _ = run_cli(capsys, ["verify", "--ns", "2,12"])
    assert code == cli.EXIT_CONFIG


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ns": "8", "gamma": 0.25, "hz": "0.5",
                               "layers": 6, "total_time": 3.0}))
    argv = ["lmg-sweep", "--config", str(cfg), "--gamma", "0.75", "--out", "-"]
    code, out = run_cli(capsys, argv)
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 1
    assert rows[0][2] == "0.75"  # flag wins
    assert rows[0][3] == "0.5"  # file value used where no flag was given


def test_bad_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    code, _ = run_cli(capsys, ["lmg-sweep", "--config", str(cfg)])
    assert code == cli.EXIT_CONFIG


def test_argparse_rejects_unknown_subcommand():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2
