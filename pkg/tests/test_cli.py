import json
import subprocess
import sys

import pytest

from pasim.cli import build_parser, main, resolve_config
from pasim.experiments import EXIT_CONFIG, EXIT_OK, EXIT_UNREACHABLE, ScenarioConfig, read_csv

SMALL_FIG2 = ["--speed-grid-kmh", "119,123,2"]


def run(argv):
    return main([str(a) for a in argv])


def test_fig2_writes_csv_and_manifest(tmp_path):
    assert run(["fig2-required-snr", "--out", tmp_path, *SMALL_FIG2]) == EXIT_OK
    comments, columns, rows = read_csv(tmp_path / "fig2_required_snr.csv")
    assert columns[:4] == ("speed_kmh", "snr_db_pa", "snr_db_full_csit", "snr_db_no_csit")
    assert [r[0] for r in rows] == ["119.0", "121.0", "123.0"]
    assert "speed_grid_kmh: [119.0, 123.0, 2.0]" in comments
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["files"] == ["fig2_required_snr.csv"]
    assert manifest["config"] == ScenarioConfig(speed_grid_kmh=[119, 123, 2]).to_dict()


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["fig4-fbl-error", "--fig4-snrs-db", "0,20", "--mc-draws", "5000", "--seed", "99"]
    assert run([*args, "--out", a]) == EXIT_OK
    assert run([*args, "--out", b, "--jobs", "2"]) == EXIT_OK
    for name in ("fig4_fbl_error.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_seed_lands_in_every_row(tmp_path):
    assert run(["fig4-fbl-error", "--out", tmp_path, "--fig4-snrs-db", "10", "--mc-draws", "1000", "--seed", "123"]) == 0
    _, columns, rows = read_csv(tmp_path / "fig4_fbl_error.csv")
    seed_col = columns.index("seed")
    assert {r[seed_col] for r in rows} == {"123"}


def test_config_file_and_flag_precedence(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"snr_db": 10, "seed": 5, "speed_grid_kmh": [110, 130, 10]}))
    args = build_parser().parse_args(["fig7-average", "--config", str(cfg_path), "--seed", "8"])
    cfg = resolve_config(args)
    assert cfg.snr_db == 10.0 and cfg.seed == 8 and cfg.speed_grid_kmh == (110.0, 130.0, 10.0)


def test_underscore_and_dash_flags(tmp_path):
    p = build_parser()
    a = resolve_config(p.parse_args(["fig2-required-snr", "--target_throughput_npcu", "4"]))
    b = resolve_config(p.parse_args(["fig2-required-snr", "--target-throughput-npcu", "4"]))
    assert a == b and a.target_throughput_npcu == 4.0


def test_mc_flag():
    cfg = resolve_config(build_parser().parse_args(["fig5-selection-sweep", "--mc"]))
    assert cfg.mc is True


def test_list_flags_accept_json_and_scalars():
    p = build_parser()
    cfg = resolve_config(p.parse_args(["fig3-fbl-throughput", "--fbl-sigmas", "0.2", "--fbl-lengths", "[100, 200]"]))
    assert cfg.fbl_sigmas == (0.2,) and cfg.fbl_lengths == (100, 200)


@pytest.mark.parametrize(
    "argv",
    [
        ["fig2-required-snr", "--mode", "quantum"],
        ["fig2-required-snr", "--speed-grid-kmh", "140,100,1"],
        ["fig2-required-snr", "--carrier-frequency", "-1"],
        ["fig2-required-snr", "--jobs", "0"],
        ["fig2-required-snr", "--seed", "-3"],
    ],
)
def test_invalid_config_exits_2(argv, tmp_path):
    assert run([*argv, "--out", tmp_path]) == EXIT_CONFIG


def test_bad_config_file_exits_2(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{"speed_grid": [1, 2, 3]}')
    assert run(["fig2-required-snr", "--config", path, "--out", tmp_path]) == EXIT_CONFIG
    assert run(["fig2-required-snr", "--config", tmp_path / "nope.json", "--out", tmp_path]) == EXIT_CONFIG


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["fig9"])
    assert info.value.code == 2


def test_unreachable_target_exits_3(tmp_path):
    code = run(["fig2-required-snr", "--out", tmp_path, "--target-throughput-npcu", "30", "--speed-grid-kmh", "120,120,1"])
    assert code == EXIT_UNREACHABLE
    _, columns, rows = read_csv(tmp_path / "fig2_required_snr.csv")
    assert rows[0][columns.index("unreachable")] == "1"
    assert float(rows[0][columns.index("snr_db_pa")]) == 60.0


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "pasim", "fig7-average", "--out", str(tmp_path), "--speed-grid-kmh", "120,121,1",
         "--arrays-wavelengths", "[[1.5]]", "--fig6-middle-wavelengths", "[]"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.split() == ["fig7_average.csv"]
    _, columns, rows = read_csv(tmp_path / "fig7_average.csv")
    assert columns[0] == "array_id" and rows[0][0] == "ra1"
