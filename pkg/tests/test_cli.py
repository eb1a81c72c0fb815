import json

import numpy as np
import pytest

from tcfft.cli import main
from tcfft.oracle import CSV_HEADER


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_small_size_passes(capsys):
    code, out, _ = _run(capsys, "verify", "--sizes", "16", "--seed", "1")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == CSV_HEADER
    kind, n, ny, batch, metric, value = lines[1].split(",")
    assert (kind, n, ny, batch, metric) == ("1d", "16", "", "1", "relative_error")
    assert float(value) < 0.035


def test_verify_rejects_non_power_of_two(capsys):
    code, _, err = _run(capsys, "verify", "--sizes", "96")
    assert code == 2
    assert "96" in err


def test_verify_2d_row_format(capsys):
    code, out, _ = _run(
        capsys, "verify", "--sizes", "64", "--dims", "2", "--ny", "64"
    )
    assert code == 0
    assert out.strip().splitlines()[1].startswith("2d,64,64,1,")


def test_verify_envelope_failure_exits_nonzero(capsys):
    code, _, err = _run(
        capsys, "verify", "--sizes", "256", "--envelope", "0.0001"
    )
    assert code == 1
    assert "exceeds" in err


def test_verify_is_deterministic(capsys):
    args = ("verify", "--sizes", "64", "256", "--batch", "2", "--seed", "9")
    _, first, _ = _run(capsys, *args)
    _, second, _ = _run(capsys, *args)
    assert first == second


def test_verify_double_mode(capsys):
    code, out, _ = _run(capsys, "verify", "--sizes", "256", "--mode", "double")
    assert code == 0
    assert float(out.strip().splitlines()[1].split(",")[-1]) < 1e-12


def test_bench_reports_positive_throughput(capsys):
    code, out, _ = _run(
        capsys, "bench", "--sizes", "65536", "--batch", "8", "--min-time", "0.01"
    )
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == CSV_HEADER
    kind, n, _, batch, metric, value = lines[1].split(",")
    assert (kind, n, batch, metric) == ("1d", "65536", "8", "tflops")
    assert float(value) > 0


def test_plan_dump_schedules(capsys):
    code, out, _ = _run(capsys, "plan", "--sizes", "131072", "16")
    assert code == 0
    first, second = (json.loads(line) for line in out.strip().splitlines())
    assert first["schedule_x"] == [8192, 16]
    assert second["schedule_x"] == [16]


def test_fragmap_dump_shape(capsys):
    code, out, _ = _run(capsys, "fragmap")
    obj = json.loads(out)
    assert code == 0
    assert len(obj["lanes"]) == 32
    assert len({len(per_lane) for per_lane in obj["lanes"]}) == 1
    assert obj["lanes"][0][0] == {"row": 0, "col": 0}


def test_fragmap_replicated_covers_positions_twice(capsys):
    code, out, _ = _run(capsys, "fragmap", "--kind", "replicated")
    obj = json.loads(out)
    assert code == 0
    count = np.zeros((16, 16), dtype=int)
    for per_lane in obj["lanes"]:
        for e in per_lane:
            count[e["row"], e["col"]] += 1
    assert (count == 2).all()


def test_out_flag_writes_file(tmp_path, capsys):
    path = tmp_path / "report.csv"
    code, out, _ = _run(
        capsys, "verify", "--sizes", "64", "--out", str(path)
    )
    assert code == 0
    assert out == ""
    lines = path.read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 2


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
