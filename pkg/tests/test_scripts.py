import json
import sys
from pathlib import Path

SCRIPTS = Path(__file__).parent.parent / "scripts"
sys.path.insert(0, str(SCRIPTS))

import canonicity_run  # noqa: E402
import forcing_sweep  # noqa: E402
import oracle_crosscheck  # noqa: E402


def test_forcing_sweep_small(tmp_path, capsys):
    out = tmp_path / "sweep.json"
    assert forcing_sweep.main(["--time-bounds", "1", "--headrooms", "0", "1",
                               "--out", str(out)]) == 0
    rows = json.loads(out.read_text())["rows"]
    status = {(r["headroom"], r["theorem"]): r["status"] for r in rows}
    assert status[(0, "delete_later")] == "counterexample"
    assert status[(1, "delete_later")] == "pass"
    assert status[(1, "negative_control")] == "counterexample"


def test_forcing_sweep_reports_invalid_sizes(capsys):
    rows = forcing_sweep.run(forcing_sweep.SweepConfig(pools=(1,), time_bounds=(2,)))
    assert "skipped" in rows[0]


def test_canonicity_run(capsys):
    cfg = canonicity_run.CanonicityConfig(fuels=(1, 1000))
    rows = canonicity_run.run(cfg)
    assert len(rows) >= 20
    assert all(r["derivation"] == "ok" for r in rows)
    assert any(r["runs"][1] == "OutOfFuel" for r in rows)


def test_oracle_crosscheck_has_no_no_answers(capsys):
    cfg = oracle_crosscheck.CrossCheckConfig(scripts=("streams.gctt",), max_time=1)
    rows = oracle_crosscheck.run(cfg)
    assert rows and not any(r.get("No") for r in rows)
