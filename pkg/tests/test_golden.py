import csv
import gzip
from pathlib import Path

import numpy as np
import pytest

from bipartite_thermo.runner import CSV_COLUMNS, csv_rows
from bipartite_thermo.scenario import bundled_scenarios

GOLDEN = Path(__file__).parent / "golden"
# loose enough for a different BLAS, tight enough to catch any physics change
RTOL, ATOL = 1e-9, 1e-12


@pytest.mark.parametrize("name", bundled_scenarios())
def test_trajectory_matches_golden(name, bundled_run):
    path = GOLDEN / f"{name}.csv.gz"
    if not path.is_file():
        pytest.fail(f"missing {path.name}; run tests/golden/regenerate.py")
    with gzip.open(path, "rt", newline="", encoding="utf-8") as fh:
        header, *expected = list(csv.reader(fh))
    assert tuple(header) == CSV_COLUMNS
    got = list(csv_rows(bundled_run(name).traj))
    assert len(got) == len(expected)
    for i, (g, e) in enumerate(zip(got, expected)):
        empty_g = [v == "" for v in g]
        assert empty_g == [v == "" for v in e], f"row {i}: empty columns differ"
        gv = np.array([float(v) for v in g if v])
        ev = np.array([float(v) for v in e if v])
        np.testing.assert_allclose(gv, ev, rtol=RTOL, atol=ATOL, err_msg=f"row {i}")
