"""
Tests for report persistence.
"""

import csv
import json
import re

from svp_oracle.circuit import ResourceMetrics
from svp_oracle.estimate import SweepPoint
from svp_oracle.reports import SWEEP_CSV_HEADER, load_report, metrics_to_dict, save_report, write_sweep_csv


def test_metrics_to_dict():
    """Test metrics are flattened with their field names."""
    m = ResourceMetrics(width=10, depth=4, quantum_cost=30, t_count=7, t_depth=3)
    assert metrics_to_dict(m) == {"width": 10, "depth": 4, "quantum_cost": 30, "t_count": 7, "t_depth": 3}


def test_save_without_timestamp(tmp_path):
    """Test a report is written as sorted JSON under its plain name."""
    path = save_report({"b": 1, "a": "2"}, "oracle_build", tmp_path, timestamp=False)
    assert path == tmp_path / "oracle_build.json"
    text = path.read_text()
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")
    assert load_report(path) == {"a": "2", "b": 1}


def test_save_with_timestamp(tmp_path):
    """Test timestamped file names."""
    path = save_report({}, "sweep", tmp_path / "nested")
    assert re.fullmatch(r"sweep_\d{8}_\d{6}\.json", path.name)
    assert json.loads(path.read_text()) == {}


def test_write_sweep_csv(tmp_path):
    """Test one CSV row per sweep point."""
    point = SweepPoint(
        n=2,
        seed=1,
        metrics=ResourceMetrics(20, 50, 300, 70, 12),
        total_input_bits=2,
        N=4,
        iterations=1,
    )
    path = write_sweep_csv([point], tmp_path / "sweep.csv")
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == SWEEP_CSV_HEADER
    assert rows[1] == ["2", "20", "50", "300", "70", "12", "1"]
