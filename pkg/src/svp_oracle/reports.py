"""
Report persistence.

JSON reports for every command plus the CSV export of circuit sweeps.
"""

import csv
import json
import logging
from datetime import datetime
from pathlib import Path

from svp_oracle.circuit import ResourceMetrics
from svp_oracle.config import REPORT_DIR

logger = logging.getLogger(__name__)

SWEEP_CSV_HEADER = ["n", "width", "depth", "quantum_cost", "t_count", "t_depth", "k"]


def metrics_to_dict(metrics: ResourceMetrics) -> dict:
    return {
        "width": metrics.width,
        "depth": metrics.depth,
        "quantum_cost": metrics.quantum_cost,
        "t_count": metrics.t_count,
        "t_depth": metrics.t_depth,
    }


def save_report(report: dict, name: str, directory: Path | None = None, timestamp: bool = True) -> Path:
    """Save a report as JSON with sorted keys.

    Args:
        report: JSON-ready dictionary; big integers already converted to strings
        name: File stem, e.g. 'oracle_build'
        directory: Output directory (defaults to REPORT_DIR)
        timestamp: Append _YYYYmmdd_HHMMSS to the file stem

    Returns:
        Path of the written file
    """
    directory = Path(directory or REPORT_DIR)
    directory.mkdir(parents=True, exist_ok=True)
    stem = f"{name}_{datetime.now().strftime('%Y%m%d_%H%M%S')}" if timestamp else name
    path = directory / f"{stem}.json"

    with open(path, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")

    logger.info(f"Report saved: {path}")
    return path


def load_report(path: Path) -> dict:
    with open(path) as f:
        return json.load(f)


def write_sweep_csv(points, path: Path) -> Path:
    """One row per sweep point: dimension, gate-level metrics and iteration count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SWEEP_CSV_HEADER)
        for p in points:
            m = p.metrics
            writer.writerow([p.n, m.width, m.depth, m.quantum_cost, m.t_count, m.t_depth, p.iterations])

    logger.info(f"Sweep CSV saved: {path}")
    return path
