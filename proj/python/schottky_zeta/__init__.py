"""Selberg zeta functions of Schottky surfaces and their random covers."""

import json

from ._core import (
    Group,
    SchottkyError,
    Zeta,
    bsp_bound,
    build_from_disks,
    euler_product_zeta,
    expected_trace,
    hausdorff_dimension,
    load_group,
    partition,
    pressure,
    proper_power,
    reference_group,
    sample_rep,
    validate,
)
from . import _core


def gap_experiment(group, config=None, jobs=0, timing=False):
    """Returns (csv_text, summary_dict)."""
    csv, summary = _core.gap_experiment(group, json.dumps(config or {}), jobs, timing)
    return csv, json.loads(summary)


def hs_decay(group, config=None, jobs=0):
    """Returns (csv_text, record_dict)."""
    csv, record = _core.hs_decay(group, json.dumps(config or {}), jobs)
    return csv, json.loads(record)


__all__ = [
    "Group",
    "SchottkyError",
    "Zeta",
    "bsp_bound",
    "build_from_disks",
    "euler_product_zeta",
    "expected_trace",
    "gap_experiment",
    "hausdorff_dimension",
    "hs_decay",
    "load_group",
    "partition",
    "pressure",
    "proper_power",
    "reference_group",
    "sample_rep",
    "validate",
]
