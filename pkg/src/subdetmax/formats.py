"""On-disk JSON formats for instances and solver reports.

Matrices are dense row-major entry lists with explicit row and column
counts; indices are 0-based; NaN and infinity are rejected on parse.  A
zero objective is written with a null log value since JSON has no -inf.
Serialization is canonical (sorted keys, fixed indentation) so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import InstanceFormatError
from .kernel import KernelInstance
from .partition_solver import PartitionInstance
from .regular_solver import RegularInstance
from .report import SolveReport

FORMAT_VERSION = "1"

KIND_PARTITION = "partition"
KIND_REGULAR = "regular"

Instance = PartitionInstance | RegularInstance


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _reject_constant(name: str):
    raise InstanceFormatError("entries", f"non-finite constant {name!r} not allowed")


def loads(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError("document", f"invalid JSON: {exc}") from exc


def matrix_to_json(a: np.ndarray) -> dict:
    rows, cols = a.shape
    return {
        "rows": rows,
        "cols": cols,
        "entries": [float(x) for x in a.reshape(-1)],
    }


def matrix_from_json(obj, field: str) -> np.ndarray:
    if not isinstance(obj, dict):
        raise InstanceFormatError(field, "expected an object with rows/cols/entries")
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            raise InstanceFormatError(field, f"missing '{key}'")
    rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 0 or cols < 0:
        raise InstanceFormatError(field, "rows/cols must be nonnegative integers")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise InstanceFormatError(
            field, f"expected {rows * cols} entries, got {len(entries) if isinstance(entries, list) else type(entries).__name__}"
        )
    try:
        arr = np.array(entries, dtype=float).reshape(rows, cols)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(field, f"entries are not numbers: {exc}") from exc
    if arr.size and not np.all(np.isfinite(arr)):
        raise InstanceFormatError(field, "entries must be finite")
    return arr


def instance_to_json(inst: Instance) -> dict:
    out = {
        "format_version": FORMAT_VERSION,
        "L": matrix_to_json(inst.kernel.matrix),
        "V": matrix_to_json(inst.kernel.factor),
    }
    if isinstance(inst, PartitionInstance):
        out["kind"] = KIND_PARTITION
        out["constraint"] = {
            "parts": [list(p) for p in inst.parts],
            "quotas": list(inst.quotas),
        }
    elif isinstance(inst, RegularInstance):
        out["kind"] = KIND_REGULAR
        out["constraint"] = {
            "representation": matrix_to_json(inst.representation)
        }
    else:
        raise TypeError(f"cannot serialize {type(inst).__name__}")
    return out


def _kernel_from_json(obj) -> KernelInstance:
    l = matrix_from_json(obj["L"], "L") if "L" in obj else None
    v = matrix_from_json(obj["V"], "V") if "V" in obj else None
    try:
        if l is not None and v is not None:
            return KernelInstance(l, v)
        if l is not None:
            return KernelInstance.from_psd(l)
        if v is not None:
            return KernelInstance.from_factor(v)
    except ValueError as exc:
        raise InstanceFormatError("L/V", str(exc)) from exc
    raise InstanceFormatError("L/V", "at least one of L, V must be present")


def instance_from_json(obj) -> Instance:
    if not isinstance(obj, dict):
        raise InstanceFormatError("document", "top level must be an object")
    if obj.get("format_version") != FORMAT_VERSION:
        raise InstanceFormatError(
            "format_version", f"expected '{FORMAT_VERSION}', got {obj.get('format_version')!r}"
        )
    kind = obj.get("kind")
    if kind not in (KIND_PARTITION, KIND_REGULAR):
        raise InstanceFormatError("kind", f"expected 'partition' or 'regular', got {kind!r}")
    kernel = _kernel_from_json(obj)
    constraint = obj.get("constraint")
    if not isinstance(constraint, dict):
        raise InstanceFormatError("constraint", "missing or not an object")
    if kind == KIND_PARTITION:
        if "parts" not in constraint:
            raise InstanceFormatError("constraint.parts", "missing")
        if "quotas" not in constraint:
            raise InstanceFormatError("constraint.quotas", "missing")
        parts = constraint["parts"]
        quotas = constraint["quotas"]
        if not isinstance(parts, list) or not all(
            isinstance(p, list) and all(isinstance(i, int) for i in p) for p in parts
        ):
            raise InstanceFormatError("constraint.parts", "must be lists of integers")
        if not isinstance(quotas, list) or not all(isinstance(b, int) for b in quotas):
            raise InstanceFormatError("constraint.quotas", "must be a list of integers")
        try:
            return PartitionInstance(
                kernel, tuple(tuple(p) for p in parts), tuple(quotas)
            )
        except ValueError as exc:
            raise InstanceFormatError("constraint", str(exc)) from exc
    if "representation" not in constraint:
        raise InstanceFormatError("constraint.representation", "missing")
    rep = matrix_from_json(constraint["representation"], "constraint.representation")
    try:
        return RegularInstance(kernel, rep)
    except ValueError as exc:
        raise InstanceFormatError("constraint.representation", str(exc)) from exc


def report_to_json(report: SolveReport) -> dict:
    out = {
        "format_version": FORMAT_VERSION,
        "chosen_set": list(report.chosen_set),
        "objective_det": report.objective_det,
        "objective_log": None
        if report.objective_log == float("-inf")
        else report.objective_log,
        "certified_factor_log": report.certified_factor_log,
        "trials": report.trials,
        "seed": report.seed,
        "warnings": list(report.warnings),
    }
    if report.per_trial_values is not None:
        out["per_trial_values"] = list(report.per_trial_values)
    return out


def report_from_json(obj) -> SolveReport:
    if not isinstance(obj, dict):
        raise InstanceFormatError("document", "top level must be an object")
    required = (
        "chosen_set",
        "objective_det",
        "objective_log",
        "certified_factor_log",
        "trials",
        "seed",
    )
    for key in required:
        if key not in obj:
            raise InstanceFormatError(key, "missing")
    log = obj["objective_log"]
    log_val = float("-inf") if log is None else float(log)
    if log is not None and not math.isfinite(log_val):
        raise InstanceFormatError("objective_log", "must be finite or null")
    per_trial = obj.get("per_trial_values")
    return SolveReport(
        chosen_set=tuple(int(i) for i in obj["chosen_set"]),
        objective_det=float(obj["objective_det"]),
        objective_log=log_val,
        certified_factor_log=float(obj["certified_factor_log"]),
        trials=int(obj["trials"]),
        seed=int(obj["seed"]),
        per_trial_values=None if per_trial is None else tuple(float(x) for x in per_trial),
        warnings=tuple(str(w) for w in obj.get("warnings", [])),
    )


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps(instance_to_json(inst)))


def load_instance(path) -> Instance:
    return instance_from_json(loads(Path(path).read_text()))


def save_report(report: SolveReport, path) -> None:
    Path(path).write_text(dumps(report_to_json(report)))


def load_report(path) -> SolveReport:
    return report_from_json(loads(Path(path).read_text()))
