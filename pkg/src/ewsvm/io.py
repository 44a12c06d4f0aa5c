"""Plain-text file formats.

* dataset: CSV, header ``label,<pauli words>``, features at 17 significant digits;
* dataset metadata: ``key = value`` lines, one ``sample.<i>`` line per sample;
* model: ``key = value`` lines, ``w`` as a space separated list;
* witness and verdict reports: JSON with sorted keys.

Every writer is byte-deterministic for equal inputs.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import features, qcore
from .svm import SvmModel
from .witness import WitnessOperator


class FormatError(ValueError):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _value_str(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(_value_str(x) for x in v)
    return str(v)


def _parse_scalar(s: str):
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    if s in ("True", "False"):
        return s == "True"
    if s == "None":
        return None
    return s


# --------------------------------------------------------------------------
# key = value files
# --------------------------------------------------------------------------

def write_kv(path, items: dict) -> None:
    lines = [f"{k} = {_value_str(v)}" for k, v in items.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_kv(path) -> dict:
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise FormatError(f"{path}:{n}: expected 'key = value'")
        out[key.strip()] = value
    return out


# --------------------------------------------------------------------------
# datasets
# --------------------------------------------------------------------------

def write_dataset(path, labels, X) -> None:
    X = np.asarray(X, dtype=float)
    n = features.n_qubits_of_features(X)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label"] + qcore.pauli_labels(n))
        for lab, row in zip(labels, X):
            w.writerow([str(int(lab))] + [_fmt(v) for v in row])


def read_dataset(path):
    """Return ``(labels, X, pauli_words)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "label":
        raise FormatError(f"{path}: missing header")
    header = rows[0][1:]
    try:
        y = np.array([int(r[0]) for r in rows[1:]], dtype=float)
        X = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=float).reshape(len(rows) - 1, len(header))
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: {exc}") from None
    return y, X, header


def write_metadata(path, config: dict, provenance: list[dict]) -> None:
    items = dict(config)
    items["n_samples"] = len(provenance)
    for i, prov in enumerate(provenance):
        items[f"sample.{i}"] = " ".join(f"{k}={_value_str(v)}" for k, v in prov.items())
    write_kv(path, items)


def read_metadata(path) -> tuple[dict, list[dict]]:
    raw = read_kv(path)
    config, prov = {}, []
    for key, value in raw.items():
        if key.startswith("sample."):
            prov.append({k: _parse_scalar(v) for k, v in (tok.split("=", 1) for tok in value.split())})
        else:
            config[key] = value
    return config, prov


# --------------------------------------------------------------------------
# models
# --------------------------------------------------------------------------

_MODEL_SCALARS = ("solver", "seed", "objective", "initial_objective", "train_accuracy", "n_samples",
                  "iterations", "epochs", "duality_gap", "n_support")


def write_model(path, model: SvmModel) -> None:
    items = {"format": "ewsvm-model-1", "dim": model.dim, "C": float(model.C), "b": float(model.b),
             "w": [float(x) for x in model.w]}
    for key in _MODEL_SCALARS:
        if key in model.meta:
            items[key] = model.meta[key]
    write_kv(path, items)


def read_model(path) -> SvmModel:
    raw = read_kv(path)
    try:
        w = np.array([float(x) for x in raw["w"].split()])
        model = SvmModel(w, float(raw["b"]), float(raw["C"]))
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}: bad model file ({exc})") from None
    if w.shape[0] != int(raw.get("dim", w.shape[0])):
        raise FormatError(f"{path}: w has {w.shape[0]} entries, dim says {raw['dim']}")
    for key in _MODEL_SCALARS:
        if key in raw:
            model.meta[key] = _parse_scalar(raw[key])
    return model


# --------------------------------------------------------------------------
# witnesses and reports
# --------------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=1, sort_keys=True) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None


def witness_record(W: WitnessOperator, report: dict | None = None) -> dict:
    m = W.matrix
    return {
        "format": "ewsvm-witness-1",
        "n_qubits": W.n_qubits,
        "normalization": W.normalization,
        "paulis": qcore.pauli_labels(W.n_qubits),
        "coefficients": W.coefficients,
        "matrix_real": m.real,
        "matrix_imag": m.imag,
        "meta": W.meta,
        "report": report or {},
    }


def write_witness(path, W: WitnessOperator, report: dict | None = None) -> None:
    write_json(path, witness_record(W, report))


def read_witness(path) -> WitnessOperator:
    """Load a witness; coefficients win, the matrix is only used when they are absent."""
    rec = read_json(path)
    try:
        n = int(rec["n_qubits"])
        norm = rec.get("normalization", "as-given")
        meta = dict(rec.get("meta", {}))
        if rec.get("coefficients") is not None:
            return WitnessOperator(n, np.array(rec["coefficients"], dtype=float), norm, meta)
        m = np.array(rec["matrix_real"], dtype=float) + 1j * np.array(rec["matrix_imag"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: bad witness file ({exc})") from None
    W = WitnessOperator.from_matrix(m, norm)
    W.meta.update(meta)
    return W
