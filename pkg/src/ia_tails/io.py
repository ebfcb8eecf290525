"""Flat-file persistence: sample files, result JSON, study CSV, run manifests."""

import csv
import datetime as _dt
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .errors import SampleParseError
from .sampler import SampleSet

STUDY_COLUMNS = ("kappa_true", "method", "mse_kappa", "sd_kappa", "mse_sigma", "sd_sigma",
                 "ad", "cvm", "nll", "trials", "n")
FIT_FIELDS = ("method", "family", "sigma_hat", "kappa_hat", "q_hat", "beta_hat",
              "k_selected", "diagnostics")
MANIFEST_SUFFIX = ".manifest.json"


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_text(path, text):
    # newline="" keeps "\n" on every platform
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_samples(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return SampleSet.from_text(text, {"source": str(path)})
    except SampleParseError as exc:
        raise SampleParseError(f"{path}: {exc}", lineno=exc.lineno) from None


def write_samples(path, samples):
    write_text(path, samples.to_text())


def jsonable(obj):
    """Plain-Python copy of ``obj`` safe for ``json.dumps`` (numpy scalars, arrays, tuples)."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def _round_sig(obj, digits):
    if isinstance(obj, dict):
        return {k: _round_sig(v, digits) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_sig(v, digits) for v in obj]
    if isinstance(obj, float) and obj != 0.0:
        return float(f"{obj:.{digits}g}")
    return obj


def dumps_json(obj, pretty=False):
    obj = jsonable(obj)
    if pretty:
        return json.dumps(_round_sig(obj, 6), indent=2) + "\n"
    return json.dumps(obj, sort_keys=False) + "\n"


def _fmt(v, pretty):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    return f"{v:.4g}" if pretty else repr(v)


def study_csv(reports, pretty=False):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STUDY_COLUMNS)
    for r in reports:
        row = (r.kappa_true, r.method_tag, r.mse_kappa, r.sd_kappa, r.mse_sigma, r.sd_sigma,
               r.ad, r.cvm, r.nll, r.trials, r.n_per_trial)
        w.writerow([_fmt(v, pretty) for v in row])
    return buf.getvalue()


def parse_study_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != STUDY_COLUMNS:
        raise ValueError("study CSV header does not match the expected columns")
    out = []
    for r in rows[1:]:
        d = dict(zip(STUDY_COLUMNS, r))
        for k in STUDY_COLUMNS:
            if k == "method":
                continue
            d[k] = int(d[k]) if k in ("trials", "n") else float(d[k])
        out.append(d)
    return out


def numeric_csv(header, columns, pretty=False):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([_fmt(v, pretty) for v in row])
    return buf.getvalue()


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


class Manifest:
    """Sidecar record of one command invocation and the digests of its outputs."""

    def __init__(self, command, argv, config, seed=None):
        self.data = {"command": command, "argv": list(argv), "config": jsonable(config),
                     "seed": seed, "version": __version__, "started": _now(),
                     "finished": None, "outputs": {}}

    def add_output(self, path):
        self.data["outputs"][Path(path).name] = sha256_file(path)

    def write(self, data_path):
        self.data["finished"] = _now()
        path = manifest_path(data_path)
        write_text(path, json.dumps(self.data, indent=2) + "\n")
        return path


def manifest_path(data_path):
    return Path(str(data_path) + MANIFEST_SUFFIX)


def read_manifest(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
