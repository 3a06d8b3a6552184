"""JSON and CSV formats for channels, spectra and matrices, with atomic writes."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .channels import ZERO, ChoiSpectrum, WeylChannel
from .groups import GroupSpec
from .weyl import WeylIndex, phase_den


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    atomic_write_text(path, dumps(obj))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _label(spec: GroupSpec, code: int, names=("m", "n")) -> dict:
    m, n = spec.split(spec.decode(code))
    return {names[0]: m.tolist(), names[1]: n.tolist()}


# -- channels ---------------------------------------------------------------------------


def channel_to_json(ch: WeylChannel) -> dict:
    spec = ch.spec
    den = phase_den(spec)
    entries = []
    for code in range(spec.size):
        z = complex(ch.tau[code])
        if ch.is_exact:
            if ch.exact[code] == ZERO:
                continue
        elif z == 0:
            continue
        entry = _label(spec, code)
        entry["re"] = z.real + 0.0
        entry["im"] = z.imag + 0.0
        if ch.is_exact:
            entry["phase_num"] = int(ch.exact[code])
            entry["phase_den"] = den
        entries.append(entry)
    return {"dims": list(spec.dims), "tau": entries}


def channel_from_json(obj: dict) -> WeylChannel:
    spec = GroupSpec.from_json(obj)
    if "tau" not in obj or not isinstance(obj["tau"], list):
        raise ValueError("channel file needs a 'tau' list")
    tau = np.zeros(spec.size, dtype=complex)
    den = phase_den(spec)
    nums = np.full(spec.size, ZERO, dtype=np.int64)
    exact = True
    seen = set()
    for entry in obj["tau"]:
        code = WeylIndex(spec, entry["m"], entry["n"]).code
        if code in seen:
            raise ValueError(f"duplicate tau entry at m={entry['m']}, n={entry['n']}")
        seen.add(code)
        tau[code] = complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
        if "phase_num" in entry:
            k, d = int(entry["phase_num"]), int(entry["phase_den"])
            if (k * den) % d:
                raise ValueError(f"phase {k}/{d} is not expressible over {den}")
            nums[code] = (k * den // d) % den
        else:
            exact = False
    if exact and seen:
        return WeylChannel.from_exact(spec, nums)
    return WeylChannel(spec, tau)


def spectrum_to_json(sp: ChoiSpectrum) -> dict:
    spec = sp.spec
    rows = []
    for code in range(spec.size):
        entry = _label(spec, code, ("r", "s"))
        entry["value"] = float(sp.values[code])
        rows.append(entry)
    return {"dims": list(spec.dims), "lambda": rows}


def spectrum_from_json(obj: dict) -> ChoiSpectrum:
    spec = GroupSpec.from_json(obj)
    lam = np.zeros(spec.size)
    for entry in obj["lambda"]:
        lam[WeylIndex(spec, entry["r"], entry["s"]).code] = float(entry["value"])
    return ChoiSpectrum(spec, lam)


# -- dense matrices ---------------------------------------------------------------------


def matrix_to_json(mat: np.ndarray) -> list:
    mat = np.asarray(mat, dtype=complex)
    return [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row] for row in mat]


def matrix_from_json(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("matrix must be a square list of rows of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def table_to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()
