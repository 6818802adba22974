"""Plain-text file formats.

* signal CSV: header ``index,re,im``, one row per sample, 1-based index
* mask file: one 1-based index per line, sorted
* model JSON: array of ``{"f", "c_re", "c_im", "tau"}``
* matrix CSV: header ``row,col,re,im``, 1-based, every entry listed
"""
from __future__ import annotations

import csv
import json

import numpy as np

from .signals import ExponentialModel


class ParseError(ValueError):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path, self.line = path, line


def _rows(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ParseError(path, 1, "empty file") from None
        if [h.strip() for h in first] != header:
            raise ParseError(path, 1, f"expected header {','.join(header)}")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(path, reader.line_num, f"expected {len(header)} fields, got {len(row)}")
            yield reader.line_num, row


def write_signal(path, x) -> None:
    x = np.asarray(x, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "re", "im"])
        for k, v in enumerate(x, start=1):
            w.writerow([k, repr(float(v.real)), repr(float(v.imag))])


def read_signal(path) -> np.ndarray:
    values = []
    for line, row in _rows(path, ["index", "re", "im"]):
        try:
            k, re, im = int(row[0]), float(row[1]), float(row[2])
        except ValueError as exc:
            raise ParseError(path, line, str(exc)) from None
        if k != len(values) + 1:
            raise ParseError(path, line, f"expected index {len(values) + 1}, got {k}")
        values.append(complex(re, im))
    if not values:
        raise ParseError(path, 2, "no samples")
    return np.array(values)


def write_mask(path, indices) -> None:
    with open(path, "w") as fh:
        for k in np.asarray(indices, dtype=int):
            fh.write(f"{k}\n")


def read_mask(path) -> np.ndarray:
    out = []
    with open(path) as fh:
        for line, text in enumerate(fh, start=1):
            text = text.strip()
            if not text:
                continue
            try:
                k = int(text)
            except ValueError:
                raise ParseError(path, line, f"not an integer index: {text!r}") from None
            if k < 1 or (out and k <= out[-1]):
                raise ParseError(path, line, "indices must be positive and strictly increasing")
            out.append(k)
    return np.array(out, dtype=int)


def write_model(path, model: ExponentialModel) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_records(), fh, indent=2)
        fh.write("\n")


def read_model(path) -> ExponentialModel:
    with open(path) as fh:
        return ExponentialModel.from_records(json.load(fh))


def write_matrix(path, X) -> None:
    X = np.asarray(X, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "col", "re", "im"])
        for (i, j), v in np.ndenumerate(X):
            w.writerow([i + 1, j + 1, repr(float(v.real)), repr(float(v.imag))])


def read_matrix(path) -> np.ndarray:
    entries = {}
    for line, row in _rows(path, ["row", "col", "re", "im"]):
        try:
            i, j, re, im = int(row[0]), int(row[1]), float(row[2]), float(row[3])
        except ValueError as exc:
            raise ParseError(path, line, str(exc)) from None
        if i < 1 or j < 1:
            raise ParseError(path, line, "row and col are 1-based")
        entries[(i, j)] = complex(re, im)
    if not entries:
        raise ParseError(path, 2, "no entries")
    n = max(i for i, _ in entries)
    m = max(j for _, j in entries)
    if len(entries) != n * m:
        raise ParseError(path, 0, f"matrix is incomplete: {len(entries)} of {n * m} entries")
    X = np.empty((n, m), dtype=complex)
    for (i, j), v in entries.items():
        X[i - 1, j - 1] = v
    return X
