"""Plain-text file formats.

Matrix file::

    d
    row col re im        # d*d lines, 0-based indices, 17 significant digits

Sequence file (an optional first line names a commutator tree)::

    [A,[A,B]]
    d N
    A 0.01               # N lines: generator duration

Training-pair file::

    d M
    l i in_re in_im out_re out_im      # M*d lines, pair l, component i

Control samples file: one ``time value`` pair per line.

Blank lines and ``#`` comments are ignored everywhere. Reports are JSON,
traces and tables CSV.
"""
import csv
import json
from pathlib import Path

import numpy as np

from .sequence import PulseSequence


class FileFormatError(ValueError):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


def _fmt(x):
    return f"{x:.17g}"


def _lines(path):
    """Yield ``(line_number, tokens)`` for non-empty, non-comment lines."""
    with open(path) as fh:
        for n, raw in enumerate(fh, 1):
            text = raw.split("#", 1)[0].strip()
            if text:
                yield n, text.split()


def _ints(path, n, tokens, count):
    if len(tokens) != count:
        raise FileFormatError(path, n, f"expected {count} integer field(s), got {len(tokens)}")
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FileFormatError(path, n, f"non-integer field in {' '.join(tokens)!r}") from None


def _floats(path, n, tokens):
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise FileFormatError(path, n, f"non-numeric field in {' '.join(tokens)!r}") from None


def write_matrix(path, M):
    M = np.asarray(M, dtype=np.complex128)
    d = M.shape[0]
    with open(path, "w") as fh:
        fh.write(f"{d}\n")
        for i in range(d):
            for j in range(d):
                z = M[i, j]
                fh.write(f"{i} {j} {_fmt(z.real)} {_fmt(z.imag)}\n")


def read_matrix(path):
    it = _lines(path)
    try:
        n, tokens = next(it)
    except StopIteration:
        raise FileFormatError(path, 1, "empty matrix file") from None
    (d,) = _ints(path, n, tokens, 1)
    if d < 1:
        raise FileFormatError(path, n, "dimension must be positive")
    M = np.zeros((d, d), dtype=np.complex128)
    seen = np.zeros((d, d), dtype=bool)
    for n, tokens in it:
        if len(tokens) != 4:
            raise FileFormatError(path, n, f"expected 'row col re im', got {len(tokens)} fields")
        i, j = _ints(path, n, tokens[:2], 2)
        re, im = _floats(path, n, tokens[2:])
        if not (0 <= i < d and 0 <= j < d):
            raise FileFormatError(path, n, f"index ({i}, {j}) outside a {d}x{d} matrix")
        if seen[i, j]:
            raise FileFormatError(path, n, f"duplicate entry ({i}, {j})")
        seen[i, j] = True
        M[i, j] = complex(re, im)
    if not seen.all():
        i, j = np.argwhere(~seen)[0]
        raise FileFormatError(path, n, f"missing entry ({i}, {j})")
    return M


def write_sequence(path, seq, tree=None):
    with open(path, "w") as fh:
        if tree is not None:
            fh.write(f"{tree}\n")
        fh.write(f"{seq.dim} {len(seq)}\n")
        for g, t in seq.pulses:
            fh.write(f"{g} {_fmt(t)}\n")


def read_sequence_file(path):
    """Return ``(d, pulses, tree_text)`` where ``tree_text`` may be ``None``."""
    rows = list(_lines(path))
    if not rows:
        raise FileFormatError(path, 1, "empty sequence file")
    tree = None
    if not rows[0][1][0].lstrip("-").isdigit():
        n, tokens = rows.pop(0)
        tree = "".join(tokens)
        if not rows:
            raise FileFormatError(path, n, "missing 'd N' header")
    n, tokens = rows[0]
    d, count = _ints(path, n, tokens, 2)
    body = rows[1:]
    if len(body) != count:
        last = body[-1][0] if body else n
        raise FileFormatError(path, last, f"header announces {count} pulses, found {len(body)}")
    pulses = []
    for n, tokens in body:
        if len(tokens) != 2 or tokens[0] not in ("A", "B"):
            raise FileFormatError(path, n, "expected 'A|B duration'")
        (t,) = _floats(path, n, tokens[1:])
        pulses.append((tokens[0], t))
    return d, tuple(pulses), tree


def read_sequence(path, controls):
    d, pulses, _ = read_sequence_file(path)
    if d != controls.dim:
        raise FileFormatError(path, 1, f"sequence is for d={d}, controls have d={controls.dim}")
    return PulseSequence(controls, pulses)


def write_training_pairs(path, ts):
    d, M = ts.dim, len(ts)
    with open(path, "w") as fh:
        fh.write(f"{d} {M}\n")
        for l in range(M):
            for i in range(d):
                a, b = ts.inputs[l, i], ts.outputs[l, i]
                fh.write(f"{l} {i} {_fmt(a.real)} {_fmt(a.imag)} {_fmt(b.real)} {_fmt(b.imag)}\n")


def read_training_pairs(path):
    from .optimizer import TrainingSet

    it = _lines(path)
    try:
        n, tokens = next(it)
    except StopIteration:
        raise FileFormatError(path, 1, "empty training-pair file") from None
    d, M = _ints(path, n, tokens, 2)
    if d < 1 or M < 1:
        raise FileFormatError(path, n, "d and M must be positive")
    ins = np.zeros((M, d), dtype=np.complex128)
    outs = np.zeros((M, d), dtype=np.complex128)
    seen = np.zeros((M, d), dtype=bool)
    for n, tokens in it:
        if len(tokens) != 6:
            raise FileFormatError(path, n, f"expected 6 fields, got {len(tokens)}")
        l, i = _ints(path, n, tokens[:2], 2)
        a_re, a_im, b_re, b_im = _floats(path, n, tokens[2:])
        if not (0 <= l < M and 0 <= i < d):
            raise FileFormatError(path, n, f"pair {l} component {i} outside d={d}, M={M}")
        if seen[l, i]:
            raise FileFormatError(path, n, f"duplicate pair {l} component {i}")
        seen[l, i] = True
        ins[l, i] = complex(a_re, a_im)
        outs[l, i] = complex(b_re, b_im)
    if not seen.all():
        l, i = np.argwhere(~seen)[0]
        raise FileFormatError(path, n, f"missing pair {l} component {i}")
    try:
        return TrainingSet(ins, outs)
    except ValueError as exc:
        raise FileFormatError(path, n, str(exc)) from None


def read_samples(path):
    times, values = [], []
    for n, tokens in _lines(path):
        if len(tokens) != 2:
            raise FileFormatError(path, n, "expected 'time value'")
        t, v = _floats(path, n, tokens)
        times.append(t)
        values.append(v)
    if not times:
        raise FileFormatError(path, 1, "no samples")
    return np.array(times), np.array(values)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, allow_nan=True)
        fh.write("\n")


def write_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow(row)
