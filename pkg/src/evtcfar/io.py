"""File formats: corpus CSV, adapted CSV, prior file and ROC CSV.

Floats are written with 17 significant digits so every score survives a
write/read cycle bit for bit. Output files are written atomically.
"""
from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .sequence import LabeledSequence
from .tail import GammaParams

CORPUS_HEADER = ("seq_id", "frame_index", "score", "label", "condition")
ADAPTED_HEADER = CORPUS_HEADER + ("adapted_score",)
ROC_HEADER = ("threshold", "pfa", "pd")
PRIOR_VERSION = "1"


class DataError(ValueError):
    """Malformed or inconsistent input data."""


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        # mkstemp creates 0600 files; give the result the usual permissions
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_float(text, where):
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"{where}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise DataError(f"{where}: non-finite score {text!r}")
    return v


def _read_rows(path, header):
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or tuple(first) != header:
            raise DataError(f"{path}: expected header {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            yield lineno, row


def _collect(path, header):
    groups = {}
    extra = {}
    for lineno, row in _read_rows(path, header):
        where = f"{path}:{lineno}"
        sid = row[0]
        try:
            frame = int(row[1])
        except ValueError:
            raise DataError(f"{where}: bad frame_index {row[1]!r}") from None
        if row[3] not in ("0", "1"):
            raise DataError(f"{where}: label must be 0 or 1, got {row[3]!r}")
        g = groups.setdefault(sid, ([], [], [], []))
        if g[0] and frame <= g[0][-1]:
            raise DataError(f"{where}: frame_index not strictly increasing within {sid!r}")
        g[0].append(frame)
        g[1].append(_parse_float(row[2], where))
        g[2].append(int(row[3]))
        g[3].append(row[4])
        if len(header) > len(CORPUS_HEADER):
            extra.setdefault(sid, []).append(_parse_float(row[5], where))
    return groups, extra


def _to_sequences(groups):
    out = []
    for sid, (frames, scores, labels, cond) in groups.items():
        try:
            out.append(LabeledSequence(sid, np.array(scores), np.array(labels, dtype=np.int8),
                                       np.array(cond, dtype=object), np.array(frames)))
        except ValueError as exc:
            raise DataError(str(exc)) from None
    return out


def read_corpus(path) -> list[LabeledSequence]:
    """Sequences in order of first appearance."""
    groups, _ = _collect(path, CORPUS_HEADER)
    return _to_sequences(groups)


def read_adapted(path) -> list[tuple[LabeledSequence, np.ndarray]]:
    groups, extra = _collect(path, ADAPTED_HEADER)
    return [(seq, np.array(extra[seq.seq_id])) for seq in _to_sequences(groups)]


def _rows(seq: LabeledSequence, adapted=None):
    for j in range(len(seq)):
        row = [seq.seq_id, str(int(seq.frame_index[j])), fmt_float(seq.scores[j]),
               str(int(seq.labels[j])), str(seq.condition[j])]
        if adapted is not None:
            row.append(fmt_float(adapted[j]))
        yield row


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def corpus_text(corpus) -> str:
    return _csv_text(CORPUS_HEADER, (r for seq in corpus for r in _rows(seq)))


def write_corpus(path, corpus) -> None:
    atomic_write_text(path, corpus_text(corpus))


def adapted_text(pairs) -> str:
    """``pairs`` holds ``(LabeledSequence, adapted_scores)``."""
    return _csv_text(ADAPTED_HEADER, (r for seq, a in pairs for r in _rows(seq, a)))


def write_adapted(path, pairs) -> None:
    atomic_write_text(path, adapted_text(pairs))


def prior_text(prior: GammaParams, p_u: float, w0: float) -> str:
    return (
        f"format_version={PRIOR_VERSION}\n"
        f"alpha0={fmt_float(prior.alpha)}\n"
        f"beta0={fmt_float(prior.beta)}\n"
        f"p_u={fmt_float(p_u)}\n"
        f"w0={fmt_float(w0)}\n"
    )


def parse_prior(text: str) -> tuple[GammaParams, float, float]:
    """Returns ``(prior, p_u, w0)``."""
    fields = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DataError(f"prior line {lineno}: expected key=value, got {line!r}")
        fields[key.strip()] = value.strip()
    if fields.get("format_version") != PRIOR_VERSION:
        raise DataError(f"unsupported prior format_version {fields.get('format_version')!r}")
    missing = {"alpha0", "beta0", "p_u", "w0"} - fields.keys()
    if missing:
        raise DataError(f"prior file is missing {sorted(missing)}")
    try:
        prior = GammaParams(float(fields["alpha0"]), float(fields["beta0"]))
        return prior, float(fields["p_u"]), float(fields["w0"])
    except ValueError as exc:
        raise DataError(f"invalid prior: {exc}") from None


def write_prior(path, prior: GammaParams, p_u: float, w0: float) -> None:
    atomic_write_text(path, prior_text(prior, p_u, w0))


def read_prior(path) -> tuple[GammaParams, float, float]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    return parse_prior(text)


def roc_text(curve) -> str:
    return _csv_text(ROC_HEADER, ([fmt_float(t), fmt_float(f), fmt_float(d)]
                                  for t, f, d in curve.points()))


def write_roc(path, curve) -> None:
    atomic_write_text(path, roc_text(curve))
