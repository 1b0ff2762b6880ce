"""On-disk formats: comma-separated text, one header line, LF endings, UTF-8.

Reals are serialized with 17 significant digits, which round-trips float64
exactly, so write -> read -> write reproduces a file byte for byte.

  logits file       id,label,logit_0..logit_{d-1}
  stats file        id,label,entropy[,forget_count]
  features file     id,f_0..f_{F-1}
  correctness log   id,c_0..c_{E-1}        (c in {0,1})
  histogram file    bin_index,left_edge_log10,right_edge_log10,height
                    preceded by '# bin_width:' and '# floor:' comments
  selection file    '#' metadata lines (method, params, k, seed), then one
                    id per line in selection order
  split file        like a selection file, with role/mode/ratio metadata

Readers reject malformed content with the 1-based line number in the message.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ValidationError
from .types import (
    CorrectnessLog,
    Histogram,
    LogitsTable,
    MethodSpec,
    Selection,
    SplitResult,
    StatsTable,
    format_real,
)


def _read_lines(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    return text.splitlines()


def _write_lines(path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ValidationError(f"line {lineno}: {what} must be an integer, got {token!r}") from None


def _parse_real(token: str, lineno: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ValidationError(f"line {lineno}: {what} must be a real number, got {token!r}") from None


def _split_row(line: str, expected: int, lineno: int) -> list[str]:
    tokens = line.split(",")
    if len(tokens) != expected:
        raise ValidationError(f"line {lineno}: expected {expected} columns, got {len(tokens)}")
    return tokens


# ---------------------------------------------------------------------------
# logits


def write_logits(table: LogitsTable, path) -> None:
    header = "id,label," + ",".join(f"logit_{i}" for i in range(table.dim))
    lines = [header]
    for i in range(len(table)):
        row = [str(int(table.ids[i])), str(int(table.labels[i]))]
        row += [format_real(v) for v in table.logits[i]]
        lines.append(",".join(row))
    _write_lines(path, lines)


def read_logits(path) -> LogitsTable:
    lines = _read_lines(path)
    if not lines:
        raise ValidationError("no rows (file is empty)")
    header = lines[0].split(",")
    if len(header) < 4 or header[0] != "id" or header[1] != "label":
        raise ValidationError("line 1: expected header id,label,logit_0,...")
    dim = len(header) - 2
    if header[2:] != [f"logit_{i}" for i in range(dim)]:
        raise ValidationError("line 1: expected header id,label,logit_0,...")
    ids, labels, rows = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = _split_row(line, dim + 2, lineno)
        ids.append(_parse_int(tokens[0], lineno, "id"))
        labels.append(_parse_int(tokens[1], lineno, "label"))
        rows.append([_parse_real(t, lineno, "logit") for t in tokens[2:]])
    if not ids:
        raise ValidationError("no rows")
    return LogitsTable(ids, labels, rows)


# ---------------------------------------------------------------------------
# stats


def write_stats(stats: StatsTable, path) -> None:
    with_forget = stats.forget_counts is not None
    header = "id,label,entropy" + (",forget_count" if with_forget else "")
    lines = [header]
    for i in range(len(stats)):
        row = [
            str(int(stats.ids[i])),
            str(int(stats.labels[i])),
            format_real(stats.entropies[i]),
        ]
        if with_forget:
            row.append(str(int(stats.forget_counts[i])))
        lines.append(",".join(row))
    _write_lines(path, lines)


def read_stats(path) -> StatsTable:
    lines = _read_lines(path)
    if not lines:
        raise ValidationError("no rows (file is empty)")
    header = lines[0]
    if header == "id,label,entropy":
        with_forget = False
    elif header == "id,label,entropy,forget_count":
        with_forget = True
    else:
        raise ValidationError("line 1: expected header id,label,entropy[,forget_count]")
    width = 4 if with_forget else 3
    ids, labels, entropies, forgets = [], [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = _split_row(line, width, lineno)
        ids.append(_parse_int(tokens[0], lineno, "id"))
        labels.append(_parse_int(tokens[1], lineno, "label"))
        entropies.append(_parse_real(tokens[2], lineno, "entropy"))
        if with_forget:
            forgets.append(_parse_int(tokens[3], lineno, "forget_count"))
    if not ids:
        raise ValidationError("no rows")
    return StatsTable.from_arrays(ids, labels, entropies, forgets if with_forget else None)


# ---------------------------------------------------------------------------
# features


def write_features(ids, vectors, path) -> None:
    vectors = np.asarray(vectors, dtype=np.float64)
    header = "id," + ",".join(f"f_{i}" for i in range(vectors.shape[1]))
    lines = [header]
    for i, row in zip(ids, vectors):
        lines.append(",".join([str(int(i))] + [format_real(v) for v in row]))
    _write_lines(path, lines)


def read_features(path) -> dict[int, np.ndarray]:
    lines = _read_lines(path)
    if not lines:
        raise ValidationError("no rows (file is empty)")
    header = lines[0].split(",")
    if len(header) < 2 or header[0] != "id":
        raise ValidationError("line 1: expected header id,f_0,...")
    dim = len(header) - 1
    if header[1:] != [f"f_{i}" for i in range(dim)]:
        raise ValidationError("line 1: expected header id,f_0,...")
    vectors: dict[int, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = _split_row(line, dim + 1, lineno)
        i = _parse_int(tokens[0], lineno, "id")
        if i in vectors:
            raise ValidationError(f"line {lineno}: duplicate id {i}")
        vectors[i] = np.array([_parse_real(t, lineno, "feature") for t in tokens[1:]])
    if not vectors:
        raise ValidationError("no rows")
    return vectors


# ---------------------------------------------------------------------------
# correctness log


def write_correctness(log: CorrectnessLog, path) -> None:
    header = "id," + ",".join(f"c_{e}" for e in range(log.epochs))
    lines = [header]
    for i in range(len(log)):
        lines.append(",".join([str(int(log.ids[i]))] + [str(int(v)) for v in log.history[i]]))
    _write_lines(path, lines)


def read_correctness(path) -> CorrectnessLog:
    lines = _read_lines(path)
    if not lines:
        raise ValidationError("no rows (file is empty)")
    header = lines[0].split(",")
    if len(header) < 2 or header[0] != "id":
        raise ValidationError("line 1: expected header id,c_0,...")
    epochs = len(header) - 1
    if header[1:] != [f"c_{e}" for e in range(epochs)]:
        raise ValidationError("line 1: expected header id,c_0,...")
    ids, rows = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = _split_row(line, epochs + 1, lineno)
        ids.append(_parse_int(tokens[0], lineno, "id"))
        entries = [_parse_int(t, lineno, "correctness flag") for t in tokens[1:]]
        if any(e not in (0, 1) for e in entries):
            raise ValidationError(f"line {lineno}: correctness flags must be 0 or 1")
        rows.append(entries)
    if not ids:
        raise ValidationError("no rows")
    return CorrectnessLog(ids, rows)


# ---------------------------------------------------------------------------
# histogram


def write_histogram(hist: Histogram, path) -> None:
    lines = [
        f"# bin_width: {format_real(hist.bin_width)}",
        f"# floor: {format_real(hist.floor)}",
        "bin_index,left_edge_log10,right_edge_log10,height",
    ]
    for b in range(hist.n_bins):
        lines.append(
            ",".join(
                [
                    str(b),
                    format_real(hist.left_edge(b)),
                    format_real(hist.right_edge(b)),
                    str(hist.heights[b]),
                ]
            )
        )
    _write_lines(path, lines)


def read_histogram(path) -> Histogram:
    lines = _read_lines(path)
    meta = _parse_comments(lines, ("bin_width", "floor"))
    body = [line for line in lines if not line.startswith("#")]
    if not body or body[0] != "bin_index,left_edge_log10,right_edge_log10,height":
        raise ValidationError(
            "expected header bin_index,left_edge_log10,right_edge_log10,height"
        )
    bin_width = float(meta["bin_width"])
    floor = float(meta["floor"])
    origin = None
    heights = []
    first_data_line = len(lines) - len(body) + 2
    for offset, line in enumerate(body[1:]):
        lineno = first_data_line + offset
        tokens = _split_row(line, 4, lineno)
        b = _parse_int(tokens[0], lineno, "bin_index")
        if b != len(heights):
            raise ValidationError(f"line {lineno}: bin indices must be consecutive from 0, got {b}")
        if origin is None:
            origin = _parse_real(tokens[1], lineno, "left_edge_log10")
        heights.append(_parse_int(tokens[3], lineno, "height"))
    if not heights:
        raise ValidationError("no rows")
    return Histogram(
        bin_width=bin_width,
        origin=origin,
        heights=tuple(heights),
        floor=floor,
        total=sum(heights),
    )


def _parse_comments(lines: list[str], required: tuple[str, ...]) -> dict[str, str]:
    meta: dict[str, str] = {}
    for line in lines:
        if not line.startswith("# "):
            break
        body = line[2:]
        if ": " not in body:
            continue
        key, value = body.split(": ", 1)
        meta[key] = value
    for key in required:
        if key not in meta:
            raise ValidationError(f"missing '# {key}:' metadata line")
    return meta


# ---------------------------------------------------------------------------
# selection


def write_selection(sel: Selection, path) -> None:
    lines = [
        "# proxysel selection",
        f"# method: {sel.method.name}",
    ]
    if sel.method.params:
        lines.append("# params: " + " ".join(f"{k}={v}" for k, v in sel.method.params))
    lines.append(f"# k: {sel.k}")
    lines.append(f"# seed: {'none' if sel.seed is None else sel.seed}")
    lines.extend(str(i) for i in sel.ids)
    _write_lines(path, lines)


def read_selection(path) -> Selection:
    lines = _read_lines(path)
    if not lines or lines[0] != "# proxysel selection":
        raise ValidationError("line 1: expected '# proxysel selection'")
    meta = _parse_comments(lines, ("method", "k", "seed"))
    params = ()
    if "params" in meta:
        pairs = []
        for item in meta["params"].split(" "):
            if "=" not in item:
                raise ValidationError(f"malformed params entry {item!r}")
            key, value = item.split("=", 1)
            pairs.append((key, value))
        params = tuple(pairs)
    ids = []
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#"):
            continue
        ids.append(_parse_int(line, lineno, "id"))
    seed = None if meta["seed"] == "none" else int(meta["seed"])
    return Selection(
        method=MethodSpec(name=meta["method"], params=params),
        ids=tuple(ids),
        k=int(meta["k"]),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# split halves


def write_split_half(split: SplitResult, role: str, seed: int | None, path) -> None:
    ids = split.train if role == "train" else split.val
    lines = [
        "# proxysel split",
        f"# role: {role}",
        f"# mode: {split.mode}",
        f"# ratio: {format_real(split.ratio)}",
        f"# seed: {'none' if seed is None else seed}",
        f"# count: {len(ids)}",
    ]
    lines.extend(str(i) for i in ids)
    _write_lines(path, lines)


def read_split_half(path) -> tuple[str, str, float, list[int]]:
    """Returns (role, mode, ratio, ids) of one split file."""
    lines = _read_lines(path)
    if not lines or lines[0] != "# proxysel split":
        raise ValidationError("line 1: expected '# proxysel split'")
    meta = _parse_comments(lines, ("role", "mode", "ratio", "count"))
    ids = []
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#"):
            continue
        ids.append(_parse_int(line, lineno, "id"))
    if len(ids) != int(meta["count"]):
        raise ValidationError(f"count metadata says {meta['count']} ids, found {len(ids)}")
    return meta["role"], meta["mode"], float(meta["ratio"]), ids
