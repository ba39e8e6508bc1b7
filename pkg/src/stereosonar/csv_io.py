"""CSV serialization of sweep records."""

from __future__ import annotations

import csv
import io
import os
from typing import IO, Iterable

from .sweep import SweepRecord

HEADER = ("roll_rad", "pitch_rad", "yaw_rad", "d_source_m", "d_target_m", "metric", "visible")


class OutputError(OSError):
    pass


def format_records(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for rec in records:
        writer.writerow(
            (
                repr(rec.roll), repr(rec.pitch), repr(rec.yaw),
                repr(rec.d_source), repr(rec.d_target),
                f"{rec.metric:.9g}", int(rec.visible),
            )
        )
    return buf.getvalue()


def emit_csv(records: Iterable[SweepRecord], destination: str | os.PathLike | IO[str]) -> None:
    """Write records as CSV to a path or an open text stream.

    Angles and distances are written at full precision, the metric with
    9 significant digits, ``visible`` as 0/1.
    """
    text = format_records(records)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {os.fspath(destination)}: {exc.strerror or exc}") from exc


def read_csv(source: str | os.PathLike | IO[str]) -> list[SweepRecord]:
    if hasattr(source, "read"):
        return _parse(source)
    with open(source, encoding="utf-8", newline="") as fh:
        return _parse(fh)


def _parse(fh: IO[str]) -> list[SweepRecord]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if tuple(header or ()) != HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    for row in reader:
        roll, pitch, yaw, d_src, d_tgt, metric = map(float, row[:6])
        out.append(SweepRecord(roll, pitch, yaw, d_src, d_tgt, metric, row[6] == "1"))
    return out
