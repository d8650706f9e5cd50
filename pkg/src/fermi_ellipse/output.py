"""CSV and JSON sidecar writers used by the command-line interface."""

from __future__ import annotations

import csv
import hashlib
import json
import os


def content_hash(text):
    """Git-style blob hash (SHA-1 of ``'blob <len>\\0' + content``)."""
    data = text.encode("utf-8")
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _cell(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.16e}"
    return str(value)


def write_csv(path, header, rows):
    """Write ``rows`` under ``header``; floats get 17 significant digits."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_sidecar(path, command, params, config_text, outputs, summary=None):
    """Write a JSON record of a run next to its CSV files."""
    record = {
        "command": command,
        "params": params,
        "config_hash": content_hash(config_text),
        "outputs": sorted(os.path.basename(p) for p in outputs),
    }
    if summary is not None:
        record["summary"] = summary
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
