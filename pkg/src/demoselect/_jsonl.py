"""Shared JSON-lines reader with line-numbered errors."""

from __future__ import annotations

import json

from .errors import FormatError


def iter_jsonl(path: str):
    """Yield (line_number, record) for each non-blank line of a JSONL file."""
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot open file: {exc}", path=path) from None
    with fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"malformed JSON: {exc.msg}", path=path, line=line_no) from None
            if not isinstance(record, dict):
                raise FormatError("record is not a JSON object", path=path, line=line_no)
            yield line_no, record
