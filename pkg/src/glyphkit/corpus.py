"""Line-delimited corpus and prediction file I/O.

A corpus is UTF-8 JSON, one record per line, with fields ``font_id``,
``glyph_id``, ``units_per_em``, ``paths`` (a list of SVG path-data strings,
one per contour) and an optional ``labels`` object holding integer-encoded
``continuity`` and ``alignment`` lists (C0=0 G1=1 C1=2; H=0 V=1 None=2).
A prediction file mirrors the shape but carries probability triples per site.
Corpus records with ``units_per_em == 1.0`` are EM-normalized by convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path as FsPath

from .model import Glyph, Path
from .pathdata import parse_path_data, serialize_path_data

__all__ = [
    "CorpusLabels",
    "CorpusRecord",
    "CorpusFormatError",
    "load_corpus",
    "save_corpus",
    "record_to_glyph",
    "glyph_to_paths",
    "PredictionRecord",
    "load_predictions",
    "save_predictions",
    "bundled_corpus_path",
]


class CorpusFormatError(ValueError):
    """Malformed corpus/prediction file; carries the record index and field."""

    def __init__(self, index: int, field: str, message: str):
        self.index = index
        self.field = field
        super().__init__(f"record {index}, field {field!r}: {message}")


@dataclass(frozen=True)
class CorpusLabels:
    continuity: tuple[int, ...]
    alignment: tuple[int, ...]


@dataclass(frozen=True)
class CorpusRecord:
    font_id: str
    glyph_id: str
    units_per_em: float
    paths: tuple[str, ...]
    labels: CorpusLabels | None = None


def _require(index: int, obj: dict, field: str, kind) -> object:
    if field not in obj:
        raise CorpusFormatError(index, field, "missing")
    value = obj[field]
    if not isinstance(value, kind):
        raise CorpusFormatError(index, field, f"expected {kind}, got {type(value).__name__}")
    return value


def _parse_record(index: int, obj: dict) -> CorpusRecord:
    font_id = _require(index, obj, "font_id", str)
    glyph_id = _require(index, obj, "glyph_id", str)
    if not font_id or not glyph_id:
        raise CorpusFormatError(index, "font_id" if not font_id else "glyph_id", "empty")
    upm = _require(index, obj, "units_per_em", (int, float))
    if upm <= 0:
        raise CorpusFormatError(index, "units_per_em", "must be positive")
    paths = _require(index, obj, "paths", list)
    if not all(isinstance(p, str) for p in paths):
        raise CorpusFormatError(index, "paths", "must be a list of strings")
    labels = None
    if obj.get("labels") is not None:
        lab = _require(index, obj, "labels", dict)
        cont = lab.get("continuity", [])
        align = lab.get("alignment", [])
        if not all(isinstance(v, int) for v in cont + align):
            raise CorpusFormatError(index, "labels", "must hold integer lists")
        labels = CorpusLabels(tuple(cont), tuple(align))
    return CorpusRecord(font_id, glyph_id, float(upm), tuple(paths), labels)


def load_corpus(path) -> list[CorpusRecord]:
    records: list[CorpusRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for index, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(index, "<line>", f"invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise CorpusFormatError(index, "<line>", "record must be an object")
            records.append(_parse_record(index, obj))
    return records


def save_corpus(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj = {
                "font_id": rec.font_id,
                "glyph_id": rec.glyph_id,
                "units_per_em": rec.units_per_em,
                "paths": list(rec.paths),
            }
            if rec.labels is not None:
                obj["labels"] = {
                    "continuity": list(rec.labels.continuity),
                    "alignment": list(rec.labels.alignment),
                }
            fh.write(json.dumps(obj) + "\n")


def record_to_glyph(rec: CorpusRecord) -> Glyph:
    """Parse a record's path strings; the glyph is left un-normalized."""
    paths: list[Path] = []
    for d in rec.paths:
        paths.extend(parse_path_data(d))
    return Glyph(tuple(paths), units_per_em=rec.units_per_em, normalized=False)


def glyph_to_paths(glyph: Glyph, precision: int = 9) -> tuple[str, ...]:
    """One path-data string per contour."""
    return tuple(serialize_path_data([p], precision) for p in glyph.paths)


@dataclass(frozen=True)
class PredictionRecord:
    font_id: str
    glyph_id: str
    continuity: tuple[tuple[float, float, float], ...]
    alignment: tuple[tuple[float, float, float], ...]


def load_predictions(path) -> list[PredictionRecord]:
    out: list[PredictionRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for index, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(index, "<line>", f"invalid JSON: {exc}") from exc
            font_id = _require(index, obj, "font_id", str)
            glyph_id = _require(index, obj, "glyph_id", str)
            rows = {}
            for field in ("continuity", "alignment"):
                raw = _require(index, obj, field, list)
                triples = []
                for t in raw:
                    if not (isinstance(t, list) and len(t) == 3):
                        raise CorpusFormatError(index, field, "expected probability triples")
                    triples.append(tuple(float(v) for v in t))
                rows[field] = tuple(triples)
            out.append(PredictionRecord(font_id, glyph_id, rows["continuity"], rows["alignment"]))
    return out


def save_predictions(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "font_id": rec.font_id,
                        "glyph_id": rec.glyph_id,
                        "continuity": [list(t) for t in rec.continuity],
                        "alignment": [list(t) for t in rec.alignment],
                    }
                )
                + "\n"
            )


def bundled_corpus_path() -> FsPath:
    """Filesystem path of the corpus that ships with the package."""
    return FsPath(str(resources.files("glyphkit").joinpath("data/bundled_corpus.jsonl")))
