"""Result bundles: CSV tables plus a JSON manifest with a checksum."""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

SCHEMA_VERSION = 1
MANIFEST = "manifest.json"


class BundleError(ValueError):
    """Malformed, tampered or incompatible bundle."""


@dataclass
class Table:
    columns: list[str]
    rows: list[list]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row length does not match the header")

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


@dataclass
class ResultBundle:
    experiment_id: str
    config: dict
    tables: dict[str, Table]
    created: str = "1970-01-01T00:00:00Z"
    figures: list[str] = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, ResultBundle):
            return NotImplemented
        return (
            self.experiment_id == other.experiment_id
            and self.config == other.config
            and self.created == other.created
            and {k: (v.columns, v.rows) for k, v in self.tables.items()}
            == {k: (v.columns, v.rows) for k, v in other.tables.items()}
        )


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def table_to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _csv_to_table(text: str) -> Table:
    reader = csv.reader(io.StringIO(text))
    try:
        columns = next(reader)
    except StopIteration:
        raise BundleError("empty table file") from None
    return Table(columns, [[_parse(v) for v in row] for row in reader])


def _digest(manifest: dict) -> str:
    body = {k: v for k, v in manifest.items() if k != "checksum"}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def write_bundle(bundle: ResultBundle, out_dir) -> Path:
    """Write tables as ``<name>.csv`` plus ``manifest.json``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = {}
    for name, table in sorted(bundle.tables.items()):
        text = table_to_csv(table)
        (out / f"{name}.csv").write_text(text, encoding="utf-8")
        entries[name] = {"file": f"{name}.csv", "sha256": hashlib.sha256(text.encode()).hexdigest()}
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "experiment_id": bundle.experiment_id,
        "created": bundle.created,
        "config": bundle.config,
        "tables": entries,
        "figures": list(bundle.figures),
    }
    manifest["checksum"] = _digest(manifest)
    path = out / MANIFEST
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_bundle(path) -> ResultBundle:
    """Load a bundle from its directory or manifest path, verifying every checksum."""
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise BundleError(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(manifest, dict):
        raise BundleError("manifest must be a JSON object")
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise BundleError(f"unsupported schema version {manifest.get('schema_version')!r}")
    if manifest.get("checksum") != _digest(manifest):
        raise BundleError("manifest checksum mismatch")
    config = dict(manifest.get("config") or {})
    config.setdefault("overrides", {})
    tables = {}
    for name, entry in manifest.get("tables", {}).items():
        text = (path.parent / entry["file"]).read_text(encoding="utf-8")
        if hashlib.sha256(text.encode()).hexdigest() != entry["sha256"]:
            raise BundleError(f"table {name!r} does not match its checksum")
        tables[name] = _csv_to_table(text)
    return ResultBundle(
        experiment_id=manifest["experiment_id"],
        config=config,
        tables=tables,
        created=manifest.get("created", ""),
        figures=list(manifest.get("figures", [])),
    )


def creation_stamp(wall_clock: bool = False) -> str:
    """ISO timestamp from SOURCE_DATE_EPOCH (default 0) unless ``wall_clock`` is set."""
    if wall_clock:
        t = dt.datetime.now(dt.timezone.utc)
    else:
        t = dt.datetime.fromtimestamp(int(os.environ.get("SOURCE_DATE_EPOCH", "0")), dt.timezone.utc)
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")
