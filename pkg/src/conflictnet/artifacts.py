"""Reproducible on-disk artifacts.

Every pipeline stage writes files stamped with the schema version and a
digest of the producing configuration, so a bundle can be audited and
reruns can be byte-compared. Writes go through a temp file and an atomic
rename; a failing command never leaves partial output behind.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

from .errors import SchemaMismatch
from .ingest import SCHEMA_VERSION

#: Config keys that hold filesystem paths. They are excluded from the
#: digest so the same analysis run from different directories matches.
PATH_KEYS = frozenset({"csv", "catalog", "mapping", "borders", "out"})


def config_digest(config: dict) -> str:
    """sha256 over the canonical JSON of the config, paths excluded."""
    stripped = {k: v for k, v in config.items() if k not in PATH_KEYS}
    canonical = json.dumps(stripped, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def atomic_write_text(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def stamp(doc: dict, digest: str) -> dict:
    """Top-level provenance keys for a JSON artifact."""
    return {"schema_version": SCHEMA_VERSION, "config_digest": digest, **doc}


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def text_stamp(digest: str) -> str:
    """Leading comment line carried by CSV artifacts."""
    return f"# schema_version={SCHEMA_VERSION} config_digest={digest}\n"


def svg_stamp(digest: str) -> str:
    return f"<!-- schema_version={SCHEMA_VERSION} config_digest={digest} -->\n"


def read_json_artifact(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"{os.path.basename(path)}: schema_version "
            f"{doc.get('schema_version')!r}, expected {SCHEMA_VERSION!r}"
        )
    return doc


def read_text_artifact(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()
