"""File-backed persistence: one JSON document per session/job, written with an
atomic tmp-file + rename so readers never see a torn record."""

from __future__ import annotations

import json
import os
import threading
import uuid
from pathlib import Path
from typing import Optional


class Store:
    def __init__(self, root):
        self.root = Path(root)
        self._locks: dict = {}
        self._guard = threading.Lock()

    def new_id(self) -> str:
        return uuid.uuid4().hex[:12]

    def lock(self, record_id: str) -> threading.Lock:
        with self._guard:
            if record_id not in self._locks:
                self._locks[record_id] = threading.Lock()
            return self._locks[record_id]

    def _dir(self, kind: str) -> Path:
        d = self.root / kind
        d.mkdir(parents=True, exist_ok=True)
        return d

    def path(self, kind: str, record_id: str) -> Path:
        return self._dir(kind) / ("%s.json" % record_id)

    def write(self, kind: str, record_id: str, doc: dict) -> None:
        final = self.path(kind, record_id)
        tmp = final.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=1, sort_keys=True))
        os.replace(tmp, final)

    def read(self, kind: str, record_id: str) -> Optional[dict]:
        p = self.path(kind, record_id)
        if not p.is_file():
            return None
        return json.loads(p.read_text())

    def list_ids(self, kind: str) -> list:
        d = self.root / kind
        if not d.is_dir():
            return []
        return sorted(p.stem for p in d.glob("*.json"))
