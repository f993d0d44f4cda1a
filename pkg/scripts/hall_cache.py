"""
Hall Number Memo

Subobject tallies, extension tallies and automorphism counts are
expensive to enumerate and never change, so they are memoized here. The
memo is in-memory by default; with a cache directory (HALL_CACHE_DIR or
--cache-dir) every (q, n) pair gets its own JSON file

    <cache_dir>/hall_q<q>_n<n>.json  ->  {kind: {key: value}}

which is loaded on first use and written back atomically on save().
"""

import json
import os
import threading
from typing import Any, Dict, Optional, Tuple

from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from settings import get_logger

logger = get_logger("hall_cache")


class HallCache:
    def __init__(self, cache_dir: Optional[str] = None):
        self.cache_dir = cache_dir
        self._tables: Dict[Tuple[int, int], Dict[str, Dict[str, Any]]] = {}
        self._dirty = set()
        self._versions: Dict[Tuple[int, int], int] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def _path(self, q: int, n: int) -> str:
        return os.path.join(self.cache_dir, f"hall_q{q}_n{n}.json")

    def _table(self, q: int, n: int) -> Dict[str, Dict[str, Any]]:
        table = self._tables.get((q, n))
        if table is None:
            table = self._load(q, n) if self.cache_dir else {}
            self._tables[(q, n)] = table
        return table

    def _load(self, q: int, n: int) -> Dict[str, Dict[str, Any]]:
        path = self._path(q, n)
        if not os.path.exists(path):
            return {}
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Ignoring unreadable cache file {path}: {e}")
            return {}
        if not isinstance(data, dict):
            logger.warning(f"Ignoring malformed cache file {path}")
            return {}
        return data

    def get(self, q: int, n: int, kind: str, key: str) -> Optional[Any]:
        with self._lock:
            value = self._table(q, n).get(kind, {}).get(key)
            if value is None:
                self.misses += 1
                logger.debug(f"miss {kind} q={q} n={n} {key}")
            else:
                self.hits += 1
                logger.debug(f"hit {kind} q={q} n={n} {key}")
            return value

    def put(self, q: int, n: int, kind: str, key: str, value: Any):
        with self._lock:
            self._table(q, n).setdefault(kind, {})[key] = value
            self._dirty.add((q, n))
            self._versions[(q, n)] = self._versions.get((q, n), 0) + 1

    def save(self) -> int:
        """
        Write every modified table to disk; returns the number of files written.
        A table stays dirty until its write succeeds and nothing was put into
        it in the meantime.
        """
        if not self.cache_dir:
            return 0
        with self._lock:
            pending = sorted(self._dirty)
            snapshot = {qn: (json.dumps(self._tables[qn], sort_keys=True), self._versions[qn]) for qn in pending}
        os.makedirs(self.cache_dir, exist_ok=True)
        for (q, n) in pending:
            text, version = snapshot[(q, n)]
            self._write(self._path(q, n), text)
            with self._lock:
                if self._versions[(q, n)] == version:
                    self._dirty.discard((q, n))
            logger.info(f"Saved Hall memo for q={q}, n={n}")
        return len(pending)

    @property
    def dirty(self) -> bool:
        return bool(self._dirty)

    @retry(
        stop=stop_after_attempt(3),
        wait=wait_exponential(multiplier=1, min=2, max=10),
        retry=retry_if_exception_type(OSError),
        reraise=True
    )
    def _write(self, path: str, text: str):
        # Atomic write so concurrent readers never see a partial file
        temp_file = path + ".tmp"
        try:
            with open(temp_file, "w", encoding="utf-8") as f:
                f.write(text)
            os.replace(temp_file, path)
        except OSError:
            if os.path.exists(temp_file):
                os.remove(temp_file)
            raise
