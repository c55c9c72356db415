"""Selection algebra and durable label assignments.

The label store is a small sqlite database in synchronous-commit mode: an
`assignments` table holding the current (account_id -> label) map in
canonical form (unlabeled rows are deleted, absence == unlabeled) plus an
append-only `audit` table whose replay reproduces the assignments exactly.
"""
from __future__ import annotations

import csv
import datetime as dt
import sqlite3
import threading
from dataclasses import dataclass

from .errors import IoFailure, MalformedCsv, PersistenceFailure, UnknownAccountId

LABEL_CLASSES = ("genuine", "spambot", "unlabeled")


@dataclass(frozen=True)
class SelectionState:
    selected: frozenset[str]

    @staticmethod
    def empty() -> "SelectionState":
        return SelectionState(frozenset())


def _check_ids(ids, corpus_ids: set[str]) -> frozenset[str]:
    ids = frozenset(ids)
    for i in ids:
        if i not in corpus_ids:
            raise UnknownAccountId(i)
    return ids


def apply_selection(state: SelectionState, rule: str, ids, corpus_ids) -> SelectionState:
    """New replaces, Add unions, Subtract removes."""
    ids = _check_ids(ids, set(corpus_ids))
    if rule == "new":
        return SelectionState(ids)
    if rule == "add":
        return SelectionState(state.selected | ids)
    if rule == "subtract":
        return SelectionState(state.selected - ids)
    raise ValueError(f"unknown selection rule {rule!r}")


def select_special(state: SelectionState, mode: str, corpus_ids, labels: dict[str, str],
                   label_class: str | None = None) -> SelectionState:
    all_ids = frozenset(corpus_ids)
    if mode == "all":
        return SelectionState(all_ids)
    if mode == "none":
        return SelectionState(frozenset())
    if mode == "inverse":
        return SelectionState(all_ids - state.selected)
    if mode == "by_class":
        if label_class not in LABEL_CLASSES:
            raise ValueError(f"unknown label class {label_class!r}")
        return SelectionState(frozenset(
            i for i in all_ids if labels.get(i, "unlabeled") == label_class
        ))
    raise ValueError(f"unknown selection mode {mode!r}")


class LabelStore:
    """Durable account labels with an append-only audit log.

    The connection is shared across threads (server loop plus job worker);
    sqlite's serialized mode plus the write lock below keep that safe.
    """

    def __init__(self, path: str):
        self.path = str(path)
        self._write_lock = threading.Lock()
        try:
            self._db = sqlite3.connect(self.path, check_same_thread=False)
            self._db.execute("PRAGMA synchronous=FULL")
            self._db.execute(
                "CREATE TABLE IF NOT EXISTS assignments ("
                " account_id TEXT PRIMARY KEY, label TEXT NOT NULL, updated_at TEXT NOT NULL)"
            )
            self._db.execute(
                "CREATE TABLE IF NOT EXISTS audit ("
                " seq INTEGER PRIMARY KEY AUTOINCREMENT,"
                " account_id TEXT NOT NULL, label TEXT NOT NULL, updated_at TEXT NOT NULL)"
            )
            self._db.commit()
        except sqlite3.Error as exc:
            raise PersistenceFailure(f"cannot open label store {self.path}: {exc}") from exc

    def close(self) -> None:
        self._db.close()

    def set_labels(self, ids, label_class: str, corpus_ids=None, now: str | None = None) -> str:
        """Assign a class to every id; committed before returning."""
        if label_class not in LABEL_CLASSES:
            raise ValueError(f"unknown label class {label_class!r}")
        ids = sorted(set(ids))
        if corpus_ids is not None:
            known = set(corpus_ids)
            for i in ids:
                if i not in known:
                    raise UnknownAccountId(i)
        stamp = now or dt.datetime.now(dt.timezone.utc).isoformat()
        try:
            with self._write_lock, self._db:
                for i in ids:
                    if label_class == "unlabeled":
                        self._db.execute("DELETE FROM assignments WHERE account_id = ?", (i,))
                    else:
                        self._db.execute(
                            "INSERT INTO assignments (account_id, label, updated_at) VALUES (?, ?, ?)"
                            " ON CONFLICT(account_id) DO UPDATE SET label=excluded.label,"
                            " updated_at=excluded.updated_at",
                            (i, label_class, stamp),
                        )
                    self._db.execute(
                        "INSERT INTO audit (account_id, label, updated_at) VALUES (?, ?, ?)",
                        (i, label_class, stamp),
                    )
        except sqlite3.Error as exc:
            raise PersistenceFailure(f"label write failed: {exc}") from exc
        return stamp

    def assignments(self) -> dict[str, tuple[str, str]]:
        rows = self._db.execute(
            "SELECT account_id, label, updated_at FROM assignments ORDER BY account_id"
        ).fetchall()
        return {aid: (label, stamp) for aid, label, stamp in rows}

    def labels(self) -> dict[str, str]:
        return {aid: label for aid, (label, _) in self.assignments().items()}

    def label_of(self, account_id: str) -> str:
        row = self._db.execute(
            "SELECT label FROM assignments WHERE account_id = ?", (account_id,)
        ).fetchone()
        return row[0] if row else "unlabeled"

    def audit_log(self) -> list[tuple[int, str, str, str]]:
        return self._db.execute(
            "SELECT seq, account_id, label, updated_at FROM audit ORDER BY seq"
        ).fetchall()

    def replay_audit(self) -> dict[str, tuple[str, str]]:
        """Rebuild the assignment map from the audit log alone."""
        state: dict[str, tuple[str, str]] = {}
        for _, aid, label, stamp in self.audit_log():
            if label == "unlabeled":
                state.pop(aid, None)
            else:
                state[aid] = (label, stamp)
        return dict(sorted(state.items()))


def export_labels(store: LabelStore, corpus_ids, path: str) -> None:
    """account_id,label,updated_at for every corpus account, sorted."""
    assigned = store.assignments()
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["account_id", "label", "updated_at"])
            for aid in sorted(corpus_ids):
                label, stamp = assigned.get(aid, ("unlabeled", ""))
                writer.writerow([aid, label, stamp])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def import_labels(store: LabelStore, path: str) -> int:
    """Apply an exported CSV onto a store; returns rows applied."""
    applied = 0
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["account_id", "label", "updated_at"]:
            raise MalformedCsv(f"unexpected header {reader.fieldnames}")
        for row in reader:
            label = row["label"]
            if label not in LABEL_CLASSES:
                raise MalformedCsv(f"unknown label {label!r}")
            if label == "unlabeled":
                continue
            store.set_labels([row["account_id"]], label, now=row["updated_at"] or None)
            applied += 1
    return applied
