"""Embedded transactional store backed by SQLite.

One file on disk, schema-versioned, zero external services. Media blobs
are content-addressed by SHA-256 digest and deduplicated. File-backed
stores run in WAL mode with one connection per thread so reads stay
concurrent; ``:memory:`` stores share a single locked connection.
"""

from __future__ import annotations

import secrets
import sqlite3
import threading
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

SCHEMA_VERSION = "1"

_SCHEMA = """
CREATE TABLE IF NOT EXISTS meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS courses (
    id TEXT PRIMARY KEY,
    title TEXT NOT NULL,
    description TEXT NOT NULL DEFAULT '',
    feedback_enabled INTEGER NOT NULL,
    created_at TEXT NOT NULL,
    deleted INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS questions (
    id TEXT PRIMARY KEY,
    course_id TEXT NOT NULL REFERENCES courses(id),
    topic TEXT NOT NULL,
    sub_topic TEXT NOT NULL,
    kind TEXT NOT NULL,
    body TEXT NOT NULL,
    options TEXT NOT NULL,
    answer_key TEXT NOT NULL,
    reference_answer TEXT NOT NULL DEFAULT '',
    explanation TEXT NOT NULL DEFAULT '',
    context TEXT NOT NULL DEFAULT '',
    media TEXT NOT NULL,
    point_value INTEGER NOT NULL,
    attempt_limit INTEGER,
    related_ids TEXT NOT NULL,
    deleted INTEGER NOT NULL DEFAULT 0,
    created_at TEXT NOT NULL,
    updated_at TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_questions_course_topic
    ON questions (course_id, topic, sub_topic);
CREATE TABLE IF NOT EXISTS media_blobs (
    digest TEXT PRIMARY KEY,
    media_type TEXT NOT NULL,
    content BLOB NOT NULL
);
CREATE TABLE IF NOT EXISTS students (
    id TEXT PRIMARY KEY,
    display_name TEXT NOT NULL DEFAULT '',
    email TEXT NOT NULL DEFAULT '',
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS attempts (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    id TEXT NOT NULL UNIQUE,
    student_id TEXT NOT NULL,
    question_id TEXT NOT NULL,
    course_id TEXT NOT NULL,
    topic TEXT NOT NULL,
    sub_topic TEXT NOT NULL,
    opened_at TEXT NOT NULL,
    submitted_at TEXT NOT NULL,
    answer_payload TEXT NOT NULL,
    correct INTEGER NOT NULL,
    hint_text TEXT,
    points_awarded INTEGER NOT NULL,
    attempt_ordinal INTEGER NOT NULL,
    misconception_signature TEXT,
    UNIQUE (student_id, question_id, attempt_ordinal)
);
CREATE INDEX IF NOT EXISTS idx_attempts_student_question
    ON attempts (student_id, question_id);
CREATE INDEX IF NOT EXISTS idx_attempts_course ON attempts (course_id);
CREATE TABLE IF NOT EXISTS profile_tags (
    student_id TEXT NOT NULL,
    question_id TEXT NOT NULL,
    signature TEXT NOT NULL,
    count INTEGER NOT NULL,
    first_seen TEXT NOT NULL,
    first_seq INTEGER NOT NULL,
    PRIMARY KEY (student_id, question_id, signature)
);
CREATE TABLE IF NOT EXISTS profile_topics (
    student_id TEXT NOT NULL,
    topic TEXT NOT NULL,
    sub_topic TEXT NOT NULL,
    count INTEGER NOT NULL,
    PRIMARY KEY (student_id, topic, sub_topic)
);
CREATE TABLE IF NOT EXISTS profiles (
    student_id TEXT PRIMARY KEY,
    last_updated TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
    token TEXT PRIMARY KEY,
    role TEXT NOT NULL,
    student_id TEXT,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS questionnaire_responses (
    id TEXT PRIMARY KEY,
    student_id TEXT NOT NULL,
    submitted_at TEXT NOT NULL,
    answers TEXT NOT NULL
);
"""


class Store:
    def __init__(self, path: str | Path = ":memory:") -> None:
        self._path = str(path)
        self._memory = self._path == ":memory:"
        self._local = threading.local()
        self._tx_lock = threading.RLock()
        self._registry_lock = threading.Lock()
        self._keyed_locks: dict[tuple, threading.Lock] = {}
        if self._memory:
            self._shared_conn = self._connect()
        else:
            self._shared_conn = None
        self._init_schema()

    # -- connections --------------------------------------------------

    def _connect(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self._path, check_same_thread=False, timeout=30.0)
        conn.row_factory = sqlite3.Row
        conn.isolation_level = None  # transactions managed explicitly
        conn.execute("PRAGMA foreign_keys = ON")
        if not self._memory:
            conn.execute("PRAGMA journal_mode = WAL")
            conn.execute("PRAGMA synchronous = NORMAL")
        return conn

    def _conn(self) -> sqlite3.Connection:
        if self._shared_conn is not None:
            return self._shared_conn
        conn = getattr(self._local, "conn", None)
        if conn is None:
            conn = self._connect()
            self._local.conn = conn
        return conn

    def _init_schema(self) -> None:
        conn = self._conn()
        with self._tx_lock:
            conn.executescript(_SCHEMA)
            with self.transaction() as txn:
                row = txn.execute("SELECT value FROM meta WHERE key = 'schema_version'").fetchone()
                if row is None:
                    txn.execute(
                        "INSERT INTO meta (key, value) VALUES ('schema_version', ?)",
                        (SCHEMA_VERSION,),
                    )
                elif row["value"] != SCHEMA_VERSION:
                    raise RuntimeError(
                        f"store schema version {row['value']} != supported {SCHEMA_VERSION}"
                    )
                if txn.execute("SELECT 1 FROM meta WHERE key = 'token_salt'").fetchone() is None:
                    txn.execute(
                        "INSERT INTO meta (key, value) VALUES ('token_salt', ?)",
                        (secrets.token_hex(16),),
                    )

    # -- transactions -------------------------------------------------

    @contextmanager
    def transaction(self) -> Iterator[sqlite3.Connection]:
        """Serialized write transaction; commits on success, rolls back on error."""
        conn = self._conn()
        with self._tx_lock:
            conn.execute("BEGIN IMMEDIATE")
            try:
                yield conn
            except BaseException:
                conn.execute("ROLLBACK")
                raise
            else:
                conn.execute("COMMIT")

    @contextmanager
    def read(self) -> Iterator[sqlite3.Connection]:
        yield self._conn()

    # -- keyed serialization -----------------------------------------

    def keyed_lock(self, *key) -> threading.Lock:
        """Named mutex, e.g. per course or per (student, question) pair."""
        with self._registry_lock:
            lock = self._keyed_locks.get(key)
            if lock is None:
                lock = threading.Lock()
                self._keyed_locks[key] = lock
            return lock

    # -- meta ----------------------------------------------------------

    def meta(self, key: str) -> str:
        with self.read() as conn:
            row = conn.execute("SELECT value FROM meta WHERE key = ?", (key,)).fetchone()
        if row is None:
            raise KeyError(key)
        return row["value"]

    @property
    def token_salt(self) -> str:
        return self.meta("token_salt")

    def close(self) -> None:
        if self._shared_conn is not None:
            self._shared_conn.close()
        conn = getattr(self._local, "conn", None)
        if conn is not None:
            conn.close()
            self._local.conn = None
