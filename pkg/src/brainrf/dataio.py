"""On-disk dataset format: JSONL records plus a flat binary matrix for EEG data.

A bundle directory holds:

    queries.jsonl        {"query_id", "embedding"}
    documents.jsonl      {"doc_id", "embedding", "snippet_relevant_external"?,
                          "cluster"?, "snippet_grade_user"?, "landing_grade_user"?}
    sessions.jsonl       {"session_id", "user_id", "query_id", "order",
                          "intent_cluster"?, "unseen": [...], "pseudo"?: {...},
                          "records": [{"doc_id", "clicked", "snippet_grade",
                                       "landing_grade"?, "snippet_score"?,
                                       "landing_score"?}]}
    features.bin         optional: DE feature matrix, one row per stimulus
    features_index.jsonl optional: {"session_id", "position", "kind", "row"}
    segments.bin         optional: raw EEG, one flattened (channels x time) row
    segments_index.jsonl optional: same index schema
    segments_meta.json   optional: {"channels", "sampling_rate_hz", "pre_stimulus_ms"}
    manifest.json        written by synth: generator config + seed + counts

The binary container is little-endian: 8-byte magic "BRFMAT01", uint32
version, uint32 n_rows, uint32 n_cols, then float32 row-major data. All text
files are UTF-8, one JSON object per line, keys sorted, so identical bundles
serialize to identical bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .eeg import EegSegment
from .sessions import DatasetBundle, ExaminedDoc, Session
from .types import DataIntegrityError, Document, ValidationError

MAGIC = b"BRFMAT01"
CONTAINER_VERSION = 1

QUERIES_FILE = "queries.jsonl"
DOCUMENTS_FILE = "documents.jsonl"
SESSIONS_FILE = "sessions.jsonl"
FEATURES_FILE = "features.bin"
FEATURES_INDEX_FILE = "features_index.jsonl"
SEGMENTS_FILE = "segments.bin"
SEGMENTS_INDEX_FILE = "segments_index.jsonl"
SEGMENTS_META_FILE = "segments_meta.json"
MANIFEST_FILE = "manifest.json"


# ---------------------------------------------------------------- container


def write_matrix(path: Path, matrix: np.ndarray) -> None:
    arr = np.ascontiguousarray(matrix, dtype=np.float32)
    if arr.ndim != 2:
        raise ValidationError("matrix container expects a 2-d array")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<III", CONTAINER_VERSION, arr.shape[0], arr.shape[1]))
        f.write(arr.tobytes(order="C"))


def read_matrix(path: Path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != MAGIC:
            raise ValidationError(f"{path.name}: bad magic {magic!r}")
        version, n_rows, n_cols = struct.unpack("<III", f.read(12))
        if version != CONTAINER_VERSION:
            raise ValidationError(f"{path.name}: unsupported version {version}")
        data = np.frombuffer(f.read(), dtype=np.float32)
    if data.size != n_rows * n_cols:
        raise ValidationError(
            f"{path.name}: expected {n_rows}x{n_cols} values, found {data.size}"
        )
    return data.reshape(n_rows, n_cols).astype(np.float64)


# ---------------------------------------------------------------- JSONL


def _dump_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def _read_jsonl(path: Path) -> list[tuple[int, dict]]:
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append((lineno, json.loads(line)))
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path.name}:{lineno}: parse error: {exc}") from exc
    return rows


def _require(obj: dict, field: str, where: str, problems: list[str]):
    if field not in obj:
        problems.append(f"{where}: missing field {field!r}")
        return None
    return obj[field]


# ---------------------------------------------------------------- save


def save_bundle(bundle: DatasetBundle, directory) -> None:
    """Write a bundle to a directory; deterministic bytes for identical bundles."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    with open(directory / QUERIES_FILE, "w", encoding="utf-8") as f:
        for qid in sorted(bundle.queries):
            f.write(_dump_line({
                "query_id": qid,
                "embedding": np.asarray(bundle.queries[qid]).tolist(),
            }) + "\n")

    with open(directory / DOCUMENTS_FILE, "w", encoding="utf-8") as f:
        for doc_id in sorted(bundle.documents):
            doc = bundle.documents[doc_id]
            row = {"doc_id": doc.doc_id, "embedding": doc.embedding.tolist()}
            if doc.snippet_relevant_external is not None:
                row["snippet_relevant_external"] = doc.snippet_relevant_external
            if doc.cluster is not None:
                row["cluster"] = doc.cluster
            if doc.snippet_grade_user is not None:
                row["snippet_grade_user"] = doc.snippet_grade_user
            if doc.landing_grade_user is not None:
                row["landing_grade_user"] = doc.landing_grade_user
            f.write(_dump_line(row) + "\n")

    feature_rows: list[np.ndarray] = []
    feature_index: list[dict] = []
    segment_rows: list[np.ndarray] = []
    segment_index: list[dict] = []
    segment_meta: dict | None = None

    def stage_eeg(session_id: str, position: int, kind: str, record: ExaminedDoc):
        nonlocal segment_meta
        feature = getattr(record, f"{kind}_feature")
        if feature is not None:
            feature_index.append({
                "session_id": session_id, "position": position,
                "kind": kind, "row": len(feature_rows),
            })
            feature_rows.append(np.asarray(feature, dtype=np.float64).reshape(-1))
        segment = getattr(record, f"{kind}_segment")
        if segment is not None:
            meta = {
                "channels": segment.channel_count,
                "sampling_rate_hz": segment.sampling_rate_hz,
                "pre_stimulus_ms": segment.pre_stimulus_ms,
                "n_samples": segment.n_samples,
            }
            if segment_meta is None:
                segment_meta = meta
            elif segment_meta != meta:
                raise ValidationError(
                    "all raw segments in a bundle must share shape and rate"
                )
            segment_index.append({
                "session_id": session_id, "position": position,
                "kind": kind, "row": len(segment_rows),
            })
            segment_rows.append(segment.samples.reshape(-1))

    sessions_sorted = sorted(bundle.sessions, key=lambda s: (s.user_id, s.order, s.session_id))
    with open(directory / SESSIONS_FILE, "w", encoding="utf-8") as f:
        for session in sessions_sorted:
            records = []
            for position, rec in enumerate(session.records):
                row = {
                    "doc_id": rec.doc_id,
                    "clicked": rec.clicked,
                    "snippet_grade": rec.snippet_grade,
                }
                if rec.landing_grade is not None:
                    row["landing_grade"] = rec.landing_grade
                if rec.snippet_score is not None:
                    row["snippet_score"] = rec.snippet_score
                if rec.landing_score is not None:
                    row["landing_score"] = rec.landing_score
                records.append(row)
                stage_eeg(session.session_id, position, "snippet", rec)
                if rec.clicked:
                    stage_eeg(session.session_id, position, "landing", rec)
            row = {
                "session_id": session.session_id,
                "user_id": session.user_id,
                "query_id": session.query_id,
                "order": session.order,
                "records": records,
                "unseen": list(session.unseen_ids),
            }
            if session.intent_cluster is not None:
                row["intent_cluster"] = session.intent_cluster
            if session.pseudo is not None:
                row["pseudo"] = {k: session.pseudo[k] for k in sorted(session.pseudo)}
            f.write(_dump_line(row) + "\n")

    if feature_rows:
        write_matrix(directory / FEATURES_FILE, np.vstack(feature_rows))
        with open(directory / FEATURES_INDEX_FILE, "w", encoding="utf-8") as f:
            for row in feature_index:
                f.write(_dump_line(row) + "\n")
    if segment_rows:
        write_matrix(directory / SEGMENTS_FILE, np.vstack(segment_rows))
        with open(directory / SEGMENTS_INDEX_FILE, "w", encoding="utf-8") as f:
            for row in segment_index:
                f.write(_dump_line(row) + "\n")
        with open(directory / SEGMENTS_META_FILE, "w", encoding="utf-8") as f:
            f.write(json.dumps(segment_meta, sort_keys=True) + "\n")


# ---------------------------------------------------------------- load


def _load_index(directory: Path, name: str, n_rows: int, problems: list[str]):
    index: dict[tuple[str, int, str], int] = {}
    for lineno, obj in _read_jsonl(directory / name):
        where = f"{name}:{lineno}"
        sid = _require(obj, "session_id", where, problems)
        pos = _require(obj, "position", where, problems)
        kind = _require(obj, "kind", where, problems)
        row = _require(obj, "row", where, problems)
        if None in (sid, pos, kind, row):
            continue
        if kind not in ("snippet", "landing"):
            problems.append(f"{where}: kind must be snippet|landing, got {kind!r}")
            continue
        if not 0 <= int(row) < n_rows:
            problems.append(f"{where}: row {row} outside matrix with {n_rows} rows")
            continue
        key = (str(sid), int(pos), str(kind))
        if key in index:
            problems.append(f"{where}: duplicate index entry for {key}")
            continue
        index[key] = int(row)
    return index


def load_bundle(directory) -> DatasetBundle:
    """Load and fully validate a bundle; all integrity violations raise together."""
    directory = Path(directory)
    for required in (QUERIES_FILE, DOCUMENTS_FILE, SESSIONS_FILE):
        if not (directory / required).exists():
            raise ValidationError(f"bundle is missing {required} in {directory}")

    problems: list[str] = []

    queries: dict[str, np.ndarray] = {}
    for lineno, obj in _read_jsonl(directory / QUERIES_FILE):
        where = f"{QUERIES_FILE}:{lineno}"
        qid = _require(obj, "query_id", where, problems)
        emb = _require(obj, "embedding", where, problems)
        if qid is None or emb is None:
            continue
        if qid in queries:
            problems.append(f"{where}: duplicate query id {qid!r}")
            continue
        queries[str(qid)] = np.asarray(emb, dtype=np.float64)

    documents: dict[str, Document] = {}
    for lineno, obj in _read_jsonl(directory / DOCUMENTS_FILE):
        where = f"{DOCUMENTS_FILE}:{lineno}"
        did = _require(obj, "doc_id", where, problems)
        emb = _require(obj, "embedding", where, problems)
        if did is None or emb is None:
            continue
        if did in documents:
            problems.append(f"{where}: duplicate doc id {did!r}")
            continue
        try:
            documents[str(did)] = Document(
                str(did),
                np.asarray(emb, dtype=np.float64),
                snippet_grade_user=obj.get("snippet_grade_user"),
                landing_grade_user=obj.get("landing_grade_user"),
                snippet_relevant_external=obj.get("snippet_relevant_external"),
                cluster=obj.get("cluster"),
            )
        except ValidationError as exc:
            problems.append(f"{where}: {exc}")

    features = feature_index = None
    if (directory / FEATURES_FILE).exists():
        features = read_matrix(directory / FEATURES_FILE)
        feature_index = _load_index(directory, FEATURES_INDEX_FILE, features.shape[0], problems)
    segments = segment_index = segment_meta = None
    if (directory / SEGMENTS_FILE).exists():
        segments = read_matrix(directory / SEGMENTS_FILE)
        with open(directory / SEGMENTS_META_FILE, "r", encoding="utf-8") as f:
            segment_meta = json.load(f)
        segment_index = _load_index(directory, SEGMENTS_INDEX_FILE, segments.shape[0], problems)

    def eeg_kwargs(session_id: str, position: int, kind: str) -> dict:
        out = {}
        if feature_index is not None:
            row = feature_index.get((session_id, position, kind))
            if row is not None:
                out[f"{kind}_feature"] = features[row]
        if segment_index is not None:
            row = segment_index.get((session_id, position, kind))
            if row is not None:
                out[f"{kind}_segment"] = EegSegment(
                    segments[row].reshape(segment_meta["channels"], segment_meta["n_samples"]),
                    segment_meta["sampling_rate_hz"],
                    pre_stimulus_ms=segment_meta["pre_stimulus_ms"],
                    channel_count=segment_meta["channels"],
                )
        return out

    sessions: list[Session] = []
    seen_session_ids = set()
    for lineno, obj in _read_jsonl(directory / SESSIONS_FILE):
        where = f"{SESSIONS_FILE}:{lineno}"
        sid = _require(obj, "session_id", where, problems)
        user = _require(obj, "user_id", where, problems)
        qid = _require(obj, "query_id", where, problems)
        order = _require(obj, "order", where, problems)
        raw_records = _require(obj, "records", where, problems)
        unseen = obj.get("unseen", [])
        if None in (sid, user, qid, order, raw_records):
            continue
        if sid in seen_session_ids:
            problems.append(f"{where}: duplicate session id {sid!r}")
            continue
        seen_session_ids.add(sid)
        records = []
        ok = True
        for position, rec in enumerate(raw_records):
            doc_id = rec.get("doc_id")
            if doc_id is None:
                problems.append(f"{where}: record {position} missing doc_id")
                ok = False
                continue
            try:
                records.append(
                    ExaminedDoc(
                        doc_id=str(doc_id),
                        clicked=bool(rec.get("clicked", False)),
                        snippet_grade=rec.get("snippet_grade"),
                        landing_grade=rec.get("landing_grade"),
                        snippet_score=rec.get("snippet_score"),
                        landing_score=rec.get("landing_score"),
                        **eeg_kwargs(str(sid), position, "snippet"),
                        **eeg_kwargs(str(sid), position, "landing"),
                    )
                )
            except ValidationError as exc:
                problems.append(f"{where}: record {position}: {exc}")
                ok = False
        if not ok:
            continue
        try:
            sessions.append(
                Session(
                    session_id=str(sid),
                    user_id=str(user),
                    query_id=str(qid),
                    order=int(order),
                    records=tuple(records),
                    unseen_ids=tuple(unseen),
                    intent_cluster=obj.get("intent_cluster"),
                    pseudo=obj.get("pseudo"),
                )
            )
        except ValidationError as exc:
            problems.append(f"{where}: {exc}")

    bundle = DatasetBundle(documents=documents, queries=queries, sessions=sessions)
    try:
        bundle.validate()
    except DataIntegrityError as exc:
        problems.extend(exc.violations)
    if problems:
        raise DataIntegrityError(problems)
    return bundle


def bundle_counts(bundle: DatasetBundle) -> dict:
    return {
        "queries": len(bundle.queries),
        "documents": len(bundle.documents),
        "sessions": len(bundle.sessions),
        "examined": sum(s.h_max for s in bundle.sessions),
        "clicks": sum(s.n_clicks for s in bundle.sessions),
    }
