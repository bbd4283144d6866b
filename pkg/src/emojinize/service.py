"""HTTP service for the human studies: translation collection and cloze tests.

Participants either translate a marked target word with the emoji picker
(translations land in the human-translation import format) or answer cloze
questions (guesses land in the records format, scored later by the analysis
pipeline). Ground truth never leaves the server in cloze mode, and translate
submissions must validate as emoji-only to be accepted.

State is desk-scale by design: a JSON session file plus append-only JSONL
record logs, no database.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .cloze import CONDITIONS, ClozeItem, TranslationEntry, render_cloze
from .emojitext import EmojiTextError, parse_emoji_sequence, rgi_inventory

TASK_KINDS = ("translate", "cloze")


class ServiceError(RuntimeError):
    pass


class UnknownSession(ServiceError):
    pass


class SessionComplete(ServiceError):
    pass


class WrongItem(ServiceError):
    pass


class InvalidEmoji(ServiceError):
    pass


class CorpusExhausted(ServiceError):
    pass


@dataclass
class Session:
    session_id: str
    task_kind: str
    condition: str
    item_ids: list[str]
    cursor: int = 0
    outcomes: dict[str, dict] = field(default_factory=dict)  # item_id -> original outcome
    created_at: str = ""

    @property
    def complete(self) -> bool:
        return self.cursor >= len(self.item_ids)


class StudyService:
    """Session assignment, task rendering, submission validation, persistence."""

    def __init__(
        self,
        corpus_entries: list[dict],
        state_dir: str | Path,
        translations: dict[str, TranslationEntry] | None = None,
        cloze_condition: str = "emojinize",
        batch_size: int = 10,
    ):
        if cloze_condition not in CONDITIONS:
            raise ServiceError(f"unknown condition {cloze_condition!r}")
        self.entries = {e["id"]: e for e in corpus_entries}
        self.order = [e["id"] for e in corpus_entries]
        self.translations = translations or {}
        self.cloze_condition = cloze_condition
        self.batch_size = batch_size
        self.state_dir = Path(state_dir)
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self.sessions_path = self.state_dir / "sessions.json"
        self.translations_path = self.state_dir / "human_translations.jsonl"
        self.guesses_path = self.state_dir / "human_records.jsonl"
        self._lock = threading.Lock()
        self.sessions: dict[str, Session] = {}
        self._answered: dict[str, int] = {}  # per (task_kind:item_id) accepted count
        self._load()

    # --- persistence -------------------------------------------------------

    def _load(self) -> None:
        if self.sessions_path.exists():
            raw = json.loads(self.sessions_path.read_text("utf-8"))
            for obj in raw.values():
                self.sessions[obj["session_id"]] = Session(**obj)
            for session in self.sessions.values():
                for item_id in session.outcomes:
                    if session.outcomes[item_id].get("status") == "accepted":
                        key = f"{session.task_kind}:{item_id}"
                        self._answered[key] = self._answered.get(key, 0) + 1

    def _save_sessions(self) -> None:
        payload = {sid: asdict(s) for sid, s in self.sessions.items()}
        tmp = self.sessions_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1), "utf-8")
        tmp.replace(self.sessions_path)

    def _append(self, path: Path, record: dict) -> None:
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")

    # --- operations ---------------------------------------------------------

    def create_session(self, task_kind: str, count: int | None = None, condition: str | None = None) -> Session:
        """Assign the least-answered items first; ties keep corpus order."""
        if task_kind not in TASK_KINDS:
            raise ServiceError(f"unknown task kind {task_kind!r}")
        if not self.order:
            raise CorpusExhausted("no corpus items loaded")
        condition = condition or (self.cloze_condition if task_kind == "cloze" else "baseline")
        if task_kind == "cloze" and condition not in CONDITIONS:
            raise ServiceError(f"unknown condition {condition!r}")
        with self._lock:
            count = count or self.batch_size
            ranked = sorted(
                self.order,
                key=lambda item_id: (self._answered.get(f"{task_kind}:{item_id}", 0), self.order.index(item_id)),
            )
            assigned = ranked[: max(1, min(count, len(ranked)))]
            # reserve: assignment counts toward least-answered so concurrent
            # sessions spread over the corpus before items repeat
            for item_id in assigned:
                key = f"{task_kind}:{item_id}"
                self._answered[key] = self._answered.get(key, 0) + 1
            session = Session(
                session_id=secrets.token_urlsafe(16),
                task_kind=task_kind,
                condition=condition,
                item_ids=assigned,
                created_at=datetime.now(timezone.utc).isoformat(),
            )
            self.sessions[session.session_id] = session
            self._save_sessions()
            return session

    def _session(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def _cloze_item(self, session: Session, item_id: str) -> ClozeItem:
        entry = self.entries[item_id]
        target = entry["target"]
        span = (target["start"], target["end"])
        surface = target["surface"]
        hint = None
        if session.condition != "baseline":
            translation = self.translations.get(item_id)
            if translation is None:
                raise ServiceError(f"no translation for {item_id} under {session.condition}")
            hint = translation.emoji
            if translation.span is not None:
                span = translation.span
                surface = translation.surface or entry["text"][span[0] : span[1]]
        return ClozeItem(
            sample_id=item_id,
            text=entry["text"],
            span=span,
            hidden_surface=surface,
            condition=session.condition,
            hint=hint,
        )

    def next_item(self, session_id: str) -> dict:
        """The cursor item, rendered; never the ground truth (cloze) and never
        an emoji suggestion (translate)."""
        with self._lock:
            session = self._session(session_id)
            if session.complete:
                raise SessionComplete(session_id)
            item_id = session.item_ids[session.cursor]
            entry = self.entries[item_id]
            base = {
                "item_id": item_id,
                "task_kind": session.task_kind,
                "position": session.cursor,
                "total": len(session.item_ids),
            }
            if session.task_kind == "translate":
                target = entry["target"]
                marked = (
                    entry["text"][: target["start"]]
                    + "<"
                    + target["surface"]
                    + ">"
                    + entry["text"][target["end"] :]
                )
                base.update({"text": marked, "target": target["surface"]})
            else:
                item = self._cloze_item(session, item_id)
                base.update(
                    {
                        "text": render_cloze(item),
                        "condition": session.condition,
                        "blanks": len(item.hidden_surface.split()),
                    }
                )
            return base

    def submit(self, session_id: str, item_id: str, payload: str) -> dict:
        """Validate and persist one submission; idempotent per (session, item)."""
        with self._lock:
            session = self._session(session_id)
            if item_id in session.outcomes:
                return session.outcomes[item_id]  # duplicate: original outcome, no append
            if session.complete:
                raise SessionComplete(session_id)
            if item_id != session.item_ids[session.cursor]:
                raise WrongItem(f"expected {session.item_ids[session.cursor]}, got {item_id}")

            received_at = datetime.now(timezone.utc).isoformat()
            if session.task_kind == "translate":
                try:
                    sequence = parse_emoji_sequence(payload)
                except EmojiTextError as exc:
                    # rejected: cursor unchanged, nothing persisted
                    return {"status": "rejected", "reason": "InvalidEmoji", "detail": str(exc)}
                self._append(
                    self.translations_path,
                    {"sample_id": item_id, "emoji": str(sequence), "session_id": session_id, "received_at": received_at},
                )
            else:
                guess = payload.strip()
                self._append(
                    self.guesses_path,
                    {
                        "item_id": item_id,
                        "condition": session.condition,
                        "participant_kind": "human",
                        "participant_id": session_id,
                        "guess": guess,
                        "matched": False,
                        "scored_by": "pending",
                        "received_at": received_at,
                    },
                )
            outcome = {"status": "accepted", "position": session.cursor + 1, "total": len(session.item_ids)}
            session.outcomes[item_id] = outcome
            session.cursor += 1
            self._save_sessions()
            return outcome


def emoji_inventory() -> list[dict]:
    """The pinned RGI emoji list, in data order, with canonical names."""
    return [{"emoji": seq, "name": name} for seq, name in rgi_inventory()]


class CreateSessionBody(BaseModel):
    task_kind: str
    count: int | None = None
    condition: str | None = None


class SubmissionBody(BaseModel):
    item_id: str
    payload: str


def create_app(service: StudyService, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="emojinize study service")
    inventory = emoji_inventory()

    def http_error(exc: ServiceError) -> HTTPException:
        status = {
            UnknownSession: 404,
            SessionComplete: 409,
            WrongItem: 409,
            InvalidEmoji: 422,
            CorpusExhausted: 409,
        }.get(type(exc), 400)
        return HTTPException(status_code=status, detail=f"{type(exc).__name__}: {exc}")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "items": len(service.entries), "emoji": len(inventory)}

    @app.get("/emoji")
    def emoji():
        return inventory

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        try:
            session = service.create_session(body.task_kind, body.count, body.condition)
        except ServiceError as exc:
            raise http_error(exc)
        return {
            "session_id": session.session_id,
            "task_kind": session.task_kind,
            "condition": session.condition,
            "total": len(session.item_ids),
        }

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str):
        try:
            return service.next_item(session_id)
        except SessionComplete:
            return JSONResponse({"complete": True}, status_code=200)
        except ServiceError as exc:
            raise http_error(exc)

    @app.post("/sessions/{session_id}/submit")
    def submit(session_id: str, body: SubmissionBody):
        try:
            return service.submit(session_id, body.item_id, body.payload)
        except ServiceError as exc:
            raise http_error(exc)

    if ui_dir is not None and Path(ui_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
