"""REST service over a directory of case files.

One JSON file per case. Writes are serialized per case: a mutating request
takes the case's lock, applies the change, persists, and responds from the
mutated state (read-your-writes). A writer that cannot get the lock within
the queue timeout receives 503 with a Retry-After header. Reads take the
same lock briefly so they always see committed snapshots.
"""

from __future__ import annotations

import json
import os
import re
import threading
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from chaincase import afcore
from chaincase.casefile import (
    CaseError,
    CaseFile,
    UnknownIdError,
    load_case,
    new_case,
    save_case,
)
from chaincase.chain import ChainError
from chaincase.payloads import (
    argument_payload,
    clusters_payload,
    cqs_payload,
    evaluation_payload,
    framework_payload,
)
from chaincase.report import generate_report, render_markdown, report_json_obj
from chaincase.schemes import (
    SchemeError,
    UnknownSchemeError,
    answer_cq,
    auto_instantiate,
    catalog_json_obj,
)
from chaincase.statements import StatementError

WRITE_QUEUE_TIMEOUT = 10.0

_CASE_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class WriteBusyError(Exception):
    """The per-case writer lock stayed busy beyond the queue timeout."""


class DuplicateCaseError(CaseError):
    pass


def _looks_like_case(path: str) -> bool:
    # A case directory may also hold chain files or other JSON; only objects
    # carrying format_version are treated as cases. Corrupt case files still
    # fail loudly in load_case.
    try:
        with open(path, "r", encoding="utf-8") as handle:
            obj = json.load(handle)
    except (OSError, json.JSONDecodeError):
        return False
    return isinstance(obj, dict) and "format_version" in obj


class CaseStore:
    """Directory-backed case registry with per-case locks."""

    def __init__(self, case_dir: str):
        self.case_dir = case_dir
        os.makedirs(case_dir, exist_ok=True)
        self._registry = threading.Lock()
        self._cases: dict[str, CaseFile] = {}
        self._locks: dict[str, threading.Lock] = {}
        for name in sorted(os.listdir(case_dir)):
            path = os.path.join(case_dir, name)
            if not name.endswith(".json") or not _looks_like_case(path):
                continue
            case = load_case(path)
            self._cases[case.case_id] = case
            self._locks[case.case_id] = threading.Lock()

    def _path(self, case_id: str) -> str:
        return os.path.join(self.case_dir, f"{case_id}.json")

    def case_ids(self) -> list[str]:
        with self._registry:
            return sorted(self._cases)

    def _lock_of(self, case_id: str) -> threading.Lock:
        with self._registry:
            if case_id not in self._cases:
                raise UnknownIdError(f"unknown case {case_id!r}")
            return self._locks[case_id]

    def create(self, case_id: str, chain_embedded: dict) -> CaseFile:
        if not _CASE_ID_RE.match(case_id):
            raise CaseError(
                "case_id must be alphanumeric with '.', '_' or '-' separators"
            )
        with self._registry:
            if case_id in self._cases:
                raise DuplicateCaseError(f"case {case_id!r} already exists")
            case = new_case(case_id, chain_embedded=chain_embedded)
            save_case(case, self._path(case_id))
            self._cases[case_id] = case
            self._locks[case_id] = threading.Lock()
            return case

    def read(self, case_id: str, fn: Callable[[CaseFile], object]) -> object:
        lock = self._lock_of(case_id)
        if not lock.acquire(timeout=WRITE_QUEUE_TIMEOUT):
            raise WriteBusyError(case_id)
        try:
            return fn(self._cases[case_id])
        finally:
            lock.release()

    def mutate(self, case_id: str, fn: Callable[[CaseFile], object]) -> object:
        lock = self._lock_of(case_id)
        if not lock.acquire(timeout=WRITE_QUEUE_TIMEOUT):
            raise WriteBusyError(case_id)
        try:
            case = self._cases[case_id]
            result = fn(case)
            save_case(case, self._path(case_id))
            return result
        finally:
            lock.release()


class CreateCaseBody(BaseModel):
    case_id: str
    chain: dict


class AnswerBody(BaseModel):
    answer: str
    justification: str


def create_app(store: CaseStore, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="chaincase", docs_url=None, redoc_url=None)

    @app.exception_handler(UnknownIdError)
    async def _unknown(request: Request, exc: UnknownIdError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(UnknownSchemeError)
    async def _unknown_ref(request: Request, exc: UnknownSchemeError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(DuplicateCaseError)
    async def _duplicate(request: Request, exc: DuplicateCaseError):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(WriteBusyError)
    async def _busy(request: Request, exc: WriteBusyError):
        return JSONResponse(
            status_code=503,
            content={"error": "case is busy; retry shortly"},
            headers={"Retry-After": "1"},
        )

    for domain_error in (CaseError, SchemeError, ChainError, StatementError):
        @app.exception_handler(domain_error)
        async def _domain(request: Request, exc: Exception):
            return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/api/cases")
    def list_cases():
        return {"cases": store.case_ids()}

    @app.post("/api/cases", status_code=201)
    def create_case(body: CreateCaseBody):
        chain = body.chain
        if set(chain) == {"embedded"}:
            chain = chain["embedded"]
        case = store.create(body.case_id, chain)
        return {"case_id": case.case_id, "revision": case.revision}

    @app.get("/api/cases/{case_id}")
    def get_case(case_id: str):
        return store.read(case_id, lambda case: case.to_json_obj())

    @app.get("/api/cases/{case_id}/clusters")
    def get_clusters(case_id: str, coinjoin_filter: bool = True):
        return store.read(
            case_id, lambda case: clusters_payload(case, coinjoin_filter))

    @app.get("/api/cases/{case_id}/arguments")
    def get_arguments(case_id: str):
        def payload(case: CaseFile):
            labelling = case.evaluate().labelling
            return {"arguments": [
                argument_payload(arg, labelling) for arg in case.arguments
            ]}
        return store.read(case_id, payload)

    @app.get("/api/cases/{case_id}/framework")
    def get_framework(case_id: str, format: str = "json"):
        def payload(case: CaseFile):
            framework = case.evaluate().framework
            if format == "apx":
                return PlainTextResponse(afcore.to_apx(framework))
            return framework_payload(framework)
        return store.read(case_id, payload)

    @app.get("/api/cases/{case_id}/evaluation")
    def get_evaluation(case_id: str):
        return store.read(case_id, evaluation_payload)

    @app.get("/api/cases/{case_id}/cqs")
    def get_cqs(case_id: str, status: str = "all"):
        if status not in ("all", "open", "answered"):
            return JSONResponse(
                status_code=400,
                content={"error": "status must be all, open or answered"},
            )
        return store.read(
            case_id, lambda case: {"cqs": cqs_payload(case, status)})

    @app.post("/api/cases/{case_id}/arguments/{arg_id}/cqs/{cq_id}/answer")
    def post_answer(case_id: str, arg_id: str, cq_id: str, body: AnswerBody):
        def apply(case: CaseFile):
            arg = answer_cq(case, arg_id, cq_id, body.answer, body.justification)
            return {
                "arg_id": arg.arg_id,
                "cq_id": cq_id,
                "state": arg.cq_status(cq_id).state.value,
                "justification": arg.cq_status(cq_id).justification,
                "evaluation": evaluation_payload(case),
            }
        return store.mutate(case_id, apply)

    @app.post("/api/cases/{case_id}/auto-instantiate")
    def post_auto_instantiate(case_id: str):
        def apply(case: CaseFile):
            added = auto_instantiate(case)
            labelling = case.evaluate().labelling
            return {"added": [argument_payload(a, labelling) for a in added]}
        return store.mutate(case_id, apply)

    @app.get("/api/cases/{case_id}/report")
    def get_report(case_id: str, format: str = "json"):
        def payload(case: CaseFile):
            report = generate_report(case)
            if format == "md":
                return PlainTextResponse(
                    render_markdown(report), media_type="text/markdown")
            return report_json_obj(report)
        return store.read(case_id, payload)

    @app.get("/api/schemes")
    def get_schemes():
        return {"schemes": catalog_json_obj()}

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/")
        def root():
            return {"service": "chaincase", "cases": "/api/cases"}

    return app
