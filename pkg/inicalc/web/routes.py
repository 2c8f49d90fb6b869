"""REST API routes over the command implementations."""

from __future__ import annotations

import asyncio
import logging
from typing import Optional

from fastapi import APIRouter
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from inicalc.cli.commands import (
    RunRecord, run_check, run_eval, run_independence, run_translate,
)
from inicalc.semantics.models import ModelId
from inicalc.translator import FragmentTag

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api")


class SourceRequest(BaseModel):
    source: str
    name: str = "<request>"
    model: Optional[ModelId] = None


class EvalRequest(SourceRequest):
    erased: bool = False


class TranslateRequest(BaseModel):
    source: str
    name: str = "<request>"
    fragment: FragmentTag = FragmentTag.ARROW_FREE


def _respond(record: RunRecord) -> JSONResponse:
    if record.exit_code == 1:
        error = record.outcome["error"]
        message = error.get("explanation") or error.get("message", "")
        return JSONResponse({"error": message, "kind": error["kind"]}, status_code=400)
    return JSONResponse(record.model_dump(mode="json"))


@router.get("/health")
async def health() -> dict:
    return {"status": "ok", "service": "inicalc"}


@router.post("/check")
async def check(req: SourceRequest) -> JSONResponse:
    record = await asyncio.to_thread(run_check, req.source, req.name, req.model)
    return _respond(record)


@router.post("/eval")
async def evaluate(req: EvalRequest) -> JSONResponse:
    record = await asyncio.to_thread(run_eval, req.source, req.name, req.model or ModelId.DIST, req.erased)
    return _respond(record)


@router.post("/independence")
async def independence(req: SourceRequest) -> JSONResponse:
    record = await asyncio.to_thread(run_independence, req.source, req.name, req.model or ModelId.DIST)
    return _respond(record)


@router.post("/translate")
async def translate(req: TranslateRequest) -> JSONResponse:
    record = await asyncio.to_thread(run_translate, req.source, req.name, req.fragment)
    logger.info("translated %s into the %s image", req.name, req.fragment.value)
    return _respond(record)
