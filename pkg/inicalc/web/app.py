"""FastAPI application factory."""

from __future__ import annotations

from fastapi import FastAPI

from inicalc.web.routes import router


def create_app() -> FastAPI:
    app = FastAPI(title="inicalc", docs_url=None, redoc_url=None)

    # REST API
    app.include_router(router)

    return app
