"""Local HTTP service exposing classification and scanning.

Request bodies are parsed by hand rather than through framework validators
so the status-code contract stays exact: 400 malformed body, 422 empty
texts, 502 backend failure.
"""
from __future__ import annotations

import json
import socket
from typing import Sequence

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .classifier.base import ClassifierBackend
from .detection import (AggregationMode, ThresholdConfig, flag,
                        predict_category)
from .errors import BindFailure, DarkScanError, EmptySite
from .ingest import FetchConfig
from .report import render_report, round_category_map
from .scan import scan_html, scan_url
from .taxonomy import canonical_order

EXTENSION_ORIGIN_REGEX = r"^(chrome|moz)-extension://.*$"


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def create_app(backend: ClassifierBackend,
               thresholds: ThresholdConfig | None = None,
               mode: AggregationMode = AggregationMode.ARGMAX_FRACTION,
               cors_origins: Sequence[str] | None = None,
               fetch_config: FetchConfig | None = None) -> FastAPI:
    thresholds = thresholds or ThresholdConfig.uniform()
    app = FastAPI(title="darkscan service", docs_url=None, redoc_url=None)
    if cors_origins:
        app.add_middleware(CORSMiddleware, allow_origins=list(cors_origins),
                           allow_methods=["*"], allow_headers=["*"])
    else:
        app.add_middleware(CORSMiddleware,
                           allow_origin_regex=EXTENSION_ORIGIN_REGEX,
                           allow_methods=["*"], allow_headers=["*"])

    @app.get("/v1/health")
    async def health() -> dict:
        return {"status": "ok", "backend": backend.name}

    @app.post("/v1/classify")
    async def classify(request: Request) -> Response:
        try:
            body = json.loads(await request.body())
        except ValueError:
            return _error(400, "body is not valid JSON")
        if not isinstance(body, dict) or not isinstance(body.get("texts"), list):
            return _error(400, 'body must be {"texts": [...]}')
        texts = body["texts"]
        if not all(isinstance(t, str) for t in texts):
            return _error(400, "texts must all be strings")
        if not texts:
            return _error(422, "texts is empty")
        try:
            dists = backend.classify_batch(texts)
        except Exception as exc:
            return _error(502, f"backend failure: {exc}")
        results = []
        for dist in dists:
            flagged = flag(dist, thresholds)
            results.append({
                "probabilities": round_category_map(dist.probs),
                "predicted": predict_category(dist).display_name,
                "flagged": [c.display_name for c in canonical_order()
                            if c in flagged],
            })
        return JSONResponse({"results": results})

    @app.post("/v1/scan")
    async def scan(request: Request) -> Response:
        try:
            body = json.loads(await request.body())
        except ValueError:
            return _error(400, "body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, 'body must be {"url": ...} or {"html": ...}')
        url = body.get("url")
        html = body.get("html")
        if (url is None) == (html is None):
            return _error(400, 'provide exactly one of "url" or "html"')
        try:
            if html is not None:
                if not isinstance(html, str):
                    return _error(400, "html must be a string")
                report = scan_html(html, backend, thresholds, mode)
            else:
                if not isinstance(url, str):
                    return _error(400, "url must be a string")
                report = scan_url(url, backend, thresholds, mode,
                                  fetch_config or FetchConfig())
        except EmptySite:
            return _error(422, "page contains no classifiable text")
        except Exception as exc:
            return _error(502, f"scan failure: {exc}")
        return Response(content=render_report(report, "json"),
                        media_type="application/json")

    return app


def parse_bind(bind: str) -> tuple[str, int]:
    host, sep, port = bind.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"bind address must be host:port, got {bind!r}")
    return host or "127.0.0.1", int(port)


def serve(bind: str, backend: ClassifierBackend,
          thresholds: ThresholdConfig | None = None,
          mode: AggregationMode = AggregationMode.ARGMAX_FRACTION,
          cors_origins: Sequence[str] | None = None) -> None:
    """Run until interrupted. Raises BindFailure when the address is taken."""
    import uvicorn

    host, port = parse_bind(bind)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise BindFailure(f"cannot bind {bind}: {exc}") from exc
    finally:
        probe.close()
    app = create_app(backend, thresholds, mode, cors_origins)
    uvicorn.run(app, host=host, port=port, log_level="warning")
