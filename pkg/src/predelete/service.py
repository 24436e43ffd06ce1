"""HTTP surface for the cascade: /v1/check, /v1/health, /v1/model.

Responses carry exactly the check() fields plus a model fingerprint, so a
client can verify which bundles produced a verdict. Request logging is
privacy-preserving by construction: only a salted hash of the text and the
verdict codes are written, never the draft itself.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .cascade import CascadeBundle, check, check_result_to_dict, load_cascade
from .errors import DataError

DEFAULT_BODY_LIMIT = 16_384
MIN_BODY_LIMIT = 1_024

BIND_ENV = "PREDELETE_BIND"
MANIFEST_ENV = "PREDELETE_MANIFEST"


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    manifest_path: str | None = None
    max_body_bytes: int = DEFAULT_BODY_LIMIT
    log_path: str | None = None
    cors_origins: tuple[str, ...] = ("*",)
    log_salt: str | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise DataError(f"port must be in 1..65535, got {self.port}")
        if self.max_body_bytes < MIN_BODY_LIMIT:
            raise DataError(
                f"max body bytes must be >= {MIN_BODY_LIMIT}, got {self.max_body_bytes}"
            )
        object.__setattr__(self, "cors_origins", tuple(self.cors_origins))


def parse_bind(bind: str) -> tuple[str, int]:
    """Split "host:port"; the host part may be empty to mean all interfaces."""
    host, sep, port_text = bind.rpartition(":")
    if not sep:
        raise DataError(f"bind must look like host:port, got {bind!r}")
    try:
        port = int(port_text)
    except ValueError:
        raise DataError(f"bind port must be an integer, got {port_text!r}") from None
    return host or "0.0.0.0", port


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


class _RequestLog:
    """Append-only JSONL of salted text hashes and verdict codes."""

    def __init__(self, path: str, salt: str):
        self._path = path
        self._salt = salt.encode("utf-8")
        self._lock = threading.Lock()

    def record(self, text: str, payload: dict) -> None:
        digest = hashlib.sha256(self._salt + text.encode("utf-8")).hexdigest()
        line = json.dumps({"text_sha256": digest, **payload}, ensure_ascii=False)
        with self._lock:
            with open(self._path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")


def create_app(config: ServiceConfig, cascade: CascadeBundle | None = None) -> FastAPI:
    """Build the service; the cascade may be handed in or loaded from the manifest."""
    if cascade is None and config.manifest_path:
        cascade = load_cascade(config.manifest_path)
    app = FastAPI(title="predelete", openapi_url=None, docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )
    app.state.cascade = cascade
    log = None
    if config.log_path:
        log = _RequestLog(config.log_path, config.log_salt or secrets.token_hex(16))

    @app.post("/v1/check")
    async def check_endpoint(request: Request):
        current: CascadeBundle | None = app.state.cascade
        if current is None:
            return _error(503, "BUNDLE_NOT_LOADED", "no cascade bundle is loaded")
        body = await request.body()
        if len(body) > config.max_body_bytes:
            return _error(
                413,
                "BODY_TOO_LARGE",
                f"request body exceeds {config.max_body_bytes} bytes",
            )
        try:
            payload = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return _error(400, "MALFORMED_BODY", "body must be a JSON object")
        if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
            return _error(400, "MALFORMED_BODY", 'body must be {"text": "..."}')
        text = payload["text"]
        if not text.strip():
            return _error(400, "EMPTY_TEXT", "text is empty")
        result = check(text, current)
        response = check_result_to_dict(result)
        response["model_fingerprint"] = current.fingerprint
        if log is not None:
            log.record(
                text,
                {
                    "deletion": result.deletion.label,
                    "disinfo": result.disinfo.label,
                    "reason": None if result.reason is None else result.reason.label,
                    "warnings": [w.code for w in result.warnings],
                    "model_fingerprint": current.fingerprint,
                },
            )
        return JSONResponse(response)

    @app.get("/v1/health")
    async def health_endpoint():
        current: CascadeBundle | None = app.state.cascade
        if current is None:
            return _error(503, "BUNDLE_NOT_LOADED", "no cascade bundle is loaded")
        return JSONResponse(
            {"status": "ok", "fingerprints": {s: d for s, d in current.fingerprints}}
        )

    @app.get("/v1/model")
    async def model_endpoint():
        current: CascadeBundle | None = app.state.cascade
        if current is None:
            return _error(503, "BUNDLE_NOT_LOADED", "no cascade bundle is loaded")
        stages = {}
        for stage in ("deletion", "disinfo", "reason"):
            bundle = getattr(current, stage)
            stages[stage] = {
                "kind": bundle.model.kind,
                "labels": list(bundle.labels.names),
                "metadata": {
                    "corpus_fingerprint": bundle.metadata.corpus_fingerprint,
                    "seed": bundle.metadata.seed,
                    "timestamp": bundle.metadata.timestamp,
                },
            }
        return JSONResponse(
            {
                "model_fingerprint": current.fingerprint,
                "thresholds": {
                    "deletion": current.threshold_deletion,
                    "disinfo": current.threshold_disinfo,
                },
                "stages": stages,
            }
        )

    return app


def swap_cascade(app: FastAPI, cascade: CascadeBundle) -> None:
    """Atomic bundle replacement; in-flight requests finish on the old one."""
    app.state.cascade = cascade
