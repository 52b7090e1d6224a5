"""Backend selection by name, shared by the CLI and the service."""
from __future__ import annotations

import os
from pathlib import Path

from .classifier import (ClassifierBackend, LexicalBackend, RemoteBackend,
                         TransformerBackend, default_lexicon, load_artifacts,
                         load_lexicon)
from .errors import ArtifactLoadError
from .evaluation import LRBackend, load_lr_model

BACKEND_NAMES = ("lexical", "lr", "transformer", "remote")
MODEL_DIR_ENV = "DARKSCAN_MODEL_DIR"
DEFAULT_ENDPOINT = "http://127.0.0.1:8787"
LR_MODEL_BASENAME = "model-lr.json"


def resolve_model_path(model: str | None) -> str | None:
    return model or os.environ.get(MODEL_DIR_ENV)


def build_backend(name: str, model: str | None = None,
                  endpoint: str | None = None,
                  lexicon: str | None = None) -> ClassifierBackend:
    name = name.lower()
    if name == "lexical":
        lex = load_lexicon(lexicon) if lexicon else default_lexicon()
        return LexicalBackend(lex)
    if name == "lr":
        path = resolve_model_path(model)
        if not path:
            raise ArtifactLoadError(
                "backend lr needs --model pointing at a trained model file "
                f"(or set {MODEL_DIR_ENV})")
        p = Path(path)
        if p.is_dir():
            p = p / LR_MODEL_BASENAME
        return LRBackend(load_lr_model(p))
    if name == "transformer":
        path = resolve_model_path(model)
        if not path:
            raise ArtifactLoadError(
                "backend transformer needs --model pointing at an artifacts "
                f"directory (or set {MODEL_DIR_ENV})")
        return TransformerBackend(load_artifacts(path))
    if name == "remote":
        return RemoteBackend(endpoint or DEFAULT_ENDPOINT)
    raise ValueError(
        f"unknown backend {name!r}, expected one of {', '.join(BACKEND_NAMES)}")
