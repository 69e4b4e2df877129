"""
qtemporal - Span artifact store.

Spans are addressed by the hash of their recipe and persisted as .npz
files: little-endian float64 `vectors` plus UTF-8 JSON `metadata` bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from threading import Lock

import numpy as np
from pydantic import ValidationError

from qtemporal.core.config import get_settings
from qtemporal.core.errors import SpanNotSaturatedError
from qtemporal.realizations.span import SPAN_FORMAT_VERSION, SpanBasis, SpanMetadata, SpanRecipe, build_span
from qtemporal.runlog.tracker import track_event


def save_span(span: SpanBasis, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    metadata = json.dumps(span.metadata.model_dump(), sort_keys=True).encode("utf-8")
    with open(path, "wb") as handle:
        np.savez(
            handle,
            vectors=np.ascontiguousarray(span.vectors, dtype="<f8"),
            metadata=np.frombuffer(metadata, dtype=np.uint8),
        )


def load_span(path: Path) -> SpanBasis:
    with np.load(path, allow_pickle=False) as archive:
        vectors = np.array(archive["vectors"], dtype=float)
        raw = archive["metadata"].tobytes().decode("utf-8")
    try:
        metadata = SpanMetadata.model_validate_json(raw)
    except ValidationError as exc:
        raise ValueError(f"{path}: malformed span metadata") from exc
    if metadata.format_version != SPAN_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported span format_version {metadata.format_version}")
    if vectors.shape != (metadata.rank, metadata.ambient_dim):
        raise ValueError(f"{path}: vectors {vectors.shape} disagree with metadata")
    return SpanBasis(vectors=vectors, metadata=metadata)


class SpanStore:
    def __init__(self, root: Path | None = None) -> None:
        self._root = root
        self._cache: dict[str, SpanBasis] = {}
        self._lock = Lock()

    def get_root(self) -> Path:
        return self._root or get_settings().span_cache_dir

    def set_root(self, root: Path) -> None:
        with self._lock:
            self._root = root
            self._cache.clear()

    def path_for(self, span_id: str) -> Path:
        return self.get_root() / f"{span_id}.npz"

    def get(self, recipe: SpanRecipe) -> SpanBasis | None:
        span_id = recipe.span_id()
        with self._lock:
            if span_id in self._cache:
                return self._cache[span_id]
            path = self.path_for(span_id)
            if not path.exists():
                return None
            span = load_span(path)
            self._cache[span_id] = span
        track_event(action="span_loaded", span_id=span_id, payload={"rank": span.rank, "path": str(path)})
        return span

    def put(self, span: SpanBasis) -> Path:
        path = self.path_for(span.span_id)
        with self._lock:
            save_span(span, path)
            self._cache[span.span_id] = span
        return path

    def get_or_build(self, recipe: SpanRecipe) -> SpanBasis:
        span = self.get(recipe)
        if span is None:
            span = build_span(recipe, strict=False)
            path = self.put(span)
            track_event(
                action="span_built",
                span_id=span.span_id,
                seed=recipe.seed,
                payload={
                    "rank": span.rank,
                    "ambient_dim": span.ambient_dim,
                    "samples": span.metadata.samples,
                    "rank_trace": span.metadata.rank_trace,
                    "path": str(path),
                },
            )
        if not span.metadata.saturated:
            raise SpanNotSaturatedError(
                f"Span {span.span_id} is not saturated (rank trace {span.metadata.rank_trace})"
            )
        return span


span_store = SpanStore()
