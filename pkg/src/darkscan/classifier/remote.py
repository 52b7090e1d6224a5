"""Remote classification backend.

Delegates classify_batch to a running service speaking the /v1/classify
wire contract, so the pipeline can run on machines without local inference.
"""
from __future__ import annotations

from typing import Sequence

import requests

from ..errors import EndpointUnavailable, InvalidDistribution, MalformedResponse
from ..taxonomy import Category, parse_label
from .base import CategoryDistribution, ClassifierBackend


def _parse_result(entry: object) -> CategoryDistribution:
    if not isinstance(entry, dict) or "probabilities" not in entry:
        raise MalformedResponse("result entry lacks a probabilities map")
    raw = entry["probabilities"]
    if not isinstance(raw, dict):
        raise MalformedResponse("probabilities is not a map")
    probs: dict[Category, float] = {}
    for label, value in raw.items():
        try:
            probs[parse_label(label)] = float(value)
        except (TypeError, ValueError) as exc:
            raise MalformedResponse(f"bad probability for {label!r}") from exc
    try:
        return CategoryDistribution(probs)
    except InvalidDistribution as exc:
        raise MalformedResponse(str(exc)) from exc


def remote_classify(texts: Sequence[str], endpoint: str,
                    timeout: float = 30.0) -> list[CategoryDistribution]:
    url = endpoint.rstrip("/") + "/v1/classify"
    try:
        resp = requests.post(url, json={"texts": list(texts)}, timeout=timeout)
    except requests.RequestException as exc:
        raise EndpointUnavailable(f"cannot reach {url}: {exc}") from exc
    if resp.status_code != 200:
        raise EndpointUnavailable(
            f"{url} answered HTTP {resp.status_code}: {resp.text[:200]}")
    try:
        body = resp.json()
    except ValueError as exc:
        raise MalformedResponse("response body is not JSON") from exc
    results = body.get("results") if isinstance(body, dict) else None
    if not isinstance(results, list):
        raise MalformedResponse("response lacks a results list")
    if len(results) != len(texts):
        raise MalformedResponse(
            f"asked for {len(texts)} results, got {len(results)}")
    return [_parse_result(entry) for entry in results]


class RemoteBackend(ClassifierBackend):
    name = "remote"

    def __init__(self, endpoint: str, timeout: float = 30.0):
        if not endpoint:
            raise ValueError("endpoint required")
        self.endpoint = endpoint
        self.timeout = timeout

    def classify_batch(self, texts: Sequence[str]) -> list[CategoryDistribution]:
        if not texts:
            return []
        return remote_classify(texts, self.endpoint, self.timeout)
