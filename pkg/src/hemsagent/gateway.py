"""Uniform access to text generation and sentence embedding.

Remote providers talk to an OpenAI-compatible HTTP endpoint; scripted and
toy providers are pure and deterministic so the whole agent stack runs
offline. Stop-sequence truncation is enforced gateway-side for every
provider, whatever the backend did.
"""

from __future__ import annotations

import hashlib
import os
import re
import threading
import time as time_mod
from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence

import numpy as np
import requests

from hemsagent.errors import ProviderError, ScriptExhaustedError


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    stop: tuple[str, ...] = ()
    max_tokens: int = 512
    options: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be nonempty")


class GenerationProvider(Protocol):
    def generate(self, request: GenerationRequest) -> str: ...


class EmbeddingProvider(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


def truncate_at_stops(text: str, stops: Sequence[str]) -> str:
    for stop in stops:
        cut = text.find(stop)
        if cut != -1:
            text = text[:cut]
    return text


def prompt_fingerprint(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:12]


class ScriptedGenerator:
    """Replays canned segments in order; deterministic and thread-safe.

    Constructed either with a flat sequence (one global playback order) or
    with a mapping from prompt fingerprints to per-prompt sequences.
    """

    def __init__(self, segments: Sequence[str] | Mapping[str, Sequence[str]]):
        self._lock = threading.Lock()
        if isinstance(segments, Mapping):
            self._keyed = {k: list(v) for k, v in segments.items()}
            self._queue: list[str] | None = None
        else:
            self._keyed = None
            self._queue = list(segments)
        self.prompts_seen: list[str] = []

    def generate(self, request: GenerationRequest) -> str:
        with self._lock:
            self.prompts_seen.append(request.prompt)
            if self._keyed is not None:
                key = prompt_fingerprint(request.prompt)
                queue = self._keyed.get(key)
                if not queue:
                    raise ScriptExhaustedError(f"no scripted segment for prompt {key}")
            else:
                queue = self._queue
                if not queue:
                    raise ScriptExhaustedError("scripted generator has no segments left")
            segment = queue.pop(0)
        return truncate_at_stops(segment, request.stop)


class RemoteCompletionClient:
    """OpenAI-compatible text-completion endpoint client.

    The auth token is read from an environment variable, never from config
    file contents. Transport failures retry with a linear backoff before
    surfacing as ProviderError.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        timeout: float = 60.0,
        max_retries: int = 2,
        token_env: str = "HEMSAGENT_API_TOKEN",
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.max_retries = max_retries
        self.token_env = token_env
        self._session = session or requests.Session()

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def generate(self, request: GenerationRequest) -> str:
        payload: dict[str, object] = {
            "model": self.model,
            "prompt": request.prompt,
            "max_tokens": request.max_tokens,
            "stop": list(request.stop) or None,
        }
        payload.update(request.options)
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                response = self._session.post(
                    f"{self.base_url}/v1/completions",
                    json=payload,
                    headers=self._headers(),
                    timeout=self.timeout,
                )
                response.raise_for_status()
                data = response.json()
                choices = data.get("choices") or []
                text = str(choices[0].get("text", "")) if choices else ""
                return truncate_at_stops(text, request.stop)
            except (requests.RequestException, ValueError, KeyError, IndexError) as err:
                last_error = err
                if attempt < self.max_retries:
                    time_mod.sleep(0.2 * (attempt + 1))
        raise ProviderError(
            f"generation endpoint failed after {self.max_retries + 1} attempts: {last_error}"
        )


_TOKEN_RE = re.compile(r"[a-z0-9]+")


class ToyEmbedder:
    """Hashed bag-of-words embedding: deterministic, offline, L2-normalized.

    Dimension 256 is an artifact choice for speed. Texts without any
    alphanumeric token embed to the zero vector; similarity against it is
    undefined and rejected downstream.
    """

    dimension = 256

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension)
        for token in _TOKEN_RE.findall(text.lower()):
            digest = hashlib.sha256(token.encode("utf-8")).digest()
            vec[int.from_bytes(digest[:4], "big") % self.dimension] += 1.0
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec


class RemoteEmbedder:
    """OpenAI-compatible embeddings endpoint client."""

    def __init__(
        self,
        base_url: str,
        model: str,
        dimension: int = 384,
        timeout: float = 60.0,
        max_retries: int = 2,
        token_env: str = "HEMSAGENT_API_TOKEN",
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.dimension = dimension
        self.timeout = timeout
        self.max_retries = max_retries
        self.token_env = token_env
        self._session = session or requests.Session()

    def embed(self, text: str) -> np.ndarray:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                response = self._session.post(
                    f"{self.base_url}/v1/embeddings",
                    json={"model": self.model, "input": text},
                    headers=headers,
                    timeout=self.timeout,
                )
                response.raise_for_status()
                data = response.json()
                return np.asarray(data["data"][0]["embedding"], dtype=float)
            except (requests.RequestException, ValueError, KeyError, IndexError) as err:
                last_error = err
                if attempt < self.max_retries:
                    time_mod.sleep(0.2 * (attempt + 1))
        raise ProviderError(
            f"embedding endpoint failed after {self.max_retries + 1} attempts: {last_error}"
        )
