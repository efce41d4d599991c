"""Build a ResearcherProfile from an OpenAlex-compatible works listing."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Any, Callable, Iterator

import requests

from .errors import FetchError, NotFoundError, SchemaError
from .model import Publication, ResearcherProfile

DEFAULT_BASE_URL = "https://api.openalex.org"
DEFAULT_DELAY = 0.1


@dataclass(frozen=True)
class FetchConfig:
    author_id: str
    base_url: str = DEFAULT_BASE_URL
    page_size: int = 200
    polite_email: str | None = None
    timeout: float = 30.0
    delay: float = DEFAULT_DELAY

    def __post_init__(self):
        if not self.author_id:
            raise ValueError("author_id must be non-empty")
        if not 1 <= self.page_size <= 200:
            raise ValueError(f"page_size must lie in [1, 200], got {self.page_size}")
        if self.timeout <= 0:
            raise ValueError(f"timeout must be positive, got {self.timeout}")

    @classmethod
    def from_env(cls, author_id: str, environ=None, **overrides) -> "FetchConfig":
        """Fill base URL and contact email from KZ_API_BASE_URL / KZ_POLITE_EMAIL."""
        env = os.environ if environ is None else environ
        kwargs: dict[str, Any] = {}
        if env.get("KZ_API_BASE_URL"):
            kwargs["base_url"] = env["KZ_API_BASE_URL"]
        if env.get("KZ_POLITE_EMAIL"):
            kwargs["polite_email"] = env["KZ_POLITE_EMAIL"]
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(author_id=author_id, **kwargs)


def _iter_works(payload) -> Iterator[tuple[str, Publication]]:
    if not isinstance(payload, dict) or not isinstance(payload.get("results"), list):
        raise SchemaError("works payload must be an object with a 'results' list")
    for i, work in enumerate(payload["results"]):
        if not isinstance(work, dict):
            raise SchemaError(f"results[{i}] is not an object")
        wid = str(work.get("id") or f"results[{i}]")
        year = work.get("publication_year")
        if isinstance(year, bool) or not isinstance(year, int):
            raise SchemaError(f"work {wid}: missing or non-integer publication_year ({year!r})")
        cites = work.get("cited_by_count")
        if isinstance(cites, bool) or not isinstance(cites, int):
            raise SchemaError(f"work {wid}: missing or non-integer cited_by_count ({cites!r})")
        if cites < 0:
            raise SchemaError(f"work {wid}: negative cited_by_count {cites}")
        yield wid, Publication(year, cites)


def map_works_payload(payload) -> list[Publication]:
    """One Publication per work, citations from the cumulative ``cited_by_count``."""
    return [pub for _, pub in _iter_works(payload)]


def fetch_author_profile(
    cfg: FetchConfig,
    session: requests.Session | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> ResearcherProfile:
    """Page through every work of ``cfg.author_id`` with cursor pagination.

    Works are ordered by (year, citations, work id) so repeated fetches of an
    unchanged author compare equal.
    """
    session = session or requests.Session()
    url = cfg.base_url.rstrip("/") + "/works"
    params = {"filter": f"author.id:{cfg.author_id}", "per-page": str(cfg.page_size), "cursor": "*"}
    if cfg.polite_email:
        params["mailto"] = cfg.polite_email

    works: list[tuple[str, Publication]] = []
    pages = 0
    while True:
        if pages:
            sleep(cfg.delay)
        try:
            resp = session.get(url, params=dict(params), timeout=cfg.timeout)
        except requests.RequestException as exc:
            raise FetchError(
                f"request failed after {pages} page(s): {exc}", pages_fetched=pages
            ) from exc
        if resp.status_code == 404:
            raise NotFoundError(f"author {cfg.author_id!r} not found", status=404, pages_fetched=pages)
        if resp.status_code != 200:
            raise FetchError(
                f"HTTP {resp.status_code} after {pages} page(s)", status=resp.status_code, pages_fetched=pages
            )
        try:
            payload = resp.json()
        except ValueError:
            raise SchemaError(f"page {pages + 1}: response body is not JSON") from None
        works.extend(_iter_works(payload))
        pages += 1

        meta = payload.get("meta") or {}
        cursor = meta.get("next_cursor")
        if not cursor or not payload["results"]:
            break
        params["cursor"] = cursor

    works.sort(key=lambda w: (w[1].year, w[1].citations, w[0]))
    return ResearcherProfile(cfg.author_id, tuple(pub for _, pub in works))
