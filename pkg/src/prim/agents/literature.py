from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import httpx

MAX_PAPERS = 4
SEARCH_URL = "https://api.semanticscholar.org/graph/v1/paper/search"


class LiteratureError(RuntimeError):
    pass


class SourceUnreachable(LiteratureError):
    pass


class QuotaExceeded(LiteratureError):
    pass


@dataclass(frozen=True)
class PaperEntry:
    title: str
    authors: list[str]
    year: int | None
    abstract: str

    @classmethod
    def from_dict(cls, d: dict) -> "PaperEntry":
        authors = [a["name"] if isinstance(a, dict) else str(a) for a in d.get("authors") or []]
        return cls(d.get("title") or "", authors, d.get("year"), d.get("abstract") or "")

    def to_dict(self) -> dict:
        return {"title": self.title, "authors": list(self.authors), "year": self.year,
                "abstract": self.abstract}


class FixtureSource:
    """Offline source: a JSON array of entry objects, returned regardless of query."""

    def __init__(self, path: str | Path):
        path = Path(path)
        self.path = path / "literature.json" if path.is_dir() else path

    def search(self, query: str, limit: int = MAX_PAPERS) -> list[PaperEntry]:
        data = json.loads(self.path.read_text(encoding="utf-8"))
        return [PaperEntry.from_dict(d) for d in data[:limit]]


class SemanticScholarSource:
    def __init__(self, url: str = SEARCH_URL, api_key: str | None = None,
                 timeout: float = 30.0, transport: httpx.BaseTransport | None = None):
        self.url = url
        key = api_key or os.environ.get("LITERATURE_API_KEY")
        self._http = httpx.Client(timeout=timeout, transport=transport,
                                  headers={"x-api-key": key} if key else {})

    def search(self, query: str, limit: int = MAX_PAPERS) -> list[PaperEntry]:
        params = {"query": query, "limit": limit, "fields": "title,authors,year,abstract"}
        try:
            resp = self._http.get(self.url, params=params)
        except httpx.TransportError as exc:
            raise SourceUnreachable(str(exc)) from exc
        if resp.status_code == 429:
            raise QuotaExceeded("literature API rate limit hit")
        if resp.status_code != 200:
            raise SourceUnreachable(f"literature API returned {resp.status_code}")
        return [PaperEntry.from_dict(d) for d in (resp.json().get("data") or [])[:limit]]


def search_literature(query: str, source) -> list[PaperEntry]:
    if not query.strip():
        raise ValueError("empty query")
    return list(source.search(query, MAX_PAPERS))[:MAX_PAPERS]
