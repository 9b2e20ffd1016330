"""Prompt catalog loaded from the markdown files next to this module."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping

_SLOT = re.compile(r"\{([a-z_]+)\}")


class MissingPlaceholder(KeyError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    system: str
    user: str
    required_placeholders: frozenset[str]

    def __post_init__(self):
        for name in self.required_placeholders:
            if "{" + name + "}" not in self.user:
                raise ValueError(f"{self.id}: placeholder {{{name}}} absent from user text")

    def render(self, **slots: str) -> tuple[str, str]:
        """Return (system, user) with placeholders substituted in a single pass."""
        missing = self.required_placeholders - set(slots)
        if missing:
            raise MissingPlaceholder(f"{self.id}: missing {sorted(missing)}")

        def sub(m: re.Match) -> str:
            name = m.group(1)
            return str(slots[name]) if name in self.required_placeholders else m.group(0)

        return self.system, _SLOT.sub(sub, self.user)


def _read(name: str) -> str:
    text = resources.files("prim.agents").joinpath("templates").joinpath(name).read_text(encoding="utf-8")
    return text[:-1] if text.endswith("\n") else text


@lru_cache(maxsize=None)
def catalog() -> Mapping[str, PromptTemplate]:
    index = json.loads(_read("catalog.json"))
    return {
        tid: PromptTemplate(tid, _read(f"{tid}.system.md"), _read(f"{tid}.user.md"),
                            frozenset(slots))
        for tid, slots in index.items()
    }


def get(template_id: str) -> PromptTemplate:
    return catalog()[template_id]
