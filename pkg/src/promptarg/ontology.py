"""Event ontology: the ordered role inventory per event type.

Two on-disk formats are accepted:

  * JSON: {"event.type": ["role1", "role2", ...], ...}
  * whitespace table: one line per event type, "event.type role1 role2 ..."
    (lines starting with '#' are skipped)

Role order is preserved exactly as given; templates render clauses in this
order, so the file is part of the experiment definition. When no ontology
file is available, `Ontology.from_corpus` derives one from gold links with
roles in alphabetical order, which keeps prompts reproducible.
"""

from __future__ import annotations

import json
from pathlib import Path

from .corpus import CorpusSplit
from .errors import FormatError, OntologyError


class Ontology:
    def __init__(self, roles_by_type: dict[str, list[str]]):
        self._roles = {etype: list(roles) for etype, roles in roles_by_type.items()}
        for etype, roles in self._roles.items():
            if len(set(roles)) != len(roles):
                raise FormatError(f"ontology: duplicate role for event type {etype!r}")

    def __contains__(self, event_type: str) -> bool:
        return event_type in self._roles

    def __eq__(self, other) -> bool:
        return isinstance(other, Ontology) and self._roles == other._roles

    @property
    def event_types(self) -> list[str]:
        return list(self._roles)

    @property
    def role_types(self) -> list[str]:
        seen: dict[str, None] = {}
        for roles in self._roles.values():
            for role in roles:
                seen[role] = None
        return list(seen)

    def roles_for(self, event_type: str) -> list[str]:
        try:
            return list(self._roles[event_type])
        except KeyError:
            raise OntologyError(f"unknown event type {event_type!r}") from None

    def check_role(self, event_type: str, role: str):
        if role not in self.roles_for(event_type):
            raise OntologyError(f"role {role!r} is not defined for event type {event_type!r}")

    @classmethod
    def from_corpus(cls, corpus: CorpusSplit) -> "Ontology":
        """Derive an ontology from observed gold arguments (roles sorted)."""
        roles: dict[str, set[str]] = {}
        for doc in corpus.documents:
            for ev in corpus.events.get(doc.doc_key, []):
                bucket = roles.setdefault(ev.trigger.event_type, set())
                bucket.update(ev.arguments)
        return cls({etype: sorted(rs) for etype, rs in sorted(roles.items())})

    @classmethod
    def load(cls, path: str | Path) -> "Ontology":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        if path.suffix == ".json":
            data = json.loads(text)
            if not isinstance(data, dict):
                raise FormatError(f"{path}: expected a JSON object mapping event type to role list")
            return cls({str(k): [str(r) for r in v] for k, v in data.items()})
        table: dict[str, list[str]] = {}
        for line_no, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise FormatError(f"{path}: line {line_no}: expected 'event_type role1 role2 ...'")
            table[parts[0]] = parts[1:]
        return cls(table)

    def save(self, path: str | Path):
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self._roles, handle, indent=2, sort_keys=True)
            handle.write("\n")
