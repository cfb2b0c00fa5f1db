"""RAMS-style corpus loading and validation.

Input is JSON lines, one document per line. The fields this loader reads
(names as in the public RAMS release; anything else on the line is ignored,
except `ent_spans` which is explicitly skipped):

    doc_key         str, unique within a split
    sentences       list of sentences, each a list of token strings
    evt_triggers    list of [start, end, [[event_type, ...], ...]]
    gold_evt_links  list of [[trig_start, trig_end], [arg_start, arg_end], role]

All offsets are document-level token indices, inclusive on both ends. Role
labels may be ontology-prefixed ("evt089arg01victim"); they are reduced to
the bare role name at load time and the raw string is kept for round trips.
The loader raises instead of guessing when a line does not match this shape.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, IntegrityError, ParseError, PathError, ValidationError

SPLITS = ("train", "dev", "test")

_ROLE_PREFIX = re.compile(r"^evt\d+arg\d+")

EXPECTED_SCHEMA = (
    "expected one JSON object per line with fields: "
    "'doc_key' (str), 'sentences' (list of lists of token strings), "
    "'evt_triggers' (list of [start, end, [[event_type, ...], ...]]), "
    "'gold_evt_links' (list of [[t_start, t_end], [a_start, a_end], role_str])"
)


def normalize_role(raw: str) -> str:
    """Reduce an ontology-prefixed role label to its bare role name."""
    return _ROLE_PREFIX.sub("", raw)


@dataclass(frozen=True, order=True)
class Span:
    """Inclusive document-level token range."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValidationError(f"bad span [{self.start}, {self.end}]")

    def __len__(self) -> int:
        return self.end - self.start + 1

    def tokens(self, doc_tokens: list[str]) -> list[str]:
        return doc_tokens[self.start : self.end + 1]


@dataclass(frozen=True)
class TriggerMention:
    span: Span
    event_type: str


@dataclass
class EventInstance:
    """One trigger-anchored event with its gold arguments grouped by role.

    `arguments` maps bare role names to spans sorted in document order;
    roles with no gold argument are absent. `raw_roles` keeps the original
    (possibly prefixed) label per bare role so serialization round-trips.
    """

    trigger: TriggerMention
    arguments: dict[str, list[Span]] = field(default_factory=dict)
    raw_roles: dict[str, str] = field(default_factory=dict)

    def raw_role(self, role: str) -> str:
        return self.raw_roles.get(role, role)


@dataclass
class Document:
    doc_key: str
    sentences: list[list[str]]
    split: str = "train"

    def __post_init__(self):
        self.tokens: list[str] = [tok for sent in self.sentences for tok in sent]

    def surface(self, span: Span) -> str:
        return " ".join(span.tokens(self.tokens))


@dataclass
class CorpusSplit:
    """Documents (possibly spanning several splits) plus their events."""

    documents: list[Document] = field(default_factory=list)
    events: dict[str, list[EventInstance]] = field(default_factory=dict)

    def __post_init__(self):
        seen: set[tuple[str, str]] = set()
        for doc in self.documents:
            key = (doc.split, doc.doc_key)
            if key in seen:
                raise ValidationError(f"duplicate doc_key {doc.doc_key!r} in split {doc.split!r}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.documents)

    def document(self, doc_key: str) -> Document:
        for doc in self.documents:
            if doc.doc_key == doc_key:
                return doc
        raise IntegrityError(f"unknown doc_key {doc_key!r}")

    def events_for(self, doc_key: str) -> list[EventInstance]:
        return self.events.get(doc_key, [])

    def subset(self, split: str) -> "CorpusSplit":
        docs = [d for d in self.documents if d.split == split]
        return CorpusSplit(docs, {d.doc_key: self.events.get(d.doc_key, []) for d in docs})

    def merge(self, other: "CorpusSplit") -> "CorpusSplit":
        events = dict(self.events)
        events.update(other.events)
        return CorpusSplit(self.documents + other.documents, events)

    def stats(self) -> dict:
        event_types: set[str] = set()
        roles: set[str] = set()
        per_split: dict[str, int] = {}
        n_events = 0
        n_args = 0
        for doc in self.documents:
            per_split[doc.split] = per_split.get(doc.split, 0) + 1
            for ev in self.events.get(doc.doc_key, []):
                n_events += 1
                event_types.add(ev.trigger.event_type)
                for role, spans in ev.arguments.items():
                    roles.add(role)
                    n_args += len(spans)
        return {
            "documents": len(self.documents),
            "documents_per_split": dict(sorted(per_split.items())),
            "events": n_events,
            "event_types": len(event_types),
            "role_types": len(roles),
            "arguments": n_args,
        }


def _require(record: dict, name: str, line_no: int):
    if name not in record:
        raise FormatError(f"line {line_no}: missing field {name!r}; {EXPECTED_SCHEMA}")
    return record[name]


def _as_span(pair, where: str) -> Span:
    if not (isinstance(pair, (list, tuple)) and len(pair) >= 2):
        raise FormatError(f"{where}: expected [start, end], got {pair!r}; {EXPECTED_SCHEMA}")
    try:
        return Span(int(pair[0]), int(pair[1]))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: non-integer span {pair!r}") from exc


def _parse_trigger(entry, where: str) -> TriggerMention:
    if not (isinstance(entry, (list, tuple)) and len(entry) >= 3):
        raise FormatError(f"{where}: expected [start, end, types], got {entry!r}; {EXPECTED_SCHEMA}")
    span = _as_span(entry[:2], where)
    types = entry[2]
    if not (isinstance(types, list) and types and isinstance(types[0], (list, tuple)) and types[0]):
        raise FormatError(f"{where}: expected non-empty [[event_type, ...]] in third slot, got {types!r}")
    return TriggerMention(span, str(types[0][0]))


def group_events(
    doc: Document,
    triggers: list[TriggerMention],
    links: list[tuple[Span, Span, str]],
) -> list[EventInstance]:
    """Group gold trigger->argument links into one EventInstance per trigger.

    Each link is (trigger span, argument span, raw role label). A link whose
    trigger span matches no trigger raises IntegrityError.
    """
    events = [EventInstance(trigger=t) for t in triggers]
    by_span = {t.span: ev for t, ev in zip(triggers, events)}
    for trig_span, arg_span, raw in links:
        ev = by_span.get(trig_span)
        if ev is None:
            raise IntegrityError(
                f"doc {doc.doc_key!r}: link references unknown trigger span "
                f"[{trig_span.start}, {trig_span.end}]"
            )
        role = normalize_role(raw)
        ev.arguments.setdefault(role, []).append(arg_span)
        ev.raw_roles.setdefault(role, raw)
    for ev in events:
        for role in ev.arguments:
            ev.arguments[role] = sorted(set(ev.arguments[role]))
    return events


def _validate_spans(doc: Document, events: list[EventInstance]):
    n = len(doc.tokens)
    for ev in events:
        spans = [ev.trigger.span] + [s for lst in ev.arguments.values() for s in lst]
        for span in spans:
            if span.end >= n:
                raise ValidationError(
                    f"doc {doc.doc_key!r}: span [{span.start}, {span.end}] "
                    f"out of bounds for {n} tokens"
                )


def infer_split(path: str | Path) -> str:
    stem = Path(path).name.lower()
    for split in SPLITS:
        if split in stem:
            return split
    return "train"


def load_rams(path: str | Path, split: str | None = None) -> CorpusSplit:
    """Load one RAMS JSON-lines file into a validated CorpusSplit."""
    path = Path(path)
    split = split or infer_split(path)
    documents: list[Document] = []
    events: dict[str, list[EventInstance]] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}: line {line_no}: malformed JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise FormatError(f"{path}: line {line_no}: not a JSON object; {EXPECTED_SCHEMA}")
            doc_key = str(_require(record, "doc_key", line_no))
            sentences = _require(record, "sentences", line_no)
            if not (isinstance(sentences, list) and all(isinstance(s, list) for s in sentences)):
                raise FormatError(f"{path}: line {line_no}: 'sentences' must be a list of token lists")
            doc = Document(doc_key, [[str(t) for t in s] for s in sentences], split)

            raw_triggers = _require(record, "evt_triggers", line_no)
            triggers = [
                _parse_trigger(entry, f"{path}: line {line_no}: evt_triggers[{i}]")
                for i, entry in enumerate(raw_triggers)
            ]
            raw_links = _require(record, "gold_evt_links", line_no)
            links = []
            for i, entry in enumerate(raw_links):
                where = f"{path}: line {line_no}: gold_evt_links[{i}]"
                if not (isinstance(entry, (list, tuple)) and len(entry) == 3):
                    raise FormatError(f"{where}: expected [trigger, argument, role]; {EXPECTED_SCHEMA}")
                links.append((_as_span(entry[0], where), _as_span(entry[1], where), str(entry[2])))

            doc_events = group_events(doc, triggers, links)
            _validate_spans(doc, doc_events)
            documents.append(doc)
            events[doc_key] = doc_events
    return CorpusSplit(documents, events)


def save_rams(corpus: CorpusSplit, path: str | Path):
    """Serialize back to the JSON-lines schema read by load_rams."""
    with open(path, "w", encoding="utf-8") as handle:
        for doc in corpus.documents:
            triggers = []
            links = []
            for ev in corpus.events.get(doc.doc_key, []):
                t = ev.trigger.span
                triggers.append([t.start, t.end, [[ev.trigger.event_type, 1.0]]])
                for role in sorted(ev.arguments):
                    for span in ev.arguments[role]:
                        links.append([[t.start, t.end], [span.start, span.end], ev.raw_role(role)])
            record = {
                "doc_key": doc.doc_key,
                "sentences": doc.sentences,
                "evt_triggers": triggers,
                "gold_evt_links": links,
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_corpus_dir(data_dir: str | Path, filenames: dict[str, str] | None = None) -> CorpusSplit:
    """Load and merge every split file found under a directory.

    Looks for <split>.jsonlines by default; `filenames` overrides per split.
    """
    data_dir = Path(data_dir)
    filenames = filenames or {s: f"{s}.jsonlines" for s in SPLITS}
    corpus = CorpusSplit()
    found = False
    for split in SPLITS:
        path = data_dir / filenames[split]
        if path.exists():
            corpus = corpus.merge(load_rams(path, split))
            found = True
    if not found:
        raise PathError(
            f"no input files found in {data_dir} "
            "(expected train.jsonlines / dev.jsonlines / test.jsonlines)"
        )
    return corpus
