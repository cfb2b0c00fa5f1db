"""Prompt rendering for every variant, plus prompt+document assembly.

Six variants, ordered by how much information the prompt carries:

  role            a natural question about one role
  mrole           clause template over every role of one event
  mrole-ceiling   mrole with gold clues for every non-target role
  mevent          concatenated per-event templates for the whole document
  mevent-ceiling  mevent with gold clues everywhere except the target slot
  prompt-testing  the role question with the target's gold answer appended

Template wording, the "[none]" placeholder, the "; " clause separator and
the " | " event separator are fixed here and snapshot-tested; changing any
of them changes the experiment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .corpus import Document, EventInstance, Span, TriggerMention
from .errors import UsageError
from .ontology import Ontology

PLACEHOLDER = "[none]"
CLAUSE_SEP = "; "
EVENT_SEP = " | "
TRIGGER_OPEN = "<t>"
TRIGGER_CLOSE = "</t>"


class PromptVariant(str, Enum):
    ROLE = "role"
    MROLE = "mrole"
    MROLE_CEILING = "mrole-ceiling"
    MEVENT = "mevent"
    MEVENT_CEILING = "mevent-ceiling"
    PROMPT_TESTING = "prompt-testing"

    @classmethod
    def parse(cls, value: "PromptVariant | str") -> "PromptVariant":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise UsageError(
                f"unknown prompt variant {value!r}; expected one of "
                f"{[v.value for v in cls]}"
            ) from None

    @property
    def is_ceiling(self) -> bool:
        return self in (PromptVariant.MROLE_CEILING, PromptVariant.MEVENT_CEILING)

    @property
    def is_multi_event(self) -> bool:
        return self in (PromptVariant.MEVENT, PromptVariant.MEVENT_CEILING)


class TriggerMarking(str, Enum):
    SEGMENT = "segment"
    MARKERS = "markers"
    INPROMPT = "inprompt"

    @classmethod
    def parse(cls, value: "TriggerMarking | str") -> "TriggerMarking":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise UsageError(
                f"unknown trigger marking {value!r}; expected one of "
                f"{[m.value for m in cls]}"
            ) from None


@dataclass
class ClueMap:
    """Clue text per role; roles without an entry resolve to the empty marker."""

    entries: dict[str, str] = field(default_factory=dict)

    EMPTY = ""

    def get(self, role: str) -> str:
        return self.entries.get(role, self.EMPTY)

    def is_empty(self, role: str) -> bool:
        return self.get(role) == self.EMPTY


@dataclass
class PromptText:
    """Rendered prompt with character ranges for its fill slots.

    `slots` maps role name to a half-open [start, end) character range in
    `text`; slicing a slot returns exactly the clue or placeholder that was
    inserted (for the plain question, the role mention itself).
    """

    text: str
    slots: dict[str, tuple[int, int]]
    target_role: str
    trigger_surface: str

    def slot_text(self, role: str) -> str:
        start, end = self.slots[role]
        return self.text[start:end]


class _SlotWriter:
    """Accumulates prompt text while recording slot character ranges."""

    def __init__(self):
        self.parts: list[str] = []
        self.cursor = 0
        self.slots: dict[str, tuple[int, int]] = {}

    def write(self, text: str):
        self.parts.append(text)
        self.cursor += len(text)

    def write_slot(self, role: str, fill: str):
        self.slots[role] = (self.cursor, self.cursor + len(fill))
        self.write(fill)

    def text(self) -> str:
        return "".join(self.parts)


def trigger_surface(doc: Document, trigger: TriggerMention) -> str:
    return doc.surface(trigger.span)


def build_role_question(
    target_role: str,
    trigger_surface: str,
    event_type: str,
    include_trigger: bool = False,
) -> PromptText:
    """Render the single-role question.

    The trigger surface is mentioned only when `include_trigger` is set
    (in-prompt marking); otherwise the event type anchors the question.
    """
    if not target_role:
        raise UsageError("target_role must be non-empty")
    w = _SlotWriter()
    w.write("What is the ")
    w.write_slot(target_role, target_role)
    if include_trigger:
        w.write(f" in the event triggered by '{trigger_surface}'?")
    else:
        w.write(f" in the {event_type} event?")
    return PromptText(w.text(), w.slots, target_role, trigger_surface)


def _event_prefix(w: _SlotWriter, event_type: str, surface: str):
    w.write(f"{event_type} triggered by '{surface}': ")


def _write_clauses(
    w: _SlotWriter,
    roles: list[str],
    clues: ClueMap,
    target_role: str | None,
    track_slots: bool,
):
    for i, role in enumerate(roles):
        if i:
            w.write(CLAUSE_SEP)
        w.write(f"{role} is ")
        clue = clues.get(role)
        fill = PLACEHOLDER if role == target_role or clue == ClueMap.EMPTY else clue
        if track_slots:
            w.write_slot(role, fill)
        else:
            w.write(fill)


def build_multirole_template(
    event: EventInstance,
    target_role: str,
    clues: ClueMap,
    ontology: Ontology,
    trigger_surface: str = "",
    include_trigger: bool = False,
) -> PromptText:
    """Render one clause per ontology role of the event's type.

    The target role's clause always carries the placeholder even if the
    clue map names it; non-target roles show their clue when present.
    """
    event_type = event.trigger.event_type
    ontology.check_role(event_type, target_role)
    w = _SlotWriter()
    if include_trigger:
        _event_prefix(w, event_type, trigger_surface)
    _write_clauses(w, ontology.roles_for(event_type), clues, target_role, track_slots=True)
    return PromptText(w.text(), w.slots, target_role, trigger_surface)


def build_multievent_template(
    events: list[EventInstance],
    target_event_index: int,
    target_role: str,
    clues_per_event: list[ClueMap],
    ontology: Ontology,
    trigger_surfaces: list[str],
) -> PromptText:
    """Concatenate per-event sub-templates, each prefixed by its event type
    and trigger surface.

    Only the target event's clauses are slot-tracked; its target-role
    clause is the sole forced placeholder. Other events render their clue
    maps as given.
    """
    if not 0 <= target_event_index < len(events):
        raise UsageError(
            f"target_event_index {target_event_index} out of range for {len(events)} events"
        )
    if len(clues_per_event) != len(events) or len(trigger_surfaces) != len(events):
        raise UsageError("clues_per_event and trigger_surfaces must align with events")
    target_event = events[target_event_index]
    ontology.check_role(target_event.trigger.event_type, target_role)
    w = _SlotWriter()
    for i, (event, clues, surface) in enumerate(zip(events, clues_per_event, trigger_surfaces)):
        if i:
            w.write(EVENT_SEP)
        is_target = i == target_event_index
        _event_prefix(w, event.trigger.event_type, surface)
        _write_clauses(
            w,
            ontology.roles_for(event.trigger.event_type),
            clues,
            target_role if is_target else None,
            track_slots=is_target,
        )
    return PromptText(w.text(), w.slots, target_role, trigger_surfaces[target_event_index])


def build_prompt_testing(
    event: EventInstance,
    target_role: str,
    gold_arguments: list[str],
    trigger_surface: str = "",
    include_trigger: bool = False,
) -> PromptText:
    """Role question plus a clause naming the target's gold argument text.

    This is the prompt-comprehension diagnostic: unlike the ceiling
    variants, the target's own answer appears in the prompt.
    """
    question = build_role_question(
        target_role, trigger_surface, event.trigger.event_type, include_trigger
    )
    w = _SlotWriter()
    w.write(question.text)
    w.write(f" The {target_role} is ")
    fill = ", ".join(gold_arguments) if gold_arguments else PLACEHOLDER
    w.write_slot(target_role, fill)
    w.write(".")
    return PromptText(w.text(), w.slots, target_role, trigger_surface)


def derive_clues(
    event: EventInstance,
    target_role: str,
    doc: Document,
    predicted: dict[str, list[str]] | None = None,
) -> ClueMap:
    """Fill every role except the target with its first argument surface.

    Gold arguments are used unless `predicted` supplies surfaces from a
    prior model pass. The target role's entry is always the empty marker.
    """
    entries: dict[str, str] = {}
    if predicted is None:
        for role, spans in event.arguments.items():
            if role != target_role and spans:
                entries[role] = doc.surface(spans[0])
    else:
        for role, surfaces in predicted.items():
            if role != target_role and surfaces:
                entries[role] = surfaces[0]
    entries[target_role] = ClueMap.EMPTY
    return ClueMap(entries)


def derive_clues_multi(
    events: list[EventInstance],
    target_event_index: int,
    target_role: str,
    doc: Document,
    predicted: list[dict[str, list[str]]] | None = None,
) -> list[ClueMap]:
    """Per-event clue maps for the multi-event template.

    The target event's map lacks only the target role; every other event's
    map is fully filled, including roles that share the target's name.
    """
    maps = []
    for i, event in enumerate(events):
        pred = predicted[i] if predicted is not None else None
        if i == target_event_index:
            maps.append(derive_clues(event, target_role, doc, predicted=pred))
            continue
        entries: dict[str, str] = {}
        if pred is None:
            for role, spans in event.arguments.items():
                if spans:
                    entries[role] = doc.surface(spans[0])
        else:
            for role, surfaces in pred.items():
                if surfaces:
                    entries[role] = surfaces[0]
        maps.append(ClueMap(entries))
    return maps


class IndexRemap:
    """Monotone token-index remap induced by inserting marker tokens.

    `forward` maps an original document token index to its position after
    insertion; `inverse` maps back and returns None for inserted tokens.
    """

    def __init__(self, insertions: tuple[int, ...] = ()):
        # each insertion point is an original index i: one token is
        # inserted immediately before original token i
        self.insertions = tuple(sorted(insertions))

    @property
    def is_identity(self) -> bool:
        return not self.insertions

    def forward(self, index: int) -> int:
        return index + sum(1 for p in self.insertions if p <= index)

    def inverse(self, shifted: int) -> int | None:
        lo = 0
        for offset, p in enumerate(self.insertions):
            if p + offset == shifted:
                return None
            if p + offset < shifted:
                lo = offset + 1
        return shifted - lo

    def forward_span(self, span: Span) -> Span:
        return Span(self.forward(span.start), self.forward(span.end))

    def shifted_length(self, n_original: int) -> int:
        return n_original + len(self.insertions)


@dataclass
class AssembledSequence:
    """Prompt plus (possibly marker-augmented) document tokens.

    `trigger_block` is the inclusive token range in `doc_tokens` that must
    survive windowing: the trigger itself plus any inserted markers.
    """

    prompt: PromptText
    doc_tokens: list[str]
    segment: list[int] | None
    remap: IndexRemap
    marking: TriggerMarking
    trigger_block: tuple[int, int]
    n_original: int


def assemble_input(
    prompt: PromptText,
    doc: Document,
    trigger: TriggerMention,
    marking: TriggerMarking | str,
) -> AssembledSequence:
    """Join a prompt with the document under a trigger-marking strategy.

    markers: literal <t> / </t> tokens around the trigger plus an index
    remap. segment: a 0/1 per-token vector with trigger tokens set to 1.
    inprompt: the document is untouched; the prompt must already mention
    the trigger surface.
    """
    marking = TriggerMarking.parse(marking)
    span = trigger.span
    n = len(doc.tokens)
    if span.end >= n:
        raise UsageError(f"trigger span [{span.start}, {span.end}] outside document ({n} tokens)")
    if marking is TriggerMarking.MARKERS:
        tokens = (
            doc.tokens[: span.start]
            + [TRIGGER_OPEN]
            + doc.tokens[span.start : span.end + 1]
            + [TRIGGER_CLOSE]
            + doc.tokens[span.end + 1 :]
        )
        remap = IndexRemap((span.start, span.end + 1))
        block = (span.start, span.end + 2)
        return AssembledSequence(prompt, tokens, None, remap, marking, block, n)
    if marking is TriggerMarking.SEGMENT:
        segment = [1 if span.start <= i <= span.end else 0 for i in range(n)]
        return AssembledSequence(
            prompt, list(doc.tokens), segment, IndexRemap(), marking, (span.start, span.end), n
        )
    surface = doc.surface(span)
    if surface and surface not in prompt.text:
        raise UsageError(
            "inprompt marking requires the prompt to mention the trigger surface "
            f"{surface!r}"
        )
    return AssembledSequence(
        prompt, list(doc.tokens), None, IndexRemap(), marking, (span.start, span.end), n
    )


def render_variant(
    variant: PromptVariant | str,
    doc: Document,
    events: list[EventInstance],
    event_index: int,
    target_role: str,
    ontology: Ontology,
    include_trigger: bool = False,
    clues: ClueMap | None = None,
    clues_per_event: list[ClueMap] | None = None,
) -> PromptText:
    """Build the prompt for one extraction instance under any variant.

    Ceiling variants derive gold clues themselves; explicit `clues` /
    `clues_per_event` (e.g. from a prediction pass) override the default
    empty maps of the non-ceiling variants.
    """
    variant = PromptVariant.parse(variant)
    if not 0 <= event_index < len(events):
        raise UsageError(f"event_index {event_index} out of range for {len(events)} events")
    event = events[event_index]
    surface = trigger_surface(doc, event.trigger)

    if variant is PromptVariant.ROLE:
        return build_role_question(
            target_role, surface, event.trigger.event_type, include_trigger
        )
    if variant is PromptVariant.PROMPT_TESTING:
        golds = [doc.surface(s) for s in event.arguments.get(target_role, [])]
        return build_prompt_testing(event, target_role, golds, surface, include_trigger)
    if variant is PromptVariant.MROLE or variant is PromptVariant.MROLE_CEILING:
        if variant is PromptVariant.MROLE_CEILING:
            clues = derive_clues(event, target_role, doc)
        elif clues is None:
            clues = ClueMap()
        return build_multirole_template(
            event, target_role, clues, ontology, surface, include_trigger
        )
    surfaces = [trigger_surface(doc, ev.trigger) for ev in events]
    if variant is PromptVariant.MEVENT_CEILING:
        clues_per_event = derive_clues_multi(events, event_index, target_role, doc)
    elif clues_per_event is None:
        clues_per_event = [ClueMap() for _ in events]
    return build_multievent_template(
        events, event_index, target_role, clues_per_event, ontology, surfaces
    )
