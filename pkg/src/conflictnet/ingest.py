"""Event ingestion: CSV parsing, actor canonicalization, and filtering.

Input files follow the ACLED column conventions but every column name is
remappable, because the headers have shifted between dataset versions.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .errors import EmptyName, MalformedHeader, SchemaMismatch

SCHEMA_VERSION = "1"

#: Closed set of actor categories.
CATEGORIES = frozenset(
    {"government", "rebels", "militias", "civilians", "islamists", "external"}
)

DEFAULT_FALLBACK_CATEGORY = "militias"

#: Day-first textual date, e.g. "12 January 2014".
DEFAULT_DATE_FORMAT = "%d %B %Y"


class EventType(Enum):
    BATTLE_NO_CHANGE = "battle_no_change"
    BATTLE_NON_STATE_OVERTAKES = "battle_non_state_overtakes"
    BATTLE_GOVERNMENT_REGAINS = "battle_government_regains"
    RIOTS_PROTESTS = "riots_protests"
    VIOLENCE_AGAINST_CIVILIANS = "violence_against_civilians"
    REMOTE_VIOLENCE = "remote_violence"
    OTHER = "other"

    @classmethod
    def from_label(cls, label: str) -> "EventType":
        """Map a raw event-type label to a variant; unknown labels become OTHER."""
        return _EVENT_TYPE_LABELS.get(_normalize_label(label), cls.OTHER)


#: All variants that denote a violent event (everything but OTHER).
VIOLENT_TYPES = frozenset(t for t in EventType if t is not EventType.OTHER)


def _normalize_label(label: str) -> str:
    # En/em dashes and slashes appear interchangeably across dataset exports.
    text = label.lower().replace("–", " ").replace("—", " ")
    text = re.sub(r"[-/_]", " ", text)
    text = re.sub(r"\s+", " ", text).strip()
    return text


_EVENT_TYPE_LABELS = {}
for _labels, _variant in [
    (["battle no change of territory", "battles"], EventType.BATTLE_NO_CHANGE),
    (
        ["battle non state actor overtakes territory"],
        EventType.BATTLE_NON_STATE_OVERTAKES,
    ),
    (["battle government regains territory"], EventType.BATTLE_GOVERNMENT_REGAINS),
    (["riots protests", "riots and protests", "riots", "protests"],
     EventType.RIOTS_PROTESTS),
    (["violence against civilians"], EventType.VIOLENCE_AGAINST_CIVILIANS),
    (["remote violence", "explosions remote violence"], EventType.REMOTE_VIOLENCE),
]:
    for _label in _labels:
        _EVENT_TYPE_LABELS[_label] = _variant
del _labels, _variant, _label


@dataclass(frozen=True)
class EventRecord:
    """One violent incident.

    The four actor slots follow the source convention: ``actor_a`` is the
    attacker, ``actor_b`` an ally joining the attack, ``actor_c`` the target,
    and ``actor_d`` an ally of the target (possibly a secondary target).
    Records with unusable coordinates keep ``latitude``/``longitude`` as None
    and are skipped by the geographic pipeline only.
    """

    id: str
    date: dt.date
    event_type: EventType
    country: str
    latitude: Optional[float]
    longitude: Optional[float]
    actor_a: Optional[str]
    actor_b: Optional[str]
    actor_c: Optional[str]
    actor_d: Optional[str]
    fatalities: int

    @property
    def has_location(self) -> bool:
        return self.latitude is not None and self.longitude is not None

    @property
    def actors(self) -> tuple:
        """The non-empty actor slots, in slot order."""
        return tuple(
            a for a in (self.actor_a, self.actor_b, self.actor_c, self.actor_d) if a
        )


@dataclass(frozen=True)
class RowError:
    """A data row that could not be turned into an EventRecord."""

    row: int  # 1-based index of the data row (header excluded)
    reason: str


def _normalize_name(raw: str) -> str:
    return re.sub(r"\s+", " ", raw).strip()


class ActorCatalog:
    """Canonical actor names, their aliases, and their categories.

    Lookups are case-insensitive and whitespace-normalized. Names absent from
    the catalog stay as their own canonical id and get ``fallback_category``,
    so graph construction never silently drops a node.
    """

    def __init__(self, entries=None, fallback_category=DEFAULT_FALLBACK_CATEGORY):
        if fallback_category not in CATEGORIES:
            raise ValueError(f"unknown fallback category {fallback_category!r}")
        self.fallback_category = fallback_category
        self.entries: dict[str, dict] = {}
        self._lookup: dict[str, str] = {}
        for name, entry in (entries or {}).items():
            self.add(name, entry.get("aliases", ()), entry["category"])

    def add(self, canonical: str, aliases: Iterable[str], category: str):
        canonical = _normalize_name(canonical)
        if category not in CATEGORIES:
            raise ValueError(f"unknown category {category!r} for {canonical!r}")
        aliases = [_normalize_name(a) for a in aliases]
        for key in [canonical.casefold()] + [a.casefold() for a in aliases]:
            owner = self._lookup.get(key)
            if owner is not None and owner != canonical:
                raise ValueError(f"alias {key!r} already assigned to {owner!r}")
            self._lookup[key] = canonical
        self.entries[canonical] = {"aliases": aliases, "category": category}

    def resolve(self, raw_name: str) -> tuple[str, str]:
        """Return (canonical id, category) for a raw actor name."""
        name = _normalize_name(raw_name)
        if not name:
            raise EmptyName("actor name is empty after trimming")
        canonical = self._lookup.get(name.casefold())
        if canonical is None:
            return name, self.fallback_category
        return canonical, self.entries[canonical]["category"]

    def category_of(self, actor_id: str) -> str:
        canonical = self._lookup.get(_normalize_name(actor_id).casefold())
        if canonical is None:
            return self.fallback_category
        return self.entries[canonical]["category"]

    @classmethod
    def from_json(cls, text: str) -> "ActorCatalog":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise SchemaMismatch(
                f"catalog schema_version {doc.get('schema_version')!r}, "
                f"expected {SCHEMA_VERSION!r}"
            )
        return cls(
            doc.get("entries", {}),
            doc.get("fallback_category", DEFAULT_FALLBACK_CATEGORY),
        )

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "fallback_category": self.fallback_category,
            "entries": self.entries,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def canonicalize_actor(raw_name: str, catalog: ActorCatalog) -> str:
    """Canonical id for a raw actor name (see ActorCatalog.resolve)."""
    return catalog.resolve(raw_name)[0]


#: Logical fields every mapping must provide.
REQUIRED_FIELDS = (
    "id",
    "date",
    "event_type",
    "country",
    "latitude",
    "longitude",
    "actor_a",
    "actor_c",
    "fatalities",
)
#: Ally columns are the ones that moved across dataset versions; optional.
OPTIONAL_FIELDS = ("actor_b", "actor_d")


@dataclass
class ColumnMapping:
    """Logical field -> CSV header, plus the date format of the file."""

    columns: dict = field(default_factory=dict)
    date_format: str = DEFAULT_DATE_FORMAT

    def __post_init__(self):
        missing = [f for f in REQUIRED_FIELDS if f not in self.columns]
        if missing:
            raise ValueError(f"mapping lacks logical fields: {', '.join(missing)}")
        unknown = [
            f for f in self.columns if f not in REQUIRED_FIELDS + OPTIONAL_FIELDS
        ]
        if unknown:
            raise ValueError(f"mapping has unknown logical fields: {', '.join(unknown)}")

    @classmethod
    def acled_v5(cls) -> "ColumnMapping":
        return cls(
            columns={
                "id": "EVENT_ID_CNTY",
                "date": "EVENT_DATE",
                "event_type": "EVENT_TYPE",
                "country": "COUNTRY",
                "latitude": "LATITUDE",
                "longitude": "LONGITUDE",
                "actor_a": "ACTOR1",
                "actor_b": "ALLY_ACTOR_1",
                "actor_c": "ACTOR2",
                "actor_d": "ALLY_ACTOR_2",
                "fatalities": "FATALITIES",
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ColumnMapping":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise SchemaMismatch(
                f"mapping schema_version {doc.get('schema_version')!r}, "
                f"expected {SCHEMA_VERSION!r}"
            )
        return cls(
            columns=doc["columns"],
            date_format=doc.get("date_format", DEFAULT_DATE_FORMAT),
        )

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "columns": self.columns,
            "date_format": self.date_format,
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def validate_header(self, header: Iterable[str]):
        present = set(header)
        for logical, column in sorted(self.columns.items()):
            if column not in present:
                raise MalformedHeader(
                    f"mapped column {column!r} (field {logical!r}) not in header"
                )


def _parse_coordinate(value: str, lo: float, hi: float) -> Optional[float]:
    try:
        x = float(value)
    except (TypeError, ValueError):
        return None
    if not (lo <= x <= hi):
        return None
    return x


def _parse_fatalities(value: str) -> int:
    value = (value or "").strip()
    if not value:
        return 0
    n = float(value)
    if not n.is_integer() or n < 0:
        raise ValueError(f"bad fatality count {value!r}")
    return int(n)


def parse_events(
    csv_text: str, mapping: ColumnMapping, catalog: ActorCatalog
) -> tuple[list[EventRecord], list[RowError]]:
    """Parse CSV text into event records plus per-row errors.

    A row must carry a parseable date and a non-empty attacker; anything else
    degrades gracefully (unknown event types become OTHER, unusable
    coordinates flag the record location-less, empty fatalities count as 0).
    Every data row lands in exactly one of the two output lists.
    """
    reader = csv.DictReader(io.StringIO(csv_text))
    if reader.fieldnames is None:
        return [], []
    mapping.validate_header(reader.fieldnames)
    col = mapping.columns

    def cell(row, logical):
        name = col.get(logical)
        return (row.get(name) or "").strip() if name else ""

    records: list[EventRecord] = []
    errors: list[RowError] = []
    for i, row in enumerate(reader, start=1):
        try:
            date = dt.datetime.strptime(cell(row, "date"), mapping.date_format).date()
        except ValueError:
            errors.append(RowError(i, f"unparseable date {cell(row, 'date')!r}"))
            continue
        if not cell(row, "actor_a"):
            errors.append(RowError(i, "missing actor_a"))
            continue
        try:
            fatalities = _parse_fatalities(cell(row, "fatalities"))
        except ValueError as exc:
            errors.append(RowError(i, str(exc)))
            continue

        lat = _parse_coordinate(cell(row, "latitude"), -90.0, 90.0)
        lon = _parse_coordinate(cell(row, "longitude"), -180.0, 180.0)
        if lat is None or lon is None:
            lat = lon = None

        def actor(logical):
            raw = cell(row, logical)
            return canonicalize_actor(raw, catalog) if raw else None

        records.append(
            EventRecord(
                id=cell(row, "id") or str(i),
                date=date,
                event_type=EventType.from_label(cell(row, "event_type")),
                country=cell(row, "country"),
                latitude=lat,
                longitude=lon,
                actor_a=actor("actor_a"),
                actor_b=actor("actor_b"),
                actor_c=actor("actor_c"),
                actor_d=actor("actor_d"),
                fatalities=fatalities,
            )
        )
    return records, errors


def events_to_json(events: Iterable[EventRecord], **extra) -> str:
    """Normalized events as a JSON artifact (stable key order)."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        **extra,
        "events": [
            {
                "id": e.id,
                "date": e.date.isoformat(),
                "event_type": e.event_type.value,
                "country": e.country,
                "latitude": e.latitude,
                "longitude": e.longitude,
                "actor_a": e.actor_a,
                "actor_b": e.actor_b,
                "actor_c": e.actor_c,
                "actor_d": e.actor_d,
                "fatalities": e.fatalities,
            }
            for e in events
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def events_from_json(text: str) -> list[EventRecord]:
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"events schema_version {doc.get('schema_version')!r}, "
            f"expected {SCHEMA_VERSION!r}"
        )
    return [
        EventRecord(
            id=e["id"],
            date=dt.date.fromisoformat(e["date"]),
            event_type=EventType(e["event_type"]),
            country=e["country"],
            latitude=e["latitude"],
            longitude=e["longitude"],
            actor_a=e["actor_a"],
            actor_b=e["actor_b"],
            actor_c=e["actor_c"],
            actor_d=e["actor_d"],
            fatalities=e["fatalities"],
        )
        for e in doc["events"]
    ]


def row_errors_csv(errors: Iterable[RowError]) -> str:
    lines = ["row,reason"]
    for err in errors:
        reason = err.reason.replace('"', '""')
        lines.append(f'{err.row},"{reason}"')
    return "\n".join(lines) + "\n"


def filter_events(
    events: Iterable[EventRecord],
    types: Iterable[EventType],
    actors: Optional[Iterable[str]] = None,
    date_range: Optional[tuple[Optional[dt.date], Optional[dt.date]]] = None,
    countries: Optional[Iterable[str]] = None,
) -> list[EventRecord]:
    """Keep events matching every given constraint, preserving input order.

    ``actors`` matches if any of the four slots is in the set; ``date_range``
    bounds are inclusive and either end may be None.
    """
    types = frozenset(types)
    actors = frozenset(actors) if actors is not None else None
    countries = frozenset(countries) if countries is not None else None
    start, end = date_range if date_range is not None else (None, None)

    kept = []
    for ev in events:
        if ev.event_type not in types:
            continue
        if actors is not None and not actors.intersection(ev.actors):
            continue
        if start is not None and ev.date < start:
            continue
        if end is not None and ev.date > end:
            continue
        if countries is not None and ev.country not in countries:
            continue
        kept.append(ev)
    return kept
