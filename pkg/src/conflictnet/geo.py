"""Chronological event chains and their geospatial statistics.

Chains order one filtered event stream by date, then measure step
distances, border proximity, and per-year movement summaries of the kind
used to compare conflict theaters side by side.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import ChainTooShort, EmptyBorderSet, EmptyChain, SchemaMismatch
from .ingest import EventRecord

EARTH_RADIUS_KM = 6371.0088
DENSIFY_SPACING_KM = 1.0

SANCTUARY = "sanctuary"
MOBILITY = "mobility"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} out of range")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} out of range")


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance on the mean-radius sphere."""
    lat1, lon1 = math.radians(a.latitude), math.radians(a.longitude)
    lat2, lon2 = math.radians(b.latitude), math.radians(b.longitude)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(h))


class BorderSet:
    """Named border polylines, densified for nearest-point queries.

    Segments longer than ``spacing_km`` get intermediate vertices by linear
    interpolation in lat/lon, so min-distance-to-vertex approximates
    min-distance-to-line to within the spacing. Original vertices are kept.
    """

    def __init__(
        self,
        lines: dict[str, Sequence[GeoPoint]],
        spacing_km: float = DENSIFY_SPACING_KM,
    ):
        if not lines:
            raise EmptyBorderSet("no border lines given")
        if spacing_km <= 0:
            raise ValueError("spacing_km must be positive")
        self.names = sorted(lines)
        self._dense: dict[str, list[GeoPoint]] = {}
        for name in self.names:
            pts = list(lines[name])
            if not pts:
                raise EmptyBorderSet(f"border {name!r} has no vertices")
            self._dense[name] = _densify(pts, spacing_km)

    @classmethod
    def from_geojson(cls, text: str, spacing_km: float = DENSIFY_SPACING_KM) -> "BorderSet":
        """Read LineString / MultiLineString features; coordinates are
        GeoJSON order, longitude first. The ``countries`` property names
        the border (e.g. "Mali-Niger")."""
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"not valid JSON: {exc}") from exc
        if doc.get("type") != "FeatureCollection":
            raise SchemaMismatch("expected a FeatureCollection")
        lines: dict[str, list[GeoPoint]] = {}
        for i, feature in enumerate(doc.get("features", [])):
            geom = feature.get("geometry") or {}
            props = feature.get("properties") or {}
            name = str(props.get("countries") or props.get("name") or f"border-{i}")
            gtype = geom.get("type")
            if gtype == "LineString":
                parts = [geom.get("coordinates", [])]
            elif gtype == "MultiLineString":
                parts = geom.get("coordinates", [])
            else:
                continue
            for j, coords in enumerate(parts):
                key = name if len(parts) == 1 else f"{name}/{j}"
                lines[key] = [GeoPoint(latitude=c[1], longitude=c[0]) for c in coords]
        if not lines:
            raise EmptyBorderSet("no line features found")
        return cls(lines, spacing_km=spacing_km)

    def vertices(self, name: str) -> list[GeoPoint]:
        return list(self._dense[name])

    def distance_km(self, point: GeoPoint) -> float:
        """Distance to the nearest densified vertex of any border."""
        return min(
            haversine_km(point, v) for name in self.names for v in self._dense[name]
        )


def _densify(points: list[GeoPoint], spacing_km: float) -> list[GeoPoint]:
    out: list[GeoPoint] = [points[0]]
    for a, b in zip(points, points[1:]):
        gap = haversine_km(a, b)
        extra = max(0, math.ceil(gap / spacing_km) - 1)
        for t in range(1, extra + 1):
            f = t / (extra + 1)
            out.append(
                GeoPoint(
                    latitude=a.latitude + f * (b.latitude - a.latitude),
                    longitude=a.longitude + f * (b.longitude - a.longitude),
                )
            )
        out.append(b)
    return out


@dataclass(frozen=True)
class EventChain:
    events: list[EventRecord]  # located events, date order
    n_unlocated: int

    def __len__(self) -> int:
        return len(self.events)

    @property
    def years(self) -> list[int]:
        return sorted({e.date.year for e in self.events})


def chain_events(events: Iterable[EventRecord]) -> EventChain:
    """Date-ordered chain of the located events.

    Ordering is stable: same-day events keep their input order. Events
    without coordinates are counted but excluded from the chain. No events
    at all simply gives an empty chain.
    """
    located = []
    skipped = 0
    for e in events:
        if e.has_location:
            located.append(e)
        else:
            skipped += 1
    located.sort(key=lambda e: e.date)  # sort() is stable
    return EventChain(events=located, n_unlocated=skipped)


def distance_to_border(point: GeoPoint, borders: BorderSet) -> float:
    """Kilometers from a point to the nearest border vertex.

    With vertices densified to <= 1 km spacing, this approximates the true
    point-to-line distance to well under the table's 1 km precision.
    """
    return borders.distance_km(point)


def _point(e: EventRecord) -> GeoPoint:
    return GeoPoint(latitude=e.latitude, longitude=e.longitude)


@dataclass(frozen=True)
class YearMetrics:
    year: int
    n_events: int
    victims: int
    avg_step_km: Optional[float]
    cross_border_pct: Optional[int]
    avg_gap_days: Optional[float]
    avg_border_km: Optional[float]


def year_metrics(chain: EventChain, borders: Optional[BorderSet] = None) -> list[YearMetrics]:
    """Per-calendar-year movement summary over within-year steps.

    Steps link chronologically consecutive events of the same year. A step
    crosses a border when its endpoints carry different country labels.
    Percentages are rounded to whole numbers, gaps to one decimal; years
    with fewer than two events report None for the pairwise fields, and the
    border column is None when no border set is given.
    """
    rows = []
    for year in chain.years:
        events = [e for e in chain.events if e.date.year == year]
        n = len(events)
        victims = sum(e.fatalities for e in events)
        if n >= 2:
            steps = list(zip(events, events[1:]))
            dists = [haversine_km(_point(a), _point(b)) for a, b in steps]
            crossings = sum(1 for a, b in steps if a.country != b.country)
            gaps = [(b.date - a.date).days for a, b in steps]
            avg_step = sum(dists) / len(steps)
            cross_pct = round(100.0 * crossings / len(steps))
            avg_gap = round(sum(gaps) / len(steps), 1)
        else:
            avg_step = cross_pct = avg_gap = None
        if borders is not None:
            border_dists = [borders.distance_km(_point(e)) for e in events]
            avg_border = sum(border_dists) / n
        else:
            avg_border = None
        rows.append(
            YearMetrics(
                year=year,
                n_events=n,
                victims=victims,
                avg_step_km=avg_step,
                cross_border_pct=cross_pct,
                avg_gap_days=avg_gap,
                avg_border_km=avg_border,
            )
        )
    return rows


@dataclass(frozen=True)
class ScenarioReport:
    label: str
    medoid: GeoPoint
    concentration: float
    mean_step_km: float
    country_crossings: int


def classify_scenario(
    chain: EventChain,
    radius_km: float = 150.0,
    concentration_threshold: float = 0.6,
    step_threshold_km: float = 300.0,
) -> ScenarioReport:
    """Label a chain's movement pattern.

    The spatial medoid is the event location minimizing summed distance to
    all others (ties to the earliest). Concentration is the share of events
    within ``radius_km`` of it. A concentrated chain that still hops across
    country labels reads as cross-border sanctuary use; a dispersed chain
    with long average steps reads as long-range mobility.
    """
    if len(chain.events) < 3:
        raise ChainTooShort(f"{len(chain.events)} located events, need 3")
    points = [_point(e) for e in chain.events]
    sums = [sum(haversine_km(p, q) for q in points) for p in points]
    medoid = points[sums.index(min(sums))]
    within = sum(1 for p in points if haversine_km(medoid, p) <= radius_km)
    concentration = within / len(points)
    steps = [
        haversine_km(points[i], points[i + 1]) for i in range(len(points) - 1)
    ]
    mean_step = sum(steps) / len(steps)
    crossings = sum(
        1
        for a, b in zip(chain.events, chain.events[1:])
        if a.country != b.country
    )
    if concentration >= concentration_threshold and crossings >= 1:
        label = SANCTUARY
    elif concentration < concentration_threshold and mean_step >= step_threshold_km:
        label = MOBILITY
    else:
        label = INDETERMINATE
    return ScenarioReport(
        label=label,
        medoid=medoid,
        concentration=concentration,
        mean_step_km=mean_step,
        country_crossings=crossings,
    )


def export_chain_geojson(chain: EventChain) -> str:
    """Chain as GeoJSON: one Point per event, one dashed LineString per step.

    Steps are drawn dashed because consecutive events need not correspond
    to physical movement. Coordinates are longitude-first per the GeoJSON
    convention; a step's year is its starting event's year.
    """
    if not chain.events:
        raise EmptyChain("no located events to export")
    features = []
    for e in chain.events:
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [e.longitude, e.latitude],
                },
                "properties": {
                    "id": e.id,
                    "date": e.date.isoformat(),
                    "year": e.date.year,
                    "country": e.country,
                    "actors": list(e.actors),
                    "fatalities": e.fatalities,
                },
            }
        )
    for a, b in zip(chain.events, chain.events[1:]):
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [
                        [a.longitude, a.latitude],
                        [b.longitude, b.latitude],
                    ],
                },
                "properties": {
                    "year": a.date.year,
                    "step_km": haversine_km(_point(a), _point(b)),
                    "crosses_border": a.country != b.country,
                    "style": "dashed",
                },
            }
        )
    doc = {"type": "FeatureCollection", "features": features}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def year_metrics_csv(rows: Sequence[YearMetrics]) -> str:
    """One row per year; single-event years show a dash for pair metrics.

    The border column appears only when border distances were computed
    (i.e. a border set was supplied).
    """
    with_border = any(r.avg_border_km is not None for r in rows)
    header = ["year", "n_events", "victims", "avg_step_km", "cross_border_pct", "avg_gap_days"]
    if with_border:
        header.append("avg_border_km")
    lines = [",".join(header)]
    for r in rows:
        cells = [str(r.year), str(r.n_events), str(r.victims)]
        cells.append("-" if r.avg_step_km is None else repr(r.avg_step_km))
        cells.append("-" if r.cross_border_pct is None else str(r.cross_border_pct))
        cells.append("-" if r.avg_gap_days is None else repr(r.avg_gap_days))
        if with_border:
            cells.append("-" if r.avg_border_km is None else repr(r.avg_border_km))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
