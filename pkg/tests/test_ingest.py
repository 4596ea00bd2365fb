import datetime as dt

import pytest

from conflictnet import (
    ActorCatalog,
    ColumnMapping,
    EmptyName,
    EventType,
    MalformedHeader,
    SchemaMismatch,
    VIOLENT_TYPES,
    canonicalize_actor,
    filter_events,
    parse_events,
)
from conflictnet.ingest import events_from_json, events_to_json, row_errors_csv

from conftest import FIXTURE_CSV

HEADER = (
    "EVENT_ID_CNTY,EVENT_DATE,EVENT_TYPE,COUNTRY,LATITUDE,LONGITUDE,"
    "ACTOR1,ALLY_ACTOR_1,ACTOR2,ALLY_ACTOR_2,FATALITIES"
)


def parse(text, catalog=None):
    return parse_events(text, ColumnMapping.acled_v5(), catalog or ActorCatalog())


def row(date="01 January 2012", etype="Battles", country="Mali", lat="16.0",
        lon="-1.0", a="A", b="", c="C", d="", fat="1", ident="x"):
    return f"{ident},{date},{etype},{country},{lat},{lon},{a},{b},{c},{d},{fat}"


def test_empty_body_gives_nothing():
    records, errors = parse(HEADER + "\n")
    assert records == [] and errors == []


def test_five_rows_one_missing_attacker():
    rows = [
        row(ident="1"),
        row(ident="2", a=""),
        row(ident="3"),
        row(ident="4"),
        row(ident="5"),
    ]
    records, errors = parse(HEADER + "\n" + "\n".join(rows) + "\n")
    assert len(records) == 4
    assert len(errors) == 1
    assert errors[0].row == 2
    assert "actor_a" in errors[0].reason


def test_every_row_lands_exactly_once():
    rows = [
        row(ident="1"),
        row(ident="2", date="not a date"),
        row(ident="3", fat="-2"),
        row(ident="4", a=""),
        row(ident="5", fat="2.5"),
        row(ident="6"),
    ]
    records, errors = parse(HEADER + "\n" + "\n".join(rows) + "\n")
    assert len(records) + len(errors) == 6


def test_unknown_event_type_becomes_other():
    records, _ = parse(HEADER + "\n" + row(etype="Strange happenings") + "\n")
    assert records[0].event_type is EventType.OTHER


def test_event_type_label_variants():
    # dataset exports differ in dash and slash conventions
    for label in (
        "Battle-No change of territory",
        "Battle – No change of territory",
        "battle no change of territory",
    ):
        assert EventType.from_label(label) is EventType.BATTLE_NO_CHANGE
    assert EventType.from_label("Riots/Protests") is EventType.RIOTS_PROTESTS
    assert EventType.from_label("Violence against civilians") is (
        EventType.VIOLENCE_AGAINST_CIVILIANS
    )


def test_bad_coordinates_flag_record_unlocated():
    records, errors = parse(
        HEADER + "\n" + row(lat="95.0") + "\n" + row(lon="x") + "\n" + row() + "\n"
    )
    assert not errors
    assert not records[0].has_location
    assert records[0].latitude is None and records[0].longitude is None
    assert not records[1].has_location
    assert records[2].has_location


def test_fatality_parsing():
    records, errors = parse(
        HEADER + "\n"
        + row(ident="1", fat="") + "\n"
        + row(ident="2", fat="3") + "\n"
        + row(ident="3", fat="-1") + "\n"
        + row(ident="4", fat="2.5") + "\n"
    )
    assert [r.fatalities for r in records] == [0, 3]
    assert len(errors) == 2


def test_missing_id_falls_back_to_row_index():
    records, _ = parse(HEADER + "\n" + row(ident="") + "\n")
    assert records[0].id == "1"


def test_custom_date_format():
    mapping = ColumnMapping.acled_v5()
    mapping.date_format = "%Y-%m-%d"
    records, errors = parse_events(
        HEADER + "\n" + row(date="2012-03-04") + "\n", mapping, ActorCatalog()
    )
    assert not errors
    assert records[0].date == dt.date(2012, 3, 4)


def test_header_validation():
    with pytest.raises(MalformedHeader):
        parse("EVENT_DATE,ACTOR1\n")


def test_mapping_requires_all_logical_fields():
    with pytest.raises(ValueError):
        ColumnMapping(columns={"id": "X"})
    with pytest.raises(ValueError):
        ColumnMapping(
            columns=dict(ColumnMapping.acled_v5().columns, bogus="Y")
        )


def test_mapping_json_round_trip():
    mapping = ColumnMapping.acled_v5()
    again = ColumnMapping.from_json(mapping.to_json())
    assert again.columns == mapping.columns
    assert again.date_format == mapping.date_format
    with pytest.raises(SchemaMismatch):
        ColumnMapping.from_json('{"schema_version": "99", "columns": {}}')


def test_alias_lookup_and_case_fold():
    catalog = ActorCatalog()
    catalog.add(
        "AQIM: Al Qaeda in the Islamic Maghreb", ["AQIM"], "islamists"
    )
    assert (
        canonicalize_actor("  AQIM ", catalog)
        == "AQIM: Al Qaeda in the Islamic Maghreb"
    )
    assert (
        canonicalize_actor("aqim", catalog)
        == "AQIM: Al Qaeda in the Islamic Maghreb"
    )
    assert catalog.category_of("aqim") == "islamists"


def test_unknown_actor_passes_through_with_fallback():
    catalog = ActorCatalog(fallback_category="rebels")
    name, category = catalog.resolve("Unknown Brigade X")
    assert name == "Unknown Brigade X"
    assert category == "rebels"


def test_empty_actor_name_rejected():
    with pytest.raises(EmptyName):
        ActorCatalog().resolve("   ")


def test_catalog_guards():
    catalog = ActorCatalog()
    catalog.add("Alpha", ["A"], "rebels")
    with pytest.raises(ValueError):
        catalog.add("Beta", ["A"], "rebels")  # alias already taken
    with pytest.raises(ValueError):
        catalog.add("Gamma", [], "wizards")  # no such category
    with pytest.raises(ValueError):
        ActorCatalog(fallback_category="wizards")


def test_catalog_json_round_trip():
    catalog = ActorCatalog()
    catalog.add("Alpha Front", ["Alpha", "AF"], "islamists")
    again = ActorCatalog.from_json(catalog.to_json())
    assert again.resolve("af") == ("Alpha Front", "islamists")
    with pytest.raises(SchemaMismatch):
        ActorCatalog.from_json('{"schema_version": null}')


def fixture_records():
    records, errors = parse(FIXTURE_CSV)
    assert not errors
    return records


def test_filter_identity_with_all_types():
    records = fixture_records()
    assert filter_events(records, types=set(EventType)) == records


def test_filter_by_actor_preserves_order():
    records = fixture_records()
    hits = filter_events(records, types=set(EventType), actors={"Beta Militia"})
    assert [r.id for r in hits] == ["1MLI", "3NER"]


def test_filter_idempotent():
    records = fixture_records()
    once = filter_events(records, types=VIOLENT_TYPES, countries={"Mali"})
    twice = filter_events(once, types=VIOLENT_TYPES, countries={"Mali"})
    assert once == twice


def test_filter_date_range_inclusive():
    records = fixture_records()
    hits = filter_events(
        records,
        types=set(EventType),
        date_range=(dt.date(2012, 1, 9), dt.date(2012, 2, 14)),
    )
    assert [r.id for r in hits] == ["2MLI", "3NER"]


def test_filter_violent_types_drops_riots_nothing_else():
    records = fixture_records()
    hits = filter_events(records, types=VIOLENT_TYPES)
    assert [r.id for r in hits] == ["1MLI", "2MLI", "3NER", "4NER", "5MLI", "6DZA"]
    hits = filter_events(records, types=VIOLENT_TYPES - {EventType.RIOTS_PROTESTS})
    assert "4NER" not in [r.id for r in hits]


def test_events_json_round_trip():
    records = fixture_records()
    text = events_to_json(records)
    assert events_from_json(text) == records
    with pytest.raises(SchemaMismatch):
        events_from_json('{"schema_version": "0", "events": []}')


def test_parse_is_deterministic():
    a = events_to_json(fixture_records())
    b = events_to_json(fixture_records())
    assert a == b


def test_row_errors_csv_escapes_quotes():
    _, errors = parse(HEADER + "\n" + row(date='bad "date"') + "\n")
    text = row_errors_csv(errors)
    assert text.startswith("row,reason")
    assert '""date""' in text
