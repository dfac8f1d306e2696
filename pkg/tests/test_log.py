import hashlib
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causelog.errors import ParseError, ValidationError
from causelog.log import (
    GENESIS,
    LogFile,
    append_record,
    parse_log,
    scan_chain,
    serialize_log,
    verify_chain,
)

from conftest import FIXTURES
from strategies import chained_logs


def fixture_text(name):
    return (FIXTURES / name).read_text(encoding="utf-8")


def test_uav_fixture_parses():
    f = parse_log(fixture_text("uav_pilot.log"))
    assert len(f) == 12 and f.chained
    assert [r.seq for r in f] == list(range(12))
    assert f[2].params == {"alt": "25m"}


def test_empty_log():
    f = parse_log("")
    assert len(f) == 0 and f.chained
    assert verify_chain(f).ok


def test_decreasing_timestamp_reports_line():
    text = "\n".join(json.dumps({"t": t, "comp": "a", "event": "e"}) for t in (0, 5, 3))
    with pytest.raises(ParseError) as err:
        parse_log(text)
    assert err.value.line == 3 and "decreasing" in str(err.value)


@pytest.mark.parametrize(
    "line, msg",
    [
        ('{"t":0,"comp":"a"', "malformed JSON"),
        ('{"t":0,"comp":"a"}', "missing required key 'event'"),
        ('{"t":-1,"comp":"a","event":"e"}', "non-negative"),
        ('{"t":1.5,"comp":"a","event":"e"}', "integer"),
        ('{"t":0,"comp":"","event":"e"}', "comp"),
        ('{"t":0,"comp":"a","event":"e","parent":"ghost"}', "parent 'ghost'"),
        ('{"t":0,"comp":"a","event":"e","params":{"k":1}}', "param 'k'"),
        ('[1,2]', "JSON object"),
    ],
)
def test_invalid_records(line, msg):
    with pytest.raises(ParseError, match=msg) as err:
        parse_log(line + "\n")
    assert err.value.line == 1


def test_mixed_chain_rejected():
    f = append_record(LogFile(()), 0, "a", "e")
    text = serialize_log(f) + '{"t":1,"comp":"a","event":"f"}\n'
    with pytest.raises(ParseError, match="mixed"):
        parse_log(text)


def test_append_to_empty_uses_genesis():
    f = append_record(LogFile(()), 0, "robot", "start", {"mode": "auto"})
    rec = f[0]
    expected = hashlib.sha256((GENESIS + "\n" + rec.canonical()).encode()).hexdigest()
    assert rec.h == expected
    assert rec.canonical() == '{"t":0,"comp":"robot","event":"start","params":{"mode":"auto"}}'


def test_append_two_then_verify():
    f = append_record(LogFile(()), 0, "a", "x")
    f = append_record(f, 3, "b", "y", parent="a")
    assert verify_chain(f).ok
    assert str(verify_chain(f)) == "ok: 2 records verified"


def test_append_rejects_time_travel():
    f = append_record(LogFile(()), 10, "a", "x")
    with pytest.raises(ValidationError):
        append_record(f, 5, "a", "y")


def test_append_to_unchained_rejected():
    f = parse_log('{"t":0,"comp":"a","event":"e"}\n')
    with pytest.raises(ValidationError):
        append_record(f, 1, "a", "e")
    with pytest.raises(ValidationError):
        verify_chain(f)


def test_edited_event_detected_at_its_seq():
    lines = fixture_text("uav_pilot.log").splitlines()
    obj = json.loads(lines[4])
    obj["event"] = "go_right"
    lines[4] = json.dumps(obj, separators=(",", ":"))
    f = parse_log("\n".join(lines))
    report = verify_chain(f)
    assert not report.ok and report.first_bad == 4
    assert str(report).startswith("tampered at seq 4")


def test_truncation_is_not_detected():
    lines = fixture_text("uav_pilot.log").splitlines()[:-1]
    assert verify_chain(parse_log("\n".join(lines))).ok


def test_unknown_keys_go_to_params_in_order():
    text = '{"t":0,"comp":"cam","event":"frame","params":{"a":"1"},"zeta":"z","alpha":[1,2]}\n'
    rec = parse_log(text)[0]
    assert list(rec.params.items()) == [("a", "1"), ("zeta", "z"), ("alpha", "[1,2]")]
    assert parse_log(serialize_log(parse_log(text)))[0] == rec


def test_scan_chain_reports_unreadable_line():
    data = fixture_text("roomba.log").encode()
    lines = data.split(b"\n")
    lines[3] = lines[3][:10] + b"\xff" + lines[3][11:]
    report = scan_chain(b"\n".join(lines))
    assert not report.ok and report.first_bad == 3


def test_scan_chain_needs_a_chained_record():
    with pytest.raises(ParseError):
        scan_chain("not json at all\n")


@pytest.mark.parametrize("name", ["uav_pilot.log", "uav_rogue.log", "roomba.log", "roomba_ok.log", "firing_squad.log"])
def test_fixtures_are_pristine(name):
    text = fixture_text(name)
    assert verify_chain(parse_log(text)).ok
    assert scan_chain(text).ok
    assert serialize_log(parse_log(text)) == text


# -- properties --------------------------------------------------------------


@given(chained_logs())
def test_round_trip_is_byte_identical(f):
    text = serialize_log(f)
    again = parse_log(text)
    assert again == f
    assert serialize_log(again) == text
    assert verify_chain(again).ok


@given(chained_logs(), st.data())
@settings(max_examples=200)
def test_single_byte_edit_is_detected(f, data):
    raw = serialize_log(f).encode("utf-8")
    starts = [0] + [i + 1 for i, b in enumerate(raw) if b == 0x0A][:-1]
    seq = data.draw(st.integers(0, len(f) - 1))
    end = raw.index(b"\n", starts[seq])
    pos = data.draw(st.integers(starts[seq], end - 1))
    new = data.draw(st.integers(0, 255).filter(lambda b: b != raw[pos]))
    edited = raw[:pos] + bytes([new]) + raw[pos + 1 :]
    report = scan_chain(edited)
    assert not report.ok and report.first_bad <= seq
