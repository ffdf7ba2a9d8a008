import warnings
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from score_graphs.errors import DroppedElement, EmptyInput, MalformedFile, UnmatchedNoteOn, UnsupportedFeature
from score_graphs.ingest import (
    Event,
    TimedNote,
    Timeline,
    accumulate_weights,
    chordify,
    load_score,
    measure_grid,
    parse_midi,
    parse_musicxml,
    read_midi,
    read_musicxml,
)

from conftest import BACH, FIXTURES
from scorefab import midi, musicxml


def test_single_whole_note():
    raw = musicxml([[[("C4", 4)]]])
    assert parse_musicxml(raw) == [TimedNote(F(0), F(4), 60, 0)]


def test_tie_across_barline_is_merged():
    raw = musicxml([[[("r", 2), ("G4", 2, "tie")], [("G4", 2), ("r", 2)]]])
    assert parse_musicxml(raw) == [TimedNote(F(2), F(4), 67, 0)]


def test_tie_merges_full_span():
    raw = musicxml([[[("G4", 4, "tie")], [("G4", 4)]]])
    (note,) = parse_musicxml(raw)
    assert (note.duration, note.pitch) == (8, 67)


def test_chord_flag_shares_onset():
    raw = musicxml([[[(("C4", "E4", "G4"), 2), ("D4", 2)]]])
    notes = parse_musicxml(raw)
    assert [(n.onset, n.pitch) for n in notes] == [(0, 60), (0, 64), (0, 67), (2, 62)]


def test_backup_and_forward():
    xml = b"""<score-partwise><part-list/><part id="P1"><measure number="1">
      <attributes><divisions>2</divisions></attributes>
      <note><pitch><step>C</step><octave>5</octave></pitch><duration>8</duration></note>
      <backup><duration>8</duration></backup>
      <forward><duration>4</duration></forward>
      <note><pitch><step>E</step><alter>-1</alter><octave>4</octave></pitch><duration>4</duration></note>
    </measure></part></score-partwise>"""
    score = read_musicxml(xml)
    assert [(n.onset, n.duration, n.pitch) for n in score.notes] == [(0, 4, 72), (2, 2, 63)]
    assert score.total_duration_qL == 4


def test_grace_note_skipped_with_warning():
    xml = b"""<score-partwise><part-list/><part id="P1"><measure number="1">
      <attributes><divisions>1</divisions></attributes>
      <note><grace/><pitch><step>D</step><octave>4</octave></pitch></note>
      <note><pitch><step>C</step><octave>4</octave></pitch><duration>4</duration></note>
    </measure></part></score-partwise>"""
    with pytest.warns(DroppedElement):
        notes = parse_musicxml(xml)
    assert [n.pitch for n in notes] == [60]


def test_rests_produce_no_notes_but_advance_time():
    raw = musicxml([[[("r", 1), ("C4", 1), ("r", 2)]]])
    score = read_musicxml(raw)
    assert [(n.onset, n.duration) for n in score.notes] == [(1, 1)]
    assert score.total_duration_qL == 4


def test_measure_onsets_from_musicxml():
    score = read_musicxml(BACH.read_bytes())
    assert score.measure_onsets == {m: F(4 * (m - 1)) for m in range(1, 9)}
    assert score.total_duration_qL == 32


def test_malformed_xml():
    with pytest.raises(MalformedFile):
        parse_musicxml(b"<score-partwise><part>")


def test_wrong_root():
    with pytest.raises(MalformedFile):
        parse_musicxml(b"<html/>")


@pytest.mark.parametrize(
    "snippet, element",
    [
        (b"<note><unpitched><display-step>C</display-step></unpitched><duration>1</duration></note>", "unpitched"),
        (b"<mystery/>", "mystery"),
        (b"<note><pitch><step>C</step><alter>0.5</alter><octave>4</octave></pitch><duration>1</duration></note>", "alter"),
    ],
)
def test_unsupported_feature_names_element(snippet, element):
    xml = b'<score-partwise><part-list/><part id="P1"><measure number="1">' + snippet + b"</measure></part></score-partwise>"
    with pytest.raises(UnsupportedFeature) as info:
        parse_musicxml(xml)
    assert info.value.element == element


def test_timewise_rejected():
    with pytest.raises(UnsupportedFeature):
        parse_musicxml(b"<score-timewise/>")


# MIDI


def test_midi_single_note():
    assert parse_midi(midi([(0, 1, 60, 1)])) == [TimedNote(F(0), F(1), 60, 1)]


def test_midi_simultaneous_notes():
    notes = parse_midi(midi([(0, 2, 60, 1), (0, 2, 64, 1)]))
    assert [(n.onset, n.duration) for n in notes] == [(0, 2), (0, 2)]
    assert {n.pitch for n in notes} == {60, 64}


def test_midi_overlap_then_chordify_three_events():
    notes = parse_midi(midi([(0, 2, 60, 1), (1, 2, 64, 1)]))
    assert len(notes) == 2
    assert len(chordify(notes).events) == 3


def test_midi_running_status_and_velocity_zero_off():
    # note-on with velocity 0 acts as note-off; running status omits repeated status bytes
    body = bytes([0x00, 0x90, 60, 100, 0x83, 0x60, 60, 0, 0x00, 0xFF, 0x2F, 0x00])
    raw = b"MThd" + (6).to_bytes(4, "big") + bytes([0, 0, 0, 1, 0x01, 0xE0])
    raw += b"MTrk" + len(body).to_bytes(4, "big") + body
    assert parse_midi(raw) == [TimedNote(F(0), F(1), 60, 0)]


def test_midi_running_status_writer():
    notes = parse_midi(midi([(0, 1, 60, 1), (1, 1, 62, 1)], running_status=True))
    assert [(n.onset, n.pitch) for n in notes] == [(0, 60), (1, 62)]


def test_midi_dangling_note_on_is_truncated_with_warning():
    raw = midi([(0, 1, 60, 1), (1, None, 64, 1)], end_padding=960)
    with pytest.warns(UnmatchedNoteOn):
        notes = parse_midi(raw)
    assert notes[-1] == TimedNote(F(1), F(2), 64, 1)


def test_midi_time_signature_gives_measures():
    score = read_midi(midi([(0, 6, 60, 1)], time_signature=(3, 4)))
    assert score.measure_onsets == {1: 0, 2: 3}


def test_midi_default_four_four():
    assert measure_grid(F(9)) == {1: 0, 2: 4, 3: 8}


@pytest.mark.parametrize("raw", [b"", b"MThd\x00\x00\x00\x06\x00", b"RIFF....", b"MThd" + (6).to_bytes(4, "big") + bytes(6) + b"MTrk\x00\x00\x00\x09\x00\x90"])
def test_midi_malformed(raw):
    with pytest.raises(MalformedFile):
        parse_midi(raw)


def test_midi_format_two_unsupported():
    raw = b"MThd" + (6).to_bytes(4, "big") + bytes([0, 2, 0, 0, 0x01, 0xE0])
    with pytest.raises(UnsupportedFeature):
        parse_midi(raw)


def test_load_score_dispatch():
    assert len(load_score(FIXTURES / "outer_voices.mid").notes) > 0
    assert len(load_score(BACH).notes) > 0


# chordify


def test_chordify_single_note():
    tl = chordify([TimedNote(F(0), F(4), 60)])
    assert tl.events == (Event(F(0), F(4), (0,)),)


def test_chordify_overlap_enumeration():
    tl = chordify([TimedNote(F(0), F(2), 60), TimedNote(F(1), F(2), 64)])
    assert [(e.pitch_classes, e.onset, e.offset) for e in tl.events] == [
        ((0,), 0, 1),
        ((0, 4), 1, 2),
        ((4,), 2, 3),
    ]


def test_chordify_rest_gap_produces_no_event():
    tl = chordify([TimedNote(F(0), F(1), 60), TimedNote(F(2), F(1), 62)])
    assert [e.onset for e in tl.events] == [0, 2]


def test_chordify_octaves_collapse_and_reattack_kept():
    tl = chordify([TimedNote(F(0), F(1), 60), TimedNote(F(0), F(2), 72), TimedNote(F(1), F(1), 48)])
    assert [e.pitch_classes for e in tl.events] == [(0,), (0,)]


def test_chordify_empty():
    with pytest.raises(EmptyInput):
        chordify([])


def test_bach_fixture_has_34_events(bach_bytes):
    assert len(chordify(parse_musicxml(bach_bytes)).events) == 34


# weights


def test_accumulate_two_events_same_chord():
    tl = Timeline((Event(F(0), F(1), (0, 4)), Event(F(1), F(2), (0, 4))))
    stats = accumulate_weights(tl)
    assert stats.chord_stats == {(0, 4): (3, 2)}
    assert stats.rhythm_stats == {1: 1, 2: 1}
    assert stats.pc_stats == {0: (3, 2), 4: (3, 2)}
    assert stats.chord_rhythm_counts == {((0, 4), F(1)): 1, ((0, 4), F(2)): 1}


def test_accumulate_single_event():
    stats = accumulate_weights(Timeline((Event(F(0), F(3, 2), (2, 7)),)))
    assert stats.chord_stats == {(2, 7): (F(3, 2), 1)}
    assert stats.pc_stats == {2: (F(3, 2), 1), 7: (F(3, 2), 1)}
    assert stats.rhythm_stats == {F(3, 2): 1}


def test_accumulate_empty():
    with pytest.raises(EmptyInput):
        accumulate_weights(Timeline(()))


def test_invalid_event_rejected():
    with pytest.raises(ValueError):
        Event(F(0), F(1), (4, 0))
    with pytest.raises(ValueError):
        Event(F(0), F(0), (0,))
    with pytest.raises(ValueError):
        TimedNote(F(0), F(-1), 60)


notes_strategy = st.lists(
    st.builds(
        lambda on, d, p, part: TimedNote(F(on, 4), F(d, 4), p, part),
        st.integers(0, 40),
        st.integers(1, 16),
        st.integers(36, 84),
        st.integers(0, 3),
    ),
    min_size=1,
    max_size=25,
)


@settings(max_examples=150, deadline=None)
@given(notes_strategy)
def test_chordify_properties(notes):
    tl = chordify(notes)
    stats = accumulate_weights(tl)
    # conservation
    assert sum(e.duration_qL for e in tl.events) == stats.total_duration
    assert stats.event_count == len(tl.events)
    # pitch classes in events and stats agree
    assert {pc for e in tl.events for pc in e.pitch_classes} == set(stats.pc_stats)
    # sounding time is covered exactly: union of note intervals
    covered = sum(e.duration_qL for e in tl.events)
    spans = sorted((n.onset, n.offset) for n in notes)
    union, (lo, hi) = F(0), spans[0]
    for a, b in spans[1:]:
        if a > hi:
            union += hi - lo
            lo, hi = a, b
        else:
            hi = max(hi, b)
    assert covered == union + hi - lo
    # re-slicing the slices (one note per pitch class per event) is a fixed point
    resliced = chordify(
        TimedNote(e.onset, e.duration_qL, 60 + pc) for e in tl.events for pc in e.pitch_classes
    )
    assert resliced.events == tl.events
