"""Score ingestion: MusicXML / Standard MIDI parsing, chordification and
element weight accumulation.

All time values are exact ``Fraction`` quarter lengths so that slice
boundaries coming from different voices line up bit for bit.
"""

from __future__ import annotations

import struct
import warnings
import xml.etree.ElementTree as ET
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    DroppedElement,
    EmptyInput,
    MalformedFile,
    UnmatchedNoteOn,
    UnsupportedFeature,
)

STEP_TO_PC = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}


@dataclass(frozen=True, order=True)
class TimedNote:
    onset: Fraction
    duration: Fraction
    pitch: int
    part_index: int = 0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"note duration must be positive, got {self.duration}")
        if self.onset < 0:
            raise ValueError(f"note onset must be non-negative, got {self.onset}")
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"MIDI pitch out of range: {self.pitch}")

    @property
    def offset(self) -> Fraction:
        return self.onset + self.duration


@dataclass(frozen=True)
class Event:
    """One vertical slice: the pitch classes sounding between two boundaries."""

    onset: Fraction
    duration_qL: Fraction
    pitch_classes: tuple[int, ...]

    def __post_init__(self):
        if self.duration_qL <= 0:
            raise ValueError("event duration must be positive")
        pcs = self.pitch_classes
        if not pcs:
            raise ValueError("event must contain at least one pitch class")
        if any(not 0 <= pc <= 11 for pc in pcs):
            raise ValueError(f"pitch classes out of range: {pcs}")
        if any(a >= b for a, b in zip(pcs, pcs[1:])):
            raise ValueError(f"pitch classes must be strictly increasing: {pcs}")

    @property
    def offset(self) -> Fraction:
        return self.onset + self.duration_qL


@dataclass(frozen=True)
class Timeline:
    events: tuple[Event, ...]
    measure_onsets: Mapping[int, Fraction] = field(default_factory=dict)
    total_duration_qL: Fraction = Fraction(0)

    def __post_init__(self):
        for a, b in zip(self.events, self.events[1:]):
            if not (a.onset < b.onset and a.offset <= b.onset):
                raise ValueError("events must be sorted and non-overlapping")
        onsets = [self.measure_onsets[k] for k in sorted(self.measure_onsets)]
        if any(a >= b for a, b in zip(onsets, onsets[1:])):
            raise ValueError("measure onsets must be strictly increasing")

    def __len__(self) -> int:
        return len(self.events)

    @property
    def measure_numbers(self) -> list[int]:
        return sorted(self.measure_onsets)

    def measure_span(self, first: int, last: int) -> tuple[Fraction, Fraction]:
        """Time span ``[start, end)`` covered by measures ``first..last``."""
        start = self.measure_onsets[first]
        later = [self.measure_onsets[m] for m in self.measure_numbers if m > last]
        end = min(later) if later else self.total_duration_qL
        return start, end

    def clip(self, start: Fraction, end: Fraction) -> "Timeline":
        """Events overlapping ``[start, end)``, trimmed to that span."""
        clipped = []
        for ev in self.events:
            lo, hi = max(ev.onset, start), min(ev.offset, end)
            if lo < hi:
                clipped.append(Event(lo, hi - lo, ev.pitch_classes))
        measures = {m: t for m, t in self.measure_onsets.items() if start <= t < end}
        return Timeline(tuple(clipped), measures, end - start)


@dataclass(frozen=True)
class ElementStats:
    chord_stats: Mapping[tuple[int, ...], tuple[Fraction, int]]
    pc_stats: Mapping[int, tuple[Fraction, int]]
    rhythm_stats: Mapping[Fraction, int]
    chord_rhythm_counts: Mapping[tuple[tuple[int, ...], Fraction], int]

    @property
    def event_count(self) -> int:
        return sum(n for _, n in self.chord_stats.values())

    @property
    def total_duration(self) -> Fraction:
        return sum((d for d, _ in self.chord_stats.values()), Fraction(0))


@dataclass(frozen=True)
class Score:
    """Parsed notes plus the measure grid they sit on."""

    notes: tuple[TimedNote, ...]
    measure_onsets: Mapping[int, Fraction]
    total_duration_qL: Fraction

    def timeline(self) -> Timeline:
        return chordify(self.notes, self.measure_onsets, self.total_duration_qL)


# --------------------------------------------------------------------------
# MusicXML

# Elements inside <measure> that carry no timing information we need.
_IGNORED_MEASURE_CHILDREN = {
    "attributes", "direction", "barline", "print", "sound", "harmony",
    "figured-bass", "bookmark", "link", "grouping", "listening",
}
_IGNORED_NOTE_CHILDREN = {
    "type", "dot", "accidental", "stem", "notehead", "notehead-text", "staff",
    "beam", "notations", "lyric", "play", "listen", "voice", "instrument",
    "time-modification", "footnote", "level",
}


def _int_text(elem: ET.Element, tag: str) -> int | None:
    child = elem.find(tag)
    if child is None or child.text is None:
        return None
    try:
        return int(child.text.strip())
    except ValueError as exc:
        raise MalformedFile(f"<{tag}> is not an integer: {child.text!r}") from exc


def _strip_ns(root: ET.Element) -> None:
    for el in root.iter():
        if isinstance(el.tag, str) and "}" in el.tag:
            el.tag = el.tag.split("}", 1)[1]


def _pitch_number(pitch: ET.Element) -> int:
    step = (pitch.findtext("step") or "").strip()
    if step not in STEP_TO_PC:
        raise MalformedFile(f"bad pitch step {step!r}")
    alter_text = (pitch.findtext("alter") or "0").strip()
    try:
        alter = Fraction(alter_text)
    except ValueError as exc:
        raise MalformedFile(f"bad <alter> {alter_text!r}") from exc
    if alter.denominator != 1:
        raise UnsupportedFeature("alter", f"microtonal <alter> {alter_text} is not supported")
    octave = _int_text(pitch, "octave")
    if octave is None:
        raise MalformedFile("<pitch> without <octave>")
    return (octave + 1) * 12 + STEP_TO_PC[step] + int(alter)


def read_musicxml(raw_bytes: bytes) -> Score:
    """Parse an uncompressed partwise MusicXML document."""
    try:
        root = ET.fromstring(raw_bytes)
    except ET.ParseError as exc:
        raise MalformedFile(f"XML parse error: {exc}") from exc
    _strip_ns(root)
    if root.tag == "score-timewise":
        raise UnsupportedFeature("score-timewise")
    if root.tag != "score-partwise":
        raise MalformedFile(f"root element is <{root.tag}>, expected <score-partwise>")

    notes: list[TimedNote] = []
    measure_onsets: dict[int, Fraction] = {}
    total = Fraction(0)

    for part_index, part in enumerate(root.findall("part")):
        divisions = 1
        measure_start = Fraction(0)
        # open ties: pitch -> [onset, end]
        open_ties: dict[int, list[Fraction]] = {}
        for measure_number, measure in enumerate(part.findall("measure"), start=1):
            if part_index == 0:
                measure_onsets[measure_number] = measure_start
            cursor = measure_start
            furthest = measure_start
            last_onset = measure_start
            for child in measure:
                tag = child.tag
                if tag == "attributes":
                    div = _int_text(child, "divisions")
                    if div is not None:
                        if div <= 0:
                            raise MalformedFile("<divisions> must be positive")
                        divisions = div
                elif tag in ("backup", "forward"):
                    amount = _int_text(child, "duration")
                    if amount is None:
                        raise MalformedFile(f"<{tag}> without <duration>")
                    step = Fraction(amount, divisions)
                    cursor = cursor - step if tag == "backup" else cursor + step
                    if cursor < measure_start:
                        raise MalformedFile("<backup> moves before the start of the measure")
                elif tag == "note":
                    for sub in child:
                        if sub.tag in ("unpitched", "cue"):
                            raise UnsupportedFeature(sub.tag)
                        if sub.tag not in _IGNORED_NOTE_CHILDREN and sub.tag not in (
                            "pitch", "rest", "chord", "grace", "duration", "tie",
                        ):
                            raise UnsupportedFeature(sub.tag)
                    if child.find("grace") is not None:
                        warnings.warn("grace note skipped", DroppedElement, stacklevel=2)
                        continue
                    amount = _int_text(child, "duration")
                    if amount is None:
                        raise MalformedFile("<note> without <duration>")
                    dur = Fraction(amount, divisions)
                    onset = last_onset if child.find("chord") is not None else cursor
                    if child.find("chord") is None:
                        last_onset = cursor
                        cursor += dur
                    furthest = max(furthest, onset + dur)
                    if dur == 0:
                        warnings.warn("zero-duration note skipped", DroppedElement, stacklevel=2)
                        continue
                    pitch_el = child.find("pitch")
                    if child.find("rest") is not None or pitch_el is None:
                        continue
                    pitch = _pitch_number(pitch_el)
                    tie_types = {t.get("type") for t in child.findall("tie")}
                    held = open_ties.get(pitch)
                    if "stop" in tie_types and held is not None and held[1] == onset:
                        held[1] = onset + dur
                    else:
                        if held is not None:
                            notes.append(TimedNote(held[0], held[1] - held[0], pitch, part_index))
                        held = open_ties[pitch] = [onset, onset + dur]
                    if "start" not in tie_types:
                        notes.append(TimedNote(held[0], held[1] - held[0], pitch, part_index))
                        del open_ties[pitch]
                elif tag in _IGNORED_MEASURE_CHILDREN:
                    continue
                else:
                    raise UnsupportedFeature(tag)
                furthest = max(furthest, cursor)
            measure_start = furthest
        for pitch, (start, end) in sorted(open_ties.items()):
            notes.append(TimedNote(start, end - start, pitch, part_index))
        total = max(total, measure_start)

    notes.sort()
    return Score(tuple(notes), measure_onsets, total)


def parse_musicxml(raw_bytes: bytes) -> list[TimedNote]:
    return list(read_musicxml(raw_bytes).notes)


# --------------------------------------------------------------------------
# Standard MIDI File


def _read_varlen(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    for _ in range(4):
        if pos >= len(data):
            raise MalformedFile("truncated variable-length quantity")
        byte = data[pos]
        pos += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos
    raise MalformedFile("variable-length quantity longer than 4 bytes")


def _iter_chunks(data: bytes):
    pos = 0
    while pos < len(data):
        if pos + 8 > len(data):
            raise MalformedFile("truncated chunk header")
        kind, length = struct.unpack(">4sI", data[pos:pos + 8])
        body = data[pos + 8:pos + 8 + length]
        if len(body) != length:
            raise MalformedFile(f"truncated {kind!r} chunk")
        yield kind, body
        pos += 8 + length


def _parse_track(body: bytes):
    """Yield ``(absolute_tick, kind, payload)`` for the events we care about."""
    pos = 0
    tick = 0
    status = None
    while pos < len(body):
        delta, pos = _read_varlen(body, pos)
        tick += delta
        if pos >= len(body):
            raise MalformedFile("event missing after delta time")
        byte = body[pos]
        if byte == 0xFF:
            if pos + 2 > len(body):
                raise MalformedFile("truncated meta event")
            meta_type = body[pos + 1]
            length, pos = _read_varlen(body, pos + 2)
            payload = body[pos:pos + length]
            pos += length
            if meta_type == 0x2F:
                yield tick, "end", None
                return
            if meta_type == 0x58 and len(payload) >= 2:
                yield tick, "timesig", (payload[0], 2 ** payload[1])
            continue
        if byte in (0xF0, 0xF7):
            length, pos = _read_varlen(body, pos + 1)
            pos += length
            continue
        if byte & 0x80:
            status = byte
            pos += 1
        elif status is None:
            raise MalformedFile("running status without a previous status byte")
        kind = status & 0xF0
        channel = status & 0x0F
        nbytes = 1 if kind in (0xC0, 0xD0) else 2
        args = body[pos:pos + nbytes]
        if len(args) != nbytes:
            raise MalformedFile("truncated channel event")
        pos += nbytes
        if kind == 0x90 and args[1] > 0:
            yield tick, "on", (channel, args[0])
        elif kind == 0x80 or (kind == 0x90 and args[1] == 0):
            yield tick, "off", (channel, args[0])
    yield tick, "end", None


def read_midi(raw_bytes: bytes) -> Score:
    """Parse a format 0/1 Standard MIDI File. Tempo is ignored."""
    chunks = list(_iter_chunks(raw_bytes)) if raw_bytes[:4] == b"MThd" else None
    if not chunks or len(chunks[0][1]) < 6:
        raise MalformedFile("missing MThd header")
    fmt, _ntracks, division = struct.unpack(">HHH", chunks[0][1][:6])
    if fmt not in (0, 1):
        raise UnsupportedFeature("format", f"MIDI format {fmt} is not supported")
    if division & 0x8000:
        raise UnsupportedFeature("division", "SMPTE time division is not supported")
    if division == 0:
        raise MalformedFile("ticks per quarter is zero")

    notes: list[TimedNote] = []
    time_sigs: list[tuple[int, int, int]] = []
    end_tick = 0
    tracks = [body for kind, body in chunks[1:] if kind == b"MTrk"]
    for track_index, body in enumerate(tracks):
        pending: dict[tuple[int, int], list[int]] = defaultdict(list)
        track_end = 0
        for tick, kind, payload in _parse_track(body):
            track_end = tick
            if kind == "timesig":
                time_sigs.append((tick, *payload))
            elif kind == "on":
                pending[payload].append(tick)
            elif kind == "off" and pending.get(payload):
                start = pending[payload].pop(0)
                if tick > start:
                    channel, pitch = payload
                    part = channel if fmt == 0 else track_index
                    notes.append(TimedNote(Fraction(start, division), Fraction(tick - start, division), pitch, part))
        for (channel, pitch), starts in sorted(pending.items()):
            for start in starts:
                warnings.warn(
                    f"note-on {pitch} (channel {channel}) at tick {start} never released; truncated at tick {track_end}",
                    UnmatchedNoteOn,
                    stacklevel=2,
                )
                if track_end > start:
                    part = channel if fmt == 0 else track_index
                    notes.append(TimedNote(Fraction(start, division), Fraction(track_end - start, division), pitch, part))
        end_tick = max(end_tick, track_end)

    notes.sort()
    end = Fraction(end_tick, division)
    if notes:
        end = max(end, max(n.offset for n in notes))
    return Score(tuple(notes), measure_grid(end, [(Fraction(t, division), n, d) for t, n, d in sorted(time_sigs)]), end)


def parse_midi(raw_bytes: bytes) -> list[TimedNote]:
    return list(read_midi(raw_bytes).notes)


def measure_grid(end: Fraction, time_signatures: Iterable[tuple[Fraction, int, int]] = ()) -> dict[int, Fraction]:
    """Measure onsets from time-signature changes ``(onset, numerator, denominator)``; 4/4 by default."""
    changes = sorted(time_signatures)
    length = Fraction(4)
    onsets: dict[int, Fraction] = {}
    t = Fraction(0)
    number = 1
    while t < end or number == 1:
        while changes and changes[0][0] <= t:
            _, num, den = changes.pop(0)
            length = Fraction(4 * num, den)
        onsets[number] = t
        number += 1
        t += length
    return onsets


def load_score(path: str | Path) -> Score:
    """Read a .mid/.midi or .xml/.musicxml file."""
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix.lower() in (".mid", ".midi") or raw[:4] == b"MThd":
        return read_midi(raw)
    if path.suffix.lower() == ".mxl":
        raise UnsupportedFeature("mxl", "compressed MusicXML is not supported")
    return read_musicxml(raw)


# --------------------------------------------------------------------------
# Chordification and weights


def chordify(
    notes: Iterable[TimedNote],
    measure_onsets: Mapping[int, Fraction] | None = None,
    total_duration: Fraction | None = None,
) -> Timeline:
    """Slice the notes at every onset and offset into vertical events.

    Slices where nothing sounds are dropped. Consecutive slices with the
    same pitch-class set stay separate events.
    """
    notes = list(notes)
    if not notes:
        raise EmptyInput("no notes to chordify")
    boundaries = sorted({n.onset for n in notes} | {n.offset for n in notes})
    end = max(boundaries[-1], total_duration or 0)

    # sweep: starts/stops indexed by boundary
    starting: dict[Fraction, list[int]] = defaultdict(list)
    stopping: dict[Fraction, list[int]] = defaultdict(list)
    for n in notes:
        starting[n.onset].append(n.pitch)
        stopping[n.offset].append(n.pitch)
    sounding: dict[int, int] = defaultdict(int)
    events = []
    for lo, hi in zip(boundaries, boundaries[1:]):
        for p in stopping.get(lo, ()):
            sounding[p] -= 1
        for p in starting.get(lo, ()):
            sounding[p] += 1
        pcs = tuple(sorted({p % 12 for p, k in sounding.items() if k > 0}))
        if pcs:
            events.append(Event(lo, hi - lo, pcs))

    if measure_onsets is None:
        measure_onsets = measure_grid(end)
    return Timeline(tuple(events), dict(measure_onsets), end)


def accumulate_weights(timeline: Timeline | Iterable[Event]) -> ElementStats:
    events = timeline.events if isinstance(timeline, Timeline) else tuple(timeline)
    if not events:
        raise EmptyInput("timeline has no events")
    chords: dict[tuple[int, ...], list] = {}
    pcs: dict[int, list] = {}
    rhythms: dict[Fraction, int] = defaultdict(int)
    chord_rhythm: dict[tuple[tuple[int, ...], Fraction], int] = defaultdict(int)
    for ev in events:
        entry = chords.setdefault(ev.pitch_classes, [Fraction(0), 0])
        entry[0] += ev.duration_qL
        entry[1] += 1
        for pc in ev.pitch_classes:
            pc_entry = pcs.setdefault(pc, [Fraction(0), 0])
            pc_entry[0] += ev.duration_qL
            pc_entry[1] += 1
        rhythms[ev.duration_qL] += 1
        chord_rhythm[(ev.pitch_classes, ev.duration_qL)] += 1
    return ElementStats(
        chord_stats={k: (d, n) for k, (d, n) in sorted(chords.items())},
        pc_stats={k: (d, n) for k, (d, n) in sorted(pcs.items())},
        rhythm_stats=dict(sorted(rhythms.items())),
        chord_rhythm_counts=dict(sorted(chord_rhythm.items())),
    )


def texture_densities(notes: Iterable[TimedNote], total_duration: Fraction) -> tuple[Fraction, Fraction]:
    """Average number of sounding voices and of note attacks per quarter length.

    Returns ``(total note duration / total duration, note count / total duration)``.
    """
    notes = list(notes)
    if total_duration <= 0:
        raise EmptyInput("total duration must be positive")
    note_time = sum((n.duration for n in notes), Fraction(0))
    return note_time / total_duration, Fraction(len(notes)) / total_duration
