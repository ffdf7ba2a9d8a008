"""Regenerate the score fixtures in this directory.

    python tests/fixtures/generate.py
"""

import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))

from scorefab import midi, musicxml, pitch  # noqa: E402

# Contrapunctus I (Art of Fugue), mm. 1-8: subject in the alto, tonal answer in
# the soprano from m. 5 over a countersubject. Encoded by hand; the alto line
# in mm. 5-8 is a reduction.
BACH_ALTO = [
    [("D4", 2), ("A4", 2)],
    [("F4", 2), ("D4", 2)],
    [("C#4", 2), ("D4", 1), ("E4", 1)],
    [("F4", 3), ("G4", 0.5), ("F4", 0.5)],
    [("E4", 1), ("D4", 0.5), ("E4", 0.5), ("F4", 0.5), ("G4", 0.5), ("F4", 0.5), ("E4", 0.5)],
    [("F4", 1), ("F#4", 1), ("G4", 0.5), ("F4", 0.5), ("E4", 0.5), ("D4", 0.5)],
    [("B3", 1), ("E4", 1), ("F4", 0.5), ("E4", 0.5), ("D4", 1)],
    [("A4", 1), ("G4", 0.5), ("F4", 0.5), ("E4", 1), ("G4", 0.5), ("Bb4", 0.5)],
]
BACH_SOPRANO = [
    [("r", 4)],
    [("r", 4)],
    [("r", 4)],
    [("r", 4)],
    [("A4", 2), ("D5", 2)],
    [("C5", 2), ("A4", 2)],
    [("G#4", 2), ("A4", 1), ("B4", 1)],
    [("C5", 3), ("D5", 0.5), ("C5", 0.5)],
]

# Four-part homophonic progression in C, half-note chords, with a held tonic.
CHORALE = [
    [[("E5", 2), ("D5", 2)], [("C5", 2), ("B4", 2)], [("A4", 2), ("B4", 2)], [("C5", 4)]],
    [[("G4", 2), ("G4", 2)], [("E4", 2), ("D4", 2)], [("C4", 2), ("D4", 2)], [("E4", 4)]],
    [[("C4", 2), ("B3", 2)], [("A3", 2), ("G3", 2)], [("F3", 2), ("G3", 2)], [("G3", 4)]],
    [[("C3", 2), ("G2", 2)], [("A2", 2), ("E2", 2)], [("F2", 2), ("G2", 2)], [("C3", 4)]],
]

# Even eighths for four bars (rhythm entropy 0), then mixed values.
MONO_EVEN = [
    [(n, 0.5) for n in ("C4", "D4", "E4", "F4", "G4", "A4", "B4", "C5")],
    [(n, 0.5) for n in ("C5", "B4", "A4", "G4", "F4", "E4", "D4", "C4")],
    [(n, 0.5) for n in ("E4", "G4", "C5", "G4", "E4", "G4", "C5", "G4")],
    [(n, 0.5) for n in ("F4", "A4", "C5", "A4", "F4", "A4", "C5", "A4")],
    [("G4", 1), ("B4", 0.5), ("D5", 0.5), ("G4", 2)],
    [("C4", 3), ("r", 1)],
]

# Sequence whose chord graph is two triangles joined by a bridge (C-D-E, F-G-A).
TRIANGLES = [[("C4", 1), ("D4", 1), ("E4", 1), ("C4", 1)], [("F4", 1), ("G4", 1), ("A4", 1), ("F4", 1)]]


def main():
    files = {
        "bach_contrapunctus1_mm1-8.musicxml": musicxml([BACH_SOPRANO, BACH_ALTO], title="Contrapunctus I, mm. 1-8"),
        "chorale_in_c.musicxml": musicxml(CHORALE, title="Chorale in C"),
        "mono_even_eighths.musicxml": musicxml([MONO_EVEN], title="Even eighths"),
        "two_triangles.musicxml": musicxml([TRIANGLES], title="Two triangles"),
        "single_note.musicxml": musicxml([[[("C4", 4)]]], title="One note"),
    }
    # MIDI rendering of the chorale's outer voices plus an inner sustained note
    notes = []
    for track, voice in ((1, CHORALE[0]), (2, CHORALE[3])):
        t = 0
        for measure in voice:
            for name, ql in measure:
                notes.append((t, ql, pitch(name), track))
                t += ql
    notes.append((0, 8, pitch("G4"), 3))
    notes.append((9, 3, pitch("E4"), 3))
    files["outer_voices.mid"] = midi(notes)
    for name, data in files.items():
        (HERE / name).write_bytes(data)
        print("wrote", name)


if __name__ == "__main__":
    main()
