"""One-way export of a score to a minimal MusicXML 3.1 partwise document.

Measures are 8 beats long (time signature 8/4) and ``divisions`` equals the
score's ticks per beat, so tick durations are written unchanged.  Notes
that cross a barline are split and tied.  Overlapping notes inside one
part are spread over voices; notes sharing onset and duration form chords.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import defaultdict

from .score import Score

BEATS_PER_MEASURE = 8

_STEPS = [("C", 0), ("C", 1), ("D", 0), ("D", 1), ("E", 0), ("F", 0),
          ("F", 1), ("G", 0), ("G", 1), ("A", 0), ("A", 1), ("B", 0)]

_DOCTYPE = (
    '<!DOCTYPE score-partwise PUBLIC "-//Recordare//DTD MusicXML 3.1 Partwise//EN" '
    '"http://www.musicxml.org/dtds/partwise.dtd">'
)


def spell(semitone: int) -> tuple[str, int, int]:
    """(step, alter, octave) with sharps; MIDI 60 is C4."""
    step, alter = _STEPS[semitone % 12]
    return step, alter, semitone // 12 - 1


def _pieces(notes, measure_len):
    """Split notes at barlines: (start, dur, pitch, tie_start, tie_stop)."""
    out = []
    for n in notes:
        t = n.onset
        while t < n.offset:
            bar_end = (t // measure_len + 1) * measure_len
            end = min(n.offset, bar_end)
            out.append((t, end - t, n.pitch, end < n.offset, t > n.onset))
            t = end
    return out


def _voices(pieces):
    """Greedy interval partitioning of chord groups into voices."""
    groups = defaultdict(list)
    for piece in pieces:
        groups[(piece[0], piece[1])].append(piece)
    voices: list[list] = []
    free_at: list[int] = []
    for (start, dur), chord in sorted(groups.items()):
        for v, t in enumerate(free_at):
            if t <= start:
                voices[v].append(chord)
                free_at[v] = start + dur
                break
        else:
            voices.append([chord])
            free_at.append(start + dur)
    return voices


def _rest(parent, dur, voice):
    el = ET.SubElement(parent, "note")
    ET.SubElement(el, "rest")
    ET.SubElement(el, "duration").text = str(dur)
    ET.SubElement(el, "voice").text = str(voice)


def _note(parent, piece, voice, in_chord):
    _, dur, pitch, tie_start, tie_stop = piece
    el = ET.SubElement(parent, "note")
    if in_chord:
        ET.SubElement(el, "chord")
    step, alter, octave = spell(pitch)
    p = ET.SubElement(el, "pitch")
    ET.SubElement(p, "step").text = step
    if alter:
        ET.SubElement(p, "alter").text = str(alter)
    ET.SubElement(p, "octave").text = str(octave)
    ET.SubElement(el, "duration").text = str(dur)
    if tie_stop:
        ET.SubElement(el, "tie", type="stop")
    if tie_start:
        ET.SubElement(el, "tie", type="start")
    ET.SubElement(el, "voice").text = str(voice)
    if alter:
        ET.SubElement(el, "accidental").text = "sharp"
    if tie_start or tie_stop:
        notations = ET.SubElement(el, "notations")
        if tie_stop:
            ET.SubElement(notations, "tied", type="stop")
        if tie_start:
            ET.SubElement(notations, "tied", type="start")


def to_musicxml(score: Score) -> str:
    tpb = score.ticks_per_beat
    measure_len = BEATS_PER_MEASURE * tpb
    n_measures = max(1, -(-score.end // measure_len))

    root = ET.Element("score-partwise", version="3.1")
    part_list = ET.SubElement(root, "part-list")
    xml_ids = [f"P{i}" for i in range(1, len(score.parts) + 1)]
    for xid, part in zip(xml_ids, score.parts):
        sp = ET.SubElement(part_list, "score-part", id=xid)
        ET.SubElement(sp, "part-name").text = part.id

    for xid, part in zip(xml_ids, score.parts):
        part_el = ET.SubElement(root, "part", id=xid)
        voices = _voices(_pieces(part.notes, measure_len)) or [[]]
        for m in range(n_measures):
            lo, hi = m * measure_len, (m + 1) * measure_len
            mel = ET.SubElement(part_el, "measure", number=str(m + 1))
            if m == 0:
                attrs = ET.SubElement(mel, "attributes")
                ET.SubElement(attrs, "divisions").text = str(tpb)
                time_el = ET.SubElement(attrs, "time")
                ET.SubElement(time_el, "beats").text = str(BEATS_PER_MEASURE)
                ET.SubElement(time_el, "beat-type").text = "4"
                clef = ET.SubElement(attrs, "clef")
                ET.SubElement(clef, "sign").text = "G"
                ET.SubElement(clef, "line").text = "2"
            for v, chords in enumerate(voices, 1):
                if v > 1:
                    backup = ET.SubElement(mel, "backup")
                    ET.SubElement(backup, "duration").text = str(measure_len)
                t = lo
                for chord in chords:
                    start, dur = chord[0][0], chord[0][1]
                    if not lo <= start < hi:
                        continue
                    if start > t:
                        _rest(mel, start - t, v)
                    for k, piece in enumerate(sorted(chord, key=lambda x: x[2])):
                        _note(mel, piece, v, k > 0)
                    t = start + dur
                if t < hi:
                    _rest(mel, hi - t, v)

    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + _DOCTYPE + "\n" + body + "\n"


def write_musicxml(score: Score, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_musicxml(score))
