#!/usr/bin/env python3
"""Writes the MIDI and note-table fixtures plus the expected note lists.

Each MIDI file is built from an explicit list of note spans, and the
expected table (<name>.expected.tsv) is derived from that list, not from
the bytes, so the Rust reader is checked against what was meant.

Run from this directory: python3 gen_fixtures.py
"""
import struct

HERE = __file__.rsplit("/", 1)[0] if "/" in __file__ else "."


def vlq(n):
    out = [n & 0x7F]
    n >>= 7
    while n:
        out.append(0x80 | (n & 0x7F))
        n >>= 7
    return bytes(reversed(out))


def chunk(kind, body):
    return kind + struct.pack(">I", len(body)) + body


def track(events, running_status=False):
    """events: (abs_tick, status, data bytes) sorted by tick; meta/sysex are raw."""
    body = b""
    last_tick = 0
    last_status = None
    for tick, status, data in events:
        body += vlq(tick - last_tick)
        last_tick = tick
        if status >= 0xF0:
            body += bytes([status]) + data
            last_status = None
        elif running_status and status == last_status:
            body += data
        else:
            body += bytes([status]) + data
            last_status = status
    body += vlq(0) + b"\xff\x2f\x00"
    return chunk(b"MTrk", body)


def smf(fmt, division, tracks):
    return chunk(b"MThd", struct.pack(">HHH", fmt, len(tracks), division)) + b"".join(tracks)


def note_events(spans, channel, off_velocity_zero=False):
    """spans: (key, start, end). Offs sort before ons at equal ticks."""
    ev = []
    for key, start, end in spans:
        ev.append((start, 1, 0x90 | channel, bytes([key, 90])))
        if off_velocity_zero:
            ev.append((end, 0, 0x90 | channel, bytes([key, 0])))
        else:
            ev.append((end, 0, 0x80 | channel, bytes([key, 64])))
    ev.sort(key=lambda e: (e[0], e[1]))
    return [(t, s, d) for t, _, s, d in ev]


def tempo(tick=0, usec=500000):
    return (tick, 0xFF, b"\x51\x03" + usec.to_bytes(3, "big"))


def expected(path, notes, division):
    """notes: (track, channel, key, start, end); sorted like the reader."""
    notes = sorted(notes, key=lambda n: (n[3], n[0], n[1], n[2], n[4]))
    with open(path, "w") as f:
        f.write("pc\tduration\tis_percussion\n")
        for tr, ch, key, start, end in notes:
            dur = (end - start) / division
            f.write(f"{key % 12}\t{dur!r}\t{'true' if ch == 9 else 'false'}\n")


def write(name, data):
    with open(f"{HERE}/{name}", "wb") as f:
        f.write(data)


# scale.mid: format 0, C major scale C4..B4 in quarter notes.
div = 480
spans = [(k, i * div, (i + 1) * div) for i, k in enumerate([60, 62, 64, 65, 67, 69, 71])]
write("scale.mid", smf(0, div, [track([tempo()] + note_events(spans, 0))]))
expected(f"{HERE}/scale.expected.tsv", [(0, 0, k, s, e) for k, s, e in spans], div)

# pop_loop.mid: format 1 with a conductor track, a melody track using running
# status and velocity-0 note-offs, and a drum track on channel 10. The melody
# holds two overlapping E4 note-ons (closed first-in first-out) and one
# note-off without a matching note-on.
div = 96
melody = [
    (60, 0, 96), (64, 0, 96), (67, 0, 96),
    (65, 96, 192), (69, 96, 192), (72, 96, 192),
    (67, 192, 288), (71, 192, 288), (74, 192, 288),
    (60, 288, 480), (64, 288, 384),
    (62, 384, 432), (64, 432, 480),
]
overlap = [(76, 0, 144), (76, 48, 240)]
ev = note_events(melody, 0, off_velocity_zero=True)
ev += [(0, 0x90, bytes([76, 90])), (48, 0x90, bytes([76, 90])),
       (144, 0x90, bytes([76, 0])), (240, 0x90, bytes([76, 0]))]
ev.append((300, 0x80, bytes([50, 0])))  # stray note-off
ev.sort(key=lambda e: (e[0], 0 if (e[1] & 0xF0 == 0x80 or e[2][1] == 0) else 1))
drums = [(36, t, t + 24) for t in range(0, 480, 96)] + [(42, t, t + 12) for t in range(48, 480, 96)]
write("pop_loop.mid", smf(1, div, [
    track([tempo(), (0, 0xFF, b"\x58\x04\x04\x02\x18\x08")]),
    track(ev, running_status=True),
    track(note_events(drums, 9), running_status=True),
]))
expected(
    f"{HERE}/pop_loop.expected.tsv",
    [(1, 0, k, s, e) for k, s, e in melody + overlap] + [(2, 9, k, s, e) for k, s, e in drums],
    div,
)

# minor_tune.mid: format 0, an A minor tune with mixed durations and a
# program change.
div = 120
tune = [(69, 120), (71, 60), (72, 180), (74, 120), (76, 240), (74, 60), (72, 180),
        (71, 120), (68, 120), (69, 240), (64, 120), (65, 60), (64, 60), (62, 120), (60, 240),
        (59, 120), (57, 360)]
spans, t = [], 0
for key, d in tune:
    spans.append((key, t, t + d))
    t += d
bass = [(45, 0, 480), (40, 480, 960), (45, 960, 1440), (52, 1440, 1920), (45, 1920, t)]
ev = [(0, 0xC0, bytes([0])), (0, 0xC1, bytes([32]))]
ev += note_events(spans, 0) + note_events(bass, 1)
ev.sort(key=lambda e: (e[0], 0 if e[1] & 0xF0 in (0x80, 0xC0) else 1))
write("minor_tune.mid", smf(0, div, [track([tempo()] + ev)]))
expected(
    f"{HERE}/minor_tune.expected.tsv",
    [(0, 0, k, s, e) for k, s, e in spans] + [(0, 1, k, s, e) for k, s, e in bass],
    div,
)

# drums.mid: percussion only.
div = 96
hits = [(36, t, t + 24) for t in range(0, 384, 48)]
write("drums.mid", smf(0, div, [track(note_events(hits, 9))]))
expected(f"{HERE}/drums.expected.tsv", [(0, 9, k, s, e) for k, s, e in hits], div)

# empty.mid: a single track holding only end-of-track.
write("empty.mid", smf(0, 96, [track([])]))

# Note tables with explicit spellings (tpc_rel = fifths above C).


def table(name, piece_id, key, rows, relative=True):
    col = "tpc_rel" if relative else "tpc"
    with open(f"{HERE}/{name}", "w") as f:
        f.write(f"piece_id\t{col}\tduration\tglobal_key\n")
        for i, (tpc, dur) in enumerate(rows):
            f.write(f"{piece_id}\t{tpc}\t{dur}\t{key if i == 0 else ''}\n")


# C major prelude-like figuration: C E G C E / D F A D F / B D F G ...
C, G, D, A, E, B, F = 0, 1, 2, 3, 4, 5, -1
Fs, Cs, Gs, Bb, Eb, Ab = 6, 7, 8, -2, -3, -4
table("prelude_c.tsv", "prelude_c", "C", [
    (C, 0.5), (E, 0.5), (G, 0.5), (C, 0.5), (E, 0.5),
    (C, 0.5), (D, 0.5), (A, 0.5), (D, 0.5), (F, 0.5),
    (B, 0.5), (D, 0.5), (G, 0.5), (D, 0.5), (F, 0.5),
    (C, 0.5), (E, 0.5), (G, 0.5), (C, 0.5), (E, 0.5),
    (C, 0.5), (E, 0.5), (A, 0.5), (E, 0.5), (A, 0.5),
    (C, 0.5), (D, 0.5), (Fs, 0.5), (A, 0.5), (D, 0.5),
    (B, 0.5), (D, 0.5), (G, 0.5), (D, 0.5), (G, 0.5),
    (B, 0.5), (C, 0.5), (E, 0.5), (G, 0.5), (C, 0.5),
    (A, 0.5), (C, 0.5), (E, 0.5), (G, 0.5), (C, 0.5),
    (D, 0.5), (A, 0.5), (D, 0.5), (Fs, 0.5), (C, 0.5),
    (G, 0.5), (B, 0.5), (D, 0.5), (G, 0.5), (B, 0.5),
    (G, 0.5), (Bb, 0.5), (E, 0.5), (G, 0.5), (Cs, 0.5),
    (F, 0.5), (A, 0.5), (D, 0.5), (F, 0.5), (A, 0.5),
    (F, 0.5), (Ab, 0.5), (D, 0.5), (F, 0.5), (B, 0.5),
    (E, 0.5), (G, 0.5), (C, 0.5), (E, 0.5), (G, 1.0),
    (C, 2.0),
], relative=True)

# E minor chorale-like phrase with a chromatic descent.
table("chorale_em.tsv", "chorale_em", "Em", [
    (E, 1.0), (G, 1.0), (B, 1.0), (E, 1.0),
    (Fs, 1.0), (A, 1.0), (Cs, 0.5), (D, 0.5), (Fs, 1.0),
    (G, 1.0), (B, 1.0), (E, 1.0), (D, 1.0),
    (C, 1.0), (E, 1.0), (A, 1.0), (G, 0.5), (Fs, 0.5),
    (B, 2.0), (Ds := 9, 1.0), (Fs, 1.0), (A, 1.0),
    (G, 1.0), (Fs, 0.5), (F, 0.5), (E, 1.0), (Eb, 0.5), (D, 0.5),
    (C, 1.0), (B, 1.0), (A, 1.0), (Ds, 1.0),
    (E, 2.0), (B, 1.0), (G, 1.0), (E, 3.0),
], relative=True)

# A modal rock riff in D mixolydian, absolute indices.
table("riff_d.tsv", "riff_d", "D", [
    (17 + D, 1.0), (17 + D, 0.5), (17 + C, 0.5), (17 + G, 1.0), (17 + D, 1.0),
    (17 + A, 0.5), (17 + C, 0.5), (17 + D, 1.0), (17 + Fs, 1.0), (17 + E, 1.0),
    (17 + D, 1.0), (17 + C, 1.0), (17 + G, 1.0), (17 + A, 2.0), (17 + B, 1.0), (17 + D, 2.0),
], relative=False)

# A jazz standard sketch; genre exclusion applies.
table("changes_bb.tsv", "changes_bb", "Bb", [
    (Bb, 1.0), (D, 1.0), (F, 1.0), (A, 1.0),
    (Eb, 1.0), (G, 1.0), (Bb, 1.0), (D, 1.0),
    (C, 1.0), (Eb, 1.0), (G, 1.0), (Bb, 1.0),
    (F, 1.0), (A, 1.0), (C, 1.0), (Eb, 1.0),
    (Ab, 0.5), (Cs, 0.5), (Bb, 2.0),
], relative=True)

MANIFEST = [
    ("id", "path", "group", "key", "composer", "era", "genre"),
    ("scale", "scale.mid", "classical", "C", "Anonymous", "classical", ""),
    ("prelude_c", "prelude_c.tsv", "classical", "", "Bach", "baroque", ""),
    ("chorale_em", "chorale_em.tsv", "classical", "", "Bach", "baroque", ""),
    ("minor_tune", "minor_tune.mid", "classical", "", "Anonymous", "romantic", ""),
    ("pop_loop", "pop_loop.mid", "popular", "", "Band A", "2000s", "rock"),
    ("riff_d", "riff_d.tsv", "popular", "", "Band B", "1970s", "rock"),
    ("changes_bb", "changes_bb.tsv", "popular", "", "Trio C", "1950s", "Jazz"),
    ("drums", "drums.mid", "popular", "", "Band A", "2000s", "rock"),
    ("missing", "missing.mid", "popular", "", "Band B", "1970s", "pop"),
]
with open(f"{HERE}/mini_corpus.tsv", "w") as f:
    for row in MANIFEST:
        f.write("\t".join(row) + "\n")
