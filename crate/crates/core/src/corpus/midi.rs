//! Standard MIDI File reader (formats 0 and 1) reduced to note spans.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Result, TonalError};
use crate::pitch_space::NoteEvent;

use super::PieceRecord;

/// Zero-based channel index of General MIDI channel 10.
pub const PERCUSSION_CHANNEL: u8 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    TicksPerQuarter(u16),
    /// SMPTE frames per second and ticks per frame.
    Smpte { fps: u8, ticks_per_frame: u8 },
}

impl Timing {
    /// Ticks per beat, or per second for SMPTE timing.
    pub fn ticks_per_unit(self) -> f64 {
        match self {
            Timing::TicksPerQuarter(t) => t as f64,
            Timing::Smpte { fps, ticks_per_frame } => fps as f64 * ticks_per_frame as f64,
        }
    }
}

/// A matched note-on/note-off pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MidiNote {
    pub track: usize,
    pub channel: u8,
    pub key: u8,
    pub start_tick: u64,
    pub end_tick: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MidiWarnings {
    pub unmatched_note_offs: usize,
    pub unterminated_notes: usize,
    pub zero_length_notes: usize,
}

impl MidiWarnings {
    pub fn total(&self) -> usize {
        self.unmatched_note_offs + self.unterminated_notes + self.zero_length_notes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MidiNotes {
    pub format: u16,
    pub timing: Timing,
    /// Sorted by start tick, then track, channel and key.
    pub notes: Vec<MidiNote>,
    pub warnings: MidiWarnings,
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(TonalError::MidiParse {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn u8(&mut self) -> Result<u8> {
        match self.data.get(self.pos) {
            Some(&b) => {
                self.pos += 1;
                Ok(b)
            }
            None => self.err("unexpected end of data"),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < n {
            return self.err(format!("need {n} bytes, {} left", self.data.len() - self.pos));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn varlen(&mut self) -> Result<u32> {
        let start = self.pos;
        let mut value = 0u32;
        for _ in 0..4 {
            let b = self.u8()?;
            value = (value << 7) | (b & 0x7f) as u32;
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        self.pos = start;
        self.err("variable-length quantity longer than 4 bytes")
    }
}

/// Parses the file into matched note spans. Overlapping note-ons of the same
/// key and channel are closed first-in first-out.
pub fn parse_midi(bytes: &[u8]) -> Result<MidiNotes> {
    let mut r = Reader { data: bytes, pos: 0 };
    if r.take(4).ok() != Some(b"MThd".as_slice()) {
        r.pos = 0;
        return r.err("missing MThd header chunk");
    }
    let header_len = r.u32()? as usize;
    if header_len < 6 {
        return r.err(format!("header chunk length {header_len} < 6"));
    }
    let header_start = r.pos;
    let format = r.u16()?;
    let n_tracks = r.u16()? as usize;
    let division = r.u16()?;
    if format > 1 {
        r.pos = header_start;
        return r.err(format!("unsupported SMF format {format}"));
    }
    let timing = if division & 0x8000 != 0 {
        let fps = (-((division >> 8) as u8 as i8)) as u8;
        Timing::Smpte {
            fps,
            ticks_per_frame: (division & 0xff) as u8,
        }
    } else {
        Timing::TicksPerQuarter(division)
    };
    if timing.ticks_per_unit() == 0.0 {
        r.pos = header_start + 4;
        return r.err("time division is zero");
    }
    r.pos = header_start + header_len;
    if r.pos > bytes.len() {
        return r.err("header chunk runs past end of file");
    }

    let mut notes = Vec::new();
    let mut warnings = MidiWarnings::default();
    let mut track = 0;
    while track < n_tracks {
        let chunk_start = r.pos;
        let id = r.take(4)?;
        let len = r.u32()? as usize;
        if bytes.len() - r.pos < len {
            r.pos = chunk_start;
            return r.err(format!("chunk length {len} runs past end of file"));
        }
        if id != b"MTrk" {
            // alien chunks are skipped
            r.pos += len;
            continue;
        }
        let body = &bytes[r.pos..r.pos + len];
        parse_track(body, r.pos, track, &mut notes, &mut warnings)?;
        r.pos += len;
        track += 1;
    }

    notes.sort_by_key(|n: &MidiNote| (n.start_tick, n.track, n.channel, n.key, n.end_tick));
    Ok(MidiNotes {
        format,
        timing,
        notes,
        warnings,
    })
}

fn parse_track(
    body: &[u8],
    base: usize,
    track: usize,
    notes: &mut Vec<MidiNote>,
    warnings: &mut MidiWarnings,
) -> Result<()> {
    let mut r = Reader { data: body, pos: 0 };
    let rebase = |e: TonalError| match e {
        TonalError::MidiParse { offset, message } => TonalError::MidiParse {
            offset: offset + base,
            message,
        },
        other => other,
    };
    let mut open: HashMap<(u8, u8), VecDeque<u64>> = HashMap::new();
    let mut tick = 0u64;
    let mut running: Option<u8> = None;

    while r.pos < body.len() {
        tick += r.varlen().map_err(rebase)? as u64;
        let first = r.u8().map_err(rebase)?;
        let (status, first_data) = if first & 0x80 != 0 {
            (first, None)
        } else {
            match running {
                Some(s) => (s, Some(first)),
                None => {
                    r.pos -= 1;
                    return r.err("data byte without running status").map_err(rebase);
                }
            }
        };
        match status {
            0xff => {
                running = None;
                let kind = r.u8().map_err(rebase)?;
                let len = r.varlen().map_err(rebase)? as usize;
                r.take(len).map_err(rebase)?;
                if kind == 0x2f {
                    break;
                }
            }
            0xf0 | 0xf7 => {
                running = None;
                let len = r.varlen().map_err(rebase)? as usize;
                r.take(len).map_err(rebase)?;
            }
            0x80..=0xef => {
                running = Some(status);
                let mut first_data = first_data;
                let mut next = |r: &mut Reader| -> Result<u8> {
                    let b = match first_data.take() {
                        Some(b) => b,
                        None => r.u8()?,
                    };
                    if b & 0x80 != 0 {
                        r.pos -= 1;
                        return r.err(format!("status byte {b:#04x} where data expected"));
                    }
                    Ok(b)
                };
                let channel = status & 0x0f;
                match status & 0xf0 {
                    0x80 | 0x90 => {
                        let key = next(&mut r).map_err(rebase)?;
                        let velocity = next(&mut r).map_err(rebase)?;
                        if status & 0xf0 == 0x90 && velocity > 0 {
                            open.entry((channel, key)).or_default().push_back(tick);
                        } else {
                            match open.get_mut(&(channel, key)).and_then(|q| q.pop_front()) {
                                Some(start) if start == tick => warnings.zero_length_notes += 1,
                                Some(start) => notes.push(MidiNote {
                                    track,
                                    channel,
                                    key,
                                    start_tick: start,
                                    end_tick: tick,
                                }),
                                None => warnings.unmatched_note_offs += 1,
                            }
                        }
                    }
                    0xc0 | 0xd0 => {
                        next(&mut r).map_err(rebase)?;
                    }
                    _ => {
                        next(&mut r).map_err(rebase)?;
                        next(&mut r).map_err(rebase)?;
                    }
                }
            }
            _ => {
                r.pos -= 1;
                return r
                    .err(format!("system message {status:#04x} not allowed in a track"))
                    .map_err(rebase);
            }
        }
    }
    warnings.unterminated_notes += open.values().map(VecDeque::len).sum::<usize>();
    Ok(())
}

/// Reads a MIDI file into a piece. Channel-10 notes are flagged as
/// percussion; durations are in beats (seconds for SMPTE timing). A file
/// without notes yields an empty piece, not an error.
pub fn ingest_midi(
    bytes: &[u8],
    id: &str,
    metadata: BTreeMap<String, String>,
) -> Result<PieceRecord> {
    let parsed = parse_midi(bytes)?;
    let per_unit = parsed.timing.ticks_per_unit();
    let notes = parsed
        .notes
        .iter()
        .map(|n| {
            NoteEvent::new(
                n.key % 12,
                (n.end_tick - n.start_tick) as f64 / per_unit,
                n.channel == PERCUSSION_CHANNEL,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut record = PieceRecord::new(id, notes);
    record.metadata = metadata;
    record.ingest_warnings = parsed.warnings.total();
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(format: u16, tracks: u16, division: u16) -> Vec<u8> {
        let mut v = b"MThd".to_vec();
        v.extend(6u32.to_be_bytes());
        v.extend(format.to_be_bytes());
        v.extend(tracks.to_be_bytes());
        v.extend(division.to_be_bytes());
        v
    }

    fn with_track(mut file: Vec<u8>, body: &[u8]) -> Vec<u8> {
        file.extend(b"MTrk");
        file.extend((body.len() as u32).to_be_bytes());
        file.extend(body);
        file
    }

    #[test]
    fn single_quarter_note() {
        let f = with_track(
            header(0, 1, 480),
            &[0x00, 0x90, 60, 100, 0x83, 0x60, 0x80, 60, 0, 0x00, 0xff, 0x2f, 0x00],
        );
        let r = ingest_midi(&f, "c4", BTreeMap::new()).unwrap();
        assert_eq!(r.notes.len(), 1);
        assert_eq!(r.notes[0].chromatic_pc, 0);
        assert_eq!(r.notes[0].duration, 1.0);
        assert!(!r.notes[0].is_percussion);
        assert_eq!(r.ingest_warnings, 0);
    }

    #[test]
    fn running_status_and_fifo_pairing() {
        // two overlapping E4s on channel 2 closed by velocity-0 note-ons
        let body = [
            0x00, 0x92, 64, 90, 0x10, 64, 90, 0x10, 64, 0, 0x10, 64, 0, 0x00, 0xff, 0x2f, 0x00,
        ];
        let p = parse_midi(&with_track(header(0, 1, 16), &body)).unwrap();
        let spans: Vec<(u64, u64)> = p.notes.iter().map(|n| (n.start_tick, n.end_tick)).collect();
        assert_eq!(spans, vec![(0, 32), (16, 48)]);
        assert!(p.notes.iter().all(|n| n.channel == 2));
    }

    #[test]
    fn percussion_and_warnings() {
        let body = [
            0x00, 0x99, 36, 100, 0x08, 0x89, 36, 0, // kick on channel 10
            0x00, 0x80, 61, 0, // unmatched off
            0x00, 0x90, 62, 100, 0x00, 0x80, 62, 0, // zero length
            0x00, 0x90, 63, 100, // never closed
            0x00, 0xff, 0x2f, 0x00,
        ];
        let r = ingest_midi(&with_track(header(0, 1, 8), &body), "d", BTreeMap::new()).unwrap();
        assert_eq!(r.notes.len(), 1);
        assert!(r.notes[0].is_percussion);
        assert_eq!(r.notes[0].duration, 1.0);
        assert_eq!(r.ingest_warnings, 3);
    }

    #[test]
    fn smpte_division() {
        // 25 fps, 40 ticks per frame: 1000 ticks per second
        let div = ((-25i8 as u8 as u16) << 8) | 40;
        let body = [0x00, 0x90, 60, 1, 0x87, 0x68, 0x80, 60, 0, 0x00, 0xff, 0x2f, 0x00];
        let p = parse_midi(&with_track(header(0, 1, div), &body)).unwrap();
        assert_eq!(p.timing, Timing::Smpte { fps: 25, ticks_per_frame: 40 });
        let r = ingest_midi(&with_track(header(0, 1, div), &body), "s", BTreeMap::new()).unwrap();
        assert_eq!(r.notes[0].duration, 1.0);
    }

    #[test]
    fn alien_chunks_are_skipped() {
        let mut f = header(0, 1, 96);
        f.extend(b"XFIH");
        f.extend(3u32.to_be_bytes());
        f.extend([1, 2, 3]);
        let f = with_track(f, &[0x00, 0x90, 60, 1, 0x60, 0x80, 60, 0]);
        assert_eq!(parse_midi(&f).unwrap().notes.len(), 1);
    }

    fn offset(bytes: &[u8]) -> (usize, String) {
        match parse_midi(bytes) {
            Err(TonalError::MidiParse { offset, message }) => (offset, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_byte_offsets() {
        assert_eq!(offset(b"RIFF0000").0, 0);
        assert_eq!(offset(&header(2, 1, 96)).0, 8);
        assert_eq!(offset(&header(0, 1, 0)).0, 12);

        // data byte with no running status: first event byte of the track
        let (o, m) = offset(&with_track(header(0, 1, 96), &[0x00, 60, 100]));
        assert_eq!(o, 14 + 8 + 1);
        assert!(m.contains("running status"), "{m}");

        // status byte where the velocity should be
        let (o, _) = offset(&with_track(header(0, 1, 96), &[0x00, 0x90, 60, 0x80]));
        assert_eq!(o, 14 + 8 + 3);

        // track chunk claims more bytes than the file has
        let mut f = header(0, 1, 96);
        f.extend(b"MTrk");
        f.extend(100u32.to_be_bytes());
        f.extend([0, 0]);
        assert_eq!(offset(&f).0, 14);

        // truncated event
        let (o, m) = offset(&with_track(header(0, 1, 96), &[0x00, 0x90, 60]));
        assert_eq!(o, 14 + 8 + 3);
        assert!(m.contains("end of data"), "{m}");

        // system common message inside a track
        let (o, _) = offset(&with_track(header(0, 1, 96), &[0x00, 0xf2, 0, 0]));
        assert_eq!(o, 14 + 8 + 1);

        // missing track
        assert!(parse_midi(&header(0, 1, 96)).is_err());
    }

    #[test]
    fn empty_track_gives_no_notes() {
        let f = with_track(header(0, 1, 96), &[0x00, 0xff, 0x2f, 0x00]);
        let r = ingest_midi(&f, "e", BTreeMap::new()).unwrap();
        assert!(r.notes.is_empty());
    }
}
