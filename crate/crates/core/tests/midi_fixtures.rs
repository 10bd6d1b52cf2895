use std::collections::BTreeMap;
use std::path::Path;

use tonal_coherence::corpus::{ingest_midi, parse_midi};
use tonal_coherence::TonalError;

fn fixture(name: &str) -> Vec<u8> {
    std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

fn expected(name: &str) -> Vec<(u8, f64, bool)> {
    let text = String::from_utf8(fixture(name)).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2] == "true")
        })
        .collect()
}

fn check(stem: &str, warnings: usize) {
    let r = ingest_midi(&fixture(&format!("{stem}.mid")), stem, BTreeMap::new()).unwrap();
    let got: Vec<(u8, f64, bool)> = r
        .notes
        .iter()
        .map(|n| (n.chromatic_pc, n.duration, n.is_percussion))
        .collect();
    assert_eq!(got, expected(&format!("{stem}.expected.tsv")), "{stem}");
    assert!(r.notes.iter().all(|n| n.spelled_lof.is_none()));
    assert_eq!(r.ingest_warnings, warnings, "{stem}");
}

#[test]
fn scale() {
    check("scale", 0);
}

#[test]
fn pop_loop() {
    check("pop_loop", 1);
    let p = parse_midi(&fixture("pop_loop.mid")).unwrap();
    assert_eq!(p.format, 1);
    assert_eq!(p.warnings.unmatched_note_offs, 1);
}

#[test]
fn minor_tune() {
    check("minor_tune", 0);
}

#[test]
fn drums() {
    check("drums", 0);
    let r = ingest_midi(&fixture("drums.mid"), "d", BTreeMap::new()).unwrap();
    assert!(r.notes.iter().all(|n| n.is_percussion));
    assert_eq!(
        tonal_coherence::pitch_space::ChromaticDistribution::from_notes(&r.notes).unwrap_err(),
        TonalError::EmptyInput
    );
}

#[test]
fn empty() {
    let r = ingest_midi(&fixture("empty.mid"), "e", BTreeMap::new()).unwrap();
    assert!(r.notes.is_empty());
}

#[test]
fn truncated_file_reports_offset() {
    let bytes = fixture("scale.mid");
    let cut = &bytes[..bytes.len() - 10];
    match parse_midi(cut) {
        Err(TonalError::MidiParse { offset, .. }) => assert_eq!(offset, 14),
        other => panic!("{other:?}"),
    }
}
