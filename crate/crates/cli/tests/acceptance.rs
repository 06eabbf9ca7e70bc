//! Acceptance suite: one test per acceptance criterion, each printing a
//! PASS line with its elapsed time. Run with
//! `cargo test -p speechframe-cli --test acceptance -- --nocapture`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use speechframe_core::alphabet::{
    classify_tempo, potebnya_strength, stress_variant, Alphabet, StressContext, StressVariant,
    SyllablePosition, UnitKind,
};
use speechframe_core::corpus::{
    add_segmentation, add_signal, segment_intervals, symbol_coverage, validate_segmentation,
    SegmentationRecord, SegmentationSource, SegmentationViolation, SpeechSignal,
};
use speechframe_core::fixtures::{self, FixtureOptions};
use speechframe_core::query::{
    corpus_stats, count_by, list_canned_queries, staged_search, CannedQueryKind, FilterCriterion,
    FilterValue, QueryOutcome, SearchAttribute,
};
use speechframe_core::refbooks::ReferenceRegistry;
use speechframe_core::store::{
    field, tables, CorpusStore, Key, OpenOptions, Record, StoreError, Value,
};

fn pass(criterion: u32, what: &str, started: Instant, limit: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < limit,
        "criterion {criterion} took {elapsed:?}, budget {limit:?}"
    );
    println!("PASS criterion {criterion}: {what} ({elapsed:?} < {limit:?})");
}

#[test]
fn criterion_01_schema_fidelity() {
    let started = Instant::now();

    let store = CorpusStore::empty();
    assert_eq!(store.schema().len(), 27);
    assert_eq!(store.schema().table_names(), tables::ALL.to_vec());

    // `init` materialises every table on disk.
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("corpus");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_speechframe"))
        .args(["--corpus", root.to_str().unwrap(), "init"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(root.join("corpus.manifest").exists());
    for name in tables::ALL {
        assert!(root.join(format!("{name}.jsonl")).exists(), "missing table file {name}");
    }

    pass(1, "27-table schema, init materialises all tables", started, Duration::from_secs(1));
}

#[test]
fn criterion_02_seed_vocabularies() {
    let started = Instant::now();
    let registry = ReferenceRegistry::seed_default();

    for (book, expected) in [
        (tables::BOOK_SEX, 2),
        (tables::BOOK_SOFT, 3),
        (tables::BOOK_VOICED, 3),
        (tables::BOOK_VOICE_TYPES, 4),
        (tables::BOOK_UNIT_TYPES, 4),
        (tables::BOOK_WAY_OF_ORIGIN, 4),
        (tables::BOOK_RISE, 3),
        (tables::BOOK_LABIALIZATION, 2),
        (tables::BOOK_STRESSED, 11),
        (tables::BOOK_SPEECH_TEMPS, 3),
    ] {
        assert_eq!(registry.len(book).unwrap(), expected, "book {book}");
    }
    assert_eq!(registry.dialects("Russian").len(), 5);
    assert_eq!(registry.lookup(tables::NOISE, 0).unwrap().title, "no noise");

    pass(2, "seeded book cardinalities", started, Duration::from_secs(1));
}

#[test]
fn criterion_03_alphabet_seed() {
    let started = Instant::now();
    let registry = ReferenceRegistry::seed_default();

    // Loading validates: every unit passes the feature-exclusivity rules.
    let alphabet = Alphabet::russian_seed(&registry).unwrap();
    assert_eq!(alphabet.len(), 77);

    let labialized: BTreeSet<&str> = alphabet
        .units()
        .iter()
        .filter(|u| u.labialization == Some(1))
        .map(|u| u.symbol.as_str())
        .collect();
    let o_u_vowels: BTreeSet<&str> = alphabet
        .units()
        .iter()
        .filter(|u| {
            u.kind() == UnitKind::Vowel && (u.symbol.starts_with('o') || u.symbol.starts_with('u'))
        })
        .map(|u| u.symbol.as_str())
        .collect();
    assert_eq!(labialized, o_u_vowels, "labialized units must be exactly the O/U vowels");

    // The same alphabet installed by init --with-seed loads back.
    let dir = tempfile::tempdir().unwrap();
    let mut store = CorpusStore::init(dir.path()).unwrap();
    speechframe_core::refbooks::seed_store(&mut store, true).unwrap();
    store.save().unwrap();
    let reopened = CorpusStore::open(dir.path()).unwrap();
    let from_disk = Alphabet::from_store(&reopened, &registry).unwrap();
    assert_eq!(from_disk.len(), 77);

    pass(3, "77-unit Russian alphabet, labialized = O/U vowels", started, Duration::from_secs(1));
}

#[test]
fn criterion_04_classifier_tables() {
    let started = Instant::now();
    let registry = ReferenceRegistry::seed_default();

    assert_eq!(classify_tempo(8.0, &registry).unwrap().name, "normal");
    assert_eq!(classify_tempo(12.0, &registry).unwrap().name, "accelerated");
    assert_eq!(classify_tempo(12.0 + 1e-9, &registry).unwrap().name, "fast");

    let strengths: Vec<u8> =
        SyllablePosition::ALL.iter().map(|p| potebnya_strength(*p)).collect();
    assert_eq!(strengths, [3, 2, 1, 1]);

    let stressed = |l, r| {
        stress_variant(&StressContext::StressedVowel { left_soft: l, right_soft: r }).unwrap()
    };
    assert_eq!(stressed(false, false), StressVariant::StressedBetweenHard);
    assert_eq!(stressed(false, true), StressVariant::StressedHardSoft);
    assert_eq!(stressed(true, false), StressVariant::StressedSoftHard);
    assert_eq!(stressed(true, true), StressVariant::StressedBetweenSoft);

    let unstressed = |l, p| {
        stress_variant(&StressContext::UnstressedVowel { left_soft: l, position: p }).unwrap()
    };
    use SyllablePosition::{FirstPreStressed, PostStressed, SecondPreStressedOrEarlier};
    assert_eq!(unstressed(false, FirstPreStressed), StressVariant::Strength2AfterHard);
    assert_eq!(unstressed(false, SecondPreStressedOrEarlier), StressVariant::Strength1AfterHard);
    assert_eq!(unstressed(false, PostStressed), StressVariant::Strength1AfterHard);
    assert_eq!(unstressed(true, FirstPreStressed), StressVariant::Strength2AfterSoft);
    assert_eq!(unstressed(true, SecondPreStressedOrEarlier), StressVariant::Strength1AfterSoft);
    assert_eq!(unstressed(true, PostStressed), StressVariant::Strength1AfterSoft);

    assert_eq!(stress_variant(&StressContext::Consonant).unwrap(), StressVariant::ConsonantNoStress);
    assert_eq!(stress_variant(&StressContext::Pause).unwrap(), StressVariant::Pause);

    pass(4, "tempo bands, Potebnya strengths, stress variants", started, Duration::from_secs(1));
}

/// Independent one-pass conjunctive filter over raw records; the oracle
/// side of criterion 5.
fn conjunction_oracle(store: &CorpusStore, criteria: &[FilterCriterion]) -> BTreeSet<String> {
    let speakers: BTreeMap<i64, &Record> = store
        .rows(tables::SPEAKER)
        .map(|(_, rec)| (field::int(rec, "ID").unwrap(), rec))
        .collect();
    store
        .rows(tables::SPEECH_SIGNAL)
        .filter(|(_, rec)| {
            criteria.iter().all(|c| {
                use SearchAttribute as A;
                let int = |f: &str| field::int(rec, f).unwrap();
                match (c.attribute, &c.value) {
                    (A::SpeakerSex, FilterValue::Code(code)) => speakers
                        .get(&int("SPEAKER_ID"))
                        .is_some_and(|sp| field::int(sp, "SEX").unwrap() == *code),
                    (A::Dialect, FilterValue::Code(code)) => int("DIALECT_ID") == *code,
                    (A::Emotion, FilterValue::Code(code)) => int("EMOTIONAL_STATE") == *code,
                    (A::VoiceType, FilterValue::Code(code)) => int("VOICE_TYPE_ID") == *code,
                    (A::SpeechType, FilterValue::Code(code)) => int("SPEECH_TYPE_ID") == *code,
                    (A::Tempo, FilterValue::Code(code)) => int("SPEECH_TEMP_ID") == *code,
                    (A::Sickness, FilterValue::Code(code)) => int("SPEECH_SICKNESS") == *code,
                    (A::Defect, FilterValue::Code(code)) => int("SPEECH_DEFECT") == *code,
                    (A::Accent, FilterValue::Flag(flag)) => (int("ACIENT") != 0) == *flag,
                    (A::AcousticEnvironment, FilterValue::Code(code)) => {
                        int("ACOUSTIC_ENVIRONMENT") == *code
                    }
                    (A::Channel, FilterValue::Code(code)) => {
                        field::opt_int(rec, "CHANNEL").unwrap() == Some(*code)
                    }
                    (A::Device, FilterValue::Code(code)) => int("RECORDING_DEVICE") == *code,
                    (A::Noise, FilterValue::Code(code)) => int("SYNTHETIC_NOISE_TYPE") == *code,
                    (A::Format, FilterValue::Code(code)) => int("FILE_FORMAT") == *code,
                    (A::RecordDate, FilterValue::DateRange(lo, hi)) => {
                        let d = field::date(rec, "RECORD_DATE").unwrap();
                        d >= *lo && d <= *hi
                    }
                    (A::Length, FilterValue::RealRange(lo, hi)) => {
                        let l = field::real(rec, "LENGTH").unwrap();
                        l >= *lo && l <= *hi
                    }
                    (A::SpeakerId, FilterValue::Code(code)) => int("SPEAKER_ID") == *code,
                    (A::SpeakerAge, FilterValue::IntRange(lo, hi)) => {
                        speakers.get(&int("SPEAKER_ID")).is_some_and(|sp| {
                            let birth = field::date(sp, "BIRTH_DATE").unwrap();
                            let when = field::date(rec, "RECORD_DATE").unwrap();
                            when.years_since(birth)
                                .is_some_and(|a| i64::from(a) >= *lo && i64::from(a) <= *hi)
                        })
                    }
                    _ => false,
                }
            })
        })
        .map(|(_, rec)| field::text(rec, "FILE_NAME").unwrap().to_owned())
        .collect()
}

#[test]
fn criterion_05_staged_filter_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let corpora = 100;
    let lists_per_corpus = 100;

    for corpus_idx in 0..corpora {
        let store = fixtures::random_corpus(&FixtureOptions {
            seed: 9_000 + corpus_idx,
            speakers: 40,
            units: 15,
            signals: 500,
            manual_segmented: 0,
            automatic_segmented: 0,
        });
        for _ in 0..lists_per_corpus {
            let mut criteria = fixtures::random_criteria(&mut rng, 5);
            let staged: BTreeSet<String> = staged_search(&store, &criteria)
                .unwrap()
                .into_iter()
                .map(|s| s.file_name)
                .collect();
            let expected = conjunction_oracle(&store, &criteria);
            assert_eq!(staged, expected, "corpus {corpus_idx}, criteria {criteria:?}");

            criteria.shuffle(&mut rng);
            let permuted: BTreeSet<String> = staged_search(&store, &criteria)
                .unwrap()
                .into_iter()
                .map(|s| s.file_name)
                .collect();
            assert_eq!(permuted, expected, "permutation changed the result set");
        }
    }

    pass(
        5,
        "staged search equals the conjunction oracle on 100 corpora x 100 criteria lists",
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_06_cascade_integrity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let dir = tempfile::tempdir().unwrap();

    let mut store = fixtures::random_corpus(&FixtureOptions {
        seed: 660,
        speakers: 30,
        units: 12,
        signals: 120,
        manual_segmented: 40,
        automatic_segmented: 10,
    });

    let mut next_speaker: i64 = 1_000;
    let mut next_signal: i64 = 10_000;
    let mut byte_checks = 0usize;
    let mut ops = 0usize;
    let mut performed = BTreeMap::<&str, usize>::new();

    while ops < 1_000 {
        let roll = rng.gen_range(0..100);
        let did: &str = if roll < 20 {
            // Insert a speaker.
            next_speaker += 1;
            let rec: Record = [
                ("ID".to_owned(), Value::Integer(next_speaker)),
                ("SEX".to_owned(), Value::Integer(rng.gen_range(1..=2))),
                ("NAME".to_owned(), Value::Text(format!("N{next_speaker}"))),
                ("SURNAME".to_owned(), Value::Text(format!("S{next_speaker}"))),
                ("FAMILY_NAME".to_owned(), Value::Text(format!("P{next_speaker}"))),
                (
                    "BIRTH_DATE".to_owned(),
                    Value::Date(NaiveDate::from_ymd_opt(1970, 1, 1).unwrap()),
                ),
            ]
            .into_iter()
            .collect();
            store.insert(tables::SPEAKER, rec).unwrap();
            "insert speaker"
        } else if roll < 45 {
            // Insert a signal under a random existing speaker.
            let speakers: Vec<i64> = store
                .rows(tables::SPEAKER)
                .map(|(_, r)| field::int(r, "ID").unwrap())
                .collect();
            let speaker = speakers[rng.gen_range(0..speakers.len())];
            next_signal += 1;
            add_signal(
                &mut store,
                &SpeechSignal {
                    file_name: format!("extra_{next_signal}.wav"),
                    speech_unit: rng.gen_range(1..=12),
                    length_s: rng.gen_range(0.5..6.0),
                    record_date: NaiveDate::from_ymd_opt(2022, 3, 14).unwrap(),
                    file_format: rng.gen_range(1..=2),
                    noise: 0,
                    recording_device: rng.gen_range(1..=2),
                    dialect: rng.gen_range(1..=5),
                    acoustic_environment: rng.gen_range(1..=2),
                    speech_type: rng.gen_range(1..=2),
                    voice_type: rng.gen_range(1..=4),
                    speech_tempo: rng.gen_range(1..=3),
                    channel: None,
                    sickness: 1,
                    accent: rng.gen_bool(0.2),
                    speech_defect: 1,
                    emotional_state: rng.gen_range(1..=3),
                    speaker,
                },
            )
            .unwrap();
            "insert signal"
        } else if roll < 55 {
            // Insert a segmentation row at the next position.
            let files: Vec<(String, f64)> = store
                .rows(tables::SPEECH_SIGNAL)
                .map(|(_, r)| {
                    (
                        field::text(r, "FILE_NAME").unwrap().to_owned(),
                        field::real(r, "LENGTH").unwrap(),
                    )
                })
                .collect();
            let (file, length) = files[rng.gen_range(0..files.len())].clone();
            let existing: Vec<(i64, f64)> = store
                .rows(tables::SEGMENTATION)
                .filter(|(_, r)| {
                    field::text(r, "FILENAME").unwrap() == file
                        && field::text(r, "SOURCE").unwrap() == "manual"
                })
                .map(|(_, r)| {
                    (field::int(r, "POSITION").unwrap(), field::real(r, "START_AUDIO").unwrap())
                })
                .collect();
            let position = existing.iter().map(|(p, _)| *p).max().unwrap_or(0) + 1;
            let last_start =
                existing.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
            let start = if last_start.is_finite() {
                (last_start + length) / 2.0
            } else {
                0.0
            };
            if start < length {
                add_segmentation(
                    &mut store,
                    &SegmentationRecord {
                        position,
                        file_name: file,
                        start_time: start,
                        symbol: "b".to_owned(),
                        source: SegmentationSource::Manual,
                        expert_count: Some(2),
                    },
                )
                .unwrap();
            }
            "insert segmentation"
        } else if roll < 70 {
            // Cascade-delete a speaker with everything hanging off them.
            let speakers: Vec<i64> = store
                .rows(tables::SPEAKER)
                .map(|(_, r)| field::int(r, "ID").unwrap())
                .collect();
            if speakers.len() <= 5 {
                continue;
            }
            let victim = speakers[rng.gen_range(0..speakers.len())];
            let counts = store.delete_cascade(tables::SPEAKER, &Key::single(victim)).unwrap();
            assert_eq!(counts["SPEAKER"], 1);
            "delete speaker cascade"
        } else if roll < 80 {
            // Cascade-delete a signal.
            let files: Vec<String> = store
                .rows(tables::SPEECH_SIGNAL)
                .map(|(_, r)| field::text(r, "FILE_NAME").unwrap().to_owned())
                .collect();
            if files.is_empty() {
                continue;
            }
            let victim = &files[rng.gen_range(0..files.len())];
            store
                .delete_cascade(tables::SPEECH_SIGNAL, &Key::single(victim.as_str()))
                .unwrap();
            "delete signal cascade"
        } else if roll < 92 {
            // Rename a signal key; references must follow.
            let files: Vec<String> = store
                .rows(tables::SPEECH_SIGNAL)
                .map(|(_, r)| field::text(r, "FILE_NAME").unwrap().to_owned())
                .collect();
            if files.is_empty() {
                continue;
            }
            let victim = &files[rng.gen_range(0..files.len())];
            next_signal += 1;
            store
                .update_key_cascade(
                    tables::SPEECH_SIGNAL,
                    &Key::single(victim.as_str()),
                    Key::single(format!("renamed_{next_signal}.wav")),
                )
                .unwrap();
            "update signal key cascade"
        } else {
            // Attempt a restricted deletion: a book entry still in use.
            let sexes_in_use: BTreeSet<i64> = store
                .rows(tables::SPEAKER)
                .map(|(_, r)| field::int(r, "SEX").unwrap())
                .collect();
            let Some(sex) = sexes_in_use.into_iter().next() else {
                continue;
            };
            let check_bytes = byte_checks < 10;
            let before = if check_bytes {
                store.save_to(dir.path()).unwrap();
                Some(read_dir_bytes(dir.path()))
            } else {
                None
            };
            let err = store.delete_cascade(tables::BOOK_SEX, &Key::single(sex)).unwrap_err();
            assert!(matches!(err, StoreError::Restricted { .. }), "got {err}");
            if let Some(before) = before {
                store.save().unwrap();
                assert_eq!(before, read_dir_bytes(dir.path()), "restricted delete changed state");
                byte_checks += 1;
            }
            "restricted delete attempt"
        };

        let violations = store.integrity_check();
        assert!(violations.is_empty(), "after op {ops} ({did}): {:?}", violations.first());
        ops += 1;
        *performed.entry(did).or_default() += 1;
    }

    assert!(ops >= 1_000);
    assert!(byte_checks > 0, "no restricted deletions were byte-checked");
    assert!(performed.len() >= 5, "op mix too narrow: {performed:?}");

    pass(
        6,
        "1000 randomized mutations keep integrity_check empty; restricted deletes are byte-stable",
        started,
        Duration::from_secs(60),
    );
}

fn read_dir_bytes(path: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(path).unwrap() {
        let entry = entry.unwrap();
        if entry.path().is_file() {
            out.insert(
                entry.file_name().to_string_lossy().into_owned(),
                fs::read(entry.path()).unwrap(),
            );
        }
    }
    out
}

#[test]
fn criterion_07_statistics_fixture() {
    let started = Instant::now();
    let store = fixtures::paper_shaped_corpus();
    let stats = corpus_stats(&store).unwrap();

    assert_eq!(stats.speech_unit_count, 77);
    assert_eq!(stats.speaker_count, 193);
    assert_eq!(stats.speaker_count_by_sex.get(&1), Some(&49));
    assert_eq!(stats.speaker_count_by_sex.get(&2), Some(&144));
    assert_eq!(stats.signal_count, 124);
    assert!(
        (stats.total_duration_s - 842.0).abs() < 1e-6,
        "duration {}",
        stats.total_duration_s
    );
    assert_eq!(stats.manually_segmented_signal_count, 103);

    pass(7, "paper-shaped fixture statistics", started, Duration::from_secs(5));
}

#[test]
fn criterion_08_segmentation_validation() {
    let started = Instant::now();

    // Crafted defects, each rejected with its specific violation.
    let mut store = fixtures::random_corpus(&FixtureOptions {
        seed: 808,
        signals: 2,
        manual_segmented: 0,
        automatic_segmented: 0,
        ..Default::default()
    });
    let file = "sig_00001.wav";
    let length = store
        .rows(tables::SPEECH_SIGNAL)
        .find(|(_, r)| field::text(r, "FILE_NAME").unwrap() == file)
        .map(|(_, r)| field::real(r, "LENGTH").unwrap())
        .unwrap();
    let seg = |position: i64, start: f64| SegmentationRecord {
        position,
        file_name: file.to_owned(),
        start_time: start,
        symbol: "b".to_owned(),
        source: SegmentationSource::Manual,
        expert_count: Some(2),
    };
    add_segmentation(&mut store, &seg(1, 0.0)).unwrap();
    add_segmentation(&mut store, &seg(2, 0.10 * length)).unwrap();
    add_segmentation(&mut store, &seg(4, 0.20 * length)).unwrap();
    add_segmentation(&mut store, &seg(5, 0.15 * length)).unwrap();
    let report = validate_segmentation(&store, file, SegmentationSource::Manual).unwrap();
    assert!(report.contains(&SegmentationViolation::PositionGap { after: 2 }), "{report:?}");
    assert!(
        report.contains(&SegmentationViolation::NonMonotonicStart { position: 5 }),
        "{report:?}"
    );

    // Out-of-range starts and unknown symbols require hand-edited files.
    let dir = tempfile::tempdir().unwrap();
    let mut edited = fixtures::random_corpus(&FixtureOptions {
        seed: 809,
        signals: 1,
        manual_segmented: 0,
        automatic_segmented: 0,
        ..Default::default()
    });
    add_segmentation(
        &mut edited,
        &SegmentationRecord {
            position: 1,
            file_name: "sig_00001.wav".to_owned(),
            start_time: 0.0,
            symbol: "b".to_owned(),
            source: SegmentationSource::Manual,
            expert_count: Some(2),
        },
    )
    .unwrap();
    add_segmentation(
        &mut edited,
        &SegmentationRecord {
            position: 2,
            file_name: "sig_00001.wav".to_owned(),
            start_time: 0.1,
            symbol: "a1".to_owned(),
            source: SegmentationSource::Manual,
            expert_count: Some(2),
        },
    )
    .unwrap();
    edited.save_to(dir.path()).unwrap();
    let seg_file = dir.path().join("SEGMENTATION.jsonl");
    let text = fs::read_to_string(&seg_file)
        .unwrap()
        .replace("\"START_AUDIO\":0.1", "\"START_AUDIO\":5000.0")
        .replace("\"TYPE_ID\":\"b\"", "\"TYPE_ID\":\"no-such-unit\"");
    fs::write(&seg_file, text).unwrap();
    let reopened =
        CorpusStore::open_with(dir.path(), OpenOptions { tolerate_violations: true }).unwrap();
    let report =
        validate_segmentation(&reopened, "sig_00001.wav", SegmentationSource::Manual).unwrap();
    assert!(
        report.iter().any(|v| matches!(v, SegmentationViolation::StartBeyondLength { .. })),
        "{report:?}"
    );
    assert!(
        report.iter().any(
            |v| matches!(v, SegmentationViolation::UnknownSymbol { symbol, .. } if symbol == "no-such-unit")
        ),
        "{report:?}"
    );

    // Property: intervals tile [first start, signal length] on valid
    // randomized fixtures.
    let mut tiled = 0;
    for seed in 0..25 {
        let store = fixtures::random_corpus(&FixtureOptions {
            seed: 8_100 + seed,
            signals: 20,
            manual_segmented: 12,
            automatic_segmented: 6,
            ..Default::default()
        });
        for (_, rec) in store.rows(tables::SPEECH_SIGNAL) {
            let file = field::text(rec, "FILE_NAME").unwrap();
            let length = field::real(rec, "LENGTH").unwrap();
            for source in [SegmentationSource::Manual, SegmentationSource::Automatic] {
                let intervals = segment_intervals(&store, file, source).unwrap();
                if intervals.is_empty() {
                    continue;
                }
                tiled += 1;
                for pair in intervals.windows(2) {
                    assert_eq!(pair[0].end, pair[1].start, "{file}: gap or overlap");
                }
                for iv in &intervals {
                    assert!(iv.start < iv.end, "{file}: empty interval");
                }
                assert_eq!(intervals.last().unwrap().end, length, "{file}: must end at length");
            }
        }
    }
    assert!(tiled >= 100, "only {tiled} segmentations exercised");

    pass(8, "segmentation defects rejected; intervals tile the signal", started, Duration::from_secs(5));
}

#[test]
fn criterion_09_coverage_rule() {
    let started = Instant::now();
    for seed in 0..10 {
        let store = fixtures::random_corpus(&FixtureOptions {
            seed: 9_900 + seed,
            signals: 30,
            manual_segmented: 18,
            automatic_segmented: 5,
            ..Default::default()
        });
        let registry = ReferenceRegistry::from_store(&store).unwrap();
        let alphabet = Alphabet::from_store(&store, &registry).unwrap();
        let report = symbol_coverage(&store, &alphabet, SegmentationSource::Manual).unwrap();

        // Brute-force recount straight off the segmentation table.
        let mut brute: BTreeMap<String, usize> =
            alphabet.symbols().map(|s| (s.to_owned(), 0)).collect();
        for (_, rec) in store.rows(tables::SEGMENTATION) {
            if field::text(rec, "SOURCE").unwrap() != "manual" {
                continue;
            }
            let symbol = field::text(rec, "TYPE_ID").unwrap();
            *brute.get_mut(symbol).expect("segmentation symbols are alphabet members") += 1;
        }
        assert_eq!(report.counts, brute, "seed {seed}");
        let expected_under: Vec<String> = brute
            .iter()
            .filter(|(_, n)| **n < 3)
            .map(|(s, _)| s.clone())
            .collect();
        assert_eq!(report.undercovered, expected_under, "seed {seed}");
    }

    pass(9, "coverage flags exactly the symbols under three occurrences", started, Duration::from_secs(5));
}

#[test]
fn criterion_10_persistence_round_trip() {
    let started = Instant::now();
    for seed in 0..10 {
        let dir = tempfile::tempdir().unwrap();
        let mut store = fixtures::random_corpus(&FixtureOptions {
            seed: 10_000 + seed,
            speakers: 15,
            units: 8,
            signals: 50,
            manual_segmented: 20,
            automatic_segmented: 8,
        });
        store.save_to(dir.path()).unwrap();
        let reopened = CorpusStore::open(dir.path()).unwrap();
        for name in tables::ALL {
            let a: BTreeMap<&Key, &Record> = store.rows(name).collect();
            let b: BTreeMap<&Key, &Record> = reopened.rows(name).collect();
            assert_eq!(a, b, "seed {seed}, table {name}");
        }
    }

    pass(10, "save/open preserves every table as a record set", started, Duration::from_secs(10));
}

#[test]
fn criterion_11_query_catalog() {
    let started = Instant::now();
    let catalog = list_canned_queries();
    assert_eq!(catalog.len(), 37);

    let bare = CorpusStore::empty();
    let fixture = fixtures::paper_shaped_corpus();

    for query in &catalog {
        query.execute(&bare, None).unwrap_or_else(|e| panic!("{} on empty: {e}", query.name));
        let outcome = query
            .execute(&fixture, None)
            .unwrap_or_else(|e| panic!("{} on fixture: {e}", query.name));

        // Every entry must reduce to the primitive operations.
        match (&query.kind, outcome) {
            (CannedQueryKind::SignalsBy { attribute, default_value }, QueryOutcome::Signals(got)) => {
                let registry = ReferenceRegistry::from_store(&fixture).unwrap();
                let criterion =
                    FilterCriterion::parse(attribute.name(), default_value, &registry).unwrap();
                let direct = staged_search(&fixture, &[criterion]).unwrap();
                assert_eq!(got, direct, "{}", query.name);
            }
            (CannedQueryKind::CountBy { attribute }, QueryOutcome::Histogram(got)) => {
                assert_eq!(got, count_by(&fixture, *attribute).unwrap(), "{}", query.name);
            }
            (CannedQueryKind::Stat(_), QueryOutcome::Statistics(got)) => {
                assert_eq!(got, corpus_stats(&fixture).unwrap(), "{}", query.name);
            }
            (CannedQueryKind::Stat(_), QueryOutcome::SpeakersBySex(got)) => {
                assert_eq!(
                    got,
                    corpus_stats(&fixture).unwrap().speaker_count_by_sex,
                    "{}",
                    query.name
                );
            }
            (CannedQueryKind::Stat(_), QueryOutcome::Duration(got)) => {
                assert_eq!(got, corpus_stats(&fixture).unwrap().total_duration_s, "{}", query.name);
            }
            (CannedQueryKind::Preset { criteria }, QueryOutcome::Signals(got)) => {
                let registry = ReferenceRegistry::from_store(&fixture).unwrap();
                let parsed: Vec<FilterCriterion> = criteria
                    .iter()
                    .map(|(a, raw)| FilterCriterion::parse(a.name(), raw, &registry).unwrap())
                    .collect();
                assert_eq!(got, staged_search(&fixture, &parsed).unwrap(), "{}", query.name);
            }
            (kind, outcome) => panic!("{}: unexpected outcome {outcome:?} for {kind:?}", query.name),
        }
    }

    pass(11, "37 canned queries, all reducible to the primitives", started, Duration::from_secs(5));
}
