//! Deterministic corpus generators for tests and benchmarks.
//!
//! All randomness flows from a caller-provided seed, so every generated
//! corpus is exactly reproducible.

use chrono::NaiveDate;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::corpus::{
    add_segmentation, add_signal, add_speaker, add_speech_unit, SegmentationRecord,
    SegmentationSource, Speaker, SpeechSignal, SpeechUnit,
};
use crate::query::{FilterCriterion, SearchAttribute};
use crate::refbooks::{seed_store, ReferenceRegistry};
use crate::store::{tables, CorpusStore, Record, Value};

/// Shape of a generated corpus.
#[derive(Debug, Clone)]
pub struct FixtureOptions {
    pub seed: u64,
    pub speakers: usize,
    pub units: usize,
    pub signals: usize,
    /// How many signals receive manual segmentation.
    pub manual_segmented: usize,
    /// How many signals receive automatic segmentation.
    pub automatic_segmented: usize,
}

impl Default for FixtureOptions {
    fn default() -> Self {
        FixtureOptions {
            seed: 7,
            speakers: 20,
            units: 10,
            signals: 40,
            manual_segmented: 12,
            automatic_segmented: 6,
        }
    }
}

fn insert_titled(store: &mut CorpusStore, table: &str, id_field: &str, id: i64, title: &str) {
    let rec: Record = [
        (id_field.to_owned(), Value::Integer(id)),
        ("TITLE".to_owned(), Value::Text(title.to_owned())),
    ]
    .into_iter()
    .collect();
    store.insert(table, rec).expect("fixture book entry");
}

/// An in-memory corpus with seeded books, the Russian alphabet, and the
/// handful of extra book entries signals need (formats, devices,
/// channels, speech types, plus some emotions, defects and sicknesses for
/// search variety).
pub fn base_corpus() -> CorpusStore {
    let mut store = CorpusStore::empty();
    seed_store(&mut store, true).expect("seeding a fresh store succeeds");

    let fmt = |id: i64, freq: f64, file_type: &str| -> Record {
        [
            ("ID".to_owned(), Value::Integer(id)),
            ("DISCRETIZATION_FREQUENCY".to_owned(), Value::Real(freq)),
            ("BITRATE".to_owned(), Value::Integer(16)),
            ("FILE_TYPE".to_owned(), Value::Text(file_type.to_owned())),
            ("NUMBER_OF_CHANNELS".to_owned(), Value::Integer(1)),
        ]
        .into_iter()
        .collect()
    };
    store.insert(tables::FILE_FORMAT, fmt(1, 44100.0, "wav")).expect("fixture format");
    store.insert(tables::FILE_FORMAT, fmt(2, 16000.0, "flac")).expect("fixture format");

    let dev = |id: i64, ty: &str, bw: f64| -> Record {
        [
            ("DEVICE_ID".to_owned(), Value::Integer(id)),
            ("TYPE".to_owned(), Value::Text(ty.to_owned())),
            ("BANDWIDTH".to_owned(), Value::Real(bw)),
        ]
        .into_iter()
        .collect()
    };
    store.insert(tables::RECORDING_DEVICE, dev(1, "condenser microphone", 20000.0)).expect("fixture device");
    store.insert(tables::RECORDING_DEVICE, dev(2, "mobile phone", 8000.0)).expect("fixture device");

    insert_titled(&mut store, tables::COMMUNICATION_CHANNEL, "ID", 1, "direct line");
    insert_titled(&mut store, tables::COMMUNICATION_CHANNEL, "ID", 2, "telephone");
    insert_titled(&mut store, tables::BOOK_SPEECH_TYPES, "ID", 1, "reading");
    insert_titled(&mut store, tables::BOOK_SPEECH_TYPES, "ID", 2, "spontaneous");
    insert_titled(&mut store, tables::BOOK_EMOTIONS, "ID_EMOTION", 2, "joy");
    insert_titled(&mut store, tables::BOOK_EMOTIONS, "ID_EMOTION", 3, "sadness");
    insert_titled(&mut store, tables::BOOK_DEFECTS, "ID_DEFECT", 2, "lisp");
    insert_titled(&mut store, tables::SICKNESS, "ID_SICKNESS", 2, "laryngitis");

    let noise: Record = [
        ("ID_NOISE".to_owned(), Value::Integer(1)),
        ("NOISE_TYPE".to_owned(), Value::Text("white noise".to_owned())),
        ("SNR_DB".to_owned(), Value::Real(15.0)),
    ]
    .into_iter()
    .collect();
    store.insert(tables::NOISE, noise).expect("fixture noise");

    store
}

/// A randomized corpus of the given shape. Everything inserted is valid:
/// segmentations are contiguous and monotone, expert checks pass.
pub fn random_corpus(opts: &FixtureOptions) -> CorpusStore {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut store = base_corpus();
    let registry = ReferenceRegistry::from_store(&store).expect("seeded books read back");
    let alphabet = Alphabet::from_store(&store, &registry).expect("seeded alphabet is valid");
    let symbols: Vec<String> = alphabet.symbols().map(str::to_owned).collect();

    for id in 1..=opts.speakers as i64 {
        let birth = NaiveDate::from_ymd_opt(
            rng.gen_range(1940..=2005),
            rng.gen_range(1..=12),
            rng.gen_range(1..=28),
        )
        .expect("valid date");
        add_speaker(
            &mut store,
            &Speaker {
                id,
                sex: rng.gen_range(1..=2),
                name: format!("Name{id}"),
                surname: format!("Surname{id}"),
                patronymic: format!("Patronymic{id}"),
                birth_date: birth,
            },
        )
        .expect("fixture speaker");
    }

    for id in 1..=opts.units as i64 {
        let n = rng.gen_range(1..=6);
        let transcription: Vec<String> =
            (0..n).map(|_| symbols[rng.gen_range(0..symbols.len())].clone()).collect();
        add_speech_unit(
            &mut store,
            &SpeechUnit {
                id,
                spelling: format!("unit{id}"),
                transcription,
                unit_type: rng.gen_range(1..=4),
            },
        )
        .expect("fixture unit");
    }

    let mut files = Vec::with_capacity(opts.signals);
    for i in 1..=opts.signals {
        let file_name = format!("sig_{i:05}.wav");
        let record_date = NaiveDate::from_ymd_opt(
            rng.gen_range(2018..=2024),
            rng.gen_range(1..=12),
            rng.gen_range(1..=28),
        )
        .expect("valid date");
        let signal = SpeechSignal {
            file_name: file_name.clone(),
            speech_unit: rng.gen_range(1..=opts.units as i64),
            length_s: rng.gen_range(0.5..10.0),
            record_date,
            file_format: rng.gen_range(1..=2),
            noise: rng.gen_range(0..=1),
            recording_device: rng.gen_range(1..=2),
            dialect: rng.gen_range(1..=5),
            acoustic_environment: rng.gen_range(1..=2),
            speech_type: rng.gen_range(1..=2),
            voice_type: rng.gen_range(1..=4),
            speech_tempo: rng.gen_range(1..=3),
            channel: if rng.gen_bool(0.3) { None } else { Some(rng.gen_range(1..=2)) },
            sickness: rng.gen_range(1..=2),
            accent: rng.gen_bool(0.25),
            speech_defect: rng.gen_range(1..=2),
            emotional_state: rng.gen_range(1..=3),
            speaker: rng.gen_range(1..=opts.speakers as i64),
        };
        add_signal(&mut store, &signal).expect("fixture signal");
        files.push((file_name, signal.length_s));
    }

    for (i, (file_name, length)) in files.iter().enumerate() {
        if i < opts.manual_segmented {
            plant_segmentation(
                &mut store,
                &mut rng,
                file_name,
                *length,
                &symbols,
                SegmentationSource::Manual,
            );
        }
        if i < opts.automatic_segmented {
            plant_segmentation(
                &mut store,
                &mut rng,
                file_name,
                *length,
                &symbols,
                SegmentationSource::Automatic,
            );
        }
    }

    debug_assert!(store.integrity_check().is_empty());
    store
}

fn plant_segmentation(
    store: &mut CorpusStore,
    rng: &mut ChaCha8Rng,
    file_name: &str,
    length: f64,
    symbols: &[String],
    source: SegmentationSource,
) {
    let n = rng.gen_range(2..=8);
    let mut starts: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..length * 0.99)).collect();
    starts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    starts.dedup();
    for (i, start) in starts.iter().enumerate() {
        add_segmentation(
            store,
            &SegmentationRecord {
                position: i as i64 + 1,
                file_name: file_name.to_owned(),
                start_time: *start,
                symbol: symbols[rng.gen_range(0..symbols.len())].clone(),
                source,
                expert_count: match source {
                    SegmentationSource::Manual => Some(rng.gen_range(2..=3)),
                    SegmentationSource::Automatic => None,
                },
            },
        )
        .expect("fixture segmentation");
    }
}

/// A corpus mirroring the published shape: 193 speakers (49 male, 144
/// female), 77 speech units, 124 signals totalling exactly 842.0 seconds,
/// and manual segmentation for 103 signals in which every alphabet
/// symbol occurs exactly three times, checked by two experts.
pub fn paper_shaped_corpus() -> CorpusStore {
    let mut store = base_corpus();
    let registry = ReferenceRegistry::from_store(&store).expect("seeded books read back");
    let alphabet = Alphabet::from_store(&store, &registry).expect("seeded alphabet is valid");
    let symbols: Vec<String> = alphabet.symbols().map(str::to_owned).collect();
    assert_eq!(symbols.len(), 77);

    for id in 1..=193i64 {
        let sex = if id <= 49 { 1 } else { 2 };
        add_speaker(
            &mut store,
            &Speaker {
                id,
                sex,
                name: format!("Name{id}"),
                surname: format!("Surname{id}"),
                patronymic: format!("Patronymic{id}"),
                birth_date: NaiveDate::from_ymd_opt(1950 + (id % 50) as i32, 1 + (id % 12) as u32, 1 + (id % 28) as u32)
                    .expect("valid date"),
            },
        )
        .expect("speaker");
    }

    // One speech unit per alphabet symbol: 77 units of the "sound" type.
    for (i, symbol) in symbols.iter().enumerate() {
        add_speech_unit(
            &mut store,
            &SpeechUnit {
                id: i as i64 + 1,
                spelling: symbol.clone(),
                transcription: vec![symbol.clone()],
                unit_type: 4,
            },
        )
        .expect("unit");
    }

    // 100 signals of 6.5 s plus 24 of 8.0 s sum to exactly 842.0 s in
    // binary floating point.
    let mut lengths = vec![6.5; 100];
    lengths.extend(std::iter::repeat_n(8.0, 24));
    assert_eq!(lengths.iter().sum::<f64>(), 842.0);

    for (i, length) in lengths.iter().enumerate() {
        let id = i as i64 + 1;
        add_signal(
            &mut store,
            &SpeechSignal {
                file_name: format!("sig_{:03}.wav", id),
                speech_unit: 1 + (i as i64 % 77),
                length_s: *length,
                record_date: NaiveDate::from_ymd_opt(2021, 1 + (i % 12) as u32, 1 + (i % 28) as u32)
                    .expect("valid date"),
                file_format: 1,
                noise: 0,
                recording_device: 1,
                dialect: 1 + (id % 5),
                acoustic_environment: 1 + (id % 2),
                speech_type: 1,
                voice_type: 1 + (id % 4),
                speech_tempo: 1 + (id % 3),
                channel: None,
                sickness: 1,
                accent: false,
                speech_defect: 1,
                emotional_state: 1,
                speaker: 1 + (id % 193),
            },
        )
        .expect("signal");
    }

    // Manual segmentation for the first 103 signals. 77 symbols x 3
    // occurrences = 231 rows; 25 signals carry 3 rows, 78 carry 2.
    let mut plan: Vec<String> = Vec::with_capacity(231);
    for _ in 0..3 {
        plan.extend(symbols.iter().cloned());
    }
    let mut next = 0usize;
    for i in 0..103usize {
        let rows = if i < 25 { 3 } else { 2 };
        for p in 0..rows {
            add_segmentation(
                &mut store,
                &SegmentationRecord {
                    position: p as i64 + 1,
                    file_name: format!("sig_{:03}.wav", i + 1),
                    start_time: p as f64,
                    symbol: plan[next].clone(),
                    source: SegmentationSource::Manual,
                    expert_count: Some(2),
                },
            )
            .expect("segmentation");
            next += 1;
        }
    }
    assert_eq!(next, 231);

    debug_assert!(store.integrity_check().is_empty());
    store
}

/// A random well-typed criteria list for the given corpus shape. Values
/// are drawn around the code ranges `random_corpus` uses, so criteria hit
/// non-trivial subsets.
pub fn random_criteria(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<FilterCriterion> {
    let n = rng.gen_range(0..=max_len);
    (0..n)
        .map(|_| {
            let attribute = SearchAttribute::ALL[rng.gen_range(0..SearchAttribute::ALL.len())];
            match attribute {
                SearchAttribute::Accent => FilterCriterion::accent(rng.gen_bool(0.5)),
                SearchAttribute::RecordDate => {
                    let a = NaiveDate::from_ymd_opt(rng.gen_range(2017..=2025), 1, 1)
                        .expect("valid date");
                    let b = NaiveDate::from_ymd_opt(rng.gen_range(2017..=2025), 12, 28)
                        .expect("valid date");
                    FilterCriterion::record_date_range(a.min(b), a.max(b))
                }
                SearchAttribute::Length => {
                    let lo = rng.gen_range(0.0..6.0);
                    FilterCriterion::length_range(lo, lo + rng.gen_range(0.5..6.0))
                }
                SearchAttribute::SpeakerAge => {
                    let lo = rng.gen_range(10..=70);
                    FilterCriterion::age_range(lo, lo + rng.gen_range(0..=30))
                }
                SearchAttribute::SpeakerId => {
                    FilterCriterion::code(attribute, rng.gen_range(1..=25)).expect("code attribute")
                }
                _ => {
                    FilterCriterion::code(attribute, rng.gen_range(0..=5)).expect("code attribute")
                }
            }
        })
        .collect()
}
