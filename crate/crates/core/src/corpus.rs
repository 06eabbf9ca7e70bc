//! Domain layer over the store: speakers, speech units, speech signals
//! and segmentation, with the validation rules that make a corpus
//! trustworthy — contiguous segment positions, monotone start times,
//! symbol coverage and expert-check bookkeeping.

use chrono::NaiveDate;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::alphabet::{classify_tempo, Alphabet, AlphabetError, StressVariant};
use crate::refbooks::{ReferenceRegistry, RegistryError, SpeechTempo};
use crate::store::{field, tables, CorpusStore, Key, Record, StoreError, Value};

/// Signals default to the reserved "no synthetic noise" profile.
pub const DEFAULT_NOISE: i64 = crate::refbooks::NO_NOISE;

/// Manual segmentations need sign-off by at least this many experts.
pub const EXPERT_CHECK_MINIMUM: i64 = 2;

/// Every alphabet symbol should occur at least this often in manual
/// segmentation.
pub const COVERAGE_MINIMUM: usize = 3;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("no speech signal named {file_name:?}")]
    UnknownSignal { file_name: String },
    #[error("{file_name}: invalid {segmentation} segmentation: {}", render_violations(.violations))]
    InvalidSegmentation {
        file_name: String,
        segmentation: SegmentationSource,
        violations: Vec<SegmentationViolation>,
    },
    #[error("{file_name}: segmentation has no sound segments")]
    NoSegments { file_name: String },
    #[error("{file_name}: no {missing} segmentation to compare")]
    MissingVariant { file_name: String, missing: SegmentationSource },
    #[error("as-of date {as_of} precedes the birth date {birth}")]
    NegativeInterval { birth: NaiveDate, as_of: NaiveDate },
    #[error("birth date {birth} lies in the future")]
    FutureBirthDate { birth: NaiveDate },
    #[error("speech unit {unit}: transcription token {token:?} (index {index}) is not in the alphabet")]
    TranscriptionSymbol { unit: i64, token: String, index: usize },
    #[error("{file_name}: signal length must be positive, got {length}")]
    NonPositiveLength { file_name: String, length: f64 },
    #[error("{table}: malformed record: {reason}")]
    BadRecord { table: String, reason: String },
}

fn render_violations(violations: &[SegmentationViolation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Whether a segmentation came from an expert or an algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SegmentationSource {
    Manual,
    Automatic,
}

impl SegmentationSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentationSource::Manual => "manual",
            SegmentationSource::Automatic => "automatic",
        }
    }

    pub fn parse(s: &str) -> Option<SegmentationSource> {
        match s {
            "manual" => Some(SegmentationSource::Manual),
            "automatic" => Some(SegmentationSource::Automatic),
            _ => None,
        }
    }
}

impl std::fmt::Display for SegmentationSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Speaker {
    pub id: i64,
    pub sex: i64,
    pub name: String,
    pub surname: String,
    pub patronymic: String,
    pub birth_date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeechUnit {
    pub id: i64,
    pub spelling: String,
    pub transcription: Vec<String>,
    pub unit_type: i64,
}

/// The central record: one speech signal and its full recording context.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeechSignal {
    pub file_name: String,
    pub speech_unit: i64,
    pub length_s: f64,
    pub record_date: NaiveDate,
    pub file_format: i64,
    pub noise: i64,
    pub recording_device: i64,
    pub dialect: i64,
    pub acoustic_environment: i64,
    pub speech_type: i64,
    pub voice_type: i64,
    pub speech_tempo: i64,
    pub channel: Option<i64>,
    pub sickness: i64,
    pub accent: bool,
    pub speech_defect: i64,
    pub emotional_state: i64,
    pub speaker: i64,
}

/// One segmentation entry: sound unit number `position` of a signal
/// starts at `start_time`. Ends are not stored; they derive from the next
/// start (or the signal length).
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationRecord {
    pub position: i64,
    pub file_name: String,
    pub start_time: f64,
    pub symbol: String,
    pub source: SegmentationSource,
    /// How many experts checked the entry; meaningful for manual rows.
    pub expert_count: Option<i64>,
}

impl Speaker {
    pub fn to_record(&self) -> Record {
        [
            ("ID".to_owned(), Value::Integer(self.id)),
            ("SEX".to_owned(), Value::Integer(self.sex)),
            ("NAME".to_owned(), Value::Text(self.name.clone())),
            ("SURNAME".to_owned(), Value::Text(self.surname.clone())),
            ("FAMILY_NAME".to_owned(), Value::Text(self.patronymic.clone())),
            ("BIRTH_DATE".to_owned(), Value::Date(self.birth_date)),
        ]
        .into_iter()
        .collect()
    }

    pub fn from_record(rec: &Record) -> Result<Speaker, CorpusError> {
        let bad = |e: StoreError| CorpusError::BadRecord {
            table: tables::SPEAKER.to_owned(),
            reason: e.to_string(),
        };
        Ok(Speaker {
            id: field::int(rec, "ID").map_err(bad)?,
            sex: field::int(rec, "SEX").map_err(bad)?,
            name: field::text(rec, "NAME").map_err(bad)?.to_owned(),
            surname: field::text(rec, "SURNAME").map_err(bad)?.to_owned(),
            patronymic: field::text(rec, "FAMILY_NAME").map_err(bad)?.to_owned(),
            birth_date: field::date(rec, "BIRTH_DATE").map_err(bad)?,
        })
    }
}

impl SpeechUnit {
    pub fn to_record(&self) -> Record {
        [
            ("ID".to_owned(), Value::Integer(self.id)),
            ("SPELLING_RECORD".to_owned(), Value::Text(self.spelling.clone())),
            (
                "TRANSCRIPTION".to_owned(),
                Value::Text(crate::alphabet::render_transcription(&self.transcription)),
            ),
            ("UNIT_TYPE".to_owned(), Value::Integer(self.unit_type)),
        ]
        .into_iter()
        .collect()
    }

    pub fn from_record(rec: &Record) -> Result<SpeechUnit, CorpusError> {
        let bad = |e: StoreError| CorpusError::BadRecord {
            table: tables::SPEECH_UNIT.to_owned(),
            reason: e.to_string(),
        };
        Ok(SpeechUnit {
            id: field::int(rec, "ID").map_err(bad)?,
            spelling: field::text(rec, "SPELLING_RECORD").map_err(bad)?.to_owned(),
            transcription: field::text(rec, "TRANSCRIPTION")
                .map_err(bad)?
                .split_whitespace()
                .map(str::to_owned)
                .collect(),
            unit_type: field::int(rec, "UNIT_TYPE").map_err(bad)?,
        })
    }
}

impl SpeechSignal {
    pub fn to_record(&self) -> Record {
        [
            ("FILE_NAME".to_owned(), Value::Text(self.file_name.clone())),
            ("SPEECH_UNIT_ID".to_owned(), Value::Integer(self.speech_unit)),
            ("LENGTH".to_owned(), Value::Duration(self.length_s)),
            ("RECORD_DATE".to_owned(), Value::Date(self.record_date)),
            ("FILE_FORMAT".to_owned(), Value::Integer(self.file_format)),
            ("SYNTHETIC_NOISE_TYPE".to_owned(), Value::Integer(self.noise)),
            ("RECORDING_DEVICE".to_owned(), Value::Integer(self.recording_device)),
            ("DIALECT_ID".to_owned(), Value::Integer(self.dialect)),
            ("ACOUSTIC_ENVIRONMENT".to_owned(), Value::Integer(self.acoustic_environment)),
            ("SPEECH_TYPE_ID".to_owned(), Value::Integer(self.speech_type)),
            ("VOICE_TYPE_ID".to_owned(), Value::Integer(self.voice_type)),
            ("SPEECH_TEMP_ID".to_owned(), Value::Integer(self.speech_tempo)),
            ("CHANNEL".to_owned(), self.channel.map(Value::Integer).unwrap_or(Value::Null)),
            ("SPEECH_SICKNESS".to_owned(), Value::Integer(self.sickness)),
            ("ACIENT".to_owned(), Value::Integer(i64::from(self.accent))),
            ("SPEECH_DEFECT".to_owned(), Value::Integer(self.speech_defect)),
            ("EMOTIONAL_STATE".to_owned(), Value::Integer(self.emotional_state)),
            ("SPEAKER_ID".to_owned(), Value::Integer(self.speaker)),
        ]
        .into_iter()
        .collect()
    }

    pub fn from_record(rec: &Record) -> Result<SpeechSignal, CorpusError> {
        let bad = |e: StoreError| CorpusError::BadRecord {
            table: tables::SPEECH_SIGNAL.to_owned(),
            reason: e.to_string(),
        };
        Ok(SpeechSignal {
            file_name: field::text(rec, "FILE_NAME").map_err(bad)?.to_owned(),
            speech_unit: field::int(rec, "SPEECH_UNIT_ID").map_err(bad)?,
            length_s: field::real(rec, "LENGTH").map_err(bad)?,
            record_date: field::date(rec, "RECORD_DATE").map_err(bad)?,
            file_format: field::int(rec, "FILE_FORMAT").map_err(bad)?,
            noise: field::int(rec, "SYNTHETIC_NOISE_TYPE").map_err(bad)?,
            recording_device: field::int(rec, "RECORDING_DEVICE").map_err(bad)?,
            dialect: field::int(rec, "DIALECT_ID").map_err(bad)?,
            acoustic_environment: field::int(rec, "ACOUSTIC_ENVIRONMENT").map_err(bad)?,
            speech_type: field::int(rec, "SPEECH_TYPE_ID").map_err(bad)?,
            voice_type: field::int(rec, "VOICE_TYPE_ID").map_err(bad)?,
            speech_tempo: field::int(rec, "SPEECH_TEMP_ID").map_err(bad)?,
            channel: field::opt_int(rec, "CHANNEL").map_err(bad)?,
            sickness: field::int(rec, "SPEECH_SICKNESS").map_err(bad)?,
            accent: field::int(rec, "ACIENT").map_err(bad)? != 0,
            speech_defect: field::int(rec, "SPEECH_DEFECT").map_err(bad)?,
            emotional_state: field::int(rec, "EMOTIONAL_STATE").map_err(bad)?,
            speaker: field::int(rec, "SPEAKER_ID").map_err(bad)?,
        })
    }
}

impl SegmentationRecord {
    pub fn to_record(&self) -> Record {
        [
            ("POSITION".to_owned(), Value::Integer(self.position)),
            ("FILENAME".to_owned(), Value::Text(self.file_name.clone())),
            ("START_AUDIO".to_owned(), Value::Real(self.start_time)),
            ("TYPE_ID".to_owned(), Value::Text(self.symbol.clone())),
            ("SOURCE".to_owned(), Value::Text(self.source.as_str().to_owned())),
            (
                "EXPERT_COUNT".to_owned(),
                self.expert_count.map(Value::Integer).unwrap_or(Value::Null),
            ),
        ]
        .into_iter()
        .collect()
    }

    pub fn from_record(rec: &Record) -> Result<SegmentationRecord, CorpusError> {
        let bad = |reason: String| CorpusError::BadRecord {
            table: tables::SEGMENTATION.to_owned(),
            reason,
        };
        let source_text = field::text(rec, "SOURCE").map_err(|e| bad(e.to_string()))?;
        let source = SegmentationSource::parse(source_text)
            .ok_or_else(|| bad(format!("unknown segmentation source {source_text:?}")))?;
        Ok(SegmentationRecord {
            position: field::int(rec, "POSITION").map_err(|e| bad(e.to_string()))?,
            file_name: field::text(rec, "FILENAME").map_err(|e| bad(e.to_string()))?.to_owned(),
            start_time: field::real(rec, "START_AUDIO").map_err(|e| bad(e.to_string()))?,
            symbol: field::text(rec, "TYPE_ID").map_err(|e| bad(e.to_string()))?.to_owned(),
            source,
            expert_count: field::opt_int(rec, "EXPERT_COUNT").map_err(|e| bad(e.to_string()))?,
        })
    }
}

/// Stores a speaker. The birth date must not lie in the future.
pub fn add_speaker(store: &mut CorpusStore, speaker: &Speaker) -> Result<(), CorpusError> {
    let today = chrono::Utc::now().date_naive();
    if speaker.birth_date > today {
        return Err(CorpusError::FutureBirthDate { birth: speaker.birth_date });
    }
    store.insert(tables::SPEAKER, speaker.to_record())?;
    Ok(())
}

/// Stores a speech unit after checking its transcription against the
/// corpus alphabet (the CLASS table).
pub fn add_speech_unit(store: &mut CorpusStore, unit: &SpeechUnit) -> Result<(), CorpusError> {
    for (index, token) in unit.transcription.iter().enumerate() {
        if !store.contains(tables::CLASS, &Key::single(token.as_str())) {
            return Err(CorpusError::TranscriptionSymbol {
                unit: unit.id,
                token: token.clone(),
                index,
            });
        }
    }
    store.insert(tables::SPEECH_UNIT, unit.to_record())?;
    Ok(())
}

/// Stores a speech signal. The length must be positive; every descriptor
/// code is checked by the store's foreign keys.
pub fn add_signal(store: &mut CorpusStore, signal: &SpeechSignal) -> Result<(), CorpusError> {
    if !signal.length_s.is_finite() || signal.length_s <= 0.0 {
        return Err(CorpusError::NonPositiveLength {
            file_name: signal.file_name.clone(),
            length: signal.length_s,
        });
    }
    store.insert(tables::SPEECH_SIGNAL, signal.to_record())?;
    Ok(())
}

/// Stores one segmentation entry. The start time must fall inside the
/// signal; expert counts belong to manual segmentation only.
pub fn add_segmentation(
    store: &mut CorpusStore,
    seg: &SegmentationRecord,
) -> Result<(), CorpusError> {
    let bad = |reason: String| CorpusError::BadRecord {
        table: tables::SEGMENTATION.to_owned(),
        reason,
    };
    if seg.position < 1 {
        return Err(bad(format!("position must be 1-based, got {}", seg.position)));
    }
    if seg.source == SegmentationSource::Automatic && seg.expert_count.is_some() {
        return Err(bad("expert count applies to manual segmentation only".to_owned()));
    }
    let length = signal_length(store, &seg.file_name)?;
    if seg.start_time < 0.0 || seg.start_time >= length {
        return Err(bad(format!(
            "start time {} outside the signal [0, {length})",
            seg.start_time
        )));
    }
    store.insert(tables::SEGMENTATION, seg.to_record())?;
    Ok(())
}

/// All signals, in file-name order.
pub fn signals(store: &CorpusStore) -> Result<Vec<SpeechSignal>, CorpusError> {
    store.rows(tables::SPEECH_SIGNAL).map(|(_, rec)| SpeechSignal::from_record(rec)).collect()
}

/// Looks a signal up by file name.
pub fn signal(store: &CorpusStore, file_name: &str) -> Result<SpeechSignal, CorpusError> {
    let rec = store
        .get(tables::SPEECH_SIGNAL, &Key::single(file_name))
        .ok_or_else(|| CorpusError::UnknownSignal { file_name: file_name.to_owned() })?;
    SpeechSignal::from_record(rec)
}

fn signal_length(store: &CorpusStore, file_name: &str) -> Result<f64, CorpusError> {
    Ok(signal(store, file_name)?.length_s)
}

/// Segmentation entries of one signal and source, ordered by position.
pub fn segmentation_rows(
    store: &CorpusStore,
    file_name: &str,
    source: SegmentationSource,
) -> Result<Vec<SegmentationRecord>, CorpusError> {
    let mut rows = Vec::new();
    for (_, rec) in store.rows(tables::SEGMENTATION) {
        let row = SegmentationRecord::from_record(rec)?;
        if row.file_name == file_name && row.source == source {
            rows.push(row);
        }
    }
    rows.sort_by_key(|r| r.position);
    Ok(rows)
}

/// Completed calendar years between two dates; a birthday not yet reached
/// leaves the previous year count.
pub fn speaker_age(birth: NaiveDate, as_of: NaiveDate) -> Result<i64, CorpusError> {
    use chrono::Datelike;
    if as_of < birth {
        return Err(CorpusError::NegativeInterval { birth, as_of });
    }
    let mut years = i64::from(as_of.year()) - i64::from(birth.year());
    if (as_of.month(), as_of.day()) < (birth.month(), birth.day()) {
        years -= 1;
    }
    Ok(years)
}

/// One defect in a stored segmentation.
#[derive(Debug, Clone, PartialEq)]
pub enum SegmentationViolation {
    NotStartingAtOne { first: i64 },
    PositionGap { after: i64 },
    NegativeStart { position: i64, start: f64 },
    NonMonotonicStart { position: i64 },
    StartBeyondLength { position: i64, start: f64, length: f64 },
    UnknownSymbol { position: i64, symbol: String },
}

impl std::fmt::Display for SegmentationViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SegmentationViolation::NotStartingAtOne { first } => {
                write!(f, "positions must start at 1, first is {first}")
            }
            SegmentationViolation::PositionGap { after } => {
                write!(f, "position gap after {after}")
            }
            SegmentationViolation::NegativeStart { position, start } => {
                write!(f, "negative start {start} at position {position}")
            }
            SegmentationViolation::NonMonotonicStart { position } => {
                write!(f, "non-monotonic start at position {position}")
            }
            SegmentationViolation::StartBeyondLength { position, start, length } => {
                write!(f, "start {start} at position {position} is outside the {length} s signal")
            }
            SegmentationViolation::UnknownSymbol { position, symbol } => {
                write!(f, "unknown symbol {symbol:?} at position {position}")
            }
        }
    }
}

/// Validates one signal's segmentation: positions form the contiguous run
/// 1..N, start times increase strictly from at least zero, stay inside
/// the signal, and every symbol is in the alphabet. A signal with no
/// segmentation at all is valid.
pub fn validate_segmentation(
    store: &CorpusStore,
    file_name: &str,
    source: SegmentationSource,
) -> Result<Vec<SegmentationViolation>, CorpusError> {
    let length = signal_length(store, file_name)?;
    let rows = segmentation_rows(store, file_name, source)?;
    let mut violations = Vec::new();

    if let Some(first) = rows.first() {
        if first.position != 1 {
            violations.push(SegmentationViolation::NotStartingAtOne { first: first.position });
        }
    }
    for pair in rows.windows(2) {
        if pair[1].position != pair[0].position + 1 {
            violations.push(SegmentationViolation::PositionGap { after: pair[0].position });
        }
        if pair[1].start_time <= pair[0].start_time {
            violations.push(SegmentationViolation::NonMonotonicStart { position: pair[1].position });
        }
    }
    for row in &rows {
        if row.start_time < 0.0 {
            violations.push(SegmentationViolation::NegativeStart {
                position: row.position,
                start: row.start_time,
            });
        } else if row.start_time >= length {
            violations.push(SegmentationViolation::StartBeyondLength {
                position: row.position,
                start: row.start_time,
                length,
            });
        }
        if !store.contains(tables::CLASS, &Key::single(row.symbol.as_str())) {
            violations.push(SegmentationViolation::UnknownSymbol {
                position: row.position,
                symbol: row.symbol.clone(),
            });
        }
    }
    Ok(violations)
}

/// One derived segment: `[start, end)` labelled with a symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentInterval {
    pub position: i64,
    pub symbol: String,
    pub start: f64,
    pub end: f64,
}

/// Derives closed segments from the stored starts: each segment ends
/// where the next begins, the last at the signal length.
pub fn segment_intervals(
    store: &CorpusStore,
    file_name: &str,
    source: SegmentationSource,
) -> Result<Vec<SegmentInterval>, CorpusError> {
    let violations = validate_segmentation(store, file_name, source)?;
    if !violations.is_empty() {
        return Err(CorpusError::InvalidSegmentation {
            file_name: file_name.to_owned(),
            segmentation: source,
            violations,
        });
    }
    let length = signal_length(store, file_name)?;
    let rows = segmentation_rows(store, file_name, source)?;
    Ok(rows
        .iter()
        .enumerate()
        .map(|(i, row)| SegmentInterval {
            position: row.position,
            symbol: row.symbol.clone(),
            start: row.start_time,
            end: rows.get(i + 1).map_or(length, |next| next.start_time),
        })
        .collect())
}

/// Occurrence counts for every alphabet symbol in one segmentation source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub counts: BTreeMap<String, usize>,
    /// Symbols occurring fewer than [`COVERAGE_MINIMUM`] times, sorted.
    pub undercovered: Vec<String>,
}

/// Counts how often each alphabet symbol occurs across all segmentation
/// rows of the given source and lists the under-covered symbols.
pub fn symbol_coverage(
    store: &CorpusStore,
    alphabet: &Alphabet,
    source: SegmentationSource,
) -> Result<CoverageReport, CorpusError> {
    let mut counts: BTreeMap<String, usize> =
        alphabet.symbols().map(|s| (s.to_owned(), 0)).collect();
    for (_, rec) in store.rows(tables::SEGMENTATION) {
        let row = SegmentationRecord::from_record(rec)?;
        if row.source != source {
            continue;
        }
        if let Some(n) = counts.get_mut(&row.symbol) {
            *n += 1;
        }
    }
    let undercovered = counts
        .iter()
        .filter(|(_, n)| **n < COVERAGE_MINIMUM)
        .map(|(s, _)| s.clone())
        .collect();
    Ok(CoverageReport { counts, undercovered })
}

/// Signals whose manual segmentation lacks the two-expert check: any
/// manual row with a recorded expert count below the minimum, or with no
/// recorded count at all, puts its signal on the list.
pub fn expert_check_report(store: &CorpusStore) -> Result<Vec<String>, CorpusError> {
    let mut flagged = std::collections::BTreeSet::new();
    for (_, rec) in store.rows(tables::SEGMENTATION) {
        let row = SegmentationRecord::from_record(rec)?;
        if row.source != SegmentationSource::Manual {
            continue;
        }
        if row.expert_count.is_none_or(|n| n < EXPERT_CHECK_MINIMUM) {
            flagged.insert(row.file_name);
        }
    }
    Ok(flagged.into_iter().collect())
}

/// Estimates the speech rate of a segmented signal as non-pause segments
/// per second and classifies it into a tempo band.
pub fn estimate_tempo(
    store: &CorpusStore,
    file_name: &str,
    source: SegmentationSource,
) -> Result<(f64, SpeechTempo), CorpusError> {
    let violations = validate_segmentation(store, file_name, source)?;
    if !violations.is_empty() {
        return Err(CorpusError::InvalidSegmentation {
            file_name: file_name.to_owned(),
            segmentation: source,
            violations,
        });
    }
    let length = signal_length(store, file_name)?;
    let rows = segmentation_rows(store, file_name, source)?;

    // Pause units do not count as sounds.
    let pause_code = StressVariant::Pause.code();
    let sounds = rows
        .iter()
        .filter(|r| {
            store
                .get(tables::CLASS, &Key::single(r.symbol.as_str()))
                .and_then(|rec| field::int(rec, "STRESSED").ok())
                != Some(pause_code)
        })
        .count();
    if sounds == 0 {
        return Err(CorpusError::NoSegments { file_name: file_name.to_owned() });
    }
    let rate = sounds as f64 / length;
    let registry = ReferenceRegistry::from_store(store)?;
    let tempo = classify_tempo(rate, &registry)?;
    Ok((rate, tempo))
}

/// One aligned pair in a manual/automatic comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPair {
    pub position: i64,
    pub manual_symbol: String,
    pub automatic_symbol: String,
    pub symbols_match: bool,
    pub boundary_delta: f64,
}

/// Agreement between the manual and automatic segmentations of a signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationComparison {
    pub pairs: Vec<SegmentPair>,
    /// Set when the two sources hold different segment counts
    /// (manual count, automatic count); pairing then covers the shorter.
    pub count_mismatch: Option<(usize, usize)>,
    pub symbol_agreement: f64,
    pub max_boundary_delta: f64,
    pub mean_boundary_delta: f64,
    /// Fraction of compared boundaries within the tolerance.
    pub within_tolerance: f64,
    pub tolerance_s: f64,
}

/// Compares the manual segmentation of a signal with the automatic one,
/// pairing segments by position.
pub fn compare_segmentations(
    store: &CorpusStore,
    file_name: &str,
    tolerance_s: f64,
) -> Result<SegmentationComparison, CorpusError> {
    let mut by_source = Vec::new();
    for source in [SegmentationSource::Manual, SegmentationSource::Automatic] {
        let rows = segmentation_rows(store, file_name, source)?;
        if rows.is_empty() {
            // Distinguish a missing signal from a missing segmentation.
            signal(store, file_name)?;
            return Err(CorpusError::MissingVariant { file_name: file_name.to_owned(), missing: source });
        }
        let violations = validate_segmentation(store, file_name, source)?;
        if !violations.is_empty() {
            return Err(CorpusError::InvalidSegmentation {
                file_name: file_name.to_owned(),
                segmentation: source,
                violations,
            });
        }
        by_source.push(rows);
    }
    let automatic = by_source.pop().expect("pushed above");
    let manual = by_source.pop().expect("pushed above");

    let compared = manual.len().min(automatic.len());
    let count_mismatch =
        (manual.len() != automatic.len()).then_some((manual.len(), automatic.len()));
    let pairs: Vec<SegmentPair> = manual
        .iter()
        .zip(automatic.iter())
        .map(|(m, a)| SegmentPair {
            position: m.position,
            manual_symbol: m.symbol.clone(),
            automatic_symbol: a.symbol.clone(),
            symbols_match: m.symbol == a.symbol,
            boundary_delta: (m.start_time - a.start_time).abs(),
        })
        .collect();

    let matches = pairs.iter().filter(|p| p.symbols_match).count();
    let within = pairs.iter().filter(|p| p.boundary_delta <= tolerance_s).count();
    let max_delta = pairs.iter().map(|p| p.boundary_delta).fold(0.0, f64::max);
    let sum_delta: f64 = pairs.iter().map(|p| p.boundary_delta).sum();
    let ratio = |n: usize| if compared == 0 { 1.0 } else { n as f64 / compared as f64 };

    Ok(SegmentationComparison {
        count_mismatch,
        symbol_agreement: ratio(matches),
        max_boundary_delta: max_delta,
        mean_boundary_delta: if compared == 0 { 0.0 } else { sum_delta / compared as f64 },
        within_tolerance: ratio(within),
        tolerance_s,
        pairs,
    })
}

/// Renders a signal's segmentation as a tab-separated table with a header
/// row, optionally restricted to one source. Rows are ordered by source,
/// then position.
pub fn segmentation_tsv(
    store: &CorpusStore,
    file_name: &str,
    source: Option<SegmentationSource>,
) -> Result<String, CorpusError> {
    signal(store, file_name)?; // unknown signals are an error, not an empty file
    let mut out = String::from("POSITION\tSTART_AUDIO\tSYMBOL\tSOURCE\n");
    let sources = match source {
        Some(s) => vec![s],
        None => vec![SegmentationSource::Manual, SegmentationSource::Automatic],
    };
    for s in sources {
        for row in segmentation_rows(store, file_name, s)? {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                row.position, row.start_time, row.symbol, row.source
            ));
        }
    }
    Ok(out)
}
