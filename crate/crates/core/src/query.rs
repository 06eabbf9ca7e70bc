//! Staged multi-parameter search over speech-signal descriptions, corpus
//! statistics and the canned-query catalog.
//!
//! A staged search applies its first criterion to the full signal table
//! and every later criterion to the sample produced by the previous
//! stage, until the criteria run out. The result is a set: applying the
//! same criteria in any order selects the same signals, and every stage's
//! sample contains the next one.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use thiserror::Error;

use crate::corpus::{self, CorpusError, SegmentationSource, Speaker, SpeechSignal};
use crate::refbooks::{ReferenceRegistry, RegistryError};
use crate::store::{field, tables, CorpusStore};

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("unknown search attribute {name:?}; searchable attributes: {}", attribute_names())]
    UnknownAttribute { name: String },
    #[error("bad value {raw:?} for attribute {attribute}: {reason}")]
    BadValue { attribute: &'static str, raw: String, reason: String },
    #[error("attribute {attribute} expects a {expected} value")]
    TypeMismatch { attribute: &'static str, expected: &'static str },
    #[error("attribute {attribute} is a range attribute and cannot be counted")]
    NotCountable { attribute: &'static str },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

fn attribute_names() -> String {
    SearchAttribute::ALL
        .iter()
        .map(|a| a.name())
        .collect::<Vec<_>>()
        .join(", ")
}

/// A searchable descriptor of a speech signal. Speaker sex and age come
/// from the joined speaker record; age is evaluated at the signal's
/// recording date so that results stay reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SearchAttribute {
    SpeakerSex,
    Dialect,
    Emotion,
    VoiceType,
    SpeechType,
    Tempo,
    Sickness,
    Defect,
    Accent,
    AcousticEnvironment,
    Channel,
    Device,
    Noise,
    Format,
    RecordDate,
    Length,
    SpeakerId,
    SpeakerAge,
}

impl SearchAttribute {
    pub const ALL: [SearchAttribute; 18] = [
        SearchAttribute::SpeakerSex,
        SearchAttribute::Dialect,
        SearchAttribute::Emotion,
        SearchAttribute::VoiceType,
        SearchAttribute::SpeechType,
        SearchAttribute::Tempo,
        SearchAttribute::Sickness,
        SearchAttribute::Defect,
        SearchAttribute::Accent,
        SearchAttribute::AcousticEnvironment,
        SearchAttribute::Channel,
        SearchAttribute::Device,
        SearchAttribute::Noise,
        SearchAttribute::Format,
        SearchAttribute::RecordDate,
        SearchAttribute::Length,
        SearchAttribute::SpeakerId,
        SearchAttribute::SpeakerAge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SearchAttribute::SpeakerSex => "sex",
            SearchAttribute::Dialect => "dialect",
            SearchAttribute::Emotion => "emotion",
            SearchAttribute::VoiceType => "voice-type",
            SearchAttribute::SpeechType => "speech-type",
            SearchAttribute::Tempo => "tempo",
            SearchAttribute::Sickness => "sickness",
            SearchAttribute::Defect => "defect",
            SearchAttribute::Accent => "accent",
            SearchAttribute::AcousticEnvironment => "environment",
            SearchAttribute::Channel => "channel",
            SearchAttribute::Device => "device",
            SearchAttribute::Noise => "noise",
            SearchAttribute::Format => "format",
            SearchAttribute::RecordDate => "record-date",
            SearchAttribute::Length => "length",
            SearchAttribute::SpeakerId => "speaker",
            SearchAttribute::SpeakerAge => "age",
        }
    }

    pub fn parse_name(name: &str) -> Option<SearchAttribute> {
        SearchAttribute::ALL.iter().copied().find(|a| a.name() == name)
    }

    /// Range attributes take `lo..hi` values instead of codes.
    pub fn is_range(self) -> bool {
        matches!(
            self,
            SearchAttribute::RecordDate | SearchAttribute::Length | SearchAttribute::SpeakerAge
        )
    }

    /// The reference book backing the attribute's codes, where one exists;
    /// values may then be given as book titles.
    pub fn book(self) -> Option<&'static str> {
        match self {
            SearchAttribute::SpeakerSex => Some(tables::BOOK_SEX),
            SearchAttribute::Dialect => Some(tables::BOOK_DIALECTS),
            SearchAttribute::Emotion => Some(tables::BOOK_EMOTIONS),
            SearchAttribute::VoiceType => Some(tables::BOOK_VOICE_TYPES),
            SearchAttribute::SpeechType => Some(tables::BOOK_SPEECH_TYPES),
            SearchAttribute::Tempo => Some(tables::BOOK_SPEECH_TEMPS),
            SearchAttribute::Sickness => Some(tables::SICKNESS),
            SearchAttribute::Defect => Some(tables::BOOK_DEFECTS),
            SearchAttribute::AcousticEnvironment => Some(tables::ACOUSTIC_ENVIRONMENT),
            SearchAttribute::Channel => Some(tables::COMMUNICATION_CHANNEL),
            SearchAttribute::Device => Some(tables::RECORDING_DEVICE),
            SearchAttribute::Noise => Some(tables::NOISE),
            SearchAttribute::Format => Some(tables::FILE_FORMAT),
            _ => None,
        }
    }
}

impl std::fmt::Display for SearchAttribute {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A criterion value; the shape must fit the attribute. All ranges are
/// inclusive on both ends.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterValue {
    Code(i64),
    Flag(bool),
    DateRange(NaiveDate, NaiveDate),
    RealRange(f64, f64),
    IntRange(i64, i64),
}

/// One search parameter: an attribute plus the value it must take.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterCriterion {
    pub attribute: SearchAttribute,
    pub value: FilterValue,
}

impl FilterCriterion {
    pub fn code(attribute: SearchAttribute, code: i64) -> Result<FilterCriterion, QueryError> {
        let c = FilterCriterion { attribute, value: FilterValue::Code(code) };
        c.check()?;
        Ok(c)
    }

    pub fn accent(flag: bool) -> FilterCriterion {
        FilterCriterion { attribute: SearchAttribute::Accent, value: FilterValue::Flag(flag) }
    }

    pub fn record_date_range(from: NaiveDate, to: NaiveDate) -> FilterCriterion {
        FilterCriterion {
            attribute: SearchAttribute::RecordDate,
            value: FilterValue::DateRange(from, to),
        }
    }

    pub fn length_range(lo: f64, hi: f64) -> FilterCriterion {
        FilterCriterion { attribute: SearchAttribute::Length, value: FilterValue::RealRange(lo, hi) }
    }

    pub fn age_range(lo: i64, hi: i64) -> FilterCriterion {
        FilterCriterion { attribute: SearchAttribute::SpeakerAge, value: FilterValue::IntRange(lo, hi) }
    }

    /// Checks that the value shape fits the attribute.
    pub fn check(&self) -> Result<(), QueryError> {
        let expected = match self.attribute {
            SearchAttribute::Accent => "boolean",
            SearchAttribute::RecordDate => "date range",
            SearchAttribute::Length => "number range",
            SearchAttribute::SpeakerAge => "integer range",
            _ => "code",
        };
        let ok = matches!(
            (self.attribute, &self.value),
            (SearchAttribute::Accent, FilterValue::Flag(_))
                | (SearchAttribute::RecordDate, FilterValue::DateRange(..))
                | (SearchAttribute::Length, FilterValue::RealRange(..))
                | (SearchAttribute::SpeakerAge, FilterValue::IntRange(..))
        ) || (!self.attribute.is_range()
            && self.attribute != SearchAttribute::Accent
            && matches!(self.value, FilterValue::Code(_)));
        if ok {
            Ok(())
        } else {
            Err(QueryError::TypeMismatch { attribute: self.attribute.name(), expected })
        }
    }

    /// Parses `attribute=value` parts as they arrive from a command line.
    /// Code attributes accept either a numeric code or a book title;
    /// ranges use `lo..hi` (a bare value means the point range `v..v`).
    pub fn parse(
        attr_name: &str,
        raw: &str,
        registry: &ReferenceRegistry,
    ) -> Result<FilterCriterion, QueryError> {
        let attribute = SearchAttribute::parse_name(attr_name)
            .ok_or_else(|| QueryError::UnknownAttribute { name: attr_name.to_owned() })?;
        let bad = |reason: &str| QueryError::BadValue {
            attribute: attribute.name(),
            raw: raw.to_owned(),
            reason: reason.to_owned(),
        };
        let value = match attribute {
            SearchAttribute::Accent => match raw.to_lowercase().as_str() {
                "true" | "1" | "yes" => FilterValue::Flag(true),
                "false" | "0" | "no" => FilterValue::Flag(false),
                _ => return Err(bad("expected true or false")),
            },
            SearchAttribute::RecordDate => {
                let (lo, hi) = split_range(raw);
                let parse = |s: &str| {
                    NaiveDate::parse_from_str(s, "%Y-%m-%d")
                        .map_err(|e| bad(&format!("bad date {s:?}: {e}")))
                };
                FilterValue::DateRange(parse(lo)?, parse(hi)?)
            }
            SearchAttribute::Length => {
                let (lo, hi) = split_range(raw);
                let parse =
                    |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
                FilterValue::RealRange(parse(lo)?, parse(hi)?)
            }
            SearchAttribute::SpeakerAge => {
                let (lo, hi) = split_range(raw);
                let parse =
                    |s: &str| s.parse::<i64>().map_err(|_| bad(&format!("bad integer {s:?}")));
                FilterValue::IntRange(parse(lo)?, parse(hi)?)
            }
            SearchAttribute::SpeakerId => FilterValue::Code(
                raw.parse::<i64>().map_err(|_| bad("expected a speaker id"))?,
            ),
            _ => {
                if let Ok(code) = raw.parse::<i64>() {
                    FilterValue::Code(code)
                } else {
                    let book = attribute.book().expect("code attributes have books");
                    match registry.code_by_title(book, raw) {
                        Ok(Some(code)) => FilterValue::Code(code),
                        Ok(None) => return Err(bad(&format!("no {book} entry with this title"))),
                        Err(e) => return Err(bad(&e.to_string())),
                    }
                }
            }
        };
        Ok(FilterCriterion { attribute, value })
    }
}

/// The signal table joined with what criteria evaluation needs.
struct SearchContext {
    speakers: BTreeMap<i64, Speaker>,
}

impl SearchContext {
    fn build(store: &CorpusStore) -> Result<SearchContext, QueryError> {
        let mut speakers = BTreeMap::new();
        for (_, rec) in store.rows(tables::SPEAKER) {
            let sp = Speaker::from_record(rec)?;
            speakers.insert(sp.id, sp);
        }
        Ok(SearchContext { speakers })
    }

    fn matches(&self, signal: &SpeechSignal, criterion: &FilterCriterion) -> bool {
        use SearchAttribute as A;
        match (criterion.attribute, &criterion.value) {
            (A::SpeakerSex, FilterValue::Code(code)) => {
                self.speakers.get(&signal.speaker).is_some_and(|sp| sp.sex == *code)
            }
            (A::Dialect, FilterValue::Code(code)) => signal.dialect == *code,
            (A::Emotion, FilterValue::Code(code)) => signal.emotional_state == *code,
            (A::VoiceType, FilterValue::Code(code)) => signal.voice_type == *code,
            (A::SpeechType, FilterValue::Code(code)) => signal.speech_type == *code,
            (A::Tempo, FilterValue::Code(code)) => signal.speech_tempo == *code,
            (A::Sickness, FilterValue::Code(code)) => signal.sickness == *code,
            (A::Defect, FilterValue::Code(code)) => signal.speech_defect == *code,
            (A::Accent, FilterValue::Flag(flag)) => signal.accent == *flag,
            (A::AcousticEnvironment, FilterValue::Code(code)) => {
                signal.acoustic_environment == *code
            }
            (A::Channel, FilterValue::Code(code)) => signal.channel == Some(*code),
            (A::Device, FilterValue::Code(code)) => signal.recording_device == *code,
            (A::Noise, FilterValue::Code(code)) => signal.noise == *code,
            (A::Format, FilterValue::Code(code)) => signal.file_format == *code,
            (A::RecordDate, FilterValue::DateRange(from, to)) => {
                (*from..=*to).contains(&signal.record_date)
            }
            (A::Length, FilterValue::RealRange(lo, hi)) => {
                signal.length_s >= *lo && signal.length_s <= *hi
            }
            (A::SpeakerId, FilterValue::Code(code)) => signal.speaker == *code,
            (A::SpeakerAge, FilterValue::IntRange(lo, hi)) => self
                .speakers
                .get(&signal.speaker)
                .and_then(|sp| corpus::speaker_age(sp.birth_date, signal.record_date).ok())
                .is_some_and(|age| age >= *lo && age <= *hi),
            _ => false,
        }
    }
}

/// Runs the staged filter pipeline: criterion 1 samples the full signal
/// table, each later criterion samples the previous stage's output. An
/// empty criteria list selects every signal. The result is ordered by
/// file name.
pub fn staged_search(
    store: &CorpusStore,
    criteria: &[FilterCriterion],
) -> Result<Vec<SpeechSignal>, QueryError> {
    for c in criteria {
        c.check()?;
    }
    let ctx = SearchContext::build(store)?;
    let mut sample = corpus::signals(store)?;
    for criterion in criteria {
        sample.retain(|signal| ctx.matches(signal, criterion));
    }
    Ok(sample)
}

/// Summary counts over the whole corpus, computed by full scans.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStatistics {
    pub speech_unit_count: usize,
    pub speaker_count: usize,
    pub speaker_count_by_sex: BTreeMap<i64, usize>,
    pub signal_count: usize,
    pub total_duration_s: f64,
    pub manually_segmented_signal_count: usize,
}

pub fn corpus_stats(store: &CorpusStore) -> Result<CorpusStatistics, QueryError> {
    let mut by_sex: BTreeMap<i64, usize> = BTreeMap::new();
    for (_, rec) in store.rows(tables::SPEAKER) {
        let sex = field::int(rec, "SEX").map_err(CorpusError::from)?;
        *by_sex.entry(sex).or_default() += 1;
    }
    let mut total = 0.0;
    for (_, rec) in store.rows(tables::SPEECH_SIGNAL) {
        total += field::real(rec, "LENGTH").map_err(CorpusError::from)?;
    }
    let mut segmented = std::collections::BTreeSet::new();
    for (_, rec) in store.rows(tables::SEGMENTATION) {
        if field::text(rec, "SOURCE").map_err(CorpusError::from)?
            == SegmentationSource::Manual.as_str()
        {
            segmented.insert(field::text(rec, "FILENAME").map_err(CorpusError::from)?.to_owned());
        }
    }
    Ok(CorpusStatistics {
        speech_unit_count: store.table_len(tables::SPEECH_UNIT),
        speaker_count: store.table_len(tables::SPEAKER),
        speaker_count_by_sex: by_sex,
        signal_count: store.table_len(tables::SPEECH_SIGNAL),
        total_duration_s: total,
        manually_segmented_signal_count: segmented.len(),
    })
}

/// Histogram of a discrete attribute. Signal attributes count signals;
/// speaker sex counts speakers. Null channels are skipped, so the channel
/// histogram may total less than the signal count.
pub fn count_by(
    store: &CorpusStore,
    attribute: SearchAttribute,
) -> Result<BTreeMap<i64, usize>, QueryError> {
    use SearchAttribute as A;
    if attribute.is_range() {
        return Err(QueryError::NotCountable { attribute: attribute.name() });
    }
    let mut hist: BTreeMap<i64, usize> = BTreeMap::new();
    if attribute == A::SpeakerSex {
        for (_, rec) in store.rows(tables::SPEAKER) {
            let sex = field::int(rec, "SEX").map_err(CorpusError::from)?;
            *hist.entry(sex).or_default() += 1;
        }
        return Ok(hist);
    }
    for signal in corpus::signals(store)? {
        let key = match attribute {
            A::Dialect => signal.dialect,
            A::Emotion => signal.emotional_state,
            A::VoiceType => signal.voice_type,
            A::SpeechType => signal.speech_type,
            A::Tempo => signal.speech_tempo,
            A::Sickness => signal.sickness,
            A::Defect => signal.speech_defect,
            A::Accent => i64::from(signal.accent),
            A::AcousticEnvironment => signal.acoustic_environment,
            A::Channel => match signal.channel {
                Some(c) => c,
                None => continue,
            },
            A::Device => signal.recording_device,
            A::Noise => signal.noise,
            A::Format => signal.file_format,
            A::SpeakerId => signal.speaker,
            A::SpeakerSex | A::RecordDate | A::Length | A::SpeakerAge => unreachable!(),
        };
        *hist.entry(key).or_default() += 1;
    }
    Ok(hist)
}

/// How a canned query reduces to the primitive operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CannedQueryKind {
    /// One staged-search stage over a single attribute. Executing without
    /// an explicit value falls back to the recorded default.
    SignalsBy { attribute: SearchAttribute, default_value: &'static str },
    /// A histogram over a discrete attribute.
    CountBy { attribute: SearchAttribute },
    Stat(StatKind),
    /// A fixed multi-criteria search; values are attribute defaults.
    Preset { criteria: &'static [(SearchAttribute, &'static str)] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatKind {
    Full,
    SpeakersBySex,
    TotalDuration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CannedQuery {
    pub name: &'static str,
    pub description: &'static str,
    pub kind: CannedQueryKind,
}

/// What a canned query produced.
#[derive(Debug, Clone, PartialEq)]
pub enum QueryOutcome {
    Signals(Vec<SpeechSignal>),
    Histogram(BTreeMap<i64, usize>),
    Statistics(CorpusStatistics),
    SpeakersBySex(BTreeMap<i64, usize>),
    Duration(f64),
}

impl CannedQuery {
    /// Runs the query. `value` overrides the default of parameterised
    /// filter queries and is ignored by the others.
    pub fn execute(
        &self,
        store: &CorpusStore,
        value: Option<&str>,
    ) -> Result<QueryOutcome, QueryError> {
        match &self.kind {
            CannedQueryKind::SignalsBy { attribute, default_value } => {
                let registry = ReferenceRegistry::from_store(store)?;
                let raw = value.unwrap_or(default_value);
                let criterion = FilterCriterion::parse(attribute.name(), raw, &registry)?;
                Ok(QueryOutcome::Signals(staged_search(store, &[criterion])?))
            }
            CannedQueryKind::CountBy { attribute } => {
                Ok(QueryOutcome::Histogram(count_by(store, *attribute)?))
            }
            CannedQueryKind::Stat(StatKind::Full) => {
                Ok(QueryOutcome::Statistics(corpus_stats(store)?))
            }
            CannedQueryKind::Stat(StatKind::SpeakersBySex) => {
                Ok(QueryOutcome::SpeakersBySex(corpus_stats(store)?.speaker_count_by_sex))
            }
            CannedQueryKind::Stat(StatKind::TotalDuration) => {
                Ok(QueryOutcome::Duration(corpus_stats(store)?.total_duration_s))
            }
            CannedQueryKind::Preset { criteria } => {
                let registry = ReferenceRegistry::from_store(store)?;
                let parsed: Result<Vec<FilterCriterion>, QueryError> = criteria
                    .iter()
                    .map(|(a, raw)| FilterCriterion::parse(a.name(), raw, &registry))
                    .collect();
                Ok(QueryOutcome::Signals(staged_search(store, &parsed?)?))
            }
        }
    }
}

/// The catalog of predefined queries: one filter per searchable
/// attribute, one histogram per discrete attribute, the statistics
/// queries and a composite preset. 37 entries in total.
pub fn list_canned_queries() -> Vec<CannedQuery> {
    use SearchAttribute as A;
    let mut catalog = Vec::with_capacity(37);

    let filters: [(&'static str, A, &'static str); 18] = [
        ("signals-by-sex", A::SpeakerSex, "1"),
        ("signals-by-dialect", A::Dialect, "1"),
        ("signals-by-emotion", A::Emotion, "1"),
        ("signals-by-voice-type", A::VoiceType, "1"),
        ("signals-by-speech-type", A::SpeechType, "1"),
        ("signals-by-tempo", A::Tempo, "1"),
        ("signals-by-sickness", A::Sickness, "1"),
        ("signals-by-defect", A::Defect, "1"),
        ("signals-by-accent", A::Accent, "true"),
        ("signals-by-environment", A::AcousticEnvironment, "1"),
        ("signals-by-channel", A::Channel, "1"),
        ("signals-by-device", A::Device, "1"),
        ("signals-by-noise", A::Noise, "0"),
        ("signals-by-format", A::Format, "1"),
        ("signals-by-record-date", A::RecordDate, "1900-01-01..2999-12-31"),
        ("signals-by-length", A::Length, "0..86400"),
        ("signals-by-speaker", A::SpeakerId, "1"),
        ("signals-by-age", A::SpeakerAge, "0..200"),
    ];
    for (name, attribute, default_value) in filters {
        catalog.push(CannedQuery {
            name,
            description: "signals matching one value of the attribute",
            kind: CannedQueryKind::SignalsBy { attribute, default_value },
        });
    }

    let histograms: [(&'static str, A); 15] = [
        ("count-by-sex", A::SpeakerSex),
        ("count-by-dialect", A::Dialect),
        ("count-by-emotion", A::Emotion),
        ("count-by-voice-type", A::VoiceType),
        ("count-by-speech-type", A::SpeechType),
        ("count-by-tempo", A::Tempo),
        ("count-by-sickness", A::Sickness),
        ("count-by-defect", A::Defect),
        ("count-by-accent", A::Accent),
        ("count-by-environment", A::AcousticEnvironment),
        ("count-by-channel", A::Channel),
        ("count-by-device", A::Device),
        ("count-by-noise", A::Noise),
        ("count-by-format", A::Format),
        ("count-by-speaker", A::SpeakerId),
    ];
    for (name, attribute) in histograms {
        catalog.push(CannedQuery {
            name,
            description: "per-code counts of the attribute",
            kind: CannedQueryKind::CountBy { attribute },
        });
    }

    catalog.push(CannedQuery {
        name: "corpus-stats",
        description: "full corpus statistics",
        kind: CannedQueryKind::Stat(StatKind::Full),
    });
    catalog.push(CannedQuery {
        name: "speakers-by-sex",
        description: "speaker counts per sex",
        kind: CannedQueryKind::Stat(StatKind::SpeakersBySex),
    });
    catalog.push(CannedQuery {
        name: "total-duration",
        description: "summed signal duration in seconds",
        kind: CannedQueryKind::Stat(StatKind::TotalDuration),
    });
    catalog.push(CannedQuery {
        name: "female-neutral-signals",
        description: "signals by female speakers in the neutral emotional state (seed codes)",
        kind: CannedQueryKind::Preset {
            criteria: &[(A::SpeakerSex, "2"), (A::Emotion, "1")],
        },
    });

    catalog
}

fn split_range(raw: &str) -> (&str, &str) {
    match raw.split_once("..") {
        Some((lo, hi)) => (lo, hi),
        None => (raw, raw),
    }
}
