//! The sound-unit alphabet (CLASS table) and its classifiers.
//!
//! Sound units split into vowels, consonants and the pause marker. The
//! articulation features are mutually exclusive by kind: place and manner
//! of formation exist only for consonants, labialization, rise and row
//! only for vowels, and the pause carries no features at all.
//!
//! Stress is classified into eleven variants: four for stressed vowels
//! (keyed by the softness of the flanking consonants), five for
//! unstressed vowels (four reachable, keyed by Potebnya strength and the
//! softness of the preceding consonant, plus one reserved), one for
//! consonants and one for the pause.
//!
//! All types here are plain immutable values; the classifiers are pure
//! functions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::refbooks::{ReferenceRegistry, SpeechTempo};
use crate::store::{self, field, tables, CorpusStore, Record, StoreError, Value};

/// The shipped Russian sound alphabet, 77 units.
const RUSSIAN_SEED: &str = include_str!("../data/ru_alphabet_v1.jsonl");

/// Canonical codes of the seeded classification books. The CLASS feature
/// system is defined against these.
pub mod codes {
    /// BOOK_VOICED: voiceless consonant.
    pub const VOICED_VOICELESS: i64 = 1;
    /// BOOK_VOICED: voiced consonant.
    pub const VOICED_CONSONANT: i64 = 2;
    /// BOOK_VOICED: vowel.
    pub const VOICED_VOWEL: i64 = 3;
    /// BOOK_SOFT: hard consonant.
    pub const SOFT_HARD: i64 = 1;
    /// BOOK_SOFT: soft consonant.
    pub const SOFT_SOFT: i64 = 2;
    /// BOOK_SOFT: sonorant.
    pub const SOFT_SONORANT: i64 = 3;
}

#[derive(Debug, Error)]
pub enum AlphabetError {
    #[error("alphabet line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("duplicate symbol {symbol:?}")]
    DuplicateSymbol { symbol: String },
    #[error("{} sound unit(s) failed validation; first: {}", .reports.len(), .reports.first().map(|r| r.to_string()).unwrap_or_default())]
    InvalidAlphabet { reports: Vec<ClassReport> },
    #[error("unknown symbol {token:?} at token index {index}")]
    UnknownSymbol { token: String, index: usize },
    #[error("inconsistent stress context: {reason}")]
    InconsistentContext { reason: String },
    #[error("sound rate must be positive, got {rate}")]
    NonPositiveRate { rate: f64 },
    #[error("no tempo band covers a rate of {rate} sounds per second")]
    NoTempoBand { rate: f64 },
}

/// One row of the CLASS table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundUnitClass {
    pub symbol: String,
    /// Stress-variant code (BOOK_STRESSED).
    pub stressed: i64,
    pub vocalized: bool,
    pub soft: Option<i64>,
    pub voiced: Option<i64>,
    /// Place of formation, consonants only.
    pub location: Option<i64>,
    /// Manner of formation, consonants only.
    pub way_of_origin: Option<i64>,
    pub labialization: Option<i64>,
    pub rise: Option<i64>,
    pub row: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitKind {
    Vowel,
    Consonant,
    Pause,
}

impl UnitKind {
    pub fn name(self) -> &'static str {
        match self {
            UnitKind::Vowel => "vowel",
            UnitKind::Consonant => "consonant",
            UnitKind::Pause => "pause",
        }
    }
}

impl SoundUnitClass {
    /// Kind is derived from the voicing code: the "vowel" voicing makes a
    /// vowel, the consonant voicings a consonant, and no voicing at all
    /// marks the pause unit.
    pub fn kind(&self) -> UnitKind {
        match self.voiced {
            Some(codes::VOICED_VOWEL) => UnitKind::Vowel,
            Some(_) => UnitKind::Consonant,
            None => UnitKind::Pause,
        }
    }

    pub fn from_record(rec: &Record) -> Result<SoundUnitClass, StoreError> {
        Ok(SoundUnitClass {
            symbol: field::text(rec, "SYMBOL")?.to_owned(),
            stressed: field::int(rec, "STRESSED")?,
            vocalized: field::boolean(rec, "VOCALIZED")?,
            soft: field::opt_int(rec, "SOFT")?,
            voiced: field::opt_int(rec, "VOICED")?,
            location: field::opt_int(rec, "LOCATION")?,
            way_of_origin: field::opt_int(rec, "WAY_OF_ORIGIN")?,
            labialization: field::opt_int(rec, "LABIALIZATION")?,
            rise: field::opt_int(rec, "RISE")?,
            row: field::opt_int(rec, "ROW")?,
        })
    }

    pub fn to_record(&self) -> Record {
        let opt = |v: Option<i64>| v.map(Value::Integer).unwrap_or(Value::Null);
        [
            ("SYMBOL".to_owned(), Value::Text(self.symbol.clone())),
            ("STRESSED".to_owned(), Value::Integer(self.stressed)),
            ("VOCALIZED".to_owned(), Value::Boolean(self.vocalized)),
            ("SOFT".to_owned(), opt(self.soft)),
            ("VOICED".to_owned(), opt(self.voiced)),
            ("LOCATION".to_owned(), opt(self.location)),
            ("WAY_OF_ORIGIN".to_owned(), opt(self.way_of_origin)),
            ("LABIALIZATION".to_owned(), opt(self.labialization)),
            ("RISE".to_owned(), opt(self.rise)),
            ("ROW".to_owned(), opt(self.row)),
        ]
        .into_iter()
        .collect()
    }
}

/// One violation of the sound-unit feature rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassViolation {
    EmptySymbol,
    DanglingCode { field: &'static str, book: &'static str, code: i64 },
    /// A consonant-only feature set on a non-consonant.
    ConsonantOnlyFeature { field: &'static str },
    /// A vowel-only feature set on a non-vowel.
    VowelOnlyFeature { field: &'static str },
    MissingFeature { field: &'static str, kind: &'static str },
    FeatureOnPause { field: &'static str },
    SonorantOnVowel,
    VocalizedMismatch { expected: bool },
    StressKindMismatch { kind: &'static str, code: i64 },
}

impl std::fmt::Display for ClassViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassViolation::EmptySymbol => write!(f, "empty symbol"),
            ClassViolation::DanglingCode { field, book, code } => {
                write!(f, "{field} = {code} does not resolve in {book}")
            }
            ClassViolation::ConsonantOnlyFeature { field } => {
                write!(f, "consonant-only feature {field} set on a non-consonant")
            }
            ClassViolation::VowelOnlyFeature { field } => {
                write!(f, "vowel-only feature {field} set on a non-vowel")
            }
            ClassViolation::MissingFeature { field, kind } => {
                write!(f, "{kind} is missing required feature {field}")
            }
            ClassViolation::FeatureOnPause { field } => {
                write!(f, "pause unit carries feature {field}")
            }
            ClassViolation::SonorantOnVowel => write!(f, "vowel marked sonorant"),
            ClassViolation::VocalizedMismatch { expected } => {
                write!(f, "VOCALIZED should be {expected}")
            }
            ClassViolation::StressKindMismatch { kind, code } => {
                write!(f, "stress variant {code} does not fit a {kind}")
            }
        }
    }
}

/// A validation report for one sound unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    pub symbol: String,
    pub violations: Vec<ClassViolation>,
}

impl std::fmt::Display for ClassReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let details: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}: {}", self.symbol, details.join("; "))
    }
}

/// Checks one sound unit against the feature-exclusivity rules and the
/// registry. Violations are data; an empty report means the unit is valid.
pub fn validate_class(c: &SoundUnitClass, registry: &ReferenceRegistry) -> Vec<ClassViolation> {
    let mut v = Vec::new();
    if c.symbol.is_empty() {
        v.push(ClassViolation::EmptySymbol);
    }

    let mut check_code = |field: &'static str, book: &'static str, code: Option<i64>| {
        if let Some(code) = code {
            if !registry.has_code(book, code) {
                v.push(ClassViolation::DanglingCode { field, book, code });
            }
        }
    };
    check_code("STRESSED", tables::BOOK_STRESSED, Some(c.stressed));
    check_code("SOFT", tables::BOOK_SOFT, c.soft);
    check_code("VOICED", tables::BOOK_VOICED, c.voiced);
    check_code("LOCATION", tables::BOOK_LOCATION, c.location);
    check_code("WAY_OF_ORIGIN", tables::BOOK_WAY_OF_ORIGIN, c.way_of_origin);
    check_code("LABIALIZATION", tables::BOOK_LABIALIZATION, c.labialization);
    check_code("RISE", tables::BOOK_RISE, c.rise);
    check_code("ROW", tables::BOOK_ROW, c.row);

    let kind = c.kind();
    match kind {
        UnitKind::Consonant => {
            for (field, value) in [("LABIALIZATION", c.labialization), ("RISE", c.rise), ("ROW", c.row)] {
                if value.is_some() {
                    v.push(ClassViolation::VowelOnlyFeature { field });
                }
            }
            for (field, value) in [("LOCATION", c.location), ("WAY_OF_ORIGIN", c.way_of_origin), ("SOFT", c.soft)] {
                if value.is_none() {
                    v.push(ClassViolation::MissingFeature { field, kind: kind.name() });
                }
            }
            if c.vocalized {
                v.push(ClassViolation::VocalizedMismatch { expected: false });
            }
            if c.stressed != StressVariant::ConsonantNoStress.code() {
                v.push(ClassViolation::StressKindMismatch { kind: kind.name(), code: c.stressed });
            }
        }
        UnitKind::Vowel => {
            for (field, value) in [("LOCATION", c.location), ("WAY_OF_ORIGIN", c.way_of_origin)] {
                if value.is_some() {
                    v.push(ClassViolation::ConsonantOnlyFeature { field });
                }
            }
            for (field, value) in [("LABIALIZATION", c.labialization), ("RISE", c.rise), ("ROW", c.row)] {
                if value.is_none() {
                    v.push(ClassViolation::MissingFeature { field, kind: kind.name() });
                }
            }
            if c.soft == Some(codes::SOFT_SONORANT) {
                v.push(ClassViolation::SonorantOnVowel);
            }
            if !c.vocalized {
                v.push(ClassViolation::VocalizedMismatch { expected: true });
            }
            let vowel_variant =
                StressVariant::from_code(c.stressed).is_some_and(StressVariant::is_vowel_variant);
            if !vowel_variant {
                v.push(ClassViolation::StressKindMismatch { kind: kind.name(), code: c.stressed });
            }
        }
        UnitKind::Pause => {
            for (field, value) in [
                ("SOFT", c.soft),
                ("LOCATION", c.location),
                ("WAY_OF_ORIGIN", c.way_of_origin),
                ("LABIALIZATION", c.labialization),
                ("RISE", c.rise),
                ("ROW", c.row),
            ] {
                if value.is_some() {
                    v.push(ClassViolation::FeatureOnPause { field });
                }
            }
            if c.vocalized {
                v.push(ClassViolation::VocalizedMismatch { expected: false });
            }
            if c.stressed != StressVariant::Pause.code() {
                v.push(ClassViolation::StressKindMismatch { kind: kind.name(), code: c.stressed });
            }
        }
    }
    v
}

/// An ordered, validated collection of sound units.
#[derive(Debug, Clone)]
pub struct Alphabet {
    name: String,
    language: String,
    units: Vec<SoundUnitClass>,
    index: BTreeMap<String, usize>,
}

impl Alphabet {
    /// Builds an alphabet, rejecting duplicate symbols and any unit that
    /// fails [`validate_class`].
    pub fn from_units(
        name: impl Into<String>,
        language: impl Into<String>,
        units: Vec<SoundUnitClass>,
        registry: &ReferenceRegistry,
    ) -> Result<Alphabet, AlphabetError> {
        let mut index = BTreeMap::new();
        for (i, unit) in units.iter().enumerate() {
            if index.insert(unit.symbol.clone(), i).is_some() {
                return Err(AlphabetError::DuplicateSymbol { symbol: unit.symbol.clone() });
            }
        }
        let reports: Vec<ClassReport> = units
            .iter()
            .filter_map(|u| {
                let violations = validate_class(u, registry);
                (!violations.is_empty()).then(|| ClassReport {
                    symbol: u.symbol.clone(),
                    violations,
                })
            })
            .collect();
        if !reports.is_empty() {
            return Err(AlphabetError::InvalidAlphabet { reports });
        }
        Ok(Alphabet { name: name.into(), language: language.into(), units, index })
    }

    /// Parses an alphabet from its line-delimited record file (the CLASS
    /// table format, one sound unit per line). An empty file is a valid,
    /// empty alphabet: alphabets for new languages start that way.
    pub fn parse_jsonl(
        name: impl Into<String>,
        language: impl Into<String>,
        text: &str,
        registry: &ReferenceRegistry,
    ) -> Result<Alphabet, AlphabetError> {
        let ts = class_schema();
        let mut units = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |reason: String| AlphabetError::Parse { line: idx + 1, reason };
            let json: serde_json::Value =
                serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
            let rec = store::parse_record(&ts, &json).map_err(parse_err)?;
            let unit = SoundUnitClass::from_record(&rec).map_err(|e| parse_err(e.to_string()))?;
            units.push(unit);
        }
        Alphabet::from_units(name, language, units, registry)
    }

    /// The shipped 77-unit Russian sound alphabet.
    pub fn russian_seed(registry: &ReferenceRegistry) -> Result<Alphabet, AlphabetError> {
        Alphabet::parse_jsonl("Russian sound alphabet", "Russian", RUSSIAN_SEED, registry)
    }

    /// Loads the alphabet stored in a corpus (the CLASS table), named per
    /// the manifest.
    pub fn from_store(
        store: &CorpusStore,
        registry: &ReferenceRegistry,
    ) -> Result<Alphabet, AlphabetError> {
        let info = store.alphabet_info();
        let units: Result<Vec<SoundUnitClass>, StoreError> = store
            .rows(tables::CLASS)
            .map(|(_, rec)| SoundUnitClass::from_record(rec))
            .collect();
        let units = units.map_err(|e| AlphabetError::Parse { line: 0, reason: e.to_string() })?;
        Alphabet::from_units(info.name.clone(), info.language.clone(), units, registry)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn units(&self) -> &[SoundUnitClass] {
        &self.units
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.units.iter().map(|u| u.symbol.as_str())
    }

    pub fn get(&self, symbol: &str) -> Option<&SoundUnitClass> {
        self.index.get(symbol).map(|&i| &self.units[i])
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index.contains_key(symbol)
    }

    pub fn is_pause(&self, symbol: &str) -> bool {
        self.get(symbol).is_some_and(|u| u.kind() == UnitKind::Pause)
    }

    /// Splits a transcription on whitespace and checks every token against
    /// the alphabet. Symbols may be multi-character, so whitespace is the
    /// token separator.
    pub fn tokenize(&self, text: &str) -> Result<Vec<String>, AlphabetError> {
        let mut out = Vec::new();
        for (index, token) in text.split_whitespace().enumerate() {
            if !self.contains(token) {
                return Err(AlphabetError::UnknownSymbol { token: token.to_owned(), index });
            }
            out.push(token.to_owned());
        }
        Ok(out)
    }
}

/// Joins symbols into a canonical single-spaced transcription, the
/// inverse of [`Alphabet::tokenize`].
pub fn render_transcription<S: AsRef<str>>(symbols: &[S]) -> String {
    symbols.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ")
}

/// Inserts the shipped Russian alphabet into a corpus store's CLASS table
/// and records its name in the manifest metadata.
pub fn write_russian_seed(store: &mut CorpusStore) -> Result<(), StoreError> {
    let ts = class_schema();
    for (idx, line) in RUSSIAN_SEED.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let json: serde_json::Value = serde_json::from_str(line).map_err(|e| StoreError::Parse {
            file: "ru_alphabet_v1.jsonl".into(),
            line: idx + 1,
            reason: e.to_string(),
        })?;
        let rec = store::parse_record(&ts, &json).map_err(|reason| StoreError::Parse {
            file: "ru_alphabet_v1.jsonl".into(),
            line: idx + 1,
            reason,
        })?;
        store.insert(tables::CLASS, rec)?;
    }
    store.set_alphabet_info(store::AlphabetInfo {
        name: "Russian sound alphabet".to_owned(),
        language: "Russian".to_owned(),
    });
    Ok(())
}

fn class_schema() -> store::TableSchema {
    store::default_schema().table(tables::CLASS).expect("CLASS in schema").clone()
}

/// The eleven stress variants. Codes match the seeded BOOK_STRESSED book.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StressVariant {
    /// Stressed vowel between hard consonants.
    StressedBetweenHard,
    /// Stressed vowel between a hard and a soft consonant.
    StressedHardSoft,
    /// Stressed vowel between a soft and a hard consonant.
    StressedSoftHard,
    /// Stressed vowel between soft consonants.
    StressedBetweenSoft,
    /// Unstressed vowel of strength 2 after a hard consonant.
    Strength2AfterHard,
    /// Unstressed vowel of strength 1 after a hard consonant.
    Strength1AfterHard,
    /// Unstressed vowel of strength 2 after a soft consonant.
    Strength2AfterSoft,
    /// Unstressed vowel of strength 1 after a soft consonant.
    Strength1AfterSoft,
    /// The fifth unstressed option. Present in the book; no context maps
    /// onto it.
    UnstressedReserved,
    /// Consonants carry no stress.
    ConsonantNoStress,
    /// The marker for the pause between sounds.
    Pause,
}

impl StressVariant {
    pub const ALL: [StressVariant; 11] = [
        StressVariant::StressedBetweenHard,
        StressVariant::StressedHardSoft,
        StressVariant::StressedSoftHard,
        StressVariant::StressedBetweenSoft,
        StressVariant::Strength2AfterHard,
        StressVariant::Strength1AfterHard,
        StressVariant::Strength2AfterSoft,
        StressVariant::Strength1AfterSoft,
        StressVariant::UnstressedReserved,
        StressVariant::ConsonantNoStress,
        StressVariant::Pause,
    ];

    pub fn code(self) -> i64 {
        Self::ALL.iter().position(|v| *v == self).expect("listed") as i64 + 1
    }

    pub fn from_code(code: i64) -> Option<StressVariant> {
        (1..=11).contains(&code).then(|| Self::ALL[(code - 1) as usize])
    }

    /// Matches the seeded BOOK_STRESSED titles.
    pub fn title(self) -> &'static str {
        match self {
            StressVariant::StressedBetweenHard => "stressed, between hard consonants",
            StressVariant::StressedHardSoft => "stressed, between hard and soft",
            StressVariant::StressedSoftHard => "stressed, between soft and hard",
            StressVariant::StressedBetweenSoft => "stressed, between soft consonants",
            StressVariant::Strength2AfterHard => "unstressed, strength 2 after hard",
            StressVariant::Strength1AfterHard => "unstressed, strength 1 after hard",
            StressVariant::Strength2AfterSoft => "unstressed, strength 2 after soft",
            StressVariant::Strength1AfterSoft => "unstressed, strength 1 after soft",
            StressVariant::UnstressedReserved => "unstressed, reserved",
            StressVariant::ConsonantNoStress => "no stress (consonant)",
            StressVariant::Pause => "pause",
        }
    }

    /// Variants a vowel unit may carry (stressed and unstressed groups).
    pub fn is_vowel_variant(self) -> bool {
        (1..=9).contains(&self.code())
    }
}

/// Position of a vowel's syllable relative to the stressed syllable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyllablePosition {
    Stressed,
    FirstPreStressed,
    /// Second pre-stressed or any earlier syllable.
    SecondPreStressedOrEarlier,
    PostStressed,
}

impl SyllablePosition {
    pub const ALL: [SyllablePosition; 4] = [
        SyllablePosition::Stressed,
        SyllablePosition::FirstPreStressed,
        SyllablePosition::SecondPreStressedOrEarlier,
        SyllablePosition::PostStressed,
    ];
}

/// Vowel strength by syllable position: 3 units for the stressed
/// syllable, 2 for the first pre-stressed, 1 for everything else.
pub fn potebnya_strength(position: SyllablePosition) -> u8 {
    match position {
        SyllablePosition::Stressed => 3,
        SyllablePosition::FirstPreStressed => 2,
        SyllablePosition::SecondPreStressedOrEarlier | SyllablePosition::PostStressed => 1,
    }
}

/// The context of one sound unit, as needed to classify its stress
/// variant. The softness of the following consonant matters only for
/// stressed vowels; the syllable position only for unstressed ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StressContext {
    StressedVowel { left_soft: bool, right_soft: bool },
    UnstressedVowel { left_soft: bool, position: SyllablePosition },
    Consonant,
    Pause,
}

/// Classifies a context into its stress variant.
///
/// Ten of the eleven codes are reachable; the reserved fifth unstressed
/// option is never produced.
pub fn stress_variant(ctx: &StressContext) -> Result<StressVariant, AlphabetError> {
    match *ctx {
        StressContext::StressedVowel { left_soft, right_soft } => Ok(match (left_soft, right_soft) {
            (false, false) => StressVariant::StressedBetweenHard,
            (false, true) => StressVariant::StressedHardSoft,
            (true, false) => StressVariant::StressedSoftHard,
            (true, true) => StressVariant::StressedBetweenSoft,
        }),
        StressContext::UnstressedVowel { left_soft, position } => {
            if position == SyllablePosition::Stressed {
                return Err(AlphabetError::InconsistentContext {
                    reason: "an unstressed vowel cannot sit in the stressed syllable".to_owned(),
                });
            }
            let strength = potebnya_strength(position);
            Ok(match (strength, left_soft) {
                (2, false) => StressVariant::Strength2AfterHard,
                (1, false) => StressVariant::Strength1AfterHard,
                (2, true) => StressVariant::Strength2AfterSoft,
                (1, true) => StressVariant::Strength1AfterSoft,
                _ => unreachable!("unstressed strength is 1 or 2"),
            })
        }
        StressContext::Consonant => Ok(StressVariant::ConsonantNoStress),
        StressContext::Pause => Ok(StressVariant::Pause),
    }
}

/// Assigns a sounds-per-second rate to its tempo band: band ceilings are
/// inclusive, the unbounded band catches everything above the last
/// ceiling.
pub fn classify_tempo(
    sounds_per_second: f64,
    registry: &ReferenceRegistry,
) -> Result<SpeechTempo, AlphabetError> {
    if !sounds_per_second.is_finite() || sounds_per_second <= 0.0 {
        return Err(AlphabetError::NonPositiveRate { rate: sounds_per_second });
    }
    let mut unbounded = None;
    for tempo in registry.tempos() {
        match tempo.sounds_per_second_ceiling {
            Some(c) if sounds_per_second <= c as f64 => return Ok(tempo.clone()),
            Some(_) => {}
            None => unbounded = Some(tempo.clone()),
        }
    }
    unbounded.ok_or(AlphabetError::NoTempoBand { rate: sounds_per_second })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refbooks::{BookEntry, RefEntry};
    use proptest::prelude::*;

    fn registry() -> ReferenceRegistry {
        ReferenceRegistry::seed_default()
    }

    fn consonant_b() -> SoundUnitClass {
        SoundUnitClass {
            symbol: "b".to_owned(),
            stressed: StressVariant::ConsonantNoStress.code(),
            vocalized: false,
            soft: Some(codes::SOFT_HARD),
            voiced: Some(codes::VOICED_CONSONANT),
            location: Some(1),
            way_of_origin: Some(1),
            labialization: None,
            rise: None,
            row: None,
        }
    }

    fn vowel_a() -> SoundUnitClass {
        SoundUnitClass {
            symbol: "a1".to_owned(),
            stressed: StressVariant::StressedBetweenHard.code(),
            vocalized: true,
            soft: None,
            voiced: Some(codes::VOICED_VOWEL),
            location: None,
            way_of_origin: None,
            labialization: Some(2),
            rise: Some(3),
            row: Some(2),
        }
    }

    #[test]
    fn valid_consonant_passes() {
        assert!(validate_class(&consonant_b(), &registry()).is_empty());
    }

    #[test]
    fn vowel_with_place_of_formation_is_flagged() {
        let mut unit = vowel_a();
        unit.location = Some(1);
        let report = validate_class(&unit, &registry());
        assert!(report.contains(&ClassViolation::ConsonantOnlyFeature { field: "LOCATION" }));
    }

    #[test]
    fn consonant_with_vowel_features_is_flagged() {
        let mut unit = consonant_b();
        unit.rise = Some(1);
        let report = validate_class(&unit, &registry());
        assert!(report.contains(&ClassViolation::VowelOnlyFeature { field: "RISE" }));
    }

    #[test]
    fn dangling_labialization_code_is_flagged() {
        let mut unit = vowel_a();
        unit.labialization = Some(77);
        let report = validate_class(&unit, &registry());
        assert!(report.contains(&ClassViolation::DanglingCode {
            field: "LABIALIZATION",
            book: tables::BOOK_LABIALIZATION,
            code: 77,
        }));
    }

    #[test]
    fn pause_must_carry_no_features() {
        let pause = SoundUnitClass {
            symbol: "_".to_owned(),
            stressed: StressVariant::Pause.code(),
            vocalized: false,
            soft: None,
            voiced: None,
            location: None,
            way_of_origin: None,
            labialization: None,
            rise: None,
            row: None,
        };
        assert!(validate_class(&pause, &registry()).is_empty());

        let mut bad = pause;
        bad.soft = Some(codes::SOFT_HARD);
        assert!(validate_class(&bad, &registry())
            .contains(&ClassViolation::FeatureOnPause { field: "SOFT" }));
    }

    #[test]
    fn potebnya_strengths() {
        assert_eq!(potebnya_strength(SyllablePosition::Stressed), 3);
        assert_eq!(potebnya_strength(SyllablePosition::FirstPreStressed), 2);
        assert_eq!(potebnya_strength(SyllablePosition::SecondPreStressedOrEarlier), 1);
        assert_eq!(potebnya_strength(SyllablePosition::PostStressed), 1);

        let image: std::collections::BTreeSet<u8> =
            SyllablePosition::ALL.iter().map(|p| potebnya_strength(*p)).collect();
        assert_eq!(image, [1, 2, 3].into());
        let ones = SyllablePosition::ALL.iter().filter(|p| potebnya_strength(**p) == 1).count();
        assert_eq!(ones, 2);
    }

    #[test]
    fn stress_variant_examples() {
        let stressed = |l, r| {
            stress_variant(&StressContext::StressedVowel { left_soft: l, right_soft: r }).unwrap()
        };
        assert_eq!(stressed(false, false), StressVariant::StressedBetweenHard);
        assert_eq!(stressed(false, true), StressVariant::StressedHardSoft);
        assert_eq!(stressed(true, false), StressVariant::StressedSoftHard);
        assert_eq!(stressed(true, true), StressVariant::StressedBetweenSoft);

        let first_pre_hard = stress_variant(&StressContext::UnstressedVowel {
            left_soft: false,
            position: SyllablePosition::FirstPreStressed,
        })
        .unwrap();
        assert_eq!(first_pre_hard, StressVariant::Strength2AfterHard);

        assert_eq!(
            stress_variant(&StressContext::Consonant).unwrap(),
            StressVariant::ConsonantNoStress
        );
        assert_eq!(stress_variant(&StressContext::Pause).unwrap(), StressVariant::Pause);
    }

    #[test]
    fn stress_variant_rejects_inconsistent_context() {
        let err = stress_variant(&StressContext::UnstressedVowel {
            left_soft: false,
            position: SyllablePosition::Stressed,
        })
        .unwrap_err();
        assert!(matches!(err, AlphabetError::InconsistentContext { .. }));
    }

    #[test]
    fn stress_variant_image_has_ten_codes() {
        let mut image = std::collections::BTreeSet::new();
        for l in [false, true] {
            for r in [false, true] {
                image.insert(
                    stress_variant(&StressContext::StressedVowel { left_soft: l, right_soft: r })
                        .unwrap()
                        .code(),
                );
            }
            for position in [
                SyllablePosition::FirstPreStressed,
                SyllablePosition::SecondPreStressedOrEarlier,
                SyllablePosition::PostStressed,
            ] {
                image.insert(
                    stress_variant(&StressContext::UnstressedVowel { left_soft: l, position })
                        .unwrap()
                        .code(),
                );
            }
        }
        image.insert(stress_variant(&StressContext::Consonant).unwrap().code());
        image.insert(stress_variant(&StressContext::Pause).unwrap().code());

        assert_eq!(image.len(), 10);
        assert!(!image.contains(&StressVariant::UnstressedReserved.code()));
    }

    #[test]
    fn stress_book_matches_the_variant_table() {
        let reg = registry();
        let book = reg.stress_variants();
        assert_eq!(book.len(), 11);
        for variant in StressVariant::ALL {
            let entry = book.iter().find(|e| e.code == variant.code()).expect("code seeded");
            assert_eq!(entry.title, variant.title());
        }
    }

    #[test]
    fn tempo_boundaries_are_inclusive() {
        let reg = registry();
        assert_eq!(classify_tempo(8.0, &reg).unwrap().name, "normal");
        assert_eq!(classify_tempo(8.0001, &reg).unwrap().name, "accelerated");
        assert_eq!(classify_tempo(12.0, &reg).unwrap().name, "accelerated");
        assert_eq!(classify_tempo(20.0, &reg).unwrap().name, "fast");
        assert!(matches!(
            classify_tempo(0.0, &reg),
            Err(AlphabetError::NonPositiveRate { .. })
        ));
        assert!(matches!(
            classify_tempo(-1.0, &reg),
            Err(AlphabetError::NonPositiveRate { .. })
        ));
    }

    #[test]
    fn russian_seed_has_77_valid_units() {
        let reg = registry();
        let alphabet = Alphabet::russian_seed(&reg).unwrap();
        assert_eq!(alphabet.len(), 77);
        assert_eq!(alphabet.language(), "Russian");
        assert!(alphabet.is_pause("_"));

        // Labialized units are exactly the O- and U-type vowels.
        let labialized: Vec<&str> = alphabet
            .units()
            .iter()
            .filter(|u| u.labialization == Some(1))
            .map(|u| u.symbol.as_str())
            .collect();
        assert!(!labialized.is_empty());
        for symbol in &labialized {
            assert!(
                symbol.starts_with('o') || symbol.starts_with('u'),
                "unexpected labialized unit {symbol}"
            );
        }
        for unit in alphabet.units() {
            let o_or_u = unit.symbol.starts_with('o') || unit.symbol.starts_with('u');
            if unit.kind() == UnitKind::Vowel && o_or_u {
                assert_eq!(unit.labialization, Some(1), "{} must be labialized", unit.symbol);
            }
        }
    }

    #[test]
    fn each_seed_unit_populates_exactly_one_feature_set() {
        let reg = registry();
        let alphabet = Alphabet::russian_seed(&reg).unwrap();
        for unit in alphabet.units() {
            let consonant_set = unit.location.is_some() || unit.way_of_origin.is_some();
            let vowel_set =
                unit.labialization.is_some() || unit.rise.is_some() || unit.row.is_some();
            let pause = unit.kind() == UnitKind::Pause;
            let populated =
                [consonant_set, vowel_set, pause].iter().filter(|b| **b).count();
            assert_eq!(populated, 1, "unit {}", unit.symbol);
        }
    }

    #[test]
    fn duplicate_symbols_are_rejected() {
        let reg = registry();
        let err =
            Alphabet::from_units("x", "y", vec![consonant_b(), consonant_b()], &reg).unwrap_err();
        assert!(matches!(err, AlphabetError::DuplicateSymbol { .. }));
    }

    #[test]
    fn empty_file_is_a_valid_empty_alphabet() {
        let reg = registry();
        let alphabet = Alphabet::parse_jsonl("fresh", "Esperanto", "", &reg).unwrap();
        assert!(alphabet.is_empty());
    }

    #[test]
    fn invalid_unit_carries_its_report() {
        let reg = registry();
        let mut bad = vowel_a();
        bad.location = Some(1);
        let err = Alphabet::from_units("x", "y", vec![bad], &reg).unwrap_err();
        match err {
            AlphabetError::InvalidAlphabet { reports } => {
                assert_eq!(reports.len(), 1);
                assert_eq!(reports[0].symbol, "a1");
                assert!(!reports[0].violations.is_empty());
            }
            other => panic!("expected invalid alphabet, got {other}"),
        }
    }

    #[test]
    fn parse_error_carries_line_number() {
        let reg = registry();
        let text = "\n{broken\n";
        match Alphabet::parse_jsonl("x", "y", text, &reg).unwrap_err() {
            AlphabetError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn tokenize_examples() {
        let reg = registry();
        let alphabet = Alphabet::russian_seed(&reg).unwrap();
        assert!(alphabet.tokenize("").unwrap().is_empty());
        assert_eq!(alphabet.tokenize("b a1 t'").unwrap(), ["b", "a1", "t'"]);
        match alphabet.tokenize("b xyzzy t'").unwrap_err() {
            AlphabetError::UnknownSymbol { token, index } => {
                assert_eq!(token, "xyzzy");
                assert_eq!(index, 1);
            }
            other => panic!("expected unknown symbol, got {other}"),
        }
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_transcription::<&str>(&[]), "");
        assert_eq!(render_transcription(&["sh"]), "sh");
        assert_eq!(render_transcription(&["b", "a1"]), "b a1");
    }

    #[test]
    fn validation_accepts_user_extended_books() {
        // New vocabulary entries added through the registry must be usable
        // from CLASS rows.
        let mut reg = registry();
        let code = reg
            .add_entry(tables::BOOK_LOCATION, BookEntry::Titled(RefEntry::new(0, "uvular")))
            .unwrap();
        let mut unit = consonant_b();
        unit.location = Some(code);
        assert!(validate_class(&unit, &reg).is_empty());
    }

    proptest! {
        #[test]
        fn classify_tempo_is_monotone(a in 0.01f64..40.0, b in 0.01f64..40.0) {
            let reg = registry();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let band_lo = classify_tempo(lo, &reg).unwrap().tempo_id;
            let band_hi = classify_tempo(hi, &reg).unwrap().tempo_id;
            prop_assert!(band_lo <= band_hi);
        }

        #[test]
        fn tokenize_render_round_trip(indices in proptest::collection::vec(0usize..77, 0..24)) {
            let reg = registry();
            let alphabet = Alphabet::russian_seed(&reg).unwrap();
            let symbols: Vec<String> = indices
                .iter()
                .map(|i| alphabet.units()[*i].symbol.clone())
                .collect();
            let rendered = render_transcription(&symbols);
            let tokens = alphabet.tokenize(&rendered).unwrap();
            prop_assert_eq!(tokens, symbols);
            // Canonical strings survive the opposite direction too.
            let rendered_again = render_transcription(&alphabet.tokenize(&rendered).unwrap());
            prop_assert_eq!(rendered_again, rendered);
        }
    }
}
