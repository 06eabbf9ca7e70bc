//! Reference books: the controlled vocabularies backing every foreign key.
//!
//! Sixteen books are plain code+title tables; six carry extra attributes
//! (acoustic environments, dialects, speech tempos, file formats, noise
//! profiles, recording devices). The default contents ship as a versioned
//! seed data file embedded in the crate.
//!
//! A registry is an immutable value after seeding plus explicit
//! [`ReferenceRegistry::add_entry`] mutations: share it read-only across
//! threads; mutation requires exclusive access.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::store::{self, tables, CorpusStore, Record, StoreError, Value};

/// Versioned seed contents for the default registry.
const REGISTRY_SEED: &str = include_str!("../data/registry_seed_v1.jsonl");

/// The reserved "no noise" profile code.
pub const NO_NOISE: i64 = 0;

/// The simple code+title books.
pub const SIMPLE_BOOKS: [&str; 16] = [
    tables::BOOK_DEFECTS,
    tables::BOOK_EMOTIONS,
    tables::BOOK_LABIALIZATION,
    tables::BOOK_LOCATION,
    tables::BOOK_RISE,
    tables::BOOK_ROW,
    tables::BOOK_SEX,
    tables::BOOK_SOFT,
    tables::BOOK_SPEECH_TYPES,
    tables::BOOK_STRESSED,
    tables::BOOK_UNIT_TYPES,
    tables::BOOK_VOICED,
    tables::BOOK_VOICE_TYPES,
    tables::BOOK_WAY_OF_ORIGIN,
    tables::COMMUNICATION_CHANNEL,
    tables::SICKNESS,
];

/// Books with extra attributes beyond code+title.
pub const STRUCTURED_BOOKS: [&str; 6] = [
    tables::ACOUSTIC_ENVIRONMENT,
    tables::BOOK_DIALECTS,
    tables::BOOK_SPEECH_TEMPS,
    tables::FILE_FORMAT,
    tables::NOISE,
    tables::RECORDING_DEVICE,
];

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown reference book {book}")]
    UnknownBook { book: String },
    #[error("{book}: no entry with code {code}")]
    UnknownCode { book: String, code: i64 },
    #[error("{book}: an entry titled {title:?} already exists")]
    DuplicateTitle { book: String, title: String },
    #[error("{book}: code {code} is reserved")]
    ReservedCode { book: String, code: i64 },
    #[error("{book}: entry title must not be empty")]
    EmptyTitle { book: String },
    #[error("{book}: expected a {expected} entry")]
    WrongEntryKind { book: String, expected: &'static str },
    #[error("{book}: invalid entry: {reason}")]
    InvalidEntry { book: String, reason: String },
    #[error("{book}: title {title:?} matches more than one entry")]
    AmbiguousTitle { book: String, title: String },
    #[error("{book}: malformed record: {reason}")]
    Malformed { book: String, reason: String },
}

/// A code+title entry, the common shape of every book lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefEntry {
    pub code: i64,
    pub title: String,
}

impl RefEntry {
    pub fn new(code: i64, title: impl Into<String>) -> RefEntry {
        RefEntry { code, title: title.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcousticEnvironment {
    pub environment_id: i64,
    pub noise_level_db: f64,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialect {
    pub dialect_id: i64,
    pub title: String,
    pub language: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeechTempo {
    pub tempo_id: i64,
    pub name: String,
    /// Upper bound in sounds per second, inclusive; `None` marks the
    /// unbounded top band.
    pub sounds_per_second_ceiling: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FileFormat {
    pub format_id: i64,
    pub sampling_frequency_hz: f64,
    pub bit_depth: i64,
    pub file_type: String,
    pub channel_count: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseProfile {
    pub noise_id: i64,
    pub description: String,
    /// Signal-to-noise ratio in decibels; absent for the no-noise entry.
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordingDevice {
    pub device_id: i64,
    pub device_type: String,
    pub bandwidth_hz: f64,
}

/// An entry to add to a book. The code field of the payload is ignored on
/// insertion: a fresh unique code is always assigned. The one exception is
/// the reserved no-noise profile, which may not be redefined.
#[derive(Debug, Clone)]
pub enum BookEntry {
    Titled(RefEntry),
    AcousticEnvironment(AcousticEnvironment),
    Dialect(Dialect),
    SpeechTempo(SpeechTempo),
    FileFormat(FileFormat),
    NoiseProfile(NoiseProfile),
    RecordingDevice(RecordingDevice),
}

impl BookEntry {
    /// A titled entry for a simple book; the code is assigned on insert.
    pub fn titled(title: impl Into<String>) -> BookEntry {
        BookEntry::Titled(RefEntry::new(0, title))
    }
}

/// All reference books of a corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReferenceRegistry {
    simple: BTreeMap<&'static str, BTreeMap<i64, String>>,
    environments: BTreeMap<i64, AcousticEnvironment>,
    dialects: BTreeMap<i64, Dialect>,
    tempos: BTreeMap<i64, SpeechTempo>,
    formats: BTreeMap<i64, FileFormat>,
    noises: BTreeMap<i64, NoiseProfile>,
    devices: BTreeMap<i64, RecordingDevice>,
}

impl ReferenceRegistry {
    /// An empty registry. Every book exists; only the reserved no-noise
    /// profile is present.
    pub fn empty() -> ReferenceRegistry {
        let mut reg = ReferenceRegistry {
            simple: SIMPLE_BOOKS.iter().map(|b| (*b, BTreeMap::new())).collect(),
            ..ReferenceRegistry::default()
        };
        reg.noises.insert(
            NO_NOISE,
            NoiseProfile { noise_id: NO_NOISE, description: "no noise".to_owned(), snr_db: None },
        );
        reg
    }

    /// The registry seeded with the default vocabularies: two sexes, the
    /// three-way softness and voicing classifications, four voice types,
    /// four speech-unit types, four manners of articulation, three rises,
    /// two labializations, the five Russian dialect regions, the eleven
    /// stress variants, the three tempo bands, the no-noise profile and
    /// the stock acoustic environments.
    pub fn seed_default() -> ReferenceRegistry {
        let mut reg = ReferenceRegistry::empty();
        reg.load_seed(REGISTRY_SEED).expect("embedded registry seed is valid");
        reg.validate().expect("embedded registry seed satisfies invariants");
        reg
    }

    fn load_seed(&mut self, text: &str) -> Result<(), RegistryError> {
        let malformed = |book: &str, reason: String| RegistryError::Malformed {
            book: book.to_owned(),
            reason,
        };
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let json: serde_json::Value =
                serde_json::from_str(line).map_err(|e| malformed("seed", e.to_string()))?;
            let book = json
                .get("table")
                .and_then(|v| v.as_str())
                .ok_or_else(|| malformed("seed", "missing table".to_owned()))?
                .to_owned();
            let geti = |k: &str| json.get(k).and_then(|v| v.as_i64());
            let gets = |k: &str| json.get(k).and_then(|v| v.as_str()).map(str::to_owned);
            let getf = |k: &str| json.get(k).and_then(|v| v.as_f64());
            let need_i = |k: &str| geti(k).ok_or_else(|| malformed(&book, format!("missing {k}")));
            let need_s = |k: &str| gets(k).ok_or_else(|| malformed(&book, format!("missing {k}")));
            let need_f = |k: &str| getf(k).ok_or_else(|| malformed(&book, format!("missing {k}")));

            match book.as_str() {
                tables::BOOK_DIALECTS => {
                    let d = Dialect {
                        dialect_id: need_i("ID_DIALECT")?,
                        title: need_s("TITLE")?,
                        language: need_s("LANGUAGE")?,
                    };
                    self.dialects.insert(d.dialect_id, d);
                }
                tables::BOOK_SPEECH_TEMPS => {
                    let t = SpeechTempo {
                        tempo_id: need_i("ID")?,
                        name: need_s("SPEED")?,
                        sounds_per_second_ceiling: geti("SOUNDS_PER_SECOND"),
                    };
                    self.tempos.insert(t.tempo_id, t);
                }
                tables::NOISE => {
                    let n = NoiseProfile {
                        noise_id: need_i("ID_NOISE")?,
                        description: need_s("NOISE_TYPE")?,
                        snr_db: getf("SNR_DB"),
                    };
                    self.noises.insert(n.noise_id, n);
                }
                tables::ACOUSTIC_ENVIRONMENT => {
                    let e = AcousticEnvironment {
                        environment_id: need_i("ENVIRONMENT_ID")?,
                        noise_level_db: need_f("NOISE_LEVEL_DB")?,
                        title: need_s("TITLE")?,
                    };
                    self.environments.insert(e.environment_id, e);
                }
                tables::FILE_FORMAT => {
                    let ff = FileFormat {
                        format_id: need_i("ID")?,
                        sampling_frequency_hz: need_f("DISCRETIZATION_FREQUENCY")?,
                        bit_depth: need_i("BITRATE")?,
                        file_type: need_s("FILE_TYPE")?,
                        channel_count: need_i("NUMBER_OF_CHANNELS")?,
                    };
                    self.formats.insert(ff.format_id, ff);
                }
                tables::RECORDING_DEVICE => {
                    let d = RecordingDevice {
                        device_id: need_i("DEVICE_ID")?,
                        device_type: need_s("TYPE")?,
                        bandwidth_hz: need_f("BANDWIDTH")?,
                    };
                    self.devices.insert(d.device_id, d);
                }
                simple => {
                    let entries = self
                        .simple
                        .get_mut(simple)
                        .ok_or_else(|| RegistryError::UnknownBook { book: simple.to_owned() })?;
                    let id_field = simple_book_id_field(simple);
                    let code = need_i(id_field)?;
                    entries.insert(code, need_s("TITLE")?);
                }
            }
        }
        Ok(())
    }

    pub fn is_book(&self, name: &str) -> bool {
        self.simple.contains_key(name) || STRUCTURED_BOOKS.contains(&name)
    }

    /// All 22 book names, sorted.
    pub fn book_names(&self) -> Vec<&'static str> {
        let mut names: Vec<&'static str> = self.simple.keys().copied().collect();
        names.extend(STRUCTURED_BOOKS);
        names.sort_unstable();
        names
    }

    pub fn len(&self, book: &str) -> Result<usize, RegistryError> {
        Ok(match book {
            tables::ACOUSTIC_ENVIRONMENT => self.environments.len(),
            tables::BOOK_DIALECTS => self.dialects.len(),
            tables::BOOK_SPEECH_TEMPS => self.tempos.len(),
            tables::FILE_FORMAT => self.formats.len(),
            tables::NOISE => self.noises.len(),
            tables::RECORDING_DEVICE => self.devices.len(),
            simple => self.simple_book(simple)?.len(),
        })
    }

    fn simple_book(&self, book: &str) -> Result<&BTreeMap<i64, String>, RegistryError> {
        self.simple
            .get(book)
            .ok_or_else(|| RegistryError::UnknownBook { book: book.to_owned() })
    }

    /// Looks up an entry by code. Structured books present their
    /// human-readable label as the title.
    pub fn lookup(&self, book: &str, code: i64) -> Result<RefEntry, RegistryError> {
        let missing = || RegistryError::UnknownCode { book: book.to_owned(), code };
        let title = match book {
            tables::ACOUSTIC_ENVIRONMENT => {
                self.environments.get(&code).map(|e| e.title.clone()).ok_or_else(missing)?
            }
            tables::BOOK_DIALECTS => {
                self.dialects.get(&code).map(|d| d.title.clone()).ok_or_else(missing)?
            }
            tables::BOOK_SPEECH_TEMPS => {
                self.tempos.get(&code).map(|t| t.name.clone()).ok_or_else(missing)?
            }
            tables::FILE_FORMAT => {
                self.formats.get(&code).map(|f| f.file_type.clone()).ok_or_else(missing)?
            }
            tables::NOISE => {
                self.noises.get(&code).map(|n| n.description.clone()).ok_or_else(missing)?
            }
            tables::RECORDING_DEVICE => {
                self.devices.get(&code).map(|d| d.device_type.clone()).ok_or_else(missing)?
            }
            simple => self.simple_book(simple)?.get(&code).cloned().ok_or_else(missing)?,
        };
        Ok(RefEntry { code, title })
    }

    pub fn has_code(&self, book: &str, code: i64) -> bool {
        self.lookup(book, code).is_ok()
    }

    /// All entries of a book as code+title pairs, in code order.
    pub fn entries(&self, book: &str) -> Result<Vec<RefEntry>, RegistryError> {
        if !self.is_book(book) {
            return Err(RegistryError::UnknownBook { book: book.to_owned() });
        }
        let codes: Vec<i64> = match book {
            tables::ACOUSTIC_ENVIRONMENT => self.environments.keys().copied().collect(),
            tables::BOOK_DIALECTS => self.dialects.keys().copied().collect(),
            tables::BOOK_SPEECH_TEMPS => self.tempos.keys().copied().collect(),
            tables::FILE_FORMAT => self.formats.keys().copied().collect(),
            tables::NOISE => self.noises.keys().copied().collect(),
            tables::RECORDING_DEVICE => self.devices.keys().copied().collect(),
            simple => self.simple_book(simple)?.keys().copied().collect(),
        };
        codes.into_iter().map(|c| self.lookup(book, c)).collect()
    }

    /// Resolves a title to its code: exact match first, then a unique
    /// case-insensitive match.
    pub fn code_by_title(&self, book: &str, title: &str) -> Result<Option<i64>, RegistryError> {
        let entries = self.entries(book)?;
        if let Some(e) = entries.iter().find(|e| e.title == title) {
            return Ok(Some(e.code));
        }
        let lowered = title.to_lowercase();
        let mut matches = entries.iter().filter(|e| e.title.to_lowercase() == lowered);
        match (matches.next(), matches.next()) {
            (Some(e), None) => Ok(Some(e.code)),
            (Some(_), Some(_)) => Err(RegistryError::AmbiguousTitle {
                book: book.to_owned(),
                title: title.to_owned(),
            }),
            _ => Ok(None),
        }
    }

    pub fn voice_types(&self) -> Vec<RefEntry> {
        self.entries(tables::BOOK_VOICE_TYPES).expect("book exists")
    }

    pub fn stress_variants(&self) -> Vec<RefEntry> {
        self.entries(tables::BOOK_STRESSED).expect("book exists")
    }

    /// Dialects of one language, in code order.
    pub fn dialects(&self, language: &str) -> Vec<&Dialect> {
        self.dialects.values().filter(|d| d.language == language).collect()
    }

    pub fn all_dialects(&self) -> impl Iterator<Item = &Dialect> {
        self.dialects.values()
    }

    /// Tempo bands in code order.
    pub fn tempos(&self) -> Vec<&SpeechTempo> {
        self.tempos.values().collect()
    }

    pub fn noise_profiles(&self) -> impl Iterator<Item = &NoiseProfile> {
        self.noises.values()
    }

    pub fn environments(&self) -> impl Iterator<Item = &AcousticEnvironment> {
        self.environments.values()
    }

    pub fn file_formats(&self) -> impl Iterator<Item = &FileFormat> {
        self.formats.values()
    }

    pub fn recording_devices(&self) -> impl Iterator<Item = &RecordingDevice> {
        self.devices.values()
    }

    /// Adds an entry to a book under a fresh unique code and returns the
    /// code.
    pub fn add_entry(&mut self, book: &str, entry: BookEntry) -> Result<i64, RegistryError> {
        if !self.is_book(book) {
            return Err(RegistryError::UnknownBook { book: book.to_owned() });
        }
        let wrong = |expected: &'static str| RegistryError::WrongEntryKind {
            book: book.to_owned(),
            expected,
        };
        match book {
            tables::ACOUSTIC_ENVIRONMENT => {
                let BookEntry::AcousticEnvironment(mut e) = entry else {
                    return Err(wrong("acoustic environment"));
                };
                self.check_title(book, &e.title)?;
                if e.noise_level_db < 0.0 {
                    return Err(RegistryError::InvalidEntry {
                        book: book.to_owned(),
                        reason: format!("negative noise level {}", e.noise_level_db),
                    });
                }
                e.environment_id = next_code(self.environments.keys());
                let code = e.environment_id;
                self.environments.insert(code, e);
                Ok(code)
            }
            tables::BOOK_DIALECTS => {
                let BookEntry::Dialect(mut d) = entry else {
                    return Err(wrong("dialect"));
                };
                if d.title.is_empty() {
                    return Err(RegistryError::EmptyTitle { book: book.to_owned() });
                }
                if self.dialects.values().any(|x| x.title == d.title && x.language == d.language) {
                    return Err(RegistryError::DuplicateTitle {
                        book: book.to_owned(),
                        title: format!("{} [{}]", d.title, d.language),
                    });
                }
                d.dialect_id = next_code(self.dialects.keys());
                let code = d.dialect_id;
                self.dialects.insert(code, d);
                Ok(code)
            }
            tables::BOOK_SPEECH_TEMPS => {
                let BookEntry::SpeechTempo(mut t) = entry else {
                    return Err(wrong("speech tempo"));
                };
                self.check_title(book, &t.name)?;
                t.tempo_id = next_code(self.tempos.keys());
                let code = t.tempo_id;
                self.tempos.insert(code, t);
                if let Err(e) = self.validate_tempos() {
                    self.tempos.remove(&code);
                    return Err(e);
                }
                Ok(code)
            }
            tables::FILE_FORMAT => {
                let BookEntry::FileFormat(mut f) = entry else {
                    return Err(wrong("file format"));
                };
                if f.file_type.is_empty() {
                    return Err(RegistryError::EmptyTitle { book: book.to_owned() });
                }
                if f.sampling_frequency_hz <= 0.0 || f.bit_depth <= 0 || f.channel_count < 1 {
                    return Err(RegistryError::InvalidEntry {
                        book: book.to_owned(),
                        reason: "sampling frequency, bit depth and channel count must be positive"
                            .to_owned(),
                    });
                }
                f.format_id = next_code(self.formats.keys());
                let code = f.format_id;
                self.formats.insert(code, f);
                Ok(code)
            }
            tables::NOISE => {
                let BookEntry::NoiseProfile(mut n) = entry else {
                    return Err(wrong("noise profile"));
                };
                if n.noise_id == NO_NOISE {
                    return Err(RegistryError::ReservedCode {
                        book: book.to_owned(),
                        code: NO_NOISE,
                    });
                }
                self.check_title(book, &n.description)?;
                n.noise_id = next_code(self.noises.keys());
                let code = n.noise_id;
                self.noises.insert(code, n);
                Ok(code)
            }
            tables::RECORDING_DEVICE => {
                let BookEntry::RecordingDevice(mut d) = entry else {
                    return Err(wrong("recording device"));
                };
                if d.device_type.is_empty() {
                    return Err(RegistryError::EmptyTitle { book: book.to_owned() });
                }
                if d.bandwidth_hz <= 0.0 {
                    return Err(RegistryError::InvalidEntry {
                        book: book.to_owned(),
                        reason: format!("bandwidth must be positive, got {}", d.bandwidth_hz),
                    });
                }
                d.device_id = next_code(self.devices.keys());
                let code = d.device_id;
                self.devices.insert(code, d);
                Ok(code)
            }
            simple => {
                let BookEntry::Titled(e) = entry else {
                    return Err(wrong("code+title"));
                };
                self.check_title(simple, &e.title)?;
                let entries = self.simple.get_mut(simple).expect("checked above");
                let code = next_code(entries.keys());
                entries.insert(code, e.title);
                Ok(code)
            }
        }
    }

    fn check_title(&self, book: &str, title: &str) -> Result<(), RegistryError> {
        if title.is_empty() {
            return Err(RegistryError::EmptyTitle { book: book.to_owned() });
        }
        if self.entries(book)?.iter().any(|e| e.title == title) {
            return Err(RegistryError::DuplicateTitle {
                book: book.to_owned(),
                title: title.to_owned(),
            });
        }
        Ok(())
    }

    fn validate_tempos(&self) -> Result<(), RegistryError> {
        let bad = |reason: String| RegistryError::InvalidEntry {
            book: tables::BOOK_SPEECH_TEMPS.to_owned(),
            reason,
        };
        let unbounded =
            self.tempos.values().filter(|t| t.sounds_per_second_ceiling.is_none()).count();
        if !self.tempos.is_empty() && unbounded != 1 {
            return Err(bad(format!("expected exactly one unbounded band, found {unbounded}")));
        }
        let mut prev: Option<i64> = None;
        for t in self.tempos.values() {
            match t.sounds_per_second_ceiling {
                Some(c) => {
                    if c <= 0 {
                        return Err(bad(format!("non-positive ceiling {c}")));
                    }
                    if prev.is_some_and(|p| p >= c) {
                        return Err(bad("ceilings must be strictly increasing".to_owned()));
                    }
                    prev = Some(c);
                }
                None => {
                    if t.tempo_id != *self.tempos.keys().last().expect("non-empty") {
                        return Err(bad("the unbounded band must be the top band".to_owned()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks every registry invariant: tempo band ordering, the reserved
    /// no-noise profile, numeric bounds and title uniqueness.
    pub fn validate(&self) -> Result<(), RegistryError> {
        self.validate_tempos()?;
        if !self.noises.contains_key(&NO_NOISE) {
            return Err(RegistryError::InvalidEntry {
                book: tables::NOISE.to_owned(),
                reason: "the reserved no-noise profile 0 is missing".to_owned(),
            });
        }
        for e in self.environments.values() {
            if e.noise_level_db < 0.0 {
                return Err(RegistryError::InvalidEntry {
                    book: tables::ACOUSTIC_ENVIRONMENT.to_owned(),
                    reason: format!("negative noise level in {}", e.title),
                });
            }
        }
        for f in self.formats.values() {
            if f.sampling_frequency_hz <= 0.0 || f.bit_depth <= 0 || f.channel_count < 1 {
                return Err(RegistryError::InvalidEntry {
                    book: tables::FILE_FORMAT.to_owned(),
                    reason: format!("invalid format {}", f.format_id),
                });
            }
        }
        for d in self.devices.values() {
            if d.bandwidth_hz <= 0.0 {
                return Err(RegistryError::InvalidEntry {
                    book: tables::RECORDING_DEVICE.to_owned(),
                    reason: format!("invalid device {}", d.device_id),
                });
            }
        }
        for book in self.book_names() {
            let entries = self.entries(book)?;
            let mut titles: Vec<&str> = entries.iter().map(|e| e.title.as_str()).collect();
            if titles.iter().any(|t| t.is_empty()) {
                return Err(RegistryError::EmptyTitle { book: book.to_owned() });
            }
            if entries.iter().any(|e| e.code < 0) {
                return Err(RegistryError::InvalidEntry {
                    book: book.to_owned(),
                    reason: "negative code".to_owned(),
                });
            }
            if book == tables::FILE_FORMAT || book == tables::RECORDING_DEVICE {
                continue; // labels may repeat; identity is the code
            }
            if book == tables::BOOK_DIALECTS {
                let mut pairs: Vec<(&str, &str)> = self
                    .dialects
                    .values()
                    .map(|d| (d.title.as_str(), d.language.as_str()))
                    .collect();
                pairs.sort_unstable();
                if pairs.windows(2).any(|w| w[0] == w[1]) {
                    return Err(RegistryError::InvalidEntry {
                        book: book.to_owned(),
                        reason: "duplicate (title, language) pair".to_owned(),
                    });
                }
                continue;
            }
            titles.sort_unstable();
            if let Some(w) = titles.windows(2).find(|w| w[0] == w[1]) {
                return Err(RegistryError::DuplicateTitle {
                    book: book.to_owned(),
                    title: w[0].to_owned(),
                });
            }
        }
        Ok(())
    }

    /// Inserts every book entry into the corpus store tables.
    pub fn write_into(&self, store: &mut CorpusStore) -> Result<(), StoreError> {
        let int = Value::Integer;
        let text = |s: &str| Value::Text(s.to_owned());
        let opt_int = |v: Option<i64>| v.map(Value::Integer).unwrap_or(Value::Null);
        let opt_real = |v: Option<f64>| v.map(Value::Real).unwrap_or(Value::Null);

        for (book, entries) in &self.simple {
            let id_field = simple_book_id_field(book);
            for (code, title) in entries {
                let rec: Record =
                    [(id_field.to_owned(), int(*code)), ("TITLE".to_owned(), text(title))]
                        .into_iter()
                        .collect();
                store.insert(book, rec)?;
            }
        }
        for e in self.environments.values() {
            let rec: Record = [
                ("ENVIRONMENT_ID".to_owned(), int(e.environment_id)),
                ("NOISE_LEVEL_DB".to_owned(), Value::Real(e.noise_level_db)),
                ("TITLE".to_owned(), text(&e.title)),
            ]
            .into_iter()
            .collect();
            store.insert(tables::ACOUSTIC_ENVIRONMENT, rec)?;
        }
        for d in self.dialects.values() {
            let rec: Record = [
                ("ID_DIALECT".to_owned(), int(d.dialect_id)),
                ("TITLE".to_owned(), text(&d.title)),
                ("LANGUAGE".to_owned(), text(&d.language)),
            ]
            .into_iter()
            .collect();
            store.insert(tables::BOOK_DIALECTS, rec)?;
        }
        for t in self.tempos.values() {
            let rec: Record = [
                ("ID".to_owned(), int(t.tempo_id)),
                ("SPEED".to_owned(), text(&t.name)),
                ("SOUNDS_PER_SECOND".to_owned(), opt_int(t.sounds_per_second_ceiling)),
            ]
            .into_iter()
            .collect();
            store.insert(tables::BOOK_SPEECH_TEMPS, rec)?;
        }
        for f in self.formats.values() {
            let rec: Record = [
                ("ID".to_owned(), int(f.format_id)),
                ("DISCRETIZATION_FREQUENCY".to_owned(), Value::Real(f.sampling_frequency_hz)),
                ("BITRATE".to_owned(), int(f.bit_depth)),
                ("FILE_TYPE".to_owned(), text(&f.file_type)),
                ("NUMBER_OF_CHANNELS".to_owned(), int(f.channel_count)),
            ]
            .into_iter()
            .collect();
            store.insert(tables::FILE_FORMAT, rec)?;
        }
        for n in self.noises.values() {
            let rec: Record = [
                ("ID_NOISE".to_owned(), int(n.noise_id)),
                ("NOISE_TYPE".to_owned(), text(&n.description)),
                ("SNR_DB".to_owned(), opt_real(n.snr_db)),
            ]
            .into_iter()
            .collect();
            store.insert(tables::NOISE, rec)?;
        }
        for d in self.devices.values() {
            let rec: Record = [
                ("DEVICE_ID".to_owned(), int(d.device_id)),
                ("TYPE".to_owned(), text(&d.device_type)),
                ("BANDWIDTH".to_owned(), Value::Real(d.bandwidth_hz)),
            ]
            .into_iter()
            .collect();
            store.insert(tables::RECORDING_DEVICE, rec)?;
        }
        Ok(())
    }

    /// Reads the registry back out of the corpus store tables. Structural
    /// readability is checked; call [`ReferenceRegistry::validate`] to
    /// audit the semantic invariants.
    pub fn from_store(store: &CorpusStore) -> Result<ReferenceRegistry, RegistryError> {
        use store::field;
        let mal = |book: &str, e: StoreError| RegistryError::Malformed {
            book: book.to_owned(),
            reason: e.to_string(),
        };

        let mut reg = ReferenceRegistry {
            simple: SIMPLE_BOOKS.iter().map(|b| (*b, BTreeMap::new())).collect(),
            ..ReferenceRegistry::default()
        };
        for book in SIMPLE_BOOKS {
            let id_field = simple_book_id_field(book);
            let entries = reg.simple.get_mut(book).expect("book exists");
            for (_, rec) in store.rows(book) {
                entries.insert(
                    field::int(rec, id_field).map_err(|e| mal(book, e))?,
                    field::text(rec, "TITLE").map_err(|e| mal(book, e))?.to_owned(),
                );
            }
        }
        let b = tables::ACOUSTIC_ENVIRONMENT;
        for (_, rec) in store.rows(b) {
            let e = AcousticEnvironment {
                environment_id: field::int(rec, "ENVIRONMENT_ID").map_err(|e| mal(b, e))?,
                noise_level_db: field::real(rec, "NOISE_LEVEL_DB").map_err(|e| mal(b, e))?,
                title: field::text(rec, "TITLE").map_err(|e| mal(b, e))?.to_owned(),
            };
            reg.environments.insert(e.environment_id, e);
        }
        let b = tables::BOOK_DIALECTS;
        for (_, rec) in store.rows(b) {
            let d = Dialect {
                dialect_id: field::int(rec, "ID_DIALECT").map_err(|e| mal(b, e))?,
                title: field::text(rec, "TITLE").map_err(|e| mal(b, e))?.to_owned(),
                language: field::text(rec, "LANGUAGE").map_err(|e| mal(b, e))?.to_owned(),
            };
            reg.dialects.insert(d.dialect_id, d);
        }
        let b = tables::BOOK_SPEECH_TEMPS;
        for (_, rec) in store.rows(b) {
            let t = SpeechTempo {
                tempo_id: field::int(rec, "ID").map_err(|e| mal(b, e))?,
                name: field::text(rec, "SPEED").map_err(|e| mal(b, e))?.to_owned(),
                sounds_per_second_ceiling: field::opt_int(rec, "SOUNDS_PER_SECOND")
                    .map_err(|e| mal(b, e))?,
            };
            reg.tempos.insert(t.tempo_id, t);
        }
        let b = tables::FILE_FORMAT;
        for (_, rec) in store.rows(b) {
            let f = FileFormat {
                format_id: field::int(rec, "ID").map_err(|e| mal(b, e))?,
                sampling_frequency_hz: field::real(rec, "DISCRETIZATION_FREQUENCY")
                    .map_err(|e| mal(b, e))?,
                bit_depth: field::int(rec, "BITRATE").map_err(|e| mal(b, e))?,
                file_type: field::text(rec, "FILE_TYPE").map_err(|e| mal(b, e))?.to_owned(),
                channel_count: field::int(rec, "NUMBER_OF_CHANNELS").map_err(|e| mal(b, e))?,
            };
            reg.formats.insert(f.format_id, f);
        }
        let b = tables::NOISE;
        for (_, rec) in store.rows(b) {
            let n = NoiseProfile {
                noise_id: field::int(rec, "ID_NOISE").map_err(|e| mal(b, e))?,
                description: field::text(rec, "NOISE_TYPE").map_err(|e| mal(b, e))?.to_owned(),
                snr_db: field::opt_real(rec, "SNR_DB").map_err(|e| mal(b, e))?,
            };
            reg.noises.insert(n.noise_id, n);
        }
        let b = tables::RECORDING_DEVICE;
        for (_, rec) in store.rows(b) {
            let d = RecordingDevice {
                device_id: field::int(rec, "DEVICE_ID").map_err(|e| mal(b, e))?,
                device_type: field::text(rec, "TYPE").map_err(|e| mal(b, e))?.to_owned(),
                bandwidth_hz: field::real(rec, "BANDWIDTH").map_err(|e| mal(b, e))?,
            };
            reg.devices.insert(d.device_id, d);
        }
        Ok(reg)
    }
}

/// The primary-key field name of a simple book table.
fn simple_book_id_field(book: &str) -> &'static str {
    match book {
        tables::BOOK_DEFECTS => "ID_DEFECT",
        tables::BOOK_EMOTIONS => "ID_EMOTION",
        tables::BOOK_SOFT => "SOFT_ID",
        tables::BOOK_STRESSED => "ID_STRESSED",
        tables::BOOK_UNIT_TYPES => "TYPE_ID",
        tables::BOOK_VOICED => "VOICED_ID",
        tables::SICKNESS => "ID_SICKNESS",
        _ => "ID",
    }
}

fn next_code<'a>(codes: impl Iterator<Item = &'a i64>) -> i64 {
    codes.max().map_or(1, |m| m + 1)
}

/// Seeds a fresh corpus store: reference books, and optionally the
/// shipped Russian sound alphabet into the CLASS table.
pub fn seed_store(store: &mut CorpusStore, with_alphabet: bool) -> Result<(), StoreError> {
    let registry = ReferenceRegistry::seed_default();
    registry.write_into(store)?;
    if with_alphabet {
        crate::alphabet::write_russian_seed(store)?;
    }
    Ok(())
}
