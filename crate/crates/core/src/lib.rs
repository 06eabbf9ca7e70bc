//! Speech corpus management engine.
//!
//! A "speech frame" couples recorded speech signals with a relational
//! description of everything around them: who spoke, under which acoustic
//! conditions, in which emotional state, and how the continuous signal
//! decomposes into sound units. This crate implements the data-management
//! half of such a system; the audio itself stays outside, referenced by
//! file name only.
//!
//! The crate is organised around five modules:
//!
//! - [`store`]: embedded relational-style persistence for the 27 corpus
//!   tables, with primary/foreign-key enforcement, cascade update and
//!   deletion, and a self-describing line-delimited on-disk format.
//! - [`refbooks`]: the controlled vocabularies ("reference books") backing
//!   every foreign key, with the default seeded contents.
//! - [`alphabet`]: the sound-unit alphabet (CLASS table), feature
//!   exclusivity validation, the stress-variant and tempo classifiers and
//!   transcription tokenization.
//! - [`corpus`]: the domain layer over the store for speakers, speech
//!   units, speech signals and segmentation, including segmentation
//!   validation and corpus-quality checks.
//! - [`query`]: staged multi-parameter search over signal descriptions,
//!   corpus statistics and the catalog of canned queries.
//!
//! [`fixtures`] holds deterministic corpus generators used by the test
//! suites and benchmarks.

// Error enums carry full context (table, key, edge); their size is the
// price of precise diagnostics.
#![allow(clippy::result_large_err)]

pub mod alphabet;
pub mod corpus;
pub mod fixtures;
pub mod query;
pub mod refbooks;
pub mod store;
