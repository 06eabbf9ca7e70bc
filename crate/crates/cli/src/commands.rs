//! Command implementations. Each returns the process exit status:
//! success means the command ran and, for `validate`, that the corpus is
//! sound.

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};

use speechframe_core::alphabet::Alphabet;
use speechframe_core::corpus::{
    self, expert_check_report, segmentation_tsv, symbol_coverage, validate_segmentation,
    SegmentationSource, COVERAGE_MINIMUM, EXPERT_CHECK_MINIMUM,
};
use speechframe_core::query::{corpus_stats, staged_search, FilterCriterion, QueryError};
use speechframe_core::refbooks::{seed_store, ReferenceRegistry};
use speechframe_core::store::{self, tables, CorpusStore, OpenOptions};

pub fn init(path: &Path, with_seed: bool) -> Result<ExitCode> {
    let mut store = CorpusStore::init(path)
        .with_context(|| format!("cannot initialise corpus in {}", path.display()))?;
    seed_store(&mut store, with_seed).context("seeding the reference books")?;
    store.save().context("writing the corpus")?;
    println!(
        "initialised corpus in {} ({} tables, reference books seeded{})",
        path.display(),
        store.schema().len(),
        if with_seed {
            format!(", alphabet of {} units", store.table_len(tables::CLASS))
        } else {
            String::new()
        }
    );
    Ok(ExitCode::SUCCESS)
}

pub fn import(path: &Path, table: &str, file: &Path) -> Result<ExitCode> {
    let mut store = CorpusStore::open(path)?;
    let ts = store
        .schema()
        .table(table)
        .ok_or_else(|| anyhow!("unknown table {table}; tables: {}", tables::ALL.join(", ")))?
        .clone();

    let text = fs::read_to_string(file)
        .with_context(|| format!("cannot read {}", file.display()))?;
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let json: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| anyhow!("{}:{}: {e}", file.display(), idx + 1))?;
        let rec = store::parse_record(&ts, &json)
            .map_err(|e| anyhow!("{}:{}: {e}", file.display(), idx + 1))?;
        records.push(rec);
    }

    // All-or-nothing: stage the inserts on a copy, swap in on success.
    let mut staged = store.clone();
    for (i, rec) in records.iter().enumerate() {
        staged
            .insert(&ts.name, rec.clone())
            .with_context(|| format!("record {} of {}: nothing imported", i + 1, records.len()))?;
    }
    store = staged;
    store.save()?;
    println!("imported {} record(s) into {}", records.len(), ts.name);
    Ok(ExitCode::SUCCESS)
}

pub fn validate(path: &Path) -> Result<ExitCode> {
    let store = CorpusStore::open_with(path, OpenOptions { tolerate_violations: true })?;
    let mut violations = 0usize;
    let mut warnings = 0usize;

    for v in store.integrity_check() {
        println!("VIOLATION {v}");
        violations += 1;
    }

    let signals = corpus::signals(&store)?;
    for signal in &signals {
        for source in [SegmentationSource::Manual, SegmentationSource::Automatic] {
            for v in validate_segmentation(&store, &signal.file_name, source)? {
                println!("VIOLATION {}: {source} segmentation: {v}", signal.file_name);
                violations += 1;
            }
        }
    }

    let registry = ReferenceRegistry::from_store(&store)?;
    match Alphabet::from_store(&store, &registry) {
        Ok(alphabet) => {
            if !alphabet.is_empty() {
                let coverage = symbol_coverage(&store, &alphabet, SegmentationSource::Manual)?;
                for symbol in &coverage.undercovered {
                    println!(
                        "WARNING symbol {symbol:?} occurs {} time(s) in manual segmentation (minimum {COVERAGE_MINIMUM})",
                        coverage.counts[symbol]
                    );
                    warnings += 1;
                }
            }
        }
        Err(e) => {
            println!("VIOLATION alphabet: {e}");
            violations += 1;
        }
    }

    for file_name in expert_check_report(&store)? {
        println!(
            "WARNING {file_name}: manual segmentation lacks the {EXPERT_CHECK_MINIMUM}-expert check"
        );
        warnings += 1;
    }

    println!(
        "checked {} signals: {violations} violation(s), {warnings} warning(s)",
        signals.len()
    );
    Ok(if violations == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

pub fn search(path: &Path, raw_criteria: &[String], records: bool) -> Result<ExitCode> {
    let store = CorpusStore::open(path)?;
    let registry = ReferenceRegistry::from_store(&store)?;

    let mut criteria = Vec::with_capacity(raw_criteria.len());
    for raw in raw_criteria {
        let Some((attr, value)) = raw.split_once('=') else {
            bail!("criterion {raw:?} is not of the form attribute=value");
        };
        match FilterCriterion::parse(attr.trim(), value.trim(), &registry) {
            Ok(c) => criteria.push(c),
            Err(e @ QueryError::UnknownAttribute { .. }) => bail!("{e}"),
            Err(e) => bail!("{e}"),
        }
    }

    let results = staged_search(&store, &criteria)?;
    if records {
        let ts = store.schema().table(tables::SPEECH_SIGNAL).expect("schema table");
        for signal in &results {
            println!("{}", store::render_record(ts, &signal.to_record()));
        }
    } else {
        for signal in &results {
            println!(
                "{}\tspeaker={}\tunit={}\tlength={:.3}s\tdate={}\temotion={}\tvoice-type={}",
                signal.file_name,
                signal.speaker,
                signal.speech_unit,
                signal.length_s,
                signal.record_date.format("%Y-%m-%d"),
                title_or_code(&registry, tables::BOOK_EMOTIONS, signal.emotional_state),
                title_or_code(&registry, tables::BOOK_VOICE_TYPES, signal.voice_type),
            );
        }
        eprintln!("{} signal(s) matched {} criterion(s)", results.len(), criteria.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn title_or_code(registry: &ReferenceRegistry, book: &str, code: i64) -> String {
    registry.lookup(book, code).map(|e| e.title).unwrap_or_else(|_| code.to_string())
}

pub fn stats(path: &Path, records: bool) -> Result<ExitCode> {
    let store = CorpusStore::open(path)?;
    let registry = ReferenceRegistry::from_store(&store)?;
    let stats = corpus_stats(&store)?;

    if records {
        let by_sex: serde_json::Map<String, serde_json::Value> = stats
            .speaker_count_by_sex
            .iter()
            .map(|(code, n)| (code.to_string(), serde_json::Value::from(*n)))
            .collect();
        let json = serde_json::json!({
            "speech_unit_count": stats.speech_unit_count,
            "speaker_count": stats.speaker_count,
            "speaker_count_by_sex": by_sex,
            "signal_count": stats.signal_count,
            "total_duration_s": stats.total_duration_s,
            "manually_segmented_signal_count": stats.manually_segmented_signal_count,
        });
        println!("{json}");
        return Ok(ExitCode::SUCCESS);
    }

    let sex_parts: Vec<String> = stats
        .speaker_count_by_sex
        .iter()
        .map(|(code, n)| format!("{} {n}", title_or_code(&registry, tables::BOOK_SEX, *code)))
        .collect();
    println!("speech units:               {}", stats.speech_unit_count);
    if sex_parts.is_empty() {
        println!("speakers:                   {}", stats.speaker_count);
    } else {
        println!("speakers:                   {} ({})", stats.speaker_count, sex_parts.join(", "));
    }
    println!("speech signals:             {}", stats.signal_count);
    println!("total duration:             {:.3} s", stats.total_duration_s);
    println!("manually segmented signals: {}", stats.manually_segmented_signal_count);
    Ok(ExitCode::SUCCESS)
}

pub fn export_segmentation(
    path: &Path,
    file_name: &str,
    source: Option<SegmentationSource>,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let store = CorpusStore::open(path)?;
    let tsv = segmentation_tsv(&store, file_name, source)?;
    match out {
        Some(target) => fs::write(target, &tsv)
            .with_context(|| format!("cannot write {}", target.display()))?,
        None => print!("{tsv}"),
    }
    Ok(ExitCode::SUCCESS)
}
