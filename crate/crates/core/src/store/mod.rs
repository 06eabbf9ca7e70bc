//! Embedded relational-style persistence for the corpus tables.
//!
//! A corpus lives in a directory holding a `corpus.manifest` file and one
//! UTF-8 line-delimited record file per table (`<TABLE_NAME>.jsonl`, one
//! JSON object per line, `null` for unset optional fields). The store
//! enforces primary-key uniqueness and foreign-key resolution on every
//! mutation, applies cascade deletion along the core chain and cascade
//! key updates everywhere, and can audit a corpus that was edited by hand.
//!
//! A handle is single-writer, multiple-reader: share `&CorpusStore`
//! freely across threads, take exclusive access to mutate. No
//! cross-process locking is provided.

mod schema;
mod value;

pub use schema::{default_schema, tables, CascadePolicy, FieldDef, ForeignKey, Schema, TableSchema};
pub use value::{field, FieldType, Key, KeyValue, Record, Value};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub const FORMAT_NAME: &str = "speech-frame-corpus";
pub const SCHEMA_VERSION: i64 = 1;
pub const MANIFEST_FILE: &str = "corpus.manifest";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("no corpus manifest in {path}")]
    MissingManifest { path: PathBuf },
    #[error("{path}: not a corpus: {reason}")]
    BadFormat { path: PathBuf, reason: String },
    #[error("corpus schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { found: i64, expected: i64 },
    #[error("missing table file {path}")]
    MissingTableFile { path: PathBuf },
    #[error("{file}:{line}: {reason}")]
    Parse { file: PathBuf, line: usize, reason: String },
    #[error("corpus has {} integrity violation(s); first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    IntegrityViolations(Vec<Violation>),
    #[error("unknown table {table}")]
    UnknownTable { table: String },
    #[error("{table}: unknown field {field}")]
    UnknownField { table: String, field: String },
    #[error("{table}: missing field {field}")]
    MissingField { table: String, field: String },
    #[error("type mismatch in {table} field {field}: expected {expected}, found {found}")]
    TypeMismatch { table: String, field: String, expected: String, found: String },
    #[error("{table}: duplicate key {key}")]
    DuplicateKey { table: String, key: Key },
    #[error("{table}.{field} = {value} does not resolve in {target_table}.{target_field}")]
    DanglingFk {
        table: String,
        field: String,
        target_table: String,
        target_field: String,
        value: KeyValue,
    },
    #[error("{table}: no record with key {key}")]
    NotFound { table: String, key: Key },
    #[error(
        "{table} {key} is still referenced by {referencing_table} {blocking_key} via {referencing_field}; nothing deleted"
    )]
    Restricted {
        table: String,
        key: Key,
        referencing_table: String,
        referencing_field: String,
        blocking_key: Key,
    },
    #[error("{table}: key {key} already exists")]
    KeyCollision { table: String, key: Key },
    #[error("{table}: bad key: {reason}")]
    BadKey { table: String, reason: String },
    #[error("refusing to initialise corpus in non-empty directory {path}")]
    PathNotEmpty { path: PathBuf },
    #[error("corpus is not bound to a directory; use save_to")]
    NoRootPath,
}

/// One integrity defect found in corpus data. Violations are data, not
/// faults: an audit returns all of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DanglingForeignKey {
        table: String,
        key: Key,
        field: String,
        target_table: String,
        target_field: String,
        value: KeyValue,
    },
    DuplicatePrimaryKey { table: String, key: Key },
    NullInRequiredField { table: String, key: Key, field: String },
    IncompleteKey { table: String, context: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DanglingForeignKey { table, key, field, target_table, target_field, value } => {
                write!(
                    f,
                    "{table} {key}: {field} = {value} does not resolve in {target_table}.{target_field}"
                )
            }
            Violation::DuplicatePrimaryKey { table, key } => {
                write!(f, "{table}: duplicate primary key {key}")
            }
            Violation::NullInRequiredField { table, key, field } => {
                write!(f, "{table} {key}: required field {field} is null")
            }
            Violation::IncompleteKey { table, context } => {
                write!(f, "{table}: incomplete primary key ({context})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OpenOptions {
    /// Open even if the corpus fails its integrity audit; the violations
    /// stay retrievable through [`CorpusStore::integrity_check`].
    pub tolerate_violations: bool,
}

/// Descriptive alphabet metadata carried by the manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphabetInfo {
    pub name: String,
    pub language: String,
}

impl Default for AlphabetInfo {
    fn default() -> Self {
        AlphabetInfo { name: "unnamed".to_owned(), language: String::new() }
    }
}

#[derive(Debug, Clone, Default)]
struct Table {
    rows: BTreeMap<Key, Record>,
}

/// An open corpus: schema plus in-memory table contents, optionally bound
/// to an on-disk directory.
#[derive(Debug, Clone)]
pub struct CorpusStore {
    root: Option<PathBuf>,
    schema: Schema,
    tables: BTreeMap<String, Table>,
    alphabet_info: AlphabetInfo,
    /// Structural defects discovered while reading files (duplicate keys,
    /// unkeyable rows). Cleared when the corpus is rewritten.
    load_violations: Vec<Violation>,
    dirty: bool,
}

impl CorpusStore {
    /// A fresh in-memory corpus over the default 27-table schema.
    pub fn empty() -> CorpusStore {
        let schema = default_schema();
        let tables = schema
            .tables()
            .map(|t| (t.name.clone(), Table::default()))
            .collect();
        CorpusStore {
            root: None,
            schema,
            tables,
            alphabet_info: AlphabetInfo::default(),
            load_violations: Vec::new(),
            dirty: true,
        }
    }

    /// Initialises a new corpus directory. The directory must be empty or
    /// absent.
    pub fn init(path: impl AsRef<Path>) -> Result<CorpusStore, StoreError> {
        let path = path.as_ref();
        if path.exists() && fs::read_dir(path)?.next().is_some() {
            return Err(StoreError::PathNotEmpty { path: path.to_owned() });
        }
        let mut store = CorpusStore::empty();
        store.save_to(path)?;
        Ok(store)
    }

    pub fn open(path: impl AsRef<Path>) -> Result<CorpusStore, StoreError> {
        CorpusStore::open_with(path, OpenOptions::default())
    }

    /// Opens a corpus directory, or initialises one if the directory is
    /// empty or absent. Reads the manifest and all table files, then runs
    /// the integrity audit; a corpus that fails it is refused unless
    /// `tolerate_violations` is set.
    pub fn open_with(path: impl AsRef<Path>, opts: OpenOptions) -> Result<CorpusStore, StoreError> {
        let path = path.as_ref();
        let manifest_path = path.join(MANIFEST_FILE);
        if !manifest_path.exists() {
            if !path.exists() || fs::read_dir(path)?.next().is_none() {
                return CorpusStore::init(path);
            }
            return Err(StoreError::MissingManifest { path: path.to_owned() });
        }

        let manifest_text = fs::read_to_string(&manifest_path)?;
        let alphabet_info = parse_manifest(&manifest_path, &manifest_text)?;

        let mut store = CorpusStore::empty();
        store.root = Some(path.to_owned());
        store.alphabet_info = alphabet_info;

        for ts in store.schema.clone().tables() {
            let file = path.join(format!("{}.jsonl", ts.name));
            if !file.exists() {
                return Err(StoreError::MissingTableFile { path: file });
            }
            let text = fs::read_to_string(&file)?;
            store.load_table(ts, &file, &text)?;
        }

        store.dirty = false;
        let violations = store.integrity_check();
        if !violations.is_empty() && !opts.tolerate_violations {
            return Err(StoreError::IntegrityViolations(violations));
        }
        Ok(store)
    }

    fn load_table(&mut self, ts: &TableSchema, file: &Path, text: &str) -> Result<(), StoreError> {
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |reason: String| StoreError::Parse {
                file: file.to_owned(),
                line: idx + 1,
                reason,
            };
            let json: serde_json::Value =
                serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
            let record = record_from_json(ts, &json).map_err(parse_err)?;
            match extract_key(ts, &record) {
                Some(key) => {
                    // Keep the first row under a duplicated key and report
                    // the file-level defect.
                    if self.table(&ts.name).rows.contains_key(&key) {
                        self.load_violations.push(Violation::DuplicatePrimaryKey {
                            table: ts.name.clone(),
                            key,
                        });
                    } else {
                        self.tables
                            .get_mut(&ts.name)
                            .expect("schema table")
                            .rows
                            .insert(key, record);
                    }
                }
                None => self.load_violations.push(Violation::IncompleteKey {
                    table: ts.name.clone(),
                    context: format!("line {}", idx + 1),
                }),
            }
        }
        Ok(())
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn alphabet_info(&self) -> &AlphabetInfo {
        &self.alphabet_info
    }

    pub fn set_alphabet_info(&mut self, info: AlphabetInfo) {
        self.alphabet_info = info;
        self.dirty = true;
    }

    fn table(&self, name: &str) -> &Table {
        self.tables
            .get(name)
            .unwrap_or_else(|| panic!("no table {name} in schema"))
    }

    /// Rows of a table in key order. Panics if the table is not in the
    /// schema; use [`Schema::table`] to validate user-supplied names.
    pub fn rows<'a>(&'a self, name: &str) -> impl Iterator<Item = (&'a Key, &'a Record)> {
        self.table(name).rows.iter()
    }

    pub fn get(&self, name: &str, key: &Key) -> Option<&Record> {
        self.table(name).rows.get(key)
    }

    pub fn contains(&self, name: &str, key: &Key) -> bool {
        self.table(name).rows.contains_key(key)
    }

    pub fn table_len(&self, name: &str) -> usize {
        self.table(name).rows.len()
    }

    /// The primary key a record would be stored under.
    pub fn record_key(&self, table: &str, record: &Record) -> Result<Key, StoreError> {
        let ts = self.table_schema(table)?;
        extract_key(ts, record).ok_or_else(|| StoreError::BadKey {
            table: table.to_owned(),
            reason: "null or missing key field".to_owned(),
        })
    }

    fn table_schema(&self, table: &str) -> Result<&TableSchema, StoreError> {
        self.schema
            .table(table)
            .ok_or_else(|| StoreError::UnknownTable { table: table.to_owned() })
    }

    /// Validates a record against the table schema and stores it.
    /// Every foreign key must resolve and the primary key must be fresh.
    pub fn insert(&mut self, table: &str, record: Record) -> Result<Key, StoreError> {
        let ts = self.table_schema(table)?;
        validate_record(ts, &record)?;
        let key = extract_key(ts, &record).ok_or_else(|| StoreError::BadKey {
            table: table.to_owned(),
            reason: "null key field".to_owned(),
        })?;
        if self.table(table).rows.contains_key(&key) {
            return Err(StoreError::DuplicateKey { table: table.to_owned(), key });
        }
        for fk in &ts.foreign_keys {
            let v = record.get(&fk.field).expect("validated field");
            if v.is_null() {
                continue;
            }
            let kv = v.as_key_value().expect("fk fields are integer or text");
            if !self.table(&fk.target_table).rows.contains_key(&Key(vec![kv.clone()])) {
                return Err(StoreError::DanglingFk {
                    table: table.to_owned(),
                    field: fk.field.clone(),
                    target_table: fk.target_table.clone(),
                    target_field: fk.target_field.clone(),
                    value: kv,
                });
            }
        }
        self.tables
            .get_mut(table)
            .expect("schema table")
            .rows
            .insert(key.clone(), record);
        self.dirty = true;
        Ok(key)
    }

    /// Deletes a record and, transitively along cascade edges, all its
    /// dependents. A restrict edge still holding a reference aborts the
    /// whole operation; nothing is deleted. Returns rows removed per table.
    pub fn delete_cascade(
        &mut self,
        table: &str,
        key: &Key,
    ) -> Result<BTreeMap<String, usize>, StoreError> {
        let ts = self.table_schema(table)?;
        let table = ts.name.clone();
        if !self.table(&table).rows.contains_key(key) {
            return Err(StoreError::NotFound { table, key: key.clone() });
        }

        // Closure along cascade edges.
        let mut doomed: BTreeMap<String, BTreeSet<Key>> = BTreeMap::new();
        doomed.entry(table.clone()).or_default().insert(key.clone());
        let mut work: VecDeque<(String, Key)> = VecDeque::new();
        work.push_back((table.clone(), key.clone()));
        while let Some((t, k)) = work.pop_front() {
            // Edges always target a single-field key, so the referenced
            // value is the lone key component.
            let target_value = &k.0[0];
            let edges: Vec<(String, String)> = self
                .schema
                .referencing_edges(&t)
                .filter(|(_, fk)| fk.on_delete == CascadePolicy::Cascade)
                .map(|(rt, fk)| (rt.to_owned(), fk.field.clone()))
                .collect();
            for (ref_table, ref_field) in edges {
                let mut found: Vec<Key> = Vec::new();
                for (rk, rec) in &self.table(&ref_table).rows {
                    if rec.get(&ref_field).and_then(Value::as_key_value).as_ref() == Some(target_value) {
                        found.push(rk.clone());
                    }
                }
                if !found.is_empty() {
                    let set = doomed.entry(ref_table.clone()).or_default();
                    for rk in found {
                        if set.insert(rk.clone()) {
                            work.push_back((ref_table.clone(), rk));
                        }
                    }
                }
            }
        }

        // Restrict edges abort if anything outside the closure still
        // references a row inside it.
        for (t, keys) in &doomed {
            let deleted_values: BTreeSet<&KeyValue> = keys.iter().map(|k| &k.0[0]).collect();
            for (ref_table, fk) in self.schema.referencing_edges(t) {
                if fk.on_delete != CascadePolicy::Restrict {
                    continue;
                }
                for (rk, rec) in &self.table(ref_table).rows {
                    if doomed.get(ref_table).is_some_and(|s| s.contains(rk)) {
                        continue;
                    }
                    if let Some(kv) = rec.get(&fk.field).and_then(Value::as_key_value) {
                        if deleted_values.contains(&kv) {
                            return Err(StoreError::Restricted {
                                table: t.clone(),
                                key: Key(vec![kv]),
                                referencing_table: ref_table.to_owned(),
                                referencing_field: fk.field.clone(),
                                blocking_key: rk.clone(),
                            });
                        }
                    }
                }
            }
        }

        let mut counts = BTreeMap::new();
        for (t, keys) in doomed {
            let tbl = self.tables.get_mut(&t).expect("schema table");
            for k in &keys {
                tbl.rows.remove(k);
            }
            counts.insert(t, keys.len());
        }
        self.dirty = true;
        Ok(counts)
    }

    /// Replaces a primary key and rewrites every foreign-key reference to
    /// it across all tables. Returns the number of rewritten references.
    pub fn update_key_cascade(
        &mut self,
        table: &str,
        old_key: &Key,
        new_key: Key,
    ) -> Result<usize, StoreError> {
        let ts = self.table_schema(table)?;
        let table = ts.name.clone();
        let key_fields = ts.key_fields.clone();
        if new_key.0.len() != ts.key_fields.len() {
            return Err(StoreError::BadKey {
                table,
                reason: format!(
                    "key has {} component(s), expected {}",
                    new_key.0.len(),
                    ts.key_fields.len()
                ),
            });
        }
        for (part, field_name) in new_key.0.iter().zip(&ts.key_fields) {
            let ty = ts.field(field_name).expect("key field").ty;
            if !part.to_value().conforms_to(ty) {
                return Err(StoreError::TypeMismatch {
                    table,
                    field: field_name.clone(),
                    expected: ty.name().to_owned(),
                    found: part.to_value().to_string(),
                });
            }
        }
        if !self.table(&table).rows.contains_key(old_key) {
            return Err(StoreError::NotFound { table, key: old_key.clone() });
        }
        if self.table(&table).rows.contains_key(&new_key) {
            return Err(StoreError::KeyCollision { table, key: new_key });
        }

        // Per-field old -> new mapping for the changed key components.
        let changed: BTreeMap<&str, (&KeyValue, &KeyValue)> = ts
            .key_fields
            .iter()
            .zip(old_key.0.iter().zip(new_key.0.iter()))
            .filter(|(_, (o, n))| o != n)
            .map(|(f, pair)| (f.as_str(), pair))
            .collect();

        // Plan every referencing-row rewrite before touching anything.
        struct Rewrite {
            table: String,
            old_row_key: Key,
            new_row_key: Key,
            record: Record,
            references: usize,
        }
        let mut plan: Vec<Rewrite> = Vec::new();
        let ref_tables: BTreeSet<String> = self
            .schema
            .referencing_edges(&table)
            .filter(|(_, fk)| changed.contains_key(fk.target_field.as_str()))
            .map(|(rt, _)| rt.to_owned())
            .collect();
        for ref_table in &ref_tables {
            let rts = self.schema.table(ref_table).expect("schema table").clone();
            let edges: Vec<&ForeignKey> = rts
                .foreign_keys
                .iter()
                .filter(|fk| fk.target_table == table && changed.contains_key(fk.target_field.as_str()))
                .collect();
            for (rk, rec) in &self.table(ref_table).rows {
                let mut new_rec = None;
                let mut hits = 0;
                for fk in &edges {
                    let (old_v, new_v) = changed[fk.target_field.as_str()];
                    if rec.get(&fk.field).and_then(Value::as_key_value).as_ref() == Some(old_v) {
                        new_rec
                            .get_or_insert_with(|| rec.clone())
                            .insert(fk.field.clone(), new_v.to_value());
                        hits += 1;
                    }
                }
                if let Some(new_rec) = new_rec {
                    let new_row_key = extract_key(&rts, &new_rec).expect("keyed record stays keyed");
                    plan.push(Rewrite {
                        table: ref_table.clone(),
                        old_row_key: rk.clone(),
                        new_row_key,
                        record: new_rec,
                        references: hits,
                    });
                }
            }
        }

        // Collision check for rows whose own key changes.
        for ref_table in &ref_tables {
            let removed: BTreeSet<&Key> = plan
                .iter()
                .filter(|r| &r.table == ref_table && r.old_row_key != r.new_row_key)
                .map(|r| &r.old_row_key)
                .collect();
            if removed.is_empty() {
                continue;
            }
            // Chained key rewrites (a re-keyed table that is itself a
            // foreign-key target) are not supported; no such chain exists
            // in the default schema.
            if self.schema.referencing_edges(ref_table).next().is_some() {
                return Err(StoreError::BadKey {
                    table: ref_table.clone(),
                    reason: "cascading a key update through chained references is not supported"
                        .to_owned(),
                });
            }
            let mut added: BTreeSet<&Key> = BTreeSet::new();
            for r in plan.iter().filter(|r| &r.table == ref_table) {
                if !added.insert(&r.new_row_key) {
                    return Err(StoreError::KeyCollision {
                        table: ref_table.clone(),
                        key: r.new_row_key.clone(),
                    });
                }
                if !removed.contains(&r.new_row_key)
                    && self.table(ref_table).rows.contains_key(&r.new_row_key)
                {
                    return Err(StoreError::KeyCollision {
                        table: ref_table.clone(),
                        key: r.new_row_key.clone(),
                    });
                }
            }
        }

        // Apply: referencing rows first, then the renamed row itself.
        let mut rewritten = 0;
        for r in &plan {
            let tbl = self.tables.get_mut(&r.table).expect("schema table");
            tbl.rows.remove(&r.old_row_key);
            rewritten += r.references;
        }
        for r in plan {
            let tbl = self.tables.get_mut(&r.table).expect("schema table");
            tbl.rows.insert(r.new_row_key, r.record);
        }
        let tbl = self.tables.get_mut(&table).expect("schema table");
        let mut rec = tbl.rows.remove(old_key).expect("checked above");
        for (field_name, part) in key_fields.iter().zip(new_key.0.iter()) {
            rec.insert(field_name.clone(), part.to_value());
        }
        tbl.rows.insert(new_key, rec);
        self.dirty = true;
        Ok(rewritten)
    }

    /// Audits the whole corpus: every foreign key must resolve, every
    /// primary key must be unique and complete, required fields must be
    /// non-null. Returns every violation found; empty means sound.
    pub fn integrity_check(&self) -> Vec<Violation> {
        let mut out = self.load_violations.clone();
        for ts in self.schema.tables() {
            let tbl = self.table(&ts.name);
            for (key, rec) in &tbl.rows {
                for f in &ts.fields {
                    if !f.nullable && rec.get(&f.name).is_none_or(Value::is_null) {
                        out.push(Violation::NullInRequiredField {
                            table: ts.name.clone(),
                            key: key.clone(),
                            field: f.name.clone(),
                        });
                    }
                }
                for fk in &ts.foreign_keys {
                    let Some(v) = rec.get(&fk.field) else { continue };
                    if v.is_null() {
                        continue;
                    }
                    let Some(kv) = v.as_key_value() else { continue };
                    if !self
                        .table(&fk.target_table)
                        .rows
                        .contains_key(&Key(vec![kv.clone()]))
                    {
                        out.push(Violation::DanglingForeignKey {
                            table: ts.name.clone(),
                            key: key.clone(),
                            field: fk.field.clone(),
                            target_table: fk.target_table.clone(),
                            target_field: fk.target_field.clone(),
                            value: kv,
                        });
                    }
                }
            }
        }
        out
    }

    /// Binds the corpus to a directory and saves it there.
    pub fn save_to(&mut self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        self.root = Some(path.as_ref().to_owned());
        self.save()
    }

    /// Writes the manifest and all table files. Every file is written to
    /// a temporary name first and renamed into place only after all
    /// writes succeeded, so an interrupted save leaves the previous state
    /// loadable.
    pub fn save(&mut self) -> Result<(), StoreError> {
        let staged = self.save_prepare()?;
        self.save_commit(staged)
    }

    fn save_prepare(&self) -> Result<Vec<(PathBuf, PathBuf)>, StoreError> {
        let root = self.root.clone().ok_or(StoreError::NoRootPath)?;
        fs::create_dir_all(&root)?;
        let mut staged = Vec::new();

        let manifest = self.render_manifest();
        let final_path = root.join(MANIFEST_FILE);
        let tmp_path = root.join(format!("{MANIFEST_FILE}.tmp"));
        write_file(&tmp_path, &manifest)?;
        staged.push((tmp_path, final_path));

        for ts in self.schema.tables() {
            let mut text = String::new();
            for rec in self.table(&ts.name).rows.values() {
                text.push_str(&record_to_json(ts, rec));
                text.push('\n');
            }
            let final_path = root.join(format!("{}.jsonl", ts.name));
            let tmp_path = root.join(format!("{}.jsonl.tmp", ts.name));
            write_file(&tmp_path, &text)?;
            staged.push((tmp_path, final_path));
        }
        Ok(staged)
    }

    fn save_commit(&mut self, staged: Vec<(PathBuf, PathBuf)>) -> Result<(), StoreError> {
        for (tmp, final_path) in staged {
            fs::rename(tmp, final_path)?;
        }
        self.load_violations.clear();
        self.dirty = false;
        Ok(())
    }

    fn render_manifest(&self) -> String {
        let mut aliases = serde_json::Map::new();
        for ts in self.schema.tables() {
            if ts.field_aliases.is_empty() {
                continue;
            }
            let mut per_table = serde_json::Map::new();
            for (stored, original) in &ts.field_aliases {
                per_table.insert(stored.clone(), serde_json::Value::from(original.as_str()));
            }
            aliases.insert(ts.name.clone(), serde_json::Value::Object(per_table));
        }
        let manifest = serde_json::json!({
            "format": FORMAT_NAME,
            "schema_version": SCHEMA_VERSION,
            "tables": self.schema.table_names(),
            "field_aliases": aliases,
            "alphabet": {
                "file": format!("{}.jsonl", tables::CLASS),
                "name": self.alphabet_info.name,
                "language": self.alphabet_info.language,
            },
        });
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        text
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), StoreError> {
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    f.sync_all()?;
    Ok(())
}

fn parse_manifest(path: &Path, text: &str) -> Result<AlphabetInfo, StoreError> {
    let bad = |reason: &str| StoreError::BadFormat {
        path: path.to_owned(),
        reason: reason.to_owned(),
    };
    let json: serde_json::Value =
        serde_json::from_str(text).map_err(|e| bad(&format!("manifest is not JSON: {e}")))?;
    let format = json
        .get("format")
        .and_then(|v| v.as_str())
        .ok_or_else(|| bad("missing format name"))?;
    if format != FORMAT_NAME {
        return Err(bad(&format!("format is {format:?}, expected {FORMAT_NAME:?}")));
    }
    let version = json
        .get("schema_version")
        .and_then(|v| v.as_i64())
        .ok_or_else(|| bad("missing schema_version"))?;
    if version != SCHEMA_VERSION {
        return Err(StoreError::SchemaVersionMismatch { found: version, expected: SCHEMA_VERSION });
    }
    let listed: Vec<&str> = json
        .get("tables")
        .and_then(|v| v.as_array())
        .ok_or_else(|| bad("missing table list"))?
        .iter()
        .filter_map(|v| v.as_str())
        .collect();
    let mut sorted = listed.clone();
    sorted.sort_unstable();
    if sorted != tables::ALL {
        return Err(bad("table list does not match the corpus schema"));
    }
    let alphabet = json.get("alphabet");
    let get = |k: &str| {
        alphabet
            .and_then(|a| a.get(k))
            .and_then(|v| v.as_str())
            .unwrap_or_default()
            .to_owned()
    };
    Ok(AlphabetInfo { name: get("name"), language: get("language") })
}

/// Schema-directed parse of one JSON object into a record.
pub fn parse_record(ts: &TableSchema, json: &serde_json::Value) -> Result<Record, String> {
    record_from_json(ts, json)
}

/// Renders a record as a single JSON line in schema field order.
pub fn render_record(ts: &TableSchema, rec: &Record) -> String {
    record_to_json(ts, rec)
}

fn record_from_json(ts: &TableSchema, json: &serde_json::Value) -> Result<Record, String> {
    let obj = json.as_object().ok_or("record is not a JSON object")?;
    for k in obj.keys() {
        if ts.field(k).is_none() {
            return Err(format!("unknown field {k}"));
        }
    }
    let mut rec = Record::new();
    for f in &ts.fields {
        let v = obj.get(&f.name).ok_or_else(|| format!("missing field {}", f.name))?;
        let value = Value::from_json(f.ty, v).map_err(|e| format!("field {}: {e}", f.name))?;
        rec.insert(f.name.clone(), value);
    }
    Ok(rec)
}

fn record_to_json(ts: &TableSchema, rec: &Record) -> String {
    let mut obj = serde_json::Map::new();
    for f in &ts.fields {
        let v = rec.get(&f.name).unwrap_or(&Value::Null);
        obj.insert(f.name.clone(), v.to_json());
    }
    serde_json::Value::Object(obj).to_string()
}

fn validate_record(ts: &TableSchema, rec: &Record) -> Result<(), StoreError> {
    for k in rec.keys() {
        if ts.field(k).is_none() {
            return Err(StoreError::UnknownField { table: ts.name.clone(), field: k.clone() });
        }
    }
    for f in &ts.fields {
        let v = rec.get(&f.name).ok_or_else(|| StoreError::MissingField {
            table: ts.name.clone(),
            field: f.name.clone(),
        })?;
        if v.is_null() {
            if !f.nullable {
                return Err(StoreError::TypeMismatch {
                    table: ts.name.clone(),
                    field: f.name.clone(),
                    expected: f.ty.name().to_owned(),
                    found: "null".to_owned(),
                });
            }
        } else if !v.conforms_to(f.ty) {
            return Err(StoreError::TypeMismatch {
                table: ts.name.clone(),
                field: f.name.clone(),
                expected: f.ty.name().to_owned(),
                found: v.to_string(),
            });
        }
    }
    Ok(())
}

fn extract_key(ts: &TableSchema, rec: &Record) -> Option<Key> {
    let mut parts = Vec::with_capacity(ts.key_fields.len());
    for k in &ts.key_fields {
        parts.push(rec.get(k)?.as_key_value()?);
    }
    Some(Key(parts))
}
