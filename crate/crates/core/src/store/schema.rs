//! Table schemas for the corpus database.
//!
//! The default schema holds the 27 entity tables. Four of them carry the
//! corpus proper (SPEAKER, SPEECH_UNIT, SPEECH_SIGNAL, SEGMENTATION plus
//! the CLASS sound-unit alphabet); the rest are reference books.

use super::value::FieldType;

/// What happens to dependent rows when a referenced key is deleted.
///
/// The core chain (speaker/unit -> signal -> segmentation) cascades;
/// reference-book edges are restricted so that deleting a vocabulary entry
/// can never silently destroy signals. The policy is carried per edge, so
/// a custom schema may choose differently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadePolicy {
    Cascade,
    Restrict,
}

#[derive(Debug, Clone)]
pub struct ForeignKey {
    pub field: String,
    pub target_table: String,
    pub target_field: String,
    pub on_delete: CascadePolicy,
}

#[derive(Debug, Clone)]
pub struct FieldDef {
    pub name: String,
    pub ty: FieldType,
    pub nullable: bool,
}

#[derive(Debug, Clone)]
pub struct TableSchema {
    pub name: String,
    pub fields: Vec<FieldDef>,
    /// Names of the primary-key fields, in key order. Key fields must be
    /// integer or text and non-nullable.
    pub key_fields: Vec<String>,
    pub foreign_keys: Vec<ForeignKey>,
    /// Fields whose canonical name differs from the stored one (stored
    /// name, original name). Recorded in the manifest for fidelity.
    pub field_aliases: Vec<(String, String)>,
}

impl TableSchema {
    pub fn field(&self, name: &str) -> Option<&FieldDef> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn is_key_field(&self, name: &str) -> bool {
        self.key_fields.iter().any(|k| k == name)
    }
}

/// The full set of table schemas, in table-name order.
#[derive(Debug, Clone)]
pub struct Schema {
    tables: Vec<TableSchema>,
}

impl Schema {
    /// Builds a schema from table definitions, checking internal
    /// consistency: keys exist, are non-nullable integer/text fields, and
    /// every foreign key targets the single-field primary key of an
    /// existing table.
    pub fn new(mut tables: Vec<TableSchema>) -> Schema {
        tables.sort_by(|a, b| a.name.cmp(&b.name));
        let schema = Schema { tables };
        schema.check();
        schema
    }

    fn check(&self) {
        for t in &self.tables {
            assert!(!t.key_fields.is_empty(), "{}: empty key", t.name);
            for k in &t.key_fields {
                let f = t.field(k).unwrap_or_else(|| panic!("{}: key field {k} missing", t.name));
                assert!(!f.nullable, "{}: key field {k} nullable", t.name);
                assert!(
                    matches!(f.ty, FieldType::Integer | FieldType::Text),
                    "{}: key field {k} must be integer or text",
                    t.name
                );
            }
            for fk in &t.foreign_keys {
                assert!(t.field(&fk.field).is_some(), "{}: fk field {} missing", t.name, fk.field);
                let target = self
                    .table(&fk.target_table)
                    .unwrap_or_else(|| panic!("{}: fk target {} missing", t.name, fk.target_table));
                assert_eq!(
                    target.key_fields,
                    vec![fk.target_field.clone()],
                    "{}: fk must target the whole single-field key of {}",
                    t.name,
                    fk.target_table
                );
            }
        }
    }

    pub fn table(&self, name: &str) -> Option<&TableSchema> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn tables(&self) -> impl Iterator<Item = &TableSchema> {
        self.tables.iter()
    }

    pub fn table_names(&self) -> Vec<&str> {
        self.tables.iter().map(|t| t.name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    /// Edges referencing `table`, as (referencing table name, foreign key).
    pub fn referencing_edges<'a>(&'a self, table: &'a str) -> impl Iterator<Item = (&'a str, &'a ForeignKey)> {
        self.tables.iter().flat_map(move |t| {
            t.foreign_keys
                .iter()
                .filter(move |fk| fk.target_table == table)
                .map(move |fk| (t.name.as_str(), fk))
        })
    }
}

/// Canonical table names.
pub mod tables {
    pub const ACOUSTIC_ENVIRONMENT: &str = "ACOUSTIC_ENVIRONMENT";
    pub const BOOK_DEFECTS: &str = "BOOK_DEFECTS";
    pub const BOOK_DIALECTS: &str = "BOOK_DIALECTS";
    pub const BOOK_EMOTIONS: &str = "BOOK_EMOTIONS";
    pub const BOOK_LABIALIZATION: &str = "BOOK_LABIALIZATION";
    pub const BOOK_LOCATION: &str = "BOOK_LOCATION";
    pub const BOOK_RISE: &str = "BOOK_RISE";
    pub const BOOK_ROW: &str = "BOOK_ROW";
    pub const BOOK_SEX: &str = "BOOK_SEX";
    pub const BOOK_SOFT: &str = "BOOK_SOFT";
    pub const BOOK_SPEECH_TEMPS: &str = "BOOK_SPEECH_TEMPS";
    pub const BOOK_SPEECH_TYPES: &str = "BOOK_SPEECH_TYPES";
    pub const BOOK_STRESSED: &str = "BOOK_STRESSED";
    pub const BOOK_UNIT_TYPES: &str = "BOOK_UNIT_TYPES";
    pub const BOOK_VOICED: &str = "BOOK_VOICED";
    pub const BOOK_VOICE_TYPES: &str = "BOOK_VOICE_TYPES";
    pub const BOOK_WAY_OF_ORIGIN: &str = "BOOK_WAY_OF_ORIGIN";
    pub const CLASS: &str = "CLASS";
    pub const COMMUNICATION_CHANNEL: &str = "COMMUNICATION_CHANNEL";
    pub const FILE_FORMAT: &str = "FILE_FORMAT";
    pub const NOISE: &str = "NOISE";
    pub const RECORDING_DEVICE: &str = "RECORDING_DEVICE";
    pub const SEGMENTATION: &str = "SEGMENTATION";
    pub const SICKNESS: &str = "SICKNESS";
    pub const SPEAKER: &str = "SPEAKER";
    pub const SPEECH_SIGNAL: &str = "SPEECH_SIGNAL";
    pub const SPEECH_UNIT: &str = "SPEECH_UNIT";

    /// All 27 table names, sorted.
    pub const ALL: [&str; 27] = [
        ACOUSTIC_ENVIRONMENT,
        BOOK_DEFECTS,
        BOOK_DIALECTS,
        BOOK_EMOTIONS,
        BOOK_LABIALIZATION,
        BOOK_LOCATION,
        BOOK_RISE,
        BOOK_ROW,
        BOOK_SEX,
        BOOK_SOFT,
        BOOK_SPEECH_TEMPS,
        BOOK_SPEECH_TYPES,
        BOOK_STRESSED,
        BOOK_UNIT_TYPES,
        BOOK_VOICED,
        BOOK_VOICE_TYPES,
        BOOK_WAY_OF_ORIGIN,
        CLASS,
        COMMUNICATION_CHANNEL,
        FILE_FORMAT,
        NOISE,
        RECORDING_DEVICE,
        SEGMENTATION,
        SICKNESS,
        SPEAKER,
        SPEECH_SIGNAL,
        SPEECH_UNIT,
    ];
}

fn field(name: &str, ty: FieldType) -> FieldDef {
    FieldDef { name: name.to_owned(), ty, nullable: false }
}

fn nullable(name: &str, ty: FieldType) -> FieldDef {
    FieldDef { name: name.to_owned(), ty, nullable: true }
}

fn fk(field: &str, target_table: &str, target_field: &str, on_delete: CascadePolicy) -> ForeignKey {
    ForeignKey {
        field: field.to_owned(),
        target_table: target_table.to_owned(),
        target_field: target_field.to_owned(),
        on_delete,
    }
}

/// A code+title reference book.
fn book(name: &str, id_field: &str) -> TableSchema {
    TableSchema {
        name: name.to_owned(),
        fields: vec![field(id_field, FieldType::Integer), field("TITLE", FieldType::Text)],
        key_fields: vec![id_field.to_owned()],
        foreign_keys: vec![],
        field_aliases: vec![],
    }
}

/// The default 27-table corpus schema.
#[allow(clippy::vec_init_then_push)] // one push per table reads best here
pub fn default_schema() -> Schema {
    use tables::*;
    use CascadePolicy::{Cascade, Restrict};
    use FieldType::*;

    let mut t = Vec::new();

    t.push(TableSchema {
        name: ACOUSTIC_ENVIRONMENT.to_owned(),
        fields: vec![
            field("ENVIRONMENT_ID", Integer),
            field("NOISE_LEVEL_DB", Real),
            field("TITLE", Text),
        ],
        key_fields: vec!["ENVIRONMENT_ID".to_owned()],
        foreign_keys: vec![],
        field_aliases: vec![("NOISE_LEVEL_DB".to_owned(), "NOISE_LEVEL(DB)".to_owned())],
    });

    t.push(book(BOOK_DEFECTS, "ID_DEFECT"));

    t.push(TableSchema {
        name: BOOK_DIALECTS.to_owned(),
        fields: vec![
            field("ID_DIALECT", Integer),
            field("TITLE", Text),
            field("LANGUAGE", Text),
        ],
        key_fields: vec!["ID_DIALECT".to_owned()],
        foreign_keys: vec![],
        field_aliases: vec![],
    });

    t.push(book(BOOK_EMOTIONS, "ID_EMOTION"));
    t.push(book(BOOK_LABIALIZATION, "ID"));
    t.push(book(BOOK_LOCATION, "ID"));
    t.push(book(BOOK_RISE, "ID"));
    t.push(book(BOOK_ROW, "ID"));
    t.push(book(BOOK_SEX, "ID"));
    t.push(book(BOOK_SOFT, "SOFT_ID"));

    t.push(TableSchema {
        name: BOOK_SPEECH_TEMPS.to_owned(),
        fields: vec![
            field("ID", Integer),
            field("SPEED", Text),
            nullable("SOUNDS_PER_SECOND", Integer),
        ],
        key_fields: vec!["ID".to_owned()],
        foreign_keys: vec![],
        field_aliases: vec![],
    });

    t.push(book(BOOK_SPEECH_TYPES, "ID"));
    t.push(book(BOOK_STRESSED, "ID_STRESSED"));
    t.push(book(BOOK_UNIT_TYPES, "TYPE_ID"));
    t.push(book(BOOK_VOICED, "VOICED_ID"));
    t.push(book(BOOK_VOICE_TYPES, "ID"));
    t.push(book(BOOK_WAY_OF_ORIGIN, "ID"));

    t.push(TableSchema {
        name: CLASS.to_owned(),
        fields: vec![
            field("SYMBOL", Text),
            field("STRESSED", Integer),
            field("VOCALIZED", Boolean),
            nullable("SOFT", Integer),
            nullable("VOICED", Integer),
            nullable("LOCATION", Integer),
            nullable("WAY_OF_ORIGIN", Integer),
            nullable("LABIALIZATION", Integer),
            nullable("RISE", Integer),
            nullable("ROW", Integer),
        ],
        key_fields: vec!["SYMBOL".to_owned()],
        foreign_keys: vec![
            fk("STRESSED", BOOK_STRESSED, "ID_STRESSED", Restrict),
            fk("SOFT", BOOK_SOFT, "SOFT_ID", Restrict),
            fk("VOICED", BOOK_VOICED, "VOICED_ID", Restrict),
            fk("LOCATION", BOOK_LOCATION, "ID", Restrict),
            fk("WAY_OF_ORIGIN", BOOK_WAY_OF_ORIGIN, "ID", Restrict),
            fk("LABIALIZATION", BOOK_LABIALIZATION, "ID", Restrict),
            fk("RISE", BOOK_RISE, "ID", Restrict),
            fk("ROW", BOOK_ROW, "ID", Restrict),
        ],
        field_aliases: vec![],
    });

    t.push(book(COMMUNICATION_CHANNEL, "ID"));

    t.push(TableSchema {
        name: FILE_FORMAT.to_owned(),
        fields: vec![
            field("ID", Integer),
            field("DISCRETIZATION_FREQUENCY", Real),
            field("BITRATE", Integer),
            field("FILE_TYPE", Text),
            field("NUMBER_OF_CHANNELS", Integer),
        ],
        key_fields: vec!["ID".to_owned()],
        foreign_keys: vec![],
        field_aliases: vec![],
    });

    t.push(TableSchema {
        name: NOISE.to_owned(),
        fields: vec![
            field("ID_NOISE", Integer),
            field("NOISE_TYPE", Text),
            nullable("SNR_DB", Real),
        ],
        key_fields: vec!["ID_NOISE".to_owned()],
        foreign_keys: vec![],
        field_aliases: vec![("SNR_DB".to_owned(), "SIGNAL/NOISE_RATIO(DB)".to_owned())],
    });

    t.push(TableSchema {
        name: RECORDING_DEVICE.to_owned(),
        fields: vec![
            field("DEVICE_ID", Integer),
            field("TYPE", Text),
            field("BANDWIDTH", Real),
        ],
        key_fields: vec!["DEVICE_ID".to_owned()],
        foreign_keys: vec![],
        field_aliases: vec![],
    });

    t.push(TableSchema {
        name: SEGMENTATION.to_owned(),
        fields: vec![
            field("POSITION", Integer),
            field("FILENAME", Text),
            field("START_AUDIO", Real),
            field("TYPE_ID", Text),
            field("SOURCE", Text),
            nullable("EXPERT_COUNT", Integer),
        ],
        key_fields: vec!["POSITION".to_owned(), "FILENAME".to_owned(), "SOURCE".to_owned()],
        foreign_keys: vec![
            fk("FILENAME", SPEECH_SIGNAL, "FILE_NAME", Cascade),
            fk("TYPE_ID", CLASS, "SYMBOL", Restrict),
        ],
        field_aliases: vec![],
    });

    t.push(book(SICKNESS, "ID_SICKNESS"));

    t.push(TableSchema {
        name: SPEAKER.to_owned(),
        fields: vec![
            field("ID", Integer),
            field("SEX", Integer),
            field("NAME", Text),
            field("SURNAME", Text),
            field("FAMILY_NAME", Text),
            field("BIRTH_DATE", Date),
        ],
        key_fields: vec!["ID".to_owned()],
        foreign_keys: vec![fk("SEX", BOOK_SEX, "ID", Restrict)],
        field_aliases: vec![],
    });

    t.push(TableSchema {
        name: SPEECH_SIGNAL.to_owned(),
        fields: vec![
            field("FILE_NAME", Text),
            field("SPEECH_UNIT_ID", Integer),
            field("LENGTH", Duration),
            field("RECORD_DATE", Date),
            field("FILE_FORMAT", Integer),
            field("SYNTHETIC_NOISE_TYPE", Integer),
            field("RECORDING_DEVICE", Integer),
            field("DIALECT_ID", Integer),
            field("ACOUSTIC_ENVIRONMENT", Integer),
            field("SPEECH_TYPE_ID", Integer),
            field("VOICE_TYPE_ID", Integer),
            field("SPEECH_TEMP_ID", Integer),
            nullable("CHANNEL", Integer),
            field("SPEECH_SICKNESS", Integer),
            field("ACIENT", Integer),
            field("SPEECH_DEFECT", Integer),
            field("EMOTIONAL_STATE", Integer),
            field("SPEAKER_ID", Integer),
        ],
        key_fields: vec!["FILE_NAME".to_owned()],
        foreign_keys: vec![
            fk("SPEECH_UNIT_ID", SPEECH_UNIT, "ID", Cascade),
            fk("FILE_FORMAT", FILE_FORMAT, "ID", Restrict),
            fk("SYNTHETIC_NOISE_TYPE", NOISE, "ID_NOISE", Restrict),
            fk("RECORDING_DEVICE", RECORDING_DEVICE, "DEVICE_ID", Restrict),
            fk("DIALECT_ID", BOOK_DIALECTS, "ID_DIALECT", Restrict),
            fk("ACOUSTIC_ENVIRONMENT", ACOUSTIC_ENVIRONMENT, "ENVIRONMENT_ID", Restrict),
            fk("SPEECH_TYPE_ID", BOOK_SPEECH_TYPES, "ID", Restrict),
            fk("VOICE_TYPE_ID", BOOK_VOICE_TYPES, "ID", Restrict),
            fk("SPEECH_TEMP_ID", BOOK_SPEECH_TEMPS, "ID", Restrict),
            fk("CHANNEL", COMMUNICATION_CHANNEL, "ID", Restrict),
            fk("SPEECH_SICKNESS", SICKNESS, "ID_SICKNESS", Restrict),
            fk("SPEECH_DEFECT", BOOK_DEFECTS, "ID_DEFECT", Restrict),
            fk("EMOTIONAL_STATE", BOOK_EMOTIONS, "ID_EMOTION", Restrict),
            fk("SPEAKER_ID", SPEAKER, "ID", Cascade),
        ],
        field_aliases: vec![],
    });

    t.push(TableSchema {
        name: SPEECH_UNIT.to_owned(),
        fields: vec![
            field("ID", Integer),
            field("SPELLING_RECORD", Text),
            field("TRANSCRIPTION", Text),
            field("UNIT_TYPE", Integer),
        ],
        key_fields: vec!["ID".to_owned()],
        foreign_keys: vec![fk("UNIT_TYPE", BOOK_UNIT_TYPES, "TYPE_ID", Restrict)],
        field_aliases: vec![],
    });

    Schema::new(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schema_has_27_tables() {
        let schema = default_schema();
        assert_eq!(schema.len(), 27);
        assert_eq!(schema.table_names(), tables::ALL.to_vec());
    }

    #[test]
    fn core_chain_cascades_and_books_restrict() {
        let schema = default_schema();
        let signal = schema.table(tables::SPEECH_SIGNAL).unwrap();
        let by_field = |f: &str| {
            signal
                .foreign_keys
                .iter()
                .find(|fk| fk.field == f)
                .map(|fk| fk.on_delete)
                .unwrap()
        };
        assert_eq!(by_field("SPEAKER_ID"), CascadePolicy::Cascade);
        assert_eq!(by_field("SPEECH_UNIT_ID"), CascadePolicy::Cascade);
        assert_eq!(by_field("DIALECT_ID"), CascadePolicy::Restrict);
        assert_eq!(by_field("SPEECH_SICKNESS"), CascadePolicy::Restrict);

        let seg = schema.table(tables::SEGMENTATION).unwrap();
        let file_edge = seg.foreign_keys.iter().find(|fk| fk.field == "FILENAME").unwrap();
        assert_eq!(file_edge.on_delete, CascadePolicy::Cascade);
        let class_edge = seg.foreign_keys.iter().find(|fk| fk.field == "TYPE_ID").unwrap();
        assert_eq!(class_edge.on_delete, CascadePolicy::Restrict);
    }

    #[test]
    fn segmentation_key_is_composite() {
        let schema = default_schema();
        let seg = schema.table(tables::SEGMENTATION).unwrap();
        assert_eq!(seg.key_fields, vec!["POSITION", "FILENAME", "SOURCE"]);
    }
}
