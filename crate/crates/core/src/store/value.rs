//! Field values, primary-key values and schema-directed JSON conversion.

use chrono::NaiveDate;

use super::StoreError;

/// Declared type of a table field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldType {
    Integer,
    Real,
    Text,
    Date,
    /// Non-negative seconds, stored as a decimal number.
    Duration,
    Boolean,
}

impl FieldType {
    pub fn name(self) -> &'static str {
        match self {
            FieldType::Integer => "integer",
            FieldType::Real => "real",
            FieldType::Text => "text",
            FieldType::Date => "date",
            FieldType::Duration => "duration",
            FieldType::Boolean => "boolean",
        }
    }
}

/// A single field value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Integer(i64),
    Real(f64),
    Text(String),
    Date(NaiveDate),
    Duration(f64),
    Boolean(bool),
    Null,
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// The value as a key component. Only integer and text fields may be
    /// part of a primary key.
    pub fn as_key_value(&self) -> Option<KeyValue> {
        match self {
            Value::Integer(n) => Some(KeyValue::Integer(*n)),
            Value::Text(s) => Some(KeyValue::Text(s.clone())),
            _ => None,
        }
    }

    /// Schema-directed conversion from parsed JSON.
    pub fn from_json(ty: FieldType, json: &serde_json::Value) -> Result<Value, String> {
        if json.is_null() {
            return Ok(Value::Null);
        }
        match ty {
            FieldType::Integer => json
                .as_i64()
                .map(Value::Integer)
                .ok_or_else(|| format!("expected integer, found {json}")),
            FieldType::Real => json
                .as_f64()
                .map(Value::Real)
                .ok_or_else(|| format!("expected number, found {json}")),
            FieldType::Text => json
                .as_str()
                .map(|s| Value::Text(s.to_owned()))
                .ok_or_else(|| format!("expected string, found {json}")),
            FieldType::Date => {
                let s = json
                    .as_str()
                    .ok_or_else(|| format!("expected date string, found {json}"))?;
                NaiveDate::parse_from_str(s, "%Y-%m-%d")
                    .map(Value::Date)
                    .map_err(|e| format!("bad date {s:?}: {e}"))
            }
            FieldType::Duration => {
                let n = json
                    .as_f64()
                    .ok_or_else(|| format!("expected duration seconds, found {json}"))?;
                if n < 0.0 {
                    return Err(format!("negative duration {n}"));
                }
                Ok(Value::Duration(n))
            }
            FieldType::Boolean => json
                .as_bool()
                .map(Value::Boolean)
                .ok_or_else(|| format!("expected boolean, found {json}")),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Integer(n) => serde_json::Value::from(*n),
            Value::Real(n) | Value::Duration(n) => serde_json::Value::from(*n),
            Value::Text(s) => serde_json::Value::from(s.as_str()),
            Value::Date(d) => serde_json::Value::from(d.format("%Y-%m-%d").to_string()),
            Value::Boolean(b) => serde_json::Value::from(*b),
            Value::Null => serde_json::Value::Null,
        }
    }

    /// Whether the value inhabits the declared field type.
    pub fn conforms_to(&self, ty: FieldType) -> bool {
        matches!(
            (self, ty),
            (Value::Integer(_), FieldType::Integer)
                | (Value::Real(_), FieldType::Real)
                | (Value::Text(_), FieldType::Text)
                | (Value::Date(_), FieldType::Date)
                | (Value::Duration(_), FieldType::Duration)
                | (Value::Boolean(_), FieldType::Boolean)
        )
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Integer(n) => write!(f, "{n}"),
            Value::Real(n) | Value::Duration(n) => write!(f, "{n}"),
            Value::Text(s) => write!(f, "{s}"),
            Value::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
            Value::Boolean(b) => write!(f, "{b}"),
            Value::Null => write!(f, "null"),
        }
    }
}

/// One component of a primary key. Keys are restricted to integer and text
/// fields so that they are totally ordered and hashable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KeyValue {
    Integer(i64),
    Text(String),
}

impl KeyValue {
    pub fn to_value(&self) -> Value {
        match self {
            KeyValue::Integer(n) => Value::Integer(*n),
            KeyValue::Text(s) => Value::Text(s.clone()),
        }
    }
}

impl std::fmt::Display for KeyValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KeyValue::Integer(n) => write!(f, "{n}"),
            KeyValue::Text(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for KeyValue {
    fn from(n: i64) -> Self {
        KeyValue::Integer(n)
    }
}

impl From<&str> for KeyValue {
    fn from(s: &str) -> Self {
        KeyValue::Text(s.to_owned())
    }
}

impl From<String> for KeyValue {
    fn from(s: String) -> Self {
        KeyValue::Text(s)
    }
}

/// A (possibly composite) primary-key value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key(pub Vec<KeyValue>);

impl Key {
    pub fn single(v: impl Into<KeyValue>) -> Self {
        Key(vec![v.into()])
    }

    pub fn composite<I, T>(parts: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<KeyValue>,
    {
        Key(parts.into_iter().map(Into::into).collect())
    }

    pub fn parts(&self) -> &[KeyValue] {
        &self.0
    }
}

impl std::fmt::Display for Key {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, part) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{part}")?;
        }
        write!(f, ")")
    }
}

/// A table row: field name to value. All schema fields are present; unset
/// optional fields hold [`Value::Null`].
pub type Record = std::collections::BTreeMap<String, Value>;

/// Typed accessors for record fields. These expect schema-validated
/// records; a type surprise is reported, not panicked on.
pub mod field {
    use super::{Record, StoreError, Value};
    use chrono::NaiveDate;

    fn get<'a>(rec: &'a Record, name: &str) -> Result<&'a Value, StoreError> {
        rec.get(name).ok_or_else(|| StoreError::MissingField {
            table: "record".to_owned(),
            field: name.to_owned(),
        })
    }

    fn mismatch(name: &str, expected: &str, found: &Value) -> StoreError {
        StoreError::TypeMismatch {
            table: "record".to_owned(),
            field: name.to_owned(),
            expected: expected.to_owned(),
            found: found.to_string(),
        }
    }

    pub fn int(rec: &Record, name: &str) -> Result<i64, StoreError> {
        match get(rec, name)? {
            Value::Integer(n) => Ok(*n),
            other => Err(mismatch(name, "integer", other)),
        }
    }

    pub fn opt_int(rec: &Record, name: &str) -> Result<Option<i64>, StoreError> {
        match get(rec, name)? {
            Value::Integer(n) => Ok(Some(*n)),
            Value::Null => Ok(None),
            other => Err(mismatch(name, "integer or null", other)),
        }
    }

    pub fn real(rec: &Record, name: &str) -> Result<f64, StoreError> {
        match get(rec, name)? {
            Value::Real(n) | Value::Duration(n) => Ok(*n),
            other => Err(mismatch(name, "number", other)),
        }
    }

    pub fn opt_real(rec: &Record, name: &str) -> Result<Option<f64>, StoreError> {
        match get(rec, name)? {
            Value::Real(n) | Value::Duration(n) => Ok(Some(*n)),
            Value::Null => Ok(None),
            other => Err(mismatch(name, "number or null", other)),
        }
    }

    pub fn text<'a>(rec: &'a Record, name: &str) -> Result<&'a str, StoreError> {
        match get(rec, name)? {
            Value::Text(s) => Ok(s),
            other => Err(mismatch(name, "text", other)),
        }
    }

    pub fn date(rec: &Record, name: &str) -> Result<NaiveDate, StoreError> {
        match get(rec, name)? {
            Value::Date(d) => Ok(*d),
            other => Err(mismatch(name, "date", other)),
        }
    }

    pub fn boolean(rec: &Record, name: &str) -> Result<bool, StoreError> {
        match get(rec, name)? {
            Value::Boolean(b) => Ok(*b),
            other => Err(mismatch(name, "boolean", other)),
        }
    }
}
