//! Command-line front end: measure documents in, summaries and tables out.

pub mod output;
pub mod run;
pub mod spec;

use std::fmt;

pub use output::{Report, RunManifest, Table};
pub use run::{execute, Command};
pub use spec::{parse_spec, MeasureSpec};

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Parse(String),
    Validation(String),
    Numerical(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Internal(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<szego_core::Error> for CliError {
    fn from(e: szego_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

/// Default tolerances with the keys of a JSON object such as `{"fact": 1e-7}` replaced.
pub fn tolerances_from_overrides(
    overrides: Option<&str>,
) -> Result<szego_core::Tolerances, CliError> {
    let Some(text) = overrides else {
        return Ok(szego_core::Tolerances::default());
    };
    let bad = |m: String| CliError::Parse(format!("tolerance overrides: {m}"));
    let patch: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let mut base =
        serde_json::to_value(szego_core::Tolerances::default()).expect("tolerances serialize");
    let fields = base.as_object_mut().expect("tolerances are a struct");
    for (key, value) in patch {
        if !fields.contains_key(&key) {
            return Err(bad(format!("unknown key `{key}`")));
        }
        if !value.as_f64().is_some_and(|v| v.is_finite() && v > 0.0) {
            return Err(bad(format!("`{key}` must be a positive number")));
        }
        fields.insert(key, value);
    }
    serde_json::from_value(base).map_err(|e| bad(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_merge_into_defaults() {
        let t = tolerances_from_overrides(Some(r#"{"fact": 1e-6}"#)).unwrap();
        assert_eq!(t.fact, 1e-6);
        assert_eq!(t.rank, szego_core::Tolerances::default().rank);
        assert_eq!(
            tolerances_from_overrides(None).unwrap(),
            szego_core::Tolerances::default()
        );
        assert_eq!(
            tolerances_from_overrides(Some(r#"{"nope": 1}"#))
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            tolerances_from_overrides(Some(r#"{"fact": -1}"#))
                .unwrap_err()
                .exit_code(),
            2
        );
    }
}
