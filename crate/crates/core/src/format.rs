//! Text formats: the JSON system document and the CSV tables written by the tools.
//!
//! A system document looks like
//!
//! ```json
//! { "n_states": 2, "edges": [[0, 1], [1, 1]], "f_state": ["1/2", 0.25] }
//! ```
//!
//! Numbers may be JSON numbers (read as binary floating point) or `"p/q"` strings
//! (exact). `f_edge`, when present, is parallel to the sorted edge list.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::error::ParseError;
use crate::measures::VertexMeasure;
use crate::scalar::{render, Scalar};
use crate::system::{EdgeFunction, FiniteMVSystem, StateFunction};

/// A parsed system with its optional functions.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemDocument<T> {
    pub system: FiniteMVSystem,
    pub f_state: Option<StateFunction<T>>,
    pub f_edge: Option<EdgeFunction<T>>,
}

struct Value<T>(T);

impl<'de, T: Scalar> Deserialize<'de> for Value<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);

        impl<T: Scalar> Visitor<'_> for V<T> {
            type Value = Value<T>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a \"p/q\" string")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Value<T>, E> {
                T::parse_value(s).map(Value).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Value<T>, E> {
                Ok(Value(T::from_int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value<T>, E> {
                let v = i64::try_from(v).map_err(|_| E::custom("integer out of range"))?;
                Ok(Value(T::from_int(v)))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Value<T>, E> {
                // `{:e}` keeps every bit of the binary value.
                T::parse_value(&format!("{v:e}")).map(Value).map_err(E::custom)
            }
        }

        d.deserialize_any(V(PhantomData))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, bound = "")]
struct RawDocument<T: Scalar> {
    n_states: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    f_state: Option<Vec<Value<T>>>,
    #[serde(default)]
    f_edge: Option<Vec<Value<T>>>,
}

/// Parses a system document. Syntax errors carry line and column.
pub fn parse_system_document<T: Scalar>(text: &str) -> Result<SystemDocument<T>, ParseError> {
    let raw: RawDocument<T> = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        ParseError::Document {
            line: e.line(),
            column: e.column(),
            message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
        }
    })?;
    let system = FiniteMVSystem::new(raw.n_states, raw.edges)?;
    let f_state = raw
        .f_state
        .map(|v| StateFunction::new(&system, v.into_iter().map(|x| x.0).collect()))
        .transpose()?;
    let f_edge = raw
        .f_edge
        .map(|v| EdgeFunction::new(&system, v.into_iter().map(|x| x.0).collect()))
        .transpose()?;
    Ok(SystemDocument {
        system,
        f_state,
        f_edge,
    })
}

/// Writes a document that [`parse_system_document`] reads back unchanged.
/// Values are written as strings so rationals stay exact.
pub fn write_system_document<T: Scalar>(
    system: &FiniteMVSystem,
    f_state: Option<&StateFunction<T>>,
    f_edge: Option<&EdgeFunction<T>>,
) -> String {
    let values = |v: &[T]| serde_json::Value::Array(v.iter().map(|x| render(x).into()).collect());
    let mut doc = serde_json::Map::new();
    doc.insert("n_states".into(), system.n_states().into());
    doc.insert(
        "edges".into(),
        serde_json::Value::Array(
            system
                .edges()
                .iter()
                .map(|&(t, h)| serde_json::json!([t, h]))
                .collect(),
        ),
    );
    if let Some(f) = f_state {
        doc.insert("f_state".into(), values(&f.0));
    }
    if let Some(f) = f_edge {
        doc.insert("f_edge".into(), values(&f.0));
    }
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(doc))
        .expect("in-memory JSON cannot fail");
    s.push('\n');
    s
}

/// One row per measure: `measure,w0,w1,...`.
pub fn measures_csv<T: Scalar>(n_states: usize, measures: &[VertexMeasure<T>]) -> String {
    let mut s = String::from("measure");
    for x in 0..n_states {
        s.push_str(&format!(",w{x}"));
    }
    s.push('\n');
    for (i, m) in measures.iter().enumerate() {
        s.push_str(&i.to_string());
        for w in &m.0 {
            s.push(',');
            s.push_str(&render(w));
        }
        s.push('\n');
    }
    s
}

/// Reads a CSV table into its header and string rows.
pub fn read_table(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>), ParseError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()).map_err(csv_error))
        .collect::<Result<_, _>>()?;
    Ok((header, rows))
}

fn csv_error(e: csv::Error) -> ParseError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    ParseError::Document {
        line,
        column: 0,
        message: e.to_string(),
    }
}

/// Parses the output of [`measures_csv`].
pub fn parse_measures_csv<T: Scalar>(text: &str) -> Result<Vec<VertexMeasure<T>>, ParseError> {
    let (_, rows) = read_table(text)?;
    rows.iter()
        .map(|row| {
            row.iter()
                .skip(1)
                .map(|w| T::parse_value(w))
                .collect::<Result<Vec<_>, _>>()
                .map(VertexMeasure)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn parses_mixed_values() {
        let doc: SystemDocument<Rational> = parse_system_document(
            r#"{"n_states": 2, "edges": [[1, 1], [0, 1]], "f_state": ["1/3", 0.5], "f_edge": [2, "-7/2"]}"#,
        )
        .unwrap();
        assert_eq!(doc.system.edges(), &[(0, 1), (1, 1)]);
        assert_eq!(doc.f_state.unwrap().0, vec![ratio(1, 3), ratio(1, 2)]);
        assert_eq!(doc.f_edge.unwrap().0, vec![ratio(2, 1), ratio(-7, 2)]);
    }

    #[test]
    fn decimals_are_binary_floats() {
        let doc: SystemDocument<Rational> =
            parse_system_document(r#"{"n_states": 1, "edges": [[0, 0]], "f_state": [0.1]}"#).unwrap();
        assert_eq!(doc.f_state.unwrap().0[0], Rational::from_float(0.1).unwrap());
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_system_document::<Rational>("{\n  \"n_states\": 2,\n  \"edges\": [[0, 1],]\n}")
            .unwrap_err();
        match err {
            ParseError::Document { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_value_has_position() {
        let err = parse_system_document::<f64>(
            "{\"n_states\": 1,\n\"edges\": [[0, 0]],\n\"f_state\": [\"1/0\"]}",
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::Document { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn semantic_errors() {
        assert!(matches!(
            parse_system_document::<f64>(r#"{"n_states": 2, "edges": [[0, 2]]}"#),
            Err(ParseError::System(_))
        ));
        assert!(matches!(
            parse_system_document::<f64>(r#"{"n_states": 2, "edges": [[0, 1]], "f_state": [1]}"#),
            Err(ParseError::System(_))
        ));
    }

    #[test]
    fn document_round_trip() {
        let s = FiniteMVSystem::z4();
        let f = StateFunction(vec![ratio(1, 3), ratio(-2, 1), ratio(0, 1), ratio(5, 7)]);
        let text = write_system_document(&s, Some(&f), None);
        let doc: SystemDocument<Rational> = parse_system_document(&text).unwrap();
        assert_eq!(doc.system, s);
        assert_eq!(doc.f_state, Some(f));
        assert_eq!(doc.f_edge, None);
    }

    #[test]
    fn measures_round_trip() {
        let ms = vec![
            VertexMeasure(vec![ratio(1, 2), ratio(1, 2), ratio(0, 1)]),
            VertexMeasure(vec![ratio(0, 1), ratio(0, 1), ratio(1, 1)]),
        ];
        let text = measures_csv(3, &ms);
        assert_eq!(text, "measure,w0,w1,w2\n0,1/2,1/2,0\n1,0,0,1\n");
        assert_eq!(parse_measures_csv::<Rational>(&text).unwrap(), ms);
    }
}
