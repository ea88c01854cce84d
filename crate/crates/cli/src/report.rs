//! Report emission: one JSON object (or one CSV table) per run, with the
//! full effective configuration echoed, the library version, and wall
//! time. Floats are printed with 17 significant digits in both formats;
//! CSV quoting follows RFC 4180 via the `csv` writer.

use std::io::Write;

use serde::Serialize;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// serde_json formatter that pins float formatting to 17 significant
/// digits; everything else is compact JSON.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        debug_assert!(value.is_finite(), "reports must not carry non-finite floats");
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// The envelope of every run. Struct serialization keeps the declared
/// field order, which is what makes report bodies byte-stable.
#[derive(Serialize)]
pub struct Envelope<C: Serialize, R: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub config: C,
    pub wall_time_s: f64,
    pub results: R,
}

pub fn to_json_bytes<C: Serialize, R: Serialize>(env: &Envelope<C, R>) -> std::io::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    env.serialize(&mut ser)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
    out.push(b'\n');
    Ok(out)
}

/// Tabular view of a result for the CSV format.
pub trait CsvRows {
    fn headers(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
}

pub fn to_csv_bytes<C: Serialize, R: Serialize + CsvRows>(
    env: &Envelope<C, R>,
) -> std::io::Result<Vec<u8>> {
    let config_json = {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
        env.config
            .serialize(&mut ser)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        String::from_utf8(buf).expect("JSON is UTF-8")
    };
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut headers = vec![
        "command".to_string(),
        "version".to_string(),
        "wall_time_s".to_string(),
        "config".to_string(),
    ];
    headers.extend(env.results.headers());
    wtr.write_record(&headers)?;
    let prefix = vec![
        env.command.to_string(),
        env.version.to_string(),
        fmt_f64(env.wall_time_s),
        config_json,
    ];
    let rows = env.results.rows();
    if rows.is_empty() {
        // A valid document with zero data rows: header only.
    }
    for row in rows {
        let mut record = prefix.clone();
        record.extend(row);
        wtr.write_record(&record)?;
    }
    wtr.into_inner()
        .map_err(std::io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Dummy {
        x: f64,
    }

    impl CsvRows for Dummy {
        fn headers(&self) -> Vec<String> {
            vec!["x".into()]
        }
        fn rows(&self) -> Vec<Vec<String>> {
            vec![vec![fmt_f64(self.x)]]
        }
    }

    #[test]
    fn floats_use_seventeen_significant_digits() {
        let env = Envelope {
            command: "dummy",
            version: "0",
            config: Dummy { x: 0.5 },
            wall_time_s: 0.0,
            results: Dummy {
                x: 1.0 / 3.0,
            },
        };
        let json = String::from_utf8(to_json_bytes(&env).unwrap()).unwrap();
        assert!(json.contains("3.3333333333333331e-1"), "{json}");
        let csv = String::from_utf8(to_csv_bytes(&env).unwrap()).unwrap();
        assert!(csv.contains("3.3333333333333331e-1"), "{csv}");
        // The config echo is quoted as one RFC-4180 field.
        assert!(csv.contains("\"{\"\"x\"\""), "{csv}");
    }

    #[test]
    fn json_roundtrip_parses() {
        let env = Envelope {
            command: "dummy",
            version: "0",
            config: Dummy { x: 2.0 },
            wall_time_s: 1.5,
            results: Dummy { x: -0.125 },
        };
        let bytes = to_json_bytes(&env).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["results"]["x"].as_f64().unwrap(), -0.125);
        assert_eq!(v["command"], "dummy");
    }
}
