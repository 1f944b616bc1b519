use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::CliError;

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Pretty JSON with every float written by [`fmt_f64`].
struct FixedDigits<'a>(PrettyFormatter<'a>);

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| CliError::Output(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row.into_iter().map(fmt_f64)).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Output(e.to_string()))
}

/// Everything a command produces, held in memory until the command succeeds.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    pub stdout: String,
    /// Set when the outputs are complete but a check failed.
    pub failure: Option<String>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    /// Writes every file to a temporary name first, then renames them all.
    pub fn commit(&self, dir: &Path) -> Result<(), CliError> {
        let fail = |what: &Path, e: io::Error| CliError::Output(format!("{}: {e}", what.display()));
        std::fs::create_dir_all(dir).map_err(|e| fail(dir, e))?;
        let mut staged = Vec::new();
        for (name, bytes) in &self.files {
            let tmp = dir.join(format!(".{name}.tmp"));
            if let Err(e) = std::fs::write(&tmp, bytes) {
                for (t, _) in &staged {
                    let _ = std::fs::remove_file(t);
                }
                let _ = std::fs::remove_file(&tmp);
                return Err(fail(&tmp, e));
            }
            staged.push((tmp, dir.join(name)));
        }
        for (tmp, target) in &staged {
            std::fs::rename(tmp, target).map_err(|e| fail(target, e))?;
        }
        print!("{}", self.stdout);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(fmt_f64(4.0 / 3.0), "1.3333333333333333e0");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
        let json = String::from_utf8(to_json(&serde_json::json!({"x": 0.1, "n": 3, "bad": f64::NAN})).unwrap()).unwrap();
        assert!(json.contains("\"x\": 1.0000000000000001e-1"), "{json}");
        assert!(json.contains("\"n\": 3"));
        assert!(json.contains("\"bad\": null"));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let text = String::from_utf8(to_csv(&["t", "g"], vec![vec![1.0, -2.5]]).unwrap()).unwrap();
        assert_eq!(text, "t,g\n1.0000000000000000e0,-2.5000000000000000e0\n");
    }

    #[test]
    fn commit_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested");
        let mut a = Artifacts::default();
        a.add("a.txt", b"one".to_vec());
        a.add("b.txt", b"two".to_vec());
        a.commit(&out).unwrap();
        assert_eq!(std::fs::read(out.join("b.txt")).unwrap(), b"two");
        let leftovers = std::fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp")).count();
        assert_eq!(leftovers, 0);
    }
}
