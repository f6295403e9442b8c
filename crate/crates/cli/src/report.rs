use std::io;

use affcert::certificates::Certificate;
use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, serde::Serialize, Deserialize)]
pub struct Config {
    pub input: Option<String>,
    pub element: Option<String>,
    pub word: Option<String>,
    pub args: Vec<String>,
    pub alpha: f64,
    pub max_word_len: usize,
    pub n_max: u64,
    pub radius: f64,
    pub seed: u64,
    pub jobs: usize,
    /// Eigenvalues closer than this to 1 count as unit eigenvalues in the screen.
    pub eigen_tol: f64,
}

#[derive(Debug, Clone, serde::Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

/// Field order is the output order; `timing` stays last so that comparisons
/// can drop it.
#[derive(Debug, Clone, serde::Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: Config,
    pub results: Value,
    pub certificates: Vec<Certificate>,
    pub timing: Timing,
}

/// Pretty JSON with every float written to 17 significant digits.
struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("reports serialize");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

impl Report {
    pub fn render(&self) -> String {
        to_json(self)
    }

    /// The certificate block alone, as compared across runs.
    pub fn certificates_json(&self) -> String {
        to_json(&self.certificates)
    }

    /// The whole report without the timing field.
    pub fn without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(m) = &mut v {
            m.remove("timing");
        }
        to_json(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits_and_round_trip() {
        let xs = [0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 0.0, 1.0];
        let text = to_json(&xs);
        assert!(text.contains("1.0000000000000001e-1"));
        assert!(text.contains("-3.3333333333333331e-1"));
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, xs);
    }
}
