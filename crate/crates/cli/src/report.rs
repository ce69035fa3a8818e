//! Report emission: a JSON envelope with provenance, or CSV rows.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use kerncalc::repro::CriterionOutcome;
use kerncalc::{CMat, KernelExpr, VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

type JetKey = Option<(Vec<u32>, Vec<u32>)>;

enum Rows {
    None,
    Spectrum(Vec<f64>),
    Entries(Vec<(JetKey, CMat)>),
    Verdicts(Vec<(f64, bool)>),
    Outcomes(Vec<CriterionOutcome>),
}

pub struct Report {
    command: &'static str,
    kernel: Option<String>,
    seed: Option<u64>,
    tol: Option<f64>,
    result: Value,
    rows: Rows,
}

impl Report {
    pub fn new(command: &'static str, kernel: &KernelExpr) -> Self {
        Self { kernel: Some(kernel.canonical()), ..Self::bare(command) }
    }

    pub fn bare(command: &'static str) -> Self {
        Self { command, kernel: None, seed: None, tol: None, result: Value::Null, rows: Rows::None }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn set_result(&mut self, result: Value) {
        self.result = result;
    }

    pub fn set_spectrum(&mut self, eigenvalues: Vec<f64>) {
        self.rows = Rows::Spectrum(eigenvalues);
    }

    pub fn set_entries(&mut self, entries: Vec<(JetKey, CMat)>) {
        self.rows = Rows::Entries(entries);
    }

    pub fn set_verdicts(&mut self, verdicts: Vec<(f64, bool)>) {
        self.rows = Rows::Verdicts(verdicts);
    }

    pub fn set_outcomes(&mut self, outcomes: Vec<CriterionOutcome>) {
        self.result = serde_json::to_value(&outcomes).expect("outcomes serialize");
        self.rows = Rows::Outcomes(outcomes);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = json!({
                    "command": self.command,
                    "version": VERSION,
                    "kernel": self.kernel,
                    "seed": self.seed,
                    "tol": self.tol,
                    "result": self.result,
                });
                let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(),
        }
    }

    fn csv(&self) -> String {
        let mut head = format!("# kerncalc {VERSION} command={}", self.command);
        if let Some(k) = &self.kernel {
            head += &format!(" kernel={k}");
        }
        if let Some(s) = self.seed {
            head += &format!(" seed={s}");
        }
        if let Some(t) = self.tol {
            head += &format!(" tol={t:e}");
        }
        head.push('\n');
        let mut w = csv::Writer::from_writer(head.into_bytes());
        self.csv_rows(&mut w).expect("writing to memory");
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 CSV")
    }

    fn csv_rows(&self, w: &mut csv::Writer<Vec<u8>>) -> csv::Result<()> {
        match &self.rows {
            Rows::Spectrum(eig) => {
                w.write_record(["index", "eigenvalue"])?;
                for (i, e) in eig.iter().enumerate() {
                    w.write_record([i.to_string(), e.to_string()])?;
                }
            }
            Rows::Entries(entries) => {
                w.write_record(["i", "j", "row", "col", "re", "im"])?;
                let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
                for (key, m) in entries {
                    let (i, j) = key.as_ref().map_or((String::new(), String::new()), |(i, j)| (join(i), join(j)));
                    for r in 0..m.rows() {
                        for c in 0..m.cols() {
                            let x = m[(r, c)];
                            w.write_record([i.clone(), j.clone(), r.to_string(), c.to_string(), x.re.to_string(), x.im.to_string()])?;
                        }
                    }
                }
            }
            Rows::Verdicts(v) => {
                w.write_record(["t", "psd"])?;
                for (t, ok) in v {
                    w.write_record([t.to_string(), ok.to_string()])?;
                }
            }
            Rows::Outcomes(outcomes) => {
                w.write_record(["id", "title", "passed", "seconds", "detail"])?;
                for o in outcomes {
                    w.write_record([o.id.to_string(), o.title.to_string(), o.passed.to_string(), format!("{:.3}", o.seconds), o.detail.clone()])?;
                }
            }
            Rows::None => {
                w.write_record(["key", "value"])?;
                if let Value::Object(map) = &self.result {
                    for (k, v) in map {
                        let text = match v {
                            Value::String(s) => s.clone(),
                            other => other.to_string(),
                        };
                        w.write_record([k.as_str(), text.as_str()])?;
                    }
                }
            }
        }
        Ok(())
    }
}
