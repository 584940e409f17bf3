use std::fmt::Write as _;
use std::str::FromStr;

use super::EvalError;
use crate::{Decision, Light};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
}

impl Tally {
    /// Fraction correct, `None` without any window.
    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }
}

/// Accuracy of one method on one condition. Unavailable outputs count as
/// wrong.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub condition: String,
    pub red: Tally,
    pub green: Tally,
    pub unavailable: usize,
    /// Mean wall time per window in milliseconds. Never emitted, so reports
    /// stay reproducible.
    pub mean_window_ms: f64,
}

impl ReportRow {
    pub fn windows(&self) -> usize {
        self.red.total + self.green.total
    }

    pub fn overall(&self) -> Tally {
        Tally {
            correct: self.red.correct + self.green.correct,
            total: self.windows(),
        }
    }

    pub fn accuracy(&self, light: Light) -> Option<f64> {
        match light {
            Light::Red => self.red.accuracy(),
            Light::Green => self.green.accuracy(),
        }
    }

    pub fn overall_accuracy(&self) -> Option<f64> {
        self.overall().accuracy()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            _ => Err(EvalError::Parse {
                what: "report format",
                value: s.to_string(),
            }),
        }
    }
}

/// Counts `(truth, decision)` pairs into a report row.
pub fn tally(method: &str, condition: &str, outcomes: &[(Light, Decision)]) -> ReportRow {
    let mut row = ReportRow {
        method: method.to_string(),
        condition: condition.to_string(),
        red: Tally::default(),
        green: Tally::default(),
        unavailable: 0,
        mean_window_ms: 0.0,
    };
    for &(truth, decision) in outcomes {
        let t = match truth {
            Light::Red => &mut row.red,
            Light::Green => &mut row.green,
        };
        t.total += 1;
        t.correct += usize::from(decision.is_correct(truth));
        row.unavailable += usize::from(decision == Decision::Unavailable);
    }
    row
}

fn pct(a: Option<f64>) -> String {
    a.map(|v| format!("{:.2}", v * 100.0)).unwrap_or_default()
}

/// Renders a report. Accuracies are percentages with two decimals; a label
/// without windows leaves its cell empty.
pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str("method,condition,green_accuracy,red_accuracy,overall_accuracy,unavailable,windows\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.method,
                    r.condition,
                    pct(r.green.accuracy()),
                    pct(r.red.accuracy()),
                    pct(r.overall_accuracy()),
                    r.unavailable,
                    r.windows()
                );
            }
        }
        ReportFormat::Markdown => {
            out.push_str("| Method | Green | Red | Overall |\n");
            out.push_str("|---|---|---|---|\n");
            for r in &report.rows {
                let cell = |a: Option<f64>| {
                    a.map(|v| format!("{}%", pct(Some(v))))
                        .unwrap_or_else(|| "-".into())
                };
                let _ = writeln!(
                    out,
                    "| {} ({}) | {} | {} | {} |",
                    r.method,
                    r.condition,
                    cell(r.green.accuracy()),
                    cell(r.red.accuracy()),
                    cell(r.overall_accuracy())
                );
            }
        }
    }
    out
}
