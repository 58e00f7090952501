//! Result rows, ratio statistics and histogram summaries for the bench
//! harness.

use std::fmt::Write as _;

use bnet_core::minibucket::bound_ratios;

/// CSV header, fixed.
pub const CSV_HEADER: &str =
    "instance,task,strategy,i,m,exact,upper,lower,ml,um,ul,tr,ta,te,mb,fi,fo,ordering";

/// One result row. Optional fields print as empty cells; infinite ratios
/// print as `inf`.
#[derive(Clone, Debug, Default)]
pub struct StatRow {
    pub instance: String,
    pub task: String,
    pub strategy: String,
    pub i: Option<usize>,
    pub m: Option<usize>,
    pub exact: Option<f64>,
    pub upper: Option<f64>,
    pub lower: Option<f64>,
    pub ml: Option<f64>,
    pub um: Option<f64>,
    pub ul: Option<f64>,
    /// Exact-to-approximate time ratio, te / ta.
    pub tr: Option<f64>,
    pub ta: Option<f64>,
    pub te: Option<f64>,
    pub mb: Option<usize>,
    pub fi: Option<usize>,
    pub fo: Option<usize>,
    pub ordering: String,
}

fn cell_f(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x.is_infinite() => "inf".to_string(),
        Some(x) => format!("{x:.16e}"),
    }
}

fn cell_u(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl StatRow {
    /// Fill ml/um/ul from the exact/upper/lower columns.
    pub fn with_ratios(mut self) -> Self {
        if let (Some(upper), Some(lower)) = (self.upper, self.lower) {
            let r = bound_ratios(self.exact, upper, lower);
            self.ml = r.ml;
            self.um = r.um;
            self.ul = Some(r.ul);
        }
        self
    }

    pub fn to_csv(&self) -> String {
        let cols = [
            self.instance.clone(),
            self.task.clone(),
            self.strategy.clone(),
            cell_u(self.i),
            cell_u(self.m),
            cell_f(self.exact),
            cell_f(self.upper),
            cell_f(self.lower),
            cell_f(self.ml),
            cell_f(self.um),
            cell_f(self.ul),
            cell_f(self.tr),
            cell_f(self.ta),
            cell_f(self.te),
            cell_u(self.mb),
            cell_u(self.fi),
            cell_u(self.fo),
            self.ordering.clone(),
        ];
        cols.join(",")
    }
}

/// Histogram bins for an accuracy ratio: exactly 1 (within 1e-9), then
/// (1,2], (2,3], (3,4], (4,inf).
pub const BIN_LABELS: [&str; 5] = ["1", "(1,2]", "(2,3]", "(3,4]", "(4,inf]"];

pub fn bin_of(ratio: f64) -> usize {
    if ratio <= 1.0 + 1e-9 {
        0
    } else if ratio <= 2.0 {
        1
    } else if ratio <= 3.0 {
        2
    } else if ratio <= 4.0 {
        3
    } else {
        4
    }
}

/// Per-bin share of instances and mean time ratio, for one bound type of
/// one configuration.
#[derive(Clone, Debug, Default)]
pub struct Histogram {
    pub percent: [f64; 5],
    pub mean_tr: [f64; 5],
    pub count: usize,
}

pub fn histogram(ratios_and_tr: &[(f64, f64)]) -> Histogram {
    let mut counts = [0usize; 5];
    let mut tr_sum = [0.0f64; 5];
    for (r, tr) in ratios_and_tr {
        let b = bin_of(*r);
        counts[b] += 1;
        tr_sum[b] += tr;
    }
    let total = ratios_and_tr.len().max(1) as f64;
    let mut h = Histogram {
        count: ratios_and_tr.len(),
        ..Default::default()
    };
    for b in 0..5 {
        h.percent[b] = 100.0 * counts[b] as f64 / total;
        h.mean_tr[b] = if counts[b] > 0 {
            tr_sum[b] / counts[b] as f64
        } else {
            0.0
        };
    }
    h
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Per-configuration mean columns of the summary block.
#[derive(Clone, Copy, Debug, Default)]
pub struct SummaryMeans {
    pub ml: f64,
    pub um: f64,
    pub ul: f64,
    pub tr: f64,
    pub ta: f64,
}

/// Render the per-configuration summary block printed by the bench command.
pub fn render_summary(label: &str, ml: &Histogram, um: &Histogram, means: &SummaryMeans) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "config {label}: mean M/L {:.3} U/M {:.3} U/L {:.3} TR {:.3} Ta {:.6}",
        means.ml, means.um, means.ul, means.tr, means.ta
    );
    let _ = writeln!(out, "  range    lower: %inst  meanTR   upper: %inst  meanTR");
    for (b, bin) in BIN_LABELS.iter().enumerate() {
        let _ = writeln!(
            out,
            "  {:7} {:12.1}% {:7.1} {:14.1}% {:7.1}",
            bin, ml.percent[b], ml.mean_tr[b], um.percent[b], um.mean_tr[b]
        );
    }
    out
}
