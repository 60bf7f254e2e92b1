use std::fmt::Write;

/// Per-step classification results of one evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// `confusion[truth][decision]` for the sequence classifier.
    pub confusion: Vec<Vec<usize>>,
    /// Same images classified one at a time by the reducer's own head.
    pub baseline_confusion: Vec<Vec<usize>>,
    pub sequences: usize,
    pub noise: f64,
    pub aspect_range: Option<(f64, f64)>,
    pub aspect_interval: Option<f64>,
    pub train_fraction: f64,
}

fn pct(correct: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| 100.0 * correct as f64 / total as f64)
}

fn fmt_pct(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.2}"))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |v| v.to_string())
}

impl EvalReport {
    pub fn new(class_count: usize) -> Self {
        EvalReport {
            confusion: vec![vec![0; class_count]; class_count],
            baseline_confusion: vec![vec![0; class_count]; class_count],
            sequences: 0,
            noise: 0.0,
            aspect_range: None,
            aspect_interval: None,
            train_fraction: 1.0,
        }
    }

    pub fn class_count(&self) -> usize {
        self.confusion.len()
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.class_count()).map(|k| self.confusion[k][k]).sum()
    }

    pub fn class_total(&self, k: usize) -> usize {
        self.confusion[k].iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Percent of correct per-step decisions; `None` without samples.
    pub fn accuracy(&self) -> Option<f64> {
        pct(self.correct(), self.total())
    }

    pub fn class_accuracy(&self, k: usize) -> Option<f64> {
        pct(self.confusion[k][k], self.class_total(k))
    }

    pub fn baseline_accuracy(&self) -> Option<f64> {
        let c = &self.baseline_confusion;
        let total: usize = c.iter().flatten().sum();
        pct((0..c.len()).map(|k| c[k][k]).sum(), total)
    }

    fn range_text(&self) -> String {
        self.aspect_range
            .map_or_else(|| "none".into(), |(lo, hi)| format!("{lo}:{hi}"))
    }

    /// Confusion matrix and accuracies laid out for reading.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "noise {}  aspect range {}  aspect interval {}  train fraction {}",
            self.noise,
            self.range_text(),
            fmt_opt(self.aspect_interval),
            self.train_fraction
        );
        if self.is_empty() {
            s.push_str("no samples: nothing left to evaluate after subsampling\n");
            return s;
        }
        let n = self.class_count();
        let _ = write!(s, "{:>8}", "class");
        for k in 0..n {
            let _ = write!(s, "{k:>7}");
        }
        let _ = writeln!(s, "{:>10}", "acc (%)");
        for k in 0..n {
            let _ = write!(s, "{k:>8}");
            for v in &self.confusion[k] {
                let _ = write!(s, "{v:>7}");
            }
            let _ = writeln!(s, "{:>10}", fmt_pct(self.class_accuracy(k)));
        }
        let _ = writeln!(
            s,
            "total {}/{} = {}% over {} sequences",
            self.correct(),
            self.total(),
            fmt_pct(self.accuracy()),
            self.sequences
        );
        let _ = writeln!(s, "single-image baseline {}%", fmt_pct(self.baseline_accuracy()));
        s
    }

    /// One `key=value` per line; see the README for the field list.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let status = if self.is_empty() { "no_samples" } else { "ok" };
        let _ = writeln!(s, "status={status}");
        let _ = writeln!(s, "classes={}", self.class_count());
        let _ = writeln!(s, "samples={}", self.total());
        let _ = writeln!(s, "sequences={}", self.sequences);
        let _ = writeln!(s, "correct={}", self.correct());
        let _ = writeln!(s, "accuracy={}", fmt_pct(self.accuracy()));
        let _ = writeln!(s, "baseline_accuracy={}", fmt_pct(self.baseline_accuracy()));
        let _ = writeln!(s, "noise={}", self.noise);
        let _ = writeln!(s, "aspect_range={}", self.range_text());
        let _ = writeln!(s, "aspect_interval={}", fmt_opt(self.aspect_interval));
        let _ = writeln!(s, "train_fraction={}", self.train_fraction);
        for k in 0..self.class_count() {
            let _ = writeln!(s, "class.{k}.count={}", self.class_total(k));
            let _ = writeln!(s, "class.{k}.correct={}", self.confusion[k][k]);
            let _ = writeln!(s, "class.{k}.accuracy={}", fmt_pct(self.class_accuracy(k)));
            let row: Vec<String> = self.confusion[k].iter().map(usize::to_string).collect();
            let _ = writeln!(s, "confusion.{k}={}", row.join(","));
        }
        s
    }
}
