//! Evaluation reports, performance gains and confidence trade-off curves.

use std::fmt::Write as _;

use super::harness::{AttackKind, TargetOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub attack: AttackKind,
    pub attr_type: String,
    pub k: usize,
    pub precision: f64,
    pub recall: f64,
    pub fscore: f64,
    /// Target evaluations summed over trials.
    pub n_targets: usize,
    /// Trials that contributed at least one target.
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gain {
    pub delta: f64,
    /// Relative gain in percent; `None` when the reference is 0.
    pub percent: Option<f64>,
}

/// Absolute and relative improvement of `a` over `b`.
pub fn performance_gain(a: f64, b: f64) -> Gain {
    let delta = a - b;
    Gain { delta, percent: (b > 0.0).then(|| delta / b * 100.0) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainRow {
    pub attack: AttackKind,
    pub other: AttackKind,
    pub attr_type: String,
    pub k: usize,
    pub precision: Gain,
    pub recall: Gain,
    pub fscore: Gain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub attacks: Vec<AttackKind>,
    pub type_names: Vec<String>,
    pub k_list: Vec<usize>,
    pub trials: usize,
    pub rows: Vec<MetricRow>,
    pub outcomes: Vec<TargetOutcome>,
    /// Raw and deduplicated sample sizes per trial.
    pub sample_counts: Vec<(usize, usize)>,
    /// Targets on which an attack returned an error.
    pub failures: Vec<(AttackKind, usize)>,
    pub warnings: Vec<String>,
}

const HEADER: [&str; 8] = ["attack", "attribute_type", "K", "precision", "recall", "fscore", "n_targets", "trials"];

fn fmt_gain(g: Gain) -> [String; 2] {
    [format!("{:.4}", g.delta), g.percent.map_or_else(|| "NA".to_owned(), |p| format!("{p:.1}"))]
}

impl EvalReport {
    pub fn row(&self, attack: AttackKind, attr_type: &str, k: usize) -> Option<&MetricRow> {
        self.rows.iter().find(|r| r.attack == attack && r.attr_type == attr_type && r.k == k)
    }

    /// Gains of `attack` over every other attack, per type and K.
    pub fn gains(&self, attack: AttackKind) -> Vec<GainRow> {
        let mut out = Vec::new();
        for mine in self.rows.iter().filter(|r| r.attack == attack) {
            for theirs in self.rows.iter() {
                if theirs.attack == attack || theirs.attr_type != mine.attr_type || theirs.k != mine.k {
                    continue;
                }
                out.push(GainRow {
                    attack,
                    other: theirs.attack,
                    attr_type: mine.attr_type.clone(),
                    k: mine.k,
                    precision: performance_gain(mine.precision, theirs.precision),
                    recall: performance_gain(mine.recall, theirs.recall),
                    fscore: performance_gain(mine.fscore, theirs.fscore),
                });
            }
        }
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut s = HEADER.join("\t");
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}",
                r.attack, r.attr_type, r.k, r.precision, r.recall, r.fscore, r.n_targets, r.trials
            );
        }
        s
    }

    pub fn gains_tsv(&self, attack: AttackKind) -> String {
        let mut s = "attack\tversus\tattribute_type\tK\tdP\tdP%\tdR\tdR%\tdF\tdF%\n".to_owned();
        for g in self.gains(attack) {
            let [dp, dpp] = fmt_gain(g.precision);
            let [dr, drp] = fmt_gain(g.recall);
            let [df, dfp] = fmt_gain(g.fscore);
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{dp}\t{dpp}\t{dr}\t{drp}\t{df}\t{dfp}",
                g.attack, g.other, g.attr_type, g.k
            );
        }
        s
    }

    /// Column-aligned rendering of the metric rows.
    pub fn to_table(&self) -> String {
        let cells: Vec<[String; 8]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.attack.to_string(),
                    r.attr_type.clone(),
                    r.k.to_string(),
                    format!("{:.4}", r.precision),
                    format!("{:.4}", r.recall),
                    format!("{:.4}", r.fscore),
                    r.n_targets.to_string(),
                    r.trials.to_string(),
                ]
            })
            .collect();
        let mut widths = HEADER.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut s = String::new();
        let line = |s: &mut String, row: &[String]| {
            let parts: Vec<String> = row.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(s, "{}", parts.join("  ").trim_end());
        };
        line(&mut s, &HEADER.map(str::to_owned));
        for row in &cells {
            line(&mut s, row);
        }
        s
    }

    /// (confidence, precision) per target for one attack, type and K.
    pub fn confidence_points(
        &self,
        attack: AttackKind,
        attr_type: usize,
        k: usize,
        estimator: Estimator,
    ) -> Vec<ConfidencePoint> {
        let Some(ki) = self.k_list.iter().position(|&x| x == k) else {
            return Vec::new();
        };
        self.outcomes
            .iter()
            .filter(|o| o.attack == attack && o.attr_type == attr_type)
            .filter_map(|o| {
                let c = o.confidence?;
                let confidence = match estimator {
                    Estimator::Clusterness => c.clusterness,
                    Estimator::Gap => c.gap,
                };
                Some(ConfidencePoint { confidence, precision: o.metrics[ki].precision })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Clusterness,
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidencePoint {
    pub confidence: f64,
    pub precision: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub threshold: f64,
    pub fraction: f64,
    pub precision: f64,
}

/// Kept fraction and mean precision for each confidence threshold. Thresholds
/// that keep nobody produce no point.
pub fn confidence_sweep(points: &[ConfidencePoint], thresholds: &[f64]) -> Vec<SweepPoint> {
    thresholds
        .iter()
        .filter_map(|&threshold| {
            let kept: Vec<f64> = points.iter().filter(|p| p.confidence >= threshold).map(|p| p.precision).collect();
            (!kept.is_empty()).then(|| SweepPoint {
                threshold,
                fraction: kept.len() as f64 / points.len() as f64,
                precision: kept.iter().sum::<f64>() / kept.len() as f64,
            })
        })
        .collect()
}

/// Mean precision over the most confident `fraction` of targets, rounding the
/// kept count up. Equal confidences keep their input order.
pub fn top_fraction_precision(points: &[ConfidencePoint], fraction: f64) -> Option<f64> {
    let keep = ((points.len() as f64 * fraction).ceil() as usize).min(points.len());
    if keep == 0 {
        return None;
    }
    let mut order: Vec<&ConfidencePoint> = points.iter().collect();
    order.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
    Some(order[..keep].iter().map(|p| p.precision).sum::<f64>() / keep as f64)
}
