use std::fmt::Write;
use std::path::PathBuf;

use super::{Method, SampleScore, SkipReason};

pub const TOTAL_ROW: &str = "total";

#[derive(Debug, Clone, PartialEq)]
pub struct LoadFailure {
    pub path: PathBuf,
    pub message: String,
}

/// One (method, scene) aggregate. Metric means are `None` when every
/// object of the scene was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub scene_id: String,
    pub samples: usize,
    pub skipped: usize,
    pub top1: Option<f64>,
    pub top5_avg: Option<f64>,
    pub top10_avg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Ordered by scene id, then method name.
    pub rows: Vec<ReportRow>,
    /// One row per method, over all samples.
    pub totals: Vec<ReportRow>,
    pub failures: Vec<LoadFailure>,
}

fn mean(scores: &[SampleScore], pick: impl Fn(&SampleScore) -> f64) -> Option<f64> {
    (!scores.is_empty()).then(|| scores.iter().map(pick).sum::<f64>() / scores.len() as f64)
}

fn row(method: Method, scene_id: &str, scores: &[SampleScore], skipped: usize) -> ReportRow {
    ReportRow {
        method: method.name().to_string(),
        scene_id: scene_id.to_string(),
        samples: scores.len(),
        skipped,
        top1: mean(scores, |s| s.top1),
        top5_avg: mean(scores, |s| s.top5),
        top10_avg: mean(scores, |s| s.top10),
    }
}

type SceneOutcomes = (String, Vec<Result<Vec<SampleScore>, SkipReason>>);

impl EvalReport {
    /// `methods` must be sorted; `per_scene` sorted by scene id. Each
    /// successful outcome holds one score per method, in `methods` order.
    pub(super) fn assemble(methods: &[Method], per_scene: &[SceneOutcomes], failures: Vec<LoadFailure>) -> Self {
        let mut rows = Vec::new();
        let mut all: Vec<Vec<SampleScore>> = vec![Vec::new(); methods.len()];
        let mut skipped_total = 0;
        for (scene_id, outcomes) in per_scene {
            let skipped = outcomes.iter().filter(|o| o.is_err()).count();
            skipped_total += skipped;
            for (k, &method) in methods.iter().enumerate() {
                let scores: Vec<SampleScore> = outcomes.iter().filter_map(|o| o.as_ref().ok()).map(|s| s[k]).collect();
                all[k].extend_from_slice(&scores);
                rows.push(row(method, scene_id, &scores, skipped));
            }
        }
        let totals = methods
            .iter()
            .zip(&all)
            .map(|(&m, scores)| row(m, TOTAL_ROW, scores, skipped_total))
            .collect();
        Self { rows, totals, failures }
    }

    pub fn rows_for<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.method == method)
    }

    pub fn total_for(&self, method: &str) -> Option<&ReportRow> {
        self.totals.iter().find(|r| r.method == method)
    }

    /// CSV with columns `method,scene_id,samples,top1,top5_avg,top10_avg`.
    /// Each `preamble` line is emitted first as a `#` comment. Values use the
    /// shortest round-trip representation.
    pub fn to_csv(&self, preamble: &[String]) -> String {
        let mut out = String::new();
        for line in preamble {
            writeln!(out, "# {line}").unwrap();
        }
        out.push_str("method,scene_id,samples,top1,top5_avg,top10_avg\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in self.rows.iter().chain(&self.totals) {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.method,
                r.scene_id,
                r.samples,
                opt(r.top1),
                opt(r.top5_avg),
                opt(r.top10_avg)
            )
            .unwrap();
        }
        out
    }

    /// Aligned-column table for humans, with skip counts and load failures.
    pub fn to_text(&self, preamble: &[String]) -> String {
        let mut out = String::new();
        for line in preamble {
            writeln!(out, "{line}").unwrap();
        }
        if !preamble.is_empty() {
            out.push('\n');
        }
        let header = ["method", "scene_id", "samples", "skipped", "top1", "top5_avg", "top10_avg"];
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
        let body: Vec<[String; 7]> = self
            .rows
            .iter()
            .chain(&self.totals)
            .map(|r| {
                [
                    r.method.clone(),
                    r.scene_id.clone(),
                    r.samples.to_string(),
                    r.skipped.to_string(),
                    opt(r.top1),
                    opt(r.top5_avg),
                    opt(r.top10_avg),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for cells in &body {
            for (w, c) in widths.iter_mut().zip(cells) {
                *w = (*w).max(c.len());
            }
        }
        let mut line = |cells: &[&str]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(i, (c, w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            writeln!(out, "{}", parts.join("  ").trim_end()).unwrap();
        };
        line(&header);
        for cells in &body {
            line(&cells.iter().map(String::as_str).collect::<Vec<_>>());
        }
        for f in &self.failures {
            writeln!(out, "unreadable: {}: {}", f.path.display(), f.message).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: f64) -> SampleScore {
        SampleScore { top1: v, top5: v + 1.0, top10: v + 2.0 }
    }

    #[test]
    fn totals_are_sample_weighted() {
        let per_scene = vec![
            ("a".to_string(), vec![Ok(vec![s(1.0)]), Ok(vec![s(3.0)]), Err(SkipReason::TooShort)]),
            ("b".to_string(), vec![Ok(vec![s(8.0)])]),
            ("c".to_string(), vec![Err(SkipReason::NoTrajectory)]),
        ];
        let report = EvalReport::assemble(&[Method::Planner], &per_scene, vec![]);
        assert_eq!(report.rows.len(), 3);
        assert_eq!(report.rows[0].top1, Some(2.0));
        assert_eq!(report.rows[0].skipped, 1);
        assert_eq!(report.rows[2].top1, None);
        let total = report.total_for("planner").unwrap();
        assert_eq!(total.samples, 3);
        assert_eq!(total.skipped, 2);
        assert_eq!(total.top1, Some(4.0));
        assert_eq!(total.top10_avg, Some(6.0));

        let csv = report.to_csv(&["cfg".into()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# cfg");
        assert_eq!(lines[1], "method,scene_id,samples,top1,top5_avg,top10_avg");
        assert_eq!(lines[2], "planner,a,2,2,3,4");
        assert_eq!(lines[4], "planner,c,0,,,");
        assert_eq!(lines[5], "planner,total,3,4,5,6");
        let text = report.to_text(&[]);
        assert!(text.lines().next().unwrap().starts_with("method"));
    }
}
