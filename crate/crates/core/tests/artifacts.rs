//! Written artifacts parsed back and checked against independent recomputation.

use std::collections::BTreeMap;

use mogalign_core::svg::boxplot_svg;
use mogalign_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn synthetic_result(seed: u64) -> SweepResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for beta in [0.5, 2.0] {
        for trial in 0..9u64 {
            for variant in Variant::BOTH {
                let shift = if variant == Variant::AK { 1.0 } else { 0.0 };
                let failed = trial == 4 && variant == Variant::KA;
                let mut draw = |scale: f64| shift + scale * rng.random::<f64>();
                let metrics = MetricsReport {
                    overall_precision: draw(3.0) - 5.0,
                    overall_recall: draw(2.0) - 4.0,
                    target_precision: draw(20.0) - 30.0,
                    final_avg_reward: draw(4.0) + 3.0,
                    n_samples: 1000,
                };
                rows.push(SweepRow {
                    variant,
                    algorithm: Algorithm::Grpo,
                    beta,
                    iterations: 100,
                    n_final: 4,
                    seed: trial,
                    metrics: (!failed).then_some(metrics),
                    failed,
                    failed_stage: failed.then(|| "align".to_string()),
                });
            }
        }
    }
    // One spike so some boxes have outliers.
    rows[0].metrics.as_mut().unwrap().final_avg_reward = 40.0;
    SweepResult { rows }
}

/// Inclusive-method quartiles, written out independently of the library.
fn quartiles(mut v: Vec<f64>) -> (f64, f64, f64) {
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let (i, f) = (h.floor() as usize, h.fract());
        if i + 1 < v.len() {
            v[i] * (1.0 - f) + v[i + 1] * f
        } else {
            v[i]
        }
    };
    (q(0.25), q(0.5), q(0.75))
}

fn median(v: Vec<f64>) -> f64 {
    quartiles(v).1
}

fn attr(node: roxmltree::Node, name: &str) -> f64 {
    node.attribute(name).unwrap().parse().unwrap()
}

#[test]
fn boxplot_geometry_matches_data() {
    let result = synthetic_result(1);
    for metric in Metric::ALL {
        let svg = boxplot_svg(&result, metric).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let plot = doc
            .descendants()
            .find(|n| n.attribute("id") == Some("plot"))
            .unwrap();
        assert_eq!(plot.attribute("data-metric"), Some(metric.name()));
        let (y0, y1) = (attr(plot, "data-y-min"), attr(plot, "data-y-max"));
        let (top, bottom) = (attr(plot, "data-px-top"), attr(plot, "data-px-bottom"));
        let value = |px: f64| y0 + (bottom - px) / (bottom - top) * (y1 - y0);
        let tol = 2e-3 * (y1 - y0) / (bottom - top);

        let boxes: Vec<_> = plot
            .children()
            .filter(|n| n.attribute("class") == Some("box"))
            .collect();
        assert_eq!(boxes.len(), 4);
        for b in boxes {
            let variant = b.attribute("data-variant").unwrap();
            let setting = b.attribute("data-setting").unwrap();
            let beta: f64 = setting
                .split_whitespace()
                .find_map(|t| t.strip_prefix("b="))
                .unwrap()
                .parse()
                .unwrap();
            let data: Vec<f64> = result
                .rows
                .iter()
                .filter(|r| r.variant.as_str() == variant && r.beta == beta)
                .filter_map(|r| r.metrics.as_ref().map(|m| metric.of(m)))
                .collect();
            let (q1, med, q3) = quartiles(data.clone());

            let rect = b
                .children()
                .find(|n| n.attribute("class") == Some("iqr"))
                .unwrap();
            let rect_top = attr(rect, "y");
            assert!((value(rect_top) - q3).abs() < tol, "{metric} {variant} q3");
            assert!(
                (value(rect_top + attr(rect, "height")) - q1).abs() < tol,
                "{metric} {variant} q1"
            );
            let m = b
                .children()
                .find(|n| n.attribute("class") == Some("median"))
                .unwrap();
            assert!(
                (value(attr(m, "y1")) - med).abs() < tol,
                "{metric} {variant} median"
            );

            let fence = 1.5 * (q3 - q1);
            let expected_outliers = data
                .iter()
                .filter(|x| **x < q1 - fence || **x > q3 + fence)
                .count();
            let drawn = b
                .children()
                .filter(|n| n.attribute("class") == Some("outlier"))
                .count();
            assert_eq!(drawn, expected_outliers, "{metric} {variant}");
        }
    }
}

#[test]
fn report_round_trips_through_disk() {
    let result = synthetic_result(2);
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&result, dir.path()).unwrap();

    let reloaded = SweepResult::load_csv(&files.results_csv).unwrap();
    assert_eq!(reloaded, result);

    let mut reader = csv::Reader::from_path(&files.results_csv).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let mut by_cell: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.unwrap();
        if &rec[col("failed")] == "true" {
            assert!(rec[col("final_avg_reward")].is_empty());
            continue;
        }
        by_cell
            .entry((
                rec[col("beta")].to_string(),
                rec[col("variant")].to_string(),
            ))
            .or_default()
            .push(rec[col("final_avg_reward")].parse().unwrap());
    }

    let comparison: Value =
        serde_json::from_str(&std::fs::read_to_string(&files.comparison_json).unwrap()).unwrap();
    let entries = comparison.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for e in entries {
        let beta = e["beta"].as_f64().unwrap().to_string();
        let ak = median(by_cell[&(beta.clone(), "AK".into())].clone());
        let ka = median(by_cell[&(beta, "KA".into())].clone());
        let got = e["median_delta"]["final_avg_reward"].as_f64().unwrap();
        assert!((got - (ak - ka)).abs() < 1e-12, "{got} vs {}", ak - ka);
    }
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(&files.summary_json).unwrap()).unwrap();
    assert!(!summary.as_array().unwrap().is_empty());
}

#[test]
fn all_failed_setting_has_null_delta() {
    let mut result = synthetic_result(3);
    for r in result
        .rows
        .iter_mut()
        .filter(|r| r.variant == Variant::KA && r.beta == 2.0)
    {
        r.metrics = None;
        r.failed = true;
        r.failed_stage = Some("kd".into());
    }
    let cmp = serde_json::to_value(report::compare(&result).unwrap()).unwrap();
    for e in cmp.as_array().unwrap() {
        let delta = &e["median_delta"]["overall_recall"];
        assert_eq!(delta.is_null(), e["beta"] == 2.0, "{e}");
    }
}
