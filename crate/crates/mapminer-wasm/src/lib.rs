//! Browser demo: generate a synthetic incident log from a hidden
//! ground-truth workflow, learn the strategy HMM in the page, and explore
//! how the pruning threshold and clustering parameters reshape the map.
//!
//! Three operations are exported: [`demo_train`], [`pseudo_map_svg`] and
//! [`cluster_report`]. Each takes and returns JSON strings so the page
//! stays plain JavaScript.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use mapminer::clustering::{build_intention_map, eagle_cluster, UndirectedView};
use mapminer::error::Error;
use mapminer::eventlog::{activity_histogram, encode_cases, HistogramEntry};
use mapminer::hmm::{baum_welch, deserialize_model, HmmModel, LengthLaw, ModelDocument};
use mapminer::kmeans::kmeans_init;
use mapminer::mapbuilder::{build_pseudo_map, find_start_stop, prune_transitions, PseudoMap};
use mapminer::metrics::{network_metrics, node_metrics};
use mapminer::synthgen::{generate_log, GroundTruthSpec};

/// The hidden workflow the demo samples from: triage, investigation,
/// escalation, resolution.
fn ground_truth() -> HmmModel {
    HmmModel::new(
        vec![0.85, 0.05, 0.05, 0.05],
        vec![
            vec![0.55, 0.35, 0.05, 0.05],
            vec![0.05, 0.60, 0.15, 0.20],
            vec![0.10, 0.30, 0.55, 0.05],
            vec![0.02, 0.08, 0.02, 0.88],
        ],
        vec![
            vec![0.50, 0.42, 0.02, 0.02, 0.02, 0.005, 0.005, 0.01],
            vec![0.01, 0.03, 0.55, 0.35, 0.02, 0.02, 0.01, 0.01],
            vec![0.01, 0.01, 0.04, 0.02, 0.50, 0.40, 0.01, 0.01],
            vec![0.005, 0.005, 0.04, 0.02, 0.005, 0.005, 0.40, 0.52],
        ],
    )
    .expect("ground truth is stochastic")
}

fn ground_truth_labels() -> Vec<String> {
    [
        "Open",
        "Assignment",
        "Operator Update",
        "Analysis",
        "Reassignment",
        "Vendor Assignment",
        "Resolved",
        "Closed",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[derive(Serialize)]
struct TrainOutput {
    model: ModelDocument,
    log_likelihood: Vec<f64>,
    converged_early: bool,
    histogram: Vec<HistogramEntry>,
    cases: usize,
    events: usize,
    activities: usize,
}

fn demo_train_impl(
    states: usize,
    iterations: usize,
    seed: u64,
    cases: usize,
) -> Result<String, Error> {
    if states == 0 || cases == 0 || iterations == 0 {
        return Err(Error::Domain(
            "states, cases and iterations must be positive".into(),
        ));
    }
    let spec = GroundTruthSpec {
        model: ModelDocument::from_model(&ground_truth()),
        labels: ground_truth_labels(),
        n_cases: cases,
        length_law: LengthLaw::Geometric { p: 0.15, max: 30 },
        seed,
    };
    let log = generate_log(&spec)?;
    let sequences = encode_cases(&log);
    let init = kmeans_init(&sequences, states, seed)?;
    let (model, report) = baum_welch(&init, &sequences, iterations, 1e-6)?;

    let mut doc = ModelDocument::from_model(&model);
    doc.vocabulary = Some(log.vocabulary.to_map());
    let output = TrainOutput {
        model: doc,
        log_likelihood: report.log_likelihood_per_iteration,
        converged_early: report.converged_early,
        histogram: activity_histogram(&log)?,
        cases: log.n_cases(),
        events: log.n_events(),
        activities: log.n_activities(),
    };
    Ok(serde_json::to_string(&output)?)
}

fn load(model_json: &str) -> Result<(HmmModel, ModelDocument), Error> {
    let doc = deserialize_model(model_json)?;
    let model = doc.clone().into_model()?;
    Ok((model, doc))
}

fn build(model: &HmmModel, epsilon: f64) -> Result<PseudoMap, Error> {
    let edges = prune_transitions(&model.trans, epsilon);
    build_pseudo_map(&edges, model.n_states, epsilon)
}

fn escape_xml(raw: &str) -> String {
    raw.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Circular layout of the pruned map. Node radius grows with in-degree,
/// stroke width with transition weight; start candidates are rendered
/// green, stop candidates red.
fn pseudo_map_svg_impl(model_json: &str, epsilon: f64) -> Result<String, Error> {
    use std::fmt::Write as _;

    let (model, doc) = load(model_json)?;
    let map = build(&model, epsilon)?;
    let report = find_start_stop(&map, None, None)?;
    let vocabulary: Vec<(String, usize)> = doc
        .vocabulary
        .map(|m| m.into_iter().collect())
        .unwrap_or_default();

    let n = map.n_nodes.max(1);
    let (cx, cy, ring) = (300.0, 300.0, 220.0);
    let position = |node: usize| -> (f64, f64) {
        let angle = std::f64::consts::TAU * node as f64 / n as f64 - std::f64::consts::FRAC_PI_2;
        (cx + ring * angle.cos(), cy + ring * angle.sin())
    };
    let in_degrees = map.in_degrees();
    let radius = |node: usize| 12.0 + 3.5 * in_degrees[node] as f64;

    let mut svg = String::new();
    svg.push_str(
        "<svg viewBox=\"0 0 600 600\" xmlns=\"http://www.w3.org/2000/svg\" font-family=\"sans-serif\">\n\
         <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" \
         markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">\
         <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#666\"/></marker></defs>\n",
    );

    for edge in &map.edges {
        let width = 1.0 + 6.0 * edge.weight;
        if edge.source == edge.target {
            let (x, y) = position(edge.source);
            let r = radius(edge.source);
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"10\" fill=\"none\" stroke=\"#999\" stroke-width=\"{width:.2}\" opacity=\"0.7\"/>",
                x,
                y - r - 8.0
            );
        } else {
            let (x1, y1) = position(edge.source);
            let (x2, y2) = position(edge.target);
            let (dx, dy) = (x2 - x1, y2 - y1);
            let len = (dx * dx + dy * dy).sqrt().max(1e-9);
            let (ux, uy) = (dx / len, dy / len);
            let (sx, sy) = (x1 + ux * radius(edge.source), y1 + uy * radius(edge.source));
            let (tx, ty) = (
                x2 - ux * (radius(edge.target) + 6.0),
                y2 - uy * (radius(edge.target) + 6.0),
            );
            // Bow the edge sideways so opposite directions stay apart.
            let (mx, my) = ((sx + tx) / 2.0 - uy * 18.0, (sy + ty) / 2.0 + ux * 18.0);
            let _ = writeln!(
                svg,
                "<path d=\"M {sx:.1} {sy:.1} Q {mx:.1} {my:.1} {tx:.1} {ty:.1}\" fill=\"none\" stroke=\"#666\" stroke-width=\"{width:.2}\" opacity=\"0.75\" marker-end=\"url(#arrow)\"/>"
            );
            let _ = writeln!(
                svg,
                "<text x=\"{mx:.1}\" y=\"{my:.1}\" font-size=\"10\" fill=\"#444\" text-anchor=\"middle\">{} {:.2}</text>",
                edge.label, edge.weight
            );
        }
    }

    for node in 0..map.n_nodes {
        let (x, y) = position(node);
        let r = radius(node);
        let stroke = if report.start_candidates.contains(&node) {
            "#2e7d32"
        } else if report.stop_candidates.contains(&node) {
            "#c62828"
        } else {
            "#1a4a72"
        };
        // Tooltip: the state's three strongest activities.
        let mut top: Vec<(f64, &str)> = vocabulary
            .iter()
            .map(|(label, id)| (model.emit[node][*id], label.as_str()))
            .collect();
        top.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(b.1)));
        let tooltip: Vec<String> = top
            .iter()
            .take(3)
            .filter(|(p, _)| *p > 0.0)
            .map(|(p, label)| format!("{} {:.2}", escape_xml(label), p))
            .collect();
        let _ = writeln!(
            svg,
            "<g><title>I{node}: {}</title><circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"{r:.1}\" fill=\"#e3ecf5\" stroke=\"{stroke}\" stroke-width=\"2.5\"/>\
             <text x=\"{x:.1}\" y=\"{y:.1}\" dy=\"4\" font-size=\"12\" text-anchor=\"middle\" fill=\"#123\">I{node}</text></g>",
            tooltip.join(", ")
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[derive(Serialize)]
struct ClusterOutput {
    communities: Vec<Vec<usize>>,
    memberships: Vec<Vec<String>>,
    outliers: Vec<usize>,
    eq: f64,
    node_metrics: Vec<mapminer::metrics::NodeMetrics>,
    network: Option<mapminer::metrics::NetworkMetrics>,
    intention_map: mapminer::clustering::IntentionMap,
}

fn cluster_report_impl(
    model_json: &str,
    epsilon: f64,
    clique: usize,
    complex: usize,
) -> Result<String, Error> {
    let (model, _) = load(model_json)?;
    let map = build(&model, epsilon)?;
    let report = find_start_stop(&map, None, None)?;
    let view = UndirectedView::from_pseudo_map(&map);
    let cover = eagle_cluster(&view, clique.max(1), complex.max(1));
    let intention_map =
        build_intention_map(&map, &cover, report.selected_start, report.selected_stop)?;
    let output = ClusterOutput {
        communities: cover
            .communities
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect(),
        memberships: (0..map.n_nodes).map(|v| cover.memberships_of(v)).collect(),
        outliers: cover.outliers.iter().copied().collect(),
        eq: cover.eq,
        node_metrics: node_metrics(&view),
        network: network_metrics(&view).ok(),
        intention_map,
    };
    Ok(serde_json::to_string(&output)?)
}

/// Sample a synthetic log from the hidden workflow and learn a model on
/// it. Returns the trained model, the likelihood curve, and the activity
/// histogram as JSON.
#[wasm_bindgen]
pub fn demo_train(states: u32, iterations: u32, seed: u32, cases: u32) -> Result<String, JsValue> {
    demo_train_impl(
        states as usize,
        iterations as usize,
        seed as u64,
        cases as usize,
    )
    .map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Render the epsilon-pruned map of a model document as standalone SVG.
#[wasm_bindgen]
pub fn pseudo_map_svg(model_json: &str, epsilon: f64) -> Result<String, JsValue> {
    pseudo_map_svg_impl(model_json, epsilon).map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Cluster the pruned map into intentions and return the cover, the
/// per-node metrics and the rebuilt intention map as JSON.
#[wasm_bindgen]
pub fn cluster_report(
    model_json: &str,
    epsilon: f64,
    clique: u32,
    complex: u32,
) -> Result<String, JsValue> {
    cluster_report_impl(model_json, epsilon, clique as usize, complex as usize)
        .map_err(|e| JsValue::from_str(&e.to_string()))
}
