//! Deterministic JSON and CSV rendering of reports and branches.

use serde_json::{json, Value};
use slp_core::Complex64;

use slp_core::branch::Branch;
use slp_core::spectrum::{SpectrumKind, SpectrumReport};
use slp_core::{BcClass, BoundaryCondition, ChartPoint};

/// 17 significant digits: enough to round-trip every double exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn spectrum_json(report: &SpectrumReport) -> Value {
    match report.kind {
        SpectrumKind::WholePlane => json!({
            "kind": "whole_plane",
            "eigenvalues": [],
        }),
        SpectrumKind::Finite => json!({
            "kind": "finite",
            "eigenvalues": report.eigenvalues.iter().map(|e| json!({
                "value": complex_json(e.value),
                "analytic_mult": e.analytic_mult,
                "geometric_mult": e.geometric_mult,
                "certified": e.certified,
            })).collect::<Vec<_>>(),
            "total_multiplicity": report.total_multiplicity(),
            "char_poly_degree": report.char_poly.gamma.numeric_degree(),
        }),
    }
}

pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut out = String::from("lambda_re,lambda_im,analytic_mult,geometric_mult\n");
    if report.kind == SpectrumKind::WholePlane {
        out.push_str("# whole_plane\n");
        return out;
    }
    for e in &report.eigenvalues {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt17(e.value.re),
            fmt17(e.value.im),
            e.analytic_mult,
            e.geometric_mult
        ));
    }
    out
}

pub fn classification_json(bc: &BoundaryCondition) -> Value {
    let class = bc.classify().map(BcClass::name).unwrap_or("invalid");
    let chart = bc.normalize_to_chart().ok();
    let sa_chart = bc.self_adjoint_chart().ok();
    let mut value = json!({
        "classification": class,
        "self_adjoint": bc.is_self_adjoint(),
    });
    let map = value.as_object_mut().unwrap();
    if let Some(ChartPoint::General { chart, coords }) = &chart {
        map.insert("chart".into(), json!(chart.name()));
        map.insert(
            "coords".into(),
            Value::Array(coords.iter().map(|&z| complex_json(z)).collect()),
        );
    }
    if let Some(ChartPoint::SelfAdjoint { chart, a, z, b }) = &sa_chart {
        map.insert(
            "self_adjoint_chart".into(),
            json!({ "chart": chart.name(), "a": a, "z": complex_json(*z), "b": b }),
        );
    }
    if let Ok(p) = bc.separated_params() {
        map.insert(
            "separated".into(),
            json!({ "alpha": p.alpha, "beta": p.beta }),
        );
    }
    if let Ok(p) = bc.coupled_params() {
        map.insert(
            "coupled".into(),
            json!({
                "gamma": p.gamma,
                "K": [[p.k.e[0][0].re, p.k.e[0][1].re], [p.k.e[1][0].re, p.k.e[1][1].re]],
            }),
        );
    }
    value
}

pub fn classification_csv(bc: &BoundaryCondition) -> String {
    let class = bc.classify().map(BcClass::name).unwrap_or("invalid");
    let chart = bc
        .normalize_to_chart()
        .map(|p| p.chart().name())
        .unwrap_or("-");
    format!(
        "classification,self_adjoint,chart\n{},{},{}\n",
        class,
        bc.is_self_adjoint(),
        chart
    )
}

/// One row of branch output.
#[derive(Clone, Copy, Debug)]
pub struct BranchRow {
    pub param: f64,
    pub branch_id: u32,
    pub lambda: Complex64,
    pub analytic_mult: u32,
    pub geometric_mult: u32,
}

/// Flattens branches into rows with ids `id_offset..`, in file order.
pub fn branch_rows(branches: &[Branch], id_offset: u32) -> Vec<BranchRow> {
    let mut rows = Vec::new();
    for (b, branch) in branches.iter().enumerate() {
        for s in &branch.samples {
            rows.push(BranchRow {
                param: s.param,
                branch_id: id_offset + b as u32,
                lambda: s.lambda,
                analytic_mult: s.analytic_mult,
                geometric_mult: s.geometric_mult,
            });
        }
    }
    sort_rows(&mut rows);
    rows
}

pub fn sort_rows(rows: &mut [BranchRow]) {
    rows.sort_by(|a, b| {
        a.param
            .total_cmp(&b.param)
            .then(a.branch_id.cmp(&b.branch_id))
    });
}

pub const BRANCH_CSV_HEADER: &str =
    "param,branch_id,lambda_re,lambda_im,analytic_mult,geometric_mult";

pub fn branch_csv(rows: &[BranchRow], trailer: Option<&str>) -> String {
    let mut out = String::from(BRANCH_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt17(r.param),
            r.branch_id,
            fmt17(r.lambda.re),
            fmt17(r.lambda.im),
            r.analytic_mult,
            r.geometric_mult
        ));
    }
    if let Some(t) = trailer {
        out.push_str(t);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips() {
        for &x in &[
            0.1,
            std::f64::consts::PI,
            -1.0 / 3.0,
            1e-300,
            2.0f64.powi(-52),
        ] {
            let s = fmt17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }

    #[test]
    fn rows_sort_by_param_then_id() {
        let mk = |p: f64, id: u32| BranchRow {
            param: p,
            branch_id: id,
            lambda: Complex64::new(0.0, 0.0),
            analytic_mult: 1,
            geometric_mult: 1,
        };
        let mut rows = vec![mk(1.0, 1), mk(0.0, 1), mk(0.0, 0), mk(1.0, 0)];
        sort_rows(&mut rows);
        let order: Vec<(f64, u32)> = rows.iter().map(|r| (r.param, r.branch_id)).collect();
        assert_eq!(order, vec![(0.0, 0), (0.0, 1), (1.0, 0), (1.0, 1)]);
    }
}
