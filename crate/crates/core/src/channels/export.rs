use std::fmt::Write;

use serde_json::{json, Value};

use super::{to_kraus, BlpReport, SuperMap};
use crate::qcore::CMatrix;

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect()))
            .collect(),
    )
}

/// One record per map: row-major superoperator as `[re, im]` pairs, Kraus
/// operators (empty when the map is not CP), and the smallest Choi eigenvalue.
pub fn channel_json(maps: &[SuperMap]) -> String {
    let records: Vec<Value> = maps
        .iter()
        .map(|m| {
            let kraus = to_kraus(m).map(|k| k.ops).unwrap_or_default();
            json!({
                "t": m.t,
                "superop": matrix_json(&m.matrix),
                "kraus": kraus.iter().map(matrix_json).collect::<Vec<_>>(),
                "choi_min_eig": m.min_choi_eigenvalue(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("plain JSON values serialise")
}

pub fn blp_csv(report: &BlpReport) -> String {
    let mut out = String::from("t,d_opt,sigma\n");
    for ((t, d), s) in report.times.iter().zip(&report.d).zip(&report.sigma) {
        writeln!(out, "{t:.16e},{d:.16e},{s:.16e}").expect("writing to a String");
    }
    out
}

pub fn blp_summary_json(report: &BlpReport) -> String {
    let pair = match report.pair.bloch_vectors() {
        Some((a, b)) => json!({ "p": report.pair.p, "rho1_bloch": a, "rho2_bloch": b }),
        None => json!({
            "p": report.pair.p,
            "rho1": matrix_json(report.pair.rho1.matrix()),
            "rho2": matrix_json(report.pair.rho2.matrix()),
        }),
    };
    serde_json::to_string_pretty(&json!({ "N": report.n, "pair": pair })).expect("plain JSON values serialise")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{blp_measure, fibonacci_pairs, BlpOptions};
    use crate::qcore::C64;

    #[test]
    fn channel_json_shape() {
        let maps = vec![
            SuperMap::identity(2, 0.0),
            SuperMap::qubit_coherence(C64::new(0.5, 0.1), 0.9, 0.5, 1.0),
        ];
        let v: Value = serde_json::from_str(&channel_json(&maps)).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 2);
        assert_eq!(arr[1]["t"], 1.0);
        assert_eq!(arr[1]["superop"].as_array().unwrap().len(), 4);
        assert_eq!(arr[1]["superop"][2][2][1], 0.1);
        assert_eq!(arr[0]["kraus"].as_array().unwrap().len(), 1);
        assert!(arr[1]["choi_min_eig"].as_f64().unwrap() > -1e-12);
    }

    #[test]
    fn blp_outputs() {
        let maps: Vec<SuperMap> = (0..=100)
            .map(|k| {
                let t = k as f64 * 0.01;
                SuperMap::qubit_coherence(C64::new((3.0 * t).cos(), 0.0), 1.0, 0.5, t)
            })
            .collect();
        let r = blp_measure(&maps, &fibonacci_pairs(10), BlpOptions::default()).unwrap();
        let csv = blp_csv(&r);
        assert!(csv.starts_with("t,d_opt,sigma\n"));
        assert_eq!(csv.lines().count(), 102);
        let s: Value = serde_json::from_str(&blp_summary_json(&r)).unwrap();
        assert!((s["N"].as_f64().unwrap() - r.n).abs() < 1e-15);
        assert_eq!(s["pair"]["p"], 0.5);
        assert_eq!(s["pair"]["rho1_bloch"].as_array().unwrap().len(), 3);
    }
}
