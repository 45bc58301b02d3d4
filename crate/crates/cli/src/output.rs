//! Deterministic serialization of results.

use serde::Serialize;
use sbm_chroma::CStarResult64;

#[derive(Serialize)]
struct CertificateEntry {
    weight: f64,
    point: Vec<f64>,
}

#[derive(Serialize)]
struct CStarJson {
    lower: f64,
    upper: f64,
    regime: String,
    certificate: Vec<CertificateEntry>,
}

/// `{lower, upper, regime, certificate}` as a single JSON line.
pub fn cstar_json(result: &CStarResult64) -> String {
    let payload = CStarJson {
        lower: result.lower,
        upper: result.upper,
        regime: result.regime.to_string(),
        certificate: result
            .certificate
            .iter()
            .map(|(weight, point)| CertificateEntry {
                weight: *weight,
                point: point.as_slice().to_vec(),
            })
            .collect(),
    };
    serde_json::to_string(&payload).expect("serializable")
}

/// Boundary rows as `c1,c2,binding_subset` CSV.
pub fn region_csv(rows: &[(f64, f64, sbm_chroma::SubsetIndex)]) -> String {
    let mut out = String::from("c1,c2,binding_subset\n");
    for (c1, c2, binding) in rows {
        out.push_str(&format!("{c1},{c2},{binding}\n"));
    }
    out
}
