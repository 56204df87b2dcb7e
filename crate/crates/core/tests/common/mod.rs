use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

pub const FIGURE_PRESETS: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

/// Every file in `dir` by name.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn expected_header(name: &str) -> Option<&'static str> {
    const TABLES: [(&str, &str); 6] = [
        ("_negated_trajectory.csv", "x,re_alpha,im_alpha,re_beta,im_beta,s0,s1,s2,s3"),
        ("_trajectory.csv", "x,re_alpha,im_alpha,re_beta,im_beta,s0,s1,s2,s3"),
        ("_bloch.csv", "x,s0,s1,s2,s3"),
        ("_cone.csv", "x,sbar1,sbar2,sbar3"),
        ("_negated_wave.csv", "x,psi_envelope,psi_oracle,epsilon"),
        ("_wave.csv", "x,psi_envelope,psi_oracle,epsilon"),
    ];
    TABLES.iter().find(|(suffix, _)| name.ends_with(suffix)).map(|(_, h)| *h)
}

/// Checks one output file against its schema; returns a description of the
/// first violation.
pub fn check_file(name: &str, body: &[u8]) -> Result<(), String> {
    let text = std::str::from_utf8(body).map_err(|e| format!("{name}: {e}"))?;
    if text.is_empty() {
        return Err(format!("{name}: empty"));
    }
    if name.ends_with("_summary.json") {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("{name}: {e}"))?;
        for key in ["scenario", "k", "warnings"] {
            if v.get(key).is_none() {
                return Err(format!("{name}: missing `{key}`"));
            }
        }
        if !v["warnings"].is_array() || !v["k"].is_number() {
            return Err(format!("{name}: wrong field types"));
        }
        return Ok(());
    }
    let header = expected_header(name).ok_or_else(|| format!("{name}: unexpected file"))?;
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(format!("{name}: header mismatch"));
    }
    let cols = header.split(',').count();
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(format!("{name}: row {} has {} fields", i + 1, fields.len()));
        }
        for f in fields {
            match f.parse::<f64>() {
                Ok(v) if v.is_finite() => {}
                _ => return Err(format!("{name}: row {} has non-numeric `{f}`", i + 1)),
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(format!("{name}: no rows"));
    }
    Ok(())
}
