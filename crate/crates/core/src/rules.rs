//! The classification's conclusions as data: decision tables for the
//! packet size N and twist-group order per case label, and the
//! restriction-count tables, both queryable and cross-validated against
//! the computational path. Stored as JSON data files with provenance
//! strings so a reviewer can diff them row by row.

use std::collections::BTreeMap;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gsp4::{classify, CaseLabel, ClassReport, Gsp4Param, ALL_LABELS};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuleEntry {
    pub label: String,
    #[serde(default)]
    pub conditions: BTreeMap<String, String>,
    pub n: usize,
    pub i_order: usize,
    pub i_generators: String,
    pub provenance: String,
}

#[derive(Deserialize)]
struct RuleFile {
    rules: Vec<RuleEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JhEntry {
    pub family: String,
    pub condition: String,
    pub count: usize,
    pub provenance: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JhTable {
    pub title: String,
    pub rows: Vec<JhEntry>,
}

#[derive(Deserialize)]
struct JhFile {
    tables: Vec<JhTable>,
}

pub static PACKET_RULES: Lazy<Vec<RuleEntry>> = Lazy::new(|| {
    let file: RuleFile =
        serde_json::from_str(include_str!("../data/packet_rules.json")).expect("rules parse");
    for r in &file.rules {
        assert!(
            [1, 2, 4, 8, 16].contains(&r.n),
            "rule N outside the allowed range"
        );
        r.label.parse::<CaseLabel>().expect("rule label known");
    }
    file.rules
});

pub static JH_TABLES: Lazy<Vec<JhTable>> = Lazy::new(|| {
    let file: JhFile =
        serde_json::from_str(include_str!("../data/jh_tables.json")).expect("tables parse");
    for t in &file.tables {
        for row in &t.rows {
            assert!([1, 2, 4, 8, 16].contains(&row.count));
        }
    }
    file.tables
});

/// Table lookup: predicted (N, |I|, I-generator description) for a case
/// label under the given side-condition bindings.
pub fn predict_from_case(
    label: CaseLabel,
    bindings: &BTreeMap<String, String>,
) -> Result<(usize, usize, String)> {
    let name = label.to_string();
    let matching: Vec<&RuleEntry> = PACKET_RULES
        .iter()
        .filter(|r| r.label == name)
        .filter(|r| {
            r.conditions
                .iter()
                .all(|(k, v)| bindings.get(k).map(|b| b == v).unwrap_or(false))
        })
        .collect();
    match matching.len() {
        0 => {
            // Distinguish an unbound condition from a truly unknown row.
            let needs: Vec<String> = PACKET_RULES
                .iter()
                .filter(|r| r.label == name)
                .flat_map(|r| r.conditions.keys().cloned())
                .filter(|k| !bindings.contains_key(k))
                .collect();
            if let Some(k) = needs.first() {
                Err(Error::UnboundCondition(k.clone()))
            } else {
                Err(Error::NoMatchingRow(format!("{name} with {bindings:?}")))
            }
        }
        1 => {
            let r = matching[0];
            Ok((r.n, r.i_order, r.i_generators.clone()))
        }
        _ => Err(Error::Invariant(format!(
            "ambiguous rule rows for {name} with {bindings:?}"
        ))),
    }
}

/// Restriction-count lookup by representation family and condition row.
pub fn jh_lookup(family: &str, condition: &str) -> Result<usize> {
    for t in JH_TABLES.iter() {
        for row in &t.rows {
            if row.family == family && row.condition == condition {
                return Ok(row.count);
            }
        }
    }
    // Families with an "otherwise" row fall back to it when the concrete
    // condition is not listed.
    for t in JH_TABLES.iter() {
        for row in &t.rows {
            if row.family == family && row.condition == "otherwise" {
                return Ok(row.count);
            }
        }
    }
    Err(Error::NoMatchingRow(format!("{family} / {condition}")))
}

/// Every case label must be covered by at least one rule, and the binding
/// domains the classifier can emit must each match exactly one row.
pub fn exhaustiveness_check() -> Result<()> {
    for label in ALL_LABELS {
        let name = label.to_string();
        if !PACKET_RULES.iter().any(|r| r.label == name) {
            return Err(Error::Invariant(format!("no rule for label {name}")));
        }
        for bindings in binding_domain(label) {
            predict_from_case(label, &bindings)?;
        }
    }
    Ok(())
}

/// All side-condition bindings the classifier can emit per label.
pub fn binding_domain(label: CaseLabel) -> Vec<BTreeMap<String, String>> {
    fn binds(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|&(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }
    match label {
        CaseLabel::IIIb2 => ["0", "1", "3"]
            .iter()
            .map(|c| binds(&[("pi_dihedral", c)]))
            .collect(),
        CaseLabel::DsII => ["1", "3"]
            .iter()
            .map(|c| binds(&[("sigma_dihedral", c)]))
            .collect(),
        CaseLabel::DsIIIa => ["true", "false"]
            .iter()
            .map(|c| binds(&[("same_field", c)]))
            .collect(),
        CaseLabel::DsIIIb => ["0", "1", "3"]
            .iter()
            .map(|c| binds(&[("phi1_dihedral", c)]))
            .collect(),
        CaseLabel::NdsSiegelA => ["0", "1", "3"]
            .iter()
            .map(|c| binds(&[("sigma_dihedral", c)]))
            .collect(),
        CaseLabel::NdsSiegelB => {
            let mut out = Vec::new();
            for chi in ["trivial", "new"] {
                for c in ["0", "1", "3"] {
                    out.push(binds(&[("chi", chi), ("sigma_dihedral", c)]));
                }
            }
            for c in ["1", "3"] {
                out.push(binds(&[("chi", "in_twists"), ("sigma_dihedral", c)]));
            }
            out
        }
        CaseLabel::NdsKlingen => ["true", "false"]
            .iter()
            .map(|c| binds(&[("dihedral_det", c)]))
            .collect(),
        CaseLabel::NdsBorel => ["0", "1", "3"]
            .iter()
            .map(|c| binds(&[("quad_count", c)]))
            .collect(),
        _ => vec![BTreeMap::new()],
    }
}

/// The outcome of checking one parameter against the prediction tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossReport {
    pub report: ClassReport,
    pub predicted_n: usize,
    pub predicted_i_order: usize,
    pub predicted_i_generators: String,
    pub n_matches: bool,
    pub i_matches: bool,
}

impl CrossReport {
    pub fn ok(&self) -> bool {
        self.n_matches && self.i_matches && self.report.all_consistent()
    }
}

/// Classify, bind, predict, compare. Mismatches are data, not errors.
pub fn cross_validate(param: &Gsp4Param) -> Result<CrossReport> {
    let report = classify(param)?;
    let (pn, pi, gens) = predict_from_case(report.case_label, &report.bindings)?;
    Ok(CrossReport {
        n_matches: pn == report.n_packet,
        i_matches: pi == report.i_order,
        predicted_n: pn,
        predicted_i_order: pi,
        predicted_i_generators: gens,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|&(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn predictions_match_named_rows() {
        assert_eq!(
            predict_from_case(CaseLabel::II, &b(&[])).unwrap(),
            (2, 2, "<w_E>".to_string())
        );
        assert_eq!(
            predict_from_case(CaseLabel::IIIb2, &b(&[("pi_dihedral", "3")]))
                .unwrap()
                .0,
            16
        );
        assert_eq!(
            predict_from_case(CaseLabel::DsIIIb, &b(&[("phi1_dihedral", "0")]))
                .unwrap()
                .0,
            4
        );
        assert_eq!(
            predict_from_case(CaseLabel::IIIa3, &b(&[])).unwrap().0,
            4
        );
    }

    #[test]
    fn unbound_condition_is_reported() {
        assert!(matches!(
            predict_from_case(CaseLabel::DsII, &b(&[])),
            Err(Error::UnboundCondition(_))
        ));
    }

    #[test]
    fn jh_rows() {
        assert_eq!(
            jh_lookup("St(chi,tau)", "tau dihedral w.r.t. 1 quad. ext.").unwrap(),
            2
        );
        assert_eq!(jh_lookup("St_PGSp4*mu", "-").unwrap(), 1);
        assert_eq!(
            jh_lookup("J_B(chi1,chi2;chi)", "chi1 != chi2 nontrivial quadratic").unwrap(),
            4
        );
        assert_eq!(jh_lookup("St(tau,mu)", "some other condition").unwrap(), 1);
        assert!(jh_lookup("no such family", "x").is_err());
    }

    #[test]
    fn rules_are_exhaustive() {
        exhaustiveness_check().unwrap();
    }
}
