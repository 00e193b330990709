//! The invariant suite shared by the `verify` command and the acceptance
//! tests: exact character-theory checks over the whole catalog, the
//! exterior-square identity for induced representations, the parameter
//! corpus with its two-path cardinality check, the primitivity
//! equivalence, and the restriction-lemma simulator.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charalg::{asai_lift, induce, restrict, VirtualChar};
use crate::cyclo::Cyclo;
use crate::error::Result;
use crate::group::{catalog, char_table, GroupTable, Subgroup};
use crate::gsp4::{enumerate_wd_dim, valid_sims, Gsp4Param, ResidueChar};
use crate::rules::{cross_validate, CrossReport};
use crate::wd::WdRep;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub checks: usize,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, checks: usize, failures: Vec<String>) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            pass: failures.is_empty(),
            checks,
            detail: if failures.is_empty() {
                format!("{checks} checks")
            } else {
                format!("{} failures: {}", failures.len(), failures.join("; "))
            },
        }
    }
}

fn subgroups_of(g: &Arc<GroupTable>) -> Vec<Subgroup> {
    g.subgroup_lattice()
        .iter()
        .map(|d| Subgroup {
            parent: g.clone(),
            data: d.clone(),
        })
        .collect()
}

/// Row and column orthogonality over the catalog, exactly.
pub fn orthogonality_checks(max_order: usize) -> CheckResult {
    let mut failures = Vec::new();
    let mut checks = 0usize;
    for g in catalog::catalog_groups(max_order) {
        let t = char_table(&g);
        let k = t.n_classes();
        for i in 0..k {
            for j in 0..k {
                // Rows.
                let ip = t.inner_product(&t.irreps[i].values, &t.irreps[j].values);
                let expect = if i == j { Cyclo::one() } else { Cyclo::zero() };
                checks += 1;
                if ip != expect {
                    failures.push(format!("{} rows ({i},{j})", g.name()));
                }
                // Columns: sum over irreps of chi(g) conj(chi(h)).
                let mut acc = Cyclo::zero();
                for r in 0..t.n_irreps() {
                    acc = &acc + &(&t.irreps[r].values[i] * &t.irreps[r].values[j].conj());
                }
                let expect = if i == j {
                    Cyclo::from_int((g.order() / t.classes.sizes[i]) as i64)
                } else {
                    Cyclo::zero()
                };
                checks += 1;
                if acc != expect {
                    failures.push(format!("{} cols ({i},{j})", g.name()));
                }
            }
        }
    }
    CheckResult::new("orthogonality", checks, failures)
}

/// Frobenius reciprocity with both sides computed independently, over
/// every catalog (group, subgroup) pair and every pair of irreducibles.
pub fn frobenius_checks(max_order: usize) -> CheckResult {
    let groups = catalog::catalog_groups(max_order);
    let results: Vec<(usize, Vec<String>)> = groups
        .par_iter()
        .map(|g| {
            let gt = char_table(g);
            let mut checks = 0usize;
            let mut failures = Vec::new();
            for h in subgroups_of(g) {
                let (ht, _) = h.table();
                let htab = char_table(&ht);
                for hi in 0..htab.n_irreps() {
                    let chi = VirtualChar::irreducible(&htab, hi).unwrap();
                    let ind = induce(&h, &chi).unwrap();
                    for gi in 0..gt.n_irreps() {
                        let psi = VirtualChar::irreducible(&gt, gi).unwrap();
                        let res = restrict(&h, &psi).unwrap();
                        checks += 1;
                        if ind.coeffs[gi] != res.coeffs[hi] {
                            failures.push(format!(
                                "{} |H|={} irreps ({hi},{gi})",
                                g.name(),
                                h.order()
                            ));
                        }
                    }
                }
            }
            (checks, failures)
        })
        .collect();
    let checks = results.iter().map(|r| r.0).sum();
    let failures = results.into_iter().flat_map(|r| r.1).collect();
    CheckResult::new("frobenius_reciprocity", checks, failures)
}

/// Mackey decomposition Res_K Ind_H chi over every catalog (G, H, K)
/// triple with |G| <= max_order and every irreducible chi of H.
pub fn mackey_checks(max_order: usize) -> CheckResult {
    let groups = catalog::catalog_groups(max_order);
    let results: Vec<(usize, Vec<String>)> = groups
        .par_iter()
        .map(|g| {
            let subs = subgroups_of(g);
            let mut checks = 0usize;
            let mut failures = Vec::new();
            for h in &subs {
                let (ht, _) = h.table();
                let htab = char_table(&ht);
                let inductions: Vec<VirtualChar> = (0..htab.n_irreps())
                    .map(|hi| {
                        induce(h, &VirtualChar::irreducible(&htab, hi).unwrap()).unwrap()
                    })
                    .collect();
                for k in &subs {
                    let (kt, _) = k.table();
                    let ktab = char_table(&kt);
                    let dcosets = h.double_cosets(k);
                    for (hi, ind) in inductions.iter().enumerate() {
                        let chi = VirtualChar::irreducible(&htab, hi).unwrap();
                        let lhs = restrict(k, ind).unwrap();
                        let mut rhs = VirtualChar::zero(&ktab);
                        for &x in &dcosets {
                            let hx = h.conjugate(x);
                            let j = k.intersect(&hx);
                            let j_in_k = kt
                                .subgroup(
                                    j.members()
                                        .iter()
                                        .map(|&m| k.from_parent(m as usize) as u16)
                                        .collect(),
                                )
                                .unwrap();
                            let (jt, _) = j_in_k.table();
                            let jtab = char_table(&jt);
                            let chivals = chi.values();
                            let jcl = jt.classes();
                            let vals: Vec<Cyclo> = (0..jcl.len())
                                .map(|c| {
                                    let y = k.to_parent(j_in_k.to_parent(jcl.reps[c] as usize));
                                    let back = g.mul(g.mul(g.inv(x), y), x);
                                    let hc =
                                        ht.classes().class_of[h.from_parent(back)] as usize;
                                    chivals[hc].clone()
                                })
                                .collect();
                            let chij = VirtualChar::from_values(&jtab, &vals).unwrap();
                            rhs = rhs.add(&induce(&j_in_k, &chij).unwrap()).unwrap();
                        }
                        checks += 1;
                        if lhs.coeffs != rhs.coeffs {
                            failures.push(format!(
                                "{} |H|={} |K|={} chi={hi}",
                                g.name(),
                                h.order(),
                                k.order()
                            ));
                        }
                    }
                }
            }
            (checks, failures)
        })
        .collect();
    let checks = results.iter().map(|r| r.0).sum();
    let failures = results.into_iter().flat_map(|r| r.1).take(8).collect();
    CheckResult::new("mackey_decomposition", checks, failures)
}

/// The exterior-square identity for induced representations:
/// wedge2(Ind sigma) = Ind(det sigma) + AsaiLift(sigma), for every
/// 2-dimensional irreducible sigma of every index-2 subgroup.
pub fn wedge_identity_checks(max_order: usize) -> CheckResult {
    let groups = catalog::catalog_groups(max_order);
    let results: Vec<(usize, Vec<String>)> = groups
        .par_iter()
        .map(|g| {
            let mut checks = 0usize;
            let mut failures = Vec::new();
            for h in g.index2_subgroups() {
                let (ht, _) = h.table();
                let htab = char_table(&ht);
                for i in 0..htab.n_irreps() {
                    if htab.degree(i) != 2 {
                        continue;
                    }
                    let sigma = VirtualChar::irreducible(&htab, i).unwrap();
                    let ind = induce(&h, &sigma).unwrap();
                    let lhs = ind.wedge2().unwrap();
                    let det = sigma.det_char().unwrap();
                    let rhs = induce(&h, &VirtualChar::irreducible(&htab, det).unwrap())
                        .unwrap()
                        .add(&asai_lift(&h, &sigma).unwrap())
                        .unwrap();
                    checks += 1;
                    if lhs.coeffs != rhs.coeffs {
                        failures.push(format!("{} |H|={} sigma={i}", g.name(), h.order()));
                    }
                }
            }
            (checks, failures)
        })
        .collect();
    let checks = results.iter().map(|r| r.0).sum();
    let failures = results.into_iter().flat_map(|r| r.1).collect();
    CheckResult::new("wedge_of_induced", checks, failures)
}

fn canonical_terms(rep: &WdRep) -> Vec<(u32, usize, i64)> {
    rep.terms().iter().map(|t| (t.n, t.irrep, t.mult)).collect()
}

/// Enumerate the corpus of valid parameters over one group, up to
/// twist-equivalence (phi, sim) ~ (phi.nu, sim.nu^2).
pub fn group_corpus(g: &Arc<GroupTable>, residue: ResidueChar) -> Vec<Gsp4Param> {
    let table = char_table(g);
    let linears: Vec<usize> = (0..table.n_linear()).collect();
    let mut out = Vec::new();
    for terms in enumerate_wd_dim(&table, 4) {
        let phi = WdRep::new(&table, terms).expect("enumerated terms valid");
        let key = canonical_terms(&phi);
        // Keep only the minimum of the twist orbit.
        let mut is_min = true;
        let mut stabilizer = Vec::new();
        for &nu in &linears {
            let twisted = phi.twist(nu);
            let tkey = canonical_terms(&twisted);
            if tkey < key {
                is_min = false;
                break;
            }
            if tkey == key {
                stabilizer.push(nu);
            }
        }
        if !is_min {
            continue;
        }
        let sims = match valid_sims(&phi) {
            Ok(s) => s,
            Err(_) => continue,
        };
        for &sim in &sims {
            // Dedupe sims under the stabilizer action sim -> sim nu^2.
            let orbit_min = stabilizer
                .iter()
                .map(|&nu| {
                    let nu2 = table.linear_product(nu, nu);
                    table.linear_product(sim, nu2)
                })
                .min()
                .unwrap_or(sim);
            if sim != orbit_min {
                continue;
            }
            out.push(Gsp4Param {
                phi: phi.clone(),
                sim,
                residue,
            });
        }
    }
    out
}

/// The full corpus over the catalog, cross-validated, sorted by key.
pub fn corpus(max_order: usize) -> Result<Vec<CrossReport>> {
    let groups = catalog::catalog_groups(max_order);
    let nested: Vec<Vec<CrossReport>> = groups
        .par_iter()
        .map(|g| {
            group_corpus(g, ResidueChar::Unspecified)
                .iter()
                .map(|p| cross_validate(p).expect("corpus parameter classifies"))
                .collect()
        })
        .collect();
    let mut flat: Vec<CrossReport> = nested.into_iter().flatten().collect();
    flat.sort_by_key(|r| r.report.param_key());
    Ok(flat)
}

/// Cardinality identity (both paths agree) over an already-built corpus.
pub fn corpus_checks(reports: &[CrossReport]) -> Vec<CheckResult> {
    let mut path_failures = Vec::new();
    let mut range_failures = Vec::new();
    let mut odd_failures = Vec::new();
    let mut rule_failures = Vec::new();
    for r in reports {
        let key = r.report.param_key();
        if !r.report.all_consistent() {
            path_failures.push(key.clone());
        }
        if ![1, 2, 4, 8, 16].contains(&r.report.n_packet) {
            range_failures.push(key.clone());
        }
        if !r.n_matches || !r.i_matches {
            rule_failures.push(format!(
                "{key}: predicted ({}, {}), computed ({}, {})",
                r.predicted_n, r.predicted_i_order, r.report.n_packet, r.report.i_order
            ));
        }
    }
    // Over groups modelling odd residue characteristic, N stays <= 8.
    for r in reports {
        let g = catalog::by_name(&r.report.group);
        if let Ok(g) = g {
            if g.models_odd_residue() && r.report.n_packet > 8 {
                odd_failures.push(r.report.param_key());
            }
        }
    }
    vec![
        CheckResult::new("corpus_path_agreement", reports.len(), path_failures),
        CheckResult::new("corpus_n_range", reports.len(), range_failures),
        CheckResult::new("corpus_odd_model_range", reports.len(), odd_failures),
        CheckResult::new("corpus_rule_match", reports.len(), rule_failures),
    ]
}

/// Primitivity equivalence: for every irreducible pure-Weil parameter,
/// std(phi) is irreducible iff no index-2 subgroup induces phi. The two
/// sides are computed independently.
pub fn primitivity_checks(max_order: usize) -> CheckResult {
    let mut checks = 0usize;
    let mut failures = Vec::new();
    for g in catalog::catalog_groups(max_order) {
        let table = char_table(&g);
        for rho in 0..table.n_irreps() {
            if table.degree(rho) != 4 {
                continue;
            }
            let phi = WdRep::single(&table, rho, 1).unwrap();
            let sims = valid_sims(&phi).unwrap_or_default();
            for sim in sims {
                let param = Gsp4Param {
                    phi: phi.clone(),
                    sim,
                    residue: ResidueChar::Unspecified,
                };
                let std = crate::gsp4::std_of(&param).expect("std of a valid parameter");
                let std_irreducible = std.constituent_count() == 1;
                let induced = g.index2_subgroups().iter().any(|h| {
                    let chi = VirtualChar::irreducible(&table, rho).unwrap();
                    let res = restrict(h, &chi).unwrap();
                    res.coeffs.iter().sum::<i64>() > 1
                });
                checks += 1;
                if std_irreducible == induced {
                    failures.push(format!("{} irrep {rho} sim {sim}", g.name()));
                }
            }
        }
    }
    CheckResult::new("primitivity_equivalence", checks, failures)
}

/// Restriction-lemma simulator over every catalog pair (G, H normal with
/// elementary abelian 2-quotient).
pub fn clifford_checks(max_order: usize) -> CheckResult {
    let groups = catalog::catalog_groups(max_order);
    let results: Vec<(usize, Vec<String>)> = groups
        .par_iter()
        .map(|g| {
            let mut checks = 0usize;
            let mut failures = Vec::new();
            for h in crate::clifford::candidate_pairs(g) {
                let report = crate::clifford::restrict_analyze(g, &h)
                    .expect("candidate pair analyzes");
                checks += report.per_irrep.len();
                for entry in &report.per_irrep {
                    if let Some(orbit) = &entry.orbit {
                        if !(orbit.count_matches_twists && orbit.simply_transitive) {
                            failures.push(format!(
                                "{} |H|={} irrep {}",
                                g.name(),
                                h.order(),
                                entry.irrep
                            ));
                        }
                    }
                }
                for &(i, j, ok) in &report.shared_pairs {
                    checks += 1;
                    if !ok {
                        failures.push(format!("{} |H|={} pair ({i},{j})", g.name(), h.order()));
                    }
                }
            }
            (checks, failures)
        })
        .collect();
    let checks = results.iter().map(|r| r.0).sum();
    let failures = results.into_iter().flat_map(|r| r.1).collect();
    CheckResult::new("clifford_restriction_lemmas", checks, failures)
}

/// The full named-check suite at the given group-order bound.
pub fn verify_suite(max_order: usize) -> Result<Vec<CheckResult>> {
    let mut out = vec![
        orthogonality_checks(max_order),
        frobenius_checks(max_order),
        mackey_checks(max_order.min(32)),
        wedge_identity_checks(max_order),
        primitivity_checks(max_order),
        clifford_checks(max_order),
    ];
    let reports = corpus(max_order)?;
    out.extend(corpus_checks(&reports));
    out.push(match crate::rules::exhaustiveness_check() {
        Ok(()) => CheckResult::new("rules_exhaustive", 1, vec![]),
        Err(e) => CheckResult::new("rules_exhaustive", 1, vec![e.to_string()]),
    });
    Ok(out)
}
