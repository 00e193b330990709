//! Symplectic-similitude parameters in dimension 4: validation, the
//! 5-dimensional standard representation, twist groups, component-group
//! sizes computed along two independent paths, the full classification
//! of parameters into discrete/non-discrete families, and lift search
//! from 5-dimensional orthogonal parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::charalg::{conjugate_irrep, restrict_linear, restrict_mults, VirtualChar};
use crate::error::{Error, Result};
use crate::group::{char_table, CharTable, GroupTable, Subgroup};
use crate::wd::{discrete_so_check, term_type, DiscreteCheck, SelfDualType, WdRep, WdTerm};

/// Declared residue characteristic of the modeled local field; used only
/// for warnings, never as a hard constraint.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidueChar {
    Two,
    Odd,
    Unspecified,
}

impl Default for ResidueChar {
    fn default() -> Self {
        ResidueChar::Unspecified
    }
}

/// A validated 4-dimensional symplectic-similitude parameter.
#[derive(Clone)]
pub struct Gsp4Param {
    pub phi: WdRep,
    /// Similitude character, as a linear irrep index.
    pub sim: usize,
    pub residue: ResidueChar,
}

impl Gsp4Param {
    pub fn table(&self) -> &Arc<CharTable> {
        &self.phi.table
    }
}

/// Determinant character of a single (irrep boxtimes S_n) term.
fn term_det(table: &Arc<CharTable>, irrep: usize, n: u32) -> Result<usize> {
    let base = VirtualChar::irreducible(table, irrep)?.det_char()?;
    let mut acc = table.trivial_index();
    for _ in 0..n {
        acc = table.linear_product(acc, base);
    }
    Ok(acc)
}

fn is_quadratic_linear(table: &CharTable, l: usize) -> bool {
    table
        .irreps[l]
        .values
        .iter()
        .all(|v| v.is_one() || *v == crate::cyclo::Cyclo::from_int(-1))
}

/// Check the alternating sim-valued pairing condition on an effective
/// 4-dimensional representation: isotypic components pair off as
/// {X, X^dual . sim}; a self-paired component of twisted-orthogonal type
/// needs even multiplicity (the leftover copy would carry a symmetric
/// form), while twisted-symplectic components are unconstrained.
fn pairing_ok(phi: &WdRep, sim: usize) -> bool {
    let table = &phi.table;
    for t in phi.terms() {
        let partner = (table.twist_index(table.dual_index(t.irrep), sim), t.n);
        if partner == (t.irrep, t.n) {
            let fs = crate::charalg::fs_indicator(table, t.irrep, Some(sim))
                .expect("indicator of an irreducible");
            debug_assert_ne!(fs, 0);
            let sign = fs * if t.n % 2 == 1 { 1 } else { -1 };
            if sign == 1 && t.mult % 2 != 0 {
                return false;
            }
        } else {
            let pm = phi
                .terms()
                .iter()
                .find(|u| (u.irrep, u.n) == partner)
                .map(|u| u.mult)
                .unwrap_or(0);
            if pm != t.mult {
                return false;
            }
        }
    }
    true
}

/// All similitude characters making `phi` a symplectic-similitude
/// parameter, in ascending linear-index order. Candidates are the linear
/// S_1-constituents of the exterior square.
pub fn valid_sims(phi: &WdRep) -> Result<Vec<usize>> {
    if !phi.is_effective() {
        return Err(Error::NotEffective);
    }
    if phi.dim() != 4 {
        return Err(Error::WrongDimension(phi.dim().max(0) as usize, 4));
    }
    let table = &phi.table;
    let wedge = phi.wedge2()?;
    let mut candidates: Vec<usize> = wedge
        .terms()
        .iter()
        .filter(|t| t.n == 1 && table.degree(t.irrep) == 1 && t.mult > 0)
        .map(|t| t.irrep)
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    Ok(candidates
        .into_iter()
        .filter(|&eta| pairing_ok(phi, eta))
        .collect())
}

/// Validate a parameter. When `sim` is omitted the unique valid similitude
/// is selected; several candidates raise `AmbiguousSim` listing them all.
pub fn validate_param(phi: &WdRep, sim: Option<usize>, residue: ResidueChar) -> Result<Gsp4Param> {
    let sims = valid_sims(phi)?;
    let sim = match sim {
        Some(s) => {
            if !sims.contains(&s) {
                return Err(Error::NotSymplectic(format!(
                    "no alternating pairing with similitude index {s} (valid: {sims:?})"
                )));
            }
            s
        }
        None => match sims.len() {
            0 => {
                return Err(Error::NotSymplectic(
                    "pairing fails for every linear constituent of the exterior square".into(),
                ))
            }
            1 => sims[0],
            _ => return Err(Error::AmbiguousSim(sims)),
        },
    };
    // det(phi) = sim^2 is implied by the pairing; keep it as a hard check.
    let det = phi.det_char()?;
    let sim2 = phi.table.linear_product(sim, sim);
    if det != sim2 {
        return Err(Error::NotSymplectic(
            "determinant is not the square of the similitude".into(),
        ));
    }
    Ok(Gsp4Param {
        phi: phi.clone(),
        sim,
        residue,
    })
}

/// The 5-dimensional standard representation sim^{-1} . wedge2(phi) - 1,
/// verified to be effective, self-dual, of trivial determinant.
pub fn std_of(param: &Gsp4Param) -> Result<WdRep> {
    let table = param.table();
    let sim_inv = table.linear_inverse(param.sim);
    let twisted = param.phi.wedge2()?.twist(sim_inv);
    let trivial = WdRep::single(table, table.trivial_index(), 1)?;
    let std = twisted.sub(&trivial)?;
    if !std.is_effective() {
        return Err(Error::Invariant(
            "standard representation has a negative multiplicity".into(),
        ));
    }
    if std.dim() != 5 {
        return Err(Error::Invariant("standard representation is not 5-dimensional".into()));
    }
    if std.dual() != std {
        return Err(Error::Invariant("standard representation is not self-dual".into()));
    }
    if std.det_char()? != table.trivial_index() {
        return Err(Error::Invariant("standard representation has nontrivial determinant".into()));
    }
    Ok(std)
}

/// The twist group I(phi): quadratic characters chi with phi . chi = phi.
/// Always a subgroup of the quadratic-character group.
pub fn i_group(param: &Gsp4Param) -> Vec<usize> {
    let table = param.table();
    let fixing: Vec<usize> = table
        .quadratic_linear_indices()
        .into_iter()
        .filter(|&l| param.phi.twist(l) == param.phi)
        .collect();
    // Closure is automatic; assert it stays a subgroup.
    for &a in &fixing {
        for &b in &fixing {
            debug_assert!(fixing.contains(&table.linear_product(a, b)));
        }
    }
    fixing
}

/// Component-group size of an odd orthogonal parameter: 2^(r-1) where r
/// counts the isotypic components that are self-dual of orthogonal type.
pub fn component_group_so(psi: &WdRep) -> Result<(usize, usize)> {
    if !psi.is_effective() {
        return Err(Error::NotEffective);
    }
    if psi.dim() % 2 == 0 {
        return Err(Error::WrongDimension(psi.dim().max(0) as usize, 5));
    }
    let r = psi
        .terms()
        .iter()
        .filter(|t| {
            let (sd, ty) = term_type(&psi.table, t.irrep, t.n, None);
            sd && ty == SelfDualType::Orthogonal
        })
        .count();
    if r == 0 {
        return Err(Error::Invariant(
            "odd orthogonal representation with no orthogonal isotypic component".into(),
        ));
    }
    Ok((r, 1usize << (r - 1)))
}

/// Size of the component group on the similitude side: 2 exactly when phi
/// is a sum of two 2-dimensional irreducible pieces whose determinants
/// both equal the similitude (including the doubled case), else 1.
pub fn a_size_gsp4(param: &Gsp4Param) -> usize {
    let table = param.table();
    let mut pieces: Vec<(usize, u32)> = Vec::new();
    for t in param.phi.terms() {
        for _ in 0..t.mult {
            pieces.push((t.irrep, t.n));
        }
    }
    if pieces.len() != 2 {
        return 1;
    }
    for &(irrep, n) in &pieces {
        if table.degree(irrep) as u32 * n != 2 {
            return 1;
        }
        match term_det(table, irrep, n) {
            Ok(d) if d == param.sim => {}
            _ => return 1,
        }
    }
    2
}

/// Packet size computed along both independent paths.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PacketSizes {
    pub r_orthogonal: usize,
    pub n_component_path: usize,
    pub a_size: usize,
    pub i_order: usize,
    pub n_twist_path: usize,
    pub paths_agree: bool,
    /// For discrete parameters, log2 N = #constituents(std) - 1.
    pub discrete_log2_ok: Option<bool>,
}

pub fn packet_size(param: &Gsp4Param) -> Result<PacketSizes> {
    let std = std_of(param)?;
    let (r, n_a) = component_group_so(&std)?;
    let a = a_size_gsp4(param);
    let i = i_group(param).len();
    let n_b = a * i;
    let discrete_log2_ok = if discrete_so_check(&std, 5) == DiscreteCheck::Discrete {
        let cons = std.constituent_count() as u32;
        Some(n_a.trailing_zeros() + 1 == cons && n_a.is_power_of_two())
    } else {
        None
    };
    Ok(PacketSizes {
        r_orthogonal: r,
        n_component_path: n_a,
        a_size: a,
        i_order: i,
        n_twist_path: n_b,
        paths_agree: n_a == n_b,
        discrete_log2_ok,
    })
}

// ---------------------------------------------------------------------------
// Classification.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, PartialOrd, Ord)]
pub enum CaseLabel {
    I,
    II,
    IIIa1,
    IIIa2,
    IIIa3,
    IIIa4,
    IIIb1,
    IIIb2,
    DsI,
    DsII,
    DsIIIa,
    DsIIIb,
    NdsSiegelA,
    NdsSiegelB,
    NdsKlingen,
    NdsBorel,
}

pub const ALL_LABELS: [CaseLabel; 16] = [
    CaseLabel::I,
    CaseLabel::II,
    CaseLabel::IIIa1,
    CaseLabel::IIIa2,
    CaseLabel::IIIa3,
    CaseLabel::IIIa4,
    CaseLabel::IIIb1,
    CaseLabel::IIIb2,
    CaseLabel::DsI,
    CaseLabel::DsII,
    CaseLabel::DsIIIa,
    CaseLabel::DsIIIb,
    CaseLabel::NdsSiegelA,
    CaseLabel::NdsSiegelB,
    CaseLabel::NdsKlingen,
    CaseLabel::NdsBorel,
];

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseLabel::I => "I",
            CaseLabel::II => "II",
            CaseLabel::IIIa1 => "III-a1",
            CaseLabel::IIIa2 => "III-a2",
            CaseLabel::IIIa3 => "III-a3",
            CaseLabel::IIIa4 => "III-a4",
            CaseLabel::IIIb1 => "III-b1",
            CaseLabel::IIIb2 => "III-b2",
            CaseLabel::DsI => "DS-i",
            CaseLabel::DsII => "DS-ii",
            CaseLabel::DsIIIa => "DS-iii-a",
            CaseLabel::DsIIIb => "DS-iii-b",
            CaseLabel::NdsSiegelA => "NDS-Siegel-a",
            CaseLabel::NdsSiegelB => "NDS-Siegel-b",
            CaseLabel::NdsKlingen => "NDS-Klingen",
            CaseLabel::NdsBorel => "NDS-Borel",
        };
        f.write_str(s)
    }
}

impl FromStr for CaseLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_LABELS
            .iter()
            .copied()
            .find(|l| l.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

/// Witnesses located during classification, reported as reproducible data.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Witnesses {
    /// Members of the index-2 subgroup E (parent indices).
    pub e_subgroup: Option<Vec<u16>>,
    /// Irreducible index of sigma on E's own table.
    pub sigma: Option<usize>,
    /// Linear index of chi on E's table (cases II and III-b).
    pub chi: Option<usize>,
    /// Members of the index-2 subgroup K of E (parent indices), case III-a.
    pub k_subgroup: Option<Vec<u16>>,
    /// Linear index of lambda on E's table (case III-b2), when found.
    pub lambda: Option<usize>,
    /// Irreducible index of pi on the parent table (case III-b2), when found.
    pub pi: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StdPiece {
    pub irrep: usize,
    pub degree: usize,
    pub n: u32,
    pub mult: i64,
    pub self_dual: bool,
    pub rep_type: SelfDualType,
}

/// The full classification/packet-size report for one parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassReport {
    pub group: String,
    pub phi_terms: Vec<WdTerm>,
    pub sim: usize,
    pub sim_candidates: Vec<usize>,
    pub residue: ResidueChar,
    pub case_label: CaseLabel,
    /// Side-condition bindings consumed by the prediction tables.
    pub bindings: BTreeMap<String, String>,
    /// "witnessed" when every binding came from explicit witnesses,
    /// "inferred" when a binding was reconstructed from the twist group.
    pub binding_source: String,
    pub std_decomposition: Vec<StdPiece>,
    pub i_phi: Vec<usize>,
    pub i_order: usize,
    pub a_phi_size: usize,
    pub a_std_size: usize,
    pub r_orthogonal: usize,
    pub n_packet: usize,
    pub witnesses: Witnesses,
    pub consistency: Vec<Check>,
    pub warnings: Vec<String>,
}

impl ClassReport {
    pub fn all_consistent(&self) -> bool {
        self.consistency.iter().all(|c| c.pass)
    }

    /// Stable sort key for corpus emission.
    pub fn param_key(&self) -> String {
        let terms: Vec<String> = self
            .phi_terms
            .iter()
            .map(|t| format!("({},{})x{}", t.irrep, t.n, t.mult))
            .collect();
        format!("{}:[{}]|sim={}", self.group, terms.join(","), self.sim)
    }
}

/// Count of nontrivial quadratic characters fixing a 2-dimensional
/// Weil-layer irreducible (its dihedral fields). S_2-type pieces have none.
fn dihedral_count(table: &Arc<CharTable>, irrep: usize, n: u32) -> usize {
    if n != 1 {
        return 0;
    }
    table
        .quadratic_linear_indices()
        .into_iter()
        .filter(|&l| l != table.trivial_index() && table.twist_index(irrep, l) == irrep)
        .count()
}

fn quadratic_nontrivial(table: &CharTable, l: usize) -> bool {
    l != table.trivial_index() && is_quadratic_linear(table, l)
}

struct IrreducibleOutcome {
    label: CaseLabel,
    bindings: BTreeMap<String, String>,
    witnessed: bool,
    witnesses: Witnesses,
    checks: Vec<Check>,
}

/// Classify an irreducible pure-Weil 4-dimensional parameter through the
/// primitive/2+3/contains-a-line trichotomy and its subdivisions.
fn classify_irreducible(
    param: &Gsp4Param,
    rho: usize,
    std: &WdRep,
    i_order: usize,
) -> Result<IrreducibleOutcome> {
    let g = &param.table().group;
    let table = param.table();
    let mut checks = Vec::new();
    let mut witnesses = Witnesses::default();

    let std_linears: Vec<usize> = std
        .terms()
        .iter()
        .filter(|t| t.n == 1 && table.degree(t.irrep) == 1)
        .map(|t| t.irrep)
        .collect();
    let std_irreducible = std.constituent_count() == 1;

    // Primitivity cross-check: std irreducible iff no index-2 restriction
    // is reducible (both directions are exercised by the corpus suite).
    // An irreducible restricts to an index-2 subgroup either irreducibly
    // or as two conjugate halves; the reducible cases witness induction.
    let index2 = g.index2_subgroups();
    let reducible_on: Vec<(Subgroup, Vec<i64>)> = index2
        .iter()
        .map(|h| {
            let mut unit = vec![0i64; table.n_irreps()];
            unit[rho] = 1;
            (h.clone(), restrict_mults(h, &unit))
        })
        .filter(|(_, res)| res.iter().sum::<i64>() == 2)
        .collect();

    if std_irreducible {
        checks.push(Check {
            name: "primitive_no_index2_witness".into(),
            pass: reducible_on.is_empty(),
            detail: format!("{} reducible index-2 restrictions", reducible_on.len()),
        });
        return Ok(IrreducibleOutcome {
            label: CaseLabel::I,
            bindings: BTreeMap::new(),
            witnessed: true,
            witnesses,
            checks,
        });
    }

    if std_linears.is_empty() {
        // Case II: induced, with sim restricting away from det sigma.
        let mut found = None;
        for (h, res) in &reducible_on {
            let (ht, _) = h.table();
            let htab = char_table(&ht);
            let halves: Vec<usize> = res
                .iter()
                .enumerate()
                .filter(|(_, &m)| m > 0)
                .map(|(i, _)| i)
                .collect();
            if halves.len() == 2 && halves.iter().all(|&i| htab.degree(i) == 2) {
                let sigma = halves[0];
                let sim_e = restrict_linear(h, param.sim);
                let det_sigma = VirtualChar::irreducible(&htab, sigma)?.det_char()?;
                let chi = htab.linear_product(sim_e, htab.linear_inverse(det_sigma));
                found = Some((h.clone(), sigma, chi, htab.clone()));
                break;
            }
        }
        let witnessed = if let Some((h, sigma, chi, htab)) = found {
            witnesses.e_subgroup = Some(h.members().to_vec());
            witnesses.sigma = Some(sigma);
            witnesses.chi = Some(chi);
            let chi_sq = htab.linear_product(chi, chi);
            checks.push(Check {
                name: "case_ii_chi_not_quadratic".into(),
                pass: chi_sq != htab.trivial_index(),
                detail: "sim|_E / det sigma must have order > 2".into(),
            });
            true
        } else {
            checks.push(Check {
                name: "case_ii_witness_found".into(),
                pass: false,
                detail: "no index-2 subgroup splits phi into two 2-dimensional halves".into(),
            });
            false
        };
        return Ok(IrreducibleOutcome {
            label: CaseLabel::II,
            bindings: BTreeMap::new(),
            witnessed,
            witnesses,
            checks,
        });
    }

    // Case III: locate E with omega_E inside std, phi = Ind_E sigma and
    // sim|_E = det sigma; subgroups are scanned in canonical member order.
    let mut chosen: Option<(Subgroup, usize)> = None;
    'outer: for (h, res) in &reducible_on {
        let omega = crate::charalg::omega_char(h)?;
        if !std_linears.contains(&omega) {
            continue;
        }
        let (ht, _) = h.table();
        let htab = char_table(&ht);
        let halves: Vec<usize> = res
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(i, _)| i)
            .collect();
        if !(halves.len() == 2 && halves.iter().all(|&i| htab.degree(i) == 2)) {
            continue;
        }
        let sim_e = restrict_linear(h, param.sim);
        for &sigma in &halves {
            let det_sigma = VirtualChar::irreducible(&htab, sigma)?.det_char()?;
            if det_sigma == sim_e {
                chosen = Some((h.clone(), sigma));
                break 'outer;
            }
        }
    }
    let (e, sigma) = chosen.ok_or_else(|| {
        Error::Invariant("case III parameter without an induced witness".into())
    })?;
    witnesses.e_subgroup = Some(e.members().to_vec());
    witnesses.sigma = Some(sigma);
    let (et, _) = e.table();
    let etab = char_table(&et);
    let tau = e.outside_rep();
    let sigma_tau = conjugate_irrep(&e, sigma, tau);

    // Case (b): sigma^tau is a linear twist of sigma.
    let twist_chars: Vec<usize> = (0..etab.n_linear())
        .filter(|&xi| etab.twist_index(sigma, xi) == sigma_tau)
        .collect();
    if !twist_chars.is_empty() {
        let fixed: Vec<usize> = twist_chars
            .iter()
            .copied()
            .filter(|&xi| conjugate_irrep(&e, xi, tau) == xi)
            .collect();
        for &xi in &twist_chars {
            checks.push(Check {
                name: "case_iii_b_chi_quadratic".into(),
                pass: etab.linear_product(xi, xi) == etab.trivial_index(),
                detail: format!("twist character {xi} must be quadratic"),
            });
        }
        if fixed.is_empty() {
            witnesses.chi = Some(twist_chars[0]);
            return Ok(IrreducibleOutcome {
                label: CaseLabel::IIIb1,
                bindings: BTreeMap::new(),
                witnessed: true,
                witnesses,
                checks,
            });
        }
        let chi = fixed[0];
        witnesses.chi = Some(chi);
        // b2 factorization phi = pi tensor Ind(lambda): lambda with
        // lambda^tau / lambda = chi and pi extending sigma lambda^{-1}.
        let gtab = table;
        let mut witnessed = false;
        let mut pi_dihedral: Option<usize> = None;
        'lam: for lam in 0..etab.n_linear() {
            let ratio = etab.linear_product(
                conjugate_irrep(&e, lam, tau),
                etab.linear_inverse(lam),
            );
            if ratio != chi {
                continue;
            }
            let target = etab.twist_index(sigma, etab.linear_inverse(lam));
            for pi in 0..gtab.n_irreps() {
                if gtab.degree(pi) != 2 {
                    continue;
                }
                let mut unit = vec![0i64; gtab.n_irreps()];
                unit[pi] = 1;
                let res = restrict_mults(&e, &unit);
                let is_target = res
                    .iter()
                    .enumerate()
                    .all(|(i, &m)| if i == target { m == 1 } else { m == 0 });
                if is_target {
                    witnesses.lambda = Some(lam);
                    witnesses.pi = Some(pi);
                    pi_dihedral = Some(dihedral_count(gtab, pi, 1));
                    witnessed = true;
                    break 'lam;
                }
            }
        }
        let count = match pi_dihedral {
            Some(c) => c,
            None => match i_order {
                4 => 0,
                8 => 1,
                16 => 3,
                other => {
                    checks.push(Check {
                        name: "case_iii_b2_twist_order".into(),
                        pass: false,
                        detail: format!("twist group of order {other} incompatible with b2"),
                    });
                    0
                }
            },
        };
        let mut bindings = BTreeMap::new();
        bindings.insert("pi_dihedral".into(), count.to_string());
        return Ok(IrreducibleOutcome {
            label: CaseLabel::IIIb2,
            bindings,
            witnessed,
            witnesses,
            checks,
        });
    }

    // Case (a): subdivide by the dihedral fields K of sigma inside E.
    let e_index2 = et.index2_subgroups();
    let mut ks: Vec<(Subgroup, Vec<u16>)> = Vec::new();
    for k in e_index2 {
        let mut unit = vec![0i64; etab.n_irreps()];
        unit[sigma] = 1;
        let res = restrict_mults(&k, &unit);
        let pieces: i64 = res.iter().sum();
        if pieces > 1 {
            let parent_members: Vec<u16> = k
                .members()
                .iter()
                .map(|&m| e.to_parent(m as usize) as u16)
                .collect();
            ks.push((k, parent_members));
        }
    }
    if ks.is_empty() {
        return Ok(IrreducibleOutcome {
            label: CaseLabel::IIIa1,
            bindings: BTreeMap::new(),
            witnessed: true,
            witnesses,
            checks,
        });
    }
    let mut best: Option<(CaseLabel, Vec<u16>)> = None;
    for (_, parent_members) in &ks {
        let sub_in_g = g.subgroup(parent_members.clone())?;
        if !sub_in_g.is_normal() {
            continue;
        }
        let (q, _) = GroupTable::quotient("Q", g, parent_members)?;
        let cyclic = (0..q.order()).any(|x| q.element_order(x) == 4);
        if cyclic {
            if best.is_none() {
                best = Some((CaseLabel::IIIa2, parent_members.clone()));
            }
        } else {
            best = Some((CaseLabel::IIIa3, parent_members.clone()));
            break;
        }
    }
    let (label, k_members) = match best {
        Some((l, m)) => (l, Some(m)),
        None => (CaseLabel::IIIa4, Some(ks[0].1.clone())),
    };
    witnesses.k_subgroup = k_members;
    Ok(IrreducibleOutcome {
        label,
        bindings: BTreeMap::new(),
        witnessed: true,
        witnesses,
        checks,
    })
}

/// Classify a validated parameter and assemble the full report.
pub fn classify(param: &Gsp4Param) -> Result<ClassReport> {
    let table = param.table();
    let g = &table.group;
    let std = std_of(param)?;
    let sizes = packet_size(param)?;
    let i_phi = i_group(param);
    let mut checks: Vec<Check> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    checks.push(Check {
        name: "paths_agree".into(),
        pass: sizes.paths_agree,
        detail: format!(
            "component path {} vs twist path {}",
            sizes.n_component_path, sizes.n_twist_path
        ),
    });
    let n = sizes.n_component_path;
    checks.push(Check {
        name: "n_in_range".into(),
        pass: [1, 2, 4, 8, 16].contains(&n),
        detail: format!("N = {n}"),
    });
    if let Some(ok) = sizes.discrete_log2_ok {
        checks.push(Check {
            name: "discrete_log2".into(),
            pass: ok,
            detail: format!(
                "log2 N + 1 = {} vs std constituents {}",
                n.trailing_zeros() + 1,
                std.constituent_count()
            ),
        });
    }
    let det = param.phi.det_char()?;
    checks.push(Check {
        name: "det_is_sim_squared".into(),
        pass: det == table.linear_product(param.sim, param.sim),
        detail: String::new(),
    });

    // Shape dispatch.
    let mut constituents: Vec<(usize, u32)> = Vec::new();
    for t in param.phi.terms() {
        for _ in 0..t.mult {
            constituents.push((t.irrep, t.n));
        }
    }
    constituents.sort_unstable();

    let mut bindings = BTreeMap::new();
    let mut witnesses = Witnesses::default();
    let mut witnessed = true;

    let label = match constituents.as_slice() {
        [(rho, 1)] if table.degree(*rho) == 4 => {
            let out = classify_irreducible(param, *rho, &std, i_phi.len())?;
            bindings = out.bindings;
            witnesses = out.witnesses;
            witnessed = out.witnessed;
            checks.extend(out.checks);
            out.label
        }
        [(mu, 4)] if table.degree(*mu) == 1 => CaseLabel::DsI,
        [(sigma, 2)] if table.degree(*sigma) == 2 => {
            let count = dihedral_count(table, *sigma, 1);
            bindings.insert("sigma_dihedral".into(), count.to_string());
            checks.push(Check {
                name: "ds_ii_sigma_dihedral".into(),
                pass: count == 1 || count == 3,
                detail: format!("sigma fixed by {count} nontrivial quadratic twists"),
            });
            CaseLabel::DsII
        }
        [x1, x2]
            if table.degree(x1.0) as u32 * x1.1 == 2 && table.degree(x2.0) as u32 * x2.1 == 2 =>
        {
            let d1 = term_det(table, x1.0, x1.1)?;
            let d2 = term_det(table, x2.0, x2.1)?;
            if x1 != x2 && d1 == param.sim && d2 == param.sim {
                // Discrete pair: twist-related or not.
                let related = x1.1 == x2.1
                    && (0..table.n_linear())
                        .any(|xi| table.twist_index(x1.0, xi) == x2.0);
                if related {
                    let count = dihedral_count(table, x1.0, x1.1);
                    bindings.insert("phi1_dihedral".into(), count.to_string());
                    CaseLabel::DsIIIb
                } else {
                    let common = table
                        .quadratic_linear_indices()
                        .into_iter()
                        .filter(|&l| {
                            l != table.trivial_index()
                                && x1.1 == 1
                                && x2.1 == 1
                                && table.twist_index(x1.0, l) == x1.0
                                && table.twist_index(x2.0, l) == x2.0
                        })
                        .count();
                    bindings.insert("same_field".into(), (common >= 1).to_string());
                    CaseLabel::DsIIIa
                }
            } else {
                // Siegel: phi = sigma + sigma.chi with sim = chi det sigma.
                let chi = table.linear_product(param.sim, table.linear_inverse(d1));
                let chi_quad = chi == table.trivial_index() || quadratic_nontrivial(table, chi);
                let count = dihedral_count(table, x1.0, x1.1);
                bindings.insert("sigma_dihedral".into(), count.to_string());
                if chi_quad {
                    let position = if chi == table.trivial_index() {
                        "trivial"
                    } else if x1.1 == 1 && table.twist_index(x1.0, chi) == x1.0 {
                        "in_twists"
                    } else {
                        "new"
                    };
                    bindings.insert("chi".into(), position.into());
                    CaseLabel::NdsSiegelB
                } else {
                    CaseLabel::NdsSiegelA
                }
            }
        }
        [l1, l2, t] | [l1, t, l2] | [t, l1, l2]
            if table.degree(l1.0) as u32 * l1.1 == 1
                && table.degree(l2.0) as u32 * l2.1 == 1
                && table.degree(t.0) as u32 * t.1 == 2 =>
        {
            // Klingen: phi = chi (1 + sigma + det sigma).
            let chi = l1.0.min(l2.0);
            let dihedral_with_det = if t.1 == 1 {
                let sigma = table.twist_index(t.0, table.linear_inverse(chi));
                let det_sigma = VirtualChar::irreducible(table, sigma)?.det_char()?;
                quadratic_nontrivial(table, det_sigma)
                    && table.twist_index(sigma, det_sigma) == sigma
            } else {
                false
            };
            bindings.insert("dihedral_det".into(), dihedral_with_det.to_string());
            CaseLabel::NdsKlingen
        }
        [a, b, c, d]
            if [a, b, c, d]
                .iter()
                .all(|x| table.degree(x.0) as u32 * x.1 == 1) =>
        {
            // Borel: pick chi = smallest constituent and read the triple
            // {chi1, chi2, chi1 chi2} off the remaining slots.
            let chi = a.0;
            let partner = table.linear_product(param.sim, table.linear_inverse(chi));
            let mut rest = vec![b.0, c.0, d.0];
            let pos = rest
                .iter()
                .position(|&x| x == partner)
                .ok_or_else(|| Error::Invariant("Borel pairing failed".into()))?;
            rest.remove(pos);
            let inv_chi = table.linear_inverse(chi);
            let chi1 = table.linear_product(rest[0], inv_chi);
            let chi2 = table.linear_product(rest[1], inv_chi);
            let chi12 = table.linear_product(partner, inv_chi);
            let mut distinct_quads: Vec<usize> = [chi1, chi2, chi12]
                .into_iter()
                .filter(|&x| quadratic_nontrivial(table, x))
                .collect();
            distinct_quads.sort_unstable();
            distinct_quads.dedup();
            let count = distinct_quads.len();
            checks.push(Check {
                name: "borel_quadratic_count".into(),
                pass: [0, 1, 3].contains(&count),
                detail: format!("{count} distinct nontrivial quadratics in the triple"),
            });
            bindings.insert("quad_count".into(), count.to_string());
            CaseLabel::NdsBorel
        }
        _ => {
            return Err(Error::Invariant(format!(
                "constituent shape {constituents:?} escapes the classification"
            )))
        }
    };

    // Residue-characteristic warnings, keyed to declared metadata only.
    if param.residue == ResidueChar::Odd {
        if matches!(label, CaseLabel::I | CaseLabel::II) {
            warnings.push(format!(
                "case {label} flagged: impossible for p != 2 (a primitive layer needs p dividing the dimension)"
            ));
        }
        if label == CaseLabel::IIIb2 {
            warnings.push("case III-b2 flagged: occurs only when p = 2".into());
        }
        if n == 16 {
            warnings.push("N = 16 flagged: for p != 2 the packet size is at most 8".into());
        }
        if !g.models_odd_residue() {
            warnings.push(format!(
                "declared p odd, but the model group has {} nontrivial quadratic characters (a p-adic field with p odd has exactly 3)",
                table
                    .quadratic_linear_indices()
                    .len()
                    .saturating_sub(1)
            ));
        }
    }

    let std_decomposition = std
        .terms()
        .iter()
        .map(|t| {
            let (sd, ty) = term_type(table, t.irrep, t.n, None);
            StdPiece {
                irrep: t.irrep,
                degree: table.degree(t.irrep),
                n: t.n,
                mult: t.mult,
                self_dual: sd,
                rep_type: ty,
            }
        })
        .collect();

    Ok(ClassReport {
        group: g.name().to_string(),
        phi_terms: param.phi.terms().to_vec(),
        sim: param.sim,
        sim_candidates: valid_sims(&param.phi)?,
        residue: param.residue,
        case_label: label,
        bindings,
        binding_source: if witnessed { "witnessed" } else { "inferred" }.into(),
        std_decomposition,
        i_phi: i_phi.clone(),
        i_order: i_phi.len(),
        a_phi_size: sizes.a_size,
        a_std_size: sizes.n_component_path,
        r_orthogonal: sizes.r_orthogonal,
        n_packet: sizes.n_component_path,
        witnesses,
        consistency: checks,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Enumeration and lift search.
// ---------------------------------------------------------------------------

/// All effective representations of the given dimension, as canonical
/// term lists in deterministic order.
pub fn enumerate_wd_dim(table: &Arc<CharTable>, dim: usize) -> Vec<Vec<WdTerm>> {
    let mut options: Vec<(usize, u32, usize)> = Vec::new();
    for n in 1..=dim as u32 {
        for i in 0..table.n_irreps() {
            let d = table.degree(i) * n as usize;
            if d <= dim {
                options.push((i, n, d));
            }
        }
    }
    options.sort_by_key(|&(i, n, _)| (n, i));
    let mut out = Vec::new();
    let mut current: Vec<WdTerm> = Vec::new();
    fn recurse(
        options: &[(usize, u32, usize)],
        start: usize,
        remaining: usize,
        current: &mut Vec<WdTerm>,
        out: &mut Vec<Vec<WdTerm>>,
    ) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for (k, &(i, n, d)) in options.iter().enumerate().skip(start) {
            if d > remaining {
                continue;
            }
            if let Some(last) = current.last_mut() {
                if last.irrep == i && last.n == n {
                    last.mult += 1;
                    recurse(options, k, remaining - d, current, out);
                    current.last_mut().unwrap().mult -= 1;
                    continue;
                }
            }
            current.push(WdTerm { irrep: i, n, mult: 1 });
            recurse(options, k, remaining - d, current, out);
            current.pop();
        }
    }
    recurse(&options, 0, dim, &mut current, &mut out);
    out
}

/// A lift-search candidate: a group together with the pullback map on
/// irreducibles along a declared surjection onto the base group.
pub struct LiftCandidate {
    pub group: Arc<GroupTable>,
    /// Index i of the base table maps to `irrep_map[i]` of the candidate.
    pub irrep_map: Vec<usize>,
}

/// Search candidate groups for a symplectic-similitude parameter whose
/// standard representation pulls back to `psi`. Scans all effective
/// 4-dimensional parameters in canonical order; `None` is a legitimate
/// outcome (the lift may need a bigger central extension than supplied).
pub fn lift_search(psi: &WdRep, candidates: &[LiftCandidate]) -> Result<Option<Gsp4Param>> {
    let base = &psi.table;
    for cand in candidates {
        let ctab = char_table(&cand.group);
        if cand.irrep_map.len() != base.n_irreps() {
            return Err(Error::BadCorrespondence(format!(
                "map covers {} of {} irreducibles",
                cand.irrep_map.len(),
                base.n_irreps()
            )));
        }
        for (i, &j) in cand.irrep_map.iter().enumerate() {
            if j >= ctab.n_irreps() || ctab.degree(j) != base.degree(i) {
                return Err(Error::BadCorrespondence(format!(
                    "irreducible {i} maps to {j} with mismatched degree"
                )));
            }
        }
        let pulled = WdRep::new(
            &ctab,
            psi.terms()
                .iter()
                .map(|t| WdTerm {
                    irrep: cand.irrep_map[t.irrep],
                    ..*t
                })
                .collect(),
        )?;
        for terms in enumerate_wd_dim(&ctab, 4) {
            let phi = WdRep::new(&ctab, terms)?;
            for sim in valid_sims(&phi)? {
                let param = Gsp4Param {
                    phi: phi.clone(),
                    sim,
                    residue: ResidueChar::Unspecified,
                };
                if let Ok(std) = std_of(&param) {
                    if std == pulled {
                        return Ok(Some(param));
                    }
                }
            }
        }
    }
    Ok(None)
}
