//! The Weil-Deligne layer: formal sums of (irreducible character boxtimes
//! S_n) with Clebsch-Gordan tensor rules and exterior/symmetric-square
//! plethysm, plus self-duality/type and discrete-series tests.
//!
//! S_n denotes the n-dimensional irreducible of SL2; it stays symbolic,
//! no matrices are ever materialized.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::charalg::{fs_indicator, VirtualChar};
use crate::error::{Error, Result};
use crate::group::CharTable;

/// One term: (Weil-layer irreducible index, SL2 dimension n, multiplicity).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WdTerm {
    pub irrep: usize,
    pub n: u32,
    pub mult: i64,
}

/// A formal integer combination of irreducible (rho boxtimes S_n) pairs,
/// kept in canonical form: terms sorted by (n, irrep), zero terms removed.
#[derive(Clone)]
pub struct WdRep {
    pub table: Arc<CharTable>,
    terms: Vec<WdTerm>,
}

impl PartialEq for WdRep {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.table, &other.table) && self.terms == other.terms
    }
}

impl std::fmt::Debug for WdRep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WdRep{:?}", self.terms)
    }
}

/// Self-duality type of a self-dual representation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelfDualType {
    Orthogonal,
    Symplectic,
    Complex,
}

impl WdRep {
    pub fn new(table: &Arc<CharTable>, mut terms: Vec<WdTerm>) -> Result<WdRep> {
        for t in &terms {
            if t.irrep >= table.n_irreps() {
                return Err(Error::IrrepOutOfRange(t.irrep, table.n_irreps()));
            }
            if t.n == 0 {
                return Err(Error::Invariant("S_0 does not exist".into()));
            }
        }
        terms.sort_by_key(|t| (t.n, t.irrep));
        let mut merged: Vec<WdTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            if let Some(last) = merged.last_mut() {
                if last.n == t.n && last.irrep == t.irrep {
                    last.mult += t.mult;
                    continue;
                }
            }
            merged.push(t);
        }
        merged.retain(|t| t.mult != 0);
        Ok(WdRep {
            table: table.clone(),
            terms: merged,
        })
    }

    pub fn zero(table: &Arc<CharTable>) -> WdRep {
        WdRep {
            table: table.clone(),
            terms: vec![],
        }
    }

    /// A pure Weil-layer representation (every S-factor trivial).
    pub fn from_weil(chi: &VirtualChar) -> WdRep {
        let terms = chi
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(|(i, &m)| WdTerm {
                irrep: i,
                n: 1,
                mult: m,
            })
            .collect();
        WdRep {
            table: chi.table.clone(),
            terms,
        }
    }

    pub fn single(table: &Arc<CharTable>, irrep: usize, n: u32) -> Result<WdRep> {
        WdRep::new(
            table,
            vec![WdTerm {
                irrep,
                n,
                mult: 1,
            }],
        )
    }

    pub fn terms(&self) -> &[WdTerm] {
        &self.terms
    }

    pub fn dim(&self) -> i64 {
        self.terms
            .iter()
            .map(|t| t.mult * self.table.degree(t.irrep) as i64 * t.n as i64)
            .sum()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.iter().all(|t| t.mult >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.terms.iter().all(|t| t.mult == 1)
    }

    /// Number of irreducible constituents counted with multiplicity.
    pub fn constituent_count(&self) -> i64 {
        self.terms.iter().map(|t| t.mult).sum()
    }

    /// True when the SL2 factor acts trivially everywhere.
    pub fn is_pure_weil(&self) -> bool {
        self.terms.iter().all(|t| t.n == 1)
    }

    /// Forget the SL2 layer: S_n becomes n copies of the trivial action.
    pub fn weil_char(&self) -> VirtualChar {
        let mut coeffs = vec![0i64; self.table.n_irreps()];
        for t in &self.terms {
            coeffs[t.irrep] += t.mult * t.n as i64;
        }
        VirtualChar {
            table: self.table.clone(),
            coeffs,
        }
    }

    pub fn add(&self, other: &WdRep) -> Result<WdRep> {
        if !Arc::ptr_eq(&self.table, &other.table) {
            return Err(Error::TableMismatch);
        }
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        WdRep::new(&self.table, terms)
    }

    pub fn sub(&self, other: &WdRep) -> Result<WdRep> {
        let negated: Vec<WdTerm> = other
            .terms
            .iter()
            .map(|t| WdTerm {
                mult: -t.mult,
                ..*t
            })
            .collect();
        self.add(&WdRep::new(&self.table, negated)?)
    }

    pub fn scaled(&self, k: i64) -> WdRep {
        WdRep {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|t| t.mult * k != 0)
                .map(|t| WdTerm {
                    mult: t.mult * k,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn dual(&self) -> WdRep {
        let terms = self
            .terms
            .iter()
            .map(|t| WdTerm {
                irrep: self.table.dual_index(t.irrep),
                ..*t
            })
            .collect();
        WdRep::new(&self.table, terms).expect("dual terms valid")
    }

    /// Twist the Weil layer by a linear character.
    pub fn twist(&self, l: usize) -> WdRep {
        let terms = self
            .terms
            .iter()
            .map(|t| WdTerm {
                irrep: self.table.twist_index(t.irrep, l),
                ..*t
            })
            .collect();
        WdRep::new(&self.table, terms).expect("twisted terms valid")
    }

    /// Determinant character of the whole representation, as a linear index.
    pub fn det_char(&self) -> Result<usize> {
        if !self.is_effective() {
            return Err(Error::DetOfVirtual);
        }
        let mut acc = self.table.trivial_index();
        for t in &self.terms {
            let base = VirtualChar::irreducible(&self.table, t.irrep)?.det_char()?;
            for _ in 0..(t.mult * t.n as i64) {
                acc = self.table.linear_product(acc, base);
            }
        }
        Ok(acc)
    }

    /// Tensor product, bilinear over the Clebsch-Gordan rule
    /// S_a (x) S_b = S_{a+b-1} + S_{a+b-3} + ... + S_{|a-b|+1}.
    pub fn tensor(&self, other: &WdRep) -> Result<WdRep> {
        if !Arc::ptr_eq(&self.table, &other.table) {
            return Err(Error::TableMismatch);
        }
        let mut terms: Vec<WdTerm> = Vec::new();
        for t1 in &self.terms {
            for t2 in &other.terms {
                let weil = self.table.tensor_irreps(t1.irrep, t2.irrep);
                let mult = t1.mult * t2.mult;
                for n in sl2_tensor(t1.n, t2.n) {
                    for (i, &m) in weil.iter().enumerate() {
                        if m != 0 {
                            terms.push(WdTerm {
                                irrep: i,
                                n,
                                mult: mult * m,
                            });
                        }
                    }
                }
            }
        }
        WdRep::new(&self.table, terms)
    }

    /// Exterior square of an effective representation, using
    /// wedge2(V boxtimes S) = wedge2(V) boxtimes Sym2(S) + Sym2(V) boxtimes wedge2(S)
    /// per term and tensor products across distinct copies.
    pub fn wedge2(&self) -> Result<WdRep> {
        self.square_part(true)
    }

    pub fn sym2(&self) -> Result<WdRep> {
        self.square_part(false)
    }

    fn square_part(&self, alternating: bool) -> Result<WdRep> {
        if !self.is_effective() {
            return Err(Error::NotEffective);
        }
        let mut acc = WdRep::zero(&self.table);
        for (a, ta) in self.terms.iter().enumerate() {
            let single = WdRep::single(&self.table, ta.irrep, ta.n)?;
            let self_square = if alternating {
                wedge2_single(&self.table, ta)?
            } else {
                sym2_single(&self.table, ta)?
            };
            acc = acc.add(&self_square.scaled(ta.mult))?;
            // Pairs of distinct copies inside one isotypic block.
            let pairs = ta.mult * (ta.mult - 1) / 2;
            if pairs > 0 {
                acc = acc.add(&single.tensor(&single)?.scaled(pairs))?;
            }
            // Cross terms with later blocks.
            for tb in self.terms.iter().skip(a + 1) {
                let other = WdRep::single(&self.table, tb.irrep, tb.n)?;
                acc = acc.add(&single.tensor(&other)?.scaled(ta.mult * tb.mult))?;
            }
        }
        Ok(acc)
    }

    /// Per-isotypic self-duality report: (term, self_dual, type).
    pub fn dual_type_report(&self) -> Vec<(WdTerm, bool, SelfDualType)> {
        self.terms
            .iter()
            .map(|t| {
                let (sd, ty) = term_type(&self.table, t.irrep, t.n, None);
                (*t, sd, ty)
            })
            .collect()
    }
}

/// Self-duality and type of (rho boxtimes S_n), optionally twisted: the
/// Weil-layer indicator times the parity of S_n (S_n is orthogonal for n
/// odd and symplectic for n even).
pub fn term_type(
    table: &Arc<CharTable>,
    irrep: usize,
    n: u32,
    eta: Option<usize>,
) -> (bool, SelfDualType) {
    let fs = fs_indicator(table, irrep, eta).expect("indicator of an irreducible");
    if fs == 0 {
        return (false, SelfDualType::Complex);
    }
    let sign = fs * if n % 2 == 1 { 1 } else { -1 };
    let ty = if sign == 1 {
        SelfDualType::Orthogonal
    } else {
        SelfDualType::Symplectic
    };
    (true, ty)
}

/// S_a (x) S_b decomposition.
pub fn sl2_tensor(a: u32, b: u32) -> Vec<u32> {
    let lo = a.abs_diff(b) + 1;
    let hi = a + b - 1;
    let mut out: Vec<u32> = (lo..=hi).step_by(2).collect();
    out.reverse();
    out
}

/// Sym2(S_n) = S_{2n-1} + S_{2n-5} + ... (indices >= 1).
pub fn sl2_sym2(n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut k = 2 * n - 1;
    loop {
        out.push(k);
        if k <= 4 {
            break;
        }
        k -= 4;
    }
    out
}

/// wedge2(S_n) = S_{2n-3} + S_{2n-7} + ... (indices >= 1).
pub fn sl2_wedge2(n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut k = 2 * n - 3;
    loop {
        out.push(k);
        if k <= 4 {
            break;
        }
        k -= 4;
    }
    out
}

fn wedge2_single(table: &Arc<CharTable>, t: &WdTerm) -> Result<WdRep> {
    let chi = VirtualChar::irreducible(table, t.irrep)?;
    let wedge_weil = WdRep::from_weil(&chi.wedge2()?);
    let sym_weil = WdRep::from_weil(&chi.sym2()?);
    let mut acc = WdRep::zero(table);
    for n in sl2_sym2(t.n) {
        acc = acc.add(&replace_sl2(&wedge_weil, n))?;
    }
    for n in sl2_wedge2(t.n) {
        acc = acc.add(&replace_sl2(&sym_weil, n))?;
    }
    Ok(acc)
}

fn sym2_single(table: &Arc<CharTable>, t: &WdTerm) -> Result<WdRep> {
    let chi = VirtualChar::irreducible(table, t.irrep)?;
    let wedge_weil = WdRep::from_weil(&chi.wedge2()?);
    let sym_weil = WdRep::from_weil(&chi.sym2()?);
    let mut acc = WdRep::zero(table);
    for n in sl2_sym2(t.n) {
        acc = acc.add(&replace_sl2(&sym_weil, n))?;
    }
    for n in sl2_wedge2(t.n) {
        acc = acc.add(&replace_sl2(&wedge_weil, n))?;
    }
    Ok(acc)
}

fn replace_sl2(pure: &WdRep, n: u32) -> WdRep {
    debug_assert!(pure.is_pure_weil());
    let terms = pure
        .terms
        .iter()
        .map(|t| WdTerm { n, ..*t })
        .collect();
    WdRep::new(&pure.table, terms).expect("terms valid")
}

/// Distinct reasons a candidate fails to be a discrete-series parameter
/// into SO_N.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DiscreteCheck {
    Discrete,
    NotEffective,
    WrongDimension,
    NotSelfDual,
    DetNotTrivial,
    HasMultiplicity,
    NonOrthogonalConstituent,
}

/// Discrete-series test in SO_N (N odd): the centralizer is finite exactly
/// when the representation is multiplicity free with every constituent
/// self-dual of orthogonal type.
pub fn discrete_so_check(psi: &WdRep, n_dim: usize) -> DiscreteCheck {
    if !psi.is_effective() {
        return DiscreteCheck::NotEffective;
    }
    if psi.dim() != n_dim as i64 || n_dim % 2 == 0 {
        return DiscreteCheck::WrongDimension;
    }
    if psi.dual() != *psi {
        return DiscreteCheck::NotSelfDual;
    }
    match psi.det_char() {
        Ok(d) if d == psi.table.trivial_index() => {}
        _ => return DiscreteCheck::DetNotTrivial,
    }
    if !psi.is_multiplicity_free() {
        return DiscreteCheck::HasMultiplicity;
    }
    for t in psi.terms() {
        let (sd, ty) = term_type(&psi.table, t.irrep, t.n, None);
        if !sd || ty != SelfDualType::Orthogonal {
            return DiscreteCheck::NonOrthogonalConstituent;
        }
    }
    DiscreteCheck::Discrete
}

pub fn is_discrete_so(psi: &WdRep, n_dim: usize) -> bool {
    discrete_so_check(psi, n_dim) == DiscreteCheck::Discrete
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{catalog, char_table};

    fn table(name: &str) -> Arc<CharTable> {
        char_table(&catalog::by_name(name).unwrap())
    }

    // Independent plethysm oracle: decompose SL2 products and squares by
    // peeling highest weights from explicit weight multisets.
    fn weights(n: u32) -> Vec<i64> {
        (0..n).map(|i| n as i64 - 1 - 2 * i as i64).collect()
    }

    fn peel(mut multiset: Vec<i64>) -> Vec<u32> {
        let mut out = Vec::new();
        multiset.sort_unstable();
        while let Some(&hi) = multiset.last() {
            assert!(hi >= 0);
            let n = hi as u32 + 1;
            out.push(n);
            for w in weights(n) {
                let pos = multiset.iter().rposition(|&x| x == w).expect("weight present");
                multiset.remove(pos);
            }
        }
        out.sort_unstable();
        out
    }

    fn oracle_tensor(a: u32, b: u32) -> Vec<u32> {
        let mut ws = Vec::new();
        for x in weights(a) {
            for y in weights(b) {
                ws.push(x + y);
            }
        }
        peel(ws)
    }

    fn oracle_sym2(n: u32) -> Vec<u32> {
        let w = weights(n);
        let mut ws = Vec::new();
        for i in 0..w.len() {
            for j in i..w.len() {
                ws.push(w[i] + w[j]);
            }
        }
        peel(ws)
    }

    fn oracle_wedge2(n: u32) -> Vec<u32> {
        let w = weights(n);
        let mut ws = Vec::new();
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                ws.push(w[i] + w[j]);
            }
        }
        peel(ws)
    }

    #[test]
    fn sl2_rules_match_weight_oracle() {
        for a in 1..=8u32 {
            for b in 1..=8u32 {
                let mut rule = sl2_tensor(a, b);
                rule.sort_unstable();
                assert_eq!(rule, oracle_tensor(a, b), "tensor {a} {b}");
            }
            let mut s = sl2_sym2(a);
            s.sort_unstable();
            assert_eq!(s, oracle_sym2(a), "sym2 {a}");
            let mut w = sl2_wedge2(a);
            w.sort_unstable();
            assert_eq!(w, oracle_wedge2(a), "wedge2 {a}");
        }
    }

    #[test]
    fn spin_half_square() {
        assert_eq!(sl2_tensor(2, 2), vec![3, 1]);
        assert_eq!(sl2_tensor(3, 2), vec![4, 2]);
    }

    #[test]
    fn pure_weil_tensor() {
        let t = table("D8");
        let two = (0..t.n_irreps()).find(|&i| t.degree(i) == 2).unwrap();
        let a = WdRep::single(&t, two, 1).unwrap();
        let b = WdRep::single(&t, t.trivial_index(), 1).unwrap();
        let prod = a.tensor(&b).unwrap();
        assert_eq!(prod, a);
    }

    #[test]
    fn wedge2_of_mu_box_s4() {
        let t = table("C2");
        let mu = 1; // nontrivial character of C2
        let phi = WdRep::single(&t, mu, 4).unwrap();
        let w = phi.wedge2().unwrap();
        // wedge2(mu box S4) = mu^2 box (S5 + S1); mu^2 = trivial.
        let triv = t.trivial_index();
        let expect = WdRep::new(
            &t,
            vec![
                WdTerm { irrep: triv, n: 5, mult: 1 },
                WdTerm { irrep: triv, n: 1, mult: 1 },
            ],
        )
        .unwrap();
        assert_eq!(w, expect);
    }

    #[test]
    fn wedge2_of_sigma_box_s2() {
        // wedge2(sigma box S2) = det(sigma) box S3 + Sym2(sigma) box S1.
        let t = table("D8");
        let two = (0..t.n_irreps()).find(|&i| t.degree(i) == 2).unwrap();
        let sigma = VirtualChar::irreducible(&t, two).unwrap();
        let phi = WdRep::single(&t, two, 2).unwrap();
        let w = phi.wedge2().unwrap();
        let det = sigma.det_char().unwrap();
        let mut expect_terms = vec![WdTerm { irrep: det, n: 3, mult: 1 }];
        for (i, &m) in sigma.sym2().unwrap().coeffs.iter().enumerate() {
            if m != 0 {
                expect_terms.push(WdTerm { irrep: i, n: 1, mult: m });
            }
        }
        assert_eq!(w, WdRep::new(&t, expect_terms).unwrap());
    }

    #[test]
    fn wedge2_of_two_pure_weil_linears() {
        let t = table("V4");
        let phi = WdRep::new(
            &t,
            vec![
                WdTerm { irrep: 1, n: 1, mult: 1 },
                WdTerm { irrep: 2, n: 1, mult: 1 },
            ],
        )
        .unwrap();
        let w = phi.wedge2().unwrap();
        let prod = t.linear_product(1, 2);
        assert_eq!(w, WdRep::single(&t, prod, 1).unwrap());
    }

    #[test]
    fn wedge_sym_dimensions_and_sum() {
        let t = table("Q8");
        let two = (0..t.n_irreps()).find(|&i| t.degree(i) == 2).unwrap();
        let phi = WdRep::new(
            &t,
            vec![
                WdTerm { irrep: two, n: 2, mult: 1 },
                WdTerm { irrep: t.trivial_index(), n: 3, mult: 2 },
                WdTerm { irrep: 1, n: 1, mult: 1 },
            ],
        )
        .unwrap();
        let d = phi.dim();
        let w = phi.wedge2().unwrap();
        let s = phi.sym2().unwrap();
        assert_eq!(w.dim(), d * (d - 1) / 2);
        assert_eq!(s.dim(), d * (d + 1) / 2);
        assert_eq!(w.add(&s).unwrap(), phi.tensor(&phi).unwrap());
    }

    #[test]
    fn weil_layer_forgetting_commutes_with_tensor() {
        let t = table("S3");
        let two = 2;
        let a = WdRep::single(&t, two, 2).unwrap();
        let b = WdRep::single(&t, 1, 3).unwrap();
        let lhs = a.tensor(&b).unwrap().weil_char();
        let rhs = a
            .weil_char()
            .tensor(&b.weil_char())
            .unwrap();
        assert_eq!(lhs.coeffs, rhs.coeffs);
    }

    #[test]
    fn dual_types() {
        let t = table("Q8");
        let two = (0..t.n_irreps()).find(|&i| t.degree(i) == 2).unwrap();
        // S5 with trivial Weil layer: orthogonal.
        assert_eq!(
            term_type(&table("C1"), 0, 5, None),
            (true, SelfDualType::Orthogonal)
        );
        // Q8 two-dim box S1: symplectic; box S2: orthogonal.
        assert_eq!(term_type(&t, two, 1, None), (true, SelfDualType::Symplectic));
        assert_eq!(term_type(&t, two, 2, None), (true, SelfDualType::Orthogonal));
    }

    #[test]
    fn discrete_tests() {
        let c1 = table("C1");
        let s5 = WdRep::single(&c1, 0, 5).unwrap();
        assert!(is_discrete_so(&s5, 5));
        // 1 + 1 + (3-dim orthogonal) has multiplicity two.
        let t = table("S4");
        let three = (0..t.n_irreps()).find(|&i| t.degree(i) == 3).unwrap();
        let psi = WdRep::new(
            &t,
            vec![
                WdTerm { irrep: t.trivial_index(), n: 1, mult: 2 },
                WdTerm { irrep: three, n: 1, mult: 1 },
            ],
        )
        .unwrap();
        assert_eq!(discrete_so_check(&psi, 5), DiscreteCheck::HasMultiplicity);
        // Five distinct quadratic characters of the extraspecial model.
        let es = table("D8oD8");
        let quads: Vec<usize> = es
            .quadratic_linear_indices()
            .into_iter()
            .filter(|&l| l != es.trivial_index())
            .collect();
        // Pick five whose product is trivial so the determinant vanishes:
        // use w1, w2, w1 w2, w3, w1 w2 w3 ... simplest: search a 5-subset
        // with trivial product and distinct entries.
        let mut found = None;
        'outer: for a in 0..quads.len() {
            for b in a + 1..quads.len() {
                for c in b + 1..quads.len() {
                    for d in c + 1..quads.len() {
                        let p3 = es.linear_product(
                            es.linear_product(quads[a], quads[b]),
                            es.linear_product(quads[c], quads[d]),
                        );
                        if p3 != es.trivial_index()
                            && quads.contains(&p3)
                            && ![quads[a], quads[b], quads[c], quads[d]].contains(&p3)
                        {
                            found = Some(vec![quads[a], quads[b], quads[c], quads[d], p3]);
                            break 'outer;
                        }
                    }
                }
            }
        }
        let five = found.expect("five quadratics with trivial product");
        let psi = WdRep::new(
            &es,
            five
                .iter()
                .map(|&l| WdTerm { irrep: l, n: 1, mult: 1 })
                .collect(),
        )
        .unwrap();
        assert!(is_discrete_so(&psi, 5));
    }

    #[test]
    fn twist_stability_of_types() {
        // Twisting by a quadratic character that fixes the isotypic
        // component leaves the type unchanged.
        let t = table("Q8");
        let two = (0..t.n_irreps()).find(|&i| t.degree(i) == 2).unwrap();
        for l in t.quadratic_linear_indices() {
            if t.twist_index(two, l) == two {
                let before = term_type(&t, two, 2, None);
                let after = term_type(&t, t.twist_index(two, l), 2, None);
                assert_eq!(before, after);
            }
        }
    }
}
