//! The representation-ring calculus over a fixed finite group: virtual
//! characters with tensor, dual, exterior/symmetric squares, determinant
//! characters, induction, restriction, tensor induction and
//! Frobenius-Schur indicators.

use std::sync::Arc;

use num::{BigInt, ToPrimitive};

use crate::cyclo::{Cyclo, Rat};
use crate::error::{Error, Result};
use crate::group::{char_table, CharTable, Subgroup};

fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// An integer combination of irreducible characters; negative coefficients
/// make virtual differences first-class.
#[derive(Clone)]
pub struct VirtualChar {
    pub table: Arc<CharTable>,
    pub coeffs: Vec<i64>,
}

impl PartialEq for VirtualChar {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.table, &other.table) && self.coeffs == other.coeffs
    }
}

impl std::fmt::Debug for VirtualChar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "VirtualChar{:?}", self.coeffs)
    }
}

impl VirtualChar {
    pub fn zero(table: &Arc<CharTable>) -> Self {
        VirtualChar {
            table: table.clone(),
            coeffs: vec![0; table.n_irreps()],
        }
    }

    pub fn irreducible(table: &Arc<CharTable>, i: usize) -> Result<Self> {
        if i >= table.n_irreps() {
            return Err(Error::IrrepOutOfRange(i, table.n_irreps()));
        }
        let mut v = Self::zero(table);
        v.coeffs[i] = 1;
        Ok(v)
    }

    pub fn trivial(table: &Arc<CharTable>) -> Self {
        Self::irreducible(table, table.trivial_index()).expect("trivial exists")
    }

    pub fn regular(table: &Arc<CharTable>) -> Self {
        VirtualChar {
            table: table.clone(),
            coeffs: (0..table.n_irreps())
                .map(|i| table.degree(i) as i64)
                .collect(),
        }
    }

    pub fn from_values(table: &Arc<CharTable>, values: &[Cyclo]) -> Result<Self> {
        Ok(VirtualChar {
            table: table.clone(),
            coeffs: table.decompose(values)?,
        })
    }

    pub fn values(&self) -> Vec<Cyclo> {
        (0..self.table.n_classes())
            .map(|c| {
                let mut acc = Cyclo::zero();
                for (i, &m) in self.coeffs.iter().enumerate() {
                    if m != 0 {
                        acc = &acc + &self.table.value(i, c).scale(&rat_int(m));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn dim(&self) -> i64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &m)| m * self.table.degree(i) as i64)
            .sum()
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|&m| m >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&m| m == 0)
    }

    pub fn is_irreducible(&self) -> bool {
        self.coeffs.iter().filter(|&&m| m != 0).count() == 1
            && self.coeffs.iter().sum::<i64>() == 1
    }

    fn check_same_table(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.table, &other.table) {
            Ok(())
        } else {
            Err(Error::TableMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_table(other)?;
        Ok(VirtualChar {
            table: self.table.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_table(other)?;
        Ok(VirtualChar {
            table: self.table.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_same_table(other)?;
        let mut coeffs = vec![0i64; self.table.n_irreps()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let prod = self.table.tensor_irreps(i, j);
                for (t, &m) in prod.iter().enumerate() {
                    coeffs[t] += a * b * m;
                }
            }
        }
        Ok(VirtualChar {
            table: self.table.clone(),
            coeffs,
        })
    }

    pub fn dual(&self) -> Self {
        let mut coeffs = vec![0i64; self.table.n_irreps()];
        for (i, &m) in self.coeffs.iter().enumerate() {
            coeffs[self.table.dual_index(i)] += m;
        }
        VirtualChar {
            table: self.table.clone(),
            coeffs,
        }
    }

    /// Twist by a linear character (a permutation of the irreducibles).
    pub fn twist(&self, l: usize) -> Self {
        let mut coeffs = vec![0i64; self.table.n_irreps()];
        for (i, &m) in self.coeffs.iter().enumerate() {
            if m != 0 {
                coeffs[self.table.twist_index(i, l)] += m;
            }
        }
        VirtualChar {
            table: self.table.clone(),
            coeffs,
        }
    }

    /// Adams operation: g -> chi(g^k). A ring endomorphism of the
    /// representation ring, total on virtual characters.
    pub fn adams(&self, k: i64) -> Self {
        let values = self.values();
        let g = &self.table.group;
        let powered: Vec<Cyclo> = (0..self.table.n_classes())
            .map(|c| values[g.power_class(c, k)].clone())
            .collect();
        VirtualChar::from_values(&self.table, &powered).expect("adams of a virtual character")
    }

    /// Exterior square (chi(g)^2 - chi(g^2)) / 2; requires effectiveness.
    pub fn wedge2(&self) -> Result<Self> {
        self.square_part(-1)
    }

    /// Symmetric square (chi(g)^2 + chi(g^2)) / 2; requires effectiveness.
    pub fn sym2(&self) -> Result<Self> {
        self.square_part(1)
    }

    fn square_part(&self, sign: i64) -> Result<Self> {
        if !self.is_effective() {
            return Err(Error::NotEffective);
        }
        let values = self.values();
        let g = &self.table.group;
        let half = rat_int(1) / rat_int(2);
        let combined: Vec<Cyclo> = (0..self.table.n_classes())
            .map(|c| {
                let sq = &values[c] * &values[c];
                let pw = values[g.power_class(c, 2)].scale(&rat_int(sign));
                (&sq + &pw).scale(&half)
            })
            .collect();
        VirtualChar::from_values(&self.table, &combined)
    }

    /// Determinant (top exterior power) as a linear character, computed
    /// through Newton's identities from the Adams power sums.
    pub fn det_char(&self) -> Result<usize> {
        if !self.is_effective() {
            return Err(Error::DetOfVirtual);
        }
        // Cached per irreducible; general effective characters multiply out.
        if self.is_irreducible() {
            let i = self.coeffs.iter().position(|&m| m == 1).unwrap();
            if let Some(&d) = self.table.det_cache.lock().unwrap().get(&i) {
                return Ok(d);
            }
            let d = self.det_char_raw()?;
            self.table.det_cache.lock().unwrap().insert(i, d);
            return Ok(d);
        }
        let mut acc = self.table.trivial_index();
        for (i, &m) in self.coeffs.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let di = VirtualChar::irreducible(&self.table, i)?.det_char()?;
            for _ in 0..m {
                acc = self.table.linear_product(acc, di);
            }
        }
        Ok(acc)
    }

    fn det_char_raw(&self) -> Result<usize> {
        let d = self.dim();
        if d < 0 {
            return Err(Error::DetOfVirtual);
        }
        let k = self.table.n_classes();
        let one: Vec<Cyclo> = (0..k).map(|_| Cyclo::one()).collect();
        if d == 0 {
            return Ok(self.table.trivial_index());
        }
        // Power sums p_i = chi(g^i) and elementary symmetric e_m per class.
        let values = self.values();
        let g = &self.table.group;
        let p: Vec<Vec<Cyclo>> = (1..=d)
            .map(|i| {
                (0..k)
                    .map(|c| values[g.power_class(c, i)].clone())
                    .collect()
            })
            .collect();
        let mut e: Vec<Vec<Cyclo>> = vec![one];
        for m in 1..=d as usize {
            let mut acc = vec![Cyclo::zero(); k];
            for i in 1..=m {
                let sign = if i % 2 == 1 { 1 } else { -1 };
                for c in 0..k {
                    let term = (&e[m - i][c] * &p[i - 1][c]).scale(&rat_int(sign));
                    acc[c] = &acc[c] + &term;
                }
            }
            let minv = rat_int(1) / rat_int(m as i64);
            for c in 0..k {
                acc[c] = acc[c].scale(&minv);
            }
            e.push(acc);
        }
        let det_values = e.pop().unwrap();
        let idx = self
            .table
            .find_irrep(&det_values)
            .ok_or_else(|| Error::Invariant("determinant is not a character".into()))?;
        if self.table.degree(idx) != 1 {
            return Err(Error::Invariant("determinant is not linear".into()));
        }
        Ok(idx)
    }
}

/// Twisted Frobenius-Schur indicator of an irreducible:
/// (1/|G|) sum conj(eta(g)) chi(g^2), in {-1, 0, +1}.
pub fn fs_indicator(table: &Arc<CharTable>, irrep: usize, twist: Option<usize>) -> Result<i64> {
    if irrep >= table.n_irreps() {
        return Err(Error::IrrepOutOfRange(irrep, table.n_irreps()));
    }
    let eta = twist.unwrap_or_else(|| table.trivial_index());
    if table.degree(eta) != 1 {
        return Err(Error::NotLinear);
    }
    if let Some(&v) = table.fs_cache.lock().unwrap().get(&(irrep, eta)) {
        return Ok(v);
    }
    let g = &table.group;
    let k = table.n_classes();
    let mut acc = Cyclo::zero();
    for c in 0..k {
        let sq = g.power_class(c, 2);
        let term = &table.value(eta, c).conj() * table.value(irrep, sq);
        acc = &acc + &term.scale(&rat_int(table.classes.sizes[c] as i64));
    }
    let total = acc.scale(&(rat_int(1) / rat_int(g.order() as i64)));
    let v = total
        .as_integer()
        .and_then(|n| n.to_i64())
        .ok_or_else(|| Error::Invariant("indicator is not an integer".into()))?;
    if !(-1..=1).contains(&v) {
        return Err(Error::Invariant(format!("indicator {v} outside -1..1")));
    }
    table.fs_cache.lock().unwrap().insert((irrep, eta), v);
    Ok(v)
}

/// Value vector of a subgroup class function conjugated by a parent element:
/// (chi^g)(h) = chi(g h g^-1).
pub fn conjugate_values(sub: &Subgroup, values: &[Cyclo], g: usize) -> Vec<Cyclo> {
    let (ht, _) = sub.table();
    let hcl = ht.classes();
    (0..hcl.len())
        .map(|c| {
            let h = sub.to_parent(hcl.reps[c] as usize);
            let conj = sub.parent.conj(g, h);
            values[hcl.class_of[sub.from_parent(conj)] as usize].clone()
        })
        .collect()
}

/// Index of the conjugate irreducible chi^g on the subgroup's table.
pub fn conjugate_irrep(sub: &Subgroup, irrep: usize, g: usize) -> usize {
    let (ht, _) = sub.table();
    let table = char_table(&ht);
    let vals = conjugate_values(sub, &table.irreps[irrep].values, g);
    table.find_irrep(&vals).expect("conjugate of an irreducible")
}

/// Induction by the standard formula
/// Ind chi(g) = (1/|H|) sum_{x in G, x^-1 g x in H} chi(x^-1 g x).
pub fn induce(sub: &Subgroup, chi: &VirtualChar) -> Result<VirtualChar> {
    let (ht, _) = sub.table();
    if !Arc::ptr_eq(&chi.table.group, &ht) {
        return Err(Error::SubgroupMismatch);
    }
    let g = &sub.parent;
    let gt = char_table(g);
    let hvals = chi.values();
    let hcl = ht.classes();
    let order_h = rat_int(sub.order() as i64);
    let values: Vec<Cyclo> = (0..gt.n_classes())
        .map(|c| {
            let r = gt.classes.reps[c] as usize;
            let mut acc = Cyclo::zero();
            for x in 0..g.order() {
                let y = g.mul(g.mul(g.inv(x), r), x);
                if sub.contains(y) {
                    let hc = hcl.class_of[sub.from_parent(y)] as usize;
                    acc = &acc + &hvals[hc];
                }
            }
            acc.scale(&(rat_int(1) / order_h.clone()))
        })
        .collect();
    VirtualChar::from_values(&gt, &values)
}

/// Restriction by value pull-back.
pub fn restrict(sub: &Subgroup, chi: &VirtualChar) -> Result<VirtualChar> {
    if !Arc::ptr_eq(&chi.table.group, &sub.parent) {
        return Err(Error::SubgroupMismatch);
    }
    let (ht, _) = sub.table();
    let htab = char_table(&ht);
    let gvals = chi.values();
    let hcl = ht.classes();
    let values: Vec<Cyclo> = (0..hcl.len())
        .map(|c| {
            let h = sub.to_parent(hcl.reps[c] as usize);
            gvals[chi.table.classes.class_of[h] as usize].clone()
        })
        .collect();
    VirtualChar::from_values(&htab, &values)
}

/// Restriction multiplicities of every parent irreducible, cached per
/// subgroup. Row i lists the subgroup-irrep multiplicities of Res(chi_i).
pub fn res_matrix(sub: &Subgroup) -> Arc<Vec<Vec<i64>>> {
    let gt = char_table(&sub.parent);
    sub.res_mults_cell()
        .get_or_init(|| {
            let rows = (0..gt.n_irreps())
                .map(|i| {
                    let chi = VirtualChar::irreducible(&gt, i).unwrap();
                    restrict(sub, &chi).expect("restriction of a character").coeffs
                })
                .collect();
            Arc::new(rows)
        })
        .clone()
}

/// Fast restriction through the cached multiplicity matrix.
pub fn restrict_mults(sub: &Subgroup, coeffs: &[i64]) -> Vec<i64> {
    let rm = res_matrix(sub);
    let hn = rm.first().map(|r| r.len()).unwrap_or(0);
    let mut out = vec![0i64; hn];
    for (i, &m) in coeffs.iter().enumerate() {
        if m == 0 {
            continue;
        }
        for (j, &r) in rm[i].iter().enumerate() {
            out[j] += m * r;
        }
    }
    out
}

/// Fast induction: by Frobenius reciprocity the induction matrix is the
/// transpose of the restriction matrix.
pub fn induce_mults(sub: &Subgroup, hcoeffs: &[i64]) -> Vec<i64> {
    let rm = res_matrix(sub);
    let gt = char_table(&sub.parent);
    let mut out = vec![0i64; gt.n_irreps()];
    for (i, row) in rm.iter().enumerate() {
        let mut acc = 0i64;
        for (j, &r) in row.iter().enumerate() {
            acc += r * hcoeffs[j];
        }
        out[i] = acc;
    }
    out
}

/// Genuine tensor induction (multiplicative induction) along an index-2
/// subgroup: value sigma(g) sigma(t g t^-1) on H and sigma(g^2) off H.
pub fn tensor_induce_index2(sub: &Subgroup, sigma: &VirtualChar) -> Result<VirtualChar> {
    tensor_induce_impl(sub, sigma, false)
}

/// The Asai lift normalized as the complement of Ind(det sigma) inside
/// the exterior square of Ind(sigma): the tensor induction twisted by the
/// quadratic character cut out by H. Restricted to H both normalizations
/// agree with sigma tensor sigma^t.
pub fn asai_lift(sub: &Subgroup, sigma: &VirtualChar) -> Result<VirtualChar> {
    tensor_induce_impl(sub, sigma, true)
}

fn tensor_induce_impl(sub: &Subgroup, sigma: &VirtualChar, twist: bool) -> Result<VirtualChar> {
    if sub.index() != 2 {
        return Err(Error::IndexNotTwo(sub.index()));
    }
    let (ht, _) = sub.table();
    if !Arc::ptr_eq(&sigma.table.group, &ht) {
        return Err(Error::SubgroupMismatch);
    }
    if !sigma.is_effective() {
        return Err(Error::NotEffective);
    }
    let g = &sub.parent;
    let gt = char_table(g);
    let hvals = sigma.values();
    let hcl = ht.classes();
    let hval_at = |x: usize| -> Cyclo {
        hvals[hcl.class_of[sub.from_parent(x)] as usize].clone()
    };
    let t = sub.outside_rep();
    let values: Vec<Cyclo> = (0..gt.n_classes())
        .map(|c| {
            let r = gt.classes.reps[c] as usize;
            if sub.contains(r) {
                let conj = g.conj(t, r);
                &hval_at(r) * &hval_at(conj)
            } else {
                let v = hval_at(g.mul(r, r));
                if twist {
                    v.scale(&rat_int(-1))
                } else {
                    v
                }
            }
        })
        .collect();
    if cfg!(debug_assertions) {
        // The value must not depend on the choice of coset representative.
        if let Some(t2) = (t + 1..g.order()).find(|&x| !sub.contains(x)) {
            for c in 0..gt.n_classes() {
                let r = gt.classes.reps[c] as usize;
                if sub.contains(r) {
                    let alt = &hval_at(r) * &hval_at(g.conj(t2, r));
                    debug_assert!(alt == values[c], "tensor induction rep-dependent");
                }
            }
        }
    }
    VirtualChar::from_values(&gt, &values)
}

/// The quadratic character of the parent group with kernel the given
/// index-2 subgroup, as a linear irrep index.
pub fn omega_char(sub: &Subgroup) -> Result<usize> {
    if sub.index() != 2 {
        return Err(Error::IndexNotTwo(sub.index()));
    }
    let gt = char_table(&sub.parent);
    let classes = &gt.classes;
    (0..gt.n_linear())
        .find(|&l| {
            (0..classes.len()).all(|c| {
                let inside = sub.contains(classes.reps[c] as usize);
                let v = gt.value(l, c);
                if inside {
                    v.is_one()
                } else {
                    *v == Cyclo::from_int(-1)
                }
            })
        })
        .ok_or_else(|| Error::Invariant("no quadratic character with the given kernel".into()))
}

/// Restriction of a linear character of the parent to the subgroup, as a
/// linear index of the subgroup table.
pub fn restrict_linear(sub: &Subgroup, l: usize) -> usize {
    let gt = char_table(&sub.parent);
    let chi = VirtualChar::irreducible(&gt, l).expect("linear index valid");
    let res = restrict(sub, &chi).expect("restriction of linear");
    res.coeffs
        .iter()
        .position(|&m| m == 1)
        .expect("linear restricts to linear")
}
