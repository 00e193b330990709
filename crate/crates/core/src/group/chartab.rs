//! Exact character tables.
//!
//! Nonabelian groups go through the Burnside/Dixon class-sum method: the
//! common eigenvectors of the class-multiplication matrices are found over
//! a prime field F_p with p = 1 mod exponent(G), and the character values
//! are lifted to exact cyclotomics from the power-map multiplicities.
//! Abelian groups take a direct chain-extension path. Either way the rows
//! are sorted canonically, so the output is deterministic.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::OnceCell;

use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::group::{Classes, GroupTable};

/// One irreducible character: degree plus exact values per class.
#[derive(Clone)]
pub struct Irrep {
    pub degree: usize,
    pub values: Vec<Cyclo>,
}

/// The exact character table of a finite group.
pub struct CharTable {
    pub group: Arc<GroupTable>,
    pub classes: Arc<Classes>,
    pub irreps: Vec<Irrep>,
    linear_count: usize,
    dual_map: OnceCell<Vec<usize>>,
    tensor_cache: Mutex<HashMap<(usize, usize), Arc<Vec<i64>>>>,
    twist_cache: Mutex<HashMap<(usize, usize), usize>>,
    pub(crate) fs_cache: Mutex<HashMap<(usize, usize), i64>>,
    pub(crate) det_cache: Mutex<HashMap<usize, usize>>,
}

pub fn char_table(group: &Arc<GroupTable>) -> Arc<CharTable> {
    group
        .char_table
        .get_or_init(|| {
            let classes = group.classes();
            let mut irreps = if group.is_abelian() {
                abelian_irreps(group, &classes)
            } else {
                dixon_irreps(group, &classes)
            };
            sort_canonically(group, &mut irreps);
            let linear_count = irreps.iter().take_while(|i| i.degree == 1).count();
            let table = CharTable {
                group: group.clone(),
                classes,
                irreps,
                linear_count,
                dual_map: OnceCell::new(),
                tensor_cache: Mutex::new(HashMap::new()),
                twist_cache: Mutex::new(HashMap::new()),
                fs_cache: Mutex::new(HashMap::new()),
                det_cache: Mutex::new(HashMap::new()),
            };
            table.validate();
            Arc::new(table)
        })
        .clone()
}

impl CharTable {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn n_irreps(&self) -> usize {
        self.irreps.len()
    }

    /// Number of degree-1 rows; they come first in the canonical sort.
    pub fn n_linear(&self) -> usize {
        self.linear_count
    }

    pub fn degree(&self, i: usize) -> usize {
        self.irreps[i].degree
    }

    pub fn value(&self, i: usize, class: usize) -> &Cyclo {
        &self.irreps[i].values[class]
    }

    pub fn trivial_index(&self) -> usize {
        (0..self.n_irreps())
            .find(|&i| self.irreps[i].values.iter().all(|v| v.is_one()))
            .expect("trivial character present")
    }

    /// <f1, f2> = (1/|G|) sum |C| f1(C) conj(f2(C)), exact.
    pub fn inner_product(&self, f1: &[Cyclo], f2: &[Cyclo]) -> Cyclo {
        let mut acc = Cyclo::zero();
        for c in 0..self.n_classes() {
            let term = &f1[c] * &f2[c].conj();
            acc = &acc + &term.scale(&crate::cyclo::Rat::from_integer(num::BigInt::from(
                self.classes.sizes[c] as i64,
            )));
        }
        acc.scale(
            &(crate::cyclo::Rat::from_integer(num::BigInt::from(1))
                / crate::cyclo::Rat::from_integer(num::BigInt::from(self.group.order() as i64))),
        )
    }

    /// Decompose a class function into irreducible multiplicities; errors
    /// when some inner product is not a rational integer.
    pub fn decompose(&self, values: &[Cyclo]) -> Result<Vec<i64>> {
        let mut coeffs = Vec::with_capacity(self.n_irreps());
        for (i, irr) in self.irreps.iter().enumerate() {
            let ip = self.inner_product(values, &irr.values);
            match ip.as_integer() {
                Some(n) => {
                    use num::ToPrimitive;
                    coeffs.push(n.to_i64().ok_or_else(|| {
                        Error::NotVirtualCharacter(i, ip.to_string())
                    })?)
                }
                None => return Err(Error::NotVirtualCharacter(i, ip.to_string())),
            }
        }
        Ok(coeffs)
    }

    /// Index of the dual (complex-conjugate) of each irreducible.
    pub fn dual_index(&self, i: usize) -> usize {
        let map = self.dual_map.get_or_init(|| {
            (0..self.n_irreps())
                .map(|i| {
                    let conj: Vec<Cyclo> = (0..self.n_classes())
                        .map(|c| self.irreps[i].values[self.classes.inverse_class[c] as usize].clone())
                        .collect();
                    self.find_irrep(&conj).expect("dual of an irreducible")
                })
                .collect()
        });
        map[i]
    }

    /// Exact-match lookup of an irreducible by value vector.
    pub fn find_irrep(&self, values: &[Cyclo]) -> Option<usize> {
        self.irreps
            .iter()
            .position(|irr| irr.values.iter().zip(values).all(|(a, b)| a == b))
    }

    /// Index of irrep `i` twisted by linear character `l` (always another
    /// irreducible of the same degree).
    pub fn twist_index(&self, i: usize, l: usize) -> usize {
        assert!(l < self.linear_count, "twist must be by a linear character");
        if let Some(&t) = self.twist_cache.lock().unwrap().get(&(i, l)) {
            return t;
        }
        let values: Vec<Cyclo> = (0..self.n_classes())
            .map(|c| &self.irreps[i].values[c] * &self.irreps[l].values[c])
            .collect();
        let t = self.find_irrep(&values).expect("twist of an irreducible");
        self.twist_cache.lock().unwrap().insert((i, l), t);
        t
    }

    /// Multiplicities of the product of two irreducibles, cached.
    pub fn tensor_irreps(&self, i: usize, j: usize) -> Arc<Vec<i64>> {
        let key = if i <= j { (i, j) } else { (j, i) };
        if let Some(v) = self.tensor_cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let values: Vec<Cyclo> = (0..self.n_classes())
            .map(|c| &self.irreps[i].values[c] * &self.irreps[j].values[c])
            .collect();
        let coeffs = Arc::new(self.decompose(&values).expect("product of characters"));
        self.tensor_cache.lock().unwrap().insert(key, coeffs.clone());
        coeffs
    }

    /// Indices of the quadratic linear characters (order dividing 2),
    /// including the trivial one.
    pub fn quadratic_linear_indices(&self) -> Vec<usize> {
        (0..self.linear_count)
            .filter(|&l| {
                self.irreps[l]
                    .values
                    .iter()
                    .all(|v| v.is_one() || *v == Cyclo::from_int(-1))
            })
            .collect()
    }

    /// Product of two linear characters, as a linear index.
    pub fn linear_product(&self, a: usize, b: usize) -> usize {
        self.twist_index(a, b)
    }

    pub fn linear_inverse(&self, a: usize) -> usize {
        self.dual_index(a)
    }

    /// All non-checked invariants of a character table, verified exactly.
    fn validate(&self) {
        let g = self.group.order();
        assert_eq!(self.n_irreps(), self.n_classes());
        let sum: usize = self.irreps.iter().map(|i| i.degree * i.degree).sum();
        assert_eq!(sum, g, "sum of squared degrees");
        for i in 0..self.n_irreps() {
            for j in i..self.n_irreps() {
                let ip = self.inner_product(&self.irreps[i].values, &self.irreps[j].values);
                let expect = if i == j { Cyclo::one() } else { Cyclo::zero() };
                assert!(ip == expect, "row orthogonality failed at ({i},{j})");
            }
        }
    }
}

fn sort_canonically(group: &Arc<GroupTable>, irreps: &mut Vec<Irrep>) {
    let e = group.exponent() as u32;
    let key = |irr: &Irrep| -> Vec<Cyclo> {
        irr.values
            .iter()
            .map(|v| v.lift_to(e).expect("exponent within bound"))
            .collect()
    };
    let keyed: Vec<(usize, Vec<Cyclo>)> = irreps.iter().map(|i| (i.degree, key(i))).collect();
    let mut order: Vec<usize> = (0..irreps.len()).collect();
    order.sort_by(|&a, &b| {
        keyed[a]
            .0
            .cmp(&keyed[b].0)
            .then_with(|| {
                for (x, y) in keyed[a].1.iter().zip(keyed[b].1.iter()) {
                    let c = x.sort_cmp(y);
                    if c != std::cmp::Ordering::Equal {
                        return c;
                    }
                }
                std::cmp::Ordering::Equal
            })
    });
    let sorted: Vec<Irrep> = order.iter().map(|&i| irreps[i].clone()).collect();
    *irreps = sorted;
}

// ---------------------------------------------------------------------------
// Abelian fast path: build the dual group along a cyclic chain.
// ---------------------------------------------------------------------------

fn abelian_irreps(group: &Arc<GroupTable>, classes: &Classes) -> Vec<Irrep> {
    let n = group.order();
    let e = group.exponent();
    // Chain e = H_0 < H_1 < ... with cyclic steps; characters are exponent
    // vectors t: G -> Z/e with chi(x) = zeta_e^t(x).
    let mut in_h = vec![false; n];
    in_h[0] = true;
    let mut h_elems: Vec<usize> = vec![0];
    // Each character is a full exponent map on the current H.
    let mut chars: Vec<Vec<u64>> = vec![vec![0u64; n]];
    while h_elems.len() < n {
        let g = (0..n).find(|&x| !in_h[x]).expect("proper subgroup");
        // Relative order r: least r > 0 with g^r in H.
        let mut r = 1usize;
        let mut p = g;
        while !in_h[p] {
            p = group.mul(p, g);
            r += 1;
        }
        let h0 = p; // g^r
        let mut new_elems: Vec<usize> = Vec::new();
        for &h in &h_elems {
            let mut x = h;
            for _ in 1..r {
                x = group.mul(x, g);
                new_elems.push(x);
            }
        }
        let mut new_chars: Vec<Vec<u64>> = Vec::with_capacity(chars.len() * r);
        for t in &chars {
            let a = t[h0];
            debug_assert_eq!(a % (e / num::integer::gcd(e, r as u64 * e / e)) % 1, 0);
            // Solve r * t(g) = a (mod e); solvable since a is divisible by r.
            debug_assert_eq!(a % r as u64, 0);
            let t0 = a / r as u64;
            for s in 0..r as u64 {
                let tg = (t0 + s * (e / r as u64)) % e;
                let mut ext = t.clone();
                let mut x = 0usize;
                let mut acc = 0u64;
                for _ in 1..=r - 1 {
                    x = group.mul(x, g);
                    acc = (acc + tg) % e;
                    for &h in &h_elems {
                        ext[group.mul(h, x)] = (t[h] + acc) % e;
                    }
                }
                new_chars.push(ext);
            }
        }
        for &x in &new_elems {
            in_h[x] = true;
            h_elems.push(x);
        }
        chars = new_chars;
    }
    chars
        .into_iter()
        .map(|t| {
            let values: Vec<Cyclo> = classes
                .reps
                .iter()
                .map(|&rep| {
                    Cyclo::root_of_unity(e, t[rep as usize] as i64).expect("exponent within bound")
                })
                .collect();
            Irrep { degree: 1, values }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Dixon's method for nonabelian groups.
// ---------------------------------------------------------------------------

struct Fp {
    p: u64,
}

impl Fp {
    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.p as u128) as u64
    }
    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }
    fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    r
}

/// Row-reduce a matrix over F_p in place; returns pivot columns.
fn rref(fp: &Fp, rows: &mut Vec<Vec<u64>>) -> Vec<usize> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        if let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) {
            rows.swap(r, sel);
            let invp = fp.inv(rows[r][c]);
            for x in rows[r].iter_mut() {
                *x = fp.mul(*x, invp);
            }
            for i in 0..rows.len() {
                if i != r && rows[i][c] != 0 {
                    let f = rows[i][c];
                    for j in 0..ncols {
                        let t = fp.mul(f, rows[r][j]);
                        rows[i][j] = fp.sub(rows[i][j], t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    rows.truncate(r);
    pivots
}

/// Nullspace basis (as rows) of an n x n matrix over F_p.
fn nullspace(fp: &Fp, mat: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = mat.len();
    let mut rows: Vec<Vec<u64>> = mat.to_vec();
    let pivots = rref(fp, &mut rows);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; n];
        v[free] = 1;
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = fp.sub(0, rows[ri][free]);
        }
        basis.push(v);
    }
    basis
}

fn dixon_irreps(group: &Arc<GroupTable>, classes: &Classes) -> Vec<Irrep> {
    let g = group.order() as u64;
    let k = classes.len();
    let e = group.exponent();
    // p = 1 mod e, p > 2 sqrt(|G|); then p does not divide |G|.
    let lower = 2 * isqrt(g);
    let mut p = e + 1;
    while p <= lower || !is_prime(p) {
        p += e;
    }
    let fp = Fp { p };

    // Class multiplication coefficients a[i][j][l]: C_i C_j = sum_l a C_l.
    let mut a = vec![vec![vec![0u64; k]; k]; k];
    for l in 0..k {
        let z = classes.reps[l] as usize;
        for x in 0..group.order() {
            let i = classes.class_of[x] as usize;
            let j = classes.class_of[group.mul(group.inv(x), z)] as usize;
            a[i][j][l] += 1;
        }
        // Each x in C_i contributes |C_l| pairs spread over the class; the
        // count above fixes z, so scale to the standard normalization.
        for i in 0..k {
            for j in 0..k {
                a[i][j][l] %= p;
            }
        }
    }
    // Operator T_i on the class-sum space: [T_i]_{l, j} = a[i][j][l].
    let mat = |i: usize| -> Vec<Vec<u64>> {
        (0..k)
            .map(|l| (0..k).map(|j| a[i][j][l]).collect())
            .collect()
    };

    // Split the space into common eigenvectors, deterministically.
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..k)
        .map(|i| {
            let mut v = vec![0u64; k];
            v[i] = 1;
            v
        })
        .collect()];
    for i in 1..k {
        let m = mat(i);
        let mut next: Vec<Vec<Vec<u64>>> = Vec::new();
        for space in spaces.into_iter() {
            let d = space.len();
            if d == 1 {
                next.push(space);
                continue;
            }
            // Matrix of T_i restricted to the span, via RREF coordinates.
            let mut basis = space.clone();
            let pivots = rref(&fp, &mut basis);
            let coords = |v: &[u64]| -> Vec<u64> {
                // v must lie in the span; coordinates read off pivot columns.
                let mut coeffs = vec![0u64; basis.len()];
                let mut rem = v.to_vec();
                for (bi, &pc) in pivots.iter().enumerate() {
                    let c = rem[pc];
                    if c != 0 {
                        coeffs[bi] = c;
                        for j in 0..k {
                            let t = fp.mul(c, basis[bi][j]);
                            rem[j] = fp.sub(rem[j], t);
                        }
                    }
                }
                debug_assert!(rem.iter().all(|&x| x == 0), "vector outside subspace");
                coeffs
            };
            let mut r = vec![vec![0u64; d]; d];
            for (bi, b) in basis.iter().enumerate() {
                let img: Vec<u64> = (0..k)
                    .map(|l| {
                        let mut s = 0u64;
                        for j in 0..k {
                            s = fp.add(s, fp.mul(m[l][j], b[j]));
                        }
                        s
                    })
                    .collect();
                let c = coords(&img);
                for (bj, &cj) in c.iter().enumerate() {
                    r[bj][bi] = cj;
                }
            }
            // Eigen-split the restricted operator by scanning eigenvalues.
            let mut found = 0usize;
            for lam in 0..p {
                if found == d {
                    break;
                }
                let mut shifted = r.clone();
                for t in 0..d {
                    shifted[t][t] = fp.sub(shifted[t][t], lam);
                }
                let ns = nullspace(&fp, &shifted);
                if ns.is_empty() {
                    continue;
                }
                found += ns.len();
                let sub: Vec<Vec<u64>> = ns
                    .iter()
                    .map(|c| {
                        let mut v = vec![0u64; k];
                        for (bi, &ci) in c.iter().enumerate() {
                            for j in 0..k {
                                v[j] = fp.add(v[j], fp.mul(ci, basis[bi][j]));
                            }
                        }
                        v
                    })
                    .collect();
                next.push(sub);
            }
            assert_eq!(found, d, "class operator must split over F_p");
        }
        spaces = next;
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
    }
    assert!(spaces.iter().all(|s| s.len() == 1), "splitting incomplete");

    // Primitive e-th root of unity in F_p.
    let mut factors = Vec::new();
    {
        let mut m = p - 1;
        let mut q = 2;
        while q * q <= m {
            if m % q == 0 {
                factors.push(q);
                while m % q == 0 {
                    m /= q;
                }
            }
            q += 1;
        }
        if m > 1 {
            factors.push(m);
        }
    }
    let gen = (2..p)
        .find(|&c| factors.iter().all(|&q| fp.pow(c, (p - 1) / q) != 1))
        .expect("F_p has a generator");
    let w = fp.pow(gen, (p - 1) / e);

    let id_class = classes.class_of[0] as usize;
    let mut irreps: Vec<Irrep> = Vec::with_capacity(k);
    for space in spaces {
        let v = &space[0];
        let v0 = v[id_class];
        assert_ne!(v0, 0, "idempotent coordinate at identity class");
        let inv0 = fp.inv(v0);
        // u_j = chi(rep_j^{-1}) / chi(1).
        let u: Vec<u64> = v.iter().map(|&x| fp.mul(x, inv0)).collect();
        let ustar =
            |j: usize| -> u64 { u[classes.inverse_class[j] as usize] };
        // omega_j = |C_j| chi(g_j) / chi(1) = |C_j| u_{j*}.
        let omega: Vec<u64> = (0..k)
            .map(|j| fp.mul(classes.sizes[j] as u64 % p, ustar(j)))
            .collect();
        let mut t = 0u64;
        for j in 0..k {
            let term = fp.mul(
                fp.mul(omega[j], omega[classes.inverse_class[j] as usize]),
                fp.inv(classes.sizes[j] as u64 % p),
            );
            t = fp.add(t, term);
        }
        let d2 = fp.mul(g % p, fp.inv(t));
        let d = (1..=isqrt(g))
            .find(|&d| fp.mul(d, d) == d2)
            .expect("degree recoverable mod p");
        // theta_j = chi(rep_j) mod p.
        let theta: Vec<u64> = (0..k).map(|j| fp.mul(d, ustar(j))).collect();
        // Lift each value from power-map multiplicities.
        let values: Vec<Cyclo> = (0..k)
            .map(|j| {
                let m = group.element_order(classes.reps[j] as usize) as u64;
                let eta = fp.pow(w, e / m);
                let minv = fp.inv(m % p);
                let mut terms: Vec<(usize, i64)> = Vec::new();
                for texp in 0..m {
                    let mut s = 0u64;
                    for kk in 0..m {
                        let cls = group.power_class(j, kk as i64);
                        let coef = fp.pow(eta, (texp * kk) % m);
                        // eta^{-t k} = inverse power
                        s = fp.add(s, fp.mul(theta[cls], fp.inv(coef)));
                    }
                    let mult = fp.mul(minv, s);
                    assert!(mult <= d, "eigenvalue multiplicity exceeds degree");
                    if mult > 0 {
                        terms.push((texp as usize, mult as i64));
                    }
                }
                Cyclo::from_root_combination(m, &terms).expect("element order within bound")
            })
            .collect();
        irreps.push(Irrep {
            degree: d as usize,
            values,
        });
    }
    irreps
}
