//! Finite groups as explicit multiplication tables: construction from
//! permutation generators, conjugacy structure, subgroup discovery,
//! quotients, and exact character tables (see `chartab`).

pub mod catalog;
pub mod chartab;

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use once_cell::sync::OnceCell;

use crate::error::{Error, Result};
use crate::perm::Perm;

pub use chartab::{char_table, CharTable, Irrep};

/// Default bound on closure size when building groups from generators.
pub const DEFAULT_ORDER_BOUND: usize = 4096;

/// A finite group given by its full multiplication table over element
/// indices `0..order`, with element 0 the identity.
pub struct GroupTable {
    order: usize,
    name: String,
    mul: Vec<u16>,
    inv: Vec<u16>,
    elem_order: Vec<u32>,
    classes: OnceCell<Arc<Classes>>,
    char_table: OnceCell<Arc<CharTable>>,
    lattice: OnceCell<Arc<Vec<Arc<SubgroupData>>>>,
    commutator: OnceCell<Vec<u16>>,
    abelianization: OnceCell<(Arc<GroupTable>, Vec<u16>)>,
    /// Canonical store of subgroup data keyed by member set, so repeated
    /// lookups share lazily-built subtables and restriction matrices.
    sub_cache: Mutex<HashMap<Vec<u16>, Arc<SubgroupData>>>,
}

impl std::fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GroupTable({}, order {})", self.name, self.order)
    }
}

/// Conjugacy-class data. Classes are sorted by (size, smallest member);
/// the representative of a class is its smallest element index.
pub struct Classes {
    pub class_of: Vec<u32>,
    pub reps: Vec<u16>,
    pub sizes: Vec<usize>,
    pub members: Vec<Vec<u16>>,
    pub inverse_class: Vec<u32>,
}

impl Classes {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

impl GroupTable {
    fn from_mul_table(name: String, order: usize, mul: Vec<u16>) -> Result<Arc<GroupTable>> {
        assert_eq!(mul.len(), order * order);
        // Identity and inverse checks are cheap and always run; the full
        // associativity scan is restricted to small tables because the
        // structured constructors are associative by construction.
        for x in 0..order {
            if mul[0 * order + x] != x as u16 || mul[x * order + 0] != x as u16 {
                return Err(Error::Invariant("element 0 is not an identity".into()));
            }
        }
        let mut inv = vec![u16::MAX; order];
        for x in 0..order {
            for y in 0..order {
                if mul[x * order + y] == 0 {
                    inv[x] = y as u16;
                }
            }
            if inv[x] == u16::MAX {
                return Err(Error::Invariant(format!("element {x} has no inverse")));
            }
        }
        if order <= 512 {
            for a in 0..order {
                for b in 0..order {
                    let ab = mul[a * order + b] as usize;
                    for c in 0..order {
                        let bc = mul[b * order + c] as usize;
                        if mul[ab * order + c] != mul[a * order + bc] {
                            return Err(Error::Invariant("multiplication not associative".into()));
                        }
                    }
                }
            }
        }
        let mut elem_order = vec![0u32; order];
        for x in 0..order {
            let mut n = 1u32;
            let mut y = x;
            while y != 0 {
                y = mul[y * order + x] as usize;
                n += 1;
            }
            elem_order[x] = if x == 0 { 1 } else { n };
        }
        Ok(Arc::new(GroupTable {
            order,
            name,
            mul,
            inv,
            elem_order,
            classes: OnceCell::new(),
            char_table: OnceCell::new(),
            lattice: OnceCell::new(),
            commutator: OnceCell::new(),
            abelianization: OnceCell::new(),
            sub_cache: Mutex::new(HashMap::new()),
        }))
    }

    /// Closure of a generating set inside any finitely-representable monoid.
    /// Element 0 is the identity; the remaining indices follow breadth-first
    /// discovery order, taking products with generators in the given order.
    pub fn from_closure<T, F>(
        name: &str,
        identity: T,
        generators: &[T],
        mul_fn: F,
        bound: usize,
    ) -> Result<Arc<GroupTable>>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let mut index: HashMap<T, u16> = HashMap::new();
        let mut elems: Vec<T> = vec![identity.clone()];
        index.insert(identity, 0);
        let mut queue: VecDeque<usize> = VecDeque::new();
        queue.push_back(0);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let y = mul_fn(&elems[i], g);
                if !index.contains_key(&y) {
                    if elems.len() >= bound {
                        return Err(Error::ClosureBound(bound));
                    }
                    index.insert(y.clone(), elems.len() as u16);
                    elems.push(y);
                    queue.push_back(elems.len() - 1);
                }
            }
        }
        let order = elems.len();
        let mut mul = vec![0u16; order * order];
        for a in 0..order {
            for b in 0..order {
                let ab = mul_fn(&elems[a], &elems[b]);
                mul[a * order + b] = *index
                    .get(&ab)
                    .ok_or_else(|| Error::Invariant("generating set not closed".into()))?;
            }
        }
        Self::from_mul_table(name.to_string(), order, mul)
    }

    /// Closure of permutation generators on a common domain.
    pub fn from_permutations(name: &str, generators: &[Perm], bound: usize) -> Result<Arc<GroupTable>> {
        if generators.is_empty() {
            return Self::from_mul_table(name.to_string(), 1, vec![0]);
        }
        let degree = generators[0].degree();
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(Error::DomainMismatch);
        }
        Self::from_closure(
            name,
            Perm::identity(degree),
            generators,
            |a, b| a.compose(b),
            bound,
        )
    }

    /// The metacyclic group <r, s | r^m = 1, s^n = r^t, s r s^-1 = r^k>.
    /// Covers cyclic, dihedral, quaternion, semidihedral and modular cases.
    pub fn metacyclic(name: &str, m: usize, n: usize, k: usize, t: usize) -> Arc<GroupTable> {
        assert!(m >= 1 && n >= 1);
        let powk = |mut b: usize| {
            let mut acc = 1usize;
            let mut base = k % m;
            while b > 0 {
                if b & 1 == 1 {
                    acc = acc * base % m;
                }
                base = base * base % m;
                b >>= 1;
            }
            acc
        };
        assert_eq!(powk(n), 1 % m, "k^n must be 1 mod m");
        assert_eq!(t * (k + m - 1) % m, 0, "s^n = r^t must be consistent");
        let order = m * n;
        let idx = |a: usize, b: usize| a * n + b;
        let mut mul = vec![0u16; order * order];
        for a1 in 0..m {
            for b1 in 0..n {
                for a2 in 0..m {
                    for b2 in 0..n {
                        let carry = (b1 + b2) / n;
                        let a = (a1 + powk(b1) * a2 + carry * t) % m;
                        let b = (b1 + b2) % n;
                        mul[idx(a1, b1) * order + idx(a2, b2)] = idx(a, b) as u16;
                    }
                }
            }
        }
        Self::from_mul_table(name.to_string(), order, mul).expect("metacyclic data is a group")
    }

    pub fn direct_product(name: &str, a: &GroupTable, b: &GroupTable) -> Arc<GroupTable> {
        let order = a.order * b.order;
        let idx = |x: usize, y: usize| x * b.order + y;
        let mut mul = vec![0u16; order * order];
        for x1 in 0..a.order {
            for y1 in 0..b.order {
                for x2 in 0..a.order {
                    for y2 in 0..b.order {
                        mul[idx(x1, y1) * order + idx(x2, y2)] =
                            idx(a.mul(x1, x2), b.mul(y1, y2)) as u16;
                    }
                }
            }
        }
        Self::from_mul_table(name.to_string(), order, mul).expect("product of groups is a group")
    }

    /// Quotient by a normal subgroup, with the projection map. Quotient
    /// element indices follow the sorted minimal coset representatives, so
    /// the identity coset is element 0.
    pub fn quotient(
        name: &str,
        g: &GroupTable,
        normal_members: &[u16],
    ) -> Result<(Arc<GroupTable>, Vec<u16>)> {
        if !g.is_normal_set(normal_members) {
            return Err(Error::NotNormal);
        }
        let mut coset_min = vec![u16::MAX; g.order];
        for x in 0..g.order {
            if coset_min[x] != u16::MAX {
                continue;
            }
            let mut min = x as u16;
            let coset: Vec<usize> = normal_members.iter().map(|&n| g.mul(x, n as usize)).collect();
            for &y in &coset {
                min = min.min(y as u16);
            }
            for &y in &coset {
                coset_min[y] = min;
            }
        }
        let mut reps: Vec<u16> = coset_min.clone();
        reps.sort_unstable();
        reps.dedup();
        let rep_index: HashMap<u16, u16> = reps
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, i as u16))
            .collect();
        let order = reps.len();
        let proj: Vec<u16> = (0..g.order).map(|x| rep_index[&coset_min[x]]).collect();
        let mut mul = vec![0u16; order * order];
        for (i, &ri) in reps.iter().enumerate() {
            for (j, &rj) in reps.iter().enumerate() {
                mul[i * order + j] = proj[g.mul(ri as usize, rj as usize)];
            }
        }
        let q = Self::from_mul_table(name.to_string(), order, mul)?;
        Ok((q, proj))
    }

    /// Central product (A x B) / <(za, zb)> for central involutions za, zb.
    pub fn central_product(name: &str, a: &GroupTable, b: &GroupTable, za: usize, zb: usize) -> Arc<GroupTable> {
        assert_eq!(a.elem_order[za], 2);
        assert_eq!(b.elem_order[zb], 2);
        let prod = Self::direct_product("tmp", a, b);
        let z = za * b.order + zb;
        let (q, _) = Self::quotient(name, &prod, &[0, z as u16]).expect("central subgroup is normal");
        q
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn conj(&self, g: usize, x: usize) -> usize {
        // g x g^-1
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn pow(&self, x: usize, k: i64) -> usize {
        let o = self.elem_order[x] as i64;
        let mut k = k.rem_euclid(o) as u32;
        let mut acc = 0usize;
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> u32 {
        self.elem_order[x]
    }

    pub fn exponent(&self) -> u64 {
        self.elem_order
            .iter()
            .fold(1u64, |acc, &o| num::integer::lcm(acc, o as u64))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn classes(&self) -> Arc<Classes> {
        self.classes
            .get_or_init(|| {
                let mut class_of = vec![u32::MAX; self.order];
                let mut raw: Vec<Vec<u16>> = Vec::new();
                for x in 0..self.order {
                    if class_of[x] != u32::MAX {
                        continue;
                    }
                    let id = raw.len() as u32;
                    let mut members = Vec::new();
                    for g in 0..self.order {
                        let y = self.conj(g, x);
                        if class_of[y] == u32::MAX {
                            class_of[y] = id;
                            members.push(y as u16);
                        }
                    }
                    members.sort_unstable();
                    raw.push(members);
                }
                let mut order_idx: Vec<usize> = (0..raw.len()).collect();
                order_idx.sort_by_key(|&i| (raw[i].len(), raw[i][0]));
                let members: Vec<Vec<u16>> = order_idx.iter().map(|&i| raw[i].clone()).collect();
                let mut class_of = vec![0u32; self.order];
                for (ci, m) in members.iter().enumerate() {
                    for &x in m {
                        class_of[x as usize] = ci as u32;
                    }
                }
                let reps: Vec<u16> = members.iter().map(|m| m[0]).collect();
                let sizes: Vec<usize> = members.iter().map(|m| m.len()).collect();
                let inverse_class: Vec<u32> = reps
                    .iter()
                    .map(|&r| class_of[self.inv(r as usize)])
                    .collect();
                Arc::new(Classes {
                    class_of,
                    reps,
                    sizes,
                    members,
                    inverse_class,
                })
            })
            .clone()
    }

    /// Class index of the k-th power of the representative of class c.
    pub fn power_class(&self, c: usize, k: i64) -> usize {
        let cl = self.classes();
        cl.class_of[self.pow(cl.reps[c] as usize, k)] as usize
    }

    fn is_subgroup_set(&self, members: &[u16]) -> bool {
        let mut inset = vec![false; self.order];
        for &x in members {
            inset[x as usize] = true;
        }
        if !inset[0] {
            return false;
        }
        members.iter().all(|&x| {
            inset[self.inv(x as usize)]
                && members.iter().all(|&y| inset[self.mul(x as usize, y as usize)])
        })
    }

    fn is_normal_set(&self, members: &[u16]) -> bool {
        if !self.is_subgroup_set(members) {
            return false;
        }
        let mut inset = vec![false; self.order];
        for &x in members {
            inset[x as usize] = true;
        }
        (0..self.order).all(|g| members.iter().all(|&x| inset[self.conj(g, x as usize)]))
    }

    fn closure_set(&self, seed: &[u16]) -> Vec<u16> {
        let mut inset = vec![false; self.order];
        inset[0] = true;
        let mut elems = vec![0u16];
        let mut queue: VecDeque<u16> = VecDeque::new();
        queue.push_back(0);
        for &s in seed {
            if !inset[s as usize] {
                inset[s as usize] = true;
                elems.push(s);
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &s in seed {
                for y in [self.mul(x as usize, s as usize), self.mul(s as usize, x as usize)] {
                    if !inset[y] {
                        inset[y] = true;
                        elems.push(y as u16);
                        queue.push_back(y as u16);
                    }
                }
            }
            let xi = self.inv(x as usize);
            if !inset[xi] {
                inset[xi] = true;
                elems.push(xi as u16);
                queue.push_back(xi as u16);
            }
        }
        elems.sort_unstable();
        elems
    }

    /// Commutator subgroup [G, G].
    pub fn commutator_subgroup(&self) -> &[u16] {
        self.commutator.get_or_init(|| {
            let mut comms: Vec<u16> = Vec::new();
            for a in 0..self.order {
                for b in 0..self.order {
                    let c = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                    comms.push(c as u16);
                }
            }
            comms.sort_unstable();
            comms.dedup();
            self.closure_set(&comms)
        })
    }

    /// Abelianization G/[G,G] with the projection map.
    pub fn abelianization(&self) -> (Arc<GroupTable>, Vec<u16>) {
        self.abelianization
            .get_or_init(|| {
                let derived = self.commutator_subgroup().to_vec();
                Self::quotient(&format!("{}^ab", self.name), self, &derived)
                    .expect("derived subgroup is normal")
            })
            .clone()
    }

    /// True when the 2-part of the abelianization is exactly (Z/2)^2, the
    /// finite stand-in for residue characteristic p != 2 (a p-adic field
    /// with p odd has exactly three quadratic characters).
    pub fn models_odd_residue(&self) -> bool {
        let (ab, _) = self.abelianization();
        let two_part: Vec<u32> = (0..ab.order)
            .map(|x| ab.elem_order[x])
            .filter(|o| o.is_power_of_two())
            .collect();
        two_part.len() == 4 && two_part.iter().all(|&o| o <= 2)
    }

    /// All subgroups, as sorted member lists, ordered by (order, members).
    pub fn subgroup_lattice(self: &Arc<Self>) -> Arc<Vec<Arc<SubgroupData>>> {
        self.lattice
            .get_or_init(|| {
                let mut seen: HashMap<Vec<u16>, ()> = HashMap::new();
                let mut all: Vec<Vec<u16>> = Vec::new();
                let trivial = vec![0u16];
                seen.insert(trivial.clone(), ());
                all.push(trivial);
                let mut queue: VecDeque<usize> = VecDeque::new();
                queue.push_back(0);
                while let Some(i) = queue.pop_front() {
                    let h = all[i].clone();
                    if h.len() == self.order {
                        continue;
                    }
                    let mut inset = vec![false; self.order];
                    for &x in &h {
                        inset[x as usize] = true;
                    }
                    for g in 1..self.order {
                        if inset[g] {
                            continue;
                        }
                        let mut seed = h.clone();
                        seed.push(g as u16);
                        let j = self.closure_set(&seed);
                        if !seen.contains_key(&j) {
                            seen.insert(j.clone(), ());
                            all.push(j);
                            queue.push_back(all.len() - 1);
                        }
                    }
                }
                all.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
                let data = all.into_iter().map(|members| self.intern_subgroup(members)).collect();
                Arc::new(data)
            })
            .clone()
    }

    /// Index-2 subgroups, ordered by member list. Computed through the
    /// abelianization, so no full lattice is needed.
    pub fn index2_subgroups(self: &Arc<Self>) -> Vec<Subgroup> {
        let (ab, proj) = self.abelianization();
        let mut out: Vec<Vec<u16>> = maximal_subgroups_index_p(&ab, 2)
            .into_iter()
            .map(|habs| {
                let mut inq = vec![false; ab.order];
                for &x in &habs {
                    inq[x as usize] = true;
                }
                let mut members: Vec<u16> = (0..self.order)
                    .filter(|&x| inq[proj[x] as usize])
                    .map(|x| x as u16)
                    .collect();
                members.sort_unstable();
                members
            })
            .collect();
        out.sort();
        out.into_iter()
            .map(|members| Subgroup {
                parent: self.clone(),
                data: self.intern_subgroup(members),
            })
            .collect()
    }

    /// Normal subgroups of index 2, 3 or 4 (every such quotient is abelian,
    /// so they all contain the derived subgroup).
    pub fn normal_subgroups_to_index4(self: &Arc<Self>) -> Vec<Subgroup> {
        let (ab, proj) = self.abelianization();
        let mut member_sets: Vec<Vec<u16>> = Vec::new();
        let mut push = |habs: Vec<u16>| {
            let mut inq = vec![false; ab.order];
            for &x in &habs {
                inq[x as usize] = true;
            }
            let mut members: Vec<u16> = (0..self.order)
                .filter(|&x| inq[proj[x] as usize])
                .map(|x| x as u16)
                .collect();
            members.sort_unstable();
            member_sets.push(members);
        };
        let index2 = maximal_subgroups_index_p(&ab, 2);
        for h in &index2 {
            push(h.clone());
        }
        for h in maximal_subgroups_index_p(&ab, 3) {
            push(h);
        }
        // Index 4: index-2 subgroups of index-2 subgroups of the abelianization.
        for h in &index2 {
            let (sub, emb) = subtable_of_abelian(&ab, h);
            for h2 in maximal_subgroups_index_p(&sub, 2) {
                let lifted: Vec<u16> = h2.iter().map(|&x| emb[x as usize]).collect();
                push(lifted);
            }
        }
        member_sets.sort();
        member_sets.dedup();
        member_sets
            .into_iter()
            .map(|members| Subgroup {
                parent: self.clone(),
                data: self.intern_subgroup(members),
            })
            .collect()
    }

    /// Normal subgroups H with G/H a (possibly trivial) elementary abelian
    /// 2-group: exactly the subgroups containing <[G,G], squares>.
    pub fn elem_abelian_2_quotient_normals(self: &Arc<Self>) -> Vec<Subgroup> {
        let mut seed: Vec<u16> = self.commutator_subgroup().to_vec();
        for x in 0..self.order {
            seed.push(self.mul(x, x) as u16);
        }
        seed.sort_unstable();
        seed.dedup();
        let base = self.closure_set(&seed);
        let (q, proj) = Self::quotient("tmp", self, &base).expect("verbal subgroup is normal");
        // Every subgroup of the F2-vector-space quotient pulls back.
        let subspaces = all_subgroups_elementary_abelian(&q, 2);
        let mut out: Vec<Vec<u16>> = subspaces
            .into_iter()
            .map(|s| {
                let mut inq = vec![false; q.order];
                for &x in &s {
                    inq[x as usize] = true;
                }
                let mut members: Vec<u16> = (0..self.order)
                    .filter(|&x| inq[proj[x] as usize])
                    .map(|x| x as u16)
                    .collect();
                members.sort_unstable();
                members
            })
            .collect();
        out.sort();
        out.dedup();
        out.into_iter()
            .map(|members| Subgroup {
                parent: self.clone(),
                data: self.intern_subgroup(members),
            })
            .collect()
    }

    /// Shared subgroup data for a member set; the set must be verified (or
    /// known) to be closed before interning.
    fn intern_subgroup(self: &Arc<Self>, members: Vec<u16>) -> Arc<SubgroupData> {
        let mut cache = self.sub_cache.lock().unwrap();
        if let Some(d) = cache.get(&members) {
            return d.clone();
        }
        let is_normal = self.is_normal_set(&members);
        let data = Arc::new(SubgroupData::new(members.clone(), self.order, is_normal));
        cache.insert(members, data.clone());
        data
    }

    pub fn subgroup(self: &Arc<Self>, members: Vec<u16>) -> Result<Subgroup> {
        let mut members = members;
        members.sort_unstable();
        members.dedup();
        if let Some(d) = self.sub_cache.lock().unwrap().get(&members) {
            return Ok(Subgroup {
                parent: self.clone(),
                data: d.clone(),
            });
        }
        if !self.is_subgroup_set(&members) {
            return Err(Error::Invariant("member set is not a subgroup".into()));
        }
        Ok(Subgroup {
            parent: self.clone(),
            data: self.intern_subgroup(members),
        })
    }

    pub fn full_subgroup(self: &Arc<Self>) -> Subgroup {
        let members: Vec<u16> = (0..self.order as u16).collect();
        Subgroup {
            parent: self.clone(),
            data: self.intern_subgroup(members),
        }
    }
}

/// Kernels of the order-p linear characters of an abelian group, i.e. its
/// maximal subgroups of index p.
fn maximal_subgroups_index_p(ab: &GroupTable, p: usize) -> Vec<Vec<u16>> {
    debug_assert!(ab.is_abelian());
    // Subgroup of p-th powers; in an abelian group the set is a subgroup.
    let mut powers: Vec<u16> = (0..ab.order).map(|x| ab.pow(x, p as i64) as u16).collect();
    powers.sort_unstable();
    powers.dedup();
    let (v, proj) = GroupTable::quotient("tmp", ab, &powers).expect("abelian subgroups are normal");
    if v.order == 1 {
        return Vec::new();
    }
    let subspaces = all_subgroups_elementary_abelian(&v, p);
    let mut out: Vec<Vec<u16>> = subspaces
        .into_iter()
        .filter(|s| s.len() * p == v.order)
        .map(|s| {
            let mut inv = vec![false; v.order];
            for &x in &s {
                inv[x as usize] = true;
            }
            let mut members: Vec<u16> = (0..ab.order)
                .filter(|&x| inv[proj[x] as usize])
                .map(|x| x as u16)
                .collect();
            members.sort_unstable();
            members
        })
        .collect();
    out.sort();
    out
}

/// All subgroups of an elementary abelian p-group (each one a subspace).
fn all_subgroups_elementary_abelian(v: &GroupTable, p: usize) -> Vec<Vec<u16>> {
    debug_assert!(v
        .elem_order
        .iter()
        .all(|&o| o == 1 || o == p as u32));
    let mut found: Vec<Vec<u16>> = vec![vec![0u16]];
    let mut seen: HashMap<Vec<u16>, ()> = HashMap::new();
    seen.insert(vec![0u16], ());
    let mut queue: VecDeque<usize> = VecDeque::new();
    queue.push_back(0);
    while let Some(i) = queue.pop_front() {
        let h = found[i].clone();
        for g in 1..v.order {
            if h.binary_search(&(g as u16)).is_ok() {
                continue;
            }
            let mut bigger: Vec<u16> = Vec::new();
            for &x in &h {
                let mut y = x as usize;
                for _ in 0..p {
                    bigger.push(y as u16);
                    y = v.mul(y, g);
                }
            }
            bigger.sort_unstable();
            bigger.dedup();
            if !seen.contains_key(&bigger) {
                seen.insert(bigger.clone(), ());
                found.push(bigger);
                queue.push_back(found.len() - 1);
            }
        }
    }
    found.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    found
}

/// The subgroup of an abelian group as a standalone table plus embedding.
fn subtable_of_abelian(ab: &GroupTable, members: &[u16]) -> (Arc<GroupTable>, Vec<u16>) {
    let index: HashMap<u16, u16> = members
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i as u16))
        .collect();
    let order = members.len();
    let mut mul = vec![0u16; order * order];
    for (i, &x) in members.iter().enumerate() {
        for (j, &y) in members.iter().enumerate() {
            mul[i * order + j] = index[&(ab.mul(x as usize, y as usize) as u16)];
        }
    }
    let t = GroupTable::from_mul_table("sub".into(), order, mul).expect("subgroup is a group");
    (t, members.to_vec())
}

/// Subgroup data: sorted member list plus lazily-built standalone table.
pub struct SubgroupData {
    pub members: Vec<u16>,
    pub is_normal: bool,
    pub index: usize,
    membership: Vec<u64>,
    table: OnceCell<(Arc<GroupTable>, Vec<u16>, Vec<u16>)>,
    res_mults: OnceCell<Arc<Vec<Vec<i64>>>>,
}

impl SubgroupData {
    fn new(members: Vec<u16>, parent_order: usize, is_normal: bool) -> SubgroupData {
        let mut membership = vec![0u64; (parent_order + 63) / 64];
        for &x in &members {
            membership[x as usize / 64] |= 1 << (x as usize % 64);
        }
        let index = parent_order / members.len();
        SubgroupData {
            members,
            is_normal,
            index,
            membership,
            table: OnceCell::new(),
            res_mults: OnceCell::new(),
        }
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.membership[x / 64] & (1 << (x % 64)) != 0
    }
}

/// A subgroup handle: parent table plus member data.
#[derive(Clone)]
pub struct Subgroup {
    pub parent: Arc<GroupTable>,
    pub data: Arc<SubgroupData>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.data.members.len()
    }

    pub fn index(&self) -> usize {
        self.data.index
    }

    pub fn is_normal(&self) -> bool {
        self.data.is_normal
    }

    pub fn members(&self) -> &[u16] {
        &self.data.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.data.contains(x)
    }

    /// Standalone group table for the subgroup, with maps in both directions.
    /// Subgroup elements keep the parent's index order, so the identity is 0.
    pub fn table(&self) -> (Arc<GroupTable>, &[u16]) {
        let (t, to_parent, _) = self.data.table.get_or_init(|| {
            let members = &self.data.members;
            let index: HashMap<u16, u16> = members
                .iter()
                .enumerate()
                .map(|(i, &x)| (x, i as u16))
                .collect();
            let order = members.len();
            let mut mul = vec![0u16; order * order];
            for (i, &x) in members.iter().enumerate() {
                for (j, &y) in members.iter().enumerate() {
                    mul[i * order + j] = index[&(self.parent.mul(x as usize, y as usize) as u16)];
                }
            }
            let name = format!("{}<{}>", self.parent.name(), order);
            let t = GroupTable::from_mul_table(name, order, mul).expect("subgroup is a group");
            let mut from_parent = vec![u16::MAX; self.parent.order()];
            for (i, &x) in members.iter().enumerate() {
                from_parent[x as usize] = i as u16;
            }
            (t, members.clone(), from_parent)
        });
        (t.clone(), to_parent)
    }

    /// Parent-element index -> subgroup-element index (must be a member).
    pub fn from_parent(&self, x: usize) -> usize {
        let (_, _, from_parent) = self.data.table.get().expect("table built");
        from_parent[x] as usize
    }

    pub fn to_parent(&self, h: usize) -> usize {
        self.data.members[h] as usize
    }

    /// Smallest element outside the subgroup (coset representative).
    pub fn outside_rep(&self) -> usize {
        (0..self.parent.order())
            .find(|&x| !self.contains(x))
            .expect("proper subgroup")
    }

    /// Conjugate subgroup g H g^-1.
    pub fn conjugate(&self, g: usize) -> Subgroup {
        let members: Vec<u16> = self
            .data
            .members
            .iter()
            .map(|&x| self.parent.conj(g, x as usize) as u16)
            .collect();
        self.parent.subgroup(members).expect("conjugate of a subgroup")
    }

    /// Intersection with another subgroup of the same parent.
    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let members: Vec<u16> = self
            .data
            .members
            .iter()
            .copied()
            .filter(|&x| other.contains(x as usize))
            .collect();
        self.parent.subgroup(members).expect("intersection is a subgroup")
    }

    pub(crate) fn res_mults_cell(&self) -> &OnceCell<Arc<Vec<Vec<i64>>>> {
        &self.data.res_mults
    }

    /// Double coset representatives K \ G / H (self = H, other = K),
    /// smallest element per double coset, ascending.
    pub fn double_cosets(&self, k: &Subgroup) -> Vec<usize> {
        let g = &self.parent;
        let mut seen = vec![false; g.order()];
        let mut reps = Vec::new();
        for x in 0..g.order() {
            if seen[x] {
                continue;
            }
            reps.push(x);
            for &a in k.members() {
                for &b in self.members() {
                    seen[g.mul(g.mul(a as usize, x), b as usize)] = true;
                }
            }
        }
        reps
    }
}
