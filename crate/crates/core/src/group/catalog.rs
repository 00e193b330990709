//! Built-in catalog of small groups used as Weil-group stand-ins, plus the
//! JSON group descriptor (catalog name or permutation generators).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupTable, DEFAULT_ORDER_BOUND};
use crate::perm::Perm;

/// Canonical catalog names, in the order the corpus walks them.
pub const CATALOG: &[&str] = &[
    "C1", "C2", "C3", "C4", "C8", "V4", "C2^3", "C4xC2", "D8", "Q8", "D16", "Q16", "SD16", "M16",
    "S3", "S4", "A4", "SL(2,3)", "GL(2,3)", "D8xC2", "Q8xC2", "D8oD8", "D8oQ8", "C3:C4",
];

fn cyclic(name: &str, n: usize) -> Arc<GroupTable> {
    GroupTable::metacyclic(name, n, 1, 1, 0)
}

fn matrix_group(name: &str, gens: &[[u8; 4]], p: u8) -> Arc<GroupTable> {
    let id = [1u8, 0, 0, 1];
    let mul = move |a: &[u8; 4], b: &[u8; 4]| -> [u8; 4] {
        let m = |i: usize, j: usize, k: usize, l: usize| (a[i] * b[j] + a[k] * b[l]) % p;
        [m(0, 0, 1, 2), m(0, 1, 1, 3), m(2, 0, 3, 2), m(2, 1, 3, 3)]
    };
    GroupTable::from_closure(name, id, gens, mul, DEFAULT_ORDER_BOUND)
        .expect("matrix generators close")
}

fn build(name: &str) -> Option<Arc<GroupTable>> {
    let g = match name {
        "C1" => cyclic("C1", 1),
        "C2" => cyclic("C2", 2),
        "C3" => cyclic("C3", 3),
        "C4" => cyclic("C4", 4),
        "C8" => cyclic("C8", 8),
        "V4" => GroupTable::direct_product("V4", &cyclic("C2", 2), &cyclic("C2", 2)),
        "C2^3" => {
            let v4 = GroupTable::direct_product("V4", &cyclic("C2", 2), &cyclic("C2", 2));
            GroupTable::direct_product("C2^3", &v4, &cyclic("C2", 2))
        }
        "C4xC2" => GroupTable::direct_product("C4xC2", &cyclic("C4", 4), &cyclic("C2", 2)),
        "D8" => GroupTable::metacyclic("D8", 4, 2, 3, 0),
        "Q8" => GroupTable::metacyclic("Q8", 4, 2, 3, 2),
        "D16" => GroupTable::metacyclic("D16", 8, 2, 7, 0),
        "Q16" => GroupTable::metacyclic("Q16", 8, 2, 7, 4),
        "SD16" => GroupTable::metacyclic("SD16", 8, 2, 3, 0),
        "M16" => GroupTable::metacyclic("M16", 8, 2, 5, 0),
        "S3" => GroupTable::metacyclic("S3", 3, 2, 2, 0),
        "C3:C4" => GroupTable::metacyclic("C3:C4", 3, 4, 2, 0),
        "S4" => {
            let a = Perm::from_cycles(4, &[vec![0, 1, 2, 3]]).unwrap();
            let b = Perm::from_cycles(4, &[vec![0, 1]]).unwrap();
            GroupTable::from_permutations("S4", &[a, b], DEFAULT_ORDER_BOUND).unwrap()
        }
        "A4" => {
            let a = Perm::from_cycles(4, &[vec![0, 1, 2]]).unwrap();
            let b = Perm::from_cycles(4, &[vec![1, 2, 3]]).unwrap();
            GroupTable::from_permutations("A4", &[a, b], DEFAULT_ORDER_BOUND).unwrap()
        }
        "SL(2,3)" => matrix_group("SL(2,3)", &[[1, 1, 0, 1], [0, 2, 1, 0]], 3),
        "GL(2,3)" => matrix_group("GL(2,3)", &[[1, 1, 0, 1], [0, 2, 1, 0], [1, 0, 0, 2]], 3),
        "D8xC2" => GroupTable::direct_product(
            "D8xC2",
            &GroupTable::metacyclic("D8", 4, 2, 3, 0),
            &cyclic("C2", 2),
        ),
        "Q8xC2" => GroupTable::direct_product(
            "Q8xC2",
            &GroupTable::metacyclic("Q8", 4, 2, 3, 2),
            &cyclic("C2", 2),
        ),
        // Central involution of the metacyclic D8/Q8 tables: r^2 = (a=2, b=0),
        // element index 2*2 + 0 = 4.
        "D8oD8" => {
            let d8 = GroupTable::metacyclic("D8", 4, 2, 3, 0);
            GroupTable::central_product("D8oD8", &d8, &d8, 4, 4)
        }
        "D8oQ8" => {
            let d8 = GroupTable::metacyclic("D8", 4, 2, 3, 0);
            let q8 = GroupTable::metacyclic("Q8", 4, 2, 3, 2);
            GroupTable::central_product("D8oQ8", &d8, &q8, 4, 4)
        }
        _ => return None,
    };
    Some(g)
}

fn canonical_name(name: &str) -> &str {
    match name {
        "C2xC2" => "V4",
        "(Z/2)^2" => "V4",
        "(Z/2)^3" | "C2xC2xC2" | "E8" => "C2^3",
        "M4(2)" | "Mod16" => "M16",
        "SL23" => "SL(2,3)",
        "GL23" => "GL(2,3)",
        "D8*D8" | "ES32+" => "D8oD8",
        "D8*Q8" | "ES32-" => "D8oQ8",
        "Dic3" | "Q12" => "C3:C4",
        other => other,
    }
}

/// Look up a catalog group by name (a few aliases accepted).
pub fn by_name(name: &str) -> Result<Arc<GroupTable>> {
    build(canonical_name(name)).ok_or_else(|| Error::UnknownCatalogGroup(name.to_string()))
}

/// All catalog groups with order at most `max_order`.
pub fn catalog_groups(max_order: usize) -> Vec<Arc<GroupTable>> {
    CATALOG
        .iter()
        .map(|n| by_name(n).expect("catalog builds"))
        .filter(|g| g.order() <= max_order)
        .collect()
}

/// JSON group descriptor: {"catalog": "D8"} or
/// {"permutations": [[[1,2],[3,4]], ...]} (one list of cycles per generator).
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum GroupDescriptor {
    Catalog { catalog: String },
    Permutations { permutations: Vec<Vec<Vec<usize>>> },
}

impl GroupDescriptor {
    pub fn build(&self, bound: usize) -> Result<Arc<GroupTable>> {
        match self {
            GroupDescriptor::Catalog { catalog } => by_name(catalog),
            GroupDescriptor::Permutations { permutations } => {
                // Relabel the (arbitrary) points onto 0..degree.
                let mut labels: Vec<usize> = permutations
                    .iter()
                    .flat_map(|cycles| cycles.iter().flatten().copied())
                    .collect();
                labels.sort_unstable();
                labels.dedup();
                if labels.is_empty() {
                    labels.push(0);
                }
                let lookup = |p: usize| labels.binary_search(&p).expect("label present");
                let degree = labels.len();
                let perms = permutations
                    .iter()
                    .map(|cycles| {
                        let mapped: Vec<Vec<usize>> = cycles
                            .iter()
                            .map(|c| c.iter().map(|&p| lookup(p)).collect())
                            .collect();
                        Perm::from_cycles(degree, &mapped)
                    })
                    .collect::<Result<Vec<_>>>()?;
                GroupTable::from_permutations("perm-group", &perms, bound)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_orders() {
        let expect: &[(&str, usize)] = &[
            ("C1", 1),
            ("C8", 8),
            ("V4", 4),
            ("C2^3", 8),
            ("C4xC2", 8),
            ("D8", 8),
            ("Q8", 8),
            ("D16", 16),
            ("Q16", 16),
            ("SD16", 16),
            ("M16", 16),
            ("S3", 6),
            ("S4", 24),
            ("A4", 12),
            ("SL(2,3)", 24),
            ("GL(2,3)", 48),
            ("D8xC2", 16),
            ("Q8xC2", 16),
            ("D8oD8", 32),
            ("D8oQ8", 32),
            ("C3:C4", 12),
        ];
        for &(name, order) in expect {
            assert_eq!(by_name(name).unwrap().order(), order, "{name}");
        }
    }

    #[test]
    fn extraspecials_are_extraspecial_and_distinct() {
        let plus = by_name("D8oD8").unwrap();
        let minus = by_name("D8oQ8").unwrap();
        for g in [&plus, &minus] {
            assert_eq!(g.order(), 32);
            assert_eq!(g.commutator_subgroup().len(), 2);
            let (ab, _) = g.abelianization();
            assert_eq!(ab.order(), 16);
            assert!(ab.is_abelian());
        }
        // Involution counts distinguish the plus and minus types.
        let invol = |g: &Arc<GroupTable>| (0..g.order()).filter(|&x| g.element_order(x) == 2).count();
        assert_eq!(invol(&plus), 19);
        assert_eq!(invol(&minus), 11);
    }

    #[test]
    fn sl23_has_no_index2_subgroup() {
        let g = by_name("SL(2,3)").unwrap();
        assert!(g.index2_subgroups().is_empty());
    }

    #[test]
    fn descriptor_round_trip() {
        let d = GroupDescriptor::Catalog {
            catalog: "D8".into(),
        };
        let j = serde_json::to_string(&d).unwrap();
        let back: GroupDescriptor = serde_json::from_str(&j).unwrap();
        assert_eq!(d, back);
        let p = GroupDescriptor::Permutations {
            permutations: vec![vec![vec![1, 2]], vec![vec![1, 2, 3]]],
        };
        let g = p.build(DEFAULT_ORDER_BOUND).unwrap();
        assert_eq!(g.order(), 6);
    }
}
