//! Quotients of a disjoint union of two finite sets.
//!
//! Both the specification pushout and the graph pushout glue a left and a
//! right collection along pairs of identified elements. Elements are indexed
//! `0..left` for the left side and `left..left + right` for the right side.

use std::collections::BTreeMap;

/// Disjoint-set forest with path halving and union by rank.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Equivalence classes of the glued union, ordered by smallest element so
/// that left-side elements come first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgamation {
    left: usize,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl Amalgamation {
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    pub fn class_of_left(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn class_of_right(&self, j: usize) -> usize {
        self.class_of[self.left + j]
    }

    /// Which side an element comes from and its index on that side.
    pub fn split(&self, element: usize) -> (Side, usize) {
        if element < self.left {
            (Side::Left, element)
        } else {
            (Side::Right, element - self.left)
        }
    }
}

/// Glues `left` and `right` elements along the identified `(left, right)` pairs.
pub fn amalgamate(
    left: usize,
    right: usize,
    identifications: impl IntoIterator<Item = (usize, usize)>,
) -> Amalgamation {
    let mut uf = UnionFind::new(left + right);
    for (l, r) in identifications {
        uf.union(l, left + r);
    }
    let mut by_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = Vec::with_capacity(left + right);
    for element in 0..left + right {
        let root = uf.find(element);
        let class = *by_root.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[class].push(element);
        class_of.push(class);
    }
    Amalgamation {
        left,
        classes,
        class_of,
    }
}

/// How vertex elements are named.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NamingPolicy {
    /// Shared names are kept; clashes become `Origin::name`, left side first.
    #[default]
    Qualified,
    /// Positional names `v0, v1, ...`, ignoring the originals.
    Opaque,
}

/// Names for each class of `amalgamation`.
///
/// `left_names[i]` and `right_names[j]` name the original elements; the
/// origin labels qualify clashing names.
pub fn class_names(
    amalgamation: &Amalgamation,
    left_origin: &str,
    left_names: &[&str],
    right_origin: &str,
    right_names: &[&str],
    policy: NamingPolicy,
) -> Vec<String> {
    let classes = amalgamation.classes();
    if policy == NamingPolicy::Opaque {
        return (0..classes.len()).map(|i| format!("v{i}")).collect();
    }
    let plain = |element: usize| match amalgamation.split(element) {
        (Side::Left, i) => left_names[i],
        (Side::Right, j) => right_names[j],
    };
    let qualified = |element: usize| match amalgamation.split(element) {
        (Side::Left, i) => format!("{left_origin}::{}", left_names[i]),
        (Side::Right, j) => format!("{right_origin}::{}", right_names[j]),
    };

    let mut names: Vec<String> = classes
        .iter()
        .map(|class| {
            let first = plain(class[0]);
            if class.iter().all(|&e| plain(e) == first) {
                first.to_owned()
            } else {
                qualified(class[0])
            }
        })
        .collect();

    for class in clashing(&names) {
        names[class] = qualified(classes[class][0]);
    }
    // same origin on both sides can still clash
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for name in names.iter_mut() {
        let count = seen.entry(name.clone()).or_insert(0);
        *count += 1;
        if *count > 1 {
            *name = format!("{name}#{count}");
        }
    }
    names
}

fn clashing(names: &[String]) -> Vec<usize> {
    let mut by_name: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, n) in names.iter().enumerate() {
        by_name.entry(n).or_default().push(i);
    }
    by_name
        .into_values()
        .filter(|v| v.len() > 1)
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_merges_transitively() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(uf.union(1, 4));
        assert!(!uf.union(0, 3));
        assert_eq!(uf.find(0), uf.find(4));
        assert_ne!(uf.find(2), uf.find(0));
    }

    #[test]
    fn classes_are_left_first() {
        // left {a0, a1}, right {b0, b1, b2}; a1 ~ b2
        let am = amalgamate(2, 3, [(1, 2)]);
        assert_eq!(am.classes(), &[vec![0], vec![1, 4], vec![2], vec![3]]);
        assert_eq!(am.class_of_right(2), 1);
        assert_eq!(am.split(4), (Side::Right, 2));
    }

    #[test]
    fn empty_identification_is_disjoint_union() {
        let am = amalgamate(1, 1, []);
        assert_eq!(am.classes().len(), 2);
    }

    #[test]
    fn naming_keeps_shared_and_qualifies_clashes() {
        // Y1 = {m0, m1}, Y2 = {m0, m1}; only m0 glued
        let am = amalgamate(2, 2, [(0, 0)]);
        let names = class_names(
            &am,
            "Y1",
            &["m0", "m1"],
            "Y2",
            &["m0", "m1"],
            NamingPolicy::Qualified,
        );
        assert_eq!(names, ["m0", "Y1::m1", "Y2::m1"]);
    }

    #[test]
    fn differently_named_merge_uses_left_origin() {
        let am = amalgamate(1, 1, [(0, 0)]);
        let names = class_names(&am, "A", &["x"], "B", &["y"], NamingPolicy::Qualified);
        assert_eq!(names, ["A::x"]);
    }

    #[test]
    fn same_origin_on_both_sides_is_disambiguated() {
        let am = amalgamate(1, 1, []);
        let names = class_names(&am, "Y", &["m"], "Y", &["m"], NamingPolicy::Qualified);
        assert_eq!(names, ["Y::m", "Y::m#2"]);
    }

    #[test]
    fn opaque_names_are_positional() {
        let am = amalgamate(2, 1, [(1, 0)]);
        let names = class_names(&am, "A", &["x", "y"], "B", &["y"], NamingPolicy::Opaque);
        assert_eq!(names, ["v0", "v1"]);
    }
}
