//! Exhaustive enumeration of canonical structures over a multiset of atoms.

use crate::structure::{Atom, Kind, Structure};
use rand::seq::SliceRandom;
use rand::Rng;
use rustc_hash::{FxHashMap, FxHashSet};
use std::sync::Arc;

#[derive(Default)]
struct Classes {
    all: Vec<Structure>,
    not_seq: Vec<Structure>,
    not_par: Vec<Structure>,
    not_copar: Vec<Structure>,
}

impl Classes {
    fn excluding(&self, k: Kind) -> &[Structure] {
        match k {
            Kind::Seq => &self.not_seq,
            Kind::Par => &self.not_par,
            Kind::Copar => &self.not_copar,
        }
    }
}

/// Memoizing enumerator. Results for a multiset are sorted by the canonical
/// order and free of duplicates.
#[derive(Default)]
pub struct Enumerator {
    memo: FxHashMap<Vec<Atom>, Arc<Classes>>,
    flat: bool,
}

impl Enumerator {
    pub fn new() -> Enumerator {
        Enumerator::default()
    }

    /// Only structures without seq.
    pub fn flat() -> Enumerator {
        Enumerator { flat: true, ..Enumerator::default() }
    }

    /// All structures whose atom multiset is exactly `atoms`.
    pub fn over(&mut self, atoms: &[Atom]) -> Vec<Structure> {
        let mut key = atoms.to_vec();
        key.sort();
        self.classes(&key).all.clone()
    }

    pub fn clear(&mut self) {
        self.memo.clear();
    }

    fn classes(&mut self, key: &[Atom]) -> Arc<Classes> {
        if let Some(c) = self.memo.get(key) {
            return c.clone();
        }
        let all: Vec<Structure> = match key.len() {
            0 => vec![Structure::Unit],
            1 => vec![Structure::Atom(key[0].clone())],
            _ => {
                let mut set = FxHashSet::default();
                for kind in [Kind::Seq, Kind::Par, Kind::Copar] {
                    if kind == Kind::Seq && self.flat {
                        continue;
                    }
                    self.rooted(key, kind, &mut set);
                }
                let mut v: Vec<Structure> = set.into_iter().collect();
                v.sort_unstable();
                v
            }
        };
        let pick = |k: Kind| all.iter().filter(|s| s.kind() != Some(k)).cloned().collect();
        let c = Arc::new(Classes {
            not_seq: pick(Kind::Seq),
            not_par: pick(Kind::Par),
            not_copar: pick(Kind::Copar),
            all,
        });
        self.memo.insert(key.to_vec(), c.clone());
        c
    }

    fn rooted(&mut self, key: &[Atom], kind: Kind, out: &mut FxHashSet<Structure>) {
        for blocks in set_partitions(key.len()) {
            if blocks.len() < 2 {
                continue;
            }
            let lists: Vec<Arc<Classes>> = blocks
                .iter()
                .map(|b| {
                    let sub: Vec<Atom> = b.iter().map(|&i| key[i].clone()).collect();
                    self.classes(&sub)
                })
                .collect();
            let choices: Vec<&[Structure]> = lists.iter().map(|c| c.excluding(kind)).collect();
            if kind == Kind::Seq {
                let mut order: Vec<usize> = (0..blocks.len()).collect();
                loop {
                    let perm: Vec<&[Structure]> = order.iter().map(|&i| choices[i]).collect();
                    product(&perm, &mut |items| {
                        out.insert(Structure::build(kind, items.iter().cloned()));
                    });
                    if !next_permutation(&mut order) {
                        break;
                    }
                }
            } else {
                product(&choices, &mut |items| {
                    out.insert(Structure::build(kind, items.iter().cloned()));
                });
            }
        }
    }
}

/// All set partitions of `0..n`, blocks in order of their least element.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn go(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            go(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        go(i + 1, n, blocks, out);
        blocks.pop();
    }
    go(0, n, &mut blocks, &mut out);
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn product(lists: &[&[Structure]], f: &mut dyn FnMut(&[Structure])) {
    let mut cur = Vec::with_capacity(lists.len());
    fn go(
        lists: &[&[Structure]],
        cur: &mut Vec<Structure>,
        f: &mut dyn FnMut(&[Structure]),
    ) {
        if cur.len() == lists.len() {
            f(cur);
            return;
        }
        for s in lists[cur.len()] {
            cur.push(s.clone());
            go(lists, cur, f);
            cur.pop();
        }
    }
    go(lists, &mut cur, f);
}

/// Multisets of exactly `size` atoms drawn from `alphabet` (with repetition),
/// each sorted, in lexicographic order.
pub fn multisets(alphabet: &[Atom], size: usize) -> Vec<Vec<Atom>> {
    let mut alpha = alphabet.to_vec();
    alpha.sort();
    alpha.dedup();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(alpha: &[Atom], start: usize, size: usize, cur: &mut Vec<Atom>, out: &mut Vec<Vec<Atom>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..alpha.len() {
            cur.push(alpha[i].clone());
            go(alpha, i, size, cur, out);
            cur.pop();
        }
    }
    go(&alpha, 0, size, &mut cur, &mut out);
    out
}

/// Every structure of size `1..=max_size` over `alphabet`, multiset by
/// multiset. The callback sees each multiset's structures at once, so callers
/// can stream through large enumerations without holding all of them.
pub fn for_each_multiset(alphabet: &[Atom], max_size: usize, f: impl FnMut(&[Atom], &[Structure])) {
    for_each_multiset_where(alphabet, max_size, |_| true, f)
}

/// Like [`for_each_multiset`], restricted to the multisets `keep` accepts.
pub fn for_each_multiset_where(
    alphabet: &[Atom],
    max_size: usize,
    keep: impl Fn(&[Atom]) -> bool,
    mut f: impl FnMut(&[Atom], &[Structure]),
) {
    let mut en = Enumerator::new();
    for size in 1..=max_size {
        for m in multisets(alphabet, size) {
            if !keep(&m) {
                continue;
            }
            let all = en.over(&m);
            f(&m, &all);
            if size >= 6 {
                en.clear();
            }
        }
        if size >= 5 {
            en.clear();
        }
    }
}

/// A bijection on atoms permuting names and flipping polarities per name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Renaming {
    names: Vec<String>,
    image: Vec<usize>,
    flip: Vec<bool>,
}

impl Renaming {
    /// Every renaming over `names`.
    pub fn all(names: &[&str]) -> Vec<Renaming> {
        let n = names.len();
        let mut perms = vec![];
        let mut p: Vec<usize> = (0..n).collect();
        loop {
            perms.push(p.clone());
            if !next_permutation(&mut p) {
                break;
            }
        }
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let mut out = vec![];
        for image in perms {
            for bits in 0u32..(1 << n) {
                let flip = (0..n).map(|i| bits & (1 << i) != 0).collect();
                out.push(Renaming { names: names.clone(), image: image.clone(), flip });
            }
        }
        out
    }

    pub fn atom(&self, a: &Atom) -> Atom {
        match self.names.iter().position(|x| x == a.name()) {
            Some(i) => {
                let pol = if self.flip[i] { a.polarity().flip() } else { a.polarity() };
                Atom::new(self.names[self.image[i]].as_str(), pol)
            }
            None => a.clone(),
        }
    }

    pub fn multiset(&self, m: &[Atom]) -> Vec<Atom> {
        let mut v: Vec<Atom> = m.iter().map(|a| self.atom(a)).collect();
        v.sort();
        v
    }

    pub fn structure(&self, s: &Structure) -> Structure {
        s.map_atoms(&mut |a: &Atom| Structure::Atom(self.atom(a)))
    }
}

/// One structure from each class of structures equal up to renaming,
/// multiset by multiset. Only the least multiset of each class is visited,
/// and within it the least structure of each class.
pub fn for_each_orbit_where(
    names: &[&str],
    max_size: usize,
    keep: impl Fn(&[Atom]) -> bool,
    mut f: impl FnMut(&[Atom], &[Structure]),
) {
    let group = Renaming::all(names);
    let alpha = alphabet(names);
    for_each_multiset_where(
        &alpha,
        max_size,
        |m| keep(m) && group.iter().all(|g| g.multiset(m).as_slice() >= m),
        |m, all| {
            let stab: Vec<&Renaming> = group.iter().filter(|g| g.multiset(m).as_slice() == m).collect();
            let reps: Vec<Structure> =
                all.iter().filter(|s| stab.iter().all(|g| &g.structure(s) >= *s)).cloned().collect();
            f(m, &reps);
        },
    );
}

/// A random structure with exactly `size` atom occurrences drawn from
/// `alphabet`.
pub fn random_structure<R: Rng>(rng: &mut R, size: usize, alphabet: &[Atom]) -> Structure {
    match size {
        0 => Structure::Unit,
        1 => Structure::Atom(alphabet.choose(rng).expect("nonempty alphabet").clone()),
        _ => {
            let k = rng.gen_range(2..=size.min(3));
            let mut cuts = rand::seq::index::sample(rng, size - 1, k - 1).into_vec();
            cuts.sort_unstable();
            let mut parts = Vec::with_capacity(k);
            let mut last = 0;
            for c in cuts.into_iter().map(|c| c + 1).chain([size]) {
                parts.push(random_structure(rng, c - last, alphabet));
                last = c;
            }
            let kind = [Kind::Seq, Kind::Par, Kind::Copar][rng.gen_range(0..3)];
            Structure::build(kind, parts)
        }
    }
}

/// Positive and negative atoms for each name.
pub fn alphabet(names: &[&str]) -> Vec<Atom> {
    names.iter().flat_map(|n| [Atom::positive(*n), Atom::negative(*n)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Counts from the generating-function recurrence for the number of
    // canonical structures over k atom kinds, computed independently.
    fn counts(atoms: &[Atom], max: usize) -> Vec<usize> {
        let mut en = Enumerator::new();
        (1..=max).map(|n| multisets(atoms, n).iter().map(|m| en.over(m).len()).sum()).collect()
    }

    #[test]
    fn one_kind_counts() {
        let atoms = vec![Atom::positive("a")];
        assert_eq!(counts(&atoms, 6), vec![1, 3, 11, 51, 253, 1373]);
    }

    #[test]
    fn two_kind_counts() {
        let atoms = alphabet(&["a"]);
        assert_eq!(counts(&atoms, 5), vec![2, 10, 68, 576, 5404]);
    }

    #[test]
    fn six_kind_counts() {
        let atoms = alphabet(&["a", "b", "c"]);
        assert_eq!(counts(&atoms, 4), vec![6, 78, 1516, 36516]);
    }

    #[test]
    fn labelled_counts() {
        let mut en = Enumerator::new();
        let names = ["p", "q", "r", "s", "t"];
        let got: Vec<usize> = (1..=5)
            .map(|n| {
                let m: Vec<Atom> = names[..n].iter().map(|x| Atom::positive(*x)).collect();
                en.over(&m).len()
            })
            .collect();
        assert_eq!(got, vec![1, 4, 38, 596, 13072]);
    }

    #[test]
    fn enumerated_structures_are_canonical_and_distinct() {
        let mut en = Enumerator::new();
        let m = vec![Atom::positive("a"), Atom::positive("a"), Atom::negative("b"), Atom::positive("c")];
        let all = en.over(&m);
        let set: FxHashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(|s| s.is_canonical() && s.atom_multiset() == m));
    }

    #[test]
    fn partitions_are_bell_numbers() {
        let b: Vec<usize> = (0..7).map(|n| set_partitions(n).len()).collect();
        assert_eq!(b, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn orbits_hit_each_class_once() {
        let names = ["a", "b"];
        let group = Renaming::all(&names);
        assert_eq!(group.len(), 8);
        let class = |s: &Structure| group.iter().map(|g| g.structure(s)).min().unwrap();
        let mut classes = FxHashSet::default();
        for_each_multiset(&alphabet(&names), 4, |_, all| classes.extend(all.iter().map(class)));
        let mut seen = FxHashSet::default();
        let mut visited = 0;
        for_each_orbit_where(&names, 4, |_| true, |_, reps| {
            visited += reps.len();
            seen.extend(reps.iter().map(class));
        });
        assert_eq!(visited, classes.len());
        assert_eq!(seen, classes);
    }

    #[test]
    fn random_structures_are_reproducible() {
        use rand::SeedableRng;
        let alpha = alphabet(&["a", "b"]);
        let draw = |seed| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (1..=12).map(|n| random_structure(&mut rng, n, &alpha)).collect::<Vec<_>>()
        };
        let xs = draw(7);
        assert_eq!(xs, draw(7));
        assert_ne!(xs, draw(8));
        for (n, s) in (1..).zip(&xs) {
            assert!(s.is_canonical());
            assert_eq!(s.atom_multiset().len(), n);
        }
    }
}
