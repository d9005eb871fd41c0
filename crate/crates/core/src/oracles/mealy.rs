use std::collections::{BTreeMap, VecDeque};

use rustc_hash::FxHashMap;

use super::GroupOracle;
use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

/// Finite transducer acting on strings over `0..degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MealyMachine {
    pub degree: usize,
    /// `trans[q][σ]`: state after reading `σ` in state `q`.
    pub trans: Vec<Vec<usize>>,
    /// `out[q][σ]`: letter written when reading `σ` in state `q`.
    pub out: Vec<Vec<usize>>,
    pub initial: usize,
}

impl MealyMachine {
    pub fn identity(degree: usize) -> Self {
        Self { degree, trans: vec![vec![0; degree]], out: vec![(0..degree).collect()], initial: 0 }
    }

    pub fn states(&self) -> usize {
        self.trans.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (q, row) in self.out.iter().enumerate() {
            if !is_permutation(row, self.degree) {
                return Err(Error::InvalidGenerator(format!("state {q} does not permute the tree alphabet")));
            }
        }
        if self.trans.iter().flatten().any(|&t| t >= self.states()) || self.initial >= self.states() {
            return Err(Error::InvalidGenerator("transition to a missing state".into()));
        }
        Ok(())
    }

    pub fn apply(&self, y: &[usize]) -> Vec<usize> {
        let mut q = self.initial;
        y.iter()
            .map(|&s| {
                let o = self.out[q][s];
                q = self.trans[q][s];
                o
            })
            .collect()
    }

    pub fn inverse(&self) -> Self {
        let mut trans = vec![vec![0; self.degree]; self.states()];
        let mut out = vec![vec![0; self.degree]; self.states()];
        for q in 0..self.states() {
            for s in 0..self.degree {
                let o = self.out[q][s];
                out[q][o] = s;
                trans[q][o] = self.trans[q][s];
            }
        }
        Self { degree: self.degree, trans, out, initial: self.initial }
    }

    /// Least `m` such that some string of length `m` is moved, if any.
    pub fn moved_depth(&self) -> Option<usize> {
        let mut depth = vec![usize::MAX; self.states()];
        let mut queue = VecDeque::from([self.initial]);
        depth[self.initial] = 0;
        while let Some(q) = queue.pop_front() {
            if self.out[q].iter().enumerate().any(|(s, &o)| s != o) {
                return Some(depth[q] + 1);
            }
            for &t in &self.trans[q] {
                if depth[t] == usize::MAX {
                    depth[t] = depth[q] + 1;
                    queue.push_back(t);
                }
            }
        }
        None
    }
}

fn is_permutation(row: &[usize], degree: usize) -> bool {
    if row.len() != degree {
        return false;
    }
    let mut seen = vec![false; degree];
    row.iter().all(|&x| x < degree && !std::mem::replace(&mut seen[x], true))
}

/// Machine for the product `g₁g₂⋯g_k`, acting first by `g₁`.
pub fn mealy_product(machines: &[&MealyMachine]) -> Result<MealyMachine> {
    let Some(first) = machines.first() else {
        return Err(Error::AlphabetMismatch("empty product has no tree alphabet".into()));
    };
    let d = first.degree;
    if machines.iter().any(|m| m.degree != d) {
        return Err(Error::AlphabetMismatch("machines act on trees of different degree".into()));
    }
    let start: Vec<usize> = machines.iter().map(|m| m.initial).collect();
    let mut index: FxHashMap<Vec<usize>, usize> = FxHashMap::default();
    let mut tuples = vec![start.clone()];
    index.insert(start, 0);
    let mut trans = Vec::new();
    let mut out = Vec::new();
    let mut i = 0;
    while i < tuples.len() {
        let tuple = tuples[i].clone();
        let mut trow = Vec::with_capacity(d);
        let mut orow = Vec::with_capacity(d);
        for s in 0..d {
            let mut letter = s;
            let mut next = Vec::with_capacity(tuple.len());
            for (m, &q) in machines.iter().zip(&tuple) {
                next.push(m.trans[q][letter]);
                letter = m.out[q][letter];
            }
            let id = *index.entry(next.clone()).or_insert_with(|| {
                tuples.push(next);
                tuples.len() - 1
            });
            trow.push(id);
            orow.push(letter);
        }
        trans.push(trow);
        out.push(orow);
        i += 1;
    }
    Ok(MealyMachine { degree: d, trans, out, initial: 0 })
}

/// True iff every state reachable from the initial one acts trivially on
/// the first letter.
pub fn mealy_is_identity(m: &MealyMachine) -> bool {
    m.moved_depth().is_none()
}

/// Tree automorphism that is the identity below depth `depth`. Missing
/// entries in `perms` are identity permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitaryAutomorphism {
    pub degree: usize,
    pub depth: usize,
    pub perms: BTreeMap<Vec<usize>, Vec<usize>>,
}

impl FinitaryAutomorphism {
    pub fn identity(degree: usize) -> Self {
        Self { degree, depth: 0, perms: BTreeMap::new() }
    }

    pub fn validate(&self) -> Result<()> {
        for (x, p) in &self.perms {
            if x.len() >= self.depth || x.iter().any(|&s| s >= self.degree) {
                return Err(Error::InvalidGenerator(format!("permutation at {x:?} lies below depth {}", self.depth)));
            }
            if !is_permutation(p, self.degree) {
                return Err(Error::InvalidGenerator(format!("entry at {x:?} is not a permutation")));
            }
        }
        Ok(())
    }

    pub fn perm_at(&self, x: &[usize], s: usize) -> usize {
        self.perms.get(x).map_or(s, |p| p[s])
    }

    pub fn is_identity(&self) -> bool {
        self.perms.values().all(|p| p.iter().enumerate().all(|(i, &x)| i == x))
    }

    pub fn inverse(&self) -> Self {
        let mut perms = BTreeMap::new();
        for (x, p) in &self.perms {
            // the inverse at node x^φ undoes the permutation applied at x
            let image = apply_finitary(self, x);
            let mut inv = vec![0; self.degree];
            for (i, &j) in p.iter().enumerate() {
                inv[j] = i;
            }
            perms.insert(image, inv);
        }
        Self { degree: self.degree, depth: self.depth, perms }
    }
}

pub fn apply_finitary(phi: &FinitaryAutomorphism, y: &[usize]) -> Vec<usize> {
    y.iter().enumerate().map(|(i, &s)| if i < phi.depth { phi.perm_at(&y[..i], s) } else { s }).collect()
}

/// Off-spine data at one spine class: the letter `letter` leaving the spine
/// is written as `image`, and the rest of the string is acted on by `tail`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OffSpine {
    pub class: usize,
    pub letter: usize,
    pub image: usize,
    pub tail: FinitaryAutomorphism,
}

/// Directed automorphism with spine `p q^ω` mapped to `p' q'^ω`.
///
/// Spine classes are `0..s+t`: a prefix of length `ℓ` of the spine has
/// class `ℓ` when `ℓ < s` and `s + (ℓ - s) mod t` otherwise. Off-spine
/// letters without an entry keep their value and have identity tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedAutomorphism {
    pub degree: usize,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub p_image: Vec<usize>,
    pub q_image: Vec<usize>,
    pub off_spine: Vec<OffSpine>,
}

impl DirectedAutomorphism {
    pub fn s(&self) -> usize {
        self.p.len()
    }

    pub fn t(&self) -> usize {
        self.q.len()
    }

    pub fn classes(&self) -> usize {
        self.s() + self.t()
    }

    pub fn class_at(&self, len: usize) -> usize {
        if len < self.s() {
            len
        } else {
            self.s() + (len - self.s()) % self.t()
        }
    }

    pub fn next_class(&self, c: usize) -> usize {
        if c + 1 < self.classes() {
            c + 1
        } else {
            self.s()
        }
    }

    pub fn spine_letter(&self, c: usize) -> usize {
        if c < self.s() {
            self.p[c]
        } else {
            self.q[c - self.s()]
        }
    }

    pub fn spine_image(&self, c: usize) -> usize {
        if c < self.s() {
            self.p_image[c]
        } else {
            self.q_image[c - self.s()]
        }
    }

    /// Image letter and tail for `y` leaving the spine at class `c`.
    pub fn off(&self, c: usize, y: usize) -> (usize, Option<&FinitaryAutomorphism>) {
        self.off_spine.iter().find(|o| o.class == c && o.letter == y).map_or((y, None), |o| (o.image, Some(&o.tail)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.q.is_empty() {
            return Err(Error::InvalidGenerator("directed automorphism needs a nonempty period".into()));
        }
        if self.p.len() != self.p_image.len() || self.q.len() != self.q_image.len() {
            return Err(Error::InvalidGenerator("spine and spine image lengths differ".into()));
        }
        let letters = self.p.iter().chain(&self.q).chain(&self.p_image).chain(&self.q_image);
        if letters.copied().any(|s| s >= self.degree) {
            return Err(Error::InvalidGenerator("spine letter outside the tree alphabet".into()));
        }
        for o in &self.off_spine {
            if o.class >= self.classes() || o.letter >= self.degree || o.image >= self.degree {
                return Err(Error::InvalidGenerator(format!("off-spine entry at class {} out of range", o.class)));
            }
            if o.letter == self.spine_letter(o.class) {
                return Err(Error::InvalidGenerator(format!("off-spine entry at class {} is on the spine", o.class)));
            }
            if o.tail.degree != self.degree {
                return Err(Error::InvalidGenerator("tail acts on a tree of another degree".into()));
            }
            o.tail.validate()?;
        }
        for c in 0..self.classes() {
            let row: Vec<usize> = (0..self.degree)
                .map(|y| if y == self.spine_letter(c) { self.spine_image(c) } else { self.off(c, y).0 })
                .collect();
            if !is_permutation(&row, self.degree) {
                return Err(Error::InvalidGenerator(format!("class {c} does not permute the tree alphabet")));
            }
        }
        Ok(())
    }

    /// Largest tail depth.
    pub fn tail_depth(&self) -> usize {
        self.off_spine.iter().map(|o| o.tail.depth).max().unwrap_or(0)
    }
}

pub fn apply_directed(delta: &DirectedAutomorphism, y: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(y.len());
    let mut c = 0;
    for (i, &letter) in y.iter().enumerate() {
        if letter == delta.spine_letter(c) {
            out.push(delta.spine_image(c));
            c = delta.next_class(c);
            continue;
        }
        let (image, tail) = delta.off(c, letter);
        out.push(image);
        let rest = &y[i + 1..];
        match tail {
            Some(phi) => out.extend(apply_finitary(phi, rest)),
            None => out.extend_from_slice(rest),
        }
        break;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Finitary(FinitaryAutomorphism),
    Directed(DirectedAutomorphism),
}

impl Generator {
    pub fn degree(&self) -> usize {
        match self {
            Generator::Finitary(f) => f.degree,
            Generator::Directed(d) => d.degree,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Generator::Finitary(f) => f.validate(),
            Generator::Directed(d) => d.validate(),
        }
    }

    pub fn apply(&self, y: &[usize]) -> Vec<usize> {
        match self {
            Generator::Finitary(f) => apply_finitary(f, y),
            Generator::Directed(d) => apply_directed(d, y),
        }
    }
}

struct MealyBuilder {
    degree: usize,
    trans: Vec<Vec<usize>>,
    out: Vec<Vec<usize>>,
}

impl MealyBuilder {
    fn new(degree: usize) -> Self {
        // state 0 is the identity sink
        Self { degree, trans: vec![vec![0; degree]], out: vec![(0..degree).collect()] }
    }

    fn fresh(&mut self) -> usize {
        self.trans.push(vec![0; self.degree]);
        self.out.push((0..self.degree).collect());
        self.trans.len() - 1
    }

    /// Adds the node states of a finitary automorphism; returns its root.
    fn finitary(&mut self, phi: &FinitaryAutomorphism) -> usize {
        if phi.depth == 0 {
            return 0;
        }
        let mut nodes: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), self.fresh())];
        let mut i = 0;
        while i < nodes.len() {
            let (x, q) = nodes[i].clone();
            for s in 0..self.degree {
                self.out[q][s] = phi.perm_at(&x, s);
                if x.len() + 1 < phi.depth {
                    let mut child = x.clone();
                    child.push(s);
                    let c = self.fresh();
                    self.trans[q][s] = c;
                    nodes.push((child, c));
                }
            }
            i += 1;
        }
        nodes[0].1
    }

    fn finish(self, initial: usize) -> MealyMachine {
        MealyMachine { degree: self.degree, trans: self.trans, out: self.out, initial }
    }
}

pub fn generator_to_mealy(g: &Generator) -> MealyMachine {
    let mut b = MealyBuilder::new(g.degree());
    match g {
        Generator::Finitary(phi) => {
            let root = b.finitary(phi);
            b.finish(root)
        }
        Generator::Directed(delta) => {
            let classes: Vec<usize> = (0..delta.classes()).map(|_| b.fresh()).collect();
            for c in 0..delta.classes() {
                for y in 0..delta.degree {
                    let (image, next) = if y == delta.spine_letter(c) {
                        (delta.spine_image(c), classes[delta.next_class(c)])
                    } else {
                        let (image, tail) = delta.off(c, y);
                        (image, tail.map_or(0, |phi| b.finitary(phi)))
                    };
                    b.out[classes[c]][y] = image;
                    b.trans[classes[c]][y] = next;
                }
            }
            b.finish(classes[0])
        }
    }
}

/// Word problem of a group generated by tree automorphisms.
#[derive(Clone, Debug)]
pub struct BoundedOracle {
    alphabet: Alphabet,
    pub degree: usize,
    pub machines: Vec<MealyMachine>,
}

impl BoundedOracle {
    pub fn new(alphabet: Alphabet, generators: &[Generator]) -> Result<Self> {
        if generators.len() != alphabet.len() {
            return Err(Error::AlphabetMismatch("one generator per letter is required".into()));
        }
        let degree = generators.first().map_or(2, Generator::degree);
        for g in generators {
            if g.degree() != degree {
                return Err(Error::AlphabetMismatch("generators act on trees of different degree".into()));
            }
            g.validate()?;
        }
        let machines: Vec<MealyMachine> = generators.iter().map(generator_to_mealy).collect();
        for x in alphabet.letters() {
            let prod = mealy_product(&[&machines[x], &machines[alphabet.inverse(x)]])?;
            if !mealy_is_identity(&prod) {
                return Err(Error::MissingInverse(alphabet.name(x).to_string()));
            }
        }
        Ok(Self { alphabet, degree, machines })
    }

    pub fn element(&self, w: &[Letter]) -> MealyMachine {
        if w.is_empty() {
            return MealyMachine::identity(self.degree);
        }
        let ms: Vec<&MealyMachine> = w.iter().map(|&x| &self.machines[x]).collect();
        mealy_product(&ms).expect("degrees checked")
    }

    /// Least moved depth of the element `w`, or `None` when trivial.
    pub fn moved_depth(&self, w: &[Letter]) -> Option<usize> {
        self.element(w).moved_depth()
    }
}

impl GroupOracle for BoundedOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        w.is_empty() || mealy_is_identity(&self.element(w))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::oracles::laws::check_group_laws;

    pub fn root_swap() -> FinitaryAutomorphism {
        FinitaryAutomorphism { degree: 2, depth: 1, perms: BTreeMap::from([(vec![], vec![1, 0])]) }
    }

    fn directed(tails: [bool; 3]) -> DirectedAutomorphism {
        let off_spine = tails
            .iter()
            .enumerate()
            .map(|(class, &swap)| OffSpine {
                class,
                letter: 0,
                image: 0,
                tail: if swap { root_swap() } else { FinitaryAutomorphism::identity(2) },
            })
            .collect();
        DirectedAutomorphism {
            degree: 2,
            p: vec![],
            q: vec![1, 1, 1],
            p_image: vec![],
            q_image: vec![1, 1, 1],
            off_spine,
        }
    }

    /// Generators a, b, c, d of the first Grigorchuk group.
    pub fn grigorchuk_generators() -> Vec<Generator> {
        vec![
            Generator::Finitary(root_swap()),
            Generator::Directed(directed([true, true, false])),
            Generator::Directed(directed([true, false, true])),
            Generator::Directed(directed([false, true, true])),
        ]
    }

    pub fn grigorchuk() -> BoundedOracle {
        let a = Alphabet::from_pairs(&[("a", "a"), ("b", "b"), ("c", "c"), ("d", "d")]).unwrap();
        BoundedOracle::new(a, &grigorchuk_generators()).unwrap()
    }

    /// The usual 5-state transducer: a, b = (a, c), c = (a, d), d = (1, b), 1.
    fn standard_grigorchuk() -> Vec<MealyMachine> {
        let trans = vec![vec![4, 4], vec![0, 2], vec![0, 3], vec![4, 1], vec![4, 4]];
        let out = vec![vec![1, 0], vec![0, 1], vec![0, 1], vec![0, 1], vec![0, 1]];
        (0..4).map(|i| MealyMachine { degree: 2, trans: trans.clone(), out: out.clone(), initial: i }).collect()
    }

    fn strings(d: usize, n: usize) -> Vec<Vec<usize>> {
        let a = Alphabet::from_pairs(&(0..d).map(|i| (i.to_string(), i.to_string())).collect::<Vec<_>>()).unwrap();
        a.words_up_to(n).collect()
    }

    #[test]
    fn directed_agrees_with_standard_machine() {
        let std = standard_grigorchuk();
        for (g, m) in grigorchuk_generators().iter().zip(&std) {
            g.validate().unwrap();
            let gm = generator_to_mealy(g);
            for y in strings(2, 8) {
                assert_eq!(g.apply(&y), m.apply(&y), "{y:?}");
                assert_eq!(gm.apply(&y), m.apply(&y), "{y:?}");
            }
        }
    }

    #[test]
    fn finitary_actions() {
        let swap = root_swap();
        assert_eq!(apply_finitary(&swap, &[0, 1]), vec![1, 1]);
        assert_eq!(apply_finitary(&swap, &[0, 0, 0]), vec![1, 0, 0]);
        let id = FinitaryAutomorphism::identity(2);
        assert_eq!(apply_finitary(&id, &[0, 1, 1]), vec![0, 1, 1]);
        assert!(mealy_is_identity(&generator_to_mealy(&Generator::Finitary(id))));
        assert_eq!(generator_to_mealy(&Generator::Finitary(swap)).states(), 2);
    }

    #[test]
    fn finitary_inverse() {
        let phi = FinitaryAutomorphism {
            degree: 3,
            depth: 2,
            perms: BTreeMap::from([(vec![], vec![1, 2, 0]), (vec![0], vec![2, 0, 1]), (vec![2], vec![1, 0, 2])]),
        };
        let inv = phi.inverse();
        for y in strings(3, 4) {
            assert_eq!(apply_finitary(&inv, &apply_finitary(&phi, &y)), y);
        }
    }

    #[test]
    fn spine_edge_case() {
        let b = directed([true, true, false]);
        assert_eq!(apply_directed(&b, &[1, 1, 1, 1, 1, 1]), vec![1; 6]);
        assert_eq!(apply_directed(&b, &[0, 0]), vec![0, 1]);
    }

    #[test]
    fn grigorchuk_relations() {
        let o = grigorchuk();
        let w = |s: &str| o.alphabet().parse_word(s).unwrap();
        for rel in ["aa", "bb", "cc", "dd", "bcd", "adadadad"] {
            assert!(o.is_trivial(&w(rel)), "{rel}");
        }
        for non in ["a", "ab", "ad", "abab", "adad"] {
            assert!(!o.is_trivial(&w(non)), "{non}");
        }
        assert_eq!(o.moved_depth(&w("ab")), Some(1));
        check_group_laws(&o, 8, 300, 3);
    }

    #[test]
    fn product_with_inverse_is_identity() {
        let o = grigorchuk();
        let ab = o.element(&[0, 1]);
        assert!(mealy_is_identity(&mealy_product(&[&ab, &ab.inverse()]).unwrap()));
        let one = mealy_product(&[&ab]).unwrap();
        for y in strings(2, 6) {
            assert_eq!(one.apply(&y), ab.apply(&y));
        }
    }

    #[test]
    fn identity_iff_fixes_short_strings() {
        let o = grigorchuk();
        for w in o.alphabet().words_up_to(5) {
            let m = o.element(&w);
            let fixes = strings(2, m.states()).iter().all(|y| m.apply(y) == *y);
            assert_eq!(mealy_is_identity(&m), fixes, "{w:?}");
        }
    }

    #[test]
    fn mismatched_degrees_are_rejected() {
        let a = MealyMachine::identity(2);
        let b = MealyMachine::identity(3);
        assert!(matches!(mealy_product(&[&a, &b]), Err(Error::AlphabetMismatch(_))));
    }
}
