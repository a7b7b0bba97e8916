use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::ring::{accumulate_edge, ModuleVector};
use crate::group::{Element, GroupError, MarkedGroup};
use crate::scalar::Coefficient;
use crate::words::ReducedWord;

/// An integer edge function on the marked Cayley graph of `Γ₁`; the key
/// `(x, i)` names the edge `x → x·s̄_i` labelled `s_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flow<C = BigInt> {
    edges: BTreeMap<(Element, usize), C>,
}

impl<C: Coefficient> Default for Flow<C> {
    fn default() -> Self {
        Self {
            edges: BTreeMap::new(),
        }
    }
}

/// Net outflow `f*(v)` at every vertex with nonzero balance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetFlow<C = BigInt> {
    pub balance: BTreeMap<Element, C>,
}

impl<C: Coefficient> NetFlow<C> {
    pub fn is_circulation(&self) -> bool {
        self.balance.is_empty()
    }

    pub fn at(&self, vertex: &Element) -> C {
        self.balance.get(vertex).cloned().unwrap_or_else(C::zero)
    }
}

impl<C: Coefficient> Flow<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_edge(&mut self, vertex: Element, generator: usize, amount: C) {
        accumulate_edge(&mut self.edges, (vertex, generator), amount);
    }

    pub fn value(&self, vertex: &Element, generator: usize) -> C {
        self.edges
            .get(&(vertex.clone(), generator))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Element, usize, &C)> {
        self.edges.iter().map(|((x, i), c)| (x, *i, c))
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_zero(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut sum = self.clone();
        for ((x, i), c) in &other.edges {
            sum.add_edge(x.clone(), *i, c.clone());
        }
        sum
    }

    /// `τ_g`: the value on `(x, i)` moves to `(g·x, i)`.
    pub fn translate(&self, group: &MarkedGroup, g: &Element) -> Self {
        Self {
            edges: self
                .edges
                .iter()
                .map(|((x, i), c)| ((group.multiply(g, x), *i), c.clone()))
                .collect(),
        }
    }

    /// Outgoing minus incoming flow at each vertex.
    pub fn net_flow(&self, group: &MarkedGroup) -> NetFlow<C> {
        let mut balance = BTreeMap::new();
        for ((x, i), c) in &self.edges {
            let mut head = x.clone();
            group.step(&mut head, *i, false);
            accumulate_vertex(&mut balance, x.clone(), c.clone());
            accumulate_vertex(&mut balance, head, -c.clone());
        }
        NetFlow { balance }
    }

    /// The a-part of the Magnus image with this flow.
    pub fn to_module_vector(&self, rank: usize) -> ModuleVector<C> {
        let mut vector = ModuleVector::zero(rank);
        for ((x, i), c) in &self.edges {
            vector.add_at(x.clone(), *i, c.clone());
        }
        vector
    }

    /// Distinct vertices at which some edge of the support starts.
    pub fn support_vertices(&self) -> Vec<&Element> {
        let mut vertices: Vec<&Element> = self.edges.keys().map(|(x, _)| x).collect();
        vertices.dedup();
        vertices
    }
}

fn accumulate_vertex<C: Coefficient>(
    balance: &mut BTreeMap<Element, C>,
    vertex: Element,
    amount: C,
) {
    let entry = balance.entry(vertex.clone()).or_insert_with(C::zero);
    *entry += amount;
    if entry.is_zero() {
        balance.remove(&vertex);
    }
}

/// The flow of the path traced by `w` from `ē`: a letter `s_i` at `x`
/// adds one to `(x, i)` and moves to `x·s̄_i`; a letter `s_i^-1` moves to
/// `x·s̄_i^-1` and subtracts one from the edge arriving at `x`.
pub fn flow_of_word<C: Coefficient>(
    word: &ReducedWord,
    group: &MarkedGroup,
) -> Result<Flow<C>, GroupError> {
    Ok(traced_flow(word, group)?.0)
}

/// The flow of `w` together with the endpoint `π(w)`.
pub fn traced_flow<C: Coefficient>(
    word: &ReducedWord,
    group: &MarkedGroup,
) -> Result<(Flow<C>, Element), GroupError> {
    group.check_word(word)?;
    let mut flow = Flow::zero();
    let mut x = group.identity();
    for letter in word.letters() {
        if letter.inverse {
            group.step(&mut x, letter.generator, true);
            flow.add_edge(x.clone(), letter.generator, -C::one());
        } else {
            flow.add_edge(x.clone(), letter.generator, C::one());
            group.step(&mut x, letter.generator, false);
        }
    }
    Ok((flow, x))
}

/// Whether `u` and `v` agree in `F_r/[N,N]`: they induce the same flow.
pub fn words_equal_mod_nn(
    u: &ReducedWord,
    v: &ReducedWord,
    group: &MarkedGroup,
) -> Result<bool, GroupError> {
    Ok(flow_of_word::<BigInt>(u, group)? == flow_of_word::<BigInt>(v, group)?)
}

#[cfg(test)]
mod tests {
    use super::super::magnus::{magnus_embed, WreathImage};
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn word(text: &str, rank: usize) -> ReducedWord {
        ReducedWord::parse(text, rank).unwrap()
    }

    fn flow_i64(text: &str, group: &MarkedGroup) -> Flow<i64> {
        flow_of_word(&word(text, group.rank()), group).unwrap()
    }

    fn flow_from(entries: &[([i64; 2], usize, i64)]) -> Flow<i64> {
        let mut flow = Flow::zero();
        for (x, i, c) in entries {
            flow.add_edge(Element::vector(*x), *i, *c);
        }
        flow
    }

    #[test]
    fn flow_examples() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        assert!(flow_i64("s1 s1^-1", &z2).is_zero());
        assert_eq!(
            flow_i64("s1^2", &z2),
            flow_from(&[([0, 0], 0, 1), ([1, 0], 0, 1)])
        );
        assert_eq!(
            flow_i64("[s1,s2]", &z2),
            flow_from(&[
                ([0, 0], 0, 1),
                ([1, 0], 1, 1),
                ([0, 1], 0, -1),
                ([0, 0], 1, -1)
            ])
        );
    }

    #[test]
    fn net_flow_examples() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        assert!(flow_i64("[s1,s2]", &z2).net_flow(&z2).is_circulation());
        let single = flow_i64("s1", &z2).net_flow(&z2);
        assert_eq!(single.at(&Element::vector([0, 0])), 1);
        assert_eq!(single.at(&Element::vector([1, 0])), -1);
        assert!(Flow::<i64>::zero().net_flow(&z2).is_circulation());
    }

    #[test]
    fn word_problem_examples() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let u = word("s1 s2 s1^-1", 2);
        assert!(words_equal_mod_nn(&u, &u, &z2).unwrap());
        assert!(!words_equal_mod_nn(&word("s1 s2", 2), &word("s2 s1", 2), &z2).unwrap());
        let w = word("[[s1,s2], s1 [s1,s2] s1^-1]", 2);
        assert!(words_equal_mod_nn(&w, &ReducedWord::identity(2), &z2).unwrap());
        let image: WreathImage<BigInt> = magnus_embed(&w, &z2).unwrap();
        assert!(image.is_identity(&z2));
    }

    #[test]
    fn line_with_loops_presentation() {
        // Γ₁ = ⟨a, b | b⟩: b̄ is a loop at every vertex of the line.
        let line = "mark(zr:1| s1; e)".parse::<MarkedGroup>().unwrap();
        let conjugate = |k: i64| {
            word("s2", 2)
                .conjugate_by(&word("s1", 2).power(-k))
                .unwrap()
        };
        for i in -3..=3i64 {
            for j in -3..=3i64 {
                let (bi, bj) = (conjugate(i), conjugate(j));
                let comm = bi.commutator(&bj).unwrap();
                assert!(words_equal_mod_nn(&comm, &ReducedWord::identity(2), &line).unwrap());
                if i != j {
                    assert!(!words_equal_mod_nn(&bi, &bj, &line).unwrap());
                }
            }
        }
        assert!(!words_equal_mod_nn(&word("s2", 2), &ReducedWord::identity(2), &line).unwrap());
    }

    #[test]
    fn redundant_generator_presentation() {
        // Z² = ⟨a, b, c | [a,b], c = ab⟩: a b c^-1 lies in N but not in [N,N].
        let z2 = "mark(zr:2| s1; s2; s1 s2)".parse::<MarkedGroup>().unwrap();
        let relator = word("s1 s2 s3^-1", 3);
        let flow = flow_of_word::<i64>(&relator, &z2).unwrap();
        assert!(flow.net_flow(&z2).is_circulation());
        assert!(!flow.is_zero());
    }

    fn groups() -> Vec<MarkedGroup> {
        [
            "zr:2",
            "zr:3",
            "ll:2",
            "bs:2",
            "sdr:2,2",
            "mark(zr:1| s1; e)",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
    }

    proptest! {
        #[test]
        fn word_flows_have_one_source_and_sink(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for group in groups() {
                let w = ReducedWord::random(group.rank(), rng.gen_range(0..=30), &mut rng);
                let (flow, end) = traced_flow::<i64>(&w, &group).unwrap();
                let net = flow.net_flow(&group);
                prop_assert_eq!(net.balance.values().sum::<i64>(), 0);
                if group.is_identity(&end) {
                    prop_assert!(net.is_circulation());
                } else {
                    prop_assert_eq!(net.at(&group.identity()), 1);
                    prop_assert_eq!(net.at(&end), -1);
                    prop_assert_eq!(net.balance.len(), 2);
                }
            }
        }

        #[test]
        fn cocycle(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for group in groups() {
                let u = ReducedWord::random(group.rank(), rng.gen_range(0..=20), &mut rng);
                let v = ReducedWord::random(group.rank(), rng.gen_range(0..=20), &mut rng);
                let uv = flow_of_word::<i64>(&u.multiply(&v).unwrap(), &group).unwrap();
                let fu = flow_of_word::<i64>(&u, &group).unwrap();
                let fv = flow_of_word::<i64>(&v, &group).unwrap();
                let shifted = fv.translate(&group, &group.evaluate_word(&u).unwrap());
                prop_assert_eq!(uv, fu.add(&shifted));
            }
        }

        #[test]
        fn word_problem_agrees_with_embedding(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for group in groups() {
                let r = group.rank();
                let u = ReducedWord::random(r, rng.gen_range(0..=12), &mut rng);
                // v is u times a random element of [N, N] half the time
                let v = if rng.gen_bool(0.5) {
                    let n1 = ReducedWord::random(r, rng.gen_range(0..=6), &mut rng);
                    let n2 = ReducedWord::random(r, rng.gen_range(0..=6), &mut rng);
                    let a = word("[s1,s2]", r).conjugate_by(&n1).unwrap();
                    let b = word("[s1,s2]", r).conjugate_by(&n2).unwrap();
                    u.multiply(&a.commutator(&b).unwrap()).unwrap()
                } else {
                    ReducedWord::random(r, rng.gen_range(0..=12), &mut rng)
                };
                let by_flow = words_equal_mod_nn(&u, &v, &group).unwrap();
                let pu: WreathImage<i64> = magnus_embed(&u, &group).unwrap();
                let pv: WreathImage<i64> = magnus_embed(&v, &group).unwrap();
                prop_assert_eq!(by_flow, pu == pv);
                let fu = flow_of_word::<i64>(&u, &group).unwrap();
                prop_assert_eq!(fu.to_module_vector(r), pu.a);
            }
        }
    }
}
