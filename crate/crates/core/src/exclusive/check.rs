use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::candidate::ExclusiveCandidate;
use super::quotient::tm_criterion;
use super::ExclusiveError;
use crate::fox::{traced_flow, Flow};
use crate::group::{integer_rank, Element, MarkedGroup};
use crate::words::{Letter, ReducedWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl Verdict {
    fn from_bool(holds: bool) -> Self {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "true",
            Verdict::Fails => "false",
            Verdict::Unknown => "unknown",
        })
    }
}

/// How condition (3) was decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Method {
    TmCriterion { moduli: Vec<u64> },
    BoundedSearch { radius: usize },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::TmCriterion { .. } => write!(f, "T_m criterion"),
            Method::BoundedSearch { radius } => write!(f, "bounded search to radius {radius}"),
        }
    }
}

/// No `x ∈ Γ̄ ∖ {ē}` has `f_ρ(x·ū, s) ≠ 0`. A witness is `x`, a word for
/// it, and the nonzero flow value.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition2 {
    pub verdict: Verdict,
    pub witness: Option<(Element, ReducedWord, BigInt)>,
    /// Distinct translated edges with nonzero `ρ`-flow that were tested.
    pub candidates: usize,
}

/// The edge `(ū, ū·s̄, s)` lies in no `supp f_g`, `g ∈ Γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition3 {
    pub verdict: Verdict,
    pub method: Method,
    /// A `Holds` verdict reached by search covers only the explored ball.
    pub bounded_only: bool,
    pub search: Option<EdgeSearch>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub edge: (Element, usize),
    pub edge_flow: BigInt,
    pub condition1: Verdict,
    pub condition2: Condition2,
    pub condition3: Condition3,
}

impl CheckReport {
    /// All three conditions hold and none of them rests on a bounded search.
    pub fn certifies_exclusive(&self) -> bool {
        self.all_hold() && !self.condition3.bounded_only
    }

    pub fn all_hold(&self) -> bool {
        self.condition1 == Verdict::Holds
            && self.condition2.verdict == Verdict::Holds
            && self.condition3.verdict == Verdict::Holds
    }

    pub fn to_json(&self, group: &MarkedGroup) -> Value {
        let condition2_witness = self.condition2.witness.as_ref().map(|(x, word, value)| {
            json!({
                "x": group.element_to_json(x),
                "word": word.to_string(),
                "flow": value.to_string(),
            })
        });
        let condition3_witness = match &self.condition3.search {
            Some(EdgeSearch::Found {
                gamma_word,
                word,
                flow,
            }) => Some(json!({
                "gamma_word": format_gamma_word(gamma_word),
                "word": word.to_string(),
                "flow": flow.to_string(),
            })),
            _ => None,
        };
        let explored = self.condition3.search.as_ref().map(EdgeSearch::explored);
        json!({
            "edge": {
                "source": group.element_to_json(&self.edge.0),
                "generator": format!("s{}", self.edge.1 + 1),
                "flow": self.edge_flow.to_string(),
            },
            "condition1": { "verdict": self.condition1.to_string() },
            "condition2": {
                "verdict": self.condition2.verdict.to_string(),
                "candidates": self.condition2.candidates,
                "witness": condition2_witness,
            },
            "condition3": {
                "verdict": self.condition3.verdict.to_string(),
                "method": self.condition3.method.to_string(),
                "bounded_only": self.condition3.bounded_only,
                "explored": explored,
                "witness": condition3_witness,
            },
            "exclusive": self.certifies_exclusive(),
        })
    }
}

/// Writes a word over the subgroup generators as `g1 g2^-1 …`.
fn format_gamma_word(letters: &[Letter]) -> String {
    letters
        .iter()
        .map(|l| format!("g{}{}", l.generator + 1, if l.inverse { "^-1" } else { "" }))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Outcome of a breadth-first search for an element of `Γ` whose flow is
/// nonzero on a given edge.
#[derive(Clone, Debug, PartialEq)]
pub enum EdgeSearch {
    /// `gamma_word` is over the subgroup generators, `word` its expansion.
    Found {
        gamma_word: Vec<Letter>,
        word: ReducedWord,
        flow: BigInt,
    },
    /// Every element within `radius` was examined.
    NotFound { radius: usize, explored: usize },
    /// The budget ran out after completing `completed` layers.
    Exhausted { completed: usize, explored: usize },
}

impl EdgeSearch {
    pub fn explored(&self) -> usize {
        match self {
            EdgeSearch::Found { .. } => 0,
            EdgeSearch::NotFound { explored, .. } | EdgeSearch::Exhausted { explored, .. } => {
                *explored
            }
        }
    }
}

struct SearchState {
    flow: Flow,
    endpoint: Element,
    path: Vec<Letter>,
}

/// Breadth-first search over products of `γ_j^{±1}` of length at most
/// `radius` for one whose flow is nonzero on `edge`. Elements are
/// identified by their flow and endpoint, and each layer is expanded in
/// parallel.
pub fn search_edge_in_subgroup_flows(
    group: &MarkedGroup,
    gamma: &[ReducedWord],
    edge: &(Element, usize),
    radius: usize,
    budget: usize,
) -> Result<EdgeSearch, ExclusiveError> {
    let mut moves = Vec::with_capacity(2 * gamma.len());
    for (j, word) in gamma.iter().enumerate() {
        for inverse in [false, true] {
            let word = if inverse {
                word.inverse()
            } else {
                word.clone()
            };
            let (flow, endpoint) = traced_flow::<BigInt>(&word, group)?;
            moves.push((Letter::new(j, inverse), flow, endpoint));
        }
    }
    let identity = group.identity();
    let mut seen: HashSet<(Flow, Element)> = HashSet::from([(Flow::zero(), identity.clone())]);
    let mut frontier = vec![SearchState {
        flow: Flow::zero(),
        endpoint: identity,
        path: Vec::new(),
    }];
    for layer in 1..=radius {
        let children: Vec<SearchState> = frontier
            .par_iter()
            .flat_map_iter(|state| {
                moves
                    .iter()
                    .filter(|(letter, ..)| {
                        state
                            .path
                            .last()
                            .is_none_or(|last| *last != letter.inverted())
                    })
                    .map(|(letter, flow, endpoint)| {
                        let mut path = state.path.clone();
                        path.push(*letter);
                        SearchState {
                            flow: state.flow.add(&flow.translate(group, &state.endpoint)),
                            endpoint: group.multiply(&state.endpoint, endpoint),
                            path,
                        }
                    })
            })
            .collect();
        let mut next = Vec::new();
        for child in children {
            let value = child.flow.value(&edge.0, edge.1);
            if !value.is_zero() {
                let word = expand(gamma, &child.path, group.rank())?;
                return Ok(EdgeSearch::Found {
                    gamma_word: child.path,
                    word,
                    flow: value,
                });
            }
            if seen.insert((child.flow.clone(), child.endpoint.clone())) {
                next.push(child);
            }
            if seen.len() > budget {
                return Ok(EdgeSearch::Exhausted {
                    completed: layer - 1,
                    explored: seen.len(),
                });
            }
        }
        frontier = next;
    }
    Ok(EdgeSearch::NotFound {
        radius,
        explored: seen.len(),
    })
}

fn expand(
    gamma: &[ReducedWord],
    path: &[Letter],
    rank: usize,
) -> Result<ReducedWord, ExclusiveError> {
    path.iter()
        .try_fold(ReducedWord::identity(rank), |acc, letter| {
            let factor = if letter.inverse {
                gamma[letter.generator].inverse()
            } else {
                gamma[letter.generator].clone()
            };
            Ok(acc.multiply(&factor)?)
        })
}

/// Whether every `γ_j` is `s_i^k` with `m_i | k`, so that `Γ ≤ H_m`.
fn generated_inside_hm(gamma: &[ReducedWord], moduli: &[u64]) -> bool {
    gamma.iter().all(|word| {
        let letters = word.letters();
        let Some(first) = letters.first() else {
            return true;
        };
        letters.iter().all(|l| l == first)
            && (letters.len() as u64).is_multiple_of(moduli[first.generator])
    })
}

/// Decides the sufficient conditions (1)–(3) for `(Γ, ρ)` to be exclusive
/// at the edge `(ū, ū·s̄, s)` named by the candidate's split.
pub fn check_exclusive(candidate: &ExclusiveCandidate) -> Result<CheckReport, ExclusiveError> {
    let group = candidate.group();
    let rho = candidate.rho();
    let flow = candidate.rho_flow();
    let edge = candidate.edge();
    let s = edge.1;
    let edge_flow = flow.value(&edge.0, s);
    let condition1 = Verdict::from_bool(!edge_flow.is_zero());

    // Every vertex in the support of f_ρ is visited by the path of ρ, so
    // the prefixes of ρ enumerate the candidates z = x·ū exhaustively.
    let u_inverse = candidate.prefix().inverse();
    let mut visited = HashSet::new();
    let mut vertex = group.identity();
    let mut candidates = 0;
    let mut witness = None;
    for k in 0..=rho.len() {
        if k > 0 {
            let letter = rho.letters()[k - 1];
            group.step(&mut vertex, letter.generator, letter.inverse);
        }
        if !visited.insert(vertex.clone()) {
            continue;
        }
        let value = flow.value(&vertex, s);
        if value.is_zero() {
            continue;
        }
        candidates += 1;
        let x_word = rho.prefix(k).multiply(&u_inverse)?;
        let x = group.evaluate_word(&x_word)?;
        if group.is_identity(&x) {
            continue;
        }
        if witness.is_none() && candidate.membership().contains_word(group, &x_word)? {
            witness = Some((x, x_word, value));
        }
    }
    let condition2 = Condition2 {
        verdict: Verdict::from_bool(witness.is_none()),
        witness,
        candidates,
    };

    let certified = match candidate.moduli() {
        Some(moduli) if generated_inside_hm(candidate.gamma(), moduli) => {
            tm_criterion(group, rho, candidate.split(), moduli)?.then(|| moduli.to_vec())
        }
        _ => None,
    };
    let condition3 = match certified {
        Some(moduli) => Condition3 {
            verdict: Verdict::Holds,
            method: Method::TmCriterion { moduli },
            bounded_only: false,
            search: None,
        },
        None => {
            let search = search_edge_in_subgroup_flows(
                group,
                candidate.gamma(),
                &edge,
                candidate.radius(),
                candidate.budget(),
            )?;
            let verdict = match search {
                EdgeSearch::Found { .. } => Verdict::Fails,
                EdgeSearch::NotFound { .. } => Verdict::Holds,
                EdgeSearch::Exhausted { .. } => Verdict::Unknown,
            };
            Condition3 {
                verdict,
                method: Method::BoundedSearch {
                    radius: candidate.radius(),
                },
                bounded_only: verdict == Verdict::Holds,
                search: Some(search),
            }
        }
    };
    Ok(CheckReport {
        edge,
        edge_flow,
        condition1,
        condition2,
        condition3,
    })
}

/// Number of translates `τ_ḡ f_ρ` over `ḡ` in the ball of the given radius
/// in `Γ̄` (over the images of `γ_j^{±1}`), and the rank of the integer
/// matrix they form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranslateRank {
    pub translates: usize,
    pub rank: usize,
}

pub fn translate_rank(
    group: &MarkedGroup,
    gamma: &[ReducedWord],
    rho: &ReducedWord,
    radius: usize,
) -> Result<TranslateRank, ExclusiveError> {
    let images = gamma
        .iter()
        .map(|w| group.evaluate_word(w))
        .collect::<Result<Vec<_>, _>>()?;
    let steps: Vec<Element> = images
        .iter()
        .flat_map(|g| [g.clone(), group.inverse(g)])
        .collect();
    let mut ball: Vec<Element> = vec![group.identity()];
    let mut seen: HashSet<Element> = ball.iter().cloned().collect();
    let mut frontier = ball.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for step in &steps {
                let y = group.multiply(x, step);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        ball.extend(next.iter().cloned());
        frontier = next;
    }
    let (flow, _) = traced_flow::<BigInt>(rho, group)?;
    let translates: Vec<Flow> = ball.iter().map(|g| flow.translate(group, g)).collect();
    let mut columns: BTreeMap<(Element, usize), usize> = BTreeMap::new();
    for t in &translates {
        for (x, i, _) in t.edges() {
            let next = columns.len();
            columns.entry((x.clone(), i)).or_insert(next);
        }
    }
    let rows: Vec<Vec<BigInt>> = translates
        .iter()
        .map(|t| {
            let mut row = vec![BigInt::zero(); columns.len()];
            for (x, i, c) in t.edges() {
                row[columns[&(x.clone(), i)]] = c.clone();
            }
            row
        })
        .collect();
    Ok(TranslateRank {
        translates: rows.len(),
        rank: integer_rank(&rows),
    })
}

#[cfg(test)]
mod tests {
    use super::super::quotient::make_hm;
    use super::*;

    fn word(text: &str, rank: usize) -> ReducedWord {
        ReducedWord::parse(text, rank).unwrap()
    }

    fn z2() -> MarkedGroup {
        MarkedGroup::abelian(2, None).unwrap()
    }

    fn metabelian_example() -> ExclusiveCandidate {
        ExclusiveCandidate::new(
            z2(),
            vec![word("s1^2", 2), word("s2^2", 2)],
            word("[s1,s2]", 2),
            1,
            "sublattice:2,2",
        )
        .unwrap()
    }

    #[test]
    fn metabelian_example_is_exclusive() {
        let report =
            check_exclusive(&metabelian_example().with_moduli(vec![2, 2]).unwrap()).unwrap();
        assert_eq!(report.edge, (Element::vector([1, 0]), 1));
        assert_eq!(report.edge_flow, BigInt::from(1));
        assert_eq!(report.condition1, Verdict::Holds);
        assert_eq!(report.condition2.verdict, Verdict::Holds);
        assert_eq!(report.condition3.verdict, Verdict::Holds);
        assert_eq!(report.condition3.method.to_string(), "T_m criterion");
        assert!(report.certifies_exclusive());
    }

    #[test]
    fn without_moduli_the_search_is_bounded_only() {
        let report = check_exclusive(&metabelian_example()).unwrap();
        assert_eq!(report.condition3.verdict, Verdict::Holds);
        assert!(report.condition3.bounded_only);
        assert_eq!(
            report.condition3.method.to_string(),
            "bounded search to radius 4"
        );
        assert!(report.all_hold());
        assert!(!report.certifies_exclusive());
    }

    #[test]
    fn full_group_fails_condition_two() {
        let candidate = ExclusiveCandidate::new(
            z2(),
            vec![word("s1", 2), word("s2", 2)],
            word("[s1,s2]", 2),
            0,
            "full",
        )
        .unwrap();
        let report = check_exclusive(&candidate).unwrap();
        assert_eq!(report.condition1, Verdict::Holds);
        let (x, x_word, value) = report.condition2.witness.clone().unwrap();
        assert_eq!(report.condition2.verdict, Verdict::Fails);
        assert_eq!(x, Element::vector([0, 1]));
        assert_eq!(value, BigInt::from(-1));
        // the witness is verifiable independently
        assert_eq!(z2().evaluate_word(&x_word).unwrap(), x);
        assert_eq!(candidate.rho_flow().value(&x, 0), value);
        // s1 itself uses the edge (e, s1)
        assert_eq!(report.condition3.verdict, Verdict::Fails);
        let Some(EdgeSearch::Found { word: g, .. }) = &report.condition3.search else {
            panic!("expected a witness");
        };
        assert!(!traced_flow::<BigInt>(g, &z2())
            .unwrap()
            .0
            .value(&report.edge.0, 0)
            .is_zero());
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let report = check_exclusive(&metabelian_example().with_radius(6).with_budget(10)).unwrap();
        assert_eq!(report.condition3.verdict, Verdict::Unknown);
        assert!(!report.condition3.bounded_only);
    }

    #[test]
    fn report_json_names_the_method() {
        let report =
            check_exclusive(&metabelian_example().with_moduli(vec![2, 2]).unwrap()).unwrap();
        let value = report.to_json(&z2());
        assert_eq!(value["condition3"]["method"], "T_m criterion");
        assert_eq!(value["condition2"]["witness"], Value::Null);
        assert_eq!(value["exclusive"], true);
    }

    #[test]
    fn tm_criterion_agrees_with_bounded_search() {
        let z2 = z2();
        let relators = [
            "[s1,s2]",
            "[s2,s1]",
            "[s1^2,s2]",
            "[s1,s2^3]",
            "[s1,s2] [s1,s2]^s1",
            "s2 [s1,s2] s2^-1",
        ];
        for text in relators {
            let rho = word(text, 2);
            for (split, letter) in rho.letters().iter().enumerate() {
                if letter.inverse {
                    continue;
                }
                for m in [[2, 2], [2, 3], [3, 2], [3, 3]] {
                    if !tm_criterion(&z2, &rho, split, &m).unwrap() {
                        continue;
                    }
                    let hm = make_hm(&z2, &m).unwrap();
                    let source = z2.evaluate_word(&rho.prefix(split)).unwrap();
                    let search = search_edge_in_subgroup_flows(
                        &z2,
                        &hm.generators,
                        &(source, letter.generator),
                        4,
                        usize::MAX,
                    )
                    .unwrap();
                    assert!(
                        matches!(search, EdgeSearch::NotFound { radius: 4, .. }),
                        "{text} split {split} m {m:?}: {search:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn translates_of_the_example_are_independent() {
        let gamma = [word("s1^2", 2), word("s2^2", 2)];
        let rank = translate_rank(&z2(), &gamma, &word("[s1,s2]", 2), 3).unwrap();
        assert_eq!(rank.translates, 25);
        assert_eq!(rank.rank, 25);
    }

    #[test]
    fn dependent_translates_are_detected() {
        // in Z/2 ≀ Z the flow of s1^2 is invariant under translation by s̄1
        let group = MarkedGroup::lamplighter(2).unwrap();
        let rank = translate_rank(&group, &[word("s1", 2)], &word("s1^2", 2), 1).unwrap();
        assert_eq!(
            rank,
            TranslateRank {
                translates: 2,
                rank: 1
            }
        );
    }
}
