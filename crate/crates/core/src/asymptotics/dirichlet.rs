use std::collections::{HashMap, VecDeque};

use super::AsymptoticsError;
use crate::group::{Element, MarkedGroup};
use crate::measures::MeasureSpec;

/// Largest vertex set `dirichlet_lambda1` accepts by default.
pub const DEFAULT_DIRICHLET_BUDGET: usize = 1 << 20;

const EIGEN_TOLERANCE: f64 = 1e-8;
const SOLVE_TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletReport {
    pub size: usize,
    /// Smallest eigenvalue of `I - P` restricted to `Ω`.
    pub lambda1: f64,
    /// Rayleigh quotient of `f = d(·, Ω^c)`, an upper bound for `lambda1`.
    pub test_function_bound: f64,
    pub iterations: usize,
}

/// `I - P_Ω`, with `P` the transition operator `f ↦ Σ_y μ(y) f(x·y)` and
/// `f` extended by zero outside `Ω`.
struct KilledOperator {
    diagonal: f64,
    neighbours: Vec<Vec<(usize, f64)>>,
}

impl KilledOperator {
    fn new(spec: &MeasureSpec<f64>, vertices: &[Element]) -> Self {
        let group = spec.group();
        let index: HashMap<&Element, usize> =
            vertices.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let mut diagonal = 0.0;
        for atom in spec.atoms() {
            if group.is_identity(&atom.element) {
                diagonal += atom.weight;
            }
        }
        let neighbours = vertices
            .iter()
            .map(|x| {
                spec.atoms()
                    .iter()
                    .filter(|atom| !group.is_identity(&atom.element))
                    .filter_map(|atom| {
                        index
                            .get(&group.multiply(x, &atom.element))
                            .map(|&j| (j, atom.weight))
                    })
                    .collect()
            })
            .collect();
        Self {
            diagonal: 1.0 - diagonal,
            neighbours,
        }
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        for (i, row) in self.neighbours.iter().enumerate() {
            out[i] = self.diagonal * f[i] - row.iter().map(|&(j, w)| w * f[j]).sum::<f64>();
        }
    }

    fn rayleigh(&self, f: &[f64]) -> f64 {
        let mut image = vec![0.0; f.len()];
        self.apply(f, &mut image);
        dot(f, &image) / dot(f, f)
    }

    /// Solves `(I - P_Ω) x = b` by conjugate gradients, starting from `x`.
    fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = b.len();
        let mut image = vec![0.0; n];
        self.apply(x, &mut image);
        let mut residual: Vec<f64> = b.iter().zip(&image).map(|(b, a)| b - a).collect();
        let mut direction = residual.clone();
        let mut norm = dot(&residual, &residual);
        let target = SOLVE_TOLERANCE * SOLVE_TOLERANCE * dot(b, b);
        for _ in 0..10 * n + 100 {
            if norm <= target {
                break;
            }
            self.apply(&direction, &mut image);
            let step = norm / dot(&direction, &image);
            for i in 0..n {
                x[i] += step * direction[i];
                residual[i] -= step * image[i];
            }
            let next = dot(&residual, &residual);
            for i in 0..n {
                direction[i] = residual[i] + next / norm * direction[i];
            }
            norm = next;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Word distance to the complement of `Ω`, by breadth-first search inward
/// from the vertices with a generator step leaving `Ω`.
fn distance_to_complement(group: &MarkedGroup, vertices: &[Element]) -> Vec<f64> {
    let index: HashMap<&Element, usize> =
        vertices.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let steps = |x: &Element| {
        (0..group.rank())
            .flat_map(|g| [(g, false), (g, true)])
            .map(|(g, inverse)| {
                let mut y = x.clone();
                group.step(&mut y, g, inverse);
                y
            })
            .collect::<Vec<_>>()
    };
    let mut distance = vec![0u64; vertices.len()];
    let mut queue = VecDeque::new();
    for (i, x) in vertices.iter().enumerate() {
        if steps(x).iter().any(|y| !index.contains_key(y)) {
            distance[i] = 1;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for y in steps(&vertices[i]) {
            if let Some(&j) = index.get(&y) {
                if distance[j] == 0 {
                    distance[j] = distance[i] + 1;
                    queue.push_back(j);
                }
            }
        }
    }
    distance.into_iter().map(|d| d as f64).collect()
}

/// The bottom of the spectrum of `I - P` on functions supported in `Ω`,
/// by inverse power iteration, together with the Rayleigh quotient of the
/// distance-to-the-boundary test function.
pub fn dirichlet_lambda1(
    spec: &MeasureSpec<f64>,
    omega: &[Element],
    budget: usize,
) -> Result<DirichletReport, AsymptoticsError> {
    let mut vertices = omega.to_vec();
    vertices.sort();
    vertices.dedup();
    if vertices.is_empty() {
        return Err(AsymptoticsError::InvalidParameter(
            "the vertex set is empty".into(),
        ));
    }
    if vertices.len() > budget {
        return Err(AsymptoticsError::BudgetExceeded {
            size: vertices.len(),
            budget,
        });
    }
    let group = spec.group();
    for x in &vertices {
        if !group.contains(x) {
            return Err(AsymptoticsError::InvalidParameter(format!(
                "{} is not an element of {}",
                group.element_to_json(x),
                group.label()
            )));
        }
    }
    let operator = KilledOperator::new(spec, &vertices);
    let test_function = distance_to_complement(group, &vertices);
    let test_function_bound = operator.rayleigh(&test_function);

    let mut current = test_function;
    normalize(&mut current);
    let mut lambda = operator.rayleigh(&current);
    let mut image = vec![0.0; current.len()];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        operator.apply(&current, &mut image);
        let residual = image
            .iter()
            .zip(&current)
            .map(|(a, v)| (a - lambda * v).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= EIGEN_TOLERANCE * lambda {
            break;
        }
        iterations += 1;
        let mut next = current.clone();
        next.iter_mut().for_each(|x| *x /= lambda);
        operator.solve(&current, &mut next);
        normalize(&mut next);
        lambda = operator.rayleigh(&next);
        current = next;
    }
    Ok(DirichletReport {
        size: vertices.len(),
        lambda1: lambda,
        test_function_bound,
        iterations,
    })
}
