use std::collections::HashSet;

use super::element::Element;
use super::marked::{GroupError, MarkedGroup};

/// Elements at exactly distance `radius`, and the size of the closed ball.
#[derive(Clone, Debug, PartialEq)]
pub struct BallLayer {
    pub radius: usize,
    pub ball_size: usize,
    pub frontier: Vec<Element>,
}

/// Breadth-first enumeration of `B(R)` over `{s̄_i^{±1}}`. Stops with
/// [`GroupError::BudgetExceeded`], carrying the completed layers, once more
/// than `budget` elements have been seen.
pub fn ball(
    group: &MarkedGroup,
    radius: usize,
    budget: usize,
) -> Result<Vec<BallLayer>, GroupError> {
    let identity = group.identity();
    let mut seen: HashSet<Element> = HashSet::from([identity.clone()]);
    let mut layers = vec![BallLayer {
        radius: 0,
        ball_size: 1,
        frontier: vec![identity],
    }];
    for current in 1..=radius {
        let mut frontier = Vec::new();
        for x in &layers[current - 1].frontier {
            for generator in 0..group.rank() {
                for inverse in [false, true] {
                    let mut y = x.clone();
                    group.step(&mut y, generator, inverse);
                    if seen.insert(y.clone()) {
                        frontier.push(y);
                    }
                }
            }
            if seen.len() > budget {
                return Err(GroupError::BudgetExceeded {
                    budget,
                    completed: layers,
                });
            }
        }
        layers.push(BallLayer {
            radius: current,
            ball_size: seen.len(),
            frontier,
        });
    }
    Ok(layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_balls() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let layers = ball(&z2, 2, 1000).unwrap();
        assert_eq!(layers[1].ball_size, 5);
        assert_eq!(layers[2].ball_size, 13);
        let ll = MarkedGroup::lamplighter(2).unwrap();
        assert_eq!(ball(&ll, 1, 1000).unwrap()[1].ball_size, 4);
    }

    #[test]
    fn budget_reports_partial_layers() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        match ball(&z2, 10, 20) {
            Err(GroupError::BudgetExceeded {
                budget: 20,
                completed,
            }) => {
                assert_eq!(completed.len(), 3);
                assert_eq!(completed[2].ball_size, 13);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn keys_injective_on_balls() {
        for group in [
            MarkedGroup::free_solvable(2, 2).unwrap(),
            MarkedGroup::baumslag_solitar(2).unwrap(),
            MarkedGroup::lamplighter(3).unwrap(),
        ] {
            let layers = ball(&group, 4, 100_000).unwrap();
            let keys: HashSet<Vec<u8>> = layers
                .iter()
                .flat_map(|l| l.frontier.iter().map(Element::canonical_key))
                .collect();
            assert_eq!(keys.len(), layers.last().unwrap().ball_size);
            assert!(layers.windows(2).all(|w| w[0].ball_size <= w[1].ball_size));
        }
    }

    #[test]
    fn polynomial_growth_degree() {
        for dimension in 1..=3usize {
            let group = MarkedGroup::abelian(dimension, None).unwrap();
            let layers = ball(&group, 64, 1_000_000).unwrap();
            let points: Vec<(f64, f64)> = (8..=64)
                .map(|r| ((r as f64).ln(), (layers[r].ball_size as f64).ln()))
                .collect();
            let slope = least_squares_slope(&points);
            assert!(
                (slope - dimension as f64).abs() < 0.1,
                "D={dimension}: slope {slope}"
            );
        }
    }

    fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
        let n = points.len() as f64;
        let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
        let covariance: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
        let variance: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        covariance / variance
    }
}
