use std::str::FromStr;

use num_rational::BigRational;
use solvable_walks::measures::{
    iterated_sws, make_generator_power_measure, make_lazy_srw, make_phi_lower_measure, LawOnZ,
    MeasureSpec, DEFAULT_CUTOFF,
};
use solvable_walks::scalar::Probability;
use solvable_walks::MarkedGroup;

use crate::failure::{usage, UsageError};

/// A step measure named on the command line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureChoice {
    /// Lazy simple random walk on the generators.
    Lazy,
    /// Uniform on the generators and their inverses.
    Simple,
    /// `s_i^{±m}` with equal weights.
    TwoPoint(i64),
    /// Heavy-tailed jumps `s_i^m` with `p(m) ∝ (1+|m|)^{-1-α}`.
    PowerLaw { alpha: f64, cutoff: u64 },
    /// The lamp-move measure on `Z^r ≀ G` built from lazy laws.
    PhiLazy,
    /// Iterated switch-walk-switch over the lazy walk, with lazy lamps.
    Sws(usize),
}

impl FromStr for MeasureChoice {
    type Err = UsageError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || UsageError(format!("unknown measure '{text}'"));
        let (name, argument) = match text.split_once(':') {
            Some((name, argument)) => (name, Some(argument)),
            None => (text, None),
        };
        Ok(match (name, argument) {
            ("lazy", None) => MeasureChoice::Lazy,
            ("simple", None) => MeasureChoice::Simple,
            ("phi-lazy", None) => MeasureChoice::PhiLazy,
            ("two-point", Some(m)) => MeasureChoice::TwoPoint(m.parse().map_err(|_| bad())?),
            ("sws", Some(depth)) => MeasureChoice::Sws(depth.parse().map_err(|_| bad())?),
            ("power-law", Some(rest)) => {
                let (alpha, cutoff) = match rest.split_once(':') {
                    Some((alpha, cutoff)) => (alpha, cutoff.parse().map_err(|_| bad())?),
                    None => (rest, DEFAULT_CUTOFF),
                };
                MeasureChoice::PowerLaw {
                    alpha: alpha.parse().map_err(|_| bad())?,
                    cutoff,
                }
            }
            _ => return Err(bad()),
        })
    }
}

impl MeasureChoice {
    pub fn is_rational(&self) -> bool {
        !matches!(self, MeasureChoice::PowerLaw { .. })
    }

    pub fn exact(&self, group: &MarkedGroup) -> anyhow::Result<MeasureSpec<BigRational>> {
        if !self.is_rational() {
            return Err(usage(
                "power-law measures have irrational weights; drop --exact",
            ));
        }
        build(*self, group)
    }

    pub fn float(&self, group: &MarkedGroup) -> anyhow::Result<MeasureSpec<f64>> {
        if let MeasureChoice::PowerLaw { alpha, cutoff } = *self {
            let law = LawOnZ::power_law(alpha, cutoff)?;
            return Ok(make_generator_power_measure(
                group,
                &vec![law; group.rank()],
            )?);
        }
        build(*self, group)
    }
}

fn build<P: Probability>(
    choice: MeasureChoice,
    group: &MarkedGroup,
) -> anyhow::Result<MeasureSpec<P>> {
    let rank = group.rank();
    Ok(match choice {
        MeasureChoice::Lazy => make_lazy_srw(group),
        MeasureChoice::Simple => {
            make_generator_power_measure(group, &vec![LawOnZ::simple(); rank])?
        }
        MeasureChoice::TwoPoint(m) => {
            make_generator_power_measure(group, &vec![LawOnZ::two_point(m)?; rank])?
        }
        MeasureChoice::PhiLazy => make_phi_lower_measure(group, &vec![LawOnZ::lazy(); rank])?,
        MeasureChoice::Sws(depth) => {
            let lamps = make_lazy_srw(&MarkedGroup::abelian(rank, None)?);
            iterated_sws(&lamps, &make_lazy_srw(group), depth)?
        }
        MeasureChoice::PowerLaw { .. } => unreachable!("power laws are built in float"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_measures() {
        assert_eq!(
            "lazy".parse::<MeasureChoice>().unwrap(),
            MeasureChoice::Lazy
        );
        assert_eq!(
            "two-point:3".parse::<MeasureChoice>().unwrap(),
            MeasureChoice::TwoPoint(3)
        );
        assert_eq!(
            "power-law:1.5".parse::<MeasureChoice>().unwrap(),
            MeasureChoice::PowerLaw {
                alpha: 1.5,
                cutoff: DEFAULT_CUTOFF
            }
        );
        assert_eq!(
            "sws:2".parse::<MeasureChoice>().unwrap(),
            MeasureChoice::Sws(2)
        );
        assert!("lazy:1".parse::<MeasureChoice>().is_err());
        assert!("cauchy".parse::<MeasureChoice>().is_err());
    }

    #[test]
    fn power_laws_are_float_only() {
        let z1 = MarkedGroup::abelian(1, None).unwrap();
        let choice = MeasureChoice::PowerLaw {
            alpha: 1.0,
            cutoff: 10,
        };
        assert!(choice.exact(&z1).is_err());
        assert_eq!(choice.float(&z1).unwrap().atoms().len(), 21);
    }
}
