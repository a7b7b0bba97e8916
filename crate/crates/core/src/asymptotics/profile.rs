use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::AsymptoticsError;

/// `log_[1](n) = log(1 + n)` and `log_[i](n) = log(1 + log_[i-1](n))`.
pub fn iterated_log(depth: u32, n: f64) -> f64 {
    assert!(depth >= 1, "iterated logarithms start at depth 1");
    (0..depth).fold(n, |x, _| x.ln_1p())
}

/// A return probability profile `n ↦ exp(-E(n))` from one of the known
/// families, up to the constants hidden by `≃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// Polynomial growth of degree `D`: `n^{-D/2}`.
    Polynomial { degree: f64 },
    /// `S_{2,r}`: `E = n^{r/(r+2)} (log n)^{2/(r+2)}`.
    Metabelian { rank: u32 },
    /// `S_{d,r}` with `d > 2`: `E = n (log_[d-1] n / log_[d-2] n)^{2/r}`.
    FreeSolvable { depth: u32, rank: u32 },
    /// `F_r/[N,N]` over a nilpotent `F_r/N` of growth degree `D`.
    NilpotentBase { degree: f64 },
    /// Lamplighter or BS(1,q) base: `E = n / (log n)^2`.
    LogSquared,
    /// Base `F ≀ Z^d` with `F` finite: `E = n / (log n)^{2/d}`.
    LamplighterBase { dimension: u32 },
    /// Base `Z^b ≀ Z^d`: `E = n (log log n / log n)^{2/d}`.
    IntegerWreathBase { dimension: u32 },
    /// `S_{2,r}` under the moment `ρ_α`: `E = n^{r/(r+α)} (log n)^{α/(r+α)}`.
    AlphaMetabelian { rank: u32, alpha: f64 },
    /// `S^c_{d,r}`: the free solvable exponent with `r` replaced by `D(r,c)`.
    Scdr { rank: u32, class: u32, depth: u32 },
}

/// One evaluation: `value = exp(-exponent)`, which underflows long before
/// the exponent does.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub n: f64,
    pub exponent: f64,
    pub value: f64,
}

pub const FAMILIES: [&str; 9] = [
    "polynomial",
    "metabelian",
    "free-solvable",
    "nilpotent-base",
    "log2",
    "lamplighter-base",
    "zwr-zd-base",
    "alpha-metabelian",
    "scdr",
];

impl Profile {
    /// Builds a profile from a family name and its numeric parameters:
    /// `polynomial D`, `metabelian r`, `free-solvable d r`,
    /// `nilpotent-base D`, `log2`, `lamplighter-base d`, `zwr-zd-base d`,
    /// `alpha-metabelian r α`, `scdr r c d`.
    pub fn from_family(family: &str, params: &[f64]) -> Result<Self, AsymptoticsError> {
        let arity = |expected: usize| {
            if params.len() == expected {
                Ok(())
            } else {
                Err(AsymptoticsError::InvalidParameter(format!(
                    "family {family} takes {expected} parameters, got {}",
                    params.len()
                )))
            }
        };
        let integer = |x: f64| {
            if x.fract() == 0.0 && x >= 0.0 && x <= f64::from(u32::MAX) {
                Ok(x as u32)
            } else {
                Err(AsymptoticsError::InvalidParameter(format!(
                    "{x} is not a nonnegative integer"
                )))
            }
        };
        let profile = match family {
            "polynomial" => {
                arity(1)?;
                Profile::Polynomial { degree: params[0] }
            }
            "metabelian" => {
                arity(1)?;
                Profile::Metabelian {
                    rank: integer(params[0])?,
                }
            }
            "free-solvable" => {
                arity(2)?;
                Profile::FreeSolvable {
                    depth: integer(params[0])?,
                    rank: integer(params[1])?,
                }
            }
            "nilpotent-base" => {
                arity(1)?;
                Profile::NilpotentBase { degree: params[0] }
            }
            "log2" => {
                arity(0)?;
                Profile::LogSquared
            }
            "lamplighter-base" => {
                arity(1)?;
                Profile::LamplighterBase {
                    dimension: integer(params[0])?,
                }
            }
            "zwr-zd-base" => {
                arity(1)?;
                Profile::IntegerWreathBase {
                    dimension: integer(params[0])?,
                }
            }
            "alpha-metabelian" => {
                arity(2)?;
                Profile::AlphaMetabelian {
                    rank: integer(params[0])?,
                    alpha: params[1],
                }
            }
            "scdr" => {
                arity(3)?;
                Profile::Scdr {
                    rank: integer(params[0])?,
                    class: integer(params[1])?,
                    depth: integer(params[2])?,
                }
            }
            _ => {
                return Err(AsymptoticsError::InvalidParameter(format!(
                    "unknown family '{family}', expected one of {}",
                    FAMILIES.join(", ")
                )))
            }
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<(), AsymptoticsError> {
        let fail = |message: String| Err(AsymptoticsError::InvalidParameter(message));
        match *self {
            Profile::Polynomial { degree } | Profile::NilpotentBase { degree }
                if !(degree.is_finite() && degree >= 1.0) =>
            {
                fail(format!("growth degree must be at least 1, got {degree}"))
            }
            Profile::Metabelian { rank } | Profile::AlphaMetabelian { rank, .. } if rank < 2 => {
                fail(format!("rank must be at least 2, got {rank}"))
            }
            Profile::AlphaMetabelian { alpha, .. } if !(alpha > 0.0 && alpha < 2.0) => {
                fail(format!("alpha must lie in (0, 2), got {alpha}"))
            }
            Profile::FreeSolvable { depth, rank } if depth < 3 || rank < 2 => fail(format!(
                "free solvable profiles need depth ≥ 3 and rank ≥ 2, got {depth}, {rank}"
            )),
            Profile::Scdr { rank, class, depth } if depth < 3 || rank < 2 || class < 1 => {
                fail(format!(
                    "S^c_(d,r) needs r ≥ 2, c ≥ 1, d ≥ 3, got r = {rank}, c = {class}, d = {depth}"
                ))
            }
            Profile::LamplighterBase { dimension } | Profile::IntegerWreathBase { dimension }
                if dimension < 1 =>
            {
                fail("dimension must be at least 1".to_string())
            }
            _ => Ok(()),
        }
    }

    /// The exponent `E(n)` at `n ≥ 3`, where every logarithm involved is
    /// positive.
    pub fn exponent(&self, n: f64) -> Result<f64, AsymptoticsError> {
        self.validate()?;
        if !(n >= 3.0 && n.is_finite()) {
            return Err(AsymptoticsError::InvalidParameter(format!(
                "profiles are evaluated at n ≥ 3, got {n}"
            )));
        }
        let log = n.ln();
        let solvable = |depth: u32, degree: f64| {
            let ratio = iterated_log(depth - 1, n) / iterated_log(depth - 2, n);
            n * ratio.powf(2.0 / degree)
        };
        Ok(match *self {
            Profile::Polynomial { degree } => degree / 2.0 * log,
            Profile::Metabelian { rank } => {
                let r = f64::from(rank);
                n.powf(r / (r + 2.0)) * log.powf(2.0 / (r + 2.0))
            }
            Profile::FreeSolvable { depth, rank } => solvable(depth, f64::from(rank)),
            Profile::NilpotentBase { degree } => {
                n.powf(degree / (degree + 2.0)) * log.powf(2.0 / (degree + 2.0))
            }
            Profile::LogSquared => n / (log * log),
            Profile::LamplighterBase { dimension } => n / log.powf(2.0 / f64::from(dimension)),
            Profile::IntegerWreathBase { dimension } => {
                n * (log.ln() / log).powf(2.0 / f64::from(dimension))
            }
            Profile::AlphaMetabelian { rank, alpha } => {
                let r = f64::from(rank);
                n.powf(r / (r + alpha)) * log.powf(alpha / (r + alpha))
            }
            Profile::Scdr { rank, class, depth } => {
                let degree = witt_degree(rank, class).to_f64().expect("finite degree");
                solvable(depth, degree)
            }
        })
    }

    /// A point from which `exponent` is nondecreasing.
    pub fn monotone_from(&self) -> f64 {
        match *self {
            // n / (log n)^a increases once log n ≥ a
            Profile::LogSquared => 2f64.exp().max(3.0),
            Profile::LamplighterBase { dimension } => (2.0 / f64::from(dimension)).exp().max(3.0),
            _ => 3.0,
        }
    }

    pub fn evaluate(&self, n: f64) -> Result<ProfilePoint, AsymptoticsError> {
        let exponent = self.exponent(n)?;
        Ok(ProfilePoint {
            n,
            exponent,
            value: (-exponent).exp(),
        })
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Polynomial { degree } => write!(f, "polynomial({degree})"),
            Profile::Metabelian { rank } => write!(f, "metabelian({rank})"),
            Profile::FreeSolvable { depth, rank } => write!(f, "free-solvable({depth},{rank})"),
            Profile::NilpotentBase { degree } => write!(f, "nilpotent-base({degree})"),
            Profile::LogSquared => write!(f, "log2"),
            Profile::LamplighterBase { dimension } => write!(f, "lamplighter-base({dimension})"),
            Profile::IntegerWreathBase { dimension } => write!(f, "zwr-zd-base({dimension})"),
            Profile::AlphaMetabelian { rank, alpha } => {
                write!(f, "alpha-metabelian({rank},{alpha})")
            }
            Profile::Scdr { rank, class, depth } => write!(f, "scdr({rank},{class},{depth})"),
        }
    }
}

/// Möbius function on `1..=limit` by a linear sieve.
fn mobius_table(limit: usize) -> Vec<i8> {
    let mut mobius = vec![1i8; limit + 1];
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    if limit >= 1 {
        mobius[0] = 0;
    }
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i);
            mobius[i] = -1;
        }
        for &p in &primes {
            if i * p > limit {
                break;
            }
            composite[i * p] = true;
            if i % p == 0 {
                mobius[i * p] = 0;
                break;
            }
            mobius[i * p] = -mobius[i];
        }
    }
    mobius
}

/// `D(r,c) = Σ_{m=1}^{c} Σ_{k | m} μ(k) r^{m/k}`, the growth degree of the
/// free nilpotent group of class `c` on `r` generators.
pub fn witt_degree(rank: u32, class: u32) -> BigInt {
    let mobius = mobius_table(class as usize);
    let r = BigInt::from(rank);
    let mut total = BigInt::zero();
    for m in 1..=class as usize {
        for k in (1..=m).filter(|k| m % k == 0) {
            let term = num_traits::pow(r.clone(), m / k);
            match mobius[k] {
                1 => total += term,
                -1 => total -= term,
                _ => {}
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn iterated_log_examples() {
        assert_eq!(iterated_log(1, 0.0), 0.0);
        assert!((iterated_log(2, std::f64::consts::E - 1.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(iterated_log(3, 0.0), 0.0);
    }

    proptest! {
        #[test]
        fn iterated_log_is_monotone(depth in 1u32..6, a in 0.0f64..1e12, b in 0.0f64..1e12) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(iterated_log(depth, lo) <= iterated_log(depth, hi));
        }
    }

    #[test]
    fn polynomial_profile_is_a_power() {
        let p = Profile::Polynomial { degree: 2.0 };
        assert!((p.evaluate(100.0).unwrap().value - 0.01).abs() < 1e-15);
    }

    #[test]
    fn metabelian_exponent_at_rank_two() {
        let p = Profile::Metabelian { rank: 2 };
        for n in [10.0, 1e3, 1e6] {
            let expected = (n * f64::ln(n)).sqrt();
            assert!((p.exponent(n).unwrap() - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn free_solvable_exponent_over_n_decreases() {
        let p = Profile::FreeSolvable { depth: 3, rank: 2 };
        let ratios: Vec<f64> = (3..=9)
            .map(|k| {
                let n = 10f64.powi(k);
                p.exponent(n).unwrap() / n
            })
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
        assert!(ratios.iter().all(|&r| r > 0.0 && r < 1.0));
    }

    #[test]
    fn scdr_with_class_one_is_free_solvable() {
        let a = Profile::Scdr {
            rank: 3,
            class: 1,
            depth: 4,
        };
        let b = Profile::FreeSolvable { depth: 4, rank: 3 };
        assert_eq!(a.exponent(1e5).unwrap(), b.exponent(1e5).unwrap());
    }

    #[test]
    fn profiles_are_in_unit_interval_and_nonincreasing() {
        let families: [(&str, &[f64]); 9] = [
            ("polynomial", &[3.0]),
            ("metabelian", &[2.0]),
            ("free-solvable", &[3.0, 2.0]),
            ("nilpotent-base", &[4.0]),
            ("log2", &[]),
            ("lamplighter-base", &[2.0]),
            ("zwr-zd-base", &[1.0]),
            ("alpha-metabelian", &[2.0, 1.5]),
            ("scdr", &[2.0, 2.0, 3.0]),
        ];
        for (family, params) in families {
            let profile = Profile::from_family(family, params).unwrap();
            let start = profile.monotone_from();
            let grid: Vec<f64> = (0..200).map(|k| start * 1.05f64.powi(k)).collect();
            let points: Vec<ProfilePoint> =
                grid.iter().map(|&n| profile.evaluate(n).unwrap()).collect();
            for w in points.windows(2) {
                assert!(w[1].exponent >= w[0].exponent, "{profile} at {}", w[1].n);
                assert!(w[1].value <= w[0].value);
            }
            for p in &points {
                assert!(p.value <= 1.0 && p.exponent >= 0.0, "{profile} at {}", p.n);
                if p.exponent < 700.0 {
                    assert!(p.value > 0.0);
                }
            }
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(Profile::from_family("metabelian", &[1.0]).is_err());
        assert!(Profile::from_family("alpha-metabelian", &[2.0, 2.0]).is_err());
        assert!(Profile::from_family("free-solvable", &[2.0, 2.0]).is_err());
        assert!(Profile::from_family("polynomial", &[0.5]).is_err());
        assert!(Profile::from_family("log2", &[1.0]).is_err());
        assert!(Profile::from_family("nope", &[]).is_err());
        assert!(Profile::from_family("metabelian", &[2.5]).is_err());
        assert!(Profile::LogSquared.exponent(2.0).is_err());
    }

    #[test]
    fn witt_degree_examples() {
        assert_eq!(witt_degree(2, 1), BigInt::from(2));
        assert_eq!(witt_degree(2, 2), BigInt::from(4));
        assert_eq!(witt_degree(3, 2), BigInt::from(9));
        for r in 2..6 {
            assert_eq!(witt_degree(r, 1), BigInt::from(r));
        }
    }

    /// Number of Lyndon words of each length `1..=max_len` over `r` letters,
    /// by Duval's generation algorithm; these are the ranks of the free Lie
    /// algebra in each degree.
    fn lyndon_counts(r: usize, max_len: usize) -> Vec<u64> {
        let mut counts = vec![0u64; max_len + 1];
        let mut word = vec![0usize];
        while !word.is_empty() {
            counts[word.len()] += 1;
            let len = word.len();
            while word.len() < max_len {
                let next = word[word.len() - len];
                word.push(next);
            }
            while word.last() == Some(&(r - 1)) {
                word.pop();
            }
            if let Some(last) = word.last_mut() {
                *last += 1;
            }
        }
        counts
    }

    fn mobius_by_factoring(mut n: u64) -> i64 {
        let mut sign = 1;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                sign = -sign;
            }
            p += 1;
        }
        if n > 1 {
            -sign
        } else {
            sign
        }
    }

    #[test]
    fn witt_degree_matches_lie_algebra_ranks() {
        for r in 2..=5u32 {
            let lyndon = lyndon_counts(r as usize, 6);
            for c in 1..=6u32 {
                let from_lyndon: u64 = (1..=c as usize).map(|m| m as u64 * lyndon[m]).sum();
                let from_witt: i64 = (1..=c as i64)
                    .map(|m| {
                        let sum: i64 = (1..=m)
                            .filter(|k| m % k == 0)
                            .map(|k| mobius_by_factoring(k as u64) * (r as i64).pow((m / k) as u32))
                            .sum();
                        m * (sum / m)
                    })
                    .sum();
                assert_eq!(witt_degree(r, c), BigInt::from(from_lyndon), "r={r} c={c}");
                assert_eq!(witt_degree(r, c), BigInt::from(from_witt), "r={r} c={c}");
            }
        }
    }
}
