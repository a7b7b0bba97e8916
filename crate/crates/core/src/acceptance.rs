//! The acceptance suite: twelve end-to-end checks, each with a time limit,
//! shared by the integration tests and `swalk selftest`.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{
    dirichlet_lambda1, fit_stretched_exponent, gamma_from_volume, witt_degree, VolumeFunction,
};
use crate::exclusive::{check_exclusive, tm_criterion, ExclusiveCandidate, Verdict};
use crate::fox::{
    flow_of_word, fox_derivative, magnus_embed, stretch_flow, stretch_word, StretchStatus,
    WreathImage,
};
use crate::group::{Element, MarkedGroup};
use crate::measures::{
    convolve_powers, even_return_probabilities, from_distribution, make_generator_power_measure,
    make_lazy_srw, make_phi_lower_measure, make_rho_measure, mc_return_probability, pushforward,
    pushforward_distribution, return_probabilities, sws, to_float, with_threads,
    ConvolutionOptions, Homomorphism, LawOnZ, MeasureKind, MeasureSpec,
};
use crate::words::ReducedWord;

type Q = BigRational;

/// A failed check, with enough detail to reproduce it.
#[derive(Debug)]
pub struct Failure(String);

impl<E: std::error::Error> From<E> for Failure {
    fn from(err: E) -> Self {
        Failure(err.to_string())
    }
}

type Check = Result<String, Failure>;

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), Failure> {
    if condition {
        Ok(())
    } else {
        Err(Failure(message()))
    }
}

#[derive(Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub limit: Duration,
    check: fn() -> Check,
}

impl fmt::Debug for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Criterion")
            .field("id", &self.id)
            .field("name", &self.name)
            .field("limit", &self.limit)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {} ({:.2} s, limit {} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

const fn criterion(id: u8, name: &'static str, seconds: u64, check: fn() -> Check) -> Criterion {
    Criterion {
        id,
        name,
        limit: Duration::from_secs(seconds),
        check,
    }
}

pub const CRITERIA: [Criterion; 12] = [
    criterion(
        1,
        "magnus embedding is a homomorphism",
        10,
        magnus_homomorphism,
    ),
    criterion(2, "word problem in free solvable groups", 5, word_problem),
    criterion(
        3,
        "edge flows are Fox derivatives",
        10,
        flows_are_fox_derivatives,
    ),
    criterion(
        4,
        "lazy walk matches its lamp-move walk",
        60,
        lamp_move_identity,
    ),
    criterion(5, "exclusive pair comparison", 120, exclusive_comparison),
    criterion(6, "exclusive pair checker", 1, exclusive_checker),
    criterion(
        7,
        "pushforward commutes with switch-walk-switch",
        10,
        lifted_pushforward,
    ),
    criterion(8, "stretch of flows", 10, stretched_flows),
    criterion(9, "Monte Carlo against exact return", 60, monte_carlo),
    criterion(10, "gamma solver", 10, gamma_solver),
    criterion(11, "Witt degrees", 1, witt_degrees),
    criterion(12, "Dirichlet eigenvalues", 30, dirichlet),
];

pub fn find(id: u8) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

impl Criterion {
    /// Runs the check; exceeding the time limit fails it.
    pub fn run(&self) -> Outcome {
        let start = Instant::now();
        let result = (self.check)();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match result {
            Ok(detail) => (true, detail),
            Err(Failure(detail)) => (false, detail),
        };
        if passed && elapsed > self.limit {
            passed = false;
            detail = format!("over the time limit; {detail}");
        }
        Outcome {
            id: self.id,
            name: self.name,
            passed,
            detail,
            elapsed,
            limit: self.limit,
        }
    }
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().map(Criterion::run).collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn word(text: &str, rank: usize) -> Result<ReducedWord, Failure> {
    Ok(ReducedWord::parse(text, rank)?)
}

fn small_groups() -> Result<Vec<MarkedGroup>, Failure> {
    Ok(vec![
        MarkedGroup::abelian(2, None)?,
        MarkedGroup::abelian(3, None)?,
        MarkedGroup::lamplighter(2)?,
        MarkedGroup::baumslag_solitar(2)?,
    ])
}

fn magnus_homomorphism() -> Check {
    let groups = small_groups()?;
    let mut rng = rng(1);
    let pairs = 1000;
    for k in 0..pairs {
        let group = &groups[k % groups.len()];
        let r = group.rank();
        let u = ReducedWord::random(r, rng.gen_range(0..=30), &mut rng);
        let v = ReducedWord::random(r, rng.gen_range(0..=30), &mut rng);
        let product: WreathImage<BigInt> = magnus_embed(&u.multiply(&v)?, group)?;
        let pu = magnus_embed::<BigInt>(&u, group)?;
        let pv = magnus_embed::<BigInt>(&v, group)?;
        ensure(product == pu.multiply(&pv, group), || {
            format!("ψ(uv) ≠ ψ(u)ψ(v) in {} for u = {u}, v = {v}", group.label())
        })?;
    }
    Ok(format!("{pairs} pairs over Z^2, Z^3, Z/2 wr Z, BS(1,2)"))
}

/// A random element of `[N, N]` for `N = [F, F]`: a conjugate of a
/// commutator of two conjugated commutators.
fn random_double_commutator(rng: &mut ChaCha8Rng, rank: usize) -> Result<ReducedWord, Failure> {
    let mut random = |max: usize| ReducedWord::random(rank, rng.gen_range(0..=max), rng);
    let mut commutator = || -> Result<ReducedWord, Failure> {
        let (a, b, c) = (random(3), random(3), random(4));
        Ok(a.commutator(&b)?.conjugate_by(&c)?)
    };
    let (n1, n2) = (commutator()?, commutator()?);
    let outer = random(5);
    Ok(n1.commutator(&n2)?.conjugate_by(&outer)?)
}

fn word_problem() -> Check {
    let s22 = MarkedGroup::free_solvable(2, 2)?;
    let s32 = MarkedGroup::free_solvable(3, 2)?;
    let s1 = word("s1", 2)?;
    let c = word("[s1,s2]", 2)?;
    let conjugate = s1.multiply(&c)?.multiply(&s1.inverse())?;
    let w = c.commutator(&conjugate)?;
    ensure(s22.is_identity(&s22.evaluate_word(&w)?), || {
        format!("{w} is not the identity in S(2,2)")
    })?;
    ensure(!s32.is_identity(&s32.evaluate_word(&w)?), || {
        format!("{w} is the identity in S(3,2)")
    })?;
    let mut rng = rng(2);
    let samples = 200;
    for _ in 0..samples {
        let product = random_double_commutator(&mut rng, 2)?
            .multiply(&random_double_commutator(&mut rng, 2)?)?;
        ensure(s22.is_identity(&s22.evaluate_word(&product)?), || {
            format!("{product} is not the identity in S(2,2)")
        })?;
    }
    Ok(format!(
        "w = {w} is trivial in S(2,2) and not in S(3,2); {samples} products in [N,N] trivial"
    ))
}

fn flows_are_fox_derivatives() -> Check {
    let groups = small_groups()?;
    let mut rng = rng(3);
    let words = 500;
    let mut edges = 0;
    for k in 0..words {
        let group = &groups[k % groups.len()];
        let w = ReducedWord::random(group.rank(), rng.gen_range(0..=30), &mut rng);
        let flow = flow_of_word::<BigInt>(&w, group)?;
        for generator in 0..group.rank() {
            let fox = fox_derivative::<BigInt>(&w, generator, group)?;
            for (x, c) in fox.terms() {
                ensure(&flow.value(x, generator) == c, || {
                    format!("flow and ∂/∂s{} differ at {x:?} for {w}", generator + 1)
                })?;
            }
        }
        for (x, generator, c) in flow.edges() {
            let fox = fox_derivative::<BigInt>(&w, generator, group)?;
            ensure(&fox.coefficient(x) == c, || {
                format!("flow and ∂/∂s{} differ at {x:?} for {w}", generator + 1)
            })?;
            edges += 1;
        }
    }
    Ok(format!("{words} words, {edges} edges"))
}

fn lamp_move_identity() -> Check {
    let groups = [
        ("Z^2", MarkedGroup::abelian(2, None)?),
        // the lamplighter marked by (a t, t), so both generators have infinite order
        ("Z/2 wr Z", "mark(ll:2| s1 s2; s2)".parse::<MarkedGroup>()?),
    ];
    let options = ConvolutionOptions::default();
    let steps = 6;
    for (name, base) in &groups {
        let mu = make_lazy_srw::<Q>(&crate::fox::magnus_group(base));
        let phi = make_phi_lower_measure::<Q>(base, &[LawOnZ::lazy(), LawOnZ::lazy()])?;
        let lhs = return_probabilities(&mu, steps, options)?;
        let rhs = return_probabilities(&phi, steps, options)?;
        for n in 1..=steps {
            ensure(lhs[n] == rhs[n], || {
                format!("over {name} at n = {n}: {} vs {}", lhs[n], rhs[n])
            })?;
        }
        let five_sixteenths = Q::new(5.into(), 16.into());
        ensure(lhs[2] == five_sixteenths, || {
            format!("over {name} the n = 2 return is {}, not 5/16", lhs[2])
        })?;
    }
    Ok(format!(
        "equal for n = 1..{steps} over Z^2 and Z/2 wr Z; n = 2 gives 5/16"
    ))
}

fn exclusive_comparison() -> Check {
    let s22 = MarkedGroup::free_solvable(2, 2)?;
    let z1 = MarkedGroup::abelian(1, None)?;
    let z2 = MarkedGroup::abelian(2, None)?;
    let rho = s22.evaluate_word(&word("[s1,s2]", 2)?)?;
    let nu = make_rho_measure::<Q>(&s22, &rho)?;
    let quarter = Q::new(1.into(), 4.into());
    let law = LawOnZ::from_table([
        (0, Q::new(1.into(), 2.into())),
        (2, quarter.clone()),
        (-2, quarter),
    ])?;
    let phi = make_generator_power_measure::<Q>(&s22, &[law.clone(), law])?;
    let sandwich = nu
        .distribution()
        .convolve(&phi.distribution(), &s22)
        .convolve(&nu.distribution(), &s22);
    let sandwich = from_distribution(&s22, &sandwich, MeasureKind::Custom)?;
    let phi_bar = pushforward(&phi, &Homomorphism::BaseProjection, &z2)?;
    let eta = make_generator_power_measure::<Q>(&z1, &[LawOnZ::simple()])?;
    let q = sws(&eta, &phi_bar)?;
    let steps = 4;
    let options = ConvolutionOptions::default();
    let lhs = return_probabilities(&sandwich, steps, options)?;
    let rhs = return_probabilities(&q, steps, options)?;
    let mut pairs = Vec::new();
    for n in 1..=steps {
        ensure(lhs[n] <= rhs[n], || {
            format!("n = {n}: {} > {}", lhs[n], rhs[n])
        })?;
        pairs.push(format!("{} ≤ {}", lhs[n], rhs[n]));
    }
    Ok(pairs.join(", "))
}

fn exclusive_checker() -> Check {
    let z2 = MarkedGroup::abelian(2, None)?;
    let w = |text: &str| word(text, 2);
    let example = ExclusiveCandidate::new(
        z2.clone(),
        vec![w("s1^2")?, w("s2^2")?],
        w("[s1,s2]")?,
        1,
        "sublattice:2,2",
    )?
    .with_moduli(vec![2, 2])?;
    let report = check_exclusive(&example)?;
    ensure(report.certifies_exclusive(), || {
        format!("metabelian example not certified: {}", report.to_json(&z2))
    })?;

    let full = ExclusiveCandidate::new(
        z2.clone(),
        vec![w("s1")?, w("s2")?],
        w("[s1,s2]")?,
        0,
        "full",
    )?;
    let report = check_exclusive(&full)?;
    ensure(report.condition2.verdict == Verdict::Fails, || {
        "full group passes condition (2)".to_string()
    })?;
    let Some((x, x_word, value)) = report.condition2.witness.clone() else {
        return Err(Failure("condition (2) failed without a witness".into()));
    };
    let (source, s) = &report.edge;
    ensure(
        z2.evaluate_word(&x_word)? == x
            && !z2.is_identity(&x)
            && full.membership().contains_element(&z2, &x)?
            && full.rho_flow().value(&z2.multiply(&x, source), *s) == value
            && !value.is_zero(),
        || format!("witness {x_word} does not verify"),
    )?;

    let criterion = tm_criterion(&z2, &w("[s1,s2]")?, 1, &[2, 2])?;
    ensure(criterion, || {
        "T_m criterion with m = (2,2), u = s1, s = s2 is false".into()
    })?;
    Ok(format!(
        "example certified; full group witness x = {x_word} with flow {value}; T_m criterion true"
    ))
}

fn lifted_pushforward() -> Check {
    let z1 = MarkedGroup::abelian(1, None)?;
    let eta = make_generator_power_measure::<Q>(&z1, &[LawOnZ::simple()])?;
    let cases = [
        (
            "Z → Z/2",
            z1.clone(),
            MarkedGroup::abelian(1, Some(&[2]))?,
            Homomorphism::Reduce { moduli: vec![2] },
        ),
        (
            "S(2,2) → Z^2",
            MarkedGroup::free_solvable(2, 2)?,
            MarkedGroup::abelian(2, None)?,
            Homomorphism::BaseProjection,
        ),
    ];
    let steps = 3;
    let options = ConvolutionOptions::default();
    for (name, source, target, theta) in cases {
        let mu = make_lazy_srw::<Q>(&source);
        let lhs_measure = sws(&eta, &mu)?;
        let rhs_measure = sws(&eta, &pushforward(&mu, &theta, &target)?)?;
        let theta1 = theta.lifted(1);
        let lhs = convolve_powers(&lhs_measure, steps, options)?;
        let rhs = convolve_powers(&rhs_measure, steps, options)?;
        for n in 1..=steps {
            let pushed = pushforward_distribution(
                &lhs[n],
                &theta1,
                lhs_measure.group(),
                rhs_measure.group(),
            )?;
            ensure(pushed == rhs[n], || format!("{name} differs at n = {n}"))?;
        }
    }
    Ok(format!("Z → Z/2 and S(2,2) → Z^2 agree for n = 1..{steps}"))
}

fn stretched_flows() -> Check {
    let groups = [
        MarkedGroup::abelian(2, None)?,
        MarkedGroup::free_solvable(2, 2)?,
    ];
    let mut rng = rng(8);
    let words = 100;
    for group in &groups {
        for _ in 0..words {
            let w = ReducedWord::random(2, rng.gen_range(0..=20), &mut rng);
            let direct = flow_of_word::<BigInt>(&stretch_word(&w, 2), group)?;
            let stretched = stretch_flow(&flow_of_word::<BigInt>(&w, group)?, group, 2)?;
            ensure(
                stretched.status == StretchStatus::Verified && stretched.flow == direct,
                || format!("stretch differs over {} for {w}", group.label()),
            )?;
        }
    }
    Ok(format!("{words} words over Z^2 and over S(2,2)"))
}

fn monte_carlo() -> Check {
    let s22 = MarkedGroup::free_solvable(2, 2)?;
    let exact_spec = make_lazy_srw::<Q>(&s22);
    let exact =
        even_return_probabilities(&exact_spec, 4, ConvolutionOptions::default())?[4].clone();
    let exact = exact.to_f64().unwrap_or(f64::NAN);
    let spec: MeasureSpec<f64> = to_float(&exact_spec);
    let (trials, seed) = (1_000_000, 2024);
    let single = with_threads(1, || mc_return_probability(&spec, 8, trials, seed))??;
    let parallel = with_threads(4, || mc_return_probability(&spec, 8, trials, seed))??;
    ensure(single == parallel, || {
        format!(
            "1 thread gives {} hits, 4 threads {}",
            single.hits, parallel.hits
        )
    })?;
    let (low, high) = single.wilson(3.0);
    ensure((low..=high).contains(&exact), || {
        format!("exact {exact} outside [{low}, {high}]")
    })?;
    Ok(format!(
        "exact {exact:.6}, estimate {:.6} in [{low:.6}, {high:.6}], identical on 1 and 4 threads",
        single.estimate
    ))
}

fn gamma_solver() -> Check {
    let linear = VolumeFunction::power(1.0);
    for t in [10.0, 1e3, 1e5] {
        let gamma = gamma_from_volume(&linear, t)?.gamma;
        let exact = (2.0 * t + 1.0).sqrt();
        ensure((gamma - exact).abs() <= 1e-4 * exact, || {
            format!("γ({t}) = {gamma}, expected {exact}")
        })?;
    }
    let mut fitted = Vec::new();
    for degree in [1.0, 2.0, 3.0] {
        // the wreath volume exp(V log V) over V = t^D, whose γ is
        // exp(t^{D/(2+D)} (log t)^{2/(2+D)})
        let lifted = VolumeFunction::power(degree).lifted(1.0);
        let slope = fit_stretched_exponent(&lifted, 1e3, 1e6, 13, 2.0 / (2.0 + degree))?;
        let expected = degree / (2.0 + degree);
        ensure((slope - expected).abs() <= 0.05, || {
            format!("D = {degree}: fitted {slope}, expected {expected}")
        })?;
        fitted.push(format!("D = {degree}: {slope:.3}"));
    }
    Ok(format!(
        "√(2t+1) reproduced; exponents {}",
        fitted.join(", ")
    ))
}

/// Number of Lyndon words of length `length` over `rank` letters, by
/// enumerating all words and keeping those strictly below their rotations.
fn lyndon_count(rank: u32, length: u32) -> u64 {
    let total = u64::from(rank).pow(length);
    (0..total)
        .filter(|&code| {
            let digits: Vec<u64> = (0..length)
                .map(|k| code / u64::from(rank).pow(k) % u64::from(rank))
                .collect();
            (1..digits.len()).all(|shift| {
                let rotated = digits[shift..].iter().chain(&digits[..shift]);
                digits.iter().lt(rotated)
            })
        })
        .count() as u64
}

fn witt_degrees() -> Check {
    for (rank, class, expected) in [(2, 1, 2u64), (2, 2, 4), (3, 2, 9)] {
        let oracle: u64 = (1..=class)
            .map(|m| u64::from(m) * lyndon_count(rank, m))
            .sum();
        let degree = witt_degree(rank, class);
        ensure(
            degree == BigInt::from(expected) && oracle == expected,
            || format!("D({rank},{class}) = {degree}, oracle {oracle}, expected {expected}"),
        )?;
    }
    Ok("D(2,1) = 2, D(2,2) = 4, D(3,2) = 9".into())
}

fn dirichlet() -> Check {
    let cosine = |k: i64| (1.0 - (std::f64::consts::PI / (2 * k + 2) as f64).cos()) / 2.0;
    let z1 = MarkedGroup::abelian(1, None)?;
    let line = make_lazy_srw::<f64>(&z1);
    for k in [1, 4, 16, 64] {
        let segment: Vec<Element> = (-k..=k).map(|i| Element::vector([i])).collect();
        let report = dirichlet_lambda1(&line, &segment, 10_000)?;
        ensure((report.lambda1 - cosine(k)).abs() <= 1e-6, || {
            format!("segment k = {k}: {} vs {}", report.lambda1, cosine(k))
        })?;
    }
    let plane = make_lazy_srw::<f64>(&MarkedGroup::abelian(2, None)?);
    let mut scaled = Vec::new();
    for k in [4i64, 8, 16, 32] {
        let square: Vec<Element> = (-k..=k)
            .flat_map(|i| (-k..=k).map(move |j| Element::vector([i, j])))
            .collect();
        let report = dirichlet_lambda1(&plane, &square, 10_000)?;
        ensure(report.lambda1 <= report.test_function_bound, || {
            format!("box k = {k}: λ₁ above the test-function bound")
        })?;
        scaled.push(report.lambda1 * (k * k) as f64);
    }
    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().copied().fold(0.0, f64::max);
    ensure(hi <= 2.0 * lo, || {
        format!("k²λ₁ = {scaled:?} spans more than a factor 2")
    })?;
    Ok(format!(
        "segments match the cosine eigenvalue; k²λ₁ in [{lo:.4}, {hi:.4}] for boxes"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lyndon_counts() {
        // necklace counts: binary 2, 1, 2, 3, 6; ternary 3, 3, 8
        let binary: Vec<u64> = (1..=5).map(|n| lyndon_count(2, n)).collect();
        assert_eq!(binary, vec![2, 1, 2, 3, 6]);
        let ternary: Vec<u64> = (1..=3).map(|n| lyndon_count(3, n)).collect();
        assert_eq!(ternary, vec![3, 3, 8]);
    }

    #[test]
    fn criteria_are_numbered_in_order() {
        for (k, c) in CRITERIA.iter().enumerate() {
            assert_eq!(usize::from(c.id), k + 1);
        }
        assert!(find(13).is_none());
    }

    #[test]
    fn outcomes_render_one_line() {
        let outcome = find(11).unwrap().run();
        assert!(outcome.passed);
        let line = outcome.to_string();
        assert!(line.starts_with("PASS 11 Witt degrees"));
        assert!(!line.contains('\n'));
    }
}
