use super::AsymptoticsError;

/// The couple `Ω_k = [-k, k]^D ⊃ Ω'_k = [-⌈k/2⌉, ⌈k/2⌉]^D` in `Z^D` and its
/// lift `(Θ_k, Θ'_k)` to `Z^r ≀ Z^D`. Sizes of the lift are reported as
/// natural logarithms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FolnerCouple {
    pub k: u64,
    pub dimension: u32,
    pub lamp_rank: u32,
    /// `#Ω_k`, when it fits.
    pub outer: Option<u128>,
    pub inner: Option<u128>,
    pub log_outer: f64,
    pub log_inner: f64,
    /// Word distance from `Ω'_k` to the complement of `Ω_k`.
    pub distance: u64,
    /// `log #Θ_k = log #Ω + r #Ω (log k + log #Ω)`.
    pub log_theta: f64,
    /// `log #Θ'_k = log #Ω' + r #Ω log(k #Ω - k)`.
    pub log_theta_inner: f64,
}

impl FolnerCouple {
    /// `log(#Θ'_k / #Θ_k) = log(#Ω'/#Ω) + r #Ω log(1 - 1/#Ω)`.
    pub fn log_theta_ratio(&self) -> f64 {
        let outer = self.log_outer.exp();
        self.log_inner - self.log_outer + f64::from(self.lamp_rank) * outer * (-1.0 / outer).ln_1p()
    }
}

pub fn folner_zd(k: u64, dimension: u32, lamp_rank: u32) -> Result<FolnerCouple, AsymptoticsError> {
    if k < 2 || dimension < 1 || lamp_rank < 1 {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "Følner couples need k ≥ 2, D ≥ 1, r ≥ 1, got k = {k}, D = {dimension}, r = {lamp_rank}"
        )));
    }
    let half = k.div_ceil(2);
    let side = 2 * k + 1;
    let inner_side = 2 * half + 1;
    let log_outer = f64::from(dimension) * (side as f64).ln();
    let log_inner = f64::from(dimension) * (inner_side as f64).ln();
    let outer_size = log_outer.exp();
    let r = f64::from(lamp_rank);
    let log_k = (k as f64).ln();
    let log_theta = log_outer + r * outer_size * (log_k + log_outer);
    // log(k #Ω - k) = log k + log #Ω + log(1 - 1/#Ω)
    let log_theta_inner =
        log_inner + r * outer_size * (log_k + log_outer + (-1.0 / outer_size).ln_1p());
    Ok(FolnerCouple {
        k,
        dimension,
        lamp_rank,
        outer: u128::from(side).checked_pow(dimension),
        inner: u128::from(inner_side).checked_pow(dimension),
        log_outer,
        log_inner,
        distance: k - half + 1,
        log_theta,
        log_theta_inner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_counts() {
        let c = folner_zd(2, 1, 1).unwrap();
        assert_eq!((c.outer, c.inner), (Some(5), Some(3)));
        assert!(c.distance >= 1);
        assert!(folner_zd(1, 1, 1).is_err());
    }

    /// `d(Ω', Ω^c)` by brute force over the box `[-k-1, k+1]^D` in the ℓ¹ metric.
    fn brute_distance(k: i64, dimension: u32) -> u64 {
        let half = (k + 1) / 2;
        let coords = |index: i64| -> Vec<i64> {
            let width = 2 * k + 3;
            (0..dimension)
                .map(|j| (index / width.pow(j)) % width - (k + 1))
                .collect()
        };
        let total = (2 * k + 3).pow(dimension);
        let points: Vec<Vec<i64>> = (0..total).map(coords).collect();
        let inside = |p: &[i64], r: i64| p.iter().all(|c| c.abs() <= r);
        let mut best = u64::MAX;
        for a in points.iter().filter(|p| inside(p, half)) {
            for b in points.iter().filter(|p| !inside(p, k)) {
                let d: i64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
                best = best.min(d as u64);
            }
        }
        best
    }

    #[test]
    fn distances_match_brute_force() {
        for k in 2..6 {
            for dimension in 1..3 {
                assert_eq!(
                    folner_zd(k, dimension, 1).unwrap().distance,
                    brute_distance(k as i64, dimension),
                    "k = {k}, D = {dimension}"
                );
            }
        }
    }

    #[test]
    fn lifted_counts_match_direct_enumeration() {
        // D = 1, k = 2, r = 1: #Θ = 5 · 10^5, #Θ' = 3 · 8^5
        let c = folner_zd(2, 1, 1).unwrap();
        assert!((c.log_theta - (5.0 * 1e5f64).ln()).abs() < 1e-12);
        assert!((c.log_theta_inner - (3.0 * 8f64.powi(5)).ln()).abs() < 1e-12);
    }

    #[test]
    fn theta_ratio_bounds() {
        // (1 - 1/n)^{rn} ≥ e^{-rn/(n-1)} bounds #Θ'/#Θ from below, and
        // the ratio tends to e^{-r} #Ω'/#Ω from below as #Ω grows
        for k in 2..40 {
            for dimension in 1..4 {
                for lamp_rank in 1..4 {
                    let c = folner_zd(k, dimension, lamp_rank).unwrap();
                    let n = c.log_outer.exp();
                    let r = f64::from(lamp_rank);
                    let volume_ratio = c.log_inner - c.log_outer;
                    let lower = volume_ratio - r * n / (n - 1.0);
                    assert!(c.log_theta_ratio() >= lower - 1e-9);
                    assert!(c.log_theta_ratio() < volume_ratio - r);
                }
            }
        }
    }

    #[test]
    fn theta_is_at_most_volume_log_volume() {
        for k in 2..200 {
            for dimension in 1..4 {
                for lamp_rank in 1..5 {
                    let c = folner_zd(k, dimension, lamp_rank).unwrap();
                    let v = c.log_outer.exp();
                    let constant = c.log_theta / (v * v.ln());
                    assert!(constant <= 3.0 * f64::from(lamp_rank));
                }
            }
        }
    }

    #[test]
    fn large_couples_stay_in_log_space() {
        let c = folner_zd(1_000_000, 20, 3).unwrap();
        assert_eq!(c.outer, None);
        assert!(c.log_theta.is_finite() && c.log_theta > 1e126);
    }
}
