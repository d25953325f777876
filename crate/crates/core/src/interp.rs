//! Recovering a hidden monic polynomial from its power oracle.
//!
//! Two routes:
//!
//! * [`naive_interpolate`] needs `de < p`. It interpolates `F = f^e` from
//!   `de + 1` values and takes the monic `e`-th root of `F` by a power-series
//!   recurrence.
//! * [`randomized_interpolate`] works for any `e | p - 1`. Each round samples a
//!   test set `T`, picks `d` anchor points where the oracle is nonzero, takes
//!   an `e`-th root `z_j` of each anchor value, and searches the `e^d` tuples
//!   `alpha` for a monic `f_alpha` with `f_alpha(a_j) = z_j zeta^{alpha_j}` whose
//!   `e`-th powers match the oracle on all of `T`.
//!
//! The randomized result is correct up to the oracle's own ambiguity: any
//! `g` with `g(x)^e = f(x)^e` everywhere is an equally valid answer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Felt, FieldCtx};
use crate::group::SubgroupCtx;
use crate::oracle::{power_value, PowerOracle};
use crate::poly::{pow_dense, LagrangeBasis, MonicInterpolator, MonicPoly};

/// Largest `e^d` the candidate search will enumerate.
pub const DEFAULT_SEARCH_CEILING: u64 = 10_000_000;

/// Default multiplier `c_T` in `|T| = ceil(c_T d log2 p)`.
pub const DEFAULT_T_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpConfig {
    /// Degree of the hidden polynomial.
    pub d: usize,
    /// Target failure probability.
    pub epsilon: f64,
    pub t_factor: f64,
    pub seed: u64,
    pub search_ceiling: u64,
}

impl InterpConfig {
    pub fn new(d: usize, epsilon: f64, seed: u64) -> Self {
        InterpConfig { d, epsilon, t_factor: DEFAULT_T_FACTOR, seed, search_ceiling: DEFAULT_SEARCH_CEILING }
    }

    /// `ceil(t_factor * d * log2 p)`, at least 1.
    pub fn test_set_size(&self, p: u64) -> usize {
        let raw = self.t_factor * self.d as f64 * (p as f64).log2();
        (snap_ceil(raw) as usize).max(1)
    }

    /// `ceil(ln(1/epsilon) / ln 100)`, at least 1: each round succeeds with
    /// probability 0.99.
    pub fn rounds(&self) -> usize {
        let raw = (1.0 / self.epsilon).ln() / 100f64.ln();
        (snap_ceil(raw) as usize).max(1)
    }

    fn check(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.t_factor > 0.0 && self.t_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_factor must be positive, got {}", self.t_factor)));
        }
        Ok(())
    }
}

fn snap_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Oracle answers on a random sample of points, kept for verification.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestSet {
    points: Vec<(Felt, Felt)>,
}

impl TestSet {
    /// Draws `size` points uniformly with replacement and queries each one.
    pub fn sample<O: PowerOracle + ?Sized, R: Rng + ?Sized>(oracle: &O, size: usize, rng: &mut R) -> Result<Self> {
        let ctx = oracle.field();
        let points = (0..size)
            .map(|_| {
                let a = rng.random_range(0..ctx.p());
                Ok((ctx.reduce(a), oracle.query(a)?))
            })
            .collect::<Result<_>>()?;
        Ok(TestSet { points })
    }

    pub fn from_points(points: Vec<(Felt, Felt)>) -> Self {
        TestSet { points }
    }

    pub fn points(&self) -> &[(Felt, Felt)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn extend(&mut self, other: &TestSet) {
        self.points.extend_from_slice(&other.points);
    }
}

/// True iff `g(a)^e` equals the recorded oracle value at every test point.
pub fn verify_candidate(ctx: &FieldCtx, g: &MonicPoly, test: &TestSet) -> bool {
    test.points.iter().all(|&(a, b)| power_value(ctx, g, a) == b)
}

/// Outcome of [`randomized_interpolate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpResult {
    pub candidate: MonicPoly,
    pub rounds_used: usize,
    /// Oracle queries made during the run.
    pub queries_used: u64,
    /// The candidate matches the oracle on the test sets of every round.
    pub verified: bool,
    pub test_set_size: usize,
    /// Anchor scan points skipped because the oracle returned zero, summed
    /// over all rounds.
    pub skipped_roots: u64,
    /// `e^d`.
    pub search_space: u64,
    /// Tuples interpolated and checked, summed over all rounds.
    pub candidates_tried: u64,
}

/// `e^d` or `None` on overflow.
pub fn search_space(e: u64, d: usize) -> Option<u64> {
    u32::try_from(d).ok().and_then(|d| e.checked_pow(d))
}

struct Round {
    test: TestSet,
    candidate: Option<MonicPoly>,
    skipped: u64,
    tried: u64,
}

/// Randomized interpolation from a power oracle.
///
/// Every round is run in full (`rounds()` of them), so the oracle sees exactly
/// `rounds * (|T| + d + skipped)` queries. The answer is the first round's
/// candidate that also matches the test sets of all other rounds.
pub fn randomized_interpolate<O: PowerOracle + ?Sized>(oracle: &O, cfg: &InterpConfig) -> Result<InterpResult> {
    cfg.check()?;
    let ctx = oracle.field();
    let d = cfg.d;
    if ctx.p() <= 2 * d as u64 {
        return Err(Error::InvalidParameter(format!("need p > 2d for anchor selection, got p = {}, d = {d}", ctx.p())));
    }
    let space = search_space(ctx.e(), d)
        .filter(|&s| s <= cfg.search_ceiling)
        .ok_or(Error::SearchTooLarge((ctx.e() as u128).saturating_pow(d as u32), cfg.search_ceiling))?;
    let start_count = oracle.query_count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let t_size = cfg.test_set_size(ctx.p());
    let rounds: Vec<Round> =
        (0..cfg.rounds()).map(|_| run_round(oracle, &ctx, d, t_size, &mut rng)).collect::<Result<_>>()?;

    let mut all_tests = TestSet::default();
    for r in &rounds {
        all_tests.extend(&r.test);
    }
    let found: Vec<&MonicPoly> = rounds.iter().filter_map(|r| r.candidate.as_ref()).collect();
    let (candidate, verified) = match found.iter().find(|c| verify_candidate(&ctx, c, &all_tests)) {
        Some(c) => ((*c).clone(), true),
        None => match found.first() {
            Some(c) => ((*c).clone(), false),
            None => return Err(Error::SearchExhausted),
        },
    };
    Ok(InterpResult {
        candidate,
        rounds_used: rounds.len(),
        queries_used: oracle.query_count() - start_count,
        verified,
        test_set_size: t_size,
        skipped_roots: rounds.iter().map(|r| r.skipped).sum(),
        search_space: space,
        candidates_tried: rounds.iter().map(|r| r.tried).sum(),
    })
}

fn run_round<O: PowerOracle + ?Sized>(
    oracle: &O,
    ctx: &FieldCtx,
    d: usize,
    t_size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Round> {
    let test = TestSet::sample(oracle, t_size, rng)?;

    // Smallest nonzero points among x = 1, ..., 2d + 1 (and below p).
    let scan_end = (2 * d as u64 + 1).min(ctx.p() - 1);
    let mut anchors = Vec::with_capacity(d);
    let mut skipped = 0u64;
    let mut x = 1u64;
    while anchors.len() < d {
        if x > scan_end {
            return Err(Error::TooManyRoots);
        }
        let b = oracle.query(x)?;
        if b.is_zero() {
            skipped += 1;
        } else {
            anchors.push((ctx.reduce(x), b));
        }
        x += 1;
    }

    let group = SubgroupCtx::new(ctx, rng)?;
    let fans: Vec<Vec<Felt>> =
        anchors.iter().map(|&(_, b)| Ok(group.all_roots(group.root(b)?).collect())).collect::<Result<_>>()?;
    let xs: Vec<Felt> = anchors.iter().map(|&(a, _)| a).collect();
    let interp = MonicInterpolator::new(ctx, &xs)?;

    let (candidate, tried) = search(ctx, &interp, &fans, &test);
    Ok(Round { test, candidate, skipped, tried })
}

/// Walks `alpha` in lexicographic order (first coordinate most significant)
/// and returns the first candidate consistent with `test`.
fn search(ctx: &FieldCtx, interp: &MonicInterpolator, fans: &[Vec<Felt>], test: &TestSet) -> (Option<MonicPoly>, u64) {
    let d = fans.len();
    let e = fans.first().map_or(1, |f| f.len());
    let mut alpha = vec![0usize; d];
    let mut ys: Vec<Felt> = fans.iter().map(|f| f[0]).collect();
    let mut tried = 0u64;
    loop {
        tried += 1;
        let cand = interp.interpolate(ctx, &ys);
        if verify_candidate(ctx, &cand, test) {
            return (Some(cand), tried);
        }
        // odometer increment from the last coordinate
        let mut j = d;
        loop {
            if j == 0 {
                return (None, tried);
            }
            j -= 1;
            alpha[j] += 1;
            if alpha[j] < e {
                ys[j] = fans[j][alpha[j]];
                break;
            }
            alpha[j] = 0;
            ys[j] = fans[j][0];
        }
    }
}

/// Interpolates `f^e` from `de + 1` queries and extracts its monic `e`-th root.
pub fn naive_interpolate<O: PowerOracle + ?Sized>(oracle: &O, d: usize) -> Result<MonicPoly> {
    let ctx = oracle.field();
    let e = ctx.e();
    let de = (d as u64).saturating_mul(e);
    if de >= ctx.p() {
        return Err(Error::DegreeOverflow { de, p: ctx.p() });
    }
    let xs: Vec<Felt> = (0..=de).map(|x| ctx.reduce(x)).collect();
    let ys: Vec<Felt> = (0..=de).map(|x| oracle.query(x)).collect::<Result<_>>()?;
    let power = LagrangeBasis::new(&ctx, &xs)?.interpolate(&ctx, &ys);
    monic_eth_root(&ctx, &power, d)
}

/// The monic `g` of degree `d` with `g^e = power`, where `power` holds
/// `de + 1` coefficients low-to-high.
///
/// With `G(t) = t^{de} F(1/t)` the reversed root is `G^{1/e} mod t^{d+1}`,
/// computed by the recurrence
/// `n H_n = sum_{k=1}^{n} ((1/e + 1) k - n) G_k H_{n-k}`.
pub fn monic_eth_root(ctx: &FieldCtx, power: &[Felt], d: usize) -> Result<MonicPoly> {
    let e = ctx.e();
    let de = d * e as usize;
    if power.len() != de + 1 || power[de] != Felt::ONE {
        return Err(Error::NotAPerfectPower);
    }
    let rev = |k: usize| if k <= de { power[de - k] } else { Felt::ZERO };
    let alpha_plus_one = ctx.add(ctx.inv(ctx.reduce(e))?, Felt::ONE);
    let mut h = vec![Felt::ONE];
    for n in 1..=d {
        let mut acc = Felt::ZERO;
        for k in 1..=n {
            let weight = ctx.sub(ctx.mul(alpha_plus_one, ctx.reduce(k as u64)), ctx.reduce(n as u64));
            acc = ctx.add(acc, ctx.mul(weight, ctx.mul(rev(k), h[n - k])));
        }
        h.push(ctx.mul(acc, ctx.inv(ctx.reduce(n as u64))?));
    }
    // c_j = H_{d-j}
    let coeffs: Vec<Felt> = (0..d).map(|j| h[d - j]).collect();
    let root = MonicPoly::from_felts(coeffs);
    if pow_dense(ctx, &root.to_dense(), e) != power {
        return Err(Error::NotAPerfectPower);
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::LocalOracle;

    fn ctx(p: u64, e: u64) -> FieldCtx {
        FieldCtx::new(p, e).unwrap()
    }

    fn local(c: FieldCtx, coeffs: &str) -> LocalOracle {
        LocalOracle::new(c, MonicPoly::parse(&c, coeffs).unwrap()).unwrap()
    }

    #[test]
    fn config_sizes() {
        let cfg = InterpConfig::new(1, 0.01, 0);
        assert_eq!(cfg.rounds(), 1);
        assert_eq!(cfg.test_set_size(13), 8);
        assert_eq!(InterpConfig::new(2, 0.01, 0).test_set_size(61), 24);
        assert_eq!(InterpConfig::new(1, 0.01, 0).test_set_size(1009), 20);
        assert_eq!(InterpConfig::new(1, 1e-4, 0).rounds(), 2);
        assert_eq!(InterpConfig::new(1, 1e-5, 0).rounds(), 3);
        assert_eq!(InterpConfig::new(1, 0.5, 0).rounds(), 1);
        assert_eq!(InterpConfig::new(0, 0.5, 0).test_set_size(13), 1);
    }

    #[test]
    fn worked_example_over_f13() {
        // anchor a_1 = 1, b_1 = 8; cube roots of 8 are {2, 5, 6}
        let c = ctx(13, 3);
        let o = local(c, "[1]");
        assert_eq!(o.query(1).unwrap(), Felt(8));
        let x2 = Felt(2);
        assert_eq!(o.query(2).unwrap(), Felt(1));
        for (coeffs, want) in [("[5]", 5u64), ("[4]", 8)] {
            let g = MonicPoly::parse(&c, coeffs).unwrap();
            assert_eq!(power_value(&c, &g, x2), Felt(want));
        }
        let res = randomized_interpolate(&o, &InterpConfig::new(1, 0.01, 7)).unwrap();
        assert_eq!(res.candidate.coeff_values(), vec![1]);
        assert!(res.verified);
        assert_eq!(res.queries_used, 8 + 1);
    }

    #[test]
    fn verify_candidate_examples() {
        let c = ctx(13, 3);
        let f = MonicPoly::parse(&c, "[1]").unwrap();
        let g = MonicPoly::parse(&c, "[5]").unwrap();
        let t = TestSet::from_points(vec![(Felt(2), power_value(&c, &f, Felt(2)))]);
        assert!(verify_candidate(&c, &f, &t));
        assert!(!verify_candidate(&c, &g, &t));
        assert!(verify_candidate(&c, &g, &TestSet::default()));
    }

    #[test]
    fn trivial_exponent_is_plain_interpolation() {
        let c = ctx(13, 1);
        let o = local(c, "[4,3]");
        let res = randomized_interpolate(&o, &InterpConfig::new(2, 0.01, 1)).unwrap();
        assert_eq!(res.search_space, 1);
        assert_eq!(res.candidates_tried, 1);
        assert_eq!(res.candidate, naive_interpolate(&o, 2).unwrap());
    }

    #[test]
    fn anchors_skip_roots() {
        // f = (X - 1)(X - 2) = X^2 - 3X + 2 vanishes at both first scan points
        let c = ctx(13, 3);
        let o = local(c, "[2,10]");
        let res = randomized_interpolate(&o, &InterpConfig::new(2, 0.01, 3)).unwrap();
        assert_eq!(res.skipped_roots, 2);
        assert_eq!(res.candidate.coeff_values(), vec![2, 10]);
        assert_eq!(res.queries_used, (res.test_set_size + 2 + 2) as u64);
    }

    #[test]
    fn interpolation_errors() {
        let c = ctx(13, 3);
        let o = local(c, "[1]");
        let mut cfg = InterpConfig::new(1, 0.01, 0);
        cfg.search_ceiling = 2;
        assert_eq!(randomized_interpolate(&o, &cfg), Err(Error::SearchTooLarge(3, 2)));
        assert!(randomized_interpolate(&o, &InterpConfig::new(7, 0.01, 0)).is_err());
        assert!(randomized_interpolate(&o, &InterpConfig::new(1, 0.0, 0)).is_err());
        // wrong degree: a quadratic oracle probed as linear
        let o = local(c, "[1,1]");
        let res = randomized_interpolate(&o, &InterpConfig::new(1, 0.01, 0));
        assert!(matches!(res, Err(Error::SearchExhausted)) || res.is_ok_and(|r| !r.verified));
    }

    #[test]
    fn naive_examples() {
        let c = ctx(13, 3);
        let o = local(c, "[1]");
        assert_eq!(naive_interpolate(&o, 1).unwrap().coeff_values(), vec![1]);
        assert_eq!(o.query_count(), 4);
        let o = local(ctx(13, 1), "[7,0,5]");
        assert_eq!(naive_interpolate(&o, 3).unwrap().coeff_values(), vec![7, 0, 5]);
        // de = 12 < 13 still fits; d = 2 does not
        let o = local(ctx(13, 12), "[1]");
        assert_eq!(naive_interpolate(&o, 1).unwrap().coeff_values(), vec![1]);
        let o = local(ctx(13, 12), "[1,1]");
        assert_eq!(naive_interpolate(&o, 2), Err(Error::DegreeOverflow { de: 24, p: 13 }));
        assert_eq!(o.query_count(), 0);
        let o = local(FieldCtx::new(29, 7).unwrap(), "[1,1]");
        assert_eq!(naive_interpolate(&o, 2).unwrap().coeff_values(), vec![1, 1]);
        let o = local(ctx(13, 3), "[1,1]");
        // degree-2 oracle read as degree 1: the interpolant of 4 points is not a cube
        assert_eq!(naive_interpolate(&o, 1), Err(Error::NotAPerfectPower));
    }

    #[test]
    fn eth_root_of_binomial_cube() {
        let c = ctx(13, 3);
        let cube: Vec<Felt> = [1u64, 3, 3, 1].iter().map(|&v| Felt(v)).collect();
        assert_eq!(monic_eth_root(&c, &cube, 1).unwrap().coeff_values(), vec![1]);
        let bad: Vec<Felt> = [1u64, 3, 4, 1].iter().map(|&v| Felt(v)).collect();
        assert_eq!(monic_eth_root(&c, &bad, 1), Err(Error::NotAPerfectPower));
    }

    #[test]
    fn eth_root_recovers_random_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (p, e) in [(13u64, 3u64), (61, 5), (61, 12), (1009, 7), (1009, 36)] {
            let c = ctx(p, e);
            for d in 0..=4usize {
                for _ in 0..10 {
                    let f = MonicPoly::random(&c, d, &mut rng);
                    let power = pow_dense(&c, &f.to_dense(), e);
                    assert_eq!(monic_eth_root(&c, &power, d).unwrap(), f);
                }
            }
        }
    }
}
