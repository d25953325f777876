//! Identity testing from power oracles.
//!
//! The deterministic testers query both oracles at the prefix `x = 1, ..., h`
//! and report the first disagreement. Two calculators give the query budget
//! `h` in the small-`e` and medium-`e` regimes; both always return a budget
//! and say separately whether the regime's hypothesis on `(e, p)` holds.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::FieldCtx;
use crate::oracle::{power_value, PowerOracle};
use crate::poly::MonicPoly;
use crate::ratio::Ratio;

/// Outcome of an identity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TestVerdict {
    /// The oracles disagree at `witness`.
    Different { witness: u64 },
    /// Every queried point agreed.
    Undistinguished,
    /// Every one of `trials` random points agreed.
    EqualWithConfidence { trials: u64 },
}

impl TestVerdict {
    pub fn witness(&self) -> Option<u64> {
        match *self {
            TestVerdict::Different { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn is_different(&self) -> bool {
        matches!(self, TestVerdict::Different { .. })
    }
}

/// Budget for the small-`e` prefix test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallEBudget {
    pub e: u64,
    pub d: u64,
    pub delta: f64,
    pub c_d: f64,
    /// Order of the product set, `floor((c_d / 2 delta)^(2d - 1))`.
    pub nu: u64,
    /// Prefix length `floor(e^(1/nu)) + 1`.
    pub h: u64,
    /// Whether `e <= p^delta`, when a prime was supplied.
    pub applicable: Option<bool>,
}

/// Default `c(d)` for `d = 1`. The true constant is not explicit; this value
/// is an exploration setting and carries no guarantee.
pub const DEFAULT_C_D: f64 = 0.4;

/// Rounds `x` to the nearest integer when it is within floating noise of it,
/// otherwise applies `f`.
fn snap(x: f64, f: fn(f64) -> f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        f(x)
    }
}

/// Largest `k` with `k^n <= e`.
fn int_root(e: u64, n: u64) -> u64 {
    if n == 1 {
        return e;
    }
    if n >= 64 {
        return 1;
    }
    let n32 = n as u32;
    let fits = |k: u64| (k as u128).checked_pow(n32).is_some_and(|v| v <= e as u128);
    let mut k = (e as f64).powf(1.0 / n as f64).round() as u64;
    while k > 1 && !fits(k) {
        k -= 1;
    }
    while fits(k + 1) {
        k += 1;
    }
    k
}

/// `nu = floor((c_d / (2 delta))^(2d-1))` and `h = floor(e^(1/nu)) + 1`.
///
/// `p`, when given, is used only to evaluate the applicability flag.
pub fn small_e_budget(e: u64, d: u64, delta: f64, c_d: f64, p: Option<u64>) -> Result<SmallEBudget> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    if !(c_d > 0.0 && c_d.is_finite()) {
        return Err(Error::InvalidParameter(format!("c_d must be positive, got {c_d}")));
    }
    if e < 2 {
        return Err(Error::InvalidParameter(format!("e must be at least 2, got {e}")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let base = c_d / (2.0 * delta);
    let raw = base.powf((2 * d - 1) as f64);
    let nu = snap(raw, f64::floor);
    if nu < 1.0 {
        return Err(Error::DegenerateBudget);
    }
    let nu = if nu >= u64::MAX as f64 { u64::MAX } else { nu as u64 };
    let h = int_root(e, nu) + 1;
    let applicable = p.map(|p| (e as f64).ln() <= delta * (p as f64).ln());
    Ok(SmallEBudget { e, d, delta, c_d, nu, h, applicable })
}

/// Budget and exponents for the medium-`e` prefix test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumEBudget {
    pub e: u64,
    pub d: u64,
    pub epsilon: f64,
    /// `1 / (4d)`
    pub tau: Ratio,
    /// `(d+1)^2 / (2(d+2))`
    pub rho: Ratio,
    /// `1 / (2d(d+2))`
    pub vartheta: Ratio,
    /// `(4d-1) / (4d^2 (d+1)^2)`
    pub eta: Ratio,
    /// `2d / (4d-1)`
    pub kappa: Ratio,
    /// `ceil(e^((1+epsilon)/(2-2 tau)))`
    pub h: u64,
    /// Whether `e <= p^(eta/(1+epsilon))`, when a prime was supplied.
    pub applicable: Option<bool>,
}

pub fn medium_e_budget(e: u64, d: u64, epsilon: f64, p: Option<u64>) -> Result<MediumEBudget> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if e < 2 {
        return Err(Error::InvalidParameter(format!("e must be at least 2, got {e}")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let tau = Ratio::new(1, 4 * d);
    let rho = Ratio::new((d + 1) * (d + 1), 2 * (d + 2));
    let vartheta = Ratio::new(1, 2 * d * (d + 2));
    let eta = Ratio::new(4 * d - 1, 4 * d * d * (d + 1) * (d + 1));
    let kappa = Ratio::new(2 * d, 4 * d - 1);
    // (1 + eps) / (2 - 2 tau) = (1 + eps) * kappa
    let exponent = (1.0 + epsilon) * kappa.to_f64();
    let raw = (e as f64).powf(exponent);
    let h = snap(raw, f64::ceil);
    let h = if h >= u64::MAX as f64 { u64::MAX } else { h as u64 };
    let applicable = p.map(|p| (e as f64).ln() <= eta.to_f64() / (1.0 + epsilon) * (p as f64).ln());
    Ok(MediumEBudget { e, d, epsilon, tau, rho, vartheta, eta, kappa, h, applicable })
}

/// `d e + 1`: more points than `f^e - g^e` can have roots when `f != g`.
pub fn exhaustive_budget(d: u64, e: u64) -> u64 {
    d * e + 1
}

fn check_pair<A: PowerOracle, B: PowerOracle>(of: &A, og: &B) -> Result<FieldCtx> {
    let (a, b) = (of.field(), og.field());
    if a != b {
        return Err(Error::OracleMismatch(a.p(), a.e(), b.p(), b.e()));
    }
    Ok(a)
}

fn check_budget(ctx: &FieldCtx, h: u64) -> Result<()> {
    if h == 0 {
        return Err(Error::InvalidParameter("h must be positive".into()));
    }
    if h >= ctx.p() {
        return Err(Error::BudgetExceedsField { h, p: ctx.p() });
    }
    Ok(())
}

/// Queries both oracles at `x = 1, ..., h` and stops at the first mismatch.
pub fn prefix_test<A: PowerOracle, B: PowerOracle>(of: &A, og: &B, h: u64) -> Result<TestVerdict> {
    let ctx = check_pair(of, og)?;
    check_budget(&ctx, h)?;
    for x in 1..=h {
        if of.query(x)? != og.query(x)? {
            return Ok(TestVerdict::Different { witness: x });
        }
    }
    Ok(TestVerdict::Undistinguished)
}

/// Like [`prefix_test`] against a polynomial known in the clear.
pub fn known_g_test<A: PowerOracle>(of: &A, g: &MonicPoly, h: u64) -> Result<TestVerdict> {
    let ctx = of.field();
    g.validate(&ctx)?;
    check_budget(&ctx, h)?;
    for x in 1..=h {
        if of.query(x)? != power_value(&ctx, g, ctx.reduce(x)) {
            return Ok(TestVerdict::Different { witness: x });
        }
    }
    Ok(TestVerdict::Undistinguished)
}

/// Compares the oracles at `trials` uniformly random points.
pub fn randomized_test<A, B, R>(of: &A, og: &B, trials: u64, rng: &mut R) -> Result<TestVerdict>
where
    A: PowerOracle,
    B: PowerOracle,
    R: Rng + ?Sized,
{
    let ctx = check_pair(of, og)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    for _ in 0..trials {
        let x = rng.random_range(0..ctx.p());
        if of.query(x)? != og.query(x)? {
            return Ok(TestVerdict::Different { witness: x });
        }
    }
    Ok(TestVerdict::EqualWithConfidence { trials })
}
