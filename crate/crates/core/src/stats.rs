//! Exhaustive measurements over a whole prime field.
//!
//! These scans touch every `x` in `F_p`, so they are limited to
//! `p <= MAX_SCAN_MODULUS` and split across the rayon pool.
//!
//! Conventions: coincidence counts compare the raw values `f(x)^e` and
//! `g(x)^e` at every `x`, zeros included. The quotient set used for product
//! sets skips every `x` where `f` or `g` vanishes, so it lives in `F_p^*`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Felt, FieldCtx};
use crate::oracle::power_value;
use crate::poly::MonicPoly;
use crate::ratio::Ratio;

pub const MAX_SCAN_MODULUS: u64 = 10_000_000;

/// Cap on `h^nu` for product-set enumeration.
pub const MAX_PRODUCT_TUPLES: u128 = 100_000_000;

fn check_scan(ctx: &FieldCtx) -> Result<()> {
    if ctx.p() > MAX_SCAN_MODULUS {
        return Err(Error::FieldTooLarge(ctx.p()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceReport {
    pub p: u64,
    pub e: u64,
    pub d: usize,
    pub f: String,
    pub g: String,
    /// `#{x : f(x)^e = g(x)^e}`
    pub count: u64,
    /// `p / e`
    pub predicted: f64,
    /// `|count - p/e| / (d sqrt(p))`
    pub deviation: f64,
    pub zeros: String,
}

/// Counts `x in F_p` with `f(x)^e = g(x)^e`.
pub fn coincidence_count(f: &MonicPoly, g: &MonicPoly, ctx: &FieldCtx) -> Result<CoincidenceReport> {
    check_scan(ctx)?;
    let count = (0..ctx.p())
        .into_par_iter()
        .filter(|&x| {
            let x = ctx.reduce(x);
            power_value(ctx, f, x) == power_value(ctx, g, x)
        })
        .count() as u64;
    let p = ctx.p();
    let d = f.degree().max(g.degree());
    let predicted = p as f64 / ctx.e() as f64;
    let deviation = (count as f64 - predicted).abs() / (d.max(1) as f64 * (p as f64).sqrt());
    Ok(CoincidenceReport {
        p,
        e: ctx.e(),
        d,
        f: f.to_list_string(),
        g: g.to_list_string(),
        count,
        predicted,
        deviation,
        zeros: "included".into(),
    })
}

/// `(p - count) / p`: the share of points where the two oracles differ.
pub fn distinguishing_fraction(f: &MonicPoly, g: &MonicPoly, ctx: &FieldCtx) -> Result<Ratio> {
    let report = coincidence_count(f, g, ctx)?;
    Ok(Ratio::new(report.p - report.count, report.p))
}

/// True iff `f(x)^e = g(x)^e` for every `x`: the two oracles cannot be told
/// apart by any query.
pub fn equiv_bruteforce(f: &MonicPoly, g: &MonicPoly, ctx: &FieldCtx) -> Result<bool> {
    check_scan(ctx)?;
    Ok((0..ctx.p()).into_par_iter().all(|x| {
        let x = ctx.reduce(x);
        power_value(ctx, f, x) == power_value(ctx, g, x)
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSetReport {
    pub p: u64,
    pub e: u64,
    pub f: String,
    pub g: String,
    pub h: u64,
    pub nu: u32,
    /// `#A` for `A = {f(x)/g(x) : 1 <= x <= h, f(x) g(x) != 0}`
    pub set_size: u64,
    /// `#A^(nu)`, the products of `nu` elements of `A`
    pub product_size: u64,
    /// Whether `A` lies inside the order-`e` subgroup.
    pub in_subgroup: bool,
    pub zeros: String,
}

/// Size of the `nu`-fold product set of the quotients `f(x)/g(x)`, `x = 1..=h`.
pub fn product_set_size(f: &MonicPoly, g: &MonicPoly, h: u64, nu: u32, ctx: &FieldCtx) -> Result<ProductSetReport> {
    if !(1..=3).contains(&nu) {
        return Err(Error::InvalidParameter(format!("nu must be 1, 2 or 3, got {nu}")));
    }
    if h >= ctx.p() {
        return Err(Error::BudgetExceedsField { h, p: ctx.p() });
    }
    let tuples = (h as u128).saturating_pow(nu);
    if tuples > MAX_PRODUCT_TUPLES {
        return Err(Error::BudgetTooLarge(tuples));
    }
    let mut quotients: HashSet<Felt> = HashSet::new();
    for x in 1..=h {
        let x = ctx.reduce(x);
        let (fx, gx) = (f.eval(ctx, x), g.eval(ctx, x));
        if fx.is_zero() || gx.is_zero() {
            continue;
        }
        quotients.insert(ctx.div(fx, gx)?);
    }
    // G_e = {a : a^e = 1}
    let in_subgroup = quotients.iter().all(|&a| ctx.pow(a, ctx.e()) == Felt::ONE);

    let mut products: HashSet<Felt> = HashSet::from([Felt::ONE]);
    for _ in 0..nu {
        products = products.iter().flat_map(|&s| quotients.iter().map(move |&a| ctx.mul(s, a))).collect();
    }
    Ok(ProductSetReport {
        p: ctx.p(),
        e: ctx.e(),
        f: f.to_list_string(),
        g: g.to_list_string(),
        h,
        nu,
        set_size: quotients.len() as u64,
        product_size: products.len() as u64,
        in_subgroup,
        zeros: "excluded".into(),
    })
}
