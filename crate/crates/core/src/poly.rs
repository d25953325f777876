//! Dense monic polynomials over a prime field.
//!
//! A [`MonicPoly`] of degree `d` stores only its `d` lower coefficients
//! `c_0, ..., c_{d-1}`; the leading `1` is implicit. The textual form used by
//! the CLI and the JSON reports is the coefficient list low-to-high, so
//! `"[4,3]"` is `X^2 + 3X + 4`.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Felt, FieldCtx};

/// A monic polynomial `X^d + c_{d-1} X^{d-1} + ... + c_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonicPoly {
    degree: usize,
    coeffs: Vec<Felt>,
}

impl MonicPoly {
    /// The constant polynomial `1`.
    pub fn one() -> Self {
        MonicPoly { degree: 0, coeffs: Vec::new() }
    }

    /// Builds `X^d + ...` from the `d` lower coefficients, low-to-high.
    pub fn from_coeffs(ctx: &FieldCtx, coeffs: &[u64]) -> Result<Self> {
        let coeffs = coeffs.iter().map(|&c| ctx.felt(c)).collect::<Result<Vec<_>>>()?;
        Ok(MonicPoly { degree: coeffs.len(), coeffs })
    }

    pub(crate) fn from_felts(coeffs: Vec<Felt>) -> Self {
        MonicPoly { degree: coeffs.len(), coeffs }
    }

    /// Parses the `"[c_0,c_1,...]"` coefficient-list form.
    pub fn parse(ctx: &FieldCtx, text: &str) -> Result<Self> {
        let raw: Vec<u64> =
            serde_json::from_str(text.trim()).map_err(|err| Error::BadPolynomial(format!("{text:?}: {err}")))?;
        Self::from_coeffs(ctx, &raw)
    }

    /// Checks a deserialized value against `ctx`.
    pub fn validate(&self, ctx: &FieldCtx) -> Result<()> {
        if self.degree != self.coeffs.len() {
            return Err(Error::BadPolynomial(format!(
                "degree {} but {} stored coefficients",
                self.degree,
                self.coeffs.len()
            )));
        }
        for c in &self.coeffs {
            ctx.felt(c.value())?;
        }
        Ok(())
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The lower coefficients `c_0, ..., c_{d-1}`.
    #[inline]
    pub fn coeffs(&self) -> &[Felt] {
        &self.coeffs
    }

    pub fn coeff_values(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.value()).collect()
    }

    /// All `d + 1` coefficients including the leading one.
    pub fn to_dense(&self) -> Vec<Felt> {
        let mut out = self.coeffs.clone();
        out.push(Felt::ONE);
        out
    }

    /// The coefficient list in the CLI/JSON text form.
    pub fn to_list_string(&self) -> String {
        serde_json::to_string(&self.coeff_values()).expect("u64 list serializes")
    }

    /// Horner evaluation.
    pub fn eval(&self, ctx: &FieldCtx, x: Felt) -> Felt {
        self.coeffs.iter().rev().fold(Felt::ONE, |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    /// Uniformly random lower coefficients.
    pub fn random<R: Rng + ?Sized>(ctx: &FieldCtx, degree: usize, rng: &mut R) -> Self {
        let coeffs = (0..degree).map(|_| ctx.reduce(rng.random_range(0..ctx.p()))).collect();
        MonicPoly { degree, coeffs }
    }

    /// The unique monic polynomial of degree exactly `d = nodes.len()` through
    /// the given points.
    pub fn interpolate(ctx: &FieldCtx, nodes: &[(Felt, Felt)]) -> Result<Self> {
        let xs: Vec<Felt> = nodes.iter().map(|&(a, _)| a).collect();
        let interp = MonicInterpolator::new(ctx, &xs)?;
        let ys: Vec<Felt> = nodes.iter().map(|&(_, y)| y).collect();
        Ok(interp.interpolate(ctx, &ys))
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree;
        match d {
            0 => write!(f, "1")?,
            1 => write!(f, "X")?,
            _ => write!(f, "X^{d}")?,
        }
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let v = c.value();
            match (k, v) {
                (0, _) => write!(f, " + {v}")?,
                (1, 1) => write!(f, " + X")?,
                (1, _) => write!(f, " + {v}X")?,
                (_, 1) => write!(f, " + X^{k}")?,
                _ => write!(f, " + {v}X^{k}")?,
            }
        }
        Ok(())
    }
}

/// Lagrange interpolation through `xs` with reusable basis polynomials.
///
/// Building the basis costs `O(n^2)`; each subsequent interpolation is a
/// linear combination of the stored basis, also `O(n^2)` but without any
/// inversions.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    xs: Vec<Felt>,
    // basis[j] holds the coefficients of L_j, low-to-high, length n.
    basis: Vec<Vec<Felt>>,
}

impl LagrangeBasis {
    pub fn new(ctx: &FieldCtx, xs: &[Felt]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(xs.len());
        for &x in xs {
            if !seen.insert(x) {
                return Err(Error::DuplicateNode(x.value()));
            }
        }
        let n = xs.len();
        // master = prod (X - x_k), length n + 1
        let mut master = vec![Felt::ONE];
        for &x in xs {
            let mut next = vec![Felt::ZERO; master.len() + 1];
            for (i, &c) in master.iter().enumerate() {
                next[i + 1] = ctx.add(next[i + 1], c);
                next[i] = ctx.sub(next[i], ctx.mul(c, x));
            }
            master = next;
        }
        let mut basis = Vec::with_capacity(n);
        for (j, &xj) in xs.iter().enumerate() {
            // master / (X - x_j) by synthetic division from the top.
            let mut quot = vec![Felt::ZERO; n];
            let mut carry = Felt::ZERO;
            for i in (0..n).rev() {
                carry = ctx.add(master[i + 1], ctx.mul(carry, xj));
                quot[i] = carry;
            }
            let denom = xs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .fold(Felt::ONE, |acc, (_, &xk)| ctx.mul(acc, ctx.sub(xj, xk)));
            let scale = ctx.inv(denom)?;
            for c in &mut quot {
                *c = ctx.mul(*c, scale);
            }
            basis.push(quot);
        }
        Ok(LagrangeBasis { xs: xs.to_vec(), basis })
    }

    pub fn nodes(&self) -> &[Felt] {
        &self.xs
    }

    /// Coefficients (low-to-high, length `n`) of the polynomial of degree
    /// below `n` taking value `ys[j]` at `xs[j]`.
    pub fn interpolate(&self, ctx: &FieldCtx, ys: &[Felt]) -> Vec<Felt> {
        assert_eq!(ys.len(), self.xs.len(), "one value per node");
        let mut out = vec![Felt::ZERO; self.xs.len()];
        for (lj, &y) in self.basis.iter().zip(ys) {
            if y.is_zero() {
                continue;
            }
            for (o, &c) in out.iter_mut().zip(lj) {
                *o = ctx.add(*o, ctx.mul(c, y));
            }
        }
        out
    }
}

/// Monic interpolation through a fixed set of `d` abscissae: returns
/// `X^d + r` where `r` interpolates `y_j - a_j^d`.
#[derive(Debug, Clone)]
pub struct MonicInterpolator {
    basis: LagrangeBasis,
    lead: Vec<Felt>,
}

impl MonicInterpolator {
    pub fn new(ctx: &FieldCtx, xs: &[Felt]) -> Result<Self> {
        let basis = LagrangeBasis::new(ctx, xs)?;
        let d = xs.len() as u64;
        let lead = xs.iter().map(|&a| ctx.pow(a, d)).collect();
        Ok(MonicInterpolator { basis, lead })
    }

    pub fn nodes(&self) -> &[Felt] {
        self.basis.nodes()
    }

    pub fn interpolate(&self, ctx: &FieldCtx, ys: &[Felt]) -> MonicPoly {
        let shifted: Vec<Felt> = ys.iter().zip(&self.lead).map(|(&y, &l)| ctx.sub(y, l)).collect();
        MonicPoly::from_felts(self.basis.interpolate(ctx, &shifted))
    }
}

/// Evaluates a dense coefficient vector (low-to-high).
pub fn eval_dense(ctx: &FieldCtx, coeffs: &[Felt], x: Felt) -> Felt {
    coeffs.iter().rev().fold(Felt::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x), c))
}

/// Schoolbook product of dense coefficient vectors.
pub fn mul_dense(ctx: &FieldCtx, a: &[Felt], b: &[Felt]) -> Vec<Felt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Felt::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ctx.add(out[i + j], ctx.mul(x, y));
        }
    }
    out
}

/// `a^k` for a dense coefficient vector.
pub fn pow_dense(ctx: &FieldCtx, a: &[Felt], mut k: u64) -> Vec<Felt> {
    let mut acc = vec![Felt::ONE];
    let mut base = a.to_vec();
    while k > 0 {
        if k & 1 == 1 {
            acc = mul_dense(ctx, &acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = mul_dense(ctx, &base, &base);
        }
    }
    acc
}

/// Drops high zero coefficients.
pub fn trim(coeffs: &mut Vec<Felt>) {
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert_eq, prop_assume, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f13() -> FieldCtx {
        FieldCtx::new(13, 3).unwrap()
    }

    fn felt(ctx: &FieldCtx, v: u64) -> Felt {
        ctx.felt(v).unwrap()
    }

    // Independent evaluator: sum c_k x^k with explicit powers.
    fn brute_eval(ctx: &FieldCtx, f: &MonicPoly, x: Felt) -> Felt {
        f.to_dense().iter().enumerate().fold(Felt::ZERO, |acc, (k, &c)| ctx.add(acc, ctx.mul(c, ctx.pow(x, k as u64))))
    }

    #[test]
    fn eval_examples() {
        let ctx = f13();
        let f = MonicPoly::parse(&ctx, "[1]").unwrap();
        assert_eq!(f.eval(&ctx, felt(&ctx, 2)), felt(&ctx, 3));
        let f = MonicPoly::parse(&ctx, "[1,0]").unwrap();
        assert_eq!(f.eval(&ctx, Felt::ZERO), felt(&ctx, 1));
        let f = MonicPoly::parse(&ctx, "[4,3]").unwrap();
        let x = felt(&ctx, 5);
        assert_eq!(f.eval(&ctx, x), felt(&ctx, 5));
        assert_eq!(brute_eval(&ctx, &f, x), felt(&ctx, 5));
    }

    #[test]
    fn monic_interpolate_examples() {
        let ctx = f13();
        let f = MonicPoly::interpolate(&ctx, &[(felt(&ctx, 1), felt(&ctx, 2))]).unwrap();
        assert_eq!(f.coeff_values(), vec![1]);
        let f =
            MonicPoly::interpolate(&ctx, &[(felt(&ctx, 0), felt(&ctx, 4)), (felt(&ctx, 1), felt(&ctx, 8))]).unwrap();
        assert_eq!(f.coeff_values(), vec![4, 3]);
        let err = MonicPoly::interpolate(&ctx, &[(felt(&ctx, 1), felt(&ctx, 2)), (felt(&ctx, 1), felt(&ctx, 5))]);
        assert_eq!(err, Err(Error::DuplicateNode(1)));
        assert_eq!(MonicPoly::interpolate(&ctx, &[]).unwrap(), MonicPoly::one());
    }

    #[test]
    fn random_monic_examples() {
        let ctx = f13();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(MonicPoly::random(&ctx, 0, &mut rng), MonicPoly::one());
        let a = MonicPoly::random(&ctx, 3, &mut ChaCha8Rng::seed_from_u64(9));
        let b = MonicPoly::random(&ctx, 3, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        let f = MonicPoly::random(&ctx, 2, &mut rng);
        for x in [0, 4, 11] {
            let x = felt(&ctx, x);
            assert_eq!(f.eval(&ctx, x), brute_eval(&ctx, &f, x));
        }
    }

    #[test]
    fn parse_rejects_bad_input() {
        let ctx = f13();
        assert!(matches!(MonicPoly::parse(&ctx, "[1,"), Err(Error::BadPolynomial(_))));
        assert_eq!(MonicPoly::parse(&ctx, "[13]"), Err(Error::OutOfDomain { value: 13, p: 13 }));
        assert_eq!(MonicPoly::parse(&ctx, " [] ").unwrap(), MonicPoly::one());
    }

    #[test]
    fn display_and_json_shape() {
        let ctx = f13();
        let f = MonicPoly::parse(&ctx, "[4,3]").unwrap();
        assert_eq!(f.to_string(), "X^2 + 3X + 4");
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"degree":2,"coeffs":[4,3]}"#);
        assert_eq!(f.to_list_string(), "[4,3]");
        assert_eq!(MonicPoly::parse(&ctx, "[0,1,0]").unwrap().to_string(), "X^3 + X");
    }

    #[test]
    fn interpolation_hits_every_node_exhaustively() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for p in [13u64, 61, 1009] {
            let ctx = FieldCtx::new(p, 1).unwrap();
            for d in 0..=4usize {
                for _ in 0..50 {
                    let mut xs: Vec<u64> = Vec::new();
                    while xs.len() < d {
                        let x = rng.random_range(0..p);
                        if !xs.contains(&x) {
                            xs.push(x);
                        }
                    }
                    let nodes: Vec<(Felt, Felt)> =
                        xs.iter().map(|&x| (felt(&ctx, x), felt(&ctx, rng.random_range(0..p)))).collect();
                    let f = MonicPoly::interpolate(&ctx, &nodes).unwrap();
                    assert_eq!(f.degree(), d);
                    for &(a, y) in &nodes {
                        assert_eq!(brute_eval(&ctx, &f, a), y);
                    }
                }
            }
        }
    }

    #[test]
    fn dense_helpers() {
        let ctx = f13();
        // (X + 1)^3 = X^3 + 3X^2 + 3X + 1
        let cube = pow_dense(&ctx, &[Felt::ONE, Felt::ONE], 3);
        assert_eq!(cube.iter().map(|c| c.value()).collect::<Vec<_>>(), vec![1, 3, 3, 1]);
        assert_eq!(eval_dense(&ctx, &cube, felt(&ctx, 2)), felt(&ctx, 1));
        let mut v = vec![Felt::ONE, Felt::ZERO, Felt::ZERO];
        trim(&mut v);
        assert_eq!(v, vec![Felt::ONE]);
    }

    proptest! {
        #[test]
        fn reinterpolation_reproduces_polynomial(
            seed in any::<u64>(),
            d in 0usize..=5,
            pi in 0usize..3,
        ) {
            let p = [13u64, 61, 1009][pi];
            let ctx = FieldCtx::new(p, 1).unwrap();
            prop_assume!(d < p as usize);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = MonicPoly::random(&ctx, d, &mut rng);
            let mut xs: Vec<Felt> = Vec::new();
            while xs.len() < d {
                let x = ctx.reduce(rng.random_range(0..p));
                if !xs.contains(&x) {
                    xs.push(x);
                }
            }
            let nodes: Vec<_> = xs.iter().map(|&x| (x, f.eval(&ctx, x))).collect();
            prop_assert_eq!(MonicPoly::interpolate(&ctx, &nodes).unwrap(), f);
        }
    }
}
