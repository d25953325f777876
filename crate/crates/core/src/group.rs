//! The order-`e` subgroup of `F_p^*`: a generator for it, baby-step
//! giant-step logarithms, and `e`-th roots by Adleman-Manders-Miller.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ff::{Felt, FieldCtx};

/// Largest exponent accepted by [`factorize`] and [`SubgroupCtx`].
pub const MAX_EXPONENT: u64 = 1 << 40;

/// Prime factorization by trial division, as `(prime, multiplicity)` pairs in
/// increasing order.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 || n > MAX_EXPONENT {
        return Err(Error::ExponentTooLarge(n));
    }
    let mut out = Vec::new();
    let mut rest = n;
    let mut q = 2u64;
    while q * q <= rest {
        if rest.is_multiple_of(q) {
            let mut k = 0;
            while rest.is_multiple_of(q) {
                rest /= q;
                k += 1;
            }
            out.push((q, k));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(out)
}

/// Baby-step giant-step table for logarithms to a fixed base of known order.
#[derive(Debug, Clone)]
pub struct Bsgs {
    order: u64,
    step: u64,
    baby: HashMap<u64, u64>,
    giant: Felt,
}

impl Bsgs {
    /// Builds the `ceil(sqrt(order))` baby steps. Fails if `base^order != 1`.
    pub fn new(ctx: &FieldCtx, base: Felt, order: u64) -> Result<Self> {
        if order == 0 || ctx.pow(base, order) != Felt::ONE {
            return Err(Error::InvalidParameter(format!("{base} does not have order dividing {order}")));
        }
        let step = ceil_sqrt(order);
        let mut baby = HashMap::with_capacity(step as usize);
        let mut cur = Felt::ONE;
        for j in 0..step {
            baby.entry(cur.value()).or_insert(j);
            cur = ctx.mul(cur, base);
        }
        // cur = base^step
        let giant = ctx.inv(cur)?;
        Ok(Bsgs { order, step, baby, giant })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The `x` in `[0, order)` with `base^x = target`.
    pub fn log(&self, ctx: &FieldCtx, target: Felt) -> Result<u64> {
        let mut gamma = target;
        for i in 0..self.step {
            if let Some(&j) = self.baby.get(&gamma.value()) {
                return Ok((i * self.step + j) % self.order);
            }
            gamma = ctx.mul(gamma, self.giant);
        }
        Err(Error::NotInSubgroup)
    }
}

/// One-shot baby-step giant-step logarithm.
pub fn bsgs_dlog(ctx: &FieldCtx, base: Felt, order: u64, target: Felt) -> Result<u64> {
    Bsgs::new(ctx, base, order)?.log(ctx, target)
}

fn ceil_sqrt(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s * s < n {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= n {
        s -= 1;
    }
    s
}

/// Per-prime data for taking `r`-th roots.
#[derive(Debug, Clone)]
struct PrimeRoot {
    r: u64,
    /// `p - 1 = r^s * t` with `r` not dividing `t`.
    s: u32,
    /// `r^{-1} mod t` (zero when `t = 1`).
    r_inv_mod_t: u64,
    /// Generator of the Sylow `r`-subgroup, of order `r^s`.
    sylow: Felt,
    /// Logarithms to a primitive `r`-th root of unity.
    unity_log: Bsgs,
}

/// The subgroup `G_e` of `F_p^*` together with a generator and the tables
/// needed to extract `e`-th roots.
#[derive(Debug, Clone)]
pub struct SubgroupCtx {
    field: FieldCtx,
    factors: Vec<(u64, u32)>,
    zeta: Felt,
    roots: Vec<PrimeRoot>,
}

impl SubgroupCtx {
    /// For each prime `r | e` draws random `g_r` until one is not an `r`-th
    /// power, then assembles `zeta_e = prod g_r^((p-1)/r^{a_r})`.
    pub fn new<R: Rng + ?Sized>(field: &FieldCtx, rng: &mut R) -> Result<Self> {
        let field = *field;
        let p = field.p();
        let e = field.e();
        let factors = factorize(e)?;
        let mut zeta = Felt::ONE;
        let mut roots = Vec::with_capacity(factors.len());
        for &(r, a) in &factors {
            let g = loop {
                let g = field.reduce(rng.random_range(1..p));
                if field.pow(g, (p - 1) / r) != Felt::ONE {
                    break g;
                }
            };
            zeta = field.mul(zeta, field.pow(g, (p - 1) / r.pow(a)));

            let mut s = 0u32;
            let mut t = p - 1;
            while t.is_multiple_of(r) {
                t /= r;
                s += 1;
            }
            let sylow = field.pow(g, t);
            let unity = field.pow(sylow, r.pow(s - 1));
            roots.push(PrimeRoot { r, s, r_inv_mod_t: inv_mod(r, t), sylow, unity_log: Bsgs::new(&field, unity, r)? });
        }
        assert!(has_exact_order(&field, zeta, e, &factors), "generator construction produced a wrong order");
        Ok(SubgroupCtx { field, factors, zeta, roots })
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// A generator of the subgroup of order `e`.
    pub fn zeta(&self) -> Felt {
        self.zeta
    }

    /// True iff `b^((p-1)/e) = 1`, i.e. `b` is a nonzero `e`-th power.
    pub fn is_eth_power(&self, b: Felt) -> bool {
        let f = &self.field;
        !b.is_zero() && f.pow(b, (f.p() - 1) / f.e()) == Felt::ONE
    }

    /// Some `z` with `z^e = b`, by successive `r`-th roots over the prime
    /// factors of `e`.
    pub fn root(&self, b: Felt) -> Result<Felt> {
        if b.is_zero() {
            return Err(Error::ZeroInput);
        }
        if !self.is_eth_power(b) {
            return Err(Error::NotAnEthPower);
        }
        // An r-th root of an e-th power is an (e/r)-th power, so the
        // reduction can proceed one prime at a time.
        let mut z = b;
        for (pr, &(_, a)) in self.roots.iter().zip(&self.factors) {
            for _ in 0..a {
                z = self.prime_root(pr, z)?;
            }
        }
        debug_assert_eq!(self.field.pow(z, self.field.e()), b);
        Ok(z)
    }

    fn prime_root(&self, pr: &PrimeRoot, b: Felt) -> Result<Felt> {
        let f = &self.field;
        let r = pr.r;
        // x0^r = b * b^(r*alpha - 1) where the excess lies in the Sylow subgroup.
        let x0 = f.pow(b, pr.r_inv_mod_t);
        let excess = f.div(f.pow(x0, r), b)?;
        let target = f.inv(excess)?;
        // Solve sylow^m = target digit by digit in base r.
        let mut m: u64 = 0;
        let mut r_pow = 1u64;
        for i in 0..pr.s {
            let shifted = f.mul(target, f.inv(f.pow(pr.sylow, m))?);
            let probe = f.pow(shifted, r.pow(pr.s - 1 - i));
            let digit = pr.unity_log.log(f, probe)?;
            m += digit * r_pow;
            if i + 1 < pr.s {
                r_pow *= r;
            }
        }
        // b is an r-th power so the excess has order dividing r^(s-1) and r | m.
        if !m.is_multiple_of(r) {
            return Err(Error::NotAnEthPower);
        }
        Ok(f.mul(x0, f.pow(pr.sylow, m / r)))
    }

    /// `z * zeta^alpha` for `alpha = 0, ..., e - 1`.
    pub fn all_roots(&self, z: Felt) -> impl Iterator<Item = Felt> + '_ {
        let f = self.field;
        (0..f.e()).scan(z, move |cur, _| {
            let out = *cur;
            *cur = f.mul(*cur, self.zeta);
            Some(out)
        })
    }

    /// `zeta^0, ..., zeta^(e-1)`.
    pub fn roots_of_unity(&self) -> Vec<Felt> {
        self.all_roots(Felt::ONE).collect()
    }
}

fn has_exact_order(f: &FieldCtx, x: Felt, n: u64, factors: &[(u64, u32)]) -> bool {
    f.pow(x, n) == Felt::ONE && factors.iter().all(|&(r, _)| f.pow(x, n / r) != Felt::ONE)
}

/// `a^{-1} mod m` for coprime `a, m`; zero when `m = 1`.
fn inv_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "{a} not invertible mod {m}");
    t0.rem_euclid(m as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sub13(e: u64, seed: u64) -> SubgroupCtx {
        let f = FieldCtx::new(13, e).unwrap();
        SubgroupCtx::new(&f, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    fn brute_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut q = 2;
        while n > 1 {
            if n.is_multiple_of(q) {
                n /= q;
                match out.last_mut() {
                    Some((r, k)) if *r == q => *k += 1,
                    _ => out.push((q, 1)),
                }
            } else {
                q += 1;
            }
        }
        out
    }

    fn order_of(f: &FieldCtx, x: Felt) -> u64 {
        let mut k = 1;
        let mut cur = x;
        while cur != Felt::ONE {
            cur = f.mul(cur, x);
            k += 1;
        }
        k
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap(), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(1).unwrap(), vec![]);
        assert_eq!(factorize(360).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(0), Err(Error::ExponentTooLarge(0)));
        assert_eq!(factorize(MAX_EXPONENT + 1), Err(Error::ExponentTooLarge(MAX_EXPONENT + 1)));
        for n in 1..5000 {
            assert_eq!(factorize(n).unwrap(), brute_factor(n));
        }
        assert_eq!(factorize(MAX_EXPONENT).unwrap(), vec![(2, 40)]);
        assert_eq!(factorize(1_099_511_627_689).unwrap(), vec![(1_099_511_627_689, 1)]);
    }

    #[test]
    fn generator_examples() {
        let f = FieldCtx::new(13, 1).unwrap();
        // elements of exact order 3 and 4 in F_13^*
        let of3: Vec<u64> = (1..13).filter(|&x| order_of(&f, Felt(x)) == 3).collect();
        let of4: Vec<u64> = (1..13).filter(|&x| order_of(&f, Felt(x)) == 4).collect();
        assert_eq!(of3, vec![3, 9]);
        assert_eq!(of4, vec![5, 8]);
        for seed in 0..20 {
            assert!(of3.contains(&sub13(3, seed).zeta().value()));
            assert!(of4.contains(&sub13(4, seed).zeta().value()));
            assert_eq!(sub13(1, seed).zeta(), Felt::ONE);
        }
    }

    #[test]
    fn bsgs_examples() {
        let f = FieldCtx::new(13, 3).unwrap();
        assert_eq!(bsgs_dlog(&f, Felt(3), 3, Felt(9)).unwrap(), 2);
        assert_eq!(bsgs_dlog(&f, Felt(3), 3, Felt(1)).unwrap(), 0);
        assert_eq!(bsgs_dlog(&f, Felt(3), 3, Felt(2)), Err(Error::NotInSubgroup));
        assert!(matches!(bsgs_dlog(&f, Felt(2), 3, Felt(1)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn amm_examples() {
        let s = sub13(3, 1);
        let f = *s.field();
        let cube_roots_of_8: Vec<u64> = (1..13).filter(|&x| f.pow(Felt(x), 3) == Felt(8)).collect();
        assert_eq!(cube_roots_of_8, vec![2, 5, 6]);
        assert!(cube_roots_of_8.contains(&s.root(Felt(8)).unwrap().value()));
        assert!([1, 3, 9].contains(&s.root(Felt(1)).unwrap().value()));
        assert_eq!(f.pow(Felt(2), 4), Felt(3));
        assert_eq!(s.root(Felt(2)), Err(Error::NotAnEthPower));
        assert_eq!(s.root(Felt(0)), Err(Error::ZeroInput));
    }

    #[test]
    fn all_roots_examples() {
        let f = FieldCtx::new(13, 3).unwrap();
        let s = SubgroupCtx { zeta: Felt(3), ..sub13(3, 0) };
        assert_eq!(s.all_roots(Felt(2)).collect::<Vec<_>>(), vec![Felt(2), Felt(6), Felt(5)]);
        assert_eq!(s.all_roots(Felt(0)).collect::<Vec<_>>(), vec![Felt(0); 3]);
        assert_eq!(sub13(1, 0).all_roots(Felt(7)).collect::<Vec<_>>(), vec![Felt(7)]);
        assert_eq!(s.field(), &f);
    }

    #[test]
    fn roots_for_every_power_and_exponent_small_primes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [2u64, 3, 5, 7, 13, 17, 97, 101, 193, 257, 641, 1009, 7681] {
            for e in (1..p).filter(|e| (p - 1) % e == 0) {
                let f = FieldCtx::new(p, e).unwrap();
                let s = SubgroupCtx::new(&f, &mut rng).unwrap();
                assert_eq!(order_of(&f, s.zeta()), e);
                for x in 1..p {
                    let b = f.pow(Felt(x), e);
                    let z = s.root(b).unwrap();
                    assert_eq!(f.pow(z, e), b, "p={p} e={e} b={b}");
                }
            }
        }
    }

    #[test]
    fn generator_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 100 {
            let p = rng.random_range(3..1_000_000u64);
            if !crate::ff::is_prime(p) {
                continue;
            }
            let divisors: Vec<u64> = (1..=p - 1).filter(|d| (p - 1) % d == 0).collect();
            let e = divisors[rng.random_range(0..divisors.len())];
            let f = FieldCtx::new(p, e).unwrap();
            let s = SubgroupCtx::new(&f, &mut rng).unwrap();
            assert!(has_exact_order(&f, s.zeta(), e, s.factors()));
            done += 1;
        }
    }
}
