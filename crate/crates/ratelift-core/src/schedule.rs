//! Splitting schedules: the cut points that break a pair of input sequences
//! into blocks while preserving conditional complexity rate.
//!
//! Given a target rate `tau` and a first cut point `a`, the derived
//! parameters are `sigma = tau/2`, `sigma' = tau/4` and
//! `b = ceil((1 - sigma) / sigma')`. The cut points then follow the
//! recursion `t_0 = 0`, `t_1 = a`, `t_i = b * (t_1 + ... + t_{i-1})`, which
//! has the closed form `t_i = a*b*(1+b)^(i-2)` for `i >= 2`. Block `i` is
//! `x(t_{i-1}+1 : t_i)`, of length `n_i = t_i - t_{i-1}`; block outputs are
//! `m_i = i^2` bits long.
//!
//! All arithmetic here is exact: rationals for the rate parameters, big
//! integers for the geometrically growing cut points.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};

/// Exact rational used for rates; numerators and denominators stay tiny.
pub type Rate = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    /// `tau` must lie in (0, 1].
    TauOutOfRange(Rate),
    /// `a` must be a positive integer.
    BadFirstCut,
    /// `count` / `n0` must be at least 1.
    BadCount,
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleError::TauOutOfRange(t) => {
                write!(f, "tau must be in (0, 1], got {t}")
            }
            ScheduleError::BadFirstCut => write!(f, "first cut point a must be >= 1"),
            ScheduleError::BadCount => write!(f, "count must be >= 1"),
        }
    }
}

/// The derived splitting parameters for a given `(tau, a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitParams {
    pub tau: Rate,
    pub sigma: Rate,
    pub sigma_prime: Rate,
    pub a: u64,
    pub b: u64,
}

/// Computes `sigma = tau/2`, `sigma' = tau/4`, `b = ceil((1-sigma)/sigma')`
/// in exact rational arithmetic.
pub fn derive_params(tau: Rate, a: u64) -> Result<SplitParams, ScheduleError> {
    if tau <= Rate::zero() || tau > Rate::one() {
        return Err(ScheduleError::TauOutOfRange(tau));
    }
    if a == 0 {
        return Err(ScheduleError::BadFirstCut);
    }
    let sigma = tau / 2;
    let sigma_prime = tau / 4;
    // 0 < sigma' < tau - sigma holds automatically for these choices.
    debug_assert!(sigma_prime > Rate::zero() && sigma_prime < tau - sigma);
    let b_ratio = (Rate::one() - sigma) / sigma_prime;
    let b = b_ratio.ceil().to_integer();
    debug_assert!(b >= 1);
    Ok(SplitParams {
        tau,
        sigma,
        sigma_prime,
        a,
        b: b as u64,
    })
}

/// A computed schedule: cut points `t_0..t_count`, block lengths
/// `n_1..n_count`, output lengths `m_1..m_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSchedule {
    pub params: SplitParams,
    /// `t[i]` is the cut point `t_i`; `t[0] = 0`.
    pub t: Vec<BigUint>,
    /// `n[i-1]` is the block length `n_i = t_i - t_{i-1}`.
    pub n: Vec<BigUint>,
    /// `m[i-1]` is the output length `m_i = i^2`.
    pub m: Vec<u64>,
}

/// Evaluates the cut-point recursion exactly for `count` blocks.
pub fn cut_points(params: &SplitParams, count: usize) -> Result<SplitSchedule, ScheduleError> {
    if count == 0 {
        return Err(ScheduleError::BadCount);
    }
    let b = BigUint::from(params.b);
    let mut t = Vec::with_capacity(count + 1);
    t.push(BigUint::zero());
    t.push(BigUint::from(params.a));
    let mut running = BigUint::from(params.a); // t_1 + ... + t_{i-1}
    for _ in 2..=count {
        let next = &b * &running;
        running += &next;
        t.push(next);
    }
    let n: Vec<BigUint> = (1..=count).map(|i| &t[i] - &t[i - 1]).collect();
    let m: Vec<u64> = (1..=count as u64).map(|i| i * i).collect();
    Ok(SplitSchedule {
        params: params.clone(),
        t,
        n,
        m,
    })
}

/// Closed form `t_i = a*b*(1+b)^(i-2)`, valid for `i >= 2`.
pub fn closed_form_t(params: &SplitParams, i: usize) -> Option<BigUint> {
    if i < 2 {
        return None;
    }
    let base = BigUint::from(params.b + 1);
    Some(BigUint::from(params.a) * BigUint::from(params.b) * base.pow((i - 2) as u32))
}

/// Closed form `n_i = a*b^2*(1+b)^(i-3)`, valid for `i >= 3`.
pub fn closed_form_n(params: &SplitParams, i: usize) -> Option<BigUint> {
    if i < 3 {
        return None;
    }
    let base = BigUint::from(params.b + 1);
    Some(
        BigUint::from(params.a)
            * BigUint::from(params.b)
            * BigUint::from(params.b)
            * base.pow((i - 3) as u32),
    )
}

/// Output length of block `i`: `i^2`.
pub fn output_length(i: u32) -> Result<u64, ScheduleError> {
    if i == 0 {
        return Err(ScheduleError::BadCount);
    }
    Ok(u64::from(i) * u64::from(i))
}

/// The explicit next cut point the splitting argument produces on input
/// `n0`: `n1 = ceil((1-sigma)/sigma') * n0 = b * n0`.
pub fn splitting_threshold_note(params: &SplitParams, n0: u64) -> Result<u128, ScheduleError> {
    if n0 == 0 {
        return Err(ScheduleError::BadCount);
    }
    Ok(u128::from(params.b) * u128::from(n0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn rate(num: i64, den: i64) -> Rate {
        Rate::new(num, den)
    }

    #[test]
    fn derive_params_examples() {
        let p = derive_params(rate(1, 1), 2).unwrap();
        assert_eq!(p.sigma, rate(1, 2));
        assert_eq!(p.sigma_prime, rate(1, 4));
        assert_eq!(p.b, 2);

        let p = derive_params(rate(1, 2), 2).unwrap();
        assert_eq!(p.sigma, rate(1, 4));
        assert_eq!(p.sigma_prime, rate(1, 8));
        assert_eq!(p.b, 6);

        assert!(matches!(
            derive_params(rate(2, 1), 1),
            Err(ScheduleError::TauOutOfRange(_))
        ));
        assert!(matches!(
            derive_params(rate(0, 1), 1),
            Err(ScheduleError::TauOutOfRange(_))
        ));
        assert!(matches!(
            derive_params(rate(1, 1), 0),
            Err(ScheduleError::BadFirstCut)
        ));
    }

    #[test]
    fn derive_params_non_dyadic_tau() {
        // tau = 1/3: b = ceil((1 - 1/6) / (1/12)) = ceil(10) = 10
        let p = derive_params(rate(1, 3), 1).unwrap();
        assert_eq!(p.b, 10);
        // tau = 2/3: b = ceil((2/3) / (1/6)) = 4
        let p = derive_params(rate(2, 3), 1).unwrap();
        assert_eq!(p.b, 4);
    }

    #[test]
    fn cut_points_example() {
        let p = derive_params(rate(1, 1), 2).unwrap();
        let s = cut_points(&p, 4).unwrap();
        let t: Vec<u64> = s.t.iter().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(t, [0, 2, 4, 12, 36]);
        let n: Vec<u64> = s.n.iter().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(n, [2, 2, 8, 24]);
        assert_eq!(s.m, [1, 4, 9, 16]);
        // closed form check: t_4 = a*b*(1+b)^2 = 36
        assert_eq!(closed_form_t(&p, 4).unwrap().to_u64().unwrap(), 36);
    }

    #[test]
    fn closed_forms_match_recursion() {
        for (tau, a) in [(rate(1, 1), 2u64), (rate(1, 2), 3), (rate(1, 4), 1)] {
            let p = derive_params(tau, a).unwrap();
            let s = cut_points(&p, 25).unwrap();
            for i in 2..=25 {
                assert_eq!(s.t[i], closed_form_t(&p, i).unwrap(), "t_{i}");
            }
            for i in 3..=25 {
                assert_eq!(s.n[i - 1], closed_form_n(&p, i).unwrap(), "n_{i}");
            }
            // partial sums: sum_{j<=i} n_j = t_i
            let mut acc = BigUint::zero();
            for i in 1..=25 {
                acc += &s.n[i - 1];
                assert_eq!(acc, s.t[i]);
            }
        }
    }

    #[test]
    fn output_length_examples() {
        assert_eq!(output_length(1).unwrap(), 1);
        assert_eq!(output_length(3).unwrap(), 9);
        assert_eq!(output_length(10).unwrap(), 100);
        assert!(output_length(0).is_err());
    }

    #[test]
    fn threshold_note_examples() {
        // sigma = 1/2, sigma' = 1/4 corresponds to tau = 1: b = 2
        let p = derive_params(rate(1, 1), 2).unwrap();
        assert_eq!(splitting_threshold_note(&p, 10).unwrap(), 20);
        // sigma = 1/4, sigma' = 1/8 corresponds to tau = 1/2: b = 6
        let p = derive_params(rate(1, 2), 2).unwrap();
        assert_eq!(splitting_threshold_note(&p, 4).unwrap(), 24);
        assert!(splitting_threshold_note(&p, 0).is_err());
    }

    #[test]
    fn output_ratio_decays() {
        // m_i / (m_1 + ... + m_{i-1}) is decreasing from i = 3 on and first
        // drops below 1/4 at i = 14 (exactly 196/819); the limit is 0.
        let mut sum: u64 = 1; // m_1
        let mut prev = Ratio::<u64>::new(4, 1); // i = 2: 4/1
        let mut first_below = None;
        for i in 2..=40u64 {
            let mi = i * i;
            let r = Ratio::new(mi, sum);
            if i >= 4 {
                assert!(r < prev, "ratio must decrease at i={i}");
            }
            if first_below.is_none() && r < Ratio::new(1, 4) {
                first_below = Some(i);
            }
            prev = r;
            sum += mi;
        }
        assert_eq!(first_below, Some(14));
    }
}
