//! Twirling of the mixed depolarizing/collective-coherent channel and the
//! logical-gain model built on it.

use core::fmt;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalysisError {
    Lambda(f64),
    Probability(f64),
    Theta(f64),
    /// The gain model needs a positive ratio.
    Ratio(f64),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lambda(l) => write!(f, "lambda = {l} is outside [0, 1]"),
            Self::Probability(p) => write!(f, "p = {p} is outside [0, 1]"),
            Self::Theta(t) => write!(f, "theta = {t} is not finite"),
            Self::Ratio(r) => write!(f, "ratio R = {r} must be positive"),
        }
    }
}

impl core::error::Error for AnalysisError {}

/// Pauli channel `q0 ρ + q1 XρX + q2 YρY + q3 ZρZ` and the advantage ratio
/// `R = q3 / p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwirlResult {
    pub q: [f64; 4],
    /// `f64::INFINITY` when `p = 0`.
    pub r: f64,
}

fn check(lambda: f64, p: f64, theta: f64) -> Result<(), AnalysisError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(AnalysisError::Lambda(lambda));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(AnalysisError::Probability(p));
    }
    if !theta.is_finite() {
        return Err(AnalysisError::Theta(theta));
    }
    Ok(())
}

/// Closed-form twirl of `(1−λ) U·U† + λ D_p` with `U = exp(iθZ)`.
///
/// `q0` is fixed by normalization: it equals `λ(1−p) + (1−λ)cos²θ`.
pub fn twirl_mixture(lambda: f64, p: f64, theta: f64) -> Result<TwirlResult, AnalysisError> {
    check(lambda, p, theta)?;
    let s2 = libm::sin(theta) * libm::sin(theta);
    let q1 = lambda * p / 3.0;
    let q3 = lambda * p / 3.0 + (1.0 - lambda) * s2;
    let q0 = 1.0 - 2.0 * q1 - q3;
    let r = if p == 0.0 { f64::INFINITY } else { q3 / p };
    Ok(TwirlResult { q: [q0, q1, q1, q3], r })
}

/// Factor `R^(t+1)` by which a code correcting `t` errors gains when it sees
/// `p` instead of `q3`.
pub fn logical_gain(r: f64, t: u32) -> Result<f64, AnalysisError> {
    if !(r > 0.0) {
        return Err(AnalysisError::Ratio(r));
    }
    Ok(libm::pow(r, f64::from(t + 1)))
}

/// `A (rate / p_th)^(t+1)` with caller-supplied `A` and `p_th`.
pub fn logical_rate_model(a: f64, rate: f64, p_th: f64, t: u32) -> f64 {
    a * libm::pow(rate / p_th, f64::from(t + 1))
}

type M2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli(i: usize) -> M2 {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match i {
        0 => [[one, o], [o, one]],
        1 => [[o, one], [one, o]],
        2 => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
        _ => [[one, o], [o, -one]],
    }
}

fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn dagger(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn add_scaled(acc: &mut M2, a: &M2, s: f64) {
    for i in 0..2 {
        for j in 0..2 {
            acc[i][j] += a[i][j] * s;
        }
    }
}

fn trace(a: &M2) -> Complex64 {
    a[0][0] + a[1][1]
}

/// The untwirled single-qubit channel applied to an arbitrary operator.
fn mixed_channel(lambda: f64, p: f64, theta: f64, rho: &M2) -> M2 {
    let u: M2 = [[c(libm::cos(theta), libm::sin(theta)), c(0.0, 0.0)], [c(0.0, 0.0), c(libm::cos(theta), -libm::sin(theta))]];
    let mut out = [[c(0.0, 0.0); 2]; 2];
    add_scaled(&mut out, &mul(&mul(&u, rho), &dagger(&u)), 1.0 - lambda);
    add_scaled(&mut out, rho, lambda * (1.0 - p));
    for k in 1..4 {
        let s = pauli(k);
        add_scaled(&mut out, &mul(&mul(&s, rho), &s), lambda * p / 3.0);
    }
    out
}

/// Pauli probabilities of the twirled channel, computed by averaging
/// `P·M(P ρ P)·P` over the Pauli group and inverting the transfer-matrix
/// diagonal.
pub fn numerical_twirl(lambda: f64, p: f64, theta: f64) -> Result<[f64; 4], AnalysisError> {
    check(lambda, p, theta)?;
    let twirled = |rho: &M2| {
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for k in 0..4 {
            let s = pauli(k);
            let inner = mixed_channel(lambda, p, theta, &mul(&mul(&s, rho), &s));
            add_scaled(&mut out, &mul(&mul(&s, &inner), &s), 0.25);
        }
        out
    };
    let mut f = [0.0; 4];
    for (k, fk) in f.iter_mut().enumerate() {
        let s = pauli(k);
        *fk = trace(&mul(&s, &twirled(&s))).re / 2.0;
    }
    let mut q = [0.0; 4];
    for (a, qa) in q.iter_mut().enumerate() {
        for (k, fk) in f.iter().enumerate() {
            let commute = a == 0 || k == 0 || a == k;
            *qa += if commute { *fk } else { -*fk } / 4.0;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    use proptest::prelude::*;

    fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn examples() {
        let p = 0.013;
        let t = twirl_mixture(1.0, p, 0.9).unwrap();
        assert!(close(t.q, [1.0 - p, p / 3.0, p / 3.0, p / 3.0], 1e-15));
        let t = twirl_mixture(0.0, 0.2, FRAC_PI_4).unwrap();
        assert!(close(t.q, [0.5, 0.0, 0.0, 0.5], 1e-15));
        let t = twirl_mixture(0.5, 1e-3, 0.1).unwrap();
        let q3 = 0.5e-3 / 3.0 + 0.5 * libm::sin(0.1) * libm::sin(0.1);
        assert!((t.q[3] - q3).abs() < 1e-15);
        assert!((t.q[3] - 5.15e-3).abs() < 1e-5 && (t.r - 5.15).abs() < 1e-2);
        assert!(twirl_mixture(0.3, 0.0, 0.2).unwrap().r.is_infinite());
    }

    #[test]
    fn printed_q0_does_not_normalize() {
        let (l, p, th) = (0.4, 0.01, 0.3);
        let printed = (1.0 - l) * (1.0 - libm::sin(th) * libm::sin(th));
        let t = twirl_mixture(l, p, th).unwrap();
        assert!((t.q[0] - printed - l * (1.0 - p)).abs() < 1e-15);
    }

    #[test]
    fn gain_examples() {
        assert_eq!(logical_gain(1.0, 4).unwrap(), 1.0);
        assert_eq!(logical_gain(2.0, 3).unwrap(), 16.0);
        let r = twirl_mixture(0.5, 1e-3, 0.1).unwrap().r;
        assert!((logical_gain(r, 1).unwrap() - r * r).abs() < 1e-12);
        assert!((logical_gain(5.15, 1).unwrap() - 26.52).abs() < 0.01);
        assert!(logical_gain(0.0, 1).is_err());
    }

    #[test]
    fn rejects_out_of_range() {
        assert_eq!(twirl_mixture(1.5, 0.1, 0.0), Err(AnalysisError::Lambda(1.5)));
        assert_eq!(twirl_mixture(0.5, -0.1, 0.0), Err(AnalysisError::Probability(-0.1)));
        assert!(twirl_mixture(0.5, 0.1, f64::NAN).is_err());
    }

    #[test]
    fn numerical_twirl_grid() {
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    let (l, p, th) = (i as f64 / 9.0, j as f64 / 9.0, k as f64 * FRAC_PI_2 / 9.0);
                    let exact = twirl_mixture(l, p, th).unwrap().q;
                    let num = numerical_twirl(l, p, th).unwrap();
                    assert!(close(exact, num, 1e-10), "{l} {p} {th}: {exact:?} vs {num:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn q_is_a_distribution(l in 0.0..=1.0f64, p in 0.0..=1.0f64, th in -10.0..10.0f64) {
            let t = twirl_mixture(l, p, th).unwrap();
            prop_assert!((t.q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(t.q.iter().all(|&x| x >= -1e-15));
        }

        #[test]
        fn ratio_increases_with_theta(l in 0.0..0.99f64, p in 1e-6..1.0f64, a in 0.0..FRAC_PI_2, b in 0.0..FRAC_PI_2) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-9);
            let r_lo = twirl_mixture(l, p, lo).unwrap().r;
            let r_hi = twirl_mixture(l, p, hi).unwrap().r;
            prop_assert!(r_hi > r_lo);
        }
    }
}
