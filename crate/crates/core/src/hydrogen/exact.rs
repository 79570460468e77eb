//! Exact rational arithmetic on functions of the form Σⱼ cⱼ rʲ e^{−βr}.
//!
//! Hydrogen radial functions are polynomials times a single exponential, so
//! every overlap, moment and gradient element between them reduces to sums of
//! j!/β^{j+1} with rational coefficients. Only the normalisation carries a
//! square root; it is kept squared until the final conversion to `f64`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ExpPoly {
    pub decay: BigRational,
    pub coeffs: Vec<BigRational>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl ExpPoly {
    /// Unnormalised radial polynomial x^l L_{n−l−1}^{(2l+1)}(x) e^{−x/2}, x = 2r/n.
    pub fn hydrogen_radial(n: u32, l: u32) -> Self {
        debug_assert!(n >= 1 && l < n);
        let m = u64::from(n - l - 1);
        let alpha = u64::from(2 * l + 1);
        let two_over_n = rat(2, i64::from(n));
        let mut coeffs = vec![BigRational::zero(); (m + 1 + u64::from(l)) as usize];
        let mut k_fact = BigInt::one();
        for k in 0..=m {
            if k > 0 {
                k_fact *= BigInt::from(k);
            }
            let mut c = BigRational::new(binomial(m + alpha, m - k), k_fact.clone());
            if k % 2 == 1 {
                c = -c;
            }
            let power = (k + u64::from(l)) as usize;
            coeffs[power] = c * num_traits::pow(two_over_n.clone(), power);
        }
        Self {
            decay: rat(1, i64::from(n)),
            coeffs,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self {
            decay: &self.decay + &other.decay,
            coeffs,
        }
    }

    /// Multiply by r^p.
    pub fn times_power(&self, p: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); p];
        coeffs.extend(self.coeffs.iter().cloned());
        Self {
            decay: self.decay.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self {
            decay: self.decay.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Sum of two functions with the same decay rate.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.decay, other.decay, "decay rates must match");
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                let b = other.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                a + b
            })
            .collect();
        Self {
            decay: self.decay.clone(),
            coeffs,
        }
    }

    pub fn derivative(&self) -> Self {
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len()];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[j] -= &self.decay * c;
            if j > 0 {
                coeffs[j - 1] += c * BigInt::from(j);
            }
        }
        Self {
            decay: self.decay.clone(),
            coeffs,
        }
    }

    /// ∫₀^∞ f(r) dr = Σⱼ cⱼ j!/β^{j+1}.
    pub fn integrate(&self) -> BigRational {
        let inv_beta = self.decay.recip();
        let mut factor = inv_beta.clone(); // j!/β^{j+1} at j = 0
        let mut acc = BigRational::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                factor = factor * BigInt::from(j) * &inv_beta;
            }
            if !c.is_zero() {
                acc += c * &factor;
            }
        }
        acc
    }
}

/// N_{nl}² for l ∈ {0, 1}: 4/n⁵ and 4/(n⁵(n²−1)).
pub(crate) fn norm_squared(n: u32, l: u32) -> BigRational {
    let n5 = BigInt::from(n).pow(5);
    match l {
        0 => BigRational::new(BigInt::from(4), n5),
        1 => {
            let n2m1 = BigInt::from(u64::from(n) * u64::from(n) - 1);
            BigRational::new(BigInt::from(4), n5 * n2m1)
        }
        _ => unreachable!("only s and p states are supported"),
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Rational to nearest-ish `f64` without intermediate overflow.
pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    let num = r.numer().abs();
    let den = r.denom().abs();
    let shift = 66 - (num.bits() as i64 - den.bits() as i64);
    let q = if shift >= 0 {
        (num << (shift as usize)).div_floor(&den)
    } else {
        num.div_floor(&(den << ((-shift) as usize)))
    };
    sign * ldexp(q.to_f64().unwrap_or(f64::NAN), -shift)
}

/// sign(s)·√(norm_sq·s²): a normalised integral from its rational parts.
pub(crate) fn normalized_value(norm_sq: &BigRational, s: &BigRational) -> f64 {
    if s.is_zero() {
        return 0.0;
    }
    let magnitude = ratio_to_f64(&(norm_sq * s * s)).sqrt();
    if s.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conversion() {
        assert_eq!(ratio_to_f64(&rat(1, 3)), 1.0 / 3.0);
        assert_eq!(ratio_to_f64(&rat(-7, 2)), -3.5);
        let huge = BigRational::new(BigInt::from(3u32).pow(1000), BigInt::from(2u32).pow(1500));
        let expect = (1000.0 * 3f64.ln() - 1500.0 * 2f64.ln()).exp();
        assert!((ratio_to_f64(&huge) / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_state_normalised() {
        // R10 = 2e^{-r}: ∫ 4 r² e^{-2r} dr = 1
        let r10 = ExpPoly::hydrogen_radial(1, 0);
        let s = r10.mul(&r10).times_power(2).integrate();
        assert_eq!(s * norm_squared(1, 0), BigRational::one());
    }

    #[test]
    fn all_low_states_exactly_normalised() {
        for n in 1..=12 {
            for l in 0..=1.min(n - 1) {
                let p = ExpPoly::hydrogen_radial(n, l);
                let s = p.mul(&p).times_power(2).integrate() * norm_squared(n, l);
                assert_eq!(s, BigRational::one(), "n={n} l={l}");
            }
        }
    }

    #[test]
    fn derivative_of_exponential() {
        let f = ExpPoly {
            decay: rat(1, 2),
            coeffs: vec![rat(0, 1), rat(1, 1)],
        };
        // d/dr (r e^{-r/2}) = (1 - r/2) e^{-r/2}
        let d = f.derivative();
        assert_eq!(d.coeffs, vec![rat(1, 1), rat(-1, 2)]);
    }
}
