//! Rational functions of one complex variable.

use num_complex::Complex64;

/// `num(z) / den(z)` with coefficients in ascending powers of `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

impl Rational {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Self {
        assert!(den.iter().any(|c| c.norm() > 0.0), "zero denominator");
        Rational { num, den }
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Rational::new(coeffs, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn constant(c: f64) -> Self {
        Rational::polynomial(vec![Complex64::new(c, 0.0)])
    }

    /// `coeff * z^k` for any integer `k`.
    pub fn monomial(coeff: f64, k: i32) -> Self {
        let mut powered = vec![Complex64::new(0.0, 0.0); k.unsigned_abs() as usize];
        let one = Complex64::new(1.0, 0.0);
        if k >= 0 {
            powered.push(Complex64::new(coeff, 0.0));
            Rational::new(powered, vec![one])
        } else {
            powered.push(one);
            Rational::new(vec![Complex64::new(coeff, 0.0)], powered)
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.num, z) / horner(&self.den, z)
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.norm() == 0.0)
    }
}
