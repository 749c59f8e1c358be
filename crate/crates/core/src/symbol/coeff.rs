use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};

/// Coefficient ring for [`Poly`](super::Poly).
///
/// Only the operations the symbol calculus needs: ring arithmetic, the
/// rationals, the imaginary unit and conjugation.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn imag_unit() -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;
}

impl Coeff for Complex64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::i()
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

type Q = Ratio<i128>;

/// Gaussian rational `re + i·im`, exact. Used for fixtures with rational data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: Q,
    pub im: Q,
}

impl ExactComplex {
    pub fn new(re: Q, im: Q) -> Self {
        ExactComplex { re, im }
    }

    pub fn real(num: i64, den: i64) -> Self {
        Self::from_ratio(num, den)
    }
}

impl Zero for ExactComplex {
    fn zero() -> Self {
        ExactComplex::new(Q::zero(), Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for ExactComplex {
    fn one() -> Self {
        ExactComplex::new(Q::one(), Q::zero())
    }
}

impl Add for ExactComplex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        ExactComplex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for ExactComplex {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        ExactComplex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for ExactComplex {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        ExactComplex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Neg for ExactComplex {
    type Output = Self;
    fn neg(self) -> Self {
        ExactComplex::new(-self.re, -self.im)
    }
}

impl Coeff for ExactComplex {
    fn from_ratio(num: i64, den: i64) -> Self {
        ExactComplex::new(Q::new(num as i128, den as i128), Q::zero())
    }
    fn imag_unit() -> Self {
        ExactComplex::new(Q::zero(), Q::one())
    }
    fn conj(&self) -> Self {
        ExactComplex::new(self.re, -self.im)
    }
    fn to_c64(&self) -> Complex64 {
        let f = |q: &Q| *q.numer() as f64 / *q.denom() as f64;
        Complex64::new(f(&self.re), f(&self.im))
    }
}
