//! Exact scalar arithmetic shared by every module.

use std::fmt;

use num::{BigInt, BigRational, Complex, One, Signed, Zero};
use thiserror::Error;

pub type Rat = BigRational;

/// Gaussian rational `re + i·im`.
pub type GaussRat = Complex<BigRational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"`, `"p/q"` or `"-p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| ParseRatError::Malformed(s.to_string()))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| ParseRatError::Malformed(s.to_string()))?;
    if d.is_zero() {
        return Err(ParseRatError::ZeroDenominator(s.to_string()));
    }
    Ok(Rat::new(n, d))
}

/// Formats as `p` or `p/q` in lowest terms.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn gauss(re: Rat, im: Rat) -> GaussRat {
    Complex::new(re, im)
}

pub fn gauss_int(n: i64) -> GaussRat {
    Complex::new(rat(n), Rat::zero())
}

pub fn gauss_rat(r: Rat) -> GaussRat {
    Complex::new(r, Rat::zero())
}

pub fn fmt_gauss(z: &GaussRat) -> String {
    match (z.re.is_zero(), z.im.is_zero()) {
        (_, true) => fmt_rat(&z.re),
        (true, false) => format!("{}i", fmt_rat(&z.im)),
        (false, false) => {
            let sign = if z.im.is_negative() { "-" } else { "+" };
            format!("{}{}{}i", fmt_rat(&z.re), sign, fmt_rat(&z.im.abs()))
        }
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
pub fn falling(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

/// Coefficient ring used by jet series and operator series.
///
/// Implemented for plain Gaussian rationals (numeric potentials) and for
/// polynomials in the jet variables (symbolic potentials).
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, s: &GaussRat) -> Self;
    fn conj(&self) -> Self;
    fn from_gauss(s: GaussRat) -> Self;

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn sub_assign(&mut self, other: &Self) {
        self.add_assign(&other.neg());
    }

    fn from_rat(r: Rat) -> Self {
        Self::from_gauss(gauss_rat(r))
    }

    fn from_int(n: i64) -> Self {
        Self::from_gauss(gauss_int(n))
    }
}

impl Coeff for GaussRat {
    fn zero() -> Self {
        Complex::new(Rat::zero(), Rat::zero())
    }
    fn one() -> Self {
        Complex::new(Rat::one(), Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add_assign(&mut self, other: &Self) {
        self.re += &other.re;
        self.im += &other.im;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn scale(&self, s: &GaussRat) -> Self {
        self * s
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn from_gauss(s: GaussRat) -> Self {
        s
    }
}
