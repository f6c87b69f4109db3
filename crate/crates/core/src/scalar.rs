//! Scalar types the algebra is generic over.
//!
//! Coefficients live in any [`Scalar`]: the real and complex floating point
//! types for numerics, and [`Rational64`] / `Complex<Rational64>` when an
//! identity has to be checked exactly. Norms and spectra are always computed
//! after conversion to [`Complex64`].

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::{Complex, Complex32, Complex64};
use num_rational::{Ratio, Rational64};
use num_traits::{Num, ToPrimitive};

/// Field of coefficients for group-algebra elements and Toeplitz symbols.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialEq + Debug + Send + Sync + 'static
{
    /// Complex conjugate (identity on real scalars).
    fn conj(&self) -> Self;

    /// Exact embedding of a rational number.
    fn from_ratio(r: Ratio<i64>) -> Self;

    fn to_c64(&self) -> Complex64;

    /// Parse from the textual `re im` pair. Real scalars reject a nonzero imaginary part.
    fn parse_parts(re: &str, im: &str) -> Option<Self>;

    /// Textual `re im` pair, the inverse of [`Scalar::parse_parts`].
    fn format_parts(&self) -> (String, String);

    fn from_u64(n: u64) -> Self {
        Self::from_ratio(Ratio::from_integer(n as i64))
    }
}

fn parse_ratio(s: &str) -> Option<Rational64> {
    if let Ok(r) = s.parse::<Rational64>() {
        return Some(r);
    }
    s.parse::<i64>().ok().map(Ratio::from_integer)
}

fn ratio_to_f64(r: &Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn is_zero_text(s: &str) -> bool {
    s.parse::<f64>().map(|v| v == 0.0).unwrap_or(false)
}

macro_rules! real_float {
    ($t:ty) => {
        impl Scalar for $t {
            fn conj(&self) -> Self {
                *self
            }
            fn from_ratio(r: Ratio<i64>) -> Self {
                (*r.numer() as f64 / *r.denom() as f64) as $t
            }
            fn to_c64(&self) -> Complex64 {
                Complex64::new(*self as f64, 0.0)
            }
            fn parse_parts(re: &str, im: &str) -> Option<Self> {
                if !is_zero_text(im) {
                    return None;
                }
                re.parse::<$t>().ok()
            }
            fn format_parts(&self) -> (String, String) {
                (format!("{:?}", *self + 0.0), "0".to_string())
            }
        }
    };
}

macro_rules! complex_float {
    ($t:ty, $c:ty) => {
        impl Scalar for $c {
            fn conj(&self) -> Self {
                Complex::conj(self)
            }
            fn from_ratio(r: Ratio<i64>) -> Self {
                <$c>::new(<$t as Scalar>::from_ratio(r), 0.0)
            }
            fn to_c64(&self) -> Complex64 {
                Complex64::new(self.re as f64, self.im as f64)
            }
            fn parse_parts(re: &str, im: &str) -> Option<Self> {
                Some(<$c>::new(re.parse().ok()?, im.parse().ok()?))
            }
            fn format_parts(&self) -> (String, String) {
                (format!("{:?}", self.re + 0.0), format!("{:?}", self.im + 0.0))
            }
        }
    };
}

real_float!(f32);
real_float!(f64);
complex_float!(f32, Complex32);
complex_float!(f64, Complex64);

impl Scalar for Rational64 {
    fn conj(&self) -> Self {
        *self
    }
    fn from_ratio(r: Ratio<i64>) -> Self {
        r
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(self), 0.0)
    }
    fn parse_parts(re: &str, im: &str) -> Option<Self> {
        if parse_ratio(im)? != Ratio::from_integer(0) {
            return None;
        }
        parse_ratio(re)
    }
    fn format_parts(&self) -> (String, String) {
        (self.to_string(), "0".to_string())
    }
}

impl Scalar for Complex<Rational64> {
    fn conj(&self) -> Self {
        Complex::new(self.re, -self.im)
    }
    fn from_ratio(r: Ratio<i64>) -> Self {
        Complex::new(r, Ratio::from_integer(0))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
    fn parse_parts(re: &str, im: &str) -> Option<Self> {
        Some(Complex::new(parse_ratio(re)?, parse_ratio(im)?))
    }
    fn format_parts(&self) -> (String, String) {
        (self.re.to_string(), self.im.to_string())
    }
}

/// Floating point with `digits` significant digits, `%g` style.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let exp = x.abs().log10().floor() as i32;
    // rounding may bump the exponent, so re-derive it from scientific formatting
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, e) = sci.split_once('e').unwrap();
    let exp_after: i32 = e.parse().unwrap_or(exp);
    if exp_after < -5 || exp_after >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp_after < 0 { '-' } else { '+' }, exp_after.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp_after).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
