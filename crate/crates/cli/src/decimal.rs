//! Fixed-point rendering of exact fractions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// `value` rounded half away from zero to `places` decimal places.
pub fn to_decimal(value: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = value.abs() * BigRational::from_integer(scale.clone());
    let rounded = (scaled + BigRational::new(1.into(), 2.into())).floor().to_integer();
    let sign = if value.is_negative() && !rounded.is_zero() { "-" } else { "" };
    let whole = &rounded / &scale;
    if places == 0 {
        return format!("{sign}{whole}");
    }
    let fraction = (&rounded % &scale).to_string();
    format!("{sign}{whole}.{fraction:0>places$}")
}
