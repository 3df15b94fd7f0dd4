//! Correctly-rounded decimal rendering of exact rationals.

use rug::ops::Pow;
use rug::{Integer, Rational};

/// Rounding mode for [`render_decimal`]. `Down`/`Up` round toward -inf/+inf
/// (the directions interval endpoints need); `Nearest` breaks ties away from
/// zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundMode {
    Down,
    Nearest,
    Up,
}

/// Renders `x` with exactly `digits` fractional digits, correctly rounded in
/// the requested mode. The printed value differs from `x` by less than
/// `10^-digits` (at most half that in `Nearest` mode). All arithmetic is
/// integer-exact; no floating point is involved.
pub fn render_decimal(x: &Rational, digits: u32, mode: RoundMode) -> String {
    assert!(digits >= 1, "render_decimal needs at least one digit");
    let scale = Integer::from(10).pow(digits);
    let scaled_num = Integer::from(x.numer() * &scale);
    let den = x.denom();
    // Euclidean division: q = floor(scaled), 0 <= r < den.
    let (q, r) = scaled_num.div_rem_euc(den.clone());
    let rounded = match mode {
        RoundMode::Down => q,
        RoundMode::Up => {
            if r != 0 {
                q + 1
            } else {
                q
            }
        }
        RoundMode::Nearest => {
            let twice = Integer::from(2 * &r);
            match twice.cmp(den) {
                std::cmp::Ordering::Less => q,
                std::cmp::Ordering::Greater => q + 1,
                // Tie: away from zero. q is the floor, so a non-negative value
                // rounds up and a negative one keeps the floor.
                std::cmp::Ordering::Equal => {
                    if q >= 0 {
                        q + 1
                    } else {
                        q
                    }
                }
            }
        }
    };

    let negative = rounded < 0;
    let mut s = rounded.abs().to_string();
    let d = digits as usize;
    if s.len() <= d {
        s = format!("{}{}", "0".repeat(d - s.len() + 1), s);
    }
    let point = s.len() - d;
    format!(
        "{}{}.{}",
        if negative { "-" } else { "" },
        &s[..point],
        &s[point..]
    )
}
