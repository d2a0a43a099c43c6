//! Small helpers around [`Rational64`](num_rational::Rational64).

use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result, Q};

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Parses `"3"`, `"-3/2"`, `" 1/2 "`.
pub fn parse_q(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad rational `{text}`"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => t.parse::<i64>().map(Q::from_integer).map_err(|_| bad()),
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_int(x: &Q) -> bool {
    x.is_integer()
}

/// Integer value of `x` if it is one.
pub fn as_int(x: &Q) -> Option<i64> {
    x.is_integer().then(|| x.to_integer())
}

pub fn in_open_strip(x: &Q) -> bool {
    *x > Q::zero() && *x < q(1)
}

pub fn half() -> Q {
    frac(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("-3/2").unwrap(), frac(-3, 2));
        assert_eq!(parse_q(" 4 ").unwrap(), q(4));
        assert_eq!(parse_q("2/4").unwrap(), half());
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(fmt_q(&frac(-3, 2)), "-3/2");
        assert_eq!(fmt_q(&q(-2)), "-2");
    }

    #[test]
    fn strip_membership() {
        assert!(in_open_strip(&half()));
        assert!(!in_open_strip(&q(0)));
        assert!(!in_open_strip(&q(1)));
    }
}
