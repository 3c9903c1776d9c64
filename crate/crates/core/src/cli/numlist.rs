//! Numbers as they appear on the command line: decimals, exponents and
//! simple fractions such as `1/128`.

use crate::error::{Error, Result};

pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num = parse_plain(num)?;
            let den = parse_plain(den)?;
            if den == 0.0 {
                return Err(Error::invalid(format!("zero denominator in {s:?}")));
            }
            num / den
        }
        None => parse_plain(s)?,
    };
    if !value.is_finite() {
        return Err(Error::invalid(format!("{s:?} is not a finite number")));
    }
    Ok(value)
}

fn parse_plain(s: &str) -> Result<f64> {
    let s = s.trim();
    // Rust's parser also takes "inf", "nan" and "infinity"; numbers here are finite.
    let numeric = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    if !numeric {
        return Err(Error::invalid(format!("{s:?} is not a number")));
    }
    s.parse::<f64>().map_err(|_| Error::invalid(format!("{s:?} is not a number")))
}

/// Comma-separated numbers; empty items are rejected.
pub fn parse_number_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Err(Error::invalid("empty number list"));
    }
    s.split(',').map(parse_number).collect()
}

/// clap adapter.
pub fn number_arg(s: &str) -> std::result::Result<f64, String> {
    parse_number(s).map_err(|e| e.to_string())
}

/// A parsed list kept as one clap value.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberList(pub Vec<f64>);

pub fn number_list_arg(s: &str) -> std::result::Result<NumberList, String> {
    parse_number_list(s).map(NumberList).map_err(|e| e.to_string())
}
