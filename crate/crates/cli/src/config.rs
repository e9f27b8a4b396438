//! Flat `key = value` configuration.
//!
//! One entry per line, `#` starts a comment. Exactly one input mode must be
//! present:
//!
//! ```text
//! # economic parameters
//! R = 10
//! r = 2
//! I = 5
//! iota = 1
//! L = 2
//! G = 3
//! P = 8
//! ```
//!
//! or matrices (`A = 9 11 ; 11 3`, `B = 7 5 ; 0 15`, rows separated by `;`),
//! or reduced constants (`a`, `b`, `c`, `d`). Run settings (`convention`,
//! `method`, `dt`, `t_end`, `x0`, `y0`) may appear alongside.
//!
//! Numbers are read exactly as rationals: decimals (`0.4`, `1e-3`) or
//! fractions (`1/3`).

use std::collections::BTreeMap;

use num::{BigInt, One, Signed, Zero};
use oa_replicator::{BimatrixGame, OpenAccessParameters, Rational};

use crate::CliError;

pub const PARAMETER_KEYS: [&str; 7] = ["R", "r", "I", "iota", "L", "G", "P"];
pub const MATRIX_KEYS: [&str; 2] = ["A", "B"];
pub const CONSTANT_KEYS: [&str; 4] = ["a", "b", "c", "d"];
pub const SETTING_KEYS: [&str; 6] = ["convention", "method", "dt", "t_end", "x0", "y0"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlatConfig {
    entries: BTreeMap<String, String>,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut config = FlatConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Malformed(format!("line {}: expected `key = value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(CliError::Malformed(format!("line {}: empty key or value", i + 1)));
            }
            if config.entries.contains_key(key) {
                return Err(CliError::Malformed(format!("line {}: duplicate key `{key}`", i + 1)));
            }
            config.entries.insert(key.to_string(), value.to_string());
        }
        Ok(config)
    }

    /// Applies a `KEY=VALUE` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Malformed(format!("--set expects KEY=VALUE, got `{assignment}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Malformed(format!("--set expects KEY=VALUE, got `{assignment}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn number(&self, key: &str) -> Result<Option<Rational>, CliError> {
        self.get(key)
            .map(|v| parse_rational(v).map_err(|e| CliError::Malformed(format!("`{key}`: {e}"))))
            .transpose()
    }

    fn check_known_keys(&self) -> Result<(), CliError> {
        let known = PARAMETER_KEYS
            .iter()
            .chain(&MATRIX_KEYS)
            .chain(&CONSTANT_KEYS)
            .chain(&SETTING_KEYS);
        for key in self.entries.keys() {
            if !known.clone().any(|k| k == key) {
                return Err(CliError::Malformed(format!("unknown key `{key}`")));
            }
        }
        Ok(())
    }

    pub fn input(&self) -> Result<Input, CliError> {
        self.check_known_keys()?;
        let present = |keys: &[&str]| keys.iter().any(|k| self.entries.contains_key(*k));
        let modes = [
            present(&PARAMETER_KEYS),
            present(&MATRIX_KEYS),
            present(&CONSTANT_KEYS),
        ];
        match modes {
            [true, false, false] => {
                let values = self.require_all(&PARAMETER_KEYS)?;
                let values: [Rational; 7] = values.try_into().expect("seven keys");
                Ok(Input::Parameters(OpenAccessParameters::from_array(values)))
            }
            [false, true, false] => {
                let scientist = parse_matrix(self.require("A")?)
                    .map_err(|e| CliError::Malformed(format!("`A`: {e}")))?;
                let publisher = parse_matrix(self.require("B")?)
                    .map_err(|e| CliError::Malformed(format!("`B`: {e}")))?;
                Ok(Input::Matrices(BimatrixGame::new(scientist, publisher)))
            }
            [false, false, true] => {
                let values = self.require_all(&CONSTANT_KEYS)?;
                Ok(Input::Constants(values.try_into().expect("four keys")))
            }
            [false, false, false] => Err(CliError::Malformed(
                "no input: give parameters (R r I iota L G P), matrices (A B) or constants (a b c d)".into(),
            )),
            _ => Err(CliError::Malformed(
                "mixed input modes: give exactly one of parameters, matrices or constants".into(),
            )),
        }
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Malformed(format!("missing key `{key}`")))
    }

    fn require_all(&self, keys: &[&str]) -> Result<Vec<Rational>, CliError> {
        keys.iter()
            .map(|k| {
                self.require(k)?;
                Ok(self.number(k)?.expect("checked present"))
            })
            .collect()
    }
}

/// The one input mode a run was configured with, kept exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Parameters(OpenAccessParameters<Rational>),
    Matrices(BimatrixGame<Rational>),
    /// `[a, b, c, d]`, not yet checked for positivity.
    Constants([Rational; 4]),
}

/// Exact value of a decimal literal (`-1.25e3`) or fraction (`1/3`).
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_decimal(num.trim())?;
        let den = parse_decimal(den.trim())?;
        if den.is_zero() {
            return Err(format!("zero denominator in `{text}`"));
        }
        return Ok(num / den);
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Result<Rational, String> {
    let bad = || format!("`{text}` is not a finite decimal number");
    let (negative, body) = match text.as_bytes().first() {
        Some(b'-') => (true, &text[1..]),
        Some(b'+') => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = body[pos + 1..].parse().map_err(|_| bad())?;
            (&body[..pos], exp)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !all_digits(int_part) || !all_digits(frac_part) {
        return Err(bad());
    }
    if exponent.abs() > 400 {
        return Err(format!("exponent out of range in `{text}`"));
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let digits = digits / BigInt::from(10);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(digits * num::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num::pow(ten, (-scale) as usize))
    };
    Ok(if negative { -value } else { value })
}

/// `"9 11 ; 11 3"` → `[[9, 11], [11, 3]]`.
pub fn parse_matrix(text: &str) -> Result<[[Rational; 2]; 2], String> {
    let rows: Vec<&str> = text.split(';').collect();
    if rows.len() != 2 {
        return Err(format!("expected 2 rows separated by `;`, found {}", rows.len()));
    }
    let mut out: [[Rational; 2]; 2] = Default::default();
    for (slot, row) in out.iter_mut().zip(&rows) {
        let entries: Vec<&str> = row.split_whitespace().collect();
        if entries.len() != 2 {
            return Err(format!("expected 2 entries per row, found {} in `{}`", entries.len(), row.trim()));
        }
        for (cell, entry) in slot.iter_mut().zip(&entries) {
            *cell = parse_rational(entry)?;
        }
    }
    Ok(out)
}

/// Human-readable form of an exact value: integers and short decimals
/// print as such, everything else as `n/d`.
pub fn exact_string(v: &Rational) -> String {
    if v.denom().is_one() {
        return v.numer().to_string();
    }
    // Terminating decimals have denominators 2^i 5^j.
    let mut den = v.denom().abs();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut places = 0usize;
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den.is_one() {
        places = twos.max(fives);
    }
    if places == 0 || places > 30 {
        return format!("{}/{}", v.numer(), v.denom());
    }
    let scaled = v * Rational::from_integer(num::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let sign = if v.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{}", frac_part.trim_end_matches('0'))
}
