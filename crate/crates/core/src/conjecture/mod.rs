//! Conjectured minimum stabilization heights `f_q(x, y, n)`.
//!
//! For `x >= 2` the height is a closed form in `n`, `x`, `y` and four
//! valuations of `q ± 1` and `q² ± 1`, selected by the residue class of `q`.
//! For `x` in `{0, 1}` only tabulated rows (and one piecewise rule for
//! `q ≡ 1, 9 mod 10`) are available.

pub mod tables;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modmath::{vp, Valuation};
use tables::{ceil_div, lookup_small_x, TableId};

/// Valuations of the base's neighbours that drive the formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Discriminants {
    /// `max(v2(q+1), v2(q-1))`
    pub delta2: Valuation,
    /// `max(v5(q+1), v5(q-1))`
    pub delta5: Valuation,
    /// Same expression as `delta2`.
    pub gamma2: Valuation,
    /// `max(v5(q²+1), v5(q²-1))`
    pub gamma5: Valuation,
}

fn max_valuation(a: u128, b: u128, p: u64) -> Valuation {
    // q >= 2 keeps both arguments positive
    vp(a, p).expect("positive").max(vp(b, p).expect("positive"))
}

fn check_base(q: u64) -> Result<()> {
    if q < 2 {
        return Err(Error::BaseTooSmall(q));
    }
    if q.is_multiple_of(10) {
        return Err(Error::ExcludedBase(q));
    }
    Ok(())
}

pub fn discriminants(q: u64) -> Result<Discriminants> {
    check_base(q)?;
    let q = u128::from(q);
    let q2 = q * q;
    let delta2 = max_valuation(q + 1, q - 1, 2);
    Ok(Discriminants {
        delta2,
        delta5: max_valuation(q + 1, q - 1, 5),
        gamma2: delta2,
        gamma5: max_valuation(q2 + 1, q2 - 1, 5),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseTag {
    /// `q ≡ 1, 9 (mod 10)`
    #[serde(rename = "MOD10_19")]
    Mod10_19,
    /// `q ≡ 3, 7 (mod 10)`
    #[serde(rename = "MOD10_37")]
    Mod10_37,
    /// `q ≡ 5 (mod 10)`
    #[serde(rename = "MOD10_5")]
    Mod10_5,
    Even,
}

impl CaseTag {
    pub fn of(q: u64) -> Self {
        if q.is_multiple_of(2) {
            Self::Even
        } else {
            match q % 10 {
                5 => Self::Mod10_5,
                1 | 9 => Self::Mod10_19,
                _ => Self::Mod10_37,
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mod10_19 => "MOD10_19",
            Self::Mod10_37 => "MOD10_37",
            Self::Mod10_5 => "MOD10_5",
            Self::Even => "EVEN",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reading of the `q ≡ 5 (mod 10)` formula.
///
/// The formula text divides by `x + Δ2`; the worked example for `q = 255`
/// divides by `y + Δ2` instead. Other cases ignore the variant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "AS_WRITTEN")]
    AsWritten,
    #[default]
    #[serde(rename = "EXAMPLE_CONSISTENT")]
    ExampleConsistent,
}

impl Variant {
    pub const BOTH: [Variant; 2] = [Self::AsWritten, Self::ExampleConsistent];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::AsWritten => "AS_WRITTEN",
            Self::ExampleConsistent => "EXAMPLE_CONSISTENT",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "as-written" => Ok(Self::AsWritten),
            "example" | "example-consistent" => Ok(Self::ExampleConsistent),
            other => Err(format!("unknown variant {other:?}; expected as-written or example")),
        }
    }
}

/// Where a predicted height came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "table")]
pub enum PredictionSource {
    /// Closed form for `x >= 2`.
    Formula,
    /// Piecewise rule for `q ≡ 1, 9 (mod 10)` at `x = y = 0`.
    SmallXFormula,
    Table(TableId),
    /// No formula or row covers the input.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Prediction {
    /// Predicted minimum height, clamped at 0. Meaningless when `!applicable`.
    pub u: u64,
    pub case_tag: CaseTag,
    pub variant: Variant,
    pub applicable: bool,
    /// The unclamped expression was negative.
    pub clamped: bool,
    /// Value fixed by convention rather than read off a formula (`q = 1`).
    pub convention: bool,
    pub source: PredictionSource,
}

impl Prediction {
    pub fn value(&self) -> Option<u64> {
        self.applicable.then_some(self.u)
    }

    fn from_raw(raw: i64, case_tag: CaseTag, variant: Variant, source: PredictionSource) -> Self {
        Self { u: raw.max(0) as u64, case_tag, variant, applicable: true, clamped: raw < 0, convention: false, source }
    }

    fn not_applicable(case_tag: CaseTag, variant: Variant) -> Self {
        Self {
            u: 0,
            case_tag,
            variant,
            applicable: false,
            clamped: false,
            convention: false,
            source: PredictionSource::None,
        }
    }
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::DigitsOutOfRange { n, cap: crate::config::max_digits() });
    }
    Ok(())
}

fn ceil_ratio(n: u32, denom: u64) -> i64 {
    ceil_div(i64::from(n), denom as i64)
}

/// Conjectured `f_q(x, y, n)` for `x >= 2`.
pub fn predict(q: u64, x: u32, y: u32, n: u32, variant: Variant) -> Result<Prediction> {
    check_base(q)?;
    if x < 2 {
        return Err(Error::SmallExponentRequiresTable(x));
    }
    check_n(n)?;
    let d = discriminants(q)?;
    let (x, y) = (u64::from(x), u64::from(y));
    let case_tag = CaseTag::of(q);
    let raw = match case_tag {
        CaseTag::Even => ceil_ratio(n, y + u64::from(d.gamma5.value())) - 1,
        CaseTag::Mod10_5 => {
            let s = match variant {
                Variant::AsWritten => x,
                Variant::ExampleConsistent => y,
            };
            ceil_ratio(n, s + u64::from(d.delta2.value())) - 1
        }
        CaseTag::Mod10_19 => {
            let two = ceil_ratio(n, x + u64::from(d.delta2.value()));
            let five = ceil_ratio(n, y + u64::from(d.delta5.value()));
            two.max(five) - 1
        }
        CaseTag::Mod10_37 => {
            let two = ceil_ratio(n, x + u64::from(d.gamma2.value()));
            let five = ceil_ratio(n, y + u64::from(d.gamma5.value()));
            two.max(five) - 1
        }
    };
    Ok(Prediction::from_raw(raw, case_tag, variant, PredictionSource::Formula))
}

/// Tabulated `f_q(x, 0, n)` for `x` in `{0, 1}`.
///
/// Rows from tables 1–5 take precedence. Untabulated `q ≡ 1, 9 (mod 10)` at
/// `x = 0` fall back to the piecewise rule; everything else is reported as
/// not applicable.
pub fn predict_small_x(q: u64, x: u32, n: u32) -> Result<Prediction> {
    if x > 1 {
        return Err(Error::NotSmallExponent(x));
    }
    check_n(n)?;
    let variant = Variant::default();
    if q == 1 {
        // towers of 1 never change; the table leaves this row blank
        return Ok(Prediction {
            convention: true,
            ..Prediction::from_raw(1, CaseTag::Mod10_19, variant, PredictionSource::Table(TableId::T1))
        });
    }
    check_base(q)?;
    let case_tag = CaseTag::of(q);
    if let Some((id, row)) = lookup_small_x(q) {
        let form = row.column(x).expect("small-x columns are always present");
        return Ok(match form.eval(n, x) {
            Some(raw) => Prediction::from_raw(raw, case_tag, variant, PredictionSource::Table(id)),
            None => Prediction::not_applicable(case_tag, variant),
        });
    }
    if case_tag == CaseTag::Mod10_19 && x == 0 {
        let d = discriminants(q)?;
        let (d2, d5) = (i64::from(d.delta2.value()), i64::from(d.delta5.value()));
        let n = i64::from(n);
        let raw = if q % 200 == 51 { (n / d2).max(n / d5) } else { ceil_div(n, d2).max(ceil_div(n, d5)) - 1 };
        return Ok(Prediction::from_raw(raw, case_tag, variant, PredictionSource::SmallXFormula));
    }
    Ok(Prediction::not_applicable(case_tag, variant))
}
