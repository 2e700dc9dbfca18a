//! Tabulated stabilization heights for small `x` (with `y = 0`).
//!
//! Tables 1 to 5 cover `x` in `{0, 1}` for selected residue classes; table 7
//! lists the first sixty primes and adds a column for `x >= 2`. Rows are
//! stored verbatim, including entries the oracle later disagrees with.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A closed form in `n` (and, for one table-7 entry, in `x`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// `n + k`
    Linear(i64),
    /// `ceil(n / d) + k`
    Ceil(u32, i64),
    /// `floor(n / d) + k`
    Floor(u32, i64),
    /// `ceil(n / (x + d)) + k`
    CeilShifted(u32, i64),
    /// Left empty in the source table.
    Blank,
}

use ClosedForm::{Blank, Ceil, CeilShifted, Floor, Linear};

pub(crate) fn ceil_div(n: i64, d: i64) -> i64 {
    (n + d - 1).div_euclid(d)
}

impl ClosedForm {
    pub fn eval(&self, n: u32, x: u32) -> Option<i64> {
        let n = i64::from(n);
        match *self {
            Linear(k) => Some(n + k),
            Ceil(d, k) => Some(ceil_div(n, i64::from(d)) + k),
            Floor(d, k) => Some(n.div_euclid(i64::from(d)) + k),
            CeilShifted(d, k) => Some(ceil_div(n, i64::from(x) + i64::from(d)) + k),
            Blank => None,
        }
    }
}

fn offset(k: i64) -> String {
    match k {
        0 => String::new(),
        k if k > 0 => format!("+{k}"),
        k => k.to_string(),
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Linear(k) => write!(f, "n{}", offset(k)),
            Ceil(d, k) => write!(f, "ceil(n/{d}){}", offset(k)),
            Floor(d, k) => write!(f, "floor(n/{d}){}", offset(k)),
            CeilShifted(d, k) => write!(f, "ceil(n/(x+{d})){}", offset(k)),
            Blank => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T7,
}

impl TableId {
    pub const ALL: [TableId; 6] = [Self::T1, Self::T2, Self::T3, Self::T4, Self::T5, Self::T7];
    /// Tables consulted by the small-x lookup, in lookup order.
    pub const SMALL_X: [TableId; 5] = [Self::T1, Self::T2, Self::T3, Self::T4, Self::T5];

    pub fn rows(self) -> &'static [TableRow] {
        match self {
            Self::T1 => TABLE_1,
            Self::T2 => TABLE_2,
            Self::T3 => TABLE_3,
            Self::T4 => TABLE_4,
            Self::T5 => TABLE_5,
            Self::T7 => TABLE_7,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.trim().trim_start_matches(['T', 't']);
        match digits {
            "1" => Ok(Self::T1),
            "2" => Ok(Self::T2),
            "3" => Ok(Self::T3),
            "4" => Ok(Self::T4),
            "5" => Ok(Self::T5),
            "7" => Ok(Self::T7),
            _ => Err(Error::UnknownTable(s.to_string())),
        }
    }
}

/// One base's row: `f_q(0,0,n)`, `f_q(1,0,n)` and, in table 7, `f_q(x,0,n)` for `x >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub q: u64,
    pub x0: ClosedForm,
    pub x1: ClosedForm,
    pub x_large: Option<ClosedForm>,
}

impl TableRow {
    pub fn column(&self, x: u32) -> Option<ClosedForm> {
        match x {
            0 => Some(self.x0),
            1 => Some(self.x1),
            _ => self.x_large,
        }
    }
}

const fn row(q: u64, x0: ClosedForm, x1: ClosedForm) -> TableRow {
    TableRow { q, x0, x1, x_large: None }
}

const fn prime(q: u64, x0: ClosedForm, x1: ClosedForm, xl: ClosedForm) -> TableRow {
    TableRow { q, x0, x1, x_large: Some(xl) }
}

const N: ClosedForm = Linear(0);
const N_M1: ClosedForm = Linear(-1);
const N_P1: ClosedForm = Linear(1);
const N_P2: ClosedForm = Linear(2);
const C2: ClosedForm = Ceil(2, 0);
const C2_M1: ClosedForm = Ceil(2, -1);
const C2_P1: ClosedForm = Ceil(2, 1);
const C3: ClosedForm = Ceil(3, 0);
const C3_M1: ClosedForm = Ceil(3, -1);
const F2: ClosedForm = Floor(2, 0);

/// Bases paired with a remark the source makes about its own row.
pub const FLAGGED_ANOMALIES: &[u64] = &[307, 443];

pub const TABLE_1: &[TableRow] = &[
    row(1, Blank, Blank),
    row(11, N_M1, N_M1),
    row(21, N_M1, N_M1),
    row(31, N_M1, N_M1),
    row(41, N_M1, N_M1),
    row(51, F2, C2_M1),
    row(61, N_M1, N_M1),
    row(71, N_M1, N_M1),
    row(81, N_M1, N_M1),
    row(91, N_M1, N_M1),
    row(101, C2_M1, C2_M1),
    row(9, N, N_M1),
    row(19, N, N_M1),
    row(29, N, N_M1),
    row(39, N, N_M1),
    row(49, C2, C2_M1),
    row(59, N, N_M1),
    row(69, N, N_M1),
    row(79, N, N_M1),
    row(89, N, N_M1),
    row(99, C2, C2_M1),
    row(109, N, N_M1),
];

pub const TABLE_2: &[TableRow] = &[
    row(1, Blank, Blank),
    row(51, F2, C2_M1),
    row(101, C2_M1, C2_M1),
    row(151, C2_M1, C2_M1),
    row(201, C2_M1, C2_M1),
    row(251, F2, C2_M1),
    row(49, C2, C2_M1),
    row(99, C2, C2_M1),
    row(149, C2, C2_M1),
    row(199, C2, C2_M1),
    row(249, C3, C3_M1),
    row(299, C2, C2_M1),
];

pub const TABLE_3: &[TableRow] = &[
    row(3, N_P1, N),
    row(13, N, N),
    row(23, N_P1, N),
    row(33, N, N),
    row(43, C2_P1, C2),
    row(53, N, N),
    row(63, N_P1, N),
    row(73, N, N),
    row(83, N_P1, N),
    row(93, C2, C2),
    row(103, N_P1, N),
    row(7, C2_P1, C2),
    row(17, N, N),
    row(27, N_P1, N),
    row(37, N, N),
    row(47, N_P1, N),
    row(57, C3, C3),
    row(67, N_P1, N),
    row(77, N, N),
    row(87, N_P1, N),
    row(97, N, N),
    row(107, C2_P1, C2),
];

pub const TABLE_4: &[TableRow] = &[
    row(43, C2_P1, C2),
    row(93, C2, C2),
    row(143, C2_P1, C2),
    row(193, C3, C3),
    row(243, C2_P1, C2),
    row(293, C2, C2),
    row(343, C2_P1, C2),
    row(7, C2_P1, C2),
    row(57, C3, C3),
    row(107, C2_P1, C2),
    row(157, C2, C2),
    row(207, C2_P1, C2),
    row(257, C2, C2),
    row(307, F2, C3),
];

pub const TABLE_5: &[TableRow] = &[row(193, C3, C3), row(443, F2, C3_M1), row(57, C3, C3), row(307, F2, C3)];

pub const TABLE_7: &[TableRow] = &[
    prime(2, N_P2, N_P1, N_M1),
    prime(3, N_P1, N, N_M1),
    prime(5, C2_M1, C3_M1, CeilShifted(2, -1)),
    prime(7, C2_P1, C2, C2_M1),
    prime(11, N_M1, N_M1, N_M1),
    prime(13, N, N, N_M1),
    prime(17, N, N, N_M1),
    prime(19, N, N_M1, N_M1),
    prime(23, N_P1, N, N_M1),
    prime(29, N, N_M1, N_M1),
    prime(31, N_M1, N_M1, N_M1),
    prime(37, N, N, N_M1),
    prime(41, N_M1, N_M1, N_M1),
    prime(43, C2_P1, C2, C2_M1),
    prime(47, N_P1, N, N_M1),
    prime(53, N, N, N_M1),
    prime(59, N, N_M1, N_M1),
    prime(61, N_M1, N_M1, N_M1),
    prime(67, N_P1, N, N_M1),
    prime(71, N_M1, N_M1, N_M1),
    prime(73, N, N, N_M1),
    prime(79, N, N_M1, N_M1),
    prime(83, N_P1, N, N_M1),
    prime(89, N, N_M1, N_M1),
    prime(97, N, N, N_M1),
    prime(101, C2_M1, C2_M1, C2_M1),
    prime(103, N_P1, N, N_M1),
    prime(107, C2_P1, C2, C2_M1),
    prime(109, N, N_M1, N_M1),
    prime(113, N, N, N_M1),
    prime(127, N_P1, N, N_M1),
    prime(131, N_M1, N_M1, N_M1),
    prime(137, N, N, N_M1),
    prime(139, N, N_M1, N_M1),
    prime(149, C2, C2_M1, C2_M1),
    prime(151, C2_M1, C2_M1, C2_M1),
    prime(157, C2, C2, C2_M1),
    prime(163, N_P1, N, N_M1),
    prime(167, N_P1, N, N_M1),
    prime(173, N, N, N_M1),
    prime(179, N, N_M1, N_M1),
    prime(181, N_M1, N_M1, N_M1),
    prime(191, N_M1, N_M1, N_M1),
    prime(193, C2_M1, C2_M1, C2_M1),
    prime(197, N, N, N_M1),
    prime(199, C2, C2_M1, C2_M1),
    prime(211, N_M1, N_M1, N_M1),
    prime(223, N_P1, N, N_M1),
    prime(227, N_P1, N, N_M1),
    prime(229, N, N_M1, N_M1),
    prime(233, N, N, N_M1),
    prime(239, N, N_M1, N_M1),
    prime(241, N_M1, N_M1, N_M1),
    prime(251, F2, C3_M1, C3_M1),
    prime(257, C2, C2, C2_M1),
    prime(263, N_P1, N, N_M1),
    prime(269, N, N_M1, N_M1),
    prime(271, N_M1, N_M1, N_M1),
    prime(277, N, N, N_M1),
    prime(281, N_M1, N_M1, N_M1),
];

/// First row for `q` across the small-x tables, with the table it came from.
pub fn lookup_small_x(q: u64) -> Option<(TableId, &'static TableRow)> {
    TableId::SMALL_X.iter().find_map(|&id| id.rows().iter().find(|r| r.q == q).map(|r| (id, r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_evaluate() {
        assert_eq!(N_M1.eval(7, 0), Some(6));
        assert_eq!(C2_P1.eval(7, 0), Some(5));
        assert_eq!(F2.eval(7, 0), Some(3));
        assert_eq!(C3_M1.eval(7, 0), Some(2));
        assert_eq!(CeilShifted(2, -1).eval(9, 2), Some(2));
        assert_eq!(Blank.eval(9, 2), None);
    }

    #[test]
    fn closed_forms_render() {
        assert_eq!(N_M1.to_string(), "n-1");
        assert_eq!(N.to_string(), "n");
        assert_eq!(C2_P1.to_string(), "ceil(n/2)+1");
        assert_eq!(CeilShifted(2, -1).to_string(), "ceil(n/(x+2))-1");
    }

    #[test]
    fn prime_table_lists_first_sixty_primes() {
        let primes: Vec<u64> =
            (2u64..).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).take(60).collect();
        let rows: Vec<u64> = TABLE_7.iter().map(|r| r.q).collect();
        assert_eq!(rows, primes);
        assert!(TABLE_7.iter().all(|r| r.x_large.is_some()));
    }

    #[test]
    fn table_ids_parse() {
        assert_eq!("T3".parse::<TableId>().unwrap(), TableId::T3);
        assert_eq!("7".parse::<TableId>().unwrap(), TableId::T7);
        assert!("T6".parse::<TableId>().is_err());
        assert!("T9".parse::<TableId>().is_err());
    }

    #[test]
    fn overlapping_small_tables_agree() {
        for (i, a) in TableId::SMALL_X.iter().enumerate() {
            for b in &TableId::SMALL_X[i + 1..] {
                for ra in a.rows() {
                    if let Some(rb) = b.rows().iter().find(|r| r.q == ra.q) {
                        assert_eq!(ra, rb, "q = {} in {a} and {b}", ra.q);
                    }
                }
            }
        }
    }

    #[test]
    fn lookup_prefers_earlier_tables() {
        assert_eq!(lookup_small_x(51).unwrap().0, TableId::T1);
        assert_eq!(lookup_small_x(443).unwrap().0, TableId::T5);
        assert!(lookup_small_x(12).is_none());
    }
}
