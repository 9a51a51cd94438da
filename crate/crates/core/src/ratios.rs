//! The special disc ratios where flows start, end or cross, each the root
//! in (0, 1) of an integer polynomial.

use serde::Serialize;

use crate::numerics::{isolate_roots, refine_root, Interval, Polynomial};

pub struct RatioRow {
    pub name: &'static str,
    /// Ascending degree.
    pub coefficients: &'static [i64],
    /// Published 10-digit value, used to pick the root when the polynomial
    /// has several in (0, 1).
    pub tabulated: f64,
}

pub const TABLE: [RatioRow; 12] = [
    RatioRow { name: "r1", coefficients: &[9, -8, -10, 0, 1], tabulated: 0.6375559772 },
    RatioRow { name: "ra", coefficients: &[1, 4, -2, -12, 1], tabulated: 0.6199144044 },
    RatioRow { name: "r2", coefficients: &[9, -120, 388, -24, -482, -232, -44, -8, 1], tabulated: 0.5451510421 },
    RatioRow { name: "r3", coefficients: &[-1, -2, 3, 8], tabulated: 0.5332964167 },
    RatioRow { name: "r4", coefficients: &[-1, 2, 1], tabulated: 0.4142135624 },
    RatioRow { name: "r5", coefficients: &[9, -12, -26, -12, 9], tabulated: 0.3861061049 },
    RatioRow { name: "rb", coefficients: &[1, -1, -5, 1], tabulated: 0.3691023862 },
    RatioRow { name: "r6", coefficients: &[1, 4, -10, -28, 1], tabulated: 0.3491981862 },
    RatioRow { name: "r7", coefficients: &[-1, 3, 2], tabulated: 0.2807764064 },
    RatioRow { name: "rc", coefficients: &[1, -4, -2, -4, 1], tabulated: 0.2168453354 },
    RatioRow { name: "r8", coefficients: &[-1, 6, 3], tabulated: 0.1547005384 },
    RatioRow { name: "r9", coefficients: &[1, -10, 1], tabulated: 0.1010205144 },
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioValue {
    pub name: String,
    pub enclosure: Interval,
    pub polynomial: String,
    /// Number of roots the polynomial has in (0, 1).
    pub roots_in_unit: usize,
}

/// Isolates the roots in (0, 1) of one row's polynomial and refines the one
/// nearest the tabulated value to width `tol`.
pub fn solve_row(row: &RatioRow, tol: f64) -> RatioValue {
    let p = Polynomial::from_integers(row.coefficients);
    let unit = Interval::new(0.0, 1.0).expect("ordered");
    let brackets: Vec<_> = isolate_roots(&p, unit)
        .expect("table polynomials are squarefree")
        .into_iter()
        .filter(|b| b.interval.hi() > 0.0 && b.interval.lo() < 1.0)
        .collect();
    let dist = |iv: &Interval| (iv.mid() - row.tabulated).abs();
    let best = brackets
        .iter()
        .min_by(|a, b| dist(&a.interval).total_cmp(&dist(&b.interval)))
        .expect("every row has a root in (0, 1)");
    RatioValue {
        name: row.name.into(),
        enclosure: refine_root(best, tol),
        polynomial: p.to_string(),
        roots_in_unit: brackets.len(),
    }
}

pub fn ratio_table(tol: f64) -> Vec<RatioValue> {
    TABLE.iter().map(|row| solve_row(row, tol)).collect()
}

/// Enclosure of width at most `tol` of the named ratio (`r1`..`r9`, `ra`,
/// `rb`, `rc`).
pub fn ratio(name: &str, tol: f64) -> Option<Interval> {
    TABLE.iter().find(|r| r.name == name).map(|row| solve_row(row, tol).enclosure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_rows_match_table() {
        let t = ratio_table(1e-10);
        assert_eq!(t.len(), 12);
        for (v, row) in t.iter().zip(TABLE.iter()) {
            assert!(v.enclosure.width() <= 1e-10);
            assert!((v.enclosure.mid() - row.tabulated).abs() < 1e-9, "{}", v.name);
        }
    }

    #[test]
    fn r7_and_ra() {
        let r7 = ratio("r7", 1e-12).unwrap();
        assert!((r7.mid() - 0.2807764064).abs() < 1e-10);
        let ra = solve_row(&TABLE[1], 1e-12);
        assert_eq!(ra.polynomial, "x^4 - 12x^3 - 2x^2 + 4x + 1");
        assert!((ra.enclosure.mid() - 0.6199144044).abs() < 1e-10);
    }

    #[test]
    fn r2_has_three_roots_in_unit_interval() {
        let r2 = solve_row(&TABLE[2], 1e-12);
        assert_eq!(r2.roots_in_unit, 3);
        assert!((r2.enclosure.mid() - 0.5451510421).abs() < 1e-10);
        for row in TABLE.iter().filter(|r| r.name != "r2") {
            assert_eq!(solve_row(row, 1e-6).roots_in_unit, 1, "{}", row.name);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(ratio("r10", 1e-6).is_none());
    }
}
