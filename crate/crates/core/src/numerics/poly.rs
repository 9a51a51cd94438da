use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::interval::rational_sign;
use super::{Interval, NumericsError};

/// Univariate polynomial with exact rational coefficients, ascending degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

/// A polynomial together with an interval holding exactly one of its roots,
/// which is simple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootBracket {
    pub polynomial: Polynomial,
    pub interval: Interval,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Exact sign at a floating-point abscissa.
    pub fn sign_at(&self, x: f64) -> i8 {
        let q = BigRational::from_f64(x).expect("finite abscissa");
        rational_sign(&self.eval(&q))
    }

    /// Horner evaluation in interval arithmetic.
    pub fn eval_interval(&self, x: Interval) -> Interval {
        self.coeffs.iter().rev().fold(Interval::point(0.0), |acc, c| acc * x + Interval::from_rational(c))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    fn scale(&self, k: &BigRational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => self.clone(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &rem[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`, which has the same roots, all simple.
    pub fn squarefree_part(&self) -> Result<Polynomial, NumericsError> {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return Ok(self.clone());
        }
        let (q, r) = self.div_rem(&g);
        if !r.is_zero() {
            return Err(NumericsError::NotSquarefree);
        }
        Ok(q)
    }

    fn sturm_sequence(&self) -> Vec<Polynomial> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-BigRational::one()));
        }
        seq
    }
}

fn sign_changes(seq: &[Polynomial], x: f64) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in seq {
        let s = p.sign_at(x);
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Isolates every real root of `p` in the closed `range`.
///
/// The polynomial is first reduced to its squarefree part; the returned
/// brackets refer to that reduced polynomial, are sorted, pairwise disjoint,
/// and each holds exactly one root. Roots are counted with Sturm sequences,
/// evaluated exactly in rationals at floating-point abscissae.
pub fn isolate_roots(p: &Polynomial, range: Interval) -> Result<Vec<RootBracket>, NumericsError> {
    if p.is_zero() {
        return Err(NumericsError::Domain("the zero polynomial has no isolated roots".into()));
    }
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let q = p.squarefree_part()?;
    let seq = q.sturm_sequence();

    let mut a = range.lo();
    let mut b = range.hi();
    let mut head = Vec::new();
    let mut tail = Vec::new();
    if q.sign_at(a) == 0 {
        head.push((a, a));
        if a == b {
            return Ok(to_brackets(&q, head));
        }
        while q.sign_at(a) == 0 {
            a = a.next_up();
        }
    }
    if q.sign_at(b) == 0 {
        tail.push((b, b));
        while q.sign_at(b) == 0 {
            b = b.next_down();
        }
    }

    let mut found = head;
    if a < b {
        let count = sign_changes(&seq, a) - sign_changes(&seq, b);
        split(&q, &seq, a, b, count, &mut found)?;
    }
    found.extend(tail);
    separate_touching(&q, &mut found);
    Ok(to_brackets(&q, found))
}

fn to_brackets(q: &Polynomial, spans: Vec<(f64, f64)>) -> Vec<RootBracket> {
    spans
        .into_iter()
        .map(|(lo, hi)| RootBracket {
            polynomial: q.clone(),
            interval: Interval::new(lo, hi).expect("ordered bracket"),
        })
        .collect()
}

// Invariant: q(a) != 0, q(b) != 0, `count` roots in (a, b).
fn split(
    q: &Polynomial,
    seq: &[Polynomial],
    a: f64,
    b: f64,
    count: usize,
    out: &mut Vec<(f64, f64)>,
) -> Result<(), NumericsError> {
    match count {
        0 => return Ok(()),
        1 => {
            out.push((a, b));
            return Ok(());
        }
        _ => {}
    }
    let m = a + 0.5 * (b - a);
    if m <= a || m >= b {
        return Err(NumericsError::Domain(format!("{count} roots closer together than f64 resolution near {a}")));
    }
    if q.sign_at(m) == 0 {
        let mut ml = m.next_down();
        while q.sign_at(ml) == 0 {
            ml = ml.next_down();
        }
        let mut mr = m.next_up();
        while q.sign_at(mr) == 0 {
            mr = mr.next_up();
        }
        let vl = sign_changes(seq, a) - sign_changes(seq, ml);
        split(q, seq, a, ml, vl, out)?;
        out.push((m, m));
        let vr = sign_changes(seq, mr) - sign_changes(seq, b);
        split(q, seq, mr, b, vr, out)
    } else {
        let vm = sign_changes(seq, m);
        split(q, seq, a, m, sign_changes(seq, a) - vm, out)?;
        split(q, seq, m, b, vm - sign_changes(seq, b), out)
    }
}

// Brackets from adjacent halves share their split point, which is never a
// root; shrink them until they are strictly disjoint.
fn separate_touching(q: &Polynomial, spans: &mut [(f64, f64)]) {
    for i in 1..spans.len() {
        while spans[i - 1].1 >= spans[i].0 {
            spans[i - 1] = halve(q, spans[i - 1]);
            spans[i] = halve(q, spans[i]);
        }
    }
}

fn halve(q: &Polynomial, (a, b): (f64, f64)) -> (f64, f64) {
    if a == b {
        return (a, b);
    }
    let m = a + 0.5 * (b - a);
    let sm = q.sign_at(m);
    if sm == 0 {
        (m, m)
    } else if sm == q.sign_at(a) {
        (m, b)
    } else {
        (a, m)
    }
}

/// Shrinks a bracket by sign bisection until its width is at most `tol`.
///
/// The result is contained in the input bracket. Its endpoints carry
/// opposite signs unless an exact root was hit, in which case the result is
/// the degenerate interval at that root. Stops early if the bracket reaches
/// adjacent floats.
pub fn refine_root(b: &RootBracket, tol: f64) -> Interval {
    assert!(tol > 0.0, "refine_root needs a positive tolerance");
    let q = &b.polynomial;
    let (mut lo, mut hi) = (b.interval.lo(), b.interval.hi());
    let s_lo = q.sign_at(lo);
    if s_lo == 0 {
        return Interval::point(lo);
    }
    if q.sign_at(hi) == 0 {
        return Interval::point(hi);
    }
    while hi - lo > tol {
        let m = lo + 0.5 * (hi - lo);
        if m <= lo || m >= hi {
            break;
        }
        match q.sign_at(m) {
            0 => return Interval::point(m),
            s if s == s_lo => lo = m,
            _ => hi = m,
        }
    }
    Interval::new(lo, hi).expect("ordered")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let coef = if a.is_integer() { a.numer().to_string() } else { format!("({}/{})", a.numer(), a.denom()) };
            match i {
                0 => write!(f, "{coef}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{coef}")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

// JSON: array of [numerator, denominator] integer pairs, ascending degree.
impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::Error;
        let pairs = self
            .coeffs
            .iter()
            .map(|c| match (c.numer().to_i64(), c.denom().to_i64()) {
                (Some(n), Some(d)) => Ok([n, d]),
                _ => Err(S::Error::custom(format!("coefficient {c} exceeds i64"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let pairs = Vec::<[i64; 2]>::deserialize(d)?;
        let coeffs = pairs
            .into_iter()
            .map(|[n, den]| {
                if den == 0 {
                    Err(D::Error::custom("zero denominator"))
                } else {
                    Ok(BigRational::new(n.into(), den.into()))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Polynomial::new(coeffs))
    }
}
