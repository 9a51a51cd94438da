//! Sparse multivariate polynomials parsed from plain expressions such as
//! `(x4-x3)^2+(y4-y3)^2-(r+r)^2`.

use std::collections::BTreeMap;

use super::{Interval, NumericsError};

/// Polynomial over a fixed, ordered list of variables. Coefficients are
/// stored as `f64`; integer literals are therefore exact.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        if c != 0.0 {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, 1.0);
        p
    }

    /// Parses `expr` with identifiers resolved against `vars`.
    pub fn parse(expr: &str, vars: &[&str]) -> Result<Self, NumericsError> {
        let tokens = tokenize(expr)?;
        let mut parser = Parser { tokens, pos: 0, vars, expr };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.iter().next().filter(|(e, _)| e.iter().all(|&k| k == 0)).map(|(_, &c)| c),
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn insert(&mut self, e: Vec<u32>, c: f64) {
        let v = self.terms.entry(e.clone()).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, &c) in &o.terms {
            out.insert(e.clone(), c);
        }
        out
    }

    pub fn scale(&self, k: f64) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        if k != 0.0 {
            for (e, &c) in &self.terms {
                out.terms.insert(e.clone(), c * k);
            }
        }
        out
    }

    pub fn sub(&self, o: &MultiPoly) -> MultiPoly {
        self.add(&o.scale(-1.0))
    }

    pub fn mul(&self, o: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &o.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.nvars, 1.0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[i] > 0 {
                let mut d = e.clone();
                d[i] -= 1;
                out.insert(d, c * e[i] as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, &c)| e.iter().zip(x).fold(c, |acc, (&k, &xi)| if k == 0 { acc } else { acc * xi.powi(k as i32) }))
            .sum()
    }

    pub fn eval_interval(&self, x: &[Interval]) -> Interval {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms.iter().fold(Interval::point(0.0), |acc, (e, &c)| {
            let term = e.iter().zip(x).fold(Interval::point(c), |t, (&k, &xi)| {
                if k == 0 {
                    t
                } else {
                    t * xi.powi(k as i32).expect("nonnegative power")
                }
            });
            acc + term
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, NumericsError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let v = lit.parse::<f64>().map_err(|_| NumericsError::Parse(format!("bad number `{lit}` in `{s}`")))?;
            out.push(Token::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(NumericsError::Parse(format!("unexpected `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
    expr: &'a str,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> NumericsError {
        NumericsError::Parse(format!("{msg} at token {} in `{}`", self.pos, self.expr))
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<MultiPoly, NumericsError> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, NumericsError> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                acc.mul(&rhs)
            } else {
                match rhs.as_constant() {
                    Some(c) if c != 0.0 => acc.scale(1.0 / c),
                    _ => return Err(self.error("division only by a nonzero constant")),
                }
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly, NumericsError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.scale(-1.0))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, NumericsError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Token::Num(n)) if n.fract() == 0.0 && *n >= 0.0 && *n <= 64.0 => {
                    let n = *n as u32;
                    self.pos += 1;
                    Ok(base.pow(n))
                }
                _ => Err(self.error("exponent must be a small nonnegative integer")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, NumericsError> {
        let n = self.vars.len();
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(n, v))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(MultiPoly::var(n, i)),
                    None => Err(NumericsError::Parse(format!("unknown variable `{name}` in `{}`", self.expr))),
                }
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error("expected a number, variable or `(`")),
        }
    }
}

/// A polynomial system in `unknowns`, with extra named `params` held fixed
/// during a solve.
#[derive(Clone, Debug)]
pub struct PolySystem {
    unknowns: Vec<String>,
    params: Vec<String>,
    equations: Vec<MultiPoly>,
    jacobian: Vec<Vec<MultiPoly>>,
}

impl PolySystem {
    pub fn parse<S: AsRef<str>>(unknowns: &[S], params: &[S], equations: &[S]) -> Result<Self, NumericsError> {
        let unknowns: Vec<String> = unknowns.iter().map(|s| s.as_ref().to_string()).collect();
        let params: Vec<String> = params.iter().map(|s| s.as_ref().to_string()).collect();
        let names: Vec<&str> = unknowns.iter().chain(&params).map(String::as_str).collect();
        let equations =
            equations.iter().map(|e| MultiPoly::parse(e.as_ref(), &names)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_polys(unknowns, params, equations))
    }

    pub fn from_polys(unknowns: Vec<String>, params: Vec<String>, equations: Vec<MultiPoly>) -> Self {
        let jacobian = equations.iter().map(|eq| (0..unknowns.len()).map(|j| eq.derivative(j)).collect()).collect();
        Self { unknowns, params, equations, jacobian }
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn equations(&self) -> &[MultiPoly] {
        &self.equations
    }

    pub fn is_square(&self) -> bool {
        self.equations.len() == self.unknowns.len()
    }

    fn point(&self, x: &[f64], p: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.unknowns.len(), "wrong number of unknowns");
        assert_eq!(p.len(), self.params.len(), "wrong number of parameters");
        x.iter().chain(p).copied().collect()
    }

    pub fn residual(&self, x: &[f64], p: &[f64]) -> Vec<f64> {
        let z = self.point(x, p);
        self.equations.iter().map(|e| e.eval(&z)).collect()
    }

    pub fn jacobian(&self, x: &[f64], p: &[f64]) -> Vec<Vec<f64>> {
        let z = self.point(x, p);
        self.jacobian.iter().map(|row| row.iter().map(|d| d.eval(&z)).collect()).collect()
    }

    pub fn residual_interval(&self, x: &[Interval], p: &[Interval]) -> Vec<Interval> {
        let z: Vec<Interval> = x.iter().chain(p).copied().collect();
        self.equations.iter().map(|e| e.eval_interval(&z)).collect()
    }
}
