//! Sparse multivariate Diophantine polynomials with exact integer arithmetic.
//!
//! A [`Polynomial`] is the canonical expanded form of an integer polynomial
//! `D(x1, ..., xk)`: a map from exponent vectors to nonzero arbitrary-precision
//! coefficients. The module provides a text front-end ([`parse_polynomial`]),
//! exact evaluation over non-negative integer points, and an exhaustive
//! box-bounded root search that serves as the classical reference oracle.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A point of the non-negative integer lattice, one coordinate per variable.
pub type LatticePoint = Vec<u64>;

/// Errors from [`parse_polynomial`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("non-integer literal at byte {pos}")]
    NonIntegerLiteral { pos: usize },
    #[error("negative exponent at byte {pos}")]
    NegativeExponent { pos: usize },
    #[error("exponent at byte {pos} must be an integer literal")]
    NonLiteralExponent { pos: usize },
    #[error("exponent at byte {pos} is too large")]
    ExponentTooLarge { pos: usize },
}

/// Evaluation-side errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Canonical sparse form of a multivariate integer polynomial.
///
/// Invariants: every stored coefficient is nonzero and every exponent vector
/// has length exactly `k`. The zero polynomial is the empty term map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    k: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl Polynomial {
    /// The zero polynomial in `k` variables.
    pub fn zero(k: usize) -> Self {
        Polynomial {
            k,
            terms: BTreeMap::new(),
        }
    }

    /// A constant polynomial in `k` variables.
    pub fn constant(k: usize, value: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(vec![0; k], value);
        }
        Polynomial { k, terms }
    }

    /// The monomial `x_i` (0-based variable index) in `k` variables.
    pub fn variable(k: usize, i: usize) -> Self {
        assert!(i < k, "variable index {i} out of range for k={k}");
        let mut exp = vec![0u32; k];
        exp[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exp, BigInt::one());
        Polynomial { k, terms }
    }

    /// Build directly from a term list; zero coefficients are dropped and
    /// repeated exponent vectors are summed.
    pub fn from_terms(k: usize, iter: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut p = Polynomial::zero(k);
        for (exp, coef) in iter {
            assert_eq!(exp.len(), k, "exponent vector length must equal k");
            p.add_term(exp, coef);
        }
        p
    }

    /// Number of variables.
    pub fn num_vars(&self) -> usize {
        self.k
    }

    /// True for the zero polynomial (empty term map).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate terms in the canonical (lexicographic exponent) order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn add_term(&mut self, exp: Vec<u32>, coef: BigInt) {
        if coef.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(e) => {
                e.insert(coef);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Exact value of the polynomial at a lattice point.
    pub fn eval(&self, point: &[u64]) -> Result<BigInt, PolyError> {
        if point.len() != self.k {
            return Err(PolyError::DimensionMismatch {
                expected: self.k,
                got: point.len(),
            });
        }
        let mut total = BigInt::zero();
        for (exp, coef) in &self.terms {
            let mut term = coef.clone();
            for (x, &e) in point.iter().zip(exp.iter()) {
                if e > 0 {
                    term *= BigInt::from(*x).pow(e);
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Lexicographically smallest root in the box `{0, ..., bound}^k`, if any.
    ///
    /// Exhaustive scan; the caller bounds the box. For `k = 0` the only point
    /// is the empty tuple.
    pub fn brute_force_search(&self, bound: u64) -> Option<LatticePoint> {
        if self.k == 0 {
            return if self.eval(&[]).expect("k = 0").is_zero() {
                Some(Vec::new())
            } else {
                None
            };
        }
        let mut point = vec![0u64; self.k];
        loop {
            if self.eval(&point).expect("point length matches k").is_zero() {
                return Some(point);
            }
            // odometer increment, last coordinate fastest = lexicographic order
            let mut i = self.k;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                if point[i] < bound {
                    point[i] += 1;
                    break;
                }
                point[i] = 0;
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.k, other.k);
        let mut out = self.clone();
        for (exp, coef) in &other.terms {
            out.add_term(exp.clone(), coef.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.k, other.k);
        let mut out = self.clone();
        for (exp, coef) in &other.terms {
            out.add_term(exp.clone(), -coef.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            k: self.k,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.k, other.k);
        let mut out = Polynomial::zero(self.k);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(exp, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.k, BigInt::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

impl fmt::Display for Polynomial {
    /// Canonical rendering using variable names `x1..xk`; parses back to
    /// the same polynomial when every variable appears (variable order is
    /// by first appearance, and terms are emitted in exponent order).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, coef) in &self.terms {
            let neg = coef.is_negative();
            let mag = coef.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut wrote = false;
            if !mag.is_one() || exp.iter().all(|&e| e == 0) {
                write!(f, "{mag}")?;
                wrote = true;
            }
            for (i, &e) in exp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "x{}", i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

// Wire format: {"k": n, "terms": [{"exp": [...], "coef": "decimal-string"}]},
// coefficients as decimal strings to preserve arbitrary precision.
impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            exp: &'a [u32],
            coef: String,
        }
        struct Terms<'a>(&'a Polynomial);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.terms.len()))?;
                for (exp, coef) in &self.0.terms {
                    seq.serialize_element(&Term {
                        exp,
                        coef: coef.to_string(),
                    })?;
                }
                seq.end()
            }
        }
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Polynomial", 2)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("terms", &Terms(self))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Term {
            exp: Vec<u32>,
            coef: String,
        }
        #[derive(Deserialize)]
        struct Raw {
            k: usize,
            terms: Vec<Term>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let mut p = Polynomial::zero(raw.k);
        for t in raw.terms {
            if t.exp.len() != raw.k {
                return Err(D::Error::custom(format!(
                    "exponent vector of length {} in a {}-variable polynomial",
                    t.exp.len(),
                    raw.k
                )));
            }
            let coef: BigInt = t
                .coef
                .parse()
                .map_err(|e| D::Error::custom(format!("bad coefficient {:?}: {e}", t.coef)))?;
            p.add_term(t.exp, coef);
        }
        Ok(p)
    }
}

/// Parse an arithmetic expression over variables, integer literals, `+ - * ^`
/// and parentheses into canonical expanded form. Adjacent factors multiply
/// (`(x-1)(x-3)`, `2 x`), an optional trailing `= 0` is stripped, and the
/// variable count is the number of distinct names in order of first
/// appearance.
pub fn parse_polynomial(text: &str) -> Result<Polynomial, ParseError> {
    let expr = parse_expression(text)?;
    Ok(expr.expand())
}

/// Parse to the raw expression tree (used by the differential evaluator in
/// tests; [`parse_polynomial`] is the expanded front door).
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut vars: Vec<String> = Vec::new();
    for (tok, _) in &tokens {
        if let Token::Ident(name) = tok {
            if !vars.iter().any(|v| v == name) {
                vars.push(name.clone());
            }
        }
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        vars: &vars,
        end: text.len(),
    };
    let expr = parser.parse_top()?;
    Ok(Expr {
        k: vars.len(),
        root: expr,
    })
}

/// Expression tree produced by the parser, before expansion.
#[derive(Debug, Clone)]
pub struct Expr {
    k: usize,
    root: Node,
}

#[derive(Debug, Clone)]
pub enum Node {
    Const(BigInt),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
}

impl Expr {
    pub fn num_vars(&self) -> usize {
        self.k
    }

    /// Expand into canonical sparse form.
    pub fn expand(&self) -> Polynomial {
        fn go(node: &Node, k: usize) -> Polynomial {
            match node {
                Node::Const(c) => Polynomial::constant(k, c.clone()),
                Node::Var(i) => Polynomial::variable(k, *i),
                Node::Neg(a) => go(a, k).neg(),
                Node::Add(a, b) => go(a, k).add(&go(b, k)),
                Node::Sub(a, b) => go(a, k).sub(&go(b, k)),
                Node::Mul(a, b) => go(a, k).mul(&go(b, k)),
                Node::Pow(a, e) => go(a, k).pow(*e),
            }
        }
        go(&self.root, self.k)
    }

    /// Direct tree-walking evaluation, independent of the expanded form.
    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.k);
        fn go(node: &Node, point: &[BigInt]) -> BigInt {
            match node {
                Node::Const(c) => c.clone(),
                Node::Var(i) => point[*i].clone(),
                Node::Neg(a) => -go(a, point),
                Node::Add(a, b) => go(a, point) + go(b, point),
                Node::Sub(a, b) => go(a, point) - go(b, point),
                Node::Mul(a, b) => go(a, point) * go(b, point),
                Node::Pow(a, e) => go(a, point).pow(*e),
            }
        }
        go(&self.root, point)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Equals,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                out.push((Token::Plus, i));
                i += 1;
            }
            b'-' => {
                out.push((Token::Minus, i));
                i += 1;
            }
            b'*' => {
                out.push((Token::Star, i));
                i += 1;
            }
            b'^' => {
                out.push((Token::Caret, i));
                i += 1;
            }
            b'=' => {
                out.push((Token::Equals, i));
                i += 1;
            }
            b'(' => {
                out.push((Token::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Token::RParen, i));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    return Err(ParseError::NonIntegerLiteral { pos: start });
                }
                let lit: BigInt = text[start..i].parse().expect("digits parse as BigInt");
                out.push((Token::Int(lit), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos: i,
                    msg: format!(
                        "unexpected character {:?}",
                        text[i..].chars().next().unwrap()
                    ),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(Token, usize)],
    pos: usize,
    vars: &'a [String],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(_, p)| p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn parse_top(&mut self) -> Result<Node, ParseError> {
        if self.tokens.is_empty() {
            return Err(ParseError::Syntax {
                pos: 0,
                msg: "empty expression".into(),
            });
        }
        let expr = self.parse_sum()?;
        // optional trailing "= 0"
        if matches!(self.peek(), Some(Token::Equals)) {
            self.bump();
            let pos = self.here();
            match self.bump() {
                Some(Token::Int(v)) if v.is_zero() => {}
                _ => {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "expected 0 after '='".into(),
                    })
                }
            }
        }
        if self.pos != self.tokens.len() {
            return Err(ParseError::Syntax {
                pos: self.here(),
                msg: "trailing input".into(),
            });
        }
        Ok(expr)
    }

    fn parse_sum(&mut self) -> Result<Node, ParseError> {
        let mut lhs = match self.peek() {
            Some(Token::Minus) => {
                self.bump();
                Node::Neg(Box::new(self.parse_product()?))
            }
            Some(Token::Plus) => {
                self.bump();
                self.parse_product()?
            }
            _ => self.parse_product()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.parse_product()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.parse_product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_product(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.parse_power()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.parse_power()?));
                }
                // juxtaposition: a factor start right after a factor multiplies
                Some(Token::Int(_)) | Some(Token::Ident(_)) | Some(Token::LParen) => {
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.parse_power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_power(&mut self) -> Result<Node, ParseError> {
        let base = self.parse_atom()?;
        if !matches!(self.peek(), Some(Token::Caret)) {
            return Ok(base);
        }
        self.bump();
        let pos = self.here();
        let exp = match self.bump() {
            Some(Token::Int(v)) => {
                u32::try_from(v).map_err(|_| ParseError::ExponentTooLarge { pos })?
            }
            Some(Token::Minus) => return Err(ParseError::NegativeExponent { pos }),
            _ => return Err(ParseError::NonLiteralExponent { pos }),
        };
        if matches!(self.peek(), Some(Token::Caret)) {
            return Err(ParseError::Syntax {
                pos: self.here(),
                msg: "chained '^' needs parentheses".into(),
            });
        }
        Ok(Node::Pow(Box::new(base), exp))
    }

    fn parse_atom(&mut self) -> Result<Node, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Token::Int(v)) => Ok(Node::Const(v)),
            Some(Token::Ident(name)) => {
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .expect("identifier was collected in the variable scan");
                Ok(Node::Var(idx))
            }
            Some(Token::LParen) => {
                let inner = self.parse_sum()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(ParseError::Syntax {
                        pos,
                        msg: "unclosed parenthesis".into(),
                    }),
                }
            }
            other => Err(ParseError::Syntax {
                pos,
                msg: match other {
                    None => "unexpected end of input".into(),
                    Some(t) => format!("unexpected token {t:?}"),
                },
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn terms_of(p: &Polynomial) -> Vec<(Vec<u32>, i64)> {
        p.terms()
            .map(|(e, c)| (e.to_vec(), i64::try_from(c).unwrap()))
            .collect()
    }

    #[test]
    fn parses_binomial_square() {
        let p = parse_polynomial("(x - 2)^2").unwrap();
        assert_eq!(p.num_vars(), 1);
        assert_eq!(
            terms_of(&p),
            vec![(vec![0], 4), (vec![1], -4), (vec![2], 1)]
        );
    }

    #[test]
    fn parses_circle_with_trailing_equals_zero() {
        let p = parse_polynomial("x^2 + y^2 - 5 = 0").unwrap();
        assert_eq!(p.num_vars(), 2);
        assert_eq!(
            terms_of(&p),
            vec![(vec![0, 0], -5), (vec![0, 2], 1), (vec![2, 0], 1)]
        );
    }

    #[test]
    fn cancellation_gives_zero_polynomial() {
        let p = parse_polynomial("x - x").unwrap();
        assert_eq!(p.num_vars(), 1);
        assert!(p.is_zero());
    }

    #[test]
    fn variables_ordered_by_first_appearance() {
        let p = parse_polynomial("y + 2*x").unwrap();
        // y is variable 0, x is variable 1
        assert_eq!(terms_of(&p), vec![(vec![0, 1], 2), (vec![1, 0], 1)]);
    }

    #[test]
    fn juxtaposition_multiplies() {
        let a = parse_polynomial("(x-1)(x-3)").unwrap();
        let b = parse_polynomial("(x-1)*(x-3)").unwrap();
        assert_eq!(a, b);
        let c = parse_polynomial("2 x").unwrap();
        assert_eq!(terms_of(&c), vec![(vec![1], 2)]);
        let d = parse_polynomial("x^2y").unwrap();
        assert_eq!(terms_of(&d), vec![(vec![2, 1], 1)]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_polynomial("x^-2"),
            Err(ParseError::NegativeExponent { .. })
        ));
        assert!(matches!(
            parse_polynomial("x^y"),
            Err(ParseError::NonLiteralExponent { .. })
        ));
        assert!(matches!(
            parse_polynomial("1.5 + x"),
            Err(ParseError::NonIntegerLiteral { pos: 0 })
        ));
        assert!(matches!(
            parse_polynomial("x +* 2"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_polynomial(""),
            Err(ParseError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            parse_polynomial("x = 5"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_polynomial("(x + 1"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn syntax_error_positions_point_at_offender() {
        match parse_polynomial("x + $") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn eval_examples() {
        let p = parse_polynomial("(x - 2)^2").unwrap();
        assert_eq!(p.eval(&[2]).unwrap(), big(0));
        let q = parse_polynomial("x^2 + y^2 - 5").unwrap();
        assert_eq!(q.eval(&[1, 2]).unwrap(), big(0));
        assert_eq!(q.eval(&[0, 0]).unwrap(), big(-5));
        assert!(matches!(
            q.eval(&[1]),
            Err(PolyError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn brute_force_examples() {
        let p = parse_polynomial("(x - 2)^2").unwrap();
        assert_eq!(p.brute_force_search(10), Some(vec![2]));
        let q = parse_polynomial("x + y + 1").unwrap();
        assert_eq!(q.brute_force_search(50), None);
        // frozen from an exhaustive lexicographic scan over {0..5}^2
        let r = parse_polynomial("x^2 + y^2 - 5").unwrap();
        assert_eq!(r.brute_force_search(5), Some(vec![1, 2]));
        let z = parse_polynomial("x - x").unwrap();
        assert_eq!(z.brute_force_search(0), Some(vec![0]));
    }

    #[test]
    fn zero_variable_polynomials() {
        let c = parse_polynomial("3").unwrap();
        assert_eq!(c.num_vars(), 0);
        assert_eq!(c.eval(&[]).unwrap(), big(3));
        assert_eq!(c.brute_force_search(10), None);
        let z = parse_polynomial("5 - 5").unwrap();
        assert_eq!(z.brute_force_search(10), Some(vec![]));
    }

    #[test]
    fn literal_powers_fold() {
        let p = parse_polynomial("2^3 + x^0").unwrap();
        assert_eq!(p.num_vars(), 1);
        assert_eq!(terms_of(&p), vec![(vec![0], 9)]);
    }

    #[test]
    fn serde_round_trip_preserves_big_coefficients() {
        let big_coef: BigInt = "123456789012345678901234567890".parse().unwrap();
        let p = Polynomial::from_terms(
            2,
            vec![(vec![3, 0], big_coef.clone()), (vec![0, 1], big(-7))],
        );
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"123456789012345678901234567890\""));
        let back: Polynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn display_round_trips_through_parser() {
        let p = parse_polynomial("(x - 2)^2 + 3*x*y").unwrap();
        let q = parse_polynomial(&p.to_string()).unwrap();
        assert_eq!(p, q);
    }

    // ---- randomized differential and canonicalization checks ----

    fn arb_node(vars: usize) -> impl Strategy<Value = Node> {
        let leaf = prop_oneof![
            (-20i64..=20).prop_map(|v| Node::Const(BigInt::from(v))),
            (0..vars).prop_map(Node::Var),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Node::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Node::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Node::Mul(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Node::Neg(Box::new(a))),
                (inner, 0u32..=3).prop_map(|(a, e)| Node::Pow(Box::new(a), e)),
            ]
        })
    }

    fn render(node: &Node) -> String {
        match node {
            Node::Const(c) => {
                if c.is_negative() {
                    format!("(0 - {})", c.abs())
                } else {
                    c.to_string()
                }
            }
            Node::Var(i) => format!("x{}", i + 1),
            Node::Neg(a) => format!("(0 - {})", render(a)),
            Node::Add(a, b) => format!("({} + {})", render(a), render(b)),
            Node::Sub(a, b) => format!("({} - {})", render(a), render(b)),
            Node::Mul(a, b) => format!("({} * {})", render(a), render(b)),
            Node::Pow(a, e) => format!("({})^{}", render(a), e),
        }
    }

    proptest! {
        /// Differential test: parse -> expand -> evaluate agrees with the
        /// naive tree-walking evaluator on random expressions and points.
        #[test]
        fn expansion_matches_tree_walk(
            node in arb_node(3),
            pts in proptest::collection::vec(
                proptest::collection::vec(0u64..7, 3), 1..12),
        ) {
            // pin the variable order by naming all three up front
            let text = format!("0*x1*x2*x3 + {}", render(&node));
            let expr = parse_expression(&text).unwrap();
            let poly = expr.expand();
            prop_assert_eq!(expr.num_vars(), 3);
            for pt in &pts {
                let bigs: Vec<BigInt> = pt.iter().map(|&v| BigInt::from(v)).collect();
                prop_assert_eq!(poly.eval(pt).unwrap(), expr.eval(&bigs));
            }
        }

        /// Canonicalization: term order and grouping in the source text do
        /// not change the parsed polynomial.
        #[test]
        fn term_order_is_canonicalized(
            terms in proptest::collection::vec(
                (proptest::collection::vec(0u32..4, 2), -9i64..=9), 1..6),
            seed in 0u64..1000,
        ) {
            let rendered: Vec<String> = terms
                .iter()
                .map(|(exp, c)| format!("({c}) * x1^{} * x2^{}", exp[0], exp[1]))
                .collect();
            let forward = format!("0*x1*x2 + {}", rendered.join(" + "));
            let mut shuffled = rendered.clone();
            // cheap deterministic shuffle
            let n = shuffled.len();
            for i in 0..n {
                let j = (seed as usize + i * 7) % n;
                shuffled.swap(i, j);
            }
            let backward = format!("0*x1*x2 + {}", shuffled.join(" + "));
            prop_assert_eq!(
                parse_polynomial(&forward).unwrap(),
                parse_polynomial(&backward).unwrap()
            );
        }

        /// brute_force_search returns a point iff it is a root, and absence
        /// means no root exists anywhere in the box.
        #[test]
        fn brute_force_is_sound_and_complete(
            terms in proptest::collection::vec(
                (proptest::collection::vec(0u32..3, 2), -6i64..=6), 0..4),
            bound in 0u64..5,
        ) {
            let p = Polynomial::from_terms(
                2,
                terms.into_iter().map(|(e, c)| (e, BigInt::from(c))),
            );
            match p.brute_force_search(bound) {
                Some(pt) => {
                    prop_assert!(p.eval(&pt).unwrap().is_zero());
                    // lexicographically smallest: nothing before it is a root
                    let mut probe = vec![0u64; 2];
                    'outer: loop {
                        if probe == pt {
                            break;
                        }
                        prop_assert!(!p.eval(&probe).unwrap().is_zero());
                        let mut i = 2;
                        loop {
                            if i == 0 { break 'outer; }
                            i -= 1;
                            if probe[i] < bound { probe[i] += 1; break; }
                            probe[i] = 0;
                        }
                    }
                }
                None => {
                    for a in 0..=bound {
                        for b in 0..=bound {
                            prop_assert!(!p.eval(&[a, b]).unwrap().is_zero());
                        }
                    }
                }
            }
        }
    }
}
