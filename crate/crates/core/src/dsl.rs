//! Text syntax for identities.
//!
//! ```text
//! identity  := expr "==" expr
//! expr      := term (("+" | "-") term)*
//! term      := factor ("*" factor)*
//! factor    := primary ("^" nat)?
//! primary   := atom | const | rational | "(" expr ")" | "-" primary
//! atom      := ("theta" | "dtheta") "[" srat "," srat "]" ("(" nat ")")?
//!            | "eta" "(" nat ")" | "farkasprod" | "lambert" "(" ident ")"
//!            | "etaq" "{" "(" nat "," int ")" ("," "(" nat "," int ")")* ";" srat "}"
//!            | "gf" "(" ident ")"
//! const     := "zeta" "(" nat ")" ("^" int)? | "sqrt2" | "sqrt3" | "I"
//! ```
//!
//! `#` starts a comment that runs to the end of the line. In a file, an
//! identity ends at the first line break after its right-hand side unless
//! the line ends inside parentheses or with an operator.

use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::arith::LambertVariant;
use crate::cyclotomic::UNIVERSAL_ORDER;
use crate::expr::{Atom, Const, Expr, GfKind, Identity, Sign};
use crate::thetaforms::{Characteristic, EtaQuotientSpec};

const MAX_DEPTH: usize = 200;
const MAX_DENOMINATOR: u64 = 2 * UNIVERSAL_ORDER as u64;
const MAX_POWER: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message} (at {token})")]
pub struct DslError {
    pub line: usize,
    pub col: usize,
    pub token: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Ident(String),
    Nat(u64),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    line: usize,
    col: usize,
    newline_before: bool,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Ident(s) => write!(f, "'{s}'"),
            Kind::Nat(n) => write!(f, "'{n}'"),
            Kind::Sym(s) => write!(f, "'{s}'"),
            Kind::Eof => f.write_str("end of input"),
        }
    }
}

const SYMBOLS: [&str; 14] = ["==", "+", "-", "*", "^", "/", "(", ")", "[", "]", "{", "}", ",", ";"];

fn lex(src: &str) -> Result<Vec<Token>, DslError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut newline = false;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            newline = true;
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let kind = if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            Kind::Nat(text.parse().map_err(|_| DslError {
                line: start_line,
                col: start_col,
                token: format!("'{text}'"),
                message: "integer literal too large".into(),
            })?)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            Kind::Ident(chars[start..i].iter().collect())
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    i += s.len();
                    col += s.len();
                    Kind::Sym(s)
                }
                None => {
                    return Err(DslError {
                        line,
                        col,
                        token: format!("'{c}'"),
                        message: "unexpected character".into(),
                    })
                }
            }
        };
        out.push(Token {
            kind,
            line: start_line,
            col: start_col,
            newline_before: newline,
        });
        newline = false;
    }
    out.push(Token {
        kind: Kind::Eof,
        line,
        col,
        newline_before: newline,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
    paren_depth: usize,
    stop_at_newline: bool,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> DslError {
        DslError {
            line: t.line,
            col: t.col,
            token: t.kind.to_string(),
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> DslError {
        self.error_at(self.peek(), message)
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(&self.peek().kind, Kind::Sym(x) if *x == s)
    }

    /// True when the next token continues the current expression.
    fn continues(&self, s: &str) -> bool {
        self.at_sym(s) && !(self.stop_at_newline && self.paren_depth == 0 && self.peek().newline_before)
    }

    fn expect(&mut self, s: &str) -> Result<(), DslError> {
        if self.at_sym(s) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected '{s}'")))
        }
    }

    fn nat(&mut self) -> Result<u64, DslError> {
        match self.peek().kind {
            Kind::Nat(n) => {
                self.next();
                Ok(n)
            }
            _ => Err(self.error("expected a natural number")),
        }
    }

    fn positive_u32(&mut self, what: &str) -> Result<u32, DslError> {
        let t = self.peek().clone();
        let n = self.nat()?;
        match u32::try_from(n) {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(self.error_at(&t, format!("{what} must be a positive 32-bit integer"))),
        }
    }

    fn int(&mut self) -> Result<i64, DslError> {
        let neg = if self.at_sym("-") {
            self.next();
            true
        } else {
            false
        };
        let t = self.peek().clone();
        let n = self.nat()?;
        let v = i64::try_from(n).map_err(|_| self.error_at(&t, "integer literal too large"))?;
        Ok(if neg { -v } else { v })
    }

    /// Optionally signed `p` or `p/q`.
    fn signed_rational(&mut self) -> Result<BigRational, DslError> {
        let n = self.int()?;
        let d = if self.at_sym("/") {
            self.next();
            let t = self.peek().clone();
            let d = self.nat()?;
            if d == 0 {
                return Err(self.error_at(&t, "zero denominator"));
            }
            if d > MAX_DENOMINATOR {
                return Err(self.error_at(&t, format!("denominator exceeds {MAX_DENOMINATOR}")));
            }
            d
        } else {
            1
        };
        Ok(BigRational::new(n.into(), d.into()))
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match &self.peek().kind {
            Kind::Ident(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn identity(&mut self) -> Result<Identity, DslError> {
        let lhs = self.expr()?;
        self.expect("==")?;
        self.stop_at_newline = true;
        let rhs = self.expr();
        self.stop_at_newline = false;
        Ok(Identity::new(lhs, rhs?))
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("expression nested too deeply"));
        }
        let first = self.term()?;
        let mut terms = vec![(Sign::Plus, first)];
        loop {
            let sign = if self.continues("+") {
                Sign::Plus
            } else if self.continues("-") {
                Sign::Minus
            } else {
                break;
            };
            self.next();
            terms.push((sign, self.term()?));
        }
        self.depth -= 1;
        Ok(if terms.len() == 1 { terms.pop().unwrap().1 } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut fs = vec![self.factor()?];
        while self.continues("*") {
            self.next();
            fs.push(self.factor()?);
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Product(fs) })
    }

    fn factor(&mut self) -> Result<Expr, DslError> {
        let base = self.primary()?;
        if self.continues("^") {
            self.next();
            let t = self.peek().clone();
            let n = self.nat()?;
            if n > MAX_POWER as u64 {
                return Err(self.error_at(&t, format!("exponent exceeds {MAX_POWER}")));
            }
            return Ok(base.pow(n as u32));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, DslError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("expression nested too deeply"));
        }
        let t = self.peek().clone();
        let out = match &t.kind {
            Kind::Sym("-") => {
                self.next();
                -self.primary()?
            }
            Kind::Sym("(") => {
                self.next();
                self.paren_depth += 1;
                let e = self.expr()?;
                self.expect(")")?;
                self.paren_depth -= 1;
                e
            }
            Kind::Nat(_) => {
                let n = self.nat()?;
                let mut r = BigRational::from_integer(n.into());
                if self.continues("/") {
                    self.next();
                    let dt = self.peek().clone();
                    let d = self.nat()?;
                    if d == 0 {
                        return Err(self.error_at(&dt, "zero denominator"));
                    }
                    r = BigRational::new(n.into(), d.into());
                }
                Expr::Const(Const::Rational(r))
            }
            Kind::Ident(name) => {
                let name = name.clone();
                self.next();
                self.named(&name, &t)?
            }
            _ => return Err(self.error("expected an operand")),
        };
        self.depth -= 1;
        Ok(out)
    }

    fn named(&mut self, name: &str, t: &Token) -> Result<Expr, DslError> {
        Ok(match name {
            "theta" | "dtheta" => {
                self.expect("[")?;
                let eps = self.signed_rational()?;
                self.expect(",")?;
                let epsp = self.signed_rational()?;
                self.expect("]")?;
                let mut c = Characteristic::new(eps, epsp);
                if self.continues("(") {
                    self.next();
                    c = c.at_scale(self.positive_u32("scale")?);
                    self.expect(")")?;
                }
                if name == "theta" {
                    Expr::theta(c)
                } else {
                    Expr::dtheta(c)
                }
            }
            "eta" => {
                self.expect("(")?;
                let k = self.positive_u32("eta scale")?;
                self.expect(")")?;
                Expr::Atom(Atom::Eta(k))
            }
            "etaq" => {
                self.expect("{")?;
                let mut factors = Vec::new();
                loop {
                    self.expect("(")?;
                    let m = self.positive_u32("eta scale")?;
                    self.expect(",")?;
                    let et = self.peek().clone();
                    let e = i32::try_from(self.int()?).map_err(|_| self.error_at(&et, "exponent out of range"))?;
                    self.expect(")")?;
                    factors.push((m, e));
                    if self.at_sym(",") {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.expect(";")?;
                let pre = self.signed_rational()?;
                self.expect("}")?;
                Expr::Atom(Atom::EtaQ(EtaQuotientSpec::new(factors, pre)))
            }
            "farkasprod" => Expr::Atom(Atom::FarkasProd),
            "lambert" => {
                self.expect("(")?;
                let vt = self.peek().clone();
                let v = self.ident()?;
                let variant: LambertVariant = v.parse().map_err(|_| self.error_at(&vt, "unknown lambert variant"))?;
                self.expect(")")?;
                Expr::Atom(Atom::Lambert(variant))
            }
            "gf" => {
                self.expect("(")?;
                let vt = self.peek().clone();
                let v = self.ident()?;
                let kind = GfKind::from_name(&v).ok_or_else(|| self.error_at(&vt, "unknown generating function"))?;
                self.expect(")")?;
                Expr::Atom(Atom::Gf(kind))
            }
            "zeta" => {
                self.expect("(")?;
                let order = self.positive_u32("zeta order")?;
                self.expect(")")?;
                let power = if self.continues("^") {
                    self.next();
                    self.int()?
                } else {
                    1
                };
                Expr::Const(Const::Zeta { order, power })
            }
            "sqrt2" => Expr::Const(Const::Sqrt2),
            "sqrt3" => Expr::Const(Const::Sqrt3),
            "I" => Expr::Const(Const::I),
            _ => return Err(self.error_at(t, "unknown name")),
        })
    }
}

fn parser(src: &str) -> Result<Parser, DslError> {
    Ok(Parser {
        toks: lex(src)?,
        pos: 0,
        depth: 0,
        paren_depth: 0,
        stop_at_newline: false,
    })
}

/// Parses a single identity; trailing input is an error.
pub fn parse_identity(src: &str) -> Result<Identity, DslError> {
    let mut p = parser(src)?;
    let id = p.identity()?;
    if p.peek().kind != Kind::Eof {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(id)
}

/// Parses an expression without `==`.
pub fn parse_expr(src: &str) -> Result<Expr, DslError> {
    let mut p = parser(src)?;
    let e = p.expr()?;
    if p.peek().kind != Kind::Eof {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses every identity in a file, with the line each one starts on.
pub fn parse_file(src: &str) -> Result<Vec<(usize, Identity)>, DslError> {
    let mut p = parser(src)?;
    let mut out = Vec::new();
    while p.peek().kind != Kind::Eof {
        let line = p.peek().line;
        out.push((line, p.identity()?));
        if p.peek().kind != Kind::Eof && !p.peek().newline_before {
            return Err(p.error("expected a line break after the identity"));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElaborateError {
    #[error("the identity requires cyclotomic order {required}, above the supported {max}")]
    OrderTooLarge { required: u64, max: u32 },
    #[error("invalid eta quotient: {0}")]
    InvalidEtaQuotient(String),
    #[error("grading {given} is not a multiple of the required grading {required}")]
    Grading { required: u32, given: u32 },
}

/// An identity together with the grading and cyclotomic order it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Elaborated {
    pub identity: Identity,
    pub grading: u32,
    pub order: u32,
}

fn check_consts(e: &Expr) -> Result<(), ElaborateError> {
    match e {
        Expr::Const(Const::Zeta { order, .. }) if *order > UNIVERSAL_ORDER => Err(ElaborateError::OrderTooLarge {
            required: *order as u64,
            max: UNIVERSAL_ORDER,
        }),
        Expr::Atom(_) | Expr::Const(_) => Ok(()),
        Expr::Sum(ts) => ts.iter().try_for_each(|(_, t)| check_consts(t)),
        Expr::Product(fs) => fs.iter().try_for_each(check_consts),
        Expr::Pow(b, _) | Expr::Neg(b) => check_consts(b),
    }
}

/// Checks that the identity can be evaluated exactly and computes the
/// smallest grading and order covering all of its atoms and constants.
///
/// `grading`, when given, must be a multiple of the natural grading.
pub fn elaborate(identity: Identity, grading: Option<u32>) -> Result<Elaborated, ElaborateError> {
    check_consts(&identity.lhs)?;
    check_consts(&identity.rhs)?;
    let mut atoms = identity.lhs.atoms();
    atoms.extend(identity.rhs.atoms());
    for a in atoms {
        match a {
            Atom::Theta(c) | Atom::DTheta(c) => {
                // The phase order is at least the denominator of the second entry.
                let d = c.epsp.denom();
                if *d > UNIVERSAL_ORDER.into() {
                    return Err(ElaborateError::OrderTooLarge {
                        required: u64::try_from(d).unwrap_or(u64::MAX),
                        max: UNIVERSAL_ORDER,
                    });
                }
            }
            Atom::EtaQ(spec)
                if spec.factors.is_empty() => {
                    return Err(ElaborateError::InvalidEtaQuotient("no factors".into()));
                }
            _ => {}
        }
    }
    let order = identity.order();
    if order > UNIVERSAL_ORDER {
        return Err(ElaborateError::OrderTooLarge {
            required: order as u64,
            max: UNIVERSAL_ORDER,
        });
    }
    let natural = identity.natural_grading();
    let grading = match grading {
        None => natural,
        Some(g) if g != 0 && g % natural == 0 => g,
        Some(g) => return Err(ElaborateError::Grading { required: natural, given: g }),
    };
    Ok(Elaborated {
        identity,
        grading,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let src = "dtheta[1,1] == I * 1/2 * theta[0,0] * theta[1,0] * theta[0,1]";
        let id = parse_identity(src).unwrap();
        assert_eq!(id.to_string(), src);
        let src = "theta[1/4,-3/4](2)^2 - zeta(8)^-3 * etaq{(2,9),(1,-3); 1/8} + -(sqrt2 * gf(kron2)) == 0";
        let id = parse_identity(src).unwrap();
        assert_eq!(parse_identity(&id.to_string()).unwrap(), id);
    }

    #[test]
    fn error_positions() {
        let e = parse_identity("theta[1,1] ==\n  theta[1;2]").unwrap_err();
        assert_eq!((e.line, e.col), (2, 10));
        assert_eq!(e.token, "';'");
        let e = parse_identity("theta[1/0,1] == 0").unwrap_err();
        assert_eq!(e.message, "zero denominator");
        assert!(parse_identity("foo == 1").is_err());
        assert!(parse_identity("1 = 1").is_err());
        assert!(parse_identity(&"(".repeat(5000)).is_err());
    }

    #[test]
    fn files_split_on_lines() {
        let src = "# comment\ntheta[0,0] == theta[0,0]\n\ntheta[1,0] ==\n  theta[1,0] # x\n-theta[0,1] == -theta[0,1] +\n 0\n";
        let ids = parse_file(src).unwrap();
        assert_eq!(ids.len(), 3);
        assert_eq!(ids.iter().map(|(l, _)| *l).collect::<Vec<_>>(), vec![2, 4, 6]);
        assert!(parse_file("theta[0,0] == 1 theta[0,0] == 1").is_err());
        // A parenthesis on a fresh line opens the next identity rather than a
        // τ-scale for the theta that ended the previous one.
        let ids = parse_file("theta[0,0] == theta[0,0]\n(theta[1,0]) == theta[1,0]\n").unwrap();
        assert_eq!(ids.len(), 2);
        assert_eq!(ids[0].1.rhs, crate::expr::build::t00(1));
    }

    #[test]
    fn elaboration() {
        let id = parse_identity("theta[1/4,1/4]^2 == zeta(8)^5 * theta[3/4,3/2](2) * theta[1,0](2)").unwrap();
        let el = elaborate(id.clone(), None).unwrap();
        assert_eq!(el.grading, 64);
        assert_eq!(el.order, 64);
        assert!(elaborate(id.clone(), Some(576)).is_ok());
        assert!(matches!(elaborate(id, Some(100)), Err(ElaborateError::Grading { .. })));
        let big = parse_identity("theta[1/5,1/150] == 0").unwrap();
        assert!(matches!(elaborate(big, None), Err(ElaborateError::OrderTooLarge { required: 3000, .. })));
        let z = parse_identity("zeta(1000) == 0").unwrap();
        assert!(matches!(elaborate(z, None), Err(ElaborateError::OrderTooLarge { .. })));
    }
}
