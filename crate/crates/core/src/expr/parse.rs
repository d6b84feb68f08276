//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | factor
//! factor   := atom ('^' exponent)*          right-associative
//! atom     := number | ident | '(' expr ')' | 'sqrt' '(' expr ')'
//!           | 'root' '(' integer ',' expr ')'
//! exponent := ['-'] integer | '(' ['-'] integer ['/' integer] ')'
//! number   := integer ['/' integer]
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{is_polynomial, normalize, RadicalExpr};
use crate::error::{Error, Result};
use crate::poly::{MultiPoly, Rational, Registry};

const TRANSCENDENTAL: &[&str] = &[
    "sin", "cos", "tan", "cot", "sec", "csc", "exp", "log", "ln", "sinh", "cosh", "tanh", "asin",
    "acos", "atan", "arcsin", "arccos", "arctan", "abs", "pow",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                return Err(parse_err(i, "decimal literals are not supported; write a fraction"));
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((start, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(parse_err(i, &format!("unexpected character '{}'", text[i..].chars().next().unwrap())));
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

fn parse_err(pos: usize, msg: &str) -> Error {
    Error::Parse {
        pos,
        msg: msg.to_string(),
    }
}

/// Parser configuration.
#[derive(Debug, Clone, Copy)]
pub struct Parser {
    /// Register unknown identifiers as new variables instead of failing.
    pub allow_new_vars: bool,
}

impl Default for Parser {
    fn default() -> Self {
        Parser {
            allow_new_vars: true,
        }
    }
}

impl Parser {
    pub fn parse(&self, text: &str, reg: &mut Registry) -> Result<RadicalExpr> {
        let toks = lex(text)?;
        let mut st = State {
            toks,
            i: 0,
            reg,
            cfg: *self,
        };
        let e = st.expr()?;
        match st.peek() {
            Tok::End => Ok(e),
            t => Err(parse_err(st.pos(), &format!("unexpected {}", describe(t)))),
        }
    }
}

/// Parse with unknown identifiers registered as variables.
pub fn parse(text: &str, reg: &mut Registry) -> Result<RadicalExpr> {
    Parser::default().parse(text, reg)
}

/// Parse text that must denote a polynomial (no roots, constant divisors).
pub fn parse_poly(text: &str, reg: &mut Registry) -> Result<MultiPoly> {
    let e = normalize(&parse(text, reg)?)?;
    is_polynomial(&e).ok_or_else(|| parse_err(0, &format!("not a polynomial: {text}")))
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number {n}"),
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

struct State<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    reg: &'a mut Registry,
    cfg: Parser,
}

impl State<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].1
    }

    fn pos(&self) -> usize {
        self.toks[self.i].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].1.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(parse_err(
                self.pos(),
                &format!("expected '{c}', found {}", describe(self.peek())),
            ))
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.bump() {
            Tok::Int(n) => Ok(n),
            t => {
                self.i -= 1;
                Err(parse_err(self.pos(), &format!("expected integer, found {}", describe(&t))))
            }
        }
    }

    fn expr(&mut self) -> Result<RadicalExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = RadicalExpr::add(acc, self.term()?);
            } else if self.eat('-') {
                acc = RadicalExpr::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RadicalExpr> {
        let mut acc = self.unary(true)?;
        loop {
            if self.eat('*') {
                acc = RadicalExpr::mul(acc, self.unary(true)?);
            } else if self.eat('/') {
                acc = RadicalExpr::div(acc, self.unary(false)?);
            } else {
                return Ok(acc);
            }
        }
    }

    // `fold` allows a literal fraction `n/d` to be read as one constant; it is
    // off right after '/', where left associativity must win.
    fn unary(&mut self, fold: bool) -> Result<RadicalExpr> {
        if self.eat('-') {
            return Ok(match self.unary(fold)? {
                RadicalExpr::Const(c) => RadicalExpr::Const(-c),
                e => RadicalExpr::mul(RadicalExpr::int(-1), e),
            });
        }
        self.factor(fold)
    }

    fn factor(&mut self, fold: bool) -> Result<RadicalExpr> {
        let base = self.atom(fold)?;
        if !self.eat('^') {
            return Ok(base);
        }
        let start = self.pos();
        let mut exps = vec![self.exponent()?];
        while self.eat('^') {
            exps.push(self.exponent()?);
        }
        let mut acc = exps.pop().unwrap();
        while let Some(e) = exps.pop() {
            if !acc.is_integer() {
                return Err(parse_err(start, "irrational exponents are out of scope"));
            }
            let k = acc
                .to_integer()
                .to_i32()
                .filter(|k| k.abs() <= 4096)
                .ok_or_else(|| parse_err(start, "exponent too large"))?;
            if e.is_zero() && k < 0 {
                return Err(parse_err(start, "zero raised to a negative power"));
            }
            acc = num_traits::pow::Pow::pow(&e, k);
        }
        Ok(RadicalExpr::pow(base, acc))
    }

    fn exponent(&mut self) -> Result<Rational> {
        if self.eat('(') {
            let neg = self.eat('-');
            let n = self.int()?;
            let d = if self.eat('/') { self.int()? } else { BigInt::one() };
            if d.is_zero() {
                return Err(parse_err(self.pos(), "zero denominator in exponent"));
            }
            self.expect(')')?;
            let q = Rational::new(n, d);
            return Ok(if neg { -q } else { q });
        }
        let neg = self.eat('-');
        match self.peek() {
            Tok::Int(_) => {
                let n = self.int()?;
                Ok(Rational::from_integer(if neg { -n } else { n }))
            }
            _ => Err(parse_err(
                self.pos(),
                "exponent must be a rational literal; irrational exponents are out of scope",
            )),
        }
    }

    fn atom(&mut self, fold: bool) -> Result<RadicalExpr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => {
                if fold
                    && *self.peek() == Tok::Sym('/')
                    && matches!(self.peek_at(1), Tok::Int(_))
                    && *self.peek_at(2) != Tok::Sym('^')
                {
                    self.bump();
                    let d = self.int()?;
                    if d.is_zero() {
                        return Err(parse_err(pos, "division by the literal zero"));
                    }
                    return Ok(RadicalExpr::Const(Rational::new(n, d)));
                }
                Ok(RadicalExpr::Const(Rational::from_integer(n)))
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) if name == "sqrt" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(RadicalExpr::sqrt(e))
            }
            Tok::Ident(name) if name == "root" => {
                self.expect('(')?;
                let rpos = self.pos();
                let r = self.int()?;
                let r = r
                    .to_u32()
                    .filter(|&r| r >= 1)
                    .ok_or_else(|| parse_err(rpos, "root index must be a positive integer"))?;
                self.expect(',')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(RadicalExpr::root(r, e))
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Sym('(') {
                    let msg = if TRANSCENDENTAL.contains(&name.as_str()) {
                        format!("transcendental function '{name}' is not supported; only radicals are")
                    } else {
                        format!("unknown function '{name}'")
                    };
                    return Err(parse_err(pos, &msg));
                }
                let v = if self.cfg.allow_new_vars {
                    self.reg.var(&name)
                } else {
                    self.reg
                        .lookup(&name)
                        .ok_or_else(|| parse_err(pos, &format!("unknown variable '{name}'")))?
                };
                Ok(RadicalExpr::Var(v))
            }
            t => Err(parse_err(pos, &format!("unexpected {}", describe(&t)))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};
    use RadicalExpr as E;

    #[test]
    fn spec_shapes() {
        let mut reg = Registry::new();
        let e = parse("sqrt(x)", &mut reg).unwrap();
        let x = E::Var(reg.lookup("x").unwrap());
        assert_eq!(e, E::root(2, x.clone()));
        let e = parse("x^(1/2) + x^(1/3)", &mut reg).unwrap();
        assert_eq!(
            e,
            E::add(E::pow(x.clone(), ratio(1, 2)), E::pow(x.clone(), ratio(1, 3)))
        );
        let e = parse("sqrt(x^2 + sqrt(y^2+1))", &mut reg).unwrap();
        let y = E::Var(reg.lookup("y").unwrap());
        assert_eq!(
            e,
            E::sqrt(E::add(
                E::pow(x.clone(), rat(2)),
                E::sqrt(E::add(E::pow(y, rat(2)), E::int(1)))
            ))
        );
    }

    #[test]
    fn precedence_and_signs() {
        let mut reg = Registry::new();
        let x = E::Var(reg.var("x"));
        assert_eq!(
            parse("-x^2", &mut reg).unwrap(),
            E::mul(E::int(-1), E::pow(x.clone(), rat(2)))
        );
        assert_eq!(parse("-3/4", &mut reg).unwrap(), E::Const(ratio(-3, 4)));
        assert_eq!(parse("x^2^3", &mut reg).unwrap(), E::pow(x.clone(), rat(8)));
        assert_eq!(parse("x^-2", &mut reg).unwrap(), E::pow(x.clone(), rat(-2)));
        assert_eq!(parse("x^(-1/2)", &mut reg).unwrap(), E::pow(x.clone(), ratio(-1, 2)));
        assert_eq!(
            parse("1 - x - 2", &mut reg).unwrap(),
            E::sub(E::sub(E::int(1), x.clone()), E::int(2))
        );
        assert_eq!(
            parse("x/2/3", &mut reg).unwrap(),
            E::div(E::div(x.clone(), E::int(2)), E::int(3))
        );
        assert_eq!(
            parse("2/3^2", &mut reg).unwrap(),
            E::div(E::int(2), E::pow(E::int(3), rat(2)))
        );
        assert_eq!(
            parse("x/2/y", &mut reg).unwrap(),
            E::div(E::div(x.clone(), E::int(2)), E::Var(reg.lookup("y").unwrap()))
        );
    }

    #[test]
    fn rejections() {
        let mut reg = Registry::new();
        for bad in ["sin(x)", "exp(x) + 1", "x^y", "x^(1/0)", "root(0, x)", "x +", "(x", "x $ y", "1.5*x", "foo(x)"] {
            assert!(
                matches!(parse(bad, &mut reg), Err(Error::Parse { .. })),
                "{bad} should be rejected"
            );
        }
        let msg = parse("sin(x)", &mut reg).unwrap_err().to_string();
        assert!(msg.contains("transcendental"), "{msg}");
        let strict = Parser {
            allow_new_vars: false,
        };
        assert!(strict.parse("w + 1", &mut reg).is_err());
        assert!(strict.parse("x + 1", &mut reg).is_ok());
    }

    #[test]
    fn polynomial_text() {
        let mut reg = Registry::with_vars(&["x", "z"]);
        let p = parse_poly("z^2 - 2*x*z + 1/2*x^2 - 1", &mut reg).unwrap();
        assert_eq!(p.to_text(&reg), "z^2 - 2*x*z + 1/2*x^2 - 1");
        assert!(parse_poly("sqrt(x)", &mut reg).is_err());
    }
}
