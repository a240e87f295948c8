//! Arithmetic formulas over named parameters: the text form of ledger
//! mappings, call counts, query sizes and running-time bounds.
//!
//! Grammar (loosest to tightest):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary | unary)*      -- juxtaposition multiplies: 2n, 3n^c
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' sum (',' sum)* ')'
//!          | 'log' ('^' atom)? '(' sum ')' | '(' sum ')'
//! ```
//!
//! `log` is base 2. `ceil` and `floor` are built in; any other call is an
//! uninterpreted function of its arguments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;

use super::CalcError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Num(Rational64),
    Var(String),
    Neg(Box<Formula>),
    Add(Box<Formula>, Box<Formula>),
    Sub(Box<Formula>, Box<Formula>),
    Mul(Box<Formula>, Box<Formula>),
    Div(Box<Formula>, Box<Formula>),
    Pow(Box<Formula>, Box<Formula>),
    /// `log^power(arg)`
    Log {
        arg: Box<Formula>,
        power: Option<Box<Formula>>,
    },
    Ceil(Box<Formula>),
    Floor(Box<Formula>),
    Call(String, Vec<Formula>),
}

impl Formula {
    pub fn parse(text: &str) -> Result<Formula, CalcError> {
        let tokens = tokenize(text)?;
        let mut p = Parser {
            text,
            tokens,
            pos: 0,
        };
        let f = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(f)
    }

    /// Free variable names.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Num(_) => {}
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Neg(a) | Formula::Ceil(a) | Formula::Floor(a) => a.collect_vars(out),
            Formula::Add(a, b)
            | Formula::Sub(a, b)
            | Formula::Mul(a, b)
            | Formula::Div(a, b)
            | Formula::Pow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Log { arg, power } => {
                arg.collect_vars(out);
                if let Some(p) = power {
                    p.collect_vars(out);
                }
            }
            Formula::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Numeric value under `env`. Uninterpreted calls cannot be evaluated.
    pub fn eval(&self, env: &BTreeMap<String, f64>) -> Result<f64, CalcError> {
        Ok(match self {
            Formula::Num(q) => *q.numer() as f64 / *q.denom() as f64,
            Formula::Var(v) => *env.get(v).ok_or_else(|| CalcError::Unbound(v.clone()))?,
            Formula::Neg(a) => -a.eval(env)?,
            Formula::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Formula::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Formula::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Formula::Div(a, b) => a.eval(env)? / b.eval(env)?,
            Formula::Pow(a, b) => a.eval(env)?.powf(b.eval(env)?),
            Formula::Log { arg, power } => {
                let l = arg.eval(env)?.log2();
                match power {
                    Some(p) => l.powf(p.eval(env)?),
                    None => l,
                }
            }
            Formula::Ceil(a) => a.eval(env)?.ceil(),
            Formula::Floor(a) => a.eval(env)?.floor(),
            Formula::Call(name, _) => {
                return Err(CalcError::Unsupported(format!(
                    "cannot evaluate uninterpreted function `{name}`"
                )))
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Add(..) | Formula::Sub(..) => 1,
            Formula::Mul(..) | Formula::Div(..) => 2,
            Formula::Neg(_) => 3,
            Formula::Pow(..) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, child: &Formula, min: u8| {
            if child.precedence() < min {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        };
        match self {
            Formula::Num(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "({}/{})", q.numer(), q.denom())
                }
            }
            Formula::Var(v) => f.write_str(v),
            Formula::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, 4)
            }
            Formula::Add(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" + ")?;
                wrap(f, b, 2)
            }
            Formula::Sub(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" - ")?;
                wrap(f, b, 2)
            }
            Formula::Mul(a, b) => {
                wrap(f, a, 2)?;
                f.write_str(" * ")?;
                wrap(f, b, 3)
            }
            Formula::Div(a, b) => {
                wrap(f, a, 2)?;
                f.write_str(" / ")?;
                wrap(f, b, 3)
            }
            Formula::Pow(a, b) => {
                wrap(f, a, 5)?;
                f.write_str("^")?;
                wrap(f, b, 5)
            }
            Formula::Log { arg, power } => {
                f.write_str("log")?;
                if let Some(p) = power {
                    f.write_str("^")?;
                    wrap(f, p, 5)?;
                }
                write!(f, "({arg})")
            }
            Formula::Ceil(a) => write!(f, "ceil({a})"),
            Formula::Floor(a) => write!(f, "floor({a})"),
            Formula::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, CalcError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            let lexeme: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Num(parse_decimal(&lexeme).ok_or_else(|| syntax(text, pos, "bad number"))?)));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_' || chars[i].1 == '\'') {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|&(_, c)| c).collect())));
        } else if "+-*/^(),".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else if c == '·' || c == '×' {
            out.push((pos, Tok::Op('*')));
            i += 1;
        } else {
            return Err(syntax(text, pos, &format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

fn parse_decimal(s: &str) -> Option<Rational64> {
    match s.split_once('.') {
        None => s.parse().ok().map(Rational64::from_integer),
        Some((whole, frac)) => {
            if frac.is_empty() || frac.contains('.') || frac.len() > 12 {
                return None;
            }
            let scale = 10i64.pow(frac.len() as u32);
            let w: i64 = if whole.is_empty() { 0 } else { whole.parse().ok()? };
            let fr: i64 = frac.parse().ok()?;
            Some(Rational64::new(w * scale + fr, scale))
        }
    }
}

fn syntax(text: &str, pos: usize, message: &str) -> CalcError {
    CalcError::Syntax {
        input: text.to_string(),
        pos,
        message: message.to_string(),
    }
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn error(&self, message: &str) -> CalcError {
        let at = self.tokens.get(self.pos).map_or(self.text.len(), |(p, _)| *p);
        syntax(self.text, at, message)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), CalcError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{op}`")))
        }
    }

    fn sum(&mut self) -> Result<Formula, CalcError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Formula::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Formula::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Formula, CalcError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Formula::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = match (lhs, self.unary()?) {
                    // Fold numeric literals so rational constants round-trip.
                    (Formula::Num(a), Formula::Num(b)) if b != Rational64::from_integer(0) => Formula::Num(a / b),
                    (a, b) => Formula::Div(Box::new(a), Box::new(b)),
                };
            } else if matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Op('('))) {
                lhs = Formula::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Formula, CalcError> {
        if self.eat('-') {
            Ok(Formula::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Formula, CalcError> {
        let base = self.primary()?;
        if self.eat('^') {
            Ok(Formula::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Formula, CalcError> {
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Formula::Num(q))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "log" {
                    let power = if self.eat('^') {
                        Some(Box::new(self.log_power()?))
                    } else {
                        None
                    };
                    self.expect('(')?;
                    let arg = self.sum()?;
                    self.expect(')')?;
                    return Ok(Formula::Log {
                        arg: Box::new(arg),
                        power,
                    });
                }
                if !self.eat('(') {
                    return Ok(Formula::Var(name));
                }
                let mut args = vec![self.sum()?];
                while self.eat(',') {
                    args.push(self.sum()?);
                }
                self.expect(')')?;
                match (name.as_str(), args.len()) {
                    ("ceil", 1) => Ok(Formula::Ceil(Box::new(args.remove(0)))),
                    ("floor", 1) => Ok(Formula::Floor(Box::new(args.remove(0)))),
                    _ => Ok(Formula::Call(name, args)),
                }
            }
            _ => Err(self.error("expected a number, name or `(`")),
        }
    }

    fn log_power(&mut self) -> Result<Formula, CalcError> {
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Formula::Num(q))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::Var(name))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            _ => Err(self.error("expected a log exponent")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    #[test]
    fn evaluates_mappings() {
        let f = Formula::parse("2*n + d + 2").unwrap();
        assert_eq!(f.eval(&env(&[("n", 100.0), ("d", 8.0)])).unwrap(), 210.0);
        let f = Formula::parse("2^(n/k)").unwrap();
        assert_eq!(f.eval(&env(&[("n", 10.0), ("k", 2.0)])).unwrap(), 32.0);
        let f = Formula::parse("ceil(log(n))").unwrap();
        assert_eq!(f.eval(&env(&[("n", 1000.0)])).unwrap(), 10.0);
        let f = Formula::parse("2^ceil(n/2)").unwrap();
        assert_eq!(f.eval(&env(&[("n", 5.0)])).unwrap(), 8.0);
    }

    #[test]
    fn juxtaposition_multiplies() {
        let f = Formula::parse("3n^c").unwrap();
        assert_eq!(f.eval(&env(&[("n", 2.0), ("c", 3.0)])).unwrap(), 24.0);
        assert_eq!(Formula::parse("4n").unwrap().to_string(), "4 * n");
    }

    #[test]
    fn log_with_power() {
        let f = Formula::parse("log^(tw - 1)(n)").unwrap();
        assert_eq!(f.vars(), ["n", "tw"].iter().map(|s| s.to_string()).collect());
        assert_eq!(f.eval(&env(&[("n", 8.0), ("tw", 3.0)])).unwrap(), 9.0);
        assert_eq!(f.to_string(), "log^(tw - 1)(n)");
    }

    #[test]
    fn display_reparses() {
        for s in [
            "d^2 * (n + d) * log^d(n + d)",
            "n^2 + n^3 / n^(1/3)",
            "f(k1, k2) * n - 1",
            "-(a - b) * 2^(-1)",
            "0.25 * n",
        ] {
            let f = Formula::parse(s).unwrap();
            assert_eq!(Formula::parse(&f.to_string()).unwrap(), f, "{s}");
        }
    }

    #[test]
    fn syntax_errors() {
        assert!(Formula::parse("n +").is_err());
        assert!(Formula::parse("(n").is_err());
        assert!(Formula::parse("n $ 2").is_err());
        assert!(Formula::parse("").is_err());
        assert!(Formula::parse("1.2.3").is_err());
    }

    #[test]
    fn unbound_and_opaque_fail_to_evaluate() {
        assert!(matches!(Formula::parse("n + q").unwrap().eval(&env(&[("n", 1.0)])), Err(CalcError::Unbound(v)) if v == "q"));
        assert!(Formula::parse("f(k)").unwrap().eval(&env(&[("k", 1.0)])).is_err());
    }
}
