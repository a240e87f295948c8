//! Symbolic running-time expressions in a small asymptotic grammar.
//!
//! A [`RuntimeExpr`] is a sum of [`Monomial`]s; a monomial is a product of
//! [`Atom`]s over the size variable `n` and named parameters. Constant
//! coefficients are not represented: every expression stands for its
//! `O(·)` class. Dominance is uniform: `e2 = O(e1)` means one constant works
//! for all parameter values `>= 1` as `n` grows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use super::formula::Formula;
use super::CalcError;

pub type Q = Rational64;

/// Name the size variable is rendered and parsed as.
pub const SIZE_VAR: &str = "n";

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// `constant + Σ coeff·param`, used for exponents of logarithms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Affine {
    constant: Q,
    coeffs: BTreeMap<String, Q>,
}

impl Affine {
    pub fn constant(c: Q) -> Self {
        Affine {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn param(name: &str) -> Self {
        Affine {
            constant: Q::zero(),
            coeffs: [(name.to_string(), Q::one())].into(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        self.coeffs.is_empty().then_some(self.constant)
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(String::as_str)
    }

    pub fn add(&self, other: &Affine) -> Affine {
        let mut out = self.clone();
        out.constant += other.constant;
        for (k, v) in &other.coeffs {
            *out.coeffs.entry(k.clone()).or_insert_with(Q::zero) += *v;
        }
        out.coeffs.retain(|_, v| !v.is_zero());
        out
    }

    pub fn scale(&self, by: Q) -> Affine {
        if by.is_zero() {
            return Affine::default();
        }
        Affine {
            constant: self.constant * by,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), *v * by)).collect(),
        }
    }

    pub fn neg(&self) -> Affine {
        self.scale(-Q::one())
    }

    /// Nonnegative coefficients; the value only grows with the parameters.
    fn is_monotone(&self) -> bool {
        self.coeffs.values().all(|v| !v.is_negative())
    }

    /// Value with every parameter at its minimum of 1.
    fn min_value(&self) -> Q {
        self.constant + self.coeffs.values().copied().sum::<Q>()
    }

    /// `>= 0` for every parameter assignment with all parameters `>= 1`.
    pub fn uniformly_nonneg(&self) -> bool {
        self.is_monotone() && !self.min_value().is_negative()
    }

    fn substitute(&self, bind: &dyn Fn(&str) -> Result<Affine, CalcError>) -> Result<Affine, CalcError> {
        let mut out = Affine::constant(self.constant);
        for (k, v) in &self.coeffs {
            out = out.add(&bind(k)?.scale(*v));
        }
        Ok(out)
    }
}

fn fmt_q(f: &mut fmt::Formatter<'_>, v: Q) -> fmt::Result {
    if v.is_integer() {
        write!(f, "{}", v.numer())
    } else {
        write!(f, "{}/{}", v.numer(), v.denom())
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, &c) in &self.coeffs {
            let mag = c.abs();
            match (first, c.is_negative()) {
                (true, true) => f.write_str("-")?,
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
                (true, false) => {}
            }
            if !mag.is_one() {
                fmt_q(f, mag)?;
                f.write_str("*")?;
            }
            f.write_str(name)?;
            first = false;
        }
        let c = self.constant;
        if first {
            return fmt_q(f, c);
        }
        if !c.is_zero() {
            f.write_str(if c.is_negative() { " - " } else { " + " })?;
            fmt_q(f, c.abs())?;
        }
        Ok(())
    }
}

/// Writes an exponent so that the parser reads it back as one unit.
fn fmt_exponent(f: &mut fmt::Formatter<'_>, e: &Affine) -> fmt::Result {
    let simple = match e.as_constant() {
        Some(c) => c.is_integer() && !c.is_negative(),
        None => e.constant.is_zero() && e.coeffs.len() == 1 && e.coeffs.values().all(One::is_one),
    };
    if simple {
        write!(f, "{e}")
    } else {
        write!(f, "({e})")
    }
}

/// Factor kinds, declared in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `k^exp`
    ParamPoly { param: String, exp: Q },
    /// `2^(rate·n)`
    ExpLinN { rate: Q },
    /// `n^exp`
    PolyN { exp: Q },
    /// `log^exp n`
    PolyLogN { exp: Affine },
    /// `(base)^exp` for a sum of at least two terms
    SumPow { base: RuntimeExpr, exp: Q },
    /// `log^exp(base)`
    SumLog { base: RuntimeExpr, exp: Affine },
    /// Uninterpreted computable factor `name(args)`.
    Opaque { name: String, args: Vec<String> },
}

impl Atom {
    /// Atoms with equal keys merge by adding exponents.
    fn same_key(&self, other: &Atom) -> bool {
        match (self, other) {
            (Atom::ParamPoly { param: a, .. }, Atom::ParamPoly { param: b, .. }) => a == b,
            (Atom::ExpLinN { .. }, Atom::ExpLinN { .. })
            | (Atom::PolyN { .. }, Atom::PolyN { .. })
            | (Atom::PolyLogN { .. }, Atom::PolyLogN { .. }) => true,
            (Atom::SumPow { base: a, .. }, Atom::SumPow { base: b, .. })
            | (Atom::SumLog { base: a, .. }, Atom::SumLog { base: b, .. }) => a == b,
            _ => false,
        }
    }

    fn is_trivial(&self) -> bool {
        match self {
            Atom::ParamPoly { exp, .. } | Atom::PolyN { exp } | Atom::SumPow { exp, .. } => exp.is_zero(),
            Atom::ExpLinN { rate } => rate.is_zero(),
            Atom::PolyLogN { exp } | Atom::SumLog { exp, .. } => exp.is_zero(),
            Atom::Opaque { .. } => false,
        }
    }

    fn depends_on_n(&self) -> bool {
        match self {
            Atom::ParamPoly { .. } | Atom::Opaque { .. } => false,
            Atom::ExpLinN { .. } | Atom::PolyN { .. } | Atom::PolyLogN { .. } => true,
            Atom::SumPow { base, .. } | Atom::SumLog { base, .. } => base.depends_on_n(),
        }
    }

    fn params(&self, out: &mut BTreeSet<String>) {
        match self {
            Atom::ParamPoly { param, .. } => {
                out.insert(param.clone());
            }
            Atom::ExpLinN { .. } | Atom::PolyN { .. } => {}
            Atom::PolyLogN { exp } => out.extend(exp.params().map(String::from)),
            Atom::SumPow { base, .. } => out.extend(base.params()),
            Atom::SumLog { base, exp } => {
                out.extend(base.params());
                out.extend(exp.params().map(String::from));
            }
            Atom::Opaque { args, .. } => out.extend(args.iter().cloned()),
        }
    }

    fn merge(&mut self, other: Atom) {
        match (self, other) {
            (Atom::ParamPoly { exp, .. }, Atom::ParamPoly { exp: e, .. })
            | (Atom::PolyN { exp }, Atom::PolyN { exp: e })
            | (Atom::SumPow { exp, .. }, Atom::SumPow { exp: e, .. }) => *exp += e,
            (Atom::ExpLinN { rate }, Atom::ExpLinN { rate: r }) => *rate += r,
            (Atom::PolyLogN { exp }, Atom::PolyLogN { exp: e }) | (Atom::SumLog { exp, .. }, Atom::SumLog { exp: e, .. }) => {
                *exp = exp.add(&e)
            }
            _ => unreachable!("merge called on atoms with different keys"),
        }
    }

    fn pow(&self, by: Q) -> Result<Vec<Atom>, CalcError> {
        Ok(vec![match self {
            Atom::ParamPoly { param, exp } => Atom::ParamPoly {
                param: param.clone(),
                exp: *exp * by,
            },
            Atom::ExpLinN { rate } => Atom::ExpLinN { rate: *rate * by },
            Atom::PolyN { exp } => Atom::PolyN { exp: *exp * by },
            Atom::PolyLogN { exp } => Atom::PolyLogN { exp: exp.scale(by) },
            Atom::SumPow { base, exp } => Atom::SumPow {
                base: base.clone(),
                exp: *exp * by,
            },
            Atom::SumLog { base, exp } => Atom::SumLog {
                base: base.clone(),
                exp: exp.scale(by),
            },
            Atom::Opaque { .. } => {
                if !by.is_integer() || by.is_negative() {
                    return Err(CalcError::Unsupported(format!("non-integer power {by} of {self}")));
                }
                return Ok(vec![self.clone(); by.to_integer() as usize]);
            }
        }])
    }
}

fn fmt_power(f: &mut fmt::Formatter<'_>, exp: Q) -> fmt::Result {
    if exp.is_one() {
        Ok(())
    } else if exp.is_integer() && exp.is_positive() {
        write!(f, "^{}", exp.numer())
    } else {
        f.write_str("^(")?;
        fmt_q(f, exp)?;
        f.write_str(")")
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::ParamPoly { param, exp } => {
                f.write_str(param)?;
                fmt_power(f, *exp)
            }
            Atom::ExpLinN { rate } => {
                let (p, d) = (*rate.numer(), *rate.denom());
                match (p, d) {
                    (1, 1) => f.write_str("2^n"),
                    (1, d) => write!(f, "2^(n/{d})"),
                    (p, 1) => write!(f, "2^({p}*n)"),
                    (p, d) => write!(f, "2^({p}*n/{d})"),
                }
            }
            Atom::PolyN { exp } => {
                f.write_str(SIZE_VAR)?;
                fmt_power(f, *exp)
            }
            Atom::PolyLogN { exp } => {
                f.write_str("log")?;
                if *exp != Affine::constant(Q::one()) {
                    f.write_str("^")?;
                    fmt_exponent(f, exp)?;
                }
                write!(f, "({SIZE_VAR})")
            }
            Atom::SumPow { base, exp } => {
                write!(f, "({base})")?;
                fmt_power(f, *exp)
            }
            Atom::SumLog { base, exp } => {
                f.write_str("log")?;
                if *exp != Affine::constant(Q::one()) {
                    f.write_str("^")?;
                    fmt_exponent(f, exp)?;
                }
                write!(f, "({base})")
            }
            Atom::Opaque { name, args } => write!(f, "{name}({})", args.join(", ")),
        }
    }
}

/// A product of atoms; the empty product is the constant 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    atoms: Vec<Atom>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn depends_on_n(&self) -> bool {
        self.atoms.iter().any(Atom::depends_on_n)
    }

    fn from_atoms(atoms: Vec<Atom>) -> Monomial {
        let mut m = Monomial::one();
        for a in atoms {
            m.push(a);
        }
        m.atoms.retain(|a| !a.is_trivial());
        m.atoms.sort();
        m
    }

    /// Multiplies in one atom, collapsing single-term sums.
    fn push(&mut self, atom: Atom) {
        match atom {
            Atom::SumPow { base, exp } if base.terms.len() <= 1 => {
                if let Some(term) = base.terms.into_iter().next() {
                    for a in term.pow(exp).expect("monomial power of canonical term") {
                        self.push(a);
                    }
                } else if !exp.is_zero() {
                    // 0^exp: the whole product is dominated by anything; keep it as 1.
                }
            }
            Atom::SumLog { base, exp } if base.terms.len() == 1 => {
                match log_of_term(&base.terms[0], &exp) {
                    Some(atoms) => atoms.into_iter().for_each(|a| self.push(a)),
                    None => self.push_raw(Atom::SumLog { base, exp }),
                }
            }
            other => self.push_raw(other),
        }
    }

    fn push_raw(&mut self, atom: Atom) {
        if let Some(slot) = self.atoms.iter_mut().find(|a| a.same_key(&atom)) {
            slot.merge(atom);
        } else {
            self.atoms.push(atom);
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_atoms(self.atoms.iter().chain(&other.atoms).cloned().collect())
    }

    pub fn pow(&self, by: Q) -> Result<Vec<Atom>, CalcError> {
        let mut out = Vec::new();
        for a in &self.atoms {
            out.extend(a.pow(by)?);
        }
        Ok(out)
    }

    fn params(&self, out: &mut BTreeSet<String>) {
        self.atoms.iter().for_each(|a| a.params(out));
    }

    fn sort_key(&self) -> (bool, &Monomial) {
        (!self.depends_on_n(), self)
    }
}

/// `log^exp` of a single term, when it reduces to simpler atoms.
fn log_of_term(term: &Monomial, exp: &Affine) -> Option<Vec<Atom>> {
    match term.atoms.as_slice() {
        [Atom::PolyN { exp: c }] if c.is_one() || (exp.as_constant().is_some() && c.is_positive()) => {
            Some(vec![Atom::PolyLogN { exp: exp.clone() }])
        }
        [Atom::ExpLinN { rate }] if rate.is_positive() => {
            exp.as_constant().map(|e| vec![Atom::PolyN { exp: e }])
        }
        _ => None,
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("1");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// A sum of monomials in canonical form: dominated terms absorbed, the rest
/// sorted with size-dependent terms first. The empty sum is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuntimeExpr {
    terms: Vec<Monomial>,
}

impl RuntimeExpr {
    pub fn zero() -> Self {
        RuntimeExpr::default()
    }

    pub fn one() -> Self {
        RuntimeExpr::from_monomial(Monomial::one())
    }

    pub fn n() -> Self {
        RuntimeExpr::atom(Atom::PolyN { exp: Q::one() })
    }

    pub fn param(name: &str) -> Self {
        RuntimeExpr::atom(Atom::ParamPoly {
            param: name.to_string(),
            exp: Q::one(),
        })
    }

    pub fn atom(a: Atom) -> Self {
        RuntimeExpr::from_monomial(Monomial::from_atoms(vec![a]))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        RuntimeExpr { terms: vec![m] }
    }

    pub fn from_terms(terms: Vec<Monomial>) -> Self {
        RuntimeExpr::canonical(terms)
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn depends_on_n(&self) -> bool {
        self.terms.iter().any(Monomial::depends_on_n)
    }

    /// Parameter names appearing anywhere, including exponents.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.terms.iter().for_each(|t| t.params(&mut out));
        out
    }

    /// Parses a formula with `n` as the size variable and every other name a
    /// parameter.
    pub fn parse(text: &str) -> Result<RuntimeExpr, CalcError> {
        RuntimeExpr::from_formula(&Formula::parse(text)?, &Scope::default())
    }

    fn canonical(terms: Vec<Monomial>) -> RuntimeExpr {
        let mut terms: Vec<Monomial> = terms
            .into_iter()
            .map(|t| Monomial::from_atoms(t.atoms))
            .flat_map(|t| match t.atoms.as_slice() {
                // A lone `(sum)^1` is the sum itself.
                [Atom::SumPow { base, exp }] if exp.is_one() => base.terms.clone(),
                _ => vec![t],
            })
            .collect();
        terms.sort();
        terms.dedup();
        // Drop every term that another surviving term dominates.
        let mut keep = vec![true; terms.len()];
        for i in 0..terms.len() {
            for j in 0..terms.len() {
                if i != j && keep[i] && keep[j] && covers(&terms[i], &terms[j]) {
                    keep[j] = false;
                }
            }
        }
        let mut out: Vec<Monomial> = terms.into_iter().zip(keep).filter_map(|(t, k)| k.then_some(t)).collect();
        out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        RuntimeExpr { terms: out }
    }

    pub fn canonicalize(&self) -> RuntimeExpr {
        RuntimeExpr::canonical(self.terms.clone())
    }

    pub fn add(&self, other: &RuntimeExpr) -> RuntimeExpr {
        RuntimeExpr::canonical(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    fn as_factor(&self) -> Vec<Atom> {
        match self.terms.as_slice() {
            [single] => single.atoms.clone(),
            _ => vec![Atom::SumPow {
                base: self.clone(),
                exp: Q::one(),
            }],
        }
    }

    pub fn mul(&self, other: &RuntimeExpr) -> RuntimeExpr {
        if self.is_zero() || other.is_zero() {
            return RuntimeExpr::zero();
        }
        let mut atoms = self.as_factor();
        atoms.extend(other.as_factor());
        RuntimeExpr::canonical(vec![Monomial::from_atoms(atoms)])
    }

    pub fn pow(&self, by: Q) -> Result<RuntimeExpr, CalcError> {
        if by.is_zero() {
            return Ok(RuntimeExpr::one());
        }
        match self.terms.as_slice() {
            [] if by.is_positive() => Ok(RuntimeExpr::zero()),
            [] => Err(CalcError::Unsupported("negative power of zero".into())),
            [single] => Ok(RuntimeExpr::from_monomial(Monomial::from_atoms(single.pow(by)?))),
            _ if by.is_one() => Ok(self.clone()),
            _ => Ok(RuntimeExpr::atom(Atom::SumPow {
                base: self.clone(),
                exp: by,
            })),
        }
    }

    /// `log^exp(self)`
    pub fn log(&self, exp: Affine) -> Result<RuntimeExpr, CalcError> {
        if self.is_zero() {
            return Err(CalcError::Unsupported("logarithm of zero".into()));
        }
        if exp.is_zero() {
            return Ok(RuntimeExpr::one());
        }
        Ok(RuntimeExpr::atom(Atom::SumLog {
            base: self.clone(),
            exp,
        }))
    }

    /// Converts a formula. Constants of `scope` are folded in, the size name
    /// becomes `n`, and remaining names become parameters.
    pub fn from_formula(f: &Formula, scope: &Scope) -> Result<RuntimeExpr, CalcError> {
        let unsupported = || CalcError::Unsupported(format!("`{f}` is outside the bound grammar"));
        Ok(match f {
            Formula::Num(v) if v.is_positive() => RuntimeExpr::one(),
            Formula::Num(v) if v.is_zero() => RuntimeExpr::zero(),
            Formula::Num(_) => return Err(unsupported()),
            Formula::Var(name) => match scope.constants.get(name) {
                Some(v) => RuntimeExpr::from_formula(&Formula::Num(*v), scope)?,
                None if name == scope.size() => RuntimeExpr::n(),
                None => RuntimeExpr::param(name),
            },
            Formula::Neg(_) => return Err(unsupported()),
            Formula::Add(a, b) => RuntimeExpr::from_formula(a, scope)?.add(&RuntimeExpr::from_formula(b, scope)?),
            Formula::Sub(a, b) => {
                // a - b is O(a) when b is a constant or dominated by a.
                let a = RuntimeExpr::from_formula(a, scope)?;
                let b = RuntimeExpr::from_formula(b, scope)?;
                if b.is_zero() || b == RuntimeExpr::one() || dominates(&a, &b) {
                    a
                } else {
                    return Err(unsupported());
                }
            }
            Formula::Mul(a, b) => RuntimeExpr::from_formula(a, scope)?.mul(&RuntimeExpr::from_formula(b, scope)?),
            Formula::Div(a, b) => {
                let a = RuntimeExpr::from_formula(a, scope)?;
                let b = RuntimeExpr::from_formula(b, scope)?;
                if b.terms.len() != 1 {
                    return Err(unsupported());
                }
                a.mul(&b.pow(-Q::one())?)
            }
            Formula::Pow(base, exp) => {
                let e = to_affine(exp, scope, true)?;
                if let Some(c) = e.as_constant() {
                    RuntimeExpr::from_formula(base, scope)?.pow(c)?
                } else if matches!(**base, Formula::Num(two) if two == q(2))
                    && e.coeffs.keys().all(|k| k == SIZE_VAR)
                {
                    let rate = e.coeffs[SIZE_VAR];
                    if !rate.is_positive() {
                        return Err(unsupported());
                    }
                    RuntimeExpr::atom(Atom::ExpLinN { rate })
                } else {
                    return Err(unsupported());
                }
            }
            Formula::Log { arg, power } => {
                let exp = match power {
                    Some(p) => to_affine(p, scope, false)?,
                    None => Affine::constant(Q::one()),
                };
                RuntimeExpr::from_formula(arg, scope)?.log(exp)?.canonicalize()
            }
            Formula::Ceil(a) | Formula::Floor(a) => RuntimeExpr::from_formula(a, scope)?,
            Formula::Call(name, args) => {
                let mut names = Vec::with_capacity(args.len());
                for a in args {
                    match a {
                        Formula::Var(v) if v != scope.size() && !scope.constants.contains_key(v) => names.push(v.clone()),
                        _ => return Err(unsupported()),
                    }
                }
                RuntimeExpr::atom(Atom::Opaque {
                    name: name.clone(),
                    args: names,
                })
            }
        })
    }

    /// Replaces `n` by `size` and every parameter by its binding.
    pub fn substitute(&self, size: &RuntimeExpr, bind: &dyn Fn(&str) -> Result<Binding, CalcError>) -> Result<RuntimeExpr, CalcError> {
        let mut out = RuntimeExpr::zero();
        for term in &self.terms {
            let mut prod = RuntimeExpr::one();
            for atom in &term.atoms {
                let factor = substitute_atom(atom, size, bind)?;
                prod = prod.mul(&factor);
            }
            out = out.add(&prod);
        }
        Ok(out)
    }
}

impl fmt::Display for RuntimeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Image of one target parameter under a reduction's parameter map.
#[derive(Clone, Debug)]
pub struct Binding {
    pub expr: RuntimeExpr,
    /// Exact affine form, when the mapping is affine; needed where the
    /// parameter sits in an exponent.
    pub affine: Option<Affine>,
    pub support: BTreeSet<String>,
    pub is_identity: bool,
}

fn substitute_atom(atom: &Atom, size: &RuntimeExpr, bind: &dyn Fn(&str) -> Result<Binding, CalcError>) -> Result<RuntimeExpr, CalcError> {
    let exponent = |e: &Affine| -> Result<Affine, CalcError> {
        e.substitute(&|p| {
            bind(p)?.affine.ok_or_else(|| {
                CalcError::Unsupported(format!("parameter `{p}` appears in an exponent but maps to a non-affine expression"))
            })
        })
    };
    match atom {
        Atom::ParamPoly { param, exp } => bind(param)?.expr.pow(*exp),
        Atom::ExpLinN { rate } => {
            if *size == RuntimeExpr::n() {
                Ok(RuntimeExpr::atom(atom.clone()))
            } else {
                Err(CalcError::Unsupported(format!("cannot substitute size `{size}` into 2^({rate}*n)")))
            }
        }
        Atom::PolyN { exp } => size.pow(*exp),
        Atom::PolyLogN { exp } => Ok(size.log(exponent(exp)?)?.canonicalize()),
        Atom::SumPow { base, exp } => base.substitute(size, bind)?.pow(*exp),
        Atom::SumLog { base, exp } => Ok(base.substitute(size, bind)?.log(exponent(exp)?)?.canonicalize()),
        Atom::Opaque { name, args } => {
            let mut support = BTreeSet::new();
            let mut identity = true;
            for a in args {
                let b = bind(a)?;
                identity &= b.is_identity;
                support.extend(b.support);
            }
            Ok(RuntimeExpr::atom(Atom::Opaque {
                name: if identity { name.clone() } else { format!("{name}'") },
                args: support.into_iter().collect(),
            }))
        }
    }
}

/// Names with fixed values, plus the name of the size variable.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub size: Option<String>,
    pub constants: BTreeMap<String, Q>,
}

impl Scope {
    pub fn size(&self) -> &str {
        self.size.as_deref().unwrap_or(SIZE_VAR)
    }
}

/// Affine form of a formula; `allow_size` admits the size variable as an
/// affine name (for `2^(n/k)`).
pub fn to_affine(f: &Formula, scope: &Scope, allow_size: bool) -> Result<Affine, CalcError> {
    let unsupported = || CalcError::Unsupported(format!("exponent `{f}` is not affine in the parameters"));
    Ok(match f {
        Formula::Num(v) => Affine::constant(*v),
        Formula::Var(name) => match scope.constants.get(name) {
            Some(v) => Affine::constant(*v),
            None if name == scope.size() => {
                if !allow_size {
                    return Err(unsupported());
                }
                Affine::param(SIZE_VAR)
            }
            None => Affine::param(name),
        },
        Formula::Neg(a) => to_affine(a, scope, allow_size)?.neg(),
        Formula::Add(a, b) => to_affine(a, scope, allow_size)?.add(&to_affine(b, scope, allow_size)?),
        Formula::Sub(a, b) => to_affine(a, scope, allow_size)?.add(&to_affine(b, scope, allow_size)?.neg()),
        Formula::Mul(a, b) => {
            let (a, b) = (to_affine(a, scope, allow_size)?, to_affine(b, scope, allow_size)?);
            match (a.as_constant(), b.as_constant()) {
                (Some(c), _) => b.scale(c),
                (_, Some(c)) => a.scale(c),
                _ => return Err(unsupported()),
            }
        }
        Formula::Div(a, b) => {
            let a = to_affine(a, scope, allow_size)?;
            match to_affine(b, scope, allow_size)?.as_constant() {
                Some(c) if !c.is_zero() => a.scale(c.recip()),
                _ => return Err(unsupported()),
            }
        }
        _ => return Err(unsupported()),
    })
}

/// Result of an asymptotic comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Dominates,
    Dominated,
    Equal,
    Incomparable,
}

/// Uniform asymptotic comparison, `n → ∞` with parameters held at any fixed
/// values `>= 1`. `Equal` covers identical canonical forms and pairs that
/// bound each other; `Incomparable` means the grammar cannot decide.
pub fn expr_compare(e1: &RuntimeExpr, e2: &RuntimeExpr) -> Comparison {
    if e1 == e2 {
        return Comparison::Equal;
    }
    match (dominates(e1, e2), dominates(e2, e1)) {
        (true, true) => Comparison::Equal,
        (true, false) => Comparison::Dominates,
        (false, true) => Comparison::Dominated,
        (false, false) => Comparison::Incomparable,
    }
}

/// `e2 = O(e1)`: each term of `e2` is bounded by some term of `e1`.
pub fn dominates(e1: &RuntimeExpr, e2: &RuntimeExpr) -> bool {
    e2.terms.iter().all(|t2| e1.terms.iter().any(|t1| covers(t1, t2)))
}

/// `m2 = O(m1)` uniformly. Sound, not complete.
fn covers(m1: &Monomial, m2: &Monomial) -> bool {
    let (pos, neg) = cancel(&m1.atoms, &m2.atoms);
    residual_covers(pos, neg)
}

/// Splits `m1 / m2` into numerator and denominator atoms with common
/// factors divided out.
fn cancel(m1: &[Atom], m2: &[Atom]) -> (Vec<Atom>, Vec<Atom>) {
    let mut pos = Vec::new();
    let mut neg: Vec<Option<Atom>> = m2.iter().cloned().map(Some).collect();
    for a in m1 {
        let hit = neg.iter_mut().find(|b| match b {
            Some(b) => match (a, b) {
                (Atom::Opaque { .. }, Atom::Opaque { .. }) => a == b,
                _ => a.same_key(b),
            },
            None => false,
        });
        let Some(slot) = hit else {
            pos.push(a.clone());
            continue;
        };
        let b = slot.take().expect("matched slot");
        match (a, b) {
            (Atom::Opaque { .. }, _) => {}
            (Atom::PolyLogN { exp: ea }, Atom::PolyLogN { exp: eb }) => split_affine(ea.add(&eb.neg()), |e| Atom::PolyLogN { exp: e }, &mut pos, &mut neg),
            (Atom::SumLog { base, exp: ea }, Atom::SumLog { exp: eb, .. }) => {
                let base = base.clone();
                split_affine(ea.add(&eb.neg()), move |e| Atom::SumLog { base: base.clone(), exp: e }, &mut pos, &mut neg)
            }
            (a, b) => {
                let mut diff = a.clone();
                diff.merge(b.pow(-Q::one()).expect("non-opaque").remove(0));
                if !diff.is_trivial() {
                    pos.push(diff);
                }
            }
        }
    }
    (pos, neg.into_iter().flatten().collect())
}

fn split_affine(diff: Affine, make: impl Fn(Affine) -> Atom, pos: &mut Vec<Atom>, neg: &mut Vec<Option<Atom>>) {
    if diff.is_zero() {
        return;
    }
    if diff.uniformly_nonneg() || !diff.neg().uniformly_nonneg() {
        pos.push(make(diff));
    } else {
        neg.push(Some(make(diff.neg())));
    }
}

fn residual_covers(mut pos: Vec<Atom>, mut neg: Vec<Atom>) -> bool {
    // Normalize: a sum power with negative exponent belongs on the other side.
    let flip = |from: &mut Vec<Atom>, to: &mut Vec<Atom>| {
        let mut i = 0;
        while i < from.len() {
            if matches!(&from[i], Atom::SumPow { exp, .. } if exp.is_negative()) {
                let a = from.remove(i);
                to.extend(a.pow(-Q::one()).expect("sum power"));
            } else {
                i += 1;
            }
        }
    };
    flip(&mut pos, &mut neg);
    flip(&mut neg, &mut pos);

    if neg.iter().any(|a| matches!(a, Atom::Opaque { .. } | Atom::SumLog { .. }))
        || pos.iter().any(|a| matches!(a, Atom::Opaque { .. }))
    {
        return false;
    }

    // (t1 + t2 + ...)^c in the denominator is at most a constant times max t_i^c.
    if let Some(i) = neg.iter().position(|a| matches!(a, Atom::SumPow { .. })) {
        let Atom::SumPow { base, exp } = neg.remove(i) else { unreachable!() };
        return base.terms.iter().all(|t| {
            let mut n2 = neg.clone();
            n2.extend(t.pow(exp).expect("canonical term"));
            let (p, n) = cancel(&pos, &Monomial::from_atoms(n2).atoms);
            residual_covers(p, n)
        });
    }

    // In the numerator a sum power is at least any one of its terms.
    if let Some(i) = pos.iter().position(|a| matches!(a, Atom::SumPow { .. })) {
        let Atom::SumPow { base, exp } = pos.remove(i) else { unreachable!() };
        return base.terms.iter().any(|t| {
            let mut p2 = pos.clone();
            p2.extend(t.pow(exp).expect("canonical term"));
            let (p, n) = cancel(&Monomial::from_atoms(p2).atoms, &neg);
            residual_covers(p, n)
        });
    }

    if let Some(i) = pos.iter().position(|a| matches!(a, Atom::SumLog { .. })) {
        let Atom::SumLog { base, exp } = pos.remove(i) else { unreachable!() };
        if !exp.uniformly_nonneg() {
            return false;
        }
        let mut options: Vec<Vec<Atom>> = Vec::new();
        for t in &base.terms {
            match t.atoms.as_slice() {
                [Atom::PolyN { exp: c }] if *c >= Q::one() => options.push(vec![Atom::PolyLogN { exp: exp.clone() }]),
                [Atom::ExpLinN { rate }] if rate.is_positive() => {
                    if let Some(e) = exp.as_constant() {
                        options.push(vec![Atom::PolyN { exp: e }]);
                    }
                }
                _ => {}
            }
        }
        // log(base) >= 1 eventually once base grows with n.
        if base.depends_on_n() {
            options.push(Vec::new());
        }
        return options.into_iter().any(|extra| {
            let mut p2 = pos.clone();
            p2.extend(extra);
            let (p, n) = cancel(&Monomial::from_atoms(p2).atoms, &neg);
            residual_covers(p, n)
        });
    }

    simple_covers(&pos, &neg)
}

/// Both sides hold only parameter powers, `2^(rn)`, `n^c` and `log^e n`.
fn simple_covers(pos: &[Atom], neg: &[Atom]) -> bool {
    let mut param_exp: BTreeMap<&str, Q> = BTreeMap::new();
    let (mut rate, mut poly, mut log) = (Q::zero(), Q::zero(), Affine::default());
    for (atoms, sign) in [(pos, Q::one()), (neg, -Q::one())] {
        for a in atoms {
            match a {
                Atom::ParamPoly { param, exp } => *param_exp.entry(param).or_insert_with(Q::zero) += *exp * sign,
                Atom::ExpLinN { rate: r } => rate += *r * sign,
                Atom::PolyN { exp } => poly += *exp * sign,
                Atom::PolyLogN { exp } => log = log.add(&exp.scale(sign)),
                _ => return false,
            }
        }
    }
    if param_exp.values().any(|e| e.is_negative()) || !log.is_monotone() {
        return false;
    }
    // log^e n >= log^{e_min} n once log n >= 1; the rest is lexicographic.
    (rate, poly, log.min_value()) >= (Q::zero(), Q::zero(), Q::zero())
}
