//! First-order formulas in the language of groups, evaluated by exhaustive
//! quantifier enumeration over a [`GroupTable`].
//!
//! Grammar (ASCII):
//!
//! ```text
//! φ := forall v. φ | exists v. φ | φ -> φ | φ "|" φ | φ & φ | !φ | (φ)
//!    | t = t | in_gcl_pow(t, N, t)
//! t := 1 | name | t*t | t^-1 | (t)
//! ```
//!
//! `->` is right-associative and binds loosest, then `|`, then `&`; a
//! quantifier body extends as far right as possible. Names not bound by a
//! quantifier are constants, resolved when the formula is evaluated.

use crate::elementset::ElementSet;
use crate::error::{Error, Result};
use crate::gclsets::gcl_power;
use crate::interpretation::RingEncoding;
use crate::matgroups::{index_of_mat, perm_conjugator, GroupTable};
use crate::rings::maximal_ideals;
use rand::Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;
use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// A name with its source span; spans are ignored by equality.
#[derive(Clone, Debug, Eq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Name {
    pub fn new(text: impl Into<String>) -> Self {
        Name { text: text.into(), span: Span::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    /// Bound by an enclosing quantifier.
    Variable(Name),
    /// Free; resolved in the evaluation environment.
    Constant(Name),
    Identity,
    Product(Box<Term>, Box<Term>),
    Inverse(Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Equal(Term, Term),
    /// `x ∈ gcl(α)^N`.
    InGclPow(Term, usize, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Name, Box<Formula>),
    Exists(Name, Box<Formula>),
}

impl Term {
    pub fn var(v: &str) -> Term {
        Term::Variable(Name::new(v))
    }

    pub fn cons(c: &str) -> Term {
        Term::Constant(Name::new(c))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Product(Box::new(a), Box::new(b))
    }

    pub fn inv(a: Term) -> Term {
        Term::Inverse(Box::new(a))
    }

    fn names(&self, bound: &[&str], out: &mut BTreeSet<String>) {
        match self {
            Term::Variable(n) | Term::Constant(n) => {
                if !bound.contains(&n.text.as_str()) {
                    out.insert(n.text.clone());
                }
            }
            Term::Product(a, b) => {
                a.names(bound, out);
                b.names(bound, out);
            }
            Term::Inverse(a) => a.names(bound, out),
            Term::Identity => {}
        }
    }
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(Name::new(v), Box::new(f))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(Name::new(v), Box::new(f))
    }

    /// Names not bound by an enclosing quantifier (constants and free
    /// variables).
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Equal(a, b) | Formula::InGclPow(a, _, b) => {
                a.names(bound, out);
                b.names(bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(&v.text);
                f.collect_free(bound, out);
                bound.pop();
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Equal(..) | Formula::InGclPow(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
        }
    }

    fn first_span_of(&self, name: &str) -> Option<Span> {
        fn in_term(t: &Term, name: &str) -> Option<Span> {
            match t {
                Term::Constant(n) if n.text == name => Some(n.span),
                Term::Product(a, b) => in_term(a, name).or_else(|| in_term(b, name)),
                Term::Inverse(a) => in_term(a, name),
                _ => None,
            }
        }
        match self {
            Formula::Equal(a, b) | Formula::InGclPow(a, _, b) => in_term(a, name).or_else(|| in_term(b, name)),
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.first_span_of(name),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.first_span_of(name).or_else(|| b.first_span_of(name)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(n) | Term::Constant(n) => write!(f, "{}", n.text),
            Term::Identity => write!(f, "1"),
            Term::Product(a, b) => write!(f, "({a}*{b})"),
            Term::Inverse(a) => write!(f, "{a}^-1"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Equal(a, b) => write!(f, "{a} = {b}"),
            Formula::InGclPow(a, n, x) => write!(f, "in_gcl_pow({a}, {n}, {x})"),
            Formula::Not(g) => write!(f, "!({g})"),
            Formula::And(a, b) => write!(f, "({a}) & ({b})"),
            Formula::Or(a, b) => write!(f, "({a}) | ({b})"),
            Formula::Implies(a, b) => write!(f, "({a}) -> ({b})"),
            Formula::Forall(v, g) => write!(f, "forall {}. ({g})", v.text),
            Formula::Exists(v, g) => write!(f, "exists {}. ({g})", v.text),
        }
    }
}

// ---- parsing ----

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(&'static str),
    End,
}

struct Lexer;

impl Lexer {
    fn run(text: &str) -> Result<Vec<(Tok, Span)>> {
        let b = text.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < b.len() {
            let c = b[i];
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            if c.is_ascii_alphabetic() || c == b'_' {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), Span { start, end: i }));
            } else if c.is_ascii_digit() {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let v = text[start..i].parse().map_err(|_| Error::syntax(start, "integer literal too large"))?;
                out.push((Tok::Int(v), Span { start, end: i }));
            } else if text[i..].starts_with("->") {
                i += 2;
                out.push((Tok::Sym("->"), Span { start, end: i }));
            } else {
                let sym = match c {
                    b'(' => "(",
                    b')' => ")",
                    b'*' => "*",
                    b'^' => "^",
                    b'-' => "-",
                    b'=' => "=",
                    b'&' => "&",
                    b'|' => "|",
                    b'!' => "!",
                    b'.' => ".",
                    b',' => ",",
                    _ => return Err(Error::syntax(start, format!("unexpected character `{}`", text[i..].chars().next().unwrap()))),
                };
                i += 1;
                out.push((Tok::Sym(sym), Span { start, end: i }));
            }
        }
        out.push((Tok::End, Span { start: text.len(), end: text.len() }));
        Ok(out)
    }
}

const RESERVED: [&str; 3] = ["forall", "exists", "in_gcl_pow"];

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn expect(&mut self, s: &str) -> Result<Span> {
        if self.is_sym(s) {
            Ok(self.bump().1)
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let found = match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::End => "end of input".to_string(),
        };
        Error::syntax(self.span().start, format!("{}, found {found}", msg.into()))
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.is_sym("->") {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.is_sym("|") {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.is_sym("&") {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.is_sym("!") {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if let Tok::Ident(kw) = self.peek().clone() {
            if kw == "forall" || kw == "exists" {
                self.bump();
                let (tok, span) = self.bump();
                let v = match tok {
                    Tok::Ident(v) if !RESERVED.contains(&v.as_str()) => v,
                    _ => return Err(Error::syntax(span.start, "expected a variable name after the quantifier")),
                };
                if self.bound.contains(&v) {
                    return Err(Error::syntax(span.start, format!("variable `{v}` is already bound")));
                }
                self.expect(".")?;
                self.bound.push(v.clone());
                let body = self.formula();
                self.bound.pop();
                let name = Name { text: v, span };
                let body = Box::new(body?);
                return Ok(if kw == "forall" { Formula::Forall(name, body) } else { Formula::Exists(name, body) });
            }
            if kw == "in_gcl_pow" {
                self.bump();
                self.expect("(")?;
                let a = self.term()?;
                self.expect(",")?;
                let n = match self.bump() {
                    (Tok::Int(v), _) => v as usize,
                    (_, span) => return Err(Error::syntax(span.start, "expected an exponent")),
                };
                self.expect(",")?;
                let x = self.term()?;
                self.expect(")")?;
                return Ok(Formula::InGclPow(a, n, x));
            }
        }
        if self.is_sym("(") {
            // either a parenthesized formula or an equation starting with a term
            let save = self.pos;
            if let Ok(f) = self.equation() {
                return Ok(f);
            }
            self.pos = save;
            self.bump();
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        self.equation()
    }

    fn equation(&mut self) -> Result<Formula> {
        let a = self.term()?;
        self.expect("=")?;
        let b = self.term()?;
        Ok(Formula::Equal(a, b))
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.factor()?;
        while self.is_sym("*") {
            self.bump();
            t = Term::mul(t, self.factor()?);
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<Term> {
        let mut t = self.primary()?;
        while self.is_sym("^") {
            self.bump();
            self.expect("-")?;
            match self.bump() {
                (Tok::Int(1), _) => t = Term::inv(t),
                (_, span) => return Err(Error::syntax(span.start, "only the exponent -1 is allowed")),
            }
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Int(1) => {
                self.bump();
                Ok(Term::Identity)
            }
            Tok::Ident(v) if !RESERVED.contains(&v.as_str()) => {
                let (_, span) = self.bump();
                let name = Name { text: v.clone(), span };
                Ok(if self.bound.contains(&v) { Term::Variable(name) } else { Term::Constant(name) })
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: Lexer::run(text)?, pos: 0, bound: Vec::new() };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

// ---- evaluation ----

/// Assignment of group elements to free names.
pub type Env = BTreeMap<String, u32>;

enum CTerm {
    Slot(usize),
    Id,
    Mul(Box<CTerm>, Box<CTerm>),
    Inv(Box<CTerm>),
}

enum CForm {
    Eq(CTerm, CTerm),
    Gcl(CTerm, usize, CTerm),
    Not(Box<CForm>),
    And(Box<CForm>, Box<CForm>),
    Or(Box<CForm>, Box<CForm>),
    Imp(Box<CForm>, Box<CForm>),
    All(usize, Box<CForm>),
    Ex(usize, Box<CForm>),
}

/// Evaluates formulas over one group with a shared assignment budget.
pub struct Evaluator<'g> {
    g: &'g GroupTable,
    budget: u64,
    used: Cell<u64>,
    gcl_cache: RefCell<FxHashMap<(u32, usize), ElementSet>>,
}

impl<'g> Evaluator<'g> {
    pub fn new(g: &'g GroupTable) -> Self {
        Self::with_budget(g, DEFAULT_BUDGET)
    }

    pub fn with_budget(g: &'g GroupTable, budget: u64) -> Self {
        Evaluator { g, budget, used: Cell::new(0), gcl_cache: RefCell::new(FxHashMap::default()) }
    }

    /// Quantifier assignments consumed so far.
    pub fn used(&self) -> u64 {
        self.used.get()
    }

    fn compile(&self, f: &Formula, slots: &[String]) -> Result<(CForm, usize)> {
        let mut scope: Vec<String> = slots.to_vec();
        let mut width = scope.len();
        let c = self.compile_form(f, &mut scope, &mut width, f)?;
        Ok((c, width))
    }

    fn compile_term(&self, t: &Term, scope: &[String], root: &Formula) -> Result<CTerm> {
        Ok(match t {
            Term::Variable(n) | Term::Constant(n) => match scope.iter().rposition(|s| *s == n.text) {
                Some(i) => CTerm::Slot(i),
                None => {
                    let span = root.first_span_of(&n.text).unwrap_or(n.span);
                    return Err(Error::Unbound(format!("{} (offset {})", n.text, span.start)));
                }
            },
            Term::Identity => CTerm::Id,
            Term::Product(a, b) => CTerm::Mul(Box::new(self.compile_term(a, scope, root)?), Box::new(self.compile_term(b, scope, root)?)),
            Term::Inverse(a) => CTerm::Inv(Box::new(self.compile_term(a, scope, root)?)),
        })
    }

    fn compile_form(&self, f: &Formula, scope: &mut Vec<String>, width: &mut usize, root: &Formula) -> Result<CForm> {
        let bx = |c: CForm| Box::new(c);
        Ok(match f {
            Formula::Equal(a, b) => CForm::Eq(self.compile_term(a, scope, root)?, self.compile_term(b, scope, root)?),
            Formula::InGclPow(a, n, x) => CForm::Gcl(self.compile_term(a, scope, root)?, *n, self.compile_term(x, scope, root)?),
            Formula::Not(g) => CForm::Not(bx(self.compile_form(g, scope, width, root)?)),
            Formula::And(a, b) => CForm::And(bx(self.compile_form(a, scope, width, root)?), bx(self.compile_form(b, scope, width, root)?)),
            Formula::Or(a, b) => CForm::Or(bx(self.compile_form(a, scope, width, root)?), bx(self.compile_form(b, scope, width, root)?)),
            Formula::Implies(a, b) => CForm::Imp(bx(self.compile_form(a, scope, width, root)?), bx(self.compile_form(b, scope, width, root)?)),
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let slot = scope.len();
                scope.push(v.text.clone());
                *width = (*width).max(scope.len());
                let body = self.compile_form(g, scope, width, root);
                scope.pop();
                let body = bx(body?);
                if matches!(f, Formula::Forall(..)) {
                    CForm::All(slot, body)
                } else {
                    CForm::Ex(slot, body)
                }
            }
        })
    }

    fn term(&self, t: &CTerm, asg: &[u32]) -> u32 {
        match t {
            CTerm::Slot(i) => asg[*i],
            CTerm::Id => self.g.identity(),
            CTerm::Mul(a, b) => self.g.mul(self.term(a, asg), self.term(b, asg)),
            CTerm::Inv(a) => self.g.inv(self.term(a, asg)),
        }
    }

    fn in_gcl_pow(&self, a: u32, n: usize, x: u32) -> bool {
        let mut cache = self.gcl_cache.borrow_mut();
        cache.entry((a, n)).or_insert_with(|| gcl_power(self.g, a, n)).contains(x)
    }

    fn eval(&self, f: &CForm, asg: &mut Vec<u32>) -> Result<bool> {
        Ok(match f {
            CForm::Eq(a, b) => self.term(a, asg) == self.term(b, asg),
            CForm::Gcl(a, n, x) => {
                let (a, x) = (self.term(a, asg), self.term(x, asg));
                self.in_gcl_pow(a, *n, x)
            }
            CForm::Not(g) => !self.eval(g, asg)?,
            CForm::And(a, b) => self.eval(a, asg)? && self.eval(b, asg)?,
            CForm::Or(a, b) => self.eval(a, asg)? || self.eval(b, asg)?,
            CForm::Imp(a, b) => !self.eval(a, asg)? || self.eval(b, asg)?,
            CForm::All(slot, g) | CForm::Ex(slot, g) => {
                let want = matches!(f, CForm::Ex(..));
                for x in 0..self.g.order() as u32 {
                    self.charge()?;
                    asg[*slot] = x;
                    if self.eval(g, asg)? == want {
                        return Ok(want);
                    }
                }
                !want
            }
        })
    }

    fn charge(&self) -> Result<()> {
        let u = self.used.get() + 1;
        if u > self.budget {
            return Err(Error::Budget(format!("more than {} quantifier assignments", self.budget)));
        }
        self.used.set(u);
        Ok(())
    }

    fn bind(&self, env: &Env, names: &[String]) -> Result<Vec<u32>> {
        names
            .iter()
            .map(|n| {
                let v = *env.get(n).ok_or_else(|| Error::Unbound(n.clone()))?;
                if v as usize >= self.g.order() {
                    return Err(Error::invalid(format!("`{n}` is bound to {v}, outside the group")));
                }
                Ok(v)
            })
            .collect()
    }

    pub fn evaluate(&self, f: &Formula, env: &Env) -> Result<bool> {
        let names: Vec<String> = f.free_names().into_iter().collect();
        let mut asg = self.bind(env, &names)?;
        let (c, width) = self.compile(f, &names)?;
        asg.resize(width, 0);
        self.eval(&c, &mut asg)
    }

    /// All tuples over `vars` (in that order) satisfying `f`, sorted.
    pub fn definable_set(&self, f: &Formula, vars: &[&str], env: &Env) -> Result<Vec<Vec<u32>>> {
        if vars.len() > 3 {
            return Err(Error::Unsupported("definable sets are limited to arity 3".into()));
        }
        let order = self.g.order() as u64;
        if order.saturating_pow(vars.len() as u32) > self.budget {
            return Err(Error::Budget(format!("|G|^{} exceeds the assignment budget", vars.len())));
        }
        let consts: Vec<String> = f.free_names().into_iter().filter(|n| !vars.contains(&n.as_str())).collect();
        let mut names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        names.extend(consts.iter().cloned());
        let (c, width) = self.compile(f, &names)?;
        let mut asg = vec![0u32; vars.len()];
        asg.extend(self.bind(env, &consts)?);
        asg.resize(width, 0);
        let mut out = Vec::new();
        let mut tuple = vec![0u32; vars.len()];
        loop {
            asg[..vars.len()].copy_from_slice(&tuple);
            self.charge()?;
            if self.eval(&c, &mut asg)? {
                out.push(tuple.clone());
            }
            // odometer with the last coordinate fastest, giving sorted output
            let mut i = vars.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                tuple[i] += 1;
                if (tuple[i] as u64) < order {
                    break;
                }
                tuple[i] = 0;
            }
        }
    }

    pub fn family_slices(&self, fam: &DefinableFamily, env: &Env, domain: Option<&[Vec<u32>]>) -> Result<FamilySlices> {
        let params: Vec<&str> = fam.params.iter().map(|s| s.as_str()).collect();
        let objects: Vec<&str> = fam.objects.iter().map(|s| s.as_str()).collect();
        let all_params;
        let domain = match domain {
            Some(d) => d,
            None => {
                let all = Formula::Equal(Term::Identity, Term::Identity);
                all_params = self.definable_set(&all, &params, &Env::new())?;
                &all_params
            }
        };
        let mut classes: Vec<SliceClass> = Vec::new();
        let mut index: BTreeMap<Vec<Vec<u32>>, usize> = BTreeMap::new();
        let mut slice_of = Vec::with_capacity(domain.len());
        for y in domain {
            if y.len() != params.len() {
                return Err(Error::invalid("parameter tuple has the wrong arity"));
            }
            let mut env_y = env.clone();
            for (name, &v) in params.iter().zip(y) {
                env_y.insert(name.to_string(), v);
            }
            let ext = self.definable_set(&fam.formula, &objects, &env_y)?;
            let id = *index.entry(ext.clone()).or_insert_with(|| {
                classes.push(SliceClass { representative: y.clone(), parameters: 0, extension: ext });
                classes.len() - 1
            });
            classes[id].parameters += 1;
            slice_of.push((y.clone(), id));
        }
        Ok(FamilySlices { classes, slice_of })
    }
}

/// Formula over parameter variables ⊕ object variables.
#[derive(Clone, Debug)]
pub struct DefinableFamily {
    pub params: Vec<String>,
    pub objects: Vec<String>,
    pub formula: Formula,
}

impl DefinableFamily {
    pub fn new(params: &[&str], objects: &[&str], formula: Formula) -> Result<Self> {
        if let Some(c) = params.iter().find(|p| objects.contains(p)) {
            return Err(Error::invalid(format!("`{c}` is both a parameter and an object variable")));
        }
        Ok(DefinableFamily {
            params: params.iter().map(|s| s.to_string()).collect(),
            objects: objects.iter().map(|s| s.to_string()).collect(),
            formula,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceClass {
    /// First parameter tuple producing this slice.
    pub representative: Vec<u32>,
    /// Number of parameter tuples producing it.
    pub parameters: usize,
    pub extension: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilySlices {
    /// Distinct slices in order of first appearance.
    pub classes: Vec<SliceClass>,
    /// Each parameter tuple with the index of its slice class.
    pub slice_of: Vec<(Vec<u32>, usize)>,
}

pub fn evaluate(g: &GroupTable, f: &Formula, env: &Env) -> Result<bool> {
    Evaluator::new(g).evaluate(f, env)
}

pub fn definable_set(g: &GroupTable, f: &Formula, vars: &[&str], env: &Env) -> Result<Vec<Vec<u32>>> {
    Evaluator::new(g).definable_set(f, vars, env)
}

pub fn family_slices(g: &GroupTable, fam: &DefinableFamily, env: &Env, domain: Option<&[Vec<u32>]>) -> Result<FamilySlices> {
    Evaluator::new(g).family_slices(fam, env, domain)
}

/// Random formula over the given constant names; bound variables are
/// `v0, v1, …` so no binder shadows another.
pub fn random_formula<R: Rng>(rng: &mut R, consts: &[&str], depth: usize) -> Formula {
    fn term<R: Rng>(rng: &mut R, names: &[Term], depth: usize) -> Term {
        match if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..4) } {
            0 => Term::Identity,
            1 => names[rng.gen_range(0..names.len())].clone(),
            2 => Term::mul(term(rng, names, depth - 1), term(rng, names, depth - 1)),
            _ => Term::inv(term(rng, names, depth - 1)),
        }
    }
    fn form<R: Rng>(rng: &mut R, names: &mut Vec<Term>, depth: usize, quants: usize) -> Formula {
        let choice = if depth == 0 { 0 } else { rng.gen_range(0..7) };
        match choice {
            0 => Formula::Equal(term(rng, names, 2), term(rng, names, 2)),
            1 => Formula::not(form(rng, names, depth - 1, quants)),
            2 => Formula::and(form(rng, names, depth - 1, quants), form(rng, names, depth - 1, quants)),
            3 => Formula::or(form(rng, names, depth - 1, quants), form(rng, names, depth - 1, quants)),
            4 => Formula::implies(form(rng, names, depth - 1, quants), form(rng, names, depth - 1, quants)),
            _ if quants >= 2 => form(rng, names, depth - 1, quants),
            q => {
                let v = format!("v{}", names.iter().filter(|t| matches!(t, Term::Variable(_))).count());
                names.push(Term::var(&v));
                let body = form(rng, names, depth - 1, quants + 1);
                names.pop();
                if q == 5 {
                    Formula::forall(&v, body)
                } else {
                    Formula::exists(&v, body)
                }
            }
        }
    }
    let mut names: Vec<Term> = consts.iter().map(|c| Term::cons(c)).collect();
    if names.is_empty() {
        names.push(Term::Identity);
    }
    form(rng, &mut names, depth, 0)
}

/// The family `{U(A;q) : q maximal}` inside PSL_n(ℤ/m) or SL_n(ℤ/m),
/// n ≥ 3: `z ∈ X_y` iff `z = ∏_{j=2..n} p_{1j} y^{k_j} p_{1j}⁻¹` for some
/// exponents, with the parameter `y = e_{1n}(g)` for a generator g of q.
/// Returns the family, the constants `p1j`, and the parameter domain.
pub fn unipotent_congruence_family(g: &GroupTable) -> Result<(DefinableFamily, Env, Vec<Vec<u32>>)> {
    let spec = g.spec().ok_or_else(|| Error::invalid("needs an SL/PSL table"))?.clone();
    if spec.n < 3 {
        return Err(Error::invalid("needs n >= 3"));
    }
    let enc = RingEncoding::<i64>::new(&spec.ring, spec.n)?;
    let idx = |m: &crate::matgroups::Mat<i64>| index_of_mat(g, m).ok_or_else(|| Error::Invariant("matrix outside the table".into()));
    let mut env = Env::new();
    for j in 2..spec.n {
        env.insert(format!("p1{j}"), idx(&perm_conjugator::<i64>(&spec.ring, spec.n, 1, j)?)?);
    }
    let mut domain = Vec::new();
    let mut order = 0;
    for q in maximal_ideals(&spec.ring)? {
        let gen: i64 = q.generator.0.clone().try_into().map_err(|_| Error::invalid("ideal generator out of range"))?;
        let y = enc.encode(&gen);
        let yi = idx(y.carrier().rep())?;
        order = order.max(g.element_order(yi));
        domain.push(vec![yi]);
    }
    let power = |k: usize| (0..k).fold(None, |acc: Option<Term>, _| Some(acc.map_or(Term::cons("y"), |t| Term::mul(t, Term::cons("y"))))).unwrap_or(Term::Identity);
    let factor = |j: usize, k: usize| {
        if j == spec.n {
            power(k)
        } else {
            let p = Term::cons(&format!("p1{j}"));
            Term::mul(Term::mul(p.clone(), power(k)), Term::inv(p))
        }
    };
    // disjunction over all exponent vectors (k_2, …, k_n) ∈ [0, order)^{n-1}
    let mut disjuncts = Vec::new();
    let slots = spec.n - 1;
    for code in 0..order.pow(slots as u32) {
        let mut c = code;
        let mut t: Option<Term> = None;
        for j in 2..=spec.n {
            let f = factor(j, c % order);
            c /= order;
            t = Some(t.map_or(f.clone(), |acc| Term::mul(acc, f)));
        }
        disjuncts.push(Formula::Equal(Term::cons("z"), t.unwrap()));
    }
    let formula = disjuncts.into_iter().reduce(Formula::or).unwrap();
    Ok((DefinableFamily::new(&["y"], &["z"], formula)?, env, domain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroups::{elementary, enumerate, row_congruence};
    use crate::rings::{IdealSpec, RingSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn env(pairs: &[(&str, u32)]) -> Env {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn parse_examples() {
        let f = parse_formula("forall y. x*y = y*x").unwrap();
        let want = Formula::forall(
            "y",
            Formula::Equal(Term::mul(Term::cons("x"), Term::var("y")), Term::mul(Term::var("y"), Term::cons("x"))),
        );
        assert_eq!(f, want);
        let f = parse_formula("exists y. y*y = c & !(y = 1)").unwrap();
        assert_eq!(f.free_names().into_iter().collect::<Vec<_>>(), vec!["c".to_string()]);
        match parse_formula("forall y y") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_precedence_and_errors() {
        let f = parse_formula("a = 1 & b = 1 | c = 1 -> d = 1 -> e = 1").unwrap();
        let eq = |n: &str| Formula::Equal(Term::cons(n), Term::Identity);
        let want = Formula::implies(Formula::or(Formula::and(eq("a"), eq("b")), eq("c")), Formula::implies(eq("d"), eq("e")));
        assert_eq!(f, want);
        assert_eq!(parse_formula("(a*b)^-1 = b^-1*a^-1").unwrap().quantifier_depth(), 0);
        assert_eq!(parse_formula("((a = b))").unwrap(), Formula::Equal(Term::cons("a"), Term::cons("b")));
        assert_eq!(parse_formula("(a) = b").unwrap(), Formula::Equal(Term::cons("a"), Term::cons("b")));
        assert!(parse_formula("forall x. exists x. x = x").is_err());
        assert!(parse_formula("a = b^2").is_err());
        assert!(parse_formula("a = ").is_err());
        assert!(parse_formula("a = b)").is_err());
        assert!(parse_formula("a $ b").is_err());
        let g = parse_formula("in_gcl_pow(a, 3, x)").unwrap();
        assert_eq!(g, Formula::InGclPow(Term::cons("a"), 3, Term::cons("x")));
    }

    #[test]
    fn display_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let f = random_formula(&mut rng, &["c", "d"], 4);
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{f}");
        }
    }

    #[test]
    fn evaluate_examples() {
        let g = enumerate("psl:3:gf:2").unwrap();
        let f = parse_formula("forall y. x*y=y*x").unwrap();
        assert!(evaluate(&g, &f, &env(&[("x", 0)])).unwrap());
        let r = RingSpec::gf(2).unwrap();
        let e12 = index_of_mat(&g, &elementary::<i64>(&r, 3, 1, 2, &1).unwrap()).unwrap();
        assert!(!evaluate(&g, &f, &env(&[("x", e12)])).unwrap());
        let sq = parse_formula("exists y. y*y = x").unwrap();
        assert!(evaluate(&g, &sq, &env(&[("x", 0)])).unwrap());
        assert!(matches!(evaluate(&g, &f, &Env::new()), Err(Error::Unbound(_))));
    }

    #[test]
    fn wrapping_binds_constants() {
        let g = enumerate("psl:2:gf:5").unwrap();
        let body = parse_formula("x*y = y*x").unwrap();
        let f = Formula::forall("x", body.clone());
        assert_eq!(f.free_names().into_iter().collect::<Vec<_>>(), vec!["y".to_string()]);
        assert!(evaluate(&g, &f, &env(&[("y", 0)])).unwrap());
        assert!(!evaluate(&g, &f, &env(&[("y", 1)])).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let g = enumerate("psl:2:gf:5").unwrap();
        let f = parse_formula("forall a. forall b. a*b = b*a | 1 = 1").unwrap();
        let ev = Evaluator::with_budget(&g, 100);
        assert!(matches!(ev.evaluate(&f, &Env::new()), Err(Error::Budget(_))));
        assert!(Evaluator::new(&g).evaluate(&f, &Env::new()).unwrap());
    }

    #[test]
    fn definable_set_examples() {
        let g = enumerate("psl:2:gf:5").unwrap();
        let centre = parse_formula("forall y. x*y = y*x").unwrap();
        assert_eq!(definable_set(&g, &centre, &["x"], &Env::new()).unwrap(), vec![vec![0]]);
        let all = parse_formula("x = x").unwrap();
        assert_eq!(definable_set(&g, &all, &["x"], &Env::new()).unwrap().len(), 60);

        let g = enumerate("psl:3:gf:3").unwrap();
        let r = RingSpec::gf(3).unwrap();
        let c = index_of_mat(&g, &elementary::<i64>(&r, 3, 1, 3, &1).unwrap()).unwrap();
        let zc = parse_formula("x*c = c*x & forall y. (y*c = c*y -> x*y = y*x)").unwrap();
        let got = definable_set(&g, &zc, &["x"], &env(&[("c", c)])).unwrap();
        let want: Vec<Vec<u32>> = {
            let mut v: Vec<Vec<u32>> = (0..3).map(|a| vec![index_of_mat(&g, &elementary::<i64>(&r, 3, 1, 3, &a).unwrap()).unwrap()]).collect();
            v.sort();
            v
        };
        assert_eq!(got, want);
    }

    #[test]
    fn family_examples() {
        let g = enumerate("psl:2:gf:5").unwrap();
        let fam = DefinableFamily::new(&["y"], &["z"], parse_formula("z*y = y*z").unwrap()).unwrap();
        let slices = family_slices(&g, &fam, &Env::new(), None).unwrap();
        let distinct: std::collections::HashSet<ElementSet> = (0..60).map(|y| g.centralizer(&g.singleton(y))).collect();
        assert_eq!(slices.classes.len(), distinct.len());
        assert_eq!(slices.slice_of.len(), 60);

        let trivial = DefinableFamily::new(&["y"], &["z"], parse_formula("z = z").unwrap()).unwrap();
        let s = family_slices(&g, &trivial, &Env::new(), None).unwrap();
        assert_eq!(s.classes.len(), 1);
        assert_eq!(s.classes[0].extension.len(), 60);
        assert!(DefinableFamily::new(&["y"], &["y"], parse_formula("y = y").unwrap()).is_err());
    }

    #[test]
    fn unipotent_congruence_family_in_psl3_mod4() {
        let g = enumerate("psl:3:zmod:4").unwrap();
        let (fam, env, domain) = unipotent_congruence_family(&g).unwrap();
        let slices = family_slices(&g, &fam, &env, Some(&domain)).unwrap();
        let r = RingSpec::zmod(4).unwrap();
        let want = row_congruence(&g, &IdealSpec::new(&r, 2)).unwrap();
        assert_eq!(slices.classes.len(), 1);
        let got = ElementSet::from_indices(g.order(), slices.classes[0].extension.iter().map(|t| t[0]));
        assert_eq!(got, want);
        assert_eq!(got.len(), 4);
    }

    #[test]
    fn in_gcl_pow_atom() {
        let g = enumerate("psl:2:gf:5").unwrap();
        let f = parse_formula("in_gcl_pow(a, 2, x)").unwrap();
        let a = g.generators()[0];
        let set = definable_set(&g, &f, &["x"], &env(&[("a", a)])).unwrap();
        let want = gcl_power(&g, a, 2);
        assert_eq!(set.len(), want.len());
        assert!(set.iter().all(|t| want.contains(t[0])));
    }
}
