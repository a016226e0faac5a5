//! Word maps on finite groups: images, and width over the symmetrized image.
//!
//! Grammar: `w := letter | w*w | w^-1 | w^<int> | [w,w] | (w)`, with
//! `[a,b] = a⁻¹b⁻¹ab`. Letters are lowercase identifiers.

use crate::elementset::ElementSet;
use crate::error::{Error, Result};
use crate::gclsets::set_product;
use crate::matgroups::GroupTable;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

pub const DEFAULT_TUPLE_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    Letter(String),
    Product(Box<Word>, Box<Word>),
    Inverse(Box<Word>),
    Power(Box<Word>, i64),
    Commutator(Box<Word>, Box<Word>),
}

impl Word {
    /// Distinct letters in order of first appearance.
    pub fn letters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut Vec<String>) {
        match self {
            Word::Letter(l) => {
                if !out.contains(l) {
                    out.push(l.clone());
                }
            }
            Word::Product(a, b) | Word::Commutator(a, b) => {
                a.collect_letters(out);
                b.collect_letters(out);
            }
            Word::Inverse(a) | Word::Power(a, _) => a.collect_letters(out),
        }
    }

    pub fn arity(&self) -> usize {
        self.letters().len()
    }

    /// Exponent sum of each letter (the image in the abelianized free group).
    pub fn exponent_sums(&self) -> Vec<(String, i64)> {
        fn walk(w: &Word, scale: i64, acc: &mut Vec<(String, i64)>) {
            match w {
                Word::Letter(l) => match acc.iter_mut().find(|(k, _)| k == l) {
                    Some((_, v)) => *v += scale,
                    None => acc.push((l.clone(), scale)),
                },
                Word::Product(a, b) => {
                    walk(a, scale, acc);
                    walk(b, scale, acc);
                }
                Word::Inverse(a) => walk(a, -scale, acc),
                Word::Power(a, k) => walk(a, scale * k, acc),
                Word::Commutator(a, b) => {
                    // a⁻¹b⁻¹ab has zero exponent sum, but letters still occur
                    walk(a, 0, acc);
                    walk(b, 0, acc);
                }
            }
        }
        let mut acc = Vec::new();
        walk(self, 1, &mut acc);
        acc
    }

    /// Primitive in the abelianization: the exponent sums have gcd 1.
    pub fn is_silly(&self) -> bool {
        self.exponent_sums().iter().fold(0i64, |g, (_, v)| g.gcd(v)) == 1
    }

    fn eval(&self, g: &GroupTable, letters: &[String], values: &[u32]) -> u32 {
        match self {
            Word::Letter(l) => values[letters.iter().position(|x| x == l).expect("letter bound")],
            Word::Product(a, b) => g.mul(a.eval(g, letters, values), b.eval(g, letters, values)),
            Word::Inverse(a) => g.inv(a.eval(g, letters, values)),
            Word::Power(a, k) => g.pow(a.eval(g, letters, values), *k),
            Word::Commutator(a, b) => g.commutator(a.eval(g, letters, values), b.eval(g, letters, values)),
        }
    }

    /// Value of the word at an assignment given in `letters()` order.
    pub fn evaluate(&self, g: &GroupTable, values: &[u32]) -> Result<u32> {
        let letters = self.letters();
        if values.len() != letters.len() {
            return Err(Error::invalid(format!("word has {} letters, got {} values", letters.len(), values.len())));
        }
        Ok(self.eval(g, &letters, values))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Letter(l) => write!(f, "{l}"),
            Word::Product(a, b) => write!(f, "({a}*{b})"),
            Word::Inverse(a) => write!(f, "{a}^-1"),
            Word::Power(a, k) => write!(f, "{a}^{k}"),
            Word::Commutator(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(Error::syntax(self.pos, format!("expected `{c}`, found `{x}`"))),
            None => Err(Error::syntax(self.pos, format!("expected `{c}`, found end of input"))),
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            w = Word::Product(Box::new(w), Box::new(self.factor()?));
        }
        Ok(w)
    }

    fn factor(&mut self) -> Result<Word> {
        let mut w = self.primary()?;
        while self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let rest = &self.text[self.pos..];
            let len = rest.char_indices().take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && c == '-')).count();
            let k: i64 = rest[..len].parse().map_err(|_| Error::syntax(start, "expected an integer exponent"))?;
            self.pos += len;
            w = if k == -1 { Word::Inverse(Box::new(w)) } else { Word::Power(Box::new(w), k) };
        }
        Ok(w)
    }

    fn primary(&mut self) -> Result<Word> {
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(',')?;
                let b = self.word()?;
                self.expect(']')?;
                Ok(Word::Commutator(Box::new(a), Box::new(b)))
            }
            Some('(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(')')?;
                Ok(w)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                let len = self.text[start..].chars().take_while(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || *c == '_').count();
                self.pos += len;
                Ok(Word::Letter(self.text[start..self.pos].to_string()))
            }
            Some(c) => Err(Error::syntax(self.pos, format!("expected a letter, `[` or `(`, found `{c}`"))),
            None => Err(Error::syntax(self.pos, "expected a letter, `[` or `(`, found end of input")),
        }
    }
}

pub fn parse_word(text: &str) -> Result<Word> {
    let mut p = Parser { text, pos: 0 };
    let w = p.word()?;
    if let Some(c) = p.peek() {
        return Err(Error::syntax(p.pos, format!("unexpected `{c}`")));
    }
    Ok(w)
}

/// Image of the word. Sub-words over disjoint letter sets are evaluated
/// independently and combined; otherwise all assignments are enumerated.
pub fn word_image(g: &GroupTable, w: &Word, budget: u64) -> Result<ElementSet> {
    let order = g.order() as u64;
    match w {
        Word::Letter(_) => Ok(g.all()),
        Word::Inverse(a) => Ok(g.inverse_set(&word_image(g, a, budget)?)),
        Word::Power(a, k) => {
            let img = word_image(g, a, budget)?;
            Ok(ElementSet::from_indices(g.order(), img.iter().map(|x| g.pow(x, *k))))
        }
        Word::Product(a, b) | Word::Commutator(a, b) if disjoint(a, b) => {
            let (ia, ib) = (word_image(g, a, budget)?, word_image(g, b, budget)?);
            if matches!(w, Word::Product(..)) {
                Ok(set_product(g, &ia, &ib))
            } else {
                let (va, vb) = (ia.to_vec(), ib.to_vec());
                let mut out = g.empty_set();
                for &x in &va {
                    for &y in &vb {
                        out.insert(g.commutator(x, y));
                    }
                }
                Ok(out)
            }
        }
        _ => {
            let letters = w.letters();
            let k = letters.len() as u32;
            if order.checked_pow(k).is_none_or(|t| t > budget) {
                return Err(Error::Budget(format!("|G|^{k} assignments exceed the budget {budget}")));
            }
            // split on the first letter; per-thread sets are unioned, so the
            // result does not depend on scheduling
            let rest = letters.len() - 1;
            let image = (0..order as u32)
                .into_par_iter()
                .fold(
                    || g.empty_set(),
                    |mut acc, first| {
                        let mut values = vec![0u32; letters.len()];
                        values[0] = first;
                        loop {
                            acc.insert(w.eval(g, &letters, &values));
                            let mut i = 1;
                            loop {
                                if i > rest {
                                    return acc;
                                }
                                values[i] += 1;
                                if (values[i] as u64) < order {
                                    break;
                                }
                                values[i] = 0;
                                i += 1;
                            }
                        }
                    },
                )
                .reduce(|| g.empty_set(), |mut a, b| {
                    a.union_with(&b);
                    a
                });
            Ok(image)
        }
    }
}

fn disjoint(a: &Word, b: &Word) -> bool {
    let la: BTreeSet<String> = a.letters().into_iter().collect();
    b.letters().iter().all(|l| !la.contains(l))
}

#[derive(Clone, Debug, Serialize)]
pub struct WordWidth {
    pub image_size: usize,
    /// Least N ≥ 1 with W^N = W^{N+1}, W the symmetrized image.
    pub width: usize,
    pub closure_size: usize,
    /// |W^N| for N = 1..=width.
    pub sizes: Vec<usize>,
    #[serde(skip)]
    pub closure: ElementSet,
}

pub fn word_width(g: &GroupTable, w: &Word, budget: u64) -> Result<WordWidth> {
    let image = word_image(g, w, budget)?;
    let mut sym = image.union(&g.inverse_set(&image));
    sym.insert(g.identity());
    let mut power = sym.clone();
    let mut sizes = vec![power.len()];
    loop {
        let next = set_product(g, &power, &sym);
        if next == power {
            break;
        }
        power = next;
        sizes.push(power.len());
    }
    if !g.is_subgroup(&power) {
        return Err(Error::Invariant("stable power of the symmetrized image is not a subgroup".into()));
    }
    Ok(WordWidth { image_size: image.len(), width: sizes.len(), closure_size: power.len(), sizes, closure: power })
}
