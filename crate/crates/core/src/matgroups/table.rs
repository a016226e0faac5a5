use crate::elementset::ElementSet;
use crate::error::{Error, Result};
use crate::matgroups::GroupSpec;
use rustc_hash::FxHashMap;
use std::collections::VecDeque;
use std::sync::OnceLock;

/// Largest matrix dimension handled by the packed representation.
pub const MAX_DIM: usize = 6;
/// Full multiplication tables are built for groups up to this order.
const CAYLEY_LIMIT: usize = 1024;

/// How element payloads multiply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Law {
    /// n×n matrices mod `modulus`, taken modulo the listed scalars
    /// (just `[1]` for a linear group).
    Matrix { n: usize, modulus: u32, scalars: Vec<u32> },
    /// The additive group ℤ/order.
    Cyclic { order: u32 },
}

impl Law {
    pub fn stride(&self) -> usize {
        match self {
            Law::Matrix { n, .. } => n * n,
            Law::Cyclic { .. } => 1,
        }
    }

    fn radix(&self) -> u128 {
        match self {
            Law::Matrix { modulus, .. } => *modulus as u128,
            Law::Cyclic { order } => *order as u128,
        }
    }

    fn key(&self, x: &[u32]) -> u128 {
        let r = self.radix();
        x.iter().rev().fold(0u128, |acc, &v| acc * r + v as u128)
    }

    fn fits_key(&self) -> bool {
        let r = self.radix();
        let mut acc: u128 = 1;
        for _ in 0..self.stride() {
            match acc.checked_mul(r) {
                Some(v) => acc = v,
                None => return false,
            }
        }
        true
    }

    /// Replaces `x` by its canonical coset representative.
    fn canonicalize(&self, x: &mut [u32]) {
        if let Law::Matrix { modulus, scalars, .. } = self {
            if scalars.len() <= 1 {
                return;
            }
            let m = *modulus as u64;
            let mut best = [0u32; MAX_DIM * MAX_DIM];
            let len = x.len();
            best[..len].copy_from_slice(x);
            let mut cand = [0u32; MAX_DIM * MAX_DIM];
            for &l in &scalars[1..] {
                for k in 0..len {
                    cand[k] = ((x[k] as u64 * l as u64) % m) as u32;
                }
                if cand[..len] < best[..len] {
                    best[..len].copy_from_slice(&cand[..len]);
                }
            }
            x.copy_from_slice(&best[..len]);
        }
    }

    /// `out = canonical(a * b)`.
    fn mul_into(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        match self {
            Law::Cyclic { order } => out[0] = ((a[0] as u64 + b[0] as u64) % *order as u64) as u32,
            Law::Matrix { n, modulus, .. } => {
                let n = *n;
                let m = *modulus as u64;
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = 0u64;
                        for k in 0..n {
                            acc += a[i * n + k] as u64 * b[k * n + j] as u64;
                        }
                        out[i * n + j] = (acc % m) as u32;
                    }
                }
                self.canonicalize(out);
            }
        }
    }

    fn identity(&self) -> Vec<u32> {
        match self {
            Law::Cyclic { .. } => vec![0],
            Law::Matrix { n, .. } => {
                let mut v = vec![0; n * n];
                for i in 0..*n {
                    v[i * n + i] = 1;
                }
                v
            }
        }
    }
}

/// Determinant of a packed matrix mod m (cofactor expansion, small n).
pub(crate) fn det_mod(n: usize, a: &[u32], m: u64) -> u64 {
    match n {
        1 => a[0] as u64 % m,
        2 => (a[0] as u64 * a[3] as u64 % m + m - a[1] as u64 * a[2] as u64 % m) % m,
        _ => {
            let mut acc = 0u64;
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            for col in 0..n {
                if a[col] == 0 {
                    continue;
                }
                minor.clear();
                for r in 1..n {
                    for c in 0..n {
                        if c != col {
                            minor.push(a[r * n + c]);
                        }
                    }
                }
                let t = a[col] as u64 * det_mod(n - 1, &minor, m) % m;
                acc = if col % 2 == 0 { (acc + t) % m } else { (acc + m - t) % m };
            }
            acc
        }
    }
}

/// Adjugate mod m; the inverse for determinant-1 matrices.
pub(crate) fn adjugate_mod(n: usize, a: &[u32], m: u64) -> Vec<u32> {
    if n == 1 {
        return vec![1];
    }
    let mut out = vec![0u32; n * n];
    let mut minor = Vec::with_capacity((n - 1) * (n - 1));
    for i in 0..n {
        for j in 0..n {
            minor.clear();
            for r in 0..n {
                for c in 0..n {
                    if r != i && c != j {
                        minor.push(a[r * n + c]);
                    }
                }
            }
            let d = det_mod(n - 1, &minor, m);
            out[j * n + i] = if (i + j) % 2 == 0 { d as u32 } else { ((m - d) % m) as u32 };
        }
    }
    out
}

/// Conjugacy classes of a [`GroupTable`].
#[derive(Debug)]
pub struct ClassData {
    pub class_of: Vec<u32>,
    /// Smallest index in each class; classes are numbered by increasing rep.
    pub reps: Vec<u32>,
    pub members: Vec<Vec<u32>>,
}

impl ClassData {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

/// A fully enumerated finite group with O(1) element indexing. The identity
/// sits at index 0.
pub struct GroupTable {
    label: String,
    spec: Option<GroupSpec>,
    law: Law,
    stride: usize,
    data: Vec<u32>,
    index: FxHashMap<u128, u32>,
    inverse: Vec<u32>,
    generators: Vec<u32>,
    cayley: Option<Vec<u32>>,
    classes: OnceLock<ClassData>,
    class_rows: OnceLock<Vec<OnceLock<Vec<u64>>>>,
}

impl std::fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GroupTable({}, order {})", self.label, self.order())
    }
}

impl GroupTable {
    /// Breadth-first closure of `generators` under right multiplication.
    pub fn generate(label: impl Into<String>, law: Law, generators: &[Vec<u32>], cap: usize) -> Result<Self> {
        let label = label.into();
        if !law.fits_key() {
            return Err(Error::Unsupported(format!("{label}: element encoding does not fit 128 bits")));
        }
        let stride = law.stride();
        let mut gens: Vec<Vec<u32>> = Vec::new();
        for g in generators {
            if g.len() != stride {
                return Err(Error::invalid("generator has the wrong number of entries"));
            }
            let mut g = g.clone();
            law.canonicalize(&mut g);
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
        let mut data = law.identity();
        let mut index = FxHashMap::default();
        index.insert(law.key(&data), 0u32);
        let mut queue = VecDeque::from([0usize]);
        let mut buf = vec![0u32; stride];
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                law.mul_into(&data[x * stride..(x + 1) * stride], g, &mut buf);
                let k = law.key(&buf);
                let id = index.len();
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(k) {
                    if id >= cap {
                        return Err(Error::Budget(format!("{label}: group order exceeds cap {cap}")));
                    }
                    e.insert(id as u32);
                    data.extend_from_slice(&buf);
                    queue.push_back(id);
                }
            }
        }
        let order = index.len();
        let mut table = GroupTable {
            label,
            spec: None,
            law,
            stride,
            data,
            index,
            inverse: Vec::new(),
            generators: Vec::new(),
            cayley: None,
            classes: OnceLock::new(),
            class_rows: OnceLock::new(),
        };
        table.generators = gens.iter().map(|g| table.index_of(g).expect("generator in closure")).collect();
        table.inverse = (0..order as u32).map(|i| table.compute_inverse(i)).collect();
        if order <= CAYLEY_LIMIT {
            let mut cay = vec![0u32; order * order];
            for a in 0..order {
                for b in 0..order {
                    cay[a * order + b] = table.mul_slow(a as u32, b as u32);
                }
            }
            table.cayley = Some(cay);
        }
        Ok(table)
    }

    /// The additive cyclic group ℤ/k.
    pub fn cyclic(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("cyclic group order must be positive"));
        }
        Self::generate(format!("cyclic:{k}"), Law::Cyclic { order: k }, &[vec![1 % k]], usize::MAX)
    }

    pub(crate) fn with_spec(mut self, spec: GroupSpec) -> Self {
        self.spec = Some(spec);
        self
    }

    fn compute_inverse(&self, i: u32) -> u32 {
        let x = self.element(i);
        let mut inv = match &self.law {
            Law::Cyclic { order } => vec![(order - x[0]) % order],
            Law::Matrix { n, modulus, .. } => adjugate_mod(*n, x, *modulus as u64),
        };
        self.law.canonicalize(&mut inv);
        match self.index_of_canonical(&inv) {
            Some(j) if self.mul_slow(i, j) == 0 => j,
            _ => panic!("{}: element {i} has no inverse in the table", self.label),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spec(&self) -> Option<&GroupSpec> {
        self.spec.as_ref()
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    pub fn order(&self) -> usize {
        self.data.len() / self.stride
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn element(&self, i: u32) -> &[u32] {
        let i = i as usize;
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn index_of_canonical(&self, x: &[u32]) -> Option<u32> {
        self.index.get(&self.law.key(x)).copied()
    }

    /// Looks up a payload after reducing it and choosing the canonical coset
    /// representative.
    pub fn index_of(&self, x: &[u32]) -> Option<u32> {
        if x.len() != self.stride {
            return None;
        }
        let r = self.law.radix() as u64;
        let mut v: Vec<u32> = x.iter().map(|&e| (e as u64 % r) as u32).collect();
        self.law.canonicalize(&mut v);
        self.index_of_canonical(&v)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let mut buf = [0u32; MAX_DIM * MAX_DIM];
        let out = &mut buf[..self.stride];
        self.law.mul_into(self.element(a), self.element(b), out);
        match self.index_of_canonical(out) {
            Some(i) => i,
            None => panic!("{}: product of {a} and {b} escaped the table", self.label),
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.cayley {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => self.mul_slow(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    /// `g a g⁻¹`.
    pub fn conj(&self, g: u32, a: u32) -> u32 {
        self.mul(self.mul(g, a), self.inv(g))
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    pub fn pow(&self, a: u32, e: i64) -> u32 {
        let mut base = if e < 0 { self.inv(a) } else { a };
        let mut e = e.unsigned_abs();
        let mut acc = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn all(&self) -> ElementSet {
        ElementSet::full(self.order())
    }

    pub fn empty_set(&self) -> ElementSet {
        ElementSet::empty(self.order())
    }

    pub fn singleton(&self, i: u32) -> ElementSet {
        ElementSet::singleton(self.order(), i)
    }

    pub fn format_element(&self, i: u32) -> String {
        let x = self.element(i);
        match &self.law {
            Law::Cyclic { .. } => x[0].to_string(),
            Law::Matrix { n, .. } => {
                let rows: Vec<String> = x
                    .chunks(*n)
                    .map(|r| format!("[{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                format!("[{}]", rows.join(","))
            }
        }
    }

    pub fn matrix_dim(&self) -> Option<usize> {
        match &self.law {
            Law::Matrix { n, .. } => Some(*n),
            Law::Cyclic { .. } => None,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.law.radix() as u32
    }

    // ---- subsets ----

    pub fn inverse_set(&self, s: &ElementSet) -> ElementSet {
        ElementSet::from_indices(self.order(), s.iter().map(|i| self.inv(i)))
    }

    pub fn is_symmetric(&self, s: &ElementSet) -> bool {
        s.iter().all(|i| s.contains(self.inv(i)))
    }

    /// Closed under conjugation by the generators (hence by the group).
    pub fn is_normal_set(&self, s: &ElementSet) -> bool {
        s.iter().all(|x| self.generators.iter().all(|&g| s.contains(self.conj(g, x))))
    }

    pub fn is_subgroup(&self, s: &ElementSet) -> bool {
        if !s.contains(0) {
            return false;
        }
        // grow a generated subgroup inside s; fail as soon as it leaves s
        let mut gens: Vec<u32> = Vec::new();
        let mut h = self.singleton(0);
        for x in s.iter() {
            if h.contains(x) {
                continue;
            }
            gens.push(x);
            match self.closure_within(&gens, s) {
                Some(c) => h = c,
                None => return false,
            }
        }
        h == *s
    }

    /// Subgroup generated by `gens`, or `None` once it leaves `bound`.
    fn closure_within(&self, gens: &[u32], bound: &ElementSet) -> Option<ElementSet> {
        let mut s = self.singleton(0);
        let mut queue = VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for &h in gens {
                let y = self.mul(x, h);
                if !bound.contains(y) {
                    return None;
                }
                if s.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Some(s)
    }

    pub fn is_normal_subgroup(&self, s: &ElementSet) -> bool {
        self.is_subgroup(s) && self.is_normal_set(s)
    }

    /// Subgroup generated by a set, by breadth-first closure.
    pub fn subgroup_closure(&self, gens: &ElementSet) -> ElementSet {
        self.closure_of(&gens.to_vec())
    }

    pub fn closure_of(&self, g: &[u32]) -> ElementSet {
        let mut s = self.singleton(0);
        let mut queue = VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for &h in g {
                let y = self.mul(x, h);
                if s.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        s
    }

    pub fn generates(&self, s: &ElementSet) -> bool {
        self.subgroup_closure(s).is_full()
    }

    /// A subset of `s` generating the same subgroup as `s`.
    pub fn generating_subset(&self, s: &ElementSet) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut h = self.singleton(0);
        for x in s.iter() {
            if !h.contains(x) {
                gens.push(x);
                h = self.closure_of(&gens);
            }
        }
        gens
    }

    pub fn centralizer(&self, s: &ElementSet) -> ElementSet {
        let v = if s.len() > 8 { self.generating_subset(s) } else { s.to_vec() };
        ElementSet::from_indices(
            self.order(),
            (0..self.order() as u32).filter(|&g| v.iter().all(|&x| self.mul(g, x) == self.mul(x, g))),
        )
    }

    pub fn center(&self) -> ElementSet {
        let gens = ElementSet::from_indices(self.order(), self.generators.iter().copied());
        self.centralizer(&gens)
    }

    // ---- conjugacy classes ----

    pub fn classes(&self) -> &ClassData {
        self.classes.get_or_init(|| {
            let order = self.order();
            let mut class_of = vec![u32::MAX; order];
            let mut reps = Vec::new();
            let mut members = Vec::new();
            for start in 0..order as u32 {
                if class_of[start as usize] != u32::MAX {
                    continue;
                }
                let id = reps.len() as u32;
                reps.push(start);
                class_of[start as usize] = id;
                let mut orbit = vec![start];
                let mut head = 0;
                while head < orbit.len() {
                    let x = orbit[head];
                    head += 1;
                    for &g in &self.generators {
                        let y = self.conj(g, x);
                        if class_of[y as usize] == u32::MAX {
                            class_of[y as usize] = id;
                            orbit.push(y);
                        }
                    }
                }
                orbit.sort_unstable();
                members.push(orbit);
            }
            ClassData { class_of, reps, members }
        })
    }

    /// Set of class ids meeting `s`; `None` when `s` is not a union of classes.
    pub fn class_ids(&self, s: &ElementSet) -> Option<Vec<u32>> {
        let cd = self.classes();
        let mut ids = Vec::new();
        for (c, mem) in cd.members.iter().enumerate() {
            let inside = mem.iter().filter(|&&x| s.contains(x)).count();
            if inside == mem.len() {
                ids.push(c as u32);
            } else if inside != 0 {
                return None;
            }
        }
        Some(ids)
    }

    pub fn set_from_classes(&self, ids: impl IntoIterator<Item = u32>) -> ElementSet {
        let cd = self.classes();
        let mut s = self.empty_set();
        for c in ids {
            for &x in &cd.members[c as usize] {
                s.insert(x);
            }
        }
        s
    }

    fn class_words(&self) -> usize {
        self.classes().count().div_ceil(64)
    }

    /// Row `i` of the class multiplication structure: for every class `j`
    /// the bitmask of classes meeting `C_i · C_j`.
    fn class_row(&self, i: usize) -> &[u64] {
        let k = self.classes().count();
        let rows = self.class_rows.get_or_init(|| (0..k).map(|_| OnceLock::new()).collect());
        rows[i].get_or_init(|| {
            let cd = self.classes();
            let w = self.class_words();
            let mut row = vec![0u64; k * w];
            let rep = cd.reps[i];
            // C_i C_j is a union of classes, namely those of rep·y for y in C_j
            for y in 0..self.order() as u32 {
                let cj = cd.class_of[y as usize] as usize;
                let t = cd.class_of[self.mul(rep, y) as usize] as usize;
                row[cj * w + t / 64] |= 1 << (t % 64);
            }
            row
        })
    }

    /// Product of two unions of conjugacy classes, given as class ids.
    pub fn class_product(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        // products of normal sets commute, so read rows of the shorter side
        let (a, b) = if b.len() < a.len() { (b, a) } else { (a, b) };
        let w = self.class_words();
        let mut acc = vec![0u64; w];
        for &i in a {
            let row = self.class_row(i as usize);
            for &j in b {
                for (t, v) in acc.iter_mut().zip(&row[j as usize * w..(j as usize + 1) * w]) {
                    *t |= v;
                }
            }
        }
        let mut out = Vec::new();
        for (wi, &word) in acc.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                out.push((wi * 64) as u32 + word.trailing_zeros());
                word &= word - 1;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_basics() {
        let g = GroupTable::cyclic(6).unwrap();
        assert_eq!(g.order(), 6);
        let two = g.index_of(&[2]).unwrap();
        assert_eq!(g.element_order(two), 3);
        assert_eq!(g.classes().count(), 6);
    }

    #[test]
    fn cap_is_enforced() {
        let law = Law::Cyclic { order: 100 };
        assert!(matches!(GroupTable::generate("c", law, &[vec![1]], 50), Err(Error::Budget(_))));
    }

    #[test]
    fn adjugate_inverts() {
        let a = [1u32, 2, 0, 3, 7, 1, 0, 0, 1];
        // det = 7 - 6 = 1
        assert_eq!(det_mod(3, &a, 11), 1);
        let b = adjugate_mod(3, &a, 11);
        let mut prod = [0u32; 9];
        Law::Matrix { n: 3, modulus: 11, scalars: vec![1] }.mul_into(&a, &b, &mut prod);
        assert_eq!(prod, [1, 0, 0, 0, 1, 0, 0, 0, 1]);
    }
}
