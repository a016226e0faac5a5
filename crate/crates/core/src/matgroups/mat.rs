use crate::error::{Error, Result};
use crate::rings::RingSpec;
use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::fmt;

/// A square matrix of determinant 1 over a [`RingSpec`], entries canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat<T: Scalar> {
    n: usize,
    ring: RingSpec,
    entries: Vec<T>,
}

fn det_generic<T: Scalar>(ring: &RingSpec, n: usize, a: &[T]) -> T {
    match n {
        0 => T::one(),
        1 => ring.reduce(&a[0]),
        2 => ring.sub(&ring.mul(&a[0], &a[3]), &ring.mul(&a[1], &a[2])),
        _ => {
            // cofactor expansion along the first row
            let mut acc = T::zero();
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            for col in 0..n {
                if a[col].is_zero() {
                    continue;
                }
                minor.clear();
                for r in 1..n {
                    for c in 0..n {
                        if c != col {
                            minor.push(a[r * n + c].clone());
                        }
                    }
                }
                let term = ring.mul(&a[col], &det_generic(ring, n - 1, &minor));
                acc = if col % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
            }
            acc
        }
    }
}

impl<T: Scalar> Mat<T> {
    /// Builds a matrix from row-major entries, reducing them and checking
    /// that the determinant is 1.
    pub fn new(ring: &RingSpec, n: usize, entries: Vec<T>) -> Result<Self> {
        if n < 1 || entries.len() != n * n {
            return Err(Error::invalid(format!("expected {} entries for a {n}x{n} matrix, got {}", n * n, entries.len())));
        }
        let m = Self::new_unchecked(ring, n, entries);
        let d = m.det();
        if !d.is_one() {
            return Err(Error::invalid(format!("determinant is {d}, not 1")));
        }
        Ok(m)
    }

    pub fn from_rows(ring: &RingSpec, rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix literal is not square"));
        }
        Self::new(ring, n, rows.into_iter().flatten().collect())
    }

    /// No determinant check; entries are still reduced.
    pub(crate) fn new_unchecked(ring: &RingSpec, n: usize, entries: Vec<T>) -> Self {
        let entries = entries.iter().map(|v| ring.reduce(v)).collect();
        Mat { n, ring: ring.clone(), entries }
    }

    pub fn identity(ring: &RingSpec, n: usize) -> Self {
        let mut entries = vec![T::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = T::one();
        }
        Mat { n, ring: ring.clone(), entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// Zero-based entry access.
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn det(&self) -> T {
        det_generic(&self.ring, self.n, &self.entries)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.ring, self.n)
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        assert_eq!(self.ring, other.ring, "ring mismatch");
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let n = self.n;
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        out[i * n + j] = out[i * n + j].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Self::new_unchecked(&self.ring, n, out)
    }

    /// Adjugate, which is the inverse since the determinant is 1.
    pub fn inverse(&self) -> Self {
        let n = self.n;
        if n == 1 {
            return self.clone();
        }
        let mut out = vec![T::zero(); n * n];
        let mut minor = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            for j in 0..n {
                minor.clear();
                for r in 0..n {
                    for c in 0..n {
                        if r != i && c != j {
                            minor.push(self.entries[r * n + c].clone());
                        }
                    }
                }
                let cof = det_generic(&self.ring, n - 1, &minor);
                // adj[j][i] = (-1)^{i+j} det(minor_ij)
                out[j * n + i] = if (i + j) % 2 == 0 { cof } else { self.ring.neg(&cof) };
            }
        }
        Self::new_unchecked(&self.ring, n, out)
    }

    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::identity(&self.ring, self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `g · self · g⁻¹`.
    pub fn conj_by(&self, g: &Self) -> Self {
        g.mul(self).mul(&g.inverse())
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.inverse().mul(&b.inverse()).mul(a).mul(b)
    }

    pub fn scale(&self, lambda: &T) -> Self {
        let entries = self.entries.iter().map(|v| self.ring.mul(v, lambda)).collect();
        Mat { n: self.n, ring: self.ring.clone(), entries }
    }

    /// Row-major lexicographic comparison in the ring's canonical order.
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        for (a, b) in self.entries.iter().zip(&other.entries) {
            match self.ring.cmp_canonical(a, b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    pub fn map_scalar<U: Scalar>(&self) -> Option<Mat<U>> {
        let entries = self
            .entries
            .iter()
            .map(|v| U::from_bigint(&v.to_bigint()))
            .collect::<Option<Vec<U>>>()?;
        Some(Mat { n: self.n, ring: self.ring.clone(), entries })
    }

    /// Residues as `u32`, for finite rings whose modulus fits.
    pub fn to_residues(&self) -> Option<Vec<u32>> {
        self.ring.modulus()?;
        self.entries.iter().map(|v| v.to_u32()).collect()
    }

    pub fn from_residues(ring: &RingSpec, n: usize, res: &[u32]) -> Self {
        Self::new_unchecked(ring, n, res.iter().map(|&v| T::from_u32(v).expect("residue fits scalar")).collect())
    }
}

impl<T: Scalar> fmt::Display for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `e_{i,j}(a)`: the identity with `a` at (i, j). Indices are 1-based.
pub fn elementary<T: Scalar>(ring: &RingSpec, n: usize, i: usize, j: usize, a: &T) -> Result<Mat<T>> {
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(Error::invalid(format!("elementary matrix needs 1 <= i != j <= {n}, got ({i},{j})")));
    }
    let mut m = Mat::identity(ring, n);
    m.entries[(i - 1) * n + (j - 1)] = ring.reduce(a);
    Ok(m)
}

/// A signed permutation matrix `P` of determinant 1 with
/// `P e_{1,n}(a) P⁻¹ = e_{i,j}(a)` for every `a`.
///
/// The permutation sends basis vector 1 to `i`, `n` to `j` and fills the
/// remaining slots in increasing order; when it is odd one middle column
/// is negated.
pub fn perm_conjugator<T: Scalar>(ring: &RingSpec, n: usize, i: usize, j: usize) -> Result<Mat<T>> {
    if n < 3 {
        return Err(Error::invalid("perm_conjugator needs n >= 3"));
    }
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(Error::invalid(format!("perm_conjugator needs 1 <= i != j <= {n}, got ({i},{j})")));
    }
    // images[k] = image of basis vector k (0-based)
    let mut images = vec![0usize; n];
    images[0] = i - 1;
    images[n - 1] = j - 1;
    let mut rest = (0..n).filter(|&k| k != i - 1 && k != j - 1);
    for slot in images.iter_mut().take(n - 1).skip(1) {
        *slot = rest.next().expect("n - 2 remaining targets");
    }
    let inversions = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| images[a] > images[b]).count();
    let mut entries = vec![T::zero(); n * n];
    for (k, &img) in images.iter().enumerate() {
        // column k holds ±e_{img}
        let sign_neg = inversions % 2 == 1 && k == 1;
        entries[img * n + k] = if sign_neg { ring.neg(&T::one()) } else { T::one() };
    }
    let p = Mat::new(ring, n, entries)?;
    for a in [T::one(), T::from_i64(2).expect("2 fits")] {
        let lhs = elementary(ring, n, 1, n, &a)?.conj_by(&p);
        let rhs = elementary(ring, n, i, j, &a)?;
        if lhs != rhs {
            return Err(Error::Invariant(format!("p_({i},{j}) fails the conjugation identity")));
        }
    }
    Ok(p)
}

/// An element of PSL_n: the lexicographically least matrix among the
/// multiples `λ·rep` with `λ` a unit and `λ^n = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjMat<T: Scalar> {
    rep: Mat<T>,
}

impl<T: Scalar> ProjMat<T> {
    pub fn rep(&self) -> &Mat<T> {
        &self.rep
    }

    pub fn n(&self) -> usize {
        self.rep.n
    }

    pub fn ring(&self) -> &RingSpec {
        &self.rep.ring
    }

    pub fn mul(&self, other: &Self) -> Self {
        psl_project(&self.rep.mul(&other.rep))
    }

    pub fn inverse(&self) -> Self {
        psl_project(&self.rep.inverse())
    }

    pub fn conj_by(&self, g: &Self) -> Self {
        psl_project(&self.rep.conj_by(&g.rep))
    }

    pub fn commutator(a: &Self, b: &Self) -> Self {
        psl_project(&Mat::commutator(&a.rep, &b.rep))
    }

    pub fn is_identity(&self) -> bool {
        self.rep.is_identity()
    }
}

impl<T: Scalar> fmt::Display for ProjMat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.rep.fmt(f)
    }
}

pub fn psl_project<T: Scalar>(m: &Mat<T>) -> ProjMat<T> {
    let mut best = m.clone();
    for lambda in m.ring.roots_of_unity::<T>(m.n) {
        if lambda.is_one() {
            continue;
        }
        let cand = m.scale(&lambda);
        if cand.cmp_lex(&best) == Ordering::Less {
            best = cand;
        }
    }
    ProjMat { rep: best }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ring(s: &str) -> RingSpec {
        s.parse().unwrap()
    }

    #[test]
    fn elementary_examples() {
        let z5 = ring("zmod:5");
        let e = elementary::<i64>(&z5, 3, 1, 3, &0).unwrap();
        assert!(e.is_identity());
        assert!(elementary::<i64>(&z5, 3, 2, 2, &1).is_err());

        let int = RingSpec::Integers;
        let a = elementary(&int, 2, 1, 2, &BigInt::from(2)).unwrap();
        let b = elementary(&int, 2, 1, 2, &BigInt::from(3)).unwrap();
        assert_eq!(a.mul(&b), elementary(&int, 2, 1, 2, &BigInt::from(5)).unwrap());

        // order of e_{1,2}(1) over gf:5 by repeated multiplication
        let gf5 = ring("gf:5");
        let g = elementary::<i64>(&gf5, 2, 1, 2, &1).unwrap();
        let mut x = g.clone();
        let mut order = 1;
        while !x.is_identity() {
            x = x.mul(&g);
            order += 1;
        }
        assert_eq!(order, 5);
    }

    #[test]
    fn perm_conjugator_examples() {
        let int = RingSpec::Integers;
        let p = perm_conjugator::<BigInt>(&int, 3, 1, 3).unwrap();
        assert!(p.is_identity());
        let p12 = perm_conjugator::<BigInt>(&int, 3, 1, 2).unwrap();
        let seven = BigInt::from(7);
        assert_eq!(
            elementary(&int, 3, 1, 3, &seven).unwrap().conj_by(&p12),
            elementary(&int, 3, 1, 2, &seven).unwrap()
        );
        let z9 = ring("zmod:9");
        let p23 = perm_conjugator::<i64>(&z9, 3, 2, 3).unwrap();
        for a in [1i64, 2, -1] {
            assert_eq!(
                elementary(&z9, 3, 1, 3, &a).unwrap().conj_by(&p23),
                elementary(&z9, 3, 2, 3, &a).unwrap()
            );
        }
        assert!(perm_conjugator::<i64>(&z9, 2, 1, 2).is_err());
    }

    #[test]
    fn perm_conjugators_all_pairs() {
        for n in 3..=5 {
            for r in [RingSpec::Integers, ring("zmod:7"), ring("zmod:2")] {
                for i in 1..=n {
                    for j in 1..=n {
                        if i != j {
                            let p = perm_conjugator::<i64>(&r, n, i, j).unwrap();
                            assert_eq!(p.det(), 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_and_det() {
        let z4 = ring("zmod:4");
        let m = Mat::<i64>::from_rows(&z4, vec![vec![1, 2, 3], vec![0, 1, 1], vec![2, 3, 3]]);
        // det = 1*(3-3) - 2*(0-2) + 3*(0-2) = 0 + 4 - 6 = -2 ≡ 2
        assert!(m.is_err());
        let m = Mat::<i64>::from_rows(&z4, vec![vec![1, 2, 3], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        assert!(m.mul(&m.inverse()).is_identity());
        assert!(m.pow(-3).mul(&m.pow(3)).is_identity());
    }

    #[test]
    fn psl_project_scalar_cosets() {
        let z7 = ring("zmod:7");
        let roots = z7.roots_of_unity::<i64>(3);
        assert_eq!(roots, vec![1, 2, 4]);
        let id = Mat::<i64>::identity(&z7, 3);
        for l in &roots {
            assert_eq!(psl_project(&id.scale(l)), psl_project(&id));
        }
        let m = elementary::<i64>(&z7, 3, 2, 1, &3).unwrap();
        let classes: std::collections::HashSet<_> = roots.iter().map(|l| m.scale(l)).collect();
        assert_eq!(classes.len(), 3);
        assert_eq!(psl_project(&m.scale(&2)), psl_project(&m));
    }

    #[test]
    fn integer_projection_prefers_positive_identity() {
        let int = RingSpec::Integers;
        let m = elementary(&int, 4, 1, 4, &BigInt::from(-5)).unwrap();
        let p = psl_project(&m.scale(&BigInt::from(-1)));
        assert_eq!(p.rep(), &m);
    }
}
