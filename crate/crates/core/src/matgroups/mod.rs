//! SL_n and PSL_n over ℤ and ℤ/m: elementary matrices, permutation
//! conjugators, enumeration, congruence subgroups and reduction maps.

mod mat;
mod table;

pub use mat::{elementary, perm_conjugator, psl_project, Mat, ProjMat};
pub use table::{ClassData, GroupTable, Law, MAX_DIM};

use crate::elementset::ElementSet;
use crate::error::{Error, Result};
use crate::rings::{IdealSpec, RingSpec};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_ORDER_CAP: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    SL,
    PSL,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: Family,
    pub n: usize,
    pub ring: RingSpec,
}

impl GroupSpec {
    pub fn new(family: Family, n: usize, ring: RingSpec) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("matrix dimension must be >= 2, got {n}")));
        }
        if !ring.is_finite() {
            return Err(Error::Unsupported("groups over the integers cannot be enumerated".into()));
        }
        if n > MAX_DIM {
            return Err(Error::Unsupported(format!("dimension {n} exceeds {MAX_DIM}")));
        }
        Ok(GroupSpec { family, n, ring })
    }

    pub fn modulus(&self) -> u64 {
        self.ring.modulus().expect("finite ring")
    }

    /// Scalars identified in the quotient (just 1 for SL).
    pub fn scalars(&self) -> Vec<u32> {
        match self.family {
            Family::SL => vec![1],
            Family::PSL => self.ring.roots_of_unity::<i64>(self.n).into_iter().map(|v| v as u32).collect(),
        }
    }

    /// Order from the closed formula
    /// |SL_n(ℤ/p^e)| = p^{(e-1)(n²-1)} · p^{n(n-1)/2} ∏_{i=2..n} (p^i - 1).
    pub fn predicted_order(&self) -> u128 {
        let n = self.n as u32;
        let mut order: u128 = 1;
        for &(p, e) in self.ring.factors() {
            let p = p as u128;
            let mut f = p.pow((e - 1) * (n * n - 1)) * p.pow(n * (n - 1) / 2);
            for i in 2..=n {
                f *= p.pow(i) - 1;
            }
            order *= f;
        }
        match self.family {
            Family::SL => order,
            Family::PSL => order / self.scalars().len() as u128,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::SL => "sl",
            Family::PSL => "psl",
        };
        write!(f, "{fam}:{}:{}", self.n, self.ring)
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Grammar: `sl:<n>:<ring> | psl:<n>:<ring>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s.splitn(3, ':');
        let fam = parts.next().unwrap_or_default();
        let family = match fam {
            "sl" => Family::SL,
            "psl" => Family::PSL,
            other => return Err(Error::syntax(0, format!("unknown group family `{other}`"))),
        };
        let n_text = parts.next().ok_or_else(|| Error::syntax(s.len(), "missing dimension"))?;
        let n: usize = n_text
            .parse()
            .map_err(|_| Error::syntax(fam.len() + 1, format!("bad dimension `{n_text}`")))?;
        let ring_text = parts.next().ok_or_else(|| Error::syntax(s.len(), "missing ring"))?;
        let ring: RingSpec = ring_text.parse().map_err(|e| match e {
            Error::Syntax { pos, msg } => Error::syntax(pos + fam.len() + n_text.len() + 2, msg),
            other => other,
        })?;
        GroupSpec::new(family, n, ring)
    }
}

/// Enumerates SL_n or PSL_n over a finite ring from the generators
/// `e_{i,j}(±1)`.
pub fn enumerate_group(spec: &GroupSpec, cap: usize) -> Result<GroupTable> {
    let predicted = spec.predicted_order();
    if predicted > cap as u128 {
        return Err(Error::Budget(format!("{spec}: predicted order {predicted} exceeds cap {cap}")));
    }
    let n = spec.n;
    let m = spec.modulus() as u32;
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for a in [1, m - 1] {
                let mut g = vec![0u32; n * n];
                for k in 0..n {
                    g[k * n + k] = 1;
                }
                g[i * n + j] = a % m;
                gens.push(g);
            }
        }
    }
    let law = Law::Matrix { n, modulus: m, scalars: spec.scalars() };
    let table = GroupTable::generate(spec.to_string(), law, &gens, cap)?.with_spec(spec.clone());
    if table.order() as u128 != predicted {
        return Err(Error::Invariant(format!(
            "{spec}: enumerated {} elements, formula predicts {predicted}",
            table.order()
        )));
    }
    Ok(table)
}

pub fn enumerate(text: &str) -> Result<GroupTable> {
    enumerate_group(&text.parse()?, DEFAULT_ORDER_CAP)
}

/// Resolves `sl:n:<ring>`, `psl:n:<ring>` or `cyclic:k`.
pub fn group_from_spec(text: &str, cap: usize) -> Result<GroupTable> {
    if let Some(k) = text.strip_prefix("cyclic:") {
        let k: u32 = k.parse().map_err(|_| Error::syntax(7, format!("bad cyclic order `{k}`")))?;
        if k as usize > cap {
            return Err(Error::Budget(format!("cyclic:{k} exceeds cap {cap}")));
        }
        return GroupTable::cyclic(k);
    }
    enumerate_group(&text.parse()?, cap)
}

/// Parses an element: `id`, a matrix literal `[[..],..]`, an elementary
/// matrix `e:i,j:a` (1-based), or an integer residue for a cyclic group.
pub fn parse_element(g: &GroupTable, text: &str) -> Result<u32> {
    let text = text.trim();
    if text == "id" {
        return Ok(g.identity());
    }
    let missing = || Error::invalid(format!("`{text}` is not an element of {}", g.label()));
    if let Some(rest) = text.strip_prefix("e:") {
        let spec = spec_of(g)?;
        let (ij, a) = rest.split_once(':').ok_or_else(|| Error::syntax(2, "expected e:i,j:a"))?;
        let (i, j) = ij.split_once(',').ok_or_else(|| Error::syntax(2, "expected e:i,j:a"))?;
        let num = |s: &str, pos: usize| s.trim().parse::<i64>().map_err(|_| Error::syntax(pos, format!("bad number `{s}`")));
        let (i, j, a) = (num(i, 2)?, num(j, 3 + i.len())?, num(a, 3 + ij.len())?);
        if i < 1 || j < 1 {
            return Err(Error::invalid("elementary indices are 1-based"));
        }
        let e = elementary::<i64>(&spec.ring, spec.n, i as usize, j as usize, &spec.ring.reduce(&a))?;
        return index_of_mat(g, &e).ok_or_else(missing);
    }
    if text.starts_with('[') {
        let rows = parse_int_rows(text)?;
        let n = g.matrix_dim().ok_or_else(|| Error::invalid(format!("{} is not a matrix group", g.label())))?;
        if rows.len() != n {
            return Err(Error::invalid(format!("expected a {n}x{n} matrix")));
        }
        let m = g.modulus() as i64;
        let flat: Vec<u32> = rows.iter().flatten().map(|&x| x.rem_euclid(m) as u32).collect();
        return g.index_of(&flat).ok_or_else(missing);
    }
    if g.matrix_dim().is_none() {
        let v: i64 = text.parse().map_err(|_| Error::syntax(0, format!("bad residue `{text}`")))?;
        return g.index_of(&[v.rem_euclid(g.modulus() as i64) as u32]).ok_or_else(missing);
    }
    Err(Error::syntax(0, format!("unrecognized element `{text}` (expected id, e:i,j:a or [[..]])")))
}

fn spec_of(g: &GroupTable) -> Result<&GroupSpec> {
    g.spec().ok_or_else(|| Error::invalid(format!("{} is not an SL/PSL table", g.label())))
}

/// The element of `g` represented by a matrix (any coset representative).
pub fn index_of_mat<T: Scalar>(g: &GroupTable, m: &Mat<T>) -> Option<u32> {
    g.index_of(&m.to_residues()?)
}

/// The canonical representative of element `i` as a matrix.
pub fn mat_of<T: Scalar>(g: &GroupTable, i: u32) -> Result<Mat<T>> {
    let spec = spec_of(g)?;
    Ok(Mat::from_residues(&spec.ring, spec.n, g.element(i)))
}

/// Congruence kernel modulo an arbitrary proper ideal: elements whose coset
/// contains a matrix ≡ I mod the ideal.
pub fn congruence_kernel(g: &GroupTable, q: &IdealSpec) -> Result<ElementSet> {
    let spec = spec_of(g)?;
    let level = check_ideal(spec, q)? as u64;
    let m = spec.modulus();
    let n = spec.n;
    let scalars = spec.scalars();
    let is_identity_mod = |x: &[u32], lambda: u32| {
        (0..n * n).all(|k| {
            let v = x[k] as u64 * lambda as u64 % m % level;
            let want = if k % (n + 1) == 0 { 1 % level } else { 0 };
            v == want
        })
    };
    Ok(ElementSet::from_indices(
        g.order(),
        (0..g.order() as u32).filter(|&i| scalars.iter().any(|&l| is_identity_mod(g.element(i), l))),
    ))
}

/// Preimage of the centre of SL_n(A/q): elements that are scalar modulo q.
pub fn star_kernel(g: &GroupTable, q: &IdealSpec) -> Result<ElementSet> {
    let spec = spec_of(g)?;
    let level = check_ideal(spec, q)?;
    let n = spec.n;
    let is_scalar_mod = |x: &[u32]| {
        let d = x[0] % level;
        (0..n * n).all(|k| {
            let v = x[k] % level;
            if k % (n + 1) == 0 {
                v == d
            } else {
                v == 0
            }
        })
    };
    Ok(ElementSet::from_indices(g.order(), (0..g.order() as u32).filter(|&i| is_scalar_mod(g.element(i)))))
}

fn check_ideal(spec: &GroupSpec, q: &IdealSpec) -> Result<u32> {
    let m = spec.modulus();
    let gen = num_traits::ToPrimitive::to_u64(&q.generator.0)
        .ok_or_else(|| Error::invalid(format!("ideal {q} is not an ideal of {}", spec.ring)))?;
    if gen != 0 && m % gen != 0 {
        return Err(Error::invalid(format!("ideal {q} is not in canonical form for {}", spec.ring)));
    }
    let level = q.quotient_modulus(&spec.ring);
    if level == 1 {
        return Err(Error::invalid(format!("{q} is the unit ideal of {}", spec.ring)));
    }
    Ok(level as u32)
}

fn check_maximal(g: &GroupTable, q: &IdealSpec) -> Result<()> {
    let spec = spec_of(g)?;
    if !q.is_maximal(&spec.ring) {
        return Err(Error::invalid(format!("{q} is not a maximal ideal of {}", spec.ring)));
    }
    Ok(())
}

/// SL_n(A; q), the kernel of reduction modulo a maximal ideal.
pub fn congruence_subgroup(g: &GroupTable, q: &IdealSpec) -> Result<ElementSet> {
    check_maximal(g, q)?;
    congruence_kernel(g, q)
}

/// SL*_n(A; q), the preimage of the centre of the quotient.
pub fn star_congruence_subgroup(g: &GroupTable, q: &IdealSpec) -> Result<ElementSet> {
    check_maximal(g, q)?;
    star_kernel(g, q)
}

/// U(A) = E_{1,2}(A) ⋯ E_{1,n}(A): matrices whose first row is `(1, *, …, *)`
/// and which agree with the identity elsewhere.
pub fn unipotent_row(g: &GroupTable) -> Result<ElementSet> {
    let spec = spec_of(g)?;
    let n = spec.n;
    if n < 3 {
        return Err(Error::invalid("U(A) is only used for n >= 3"));
    }
    let m = spec.modulus() as u32;
    let mut out = g.empty_set();
    let mut row = vec![0u32; n - 1];
    loop {
        let mut x = vec![0u32; n * n];
        for k in 0..n {
            x[k * n + k] = 1;
        }
        x[1..n].copy_from_slice(&row);
        let i = g.index_of(&x).ok_or_else(|| Error::Invariant("row unipotent missing from table".into()))?;
        out.insert(i);
        // odometer over (ℤ/m)^{n-1}
        let mut k = 0;
        loop {
            if k == n - 1 {
                return Ok(out);
            }
            row[k] += 1;
            if row[k] < m {
                break;
            }
            row[k] = 0;
            k += 1;
        }
    }
}

/// U(A; q) = U(A) ∩ SL_n(A; q).
pub fn row_congruence(g: &GroupTable, q: &IdealSpec) -> Result<ElementSet> {
    Ok(unipotent_row(g)?.intersection(&congruence_kernel(g, q)?))
}

/// Reduction ρ_q from `g` into `target`, a table of the same family and
/// dimension over A/q. Returns the image index of every element.
pub fn reduction_map(g: &GroupTable, q: &IdealSpec, target: &GroupTable) -> Result<Vec<u32>> {
    let spec = spec_of(g)?;
    let tspec = spec_of(target)?;
    let level = check_ideal(spec, q)?;
    if tspec.n != spec.n || tspec.family != spec.family || tspec.modulus() != level as u64 {
        return Err(Error::invalid(format!("{} is not the reduction target of {} mod {q}", target.label(), g.label())));
    }
    (0..g.order() as u32)
        .map(|i| {
            let x: Vec<u32> = g.element(i).iter().map(|v| v % level).collect();
            target.index_of(&x).ok_or_else(|| Error::Invariant("reduction left the target group".into()))
        })
        .collect()
}

/// Parses a square integer matrix literal such as `[[1,2],[0,1]]`.
pub fn parse_int_rows(text: &str) -> Result<Vec<Vec<i64>>> {
    let rows: Vec<Vec<i64>> = serde_json::from_str(text.trim()).map_err(|e| Error::syntax(e.column().saturating_sub(1), e.to_string()))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid(format!("`{text}` is not a non-empty square matrix")));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(ring: &RingSpec, g: i64) -> IdealSpec {
        IdealSpec::new(ring, g)
    }

    #[test]
    fn element_specs() {
        let g = enumerate("psl:3:gf:2").unwrap();
        assert_eq!(parse_element(&g, "id").unwrap(), 0);
        let e = parse_element(&g, "e:1,3:1").unwrap();
        assert_eq!(g.format_element(e), "[[1,0,1],[0,1,0],[0,0,1]]");
        assert_eq!(parse_element(&g, "[[1,0,1],[0,1,0],[0,0,1]]").unwrap(), e);
        assert!(parse_element(&g, "e:1,1:1").is_err());
        assert!(parse_element(&g, "[[1,1],[0,1]]").is_err());
        assert!(parse_element(&g, "x").is_err());
        let c = group_from_spec("cyclic:12", 100).unwrap();
        assert_eq!(parse_element(&c, "-1").unwrap(), c.index_of(&[11]).unwrap());
        assert!(group_from_spec("cyclic:12", 5).is_err());
        assert!(group_from_spec("psl:1:gf:5", 100).is_err());
    }

    #[test]
    fn matrix_literals() {
        assert_eq!(parse_int_rows("[[1, -2],[0,1]]").unwrap(), vec![vec![1, -2], vec![0, 1]]);
        assert!(matches!(parse_int_rows("[[1,2],[3]]"), Err(Error::Invalid(_))));
        assert!(matches!(parse_int_rows("[[1,2"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn parse_group_specs() {
        let s: GroupSpec = "psl:3:zmod:4".parse().unwrap();
        assert_eq!(s.family, Family::PSL);
        assert_eq!(s.n, 3);
        assert_eq!(s.ring, RingSpec::zmod(4).unwrap());
        assert!("psl:1:gf:5".parse::<GroupSpec>().is_err());
        assert!("gl:2:gf:5".parse::<GroupSpec>().is_err());
        assert!("sl:2:int".parse::<GroupSpec>().is_err());
        assert!(matches!("sl:2:gf:6".parse::<GroupSpec>(), Err(Error::Invalid(_))));
        assert_eq!(s.to_string(), "psl:3:zmod:4");
    }

    #[test]
    fn enumeration_orders() {
        assert_eq!(enumerate("psl:3:gf:2").unwrap().order(), 168);
        assert_eq!(enumerate("sl:2:zmod:4").unwrap().order(), 48);
        assert_eq!(enumerate("sl:2:gf:3").unwrap().order(), 24);
        assert_eq!(enumerate("psl:2:gf:5").unwrap().order(), 60);
    }

    #[test]
    fn cap_exceeded() {
        let s: GroupSpec = "sl:3:gf:5".parse().unwrap();
        assert!(matches!(enumerate_group(&s, 1000), Err(Error::Budget(_))));
    }

    #[test]
    fn congruence_examples() {
        let g = enumerate("sl:2:zmod:4").unwrap();
        let r = RingSpec::zmod(4).unwrap();
        let k = congruence_subgroup(&g, &q(&r, 2)).unwrap();
        assert_eq!(k.len(), 8);
        assert!(g.is_normal_subgroup(&k));
        let star = star_congruence_subgroup(&g, &q(&r, 2)).unwrap();
        assert_eq!(star, k);
        assert!(congruence_subgroup(&g, &q(&r, 0)).is_err());

        let g3 = enumerate("sl:3:gf:3").unwrap();
        let k = congruence_subgroup(&g3, &q(&RingSpec::gf(3).unwrap(), 0)).unwrap();
        assert_eq!(k.to_vec(), vec![0]);

        let g6 = enumerate("sl:2:zmod:6").unwrap();
        let r6 = RingSpec::zmod(6).unwrap();
        let k = congruence_subgroup(&g6, &q(&r6, 3)).unwrap();
        assert_eq!(g6.order() / k.len(), 24);
    }

    #[test]
    fn star_examples() {
        let g = enumerate("sl:3:gf:2").unwrap();
        let star = star_congruence_subgroup(&g, &IdealSpec::zero()).unwrap();
        assert_eq!(star.to_vec(), vec![0]);
        let g5 = enumerate("sl:2:gf:5").unwrap();
        let star = star_congruence_subgroup(&g5, &IdealSpec::zero()).unwrap();
        assert_eq!(star.len(), 2);
        assert_eq!(star, g5.center());
    }

    #[test]
    fn unipotent_examples() {
        let g = enumerate("sl:3:zmod:4").unwrap();
        let u = unipotent_row(&g).unwrap();
        assert_eq!(u.len(), 16);
        let r = RingSpec::zmod(4).unwrap();
        let uq = row_congruence(&g, &q(&r, 2)).unwrap();
        let star = star_congruence_subgroup(&g, &q(&r, 2)).unwrap();
        assert_eq!(u.intersection(&star), uq);
        assert_eq!(uq.len(), 4);
        let g2 = enumerate("sl:3:gf:2").unwrap();
        assert_eq!(unipotent_row(&g2).unwrap().len(), 4);
    }
}
