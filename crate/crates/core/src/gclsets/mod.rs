//! Symmetric normal sets `gcl(α)`, their product powers, normal closures,
//! congruence-ladder constants and adjoint-orbit sumsets.

mod adjoint;

pub use adjoint::{adjoint_saturation, AdjointSpace, LieAlgVec, Saturation, SaturationOutcome};

use crate::elementset::ElementSet;
use crate::error::{Error, Result};
use crate::matgroups::{star_kernel, congruence_kernel, Family, GroupTable};
use crate::rings::IdealSpec;
use serde::Serialize;

/// `{βαβ⁻¹, βα⁻¹β⁻¹ : β ∈ G} ∪ {id}`.
pub fn gcl(g: &GroupTable, a: u32) -> ElementSet {
    g.set_from_classes(gcl_classes(g, a))
}

fn gcl_classes(g: &GroupTable, a: u32) -> Vec<u32> {
    let cd = g.classes();
    let mut ids = vec![cd.class_of[0], cd.class_of[a as usize], cd.class_of[g.inv(a) as usize]];
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// `{st : s ∈ S, t ∈ T}`; unions of classes go through the class algebra.
pub fn set_product(g: &GroupTable, s: &ElementSet, t: &ElementSet) -> ElementSet {
    if let (Some(a), Some(b)) = (g.class_ids(s), g.class_ids(t)) {
        return g.set_from_classes(g.class_product(&a, &b));
    }
    let (sv, tv) = (s.to_vec(), t.to_vec());
    let mut out = g.empty_set();
    for &x in &sv {
        for &y in &tv {
            out.insert(g.mul(x, y));
        }
    }
    out
}

/// Class ids of `gcl(α)^k` for k = 1, 2, … up to `max` or the first
/// repetition (which is then the last entry).
fn gcl_power_chain(g: &GroupTable, a: u32, max: usize) -> Vec<Vec<u32>> {
    let base = gcl_classes(g, a);
    let mut chain = vec![base.clone()];
    while chain.len() < max {
        let next = g.class_product(chain.last().unwrap(), &base);
        let done = &next == chain.last().unwrap();
        chain.push(next);
        if done {
            break;
        }
    }
    chain
}

/// `gcl(α)^N`, stopping early once the powers stabilize.
pub fn gcl_power(g: &GroupTable, a: u32, n: usize) -> ElementSet {
    if n == 0 {
        return g.singleton(g.identity());
    }
    let chain = gcl_power_chain(g, a, n);
    g.set_from_classes(chain.last().unwrap().iter().copied())
}

/// Smallest normal subgroup containing `s`.
pub fn normal_closure(g: &GroupTable, s: &ElementSet) -> ElementSet {
    let mut conj = s.clone();
    let mut queue: Vec<u32> = s.to_vec();
    while let Some(x) = queue.pop() {
        for &h in g.generators() {
            let y = g.conj(h, x);
            if conj.insert(y) {
                queue.push(y);
            }
        }
    }
    g.subgroup_closure(&conj)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageProfile {
    /// `|gcl(α)^k|` for k = 1..=N+1.
    pub sizes: Vec<usize>,
    /// Least N with `gcl^N = gcl^{N+1}`.
    pub fixpoint_n: usize,
    #[serde(skip)]
    pub fixpoint: ElementSet,
}

pub fn coverage_profile(g: &GroupTable, a: u32) -> Result<CoverageProfile> {
    let chain = gcl_power_chain(g, a, usize::MAX);
    let sizes: Vec<usize> = chain.iter().map(|ids| ids.iter().map(|&c| g.classes().members[c as usize].len()).sum()).collect();
    let fixpoint = g.set_from_classes(chain.last().unwrap().iter().copied());
    if fixpoint != normal_closure(g, &g.singleton(a)) {
        return Err(Error::Invariant("gcl fixpoint differs from the normal closure".into()));
    }
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Invariant("gcl powers are not monotone".into()));
    }
    Ok(CoverageProfile { fixpoint_n: sizes.len() - 1, sizes, fixpoint })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TriplingVerdict {
    /// `S³ = G`.
    Covers,
    /// `|S³| > |S|`.
    Grows,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tripling {
    pub size: usize,
    pub size_cubed: usize,
    pub verdict: TriplingVerdict,
    /// `log|S³| / log|S|`; absent when `|S| = 1`.
    pub ratio: Option<f64>,
}

pub fn tripling(g: &GroupTable, s: &ElementSet) -> Result<Tripling> {
    if !s.contains(g.identity()) {
        return Err(Error::precondition("S does not contain the identity"));
    }
    if !g.is_symmetric(s) {
        return Err(Error::precondition("S is not symmetric"));
    }
    if !g.generates(s) {
        return Err(Error::precondition("S does not generate G"));
    }
    let s3 = set_product(g, &set_product(g, s, s), s);
    let verdict = if s3.is_full() {
        TriplingVerdict::Covers
    } else if s3.len() > s.len() {
        TriplingVerdict::Grows
    } else {
        return Err(Error::Invariant("S³ = S for a proper generating set".into()));
    };
    let ratio = (s.len() > 1).then(|| (s3.len() as f64).ln() / (s.len() as f64).ln());
    Ok(Tripling { size: s.len(), size_cubed: s3.len(), verdict, ratio })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LadderOutcome {
    Found { c: u32 },
    NoCover { max_covered_level: Option<u32> },
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderReport {
    pub p: u64,
    pub k: u32,
    pub n: u32,
    /// `|Z(G)| · 3`.
    pub exponent: usize,
    pub power_size: usize,
    pub outcome: LadderOutcome,
}

/// Ladder data of `SL_2(ℤ/p^k)`: prime, exponent and the kernels `G[p^m]`
/// for m = 0..=k.
pub struct Ladder<'g> {
    g: &'g GroupTable,
    p: u64,
    k: u32,
    kernels: Vec<ElementSet>,
    stars: Vec<ElementSet>,
    exponent: usize,
}

impl<'g> Ladder<'g> {
    pub fn new(g: &'g GroupTable) -> Result<Self> {
        let spec = g.spec().ok_or_else(|| Error::invalid("ladder needs an SL_2 table"))?;
        if spec.family != Family::SL || spec.n != 2 {
            return Err(Error::Unsupported(format!("ladder is defined on SL_2(zmod:p^k), got {spec}")));
        }
        let &[(p, k)] = spec.ring.factors() else {
            return Err(Error::Unsupported(format!("{} is not a prime-power residue ring", spec.ring)));
        };
        let mut kernels = Vec::new();
        let mut stars = Vec::new();
        for m in 0..=k {
            let q = IdealSpec::new(&spec.ring, p.pow(m));
            if m == 0 {
                kernels.push(g.all());
                stars.push(g.all());
            } else {
                kernels.push(congruence_kernel(g, &q)?);
                stars.push(star_kernel(g, &q)?);
            }
        }
        let exponent = g.center().len() * 3;
        Ok(Ladder { g, p, k, kernels, stars, exponent })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    /// Whether `x ∈ Z·G[p^n]`.
    pub fn in_star(&self, x: u32, n: u32) -> bool {
        self.stars[n as usize].contains(x)
    }

    /// Least c with `gcl(x)^E ⊇ G[p^{n+c}]`, scanning c = 0..=k−n.
    pub fn constant(&self, x: u32, n: u32) -> Result<LadderReport> {
        let power = gcl_power(self.g, x, self.exponent);
        self.constant_with_power(x, n, &power)
    }

    /// As [`Ladder::constant`] with `gcl(x)^E` supplied by the caller.
    pub fn constant_with_power(&self, x: u32, n: u32, power: &ElementSet) -> Result<LadderReport> {
        if n == 0 || n > self.k {
            return Err(Error::precondition(format!("need 1 <= n <= k = {}", self.k)));
        }
        if self.in_star(x, n) {
            return Err(Error::precondition(format!("element lies in Z·G[{}^{n}]", self.p)));
        }
        let mut outcome = LadderOutcome::NoCover { max_covered_level: None };
        for c in 0..=self.k - n {
            let kernel = &self.kernels[(n + c) as usize];
            if kernel.is_subset(power) {
                // re-verify element by element
                if kernel.iter().any(|y| !power.contains(y)) {
                    return Err(Error::Invariant("ladder containment failed re-verification".into()));
                }
                outcome = LadderOutcome::Found { c };
                break;
            }
        }
        if let LadderOutcome::NoCover { max_covered_level } = &mut outcome {
            *max_covered_level = (0..=self.k).find(|&m| self.kernels[m as usize].is_subset(power));
        }
        Ok(LadderReport { p: self.p, k: self.k, n, exponent: self.exponent, power_size: power.len(), outcome })
    }
}

pub fn ladder_constant(g: &GroupTable, x: u32, n: u32) -> Result<LadderReport> {
    Ladder::new(g)?.constant(x, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroups::{elementary, enumerate, index_of_mat};
    use crate::rings::RingSpec;

    fn gcl_oracle(g: &GroupTable, a: u32) -> ElementSet {
        let mut s = g.singleton(0);
        for b in 0..g.order() as u32 {
            s.insert(g.conj(b, a));
            s.insert(g.conj(b, g.inv(a)));
        }
        s
    }

    fn brute_product(g: &GroupTable, s: &ElementSet, t: &ElementSet) -> ElementSet {
        let mut out = g.empty_set();
        for x in s.iter() {
            for y in t.iter() {
                out.insert(g.mul(x, y));
            }
        }
        out
    }

    #[test]
    fn gcl_matches_conjugate_enumeration() {
        for spec in ["psl:2:gf:5", "sl:2:gf:3", "psl:3:gf:2"] {
            let g = enumerate(spec).unwrap();
            for a in 0..g.order() as u32 {
                let s = gcl(&g, a);
                assert_eq!(s, gcl_oracle(&g, a));
                assert_eq!(s, gcl(&g, g.inv(a)));
                assert!(g.is_symmetric(&s) && g.is_normal_set(&s) && s.contains(0));
            }
            assert_eq!(gcl(&g, 0), g.singleton(0));
        }
    }

    #[test]
    fn order_five_in_a5() {
        let g = enumerate("psl:2:gf:5").unwrap();
        let a = (0..60).find(|&x| g.element_order(x) == 5).unwrap();
        let s = gcl(&g, a);
        // one class of 12 five-cycles, closed under inversion
        assert_eq!(s.len(), 13);
        assert!(s.contains(a) && s.contains(g.inv(a)));
    }

    #[test]
    fn products_agree_with_brute_force() {
        let g = enumerate("sl:2:gf:3").unwrap();
        let normal = gcl(&g, 3);
        let odd = ElementSet::from_indices(g.order(), [1, 5, 7]);
        for (s, t) in [(&normal, &normal), (&normal, &odd), (&odd, &normal), (&odd, &odd)] {
            assert_eq!(set_product(&g, s, t), brute_product(&g, s, t));
        }
        let id = g.singleton(0);
        assert_eq!(set_product(&g, &odd, &id), odd);
        assert_eq!(set_product(&g, &id, &odd), odd);
    }

    #[test]
    fn coverage_examples() {
        let g = enumerate("sl:2:gf:3").unwrap();
        let z = g.center().iter().find(|&x| x != 0).unwrap();
        let prof = coverage_profile(&g, z).unwrap();
        assert_eq!(prof.fixpoint_n, 1);
        assert_eq!(prof.fixpoint, ElementSet::from_indices(24, [0, z]));

        let g = enumerate("psl:3:gf:2").unwrap();
        let r = RingSpec::gf(2).unwrap();
        let e12 = index_of_mat(&g, &elementary::<i64>(&r, 3, 1, 2, &1).unwrap()).unwrap();
        let prof = coverage_profile(&g, e12).unwrap();
        assert!(prof.fixpoint.is_full());
        assert_eq!(prof.sizes[prof.fixpoint_n - 1], prof.sizes[prof.fixpoint_n]);
        assert!(prof.sizes.windows(2).take(prof.fixpoint_n - 1).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tripling_examples() {
        let g = enumerate("psl:2:gf:7").unwrap();
        assert_eq!(tripling(&g, &g.all()).unwrap().verdict, TriplingVerdict::Covers);
        let inv = (1..168).find(|&x| g.element_order(x) == 2).unwrap();
        let t = tripling(&g, &gcl(&g, inv)).unwrap();
        assert!(t.size_cubed > t.size || t.verdict == TriplingVerdict::Covers);
        assert!(matches!(tripling(&g, &g.singleton(0)), Err(Error::Precondition(_))));
        let lopsided = ElementSet::from_indices(168, [0, g.generators()[0]]);
        assert!(matches!(tripling(&g, &lopsided), Err(Error::Precondition(_))));
    }

    #[test]
    fn ladder_examples() {
        let g = enumerate("sl:2:zmod:8").unwrap();
        let r = RingSpec::zmod(8).unwrap();
        let u = index_of_mat(&g, &elementary::<i64>(&r, 2, 1, 2, &1).unwrap()).unwrap();
        let rep = ladder_constant(&g, u, 1).unwrap();
        // λ² ≡ 1 mod 8 has four solutions
        assert_eq!(rep.exponent, 12);
        match rep.outcome {
            LadderOutcome::Found { c } => assert!(c <= 2),
            other => panic!("{other:?}"),
        }
        let z = g.center().iter().find(|&x| x != 0).unwrap();
        assert!(matches!(ladder_constant(&g, z, 1), Err(Error::Precondition(_))));
        assert!(ladder_constant(&enumerate("sl:2:zmod:6").unwrap(), 1, 1).is_err());
    }

    #[test]
    fn normal_closure_of_generator_is_whole_simple_group() {
        let g = enumerate("psl:2:gf:7").unwrap();
        assert!(normal_closure(&g, &g.singleton(g.generators()[0])).is_full());
        assert_eq!(normal_closure(&g, &g.singleton(0)), g.singleton(0));
    }
}
