use adl_core::folcheck::{definable_set, parse_formula, Env};
use adl_core::gclsets::gcl;
use adl_core::matgroups::{group_from_spec, parse_element};
use adl_core::wordwidth::{parse_word, word_image};
use proptest::prelude::*;
use std::collections::BTreeSet;

#[test]
fn centralizer_by_formula_matches_direct_scan() {
    let g = group_from_spec("sl:2:gf:5", 1 << 20).unwrap();
    let c = parse_element(&g, "e:1,2:1").unwrap();
    let f = parse_formula("x*c = c*x").unwrap();
    let env: Env = [("c".to_string(), c)].into_iter().collect();
    let got: Vec<u32> = definable_set(&g, &f, &["x"], &env).unwrap().into_iter().map(|t| t[0]).collect();
    let want: Vec<u32> = (0..g.order() as u32).filter(|&x| g.mul(x, c) == g.mul(c, x)).collect();
    // ±[[1,t],[0,1]]
    assert_eq!(want.len(), 10);
    assert_eq!(got, want);
}

#[test]
fn gcl_is_class_union_inverse_class_and_identity() {
    let g = group_from_spec("psl:2:gf:7", 1 << 20).unwrap();
    let a = parse_element(&g, "e:1,2:1").unwrap();
    let mut want = BTreeSet::from([g.identity()]);
    for h in 0..g.order() as u32 {
        let conj = g.mul(g.mul(h, a), g.inv(h));
        want.insert(conj);
        want.insert(g.inv(conj));
    }
    let got: BTreeSet<u32> = gcl(&g, a).iter().collect();
    assert_eq!(got, want);
    assert_eq!(got.len(), 1 + 24 + 24);
}

#[test]
fn square_map_image_in_cyclic_group() {
    let g = group_from_spec("cyclic:12", 1 << 20).unwrap();
    let img = word_image(&g, &parse_word("x^2").unwrap(), 1 << 30).unwrap();
    assert_eq!(img.len(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_image_of_x_to_k_matches_gcd(n in 2u64..40, k in 1i64..12) {
        let g = group_from_spec(&format!("cyclic:{n}"), 1 << 20).unwrap();
        let img = word_image(&g, &parse_word(&format!("x^{k}")).unwrap(), 1 << 30).unwrap();
        prop_assert_eq!(img.len() as u64, n / num_integer::gcd(n, k as u64));
    }
}
