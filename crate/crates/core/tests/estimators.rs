use explab::freegroup::{sphere_size, w};
use explab::series::{delta_via_pressure, pressure, DEFAULT_ROOT_TOL};
use explab::verify::{check_lemma1_coset, check_main_chain};
use explab::{MarkedGroup, QuotientHom};

fn group(t: f64) -> MarkedGroup {
    MarkedGroup::schottky_symmetric(2, t).unwrap()
}

#[test]
fn pressure_at_zero_counts_the_sphere() {
    let g = group(3.0);
    for len in [4, 6, 9] {
        let expected = (sphere_size(2, len) as f64).ln() / len as f64;
        assert!((pressure(&g, 0.0, len, 1) - expected).abs() < 1e-12);
    }
}

#[test]
fn pressure_root_decreases_with_translation_length() {
    let deltas: Vec<f64> =
        [3.0, 4.0, 5.0].iter().map(|&t| delta_via_pressure(&group(t), 8, DEFAULT_ROOT_TOL, 1).unwrap().value).collect();
    assert!(deltas.windows(2).all(|p| p[1] < p[0]), "{deltas:?}");
    // rigorous lower bound from d(w) <= |w| t
    for (d, t) in deltas.iter().zip([3.0, 4.0, 5.0]) {
        assert!(*d >= 3f64.ln() / t, "{d} at t={t}");
    }
}

#[test]
fn main_chain_passes_with_slack_growing_in_s() {
    let g = group(3.0);
    let hom = QuotientHom::abelianization(2);
    let h = w("abAB");
    let slacks: Vec<f64> = [0.3, 0.5, 0.7]
        .iter()
        .map(|&s| {
            let r = check_main_chain(&g, &hom, &h, s, 10, 1).unwrap();
            assert!(r.pass, "s={s}: {r:?}");
            r.worst_slack
        })
        .collect();
    assert!(slacks.windows(2).all(|p| p[1] > p[0]), "{slacks:?}");
}

#[test]
fn lemma1_coset_passes_at_half() {
    let r = check_lemma1_coset(&group(3.0), &w("abAB"), 0.5, 8, 20).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.cases, 11_664);
}
