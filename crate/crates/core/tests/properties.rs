use std::sync::Arc;

use omc_core::category::FiniteOmegaCat;
use omc_core::cyl_laws::{cylinder_laws, LawConfig};
use omc_core::equivalence::{congruence_suite, is_trivial_fibration, is_weak_equivalence, EqvTable};
use omc_core::functor::{validate_functor, Functor};
use omc_core::gamma::{gamma_structure_report, gamma_with_budget};
use omc_core::gluing::{charweq, check_top_bot_fibrations};
use omc_core::json::{category_from_value, category_to_value};
use omc_core::presentation::{present, presentation_of};
use omc_core::random::{random_category, rng, small_one_category};
use omc_core::search::{find_isomorphism, FunctorSearch};
use omc_core::transfer::triangle_report;
use omc_core::validate::validate_category;
use proptest::prelude::*;

fn category(seed: u64) -> Arc<FiniteOmegaCat> {
    Arc::new(random_category(&mut rng(seed), 12, 3).unwrap().1)
}

fn one_category(seed: u64) -> Arc<FiniteOmegaCat> {
    Arc::new(small_one_category(&mut rng(seed)))
}

/// Some functor `a → b` picked by index among the first few.
fn some_functor(a: &Arc<FiniteOmegaCat>, b: &Arc<FiniteOmegaCat>, pick: usize) -> Option<Functor> {
    let fs = FunctorSearch::new(a.clone(), b.clone()).all(64).unwrap();
    (!fs.is_empty()).then(|| fs[pick % fs.len()].clone())
}

/// The same category with every cell id prefixed.
fn renamed(c: &FiniteOmegaCat) -> FiniteOmegaCat {
    let mut v = category_to_value(c);
    rename_ids(&mut v);
    category_from_value(&v).unwrap()
}

fn rename_ids(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Object(m) => {
            for (k, x) in m.iter_mut() {
                match x {
                    Value::String(s) if ["id", "from", "to", "of", "is", "left", "right", "result"].contains(&k.as_str()) => {
                        *s = format!("r.{s}");
                    }
                    _ => rename_ids(x),
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(rename_ids),
        _ => {}
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_categories_are_valid(seed in any::<u64>()) {
        let c = category(seed);
        let r = validate_category(&c);
        prop_assert!(r.holds(), "{}", r.summary());
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let c = category(seed);
        let back = category_from_value(&category_to_value(&c)).unwrap();
        prop_assert_eq!(&back, &*c);
    }

    #[test]
    fn renaming_gives_an_isomorphic_category(seed in any::<u64>()) {
        let c = category(seed);
        let r = Arc::new(renamed(&c));
        prop_assert!(find_isomorphism(c, r).unwrap().is_some());
    }

    #[test]
    fn equivalence_is_a_congruence(seed in any::<u64>()) {
        let e = EqvTable::new(category(seed));
        let r = congruence_suite(&e);
        prop_assert!(r.holds(), "{}", r.summary());
    }

    #[test]
    fn gamma_structure(seed in any::<u64>()) {
        let g = gamma_with_budget(category(seed), 20_000).unwrap();
        let mut r = gamma_structure_report(&g);
        r.merge(check_top_bot_fibrations(&g));
        prop_assert!(r.holds(), "{}", r.summary());
    }

    #[test]
    fn cylinder_laws_hold(seed in any::<u64>()) {
        let cfg = LawConfig { per_law: 60, ..LawConfig::default() };
        let r = cylinder_laws(category(seed), cfg).unwrap();
        prop_assert!(r.holds(), "{}", r.summary());
    }

    #[test]
    fn identities_are_trivial_fibrations(seed in any::<u64>()) {
        let id = Functor::identity(category(seed));
        prop_assert!(is_trivial_fibration(&id).holds());
        prop_assert!(is_weak_equivalence(&id).holds());
    }

    #[test]
    fn trivial_fibrations_are_weak_equivalences(a in any::<u64>(), b in any::<u64>(), pick in any::<usize>()) {
        let (x, y) = (one_category(a), one_category(b));
        if let Some(f) = some_functor(&x, &y, pick) {
            if is_trivial_fibration(&f).holds() {
                prop_assert!(is_weak_equivalence(&f).holds());
            }
        }
    }

    #[test]
    fn charweq_agrees(a in any::<u64>(), b in any::<u64>(), pick in any::<usize>()) {
        let (x, y) = (one_category(a), one_category(b));
        if let Some(f) = some_functor(&x, &y, pick) {
            let r = charweq(&f).unwrap();
            prop_assert!(r.holds(), "{}", r.summary());
        }
    }

    #[test]
    fn weak_equivalences_compose(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), i in any::<usize>(), j in any::<usize>()) {
        let (x, y, z) = (one_category(a), one_category(b), one_category(c));
        if let (Some(f), Some(g)) = (some_functor(&x, &y, i), some_functor(&y, &z, j)) {
            let fg = f.then(&g).unwrap();
            prop_assert!(validate_functor(&fg).holds());
            if is_weak_equivalence(&f).holds() && is_weak_equivalence(&g).holds() {
                prop_assert!(is_weak_equivalence(&fg).holds());
            }
        }
    }

    #[test]
    fn transfer_triangles(seed in any::<u64>()) {
        let c = category(seed);
        for n in 0..=c.cap() {
            let r = triangle_report(c.clone(), n).unwrap();
            prop_assert!(r.holds(), "{}", r.summary());
        }
    }

    #[test]
    fn presentations_recover_one_categories(seed in any::<u64>()) {
        let c = one_category(seed);
        let p = present(Arc::new(presentation_of(&c).unwrap())).unwrap();
        prop_assert!(find_isomorphism(c, p.cat.clone()).unwrap().is_some());
    }
}
