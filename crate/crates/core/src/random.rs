use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::category::{FiniteOmegaCat, RawCategory};
use crate::error::Result;
use crate::fixtures;
use crate::polygraph;
use crate::product::{coproduct, product};
use crate::transfer;

/// Seeded generator of small valid strict ω-categories.
pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A 1-category with one object whose arrows are the elements of a monoid
/// given by its multiplication table; element 0 is the unit.
pub fn monoid(names: &[String], mul: impl Fn(usize, usize) -> usize) -> FiniteOmegaCat {
    let mut raw = RawCategory::new(1);
    raw.add_obj("*");
    for n in names {
        raw.add_arrow(1, n, "*", "*");
    }
    raw.set_unit_idx(0, 0, 0);
    for i in 0..names.len() {
        for j in 0..names.len() {
            raw.set_comp_idx(1, 0, i as u32, j as u32, mul(i, j) as u32);
        }
    }
    raw.freeze().expect("monoid tables are complete")
}

/// The cyclic group `Z_k` as a one-object category.
pub fn cyclic(k: usize) -> FiniteOmegaCat {
    let names: Vec<String> = (0..k).map(|i| format!("g{i}")).collect();
    monoid(&names, |i, j| (i + j) % k)
}

/// The monoid `{1, e}` with `e e = e`.
pub fn idempotent() -> FiniteOmegaCat {
    let names = vec!["1".to_string(), "e".to_string()];
    monoid(&names, |i, j| i.max(j))
}

/// The preorder generated by a relation on `n` objects (reflexive and
/// transitive closure).
pub fn preorder(n: usize, rel: &[(usize, usize)]) -> FiniteOmegaCat {
    let mut r = vec![vec![false; n]; n];
    for i in 0..n {
        r[i][i] = true;
    }
    for &(i, j) in rel {
        r[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    let mut raw = RawCategory::new(1);
    for i in 0..n {
        raw.add_obj(&format!("p{i}"));
    }
    let mut idx = vec![vec![u32::MAX; n]; n];
    for i in 0..n {
        for j in 0..n {
            if r[i][j] {
                let name = if i == j { format!("1_p{i}") } else { format!("p{i}<p{j}") };
                idx[i][j] = raw.push(1, name, i as u32, j as u32).expect("fresh");
            }
        }
    }
    for i in 0..n {
        raw.set_unit_idx(0, i as u32, idx[i][i]);
        for j in 0..n {
            for k in 0..n {
                if r[i][j] && r[j][k] {
                    raw.set_comp_idx(1, 0, idx[i][j], idx[j][k], idx[i][k]);
                }
            }
        }
    }
    raw.freeze().expect("preorder tables are complete")
}

/// The groupoid with `n` objects and exactly one arrow between any two.
pub fn codiscrete(n: usize) -> FiniteOmegaCat {
    let all: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    preorder(n, &all)
}

/// The suspension `ΣC`: two 0-cells `-` and `+`, and the k-cells of `C` as
/// (k+1)-cells from `-` to `+`.
pub fn suspension(c: &FiniteOmegaCat) -> FiniteOmegaCat {
    let mut raw = RawCategory::new(c.cap() + 1);
    raw.add_obj("-");
    raw.add_obj("+");
    for k in 0..=c.cap() {
        for x in c.cells(k) {
            let (s, t) = if k == 0 { (0, 1) } else { (c.src(x).idx, c.tgt(x).idx) };
            raw.push(k + 1, c.id(x), s, t).expect("ids are unique per dimension");
        }
    }
    for k in 0..c.cap() {
        for x in c.cells(k) {
            raw.set_unit_idx(k + 1, x.idx, c.unit(x).idx);
        }
    }
    for k in 1..=c.cap() {
        for p in 0..k {
            for (&(a, b), &r) in c.comp_table(k, p) {
                raw.set_comp_idx(k + 1, p + 1, a, b, r);
            }
        }
    }
    raw.add_missing_units();
    raw.fill_forced_compositions();
    raw.freeze().expect("suspension is well formed")
}

/// One 0-cell, one 1-cell and the commutative monoid `Z_k` of 2-cells, with
/// both compositions given by addition.
pub fn double_loop(k: usize) -> FiniteOmegaCat {
    let mut raw = RawCategory::new(2);
    raw.add_obj("*");
    raw.push(1, "1_*", 0, 0).expect("fresh");
    raw.set_unit_idx(0, 0, 0);
    for i in 0..k {
        raw.push(2, format!("g{i}"), 0, 0).expect("fresh");
    }
    raw.set_unit_idx(1, 0, 0);
    for p in 0..2 {
        for i in 0..k {
            for j in 0..k {
                raw.set_comp_idx(2, p, i as u32, j as u32, ((i + j) % k) as u32);
            }
        }
    }
    raw.fill_forced_compositions();
    raw.freeze().expect("double loop is well formed")
}

/// A random relation on `n` objects, closed into a preorder.
pub fn random_preorder(rng: &mut ChaCha8Rng, n: usize) -> FiniteOmegaCat {
    let mut rel = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(0.3) {
                rel.push((i, j));
            }
        }
    }
    preorder(n, &rel)
}

pub fn small_one_category(rng: &mut ChaCha8Rng) -> FiniteOmegaCat {
    match rng.gen_range(0..7) {
        0 => fixtures::discrete(rng.gen_range(1..=3)),
        1 => {
            let n = rng.gen_range(1..=4);
            random_preorder(rng, n)
        }
        2 => cyclic(rng.gen_range(1..=4)),
        3 => idempotent(),
        4 => codiscrete(rng.gen_range(2..=3)),
        5 => fixtures::walking_arrow(),
        _ => fixtures::interval_iso(),
    }
}

/// Names of the families produced by [`random_category`].
pub const FAMILIES: &[&str] = &[
    "one-category",
    "suspension",
    "double-suspension",
    "double-loop",
    "product",
    "coproduct",
    "globe",
    "quotient",
];

/// A random valid category with at most `max_cells` non-unit cells and cap at
/// most `max_cap`, together with the name of the family it was drawn from.
pub fn random_category(rng: &mut ChaCha8Rng, max_cells: usize, max_cap: usize) -> Result<(String, FiniteOmegaCat)> {
    loop {
        let fam = *FAMILIES.choose(rng).expect("nonempty");
        let c = match fam {
            "one-category" => small_one_category(rng),
            "suspension" => suspension(&small_one_category(rng)),
            "double-suspension" => {
                let base = match rng.gen_range(0..3) {
                    0 => fixtures::discrete(rng.gen_range(1..=2)),
                    1 => cyclic(rng.gen_range(1..=3)),
                    _ => fixtures::interval_iso(),
                };
                suspension(&suspension(&base))
            }
            "double-loop" => double_loop(rng.gen_range(1..=3)),
            "product" => {
                let a = Arc::new(small_one_category(rng));
                let b = Arc::new(small_one_category(rng));
                (*product(a, b)?.cat).clone()
            }
            "coproduct" => {
                let a = Arc::new(small_one_category(rng));
                let b = Arc::new(small_one_category(rng));
                (*coproduct(a, b)?.0).clone()
            }
            "globe" => polygraph::globe(rng.gen_range(0..=3)),
            _ => {
                let base = suspension(&small_one_category(rng));
                let n = rng.gen_range(0..=1);
                transfer::collapse(&base, n)?
            }
        };
        if c.cap() <= max_cap && c.non_unit_count() <= max_cells {
            return Ok((fam.to_string(), c));
        }
    }
}

/// `count` random categories drawn from one seed.
pub fn random_categories(seed: u64, count: usize, max_cells: usize, max_cap: usize) -> Result<Vec<(String, Arc<FiniteOmegaCat>)>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| random_category(&mut r, max_cells, max_cap).map(|(f, c)| (f, Arc::new(c))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate_category;

    #[test]
    fn builders_validate() {
        for c in [
            cyclic(3),
            idempotent(),
            codiscrete(3),
            preorder(3, &[(0, 1), (1, 2)]),
            suspension(&cyclic(2)),
            suspension(&suspension(&fixtures::interval_iso())),
            double_loop(3),
        ] {
            let r = validate_category(&c);
            assert!(r.holds(), "{}\n{}", c.describe(), r.summary());
        }
    }

    #[test]
    fn random_categories_validate_and_repeat() {
        let a = random_categories(7, 40, 12, 3).unwrap();
        let b = random_categories(7, 40, 12, 3).unwrap();
        for ((fa, ca), (fb, cb)) in a.iter().zip(&b) {
            assert_eq!(fa, fb);
            assert_eq!(**ca, **cb);
            assert!(ca.non_unit_count() <= 12 && ca.cap() <= 3);
            let r = validate_category(ca);
            assert!(r.holds(), "{fa}: {}", r.summary());
        }
    }
}
