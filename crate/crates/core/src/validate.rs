use rustc_hash::FxHashMap;

use crate::category::{Cell, FiniteOmegaCat};
use crate::report::CheckReport;

/// Checks every axiom instance of a strict ω-category on the stored tables:
/// globularity, unit boundaries, composition domains and boundaries,
/// associativity, unit laws, interchange and compatibility of units with
/// composition.
pub fn validate_category(c: &FiniteOmegaCat) -> CheckReport {
    let mut rep = CheckReport::new("validate_category");
    let cap = c.cap();
    let name = |x: Cell| c.name(x);

    for k in 2..=cap {
        for x in c.cells(k) {
            let (s, t) = (c.src(x), c.tgt(x));
            if c.src(s) != c.src(t) || c.tgt(s) != c.tgt(t) {
                rep.violation(
                    "globularity",
                    vec![name(x)],
                    format!("source {} and target {} are not parallel", name(s), name(t)),
                );
            }
        }
    }
    for k in 0..cap {
        for x in c.cells(k) {
            let u = c.unit(x);
            if c.src(u) != x || c.tgt(u) != x {
                rep.violation("unit-boundary", vec![name(x), name(u)], "unit is not an endo-cell on its base");
            }
        }
    }

    for k in 1..=cap {
        for p in 0..k {
            let mut by_src: FxHashMap<Cell, Vec<Cell>> = FxHashMap::default();
            for b in c.cells(k) {
                by_src.entry(c.src_at(b, p)).or_default().push(b);
            }
            let table = c.comp_table(k, p);
            let mut composable = 0u64;
            for a in c.cells(k) {
                let Some(bs) = by_src.get(&c.tgt_at(a, p)) else { continue };
                for &b in bs {
                    composable += 1;
                    if !table.contains_key(&(a.idx, b.idx)) {
                        rep.violation(
                            "comp-domain",
                            vec![name(a), name(b)],
                            format!("composable along {p} but no composite is stored"),
                        );
                    }
                }
            }
            rep.count("composable_pairs", composable);
            for (&(ai, bi), &ri) in table {
                let (a, b, r) = (Cell::new(k, ai), Cell::new(k, bi), Cell::new(k, ri));
                if c.tgt_at(a, p) != c.src_at(b, p) {
                    rep.violation(
                        "comp-domain",
                        vec![name(a), name(b)],
                        format!("composite stored along {p} for a non-composable pair"),
                    );
                    continue;
                }
                let (es, et) = if p + 1 == k {
                    (Some(c.src(a)), Some(c.tgt(b)))
                } else {
                    (c.comp(p, c.src(a), c.src(b)), c.comp(p, c.tgt(a), c.tgt(b)))
                };
                if es != Some(c.src(r)) || et != Some(c.tgt(r)) {
                    rep.violation(
                        "comp-boundary",
                        vec![name(a), name(b), name(r)],
                        format!("boundary of the composite along {p} is not the forced one"),
                    );
                }
            }
        }
    }
    if rep.fails() {
        // The remaining laws presuppose total, well-bounded tables.
        return rep;
    }

    for k in 1..=cap {
        for p in 0..k {
            for a in c.cells(k) {
                let l = c.unit_to(c.src_at(a, p), k);
                let r = c.unit_to(c.tgt_at(a, p), k);
                if c.comp(p, l, a) != Some(a) {
                    rep.violation("left-unit", vec![name(a)], format!("along {p}"));
                }
                if c.comp(p, a, r) != Some(a) {
                    rep.violation("right-unit", vec![name(a)], format!("along {p}"));
                }
            }
        }
    }

    for k in 1..cap {
        for p in 0..k {
            for (&(ai, bi), &ri) in c.comp_table(k, p) {
                let (a, b, r) = (Cell::new(k, ai), Cell::new(k, bi), Cell::new(k, ri));
                if c.comp(p, c.unit(a), c.unit(b)) != Some(c.unit(r)) {
                    rep.violation(
                        "unit-compatibility",
                        vec![name(a), name(b)],
                        format!("unit of the composite along {p} is not the composite of units"),
                    );
                }
            }
        }
    }

    for k in 1..=cap {
        for p in 0..k {
            let mut by_src: FxHashMap<Cell, Vec<Cell>> = FxHashMap::default();
            for b in c.cells(k) {
                by_src.entry(c.src_at(b, p)).or_default().push(b);
            }
            let mut n = 0u64;
            for (&(ai, bi), &abi) in c.comp_table(k, p) {
                let (a, b, ab) = (Cell::new(k, ai), Cell::new(k, bi), Cell::new(k, abi));
                let Some(cs) = by_src.get(&c.tgt_at(b, p)) else { continue };
                for &x in cs {
                    n += 1;
                    let lhs = c.comp(p, ab, x);
                    let rhs = c.comp(p, b, x).and_then(|bx| c.comp(p, a, bx));
                    if lhs.is_none() || lhs != rhs {
                        rep.violation(
                            "associativity",
                            vec![name(a), name(b), name(x)],
                            format!("along {p}"),
                        );
                    }
                }
            }
            rep.count("associativity_instances", n);
        }
    }

    for k in 2..=cap {
        for q in 1..k {
            for p in 0..q {
                check_interchange(c, k, p, q, &mut rep);
            }
        }
    }
    rep
}

/// (a ∘q a') ∘p (b ∘q b') = (a ∘p b) ∘q (a' ∘p b') for k-cells, p < q < k.
fn check_interchange(c: &FiniteOmegaCat, k: usize, p: usize, q: usize, rep: &mut CheckReport) {
    let mut q_pairs_by_src: FxHashMap<Cell, Vec<(Cell, Cell, Cell)>> = FxHashMap::default();
    for (&(bi, b2i), &ri) in c.comp_table(k, q) {
        let b = Cell::new(k, bi);
        q_pairs_by_src
            .entry(c.src_at(b, p))
            .or_default()
            .push((b, Cell::new(k, b2i), Cell::new(k, ri)));
    }
    let mut n = 0u64;
    for (&(ai, a2i), &aai) in c.comp_table(k, q) {
        let (a, a2, aa) = (Cell::new(k, ai), Cell::new(k, a2i), Cell::new(k, aai));
        let Some(cands) = q_pairs_by_src.get(&c.tgt_at(a, p)) else { continue };
        for &(b, b2, bb) in cands {
            n += 1;
            let lhs = c.comp(p, aa, bb);
            let rhs = match (c.comp(p, a, b), c.comp(p, a2, b2)) {
                (Some(x), Some(y)) => c.comp(q, x, y),
                _ => None,
            };
            if lhs.is_none() || lhs != rhs {
                rep.violation(
                    "interchange",
                    vec![c.name(a), c.name(a2), c.name(b), c.name(b2)],
                    format!("along {q} inside {p}"),
                );
            }
        }
    }
    rep.count("interchange_instances", n);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_validate() {
        for c in [
            fixtures::terminal(),
            fixtures::discrete(2),
            fixtures::walking_arrow(),
            fixtures::interval_iso(),
        ] {
            let r = validate_category(&c);
            assert!(r.holds(), "{}", r.summary());
        }
    }

    #[test]
    fn rebound_composite_is_reported() {
        let c = fixtures::interval_iso();
        let mut raw = c.to_raw();
        let u = raw.find(1, "u").unwrap();
        let ub = raw.find(1, "ubar").unwrap();
        let one_b = raw.find(1, "1_b").unwrap();
        raw.set_comp_idx(1, 0, u, ub, one_b);
        let bad = raw.freeze().unwrap();
        let r = validate_category(&bad);
        assert!(r.fails());
        assert!(r
            .violations
            .iter()
            .any(|v| v.law == "comp-boundary" && v.cells.contains(&"u".to_string())));
    }
}
