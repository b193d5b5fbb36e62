use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::category::{Cell, FiniteOmegaCat, RawCategory, DEFAULT_MAX_CELLS_PER_DIM};
use crate::error::{OmcError, Result};
use crate::fixtures;
use crate::functor::Functor;

/// A materialized pullback `A ×_C B` of `f : A → C` and `g : B → C`, with its
/// two projections.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub cat: Arc<FiniteOmegaCat>,
    pub pr1: Functor,
    pub pr2: Functor,
    pairs: Vec<Vec<(Cell, Cell)>>,
    index: FxHashMap<(Cell, Cell), Cell>,
}

impl Pullback {
    pub fn components(&self, c: Cell) -> (Cell, Cell) {
        (self.pr1.apply(c), self.pr2.apply(c))
    }

    /// The unique map `T → A ×_C B` induced by `u : T → A` and `v : T → B`.
    pub fn induced(&self, u: &Functor, v: &Functor) -> Result<Functor> {
        let dom = u.dom.clone();
        let mut missing = None;
        let f = Functor::from_fn(dom.clone(), self.cat.clone(), |c| {
            let (a, b) = (u.apply(c), v.apply(c));
            match self.lookup(a, b) {
                Some(p) => p,
                None => {
                    missing.get_or_insert(c);
                    Cell::new(c.dim, 0)
                }
            }
        });
        if let Some(c) = missing {
            return Err(OmcError::Invalid(format!(
                "cone legs disagree on {}",
                dom.name(c)
            )));
        }
        f
    }

    /// Looks up the pair cell `(a, b)` for cells of the same dimension.
    pub fn lookup(&self, a: Cell, b: Cell) -> Option<Cell> {
        if a.dim != b.dim {
            return None;
        }
        let cap = self.cat.cap();
        if a.dim <= cap {
            self.index.get(&(a, b)).copied()
        } else {
            let a0 = self.pr1.cod.base_of(a);
            let b0 = self.pr2.cod.base_of(b);
            let top_a = self.pr1.cod.unit_to(a0, cap);
            let top_b = self.pr2.cod.unit_to(b0, cap);
            if self.pr1.cod.unit_to(top_a, a.dim) != a || self.pr2.cod.unit_to(top_b, b.dim) != b {
                return None;
            }
            self.index
                .get(&(top_a, top_b))
                .map(|p| Cell::new(a.dim, p.idx))
        }
    }

    pub fn pairs(&self, k: usize) -> &[(Cell, Cell)] {
        &self.pairs[k.min(self.cat.cap())]
    }
}

/// Pullback of `f : A → C` and `g : B → C`, materializing exactly the pairs
/// `(a, b)` with `f a = g b`.
pub fn pullback(f: &Functor, g: &Functor) -> Result<Pullback> {
    pullback_with_limit(f, g, DEFAULT_MAX_CELLS_PER_DIM)
}

pub fn pullback_with_limit(f: &Functor, g: &Functor, limit: usize) -> Result<Pullback> {
    if *f.cod != *g.cod {
        return Err(OmcError::Invalid("pullback of functors with different codomains".into()));
    }
    let (a, b) = (f.dom.clone(), g.dom.clone());
    let cap = a.cap().max(b.cap());
    let mut raw = RawCategory::new(cap);
    let mut pairs: Vec<Vec<(Cell, Cell)>> = vec![Vec::new(); cap + 1];
    let mut index: FxHashMap<(Cell, Cell), Cell> = FxHashMap::default();
    for k in 0..=cap {
        let mut by_image: FxHashMap<Cell, Vec<Cell>> = FxHashMap::default();
        for y in b.cells(k) {
            by_image.entry(g.apply(y)).or_default().push(y);
        }
        for x in a.cells(k) {
            let Some(ys) = by_image.get(&f.apply(x)) else { continue };
            for &y in ys {
                let (s, t) = if k == 0 {
                    (0, 0)
                } else {
                    let s = index[&(a.src(x), b.src(y))].idx;
                    let t = index[&(a.tgt(x), b.tgt(y))].idx;
                    (s, t)
                };
                let id = format!("({},{})", a.name(x), b.name(y));
                let i = raw.push(k, id, s, t)?;
                if i as usize >= limit {
                    return Err(OmcError::Budget(format!(
                        "pullback exceeds {limit} cells in dimension {k}"
                    )));
                }
                pairs[k].push((x, y));
                index.insert((x, y), Cell::new(k, i));
            }
        }
    }
    for k in 0..cap {
        for (i, &(x, y)) in pairs[k].iter().enumerate() {
            let u = index[&(a.unit(x), b.unit(y))];
            raw.set_unit_idx(k, i as u32, u.idx);
        }
    }
    for k in 1..=cap {
        for p in 0..k {
            let mut by_src: FxHashMap<(Cell, Cell), Vec<usize>> = FxHashMap::default();
            for (j, &(x, y)) in pairs[k].iter().enumerate() {
                by_src.entry((a.src_at(x, p), b.src_at(y, p))).or_default().push(j);
            }
            for (i, &(x, y)) in pairs[k].iter().enumerate() {
                let Some(js) = by_src.get(&(a.tgt_at(x, p), b.tgt_at(y, p))) else { continue };
                for &j in js {
                    let (x2, y2) = pairs[k][j];
                    let (Some(xx), Some(yy)) = (a.comp(p, x, x2), b.comp(p, y, y2)) else {
                        return Err(OmcError::Internal("component composite missing".into()));
                    };
                    let r = index[&(xx, yy)];
                    raw.set_comp_idx(k, p, i as u32, j as u32, r.idx);
                }
            }
        }
    }
    let cat = Arc::new(raw.freeze_with_limit(limit)?);
    let pr1 = Functor::from_fn(cat.clone(), a.clone(), |c| pairs[c.dim][c.idx as usize].0)?;
    let pr2 = Functor::from_fn(cat.clone(), b.clone(), |c| pairs[c.dim][c.idx as usize].1)?;
    Ok(Pullback {
        cat,
        pr1,
        pr2,
        pairs,
        index,
    })
}

/// Cartesian product as the pullback over the terminal category.
pub fn product(a: Arc<FiniteOmegaCat>, b: Arc<FiniteOmegaCat>) -> Result<Pullback> {
    let t = Arc::new(fixtures::terminal());
    let star = Cell::new(0, 0);
    let fa = Functor::constant(a, t.clone(), star);
    let fb = Functor::constant(b, t, star);
    pullback(&fa, &fb)
}

/// Disjoint union with its two inclusions. Ids are prefixed with `0.` and
/// `1.` to keep them apart.
pub fn coproduct(
    a: Arc<FiniteOmegaCat>,
    b: Arc<FiniteOmegaCat>,
) -> Result<(Arc<FiniteOmegaCat>, Functor, Functor)> {
    let cap = a.cap().max(b.cap());
    let mut raw = RawCategory::new(cap);
    let mut offsets = vec![0u32; cap + 1];
    for k in 0..=cap {
        for (tag, c) in [("0", &a), ("1", &b)] {
            for x in c.cells(k) {
                let (s, t) = if k == 0 {
                    (0, 0)
                } else {
                    let off = if tag == "0" { 0 } else { offsets[k - 1] };
                    (c.src(x).idx + off, c.tgt(x).idx + off)
                };
                raw.push(k, format!("{tag}.{}", c.name(x)), s, t)?;
            }
            if tag == "0" {
                offsets[k] = a.count(k) as u32;
            }
        }
    }
    for k in 0..cap {
        for (tag, c) in [(0usize, &a), (1usize, &b)] {
            for x in c.cells(k) {
                let (o0, o1) = if tag == 0 { (0, 0) } else { (offsets[k], offsets[k + 1]) };
                raw.set_unit_idx(k, x.idx + o0, c.unit(x).idx + o1);
            }
        }
    }
    for k in 1..=cap {
        for p in 0..k {
            for (tag, c) in [(0usize, &a), (1usize, &b)] {
                let o = if tag == 0 { 0 } else { offsets[k] };
                if k <= c.cap() {
                    for (&(x, y), &r) in c.comp_table(k, p) {
                        raw.set_comp_idx(k, p, x + o, y + o, r + o);
                    }
                } else {
                    // Above the cap of this summand, cells are units of its
                    // cap-level cells.
                    for x in c.cells(k) {
                        for y in c.cells(k) {
                            if let Some(r) = c.comp(p, x, y) {
                                raw.set_comp_idx(k, p, x.idx + o, y.idx + o, r.idx + o);
                            }
                        }
                    }
                }
            }
        }
    }
    let cat = Arc::new(raw.freeze()?);
    let offs = offsets.clone();
    let i0 = Functor::from_fn(a.clone(), cat.clone(), |x| Cell::new(x.dim, x.idx))?;
    let i1 = Functor::from_fn(b.clone(), cat.clone(), |x| {
        Cell::new(x.dim, x.idx + offs[x.dim.min(cap)])
    })?;
    Ok((cat, i0, i1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::validate_functor;
    use crate::validate::validate_category;

    #[test]
    fn product_sizes() {
        let iso = Arc::new(fixtures::interval_iso());
        let p = product(iso.clone(), iso.clone()).unwrap();
        for k in 0..=1 {
            assert_eq!(p.cat.count(k), iso.count(k) * iso.count(k));
        }
        assert!(validate_category(&p.cat).holds());
        assert!(validate_functor(&p.pr1).holds());
        assert!(validate_functor(&p.pr2).holds());
    }

    #[test]
    fn product_with_terminal() {
        let iso = Arc::new(fixtures::interval_iso());
        let t = Arc::new(fixtures::terminal());
        let p = product(iso.clone(), t).unwrap();
        assert_eq!(p.cat.total_stored(), iso.total_stored());
    }

    #[test]
    fn coproduct_validates() {
        let a = Arc::new(fixtures::walking_arrow());
        let b = Arc::new(fixtures::interval_iso());
        let (c, i0, i1) = coproduct(a, b).unwrap();
        assert!(validate_category(&c).holds());
        assert!(validate_functor(&i0).holds());
        assert!(validate_functor(&i1).holds());
        assert_eq!(c.count(0), 4);
    }
}
