use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::category::{Cell, FiniteOmegaCat, RawCategory};
use crate::error::{OmcError, Result};
use crate::functor::Functor;
use crate::polygraph::{PolyMorphism, Polygraph, UnionFind, Word};

pub const DEFAULT_CLASS_BUDGET: usize = 20_000;

/// The 1-category presented by a polygraph of dimension ≤ 2 whose
/// 2-generators are read as relations `src = tgt`.
#[derive(Debug, Clone)]
pub struct Presented {
    pub poly: Arc<Polygraph>,
    pub cat: Arc<FiniteOmegaCat>,
    /// Normal-form word of every 1-cell.
    pub words: Vec<Word>,
    class_cell: Vec<u32>,
    next: Vec<Vec<Option<usize>>>,
}

impl Presented {
    /// The 1-cell a word evaluates to.
    pub fn eval(&self, w: &Word) -> Option<Cell> {
        let mut c = w.from as usize;
        for &l in &w.letters {
            c = self.next[c][l as usize]?;
        }
        Some(Cell::new(1, self.class_cell[c]))
    }

    pub fn generator(&self, k: usize, i: u32) -> Cell {
        match k {
            0 => Cell::new(0, i),
            _ => {
                let a = &self.poly.arrows[i as usize];
                self.eval(&Word { from: a.src, letters: vec![i] }).expect("generator word")
            }
        }
    }
}

struct Enumeration {
    tgt: Vec<u32>,
    word: Vec<Word>,
    next: Vec<Vec<Option<usize>>>,
    uf: UnionFind,
    alive: usize,
}

impl Enumeration {
    fn define(&mut self, c: usize, g: u32, p: &Polygraph, budget: usize) -> Result<usize> {
        if let Some(d) = self.next[c][g as usize] {
            return Ok(self.uf.find(d));
        }
        if self.alive >= budget {
            return Err(OmcError::Budget(format!(
                "presented category exceeds {budget} classes (possibly infinite)"
            )));
        }
        let d = self.tgt.len();
        let mut w = self.word[c].clone();
        w.letters.push(g);
        self.tgt.push(p.arrows[g as usize].tgt);
        self.word.push(w);
        self.next.push(vec![None; p.arrows.len()]);
        self.uf.grow();
        self.next[c][g as usize] = Some(d);
        self.alive += 1;
        Ok(d)
    }

    fn trace(&mut self, c: usize, w: &[u32], p: &Polygraph, budget: usize) -> Result<usize> {
        let mut c = self.uf.find(c);
        for &l in w {
            c = self.define(c, l, p, budget)?;
            c = self.uf.find(c);
        }
        Ok(c)
    }

    fn coincide(&mut self, a: usize, b: usize) {
        let mut queue = vec![(a, b)];
        while let Some((a, b)) = queue.pop() {
            let (ra, rb) = (self.uf.find(a), self.uf.find(b));
            if ra == rb {
                continue;
            }
            self.uf.union(ra, rb);
            self.alive -= 1;
            let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
            for g in 0..self.next[gone].len() {
                if let Some(x) = self.next[gone][g] {
                    match self.next[keep][g] {
                        Some(y) => queue.push((x, y)),
                        None => self.next[keep][g] = Some(x),
                    }
                }
            }
        }
    }
}

/// Todd–Coxeter enumeration of the right congruence generated by the
/// relations at every word, which is the two-sided congruence they generate.
pub fn present(p: Arc<Polygraph>) -> Result<Presented> {
    present_with_budget(p, DEFAULT_CLASS_BUDGET)
}

pub fn present_with_budget(p: Arc<Polygraph>, budget: usize) -> Result<Presented> {
    p.check()?;
    if p.dim > 2 || !p.cells3.is_empty() {
        return Err(OmcError::Unsupported("presentations take generators up to dimension 2".into()));
    }
    let no = p.objects.len();
    let mut en = Enumeration {
        tgt: (0..no as u32).collect(),
        word: (0..no as u32).map(|o| Word { from: o, letters: vec![] }).collect(),
        next: vec![vec![None; p.arrows.len()]; no],
        uf: UnionFind::new(no),
        alive: no,
    };
    let mut i = 0;
    while i < en.tgt.len() {
        if en.uf.find(i) != i {
            i += 1;
            continue;
        }
        let at = en.tgt[i];
        for r in p.cells2.iter().filter(|r| r.src.from == at) {
            let a = en.trace(i, &r.src.letters, &p, budget)?;
            let b = en.trace(i, &r.tgt.letters, &p, budget)?;
            en.coincide(a, b);
            if en.uf.find(i) != i {
                break;
            }
        }
        if en.uf.find(i) == i {
            for (g, a) in p.arrows.iter().enumerate() {
                if a.src == at {
                    en.define(i, g as u32, &p, budget)?;
                }
            }
        }
        i += 1;
    }
    build(p, en)
}

fn build(p: Arc<Polygraph>, mut en: Enumeration) -> Result<Presented> {
    let n = en.tgt.len();
    let live: Vec<usize> = (0..n).filter(|&c| en.uf.find(c) == c).collect();
    let mut raw = RawCategory::new(1);
    for o in &p.objects {
        raw.add_obj(o);
    }
    let mut class_cell = vec![u32::MAX; n];
    let mut words = Vec::new();
    for &c in &live {
        let w = en.word[c].clone();
        let idx = raw.push(1, p.word_name(&w), w.from, en.tgt[c])?;
        if w.letters.is_empty() {
            raw.set_unit_idx(0, w.from, idx);
        }
        class_cell[c] = idx;
        words.push(w);
    }
    for c in 0..n {
        class_cell[c] = class_cell[en.uf.find(c)];
    }
    let mut next = vec![vec![None; p.arrows.len()]; n];
    for c in 0..n {
        let r = en.uf.find(c);
        for g in 0..p.arrows.len() {
            next[c][g] = en.next[r][g].map(|d| en.uf.find(d));
        }
    }
    for &a in &live {
        for &b in live.iter().filter(|&&b| en.word[b].from == en.tgt[a]) {
            let mut c = a;
            for &l in &en.word[b].letters {
                c = next[c][l as usize].ok_or_else(|| OmcError::Internal("incomplete coset table".into()))?;
            }
            raw.set_comp_idx(1, 0, class_cell[a], class_cell[b], class_cell[c]);
        }
    }
    let cat = raw.freeze()?;
    Ok(Presented {
        poly: p,
        cat: Arc::new(cat),
        words,
        class_cell,
        next,
    })
}

/// The functor induced by a morphism of presentations. Relations go to
/// relations, so it is well defined.
pub fn presented_functor(m: &PolyMorphism, a: &Presented, b: &Presented) -> Result<Functor> {
    let mut missing = None;
    let f = Functor::from_fn(a.cat.clone(), b.cat.clone(), |x| match x.dim {
        0 => Cell::new(0, m.map[0][x.idx as usize]),
        _ => b.eval(&m.map_word(&a.words[x.idx as usize])).unwrap_or_else(|| {
            missing.get_or_insert(x);
            x
        }),
    })?;
    if let Some(x) = missing {
        return Err(OmcError::Internal(format!("image of {} not found", a.cat.name(x))));
    }
    Ok(f)
}

/// The presentation of a finite 1-category by its non-unit 1-cells and its
/// composition table.
pub fn presentation_of(c: &FiniteOmegaCat) -> Result<Polygraph> {
    if c.cap() > 1 {
        return Err(OmcError::Unsupported("presentations of categories above dimension 1".into()));
    }
    let mut p = Polygraph::new(if c.cap() == 1 { 2 } else { 0 });
    for x in c.objects() {
        p.add_object(c.id(x));
    }
    let mut gen_of: FxHashMap<Cell, u32> = FxHashMap::default();
    for x in c.cells(1).filter(|&x| c.cap() == 1 && !c.is_unit(x)) {
        gen_of.insert(x, p.add_arrow(c.id(x), c.src(x).idx, c.tgt(x).idx));
    }
    let word = |x: Cell| Word {
        from: c.src(x).idx,
        letters: gen_of.get(&x).map(|&g| vec![g]).unwrap_or_default(),
    };
    if c.cap() == 1 {
        let mut table: Vec<_> = c.comp_table(1, 0).iter().map(|(&(l, r), &res)| (l, r, res)).collect();
        table.sort();
        for (l, r, res) in table {
            let (l, r, res) = (Cell::new(1, l), Cell::new(1, r), Cell::new(1, res));
            if c.is_unit(l) || c.is_unit(r) {
                continue;
            }
            let src = Word {
                from: c.src(l).idx,
                letters: vec![gen_of[&l], gen_of[&r]],
            };
            p.add_cell2(&format!("{}·{}={}", c.id(l), c.id(r), c.id(res)), src, word(res));
        }
    }
    Ok(p)
}

/// `a ⇄ b` with `u`, `ubar` inverse to each other.
pub fn interval_presentation() -> Polygraph {
    let mut p = Polygraph::new(2);
    let a = p.add_object("a");
    let b = p.add_object("b");
    let u = p.add_arrow("u", a, b);
    let ubar = p.add_arrow("ubar", b, a);
    p.add_cell2("u·ubar", p.word(a, &[u, ubar]), p.word(a, &[]));
    p.add_cell2("ubar·u", p.word(b, &[ubar, u]), p.word(b, &[]));
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::polygraph::pushout_polygraph;
    use crate::random;
    use crate::search::find_isomorphism;
    use crate::validate::validate_category;

    fn iso(a: &FiniteOmegaCat, b: &FiniteOmegaCat) -> bool {
        find_isomorphism(Arc::new(a.clone()), Arc::new(b.clone())).unwrap().is_some()
    }

    #[test]
    fn interval_is_presented() {
        let p = present(Arc::new(interval_presentation())).unwrap();
        assert!(validate_category(&p.cat).holds());
        assert_eq!(p.cat.count(1), 4);
        assert!(iso(&p.cat, &fixtures::interval_iso()));
    }

    #[test]
    fn cyclic_monoid() {
        let mut p = Polygraph::new(2);
        let o = p.add_object("*");
        let g = p.add_arrow("g", o, o);
        p.add_cell2("g3", p.word(o, &[g, g, g]), p.word(o, &[]));
        let c = present(Arc::new(p)).unwrap();
        assert_eq!(c.cat.count(1), 3);
        assert!(iso(&c.cat, &random::cyclic(3)));
    }

    #[test]
    fn infinite_monoid_hits_budget() {
        let mut p = Polygraph::new(1);
        let o = p.add_object("*");
        p.add_arrow("g", o, o);
        assert!(matches!(present_with_budget(Arc::new(p), 50), Err(OmcError::Budget(_))));
    }

    #[test]
    fn round_trip_of_finite_categories() {
        let mut r = random::rng(3);
        for _ in 0..40 {
            let c = random::random_preorder(&mut r, 4);
            let back = present(Arc::new(presentation_of(&c).unwrap())).unwrap();
            assert!(iso(&c, &back.cat), "{}", c.describe());
        }
        for c in [random::cyclic(4), random::idempotent(), fixtures::walking_arrow(), fixtures::interval_iso()] {
            let back = present(Arc::new(presentation_of(&c).unwrap())).unwrap();
            assert!(iso(&c, &back.cat), "{}", c.describe());
        }
    }

    #[test]
    fn whiskered_interval_pushout() {
        // a ↦ a : TERMINAL → INTERVAL_ISO pushed out along TERMINAL → A where
        // A = walking arrow picks its target.
        let mut t = Polygraph::new(0);
        t.add_object("x");
        let t = Arc::new(t);
        let i = Arc::new(interval_presentation());
        let w = Arc::new(presentation_of(&fixtures::walking_arrow()).unwrap());
        let m1 = PolyMorphism::new(t.clone(), i, [vec![0], vec![], vec![], vec![]]).unwrap();
        let m2 = PolyMorphism::new(t, w, [vec![1], vec![], vec![], vec![]]).unwrap();
        let po = pushout_polygraph(&m1, &m2).unwrap();
        let c = present(po.poly.clone()).unwrap();
        assert!(validate_category(&c.cat).holds());
        // objects a, b, b'; 1-cells: three units, f, u, ubar, f·u.
        assert_eq!(c.cat.count(0), 3);
        assert_eq!(c.cat.count(1), 7);
    }
}
