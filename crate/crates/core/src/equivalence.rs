use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::category::{Cell, FiniteOmegaCat};
use crate::error::{OmcError, Result};
use crate::functor::Functor;
use crate::report::CheckReport;

/// Reversibility and ω-equivalence for one category, decided from the cap
/// downwards: at and above the cap ω-equivalence is equality, a k-cell is
/// reversible when it has a weak inverse up to ω-equivalence of k-cells, and
/// two (k-1)-cells are ω-equivalent when a reversible k-cell joins them.
#[derive(Debug, Clone)]
pub struct EqvTable {
    cat: Arc<FiniteOmegaCat>,
    inverse: Vec<Vec<Option<u32>>>,
    between: Vec<FxHashMap<(u32, u32), u32>>,
}

/// A certificate for `x ≋ y`: a cell `forward : x → y`, a weak inverse
/// `backward`, and certificates for `forward ∘ backward ≋ 1x` and
/// `backward ∘ forward ≋ 1y`. A sub-certificate is omitted when the composite
/// is literally the unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqvWitness {
    pub forward: (usize, u32),
    pub backward: (usize, u32),
    pub left: Option<Box<EqvWitness>>,
    pub right: Option<Box<EqvWitness>>,
}

impl EqvWitness {
    pub fn forward(&self) -> Cell {
        Cell::new(self.forward.0, self.forward.1)
    }

    pub fn backward(&self) -> Cell {
        Cell::new(self.backward.0, self.backward.1)
    }

    pub fn depth(&self) -> usize {
        1 + self
            .left
            .as_ref()
            .map_or(0, |w| w.depth())
            .max(self.right.as_ref().map_or(0, |w| w.depth()))
    }
}

impl EqvTable {
    pub fn new(cat: Arc<FiniteOmegaCat>) -> Self {
        let cap = cat.cap();
        let mut inverse: Vec<Vec<Option<u32>>> = vec![Vec::new(); cap + 1];
        let mut between: Vec<FxHashMap<(u32, u32), u32>> = vec![FxHashMap::default(); cap + 1];
        for k in (1..=cap).rev() {
            let mut inv = vec![None; cat.count(k)];
            for u in cat.cells(k) {
                let (x, y) = (cat.src(u), cat.tgt(u));
                let (ux, uy) = (cat.unit(x), cat.unit(y));
                for v in cat.hom(y, x) {
                    let uv = cat.comp(k - 1, u, v).expect("composable by boundaries");
                    let vu = cat.comp(k - 1, v, u).expect("composable by boundaries");
                    let ok = if k == cap {
                        uv == ux && vu == uy
                    } else {
                        between[k + 1].contains_key(&(uv.idx, ux.idx))
                            && between[k + 1].contains_key(&(vu.idx, uy.idx))
                    };
                    if ok {
                        inv[u.idx as usize] = Some(v.idx);
                        break;
                    }
                }
                if inv[u.idx as usize].is_some() {
                    between[k].entry((x.idx, y.idx)).or_insert(u.idx);
                }
            }
            inverse[k] = inv;
        }
        EqvTable {
            cat,
            inverse,
            between,
        }
    }

    pub fn cat(&self) -> &Arc<FiniteOmegaCat> {
        &self.cat
    }

    /// A weak inverse of `u`, if `u` is reversible.
    pub fn weak_inverse(&self, u: Cell) -> Option<Cell> {
        if u.dim == 0 {
            return None;
        }
        if u.dim > self.cat.cap() {
            return Some(u);
        }
        self.inverse[u.dim][u.idx as usize].map(|i| Cell::new(u.dim, i))
    }

    pub fn is_reversible(&self, u: Cell) -> bool {
        self.weak_inverse(u).is_some()
    }

    /// Some reversible cell `x → y`, if there is one.
    pub fn reversible_between(&self, x: Cell, y: Cell) -> Option<Cell> {
        let k = x.dim + 1;
        if k > self.cat.cap() {
            return (x == y).then(|| self.cat.unit(x));
        }
        self.between[k].get(&(x.idx, y.idx)).map(|&i| Cell::new(k, i))
    }

    /// `x ≋ y` for parallel cells.
    pub fn equiv(&self, x: Cell, y: Cell) -> bool {
        if x.dim != y.dim {
            return false;
        }
        if x.dim >= self.cat.cap() {
            return x == y;
        }
        self.between[x.dim + 1].contains_key(&(x.idx, y.idx))
    }

    pub fn reversible_cells(&self, k: usize) -> Vec<Cell> {
        self.cat.cells(k).filter(|&u| self.is_reversible(u)).collect()
    }

    /// All reversible cells `x → y`.
    pub fn reversible_hom(&self, x: Cell, y: Cell) -> Vec<Cell> {
        self.cat.hom(x, y).filter(|&u| self.is_reversible(u)).collect()
    }

    /// A certificate for `x ≋ y`.
    pub fn witness(&self, x: Cell, y: Cell) -> Option<EqvWitness> {
        let u = self.reversible_between(x, y)?;
        self.witness_of(u)
    }

    /// A certificate that `u` is reversible.
    pub fn witness_of(&self, u: Cell) -> Option<EqvWitness> {
        let c = &self.cat;
        let ub = self.weak_inverse(u)?;
        let (x, y) = (c.src(u), c.tgt(u));
        let n = x.dim;
        let uv = c.comp(n, u, ub)?;
        let vu = c.comp(n, ub, u)?;
        let left = if uv == c.unit(x) {
            None
        } else {
            Some(Box::new(self.witness(uv, c.unit(x))?))
        };
        let right = if vu == c.unit(y) {
            None
        } else {
            Some(Box::new(self.witness(vu, c.unit(y))?))
        };
        Some(EqvWitness {
            forward: (u.dim, u.idx),
            backward: (ub.dim, ub.idx),
            left,
            right,
        })
    }
}

/// Checks a certificate for `x ≋ y` against the category tables only.
pub fn verify_witness(c: &FiniteOmegaCat, x: Cell, y: Cell, w: &EqvWitness) -> bool {
    let (u, ub) = (w.forward(), w.backward());
    if u.dim != x.dim + 1 || ub.dim != u.dim {
        return false;
    }
    if u.dim <= c.cap() && (u.idx as usize >= c.count(u.dim) || ub.idx as usize >= c.count(ub.dim)) {
        return false;
    }
    if c.src(u) != x || c.tgt(u) != y || c.src(ub) != y || c.tgt(ub) != x {
        return false;
    }
    let n = x.dim;
    let (Some(uv), Some(vu)) = (c.comp(n, u, ub), c.comp(n, ub, u)) else {
        return false;
    };
    let side = |comp: Cell, unit: Cell, sub: &Option<Box<EqvWitness>>| match sub {
        None => comp == unit,
        Some(s) => verify_witness(c, comp, unit, s),
    };
    side(uv, c.unit(x), &w.left) && side(vu, c.unit(y), &w.right)
}

/// The image of a certificate under a functor.
pub fn map_witness(f: &Functor, w: &EqvWitness) -> EqvWitness {
    let fu = f.apply(w.forward());
    let fv = f.apply(w.backward());
    EqvWitness {
        forward: (fu.dim, fu.idx),
        backward: (fv.dim, fv.idx),
        left: w.left.as_ref().map(|s| Box::new(map_witness(f, s))),
        right: w.right.as_ref().map(|s| Box::new(map_witness(f, s))),
    }
}

/// Parallel pairs of n-cells, including the trivial pairs `(x, x)`.
pub fn parallel_pairs(c: &FiniteOmegaCat, n: usize) -> Vec<(Cell, Cell)> {
    if n == 0 {
        let objs: Vec<Cell> = c.cells(0).collect();
        return objs
            .iter()
            .flat_map(|&x| objs.iter().map(move |&y| (x, y)))
            .collect();
    }
    let mut groups: FxHashMap<(Cell, Cell), Vec<Cell>> = FxHashMap::default();
    for x in c.cells(n) {
        groups.entry((c.src(x), c.tgt(x))).or_default().push(x);
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort();
    let mut out = Vec::new();
    for k in keys {
        let g = &groups[&k];
        for &x in g {
            for &y in g {
                out.push((x, y));
            }
        }
    }
    out
}

fn dims_to_check(f: &Functor) -> usize {
    f.dom.cap().max(f.cod.cap())
}

/// The two clauses of ω-weak equivalence, with ≋ in the codomain.
pub fn is_weak_equivalence(f: &Functor) -> CheckReport {
    let ey = EqvTable::new(f.cod.clone());
    is_weak_equivalence_with(f, &ey)
}

pub fn is_weak_equivalence_with(f: &Functor, ey: &EqvTable) -> CheckReport {
    lifting_clauses(f, "is_weak_equivalence", |a, b| ey.equiv(a, b))
}

/// The two clauses of I-injectivity (trivial fibration), with equality.
pub fn is_trivial_fibration(f: &Functor) -> CheckReport {
    lifting_clauses(f, "is_trivial_fibration", |a, b| a == b)
}

fn lifting_clauses(f: &Functor, name: &str, rel: impl Fn(Cell, Cell) -> bool) -> CheckReport {
    let mut rep = CheckReport::new(name);
    let (x, y) = (&*f.dom, &*f.cod);
    for t in y.cells(0) {
        if !x.cells(0).any(|s| rel(f.apply(s), t)) {
            rep.violation("clause-i", vec![y.name(t)], "0-cell not reached");
        }
    }
    for n in 0..=dims_to_check(f) {
        let mut instances = 0u64;
        for (a, b) in parallel_pairs(x, n) {
            let (fa, fb) = (f.apply(a), f.apply(b));
            let candidates: Vec<Cell> = x.hom(a, b).collect();
            for v in y.hom(fa, fb) {
                instances += 1;
                if !candidates.iter().any(|&u| rel(f.apply(u), v)) {
                    rep.violation(
                        "clause-ii",
                        vec![x.name(a), x.name(b), y.name(v)],
                        format!("no {}-cell over the given one", n + 1),
                    );
                }
            }
        }
        rep.count("clause_ii_instances", instances);
    }
    rep
}

/// Weak injectivity: `x ≋ x'` whenever `f x ≋ f x'`.
pub fn weak_injectivity_check(f: &Functor) -> Result<CheckReport> {
    let ey = EqvTable::new(f.cod.clone());
    if !is_weak_equivalence_with(f, &ey).holds() {
        return Err(OmcError::Invalid("functor is not a weak equivalence".into()));
    }
    let ex = EqvTable::new(f.dom.clone());
    let mut rep = CheckReport::new("weak_injectivity");
    let x = &*f.dom;
    for n in 0..=dims_to_check(f) {
        for (a, b) in parallel_pairs(x, n) {
            if ey.equiv(f.apply(a), f.apply(b)) && !ex.equiv(a, b) {
                rep.violation("weak-injectivity", vec![x.name(a), x.name(b)], "images equivalent, cells not");
            }
        }
    }
    Ok(rep)
}

/// Reflexivity, symmetry, transitivity and compatibility with composition of
/// ≋, together with certificate checks.
pub fn congruence_suite(e: &EqvTable) -> CheckReport {
    let c = &**e.cat();
    let mut rep = CheckReport::new("congruence");
    for k in 0..=c.cap() {
        for x in c.cells(k) {
            if !e.equiv(x, x) || !e.is_reversible(c.unit(x)) {
                rep.violation("reflexivity", vec![c.name(x)], "unit is not reversible");
            }
            match e.witness(x, x) {
                Some(w) if verify_witness(c, x, x, &w) => {}
                _ => rep.violation("witness", vec![c.name(x)], "no valid certificate for x ≋ x"),
            }
        }
    }
    for k in 1..=c.cap() {
        let revs = e.reversible_cells(k);
        for &u in &revs {
            let ub = e.weak_inverse(u).unwrap();
            if !e.is_reversible(ub) {
                rep.violation("symmetry", vec![c.name(u), c.name(ub)], "weak inverse is not reversible");
            }
            match e.witness_of(u) {
                Some(w) if verify_witness(c, c.src(u), c.tgt(u), &w) => {}
                _ => rep.violation("witness", vec![c.name(u)], "certificate does not verify"),
            }
        }
        let mut by_src: FxHashMap<Cell, Vec<Cell>> = FxHashMap::default();
        for &v in &revs {
            by_src.entry(c.src(v)).or_default().push(v);
        }
        let mut n = 0u64;
        for &u in &revs {
            for &v in by_src.get(&c.tgt(u)).map(Vec::as_slice).unwrap_or(&[]) {
                n += 1;
                let uv = c.comp(k - 1, u, v).unwrap();
                if !e.is_reversible(uv) {
                    rep.violation("transitivity", vec![c.name(u), c.name(v)], "composite not reversible");
                }
            }
        }
        rep.count("transitivity_instances", n);
        if k >= 2 {
            let mut m = 0u64;
            for &v in &revs {
                for p in 0..k - 1 {
                    for w in c.cells(p + 1) {
                        if let Some(r) = c.comp(p, w, v) {
                            m += 1;
                            if !e.is_reversible(r) {
                                rep.violation(
                                    "compatibility",
                                    vec![c.name(w), c.name(v)],
                                    format!("left whisker along {p} not reversible"),
                                );
                            }
                        }
                        if let Some(r) = c.comp(p, v, w) {
                            m += 1;
                            if !e.is_reversible(r) {
                                rep.violation(
                                    "compatibility",
                                    vec![c.name(v), c.name(w)],
                                    format!("right whisker along {p} not reversible"),
                                );
                            }
                        }
                    }
                }
            }
            rep.count("compatibility_instances", m);
        }
    }
    rep
}

/// Every ω-functor maps certificates to certificates.
pub fn preservation_check(f: &Functor, ex: &EqvTable) -> CheckReport {
    let mut rep = CheckReport::new("functor_preserves_equivalence");
    let (x, y) = (&*f.dom, &*f.cod);
    for k in 1..=x.cap() {
        for u in ex.reversible_cells(k) {
            let w = ex.witness_of(u).expect("reversible cell has a certificate");
            let fw = map_witness(f, &w);
            if !verify_witness(y, f.apply(x.src(u)), f.apply(x.tgt(u)), &fw) {
                rep.violation("preservation", vec![x.name(u)], "image certificate does not verify");
            }
        }
    }
    rep
}

/// Which side the reversible cell is composed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `u ∘p v ≋ w`
    Left,
    /// `v ∘p u ≋ w`
    Right,
}

fn divide_check(e: &EqvTable, side: Side, u: Cell, v: Cell, w: Cell) -> bool {
    let c = e.cat();
    let p = u.dim - 1;
    let uv = match side {
        Side::Left => c.comp(p, u, v),
        Side::Right => c.comp(p, v, u),
    };
    uv.is_some_and(|x| x.dim == w.dim && c.parallel(x, w) && e.equiv(x, w))
}

/// All `v` solving a division problem: `v : s → t` when bounds are given,
/// otherwise `v` runs from the free end of `u` to the far end of `w`.
pub fn division_candidates(e: &EqvTable, side: Side, u: Cell, w: Cell, bounds: Option<(Cell, Cell)>) -> Vec<Cell> {
    let c = e.cat();
    if u.dim == 0 {
        return Vec::new();
    }
    let (s, t) = match bounds {
        Some(b) => b,
        None => match side {
            Side::Left => (c.tgt(u), c.tgt_at(w, u.dim - 1)),
            Side::Right => (c.src_at(w, u.dim - 1), c.src(u)),
        },
    };
    if !c.parallel(s, t) {
        return Vec::new();
    }
    c.hom(s, t).filter(|&v| divide_check(e, side, u, v, w)).collect()
}

/// Weak division by a reversible cell `u` along `∘p`, `p = dim u - 1`. For
/// `dim w = dim u` the quotient is `ū ∘p w` (or `w ∘p ū`); one dimension up
/// it is conjugated by a reversible cell `ū ∘p u ⇝ 1`; higher problems are
/// solved by search in `hom(s, t)`. Every answer is checked.
pub fn divide(e: &EqvTable, side: Side, u: Cell, w: Cell, bounds: Option<(Cell, Cell)>) -> Result<Cell> {
    let c = &**e.cat();
    let ub = e
        .weak_inverse(u)
        .ok_or_else(|| OmcError::Invalid(format!("{} is not reversible", c.name(u))))?;
    let p = u.dim - 1;
    let bad = || OmcError::NotComposable(format!("{} and {} do not form a division problem", c.name(u), c.name(w)));
    let v = if w.dim == u.dim {
        if bounds.is_some() {
            return Err(bad());
        }
        match side {
            Side::Left => c.comp(p, ub, w),
            Side::Right => c.comp(p, w, ub),
        }
        .ok_or_else(bad)?
    } else if w.dim == u.dim + 1 {
        let (s, t) = bounds.ok_or_else(bad)?;
        let (loop_, unit) = match side {
            Side::Left => (c.comp(p, ub, u).ok_or_else(bad)?, c.unit(c.tgt(u))),
            Side::Right => (c.comp(p, u, ub).ok_or_else(bad)?, c.unit(c.src(u))),
        };
        let r = e
            .reversible_between(loop_, unit)
            .ok_or_else(|| OmcError::Internal("weak inverse without a reversible unit witness".into()))?;
        let rb = e.weak_inverse(r).ok_or_else(|| OmcError::Internal("reversible cell without inverse".into()))?;
        let q = p + 1;
        let pieces = match side {
            Side::Left => (c.comp(p, rb, s), c.comp(p, ub, w), c.comp(p, r, t)),
            Side::Right => (c.comp(p, s, rb), c.comp(p, w, ub), c.comp(p, t, r)),
        };
        let (Some(a), Some(b), Some(d)) = pieces else { return Err(bad()) };
        c.comp(q, a, b).and_then(|ab| c.comp(q, ab, d)).ok_or_else(bad)?
    } else {
        *division_candidates(e, side, u, w, bounds)
            .first()
            .ok_or_else(|| OmcError::Internal(format!("no quotient of {} by {}", c.name(w), c.name(u))))?
    };
    if let Some((s, t)) = bounds {
        if c.src(v) != s || c.tgt(v) != t {
            return Err(OmcError::Internal("quotient has the wrong boundary".into()));
        }
    }
    if !divide_check(e, side, u, v, w) {
        return Err(OmcError::Internal(format!(
            "quotient {} of {} by {} does not verify",
            c.name(v),
            c.name(w),
            c.name(u)
        )));
    }
    Ok(v)
}

pub fn left_divide(e: &EqvTable, u: Cell, w: Cell, bounds: Option<(Cell, Cell)>) -> Result<Cell> {
    divide(e, Side::Left, u, w, bounds)
}

pub fn right_divide(e: &EqvTable, u: Cell, w: Cell, bounds: Option<(Cell, Cell)>) -> Result<Cell> {
    divide(e, Side::Right, u, w, bounds)
}

/// Whether every cell in the list is ω-equivalent to the first.
pub fn weakly_unique(e: &EqvTable, cells: &[Cell]) -> bool {
    cells.first().is_none_or(|&v| cells.iter().all(|&x| e.equiv(v, x)))
}

/// Division by every reversible cell of `c` against every admissible `w`:
/// the quotient exists, verifies, and is weakly unique.
pub fn division_suite(e: &EqvTable) -> CheckReport {
    let c = &**e.cat();
    let mut rep = CheckReport::new("weak_division");
    let mut n = 0u64;
    for k in 1..=c.cap() {
        for u in e.reversible_cells(k) {
            let p = k - 1;
            for side in [Side::Left, Side::Right] {
                let anchor = match side {
                    Side::Left => c.src(u),
                    Side::Right => c.tgt(u),
                };
                for w in c.cells(k) {
                    let ok = match side {
                        Side::Left => c.src_at(w, p) == anchor && c.src_at(w, p) == c.src_at(u, p),
                        Side::Right => c.tgt_at(w, p) == anchor,
                    } && (p == 0 || (c.src_at(w, p - 1) == c.src_at(u, p - 1) && c.tgt_at(w, p - 1) == c.tgt_at(u, p - 1)));
                    if !ok {
                        continue;
                    }
                    n += 1;
                    check_division(e, &mut rep, side, u, w, None);
                }
                for w in c.cells(k + 1) {
                    let (ws, wt) = (c.src(w), c.tgt(w));
                    let ok = c.src_at(w, p) == c.src_at(ws, p)
                        && (p == 0 || (c.src_at(w, p - 1) == c.src_at(u, p - 1) && c.tgt_at(w, p - 1) == c.tgt_at(u, p - 1)));
                    if !ok {
                        continue;
                    }
                    for s in c.cells(k) {
                        for t in c.hom(c.src(s), c.tgt(s)) {
                            let (us, ut) = match side {
                                Side::Left => (c.comp(p, u, s), c.comp(p, u, t)),
                                Side::Right => (c.comp(p, s, u), c.comp(p, t, u)),
                            };
                            if us == Some(ws) && ut == Some(wt) {
                                n += 1;
                                check_division(e, &mut rep, side, u, w, Some((s, t)));
                            }
                        }
                    }
                }
            }
        }
    }
    rep.count("division_instances", n);
    rep
}

fn check_division(e: &EqvTable, rep: &mut CheckReport, side: Side, u: Cell, w: Cell, bounds: Option<(Cell, Cell)>) {
    let c = e.cat();
    let names = vec![format!("{side:?}"), c.name(u), c.name(w)];
    match divide(e, side, u, w, bounds) {
        Err(err) => rep.violation("existence", names, err.to_string()),
        Ok(v) => {
            let all = division_candidates(e, side, u, w, bounds);
            if !all.contains(&v) || !weakly_unique(e, &all) {
                rep.violation("weak-uniqueness", names, format!("{} alternatives", all.len()));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn interval_cells_are_reversible() {
        let c = Arc::new(fixtures::interval_iso());
        let e = EqvTable::new(c.clone());
        let u = c.cell(1, "u").unwrap();
        let ub = c.cell(1, "ubar").unwrap();
        assert_eq!(e.weak_inverse(u), Some(ub));
        let (a, b) = (c.cell(0, "a").unwrap(), c.cell(0, "b").unwrap());
        assert!(e.equiv(a, b));
        let w = e.witness(a, b).unwrap();
        assert!(verify_witness(&c, a, b, &w));
        assert!(congruence_suite(&e).holds());
    }

    #[test]
    fn arrow_is_not_reversible() {
        let c = Arc::new(fixtures::walking_arrow());
        let e = EqvTable::new(c.clone());
        assert!(!e.is_reversible(c.cell(1, "f").unwrap()));
        let (a, b) = (c.cell(0, "a").unwrap(), c.cell(0, "b").unwrap());
        assert!(!e.equiv(a, b));
        assert!(e.equiv(a, a));
    }

    #[test]
    fn discrete_points_are_not_equivalent() {
        let c = Arc::new(fixtures::discrete(2));
        let e = EqvTable::new(c.clone());
        assert!(!e.equiv(Cell::new(0, 0), Cell::new(0, 1)));
    }

    #[test]
    fn weak_equivalence_examples() {
        let iso = Arc::new(fixtures::interval_iso());
        let t = Arc::new(fixtures::terminal());
        let d2 = Arc::new(fixtures::discrete(2));
        assert!(is_weak_equivalence(&Functor::identity(iso.clone())).holds());
        let bang = Functor::constant(iso.clone(), t.clone(), Cell::new(0, 0));
        assert!(is_weak_equivalence(&bang).holds());
        assert!(is_trivial_fibration(&bang).holds());
        assert!(weak_injectivity_check(&bang).unwrap().holds());
        let bang2 = Functor::constant(d2.clone(), t.clone(), Cell::new(0, 0));
        let r = is_weak_equivalence(&bang2);
        assert!(r.fails());
        assert!(r.violations.iter().all(|v| v.law == "clause-ii"));
        let incl = Functor::constant(t, d2, Cell::new(0, 0));
        let r = is_trivial_fibration(&incl);
        assert!(r.violations.iter().any(|v| v.law == "clause-i"));
    }

    #[test]
    fn division_in_interval() {
        let c = Arc::new(fixtures::interval_iso());
        let e = EqvTable::new(c.clone());
        let u = c.cell(1, "u").unwrap();
        let a = c.cell(0, "a").unwrap();
        let one_a = c.unit(a);
        assert_eq!(left_divide(&e, one_a, u, None).unwrap(), u);
        let v = left_divide(&e, u, one_a, None).unwrap();
        assert_eq!(v, c.cell(1, "ubar").unwrap());
        let r = division_suite(&e);
        assert!(r.holds(), "{}", r.summary());
    }

    #[test]
    fn division_in_double_suspension() {
        let c = Arc::new(crate::random::suspension(&crate::random::suspension(&fixtures::interval_iso())));
        let e = EqvTable::new(c);
        let r = division_suite(&e);
        assert!(r.holds(), "{}", r.summary());
    }
}
