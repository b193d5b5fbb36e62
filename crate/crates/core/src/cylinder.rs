use std::cell::RefCell;

use rustc_hash::FxHashMap;

use crate::category::{Cell, FiniteOmegaCat};
use crate::equivalence::EqvTable;
use crate::error::{OmcError, Result};
use crate::functor::Functor;

/// An n-cylinder `top ⇝̂ bottom` living `depth` hom-levels deep in a base
/// category, stored flat: `layers[i]` holds the pair `(U♭, U♯)` reached after
/// `i` shifts, and `principal` is the reversible cell of the innermost
/// 0-cylinder. At depth `d`, `top` and `bottom` are base cells of dimension
/// `d + n`, the cells of `layers[i]` have dimension `d + i + 1` and the
/// principal has dimension `d + n + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    pub depth: usize,
    pub top: Cell,
    pub bottom: Cell,
    pub layers: Vec<(Cell, Cell)>,
    pub principal: Cell,
}

impl Cylinder {
    pub fn dim(&self) -> usize {
        self.layers.len()
    }

    pub fn flat(&self) -> Option<Cell> {
        self.layers.first().map(|l| l.0)
    }

    pub fn sharp(&self) -> Option<Cell> {
        self.layers.first().map(|l| l.1)
    }

    /// The inner (n-1)-cylinder `U♮` from `top ⋆ U♯` to `U♭ ⋆ bottom`.
    pub fn shift(&self, c: &FiniteOmegaCat) -> Result<Cylinder> {
        let (f, g) = *self
            .layers
            .first()
            .ok_or_else(|| OmcError::Invalid("a 0-cylinder has no shift".into()))?;
        let d = self.depth;
        Ok(Cylinder {
            depth: d + 1,
            top: c.comp_or_err(d, self.top, g)?,
            bottom: c.comp_or_err(d, f, self.bottom)?,
            layers: self.layers[1..].to_vec(),
            principal: self.principal,
        })
    }

    /// Rebuilds a cylinder from its endpoints, its outer pair and its shift,
    /// checking that the shift runs between the expected cells.
    pub fn assemble(
        c: &FiniteOmegaCat,
        top: Cell,
        bottom: Cell,
        flat: Cell,
        sharp: Cell,
        shift: Cylinder,
    ) -> Result<Cylinder> {
        let d = shift
            .depth
            .checked_sub(1)
            .ok_or_else(|| OmcError::Internal("shift at depth 0".into()))?;
        if c.comp(d, top, sharp) != Some(shift.top) || c.comp(d, flat, bottom) != Some(shift.bottom) {
            return Err(OmcError::Internal(format!(
                "shift endpoints do not match: {} / {}",
                c.name(shift.top),
                c.name(shift.bottom)
            )));
        }
        let mut layers = Vec::with_capacity(shift.layers.len() + 1);
        layers.push((flat, sharp));
        layers.extend(shift.layers);
        Ok(Cylinder {
            depth: d,
            top,
            bottom,
            layers,
            principal: shift.principal,
        })
    }

    /// Every cell mentioned by the cylinder.
    pub fn components(&self) -> Vec<Cell> {
        let mut v = vec![self.top, self.bottom];
        for &(f, g) in &self.layers {
            v.push(f);
            v.push(g);
        }
        v.push(self.principal);
        v
    }

    fn map_cells(&self, mut f: impl FnMut(Cell) -> Result<Cell>) -> Result<Cylinder> {
        Ok(Cylinder {
            depth: self.depth,
            top: f(self.top)?,
            bottom: f(self.bottom)?,
            layers: self
                .layers
                .iter()
                .map(|&(a, b)| Ok((f(a)?, f(b)?)))
                .collect::<Result<_>>()?,
            principal: f(self.principal)?,
        })
    }

    pub fn describe(&self, c: &FiniteOmegaCat) -> String {
        let layers: Vec<String> = self
            .layers
            .iter()
            .map(|&(f, g)| format!("{},{}", c.name(f), c.name(g)))
            .collect();
        format!(
            "[{}⇝{}|{}|{}]",
            c.name(self.top),
            c.name(self.bottom),
            layers.join(";"),
            c.name(self.principal)
        )
    }
}

/// Whether the cylinder satisfies the inductive definition: reversible outer
/// pairs between the right boundaries and a valid shift.
pub fn is_valid(e: &EqvTable, u: &Cylinder) -> bool {
    let c = &**e.cat();
    let d = u.depth;
    if u.top.dim != d + u.dim() || u.bottom.dim != d + u.dim() {
        return false;
    }
    match u.layers.first() {
        None => {
            u.principal.dim == d + 1
                && c.src(u.principal) == u.top
                && c.tgt(u.principal) == u.bottom
                && e.is_reversible(u.principal)
        }
        Some(&(f, g)) => {
            if f.dim != d + 1 || g.dim != d + 1 {
                return false;
            }
            if c.src(f) != c.src_at(u.top, d)
                || c.tgt(f) != c.src_at(u.bottom, d)
                || c.src(g) != c.tgt_at(u.top, d)
                || c.tgt(g) != c.tgt_at(u.bottom, d)
            {
                return false;
            }
            if !e.is_reversible(f) || !e.is_reversible(g) {
                return false;
            }
            match u.shift(c) {
                Ok(s) => is_valid(e, &s),
                Err(_) => false,
            }
        }
    }
}

/// Source of an (n+1)-cylinder.
pub fn source(c: &FiniteOmegaCat, w: &Cylinder) -> Result<Cylinder> {
    boundary(c, w, true)
}

/// Target of an (n+1)-cylinder.
pub fn target(c: &FiniteOmegaCat, w: &Cylinder) -> Result<Cylinder> {
    boundary(c, w, false)
}

fn boundary(c: &FiniteOmegaCat, w: &Cylinder, src: bool) -> Result<Cylinder> {
    let n = w
        .dim()
        .checked_sub(1)
        .ok_or_else(|| OmcError::Invalid("a 0-cylinder has no boundary cylinders".into()))?;
    let (f, g) = w.layers[n];
    let (top, bottom) = if src {
        (c.src(w.top), c.src(w.bottom))
    } else {
        (c.tgt(w.top), c.tgt(w.bottom))
    };
    Ok(Cylinder {
        depth: w.depth,
        top,
        bottom,
        layers: w.layers[..n].to_vec(),
        principal: if src { f } else { g },
    })
}

/// Iterated source down to cylinder dimension `p`.
pub fn source_at(c: &FiniteOmegaCat, w: &Cylinder, p: usize) -> Result<Cylinder> {
    let mut w = w.clone();
    while w.dim() > p {
        w = source(c, &w)?;
    }
    Ok(w)
}

pub fn target_at(c: &FiniteOmegaCat, w: &Cylinder, p: usize) -> Result<Cylinder> {
    let mut w = w.clone();
    while w.dim() > p {
        w = target(c, &w)?;
    }
    Ok(w)
}

/// The trivial cylinder `τx` at the given depth.
pub fn triv(c: &FiniteOmegaCat, depth: usize, x: Cell) -> Result<Cylinder> {
    if x.dim < depth {
        return Err(OmcError::Invalid(format!(
            "cell {} is below depth {depth}",
            c.name(x)
        )));
    }
    let layers = (depth..x.dim)
        .map(|k| (c.unit(c.src_at(x, k)), c.unit(c.tgt_at(x, k))))
        .collect();
    Ok(Cylinder {
        depth,
        top: x,
        bottom: x,
        layers,
        principal: c.unit(x),
    })
}

/// The degenerate cylinder whose principal is the reversible cell `u`.
pub fn degenerate_of(e: &EqvTable, depth: usize, u: Cell) -> Result<Cylinder> {
    let c = &**e.cat();
    if u.dim <= depth || !e.is_reversible(u) {
        return Err(OmcError::Invalid(format!("{} is not a reversible cell", c.name(u))));
    }
    let (x, y) = (c.src(u), c.tgt(u));
    let mut w = triv(c, depth, x)?;
    w.bottom = y;
    w.principal = u;
    Ok(w)
}

pub fn is_degenerate(c: &FiniteOmegaCat, u: &Cylinder) -> bool {
    if u.dim() > 0 && !c.parallel(u.top, u.bottom) {
        return false;
    }
    u.layers.iter().enumerate().all(|(i, &(f, g))| {
        let k = u.depth + i;
        f == c.unit(c.src_at(u.top, k)) && g == c.unit(c.tgt_at(u.top, k))
    })
}

/// The reversible cell behind a degenerate cylinder.
pub fn principal_of(c: &FiniteOmegaCat, u: &Cylinder) -> Result<Cell> {
    if !is_degenerate(c, u) {
        return Err(OmcError::Invalid("cylinder is not degenerate".into()));
    }
    Ok(u.principal)
}

/// `Γf U`.
pub fn map_cylinder(f: &Functor, u: &Cylinder) -> Cylinder {
    u.map_cells(|x| Ok(f.apply(x))).expect("functor application is total")
}

/// Left action of a cell of dimension `depth` on a cylinder at `depth`,
/// computed componentwise along `depth - 1`.
pub fn act_left(c: &FiniteOmegaCat, u: Cell, v: &Cylinder) -> Result<Cylinder> {
    let p = action_level(v, u)?;
    v.map_cells(|x| c.comp_or_err(p, u, x))
}

pub fn act_right(c: &FiniteOmegaCat, u: &Cylinder, v: Cell) -> Result<Cylinder> {
    let p = action_level(u, v)?;
    u.map_cells(|x| c.comp_or_err(p, x, v))
}

fn action_level(v: &Cylinder, u: Cell) -> Result<usize> {
    if v.depth == 0 || u.dim != v.depth {
        return Err(OmcError::Invalid(format!(
            "acting cell has dimension {}, cylinder has depth {}",
            u.dim, v.depth
        )));
    }
    Ok(v.depth - 1)
}

/// `U ⊛ V`: the composition bifunctor of the enclosing hom applied to the
/// pair `(U, V)`, which acts componentwise.
pub fn mult_raw(c: &FiniteOmegaCat, u: &Cylinder, v: &Cylinder) -> Result<Cylinder> {
    if u.depth == 0 || u.depth != v.depth || u.dim() != v.dim() {
        return Err(OmcError::Invalid("multiplied cylinders must share depth > 0 and dimension".into()));
    }
    let p = u.depth - 1;
    let a = u.components();
    let b = v.components();
    let mut r = Vec::with_capacity(a.len());
    for (x, y) in a.into_iter().zip(b) {
        r.push(c.comp_or_err(p, x, y)?);
    }
    let n = u.dim();
    Ok(Cylinder {
        depth: u.depth,
        top: r[0],
        bottom: r[1],
        layers: (0..n).map(|i| (r[2 + 2 * i], r[3 + 2 * i])).collect(),
        principal: r[2 + 2 * n],
    })
}

/// `U ⊛ V`, cross-checked against both sides of the commutation identity.
pub fn mult(c: &FiniteOmegaCat, u: &Cylinder, v: &Cylinder) -> Result<Cylinder> {
    let w = mult_raw(c, u, v)?;
    let lhs = concat(c, &ext_act_right(c, u, v.top)?, &ext_act_left(c, u.bottom, v)?)?;
    let rhs = concat(c, &ext_act_left(c, u.top, v)?, &ext_act_right(c, u, v.bottom)?)?;
    if lhs != w || rhs != w {
        return Err(OmcError::Internal(format!(
            "multiplication disagrees with commutation: {} vs {} / {}",
            w.describe(c),
            lhs.describe(c),
            rhs.describe(c)
        )));
    }
    Ok(w)
}

/// `u ⋆ V = τ[u] ⊛ V` for a cell `u` of dimension at most that of `Top V`;
/// lower-dimensional cells are first padded with units.
pub fn ext_act_left(c: &FiniteOmegaCat, u: Cell, v: &Cylinder) -> Result<Cylinder> {
    let u = c.unit_to(u, v.top.dim);
    mult_raw(c, &triv(c, v.depth, u)?, v)
}

pub fn ext_act_right(c: &FiniteOmegaCat, u: &Cylinder, v: Cell) -> Result<Cylinder> {
    let v = c.unit_to(v, u.top.dim);
    mult_raw(c, u, &triv(c, u.depth, v)?)
}

/// `U ⋄ V` for consecutive cylinders (`Bot U = Top V`).
pub fn concat(c: &FiniteOmegaCat, u: &Cylinder, v: &Cylinder) -> Result<Cylinder> {
    if u.depth != v.depth || u.dim() != v.dim() || u.bottom != v.top {
        return Err(OmcError::NotComposable(format!(
            "cylinders are not consecutive: {} then {}",
            u.describe(c),
            v.describe(c)
        )));
    }
    let d = u.depth;
    if u.dim() == 0 {
        return Ok(Cylinder {
            depth: d,
            top: u.top,
            bottom: v.bottom,
            layers: Vec::new(),
            principal: c.comp_or_err(d, u.principal, v.principal)?,
        });
    }
    let (uf, ug) = u.layers[0];
    let (vf, vg) = v.layers[0];
    let f = c.comp_or_err(d, uf, vf)?;
    let g = c.comp_or_err(d, ug, vg)?;
    let shift = concat(
        c,
        &act_right(c, &u.shift(c)?, vg)?,
        &act_left(c, uf, &v.shift(c)?)?,
    )?;
    Cylinder::assemble(c, u.top, v.bottom, f, g, shift)
}

/// `U ∘_p V` for m-cylinders with `m > p`.
pub fn compose(c: &FiniteOmegaCat, p: usize, u: &Cylinder, v: &Cylinder) -> Result<Cylinder> {
    let m = u.dim();
    if u.depth != v.depth || v.dim() != m || p >= m {
        return Err(OmcError::NotComposable(format!(
            "cannot compose a {m}-cylinder with a {}-cylinder along {p}",
            v.dim()
        )));
    }
    if target_at(c, u, p)? != source_at(c, v, p)? {
        return Err(OmcError::NotComposable(format!(
            "{} and {} are not {p}-composable",
            u.describe(c),
            v.describe(c)
        )));
    }
    let d = u.depth;
    let top = c.comp_or_err(d + p, u.top, v.top)?;
    let bottom = c.comp_or_err(d + p, u.bottom, v.bottom)?;
    let (flat, sharp) = (u.layers[0].0, v.layers[0].1);
    let shift = if p == 0 {
        concat(
            c,
            &ext_act_left(c, u.top, &v.shift(c)?)?,
            &ext_act_right(c, &u.shift(c)?, v.bottom)?,
        )?
    } else {
        compose(c, p - 1, &u.shift(c)?, &v.shift(c)?)?
    };
    Cylinder::assemble(c, top, bottom, flat, sharp, shift)
}

/// `1^m U` for an n-cylinder `U` and `m > n`.
pub fn unit(c: &FiniteOmegaCat, u: &Cylinder, m: usize) -> Result<Cylinder> {
    let n = u.dim();
    if m <= n {
        return Err(OmcError::Invalid(format!("unit of a {n}-cylinder in dimension {m}")));
    }
    let d = u.depth;
    let top = c.unit_to(u.top, d + m);
    let bottom = c.unit_to(u.bottom, d + m);
    if n == 0 {
        let p = u.principal;
        let shift = triv(c, d + 1, c.unit_to(p, d + m))?;
        Cylinder::assemble(c, top, bottom, p, p, shift)
    } else {
        let (f, g) = u.layers[0];
        let shift = unit(c, &u.shift(c)?, m - 1)?;
        Cylinder::assemble(c, top, bottom, f, g, shift)
    }
}

/// Memoized enumeration of all cylinders between two cells at a given depth.
pub struct CylinderEnumerator<'a> {
    eqv: &'a EqvTable,
    memo: RefCell<FxHashMap<(usize, Cell, Cell), Vec<Cylinder>>>,
    budget: usize,
    produced: RefCell<usize>,
}

impl<'a> CylinderEnumerator<'a> {
    pub fn new(eqv: &'a EqvTable, budget: usize) -> Self {
        CylinderEnumerator {
            eqv,
            memo: RefCell::new(FxHashMap::default()),
            budget,
            produced: RefCell::new(0),
        }
    }

    pub fn eqv(&self) -> &EqvTable {
        self.eqv
    }

    /// Every cylinder `t ⇝̂ b` at depth `d`, where `t` and `b` have dimension
    /// at least `d`.
    pub fn between(&self, d: usize, t: Cell, b: Cell) -> Result<Vec<Cylinder>> {
        if let Some(v) = self.memo.borrow().get(&(d, t, b)) {
            return Ok(v.clone());
        }
        let c = &**self.eqv.cat();
        let mut out = Vec::new();
        if t.dim != b.dim || t.dim < d {
            return Ok(out);
        }
        if t.dim == d {
            if c.parallel(t, b) {
                for p in self.eqv.reversible_hom(t, b) {
                    out.push(Cylinder {
                        depth: d,
                        top: t,
                        bottom: b,
                        layers: Vec::new(),
                        principal: p,
                    });
                }
            }
        } else {
            let fs = self.eqv.reversible_hom(c.src_at(t, d), c.src_at(b, d));
            let gs = self.eqv.reversible_hom(c.tgt_at(t, d), c.tgt_at(b, d));
            for &f in &fs {
                for &g in &gs {
                    let (Some(t2), Some(b2)) = (c.comp(d, t, g), c.comp(d, f, b)) else {
                        continue;
                    };
                    for s in self.between(d + 1, t2, b2)? {
                        out.push(Cylinder::assemble(c, t, b, f, g, s)?);
                    }
                }
            }
        }
        *self.produced.borrow_mut() += out.len();
        if *self.produced.borrow() > self.budget {
            return Err(OmcError::Budget(format!(
                "cylinder enumeration exceeded {} cylinders",
                self.budget
            )));
        }
        self.memo.borrow_mut().insert((d, t, b), out.clone());
        Ok(out)
    }

    /// Every n-cylinder at depth `d` whose endpoints share their
    /// `(d-1)`-dimensional boundaries.
    pub fn all_at(&self, d: usize, n: usize) -> Result<Vec<Cylinder>> {
        let c = &**self.eqv.cat();
        let k = d + n;
        let cells: Vec<Cell> = c.cells(k.min(c.cap())).map(|x| c.unit_to(x, k)).collect();
        let mut out = Vec::new();
        for &t in &cells {
            for &b in &cells {
                if d > 0 && (c.src_at(t, d - 1) != c.src_at(b, d - 1) || c.tgt_at(t, d - 1) != c.tgt_at(b, d - 1)) {
                    continue;
                }
                out.extend(self.between(d, t, b)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::sync::Arc;

    fn iso() -> (Arc<FiniteOmegaCat>, EqvTable) {
        let c = Arc::new(fixtures::interval_iso());
        let e = EqvTable::new(c.clone());
        (c, e)
    }

    #[test]
    fn zero_cylinders_of_interval() {
        let (c, e) = iso();
        let en = CylinderEnumerator::new(&e, 1000);
        let zero = en.all_at(0, 0).unwrap();
        // 1a, u, ubar, 1b
        assert_eq!(zero.len(), 4);
        for z in &zero {
            assert!(is_valid(&e, z));
        }
        let u = c.cell(1, "u").unwrap();
        let ub = c.cell(1, "ubar").unwrap();
        let cu = degenerate_of(&e, 0, u).unwrap();
        let cub = degenerate_of(&e, 0, ub).unwrap();
        let a = c.cell(0, "a").unwrap();
        assert_eq!(concat(&c, &cu, &cub).unwrap(), triv(&c, 0, a).unwrap());
    }

    #[test]
    fn trivial_cylinder_boundaries() {
        let (c, e) = iso();
        let u = c.cell(1, "u").unwrap();
        let t = triv(&c, 0, u).unwrap();
        assert!(is_valid(&e, &t));
        assert!(is_degenerate(&c, &t));
        assert_eq!(principal_of(&c, &t).unwrap(), c.unit(u));
        assert_eq!(source(&c, &t).unwrap(), triv(&c, 0, c.src(u)).unwrap());
        assert_eq!(target(&c, &t).unwrap(), triv(&c, 0, c.tgt(u)).unwrap());
    }

    #[test]
    fn one_cylinders_are_valid_and_globular() {
        let (c, e) = iso();
        let en = CylinderEnumerator::new(&e, 10_000);
        let ones = en.all_at(0, 1).unwrap();
        assert!(!ones.is_empty());
        for w in &ones {
            assert!(is_valid(&e, w), "{}", w.describe(&c));
            let s = source(&c, w).unwrap();
            let t = target(&c, w).unwrap();
            assert!(is_valid(&e, &s) && is_valid(&e, &t));
            let u2 = unit(&c, w, 2).unwrap();
            assert!(is_valid(&e, &u2));
            assert_eq!(source(&c, &u2).unwrap(), *w);
        }
    }

    #[test]
    fn non_degenerate_has_no_principal_cell() {
        let (c, e) = iso();
        let en = CylinderEnumerator::new(&e, 10_000);
        let nd = en
            .all_at(0, 1)
            .unwrap()
            .into_iter()
            .find(|w| !is_degenerate(&c, w))
            .unwrap();
        assert!(principal_of(&c, &nd).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let (_, e) = iso();
        let en = CylinderEnumerator::new(&e, 2);
        assert!(matches!(en.all_at(0, 1), Err(OmcError::Budget(_))));
    }
}
