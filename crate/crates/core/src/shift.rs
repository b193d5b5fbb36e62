use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::category::{Cell, FiniteOmegaCat, RawCategory};
use crate::error::{OmcError, Result};
use crate::functor::Functor;

/// The hom ω-category `⟨x,y⟩`: its k-cells are the (k+1)-cells of the base
/// running from `x` to `y` in dimension 0.
#[derive(Debug, Clone)]
pub struct ShiftHom {
    pub base: Arc<FiniteOmegaCat>,
    pub x: Cell,
    pub y: Cell,
    pub cat: Arc<FiniteOmegaCat>,
    embed: Vec<Vec<Cell>>,
    index: FxHashMap<Cell, Cell>,
}

impl ShiftHom {
    /// The base cell `u` behind the hom cell `[u]`.
    pub fn unshift(&self, c: Cell) -> Cell {
        let cap = self.cat.cap();
        if c.dim <= cap {
            self.embed[c.dim][c.idx as usize]
        } else {
            let top = self.embed[cap][c.idx as usize];
            self.base.unit_to(top, c.dim + 1)
        }
    }

    /// The hom cell `[u]` for a base cell `u : x ⇒₀ y` of positive dimension.
    pub fn shift(&self, u: Cell) -> Option<Cell> {
        if u.dim == 0 {
            return None;
        }
        let cap = self.cat.cap();
        if u.dim - 1 <= cap {
            self.index.get(&u).copied()
        } else {
            let b = self.base.base_of(u);
            let top = self.base.unit_to(b, cap + 1);
            if b.dim > cap + 1 || self.base.unit_to(top, u.dim) != u {
                return None;
            }
            self.index.get(&top).map(|c| Cell::new(u.dim - 1, c.idx))
        }
    }
}

pub fn shift_hom(c: Arc<FiniteOmegaCat>, x: Cell, y: Cell) -> Result<ShiftHom> {
    if x.dim != 0 || y.dim != 0 {
        return Err(OmcError::Invalid("hom endpoints must be 0-cells".into()));
    }
    let cap = c.cap().saturating_sub(1);
    let mut raw = RawCategory::new(cap);
    let mut embed: Vec<Vec<Cell>> = vec![Vec::new(); cap + 1];
    let mut index: FxHashMap<Cell, Cell> = FxHashMap::default();
    for k in 0..=cap {
        for u in c.cells(k + 1) {
            if c.src_at(u, 0) != x || c.tgt_at(u, 0) != y {
                continue;
            }
            let (s, t) = if k == 0 {
                (0, 0)
            } else {
                (index[&c.src(u)].idx, index[&c.tgt(u)].idx)
            };
            let i = raw.push(k, c.name(u), s, t)?;
            embed[k].push(u);
            index.insert(u, Cell::new(k, i));
        }
    }
    for k in 0..cap {
        for (i, &u) in embed[k].iter().enumerate() {
            raw.set_unit_idx(k, i as u32, index[&c.unit(u)].idx);
        }
    }
    for k in 1..=cap {
        for p in 0..k {
            for (i, &u) in embed[k].iter().enumerate() {
                for (j, &v) in embed[k].iter().enumerate() {
                    if let Some(r) = c.comp(p + 1, u, v) {
                        raw.set_comp_idx(k, p, i as u32, j as u32, index[&r].idx);
                    }
                }
            }
        }
    }
    let cat = Arc::new(raw.freeze()?);
    Ok(ShiftHom {
        base: c,
        x,
        y,
        cat,
        embed,
        index,
    })
}

/// `u ⋆ [v] = [u ∘₀ v]` for a 1-cell `u : x → y` and a cell of `⟨y,z⟩`.
pub fn act_left(c: &FiniteOmegaCat, u: Cell, v: Cell) -> Result<Cell> {
    if u.dim != 1 || v.dim == 0 {
        return Err(OmcError::Invalid("action needs a 1-cell and a hom cell".into()));
    }
    c.comp_or_err(0, u, v)
}

/// `[u] ⋆ v = [u ∘₀ v]` for a cell of `⟨x,y⟩` and a 1-cell `v : y → z`.
pub fn act_right(c: &FiniteOmegaCat, u: Cell, v: Cell) -> Result<Cell> {
    if v.dim != 1 || u.dim == 0 {
        return Err(OmcError::Invalid("action needs a hom cell and a 1-cell".into()));
    }
    c.comp_or_err(0, u, v)
}

/// The precomposition functor `u ⋆ − : ⟨y,z⟩ → ⟨x,z⟩`.
pub fn act_left_functor(from: &ShiftHom, to: &ShiftHom, u: Cell) -> Result<Functor> {
    let base = &from.base;
    if base.src(u) != to.x || base.tgt(u) != from.x || from.y != to.y {
        return Err(OmcError::Invalid("boundary mismatch for left action".into()));
    }
    let mut err = None;
    let f = Functor::from_fn(from.cat.clone(), to.cat.clone(), |c| {
        let v = from.unshift(c);
        match base.comp(0, u, v).and_then(|w| to.shift(w)) {
            Some(r) => r,
            None => {
                err.get_or_insert(c);
                c
            }
        }
    });
    if err.is_some() {
        return Err(OmcError::Internal("left action left the target hom".into()));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::functor::validate_functor;
    use crate::validate::validate_category;

    #[test]
    fn hom_of_terminal_is_terminal() {
        let t = Arc::new(fixtures::terminal());
        let h = shift_hom(t.clone(), Cell::new(0, 0), Cell::new(0, 0)).unwrap();
        assert_eq!(h.cat.count(0), 1);
        assert!(validate_category(&h.cat).holds());
    }

    #[test]
    fn hom_in_interval() {
        let c = Arc::new(fixtures::interval_iso());
        let a = c.cell(0, "a").unwrap();
        let b = c.cell(0, "b").unwrap();
        let h = shift_hom(c.clone(), a, b).unwrap();
        assert_eq!(h.cat.count(0), 1);
        assert_eq!(h.unshift(Cell::new(0, 0)), c.cell(1, "u").unwrap());
        assert!(validate_category(&h.cat).holds());
    }

    #[test]
    fn unit_action() {
        let c = Arc::new(fixtures::interval_iso());
        let a = c.cell(0, "a").unwrap();
        let b = c.cell(0, "b").unwrap();
        let u = c.cell(1, "u").unwrap();
        assert_eq!(act_left(&c, u, c.unit(b)).unwrap(), u);
        let hab = shift_hom(c.clone(), a, b).unwrap();
        let haa = shift_hom(c.clone(), a, a).unwrap();
        let hbb = shift_hom(c.clone(), b, b).unwrap();
        let f = act_left_functor(&hbb, &shift_hom(c.clone(), a, b).unwrap(), u).unwrap();
        assert!(validate_functor(&f).holds());
        let ub = c.cell(1, "ubar").unwrap();
        let g = act_left_functor(&hab, &shift_hom(c.clone(), b, b).unwrap(), ub).unwrap();
        assert!(validate_functor(&g).holds());
        assert_eq!(haa.cat.count(0), 1);
    }
}
