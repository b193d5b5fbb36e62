use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::category::{Cell, FiniteOmegaCat, RawCategory};
use crate::cylinder::{self, Cylinder, CylinderEnumerator};
use crate::equivalence::EqvTable;
use crate::error::{OmcError, Result};
use crate::functor::Functor;
use crate::report::CheckReport;
use crate::validate::validate_category;

pub const DEFAULT_CYLINDER_BUDGET: usize = 50_000;

/// The ω-category `ΓX` of cylinders in `X`, materialized up to the cap of
/// `X`, with `Top`, `Bot : ΓX → X` and `Triv : X → ΓX`.
#[derive(Debug, Clone)]
pub struct GammaCat {
    pub base: Arc<FiniteOmegaCat>,
    pub eqv: Arc<EqvTable>,
    pub cat: Arc<FiniteOmegaCat>,
    pub top: Functor,
    pub bot: Functor,
    pub triv: Functor,
    cyls: Vec<Vec<Cylinder>>,
    index: Vec<FxHashMap<Cylinder, u32>>,
}

impl GammaCat {
    /// The cylinder behind a cell of `ΓX`; cells above the cap are units.
    pub fn cylinder(&self, c: Cell) -> Cylinder {
        let cap = self.cat.cap();
        if c.dim <= cap {
            self.cyls[c.dim][c.idx as usize].clone()
        } else {
            let u = &self.cyls[cap][c.idx as usize];
            cylinder::unit(&self.base, u, c.dim).expect("units of stored cylinders exist")
        }
    }

    /// The cell of `ΓX` for a depth-0 cylinder.
    pub fn cell_of(&self, u: &Cylinder) -> Option<Cell> {
        if u.depth != 0 {
            return None;
        }
        let k = u.dim();
        let cap = self.cat.cap();
        if k <= cap {
            return self.index[k].get(u).map(|&i| Cell::new(k, i));
        }
        let mut w = u.clone();
        while w.dim() > cap {
            w = cylinder::source(&self.base, &w).ok()?;
        }
        let i = *self.index[cap].get(&w)?;
        let c = Cell::new(k, i);
        (self.cylinder(c) == *u).then_some(c)
    }

    pub fn cylinders(&self, k: usize) -> &[Cylinder] {
        &self.cyls[k.min(self.cat.cap())]
    }
}

pub fn gamma(base: Arc<FiniteOmegaCat>) -> Result<GammaCat> {
    gamma_with_budget(base, DEFAULT_CYLINDER_BUDGET)
}

pub fn gamma_with_budget(base: Arc<FiniteOmegaCat>, budget: usize) -> Result<GammaCat> {
    let eqv = Arc::new(EqvTable::new(base.clone()));
    gamma_with_eqv(eqv, budget)
}

pub fn gamma_with_eqv(eqv: Arc<EqvTable>, budget: usize) -> Result<GammaCat> {
    let base = eqv.cat().clone();
    let c = &*base;
    let cap = c.cap();
    let en = CylinderEnumerator::new(&eqv, budget);
    let mut cyls: Vec<Vec<Cylinder>> = Vec::with_capacity(cap + 1);
    let mut index: Vec<FxHashMap<Cylinder, u32>> = Vec::with_capacity(cap + 1);
    let mut total = 0usize;
    for k in 0..=cap {
        let mut v = en.all_at(0, k)?;
        v.sort();
        total += v.len();
        if total > budget {
            return Err(OmcError::Budget(format!(
                "Γ needs more than {budget} cylinders ({total} reached)"
            )));
        }
        index.push(v.iter().enumerate().map(|(i, u)| (u.clone(), i as u32)).collect());
        cyls.push(v);
    }
    let mut raw = RawCategory::new(cap);
    for k in 0..=cap {
        for u in &cyls[k] {
            let (s, t) = if k == 0 {
                (0, 0)
            } else {
                (
                    lookup(&index[k - 1], &cylinder::source(c, u)?)?,
                    lookup(&index[k - 1], &cylinder::target(c, u)?)?,
                )
            };
            raw.push(k, u.describe(c), s, t)?;
        }
    }
    for k in 0..cap {
        for (i, u) in cyls[k].iter().enumerate() {
            let w = cylinder::unit(c, u, k + 1)?;
            raw.set_unit_idx(k, i as u32, lookup(&index[k + 1], &w)?);
        }
    }
    for k in 1..=cap {
        for p in 0..k {
            let mut by_src: FxHashMap<Cylinder, Vec<usize>> = FxHashMap::default();
            for (j, v) in cyls[k].iter().enumerate() {
                by_src.entry(cylinder::source_at(c, v, p)?).or_default().push(j);
            }
            for (i, u) in cyls[k].iter().enumerate() {
                let Some(js) = by_src.get(&cylinder::target_at(c, u, p)?) else { continue };
                for &j in js {
                    let w = cylinder::compose(c, p, u, &cyls[k][j])?;
                    raw.set_comp_idx(k, p, i as u32, j as u32, lookup(&index[k], &w)?);
                }
            }
        }
    }
    let cat = Arc::new(raw.freeze_with_limit(budget)?);
    let top = Functor::from_fn(cat.clone(), base.clone(), |x| cyls[x.dim][x.idx as usize].top)?;
    let bot = Functor::from_fn(cat.clone(), base.clone(), |x| cyls[x.dim][x.idx as usize].bottom)?;
    let mut missing = None;
    let triv = Functor::from_fn(base.clone(), cat.clone(), |x| {
        let t = cylinder::triv(c, 0, x).expect("depth 0");
        match index[x.dim].get(&t) {
            Some(&i) => Cell::new(x.dim, i),
            None => {
                missing.get_or_insert(x);
                x
            }
        }
    })?;
    if let Some(x) = missing {
        return Err(OmcError::Internal(format!("trivial cylinder of {} not enumerated", c.name(x))));
    }
    Ok(GammaCat {
        base,
        eqv,
        cat,
        top,
        bot,
        triv,
        cyls,
        index,
    })
}

fn lookup(index: &FxHashMap<Cylinder, u32>, u: &Cylinder) -> Result<u32> {
    index
        .get(u)
        .copied()
        .ok_or_else(|| OmcError::Internal(format!("cylinder {:?} not enumerated", u)))
}

/// `Γf : ΓX → ΓY`.
pub fn gamma_functor(f: &Functor, gx: &GammaCat, gy: &GammaCat) -> Result<Functor> {
    if *f.dom != *gx.base || *f.cod != *gy.base {
        return Err(OmcError::Invalid("Γ categories do not match the functor".into()));
    }
    let mut missing = None;
    let g = Functor::from_fn(gx.cat.clone(), gy.cat.clone(), |x| {
        let u = cylinder::map_cylinder(f, &gx.cylinder(x));
        match gy.cell_of(&u) {
            Some(c) => c,
            None => {
                missing.get_or_insert(x);
                Cell::new(x.dim, 0)
            }
        }
    })?;
    if let Some(x) = missing {
        return Err(OmcError::Internal(format!(
            "image of cylinder {} is not a cylinder",
            gx.cat.name(x)
        )));
    }
    Ok(g)
}

/// `Γ(X)` is a valid ω-category, `Top`, `Bot` and `Triv` are ω-functors and
/// `Top ∘ Triv = id = Bot ∘ Triv`.
pub fn gamma_structure_report(g: &GammaCat) -> CheckReport {
    let mut rep = CheckReport::new("gamma_structure");
    rep.merge(validate_category(&g.cat));
    for (name, f) in [("top", &g.top), ("bot", &g.bot), ("triv", &g.triv)] {
        let r = crate::functor::validate_functor(f);
        if !r.holds() {
            rep.violation("functor", vec![name.into()], r.summary());
        }
    }
    for (name, leg) in [("top", &g.top), ("bot", &g.bot)] {
        match g.triv.then(leg) {
            Ok(h) if h.is_identity() => {}
            _ => rep.violation("section", vec![name.into()], "leg ∘ Triv is not the identity"),
        }
    }
    for k in 0..=g.cat.cap() {
        rep.count(&format!("cylinders_dim_{k}"), g.cat.count(k) as u64);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::search::find_isomorphism;

    #[test]
    fn gamma_of_terminal_is_terminal() {
        let t = Arc::new(fixtures::terminal());
        let g = gamma(t.clone()).unwrap();
        assert!(find_isomorphism(g.cat.clone(), t).unwrap().is_some());
    }

    #[test]
    fn gamma_of_interval_is_valid() {
        let c = Arc::new(fixtures::interval_iso());
        let g = gamma(c).unwrap();
        let r = gamma_structure_report(&g);
        assert!(r.holds(), "{}", r.summary());
        // 0-cylinders: four reversible 1-cells.
        assert_eq!(g.cat.count(0), 4);
    }

    #[test]
    fn gamma_of_identity_is_identity() {
        let c = Arc::new(fixtures::interval_iso());
        let g = gamma(c.clone()).unwrap();
        let id = Functor::identity(c);
        assert!(gamma_functor(&id, &g, &g).unwrap().is_identity());
    }
}
