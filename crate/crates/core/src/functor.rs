use std::sync::Arc;

use crate::category::{Cell, FiniteOmegaCat};
use crate::error::{OmcError, Result};
use crate::report::CheckReport;

/// An ω-functor between finite categories, stored as one index table per
/// stored dimension of the domain. Images in dimensions above the codomain
/// cap use the codomain's implicit-unit indexing.
#[derive(Debug, Clone)]
pub struct Functor {
    pub dom: Arc<FiniteOmegaCat>,
    pub cod: Arc<FiniteOmegaCat>,
    map: Vec<Vec<u32>>,
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && *self.dom == *other.dom && *self.cod == *other.cod
    }
}

impl Eq for Functor {}

impl Functor {
    pub fn from_map(
        dom: Arc<FiniteOmegaCat>,
        cod: Arc<FiniteOmegaCat>,
        map: Vec<Vec<u32>>,
    ) -> Result<Self> {
        if map.len() != dom.cap() + 1 {
            return Err(OmcError::Structure(format!(
                "functor table has {} dimensions, domain has {}",
                map.len(),
                dom.cap() + 1
            )));
        }
        for (k, row) in map.iter().enumerate() {
            if row.len() != dom.count(k) {
                return Err(OmcError::Structure(format!(
                    "functor table in dimension {k} has {} entries, domain has {}",
                    row.len(),
                    dom.count(k)
                )));
            }
            if let Some(&bad) = row.iter().find(|&&i| i as usize >= cod.count(k)) {
                return Err(OmcError::Structure(format!(
                    "functor image index {bad} out of range in dimension {k}"
                )));
            }
        }
        Ok(Functor { dom, cod, map })
    }

    /// Builds a functor from the images of stored cells, given as a closure.
    pub fn from_fn(
        dom: Arc<FiniteOmegaCat>,
        cod: Arc<FiniteOmegaCat>,
        mut f: impl FnMut(Cell) -> Cell,
    ) -> Result<Self> {
        let mut map = Vec::with_capacity(dom.cap() + 1);
        for k in 0..=dom.cap() {
            let mut row = Vec::with_capacity(dom.count(k));
            for c in dom.cells(k) {
                let img = f(c);
                if img.dim != k {
                    return Err(OmcError::Structure(format!(
                        "image of {} has dimension {} instead of {k}",
                        dom.name(c),
                        img.dim
                    )));
                }
                row.push(img.idx);
            }
            map.push(row);
        }
        Functor::from_map(dom, cod, map)
    }

    pub fn identity(c: Arc<FiniteOmegaCat>) -> Self {
        let map = (0..=c.cap()).map(|k| (0..c.count(k) as u32).collect()).collect();
        Functor {
            dom: c.clone(),
            cod: c,
            map,
        }
    }

    /// Constant functor onto the iterated units of a 0-cell.
    pub fn constant(dom: Arc<FiniteOmegaCat>, cod: Arc<FiniteOmegaCat>, obj: Cell) -> Self {
        let map = (0..=dom.cap())
            .map(|k| vec![cod.unit_to(obj, k).idx; dom.count(k)])
            .collect();
        Functor { dom, cod, map }
    }

    pub fn table(&self) -> &[Vec<u32>] {
        &self.map
    }

    pub fn apply(&self, c: Cell) -> Cell {
        let cap = self.dom.cap();
        if c.dim <= cap {
            Cell::new(c.dim, self.map[c.dim][c.idx as usize])
        } else {
            let base = Cell::new(cap, self.map[cap][c.idx as usize]);
            self.cod.unit_to(base, c.dim)
        }
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Functor) -> Result<Functor> {
        if *self.cod != *g.dom {
            return Err(OmcError::Invalid("functors are not composable".into()));
        }
        Functor::from_fn(self.dom.clone(), g.cod.clone(), |c| g.apply(self.apply(c)))
    }

    pub fn same_map(&self, other: &Functor) -> bool {
        self.map == other.map
    }

    pub fn is_identity(&self) -> bool {
        *self.dom == *self.cod
            && self
                .map
                .iter()
                .all(|row| row.iter().enumerate().all(|(i, &j)| i as u32 == j))
    }

    pub fn is_injective(&self) -> bool {
        self.map.iter().all(|row| {
            let mut seen = row.clone();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        })
    }

    pub fn describe(&self) -> String {
        let mut out = String::new();
        for c in self.dom.stored_cells() {
            out.push_str(&format!(
                "{} ↦ {}\n",
                self.dom.name(c),
                self.cod.name(self.apply(c))
            ));
        }
        out
    }
}

/// Checks that a functor commutes with boundaries, units and every stored
/// composition of its domain.
pub fn validate_functor(f: &Functor) -> CheckReport {
    let mut rep = CheckReport::new("validate_functor");
    let (d, c) = (&*f.dom, &*f.cod);
    for k in 0..=d.cap() {
        for x in d.cells(k) {
            let fx = f.apply(x);
            if k > 0 {
                if c.src(fx) != f.apply(d.src(x)) {
                    rep.violation(
                        "source",
                        vec![d.name(x)],
                        format!("source of image is {}, image of source is {}", c.name(c.src(fx)), c.name(f.apply(d.src(x)))),
                    );
                }
                if c.tgt(fx) != f.apply(d.tgt(x)) {
                    rep.violation(
                        "target",
                        vec![d.name(x)],
                        format!("target of image is {}, image of target is {}", c.name(c.tgt(fx)), c.name(f.apply(d.tgt(x)))),
                    );
                }
            }
            if k < d.cap() && f.apply(d.unit(x)) != c.unit(fx) {
                rep.violation("unit", vec![d.name(x)], "unit is not preserved");
            }
        }
        for p in 0..k {
            for (&(a, b), &r) in d.comp_table(k, p) {
                let (a, b, r) = (Cell::new(k, a), Cell::new(k, b), Cell::new(k, r));
                if c.comp(p, f.apply(a), f.apply(b)) != Some(f.apply(r)) {
                    rep.violation(
                        "composition",
                        vec![d.name(a), d.name(b)],
                        format!("composite along {p} is not preserved"),
                    );
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn identity_and_terminal_map() {
        let iso = Arc::new(fixtures::interval_iso());
        let term = Arc::new(fixtures::terminal());
        assert!(validate_functor(&Functor::identity(iso.clone())).holds());
        let star = term.cell(0, "*").unwrap();
        let bang = Functor::constant(iso.clone(), term.clone(), star);
        assert!(validate_functor(&bang).holds());
        let u = iso.cell(1, "u").unwrap();
        assert_eq!(bang.apply(u), term.unit(star));
    }

    #[test]
    fn broken_boundary_is_reported() {
        let iso = Arc::new(fixtures::interval_iso());
        let a = iso.cell(0, "a").unwrap();
        let u = iso.cell(1, "u").unwrap();
        let f = Functor::from_fn(iso.clone(), iso.clone(), |c| {
            if c.dim == 0 {
                c
            } else if c == u {
                iso.unit(a)
            } else {
                c
            }
        })
        .unwrap();
        let r = validate_functor(&f);
        assert!(r.fails());
        assert!(r.violations.iter().any(|v| v.law == "target"));
    }

    #[test]
    fn composition_of_functors() {
        let iso = Arc::new(fixtures::interval_iso());
        let id = Functor::identity(iso.clone());
        let twice = id.then(&id).unwrap();
        assert!(twice.is_identity());
    }
}
