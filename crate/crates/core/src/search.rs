use std::ops::ControlFlow;
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::category::{Cell, FiniteOmegaCat};
use crate::error::{OmcError, Result};
use crate::functor::Functor;

pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;

pub type CellFilter<'a> = &'a (dyn Fn(Cell, Cell) -> bool + Sync);

/// A backtracking search for ω-functors `dom → cod`, optionally with some
/// images fixed in advance, a per-cell admissibility filter and an
/// injectivity requirement. Units and composites are propagated before
/// branching.
pub struct FunctorSearch<'a> {
    pub dom: Arc<FiniteOmegaCat>,
    pub cod: Arc<FiniteOmegaCat>,
    pub fixed: FxHashMap<Cell, Cell>,
    pub filter: Option<CellFilter<'a>>,
    pub injective: bool,
    pub node_budget: u64,
}

struct CompCheck {
    p: usize,
    a: usize,
    b: usize,
    r: usize,
}

struct Plan {
    cells: Vec<Cell>,
    pos: FxHashMap<Cell, usize>,
    checks: Vec<Vec<CompCheck>>,
    forced_by: Vec<Option<(usize, usize, usize)>>,
}

impl<'a> FunctorSearch<'a> {
    pub fn new(dom: Arc<FiniteOmegaCat>, cod: Arc<FiniteOmegaCat>) -> Self {
        FunctorSearch {
            dom,
            cod,
            fixed: FxHashMap::default(),
            filter: None,
            injective: false,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn fix(mut self, c: Cell, img: Cell) -> Self {
        self.fixed.insert(c, img);
        self
    }

    pub fn with_filter(mut self, f: CellFilter<'a>) -> Self {
        self.filter = Some(f);
        self
    }

    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    pub fn budget(mut self, nodes: u64) -> Self {
        self.node_budget = nodes;
        self
    }

    fn plan(&self) -> Plan {
        let d = &self.dom;
        let cells: Vec<Cell> = d.stored_cells().collect();
        let pos: FxHashMap<Cell, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut checks: Vec<Vec<CompCheck>> = (0..cells.len()).map(|_| Vec::new()).collect();
        let mut forced_by = vec![None; cells.len()];
        for k in 1..=d.cap() {
            for p in 0..k {
                for (&(a, b), &r) in d.comp_table(k, p) {
                    let (a, b, r) = (
                        pos[&Cell::new(k, a)],
                        pos[&Cell::new(k, b)],
                        pos[&Cell::new(k, r)],
                    );
                    let last = a.max(b).max(r);
                    checks[last].push(CompCheck { p, a, b, r });
                    if r > a.max(b) && forced_by[r].is_none() {
                        forced_by[r] = Some((p, a, b));
                    }
                }
            }
        }
        Plan {
            cells,
            pos,
            checks,
            forced_by,
        }
    }

    /// Visits every functor matching the constraints until the visitor breaks.
    /// Returns the number of functors visited.
    pub fn for_each(&self, mut visit: impl FnMut(&Functor) -> ControlFlow<()>) -> Result<usize> {
        let plan = self.plan();
        let mut st = State {
            img: vec![Cell::new(0, 0); plan.cells.len()],
            used: vec![FxHashSet::default(); self.dom.cap() + 1],
            nodes: 0,
            found: 0,
            stop: false,
        };
        self.descend(&plan, 0, &mut st, &mut visit)?;
        Ok(st.found)
    }

    pub fn first(&self) -> Result<Option<Functor>> {
        let mut out = None;
        self.for_each(|f| {
            out = Some(f.clone());
            ControlFlow::Break(())
        })?;
        Ok(out)
    }

    pub fn all(&self, limit: usize) -> Result<Vec<Functor>> {
        let mut out = Vec::new();
        self.for_each(|f| {
            out.push(f.clone());
            if out.len() >= limit {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        Ok(out)
    }

    fn candidates(&self, plan: &Plan, i: usize, st: &State) -> Vec<Cell> {
        let (d, c) = (&*self.dom, &*self.cod);
        let x = plan.cells[i];
        let img = |y: Cell| st.img[plan.pos[&y]];
        if let Some(&f) = self.fixed.get(&x) {
            return vec![f];
        }
        if let Some(base) = d.unit_of(x) {
            return vec![c.unit(img(base))];
        }
        if let Some((p, a, b)) = plan.forced_by[i] {
            return match c.comp(p, st.img[a], st.img[b]) {
                Some(r) => vec![r],
                None => Vec::new(),
            };
        }
        if x.dim == 0 {
            c.cells(0).collect()
        } else {
            c.hom(img(d.src(x)), img(d.tgt(x))).collect()
        }
    }

    fn descend(
        &self,
        plan: &Plan,
        i: usize,
        st: &mut State,
        visit: &mut impl FnMut(&Functor) -> ControlFlow<()>,
    ) -> Result<()> {
        if st.stop {
            return Ok(());
        }
        if i == plan.cells.len() {
            let f = self.assemble(plan, st)?;
            st.found += 1;
            if visit(&f).is_break() {
                st.stop = true;
            }
            return Ok(());
        }
        let x = plan.cells[i];
        for cand in self.candidates(plan, i, st) {
            st.nodes += 1;
            if st.nodes > self.node_budget {
                return Err(OmcError::Budget(format!(
                    "functor search exceeded {} nodes",
                    self.node_budget
                )));
            }
            if !self.admissible(plan, i, x, cand, st) {
                continue;
            }
            st.img[i] = cand;
            if self.injective {
                st.used[x.dim].insert(cand);
            }
            self.descend(plan, i + 1, st, visit)?;
            if self.injective {
                st.used[x.dim].remove(&cand);
            }
            if st.stop {
                return Ok(());
            }
        }
        Ok(())
    }

    fn admissible(&self, plan: &Plan, i: usize, x: Cell, cand: Cell, st: &State) -> bool {
        let (d, c) = (&*self.dom, &*self.cod);
        if cand.dim != x.dim || cand.idx as usize >= c.count(x.dim) {
            return false;
        }
        let img = |y: Cell| st.img[plan.pos[&y]];
        if x.dim > 0 && (c.src(cand) != img(d.src(x)) || c.tgt(cand) != img(d.tgt(x))) {
            return false;
        }
        if let Some(base) = d.unit_of(x) {
            if c.unit(img(base)) != cand {
                return false;
            }
        }
        if self.injective && st.used[x.dim].contains(&cand) {
            return false;
        }
        if let Some(f) = self.filter {
            if !f(x, cand) {
                return false;
            }
        }
        let get = |j: usize| if j == i { cand } else { st.img[j] };
        plan.checks[i]
            .iter()
            .all(|ch| c.comp(ch.p, get(ch.a), get(ch.b)) == Some(get(ch.r)))
    }

    fn assemble(&self, plan: &Plan, st: &State) -> Result<Functor> {
        let mut map: Vec<Vec<u32>> = (0..=self.dom.cap()).map(|k| vec![0; self.dom.count(k)]).collect();
        for (i, x) in plan.cells.iter().enumerate() {
            map[x.dim][x.idx as usize] = st.img[i].idx;
        }
        Functor::from_map(self.dom.clone(), self.cod.clone(), map)
    }
}

struct State {
    img: Vec<Cell>,
    used: Vec<FxHashSet<Cell>>,
    nodes: u64,
    found: usize,
    stop: bool,
}

/// All functors `dom → cod`, up to `limit`.
pub fn enumerate_functors(
    dom: Arc<FiniteOmegaCat>,
    cod: Arc<FiniteOmegaCat>,
    limit: usize,
) -> Result<Vec<Functor>> {
    FunctorSearch::new(dom, cod).all(limit)
}

/// An isomorphism `a → b`, if one exists.
pub fn find_isomorphism(a: Arc<FiniteOmegaCat>, b: Arc<FiniteOmegaCat>) -> Result<Option<Functor>> {
    for k in 0..=a.cap().max(b.cap()) {
        if a.count(k) != b.count(k) {
            return Ok(None);
        }
    }
    FunctorSearch::new(a, b).injective().first()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::functor::validate_functor;

    #[test]
    fn functors_from_arrow() {
        let arrow = Arc::new(fixtures::walking_arrow());
        let iso = Arc::new(fixtures::interval_iso());
        // objects a, b in the interval plus a choice of 1-cell between them:
        // a→a: 1 ; a→b: u ; b→a: ubar ; b→b: 1.
        let fs = enumerate_functors(arrow.clone(), iso.clone(), 100).unwrap();
        assert_eq!(fs.len(), 4);
        for f in &fs {
            assert!(validate_functor(f).holds());
        }
        let back = enumerate_functors(iso, arrow, 100).unwrap();
        // u and ubar must go to inverse cells, so both objects land on one.
        assert_eq!(back.len(), 2);
    }

    #[test]
    fn isomorphism_search() {
        let a = Arc::new(fixtures::interval_iso());
        assert!(find_isomorphism(a.clone(), a.clone()).unwrap().is_some());
        let b = Arc::new(fixtures::walking_arrow());
        assert!(find_isomorphism(a, b).unwrap().is_none());
    }

    #[test]
    fn budget_is_reported() {
        let a = Arc::new(fixtures::discrete(6));
        let r = FunctorSearch::new(a.clone(), a).budget(10).all(usize::MAX);
        assert!(matches!(r, Err(OmcError::Budget(_))));
    }
}
