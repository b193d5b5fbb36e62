use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::category::{Cell, FiniteOmegaCat};
use crate::cylinder::{self, Cylinder, CylinderEnumerator};
use crate::equivalence::{
    is_trivial_fibration, is_weak_equivalence, left_divide, map_witness, right_divide, verify_witness, EqvTable,
    EqvWitness,
};
use crate::error::{OmcError, Result};
use crate::functor::{validate_functor, Functor};
use crate::gamma::{gamma, GammaCat, DEFAULT_CYLINDER_BUDGET};
use crate::polygraph::{boundary_globe, globe, pair_functor, sng};
use crate::product::{pullback, Pullback};
use crate::report::CheckReport;

/// `Glu f`, the pullback of `Top_Y` along `f`, with `ρf : X → Glu f` and
/// `λf : Glu f → Y`. Its n-cells are pairs `(x, U)` with `U : f x ⇝ y`.
#[derive(Debug, Clone)]
pub struct GluCat {
    pub f: Functor,
    pub gamma: Arc<GammaCat>,
    pub pb: Pullback,
    pub rho: Functor,
    pub lambda: Functor,
}

impl GluCat {
    pub fn cat(&self) -> &Arc<FiniteOmegaCat> {
        &self.pb.cat
    }

    /// `f*Top_Y : Glu f → X`.
    pub fn proj(&self) -> &Functor {
        &self.pb.pr1
    }

    /// `f' : Glu f → ΓY`.
    pub fn cyl(&self) -> &Functor {
        &self.pb.pr2
    }

    pub fn pair(&self, c: Cell) -> (Cell, Cylinder) {
        let (x, u) = self.pb.components(c);
        (x, self.gamma.cylinder(u))
    }
}

pub fn glue(f: &Functor) -> Result<GluCat> {
    let g = Arc::new(gamma(f.cod.clone())?);
    glue_with(f, g)
}

pub fn glue_with(f: &Functor, g: Arc<GammaCat>) -> Result<GluCat> {
    if *g.base != *f.cod {
        return Err(OmcError::Invalid("Γ of the wrong category".into()));
    }
    let pb = pullback(f, &g.top)?;
    let ft = f.then(&g.triv)?;
    let rho = pb.induced(&Functor::identity(f.dom.clone()), &ft)?;
    let lambda = pb.pr2.then(&g.bot)?;
    Ok(GluCat {
        f: f.clone(),
        gamma: g,
        pb,
        rho,
        lambda,
    })
}

/// `λf ∘ ρf = f`, both legs are functors, `ρf` is a weak equivalence and the
/// projection `f*Top_Y` is a trivial fibration.
pub fn glue_report(g: &GluCat) -> CheckReport {
    let mut rep = CheckReport::new("gluing");
    for (name, h) in [("rho", &g.rho), ("lambda", &g.lambda), ("proj", g.proj())] {
        let r = validate_functor(h);
        if !r.holds() {
            rep.violation("functor", vec![name.into()], r.summary());
        }
    }
    match g.rho.then(&g.lambda) {
        Ok(h) if h.same_map(&g.f) => {}
        _ => rep.violation("factorization", vec![], "λf ∘ ρf differs from f"),
    }
    if !is_weak_equivalence(&g.rho).holds() {
        rep.violation("rho-weq", vec![], "ρf is not a weak equivalence");
    }
    if !is_trivial_fibration(g.proj()).holds() {
        rep.violation("proj-tfib", vec![], "f*Top_Y is not a trivial fibration");
    }
    rep
}

/// `Top_X`, `Bot_X` are trivial fibrations and `Triv_X` is a weak
/// equivalence.
pub fn check_top_bot_fibrations(g: &GammaCat) -> CheckReport {
    let mut rep = CheckReport::new("top_bot_fibrations");
    for (name, r) in [
        ("top", is_trivial_fibration(&g.top)),
        ("bot", is_trivial_fibration(&g.bot)),
        ("triv", is_weak_equivalence(&g.triv)),
    ] {
        if !r.holds() {
            rep.violation(name, vec![], r.summary());
        }
    }
    rep
}

/// Both sides of: `f` is a weak equivalence iff `λf` is a trivial
/// fibration.
pub fn charweq(f: &Functor) -> Result<CheckReport> {
    let g = glue(f)?;
    Ok(charweq_with(f, &g))
}

pub fn charweq_with(f: &Functor, g: &GluCat) -> CheckReport {
    let mut rep = CheckReport::new("charweq");
    let weq = is_weak_equivalence(f).holds();
    let tfib = is_trivial_fibration(&g.lambda).holds();
    rep.count("weq", weq as u64);
    rep.count("lambda_tfib", tfib as u64);
    if weq != tfib {
        rep.violation(
            "agreement",
            vec![],
            format!("is_weak_equivalence = {weq}, is_trivial_fibration(λf) = {tfib}"),
        );
    }
    rep
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Given `z` between the tops, find `z'` between the bottoms.
    TopDown,
    /// Given `z'` between the bottoms, find `z` between the tops.
    BottomUp,
}

fn parallel_cylinders(c: &FiniteOmegaCat, u: &Cylinder, v: &Cylinder) -> Result<bool> {
    if u.depth != v.depth || u.dim() != v.dim() {
        return Ok(false);
    }
    if u.dim() == 0 {
        return Ok(true);
    }
    Ok(cylinder::source(c, u)? == cylinder::source(c, v)? && cylinder::target(c, u)? == cylinder::target(c, v)?)
}

/// A cylinder `W : U → V` with the given top and bottom, built by the
/// inductive construction: weak inverses at the bottom layer, division by
/// the outer reversible cells above. Missing ends are computed.
pub fn fill(e: &EqvTable, u: &Cylinder, v: &Cylinder, top: Option<Cell>, bottom: Option<Cell>) -> Result<Cylinder> {
    let c = &**e.cat();
    let d = u.depth;
    let internal = |m: &str| OmcError::Internal(format!("transport: {m}"));
    if u.dim() == 0 {
        let (pu, pv) = (u.principal, v.principal);
        let (top, bottom) = match (top, bottom) {
            (Some(z), Some(z2)) => (z, z2),
            (Some(z), None) => {
                let ub = e.weak_inverse(pu).ok_or_else(|| internal("principal not reversible"))?;
                let z2 = c
                    .comp(d, ub, z)
                    .and_then(|x| c.comp(d, x, pv))
                    .ok_or_else(|| internal("ū ∘ z ∘ v undefined"))?;
                (z, z2)
            }
            (None, Some(z2)) => {
                let vb = e.weak_inverse(pv).ok_or_else(|| internal("principal not reversible"))?;
                let z = c
                    .comp(d, pu, z2)
                    .and_then(|x| c.comp(d, x, vb))
                    .ok_or_else(|| internal("u ∘ z' ∘ v̄ undefined"))?;
                (z, z2)
            }
            (None, None) => return Err(OmcError::Invalid("transport needs one end".into())),
        };
        let a = c.comp(d, top, pv).ok_or_else(|| internal("z ∘ v undefined"))?;
        let b = c.comp(d, pu, bottom).ok_or_else(|| internal("u ∘ z' undefined"))?;
        let w = e
            .reversible_between(a, b)
            .ok_or_else(|| internal("no reversible cell z ∘ v ⇝ u ∘ z'"))?;
        return Ok(Cylinder {
            depth: d,
            top,
            bottom,
            layers: vec![(pu, pv)],
            principal: w,
        });
    }
    let (f, g) = u.layers[0];
    if v.layers[0] != (f, g) {
        return Err(OmcError::Invalid("cylinders are not parallel".into()));
    }
    let (su, sv) = (u.shift(c)?, v.shift(c)?);
    let (top, bottom) = match (top, bottom) {
        (Some(z), Some(z2)) => (z, z2),
        (Some(z), None) => {
            let st = c.comp(d, z, g).ok_or_else(|| internal("z ∘ G undefined"))?;
            let w0 = fill(e, &su, &sv, Some(st), None)?;
            (z, left_divide(e, f, w0.bottom, Some((u.bottom, v.bottom)))?)
        }
        (None, Some(z2)) => {
            let sb = c.comp(d, f, z2).ok_or_else(|| internal("F ∘ z' undefined"))?;
            let w0 = fill(e, &su, &sv, None, Some(sb))?;
            (right_divide(e, g, w0.top, Some((u.top, v.top)))?, z2)
        }
        (None, None) => return Err(OmcError::Invalid("transport needs one end".into())),
    };
    let st = c.comp(d, top, g).ok_or_else(|| internal("z ∘ G undefined"))?;
    let sb = c.comp(d, f, bottom).ok_or_else(|| internal("F ∘ z' undefined"))?;
    let sw = fill(e, &su, &sv, Some(st), Some(sb))?;
    Cylinder::assemble(c, top, bottom, f, g, sw)
}

/// Transport along parallel n-cylinders `U : x ⇝ x'`, `V : y ⇝ y'`: the
/// other end of a cell `x → y` (top-down) or `x' → y'` (bottom-up),
/// together with the filling cylinder `U → V`.
pub fn transport(e: &EqvTable, u: &Cylinder, v: &Cylinder, z: Cell, dir: Direction) -> Result<(Cell, Cylinder)> {
    let c = &**e.cat();
    if !parallel_cylinders(c, u, v)? {
        return Err(OmcError::Invalid("cylinders are not parallel".into()));
    }
    let (s, t) = match dir {
        Direction::TopDown => (u.top, v.top),
        Direction::BottomUp => (u.bottom, v.bottom),
    };
    if z.dim != s.dim + 1 || c.src(z) != s || c.tgt(z) != t {
        return Err(OmcError::Invalid(format!("{} does not run between the cylinder ends", c.name(z))));
    }
    let w = match dir {
        Direction::TopDown => fill(e, u, v, Some(z), None)?,
        Direction::BottomUp => fill(e, u, v, None, Some(z))?,
    };
    check_filler(e, u, v, &w)?;
    let other = match dir {
        Direction::TopDown => w.bottom,
        Direction::BottomUp => w.top,
    };
    Ok((other, w))
}

/// The converse construction: a cylinder `U → V` between given ends.
pub fn transport_between(e: &EqvTable, u: &Cylinder, v: &Cylinder, top: Cell, bottom: Cell) -> Result<Cylinder> {
    let w = fill(e, u, v, Some(top), Some(bottom))?;
    check_filler(e, u, v, &w)?;
    Ok(w)
}

fn check_filler(e: &EqvTable, u: &Cylinder, v: &Cylinder, w: &Cylinder) -> Result<()> {
    let c = &**e.cat();
    if !cylinder::is_valid(e, w) || cylinder::source(c, w)? != *u || cylinder::target(c, w)? != *v {
        return Err(OmcError::Internal(format!("filler {} is not a cylinder U → V", w.describe(c))));
    }
    Ok(())
}

/// Every other end admitting some cylinder `U → V`, by exhaustive search.
pub fn transport_oracle(en: &CylinderEnumerator, u: &Cylinder, v: &Cylinder, z: Cell, dir: Direction) -> Result<Vec<Cell>> {
    let c = &**en.eqv().cat();
    let (s, t) = match dir {
        Direction::TopDown => (u.bottom, v.bottom),
        Direction::BottomUp => (u.top, v.top),
    };
    let mut out = Vec::new();
    for z2 in c.hom(s, t) {
        let (top, bottom) = match dir {
            Direction::TopDown => (z, z2),
            Direction::BottomUp => (z2, z),
        };
        for w in en.between(u.depth, top, bottom)? {
            if cylinder::source(c, &w)? == *u && cylinder::target(c, &w)? == *v {
                out.push(z2);
                break;
            }
        }
    }
    Ok(out)
}

/// Transport against the oracle on every parallel pair of cylinders and
/// every cell between their ends: the constructive answer is a solution,
/// every solution is ≋ to it, and every cell ≋ to it is a solution.
pub fn transport_suite(e: &EqvTable, budget: usize) -> Result<CheckReport> {
    let c = &**e.cat();
    let en = CylinderEnumerator::new(e, budget);
    let mut rep = CheckReport::new("transport");
    let mut n_inst = 0u64;
    for n in 0..c.cap() {
        let cyls = en.all_at(0, n)?;
        let mut groups: FxHashMap<Option<(Cylinder, Cylinder)>, Vec<&Cylinder>> = FxHashMap::default();
        for u in &cyls {
            let key = if n == 0 {
                None
            } else {
                Some((cylinder::source(c, u)?, cylinder::target(c, u)?))
            };
            groups.entry(key).or_default().push(u);
        }
        let mut keys: Vec<_> = groups.keys().cloned().collect();
        keys.sort();
        for k in keys {
            let g = &groups[&k];
            for &u in g {
                for &v in g {
                    for dir in [Direction::TopDown, Direction::BottomUp] {
                        let (s, t) = match dir {
                            Direction::TopDown => (u.top, v.top),
                            Direction::BottomUp => (u.bottom, v.bottom),
                        };
                        for z in c.hom(s, t) {
                            n_inst += 1;
                            check_transport(e, &en, &mut rep, u, v, z, dir)?;
                        }
                    }
                }
            }
        }
    }
    rep.count("transport_instances", n_inst);
    Ok(rep)
}

fn check_transport(
    e: &EqvTable,
    en: &CylinderEnumerator,
    rep: &mut CheckReport,
    u: &Cylinder,
    v: &Cylinder,
    z: Cell,
    dir: Direction,
) -> Result<()> {
    let c = &**e.cat();
    let names = vec![format!("{dir:?}"), u.describe(c), v.describe(c), c.name(z)];
    let z2 = match transport(e, u, v, z, dir) {
        Ok((z2, _)) => z2,
        Err(err @ OmcError::Budget(_)) => return Err(err),
        Err(err) => {
            rep.violation("existence", names, err.to_string());
            return Ok(());
        }
    };
    let sols = transport_oracle(en, u, v, z, dir)?;
    if !sols.contains(&z2) {
        rep.violation("oracle-contains", names.clone(), format!("{} not found by search", c.name(z2)));
    }
    if let Some(&bad) = sols.iter().find(|&&s| !e.equiv(s, z2)) {
        rep.violation("weak-uniqueness", names.clone(), format!("{} is a solution not ≋ {}", c.name(bad), c.name(z2)));
    }
    let (s, t) = (c.src(z2), c.tgt(z2));
    for z3 in c.hom(s, t).filter(|&z3| e.equiv(z3, z2)) {
        let (top, bottom) = match dir {
            Direction::TopDown => (z, z3),
            Direction::BottomUp => (z3, z),
        };
        if let Err(err) = transport_between(e, u, v, top, bottom) {
            rep.violation("converse", names.clone(), err.to_string());
        }
    }
    Ok(())
}

/// The data of the factorization of `⟨x, x'⟩ : ∂O(n+1) → C` through
/// `Glu(sng x)` for `x ≋ x'`.
#[derive(Debug, Clone)]
pub struct EquivFactor {
    pub glu: GluCat,
    pub k: Functor,
    pub p: Functor,
    pub q: Functor,
    pub collapse: Functor,
    pub pair: Functor,
}

/// `k : ∂O(n+1) → Glu(sng x)` with `p = (sng x)*Top` a trivial fibration,
/// `k ; p` the collapsing map and `k ; q = ⟨x, x'⟩`.
pub fn equiv_factor_witness(c: Arc<FiniteOmegaCat>, x: Cell, x2: Cell, w: &EqvWitness) -> Result<EquivFactor> {
    if !verify_witness(&c, x, x2, w) {
        return Err(OmcError::Invalid("witness does not verify".into()));
    }
    let n = x.dim;
    let e = EqvTable::new(c.clone());
    let s = sng(c.clone(), x)?;
    let glu = glue(&s)?;
    let u = if x == x2 && w.forward() == c.unit(x) {
        cylinder::triv(&c, 0, x)?
    } else {
        cylinder::degenerate_of(&e, 0, w.forward())?
    };
    let tx = cylinder::triv(&c, 0, x)?;
    let b = Arc::new(boundary_globe(n + 1));
    let o = Arc::new(globe(n));
    let top = o.find(n, &format!("c{n}")).expect("top cell");
    let gcat = glu.cat().clone();
    let mut missing = None;
    let k = Functor::from_fn(b.clone(), gcat.clone(), |y| {
        let base = b.base_of(y);
        let id = b.id(base);
        let m: usize = id[1..].parse().expect("globe ids carry their dimension");
        let (oc, cyl) = if m == n {
            (top, if id.starts_with('s') { tx.clone() } else { u.clone() })
        } else {
            let oc = o.find(m, id).expect("lower globe cell");
            let img = s.apply(oc);
            (oc, cylinder::triv(&c, 0, img).expect("depth 0"))
        };
        let gc = glu.gamma.cell_of(&cyl);
        match gc.and_then(|g| glu.pb.lookup(o.unit_to(oc, y.dim), glu.gamma.cat.unit_to(g, y.dim))) {
            Some(r) => r,
            None => {
                missing.get_or_insert(y);
                Cell::new(y.dim, 0)
            }
        }
    })?;
    if let Some(y) = missing {
        return Err(OmcError::Internal(format!("no Glu cell for {}", b.name(y))));
    }
    let collapse = Functor::from_fn(b.clone(), o.clone(), |y| {
        let base = b.base_of(y);
        let id = b.id(base);
        let m: usize = id[1..].parse().expect("globe ids carry their dimension");
        let oc = if m == n { top } else { o.find(m, id).expect("lower globe cell") };
        o.unit_to(oc, y.dim)
    })?;
    let pair = pair_functor(c, x, x2)?;
    Ok(EquivFactor {
        p: glu.proj().clone(),
        q: glu.lambda.clone(),
        glu,
        k,
        collapse,
        pair,
    })
}

/// The square's equations, `p` a trivial fibration, and the way back:
/// weak injectivity of `p` gives `k s ≋ k t` and `q` carries the
/// certificate to `x ≋ x'`.
pub fn equiv_factor_report(f: &EquivFactor) -> CheckReport {
    let mut rep = CheckReport::new("equiv_factor");
    for (name, h) in [("k", &f.k), ("p", &f.p), ("q", &f.q)] {
        let r = validate_functor(h);
        if !r.holds() {
            rep.violation("functor", vec![name.into()], r.summary());
        }
    }
    if !is_trivial_fibration(&f.p).holds() {
        rep.violation("p-tfib", vec![], "p is not a trivial fibration");
    }
    match f.k.then(&f.p) {
        Ok(h) if h.same_map(&f.collapse) => {}
        _ => rep.violation("k;p", vec![], "k ; p is not the collapsing map"),
    }
    match f.k.then(&f.q) {
        Ok(h) if h.same_map(&f.pair) => {}
        _ => rep.violation("k;q", vec![], "k ; q is not ⟨x, x'⟩"),
    }
    let b = &f.k.dom;
    let n = b.cap();
    let (s, t) = (b.find(n, &format!("s{n}")), b.find(n, &format!("t{n}")));
    if let (Some(s), Some(t)) = (s, t) {
        let eg = EqvTable::new(f.k.cod.clone());
        let (ks, kt) = (f.k.apply(s), f.k.apply(t));
        match eg.witness(ks, kt) {
            None => rep.violation("back", vec![], "k s and k t are not ω-equivalent in Glu"),
            Some(w) => {
                let qw = map_witness(&f.q, &w);
                if !verify_witness(&f.q.cod, f.q.apply(ks), f.q.apply(kt), &qw) {
                    rep.violation("back", vec![], "image certificate does not verify");
                }
            }
        }
    }
    rep
}

pub fn default_budget() -> usize {
    DEFAULT_CYLINDER_BUDGET
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn glue_identity_and_terminal_map() {
        let c = Arc::new(fixtures::interval_iso());
        let id = Functor::identity(c.clone());
        let g = glue(&id).unwrap();
        assert!(glue_report(&g).holds());
        assert_eq!(g.cat().count(0), g.gamma.cat.count(0));
        let t = Arc::new(fixtures::terminal());
        let bang = Functor::constant(c.clone(), t, Cell::new(0, 0));
        let g = glue(&bang).unwrap();
        assert!(glue_report(&g).holds());
        assert_eq!(g.cat().count(0), 2);
    }

    #[test]
    fn charweq_fixtures() {
        let c = Arc::new(fixtures::discrete(2));
        let t = Arc::new(fixtures::terminal());
        let bang = Functor::constant(c, t.clone(), Cell::new(0, 0));
        let r = charweq(&bang).unwrap();
        assert!(r.holds());
        assert_eq!(r.stats["weq"], 0);
        let r = charweq(&Functor::identity(t)).unwrap();
        assert_eq!(r.stats["weq"], 1);
    }

    #[test]
    fn transport_in_interval() {
        let c = Arc::new(fixtures::interval_iso());
        let e = EqvTable::new(c.clone());
        let u = c.cell(1, "u").unwrap();
        let a = c.cell(0, "a").unwrap();
        let b = c.cell(0, "b").unwrap();
        let cu = cylinder::degenerate_of(&e, 0, u).unwrap();
        let (z2, _) = transport(&e, &cu, &cu, c.unit(a), Direction::TopDown).unwrap();
        assert!(e.equiv(z2, c.unit(b)));
        let ta = cylinder::triv(&c, 0, a).unwrap();
        let (z2, w) = transport(&e, &ta, &ta, c.unit(a), Direction::TopDown).unwrap();
        assert_eq!(z2, c.unit(a));
        assert_eq!(w, cylinder::triv(&c, 0, c.unit(a)).unwrap());
        let r = transport_suite(&e, 50_000).unwrap();
        assert!(r.holds(), "{}", r.summary());
        assert!(r.stats["transport_instances"] > 0);
    }

    #[test]
    fn top_bot_fibrations() {
        for c in [fixtures::terminal(), fixtures::interval_iso(), fixtures::walking_arrow()] {
            let g = gamma(Arc::new(c)).unwrap();
            assert!(check_top_bot_fibrations(&g).holds());
        }
    }

    #[test]
    fn equiv_factor_in_interval() {
        let c = Arc::new(fixtures::interval_iso());
        let e = EqvTable::new(c.clone());
        let (a, b) = (c.cell(0, "a").unwrap(), c.cell(0, "b").unwrap());
        for (x, y) in [(a, b), (a, a)] {
            let w = e.witness(x, y).unwrap();
            let f = equiv_factor_witness(c.clone(), x, y, &w).unwrap();
            let r = equiv_factor_report(&f);
            assert!(r.holds(), "{}", r.summary());
        }
    }
}
