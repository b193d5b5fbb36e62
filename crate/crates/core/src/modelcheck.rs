use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::category::{Cell, FiniteOmegaCat};
use crate::equivalence::{is_trivial_fibration, is_weak_equivalence, parallel_pairs, EqvTable};
use crate::error::{OmcError, Result};
use crate::functor::{validate_functor, Functor};
use crate::gamma::{gamma, gamma_functor, GammaCat};
use crate::gluing::{glue_with, GluCat};
use crate::polygraph::{
    free_category, pair_functor, pushout_polygraph, sng, PolyMorphism, Polygraph, Word,
};
use crate::presentation::{present, presented_functor, Presented};
use crate::report::CheckReport;
use crate::search::{FunctorSearch, DEFAULT_NODE_BUDGET};

/// A commutative square `i ; bottom = top ; f` asking for `h` with
/// `i ; h = top` and `h ; f = bottom`.
#[derive(Debug, Clone)]
pub struct LiftingProblem {
    pub i: Functor,
    pub f: Functor,
    pub top: Functor,
    pub bottom: Functor,
}

/// Why an exhaustive search found nothing. `stuck` lists cells that have no
/// admissible image at all; when it is empty the candidates exist cell by
/// cell but never assemble into a functor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refusal {
    pub reason: String,
    pub stuck: Vec<String>,
}

#[derive(Debug, Clone)]
pub enum Lift {
    Found(Functor),
    Refused(Refusal),
}

impl Lift {
    pub fn found(&self) -> Option<&Functor> {
        match self {
            Lift::Found(h) => Some(h),
            Lift::Refused(_) => None,
        }
    }
}

impl LiftingProblem {
    pub fn new(i: Functor, f: Functor, top: Functor, bottom: Functor) -> Result<Self> {
        if *i.dom != *top.dom || *i.cod != *bottom.dom || *top.cod != *f.dom || *f.cod != *bottom.cod {
            return Err(OmcError::Invalid("lifting square has mismatched corners".into()));
        }
        if !i.then(&bottom)?.same_map(&top.then(&f)?) {
            return Err(OmcError::Invalid("lifting square does not commute".into()));
        }
        Ok(LiftingProblem { i, f, top, bottom })
    }
}

/// Exhaustive backtracking search for a lift.
pub fn find_lift(p: &LiftingProblem) -> Result<Lift> {
    find_lift_with_budget(p, DEFAULT_NODE_BUDGET)
}

pub fn find_lift_with_budget(p: &LiftingProblem, budget: u64) -> Result<Lift> {
    let (a, b, x) = (&*p.i.dom, &*p.i.cod, &*p.f.dom);
    let mut fixed: FxHashMap<Cell, Cell> = FxHashMap::default();
    for c in a.stored_cells() {
        let (ic, tc) = (p.i.apply(c), p.top.apply(c));
        if ic.dim > b.cap() {
            continue;
        }
        if let Some(&prev) = fixed.get(&ic) {
            if prev != tc {
                return Ok(Lift::Refused(Refusal {
                    reason: format!("i identifies cells that top keeps apart at {}", b.name(ic)),
                    stuck: vec![b.name(ic)],
                }));
            }
        }
        fixed.insert(ic, tc);
    }
    let (f, bottom) = (&p.f, &p.bottom);
    let filter = |y: Cell, z: Cell| f.apply(z) == bottom.apply(y);
    let mut s = FunctorSearch::new(p.i.cod.clone(), p.f.dom.clone())
        .with_filter(&filter)
        .budget(budget);
    for (&k, &v) in &fixed {
        s = s.fix(k, v);
    }
    if let Some(h) = s.first()? {
        return Ok(Lift::Found(h));
    }
    let mut stuck = Vec::new();
    for y in b.stored_cells().filter(|y| !fixed.contains_key(y)) {
        let want = bottom.apply(y);
        let bounded = y.dim > 0 && fixed.contains_key(&b.src(y)) && fixed.contains_key(&b.tgt(y));
        let any = if bounded {
            x.hom(fixed[&b.src(y)], fixed[&b.tgt(y)]).any(|z| f.apply(z) == want)
        } else {
            x.cells(y.dim).any(|z| f.apply(z) == want)
        };
        if !any {
            stuck.push(b.name(y));
        }
    }
    Ok(Lift::Refused(Refusal {
        reason: "no functor satisfies both triangles".into(),
        stuck,
    }))
}

/// `h` recomposes to both sides of the square.
pub fn lift_report(p: &LiftingProblem, h: &Functor) -> CheckReport {
    let mut rep = CheckReport::new("lift");
    let r = validate_functor(h);
    if !r.holds() {
        rep.violation("functor", vec![], r.summary());
    }
    if !p.i.then(h).is_ok_and(|x| x.same_map(&p.top)) {
        rep.violation("upper-triangle", vec![], "i ; h differs from top");
    }
    if !h.then(&p.f).is_ok_and(|x| x.same_map(&p.bottom)) {
        rep.violation("lower-triangle", vec![], "h ; f differs from bottom");
    }
    rep
}

/// Every square from `i_n : ∂O(n) → O(n)` into `f`.
pub fn globe_squares(f: &Functor, n: usize) -> Result<Vec<LiftingProblem>> {
    let (x, y) = (&f.dom, &f.cod);
    let i = crate::polygraph::globe_inclusion(n);
    let mut out = Vec::new();
    if n == 0 {
        let empty = i.dom.clone();
        let top = Functor::from_fn(empty, x.clone(), |c| c)?;
        for v in y.cells(0) {
            out.push(LiftingProblem::new(i.clone(), f.clone(), top.clone(), sng(y.clone(), v)?)?);
        }
        return Ok(out);
    }
    for (a, b) in parallel_pairs(x, n - 1) {
        let top = pair_functor(x.clone(), a, b)?;
        for v in y.hom(f.apply(a), f.apply(b)) {
            out.push(LiftingProblem::new(i.clone(), f.clone(), top.clone(), sng(y.clone(), v)?)?);
        }
    }
    Ok(out)
}

/// `f` has the right lifting property against every `i_n`, `n ≤ cap + 1`,
/// by raw lifting search, compared with the direct trivial-fibration test.
pub fn tfib_by_lifting(f: &Functor) -> Result<CheckReport> {
    let mut rep = CheckReport::new("tfib_by_lifting");
    let top = f.dom.cap().max(f.cod.cap()) + 1;
    let mut all = true;
    let mut squares = 0;
    for n in 0..=top {
        for p in globe_squares(f, n)? {
            squares += 1;
            match find_lift(&p)? {
                Lift::Found(h) => rep.merge(lift_report(&p, &h)),
                Lift::Refused(_) => all = false,
            }
        }
    }
    rep.count("squares", squares);
    let direct = is_trivial_fibration(f).holds();
    if direct != all {
        rep.violation(
            "agreement",
            vec![],
            format!("is_trivial_fibration = {direct}, every globe square lifts = {all}"),
        );
    }
    rep.count("tfib", direct as u64);
    Ok(rep)
}

/// `k : Y → Glu f` with `f ; k = ρf` and `k ; λf = id`, and the derived
/// retraction `g` and homotopy `h : Y → ΓY`.
#[derive(Debug, Clone)]
pub struct ImmersionCertificate {
    pub k: Functor,
    pub g: Functor,
    pub h: Functor,
}

#[derive(Debug, Clone)]
pub enum Immersion {
    Certified(Box<ImmersionCertificate>),
    Refused(Refusal),
}

impl Immersion {
    pub fn certificate(&self) -> Option<&ImmersionCertificate> {
        match self {
            Immersion::Certified(c) => Some(c),
            Immersion::Refused(_) => None,
        }
    }
}

pub fn is_immersion(f: &Functor) -> Result<Immersion> {
    let gy = Arc::new(gamma(f.cod.clone())?);
    let glu = glue_with(f, gy)?;
    is_immersion_with(f, &glu)
}

pub fn is_immersion_with(f: &Functor, glu: &GluCat) -> Result<Immersion> {
    let (x, y) = (&*f.dom, &*f.cod);
    let mut fixed: FxHashMap<Cell, Cell> = FxHashMap::default();
    for c in x.stored_cells() {
        let (fc, rc) = (f.apply(c), glu.rho.apply(c));
        if fc.dim > y.cap() {
            continue;
        }
        if fixed.insert(fc, rc).is_some_and(|prev| prev != rc) {
            return Ok(Immersion::Refused(Refusal {
                reason: "f identifies cells, so it has no retraction".into(),
                stuck: vec![y.name(fc)],
            }));
        }
    }
    let lambda = &glu.lambda;
    let filter = |a: Cell, b: Cell| lambda.apply(b) == a;
    let mut s = FunctorSearch::new(f.cod.clone(), glu.cat().clone()).with_filter(&filter);
    for (&k, &v) in &fixed {
        s = s.fix(k, v);
    }
    match s.first()? {
        Some(k) => {
            let g = k.then(glu.proj())?;
            let h = k.then(glu.cyl())?;
            Ok(Immersion::Certified(Box::new(ImmersionCertificate { k, g, h })))
        }
        None => {
            let reached: FxHashSet<Cell> = glu.cat().stored_cells().map(|c| lambda.apply(c)).collect();
            let stuck = y.stored_cells().filter(|c| !reached.contains(c)).map(|c| y.name(c)).collect();
            Ok(Immersion::Refused(Refusal {
                reason: "no k : Y → Glu f with f ; k = ρf and k ; λf = id".into(),
                stuck,
            }))
        }
    }
}

/// Z1–Z3 and Z3′ for a certificate, recomputed from `g` and `h` alone.
pub fn certificate_report(f: &Functor, c: &ImmersionCertificate, gy: &GammaCat, gx: &GammaCat) -> Result<CheckReport> {
    let mut rep = CheckReport::new("immersion_certificate");
    if !f.then(&c.g)?.is_identity() {
        rep.violation("Z1", vec![], "g is not a retraction of f");
    }
    if !c.h.then(&gy.top)?.same_map(&c.g.then(f)?) {
        rep.violation("Z2", vec![], "Top ∘ h differs from f ∘ g");
    }
    if !c.h.then(&gy.bot)?.is_identity() {
        rep.violation("Z2", vec![], "Bot ∘ h is not the identity");
    }
    let fh = f.then(&c.h)?;
    if !fh.same_map(&f.then(&gy.triv)?) {
        rep.violation("Z3", vec![], "h is not trivial on the image of f");
    }
    let gf = gamma_functor(f, gx, gy)?;
    if !fh.same_map(&gx.triv.then(&gf)?) {
        rep.violation("Z3'", vec![], "h ∘ f differs from Γf ∘ Triv");
    }
    for (name, h) in [("g", &c.g), ("h", &c.h)] {
        let r = validate_functor(h);
        if !r.holds() {
            rep.violation("functor", vec![name.into()], r.summary());
        }
    }
    Ok(rep)
}

/// A certified immersion is a weak equivalence; the principal of `h v` is a
/// reversible 1-cell `f g v → v` for every object `v`.
pub fn immersion_implies_weq(f: &Functor, c: &ImmersionCertificate, gy: &GammaCat) -> CheckReport {
    let mut rep = CheckReport::new("immersion_implies_weq");
    let w = is_weak_equivalence_with_eqv(f, &gy.eqv);
    if !w.holds() {
        rep.violation("weq", vec![], w.summary());
    }
    let y = &*f.cod;
    let mut extracted = 0;
    for v in y.objects() {
        let u = gy.cylinder(c.h.apply(v));
        let p = u.principal;
        let fgv = f.apply(c.g.apply(v));
        if y.src(p) != fgv || y.tgt(p) != v || !gy.eqv.is_reversible(p) {
            rep.violation("extraction", vec![y.name(v)], format!("principal {} is not a reversible f g v → v", y.name(p)));
        } else {
            extracted += 1;
        }
    }
    rep.count("extracted", extracted);
    rep
}

fn is_weak_equivalence_with_eqv(f: &Functor, e: &EqvTable) -> CheckReport {
    crate::equivalence::is_weak_equivalence_with(f, e)
}

/// Full immersion check: search, certificate laws, weak equivalence.
pub fn immersion_report(f: &Functor) -> Result<(Immersion, CheckReport)> {
    let gy = Arc::new(gamma(f.cod.clone())?);
    let gx = gamma(f.dom.clone())?;
    let glu = glue_with(f, gy.clone())?;
    let im = is_immersion_with(f, &glu)?;
    let mut rep = CheckReport::new("immersion");
    match &im {
        Immersion::Certified(c) => {
            rep.merge(certificate_report(f, c, &gy, &gx)?);
            rep.merge(immersion_implies_weq(f, c, &gy));
            rep.count("certified", 1);
        }
        Immersion::Refused(_) => rep.count("certified", 0),
    }
    Ok((im, rep))
}

/// Extends an assignment on generators to a functor, if one exists.
pub fn extend_generators(
    dom: Arc<FiniteOmegaCat>,
    cod: Arc<FiniteOmegaCat>,
    gens: &[(Cell, Cell)],
) -> Result<Option<Functor>> {
    let mut fixed: FxHashMap<Cell, Cell> = FxHashMap::default();
    for &(a, b) in gens {
        if fixed.insert(a, b).is_some_and(|p| p != b) {
            return Ok(None);
        }
    }
    let mut s = FunctorSearch::new(dom, cod);
    for (k, v) in fixed {
        s = s.fix(k, v);
    }
    s.first()
}

fn presented_generators(p: &Presented) -> Vec<Cell> {
    let mut out: Vec<Cell> = (0..p.poly.objects.len() as u32).map(|i| Cell::new(0, i)).collect();
    out.extend((0..p.poly.arrows.len() as u32).map(|i| p.generator(1, i)));
    out
}

/// Pushes the presented immersion `f : A → B` out along `i : A → C` and
/// checks that `f' : C → P` is certified, both by search and by the
/// certificate built from the universal property.
pub fn pushout_immersion(f: &PolyMorphism, i: &PolyMorphism) -> Result<CheckReport> {
    let mut rep = CheckReport::new("pushout_immersion");
    let (a, b, c) = (present(f.dom.clone())?, present(f.cod.clone())?, present(i.cod.clone())?);
    let ff = presented_functor(f, &a, &b)?;
    let cert = match is_immersion(&ff)? {
        Immersion::Certified(c) => c,
        Immersion::Refused(r) => {
            rep.inconclusive(format!("f is not a certified immersion: {}", r.reason));
            return Ok(rep);
        }
    };
    let po = pushout_polygraph(f, i)?;
    let p = match present(po.poly.clone()) {
        Ok(p) => p,
        Err(OmcError::Budget(e)) => {
            rep.inconclusive(format!("pushout not materializable: {e}"));
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    let left = presented_functor(&po.left, &b, &p)?;
    let fp = presented_functor(&po.right, &c, &p)?;
    let ii = presented_functor(i, &a, &c)?;
    rep.count("pushout_cells", p.cat.total_stored() as u64);

    let gp = Arc::new(gamma(p.cat.clone())?);
    let gc = gamma(c.cat.clone())?;
    let glu = glue_with(&fp, gp.clone())?;
    match is_immersion_with(&fp, &glu)? {
        Immersion::Certified(k) => {
            rep.count("certified_by_search", 1);
            rep.merge(certificate_report(&fp, &k, &gp, &gc)?);
            rep.merge(immersion_implies_weq(&fp, &k, &gp));
        }
        Immersion::Refused(r) => rep.violation("search", r.stuck, r.reason),
    }

    // g' and h' from the universal property: B-generators go through g and h,
    // C-generators through the identity and Triv.
    let gb = Arc::new(gamma(b.cat.clone())?);
    let gamma_left = gamma_functor(&left, &gb, &gp)?;
    let mut g_gens = Vec::new();
    let mut h_gens = Vec::new();
    let from_c: FxHashSet<Cell> = presented_generators(&c).into_iter().map(|x| fp.apply(x)).collect();
    for x in presented_generators(&c) {
        g_gens.push((fp.apply(x), x));
        h_gens.push((fp.apply(x), gp.triv.apply(fp.apply(x))));
    }
    for x in presented_generators(&b) {
        let px = left.apply(x);
        if from_c.contains(&px) {
            continue;
        }
        g_gens.push((px, ii.apply(cert.g.apply(x))));
        h_gens.push((px, gamma_left.apply(cert.h.apply(x))));
    }
    let g2 = extend_generators(p.cat.clone(), c.cat.clone(), &g_gens)?;
    let h2 = extend_generators(p.cat.clone(), gp.cat.clone(), &h_gens)?;
    match (g2, h2) {
        (Some(g), Some(h)) => {
            rep.count("certified_by_universality", 1);
            let k = glu.pb.induced(&g, &h)?;
            rep.merge(certificate_report(&fp, &ImmersionCertificate { k, g, h }, &gp, &gc)?);
        }
        _ => rep.violation("universality", vec![], "g' or h' does not extend from generators"),
    }
    Ok(rep)
}

/// `f : A → B` is a retract of `g : C → D` through `sa ; ra = id_A` and
/// `sb ; rb = id_B`.
#[derive(Debug, Clone)]
pub struct RetractDiagram {
    pub f: Functor,
    pub g: Functor,
    pub sa: Functor,
    pub ra: Functor,
    pub sb: Functor,
    pub rb: Functor,
}

pub fn retract_check(d: &RetractDiagram) -> Result<CheckReport> {
    let mut rep = CheckReport::new("retract");
    if !d.sa.then(&d.ra)?.is_identity() {
        rep.violation("section-domain", vec![], "sa ; ra is not the identity");
    }
    if !d.sb.then(&d.rb)?.is_identity() {
        rep.violation("section-codomain", vec![], "sb ; rb is not the identity");
    }
    if !d.f.then(&d.sb)?.same_map(&d.sa.then(&d.g)?) {
        rep.violation("square-sections", vec![], "f ; sb differs from sa ; g");
    }
    if !d.g.then(&d.rb)?.same_map(&d.ra.then(&d.f)?) {
        rep.violation("square-retractions", vec![], "g ; rb differs from ra ; f");
    }
    Ok(rep)
}

/// Every retract diagram between functors of the family: whenever `g` is a
/// weak equivalence so is `f`.
pub fn retract_closure_suite(cats: &[Arc<FiniteOmegaCat>], limit: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("retract_closure");
    let n = cats.len();
    let mut homs: FxHashMap<(usize, usize), Vec<Functor>> = FxHashMap::default();
    for i in 0..n {
        for j in 0..n {
            homs.insert((i, j), crate::search::enumerate_functors(cats[i].clone(), cats[j].clone(), limit)?);
        }
    }
    let mut sections: FxHashMap<(usize, usize), Vec<(Functor, Functor)>> = FxHashMap::default();
    for i in 0..n {
        for j in 0..n {
            let mut v = Vec::new();
            for s in &homs[&(i, j)] {
                for r in &homs[&(j, i)] {
                    if s.then(r)?.is_identity() {
                        v.push((s.clone(), r.clone()));
                    }
                }
            }
            sections.insert((i, j), v);
        }
    }
    let (mut diagrams, mut weq_g) = (0u64, 0u64);
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for dd in 0..n {
                    let (sa_all, sb_all) = (&sections[&(a, cc)], &sections[&(b, dd)]);
                    if sa_all.is_empty() || sb_all.is_empty() {
                        continue;
                    }
                    for g in &homs[&(cc, dd)] {
                        let gw = is_weak_equivalence(g).holds();
                        for (sa, ra) in sa_all {
                            for (sb, rb) in sb_all {
                                // f is forced: f = sa ; g ; rb.
                                let f = sa.then(g)?.then(rb)?;
                                let d = RetractDiagram {
                                    f: f.clone(),
                                    g: g.clone(),
                                    sa: sa.clone(),
                                    ra: ra.clone(),
                                    sb: sb.clone(),
                                    rb: rb.clone(),
                                };
                                if !retract_check(&d)?.holds() {
                                    continue;
                                }
                                diagrams += 1;
                                if gw {
                                    weq_g += 1;
                                    if !is_weak_equivalence(&f).holds() {
                                        rep.violation(
                                            "retract-closure",
                                            vec![f.describe(), g.describe()],
                                            "retract of a weak equivalence is not one",
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    rep.count("diagrams", diagrams);
    rep.count("weq_diagrams", weq_g);
    Ok(rep)
}

/// For composable `f`, `g` in the family: two of `f`, `g`, `f ; g` weak
/// equivalences imply the third.
pub fn three_for_two_suite(cats: &[Arc<FiniteOmegaCat>], limit: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("three_for_two");
    let n = cats.len();
    let mut homs: FxHashMap<(usize, usize), Vec<(Functor, bool)>> = FxHashMap::default();
    for i in 0..n {
        for j in 0..n {
            let fs = crate::search::enumerate_functors(cats[i].clone(), cats[j].clone(), limit)?;
            homs.insert((i, j), fs.into_iter().map(|f| {
                let w = is_weak_equivalence(&f).holds();
                (f, w)
            }).collect());
        }
    }
    let (mut triples, mut compos, mut rightinv, mut leftinv) = (0u64, 0u64, 0u64, 0u64);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for (f, fw) in &homs[&(a, b)] {
                    for (g, gw) in &homs[&(b, c)] {
                        triples += 1;
                        let fg = f.then(g)?;
                        let hw = is_weak_equivalence(&fg).holds();
                        let names = || vec![f.describe(), g.describe()];
                        if *fw && *gw {
                            compos += 1;
                            if !hw {
                                rep.violation("composition", names(), "composite of weak equivalences is not one");
                            }
                        }
                        if hw && *gw {
                            rightinv += 1;
                            if !fw {
                                rep.violation("right-cancellation", names(), "f ; g and g weq but f is not");
                            }
                        }
                        if hw && *fw {
                            leftinv += 1;
                            if !gw {
                                rep.violation("left-cancellation", names(), "f ; g and f weq but g is not");
                            }
                        }
                    }
                }
            }
        }
    }
    rep.count("pairs", triples);
    rep.count("composition_instances", compos);
    rep.count("right_cancellation_instances", rightinv);
    rep.count("left_cancellation_instances", leftinv);
    Ok(rep)
}

/// For a certified immersion `f : Y → Z` and `u : Y → X`, the extension
/// `v = g ; u` with `f ; v = u`, cross-checked against a lift of the square
/// `f` against `X → 1`.
pub fn fibrancy_extension(f: &Functor, c: &ImmersionCertificate, u: &Functor) -> Result<(Functor, CheckReport)> {
    let mut rep = CheckReport::new("fibrancy");
    let v = c.g.then(u)?;
    if !f.then(&v)?.same_map(u) {
        rep.violation("extension", vec![u.describe()], "f ; g ; u differs from u");
    }
    let one = Arc::new(crate::fixtures::terminal());
    let to_one = Functor::constant(u.cod.clone(), one.clone(), Cell::new(0, 0));
    let bottom = Functor::constant(f.cod.clone(), one, Cell::new(0, 0));
    let p = LiftingProblem::new(f.clone(), to_one, u.clone(), bottom)?;
    match find_lift(&p)? {
        Lift::Found(h) => rep.merge(lift_report(&p, &h)),
        Lift::Refused(r) => rep.violation("lift", r.stuck, r.reason),
    }
    Ok((v, rep))
}

/// One attached generator of a small-object stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Square {
    pub n: usize,
    pub boundary: Option<(String, String)>,
    pub over: String,
}

/// Stages of the small object argument for `ρ : Q(X) → Y` given on
/// generators. `lambda` is `X → X_k`, `rho` is `Q(X_k) → Y`.
#[derive(Debug, Clone)]
pub struct SoaResult {
    pub poly: Arc<Polygraph>,
    pub lambda: PolyMorphism,
    pub rho: Functor,
    pub attached: Vec<Square>,
    pub unfilled: Vec<Square>,
}

/// Runs `stages` rounds: every square from `i_n` (`n ≤ d`) into the current
/// projection without a lift gets one new generator.
pub fn soa_stage(
    x: Arc<Polygraph>,
    y: Arc<FiniteOmegaCat>,
    images: [Vec<Cell>; 3],
    d: usize,
    stages: usize,
) -> Result<SoaResult> {
    if d > 2 || x.dim > 2 || y.cap() > 2 {
        return Err(OmcError::Unsupported("small-object stages up to dimension 2".into()));
    }
    let mut poly = (*x).clone();
    let mut img = images;
    let mut attached = Vec::new();
    let mut rho;
    let mut stage = 0;
    loop {
        let p = Arc::new(poly.clone());
        let fc = free_category(p.clone())?;
        let mut gens = Vec::new();
        for (k, row) in img.iter().enumerate() {
            for (i, &c) in row.iter().enumerate() {
                gens.push((fc.generator(k, i as u32), c));
            }
        }
        rho = extend_generators(fc.cat.clone(), y.clone(), &gens)?
            .ok_or_else(|| OmcError::Invalid("generator images do not define a functor".into()))?;
        let open = open_squares(&rho, d)?;
        if stage == stages || open.is_empty() {
            let lambda = PolyMorphism::new(x.clone(), p.clone(), std::array::from_fn(|k| (0..x.gen_count(k) as u32).collect()))?;
            let unfilled = open.into_iter().map(|(s, _)| s).collect();
            return Ok(SoaResult {
                poly: p,
                lambda,
                rho,
                attached,
                unfilled,
            });
        }
        for (sq, (a, b, v)) in open {
            let name = format!("e{}", attached.len());
            match sq.n {
                0 => {
                    poly.add_object(&name);
                }
                1 => {
                    poly.add_arrow(&name, a.idx, b.idx);
                }
                _ => {
                    let (wa, wb): (Word, Word) = (fc.words()[a.idx as usize].clone(), fc.words()[b.idx as usize].clone());
                    poly.add_cell2(&name, wa, wb);
                }
            }
            img[sq.n].push(v);
            attached.push(sq);
        }
        stage += 1;
    }
}

type Open = (Square, (Cell, Cell, Cell));

fn open_squares(rho: &Functor, d: usize) -> Result<Vec<Open>> {
    let (x, y) = (&*rho.dom, &*rho.cod);
    let mut out = Vec::new();
    for v in y.objects() {
        if !x.objects().any(|o| rho.apply(o) == v) {
            out.push((
                Square {
                    n: 0,
                    boundary: None,
                    over: y.name(v),
                },
                (v, v, v),
            ));
        }
    }
    for n in 1..=d {
        for (a, b) in parallel_pairs(x, n - 1) {
            for v in y.hom(rho.apply(a), rho.apply(b)) {
                if v.dim > y.cap() || x.hom(a, b).any(|z| rho.apply(z) == v) {
                    continue;
                }
                out.push((
                    Square {
                        n,
                        boundary: Some((x.name(a), x.name(b))),
                        over: y.name(v),
                    },
                    (a, b, v),
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::polygraph::{boundary_globe, globe, globe_inclusion};
    use crate::presentation::{interval_presentation, presentation_of};
    use crate::random;

    fn arc(c: FiniteOmegaCat) -> Arc<FiniteOmegaCat> {
        Arc::new(c)
    }

    fn point_into(c: &Arc<FiniteOmegaCat>, obj: &str) -> Functor {
        let t = arc(fixtures::terminal());
        Functor::constant(t, c.clone(), c.cell(0, obj).unwrap())
    }

    #[test]
    fn identity_lift_is_bottom() {
        let c = arc(fixtures::interval_iso());
        let id = Functor::identity(c.clone());
        let f = Functor::constant(c.clone(), arc(fixtures::terminal()), Cell::new(0, 0));
        let p = LiftingProblem::new(id.clone(), f.clone(), id.clone(), f).unwrap();
        let h = find_lift(&p).unwrap();
        assert!(h.found().unwrap().is_identity());
    }

    #[test]
    fn interval_lifts_and_arrow_refuses() {
        let i1 = globe_inclusion(1);
        for (c, expect) in [(fixtures::interval_iso(), true), (fixtures::walking_arrow(), false)] {
            let c = arc(c);
            let bang = Functor::constant(c.clone(), arc(fixtures::terminal()), Cell::new(0, 0));
            let (a, b) = (c.cell(0, "a").unwrap(), c.cell(0, "b").unwrap());
            let top = pair_functor(c.clone(), b, a).unwrap();
            let bottom = Functor::constant(i1.cod.clone(), bang.cod.clone(), Cell::new(0, 0));
            let p = LiftingProblem::new(i1.clone(), bang, top, bottom).unwrap();
            match find_lift(&p).unwrap() {
                Lift::Found(h) => {
                    assert!(expect);
                    assert!(lift_report(&p, &h).holds());
                    let top_cell = h.dom.cell(1, "c1").unwrap();
                    assert_eq!(c.id(h.apply(top_cell)), "ubar");
                }
                Lift::Refused(r) => {
                    assert!(!expect);
                    assert_eq!(r.stuck, vec!["c1".to_string()]);
                }
            }
        }
    }

    #[test]
    fn immersions_on_fixtures() {
        let iso = arc(fixtures::interval_iso());
        let id = Functor::identity(iso.clone());
        let c = is_immersion(&id).unwrap();
        assert!(c.certificate().unwrap().g.is_identity());

        let f = point_into(&iso, "a");
        let (im, rep) = immersion_report(&f).unwrap();
        assert!(rep.holds(), "{}", rep.summary());
        let cert = im.certificate().unwrap();
        assert_eq!(cert.g.apply(iso.cell(0, "b").unwrap()), Cell::new(0, 0));

        let arrow = arc(fixtures::walking_arrow());
        match is_immersion(&point_into(&arrow, "a")).unwrap() {
            Immersion::Refused(r) => assert!(r.stuck.contains(&"b".to_string())),
            Immersion::Certified(_) => panic!("a ↦ a into the walking arrow is not an immersion"),
        }
    }

    #[test]
    fn lifting_agrees_with_tfib() {
        let mut r = random::rng(11);
        for _ in 0..15 {
            let a = arc(random::random_preorder(&mut r, 3));
            let b = arc(random::random_preorder(&mut r, 2));
            for f in crate::search::enumerate_functors(a.clone(), b.clone(), 20).unwrap() {
                let rep = tfib_by_lifting(&f).unwrap();
                assert!(rep.holds(), "{}", rep.summary());
            }
        }
    }

    #[test]
    fn pushout_of_interval_whisker() {
        let mut t = Polygraph::new(0);
        t.add_object("x");
        let t = Arc::new(t);
        let i = Arc::new(interval_presentation());
        let f = PolyMorphism::new(t.clone(), i, [vec![0], vec![], vec![], vec![]]).unwrap();
        let mut two = Polygraph::new(0);
        two.add_object("p");
        two.add_object("q");
        let g = PolyMorphism::new(t.clone(), Arc::new(two), [vec![0], vec![], vec![], vec![]]).unwrap();
        let rep = pushout_immersion(&f, &g).unwrap();
        assert!(rep.holds() && rep.inconclusive.is_empty(), "{}", rep.summary());
        assert_eq!(rep.stats["certified_by_search"], 1);
        assert_eq!(rep.stats["certified_by_universality"], 1);
        let along_id = pushout_immersion(&f, &PolyMorphism::identity(t)).unwrap();
        assert!(along_id.holds(), "{}", along_id.summary());
        let w = Arc::new(presentation_of(&fixtures::walking_arrow()).unwrap());
        let m = PolyMorphism::new(f.dom.clone(), w, [vec![1], vec![], vec![], vec![]]).unwrap();
        assert!(pushout_immersion(&f, &m).unwrap().holds());
    }

    #[test]
    fn retracts_and_three_for_two() {
        let cats: Vec<_> = [fixtures::terminal(), fixtures::interval_iso(), fixtures::walking_arrow()]
            .into_iter()
            .map(arc)
            .collect();
        let r = retract_closure_suite(&cats, 100).unwrap();
        assert!(r.holds(), "{}", r.summary());
        assert!(r.stats["weq_diagrams"] > 0);
        let t = three_for_two_suite(&cats, 100).unwrap();
        assert!(t.holds(), "{}", t.summary());
    }

    #[test]
    fn broken_retract_is_reported() {
        let c = arc(fixtures::walking_arrow());
        let id = Functor::identity(c.clone());
        let swap_a = Functor::constant(c.clone(), c.clone(), c.cell(0, "a").unwrap());
        let d = RetractDiagram {
            f: id.clone(),
            g: id.clone(),
            sa: id.clone(),
            ra: id.clone(),
            sb: id.clone(),
            rb: swap_a,
        };
        let r = retract_check(&d).unwrap();
        assert!(r.fails());
        let ok = RetractDiagram { rb: id.clone(), ..d };
        assert!(retract_check(&ok).unwrap().holds());
    }

    #[test]
    fn fibrancy_via_retraction() {
        let iso = arc(fixtures::interval_iso());
        let f = point_into(&iso, "a");
        let cert = is_immersion(&f).unwrap();
        let cert = cert.certificate().unwrap();
        for x in [fixtures::walking_arrow(), random::cyclic(3)] {
            let x = arc(x);
            for u in crate::search::enumerate_functors(f.dom.clone(), x, 10).unwrap() {
                let (v, rep) = fibrancy_extension(&f, cert, &u).unwrap();
                assert!(rep.holds(), "{}", rep.summary());
                assert!(f.then(&v).unwrap().same_map(&u));
            }
        }
    }

    #[test]
    fn soa_examples() {
        let empty = Arc::new(Polygraph::new(0));
        let one = arc(fixtures::terminal());
        let r = soa_stage(empty.clone(), one.clone(), Default::default(), 0, 1).unwrap();
        assert_eq!(r.attached.len(), 1);
        assert!(r.unfilled.is_empty());
        assert!(is_trivial_fibration(&r.rho).holds());

        // Already a trivial fibration: nothing to attach.
        let mut p = Polygraph::new(0);
        p.add_object("x");
        let r = soa_stage(Arc::new(p), one, [vec![Cell::new(0, 0)], vec![], vec![]], 1, 3).unwrap();
        assert!(r.attached.is_empty());

        // Walking arrow from nothing: objects, then the arrow.
        let wa = arc(fixtures::walking_arrow());
        let r = soa_stage(empty, wa, Default::default(), 1, 2).unwrap();
        assert_eq!(r.attached.len(), 3);
        assert!(r.unfilled.is_empty());
        assert!(is_trivial_fibration(&r.rho).holds());
    }

    #[test]
    fn soa_cell_complexes_that_are_weq_are_immersions() {
        let mut x = Polygraph::new(0);
        x.add_object("x");
        let x = Arc::new(x);
        let globe1 = arc(globe(1));
        let bd = arc(boundary_globe(1));
        for (y, img) in [(globe1.clone(), 0u32), (bd.clone(), 1)] {
            let r = soa_stage(x.clone(), y, [vec![Cell::new(0, img)], vec![], vec![]], 1, 2).unwrap();
            let fx = free_category(x.clone()).unwrap();
            let fk = free_category(r.poly.clone()).unwrap();
            let lam = crate::polygraph::free_functor(&r.lambda, &fx, &fk).unwrap();
            if is_weak_equivalence(&lam).holds() {
                assert!(is_immersion(&lam).unwrap().certificate().is_some());
            }
        }
    }
}
