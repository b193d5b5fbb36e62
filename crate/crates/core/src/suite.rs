use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::category::FiniteOmegaCat;
use crate::cyl_laws::{cylinder_laws, LawConfig};
use crate::equivalence::{congruence_suite, division_suite, is_weak_equivalence, EqvTable};
use crate::error::{OmcError, Result};
use crate::fixtures;
use crate::functor::Functor;
use crate::gamma::{gamma_structure_report, gamma_with_budget};
use crate::gluing::{charweq_with, check_top_bot_fibrations, glue_with, transport_suite};
use crate::modelcheck::{
    fibrancy_extension, find_lift, immersion_report, is_immersion, pushout_immersion, retract_closure_suite,
    tfib_by_lifting, three_for_two_suite, Immersion, Lift, LiftingProblem,
};
use crate::polygraph::{
    boundary_globe, free_category, free_functor, globe, globe_cocone, globe_inclusion, globe_polygraph, pair_functor,
    pushout_polygraph, PolyMorphism, Polygraph,
};
use crate::presentation::{interval_presentation, present, presentation_of, presented_functor};
use crate::random::{self, random_categories};
use crate::report::CheckReport;
use crate::search::{find_isomorphism, FunctorSearch};
use crate::transfer::{collapse_inclusion_report, include, is_equivalence_of_categories, triangle_report};
use crate::validate::validate_category;

pub const SUITES: &[&str] = &[
    "cylinder-laws",
    "gamma",
    "charweq",
    "transport",
    "three-for-two",
    "retract",
    "immersion",
    "pushout-immersion",
    "lifting",
    "transfer",
    "structural",
    "fibrancy",
];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random categories per suite that draws them.
    pub count: usize,
    pub max_cells: usize,
    pub max_cap: usize,
    pub cylinder_budget: usize,
    /// Functors enumerated per pair of categories.
    pub functor_limit: usize,
    pub laws_per_instance: usize,
    /// Random immersion pushouts.
    pub pushouts: usize,
    pub suites: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 2024,
            count: 200,
            max_cells: 12,
            max_cap: 3,
            cylinder_budget: 20_000,
            functor_limit: 5_000,
            laws_per_instance: 300,
            pushouts: 40,
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub reports: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn holds(&self) -> bool {
        self.reports.iter().all(|r| r.holds())
    }

    pub fn fails(&self) -> bool {
        self.reports.iter().any(|r| r.fails())
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut reports = Vec::new();
    for name in &cfg.suites {
        reports.push(run_one(name, cfg)?);
    }
    Ok(SuiteReport { seed: cfg.seed, reports })
}

pub fn run_one(name: &str, cfg: &SuiteConfig) -> Result<CheckReport> {
    match name {
        "cylinder-laws" => cylinder_law_suite(cfg),
        "gamma" => gamma_suite(cfg),
        "charweq" => charweq_suite(cfg),
        "transport" => transport_all(cfg),
        "three-for-two" => three_for_two_suite(&weq_family(), cfg.functor_limit),
        "retract" => retract_closure_suite(&retract_family(), cfg.functor_limit),
        "immersion" => immersion_suite(cfg),
        "pushout-immersion" => pushout_immersion_suite(cfg),
        "lifting" => lifting_suite(cfg),
        "transfer" => transfer_suite(cfg),
        "structural" => structural_suite(),
        "fibrancy" => fibrancy_suite(cfg),
        _ => Err(OmcError::Invalid(format!("unknown suite {name:?}"))),
    }
}

/// Budget and unsupported-shape failures become inconclusive entries.
fn absorb(rep: &mut CheckReport, label: &str, r: Result<CheckReport>) -> Result<()> {
    match r {
        Ok(x) => rep.merge(x),
        Err(OmcError::Budget(e)) | Err(OmcError::Unsupported(e)) => rep.inconclusive(format!("{label}: {e}")),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn gather(name: &str, parts: Vec<(String, Result<CheckReport>)>) -> Result<CheckReport> {
    let mut rep = CheckReport::new(name);
    for (label, r) in parts {
        absorb(&mut rep, &label, r)?;
        rep.count("instances", 1);
    }
    Ok(rep)
}

fn randoms(cfg: &SuiteConfig, salt: u64) -> Result<Vec<(String, Arc<FiniteOmegaCat>)>> {
    random_categories(cfg.seed ^ salt, cfg.count, cfg.max_cells, cfg.max_cap)
}

pub fn cylinder_law_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let law_cfg = LawConfig {
        per_law: cfg.laws_per_instance,
        cylinder_budget: cfg.cylinder_budget,
        ..LawConfig::default()
    };
    let cats = randoms(cfg, 0)?;
    let parts = cats
        .par_iter()
        .enumerate()
        .map(|(i, (fam, c))| (format!("#{i} {fam}"), cylinder_laws(c.clone(), law_cfg)))
        .collect();
    gather("cylinder-laws", parts)
}

pub fn gamma_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let cats = randoms(cfg, 0)?;
    let parts = cats
        .par_iter()
        .enumerate()
        .map(|(i, (fam, c))| {
            let r = gamma_with_budget(c.clone(), cfg.cylinder_budget).map(|g| {
                let mut rep = gamma_structure_report(&g);
                rep.merge(check_top_bot_fibrations(&g));
                rep.count("gamma_cells", g.cat.total_stored() as u64);
                rep
            });
            (format!("#{i} {fam}"), r)
        })
        .collect();
    gather("gamma", parts)
}

pub fn transport_all(cfg: &SuiteConfig) -> Result<CheckReport> {
    let cats = randoms(cfg, 0)?;
    let parts = cats
        .par_iter()
        .enumerate()
        .map(|(i, (fam, c))| {
            let e = EqvTable::new(c.clone());
            let r = transport_suite(&e, cfg.cylinder_budget).map(|mut rep| {
                rep.merge(division_suite(&e));
                rep.merge(congruence_suite(&e));
                rep
            });
            (format!("#{i} {fam}"), r)
        })
        .collect();
    gather("transport", parts)
}

/// Every functor `a → b`, flagging truncation at `limit`.
pub fn all_functors(a: &Arc<FiniteOmegaCat>, b: &Arc<FiniteOmegaCat>, limit: usize) -> Result<(Vec<Functor>, bool)> {
    let fs = FunctorSearch::new(a.clone(), b.clone()).all(limit + 1)?;
    let truncated = fs.len() > limit;
    Ok((fs.into_iter().take(limit).collect(), truncated))
}

fn named(v: Vec<(&str, FiniteOmegaCat)>) -> Vec<(String, Arc<FiniteOmegaCat>)> {
    v.into_iter().map(|(n, c)| (n.to_string(), Arc::new(c))).collect()
}

/// Fixed categories with at most 8 non-unit cells, up to dimension 2.
pub fn small_family() -> Vec<(String, Arc<FiniteOmegaCat>)> {
    named(vec![
        ("terminal", fixtures::terminal()),
        ("empty", fixtures::empty()),
        ("discrete-2", fixtures::discrete(2)),
        ("walking-arrow", fixtures::walking_arrow()),
        ("interval", fixtures::interval_iso()),
        ("cyclic-2", random::cyclic(2)),
        ("cyclic-3", random::cyclic(3)),
        ("idempotent", random::idempotent()),
        ("chain-3", random::preorder(3, &[(0, 1), (1, 2)])),
        ("codiscrete-3", random::codiscrete(3)),
        ("globe-1", globe(1)),
        ("globe-2", globe(2)),
        ("boundary-2", boundary_globe(2)),
        ("suspended-interval", random::suspension(&fixtures::interval_iso())),
        ("suspended-cyclic-2", random::suspension(&random::cyclic(2))),
        ("double-loop-2", random::double_loop(2)),
    ])
}

pub fn charweq_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let fam = small_family();
    let gammas: Vec<_> = fam
        .iter()
        .map(|(_, c)| gamma_with_budget(c.clone(), cfg.cylinder_budget).map(Arc::new))
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..fam.len()).flat_map(|i| (0..fam.len()).map(move |j| (i, j))).collect();
    let parts = pairs
        .par_iter()
        .map(|&(i, j)| {
            let label = format!("{} → {}", fam[i].0, fam[j].0);
            let r = (|| {
                let (fs, truncated) = all_functors(&fam[i].1, &fam[j].1, cfg.functor_limit)?;
                let mut rep = CheckReport::new("charweq");
                if truncated {
                    rep.inconclusive(format!("{label}: more than {} functors", cfg.functor_limit));
                }
                for f in &fs {
                    let g = glue_with(f, gammas[j].clone())?;
                    rep.merge(charweq_with(f, &g));
                    rep.count("functors", 1);
                }
                Ok(rep)
            })();
            (label, r)
        })
        .collect();
    gather("charweq", parts)
}

/// Small 1- and 2-categories for the exhaustive 3-for-2 check.
pub fn weq_family() -> Vec<Arc<FiniteOmegaCat>> {
    named(vec![
        ("terminal", fixtures::terminal()),
        ("discrete-2", fixtures::discrete(2)),
        ("walking-arrow", fixtures::walking_arrow()),
        ("interval", fixtures::interval_iso()),
        ("cyclic-2", random::cyclic(2)),
        ("idempotent", random::idempotent()),
        ("codiscrete-3", random::codiscrete(3)),
        ("globe-1", globe(1)),
        ("suspended-interval", random::suspension(&fixtures::interval_iso())),
    ])
    .into_iter()
    .map(|(_, c)| c)
    .collect()
}

pub fn retract_family() -> Vec<Arc<FiniteOmegaCat>> {
    named(vec![
        ("terminal", fixtures::terminal()),
        ("discrete-2", fixtures::discrete(2)),
        ("walking-arrow", fixtures::walking_arrow()),
        ("interval", fixtures::interval_iso()),
        ("cyclic-2", random::cyclic(2)),
        ("codiscrete-3", random::codiscrete(3)),
    ])
    .into_iter()
    .map(|(_, c)| c)
    .collect()
}

fn arc(c: FiniteOmegaCat) -> Arc<FiniteOmegaCat> {
    Arc::new(c)
}

fn point(c: &Arc<FiniteOmegaCat>, obj: &str) -> Result<Functor> {
    Ok(Functor::constant(arc(fixtures::terminal()), c.clone(), c.cell(0, obj)?))
}

fn fresh(p: &Polygraph, k: usize, base: &str) -> String {
    let mut id = base.to_string();
    while p.find_gen(k, &id).is_some() {
        id.push('\'');
    }
    id
}

/// Adds an object isomorphic to `at`.
pub fn whisker(p: &Polygraph, at: u32, tag: &str) -> Polygraph {
    let mut q = p.clone();
    let b = q.add_object(&fresh(p, 0, &format!("w{tag}")));
    let u = q.add_arrow(&fresh(p, 1, &format!("u{tag}")), at, b);
    let ubar = q.add_arrow(&fresh(&q, 1, &format!("ubar{tag}")), b, at);
    let (w1, e1) = (q.word(at, &[u, ubar]), q.word(at, &[]));
    let (w2, e2) = (q.word(b, &[ubar, u]), q.word(b, &[]));
    let r = fresh(&q, 2, &format!("r{tag}"));
    q.add_cell2(&r, w1, e1);
    let s = fresh(&q, 2, &format!("s{tag}"));
    q.add_cell2(&s, w2, e2);
    q
}

fn discrete_polygraph(k: usize) -> Polygraph {
    let mut p = Polygraph::new(0);
    for i in 0..k {
        p.add_object(&format!("x{i}"));
    }
    p
}

/// Presented inclusions `X → X + whiskers` together with a morphism
/// `X → W` to push them out along.
pub fn immersion_pushout_corpus(seed: u64, count: usize) -> Result<Vec<(String, PolyMorphism, PolyMorphism)>> {
    let mut rng = random::rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let (x, w, obj_map, kind) = if rng.gen_bool(0.5) {
            let k = rng.gen_range(1..=2);
            let x = discrete_polygraph(k);
            let c = random::small_one_category(&mut rng);
            if c.count(0) == 0 {
                continue;
            }
            let w = presentation_of(&c)?;
            let m: Vec<u32> = (0..k).map(|_| rng.gen_range(0..c.count(0) as u32)).collect();
            (x, w, Some(m), "discrete")
        } else {
            let c = random::small_one_category(&mut rng);
            if c.count(0) == 0 {
                continue;
            }
            let x = presentation_of(&c)?;
            let mut w = x.clone();
            let extra = w.add_object(&fresh(&x, 0, "new"));
            let from = rng.gen_range(0..c.count(0) as u32);
            w.add_arrow(&fresh(&x, 1, "e"), from, extra);
            if rng.gen_bool(0.5) {
                w = whisker(&w, extra, "n");
            }
            (x, w, None, "extension")
        };
        let mut y = x.clone();
        let whiskers = rng.gen_range(1..=2);
        for t in 0..whiskers {
            let at = rng.gen_range(0..y.objects.len() as u32);
            y = whisker(&y, at, &t.to_string());
        }
        if y.total_gens() > 12 {
            continue;
        }
        let x = Arc::new(x);
        let f = PolyMorphism::by_ids(x.clone(), Arc::new(y))?;
        let w = Arc::new(w);
        let i = match obj_map {
            Some(m) => PolyMorphism::new(x, w, [m, vec![], vec![], vec![]])?,
            None => PolyMorphism::by_ids(x, w)?,
        };
        out.push((format!("#{} {kind}", out.len()), f, i));
    }
    Ok(out)
}

/// Named functors: fixtures plus presented whisker inclusions.
pub fn immersion_corpus(seed: u64, count: usize) -> Result<Vec<(String, Functor)>> {
    let iso = arc(fixtures::interval_iso());
    let mut out = vec![
        ("id interval".to_string(), Functor::identity(iso.clone())),
        ("a ↦ a into interval".to_string(), point(&iso, "a")?),
        ("b ↦ b into interval".to_string(), point(&iso, "b")?),
        ("id walking arrow".to_string(), Functor::identity(arc(fixtures::walking_arrow()))),
        ("id codiscrete 3".to_string(), Functor::identity(arc(random::codiscrete(3)))),
    ];
    let cod = arc(random::codiscrete(3));
    out.push(("point into codiscrete 3".into(), Functor::constant(arc(fixtures::terminal()), cod, crate::category::Cell::new(0, 0))));
    for (name, f, _) in immersion_pushout_corpus(seed, count)? {
        let (a, b) = (present(f.dom.clone())?, present(f.cod.clone())?);
        out.push((format!("whiskers {name}"), presented_functor(&f, &a, &b)?));
    }
    Ok(out)
}

pub const NEGATIVE_FIXTURES: &[&str] = &["a ↦ a : terminal → walking arrow", "(b, a) square against walking arrow → terminal"];

/// The two walking-arrow negatives, each refused by exhaustive search with a
/// nonempty list of cells that admit no image.
pub fn negative_fixtures() -> Result<CheckReport> {
    let mut rep = CheckReport::new("immersion-negatives");
    let arrow = arc(fixtures::walking_arrow());
    match is_immersion(&point(&arrow, "a")?)? {
        Immersion::Refused(r) if !r.stuck.is_empty() => rep.count("refused", 1),
        Immersion::Refused(r) => rep.violation("certificate", vec![NEGATIVE_FIXTURES[0].into()], format!("refused without stuck cells: {}", r.reason)),
        Immersion::Certified(_) => rep.violation("refusal", vec![NEGATIVE_FIXTURES[0].into()], "certified"),
    }
    let i1 = globe_inclusion(1);
    let one = arc(fixtures::terminal());
    let bang = Functor::constant(arrow.clone(), one.clone(), crate::category::Cell::new(0, 0));
    let top = pair_functor(arrow.clone(), arrow.cell(0, "b")?, arrow.cell(0, "a")?)?;
    let bottom = Functor::constant(i1.cod.clone(), one, crate::category::Cell::new(0, 0));
    let p = LiftingProblem::new(i1, bang, top, bottom)?;
    match find_lift(&p)? {
        Lift::Refused(r) if !r.stuck.is_empty() => rep.count("refused", 1),
        Lift::Refused(r) => rep.violation("certificate", vec![NEGATIVE_FIXTURES[1].into()], format!("refused without stuck cells: {}", r.reason)),
        Lift::Found(_) => rep.violation("refusal", vec![NEGATIVE_FIXTURES[1].into()], "a lift was found"),
    }
    Ok(rep)
}

pub fn immersion_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let corpus = immersion_corpus(cfg.seed, cfg.pushouts)?;
    let parts: Vec<_> = corpus
        .par_iter()
        .map(|(name, f)| {
            let r = immersion_report(f).map(|(_, rep)| rep);
            (name.clone(), r)
        })
        .collect();
    let mut rep = gather("immersion", parts)?;
    rep.merge(negative_fixtures()?);
    Ok(rep)
}

pub fn pushout_immersion_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let corpus = immersion_pushout_corpus(cfg.seed, cfg.pushouts)?;
    let parts = corpus
        .par_iter()
        .map(|(name, f, i)| (name.clone(), pushout_immersion(f, i)))
        .collect();
    let mut rep = gather("pushout-immersion", parts)?;
    // The two-component example and pushout along the identity.
    let mut t = Polygraph::new(0);
    t.add_object("x");
    let t = Arc::new(t);
    let f = PolyMorphism::new(t.clone(), Arc::new(interval_presentation()), [vec![0], vec![], vec![], vec![]])?;
    let two = Arc::new(discrete_polygraph(2));
    let m = PolyMorphism::new(t.clone(), two, [vec![0], vec![], vec![], vec![]])?;
    rep.merge(pushout_immersion(&f, &m)?);
    rep.merge(pushout_immersion(&f, &PolyMorphism::identity(t))?);
    Ok(rep)
}

/// Trivial fibrations against raw lifting from every globe inclusion, over
/// every functor between small 1-categories.
pub fn lifting_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let fam: Vec<_> = small_family().into_iter().filter(|(_, c)| c.total_stored() <= 8 && c.cap() <= 1).collect();
    let pairs: Vec<(usize, usize)> = (0..fam.len()).flat_map(|i| (0..fam.len()).map(move |j| (i, j))).collect();
    let parts = pairs
        .par_iter()
        .map(|&(i, j)| {
            let r = (|| {
                let (fs, truncated) = all_functors(&fam[i].1, &fam[j].1, cfg.functor_limit)?;
                let mut rep = CheckReport::new("lifting");
                if truncated {
                    rep.inconclusive("functor family truncated");
                }
                for f in &fs {
                    rep.merge(tfib_by_lifting(f)?);
                }
                Ok(rep)
            })();
            (format!("{} → {}", fam[i].0, fam[j].0), r)
        })
        .collect();
    gather("lifting", parts)
}

/// 1-categories with at most four objects.
pub fn object_family() -> Vec<(String, Arc<FiniteOmegaCat>)> {
    named(vec![
        ("terminal", fixtures::terminal()),
        ("empty", fixtures::empty()),
        ("discrete-2", fixtures::discrete(2)),
        ("walking-arrow", fixtures::walking_arrow()),
        ("interval", fixtures::interval_iso()),
        ("cyclic-2", random::cyclic(2)),
        ("idempotent", random::idempotent()),
        ("chain-3", random::preorder(3, &[(0, 1), (1, 2)])),
        ("span", random::preorder(3, &[(0, 1), (0, 2)])),
        ("codiscrete-3", random::codiscrete(3)),
        ("square", random::preorder(4, &[(0, 1), (0, 2), (1, 3), (2, 3)])),
        ("codiscrete-4", random::codiscrete(4)),
    ])
}

pub fn transfer_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let cats = randoms(cfg, 7)?;
    let parts = cats
        .par_iter()
        .enumerate()
        .map(|(i, (fam, c))| {
            let r = (|| {
                let mut rep = CheckReport::new("transfer");
                for n in 0..=c.cap() {
                    rep.merge(triangle_report(c.clone(), n)?);
                }
                Ok(rep)
            })();
            (format!("#{i} {fam}"), r)
        })
        .collect();
    let mut rep = gather("transfer", parts)?;
    for n in 0..=2 {
        absorb(&mut rep, &format!("inclusions n = {n}"), collapse_inclusion_report(n, n + 2))?;
    }
    let fam = object_family();
    let mut agree = 0u64;
    for (an, a) in &fam {
        for (bn, b) in &fam {
            let (fs, truncated) = all_functors(a, b, cfg.functor_limit)?;
            if truncated {
                rep.inconclusive(format!("{an} → {bn}: functor family truncated"));
            }
            let (ia, ib) = (arc(include(a, 1)?), arc(include(b, 1)?));
            for f in &fs {
                let g = Functor::from_map(ia.clone(), ib.clone(), f.table().to_vec())?;
                let w = is_weak_equivalence(&g).holds();
                let e = is_equivalence_of_categories(f)?;
                if w != e {
                    rep.violation(
                        "weq-is-equivalence",
                        vec![an.clone(), bn.clone(), f.describe()],
                        format!("is_weak_equivalence = {w}, equivalence of categories = {e}"),
                    );
                } else {
                    agree += 1;
                }
            }
        }
    }
    rep.count("n1_functors_agreeing", agree);
    Ok(rep)
}

/// Globe counts for `n ≤ 4` and the pushout square
/// `O(n) ⊔_{∂O(n)} O(n) ≅ ∂O(n+1)` for `n ≤ 3`.
pub fn structural_suite() -> Result<CheckReport> {
    let mut rep = CheckReport::new("structural");
    for n in 0..=4 {
        let (g, b) = (globe(n), boundary_globe(n));
        for (name, c, tops) in [("globe", &g, 1), ("boundary", &b, 0)] {
            let r = validate_category(c);
            if !r.holds() {
                rep.violation("valid", vec![format!("{name} {n}")], r.summary());
            }
            for k in 0..=n {
                let want = if k < n { 2 } else { tops };
                let got = c.cells(k).filter(|&x| !c.is_unit(x)).count();
                if got != want {
                    rep.violation("count", vec![format!("{name} {n}"), k.to_string()], format!("{got} non-identity cells, expected {want}"));
                }
            }
        }
        rep.count("globes", 1);
    }
    for n in 0..=3 {
        let bp = Arc::new(globe_polygraph(n, false)?);
        let op = Arc::new(globe_polygraph(n, true)?);
        let i = PolyMorphism::by_ids(bp, op.clone())?;
        let po = pushout_polygraph(&i, &i)?;
        let (fo, fp) = (free_category(op)?, free_category(po.poly.clone())?);
        let left = free_functor(&po.left, &fo, &fp)?;
        let right = free_functor(&po.right, &fo, &fp)?;
        let target = arc(boundary_globe(n + 1));
        let (s, t) = globe_cocone(n);
        let isos = FunctorSearch::new(fp.cat.clone(), target.clone()).injective().all(8)?;
        let matches = isos.iter().any(|iso| {
            let (l, r) = (left.then(iso), right.then(iso));
            matches!((l, r), (Ok(l), Ok(r)) if (agree_by_ids(&l, &s) && agree_by_ids(&r, &t)) || (agree_by_ids(&l, &t) && agree_by_ids(&r, &s)))
        });
        if find_isomorphism(fp.cat.clone(), target)?.is_none() || !matches {
            rep.violation("pushout-square", vec![n.to_string()], "pushout of boundary inclusions is not the boundary of the next globe");
        }
        rep.count("pushout_squares", 1);
    }
    Ok(rep)
}

/// Whether two functors with the same codomain agree on generating cells
/// matched by id.
fn agree_by_ids(f: &Functor, g: &Functor) -> bool {
    (0..=f.dom.cap()).all(|k| {
        f.dom.cells(k).filter(|&x| !f.dom.is_unit(x)).all(|x| match g.dom.find(k, f.dom.id(x)) {
            Some(y) => f.apply(x) == g.apply(y),
            None => false,
        })
    })
}

/// For every certified immersion `f : Y → Z` of the corpus and every
/// `u : Y → X` into small targets, `v = g ; u` extends `u` along `f`.
pub fn fibrancy_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let corpus = immersion_corpus(cfg.seed, cfg.pushouts)?;
    let targets: Vec<_> = small_family().into_iter().filter(|(_, c)| c.cap() <= 1).collect();
    let parts = corpus
        .par_iter()
        .map(|(name, f)| {
            let r = (|| {
                let mut rep = CheckReport::new("fibrancy");
                let Immersion::Certified(cert) = is_immersion(f)? else {
                    rep.count("uncertified_skipped", 1);
                    return Ok(rep);
                };
                rep.count("immersions", 1);
                for (_, x) in &targets {
                    let (us, truncated) = all_functors(&f.dom, x, 50)?;
                    if truncated {
                        rep.count("truncated_targets", 1);
                    }
                    for u in &us {
                        rep.merge(fibrancy_extension(f, &cert, u)?.1);
                        rep.count("extensions", 1);
                    }
                }
                Ok(rep)
            })();
            (name.clone(), r)
        })
        .collect();
    gather("fibrancy", parts)
}

/// A shuffled subset of the suite names, for quick smoke runs.
pub fn sample_suites(seed: u64, k: usize) -> Vec<String> {
    let mut v: Vec<String> = SUITES.iter().map(|s| s.to_string()).collect();
    v.shuffle(&mut random::rng(seed));
    v.truncate(k);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SuiteConfig {
        SuiteConfig {
            count: 6,
            pushouts: 4,
            functor_limit: 200,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn every_suite_runs_small() {
        let cfg = quick();
        for s in SUITES {
            let r = run_one(s, &cfg).unwrap();
            assert!(!r.fails(), "{}", r.summary());
        }
    }

    #[test]
    fn empty_selection() {
        let cfg = SuiteConfig {
            suites: vec![],
            ..quick()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.reports.is_empty() && r.holds());
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = SuiteConfig {
            suites: vec!["cylinder-laws".into(), "pushout-immersion".into()],
            ..quick()
        };
        let a = serde_json::to_string(&run_suite(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
