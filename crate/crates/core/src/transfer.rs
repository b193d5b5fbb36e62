use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::category::{Cell, FiniteOmegaCat, RawCategory};
use crate::error::{OmcError, Result};
use crate::functor::Functor;
use crate::gamma::{gamma_functor, GammaCat};
use crate::polygraph::UnionFind;
use crate::report::CheckReport;
use crate::validate::validate_category;

/// `𝕀` on an n-category: cells above the cap are already implicit units, so
/// only the dimension bound is checked.
pub fn include(c: &FiniteOmegaCat, n: usize) -> Result<FiniteOmegaCat> {
    if c.cap() > n {
        return Err(OmcError::Invalid(format!(
            "category has cap {} and is not a {n}-category",
            c.cap()
        )));
    }
    Ok(c.clone())
}

/// `𝕋`: forgets the cells above dimension `n`.
pub fn truncate(c: &FiniteOmegaCat, n: usize) -> FiniteOmegaCat {
    if n >= c.cap() {
        return c.clone();
    }
    let full = c.to_raw();
    let mut raw = RawCategory::new(n);
    for k in 0..=n {
        for i in 0..full.len(k) {
            let (s, t) = if k == 0 { (0, 0) } else { (full.src[k][i], full.tgt[k][i]) };
            raw.push(k, full.ids[k][i].clone(), s, t).expect("ids are unique");
        }
        if k < n {
            raw.unit[k] = full.unit[k].clone();
        }
        raw.comp[k] = full.comp[k].clone();
    }
    raw.freeze().expect("truncation of a valid category")
}

/// Why two n-cells were merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MergeReason {
    /// An (n+1)-cell from one to the other.
    ZigZag(u32),
    /// Composites `a ∘p b` and `a' ∘p b'` of already merged factors.
    Congruence { p: usize, left: (u32, u32), right: (u32, u32) },
}

/// The congruence on n-cells generated by the (n+1)-cells.
#[derive(Debug, Clone, Serialize)]
pub struct CongruencePartition {
    pub level: usize,
    pub class_of: Vec<u32>,
    pub classes: Vec<Vec<u32>>,
    pub merges: Vec<(u32, u32, MergeReason)>,
}

/// `𝕊X` with the partition behind it and the quotient map `η : X → 𝕀𝕊X`.
#[derive(Debug, Clone)]
pub struct Collapse {
    pub cat: Arc<FiniteOmegaCat>,
    pub partition: CongruencePartition,
    pub eta: Functor,
}

pub fn congruence(c: &FiniteOmegaCat, n: usize) -> CongruencePartition {
    let cnt = c.count(n);
    let mut uf = UnionFind::new(cnt);
    let mut merges = Vec::new();
    if n < c.cap() {
        for u in c.cells(n + 1) {
            if c.is_unit(u) {
                continue;
            }
            let (s, t) = (c.src(u).idx, c.tgt(u).idx);
            if uf.union(s as usize, t as usize) {
                merges.push((s, t, MergeReason::ZigZag(u.idx)));
            }
        }
    }
    if n < c.cap() && n > 0 {
        loop {
            let mut changed = false;
            for p in 0..n {
                let mut seen: FxHashMap<(usize, usize), (u32, u32, u32)> = FxHashMap::default();
                let mut entries: Vec<(&(u32, u32), &u32)> = c.comp_table(n, p).iter().collect();
                entries.sort();
                for (&(a, b), &r) in entries {
                    let key = (uf.find(a as usize), uf.find(b as usize));
                    match seen.get(&key) {
                        None => {
                            seen.insert(key, (a, b, r));
                        }
                        Some(&(a0, b0, r0)) => {
                            if uf.union(r0 as usize, r as usize) {
                                changed = true;
                                merges.push((
                                    r0,
                                    r,
                                    MergeReason::Congruence {
                                        p,
                                        left: (a0, b0),
                                        right: (a, b),
                                    },
                                ));
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    let mut class_of = vec![u32::MAX; cnt];
    let mut classes: Vec<Vec<u32>> = Vec::new();
    let mut root_class: FxHashMap<usize, u32> = FxHashMap::default();
    for i in 0..cnt {
        let r = uf.find(i);
        let k = *root_class.entry(r).or_insert_with(|| {
            classes.push(Vec::new());
            (classes.len() - 1) as u32
        });
        class_of[i] = k;
        classes[k as usize].push(i as u32);
    }
    CongruencePartition {
        level: n,
        class_of,
        classes,
        merges,
    }
}

/// `𝕊` as a plain category.
pub fn collapse(c: &FiniteOmegaCat, n: usize) -> Result<FiniteOmegaCat> {
    Ok((*collapse_full(Arc::new(c.clone()), n)?.cat).clone())
}

/// `𝕊X`: n-cells modulo the congruence generated by the (n+1)-cells, each
/// class named after its least member id.
pub fn collapse_full(c: Arc<FiniteOmegaCat>, n: usize) -> Result<Collapse> {
    if n >= c.cap() {
        let cat = Arc::new(include(&c, n.max(c.cap()))?);
        let partition = congruence(&c, c.cap().min(n));
        let eta = Functor::identity(cat.clone());
        let eta = Functor::from_map(c.clone(), cat.clone(), eta.table().to_vec())?;
        return Ok(Collapse { cat, partition, eta });
    }
    let part = congruence(&c, n);
    let full = c.to_raw();
    let mut raw = RawCategory::new(n);
    for k in 0..n {
        for i in 0..full.len(k) {
            let (s, t) = if k == 0 { (0, 0) } else { (full.src[k][i], full.tgt[k][i]) };
            raw.push(k, full.ids[k][i].clone(), s, t)?;
        }
        if k + 1 < n {
            raw.unit[k] = full.unit[k].clone();
        }
        raw.comp[k] = full.comp[k].clone();
    }
    for members in &part.classes {
        let rep = members
            .iter()
            .min_by(|&&a, &&b| full.ids[n][a as usize].cmp(&full.ids[n][b as usize]))
            .copied()
            .expect("classes are nonempty");
        let (s, t) = if n == 0 { (0, 0) } else { (full.src[n][rep as usize], full.tgt[n][rep as usize]) };
        raw.push(n, full.ids[n][rep as usize].clone(), s, t)?;
    }
    if n > 0 {
        for i in 0..full.len(n - 1) {
            let u = full.unit[n - 1][i].expect("units below the cap are stored");
            raw.set_unit_idx(n - 1, i as u32, part.class_of[u as usize]);
        }
        for p in 0..n {
            for (&(a, b), &r) in &full.comp[n][p] {
                let cl = |x: u32| part.class_of[x as usize];
                raw.set_comp_idx(n, p, cl(a), cl(b), cl(r));
            }
        }
    }
    let cat = Arc::new(raw.freeze()?);
    let rep = validate_category(&cat);
    if !rep.holds() {
        return Err(OmcError::Internal(format!("collapse is not a category: {}", rep.summary())));
    }
    let cc = cat.clone();
    let dom = c.clone();
    let eta = Functor::from_fn(c, cat.clone(), |x| {
        if x.dim < n {
            x
        } else {
            let b = dom.src_at(x, n);
            cc.unit_to(Cell::new(n, part.class_of[b.idx as usize]), x.dim)
        }
    })?;
    Ok(Collapse {
        cat,
        partition: part,
        eta,
    })
}

/// `G = 𝕀𝕊` on objects.
pub fn monad_g(c: &FiniteOmegaCat, n: usize) -> Result<FiniteOmegaCat> {
    collapse(c, n)
}

/// `𝕊f : 𝕊A → 𝕊B`, the unique functor with `η_A ; 𝕊f = f ; η_B`.
pub fn collapse_functor(f: &Functor, a: &Collapse, b: &Collapse) -> Result<Functor> {
    if *f.dom != *a.eta.dom || *f.cod != *b.eta.dom {
        return Err(OmcError::Invalid("collapses do not match the functor".into()));
    }
    let n = a.cat.cap();
    let dom = a.eta.dom.clone();
    Functor::from_fn(a.cat.clone(), b.cat.clone(), |x| {
        let pre = if x.dim < n {
            x
        } else if a.partition.level == n && x.dim == n && !a.partition.classes.is_empty() && dom.cap() > n {
            Cell::new(n, a.partition.classes[x.idx as usize][0])
        } else {
            dom.unit_to(Cell::new(n.min(dom.cap()), x.idx), x.dim)
        };
        b.eta.apply(f.apply(pre))
    })
}

/// Adjunction triangles for `𝕊 ⊣ 𝕀 ⊣ 𝕋` at one object.
pub fn triangle_report(x: Arc<FiniteOmegaCat>, n: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("adjunction_triangles");
    let sx = collapse_full(x.clone(), n)?;
    // 𝕊𝕀 = id on n-categories.
    let ssx = collapse(&include(&sx.cat, n)?, n)?;
    if ssx != *sx.cat {
        rep.violation("S-I-identity", vec![], "collapse of an included n-category changed it");
    }
    // 𝕋𝕀 = id.
    let t = truncate(&include(&sx.cat, n)?, n);
    if t != *sx.cat {
        rep.violation("T-I-identity", vec![], "truncation of an included n-category changed it");
    }
    // 𝕊η_X = id and η_{𝕀𝕊X} = id, so G(η_X) = 1.
    let again = collapse_full(sx.cat.clone(), n)?;
    if !again.eta.is_identity() {
        rep.violation("eta-on-image", vec![], "η on a collapsed category is not the identity");
    }
    let g_eta = collapse_functor(&sx.eta, &sx, &again)?;
    if !g_eta.is_identity() {
        rep.violation("G-eta", vec![], "G(η_X) is not the identity");
    }
    // Counit 𝕀𝕋X → X is a functor and 𝕋 of it is the identity.
    let tx = Arc::new(truncate(&x, n));
    let tt = tx.clone();
    let xx = x.clone();
    let counit = Functor::from_fn(tx.clone(), x.clone(), |c| {
        xx.find(c.dim, tt.id(c)).filter(|_| c.dim <= n).unwrap_or(c)
    })?;
    let r = crate::functor::validate_functor(&counit);
    if !r.holds() {
        rep.violation("counit", vec![], r.summary());
    }
    rep.count("collapsed_classes", sx.partition.classes.len() as u64);
    Ok(rep)
}

/// The collapsing map `∂O(n+1) → O(n)` sending both `s_n` and `t_n` to the
/// top cell.
pub fn collapsing_map(n: usize) -> Result<Functor> {
    let b = Arc::new(crate::polygraph::boundary_globe(n + 1));
    let g = Arc::new(crate::polygraph::globe(n));
    let (bb, gg) = (b.clone(), g.clone());
    Functor::from_fn(b, g, move |x| {
        let base = bb.base_of(x);
        let id = bb.id(base);
        let k: usize = id[1..].parse().expect("globe ids carry their dimension");
        let target = if k == n { format!("c{n}") } else { id.to_string() };
        gg.unit_to(gg.find(base.dim, &target).expect("globe cell"), x.dim)
    })
}

/// `𝕊(i_k)` is `i_k` for `k ≤ n`, the collapsing map for `k = n + 1` and an
/// identity above, each compared after the unique isomorphism of the
/// collapsed codomain with the expected globe.
pub fn collapse_inclusion_report(n: usize, max_k: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("collapse_of_inclusions");
    for k in 0..=max_k {
        let i = crate::polygraph::globe_inclusion(k);
        let sa = collapse_full(i.dom.clone(), n)?;
        let sb = collapse_full(i.cod.clone(), n)?;
        let si = collapse_functor(&i, &sa, &sb)?;
        let (dom_expect, cod_expect, expect) = if k <= n {
            (i.dom.clone(), i.cod.clone(), i.clone())
        } else if k == n + 1 {
            let m = collapsing_map(n)?;
            (m.dom.clone(), m.cod.clone(), m)
        } else {
            let g = Arc::new(crate::polygraph::globe(n));
            (g.clone(), g.clone(), Functor::identity(g))
        };
        let name = format!("i_{k}");
        let (Some(a), Some(b)) = (
            crate::search::find_isomorphism(si.dom.clone(), dom_expect)?,
            crate::search::find_isomorphism(si.cod.clone(), cod_expect)?,
        ) else {
            rep.violation("shape", vec![name], "collapsed globes have the wrong shape");
            continue;
        };
        if !si.then(&b)?.same_map(&a.then(&expect)?) {
            rep.violation("map", vec![name], "collapsed inclusion differs from the expected map");
        }
        rep.count("inclusions", 1);
    }
    Ok(rep)
}

/// `λ_X = GΓ(η_X) : GΓX → ΓGX`, with the check that `ΓGX` is already
/// n-truncated.
#[derive(Debug, Clone)]
pub struct LambdaNat {
    pub gamma_x: GammaCat,
    pub gamma_gx: GammaCat,
    pub g_gamma_x: Collapse,
    pub lambda: Functor,
}

pub fn lambda_nat(x: Arc<FiniteOmegaCat>, n: usize, budget: usize) -> Result<LambdaNat> {
    let sx = collapse_full(x.clone(), n)?;
    let gamma_x = crate::gamma::gamma_with_budget(x, budget)?;
    let gamma_gx = crate::gamma::gamma_with_budget(sx.cat.clone(), budget)?;
    let g_eta = gamma_functor(&sx.eta, &gamma_x, &gamma_gx)?;
    let g_gamma_x = collapse_full(gamma_x.cat.clone(), n)?;
    let g_gamma_gx = collapse_full(gamma_gx.cat.clone(), n)?;
    if *g_gamma_gx.cat != *gamma_gx.cat {
        return Err(OmcError::Internal("ΓGX is not n-truncated".into()));
    }
    let l = collapse_functor(&g_eta, &g_gamma_x, &g_gamma_gx)?;
    let lambda = Functor::from_map(g_gamma_x.cat.clone(), gamma_gx.cat.clone(), l.table().to_vec())?;
    Ok(LambdaNat {
        gamma_x,
        gamma_gx,
        g_gamma_x,
        lambda,
    })
}

/// `G(Top_X) = λ_X ; Top_{GX}` and the same for `Bot`, plus functoriality
/// of `λ_X`.
pub fn lambda_report(l: &LambdaNat, n: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("lambda");
    let r = crate::functor::validate_functor(&l.lambda);
    if !r.holds() {
        rep.violation("functor", vec![], r.summary());
    }
    let sx = collapse_full(l.gamma_x.base.clone(), n)?;
    for (name, leg, leg_g) in [
        ("top", &l.gamma_x.top, &l.gamma_gx.top),
        ("bot", &l.gamma_x.bot, &l.gamma_gx.bot),
    ] {
        let g_leg = collapse_functor(leg, &l.g_gamma_x, &sx)?;
        let via = l.lambda.then(leg_g)?;
        if !g_leg.same_map(&via) {
            rep.violation("leg-compat", vec![name.into()], "G(leg) differs from λ ; leg");
        }
    }
    Ok(rep)
}

/// Naturality of `λ` along `f : X → Y`: `G Γ f ; λ_Y = λ_X ; Γ G f`.
pub fn lambda_naturality(f: &Functor, lx: &LambdaNat, ly: &LambdaNat, n: usize) -> Result<bool> {
    let gf = gamma_functor(f, &lx.gamma_x, &ly.gamma_x)?;
    let ggf = collapse_functor(&gf, &lx.g_gamma_x, &ly.g_gamma_x)?;
    let sx = collapse_full(f.dom.clone(), n)?;
    let sy = collapse_full(f.cod.clone(), n)?;
    let sf = collapse_functor(f, &sx, &sy)?;
    let sf = Functor::from_map(lx.gamma_gx.base.clone(), ly.gamma_gx.base.clone(), sf.table().to_vec())?;
    let gsf = gamma_functor(&sf, &lx.gamma_gx, &ly.gamma_gx)?;
    let a = ggf.then(&ly.lambda)?;
    let b = lx.lambda.then(&gsf)?;
    Ok(a.same_map(&b))
}

/// Equivalence of 1-categories decided directly: full, faithful and
/// essentially surjective, with isomorphisms found by search.
pub fn is_equivalence_of_categories(f: &Functor) -> Result<bool> {
    let (a, b) = (&*f.dom, &*f.cod);
    if a.cap() > 1 || b.cap() > 1 {
        return Err(OmcError::Unsupported("equivalence of categories needs cap at most 1".into()));
    }
    for x in a.objects() {
        for y in a.objects() {
            let (fx, fy) = (f.apply(x), f.apply(y));
            let mut imgs: Vec<u32> = a.hom(x, y).map(|u| f.apply(u).idx).collect();
            let total = imgs.len();
            imgs.sort_unstable();
            imgs.dedup();
            if imgs.len() != total || total != b.hom_len(fx, fy) {
                return Ok(false);
            }
        }
    }
    let is_iso = |u: Cell| {
        let (s, t) = (b.src(u), b.tgt(u));
        b.hom(t, s).any(|v| b.comp(0, u, v) == Some(b.unit(s)) && b.comp(0, v, u) == Some(b.unit(t)))
    };
    for y in b.objects() {
        let hit = a.objects().any(|x| {
            let fx = f.apply(x);
            fx == y || b.hom(fx, y).any(is_iso)
        });
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::is_weak_equivalence;
    use crate::fixtures;
    use crate::polygraph::{boundary_globe, globe};
    use crate::search::{enumerate_functors, find_isomorphism};

    #[test]
    fn collapse_walking_arrow_is_terminal() {
        let c = collapse(&fixtures::walking_arrow(), 0).unwrap();
        assert!(find_isomorphism(Arc::new(c), Arc::new(fixtures::terminal())).unwrap().is_some());
    }

    #[test]
    fn truncated_two_globe_is_boundary() {
        let t = truncate(&globe(2), 1);
        assert!(validate_category(&t).holds());
        assert!(find_isomorphism(Arc::new(t), Arc::new(boundary_globe(2))).unwrap().is_some());
    }

    #[test]
    fn collapse_of_globes() {
        for n in 0..=2 {
            for k in 0..=3 {
                let s = Arc::new(collapse(&globe(k), n).unwrap());
                let expect = Arc::new(globe(k.min(n)));
                assert!(find_isomorphism(s, expect).unwrap().is_some(), "k = {k}, n = {n}");
                let sb = Arc::new(collapse(&boundary_globe(k), n).unwrap());
                let eb = Arc::new(if k <= n + 1 { boundary_globe(k) } else { globe(n) });
                assert!(find_isomorphism(sb, eb).unwrap().is_some(), "∂ k = {k}, n = {n}");
            }
        }
    }

    #[test]
    fn collapsed_inclusions() {
        for n in 0..=2 {
            let r = collapse_inclusion_report(n, n + 2).unwrap();
            assert!(r.holds(), "n = {n}: {}", r.summary());
            assert_eq!(r.stats["inclusions"], n as u64 + 3);
        }
    }

    #[test]
    fn triangles_on_fixtures() {
        for c in [fixtures::interval_iso(), fixtures::walking_arrow(), globe(2), globe(3)] {
            for n in 0..=2 {
                let r = triangle_report(Arc::new(c.clone()), n).unwrap();
                assert!(r.holds(), "{}", r.summary());
            }
        }
    }

    #[test]
    fn equivalence_decider_matches_weq() {
        let cats = [
            fixtures::terminal(),
            fixtures::interval_iso(),
            fixtures::walking_arrow(),
            fixtures::discrete(2),
        ];
        for a in &cats {
            for b in &cats {
                let (a, b) = (Arc::new(a.clone()), Arc::new(b.clone()));
                for f in enumerate_functors(a.clone(), b.clone(), 100).unwrap() {
                    assert_eq!(is_equivalence_of_categories(&f).unwrap(), is_weak_equivalence(&f).holds());
                }
            }
        }
    }

    #[test]
    fn lambda_on_interval() {
        let x = Arc::new(fixtures::interval_iso());
        for n in 0..=1 {
            let l = lambda_nat(x.clone(), n, 50_000).unwrap();
            let r = lambda_report(&l, n).unwrap();
            assert!(r.holds(), "{}", r.summary());
        }
        let l = lambda_nat(x, 1, 50_000).unwrap();
        assert!(l.lambda.is_identity() || l.lambda.dom == l.lambda.cod);
    }
}
