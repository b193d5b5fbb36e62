use std::sync::Arc;

use crate::category::{Cell, FiniteOmegaCat};
use crate::cylinder::{
    act_left, act_right, compose, concat, ext_act_left, ext_act_right, map_cylinder, mult, mult_raw, source,
    source_at, target, target_at, triv, unit, Cylinder, CylinderEnumerator,
};
use crate::equivalence::EqvTable;
use crate::error::{OmcError, Result};
use crate::functor::{validate_functor, Functor};
use crate::gamma::{gamma_functor, gamma_with_eqv, gamma_structure_report, GammaCat};
use crate::report::CheckReport;
use crate::search::enumerate_functors;

#[derive(Debug, Clone, Copy)]
pub struct LawConfig {
    /// Checked instances per law and category.
    pub per_law: usize,
    pub cylinder_budget: usize,
    /// Sampled functors for the Γf laws.
    pub functors: usize,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            per_law: 300,
            cylinder_budget: 20_000,
            functors: 4,
        }
    }
}

pub const LAWS: &[&str] = &[
    "bimodularity",
    "extended-bimodularity",
    "distributivity-concat",
    "distributivity-triv",
    "extended-distributivity",
    "concat-associativity",
    "concat-units",
    "concat-source-target",
    "gamma-f-concat",
    "gamma-f-triv",
    "gamma-f-compose",
    "gamma-f-unit",
    "gamma-f-functor",
    "mult-associativity",
    "mult-concat",
    "mult-triv",
    "representability",
    "commutation",
    "compose-associativity",
    "compose-units",
    "compose-source-target",
    "unit-source-target",
    "triv-compose",
    "triv-unit",
    "distributivity-compose",
    "distributivity-unit",
    "concat-compose",
    "concat-unit",
    "mult-compose",
    "mult-unit",
    "action-compose",
    "action-unit",
    "interchange",
    "interchange-units",
    "iterated-units",
    "gamma-category",
    "naturality",
];

struct Ctx<'a> {
    c: &'a FiniteOmegaCat,
    cfg: LawConfig,
    rep: CheckReport,
    seen: Vec<u64>,
    /// `cyl[d][n]`: n-cylinders at depth d.
    cyl: Vec<Vec<Vec<Cylinder>>>,
}

impl<'a> Ctx<'a> {
    fn slot(&self, law: &str) -> usize {
        LAWS.iter().position(|l| *l == law).expect("registered law")
    }

    fn full(&self, law: &str) -> bool {
        self.seen[self.slot(law)] as usize >= self.cfg.per_law
    }

    fn eq(&mut self, law: &str, lhs: Result<Cylinder>, rhs: Result<Cylinder>, names: impl FnOnce() -> Vec<String>) {
        let i = self.slot(law);
        self.seen[i] += 1;
        match (lhs, rhs) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(a), Ok(b)) => {
                let detail = format!("{} ≠ {}", a.describe(self.c), b.describe(self.c));
                self.rep.violation(law, names(), detail);
            }
            (Err(e), _) | (_, Err(e)) => self.rep.violation(law, names(), format!("undefined side: {e}")),
        }
    }

    fn truth(&mut self, law: &str, ok: bool, names: impl FnOnce() -> Vec<String>, detail: &str) {
        let i = self.slot(law);
        self.seen[i] += 1;
        if !ok {
            self.rep.violation(law, names(), detail.to_string());
        }
    }

    fn d_cells(&self, d: usize) -> Vec<Cell> {
        let c = self.c;
        c.cells(d.min(c.cap())).map(|x| c.unit_to(x, d)).collect()
    }

    fn all_at_depth(&self, d: usize) -> Vec<&Cylinder> {
        self.cyl.get(d).map(|v| v.iter().flatten().collect()).unwrap_or_default()
    }
}

fn ok<T>(r: Result<T>) -> Option<T> {
    r.ok()
}

/// Every identity of the cylinder calculus on all cylinders of `x` within
/// budget, up to `per_law` instances each.
pub fn cylinder_laws(x: Arc<FiniteOmegaCat>, cfg: LawConfig) -> Result<CheckReport> {
    let eqv = Arc::new(EqvTable::new(x.clone()));
    let c = &*x;
    let en = CylinderEnumerator::new(&eqv, cfg.cylinder_budget);
    let mut cyl = Vec::new();
    for d in 0..=c.cap() {
        let mut row = Vec::new();
        for n in 0..=c.cap() - d {
            let mut v = en.all_at(d, n)?;
            v.sort();
            row.push(v);
        }
        cyl.push(row);
    }
    let mut ctx = Ctx {
        c,
        cfg,
        rep: CheckReport::new("cylinder_laws"),
        seen: vec![0; LAWS.len()],
        cyl,
    };
    let g = gamma_with_eqv(eqv.clone(), cfg.cylinder_budget)?;
    let gr = gamma_structure_report(&g);
    ctx.truth("gamma-category", gr.holds(), Vec::new, &gr.summary());

    for d in 1..=c.cap() {
        actions(&mut ctx, d)?;
        multiplication(&mut ctx, d)?;
    }
    for d in 0..=c.cap() {
        concatenation(&mut ctx, d)?;
        compositions(&mut ctx, d)?;
        triv_laws(&mut ctx, d)?;
    }
    for d in 1..=c.cap() {
        action_compositions(&mut ctx, d)?;
    }
    functor_laws(&mut ctx, x.clone(), &g)?;
    for (law, n) in LAWS.iter().zip(&ctx.seen) {
        ctx.rep.count(law, *n);
    }
    Ok(ctx.rep)
}

fn actions(ctx: &mut Ctx, d: usize) -> Result<()> {
    let c = ctx.c;
    let p = d - 1;
    let cells = ctx.d_cells(d);
    let cyls: Vec<Cylinder> = ctx.all_at_depth(d).into_iter().cloned().collect();
    for w in &cyls {
        let (ws, wt) = (c.src_at(w.top, p), c.tgt_at(w.top, p));
        for &v in cells.iter().filter(|&&v| c.tgt(v) == ws) {
            for &u in cells.iter().filter(|&&u| c.tgt(u) == c.src(v)) {
                if ctx.full("bimodularity") {
                    break;
                }
                let uv = c.comp_or_err(p, u, v);
                ctx.eq(
                    "bimodularity",
                    uv.and_then(|uv| act_left(c, uv, w)),
                    act_left(c, v, w).and_then(|vw| act_left(c, u, &vw)),
                    || vec![c.name(u), c.name(v), ctx_name(c, w)],
                );
            }
            for &z in cells.iter().filter(|&&z| c.src(z) == wt) {
                if ctx.full("bimodularity") {
                    break;
                }
                ctx.eq(
                    "bimodularity",
                    act_left(c, v, w).and_then(|vw| act_right(c, &vw, z)),
                    act_right(c, w, z).and_then(|wz| act_left(c, v, &wz)),
                    || vec![c.name(v), ctx_name(c, w), c.name(z)],
                );
            }
        }
        for &v in cells.iter().filter(|&&v| c.src(v) == wt) {
            for &z in cells.iter().filter(|&&z| c.src(z) == c.tgt(v)) {
                if ctx.full("bimodularity") {
                    break;
                }
                ctx.eq(
                    "bimodularity",
                    act_right(c, w, v).and_then(|wv| act_right(c, &wv, z)),
                    c.comp_or_err(p, v, z).and_then(|vz| act_right(c, w, vz)),
                    || vec![ctx_name(c, w), c.name(v), c.name(z)],
                );
            }
        }
        if !ctx.full("bimodularity") {
            ctx.eq("bimodularity", act_left(c, c.unit(ws), w), Ok(w.clone()), || vec![ctx_name(c, w)]);
            ctx.eq("bimodularity", act_right(c, w, c.unit(wt)), Ok(w.clone()), || vec![ctx_name(c, w)]);
        }

        // Extended actions by cells of every dimension up to the top.
        let k_max = w.top.dim;
        for k in d..=k_max {
            if ctx.full("extended-bimodularity") {
                break;
            }
            let hi = ctx.d_cells(k);
            for &v in hi.iter().filter(|&&v| c.tgt_at(v, p) == ws && c.src_at(v, p.saturating_sub(1)) == c.src_at(ws, p.saturating_sub(1))) {
                for &u in hi.iter().filter(|&&u| c.tgt_at(u, p) == c.src_at(v, p)) {
                    if ctx.full("extended-bimodularity") {
                        break;
                    }
                    let Some(uv) = ok(c.comp_or_err(p, u, v)) else { continue };
                    ctx.eq(
                        "extended-bimodularity",
                        ext_act_left(c, uv, w),
                        ext_act_left(c, v, w).and_then(|vw| ext_act_left(c, u, &vw)),
                        || vec![c.name(u), c.name(v), ctx_name(c, w)],
                    );
                }
                for &z in hi.iter().filter(|&&z| c.src_at(z, p) == wt) {
                    if ctx.full("extended-bimodularity") {
                        break;
                    }
                    let (Some(l), Some(r)) = (
                        ok(ext_act_left(c, v, w).and_then(|vw| ext_act_right(c, &vw, z))),
                        ok(ext_act_right(c, w, z).and_then(|wz| ext_act_left(c, v, &wz))),
                    ) else {
                        continue;
                    };
                    ctx.eq("extended-bimodularity", Ok(l), Ok(r), || vec![c.name(v), ctx_name(c, w), c.name(z)]);
                }
            }
        }

        // Representability: componentwise action is multiplication by a
        // trivial cylinder.
        for &u in cells.iter().filter(|&&u| c.tgt(u) == ws) {
            if ctx.full("representability") {
                break;
            }
            let t = triv(c, d, c.unit_to(u, w.top.dim));
            ctx.eq(
                "representability",
                act_left(c, u, w),
                t.and_then(|t| mult_raw(c, &t, w)),
                || vec![c.name(u), ctx_name(c, w)],
            );
        }
        for &u in cells.iter().filter(|&&u| c.src(u) == wt) {
            if ctx.full("representability") {
                break;
            }
            let t = triv(c, d, c.unit_to(u, w.top.dim));
            ctx.eq(
                "representability",
                act_right(c, w, u),
                t.and_then(|t| mult_raw(c, w, &t)),
                || vec![ctx_name(c, w), c.name(u)],
            );
        }
    }

    // Distributivity over concatenation and trivial cylinders.
    for v in &cyls {
        let ws = c.src_at(v.top, p);
        let wt = c.tgt_at(v.top, p);
        let nexts: Vec<&Cylinder> = cyls.iter().filter(|w| w.dim() == v.dim() && w.top == v.bottom).collect();
        for w in nexts {
            let Some(vw) = ok(concat(c, v, w)) else { continue };
            for k in d..=v.top.dim {
                let hi = ctx.d_cells(k);
                for &u in hi.iter().filter(|&&u| c.tgt_at(u, p) == ws) {
                    let law = if k == d { "distributivity-concat" } else { "extended-distributivity" };
                    if ctx.full(law) {
                        break;
                    }
                    let Some(l) = ok(ext_act_left(c, u, &vw)) else { continue };
                    let r = ext_act_left(c, u, v)
                        .and_then(|a| ext_act_left(c, u, w).and_then(|b| concat(c, &a, &b)));
                    if k == d {
                        let direct = act_left(c, u, v).and_then(|a| act_left(c, u, w).and_then(|b| concat(c, &a, &b)));
                        ctx.eq(law, act_left(c, u, &vw), direct, || vec![c.name(u), ctx_name(c, v), ctx_name(c, w)]);
                    } else {
                        ctx.eq(law, Ok(l), r, || vec![c.name(u), ctx_name(c, v), ctx_name(c, w)]);
                    }
                }
                for &u in hi.iter().filter(|&&u| c.src_at(u, p) == wt) {
                    let law = if k == d { "distributivity-concat" } else { "extended-distributivity" };
                    if ctx.full(law) {
                        break;
                    }
                    let Some(l) = ok(ext_act_right(c, &vw, u)) else { continue };
                    let r = ext_act_right(c, v, u)
                        .and_then(|a| ext_act_right(c, w, u).and_then(|b| concat(c, &a, &b)));
                    ctx.eq(law, Ok(l), r, || vec![ctx_name(c, v), ctx_name(c, w), c.name(u)]);
                }
            }
        }
    }
    for k in d..=c.cap() {
        let hi = ctx.d_cells(k);
        for &v in &hi {
            for &u in cells.iter().filter(|&&u| c.tgt(u) == c.src_at(v, p)) {
                if ctx.full("distributivity-triv") {
                    break;
                }
                let Some(uv) = ok(c.comp_or_err(p, u, v)) else { continue };
                ctx.eq(
                    "distributivity-triv",
                    triv(c, d, v).and_then(|t| act_left(c, u, &t)),
                    triv(c, d, uv),
                    || vec![c.name(u), c.name(v)],
                );
            }
            for &u in cells.iter().filter(|&&u| c.src(u) == c.tgt_at(v, p)) {
                if ctx.full("distributivity-triv") {
                    break;
                }
                let Some(vu) = ok(c.comp_or_err(p, v, u)) else { continue };
                ctx.eq(
                    "distributivity-triv",
                    triv(c, d, v).and_then(|t| act_right(c, &t, u)),
                    triv(c, d, vu),
                    || vec![c.name(v), c.name(u)],
                );
            }
        }
    }
    Ok(())
}

fn ctx_name(c: &FiniteOmegaCat, u: &Cylinder) -> String {
    u.describe(c)
}

fn multipliable(c: &FiniteOmegaCat, u: &Cylinder, v: &Cylinder) -> bool {
    let p = u.depth - 1;
    u.depth == v.depth && u.dim() == v.dim() && c.tgt_at(u.top, p) == c.src_at(v.top, p)
}

fn multiplication(ctx: &mut Ctx, d: usize) -> Result<()> {
    let c = ctx.c;
    let p = d - 1;
    let rows: Vec<Vec<Cylinder>> = ctx.cyl[d].clone();
    for row in &rows {
        for u in row {
            for v in row.iter().filter(|v| multipliable(c, u, v)) {
                if !ctx.full("commutation") {
                    let r = mult(c, u, v);
                    ctx.eq("commutation", r, mult_raw(c, u, v), || vec![ctx_name(c, u), ctx_name(c, v)]);
                }
                for w in row.iter().filter(|w| multipliable(c, v, w)) {
                    if ctx.full("mult-associativity") {
                        break;
                    }
                    ctx.eq(
                        "mult-associativity",
                        mult_raw(c, u, v).and_then(|uv| mult_raw(c, &uv, w)),
                        mult_raw(c, v, w).and_then(|vw| mult_raw(c, u, &vw)),
                        || vec![ctx_name(c, u), ctx_name(c, v), ctx_name(c, w)],
                    );
                }
                // (U ⋄ U') ⊛ (V ⋄ V') = (U ⊛ V) ⋄ (U' ⊛ V')
                if ctx.full("mult-concat") {
                    continue;
                }
                for u2 in row.iter().filter(|x| x.top == u.bottom) {
                    for v2 in row.iter().filter(|x| x.top == v.bottom) {
                        if ctx.full("mult-concat") || !multipliable(c, u2, v2) {
                            continue;
                        }
                        let (Some(uu), Some(vv)) = (ok(concat(c, u, u2)), ok(concat(c, v, v2))) else { continue };
                        ctx.eq(
                            "mult-concat",
                            mult_raw(c, &uu, &vv),
                            mult_raw(c, u, v).and_then(|a| mult_raw(c, u2, v2).and_then(|b| concat(c, &a, &b))),
                            || vec![ctx_name(c, u), ctx_name(c, u2), ctx_name(c, v), ctx_name(c, v2)],
                        );
                    }
                }
            }
        }
    }
    for k in d..=c.cap() {
        let hi = ctx.d_cells(k);
        for &u in &hi {
            for &v in hi.iter().filter(|&&v| c.src_at(v, p) == c.tgt_at(u, p)) {
                if ctx.full("mult-triv") {
                    break;
                }
                let Some(uv) = ok(c.comp_or_err(p, u, v)) else { continue };
                ctx.eq(
                    "mult-triv",
                    triv(c, d, u).and_then(|a| triv(c, d, v).and_then(|b| mult_raw(c, &a, &b))),
                    triv(c, d, uv),
                    || vec![c.name(u), c.name(v)],
                );
            }
        }
    }
    Ok(())
}

fn concatenation(ctx: &mut Ctx, d: usize) -> Result<()> {
    let c = ctx.c;
    let rows: Vec<Vec<Cylinder>> = ctx.cyl[d].clone();
    for (n, row) in rows.iter().enumerate() {
        for u in row {
            if !ctx.full("concat-units") {
                ctx.eq(
                    "concat-units",
                    triv(c, d, u.top).and_then(|t| concat(c, &t, u)),
                    Ok(u.clone()),
                    || vec![ctx_name(c, u)],
                );
                ctx.eq(
                    "concat-units",
                    triv(c, d, u.bottom).and_then(|t| concat(c, u, &t)),
                    Ok(u.clone()),
                    || vec![ctx_name(c, u)],
                );
            }
            for v in row.iter().filter(|v| v.top == u.bottom) {
                let Some(uv) = ok(concat(c, u, v)) else {
                    ctx.truth("concat-associativity", false, || vec![ctx_name(c, u), ctx_name(c, v)], "consecutive cylinders do not concatenate");
                    continue;
                };
                if n > 0 && !ctx.full("concat-source-target") {
                    ctx.eq(
                        "concat-source-target",
                        source(c, &uv),
                        source(c, u).and_then(|a| source(c, v).and_then(|b| concat(c, &a, &b))),
                        || vec![ctx_name(c, u), ctx_name(c, v)],
                    );
                    ctx.eq(
                        "concat-source-target",
                        target(c, &uv),
                        target(c, u).and_then(|a| target(c, v).and_then(|b| concat(c, &a, &b))),
                        || vec![ctx_name(c, u), ctx_name(c, v)],
                    );
                }
                for w in row.iter().filter(|w| w.top == v.bottom) {
                    if ctx.full("concat-associativity") {
                        break;
                    }
                    ctx.eq(
                        "concat-associativity",
                        concat(c, &uv, w),
                        concat(c, v, w).and_then(|vw| concat(c, u, &vw)),
                        || vec![ctx_name(c, u), ctx_name(c, v), ctx_name(c, w)],
                    );
                }
            }
        }
    }
    Ok(())
}

fn composable(c: &FiniteOmegaCat, p: usize, u: &Cylinder, v: &Cylinder) -> bool {
    u.depth == v.depth
        && u.dim() == v.dim()
        && p < u.dim()
        && target_at(c, u, p).ok() == source_at(c, v, p).ok()
}

fn compositions(ctx: &mut Ctx, d: usize) -> Result<()> {
    let c = ctx.c;
    let rows: Vec<Vec<Cylinder>> = ctx.cyl[d].clone();
    for (m, row) in rows.iter().enumerate() {
        for p in 0..m {
            for u in row {
                if !ctx.full("compose-units") {
                    let s = source_at(c, u, p)?;
                    let t = target_at(c, u, p)?;
                    ctx.eq(
                        "compose-units",
                        unit(c, &s, m).and_then(|us| compose(c, p, &us, u)),
                        Ok(u.clone()),
                        || vec![ctx_name(c, u)],
                    );
                    ctx.eq(
                        "compose-units",
                        unit(c, &t, m).and_then(|ut| compose(c, p, u, &ut)),
                        Ok(u.clone()),
                        || vec![ctx_name(c, u)],
                    );
                }
                for v in row.iter().filter(|v| composable(c, p, u, v)) {
                    let uv = compose(c, p, u, v);
                    if !ctx.full("compose-source-target") {
                        if p + 1 < m {
                            ctx.eq(
                                "compose-source-target",
                                uv.clone().and_then(|x| source(c, &x)),
                                source(c, u).and_then(|a| source(c, v).and_then(|b| compose(c, p, &a, &b))),
                                || vec![ctx_name(c, u), ctx_name(c, v)],
                            );
                        } else {
                            ctx.eq(
                                "compose-source-target",
                                uv.clone().and_then(|x| source(c, &x)),
                                source(c, u),
                                || vec![ctx_name(c, u), ctx_name(c, v)],
                            );
                            ctx.eq(
                                "compose-source-target",
                                uv.clone().and_then(|x| target(c, &x)),
                                target(c, v),
                                || vec![ctx_name(c, u), ctx_name(c, v)],
                            );
                        }
                    }
                    let Ok(uv) = uv else {
                        ctx.truth("compose-associativity", false, || vec![ctx_name(c, u), ctx_name(c, v)], "composable cylinders do not compose");
                        continue;
                    };
                    for w in row.iter().filter(|w| composable(c, p, v, w)) {
                        if ctx.full("compose-associativity") {
                            break;
                        }
                        ctx.eq(
                            "compose-associativity",
                            compose(c, p, &uv, w),
                            compose(c, p, v, w).and_then(|vw| compose(c, p, u, &vw)),
                            || vec![ctx_name(c, u), ctx_name(c, v), ctx_name(c, w)],
                        );
                    }
                    // Interchange with a second composition along q > p.
                    for q in p + 1..m {
                        if ctx.full("interchange") {
                            break;
                        }
                        for u2 in row.iter().filter(|x| composable(c, q, u, x)) {
                            for v2 in row.iter().filter(|x| composable(c, q, v, x)) {
                                if ctx.full("interchange") || !composable(c, p, u2, v2) {
                                    continue;
                                }
                                let lhs = compose(c, q, u, u2)
                                    .and_then(|a| compose(c, q, v, v2).and_then(|b| compose(c, p, &a, &b)));
                                let rhs = compose(c, p, u2, v2).and_then(|b| compose(c, q, &uv, &b));
                                ctx.eq("interchange", lhs, rhs, || {
                                    vec![ctx_name(c, u), ctx_name(c, u2), ctx_name(c, v), ctx_name(c, v2)]
                                });
                            }
                        }
                    }
                }
            }
        }
        // Units: source and target, iterated units, units versus compositions.
        for u in row {
            for k in m + 1..=c.cap().saturating_sub(d).max(m + 1) {
                if ctx.full("unit-source-target") {
                    break;
                }
                let uk = unit(c, u, k);
                let lower = if k == m + 1 { Ok(u.clone()) } else { unit(c, u, k - 1) };
                ctx.eq("unit-source-target", uk.clone().and_then(|x| source(c, &x)), lower.clone(), || vec![ctx_name(c, u)]);
                ctx.eq("unit-source-target", uk.and_then(|x| target(c, &x)), lower, || vec![ctx_name(c, u)]);
                for j in m + 1..k {
                    if ctx.full("iterated-units") {
                        break;
                    }
                    ctx.eq(
                        "iterated-units",
                        unit(c, u, j).and_then(|x| unit(c, &x, k)),
                        unit(c, u, k),
                        || vec![ctx_name(c, u)],
                    );
                }
            }
            for p in 0..m {
                let k = m + 1;
                for v in row.iter().filter(|v| composable(c, p, u, v)) {
                    if ctx.full("interchange-units") {
                        break;
                    }
                    ctx.eq(
                        "interchange-units",
                        unit(c, u, k).and_then(|a| unit(c, v, k).and_then(|b| compose(c, p, &a, &b))),
                        compose(c, p, u, v).and_then(|uv| unit(c, &uv, k)),
                        || vec![ctx_name(c, u), ctx_name(c, v)],
                    );
                }
            }
        }
        // Concatenation against compositions and units.
        for p in 0..m {
            for u in row {
                for v in row.iter().filter(|v| composable(c, p, u, v)) {
                    if ctx.full("concat-compose") {
                        break;
                    }
                    for u2 in row.iter().filter(|x| x.top == u.bottom) {
                        for v2 in row.iter().filter(|x| x.top == v.bottom && composable(c, p, u2, x)) {
                            if ctx.full("concat-compose") {
                                break;
                            }
                            let lhs = compose(c, p, u, v)
                                .and_then(|a| compose(c, p, u2, v2).and_then(|b| concat(c, &a, &b)));
                            let rhs = concat(c, u, u2)
                                .and_then(|a| concat(c, v, v2).and_then(|b| compose(c, p, &a, &b)));
                            ctx.eq("concat-compose", lhs, rhs, || {
                                vec![ctx_name(c, u), ctx_name(c, v), ctx_name(c, u2), ctx_name(c, v2)]
                            });
                        }
                    }
                }
            }
        }
        for s in row {
            for t in row.iter().filter(|t| t.top == s.bottom) {
                if ctx.full("concat-unit") {
                    break;
                }
                let k = m + 1;
                ctx.eq(
                    "concat-unit",
                    unit(c, s, k).and_then(|a| unit(c, t, k).and_then(|b| concat(c, &a, &b))),
                    concat(c, s, t).and_then(|st| unit(c, &st, k)),
                    || vec![ctx_name(c, s), ctx_name(c, t)],
                );
            }
        }
    }
    Ok(())
}

fn triv_laws(ctx: &mut Ctx, d: usize) -> Result<()> {
    let c = ctx.c;
    for m in d + 1..=c.cap() {
        let cells = ctx.d_cells(m);
        for p in d..m {
            for &u in &cells {
                for &v in cells.iter().filter(|&&v| c.src_at(v, p) == c.tgt_at(u, p)) {
                    if ctx.full("triv-compose") {
                        break;
                    }
                    let Some(uv) = ok(c.comp_or_err(p, u, v)) else { continue };
                    ctx.eq(
                        "triv-compose",
                        triv(c, d, uv),
                        triv(c, d, u).and_then(|a| triv(c, d, v).and_then(|b| compose(c, p - d, &a, &b))),
                        || vec![c.name(u), c.name(v)],
                    );
                }
            }
        }
    }
    for k in d..=c.cap() {
        for x in ctx.d_cells(k) {
            for m in k + 1..=c.cap().max(k + 1) {
                if ctx.full("triv-unit") {
                    break;
                }
                ctx.eq(
                    "triv-unit",
                    triv(c, d, c.unit_to(x, m)),
                    triv(c, d, x).and_then(|t| unit(c, &t, m - d)),
                    || vec![c.name(x)],
                );
            }
        }
    }
    Ok(())
}

fn action_compositions(ctx: &mut Ctx, d: usize) -> Result<()> {
    let c = ctx.c;
    let p0 = d - 1;
    let rows: Vec<Vec<Cylinder>> = ctx.cyl[d].clone();
    let cells = ctx.d_cells(d);
    for (m, row) in rows.iter().enumerate() {
        for n in 0..m {
            for v in row {
                let ws = c.src_at(v.top, p0);
                for w in row.iter().filter(|w| composable(c, n, v, w)) {
                    let Some(vw) = ok(compose(c, n, v, w)) else { continue };
                    for &u in cells.iter().filter(|&&u| c.tgt(u) == ws) {
                        if ctx.full("distributivity-compose") {
                            break;
                        }
                        ctx.eq(
                            "distributivity-compose",
                            act_left(c, u, &vw),
                            act_left(c, u, v).and_then(|a| act_left(c, u, w).and_then(|b| compose(c, n, &a, &b))),
                            || vec![c.name(u), ctx_name(c, v), ctx_name(c, w)],
                        );
                    }
                    // (u ∘ u') ⋆ (V ∘n W) = u ⋆ V ∘n u' ⋆ W with u, u' of
                    // the top dimension composed along d + n.
                    let top = ctx.d_cells(v.top.dim);
                    for &u in top.iter().filter(|&&u| c.tgt_at(u, p0) == ws) {
                        for &u2 in top.iter().filter(|&&u2| c.src_at(u2, d + n) == c.tgt_at(u, d + n)) {
                            if ctx.full("action-compose") {
                                break;
                            }
                            let Some(uu) = ok(c.comp_or_err(d + n, u, u2)) else { continue };
                            let Some(rhs) = ok(ext_act_left(c, u, v).and_then(|a| {
                                ext_act_left(c, u2, w).and_then(|b| compose(c, n, &a, &b))
                            })) else {
                                continue;
                            };
                            ctx.eq("action-compose", ext_act_left(c, uu, &vw), Ok(rhs), || {
                                vec![c.name(u), c.name(u2), ctx_name(c, v), ctx_name(c, w)]
                            });
                        }
                    }
                }
            }
            // (U ∘n U') ⊛ (V ∘n V') = (U ⊛ V) ∘n (U' ⊛ V')
            for u in row {
                for u2 in row.iter().filter(|x| composable(c, n, u, x)) {
                    for v in row.iter().filter(|x| multipliable(c, u, x)) {
                        if ctx.full("mult-compose") {
                            break;
                        }
                        for v2 in row.iter().filter(|x| composable(c, n, v, x) && multipliable(c, u2, x)) {
                            if ctx.full("mult-compose") {
                                break;
                            }
                            let lhs = compose(c, n, u, u2)
                                .and_then(|a| compose(c, n, v, v2).and_then(|b| mult_raw(c, &a, &b)));
                            let rhs = mult_raw(c, u, v)
                                .and_then(|a| mult_raw(c, u2, v2).and_then(|b| compose(c, n, &a, &b)));
                            ctx.eq("mult-compose", lhs, rhs, || {
                                vec![ctx_name(c, u), ctx_name(c, u2), ctx_name(c, v), ctx_name(c, v2)]
                            });
                        }
                    }
                }
            }
        }
        let k = m + 1;
        for v in row {
            let ws = c.src_at(v.top, p0);
            for &u in cells.iter().filter(|&&u| c.tgt(u) == ws) {
                if ctx.full("distributivity-unit") {
                    break;
                }
                ctx.eq(
                    "distributivity-unit",
                    unit(c, v, k).and_then(|x| act_left(c, u, &x)),
                    act_left(c, u, v).and_then(|x| unit(c, &x, k)),
                    || vec![c.name(u), ctx_name(c, v)],
                );
            }
            for t in row.iter().filter(|t| multipliable(c, v, t)) {
                if ctx.full("mult-unit") {
                    break;
                }
                ctx.eq(
                    "mult-unit",
                    unit(c, v, k).and_then(|a| unit(c, t, k).and_then(|b| mult_raw(c, &a, &b))),
                    mult_raw(c, v, t).and_then(|x| unit(c, &x, k)),
                    || vec![ctx_name(c, v), ctx_name(c, t)],
                );
            }
            // 1^{m+1} s ⋆ 1^m T = 1^m (s ⋆ T) for s of the dimension of Top T.
            let ss = ctx.d_cells(v.top.dim);
            for &s in ss.iter().filter(|&&s| c.tgt_at(s, p0) == ws) {
                if ctx.full("action-unit") {
                    break;
                }
                let Some(st) = ok(ext_act_left(c, s, v)) else { continue };
                ctx.eq(
                    "action-unit",
                    unit(c, v, k).and_then(|x| ext_act_left(c, c.unit(s), &x)),
                    unit(c, &st, k),
                    || vec![c.name(s), ctx_name(c, v)],
                );
            }
        }
    }
    Ok(())
}

fn functor_laws(ctx: &mut Ctx, x: Arc<FiniteOmegaCat>, g: &GammaCat) -> Result<()> {
    let mut fs: Vec<Functor> = vec![Functor::identity(x.clone())];
    match enumerate_functors(x.clone(), x.clone(), ctx.cfg.functors.max(1) * 8) {
        Ok(all) => {
            let step = (all.len() / ctx.cfg.functors.max(1)).max(1);
            fs.extend(all.into_iter().step_by(step).take(ctx.cfg.functors));
        }
        Err(OmcError::Budget(_)) => {}
        Err(e) => return Err(e),
    }
    let c = ctx.c;
    let rows: Vec<Vec<Vec<Cylinder>>> = ctx.cyl.clone();
    for f in &fs {
        let gf = gamma_functor(f, g, g)?;
        let r = validate_functor(&gf);
        ctx.truth("gamma-f-functor", r.holds(), Vec::new, &r.summary());
        let nat = gf.then(&g.top).ok().zip(g.top.then(f).ok()).is_some_and(|(a, b)| a.same_map(&b))
            && gf.then(&g.bot).ok().zip(g.bot.then(f).ok()).is_some_and(|(a, b)| a.same_map(&b))
            && f.then(&g.triv).ok().zip(g.triv.then(&gf).ok()).is_some_and(|(a, b)| a.same_map(&b));
        ctx.truth("naturality", nat, Vec::new, "Top, Bot or Triv is not natural");
        for (d, by_dim) in rows.iter().enumerate() {
            for (m, row) in by_dim.iter().enumerate() {
                for u in row {
                    if !ctx.full("gamma-f-unit") {
                        for k in m + 1..=m + 1 {
                            ctx.eq(
                                "gamma-f-unit",
                                unit(c, u, k).map(|x| map_cylinder(f, &x)),
                                unit(c, &map_cylinder(f, u), k),
                                || vec![ctx_name(c, u)],
                            );
                        }
                    }
                    for v in row.iter().filter(|v| v.top == u.bottom) {
                        if ctx.full("gamma-f-concat") {
                            break;
                        }
                        ctx.eq(
                            "gamma-f-concat",
                            concat(c, u, v).map(|x| map_cylinder(f, &x)),
                            concat(c, &map_cylinder(f, u), &map_cylinder(f, v)),
                            || vec![ctx_name(c, u), ctx_name(c, v)],
                        );
                    }
                    for p in 0..m {
                        for v in row.iter().filter(|v| composable(c, p, u, v)) {
                            if ctx.full("gamma-f-compose") {
                                break;
                            }
                            ctx.eq(
                                "gamma-f-compose",
                                compose(c, p, u, v).map(|x| map_cylinder(f, &x)),
                                compose(c, p, &map_cylinder(f, u), &map_cylinder(f, v)),
                                || vec![ctx_name(c, u), ctx_name(c, v)],
                            );
                        }
                    }
                }
            }
            for k in d..=c.cap() {
                for y in ctx.d_cells(k) {
                    if ctx.full("gamma-f-triv") {
                        break;
                    }
                    ctx.eq(
                        "gamma-f-triv",
                        triv(c, d, y).map(|t| map_cylinder(f, &t)),
                        triv(c, d, f.apply(y)),
                        || vec![c.name(y)],
                    );
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn laws_on_fixtures() {
        for c in [
            fixtures::terminal(),
            fixtures::interval_iso(),
            fixtures::walking_arrow(),
            crate::random::suspension(&fixtures::interval_iso()),
            crate::random::double_loop(2),
        ] {
            let r = cylinder_laws(Arc::new(c.clone()), LawConfig::default()).unwrap();
            assert!(r.holds(), "{}\n{}", c.describe(), r.summary());
        }
    }

    #[test]
    fn laws_are_exercised() {
        let c = Arc::new(crate::random::suspension(&crate::random::suspension(&fixtures::interval_iso())));
        let r = cylinder_laws(c, LawConfig::default()).unwrap();
        assert!(r.holds(), "{}", r.summary());
        for law in ["bimodularity", "concat-associativity", "compose-associativity", "commutation", "interchange"] {
            assert!(r.stats[law] > 0, "{law} never checked");
        }
    }
}
