use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::category::{Cell, FiniteOmegaCat};
use crate::cylinder::CylinderEnumerator;
use crate::equivalence::{congruence_suite, is_trivial_fibration, is_weak_equivalence, verify_witness, EqvTable};
use crate::error::{OmcError, Result};
use crate::functor::{validate_functor, Functor};
use crate::gamma::{gamma_structure_report, gamma_with_budget, DEFAULT_CYLINDER_BUDGET};
use crate::gluing::{charweq_with, check_top_bot_fibrations, glue_report, glue_with, transport, transport_oracle, Direction};
use crate::json::{self, category_to_value, functor_to_value, polygraph_to_value, polymorphism_to_value};
use crate::modelcheck::{certificate_report, find_lift_with_budget, immersion_implies_weq, is_immersion_with, lift_report, soa_stage, Immersion, Lift};
use crate::polygraph::{boundary_globe, free_category_with_budget, globe, globe_polygraph, pushout_polygraph, DEFAULT_FREE_BUDGET};
use crate::presentation::present_with_budget;
use crate::report::{CheckReport, Verdict};
use crate::search::{FunctorSearch, DEFAULT_NODE_BUDGET};
use crate::suite::{run_suite, SuiteConfig};
use crate::transfer::{collapse, include, truncate};
use crate::validate::validate_category;

/// Resource limits, overridable through `OMC_BUDGET_*` variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Cells of free and presented categories.
    pub cells: usize,
    /// Cylinders materialized for ΓX.
    pub cylinders: usize,
    /// Backtracking nodes in lifting searches.
    pub nodes: u64,
    /// Functors enumerated per pair in the suites.
    pub functors: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            cells: DEFAULT_FREE_BUDGET,
            cylinders: DEFAULT_CYLINDER_BUDGET,
            nodes: DEFAULT_NODE_BUDGET,
            functors: SuiteConfig::default().functor_limit,
        }
    }
}

impl Budgets {
    pub const VARS: [&'static str; 4] = ["OMC_BUDGET_CELLS", "OMC_BUDGET_CYLINDERS", "OMC_BUDGET_NODES", "OMC_BUDGET_FUNCTORS"];

    /// Reads overrides through `get`, so callers decide where values come from.
    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self> {
        let mut b = Budgets::default();
        for var in Self::VARS {
            let Some(raw) = get(var) else { continue };
            let n: u64 = raw
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| OmcError::Invalid(format!("{var} must be a positive integer, got {raw:?}")))?;
            match var {
                "OMC_BUDGET_CELLS" => b.cells = n as usize,
                "OMC_BUDGET_CYLINDERS" => b.cylinders = n as usize,
                "OMC_BUDGET_NODES" => b.nodes = n,
                _ => b.functors = n as usize,
            }
        }
        Ok(b)
    }

    pub fn from_env() -> Result<Self> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }
}

/// A command result: the JSON document to print and the verdict behind the
/// exit status.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub value: Value,
    pub verdict: Verdict,
}

impl Outcome {
    fn report(r: CheckReport) -> Self {
        Outcome {
            verdict: r.verdict,
            value: serde_json::to_value(&r).expect("reports serialize"),
        }
    }

    fn doc(value: Value) -> Self {
        Outcome {
            value,
            verdict: Verdict::Holds,
        }
    }

    fn with(value: Value, verdict: Verdict) -> Self {
        Outcome { value, verdict }
    }
}

/// Exit status: 0 holds, 1 fails, 2 inconclusive only, 3 usage or schema.
pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Holds => 0,
        Verdict::Fails => 1,
        Verdict::Inconclusive => 2,
    }
}

pub fn error_exit_code(e: &OmcError) -> i32 {
    match e {
        OmcError::Budget(_) | OmcError::Unsupported(_) => 2,
        OmcError::Internal(_) => 1,
        _ => 3,
    }
}

fn report_value(r: &CheckReport) -> Value {
    serde_json::to_value(r).expect("reports serialize")
}

fn cell(c: &FiniteOmegaCat, dim: usize, id: &str) -> Result<Cell> {
    c.cell(dim, id)
}

/// Checks a category, functor or polygraph document, dispatching on its
/// `schema` field.
pub fn validate(path: &Path) -> Result<Outcome> {
    let v = json::read_value(path)?;
    match v.get("schema").and_then(Value::as_str) {
        Some(json::FUNCTOR_SCHEMA) => {
            let f = json::functor_from_value(&v, path.parent())?;
            let mut r = validate_category(&f.dom);
            r.merge(validate_category(&f.cod));
            r.merge(validate_functor(&f));
            Ok(Outcome::report(r))
        }
        Some(json::POLYMORPHISM_SCHEMA) => {
            json::polymorphism_from_value(&v)?;
            Ok(Outcome::report(CheckReport::new("polymorphism")))
        }
        Some(json::SQUARE_SCHEMA) => {
            let p = json::square_from_value(&v, path.parent())?;
            let mut r = CheckReport::new("square");
            for f in [&p.i, &p.f, &p.top, &p.bottom] {
                r.merge(validate_functor(f));
            }
            Ok(Outcome::report(r))
        }
        Some(json::POLYGRAPH_SCHEMA) => {
            json::polygraph_from_value(&v)?;
            Ok(Outcome::report(CheckReport::new("polygraph")))
        }
        _ => Ok(Outcome::report(validate_category(&json::category_from_value(&v)?))),
    }
}

pub fn is_weq(f: &Functor) -> Outcome {
    Outcome::report(is_weak_equivalence(f))
}

pub fn is_tfib(f: &Functor) -> Outcome {
    Outcome::report(is_trivial_fibration(f))
}

/// `x ≋ y` with a checked certificate, or the ≋-classes of every dimension
/// together with the congruence checks.
pub fn eqv(c: FiniteOmegaCat, pair: Option<(usize, &str, &str)>) -> Result<Outcome> {
    let c = Arc::new(c);
    let e = EqvTable::new(c.clone());
    match pair {
        Some((dim, x, y)) => {
            let (x, y) = (cell(&c, dim, x)?, cell(&c, dim, y)?);
            if !c.parallel(x, y) {
                return Err(OmcError::Invalid(format!("{} and {} are not parallel", c.name(x), c.name(y))));
            }
            let w = e.witness(x, y);
            let checked = w.as_ref().is_some_and(|w| verify_witness(&c, x, y, w));
            let holds = e.equiv(x, y);
            if holds && !checked {
                return Err(OmcError::Internal("witness failed verification".into()));
            }
            Ok(Outcome::with(
                json!({"x": c.name(x), "y": c.name(y), "equivalent": holds, "witness": w}),
                Verdict::from_bool(holds),
            ))
        }
        None => {
            let mut classes = Vec::new();
            for k in 0..=c.cap() {
                let mut seen = vec![false; c.count(k)];
                for x in c.cells(k) {
                    if seen[x.idx as usize] {
                        continue;
                    }
                    let class: Vec<Cell> = c.cells(k).filter(|&y| c.parallel(x, y) && e.equiv(x, y)).collect();
                    for y in &class {
                        seen[y.idx as usize] = true;
                    }
                    classes.push(json!({"dim": k, "cells": class.iter().map(|&y| c.id(y)).collect::<Vec<_>>()}));
                }
            }
            let r = congruence_suite(&e);
            Ok(Outcome::with(json!({"classes": classes, "report": report_value(&r)}), r.verdict))
        }
    }
}

/// `ΓX` in `category.v1`, or its structure report.
pub fn gamma(c: FiniteOmegaCat, b: Budgets, report: bool) -> Result<Outcome> {
    let g = gamma_with_budget(Arc::new(c), b.cylinders)?;
    let mut r = gamma_structure_report(&g);
    r.merge(check_top_bot_fibrations(&g));
    Ok(if report {
        Outcome::report(r)
    } else {
        Outcome::with(category_to_value(&g.cat), r.verdict)
    })
}

/// `Glu f` in `category.v1`, or the gluing report.
pub fn glue(f: &Functor, b: Budgets, report: bool) -> Result<Outcome> {
    let gy = Arc::new(gamma_with_budget(f.cod.clone(), b.cylinders)?);
    let g = glue_with(f, gy)?;
    let r = glue_report(&g);
    Ok(if report {
        Outcome::report(r)
    } else {
        Outcome::with(category_to_value(g.cat()), r.verdict)
    })
}

pub fn charweq(f: &Functor, b: Budgets) -> Result<Outcome> {
    let gy = Arc::new(gamma_with_budget(f.cod.clone(), b.cylinders)?);
    let g = glue_with(f, gy)?;
    Ok(Outcome::report(charweq_with(f, &g)))
}

pub struct TransportArgs<'a> {
    /// Dimension of the cylinders, as cells of ΓX.
    pub dim: usize,
    pub u: &'a str,
    pub v: &'a str,
    pub z: &'a str,
    pub bottom_up: bool,
}

/// Transport along two parallel cylinders named by their ΓX ids, checked
/// against the exhaustive oracle.
pub fn transport_cmd(c: FiniteOmegaCat, b: Budgets, a: TransportArgs) -> Result<Outcome> {
    let c = Arc::new(c);
    let g = gamma_with_budget(c.clone(), b.cylinders)?;
    let (u, v) = (g.cylinder(cell(&g.cat, a.dim, a.u)?), g.cylinder(cell(&g.cat, a.dim, a.v)?));
    let z = cell(&c, u.top.dim + 1, a.z)?;
    let dir = if a.bottom_up { Direction::BottomUp } else { Direction::TopDown };
    let (other, w) = transport(&g.eqv, &u, &v, z, dir)?;
    let en = CylinderEnumerator::new(&g.eqv, b.cylinders);
    let oracle = transport_oracle(&en, &u, &v, z, dir)?;
    let mut r = CheckReport::new("transport");
    if !oracle.iter().all(|&o| g.eqv.equiv(o, other)) || oracle.is_empty() {
        r.violation(
            "oracle",
            vec![c.name(z)],
            format!("constructed {} against brute-force {:?}", c.name(other), oracle.iter().map(|&o| c.name(o)).collect::<Vec<_>>()),
        );
    }
    r.count("oracle_solutions", oracle.len() as u64);
    Ok(Outcome::with(
        json!({"end": c.name(other), "filler": w.describe(&c), "oracle": oracle.iter().map(|&o| c.name(o)).collect::<Vec<_>>(), "report": report_value(&r)}),
        r.verdict,
    ))
}

pub fn lift(path: &Path, b: Budgets) -> Result<Outcome> {
    let p = json::load_square(path)?;
    match find_lift_with_budget(&p, b.nodes)? {
        Lift::Found(h) => {
            let r = lift_report(&p, &h);
            Ok(Outcome::with(json!({"lift": functor_to_value(&h), "report": report_value(&r)}), r.verdict))
        }
        Lift::Refused(r) => Ok(Outcome::with(json!({"refusal": r}), Verdict::Fails)),
    }
}

pub fn is_immersion(f: &Functor, b: Budgets) -> Result<Outcome> {
    let gy = Arc::new(gamma_with_budget(f.cod.clone(), b.cylinders)?);
    let glu = glue_with(f, gy.clone())?;
    match is_immersion_with(f, &glu)? {
        Immersion::Certified(c) => {
            let gx = gamma_with_budget(f.dom.clone(), b.cylinders)?;
            let mut r = certificate_report(f, &c, &gy, &gx)?;
            r.merge(immersion_implies_weq(f, &c, &gy));
            Ok(Outcome::with(
                json!({
                    "certificate": {"k": functor_to_value(&c.k), "g": functor_to_value(&c.g), "h": functor_to_value(&c.h)},
                    "report": report_value(&r),
                }),
                r.verdict,
            ))
        }
        Immersion::Refused(r) => Ok(Outcome::with(json!({"refusal": r}), Verdict::Fails)),
    }
}

/// Small-object stages for `X → Y`; `X` defaults to the empty polygraph.
pub fn soa(y: FiniteOmegaCat, source: Option<(&Path, &Path)>, dim: usize, stages: usize) -> Result<Outcome> {
    let y = Arc::new(y);
    let (x, images) = match source {
        None => (crate::polygraph::Polygraph::new(dim.min(y.cap())), Default::default()),
        Some((xp, ip)) => {
            let x = json::load_polygraph(xp)?;
            let v = json::read_value(ip)?;
            let entries = v.as_array().ok_or_else(|| OmcError::Schema("/: expected a list of {dim, from, to}".into()))?;
            let mut img: [Vec<Option<Cell>>; 3] = std::array::from_fn(|k| vec![None; x.gen_count(k)]);
            for (i, e) in entries.iter().enumerate() {
                let dim = e.get("dim").and_then(Value::as_u64).ok_or_else(|| OmcError::Schema(format!("/{i}/dim: expected an integer")))? as usize;
                let from = e.get("from").and_then(Value::as_str).ok_or_else(|| OmcError::Schema(format!("/{i}/from: expected a string")))?;
                let to = e.get("to").and_then(Value::as_str).ok_or_else(|| OmcError::Schema(format!("/{i}/to: expected a string")))?;
                if dim > 2 {
                    return Err(OmcError::Schema(format!("/{i}/dim: above 2")));
                }
                let g = x.find_gen(dim, from).ok_or_else(|| OmcError::Schema(format!("/{i}/from: unknown generator {from:?}")))?;
                img[dim][g as usize] = Some(y.find(dim, to).ok_or_else(|| OmcError::Schema(format!("/{i}/to: unknown cell {to:?}")))?);
            }
            let mut out: [Vec<Cell>; 3] = Default::default();
            for (k, row) in img.iter().enumerate() {
                for (i, c) in row.iter().enumerate() {
                    out[k].push(c.ok_or_else(|| OmcError::Schema(format!("/: no image for {k}-generator {:?}", x.gen_id(k, i as u32))))?);
                }
            }
            (x, out)
        }
    };
    let r = soa_stage(Arc::new(x), y, images, dim, stages)?;
    let verdict = if r.unfilled.is_empty() { Verdict::Holds } else { Verdict::Inconclusive };
    Ok(Outcome::with(
        json!({
            "polygraph": polygraph_to_value(&r.poly),
            "attached": r.attached,
            "unfilled": r.unfilled,
        }),
        verdict,
    ))
}

pub fn collapse_cmd(c: &FiniteOmegaCat, n: usize) -> Result<Outcome> {
    Ok(Outcome::doc(category_to_value(&collapse(c, n)?)))
}

pub fn include_cmd(c: &FiniteOmegaCat, n: usize) -> Result<Outcome> {
    Ok(Outcome::doc(category_to_value(&include(c, n)?)))
}

pub fn truncate_cmd(c: &FiniteOmegaCat, n: usize) -> Outcome {
    Outcome::doc(category_to_value(&truncate(c, n)))
}

/// The free category on a polygraph, or with `presented` the category it
/// presents when 2-generators are read as relations.
pub fn free(p: crate::polygraph::Polygraph, b: Budgets, presented: bool) -> Result<Outcome> {
    let p = Arc::new(p);
    let cat = if presented {
        present_with_budget(p, b.cells)?.cat
    } else {
        free_category_with_budget(p, b.cells)?.cat
    };
    Ok(Outcome::doc(category_to_value(&cat)))
}

pub fn globe_cmd(n: usize, boundary: bool, polygraph: bool) -> Result<Outcome> {
    Ok(Outcome::doc(if polygraph {
        polygraph_to_value(&globe_polygraph(n, !boundary)?)
    } else if boundary {
        category_to_value(&boundary_globe(n))
    } else {
        category_to_value(&globe(n))
    }))
}

pub fn pushout_poly(m1: &Path, m2: &Path) -> Result<Outcome> {
    let (a, b) = (json::load_polymorphism(m1)?, json::load_polymorphism(m2)?);
    if a.dom != b.dom {
        return Err(OmcError::Invalid("the two morphisms have different domains".into()));
    }
    let po = pushout_polygraph(&a, &b)?;
    Ok(Outcome::doc(json!({
        "pushout": polygraph_to_value(&po.poly),
        "left": polymorphism_to_value(&po.left),
        "right": polymorphism_to_value(&po.right),
    })))
}

pub fn iso(a: FiniteOmegaCat, b: FiniteOmegaCat, bud: Budgets) -> Result<Outcome> {
    let (a, b) = (Arc::new(a), Arc::new(b));
    let same_shape = a.cap() == b.cap() && (0..=a.cap()).all(|k| a.count(k) == b.count(k));
    let found = if same_shape {
        FunctorSearch::new(a, b).injective().budget(bud.nodes).first()?
    } else {
        None
    };
    Ok(match found {
        Some(f) => Outcome::with(json!({"isomorphic": true, "iso": functor_to_value(&f)}), Verdict::Holds),
        None => Outcome::with(json!({"isomorphic": false}), Verdict::Fails),
    })
}

pub fn suite(cfg: &SuiteConfig) -> Result<Outcome> {
    let r = run_suite(cfg)?;
    let verdict = r.reports.iter().fold(Verdict::Holds, |v, x| v.and(x.verdict));
    Ok(Outcome::with(serde_json::to_value(&r).expect("reports serialize"), verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn budgets_from_lookup() {
        let b = Budgets::from_lookup(|k| (k == "OMC_BUDGET_NODES").then(|| "17".to_string())).unwrap();
        assert_eq!(b.nodes, 17);
        assert_eq!(b.cells, Budgets::default().cells);
        assert!(Budgets::from_lookup(|_| Some("0".into())).is_err());
        assert!(Budgets::from_lookup(|_| Some("many".into())).is_err());
    }

    #[test]
    fn eqv_pair_and_classes() {
        let c = fixtures::interval_iso();
        let o = eqv(c.clone(), Some((0, "a", "b"))).unwrap();
        assert_eq!(o.verdict, Verdict::Holds);
        let o = eqv(fixtures::walking_arrow(), Some((0, "a", "b"))).unwrap();
        assert_eq!(o.verdict, Verdict::Fails);
        let o = eqv(c, None).unwrap();
        assert_eq!(o.value["classes"].as_array().unwrap().iter().filter(|x| x["dim"] == 0).count(), 1);
    }

    #[test]
    fn iso_detects_globes() {
        assert_eq!(iso(globe(2), globe(2), Budgets::default()).unwrap().verdict, Verdict::Holds);
        assert_eq!(iso(globe(2), boundary_globe(2), Budgets::default()).unwrap().verdict, Verdict::Fails);
    }

    #[test]
    fn transport_command_matches_oracle() {
        let c = fixtures::interval_iso();
        let g = gamma_with_budget(Arc::new(c.clone()), 1000).unwrap();
        let u = g.cat.cells(0).find(|&x| g.cylinder(x).top != g.cylinder(x).bottom).unwrap();
        let id = g.cat.id(u).to_string();
        let top = g.cylinder(u).top;
        let z = c.id(c.unit(top)).to_string();
        let o = transport_cmd(c, Budgets::default(), TransportArgs { dim: 0, u: &id, v: &id, z: &z, bottom_up: false }).unwrap();
        assert_eq!(o.verdict, Verdict::Holds, "{}", o.value);
    }
}
