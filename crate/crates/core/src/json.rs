use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::category::{Cell, FiniteOmegaCat, RawCategory};
use crate::error::{OmcError, Result};
use crate::functor::Functor;
use crate::modelcheck::LiftingProblem;
use crate::polygraph::{Path2, PolyMorphism, Polygraph, Step, Word};

pub const CATEGORY_SCHEMA: &str = "category.v1";
pub const FUNCTOR_SCHEMA: &str = "functor.v1";
pub const POLYGRAPH_SCHEMA: &str = "polygraph.v1";
pub const POLYMORPHISM_SCHEMA: &str = "polymorphism.v1";
pub const SQUARE_SCHEMA: &str = "square.v1";

fn schema_err(ptr: &str, msg: impl std::fmt::Display) -> OmcError {
    OmcError::Schema(format!("{ptr}: {msg}"))
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut s = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => s.push_str(&format!("/{index}")),
            Segment::Map { key } => s.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => s.push_str(&format!("/{variant}")),
            Segment::Unknown => s.push_str("/?"),
        }
    }
    s
}

fn decode<T: DeserializeOwned>(v: &Value, base: &str) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let ptr = format!("{base}{}", pointer_of(e.path()));
        schema_err(if ptr.is_empty() { "/" } else { &ptr }, e.into_inner())
    })
}

fn check_schema(v: &Value, want: &str, base: &str) -> Result<()> {
    match v.get("schema") {
        None => Ok(()),
        Some(Value::String(s)) if s == want => Ok(()),
        Some(other) => Err(schema_err(&format!("{base}/schema"), format!("expected {want:?}, found {other}"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryDoc {
    #[serde(default)]
    #[allow(dead_code)]
    schema: Option<String>,
    cap: usize,
    cells: Vec<CellDoc>,
    #[serde(default)]
    src: Vec<EdgeDoc>,
    #[serde(default)]
    tgt: Vec<EdgeDoc>,
    #[serde(default)]
    units: Vec<UnitDoc>,
    #[serde(default)]
    comps: Vec<CompDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CellDoc {
    dim: usize,
    id: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    dim: Option<usize>,
    from: String,
    to: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitDoc {
    dim: Option<usize>,
    of: String,
    is: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct CompDoc {
    dimK: usize,
    dimP: usize,
    left: String,
    right: String,
    result: String,
}

/// Resolves an id whose dimension may be omitted, among `dims`.
fn resolve_dim(known: &HashMap<(usize, String), ()>, dim: Option<usize>, id: &str, dims: std::ops::Range<usize>, ptr: &str) -> Result<usize> {
    if let Some(d) = dim {
        return if known.contains_key(&(d, id.to_string())) {
            Ok(d)
        } else {
            Err(schema_err(ptr, format!("unknown {d}-cell {id:?}")))
        };
    }
    let hits: Vec<usize> = dims.filter(|&d| known.contains_key(&(d, id.to_string()))).collect();
    match hits.as_slice() {
        [d] => Ok(*d),
        [] => Err(schema_err(ptr, format!("unknown cell {id:?}"))),
        _ => Err(schema_err(ptr, format!("cell id {id:?} is ambiguous; add a dim field"))),
    }
}

/// Parses `category.v1`. Missing units are created and composites forced by
/// the unit laws are filled in; the axioms are left to `validate_category`.
pub fn category_from_value(v: &Value) -> Result<FiniteOmegaCat> {
    category_at(v, "")
}

fn category_at(v: &Value, base: &str) -> Result<FiniteOmegaCat> {
    check_schema(v, CATEGORY_SCHEMA, base)?;
    let doc: CategoryDoc = decode(v, base)?;
    let mut known = HashMap::new();
    for (i, c) in doc.cells.iter().enumerate() {
        if c.dim > doc.cap {
            return Err(schema_err(&format!("{base}/cells/{i}/dim"), format!("dimension {} exceeds cap {}", c.dim, doc.cap)));
        }
        if known.insert((c.dim, c.id.clone()), ()).is_some() {
            return Err(schema_err(&format!("{base}/cells/{i}/id"), format!("duplicate {}-cell {:?}", c.dim, c.id)));
        }
    }
    let mut bounds: [HashMap<(usize, String), String>; 2] = [HashMap::new(), HashMap::new()];
    for (side, (name, list)) in [("src", &doc.src), ("tgt", &doc.tgt)].into_iter().enumerate() {
        for (i, e) in list.iter().enumerate() {
            let ptr = format!("{base}/{name}/{i}");
            let d = resolve_dim(&known, e.dim, &e.from, 1..doc.cap + 1, &format!("{ptr}/from"))?;
            if !known.contains_key(&(d - 1, e.to.clone())) {
                return Err(schema_err(&format!("{ptr}/to"), format!("unknown {}-cell {:?}", d - 1, e.to)));
            }
            if bounds[side].insert((d, e.from.clone()), e.to.clone()).is_some() {
                return Err(schema_err(&ptr, format!("second {name} for {:?}", e.from)));
            }
        }
    }
    let mut raw = RawCategory::new(doc.cap);
    let mut order: Vec<(usize, &CellDoc)> = doc.cells.iter().enumerate().collect();
    order.sort_by_key(|(i, c)| (c.dim, *i));
    for (i, c) in order {
        let ptr = format!("{base}/cells/{i}");
        let key = (c.dim, c.id.clone());
        let (s, t) = if c.dim == 0 {
            (0, 0)
        } else {
            let s = bounds[0].get(&key).ok_or_else(|| schema_err(&ptr, format!("{}-cell {:?} has no src", c.dim, c.id)))?;
            let t = bounds[1].get(&key).ok_or_else(|| schema_err(&ptr, format!("{}-cell {:?} has no tgt", c.dim, c.id)))?;
            (raw.find(c.dim - 1, s).expect("checked"), raw.find(c.dim - 1, t).expect("checked"))
        };
        raw.push(c.dim, c.id.clone(), s, t).map_err(|e| schema_err(&ptr, e))?;
    }
    for (i, u) in doc.units.iter().enumerate() {
        let ptr = format!("{base}/units/{i}");
        let d = resolve_dim(&known, u.dim, &u.of, 0..doc.cap, &format!("{ptr}/of"))?;
        raw.set_unit(d, &u.of, &u.is).map_err(|e| schema_err(&ptr, e))?;
    }
    raw.add_missing_units();
    for (i, c) in doc.comps.iter().enumerate() {
        raw.set_comp(c.dimK, c.dimP, &c.left, &c.right, &c.result)
            .map_err(|e| schema_err(&format!("{base}/comps/{i}"), e))?;
    }
    raw.fill_forced_compositions();
    raw.freeze().map_err(|e| match e {
        OmcError::Budget(m) => OmcError::Budget(m),
        e => schema_err(if base.is_empty() { "/" } else { base }, e),
    })
}

pub fn category_to_value(c: &FiniteOmegaCat) -> Value {
    let mut cells = Vec::new();
    let (mut src, mut tgt, mut units, mut comps) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for k in 0..=c.cap() {
        for x in c.cells(k) {
            cells.push(json!({"dim": k, "id": c.id(x)}));
            if k > 0 {
                src.push(json!({"dim": k, "from": c.id(x), "to": c.id(c.src(x))}));
                tgt.push(json!({"dim": k, "from": c.id(x), "to": c.id(c.tgt(x))}));
            }
            if k < c.cap() {
                units.push(json!({"dim": k, "of": c.id(x), "is": c.id(c.unit(x))}));
            }
        }
        for p in 0..k {
            let mut entries: Vec<_> = c.comp_table(k, p).iter().map(|(&(a, b), &r)| (a, b, r)).collect();
            entries.sort_unstable();
            for (a, b, r) in entries {
                let name = |i| c.id(Cell::new(k, i));
                comps.push(json!({"dimK": k, "dimP": p, "left": name(a), "right": name(b), "result": name(r)}));
            }
        }
    }
    json!({
        "schema": CATEGORY_SCHEMA,
        "cap": c.cap(),
        "cells": cells,
        "src": src,
        "tgt": tgt,
        "units": units,
        "comps": comps,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    dim: usize,
    from: String,
    to: String,
}

/// A category given inline or, when `dir` is set, as a path relative to it.
fn embedded_category(v: &Value, ptr: &str, dir: Option<&Path>) -> Result<FiniteOmegaCat> {
    match (v, dir) {
        (Value::String(p), Some(d)) => load_category(&d.join(p)),
        (Value::String(_), None) => Err(schema_err(ptr, "category references need a base directory")),
        _ => category_at(v, ptr),
    }
}

/// Parses `functor.v1`. Only generating cells need images; images of units
/// and composites are derived, and every derived image must agree.
pub fn functor_from_value(v: &Value, dir: Option<&Path>) -> Result<Functor> {
    functor_at(v, "", dir)
}

fn functor_at(v: &Value, base: &str, dir: Option<&Path>) -> Result<Functor> {
    check_schema(v, FUNCTOR_SCHEMA, base)?;
    let obj = v.as_object().ok_or_else(|| schema_err(if base.is_empty() { "/" } else { base }, "expected an object"))?;
    for key in obj.keys() {
        if !["schema", "dom", "cod", "map"].contains(&key.as_str()) {
            return Err(schema_err(&format!("{base}/{key}"), "unknown field"));
        }
    }
    let field = |k: &str| obj.get(k).ok_or_else(|| schema_err(&format!("{base}/{k}"), "missing field"));
    let dom = Arc::new(embedded_category(field("dom")?, &format!("{base}/dom"), dir)?);
    let cod = Arc::new(embedded_category(field("cod")?, &format!("{base}/cod"), dir)?);
    let map: Vec<MapDoc> = decode(field("map")?, &format!("{base}/map"))?;
    let pairs = map
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let ptr = format!("{base}/map/{i}");
            let a = dom.find(m.dim, &m.from).ok_or_else(|| schema_err(&format!("{ptr}/from"), format!("unknown {}-cell {:?}", m.dim, m.from)))?;
            let b = cod.find(m.dim, &m.to).ok_or_else(|| schema_err(&format!("{ptr}/to"), format!("unknown {}-cell {:?}", m.dim, m.to)))?;
            Ok((a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    close_map(dom, cod, &pairs).map_err(|e| schema_err(&format!("{base}/map"), e))
}

/// Extends images of some cells to all stored cells through boundaries,
/// units and the composition tables.
pub fn close_map(dom: Arc<FiniteOmegaCat>, cod: Arc<FiniteOmegaCat>, pairs: &[(Cell, Cell)]) -> Result<Functor> {
    let mut img: Vec<Vec<Option<u32>>> = (0..=dom.cap()).map(|k| vec![None; dom.count(k)]).collect();
    let set = |img: &mut Vec<Vec<Option<u32>>>, x: Cell, y: Cell| -> Result<bool> {
        match img[x.dim][x.idx as usize] {
            Some(old) if old == y.idx => Ok(false),
            Some(old) => Err(OmcError::Structure(format!(
                "{} is sent to both {} and {}",
                dom.name(x),
                cod.name(Cell::new(x.dim, old)),
                cod.name(y)
            ))),
            None => {
                img[x.dim][x.idx as usize] = Some(y.idx);
                Ok(true)
            }
        }
    };
    for &(a, b) in pairs {
        set(&mut img, a, b)?;
    }
    loop {
        let mut changed = false;
        for k in 0..=dom.cap() {
            for x in dom.cells(k) {
                if k > cod.cap() {
                    let s = dom.src(x);
                    if let Some(i) = img[s.dim][s.idx as usize] {
                        changed |= set(&mut img, x, cod.unit_to(Cell::new(s.dim, i), k))?;
                    }
                }
                if let (true, Some(i)) = (k > 0 && k <= cod.cap(), img[k][x.idx as usize]) {
                    let y = Cell::new(k, i);
                    changed |= set(&mut img, dom.src(x), cod.src(y))?;
                    changed |= set(&mut img, dom.tgt(x), cod.tgt(y))?;
                }
                if let Some(base) = dom.unit_of(x) {
                    if let Some(i) = img[base.dim][base.idx as usize] {
                        changed |= set(&mut img, x, cod.unit(Cell::new(base.dim, i)))?;
                    }
                }
            }
            for p in 0..k {
                for (&(a, b), &r) in dom.comp_table(k, p) {
                    if let (Some(ia), Some(ib)) = (img[k][a as usize], img[k][b as usize]) {
                        let c = cod.comp(p, Cell::new(k, ia), Cell::new(k, ib)).ok_or_else(|| {
                            OmcError::Structure(format!(
                                "images of {} and {} are not composable",
                                dom.name(Cell::new(k, a)),
                                dom.name(Cell::new(k, b))
                            ))
                        })?;
                        changed |= set(&mut img, Cell::new(k, r), c)?;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut map = Vec::with_capacity(dom.cap() + 1);
    for (k, row) in img.into_iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (i, y) in row.into_iter().enumerate() {
            out.push(y.ok_or_else(|| OmcError::Structure(format!("no image for {}", dom.name(Cell::new(k, i as u32)))))?);
        }
        map.push(out);
    }
    Functor::from_map(dom, cod, map)
}

pub fn functor_to_value(f: &Functor) -> Value {
    let mut map = Vec::new();
    for k in 0..=f.dom.cap().min(f.cod.cap()) {
        for x in f.dom.cells(k) {
            map.push(json!({"dim": k, "from": f.dom.id(x), "to": f.cod.id(f.apply(x))}));
        }
    }
    json!({
        "schema": FUNCTOR_SCHEMA,
        "dom": category_to_value(&f.dom),
        "cod": category_to_value(&f.cod),
        "map": map,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygraphDoc {
    #[serde(default)]
    #[allow(dead_code)]
    schema: Option<String>,
    cap: usize,
    gens: Vec<GenDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenDoc {
    dim: usize,
    id: String,
    #[serde(default)]
    src: Value,
    #[serde(default)]
    tgt: Value,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct WordDoc {
    from: String,
    word: Vec<String>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    pos: usize,
    gen: String,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PathDoc {
    source: WordDoc,
    steps: Vec<StepDoc>,
}

fn find(p: &Polygraph, k: usize, id: &str, ptr: &str) -> Result<u32> {
    p.find_gen(k, id).ok_or_else(|| schema_err(ptr, format!("unknown {k}-generator {id:?}")))
}

fn word_from(p: &Polygraph, w: &WordDoc, ptr: &str) -> Result<Word> {
    let from = find(p, 0, &w.from, &format!("{ptr}/from"))?;
    let letters = w
        .word
        .iter()
        .enumerate()
        .map(|(i, a)| find(p, 1, a, &format!("{ptr}/word/{i}")))
        .collect::<Result<_>>()?;
    Ok(Word { from, letters })
}

fn path_from(p: &Polygraph, d: &PathDoc, ptr: &str) -> Result<Path2> {
    let source = word_from(p, &d.source, &format!("{ptr}/source"))?;
    let steps = d
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| Ok(Step { pos: s.pos, gen: find(p, 2, &s.gen, &format!("{ptr}/steps/{i}/gen"))? }))
        .collect::<Result<_>>()?;
    Ok(Path2 { source, steps })
}

pub fn polygraph_from_value(v: &Value) -> Result<Polygraph> {
    polygraph_at(v, "")
}

fn polygraph_at(v: &Value, base: &str) -> Result<Polygraph> {
    check_schema(v, POLYGRAPH_SCHEMA, base)?;
    let doc: PolygraphDoc = decode(v, base)?;
    if doc.cap > 3 {
        return Err(schema_err(&format!("{base}/cap"), "polygraphs are supported up to dimension 3"));
    }
    let mut p = Polygraph::new(doc.cap);
    let mut order: Vec<(usize, &GenDoc)> = doc.gens.iter().enumerate().collect();
    order.sort_by_key(|(i, g)| (g.dim, *i));
    for (i, g) in order {
        let ptr = format!("{base}/gens/{i}");
        if g.dim > doc.cap {
            return Err(schema_err(&format!("{ptr}/dim"), format!("dimension {} exceeds cap {}", g.dim, doc.cap)));
        }
        if p.find_gen(g.dim, &g.id).is_some() {
            return Err(schema_err(&format!("{ptr}/id"), format!("duplicate {}-generator {:?}", g.dim, g.id)));
        }
        match g.dim {
            0 => {
                p.add_object(&g.id);
            }
            1 => {
                let s: String = decode(&g.src, &format!("{ptr}/src"))?;
                let t: String = decode(&g.tgt, &format!("{ptr}/tgt"))?;
                let (s, t) = (find(&p, 0, &s, &format!("{ptr}/src"))?, find(&p, 0, &t, &format!("{ptr}/tgt"))?);
                p.add_arrow(&g.id, s, t);
            }
            2 => {
                let s = word_from(&p, &decode(&g.src, &format!("{ptr}/src"))?, &format!("{ptr}/src"))?;
                let t = word_from(&p, &decode(&g.tgt, &format!("{ptr}/tgt"))?, &format!("{ptr}/tgt"))?;
                p.add_cell2(&g.id, s, t);
            }
            _ => {
                let s = path_from(&p, &decode(&g.src, &format!("{ptr}/src"))?, &format!("{ptr}/src"))?;
                let t = path_from(&p, &decode(&g.tgt, &format!("{ptr}/tgt"))?, &format!("{ptr}/tgt"))?;
                p.add_cell3(&g.id, s, t);
            }
        }
    }
    p.check().map_err(|e| schema_err(if base.is_empty() { "/gens" } else { base }, e))?;
    Ok(p)
}

fn word_doc(p: &Polygraph, w: &Word) -> WordDoc {
    WordDoc {
        from: p.objects[w.from as usize].clone(),
        word: w.letters.iter().map(|&a| p.arrows[a as usize].id.clone()).collect(),
    }
}

fn path_doc(p: &Polygraph, d: &Path2) -> PathDoc {
    PathDoc {
        source: word_doc(p, &d.source),
        steps: d.steps.iter().map(|s| StepDoc { pos: s.pos, gen: p.cells2[s.gen as usize].id.clone() }).collect(),
    }
}

pub fn polygraph_to_value(p: &Polygraph) -> Value {
    let mut gens = Vec::new();
    for o in &p.objects {
        gens.push(json!({"dim": 0, "id": o}));
    }
    for a in &p.arrows {
        gens.push(json!({"dim": 1, "id": a.id, "src": p.objects[a.src as usize], "tgt": p.objects[a.tgt as usize]}));
    }
    for g in &p.cells2 {
        gens.push(json!({"dim": 2, "id": g.id, "src": word_doc(p, &g.src), "tgt": word_doc(p, &g.tgt)}));
    }
    for g in &p.cells3 {
        gens.push(json!({"dim": 3, "id": g.id, "src": path_doc(p, &g.src), "tgt": path_doc(p, &g.tgt)}));
    }
    json!({"schema": POLYGRAPH_SCHEMA, "cap": p.dim, "gens": gens})
}

/// Parses `polymorphism.v1`: `{dom, cod, map: [{dim, from, to}]}` with
/// polygraphs inline, sending generators to generators. Unlisted generators
/// are sent to the generator with the same id.
pub fn polymorphism_from_value(v: &Value) -> Result<PolyMorphism> {
    check_schema(v, POLYMORPHISM_SCHEMA, "")?;
    let field = |k: &str| v.get(k).ok_or_else(|| schema_err(&format!("/{k}"), "missing field"));
    let dom = Arc::new(polygraph_at(field("dom")?, "/dom")?);
    let cod = Arc::new(polygraph_at(field("cod")?, "/cod")?);
    let listed: Vec<MapDoc> = match v.get("map") {
        Some(m) => decode(m, "/map")?,
        None => Vec::new(),
    };
    let mut map: [Vec<Option<u32>>; 4] = std::array::from_fn(|k| vec![None; dom.gen_count(k)]);
    for (i, m) in listed.iter().enumerate() {
        let ptr = format!("/map/{i}");
        if m.dim > 3 {
            return Err(schema_err(&format!("{ptr}/dim"), "dimension above 3"));
        }
        let a = find(&dom, m.dim, &m.from, &format!("{ptr}/from"))?;
        let b = find(&cod, m.dim, &m.to, &format!("{ptr}/to"))?;
        map[m.dim][a as usize] = Some(b);
    }
    let mut out: [Vec<u32>; 4] = Default::default();
    for k in 0..4 {
        for i in 0..dom.gen_count(k) {
            let id = dom.gen_id(k, i as u32);
            let b = match map[k][i] {
                Some(b) => b,
                None => cod.find_gen(k, id).ok_or_else(|| schema_err("/map", format!("no image for {k}-generator {id:?}")))?,
            };
            out[k].push(b);
        }
    }
    PolyMorphism::new(dom, cod, out).map_err(|e| schema_err("/map", e))
}

pub fn polymorphism_to_value(m: &PolyMorphism) -> Value {
    let mut map = Vec::new();
    for k in 0..4 {
        for (i, &j) in m.map[k].iter().enumerate() {
            map.push(json!({"dim": k, "from": m.dom.gen_id(k, i as u32), "to": m.cod.gen_id(k, j)}));
        }
    }
    json!({
        "schema": POLYMORPHISM_SCHEMA,
        "dom": polygraph_to_value(&m.dom),
        "cod": polygraph_to_value(&m.cod),
        "map": map,
    })
}

/// Parses `square.v1`: `{i, f, top, bottom}`, four `functor.v1` documents
/// forming a commuting square `top ; f = i ; bottom`.
pub fn square_from_value(v: &Value, dir: Option<&Path>) -> Result<LiftingProblem> {
    check_schema(v, SQUARE_SCHEMA, "")?;
    let part = |k: &str| -> Result<Functor> {
        let x = v.get(k).ok_or_else(|| schema_err(&format!("/{k}"), "missing field"))?;
        match (x, dir) {
            (Value::String(p), Some(d)) => load_functor(&d.join(p)),
            _ => functor_at(x, &format!("/{k}"), dir),
        }
    };
    LiftingProblem::new(part("i")?, part("f")?, part("top")?, part("bottom")?).map_err(|e| schema_err("/", e))
}

pub fn square_to_value(p: &LiftingProblem) -> Value {
    json!({
        "schema": SQUARE_SCHEMA,
        "i": functor_to_value(&p.i),
        "f": functor_to_value(&p.f),
        "top": functor_to_value(&p.top),
        "bottom": functor_to_value(&p.bottom),
    })
}

pub fn read_value(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| OmcError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| OmcError::Schema(format!("{}: {e}", path.display())))
}

pub fn load_category(path: &Path) -> Result<FiniteOmegaCat> {
    category_from_value(&read_value(path)?)
}

pub fn load_functor(path: &Path) -> Result<Functor> {
    functor_from_value(&read_value(path)?, path.parent())
}

pub fn load_polygraph(path: &Path) -> Result<Polygraph> {
    polygraph_from_value(&read_value(path)?)
}

pub fn load_polymorphism(path: &Path) -> Result<PolyMorphism> {
    polymorphism_from_value(&read_value(path)?)
}

pub fn load_square(path: &Path) -> Result<LiftingProblem> {
    square_from_value(&read_value(path)?, path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::polygraph::{globe, globe_polygraph};
    use crate::random;
    use crate::search::find_isomorphism;
    use crate::validate::validate_category;

    fn round_trip(c: &FiniteOmegaCat) {
        let v = category_to_value(c);
        let back = category_from_value(&v).unwrap();
        assert_eq!(&back, c);
        assert_eq!(category_to_value(&back), v);
    }

    #[test]
    fn categories_round_trip() {
        for c in [fixtures::terminal(), fixtures::empty(), fixtures::walking_arrow(), fixtures::interval_iso(), globe(3)] {
            round_trip(&c);
        }
        for (_, c) in random::random_categories(11, 30, 12, 3).unwrap() {
            round_trip(&c);
        }
    }

    #[test]
    fn minimal_document_fills_units() {
        let v = json!({
            "schema": "category.v1",
            "cap": 1,
            "cells": [{"dim": 0, "id": "a"}, {"dim": 0, "id": "b"}, {"dim": 1, "id": "f"}],
            "src": [{"from": "f", "to": "a"}],
            "tgt": [{"from": "f", "to": "b"}],
        });
        let c = category_from_value(&v).unwrap();
        assert!(validate_category(&c).holds());
        assert!(find_isomorphism(Arc::new(c), Arc::new(fixtures::walking_arrow())).unwrap().is_some());
    }

    #[test]
    fn errors_carry_pointers() {
        let bad_type = json!({"cap": 1, "cells": [{"dim": "x", "id": "a"}]});
        let e = category_from_value(&bad_type).unwrap_err().to_string();
        assert!(e.contains("/cells/0/dim"), "{e}");
        let unknown = json!({"cap": 1, "cells": [{"dim": 1, "id": "f"}], "src": [{"dim": 1, "from": "f", "to": "zz"}]});
        let e = category_from_value(&unknown).unwrap_err().to_string();
        assert!(e.contains("/src/0/to"), "{e}");
        let version = json!({"schema": "category.v0", "cap": 0, "cells": []});
        let e = category_from_value(&version).unwrap_err().to_string();
        assert!(e.contains("/schema"), "{e}");
    }

    #[test]
    fn functor_round_trip_and_partial_maps() {
        let a = Arc::new(fixtures::walking_arrow());
        let b = Arc::new(fixtures::interval_iso());
        let f = close_map(a.clone(), b.clone(), &[(a.cell(1, "f").unwrap(), b.cell(1, "u").unwrap())]).unwrap();
        assert_eq!(f.apply(a.cell(0, "b").unwrap()), b.cell(0, "b").unwrap());
        let v = functor_to_value(&f);
        assert_eq!(functor_from_value(&v, None).unwrap(), f);
        let partial = json!({"dom": category_to_value(&a), "cod": category_to_value(&b), "map": [{"dim": 1, "from": "f", "to": "u"}]});
        assert_eq!(functor_from_value(&partial, None).unwrap(), f);
    }

    #[test]
    fn polygraphs_round_trip() {
        for n in 0..=3 {
            for top in [false, true] {
                let p = globe_polygraph(n, top).unwrap();
                let v = polygraph_to_value(&p);
                assert_eq!(polygraph_from_value(&v).unwrap(), p);
            }
        }
        let p = crate::presentation::interval_presentation();
        assert_eq!(polygraph_from_value(&polygraph_to_value(&p)).unwrap(), p);
        let m = PolyMorphism::identity(Arc::new(p));
        let back = polymorphism_from_value(&polymorphism_to_value(&m)).unwrap();
        assert_eq!(back.map, m.map);
    }

    #[test]
    fn polygraph_errors_carry_pointers() {
        let v = json!({"cap": 2, "gens": [{"dim": 0, "id": "x"}, {"dim": 1, "id": "a", "src": "x", "tgt": "y"}]});
        let e = polygraph_from_value(&v).unwrap_err().to_string();
        assert!(e.contains("/gens/1/tgt"), "{e}");
    }
}
