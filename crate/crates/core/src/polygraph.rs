use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::category::{Cell, FiniteOmegaCat, RawCategory};
use crate::error::{OmcError, Result};
use crate::functor::Functor;

pub const DEFAULT_SWAP_BUDGET: usize = 100_000;
pub const DEFAULT_FREE_BUDGET: usize = 5_000;

/// A composable sequence of 1-generators starting at an object. The empty
/// word at `from` is the unit of `from`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub from: u32,
    pub letters: Vec<u32>,
}

/// One rewriting step: the 2-generator `gen` applied at letter offset `pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub pos: usize,
    pub gen: u32,
}

/// A free 2-cell: a source word and a vertical sequence of whiskered
/// generators. The empty sequence is the unit of the source word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path2 {
    pub source: Word,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub src: u32,
    pub tgt: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gen2 {
    pub id: String,
    pub src: Word,
    pub tgt: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gen3 {
    pub id: String,
    pub src: Path2,
    pub tgt: Path2,
}

/// A polygraph with generators up to dimension 3. Free cells are computed up
/// to dimension 2; 3-generators are only materialized when they take part in
/// no composite besides unit laws.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polygraph {
    pub dim: usize,
    pub objects: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub cells2: Vec<Gen2>,
    pub cells3: Vec<Gen3>,
}

impl Polygraph {
    pub fn new(dim: usize) -> Self {
        Polygraph {
            dim,
            ..Default::default()
        }
    }

    pub fn gen_count(&self, k: usize) -> usize {
        match k {
            0 => self.objects.len(),
            1 => self.arrows.len(),
            2 => self.cells2.len(),
            3 => self.cells3.len(),
            _ => 0,
        }
    }

    pub fn total_gens(&self) -> usize {
        (0..=3).map(|k| self.gen_count(k)).sum()
    }

    pub fn gen_id(&self, k: usize, i: u32) -> &str {
        let i = i as usize;
        match k {
            0 => &self.objects[i],
            1 => &self.arrows[i].id,
            2 => &self.cells2[i].id,
            _ => &self.cells3[i].id,
        }
    }

    pub fn find_gen(&self, k: usize, id: &str) -> Option<u32> {
        let pos = match k {
            0 => self.objects.iter().position(|x| x == id),
            1 => self.arrows.iter().position(|x| x.id == id),
            2 => self.cells2.iter().position(|x| x.id == id),
            3 => self.cells3.iter().position(|x| x.id == id),
            _ => None,
        };
        pos.map(|p| p as u32)
    }

    pub fn add_object(&mut self, id: &str) -> u32 {
        self.objects.push(id.to_string());
        (self.objects.len() - 1) as u32
    }

    pub fn add_arrow(&mut self, id: &str, src: u32, tgt: u32) -> u32 {
        self.arrows.push(Arrow {
            id: id.to_string(),
            src,
            tgt,
        });
        self.dim = self.dim.max(1);
        (self.arrows.len() - 1) as u32
    }

    pub fn add_cell2(&mut self, id: &str, src: Word, tgt: Word) -> u32 {
        self.cells2.push(Gen2 {
            id: id.to_string(),
            src,
            tgt,
        });
        self.dim = self.dim.max(2);
        (self.cells2.len() - 1) as u32
    }

    pub fn add_cell3(&mut self, id: &str, src: Path2, tgt: Path2) -> u32 {
        self.cells3.push(Gen3 {
            id: id.to_string(),
            src,
            tgt,
        });
        self.dim = self.dim.max(3);
        (self.cells3.len() - 1) as u32
    }

    pub fn word(&self, from: u32, letters: &[u32]) -> Word {
        Word {
            from,
            letters: letters.to_vec(),
        }
    }

    /// Target object of a word, if its letters are composable.
    pub fn word_target(&self, w: &Word) -> Option<u32> {
        let mut at = w.from;
        for &l in &w.letters {
            let a = self.arrows.get(l as usize)?;
            if a.src != at {
                return None;
            }
            at = a.tgt;
        }
        Some(at)
    }

    pub fn concat(&self, a: &Word, b: &Word) -> Option<Word> {
        if self.word_target(a)? != b.from {
            return None;
        }
        let mut letters = a.letters.clone();
        letters.extend_from_slice(&b.letters);
        Some(Word { from: a.from, letters })
    }

    pub fn apply_step(&self, w: &Word, s: Step) -> Option<Word> {
        let g = self.cells2.get(s.gen as usize)?;
        let n = g.src.letters.len();
        if s.pos + n > w.letters.len() || w.letters[s.pos..s.pos + n] != g.src.letters[..] {
            return None;
        }
        let at = if s.pos == 0 {
            w.from
        } else {
            self.arrows[w.letters[s.pos - 1] as usize].tgt
        };
        if g.src.from != at {
            return None;
        }
        let mut letters = w.letters[..s.pos].to_vec();
        letters.extend_from_slice(&g.tgt.letters);
        letters.extend_from_slice(&w.letters[s.pos + n..]);
        Some(Word { from: w.from, letters })
    }

    pub fn path_target(&self, p: &Path2) -> Option<Word> {
        let mut w = p.source.clone();
        for &s in &p.steps {
            w = self.apply_step(&w, s)?;
        }
        Some(w)
    }

    /// Checks the boundary conditions of every generator.
    pub fn check(&self) -> Result<()> {
        let no = self.objects.len() as u32;
        for a in &self.arrows {
            if a.src >= no || a.tgt >= no {
                return Err(OmcError::Structure(format!("arrow {} has a dangling endpoint", a.id)));
            }
        }
        for g in &self.cells2 {
            let (Some(s), Some(t)) = (self.word_target(&g.src), self.word_target(&g.tgt)) else {
                return Err(OmcError::Structure(format!("2-generator {} has a non-composable boundary", g.id)));
            };
            if g.src.from != g.tgt.from || s != t {
                return Err(OmcError::Structure(format!("2-generator {} has non-parallel boundaries", g.id)));
            }
        }
        for g in &self.cells3 {
            let (Some(s), Some(t)) = (self.path_target(&g.src), self.path_target(&g.tgt)) else {
                return Err(OmcError::Structure(format!("3-generator {} has an invalid boundary", g.id)));
            };
            if g.src.source != g.tgt.source || s != t {
                return Err(OmcError::Structure(format!("3-generator {} has non-parallel boundaries", g.id)));
            }
        }
        Ok(())
    }

    fn swaps(&self, steps: &[Step]) -> Vec<Vec<Step>> {
        let mut out = Vec::new();
        for i in 0..steps.len().saturating_sub(1) {
            let (a, b) = (steps[i], steps[i + 1]);
            let ga = &self.cells2[a.gen as usize];
            let gb = &self.cells2[b.gen as usize];
            let (sa, ta) = (ga.src.letters.len(), ga.tgt.letters.len());
            let (sb, tb) = (gb.src.letters.len(), gb.tgt.letters.len());
            if b.pos + sb <= a.pos {
                let mut v = steps.to_vec();
                v[i] = b;
                v[i + 1] = Step {
                    pos: a.pos + tb - sb,
                    gen: a.gen,
                };
                out.push(v);
            }
            if b.pos >= a.pos + ta {
                let mut v = steps.to_vec();
                v[i] = Step {
                    pos: b.pos - ta + sa,
                    gen: b.gen,
                };
                v[i + 1] = a;
                out.push(v);
            }
        }
        out
    }

    /// The least step sequence in the interchange class of a path.
    pub fn canonical(&self, p: &Path2, budget: usize) -> Result<Path2> {
        let mut seen: BTreeSet<Vec<Step>> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(p.steps.clone());
        queue.push_back(p.steps.clone());
        while let Some(s) = queue.pop_front() {
            for n in self.swaps(&s) {
                if seen.insert(n.clone()) {
                    if seen.len() > budget {
                        return Err(OmcError::Budget(format!(
                            "interchange search exceeded {budget} sequences"
                        )));
                    }
                    queue.push_back(n);
                }
            }
        }
        Ok(Path2 {
            source: p.source.clone(),
            steps: seen.into_iter().next().expect("nonempty"),
        })
    }

    /// Equality of free 2-cells: same source and interchange-equivalent steps.
    pub fn path_eq(&self, a: &Path2, b: &Path2) -> Result<bool> {
        if a.source != b.source || a.steps.len() != b.steps.len() {
            return Ok(false);
        }
        let mut x = a.steps.clone();
        let mut y = b.steps.clone();
        x.sort();
        y.sort_by_key(|s| s.gen);
        let mut gx: Vec<u32> = a.steps.iter().map(|s| s.gen).collect();
        let mut gy: Vec<u32> = b.steps.iter().map(|s| s.gen).collect();
        gx.sort_unstable();
        gy.sort_unstable();
        if gx != gy {
            return Ok(false);
        }
        Ok(self.canonical(a, DEFAULT_SWAP_BUDGET)? == self.canonical(b, DEFAULT_SWAP_BUDGET)?)
    }

    /// Vertical composite `a ∘₁ b`.
    pub fn vcomp(&self, a: &Path2, b: &Path2) -> Option<Path2> {
        if self.path_target(a)? != b.source {
            return None;
        }
        let mut steps = a.steps.clone();
        steps.extend_from_slice(&b.steps);
        Some(Path2 {
            source: a.source.clone(),
            steps,
        })
    }

    /// Horizontal composite `a ∘₀ b`: `a` first, then `b` whiskered by the
    /// target of `a`.
    pub fn hcomp(&self, a: &Path2, b: &Path2) -> Option<Path2> {
        let source = self.concat(&a.source, &b.source)?;
        let ta = self.path_target(a)?;
        let mut steps = a.steps.clone();
        let off = ta.letters.len();
        steps.extend(b.steps.iter().map(|s| Step {
            pos: s.pos + off,
            gen: s.gen,
        }));
        Some(Path2 { source, steps })
    }

    pub fn unit_path(w: &Word) -> Path2 {
        Path2 {
            source: w.clone(),
            steps: Vec::new(),
        }
    }

    pub fn word_name(&self, w: &Word) -> String {
        if w.letters.is_empty() {
            format!("1_{}", self.objects[w.from as usize])
        } else {
            w.letters
                .iter()
                .map(|&l| self.arrows[l as usize].id.as_str())
                .collect::<Vec<_>>()
                .join("·")
        }
    }

    pub fn path_name(&self, p: &Path2) -> String {
        if p.steps.is_empty() {
            return format!("1_{}", self.word_name(&p.source));
        }
        let mut w = p.source.clone();
        let mut parts = Vec::new();
        for &s in &p.steps {
            let g = &self.cells2[s.gen as usize];
            let n = g.src.letters.len();
            let left: Vec<&str> = w.letters[..s.pos].iter().map(|&l| self.arrows[l as usize].id.as_str()).collect();
            let right: Vec<&str> = w.letters[s.pos + n..].iter().map(|&l| self.arrows[l as usize].id.as_str()).collect();
            let mut part = String::new();
            if !left.is_empty() {
                part.push_str(&left.join("·"));
                part.push('·');
            }
            part.push_str(&g.id);
            if !right.is_empty() {
                part.push('·');
                part.push_str(&right.join("·"));
            }
            if left.is_empty() && right.is_empty() && g.src.letters.is_empty() && s.pos == 0 && !w.letters.is_empty() {
                part = format!("{}@0", g.id);
            }
            parts.push(part);
            w = self.apply_step(&w, s).expect("valid path");
        }
        parts.join(" ; ")
    }
}

/// The free category on a polygraph, materialized as a finite table.
#[derive(Debug, Clone)]
pub struct FreeCategory {
    pub poly: Arc<Polygraph>,
    pub cat: Arc<FiniteOmegaCat>,
    words: Vec<Word>,
    paths: Vec<Path2>,
    word_index: FxHashMap<Word, u32>,
    path_index: FxHashMap<Path2, u32>,
}

impl FreeCategory {
    pub fn word_cell(&self, w: &Word) -> Option<Cell> {
        self.word_index.get(w).map(|&i| Cell::new(1, i))
    }

    pub fn path_cell(&self, p: &Path2) -> Result<Option<Cell>> {
        let c = self.poly.canonical(p, DEFAULT_SWAP_BUDGET)?;
        Ok(self.path_index.get(&c).map(|&i| Cell::new(2, i)))
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn paths(&self) -> &[Path2] {
        &self.paths
    }

    /// The cell for a generator.
    pub fn generator(&self, k: usize, i: u32) -> Cell {
        match k {
            0 => Cell::new(0, i),
            1 => {
                let a = &self.poly.arrows[i as usize];
                self.word_cell(&Word { from: a.src, letters: vec![i] }).expect("generator word")
            }
            2 => {
                let g = &self.poly.cells2[i as usize];
                let p = Path2 {
                    source: g.src.clone(),
                    steps: vec![Step { pos: 0, gen: i }],
                };
                self.path_cell(&p).ok().flatten().expect("generator path")
            }
            _ => {
                let id = &self.poly.cells3[i as usize].id;
                self.cat.find(3, id).expect("3-generator")
            }
        }
    }
}

/// Materializes the free category on `p`, failing when it is infinite or
/// larger than `budget` cells in some dimension.
pub fn free_category(p: Arc<Polygraph>) -> Result<FreeCategory> {
    free_category_with_budget(p, DEFAULT_FREE_BUDGET)
}

pub fn free_category_with_budget(p: Arc<Polygraph>, budget: usize) -> Result<FreeCategory> {
    p.check()?;
    let cap = p.dim;
    if cap > 3 {
        return Err(OmcError::Unsupported("free cells above dimension 3".into()));
    }
    let words = enumerate_words(&p, budget)?;
    let word_index: FxHashMap<Word, u32> = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
    let paths = if cap >= 2 { enumerate_paths(&p, &words, budget)? } else { Vec::new() };
    let path_index: FxHashMap<Path2, u32> = paths.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();

    let mut raw = RawCategory::new(cap);
    for o in &p.objects {
        raw.push(0, o.clone(), 0, 0)?;
    }
    if cap >= 1 {
        for w in &words {
            let t = p.word_target(w).expect("enumerated words compose");
            raw.push(1, p.word_name(w), w.from, t)?;
        }
        for (i, _) in p.objects.iter().enumerate() {
            let u = word_index[&Word { from: i as u32, letters: Vec::new() }];
            raw.set_unit_idx(0, i as u32, u);
        }
        let mut by_from: FxHashMap<u32, Vec<usize>> = FxHashMap::default();
        for (j, w) in words.iter().enumerate() {
            by_from.entry(w.from).or_default().push(j);
        }
        for (i, a) in words.iter().enumerate() {
            let t = p.word_target(a).expect("composable");
            for &j in by_from.get(&t).map(Vec::as_slice).unwrap_or(&[]) {
                let w = p.concat(a, &words[j]).expect("composable");
                let r = *word_index.get(&w).ok_or_else(|| OmcError::Budget("free 1-cells exceed the budget".into()))?;
                raw.set_comp_idx(1, 0, i as u32, j as u32, r);
            }
        }
    }
    if cap >= 2 {
        let canon = |x: &Path2| -> Result<u32> {
            let c = p.canonical(x, DEFAULT_SWAP_BUDGET)?;
            path_index
                .get(&c)
                .copied()
                .ok_or_else(|| OmcError::Budget("free 2-cells exceed the budget".into()))
        };
        for x in &paths {
            let s = word_index[&x.source];
            let t = word_index[&p.path_target(x).expect("valid path")];
            raw.push(2, p.path_name(x), s, t)?;
        }
        for (i, w) in words.iter().enumerate() {
            raw.set_unit_idx(1, i as u32, canon(&Polygraph::unit_path(w))?);
        }
        for (i, a) in paths.iter().enumerate() {
            for (j, b) in paths.iter().enumerate() {
                if let Some(v) = p.vcomp(a, b) {
                    raw.set_comp_idx(2, 1, i as u32, j as u32, canon(&v)?);
                }
                if let Some(h) = p.hcomp(a, b) {
                    raw.set_comp_idx(2, 0, i as u32, j as u32, canon(&h)?);
                }
            }
        }
    }
    if cap >= 3 {
        for g in &p.cells3 {
            let s = canon_lookup(&p, &path_index, &g.src)?;
            let t = canon_lookup(&p, &path_index, &g.tgt)?;
            raw.push(3, g.id.clone(), s, t)?;
        }
        raw.add_missing_units();
        raw.fill_forced_compositions();
        check_composition_free(&raw)?;
    }
    let cat = Arc::new(raw.freeze_with_limit(budget)?);
    Ok(FreeCategory {
        poly: p,
        cat,
        words,
        paths,
        word_index,
        path_index,
    })
}

fn canon_lookup(p: &Polygraph, index: &FxHashMap<Path2, u32>, x: &Path2) -> Result<u32> {
    let c = p.canonical(x, DEFAULT_SWAP_BUDGET)?;
    index
        .get(&c)
        .copied()
        .ok_or_else(|| OmcError::Internal("3-generator boundary not enumerated".into()))
}

/// Top-dimensional generators may only meet other cells through unit laws.
fn check_composition_free(raw: &RawCategory) -> Result<()> {
    let k = raw.cap;
    let n = raw.len(k) as u32;
    let bound = |i: u32, p: usize, src: bool| {
        let (mut d, mut j) = (k, i);
        while d > p {
            j = if src { raw.src[d][j as usize] } else { raw.tgt[d][j as usize] };
            d -= 1;
        }
        j
    };
    for p in 0..k {
        for a in 0..n {
            for b in 0..n {
                if bound(a, p, false) == bound(b, p, true) && !raw.comp[k][p].contains_key(&(a, b)) {
                    return Err(OmcError::Unsupported(format!(
                        "free {k}-cells with non-trivial composites ({} ∘{p} {})",
                        raw.ids[k][a as usize], raw.ids[k][b as usize]
                    )));
                }
            }
        }
    }
    Ok(())
}

fn enumerate_words(p: &Polygraph, budget: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for o in 0..p.objects.len() as u32 {
        let mut stack = vec![Word { from: o, letters: Vec::new() }];
        while let Some(w) = stack.pop() {
            if w.letters.len() > p.arrows.len() {
                return Err(OmcError::Budget(
                    "free category is infinite: the 1-generators contain a cycle".into(),
                ));
            }
            let t = p.word_target(&w).expect("composable");
            for (i, a) in p.arrows.iter().enumerate().rev() {
                if a.src == t {
                    let mut l = w.letters.clone();
                    l.push(i as u32);
                    stack.push(Word { from: o, letters: l });
                }
            }
            out.push(w);
            if out.len() > budget {
                return Err(OmcError::Budget(format!("more than {budget} free 1-cells")));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn enumerate_paths(p: &Polygraph, words: &[Word], budget: usize) -> Result<Vec<Path2>> {
    let mut set: BTreeSet<Path2> = BTreeSet::new();
    let max_len = words.len() * p.cells2.len().max(1);
    for w in words {
        let mut stack = vec![Polygraph::unit_path(w)];
        while let Some(x) = stack.pop() {
            if x.steps.len() > max_len {
                return Err(OmcError::Budget(
                    "free category is infinite: the 2-generators rewrite in a cycle".into(),
                ));
            }
            let t = p.path_target(&x).expect("valid");
            for (g, gen) in p.cells2.iter().enumerate() {
                let n = gen.src.letters.len();
                for pos in 0..=t.letters.len().saturating_sub(n) {
                    if n > t.letters.len() {
                        break;
                    }
                    let s = Step { pos, gen: g as u32 };
                    if p.apply_step(&t, s).is_some() {
                        let mut steps = x.steps.clone();
                        steps.push(s);
                        stack.push(Path2 {
                            source: x.source.clone(),
                            steps,
                        });
                    }
                }
            }
            set.insert(p.canonical(&x, DEFAULT_SWAP_BUDGET)?);
            if set.len() > budget {
                return Err(OmcError::Budget(format!("more than {budget} free 2-cells")));
            }
        }
    }
    Ok(set.into_iter().collect())
}

/// A morphism of polygraphs sending generators to generators of the same
/// dimension.
#[derive(Debug, Clone)]
pub struct PolyMorphism {
    pub dom: Arc<Polygraph>,
    pub cod: Arc<Polygraph>,
    pub map: [Vec<u32>; 4],
}

impl PolyMorphism {
    pub fn new(dom: Arc<Polygraph>, cod: Arc<Polygraph>, map: [Vec<u32>; 4]) -> Result<Self> {
        let m = PolyMorphism { dom, cod, map };
        m.check()?;
        Ok(m)
    }

    pub fn identity(p: Arc<Polygraph>) -> Self {
        let map = std::array::from_fn(|k| (0..p.gen_count(k) as u32).collect());
        PolyMorphism {
            dom: p.clone(),
            cod: p,
            map,
        }
    }

    /// Sends every generator to the generator with the same id.
    pub fn by_ids(dom: Arc<Polygraph>, cod: Arc<Polygraph>) -> Result<Self> {
        let mut map: [Vec<u32>; 4] = Default::default();
        for (k, row) in map.iter_mut().enumerate() {
            for i in 0..dom.gen_count(k) as u32 {
                let id = dom.gen_id(k, i);
                row.push(cod.find_gen(k, id).ok_or_else(|| OmcError::UnknownCell {
                    dim: k,
                    id: id.to_string(),
                })?);
            }
        }
        PolyMorphism::new(dom, cod, map)
    }

    pub fn map_word(&self, w: &Word) -> Word {
        Word {
            from: self.map[0][w.from as usize],
            letters: w.letters.iter().map(|&l| self.map[1][l as usize]).collect(),
        }
    }

    pub fn map_path(&self, p: &Path2) -> Path2 {
        let mut steps = Vec::with_capacity(p.steps.len());
        let mut w = p.source.clone();
        for &s in &p.steps {
            steps.push(Step {
                pos: s.pos,
                gen: self.map[2][s.gen as usize],
            });
            w = self.dom.apply_step(&w, s).expect("valid path");
        }
        let _ = w;
        Path2 {
            source: self.map_word(&p.source),
            steps,
        }
    }

    fn check(&self) -> Result<()> {
        for k in 0..4 {
            if self.map[k].len() != self.dom.gen_count(k) {
                return Err(OmcError::Structure(format!("morphism table for dimension {k} has the wrong size")));
            }
            if self.map[k].iter().any(|&j| j as usize >= self.cod.gen_count(k)) {
                return Err(OmcError::Structure(format!("morphism image out of range in dimension {k}")));
            }
        }
        let (d, c) = (&*self.dom, &*self.cod);
        for (i, a) in d.arrows.iter().enumerate() {
            let b = &c.arrows[self.map[1][i] as usize];
            if b.src != self.map[0][a.src as usize] || b.tgt != self.map[0][a.tgt as usize] {
                return Err(OmcError::Invalid(format!("morphism breaks the boundary of {}", a.id)));
            }
        }
        for (i, g) in d.cells2.iter().enumerate() {
            let h = &c.cells2[self.map[2][i] as usize];
            if h.src != self.map_word(&g.src) || h.tgt != self.map_word(&g.tgt) {
                return Err(OmcError::Invalid(format!("morphism breaks the boundary of {}", g.id)));
            }
        }
        for (i, g) in d.cells3.iter().enumerate() {
            let h = &c.cells3[self.map[3][i] as usize];
            if !c.path_eq(&h.src, &self.map_path(&g.src))? || !c.path_eq(&h.tgt, &self.map_path(&g.tgt))? {
                return Err(OmcError::Invalid(format!("morphism breaks the boundary of {}", g.id)));
            }
        }
        Ok(())
    }

    pub fn then(&self, g: &PolyMorphism) -> Result<PolyMorphism> {
        if *self.cod != *g.dom {
            return Err(OmcError::Invalid("polygraph morphisms are not composable".into()));
        }
        let map = std::array::from_fn(|k| self.map[k].iter().map(|&i| g.map[k][i as usize]).collect());
        PolyMorphism::new(self.dom.clone(), g.cod.clone(), map)
    }
}

/// `Q(m) : Q(S) → Q(S')` between materialized free categories.
pub fn free_functor(m: &PolyMorphism, a: &FreeCategory, b: &FreeCategory) -> Result<Functor> {
    let mut err = None;
    let f = Functor::from_fn(a.cat.clone(), b.cat.clone(), |x| {
        let r = match x.dim {
            0 => Some(Cell::new(0, m.map[0][x.idx as usize])),
            1 => b.word_cell(&m.map_word(&a.words[x.idx as usize])),
            2 => b.path_cell(&m.map_path(&a.paths[x.idx as usize])).ok().flatten(),
            _ => match a.cat.unit_of(x) {
                Some(_) => None,
                None => {
                    let id = a.cat.id(x);
                    let i = a.poly.find_gen(3, id).expect("3-cell is a generator");
                    b.cat.find(3, b.poly.gen_id(3, m.map[3][i as usize]))
                }
            },
        };
        match r {
            Some(c) => c,
            None if x.dim == 3 => {
                let base = a.cat.unit_of(x).expect("unit");
                let img = match base.dim {
                    0 => Cell::new(0, m.map[0][base.idx as usize]),
                    1 => b.word_cell(&m.map_word(&a.words[base.idx as usize])).unwrap_or(base),
                    _ => b.path_cell(&m.map_path(&a.paths[base.idx as usize])).ok().flatten().unwrap_or(base),
                };
                b.cat.unit_to(img, 3)
            }
            None => {
                err.get_or_insert(x);
                x
            }
        }
    })?;
    if let Some(x) = err {
        return Err(OmcError::Internal(format!("image of {} not found", a.cat.name(x))));
    }
    Ok(f)
}

/// The result of a pushout of polygraphs with its two cocone morphisms.
#[derive(Debug, Clone)]
pub struct PolyPushout {
    pub poly: Arc<Polygraph>,
    pub left: PolyMorphism,
    pub right: PolyMorphism,
}

/// Dimensionwise pushout of generator sets along `m1 : S → S1` and
/// `m2 : S → S2`.
pub fn pushout_polygraph(m1: &PolyMorphism, m2: &PolyMorphism) -> Result<PolyPushout> {
    if *m1.dom != *m2.dom {
        return Err(OmcError::Invalid("pushout of morphisms with different domains".into()));
    }
    let (s1, s2) = (&*m1.cod, &*m2.cod);
    let mut p = Polygraph::new(s1.dim.max(s2.dim));
    let mut lmap: [Vec<u32>; 4] = Default::default();
    let mut rmap: [Vec<u32>; 4] = Default::default();
    for k in 0..4 {
        let n1 = s1.gen_count(k);
        let n = n1 + s2.gen_count(k);
        let mut uf = UnionFind::new(n);
        for g in 0..m1.dom.gen_count(k) {
            uf.union(m1.map[k][g] as usize, n1 + m2.map[k][g] as usize);
        }
        let mut class_of = vec![u32::MAX; n];
        let mut reps = Vec::new();
        for i in 0..n {
            let r = uf.find(i);
            if class_of[r] == u32::MAX {
                class_of[r] = reps.len() as u32;
                reps.push(i);
            }
            class_of[i] = class_of[r];
        }
        lmap[k] = (0..n1).map(|i| class_of[i]).collect();
        rmap[k] = (n1..n).map(|i| class_of[i]).collect();
        let mut used: FxHashMap<String, usize> = FxHashMap::default();
        for &r in &reps {
            let (src_poly, local, map) = if r < n1 { (s1, r, &lmap) } else { (s2, r - n1, &rmap) };
            let mut id = src_poly.gen_id(k, local as u32).to_string();
            let c = used.entry(id.clone()).or_insert(0);
            *c += 1;
            if *c > 1 {
                id = format!("{id}'{}", *c - 1);
            }
            match k {
                0 => {
                    p.objects.push(id);
                }
                1 => {
                    let a = &src_poly.arrows[local];
                    p.arrows.push(Arrow {
                        id,
                        src: map[0][a.src as usize],
                        tgt: map[0][a.tgt as usize],
                    });
                }
                2 => {
                    let g = &src_poly.cells2[local];
                    let mw = |w: &Word| Word {
                        from: map[0][w.from as usize],
                        letters: w.letters.iter().map(|&l| map[1][l as usize]).collect(),
                    };
                    p.cells2.push(Gen2 {
                        id,
                        src: mw(&g.src),
                        tgt: mw(&g.tgt),
                    });
                }
                _ => {
                    let g = &src_poly.cells3[local];
                    let mp = |x: &Path2| Path2 {
                        source: Word {
                            from: map[0][x.source.from as usize],
                            letters: x.source.letters.iter().map(|&l| map[1][l as usize]).collect(),
                        },
                        steps: x.steps.iter().map(|s| Step { pos: s.pos, gen: map[2][s.gen as usize] }).collect(),
                    };
                    p.cells3.push(Gen3 {
                        id,
                        src: mp(&g.src),
                        tgt: mp(&g.tgt),
                    });
                }
            }
        }
    }
    p.check()?;
    let poly = Arc::new(p);
    let left = PolyMorphism::new(m1.cod.clone(), poly.clone(), lmap)?;
    let right = PolyMorphism::new(m2.cod.clone(), poly.clone(), rmap)?;
    Ok(PolyPushout { poly, left, right })
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn grow(&mut self) {
        self.parent.push(self.parent.len());
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Merges two classes, keeping the smaller root. Returns whether they
    /// were distinct.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

fn globe_name(k: usize, n: usize, side: bool) -> String {
    if k == n {
        format!("c{n}")
    } else if side {
        format!("s{k}")
    } else {
        format!("t{k}")
    }
}

fn globe_raw(n: usize, with_top: bool) -> RawCategory {
    let cap = if with_top { n } else { n.saturating_sub(1) };
    let mut raw = RawCategory::new(cap);
    let top = if with_top { n } else { n.saturating_sub(1) };
    let last = n;
    for k in 0..last.min(top + 1) {
        if !with_top && n == 0 {
            break;
        }
        let (s, t) = if k == 0 { (0, 0) } else { (0, 1) };
        raw.push(k, globe_name(k, n, true), s, t).expect("fresh");
        raw.push(k, globe_name(k, n, false), s, t).expect("fresh");
    }
    if with_top {
        let (s, t) = if n == 0 { (0, 0) } else { (0, 1) };
        raw.push(n, globe_name(n, n, true), s, t).expect("fresh");
    }
    raw.add_missing_units();
    raw.fill_forced_compositions();
    raw
}

/// The n-globe `O(n)`: two non-unit k-cells `s_k`, `t_k` for each `k < n`
/// and one non-unit n-cell `c_n`.
pub fn globe(n: usize) -> FiniteOmegaCat {
    globe_raw(n, true).freeze().expect("globe is well formed")
}

/// The boundary `∂O(n)`: the globe without its n-cell. `∂O(0)` is empty.
pub fn boundary_globe(n: usize) -> FiniteOmegaCat {
    globe_raw(n, false).freeze().expect("boundary globe is well formed")
}

/// The inclusion `i_n : ∂O(n) → O(n)`.
pub fn globe_inclusion(n: usize) -> Functor {
    let d = Arc::new(boundary_globe(n));
    let c = Arc::new(globe(n));
    let cc = c.clone();
    Functor::from_fn(d.clone(), c, |x| cc.find(x.dim, d.id(x)).expect("same ids"))
        .expect("inclusion is well formed")
}

/// The two maps `O(n) → ∂O(n+1)` sending the top cell to `s_n` and `t_n`.
pub fn globe_cocone(n: usize) -> (Functor, Functor) {
    let g = Arc::new(globe(n));
    let b = Arc::new(boundary_globe(n + 1));
    let leg = |side: &str| {
        let bb = b.clone();
        let gg = g.clone();
        Functor::from_fn(g.clone(), b.clone(), |x| {
            let root = gg.base_of(x);
            let id = gg.id(root);
            let target = if id == format!("c{n}") { format!("{side}{n}") } else { id.to_string() };
            let img = bb.find(root.dim, &target).expect("boundary cell");
            bb.unit_to(img, x.dim)
        })
        .expect("cocone leg is well formed")
    };
    (leg("s"), leg("t"))
}

/// The polygraph of `O(n)` for `n ≤ 3`, or of `∂O(n)` without the top
/// generator.
pub fn globe_polygraph(n: usize, with_top: bool) -> Result<Polygraph> {
    if n > 3 {
        return Err(OmcError::Unsupported("globe polygraphs above dimension 3".into()));
    }
    let mut p = Polygraph::new(if with_top { n } else { n.saturating_sub(1) });
    let sides = |k: usize| -> Vec<(String, bool)> {
        if k == n {
            if with_top {
                vec![(format!("c{n}"), true)]
            } else {
                vec![]
            }
        } else {
            vec![(format!("s{k}"), true), (format!("t{k}"), false)]
        }
    };
    for (id, _) in sides(0) {
        p.add_object(&id);
    }
    if n >= 1 {
        for (id, _) in sides(1) {
            p.add_arrow(&id, 0, 1);
        }
    }
    if n >= 2 {
        for (id, _) in sides(2) {
            p.add_cell2(&id, Word { from: 0, letters: vec![0] }, Word { from: 0, letters: vec![1] });
        }
    }
    if n >= 3 {
        for (id, _) in sides(3) {
            let mk = |g: u32| Path2 {
                source: Word { from: 0, letters: vec![0] },
                steps: vec![Step { pos: 0, gen: g }],
            };
            p.add_cell3(&id, mk(0), mk(1));
        }
    }
    Ok(p)
}

/// `⟨x, x'⟩ : ∂O(n+1) → C` for parallel n-cells.
pub fn pair_functor(c: Arc<FiniteOmegaCat>, x: Cell, x2: Cell) -> Result<Functor> {
    if !c.parallel(x, x2) {
        return Err(OmcError::Invalid(format!(
            "{} and {} are not parallel",
            c.name(x),
            c.name(x2)
        )));
    }
    let n = x.dim;
    let b = Arc::new(boundary_globe(n + 1));
    let bb = b.clone();
    let cc = c.clone();
    Functor::from_fn(b, c, move |y| globe_image(&bb, &cc, y, n, x, x2))
}

/// `sng(x) : O(n) → C` for an n-cell `x`.
pub fn sng(c: Arc<FiniteOmegaCat>, x: Cell) -> Result<Functor> {
    let n = x.dim;
    let g = Arc::new(globe(n));
    let gg = g.clone();
    let cc = c.clone();
    Functor::from_fn(g, c, move |y| {
        if gg.id(y) == format!("c{n}") {
            x
        } else {
            globe_image(&gg, &cc, y, n, x, x)
        }
    })
}

fn globe_image(g: &FiniteOmegaCat, c: &FiniteOmegaCat, y: Cell, n: usize, x: Cell, x2: Cell) -> Cell {
    let base = g.base_of(y);
    let id = g.id(base);
    let k: usize = id[1..].parse().expect("globe ids carry their dimension");
    let img = if k == n {
        if id.starts_with('s') || id.starts_with('c') {
            x
        } else {
            x2
        }
    } else if id.starts_with('s') {
        c.src_at(x, k)
    } else {
        c.tgt_at(x, k)
    };
    c.unit_to(img, y.dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::validate_functor;
    use crate::search::find_isomorphism;
    use crate::validate::validate_category;

    #[test]
    fn globe_counts() {
        for n in 0..=4 {
            let g = globe(n);
            assert!(validate_category(&g).holds());
            for k in 0..n {
                assert_eq!(g.cells(k).filter(|&c| !g.is_unit(c)).count(), 2);
            }
            assert_eq!(g.cells(n).filter(|&c| !g.is_unit(c)).count(), 1);
            let b = boundary_globe(n);
            assert!(validate_category(&b).holds());
            assert!(validate_functor(&globe_inclusion(n)).holds());
        }
        assert_eq!(boundary_globe(0).total_stored(), 0);
        assert_eq!(boundary_globe(1).count(0), 2);
        assert_eq!(boundary_globe(1).count(1), 2);
    }

    #[test]
    fn loop_is_infinite() {
        let mut p = Polygraph::new(1);
        p.add_object("x");
        p.add_arrow("e", 0, 0);
        assert!(matches!(free_category(Arc::new(p.clone())), Err(OmcError::Budget(_))));
        let w = p.word(0, &[0, 0]);
        let v = p.word(0, &[0]);
        assert_eq!(p.concat(&w, &v).unwrap().letters.len(), 3);
    }

    #[test]
    fn parallel_arrows() {
        let mut p = Polygraph::new(1);
        p.add_object("a");
        p.add_object("b");
        p.add_arrow("f", 0, 1);
        p.add_arrow("g", 0, 1);
        let f = free_category(Arc::new(p)).unwrap();
        assert_eq!(f.cat.non_unit_count(), 4);
    }

    #[test]
    fn interchange_of_disjoint_whiskers() {
        let mut p = Polygraph::new(2);
        p.add_object("x");
        p.add_object("y");
        p.add_object("z");
        let f = p.add_arrow("f", 0, 1);
        let f2 = p.add_arrow("f'", 0, 1);
        let g = p.add_arrow("g", 1, 2);
        let g2 = p.add_arrow("g'", 1, 2);
        let a = p.add_cell2("alpha", p.word(0, &[f]), p.word(0, &[f2]));
        let b = p.add_cell2("beta", p.word(1, &[g]), p.word(1, &[g2]));
        let src = p.word(0, &[f, g]);
        let x = Path2 { source: src.clone(), steps: vec![Step { pos: 0, gen: a }, Step { pos: 1, gen: b }] };
        let y = Path2 { source: src, steps: vec![Step { pos: 1, gen: b }, Step { pos: 0, gen: a }] };
        assert!(p.path_eq(&x, &y).unwrap());
        let fc = free_category(Arc::new(p)).unwrap();
        assert!(validate_category(&fc.cat).holds());
    }

    #[test]
    fn free_globes_match_direct_globes() {
        for n in 0..=3 {
            let p = Arc::new(globe_polygraph(n, true).unwrap());
            let f = free_category(p).unwrap();
            assert!(validate_category(&f.cat).holds());
            let g = Arc::new(globe(n));
            assert!(find_isomorphism(f.cat.clone(), g).unwrap().is_some(), "n = {n}");
        }
    }

    #[test]
    fn pushout_of_boundary_inclusions() {
        for n in 0..=3 {
            let b = Arc::new(globe_polygraph(n, false).unwrap());
            let o = Arc::new(globe_polygraph(n, true).unwrap());
            let i = PolyMorphism::by_ids(b.clone(), o.clone()).unwrap();
            let po = pushout_polygraph(&i, &i).unwrap();
            let f = free_category(po.poly.clone()).unwrap();
            let target = Arc::new(boundary_globe(n + 1));
            assert!(find_isomorphism(f.cat.clone(), target).unwrap().is_some(), "n = {n}");
        }
    }

    #[test]
    fn gluing_interval_ends_gives_loop() {
        let mut s = Polygraph::new(0);
        s.add_object("p");
        s.add_object("q");
        let mut i = Polygraph::new(1);
        i.add_object("a");
        i.add_object("b");
        i.add_arrow("e", 0, 1);
        let mut pt = Polygraph::new(0);
        pt.add_object("*");
        let (s, i, pt) = (Arc::new(s), Arc::new(i), Arc::new(pt));
        let m1 = PolyMorphism::new(s.clone(), i, [vec![0, 1], vec![], vec![], vec![]]).unwrap();
        let m2 = PolyMorphism::new(s, pt, [vec![0, 0], vec![], vec![], vec![]]).unwrap();
        let po = pushout_polygraph(&m1, &m2).unwrap();
        assert_eq!(po.poly.objects.len(), 1);
        assert_eq!(po.poly.arrows.len(), 1);
        let a = &po.poly.arrows[0];
        assert_eq!(a.src, a.tgt);
    }

    #[test]
    fn pair_and_sng_functors() {
        let c = Arc::new(crate::fixtures::interval_iso());
        let a = c.cell(0, "a").unwrap();
        let b = c.cell(0, "b").unwrap();
        let p = pair_functor(c.clone(), a, b).unwrap();
        assert!(validate_functor(&p).holds());
        let u = c.cell(1, "u").unwrap();
        let s = sng(c.clone(), u).unwrap();
        assert!(validate_functor(&s).holds());
        assert!(pair_functor(c.clone(), u, c.unit(a)).is_err());
        let (j0, j1) = globe_cocone(1);
        assert!(validate_functor(&j0).holds() && validate_functor(&j1).holds());
    }
}
