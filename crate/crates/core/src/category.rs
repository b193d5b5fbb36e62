use std::collections::HashMap;
use std::fmt::Write as _;

use rustc_hash::FxHashMap;

use crate::error::{OmcError, Result};

pub const DEFAULT_MAX_CELLS_PER_DIM: usize = 10_000;

/// A cell handle. For `dim <= cap` the index points into the stored table of
/// that dimension; above the cap it names the implicit iterated unit of the
/// stored cap-level cell with the same index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub dim: usize,
    pub idx: u32,
}

impl Cell {
    pub fn new(dim: usize, idx: u32) -> Self {
        Cell { dim, idx }
    }
}

/// Mutable, index-based description of a category used by every construction
/// before it is frozen into a [`FiniteOmegaCat`].
#[derive(Debug, Clone, Default)]
pub struct RawCategory {
    pub cap: usize,
    pub ids: Vec<Vec<String>>,
    pub src: Vec<Vec<u32>>,
    pub tgt: Vec<Vec<u32>>,
    pub unit: Vec<Vec<Option<u32>>>,
    pub comp: Vec<Vec<FxHashMap<(u32, u32), u32>>>,
    lookup: Vec<HashMap<String, u32>>,
}

impl RawCategory {
    pub fn new(cap: usize) -> Self {
        RawCategory {
            cap,
            ids: vec![Vec::new(); cap + 1],
            src: vec![Vec::new(); cap + 1],
            tgt: vec![Vec::new(); cap + 1],
            unit: vec![Vec::new(); cap + 1],
            comp: (0..=cap).map(|k| vec![FxHashMap::default(); k]).collect(),
            lookup: vec![HashMap::new(); cap + 1],
        }
    }

    pub fn len(&self, dim: usize) -> usize {
        self.ids[dim].len()
    }

    pub fn find(&self, dim: usize, id: &str) -> Option<u32> {
        self.lookup.get(dim)?.get(id).copied()
    }

    fn need(&self, dim: usize, id: &str) -> Result<u32> {
        self.find(dim, id).ok_or_else(|| OmcError::UnknownCell {
            dim,
            id: id.to_string(),
        })
    }

    /// Adds a cell with boundaries given by index. Boundaries are ignored in
    /// dimension 0.
    pub fn push(&mut self, dim: usize, id: impl Into<String>, src: u32, tgt: u32) -> Result<u32> {
        if dim > self.cap {
            return Err(OmcError::Structure(format!(
                "cell in dimension {dim} exceeds cap {}",
                self.cap
            )));
        }
        let id = id.into();
        if self.lookup[dim].contains_key(&id) {
            return Err(OmcError::Structure(format!(
                "duplicate cell id {id:?} in dimension {dim}"
            )));
        }
        let idx = self.ids[dim].len() as u32;
        self.lookup[dim].insert(id.clone(), idx);
        self.ids[dim].push(id);
        if dim > 0 {
            self.src[dim].push(src);
            self.tgt[dim].push(tgt);
        }
        self.unit[dim].push(None);
        Ok(idx)
    }

    pub fn add(&mut self, dim: usize, id: &str, src: Option<&str>, tgt: Option<&str>) -> Result<u32> {
        let (s, t) = if dim == 0 {
            (0, 0)
        } else {
            let s = src.ok_or_else(|| OmcError::Structure(format!("cell {id:?} has no source")))?;
            let t = tgt.ok_or_else(|| OmcError::Structure(format!("cell {id:?} has no target")))?;
            (self.need(dim - 1, s)?, self.need(dim - 1, t)?)
        };
        self.push(dim, id, s, t)
    }

    pub fn add_obj(&mut self, id: &str) -> u32 {
        self.add(0, id, None, None).expect("fresh object id")
    }

    pub fn add_arrow(&mut self, dim: usize, id: &str, src: &str, tgt: &str) -> u32 {
        self.add(dim, id, Some(src), Some(tgt))
            .unwrap_or_else(|e| panic!("add_arrow {id}: {e}"))
    }

    pub fn set_unit_idx(&mut self, dim: usize, of: u32, is: u32) {
        self.unit[dim][of as usize] = Some(is);
    }

    pub fn set_unit(&mut self, dim: usize, of: &str, is: &str) -> Result<()> {
        if dim >= self.cap {
            return Err(OmcError::Structure(format!(
                "unit of a {dim}-cell cannot be stored with cap {}",
                self.cap
            )));
        }
        let a = self.need(dim, of)?;
        let b = self.need(dim + 1, is)?;
        self.unit[dim][a as usize] = Some(b);
        Ok(())
    }

    pub fn set_comp_idx(&mut self, k: usize, p: usize, l: u32, r: u32, res: u32) {
        self.comp[k][p].insert((l, r), res);
    }

    pub fn set_comp(&mut self, k: usize, p: usize, l: &str, r: &str, res: &str) -> Result<()> {
        if k > self.cap || p >= k {
            return Err(OmcError::Structure(format!(
                "composition entry in dimension {k} along {p} is out of range"
            )));
        }
        let (l, r, res) = (self.need(k, l)?, self.need(k, r)?, self.need(k, res)?);
        self.comp[k][p].insert((l, r), res);
        Ok(())
    }

    /// Creates a unit cell `1_x` for every stored cell below the cap that has
    /// none, in increasing dimension.
    pub fn add_missing_units(&mut self) {
        for k in 0..self.cap {
            for i in 0..self.ids[k].len() {
                if self.unit[k][i].is_none() {
                    let mut name = format!("1_{}", self.ids[k][i]);
                    while self.lookup[k + 1].contains_key(&name) {
                        name.push('\'');
                    }
                    let u = self.push(k + 1, name, i as u32, i as u32).expect("fresh unit");
                    self.unit[k][i] = Some(u);
                }
            }
        }
    }

    fn strip_units(&self, dim: usize, idx: u32, unit_of: &[Vec<Option<u32>>]) -> (usize, u32) {
        let (mut d, mut i) = (dim, idx);
        while d > 0 {
            match unit_of[d][i as usize] {
                Some(j) => {
                    d -= 1;
                    i = j;
                }
                None => break,
            }
        }
        (d, i)
    }

    fn boundary_at(&self, dim: usize, idx: u32, p: usize, source: bool) -> u32 {
        let (mut d, mut i) = (dim, idx);
        while d > p {
            i = if source { self.src[d][i as usize] } else { self.tgt[d][i as usize] };
            d -= 1;
        }
        i
    }

    /// Fills every composition table entry that is forced by the unit laws
    /// and by compatibility of units with composition, assuming the entries
    /// in lower dimensions are already complete.
    pub fn fill_forced_compositions(&mut self) {
        let unit_of = self.unit_of_table();
        for k in 1..=self.cap {
            for p in 0..k {
                let n = self.ids[k].len() as u32;
                let mut by_src: HashMap<u32, Vec<u32>> = HashMap::new();
                for b in 0..n {
                    by_src.entry(self.boundary_at(k, b, p, true)).or_default().push(b);
                }
                for a in 0..n {
                    let ta = self.boundary_at(k, a, p, false);
                    let Some(bs) = by_src.get(&ta) else { continue };
                    for &b in bs {
                        if self.comp[k][p].contains_key(&(a, b)) {
                            continue;
                        }
                        let (da, _) = self.strip_units(k, a, &unit_of);
                        let (db, _) = self.strip_units(k, b, &unit_of);
                        let res = if da <= p {
                            Some(b)
                        } else if db <= p {
                            Some(a)
                        } else {
                            match (unit_of[k][a as usize], unit_of[k][b as usize]) {
                                (Some(a1), Some(b1)) if p + 1 < k => self.comp[k - 1][p]
                                    .get(&(a1, b1))
                                    .and_then(|&c| self.unit[k - 1][c as usize]),
                                _ => None,
                            }
                        };
                        if let Some(r) = res {
                            self.comp[k][p].insert((a, b), r);
                        }
                    }
                }
            }
        }
    }

    fn unit_of_table(&self) -> Vec<Vec<Option<u32>>> {
        let mut unit_of: Vec<Vec<Option<u32>>> =
            (0..=self.cap).map(|k| vec![None; self.ids[k].len()]).collect();
        for k in 0..self.cap {
            for (i, u) in self.unit[k].iter().enumerate() {
                if let Some(u) = u {
                    if let Some(slot) = unit_of[k + 1].get_mut(*u as usize) {
                        if slot.is_none() {
                            *slot = Some(i as u32);
                        }
                    }
                }
            }
        }
        unit_of
    }

    pub fn freeze(self) -> Result<FiniteOmegaCat> {
        FiniteOmegaCat::from_raw(self, DEFAULT_MAX_CELLS_PER_DIM)
    }

    pub fn freeze_with_limit(self, limit: usize) -> Result<FiniteOmegaCat> {
        FiniteOmegaCat::from_raw(self, limit)
    }
}

/// A finite strict ω-category whose cells above `cap` are all identities.
#[derive(Debug, Clone)]
pub struct FiniteOmegaCat {
    cap: usize,
    ids: Vec<Vec<String>>,
    lookup: Vec<HashMap<String, u32>>,
    src: Vec<Vec<u32>>,
    tgt: Vec<Vec<u32>>,
    unit: Vec<Vec<u32>>,
    unit_of: Vec<Vec<Option<u32>>>,
    comp: Vec<Vec<FxHashMap<(u32, u32), u32>>>,
    hom: Vec<FxHashMap<(u32, u32), Vec<u32>>>,
}

impl PartialEq for FiniteOmegaCat {
    fn eq(&self, other: &Self) -> bool {
        self.cap == other.cap
            && self.ids == other.ids
            && self.src == other.src
            && self.tgt == other.tgt
            && self.unit == other.unit
            && self.comp == other.comp
    }
}

impl Eq for FiniteOmegaCat {}

pub enum HomIter<'a> {
    Stored(usize, std::slice::Iter<'a, u32>),
    Single(Option<Cell>),
}

impl Iterator for HomIter<'_> {
    type Item = Cell;
    fn next(&mut self) -> Option<Cell> {
        match self {
            HomIter::Stored(d, it) => it.next().map(|&i| Cell::new(*d, i)),
            HomIter::Single(c) => c.take(),
        }
    }
}

impl FiniteOmegaCat {
    pub fn from_raw(raw: RawCategory, limit: usize) -> Result<Self> {
        let cap = raw.cap;
        for k in 0..=cap {
            if raw.ids[k].len() > limit {
                return Err(OmcError::Budget(format!(
                    "{} cells in dimension {k} exceed the limit of {limit}",
                    raw.ids[k].len()
                )));
            }
        }
        let mut unit = Vec::with_capacity(cap + 1);
        for k in 0..=cap {
            let n = raw.ids[k].len();
            if k > 0 {
                for (i, (&s, &t)) in raw.src[k].iter().zip(&raw.tgt[k]).enumerate() {
                    let m = raw.ids[k - 1].len() as u32;
                    if s >= m || t >= m {
                        return Err(OmcError::Structure(format!(
                            "boundary of {k}-cell {:?} is out of range",
                            raw.ids[k][i]
                        )));
                    }
                }
                if raw.src[k].len() != n || raw.tgt[k].len() != n {
                    return Err(OmcError::Structure(format!(
                        "missing boundaries in dimension {k}"
                    )));
                }
            }
            if k < cap {
                let mut row = Vec::with_capacity(n);
                for i in 0..n {
                    match raw.unit[k].get(i).copied().flatten() {
                        Some(u) if (u as usize) < raw.ids[k + 1].len() => row.push(u),
                        Some(_) => {
                            return Err(OmcError::Structure(format!(
                                "unit of {k}-cell {:?} is out of range",
                                raw.ids[k][i]
                            )))
                        }
                        None => {
                            return Err(OmcError::Structure(format!(
                                "{k}-cell {:?} has no unit",
                                raw.ids[k][i]
                            )))
                        }
                    }
                }
                unit.push(row);
            } else {
                unit.push(Vec::new());
            }
            for p in 0..k {
                for (&(a, b), &r) in &raw.comp[k][p] {
                    if a as usize >= n || b as usize >= n || r as usize >= n {
                        return Err(OmcError::Structure(format!(
                            "composition entry in dimension {k} along {p} is out of range"
                        )));
                    }
                }
            }
        }
        let unit_of = raw.unit_of_table();
        let mut hom: Vec<FxHashMap<(u32, u32), Vec<u32>>> = vec![FxHashMap::default(); cap + 1];
        for (k, h) in hom.iter_mut().enumerate().skip(1) {
            for i in 0..raw.ids[k].len() {
                h.entry((raw.src[k][i], raw.tgt[k][i])).or_default().push(i as u32);
            }
        }
        let lookup = raw
            .ids
            .iter()
            .map(|v| v.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect())
            .collect();
        Ok(FiniteOmegaCat {
            cap,
            ids: raw.ids,
            lookup,
            src: raw.src,
            tgt: raw.tgt,
            unit,
            unit_of,
            comp: raw.comp,
            hom,
        })
    }

    pub fn to_raw(&self) -> RawCategory {
        let mut raw = RawCategory::new(self.cap);
        raw.ids = self.ids.clone();
        raw.lookup = self.lookup.clone();
        raw.src = self.src.clone();
        raw.tgt = self.tgt.clone();
        raw.unit = (0..=self.cap)
            .map(|k| {
                if k < self.cap {
                    self.unit[k].iter().map(|&u| Some(u)).collect()
                } else {
                    vec![None; self.ids[k].len()]
                }
            })
            .collect();
        raw.comp = self.comp.clone();
        raw
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Number of stored cells of dimension `k`, or of cap-level cells for
    /// `k` above the cap.
    pub fn count(&self, k: usize) -> usize {
        self.ids[k.min(self.cap)].len()
    }

    pub fn total_stored(&self) -> usize {
        self.ids.iter().map(Vec::len).sum()
    }

    /// Number of stored cells that are not identities.
    pub fn non_unit_count(&self) -> usize {
        (0..=self.cap)
            .map(|k| (0..self.ids[k].len()).filter(|&i| self.unit_of[k][i].is_none()).count())
            .sum()
    }

    pub fn cells(&self, k: usize) -> impl Iterator<Item = Cell> + '_ {
        (0..self.count(k) as u32).map(move |i| Cell::new(k, i))
    }

    pub fn objects(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells(0)
    }

    pub fn stored_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..=self.cap).flat_map(move |k| self.cells(k))
    }

    pub fn id(&self, c: Cell) -> &str {
        &self.ids[c.dim.min(self.cap)][c.idx as usize]
    }

    pub fn name(&self, c: Cell) -> String {
        if c.dim <= self.cap {
            self.ids[c.dim][c.idx as usize].clone()
        } else {
            format!("1^{}({})", c.dim, self.ids[self.cap][c.idx as usize])
        }
    }

    pub fn find(&self, dim: usize, id: &str) -> Option<Cell> {
        if dim <= self.cap {
            return self.lookup[dim].get(id).map(|&i| Cell::new(dim, i));
        }
        if let Some(&i) = self.lookup[self.cap].get(id) {
            return Some(Cell::new(dim, i));
        }
        let prefix = format!("1^{dim}(");
        let inner = id.strip_prefix(&prefix)?.strip_suffix(')')?;
        self.lookup[self.cap].get(inner).map(|&i| Cell::new(dim, i))
    }

    pub fn cell(&self, dim: usize, id: &str) -> Result<Cell> {
        self.find(dim, id).ok_or_else(|| OmcError::UnknownCell {
            dim,
            id: id.to_string(),
        })
    }

    /// Source of a cell of positive dimension.
    pub fn src(&self, c: Cell) -> Cell {
        debug_assert!(c.dim > 0);
        if c.dim <= self.cap {
            Cell::new(c.dim - 1, self.src[c.dim][c.idx as usize])
        } else {
            Cell::new(c.dim - 1, c.idx)
        }
    }

    pub fn tgt(&self, c: Cell) -> Cell {
        debug_assert!(c.dim > 0);
        if c.dim <= self.cap {
            Cell::new(c.dim - 1, self.tgt[c.dim][c.idx as usize])
        } else {
            Cell::new(c.dim - 1, c.idx)
        }
    }

    /// Iterated source down to dimension `p`; identity when `p >= dim`.
    pub fn src_at(&self, c: Cell, p: usize) -> Cell {
        let mut c = c;
        while c.dim > p {
            c = self.src(c);
        }
        c
    }

    pub fn tgt_at(&self, c: Cell, p: usize) -> Cell {
        let mut c = c;
        while c.dim > p {
            c = self.tgt(c);
        }
        c
    }

    pub fn unit(&self, c: Cell) -> Cell {
        if c.dim < self.cap {
            Cell::new(c.dim + 1, self.unit[c.dim][c.idx as usize])
        } else {
            Cell::new(c.dim + 1, c.idx)
        }
    }

    /// Iterated unit up to dimension `k`; identity when `k <= dim`.
    pub fn unit_to(&self, c: Cell, k: usize) -> Cell {
        let mut c = c;
        while c.dim < k {
            if c.dim >= self.cap {
                return Cell::new(k, c.idx);
            }
            c = self.unit(c);
        }
        c
    }

    /// The cell this one is the unit of, if any.
    pub fn unit_of(&self, c: Cell) -> Option<Cell> {
        if c.dim == 0 {
            None
        } else if c.dim <= self.cap {
            self.unit_of[c.dim][c.idx as usize].map(|i| Cell::new(c.dim - 1, i))
        } else {
            Some(Cell::new(c.dim - 1, c.idx))
        }
    }

    pub fn is_unit(&self, c: Cell) -> bool {
        self.unit_of(c).is_some()
    }

    /// Smallest-dimensional cell `x` such that `c` is an iterated unit of `x`.
    pub fn base_of(&self, c: Cell) -> Cell {
        let mut c = c;
        while let Some(d) = self.unit_of(c) {
            c = d;
        }
        c
    }

    pub fn parallel(&self, a: Cell, b: Cell) -> bool {
        a.dim == b.dim && (a.dim == 0 || (self.src(a) == self.src(b) && self.tgt(a) == self.tgt(b)))
    }

    /// `a ∘_p b` in diagrammatic order: defined when the `p`-target of `a` is
    /// the `p`-source of `b`. Cells of different dimensions are first padded
    /// with units.
    pub fn comp(&self, p: usize, a: Cell, b: Cell) -> Option<Cell> {
        if p >= a.dim.min(b.dim) {
            return None;
        }
        let k = a.dim.max(b.dim);
        let a = self.unit_to(a, k);
        let b = self.unit_to(b, k);
        if k <= self.cap {
            self.comp[k][p].get(&(a.idx, b.idx)).map(|&r| Cell::new(k, r))
        } else if p < self.cap {
            self.comp[self.cap][p].get(&(a.idx, b.idx)).map(|&r| Cell::new(k, r))
        } else if a.idx == b.idx {
            Some(a)
        } else {
            None
        }
    }

    pub fn comp_or_err(&self, p: usize, a: Cell, b: Cell) -> Result<Cell> {
        self.comp(p, a, b).ok_or_else(|| {
            OmcError::NotComposable(format!(
                "{} ∘{p} {}",
                self.name(a),
                self.name(b)
            ))
        })
    }

    pub fn composable(&self, p: usize, a: Cell, b: Cell) -> bool {
        p < a.dim.min(b.dim) && self.tgt_at(a, p) == self.src_at(b, p)
    }

    /// Raw stored composition table entry; no padding.
    pub fn comp_table(&self, k: usize, p: usize) -> &FxHashMap<(u32, u32), u32> {
        &self.comp[k][p]
    }

    /// The `k`-cells from `s` to `t`, where `s` and `t` are parallel
    /// `(k-1)`-cells (or objects).
    pub fn hom(&self, s: Cell, t: Cell) -> HomIter<'_> {
        let k = s.dim + 1;
        if k <= self.cap {
            match self.hom[k].get(&(s.idx, t.idx)) {
                Some(v) => HomIter::Stored(k, v.iter()),
                None => HomIter::Stored(k, [].iter()),
            }
        } else if s == t {
            HomIter::Single(Some(Cell::new(k, s.idx)))
        } else {
            HomIter::Single(None)
        }
    }

    pub fn hom_len(&self, s: Cell, t: Cell) -> usize {
        let k = s.dim + 1;
        if k <= self.cap {
            self.hom[k].get(&(s.idx, t.idx)).map_or(0, Vec::len)
        } else {
            usize::from(s == t)
        }
    }

    pub fn describe(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cap {}", self.cap);
        for k in 0..=self.cap {
            let _ = writeln!(out, "dimension {k}: {} cells", self.ids[k].len());
            for c in self.cells(k) {
                if k == 0 {
                    let _ = writeln!(out, "  {}", self.name(c));
                } else {
                    let mark = if self.is_unit(c) { " (unit)" } else { "" };
                    let _ = writeln!(
                        out,
                        "  {} : {} -> {}{mark}",
                        self.name(c),
                        self.name(self.src(c)),
                        self.name(self.tgt(c))
                    );
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow() -> FiniteOmegaCat {
        let mut raw = RawCategory::new(1);
        raw.add_obj("a");
        raw.add_obj("b");
        raw.add_arrow(1, "f", "a", "b");
        raw.add_missing_units();
        raw.fill_forced_compositions();
        raw.freeze().unwrap()
    }

    #[test]
    fn units_and_padding() {
        let c = arrow();
        let a = c.cell(0, "a").unwrap();
        let f = c.cell(1, "f").unwrap();
        let b = c.cell(0, "b").unwrap();
        assert_eq!(c.comp(0, c.unit(a), f), Some(f));
        assert_eq!(c.comp(0, f, c.unit(b)), Some(f));
        assert_eq!(c.comp(0, f, c.unit(a)), None);
        assert_eq!(c.count(1), 3);
        let uf = c.unit(f);
        assert_eq!(uf.dim, 2);
        assert_eq!(c.src(uf), f);
        assert_eq!(c.unit_of(uf), Some(f));
        assert_eq!(c.comp(1, uf, uf), Some(uf));
        assert_eq!(c.comp(0, c.unit_to(a, 2), uf), Some(uf));
        assert_eq!(c.comp(0, c.unit(a), uf), Some(uf));
        assert_eq!(c.name(uf), "1^2(f)");
        assert_eq!(c.find(2, "1^2(f)"), Some(uf));
    }

    #[test]
    fn hom_above_cap() {
        let c = arrow();
        let f = c.cell(1, "f").unwrap();
        assert_eq!(c.hom(f, f).count(), 1);
        let a = c.cell(0, "a").unwrap();
        let b = c.cell(0, "b").unwrap();
        assert_eq!(c.hom(a, b).collect::<Vec<_>>(), vec![f]);
        assert_eq!(c.hom(b, a).count(), 0);
    }

    #[test]
    fn missing_unit_is_structural() {
        let mut raw = RawCategory::new(1);
        raw.add_obj("a");
        assert!(matches!(raw.freeze(), Err(OmcError::Structure(_))));
    }

    #[test]
    fn cell_limit() {
        let mut raw = RawCategory::new(0);
        for i in 0..5 {
            raw.add_obj(&format!("x{i}"));
        }
        assert!(matches!(raw.freeze_with_limit(4), Err(OmcError::Budget(_))));
    }
}
