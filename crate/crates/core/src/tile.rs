//! Tiles, tile sets and finite patch tilings.
//!
//! A tile is a unit square with a color on each side, placed without
//! rotation; adjacent sides must carry equal colors. Orientation is fixed
//! once and for all: x grows rightward, y grows upward, and the match
//! relation is `right(x,y) = left(x+1,y)`, `top(x,y) = bottom(x,y+1)`.
//! Two distinct tiles may share all four colors (they are told apart by
//! their label), so equality of tiles is by index, never by color tuple.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

/// Index into a tile set's color table.
pub type ColorId = u32;
/// Index into a tile set's tile list.
pub type TileId = u32;

/// A nonzero translation vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodVector {
    pub dx: i64,
    pub dy: i64,
}

impl PeriodVector {
    pub fn new(dx: i64, dy: i64) -> Option<Self> {
        if dx == 0 && dy == 0 {
            None
        } else {
            Some(PeriodVector { dx, dy })
        }
    }
}

/// Partition tag used by density experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    pub left: ColorId,
    pub right: ColorId,
    pub top: ColorId,
    pub bottom: ColorId,
    pub label: Option<String>,
    pub part: Option<Part>,
}

impl Tile {
    pub fn new(left: ColorId, right: ColorId, top: ColorId, bottom: ColorId) -> Self {
        Tile { left, right, top, bottom, label: None, part: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_part(mut self, part: Part) -> Self {
        self.part = Some(part);
        self
    }

    fn colors(&self) -> [ColorId; 4] {
        [self.left, self.right, self.top, self.bottom]
    }
}

#[derive(Clone, Debug)]
pub struct TileSet {
    pub name: String,
    pub colors: Vec<String>,
    pub tiles: Vec<Tile>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecError {
    MalformedSpec(String),
    DuplicateTile { first: usize, second: usize },
    ColorOutOfRange { tile: usize, color: ColorId },
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::MalformedSpec(m) => write!(f, "malformed tile-set spec: {m}"),
            SpecError::DuplicateTile { first, second } => {
                write!(f, "tiles {first} and {second} have identical colors and label")
            }
            SpecError::ColorOutOfRange { tile, color } => {
                write!(f, "tile {tile} references color {color} outside the color table")
            }
        }
    }
}

impl TileSet {
    /// Validate and normalize a raw description: every referenced color must
    /// exist, `(colors, label)` pairs must be unique, and unused colors are
    /// compacted away (ids renumbered in order of appearance in the table).
    pub fn validate(
        name: impl Into<String>,
        colors: Vec<String>,
        tiles: Vec<Tile>,
    ) -> Result<TileSet, SpecError> {
        let n = colors.len() as u32;
        let mut seen: BTreeMap<([ColorId; 4], Option<String>), usize> = BTreeMap::new();
        for (i, t) in tiles.iter().enumerate() {
            for c in t.colors() {
                if c >= n {
                    return Err(SpecError::ColorOutOfRange { tile: i, color: c });
                }
            }
            if let Some(&first) = seen.get(&(t.colors(), t.label.clone())) {
                return Err(SpecError::DuplicateTile { first, second: i });
            }
            seen.insert((t.colors(), t.label.clone()), i);
        }
        // Compact the color table to the referenced subset.
        let mut used = vec![false; colors.len()];
        for t in &tiles {
            for c in t.colors() {
                used[c as usize] = true;
            }
        }
        let mut remap = vec![0u32; colors.len()];
        let mut compact = Vec::new();
        for (i, keep) in used.iter().enumerate() {
            if *keep {
                remap[i] = compact.len() as u32;
                compact.push(colors[i].clone());
            }
        }
        let tiles = tiles
            .into_iter()
            .map(|mut t| {
                t.left = remap[t.left as usize];
                t.right = remap[t.right as usize];
                t.top = remap[t.top as usize];
                t.bottom = remap[t.bottom as usize];
                t
            })
            .collect();
        Ok(TileSet { name: name.into(), colors: compact, tiles })
    }

    pub fn tile(&self, id: TileId) -> &Tile {
        &self.tiles[id as usize]
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Index of the tile with the given label, if any.
    pub fn find_label(&self, label: &str) -> Option<TileId> {
        self.tiles
            .iter()
            .position(|t| t.label.as_deref() == Some(label))
            .map(|i| i as TileId)
    }
}

/// A rectangle of grid cells; x grows rightward, y grows upward.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub x0: i64,
    pub y0: i64,
    pub width: u32,
    pub height: u32,
}

impl Region {
    pub fn new(x0: i64, y0: i64, width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "region must be at least 1x1");
        Region { x0, y0, width, height }
    }

    pub fn area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x0
            && y >= self.y0
            && x < self.x0 + self.width as i64
            && y < self.y0 + self.height as i64
    }

    /// Row-major cell index from the bottom-left corner.
    pub fn index(&self, x: i64, y: i64) -> usize {
        debug_assert!(self.contains(x, y));
        ((y - self.y0) as usize) * self.width as usize + (x - self.x0) as usize
    }

    /// Cells in row-major order from the bottom-left corner.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> {
        let r = *self;
        (0..r.height as i64)
            .flat_map(move |dy| (0..r.width as i64).map(move |dx| (r.x0 + dx, r.y0 + dy)))
    }
}

/// Assignment of tiles to a finite region; `None` cells are holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchTiling {
    pub region: Region,
    pub cells: Vec<Option<TileId>>,
}

impl PatchTiling {
    pub fn empty(region: Region) -> Self {
        PatchTiling { region, cells: vec![None; region.area() as usize] }
    }

    pub fn filled(region: Region, cells: Vec<Option<TileId>>) -> Self {
        assert_eq!(cells.len() as u64, region.area());
        PatchTiling { region, cells }
    }

    pub fn get(&self, x: i64, y: i64) -> Option<TileId> {
        if self.region.contains(x, y) {
            self.cells[self.region.index(x, y)]
        } else {
            None
        }
    }

    pub fn set(&mut self, x: i64, y: i64, t: Option<TileId>) {
        let i = self.region.index(x, y);
        self.cells[i] = t;
    }

    pub fn hole_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }
}

/// Which shared edge a violation sits on, seen from the reported cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Right,
    Top,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub cell: (i64, i64),
    pub neighbor: (i64, i64),
    pub side: Side,
}

/// Every adjacent non-hole pair whose shared edge colors differ. Edges
/// incident to holes are never violations. Empty iff the patch is a valid
/// partial tiling.
pub fn check_patch(t: &PatchTiling, ts: &TileSet) -> Vec<Violation> {
    let mut out = Vec::new();
    for (x, y) in t.region.cells() {
        let Some(a) = t.get(x, y) else { continue };
        if t.region.contains(x + 1, y) {
            if let Some(b) = t.get(x + 1, y) {
                if ts.tile(a).right != ts.tile(b).left {
                    out.push(Violation { cell: (x, y), neighbor: (x + 1, y), side: Side::Right });
                }
            }
        }
        if t.region.contains(x, y + 1) {
            if let Some(b) = t.get(x, y + 1) {
                if ts.tile(a).top != ts.tile(b).bottom {
                    out.push(Violation { cell: (x, y), neighbor: (x, y + 1), side: Side::Top });
                }
            }
        }
    }
    out
}

/// Optional color constraints on the outer boundary of a region, indexed
/// along each edge (bottom-to-top for left/right, left-to-right for
/// bottom/top).
#[derive(Clone, Debug, Default)]
pub struct Boundary {
    pub left: Option<Vec<Option<ColorId>>>,
    pub right: Option<Vec<Option<ColorId>>>,
    pub bottom: Option<Vec<Option<ColorId>>>,
    pub top: Option<Vec<Option<ColorId>>>,
}

#[derive(Clone, Debug, Default)]
pub struct FillOptions {
    pub boundary: Boundary,
    /// Cells left unconstrained and unfilled.
    pub holes: BTreeSet<(i64, i64)>,
    /// Cells whose tile is imposed up front.
    pub fixed: BTreeMap<(i64, i64), TileId>,
    /// Match left-right and bottom-top across the region seam (torus search).
    pub wrap: bool,
    /// Abort the search after this many visited nodes.
    pub node_cap: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoSolution;

impl fmt::Display for NoSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("no tiling satisfies the constraints")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchExploded {
    pub nodes: u64,
}

impl fmt::Display for SearchExploded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "search node cap reached after {} nodes", self.nodes)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub count: u64,
    /// True if the count cap stopped the search: read as "count >= cap".
    pub at_least: bool,
}

#[derive(Clone, Debug)]
pub struct EnumResult {
    pub solutions: Vec<PatchTiling>,
    pub capped: bool,
}

struct Searcher<'a> {
    ts: &'a TileSet,
    region: Region,
    opts: &'a FillOptions,
    by_lb: BTreeMap<(ColorId, ColorId), Vec<TileId>>,
    by_l: BTreeMap<ColorId, Vec<TileId>>,
    by_b: BTreeMap<ColorId, Vec<TileId>>,
    all: Vec<TileId>,
    cells: Vec<Option<TileId>>,
    order: Vec<(i64, i64)>,
    nodes: u64,
}

enum Flow {
    Continue,
    Stop,
}

impl<'a> Searcher<'a> {
    fn new(ts: &'a TileSet, region: Region, opts: &'a FillOptions) -> Self {
        let mut by_lb: BTreeMap<(ColorId, ColorId), Vec<TileId>> = BTreeMap::new();
        let mut by_l: BTreeMap<ColorId, Vec<TileId>> = BTreeMap::new();
        let mut by_b: BTreeMap<ColorId, Vec<TileId>> = BTreeMap::new();
        let mut all = Vec::with_capacity(ts.len());
        for (i, t) in ts.tiles.iter().enumerate() {
            let id = i as TileId;
            by_lb.entry((t.left, t.bottom)).or_default().push(id);
            by_l.entry(t.left).or_default().push(id);
            by_b.entry(t.bottom).or_default().push(id);
            all.push(id);
        }
        let order: Vec<(i64, i64)> =
            region.cells().filter(|c| !opts.holes.contains(c)).collect();
        Searcher {
            ts,
            region,
            opts,
            by_lb,
            by_l,
            by_b,
            all,
            cells: vec![None; region.area() as usize],
            order,
            nodes: 0,
        }
    }

    fn placed(&self, x: i64, y: i64) -> Option<TileId> {
        if self.region.contains(x, y) {
            self.cells[self.region.index(x, y)]
        } else {
            None
        }
    }

    fn edge_index_v(&self, y: i64) -> usize {
        (y - self.region.y0) as usize
    }

    fn edge_index_h(&self, x: i64) -> usize {
        (x - self.region.x0) as usize
    }

    /// Tile admissible at (x, y) under already-placed neighbors, boundary
    /// constraints and wrap seams.
    fn admissible(&self, x: i64, y: i64, t: &Tile) -> bool {
        let r = self.region;
        let (x1, y1) = (r.x0 + r.width as i64 - 1, r.y0 + r.height as i64 - 1);
        if x == r.x0 {
            if let Some(ref c) = self.opts.boundary.left {
                if let Some(req) = c[self.edge_index_v(y)] {
                    if t.left != req {
                        return false;
                    }
                }
            }
        }
        if y == r.y0 {
            if let Some(ref c) = self.opts.boundary.bottom {
                if let Some(req) = c[self.edge_index_h(x)] {
                    if t.bottom != req {
                        return false;
                    }
                }
            }
        }
        if x == x1 {
            if let Some(ref c) = self.opts.boundary.right {
                if let Some(req) = c[self.edge_index_v(y)] {
                    if t.right != req {
                        return false;
                    }
                }
            }
            if self.opts.wrap {
                // For width-1 regions the seam closes on the tile itself.
                let first_left =
                    if r.x0 == x { Some(t.left) } else { self.placed(r.x0, y).map(|f| self.ts.tile(f).left) };
                if let Some(req) = first_left {
                    if t.right != req {
                        return false;
                    }
                }
            }
        }
        if y == y1 {
            if let Some(ref c) = self.opts.boundary.top {
                if let Some(req) = c[self.edge_index_h(x)] {
                    if t.top != req {
                        return false;
                    }
                }
            }
            if self.opts.wrap {
                let first_bottom =
                    if r.y0 == y { Some(t.bottom) } else { self.placed(x, r.y0).map(|f| self.ts.tile(f).bottom) };
                if let Some(req) = first_bottom {
                    if t.top != req {
                        return false;
                    }
                }
            }
        }
        // Right/top neighbors may already exist from `fixed` pre-assignments.
        if let Some(nb) = self.placed(x + 1, y) {
            if t.right != self.ts.tile(nb).left {
                return false;
            }
        }
        if let Some(nb) = self.placed(x, y + 1) {
            if t.top != self.ts.tile(nb).bottom {
                return false;
            }
        }
        true
    }

    fn search(&mut self, depth: usize, visit: &mut dyn FnMut(&PatchTiling) -> Flow) -> Result<Flow, SearchExploded> {
        if depth == self.order.len() {
            let sol = PatchTiling::filled(self.region, self.cells.clone());
            return Ok(visit(&sol));
        }
        let (x, y) = self.order[depth];
        self.nodes += 1;
        if let Some(cap) = self.opts.node_cap {
            if self.nodes > cap {
                return Err(SearchExploded { nodes: self.nodes });
            }
        }
        let left_req = if x > self.region.x0 && !self.opts.holes.contains(&(x - 1, y)) {
            self.placed(x - 1, y).map(|t| self.ts.tile(t).right)
        } else {
            None
        };
        let bottom_req = if y > self.region.y0 && !self.opts.holes.contains(&(x, y - 1)) {
            self.placed(x, y - 1).map(|t| self.ts.tile(t).top)
        } else {
            None
        };
        static EMPTY: Vec<TileId> = Vec::new();
        let fixed = self.opts.fixed.get(&(x, y)).copied();
        let cands: &Vec<TileId> = match (left_req, bottom_req) {
            (Some(l), Some(b)) => self.by_lb.get(&(l, b)).unwrap_or(&EMPTY),
            (Some(l), None) => self.by_l.get(&l).unwrap_or(&EMPTY),
            (None, Some(b)) => self.by_b.get(&b).unwrap_or(&EMPTY),
            (None, None) => &self.all,
        };
        let cands = cands.clone();
        let idx = self.region.index(x, y);
        for id in cands {
            if let Some(fx) = fixed {
                if id != fx {
                    continue;
                }
            }
            if !self.admissible(x, y, self.ts.tile(id)) {
                continue;
            }
            self.cells[idx] = Some(id);
            match self.search(depth + 1, visit)? {
                Flow::Stop => {
                    self.cells[idx] = None;
                    return Ok(Flow::Stop);
                }
                Flow::Continue => {}
            }
        }
        self.cells[idx] = None;
        Ok(Flow::Continue)
    }
}

/// First solution in canonical (row-major, tile-id lexicographic) order.
pub fn fill_first(
    ts: &TileSet,
    region: Region,
    opts: &FillOptions,
) -> Result<Result<PatchTiling, NoSolution>, SearchExploded> {
    let mut found = None;
    let mut s = Searcher::new(ts, region, opts);
    s.search(0, &mut |sol| {
        found = Some(sol.clone());
        Flow::Stop
    })?;
    Ok(found.ok_or(NoSolution))
}

/// Exact solution count, stopping at `cap` ("count >= cap").
pub fn fill_count(
    ts: &TileSet,
    region: Region,
    opts: &FillOptions,
    cap: u64,
) -> Result<CountResult, SearchExploded> {
    assert!(cap >= 1);
    let mut count = 0u64;
    let mut s = Searcher::new(ts, region, opts);
    s.search(0, &mut |_| {
        count += 1;
        if count >= cap {
            Flow::Stop
        } else {
            Flow::Continue
        }
    })?;
    Ok(CountResult { count, at_least: count >= cap })
}

/// All solutions up to `cap`, canonical order.
pub fn fill_enumerate(
    ts: &TileSet,
    region: Region,
    opts: &FillOptions,
    cap: u64,
) -> Result<EnumResult, SearchExploded> {
    assert!(cap >= 1);
    let mut sols = Vec::new();
    let mut s = Searcher::new(ts, region, opts);
    s.search(0, &mut |sol| {
        sols.push(sol.clone());
        if sols.len() as u64 >= cap {
            Flow::Stop
        } else {
            Flow::Continue
        }
    })?;
    let capped = sols.len() as u64 >= cap;
    Ok(EnumResult { solutions: sols, capped })
}

/// An m x m patch whose left column matches its right column and whose
/// bottom row matches its top row, i.e. a tiling of the plane with periods
/// (m,0) and (0,m).
pub fn torus_tiling(ts: &TileSet, m: u32) -> Result<PatchTiling, NoSolution> {
    assert!(m >= 1);
    let opts = FillOptions { wrap: true, ..FillOptions::default() };
    fill_first(ts, Region::new(0, 0, m, m), &opts)
        .expect("torus search has no node cap")
}

/// Smallest m <= m_max admitting a torus tiling.
pub fn min_torus_period(ts: &TileSet, m_max: u32) -> Option<u32> {
    (1..=m_max).find(|&m| torus_tiling(ts, m).is_ok())
}

/// Exact rational with a reduced u64 numerator/denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Frac {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0);
        let g = gcd(num, den).max(1);
        Frac { num: num / g, den: den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DensityError {
    NoSolution,
    UntaggedTile(usize),
}

impl fmt::Display for DensityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityError::NoSolution => f.write_str("no n x n tiling exists"),
            DensityError::UntaggedTile(i) => write!(f, "tile {i} carries no A/B partition tag"),
        }
    }
}

/// Exact minimum and maximum fraction of A-tiles over all tilings of the
/// n x n square. Exhaustive; meant for small n and small tile sets.
pub fn density_bounds(ts: &TileSet, n: u32) -> Result<(Frac, Frac), DensityError> {
    for (i, t) in ts.tiles.iter().enumerate() {
        if t.part.is_none() {
            return Err(DensityError::UntaggedTile(i));
        }
    }
    let region = Region::new(0, 0, n, n);
    let opts = FillOptions::default();
    let mut min_a: Option<u64> = None;
    let mut max_a: Option<u64> = None;
    let mut s = Searcher::new(ts, region, &opts);
    s.search(0, &mut |sol| {
        let a = sol
            .cells
            .iter()
            .filter(|c| matches!(ts.tile(c.unwrap()).part, Some(Part::A)))
            .count() as u64;
        min_a = Some(min_a.map_or(a, |m| m.min(a)));
        max_a = Some(max_a.map_or(a, |m| m.max(a)));
        Flow::Continue
    })
    .expect("density search has no node cap");
    match (min_a, max_a) {
        (Some(lo), Some(hi)) => {
            let area = region.area();
            Ok((Frac::new(lo, area), Frac::new(hi, area)))
        }
        _ => Err(DensityError::NoSolution),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownName(pub String);

impl fmt::Display for UnknownName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown builtin tile set: {}", self.0)
    }
}

/// Built-in example tile sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// One tile with four white sides.
    Example1,
    /// N^2 tiles indexed by coordinate pairs (i,j) mod N; forces an N x N
    /// grid structure.
    Example2(u32),
    /// Two tiles, one with all black sides and one with all white sides.
    Chessboard,
    /// Coordinate grid of zoom N = 2^j plus a Thue-Morse letter layer: each
    /// N x N block is a Thue-Morse image of a free block letter.
    ThueMorseBlock(u32),
}

pub fn builtin(which: Builtin) -> TileSet {
    match which {
        Builtin::Example1 => {
            let colors = vec!["white".to_string()];
            let tiles = vec![Tile::new(0, 0, 0, 0).with_label("white")];
            TileSet::validate("example1", colors, tiles).unwrap()
        }
        Builtin::Chessboard => {
            let colors = vec!["black".to_string(), "white".to_string()];
            let tiles = vec![
                Tile::new(0, 0, 0, 0).with_label("black").with_part(Part::A),
                Tile::new(1, 1, 1, 1).with_label("white").with_part(Part::B),
            ];
            TileSet::validate("chessboard", colors, tiles).unwrap()
        }
        Builtin::Example2(n) => {
            assert!(n >= 2, "example2 needs N >= 2");
            let color = |i: u32, j: u32| (i % n) * n + (j % n);
            let colors = (0..n)
                .flat_map(|i| (0..n).map(move |j| format!("({i},{j})")))
                .collect();
            let mut tiles = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    tiles.push(
                        Tile::new(color(i, j), color(i + 1, j), color(i, j + 1), color(i, j))
                            .with_label(format!("({i},{j})")),
                    );
                }
            }
            TileSet::validate(format!("example2({n})"), colors, tiles).unwrap()
        }
        Builtin::ThueMorseBlock(n) => crate::compiler::thue_morse_block(n),
    }
}

/// Parse names like `chessboard`, `example1`, `example2(4)`,
/// `thue_morse_block(4)`.
pub fn builtin_by_name(name: &str) -> Result<TileSet, UnknownName> {
    let parse_arg = |s: &str, prefix: &str| -> Option<u32> {
        s.strip_prefix(prefix)?
            .strip_prefix('(')?
            .strip_suffix(')')?
            .parse()
            .ok()
    };
    match name {
        "chessboard" => Ok(builtin(Builtin::Chessboard)),
        "example1" => Ok(builtin(Builtin::Example1)),
        _ => {
            if let Some(n) = parse_arg(name, "example2") {
                if n >= 2 {
                    return Ok(builtin(Builtin::Example2(n)));
                }
            }
            if let Some(n) = parse_arg(name, "thue_morse_block") {
                if n >= 2 && n.is_power_of_two() {
                    return Ok(builtin(Builtin::ThueMorseBlock(n)));
                }
            }
            Err(UnknownName(name.to_string()))
        }
    }
}

/// The unique Example-2 tiling pattern with the given offset: cell (x,y)
/// carries the tile labelled ((x+ox) mod N, (y+oy) mod N).
pub fn example2_patch(n: u32, region: Region, ox: i64, oy: i64) -> PatchTiling {
    let nn = n as i64;
    let mut p = PatchTiling::empty(region);
    for (x, y) in region.cells() {
        let i = (x + ox).rem_euclid(nn) as u32;
        let j = (y + oy).rem_euclid(nn) as u32;
        p.set(x, y, Some(i * n + j));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chess() -> TileSet {
        builtin(Builtin::Chessboard)
    }

    #[test]
    fn validate_compacts_and_rejects() {
        let ts = TileSet::validate(
            "t",
            vec!["a".into(), "unused".into(), "b".into()],
            vec![Tile::new(0, 0, 2, 2)],
        )
        .unwrap();
        assert_eq!(ts.colors, vec!["a".to_string(), "b".to_string()]);
        assert_eq!(ts.tiles[0].top, 1);

        let err = TileSet::validate("t", vec!["a".into(), "b".into()], vec![Tile::new(0, 0, 5, 0)]);
        assert_eq!(err.unwrap_err(), SpecError::ColorOutOfRange { tile: 0, color: 5 });

        let err = TileSet::validate(
            "t",
            vec!["a".into()],
            vec![Tile::new(0, 0, 0, 0), Tile::new(0, 0, 0, 0)],
        );
        assert_eq!(err.unwrap_err(), SpecError::DuplicateTile { first: 0, second: 1 });

        // Same colors, different labels: allowed.
        assert!(TileSet::validate(
            "t",
            vec!["a".into()],
            vec![Tile::new(0, 0, 0, 0).with_label("x"), Tile::new(0, 0, 0, 0).with_label("y")],
        )
        .is_ok());
    }

    #[test]
    fn builtins_have_expected_sizes() {
        assert_eq!(builtin(Builtin::Example1).len(), 1);
        assert_eq!(chess().len(), 2);
        assert_eq!(chess().colors.len(), 2);
        assert_eq!(builtin(Builtin::Example2(4)).len(), 16);
        assert!(builtin_by_name("example2(4)").unwrap().len() == 16);
        assert!(builtin_by_name("nope").is_err());
    }

    #[test]
    fn check_patch_reports_mismatches() {
        let ts = chess();
        let r = Region::new(0, 0, 2, 1);
        let mut p = PatchTiling::empty(r);
        p.set(0, 0, Some(0));
        p.set(1, 0, Some(0));
        assert!(check_patch(&p, &ts).is_empty());
        p.set(1, 0, Some(1));
        let v = check_patch(&p, &ts);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0], Violation { cell: (0, 0), neighbor: (1, 0), side: Side::Right });
        // Holes never create violations.
        p.set(1, 0, None);
        assert!(check_patch(&p, &ts).is_empty());
    }

    #[test]
    fn example2_translates_cleanly() {
        let ts = builtin(Builtin::Example2(4));
        let p = example2_patch(4, Region::new(1, 0, 3, 3), 0, 0);
        assert!(check_patch(&p, &ts).is_empty());
    }

    #[test]
    fn fill_counts_match_expectations() {
        let r = Region::new(0, 0, 2, 2);
        let opts = FillOptions::default();
        assert_eq!(
            fill_count(&chess(), r, &opts, 1000).unwrap(),
            CountResult { count: 2, at_least: false }
        );
        let ex2 = builtin(Builtin::Example2(2));
        assert_eq!(fill_count(&ex2, r, &opts, 1000).unwrap().count, 4);
        let ex1 = builtin(Builtin::Example1);
        assert_eq!(fill_count(&ex1, Region::new(0, 0, 3, 2), &opts, 1000).unwrap().count, 1);
    }

    #[test]
    fn fill_enumerate_outputs_are_valid() {
        let ex2 = builtin(Builtin::Example2(2));
        let r = Region::new(0, 0, 3, 3);
        let res = fill_enumerate(&ex2, r, &FillOptions::default(), 100).unwrap();
        assert_eq!(res.solutions.len(), 4);
        for s in &res.solutions {
            assert!(check_patch(&s, &ex2).is_empty());
        }
    }

    #[test]
    fn count_cap_reports_at_least() {
        let res = fill_count(&chess(), Region::new(0, 0, 2, 2), &FillOptions::default(), 1)
            .unwrap();
        assert_eq!(res, CountResult { count: 1, at_least: true });
    }

    #[test]
    fn holes_are_left_unfilled() {
        let mut opts = FillOptions::default();
        opts.holes.insert((1, 1));
        let sol = fill_first(&chess(), Region::new(0, 0, 2, 2), &opts)
            .unwrap()
            .unwrap();
        assert_eq!(sol.get(1, 1), None);
        assert_eq!(sol.hole_count(), 1);
    }

    #[test]
    fn torus_periods() {
        let t = torus_tiling(&chess(), 1).unwrap();
        assert_eq!(t.cells, vec![Some(0)]); // all-black 1x1
        assert_eq!(min_torus_period(&chess(), 4), Some(1));
        let ex2 = builtin(Builtin::Example2(4));
        assert!(torus_tiling(&ex2, 3).is_err());
        assert!(torus_tiling(&ex2, 4).is_ok());
        assert_eq!(min_torus_period(&ex2, 4), Some(4));
        assert_eq!(min_torus_period(&builtin(Builtin::Example2(3)), 4), Some(3));
    }

    #[test]
    fn torus_patch_unrolls() {
        let ex2 = builtin(Builtin::Example2(2));
        let t = torus_tiling(&ex2, 2).unwrap();
        // Unroll the 2x2 torus patch over a 6x6 window and check validity.
        let r = Region::new(0, 0, 6, 6);
        let mut big = PatchTiling::empty(r);
        for (x, y) in r.cells() {
            big.set(x, y, t.get(x.rem_euclid(2), y.rem_euclid(2)));
        }
        assert!(check_patch(&big, &ex2).is_empty());
    }

    #[test]
    fn density_bounds_examples() {
        let (lo, hi) = density_bounds(&chess(), 2).unwrap();
        assert_eq!((lo, hi), (Frac::new(0, 1), Frac::new(1, 1)));

        // Tag the (0,0)-tile of example2(2) as A, everything else B.
        let mut ex2 = builtin(Builtin::Example2(2));
        for (i, t) in ex2.tiles.iter_mut().enumerate() {
            t.part = Some(if i == 0 { Part::A } else { Part::B });
        }
        assert_eq!(density_bounds(&ex2, 2).unwrap(), (Frac::new(1, 4), Frac::new(1, 4)));
        assert_eq!(density_bounds(&ex2, 3).unwrap(), (Frac::new(1, 9), Frac::new(4, 9)));

        let ex1 = builtin(Builtin::Example1);
        assert!(matches!(density_bounds(&ex1, 2), Err(DensityError::UntaggedTile(0))));
    }

    #[test]
    fn boundary_constraints_apply() {
        let ts = chess();
        let mut opts = FillOptions::default();
        // Force the left boundary of a 2x1 strip to be white.
        opts.boundary.left = Some(vec![Some(1)]);
        let sol = fill_first(&ts, Region::new(0, 0, 2, 1), &opts).unwrap().unwrap();
        assert_eq!(sol.get(0, 0), Some(1));
    }

    #[test]
    fn node_cap_explodes() {
        let ex2 = builtin(Builtin::Example2(4));
        let opts = FillOptions { node_cap: Some(3), ..FillOptions::default() };
        assert!(fill_count(&ex2, Region::new(0, 0, 4, 4), &opts, 1000).is_err());
    }
}
