//! Hole patching: window robustification, (c1, c2)-bounded hole filling,
//! percolation-style patching of two-color tilings, and the rank-by-rank
//! error-correction pipeline over robustified sets.
//!
//! Robustification replaces a tile set mu by the set mu' of its valid
//! (2r+1) x (2r+1) windows; side colors encode the shared (2r) x (2r+1)
//! overlap, so neighbor mu'-tiles agree on every overlapping mu-cell and
//! a small hole's surroundings still carry all the information the
//! missing tiles held.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use crate::islands::{clean, CellMask, DirtySet, Island, Schedule};
use crate::tile::{
    check_patch, fill_count, fill_enumerate, fill_first, FillOptions, PatchTiling, Region,
    SearchExploded, Tile, TileId, TileSet,
};

#[derive(Clone, Debug)]
pub struct RobustifiedSet {
    pub base: TileSet,
    /// Window radius: mu'-tiles are (2r+1) x (2r+1) mu-windows.
    pub r: u32,
    /// The derived tile set mu'.
    pub tiles: TileSet,
    /// Per mu'-tile, its mu-window (anchored at the origin).
    pub windows: Vec<PatchTiling>,
    /// Hole-filling constants in macro units: changes stay within c1*D,
    /// context is needed within c2*D.
    pub c1: u32,
    pub c2: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RobustifyError {
    /// mu admits no (2r+1) x (2r+1) window at all.
    NoWindows,
    /// Window enumeration blew the cap; the set is too rich to robustify
    /// exhaustively.
    TooManyWindows { cap: u64 },
}

impl fmt::Display for RobustifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RobustifyError::NoWindows => f.write_str("base set has no full window tiling"),
            RobustifyError::TooManyWindows { cap } => {
                write!(f, "more than {cap} windows; refusing to enumerate")
            }
        }
    }
}

const WINDOW_CAP: u64 = 1 << 16;

/// Build the robustified version of a tile set: tiles are valid windows,
/// side colors are the overlap slices, the projection takes the center.
pub fn robustify(base: &TileSet, r: u32) -> Result<RobustifiedSet, RobustifyError> {
    assert!(r >= 1);
    let side = 2 * r + 1;
    let windows = fill_enumerate(
        base,
        Region::new(0, 0, side, side),
        &FillOptions::default(),
        WINDOW_CAP,
    )
    .expect("window enumeration has no node cap");
    if windows.capped {
        return Err(RobustifyError::TooManyWindows { cap: WINDOW_CAP });
    }
    if windows.solutions.is_empty() {
        return Err(RobustifyError::NoWindows);
    }

    // Overlap slices become colors: a horizontal step shares all columns
    // but one, a vertical step all rows but one.
    let mut colors: BTreeMap<Vec<Option<TileId>>, u32> = BTreeMap::new();
    let mut intern = |slice: Vec<Option<TileId>>| -> u32 {
        let next = colors.len() as u32;
        *colors.entry(slice).or_insert(next)
    };
    let cols = |w: &PatchTiling, from: i64, to: i64| -> Vec<Option<TileId>> {
        let mut v = Vec::new();
        for x in from..=to {
            for y in 0..side as i64 {
                v.push(w.get(x, y));
            }
        }
        v
    };
    let rows = |w: &PatchTiling, from: i64, to: i64| -> Vec<Option<TileId>> {
        let mut v = Vec::new();
        for y in from..=to {
            for x in 0..side as i64 {
                v.push(w.get(x, y));
            }
        }
        v
    };
    let s = side as i64;
    let mut tiles = Vec::new();
    for (i, w) in windows.solutions.iter().enumerate() {
        let left = intern(cols(w, 0, s - 2));
        let right = intern(cols(w, 1, s - 1));
        let bottom = intern(rows(w, 0, s - 2));
        let top = intern(rows(w, 1, s - 1));
        tiles.push(Tile { left, right, top, bottom, label: Some(format!("w{i}")), part: None });
    }
    let mut names = vec![String::new(); colors.len()];
    for (slice, id) in &colors {
        names[*id as usize] = format!("ovl{}#{}", slice.len(), id);
    }
    let tiles = TileSet { name: format!("{}^r{r}", base.name), colors: names, tiles };
    Ok(RobustifiedSet {
        base: base.clone(),
        r,
        tiles,
        windows: windows.solutions,
        c1: 2,
        c2: 3,
    })
}

impl RobustifiedSet {
    /// The projection delta: center cell of the window.
    pub fn project_tile(&self, id: TileId) -> TileId {
        let r = self.r as i64;
        self.windows[id as usize].get(r, r).expect("windows are hole-free")
    }

    /// Apply delta cellwise to a mu'-patch.
    pub fn project(&self, t: &PatchTiling) -> PatchTiling {
        let mut out = PatchTiling::empty(t.region);
        for (x, y) in t.region.cells() {
            out.set(x, y, t.get(x, y).map(|id| self.project_tile(id)));
        }
        out
    }

    /// Lift a valid mu-tiling of an (n+2r) x (n+2r) region to the
    /// mu'-tiling of the inner n x n region, reading off each window.
    pub fn induce(&self, t: &PatchTiling) -> Option<PatchTiling> {
        let r = self.r as i64;
        let side = 2 * self.r + 1;
        let by_window: BTreeMap<&Vec<Option<TileId>>, TileId> = self
            .windows
            .iter()
            .enumerate()
            .map(|(i, w)| (&w.cells, i as TileId))
            .collect();
        let reg = t.region;
        if reg.width < side || reg.height < side {
            return None;
        }
        let inner = Region::new(reg.x0 + r, reg.y0 + r, reg.width - 2 * self.r, reg.height - 2 * self.r);
        let mut out = PatchTiling::empty(inner);
        for (cx, cy) in inner.cells() {
            let mut cells = Vec::with_capacity((side * side) as usize);
            for dy in -r..=r {
                for dx in -r..=r {
                    cells.push(t.get(cx + dx, cy + dy));
                }
            }
            // Window cells are row-major bottom-up, same as enumeration.
            let id = *by_window.get(&cells)?;
            out.set(cx, cy, Some(id));
        }
        Some(out)
    }
}

/// Range of extension counts over all tilings of `region` minus `hole`:
/// for each valid annulus tiling, in how many ways does it extend to the
/// full region? Returns (annulus tilings, min extensions, max extensions).
pub fn hole_extension_range(
    ts: &TileSet,
    region: Region,
    hole: &BTreeSet<(i64, i64)>,
    node_cap: Option<u64>,
) -> Result<(u64, u64, u64), SearchExploded> {
    let opts = FillOptions { holes: hole.clone(), node_cap, ..FillOptions::default() };
    let annuli = fill_enumerate(ts, region, &opts, 1 << 20)?;
    let mut lo = u64::MAX;
    let mut hi = 0u64;
    for a in &annuli.solutions {
        let mut fixed = BTreeMap::new();
        for (x, y) in region.cells() {
            if let Some(t) = a.get(x, y) {
                fixed.insert((x, y), t);
            }
        }
        let count = fill_count(
            ts,
            region,
            &FillOptions { fixed, node_cap, ..FillOptions::default() },
            1 << 20,
        )?;
        lo = lo.min(count.count);
        hi = hi.max(count.count);
    }
    if annuli.solutions.is_empty() {
        lo = 0;
    }
    Ok((annuli.solutions.len() as u64, lo, hi))
}

/// The window-robustness certificate: every mu'-tiling of the
/// (2r+1)-square minus its centered (2r-1)-square extends to the full
/// square in exactly one way.
pub fn check_r_robust(rs: &RobustifiedSet, node_cap: Option<u64>) -> Result<bool, SearchExploded> {
    let side = 2 * rs.r + 1;
    let inner = 2 * rs.r - 1;
    let region = Region::new(0, 0, side, side);
    let mut hole = BTreeSet::new();
    for y in 1..=(inner as i64) {
        for x in 1..=(inner as i64) {
            hole.insert((x, y));
        }
    }
    let (_, lo, hi) = hole_extension_range(&rs.tiles, region, &hole, node_cap)?;
    Ok(lo == 1 && hi == 1)
}

/// One or two rectangular holes plus the (c1, c2) context parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleSpec {
    pub holes: Vec<Region>,
    pub c1: u32,
    pub c2: u32,
}

impl HoleSpec {
    pub fn single(hole: Region, c1: u32, c2: u32) -> Self {
        assert!(c1 < c2);
        HoleSpec { holes: vec![hole], c1, c2 }
    }

    pub fn pair(h1: Region, h2: Region, c1: u32, c2: u32) -> Self {
        assert!(c1 < c2);
        HoleSpec { holes: vec![h1, h2], c1, c2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FillHoleError {
    /// The context annulus itself is broken (violations or missing tiles).
    ContextDamaged(String),
    /// No extension exists within the change budget.
    NoExtension,
    Exploded(SearchExploded),
}

impl fmt::Display for FillHoleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FillHoleError::ContextDamaged(m) => write!(f, "context damaged: {m}"),
            FillHoleError::NoExtension => f.write_str("no extension fills the hole"),
            FillHoleError::Exploded(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HoleFill {
    pub tiling: PatchTiling,
    pub changed: CellMask,
}

fn inflate(r: Region, by: i64, clamp: Region) -> Region {
    let x0 = (r.x0 - by).max(clamp.x0);
    let y0 = (r.y0 - by).max(clamp.y0);
    let x1 = (r.x0 + r.width as i64 + by).min(clamp.x0 + clamp.width as i64);
    let y1 = (r.y0 + r.height as i64 + by).min(clamp.y0 + clamp.height as i64);
    Region::new(x0, y0, (x1 - x0) as u32, (y1 - y0) as u32)
}

fn region_gap(a: Region, b: Region) -> u64 {
    let gap_1d = |a0: i64, a1: i64, b0: i64, b1: i64| -> u64 {
        if b0 > a1 {
            (b0 - a1) as u64
        } else if a0 > b1 {
            (a0 - b1) as u64
        } else {
            0
        }
    };
    let gx = gap_1d(a.x0, a.x0 + a.width as i64 - 1, b.x0, b.x0 + b.width as i64 - 1);
    let gy = gap_1d(a.y0, a.y0 + a.height as i64 - 1, b.y0, b.y0 + b.height as i64 - 1);
    gx.max(gy)
}

fn bounding_box(a: Region, b: Region) -> Region {
    let x0 = a.x0.min(b.x0);
    let y0 = a.y0.min(b.y0);
    let x1 = (a.x0 + a.width as i64).max(b.x0 + b.width as i64);
    let y1 = (a.y0 + a.height as i64).max(b.y0 + b.height as i64);
    Region::new(x0, y0, (x1 - x0) as u32, (y1 - y0) as u32)
}

/// Fill the declared holes, changing tiles only within the c1*D
/// neighborhood of each hole. Two holes within c2*max(D1,D2) of each
/// other are merged and patched as one; distant holes are patched
/// independently. The filler first tries pure constraint filling (only
/// hole cells change); if the boundary admits no such extension it
/// retries with the whole c1*D neighborhood open.
pub fn fill_hole(
    t: &PatchTiling,
    ts: &TileSet,
    spec: &HoleSpec,
) -> Result<HoleFill, FillHoleError> {
    assert!(!spec.holes.is_empty() && spec.holes.len() <= 2);
    let jobs: Vec<Region> = if spec.holes.len() == 2 {
        let (a, b) = (spec.holes[0], spec.holes[1]);
        let dmax = a.width.max(a.height).max(b.width.max(b.height)) as u64;
        if region_gap(a, b) <= spec.c2 as u64 * dmax {
            vec![bounding_box(a, b)]
        } else {
            vec![a, b]
        }
    } else {
        vec![spec.holes[0]]
    };

    let mut work = t.clone();
    let mut changed = CellMask::empty(t.region);
    for hole in jobs {
        patch_one_hole(&mut work, ts, hole, spec.c1, spec.c2)?;
    }
    for (x, y) in t.region.cells() {
        if work.get(x, y) != t.get(x, y) {
            changed.set(x, y);
        }
    }
    Ok(HoleFill { tiling: work, changed })
}

fn patch_one_hole(
    work: &mut PatchTiling,
    ts: &TileSet,
    hole: Region,
    c1: u32,
    c2: u32,
) -> Result<(), FillHoleError> {
    let delta = hole.width.max(hole.height) as i64;
    let near = inflate(hole, c1 as i64 * delta, work.region);
    let context = inflate(hole, c2 as i64 * delta, work.region);

    // Context precondition: outside the hole, the c2*D neighborhood must
    // be fully tiled and internally valid.
    for (x, y) in context.cells() {
        if hole.contains(x, y) {
            continue;
        }
        if work.get(x, y).is_none() {
            return Err(FillHoleError::ContextDamaged(format!("missing tile at ({x},{y})")));
        }
    }
    let mut ctx_patch = PatchTiling::empty(context);
    for (x, y) in context.cells() {
        if !hole.contains(x, y) {
            ctx_patch.set(x, y, work.get(x, y));
        }
    }
    let viol = check_patch(&ctx_patch, ts);
    if !viol.is_empty() {
        return Err(FillHoleError::ContextDamaged(format!(
            "context has {} violations, first at {:?}",
            viol.len(),
            viol[0].cell
        )));
    }

    // Phase 1: constraint filling, only the hole cells open.
    let attempt = |open: &dyn Fn(i64, i64) -> bool| -> Result<Option<PatchTiling>, FillHoleError> {
        let mut opts = FillOptions::default();
        for (x, y) in context.cells() {
            if open(x, y) {
                continue;
            }
            match ctx_patch.get(x, y).or_else(|| work.get(x, y)) {
                Some(tile) => {
                    opts.fixed.insert((x, y), tile);
                }
                None => {
                    opts.holes.insert((x, y));
                }
            }
        }
        match fill_first(ts, context, &opts) {
            Ok(Ok(sol)) => Ok(Some(sol)),
            Ok(Err(_)) => Ok(None),
            Err(e) => Err(FillHoleError::Exploded(e)),
        }
    };

    let sol = match attempt(&|x, y| hole.contains(x, y))? {
        Some(s) => s,
        None => attempt(&|x, y| near.contains(x, y))?.ok_or(FillHoleError::NoExtension)?,
    };
    for (x, y) in context.cells() {
        if near.contains(x, y) {
            work.set(x, y, sol.get(x, y));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatchError {
    BadInput(String),
    /// The schedule left survivors: the window is too dirty.
    ResidualErrors { survivors: usize },
}

impl fmt::Display for PatchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatchError::BadInput(m) => write!(f, "bad input: {m}"),
            PatchError::ResidualErrors { survivors } => {
                write!(f, "{survivors} dirty points survived the schedule")
            }
        }
    }
}

/// Percolation-style patching of a two-color (component-monochrome) tiling
/// with holes at E: decompose E into islands and, rank by rank, repaint
/// the gamma_k-square around each island's anchor with the locally
/// dominant color (majority over the square's boundary ring).
pub fn percolation_patch(
    e: &DirtySet,
    t: &PatchTiling,
    ts: &TileSet,
    sched: &Schedule,
) -> Result<(PatchTiling, CellMask), PatchError> {
    if e.window != t.region {
        return Err(PatchError::BadInput("dirty set window differs from tiling region".into()));
    }
    for (x, y) in t.region.cells() {
        let dirty = e.points.contains(&(x, y));
        if dirty && t.get(x, y).is_some() {
            return Err(PatchError::BadInput(format!("dirty cell ({x},{y}) carries a tile")));
        }
        if !dirty && t.get(x, y).is_none() {
            return Err(PatchError::BadInput(format!("clean cell ({x},{y}) is empty")));
        }
    }
    if !check_patch(t, ts).is_empty() {
        return Err(PatchError::BadInput("input tiling has violations off the holes".into()));
    }

    let d = clean(e, sched);
    if !d.residual.is_empty() {
        return Err(PatchError::ResidualErrors { survivors: d.residual.len() });
    }

    let mut work = t.clone();
    for (k, rank) in d.ranks.iter().enumerate() {
        let gamma = sched.gamma(k) as i64;
        for isl in &rank.islands {
            repaint_square(&mut work, ts, isl, gamma);
        }
    }
    let mut changed = CellMask::empty(t.region);
    for (x, y) in t.region.cells() {
        if work.get(x, y) != t.get(x, y) {
            changed.set(x, y);
        }
    }
    Ok((work, changed))
}

fn repaint_square(work: &mut PatchTiling, ts: &TileSet, isl: &Island, gamma: i64) {
    let (ax, ay) = isl.anchor();
    // Majority color over the boundary ring at distance gamma+1.
    let mut counts = vec![0u64; ts.len()];
    let ring = gamma + 1;
    for dy in -ring..=ring {
        for dx in -ring..=ring {
            if dx.abs().max(dy.abs()) != ring {
                continue;
            }
            if let Some(tile) = work.get(ax + dx, ay + dy) {
                counts[tile as usize] += 1;
            }
        }
    }
    let color = counts
        .iter()
        .enumerate()
        .max_by_key(|(i, c)| (**c, usize::MAX - i))
        .map(|(i, _)| i as TileId)
        .unwrap_or(0);
    for dy in -gamma..=gamma {
        for dx in -gamma..=gamma {
            let (x, y) = (ax + dx, ay + dy);
            if work.region.contains(x, y) {
                work.set(x, y, Some(color));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorrectError {
    ResidualErrors { survivors: usize },
    PreconditionViolated(String),
    Heal { rank: usize, island: usize, cause: FillHoleError },
}

impl fmt::Display for CorrectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrectError::ResidualErrors { survivors } => {
                write!(f, "{survivors} dirty points survived the schedule")
            }
            CorrectError::PreconditionViolated(m) => write!(f, "precondition violated: {m}"),
            CorrectError::Heal { rank, island, cause } => {
                write!(f, "healing island {island} of rank {rank} failed: {cause}")
            }
        }
    }
}

/// Rank-by-rank error correction over a robustified set: clean the dirty
/// set, then heal each island's covering hole in increasing rank via
/// bounded hole filling. Modifications stay within the 2*c1*alpha_k
/// neighborhood of each rank-k island.
pub fn correct_errors(
    t: &PatchTiling,
    e: &DirtySet,
    sched: &Schedule,
    rs: &RobustifiedSet,
) -> Result<PatchTiling, CorrectError> {
    for (k, l) in sched.levels.iter().enumerate() {
        if l.beta <= 4 * rs.c2 * l.alpha {
            return Err(CorrectError::PreconditionViolated(format!(
                "rank {}: beta = {} must exceed 4*c2*alpha = {}",
                k + 1,
                l.beta,
                4 * rs.c2 * l.alpha
            )));
        }
    }
    let d = clean(e, sched);
    if !d.residual.is_empty() {
        return Err(CorrectError::ResidualErrors { survivors: d.residual.len() });
    }
    let mut work = t.clone();
    for (k, rank) in d.ranks.iter().enumerate() {
        let alpha = sched.levels[k].alpha as i64;
        for (i, isl) in rank.islands.iter().enumerate() {
            let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
            for &(x, y) in &isl.points {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
            let hole = Region::new(x0, y0, (x1 - x0 + 1) as u32, (y1 - y0 + 1) as u32);
            let spec = HoleSpec::single(hole, rs.c1, rs.c2);
            let fill = fill_hole(&work, &rs.tiles, &spec)
                .map_err(|cause| CorrectError::Heal { rank: k + 1, island: i, cause })?;
            // Changes stay within the 2*c1*alpha_k neighborhood.
            let limit = inflate(hole, 2 * rs.c1 as i64 * alpha.max(1), t.region);
            for (x, y) in t.region.cells() {
                if fill.changed.get(x, y) {
                    assert!(limit.contains(x, y), "change at ({x},{y}) escapes the budget");
                }
            }
            work = fill.tiling;
        }
    }
    Ok(work)
}
