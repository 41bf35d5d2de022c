//! Compilation of checker machines into tile sets.
//!
//! A compiled tile carries two superimposed layers: an Example-2 style
//! coordinate layer that forces the N x N block structure, and a payload
//! layer that is nonzero only where the construction needs it. Macro-tile
//! border edges carry single bits (zero outside the k centered cells),
//! wire cells propagate one bit unchanged along their path, and zone
//! cells encode a machine configuration cell plus the horizontal pair
//! overlaps that make the time-space diagram a purely local condition:
//!
//! - the bottom/top edges of a zone cell carry this row's / next row's
//!   cell content at that column;
//! - the left/right edges carry the (left, right) content pair of the
//!   current row, so neighbor tiles agree on a 3-wide window and the
//!   next-row content is a function of that window.
//!
//! A configuration freezes once the machine accepts; the top zone row
//! only exists in frozen form, so a macro-tile assembles exactly when the
//! machine accepts the four side strings within the zone budget.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use crate::layout::{plan_layout, Layout, LayoutInfeasible};
use crate::machine::{bit_sym, Cell, CheckerMachine, InputLayout, LetterSpec, RunError, Tableau};
use crate::macro_sim::{check_simulation, MacroTile, SimulationMap, SimulationReport};
use crate::substitution::{iterate, LetterPattern, SubstitutionRule};
use crate::tile::{ColorId, Part, PatchTiling, Region, Tile, TileId, TileSet};

/// Payload carried by one edge of a compiled tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Payload {
    Inert,
    Bit(u8),
    /// Zone vertical edge: one configuration cell.
    Content(Cell),
    /// Zone horizontal edge: the (here, right-neighbor) content pair.
    Pair(Cell, Cell),
}

impl Payload {
    fn describe(&self) -> String {
        fn cell(c: &Cell) -> String {
            match c.head {
                Some(q) => format!("{}.{}q{q}", c.sym, c.prog),
                None => format!("{}.{}", c.sym, c.prog),
            }
        }
        match self {
            Payload::Inert => ".".into(),
            Payload::Bit(b) => format!("b{b}"),
            Payload::Content(c) => format!("c{}", cell(c)),
            Payload::Pair(a, b) => format!("p{}|{}", cell(a), cell(b)),
        }
    }
}

/// What a compiled tile is, for decoding and diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Role {
    Filler,
    /// Border cell outside the centered bit cells.
    Border,
    /// Wire cell: path index, position along the path, carried bit.
    Wire { wire: usize, pos: usize, bit: u8 },
    /// Zone cell: zone-local coordinates and configuration content.
    Zone { zx: u32, zt: u32, content: Cell },
    /// Letter-layer cell (substitution compilation).
    Letter { own: u8, father: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileInfo {
    pub i: u32,
    pub j: u32,
    pub role: Role,
}

/// Where a compiled set came from.
#[derive(Clone, Debug)]
pub enum Provenance {
    Checker { machine: CheckerMachine, layout: Layout },
    Letters { rule: SubstitutionRule, iterations: u32 },
}

#[derive(Clone, Debug)]
pub struct CompiledTileSet {
    pub tiles: TileSet,
    pub n: u32,
    pub provenance: Provenance,
    /// Parallel to `tiles.tiles`.
    pub info: Vec<TileInfo>,
    index: BTreeMap<(u32, u32, [Payload; 4], Option<u8>), TileId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompileError {
    Layout(LayoutInfeasible),
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompileError::Layout(l) => write!(f, "{l}"),
        }
    }
}

impl From<LayoutInfeasible> for CompileError {
    fn from(l: LayoutInfeasible) -> Self {
        CompileError::Layout(l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssembleError {
    RejectedByProgram(RunError),
    TimeBudgetExceeded,
    BadSideLength { expected: u32, got: usize },
    WrongKind,
    UnknownLetter(u8),
}

impl fmt::Display for AssembleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssembleError::RejectedByProgram(e) => write!(f, "rejected by program: {e}"),
            AssembleError::TimeBudgetExceeded => f.write_str("machine ran past the zone height"),
            AssembleError::BadSideLength { expected, got } => {
                write!(f, "side strings must have {expected} bits, got {got}")
            }
            AssembleError::WrongKind => f.write_str("operation does not apply to this set"),
            AssembleError::UnknownLetter(l) => write!(f, "letter {l} outside the rule alphabet"),
        }
    }
}

/// Interns (coordinate pair, payload, letter) triples as colors.
struct ColorTable {
    n: u32,
    map: BTreeMap<(u32, u32, Payload, Option<u8>), ColorId>,
    names: Vec<String>,
}

impl ColorTable {
    fn new(n: u32) -> Self {
        ColorTable { n, map: BTreeMap::new(), names: Vec::new() }
    }

    fn get(&mut self, a: u32, b: u32, p: Payload, letter: Option<u8>) -> ColorId {
        let key = (a % self.n, b % self.n, p, letter);
        if let Some(&id) = self.map.get(&key) {
            return id;
        }
        let id = self.names.len() as ColorId;
        let mut name = format!("({},{})|{}", key.0, key.1, key.2.describe());
        if let Some(l) = letter {
            name.push_str(&format!("|f{l}"));
        }
        self.map.insert(key, id);
        self.names.push(name);
        id
    }
}

struct TileBuilder {
    n: u32,
    colors: ColorTable,
    tiles: Vec<Tile>,
    info: Vec<TileInfo>,
    index: BTreeMap<(u32, u32, [Payload; 4], Option<u8>), TileId>,
}

impl TileBuilder {
    fn new(n: u32) -> Self {
        TileBuilder {
            n,
            colors: ColorTable::new(n),
            tiles: Vec::new(),
            info: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    /// Add (or find) the tile at (i, j) with edge payloads
    /// [left, right, bottom, top] and an optional father letter exhibited
    /// on interior edges. Coordinate components follow the Example-2
    /// convention: the left/bottom edges carry (i, j), the right/top
    /// edges (i+1, j) / (i, j+1) modulo N.
    fn add(&mut self, i: u32, j: u32, p: [Payload; 4], letter: Option<u8>, role: Role) -> TileId {
        let key = (i, j, p, letter);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let n = self.n;
        let lt = |border: bool| if border { None } else { letter };
        let left = self.colors.get(i, j, p[0], lt(i == 0));
        let right = self.colors.get(i + 1, j, p[1], lt(i + 1 == n));
        let bottom = self.colors.get(i, j, p[2], lt(j == 0));
        let top = self.colors.get(i, j + 1, p[3], lt(j + 1 == n));
        let id = self.tiles.len() as TileId;
        self.tiles.push(Tile {
            left,
            right,
            top,
            bottom,
            label: Some(format!("{i},{j}:{}", role_label(&role))),
            part: None,
        });
        self.info.push(TileInfo { i, j, role });
        self.index.insert(key, id);
        id
    }

    fn finish(self, name: String, n: u32, provenance: Provenance) -> CompiledTileSet {
        let tiles = TileSet { name, colors: self.colors.names, tiles: self.tiles };
        CompiledTileSet { tiles, n, provenance, info: self.info, index: self.index }
    }
}

fn role_label(r: &Role) -> String {
    match r {
        Role::Filler => "fill".into(),
        Role::Border => "brd".into(),
        Role::Wire { wire, pos, bit } => format!("w{wire}.{pos}={bit}"),
        Role::Zone { zx, zt, .. } => format!("z{zx},{zt}"),
        Role::Letter { own, father } => format!("a{own}<f{father}"),
    }
}

fn border_payloads(n: u32, i: u32, j: u32) -> [Payload; 4] {
    let mut p = [Payload::Inert; 4];
    if i == 0 {
        p[0] = Payload::Bit(0);
    }
    if i == n - 1 {
        p[1] = Payload::Bit(0);
    }
    if j == 0 {
        p[2] = Payload::Bit(0);
    }
    if j == n - 1 {
        p[3] = Payload::Bit(0);
    }
    p
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CellClass {
    Zone { zx: u32, zt: u32 },
    Wire { wire: usize, pos: usize },
    Border,
    Filler,
}

fn classify(layout: &Layout, wire_map: &BTreeMap<(u32, u32), (usize, usize)>, i: u32, j: u32) -> CellClass {
    let (x, y) = (i as i64, j as i64);
    if layout.zone.contains(x, y) {
        return CellClass::Zone {
            zx: (x - layout.zone.x0) as u32,
            zt: (y - layout.zone.y0) as u32,
        };
    }
    if let Some(&(w, pos)) = wire_map.get(&(i, j)) {
        return CellClass::Wire { wire: w, pos };
    }
    if i == 0 || j == 0 || i == layout.n - 1 || j == layout.n - 1 {
        return CellClass::Border;
    }
    CellClass::Filler
}

fn wire_cell_map(layout: &Layout) -> BTreeMap<(u32, u32), (usize, usize)> {
    let mut m = BTreeMap::new();
    for (w, wire) in layout.wires.iter().enumerate() {
        for (pos, &c) in wire.cells.iter().enumerate() {
            m.insert(c, (w, pos));
        }
    }
    m
}

/// Edge payloads of a wire cell carrying bit `b`: the bit rides on the
/// two path-adjacent edges (border edge at the start, zone delivery edge
/// at the end), everything else is inert.
fn wire_payloads(layout: &Layout, w: usize, pos: usize, b: u8) -> [Payload; 4] {
    let wire = &layout.wires[w];
    let cells = &wire.cells;
    let (i, j) = cells[pos];
    let mut p = [Payload::Inert; 4];
    let mut mark = |to: (u32, u32)| {
        let side = if to.0 + 1 == i {
            0
        } else if to.0 == i + 1 {
            1
        } else if to.1 + 1 == j {
            2
        } else {
            3
        };
        p[side] = Payload::Bit(b);
    };
    if pos > 0 {
        mark(cells[pos - 1]);
    }
    if pos + 1 < cells.len() {
        mark(cells[pos + 1]);
    } else {
        p[3] = Payload::Bit(b); // delivery into the zone above
    }
    if pos == 0 {
        p[wire.side as usize] = Payload::Bit(b); // macro-tile border edge
    }
    p
}

/// Edge payloads of the zone cell (zx, zt) of an accepting tableau.
fn zone_payloads(
    machine: &CheckerMachine,
    layout: &Layout,
    tab: &Tableau,
    zx: u32,
    zt: u32,
) -> [Payload; 4] {
    let w = layout.zone.width;
    let h = layout.zone.height;
    let left = if zx == 0 {
        Payload::Inert
    } else {
        Payload::Pair(tab.cell(zx - 1, zt), tab.cell(zx, zt))
    };
    let right = if zx == w - 1 {
        Payload::Inert
    } else {
        Payload::Pair(tab.cell(zx, zt), tab.cell(zx + 1, zt))
    };
    let bottom = if zt == 0 {
        if zx < machine.input_len() {
            Payload::Bit(tab.cell(zx, 0).sym - bit_sym(0))
        } else {
            Payload::Inert
        }
    } else {
        Payload::Content(tab.cell(zx, zt))
    };
    let top = if zt == h - 1 {
        Payload::Inert
    } else {
        Payload::Content(tab.cell(zx, zt + 1))
    };
    [left, right, bottom, top]
}

fn sides_from_code(quad: u32, k: u32) -> [Vec<u8>; 4] {
    core::array::from_fn(|s| {
        (0..k).map(|i| (quad >> (s as u32 * k + i) & 1) as u8).collect()
    })
}

/// Compile a checker machine with a planned layout into a tile set whose
/// assemblable macro-tiles are exactly the accepting side quadruples.
/// Zone tiles are gathered from the runs over all 2^(4k) side inputs.
pub fn compile(machine: &CheckerMachine, layout: &Layout) -> CompiledTileSet {
    assert_eq!(machine.k, layout.k);
    let n = layout.n;
    let wires = wire_cell_map(layout);
    let mut b = TileBuilder::new(n);

    for j in 0..n {
        for i in 0..n {
            match classify(layout, &wires, i, j) {
                CellClass::Border => {
                    b.add(i, j, border_payloads(n, i, j), None, Role::Border);
                }
                CellClass::Filler => {
                    b.add(i, j, [Payload::Inert; 4], None, Role::Filler);
                }
                CellClass::Wire { wire, pos } => {
                    for bit in 0..2u8 {
                        b.add(
                            i,
                            j,
                            wire_payloads(layout, wire, pos, bit),
                            None,
                            Role::Wire { wire, pos, bit },
                        );
                    }
                }
                CellClass::Zone { .. } => {}
            }
        }
    }

    let total_bits = 4 * machine.k;
    for quad in 0u32..(1 << total_bits) {
        let sides = sides_from_code(quad, machine.k);
        let Ok(tab) = machine.run(&sides, layout.zone.width, layout.zone.height) else {
            continue;
        };
        for zt in 0..layout.zone.height {
            for zx in 0..layout.zone.width {
                let i = layout.zone.x0 as u32 + zx;
                let j = layout.zone.y0 as u32 + zt;
                let p = zone_payloads(machine, layout, &tab, zx, zt);
                b.add(i, j, p, None, Role::Zone { zx, zt, content: tab.cell(zx, zt) });
            }
        }
    }

    b.finish(
        format!("compiled({},N={n})", machine.name),
        n,
        Provenance::Checker { machine: machine.clone(), layout: layout.clone() },
    )
}

/// Plan the canonical layout and compile in one step.
pub fn compile_with_layout(
    machine: &CheckerMachine,
    n: u32,
) -> Result<CompiledTileSet, CompileError> {
    let layout = plan_layout(n, machine.k, machine)?;
    Ok(compile(machine, &layout))
}

/// Smallest N accepted by the layout planner for this machine.
pub fn smallest_feasible_n(machine: &CheckerMachine, n_max: u32) -> Option<u32> {
    (2..=n_max).find(|&n| plan_layout(n, machine.k, machine).is_ok())
}

impl CompiledTileSet {
    pub fn machine(&self) -> Option<&CheckerMachine> {
        match &self.provenance {
            Provenance::Checker { machine, .. } => Some(machine),
            Provenance::Letters { .. } => None,
        }
    }

    pub fn layout(&self) -> Option<&Layout> {
        match &self.provenance {
            Provenance::Checker { layout, .. } => Some(layout),
            Provenance::Letters { .. } => None,
        }
    }

    /// Decode a tile back to its layers.
    pub fn decode(&self, id: TileId) -> &TileInfo {
        &self.info[id as usize]
    }

    /// Deterministically build the macro-tile for the given side bit
    /// strings: run the machine, lay out wires and coordinates, and look
    /// every cell up in the compiled set.
    pub fn assemble_macrotile(&self, sides: &[Vec<u8>; 4]) -> Result<MacroTile, AssembleError> {
        let Provenance::Checker { machine, layout } = &self.provenance else {
            return Err(AssembleError::WrongKind);
        };
        for s in sides {
            if s.len() as u32 != machine.k {
                return Err(AssembleError::BadSideLength { expected: machine.k, got: s.len() });
            }
        }
        let tab = machine
            .run(sides, layout.zone.width, layout.zone.height)
            .map_err(|e| match e {
                RunError::TimeBudgetExceeded => AssembleError::TimeBudgetExceeded,
                other => AssembleError::RejectedByProgram(other),
            })?;
        let n = self.n;
        let wires = wire_cell_map(layout);
        let mut body = PatchTiling::empty(Region::new(0, 0, n, n));
        for j in 0..n {
            for i in 0..n {
                let payloads = match classify(layout, &wires, i, j) {
                    CellClass::Border => border_payloads(n, i, j),
                    CellClass::Filler => [Payload::Inert; 4],
                    CellClass::Wire { wire, pos } => {
                        let w = &layout.wires[wire];
                        let bit = sides[w.side as usize][w.bit as usize];
                        wire_payloads(layout, wire, pos, bit)
                    }
                    CellClass::Zone { zx, zt } => zone_payloads(machine, layout, &tab, zx, zt),
                };
                let id = self
                    .index
                    .get(&(i, j, payloads, None))
                    .copied()
                    .expect("assembly tile exists by construction");
                body.set(i as i64, j as i64, Some(id));
            }
        }
        Ok(MacroTile::new(&self.tiles, body).expect("assembled body is conflict-free"))
    }

    /// Macro-tile of the letter compilation for a given block letter.
    pub fn assemble_letter_macrotile(&self, father: u8) -> Result<MacroTile, AssembleError> {
        let Provenance::Letters { rule, .. } = &self.provenance else {
            return Err(AssembleError::WrongKind);
        };
        if father as usize >= rule.alphabet.len() {
            return Err(AssembleError::UnknownLetter(father));
        }
        let n = self.n;
        let mut body = PatchTiling::empty(Region::new(0, 0, n, n));
        for j in 0..n {
            for i in 0..n {
                let id = self
                    .index
                    .get(&(i, j, [Payload::Inert; 4], Some(father)))
                    .copied()
                    .expect("letter tile exists by construction");
                body.set(i as i64, j as i64, Some(id));
            }
        }
        Ok(MacroTile::new(&self.tiles, body).expect("letter body is conflict-free"))
    }

    /// Project an assembled letter macro-tile to its letter pattern.
    pub fn letter_pattern(&self, mt: &MacroTile) -> Result<LetterPattern, AssembleError> {
        if !matches!(self.provenance, Provenance::Letters { .. }) {
            return Err(AssembleError::WrongKind);
        }
        let n = self.n;
        let mut cells = vec![0u8; (n * n) as usize];
        for j in 0..n {
            for i in 0..n {
                let id = mt.body.get(i as i64, j as i64).unwrap();
                let Role::Letter { own, .. } = self.decode(id).role else {
                    return Err(AssembleError::WrongKind);
                };
                cells[(j * n + i) as usize] = own;
            }
        }
        Ok(LetterPattern::new((0, 0), n, n, cells))
    }
}

/// Compile a substitution rule directly onto the coordinate layer: each
/// tile carries its own letter (the iterated image of the father letter
/// at the tile's coordinates) and exhibits the father letter on interior
/// edges, so an N x N block is exactly the iterated image of one letter.
pub fn compile_letters(rule: &SubstitutionRule, iterations: u32) -> CompiledTileSet {
    let n = rule.m.checked_pow(iterations).expect("zoom fits u32");
    assert!(n >= 2);
    let mut b = TileBuilder::new(n);
    for father in 0..rule.alphabet.len() as u8 {
        let img = iterate(rule, father, iterations).expect("iterate fits the size cap");
        for j in 0..n {
            for i in 0..n {
                let own = img.at(i, j);
                b.add(i, j, [Payload::Inert; 4], Some(father), Role::Letter { own, father });
            }
        }
    }
    b.finish(
        format!("letters(m={},iters={iterations})", rule.m),
        n,
        Provenance::Letters { rule: rule.clone(), iterations },
    )
}

/// The Thue-Morse block tile set: coordinates of zoom N = 2^j plus the
/// Thue-Morse letter layer; tiles with own letter 0 are tagged A.
pub fn thue_morse_block(n: u32) -> TileSet {
    assert!(n >= 2 && n.is_power_of_two(), "zoom must be a power of two");
    let rule = SubstitutionRule::thue_morse();
    let cts = compile_letters(&rule, n.trailing_zeros());
    let mut ts = cts.tiles;
    ts.name = format!("thue_morse_block({n})");
    for (tile, info) in ts.tiles.iter_mut().zip(&cts.info) {
        if let Role::Letter { own, .. } = info.role {
            tile.part = Some(if own == 0 { Part::A } else { Part::B });
        }
    }
    ts
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LayerError {
    ZoomMismatch { expected: u64, got: u32 },
    AlphabetTooLarge(usize),
}

impl fmt::Display for LayerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerError::ZoomMismatch { expected, got } => {
                write!(f, "zoom mismatch: m^iterations = {expected} but layout N = {got}")
            }
            LayerError::AlphabetTooLarge(n) => write!(f, "alphabet of {n} letters exceeds 256"),
        }
    }
}

/// Wrap a checker machine with a substitution letter layer: the side
/// encoding gains a father-letter field, the new machine checks that all
/// four fields agree, and the base predicate (if any) runs afterwards on
/// the remaining bits. The own-letter constraint (letter = iterated image
/// of the father letter at the tile's coordinates) is a tile-level
/// condition enforced by the letter compilation, not by the machine.
pub fn add_substitution_layer(
    base: Option<&CheckerMachine>,
    rule: &SubstitutionRule,
    iterations: u32,
    intended_n: u32,
) -> Result<CheckerMachine, LayerError> {
    let expected = (rule.m as u64).pow(iterations);
    if expected != intended_n as u64 {
        return Err(LayerError::ZoomMismatch { expected, got: intended_n });
    }
    let letters = rule.alphabet.len();
    if letters > 256 {
        return Err(LayerError::AlphabetTooLarge(letters));
    }
    let lambda = (usize::BITS - (letters - 1).leading_zeros()).max(1);
    let mut m = crate::machine::groups_equal(lambda, letters as u32);
    m.letters = Some(LetterSpec { alphabet_len: letters as u8, m: rule.m, iterations, lambda });
    match base {
        None => {
            m.name = format!("letters({letters},m={})", rule.m);
            Ok(m)
        }
        Some(b) => Ok(compose_machines(&m, b, lambda)),
    }
}

/// Sequence two machines: the first runs on the 4*lambda letter columns;
/// every transition entering its accepting state is redirected to the
/// second machine's start state with a Right move (landing on the first
/// base column). The second machine must be insensitive to its absolute
/// tape position, which holds for all bundled machines.
fn compose_machines(first: &CheckerMachine, base: &CheckerMachine, lambda: u32) -> CheckerMachine {
    use crate::machine::Move;
    let off = first.states;
    let mut tr = BTreeMap::new();
    for (&(s, sym, p), &(ns, w, mv)) in &first.transitions {
        let target = if ns == first.accept {
            (off + base.start, w, Move::Right)
        } else {
            (ns, w, mv)
        };
        tr.insert((s, sym, p), target);
    }
    for (&(s, sym, p), &(ns, w, mv)) in &base.transitions {
        tr.insert((s + off, sym, p), (ns + off, w, mv));
    }
    CheckerMachine {
        name: format!("{}+{}", first.name, base.name),
        symbols: base.symbols.clone(),
        states: off + base.states,
        start: first.start,
        accept: off + base.accept,
        k: lambda + base.k,
        program: base.program.clone(),
        time_budget: first.time_budget + base.time_budget,
        layout: InputLayout::LettersFirst { lambda },
        transitions: tr,
        letters: first.letters.clone(),
    }
    .validate()
    .expect("composition preserves validity")
}

/// Encode a (father letter, base bits) side string for a letter-wrapped
/// machine: lambda letter bits (most significant first), then base bits.
pub fn letter_side(father: u8, lambda: u32, base_bits: &[u8]) -> Vec<u8> {
    let mut v = Vec::with_capacity(lambda as usize + base_bits.len());
    for j in (0..lambda).rev() {
        v.push((father >> j) & 1);
    }
    v.extend_from_slice(base_bits);
    v
}

/// Bit encodings of a tile set's colors, indexed by color id.
pub type BitEncoding = Vec<Vec<u8>>;

/// Build the simulation map tile -> assembled macro-tile and run the
/// finite simulation checks against it.
pub fn simulate_check_compiled(
    cts: &CompiledTileSet,
    rho: &TileSet,
    encoding: &BitEncoding,
    window_k: u32,
    node_cap: Option<u64>,
) -> Result<SimulationReport, (TileId, AssembleError)> {
    let mut map = Vec::with_capacity(rho.len());
    for (idx, t) in rho.tiles.iter().enumerate() {
        let sides = [
            encoding[t.left as usize].clone(),
            encoding[t.right as usize].clone(),
            encoding[t.bottom as usize].clone(),
            encoding[t.top as usize].clone(),
        ];
        let mt = cts.assemble_macrotile(&sides).map_err(|e| (idx as TileId, e))?;
        map.push(mt);
    }
    let sm = SimulationMap::new(rho.clone(), cts.tiles.clone(), cts.n, map);
    Ok(check_simulation(&sm, window_k, node_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{eq1, prog_match, reject_all};
    use crate::tile::check_patch;

    fn quad(b: [u8; 4]) -> [Vec<u8>; 4] {
        [vec![b[0]], vec![b[1]], vec![b[2]], vec![b[3]]]
    }

    fn compiled_eq1() -> CompiledTileSet {
        compile_with_layout(&eq1(), 16).unwrap()
    }

    #[test]
    fn eq1_assembles_exactly_equal_quadruples() {
        let cts = compiled_eq1();
        for v in 0..16u8 {
            let bits = [v & 1, v >> 1 & 1, v >> 2 & 1, v >> 3 & 1];
            let res = cts.assemble_macrotile(&quad(bits));
            if bits.iter().all(|&b| b == bits[0]) {
                let mt = res.expect("equal quadruple assembles");
                assert!(check_patch(&mt.body, &cts.tiles).is_empty());
            } else {
                assert!(matches!(res, Err(AssembleError::RejectedByProgram(_))), "{bits:?}");
            }
        }
    }

    #[test]
    fn macro_colors_encode_side_bits() {
        let cts = compiled_eq1();
        let mt = cts.assemble_macrotile(&quad([1, 1, 1, 1])).unwrap();
        let mc = crate::macro_sim::macro_colors(&cts.tiles, &mt);
        let mt0 = cts.assemble_macrotile(&quad([0, 0, 0, 0])).unwrap();
        let mc0 = crate::macro_sim::macro_colors(&cts.tiles, &mt0);
        // The bit layer differs exactly at the centered cell of each side.
        let center = 7usize;
        for pos in 0..16 {
            assert_eq!(mc.left[pos] != mc0.left[pos], pos == center);
            assert_eq!(mc.right[pos] != mc0.right[pos], pos == center);
            assert_eq!(mc.top[pos] != mc0.top[pos], pos == center);
            assert_eq!(mc.bottom[pos] != mc0.bottom[pos], pos == center);
        }
    }

    #[test]
    fn wire_tiles_carry_one_bit_on_path_edges() {
        let cts = compiled_eq1();
        let layout = cts.layout().unwrap().clone();
        for info in &cts.info {
            if let Role::Wire { wire, pos, bit } = info.role {
                let p = wire_payloads(&layout, wire, pos, bit);
                let bits: Vec<u8> = p
                    .iter()
                    .filter_map(|pl| match pl {
                        Payload::Bit(b) => Some(*b),
                        _ => None,
                    })
                    .collect();
                assert_eq!(bits.len(), 2, "wire cells have exactly two live edges");
                assert_eq!(bits[0], bits[1], "the carried bit is unchanged");
            }
        }
    }

    #[test]
    fn reject_all_assembles_nothing() {
        let cts = compile_with_layout(&reject_all(), 16).unwrap();
        for v in 0..16u8 {
            let bits = [v & 1, v >> 1 & 1, v >> 2 & 1, v >> 3 & 1];
            assert!(cts.assemble_macrotile(&quad(bits)).is_err());
        }
        assert!(cts.info.iter().all(|i| !matches!(i.role, Role::Zone { .. })));
    }

    #[test]
    fn program_track_selects_macrotiles() {
        let cts = compile_with_layout(&prog_match(1), 16).unwrap();
        assert!(cts.assemble_macrotile(&quad([1, 1, 1, 1])).is_ok());
        assert!(cts.assemble_macrotile(&quad([0, 0, 0, 0])).is_err());
    }

    #[test]
    fn decode_is_total_and_positional() {
        let cts = compiled_eq1();
        assert_eq!(cts.info.len(), cts.tiles.len());
        for info in &cts.info {
            assert!(info.i < 16 && info.j < 16);
        }
    }

    #[test]
    fn compile_is_deterministic() {
        let a = compiled_eq1();
        let b = compiled_eq1();
        assert_eq!(a.tiles.tiles, b.tiles.tiles);
        assert_eq!(a.tiles.colors, b.tiles.colors);
    }

    #[test]
    fn eq1_simulates_two_tile_set() {
        let cts = compiled_eq1();
        let rho = TileSet::validate(
            "bits",
            vec!["0".into(), "1".into()],
            vec![
                Tile::new(0, 0, 0, 0).with_label("zero"),
                Tile::new(1, 1, 1, 1).with_label("one"),
            ],
        )
        .unwrap();
        let encoding: BitEncoding = vec![vec![0], vec![1]];
        let rep = simulate_check_compiled(&cts, &rho, &encoding, 2, Some(20_000_000)).unwrap();
        assert!(rep.injective);
        assert!(rep.match_equivalent, "{:?}", rep.mismatches);
    }

    #[test]
    fn eq1_match_equivalence_holds_on_subset() {
        let cts = compiled_eq1();
        let rho =
            TileSet::validate("only-zero", vec!["0".into()], vec![Tile::new(0, 0, 0, 0)]).unwrap();
        let encoding: BitEncoding = vec![vec![0]];
        let rep = simulate_check_compiled(&cts, &rho, &encoding, 2, Some(20_000_000)).unwrap();
        assert!(rep.match_equivalent);
    }

    #[test]
    fn reject_all_not_total() {
        let cts = compile_with_layout(&reject_all(), 16).unwrap();
        let rho = TileSet::validate("one", vec!["0".into()], vec![Tile::new(0, 0, 0, 0)]).unwrap();
        let encoding: BitEncoding = vec![vec![0]];
        assert!(simulate_check_compiled(&cts, &rho, &encoding, 2, None).is_err());
    }

    #[test]
    fn lifted_tilings_are_valid() {
        let cts = compiled_eq1();
        let rho = TileSet::validate(
            "bits",
            vec!["0".into(), "1".into()],
            vec![Tile::new(0, 0, 0, 0), Tile::new(1, 1, 1, 1)],
        )
        .unwrap();
        let encoding: BitEncoding = vec![vec![0], vec![1]];
        let map: Vec<MacroTile> = (0..2u32)
            .map(|i| {
                let t = rho.tile(i);
                cts.assemble_macrotile(&[
                    encoding[t.left as usize].clone(),
                    encoding[t.right as usize].clone(),
                    encoding[t.bottom as usize].clone(),
                    encoding[t.top as usize].clone(),
                ])
                .unwrap()
            })
            .collect();
        let sm = SimulationMap::new(rho.clone(), cts.tiles.clone(), cts.n, map);
        let mut small = PatchTiling::empty(Region::new(0, 0, 2, 2));
        for (x, y) in small.region.cells() {
            small.set(x, y, Some(1));
        }
        let big = sm.lift(&small);
        assert_eq!(big.region.width, 32);
        assert!(check_patch(&big, &cts.tiles).is_empty());
        let back = sm.project(&big, 0, 0).unwrap();
        assert_eq!(back.cells, small.cells);
    }

    #[test]
    fn letter_compilation_projects_to_iterated_blocks() {
        let rule = SubstitutionRule::example3();
        let cts = compile_letters(&rule, 1);
        assert_eq!(cts.tiles.len(), 8, "N^2 * |A| tiles");
        for f in 0..2u8 {
            let mt = cts.assemble_letter_macrotile(f).unwrap();
            let pat = cts.letter_pattern(&mt).unwrap();
            assert_eq!(pat.cells, iterate(&rule, f, 1).unwrap().cells);
        }

        let tm = SubstitutionRule::thue_morse();
        let cts = compile_letters(&tm, 2);
        assert_eq!(cts.n, 4);
        for f in 0..2u8 {
            let mt = cts.assemble_letter_macrotile(f).unwrap();
            assert!(check_patch(&mt.body, &cts.tiles).is_empty());
            let pat = cts.letter_pattern(&mt).unwrap();
            assert_eq!(pat.cells, iterate(&tm, f, 2).unwrap().cells);
        }
    }

    #[test]
    fn letter_layer_machine_checks_consistency() {
        let rule = SubstitutionRule::example3();
        let m = add_substitution_layer(None, &rule, 1, 2).unwrap();
        assert!(m.accepts(&[vec![0], vec![0], vec![0], vec![0]]));
        assert!(m.accepts(&[vec![1], vec![1], vec![1], vec![1]]));
        assert!(!m.accepts(&[vec![0], vec![1], vec![0], vec![0]]));
        assert_eq!(
            add_substitution_layer(None, &rule, 2, 2).unwrap_err(),
            LayerError::ZoomMismatch { expected: 4, got: 2 }
        );
    }

    #[test]
    fn letter_layer_composes_with_base_machine() {
        let rule = SubstitutionRule::thue_morse();
        let m = add_substitution_layer(Some(&eq1()), &rule, 2, 4).unwrap();
        assert_eq!(m.k, 2, "one letter bit plus one base bit");
        let side = |f: u8, b: u8| letter_side(f, 1, &[b]);
        assert!(m.accepts(&[side(1, 0), side(1, 0), side(1, 0), side(1, 0)]));
        assert!(!m.accepts(&[side(1, 0), side(0, 0), side(1, 0), side(1, 0)]));
        assert!(!m.accepts(&[side(1, 0), side(1, 1), side(1, 0), side(1, 0)]));
    }

    #[test]
    fn thue_morse_block_set_tiles_and_parts() {
        let ts = thue_morse_block(4);
        assert_eq!(ts.len(), 32);
        let a_count = ts.tiles.iter().filter(|t| t.part == Some(Part::A)).count();
        assert_eq!(a_count, 16, "half the cells of the two iterated blocks are zeros");
    }

    #[test]
    fn smallest_feasible_layouts() {
        assert_eq!(smallest_feasible_n(&eq1(), 32), Some(11));
        assert!(smallest_feasible_n(&crate::machine::eq2(), 15).is_none());
    }
}
