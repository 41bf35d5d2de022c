//! Checker machines: deterministic single-tape machines with an optional
//! read-only program track, used as 4-ary predicates on the four side bit
//! strings of a macro-tile.
//!
//! The machine reads a tape whose first `4k` cells hold the side bits
//! (layout below), followed by the program bits on the read-only track,
//! followed by blanks. It accepts by entering the accepting state, which
//! has no outgoing transitions; the configuration then freezes, which is
//! what lets a time-space diagram of bounded height certify acceptance.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

pub type StateId = u16;
pub type Sym = u8;

/// Tape symbols: blank, then the two bit symbols.
pub const BLANK: Sym = 0;
pub const SYM0: Sym = 1;
pub const SYM1: Sym = 2;

pub fn bit_sym(b: u8) -> Sym {
    if b == 0 {
        SYM0
    } else {
        SYM1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Left,
    Right,
    Stay,
}

/// How the four side strings map onto tape columns.
///
/// Blocks are ordered left, bottom, top, right: this is the planar order
/// in which disjoint wires can reach the zone (left/bottom/right bits
/// come up from below, top bits ride a vertical track down through the
/// zone), so the tape layout matches the routing geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputLayout {
    /// Side s occupies the k columns of its block.
    BySide,
    /// The lambda letter bits of all four sides come first (4*lambda
    /// columns, block order as above), then the remaining base bits in
    /// the same block order.
    LettersFirst { lambda: u32 },
}

/// Tape block index of a side (0 left, 1 right, 2 bottom, 3 top).
pub fn side_block(side: u32) -> u32 {
    match side {
        0 => 0, // left
        2 => 1, // bottom
        3 => 2, // top
        _ => 3, // right
    }
}

/// Letter-layer metadata attached by the substitution wrapper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterSpec {
    pub alphabet_len: u8,
    pub m: u32,
    pub iterations: u32,
    pub lambda: u32,
}

#[derive(Clone, Debug)]
pub struct CheckerMachine {
    pub name: String,
    /// Display names for tape symbols (index = symbol id).
    pub symbols: Vec<String>,
    pub states: u16,
    pub start: StateId,
    pub accept: StateId,
    /// Side bit width: each of the four side strings has k bits.
    pub k: u32,
    /// Read-only program bits, laid out after the input columns.
    pub program: Vec<u8>,
    /// Zone height: number of configuration rows needed for acceptance.
    pub time_budget: u32,
    pub layout: InputLayout,
    /// (state, symbol, program bit) -> (next state, written symbol, move).
    pub transitions: BTreeMap<(StateId, Sym, u8), (StateId, Sym, Move)>,
    pub letters: Option<LetterSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MachineError {
    AcceptNotHalting,
    BadTransition(String),
}

impl fmt::Display for MachineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MachineError::AcceptNotHalting => {
                f.write_str("accepting state must have no outgoing transitions")
            }
            MachineError::BadTransition(m) => write!(f, "bad transition: {m}"),
        }
    }
}

impl CheckerMachine {
    pub fn validate(self) -> Result<Self, MachineError> {
        for ((s, sym, p), (ns, w, _)) in &self.transitions {
            if *s == self.accept {
                return Err(MachineError::AcceptNotHalting);
            }
            if *s >= self.states || *ns >= self.states {
                return Err(MachineError::BadTransition(format!("state out of range: {s}->{ns}")));
            }
            if *sym as usize >= self.symbols.len() || *w as usize >= self.symbols.len() {
                return Err(MachineError::BadTransition(format!("symbol out of range at {s}")));
            }
            if *p > 1 {
                return Err(MachineError::BadTransition("program bit must be 0/1".into()));
            }
        }
        Ok(self)
    }

    /// Total input columns (4k side bits).
    pub fn input_len(&self) -> u32 {
        4 * self.k
    }

    /// Tape column of bit `i` of side `s` (sides 0..4 = left, right,
    /// bottom, top; blocks ordered left, bottom, top, right).
    pub fn input_column(&self, side: u32, i: u32) -> u32 {
        debug_assert!(side < 4 && i < self.k);
        let block = side_block(side);
        match self.layout {
            InputLayout::BySide => block * self.k + i,
            InputLayout::LettersFirst { lambda } => {
                if i < lambda {
                    block * lambda + i
                } else {
                    4 * lambda + block * (self.k - lambda) + (i - lambda)
                }
            }
        }
    }

    /// Minimal zone width: input columns, program track, plus slack for
    /// the head to read the first blank.
    pub fn min_zone_width(&self) -> u32 {
        self.input_len() + self.program.len() as u32 + 4
    }
}

/// One tape cell of a configuration row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub sym: Sym,
    pub prog: u8,
    /// State id of the head if it sits here.
    pub head: Option<StateId>,
}

/// Time-space diagram: `h` configuration rows of width `w`, bottom row
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    pub w: u32,
    pub h: u32,
    pub rows: Vec<Vec<Cell>>,
}

impl Tableau {
    pub fn cell(&self, x: u32, t: u32) -> Cell {
        self.rows[t as usize][x as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunError {
    /// The machine got stuck (no transition): the predicate rejects.
    Rejected { step: u32, state: StateId, sym: Sym },
    /// Still running in the top row: the zone is too small.
    TimeBudgetExceeded,
    /// Input does not fit the requested width.
    WidthTooSmall { needed: u32, got: u32 },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Rejected { step, state, sym } => {
                write!(f, "rejected at step {step} (state {state}, symbol {sym})")
            }
            RunError::TimeBudgetExceeded => f.write_str("machine ran past the zone height"),
            RunError::WidthTooSmall { needed, got } => {
                write!(f, "zone width {got} below required {needed}")
            }
        }
    }
}

impl CheckerMachine {
    /// The initial configuration row for the given side bit strings.
    pub fn initial_row(&self, sides: &[Vec<u8>; 4], w: u32) -> Result<Vec<Cell>, RunError> {
        let need = self.input_len() + self.program.len() as u32;
        if w < need {
            return Err(RunError::WidthTooSmall { needed: need, got: w });
        }
        for s in sides {
            assert_eq!(s.len() as u32, self.k, "side strings must have k bits");
        }
        let mut row = vec![Cell { sym: BLANK, prog: 0, head: None }; w as usize];
        for side in 0..4u32 {
            for i in 0..self.k {
                let col = self.input_column(side, i);
                row[col as usize].sym = bit_sym(sides[side as usize][i as usize]);
            }
        }
        for (j, &b) in self.program.iter().enumerate() {
            row[self.input_len() as usize + j].prog = b;
        }
        row[0].head = Some(self.start);
        Ok(row)
    }

    /// Advance one configuration row. A frozen (accepted) row maps to
    /// itself; a stuck head or a head walking off the tape rejects.
    pub fn step_row(&self, row: &[Cell], step: u32) -> Result<Vec<Cell>, RunError> {
        let pos = row.iter().position(|c| c.head.is_some());
        let Some(x) = pos else {
            // No head can only happen for malformed inputs; treat as stuck.
            return Err(RunError::Rejected { step, state: 0, sym: BLANK });
        };
        let state = row[x].head.unwrap();
        if state == self.accept {
            return Ok(row.to_vec());
        }
        let sym = row[x].sym;
        let prog = row[x].prog;
        let Some(&(ns, write, mv)) = self.transitions.get(&(state, sym, prog)) else {
            return Err(RunError::Rejected { step, state, sym });
        };
        let mut next = row.to_vec();
        next[x].head = None;
        next[x].sym = write;
        let nx = match mv {
            Move::Stay => x as i64,
            Move::Left => x as i64 - 1,
            Move::Right => x as i64 + 1,
        };
        if nx < 0 || nx >= row.len() as i64 {
            return Err(RunError::Rejected { step, state, sym });
        }
        next[nx as usize].head = Some(ns);
        Ok(next)
    }

    /// Full accepting tableau of `h` rows, freezing after acceptance.
    pub fn run(&self, sides: &[Vec<u8>; 4], w: u32, h: u32) -> Result<Tableau, RunError> {
        let mut rows = vec![self.initial_row(sides, w)?];
        for t in 1..h {
            let next = self.step_row(&rows[t as usize - 1], t)?;
            rows.push(next);
        }
        let top = rows.last().unwrap();
        let accepted = top
            .iter()
            .any(|c| c.head == Some(self.accept));
        if !accepted {
            return Err(RunError::TimeBudgetExceeded);
        }
        Ok(Tableau { w, h, rows })
    }

    /// Convenience predicate: does the machine accept these sides at all
    /// (within its own time budget and minimal width)?
    pub fn accepts(&self, sides: &[Vec<u8>; 4]) -> bool {
        self.run(sides, self.min_zone_width(), self.time_budget).is_ok()
    }
}

fn bit_symbols() -> Vec<String> {
    vec!["_".into(), "0".into(), "1".into()]
}

/// Accept iff all four 1-bit side strings are equal. Four states: start,
/// carry-0, carry-1, accept.
pub fn eq1() -> CheckerMachine {
    let mut tr = BTreeMap::new();
    for p in 0..2u8 {
        tr.insert((0, SYM0, p), (1, SYM0, Move::Right));
        tr.insert((0, SYM1, p), (2, SYM1, Move::Right));
        tr.insert((1, SYM0, p), (1, SYM0, Move::Right));
        tr.insert((2, SYM1, p), (2, SYM1, Move::Right));
        tr.insert((1, BLANK, p), (3, BLANK, Move::Stay));
        tr.insert((2, BLANK, p), (3, BLANK, Move::Stay));
    }
    CheckerMachine {
        name: "eq1".into(),
        symbols: bit_symbols(),
        states: 4,
        start: 0,
        accept: 3,
        k: 1,
        program: Vec::new(),
        time_budget: 6,
        layout: InputLayout::BySide,
        transitions: tr,
        letters: None,
    }
    .validate()
    .unwrap()
}

/// No transitions at all: rejects every input.
pub fn reject_all() -> CheckerMachine {
    CheckerMachine {
        name: "reject_all".into(),
        symbols: bit_symbols(),
        states: 2,
        start: 0,
        accept: 1,
        k: 1,
        program: Vec::new(),
        time_budget: 2,
        layout: InputLayout::BySide,
        transitions: BTreeMap::new(),
        letters: None,
    }
    .validate()
    .unwrap()
}

/// Accepts every 1-bit quadruple immediately.
pub fn accept_all() -> CheckerMachine {
    let mut tr = BTreeMap::new();
    for p in 0..2u8 {
        for sym in [BLANK, SYM0, SYM1] {
            tr.insert((0, sym, p), (1, sym, Move::Stay));
        }
    }
    CheckerMachine {
        name: "accept_all".into(),
        symbols: bit_symbols(),
        states: 2,
        start: 0,
        accept: 1,
        k: 1,
        program: Vec::new(),
        time_budget: 2,
        layout: InputLayout::BySide,
        transitions: tr,
        letters: None,
    }
    .validate()
    .unwrap()
}

/// Accept iff all four side bits equal the single program bit: the
/// read-only track in action. Compile once, choose the forced bit by
/// swapping the program.
pub fn prog_match(program_bit: u8) -> CheckerMachine {
    let mut m = eq1();
    m.name = format!("prog_match({program_bit})");
    m.program = vec![program_bit];
    // Rewire the blank transitions: carry-b over blank consults the
    // program bit under the head.
    m.transitions.remove(&(1, BLANK, 0));
    m.transitions.remove(&(1, BLANK, 1));
    m.transitions.remove(&(2, BLANK, 0));
    m.transitions.remove(&(2, BLANK, 1));
    m.transitions.insert((1, BLANK, 0), (3, BLANK, Move::Stay));
    m.transitions.insert((2, BLANK, 1), (3, BLANK, Move::Stay));
    m.validate().unwrap()
}

/// Generic single-pass machine accepting iff four contiguous groups of
/// `width` bits are equal, with group values restricted below
/// `max_value`. States: a binary read trie for group 0, then positional
/// verification of groups 1..3.
pub fn groups_equal(width: u32, max_value: u32) -> CheckerMachine {
    assert!(width >= 1 && width <= 8);
    // State numbering:
    //   read state for (j, prefix):   j in [0,width), prefix in [0,2^j)
    //   verify state (g, j, word):    g in 1..=3
    //   accept: last id.
    let read_base = |j: u32| -> u16 {
        // sum_{i<j} 2^i = 2^j - 1
        ((1u32 << j) - 1) as u16
    };
    let read_count = ((1u32 << width) - 1) as u16;
    let verify_base = |g: u32, j: u32, word: u32| -> u16 {
        read_count + (((g - 1) * width + j) * (1 << width) + word) as u16
    };
    let accept: u16 = read_count + (3 * width * (1 << width)) as u16;
    let states = accept + 1;

    let mut tr = BTreeMap::new();
    let bit_of = |word: u32, j: u32| (word >> (width - 1 - j)) & 1;
    for p in 0..2u8 {
        // Read phase.
        for j in 0..width {
            for prefix in 0..(1u32 << j) {
                let st = read_base(j) + prefix as u16;
                for b in 0..2u32 {
                    let word = prefix << 1 | b;
                    let next = if j + 1 < width {
                        read_base(j + 1) + word as u16
                    } else {
                        if word >= max_value {
                            continue; // invalid group value: reject
                        }
                        verify_base(1, 0, word)
                    };
                    tr.insert((st, bit_sym(b as u8), p), (next, bit_sym(b as u8), Move::Right));
                }
            }
        }
        // Verify phase.
        for g in 1..=3u32 {
            for j in 0..width {
                for word in 0..(1u32 << width) {
                    if word >= max_value {
                        continue;
                    }
                    let st = verify_base(g, j, word);
                    let b = bit_of(word, j);
                    let next = if j + 1 < width {
                        verify_base(g, j + 1, word)
                    } else if g < 3 {
                        verify_base(g + 1, 0, word)
                    } else {
                        accept
                    };
                    let mv = if next == accept { Move::Stay } else { Move::Right };
                    tr.insert((st, bit_sym(b as u8), p), (next, bit_sym(b as u8), mv));
                }
            }
        }
    }
    CheckerMachine {
        name: format!("groups_equal({width})"),
        symbols: bit_symbols(),
        states,
        start: 0,
        accept,
        k: width,
        program: Vec::new(),
        time_budget: 4 * width + 2,
        layout: InputLayout::BySide,
        transitions: tr,
        letters: None,
    }
    .validate()
    .unwrap()
}

/// Accept iff the four 2-bit side strings are equal.
pub fn eq2() -> CheckerMachine {
    let mut m = groups_equal(2, 4);
    m.name = "eq2".into();
    m
}

pub fn builtin_machine(name: &str) -> Option<CheckerMachine> {
    match name {
        "eq1" => Some(eq1()),
        "eq2" => Some(eq2()),
        "accept_all" => Some(accept_all()),
        "reject_all" => Some(reject_all()),
        "prog_match(0)" => Some(prog_match(0)),
        "prog_match(1)" => Some(prog_match(1)),
        _ => None,
    }
}
