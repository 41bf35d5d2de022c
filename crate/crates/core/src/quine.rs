//! Self-referential program construction on a tiny stack language.
//!
//! The language has the two ingredients that make fixed points easy to
//! write down: `GETTEXT` pushes the text of the running program (the
//! interpreter holds the text anyway), and `EXEC` interprets the string
//! on top of the stack as a program. Given a transformer pi expressible
//! in the language, the program "GETTEXT; <pi>; EXEC" behaves like its
//! own pi-image.
//!
//! Instructions, one per line:
//!
//! - `PUSH "lit"`  push a literal (escapes: \\, \", \n)
//! - `GETTEXT`     push the program text
//! - `CONCAT`      pop b, pop a, push a+b
//! - `EXEC`        pop s, run s as a program (shared output and budget)
//! - `EMIT`        pop s, append s to the output tape
//! - `DROP`        pop and discard
//! - `NOP ...`     comment

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LangError {
    UnknownInstruction(String),
    BadLiteral(String),
    StackUnderflow { line: String },
}

impl fmt::Display for LangError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LangError::UnknownInstruction(s) => write!(f, "unknown instruction: {s}"),
            LangError::BadLiteral(s) => write!(f, "bad string literal: {s}"),
            LangError::StackUnderflow { line } => write!(f, "stack underflow at `{line}`"),
        }
    }
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            other => out.push(other),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String, LangError> {
    let mut out = String::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('"') => out.push('"'),
            Some('n') => out.push('\n'),
            other => return Err(LangError::BadLiteral(format!("\\{other:?}"))),
        }
    }
    Ok(out)
}

/// Outcome of an interpreter run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub output: String,
    pub steps_used: u64,
    /// False when the step budget ran out first.
    pub halted: bool,
    /// Final value stack of the outermost program.
    pub stack: Vec<String>,
}

struct Budget {
    left: u64,
}

/// Interpret a program with a step budget. Budget exhaustion is a normal
/// outcome (`halted: false`), not an error; self-referential programs
/// regress forever by design.
pub fn run(text: &str, budget: u64) -> Result<Run, LangError> {
    let mut b = Budget { left: budget };
    let mut output = String::new();
    let mut stack = Vec::new();
    let halted = exec_in(text, &mut b, &mut output, &mut stack, 0)?;
    Ok(Run { output, steps_used: budget - b.left, halted, stack })
}

fn exec_in(
    text: &str,
    budget: &mut Budget,
    output: &mut String,
    stack: &mut Vec<String>,
    depth: u32,
) -> Result<bool, LangError> {
    if depth > 4096 {
        return Ok(false);
    }
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if budget.left == 0 {
            return Ok(false);
        }
        budget.left -= 1;
        if let Some(rest) = line.strip_prefix("PUSH ") {
            let lit = rest
                .trim()
                .strip_prefix('"')
                .and_then(|s| s.strip_suffix('"'))
                .ok_or_else(|| LangError::BadLiteral(rest.to_string()))?;
            stack.push(unescape(lit)?);
        } else if line == "GETTEXT" {
            stack.push(text.to_string());
        } else if line == "CONCAT" {
            let b2 = stack.pop().ok_or(LangError::StackUnderflow { line: line.into() })?;
            let a = stack.pop().ok_or(LangError::StackUnderflow { line: line.into() })?;
            stack.push(a + &b2);
        } else if line == "EXEC" {
            let prog = stack.pop().ok_or(LangError::StackUnderflow { line: line.into() })?;
            let mut inner = Vec::new();
            let done = exec_in(&prog, budget, output, &mut inner, depth + 1)?;
            if !done {
                return Ok(false);
            }
        } else if line == "EMIT" {
            let s = stack.pop().ok_or(LangError::StackUnderflow { line: line.into() })?;
            output.push_str(&s);
        } else if line == "DROP" {
            stack.pop().ok_or(LangError::StackUnderflow { line: line.into() })?;
        } else if line.starts_with("NOP") {
            // comment
        } else {
            return Err(LangError::UnknownInstruction(line.into()));
        }
    }
    Ok(true)
}

/// A program transformer expressible in the language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProgramTransformer {
    Identity,
    /// Append a comment line (the image is equivalent to the original).
    AppendComment(String),
    /// Ignore the input and return a fixed program.
    Constant(String),
}

/// Apply a transformer to program text directly.
pub fn apply_transformer(pi: &ProgramTransformer, text: &str) -> String {
    match pi {
        ProgramTransformer::Identity => text.to_string(),
        ProgramTransformer::AppendComment(c) => format!("{text}\nNOP {c}"),
        ProgramTransformer::Constant(q) => q.clone(),
    }
}

/// Instructions that apply the transformer to the string on the stack top.
fn transformer_code(pi: &ProgramTransformer) -> Vec<String> {
    match pi {
        ProgramTransformer::Identity => vec![],
        ProgramTransformer::AppendComment(c) => {
            vec![format!("PUSH \"{}\"", escape(&format!("\nNOP {c}"))), "CONCAT".into()]
        }
        ProgramTransformer::Constant(q) => {
            vec!["DROP".into(), format!("PUSH \"{}\"", escape(q))]
        }
    }
}

/// The fixed point of a transformer: a program that runs the pi-image of
/// its own text, so it is equivalent to that image.
pub fn fixed_point_program(pi: &ProgramTransformer) -> String {
    let mut lines = vec!["GETTEXT".to_string()];
    lines.extend(transformer_code(pi));
    lines.push("EXEC".into());
    lines.join("\n")
}
