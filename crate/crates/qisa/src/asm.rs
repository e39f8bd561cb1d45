//! Textual assembly for the gate-model ISA.
//!
//! The surface syntax is one statement per line:
//!
//! ```text
//! .qubits 4            # register declaration, must come first
//! x q[0]               # one-qubit gate
//! cnot q[0], q[1]      # two-qubit gate: control first, target second
//! ccx q[0], q[1], q[3] # macro, expands to 15 elementary gates
//! measure q[2]
//! ```
//!
//! `#` starts a comment, blank lines are ignored, and both `\n` and `\r\n`
//! line endings are accepted. Binary field order is target-first; the
//! assembler performs the control-first/target-first mapping so each layer
//! reads naturally.

use crate::isa::{EncodingMode, GateInstruction, Opcode};
use thiserror::Error;

/// A fully elaborated program: declared register size plus the ordered
/// instruction list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub qubit_count: u64,
    pub instructions: Vec<GateInstruction>,
}

impl Program {
    pub fn new(qubit_count: u64, instructions: Vec<GateInstruction>) -> Self {
        Self {
            qubit_count,
            instructions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A parse or validation message anchored to a source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    /// 1-based source line.
    pub line: u32,
    /// 1-based source column.
    pub column: u32,
    pub message: String,
    pub severity: Severity,
}

impl std::fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, tag, self.message)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AsmError {
    #[error("line {line}: ccx operands must be pairwise distinct")]
    DuplicateOperand { line: u32 },
}

/// One parsed statement: either an elementary instruction or a macro that
/// still needs expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Stmt {
    Gate(GateInstruction),
    Ccx { a: u64, b: u64, c: u64 },
}

/// Parser output before macro expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedProgram {
    pub qubit_count: u64,
    stmts: Vec<(u32, Stmt)>,
}

impl ParsedProgram {
    pub fn new(qubit_count: u64) -> Self {
        Self {
            qubit_count,
            stmts: Vec::new(),
        }
    }

    pub fn push_gate(&mut self, inst: GateInstruction) {
        self.stmts.push((0, Stmt::Gate(inst)));
    }

    /// Adds a Toffoli macro with controls `a`, `b` and target `c`.
    pub fn push_ccx(&mut self, a: u64, b: u64, c: u64) {
        self.stmts.push((0, Stmt::Ccx { a, b, c }));
    }

    pub fn statement_count(&self) -> usize {
        self.stmts.len()
    }

    /// Wraps an already-elaborated program so passes that take parser output
    /// can be applied to it.
    pub fn from_program(prog: &Program) -> Self {
        Self {
            qubit_count: prog.qubit_count,
            stmts: prog
                .instructions
                .iter()
                .map(|inst| (0, Stmt::Gate(*inst)))
                .collect(),
        }
    }
}

struct LineParser<'a> {
    text: &'a str,
    line: u32,
    diags: Vec<ParseDiagnostic>,
}

impl<'a> LineParser<'a> {
    fn error(&mut self, column: usize, message: String) {
        self.diags.push(ParseDiagnostic {
            line: self.line,
            column: column as u32,
            message,
            severity: Severity::Error,
        });
    }

    /// Returns (column, operand index) pairs, or None after reporting.
    fn operands(&mut self, start: usize) -> Option<Vec<(usize, u64)>> {
        let region = &self.text[start..];
        if region.trim().is_empty() {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        let mut offset = 0;
        for piece in region.split(',') {
            let lead = piece.len() - piece.trim_start().len();
            let column = start + offset + lead + 1;
            let token = piece.trim();
            match parse_operand(token) {
                Some(idx) => out.push((column, idx)),
                None => {
                    self.error(
                        column,
                        format!("malformed operand `{token}`, expected q[<index>]"),
                    );
                    return None;
                }
            }
            offset += piece.len() + 1;
        }
        Some(out)
    }
}

fn parse_operand(token: &str) -> Option<u64> {
    let digits = token.strip_prefix("q[")?.strip_suffix(']')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parses assembly source into a [`ParsedProgram`], collecting every
/// diagnostic rather than stopping at the first.
pub fn parse_assembly(source: &str) -> Result<ParsedProgram, Vec<ParseDiagnostic>> {
    let mut qubit_count: Option<u64> = None;
    let mut reported_missing_directive = false;
    let mut stmts: Vec<(u32, Stmt)> = Vec::new();
    let mut diags: Vec<ParseDiagnostic> = Vec::new();

    for (idx, raw_line) in source.lines().enumerate() {
        let line_no = (idx + 1) as u32;
        let without_comment = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let text = without_comment.trim_end_matches('\r');
        if text.trim().is_empty() {
            continue;
        }
        let mut p = LineParser {
            text,
            line: line_no,
            diags: Vec::new(),
        };
        parse_line(&mut p, &mut qubit_count, &mut reported_missing_directive, &mut stmts);
        diags.extend(p.diags);
    }

    if qubit_count.is_none() && !reported_missing_directive {
        diags.push(ParseDiagnostic {
            line: 1,
            column: 1,
            message: "missing .qubits directive".into(),
            severity: Severity::Error,
        });
    }
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(diags);
    }
    Ok(ParsedProgram {
        qubit_count: qubit_count.unwrap_or(0),
        stmts,
    })
}

fn parse_line(
    p: &mut LineParser,
    qubit_count: &mut Option<u64>,
    reported_missing_directive: &mut bool,
    stmts: &mut Vec<(u32, Stmt)>,
) {
    let text = p.text;
    let word_start = text.len() - text.trim_start().len();
    let column = word_start + 1;
    let rest = &text[word_start..];
    let word_len = rest
        .find(|c: char| c.is_whitespace())
        .unwrap_or(rest.len());
    let word = &rest[..word_len];
    let after_word = word_start + word_len;

    if word == ".qubits" {
        if !stmts.is_empty() {
            p.error(column, ".qubits must precede all instructions".into());
            return;
        }
        if qubit_count.is_some() {
            p.error(column, "duplicate .qubits directive".into());
            return;
        }
        let arg = text[after_word..].trim();
        match arg.parse::<u64>() {
            Ok(n) => *qubit_count = Some(n),
            Err(_) => p.error(
                after_word + 1,
                format!("malformed qubit count `{arg}`"),
            ),
        }
        return;
    }
    if word.starts_with('.') {
        p.error(column, format!("unknown directive `{word}`"));
        return;
    }

    let declared = match *qubit_count {
        Some(n) => n,
        None => {
            if !*reported_missing_directive {
                p.error(column, "missing .qubits directive before instructions".into());
                *reported_missing_directive = true;
            }
            // Keep parsing with an unbounded register so later lines still
            // get their own diagnostics.
            u64::MAX
        }
    };

    let is_macro = word == "ccx";
    let opcode = if is_macro {
        None
    } else {
        match Opcode::from_mnemonic(word) {
            Ok(op) => Some(op),
            Err(_) => {
                p.error(column, format!("unknown mnemonic `{word}`"));
                return;
            }
        }
    };

    let Some(operands) = p.operands(after_word) else {
        return;
    };
    let expected = if is_macro { 3 } else { opcode.unwrap().arity() as usize };
    if operands.len() != expected {
        p.error(
            column,
            format!("`{word}` expects {expected} operand(s), got {}", operands.len()),
        );
        return;
    }
    let mut bad_index = false;
    for &(col, idx) in &operands {
        if idx >= declared {
            p.error(
                col,
                format!("qubit index {idx} out of range for .qubits {declared}"),
            );
            bad_index = true;
        }
    }
    if bad_index {
        return;
    }

    if is_macro {
        let (a, b, c) = (operands[0].1, operands[1].1, operands[2].1);
        if a == b || a == c || b == c {
            p.error(operands[1].0, "ccx operands must be pairwise distinct".into());
            return;
        }
        stmts.push((p.line, Stmt::Ccx { a, b, c }));
        return;
    }

    let op = opcode.unwrap();
    match op.arity() {
        1 => stmts.push((p.line, Stmt::Gate(GateInstruction::unary(op, operands[0].1)))),
        _ => {
            let (control, target) = (operands[0].1, operands[1].1);
            if control == target {
                let msg = match op {
                    Opcode::Cnot | Opcode::Cz => "control equals target".to_string(),
                    _ => format!("duplicate operands on `{word}`"),
                };
                p.error(operands[1].0, msg);
                return;
            }
            stmts.push((p.line, Stmt::Gate(GateInstruction::binary(op, target, control))));
        }
    }
}

/// The standard 15-gate realization of a Toffoli over {h, t, tdg, cnot}.
fn ccx_expansion(a: u64, b: u64, c: u64) -> [GateInstruction; 15] {
    let h = GateInstruction::unary;
    let cnot = |target, control| GateInstruction::binary(Opcode::Cnot, target, control);
    [
        h(Opcode::H, c),
        cnot(c, b),
        h(Opcode::Tdg, c),
        cnot(c, a),
        h(Opcode::T, c),
        cnot(c, b),
        h(Opcode::Tdg, c),
        cnot(c, a),
        h(Opcode::T, b),
        h(Opcode::T, c),
        h(Opcode::H, c),
        cnot(b, a),
        h(Opcode::T, a),
        h(Opcode::Tdg, b),
        cnot(b, a),
    ]
}

/// Expands every macro statement; elementary instructions pass through in
/// order.
pub fn expand_macros(parsed: &ParsedProgram) -> Result<Program, AsmError> {
    let mut instructions = Vec::new();
    for (line, stmt) in &parsed.stmts {
        match stmt {
            Stmt::Gate(inst) => instructions.push(*inst),
            Stmt::Ccx { a, b, c } => {
                if a == b || a == c || b == c {
                    return Err(AsmError::DuplicateOperand { line: *line });
                }
                instructions.extend_from_slice(&ccx_expansion(*a, *b, *c));
            }
        }
    }
    Ok(Program::new(parsed.qubit_count, instructions))
}

/// Renders a program in canonical form: `.qubits N`, one lowercase
/// instruction per line, control operand first, single space after the comma.
///
/// `parse_assembly` followed by [`expand_macros`] reproduces the program
/// exactly.
pub fn emit_assembly(prog: &Program) -> String {
    let mut out = format!(".qubits {}\n", prog.qubit_count);
    for inst in &prog.instructions {
        let m = inst.opcode.mnemonic();
        match inst.opcode.arity() {
            1 => out.push_str(&format!("{m} q[{}]\n", inst.target)),
            _ => out.push_str(&format!("{m} q[{}], q[{}]\n", inst.control, inst.target)),
        }
    }
    out
}

/// Static checks over an elaborated program: register bounds, the encoding
/// mode's address ceiling, and the arity/operand invariants.
///
/// Positions refer to the program's canonical text form (see
/// [`emit_assembly`]): instruction `i` sits on line `i + 2`.
pub fn validate_program(prog: &Program, mode: EncodingMode) -> Vec<ParseDiagnostic> {
    let mut diags = Vec::new();
    let mut push = |i: usize, message: String| {
        diags.push(ParseDiagnostic {
            line: (i + 2) as u32,
            column: 1,
            message,
            severity: Severity::Error,
        });
    };
    for (i, inst) in prog.instructions.iter().enumerate() {
        let mut indices = vec![inst.target];
        if inst.control != inst.target {
            indices.push(inst.control);
        }
        for &q in &indices {
            if q >= prog.qubit_count {
                push(
                    i,
                    format!(
                        "instruction {i}: qubit index {q} out of range for register of {}",
                        prog.qubit_count
                    ),
                );
            }
            if q >= mode.qubit_capacity() {
                push(
                    i,
                    format!(
                        "instruction {i}: qubit index {q} exceeds 2^{} addressable qubits in {} mode",
                        mode.address_bits(),
                        mode.name()
                    ),
                );
            }
        }
        if !inst.is_well_formed() {
            let msg = if inst.opcode.arity() == 2 {
                format!("instruction {i}: control equals target")
            } else {
                format!(
                    "instruction {i}: one-qubit `{}` carries a distinct control field",
                    inst.opcode.mnemonic()
                )
            };
            push(i, msg);
        }
    }
    diags
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    pub(crate) const HALF_ADDER: &str =
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../programs/half_adder.qisa"));

    fn parse_ok(src: &str) -> ParsedProgram {
        parse_assembly(src).unwrap_or_else(|d| panic!("parse failed: {d:?}"))
    }

    #[test]
    fn parse_basic_program() {
        let prog = expand_macros(&parse_ok(".qubits 2\nx q[0]\ncnot q[0], q[1]")).unwrap();
        assert_eq!(prog.qubit_count, 2);
        assert_eq!(
            prog.instructions,
            vec![
                GateInstruction::unary(Opcode::X, 0),
                GateInstruction::binary(Opcode::Cnot, 1, 0),
            ]
        );
    }

    #[test]
    fn parse_rejects_control_equals_target() {
        let diags = parse_assembly(".qubits 1\ncnot q[0], q[0]").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].line, 2);
        assert!(diags[0].message.contains("control equals target"));
    }

    #[test]
    fn parse_reports_positions_and_collects_all_errors() {
        let src = ".qubits 2\nfoo q[0]\nx q[5]\nh q[1], q[0]\n";
        let diags = parse_assembly(src).unwrap_err();
        assert_eq!(diags.len(), 3);
        assert_eq!((diags[0].line, diags[0].column), (2, 1));
        assert!(diags[0].message.contains("unknown mnemonic"));
        assert_eq!(diags[1].line, 3);
        assert_eq!(diags[1].column, 3);
        assert!(diags[1].message.contains("out of range"));
        assert_eq!(diags[2].line, 4);
        assert!(diags[2].message.contains("expects 1 operand(s), got 2"));
        let lines: Vec<&str> = src.lines().collect();
        for d in &diags {
            assert!((d.line as usize) <= lines.len());
        }
    }

    #[test]
    fn parse_requires_directive() {
        let diags = parse_assembly("x q[0]\n").unwrap_err();
        assert!(diags[0].message.contains(".qubits"));
    }

    #[test]
    fn parse_handles_comments_blanks_and_crlf() {
        let prog = expand_macros(&parse_ok(
            "# leading comment\r\n\r\n.qubits 2\r\nx q[0] # trailing\r\n\r\nswap q[0], q[1]\r\n",
        ))
        .unwrap();
        assert_eq!(prog.instructions.len(), 2);
        assert_eq!(
            prog.instructions[1],
            GateInstruction::binary(Opcode::Swap, 1, 0)
        );
    }

    #[test]
    fn parse_rejects_directive_after_instructions() {
        let diags = parse_assembly(".qubits 2\nx q[0]\n.qubits 3\n").unwrap_err();
        assert!(diags[0].message.contains("precede"));
    }

    #[test]
    fn emit_examples() {
        let one = Program::new(1, vec![GateInstruction::unary(Opcode::X, 0)]);
        assert_eq!(emit_assembly(&one), ".qubits 1\nx q[0]\n");
        let empty = Program::new(3, vec![]);
        assert_eq!(emit_assembly(&empty), ".qubits 3\n");
    }

    pub(crate) fn random_program(rng: &mut SplitMix64, max_qubits: u64, max_len: usize) -> Program {
        let n = 1 + rng.next_below(max_qubits);
        let len = rng.next_below(max_len as u64 + 1) as usize;
        let mut instructions = Vec::with_capacity(len);
        while instructions.len() < len {
            let op = Opcode::ALL[rng.next_below(13) as usize];
            if op.arity() == 1 {
                instructions.push(GateInstruction::unary(op, rng.next_below(n)));
            } else if n >= 2 {
                let target = rng.next_below(n);
                let control = rng.next_below(n);
                if target != control {
                    instructions.push(GateInstruction::binary(op, target, control));
                }
            }
        }
        Program::new(n, instructions)
    }

    #[test]
    fn emit_parse_identity_on_random_programs() {
        let mut rng = SplitMix64::new(0xA5);
        for _ in 0..1000 {
            let prog = random_program(&mut rng, 8, 20);
            let text = emit_assembly(&prog);
            let back = expand_macros(&parse_ok(&text)).unwrap();
            assert_eq!(back, prog);
            // Canonical form is a fixed point.
            assert_eq!(emit_assembly(&back), text);
        }
    }

    #[test]
    fn ccx_expands_to_fifteen() {
        let mut p = ParsedProgram::new(3);
        p.push_ccx(0, 1, 2);
        let prog = expand_macros(&p).unwrap();
        assert_eq!(prog.instructions.len(), 15);
        assert_eq!(prog.instructions[0], GateInstruction::unary(Opcode::H, 2));
        assert_eq!(
            prog.instructions[14],
            GateInstruction::binary(Opcode::Cnot, 1, 0)
        );
    }

    #[test]
    fn expand_passes_plain_programs_through() {
        let mut rng = SplitMix64::new(0xE1);
        for _ in 0..50 {
            let prog = random_program(&mut rng, 6, 15);
            let expanded = expand_macros(&ParsedProgram::from_program(&prog)).unwrap();
            assert_eq!(expanded, prog);
            // Idempotent: expanding an already expanded program changes nothing.
            let again = expand_macros(&ParsedProgram::from_program(&expanded)).unwrap();
            assert_eq!(again, expanded);
        }
    }

    #[test]
    fn expand_preserves_order_around_macros() {
        let mut p = ParsedProgram::new(4);
        p.push_gate(GateInstruction::unary(Opcode::X, 3));
        p.push_ccx(0, 1, 2);
        p.push_gate(GateInstruction::unary(Opcode::Measure, 3));
        let prog = expand_macros(&p).unwrap();
        assert_eq!(prog.instructions.len(), 17);
        assert_eq!(prog.instructions[0], GateInstruction::unary(Opcode::X, 3));
        assert_eq!(
            prog.instructions[16],
            GateInstruction::unary(Opcode::Measure, 3)
        );
    }

    #[test]
    fn expand_rejects_duplicate_macro_operands() {
        let mut p = ParsedProgram::new(3);
        p.push_ccx(0, 0, 2);
        assert_eq!(
            expand_macros(&p),
            Err(AsmError::DuplicateOperand { line: 0 })
        );
        let diags = parse_assembly(".qubits 3\nccx q[0], q[0], q[2]\n").unwrap_err();
        assert!(diags[0].message.contains("pairwise distinct"));
    }

    #[test]
    fn half_adder_parses_to_twenty_one_instructions() {
        let parsed = parse_ok(HALF_ADDER);
        // Surface statements: 6 elementary plus the ccx macro.
        assert_eq!(parsed.statement_count(), 7);
        let prog = expand_macros(&parsed).unwrap();
        assert_eq!(prog.qubit_count, 4);
        assert_eq!(prog.instructions.len(), 6 + 15);
    }

    #[test]
    fn validate_checks_mode_capacity() {
        let prog = Program::new(1 << 31, vec![GateInstruction::unary(Opcode::X, 1 << 30)]);
        let diags = validate_program(&prog, EncodingMode::Single64);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("exceeds 2^30 addressable qubits"));
        assert!(validate_program(&prog, EncodingMode::TwoMessage64).is_empty());
    }

    #[test]
    fn validate_checks_register_bounds_and_arity() {
        let prog = Program::new(2, vec![GateInstruction::binary(Opcode::Cnot, 1, 1)]);
        let diags = validate_program(&prog, EncodingMode::Single64);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("control equals target"));

        let prog = Program::new(2, vec![GateInstruction::unary(Opcode::X, 5)]);
        let diags = validate_program(&prog, EncodingMode::Single64);
        assert!(diags[0].message.contains("out of range"));
    }
}
