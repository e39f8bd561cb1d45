//! Gate-model instruction set: the opcode table and the fixed-width binary
//! codec.
//!
//! An instruction is the tuple `{opcode, target_qubit, control_qubit}` packed
//! into fixed-width words. Three wire formats are supported:
//!
//! * [`EncodingMode::Single64`] — one 64-bit word, 30 address bits per
//!   operand: `[63:60]` opcode, `[59:30]` target, `[29:0]` control.
//! * [`EncodingMode::TwoMessage64`] — 64-bit words with 60 address bits;
//!   one-qubit instructions occupy a single word (`[63:60]` opcode,
//!   `[59:0]` target), two-qubit instructions occupy two consecutive words
//!   that repeat the opcode, the first carrying the target and the second
//!   the control.
//! * [`EncodingMode::Single128`] — one 128-bit word, 62 address bits:
//!   `[127:124]` opcode, `[123:62]` target, `[61:0]` control.
//!
//! Words are serialized little-endian on disk. The `.qbin` container places a
//! 16-byte header (magic `QISA`, version, mode tag, declared qubit count) in
//! front of the word stream.

use thiserror::Error;

/// Errors produced by the opcode table and the binary codec.
#[derive(Debug, Error, PartialEq)]
pub enum IsaError {
    #[error("unknown opcode: {0}")]
    UnknownOpcode(String),
    #[error("address overflow: qubit index {index} does not fit in {bits} bits")]
    AddressOverflow { index: u64, bits: u32 },
    #[error("malformed two-message pair: {0}")]
    MalformedPair(String),
    #[error("word count mismatch: expected {expected} word(s), got {got}")]
    WordCount { expected: usize, got: usize },
    #[error("word width mismatch: mode expects {expected}-bit words, got {got}-bit")]
    WidthMismatch { expected: u8, got: u8 },
    #[error("trailing bytes: stream length {len} is not a multiple of the {word} byte word size")]
    TrailingBytes { len: usize, word: usize },
    #[error("decode error at word {offset}: {source}")]
    AtWord {
        offset: usize,
        #[source]
        source: Box<IsaError>,
    },
    #[error("bad container: {0}")]
    BadContainer(String),
}

/// How gates act on the register, as recorded in the opcode table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpcodeKind {
    Unitary,
    Measurement,
    NoOp,
}

/// The gate-model opcode table. Codes 13-15 are reserved.
///
/// The table stays within a 4-bit opcode field and contains `h`, `t` and
/// `cnot`, which together are universal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opcode {
    Nop = 0,
    X = 1,
    Y = 2,
    Z = 3,
    H = 4,
    S = 5,
    Sdg = 6,
    T = 7,
    Tdg = 8,
    Cnot = 9,
    Cz = 10,
    Swap = 11,
    Measure = 12,
}

impl Opcode {
    pub const ALL: [Opcode; 13] = [
        Opcode::Nop,
        Opcode::X,
        Opcode::Y,
        Opcode::Z,
        Opcode::H,
        Opcode::S,
        Opcode::Sdg,
        Opcode::T,
        Opcode::Tdg,
        Opcode::Cnot,
        Opcode::Cz,
        Opcode::Swap,
        Opcode::Measure,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::Nop => "nop",
            Opcode::X => "x",
            Opcode::Y => "y",
            Opcode::Z => "z",
            Opcode::H => "h",
            Opcode::S => "s",
            Opcode::Sdg => "sdg",
            Opcode::T => "t",
            Opcode::Tdg => "tdg",
            Opcode::Cnot => "cnot",
            Opcode::Cz => "cz",
            Opcode::Swap => "swap",
            Opcode::Measure => "measure",
        }
    }

    /// Number of qubit operands (1 or 2).
    pub fn arity(self) -> u8 {
        match self {
            Opcode::Cnot | Opcode::Cz | Opcode::Swap => 2,
            _ => 1,
        }
    }

    pub fn kind(self) -> OpcodeKind {
        match self {
            Opcode::Nop => OpcodeKind::NoOp,
            Opcode::Measure => OpcodeKind::Measurement,
            _ => OpcodeKind::Unitary,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, IsaError> {
        Opcode::ALL
            .iter()
            .copied()
            .find(|op| op.code() == code)
            .ok_or_else(|| IsaError::UnknownOpcode(format!("code {code}")))
    }

    pub fn from_mnemonic(mnemonic: &str) -> Result<Self, IsaError> {
        Opcode::ALL
            .iter()
            .copied()
            .find(|op| op.mnemonic() == mnemonic)
            .ok_or_else(|| IsaError::UnknownOpcode(format!("mnemonic `{mnemonic}`")))
    }
}

/// One decoded gate-model instruction.
///
/// One-qubit instructions replicate the target into the control field, the
/// same convention the annealing format uses for one-qubit data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GateInstruction {
    pub opcode: Opcode,
    pub target: u64,
    pub control: u64,
}

impl GateInstruction {
    /// A one-operand instruction; the control field replicates the target.
    pub fn unary(opcode: Opcode, qubit: u64) -> Self {
        Self {
            opcode,
            target: qubit,
            control: qubit,
        }
    }

    /// A two-operand instruction.
    pub fn binary(opcode: Opcode, target: u64, control: u64) -> Self {
        Self {
            opcode,
            target,
            control,
        }
    }

    /// The distinct qubit indices this instruction touches.
    pub fn touched(&self) -> Vec<u64> {
        if self.opcode.arity() == 2 && self.control != self.target {
            vec![self.target, self.control]
        } else {
            vec![self.target]
        }
    }

    /// Checks the structural invariants (arity vs. operand equality).
    pub fn is_well_formed(&self) -> bool {
        match self.opcode.arity() {
            1 => self.control == self.target,
            _ => self.control != self.target,
        }
    }
}

/// Wire format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingMode {
    Single64,
    TwoMessage64,
    Single128,
}

impl EncodingMode {
    /// Address width per operand: 30, 60 or 62 bits.
    pub fn address_bits(self) -> u32 {
        match self {
            EncodingMode::Single64 => 30,
            EncodingMode::TwoMessage64 => 60,
            EncodingMode::Single128 => 62,
        }
    }

    /// Exclusive upper bound on qubit indices.
    pub fn qubit_capacity(self) -> u64 {
        1u64 << self.address_bits()
    }

    pub fn word_width(self) -> u8 {
        match self {
            EncodingMode::Single128 => 128,
            _ => 64,
        }
    }

    pub fn word_bytes(self) -> usize {
        self.word_width() as usize / 8
    }

    /// The container tag byte.
    pub fn tag(self) -> u8 {
        match self {
            EncodingMode::Single64 => 0,
            EncodingMode::TwoMessage64 => 1,
            EncodingMode::Single128 => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self, IsaError> {
        match tag {
            0 => Ok(EncodingMode::Single64),
            1 => Ok(EncodingMode::TwoMessage64),
            2 => Ok(EncodingMode::Single128),
            _ => Err(IsaError::BadContainer(format!("unknown mode tag {tag}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EncodingMode::Single64 => "single64",
            EncodingMode::TwoMessage64 => "two-message",
            EncodingMode::Single128 => "single128",
        }
    }
}

/// One encoded machine word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodedWord {
    /// 64 or 128.
    pub width: u8,
    pub bits: u128,
}

impl EncodedWord {
    pub fn new64(bits: u64) -> Self {
        Self {
            width: 64,
            bits: bits as u128,
        }
    }

    pub fn new128(bits: u128) -> Self {
        Self { width: 128, bits }
    }
}

fn check_address(index: u64, mode: EncodingMode) -> Result<(), IsaError> {
    if index >= mode.qubit_capacity() {
        return Err(IsaError::AddressOverflow {
            index,
            bits: mode.address_bits(),
        });
    }
    Ok(())
}

/// Packs one instruction into its mode's word sequence.
pub fn encode_instruction(
    inst: &GateInstruction,
    mode: EncodingMode,
) -> Result<Vec<EncodedWord>, IsaError> {
    check_address(inst.target, mode)?;
    check_address(inst.control, mode)?;
    let code = inst.opcode.code() as u64;
    match mode {
        EncodingMode::Single64 => {
            let bits = (code << 60) | (inst.target << 30) | inst.control;
            Ok(vec![EncodedWord::new64(bits)])
        }
        EncodingMode::Single128 => {
            let bits = ((code as u128) << 124)
                | ((inst.target as u128) << 62)
                | inst.control as u128;
            Ok(vec![EncodedWord::new128(bits)])
        }
        EncodingMode::TwoMessage64 => {
            let first = EncodedWord::new64((code << 60) | inst.target);
            if inst.opcode.arity() == 1 {
                Ok(vec![first])
            } else {
                let second = EncodedWord::new64((code << 60) | inst.control);
                Ok(vec![first, second])
            }
        }
    }
}

fn check_width(word: &EncodedWord, mode: EncodingMode) -> Result<(), IsaError> {
    if word.width != mode.word_width() {
        return Err(IsaError::WidthMismatch {
            expected: mode.word_width(),
            got: word.width,
        });
    }
    Ok(())
}

const MASK30: u64 = (1 << 30) - 1;
const MASK60: u64 = (1 << 60) - 1;
const MASK62: u128 = (1 << 62) - 1;

/// Decodes one instruction from exactly the words [`encode_instruction`]
/// produced for it.
pub fn decode_instruction(
    words: &[EncodedWord],
    mode: EncodingMode,
) -> Result<GateInstruction, IsaError> {
    let (inst, consumed) = decode_next(words, mode)?;
    if consumed != words.len() {
        return Err(IsaError::WordCount {
            expected: consumed,
            got: words.len(),
        });
    }
    Ok(inst)
}

/// Decodes the instruction starting at `words[0]`, returning the number of
/// words consumed (1 or 2).
fn decode_next(
    words: &[EncodedWord],
    mode: EncodingMode,
) -> Result<(GateInstruction, usize), IsaError> {
    let first = words.first().ok_or(IsaError::WordCount {
        expected: 1,
        got: 0,
    })?;
    check_width(first, mode)?;
    match mode {
        EncodingMode::Single64 => {
            let bits = first.bits as u64;
            let opcode = Opcode::from_code((bits >> 60) as u8)?;
            let target = (bits >> 30) & MASK30;
            let control = bits & MASK30;
            Ok((GateInstruction::binary(opcode, target, control), 1))
        }
        EncodingMode::Single128 => {
            let bits = first.bits;
            let opcode = Opcode::from_code((bits >> 124) as u8)?;
            let target = ((bits >> 62) & MASK62) as u64;
            let control = (bits & MASK62) as u64;
            Ok((GateInstruction::binary(opcode, target, control), 1))
        }
        EncodingMode::TwoMessage64 => {
            let bits = first.bits as u64;
            let opcode = Opcode::from_code((bits >> 60) as u8)?;
            let target = bits & MASK60;
            if opcode.arity() == 1 {
                return Ok((GateInstruction::unary(opcode, target), 1));
            }
            let second = words.get(1).ok_or_else(|| {
                IsaError::MalformedPair(format!(
                    "stream ends after the first word of a `{}` pair",
                    opcode.mnemonic()
                ))
            })?;
            check_width(second, mode)?;
            let second_bits = second.bits as u64;
            let second_code = (second_bits >> 60) as u8;
            if second_code != opcode.code() {
                return Err(IsaError::MalformedPair(format!(
                    "second word carries opcode {} but the pair started with {}",
                    second_code,
                    opcode.code()
                )));
            }
            let control = second_bits & MASK60;
            Ok((GateInstruction::binary(opcode, target, control), 2))
        }
    }
}

fn push_word(out: &mut Vec<u8>, word: &EncodedWord) {
    match word.width {
        64 => out.extend_from_slice(&(word.bits as u64).to_le_bytes()),
        _ => out.extend_from_slice(&word.bits.to_le_bytes()),
    }
}

/// Serializes a program-ordered instruction list as little-endian words.
pub fn encode_stream(
    instructions: &[GateInstruction],
    mode: EncodingMode,
) -> Result<Vec<u8>, IsaError> {
    let mut out = Vec::new();
    for inst in instructions {
        for word in encode_instruction(inst, mode)? {
            push_word(&mut out, &word);
        }
    }
    Ok(out)
}

fn read_words(bytes: &[u8], mode: EncodingMode) -> Result<Vec<EncodedWord>, IsaError> {
    let size = mode.word_bytes();
    if bytes.len() % size != 0 {
        return Err(IsaError::TrailingBytes {
            len: bytes.len(),
            word: size,
        });
    }
    Ok(bytes
        .chunks_exact(size)
        .map(|chunk| match mode.word_width() {
            64 => EncodedWord::new64(u64::from_le_bytes(chunk.try_into().unwrap())),
            _ => EncodedWord::new128(u128::from_le_bytes(chunk.try_into().unwrap())),
        })
        .collect())
}

/// Exact inverse of [`encode_stream`]. Decode failures carry the offset of
/// the offending word.
pub fn decode_stream(
    bytes: &[u8],
    mode: EncodingMode,
) -> Result<Vec<GateInstruction>, IsaError> {
    let words = read_words(bytes, mode)?;
    let mut out = Vec::new();
    let mut offset = 0;
    while offset < words.len() {
        let (inst, consumed) = decode_next(&words[offset..], mode).map_err(|e| {
            IsaError::AtWord {
                offset,
                source: Box::new(e),
            }
        })?;
        out.push(inst);
        offset += consumed;
    }
    Ok(out)
}

/// `.qbin` container magic.
pub const QBIN_MAGIC: [u8; 4] = *b"QISA";
/// `.qbin` container format version.
pub const QBIN_VERSION: u8 = 1;
/// `.qbin` header size in bytes.
pub const QBIN_HEADER_LEN: usize = 16;

/// A decoded `.qbin` file: header metadata plus the instruction stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QbinFile {
    pub mode: EncodingMode,
    pub qubit_count: u64,
    pub instructions: Vec<GateInstruction>,
}

/// Writes a `.qbin` binary program: 16-byte header followed by the encoded
/// word stream.
pub fn write_qbin(
    mode: EncodingMode,
    qubit_count: u64,
    instructions: &[GateInstruction],
) -> Result<Vec<u8>, IsaError> {
    let mut out = Vec::with_capacity(QBIN_HEADER_LEN);
    out.extend_from_slice(&QBIN_MAGIC);
    out.push(QBIN_VERSION);
    out.push(mode.tag());
    out.extend_from_slice(&qubit_count.to_le_bytes());
    out.extend_from_slice(&[0u8; 2]);
    out.extend_from_slice(&encode_stream(instructions, mode)?);
    Ok(out)
}

/// Reads a `.qbin` binary program.
pub fn read_qbin(bytes: &[u8]) -> Result<QbinFile, IsaError> {
    if bytes.len() < QBIN_HEADER_LEN {
        return Err(IsaError::BadContainer(format!(
            "file too short for header: {} bytes",
            bytes.len()
        )));
    }
    if bytes[0..4] != QBIN_MAGIC {
        return Err(IsaError::BadContainer("bad magic".into()));
    }
    if bytes[4] != QBIN_VERSION {
        return Err(IsaError::BadContainer(format!(
            "unsupported version {}",
            bytes[4]
        )));
    }
    let mode = EncodingMode::from_tag(bytes[5])?;
    let qubit_count = u64::from_le_bytes(bytes[6..14].try_into().unwrap());
    if bytes[14] != 0 || bytes[15] != 0 {
        return Err(IsaError::BadContainer("reserved header bytes not zero".into()));
    }
    let instructions = decode_stream(&bytes[QBIN_HEADER_LEN..], mode)?;
    Ok(QbinFile {
        mode,
        qubit_count,
        instructions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn table_is_within_four_bits_and_unique() {
        assert!(Opcode::ALL.len() <= 16);
        let mut seen = std::collections::HashSet::new();
        for op in Opcode::ALL {
            assert!(op.code() < 16);
            assert!(seen.insert(op.code()), "duplicate code {}", op.code());
        }
    }

    #[test]
    fn table_contains_a_universal_set() {
        for m in ["h", "t", "cnot"] {
            Opcode::from_mnemonic(m).unwrap();
        }
    }

    #[test]
    fn every_two_qubit_opcode_is_unitary() {
        for op in Opcode::ALL {
            if op.arity() == 2 {
                assert_eq!(op.kind(), OpcodeKind::Unitary);
            }
        }
    }

    #[test]
    fn lookups() {
        let x = Opcode::from_mnemonic("x").unwrap();
        assert_eq!(x.code(), 1);
        assert_eq!(x.arity(), 1);
        assert_eq!(x.kind(), OpcodeKind::Unitary);

        let cnot = Opcode::from_code(9).unwrap();
        assert_eq!(cnot.mnemonic(), "cnot");
        assert_eq!(cnot.arity(), 2);

        assert!(matches!(
            Opcode::from_code(14),
            Err(IsaError::UnknownOpcode(_))
        ));
        assert!(matches!(
            Opcode::from_mnemonic("frobnicate"),
            Err(IsaError::UnknownOpcode(_))
        ));
    }

    #[test]
    fn encode_x_single64_matches_shift_oracle() {
        let inst = GateInstruction::unary(Opcode::X, 3);
        let words = encode_instruction(&inst, EncodingMode::Single64).unwrap();
        // Independent shift/or computation of the same layout.
        let expected = (1u64 << 60) | (3u64 << 30) | 3u64;
        assert_eq!(words, vec![EncodedWord::new64(expected)]);
        assert_eq!(words[0].bits, 0x1000_0000_C000_0003);
    }

    #[test]
    fn encode_cnot_two_message() {
        let inst = GateInstruction::binary(Opcode::Cnot, 1, 0);
        let words = encode_instruction(&inst, EncodingMode::TwoMessage64).unwrap();
        assert_eq!(
            words,
            vec![
                EncodedWord::new64(0x9000_0000_0000_0001),
                EncodedWord::new64(0x9000_0000_0000_0000),
            ]
        );
    }

    #[test]
    fn encode_respects_mode_capacity() {
        let over = GateInstruction::unary(Opcode::X, 1 << 30);
        assert!(matches!(
            encode_instruction(&over, EncodingMode::Single64),
            Err(IsaError::AddressOverflow { index, bits: 30 }) if index == 1 << 30
        ));
        let max30 = GateInstruction::unary(Opcode::X, (1 << 30) - 1);
        encode_instruction(&max30, EncodingMode::Single64).unwrap();
        let max60 = GateInstruction::unary(Opcode::X, (1 << 60) - 1);
        encode_instruction(&max60, EncodingMode::TwoMessage64).unwrap();
        assert!(encode_instruction(&max60, EncodingMode::Single64).is_err());
        let max62 = GateInstruction::unary(Opcode::X, (1 << 62) - 1);
        encode_instruction(&max62, EncodingMode::Single128).unwrap();
    }

    #[test]
    fn decode_x_single64() {
        let inst =
            decode_instruction(&[EncodedWord::new64(0x1000_0000_C000_0003)], EncodingMode::Single64)
                .unwrap();
        assert_eq!(inst, GateInstruction::unary(Opcode::X, 3));
    }

    #[test]
    fn decode_truncated_pair() {
        let words = [EncodedWord::new64((9u64 << 60) | 1)];
        assert!(matches!(
            decode_instruction(&words, EncodingMode::TwoMessage64),
            Err(IsaError::MalformedPair(_))
        ));
    }

    #[test]
    fn decode_mismatched_pair() {
        let words = [
            EncodedWord::new64((9u64 << 60) | 1),
            EncodedWord::new64((10u64 << 60) | 2),
        ];
        assert!(matches!(
            decode_instruction(&words, EncodingMode::TwoMessage64),
            Err(IsaError::MalformedPair(_))
        ));
    }

    #[test]
    fn decode_reserved_code() {
        let words = [EncodedWord::new64(14u64 << 60)];
        assert!(matches!(
            decode_instruction(&words, EncodingMode::Single64),
            Err(IsaError::UnknownOpcode(_))
        ));
    }

    fn random_valid_instruction(rng: &mut SplitMix64, mode: EncodingMode) -> GateInstruction {
        let cap = mode.qubit_capacity();
        loop {
            let op = Opcode::ALL[rng.next_below(13) as usize];
            if op.arity() == 1 {
                return GateInstruction::unary(op, rng.next_below(cap));
            }
            let target = rng.next_below(cap);
            let control = rng.next_below(cap);
            if target != control {
                return GateInstruction::binary(op, target, control);
            }
        }
    }

    #[test]
    fn round_trip_random_instructions_all_modes() {
        let mut rng = SplitMix64::new(0xC0DEC);
        for mode in [
            EncodingMode::Single64,
            EncodingMode::TwoMessage64,
            EncodingMode::Single128,
        ] {
            for _ in 0..10_000 {
                let inst = random_valid_instruction(&mut rng, mode);
                let words = encode_instruction(&inst, mode).unwrap();
                assert_eq!(decode_instruction(&words, mode).unwrap(), inst);
            }
        }
    }

    #[test]
    fn single64_field_isolation_under_bit_flips() {
        let mut rng = SplitMix64::new(0xB17);
        for _ in 0..200 {
            let inst = random_valid_instruction(&mut rng, EncodingMode::Single64);
            let word = encode_instruction(&inst, EncodingMode::Single64).unwrap()[0];
            for bit in 0..64 {
                let flipped = EncodedWord::new64((word.bits as u64) ^ (1 << bit));
                match decode_instruction(&[flipped], EncodingMode::Single64) {
                    Err(IsaError::UnknownOpcode(_)) => {}
                    Ok(got) => {
                        let changed = [
                            got.opcode != inst.opcode,
                            got.target != inst.target,
                            got.control != inst.control,
                        ]
                        .iter()
                        .filter(|&&c| c)
                        .count();
                        assert_eq!(changed, 1, "bit {bit} changed {changed} fields");
                    }
                    Err(e) => panic!("unexpected decode error: {e}"),
                }
            }
        }
    }

    #[test]
    fn stream_sizes() {
        assert_eq!(
            encode_stream(&[], EncodingMode::Single64).unwrap(),
            Vec::<u8>::new()
        );
        let prog = [
            GateInstruction::unary(Opcode::X, 0),
            GateInstruction::binary(Opcode::Cnot, 1, 0),
        ];
        assert_eq!(encode_stream(&prog, EncodingMode::Single64).unwrap().len(), 16);
        // Two-message mode spends an extra word on the cnot.
        assert_eq!(
            encode_stream(&prog, EncodingMode::TwoMessage64).unwrap().len(),
            24
        );
        assert_eq!(
            encode_stream(&prog, EncodingMode::Single128).unwrap().len(),
            32
        );
    }

    #[test]
    fn stream_round_trip() {
        let mut rng = SplitMix64::new(0x57EA);
        for mode in [
            EncodingMode::Single64,
            EncodingMode::TwoMessage64,
            EncodingMode::Single128,
        ] {
            let prog: Vec<_> = (0..100)
                .map(|_| random_valid_instruction(&mut rng, mode))
                .collect();
            let bytes = encode_stream(&prog, mode).unwrap();
            assert_eq!(decode_stream(&bytes, mode).unwrap(), prog);
        }
    }

    #[test]
    fn stream_trailing_bytes() {
        let err = decode_stream(&[0u8; 9], EncodingMode::Single64).unwrap_err();
        assert!(matches!(err, IsaError::TrailingBytes { len: 9, word: 8 }));
    }

    #[test]
    fn stream_error_carries_word_offset() {
        let good = encode_stream(
            &[GateInstruction::unary(Opcode::X, 0)],
            EncodingMode::Single64,
        )
        .unwrap();
        let mut bytes = good.clone();
        bytes.extend_from_slice(&(14u64 << 60).to_le_bytes());
        match decode_stream(&bytes, EncodingMode::Single64) {
            Err(IsaError::AtWord { offset: 1, source }) => {
                assert!(matches!(*source, IsaError::UnknownOpcode(_)));
            }
            other => panic!("expected AtWord error, got {other:?}"),
        }
    }

    #[test]
    fn qbin_header_layout() {
        let bytes = write_qbin(EncodingMode::TwoMessage64, 5, &[]).unwrap();
        assert_eq!(bytes.len(), 16);
        assert_eq!(&bytes[0..4], b"QISA");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 1);
        assert_eq!(u64::from_le_bytes(bytes[6..14].try_into().unwrap()), 5);
        assert_eq!(&bytes[14..16], &[0, 0]);
    }

    #[test]
    fn qbin_round_trip() {
        let prog = vec![
            GateInstruction::unary(Opcode::H, 0),
            GateInstruction::binary(Opcode::Cnot, 1, 0),
            GateInstruction::unary(Opcode::Measure, 1),
        ];
        let bytes = write_qbin(EncodingMode::Single64, 2, &prog).unwrap();
        let file = read_qbin(&bytes).unwrap();
        assert_eq!(file.mode, EncodingMode::Single64);
        assert_eq!(file.qubit_count, 2);
        assert_eq!(file.instructions, prog);
    }

    #[test]
    fn qbin_rejects_bad_headers() {
        let good = write_qbin(EncodingMode::Single64, 2, &[]).unwrap();
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(read_qbin(&bad_magic).is_err());
        let mut bad_version = good.clone();
        bad_version[4] = 9;
        assert!(read_qbin(&bad_version).is_err());
        let mut bad_tag = good.clone();
        bad_tag[5] = 7;
        assert!(read_qbin(&bad_tag).is_err());
        assert!(read_qbin(&good[0..10]).is_err());
    }
}
