//! Deterministic state-vector virtual machine for gate-model programs.
//!
//! The register is a vector of `2^n` complex amplitudes with the convention
//! that bit `i` of the amplitude index is the basis value of qubit `i`.
//! Unitary instructions update the amplitudes norm-preservingly; `measure`
//! samples an outcome with Born-rule probability, zeroes the inconsistent
//! amplitudes and renormalizes.
//!
//! All randomness comes from [`SplitMix64`] seeded directly with the run
//! seed; shot `k` of [`sample_shots`] uses `base_seed + k`. Identical seeds
//! therefore give bit-identical results.

use crate::asm::Program;
use crate::isa::{GateInstruction, Opcode, OpcodeKind};
use crate::rng::SplitMix64;
use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

/// Default ceiling on simulated register size: 2^24 amplitudes is 256 MiB.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Largest register [`program_unitary`] will build a dense matrix for.
pub const UNITARY_QUBIT_MAX: u64 = 10;

/// Outcomes below this probability are treated as impossible rather than
/// renormalized.
const MEASURE_EPSILON: f64 = 1e-15;

#[derive(Debug, Error, PartialEq)]
pub enum VmError {
    #[error("qubit index {qubit} out of range for a register of {register}")]
    IndexOutOfRange { qubit: u64, register: u64 },
    #[error("register of {qubits} qubits exceeds the configured cap of {cap}")]
    CapExceeded { qubits: u64, cap: usize },
    #[error("`{}` has no unitary matrix", .0.mnemonic())]
    NotUnitary(Opcode),
    #[error("program contains a measurement at instruction {index}")]
    ContainsMeasurement { index: usize },
    #[error("register of {qubits} qubits is too large for a dense unitary (max {max})")]
    TooLarge { qubits: u64, max: u64 },
    #[error("shot count must be at least 1")]
    InvalidShots,
    #[error("instruction {index}: {source}")]
    AtInstruction {
        index: usize,
        #[source]
        source: Box<VmError>,
    },
}

/// The standard matrix of a gate, in the computational basis.
///
/// Two-qubit matrices are indexed by `m = 2*first + second` where `first` is
/// the control operand and `second` the target.
#[derive(Debug, Clone, PartialEq)]
pub enum GateMatrix {
    One([[Complex64; 2]; 2]),
    Two([[Complex64; 4]; 4]),
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Returns the defining matrix of a gate opcode. `nop` is the identity;
/// `measure` is not a unitary.
pub fn gate_unitary(op: Opcode) -> Result<GateMatrix, VmError> {
    let f = std::f64::consts::FRAC_1_SQRT_2;
    let h = Complex64::new(f, 0.0);
    let t_phase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let m = match op {
        Opcode::Nop => GateMatrix::One([[ONE, ZERO], [ZERO, ONE]]),
        Opcode::X => GateMatrix::One([[ZERO, ONE], [ONE, ZERO]]),
        Opcode::Y => GateMatrix::One([[ZERO, -I], [I, ZERO]]),
        Opcode::Z => GateMatrix::One([[ONE, ZERO], [ZERO, -ONE]]),
        Opcode::H => GateMatrix::One([[h, h], [h, -h]]),
        Opcode::S => GateMatrix::One([[ONE, ZERO], [ZERO, I]]),
        Opcode::Sdg => GateMatrix::One([[ONE, ZERO], [ZERO, -I]]),
        Opcode::T => GateMatrix::One([[ONE, ZERO], [ZERO, t_phase]]),
        Opcode::Tdg => GateMatrix::One([[ONE, ZERO], [ZERO, t_phase.conj()]]),
        Opcode::Cnot => GateMatrix::Two([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
            [ZERO, ZERO, ONE, ZERO],
        ]),
        Opcode::Cz => GateMatrix::Two([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ZERO, ZERO, -ONE],
        ]),
        Opcode::Swap => GateMatrix::Two([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
        ]),
        Opcode::Measure => return Err(VmError::NotUnitary(op)),
    };
    Ok(m)
}

/// An `n`-qubit quantum register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros state |0...0>.
    pub fn zero_state(n: usize, cap: usize) -> Result<Self, VmError> {
        if n > cap {
            return Err(VmError::CapExceeded {
                qubits: n as u64,
                cap,
            });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability of reading `1` on `qubit`.
    pub fn probability_one(&self, qubit: usize) -> f64 {
        let mask = 1usize << qubit;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn apply_one(&mut self, qubit: usize, m: &[[Complex64; 2]; 2]) {
        let mask = 1usize << qubit;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a0 = self.amps[i];
                let a1 = self.amps[j];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_two(&mut self, first: usize, second: usize, m: &[[Complex64; 4]; 4]) {
        let mf = 1usize << first;
        let ms = 1usize << second;
        for i in 0..self.amps.len() {
            if i & mf == 0 && i & ms == 0 {
                let idx = [i, i | ms, i | mf, i | mf | ms];
                let a: Vec<Complex64> = idx.iter().map(|&k| self.amps[k]).collect();
                for (row, &k) in idx.iter().enumerate() {
                    self.amps[k] =
                        m[row][0] * a[0] + m[row][1] * a[1] + m[row][2] * a[2] + m[row][3] * a[3];
                }
            }
        }
    }

    /// Collapses `qubit`, returning the outcome and its pre-collapse
    /// probability. The generator advances exactly one draw per measurement
    /// regardless of the amplitudes.
    fn measure(&mut self, qubit: usize, rng: &mut SplitMix64) -> (u8, f64) {
        let p1 = self.probability_one(qubit).clamp(0.0, 1.0);
        let u = rng.next_f64();
        let outcome = if p1 < MEASURE_EPSILON {
            0
        } else if p1 > 1.0 - MEASURE_EPSILON {
            1
        } else if u < p1 {
            1
        } else {
            0
        };
        let p_out = if outcome == 1 { p1 } else { 1.0 - p1 };
        let mask = 1usize << qubit;
        let keep = if outcome == 1 { mask } else { 0 };
        let scale = Complex64::new(1.0 / p_out.sqrt(), 0.0);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == keep {
                *amp *= scale;
            } else {
                *amp = ZERO;
            }
        }
        (outcome as u8, p_out)
    }
}

/// One measurement event.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    /// Index of the instruction that produced this record.
    pub step: usize,
    pub qubit: u64,
    pub outcome: u8,
    /// Pre-collapse probability of the realized outcome.
    pub probability: f64,
}

/// Output of a single program execution.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub final_state: StateVector,
    pub records: Vec<MeasurementRecord>,
    pub seed: u64,
}

impl RunResult {
    /// Concatenated measurement outcomes in program order.
    pub fn bitstring(&self) -> String {
        self.records
            .iter()
            .map(|r| if r.outcome == 1 { '1' } else { '0' })
            .collect()
    }
}

fn check_bounds(inst: &GateInstruction, register: u64) -> Result<(), VmError> {
    for q in [inst.target, inst.control] {
        if q >= register {
            return Err(VmError::IndexOutOfRange { qubit: q, register });
        }
    }
    Ok(())
}

/// Applies one instruction to the state, returning the measurement record if
/// the instruction was a `measure`.
pub fn apply_instruction(
    state: &mut StateVector,
    inst: &GateInstruction,
    rng: &mut SplitMix64,
    step: usize,
) -> Result<Option<MeasurementRecord>, VmError> {
    check_bounds(inst, state.n as u64)?;
    match inst.opcode.kind() {
        OpcodeKind::NoOp => Ok(None),
        OpcodeKind::Measurement => {
            let (outcome, probability) = state.measure(inst.target as usize, rng);
            Ok(Some(MeasurementRecord {
                step,
                qubit: inst.target,
                outcome,
                probability,
            }))
        }
        OpcodeKind::Unitary => {
            match gate_unitary(inst.opcode)? {
                GateMatrix::One(m) => state.apply_one(inst.target as usize, &m),
                GateMatrix::Two(m) => {
                    state.apply_two(inst.control as usize, inst.target as usize, &m)
                }
            }
            debug_assert!((state.norm() - 1.0).abs() < 1e-9);
            Ok(None)
        }
    }
}

/// Runs a program from |0...0> with the default qubit cap.
pub fn run_program(prog: &Program, seed: u64) -> Result<RunResult, VmError> {
    run_program_with_cap(prog, seed, DEFAULT_QUBIT_CAP)
}

pub fn run_program_with_cap(prog: &Program, seed: u64, cap: usize) -> Result<RunResult, VmError> {
    if prog.qubit_count > cap as u64 {
        return Err(VmError::CapExceeded {
            qubits: prog.qubit_count,
            cap,
        });
    }
    let mut state = StateVector::zero_state(prog.qubit_count as usize, cap)?;
    let mut rng = SplitMix64::new(seed);
    let mut records = Vec::new();
    for (i, inst) in prog.instructions.iter().enumerate() {
        match apply_instruction(&mut state, inst, &mut rng, i) {
            Ok(Some(record)) => records.push(record),
            Ok(None) => {}
            Err(e) => {
                return Err(VmError::AtInstruction {
                    index: i,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(RunResult {
        final_state: state,
        records,
        seed,
    })
}

/// Runs the program `shots` times (shot `k` seeded with `seed + k`) and
/// tallies the measured bitstrings.
pub fn sample_shots(
    prog: &Program,
    shots: u64,
    seed: u64,
) -> Result<BTreeMap<String, u64>, VmError> {
    sample_shots_with_cap(prog, shots, seed, DEFAULT_QUBIT_CAP)
}

pub fn sample_shots_with_cap(
    prog: &Program,
    shots: u64,
    seed: u64,
    cap: usize,
) -> Result<BTreeMap<String, u64>, VmError> {
    if shots == 0 {
        return Err(VmError::InvalidShots);
    }
    let mut histogram = BTreeMap::new();
    for k in 0..shots {
        let result = run_program_with_cap(prog, seed.wrapping_add(k), cap)?;
        *histogram.entry(result.bitstring()).or_insert(0) += 1;
    }
    Ok(histogram)
}

/// A dense `2^n x 2^n` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    n: usize,
    data: Vec<Complex64>,
}

impl Unitary {
    pub fn identity(n: usize) -> Self {
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            data[r * dim + r] = ONE;
        }
        Self { n, data }
    }

    /// The permutation matrix sending basis state `s` to `perm[s]`.
    pub fn permutation(n: usize, perm: &[usize]) -> Self {
        let dim = 1usize << n;
        assert_eq!(perm.len(), dim);
        let mut data = vec![ZERO; dim * dim];
        for (s, &t) in perm.iter().enumerate() {
            data[t * dim + s] = ONE;
        }
        Self { n, data }
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    /// Left-multiplies by a one-qubit gate embedded on `qubit`.
    fn apply_one_left(&mut self, qubit: usize, m: &[[Complex64; 2]; 2]) {
        let dim = self.dim();
        let mask = 1usize << qubit;
        for r in 0..dim {
            if r & mask == 0 {
                let r1 = r | mask;
                for c in 0..dim {
                    let a0 = self.data[r * dim + c];
                    let a1 = self.data[r1 * dim + c];
                    self.data[r * dim + c] = m[0][0] * a0 + m[0][1] * a1;
                    self.data[r1 * dim + c] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
    }

    /// Left-multiplies by a two-qubit gate embedded on `(first, second)`.
    fn apply_two_left(&mut self, first: usize, second: usize, m: &[[Complex64; 4]; 4]) {
        let dim = self.dim();
        let mf = 1usize << first;
        let ms = 1usize << second;
        for r in 0..dim {
            if r & mf == 0 && r & ms == 0 {
                let rows = [r, r | ms, r | mf, r | mf | ms];
                for c in 0..dim {
                    let a: Vec<Complex64> = rows.iter().map(|&k| self.data[k * dim + c]).collect();
                    for (mi, &k) in rows.iter().enumerate() {
                        self.data[k * dim + c] = m[mi][0] * a[0]
                            + m[mi][1] * a[1]
                            + m[mi][2] * a[2]
                            + m[mi][3] * a[3];
                    }
                }
            }
        }
    }

    pub fn matmul(&self, rhs: &Unitary) -> Unitary {
        assert_eq!(self.n, rhs.n);
        let dim = self.dim();
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for k in 0..dim {
                let lhs = self.data[r * dim + k];
                if lhs == ZERO {
                    continue;
                }
                for c in 0..dim {
                    data[r * dim + c] += lhs * rhs.data[k * dim + c];
                }
            }
        }
        Unitary { n: self.n, data }
    }

    pub fn dagger(&self) -> Unitary {
        let dim = self.dim();
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[c * dim + r] = self.data[r * dim + c].conj();
            }
        }
        Unitary { n: self.n, data }
    }

    /// Rearranges rows so that row `s` of `self` lands on row `perm[s]`;
    /// equivalent to left-multiplying by [`Unitary::permutation`].
    pub fn permute_rows(&self, perm: &[usize]) -> Unitary {
        let dim = self.dim();
        assert_eq!(perm.len(), dim);
        let mut data = vec![ZERO; dim * dim];
        for s in 0..dim {
            let t = perm[s];
            data[t * dim..(t + 1) * dim].copy_from_slice(&self.data[s * dim..(s + 1) * dim]);
        }
        Unitary { n: self.n, data }
    }

    /// First column: the image of |0...0>.
    pub fn column_zero(&self) -> Vec<Complex64> {
        let dim = self.dim();
        (0..dim).map(|r| self.data[r * dim]).collect()
    }

    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Builds the dense unitary of a measurement-free program as the product of
/// its embedded gate matrices in program order.
pub fn program_unitary(prog: &Program) -> Result<Unitary, VmError> {
    if prog.qubit_count > UNITARY_QUBIT_MAX {
        return Err(VmError::TooLarge {
            qubits: prog.qubit_count,
            max: UNITARY_QUBIT_MAX,
        });
    }
    let n = prog.qubit_count as usize;
    let mut u = Unitary::identity(n);
    for (i, inst) in prog.instructions.iter().enumerate() {
        if inst.opcode.kind() == OpcodeKind::Measurement {
            return Err(VmError::ContainsMeasurement { index: i });
        }
        check_bounds(inst, prog.qubit_count).map_err(|e| VmError::AtInstruction {
            index: i,
            source: Box::new(e),
        })?;
        match gate_unitary(inst.opcode)? {
            GateMatrix::One(m) => u.apply_one_left(inst.target as usize, &m),
            GateMatrix::Two(m) => {
                u.apply_two_left(inst.control as usize, inst.target as usize, &m)
            }
        }
    }
    Ok(u)
}
