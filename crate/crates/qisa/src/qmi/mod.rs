//! The annealing-model side: quantum machine instruction codec, Chimera
//! topology, Ising/QUBO problems, an exact ground-state oracle and a
//! repeated-read simulated annealer.
//!
//! A QMI is the triple `{qubit, qubit, value}`: equal qubit fields assign a
//! weight to that qubit, distinct fields set the strength of the coupler
//! between them. Values are reals in `[-1, 1]` quantized to 10 bits of
//! precision on the wire.

mod anneal;
mod chimera;
mod codec;
mod ising;

pub use anneal::{simulated_anneal, success_probability, SampleEntry, SampleSet};
pub use chimera::{validate_embedding, ChimeraTopology, EmbeddingViolation};
pub use codec::{
    decode_qmi, dequantize_value, emit_qmi_text, encode_qmi, parse_qmi_text, quantize_value,
    read_qmib, write_qmib, QmiInstruction, QmiProgram, QMIB_HEADER_LEN, QMIB_MAGIC, QMIB_VERSION,
    VALUE_SCALE,
};
pub use ising::{
    brute_force_ground_state, ising_energy, qubo_to_ising, to_ising, GroundState, IsingProblem,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QmiError {
    #[error("address overflow: qubit index {index} does not fit in 27 bits")]
    AddressOverflow { index: u64 },
    #[error("invalid value code {0}")]
    InvalidCode(i16),
    #[error("header declares {declared} instruction(s) but {actual} present")]
    HeaderMismatch { declared: u64, actual: u64 },
    #[error("duplicate key ({a}, {b})")]
    DuplicateKey { a: u64, b: u64 },
    #[error("line {line}: {message}")]
    MalformedLine { line: u32, message: String },
    #[error("bad container: {0}")]
    BadContainer(String),
    #[error("problem with {variables} variables is too large for exhaustive search (max 24)")]
    TooLarge { variables: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid chimera dimensions: {0}")]
    InvalidChimera(String),
}
