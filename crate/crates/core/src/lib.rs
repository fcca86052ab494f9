//! Statevector simulation, exact compilation into a universal variational
//! ansatz, and a PAC-learning testbench for that ansatz.
//!
//! Qubits are numbered from 0 and qubit 0 is the most significant bit of a
//! computational-basis index. The ansatz literature numbers qubits from 1,
//! so "qubit 1" there is qubit 0 here.

pub mod ansatz;
pub mod circuit;
pub mod compiler;
pub mod concept;
pub mod error;
pub mod experiment;
pub mod learning;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod sim;
pub mod state;

pub use ansatz::{build_ansatz, expand_layer, expand_level1, AnsatzShape, ParamIndex, ParamVector};
pub use circuit::{Circuit, Gate};
pub use compiler::{
    compile_to_ansatz, euler_zx, layers_for_gate, normalize_circuit, verify_compilation, CompiledAnsatz,
    EulerZX, NormalizedGate, Verification,
};
pub use error::{Error, Result};
pub use linalg::{Mat2, UnitaryMatrix, C64};
pub use metrics::{equal_up_to_phase, fidelity, loss, op_norm_distance, trace_distance_oracle, LossValue};
pub use sim::{apply_circuit, apply_gate, circuit_unitary, DENSE_CAP};
pub use state::{basis_state, sample_haar_state, StateVector};
pub use learning::{
    empirical_risk, erm_gap_check, estimate_risk, generate_dataset, round_to_grid, sample_complexity,
    train_erm, ComplexityReport, ConceptClassParams, Dataset, ErmGap, InputDistribution, RiskEstimate,
    TrainConfig, TrainResult,
};
pub use concept::random_concept_circuit;
pub use experiment::{
    experiment_compile_sweep, experiment_generalization_gap, ExperimentConfig, ExperimentKind, ExperimentRecord,
};
pub use io::{parse_circuit, serialize_circuit};

/// Size the global worker pool used for parallel trials. Call once, before
/// any parallel work; results do not depend on the worker count.
pub fn init_workers(workers: usize) -> Result<()> {
    if workers == 0 {
        return Err(Error::Domain("worker count must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| Error::Domain(format!("cannot size worker pool: {e}")))
}
