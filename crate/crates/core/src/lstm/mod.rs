//! From-scratch LSTM regression network: one LSTM layer followed by a
//! fully connected head, trained by full-sequence backpropagation through
//! time with Adam.

mod adam;
mod backward;
mod forward;
mod gradcheck;
mod params;
mod persist;
mod train;

pub use adam::{adam_step, clip_factor, AdamState};
pub use backward::{
    backward, bptt_gradients, central_difference, finite_diff_gradients, max_relative_error,
    RELATIVE_ERROR_FLOOR,
};
pub use forward::{
    as_sequence, lstm_cell_forward, mse_loss, network_forward, ForwardCache, GateCache, LstmState,
};
pub use gradcheck::{gradient_check, GradCheckReport};
pub use params::{
    init_params, DenseParams, Gate, LstmNetwork, LstmParams, Matrix, ParamSet, Tensors,
};
pub use persist::{ModelDocument, MODEL_FORMAT};
pub use train::{train, train_from, TrainingConfig};
