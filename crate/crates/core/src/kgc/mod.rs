//! Tensor-factorization link prediction: TuckER, DistMult and ComplEx with
//! 1-N scoring, binary cross-entropy, Adam and optional pre-trained entity
//! initialization.

mod adam;
mod batchnorm;
mod checkpoint;
mod dropout;
mod forward;
mod loss;
mod model;
mod score;
mod train;

pub use adam::{adam_step, AdamState, ParamBlock};
pub use batchnorm::{BatchNorm, BatchNormCache};
pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use dropout::{DropoutMasks, DropoutRates, DropoutState};
pub use forward::{backward, forward_train, update_batchnorm_stats, BatchNormGrads, ForwardPass, Gradients};
pub use loss::{batch_loss, bce_loss, compute_gradients, predict_probabilities, LabeledBatch, BCE_EPS};
pub use model::{BatchNormPair, KgcModelParams, ModelKind};
pub use score::{hidden_vector, relation_matrix, score_all_tails, score_triple, scores_from_hidden};
pub use train::{fit, initial_params, DevSet, EpochRecord, FitOutput, InitMode, TrainConfig, TrainingLog};
