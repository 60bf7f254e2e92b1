//! Pipeline orchestration: configuration, persistence, training and
//! evaluation behind the `multiaspect` command.

mod bundle;
mod commands;
mod config;
mod container;
mod pipeline;
mod report;

pub use bundle::{load_model, save_model, FeatureArchive, FeatureRecord, ModelBundle};
pub use commands::{cmd_eval, cmd_extract, cmd_inspect, cmd_synth, cmd_train, log_path};
pub use config::{BlstmStage, DataPaths, ExperimentConfig, MlpStage, ModelShape, PipelineConfig, SequenceConfig};
pub use container::{Container, StoredTensor, MAGIC, VERSION};
pub use pipeline::{apply_noise, evaluate_images, evaluate_records, extract_records, train_pipeline, TrainEvent, TrainedPipeline};
pub use report::EvalReport;
