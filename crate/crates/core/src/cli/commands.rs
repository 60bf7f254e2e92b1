use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use super::bundle::{load_model, save_model, FeatureArchive, ModelBundle};
use super::config::{ExperimentConfig, PipelineConfig};
use super::container::{Container, VERSION};
use super::pipeline::{evaluate_images, extract_records, train_pipeline, TrainedPipeline};
use super::report::EvalReport;
use crate::dataio::{load_dataset, synth_generate, write_dataset, BitDepth, SynthSpec};
use crate::error::{Error, Result};

/// Writes a synthetic dataset. Without a spec file the defaults are used.
pub fn cmd_synth(spec_file: Option<&Path>, out_dir: &Path, seed: Option<u64>) -> Result<usize> {
    let mut spec = match spec_file {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            toml::from_str::<SynthSpec>(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => SynthSpec::default(),
    };
    if let Some(s) = seed {
        spec.seed = s;
    }
    let images = synth_generate(&spec).map_err(|e| e.in_stage("synth"))?;
    write_dataset(out_dir, &images, BitDepth::Sixteen)?;
    Ok(images.len())
}

/// Extracts descriptors for every image of a dataset into an archive.
/// Nothing is written if any image fails.
pub fn cmd_extract(dataset_dir: &Path, out_file: &Path, config: &PipelineConfig) -> Result<usize> {
    config.validate()?;
    let images = load_dataset(dataset_dir).map_err(|e| e.in_stage("load"))?;
    let records = extract_records(&images, &config.features).map_err(|e| e.in_stage("extract"))?;
    let n = records.len();
    FeatureArchive {
        features: config.features.clone(),
        records,
    }
    .save(out_file)?;
    Ok(n)
}

/// Log file written next to a model: `<model>.log`.
pub fn log_path(model: &Path) -> PathBuf {
    let mut s = model.as_os_str().to_owned();
    s.push(".log");
    PathBuf::from(s)
}

/// Trains from a dataset directory or a feature archive and writes the
/// model. Progress goes to `echo` and to the log file.
pub fn cmd_train(
    input: &Path,
    config: &PipelineConfig,
    out_model: &Path,
    mut echo: impl FnMut(&str),
) -> Result<TrainedPipeline> {
    config.validate()?;
    let records = if input.is_dir() {
        let images = load_dataset(input).map_err(|e| e.in_stage("load"))?;
        extract_records(&images, &config.features).map_err(|e| e.in_stage("extract"))?
    } else {
        let archive = FeatureArchive::load(input).map_err(|e| e.in_stage("load"))?;
        if archive.features != config.features {
            return Err(Error::Config(format!(
                "{} was extracted with different feature parameters",
                input.display()
            )));
        }
        archive.records
    };
    let log_file = log_path(out_model);
    let mut log = fs::File::create(&log_file).map_err(|e| Error::io(&log_file, e))?;
    let mut io_err = None;
    let trained = train_pipeline(records, config, |ev| {
        let line = ev.line();
        echo(&line);
        if io_err.is_none() {
            io_err = writeln!(log, "{line}").err();
        }
    })?;
    if let Some(e) = io_err {
        return Err(Error::io(&log_file, e));
    }
    save_model(&trained.bundle, out_model)?;
    Ok(trained)
}

/// Evaluates a saved model on a dataset under the given protocol.
pub fn cmd_eval(model_file: &Path, dataset_dir: &Path, exp: &ExperimentConfig) -> Result<EvalReport> {
    exp.validate()?;
    let bundle = load_model(model_file)?;
    let images = load_dataset(dataset_dir).map_err(|e| e.in_stage("load"))?;
    evaluate_images(&bundle, images, exp).map_err(|e| e.in_stage("eval"))
}

/// Human-readable summary of a model file.
pub fn cmd_inspect(model_file: &Path) -> Result<String> {
    let container = Container::read(model_file)?;
    let bundle = ModelBundle::from_container(&container)?;
    let mut s = String::new();
    let _ = writeln!(s, "format version {VERSION}");
    let m = &bundle.config.model;
    let _ = writeln!(
        s,
        "features {} -> mlp {} -> blstm {:?} -> {} classes",
        m.feature_dim, bundle.config.mlp.hidden, bundle.config.blstm.layer_sizes, m.class_count
    );
    let mut total = 0;
    for t in &container.tensors {
        total += t.data.len();
        let _ = writeln!(s, "  {:<28} {:?}", t.name, t.dims);
    }
    let _ = writeln!(s, "{} tensors, {total} parameters", container.tensors.len());
    let _ = writeln!(s, "--- config ---");
    s.push_str(&container.text);
    Ok(s)
}
