use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::container::{Container, StoredTensor};
use crate::blstm::BlstmModel;
use crate::dataio::AspectTagged;
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::mlp::MlpParams;
use crate::tensors::TensorSet;

/// Trained reducer and sequence classifier with the config that made them.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub config: PipelineConfig,
    pub mlp: MlpParams,
    pub blstm: BlstmModel,
}

fn stored<T: TensorSet>(set: &T) -> Vec<StoredTensor> {
    set.tensors()
        .into_iter()
        .map(|t| StoredTensor::from_f64(t.name, t.dims, t.data))
        .collect()
}

impl ModelBundle {
    /// Empty model with the shapes the config describes.
    pub fn zeros(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let (dim, classes, hidden) = (config.model.feature_dim, config.model.class_count, config.mlp.hidden);
        let mlp = MlpParams::zeros(dim, hidden, classes);
        let blstm = BlstmModel::zeros(hidden, &config.blstm.layer_sizes, classes)?;
        Ok(ModelBundle { config, mlp, blstm })
    }

    pub fn to_container(&self) -> Result<Container> {
        let mut tensors = stored(&self.mlp);
        tensors.extend(stored(&self.blstm));
        Ok(Container {
            text: self.config.to_toml()?,
            tensors,
        })
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        let config = PipelineConfig::from_toml(&c.text)?;
        let mut bundle = Self::zeros(config)?;
        let expected = bundle.mlp.tensors().len() + bundle.blstm.tensors().len();
        if c.tensors.len() != expected {
            return Err(Error::Format(format!(
                "config implies {expected} tensors, file has {}",
                c.tensors.len()
            )));
        }
        let mut stored = c.tensors.iter();
        let targets = bundle
            .mlp
            .tensors_mut()
            .into_iter()
            .chain(bundle.blstm.tensors_mut());
        for (t, s) in targets.zip(stored.by_ref()) {
            if t.name != s.name || t.dims != s.dims {
                return Err(Error::Format(format!(
                    "tensor `{}` {:?} does not match config, expected `{}` {:?}",
                    s.name, s.dims, t.name, t.dims
                )));
            }
            t.data.iter_mut().zip(&s.data).for_each(|(d, &v)| *d = v as f64);
        }
        Ok(bundle)
    }

    /// Copy with every parameter rounded to its stored precision.
    pub fn rounded(&self) -> Self {
        let mut b = self.clone();
        for t in b.mlp.tensors_mut().into_iter().chain(b.blstm.tensors_mut()) {
            t.data.iter_mut().for_each(|v| *v = *v as f32 as f64);
        }
        b
    }
}

pub fn save_model(bundle: &ModelBundle, path: &Path) -> Result<()> {
    bundle.to_container()?.write(path)
}

pub fn load_model(path: &Path) -> Result<ModelBundle> {
    let c = Container::read(path)?;
    ModelBundle::from_container(&c).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        e => e,
    })
}

/// Descriptor of one image plus its acquisition metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub source_file: PathBuf,
    pub class_id: usize,
    pub serial: String,
    pub depression_deg: f64,
    pub aspect_deg: f64,
    pub values: Vec<f64>,
}

impl AspectTagged for FeatureRecord {
    fn class_id(&self) -> usize {
        self.class_id
    }
    fn serial(&self) -> &str {
        &self.serial
    }
    fn depression_deg(&self) -> f64 {
        self.depression_deg
    }
    fn aspect_deg(&self) -> f64 {
        self.aspect_deg
    }
    fn source_file(&self) -> &Path {
        &self.source_file
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArchiveEntry {
    file: PathBuf,
    class_id: usize,
    serial: String,
    depression_deg: f64,
    aspect_deg: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArchiveHeader {
    kind: String,
    features: FeatureConfig,
    images: Vec<ArchiveEntry>,
}

const ARCHIVE_KIND: &str = "features";

/// Descriptors of a whole dataset, one tensor per image keyed by source path.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureArchive {
    pub features: FeatureConfig,
    pub records: Vec<FeatureRecord>,
}

impl FeatureArchive {
    pub fn to_container(&self) -> Result<Container> {
        let header = ArchiveHeader {
            kind: ARCHIVE_KIND.into(),
            features: self.features.clone(),
            images: self
                .records
                .iter()
                .map(|r| ArchiveEntry {
                    file: r.source_file.clone(),
                    class_id: r.class_id,
                    serial: r.serial.clone(),
                    depression_deg: r.depression_deg,
                    aspect_deg: r.aspect_deg,
                })
                .collect(),
        };
        Ok(Container {
            text: toml::to_string(&header).map_err(|e| Error::Format(e.to_string()))?,
            tensors: self
                .records
                .iter()
                .map(|r| {
                    StoredTensor::from_f64(r.source_file.to_string_lossy(), vec![r.values.len()], &r.values)
                })
                .collect(),
        })
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        let header: ArchiveHeader =
            toml::from_str(&c.text).map_err(|e| Error::Format(format!("not a feature archive: {e}")))?;
        if header.kind != ARCHIVE_KIND {
            return Err(Error::Format(format!("not a feature archive (kind `{}`)", header.kind)));
        }
        if header.images.len() != c.tensors.len() {
            return Err(Error::Format(format!(
                "{} image entries but {} tensors",
                header.images.len(),
                c.tensors.len()
            )));
        }
        let records = header
            .images
            .into_iter()
            .zip(&c.tensors)
            .map(|(e, t)| {
                if t.name != e.file.to_string_lossy() || t.dims.len() != 1 {
                    return Err(Error::Format(format!("tensor `{}` does not match entry {}", t.name, e.file.display())));
                }
                Ok(FeatureRecord {
                    source_file: e.file,
                    class_id: e.class_id,
                    serial: e.serial,
                    depression_deg: e.depression_deg,
                    aspect_deg: e.aspect_deg,
                    values: t.to_f64(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureArchive {
            features: header.features,
            records,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_container()?.write(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_container(&Container::read(path)?).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            e => e,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Rng;

    fn small_bundle() -> ModelBundle {
        let mut config = PipelineConfig::default();
        config.model.feature_dim = 7;
        config.model.class_count = 3;
        config.mlp.hidden = 5;
        config.blstm.layer_sizes = vec![4, 2];
        let mut rng = Rng::new(1);
        let mlp = MlpParams::init(7, 5, 3, &mut rng);
        let blstm = BlstmModel::init(5, &[4, 2], 3, &mut rng).unwrap();
        ModelBundle { config, mlp, blstm }
    }

    #[test]
    fn bundle_roundtrip_at_f32() {
        let b = small_bundle();
        let back = ModelBundle::from_container(&b.to_container().unwrap()).unwrap();
        assert_eq!(back, b.rounded());
        assert_eq!(back.config, b.config);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let b = small_bundle();
        let mut c = b.to_container().unwrap();
        c.text = c.text.replace("hidden = 5", "hidden = 6");
        assert!(matches!(ModelBundle::from_container(&c), Err(Error::Format(m)) if m.contains("mlp.w1t")));
    }

    #[test]
    fn archive_roundtrip() {
        let a = FeatureArchive {
            features: FeatureConfig::default(),
            records: vec![FeatureRecord {
                source_file: "x/a.pgm".into(),
                class_id: 2,
                serial: "s".into(),
                depression_deg: 17.0,
                aspect_deg: 12.5,
                values: vec![0.25, 0.5, 0.0],
            }],
        };
        assert_eq!(FeatureArchive::from_container(&a.to_container().unwrap()).unwrap(), a);
        let not_archive = small_bundle().to_container().unwrap();
        assert!(FeatureArchive::from_container(&not_archive).is_err());
    }
}
