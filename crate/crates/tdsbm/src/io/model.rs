//! Fitted models as versioned JSON documents.

use crate::analysis::ModelKind;
use crate::error::{Error, Result};
use crate::tdd::DiscreteModel;
use crate::tdmm::MixedModel;
use ndarray::{Array2, Array3};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk form of any fitted model. Mixed models carry `c`; discrete
/// and static models carry `labels` and `theta` plus the profile
/// `objective`. The rate tensor is flattened in (block, block, layer)
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub kind: ModelKind,
    pub n_nodes: usize,
    pub k: usize,
    pub t_layers: usize,
    pub node_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    pub omega: Vec<f64>,
    pub loglik: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    pub seed: u64,
    /// Fit configuration as written by the caller, kept verbatim.
    pub config: serde_json::Value,
}

impl ModelFile {
    pub fn from_mixed(
        model: &MixedModel,
        node_ids: Vec<String>,
        loglik: f64,
        seed: u64,
        config: serde_json::Value,
    ) -> Self {
        ModelFile {
            schema_version: SCHEMA_VERSION,
            kind: ModelKind::Tdmm,
            n_nodes: model.n_nodes(),
            k: model.n_blocks(),
            t_layers: model.n_layers(),
            node_ids,
            c: Some(model.c.iter().copied().collect()),
            labels: None,
            theta: None,
            omega: model.omega.iter().copied().collect(),
            loglik,
            objective: None,
            seed,
            config,
        }
    }

    pub fn from_discrete(
        kind: ModelKind,
        model: &DiscreteModel,
        node_ids: Vec<String>,
        loglik: f64,
        objective: f64,
        seed: u64,
        config: serde_json::Value,
    ) -> Self {
        ModelFile {
            schema_version: SCHEMA_VERSION,
            kind,
            n_nodes: model.n_nodes(),
            k: model.n_blocks(),
            t_layers: model.n_layers(),
            node_ids,
            c: None,
            labels: Some(model.labels.clone()),
            theta: Some(model.theta.clone()),
            omega: model.omega.iter().copied().collect(),
            loglik,
            objective: Some(objective),
            seed,
            config,
        }
    }

    fn omega_tensor(&self) -> Result<Array3<f64>> {
        Array3::from_shape_vec((self.k, self.k, self.t_layers), self.omega.clone()).map_err(|_| {
            Error::Schema(format!(
                "omega holds {} values, expected {}x{}x{}",
                self.omega.len(),
                self.k,
                self.k,
                self.t_layers
            ))
        })
    }

    pub fn to_mixed(&self) -> Result<MixedModel> {
        if self.kind != ModelKind::Tdmm {
            return Err(Error::Schema(format!(
                "expected a tdmm model file, found kind {}",
                self.kind
            )));
        }
        let c = self
            .c
            .clone()
            .ok_or_else(|| Error::Schema("tdmm model file lacks memberships".into()))?;
        let c = Array2::from_shape_vec((self.n_nodes, self.k), c).map_err(|_| {
            Error::Schema(format!(
                "memberships hold the wrong count for {}x{}",
                self.n_nodes, self.k
            ))
        })?;
        Ok(MixedModel {
            c,
            omega: self.omega_tensor()?,
        })
    }

    pub fn to_discrete(&self) -> Result<DiscreteModel> {
        if self.kind == ModelKind::Tdmm {
            return Err(Error::Schema(
                "expected a discrete model file, found kind tdmm".into(),
            ));
        }
        let labels = self
            .labels
            .clone()
            .ok_or_else(|| Error::Schema("discrete model file lacks labels".into()))?;
        let theta = self
            .theta
            .clone()
            .ok_or_else(|| Error::Schema("discrete model file lacks strengths".into()))?;
        if labels.len() != self.n_nodes || theta.len() != self.n_nodes {
            return Err(Error::Schema(format!(
                "labels and strengths must cover all {} nodes",
                self.n_nodes
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&g| g >= self.k) {
            return Err(Error::Schema(format!(
                "label {bad} outside 0..{}",
                self.k
            )));
        }
        Ok(DiscreteModel {
            labels,
            theta,
            omega: self.omega_tensor()?,
        })
    }
}

pub fn write_model(path: &Path, file: &ModelFile) -> Result<()> {
    let writer = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(writer, file)?;
    Ok(())
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let reader = BufReader::new(File::open(path)?);
    let file: ModelFile = serde_json::from_reader(reader)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "model schema version {} unsupported, expected {SCHEMA_VERSION}",
            file.schema_version
        )));
    }
    if file.node_ids.len() != file.n_nodes {
        return Err(Error::Schema(format!(
            "{} node ids for {} nodes",
            file.node_ids.len(),
            file.n_nodes
        )));
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed_fixture() -> MixedModel {
        let c = Array2::from_shape_vec((3, 2), vec![0.5, 0.1, 0.3, 0.4, 0.2, 0.5]).unwrap();
        let omega = Array3::from_shape_fn((2, 2, 4), |(g, h, t)| (1 + g + 2 * h + t) as f64);
        MixedModel { c, omega }
    }

    fn discrete_fixture() -> DiscreteModel {
        DiscreteModel {
            labels: vec![0, 1, 1],
            theta: vec![1.0, 0.4, 0.6],
            omega: Array3::from_elem((2, 2, 4), 2.5),
        }
    }

    #[test]
    fn mixed_round_trip() {
        let model = mixed_fixture();
        let ids = vec!["a".into(), "b".into(), "c".into()];
        let file = ModelFile::from_mixed(&model, ids, -12.5, 7, serde_json::json!({"restarts": 10}));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        write_model(&path, &file).unwrap();
        let back = read_model(&path).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_mixed().unwrap(), model);
        assert!(back.to_discrete().is_err());
    }

    #[test]
    fn discrete_round_trip() {
        let model = discrete_fixture();
        let ids = vec!["a".into(), "b".into(), "c".into()];
        let file = ModelFile::from_discrete(
            ModelKind::Tdd,
            &model,
            ids,
            -40.0,
            13.25,
            3,
            serde_json::Value::Null,
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        write_model(&path, &file).unwrap();
        let back = read_model(&path).unwrap();
        assert_eq!(back.objective, Some(13.25));
        assert_eq!(back.to_discrete().unwrap(), model);
        assert!(back.to_mixed().is_err());
    }

    #[test]
    fn corrupt_shapes_rejected() {
        let model = discrete_fixture();
        let ids = vec!["a".into(), "b".into(), "c".into()];
        let mut file = ModelFile::from_discrete(
            ModelKind::Static,
            &model,
            ids,
            0.0,
            0.0,
            0,
            serde_json::Value::Null,
        );
        file.omega.pop();
        assert!(file.to_discrete().is_err());
        file.omega.push(0.0);
        file.labels.as_mut().unwrap()[0] = 9;
        assert!(file.to_discrete().is_err());
    }

    #[test]
    fn version_and_id_mismatches_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let mut file = ModelFile::from_mixed(
            &mixed_fixture(),
            vec!["a".into(), "b".into(), "c".into()],
            0.0,
            0,
            serde_json::Value::Null,
        );
        file.schema_version = 99;
        write_model(&path, &file).unwrap();
        assert!(read_model(&path).is_err());
        file.schema_version = SCHEMA_VERSION;
        file.node_ids.pop();
        write_model(&path, &file).unwrap();
        assert!(read_model(&path).is_err());
    }

    #[test]
    fn rate_tensor_order_is_block_block_layer() {
        let model = mixed_fixture();
        let file = ModelFile::from_mixed(
            &model,
            vec!["a".into(), "b".into(), "c".into()],
            0.0,
            0,
            serde_json::Value::Null,
        );
        // row-major flattening with K = 2, T = 4
        let idx = |g: usize, h: usize, t: usize| (g * 2 + h) * 4 + t;
        assert_eq!(file.omega[idx(0, 1, 2)], model.omega[[0, 1, 2]]);
        assert_eq!(file.omega[idx(1, 0, 3)], model.omega[[1, 0, 3]]);
    }
}
