//! Point-set distances: Chamfer and Earth Mover's.

mod chamfer;
pub mod emd;
pub mod kdtree;

pub use chamfer::{chamfer, nearest_neighbor_index};
pub use emd::{emd, emd_solution, EmdConfig, EmdMethod, EmdSolution};
pub use kdtree::{KdTree, Neighbor};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceKind {
    #[serde(rename = "CD")]
    Chamfer,
    #[serde(rename = "EMD")]
    Emd,
}

impl std::fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DistanceKind::Chamfer => "CD",
            DistanceKind::Emd => "EMD",
        })
    }
}

/// A distance kind together with the settings needed to evaluate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PairDistance {
    #[serde(rename = "CD")]
    Chamfer { normalize: bool },
    #[serde(rename = "EMD")]
    Emd(EmdConfig),
}

impl PairDistance {
    pub fn chamfer() -> Self {
        PairDistance::Chamfer { normalize: true }
    }

    pub fn emd() -> Self {
        PairDistance::Emd(EmdConfig::default())
    }

    pub fn kind(&self) -> DistanceKind {
        match self {
            PairDistance::Chamfer { .. } => DistanceKind::Chamfer,
            PairDistance::Emd(_) => DistanceKind::Emd,
        }
    }

    pub fn eval(&self, a: &PointCloud, b: &PointCloud) -> Result<f64> {
        match self {
            PairDistance::Chamfer { normalize } => Ok(chamfer(a, b, *normalize)),
            PairDistance::Emd(cfg) => emd(a, b, cfg),
        }
    }
}
