use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed mesh file: {0}")]
    MeshFormat(String),

    #[error("non-manifold edge ({0}, {1}) is shared by {2} faces")]
    NonManifoldEdge(u32, u32, usize),

    #[error("inconsistent orientation across edge ({0}, {1})")]
    InconsistentOrientation(u32, u32),

    #[error("face {0} has zero area")]
    DegenerateFace(usize),

    #[error("invalid family spec: {0}")]
    InvalidSpec(String),

    #[error("mesh too coarse near branch point: clearance {clearance:.4} is below 3 edge lengths ({needed:.4})")]
    BranchTooCoarse { clearance: f64, needed: f64 },

    #[error("point {0} is a branch value of the projection")]
    BranchValue(String),

    #[error("curve is empty")]
    EmptyCurve,

    #[error("no admissible grid jitter after {attempts} attempts (closest vertex at {closest:.3e} from a grid line)")]
    JitterExhausted { attempts: usize, closest: f64 },

    #[error("side {side} meets a critical value of the projection")]
    CriticalValueOnSide { side: usize },

    #[error("boundary arc between crosses {0} and {1} does not lie over a shared side")]
    UnmatchedArc(usize, usize),

    #[error("patch over cell ({0}, {1}) has projection degree {2:.4}, not a graph")]
    NonGraphPatch(usize, usize, f64),

    #[error("patch over cell ({0}, {1}) at k={2} is not contained in its coarse patch")]
    IncompatiblePatch(usize, usize, usize),

    #[error("base point {0} lies on a cell boundary")]
    BaseOnCellBoundary(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}
