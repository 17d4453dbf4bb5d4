use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "pceval", version, about = "Point-cloud distances, generator evaluation and latent GMM tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Metric {
    Cd,
    Emd,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Covariance {
    Full,
    Diag,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Criterion {
    Jsd,
    MmdCd,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Reduction {
    Mean,
    Sum,
}

#[derive(Args, Clone)]
pub struct EmdArgs {
    /// Largest point count solved exactly; larger problems use the auction solver
    #[arg(long, default_value_t = 512)]
    pub emd_exact_threshold: usize,
    /// Relative error tolerated by the auction solver
    #[arg(long, default_value_t = 1e-3)]
    pub emd_epsilon: f64,
    /// Report total transport cost instead of the per-point mean
    #[arg(long)]
    pub emd_total: bool,
}

#[derive(Subcommand)]
pub enum Command {
    /// Sample points uniformly from the surface of an OFF mesh
    SampleMesh {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        seed: u64,
        /// Center and scale the result into the unit sphere
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Center every cloud and scale it into the unit sphere
    Normalize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distance between every cloud of A and every cloud of B (JSON on stdout)
    Dist {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value = "cd")]
        metric: Metric,
        /// Sum squared distances instead of averaging them per direction
        #[arg(long)]
        chamfer_sum: bool,
        #[command(flatten)]
        emd: EmdArgs,
    },
    /// Score generator samples against a reference set
    Eval(EvalArgs),
    /// Fit a Gaussian mixture to latent codes
    GmmFit {
        #[arg(long)]
        codes: PathBuf,
        #[arg(long, default_value_t = 32)]
        components: usize,
        #[arg(long, value_enum, default_value = "full")]
        covariance: Covariance,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, default_value_t = 1e-6)]
        regularization: f64,
        #[arg(long, default_value_t = 3)]
        restarts: usize,
        /// Model JSON
        #[arg(long)]
        out: PathBuf,
        /// Optional fit diagnostics JSON
        #[arg(long)]
        diagnostics: Option<PathBuf>,
    },
    /// Draw latent codes from a fitted mixture
    GmmSample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode latent codes into point clouds
    Decode {
        #[arg(long)]
        codes: PathBuf,
        /// Template cloud for the linear decoder
        #[arg(long, requires = "weights", conflicts_with = "command")]
        template: Option<PathBuf>,
        /// 3N x k weight matrix (LATC) for the linear decoder
        #[arg(long, requires = "template")]
        weights: Option<PathBuf>,
        /// External decoder, run as `<command> <codes.latc> <out.pcset>`
        #[arg(long, required_unless_present = "template")]
        command: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Latent-space arithmetic
    #[command(subcommand)]
    Latent(LatentCommand),
    /// Completion accuracy and coverage at radius rho (JSON on stdout)
    CompleteScore {
        #[arg(long)]
        predicted: PathBuf,
        #[arg(long)]
        ground_truth: PathBuf,
        #[arg(long, default_value_t = 0.02)]
        rho: f64,
    },
    /// Intersection over union of two binary voxel grids (JSON on stdout)
    Iou {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Seeded train/validation/test split of indices
    Split {
        #[arg(long)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.85,0.05,0.10")]
        ratios: Vec<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random subset of a training set, as a memorizing generator would produce
    BaselineMemorize {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        with_replacement: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hedged version of every reference cloud
    FixtureHedge {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = 0.4)]
        hot_fraction: f64,
        #[arg(long, default_value_t = 0.03)]
        spread: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keep the part of every cloud below a plane
    Crop {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        normal: Vec<f64>,
        #[arg(long)]
        keep_fraction: f64,
        #[arg(long)]
        resample_to: Option<usize>,
        #[arg(long)]
        with_replacement: bool,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick the checkpoint whose samples best match a validation set
    Select {
        /// Manifest with one `label path` pair per line
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        validation: PathBuf,
        #[arg(long, value_enum, default_value = "jsd")]
        criterion: Criterion,
        #[arg(long, default_value_t = 28)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct EvalArgs {
    /// PCSET with `repetitions * oversample * |reference|` clouds, grouped by repetition
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a one-row CSV summary
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 28)]
    pub resolution: usize,
    /// Grid resolution for the reference histogram; must equal --resolution
    #[arg(long)]
    pub reference_resolution: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub oversample: usize,
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    /// Recorded in the report
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub chamfer_sum: bool,
    /// Mark the report as produced from synthetic samples
    #[arg(long)]
    pub synthetic: bool,
    #[command(flatten)]
    pub emd: EmdArgs,
}

#[derive(Subcommand)]
pub enum LatentCommand {
    /// Codes evenly spaced between two rows of a code file
    Interpolate {
        #[arg(long)]
        codes: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        /// Number of codes including both endpoints
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Move every code along the direction from group A to group B
    Edit {
        #[arg(long)]
        codes: PathBuf,
        #[arg(long)]
        group_a: PathBuf,
        #[arg(long)]
        group_b: PathBuf,
        #[arg(long, value_enum, default_value = "mean")]
        reduction: Reduction,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        strength: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Row of the codebook nearest to `b + (a' - a)` (JSON on stdout)
    Analogy {
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        a_prime: usize,
        #[arg(long)]
        b: usize,
    },
}
