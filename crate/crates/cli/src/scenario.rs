//! TOML scenario files.
//!
//! A scenario has a `[problem]` block (domain, potential, boundary data,
//! weight), a `[numerics]` block, optional task blocks (`[data]`, `[invert]`,
//! `[check]`, `[spectra]`, `[probe]`) and an optional `[output]` block.
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use ultraslow_core::analysis::DEFAULT_HARNACK_S;
use ultraslow_core::forward::{ExperimentConfig, ForcingRoute, Generator, PotentialSpec, Profile};
use ultraslow_core::inverse::InversionConfig;
use ultraslow_core::laplace::{ContourKind, ContourSpec};
use ultraslow_core::spectral::{Axis, BoundaryKind, EigenMethod};
use ultraslow_core::WeightFunction;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub seed: u64,
    pub problem: Problem,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub data: Data,
    #[serde(default)]
    pub invert: Invert,
    #[serde(default)]
    pub check: Check,
    #[serde(default)]
    pub spectra: Spectra,
    pub probe: Option<Probe>,
    #[serde(default)]
    pub output: Output,
    /// Directory of the scenario file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    /// `[lo, hi]` per axis; one axis for an interval, two for a rectangle.
    pub domain: Vec<[f64; 2]>,
    #[serde(default = "default_boundary")]
    pub boundary: String,
    #[serde(default)]
    pub potential: Potential,
    /// Edge amplitudes: left, right (and bottom, top in 2-D).
    pub edges: Vec<f64>,
    #[serde(default)]
    pub profile: Option<ProfileSpec>,
    pub x0: Vec<f64>,
    pub mu: MuSpec,
}

fn default_boundary() -> String {
    "dirichlet".into()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Potential {
    #[serde(default)]
    pub base: f64,
    #[serde(default)]
    pub slope_x: f64,
    #[serde(default)]
    pub slope_y: f64,
    #[serde(default)]
    pub bilinear: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    PolynomialBump { center: f64, width: f64, amplitude: f64 },
    RaisedCosine { center: f64, width: f64, amplitude: f64 },
    Table { points: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MuSpec {
    Constant { value: f64 },
    Linear { at_zero: f64, at_one: f64 },
    Nodes { alpha: Vec<f64>, values: Vec<f64> },
    NarrowHat { center: f64, half_width: f64 },
    RaisedCosine { nodes: usize, base: f64, amplitude: f64, a: f64, b: f64 },
    /// Two-column weight file.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// Interior nodes per axis.
    pub interior: Vec<usize>,
    pub horizon: f64,
    pub steps: usize,
    /// 0 selects the default truncation.
    pub modes: usize,
    pub eigen_method: String,
    pub contour: String,
    pub contour_nodes: usize,
    pub contour_scale: f64,
    pub contour_gamma: Option<f64>,
    pub route: String,
    pub alpha_nodes: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        let d = ExperimentConfig::interval_default();
        Self {
            interior: vec![31],
            horizon: d.horizon,
            steps: d.steps,
            modes: 0,
            eigen_method: d.method.name().into(),
            contour: d.contour.kind.name().into(),
            contour_nodes: d.contour.node_count,
            contour_scale: d.contour.scale,
            contour_gamma: None,
            route: d.route.name().into(),
            alpha_nodes: d.alpha_nodes,
        }
    }
}

/// Synthetic observation generation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Data {
    /// `spectral` or `timestep`.
    pub generator: String,
    /// Refinement factor of the time-stepping generator.
    pub refine: usize,
    pub noise: f64,
}

impl Default for Data {
    fn default() -> Self {
        Self { generator: "timestep".into(), refine: 4, noise: 0.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Invert {
    /// Observation CSV; its sidecar is `<record>.sidecar`. When absent the
    /// record is synthesized from `[problem.mu]` and `[data]`.
    pub record: Option<PathBuf>,
    pub basis_nodes: usize,
    pub tikhonov_weight: f64,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub misfit_tolerance: f64,
    pub fd_step: f64,
    pub initial: Option<MuSpec>,
}

impl Default for Invert {
    fn default() -> Self {
        let d = InversionConfig::default();
        Self {
            record: None,
            basis_nodes: d.basis_node_count,
            tikhonov_weight: d.tikhonov_weight,
            max_iterations: d.max_iterations,
            step_tolerance: d.step_tolerance,
            misfit_tolerance: d.misfit_tolerance,
            fd_step: d.fd_step,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Check {
    pub max_principle_tol: f64,
    pub harnack_s: Vec<f64>,
    /// Allowed relative drift of the Harnack constant under 2× refinement.
    pub harnack_drift: f64,
    pub semigroup_samples: usize,
    pub semigroup_steps: usize,
    pub semigroup_tol: f64,
    pub cross_tol: f64,
}

impl Default for Check {
    fn default() -> Self {
        Self {
            max_principle_tol: 1e-6,
            harnack_s: DEFAULT_HARNACK_S.to_vec(),
            harnack_drift: 0.2,
            semigroup_samples: 20,
            semigroup_steps: 400,
            semigroup_tol: 1e-4,
            cross_tol: 2e-2,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Spectra {
    /// Relaxation tables are written for this many leading eigenvalues.
    pub relaxation_modes: usize,
    pub relaxation_horizon: f64,
    pub relaxation_steps: usize,
}

impl Default for Spectra {
    fn default() -> Self {
        Self { relaxation_modes: 4, relaxation_horizon: 10.0, relaxation_steps: 200 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    /// The weight compared against `[problem.mu]`.
    pub mu_b: MuSpec,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: Option<PathBuf>,
}

impl Scenario {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut s: Scenario = toml::from_str(text).map_err(|e| CliError::usage(format!("scenario: {e}")))?;
        s.base_dir = base_dir.to_path_buf();
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::usage(format!("cannot read scenario {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes).map_err(|_| CliError::usage("scenario is not UTF-8"))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let s = Self::parse(text, &base)?;
        s.validate_paths()?;
        Ok((s, bytes))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn validate_paths(&self) -> Result<(), CliError> {
        let mut files: Vec<PathBuf> = Vec::new();
        let mut add_mu = |m: &MuSpec| {
            if let MuSpec::File { path } = m {
                files.push(self.resolve(path));
            }
        };
        add_mu(&self.problem.mu);
        if let Some(m) = &self.invert.initial {
            add_mu(m);
        }
        if let Some(p) = &self.probe {
            add_mu(&p.mu_b);
        }
        if let Some(r) = &self.invert.record {
            let r = self.resolve(r);
            files.push(sidecar_path(&r));
            files.push(r);
        }
        match files.into_iter().find(|f| !f.is_file()) {
            Some(f) => Err(CliError::usage(format!("referenced file {} does not exist", f.display()))),
            None => Ok(()),
        }
    }

    pub fn mu(&self, spec: &MuSpec) -> Result<WeightFunction, CliError> {
        let mu = match spec {
            MuSpec::Constant { value } => WeightFunction::constant(*value),
            MuSpec::Linear { at_zero, at_one } => WeightFunction::linear(*at_zero, *at_one),
            MuSpec::Nodes { alpha, values } => WeightFunction::new(alpha.clone(), values.clone()),
            MuSpec::NarrowHat { center, half_width } => WeightFunction::narrow_hat(*center, *half_width),
            MuSpec::RaisedCosine { nodes, base, amplitude, a, b } => {
                WeightFunction::raised_cosine(*nodes, *base, *amplitude, *a, *b)
            }
            MuSpec::File { path } => {
                let path = self.resolve(path);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::usage(format!("cannot read weight file {}: {e}", path.display())))?;
                WeightFunction::parse(&text)
            }
        };
        mu.map_err(|e| CliError::usage(format!("weight function: {e}")))
    }

    pub fn experiment(&self) -> Result<ExperimentConfig, CliError> {
        let p = &self.problem;
        let n = &self.numerics;
        if p.domain.len() != n.interior.len() {
            return Err(CliError::usage(format!(
                "problem.domain has {} axes but numerics.interior has {}",
                p.domain.len(),
                n.interior.len()
            )));
        }
        let axes = p
            .domain
            .iter()
            .zip(&n.interior)
            .map(|(d, &k)| Axis::new(d[0], d[1], k))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::usage(format!("domain: {e}")))?;
        let kind = BoundaryKind::parse(&p.boundary)
            .ok_or_else(|| CliError::usage(format!("unknown boundary kind {:?}", p.boundary)))?;
        let profile = match &p.profile {
            None => Profile::full_bump(n.horizon, 1.0),
            Some(ProfileSpec::PolynomialBump { center, width, amplitude }) => {
                Profile::PolynomialBump { center: *center, width: *width, amplitude: *amplitude }
            }
            Some(ProfileSpec::RaisedCosine { center, width, amplitude }) => {
                Profile::RaisedCosine { center: *center, width: *width, amplitude: *amplitude }
            }
            Some(ProfileSpec::Table { points }) => Profile::Table(points.iter().map(|q| (q[0], q[1])).collect()),
        };
        let method = EigenMethod::parse(&n.eigen_method)
            .ok_or_else(|| CliError::usage(format!("unknown eigen_method {:?}", n.eigen_method)))?;
        let contour_kind = ContourKind::parse(&n.contour)
            .ok_or_else(|| CliError::usage(format!("unknown contour {:?}", n.contour)))?;
        let route =
            ForcingRoute::parse(&n.route).ok_or_else(|| CliError::usage(format!("unknown route {:?}", n.route)))?;
        let generator = match self.data.generator.as_str() {
            "spectral" => Generator::Spectral,
            "timestep" => Generator::Timestep { refine: self.data.refine },
            other => return Err(CliError::usage(format!("unknown data.generator {other:?}"))),
        };
        if self.data.refine == 0 {
            return Err(CliError::usage("data.refine must be at least 1"));
        }
        Ok(ExperimentConfig {
            axes,
            potential: PotentialSpec {
                base: p.potential.base,
                slope_x: p.potential.slope_x,
                slope_y: p.potential.slope_y,
                bilinear: p.potential.bilinear,
            },
            kind,
            edges: p.edges.clone(),
            profile,
            horizon: n.horizon,
            steps: n.steps,
            modes: n.modes,
            method,
            contour: ContourSpec {
                kind: contour_kind,
                node_count: n.contour_nodes,
                scale: n.contour_scale,
                gamma: n.contour_gamma,
            },
            route,
            alpha_nodes: n.alpha_nodes,
            x0: p.x0.clone(),
            generator,
            noise: self.data.noise,
            seed: self.seed,
        })
    }

    pub fn inversion(&self) -> Result<InversionConfig, CliError> {
        let i = &self.invert;
        let config = InversionConfig {
            basis_node_count: i.basis_nodes,
            tikhonov_weight: i.tikhonov_weight,
            max_iterations: i.max_iterations,
            step_tolerance: i.step_tolerance,
            misfit_tolerance: i.misfit_tolerance,
            fd_step: i.fd_step,
            initial: i.initial.as_ref().map(|m| self.mu(m)).transpose()?,
        };
        config.validate().map_err(|e| CliError::usage(format!("invert: {e}")))?;
        Ok(config)
    }
}

/// `observation.csv` → `observation.csv.sidecar`.
pub fn sidecar_path(record: &Path) -> PathBuf {
    let mut s = record.as_os_str().to_owned();
    s.push(".sidecar");
    PathBuf::from(s)
}
