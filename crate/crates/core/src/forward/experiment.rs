//! A complete forward experiment: domain, potential, boundary data, grids
//! and numerics, serializable as `key=value` lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::boundary::{BoundaryData, Profile};
use super::field::Field;
use super::observe::{observe, ObservationRecord};
use super::solve::{default_modes, BoundaryForcing, ForcingRoute, SolverOptions};
use super::timestep::timestep_oracle;
use crate::error::{contract, Error, Result};
use crate::frac::{TimeGrid, TimeSeries, WeightFunction, DEFAULT_ALPHA_NODES};
use crate::laplace::{ContourKind, ContourSpec};
use crate::spectral::{eigensystem, Axis, BoundaryKind, EigenMethod, EigenSystem, Potential, SpatialGrid};

/// `p(x, y) = base + slope_x·x + slope_y·y + bilinear·x·y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub base: f64,
    pub slope_x: f64,
    pub slope_y: f64,
    pub bilinear: f64,
}

impl PotentialSpec {
    pub fn constant(c: f64) -> Self {
        Self { base: c, slope_x: 0.0, slope_y: 0.0, bilinear: 0.0 }
    }

    /// Samples the potential; certified when its minimum is positive.
    pub fn build(&self, grid: &SpatialGrid) -> Result<Potential> {
        let p = Potential::from_fn(grid, |x, y| {
            self.base + self.slope_x * x + self.slope_y * y + self.bilinear * x * y
        })?;
        if p.min() > 0.0 {
            p.certified()
        } else {
            Ok(p)
        }
    }
}

/// Which discretization generates synthetic observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Spectral,
    /// The time-stepper on a grid refined `refine` times in space and time.
    Timestep { refine: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub axes: Vec<Axis>,
    pub potential: PotentialSpec,
    pub kind: BoundaryKind,
    /// Edge amplitudes (1-D: left, right; 2-D: left, right, bottom, top).
    pub edges: Vec<f64>,
    pub profile: Profile,
    pub horizon: f64,
    pub steps: usize,
    /// Mode count; 0 selects the default truncation.
    pub modes: usize,
    pub method: EigenMethod,
    pub contour: ContourSpec,
    pub route: ForcingRoute,
    pub alpha_nodes: usize,
    pub x0: Vec<f64>,
    pub generator: Generator,
    /// Relative pointwise noise level of synthetic observations.
    pub noise: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Unit interval, Dirichlet, bump data on the left edge, observed at 0.5.
    pub fn interval_default() -> Self {
        Self {
            axes: vec![Axis::new(0.0, 1.0, 31).unwrap()],
            potential: PotentialSpec::constant(0.0),
            kind: BoundaryKind::Dirichlet,
            edges: vec![1.0, 0.0],
            profile: Profile::full_bump(1.0, 1.0),
            horizon: 1.0,
            steps: 200,
            modes: 0,
            method: EigenMethod::FiniteDifference,
            contour: ContourSpec::default(),
            route: ForcingRoute::Folded,
            alpha_nodes: DEFAULT_ALPHA_NODES,
            x0: vec![0.5],
            generator: Generator::Spectral,
            noise: 0.0,
            seed: 0,
        }
    }

    pub fn build(&self) -> Result<Experiment> {
        let space = SpatialGrid::from_axes(self.axes.clone())?;
        let potential = self.potential.build(&space)?;
        if self.kind == BoundaryKind::Neumann && potential.c0().is_none() {
            return Err(contract("the Neumann problem needs p >= c0 > 0"));
        }
        let time = TimeGrid::uniform(self.horizon, self.steps)?;
        let boundary = BoundaryData::edges(&space, &time, &self.edges, self.profile.clone())?;
        let node = space
            .node_at(&self.x0)
            .ok_or_else(|| contract(format!("observation point {:?} is not a grid node", self.x0)))?;
        if self.kind == BoundaryKind::Dirichlet && space.is_boundary(node) {
            return Err(contract("Dirichlet observations need an interior point"));
        }
        if !(self.noise >= 0.0) {
            return Err(contract("noise level must be nonnegative"));
        }
        self.contour.validate()?;
        Ok(Experiment { config: self.clone(), space, potential, time, boundary, node })
    }

    /// The same experiment on a grid refined `factor` times in space and time.
    pub fn refined(&self, factor: usize) -> Self {
        let mut out = self.clone();
        out.axes = self
            .axes
            .iter()
            .map(|a| Axis { lo: a.lo, hi: a.hi, interior: (a.interior + 1) * factor - 1 })
            .collect();
        out.steps = self.steps * factor;
        out
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut m: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| m.push((k.to_string(), v));
        put("dimension", self.axes.len().to_string());
        for (i, a) in self.axes.iter().enumerate() {
            let name = ["x", "y"][i];
            put(&format!("{name}_lo"), a.lo.to_string());
            put(&format!("{name}_hi"), a.hi.to_string());
            put(&format!("{name}_interior"), a.interior.to_string());
        }
        put("p_base", self.potential.base.to_string());
        put("p_slope_x", self.potential.slope_x.to_string());
        put("p_slope_y", self.potential.slope_y.to_string());
        put("p_bilinear", self.potential.bilinear.to_string());
        put("boundary", self.kind.name().to_string());
        put("edges", join(&self.edges));
        match &self.profile {
            Profile::PolynomialBump { center, width, amplitude } => {
                put("profile", "polynomial-bump".into());
                put("profile_center", center.to_string());
                put("profile_width", width.to_string());
                put("profile_amplitude", amplitude.to_string());
            }
            Profile::RaisedCosine { center, width, amplitude } => {
                put("profile", "raised-cosine".into());
                put("profile_center", center.to_string());
                put("profile_width", width.to_string());
                put("profile_amplitude", amplitude.to_string());
            }
            Profile::Table(points) => {
                put("profile", "table".into());
                let body: Vec<String> = points.iter().map(|(t, v)| format!("{t}:{v}")).collect();
                put("profile_points", body.join(","));
            }
        }
        put("horizon", self.horizon.to_string());
        put("steps", self.steps.to_string());
        put("modes", self.modes.to_string());
        put("eigen_method", self.method.name().to_string());
        put("contour", self.contour.kind.name().to_string());
        put("contour_nodes", self.contour.node_count.to_string());
        put("contour_scale", self.contour.scale.to_string());
        put("contour_gamma", self.contour.gamma.map_or("auto".into(), |g| g.to_string()));
        put("route", self.route.name().to_string());
        put("alpha_nodes", self.alpha_nodes.to_string());
        put("x0", join(&self.x0));
        match self.generator {
            Generator::Spectral => put("generator", "spectral".into()),
            Generator::Timestep { refine } => put("generator", format!("timestep:{refine}")),
        }
        put("noise", self.noise.to_string());
        put("seed", self.seed.to_string());
        m
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// Reads the keys written by [`Self::to_pairs`]; keys are consumed from
    /// `map`, so leftovers can be reported by the caller.
    pub fn from_map(map: &mut BTreeMap<String, String>) -> Result<Self> {
        let mut take = |k: &str| map.remove(k).ok_or_else(|| parse_err(format!("missing key {k}")));
        let dimension: usize = num(&take("dimension")?)?;
        if !(1..=2).contains(&dimension) {
            return Err(parse_err(format!("dimension must be 1 or 2, got {dimension}")));
        }
        let mut axes = Vec::new();
        for name in ["x", "y"].iter().take(dimension) {
            axes.push(Axis::new(
                num(&take(&format!("{name}_lo"))?)?,
                num(&take(&format!("{name}_hi"))?)?,
                num(&take(&format!("{name}_interior"))?)?,
            )?);
        }
        let potential = PotentialSpec {
            base: num(&take("p_base")?)?,
            slope_x: num(&take("p_slope_x")?)?,
            slope_y: num(&take("p_slope_y")?)?,
            bilinear: num(&take("p_bilinear")?)?,
        };
        let kind_s = take("boundary")?;
        let kind = BoundaryKind::parse(&kind_s).ok_or_else(|| parse_err(format!("unknown boundary kind {kind_s}")))?;
        let edges = list(&take("edges")?)?;
        let profile_kind = take("profile")?;
        let profile = match profile_kind.as_str() {
            "polynomial-bump" | "raised-cosine" => {
                let center = num(&take("profile_center")?)?;
                let width = num(&take("profile_width")?)?;
                let amplitude = num(&take("profile_amplitude")?)?;
                if profile_kind == "polynomial-bump" {
                    Profile::PolynomialBump { center, width, amplitude }
                } else {
                    Profile::RaisedCosine { center, width, amplitude }
                }
            }
            "table" => Profile::Table(table_points(&take("profile_points")?)?),
            other => return Err(parse_err(format!("unknown profile {other}"))),
        };
        let horizon = num(&take("horizon")?)?;
        let steps = num(&take("steps")?)?;
        let modes = num(&take("modes")?)?;
        let method_s = take("eigen_method")?;
        let method = EigenMethod::parse(&method_s).ok_or_else(|| parse_err(format!("unknown eigen method {method_s}")))?;
        let contour_s = take("contour")?;
        let contour_kind = ContourKind::parse(&contour_s).ok_or_else(|| parse_err(format!("unknown contour {contour_s}")))?;
        let node_count = num(&take("contour_nodes")?)?;
        let scale = num(&take("contour_scale")?)?;
        let gamma_s = take("contour_gamma")?;
        let gamma = if gamma_s == "auto" { None } else { Some(num(&gamma_s)?) };
        let contour = ContourSpec { kind: contour_kind, node_count, scale, gamma };
        let route_s = take("route")?;
        let route = ForcingRoute::parse(&route_s).ok_or_else(|| parse_err(format!("unknown route {route_s}")))?;
        let alpha_nodes = num(&take("alpha_nodes")?)?;
        let x0 = list(&take("x0")?)?;
        let gen_s = take("generator")?;
        let generator = match gen_s.split_once(':') {
            None if gen_s == "spectral" => Generator::Spectral,
            Some(("timestep", r)) => Generator::Timestep { refine: num(r)? },
            _ => return Err(parse_err(format!("unknown generator {gen_s}"))),
        };
        let noise = num(&take("noise")?)?;
        let seed = num(&take("seed")?)?;
        Ok(Self {
            axes,
            potential,
            kind,
            edges,
            profile,
            horizon,
            steps,
            modes,
            method,
            contour,
            route,
            alpha_nodes,
            x0,
            generator,
            noise,
            seed,
        })
    }
}

fn parse_err(message: String) -> Error {
    Error::Parse { line: 0, message }
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse::<T>().map_err(|e| parse_err(format!("bad value {s:?}: {e}")))
}

fn list(s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(num).collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub fn table_points(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|p| {
            let (t, v) = p.split_once(':').ok_or_else(|| parse_err(format!("table point {p:?} is not t:v")))?;
            Ok((num(t)?, num(v)?))
        })
        .collect()
}

/// A built experiment: grids, potential, boundary data and observation node.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub space: SpatialGrid,
    pub potential: Potential,
    pub time: TimeGrid,
    pub boundary: BoundaryData,
    pub node: usize,
}

impl Experiment {
    pub fn mode_count(&self) -> usize {
        let unknowns = match self.config.kind {
            BoundaryKind::Dirichlet => self.space.interior_nodes().len(),
            BoundaryKind::Neumann => self.space.node_count(),
        };
        let wanted = if self.config.modes == 0 { default_modes(self.space.dimension()) } else { self.config.modes };
        wanted.min(unknowns)
    }

    pub fn eigensystem(&self) -> Result<EigenSystem> {
        eigensystem(&self.space, &self.potential, self.config.kind, self.mode_count(), self.config.method)
    }

    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            modes: None,
            contour: self.config.contour.clone(),
            route: self.config.route,
            alpha_nodes: self.config.alpha_nodes,
        }
    }

    pub fn forcing(&self) -> Result<BoundaryForcing> {
        BoundaryForcing::new(&self.eigensystem()?, &self.boundary)
    }

    /// Spectral solution for `mu`.
    pub fn solve(&self, mu: &WeightFunction) -> Result<Field> {
        self.forcing()?.solve(mu, &self.options())
    }

    /// Time-stepping solution for `mu` on this experiment's grids.
    pub fn oracle(&self, mu: &WeightFunction) -> Result<Field> {
        timestep_oracle(mu, &self.potential, &self.boundary, &self.space, self.config.kind, self.config.alpha_nodes)
    }

    /// Clean observation at `x0` from the configured generator, sampled on
    /// this experiment's time grid.
    pub fn clean_series(&self, mu: &WeightFunction) -> Result<TimeSeries> {
        match self.config.generator {
            Generator::Spectral => self.forcing()?.observe(mu, self.node, &self.options()),
            Generator::Timestep { refine } => {
                let fine = self.config.refined(refine.max(1)).build()?;
                let field = fine.oracle(mu)?;
                let series = field.node_series(fine.node);
                let samples = self
                    .time
                    .values()
                    .iter()
                    .map(|&t| {
                        fine.time
                            .index_of(t)
                            .map(|j| series.samples[j])
                            .ok_or_else(|| contract("refined time grid misses a base time"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                TimeSeries::new(self.time.clone(), samples)
            }
        }
    }

    /// Synthetic observation record for `mu`, with seeded relative noise
    /// `u (1 + noise·ξ)`, `ξ ~ N(0, 1)`.
    pub fn record(&self, mu: &WeightFunction) -> Result<ObservationRecord> {
        let mut series = self.clean_series(mu)?;
        if self.config.noise > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
            for v in series.samples.iter_mut().skip(1) {
                let xi: f64 = StandardNormal.sample(&mut rng);
                *v *= 1.0 + self.config.noise * xi;
            }
        }
        Ok(ObservationRecord { x0: self.config.x0.clone(), series, experiment: self.config.clone(), mu: Some(mu.clone()) })
    }

    /// Record from a full field already computed on this experiment's grids.
    pub fn record_from_field(&self, field: &Field, mu: Option<&WeightFunction>) -> Result<ObservationRecord> {
        let mut rec = observe(field, &self.config.x0, &self.config)?;
        rec.mu = mu.cloned();
        Ok(rec)
    }
}
