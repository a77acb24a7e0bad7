//! Subcommand arguments and the runners behind them.

use std::f64::consts::{PI, TAU};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ptlattice::floquet::{quasi_energies, rwa_params};
use ptlattice::lattice::{critical_speed, dispersion, group_velocity, threshold_and_gap};
use ptlattice::output;
use ptlattice::propagator::{
    evolve_driven_with, evolve_static_with, fit_growth, gaussian_packet, sample_ray, Boundary, EvolveOptions,
};
use ptlattice::spectrum::{build_hamiltonian, spectrum, GainProfile};
use ptlattice::{classify, DriveParams64, LatticeParams64, Method};

use crate::config::Angle;
use crate::error::{CliError, CliResult};

fn req<T>(value: Option<T>, name: &'static str) -> CliResult<T> {
    value.ok_or(CliError::Missing(name))
}

/// Static lattice parameters.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct LatticeArgs {
    /// Intra-cell hopping
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Inter-cell hopping
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Next-nearest-neighbour hopping amplitude
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    /// Next-nearest-neighbour phase in radians (pi/2 style literals accepted)
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<Angle>,
    /// Gain/loss rate
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<f64>,
}

impl LatticeArgs {
    pub fn params(&self) -> CliResult<LatticeParams64> {
        Ok(LatticeParams64::new(
            req(self.kappa, "kappa")?,
            req(self.sigma, "sigma")?,
            req(self.rho, "rho")?,
            req(self.phi, "phi")?.0,
            req(self.g, "g")?,
        )?)
    }

    fn any_static(&self) -> bool {
        self.kappa.is_some() || self.sigma.is_some() || self.rho.is_some() || self.phi.is_some()
    }
}

/// Driven-lattice parameters. The gain/loss rate comes from `--g`.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct DriveArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub kappa1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa3: Option<f64>,
    /// Resonance order (dc force = m·omega)
    #[arg(long)]
    pub m: Option<u32>,
    /// Ac force amplitude
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Phase of the ac force in radians
    #[arg(long, allow_hyphen_values = true)]
    pub drive_phase: Option<Angle>,
    /// Modulation frequency
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
}

impl DriveArgs {
    pub fn params(&self, g: Option<f64>) -> CliResult<DriveParams64> {
        Ok(DriveParams64::new(
            req(self.kappa1, "kappa1")?,
            req(self.kappa2, "kappa2")?,
            req(self.kappa3, "kappa3")?,
            req(g, "g")?,
            req(self.m, "m")?,
            req(self.gamma, "gamma")?,
            req(self.drive_phase, "drive_phase")?.0,
            req(self.omega, "omega")?,
        )?)
    }

    fn any(&self) -> bool {
        self.kappa1.is_some()
            || self.kappa2.is_some()
            || self.kappa3.is_some()
            || self.m.is_some()
            || self.gamma.is_some()
            || self.drive_phase.is_some()
            || self.omega.is_some()
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct BandsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    /// Number of quasi-momenta on [0, 2π) [default: 512]
    #[arg(long)]
    pub nq: Option<usize>,
    /// Output directory [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Numeric,
    Asymptotic,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    /// Saddle-point criterion [default: numeric]
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct PropagateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    /// Driven-lattice mode: give these instead of kappa, sigma, rho and phi
    #[command(flatten)]
    #[serde(flatten)]
    pub drive: DriveArgs,
    /// Lattice size N (N + 1 cells, even) [default: 600]
    #[arg(long)]
    pub n: Option<usize>,
    /// Final time [default: 100]
    #[arg(long, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    /// Largest time step [default: 0.01, or period/200 when driven]
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    /// Gaussian packet width in cells [default: 10]
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<f64>,
    /// Carrier quasi-momentum [default: pi]
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<Angle>,
    /// [default: open]
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
    /// Steps between written snapshots [default: 50]
    #[arg(long)]
    pub stride: Option<usize>,
    /// Ray velocity to trace; repeatable [default: 0 and the group velocity]
    #[arg(long, allow_hyphen_values = true)]
    pub ray: Option<Vec<f64>>,
    /// Start of the growth-rate fit window [default: 40]
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    /// Output directory [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct FloquetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub drive: DriveArgs,
    /// Gain/loss rate
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<f64>,
    /// Number of quasi-momenta on [0, 2π) [default: 512]
    #[arg(long)]
    pub nq: Option<usize>,
    /// RK4 steps per drive period [default: 400]
    #[arg(long)]
    pub steps: Option<usize>,
    /// Output directory [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileArg {
    Square,
    Smooth,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    /// Lattice size N (N + 1 cells, even) [default: 300]
    #[arg(long)]
    pub n: Option<usize>,
    /// Width of the gain/loss section in cells [default: 20]
    #[arg(long)]
    pub n_g: Option<usize>,
    /// [default: square]
    #[arg(long, value_enum)]
    pub profile: Option<ProfileArg>,
    /// Ramp length in cells for the smooth profile [default: 5]
    #[arg(long, allow_hyphen_values = true)]
    pub ramp: Option<f64>,
    /// Output directory [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

pub fn out_dir(dir: &Option<PathBuf>) -> CliResult<PathBuf> {
    let dir = dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    Ok(dir)
}

/// Name of an output file relative to its directory, so that reports do not
/// depend on where they were written.
fn rel(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Runs `body` against a buffered file and maps I/O failures to the path.
pub fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    body(&mut out).map_err(io)?;
    out.flush().map_err(io)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_file(path, |out| writeln!(out, "{text}"))
}

pub fn q_grid(nq: usize) -> CliResult<Vec<f64>> {
    if nq < 2 {
        return Err(CliError::Usage(format!("--nq must be at least 2, got {nq}")));
    }
    Ok((0..nq).map(|k| TAU * k as f64 / nq as f64).collect())
}

fn lattice_summary(params: &LatticeParams64) -> Value {
    let (g_th, gap) = threshold_and_gap(params);
    json!({
        "kappa": params.kappa(),
        "sigma": params.sigma(),
        "rho": params.rho(),
        "phi": params.phi(),
        "g": params.g(),
        "g_th": g_th,
        "gap_at_pi": gap,
        "epsilon": params.epsilon(),
        "v_g": group_velocity(params),
        "critical_speed": critical_speed(params),
    })
}

/// Writes `bands.csv` for `params` on an `nq`-point grid.
pub fn run_bands(params: &LatticeParams64, nq: usize, dir: &Path) -> CliResult<Value> {
    let q = q_grid(nq)?;
    let (plus, minus): (Vec<_>, Vec<_>) = q.iter().map(|&q| dispersion(params, q)).unzip();
    let path = dir.join("bands.csv");
    write_file(&path, |out| output::write_bands(out, &q, &plus, &minus))?;
    let max_imag = plus.iter().chain(&minus).map(|e| e.im.abs()).fold(0.0, f64::max);
    Ok(json!({ "file": rel(&path), "nq": nq, "max_abs_imag": max_imag, "lattice": lattice_summary(params) }))
}

pub fn bands(args: BandsArgs) -> CliResult<Value> {
    let dir = out_dir(&args.out_dir)?;
    run_bands(&args.lattice.params()?, args.nq.unwrap_or(512), &dir)
}

pub fn classify_cmd(args: ClassifyArgs) -> CliResult<Value> {
    let method = match args.method.unwrap_or(MethodArg::Numeric) {
        MethodArg::Numeric => Method::Numeric,
        MethodArg::Asymptotic => Method::Asymptotic,
    };
    Ok(serde_json::to_value(classify(&args.lattice.params()?, method)?)?)
}

/// Static or driven lattice, as selected on the command line.
pub enum Model {
    Static(LatticeParams64),
    Driven(DriveParams64),
}

pub struct PropagationPlan {
    pub model: Model,
    pub n: usize,
    pub t_end: f64,
    pub dt: f64,
    pub w: f64,
    pub q0: f64,
    pub boundary: Boundary,
    pub stride: usize,
    pub rays: Vec<f64>,
    pub t_min: f64,
}

/// Writes `snapshots.csv`, one `ray_<k>.csv` per traced velocity and
/// `summary.json`.
pub fn run_propagation(plan: &PropagationPlan, dir: &Path) -> CliResult<Value> {
    let field = gaussian_packet(plan.n, plan.w, plan.q0)?;
    let opts = EvolveOptions { dt: plan.dt, boundary: plan.boundary, snapshot_stride: plan.stride };
    let run = match &plan.model {
        Model::Static(p) => evolve_static_with(p, &field, plan.t_end, &opts)?,
        Model::Driven(d) => evolve_driven_with(d, &field, plan.t_end, &opts)?,
    };
    let snapshots = dir.join("snapshots.csv");
    write_file(&snapshots, |out| output::write_fields(out, &run.snapshots))?;
    let mut rays = Vec::new();
    for (k, &v) in plan.rays.iter().enumerate() {
        let trace = sample_ray(&run.snapshots, v);
        let path = dir.join(format!("ray_{k}.csv"));
        write_file(&path, |out| output::write_intensity(out, &trace))?;
        let ratio = match (trace.intensities.first(), trace.intensities.last()) {
            (Some(first), Some(last)) if *first > 0.0 => Some(last / first),
            _ => None,
        };
        rays.push(json!({
            "v": v,
            "file": rel(&path),
            "clamped": trace.clamped,
            "final_over_initial": ratio,
            "growth_rate": fit_growth(&trace, plan.t_min).ok(),
        }));
    }
    let model = match &plan.model {
        Model::Static(p) => json!({ "static": lattice_summary(p) }),
        Model::Driven(d) => json!({ "driven": d, "period": d.period() }),
    };
    let summary = json!({
        "model": model,
        "n": plan.n,
        "t_end": plan.t_end,
        "dt": run.dt,
        "steps": run.steps,
        "boundary_warning": run.boundary_warning,
        "snapshots": rel(&snapshots),
        "rays": rays,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

pub fn propagate(args: PropagateArgs) -> CliResult<Value> {
    let driven = args.drive.any();
    if driven && args.lattice.any_static() {
        return Err(CliError::Usage(
            "give either static (kappa, sigma, rho, phi) or driven (kappa1, ..., omega) parameters, not both".into(),
        ));
    }
    let (model, dt, v_g) = if driven {
        let d = args.drive.params(args.lattice.g)?;
        let v_g = group_velocity(&rwa_params(&d)?);
        (Model::Driven(d), args.dt.unwrap_or(d.period() / 200.0), v_g)
    } else {
        let p = args.lattice.params()?;
        (Model::Static(p), args.dt.unwrap_or(0.01), group_velocity(&p))
    };
    let plan = PropagationPlan {
        model,
        n: args.n.unwrap_or(600),
        t_end: args.t_end.unwrap_or(100.0),
        dt,
        w: args.w.unwrap_or(10.0),
        q0: args.q0.map_or(PI, |a| a.0),
        boundary: match args.boundary.unwrap_or(BoundaryArg::Open) {
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Periodic => Boundary::Periodic,
        },
        stride: args.stride.unwrap_or(50),
        rays: args.ray.unwrap_or_else(|| vec![0.0, v_g]),
        t_min: args.t_min.unwrap_or(40.0),
    };
    run_propagation(&plan, &out_dir(&args.out_dir)?)
}

/// Writes `quasi_energies.csv`, the averaged-lattice `rwa_params.json` and
/// its `rwa_bands.csv`.
pub fn run_floquet(drive: &DriveParams64, nq: usize, steps: usize, dir: &Path) -> CliResult<Value> {
    let q = q_grid(nq)?;
    let band = quasi_energies(drive, &q, steps)?;
    let path = dir.join("quasi_energies.csv");
    write_file(&path, |out| output::write_quasi_energies(out, &band))?;
    let averaged = rwa_params(drive)?;
    let rwa = lattice_summary(&averaged);
    write_json(&dir.join("rwa_params.json"), &rwa)?;
    let (plus, minus): (Vec<_>, Vec<_>) = q.iter().map(|&q| dispersion(&averaged, q)).unzip();
    write_file(&dir.join("rwa_bands.csv"), |out| output::write_bands(out, &q, &plus, &minus))?;
    Ok(json!({
        "file": rel(&path),
        "omega": drive.omega(),
        "nq": nq,
        "steps": steps,
        "max_abs_imag": band.max_abs_imag(),
        "max_deviation_from_rwa": band.max_deviation(&averaged),
        "pairing_defect": band.pairing_defect(),
        "degenerate_points": band.degenerate.len(),
        "rwa_params": rwa,
    }))
}

pub fn floquet(args: FloquetArgs) -> CliResult<Value> {
    let drive = args.drive.params(args.g)?;
    run_floquet(&drive, args.nq.unwrap_or(512), args.steps.unwrap_or(400), &out_dir(&args.out_dir)?)
}

/// Writes `spectrum.csv` and `metrics.json` for the truncated lattice.
pub fn run_spectrum(params: &LatticeParams64, n: usize, profile: &GainProfile<f64>, dir: &Path) -> CliResult<Value> {
    let s = spectrum(&build_hamiltonian(params, n, profile)?)?;
    let path = dir.join("spectrum.csv");
    write_file(&path, |out| output::write_spectrum(out, &s))?;
    let metrics = json!({
        "file": rel(&path),
        "n": n,
        "dimension": s.eigenvalues.len(),
        "profile": profile.kind(),
        "max_abs_imag": s.max_abs_imag,
        "max_residual": s.max_residual,
        "matrix_norm": s.matrix_norm,
        "pairing_defect": s.pairing_defect,
        "lattice": lattice_summary(params),
    });
    write_json(&dir.join("metrics.json"), &metrics)?;
    Ok(metrics)
}

pub fn spectrum_cmd(args: SpectrumArgs) -> CliResult<Value> {
    let params = args.lattice.params()?;
    let (n, n_g) = (args.n.unwrap_or(300), args.n_g.unwrap_or(20));
    let profile = match args.profile.unwrap_or(ProfileArg::Square) {
        ProfileArg::Square => GainProfile::square(n, n_g, params.g())?,
        ProfileArg::Smooth => GainProfile::smooth(n, n_g, params.g(), args.ramp.unwrap_or(5.0))?,
    };
    run_spectrum(&params, n, &profile, &out_dir(&args.out_dir)?)
}
