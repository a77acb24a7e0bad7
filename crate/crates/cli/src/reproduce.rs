//! Pinned parameter sets for the reference figures.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ptlattice::floquet::rwa_params;
use ptlattice::lattice::group_velocity;
use ptlattice::propagator::Boundary;
use ptlattice::spectrum::GainProfile;
use ptlattice::{classify, DriveParams64, LatticeParams64, Method};

use crate::commands::{out_dir, run_bands, run_floquet, run_propagation, run_spectrum, Model, PropagationPlan};
use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ReproduceArgs {
    pub figure: Figure,
    /// Panel letter; all panels when omitted
    #[arg(long)]
    pub variant: Option<char>,
    /// Output directory; each panel writes to its own subdirectory [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Lattice size override (fig4, fig6, fig7)
    #[arg(long)]
    pub n: Option<usize>,
    /// Gain-section width override (fig7)
    #[arg(long)]
    pub n_g: Option<usize>,
    /// Final time override (fig4, fig6)
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Time step override (fig4, fig6)
    #[arg(long)]
    pub dt: Option<f64>,
    /// Packet width override (fig4, fig6)
    #[arg(long)]
    pub w: Option<f64>,
    /// Snapshot stride override (fig4, fig6)
    #[arg(long)]
    pub stride: Option<usize>,
    /// Quasi-momentum grid override (fig2, fig5)
    #[arg(long)]
    pub nq: Option<usize>,
    /// Steps per drive period override (fig5)
    #[arg(long)]
    pub steps: Option<usize>,
}

impl Figure {
    fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }
}

impl ReproduceArgs {
    /// Rejects overrides that the chosen figure does not use.
    fn check_overrides(&self) -> CliResult<()> {
        let given = [
            ("n", self.n.is_some()),
            ("n_g", self.n_g.is_some()),
            ("t_end", self.t_end.is_some()),
            ("dt", self.dt.is_some()),
            ("w", self.w.is_some()),
            ("stride", self.stride.is_some()),
            ("nq", self.nq.is_some()),
            ("steps", self.steps.is_some()),
        ];
        let allowed: &[&str] = match self.figure {
            Figure::Fig2 => &["nq"],
            Figure::Fig4 | Figure::Fig6 => &["n", "t_end", "dt", "w", "stride"],
            Figure::Fig5 => &["nq", "steps"],
            Figure::Fig7 => &["n", "n_g"],
        };
        match given.iter().find(|(name, set)| *set && !allowed.contains(name)) {
            Some((name, _)) => Err(CliError::Usage(format!(
                "--{} does not apply to {}; accepted overrides: {}",
                name.replace('_', "-"),
                self.figure.name(),
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }
}

fn lattice(kappa: f64, sigma: f64, rho: f64, phi: f64, g: f64) -> CliResult<LatticeParams64> {
    Ok(LatticeParams64::new(kappa, sigma, rho, phi, g)?)
}

fn fig5_drive(kappa3: f64, omega: f64) -> CliResult<DriveParams64> {
    Ok(DriveParams64::new(2.1124, 2.1124, kappa3, 0.05, 1, 1.109, -FRAC_PI_4, omega)?)
}

fn panels(figure: Figure) -> &'static [char] {
    match figure {
        Figure::Fig2 => &['a', 'b', 'c'],
        Figure::Fig5 => &['a', 'b', 'c', 'd'],
        Figure::Fig4 | Figure::Fig6 | Figure::Fig7 => &['a', 'b'],
    }
}

fn run_panel(args: &ReproduceArgs, panel: char, dir: &Path) -> CliResult<Value> {
    let summary = match args.figure {
        Figure::Fig2 => {
            let g = [0.0, 0.2, 0.6][(panel as u8 - b'a') as usize];
            run_bands(&lattice(1.0, 0.8, 0.6, FRAC_PI_2, g)?, args.nq.unwrap_or(512), dir)?
        }
        Figure::Fig4 => {
            let (rho, n, t_end) = if panel == 'a' { (0.7, 600, 100.0) } else { (0.3, 1100, 200.0) };
            let params = lattice(1.0, 1.0, rho, FRAC_PI_2, 0.05)?;
            let plan = PropagationPlan {
                model: Model::Static(params),
                n: args.n.unwrap_or(n),
                t_end: args.t_end.unwrap_or(t_end),
                dt: args.dt.unwrap_or(0.01),
                w: args.w.unwrap_or(10.0),
                q0: PI,
                boundary: Boundary::Open,
                stride: args.stride.unwrap_or(100),
                rays: vec![0.0, group_velocity(&params)],
                t_min: 40.0,
            };
            let regime = classify(&params, Method::Numeric)?.regime;
            let mut s = run_propagation(&plan, dir)?;
            s["regime"] = serde_json::to_value(regime)?;
            s
        }
        Figure::Fig5 => {
            if panel == 'd' {
                run_bands(&rwa_params(&fig5_drive(1.4784, 15.0)?)?, args.nq.unwrap_or(512), dir)?
            } else {
                let omega = [6.0, 15.0, 150.0][(panel as u8 - b'a') as usize];
                run_floquet(&fig5_drive(1.4784, omega)?, args.nq.unwrap_or(512), args.steps.unwrap_or(400), dir)?
            }
        }
        Figure::Fig6 => {
            let drive = fig5_drive(if panel == 'a' { 1.4784 } else { 0.6336 }, 15.0)?;
            let plan = PropagationPlan {
                model: Model::Driven(drive),
                n: args.n.unwrap_or(600),
                t_end: args.t_end.unwrap_or(100.0),
                dt: args.dt.unwrap_or(drive.period() / 200.0),
                w: args.w.unwrap_or(10.0),
                q0: PI,
                boundary: Boundary::Open,
                stride: args.stride.unwrap_or(1000),
                rays: vec![0.0, group_velocity(&rwa_params(&drive)?)],
                t_min: 40.0,
            };
            run_propagation(&plan, dir)?
        }
        Figure::Fig7 => {
            let params = lattice(1.0, 1.0, if panel == 'a' { 0.0 } else { 2.0 }, FRAC_PI_2, 0.5)?;
            let n = args.n.unwrap_or(300);
            run_spectrum(&params, n, &GainProfile::square(n, args.n_g.unwrap_or(20), 0.5)?, dir)?
        }
    };
    Ok(summary)
}

/// Runs the requested panels in parallel and returns their summaries in
/// panel order.
pub fn reproduce(args: ReproduceArgs) -> CliResult<Vec<Value>> {
    args.check_overrides()?;
    let all = panels(args.figure);
    let chosen: Vec<char> = match args.variant {
        None => all.to_vec(),
        Some(v) if all.contains(&v.to_ascii_lowercase()) => vec![v.to_ascii_lowercase()],
        Some(v) => {
            let names: Vec<String> = all.iter().map(char::to_string).collect();
            return Err(CliError::Usage(format!(
                "--variant {v} is not a panel of {}; expected one of {}",
                args.figure.name(),
                names.join(", ")
            )));
        }
    };
    let root = out_dir(&args.out_dir)?;
    let name = args.figure.name();
    chosen
        .par_iter()
        .map(|&panel| {
            let dir = out_dir(&Some(root.join(format!("{name}{panel}"))))?;
            let summary = run_panel(&args, panel, &dir)?;
            Ok(json!({ "figure": name, "variant": panel.to_string(), "summary": summary }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(figure: Figure) -> ReproduceArgs {
        ReproduceArgs {
            figure,
            variant: None,
            out_dir: None,
            n: None,
            n_g: None,
            t_end: None,
            dt: None,
            w: None,
            stride: None,
            nq: None,
            steps: None,
        }
    }

    #[test]
    fn overrides_are_checked_per_figure() {
        let mut a = args(Figure::Fig7);
        a.n_g = Some(10);
        assert!(a.check_overrides().is_ok());
        a.t_end = Some(5.0);
        assert!(a.check_overrides().is_err());
    }

    #[test]
    fn figure_names_match_their_cli_spelling() {
        for f in Figure::value_variants() {
            assert_eq!(f.to_possible_value().unwrap().get_name(), f.name());
        }
    }
}
