//! Verification suites: each returns one row per check.

use super::faber_krahn::faber_krahn_refinement;
use super::probes::{ahlfors_probe, boundary_points, density_probe};
use crate::eigen::{analytic_lambda_ball, auto_box, ball_eigenvalue, check_scaling};
use crate::energy::{competitor_cap, competitor_remove_ball, competitor_truncate, total_energy};
use crate::energy::{CompetitorOutcome, PartitionState};
use crate::error::{Error, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    FaberKrahn,
    Scaling,
    Probes,
    Competitors,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::FaberKrahn,
        Suite::Scaling,
        Suite::Probes,
        Suite::Competitors,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::FaberKrahn => "faber-krahn",
            Suite::Scaling => "scaling",
            Suite::Probes => "probes",
            Suite::Competitors => "competitors",
        }
    }

    /// Whether the suite inspects a partition state.
    pub fn needs_state(self) -> bool {
        matches!(self, Suite::Probes | Suite::Competitors)
    }
}

/// Parses a suite name; `all` expands to every suite.
pub fn parse_suites(name: &str) -> Result<Vec<Suite>> {
    if name == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    Suite::from_str(name).map(|s| vec![s])
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| crate::error::invalid("suite", format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: Suite, name: impl Into<String>, value: f64, threshold: f64, pass: bool) -> Self {
        Check {
            suite: suite.name().into(),
            name: name.into(),
            value,
            threshold,
            pass,
            detail: String::new(),
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }
}

/// Disk-versus-square gaps at `β ∈ {0.1, 1, 10}` and area `0.16π` on two
/// resolutions, and the small-β agreement of the digital disk with the
/// exact disk.
pub fn faber_krahn_suite(coarse_h: f64, fine_h: f64) -> Result<Vec<Check>> {
    let area = 0.16 * PI;
    let mut out = Vec::new();
    for beta in [0.1, 1.0, 10.0] {
        let r = faber_krahn_refinement(beta, area, coarse_h, fine_h)?;
        out.push(
            Check::new(Suite::FaberKrahn, format!("gap_beta_{beta}"), r.fine.gap, 2.0 * r.change, r.pass)
                .detail(format!(
                    "disk={:.10} square={:.10} change={:.3e}",
                    r.fine.lambda_disk, r.fine.lambda_square, r.change
                )),
        );
    }
    let small = super::faber_krahn::faber_krahn_gap(1e-4, area, fine_h)?;
    let rel = (small.lambda_disk / small.lambda_analytic - 1.0).abs();
    out.push(
        Check::new(Suite::FaberKrahn, "small_beta_disk_vs_exact", rel, 0.03, rel <= 0.03)
            .detail(format!("disk={:.6e} exact={:.6e}", small.lambda_disk, small.lambda_analytic)),
    );
    Ok(out)
}

/// The ball scaling identity at `r = 0.5` on `h ∈ {1/64, 1/128}` and the
/// small-radius asymptotics `λ r / β ≈ d` at `βr = 0.05`.
pub fn scaling_suite(beta: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let report = check_scaling(0.5, beta, &[1.0 / 64.0, 1.0 / 128.0])?;
    let last = report.rows.last().expect("two resolutions");
    out.push(
        Check::new(
            Suite::Scaling,
            "ball_scaling_identity",
            last.mismatch,
            2.0 * last.discretization_error.unwrap_or(f64::NAN),
            report.pass,
        )
        .detail(
            report
                .rows
                .iter()
                .map(|r| format!("h={} mismatch={:.3e}", r.h, r.mismatch))
                .collect::<Vec<_>>()
                .join("; "),
        ),
    );
    let r = 0.05 / beta;
    for d in [1usize, 2] {
        let exact = analytic_lambda_ball(d, r, beta)?;
        let v = exact * r / beta;
        let ok = (0.9 * d as f64..=1.1 * d as f64).contains(&v);
        out.push(Check::new(Suite::Scaling, format!("small_radius_d{d}_exact"), v, d as f64, ok));
    }
    let h = r / 32.0;
    let discrete = ball_eigenvalue(2, r, beta, h, auto_box(r, h))?.lambda;
    let exact = analytic_lambda_ball(2, r, beta)?;
    let rel = (discrete / exact - 1.0).abs();
    out.push(Check::new(Suite::Scaling, "small_radius_d2_discrete", rel, 0.1, rel <= 0.1));
    Ok(out)
}

/// Density and Ahlfors probes of every phase at `ρ ∈ {4h, 8h, 16h}`.
pub fn probe_suite(state: &PartitionState, seed: u64) -> Result<Vec<Check>> {
    let h = state.grid().h();
    let radii = [4.0 * h, 8.0 * h, 16.0 * h];
    let mut out = Vec::new();
    for (i, phase) in state.phases().iter().enumerate() {
        let support = phase.support();
        let points = boundary_points(support, 32, seed.wrapping_add(i as u64));
        let d = density_probe(support, &points, &radii)?;
        out.push(
            Check::new(Suite::Probes, format!("density_phase_{i}"), d.observed, d.threshold, d.pass)
                .detail(format!("min_per_radius={:?}", d.min)),
        );
        let a = ahlfors_probe(support, &radii)?;
        out.push(
            Check::new(Suite::Probes, format!("ahlfors_phase_{i}"), a.observed, a.threshold, a.pass)
                .detail(format!("min_per_radius={:?} max_per_radius={:?}", a.min, a.max)),
        );
    }
    Ok(out)
}

/// Competitors of every phase against the state's energy `E*`: truncation
/// below half the smallest value, caps at half the maximum and at the
/// maximum, and holes of radius `4h` and `8h` at five sampled support
/// points. Each must leave the total energy at least `E* − 1e−6 E*`.
pub fn competitor_suite(state: &PartitionState, seed: u64) -> Result<Vec<Check>> {
    let base = total_energy(state)?.total;
    let floor = base - 1e-6 * base;
    let h = state.grid().h();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let judge = |name: String, outcome: CompetitorOutcome, i: usize| -> Result<Check> {
        match outcome {
            CompetitorOutcome::EmptyResult => Ok(Check::new(Suite::Competitors, name, f64::NAN, floor, true)
                .detail("competitor removes the whole phase")),
            CompetitorOutcome::Field(f) => {
                let e = total_energy(&state.with_phase(i, f)?)?.total;
                Ok(Check::new(Suite::Competitors, name, e, floor, e >= floor))
            }
        }
    };
    for (i, u) in state.phases().iter().enumerate() {
        let alpha = u.min();
        out.push(judge(
            format!("truncate_phase_{i}"),
            competitor_truncate(u, 0.5 * alpha)?,
            i,
        )?);
        out.push(judge(
            format!("cap_half_phase_{i}"),
            CompetitorOutcome::Field(competitor_cap(u, 0.5 * u.max())?),
            i,
        )?);
        let same = competitor_cap(u, u.max())?;
        let unchanged = &same == u;
        let e = total_energy(&state.with_phase(i, same)?)?.total;
        out.push(
            Check::new(
                Suite::Competitors,
                format!("cap_identity_phase_{i}"),
                e,
                floor,
                unchanged && e >= floor,
            )
            .detail(if unchanged { "cap at max u is the identity" } else { "cap at max u changed the field" }),
        );
        let cells = u.support().cells();
        let picks = sample(&mut rng, cells.len(), 5.min(cells.len())).into_vec();
        for rho_cells in [4.0, 8.0] {
            for &p in &picks {
                let x = state.grid().center(cells[p]);
                out.push(judge(
                    format!("remove_ball_phase_{i}_rho_{rho_cells}h_cell_{}", cells[p]),
                    competitor_remove_ball(u, &x, rho_cells * h)?,
                    i,
                )?);
            }
        }
    }
    Ok(out)
}

/// Runs the selected suites; state-based suites need `state`.
pub fn run_suites(suites: &[Suite], state: Option<&PartitionState>, beta: f64, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &s in suites {
        let rows = match s {
            Suite::FaberKrahn => faber_krahn_suite(1.0 / 128.0, 1.0 / 256.0)?,
            Suite::Scaling => scaling_suite(beta)?,
            Suite::Probes | Suite::Competitors => {
                let st = state.ok_or_else(|| {
                    crate::error::invalid("state", format!("suite `{}` needs a state bundle", s.name()))
                })?;
                if s == Suite::Probes {
                    probe_suite(st, seed)?
                } else {
                    competitor_suite(st, seed)?
                }
            }
        };
        out.extend(rows);
    }
    Ok(out)
}
