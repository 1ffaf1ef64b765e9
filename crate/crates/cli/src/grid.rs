//! `(x, t)` grids and the long-format density CSV.

use std::fmt::Write as _;

use hpcs_core::fock::{phase_evolve, position_wavefunction, Truncation};
use hpcs_core::hpcs::{hpcs_fock, rho, HpcsParams};
use rayon::prelude::*;

use crate::CliError;

pub const DEFAULT_MAX_POINTS: usize = 100_000;
pub const MAX_POINTS_ENV: &str = "HPCS_MAX_POINTS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn validate(&self, max_points: usize) -> Result<(), CliError> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.t_min.is_finite() && self.t_max.is_finite()) {
            return Err(CliError::Usage("grid bounds must be finite".into()));
        }
        if !(self.x_min < self.x_max) {
            return Err(CliError::Usage(format!("--x-min ({}) must be below --x-max ({})", self.x_min, self.x_max)));
        }
        if self.nx < 2 {
            return Err(CliError::Usage("--nx must be at least 2".into()));
        }
        if self.nt < 1 {
            return Err(CliError::Usage("--nt must be at least 1".into()));
        }
        let points = self.nx.saturating_mul(self.nt);
        if points > max_points {
            return Err(CliError::Usage(format!(
                "grid has {points} points, above the cap of {max_points} (set {MAX_POINTS_ENV} to raise it)"
            )));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ts(&self) -> Vec<f64> {
        if self.nt == 1 {
            return vec![self.t_min];
        }
        linspace(self.t_min, self.t_max, self.nt)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Cap on `nx · nt`, from the environment or the default.
pub fn max_points() -> Result<usize, CliError> {
    match std::env::var(MAX_POINTS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_POINTS_ENV}={v:?} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_MAX_POINTS),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Route {
    /// Number-basis expansion evolved by phases.
    Fock,
    /// Gaussian-superposition density (j = 2, 3, 4).
    Closed,
    /// Both, with their absolute difference.
    Both,
}

/// One CSV row per grid point, `t`-major.
pub fn density_csv(p: &HpcsParams, grid: &GridSpec, route: Route) -> Result<String, CliError> {
    if route != Route::Fock && !(2..=4).contains(&p.j()) {
        return Err(CliError::Usage(format!(
            "the closed route needs j in {{2, 3, 4}} (got j = {}); use --route fock",
            p.j()
        )));
    }
    let xs = grid.xs();
    let ts = grid.ts();
    let fock = match route {
        Route::Closed => None,
        _ => Some(hpcs_fock(p, Truncation::Auto)?),
    };

    let rows: Vec<Result<String, CliError>> = ts
        .par_iter()
        .map(|&t| {
            let fock_rho: Option<Vec<f64>> = fock
                .as_ref()
                .map(|v| position_wavefunction(&phase_evolve(v, t), &xs).iter().map(|c| c.norm_sqr()).collect());
            let mut out = String::with_capacity(xs.len() * 48);
            for (i, &x) in xs.iter().enumerate() {
                match route {
                    Route::Fock => {
                        let _ = writeln!(out, "{:?},{:?},{:?}", x, t, fock_rho.as_ref().unwrap()[i]);
                    }
                    Route::Closed => {
                        let _ = writeln!(out, "{:?},{:?},{:?}", x, t, rho(p, x, t)?);
                    }
                    Route::Both => {
                        let a = fock_rho.as_ref().unwrap()[i];
                        let b = rho(p, x, t)?;
                        let _ = writeln!(out, "{:?},{:?},{:?},{:?},{:?}", x, t, a, b, (a - b).abs());
                    }
                }
            }
            Ok(out)
        })
        .collect();

    let mut csv = String::new();
    let _ = writeln!(csv, "# hpcs density, version {}", hpcs_core::VERSION);
    let _ = writeln!(csv, "# j={} k={} x0={:?} p0={:?}", p.j(), p.k(), p.x0(), p.p0());
    let _ = writeln!(
        csv,
        "# route={} x=[{:?},{:?}] nx={} t=[{:?},{:?}] nt={}",
        match route {
            Route::Fock => "fock",
            Route::Closed => "closed",
            Route::Both => "both (rho: number basis, rho_alt: closed form)",
        },
        grid.x_min,
        grid.x_max,
        grid.nx,
        grid.t_min,
        grid.t_max,
        grid.nt
    );
    csv.push_str(if route == Route::Both { "x,t,rho,rho_alt,absdiff\n" } else { "x,t,rho\n" });
    for r in rows {
        csv.push_str(&r?);
    }
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(nx: usize, nt: usize) -> GridSpec {
        GridSpec { x_min: -1.0, x_max: 1.0, nx, t_min: 0.0, t_max: 1.0, nt }
    }

    #[test]
    fn validation() {
        assert!(spec(2, 1).validate(10).is_ok());
        assert!(spec(1, 1).validate(10).is_err());
        assert!(spec(2, 0).validate(10).is_err());
        assert!(spec(6, 2).validate(10).is_err());
        let mut s = spec(3, 1);
        s.x_max = -2.0;
        assert!(s.validate(10).is_err());
    }

    #[test]
    fn endpoints_exact() {
        let g = GridSpec { x_min: -8.0, x_max: 8.0, nx: 321, t_min: 0.0, t_max: std::f64::consts::TAU, nt: 128 };
        let xs = g.xs();
        assert_eq!(xs[0], -8.0);
        assert_eq!(xs[160], 0.0);
        assert_eq!(*xs.last().unwrap(), 8.0);
        assert_eq!(*g.ts().last().unwrap(), std::f64::consts::TAU);
        assert_eq!(spec(2, 1).ts(), vec![0.0]);
    }
}
