use std::cmp::Ordering;

use rayon::prelude::*;
use spincat_core::dynamics::{
    characteristic_times, evolve_polar_cat, t_dec, t_diss, BathParams, TimesOptions,
};
use spincat_core::squeezing::{max_squeezing, squeezing_report};
use spincat_core::states::{coherent_state, density_of};
use spincat_core::wigner::{
    characteristic_matrix, nonpolar_cat_field, polar_cat_field, sphere_grid, wigner_field, SphereField,
};

use crate::config::{angle, positive, CommandKind, RunConfig, StateKind, MAX_GRID};
use crate::error::CliError;
use crate::table::{Cell, Document, Table};

/// Caps the worker count of `sweep`.
pub const THREADS_ENV: &str = "SPINCAT_THREADS";
/// Largest Wigner grid written in one file.
const MAX_GRID_POINTS: usize = 20_000_000;

pub fn run(cfg: &RunConfig) -> Result<Document, CliError> {
    match cfg.command {
        Some(CommandKind::Wigner) => wigner(cfg),
        Some(CommandKind::Squeeze) => squeeze(cfg),
        Some(CommandKind::Evolve) => evolve(cfg),
        Some(CommandKind::Times) => times(cfg, false),
        Some(CommandKind::Sweep) => times(cfg, true),
        None => Err(CliError::Config("no command given on the command line or in the config file".into())),
    }
}

fn bath(nbar: f64) -> BathParams {
    BathParams::new(nbar).expect("nbar validated by the config")
}

/// Wigner function of a cat or coherent state on a Gauss–Legendre × uniform
/// grid: columns `theta`, `phi` (radians), quadrature `weight`, `w`.
pub fn wigner(cfg: &RunConfig) -> Result<Document, CliError> {
    let n = cfg.single_atoms(5)?;
    let over = match cfg.oversample.unwrap_or(2) {
        o @ 1..=64 => o,
        o => return Err(CliError::Config(format!("oversample must lie in 1..=64, got {o}"))),
    };
    let n_theta = cfg.n_theta.unwrap_or(over * (n + 1));
    let n_phi = cfg.n_phi.unwrap_or(over * (2 * n + 1));
    for (name, v) in [("n_theta", n_theta), ("n_phi", n_phi)] {
        if !(1..=MAX_GRID).contains(&v) {
            return Err(CliError::Config(format!("{name} must lie in 1..={MAX_GRID}, got {v}")));
        }
    }
    if n_theta * n_phi > MAX_GRID_POINTS {
        return Err(CliError::Config(format!("grid {n_theta}x{n_phi} exceeds {MAX_GRID_POINTS} points")));
    }
    // The generic pipeline needs enough nodes for a degree-N polynomial.
    if n_theta < (n + 2).div_ceil(2) || n_phi < n + 1 {
        return Err(CliError::Config(format!(
            "grid {n_theta}x{n_phi} too coarse for N = {n}: need at least {}x{}",
            (n + 2).div_ceil(2),
            n + 1
        )));
    }
    let grid = sphere_grid(n_theta, n_phi)?;
    let beta = angle("beta_deg", cfg.beta_deg.unwrap_or(45.0), Some(180.0))?;
    let field: SphereField = match cfg.state.unwrap_or(StateKind::Polar) {
        StateKind::Polar => polar_cat_field(n, &grid)?,
        StateKind::Nonpolar => nonpolar_cat_field(n, beta, &grid)?,
        StateKind::Coherent => {
            let alpha = angle("alpha_deg", cfg.alpha_deg.unwrap_or(0.0), None)?;
            wigner_field(&characteristic_matrix(&density_of(&coherent_state(n, beta, alpha)?)), &grid)?
        }
    };
    let mut table = Table::new("wigner", &["theta", "phi", "weight", "w"]);
    for ((theta, phi, weight), w) in grid.nodes().zip(field.values()) {
        table.push(vec![theta.into(), phi.into(), weight.into(), (*w).into()]);
    }
    Ok(Document::single(table))
}

/// `S(β)` curves for each N and the location of each maximum.
pub fn squeeze(cfg: &RunConfig) -> Result<Document, CliError> {
    let atoms = cfg.atoms_list(&[2, 5, 20, 100])?;
    let lo = cfg.beta_min_deg.unwrap_or(0.0);
    let hi = cfg.beta_max_deg.unwrap_or(90.0);
    let step = positive("beta_step_deg", cfg.beta_step_deg.unwrap_or(1.0))?;
    angle("beta_min_deg", lo, Some(180.0))?;
    angle("beta_max_deg", hi, Some(180.0))?;
    if hi < lo {
        return Err(CliError::Config(format!("beta_max_deg {hi} is below beta_min_deg {lo}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(CliError::Config(format!("{count} β values requested; at most 1000000")));
    }
    let mut curves = Table::new("squeezing", &["n_atoms", "beta_deg", "var_jx", "var_jy", "s"]);
    let mut summary = Table::new("maximum", &["n_atoms", "beta_m_deg", "s_max"]);
    for &n in &atoms {
        for k in 0..count {
            let deg = lo + step * k as f64;
            let beta = deg.to_radians();
            // Odd N at β = π: the cat has no norm.
            if 1.0 + beta.cos().powi(n as i32) < 1e-14 {
                curves.push(vec![n.into(), deg.into(), Cell::Missing, Cell::Missing, Cell::Missing]);
                continue;
            }
            let r = squeezing_report(n, beta);
            curves.push(vec![n.into(), deg.into(), r.var_jx.into(), r.var_jy.into(), r.s_measure.into()]);
        }
        match max_squeezing(n) {
            Ok((beta_m, s_max)) => summary.push(vec![n.into(), beta_m.to_degrees().into(), s_max.into()]),
            Err(spincat_core::Error::NoSqueezing) => summary.push(vec![n.into(), Cell::Missing, 0.0.into()]),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Document { tables: vec![curves, summary] })
}

/// Damped polar cat: populations (`rho(m)` columns, m = -N/2 ..= N/2), the
/// corner coherence ρ_{-j,j}, the energy, `1 + E/(-j)` and optionally ν.
pub fn evolve(cfg: &RunConfig) -> Result<Document, CliError> {
    let n = cfg.single_atoms(5)?;
    let b = bath(cfg.single_nbar(0.0)?);
    let samples = cfg.samples(201)?;
    let horizon = match (cfg.horizon, cfg.horizon_factor) {
        (Some(h), None) => positive("horizon", h)?,
        (None, factor) => {
            let f = positive("horizon_factor", factor.unwrap_or(5.0))?;
            let opts = TimesOptions { ncl: false, ..Default::default() };
            f * characteristic_times(n, b, opts)?.0.t_diss
        }
        (Some(_), Some(_)) => return Err(CliError::Config("give horizon or horizon_factor, not both".into())),
    };
    let mut trace = evolve_polar_cat(n, b, horizon, samples)?;
    let with_nu = cfg.nu.unwrap_or(false);
    if with_nu {
        trace.compute_nu()?;
    }
    let j = n as f64 / 2.0;
    let mut columns = vec!["t".to_string()];
    columns.extend((0..=n).map(|i| format!("rho({})", i as f64 - j)));
    columns.extend(["corner_re", "corner_im", "energy", "energy_ratio"].map(String::from));
    if with_nu {
        columns.push("nu".into());
    }
    let mut table = Table::with_columns("trace", columns);
    for (k, &t) in trace.times().iter().enumerate() {
        let mut row: Vec<Cell> = vec![t.into()];
        row.extend(trace.populations(k).iter().map(|&p| Cell::Real(p)));
        let (z, e) = (trace.corner()[k], trace.energy()[k]);
        row.extend([z.re.into(), z.im.into(), e.into(), (1.0 - e / j).into()]);
        if let Some(nu) = trace.nu() {
            row.push(nu[k].into());
        }
        table.push(row);
    }
    let mut doc = Document::single(table);
    if cfg.report_times.unwrap_or(false) {
        let mut times = Table::new("times", &["t_dec", "t_diss"]);
        times.push(vec![t_dec(n, b).into(), t_diss(&trace)?.into()]);
        doc.tables.push(times);
    }
    Ok(doc)
}

type TimesRow = (usize, f64, [Cell; 4]);

fn times_row(n: usize, nbar: f64, ncl: bool) -> Result<TimesRow, CliError> {
    let opts = TimesOptions { ncl, ..Default::default() };
    let (t, _) = characteristic_times(n, bath(nbar), opts)?;
    Ok((n, nbar, [t.t_dec.into(), t.t_diss.into(), t.t_ncl.into(), t.ratio_r.into()]))
}

fn worker_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Ok(Some(v)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
    }
}

/// `(N, n̄, t_dec, t_diss, t_ncl, r)` for every pair; `sweep` runs the pairs
/// in parallel. Rows are sorted by `(N, n̄)` either way.
pub fn times(cfg: &RunConfig, parallel: bool) -> Result<Document, CliError> {
    let atoms = cfg.atoms_list(&[5])?;
    let nbars = cfg.nbar_list(&[0.0])?;
    let ncl = cfg.ncl.unwrap_or(true);
    let mut jobs: Vec<(usize, f64)> = atoms.iter().flat_map(|&n| nbars.iter().map(move |&v| (n, v))).collect();
    jobs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    jobs.dedup();
    let rows: Vec<TimesRow> = if parallel {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = worker_count()? {
            builder = builder.num_threads(t);
        }
        let pool = builder.build().map_err(|e| CliError::Config(e.to_string()))?;
        let mut rows =
            pool.install(|| jobs.par_iter().map(|&(n, v)| times_row(n, v, ncl)).collect::<Result<Vec<_>, _>>())?;
        rows.sort_by(|a, b| match a.0.cmp(&b.0) {
            Ordering::Equal => a.1.total_cmp(&b.1),
            o => o,
        });
        rows
    } else {
        jobs.iter().map(|&(n, v)| times_row(n, v, ncl)).collect::<Result<_, _>>()?
    };
    let mut table = Table::new("times", &["n_atoms", "nbar", "t_dec", "t_diss", "t_ncl", "r"]);
    for (n, nbar, cells) in rows {
        let mut row = vec![n.into(), nbar.into()];
        row.extend(cells);
        table.push(row);
    }
    Ok(Document::single(table))
}
