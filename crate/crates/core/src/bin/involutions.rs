use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use involutions::centralforce::{
    figure5_experiment, simulate, stability_condition, stability_samples, SimulationConfig, State4, STABILITY_SAMPLES,
};
use involutions::construct::{from_even_function, from_symmetric_equation};
use involutions::fde::{closed_form, deviating_argument, residual_check, solve_numeric, FdeConfig, FdeProblem};
use involutions::involution::{catalog, verify_involution, CATALOG_NAMES};
use involutions::isochrony::{
    energy_grid, necessary_conditions, potential_from_involution, verify_isochrony, Potential,
};
use involutions::{presets, suite, Error, Interval, Involution, Tolerance};

#[derive(Parser)]
#[command(
    name = "involutions",
    version,
    about = "Construct and verify involutions of real intervals"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Emit::Csv, global = true)]
    emit: Emit,
    /// Output file (a directory for `figures`); standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run energy sweeps and trajectories concurrently.
    #[arg(long, global = true)]
    parallel: bool,
    /// Absolute and relative verification tolerance.
    #[arg(long, env = "INVOLUTIONS_TOL", default_value_t = 1e-9, global = true)]
    tol: f64,
    /// Number of samples for tables and verification grids.
    #[arg(long, env = "INVOLUTIONS_SAMPLES", default_value_t = 401, global = true)]
    samples: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog involutions.
    Catalog,
    /// Build an involution from a named even function.
    Construct {
        #[arg(long)]
        even: String,
        #[arg(long = "param", allow_negative_numbers = true)]
        params: Vec<f64>,
    },
    /// Trace the involution of a named symmetric equation.
    Implicit {
        #[arg(long)]
        equation: String,
        /// Grid points for the continuation.
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Check h∘h = id, monotonicity and h(0) = 0 for a catalog entry.
    Verify {
        #[arg(long)]
        catalog: String,
        #[arg(long = "param", allow_negative_numbers = true)]
        params: Vec<f64>,
    },
    /// Tabulate the isochronous potential of a catalog involution.
    Potential {
        #[arg(long)]
        catalog: String,
        #[arg(long = "param", allow_negative_numbers = true)]
        params: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
    },
    /// Measure periods over a geometric energy grid.
    Period {
        /// Catalog involution generating the potential.
        #[arg(long, conflicts_with = "potential")]
        catalog: Option<String>,
        #[arg(long = "param", allow_negative_numbers = true)]
        params: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Named test potential instead of a catalog involution.
        #[arg(long)]
        potential: Option<String>,
        #[arg(long, default_value_t = 5)]
        energies: usize,
        /// Allowed |T − 2π/ω|.
        #[arg(long, default_value_t = 1e-6)]
        period_tol: f64,
    },
    /// Stability test for a named central force.
    Stability {
        #[arg(long)]
        force: String,
        #[arg(long = "param", allow_negative_numbers = true)]
        params: Vec<f64>,
    },
    /// Integrate one orbit of a named central force.
    Simulate {
        #[arg(long)]
        force: String,
        #[arg(long = "param", allow_negative_numbers = true)]
        params: Vec<f64>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.4)]
        x: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        vx: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        y: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
        vy: f64,
        #[arg(long, default_value_t = 38.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Solve y'(t) = a·y(−t/(1+t)) numerically and in closed form.
    Fde {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        y0: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 10.0)]
        t1: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Write plot data for the figures into the `--out` directory.
    Figures {
        /// Figure number; all figures when absent.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        which: Option<u8>,
    },
    /// Run every module's checks.
    Suite,
}

enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
                    Cell::Num(v) => v.to_string(),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// What a command produced: a table for CSV, a summary for JSON.
struct Artifact {
    table: Option<Table>,
    summary: Value,
    passed: bool,
}

fn json_of<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn write_text(out: Option<&Path>, text: &str) -> involutions::Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit(cli: &Cli, a: &Artifact) -> involutions::Result<()> {
    let text = match (cli.emit, &a.table) {
        (Emit::Csv, Some(t)) => t.to_csv(),
        _ => serde_json::to_string_pretty(&a.summary).expect("serializable") + "\n",
    };
    write_text(cli.out.as_deref(), &text)
}

fn tabulate(h: &Involution, n: usize) -> involutions::Result<Table> {
    let mut t = Table::new(&["x", "h"]);
    for x in h.domain().sample_interior(n) {
        t.push(vec![x.into(), h.eval(x)?.into()]);
    }
    Ok(t)
}

fn cmd_catalog() -> involutions::Result<Artifact> {
    let defaults: [(&str, &[f64]); 7] = [
        ("negation", &[]),
        ("piecewise_linear", &[2.0]),
        ("log_exp", &[]),
        ("rational", &[1.0]),
        ("cube_root", &[2.0]),
        ("cube_root_smooth", &[2.0]),
        ("parabolic", &[]),
    ];
    debug_assert_eq!(defaults.len(), CATALOG_NAMES.len());
    let mut table = Table::new(&["name", "params", "lo", "hi", "fixed_point", "smooth"]);
    let mut metas = Vec::new();
    for (name, params) in defaults {
        let h = catalog(name, params)?;
        let m = h.meta();
        let p: Vec<String> = m.params.iter().map(|v| v.to_string()).collect();
        table.push(vec![
            name.into(),
            p.join(" ").as_str().into(),
            m.domain.lo().into(),
            m.domain.hi().into(),
            m.fixed_point.into(),
            if m.smooth { "true" } else { "false" }.into(),
        ]);
        metas.push(json_of(&m));
    }
    Ok(Artifact {
        table: Some(table),
        summary: Value::Array(metas),
        passed: true,
    })
}

fn cmd_construct(cli: &Cli, even: &str, params: &[f64]) -> involutions::Result<Artifact> {
    let p = presets::even(even, params)?;
    let c = from_even_function(&p)?;
    let report = verify_involution(c.h.function(), c.j, cli.samples, Tolerance::new(cli.tol, cli.tol))?;
    let summary = json!({
        "even": even,
        "params": params,
        "I": c.i,
        "J": c.j,
        "verification": report,
    });
    Ok(Artifact {
        table: Some(tabulate(&c.h, cli.samples)?),
        summary,
        passed: report.passed,
    })
}

fn cmd_implicit(cli: &Cli, equation: &str, points: usize) -> involutions::Result<Artifact> {
    let preset = presets::equation(equation)?;
    let trace = from_symmetric_equation(&preset.equation, &preset.grid(points))?;
    let h = &trace.involution;
    let report = verify_involution(h.function(), h.domain(), cli.samples, Tolerance::new(cli.tol, cli.tol))?;
    let mut table = Table::new(&["x", "h"]);
    for &(x, y) in &trace.table {
        table.push(vec![x.into(), y.into()]);
    }
    let summary = json!({
        "equation": equation,
        "J": h.domain(),
        "table_points": trace.table.len(),
        "max_equation_residual": trace.max_equation_residual,
        "truncated_below": trace.truncated_below,
        "truncated_above": trace.truncated_above,
        "verification": report,
    });
    Ok(Artifact {
        table: Some(table),
        summary,
        passed: report.passed,
    })
}

fn cmd_verify(cli: &Cli, name: &str, params: &[f64]) -> involutions::Result<Artifact> {
    let h = catalog(name, params)?;
    let report = verify_involution(h.function(), h.domain(), cli.samples, Tolerance::new(cli.tol, cli.tol))?;
    let mut table = Table::new(&["name", "max_residual", "worst_ratio", "monotone", "passed"]);
    table.push(vec![
        name.into(),
        report.max_involution_residual.into(),
        report.worst_ratio.into(),
        if report.monotonicity_ok { "true" } else { "false" }.into(),
        if report.passed { "true" } else { "false" }.into(),
    ]);
    let summary = json!({ "involution": h.meta(), "verification": report });
    Ok(Artifact {
        table: Some(table),
        summary,
        passed: report.passed,
    })
}

fn cmd_potential(cli: &Cli, name: &str, params: &[f64], omega: f64) -> involutions::Result<Artifact> {
    let h = catalog(name, params)?;
    let pot = potential_from_involution(&h, omega)?;
    let mut table = Table::new(&["x", "V", "g"]);
    for x in pot.domain().sample_interior(cli.samples) {
        table.push(vec![x.into(), pot.v().eval(x)?.into(), pot.g().eval(x)?.into()]);
    }
    let conditions = necessary_conditions(&pot, None)?;
    let summary = json!({
        "involution": h.meta(),
        "omega": omega,
        "target_period": pot.target_period(),
        "necessary_conditions": conditions,
    });
    Ok(Artifact {
        table: Some(table),
        summary,
        passed: true,
    })
}

fn period_potential(
    catalog_name: Option<&str>,
    params: &[f64],
    omega: f64,
    potential: Option<&str>,
) -> involutions::Result<Potential> {
    match (catalog_name, potential) {
        (Some(name), None) => potential_from_involution(&catalog(name, params)?, omega),
        (None, Some(name)) => presets::potential(name),
        _ => Err(Error::InvalidParameter(
            "give exactly one of --catalog or --potential".into(),
        )),
    }
}

fn cmd_period(cli: &Cli, pot: &Potential, energies: usize, period_tol: f64) -> involutions::Result<Artifact> {
    if energies == 0 {
        return Err(Error::InvalidParameter("need at least one energy".into()));
    }
    let grid = energy_grid(pot, energies)?;
    let report = verify_isochrony(pot, &grid, period_tol, cli.parallel)?;
    let mut table = Table::new(&["E", "T_quadrature", "T_return_map"]);
    for (i, &e) in grid.iter().enumerate() {
        table.push(vec![
            e.into(),
            report.periods[i].into(),
            report.return_map_periods[i].into(),
        ]);
    }
    let passed = report.passed;
    let summary = json!({ "potential": pot.name(), "omega": pot.omega(), "report": report });
    Ok(Artifact {
        table: Some(table),
        summary,
        passed,
    })
}

fn cmd_stability(name: &str, params: &[f64]) -> involutions::Result<Artifact> {
    let sys = presets::force(name, params)?;
    let r = stability_condition(&sys, &stability_samples(&sys, STABILITY_SAMPLES))?;
    let mut table = Table::new(&["x", "rho", "normalized"]);
    for i in 0..r.samples.len() {
        table.push(vec![r.samples[i].into(), r.residuals[i].into(), r.normalized[i].into()]);
    }
    let summary = json!({ "force": name, "params": params, "report": r });
    Ok(Artifact {
        table: Some(table),
        summary,
        passed: true,
    })
}

fn trajectory_table(sys: &involutions::centralforce::CentralForceSystem, states: &[State4]) -> Table {
    let mut table = Table::new(&["t", "x", "vx", "y", "vy", "E_x", "L"]);
    for s in states {
        table.push(vec![
            s.t.into(),
            s.x.into(),
            s.vx.into(),
            s.y.into(),
            s.vy.into(),
            sys.energy_x(s.x, s.vx).into(),
            s.angular_momentum().into(),
        ]);
    }
    table
}

fn cmd_simulate(name: &str, params: &[f64], s0: State4, t_end: f64, dt: f64) -> involutions::Result<Artifact> {
    let sys = presets::force(name, params)?;
    let traj = simulate(&sys, s0, t_end, dt, SimulationConfig::default())?;
    let table = trajectory_table(&sys, &traj.samples);
    let summary = json!({
        "force": name,
        "params": params,
        "initial": s0,
        "energy_drift": traj.energy_drift,
        "momentum_drift": traj.momentum_drift,
        "initial_energy": traj.initial_energy,
        "initial_momentum": traj.initial_momentum,
        "accumulated_local_error": traj.accumulated_local_error,
        "steps": traj.steps,
        "rejected": traj.rejected,
    });
    Ok(Artifact {
        table: Some(table),
        summary,
        passed: true,
    })
}

fn cmd_fde(p: FdeProblem, dt: f64) -> involutions::Result<Artifact> {
    let cfg = FdeConfig {
        dt,
        ..FdeConfig::default()
    };
    let sol = solve_numeric(&p, cfg)?;
    let mut table = Table::new(&["t", "y_numeric", "y_closed_form", "residual"]);
    for (i, t) in sol.span_points() {
        let (yh, _) = sol.eval(deviating_argument(t))?;
        table.push(vec![
            t.into(),
            sol.y[i].into(),
            closed_form(p.a, p.y0, t)?.into(),
            (sol.dy[i] - p.a * yh).abs().into(),
        ]);
    }
    let error = sol.closed_form_error(p.t0, p.t1)?;
    let residual = residual_check(&sol, p.a)?;
    let passed = error <= 1e-7 * (1.0 + p.y0.abs()) && residual <= 1e-6 * (1.0 + p.y0.abs());
    let summary = json!({
        "problem": p,
        "regime": sol.regime,
        "closed_form_error": error,
        "max_residual": residual,
        "passed": passed,
    });
    Ok(Artifact {
        table: Some(table),
        summary,
        passed,
    })
}

fn diagonal(table: &mut Table, lo: f64, hi: f64, n: usize) {
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        table.push(vec!["diagonal".into(), x.into(), x.into()]);
    }
}

fn curve_figure(h: &Involution, window: Interval, n: usize) -> involutions::Result<Table> {
    let mut table = Table::new(&["series", "x", "y"]);
    for x in window.sample_interior(n) {
        table.push(vec!["h".into(), x.into(), h.eval(x)?.into()]);
    }
    Ok(table)
}

fn figure(which: u8, n: usize, dir: &Path) -> involutions::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut save = |name: String, text: String| -> involutions::Result<()> {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        files.push(path);
        Ok(())
    };
    let side = match which {
        1 | 2 => {
            let even = if which == 1 { "y2_over_8" } else { "y6" };
            let c = from_even_function(&presets::even(even, &[])?)?;
            let mut t = curve_figure(&c.h, c.j, n)?;
            diagonal(&mut t, c.j.lo(), c.j.hi(), 3);
            save(format!("fig{which}.csv"), t.to_csv())?;
            json!({ "figure": which, "even": even, "I": c.i, "J": c.j, "series": ["h", "diagonal"] })
        }
        3 => {
            let h = catalog("cube_root", &[2.0])?;
            let window = Interval::symmetric(3.0)?;
            let mut t = Table::new(&["series", "x", "y"]);
            for i in 0..n {
                let x = -3.0 + 6.0 * i as f64 / (n - 1) as f64;
                t.push(vec!["h".into(), x.into(), h.eval(x)?.into()]);
            }
            diagonal(&mut t, -3.0, 3.0, 3);
            save("fig3.csv".into(), t.to_csv())?;
            json!({ "figure": 3, "involution": h.meta(), "window": window, "series": ["h", "diagonal"] })
        }
        4 => {
            let preset = presets::equation("cubic2")?;
            let trace = from_symmetric_equation(&preset.equation, &preset.grid(n))?;
            let mut t = Table::new(&["series", "x", "y"]);
            for &(x, y) in &trace.table {
                t.push(vec!["h".into(), x.into(), y.into()]);
            }
            let global = catalog("cube_root", &[2.0])?;
            for i in 0..n {
                let x = -3.0 + 6.0 * i as f64 / (n - 1) as f64;
                t.push(vec!["cubic".into(), x.into(), global.eval(x)?.into()]);
            }
            for x in [-3.0, 3.0] {
                t.push(vec!["line".into(), x.into(), (-x - 2.0).into()]);
            }
            diagonal(&mut t, -3.0, 3.0, 3);
            save("fig4.csv".into(), t.to_csv())?;
            json!({
                "figure": 4,
                "equation": "cubic2",
                "J": trace.involution.domain(),
                "window": Interval::symmetric(3.0)?,
                "series": ["h", "cubic", "line", "diagonal"],
                "line": "x + y + 2 = 0",
            })
        }
        _ => {
            let fig = figure5_experiment(SimulationConfig::default())?;
            let sys = involutions::centralforce::figure5_system()?;
            for (k, trace) in fig.traces.iter().enumerate() {
                let (a, b) = fig.windows[k];
                save(
                    format!("fig5_window_{a}_{b}.csv"),
                    trajectory_table(&sys, trace).to_csv(),
                )?;
            }
            json!({
                "figure": 5,
                "force": "one_plus_x2",
                "initial": fig.initial,
                "windows": fig.windows,
                "max_radius": fig.max_radius,
                "radius_grows": fig.radius_grows,
                "energy_drift": fig.energy_drift,
                "momentum_drift": fig.momentum_drift,
                "initial_energy": fig.initial_energy,
                "initial_momentum": fig.initial_momentum,
            })
        }
    };
    save(
        format!("fig{which}.json"),
        serde_json::to_string_pretty(&side).expect("serializable") + "\n",
    )?;
    Ok(files)
}

fn cmd_figures(cli: &Cli, which: Option<u8>) -> involutions::Result<Artifact> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let list: Vec<u8> = match which {
        Some(w) => vec![w],
        None => (1..=5).collect(),
    };
    let mut written = Vec::new();
    for w in list {
        written.extend(figure(w, cli.samples.max(3), &dir)?);
    }
    let mut table = Table::new(&["file"]);
    for p in &written {
        table.push(vec![p.display().to_string().as_str().into()]);
    }
    let summary = json!({ "files": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>() });
    Ok(Artifact {
        table: Some(table),
        summary,
        passed: true,
    })
}

fn cmd_suite(parallel: bool) -> Artifact {
    let checks = suite::run_suite(parallel);
    let mut table = Table::new(&["check", "passed", "detail"]);
    for c in &checks {
        let detail = c.detail.replace(',', ";");
        table.push(vec![
            c.name.into(),
            if c.passed { "PASS" } else { "FAIL" }.into(),
            detail.as_str().into(),
        ]);
    }
    let passed = checks.iter().all(|c| c.passed);
    Artifact {
        table: Some(table),
        summary: json!({ "checks": checks, "passed": passed }),
        passed,
    }
}

fn run(cli: &Cli) -> involutions::Result<bool> {
    if !(cli.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            cli.tol
        )));
    }
    if cli.samples < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 samples, got {}",
            cli.samples
        )));
    }
    let artifact = match &cli.command {
        Command::Catalog => cmd_catalog()?,
        Command::Construct { even, params } => cmd_construct(cli, even, params)?,
        Command::Implicit { equation, points } => cmd_implicit(cli, equation, *points)?,
        Command::Verify { catalog, params } => cmd_verify(cli, catalog, params)?,
        Command::Potential { catalog, params, omega } => cmd_potential(cli, catalog, params, *omega)?,
        Command::Period {
            catalog,
            params,
            omega,
            potential,
            energies,
            period_tol,
        } => {
            let pot = period_potential(catalog.as_deref(), params, *omega, potential.as_deref())?;
            cmd_period(cli, &pot, *energies, *period_tol)?
        }
        Command::Stability { force, params } => cmd_stability(force, params)?,
        Command::Simulate {
            force,
            params,
            x,
            vx,
            y,
            vy,
            t_end,
            dt,
        } => cmd_simulate(force, params, State4::new(*x, *vx, *y, *vy), *t_end, *dt)?,
        Command::Fde { a, y0, t0, t1, dt } => cmd_fde(FdeProblem::new(*a, *y0, *t0, *t1)?, *dt)?,
        Command::Figures { which } => {
            let a = cmd_figures(cli, *which)?;
            // file list goes to stdout; --out names the directory
            let text = match cli.emit {
                Emit::Csv => a.table.as_ref().map(Table::to_csv).unwrap_or_default(),
                Emit::Json => serde_json::to_string_pretty(&a.summary).expect("serializable") + "\n",
            };
            write_text(None, &text)?;
            return Ok(a.passed);
        }
        Command::Suite => cmd_suite(cli.parallel),
    };
    emit(cli, &artifact)?;
    Ok(artifact.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_) | Error::UnknownName(_) | Error::Io(_) | Error::InvalidInterval { .. } => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}
