//! The four batch commands.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use thiserror::Error;

use cuf_flutter::flutter::{FlutterError, FlutterResult, TracePoint};
use cuf_flutter::model::{parametric_sweep, ModelError, PanelCase};

use crate::config::{ConfigError, RunConfig};
use crate::output::{describe_trend, num, plot_data, write_atomic, Table};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failure: {message}")]
    Solver { message: String, files: Vec<PathBuf> },
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for configuration errors, 3 for solver failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Solver { .. } => 3,
            Self::Io(_) => 1,
        }
    }
}

/// Files written by a successful run and a one-line summary.
#[derive(Debug)]
pub struct Outputs {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

struct Run<'a> {
    config: &'a RunConfig,
    out: &'a Path,
    command: &'static str,
    started: Instant,
    files: Vec<PathBuf>,
}

impl<'a> Run<'a> {
    fn new(config: &'a RunConfig, out: &'a Path, command: &'static str) -> Result<Self, RunError> {
        config.validate()?;
        Ok(Self {
            config,
            out,
            command,
            started: Instant::now(),
            files: Vec::new(),
        })
    }

    fn table(&self, columns: &[&str], case: &PanelCase) -> Table {
        let mut t = Table::new(columns);
        t.meta("command", self.command);
        t.meta("mesh", format!("{}x{}", case.nx, case.ny));
        t.meta("boundary", case.boundary);
        t.meta("theory", &case.theory);
        t.meta("a_over_b", num(case.a / case.b));
        t.meta("a_over_h", num(case.a / case.thickness()));
        t.config_echo = self.config.echo();
        t
    }

    fn write_table(&mut self, suffix: &str, table: &Table) -> Result<(), RunError> {
        let generated = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let run_line = format!(
            "generated_unix={generated} elapsed_s={:.3}",
            self.started.elapsed().as_secs_f64()
        );
        self.write_raw(&format!("{suffix}.csv"), &table.to_csv(&run_line))
    }

    fn write_raw(&mut self, suffix_ext: &str, contents: &str) -> Result<(), RunError> {
        let name = format!("{}_{suffix_ext}", self.config.output.name);
        self.files.push(write_atomic(self.out, &name, contents)?);
        Ok(())
    }

    fn finish(self, summary: String) -> Outputs {
        Outputs {
            files: self.files,
            summary,
        }
    }

    fn fail(self, message: String) -> RunError {
        RunError::Solver {
            message,
            files: self.files,
        }
    }
}

fn solver_message(e: &ModelError) -> String {
    match e {
        ModelError::Flutter(FlutterError::NotFound { min, max, trace }) => {
            format!("no flutter for lambda* in [{min}, {max}] ({} sweep points)", trace.len())
        }
        other => other.to_string(),
    }
}

/// Natural frequencies of the configured panel.
pub fn run_modes(config: &RunConfig, out: &Path) -> Result<Outputs, RunError> {
    let mut run = Run::new(config, out, "modes")?;
    let case = config.to_case()?;
    let freqs = match case.build().and_then(|m| m.frequencies(config.solver.frequencies)) {
        Ok(f) => f,
        Err(e) => return Err(run.fail(solver_message(&e))),
    };
    let mut t = run.table(&["mode", "omega", "omega_star", "omega_bar"], &case);
    for (i, f) in freqs.iter().enumerate() {
        t.rows.push(vec![(i + 1).to_string(), num(f.omega), num(f.omega_star), num(f.omega_bar)]);
    }
    run.write_table("modes", &t)?;
    let summary = format!("mode 1: omega* = {}, Omega = {}", num(freqs[0].omega_star), num(freqs[0].omega_bar));
    Ok(run.finish(summary))
}

fn trace_table(run: &Run, case: &PanelCase, trace: &[TracePoint]) -> Table {
    let width = trace.iter().map(|p| p.values.len()).max().unwrap_or(0);
    let mut columns = vec!["lambda_star".to_string(), "indicator".to_string()];
    for k in 1..=width {
        columns.push(format!("re_{k}"));
        columns.push(format!("im_{k}"));
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = run.table(&cols, case);
    t.meta("values", if case.flow.damped { "state eigenvalues s" } else { "pencil eigenvalues kappa" });
    for p in trace {
        let mut row = vec![num(p.lambda_star), num(p.indicator)];
        for k in 0..width {
            match p.values.get(k) {
                Some(v) => row.extend([num(v.re), num(v.im)]),
                None => row.extend([String::new(), String::new()]),
            }
        }
        t.rows.push(row);
    }
    t
}

const FLUTTER_COLUMNS: [&str; 9] = [
    "lambda_star_cr",
    "omega_star_cr",
    "lambda_cr",
    "omega_cr",
    "mode_i",
    "mode_j",
    "g_tau",
    "damped",
    "bracket_rel",
];

fn flutter_row(r: &FlutterResult) -> Vec<String> {
    vec![
        num(r.lambda_star_cr),
        num(r.omega_star_cr),
        num(r.lambda_cr),
        num(r.omega_cr),
        r.mode_pair.0.to_string(),
        r.mode_pair.1.to_string(),
        num(r.g_tau),
        r.damped.to_string(),
        num(r.bracket_rel),
    ]
}

/// Flutter boundary of the configured panel plus the coarse-sweep trace.
/// When no flutter is found the trace is still written.
pub fn run_flutter(config: &RunConfig, out: &Path) -> Result<Outputs, RunError> {
    let mut run = Run::new(config, out, "flutter")?;
    let case = config.to_case()?;
    match case.build().and_then(|m| m.flutter()) {
        Ok(r) => {
            let mut t = run.table(&FLUTTER_COLUMNS, &case);
            t.meta("strategy", case.strategy);
            t.rows.push(flutter_row(&r));
            run.write_table("flutter", &t)?;
            let trace = trace_table(&run, &case, &r.trace);
            run.write_table("flutter_trace", &trace)?;
            let summary = format!(
                "lambda*_cr = {}, omega*_cr = {}, modes ({}, {})",
                num(r.lambda_star_cr),
                num(r.omega_star_cr),
                r.mode_pair.0,
                r.mode_pair.1
            );
            Ok(run.finish(summary))
        }
        Err(e) => {
            if let ModelError::Flutter(FlutterError::NotFound { trace, .. }) = &e {
                let t = trace_table(&run, &case, trace);
                run.write_table("flutter_trace", &t)?;
            }
            Err(run.fail(solver_message(&e)))
        }
    }
}

/// Flutter boundary over the `[sweep]` grid. Failing points are recorded
/// with their error and make the run exit as a solver failure after all
/// output is written.
pub fn run_sweep(config: &RunConfig, out: &Path) -> Result<Outputs, RunError> {
    let mut run = Run::new(config, out, "sweep")?;
    let axis = config.sweep_axis()?;
    let values = &config.sweep.as_ref().expect("validated").values;
    let case = config.to_case()?;
    let points = match parametric_sweep(axis, values, &case) {
        Ok(p) => p,
        Err(e) => return Err(run.fail(solver_message(&e))),
    };
    let mut columns = vec![axis.to_string()];
    columns.extend(FLUTTER_COLUMNS.iter().map(|c| c.to_string()));
    columns.extend(["change".to_string(), "status".to_string()]);
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = run.table(&cols, &case);
    t.meta("axis", axis);
    let mut lambda = Vec::new();
    let mut omega = Vec::new();
    let mut failed = 0;
    let mut previous: Option<f64> = None;
    for p in &points {
        let mut row = vec![num(p.value)];
        match &p.outcome {
            Ok(r) => {
                row.extend(flutter_row(r));
                let change = match previous {
                    Some(prev) if r.lambda_star_cr > prev => "+",
                    Some(prev) if r.lambda_star_cr < prev => "-",
                    Some(_) => "=",
                    None => "",
                };
                row.extend([change.to_string(), "ok".to_string()]);
                previous = Some(r.lambda_star_cr);
                lambda.push((p.value, r.lambda_star_cr));
                omega.push((p.value, r.omega_star_cr));
            }
            Err(e) => {
                failed += 1;
                row.extend(FLUTTER_COLUMNS.iter().map(|_| String::new()));
                row.extend([String::new(), solver_message(e)]);
            }
        }
        t.rows.push(row);
    }
    let trend = describe_trend(&lambda);
    t.meta("lambda_star_trend", &trend);
    run.write_table("sweep", &t)?;
    let axis_label = axis.to_string();
    run.write_raw("sweep_lambda.dat", &plot_data(&axis_label, "lambda_star_cr", &lambda))?;
    run.write_raw("sweep_omega.dat", &plot_data(&axis_label, "omega_star_cr", &omega))?;
    if failed > 0 {
        return Err(run.fail(format!("{failed} of {} sweep points failed", points.len())));
    }
    Ok(run.finish(format!("{} points over {axis}, lambda* {trend}", points.len())))
}

/// Frequencies, and optionally the flutter boundary, on each square mesh
/// of the ladder.
pub fn run_convergence(config: &RunConfig, out: &Path, with_flutter: bool) -> Result<Outputs, RunError> {
    let mut run = Run::new(config, out, "convergence")?;
    let k = config.solver.frequencies;
    let mut columns = vec!["mesh".to_string()];
    columns.extend((1..=k).map(|i| format!("omega_bar_{i}")));
    columns.extend((1..=k).map(|i| format!("omega_star_{i}")));
    if with_flutter {
        columns.extend(["lambda_star_cr", "omega_star_cr", "mode_i", "mode_j"].map(String::from));
    }
    columns.push("status".into());
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let base = config.to_case()?;
    let mut t = run.table(&cols, &base);
    t.meta = t.meta.into_iter().filter(|(key, _)| key != "mesh").collect();
    t.meta(
        "ladder",
        config.mesh.ladder.iter().map(|n| format!("{n}x{n}")).collect::<Vec<_>>().join(" "),
    );
    let mut fundamental = Vec::new();
    let mut boundary = Vec::new();
    let mut failures = Vec::new();
    for &n in &config.mesh.ladder {
        let mut case = base.clone();
        case.nx = n;
        case.ny = n;
        let mut row = vec![n.to_string()];
        let model = case.build();
        let freqs = model.as_ref().map_err(solver_message).and_then(|m| m.frequencies(k).map_err(|e| solver_message(&e)));
        let mut status = Vec::new();
        match freqs {
            Ok(f) => {
                row.extend(f.iter().map(|x| num(x.omega_bar)));
                row.extend(f.iter().map(|x| num(x.omega_star)));
                fundamental.push((n as f64, f[0].omega_bar));
            }
            Err(e) => {
                row.extend((0..2 * k).map(|_| String::new()));
                status.push(e);
            }
        }
        if with_flutter {
            match model.as_ref().map_err(solver_message).and_then(|m| m.flutter().map_err(|e| solver_message(&e))) {
                Ok(r) => {
                    row.extend([
                        num(r.lambda_star_cr),
                        num(r.omega_star_cr),
                        r.mode_pair.0.to_string(),
                        r.mode_pair.1.to_string(),
                    ]);
                    boundary.push((n as f64, r.lambda_star_cr));
                }
                Err(e) => {
                    row.extend((0..4).map(|_| String::new()));
                    status.push(e);
                }
            }
        }
        if status.is_empty() {
            row.push("ok".into());
        } else {
            failures.push(n);
            row.push(status.join("; "));
        }
        t.rows.push(row);
    }
    run.write_table("convergence", &t)?;
    run.write_raw("convergence_omega.dat", &plot_data("mesh", "omega_bar_1", &fundamental))?;
    if with_flutter {
        run.write_raw("convergence_lambda.dat", &plot_data("mesh", "lambda_star_cr", &boundary))?;
    }
    if !failures.is_empty() {
        return Err(run.fail(format!("meshes {failures:?} failed")));
    }
    Ok(run.finish(format!("{} meshes", config.mesh.ladder.len())))
}
