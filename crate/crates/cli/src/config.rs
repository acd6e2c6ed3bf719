//! Flat `key = value` configuration with dotted section keys.
//!
//! Blank lines and text after `#` are ignored. Every key may appear at most
//! once, and unknown keys are rejected.

use std::collections::HashMap;
use std::path::PathBuf;

use nonlocal_lwr::{
    presets, FluxModel, Grid, InitialProfile, Kernel, KernelFamily, Scenario, SnapshotPlan,
    SolverKind, VelocityField,
};

pub const KNOWN_KEYS: &[&str] = &[
    "preset",
    "domain.x_min",
    "domain.x_max",
    "grid.n_cells",
    "grid.dx",
    "velocity.left",
    "velocity.right",
    "model",
    "kernel.family",
    "kernel.eta",
    "initial.kind",
    "initial.left",
    "initial.right",
    "initial.center",
    "initial.width",
    "initial.height",
    "initial.breaks",
    "initial.values",
    "time.t_end",
    "time.cfl",
    "solver",
    "viscous.epsilon",
    "output.dir",
    "output.snapshot_times",
    "output.snapshot_interval",
    "diagnostics.tv_delta",
    "viscosity.epsilons",
    "refine.levels",
    "stability.center",
    "stability.width",
    "stability.height",
    "verify.entropy_c",
    "verify.trace_cells",
    "verify.trace_tol",
    "verify.corpus_size",
];

/// Default interface-trace tolerance per unit `v_r · dx`; it equals
/// `0.02 v_r` at `dx = 2.5e-3`.
pub const TRACE_TOL_PER_CELL: f64 = 8.0;

/// Keys that describe the scenario itself and therefore conflict with `preset`.
const SCENARIO_KEYS: &[&str] = &[
    "domain.x_min",
    "domain.x_max",
    "grid.n_cells",
    "velocity.left",
    "velocity.right",
    "model",
    "kernel.family",
    "kernel.eta",
    "initial.kind",
    "initial.left",
    "initial.right",
    "initial.center",
    "initial.width",
    "initial.height",
    "initial.breaks",
    "initial.values",
    "time.t_end",
    "solver",
    "viscous.epsilon",
];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}{}: {message}", key.as_ref().map(|k| format!(", key `{k}`")).unwrap_or_default())]
    Parse { line: usize, key: Option<String>, message: String },
    #[error("validation error: {0}")]
    Validation(String),
}

/// How a trajectory is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evolution {
    Solver,
    /// The initial profile held fixed in time, for auditing hand-built fields.
    Frozen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub evolution: Evolution,
    pub warnings: Vec<String>,
    pub output_dir: Option<PathBuf>,
    pub viscosity_epsilons: Vec<f64>,
    pub refine_levels: usize,
    pub perturbation: InitialProfile,
    pub entropy_c: f64,
    pub trace_cells: usize,
    pub trace_tol: f64,
    pub corpus_size: usize,
}

struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = HashMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Parse {
                    line,
                    key: None,
                    message: "expected `key = value`".into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(ConfigError::Parse {
                    line,
                    key: Some(key.into()),
                    message: "unknown key".into(),
                });
            }
            if value.is_empty() {
                return Err(ConfigError::Parse {
                    line,
                    key: Some(key.into()),
                    message: "missing value".into(),
                });
            }
            if map.insert(key.to_string(), (line, value.to_string())).is_some() {
                return Err(ConfigError::Parse {
                    line,
                    key: Some(key.into()),
                    message: "duplicate key".into(),
                });
            }
        }
        Ok(Self { map })
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn bad(&self, key: &str, message: &str) -> ConfigError {
        let line = self.map.get(key).map_or(0, |(l, _)| *l);
        ConfigError::Parse { line, key: Some(key.into()), message: message.into() }
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.raw(key).map(|(_, v)| v.as_str())
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.str(key)
            .map(|v| v.parse::<f64>().map_err(|_| self.bad(key, "expected a number")))
            .transpose()
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.str(key)
            .map(|v| v.parse::<usize>().map_err(|_| self.bad(key, "expected a nonnegative integer")))
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.str(key)
            .map(|v| {
                v.split(',')
                    .map(|item| item.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| self.bad(key, "expected a comma-separated list of numbers"))
            })
            .transpose()
    }

    fn req_f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.f64(key)?.ok_or_else(|| missing(key))
    }
}

fn missing(key: &str) -> ConfigError {
    ConfigError::Validation(format!("missing required key `{key}`"))
}

fn invalid(e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Validation(e.to_string())
}

fn build_grid(e: &Entries) -> Result<Grid, ConfigError> {
    let x_min = e.req_f64("domain.x_min")?;
    let x_max = e.req_f64("domain.x_max")?;
    let dx = match (e.usize("grid.n_cells")?, e.f64("grid.dx")?) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::Validation(
                "give either `grid.n_cells` or `grid.dx`, not both".into(),
            ))
        }
        (Some(0), None) => return Err(ConfigError::Validation("grid.n_cells must be positive".into())),
        (Some(n), None) => (x_max - x_min) / n as f64,
        (None, Some(dx)) if dx > 0.0 => dx,
        (None, Some(_)) => return Err(ConfigError::Validation("grid.dx must be positive".into())),
        (None, None) => return Err(missing("grid.n_cells")),
    };
    let nl = (-x_min / dx).round();
    let nr = (x_max / dx).round();
    if !(nl >= 1.0 && nr >= 1.0) {
        return Err(ConfigError::Validation(format!(
            "domain [{x_min}, {x_max}] must contain the interface x = 0 with at least one cell per side"
        )));
    }
    Grid::build(x_min, x_max, nl as usize, nr as usize).map_err(invalid)
}

fn build_initial(e: &Entries) -> Result<InitialProfile, ConfigError> {
    let kind = e.str("initial.kind").unwrap_or("riemann");
    let forbid = |keys: &[&str]| -> Result<(), ConfigError> {
        match keys.iter().find(|k| e.has(k)) {
            Some(k) => Err(ConfigError::Validation(format!("`{k}` does not apply to initial.kind = {kind}"))),
            None => Ok(()),
        }
    };
    match kind {
        "riemann" => {
            forbid(&["initial.center", "initial.width", "initial.height", "initial.breaks", "initial.values"])?;
            Ok(InitialProfile::Riemann {
                left: e.req_f64("initial.left")?,
                right: e.req_f64("initial.right")?,
            })
        }
        "bump" => {
            forbid(&["initial.left", "initial.right", "initial.breaks", "initial.values"])?;
            Ok(InitialProfile::Bump {
                center: e.req_f64("initial.center")?,
                width: e.req_f64("initial.width")?,
                height: e.req_f64("initial.height")?,
            })
        }
        "table" => {
            forbid(&["initial.left", "initial.right", "initial.center", "initial.width", "initial.height"])?;
            Ok(InitialProfile::Table {
                breaks: e.list("initial.breaks")?.ok_or_else(|| missing("initial.breaks"))?,
                values: e.list("initial.values")?.ok_or_else(|| missing("initial.values"))?,
            })
        }
        _ => Err(e.bad("initial.kind", "expected riemann, bump or table")),
    }
}

fn build_scenario(e: &Entries) -> Result<(Scenario, Evolution), ConfigError> {
    let grid = build_grid(e)?;
    let velocity = VelocityField::new(e.req_f64("velocity.left")?, e.req_f64("velocity.right")?)
        .map_err(invalid)?;
    let family: KernelFamily = match e.str("kernel.family") {
        Some(f) => f.parse().map_err(|_| e.bad("kernel.family", "expected poly2 or poly4"))?,
        None => KernelFamily::Poly2,
    };
    let model = match e.str("model").unwrap_or("nonlocal") {
        "nonlocal" => FluxModel::NonLocal(Kernel::new(family, e.req_f64("kernel.eta")?).map_err(invalid)?),
        "local" => {
            if let Some(k) = ["kernel.family", "kernel.eta"].iter().find(|k| e.has(k)) {
                return Err(ConfigError::Validation(format!("`{k}` does not apply to model = local")));
            }
            FluxModel::Local
        }
        _ => return Err(e.bad("model", "expected nonlocal or local")),
    };
    let default_solver = match model {
        FluxModel::NonLocal(_) => "upwind",
        FluxModel::Local => "godunov",
    };
    let solver_name = e.str("solver").unwrap_or(default_solver);
    let (solver, evolution) = match solver_name {
        "upwind" => (SolverKind::NonlocalUpwind, Evolution::Solver),
        "godunov" => (SolverKind::LocalGodunov, Evolution::Solver),
        "viscous" => (
            SolverKind::Viscous { epsilon: e.f64("viscous.epsilon")?.ok_or_else(|| missing("viscous.epsilon"))? },
            Evolution::Solver,
        ),
        "frozen" => (
            match model {
                FluxModel::NonLocal(_) => SolverKind::NonlocalUpwind,
                FluxModel::Local => SolverKind::LocalGodunov,
            },
            Evolution::Frozen,
        ),
        _ => return Err(e.bad("solver", "expected upwind, godunov, viscous or frozen")),
    };
    if solver_name != "viscous" && e.has("viscous.epsilon") {
        return Err(ConfigError::Validation("`viscous.epsilon` requires solver = viscous".into()));
    }
    let scenario = Scenario::new(grid, model, velocity, build_initial(e)?, e.req_f64("time.t_end")?, solver);
    Ok((scenario, evolution))
}

fn build_preset(e: &Entries, name: &str) -> Result<Scenario, ConfigError> {
    if let Some(k) = SCENARIO_KEYS.iter().find(|k| e.has(k)) {
        return Err(ConfigError::Validation(format!("`{k}` cannot be combined with `preset`")));
    }
    let dx = e.f64("grid.dx")?.unwrap_or(0.01);
    presets::by_name(name, dx)
        .ok_or_else(|| {
            e.bad("preset", &format!("unknown preset; expected one of {}", presets::PRESET_NAMES.join(", ")))
        })?
        .map_err(invalid)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let e = Entries::parse(text)?;
    let (mut scenario, evolution) = match e.str("preset") {
        Some(name) => (build_preset(&e, name)?, Evolution::Solver),
        None => build_scenario(&e)?,
    };
    if let Some(cfl) = e.f64("time.cfl")? {
        scenario = scenario.with_cfl(cfl);
    }
    if let Some(delta) = e.f64("diagnostics.tv_delta")? {
        if !(delta >= 0.0) {
            return Err(ConfigError::Validation("diagnostics.tv_delta must be nonnegative".into()));
        }
        scenario = scenario.with_tv_delta(delta);
    }
    let plan = match (e.list("output.snapshot_times")?, e.f64("output.snapshot_interval")?) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::Validation(
                "give either `output.snapshot_times` or `output.snapshot_interval`, not both".into(),
            ))
        }
        (Some(times), None) => SnapshotPlan::Times(times),
        (None, Some(dt)) if dt > 0.0 => {
            let count = (scenario.t_end / dt + 1e-9).floor() as usize;
            SnapshotPlan::Times((1..=count).map(|k| k as f64 * dt).collect())
        }
        (None, Some(_)) => {
            return Err(ConfigError::Validation("output.snapshot_interval must be positive".into()))
        }
        (None, None) => SnapshotPlan::Final,
    };
    scenario = scenario.with_snapshots(plan);
    let warnings = scenario.validate().map_err(invalid)?;

    let viscosity_epsilons = e.list("viscosity.epsilons")?.unwrap_or_else(|| vec![0.1, 0.05, 0.025, 0.0125]);
    let refine_levels = e.usize("refine.levels")?.unwrap_or(4);
    if refine_levels < 3 {
        return Err(ConfigError::Validation("refine.levels must be at least 3".into()));
    }
    let perturbation = InitialProfile::Bump {
        center: e.f64("stability.center")?.unwrap_or(-0.5),
        width: e.f64("stability.width")?.unwrap_or(0.2),
        height: e.f64("stability.height")?.unwrap_or(0.05),
    };
    perturbation.validate().map_err(invalid)?;
    let trace_cells = e.usize("verify.trace_cells")?.unwrap_or(2);
    if trace_cells == 0 {
        return Err(ConfigError::Validation("verify.trace_cells must be positive".into()));
    }

    Ok(RunConfig {
        evolution,
        warnings,
        output_dir: e.str("output.dir").map(PathBuf::from),
        viscosity_epsilons,
        refine_levels,
        perturbation,
        entropy_c: e.f64("verify.entropy_c")?.unwrap_or(0.5),
        trace_cells,
        trace_tol: e
            .f64("verify.trace_tol")?
            .unwrap_or(TRACE_TOL_PER_CELL * scenario.velocity.v_right() * scenario.grid.dx()),
        corpus_size: e.usize("verify.corpus_size")?.unwrap_or(20),
        scenario,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
domain.x_min = -1.5
domain.x_max = 1.5
grid.n_cells = 300
velocity.left = 1
velocity.right = 2
kernel.eta = 0.25
initial.left = 0.25
initial.right = 0.77
time.t_end = 0.5
";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.scenario.cfl, 0.5);
        assert_eq!(c.scenario.kernel().unwrap().family(), KernelFamily::Poly2);
        assert!((c.scenario.tv_delta() - 5.0 * 0.01).abs() < 1e-15);
        assert_eq!(c.scenario.solver, SolverKind::NonlocalUpwind);
        assert_eq!(c.scenario.grid.interface_index(), 150);
        assert_eq!(c.evolution, Evolution::Solver);
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn negative_left_speed_is_a_validation_error() {
        let text = MINIMAL.replace("velocity.left = 1", "velocity.left = -1");
        match parse_config(&text) {
            Err(ConfigError::Validation(m)) => assert!(m.contains("v_left must be positive"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let text = format!("{MINIMAL}viscocity = 0.1\n");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(
            err,
            ConfigError::Parse { line: 10, key: Some("viscocity".into()), message: "unknown key".into() }
        );
        assert!(err.to_string().contains("viscocity"));
    }

    #[test]
    fn malformed_lines_and_values() {
        assert!(matches!(parse_config("just words"), Err(ConfigError::Parse { line: 1, key: None, .. })));
        let text = MINIMAL.replace("kernel.eta = 0.25", "kernel.eta = quarter");
        assert!(matches!(parse_config(&text), Err(ConfigError::Parse { line: 6, .. })));
        let text = format!("{MINIMAL}time.t_end = 1\n");
        assert!(matches!(parse_config(&text), Err(ConfigError::Parse { line: 10, .. })));
    }

    #[test]
    fn presets_and_conflicts() {
        let c = parse_config("preset = counterexample\ngrid.dx = 0.005\n").unwrap();
        assert_eq!(c.scenario.model, FluxModel::Local);
        assert_eq!(c.warnings.len(), 1);
        assert!(matches!(
            parse_config("preset = counterexample\nvelocity.left = 1\n"),
            Err(ConfigError::Validation(_))
        ));
        assert!(matches!(parse_config("preset = nope\n"), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn snapshot_interval_expands_to_times() {
        let c = parse_config(&format!("{MINIMAL}output.snapshot_interval = 0.125\n")).unwrap();
        assert_eq!(c.scenario.snapshots, SnapshotPlan::Times(vec![0.125, 0.25, 0.375, 0.5]));
    }

    #[test]
    fn table_and_local_configs() {
        let text = "\
domain.x_min = -1
domain.x_max = 1
grid.dx = 0.01
velocity.left = 1
velocity.right = 1
model = local
initial.kind = table
initial.breaks = -0.5, 0
initial.values = 0, 0.8, 0.2
time.t_end = 0.5
solver = frozen
";
        let c = parse_config(text).unwrap();
        assert_eq!(c.evolution, Evolution::Frozen);
        assert_eq!(c.scenario.solver, SolverKind::LocalGodunov);
        let bad = text.replace("model = local", "model = local\nkernel.eta = 0.2");
        assert!(matches!(parse_config(&bad), Err(ConfigError::Validation(_))));
    }
}
