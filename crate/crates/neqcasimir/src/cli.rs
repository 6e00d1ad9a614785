//! Scenario files, sweep output, zero crossings and physical comparison scales.

use crate::engine::{self, EngineError, EquilibriumTable, ForceBreakdown, QuadratureControls, System};
use crate::materials::{CylinderSpec, MaterialError, MaterialFile};
use crate::reference::log_grid;
use crate::tmatrix::{ProviderKind, THIN_WARNING_X};
use crate::units::{self, C_LIGHT, HBAR, K_B, MU_0, STANDARD_GRAVITY};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Relative bracket width at which zero-crossing bisection stops.
pub const ZERO_REL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{source_name}: line {line}, column {column}: {message}")]
    Schema { source_name: String, line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl CliError {
    /// Process exit code: 2 for invalid input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(EngineError::NonConvergence { .. }) | CliError::Engine(EngineError::Kernel(_)) => 3,
            _ => 2,
        }
    }

    fn field(field: &str, message: impl Into<String>) -> Self {
        CliError::Field { field: field.to_string(), message: message.into() }
    }
}

/// A number with an explicit unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

impl Quantity {
    fn length(&self, field: &str) -> Result<f64, CliError> {
        units::length_factor(&self.unit)
            .map(|f| f * self.value)
            .ok_or_else(|| CliError::field(field, format!("unknown length unit `{}`", self.unit)))
    }

    fn temperature(&self, field: &str) -> Result<f64, CliError> {
        let t = units::temperature_to_kelvin(self.value, &self.unit)
            .ok_or_else(|| CliError::field(field, format!("unknown temperature unit `{}`", self.unit)))?;
        if !(t >= 0.0) || !t.is_finite() {
            return Err(CliError::field(field, format!("temperature must be >= 0 K, got {t} K")));
        }
        Ok(t)
    }
}

/// Material given as a path (relative to the scenario file) or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialRef {
    Path(String),
    Inline(MaterialFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderInput {
    pub radius: Quantity,
    pub material: MaterialRef,
    #[serde(default)]
    pub temperature: Option<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseInput {
    #[serde(default)]
    pub label: Option<String>,
    pub t1: Quantity,
    pub t2: Quantity,
}

/// Separations as explicit `values` or as a `start`/`stop`/`points` log grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridInput {
    pub unit: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumInput {
    /// CSV with header `d_m,F_eq_N_per_m`, relative to the scenario file.
    pub file: String,
    #[serde(default)]
    pub extrapolate: bool,
}

/// Scenario file as written by users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioInput {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub provider: ProviderKind,
    pub cylinder1: CylinderInput,
    pub cylinder2: CylinderInput,
    pub environment_temperature: Quantity,
    #[serde(default)]
    pub cases: Option<Vec<CaseInput>>,
    pub separations: GridInput,
    #[serde(default)]
    pub controls: QuadratureControls,
    #[serde(default)]
    pub equilibrium: Option<EquilibriumInput>,
    #[serde(default)]
    pub output: Option<String>,
}

/// Cylinder temperatures for one curve of a scenario (K).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureCase {
    pub label: String,
    pub t1: f64,
    pub t2: f64,
}

/// Fully resolved scenario in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub description: Option<String>,
    /// Cylinder temperatures here are those of the first case.
    pub system: System,
    pub cases: Vec<TemperatureCase>,
    pub d_grid: Vec<f64>,
    pub controls: QuadratureControls,
    pub equilibrium: Option<EquilibriumTable>,
    pub output: Option<String>,
}

fn schema_error(source_name: &str, e: serde_json::Error) -> CliError {
    CliError::Schema { source_name: source_name.to_string(), line: e.line(), column: e.column(), message: e.to_string() }
}

fn case_label(t1: f64, t2: f64) -> String {
    format!("T1={t1}K T2={t2}K")
}

impl ScenarioInput {
    pub fn parse(text: &str, source_name: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| schema_error(source_name, e))
    }

    /// Converts units, loads referenced files relative to `base_dir` and validates.
    pub fn resolve(&self, base_dir: &Path) -> Result<Scenario, CliError> {
        let cylinder = |c: &CylinderInput, which: &str| -> Result<(f64, crate::materials::DielectricModel), CliError> {
            let radius = c.radius.length(&format!("{which}.radius"))?;
            if !(radius > 0.0) || !radius.is_finite() {
                return Err(CliError::field(&format!("{which}.radius"), "radius must be positive"));
            }
            let file = match &c.material {
                MaterialRef::Path(p) => MaterialFile::load(&base_dir.join(p))?,
                MaterialRef::Inline(m) => m.clone(),
            };
            Ok((radius, file.to_model()?))
        };
        let (r1, m1) = cylinder(&self.cylinder1, "cylinder1")?;
        let (r2, m2) = cylinder(&self.cylinder2, "cylinder2")?;
        let t_env = self.environment_temperature.temperature("environment_temperature")?;

        let cases = match &self.cases {
            Some(list) => {
                if list.is_empty() {
                    return Err(CliError::field("cases", "must not be empty"));
                }
                list.iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let t1 = c.t1.temperature(&format!("cases[{i}].t1"))?;
                        let t2 = c.t2.temperature(&format!("cases[{i}].t2"))?;
                        let label = c.label.clone().unwrap_or_else(|| case_label(t1, t2));
                        Ok(TemperatureCase { label, t1, t2 })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?
            }
            None => {
                let temp = |c: &CylinderInput, which: &str| -> Result<f64, CliError> {
                    c.temperature
                        .as_ref()
                        .ok_or_else(|| CliError::field(&format!("{which}.temperature"), "required when `cases` is absent"))?
                        .temperature(&format!("{which}.temperature"))
                };
                let t1 = temp(&self.cylinder1, "cylinder1")?;
                let t2 = temp(&self.cylinder2, "cylinder2")?;
                vec![TemperatureCase { label: case_label(t1, t2), t1, t2 }]
            }
        };
        let mut labels: Vec<&str> = cases.iter().map(|c| c.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::field("cases", "labels must be unique"));
        }

        let d_grid = self.separations.resolve()?;
        if d_grid[0] <= r1 + r2 {
            return Err(CliError::field(
                "separations",
                format!("smallest separation {:e} m must exceed R1 + R2 = {:e} m", d_grid[0], r1 + r2),
            ));
        }
        self.controls.validate().map_err(|e| CliError::field("controls", e.to_string()))?;

        let equilibrium = match &self.equilibrium {
            Some(eq) => {
                let path = base_dir.join(&eq.file);
                let table = EquilibriumTable::load(&path)?.with_extrapolation(eq.extrapolate);
                for &d in &d_grid {
                    table.value_at(d)?;
                }
                Some(table)
            }
            None => None,
        };

        let system = System {
            cylinder1: CylinderSpec::new(r1, m1, cases[0].t1)?,
            cylinder2: CylinderSpec::new(r2, m2, cases[0].t2)?,
            t_env,
            provider: self.provider,
        };
        Ok(Scenario {
            name: self.name.clone(),
            description: self.description.clone(),
            system,
            cases,
            d_grid,
            controls: self.controls,
            equilibrium,
            output: self.output.clone(),
        })
    }
}

impl GridInput {
    fn resolve(&self) -> Result<Vec<f64>, CliError> {
        let factor = units::length_factor(&self.unit)
            .ok_or_else(|| CliError::field("separations.unit", format!("unknown length unit `{}`", self.unit)))?;
        let raw = match (&self.values, self.start, self.stop, self.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                if !(a > 0.0 && b > a) || n < 2 {
                    return Err(CliError::field("separations", "need 0 < start < stop and points >= 2"));
                }
                log_grid(a, b, n)
            }
            _ => {
                return Err(CliError::field(
                    "separations",
                    "give either `values` or all of `start`, `stop`, `points`",
                ))
            }
        };
        if raw.is_empty() {
            return Err(CliError::field("separations", "no separations given"));
        }
        let grid: Vec<f64> = raw.iter().map(|v| v * factor).collect();
        if grid.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(CliError::field("separations", "separations must be positive and finite"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::field("separations", "separations must be strictly increasing"));
        }
        Ok(grid)
    }
}

impl Scenario {
    /// Reads and resolves a scenario file; relative paths inside it are taken
    /// from the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        ScenarioInput::parse(&text, &path.display().to_string())?.resolve(&base)
    }

    pub fn with_provider(mut self, provider: ProviderKind) -> Self {
        self.system.provider = provider;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Result<Self, CliError> {
        self.controls.rel_tol = rel_tol;
        self.controls.validate().map_err(|e| CliError::field("rel_tol", e.to_string()))?;
        Ok(self)
    }

    pub fn system_for(&self, case: &TemperatureCase) -> System {
        System {
            cylinder1: self.system.cylinder1.with_temperature(case.t1),
            cylinder2: self.system.cylinder2.with_temperature(case.t2),
            ..self.system.clone()
        }
    }

    pub fn equilibrium_at(&self, d: f64) -> Result<f64, CliError> {
        match &self.equilibrium {
            Some(t) => Ok(t.value_at(d)?),
            None => Ok(0.0),
        }
    }

    pub fn case(&self, label: &str) -> Option<&TemperatureCase> {
        self.cases.iter().find(|c| c.label == label)
    }

    /// Force breakdown for one case at one separation.
    pub fn evaluate(&self, case: &TemperatureCase, d: f64) -> Result<ForceBreakdown, CliError> {
        let f_eq = self.equilibrium_at(d)?;
        Ok(engine::total_force(&self.system_for(case), d, f_eq, &self.controls)?)
    }
}

/// One output row: a case at one separation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub case: TemperatureCase,
    pub t_env: f64,
    pub breakdown: ForceBreakdown,
}

/// Validity warnings for a whole scenario: separations below `5 (R1 + R2)`
/// and thin-expansion size parameters above [`THIN_WARNING_X`].
pub fn scenario_warnings(scenario: &Scenario) -> Vec<String> {
    let mut out = Vec::new();
    let (r1, r2) = (scenario.system.cylinder1.radius, scenario.system.cylinder2.radius);
    let close = scenario.d_grid.iter().filter(|&&d| d < 5.0 * (r1 + r2)).count();
    if close > 0 {
        out.push(format!(
            "{close} separation(s) below 5 (R1 + R2) = {:e} m; the one-reflection approximation may be inaccurate there",
            5.0 * (r1 + r2)
        ));
    }
    if scenario.system.provider == ProviderKind::Thin {
        let t_max = scenario.cases.iter().fold(scenario.system.t_env, |m, c| m.max(c.t1).max(c.t2));
        let x = scenario.controls.x_max * K_B * t_max / HBAR * r1.max(r2) / C_LIGHT;
        if x > THIN_WARNING_X {
            out.push(format!("thin-cylinder expansion used up to size parameter {x:.3} (> {THIN_WARNING_X})"));
        }
    }
    out
}

/// Evaluates every case over the separation grid; rows are ordered by case, then `d`.
pub fn run(scenario: &Scenario) -> Result<Vec<SweepRow>, CliError> {
    for w in scenario_warnings(scenario) {
        log::warn!("{}: {w}", scenario.name);
    }
    let mut rows = Vec::with_capacity(scenario.cases.len() * scenario.d_grid.len());
    for case in &scenario.cases {
        log::info!("{}: case {} over {} separations", scenario.name, case.label, scenario.d_grid.len());
        let system = scenario.system_for(case);
        let out = engine::sweep(&system, &scenario.d_grid, scenario.equilibrium.as_ref(), &scenario.controls)?;
        rows.extend(out.into_iter().map(|breakdown| SweepRow {
            case: case.clone(),
            t_env: scenario.system.t_env,
            breakdown,
        }));
    }
    Ok(rows)
}

/// `"repulsive"`, `"attractive"` or `"zero"` for a force that is positive when repulsive.
pub fn sign_label(repulsive_positive: f64) -> &'static str {
    if repulsive_positive > 0.0 {
        "repulsive"
    } else if repulsive_positive < 0.0 {
        "attractive"
    } else {
        "zero"
    }
}

/// Output CSV columns.
pub const CSV_COLUMNS: [&str; 28] = [
    "d_m",
    "F1_total",
    "F2_total",
    "F1_int",
    "F1_self",
    "F1_env_subtraction",
    "F_eq",
    "F2_int",
    "F2_self",
    "F2_env_subtraction",
    "F1_int_prop",
    "F1_int_evan",
    "F1_self_prop",
    "F1_self_evan",
    "F1_env_prop",
    "F1_env_evan",
    "F2_int_prop",
    "F2_int_evan",
    "F2_self_prop",
    "F2_self_evan",
    "F1_pair_source",
    "F2_pair_source",
    "error_estimate",
    "F1_sign",
    "F2_sign",
    "case",
    "T1_K",
    "T2_K",
];

/// Extra trailing column after [`CSV_COLUMNS`].
const CSV_TAIL: &str = "T_env_K";

fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.10e}")
}

/// Renders rows as CSV preceded by the resolved scenario as `#`-prefixed JSON.
/// All `F1_*` columns are positive when pushing cylinder 1 away from cylinder
/// 2; `F2_*` columns use the same axis, so repulsion of cylinder 2 is negative.
pub fn to_csv(scenario: &Scenario, rows: &[SweepRow]) -> Result<String, CliError> {
    let json = serde_json::to_string_pretty(scenario).map_err(|e| CliError::field("scenario", e.to_string()))?;
    let mut out = String::new();
    for line in json.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&CSV_COLUMNS.join(","));
    out.push(',');
    out.push_str(CSV_TAIL);
    out.push('\n');
    for row in rows {
        let b = &row.breakdown;
        let flip = |c: engine::Channels| engine::Channels { propagating: -c.propagating, evanescent: -c.evanescent };
        let f2_int = flip(b.int_12);
        let f2_self = flip(b.self_2);
        let f2_env = flip(b.env_2);
        let numbers = [
            b.d,
            b.total_1,
            b.total_2,
            b.int_21.total(),
            b.self_1.total(),
            b.env_1.total(),
            b.eq,
            f2_int.total(),
            f2_self.total(),
            f2_env.total(),
            b.int_21.propagating,
            b.int_21.evanescent,
            b.self_1.propagating,
            b.self_1.evanescent,
            b.env_1.propagating,
            b.env_1.evanescent,
            f2_int.propagating,
            f2_int.evanescent,
            f2_self.propagating,
            f2_self.evanescent,
            b.pair_source_1,
            -b.pair_source_2,
            b.error,
        ];
        let mut fields: Vec<String> = numbers.iter().map(|v| num(*v)).collect();
        fields.push(sign_label(b.total_1).to_string());
        fields.push(sign_label(-b.total_2).to_string());
        fields.push(csv_text(&row.case.label));
        fields.push(row.case.t1.to_string());
        fields.push(row.case.t2.to_string());
        fields.push(row.t_env.to_string());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Quotes a CSV field when needed.
pub fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Minimal view of an output row needed for zero finding.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRow {
    pub case: String,
    pub d: f64,
    pub f1_total: f64,
    pub f2_total: f64,
}

/// Parses a CSV written by [`to_csv`], returning the embedded scenario and rows.
pub fn parse_output(text: &str, source_name: &str) -> Result<(Scenario, Vec<OutputRow>), CliError> {
    let json: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.strip_prefix("# ").unwrap_or(&l[1..]))
        .collect::<Vec<_>>()
        .join("\n");
    if json.is_empty() {
        return Err(CliError::field("header", format!("{source_name}: no embedded scenario")));
    }
    let scenario: Scenario = serde_json::from_str(&json).map_err(|e| schema_error(source_name, e))?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| CliError::field("header", e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::field("header", format!("{source_name}: missing column `{name}`")))
    };
    let (i_d, i_1, i_2, i_case) = (col("d_m")?, col("F1_total")?, col("F2_total")?, col("case")?);
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::field("rows", e.to_string()))?;
        let get = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::field(&headers[i], format!("{source_name}: data row {}: not a number", k + 1)))
        };
        rows.push(OutputRow {
            case: rec.get(i_case).unwrap_or_default().to_string(),
            d: get(i_d)?,
            f1_total: get(i_1)?,
            f2_total: get(i_2)?,
        });
    }
    Ok((scenario, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

/// A bracketed root of the net force on one cylinder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCrossing {
    pub case: String,
    /// Separation of the root (m), the midpoint of the final bracket.
    pub d: f64,
    pub stability: Stability,
    /// Final bracket `[d-, d+]` and the repulsion-positive force at its ends.
    pub bracket: (f64, f64),
    pub force_at_bracket: (f64, f64),
}

/// Which cylinder's force to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    Cylinder1,
    Cylinder2,
}

impl Target {
    /// Force on the target that is positive when repulsive.
    pub fn repulsive_force(self, f1_total: f64, f2_total: f64) -> f64 {
        match self {
            Target::Cylinder1 => f1_total,
            Target::Cylinder2 => -f2_total,
        }
    }
}

/// Indices `i` where the sampled force changes sign between `i` and the next
/// non-zero sample `j`; exact zeros are skipped.
pub fn sign_changes(force: &[f64]) -> Vec<(usize, usize)> {
    let nonzero: Vec<usize> = (0..force.len()).filter(|&i| force[i] != 0.0 && force[i].is_finite()).collect();
    nonzero
        .windows(2)
        .filter(|w| (force[w[0]] > 0.0) != (force[w[1]] > 0.0))
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Bisects a sign change of `f` on `[lo, hi]` until the bracket is narrower than `rel_tol * lo`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, mut f_lo: f64, mut f_hi: f64, rel_tol: f64) -> Result<((f64, f64), (f64, f64)), CliError>
where
    F: FnMut(f64) -> Result<f64, CliError>,
{
    while hi - lo > rel_tol * lo {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(((mid, mid), (0.0, 0.0)));
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    Ok(((lo, hi), (f_lo, f_hi)))
}

/// Classifies a crossing from repulsion-positive force values below and above the root:
/// repulsion below and attraction above restore displacements.
pub fn classify(below: f64, above: f64) -> Stability {
    if below > 0.0 && above <= 0.0 || below >= 0.0 && above < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

/// Zero crossings of the sampled force for each case in `rows`, refined by
/// bisection on the engine to relative width [`ZERO_REL_TOL`] in `d`.
pub fn find_zeros(scenario: &Scenario, rows: &[OutputRow], target: Target) -> Result<Vec<ZeroCrossing>, CliError> {
    let mut out = Vec::new();
    for case in &scenario.cases {
        let mut pts: Vec<&OutputRow> = rows.iter().filter(|r| r.case == case.label).collect();
        pts.sort_by(|a, b| a.d.total_cmp(&b.d));
        let d: Vec<f64> = pts.iter().map(|r| r.d).collect();
        let f: Vec<f64> = pts.iter().map(|r| target.repulsive_force(r.f1_total, r.f2_total)).collect();
        for (i, j) in sign_changes(&f) {
            let eval = |x: f64| -> Result<f64, CliError> {
                let b = scenario.evaluate(case, x)?;
                Ok(target.repulsive_force(b.total_1, b.total_2))
            };
            let (bracket, values) = bisect(eval, d[i], d[j], f[i], f[j], ZERO_REL_TOL)?;
            out.push(ZeroCrossing {
                case: case.label.clone(),
                d: 0.5 * (bracket.0 + bracket.1),
                stability: classify(f[i], f[j]),
                bracket,
                force_at_bracket: values,
            });
        }
    }
    Ok(out)
}

/// Weight per unit length `rho pi R^2 g` (N/m) of a cylinder of density `rho` (kg/m^3).
pub fn weight_per_length(density: f64, radius: f64) -> Result<f64, CliError> {
    if !(density >= 0.0) || !density.is_finite() {
        return Err(CliError::field("density", format!("must be >= 0, got {density}")));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(CliError::field("radius", format!("must be >= 0, got {radius}")));
    }
    Ok(density * PI * radius * radius * STANDARD_GRAVITY)
}

/// Magnetic force per unit length `mu0 I1 I2 / (2 pi d)` (N/m) between
/// parallel wires; positive values are attractive (parallel currents).
pub fn ampere_force_per_length(i1: f64, i2: f64, d: f64) -> Result<f64, CliError> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(CliError::field("d", format!("must be positive, got {d}")));
    }
    if !i1.is_finite() || !i2.is_finite() {
        return Err(CliError::field("current", "must be finite"));
    }
    Ok(MU_0 * i1 * i2 / (2.0 * PI * d))
}

/// Parses `"<number><unit>"` (e.g. `20nm`, `0.4 um`, `17uA`) into SI, given
/// the accepted unit suffixes and their factors.
pub fn parse_quantity(text: &str, unit_table: &[(&str, f64)]) -> Result<f64, CliError> {
    let t = text.trim();
    for (suffix, factor) in unit_table {
        if let Some(num) = t.strip_suffix(suffix) {
            if let Ok(v) = num.trim().parse::<f64>() {
                return Ok(v * factor);
            }
        }
    }
    let accepted: Vec<&str> = unit_table.iter().map(|(s, _)| *s).collect();
    Err(CliError::field(
        "quantity",
        format!("cannot parse `{text}`; expected a number followed by one of {}", accepted.join(", ")),
    ))
}

/// Length suffixes accepted by [`parse_quantity`], longest first.
pub const LENGTH_UNITS: [(&str, f64); 5] = [("nm", 1e-9), ("um", 1e-6), ("µm", 1e-6), ("mm", 1e-3), ("m", 1.0)];
/// Current suffixes accepted by [`parse_quantity`], longest first.
pub const CURRENT_UNITS: [(&str, f64); 5] = [("nA", 1e-9), ("uA", 1e-6), ("µA", 1e-6), ("mA", 1e-3), ("A", 1.0)];
