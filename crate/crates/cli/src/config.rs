//! Run configuration: INI parsing, validation and emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::{Ini, ParseOption, Properties};
use pwshift_core::potential::{Coulomb, Masses, PotentialSpec, ScatteringScenario, SphericalStep};
use pwshift_core::shifts::LRange;
use pwshift_core::{QuadratureSpec, WavepacketSpec};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassInput {
    Pair { m_target: f64, m_projectile: f64 },
    Reduced(f64),
}

impl MassInput {
    pub fn reduced_mass(&self) -> f64 {
        match *self {
            MassInput::Pair { m_target, m_projectile } => Masses { m_target, m_projectile }.reduced_mass(),
            MassInput::Reduced(mu) => mu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub masses: MassInput,
    /// Incident momentum, MeV.
    pub p: f64,
    pub z_target: i32,
    pub z_projectile: i32,
    /// Step height, MeV; negative for a well.
    pub v0: f64,
    /// Step radius, fm.
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LMax {
    Auto,
    Fixed(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub l_max: LMax,
    pub epsilon: f64,
    pub theta_points: usize,
    pub rel_tol: f64,
    /// Kernel strategy by registry name; default picks one from the basis.
    pub kernel: Option<String>,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            l_max: LMax::Auto,
            epsilon: WavepacketSpec::default().epsilon,
            theta_points: 600,
            rel_tol: QuadratureSpec::default().rel_tol,
            kernel: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    Gnuplot,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Gnuplot => "gnuplot",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("."),
            formats: vec![OutputFormat::Csv],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub run: RunSettings,
    pub outputs: OutputSettings,
}

const SCENARIO_KEYS: [&str; 8] = [
    "m_target",
    "m_projectile",
    "reduced_mass",
    "p",
    "z_target",
    "z_projectile",
    "v0",
    "radius",
];
const RUN_KEYS: [&str; 5] = ["l_max", "epsilon", "theta_points", "rel_tol", "kernel"];
const OUTPUT_KEYS: [&str; 2] = ["directory", "formats"];

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Typed access to one INI section, with `section.key` field names in errors.
struct Section<'a> {
    name: &'static str,
    props: Option<&'a Properties>,
}

impl Section<'_> {
    fn field(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.props.and_then(|p| p.get(key)).map(str::trim)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| invalid(&self.field(key), format!("cannot parse '{s}'"))),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.parse(key)?.ok_or_else(|| invalid(&self.field(key), "missing"))
    }

    fn positive(&self, key: &str, value: f64) -> Result<f64, CliError> {
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(invalid(&self.field(key), format!("must be positive and finite, got {value}")))
        }
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), CliError> {
        if let Some(props) = self.props {
            for (key, _) in props.iter() {
                if !allowed.contains(&key) {
                    return Err(invalid(&self.field(key), "unknown key"));
                }
            }
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let opt = ParseOption {
            enabled_escape: false,
            ..ParseOption::default()
        };
        let ini = Ini::load_from_str_opt(text, opt).map_err(|e| invalid("<syntax>", e.to_string()))?;
        for name in ini.sections().flatten() {
            if !["scenario", "run", "outputs"].contains(&name) {
                return Err(invalid(name, "unknown section"));
            }
        }
        if ini.general_section().iter().next().is_some() {
            return Err(invalid("<global>", "keys must appear inside a section"));
        }
        let section = |name: &'static str| Section {
            name,
            props: ini.section(Some(name)),
        };
        let (scenario, run, outputs) = (section("scenario"), section("run"), section("outputs"));
        if scenario.props.is_none() {
            return Err(invalid("scenario", "missing section"));
        }
        scenario.reject_unknown(&SCENARIO_KEYS)?;
        run.reject_unknown(&RUN_KEYS)?;
        outputs.reject_unknown(&OUTPUT_KEYS)?;
        Ok(Self {
            scenario: parse_scenario(&scenario)?,
            run: parse_run(&run)?,
            outputs: parse_outputs(&outputs)?,
        })
    }

    /// Canonical INI text; `parse(emit())` reproduces `self`.
    pub fn emit(&self) -> String {
        let mut out = String::from("[scenario]\n");
        let s = &self.scenario;
        match s.masses {
            MassInput::Pair { m_target, m_projectile } => {
                let _ = writeln!(out, "m_target = {m_target:?}\nm_projectile = {m_projectile:?}");
            }
            MassInput::Reduced(mu) => {
                let _ = writeln!(out, "reduced_mass = {mu:?}");
            }
        }
        let _ = writeln!(
            out,
            "p = {:?}\nz_target = {}\nz_projectile = {}\nv0 = {:?}\nradius = {:?}",
            s.p, s.z_target, s.z_projectile, s.v0, s.radius
        );
        out.push_str("\n[run]\n");
        let r = &self.run;
        match r.l_max {
            LMax::Auto => out.push_str("l_max = auto\n"),
            LMax::Fixed(l) => {
                let _ = writeln!(out, "l_max = {l}");
            }
        }
        let _ = writeln!(
            out,
            "epsilon = {:?}\ntheta_points = {}\nrel_tol = {:?}",
            r.epsilon, r.theta_points, r.rel_tol
        );
        if let Some(k) = &r.kernel {
            let _ = writeln!(out, "kernel = {k}");
        }
        out.push_str("\n[outputs]\n");
        let formats: Vec<&str> = self.outputs.formats.iter().map(|f| f.name()).collect();
        let _ = writeln!(
            out,
            "directory = {}\nformats = {}",
            self.outputs.directory.display(),
            formats.join(", ")
        );
        out
    }

    pub fn potential(&self) -> Result<PotentialSpec, CliError> {
        let s = &self.scenario;
        let step = SphericalStep::from_mev_fm(s.v0, s.radius).map_err(|e| invalid("scenario.radius", e.to_string()))?;
        let coulomb = Coulomb {
            z_target: s.z_target,
            z_projectile: s.z_projectile,
        };
        Ok(match (coulomb.coupling() != 0.0, s.v0 != 0.0) {
            (true, true) => PotentialSpec::Composite {
                coulomb,
                short_range: step,
            },
            (true, false) => PotentialSpec::Coulomb(coulomb),
            (false, _) => PotentialSpec::SphericalStep(step),
        })
    }

    pub fn scenario(&self) -> Result<ScatteringScenario, CliError> {
        Ok(ScatteringScenario::new(
            self.potential()?,
            self.scenario.masses.reduced_mass(),
            self.scenario.p,
        )?)
    }

    pub fn l_range(&self) -> LRange {
        match self.run.l_max {
            LMax::Auto => LRange::Auto,
            LMax::Fixed(l) => LRange::Upto(l),
        }
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec::with_rel_tol(self.run.rel_tol)
    }

    pub fn wavepacket(&self) -> Result<WavepacketSpec, CliError> {
        WavepacketSpec::new(self.run.epsilon).map_err(|e| invalid("run.epsilon", e.to_string()))
    }
}

fn parse_scenario(sec: &Section<'_>) -> Result<ScenarioConfig, CliError> {
    let m_target: Option<f64> = sec.parse("m_target")?;
    let m_projectile: Option<f64> = sec.parse("m_projectile")?;
    let reduced: Option<f64> = sec.parse("reduced_mass")?;
    let masses = match (m_target, m_projectile, reduced) {
        (Some(t), Some(p), None) => MassInput::Pair {
            m_target: sec.positive("m_target", t)?,
            m_projectile: sec.positive("m_projectile", p)?,
        },
        (None, None, Some(mu)) => MassInput::Reduced(sec.positive("reduced_mass", mu)?),
        (None, None, None) => {
            return Err(invalid(
                "scenario.reduced_mass",
                "give either reduced_mass or both m_target and m_projectile",
            ))
        }
        (_, _, Some(_)) => {
            return Err(invalid(
                "scenario.reduced_mass",
                "conflicts with m_target/m_projectile; give exactly one form",
            ))
        }
        (None, Some(_), None) => return Err(invalid("scenario.m_target", "missing (m_projectile is set)")),
        (Some(_), None, None) => return Err(invalid("scenario.m_projectile", "missing (m_target is set)")),
    };
    let z_target: i32 = sec.required("z_target")?;
    let z_projectile: i32 = sec.required("z_projectile")?;
    if z_target < 0 {
        return Err(invalid("scenario.z_target", "must not be negative"));
    }
    if z_projectile < 0 {
        return Err(invalid("scenario.z_projectile", "must not be negative"));
    }
    let v0: f64 = sec.required("v0")?;
    if !v0.is_finite() {
        return Err(invalid("scenario.v0", "must be finite"));
    }
    Ok(ScenarioConfig {
        masses,
        p: sec.positive("p", sec.required("p")?)?,
        z_target,
        z_projectile,
        v0,
        radius: sec.positive("radius", sec.required("radius")?)?,
    })
}

fn parse_run(sec: &Section<'_>) -> Result<RunSettings, CliError> {
    let defaults = RunSettings::default();
    let l_max = match sec.raw("l_max") {
        None => defaults.l_max,
        Some(s) if s.eq_ignore_ascii_case("auto") => LMax::Auto,
        Some(_) => LMax::Fixed(sec.required("l_max")?),
    };
    let epsilon = sec.parse("epsilon")?.unwrap_or(defaults.epsilon);
    WavepacketSpec::new(epsilon).map_err(|e| invalid("run.epsilon", e.to_string()))?;
    let theta_points: usize = sec.parse("theta_points")?.unwrap_or(defaults.theta_points);
    if theta_points < 2 {
        return Err(invalid("run.theta_points", format!("need at least 2, got {theta_points}")));
    }
    let rel_tol = sec.parse("rel_tol")?.unwrap_or(defaults.rel_tol);
    QuadratureSpec::with_rel_tol(rel_tol)
        .validate()
        .map_err(|e| invalid("run.rel_tol", e.to_string()))?;
    let kernel = sec.raw("kernel").filter(|s| !s.is_empty()).map(str::to_string);
    Ok(RunSettings {
        l_max,
        epsilon,
        theta_points,
        rel_tol,
        kernel,
    })
}

fn parse_outputs(sec: &Section<'_>) -> Result<OutputSettings, CliError> {
    let defaults = OutputSettings::default();
    let directory = sec.raw("directory").map_or(defaults.directory, PathBuf::from);
    let formats = match sec.raw("formats") {
        None => defaults.formats,
        Some(list) => {
            let mut formats = Vec::new();
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let f = match item {
                    "csv" => OutputFormat::Csv,
                    "gnuplot" => OutputFormat::Gnuplot,
                    other => {
                        return Err(invalid(
                            "outputs.formats",
                            format!("unknown format '{other}' (expected csv, gnuplot)"),
                        ))
                    }
                };
                if !formats.contains(&f) {
                    formats.push(f);
                }
            }
            formats.sort();
            if formats.is_empty() {
                return Err(invalid("outputs.formats", "empty list"));
            }
            formats
        }
    };
    Ok(OutputSettings { directory, formats })
}
