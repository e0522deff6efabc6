//! Sectioned key-value experiment configuration.
//!
//! ```text
//! # comment
//! [grid]
//! d = 2
//! n = 128
//! [physics]
//! kappa = 100, 1000, 10000
//! ```
//!
//! Unknown sections and keys are errors. Lists are comma separated; Besov
//! descriptors are `s,p,r` triples separated by `;`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{NskError, Result};
use crate::littlewood_paley::{fmt_exp, BesovParams};
use crate::model::{MaterialLaws, Poly};
use crate::spectral::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    SweepKappa,
    Decay,
    Kernel,
    Strichartz,
    BesovSelftest,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Simulate,
        ExperimentKind::SweepKappa,
        ExperimentKind::Decay,
        ExperimentKind::Kernel,
        ExperimentKind::Strichartz,
        ExperimentKind::BesovSelftest,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::SweepKappa => "sweep-kappa",
            ExperimentKind::Decay => "decay",
            ExperimentKind::Kernel => "kernel",
            ExperimentKind::Strichartz => "strichartz",
            ExperimentKind::BesovSelftest => "besov-selftest",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown experiment kind `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Simple,
    VariableM,
    /// User coefficients from `[physics] pressure, capillarity, shear, bulk`.
    Polynomial,
}

impl Preset {
    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::Simple => "simple",
            Preset::VariableM => "variable-m",
            Preset::Polynomial => "polynomial",
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "simple" => Ok(Preset::Simple),
            "variable-m" => Ok(Preset::VariableM),
            "polynomial" => Ok(Preset::Polynomial),
            _ => Err(format!("unknown material preset `{s}` (simple, variable-m, polynomial)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recipe {
    /// Gaussian-enveloped random phases, band-limited.
    Gaussian,
    /// `a = 0`, `Qu = 0`.
    WellPrepared,
    /// O(1) compressible part.
    IllPrepared,
}

impl Recipe {
    pub fn as_str(&self) -> &'static str {
        match self {
            Recipe::Gaussian => "gaussian",
            Recipe::WellPrepared => "well-prepared",
            Recipe::IllPrepared => "ill-prepared",
        }
    }
}

impl FromStr for Recipe {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gaussian" => Ok(Recipe::Gaussian),
            "well-prepared" => Ok(Recipe::WellPrepared),
            "ill-prepared" => Ok(Recipe::IllPrepared),
            _ => Err(format!("unknown recipe `{s}` (gaussian, well-prepared, ill-prepared)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSection {
    pub d: usize,
    pub n: usize,
    pub ldom: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhysicsSection {
    pub kappa: Vec<f64>,
    pub preset: Preset,
    pub epsilon: f64,
    /// Coefficients of the `polynomial` preset, lowest degree first.
    pub coefficients: Option<LawCoefficients>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawCoefficients {
    pub pressure: Vec<f64>,
    pub capillarity: Vec<f64>,
    pub shear: Vec<f64>,
    pub bulk: Vec<f64>,
}

const LAW_KEYS: [&str; 4] = ["pressure", "capillarity", "shear", "bulk"];

impl PhysicsSection {
    pub fn laws(&self, kappa: f64) -> Result<MaterialLaws> {
        match (self.preset, &self.coefficients) {
            (Preset::Simple, _) => MaterialLaws::simple(kappa),
            (Preset::VariableM, _) => MaterialLaws::variable_m(kappa),
            (Preset::Polynomial, Some(c)) => MaterialLaws::polynomial(
                "polynomial",
                kappa,
                Poly(c.pressure.clone()),
                Poly(c.capillarity.clone()),
                Poly(c.shear.clone()),
                Poly(c.bulk.clone()),
            ),
            (Preset::Polynomial, None) => {
                Err(NskError::InvalidParameter("the polynomial preset needs coefficient lists".into()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitSection {
    pub recipe: Recipe,
    pub amplitude: f64,
    pub seed: u64,
    /// Dyadic block range `[j_a, j_b]` of the random phases.
    pub band: (i32, i32),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeSection {
    pub dt: f64,
    pub tmax: f64,
    /// Steps between recorded stamps.
    pub cadence: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsSection {
    pub besov: Vec<BesovParams>,
    pub alpha: Vec<f64>,
    pub sigma: f64,
}

/// Study-specific exponents: the Lebesgue exponent `lp` and block `block`
/// of the kernel study, the time exponent `r` and optional derivative gain
/// `k` of the Strichartz study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    pub lp: f64,
    pub block: i32,
    pub r: f64,
    pub k: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub grid: GridSection,
    pub physics: PhysicsSection,
    pub init: InitSection,
    pub time: TimeSection,
    pub diagnostics: DiagnosticsSection,
    pub experiment: ExperimentSection,
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("grid", &["d", "n", "ldom"]),
    ("physics", &["kappa", "preset", "epsilon", "pressure", "capillarity", "shear", "bulk"]),
    ("init", &["recipe", "amplitude", "seed", "band"]),
    ("time", &["dt", "tmax", "cadence"]),
    ("diagnostics", &["besov", "alpha", "sigma"]),
    ("experiment", &["kind", "lp", "block", "r", "k"]),
];

const REQUIRED: &[(&str, &str)] = &[("grid", "d"), ("grid", "n"), ("physics", "kappa"), ("time", "dt"), ("time", "tmax")];

struct Entry {
    line: usize,
    value: String,
}

struct Raw {
    entries: BTreeMap<(String, String), Entry>,
}

fn config_err(line: usize, key: &str, msg: impl Into<String>) -> NskError {
    NskError::Config {
        line,
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn tokenize(text: &str) -> Result<Raw> {
    let mut entries = BTreeMap::new();
    let mut section: Option<(String, usize)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| config_err(line, content, "unterminated section header"))?
                .trim();
            if !SCHEMA.iter().any(|(s, _)| *s == name) {
                return Err(config_err(line, name, "unknown section"));
            }
            section = Some((name.to_string(), line));
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| config_err(line, content, "expected `key = value`"))?;
        let key = key.trim();
        let (sec, _) = section
            .as_ref()
            .ok_or_else(|| config_err(line, key, "key outside of any section"))?;
        let known = SCHEMA.iter().find(|(s, _)| s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !known.contains(&key) {
            return Err(config_err(line, &format!("{sec}.{key}"), "unknown key"));
        }
        let slot = (sec.clone(), key.to_string());
        if let Some(prev) = entries.get(&slot) {
            let prev: &Entry = prev;
            return Err(config_err(line, &format!("{sec}.{key}"), format!("duplicate key (first set on line {})", prev.line)));
        }
        entries.insert(
            slot,
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    Ok(Raw { entries })
}

impl Raw {
    fn get(&self, sec: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(sec.to_string(), key.to_string()))
    }

    fn parse<T: FromStr>(&self, sec: &str, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(sec, key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse::<T>()
                .map_err(|err| config_err(e.line, &format!("{sec}.{key}"), format!("cannot parse `{}`: {err}", e.value))),
        }
    }

    fn list<T: FromStr>(&self, sec: &str, key: &str, sep: char) -> Result<Option<(usize, Vec<T>)>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(e) = self.get(sec, key) else {
            return Ok(None);
        };
        let items = e
            .value
            .split(sep)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>()
                    .map_err(|err| config_err(e.line, &format!("{sec}.{key}"), format!("cannot parse `{s}`: {err}")))
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(Some((e.line, items)))
    }

    fn line(&self, sec: &str, key: &str) -> usize {
        self.get(sec, key).map(|e| e.line).unwrap_or(0)
    }
}

fn check(cond: bool, raw: &Raw, sec: &str, key: &str, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(config_err(raw.line(sec, key), &format!("{sec}.{key}"), msg))
    }
}

/// Parse and validate a configuration. Missing optional keys take their
/// defaults; missing required keys are reported with line 0.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw = tokenize(text)?;
    for (sec, key) in REQUIRED {
        if raw.get(sec, key).is_none() {
            return Err(config_err(0, &format!("{sec}.{key}"), "missing required key"));
        }
    }

    let d: usize = raw.parse("grid", "d", 2)?;
    check(d == 2 || d == 3, &raw, "grid", "d", "dimension must be 2 or 3")?;
    let n: usize = raw.parse("grid", "n", 0)?;
    check(n >= 16 && n.is_power_of_two(), &raw, "grid", "n", "resolution must be a power of two >= 16")?;
    let ldom: f64 = raw.parse("grid", "ldom", 2.0 * PI)?;
    check(ldom > 0.0 && ldom.is_finite(), &raw, "grid", "ldom", "domain length must be positive")?;

    let kappa = raw.list::<f64>("physics", "kappa", ',')?.map(|(_, v)| v).unwrap_or_default();
    check(!kappa.is_empty(), &raw, "physics", "kappa", "at least one kappa value is required")?;
    check(
        kappa.iter().all(|k| *k > 0.0 && k.is_finite()),
        &raw,
        "physics",
        "kappa",
        "kappa must be positive",
    )?;
    let preset: Preset = raw.parse("physics", "preset", Preset::Simple)?;
    let epsilon: f64 = raw.parse("physics", "epsilon", 0.05)?;
    check(epsilon > 0.0 && epsilon < 0.25, &raw, "physics", "epsilon", "epsilon must lie in (0, 1/4)")?;
    let mut lists = Vec::new();
    for key in LAW_KEYS {
        let list = raw.list::<f64>("physics", key, ',')?.map(|(_, v)| v);
        check(
            list.is_none() || preset == Preset::Polynomial,
            &raw,
            "physics",
            key,
            "coefficient lists need `preset = polynomial`",
        )?;
        check(
            list.as_ref().map_or(true, |v| !v.is_empty() && v.iter().all(|c| c.is_finite())),
            &raw,
            "physics",
            key,
            "coefficients must be finite",
        )?;
        lists.push(list);
    }
    let coefficients = if preset == Preset::Polynomial {
        for key in &LAW_KEYS[..3] {
            check(raw.get("physics", key).is_some(), &raw, "physics", "preset", &format!("the polynomial preset needs `{key}`"))?;
        }
        let mut it = lists.into_iter().map(Option::unwrap_or_default);
        let mut c = LawCoefficients {
            pressure: it.next().unwrap(),
            capillarity: it.next().unwrap(),
            shear: it.next().unwrap(),
            bulk: it.next().unwrap(),
        };
        if c.bulk.is_empty() {
            c.bulk = vec![0.0];
        }
        Some(c)
    } else {
        None
    };

    let recipe: Recipe = raw.parse("init", "recipe", Recipe::Gaussian)?;
    let amplitude: f64 = raw.parse("init", "amplitude", 0.1)?;
    check(amplitude >= 0.0 && amplitude.is_finite(), &raw, "init", "amplitude", "amplitude must be >= 0")?;
    let seed: u64 = raw.parse("init", "seed", 0)?;
    let band = match raw.list::<i32>("init", "band", ',')? {
        None => (0, 2),
        Some((_, v)) if v.len() == 2 && v[0] <= v[1] => (v[0], v[1]),
        Some((line, _)) => return Err(config_err(line, "init.band", "band must be `j_a, j_b` with j_a <= j_b")),
    };

    let dt: f64 = raw.parse("time", "dt", 0.0)?;
    check(dt > 0.0 && dt.is_finite(), &raw, "time", "dt", "time step must be positive")?;
    let tmax: f64 = raw.parse("time", "tmax", 0.0)?;
    check(tmax >= dt && tmax.is_finite(), &raw, "time", "tmax", "final time must be >= dt")?;
    let cadence: usize = raw.parse("time", "cadence", 10)?;
    check(cadence >= 1, &raw, "time", "cadence", "cadence must be >= 1")?;

    let besov = match raw.list::<String>("diagnostics", "besov", ';')? {
        None => Vec::new(),
        Some((line, items)) => items
            .iter()
            .map(|item| {
                let parts: Vec<&str> = item.split(',').map(str::trim).collect();
                let bad = || config_err(line, "diagnostics.besov", format!("expected `s,p,r`, got `{item}`"));
                if parts.len() != 3 {
                    return Err(bad());
                }
                let v: Vec<f64> = parts.iter().map(|p| p.parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
                BesovParams::new(v[0], v[1], v[2]).map_err(|e| config_err(line, "diagnostics.besov", e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let alpha = raw.list::<f64>("diagnostics", "alpha", ',')?.map(|(_, v)| v).unwrap_or_default();
    check(alpha.iter().all(|a| a.is_finite()), &raw, "diagnostics", "alpha", "alpha values must be finite")?;
    let sigma: f64 = raw.parse("diagnostics", "sigma", d as f64 / 2.0)?;
    check(sigma.is_finite(), &raw, "diagnostics", "sigma", "sigma must be finite")?;

    let kind: ExperimentKind = raw.parse("experiment", "kind", ExperimentKind::Simulate)?;
    let lp: f64 = raw.parse("experiment", "lp", f64::INFINITY)?;
    check(lp >= 2.0, &raw, "experiment", "lp", "Lebesgue exponent must lie in [2, inf]")?;
    let block: i32 = raw.parse("experiment", "block", 0)?;
    let r: f64 = raw.parse("experiment", "r", 2.0)?;
    check(r >= 1.0, &raw, "experiment", "r", "time exponent must lie in [1, inf]")?;
    let k = match raw.get("experiment", "k") {
        None => None,
        Some(_) => Some(raw.parse::<f64>("experiment", "k", 0.0)?),
    };

    let cfg = ExperimentConfig {
        grid: GridSection { d, n, ldom },
        physics: PhysicsSection {
            kappa,
            preset,
            epsilon,
            coefficients,
        },
        init: InitSection {
            recipe,
            amplitude,
            seed,
            band,
        },
        time: TimeSection { dt, tmax, cadence },
        diagnostics: DiagnosticsSection { besov, alpha, sigma },
        experiment: ExperimentSection { kind, lp, block, r, k },
    };
    Grid::new(d, n, ldom).map_err(|e| config_err(raw.line("grid", "n"), "grid", e.to_string()))?;
    cfg.physics
        .laws(cfg.physics.kappa[0])
        .map_err(|e| config_err(raw.line("physics", "preset"), "physics.preset", e.to_string()))?;
    if kind == ExperimentKind::SweepKappa {
        let mut sorted = cfg.physics.kappa.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        check(sorted.len() >= 3, &raw, "physics", "kappa", "a kappa sweep needs at least 3 distinct values")?;
    }
    Ok(cfg)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| fmt_exp(*v)).collect::<Vec<_>>().join(", ")
}

/// Canonical text form; `parse_config(&emit_config(c)) == c`.
pub fn emit_config(c: &ExperimentConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[grid]\nd = {}\nn = {}\nldom = {}", c.grid.d, c.grid.n, c.grid.ldom);
    let _ = writeln!(
        s,
        "\n[physics]\nkappa = {}\npreset = {}\nepsilon = {}",
        join(&c.physics.kappa),
        c.physics.preset.as_str(),
        c.physics.epsilon
    );
    if let Some(k) = &c.physics.coefficients {
        for (key, v) in LAW_KEYS.iter().zip([&k.pressure, &k.capillarity, &k.shear, &k.bulk]) {
            let _ = writeln!(s, "{key} = {}", join(v));
        }
    }
    let _ = writeln!(
        s,
        "\n[init]\nrecipe = {}\namplitude = {}\nseed = {}\nband = {}, {}",
        c.init.recipe.as_str(),
        c.init.amplitude,
        c.init.seed,
        c.init.band.0,
        c.init.band.1
    );
    let _ = writeln!(s, "\n[time]\ndt = {}\ntmax = {}\ncadence = {}", c.time.dt, c.time.tmax, c.time.cadence);
    let besov: Vec<String> = c
        .diagnostics
        .besov
        .iter()
        .map(|b| format!("{},{},{}", fmt_exp(b.s), fmt_exp(b.p), fmt_exp(b.r)))
        .collect();
    let _ = writeln!(s, "\n[diagnostics]");
    if !besov.is_empty() {
        let _ = writeln!(s, "besov = {}", besov.join("; "));
    }
    if !c.diagnostics.alpha.is_empty() {
        let _ = writeln!(s, "alpha = {}", join(&c.diagnostics.alpha));
    }
    let _ = writeln!(s, "sigma = {}", c.diagnostics.sigma);
    let _ = writeln!(
        s,
        "\n[experiment]\nkind = {}\nlp = {}\nblock = {}\nr = {}",
        c.experiment.kind.as_str(),
        fmt_exp(c.experiment.lp),
        c.experiment.block,
        fmt_exp(c.experiment.r)
    );
    if let Some(k) = c.experiment.k {
        let _ = writeln!(s, "k = {k}");
    }
    s
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.d, self.grid.n, self.grid.ldom)
    }

    /// `(delta, p)`: `(1/4, 2d/(d-2))` for `d >= 3`, `(1/4 - eps, 1/(2 eps))` for `d = 2`.
    pub fn delta_p(&self) -> (f64, f64) {
        delta_p(self.grid.d, self.physics.epsilon)
    }

    /// Number of time steps to reach `tmax`.
    pub fn steps(&self) -> usize {
        (self.time.tmax / self.time.dt).round().max(1.0) as usize
    }
}

pub fn delta_p(d: usize, epsilon: f64) -> (f64, f64) {
    if d >= 3 {
        (0.25, 2.0 * d as f64 / (d as f64 - 2.0))
    } else {
        (0.25 - epsilon, 1.0 / (2.0 * epsilon))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[grid]\nd = 2\nn = 32\n[physics]\nkappa = 100\n[time]\ndt = 0.01\ntmax = 1\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.physics.epsilon, 0.05);
        let (delta, p) = c.delta_p();
        assert!((delta - 0.2).abs() < 1e-15);
        assert!((p - 10.0).abs() < 1e-12);
        assert_eq!(c.experiment.kind, ExperimentKind::Simulate);
        assert_eq!(c.diagnostics.sigma, 1.0);
        assert_eq!(c.steps(), 100);
    }

    #[test]
    fn three_dimensional_pair() {
        let c = parse_config(&MINIMAL.replace("d = 2", "d = 3")).unwrap();
        assert_eq!(c.delta_p(), (0.25, 6.0));
    }

    #[test]
    fn misspelled_key_names_its_line() {
        let text = MINIMAL.replace("kappa = 100", "kapa = 100");
        match parse_config(&text) {
            Err(NskError::Config { line, key, .. }) => {
                assert_eq!(line, 5);
                assert_eq!(key, "physics.kapa");
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn missing_and_out_of_range() {
        let text = MINIMAL.replace("dt = 0.01\n", "");
        assert!(matches!(parse_config(&text), Err(NskError::Config { key, .. }) if key == "time.dt"));
        let text = MINIMAL.replace("n = 32", "n = 48");
        assert!(matches!(parse_config(&text), Err(NskError::Config { line: 3, .. })));
        let text = format!("{MINIMAL}[experiment]\nkind = sweep-kappa\n");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn full_round_trip() {
        let text = "[grid]\nd = 2\nn = 64\nldom = 12.5\n[physics]\nkappa = 100, 1000, 10000\npreset = variable-m\n\
                    [init]\nrecipe = ill-prepared\namplitude = 0.25\nseed = 17\nband = -1, 3\n[time]\ndt = 0.001\ntmax = 1\ncadence = 5\n\
                    [diagnostics]\nbesov = 0,2,1; -1,2,inf\nalpha = 0, 2\nsigma = 1\n[experiment]\nkind = sweep-kappa\nk = 0.2\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.diagnostics.besov.len(), 2);
        assert!(c.diagnostics.besov[1].r.is_infinite());
        let again = parse_config(&emit_config(&c)).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn polynomial_preset_coefficients() {
        // P = (rho^3 + 2)/3 so P'(1) = 1; m = rho; mu = 1; lambda = 0
        let laws = "preset = polynomial\npressure = 0.6666666666666666, 0, 0, 0.3333333333333333\ncapillarity = 0, 1\nshear = 1\n";
        let text = MINIMAL.replace("kappa = 100\n", &format!("kappa = 100\n{laws}"));
        let c = parse_config(&text).unwrap();
        let k = c.physics.coefficients.as_ref().unwrap();
        assert_eq!(k.bulk, vec![0.0]);
        assert_eq!(c.physics.laws(100.0).unwrap().capillarity, Poly(vec![0.0, 1.0]));
        assert_eq!(parse_config(&emit_config(&c)).unwrap(), c);

        let stray = MINIMAL.replace("kappa = 100\n", "kappa = 100\nshear = 1, 1\n");
        assert!(matches!(parse_config(&stray), Err(NskError::Config { line: 6, .. })));
        let missing = text.replace("shear = 1\n", "");
        assert!(parse_config(&missing).is_err());
        // mu(1) = 2 breaks the equilibrium normalization
        let unnormalized = text.replace("shear = 1\n", "shear = 2\n");
        assert!(matches!(parse_config(&unnormalized), Err(NskError::Config { key, .. }) if key == "physics.preset"));
    }
}
