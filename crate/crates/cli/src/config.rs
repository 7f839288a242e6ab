//! Line-oriented experiment configuration.
//!
//! ```text
//! # comment
//! [exponents]
//! m = 0.8, 1.2
//!
//! [grid]
//! sizes = 256, 256
//! half_widths = 24, 12
//! ```
//!
//! Sections `exponents`, `grid`, `initial` and `run` are required; `barrier`,
//! `checks` and `output` are optional and fall back to defaults.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use apme::solver::Frame;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

/// Every problem found in one config text.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Gaussian,
    Bump,
    TruncatedSpike,
    FromSnapshot,
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::Gaussian => "gaussian",
            Generator::Bump => "bump",
            Generator::TruncatedSpike => "truncated_spike",
            Generator::FromSnapshot => "from_snapshot",
        }
    }
}

impl FromStr for Generator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gaussian" => Ok(Generator::Gaussian),
            "bump" => Ok(Generator::Bump),
            "truncated_spike" => Ok(Generator::TruncatedSpike),
            "from_snapshot" => Ok(Generator::FromSnapshot),
            _ => Err(format!(
                "unknown generator '{s}' (gaussian, bump, truncated_spike, from_snapshot)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub generator: Generator,
    pub center: Vec<f64>,
    /// Standard deviations (gaussian) or semi-axes (bump, truncated_spike).
    pub width: Vec<f64>,
    pub amplitude: f64,
    /// When set, the generated data is rescaled to this discrete mass.
    pub mass: Option<f64>,
    pub spike_at: Vec<f64>,
    pub spike_radius: f64,
    pub spike_power: f64,
    pub spike_height: f64,
    pub tail: f64,
    /// Truncation level `k` of `min(k, u₀)χ_{|x|<k}`.
    pub truncate: Option<f64>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierParams {
    pub c0: f64,
    pub a: f64,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChecksConfig {
    pub select: Vec<String>,
    pub mass_tol: f64,
    pub decay_window: (f64, f64),
    pub decay_tol: f64,
    pub probe_scalings: Vec<f64>,
    pub probe_time: f64,
    pub comparison_pairs: usize,
    pub barrier_tol: f64,
    pub certificate_samples: usize,
    pub envelope_c1: Option<f64>,
    pub envelope_tau: f64,
    pub scaling_taus: Vec<f64>,
    pub scaling_tol: f64,
    pub rescaled_sizes: Option<Vec<usize>>,
    pub rescaled_half_widths: Option<Vec<f64>>,
    pub truncation_levels: Vec<f64>,
    pub monotone_tol: f64,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            select: Vec::new(),
            mass_tol: 0.005,
            decay_window: (1.0, 10.0),
            decay_tol: 0.1,
            probe_scalings: vec![1.0, 2.0, 4.5, 10.0],
            probe_time: 1.0,
            comparison_pairs: 6,
            barrier_tol: 1e-3,
            certificate_samples: 10_000,
            envelope_c1: None,
            envelope_tau: 3.0,
            scaling_taus: vec![0.2, 0.5, 1.0],
            scaling_tol: 0.02,
            rescaled_sizes: None,
            rescaled_half_widths: None,
            truncation_levels: vec![2.0, 4.0, 8.0, 16.0],
            monotone_tol: 0.01,
        }
    }
}

pub const CHECK_NAMES: [&str; 8] = [
    "mass",
    "decay",
    "probe",
    "comparison",
    "dominance",
    "envelope",
    "scaling",
    "monotone",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: Vec<f64>,
    pub sizes: Vec<usize>,
    pub half_widths: Vec<f64>,
    pub initial: InitialSpec,
    pub frame: Frame,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub safety: f64,
    pub barrier: Option<BarrierParams>,
    pub checks: ChecksConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
}

const SECTIONS: [(&str, &[&str]); 7] = [
    ("exponents", &["m", "n"]),
    ("grid", &["sizes", "half_widths"]),
    (
        "initial",
        &[
            "generator",
            "center",
            "width",
            "amplitude",
            "mass",
            "spike_at",
            "spike_radius",
            "spike_power",
            "spike_height",
            "tail",
            "truncate",
            "path",
        ],
    ),
    ("run", &["frame", "t_end", "snapshot_times", "safety"]),
    ("barrier", &["c0", "a", "horizon"]),
    (
        "checks",
        &[
            "select",
            "mass_tol",
            "decay_window",
            "decay_tol",
            "probe_scalings",
            "probe_time",
            "comparison_pairs",
            "barrier_tol",
            "certificate_samples",
            "envelope_c1",
            "envelope_tau",
            "scaling_taus",
            "scaling_tol",
            "rescaled_sizes",
            "rescaled_half_widths",
            "truncation_levels",
            "monotone_tol",
        ],
    ),
    ("output", &["dir", "seed"]),
];

const REQUIRED: [&str; 4] = ["exponents", "grid", "initial", "run"];

/// Raw `key = value` entries of one section, with their line numbers.
type Section = BTreeMap<String, (String, usize)>;

struct Reader {
    sections: BTreeMap<String, Section>,
    errors: Vec<ConfigError>,
}

impl Reader {
    fn err(&mut self, line: Option<usize>, key: &str, message: impl Into<String>) {
        self.errors.push(ConfigError {
            line,
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn has(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn raw(&self, section: &str, key: &str) -> Option<(String, usize)> {
        self.sections.get(section)?.get(key).cloned()
    }

    fn parsed<T: FromStr>(&mut self, section: &str, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        let (v, line) = self.raw(section, key)?;
        match v.parse::<T>() {
            Ok(x) => Some(x),
            Err(e) => {
                self.err(Some(line), &format!("{section}.{key}"), format!("cannot parse '{v}': {e}"));
                None
            }
        }
    }

    fn list<T: FromStr>(&mut self, section: &str, key: &str) -> Option<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        let (v, line) = self.raw(section, key)?;
        let mut out = Vec::new();
        for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.parse::<T>() {
                Ok(x) => out.push(x),
                Err(e) => {
                    self.err(Some(line), &format!("{section}.{key}"), format!("cannot parse '{item}': {e}"));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn required<T: FromStr>(&mut self, section: &str, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        if self.has(section) && self.raw(section, key).is_none() {
            self.err(None, &format!("{section}.{key}"), "missing required key");
        }
        self.parsed(section, key)
    }

    fn required_list<T: FromStr>(&mut self, section: &str, key: &str) -> Option<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        if self.has(section) && self.raw(section, key).is_none() {
            self.err(None, &format!("{section}.{key}"), "missing required key");
        }
        self.list(section, key)
    }

    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.raw(section, key).map(|(_, l)| l)
    }
}

fn tokenize(text: &str) -> Reader {
    let allowed: BTreeMap<&str, &[&str]> = SECTIONS.iter().copied().collect();
    let mut r = Reader {
        sections: BTreeMap::new(),
        errors: Vec::new(),
    };
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !allowed.contains_key(name.as_str()) {
                r.err(Some(line_no), &name, "unknown section");
                current = None;
                continue;
            }
            r.sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            r.err(Some(line_no), line, "expected 'key = value' or '[section]'");
            continue;
        };
        let key = key.trim().to_string();
        let Some(section) = current.clone() else {
            r.err(Some(line_no), &key, "key outside of a known section");
            continue;
        };
        if !allowed[section.as_str()].contains(&key.as_str()) {
            r.err(Some(line_no), &format!("{section}.{key}"), "unknown key");
            continue;
        }
        let entry = r.sections.get_mut(&section).unwrap();
        if entry.contains_key(&key) {
            r.err(Some(line_no), &format!("{section}.{key}"), "duplicate key");
            continue;
        }
        entry.insert(key, (value.trim().to_string(), line_no));
    }
    for s in REQUIRED {
        if !r.has(s) {
            r.err(None, s, "missing required section");
        }
    }
    r
}

/// Parses and validates a config, reporting every error found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let mut r = tokenize(text);

    let m: Option<Vec<f64>> = r.required_list("exponents", "m");
    let n: Option<usize> = r.parsed("exponents", "n");
    let sizes: Option<Vec<usize>> = r.required_list("grid", "sizes");
    let half_widths: Option<Vec<f64>> = r.required_list("grid", "half_widths");
    let dim = m.as_ref().map(|m| n.unwrap_or(m.len()));
    if let (Some(m), Some(n)) = (&m, n) {
        if m.len() != n {
            let line = r.line_of("exponents", "m");
            r.err(line, "exponents.m", format!("has {} entries but n = {n}", m.len()));
        }
    }
    if let Some(m) = &m {
        if m.is_empty() {
            r.err(r.line_of("exponents", "m"), "exponents.m", "must not be empty");
        }
        if m.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            r.err(r.line_of("exponents", "m"), "exponents.m", "entries must be positive");
        }
    }
    let check_len = |r: &mut Reader, section: &str, key: &str, len: usize| {
        if let Some(d) = dim {
            if len != d {
                let line = r.line_of(section, key);
                r.err(line, &format!("{section}.{key}"), format!("has {len} entries, expected {d}"));
            }
        }
    };
    if let Some(s) = &sizes {
        check_len(&mut r, "grid", "sizes", s.len());
        if s.iter().any(|&k| k < 3) {
            r.err(r.line_of("grid", "sizes"), "grid.sizes", "every axis needs at least 3 nodes");
        }
    }
    if let Some(h) = &half_widths {
        check_len(&mut r, "grid", "half_widths", h.len());
        if h.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            r.err(r.line_of("grid", "half_widths"), "grid.half_widths", "entries must be positive");
        }
    }

    let generator: Option<Generator> = r.required("initial", "generator");
    let d = dim.unwrap_or(0);
    let center: Vec<f64> = r.list("initial", "center").unwrap_or_else(|| vec![0.0; d]);
    let width: Vec<f64> = r.list("initial", "width").unwrap_or_else(|| vec![1.0; d]);
    let amplitude: f64 = r.parsed("initial", "amplitude").unwrap_or(1.0);
    let mass: Option<f64> = r.parsed("initial", "mass");
    let spike_at: Vec<f64> = r.list("initial", "spike_at").unwrap_or_else(|| vec![0.013; d]);
    let spike_radius: f64 = r.parsed("initial", "spike_radius").unwrap_or(0.5);
    let spike_power: f64 = r.parsed("initial", "spike_power").unwrap_or(0.5);
    let spike_height: f64 = r.parsed("initial", "spike_height").unwrap_or(1.0);
    let tail: f64 = r.parsed("initial", "tail").unwrap_or(0.0);
    let truncate: Option<f64> = r.parsed("initial", "truncate");
    let path: Option<PathBuf> = r.parsed::<String>("initial", "path").map(PathBuf::from);
    if r.has("initial") {
        for (key, len) in [("center", center.len()), ("width", width.len()), ("spike_at", spike_at.len())] {
            if r.raw("initial", key).is_some() {
                check_len(&mut r, "initial", key, len);
            }
        }
        if width.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            r.err(r.line_of("initial", "width"), "initial.width", "entries must be positive");
        }
        if let Some(h) = &half_widths {
            if center.iter().zip(h).any(|(c, l)| c.abs() > *l) {
                r.err(r.line_of("initial", "center"), "initial.center", "lies outside the grid");
            }
        }
        if let Some(ms) = mass {
            if !(ms > 0.0) {
                r.err(r.line_of("initial", "mass"), "initial.mass", "must be positive");
            }
        }
        if generator == Some(Generator::TruncatedSpike) && dim.is_some_and(|d| !(spike_power >= 0.0 && spike_power < d as f64)) {
            r.err(r.line_of("initial", "spike_power"), "initial.spike_power", format!("must lie in [0, {d})"));
        }
        if let Some(k) = truncate {
            if !(k > 0.0) {
                r.err(r.line_of("initial", "truncate"), "initial.truncate", "must be positive");
            }
        }
        if generator == Some(Generator::FromSnapshot) {
            match &path {
                None => r.err(None, "initial.path", "required by the from_snapshot generator"),
                Some(p) if !p.exists() => {
                    r.err(r.line_of("initial", "path"), "initial.path", format!("{} does not exist", p.display()))
                }
                _ => {}
            }
        }
    }

    let frame: Frame = r.parsed("run", "frame").unwrap_or(Frame::Original);
    let t_end: Option<f64> = r.required("run", "t_end");
    let snapshot_times: Vec<f64> = r.list("run", "snapshot_times").unwrap_or_default();
    let safety: f64 = r.parsed("run", "safety").unwrap_or(apme::solver::SAFETY);
    if let Some(t) = t_end {
        if !(t.is_finite() && t >= 0.0) {
            r.err(r.line_of("run", "t_end"), "run.t_end", "must be finite and nonnegative");
        }
        let ok = snapshot_times.iter().all(|s| *s >= 0.0 && *s <= t)
            && snapshot_times.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            r.err(r.line_of("run", "snapshot_times"), "run.snapshot_times", "must increase strictly within [0, t_end]");
        }
    }
    if !(safety > 0.0 && safety <= 1.0) {
        r.err(r.line_of("run", "safety"), "run.safety", "must lie in (0, 1]");
    }

    let barrier = if r.has("barrier") {
        let c0: Option<f64> = r.required("barrier", "c0");
        let a: Option<f64> = r.required("barrier", "a");
        let horizon: Option<f64> = r.required("barrier", "horizon");
        for (k, v) in [("c0", c0), ("a", a), ("horizon", horizon)] {
            if v.is_some_and(|v| !(v > 0.0)) {
                r.err(r.line_of("barrier", k), &format!("barrier.{k}"), "must be positive");
            }
        }
        match (c0, a, horizon) {
            (Some(c0), Some(a), Some(horizon)) => Some(BarrierParams { c0, a, horizon }),
            _ => None,
        }
    } else {
        None
    };

    let checks = parse_checks(&mut r, dim);

    let out_dir = r
        .parsed::<String>("output", "dir")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed: u64 = r.parsed("output", "seed").unwrap_or(0);

    if !r.errors.is_empty() {
        return Err(ConfigErrors(r.errors));
    }
    Ok(ExperimentConfig {
        m: m.unwrap(),
        sizes: sizes.unwrap(),
        half_widths: half_widths.unwrap(),
        initial: InitialSpec {
            generator: generator.unwrap(),
            center,
            width,
            amplitude,
            mass,
            spike_at,
            spike_radius,
            spike_power,
            spike_height,
            tail,
            truncate,
            path,
        },
        frame,
        t_end: t_end.unwrap(),
        snapshot_times,
        safety,
        barrier,
        checks,
        seed,
        out_dir,
    })
}

fn parse_checks(r: &mut Reader, dim: Option<usize>) -> ChecksConfig {
    let d = ChecksConfig::default();
    let s = "checks";
    let select: Vec<String> = r.list(s, "select").unwrap_or_default();
    for name in &select {
        if !CHECK_NAMES.contains(&name.as_str()) {
            r.err(r.line_of(s, "select"), "checks.select", format!("unknown check '{name}'"));
        }
    }
    let positive = |r: &mut Reader, key: &str, default: f64| -> f64 {
        let v: f64 = r.parsed(s, key).unwrap_or(default);
        if !(v.is_finite() && v > 0.0) {
            r.err(r.line_of(s, key), &format!("checks.{key}"), "must be positive");
        }
        v
    };
    let mass_tol = positive(r, "mass_tol", d.mass_tol);
    let decay_tol = positive(r, "decay_tol", d.decay_tol);
    let probe_time = positive(r, "probe_time", d.probe_time);
    let barrier_tol = positive(r, "barrier_tol", d.barrier_tol);
    let envelope_tau = positive(r, "envelope_tau", d.envelope_tau);
    let scaling_tol = positive(r, "scaling_tol", d.scaling_tol);
    let monotone_tol = positive(r, "monotone_tol", d.monotone_tol);
    let envelope_c1: Option<f64> = r.parsed(s, "envelope_c1");
    if envelope_c1.is_some_and(|c| !(c > 0.0)) {
        r.err(r.line_of(s, "envelope_c1"), "checks.envelope_c1", "must be positive");
    }
    let decay_window = match r.list::<f64>(s, "decay_window") {
        Some(w) if w.len() == 2 && w[0] > 0.0 && w[1] > w[0] => (w[0], w[1]),
        Some(_) => {
            r.err(r.line_of(s, "decay_window"), "checks.decay_window", "expected 't_lo, t_hi' with 0 < t_lo < t_hi");
            d.decay_window
        }
        None => d.decay_window,
    };
    let probe_scalings: Vec<f64> = r.list(s, "probe_scalings").unwrap_or(d.probe_scalings);
    if probe_scalings.iter().any(|v| !(*v > 0.0)) {
        r.err(r.line_of(s, "probe_scalings"), "checks.probe_scalings", "entries must be positive");
    }
    let comparison_pairs: usize = r.parsed(s, "comparison_pairs").unwrap_or(d.comparison_pairs);
    let certificate_samples: usize = r.parsed(s, "certificate_samples").unwrap_or(d.certificate_samples);
    let scaling_taus: Vec<f64> = r.list(s, "scaling_taus").unwrap_or(d.scaling_taus);
    if scaling_taus.iter().any(|v| *v < 0.0) || scaling_taus.windows(2).any(|w| w[0] >= w[1]) {
        r.err(r.line_of(s, "scaling_taus"), "checks.scaling_taus", "must be nonnegative and strictly increasing");
    }
    let rescaled_sizes: Option<Vec<usize>> = r.list(s, "rescaled_sizes");
    let rescaled_half_widths: Option<Vec<f64>> = r.list(s, "rescaled_half_widths");
    if let Some(dim) = dim {
        for (key, len) in [
            ("rescaled_sizes", rescaled_sizes.as_ref().map(Vec::len)),
            ("rescaled_half_widths", rescaled_half_widths.as_ref().map(Vec::len)),
        ] {
            if let Some(len) = len {
                if len != dim {
                    r.err(r.line_of(s, key), &format!("checks.{key}"), format!("has {len} entries, expected {dim}"));
                }
            }
        }
    }
    let truncation_levels: Vec<f64> = r.list(s, "truncation_levels").unwrap_or(d.truncation_levels);
    if truncation_levels.iter().any(|v| !(*v > 0.0)) || truncation_levels.windows(2).any(|w| w[0] >= w[1]) {
        r.err(r.line_of(s, "truncation_levels"), "checks.truncation_levels", "must be positive and strictly increasing");
    }
    ChecksConfig {
        select,
        mass_tol,
        decay_window,
        decay_tol,
        probe_scalings,
        probe_time,
        comparison_pairs,
        barrier_tol,
        certificate_samples,
        envelope_c1,
        envelope_tau,
        scaling_taus,
        scaling_tol,
        rescaled_sizes,
        rescaled_half_widths,
        truncation_levels,
        monotone_tol,
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Writes every field explicitly; `parse_config(&serialize(c))` equals `c`.
pub fn serialize(c: &ExperimentConfig) -> String {
    let mut s = String::new();
    let i = &c.initial;
    let k = &c.checks;
    let _ = writeln!(s, "[exponents]\nm = {}\nn = {}\n", join(&c.m), c.m.len());
    let _ = writeln!(s, "[grid]\nsizes = {}\nhalf_widths = {}\n", join(&c.sizes), join(&c.half_widths));
    let _ = writeln!(s, "[initial]\ngenerator = {}", i.generator.name());
    let _ = writeln!(s, "center = {}\nwidth = {}\namplitude = {}", join(&i.center), join(&i.width), i.amplitude);
    if let Some(m) = i.mass {
        let _ = writeln!(s, "mass = {m}");
    }
    let _ = writeln!(
        s,
        "spike_at = {}\nspike_radius = {}\nspike_power = {}\nspike_height = {}\ntail = {}",
        join(&i.spike_at),
        i.spike_radius,
        i.spike_power,
        i.spike_height,
        i.tail
    );
    if let Some(t) = i.truncate {
        let _ = writeln!(s, "truncate = {t}");
    }
    if let Some(p) = &i.path {
        let _ = writeln!(s, "path = {}", p.display());
    }
    let _ = writeln!(
        s,
        "\n[run]\nframe = {}\nt_end = {}\nsnapshot_times = {}\nsafety = {}\n",
        c.frame,
        c.t_end,
        join(&c.snapshot_times),
        c.safety
    );
    if let Some(b) = &c.barrier {
        let _ = writeln!(s, "[barrier]\nc0 = {}\na = {}\nhorizon = {}\n", b.c0, b.a, b.horizon);
    }
    let _ = writeln!(s, "[checks]\nselect = {}", k.select.join(", "));
    let _ = writeln!(
        s,
        "mass_tol = {}\ndecay_window = {}, {}\ndecay_tol = {}\nprobe_scalings = {}\nprobe_time = {}",
        k.mass_tol,
        k.decay_window.0,
        k.decay_window.1,
        k.decay_tol,
        join(&k.probe_scalings),
        k.probe_time
    );
    let _ = writeln!(
        s,
        "comparison_pairs = {}\nbarrier_tol = {}\ncertificate_samples = {}",
        k.comparison_pairs, k.barrier_tol, k.certificate_samples
    );
    if let Some(c1) = k.envelope_c1 {
        let _ = writeln!(s, "envelope_c1 = {c1}");
    }
    let _ = writeln!(
        s,
        "envelope_tau = {}\nscaling_taus = {}\nscaling_tol = {}",
        k.envelope_tau,
        join(&k.scaling_taus),
        k.scaling_tol
    );
    if let Some(v) = &k.rescaled_sizes {
        let _ = writeln!(s, "rescaled_sizes = {}", join(v));
    }
    if let Some(v) = &k.rescaled_half_widths {
        let _ = writeln!(s, "rescaled_half_widths = {}", join(v));
    }
    let _ = writeln!(
        s,
        "truncation_levels = {}\nmonotone_tol = {}\n",
        join(&k.truncation_levels),
        k.monotone_tol
    );
    let _ = writeln!(s, "[output]\ndir = {}\nseed = {}", c.out_dir.display(), c.seed);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[exponents]
m = 0.8, 1.2

[grid]
sizes = 64, 64
half_widths = 8, 4

[initial]
generator = gaussian

[run]
t_end = 1
";

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.m, vec![0.8, 1.2]);
        assert_eq!(c.initial.center, vec![0.0, 0.0]);
        assert_eq!(c.frame, Frame::Original);
        assert_eq!(c.checks, ChecksConfig::default());
        assert_eq!(c.out_dir, PathBuf::from("out"));
        assert!(c.barrier.is_none());
    }

    #[test]
    fn wrong_length_names_the_key() {
        let text = MINIMAL.replace("m = 0.8, 1.2", "m = 0.8, 1.2\nn = 3");
        let e = parse_config(&text).unwrap_err();
        assert_eq!(e.0.len(), 3, "{e}");
        let text = MINIMAL.replace("m = 0.8, 1.2", "m = 0.8, 1.2, 1.0");
        let e = parse_config(&text).unwrap_err();
        assert!(e.0.iter().any(|x| x.key == "grid.sizes"));
    }

    #[test]
    fn errors_are_aggregated() {
        let text = MINIMAL
            .replace("t_end = 1", "t_end = soon\ncolour = red")
            .replace("generator = gaussian", "generator = spline");
        let e = parse_config(&text).unwrap_err();
        let keys: Vec<&str> = e.0.iter().map(|x| x.key.as_str()).collect();
        assert!(keys.contains(&"run.t_end"));
        assert!(keys.contains(&"run.colour"));
        assert!(keys.contains(&"initial.generator"));
    }

    #[test]
    fn missing_sections() {
        let e = parse_config("[exponents]\nm = 1\n").unwrap_err();
        let missing: Vec<&str> = e
            .0
            .iter()
            .filter(|x| x.message == "missing required section")
            .map(|x| x.key.as_str())
            .collect();
        assert_eq!(missing, vec!["grid", "initial", "run"]);
    }

    #[test]
    fn round_trip() {
        let text = MINIMAL.to_string()
            + "snapshot_times = 0.25, 0.5\n[barrier]\nc0 = 2\na = 1.5\nhorizon = 1\n[checks]\nselect = mass, decay\nenvelope_c1 = 0.3\nrescaled_sizes = 32, 32\n[output]\ndir = results/a\nseed = 42\n";
        let c = parse_config(&text).unwrap();
        let again = parse_config(&serialize(&c)).unwrap();
        assert_eq!(c, again);
        assert_eq!(serialize(&c), serialize(&again));
    }

    #[test]
    fn tolerances_must_be_positive() {
        let text = MINIMAL.to_string() + "[checks]\nmass_tol = 0\ndecay_window = 5, 1\n";
        let e = parse_config(&text).unwrap_err();
        assert_eq!(e.0.len(), 2, "{e}");
    }
}
