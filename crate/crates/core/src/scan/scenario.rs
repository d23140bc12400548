//! Scenario documents (TOML). The schema is described in `crates/core/docs/scenario.md`.

use std::f64::consts::PI;
use std::fmt;

use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::atom::{HalfInt, LevelScheme};
use crate::jones::{c, C64, I};
use crate::optics::{Element, SolveOptions};

pub const SCHEMA_VERSION: i64 = 1;

/// Every problem found in a scenario document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<String>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

/// Incident polarization for custom configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    X,
    Y,
    SigmaPlus,
    SigmaMinus,
    None,
}

impl Polarization {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "x" => Self::X,
            "y" => Self::Y,
            "sigma_plus" => Self::SigmaPlus,
            "sigma_minus" => Self::SigmaMinus,
            "none" => Self::None,
            _ => return None,
        })
    }

    /// Lab-frame `(x, y)` components.
    pub fn lab_components(self) -> (C64, C64) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Self::X => (c(1.0), c(0.0)),
            Self::Y => (c(0.0), c(1.0)),
            Self::SigmaPlus => (c(s), -I * s),
            Self::SigmaMinus => (c(-s), -I * s),
            Self::None => (c(0.0), c(0.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Configuration {
    LinPerpLin,
    SigmaPlusMinus,
    /// Elements at positions in units of `1/k`; the atom is inserted at each
    /// grid point.
    Custom {
        elements: Vec<Element>,
        left: Polarization,
        right: Polarization,
        solver: SolveOptions,
    },
}

impl Configuration {
    pub fn name(&self) -> &'static str {
        match self {
            Self::LinPerpLin => "lin_perp_lin",
            Self::SigmaPlusMinus => "sigma_plus_minus",
            Self::Custom { .. } => "custom",
        }
    }
}

/// Sample points of a scan axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub values: Vec<f64>,
}

impl Grid {
    pub fn linspace(start: f64, stop: f64, points: usize, endpoint: bool) -> Self {
        let values = match points {
            0 => Vec::new(),
            1 => vec![start],
            n => {
                let div = if endpoint { n - 1 } else { n } as f64;
                (0..n).map(|i| start + (stop - start) * i as f64 / div).collect()
            }
        };
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub scheme: LevelScheme,
    pub configuration: Configuration,
    pub amplitude: f64,
    pub k: f64,
    pub tau_p: f64,
    /// Atom positions as `k x`.
    pub x_grid: Grid,
    /// Velocities as `k v tau_p`.
    pub v_grid: Grid,
    /// Hex SHA-256 of the source document.
    pub source_hash: String,
}

struct Reader {
    errors: Vec<String>,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

impl Reader {
    fn err(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    fn check_keys(&mut self, t: &Table, path: &str, allowed: &[&str]) {
        for key in t.keys() {
            if !allowed.contains(&key.as_str()) {
                self.err(format!(
                    "unknown key '{}' (expected one of: {})",
                    join(path, key),
                    allowed.join(", ")
                ));
            }
        }
    }

    fn table<'a>(&mut self, t: &'a Table, path: &str, key: &str) -> Option<&'a Table> {
        match t.get(key) {
            None => None,
            Some(Value::Table(inner)) => Some(inner),
            Some(_) => {
                self.err(format!("'{}' must be a table", join(path, key)));
                None
            }
        }
    }

    fn float(&mut self, t: &Table, path: &str, key: &str, default: Option<f64>) -> Option<f64> {
        match t.get(key) {
            None => {
                if default.is_none() {
                    self.err(format!("missing required key '{}'", join(path, key)));
                }
                default
            }
            Some(v) => match as_f64(v) {
                Some(f) if f.is_finite() => Some(f),
                Some(_) => {
                    self.err(format!("'{}' must be finite", join(path, key)));
                    None
                }
                None => {
                    self.err(format!("'{}' must be a number", join(path, key)));
                    None
                }
            },
        }
    }

    fn positive(&mut self, t: &Table, path: &str, key: &str, default: f64) -> Option<f64> {
        let v = self.float(t, path, key, Some(default))?;
        if v > 0.0 {
            Some(v)
        } else {
            self.err(format!("{} must be positive (got {v})", join(path, key)));
            None
        }
    }

    fn complex(&mut self, t: &Table, path: &str, key: &str, default: Option<C64>) -> Option<C64> {
        let name = join(path, key);
        match t.get(key) {
            None => {
                if default.is_none() {
                    self.err(format!("missing required key '{name}'"));
                }
                default
            }
            Some(Value::Array(parts)) if parts.len() == 2 => {
                match (as_f64(&parts[0]), as_f64(&parts[1])) {
                    (Some(re), Some(im)) if re.is_finite() && im.is_finite() => {
                        Some(C64::new(re, im))
                    }
                    _ => {
                        self.err(format!("'{name}' must be [re, im] with finite numbers"));
                        None
                    }
                }
            }
            Some(v) => match as_f64(v) {
                Some(f) if f.is_finite() => Some(c(f)),
                _ => {
                    self.err(format!("'{name}' must be a finite number or [re, im]"));
                    None
                }
            },
        }
    }

    fn half_int(&mut self, t: &Table, path: &str, key: &str, default: HalfInt) -> Option<HalfInt> {
        let name = join(path, key);
        let parsed = match t.get(key) {
            None => return Some(default),
            Some(Value::String(s)) => parse_half(s),
            Some(v) => as_f64(v).and_then(|f| HalfInt::from_f64(f).ok()),
        };
        match parsed {
            Some(h) if h.twice() >= 0 && h.twice() <= 40 => Some(h),
            _ => {
                self.err(format!(
                    "'{name}' must be a non-negative half-integer up to 20, such as 1 or \"3/2\""
                ));
                None
            }
        }
    }

    fn string<'a>(&mut self, t: &'a Table, path: &str, key: &str, default: &'a str) -> Option<&'a str> {
        match t.get(key) {
            None => Some(default),
            Some(Value::String(s)) => Some(s),
            Some(_) => {
                self.err(format!("'{}' must be a string", join(path, key)));
                None
            }
        }
    }

    fn count(&mut self, t: &Table, path: &str, key: &str, default: usize, max: usize) -> Option<usize> {
        match t.get(key) {
            None => Some(default),
            Some(Value::Integer(n)) if *n >= 1 && (*n as u64) <= max as u64 => Some(*n as usize),
            Some(_) => {
                self.err(format!("'{}' must be an integer in 1..={max}", join(path, key)));
                None
            }
        }
    }

    fn boolean(&mut self, t: &Table, path: &str, key: &str, default: bool) -> Option<bool> {
        match t.get(key) {
            None => Some(default),
            Some(Value::Boolean(b)) => Some(*b),
            Some(_) => {
                self.err(format!("'{}' must be true or false", join(path, key)));
                None
            }
        }
    }

    fn grid(&mut self, root: &Table, key: &str, default: (f64, f64, usize, bool)) -> Option<Grid> {
        let path = join("grid", key);
        let empty = Table::new();
        let t = root
            .get("grid")
            .and_then(Value::as_table)
            .and_then(|g| g.get(key))
            .map_or(Some(&empty), Value::as_table);
        let Some(t) = t else {
            self.err(format!("'{path}' must be a table"));
            return None;
        };
        self.check_keys(t, &path, &["start", "stop", "points", "endpoint", "values"]);
        if let Some(values) = t.get("values") {
            if ["start", "stop", "points", "endpoint"].iter().any(|k| t.contains_key(*k)) {
                self.err(format!("'{path}.values' cannot be combined with start/stop/points"));
                return None;
            }
            let list: Option<Vec<f64>> = values
                .as_array()
                .map(|a| a.iter().map(as_f64).collect::<Option<Vec<_>>>())
                .unwrap_or(None);
            return match list {
                Some(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Some(Grid { values: v }),
                _ => {
                    self.err(format!("'{path}.values' must be a non-empty list of finite numbers"));
                    None
                }
            };
        }
        let start = self.float(t, &path, "start", Some(default.0));
        let stop = self.float(t, &path, "stop", Some(default.1));
        let points = self.count(t, &path, "points", default.2, 1_000_000);
        let endpoint = self.boolean(t, &path, "endpoint", default.3);
        Some(Grid::linspace(start?, stop?, points?, endpoint?))
    }

    fn polarization(&mut self, t: &Table, path: &str, key: &str, default: &str) -> Option<Polarization> {
        let s = self.string(t, path, key, default)?;
        let p = Polarization::parse(s);
        if p.is_none() {
            self.err(format!(
                "'{}' must be one of x, y, sigma_plus, sigma_minus, none (got '{s}')",
                join(path, key)
            ));
        }
        p
    }

    fn element(&mut self, t: &Table, path: &str, k: f64) -> Option<Element> {
        let kind = match t.get("type") {
            Some(Value::String(s)) => s.as_str(),
            _ => {
                self.err(format!(
                    "'{path}.type' is required: one of mirror, waveplate, gap, rotator"
                ));
                return None;
            }
        };
        let position = self.float(t, path, "position", None);
        let element = match kind {
            "mirror" => {
                self.check_keys(t, path, &["type", "position", "reflectivity", "transmissivity"]);
                let r = self.complex(t, path, "reflectivity", None)?;
                if r.norm() > 1.0 {
                    self.err(format!("{path}.reflectivity must satisfy |r| <= 1 (got {})", r.norm()));
                    return None;
                }
                let t_default = I * (1.0 - r.norm_sqr()).sqrt();
                let tr = self.complex(t, path, "transmissivity", Some(t_default))?;
                if r.norm_sqr() + tr.norm_sqr() > 1.0 + 1e-12 {
                    self.err(format!("{path}: |r|^2 + |t|^2 must not exceed 1"));
                    return None;
                }
                Element::mirror([r; 2], [tr; 2], position? / k)
            }
            "waveplate" => {
                self.check_keys(t, path, &["type", "position", "retardance", "axis"]);
                let retardance = self.float(t, path, "retardance", None);
                let axis = self.float(t, path, "axis", Some(0.0));
                Element::waveplate(retardance?, axis?, position? / k)
            }
            "gap" => {
                self.check_keys(t, path, &["type", "position", "length"]);
                let length = self.float(t, path, "length", None)?;
                if length < 0.0 {
                    self.err(format!("{path}.length must be non-negative (got {length})"));
                    return None;
                }
                Element::gap(length / k, position? / k)
            }
            "rotator" => {
                self.check_keys(t, path, &["type", "position", "angle"]);
                let angle = self.float(t, path, "angle", None);
                Element::rotator(angle?, position? / k)
            }
            other => {
                self.err(format!(
                    "'{path}.type' must be one of mirror, waveplate, gap, rotator (got '{other}')"
                ));
                return None;
            }
        };
        Some(element)
    }
}

fn parse_half(s: &str) -> Option<HalfInt> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, "2")) => num.trim().parse::<i32>().ok().map(HalfInt::from_twice),
        Some(_) => None,
        None => s.parse::<i32>().ok().map(|n| HalfInt::from_twice(2 * n)),
    }
}

/// Parses and validates a scenario document, reporting every problem found.
pub fn parse_scenario(text: &str) -> Result<Scenario, ValidationErrors> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ValidationErrors(vec![format!("malformed document: {}", e.message())]))?;
    let mut r = Reader { errors: Vec::new() };
    r.check_keys(&root, "", &["schema_version", "atom", "beams", "grid", "solver", "elements"]);

    match root.get("schema_version") {
        Some(Value::Integer(SCHEMA_VERSION)) => {}
        Some(v) => r.err(format!("unsupported schema_version {v} (this build reads {SCHEMA_VERSION})")),
        None => r.err("missing required key 'schema_version'"),
    }

    let empty = Table::new();
    let atom = r.table(&root, "", "atom").unwrap_or(&empty);
    r.check_keys(atom, "atom", &["j_ground", "j_excited", "zeta0", "dzeta0_dk_imag"]);
    let j_g = r.half_int(atom, "atom", "j_ground", HalfInt::HALF);
    let j_e = r.half_int(atom, "atom", "j_excited", HalfInt::from_twice(3));
    let zeta0 = r.complex(atom, "atom", "zeta0", Some(c(1e-4)));
    let dzeta = r.float(atom, "atom", "dzeta0_dk_imag", Some(0.0));

    let beams = r.table(&root, "", "beams").unwrap_or(&empty);
    r.check_keys(
        beams,
        "beams",
        &["configuration", "amplitude", "k", "tau_p", "left", "right"],
    );
    let config_name = r.string(beams, "beams", "configuration", "lin_perp_lin");
    let amplitude = r.positive(beams, "beams", "amplitude", 1.0);
    let k = r.positive(beams, "beams", "k", 1.0);
    let tau_p = r.positive(beams, "beams", "tau_p", 1.0);

    if let Some(g) = r.table(&root, "", "grid") {
        r.check_keys(g, "grid", &["x", "v"]);
    }
    let x_grid = r.grid(&root, "x", (0.0, PI, 64, false));
    let v_grid = r.grid(&root, "v", (-0.1, 0.1, 21, true));

    let configuration = match config_name {
        Some("lin_perp_lin") | Some("sigma_plus_minus") => {
            for key in ["left", "right"] {
                if beams.contains_key(key) {
                    r.err(format!("'beams.{key}' only applies to the custom configuration"));
                }
            }
            for key in ["elements", "solver"] {
                if root.contains_key(key) {
                    r.err(format!("'{key}' only applies to the custom configuration"));
                }
            }
            if config_name == Some("lin_perp_lin") {
                Some(Configuration::LinPerpLin)
            } else {
                Some(Configuration::SigmaPlusMinus)
            }
        }
        Some("custom") => {
            let left = r.polarization(beams, "beams", "left", "x");
            let right = r.polarization(beams, "beams", "right", "none");
            let solver = r.table(&root, "", "solver").unwrap_or(&empty);
            r.check_keys(solver, "solver", &["max_iterations", "tolerance", "damping"]);
            let defaults = SolveOptions::default();
            let max_iterations = r.count(solver, "solver", "max_iterations", defaults.max_iterations, 100_000);
            let tolerance = r.positive(solver, "solver", "tolerance", defaults.tolerance);
            let damping = r.float(solver, "solver", "damping", Some(defaults.damping));
            if let Some(d) = damping {
                if !(d > 0.0 && d <= 1.0) {
                    r.err(format!("solver.damping must lie in (0, 1] (got {d})"));
                }
            }
            let mut elements = Vec::new();
            match root.get("elements") {
                None => {}
                Some(Value::Array(items)) => {
                    for (i, item) in items.iter().enumerate() {
                        let path = format!("elements[{i}]");
                        match item.as_table() {
                            Some(t) => {
                                if let Some(e) = r.element(t, &path, k.unwrap_or(1.0)) {
                                    elements.push(e);
                                }
                            }
                            None => r.err(format!("'{path}' must be a table")),
                        }
                    }
                }
                Some(_) => r.err("'elements' must be an array of tables"),
            }
            for pair in elements.windows(2) {
                if !(pair[1].position > pair[0].position) {
                    r.err("elements must be listed at strictly increasing positions");
                    break;
                }
            }
            if left == Some(Polarization::None) && right == Some(Polarization::None) {
                r.err("custom configuration needs at least one incident beam");
            }
            Some(Configuration::Custom {
                elements,
                left: left.unwrap_or(Polarization::None),
                right: right.unwrap_or(Polarization::None),
                solver: SolveOptions {
                    max_iterations: max_iterations.unwrap_or(defaults.max_iterations),
                    tolerance: tolerance.unwrap_or(defaults.tolerance),
                    damping: damping.unwrap_or(defaults.damping),
                    ..defaults
                },
            })
        }
        Some(other) => {
            r.err(format!(
                "beams.configuration must be one of lin_perp_lin, sigma_plus_minus, custom (got '{other}')"
            ));
            None
        }
        None => None,
    };

    let scheme = match (j_g, j_e, zeta0, dzeta) {
        (Some(jg), Some(je), Some(z), Some(d)) => match LevelScheme::new(jg, je, z, C64::new(0.0, d)) {
            Ok(s) => Some(s),
            Err(e) => {
                r.err(format!("atom: {e}"));
                None
            }
        },
        _ => None,
    };

    if !r.errors.is_empty() {
        return Err(ValidationErrors(r.errors));
    }
    // All parts are present once no error was recorded.
    let hash = Sha256::digest(text.as_bytes());
    Ok(Scenario {
        scheme: scheme.expect("validated"),
        configuration: configuration.expect("validated"),
        amplitude: amplitude.expect("validated"),
        k: k.expect("validated"),
        tau_p: tau_p.expect("validated"),
        x_grid: x_grid.expect("validated"),
        v_grid: v_grid.expect("validated"),
        source_hash: format!("{hash:x}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_uses_defaults() {
        let s = parse_scenario("schema_version = 1\n").unwrap();
        assert_eq!(s.scheme.j_ground(), HalfInt::HALF);
        assert_eq!(s.scheme.j_excited(), HalfInt::from_twice(3));
        assert_eq!(s.configuration, Configuration::LinPerpLin);
        assert_eq!(s.x_grid.len(), 64);
        assert_eq!(s.x_grid.values[0], 0.0);
        assert!(*s.x_grid.values.last().unwrap() < PI);
        assert_eq!(s.v_grid.len(), 21);
        assert_eq!(s.v_grid.values[0], -0.1);
        assert_eq!(s.v_grid.values[20], 0.1);
        assert_eq!(s.source_hash.len(), 64);
    }

    #[test]
    fn sigma_document() {
        let doc = r#"
schema_version = 1
[atom]
j_ground = 1
j_excited = "2"
zeta0 = [1e-4, 0.0]
dzeta0_dk_imag = 0.5
[beams]
configuration = "sigma_plus_minus"
"#;
        let s = parse_scenario(doc).unwrap();
        assert_eq!(s.scheme.n_ground(), 3);
        assert_eq!(s.configuration, Configuration::SigmaPlusMinus);
        assert_eq!(s.scheme.dzeta0_dk, C64::new(0.0, 0.5));
    }

    #[test]
    fn all_errors_are_reported() {
        let doc = r#"
schema_version = 1
colour = "blue"
[beams]
tau_p = -1
configuration = "lin_perp_lin"
[grid.x]
points = 0
"#;
        let e = parse_scenario(doc).unwrap_err();
        assert_eq!(e.0.len(), 3, "{e}");
        assert!(e.0.iter().any(|m| m.contains("tau_p must be positive")));
        assert!(e.0.iter().any(|m| m.contains("'colour'")));
        assert!(e.0.iter().any(|m| m.contains("grid.x.points")));
    }

    #[test]
    fn bad_version_and_syntax() {
        assert!(parse_scenario("schema_version = 2").is_err());
        assert!(parse_scenario("").is_err());
        assert!(parse_scenario("schema_version = ").is_err());
    }

    #[test]
    fn custom_elements() {
        let doc = r#"
schema_version = 1
[beams]
configuration = "custom"
k = 2.0
left = "sigma_plus"
[[elements]]
type = "waveplate"
position = 4.0
retardance = 1.5707963267948966
axis = 0.785
[[elements]]
type = "mirror"
position = 6.0
reflectivity = -1
"#;
        let s = parse_scenario(doc).unwrap();
        match s.configuration {
            Configuration::Custom { elements, left, right, .. } => {
                assert_eq!(elements.len(), 2);
                assert_eq!(elements[0].position, 2.0);
                assert_eq!(left, Polarization::SigmaPlus);
                assert_eq!(right, Polarization::None);
            }
            other => panic!("{other:?}"),
        }
        let bad = doc.replace("retardance", "retard");
        let e = parse_scenario(&bad).unwrap_err();
        assert!(e.0.iter().any(|m| m.contains("'elements[0].retard'")), "{e}");
    }

    #[test]
    fn half_integers() {
        assert_eq!(parse_half("3/2"), Some(HalfInt::from_twice(3)));
        assert_eq!(parse_half("2"), Some(HalfInt::from_twice(4)));
        assert_eq!(parse_half("1/3"), None);
    }

    #[test]
    fn explicit_values_grid() {
        let s = parse_scenario("schema_version = 1\n[grid.v]\nvalues = [0]\n").unwrap();
        assert_eq!(s.v_grid.values, vec![0.0]);
    }
}
