use std::path::{Path, PathBuf};

use fgs_core::model::{autonomous_spec, gaussian_bump_spec, AutonomousNonlinearity, SpatialSpec};
use fgs_core::solvers::SolverConfig;
use fgs_core::spectral::Grid;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    nonlinearity: NonlinearitySection,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    path: PathSection,
    #[serde(default)]
    spatial: SpatialSection,
    #[serde(default)]
    kernel: KernelSection,
    #[serde(default)]
    output: OutputSection,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    #[serde(rename = "N")]
    dim: Option<i64>,
    #[serde(rename = "M")]
    points: Option<i64>,
    #[serde(rename = "L")]
    half_length: Option<f64>,
    alpha: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NonlinearitySection {
    kind: Option<String>,
    p: Option<f64>,
    q: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    table: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    step: Option<f64>,
    max_iters: Option<i64>,
    grad_tol: Option<f64>,
    pohozaev_tol: Option<f64>,
    project_every: Option<i64>,
    enforce_positive: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathSection {
    tmin: Option<f64>,
    tmax: Option<f64>,
    samples: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpatialSection {
    problem: Option<String>,
    b0: Option<f64>,
    c0: Option<f64>,
    width: Option<f64>,
    p: Option<f64>,
    v_inf: Option<f64>,
    mu: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSection {
    kind: Option<String>,
    delta0: Option<f64>,
    r_min: Option<f64>,
    r_max: Option<f64>,
    samples: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    seed: Option<i64>,
    threads: Option<i64>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub alpha: Option<f64>,
    pub dim: Option<usize>,
    pub points: Option<usize>,
    pub half_length: Option<f64>,
    pub p: Option<f64>,
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    #[serde(rename = "N")]
    pub dim: usize,
    #[serde(rename = "M")]
    pub points: usize,
    #[serde(rename = "L")]
    pub half_length: f64,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearitySpec {
    Power { p: f64 },
    DoublePower { a: f64, p: f64, b: f64, q: f64 },
    Table { path: PathBuf, s: Vec<f64>, f: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSpec {
    pub tmin: f64,
    pub tmax: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum SpatialProblem {
    GaussianBump { b0: f64, c0: f64, width: f64, p: f64 },
    Autonomous { v_inf: f64, mu: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelChoice {
    Bessel,
    Resolvent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelSpec {
    pub kind: KernelChoice,
    pub delta0: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub nonlinearity: NonlinearitySpec,
    pub solver: SolverConfig,
    pub path: PathSpec,
    pub spatial: SpatialProblem,
    pub kernel: KernelSpec,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// `0` leaves the thread count to the runtime.
    pub threads: usize,
}

impl RunConfig {
    pub fn make_grid(&self) -> Result<Grid, CliError> {
        let g = &self.grid;
        Grid::new(g.dim, g.alpha, g.half_length, g.points).map_err(|e| CliError::range("grid", e))
    }

    pub fn make_nonlinearity(&self) -> Result<AutonomousNonlinearity, CliError> {
        let built = match &self.nonlinearity {
            NonlinearitySpec::Power { p } => AutonomousNonlinearity::power(*p),
            NonlinearitySpec::DoublePower { a, p, b, q } => AutonomousNonlinearity::double_power(*a, *p, *b, *q),
            NonlinearitySpec::Table { s, f, .. } => AutonomousNonlinearity::table(s.clone(), f.clone()),
        };
        built.map_err(|e| CliError::range("nonlinearity", e))
    }

    pub fn make_spatial(&self) -> Result<SpatialSpec, CliError> {
        match &self.spatial {
            SpatialProblem::GaussianBump { b0, c0, width, p } => {
                gaussian_bump_spec(*b0, *c0, *width, *p).map_err(|e| CliError::range("spatial", e))
            }
            SpatialProblem::Autonomous { v_inf, mu } => Ok(autonomous_spec(*v_inf, self.make_nonlinearity()?, *mu)),
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_text(text: &str, json: bool) -> Result<FileConfig, CliError> {
    if json {
        serde_json::from_str(text).map_err(|e| CliError::ConfigParse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    } else {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            CliError::ConfigParse {
                line,
                column,
                message: e.message().trim().to_string(),
            }
        })
    }
}

fn range<T>(key: &str, ok: bool, value: T) -> Result<T, CliError> {
    if ok {
        Ok(value)
    } else {
        Err(CliError::ConfigRange(key.to_string()))
    }
}

fn count(key: &str, v: i64, lo: i64, hi: i64) -> Result<usize, CliError> {
    range(key, (lo..=hi).contains(&v), v as usize)
}

/// Reads `path` (JSON when the extension is `.json`, sectioned `key = value`
/// text otherwise), applies `overrides` and validates every field.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let (file, base) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::ConfigFile(format!("{}: {e}", p.display())))?;
            let json = p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
            (parse_text(&text, json)?, p.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (parse_text("", false)?, PathBuf::new()),
    };
    build(file, &base, overrides)
}

/// Parses configuration text directly; table paths resolve against `base`.
pub fn parse_config(text: &str, json: bool, base: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    build(parse_text(text, json)?, base, overrides)
}

fn build(file: FileConfig, base: &Path, o: &Overrides) -> Result<RunConfig, CliError> {
    let defaults = SolverConfig::default();

    let dim = match o.dim {
        Some(n) => n,
        None => count("N", file.grid.dim.unwrap_or(2), 1, 3)?,
    };
    let dim = range("N", (1..=3).contains(&dim), dim)?;
    let points = match o.points {
        Some(m) => m,
        None => count("M", file.grid.points.unwrap_or(128), 8, 1 << 16)?,
    };
    let points = range("M", points >= 8 && points % 2 == 0 && (points as f64).powi(dim as i32) <= (1u64 << 26) as f64, points)?;
    let half_length = o.half_length.or(file.grid.half_length).unwrap_or(20.0);
    let half_length = range("L", half_length > 0.0 && half_length.is_finite(), half_length)?;
    let alpha = o.alpha.or(file.grid.alpha).unwrap_or(0.75);
    let alpha = range("alpha", alpha > 0.0 && alpha <= 1.0, alpha)?;

    let nl = &file.nonlinearity;
    let p = o.p.or(nl.p).unwrap_or(3.0);
    let nonlinearity = match nl.kind.as_deref().unwrap_or("power") {
        "power" => NonlinearitySpec::Power {
            p: range("p", p > 1.0 && p.is_finite(), p)?,
        },
        "double_power" => {
            let q = nl.q.ok_or_else(|| CliError::ConfigRange("q".into()))?;
            let a = nl.a.unwrap_or(1.0);
            let b = nl.b.unwrap_or(1.0);
            NonlinearitySpec::DoublePower {
                a: range("a", a.is_finite(), a)?,
                p: range("p", p > 1.0 && p.is_finite(), p)?,
                b: range("b", b.is_finite(), b)?,
                q: range("q", q > 1.0 && q.is_finite(), q)?,
            }
        }
        "table" => {
            let rel = nl.table.clone().ok_or_else(|| CliError::ConfigRange("table".into()))?;
            let path = if rel.is_absolute() { rel } else { base.join(rel) };
            let (s, f) = read_table(&path)?;
            NonlinearitySpec::Table { path, s, f }
        }
        _ => return Err(CliError::ConfigRange("kind".into())),
    };

    let sv = &file.solver;
    let solver = SolverConfig {
        step: sv.step.unwrap_or(defaults.step),
        max_iters: count("max_iters", sv.max_iters.unwrap_or(defaults.max_iters as i64), 1, 100_000_000)?,
        grad_tol: sv.grad_tol.unwrap_or(defaults.grad_tol),
        pohozaev_tol: sv.pohozaev_tol.unwrap_or(defaults.pohozaev_tol),
        project_every: count("project_every", sv.project_every.unwrap_or(defaults.project_every as i64), 1, 1_000_000)?,
        enforce_positive: sv.enforce_positive.unwrap_or(defaults.enforce_positive),
        seed: 0,
    };
    range("step", solver.step > 0.0 && solver.step < 2.0, ())?;
    range("grad_tol", solver.grad_tol > 0.0 && solver.grad_tol.is_finite(), ())?;
    range("pohozaev_tol", solver.pohozaev_tol > 0.0 && solver.pohozaev_tol.is_finite(), ())?;

    let tmin = o.tmin.or(file.path.tmin).unwrap_or(0.5);
    let tmax = o.tmax.or(file.path.tmax).unwrap_or(2.0);
    range("tmin", tmin > 0.0 && tmin.is_finite(), ())?;
    range("tmax", tmax > tmin && tmax.is_finite(), ())?;
    let samples = match o.samples {
        Some(n) => n,
        None => count("samples", file.path.samples.unwrap_or(64), 2, 1_000_000)?,
    };
    let path = PathSpec {
        tmin,
        tmax,
        samples: range("samples", (2..=1_000_000).contains(&samples), samples)?,
    };

    let sp = &file.spatial;
    let spatial = match sp.problem.as_deref().unwrap_or("gaussian_bump") {
        "gaussian_bump" => {
            let (b0, c0, width, p) = (sp.b0.unwrap_or(0.5), sp.c0.unwrap_or(0.5), sp.width.unwrap_or(2.0), sp.p.unwrap_or(3.0));
            SpatialProblem::GaussianBump {
                b0: range("b0", b0.is_finite() && b0 >= 0.0, b0)?,
                c0: range("c0", c0.is_finite() && c0 >= 0.0, c0)?,
                width: range("width", width > 0.0 && width.is_finite(), width)?,
                p: range("p", p > 1.0 && p.is_finite(), p)?,
            }
        }
        "autonomous" => {
            let (v_inf, mu) = (sp.v_inf.unwrap_or(0.0), sp.mu.unwrap_or(p + 1.0));
            SpatialProblem::Autonomous {
                v_inf: range("v_inf", v_inf.is_finite() && v_inf < 1.0, v_inf)?,
                mu: range("mu", mu > 2.0 && mu.is_finite(), mu)?,
            }
        }
        _ => return Err(CliError::ConfigRange("problem".into())),
    };

    let k = &file.kernel;
    let kind = match k.kind.as_deref().unwrap_or("bessel") {
        "bessel" => KernelChoice::Bessel,
        "resolvent" => KernelChoice::Resolvent,
        _ => return Err(CliError::ConfigRange("kind".into())),
    };
    let delta0 = k.delta0.unwrap_or(0.25);
    let r_min = k.r_min.unwrap_or(1e-4);
    let r_max = k.r_max.unwrap_or(50.0);
    let kernel = KernelSpec {
        kind,
        delta0: range("delta0", delta0 > 0.0 && delta0 < 1.0, delta0)?,
        r_min: range("r_min", r_min > 0.0 && r_min.is_finite(), r_min)?,
        r_max: range("r_max", r_max > r_min && r_max.is_finite(), r_max)?,
        samples: count("samples", k.samples.unwrap_or(200), 2, 1_000_000)?,
    };

    let out_dir = o.out.clone().or(file.output.dir).unwrap_or_else(|| PathBuf::from("out"));
    let seed = match o.seed {
        Some(s) => s,
        None => {
            let s = file.run.seed.unwrap_or(0);
            range("seed", s >= 0, s as u64)?
        }
    };
    let threads = match o.threads {
        Some(t) => t,
        None => count("threads", file.run.threads.unwrap_or(0), 0, 4096)?,
    };
    Ok(RunConfig {
        grid: GridSpec {
            dim,
            points,
            half_length,
            alpha,
        },
        nonlinearity,
        solver: SolverConfig { seed, ..solver },
        path,
        spatial,
        kernel,
        out_dir,
        seed,
        threads,
    })
}

/// CSV with header `s,f` (or no header) and one node per row.
fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::ConfigFile(format!("{}: {e}", path.display())))?;
    let (mut s, mut f) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::ConfigFile(format!("{}: {e}", path.display())))?;
        let parse = |j: usize| record.get(j).and_then(|v| v.parse::<f64>().ok());
        match (parse(0), parse(1), record.len()) {
            (Some(a), Some(b), 2) => {
                s.push(a);
                f.push(b);
            }
            _ if i == 0 => continue,
            _ => {
                return Err(CliError::ConfigParse {
                    line: i + 1,
                    column: 1,
                    message: format!("{}: expected two numbers", path.display()),
                })
            }
        }
    }
    Ok((s, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, CliError> {
        parse_config(text, false, Path::new("."), &Overrides::default())
    }

    #[test]
    fn minimal_file_gets_defaults() {
        let c = parse("[grid]\nN = 2\n").unwrap();
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.grid.points, 128);
        assert_eq!(c.nonlinearity, NonlinearitySpec::Power { p: 3.0 });
        assert_eq!(c.path, PathSpec { tmin: 0.5, tmax: 2.0, samples: 64 });
    }

    #[test]
    fn range_errors_name_the_key() {
        assert_eq!(parse("[grid]\nalpha = 1.5\n").unwrap_err(), CliError::ConfigRange("alpha".into()));
        assert_eq!(parse("[grid]\nM = 127\n").unwrap_err(), CliError::ConfigRange("M".into()));
        assert_eq!(parse("[solver]\nstep = 3\n").unwrap_err(), CliError::ConfigRange("step".into()));
        assert_eq!(parse("[kernel]\ndelta0 = 1\n").unwrap_err(), CliError::ConfigRange("delta0".into()));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse("[grid]\nN = 2\nL = \"twenty\"\n").unwrap_err() {
            CliError::ConfigParse { line, column, .. } => assert_eq!((line, column), (3, 5)),
            e => panic!("{e:?}"),
        }
        assert!(matches!(parse("[grid]\ncolour = 1\n"), Err(CliError::ConfigParse { line: 2, .. })));
        assert!(matches!(parse("[nowhere]\n"), Err(CliError::ConfigParse { line: 1, .. })));
        let json = parse_config("{\"grid\": {\"N\": \"two\"}}", true, Path::new("."), &Overrides::default());
        assert!(matches!(json, Err(CliError::ConfigParse { line: 1, .. })));
    }

    #[test]
    fn flags_override_the_file() {
        let o = Overrides {
            points: Some(256),
            alpha: Some(0.6),
            ..Overrides::default()
        };
        let c = parse_config("[grid]\nM = 128\nalpha = 0.75\n", false, Path::new("."), &o).unwrap();
        assert_eq!(c.grid.points, 256);
        assert_eq!(c.grid.alpha, 0.6);
        let bad = Overrides {
            points: Some(7),
            ..Overrides::default()
        };
        assert_eq!(parse_config("", false, Path::new("."), &bad).unwrap_err(), CliError::ConfigRange("M".into()));
    }

    #[test]
    fn json_and_text_agree() {
        let text = parse("[grid]\nN = 1\nM = 64\nL = 10.0\nalpha = 0.5\n[run]\nseed = 4\n").unwrap();
        let json = parse_config(
            r#"{"grid": {"N": 1, "M": 64, "L": 10.0, "alpha": 0.5}, "run": {"seed": 4}}"#,
            true,
            Path::new("."),
            &Overrides::default(),
        )
        .unwrap();
        assert_eq!(text, json);
    }

    #[test]
    fn tables_are_read_relative_to_the_config() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("f.csv"), "s,f\n0,0\n1,1\n2,8\n").unwrap();
        let c = parse_config("[nonlinearity]\nkind = \"table\"\ntable = \"f.csv\"\n", false, dir.path(), &Overrides::default()).unwrap();
        match c.nonlinearity {
            NonlinearitySpec::Table { s, f, .. } => {
                assert_eq!(s, vec![0.0, 1.0, 2.0]);
                assert_eq!(f, vec![0.0, 1.0, 8.0]);
            }
            other => panic!("{other:?}"),
        }
        let missing = parse_config("[nonlinearity]\nkind = \"table\"\ntable = \"nope.csv\"\n", false, dir.path(), &Overrides::default());
        assert!(matches!(missing, Err(CliError::ConfigFile(_))));
    }
}
