//! Command implementations behind the `hsflow` binary: each builds a
//! serializable report plus a plain-text rendering of it.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hsflow::datum::{emit_datum, parse_datum};
use hsflow::evolution::check_semigroup;
use hsflow::verify::{
    alpha_sample_grid, oracle_pushforward, sampling_window, standard_times, suite_asymptotics,
    suite_characteristic_ode, suite_conservation, suite_parametrization, suite_structure,
    suite_weak_form, CheckReport,
};
use hsflow::{
    evolve, predict_singular_times, AlphaParametrization, InitialDatum, Snapshot, Tolerances,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerance used by report-level checks (semi-group, verification suites).
pub const DEFAULT_CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Config {
    #[serde(flatten)]
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

impl Config {
    pub fn new(tolerances: Tolerances) -> Self {
        Config {
            tolerances,
            seed: None,
        }
    }
}

pub fn load_datum(path: &Path) -> Result<InitialDatum> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_datum(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn build(datum: &InitialDatum, config: &Config) -> Result<AlphaParametrization> {
    Ok(AlphaParametrization::build(datum, config.tolerances)?)
}

/// Writes through a temporary file in the target directory so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityPiece {
    pub start: f64,
    pub end: f64,
    pub density: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AtomRecord {
    pub x: f64,
    pub mass: f64,
    /// Initial interval `[x₁, x₂]` the atom was collapsed from.
    pub source: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolveReport {
    pub version: &'static str,
    pub config: Config,
    pub t: f64,
    pub energy: f64,
    pub samples: Vec<[f64; 2]>,
    pub density_pieces: Vec<DensityPiece>,
    pub atoms: Vec<AtomRecord>,
}

fn atom_records(param: &AlphaParametrization, snap: &Snapshot) -> Vec<AtomRecord> {
    snap.mu
        .atoms()
        .iter()
        .map(|a| AtomRecord {
            x: a.location,
            mass: a.mass,
            source: a.source.map(|s| {
                let sx = param.source_interval(&s);
                [sx.start, sx.end]
            }),
        })
        .collect()
}

pub fn evolve_report(
    datum: &InitialDatum,
    config: &Config,
    t: f64,
    samples: usize,
) -> Result<EvolveReport> {
    if samples < 2 {
        bail!("--samples must be at least 2, got {samples}");
    }
    if !t.is_finite() {
        bail!("--time must be finite");
    }
    let param = build(datum, config)?;
    let snap = evolve(&param, t)?;
    let (lo, hi) = sampling_window(&param, t);
    let step = (hi - lo) / (samples - 1) as f64;
    let samples = (0..samples)
        .map(|k| {
            let x = if k == samples - 1 {
                hi
            } else {
                lo + step * k as f64
            };
            [x, snap.u.evaluate(x)]
        })
        .collect();
    let density_pieces = snap
        .mu
        .density()
        .pieces()
        .filter(|&(_, _, v)| v != 0.0)
        .map(|(start, end, density)| DensityPiece {
            start,
            end,
            density,
        })
        .collect();
    Ok(EvolveReport {
        version: VERSION,
        config: *config,
        t,
        energy: param.energy(),
        samples,
        density_pieces,
        atoms: atom_records(&param, &snap),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// `x,u` samples table.
pub fn samples_csv(report: &EvolveReport) -> String {
    let mut out = csv_preamble(report);
    out.push_str("x,u\n");
    for [x, u] in &report.samples {
        writeln!(out, "{x:.16e},{u:.16e}").unwrap();
    }
    out
}

/// Atom table: location, mass and the source interval.
pub fn atoms_csv(report: &EvolveReport) -> String {
    let mut out = csv_preamble(report);
    out.push_str("x,mass,source_start,source_end\n");
    for a in &report.atoms {
        let [s0, s1] = a.source.map_or([f64::NAN; 2], |s| s);
        writeln!(out, "{:.16e},{:.16e},{s0:.16e},{s1:.16e}", a.x, a.mass).unwrap();
    }
    out
}

fn csv_preamble(report: &EvolveReport) -> String {
    let c = &report.config;
    format!(
        "# hsflow {} t={:.16e} energy={:.16e} tol_x={:e} tol_v={:e} tol_slope={:e}\n",
        report.version,
        report.t,
        report.energy,
        c.tolerances.tol_x,
        c.tolerances.tol_v,
        c.tolerances.tol_slope
    )
}

/// Path of the atom table that accompanies a CSV sample file.
pub fn atoms_path(samples: &Path) -> std::path::PathBuf {
    let stem = samples
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    samples.with_file_name(format!("{stem}.atoms.csv"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventRecord {
    pub t: f64,
    pub slope: f64,
    pub mass: f64,
    pub atoms: Vec<AtomRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularReport {
    pub version: &'static str,
    pub config: Config,
    pub energy: f64,
    pub events: Vec<EventRecord>,
}

pub fn singular_report(datum: &InitialDatum, config: &Config) -> Result<SingularReport> {
    let param = build(datum, config)?;
    let events = predict_singular_times(&param)?
        .into_iter()
        .map(|e| EventRecord {
            t: e.t_star,
            slope: e.slope,
            mass: e.total_mass(),
            atoms: e
                .atoms
                .iter()
                .map(|a| AtomRecord {
                    x: a.location,
                    mass: a.mass,
                    source: Some([a.source_x.start, a.source_x.end]),
                })
                .collect(),
        })
        .collect();
    Ok(SingularReport {
        version: VERSION,
        config: *config,
        energy: param.energy(),
        events,
    })
}

pub fn singular_table(report: &SingularReport) -> String {
    let mut out = format!("energy {:.12}\n", report.energy);
    if report.events.is_empty() {
        out.push_str("no singular times\n");
        return out;
    }
    writeln!(
        out,
        "{:>14} {:>10} {:>8} {:>14}",
        "t", "slope", "atoms", "mass"
    )
    .unwrap();
    for e in &report.events {
        writeln!(
            out,
            "{:>14.8} {:>10.6} {:>8} {:>14.10}",
            e.t,
            e.slope,
            e.atoms.len(),
            e.mass
        )
        .unwrap();
        for a in &e.atoms {
            let src = a
                .source
                .map_or(String::new(), |[s0, s1]| format!("from [{s0}, {s1}]"));
            writeln!(out, "    x = {:<22} mass = {:<22} {src}", a.x, a.mass).unwrap();
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemigroupOutput {
    pub version: &'static str,
    pub config: Config,
    pub s: f64,
    pub t: f64,
    pub samples: usize,
    pub characteristic_deviation: f64,
    pub velocity_deviation: f64,
    pub measure_distance: f64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn semigroup_report(
    datum: &InitialDatum,
    config: &Config,
    s: f64,
    t: f64,
    tolerance: f64,
) -> Result<SemigroupOutput> {
    let param = build(datum, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0));
    let grid = alpha_sample_grid(&param, &mut rng, 256);
    let r = check_semigroup(&param, s, t, &grid)?;
    let max = r.max_deviation();
    Ok(SemigroupOutput {
        version: VERSION,
        config: *config,
        s,
        t,
        samples: grid.len(),
        characteristic_deviation: r.characteristic_deviation,
        velocity_deviation: r.velocity_deviation,
        measure_distance: r.measure_distance,
        max_deviation: max,
        tolerance,
        passed: max <= tolerance,
    })
}

pub fn semigroup_table(r: &SemigroupOutput) -> String {
    let verdict = if r.passed { "PASS" } else { "FAIL" };
    format!(
        "semi-group s = {} t = {} over {} samples\n  characteristics {:.3e}\n  velocity        {:.3e}\n  measure         {:.3e}\n{verdict} max deviation {:.3e} (tolerance {:e})\n",
        r.s,
        r.t,
        r.samples,
        r.characteristic_deviation,
        r.velocity_deviation,
        r.measure_distance,
        r.max_deviation,
        r.tolerance
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Conservation,
    Weak,
    Ode,
    Structure,
    Oracle,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub cells: usize,
    pub step: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub version: &'static str,
    pub config: Config,
    pub cells: usize,
    pub step: f64,
    pub times: Vec<f64>,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failing(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs the selected suites over `{-3, ..., 3}` and every predicted singular
/// time. The structure suite also covers the parametrization invariants and
/// the far-field values of `u`.
pub fn verify_report(
    datum: &InitialDatum,
    config: &Config,
    options: &VerifyOptions,
) -> Result<VerifyReport> {
    let param = build(datum, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0));
    let grid = alpha_sample_grid(&param, &mut rng, 256);
    let times = standard_times(&param)?;
    let tol = options.tolerance;
    let suite = options.suite;
    let mut checks = Vec::new();

    if suite.includes(Suite::Conservation) {
        checks.push(suite_conservation(&param, &times, tol)?);
    }
    if suite.includes(Suite::Weak) {
        checks.push(suite_weak_form(&param, &times, &grid, tol)?);
    }
    if suite.includes(Suite::Ode) {
        checks.push(suite_characteristic_ode(
            &param,
            &grid,
            &times,
            options.step,
            tol,
        )?);
    }
    if suite.includes(Suite::Structure) {
        for e in predict_singular_times(&param)? {
            let mut r = suite_structure(&param, e.t_star, tol)?;
            r.name = format!("structure(t={})", e.t_star);
            checks.push(r);
        }
        checks.push(suite_parametrization(&param, &times, tol)?);
        checks.push(suite_asymptotics(&param, &times, tol)?);
    }
    if suite.includes(Suite::Oracle) {
        for &t in &times {
            let mut r = oracle_pushforward(
                &param.characteristics(t),
                param.f(),
                options.cells,
                &config.tolerances,
                tol,
            )?;
            r.name = format!("oracle_pushforward(t={t})");
            checks.push(r);
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        version: VERSION,
        config: *config,
        cells: options.cells,
        step: options.step,
        times,
        checks,
        passed,
    })
}

pub fn verify_table(report: &VerifyReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<6} {:<40} {:>12} {:>10}",
        "", "check", "max error", "tolerance"
    )
    .unwrap();
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{verdict:<6} {:<40} {:>12.3e} {:>10.1e}",
            c.name, c.max_error, c.tolerance
        )
        .unwrap();
    }
    out
}

pub fn demo_text(datum: &InitialDatum) -> String {
    let mut s = emit_datum(datum);
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use hsflow::datum::{demo_atom, demo_intro};
    use hsflow::PiecewiseLinear;

    fn config() -> Config {
        Config::new(Tolerances::default())
    }

    #[test]
    fn evolve_intro_at_blow_up() {
        let r = evolve_report(&demo_intro(), &config(), 2.0, 101).unwrap();
        assert_eq!(r.atoms.len(), 1);
        assert_eq!(r.atoms[0].x, 0.0);
        assert_eq!(r.atoms[0].mass, 1.0);
        assert_eq!(r.atoms[0].source, Some([0.0, 1.0]));
        assert!(r.samples.iter().all(|s| s[1].abs() <= 1e-10));
        assert!(r.density_pieces.is_empty());
    }

    #[test]
    fn evolve_intro_at_one() {
        let r = evolve_report(&demo_intro(), &config(), 1.0, 11).unwrap();
        let p = build(&demo_intro(), &config()).unwrap();
        let u = evolve(&p, 1.0).unwrap().u;
        assert!((u.evaluate(0.125) + 0.25).abs() < 1e-15);
        let (lo, hi) = sampling_window(&p, 1.0);
        assert_eq!(r.samples[0][0], lo);
        assert_eq!(r.samples[10][0], hi);
    }

    #[test]
    fn evolve_atom_dissolves() {
        let r = evolve_report(&demo_atom(1.0).unwrap(), &config(), 2.0, 11).unwrap();
        assert!(r.atoms.is_empty());
        assert_eq!(
            r.density_pieces,
            vec![DensityPiece {
                start: 0.0,
                end: 1.0,
                density: 1.0
            }]
        );
    }

    #[test]
    fn evolve_rejects_bad_flags() {
        assert!(evolve_report(&demo_intro(), &config(), 1.0, 1).is_err());
        assert!(evolve_report(&demo_intro(), &config(), f64::NAN, 10).is_err());
    }

    #[test]
    fn csv_tables() {
        let r = evolve_report(&demo_intro(), &config(), 2.0, 3).unwrap();
        let samples = samples_csv(&r);
        assert!(samples.starts_with("# hsflow "));
        assert_eq!(samples.lines().nth(1), Some("x,u"));
        assert_eq!(samples.lines().count(), 5);
        let atoms = atoms_csv(&r);
        let row = atoms.lines().nth(2).unwrap();
        let parsed: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(parsed, vec![0.0, 1.0, 0.0, 1.0]);
        assert_eq!(
            atoms_path(Path::new("out/run.csv")),
            Path::new("out/run.atoms.csv")
        );
    }

    #[test]
    fn singular_intro() {
        let r = singular_report(&demo_intro(), &config()).unwrap();
        assert_eq!(r.events.len(), 1);
        assert_eq!(r.events[0].t, 2.0);
        assert_eq!(
            r.events[0].atoms,
            vec![AtomRecord {
                x: 0.0,
                mass: 1.0,
                source: Some([0.0, 1.0])
            }]
        );
        assert!(singular_table(&r).contains("mass = 1"));
    }

    #[test]
    fn semigroup_intro() {
        let r = semigroup_report(&demo_intro(), &config(), 1.0, 2.0, 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(semigroup_report(&demo_intro(), &config(), 2.0, 3.0, 1e-9).is_err());
    }

    #[test]
    fn verify_zero_datum() {
        let zero = InitialDatum::from_velocity(PiecewiseLinear::constant(0.0)).unwrap();
        let options = VerifyOptions {
            suite: Suite::All,
            cells: 1000,
            step: 0.5,
            tolerance: 1e-9,
        };
        let r = verify_report(&zero, &config(), &options).unwrap();
        assert!(r.passed);
        assert!(r.checks.iter().all(|c| c.max_error == 0.0), "{r:?}");
    }

    #[test]
    fn json_carries_version_and_config() {
        let mut c = config();
        c.seed = Some(9);
        let r = singular_report(&demo_intro(), &c).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"]["seed"], 9);
        assert_eq!(v["config"]["tol_slope"], 1e-10);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
    }
}
