//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs without the test harness so the lines always reach stdout:
//! `cargo test -p hsflow-core --test acceptance`.

use hsflow::datum::{cantor_kept_length, demo_atom, demo_cantor, demo_intro};
use hsflow::evolution::{check_semigroup, evolve, predict_singular_times};
use hsflow::verify::{
    alpha_sample_grid, oracle_pushforward, random_datum, random_monotone_pair, standard_times,
    suite_asymptotics, suite_characteristic_ode, suite_conservation, suite_parametrization,
    suite_structure, suite_weak_form, CheckReport,
};
use std::process::ExitCode;

use hsflow::{AlphaParametrization, InitialDatum, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    max_error: f64,
    tolerance: f64,
    failures: Vec<String>,
}

impl Outcome {
    fn new(tolerance: f64) -> Self {
        Outcome {
            max_error: 0.0,
            tolerance,
            failures: Vec::new(),
        }
    }

    fn error(&mut self, label: impl FnOnce() -> String, error: f64) {
        let error = if error.is_nan() { f64::INFINITY } else { error };
        self.max_error = self.max_error.max(error);
        if error > self.tolerance {
            self.failures.push(format!("{} (error {error:e})", label()));
        }
    }

    fn fail(&mut self, label: String) {
        self.failures.push(label);
    }

    fn report(&mut self, label: impl FnOnce() -> String, report: &CheckReport) {
        self.max_error = self.max_error.max(report.max_error);
        if !report.passed {
            self.failures.push(format!(
                "{}: {} max_error {:e} > {:e}",
                label(),
                report.name,
                report.max_error,
                report.tolerance
            ));
        }
    }

    fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

type Criterion = fn() -> Outcome;

fn param(d: &InitialDatum) -> AlphaParametrization {
    AlphaParametrization::build(d, Tolerances::default()).unwrap()
}

fn seeded(seed: u64) -> (AlphaParametrization, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_datum(&mut rng);
    (param(&d), rng)
}

fn intro_blow_up() -> Outcome {
    let mut out = Outcome::new(1e-10);
    let p = param(&demo_intro());
    let snap = evolve(&p, 2.0).unwrap();
    let atoms = snap.mu.atoms();
    if atoms.len() != 1 {
        out.fail(format!("expected one atom at t = 2, found {}", atoms.len()));
    } else {
        out.error(|| "atom location".into(), atoms[0].location.abs());
        out.error(|| "atom mass".into(), (atoms[0].mass - 1.0).abs());
    }
    for k in 0..1000 {
        let x = -5.0 + 10.0 * k as f64 / 999.0;
        out.error(|| format!("u({x}, 2)"), snap.u.evaluate(x).abs());
    }
    let snap = evolve(&p, 1.0).unwrap();
    for k in 0..1000 {
        let x = -1.0 + 3.0 * k as f64 / 999.0;
        let expected = if x <= 0.0 {
            0.0
        } else if x < 0.25 {
            -2.0 * x
        } else {
            -0.5
        };
        out.error(
            || format!("u({x}, 1)"),
            (snap.u.evaluate(x) - expected).abs(),
        );
    }
    out
}

fn conservation() -> Outcome {
    let mut out = Outcome::new(1e-9);
    for seed in 0..100 {
        let (p, _) = seeded(seed);
        let times = standard_times(&p).unwrap();
        let r = suite_conservation(&p, &times, 1e-9).unwrap();
        out.report(|| format!("seed {seed}"), &r);
    }
    out
}

fn semigroup() -> Outcome {
    let mut out = Outcome::new(1e-9);
    for seed in 1000..1050 {
        let (p, mut rng) = seeded(seed);
        let singular: Vec<f64> = predict_singular_times(&p)
            .unwrap()
            .iter()
            .map(|e| e.t_star)
            .collect();
        let has_atoms = !p.datum().atoms().is_empty();
        let s = loop {
            let s: f64 = rng.gen_range(-3.0..3.0);
            // near a singular time the density is huge on a tiny interval and the
            // CDF comparison amplifies location rounding, so keep t = s ± 1 away too
            let near_event = singular
                .iter()
                .any(|&t| [s - 1.0, s, s + 1.0].iter().any(|&r| (t - r).abs() < 0.1));
            if !near_event && !(has_atoms && s.abs() < 0.1) {
                break s;
            }
        };
        let grid = p.grid();
        let (lo, hi) = (grid[0] - 1.0, grid[grid.len() - 1] + 1.0);
        let alphas: Vec<f64> = (0..256).map(|_| rng.gen_range(lo..hi)).collect();
        for t in [s - 1.0, s + 1.0] {
            match check_semigroup(&p, s, t, &alphas) {
                Ok(r) => {
                    out.error(
                        || format!("seed {seed} s {s} t {t} characteristics"),
                        r.characteristic_deviation,
                    );
                    out.error(
                        || format!("seed {seed} s {s} t {t} velocity"),
                        r.velocity_deviation,
                    );
                    out.error(
                        || format!("seed {seed} s {s} t {t} measure"),
                        r.measure_distance,
                    );
                }
                Err(e) => out.fail(format!("seed {seed} s {s} t {t}: {e}")),
            }
        }
    }
    out
}

fn atom_dissolution() -> Outcome {
    let mut out = Outcome::new(1e-10);
    for m in [0.5, 1.0, 3.0] {
        let p = param(&demo_atom(m).unwrap());
        for t in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
            let mu = evolve(&p, t).unwrap().mu;
            if !mu.atoms().is_empty() {
                out.fail(format!("m {m} t {t}: {} atoms", mu.atoms().len()));
            }
            let mut support = 0.0;
            for (lo, hi, v) in mu.density().pieces() {
                if v == 0.0 {
                    continue;
                }
                support += hi - lo;
                out.error(
                    || format!("m {m} t {t} density on ({lo}, {hi})"),
                    (v - 4.0 / (t * t)).abs(),
                );
            }
            out.error(
                || format!("m {m} t {t} support length"),
                (support - m * t * t / 4.0).abs(),
            );
            out.error(
                || format!("m {m} t {t} total mass"),
                (mu.total_mass() - m).abs(),
            );
        }
    }
    out
}

fn singular_mass_formula() -> Outcome {
    let mut out = Outcome::new(1e-10);
    let intro = param(&demo_intro());
    out.report(
        || "intro t = 2".into(),
        &suite_structure(&intro, 2.0, 1e-10).unwrap(),
    );
    for m in [0.5, 1.0, 3.0] {
        let p = param(&demo_atom(m).unwrap());
        for t in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
            out.report(
                || format!("atom m {m} t {t}"),
                &suite_structure(&p, t, 1e-10).unwrap(),
            );
        }
    }
    // criteria 2 and 3 data, then 50 fresh ones
    for seed in (0..100).chain(1000..1050).chain(2000..2050) {
        let (p, _) = seeded(seed);
        for event in predict_singular_times(&p).unwrap() {
            let t = event.t_star;
            for a in &event.atoms {
                let predicted = 4.0 / (t * t) * (a.source_x.end - a.source_x.start);
                out.error(
                    || format!("seed {seed} t {t} mass at {}", a.location),
                    (a.mass - predicted).abs(),
                );
            }
            out.report(
                || format!("seed {seed} t {t}"),
                &suite_structure(&p, t, 1e-10).unwrap(),
            );
        }
    }
    out
}

fn fat_cantor() -> Outcome {
    let mut out = Outcome::new(1e-9);
    for depth in [2, 4, 8, 12] {
        let p = param(&demo_cantor(depth).unwrap());
        let mu = evolve(&p, 2.0).unwrap().mu;
        if mu.atoms().len() != 1 << depth {
            out.fail(format!(
                "depth {depth}: {} atoms, expected {}",
                mu.atoms().len(),
                1u64 << depth
            ));
        }
        let kept = cantor_kept_length(depth);
        out.error(
            || format!("depth {depth} atom mass"),
            (mu.pp_mass() - kept).abs(),
        );
        let gap = mu.pp_mass() - 0.5;
        out.error(
            || format!("depth {depth} distance to 1/2"),
            (gap - 0.5f64.powi(depth as i32 + 1)).abs(),
        );
    }
    out
}

fn weak_form_and_ode() -> Outcome {
    let mut out = Outcome::new(1e-9);
    for seed in 3000..3050 {
        let (p, mut rng) = seeded(seed);
        let times = standard_times(&p).unwrap();
        let grid = alpha_sample_grid(&p, &mut rng, 256);
        out.report(
            || format!("seed {seed}"),
            &suite_weak_form(&p, &times, &grid, 1e-9).unwrap(),
        );
        out.report(
            || format!("seed {seed}"),
            // y is quadratic in t, so any step is exact; a wide one keeps the
            // rounding of |y| ~ 1e2 at t = 16 well below the tolerance
            &suite_characteristic_ode(&p, &grid, &times, 0.5, 1e-9).unwrap(),
        );
    }
    out
}

fn pushforward_oracle() -> Outcome {
    let mut out = Outcome::new(1e-6);
    let tol = Tolerances::default();
    for seed in 4000..4050 {
        let (x_map, g) = random_monotone_pair(&mut ChaCha8Rng::seed_from_u64(seed));
        let r = oracle_pushforward(&x_map, &g, 1_000_000, &tol, 1e-6).unwrap();
        out.report(|| format!("seed {seed}"), &r);
    }
    let p = param(&demo_intro());
    let r = oracle_pushforward(&p.characteristics(2.0), p.f(), 1_000_000, &tol, 1e-9).unwrap();
    out.report(|| "intro t = 2".into(), &r);
    out
}

fn structural_invariants() -> Outcome {
    let mut out = Outcome::new(1e-10);
    for seed in 5000..5100 {
        let (p, _) = seeded(seed);
        let times = standard_times(&p).unwrap();
        out.report(
            || format!("seed {seed}"),
            &suite_parametrization(&p, &times, 1e-10).unwrap(),
        );
    }
    out
}

fn asymptotics() -> Outcome {
    let mut out = Outcome::new(1e-12);
    for seed in 6000..6020 {
        let (p, _) = seeded(seed);
        let r = suite_asymptotics(&p, &[-2.0, -1.0, 1.0, 2.0], 1e-12).unwrap();
        out.report(|| format!("seed {seed}"), &r);
    }
    out
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("intro example blow-up", intro_blow_up),
        ("energy conservation", conservation),
        ("semi-group property", semigroup),
        ("atom dissolution", atom_dissolution),
        ("singular mass formula", singular_mass_formula),
        ("fat Cantor limit", fat_cantor),
        ("weak form / characteristic ODE", weak_form_and_ode),
        ("push-forward oracle", pushforward_oracle),
        ("structural invariants", structural_invariants),
        ("asymptotics", asymptotics),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let verdict = if out.passed() { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {:>2} {name}: max error {:.3e} (tolerance {:e})",
            i + 1,
            out.max_error,
            out.tolerance
        );
        for f in out.failures.iter().take(5) {
            println!("       {f}");
        }
        if !out.passed() {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
