//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or overruns its time budget.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fracstab::dynamics::{classify_orbit, decay_exponent, frac_orbit, scalar_orbit, OrbitVerdict, DEFAULT_TAIL};
use fracstab::mandelbrot::{
    coverage_report, eigen_to_c, eigenvalues, fixed_points, fom_raster, gamma_c_point, CoverageParams,
    DEFAULT_ITERATIONS, FOM_ESCAPE_RADIUS,
};
use fracstab::numerics::{principal_arg, PowerKind};
use fracstab::stability::{a_q, boundary_point, classify, region_area_grid, BOUNDARY_TOL};
use fracstab::{BranchPolicy, Complex64, Exec, Window};

const PRINCIPAL: BranchPolicy = BranchPolicy::PrincipalComplex;

/// Collected failures and notes of one criterion.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn within(actual: Complex64, expected: Complex64, tol: f64) -> bool {
    (actual.re - expected.re).abs() <= tol && (actual.im - expected.im).abs() <= tol
}

/// Orbit of `0` under the fractional map with parameter `c`.
fn fom_orbit(param: Complex64, q: f64) -> OrbitVerdict<Complex64> {
    let traj =
        frac_orbit(q, |z: &Complex64| z * z + param, c(0.0, 0.0), DEFAULT_ITERATIONS, FOM_ESCAPE_RADIUS).unwrap();
    classify_orbit(&traj, 1e-3, DEFAULT_TAIL)
}

fn real_a_q(z: Complex64, q: f64) -> Option<f64> {
    a_q(z, q, PRINCIPAL).unwrap().real()
}

/// `n` parameters strictly inside `(-π/2, π/2)`; both ends of the frontier
/// sit at the origin, where the argument is undefined.
fn open_thetas(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| -FRAC_PI_2 + PI * (k as f64 + 0.5) / n as f64)
}

fn magenta() -> Check {
    let mut ck = Check::default();
    let lambda = c(-0.5701, 0.3019);
    let param = eigen_to_c(lambda);
    ck.expect(within(param, c(-0.0585, 0.0861), 5e-4), format!("c = {param}"));
    ck.expect(classify(lambda, 0.85, PRINCIPAL, BOUNDARY_TOL).unwrap().is_stable(), "λ not stable");
    match fom_orbit(param, 0.85) {
        OrbitVerdict::ConvergedTo { point, .. } => {
            ck.expect(within(point, c(-0.2845, 0.1510), 1e-3), format!("orbit limit {point}"));
            ck.note(format!("limit ({:.5}, {:.5})", point.re, point.im));
        }
        other => ck.expect(false, format!("orbit {other:?}")),
    }
    let (z1, _) = fixed_points(param);
    ck.expect(within(z1, c(-0.2851, 0.1510), 1e-3), format!("i√c = {z1}"));
    ck
}

fn green() -> Check {
    let mut ck = Check::default();
    let param = eigen_to_c(c(0.1464, -0.2268));
    ck.expect(within(param, c(0.0075, 0.0166), 5e-4), format!("c = {param}"));
    let (z1, _) = fixed_points(param);
    ck.expect(within(z1, c(-0.0732, 0.1134), 1e-3), format!("i√c = {z1}"));
    match fom_orbit(param, 0.85) {
        OrbitVerdict::ConvergedTo { point, .. } => {
            ck.expect(within(point, z1, 1e-3), format!("orbit limit {point} vs i√c {z1}"));
            ck.note(format!("limit ({:.5}, {:.5}), |limit − i√c| = {:.1e}", point.re, point.im, (point - z1).norm()));
        }
        other => ck.expect(false, format!("orbit {other:?}")),
    }
    ck
}

fn blue() -> Check {
    let mut ck = Check::default();
    let param = eigen_to_c(c(0.1231, 0.5590));
    ck.expect(within(param, c(0.0743, 0.0344), 5e-4), format!("c = {param}"));
    match fom_orbit(param, 0.85) {
        OrbitVerdict::Diverged { escape_index } => ck.note(format!("diverged at step {escape_index}")),
        other => ck.expect(false, format!("orbit {other:?}")),
    }
    ck
}

fn modulus_anchors() -> Check {
    let mut ck = Check::default();
    let at_minus_one = real_a_q(c(-1.0, 0.0), 0.5);
    ck.expect(at_minus_one.is_some_and(|v| (v + 0.4142).abs() <= 5e-4), format!("a_q(−1) = {at_minus_one:?}"));
    let at_i = real_a_q(c(0.0, 1.0), 0.5);
    ck.expect(at_i.is_some_and(|v| v.abs() <= 1e-9), format!("a_q(i) = {at_i:?}"));
    ck.note(format!("a_q(−1) = {:.6}, a_q(i) = {:.1e}", at_minus_one.unwrap_or(f64::NAN), at_i.unwrap_or(f64::NAN)));
    ck
}

fn complex_sector_character() -> Check {
    let mut ck = Check::default();
    let q = 0.8;
    let sector = q * FRAC_PI_2;
    let (mut complex, mut tested) = (0, 0);
    for i in 0..720 {
        let angle = -PI + (i as f64 + 0.5) * 2.0 * PI / 720.0;
        for r in [0.05, 0.3, 0.9, 1.5, 3.0] {
            let z = Complex64::from_polar(r, angle);
            let kind = a_q(z, q, PRINCIPAL).unwrap().kind();
            tested += 1;
            let inside = principal_arg(z).abs() < sector;
            if kind == PowerKind::Complex {
                complex += 1;
            }
            ck.expect((kind == PowerKind::Complex) == inside, format!("z = {z}: {kind:?}"));
        }
    }
    ck.expect(complex > 0, "no complex a_q found");
    let interior = real_a_q(c(-0.5, 0.2), q);
    let exterior = real_a_q(c(-2.0, 0.5), q);
    ck.expect(interior.is_some_and(|v| v < 0.0), format!("interior a_q {interior:?}"));
    ck.expect(exterior.is_some_and(|v| v > 0.0), format!("exterior a_q {exterior:?}"));
    ck.note(format!("{complex} of {tested} points complex, all inside |arg| < 0.4π"));
    ck
}

fn boundary_identity() -> Check {
    let mut ck = Check::default();
    let mut worst = 0.0f64;
    for q in [0.3, 0.5, 0.8, 0.85] {
        for theta in open_thetas(10_000) {
            let z = boundary_point(q, theta);
            match real_a_q(z, q) {
                Some(v) => worst = worst.max(v.abs()),
                None => ck.expect(false, format!("q={q} θ={theta}: a_q not real")),
            }
            ck.expect(principal_arg(z).abs() >= q * FRAC_PI_2 - 1e-12, format!("q={q} θ={theta}: arg"));
        }
    }
    ck.expect(worst < 1e-9, format!("max |a_q| = {worst:e}"));
    ck.note(format!("max |a_q| = {worst:.1e}"));
    ck
}

/// Integer-order difference recursion `z ← z + (z² + c)`, coded directly.
fn direct_escape(param: Complex64, iterations: usize, radius: f64) -> Option<usize> {
    let mut z = c(0.0, 0.0);
    for n in 1..=iterations {
        z = z + (z * z + param);
        let norm = z.norm();
        if !norm.is_finite() || norm > radius {
            return Some(n);
        }
    }
    None
}

fn unit_order() -> Check {
    let mut ck = Check::default();
    let circle = open_thetas(10_000)
        .chain([-FRAC_PI_2, FRAC_PI_2])
        .map(|t| ((boundary_point(1.0, t) + 1.0).norm() - 1.0).abs())
        .fold(0.0, f64::max);
    ck.expect(circle <= 1e-12, format!("max ||z+1| − 1| = {circle:e}"));

    let area = region_area_grid(1.0, PRINCIPAL, Window::centered_square(2.05).unwrap(), 2000, Exec::Parallel).unwrap();
    ck.expect((area.value - PI).abs() <= 0.01 * PI, format!("area {}", area.value));

    let window = Window::new(-2.25, 0.75, -1.5, 1.5).unwrap();
    let raster = fom_raster(window, 500, 500, 1.0, DEFAULT_ITERATIONS, FOM_ESCAPE_RADIUS, Exec::Parallel).unwrap();
    let mismatched = raster
        .cells
        .iter()
        .enumerate()
        .filter(|(idx, cell)| {
            direct_escape(raster.map.center_of(*idx), DEFAULT_ITERATIONS, FOM_ESCAPE_RADIUS)
                != cell.escape_index.map(|n| n as usize)
        })
        .count();
    ck.expect(mismatched == 0, format!("{mismatched} pixels differ"));
    ck.note(format!(
        "circle err {circle:.1e}, area {:.5}, raster 500² with {} members identical",
        area.value,
        raster.member_count()
    ));
    ck
}

fn decay() -> Check {
    let mut ck = Check::default();
    let stable = scalar_orbit(0.5, c(-0.5, 0.0), c(1.0, 0.0), 4000).unwrap();
    let fit = decay_exponent(&stable, 400..=4000).unwrap();
    ck.expect((-0.65..=-0.35).contains(&fit.slope), format!("slope {}", fit.slope));

    let lambda = c(-2.5, 0.0);
    let flagged = !classify(lambda, 0.5, PRINCIPAL, BOUNDARY_TOL).unwrap().is_stable();
    ck.expect(flagged, "λ = −2.5 classified stable");
    let unstable = scalar_orbit(0.5, lambda, c(1.0, 0.0), 4000).unwrap();
    let norms = unstable.norms();
    let grows = unstable.escape_index.is_some() || norms.last().unwrap() >= &norms[0];
    ck.expect(grows, "λ = −2.5 orbit decays");
    ck.note(format!(
        "slope {:.4}; λ=−2.5 {}",
        fit.slope,
        match unstable.escape_index {
            Some(n) => format!("escapes at step {n}"),
            None => format!("final norm {:.3e}", norms.last().unwrap()),
        }
    ));
    ck
}

fn gamma_consistency() -> Check {
    let mut ck = Check::default();
    let mut worst = 0.0f64;
    for q in [0.5, 0.85] {
        for theta in open_thetas(1000) {
            let param = gamma_c_point(q, theta);
            let best = eigenvalues(param)
                .all()
                .iter()
                .filter_map(|&l| real_a_q(l, q).filter(|_| principal_arg(l).abs() >= q * FRAC_PI_2 - 1e-12))
                .map(f64::abs)
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
    }
    ck.expect(worst < 1e-8, format!("max |a_q| = {worst:e}"));
    ck.note(format!("max |a_q| = {worst:.1e}"));
    ck
}

fn conjecture_trend() -> Check {
    let mut ck = Check::default();
    let params = CoverageParams::default();
    let mut ratios = Vec::new();
    for q in [0.85, 0.5, 0.3, 0.1] {
        match coverage_report(q, &params, Exec::Parallel) {
            Ok(r) => ratios.push((q, r.ratio)),
            Err(e) => {
                ck.expect(false, format!("q={q}: {e}"));
                return ck;
            }
        }
    }
    ck.expect(ratios[0].1 < 1.0, format!("q=0.85 ratio {}", ratios[0].1));
    for pair in ratios[1..].windows(2) {
        ck.expect(pair[1].1 < pair[0].1, format!("ratio at q={} not below q={}", pair[1].0, pair[0].0));
    }
    ck.note(ratios.iter().map(|(q, r)| format!("q={q}: {r:.4}")).collect::<Vec<_>>().join(", "));
    ck
}

fn run_cli(args: &[&str], out: &Path, threads: usize) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_fracstab"))
        .args(args)
        .arg(format!("--threads={threads}"))
        .arg(format!("--out={}", out.display()))
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&status.stderr).into_owned())
    }
}

/// Every file in `dir` except the run manifest, sorted by name.
fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().is_some_and(|n| n != "manifest.jsonl"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Check {
    let mut ck = Check::default();
    let runs: [&[&str]; 4] = [
        &["domain", "--q", "0.8", "--size", "240x180"],
        &["mandelbrot", "--q", "0.85", "--size", "160x120", "--iters", "300"],
        &["mandelbrot", "--q", "1", "--map", "classic", "--overlay", "cardioid", "--size", "200x160", "--iters", "200"],
        &[
            "sweep",
            "--q-start",
            "0.2",
            "--q-end",
            "0.8",
            "--steps",
            "3",
            "--size",
            "64x64",
            "--iters",
            "150",
            "--fractal",
        ],
    ];
    let tmp = tempfile::TempDir::new().unwrap();
    let mut compared = 0;
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (k, threads) in [1, 8, 1, 8].into_iter().enumerate() {
            let dir = tmp.path().join(format!("{i}-{k}"));
            if let Err(e) = run_cli(args, &dir, threads) {
                ck.expect(false, format!("{args:?}: {e}"));
                return ck;
            }
            outputs.push(artifacts(&dir));
        }
        ck.expect(!outputs[0].is_empty(), format!("{args:?} wrote nothing"));
        for other in &outputs[1..] {
            ck.expect(other == &outputs[0], format!("{args:?}: outputs differ"));
        }
        compared += outputs[0].len();
    }
    ck.note(format!("{compared} files byte-identical over 4 runs each (threads 1, 8, 1, 8)"));
    ck
}

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    check: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion { id: 1, title: "magenta pipeline", budget: Some(Duration::from_secs(1)), check: magenta },
        Criterion { id: 2, title: "green pipeline", budget: None, check: green },
        Criterion { id: 3, title: "blue pipeline", budget: None, check: blue },
        Criterion { id: 4, title: "membership anchors at q=0.5", budget: None, check: modulus_anchors },
        Criterion {
            id: 5,
            title: "complex a_q confined to the excluded sector",
            budget: None,
            check: complex_sector_character,
        },
        Criterion {
            id: 6,
            title: "frontier samples are zeros of a_q",
            budget: Some(Duration::from_secs(1)),
            check: boundary_identity,
        },
        Criterion { id: 7, title: "q=1 degenerations", budget: Some(Duration::from_secs(30)), check: unit_order },
        Criterion { id: 8, title: "decay rate and instability", budget: Some(Duration::from_secs(5)), check: decay },
        Criterion { id: 9, title: "Γ(c) maps onto the frontier", budget: None, check: gamma_consistency },
        Criterion { id: 10, title: "coverage trend", budget: Some(Duration::from_secs(300)), check: conjecture_trend },
        Criterion { id: 11, title: "determinism across thread counts", budget: None, check: determinism },
    ];
    let mut failed = Vec::new();
    for criterion in &criteria {
        let start = Instant::now();
        let mut ck = (criterion.check)();
        let elapsed = start.elapsed();
        if let Some(budget) = criterion.budget {
            ck.expect(elapsed < budget, format!("took {elapsed:.2?}, budget {budget:.0?}"));
        }
        let pass = ck.failures.is_empty();
        let budget = criterion.budget.map(|b| format!(" of {b:.0?}")).unwrap_or_default();
        let detail = if pass { ck.notes.join("; ") } else { ck.failures.join("; ") };
        println!(
            "criterion {:>2} {}: {} [{elapsed:.2?}{budget}] {detail}",
            criterion.id,
            if pass { "PASS" } else { "FAIL" },
            criterion.title,
        );
        if !pass {
            failed.push(criterion.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
