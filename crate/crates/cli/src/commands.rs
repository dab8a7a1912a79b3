use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use fracstab::dynamics::{
    classify_orbit, decay_exponent_of_norms, frac_orbit, linear_orbit, OrbitVerdict, DEFAULT_TAIL,
};
use fracstab::mandelbrot::{
    coverage_from_raster, eigen_to_c, fixed_points, fom_raster, gamma_c_curve, iom_cardioid, iom_raster,
    CoverageParams, CoverageReport, RasterGrid, DEFAULT_ITERATIONS, GAMMA_POLYGON_SAMPLES,
};
use fracstab::stability::{
    boundary_curve, classify, classify_raster, matignon_rays, region_area_green, region_area_grid, BOUNDARY_TOL,
};
use fracstab::{
    BranchPolicy, Complex64, Error, Exec, PixelMap, Polyline, PowerResult, StabilityVerdict, VerdictKind, Window,
};
use nalgebra::DVector;
use serde_json::json;

use crate::args::{
    AreaArgs, Common, DomainArgs, MandelbrotArgs, MapKind, Overlay, SimulateArgs, Size, SweepArgs, VerifyArgs,
};
use crate::output::{polyline_csv, real, CsvTable, Image, Outputs, Rgb};
use crate::CliError;

pub const GREEN: Rgb = [0, 160, 0];
pub const RED: Rgb = [255, 0, 0];
pub const LIGHT_BLUE: Rgb = [173, 216, 230];
pub const WHITE: Rgb = [255, 255, 255];
pub const UNSET: Rgb = [0, 0, 0];

const DEFAULT_SIZE: Size = Size { width: 600, height: 600 };
const SWEEP_SIZE: Size = Size { width: 200, height: 200 };
const SWEEP_ITERATIONS: usize = 300;
const OVERLAY_SAMPLES: usize = GAMMA_POLYGON_SAMPLES;

/// What a command produced: text for stdout and files to write.
#[derive(Debug, Default)]
pub struct Run {
    pub report: String,
    pub outputs: Outputs,
}

fn out_dir(common: &Common) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Colour of a verdict in domain images.
pub fn verdict_color(v: &StabilityVerdict) -> Rgb {
    match v.kind {
        VerdictKind::StableInterior => GREEN,
        VerdictKind::Boundary => RED,
        VerdictKind::UndefinedComplexPower => WHITE,
        VerdictKind::UnstableMatignon => match v.a_q {
            PowerResult::Complex(_) => WHITE,
            _ => LIGHT_BLUE,
        },
        VerdictKind::UnstableModulus => UNSET,
    }
}

/// Square window that holds the whole domain with a margin.
fn domain_window(q: f64) -> Window {
    Window::centered_square(1.1 * 2f64.powf(q)).expect("positive half-width")
}

fn fractional_window() -> Window {
    CoverageParams::default().window
}

fn classic_window() -> Window {
    Window { x_min: -2.0, x_max: 0.5, y_min: -1.25, y_max: 1.25 }
}

struct DomainRender {
    image: Image,
    curve: Polyline,
    counts: [(VerdictKind, usize); 5],
    complex_pixels: usize,
}

fn render_domain(
    q: f64,
    policy: BranchPolicy,
    window: Window,
    size: Size,
    samples: usize,
) -> Result<DomainRender, CliError> {
    let verdicts = classify_raster(q, policy, window, size.width, size.height, Exec::Parallel)?;
    let map = PixelMap::new(window, size.width, size.height)?;
    let mut image = Image::from_fn(size.width, size.height, |idx| verdict_color(&verdicts[idx]));
    let curve = boundary_curve(q, samples)?;
    image.draw_polyline(&map, &curve, RED);
    let mut counts = [
        (VerdictKind::StableInterior, 0),
        (VerdictKind::Boundary, 0),
        (VerdictKind::UnstableMatignon, 0),
        (VerdictKind::UnstableModulus, 0),
        (VerdictKind::UndefinedComplexPower, 0),
    ];
    for v in &verdicts {
        if let Some(slot) = counts.iter_mut().find(|(k, _)| *k == v.kind) {
            slot.1 += 1;
        }
    }
    let complex_pixels = verdicts.iter().filter(|v| matches!(v.a_q, PowerResult::Complex(_))).count();
    Ok(DomainRender { image, curve, counts, complex_pixels })
}

pub fn domain(common: &Common, args: &DomainArgs) -> Result<Run, CliError> {
    let q = common.q;
    let window = common.window.unwrap_or_else(|| domain_window(q));
    let size = common.size.unwrap_or(DEFAULT_SIZE);
    let render = render_domain(q, common.policy, window, size, args.samples)?;

    let corner = [window.x_min.abs(), window.x_max.abs()]
        .iter()
        .flat_map(|x| [window.y_min.abs(), window.y_max.abs()].map(|y| x.hypot(y)))
        .fold(0.0, f64::max);
    let (upper, lower) = matignon_rays(q, corner)?;
    let mut rays = CsvTable::new(["sign", "r", "x", "y"]);
    for (sign, ray) in [(1, &upper), (-1, &lower)] {
        for (r, z) in ray.parameters.iter().zip(&ray.points) {
            rays.push(vec![sign.to_string(), real(*r), real(z.re), real(z.im)]);
        }
    }

    let dir = out_dir(common);
    let mut run = Run::default();
    run.outputs.file(dir.join("domain.ppm"), render.image.to_ppm());
    run.outputs.file(dir.join("boundary.csv"), polyline_csv(&render.curve).render().into_bytes());
    run.outputs.file(dir.join("matignon.csv"), rays.render().into_bytes());
    let _ = writeln!(run.report, "domain q={q} policy={} size={}x{}", common.policy, size.width, size.height);
    for (kind, n) in render.counts {
        let _ = writeln!(run.report, "  {:<24} {n}", kind.name());
    }
    let _ = writeln!(run.report, "  {:<24} {}", "complex a_q", render.complex_pixels);
    Ok(run)
}

fn escape_color(escape: u32, iterations: usize) -> Rgb {
    let t = (escape as f64).ln_1p() / (iterations as f64).ln_1p();
    [(40.0 + 200.0 * t) as u8, (40.0 + 180.0 * t * t) as u8, (90.0 + 165.0 * t) as u8]
}

fn render_fractal(raster: &RasterGrid, iterations: usize, overlay: Option<&Polyline>) -> Image {
    let mut image = Image::from_fn(raster.width(), raster.height(), |idx| match raster.cells[idx].escape_index {
        None => UNSET,
        Some(n) => escape_color(n, iterations),
    });
    if let Some(line) = overlay {
        image.draw_polyline(&raster.map, line, RED);
    }
    image
}

pub fn mandelbrot(common: &Common, args: &MandelbrotArgs) -> Result<Run, CliError> {
    let start = Instant::now();
    let q = common.q;
    let size = common.size.unwrap_or(DEFAULT_SIZE);
    let iterations = common.iters.unwrap_or(DEFAULT_ITERATIONS);
    let (window, raster) = match args.map {
        MapKind::Fractional => {
            let window = common.window.unwrap_or_else(fractional_window);
            (window, fom_raster(window, size.width, size.height, q, iterations, common.escape, Exec::Parallel)?)
        }
        MapKind::Classic => {
            let window = common.window.unwrap_or_else(classic_window);
            (window, iom_raster(window, size.width, size.height, iterations, Exec::Parallel)?)
        }
    };
    let overlay = match args.overlay {
        Overlay::Gamma => Some(gamma_c_curve(q, OVERLAY_SAMPLES)?),
        Overlay::Cardioid => Some(iom_cardioid(OVERLAY_SAMPLES)?),
        Overlay::None => None,
    };
    let image = render_fractal(&raster, iterations, overlay.as_ref());
    let members = raster.member_count();
    let elapsed = start.elapsed();

    let dir = out_dir(common);
    let mut run = Run::default();
    run.outputs.file(dir.join("fractal.ppm"), image.to_ppm());
    if let Some(line) = &overlay {
        run.outputs.file(dir.join("overlay.csv"), polyline_csv(line).render().into_bytes());
    }
    let manifest = json!({
        "command": "mandelbrot",
        "map": format!("{:?}", args.map).to_lowercase(),
        "q": q,
        "window": window.as_array(),
        "width": size.width,
        "height": size.height,
        "iters": iterations,
        "escape": common.escape,
        "overlay": format!("{:?}", args.overlay).to_lowercase(),
        "threads": common.threads,
        "member_pixels": members,
        "total_pixels": raster.cells.len(),
        "elapsed_ms": elapsed.as_secs_f64() * 1e3,
    });
    run.outputs.append_line(dir.join("manifest.jsonl"), manifest.to_string());
    let _ = writeln!(
        run.report,
        "mandelbrot map={:?} q={q} size={}x{} iters={iterations}: {members} of {} pixels bounded",
        args.map,
        size.width,
        size.height,
        raster.cells.len()
    );
    Ok(run)
}

/// The fixed point whose linearization has `λ` as an eigenvalue: `f'(z*) = 2z*`
/// acts on the real plane with eigenvalues `2z*` and its conjugate.
pub fn owning_fixed_point(lambda: Complex64, c: Complex64) -> Complex64 {
    let (z1, z2) = fixed_points(c);
    let gap = |z: Complex64| (2.0 * z - lambda).norm().min((2.0 * z - lambda.conj()).norm());
    if gap(z1) <= gap(z2) {
        z1
    } else {
        z2
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("({:.6}, {:.6})", z.re, z.im)
}

pub fn verify(common: &Common, args: &VerifyArgs) -> Result<Run, CliError> {
    let (q, lambda, tol) = (common.q, args.lambda, common.tol);
    let iterations = common.iters.unwrap_or(DEFAULT_ITERATIONS);
    let verdict = classify(lambda, q, common.policy, BOUNDARY_TOL)?;
    let c = eigen_to_c(lambda);
    let (z1, _) = fixed_points(c);
    let owner = owning_fixed_point(lambda, c);
    let traj = frac_orbit(q, |z: &Complex64| z * z + c, Complex64::new(0.0, 0.0), iterations, common.escape)?;
    let fate = classify_orbit(&traj, tol, DEFAULT_TAIL);

    let mut r = String::new();
    let _ = writeln!(r, "lambda        {}", fmt_c(lambda));
    let a_q = match verdict.a_q.parts() {
        Some((re, 0.0)) => format!("{re:.6e}"),
        Some((re, im)) => format!("{re:.6e}{im:+.6e}i"),
        None => "undefined".into(),
    };
    let _ = writeln!(r, "verdict       {} (a_q = {a_q}, q = {q}, policy = {})", verdict.kind.name(), common.policy);
    let _ = writeln!(r, "c             {}", fmt_c(c));
    let _ = writeln!(r, "fixed point   i*sqrt(c) = {}", fmt_c(z1));
    let label = if owner == z1 { "i*sqrt(c)" } else { "-i*sqrt(c)" };
    let _ = writeln!(r, "lambda owner  {label} = {}", fmt_c(owner));
    let converged_to_owner = match &fate {
        OrbitVerdict::ConvergedTo { point, achieved_tol } => {
            let _ = writeln!(
                r,
                "orbit         converged to {} (tail spread {achieved_tol:.2e}, N = {iterations})",
                fmt_c(*point)
            );
            let _ = writeln!(
                r,
                "fp error      |z - i*sqrt(c)| = {:.3e}, |z - owner| = {:.3e}",
                (point - z1).norm(),
                (point - owner).norm()
            );
            (point - owner).norm() <= tol
        }
        OrbitVerdict::Diverged { escape_index } => {
            let _ = writeln!(r, "orbit         diverged at step {escape_index}");
            false
        }
        OrbitVerdict::Undecided => {
            let _ = writeln!(r, "orbit         undecided after {iterations} steps");
            false
        }
    };
    let concordant = verdict.is_stable() == converged_to_owner;
    let _ = writeln!(r, "concordant    {}", if concordant { "yes" } else { "no" });
    if concordant {
        Ok(Run { report: r, outputs: Outputs::default() })
    } else {
        Err(CliError::Discordance(r))
    }
}

/// The q values of a sweep: `steps` points from `start` to `end` inclusive.
pub fn sweep_orders(start: f64, end: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![start];
    }
    (0..steps)
        .map(|i| if i + 1 == steps { end } else { start + (end - start) * i as f64 / (steps - 1) as f64 })
        .collect()
}

fn coverage_row(q: f64, report: Option<&CoverageReport>) -> Vec<String> {
    match report {
        Some(r) => vec![
            real(q),
            r.main_body_pixels.to_string(),
            r.stability_region_pixels.to_string(),
            r.intersection_pixels.to_string(),
            real(r.ratio),
        ],
        None => vec![real(q), "0".into(), "0".into(), "0".into(), real(f64::NAN)],
    }
}

pub fn sweep(common: &Common, args: &SweepArgs) -> Result<Run, CliError> {
    if args.steps > 1 && args.q_start >= args.q_end {
        return Err(CliError::Usage(format!("--q-start {} must be below --q-end {}", args.q_start, args.q_end)));
    }
    let size = common.size.unwrap_or(SWEEP_SIZE);
    let params = CoverageParams {
        window: common.window.unwrap_or_else(fractional_window),
        width: size.width,
        height: size.height,
        iterations: common.iters.unwrap_or(SWEEP_ITERATIONS),
        escape_radius: common.escape,
        ..CoverageParams::default()
    };
    let dir = out_dir(common);
    let mut run = Run::default();
    let mut table = CsvTable::new(["q", "main_body_pixels", "region_pixels", "intersection", "ratio"]);
    for (i, q) in sweep_orders(args.q_start, args.q_end, args.steps).into_iter().enumerate() {
        let frame = render_domain(q, common.policy, domain_window(1.0), size, 2001)?;
        run.outputs.file(dir.join(format!("frame_{i:03}.ppm")), frame.image.to_ppm());

        let raster = fom_raster(
            params.window,
            size.width,
            size.height,
            q,
            params.iterations,
            params.escape_radius,
            Exec::Parallel,
        )?;
        let report = match coverage_from_raster(q, &raster, &params, Exec::Parallel) {
            Ok(r) => Some(r),
            Err(Error::EmptyMainBody) => None,
            Err(e) => return Err(e.into()),
        };
        table.push(coverage_row(q, report.as_ref()));
        match &report {
            Some(r) => {
                let _ = writeln!(
                    run.report,
                    "q={q:.6} coverage {}/{} = {:.4}",
                    r.intersection_pixels, r.main_body_pixels, r.ratio
                );
            }
            None => {
                let _ = writeln!(run.report, "q={q:.6} main body empty at this resolution");
            }
        }
        if args.fractal {
            let overlay = gamma_c_curve(q, OVERLAY_SAMPLES)?;
            let image = render_fractal(&raster, params.iterations, Some(&overlay));
            run.outputs.file(dir.join(format!("fractal_{i:03}.ppm")), image.to_ppm());
        }
    }
    run.outputs.file(dir.join("coverage.csv"), table.render().into_bytes());
    Ok(run)
}

pub fn simulate(common: &Common, args: &SimulateArgs) -> Result<Run, CliError> {
    let q = common.q;
    let a = &args.matrix;
    let d = a.nrows();
    let y0 = match &args.y0 {
        Some(v) if v.len() != d => {
            return Err(CliError::Usage(format!("--y0 has {} entries but the matrix is {d}x{d}", v.len())));
        }
        Some(v) => v.clone(),
        None => DVector::from_element(d, 1.0),
    };
    let steps = common.iters.unwrap_or(DEFAULT_ITERATIONS);
    let traj = linear_orbit(q, a, &y0, steps)?;
    let norms = traj.norms();

    let mut header = vec!["n".to_string(), "norm".to_string()];
    header.extend((0..d).map(|i| format!("y{i}")));
    let mut table = CsvTable::new(header);
    for (n, (y, norm)) in traj.states.iter().zip(&norms).enumerate() {
        let mut row = vec![n.to_string(), real(*norm)];
        row.extend(y.iter().map(|v| real(*v)));
        table.push(row);
    }

    let mut r = String::new();
    let _ = writeln!(r, "simulate q={q} d={d} steps={steps}");
    let eigen = a.complex_eigenvalues();
    let mut all_stable = true;
    for lambda in eigen.iter() {
        let v = classify(*lambda, q, common.policy, BOUNDARY_TOL)?;
        all_stable &= v.is_stable();
        let _ = writeln!(r, "eigenvalue    {} {}", fmt_c(*lambda), v.kind.name());
    }
    let last = norms.len() - 1;
    let first = (last / 10).max(1);
    let decaying = if let Some(n) = traj.escape_index {
        let _ = writeln!(r, "orbit         escaped at step {n}");
        false
    } else if last + 1 < first + 10 {
        let _ = writeln!(r, "decay         too few steps to fit");
        false
    } else {
        match decay_exponent_of_norms(&norms, first..=last) {
            Ok(fit) => {
                let _ = writeln!(
                    r,
                    "decay slope   {:.6} over n in [{first}, {last}] (residual {:.2e})",
                    fit.slope, fit.residual
                );
                fit.slope < 0.0
            }
            Err(e) => {
                let _ = writeln!(r, "decay         not fitted: {e}");
                false
            }
        }
    };
    let _ = writeln!(r, "eigen stable  {}", if all_stable { "yes" } else { "no" });
    let _ = writeln!(r, "unstable      {}", if decaying { "no" } else { "yes" });

    let mut run = Run { report: r, outputs: Outputs::default() };
    run.outputs.file(out_dir(common).join("trajectory.csv"), table.render().into_bytes());
    Ok(run)
}

pub fn area(common: &Common, args: &AreaArgs) -> Result<Run, CliError> {
    let q = common.q;
    let window = common.window.unwrap_or_else(|| domain_window(q));
    let grid = region_area_grid(q, common.policy, window, args.cells, Exec::Parallel)?;
    let green = region_area_green(q, args.samples)?;
    let mut run = Run::default();
    let _ = writeln!(run.report, "area q={q} policy={}", common.policy);
    let _ = writeln!(run.report, "  grid  {:.10} (cell {:.3e})", grid.value, grid.resolution);
    let _ = writeln!(run.report, "  green {:.10} ({} samples)", green.value, args.samples);
    let _ = writeln!(run.report, "  relative difference {:.3e}", (grid.value - green.value).abs() / green.value);
    if let Some(dir) = &common.out {
        let mut table = CsvTable::new(["q", "method", "resolution", "area"]);
        table.push(vec![real(q), "grid".into(), real(grid.resolution), real(grid.value)]);
        table.push(vec![real(q), "green".into(), real(green.resolution), real(green.value)]);
        run.outputs.file(dir.join("area.csv"), table.render().into_bytes());
    }
    Ok(run)
}
