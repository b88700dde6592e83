use std::fmt::Write as _;
use std::path::Path;

use skewbaker_core::basin::{
    render_slice_with, write_grid_csv, write_ppm, Membership, PaletteSpec, RenderOptions,
    SliceSpec, DEFAULT_BUDGET,
};
use skewbaker_core::domain::sup_alpha;
use skewbaker_core::psh::{submean_check, u_from_state, ProbeSpec};
use skewbaker_core::report::{float, Record, Report};
use skewbaker_core::verify::{run_suite, Suite, SuiteConfig, RNG_NAME};
use skewbaker_core::witness::{find_witnesses_from, image_direction, DEFAULT_FIRST_BRANCH};
use skewbaker_core::{orbit, OrbitStatus, PlanePoint};

use crate::args::{
    parse_complex, parse_range, parse_vector, required, Command, CommonArgs, ConfigFile,
    IterateArgs, Merge, PshArgs, RenderArgs, VerifyArgs, WitnessArgs,
};
use crate::{CliError, Status};

pub fn dispatch(
    command: Command,
    file: ConfigFile,
    common: &CommonArgs,
) -> Result<(Report, Status), CliError> {
    match command {
        Command::Iterate(a) => iterate(a.merge(file.iterate)),
        Command::Verify(a) => verify(a.merge(file.verify)),
        Command::Witness(a) => witness(a.merge(file.witness)),
        Command::Render(a) => render(a.merge(file.render), common.workers),
        Command::Psh(a) => psh(a.merge(file.psh)),
    }
}

fn iterate(a: IterateArgs) -> Result<(Report, Status), CliError> {
    let z = parse_complex(&required(a.z, "z")?, "--z")?;
    let w = parse_complex(&required(a.w, "w")?, "--w")?;
    let steps = required(a.steps, "steps")?;
    let seed = PlanePoint::new(z, w);

    let config = Record::new()
        .with_complex("z", z)
        .with_complex("w", w)
        .with("steps", steps);
    let mut report = Report::new("iterate", config);
    let record = orbit(seed, steps);
    for (n, p) in record.points.iter().enumerate() {
        report.rows.push(
            Record::new()
                .with("n", n)
                .with("re_z", p.z.re)
                .with("im_z", p.z.im)
                .with("re_w", p.w.re)
                .with("im_w", p.w.im)
                .with("gap", float(p.real_gap()))
                .with("u_n", u_from_state(p).map(float)),
        );
    }
    let mut summary = Record::new().with("completed_steps", record.completed_steps());
    match record.status {
        OrbitStatus::Completed => summary.push("status", "completed"),
        OrbitStatus::Overflowed { step } => {
            summary.push("status", "overflowed");
            summary.push("notice", format!("orbit overflowed after step {step}; table truncated"));
        }
    }
    summary.push("in_l_at_end", sup_alpha(&record.last()).map(|s| s > 1.0).unwrap_or(false));
    report.summary = summary;
    Ok((report, Status::Success))
}

fn verify(a: VerifyArgs) -> Result<(Report, Status), CliError> {
    let suite: Suite = required(a.suite, "suite")?.parse()?;
    let cfg = SuiteConfig {
        samples: a.samples.unwrap_or(1000),
        seed: a.seed.unwrap_or(0),
        steps: a.steps.unwrap_or(30),
    };
    let config = Record::new()
        .with("suite", suite.name())
        .with("samples", cfg.samples)
        .with("seed", cfg.seed)
        .with("steps", cfg.steps)
        .with("rng", RNG_NAME);
    let outcome = run_suite(suite, cfg)?;
    let mut report = Report::new("verify", config);
    report.summary = outcome.summary_record();
    let status = if outcome.passed() {
        Status::Success
    } else {
        Status::VerificationFailed
    };
    Ok((report, status))
}

fn witness(a: WitnessArgs) -> Result<(Report, Status), CliError> {
    let target = parse_complex(&required(a.target, "target")?, "--target")?;
    let count = required(a.count, "count")?;
    if count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    let first_branch = a.first_branch.unwrap_or(DEFAULT_FIRST_BRANCH);
    let seq = find_witnesses_from(target, count, first_branch)?;

    let mut config = Record::new()
        .with_complex("target", target)
        .with("count", count)
        .with("first_branch", first_branch);
    if let Some(t) = &a.table {
        config.push("table", t.display().to_string());
    }
    let mut report = Report::new("witness", config);
    let mut table = String::from("k,re_zeta,im_zeta,abs_zeta,residual,re_p,im_p,re_q,im_q\n");
    for i in 0..seq.len() {
        let zeta = seq.zetas[i];
        let d = image_direction(zeta);
        report.rows.push(
            Record::new()
                .with("k", seq.branches[i])
                .with("re_zeta", zeta.re)
                .with("im_zeta", zeta.im)
                .with("abs_zeta", seq.moduli[i])
                .with("residual", seq.residuals[i])
                .with_complex("p", d.p)
                .with_complex("q", d.q)
                .with("degenerate", d.degenerate),
        );
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{},{},{}",
            seq.branches[i], zeta.re, zeta.im, seq.moduli[i], seq.residuals[i], d.p.re, d.p.im, d.q.re, d.q.im
        );
    }
    if let Some(path) = &a.table {
        write_file(path, table.as_bytes())?;
    }
    let mut summary = Record::new()
        .with("found", seq.len())
        .with("exact_family", seq.exact_family)
        .with("moduli_increasing", seq.moduli_increasing())
        .with("max_residual", seq.residuals.iter().cloned().fold(0.0, f64::max))
        .with("failed_branches", seq.failures.len());
    for f in &seq.failures {
        summary.push(format!("failure_{}", f.branch), f.reason.clone());
    }
    report.summary = summary;
    let status = if seq.failures.is_empty() {
        Status::Success
    } else {
        Status::NumericFailure
    };
    Ok((report, status))
}

fn load_palette(path: &Path) -> Result<PaletteSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read palette {}: {e}", path.display())))?;
    let palette: PaletteSpec = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid palette {}: {e}", path.display())))?;
    palette
        .validate()
        .map_err(|e| CliError::Usage(format!("invalid palette {}: {e}", path.display())))?;
    Ok(palette)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(CliError::from)
}

fn render(a: RenderArgs, workers: Option<usize>) -> Result<(Report, Status), CliError> {
    let z = parse_complex(a.z.as_deref().unwrap_or("0,0"), "--z")?;
    let w = parse_complex(a.w.as_deref().unwrap_or("4,0"), "--w")?;
    let dir_u = parse_vector(a.dir_u.as_deref().unwrap_or("1,0,0,0"), "--dir-u")?;
    let dir_v = parse_vector(a.dir_v.as_deref().unwrap_or("0,1,0,0"), "--dir-v")?;
    let u_range = parse_range(a.u_range.as_deref().unwrap_or("-5,5"), "--u-range")?;
    let v_range = parse_range(a.v_range.as_deref().unwrap_or("-5,5"), "--v-range")?;
    let spec = SliceSpec {
        base: PlanePoint::new(z, w),
        dir_u,
        dir_v,
        u_range,
        v_range,
        width: a.width.unwrap_or(512),
        height: a.height.unwrap_or(512),
    };
    spec.validate()?;
    let budget = a.budget.unwrap_or(DEFAULT_BUDGET);
    if budget == 0 {
        return Err(CliError::Usage("--budget must be at least 1".into()));
    }
    let membership = Membership::new(a.alpha_threshold.unwrap_or(1.0))?;
    if workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let palette = match &a.palette {
        Some(p) => load_palette(p)?,
        None => PaletteSpec::default(),
    };

    let mut config = Record::new()
        .with_point("base", &spec.base)
        .with_point("dir_u", &spec.dir_u)
        .with_point("dir_v", &spec.dir_v)
        .with("u_min", u_range.0)
        .with("u_max", u_range.1)
        .with("v_min", v_range.0)
        .with("v_max", v_range.1)
        .with("width", spec.width)
        .with("height", spec.height)
        .with("budget", budget)
        .with("alpha_threshold", membership.threshold);
    for (key, path) in [("palette", &a.palette), ("ppm", &a.ppm), ("csv", &a.csv)] {
        if let Some(p) = path {
            config.push(key, p.display().to_string());
        }
    }

    let opts = RenderOptions {
        budget,
        membership,
        workers,
    };
    let raster = render_slice_with(&spec, &opts)?;
    if let Some(path) = &a.ppm {
        write_file(path, &write_ppm(&raster, &palette)?)?;
    }
    if let Some(path) = &a.csv {
        write_file(path, &write_grid_csv(&raster))?;
    }
    let mut report = Report::new("render", config);
    report.summary = Record::new()
        .with("pixels", raster.classes.len())
        .with("entered", raster.stats.entered)
        .with("overflowed", raster.stats.overflowed)
        .with("not_entered", raster.stats.not_entered);
    Ok((report, Status::Success))
}

fn psh(a: PshArgs) -> Result<(Report, Status), CliError> {
    let z = parse_complex(&required(a.z, "z")?, "--z")?;
    let w = parse_complex(&required(a.w, "w")?, "--w")?;
    let dir = parse_vector(a.dir.as_deref().unwrap_or("1,0,0,0"), "--dir")?;
    let radius = a.radius.unwrap_or(0.01);
    let samples = a.samples.unwrap_or(64);
    let steps = required(a.steps, "steps")?;
    let probe = ProbeSpec::new(PlanePoint::new(z, w), dir, radius, samples)?;

    let config = Record::new()
        .with_complex("z", z)
        .with_complex("w", w)
        .with_point("dir", &dir)
        .with("radius", radius)
        .with("samples", samples)
        .with("steps", steps);
    let mut report = Report::new("psh", config);
    let r = submean_check(&probe, steps)?;
    report.summary = Record::new()
        .with("center_value", r.center_value)
        .with("circle_mean", r.circle_mean)
        .with("deficit", r.deficit)
        .with("valid_samples", r.valid_samples)
        .with("excluded_samples", samples - r.valid_samples)
        .with("submean_holds", r.deficit >= 0.0);
    Ok((report, Status::Success))
}
