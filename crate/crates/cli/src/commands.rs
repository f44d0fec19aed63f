//! Subcommand implementations. Each returns the text to print and an outcome.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use quasipoly::conformal::{invert_to_sigma, recenter, sc_solve, taylor_coefficients, SeriesFile, SigmaSeries};
use quasipoly::fractal::{
    hausdorff_dimension, hausdorff_distance, iterate, iteration_csv, iteration_invariants, koch_spec, ladder,
    LadderSpec,
};
use quasipoly::geometry::schema::PolygonFile;
use quasipoly::geometry::AdjointReading;
use quasipoly::grunsky::{grunsky_coefficients, grunsky_norm, homotopy_scaling, required_taylor_len, sweep_blocks};
use quasipoly::invariants::{evaluate, rectilinear_unbounded, set_reflection_bound, InvariantReport, SetBoundRequest};
use quasipoly::verify::{run_all, CriterionResult, VerifyOptions};
use serde::Serialize;
use serde_json::json;

use crate::input::{read_arc, read_json, read_polygon, SetFile};
use crate::{Cli, Command, Format, Outcome, SeriesArgs};

pub fn run(cli: &Cli) -> Result<(String, Outcome)> {
    let g = &cli.global;
    let reading: AdjointReading = g.reading.into();
    match &cli.command {
        Command::Invariants { inputs } => invariants(inputs, reading, g.format),
        Command::Scmap { input } => scmap(input, g.format),
        Command::Grunsky { input, series } => grunsky(input, series, reading, g.format),
        Command::Homotopy { input, series, t_grid } => homotopy(input, series, t_grid, g.format),
        Command::Snowflake { t, p, copies } => snowflake(*t, *p, *copies, reading, g.format),
        Command::Ladder { input, steps } => ladder_cmd(input.as_deref(), *steps, g.format),
        Command::ArcBound { input, max_degree } => arc(input, *max_degree, g.format),
        Command::SetBound { input } => set_bound(input, reading, g.format),
        Command::Verify { csv, inject_failure, timings } => {
            let opts = VerifyOptions { seed: g.seed, inject_failure: *inject_failure };
            verify(&opts, *csv || g.format == Format::Csv, *timings)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Serialized name of a unit enum such as a status or source tag.
fn tag<T: Serialize>(v: T) -> String {
    serde_json::to_value(v).ok().and_then(|j| j.as_str().map(str::to_string)).unwrap_or_default()
}

fn report_row(label: &str, r: &InvariantReport) -> Vec<String> {
    vec![
        label.to_string(),
        tag(r.status()),
        r.kappa().to_string(),
        r.k().to_string(),
        r.q().to_string(),
        r.rho_inv().to_string(),
        opt(r.lower()),
        opt(r.upper()),
        tag(r.source()),
        r.notes().join("; "),
    ]
}

const REPORT_HEADER: [&str; 10] = ["input", "status", "kappa", "k", "q", "rho_inv", "lower", "upper", "source", "notes"];

fn outcome_of<'a>(reports: impl IntoIterator<Item = &'a InvariantReport>) -> Outcome {
    if reports.into_iter().any(|r| r.is_downgraded()) {
        Outcome::Downgraded
    } else {
        Outcome::Ok
    }
}

fn invariants(inputs: &[PathBuf], reading: AdjointReading, format: Format) -> Result<(String, Outcome)> {
    // files are independent; results keep input order
    let results: Vec<Result<InvariantReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = inputs
            .iter()
            .map(|path| {
                s.spawn(move || -> Result<InvariantReport> {
                    let (line, tail) = read_polygon(path)?;
                    evaluate(&line, tail.as_ref(), reading).with_context(|| format!("{}", path.display()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let reports = results.into_iter().collect::<Result<Vec<_>>>()?;
    let outcome = outcome_of(&reports);
    let text = match format {
        Format::Csv => csv_text(
            &REPORT_HEADER,
            inputs.iter().zip(&reports).map(|(p, r)| report_row(&p.display().to_string(), r)).collect(),
        )?,
        Format::Json if reports.len() == 1 => to_json(&reports[0])?,
        Format::Json => {
            let items: Vec<_> =
                inputs.iter().zip(&reports).map(|(p, r)| json!({"input": p.display().to_string(), "report": r})).collect();
            to_json(&items)?
        }
    };
    Ok((text, outcome))
}

fn scmap(input: &Path, format: Format) -> Result<(String, Outcome)> {
    let (line, _) = read_polygon(input)?;
    let summary = sc_solve(&line)?.summary();
    let text = match format {
        Format::Json => to_json(&summary)?,
        Format::Csv => csv_text(
            &["k", "re", "im", "alpha"],
            summary
                .prevertices
                .iter()
                .zip(&summary.angle_factors)
                .enumerate()
                .map(|(k, (z, a))| vec![k.to_string(), z[0].to_string(), z[1].to_string(), a.to_string()])
                .collect(),
        )?,
    };
    Ok((text, Outcome::Ok))
}

/// Series of the input and, for polygons, the closed-form value the
/// estimates should approach from below.
fn load_series(input: &Path, args: &SeriesArgs, reading: AdjointReading) -> Result<(SigmaSeries, Option<f64>)> {
    let len = required_taylor_len(args.n);
    if args.series {
        if args.center.is_some() {
            bail!("--center needs a polygon input");
        }
        let file: SeriesFile = read_json(input)?;
        return Ok((file.to_sigma()?, None));
    }
    let (line, tail) = read_polygon(input)?;
    let target = evaluate(&line, tail.as_ref(), reading).ok().and_then(|r| if r.is_exact() { Some(r.k()) } else { r.lower() });
    let map = sc_solve(&line)?;
    let taylor = match &args.center {
        Some(c) => recenter(&map, *c, len)?,
        None => taylor_coefficients(&map, len)?,
    };
    Ok((invert_to_sigma(&taylor), target))
}

fn sweep_truncations(n: usize) -> Vec<usize> {
    let mut t: Vec<usize> = std::iter::successors(Some(8usize), |k| Some(k * 2)).take_while(|&k| k < n).collect();
    t.push(n);
    t
}

fn grunsky(input: &Path, args: &SeriesArgs, reading: AdjointReading, format: Format) -> Result<(String, Outcome)> {
    let (sigma, target) = load_series(input, args, reading)?;
    let full = grunsky_coefficients(&sigma, args.n)?;
    if let Some(path) = &args.dump {
        std::fs::write(path, to_json(&full.to_dump())?).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut est = sweep_blocks(&full, &sweep_truncations(args.n))?;
    est.target = target;
    let text = match format {
        Format::Json => to_json(&est)?,
        Format::Csv => est.to_csv(),
    };
    Ok((text, Outcome::Ok))
}

fn homotopy(input: &Path, args: &SeriesArgs, grid: &[f64], format: Format) -> Result<(String, Outcome)> {
    if let Some(t) = grid.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
        bail!("t-grid value {t} outside (0, 1]");
    }
    let (sigma, _) = load_series(input, args, AdjointReading::Default)?;
    let full = grunsky_coefficients(&sigma, args.n)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &t in grid {
        rows.push((t, grunsky_norm(&homotopy_scaling(&full, t)?)?.value));
    }
    let text = match format {
        Format::Json => {
            let pts: Vec<_> = rows.iter().map(|(t, v)| json!({"t": t, "value": v})).collect();
            to_json(&json!({"truncation": args.n, "norms": pts}))?
        }
        Format::Csv => csv_text(&["t", "value"], rows.iter().map(|(t, v)| vec![t.to_string(), v.to_string()]).collect())?,
    };
    Ok((text, Outcome::Ok))
}

fn snowflake(t: f64, p: usize, copies: usize, reading: AdjointReading, format: Format) -> Result<(String, Outcome)> {
    let spec = koch_spec(t)?;
    if format == Format::Csv {
        return Ok((iteration_csv(&spec, p, copies)?, Outcome::Ok));
    }
    let mut distances = Vec::with_capacity(p);
    let mut prev = iterate(&spec, 0)?;
    for q in 1..=p {
        let next = iterate(&spec, q)?;
        distances.push(hausdorff_distance(&prev, &next)?);
        prev = next;
    }
    let reports = iteration_invariants(&spec, p, copies, reading)?;
    let outcome = outcome_of(reports.iterates.iter().flat_map(|r| [&r.upper_side, &r.lower_side, &r.closed]));
    let out = json!({
        "t": t,
        "dimension": hausdorff_dimension(t)?,
        "similarity_ratios": spec.similarities.iter().map(|s| s.ratio()).collect::<Vec<_>>(),
        "hausdorff_distances": distances,
        "reports": reports,
    });
    Ok((to_json(&out)?, outcome))
}

fn ladder_cmd(input: Option<&Path>, steps: usize, format: Format) -> Result<(String, Outcome)> {
    let spec: LadderSpec = match input {
        Some(p) => read_json(p)?,
        None => LadderSpec::uniform(steps),
    };
    let (line, tail) = ladder(&spec)?;
    let report = rectilinear_unbounded(&line, Some(&tail))?;
    let outcome = outcome_of([&report]);
    let text = match format {
        Format::Csv => csv_text(&REPORT_HEADER, vec![report_row("ladder", &report)])?,
        Format::Json => {
            let mut polygon = PolygonFile::from_line(&line);
            polygon.tail = tail.pattern.clone();
            polygon.visible_vertices = tail.visible_vertices.clone();
            polygon.infinite_direction = tail.infinite_direction;
            to_json(&json!({"polygon": polygon, "report": report}))?
        }
    };
    Ok((text, outcome))
}

fn arc(input: &Path, max_degree: usize, format: Format) -> Result<(String, Outcome)> {
    let spec = read_arc(input)?;
    let bound = quasipoly::arcs::arc_bound(&spec, max_degree)?;
    let text = match format {
        Format::Json => to_json(&bound)?,
        Format::Csv => bound.estimate.to_csv(),
    };
    Ok((text, Outcome::Ok))
}

fn set_bound(input: &Path, reading: AdjointReading, format: Format) -> Result<(String, Outcome)> {
    let file: SetFile = read_json(input)?;
    let mut lines = Vec::with_capacity(file.covering_lines.len());
    for (i, f) in file.covering_lines.iter().enumerate() {
        lines.push(f.to_line().with_context(|| format!("covering_lines[{i}]"))?);
    }
    let reports = lines
        .iter()
        .enumerate()
        .map(|(i, l)| evaluate(l, None, reading).with_context(|| format!("covering_lines[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let request = SetBoundRequest { set_points: file.set_points, covering_lines: lines };
    let bound = set_reflection_bound(&request, &reports)?;
    let outcome = outcome_of(&reports);
    let text = match format {
        Format::Json => to_json(&json!({"bound": bound, "reports": reports}))?,
        Format::Csv => csv_text(
            &["cover", "q_upper", "status", "source", "chosen"],
            reports
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    vec![
                        i.to_string(),
                        opt(r.q_upper()),
                        tag(r.status()),
                        tag(r.source()),
                        (i == bound.cover).to_string(),
                    ]
                })
                .collect(),
        )?,
    };
    Ok((text, outcome))
}

fn verify_line(r: &CriterionResult, timings: bool) -> String {
    if timings {
        r.line()
    } else {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        format!("[{mark}] {} {}: {} | {}", r.id, r.name, r.measured, r.tolerance)
    }
}

fn verify(opts: &VerifyOptions, csv: bool, timings: bool) -> Result<(String, Outcome)> {
    let rows = run_all(opts);
    let outcome = if rows.iter().all(|r| r.passed) { Outcome::Ok } else { Outcome::Failed };
    let text = if csv {
        let mut header = vec!["id", "name", "passed", "measured", "tolerance"];
        if timings {
            header.push("seconds");
        }
        csv_text(
            &header,
            rows.iter()
                .map(|r| {
                    let mut v =
                        vec![r.id.to_string(), r.name.to_string(), r.passed.to_string(), r.measured.clone(), r.tolerance.clone()];
                    if timings {
                        v.push(format!("{:.3}", r.seconds));
                    }
                    v
                })
                .collect(),
        )?
    } else {
        rows.iter().map(|r| verify_line(r, timings) + "\n").collect()
    };
    Ok((text, outcome))
}
