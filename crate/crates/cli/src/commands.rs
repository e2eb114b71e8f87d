//! One function per subcommand, all returning exit-code-mapped errors.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use extremal_core::construct::{
    build_max_construction, build_min_construction, ConstructionOutput,
};
use extremal_core::extremal::{maximal_basis, minimal_basis_seeded, ExtremalBasis, StepProvenance};
use extremal_core::json as ejson;
use extremal_core::linalg::{ScalarField, Subspace};
use extremal_core::norm::NormSpec;
use extremal_core::random::{random_norm, RNG_ALGORITHM};
use extremal_core::sphere::{grid_oracle, max_on_sphere, min_on_sphere_seeded, OptMode};
use extremal_core::verify::{
    equivalence_ratios_with_constants, upper_ratio, weighted_l1, RatioReport,
};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::output::{
    fmt_f64, fmt_opt, resolve_seed, version, write_json, CliError, CliResult, CsvOut, ToleranceSet,
};
use crate::svg::{line_chart, Series};
use crate::{Command, Family, FieldArg, KindArg, ModeArg, NormSource, OutputOpts};

pub fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Basis { source, kind, out } => cmd_basis(&source, kind, &out),
        Command::Verify {
            source,
            kind,
            basis,
            out,
        } => cmd_verify(&source, kind, basis.as_deref(), &out),
        Command::Sweep { source, grid, out } => cmd_sweep(&source, grid.as_deref(), &out),
        Command::Equiv {
            source,
            kind_a,
            kind_b,
            basis_a,
            basis_b,
            hp_a,
            hp_b,
            out,
        } => cmd_equiv(
            &source,
            kind_a,
            kind_b,
            basis_a.as_deref(),
            basis_b.as_deref(),
            hp_a.as_deref(),
            hp_b.as_deref(),
            &out,
        ),
        Command::Random {
            n,
            supports,
            count,
            field,
            out,
        } => cmd_random(n, supports, count, field, &out),
        Command::Oracle {
            source,
            mode,
            resolution,
            out,
        } => cmd_oracle(&source, mode, resolution, &out),
    }
}

/// Materialize the norm from a file or a construction request.
fn load_norm(source: &NormSource) -> CliResult<(NormSpec, Option<ConstructionOutput>)> {
    match (&source.norm, source.construct) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            let spec = ejson::norm_from_str(&text)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            Ok((spec, None))
        }
        (None, Some(family)) => {
            let n = source
                .n
                .ok_or_else(|| CliError::input("--construct requires --n"))?;
            let out = match family {
                Family::Min => {
                    let s = source
                        .s
                        .ok_or_else(|| CliError::input("--construct min requires --s"))?;
                    build_min_construction(n, s)?
                }
                Family::Max => {
                    let c = source
                        .c
                        .ok_or_else(|| CliError::input("--construct max requires --c"))?;
                    let alpha = source
                        .alpha
                        .ok_or_else(|| CliError::input("--construct max requires --alpha"))?;
                    build_max_construction(n, c, alpha)?
                }
            };
            Ok((out.norm.clone(), Some(out)))
        }
        (Some(_), Some(_)) => Err(CliError::input("--norm and --construct are exclusive")),
        (None, None) => Err(CliError::input("need a norm: --norm FILE or --construct")),
    }
}

fn provenance_json(steps: &[StepProvenance]) -> Value {
    Value::Array(
        steps
            .iter()
            .map(|p| {
                json!({
                    "method": p.method.as_str(),
                    "starts_used": p.starts_used,
                    "converged": p.converged,
                    "seed": p.seed,
                })
            })
            .collect(),
    )
}

fn basis_with_provenance(b: &ExtremalBasis) -> Value {
    let mut v = ejson::basis_to_json(b);
    v.as_object_mut()
        .expect("basis_to_json yields an object")
        .insert("provenance".into(), provenance_json(b.provenance()));
    v
}

fn meta(tols: &ToleranceSet, seed: u64) -> Vec<(&'static str, Value)> {
    vec![
        ("version", json!(version())),
        ("seed", json!(seed)),
        ("tolerances", json!(tols.describe())),
    ]
}

fn with_meta(mut v: Value, tols: &ToleranceSet, seed: u64) -> Value {
    let obj = v.as_object_mut().expect("report is an object");
    for (k, val) in meta(tols, seed) {
        obj.insert(k.into(), val);
    }
    v
}

fn cmd_basis(source: &NormSource, kind: Option<KindArg>, out: &OutputOpts) -> CliResult<()> {
    let tols = ToleranceSet::from_overrides(&out.tol)?;
    let seed = resolve_seed(out.seed)?;
    let (f, _) = load_norm(source)?;

    let report = match kind {
        Some(KindArg::Minimal) => basis_with_provenance(&minimal_basis_seeded(&f, seed)?),
        Some(KindArg::Maximal) => basis_with_provenance(&maximal_basis(&f)?),
        None => {
            let bmin = minimal_basis_seeded(&f, seed)?;
            let bmax = maximal_basis(&f)?;
            json!({
                "minimal": basis_with_provenance(&bmin),
                "maximal": basis_with_provenance(&bmax),
            })
        }
    };
    let report = with_meta(report, &tols, seed);
    println!("{}", serde_json::to_string_pretty(&report).expect("valid"));
    if let Some(path) = &out.json {
        write_json(path, &report)?;
    }
    Ok(())
}

fn ratio_report_json(f: &NormSpec, kind: &str, rep: &RatioReport, satisfied: bool) -> Value {
    json!({
        "n": f.dim(),
        "kind": kind,
        "ratio": rep.ratio,
        "bound": rep.bound,
        "satisfied": satisfied,
        "method": rep.method.as_str(),
        "witness": ejson::vector_to_json(&rep.witness),
    })
}

fn cmd_verify(
    source: &NormSource,
    kind: Option<KindArg>,
    basis_path: Option<&Path>,
    out: &OutputOpts,
) -> CliResult<()> {
    let tols = ToleranceSet::from_overrides(&out.tol)?;
    let seed = resolve_seed(out.seed)?;
    let (f, _) = load_norm(source)?;

    let basis = match basis_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            ejson::basis_from_str(&text)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
        }
        None => {
            let kind = kind.unwrap_or(match source.construct {
                Some(Family::Min) => KindArg::Minimal,
                _ => KindArg::Maximal,
            });
            match kind {
                KindArg::Minimal => minimal_basis_seeded(&f, seed)?,
                KindArg::Maximal => maximal_basis(&f)?,
            }
        }
    };

    let rep = upper_ratio(&f, &basis)?;
    let satisfied = rep.ratio <= rep.bound + tols.ratio_slack;
    let kind_name = basis.kind().as_str();
    let report = with_meta(
        ratio_report_json(&f, kind_name, &rep, satisfied),
        &tols,
        seed,
    );
    println!("{}", serde_json::to_string_pretty(&report).expect("valid"));
    if let Some(path) = &out.json {
        write_json(path, &report)?;
    }
    if let Some(path) = &out.csv {
        let mut csv = CsvOut::create(
            path,
            !out.no_timestamp,
            &[
                "version",
                "seed",
                "tolerances",
                "n",
                "kind",
                "ratio",
                "bound",
                "satisfied",
                "method",
                "witness",
            ],
        )?;
        csv.row(&[
            version().into(),
            seed.to_string(),
            tols.describe(),
            f.dim().to_string(),
            kind_name.into(),
            fmt_f64(rep.ratio),
            fmt_f64(rep.bound),
            satisfied.to_string(),
            rep.method.as_str().into(),
            compact(&ejson::vector_to_json(&rep.witness)),
        ])?;
        csv.finish()?;
    }
    if !satisfied {
        return Err(CliError::Violation(format!(
            "ratio {} exceeds bound {} + {}",
            rep.ratio, rep.bound, tols.ratio_slack
        )));
    }
    Ok(())
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("valid value")
}

fn parse_grid(spec: &str) -> CliResult<BTreeMap<String, Vec<f64>>> {
    let mut map = BTreeMap::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, vals) = part
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("grid entry {part:?} is not NAME=V1,V2,..")))?;
        let name = name.trim();
        if !matches!(name, "s" | "c" | "alpha") {
            return Err(CliError::input(format!(
                "unknown grid parameter {name:?} (known: s, c, alpha)"
            )));
        }
        let values: Result<Vec<f64>, _> =
            vals.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let values =
            values.map_err(|_| CliError::input(format!("grid entry {part:?}: bad number")))?;
        if values.is_empty() {
            return Err(CliError::input("empty grid"));
        }
        map.insert(name.to_string(), values);
    }
    if map.is_empty() {
        return Err(CliError::input("empty grid"));
    }
    Ok(map)
}

struct SweepRow {
    s: Option<f64>,
    c: Option<f64>,
    alpha: Option<f64>,
    measured: f64,
    predicted: Option<f64>,
    bound: f64,
}

fn cmd_sweep(source: &NormSource, grid: Option<&str>, out: &OutputOpts) -> CliResult<()> {
    let tols = ToleranceSet::from_overrides(&out.tol)?;
    let seed = resolve_seed(out.seed)?;
    let family = source
        .construct
        .ok_or_else(|| CliError::input("sweep requires --construct min|max"))?;
    let n = source
        .n
        .ok_or_else(|| CliError::input("sweep requires --n"))?;
    let grid = match grid {
        Some(spec) => parse_grid(spec)?,
        None => {
            // Single-point grid from the direct flags.
            let mut map = BTreeMap::new();
            if let Some(s) = source.s {
                map.insert("s".to_string(), vec![s]);
            }
            if let Some(c) = source.c {
                map.insert("c".to_string(), vec![c]);
            }
            if let Some(alpha) = source.alpha {
                map.insert("alpha".to_string(), vec![alpha]);
            }
            if map.is_empty() {
                return Err(CliError::input(
                    "empty grid: pass --grid or parameter flags",
                ));
            }
            map
        }
    };

    // Grid points in deterministic order.
    let points: Vec<(Option<f64>, Option<f64>, Option<f64>)> = match family {
        Family::Min => {
            let ss = grid
                .get("s")
                .ok_or_else(|| CliError::input("min sweep needs s values"))?;
            ss.iter().map(|&s| (Some(s), None, None)).collect()
        }
        Family::Max => {
            let cs = grid
                .get("c")
                .ok_or_else(|| CliError::input("max sweep needs c values"))?;
            let alphas = grid
                .get("alpha")
                .ok_or_else(|| CliError::input("max sweep needs alpha values"))?;
            let mut pts = Vec::new();
            for &c in cs {
                for &alpha in alphas {
                    pts.push((None, Some(c), Some(alpha)));
                }
            }
            pts
        }
    };
    if points.is_empty() {
        return Err(CliError::input("empty grid"));
    }

    let rows: CliResult<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(s, c, alpha)| -> CliResult<SweepRow> {
            let cons = match family {
                Family::Min => build_min_construction(n, s.expect("min point"))?,
                Family::Max => {
                    build_max_construction(n, c.expect("max point"), alpha.expect("max point"))?
                }
            };
            let fw = cons.norm.evaluate(&cons.witness)?;
            let measured = weighted_l1(&cons.norm, &cons.expected_basis, &cons.witness)? / fw;
            let bound = 2f64.powi(n as i32) - 1.0;
            Ok(SweepRow {
                s,
                c,
                alpha,
                measured,
                predicted: cons.predicted_ratio,
                bound,
            })
        })
        .collect();
    let rows = rows?;

    let family_name = match family {
        Family::Min => "min",
        Family::Max => "max",
    };
    for row in &rows {
        println!(
            "{family_name} n={n} s={} c={} alpha={}: ratio {} (bound {}, gap {})",
            fmt_opt(row.s),
            fmt_opt(row.c),
            fmt_opt(row.alpha),
            fmt_f64(row.measured),
            fmt_f64(row.bound),
            fmt_f64(row.bound - row.measured),
        );
    }

    if let Some(path) = &out.csv {
        let mut csv = CsvOut::create(
            path,
            !out.no_timestamp,
            &[
                "version",
                "seed",
                "tolerances",
                "family",
                "n",
                "s",
                "c",
                "alpha",
                "measured_ratio",
                "predicted_ratio",
                "bound",
                "gap",
                "method",
            ],
        )?;
        for row in &rows {
            csv.row(&[
                version().into(),
                seed.to_string(),
                tols.describe(),
                family_name.into(),
                n.to_string(),
                fmt_opt(row.s),
                fmt_opt(row.c),
                fmt_opt(row.alpha),
                fmt_f64(row.measured),
                fmt_opt(row.predicted),
                fmt_f64(row.bound),
                fmt_f64(row.bound - row.measured),
                "witness-only".into(),
            ])?;
        }
        csv.finish()?;
    }

    if let Some(path) = &out.svg {
        let bound = 2f64.powi(n as i32) - 1.0;
        let series = sweep_series(family, n, &rows);
        let (x_label, title) = match family {
            Family::Min => ("s", format!("min family witness ratio, n={n}")),
            Family::Max => ("alpha", format!("max family witness ratio, n={n}")),
        };
        let chart = line_chart(
            &title,
            x_label,
            "ratio",
            &series,
            Some((bound, format!("2^{n}-1 = {bound}"))),
        );
        std::fs::write(path, chart)?;
    }

    for row in &rows {
        if row.measured > row.bound + tols.ratio_slack {
            return Err(CliError::Violation(format!(
                "sweep ratio {} exceeds bound {}",
                row.measured, row.bound
            )));
        }
    }
    Ok(())
}

fn sweep_series(family: Family, n: usize, rows: &[SweepRow]) -> Vec<Series> {
    match family {
        Family::Min => vec![Series {
            label: format!("min n={n}"),
            points: rows
                .iter()
                .map(|r| (r.s.unwrap_or(0.0), r.measured))
                .collect(),
        }],
        Family::Max => {
            // One polyline per c value over alpha; falls back to c on the x
            // axis when only one alpha is swept.
            let mut cs: Vec<f64> = rows.iter().filter_map(|r| r.c).collect();
            cs.dedup();
            let alphas: Vec<f64> = rows.iter().filter_map(|r| r.alpha).collect();
            let single_alpha = alphas.windows(2).all(|w| w[0] == w[1]);
            if single_alpha && cs.len() > 1 {
                vec![Series {
                    label: format!("max n={n}"),
                    points: rows
                        .iter()
                        .map(|r| (r.c.unwrap_or(0.0), r.measured))
                        .collect(),
                }]
            } else {
                cs.iter()
                    .map(|&cv| Series {
                        label: format!("max n={n} c={cv}"),
                        points: rows
                            .iter()
                            .filter(|r| r.c == Some(cv))
                            .map(|r| (r.alpha.unwrap_or(0.0), r.measured))
                            .collect(),
                    })
                    .collect()
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_equiv(
    source: &NormSource,
    kind_a: KindArg,
    kind_b: KindArg,
    basis_a: Option<&Path>,
    basis_b: Option<&Path>,
    hp_a: Option<&str>,
    hp_b: Option<&str>,
    out: &OutputOpts,
) -> CliResult<()> {
    let tols = ToleranceSet::from_overrides(&out.tol)?;
    let seed = resolve_seed(out.seed)?;
    let (f, _) = load_norm(source)?;

    let load = |path: &Path| -> CliResult<ExtremalBasis> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Ok(ejson::basis_from_str(&text)?)
    };
    let compute = |kind: KindArg, seed: u64| -> CliResult<ExtremalBasis> {
        Ok(match kind {
            KindArg::Minimal => minimal_basis_seeded(&f, seed)?,
            KindArg::Maximal => maximal_basis(&f)?,
        })
    };
    let a = match basis_a {
        Some(p) => load(p)?,
        None => compute(kind_a, seed)?,
    };
    // A second computed basis of the same kind runs from a shifted seed so
    // the pair exercises two independent runs.
    let b = match basis_b {
        Some(p) => load(p)?,
        None => compute(kind_b, if kind_a == kind_b { seed + 1 } else { seed })?,
    };

    let parse_hp = |txt: Option<&str>| -> CliResult<Option<Vec<f64>>> {
        match txt {
            None => Ok(None),
            Some(t) => {
                let vals: Result<Vec<f64>, _> = t.split(',').map(|v| v.trim().parse()).collect();
                Ok(Some(vals.map_err(|_| {
                    CliError::input(format!("bad hereditary constants {t:?}"))
                })?))
            }
        }
    };
    let hp_a = parse_hp(hp_a)?;
    let hp_b = parse_hp(hp_b)?;

    let rep = equivalence_ratios_with_constants(&f, &a, &b, hp_a.as_deref(), hp_b.as_deref())?;
    // Apply the (possibly overridden) multiplicative slack at decision time.
    let ok = rep
        .ratios
        .iter()
        .zip(rep.lower.iter().zip(rep.upper.iter()))
        .all(|(&r, (&lo, &hi))| {
            r >= lo / (1.0 + tols.mult_slack) && r <= hi * (1.0 + tols.mult_slack)
        });

    let report = with_meta(
        json!({
            "n": f.dim(),
            "kind_a": a.kind().as_str(),
            "kind_b": b.kind().as_str(),
            "ratios": rep.ratios,
            "lower": rep.lower,
            "upper": rep.upper,
            "ok": ok,
        }),
        &tols,
        seed,
    );
    println!("{}", serde_json::to_string_pretty(&report).expect("valid"));
    if let Some(path) = &out.json {
        write_json(path, &report)?;
    }
    if let Some(path) = &out.csv {
        let mut csv = CsvOut::create(
            path,
            !out.no_timestamp,
            &[
                "version",
                "seed",
                "tolerances",
                "n",
                "kind_a",
                "kind_b",
                "i",
                "ratio",
                "lower",
                "upper",
                "ok",
            ],
        )?;
        for i in 0..rep.ratios.len() {
            let row_ok = rep.ratios[i] >= rep.lower[i] / (1.0 + tols.mult_slack)
                && rep.ratios[i] <= rep.upper[i] * (1.0 + tols.mult_slack);
            csv.row(&[
                version().into(),
                seed.to_string(),
                tols.describe(),
                f.dim().to_string(),
                a.kind().as_str().into(),
                b.kind().as_str().into(),
                (i + 1).to_string(),
                fmt_f64(rep.ratios[i]),
                fmt_f64(rep.lower[i]),
                fmt_f64(rep.upper[i]),
                row_ok.to_string(),
            ])?;
        }
        csv.finish()?;
    }
    if !ok {
        return Err(CliError::Violation(
            "equivalence ratio bounds violated".into(),
        ));
    }
    Ok(())
}

fn cmd_random(
    n: usize,
    supports: usize,
    count: usize,
    field: FieldArg,
    out: &OutputOpts,
) -> CliResult<()> {
    let tols = ToleranceSet::from_overrides(&out.tol)?;
    let seed = resolve_seed(out.seed)?;
    let dir = out
        .json
        .as_ref()
        .ok_or_else(|| CliError::input("random requires --json DIR for the output directory"))?;
    if n == 0 || supports == 0 || count == 0 {
        return Err(CliError::input(
            "--n, --supports and --count must be positive",
        ));
    }
    std::fs::create_dir_all(dir)?;

    let field = match field {
        FieldArg::R => ScalarField::Real,
        FieldArg::C => ScalarField::Complex,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut files = Vec::with_capacity(count);
    for i in 0..count {
        let spec = random_norm(field, n, supports, &mut rng)?;
        let name = format!("norm_{i:04}.json");
        std::fs::write(dir.join(&name), ejson::norm_to_string(&spec))?;
        files.push(name);
    }
    let manifest = with_meta(
        json!({
            "generator": RNG_ALGORITHM,
            "field": field.to_string(),
            "n": n,
            "supports": supports,
            "count": count,
            "files": files,
        }),
        &tols,
        seed,
    );
    write_json(&dir.join("manifest.json"), &manifest)?;
    println!(
        "wrote {count} norms ({}/norm_0000.json .. ) + manifest.json, generator {RNG_ALGORITHM} seed {seed}",
        dir.display()
    );
    Ok(())
}

fn cmd_oracle(
    source: &NormSource,
    mode: ModeArg,
    resolution: usize,
    out: &OutputOpts,
) -> CliResult<()> {
    let tols = ToleranceSet::from_overrides(&out.tol)?;
    let seed = resolve_seed(out.seed)?;
    let (f, _) = load_norm(source)?;
    let full = Subspace::full(f.field(), f.dim());
    let (mode, mode_name) = match mode {
        ModeArg::Min => (OptMode::Min, "min"),
        ModeArg::Max => (OptMode::Max, "max"),
    };
    let oracle = grid_oracle(&f, &full, mode, resolution)?;
    let engine = match mode {
        OptMode::Max => max_on_sphere(&f, &full)?,
        OptMode::Min => min_on_sphere_seeded(&f, &full, seed)?,
    };
    let report = with_meta(
        json!({
            "mode": mode_name,
            "resolution": resolution,
            "oracle": {
                "value": oracle.value,
                "argopt": ejson::vector_to_json(&oracle.argopt),
                "evaluations": oracle.starts_used,
                "method": oracle.method.as_str(),
            },
            "engine": {
                "value": engine.value,
                "argopt": ejson::vector_to_json(&engine.argopt),
                "method": engine.method.as_str(),
                "converged": engine.converged,
            },
            "difference": (oracle.value - engine.value).abs(),
        }),
        &tols,
        seed,
    );
    println!("{}", serde_json::to_string_pretty(&report).expect("valid"));
    if let Some(path) = &out.json {
        write_json(path, &report)?;
    }
    Ok(())
}
