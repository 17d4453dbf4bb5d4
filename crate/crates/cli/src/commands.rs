use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

use pceval_core::aux_metrics::{completion_score, voxel_iou};
use pceval_core::distances::{EmdConfig, PairDistance};
use pceval_core::geometry::{normalize_unit_sphere, sample_mesh, voxelize};
use pceval_core::harness::formats::{load_clouds, load_codes, load_mesh, load_voxel_grid, save_clouds, save_codes};
use pceval_core::harness::{
    crop_halfspace, hedging_fixture, memorization_baseline, report_csv_row, report_json, select_model, split_dataset,
    CheckpointSeries, SelectionCriterion, CSV_HEADER,
};
use pceval_core::latent_models::{
    analogy, apply_edit, attribute_vector, decode, fit_em, gmm_sample, interpolate, CovarianceType, Decoder, EmConfig,
    ExternalDecoder, GmmModel, GroupReduction, LatentCodeSet, LinearDecoder,
};
use pceval_core::rng::seeded;
use pceval_core::set_metrics::{distance_matrix, evaluate_generator, jsd, EvalProtocolConfig};
use pceval_core::{Error, GridSpec, PointCloud, Result};

use crate::args::{Command, Covariance, Criterion, EmdArgs, EvalArgs, LatentCommand, Metric, Reduction};

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    s.push('\n');
    write_text(path, &s)
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("plain JSON value"));
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: not a valid {what}: {e}", path.display())))
}

/// `<path>.meta.json`, kept apart from the artifact so the artifact stays
/// byte-identical across reruns.
fn write_meta(artifact: &Path, command: &str) -> Result<()> {
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut name = artifact.as_os_str().to_owned();
    name.push(".meta.json");
    write_json(
        &PathBuf::from(name),
        &json!({
            "artifact": artifact.display().to_string(),
            "command": command,
            "created_unix": created,
            "tool_version": env!("CARGO_PKG_VERSION"),
        }),
    )
}

fn emd_config(a: &EmdArgs) -> Result<EmdConfig> {
    let cfg = EmdConfig {
        exact_threshold: a.emd_exact_threshold,
        epsilon: a.emd_epsilon,
        normalize: !a.emd_total,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::SampleMesh {
            mesh,
            points,
            seed,
            normalize,
            out,
        } => {
            let mesh = load_mesh(&mesh)?;
            let mut pc = sample_mesh(&mesh, points, &mut seeded(seed))?;
            if normalize {
                pc = normalize_unit_sphere(&pc);
            }
            save_clouds(&out, &[pc])
        }
        Command::Normalize { input, out } => {
            let clouds: Vec<PointCloud> = load_clouds(&input)?.iter().map(normalize_unit_sphere).collect();
            save_clouds(&out, &clouds)
        }
        Command::Dist {
            a,
            b,
            metric,
            chamfer_sum,
            emd,
        } => {
            let (a, b) = (load_clouds(&a)?, load_clouds(&b)?);
            let metric = match metric {
                Metric::Cd => PairDistance::Chamfer { normalize: !chamfer_sum },
                Metric::Emd => PairDistance::Emd(emd_config(&emd)?),
            };
            let m = distance_matrix(&a, &b, &metric)?;
            let mut out = json!({
                "metric": metric.kind().to_string(),
                "rows": m.rows(),
                "cols": m.cols(),
                "values": m.values(),
            });
            if m.values().len() == 1 {
                out["value"] = json!(m.values()[0]);
            }
            print_json(&out);
            Ok(())
        }
        Command::Eval(args) => eval(args),
        Command::GmmFit {
            codes,
            components,
            covariance,
            seed,
            max_iters,
            tolerance,
            regularization,
            restarts,
            out,
            diagnostics,
        } => {
            let data = load_codes(&codes)?;
            let cfg = EmConfig {
                n_components: components,
                covariance_type: match covariance {
                    Covariance::Full => CovarianceType::Full,
                    Covariance::Diag => CovarianceType::Diagonal,
                },
                max_iters,
                tolerance,
                regularization,
                restarts,
                seed,
            };
            let fit = fit_em(&data, &cfg)?;
            write_json(&out, &fit.model)?;
            if let Some(path) = diagnostics {
                write_json(&path, &json!({ "config": cfg, "diagnostics": fit.diagnostics }))?;
            }
            Ok(())
        }
        Command::GmmSample { model, count, seed, out } => {
            let model: GmmModel = read_json(&model, "mixture model")?;
            save_codes(&out, &gmm_sample(&model, count, &mut seeded(seed))?)
        }
        Command::Decode {
            codes,
            template,
            weights,
            command,
            out,
        } => {
            let codes = load_codes(&codes)?;
            let decoder: Box<dyn Decoder> = match (template, weights, command) {
                (Some(t), Some(w), _) => Box::new(LinearDecoder::from_files(&t, &w)?),
                (_, _, Some(cmd)) => Box::new(ExternalDecoder::from_command_line(&cmd)?),
                _ => return Err(Error::InvalidArgument("give --template and --weights, or --command".into())),
            };
            save_clouds(&out, &decode(&codes, decoder.as_ref())?)
        }
        Command::Latent(cmd) => latent(cmd),
        Command::CompleteScore {
            predicted,
            ground_truth,
            rho,
        } => {
            let p = single_cloud(&predicted)?;
            let g = single_cloud(&ground_truth)?;
            let s = completion_score(&p, &g, rho)?;
            print_json(&json!(s));
            Ok(())
        }
        Command::Iou { a, b } => {
            let iou = voxel_iou(&load_voxel_grid(&a)?, &load_voxel_grid(&b)?)?;
            print_json(&json!({ "iou": iou }));
            Ok(())
        }
        Command::Split { count, ratios, seed, out } => {
            let ratios = triple(&ratios, "--ratios")?;
            let split = split_dataset(count, ratios, seed)?;
            write_json(&out, &split)
        }
        Command::BaselineMemorize {
            train,
            size,
            seed,
            with_replacement,
            out,
        } => save_clouds(&out, &memorization_baseline(&load_clouds(&train)?, size, seed, with_replacement)?),
        Command::FixtureHedge {
            reference,
            hot_fraction,
            spread,
            seed,
            out,
        } => {
            // cloud i uses seed + i so single-cloud runs match the library call
            let clouds = load_clouds(&reference)?
                .iter()
                .enumerate()
                .map(|(i, c)| hedging_fixture(c, hot_fraction, spread, seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>>>()?;
            save_clouds(&out, &clouds)
        }
        Command::Crop {
            input,
            normal,
            keep_fraction,
            resample_to,
            with_replacement,
            seed,
            out,
        } => {
            let normal = triple(&normal, "--normal")?;
            let clouds = load_clouds(&input)?
                .iter()
                .enumerate()
                .map(|(i, c)| crop_halfspace(c, normal, keep_fraction, resample_to, with_replacement, seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>>>()?;
            save_clouds(&out, &clouds)
        }
        Command::Select {
            series,
            validation,
            criterion,
            resolution,
            out,
        } => {
            let series = CheckpointSeries::from_manifest(&series)?;
            let validation = load_clouds(&validation)?;
            let cfg = EvalProtocolConfig {
                grid: GridSpec::with_resolution(resolution)?,
                ..EvalProtocolConfig::default()
            };
            let criterion = match criterion {
                Criterion::Jsd => SelectionCriterion::Jsd,
                Criterion::MmdCd => SelectionCriterion::MmdCd,
            };
            let result = select_model(&series, &validation, criterion, &cfg)?;
            match out {
                Some(path) => write_json(&path, &result),
                None => {
                    print_json(&json!(result));
                    Ok(())
                }
            }
        }
    }
}

fn triple(v: &[f64], flag: &str) -> Result<[f64; 3]> {
    <[f64; 3]>::try_from(v).map_err(|_| Error::InvalidArgument(format!("{flag} takes three comma-separated numbers")))
}

fn single_cloud(path: &Path) -> Result<PointCloud> {
    let mut clouds = load_clouds(path)?;
    if clouds.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "{} holds {} clouds, expected 1",
            path.display(),
            clouds.len()
        )));
    }
    Ok(clouds.remove(0))
}

fn eval(args: EvalArgs) -> Result<()> {
    let grid = GridSpec::with_resolution(args.resolution)?;
    let reference_grid = GridSpec::with_resolution(args.reference_resolution.unwrap_or(args.resolution))?;
    let cfg = EvalProtocolConfig {
        oversample_factor: args.oversample,
        repetitions: args.repetitions,
        grid,
        emd: emd_config(&args.emd)?,
        chamfer_normalize: !args.chamfer_sum,
        seed: args.seed,
    };
    cfg.validate()?;
    let samples = load_clouds(&args.samples)?;
    let reference = load_clouds(&args.reference)?;
    if reference_grid != grid {
        // surfaces the same grid-mismatch error the histogram comparison reports
        jsd(&voxelize(&samples, &grid)?, &voxelize(&reference, &reference_grid)?)?;
    }
    let group = cfg.oversample_factor * reference.len();
    if samples.len() != group * cfg.repetitions {
        return Err(Error::ProtocolViolation(format!(
            "{} sample clouds given; {} repetitions x {} oversample x {} references need {}",
            samples.len(),
            cfg.repetitions,
            cfg.oversample_factor,
            reference.len(),
            group * cfg.repetitions
        )));
    }
    let groups: Vec<Vec<PointCloud>> = samples.chunks(group).map(<[PointCloud]>::to_vec).collect();
    let mut report = evaluate_generator(&groups, &reference, &cfg)?;
    report.config.synthetic = args.synthetic;
    write_text(&args.out, &report_json(&report))?;
    write_meta(&args.out, "eval")?;
    if let Some(csv) = args.csv {
        write_text(&csv, &format!("{CSV_HEADER}\n{}\n", report_csv_row(&report)))?;
    }
    Ok(())
}

fn latent(cmd: LatentCommand) -> Result<()> {
    let row = |set: &LatentCodeSet, i: usize| -> Result<Vec<f64>> {
        if i >= set.rows() {
            return Err(Error::InvalidArgument(format!("row {i} out of range for {} codes", set.rows())));
        }
        Ok(set.row(i).to_vec())
    };
    match cmd {
        LatentCommand::Interpolate {
            codes,
            from,
            to,
            steps,
            out,
        } => {
            if steps < 2 {
                return Err(Error::InvalidArgument("steps must be at least 2".into()));
            }
            let set = load_codes(&codes)?;
            let (a, b) = (row(&set, from)?, row(&set, to)?);
            let rows = (0..steps)
                .map(|s| interpolate(&a, &b, s as f64 / (steps - 1) as f64))
                .collect::<Result<Vec<_>>>()?;
            save_codes(&out, &LatentCodeSet::from_rows(&rows)?)
        }
        LatentCommand::Edit {
            codes,
            group_a,
            group_b,
            reduction,
            strength,
            out,
        } => {
            let reduction = match reduction {
                Reduction::Mean => GroupReduction::Mean,
                Reduction::Sum => GroupReduction::Sum,
            };
            let dir = attribute_vector(&load_codes(&group_a)?, &load_codes(&group_b)?, reduction)?;
            let edit: Vec<f64> = dir.iter().map(|v| v * strength).collect();
            let set = load_codes(&codes)?;
            let rows = set.iter_rows().map(|r| apply_edit(r, &edit)).collect::<Result<Vec<_>>>()?;
            save_codes(&out, &LatentCodeSet::from_rows(&rows)?)
        }
        LatentCommand::Analogy {
            codebook,
            a,
            a_prime,
            b,
        } => {
            let book = load_codes(&codebook)?;
            let (index, code) = analogy(&row(&book, a)?, &row(&book, a_prime)?, &row(&book, b)?, &book)?;
            print_json(&json!({ "index": index, "code": code }));
            Ok(())
        }
    }
}
