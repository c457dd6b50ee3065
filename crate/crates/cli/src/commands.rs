//! Subcommand implementations and artifact writers.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use loanboost::booster::{feature_importance, train_with_callback, BoosterModel};
use loanboost::dataset::{
    demographic_schema, join_and_engineer, load_csv, load_prepared, performance_schema,
    previous_schema, save_prepared, synth_generate, write_csv, PrepSidecar, SynthConfig,
};
use loanboost::metrics::{confusion_matrix, roc_curve, scalar_metrics, ConfusionMatrix};
use loanboost::modelselect::{cross_validate, grid_search, CvReport, ParamGrid};
use loanboost::Error;

use crate::args::{
    Command, CvArgs, EvaluateArgs, GridsearchArgs, ImportanceArgs, PredictArgs, PrepArgs,
    PositiveLabelArg, RocArgs, SynthArgs, TrainArgs,
};
use crate::svg;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(args) => synth(&args),
        Command::Prep(args) => prep(&args),
        Command::Train(args) => train(&args),
        Command::Predict(args) => predict(&args),
        Command::Evaluate(args) => evaluate(&args),
        Command::Cv(args) => cv(&args),
        Command::Gridsearch(args) => gridsearch(&args),
        Command::Importance(args) => importance(&args),
        Command::Roc(args) => roc(&args),
    }
}

/// Exit codes: 1 for usage/configuration problems, 2 for data, schema,
/// model-format, and I/O problems.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::Argument(_)) => 1,
        _ => 2,
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    Ok(())
}

fn write_text(path: &Path, contents: &str) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn synth(args: &SynthArgs) -> Result<()> {
    let config = SynthConfig {
        seed: args.seed,
        n_demographic: args.n_demographic,
        n_performance: args.n_performance,
        n_previous: args.n_previous,
        bad_rate: args.bad_rate,
    };
    let (demographic, performance, previous) = synth_generate(&config)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating directory {}", args.out_dir.display()))?;
    write_csv(&demographic, args.out_dir.join("demographic.csv"))?;
    write_csv(&performance, args.out_dir.join("performance.csv"))?;
    write_csv(&previous, args.out_dir.join("previous.csv"))?;
    println!(
        "wrote {} ({} rows), {} ({} rows), {} ({} rows)",
        args.out_dir.join("demographic.csv").display(),
        demographic.n_rows(),
        args.out_dir.join("performance.csv").display(),
        performance.n_rows(),
        args.out_dir.join("previous.csv").display(),
        previous.n_rows(),
    );
    Ok(())
}

fn prep(args: &PrepArgs) -> Result<()> {
    let demographic = load_csv(&args.demographic, &demographic_schema())?;
    let performance = load_csv(&args.performance, &performance_schema())?;
    let previous = load_csv(&args.previous, &previous_schema())?;

    let reused = match &args.encodings {
        Some(path) => Some(PrepSidecar::load(path)?.encodings),
        None => None,
    };
    let prepared = join_and_engineer(
        &demographic,
        &performance,
        &previous,
        args.reference_date,
        args.max_levels,
        reused.as_deref(),
    )?;

    ensure_parent(&args.out)?;
    save_prepared(&prepared.dataset, &args.out)?;
    let sidecar_path = args.sidecar_path();
    ensure_parent(&sidecar_path)?;
    prepared.sidecar().save(&sidecar_path)?;
    println!(
        "prepared {} rows x {} features -> {} (+ {})",
        prepared.dataset.n_rows(),
        prepared.dataset.n_features(),
        args.out.display(),
        sidecar_path.display(),
    );
    Ok(())
}

fn train(args: &TrainArgs) -> Result<()> {
    let dataset = load_prepared(&args.data)?;
    let params = args.booster.to_params();
    let verbose = args.verbose;
    let model = train_with_callback(&dataset, &params, |round, loss| {
        if verbose {
            println!("round {:>4} train-logloss {loss:.6}", round + 1);
        }
    })?;
    ensure_parent(&args.out)?;
    model.save(&args.out)?;
    println!(
        "trained {} trees on {} rows -> {}",
        model.trees.len(),
        dataset.n_rows(),
        args.out.display()
    );
    Ok(())
}

fn predict(args: &PredictArgs) -> Result<()> {
    let model = BoosterModel::load(&args.model)?;
    let dataset = load_prepared(&args.data)?;
    let probs = model.predict_proba(&dataset)?;
    let mut out = String::from("probability\n");
    for p in &probs {
        out.push_str(&format!("{p}\n"));
    }
    write_text(&args.out, &out)?;
    println!("wrote {} probabilities -> {}", probs.len(), args.out.display());
    Ok(())
}

/// Scores oriented so that larger means "more likely the positive class".
fn oriented_scores(probs: &[f64], positive: PositiveLabelArg) -> Vec<f64> {
    match positive {
        PositiveLabelArg::Good => probs.to_vec(),
        PositiveLabelArg::Bad => probs.iter().map(|p| 1.0 - p).collect(),
    }
}

#[derive(serde::Serialize)]
struct MetricsArtifact {
    confusion_matrix: ConfusionMatrix,
    accuracy: f64,
    precision: f64,
    recall: f64,
    f1: f64,
    auc: f64,
    positive_label: String,
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let model = BoosterModel::load(&args.model)?;
    let dataset = load_prepared(&args.data)?;
    let probs = model.predict_proba(&dataset)?;
    let y_pred: Vec<u8> = probs.iter().map(|&p| u8::from(p >= args.threshold)).collect();

    let positive = args.positive_label;
    let cm = confusion_matrix(dataset.target(), &y_pred, positive.label())?;
    let scalars = scalar_metrics(&cm);
    let scores = oriented_scores(&probs, positive);
    let auc = roc_curve(dataset.target(), &scores, positive.label())?.auc;

    let artifact = MetricsArtifact {
        confusion_matrix: cm,
        accuracy: scalars.accuracy,
        precision: scalars.precision,
        recall: scalars.recall,
        f1: scalars.f1,
        auc,
        positive_label: positive.name().to_owned(),
    };
    write_text(&args.out, &to_pretty_json(&artifact)?)?;
    println!(
        "accuracy {:.5} precision {:.5} recall {:.5} f1 {:.5} auc {:.5} -> {}",
        scalars.accuracy,
        scalars.precision,
        scalars.recall,
        scalars.f1,
        auc,
        args.out.display()
    );
    Ok(())
}

/// One CSV row per fold per combination, AUC empty when undefined.
fn fold_rows_csv(reports: &[CvReport]) -> String {
    let mut out = String::from(
        "combo,fold,n_estimators,learning_rate,subsample,reg_alpha,reg_lambda,max_depth,\
         accuracy,precision,recall,f1,auc\n",
    );
    for (combo, report) in reports.iter().enumerate() {
        for (fold, m) in report.folds.iter().enumerate() {
            let auc = m.auc.map(|a| a.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{combo},{fold},{},{},{},{},{},{},{},{},{},{},{auc}\n",
                report.params.n_estimators,
                report.params.learning_rate,
                report.params.subsample,
                report.params.reg_alpha,
                report.params.reg_lambda,
                report.params.max_depth,
                m.accuracy,
                m.precision,
                m.recall,
                m.f1,
            ));
        }
    }
    out
}

fn cv(args: &CvArgs) -> Result<()> {
    let dataset = load_prepared(&args.data)?;
    let params = args.booster.to_params();
    let report = cross_validate(
        &dataset,
        &params,
        args.k,
        args.booster.seed,
        args.positive_label.label(),
    )?;
    write_text(&args.out_csv, &fold_rows_csv(std::slice::from_ref(&report)))?;
    write_text(&args.out_json, &to_pretty_json(&report)?)?;
    match report.mean.auc {
        Some(auc) => println!(
            "{}-fold cv: mean auc {auc:.5} (std {:.5}) -> {}",
            args.k,
            report.std.auc.unwrap_or(0.0),
            args.out_json.display()
        ),
        None => println!(
            "{}-fold cv: auc undefined on every fold -> {}",
            args.k,
            args.out_json.display()
        ),
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|v| {
            v.trim().parse::<T>().map_err(|_| {
                Error::Argument(format!("--grid {key}: `{v}` is not a valid value")).into()
            })
        })
        .collect()
}

fn parse_grid(flags: &[String]) -> Result<ParamGrid> {
    let mut grid = ParamGrid::default();
    fn set<T>(slot: &mut Option<Vec<T>>, values: Vec<T>, key: &str) -> Result<()> {
        if slot.is_some() {
            return Err(Error::Argument(format!("--grid {key} given twice")).into());
        }
        *slot = Some(values);
        Ok(())
    }
    for flag in flags {
        let (key, raw) = flag.split_once('=').ok_or_else(|| {
            Error::Argument(format!("--grid expects PARAM=V1,V2,..., got `{flag}`"))
        })?;
        match key {
            "n-estimators" => set(&mut grid.n_estimators, parse_list(key, raw)?, key)?,
            "learning-rate" => set(&mut grid.learning_rate, parse_list(key, raw)?, key)?,
            "subsample" => set(&mut grid.subsample, parse_list(key, raw)?, key)?,
            "reg-alpha" => set(&mut grid.reg_alpha, parse_list(key, raw)?, key)?,
            "reg-lambda" => set(&mut grid.reg_lambda, parse_list(key, raw)?, key)?,
            "max-depth" => set(&mut grid.max_depth, parse_list(key, raw)?, key)?,
            other => {
                return Err(Error::Argument(format!(
                    "--grid does not know parameter `{other}`"
                ))
                .into())
            }
        }
    }
    Ok(grid)
}

fn gridsearch(args: &GridsearchArgs) -> Result<()> {
    let dataset = load_prepared(&args.data)?;
    let base = args.booster.to_params();
    let grid = parse_grid(&args.grid)?;
    let result = grid_search(
        &dataset,
        &base,
        &grid,
        args.k,
        args.booster.seed,
        args.positive_label.label(),
    )?;
    write_text(&args.out_best, &to_pretty_json(&result.best_params)?)?;
    write_text(&args.out_csv, &fold_rows_csv(&result.reports))?;
    write_text(&args.out_json, &to_pretty_json(&result)?)?;
    println!(
        "evaluated {} combinations; best index {} (mean auc {:.5}) -> {}",
        result.reports.len(),
        result.best_index,
        result.reports[result.best_index]
            .mean
            .auc
            .unwrap_or(f64::NAN),
        args.out_best.display()
    );
    Ok(())
}

fn importance(args: &ImportanceArgs) -> Result<()> {
    let model = BoosterModel::load(&args.model)?;
    let kind = loanboost::booster::ImportanceKind::from(args.kind);
    let ranking = feature_importance(&model, kind);
    let mut out = String::from("feature,score,kind\n");
    for (feature, score) in &ranking {
        out.push_str(&format!("{feature},{score},{kind}\n"));
    }
    write_text(&args.out, &out)?;
    println!("ranked {} features -> {}", ranking.len(), args.out.display());
    Ok(())
}

fn roc(args: &RocArgs) -> Result<()> {
    let model = BoosterModel::load(&args.model)?;
    let dataset = load_prepared(&args.data)?;
    let probs = model.predict_proba(&dataset)?;
    let scores = oriented_scores(&probs, args.positive_label);
    let curve = roc_curve(dataset.target(), &scores, args.positive_label.label())?;

    let mut csv = Vec::new();
    curve.write_csv(&mut csv)?;
    write_text(&args.out_csv, &String::from_utf8(csv)?)?;
    write_text(&args.out_svg, &svg::render_roc(&curve.points, curve.auc))?;
    println!(
        "auc {:.5}; {} curve points -> {} and {}",
        curve.auc,
        curve.points.len(),
        args.out_csv.display(),
        args.out_svg.display()
    );
    Ok(())
}
