use std::path::Path;

use glcc::data::{
    apply_split, generate_synthetic, load_dataset, load_views, read_label_tokens, save_dataset,
    write_labels, TextFormat,
};
use glcc::eval::{grid_search, score, summary_json, sweep_labeled_fraction, EvalReport};
use glcc::graphs::{build_graph_set, GraphCache, GraphSet};
use glcc::model::{predict_batch, train as fit, Prediction, TrainedModel};
use glcc::{GlccError, Result};
use log::info;

use crate::config::{required, write_file, RunConfig};

pub fn synth(cfg: &RunConfig) -> Result<()> {
    let out = cfg.prepare_out_dir()?;
    let data = generate_synthetic(&cfg.synth)?;
    let truth: Vec<Option<usize>> = data.labels();
    let partial = if cfg.split.labeled_fraction < 1.0 {
        apply_split(&data, &cfg.split)?.dataset
    } else {
        data.clone()
    };
    let saved = save_dataset(&partial, out, &cfg.format)?;
    write_labels(
        &out.join("truth.csv"),
        &truth,
        data.class_names(),
        &cfg.format,
    )?;
    info!(
        "wrote {} views and {} labeled of {} samples to {}",
        saved.views.len(),
        partial.num_labeled(),
        partial.n(),
        out.display()
    );
    Ok(())
}

pub fn build_graphs(cfg: &RunConfig) -> Result<()> {
    let views = load_views(cfg.require_views()?, &cfg.format)?;
    cfg.train.validate()?;
    let graphs = build_graph_set(&views, &cfg.train.graph_config())?;
    let out = cfg.prepare_out_dir()?;
    GraphCache::from_graph_set(&graphs).write(&out.join("graphs.json"))
}

fn graphs_for(cfg: &RunConfig, views: &[glcc::data::FeatureView]) -> Result<GraphSet> {
    match &cfg.paths.graphs {
        Some(path) => {
            let cached = GraphCache::read(path)?
                .into_graph_set(&cfg.train.graph_config())
                .map_err(|e| e.context(path.display()))?;
            if cached.n != views[0].n() || cached.m() != views.len() {
                return Err(GlccError::ConfigMismatch(format!(
                    "{}: cache holds {} views of {} samples, data has {} views of {}",
                    path.display(),
                    cached.m(),
                    cached.n,
                    views.len(),
                    views[0].n()
                )));
            }
            Ok(cached)
        }
        None => build_graph_set(views, &cfg.train.graph_config()),
    }
}

pub fn train(cfg: &RunConfig) -> Result<()> {
    let labels = required(&cfg.paths.labels, "--labels")?;
    let data = load_dataset(cfg.require_views()?, labels, &cfg.format, None)?;
    cfg.train.validate()?;
    let graphs = graphs_for(cfg, data.views())?;
    let (params, trace) = fit(&data, &graphs, &cfg.train)?;
    info!(
        "{} after {} iterations, objective {:e}",
        if trace.converged {
            "converged"
        } else {
            "stopped"
        },
        trace.iterations(),
        trace.objective.last().copied().unwrap_or(f64::NAN)
    );
    let model = TrainedModel::new(
        data.class_names().to_vec(),
        data.views().iter().map(|v| v.name.clone()).collect(),
        params,
        cfg.train.clone(),
    );
    let out = cfg.prepare_out_dir()?;
    model.write(&out.join("model.json"))?;
    write_file(&out.join("trace.csv"), &trace.to_delimited())
}

pub fn predict(cfg: &RunConfig) -> Result<()> {
    let model = TrainedModel::read(required(&cfg.paths.model, "--model")?)?;
    let paths = cfg.require_views()?;
    let views = load_views(paths, &cfg.format)?;
    if views.len() != model.view_names.len() {
        return Err(GlccError::Data(format!(
            "{} view files given, model was trained on {} ({})",
            views.len(),
            model.view_names.len(),
            model.view_names.join(", ")
        )));
    }
    for ((view, path), (expected, p)) in views
        .iter()
        .zip(paths)
        .zip(model.view_names.iter().zip(&model.params.p))
    {
        if view.dim() != p.nrows() {
            return Err(GlccError::Data(format!(
                "view '{}' ({}) has {} features, model view '{expected}' expects {}",
                view.name,
                path.display(),
                view.dim(),
                p.nrows()
            )));
        }
    }
    let matrices: Vec<_> = views.iter().map(|v| v.data.clone()).collect();
    let predictions = predict_batch(&model.params, &matrices)?;
    let out = cfg.prepare_out_dir()?;
    write_predictions(
        &out.join("predictions.csv"),
        &model.class_names,
        &predictions,
    )
}

fn write_predictions(path: &Path, classes: &[String], predictions: &[Prediction]) -> Result<()> {
    let mut text = format!("label,{}\n", classes.join(","));
    for p in predictions {
        text.push_str(&classes[p.label]);
        for s in &p.scores {
            text.push_str(&format!(",{s}"));
        }
        text.push('\n');
    }
    write_file(path, &text)
}

fn read_predictions(path: &Path) -> Result<(Vec<String>, Vec<Prediction>)> {
    let bad = |msg: String| GlccError::Data(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.get(0) != Some("label") || header.len() < 2 {
        return Err(bad("header must be 'label,<class>,...'".into()));
    }
    let classes: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut predictions = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let label = classes
            .iter()
            .position(|c| c == &record[0])
            .ok_or_else(|| bad(format!("row {r}: unknown class '{}'", &record[0])))?;
        let scores = record
            .iter()
            .skip(1)
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| bad(format!("row {r}: '{s}' is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        predictions.push(Prediction { label, scores });
    }
    Ok((classes, predictions))
}

fn read_truth(
    path: &Path,
    n: usize,
    classes: &[String],
    format: &TextFormat,
) -> Result<Vec<usize>> {
    read_label_tokens(path, n, format)?
        .into_iter()
        .enumerate()
        .map(|(i, tok)| {
            let tok = tok.ok_or_else(|| {
                GlccError::Data(format!(
                    "{}: sample {i} has no ground-truth label",
                    path.display()
                ))
            })?;
            classes.iter().position(|c| *c == tok).ok_or_else(|| {
                GlccError::Data(format!(
                    "{}: class '{tok}' of sample {i} is not among the predicted classes",
                    path.display()
                ))
            })
        })
        .collect()
}

fn confusion_table(classes: &[String], report: &EvalReport) -> String {
    let mut text = format!("true,{}\n", classes.join(","));
    for (k, row) in report.confusion.iter().enumerate() {
        text.push_str(&classes[k]);
        for count in row {
            text.push_str(&format!(",{count}"));
        }
        text.push('\n');
    }
    text
}

pub fn eval(cfg: &RunConfig) -> Result<()> {
    let (classes, predictions) =
        read_predictions(required(&cfg.paths.predictions, "--predictions")?)?;
    let truth = read_truth(
        required(&cfg.paths.truth, "--truth")?,
        predictions.len(),
        &classes,
        &cfg.format,
    )?;
    let report = score(&predictions, &truth)?;
    info!("accuracy {:.4}, MAP {:.4}", report.accuracy, report.map);
    let out = cfg.prepare_out_dir()?;
    write_file(&out.join("report.json"), &summary_json("eval", &report))?;
    write_file(
        &out.join("confusion.csv"),
        &confusion_table(&classes, &report),
    )
}

fn load_labeled(cfg: &RunConfig) -> Result<glcc::data::MultiFeatureDataset> {
    let labels = required(&cfg.paths.labels, "--labels")?;
    load_dataset(cfg.require_views()?, labels, &cfg.format, None)
}

pub fn sweep(cfg: &RunConfig) -> Result<()> {
    let data = load_labeled(cfg)?;
    let table = sweep_labeled_fraction(&data, &cfg.sweep, &cfg.train)?;
    let out = cfg.prepare_out_dir()?;
    write_file(&out.join("sweep.csv"), &table.to_delimited())?;
    write_file(&out.join("summary.json"), &summary_json("sweep", &table))?;
    let traces = out.join("traces");
    std::fs::create_dir_all(&traces).map_err(|e| GlccError::Io {
        path: traces.clone(),
        source: e,
    })?;
    for run in &table.runs {
        if let Some(trace) = &run.trace {
            let name = format!("fraction-{}-repeat-{}.csv", run.fraction, run.repeat);
            write_file(&traces.join(name), &trace.to_delimited())?;
        }
    }
    Ok(())
}

pub fn grid(cfg: &RunConfig) -> Result<()> {
    let data = load_labeled(cfg)?;
    let result = grid_search(&data, &cfg.grid, &cfg.train)?;
    let (i, j) = result.best;
    info!(
        "best lambda={} gamma={} ({:?} {:.4})",
        result.lambdas[i],
        result.gammas[j],
        result.metric,
        result.value(i, j)
    );
    let out = cfg.prepare_out_dir()?;
    write_file(&out.join("grid.csv"), &result.to_delimited())?;
    write_file(&out.join("summary.json"), &summary_json("grid", &result))
}
