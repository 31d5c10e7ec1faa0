use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use netpeace_core::eval::{build_filter_index, evaluate};
use netpeace_core::kgc::{fit, load_checkpoint, save_checkpoint, DevSet, InitMode};
use netpeace_core::kgdata::{build_low_resource_split, build_projection_graph, network_stats};
use netpeace_core::pretrain::pretrain;
use netpeace_core::projection::{project_2d, PROJECTION_METHOD};
use netpeace_core::{Dataset, EmbeddingMatrix, TripleStore};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::{write_json, Manifest};

/// Prints a summary line, ignoring a closed stdout (e.g. piped into `head`).
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// Shared state of one invocation.
pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
}

impl Context {
    fn manifest(&self, command: &'static str, namespaces: &[&str]) -> Result<Manifest, CliError> {
        Ok(Manifest::new(
            command,
            self.config.get("seed")?,
            self.config.get("threads")?,
            self.config.section(namespaces),
        ))
    }

    fn output(&self, manifest: &mut Manifest, name: &str) -> Result<BufWriter<File>, CliError> {
        manifest.outputs.push(name.to_string());
        let path = self.out.join(name);
        let file = File::create(&path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        Ok(BufWriter::new(file))
    }
}

fn load_dataset(dir: &Path, manifest: &mut Manifest) -> Result<Dataset, CliError> {
    let paths = Dataset::split_paths(dir);
    if let Some(missing) = paths.iter().find(|p| !p.is_file()) {
        return Err(CliError::Usage(format!("dataset file not found: {}", missing.display())));
    }
    for path in &paths {
        manifest.add_input(path)?;
    }
    Ok(Dataset::load(dir)?)
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    if !path.is_file() {
        return Err(CliError::Usage(format!("file not found: {}", path.display())));
    }
    let file = File::open(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    Ok(BufReader::new(file))
}

/// Reads either embedding format. Binary files carry no labels, so rows are
/// labelled by index.
fn read_embeddings(path: &Path) -> Result<(Option<Vec<String>>, EmbeddingMatrix), CliError> {
    let mut bytes = Vec::new();
    open(path)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(netpeace_core::embedding::EMBEDDING_MAGIC) {
        Ok((None, EmbeddingMatrix::read_binary(&bytes[..])?))
    } else {
        let (labels, matrix) = EmbeddingMatrix::read_text(&bytes[..])?;
        Ok((Some(labels), matrix))
    }
}

fn finish(mut out: BufWriter<File>) -> Result<(), CliError> {
    out.flush()?;
    Ok(())
}

pub fn stats(ctx: &Context, dataset: &Path) -> Result<(), CliError> {
    let mut manifest = ctx.manifest("stats", &["stats"])?;
    let ds = load_dataset(dataset, &mut manifest)?;
    let extra: Vec<&TripleStore> = match ctx.config.raw("stats.splits") {
        "train" => Vec::new(),
        "all" => vec![&ds.valid, &ds.test],
        other => {
            return Err(CliError::Usage(format!(
                "invalid value for `stats.splits`: `{other}` (expected train or all)"
            )))
        }
    };
    let graph = build_projection_graph(&ds.train, &extra)?;
    let stats = network_stats(&graph, &ctx.config.stats()?)?;
    write_json(&ctx.out.join("stats.json"), &stats)?;
    manifest.outputs.push("stats.json".into());
    manifest.write(&ctx.out)?;
    emit(&serde_json::to_string_pretty(&stats)?);
    Ok(())
}

pub fn pretrain_cmd(ctx: &Context, dataset: &Path) -> Result<(), CliError> {
    let config = ctx.config.pretrain()?;
    let mut manifest = ctx.manifest("pretrain", &["pretrain"])?;
    let ds = load_dataset(dataset, &mut manifest)?;
    let graph = build_projection_graph(&ds.train, &[])?;
    let output = pretrain(&graph, &config)?;
    match ctx.config.raw("pretrain.format") {
        "text" => {
            let mut out = ctx.output(&mut manifest, "embeddings.txt")?;
            output.embeddings.write_text(ds.train.entities().labels(), &mut out)?;
            finish(out)?;
        }
        "binary" => {
            let mut out = ctx.output(&mut manifest, "embeddings.bin")?;
            output.embeddings.write_binary(&mut out)?;
            finish(out)?;
        }
        other => {
            return Err(CliError::Usage(format!(
                "invalid value for `pretrain.format`: `{other}` (expected text or binary)"
            )))
        }
    }
    manifest.result("rows", output.embeddings.rows())?;
    manifest.result("dim", output.embeddings.dim())?;
    manifest.result("isolated_nodes", output.isolated_nodes)?;
    if output.isolated_nodes > 0 {
        manifest
            .notes
            .push(format!("{} entities without training edges keep their random initialization", output.isolated_nodes));
    }
    if config.threads > 1 {
        manifest.notes.push("multi-threaded lock-free updates; output is not bit-reproducible".into());
    }
    manifest.write(&ctx.out)?;
    eprintln!("wrote {} x {} embeddings", output.embeddings.rows(), output.embeddings.dim());
    Ok(())
}

pub fn train(ctx: &mut Context, dataset: &Path, pretrained: Option<&Path>) -> Result<(), CliError> {
    let pretrained: Option<PathBuf> = match (pretrained, ctx.config.raw("train.pretrained")) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, "") => None,
        (None, p) => Some(PathBuf::from(p)),
    };
    if let Some(path) = &pretrained {
        ctx.config.set("train.pretrained", &path.display().to_string())?;
        ctx.config.set("train.init_mode", "pretrained")?;
    }
    let config = ctx.config.train()?;
    if config.init_mode == InitMode::Pretrained && pretrained.is_none() {
        return Err(CliError::Usage(
            "train.init_mode is pretrained but no embedding file was given (--pretrained or train.pretrained)".into(),
        ));
    }
    let mut manifest = ctx.manifest("train", &["train"])?;
    let ds = load_dataset(dataset, &mut manifest)?;
    let embeddings = match &pretrained {
        Some(path) => {
            manifest.add_input(path)?;
            let (labels, matrix) = read_embeddings(path)?;
            Some(match labels {
                Some(labels) => EmbeddingMatrix::align_to_vocab(&labels, &matrix, ds.train.entities())?,
                None => matrix,
            })
        }
        None => None,
    };

    let aug = ds.augmented()?;
    let filter;
    let dev = if config.dev_every > 0 {
        filter = build_filter_index(&[&ds.train, &ds.valid, &ds.test])?;
        Some(DevSet {
            store: &ds.valid,
            filter: &filter,
        })
    } else {
        None
    };
    let output = fit(&aug.train, &config, embeddings.as_ref(), dev)?;

    let mut out = ctx.output(&mut manifest, "model.npkg")?;
    save_checkpoint(&output.params, &mut out)?;
    finish(out)?;
    write_json(&ctx.out.join("training_log.json"), &output.log)?;
    manifest.outputs.push("training_log.json".into());
    if let Some(last) = output.log.epochs.last() {
        manifest.result("final_loss", last.loss)?;
    }
    manifest.notes.extend(output.log.notes.iter().cloned());
    manifest.write(&ctx.out)?;
    eprintln!("trained {} epochs", output.log.epochs.len());
    Ok(())
}

pub fn eval(ctx: &Context, checkpoint: &Path, dataset: &Path) -> Result<(), CliError> {
    let group: bool = ctx.config.get("eval.group_by_relation")?;
    let mut manifest = ctx.manifest("eval", &["eval"])?;
    let mut reader = open(checkpoint)?;
    manifest.add_input(checkpoint)?;
    let params = load_checkpoint(&mut reader)?;
    let ds = load_dataset(dataset, &mut manifest)?;
    if params.entity_count() != ds.entity_count() || params.relation_count() != 2 * ds.relation_count() {
        return Err(CliError::Runtime(format!(
            "checkpoint has {} entities and {} relations, dataset needs {} and {}",
            params.entity_count(),
            params.relation_count(),
            ds.entity_count(),
            2 * ds.relation_count()
        )));
    }
    let filter = build_filter_index(&[&ds.train, &ds.valid, &ds.test])?;
    let report = evaluate(&params, &ds.test, &filter, group)?;
    if !(report.hits1 <= report.hits3 && report.hits3 <= report.hits10) {
        return Err(CliError::Runtime("hits@k is not monotone in k".into()));
    }
    write_json(&ctx.out.join("report.json"), &report)?;
    manifest.outputs.push("report.json".into());
    let mut out = ctx.output(&mut manifest, "ranks.tsv")?;
    report.write_rank_dump(&ds.test, &mut out)?;
    finish(out)?;
    for (key, value) in [("mrr", report.mrr), ("hits1", report.hits1), ("hits3", report.hits3), ("hits10", report.hits10)] {
        manifest.result(key, value)?;
    }
    manifest.write(&ctx.out)?;
    emit(&format!(
        "MRR {:.4}  Hits@1 {:.4}  Hits@3 {:.4}  Hits@10 {:.4}  ({} queries)",
        report.mrr, report.hits1, report.hits3, report.hits10, report.n_queries
    ));
    Ok(())
}

pub fn lowres(ctx: &mut Context, dataset: &Path, cap: Option<usize>) -> Result<(), CliError> {
    if let Some(cap) = cap {
        ctx.config.set("lowres.cap", &cap.to_string())?;
    }
    let cap: usize = ctx.config.get("lowres.cap")?;
    let seed: u64 = ctx.config.get("seed")?;
    let mut manifest = ctx.manifest("lowres", &["lowres"])?;
    let ds = load_dataset(dataset, &mut manifest)?;
    let split = build_low_resource_split(&ds.train, cap, seed);
    let mut out = ctx.output(&mut manifest, netpeace_core::kgdata::TRAIN_FILE)?;
    split.write_to(&mut out)?;
    finish(out)?;
    for name in [netpeace_core::kgdata::VALID_FILE, netpeace_core::kgdata::TEST_FILE] {
        std::fs::copy(dataset.join(name), ctx.out.join(name))?;
        manifest.outputs.push(name.into());
    }
    manifest.result("cap", cap)?;
    manifest.result("train_triples_before", ds.train.len())?;
    manifest.result("train_triples", split.len())?;
    manifest.result("relation_counts", split.relation_counts())?;
    manifest.write(&ctx.out)?;
    emit(&format!("{} of {} training triples kept (cap {cap})", split.len(), ds.train.len()));
    Ok(())
}

pub fn project(ctx: &Context, embeddings: &Path) -> Result<(), CliError> {
    let mut manifest = ctx.manifest("project", &[])?;
    let (labels, matrix) = read_embeddings(embeddings)?;
    manifest.add_input(embeddings)?;
    let labels = labels.unwrap_or_else(|| (0..matrix.rows()).map(|i| i.to_string()).collect());
    let projection = project_2d(&matrix)?;
    let mut out = ctx.output(&mut manifest, "projection.tsv")?;
    projection.write_tsv(&labels, &mut out)?;
    finish(out)?;
    manifest.result("method", PROJECTION_METHOD)?;
    manifest.result("axis_variances", projection.variances)?;
    manifest.notes.push(
        "deterministic principal-component projection used in place of t-SNE so coordinates are reproducible".into(),
    );
    manifest.write(&ctx.out)?;
    Ok(())
}
