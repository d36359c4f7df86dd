use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use mdlab::assess::{assess, AssessOptions, AssessmentRecord};
use mdlab::astdiff::edit_script;
use mdlab::compiler::{compile_source, Variant};
use mdlab::decomp::decompile;
use mdlab::harness::config::Config;
use mdlab::harness::corpus::{gen_corpus, Corpus, DEFAULT_SEED, DEFAULT_SIZE};
use mdlab::harness::experiment::{
    canonical_json, read_jsonl, run_experiment, MetaRecord, RunOptions, FAULTS_FILE, META_FILE, RECORDS_FILE,
};
use mdlab::lang::{parse, Diagnostic};
use mdlab::meta::meta_decompile;
use mdlab::report::{build_report, summary_csv};
use mdlab::vm::{from_text, parse_tests, to_text, BytecodeClass};

/// MiniJ decompiler lab.
#[derive(Parser)]
#[command(name = "mdlab", version)]
struct Cli {
    /// Corpus directory.
    #[arg(long, global = true, default_value = "corpus")]
    corpus: PathBuf,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a corpus into --out (default `corpus`).
    GenCorpus {
        #[arg(long, default_value_t = DEFAULT_SIZE)]
        size: usize,
    },
    /// Compile sources, or every corpus class, to `.mjc` files in --out.
    Compile {
        #[arg(long)]
        variant: Variant,
        files: Vec<PathBuf>,
    },
    /// Decompile one `.mjc` file.
    Decompile {
        #[arg(long)]
        decompiler: String,
        file: PathBuf,
    },
    /// Assess one source file, or run the full experiment over the corpus
    /// when no file is given.
    Assess {
        #[arg(long, default_value = "A")]
        compiler: Variant,
        #[arg(long, default_value = "literalist")]
        decompiler: String,
        /// Test file for a single assessment.
        #[arg(long)]
        tests: Option<PathBuf>,
        file: Option<PathBuf>,
    },
    /// Meta-decompile one `.mjc` file.
    Meta {
        /// Comma-separated decompiler order; defaults to the config.
        #[arg(long, value_delimiter = ',')]
        order: Vec<String>,
        #[arg(long, default_value = "A")]
        compiler: Variant,
        /// Print the full result as JSON instead of the merged source.
        #[arg(long)]
        json: bool,
        file: PathBuf,
    },
    /// Summarize experiment records.
    Report {
        /// `records.jsonl`, or the directory holding it.
        #[arg(long = "in")]
        input: PathBuf,
        /// Meta records; defaults to `meta.jsonl` next to the input.
        #[arg(long)]
        meta: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Edit script from an original source to a decompiled one.
    Diff { original: PathBuf, decompiled: PathBuf },
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn write(p: &Path, text: &str) -> Result<()> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
}

/// Writes to `out` when given, else to stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn diag_error(what: &str, diags: &[Diagnostic]) -> anyhow::Error {
    let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
    anyhow!("{what}:\n{}", lines.join("\n"))
}

fn load_bytecode(p: &Path) -> Result<BytecodeClass> {
    from_text(&read(p)?).with_context(|| format!("parsing {}", p.display()))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let out = cli.out.as_deref();

    match cli.command {
        Cmd::GenCorpus { size } => {
            let dir = out.unwrap_or(Path::new("corpus"));
            let corpus = gen_corpus(cli.seed, size)?;
            corpus.write(dir)?;
            eprintln!("wrote {} classes to {}", corpus.manifest.classes.len(), dir.display());
        }
        Cmd::Compile { variant, files } => {
            let dir = out.unwrap_or(Path::new("build"));
            let sources: Vec<(String, String)> = if files.is_empty() {
                Corpus::load(&cli.corpus)?.sources.into_iter().collect()
            } else {
                files.iter().map(|f| Ok((f.display().to_string(), read(f)?))).collect::<Result<_>>()?
            };
            for (origin, src) in &sources {
                let bc = compile_source(src, variant).map_err(|d| diag_error(origin, &d))?;
                write(&dir.join(format!("{}.mjc", bc.name)), &to_text(&bc))?;
            }
            eprintln!("compiled {} classes into {}", sources.len(), dir.display());
        }
        Cmd::Decompile { decompiler, file } => {
            let spec = config.spec(&decompiler)?;
            let bc = load_bytecode(&file)?;
            match decompile(&spec, &bc).source() {
                Some(text) => emit(out, text)?,
                None => bail!("{decompiler} produced no output"),
            }
        }
        Cmd::Assess { compiler, decompiler, tests, file: Some(file) } => {
            let spec = config.spec(&decompiler)?;
            let suite = match &tests {
                Some(t) => parse_tests(&read(t)?).with_context(|| format!("parsing {}", t.display()))?,
                None => Vec::new(),
            };
            let opts = AssessOptions { fuel: config.fuel, scratch: out.map(Path::to_path_buf) };
            let a = assess(&read(&file)?, compiler, &spec, &suite, &opts)?;
            println!("{}", serde_json::to_string_pretty(&a.record)?);
        }
        Cmd::Assess { file: None, .. } => {
            let dir = out.unwrap_or(Path::new("results"));
            let corpus = Corpus::load(&cli.corpus)?;
            let opts = RunOptions {
                jobs,
                work: Some(dir.join("work")),
                out: Some(dir.to_path_buf()),
                ..RunOptions::default()
            };
            let run = run_experiment(&corpus, &config, &opts)?;
            eprintln!(
                "{} records, {} meta results, {} faults in {}",
                run.records.len(),
                run.meta.len(),
                run.faults.len(),
                dir.display()
            );
            if !run.faults.is_empty() {
                eprintln!("see {}", dir.join(FAULTS_FILE).display());
            }
        }
        Cmd::Meta { order, compiler, json, file } => {
            let names = if order.is_empty() { config.meta_order.clone() } else { order };
            let specs = config.specs(&names)?;
            let result = meta_decompile(&load_bytecode(&file)?, &specs, compiler)?;
            if json {
                emit(out, &(serde_json::to_string_pretty(&result)? + "\n"))?;
            } else {
                for (sig, origin) in &result.provenance {
                    eprintln!("{sig} <- {origin}");
                }
                match result.source() {
                    Some(text) => emit(out, text)?,
                    None => bail!("meta-decompilation failed after {}", result.invocations.join(", ")),
                }
            }
        }
        Cmd::Report { input, meta, csv } => {
            let (records_path, sibling) = if input.is_dir() {
                (input.join(RECORDS_FILE), input.join(META_FILE))
            } else {
                let dir = input.parent().unwrap_or(Path::new(""));
                (input.clone(), dir.join(META_FILE))
            };
            let mut records: Vec<AssessmentRecord> = read_jsonl(&records_path)?;
            let meta_path = meta.or_else(|| sibling.is_file().then_some(sibling));
            let metas: Option<Vec<MetaRecord>> = meta_path.map(|p| read_jsonl(&p)).transpose()?;
            if let Some(ms) = &metas {
                records.extend(ms.iter().map(|m| m.record.clone()));
            }
            let results: Option<Vec<_>> = metas.map(|ms| ms.into_iter().map(|m| m.result).collect());
            let report = build_report(&records, results.as_deref())?;
            emit(out, &canonical_json(&report))?;
            if let Some(p) = csv {
                write(&p, &summary_csv(&report.summary))?;
            }
        }
        Cmd::Diff { original, decompiled } => {
            let a = parse(&read(&original)?).map_err(|d| diag_error(&original.display().to_string(), &d))?;
            let b = parse(&read(&decompiled)?).map_err(|d| diag_error(&decompiled.display().to_string(), &d))?;
            let (ta, _, script) = edit_script(&a, &b);
            let c = script.counts();
            eprintln!(
                "{} edits over {} nodes: {} insert, {} delete, {} update, {} move",
                script.cost(),
                ta.size(),
                c.inserts,
                c.deletes,
                c.updates,
                c.moves
            );
            emit(out, &(serde_json::to_string_pretty(&script)? + "\n"))?;
        }
    }
    Ok(())
}
