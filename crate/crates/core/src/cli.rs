//! The `ulem` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::ambiguity::{compute_ambiguity, pool_treebanks, top_ambiguous_skew, write_report_csv, write_skew_csv};
use crate::augment::{mix, write_examples_tsv};
use crate::cache::LemmaCache;
use crate::config::RunConfig;
use crate::conllu::{read_conllu_file, write_conllu, Treebank};
use crate::error::{Error, Result};
use crate::eval::{evaluate, macro_average, write_eval_csv};
use crate::inference::Lemmatizer;
use crate::lexicon::{coverage_and_recall, load_lexicon_file, FrequencyList, LexiconEntry};
use crate::model::{load_model_file, save_model_file};
use crate::pipeline::{auxiliary_examples, train_model, treebank_examples};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (model format 1)");

#[derive(Debug, Parser)]
#[command(name = "ulem", version = VERSION, about = "Character-level neural lemmatizer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lemma ambiguity rates as CSV.
    Stats {
        #[arg(required = true)]
        treebanks: Vec<PathBuf>,
        /// Add a row for all treebanks pooled together.
        #[arg(long)]
        pool: bool,
        /// Ambiguous (form, tags) keys listed per skew report.
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        /// Write skew-<name>.csv files here.
        #[arg(long)]
        skew_dir: Option<PathBuf>,
    },
    /// Train a model and print the epoch log.
    Train(RunArgs),
    /// Fill the LEMMA column of a CoNLL-U file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Lemma accuracy of predictions against gold files, pairwise.
    Eval {
        #[arg(long, required = true)]
        pred: Vec<PathBuf>,
        #[arg(long, required = true)]
        gold: Vec<PathBuf>,
        #[arg(long, default_value = "all")]
        group: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Dump the mixed training examples as TSV.
    Augment {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build a lemma cache from a gold treebank.
    CacheBuild {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Leave out keys seen with more than one lemma.
        #[arg(long)]
        no_cache_ambiguous: bool,
    },
    /// Lexicon coverage and recall on test treebanks as CSV.
    LexiconEval {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long, required = true)]
        test: Vec<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// key=value run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub dev: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub frequencies: Option<PathBuf>,
    /// Extra key=value settings applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load_file(p).map_err(|e| at(p, e))?,
            None => RunConfig::default(),
        };
        let paths = [
            (&self.train, &mut c.train),
            (&self.dev, &mut c.dev),
            (&self.model, &mut c.model),
            (&self.lexicon, &mut c.lexicon),
            (&self.frequencies, &mut c.frequencies),
        ];
        for (flag, field) in paths {
            if flag.is_some() {
                field.clone_from(flag);
            }
        }
        c.apply(&self.set.join("\n"), "--set")?;
        c.hyper.validate()?;
        Ok(c)
    }
}

/// Attach a path to bare I/O errors.
fn at(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(source) => Error::File {
            path: path.display().to_string(),
            source,
        },
        other => other,
    }
}

fn treebank(path: &Path) -> Result<Treebank> {
    read_conllu_file(path).map_err(|e| at(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| at(path, e.into()))
}

/// Run `f` on the named file, or on stdout.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w)?;
            w.flush().map_err(|e| at(p, e.into()))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn lexicon_inputs(c: &RunConfig) -> Result<Option<(Vec<LexiconEntry>, FrequencyList)>> {
    if c.augment.transducer == 0 {
        return Ok(None);
    }
    let lex_path = c.require(&c.lexicon, "lexicon")?;
    let freq_path = c.require(&c.frequencies, "frequencies")?;
    let lex = load_lexicon_file(lex_path).map_err(|e| at(lex_path, e))?;
    let freq = FrequencyList::load_file(freq_path).map_err(|e| at(freq_path, e))?;
    Ok(Some((lex, freq)))
}

fn run_train(args: &RunArgs) -> Result<()> {
    let c = args.resolve()?;
    let train_tb = treebank(c.require(&c.train, "train")?)?;
    let dev = match &c.dev {
        Some(_) => Some(treebank(c.require(&c.dev, "dev")?)?),
        None => None,
    };
    let model_path = c
        .model
        .clone()
        .ok_or_else(|| Error::invalid("config key model is required"))?;
    let gold = treebank_examples(&train_tb)?;
    let lexicon = lexicon_inputs(&c)?;
    let aux = auxiliary_examples(
        &c.augment,
        &gold,
        &train_tb,
        lexicon.as_ref().map(|(l, f)| (l.as_slice(), f)),
    )?;
    let (model, log) = train_model(&train_tb, dev.as_ref(), c.hyper.clone(), &aux)?;
    save_model_file(&model, &model_path).map_err(|e| at(&model_path, e))?;
    print!("{}", log.lines());
    Ok(())
}

fn run_augment(args: &RunArgs, output: Option<&Path>) -> Result<()> {
    let c = args.resolve()?;
    let train_tb = treebank(c.require(&c.train, "train")?)?;
    let gold = treebank_examples(&train_tb)?;
    let lexicon = lexicon_inputs(&c)?;
    let aux = auxiliary_examples(
        &c.augment,
        &gold,
        &train_tb,
        lexicon.as_ref().map(|(l, f)| (l.as_slice(), f)),
    )?;
    let mixed = mix(&gold, &c.augment, &aux);
    with_output(output, |w| write_examples_tsv(&mixed, w))
}

fn name_of(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn run_stats(paths: &[PathBuf], pool: bool, top_k: usize, skew_dir: Option<&Path>) -> Result<()> {
    let mut banks = Vec::new();
    for p in paths {
        let mut tb = treebank(p)?;
        tb.name = name_of(p);
        banks.push(tb);
    }
    if pool {
        let pooled = pool_treebanks(&banks);
        banks.push(pooled);
    }
    let mut rows = Vec::new();
    for tb in &banks {
        rows.push((tb.name.clone(), compute_ambiguity(tb)?));
        if let Some(dir) = skew_dir {
            let path = dir.join(format!("skew-{}.csv", tb.name));
            let entries = top_ambiguous_skew(tb, top_k)?;
            write_skew_csv(&entries, create(&path)?).map_err(|e| at(&path, e))?;
        }
    }
    with_output(None, |w| write_report_csv(&rows, w))
}

fn run_predict(model: &Path, cache: Option<&Path>, input: &Path, output: Option<&Path>, workers: usize) -> Result<()> {
    let model = load_model_file(model).map_err(|e| at(model, e))?;
    let cache = match cache {
        Some(p) => Some(LemmaCache::load_file(p).map_err(|e| at(p, e))?),
        None => None,
    };
    let mut tb = treebank(input)?;
    let mut lemmatizer = Lemmatizer::new(&model).with_workers(workers);
    if let Some(c) = &cache {
        lemmatizer = lemmatizer.with_cache(c);
    }
    let stats = lemmatizer.lemmatize(&mut tb)?;
    with_output(output, |w| write_conllu(&tb, w))?;
    eprintln!("tokens={}", stats.tokens);
    eprintln!("cache_hits={}", stats.cache_hits);
    eprintln!("decodes={}", lemmatizer.decode_count());
    eprintln!("copies={}", stats.copies);
    eprintln!("failed={}", stats.failed);
    Ok(())
}

fn run_eval(pred: &[PathBuf], gold: &[PathBuf], group: &str, output: Option<&Path>) -> Result<()> {
    if pred.len() != gold.len() {
        return Err(Error::invalid(format!(
            "{} --pred files but {} --gold files",
            pred.len(),
            gold.len()
        )));
    }
    let mut results = Vec::new();
    for (p, g) in pred.iter().zip(gold) {
        let mut r = evaluate(&treebank(p)?, &treebank(g)?).map_err(|e| at(p, e))?;
        r.treebank = name_of(g);
        if r.excluded > 0 {
            log::warn!("{}: {} tokens without gold lemma excluded", r.treebank, r.excluded);
        }
        results.push(r);
    }
    let summary = macro_average(group, &results)?;
    with_output(output, |w| write_eval_csv(&results, &[summary], w))
}

fn run_cache_build(train: &Path, output: &Path, skip_ambiguous: bool) -> Result<()> {
    let cache = LemmaCache::build(&treebank(train)?, skip_ambiguous)?;
    cache.save(create(output)?).map_err(|e| at(output, e))?;
    println!("entries={}", cache.len());
    Ok(())
}

fn run_lexicon_eval(lexicon: &Path, tests: &[PathBuf], output: Option<&Path>) -> Result<()> {
    let lex = load_lexicon_file(lexicon).map_err(|e| at(lexicon, e))?;
    let mut rows = Vec::new();
    for p in tests {
        rows.push((name_of(p), coverage_and_recall(&lex, &treebank(p)?)?));
    }
    with_output(output, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["treebank", "tokens", "coverage", "recall"])
            .map_err(crate::ambiguity::csv_err)?;
        for (name, r) in &rows {
            out.write_record([
                name.clone(),
                r.tokens.to_string(),
                format!("{:.4}", r.coverage()),
                format!("{:.4}", r.recall()),
            ])
            .map_err(crate::ambiguity::csv_err)?;
        }
        out.flush()?;
        Ok(())
    })
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats {
            treebanks,
            pool,
            top_k,
            skew_dir,
        } => run_stats(&treebanks, pool, top_k, skew_dir.as_deref()),
        Command::Train(args) => run_train(&args),
        Command::Predict {
            model,
            cache,
            input,
            output,
            workers,
        } => run_predict(&model, cache.as_deref(), &input, output.as_deref(), workers),
        Command::Eval {
            pred,
            gold,
            group,
            output,
        } => run_eval(&pred, &gold, &group, output.as_deref()),
        Command::Augment { run, output } => run_augment(&run, output.as_deref()),
        Command::CacheBuild {
            train,
            output,
            no_cache_ambiguous,
        } => run_cache_build(&train, &output, no_cache_ambiguous),
        Command::LexiconEval { lexicon, test, output } => run_lexicon_eval(&lexicon, &test, output.as_deref()),
    }
}

/// Parse arguments, run, and return the process exit code. Failures print
/// one `error kind=<kind> message=<quoted>` line to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error kind={} message={:?}", e.kind(), e.to_string());
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FORMAT_VERSION;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn version_names_model_format() {
        assert!(VERSION.ends_with(&format!("(model format {FORMAT_VERSION})")));
    }

    #[test]
    fn missing_file_is_an_io_error_with_path() {
        let code = main_with_args(["ulem", "cache-build", "--train", "/no/such.conllu", "--output", "/tmp/x.tsv"]);
        assert_eq!(code, 1);
        let e = treebank(Path::new("/no/such.conllu")).unwrap_err();
        assert_eq!(e.kind(), "io");
        assert!(e.to_string().contains("/no/such.conllu"));
    }
}
