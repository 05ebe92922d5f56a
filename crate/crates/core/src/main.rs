use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pathrule::eval::{self, Experiment, Metrics, SweepParameter};
use pathrule::inference::{explain, Scorer};
use pathrule::{
    Aggregation, ColumnOrder, Dataset, Error, Limit, PathWeight, Result, RuleBook, RunConfig,
};

#[derive(Parser)]
#[command(name = "pathrule", version, about = "Mine Horn rules from a knowledge graph and rank completions with them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine rules from the training split and write them as TSV.
    Mine {
        #[command(flatten)]
        common: Common,
        /// Where to write the JSON timing report.
        #[arg(long)]
        timing_out: Option<PathBuf>,
    },
    /// Evaluate a rule file with filtered MRR and Hits@k.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Where to write the metrics JSON.
        #[arg(long)]
        metrics_out: Option<PathBuf>,
    },
    /// Re-run mining and evaluation over a list of alpha or K values.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        parameter: SweepParameter,
        /// Comma-separated values; `unlimited` removes the cap.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<Limit>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare path-weight variants at several rule budgets.
    Ablate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "markov,length,constant")]
        variants: Vec<PathWeight>,
        /// Comma-separated rules-per-query budgets.
        #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
        budgets: Vec<Limit>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank answers of one query and show the rules behind them.
    Explain {
        #[command(flatten)]
        common: Common,
        /// Query subject entity.
        #[arg(long)]
        subject: String,
        /// Query relation; prefix with INV_ for the inverse direction.
        #[arg(long)]
        relation: String,
        /// Explain only this candidate.
        #[arg(long)]
        candidate: Option<String>,
        /// Number of top candidates to explain.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Training triples.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Validation triples (used for filtering).
    #[arg(long)]
    valid: Option<PathBuf>,
    /// Test triples.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Column order of the triple files.
    #[arg(long, value_enum)]
    columns: Option<ColumnOrder>,
    /// Rule file: written by `mine`, read by the other subcommands.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Maximum rule body length.
    #[arg(long)]
    max_len: Option<usize>,
    /// Facts sampled per relation, or `unlimited`.
    #[arg(long)]
    alpha: Option<Limit>,
    /// Neighbors expanded per search node, or `unlimited`.
    #[arg(long)]
    beta: Option<Limit>,
    /// Answers searched per sampled fact, or `unlimited`.
    #[arg(long)]
    answer_cap: Option<Limit>,
    /// Rules applied per query, or `unlimited`.
    #[arg(long, short = 'k')]
    top_k: Option<Limit>,
    /// How rule contributions to a candidate combine.
    #[arg(long, value_enum)]
    mode: Option<Aggregation>,
    /// Seed for fact sampling and search expansion.
    #[arg(long)]
    seed: Option<u64>,
    /// Weight given to each discovered path while mining.
    #[arg(long, value_enum)]
    path_weight: Option<PathWeight>,
    /// Worker threads; 1 runs serially.
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn resolve(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $( if self.$f.is_some() { c.$f = self.$f; } )* };
        }
        set!(columns, max_len, alpha, beta, answer_cap, top_k, mode, seed, path_weight);
        set_opt!(train, valid, test, rules, workers);
        c.validate()?;
        Ok(c)
    }
}

#[derive(Serialize)]
struct TimingReport {
    wall_seconds: f64,
    load_seconds: f64,
    mine_seconds: f64,
    normalize_seconds: f64,
    /// Inverse-augmented training facts, the population `facts_sampled` is drawn from.
    indexed_facts: usize,
    facts_sampled: u64,
    rules_found: usize,
}

#[derive(Serialize)]
struct MetricsReport<'a> {
    #[serde(flatten)]
    metrics: &'a Metrics,
    config: &'a RunConfig,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_with(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_with(Some(path), |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

fn load_dataset(c: &RunConfig, with_eval_splits: bool) -> Result<Dataset> {
    let train = c.require_train()?;
    if with_eval_splits {
        Dataset::load(train, c.valid.as_deref(), Some(c.require_test()?), c.columns)
    } else {
        Dataset::load(train, c.valid.as_deref(), c.test.as_deref(), c.columns)
    }
}

fn load_rules(c: &RunConfig, dataset: &Dataset) -> Result<RuleBook> {
    let path = c.require_rules()?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    RuleBook::read_tsv(BufReader::new(file), &dataset.vocab)
}

fn print_metrics(m: &Metrics) {
    println!("{:>8}  {:>8}  {:>8}  {:>8}  {:>8}", "queries", "MRR", "Hits@1", "Hits@3", "Hits@10");
    println!(
        "{:>8}  {:>8.4}  {:>8.4}  {:>8.4}  {:>8.4}",
        m.queries,
        m.mrr,
        m.hits_at(1),
        m.hits_at(3),
        m.hits_at(10)
    );
}

fn run_mine(c: &RunConfig, timing_out: Option<&Path>) -> Result<()> {
    let rules_path = c.require_rules()?;
    let wall = Instant::now();
    let dataset = load_dataset(c, false)?;
    let train = dataset.train_index();
    let load_seconds = wall.elapsed().as_secs_f64();

    let t = Instant::now();
    let acc = pathrule::mine(&train, &c.miner_settings());
    let mine_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let book = acc.normalize();
    let normalize_seconds = t.elapsed().as_secs_f64();

    write_with(Some(rules_path), |w| book.write_tsv(w, &dataset.vocab))?;
    let report = TimingReport {
        wall_seconds: wall.elapsed().as_secs_f64(),
        load_seconds,
        mine_seconds,
        normalize_seconds,
        indexed_facts: train.fact_count(),
        facts_sampled: acc.facts_mined(),
        rules_found: book.len(),
    };
    eprintln!(
        "mined {} rules from {} of {} facts in {:.2}s",
        report.rules_found, report.facts_sampled, report.indexed_facts, report.mine_seconds
    );
    if let Some(p) = timing_out {
        write_json(p, &report)?;
    }
    Ok(())
}

fn run_eval(c: &RunConfig, metrics_out: Option<&Path>) -> Result<()> {
    let dataset = load_dataset(c, true)?;
    let book = load_rules(c, &dataset)?;
    let exp = Experiment::new(&dataset);
    let metrics = exp.evaluate(&book, c.top_k, c.mode)?;
    print_metrics(&metrics);
    if let Some(p) = metrics_out {
        write_json(
            p,
            &MetricsReport {
                metrics: &metrics,
                config: c,
            },
        )?;
    }
    Ok(())
}

fn run_sweep(c: &RunConfig, parameter: SweepParameter, values: &[Limit], out: Option<&Path>) -> Result<()> {
    let dataset = load_dataset(c, true)?;
    let exp = Experiment::new(&dataset);
    let points = eval::sweep(&exp, parameter, values, &c.miner_settings(), c.top_k, c.mode)?;
    write_with(out, |w| eval::write_sweep_csv(w, &points))
}

fn run_ablate(c: &RunConfig, variants: &[PathWeight], budgets: &[Limit], out: Option<&Path>) -> Result<()> {
    let dataset = load_dataset(c, true)?;
    let exp = Experiment::new(&dataset);
    let rows = eval::ablation(&exp, &c.miner_settings(), variants, budgets, c.mode)?;
    write_with(out, |w| eval::write_ablation_csv(w, &rows))
}

fn run_explain(c: &RunConfig, subject: &str, relation: &str, candidate: Option<&str>, top: usize) -> Result<()> {
    let dataset = load_dataset(c, false)?;
    let book = load_rules(c, &dataset)?;
    let vocab = &dataset.vocab;
    let unknown = |what: &str, name: &str| Error::Config(format!("unknown {what} `{name}`"));
    let source = vocab.entity_id(subject).ok_or_else(|| unknown("entity", subject))?;
    let rel = vocab.relation_id(relation).ok_or_else(|| unknown("relation", relation))?;
    let index = dataset.train_index();
    let k = c.top_k();

    let candidates = match candidate {
        Some(name) => vec![vocab.entity_id(name).ok_or_else(|| unknown("entity", name))?],
        None => Scorer::new(&index, &book, k, c.mode)
            .score(source, rel)
            .ranked()
            .into_iter()
            .take(top)
            .map(|cand| cand.entity)
            .collect(),
    };
    let scored = Scorer::new(&index, &book, k, c.mode).score(source, rel);
    let stdout = io::stdout();
    let mut w = stdout.lock();
    let out = |e| Error::io("<stdout>", e);
    writeln!(w, "{}({}, ?)", vocab.relation_name(rel), subject).map_err(out)?;
    for e in candidates {
        writeln!(w, "{}\t{}", vocab.entity_name(e), scored.score(e)).map_err(out)?;
        for x in explain(&index, &book, source, rel, e, k) {
            let mut path = vocab.entity_name(x.grounding.nodes[0]).to_string();
            for (r, n) in x.grounding.edges.iter().zip(&x.grounding.nodes[1..]) {
                path.push_str(&format!(" -{}-> {}", vocab.relation_name(*r), vocab.entity_name(*n)));
            }
            writeln!(
                w,
                "  #{} {}  pconf={} contribution={}\n     via {}",
                x.rank + 1,
                x.rule.display(vocab),
                x.pconf,
                x.contribution,
                path
            )
            .map_err(out)?;
        }
    }
    Ok(())
}

type Action = Box<dyn FnOnce(&RunConfig) -> Result<()>>;

fn run(cli: Cli) -> Result<()> {
    let (common, action): (Common, Action) = match cli.command {
        Command::Mine { common, timing_out } => (common, Box::new(move |c| run_mine(c, timing_out.as_deref().or(c.timing_out.as_deref())))),
        Command::Eval { common, metrics_out } => (common, Box::new(move |c| run_eval(c, metrics_out.as_deref().or(c.metrics_out.as_deref())))),
        Command::Sweep {
            common,
            parameter,
            values,
            out,
        } => (common, Box::new(move |c| run_sweep(c, parameter, &values, out.as_deref()))),
        Command::Ablate {
            common,
            variants,
            budgets,
            out,
        } => (common, Box::new(move |c| run_ablate(c, &variants, &budgets, out.as_deref()))),
        Command::Explain {
            common,
            subject,
            relation,
            candidate,
            top,
        } => (
            common,
            Box::new(move |c| run_explain(c, &subject, &relation, candidate.as_deref(), top)),
        ),
    };
    let config = common.resolve()?;
    if let Some(n) = config.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    action(&config)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
