//! Command-line front end for `dj-coherence`.
//!
//! Every command returns an [`OutputTable`] whose metadata lists the
//! subcommand and all flags, so [`replay_args`] on that metadata rebuilds an
//! equivalent invocation.

pub mod range;
pub mod table;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;

use dj_coherence::decision::{
    classical_error, coherence_threshold, quantum_error, LikelihoodMode, PriorSpec, SamplingModel,
};
use dj_coherence::decoherence::{
    exit_probability, exit_probability_uniform, full_tensor_oracle, overlaps, AncillaSpec,
};
use dj_coherence::ensemble::{convergence_gap, hypergeometric_masses, plus_count};
use dj_coherence::epsilon::{
    classical_error_bounds, exact_tail_probabilities, quantum_miss_probability, EpsilonHypothesis,
    TailModel,
};
use dj_coherence::montecarlo::{run_experiment, Likelihood, McStrategy, Sampling, TrialConfig};
use dj_coherence::walk::{exit_probability_ideal, Walk};
use dj_coherence::PhasePattern;

use range::{parse_f64_list, parse_usize_list};
pub use table::{Cell, Format, OutputTable};

/// Agreement tolerance for the walk command's check columns.
pub const CHECK_TOL: f64 = 1e-10;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "djwalk",
    version,
    about = "Scattering-walk Deutsch-Jozsa under decoherence"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
    /// Refuse randomized runs without an explicit --seed.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Exit probability of a single pattern.
    Walk(WalkArgs),
    /// Classical vs quantum error for constant/balanced.
    Decide(DecideArgs),
    /// Error rates for balanced vs ε-biased.
    Epsilon(EpsilonArgs),
    /// Hypergeometric vs binomial sampling distance.
    Ensemble(EnsembleArgs),
    /// Monte Carlo estimate of a strategy's error rate.
    Mc(McArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PromiseArg {
    Constant,
    Balanced,
    Epsilon,
}

#[derive(Args, Debug, Clone)]
pub struct WalkArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub promise: PromiseArg,
    /// Sign of a constant pattern.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sign: i8,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Also run the joint particle-ancilla simulation (N ≤ 12).
    #[arg(long)]
    pub exact_oracle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Idealized,
    ExactN,
}

#[derive(Args, Debug, Clone)]
pub struct DecideArgs {
    #[arg(long, default_value = "1:10")]
    pub m_range: String,
    #[arg(long, default_value = "0:1:0.1")]
    pub nu_range: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Idealized)]
    pub mode: ModeArg,
    /// Number of paths, required for exact-n.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct EpsilonArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value = "100:1000:100")]
    pub m_range: String,
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Add exact binomial tails and a dominance check.
    #[arg(long)]
    pub exact_tails: bool,
}

#[derive(Args, Debug, Clone)]
pub struct EnsembleArgs {
    #[arg(long, default_value = "100,1000,10000")]
    pub n_list: String,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 10)]
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    ClassicalDj,
    QuantumDj,
    ClassicalEps,
    QuantumEps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SamplingArg {
    Iid,
    Hypergeom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TruthArg {
    Balanced,
    Epsilon,
}

#[derive(Args, Debug, Clone)]
pub struct McArgs {
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub experiments: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = SamplingArg::Iid)]
    pub sampling: SamplingArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Idealized)]
    pub likelihood: ModeArg,
    /// Hidden hypothesis for the ε strategies.
    #[arg(long, value_enum, default_value_t = TruthArg::Epsilon)]
    pub truth: TruthArg,
}

fn name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

struct Meta(IndexMap<String, String>);

impl Meta {
    fn new(command: &str) -> Self {
        let mut m = IndexMap::new();
        m.insert("command".to_string(), command.to_string());
        m.insert("version".to_string(), env!("CARGO_PKG_VERSION").to_string());
        Meta(m)
    }

    fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    fn opt<T: ToString>(self, key: &str, value: Option<T>) -> Self {
        match value {
            Some(v) => self.set(key, v),
            None => self,
        }
    }
}

/// Command-line arguments (without the program name) that reproduce the run
/// described by `metadata`.
pub fn replay_args(metadata: &IndexMap<String, String>) -> Vec<String> {
    let mut args = Vec::new();
    if let Some(cmd) = metadata.get("command") {
        args.push(cmd.clone());
    }
    for (k, v) in metadata {
        if k == "command" || k == "version" || v == "false" {
            continue;
        }
        args.push(format!("--{k}"));
        if v != "true" {
            args.push(v.clone());
        }
    }
    args
}

pub fn run(cli: &Cli) -> Result<OutputTable> {
    match &cli.command {
        Command::Walk(a) => cmd_walk(a),
        Command::Decide(a) => cmd_decide(a),
        Command::Epsilon(a) => cmd_epsilon(a),
        Command::Ensemble(a) => cmd_ensemble(a),
        Command::Mc(a) => cmd_mc(a, cli.strict),
    }
}

pub fn cmd_walk(a: &WalkArgs) -> Result<OutputTable> {
    let pattern = match a.promise {
        PromiseArg::Constant => PhasePattern::constant(a.n, a.sign)?,
        PromiseArg::Balanced => PhasePattern::balanced(a.n)?,
        PromiseArg::Epsilon => match a.epsilon {
            Some(eps) => PhasePattern::epsilon_biased(a.n, eps)?,
            None => bail!("--promise epsilon needs --epsilon"),
        },
    };
    let meta = Meta::new("walk")
        .set("n", a.n)
        .set("promise", name(a.promise))
        .set("sign", a.sign)
        .opt("epsilon", a.epsilon)
        .set("nu", a.nu)
        .set("exact-oracle", a.exact_oracle);
    let mut columns = vec![
        "n",
        "promise",
        "nu",
        "exit_probability",
        "closed_form",
        "ideal_state_vector",
        "ideal_closed_form",
        "state_vector_ok",
    ];
    if a.exact_oracle {
        columns.extend(["oracle", "oracle_ok"]);
    }
    let mut table = OutputTable::new(meta.0, &columns);

    let spec = AncillaSpec::uniform(a.nu)?;
    let p = exit_probability(&pattern, &overlaps(&spec, a.n)?)?;
    let closed = exit_probability_uniform(&pattern, a.nu);
    let walk = Walk::new(pattern.clone())?;
    let sv = walk.run(3)?.probability(&walk.graph().exit_edge());
    let ideal = exit_probability_ideal(&pattern);
    let mut row: Vec<Cell> = vec![
        a.n.into(),
        name(a.promise).as_str().into(),
        a.nu.into(),
        p.into(),
        closed.into(),
        sv.into(),
        ideal.into(),
        ((sv - ideal).abs() <= CHECK_TOL && (p - closed).abs() <= CHECK_TOL).into(),
    ];
    if a.exact_oracle {
        let oracle = full_tensor_oracle(&pattern, &spec)?;
        row.push(oracle.into());
        row.push(((oracle - p).abs() <= CHECK_TOL).into());
    }
    table.push(row)?;
    Ok(table)
}

pub fn cmd_decide(a: &DecideArgs) -> Result<OutputTable> {
    let (mode, model) = match (a.mode, a.n) {
        (ModeArg::Idealized, _) => (LikelihoodMode::Idealized, SamplingModel::Iid),
        (ModeArg::ExactN, Some(n)) => (
            LikelihoodMode::ExactN { n_paths: n },
            SamplingModel::WithoutReplacement { n_paths: n },
        ),
        (ModeArg::ExactN, None) => bail!("--mode exact-n needs --n"),
    };
    let meta = Meta::new("decide")
        .set("m-range", &a.m_range)
        .set("nu-range", &a.nu_range)
        .set("mode", name(a.mode))
        .opt("n", a.n);
    let mut table = OutputTable::new(
        meta.0,
        &["m", "nu", "classical_error", "quantum_error", "threshold"],
    );
    let prior = PriorSpec::default();
    for m in parse_usize_list(&a.m_range)? {
        let classical: f64 = classical_error(m, &prior, model)?;
        let threshold = coherence_threshold(m)?;
        for nu in parse_f64_list(&a.nu_range)? {
            let quantum = quantum_error(m, &nu, mode)?;
            table.push(vec![
                m.into(),
                nu.into(),
                classical.into(),
                quantum.into(),
                threshold.into(),
            ])?;
        }
    }
    Ok(table)
}

pub fn cmd_epsilon(a: &EpsilonArgs) -> Result<OutputTable> {
    let meta = Meta::new("epsilon")
        .set("epsilon", a.epsilon)
        .set("m-range", &a.m_range)
        .set("nu", a.nu)
        .set("exact-tails", a.exact_tails);
    let mut columns = vec![
        "m",
        "quantum_miss",
        "chernoff_false_eps",
        "chernoff_false_bal",
        "approx_bound",
    ];
    if a.exact_tails {
        columns.extend(["exact_false_eps", "exact_false_bal", "dominance_ok"]);
    }
    let mut table = OutputTable::new(meta.0, &columns);
    for m in parse_usize_list(&a.m_range)? {
        let miss = quantum_miss_probability(m, a.epsilon, a.nu)?.exact;
        let b = classical_error_bounds(m, a.epsilon)?;
        let mut row: Vec<Cell> = vec![
            m.into(),
            miss.into(),
            b.false_eps.into(),
            b.false_bal.into(),
            b.approx_false_eps.into(),
        ];
        if a.exact_tails {
            let (fe, fb) = exact_tail_probabilities(m, a.epsilon, TailModel::Iid)?;
            row.extend([
                fe.into(),
                fb.into(),
                (fe <= b.false_eps + 1e-12 && fb <= b.false_bal + 1e-12).into(),
            ]);
        }
        table.push(row)?;
    }
    Ok(table)
}

pub fn cmd_ensemble(a: &EnsembleArgs) -> Result<OutputTable> {
    let meta = Meta::new("ensemble")
        .set("n-list", &a.n_list)
        .set("p", a.p)
        .set("m", a.m);
    let mut table = OutputTable::new(
        meta.0,
        &["n", "p", "m", "gap", "ratio_to_previous", "normalization"],
    );
    let mut previous: Option<f64> = None;
    for n in parse_usize_list(&a.n_list)? {
        let gap = convergence_gap(n, a.p, a.m)?;
        let norm: f64 = hypergeometric_masses(n, plus_count(n, a.p)?, a.m)?
            .iter()
            .sum();
        let ratio = previous.filter(|&g| g > 0.0).map(|g| gap / g);
        table.push(vec![
            n.into(),
            a.p.into(),
            a.m.into(),
            gap.into(),
            ratio.into(),
            norm.into(),
        ])?;
        previous = Some(gap);
    }
    Ok(table)
}

pub fn cmd_mc(a: &McArgs, strict: bool) -> Result<OutputTable> {
    let seed = match a.seed {
        Some(s) => s,
        None if strict => bail!("--strict requires --seed for randomized commands"),
        None => rand::random(),
    };
    let meta = Meta::new("mc")
        .set("strategy", name(a.strategy))
        .set("n", a.n)
        .set("m", a.m)
        .set("nu", a.nu)
        .opt("epsilon", a.epsilon)
        .set("experiments", a.experiments)
        .set("seed", seed)
        .set("sampling", name(a.sampling))
        .set("likelihood", name(a.likelihood))
        .set("truth", name(a.truth));
    let config = TrialConfig {
        n_paths: a.n,
        m: a.m,
        nu: a.nu,
        epsilon: a.epsilon,
        strategy: match a.strategy {
            StrategyArg::ClassicalDj => McStrategy::ClassicalDJ,
            StrategyArg::QuantumDj => McStrategy::QuantumDJ,
            StrategyArg::ClassicalEps => McStrategy::ClassicalEps,
            StrategyArg::QuantumEps => McStrategy::QuantumEps,
        },
        experiments: a.experiments,
        seed,
        likelihood_mode: match a.likelihood {
            ModeArg::Idealized => Likelihood::Idealized,
            ModeArg::ExactN => Likelihood::ExactN,
        },
        sampling_mode: match a.sampling {
            SamplingArg::Iid => Sampling::Iid,
            SamplingArg::Hypergeom => Sampling::WithoutReplacement,
        },
        truth: match a.truth {
            TruthArg::Balanced => EpsilonHypothesis::Balanced,
            TruthArg::Epsilon => EpsilonHypothesis::Epsilon,
        },
    };
    let r = run_experiment(&config)?;
    let mut table = OutputTable::new(
        meta.0,
        &[
            "strategy",
            "experiments",
            "errors",
            "empirical_error",
            "std_error",
            "analytic_error",
            "z_score",
        ],
    );
    table.push(vec![
        name(a.strategy).as_str().into(),
        r.experiments.into(),
        r.errors.into(),
        r.empirical_error.into(),
        r.std_error.into(),
        r.analytic_error.into(),
        r.z_score.into(),
    ])?;
    Ok(table)
}
