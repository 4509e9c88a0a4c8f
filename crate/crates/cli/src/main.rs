//! `hyperwalk`: spectral and Monte Carlo analysis of simple and resetting
//! random walks on hypergraphs, from hyperedge-list files.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hyperwalk_core::analytics;
use hyperwalk_core::hypergraph::{GeneralizedAdjacency, Hypergraph, TransitionMatrix};
use hyperwalk_core::monte_carlo;
use hyperwalk_core::optimizer;
use hyperwalk_core::oracle;
use hyperwalk_core::ranking;
use hyperwalk_core::spectral::{
    assemble_pi, reset_spectrum, ResetWalkSpec, SpectralDecomposition, WalkSpectrum,
};

use output::{jbool, jnum_array, jstr, jstr_array, num, Csv};

/// Master seed used when `--seed` is omitted.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "hyperwalk",
    version,
    about = "Random walks on hypergraphs: exact spectral observables, optimal resetting, \
             Monte Carlo experiments and node ranking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// Hyperedge-list input file: one hyperedge per line, whitespace-separated
    /// labels, `#` lines and blank lines ignored
    #[arg(long, value_name = "PATH")]
    input: PathBuf,

    /// Output format (default json; cover-sweep defaults to csv)
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Reduce to the largest connected component before the analysis
    #[arg(long)]
    lcc: bool,

    /// Write the output to PATH instead of stdout
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

impl CommonOpts {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact stationary distribution d_j / N
    Stationary {
        #[command(flatten)]
        common: CommonOpts,
        /// Cross-check against power iteration and report the discrepancy
        #[arg(long)]
        check: bool,
    },
    /// Eigenvalues and biorthonormal left/right eigenvectors of W
    Spectrum {
        #[command(flatten)]
        common: CommonOpts,
        /// Cross-check the spectral reconstruction of W
        #[arg(long)]
        check: bool,
    },
    /// Occupation probability series P(t) for t = 0..=t
    Occupation {
        #[command(flatten)]
        common: CommonOpts,
        /// Source node label
        #[arg(long, value_name = "LABEL")]
        from: String,
        /// Target node label
        #[arg(long, value_name = "LABEL")]
        to: String,
        /// Series horizon
        #[arg(long, default_value_t = 10)]
        t: u32,
        /// Reset node label (required when --gamma > 0)
        #[arg(long, value_name = "LABEL")]
        reset: Option<String>,
        /// Reset probability in [0, 1)
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Cross-check against dense matrix powers
        #[arg(long)]
        check: bool,
    },
    /// Mean first passage times to a target from every node
    Mfpt {
        #[command(flatten)]
        common: CommonOpts,
        /// Target node label
        #[arg(long, value_name = "LABEL")]
        to: String,
        /// Cross-check against the fundamental-matrix linear solve
        #[arg(long)]
        check: bool,
    },
    /// Mean first passage times under resetting
    ResetMfpt {
        #[command(flatten)]
        common: CommonOpts,
        /// Target node label
        #[arg(long, value_name = "LABEL")]
        to: String,
        /// Reset node label
        #[arg(long, value_name = "LABEL")]
        reset: String,
        /// Reset probability in [0, 1)
        #[arg(long)]
        gamma: f64,
        /// Cross-check against the linear solve on the reset matrix
        #[arg(long)]
        check: bool,
    },
    /// MFPT, second moment and coefficient of variation over a gamma grid
    /// (walker resets to the source)
    GammaCurve {
        #[command(flatten)]
        common: CommonOpts,
        /// Source node label (also the reset node)
        #[arg(long, value_name = "LABEL")]
        from: String,
        /// Target node label
        #[arg(long, value_name = "LABEL")]
        to: String,
        /// Largest gamma in the grid
        #[arg(long, default_value_t = 0.98)]
        gamma_max: f64,
        /// Grid spacing
        #[arg(long, default_value_t = 0.02)]
        gamma_step: f64,
        /// Cross-check sampled MFPTs against linear solves
        #[arg(long)]
        check: bool,
    },
    /// Reset probability minimizing the MFPT (walker resets to the source)
    OptimalGamma {
        #[command(flatten)]
        common: CommonOpts,
        /// Source node label (also the reset node)
        #[arg(long, value_name = "LABEL")]
        from: String,
        /// Target node label
        #[arg(long, value_name = "LABEL")]
        to: String,
        /// Cross-check the optimum against a linear solve and perturbation
        #[arg(long)]
        check: bool,
    },
    /// Does a small reset probability reduce the MFPT? Sufficient-condition
    /// test z^2(0) > 1 + 1/T(0)
    Helps {
        #[command(flatten)]
        common: CommonOpts,
        /// Source node label (also the reset node)
        #[arg(long, value_name = "LABEL")]
        from: String,
        /// Target node label
        #[arg(long, value_name = "LABEL")]
        to: String,
        /// Cross-check the margin against the deconvolution oracle
        #[arg(long)]
        check: bool,
    },
    /// Nodes ranked by the hypergraph stationary distribution
    Rank {
        #[command(flatten)]
        common: CommonOpts,
        /// Cross-check against the spectral stationary vector
        #[arg(long)]
        check: bool,
    },
    /// Hypergraph ranking versus clique-graph ranking, with Kendall tau
    CompareRank {
        #[command(flatten)]
        common: CommonOpts,
        /// Cross-check both stationary vectors against power iteration
        #[arg(long)]
        check: bool,
    },
    /// Mean cover time over a reset-probability grid (seeded Monte Carlo)
    CoverSweep {
        #[command(flatten)]
        common: CommonOpts,
        /// Reset/start node label; defaults to the highest-hyperdegree node
        #[arg(long, value_name = "LABEL")]
        reset: Option<String>,
        /// Largest gamma in the grid
        #[arg(long, default_value_t = 0.001)]
        gamma_max: f64,
        /// Grid spacing
        #[arg(long, default_value_t = 0.00002)]
        gamma_step: f64,
        /// Trials per grid point
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Master seed
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Empirical hitting (or return) times by seeded simulation
    SimulateHit {
        #[command(flatten)]
        common: CommonOpts,
        /// Source node label
        #[arg(long, value_name = "LABEL")]
        from: String,
        /// Target node label
        #[arg(long, value_name = "LABEL")]
        to: String,
        /// Reset node label (required when --gamma > 0)
        #[arg(long, value_name = "LABEL")]
        reset: Option<String>,
        /// Reset probability in [0, 1)
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Number of trials
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Master seed
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn load(common: &CommonOpts) -> Result<Hypergraph> {
    let text = std::fs::read_to_string(&common.input)
        .with_context(|| format!("cannot read {}", common.input.display()))?;
    let h = Hypergraph::parse(&text)?;
    Ok(if common.lcc { h.largest_connected_component() } else { h })
}

fn node_index(h: &Hypergraph, label: &str) -> Result<usize> {
    h.index_of(label)
        .with_context(|| format!("unknown node label `{label}`"))
}

fn spectral_context(
    h: &Hypergraph,
) -> Result<(GeneralizedAdjacency, TransitionMatrix, SpectralDecomposition)> {
    let adj = GeneralizedAdjacency::from_hypergraph(h);
    let w = TransitionMatrix::new(h, &adj)?;
    let dec = SpectralDecomposition::decompose(&w, &adj)?;
    Ok((adj, w, dec))
}

fn write_out(common: &CommonOpts, rendered: String) -> Result<()> {
    match &common.output {
        Some(path) => std::fs::write(path, rendered)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn gamma_grid(gamma_max: f64, gamma_step: f64) -> Result<Vec<f64>> {
    if !(gamma_step > 0.0) {
        bail!("--gamma-step must be positive");
    }
    if !(0.0..1.0).contains(&gamma_max) {
        bail!("--gamma-max must lie in [0, 1)");
    }
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let g = k as f64 * gamma_step;
        if g > gamma_max + 1e-9 * gamma_step || g >= 1.0 {
            break;
        }
        grid.push(g);
        k += 1;
    }
    Ok(grid)
}

fn validate_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        bail!("--gamma must lie in [0, 1)");
    }
    Ok(())
}

fn report_check(what: &str, discrepancy: f64) {
    eprintln!("check: {what}: max discrepancy = {discrepancy:.3e}");
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stationary { common, check } => {
            let h = load(&common)?;
            let stationary = analytics::stationary(&h)?;
            if check {
                let w = TransitionMatrix::from_hypergraph(&h)?;
                let brute = oracle::stationary_power_iteration(w.matrix())?;
                report_check("power iteration vs d/N", (&brute - &stationary).amax());
            }
            let rendered = match common.format_or(Format::Json) {
                Format::Json => format!(
                    "{{\"labels\":{},\"stationary\":{}}}\n",
                    jstr_array(h.labels().iter().map(String::as_str)),
                    jnum_array(stationary.iter().copied()),
                ),
                Format::Csv => {
                    let mut csv = Csv::new();
                    csv.row(["label", "P_inf"])?;
                    for (i, label) in h.labels().iter().enumerate() {
                        csv.row([label.as_str(), num(stationary[i]).as_str()])?;
                    }
                    csv.finish()?
                }
            };
            write_out(&common, rendered)
        }

        Command::Spectrum { common, check } => {
            let h = load(&common)?;
            let (_, w, dec) = spectral_context(&h)?;
            if check {
                let recon = (dec.reconstruct(1) - w.matrix()).amax();
                let n = dec.node_count();
                let gram = (dec.left_vectors() * dec.right_vectors()
                    - nalgebra_identity(n))
                .amax();
                report_check("reconstruction and biorthonormality", recon.max(gram));
            }
            let n = dec.node_count();
            let rendered = match common.format_or(Format::Json) {
                Format::Json => {
                    let left: Vec<String> = (0..n)
                        .map(|l| jnum_array((0..n).map(|i| dec.left_vectors()[(l, i)])))
                        .collect();
                    let right: Vec<String> = (0..n)
                        .map(|l| jnum_array((0..n).map(|i| dec.right_vectors()[(i, l)])))
                        .collect();
                    format!(
                        "{{\"eigenvalues\":{},\"left\":[{}],\"right\":[{}]}}\n",
                        jnum_array(dec.eigenvalues().iter().copied()),
                        left.join(","),
                        right.join(","),
                    )
                }
                Format::Csv => {
                    let mut csv = Csv::new();
                    csv.row(["l", "eigenvalue"])?;
                    for l in 0..n {
                        csv.row([l.to_string().as_str(), num(dec.eigenvalues()[l]).as_str()])?;
                    }
                    csv.finish()?
                }
            };
            write_out(&common, rendered)
        }

        Command::Occupation { common, from, to, t, reset, gamma, check } => {
            let h = load(&common)?;
            validate_gamma(gamma)?;
            let (_, w, dec) = spectral_context(&h)?;
            let i = node_index(&h, &from)?;
            let j = node_index(&h, &to)?;

            let (series, matrix, reset_label): (Vec<f64>, _, Option<&str>) = if gamma > 0.0 {
                let reset = reset
                    .as_deref()
                    .context("--reset is required when --gamma > 0")?;
                let r = node_index(&h, reset)?;
                let spec = ResetWalkSpec::new(r, gamma, h.node_count())?;
                let rdec = reset_spectrum(&dec, spec);
                let series = (0..=t)
                    .map(|step| analytics::reset_occupation(&rdec, i, j, step))
                    .collect();
                (series, assemble_pi(&w, &spec), Some(reset))
            } else {
                let series = (0..=t)
                    .map(|step| analytics::occupation_probability(&dec, i, j, step))
                    .collect();
                (series, w.matrix().clone(), None)
            };

            if check {
                let mut row = nalgebra::RowDVector::<f64>::zeros(h.node_count());
                row[i] = 1.0;
                let mut worst = 0.0f64;
                for (step, &p) in series.iter().enumerate() {
                    if step > 0 {
                        row = row * &matrix;
                    }
                    worst = worst.max((row[j] - p).abs());
                }
                report_check("spectral series vs matrix powers", worst);
            }

            let rendered = match common.format_or(Format::Json) {
                Format::Json => format!(
                    "{{\"from\":{},\"to\":{},\"reset\":{},\"gamma\":{},\"p\":{}}}\n",
                    jstr(&from),
                    jstr(&to),
                    reset_label.map_or("null".to_string(), jstr),
                    num(gamma),
                    jnum_array(series.iter().copied()),
                ),
                Format::Csv => {
                    let mut csv = Csv::new();
                    csv.row(["t", "P"])?;
                    for (step, p) in series.iter().enumerate() {
                        csv.row([step.to_string().as_str(), num(*p).as_str()])?;
                    }
                    csv.finish()?
                }
            };
            write_out(&common, rendered)
        }

        Command::Mfpt { common, to, check } => {
            let h = load(&common)?;
            let (adj, w, dec) = spectral_context(&h)?;
            let j = node_index(&h, &to)?;
            let values: Vec<f64> =
                (0..h.node_count()).map(|i| analytics::mfpt(&dec, &adj, i, j)).collect();
            if check {
                let brute = analytics::mfpt_linear_solve(w.matrix(), j)?;
                let worst = values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v - brute[i]).abs())
                    .fold(0.0, f64::max);
                report_check("spectral MFPT vs linear solve", worst);
            }
            let rendered = render_mfpt_vector(&common, &h, &to, None, &values)?;
            write_out(&common, rendered)
        }

        Command::ResetMfpt { common, to, reset, gamma, check } => {
            let h = load(&common)?;
            validate_gamma(gamma)?;
            let (_, w, dec) = spectral_context(&h)?;
            let j = node_index(&h, &to)?;
            let r = node_index(&h, &reset)?;
            let spec = ResetWalkSpec::new(r, gamma, h.node_count())?;
            let rdec = reset_spectrum(&dec, spec);
            let values: Vec<f64> =
                (0..h.node_count()).map(|i| analytics::reset_mfpt(&rdec, i, j)).collect();
            if check {
                let brute = analytics::mfpt_linear_solve(&assemble_pi(&w, &spec), j)?;
                let worst = values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v - brute[i]).abs())
                    .fold(0.0, f64::max);
                report_check("reset MFPT vs linear solve", worst);
            }
            let rendered = render_mfpt_vector(&common, &h, &to, Some((&reset, gamma)), &values)?;
            write_out(&common, rendered)
        }

        Command::GammaCurve { common, from, to, gamma_max, gamma_step, check } => {
            let h = load(&common)?;
            let (_, w, dec) = spectral_context(&h)?;
            let i = node_index(&h, &from)?;
            let j = node_index(&h, &to)?;
            if i == j {
                bail!("--from and --to must differ");
            }
            let grid = gamma_grid(gamma_max, gamma_step)?;
            let curve = optimizer::gamma_curve(&dec, i, j, &grid)?;
            if check {
                let mut worst = 0.0f64;
                for s in &curve.samples {
                    let spec = ResetWalkSpec::new(i, s.gamma, h.node_count())?;
                    let brute = analytics::mfpt_linear_solve(&assemble_pi(&w, &spec), j)?;
                    worst = worst.max((s.mfpt - brute[i]).abs() / brute[i].max(1.0));
                }
                report_check("curve MFPT vs linear solves (relative)", worst);
            }
            let rendered = match common.format_or(Format::Json) {
                Format::Json => {
                    let samples: Vec<String> = curve
                        .samples
                        .iter()
                        .map(|s| {
                            format!(
                                "{{\"gamma\":{},\"T\":{},\"T2\":{},\"z\":{}}}",
                                num(s.gamma),
                                num(s.mfpt),
                                num(s.second_moment),
                                num(s.cv)
                            )
                        })
                        .collect();
                    format!(
                        "{{\"from\":{},\"to\":{},\"samples\":[{}],\"summary\":{}}}\n",
                        jstr(&from),
                        jstr(&to),
                        samples.join(","),
                        optimum_json(&curve.optimum),
                    )
                }
                Format::Csv => {
                    let mut csv = Csv::new();
                    csv.row(["gamma", "T", "T2", "z"])?;
                    for s in &curve.samples {
                        csv.row([
                            num(s.gamma).as_str(),
                            num(s.mfpt).as_str(),
                            num(s.second_moment).as_str(),
                            num(s.cv).as_str(),
                        ])?;
                    }
                    csv.finish()?
                }
            };
            write_out(&common, rendered)
        }

        Command::OptimalGamma { common, from, to, check } => {
            let h = load(&common)?;
            let (_, w, dec) = spectral_context(&h)?;
            let i = node_index(&h, &from)?;
            let j = node_index(&h, &to)?;
            if i == j {
                bail!("--from and --to must differ");
            }
            let opt = optimizer::find_optimal_gamma(&dec, i, j, 1e-9);
            if check {
                let spec = ResetWalkSpec::new(i, opt.gamma_star, h.node_count())?;
                let brute = analytics::mfpt_linear_solve(&assemble_pi(&w, &spec), j)?;
                let solve_diff = (opt.t_star - brute[i]).abs() / brute[i].max(1.0);
                let mut perturb = 0.0f64;
                if opt.gamma_star > 1e-4 {
                    perturb = perturb
                        .max(opt.t_star - optimizer::mfpt_of_gamma(&dec, i, j, opt.gamma_star - 1e-4));
                }
                if opt.gamma_star + 1e-4 < 1.0 {
                    perturb = perturb
                        .max(opt.t_star - optimizer::mfpt_of_gamma(&dec, i, j, opt.gamma_star + 1e-4));
                }
                report_check("optimum vs linear solve (relative)", solve_diff);
                report_check("local-minimality violation (<=0 is good)", perturb);
            }
            let rendered = match common.format_or(Format::Json) {
                Format::Json => format!(
                    "{{\"from\":{},\"to\":{},{}}}\n",
                    jstr(&from),
                    jstr(&to),
                    optimum_fields(&opt),
                ),
                Format::Csv => {
                    let mut csv = Csv::new();
                    csv.row(["gamma_star", "T_star", "residual", "helps", "margin"])?;
                    csv.row([
                        num(opt.gamma_star).as_str(),
                        num(opt.t_star).as_str(),
                        opt.condition_residual.map(num).unwrap_or_default().as_str(),
                        if opt.helps { "true" } else { "false" },
                        num(opt.margin).as_str(),
                    ])?;
                    csv.finish()?
                }
            };
            write_out(&common, rendered)
        }

        Command::Helps { common, from, to, check } => {
            let h = load(&common)?;
            let (_, _, dec) = spectral_context(&h)?;
            let i = node_index(&h, &from)?;
            let j = node_index(&h, &to)?;
            if i == j {
                bail!("--from and --to must differ");
            }
            let ex = optimizer::resetting_helps(&dec, i, j);
            if check {
                let mut t_max = 1_024;
                let mut fp = analytics::first_passage_distribution(
                    |a, b, t| analytics::occupation_probability(&dec, a, b, t),
                    i,
                    j,
                    t_max,
                );
                while fp.residual_mass >= 1e-9 && t_max < analytics::FIRST_PASSAGE_T_CAP {
                    t_max = (t_max * 2).min(analytics::FIRST_PASSAGE_T_CAP);
                    fp = analytics::first_passage_distribution(
                        |a, b, t| analytics::occupation_probability(&dec, a, b, t),
                        i,
                        j,
                        t_max,
                    );
                }
                let mean = fp.mean();
                let z2 = (fp.second_moment() - mean * mean) / (mean * mean);
                let margin = z2 - 1.0 - 1.0 / mean;
                report_check(
                    &format!(
                        "deconvolution margin vs closed form (residual mass {:.1e})",
                        fp.residual_mass
                    ),
                    (margin - ex.margin).abs(),
                );
            }
            let rendered = match common.format_or(Format::Json) {
                Format::Json => format!(
                    "{{\"from\":{},\"to\":{},\"helps\":{},\"margin\":{}}}\n",
                    jstr(&from),
                    jstr(&to),
                    jbool(ex.helps),
                    num(ex.margin),
                ),
                Format::Csv => {
                    let mut csv = Csv::new();
                    csv.row(["helps", "margin"])?;
                    csv.row([if ex.helps { "true" } else { "false" }, num(ex.margin).as_str()])?;
                    csv.finish()?
                }
            };
            write_out(&common, rendered)
        }

        Command::Rank { common, check } => {
            let h = load(&common)?;
            let ranking = ranking::rank_hypergraph(&h)?;
            if check {
                let (_, _, dec) = spectral_context(&h)?;
                let stationary = dec.stationary();
                let worst = ranking
                    .iter()
                    .map(|e| {
                        let i = h.index_of(&e.label).expect("ranked label exists");
                        (e.stationary - stationary[i]).abs()
                    })
                    .fold(0.0, f64::max);
                report_check("degree ranking vs spectral stationary", worst);
            }
            let rendered = match common.format_or(Format::Json) {
                Format::Json => {
                    let rows: Vec<String> = ranking
                        .iter()
                        .map(|e| {
                            format!(
                                "{{\"label\":{},\"stationary\":{}}}",
                                jstr(&e.label),
                                num(e.stationary)
                            )
                        })
                        .collect();
                    format!("{{\"ranking\":[{}]}}\n", rows.join(","))
                }
                Format::Csv => {
                    let mut csv = Csv::new();
                    csv.row(["label", "P_inf"])?;
                    for e in &ranking {
                        csv.row([e.label.as_str(), num(e.stationary).as_str()])?;
                    }
                    csv.finish()?
                }
            };
            write_out(&common, rendered)
        }

        Command::CompareRank { common, check } => {
            let h = load(&common)?;
            let report = ranking::compare_rankings(&h)?;
            if check {
                let w = TransitionMatrix::from_hypergraph(&h)?;
                let hyper = oracle::stationary_power_iteration(w.matrix())?;
                let clique_walk = h.clique_expansion().srw_transition()?;
                let clique = oracle::stationary_power_iteration(clique_walk.matrix())?;
                let worst = report
                    .rows
                    .iter()
                    .map(|row| {
                        let i = h.index_of(&row.label).expect("ranked label exists");
                        (row.hyper_stationary - hyper[i])
                            .abs()
                            .max((row.clique_stationary - clique[i]).abs())
                    })
                    .fold(0.0, f64::max);
                report_check("both stationary vectors vs power iteration", worst);
            }
            let rendered = match common.format_or(Format::Json) {
                Format::Json => {
                    let rows: Vec<String> = report
                        .rows
                        .iter()
                        .map(|r| {
                            format!(
                                "{{\"label\":{},\"P_inf\":{},\"Q_inf\":{},\"P_norm\":{},\"Q_norm\":{},\"rank_P\":{},\"rank_Q\":{}}}",
                                jstr(&r.label),
                                num(r.hyper_stationary),
                                num(r.clique_stationary),
                                num(r.hyper_normalized),
                                num(r.clique_normalized),
                                r.hyper_rank,
                                r.clique_rank,
                            )
                        })
                        .collect();
                    format!(
                        "{{\"tau\":{},\"rows\":[{}]}}\n",
                        num(report.kendall_tau),
                        rows.join(",")
                    )
                }
                Format::Csv => {
                    let mut csv = Csv::new();
                    csv.row(["label", "P_inf", "Q_inf", "P_norm", "Q_norm", "rank_P", "rank_Q"])?;
                    for r in &report.rows {
                        csv.row([
                            r.label.as_str(),
                            num(r.hyper_stationary).as_str(),
                            num(r.clique_stationary).as_str(),
                            num(r.hyper_normalized).as_str(),
                            num(r.clique_normalized).as_str(),
                            r.hyper_rank.to_string().as_str(),
                            r.clique_rank.to_string().as_str(),
                        ])?;
                    }
                    csv.finish()?
                }
            };
            write_out(&common, rendered)
        }

        Command::CoverSweep { common, reset, gamma_max, gamma_step, trials, seed } => {
            let h = load(&common)?;
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            let adj = GeneralizedAdjacency::from_hypergraph(&h);
            let w = TransitionMatrix::new(&h, &adj)?;
            let r = match &reset {
                Some(label) => node_index(&h, label)?,
                // Paper protocol: reset to the highest-hyperdegree node.
                None => (0..h.node_count())
                    .max_by_key(|&i| (adj.hyperdegree[i], std::cmp::Reverse(i)))
                    .expect("non-empty hypergraph"),
            };
            let grid = gamma_grid(gamma_max, gamma_step)?;
            let points = monte_carlo::gamma_sweep_cover(&w, r, &grid, trials, seed)?;
            let capped: usize = points.iter().map(|p| p.capped_trials).sum();
            if capped > 0 {
                eprintln!("warning: {capped} trial(s) hit the {} step cap", monte_carlo::STEP_CAP);
            }
            let rendered = match common.format_or(Format::Csv) {
                Format::Csv => {
                    let mut csv = Csv::new();
                    csv.row(["gamma", "mean_cover", "stderr", "trials", "seed"])?;
                    for p in &points {
                        csv.row([
                            num(p.gamma).as_str(),
                            num(p.mean_cover).as_str(),
                            num(p.stderr).as_str(),
                            p.trials.to_string().as_str(),
                            seed.to_string().as_str(),
                        ])?;
                    }
                    csv.finish()?
                }
                Format::Json => {
                    let rows: Vec<String> = points
                        .iter()
                        .map(|p| {
                            format!(
                                "{{\"gamma\":{},\"mean_cover\":{},\"stderr\":{},\"capped\":{}}}",
                                num(p.gamma),
                                num(p.mean_cover),
                                num(p.stderr),
                                p.capped_trials,
                            )
                        })
                        .collect();
                    format!(
                        "{{\"reset\":{},\"seed\":{},\"trials\":{},\"points\":[{}]}}\n",
                        jstr(h.label(r)),
                        seed,
                        trials,
                        rows.join(","),
                    )
                }
            };
            write_out(&common, rendered)
        }

        Command::SimulateHit { common, from, to, reset, gamma, trials, seed } => {
            let h = load(&common)?;
            validate_gamma(gamma)?;
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            let w = TransitionMatrix::from_hypergraph(&h)?;
            let i = node_index(&h, &from)?;
            let j = node_index(&h, &to)?;
            let (r, reset_label) = if gamma > 0.0 {
                let label = reset
                    .as_deref()
                    .context("--reset is required when --gamma > 0")?;
                (node_index(&h, label)?, Some(label))
            } else {
                (i, None)
            };
            let spec = ResetWalkSpec::new(r, gamma, h.node_count())?;
            let ens = monte_carlo::simulate_hitting_time(&w, &spec, i, j, trials, seed);
            if ens.capped_trials > 0 {
                eprintln!(
                    "warning: {} trial(s) hit the {} step cap",
                    ens.capped_trials,
                    monte_carlo::STEP_CAP
                );
            }
            let rendered = match common.format_or(Format::Json) {
                Format::Json => format!(
                    "{{\"from\":{},\"to\":{},\"reset\":{},\"gamma\":{},\"trials\":{},\"seed\":{},\"mean\":{},\"stderr\":{},\"capped\":{}}}\n",
                    jstr(&from),
                    jstr(&to),
                    reset_label.map_or("null".to_string(), jstr),
                    num(gamma),
                    trials,
                    seed,
                    num(ens.mean()),
                    num(ens.stderr()),
                    ens.capped_trials,
                ),
                Format::Csv => {
                    let mut csv = Csv::new();
                    csv.row(["trial", "steps"])?;
                    for (k, v) in ens.values.iter().enumerate() {
                        csv.row([k.to_string().as_str(), v.to_string().as_str()])?;
                    }
                    csv.finish()?
                }
            };
            write_out(&common, rendered)
        }
    }
}

fn render_mfpt_vector(
    common: &CommonOpts,
    h: &Hypergraph,
    target: &str,
    reset: Option<(&str, f64)>,
    values: &[f64],
) -> Result<String> {
    Ok(match common.format_or(Format::Json) {
        Format::Json => {
            let reset_fields = match reset {
                Some((label, gamma)) => {
                    format!("\"reset\":{},\"gamma\":{},", jstr(label), num(gamma))
                }
                None => String::new(),
            };
            format!(
                "{{\"target\":{},{}\"values\":{}}}\n",
                jstr(target),
                reset_fields,
                jnum_array(values.iter().copied()),
            )
        }
        Format::Csv => {
            let mut csv = Csv::new();
            csv.row(["label", "T"])?;
            for (i, label) in h.labels().iter().enumerate() {
                csv.row([label.as_str(), num(values[i]).as_str()])?;
            }
            csv.finish()?
        }
    })
}

fn optimum_fields(opt: &optimizer::OptimalGamma) -> String {
    let minima: Vec<String> = opt.grid_minima.iter().map(|&g| num(g)).collect();
    format!(
        "\"gamma_star\":{},\"T_star\":{},\"residual\":{},\"helps\":{},\"margin\":{},\"grid_minima\":[{}]",
        num(opt.gamma_star),
        num(opt.t_star),
        opt.condition_residual.map_or("null".to_string(), num),
        jbool(opt.helps),
        num(opt.margin),
        minima.join(","),
    )
}

fn optimum_json(opt: &optimizer::OptimalGamma) -> String {
    format!("{{{}}}", optimum_fields(opt))
}

fn nalgebra_identity(n: usize) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::identity(n, n)
}
