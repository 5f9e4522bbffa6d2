mod args;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use domainflip_core::dynamics::{
    minimize_two_phase, run_domain_dynamics, run_random_dynamics, run_synchronous_dynamics, DynamicsOptions,
    SynchronousOutcome, Trajectory,
};
use domainflip_core::experiments::{
    coupling_table, deepest_frequency_experiment, distortion_sweep, r_characteristic_experiment, Dynamics,
    ExperimentConfig, FrequencyReport,
};
use domainflip_core::hebbian::{
    cluster_partition, generate_pattern_matrix_with, hebbian_matrix, random_block_start_with, random_group_sizes,
    random_start_with, GroupSpec,
};
use domainflip_core::model::energy;
use domainflip_core::oracle::{oracle_report, MinimaSet};
use domainflip_core::seed::{derive_seed, seeded_rng};
use domainflip_core::{io, report, ConnectionMatrix, Error};
use rand::Rng as _;

use args::{Cli, Command, DynamicsKind, ExperimentArgs, GenArgs, MinimizeArgs, OracleArgs, Protocol, Scale};

/// Exit 2 for bad arguments or invalid input, 1 for I/O failures.
enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(msg) => Failure::Io(msg),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn require_seed(seed: Option<u64>, what: &str) -> CliResult<u64> {
    match seed {
        Some(s) => Ok(s),
        None => usage(format!("{what} is stochastic and requires --seed")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Minimize(a) => minimize(a),
        Command::Experiment(a) => experiment(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn gen(a: GenArgs) -> CliResult {
    let seed = require_seed(a.seed, "gen")?;
    let mut rng = seeded_rng(seed);

    if a.random_symmetric {
        let Some(n) = a.n else {
            return usage("--random-symmetric requires --n");
        };
        if n == 0 {
            return usage("--n must be positive");
        }
        if a.pattern_out.is_some() || a.partition_out.is_some() || a.start_out.is_some() {
            return usage("--pattern-out, --partition-out and --start-out need --hebbian");
        }
        let j = ConnectionMatrix::from_upper_fn(n, |_, _| rng.random_range(-1.0..1.0))?;
        io::write_file(&a.out, &io::write_matrix(&j))?;
        println!("wrote {}x{} matrix to {}", n, n, a.out.display());
        return Ok(());
    }

    let Some(m) = a.m else {
        return usage("--hebbian requires --m");
    };
    let sizes = match (&a.sizes, a.n, a.n_groups) {
        (Some(sizes), n, groups) => {
            if groups.is_some_and(|g| g != sizes.len()) {
                return usage(format!("--n-groups does not match the {} entries of --sizes", sizes.len()));
            }
            if n.is_some_and(|n| n != sizes.iter().sum()) {
                return usage("--n does not match the sum of --sizes");
            }
            sizes.clone()
        }
        (None, Some(n), Some(groups)) => random_group_sizes(n, groups, a.max_size.unwrap_or(n), &mut rng)?,
        _ => return usage("--hebbian requires --sizes, or --n with --n-groups"),
    };
    let spec = GroupSpec::new(sizes, a.b)?;
    let x = generate_pattern_matrix_with(m, &spec, &mut rng)?;
    let j = hebbian_matrix(&x)?;
    io::write_file(&a.out, &io::write_matrix(&j))?;
    println!(
        "wrote {}x{} Hebbian matrix ({} groups, M={}, b={}) to {}",
        j.size(),
        j.size(),
        spec.num_groups(),
        m,
        a.b,
        a.out.display()
    );
    if let Some(path) = &a.pattern_out {
        io::write_file(path, &io::write_pattern(&x))?;
    }
    if let Some(path) = &a.partition_out {
        io::write_file(path, &io::write_partition(&cluster_partition(&spec)?))?;
    }
    if let Some(path) = &a.start_out {
        io::write_file(path, &io::write_configuration(&random_block_start_with(&spec, &mut rng)))?;
    }
    Ok(())
}

fn write_trace(path: &Path, traj: &Trajectory) -> CliResult {
    let file = File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    report::write_trace_csv(traj, BufWriter::new(file))?;
    Ok(())
}

fn minimize(a: MinimizeArgs) -> CliResult {
    let j = io::load_matrix(&a.matrix)?;
    let start = match &a.start {
        Some(path) => io::load_configuration(path)?,
        None => {
            let seed = require_seed(a.seed, "a random start")?;
            random_start_with(j.size(), &mut seeded_rng(derive_seed(seed, &[0])))
        }
    };
    if start.len() != j.size() {
        return Err(Error::DimensionMismatch {
            expected: j.size(),
            actual: start.len(),
        }
        .into());
    }
    let opts = DynamicsOptions {
        max_sweeps: a.max_sweeps,
        record: a.trace_out.is_some(),
    };
    println!("dynamics: {}", a.dynamics.to_possible_value().expect("no skipped variants").get_name());
    println!("initial_energy: {}", energy(&j, &start)?);

    let final_state = match a.dynamics {
        DynamicsKind::Synchronous => {
            if a.trace_out.is_some() {
                return usage("--trace-out is not available for synchronous dynamics");
            }
            match run_synchronous_dynamics(&j, &start, opts)? {
                SynchronousOutcome::FixedPoint { state, sweeps } => {
                    println!("outcome: FixedPoint");
                    println!("sweeps: {sweeps}");
                    println!("final_energy: {}", energy(&j, &state)?);
                    state
                }
                SynchronousOutcome::TwoCycle { a: first, b: second, sweeps } => {
                    println!("outcome: TwoCycle");
                    println!("sweeps: {sweeps}");
                    println!("cycle_energies: {} {}", energy(&j, &first)?, energy(&j, &second)?);
                    println!("cycle_state_a: {}", io::write_configuration(&first).trim_end());
                    println!("cycle_state_b: {}", io::write_configuration(&second).trim_end());
                    second
                }
            }
        }
        DynamicsKind::Random => {
            let seed = require_seed(a.seed, "random dynamics")?;
            let (state, traj) = run_random_dynamics(&j, &start, derive_seed(seed, &[1]), opts)?;
            println!("final_energy: {}", energy(&j, &state)?);
            println!("spin_flips: {}", traj.steps);
            println!("sweeps: {}", traj.sweeps);
            if let Some(path) = &a.trace_out {
                write_trace(path, &traj)?;
            }
            state
        }
        DynamicsKind::Domain => {
            let seed = require_seed(a.seed, "domain dynamics")?;
            let Some(ppath) = &a.partition else {
                return usage("--dynamics domain requires --partition");
            };
            let p = io::load_partition(ppath)?;
            if a.defrost {
                let out = minimize_two_phase(&j, &start, &p, derive_seed(seed, &[1]), opts)?;
                println!("domain_energy: {}", out.domain_energy);
                println!("final_energy: {}", out.final_energy);
                println!("domain_flips: {}", out.domain_trajectory.steps);
                println!("spin_flips: {}", out.defrost_trajectory.steps);
                match out.shares {
                    Some(sh) => {
                        println!("d: {}", sh.d);
                        println!("r: {}", sh.r);
                    }
                    None => println!("r: undefined (domain energy is not negative)"),
                }
                if let Some(path) = &a.trace_out {
                    write_trace(path, &out.domain_trajectory)?;
                }
                out.final_state
            } else {
                let (state, traj) = run_domain_dynamics(&j, &start, &p, derive_seed(seed, &[1]), opts)?;
                println!("domain_energy: {}", energy(&j, &state)?);
                println!("domain_flips: {}", traj.steps);
                println!("sweeps: {}", traj.sweeps);
                if let Some(path) = &a.trace_out {
                    write_trace(path, &traj)?;
                }
                state
            }
        }
    };
    println!("final_state: {}", io::write_configuration(&final_state).trim_end());
    if let Some(path) = &a.out {
        io::write_file(path, &io::write_configuration(&final_state))?;
    }
    Ok(())
}

fn experiment_config(a: &ExperimentArgs, seed: u64) -> ExperimentConfig {
    let base = match a.scale {
        Scale::Desk => ExperimentConfig::desk(seed),
        Scale::Full => ExperimentConfig::full_scale(seed),
    };
    ExperimentConfig {
        spins: a.n.unwrap_or(base.spins),
        pattern_dim: a.m.unwrap_or(base.pattern_dim),
        groups: a.n_groups.unwrap_or(base.groups),
        max_group_size: a.max_size.unwrap_or(base.max_group_size),
        k_random: a.k_random.unwrap_or(base.k_random),
        matrices: a.matrices.unwrap_or(base.matrices),
        starts: a.starts.unwrap_or(base.starts),
        ..base
    }
}

fn create_csv(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    println!("writing {}", path.display());
    Ok(BufWriter::new(file))
}

fn experiment(a: ExperimentArgs) -> CliResult {
    let seed = require_seed(a.seed, "experiment")?;
    if let Some(b) = a.b.as_ref().and_then(|bs| bs.iter().find(|b| !(0.0..0.5).contains(*b))) {
        return usage(format!("distortion {b} outside [0, 0.5)"));
    }
    match a.protocol {
        Protocol::Table1 => {
            let bs = a.b.clone().unwrap_or_else(|| vec![0.02, 0.05, 0.1, 0.2]);
            let m = a.m.unwrap_or(600);
            let sizes = vec![a.group_size.unwrap_or(20); a.n_groups.unwrap_or(10)];
            let rows = coupling_table(m, &sizes, &bs, seed)?;
            report::write_table1_csv(&rows, create_csv(&a.out, "table1.csv")?)?;
            for r in &rows {
                println!("b={:<6} mean={:.4} expected={:.4}", r.distortion, r.mean_coupling, r.expected);
            }
        }
        Protocol::Fig1 => {
            let bs = a.b.clone().unwrap_or_else(|| vec![0.0]);
            let [b] = bs[..] else {
                return usage("fig1 takes a single --b value");
            };
            let config = experiment_config(&a, seed).with_distortion(b);
            let freq = deepest_frequency_experiment(&config)?;
            report::write_fig1_csv(&freq, create_csv(&a.out, "fig1.csv")?)?;
            print_frequencies(std::slice::from_ref(&freq));
        }
        Protocol::Fig2 => {
            let bs = a.b.clone().unwrap_or_else(|| vec![0.0, 0.02, 0.05, 0.1, 0.2]);
            let freqs = distortion_sweep(&experiment_config(&a, seed), &bs)?;
            report::write_fig2_csv(&freqs, create_csv(&a.out, "fig2.csv")?)?;
            print_frequencies(&freqs);
        }
        Protocol::Fig3 => {
            let bs = a.b.clone().unwrap_or_else(|| vec![0.0, 0.02, 0.05, 0.1, 0.2]);
            let r = r_characteristic_experiment(&experiment_config(&a, seed), &bs)?;
            report::write_fig3_csv(&r, create_csv(&a.out, "fig3.csv")?)?;
            for row in &r.rows {
                let mean = row.mean_r.map_or("undefined".to_string(), |m| format!("{m:.4}"));
                println!(
                    "b={:<6} {:<7} mean_r={} (undefined runs: {})",
                    row.distortion, row.dynamics, mean, row.undefined_runs
                );
            }
        }
    }
    Ok(())
}

fn print_frequencies(freqs: &[FrequencyReport]) {
    for f in freqs {
        let cols: Vec<String> = Dynamics::ALL
            .iter()
            .map(|&d| format!("{}={:.4}", d, f.mean(d)))
            .collect();
        println!("b={:<6} {}", f.distortion, cols.join(" "));
    }
}

fn print_minima(title: &str, set: &MinimaSet, list: bool) {
    println!("{title}: {} (of {} configurations up to global flip)", set.len(), set.enumerated);
    if list {
        for m in &set.minima {
            println!("  {} {}", m.energy, io::write_configuration(&m.state).trim_end());
        }
    }
}

fn oracle(a: OracleArgs) -> CliResult {
    let j = io::load_matrix(&a.matrix)?;
    let partition = a.partition.as_deref().map(io::load_partition).transpose()?;
    let reference = a.reference.as_deref().map(io::load_configuration).transpose()?;
    if reference.is_some() && partition.is_none() {
        return usage("--reference requires --partition");
    }
    let report = oracle_report(&j, partition.as_ref().map(|p| (p, reference.as_ref())))?;
    println!("global_minimum_energy: {}", report.local_minima.global_minimum_energy);
    print_minima("local_minima", &report.local_minima, a.list);
    if let Some(d) = &report.domain_local_minima {
        print_minima("domain_local_minima", d, a.list);
        let outside = d.states().filter(|s| !report.local_minima.contains(s)).count();
        println!("domain_minima_not_local_minima: {outside}");
    }
    Ok(())
}
