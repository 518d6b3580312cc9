use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use terrainvis::colvis::build_colvis;
use terrainvis::generate::{gen_comb, gen_comb_with_n, gen_limited_witness, gen_random};
use terrainvis::geometry::{parse_rational, Rational};
use terrainvis::io::{map_to_json, parse_instance, write_instance, write_map, AnyMap};
use terrainvis::limited::{build_colvis_limited, build_vis_limited, build_vorvis_limited};
use terrainvis::oracle::{oracle_maps, oracle_maps_until};
use terrainvis::render::render_svg;
use terrainvis::terrain::{validate_instance, Instance};
use terrainvis::vis::build_vis;
use terrainvis::vorvis::{build_vorvis_dnc, build_vorvis_sweep};
use terrainvis::Error;

#[derive(Parser)]
#[command(
    name = "terrainvis",
    version,
    about = "Visibility maps of 1.5D terrains with several viewpoints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Vis,
    Colvis,
    Vorvis,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Dnc,
    Sweep,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct MapArgs {
    /// Instance file, or `-` for stdin.
    file: PathBuf,
    /// Sight radius, overriding the file's.
    #[arg(long, value_parser = parse_radius)]
    radius: Option<Rational>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance and report general-position violations.
    Validate {
        file: PathBuf,
    },
    Vis(MapArgs),
    Colvis(MapArgs),
    Vorvis {
        #[command(flatten)]
        args: MapArgs,
        #[arg(long, value_enum, default_value = "sweep")]
        algo: Algo,
    },
    /// Brute-force reference map.
    Oracle {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        args: MapArgs,
    },
    /// Compare the fast map with the oracle on the given files and, with
    /// `--random`, on seeded random instances.
    Check {
        #[arg(value_enum)]
        kind: Kind,
        files: Vec<PathBuf>,
        #[arg(long, value_parser = parse_radius)]
        radius: Option<Rational>,
        #[arg(long, value_enum, default_value = "sweep")]
        algo: Algo,
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a generated instance to stdout.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Draw the terrain and a map as SVG.
    Render {
        #[arg(value_enum)]
        kind: Kind,
        file: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long, value_parser = parse_radius)]
        radius: Option<Rational>,
    },
    /// Runtime table over comb instances of growing size.
    Bench {
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        min_log: u32,
        #[arg(long, default_value_t = 14)]
        max_log: u32,
        /// Largest log2(n) at which colvis and vorvis are timed too.
        #[arg(long, default_value_t = 12)]
        full_max_log: u32,
        /// Largest log2(n) at which the oracle is timed.
        #[arg(long, default_value_t = 9)]
        oracle_max_log: u32,
    },
}

#[derive(Subcommand)]
enum Family {
    Comb {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        teeth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        range: i64,
    },
    /// Limited-sight instance whose visibility map has at least m·teeth
    /// visible intervals.
    Witness {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        teeth: usize,
    },
}

fn parse_radius(s: &str) -> Result<Rational, String> {
    parse_rational(s)
}

/// Failures mapped to exit codes: bad input is 2, a failed check is 1.
enum Failure {
    Input(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path, radius: Option<&Rational>) -> Result<Instance, Failure> {
    let inst = parse_instance(&read_input(path)?)?;
    Ok(match radius {
        Some(r) => inst.with_radius(Some(r.clone()))?,
        None => inst,
    })
}

fn fast_map(inst: &Instance, kind: Kind, algo: Algo) -> Result<AnyMap, Error> {
    let limited = inst.viewpoints.radius().is_some();
    Ok(match (kind, limited) {
        (Kind::Vis, false) => AnyMap::Vis(build_vis(inst)?.map),
        (Kind::Vis, true) => AnyMap::Vis(build_vis_limited(inst)?),
        (Kind::Colvis, false) => AnyMap::Colvis(build_colvis(inst)?.map.materialize()),
        (Kind::Colvis, true) => AnyMap::Colvis(build_colvis_limited(inst)?.map.materialize()),
        (Kind::Vorvis, true) => AnyMap::Vorvis(build_vorvis_limited(inst)?.map),
        (Kind::Vorvis, false) if algo == Algo::Dnc => AnyMap::Vorvis(build_vorvis_dnc(inst)?),
        (Kind::Vorvis, false) => AnyMap::Vorvis(build_vorvis_sweep(inst)?.map),
    })
}

fn oracle_map(inst: &Instance, kind: Kind) -> AnyMap {
    let maps = oracle_maps(inst);
    match kind {
        Kind::Vis => AnyMap::Vis(maps.vis),
        Kind::Colvis => AnyMap::Colvis(maps.colvis),
        Kind::Vorvis => AnyMap::Vorvis(maps.vorvis),
    }
}

fn print_map(inst: &Instance, map: &AnyMap, format: Format) {
    let indices = inst.viewpoints.indices();
    let map = map.relabel(|o| indices[o]);
    match format {
        Format::Text => print!("{}", write_map(&map)),
        Format::Json => println!("{}", map_to_json(&map)),
    }
}

fn check_one(name: &str, inst: &Instance, kind: Kind, algo: Algo) -> Result<(), Failure> {
    let fast = fast_map(inst, kind, algo)?;
    let oracle = oracle_map(inst, kind);
    if fast == oracle {
        println!("ok {name}: {} intervals", fast.len());
        return Ok(());
    }
    let first = fast
        .breaks()
        .iter()
        .zip(oracle.breaks())
        .position(|(a, b)| a != b)
        .map_or_else(
            || "labels differ".to_string(),
            |i| format!("breakpoint {i} differs"),
        );
    Err(Failure::Mismatch(format!(
        "mismatch {name}: {first}\nfast:\n{}oracle:\n{}",
        write_map(&fast),
        write_map(&oracle)
    )))
}

fn check_random(
    kind: Kind,
    algo: Algo,
    radius: Option<&Rational>,
    count: usize,
    seed: u64,
) -> Result<(), Failure> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(count.max(1));
    let failures: Vec<String> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    let mut bad = Vec::new();
                    for i in (w..count).step_by(workers) {
                        let s = seed + i as u64;
                        let n = 4 + (s as usize * 7) % 37;
                        let m = (1 + (s as usize) % 6).min(n);
                        let inst = gen_random(n, m, s, 40)
                            .and_then(|inst| inst.with_radius(radius.cloned()));
                        let outcome = match inst {
                            Ok(inst) => check_one(&format!("random seed {s}"), &inst, kind, algo),
                            Err(e) => Err(e.into()),
                        };
                        match outcome {
                            Ok(()) => {}
                            Err(Failure::Input(e)) | Err(Failure::Mismatch(e)) => bad.push(e),
                        }
                    }
                    bad
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker"))
            .collect()
    });
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(failures.join("\n")))
    }
}

fn ms(d: Duration) -> String {
    format!("{:.1}", d.as_secs_f64() * 1e3)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn bench(
    m: usize,
    min_log: u32,
    max_log: u32,
    full_max_log: u32,
    oracle_max_log: u32,
) -> Result<(), Failure> {
    println!(
        "{:>7} {:>3} {:>10} {:>10} {:>10} {:>10} {:>8}",
        "n", "m", "vis_ms", "colvis_ms", "vorvis_ms", "oracle_ms", "regions"
    );
    for log in min_log..=max_log {
        let inst = gen_comb_with_n(m, 1 << log, 1)?.instance;
        let (vis, t_vis) = timed(|| build_vis(&inst));
        let vis = vis?;
        let (full, oracle) = (log <= full_max_log, log <= oracle_max_log);
        let mut regions = vis.map.len();
        let t_col = if full {
            let (c, t) = timed(|| build_colvis(&inst));
            regions = c?.map.len();
            ms(t)
        } else {
            "-".into()
        };
        let t_vor = if full {
            let (v, t) = timed(|| build_vorvis_sweep(&inst));
            v?;
            ms(t)
        } else {
            "-".into()
        };
        let t_oracle = if oracle {
            let deadline = Instant::now() + Duration::from_secs(600);
            let (o, t) = timed(|| oracle_maps_until(&inst, deadline));
            o.map_or_else(|| "timeout".into(), |_| ms(t))
        } else {
            "-".into()
        };
        println!(
            "{:>7} {:>3} {:>10} {:>10} {:>10} {:>10} {:>8}",
            inst.terrain.n(),
            m,
            ms(t_vis),
            t_col,
            t_vor,
            t_oracle,
            regions
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file } => {
            let inst = load(&file, None)?;
            let report = validate_instance(&inst)?;
            print!("{report}");
            if !report.is_empty() {
                return Err(Failure::Input("instance is not in general position".into()));
            }
        }
        Command::Vis(a) => {
            let inst = load(&a.file, a.radius.as_ref())?;
            print_map(&inst, &fast_map(&inst, Kind::Vis, Algo::Sweep)?, a.format);
        }
        Command::Colvis(a) => {
            let inst = load(&a.file, a.radius.as_ref())?;
            print_map(
                &inst,
                &fast_map(&inst, Kind::Colvis, Algo::Sweep)?,
                a.format,
            );
        }
        Command::Vorvis { args, algo } => {
            let inst = load(&args.file, args.radius.as_ref())?;
            print_map(&inst, &fast_map(&inst, Kind::Vorvis, algo)?, args.format);
        }
        Command::Oracle { kind, args } => {
            let inst = load(&args.file, args.radius.as_ref())?;
            print_map(&inst, &oracle_map(&inst, kind), args.format);
        }
        Command::Check {
            kind,
            files,
            radius,
            algo,
            random,
            seed,
        } => {
            if files.is_empty() && random == 0 {
                return Err(Failure::Input(
                    "nothing to check: give files or --random N".into(),
                ));
            }
            let mut bad = Vec::new();
            for f in &files {
                let inst = load(f, radius.as_ref())?;
                if let Err(Failure::Mismatch(e)) =
                    check_one(&f.display().to_string(), &inst, kind, algo)
                {
                    bad.push(e);
                }
            }
            if random > 0 {
                if let Err(Failure::Mismatch(e)) =
                    check_random(kind, algo, radius.as_ref(), random, seed)
                {
                    bad.push(e);
                }
            }
            if !bad.is_empty() {
                return Err(Failure::Mismatch(bad.join("\n")));
            }
        }
        Command::Gen { family } => {
            let inst = match family {
                Family::Comb { m, teeth, seed } => gen_comb(m, teeth, seed)?.instance,
                Family::Random { n, m, seed, range } => gen_random(n, m, seed, range)?,
                Family::Witness { m, teeth } => gen_limited_witness(m, teeth)?,
            };
            print!("{}", write_instance(&inst));
        }
        Command::Render {
            kind,
            file,
            svg,
            radius,
        } => {
            let inst = load(&file, radius.as_ref())?;
            let map = fast_map(&inst, kind, Algo::Sweep)?;
            fs::write(&svg, render_svg(&inst, &map))
                .map_err(|e| Failure::Input(format!("{}: {e}", svg.display())))?;
        }
        Command::Bench {
            m,
            min_log,
            max_log,
            full_max_log,
            oracle_max_log,
        } => bench(m, min_log, max_log, full_max_log, oracle_max_log)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
