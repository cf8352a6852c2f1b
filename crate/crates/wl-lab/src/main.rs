//! Command-line front end: every pipeline stage with deterministic,
//! scriptable output.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wl_lab::bounds;
use wl_lab::census;
use wl_lab::critical;
use wl_lab::errors::Error;
use wl_lab::patterns;
use wl_lab::{algebra, coherent_closure, distinguishes, parse_graph, wl_refine};

#[derive(Parser)]
#[command(name = "wl-lab", version, about = "coherent configurations and Weisfeiler-Leman refinement")]
struct Cli {
    /// Cap the worker-thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized harness choices.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit machine-readable JSON payloads where supported.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherent closure of a colored digraph.
    Closure(FileArg),
    /// k-dimensional Weisfeiler-Leman refinement to the stable coloring.
    Kwl {
        file: PathBuf,
        #[arg(short, default_value_t = 2)]
        k: usize,
    },
    /// Joint k-WL comparison of two graphs.
    Distinguish {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(short, default_value_t = 2)]
        k: usize,
    },
    /// Fibers, interspaces with degrees, and the quotient graph.
    Analyze {
        file: PathBuf,
        /// Also print the quotient graph in DOT format.
        #[arg(long)]
        dot: bool,
    },
    /// Interspace patterns for quotient edges at small fibers of size 4 or 6.
    Classify(FileArg),
    /// The homogeneous census for one order.
    Census {
        #[arg(long)]
        order: usize,
        /// Certify (4,4) interspace completeness exhaustively as well.
        #[arg(long)]
        exhaustive: bool,
        /// Directory for the representative files named in the TSV.
        #[arg(long, default_value = "census-out")]
        out_dir: PathBuf,
    },
    /// Criticality-style reduction to the removal fixpoint.
    Reduce {
        file: PathBuf,
        /// Write the reduction trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// WL-dimension of a small simple graph against the exact oracle.
    Wldim {
        file: PathBuf,
        #[arg(long)]
        exact: bool,
    },
    /// Zemlyachenko limiting: color valence and fiber size.
    Limit {
        file: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        valence: usize,
    },
    /// Upper-bound certificate for a configuration.
    Bound {
        file: PathBuf,
        /// Write the certificate as JSON.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// CFI construction over a base graph, with optional twist and check.
    Cfi {
        #[arg(long)]
        base: PathBuf,
        /// Comma-separated twisted edges as u-v pairs, e.g. 0-1,2-3.
        #[arg(long)]
        twist: Option<String>,
        /// Run the k-WL distinguishing probe against the one-edge twist.
        #[arg(long)]
        check_k: Option<usize>,
    },
}

#[derive(Args)]
struct FileArg {
    file: PathBuf,
}

fn read_graph(path: &PathBuf) -> Result<wl_lab::ColoredDigraph, Error> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text)
}

fn simple_edges(g: &wl_lab::ColoredDigraph) -> Result<Vec<(usize, usize)>, Error> {
    let mut edges = vec![];
    for u in 0..g.n() {
        for v in (u + 1)..g.n() {
            match g.key(g.color(u, v)) {
                wl_lab::graph::ColorKey::Edge => edges.push((u, v)),
                wl_lab::graph::ColorKey::NonArc => {}
                other => {
                    return Err(Error::Argument(format!(
                        "base graph must be a plain edge list; pair ({u},{v}) has {other:?}"
                    )))
                }
            }
        }
    }
    Ok(edges)
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Closure(f) => {
            let g = read_graph(&f.file)?;
            let c = coherent_closure(&g)?;
            print!("{}", c.base().serialize());
        }
        Command::Kwl { file, k } => {
            let g = read_graph(&file)?;
            let s = wl_refine(&g, k)?;
            print!("{}", s.serialize());
        }
        Command::Distinguish { file1, file2, k } => {
            let g = read_graph(&file1)?;
            let h = read_graph(&file2)?;
            let res = distinguishes(&g, &h, k)?;
            if cli.json {
                println!("{}", serde_json::json!({ "k": k, "distinguished": res }));
            } else {
                println!("{}", if res { "distinguished" } else { "indistinguishable" });
            }
        }
        Command::Analyze { file, dot } => {
            let g = read_graph(&file)?;
            let c = coherent_closure(&g)?;
            let q = algebra::quotient_graph(&c);
            println!("order {}", c.n());
            println!("rank {}", c.rank());
            for (i, f) in c.fibers().iter().enumerate() {
                println!("fiber {i} size {} class {:?} vertices {:?}", f.len(), q.size_class[i], f);
            }
            for &(r, b) in &q.edges {
                let isp = algebra::interspace(&c, r, b)?;
                let tuple = census::interspace_type(&c, r, b)
                    .map(|t| census::format_tuple(&t, 0))
                    .unwrap_or_else(|_| "-".into());
                println!(
                    "interspace {r} {b} relations {} degrees {:?} type {}",
                    isp.relations.len(),
                    isp.degrees,
                    tuple
                );
            }
            if dot {
                println!("graph quotient {{");
                for i in 0..q.fiber_sizes.len() {
                    println!("  f{i} [label=\"{}\"];", q.fiber_sizes[i]);
                }
                for &(r, b) in &q.edges {
                    println!("  f{r} -- f{b};");
                }
                println!("}}");
            }
        }
        Command::Classify(f) => {
            let g = read_graph(&f.file)?;
            let c = coherent_closure(&g)?;
            let q = algebra::quotient_graph(&c);
            for &(a, b) in &q.edges {
                for (l, s) in [(a, b), (b, a)] {
                    let ssize = c.fibers()[s].len();
                    if ssize != 4 && ssize != 6 {
                        continue;
                    }
                    let pat = patterns::classify_pattern(&c, l, s)?;
                    let parts = patterns::leading_partition(&c, l, s)?;
                    let structure = patterns::partition_structure(&c, l, &[s])
                        .and_then(|(st, _)| patterns::structure_type(&st))
                        .map(|t| census::format_tuple(&t, 0))
                        .unwrap_or_else(|_| "-".into());
                    println!("{l}\t{s}\t{}\t{}\t{}", pat.name, parts.len(), structure);
                }
            }
        }
        Command::Census { order, exhaustive, out_dir } => {
            let entries = census::enumerate_homogeneous(order)?;
            std::fs::create_dir_all(&out_dir)?;
            for (i, e) in entries.iter().enumerate() {
                let path = out_dir.join(format!("order{}-{i}.graph", e.order));
                std::fs::write(&path, e.representative.base().serialize())?;
                println!(
                    "{}\t{}\t{}",
                    e.order,
                    census::format_tuple(&e.type_tuple, e.order),
                    path.display()
                );
            }
            if exhaustive && order == 4 {
                let types = census::exhaustive_44_types()?;
                for t in types {
                    println!("interspace(4,4)\t{}", census::format_tuple(&t, 0));
                }
                for a in 4..=7usize {
                    for b in a..=7 {
                        if let Some(reason) = census::cell_emptiness_reason(a, b) {
                            println!("interspace({a},{b})\tempty\t{reason}");
                        }
                    }
                }
            }
        }
        Command::Reduce { file, trace } => {
            let g = read_graph(&file)?;
            let c = coherent_closure(&g)?;
            let (core, tr) = critical::reduce_to_core(&c)?;
            println!("input order {} fibers {}", c.n(), c.fiber_count());
            println!("core order {} fibers {}", core.n(), core.fiber_count());
            for step in &tr.steps {
                println!("step {:?} removed {:?} ({})", step.kind, step.removed_original_vertices, step.note);
            }
            if let Some(path) = trace {
                std::fs::write(path, bounds::trace_json(&tr))?;
            }
        }
        Command::Wldim { file, exact } => {
            let g = read_graph(&file)?;
            if exact {
                let d = critical::exact_wldim(&g)?;
                println!("{d}");
            } else {
                let cert = bounds::upper_bound_certificate(&coherent_closure(&g)?)?;
                println!("{}", cert.total);
            }
        }
        Command::Limit { file, cap, valence } => {
            let g = read_graph(&file)?;
            let c = coherent_closure(&g)?;
            let (s, c2) = match cap {
                Some(cap) => bounds::limit_fiber_size(&c, cap, valence)?,
                None => bounds::limit_color_valence(&c, valence)?,
            };
            println!("individualized {} vertices: {:?}", s.len(), s);
            println!("fibers after: {:?}", c2.fibers().iter().map(|f| f.len()).collect::<Vec<_>>());
        }
        Command::Bound { file, certificate } => {
            let g = read_graph(&file)?;
            let c = coherent_closure(&g)?;
            let cert = bounds::upper_bound_certificate(&c)?;
            println!("total {}", cert.total);
            println!("conditional {}", cert.conditional);
            if let Some(path) = certificate {
                std::fs::write(path, bounds::certificate_json(&cert))?;
            } else if cli.json {
                println!("{}", bounds::certificate_json(&cert));
            }
        }
        Command::Cfi { base, twist, check_k } => {
            let g = read_graph(&base)?;
            let edges = simple_edges(&g)?;
            let twist_edges: Vec<(usize, usize)> = match twist {
                None => vec![],
                Some(s) => s
                    .split(',')
                    .map(|tok| {
                        let parts: Vec<&str> = tok.split('-').collect();
                        if parts.len() != 2 {
                            return Err(Error::Argument(format!("bad twist token {tok:?}")));
                        }
                        let u = parts[0].parse().map_err(|_| Error::Argument(format!("bad twist token {tok:?}")))?;
                        let v = parts[1].parse().map_err(|_| Error::Argument(format!("bad twist token {tok:?}")))?;
                        Ok((u, v))
                    })
                    .collect::<Result<_, Error>>()?,
            };
            let inst = bounds::cfi(g.n(), &edges, &twist_edges)?;
            print!("{}", inst.graph.serialize());
            if let Some(k) = check_k {
                let res = bounds::cfi_lower_bound_check(g.n(), &edges, k)?;
                eprintln!("k={k}: {}", if res { "distinguished" } else { "indistinguishable" });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (Error::Integrity(_) | Error::SizeGuard { .. } | Error::Resource { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
