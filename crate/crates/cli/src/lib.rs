//! The `germgraph` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input graph or trace,
//! 3 classification left unresolved pairs.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use germ_graph::enumerate::{self, ClassificationReport};
use germ_graph::search::{self, SearchConfig, Verdict};
use germ_graph::text::{parse_graph, to_dot, to_line, to_text};
use germ_graph::{chords, formulas, gf2, invariants, moves, random, DualGraph, MoveTrace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNRESOLVED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "germgraph", version, about = "Dual graphs of plane curve germ resolutions")]
struct Cli {
    /// Plain `key=value` file setting defaults: depth, node_budget, vmax.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for enumeration and search.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Graph file; standard input when absent or `-`.
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the structural rules.
    Validate(Input),
    /// Determinant of the intersection matrix mod 2.
    Det(Input),
    /// Corank of the intersection matrix.
    Mu(Input),
    #[command(name = "mu-prime")]
    MuPrime(Input),
    /// Apply contractions and modifications until none applies.
    Reduce {
        #[command(flatten)]
        input: Input,
        /// Pick moves in seeded random order instead of canonical order.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the move trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check the standard-form properties.
    Standard(Input),
    Invariants(Input),
    /// Bounded search for a common blow-up and blow-down.
    Equivalent {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Standard forms for `n` branches and `μ′ = k`.
    Enumerate {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        /// Vertex bound; found by stabilization when absent.
        #[arg(long)]
        vmax: Option<usize>,
        /// Also print the direct placement counts next to the closed forms.
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        classes: bool,
        #[arg(long)]
        depth: Option<usize>,
        /// Write one DOT file per graph or class into this directory.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Classify the graphs in the given files.
    Classify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Chord diagrams with `n` chords, or the recorded set of a class.
    Chords {
        #[arg(short, conflicts_with = "class", required_unless_present = "class")]
        n: Option<usize>,
        #[arg(long)]
        class: Option<String>,
    },
    /// A seeded random resolution.
    Random {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: u64,
    },
    Dot {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "G")]
        name: String,
    },
    /// Apply a trace, checking every recorded code.
    Replay { graph: PathBuf, trace: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    pub depth: usize,
    pub node_budget: usize,
    /// `None` means stabilize.
    pub vmax: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config { depth: 4, node_budget: search::DEFAULT_NODE_BUDGET, vmax: None }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, String> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(format!("line {}: expected key=value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || value.parse::<usize>().map_err(|e| format!("line {}: {key}: {e}", i + 1));
            match key {
                "depth" => c.depth = num()?,
                "node_budget" => c.node_budget = num()?,
                "vmax" if value == "auto" => c.vmax = None,
                "vmax" => c.vmax = Some(num()?),
                _ => return Err(format!("line {}: unknown key `{key}`", i + 1)),
            }
        }
        Ok(c)
    }
}

/// A failure with its exit code.
struct Failure(i32, String);

type Outcome = Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(EXIT_INVALID, msg.into())
}

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    config: Config,
}

impl Ctx<'_> {
    fn read_source(&mut self, file: Option<&Path>) -> Result<(String, String), Failure> {
        match file {
            None => self.read_stdin(),
            Some(p) if p == Path::new("-") => self.read_stdin(),
            Some(p) => fs::read_to_string(p)
                .map(|t| (t, p.display().to_string()))
                .map_err(|e| usage(format!("{}: {e}", p.display()))),
        }
    }

    fn read_stdin(&mut self) -> Result<(String, String), Failure> {
        let mut s = String::new();
        self.stdin.read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
        Ok((s, "<stdin>".into()))
    }

    /// Parses without checking the structural rules.
    fn parse(&mut self, file: Option<&Path>) -> Result<DualGraph, Failure> {
        let (text, name) = self.read_source(file)?;
        parse_graph(&text).map_err(|e| invalid(format!("{name}: {e}")))
    }

    fn graph(&mut self, file: Option<&Path>) -> Result<DualGraph, Failure> {
        let g = self.parse(file)?;
        let violations = g.validate();
        if violations.is_empty() {
            Ok(g)
        } else {
            let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            Err(invalid(format!("invalid graph: {}", list.join("; "))))
        }
    }

    fn contractible(&mut self, file: Option<&Path>) -> Result<DualGraph, Failure> {
        let g = self.graph(file)?;
        if gf2::intersection_matrix(&g).det() {
            Ok(g)
        } else {
            Err(invalid("graph is not smoothly contractible (det = 0)"))
        }
    }

    fn emit(&mut self, text: &str) -> Result<(), Failure> {
        self.out.write_all(text.as_bytes()).map_err(|e| usage(format!("output: {e}")))
    }

    fn line(&mut self, text: &str) -> Result<(), Failure> {
        self.emit(text)?;
        self.emit("\n")
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn print_classes(ctx: &mut Ctx, report: &ClassificationReport) -> Outcome {
    for (i, c) in report.classes.iter().enumerate() {
        let trunk = c.trunk.map_or("-".to_string(), |t| t.to_string());
        ctx.line(&format!(
            "class {} mu_prime={} signature={} trunk={} members={} graph={}",
            i + 1,
            c.mu_prime,
            enumerate::format_signature(&c.signature),
            trunk,
            c.members.len(),
            to_line(&c.representative, false)
        ))?;
    }
    for &(a, b) in &report.unresolved {
        ctx.line(&format!("unresolved {} {}", a + 1, b + 1))?;
    }
    ctx.line(&report.summary())?;
    ctx.line(&format!("depth={} unresolved={}", report.depth, report.unresolved.len()))?;
    Ok(if report.unresolved.is_empty() { EXIT_OK } else { EXIT_UNRESOLVED })
}

fn print_raw(ctx: &mut Ctx, k: usize) -> Result<(), Failure> {
    use germ_graph::enumerate::TrunkType;
    ctx.line(&format!("bound={}", formulas::upper_bound(k)))?;
    let Ok((b, c, d)) = formulas::type_counts(k) else {
        return ctx.line("type_counts=undefined (k < 3)");
    };
    for (t, formula) in [(TrunkType::B, b), (TrunkType::C, c), (TrunkType::D, d)] {
        let raw = formulas::raw_placements(k, t).map_err(|e| usage(e.to_string()))?;
        ctx.line(&format!("type={t} formula={formula} raw={raw}"))?;
    }
    ctx.line(&format!("type_sum={}", b + c + d))
}

fn dispatch(cli: Cli, ctx: &mut Ctx) -> Outcome {
    match cli.command {
        Command::Validate(i) => {
            ctx.graph(i.file.as_deref())?;
            ctx.line("valid")?;
        }
        Command::Det(i) => {
            let g = ctx.graph(i.file.as_deref())?;
            let det = gf2::intersection_matrix(&g).det();
            ctx.line(&format!("det={} contractible={det}", u8::from(det)))?;
        }
        Command::Mu(i) => {
            let g = ctx.graph(i.file.as_deref())?;
            ctx.line(&format!("mu={}", gf2::mu(&g)))?;
        }
        Command::MuPrime(i) => {
            let g = ctx.graph(i.file.as_deref())?;
            let m = invariants::mu_prime(&g).map_err(|e| invalid(e.to_string()))?;
            ctx.line(&format!("mu_prime={m}"))?;
        }
        Command::Reduce { input, seed, trace } => {
            let g = ctx.contractible(input.file.as_deref())?;
            let result = match seed {
                Some(s) => moves::reduce_random(&g, &mut random::rng(s)),
                None => moves::reduce(&g),
            };
            let (h, t) = result.map_err(|e| invalid(e.to_string()))?;
            if let Some(path) = trace {
                write_file(&path, &t.to_string())?;
            }
            ctx.emit(&to_text(&h, false))?;
        }
        Command::Standard(i) => {
            let g = ctx.contractible(i.file.as_deref())?;
            let (ok, violated) = moves::is_standard(&g).map_err(|e| invalid(e.to_string()))?;
            if ok {
                ctx.line("standard=true")?;
            } else {
                let v: Vec<String> = violated.iter().map(|p| p.to_string()).collect();
                ctx.line(&format!("standard=false violated={}", v.join(",")))?;
            }
        }
        Command::Invariants(i) => {
            let g = ctx.graph(i.file.as_deref())?;
            let r = invariants::report(&g).map_err(|e| invalid(e.to_string()))?;
            ctx.emit(&r.to_string())?;
        }
        Command::Equivalent { first, second, depth } => {
            let a = ctx.contractible(Some(&first))?;
            let b = ctx.contractible(Some(&second))?;
            let config = SearchConfig { depth: depth.unwrap_or(ctx.config.depth), node_budget: ctx.config.node_budget };
            match search::equivalent(&a, &b, config).map_err(|e| invalid(e.to_string()))? {
                Verdict::Equivalent(w) => {
                    ctx.line(&format!("equivalent=true depth={}", w.depth))?;
                    ctx.line("# first")?;
                    ctx.emit(&w.left.to_string())?;
                    ctx.line("# second")?;
                    ctx.emit(&w.right.to_string())?;
                }
                Verdict::Unknown => ctx.line(&format!("equivalent=unknown depth={}", config.depth))?,
            }
        }
        Command::Enumerate { n, k, vmax, raw, classes, depth, dot } => {
            if n == 0 {
                return Err(usage("-n must be at least 1"));
            }
            let v = match vmax.or(ctx.config.vmax) {
                Some(v) => v,
                None => enumerate::stable_vmax(n, k).map_err(|e| usage(e.to_string()))?,
            };
            let forms = enumerate::enumerate_standard(n, k, v);
            if let Some(dir) = &dot {
                fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            }
            let mut code = EXIT_OK;
            if classes {
                let d = depth.unwrap_or(ctx.config.depth);
                let report = enumerate::classify_with_budget(&forms, d, ctx.config.node_budget)
                    .map_err(|e| invalid(e.to_string()))?;
                if let Some(dir) = &dot {
                    for (i, c) in report.classes.iter().enumerate() {
                        let name = format!("class_{}", i + 1);
                        write_file(&dir.join(format!("{name}.dot")), &to_dot(&c.representative, &name))?;
                    }
                }
                code = print_classes(ctx, &report)?;
            } else {
                for (i, g) in forms.iter().enumerate() {
                    ctx.line(&to_line(g, false))?;
                    if let Some(dir) = &dot {
                        let name = format!("form_{}", i + 1);
                        write_file(&dir.join(format!("{name}.dot")), &to_dot(g, &name))?;
                    }
                }
                let mut sigs: Vec<String> = forms
                    .iter()
                    .map(|g| invariants::pair_signature(g).map(|s| {
                        let mut v = s.values();
                        v.sort_unstable();
                        enumerate::format_signature(&v)
                    }))
                    .collect::<Result<_, _>>()
                    .map_err(|e| invalid(e.to_string()))?;
                sigs.sort();
                ctx.line(&format!("graphs={} vmax={v} signatures={}", forms.len(), sigs.join(",")))?;
            }
            if raw {
                print_raw(ctx, k)?;
            }
            return Ok(code);
        }
        Command::Classify { files, depth } => {
            let graphs = files.iter().map(|f| ctx.contractible(Some(f))).collect::<Result<Vec<_>, _>>()?;
            let d = depth.unwrap_or(ctx.config.depth);
            let report =
                enumerate::classify_with_budget(&graphs, d, ctx.config.node_budget).map_err(|e| invalid(e.to_string()))?;
            return print_classes(ctx, &report);
        }
        Command::Chords { n, class } => {
            let words = match (n, class) {
                (Some(n), None) => chords::enumerate_chords(n),
                (None, Some(label)) => chords::diagrams_for_class(&label).map_err(|e| usage(e.to_string()))?,
                _ => return Err(usage("give exactly one of -n or --class")),
            };
            for w in words {
                ctx.line(&w)?;
            }
        }
        Command::Random { n, steps, seed } => {
            ctx.emit(&to_text(&random::random_resolution(n, steps, seed), false))?;
        }
        Command::Dot { input, name } => {
            let g = ctx.graph(input.file.as_deref())?;
            ctx.emit(&to_dot(&g, &name))?;
        }
        Command::Replay { graph, trace } => {
            let g = ctx.graph(Some(&graph))?;
            let (text, _) = ctx.read_source(Some(&trace))?;
            let t = MoveTrace::parse(&text).map_err(|e| invalid(format!("{}: {e}", trace.display())))?;
            let h = moves::replay(&g, &t).map_err(|e| invalid(e.to_string()))?;
            ctx.emit(&to_text(&h, false))?;
        }
    }
    Ok(EXIT_OK)
}

/// Runs one command line; `argv[0]` is the program name.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let config = match &cli.config {
        None => Ok(Config::default()),
        Some(p) => fs::read_to_string(p)
            .map_err(|e| format!("{}: {e}", p.display()))
            .and_then(|t| Config::parse(&t).map_err(|e| format!("{}: {e}", p.display()))),
    };
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(w) = cli.workers {
        if w == 0 {
            let _ = writeln!(err, "error: --workers must be positive");
            return EXIT_USAGE;
        }
        // The global pool can be set once per process; later calls keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let mut ctx = Ctx { stdin, out, config };
    match dispatch(cli, &mut ctx) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["germgraph"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut input, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_file_keys() {
        let c = Config::parse("# defaults\ndepth = 6\nnode_budget=500\nvmax=auto\n").unwrap();
        assert_eq!(c, Config { depth: 6, node_budget: 500, vmax: None });
        assert_eq!(Config::parse("vmax=9").unwrap().vmax, Some(9));
        assert!(Config::parse("colour=red").is_err());
        assert!(Config::parse("depth").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_str(&["frobnicate"], "").0, EXIT_USAGE);
        assert_eq!(run_str(&["random", "-n", "2", "--steps", "3"], "").0, EXIT_USAGE);
        assert_eq!(run_str(&["chords"], "").0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"], "").0, EXIT_OK);
    }

    #[test]
    fn stdin_input() {
        let (code, out, _) = run_str(&["mu"], "vertex a even\n");
        assert_eq!((code, out.as_str()), (0, "mu=1\n"));
        let (code, _, err) = run_str(&["det"], "vertex a purple\n");
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("line 1"));
    }
}
