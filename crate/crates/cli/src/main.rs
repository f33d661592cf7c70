use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use hyprewrite::confluence::{
    check_confluence, enumerate_critical_pairs, normal_forms, CriticalPair, Joinability,
    Termination, Verdict,
};
use hyprewrite::cospan::{cospan_equal, parse_cospan, print_cospan, Cospan};
use hyprewrite::diagram::{parse_diagram, parse_rules, print_diagram, Diagram};
use hyprewrite::dot::{cospan_to_dot, hypergraph_to_dot};
use hyprewrite::dpoi::{
    apply_step, find_rewrite_steps, rule_from_diagrams, DpoRule, GraphWithInterface, RewriteStep,
};
use hyprewrite::functor::translate;
use hyprewrite::hypergraph::{parse_hypergraph, print_hypergraph};
use hyprewrite::signature::{parse_signature, Signature};

const EXIT_DIFFERENT: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "hyprewrite", version, about = "String diagram rewriting modulo Frobenius structure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    OneStep,
    Normalize,
}

#[derive(clap::Args)]
struct SigArg {
    /// Signature file.
    #[arg(short = 's', long = "sig")]
    sig: PathBuf,
}

#[derive(clap::Args)]
struct RuleArgs {
    /// Rule file; may be given several times.
    #[arg(short = 'r', long = "rules", required = true)]
    rules: Vec<PathBuf>,
}

#[derive(clap::Args)]
struct SearchArgs {
    /// Maximum number of rewrite steps explored from each state.
    #[arg(long, default_value_t = 16)]
    bound: usize,
    /// Treat the system as terminating and search exhaustively.
    #[arg(long)]
    assert_terminating: bool,
}

impl SearchArgs {
    fn termination(&self) -> Termination {
        if self.assert_terminating {
            Termination::Asserted
        } else {
            Termination::Bounded(self.bound)
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a term.
    Check {
        #[command(flatten)]
        sig: SigArg,
        /// Term, or `@path` to read it from a file.
        term: String,
    },
    /// Print the cospan of hypergraphs denoted by a term.
    Translate {
        #[command(flatten)]
        sig: SigArg,
        term: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Decide whether two terms denote the same arrow.
    Equal {
        #[command(flatten)]
        sig: SigArg,
        left: String,
        right: String,
    },
    /// Rewrite a term with DPOI rules.
    Rewrite {
        #[command(flatten)]
        sig: SigArg,
        #[command(flatten)]
        rules: RuleArgs,
        term: String,
        #[arg(long, value_enum, default_value = "one-step")]
        mode: Mode,
        #[command(flatten)]
        search: SearchArgs,
        /// Print every validated double-pushout diagram to stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List critical pairs.
    Cps {
        #[command(flatten)]
        sig: SigArg,
        #[command(flatten)]
        rules: RuleArgs,
        /// Also list pairs whose matches do not overlap.
        #[arg(long)]
        keep_disjoint: bool,
    },
    /// Decide confluence by critical-pair analysis.
    Confluence {
        #[command(flatten)]
        sig: SigArg,
        #[command(flatten)]
        rules: RuleArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Write one file per critical pair into this directory.
        #[arg(long)]
        certificates: Option<PathBuf>,
        #[arg(long)]
        keep_disjoint: bool,
    },
    /// Render a hypergraph or cospan file as text or DOT.
    Render {
        #[command(flatten)]
        sig: SigArg,
        file: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_signature(arg: &SigArg) -> Result<Signature> {
    let text = read(&arg.sig)?;
    parse_signature(&text).with_context(|| format!("in {}", arg.sig.display()))
}

fn load_term(sig: &Signature, arg: &str) -> Result<Diagram> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => arg.to_string(),
    };
    Ok(parse_diagram(sig, text.trim())?)
}

fn load_rules(sig: &Signature, args: &RuleArgs) -> Result<Vec<DpoRule>> {
    let mut out = Vec::new();
    for path in &args.rules {
        let rules = parse_rules(sig, &read(path)?).with_context(|| format!("in {}", path.display()))?;
        out.extend(rules.iter().map(rule_from_diagrams));
    }
    Ok(out)
}

fn render_cospan(sig: &Signature, f: &Cospan, format: Format) -> String {
    match format {
        Format::Text => print_cospan(sig, f),
        Format::Dot => cospan_to_dot(sig, f),
    }
}

fn listing(nodes: &[usize]) -> String {
    nodes.iter().map(|n| format!("n{n}")).collect::<Vec<_>>().join(" ")
}

fn graph_with_interface(sig: &Signature, g: &GraphWithInterface) -> String {
    print_cospan(sig, &g.as_cospan())
}

fn trace_step(sig: &Signature, rule: &DpoRule, g: &GraphWithInterface, step: &RewriteStep) -> String {
    let mut out = format!("# step with rule {}\n", rule.name);
    let _ = writeln!(out, "## L\n{}", print_hypergraph(sig, &rule.lhs));
    let _ = writeln!(out, "## K -> L: {}", listing(&rule.k_lhs));
    let _ = writeln!(out, "## K -> R: {}", listing(&rule.k_rhs));
    let _ = writeln!(out, "## R\n{}", print_hypergraph(sig, &rule.rhs));
    let _ = writeln!(out, "## G\n{}", graph_with_interface(sig, g));
    let _ = writeln!(out, "## match L -> G: {}", listing(&step.matching.nodes));
    let _ = writeln!(out, "## C\n{}", print_hypergraph(sig, &step.context));
    let _ = writeln!(out, "## K -> C: {}", listing(&step.k_context));
    let _ = writeln!(out, "## I -> C: {}", listing(&step.interface_context));
    let _ = writeln!(out, "## C -> G: {}", listing(&step.context_to_graph.nodes));
    let _ = writeln!(out, "## H\n{}", graph_with_interface(sig, &apply_step(step)));
    out
}

fn cmd_check(sig: &SigArg, term: &str) -> Result<u8> {
    let sig = load_signature(sig)?;
    let d = load_term(&sig, term)?;
    println!(
        "{} : {} -> {}",
        print_diagram(&sig, &d),
        sig.display_word(d.dom()),
        sig.display_word(d.cod())
    );
    Ok(0)
}

fn cmd_translate(sig: &SigArg, term: &str, format: Format) -> Result<u8> {
    let sig = load_signature(sig)?;
    let d = load_term(&sig, term)?;
    print!("{}", render_cospan(&sig, &translate(&d), format));
    Ok(0)
}

fn cmd_equal(sig: &SigArg, left: &str, right: &str) -> Result<u8> {
    let sig = load_signature(sig)?;
    let a = load_term(&sig, left)?;
    let b = load_term(&sig, right)?;
    if a.type_of() != b.type_of() {
        println!(
            "DIFFERENT (types {} -> {} and {} -> {})",
            sig.display_word(a.dom()),
            sig.display_word(a.cod()),
            sig.display_word(b.dom()),
            sig.display_word(b.cod())
        );
        return Ok(EXIT_DIFFERENT);
    }
    match cospan_equal(&translate(&a), &translate(&b))? {
        Some(iso) => {
            println!("EQUAL");
            let pairs: Vec<String> =
                iso.nodes.iter().enumerate().map(|(i, j)| format!("n{i}->n{j}")).collect();
            println!("nodes: {}", pairs.join(" "));
            let pairs: Vec<String> =
                iso.edges.iter().enumerate().map(|(i, j)| format!("e{i}->e{j}")).collect();
            println!("edges: {}", pairs.join(" "));
            Ok(0)
        }
        None => {
            println!("DIFFERENT");
            Ok(EXIT_DIFFERENT)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_rewrite(
    sig: &SigArg,
    rules: &RuleArgs,
    term: &str,
    mode: Mode,
    search: &SearchArgs,
    trace: bool,
    format: Format,
) -> Result<u8> {
    let sig = load_signature(sig)?;
    let rules = load_rules(&sig, rules)?;
    let d = load_term(&sig, term)?;
    let left = d.dom().len();
    let g = GraphWithInterface::from_diagram(&d);
    match mode {
        Mode::OneStep => {
            let mut count = 0;
            let mut seen: Vec<GraphWithInterface> = Vec::new();
            for rule in &rules {
                for step in find_rewrite_steps(rule, &g) {
                    if trace {
                        eprint!("{}", trace_step(&sig, rule, &g, &step));
                    }
                    let h = apply_step(&step);
                    if seen.iter().any(|s| s.isomorphic(&h)) {
                        continue;
                    }
                    count += 1;
                    println!("# result {count} (rule {})", rule.name);
                    print!("{}", render_cospan(&sig, &h.unfold(left), format));
                    seen.push(h);
                }
            }
            if count == 0 {
                println!("# no redex");
            }
            Ok(0)
        }
        Mode::Normalize => {
            let nf = normal_forms(&g, &rules, search.termination());
            for (i, h) in nf.forms.iter().enumerate() {
                println!("# normal form {}", i + 1);
                print!("{}", render_cospan(&sig, &h.unfold(left), format));
            }
            if nf.complete {
                Ok(0)
            } else {
                eprintln!("bound {} reached; the list may be incomplete", search.bound);
                Ok(EXIT_INCONCLUSIVE)
            }
        }
    }
}

fn describe_pair(sig: &Signature, rules: &[DpoRule], k: usize, cp: &CriticalPair) -> String {
    let mut out = format!(
        "# critical pair {k}: {} / {}{}\n",
        rules[cp.rule1].name,
        rules[cp.rule2].name,
        if cp.disjoint { " (disjoint)" } else { "" }
    );
    let _ = writeln!(out, "## S\n{}", print_hypergraph(sig, &cp.overlap));
    let _ = writeln!(out, "## J\n{}", print_hypergraph(sig, &cp.apex));
    let _ = writeln!(out, "## H1 <- J\n{}", graph_with_interface(sig, &cp.result1));
    let _ = writeln!(out, "## H2 <- J\n{}", graph_with_interface(sig, &cp.result2));
    out
}

fn cmd_cps(sig: &SigArg, rules: &RuleArgs, keep_disjoint: bool) -> Result<u8> {
    let sig = load_signature(sig)?;
    let rules = load_rules(&sig, rules)?;
    let pairs = enumerate_critical_pairs(&rules, keep_disjoint)?;
    for (k, cp) in pairs.iter().enumerate() {
        print!("{}", describe_pair(&sig, &rules, k, cp));
    }
    println!("# {} critical pairs", pairs.len());
    Ok(0)
}

fn certificate(sig: &Signature, rules: &[DpoRule], k: usize, cp: &CriticalPair, j: &Joinability) -> String {
    let mut out = describe_pair(sig, rules, k, cp);
    match j {
        Joinability::Joinable(cert) => {
            out.push_str("# joinable\n");
            for (side, path) in [("left", &cert.left), ("right", &cert.right)] {
                for (i, state) in path.states.iter().enumerate().skip(1) {
                    let rule = &rules[path.rules[i - 1]].name;
                    let _ = writeln!(out, "## {side} step {i} (rule {rule})");
                    out.push_str(&graph_with_interface(sig, state));
                }
            }
            let _ = writeln!(out, "## common reduct\n{}", graph_with_interface(sig, &cert.common));
        }
        Joinability::NotJoinable => out.push_str("# not joinable\n"),
        Joinability::Unknown => out.push_str("# unknown within bound\n"),
    }
    out
}

fn cmd_confluence(
    sig: &SigArg,
    rules: &RuleArgs,
    search: &SearchArgs,
    certificates: Option<&Path>,
    keep_disjoint: bool,
) -> Result<u8> {
    let sig = load_signature(sig)?;
    let rules = load_rules(&sig, rules)?;
    let report = check_confluence(&rules, search.termination(), keep_disjoint)?;
    println!("{}", report.verdict);
    println!("# {} critical pairs", report.pairs.len());
    if let Some(k) = report.pairs.iter().position(|(_, j)| *j == Joinability::NotJoinable) {
        print!("{}", describe_pair(&sig, &rules, k, &report.pairs[k].0));
    }
    if let Some(dir) = certificates {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (k, (cp, j)) in report.pairs.iter().enumerate() {
            let path = dir.join(format!("pair_{k:03}.txt"));
            std::fs::write(&path, certificate(&sig, &rules, k, cp, j))
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    Ok(match report.verdict {
        Verdict::Confluent => 0,
        Verdict::NotConfluent => EXIT_DIFFERENT,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

fn cmd_render(sig: &SigArg, file: &Path, format: Format) -> Result<u8> {
    let sig = load_signature(sig)?;
    let text = read(file)?;
    let has_legs = text.lines().any(|l| {
        let l = l.trim_start();
        l.starts_with("left:") || l.starts_with("right:")
    });
    let out = if has_legs {
        let f = parse_cospan(&sig, &text)?;
        render_cospan(&sig, &f, format)
    } else {
        let g = parse_hypergraph(&sig, &text)?;
        match format {
            Format::Text => print_hypergraph(&sig, &g),
            Format::Dot => hypergraph_to_dot(&sig, &g, &[]),
        }
    };
    print!("{out}");
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check { sig, term } => cmd_check(&sig, &term),
        Command::Translate { sig, term, format } => cmd_translate(&sig, &term, format),
        Command::Equal { sig, left, right } => cmd_equal(&sig, &left, &right),
        Command::Rewrite { sig, rules, term, mode, search, trace, format } => {
            cmd_rewrite(&sig, &rules, &term, mode, &search, trace, format)
        }
        Command::Cps { sig, rules, keep_disjoint } => cmd_cps(&sig, &rules, keep_disjoint),
        Command::Confluence { sig, rules, search, certificates, keep_disjoint } => {
            cmd_confluence(&sig, &rules, &search, certificates.as_deref(), keep_disjoint)
        }
        Command::Render { sig, file, format } => cmd_render(&sig, &file, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
