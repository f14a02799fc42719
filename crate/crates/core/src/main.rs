use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tensorcas::notation::{parse_statement_at, split_statements, Style};
use tensorcas::session::Session;

#[derive(Parser)]
#[command(
    name = "tensorcas",
    version,
    about = "Tensor computer algebra with TeX-like notation"
)]
struct Cli {
    /// Output notation.
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    format: Format,

    /// Disable the post-process pipeline.
    #[arg(long, global = true)]
    no_postprocess: bool,

    /// Run SCRIPT and compare its displayed output with GOLDEN.
    #[arg(long, num_args = 2, value_names = ["SCRIPT", "GOLDEN"])]
    check: Option<Vec<PathBuf>>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Latex,
    Plain,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a script file and print its displayed results.
    Run { script: PathBuf },
    /// Interactive session.
    Repl,
}

fn session(cli: &Cli) -> Session {
    let style = match cli.format {
        Format::Latex => Style::Latex,
        Format::Plain => Style::Plain,
    };
    let mut s = Session::new(style);
    if cli.no_postprocess {
        s.set_post_process(Vec::new())
            .expect("empty pipeline is valid");
    }
    s
}

fn read(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn run(cli: &Cli, script: &Path) -> ExitCode {
    let text = match read(script) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let mut s = session(cli);
    for (line, src) in split_statements(&text) {
        let result = parse_statement_at(&src, line)
            .map_err(|e| tensorcas::Error::AtStatement {
                line,
                source: Box::new(e),
            })
            .and_then(|st| s.run_statement(&st));
        match result {
            Ok(Some(out)) => println!("{out}"),
            Ok(None) => {}
            Err(e) => {
                eprintln!("error: {}: {e}", script.display());
                return ExitCode::FAILURE;
            }
        }
    }
    ExitCode::SUCCESS
}

fn check(cli: &Cli, script: &Path, golden: &Path) -> ExitCode {
    let (text, want) = match (read(script), read(golden)) {
        (Ok(t), Ok(g)) => (t, g),
        (Err(c), _) | (_, Err(c)) => return c,
    };
    let got = match session(cli).run_script(&text) {
        Ok(lines) => lines,
        Err(e) => {
            eprintln!("error: {}: {e}", script.display());
            return ExitCode::FAILURE;
        }
    };
    let want: Vec<&str> = want.lines().collect();
    if got.iter().map(String::as_str).eq(want.iter().copied()) {
        println!("ok: {} matches {}", script.display(), golden.display());
        return ExitCode::SUCCESS;
    }
    for i in 0..got.len().max(want.len()) {
        let g = got.get(i).map(String::as_str);
        let w = want.get(i).copied();
        if g != w {
            eprintln!("first difference at output line {}:", i + 1);
            eprintln!("  expected: {}", w.unwrap_or("<end of output>"));
            eprintln!("  actual:   {}", g.unwrap_or("<end of output>"));
            break;
        }
    }
    ExitCode::FAILURE
}

fn repl(cli: &Cli) -> ExitCode {
    let mut s = session(cli);
    let stdin = io::stdin();
    let mut buf = String::new();
    let mut line_no = 0usize;
    let mut start = 1usize;
    print!("> ");
    let _ = io::stdout().flush();
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        line_no += 1;
        if buf.trim().is_empty() {
            start = line_no;
        }
        buf.push_str(&line);
        buf.push('\n');
        let pieces = split_statements(&buf);
        let complete = pieces
            .last()
            .map(|(_, t)| {
                let t = t.trim_end();
                t.ends_with(';') || t.ends_with('.')
            })
            .unwrap_or(true);
        if !complete {
            print!("  ");
            let _ = io::stdout().flush();
            continue;
        }
        for (l, src) in pieces {
            match parse_statement_at(&src, start + l - 1).and_then(|st| s.run_statement(&st)) {
                Ok(Some(out)) => println!("{out}"),
                Ok(None) => {}
                Err(e) => eprintln!("error: {e}"),
            }
        }
        buf.clear();
        print!("> ");
        let _ = io::stdout().flush();
    }
    println!();
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(paths) = &cli.check {
        return check(&cli, &paths[0], &paths[1]);
    }
    match &cli.command {
        Some(Command::Run { script }) => run(&cli, script),
        Some(Command::Repl) | None => repl(&cli),
    }
}
