mod args;
mod commands;
mod manifest;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, ReplayArgs};
use commands::{CliError, CmdResult, Context, Product};
use manifest::{output_name, sibling, write_output, OutputDigest, RunManifest};

fn main() {
    std::process::exit(run(std::env::args_os().collect()));
}

fn run(argv: Vec<OsString>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let recorded: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let result = match &cli.command {
        Command::Replay(r) => replay(r),
        _ => execute(&cli, &recorded).map(|_| 0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Where a command's files go.
enum Destination {
    Stdout,
    /// Primary output at this path; secondary files next to it.
    File(PathBuf),
    Directory(PathBuf),
}

fn destination(cmd: &Command) -> Destination {
    let out = match cmd {
        Command::Sieve(a) => &a.out.out,
        Command::Zeta(a) => &a.out.out,
        Command::Eval(a) => &a.out.out,
        Command::Distance(a) => &a.out.out,
        Command::Mellin(a) => &a.out.out,
        Command::Lemma(a) => &a.out.out,
        Command::Report(a) => {
            return a.out_dir.clone().map_or(Destination::Stdout, Destination::Directory);
        }
        Command::Replay(_) => &None,
    };
    out.clone().map_or(Destination::Stdout, Destination::File)
}

/// Points every output of `cmd` into `dir`, keeping file names.
fn redirect(cmd: &mut Command, dir: &Path) {
    let out = match cmd {
        Command::Sieve(a) => &mut a.out.out,
        Command::Zeta(a) => &mut a.out.out,
        Command::Eval(a) => &mut a.out.out,
        Command::Distance(a) => &mut a.out.out,
        Command::Mellin(a) => &mut a.out.out,
        Command::Lemma(a) => &mut a.out.out,
        Command::Report(a) => {
            a.out_dir = Some(dir.to_path_buf());
            return;
        }
        Command::Replay(_) => return,
    };
    if let Some(p) = out.as_mut() {
        let name = p.file_name().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("output"));
        *p = dir.join(name);
    }
}

fn thread_pool(threads: usize) -> CmdResult<rayon::ThreadPool> {
    if threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(e.into()))
}

/// Runs a computation, writes its files and, unless printing to stdout,
/// the manifest. Returns the manifest when one was written.
fn execute(cli: &Cli, recorded: &[String]) -> CmdResult<Option<RunManifest>> {
    let ctx = Context {
        table_limit: cli.table_limit,
    };
    let pool = thread_pool(cli.threads)?;
    let start = Instant::now();
    let product = pool.install(|| commands::dispatch(&cli.command, &ctx))?;
    let wall = start.elapsed().as_secs_f64();
    let (outputs, manifest_path) = match destination(&cli.command) {
        Destination::Stdout => {
            print_stdout(&product)?;
            return Ok(None);
        }
        Destination::File(path) => {
            let mut out = vec![write_output(&path, &product.artifacts[0].content).map_err(CliError::Io)?];
            for a in &product.artifacts[1..] {
                out.push(write_output(&sibling(&path, &a.name), &a.content).map_err(CliError::Io)?);
            }
            (out, sibling(&path, "manifest.json"))
        }
        Destination::Directory(dir) => {
            let out = product
                .artifacts
                .iter()
                .map(|a| write_output(&dir.join(&a.name), &a.content))
                .collect::<anyhow::Result<Vec<_>>>()
                .map_err(CliError::Io)?;
            (out, dir.join("manifest.json"))
        }
    };
    let manifest = RunManifest {
        subcommand: cli.command.name().to_string(),
        argv: recorded.to_vec(),
        parameters: serde_json::to_value(&cli.command)?,
        library_version: nbcrit::VERSION.to_string(),
        table_limit: product.table_limit,
        quadrature: product.quadrature,
        threads: cli.threads,
        wall_time_seconds: wall,
        outputs,
    };
    manifest.write(&manifest_path).map_err(CliError::Io)?;
    Ok(Some(manifest))
}

fn print_stdout(product: &Product) -> CmdResult<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(product.artifacts[0].content.as_bytes())?;
    stdout.flush()?;
    if product.artifacts.len() > 1 {
        let mut stderr = std::io::stderr().lock();
        for a in &product.artifacts[1..] {
            writeln!(stderr, "# {}", a.name)?;
            stderr.write_all(a.content.as_bytes())?;
        }
    }
    Ok(())
}

fn digests_by_name(outputs: &[OutputDigest]) -> BTreeMap<String, String> {
    outputs.iter().map(|d| (output_name(d), d.sha256.clone())).collect()
}

/// Re-runs a manifest at its recorded thread count and table size; exit 0
/// when every output digest matches, 1 otherwise.
fn replay(r: &ReplayArgs) -> CmdResult<i32> {
    let m = RunManifest::read(&r.manifest).map_err(CliError::Io)?;
    let argv = std::iter::once("nbcrit".to_string()).chain(m.argv.iter().cloned());
    let mut cli = Cli::try_parse_from(argv)
        .map_err(|e| CliError::Usage(format!("manifest argv no longer parses: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Usage("a manifest cannot replay a replay".into()));
    }
    let dir = match &r.out_dir {
        Some(d) => d.clone(),
        None => tempdir()?,
    };
    redirect(&mut cli.command, &dir);
    cli.threads = m.threads;
    cli.table_limit = Some(m.table_limit).filter(|&l| l > 0);
    let fresh = execute(&cli, &m.argv)?
        .ok_or_else(|| CliError::Usage("manifest describes a run that wrote to stdout".into()))?;
    let old = digests_by_name(&m.outputs);
    let new = digests_by_name(&fresh.outputs);
    let mut ok = old.len() == new.len();
    for (name, digest) in &old {
        match new.get(name) {
            Some(d) if d == digest => println!("match    {name} {digest}"),
            Some(d) => {
                ok = false;
                println!("MISMATCH {name} recorded {digest} replayed {d}");
            }
            None => {
                ok = false;
                println!("MISSING  {name}");
            }
        }
    }
    for name in new.keys().filter(|n| !old.contains_key(*n)) {
        ok = false;
        println!("EXTRA    {name}");
    }
    println!("replayed into {}", dir.display());
    Ok(if ok { 0 } else { 1 })
}

/// A fresh directory under the system temp dir; left in place so the
/// replayed files can be inspected.
fn tempdir() -> CmdResult<PathBuf> {
    let base = std::env::temp_dir();
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    let dir = base.join(format!("nbcrit-replay-{}-{stamp}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}
