use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use deeplinker::server;
use deeplinker::service::{Service, ServiceConfig, DEFAULT_PORT};
use tracing_subscriber::EnvFilter;

/// Serves deep links into the files under a root directory.
#[derive(Debug, Parser)]
#[command(name = "deeplinker", version)]
struct Args {
    /// Directory exposed as /filesystem.
    #[arg(long, env = "DEEPLINKER_ROOT")]
    root: PathBuf,
    #[arg(long, env = "DEEPLINKER_PORT", default_value_t = DEFAULT_PORT, value_parser = clap::value_parser!(u16).range(1..))]
    port: u16,
    #[arg(long, env = "DEEPLINKER_BIND", default_value = "127.0.0.1")]
    bind: String,
    /// Prefix of annotation subject IRIs [default: http://<bind>:<port>]
    #[arg(long, env = "DEEPLINKER_BASE_IRI")]
    base_iri: Option<String>,
    /// Use a remote SPARQL 1.1 endpoint instead of the embedded store.
    #[arg(long, env = "DEEPLINKER_SPARQL_ENDPOINT")]
    sparql_endpoint: Option<String>,
    #[arg(long, env = "DEEPLINKER_UPLOAD_DIR", default_value = ".deeplinker/uploads")]
    upload_dir: PathBuf,
    #[arg(long, env = "DEEPLINKER_CACHE_DIR", default_value = ".deeplinker/cache")]
    cache_dir: PathBuf,
    /// Annotation journal of the embedded store (N-Triples).
    #[arg(long, env = "DEEPLINKER_JOURNAL", default_value = ".deeplinker/annotations.nt")]
    journal: PathBuf,
    /// Directory served under /assets.
    #[arg(long, env = "DEEPLINKER_ASSETS_DIR")]
    assets_dir: Option<PathBuf>,
    /// Resolve one deep link, print the representation and exit.
    #[arg(long, value_name = "PATH")]
    resolve: Option<String>,
    /// Accept header used with --resolve.
    #[arg(long, requires = "resolve")]
    accept: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();

    let config = ServiceConfig {
        root: args.root,
        bind: args.bind,
        port: args.port,
        base_iri: args.base_iri,
        sparql_endpoint: args.sparql_endpoint,
        upload_dir: args.upload_dir,
        cache_dir: args.cache_dir,
        journal: args.journal,
        assets_dir: args.assets_dir,
    };

    if let Some(path) = args.resolve {
        let service = match Service::from_config(&config) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("deeplinker: {e}");
                return ExitCode::from(1);
            }
        };
        let reply = service.get(&path, args.accept.as_deref());
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(&reply.body).and_then(|_| out.flush());
        if reply.status != 200 {
            eprintln!("deeplinker: {path} answered {}", reply.status);
            return ExitCode::from(1);
        }
        return ExitCode::SUCCESS;
    }

    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("deeplinker: {e}");
            return ExitCode::from(1);
        }
    };
    match runtime.block_on(server::serve(&config)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("deeplinker: {e}");
            ExitCode::from(1)
        }
    }
}
