use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

pub const USAGE: &str = "\
usage: ogp [<option>] [<conjecture> [<prover> [<prover-options>]]]

options:
  -h, --help            show this help and exit (alone)
  -p, --provers         list the available provers and exit (alone)
  -V, --version         show the version and exit (alone)
  -t <s>, --timeout=<s> time limit in seconds (default 60)
  --tgtp=<id>           fetch the conjecture from the problem repository
  --parallel            run portfolio slots concurrently
  --json                print the report as JSON
  --                    end of ogp options

A .fof conjecture without a prover goes to the portfolio; other
extensions use their registered default prover. Tokens after the
conjecture that start with `-` are passed to the prover verbatim.
";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File(PathBuf),
    Tgtp(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProveAction {
    pub source: Source,
    pub prover: Option<String>,
    pub prover_options: Vec<String>,
    pub timeout: Duration,
    pub parallel: bool,
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Help,
    ListProvers,
    Version,
    Prove(ProveAction),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UsageError {
    #[error("unknown option `{0}`")]
    UnknownOption(String),
    #[error("`{0}` must be used alone")]
    NotAlone(String),
    #[error("option `{0}` needs a value")]
    MissingValue(String),
    #[error("invalid time limit `{0}`: expected a positive number of seconds")]
    BadTimeout(String),
    #[error("both a conjecture file `{0}` and --tgtp were given")]
    BothSources(String),
    #[error("no conjecture given")]
    NoConjecture,
    #[error("option `{0}` given twice")]
    Repeated(String),
}

fn parse_timeout(s: &str) -> Result<Duration, UsageError> {
    let secs: f64 = s.parse().map_err(|_| UsageError::BadTimeout(s.into()))?;
    if !secs.is_finite() || secs <= 0.0 {
        return Err(UsageError::BadTimeout(s.into()));
    }
    Ok(Duration::from_millis(((secs * 1000.0).round() as u64).max(1)))
}

fn looks_like_path(s: &str) -> bool {
    s.contains('.') || s.contains('/')
}

/// Interprets `ogp` arguments (without the program name).
pub fn dispatch(argv: &[String]) -> Result<Action, UsageError> {
    let mut standalone: Option<(Action, &str)> = None;
    let mut timeout = None;
    let mut tgtp = None;
    let mut parallel = false;
    let mut json = false;
    let mut i = 0;
    while i < argv.len() {
        let arg = argv[i].as_str();
        if !arg.starts_with('-') || arg == "-" {
            break;
        }
        i += 1;
        if arg == "--" {
            break;
        }
        let mut set_standalone = |a: Action| {
            if standalone.is_some() {
                return Err(UsageError::NotAlone(arg.to_string()));
            }
            standalone = Some((a, arg));
            Ok(())
        };
        match arg {
            "-h" | "--help" => set_standalone(Action::Help)?,
            "-p" | "--provers" => set_standalone(Action::ListProvers)?,
            "-V" | "--version" => set_standalone(Action::Version)?,
            "--parallel" => parallel = true,
            "--json" => json = true,
            "-t" | "--timeout" | "--tgtp" => {
                let value = argv.get(i).ok_or_else(|| UsageError::MissingValue(arg.into()))?;
                i += 1;
                if arg == "--tgtp" {
                    if tgtp.replace(value.clone()).is_some() {
                        return Err(UsageError::Repeated("--tgtp".into()));
                    }
                } else if timeout.replace(parse_timeout(value)?).is_some() {
                    return Err(UsageError::Repeated("-t".into()));
                }
            }
            _ => {
                if let Some(v) = arg.strip_prefix("--timeout=") {
                    if timeout.replace(parse_timeout(v)?).is_some() {
                        return Err(UsageError::Repeated("-t".into()));
                    }
                } else if let Some(v) = arg.strip_prefix("--tgtp=") {
                    if v.is_empty() {
                        return Err(UsageError::MissingValue("--tgtp".into()));
                    }
                    if tgtp.replace(v.to_string()).is_some() {
                        return Err(UsageError::Repeated("--tgtp".into()));
                    }
                } else if let Some(v) = arg.strip_prefix("-t").filter(|v| !v.is_empty() && !arg.starts_with("--")) {
                    if timeout.replace(parse_timeout(v)?).is_some() {
                        return Err(UsageError::Repeated("-t".into()));
                    }
                } else {
                    return Err(UsageError::UnknownOption(arg.into()));
                }
            }
        }
    }
    let rest = &argv[i..];
    if let Some((action, flag)) = standalone {
        if argv.len() > 1 {
            return Err(UsageError::NotAlone(flag.to_string()));
        }
        return Ok(action);
    }

    let (source, after) = match tgtp {
        Some(id) => {
            if let Some(first) = rest.first().filter(|f| looks_like_path(f)) {
                return Err(UsageError::BothSources(first.clone()));
            }
            (Source::Tgtp(id), rest)
        }
        None => {
            let (first, after) = rest.split_first().ok_or(UsageError::NoConjecture)?;
            (Source::File(PathBuf::from(first)), after)
        }
    };
    let (prover, prover_options) = match after.split_first() {
        Some((p, opts)) if !p.starts_with('-') => (Some(p.clone()), opts.to_vec()),
        _ => (None, after.to_vec()),
    };
    Ok(Action::Prove(ProveAction {
        source,
        prover,
        prover_options,
        timeout: timeout.unwrap_or(DEFAULT_TIMEOUT),
        parallel,
        json,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn prove(s: &str) -> ProveAction {
        match dispatch(&argv(s)).unwrap() {
            Action::Prove(p) => p,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn documented_examples() {
        let p = prove("ceva.gcl");
        assert_eq!(p.source, Source::File("ceva.gcl".into()));
        assert_eq!((p.prover, p.timeout), (None, DEFAULT_TIMEOUT));

        assert_eq!(prove("-t 30 ceva.fof").timeout, Duration::from_secs(30));
        assert_eq!(prove("--timeout=0.5 ceva.fof").timeout, Duration::from_millis(500));
        assert_eq!(prove("-t2 ceva.fof").timeout, Duration::from_secs(2));

        let p = prove("--tgtp=GEO0001 gclc");
        assert_eq!(p.source, Source::Tgtp("GEO0001".into()));
        assert_eq!(p.prover.as_deref(), Some("gclc"));

        let p = prove("ceva.gcl -w");
        assert_eq!(p.prover, None);
        assert_eq!(p.prover_options, ["-w"]);

        let p = prove("--parallel --json ceva.fof vampire --mode casc -t 5");
        assert!(p.parallel && p.json);
        assert_eq!(p.prover.as_deref(), Some("vampire"));
        assert_eq!(p.prover_options, ["--mode", "casc", "-t", "5"]);

        assert_eq!(prove("-- -odd.fof").source, Source::File("-odd.fof".into()));
        assert_eq!(prove("--tgtp GEO0002").source, Source::Tgtp("GEO0002".into()));
    }

    #[test]
    fn standalone_flags() {
        assert_eq!(dispatch(&argv("-h")), Ok(Action::Help));
        assert_eq!(dispatch(&argv("--provers")), Ok(Action::ListProvers));
        assert_eq!(dispatch(&argv("-V")), Ok(Action::Version));
        assert!(matches!(dispatch(&argv("-h ceva.gcl")), Err(UsageError::NotAlone(_))));
        assert!(matches!(dispatch(&argv("-t 3 -p")), Err(UsageError::NotAlone(_))));
        assert!(matches!(dispatch(&argv("-p -V")), Err(UsageError::NotAlone(_))));
    }

    #[test]
    fn errors() {
        assert_eq!(dispatch(&argv("-x ceva.gcl")), Err(UsageError::UnknownOption("-x".into())));
        for bad in ["-t abc ceva.fof", "-t 0 ceva.fof", "-t -3 ceva.fof", "--timeout=inf a.fof", "-t NaN a.fof"] {
            assert!(matches!(dispatch(&argv(bad)), Err(UsageError::BadTimeout(_))), "{bad}");
        }
        assert!(matches!(dispatch(&argv("-t")), Err(UsageError::MissingValue(_))));
        assert!(matches!(dispatch(&argv("--tgtp=GEO0001 ceva.gcl")), Err(UsageError::BothSources(_))));
        assert_eq!(dispatch(&[]), Err(UsageError::NoConjecture));
        assert!(matches!(dispatch(&argv("-t 1 -t 2 a.fof")), Err(UsageError::Repeated(_))));
    }
}
