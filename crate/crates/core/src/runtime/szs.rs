use crate::report::Status;

/// Reads an SZS status line and a `% Time elapsed: <x> s` line. The first
/// occurrence of each wins.
pub fn postprocess_szs(raw: &str) -> (Status, Option<u64>) {
    let mut status = None;
    let mut time = None;
    for line in raw.lines() {
        let line = line.trim();
        if status.is_none() {
            if let Some(rest) = line.strip_prefix("% SZS status ") {
                status = rest.split_whitespace().next().map(szs_verdict);
            }
        }
        if time.is_none() {
            if let Some(rest) = line.strip_prefix("% Time elapsed:") {
                time = rest
                    .trim()
                    .strip_suffix('s')
                    .and_then(|x| x.trim().parse::<f64>().ok())
                    .filter(|x| x.is_finite() && *x >= 0.0)
                    .map(|x| (x * 1000.0).round() as u64);
            }
        }
    }
    (status.unwrap_or(Status::Unknown), time)
}

fn szs_verdict(word: &str) -> Status {
    match word {
        "Theorem" => Status::Proved,
        "CounterSatisfiable" => Status::Disproved,
        "Timeout" => Status::Timeout,
        "MemoryOut" | "ResourceOut" => Status::ResourceOut,
        "Error" | "OSError" | "InputError" | "SyntaxError" => Status::Error,
        _ => Status::Unknown,
    }
}
