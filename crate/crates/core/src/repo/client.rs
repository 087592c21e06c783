use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::protocol::{ErrorCode, QueryRequest, QueryResponse, ResponseStatus};
use crate::format::Format;

pub const DEFAULT_PORT: u16 = 7331;
pub const DEFAULT_ENDPOINT: &str = "127.0.0.1:7331";
pub const ENDPOINT_ENV: &str = "OGP_TGTP_ENDPOINT";

#[derive(Debug, Error)]
pub enum ClientError {
    /// The server could not be reached or did not answer in time.
    #[error("repository at {endpoint} unreachable: {message}")]
    Transport { endpoint: String, message: String },
    #[error("repository error {}: {message}", code.as_str())]
    Server { code: ErrorCode, message: String },
    #[error("malformed repository response: {0}")]
    Protocol(String),
}

/// `OGP_TGTP_ENDPOINT`, else the default local endpoint.
pub fn endpoint_from_env() -> String {
    std::env::var(ENDPOINT_ENV).ok().filter(|s| !s.is_empty()).unwrap_or_else(|| DEFAULT_ENDPOINT.to_string())
}

fn exchange(endpoint: &str, req: &QueryRequest, timeout: Duration) -> Result<QueryResponse, ClientError> {
    let transport = |message: String| ClientError::Transport { endpoint: endpoint.to_string(), message };
    let deadline = Instant::now() + timeout;
    let addrs: Vec<_> = endpoint.to_socket_addrs().map_err(|e| transport(e.to_string()))?.collect();
    let mut last = "no address".to_string();
    let mut stream = None;
    for addr in addrs {
        let left = deadline.saturating_duration_since(Instant::now());
        if left.is_zero() {
            last = "timed out".into();
            break;
        }
        match TcpStream::connect_timeout(&addr, left) {
            Ok(s) => {
                stream = Some(s);
                break;
            }
            Err(e) => last = e.to_string(),
        }
    }
    let mut stream = stream.ok_or_else(|| transport(last))?;
    let left = deadline.saturating_duration_since(Instant::now()).max(Duration::from_millis(1));
    stream.set_read_timeout(Some(left)).map_err(|e| transport(e.to_string()))?;
    stream.set_write_timeout(Some(left)).map_err(|e| transport(e.to_string()))?;
    let mut line = req.to_line();
    line.push('\n');
    stream.write_all(line.as_bytes()).map_err(|e| transport(e.to_string()))?;
    let mut reply = String::new();
    BufReader::new(&stream).read_line(&mut reply).map_err(|e| transport(e.to_string()))?;
    if reply.is_empty() {
        return Err(transport("connection closed without a response".into()));
    }
    let resp: QueryResponse = serde_json::from_str(reply.trim_end()).map_err(|e| ClientError::Protocol(e.to_string()))?;
    if resp.status == ResponseStatus::Error {
        return Err(ClientError::Server {
            code: resp.code.ok_or_else(|| ClientError::Protocol("error without code".into()))?,
            message: resp.message.unwrap_or_default(),
        });
    }
    Ok(resp)
}

/// Fetches a problem; the returned format is what the server sent, which
/// is FOF when the requested format is not stored.
pub fn client_get(endpoint: &str, id: &str, format: Format, timeout: Duration) -> Result<(Format, String), ClientError> {
    let resp = exchange(endpoint, &QueryRequest::Get { id: id.to_string(), format }, timeout)?;
    match (resp.format, resp.content) {
        (Some(f), Some(c)) if !c.is_empty() => {
            if f != format && f != Format::Fof {
                return Err(ClientError::Protocol(format!("asked for {format}, got {f}")));
            }
            Ok((f, c))
        }
        _ => Err(ClientError::Protocol("ok response without format or content".into())),
    }
}

pub fn client_list(endpoint: &str, timeout: Duration) -> Result<Vec<String>, ClientError> {
    exchange(endpoint, &QueryRequest::List, timeout)?
        .ids
        .ok_or_else(|| ClientError::Protocol("list response without ids".into()))
}
