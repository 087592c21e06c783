use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use super::protocol::{ErrorCode, QueryRequest, QueryResponse};
use super::store::{Store, StoreError};

/// Longest accepted request line.
pub const MAX_REQUEST: usize = 64 * 1024;
const IO_TIMEOUT: Duration = Duration::from_secs(10);

pub fn answer(store: &Store, line: &[u8]) -> QueryResponse {
    match QueryRequest::decode(line) {
        Err(msg) => QueryResponse::error(ErrorCode::BadRequest, msg),
        Ok(QueryRequest::List) => QueryResponse::list(store.ids()),
        Ok(QueryRequest::Get { id, format }) => match store.get(&id, format) {
            Ok((f, content)) => QueryResponse::problem(&id, f, content),
            Err(e @ StoreError::NotFound(_)) => QueryResponse::error(ErrorCode::NotFound, e.to_string()),
            Err(e) => QueryResponse::error(ErrorCode::Internal, e.to_string()),
        },
    }
}

/// Reads up to the first newline (or end of stream). `None` when the line
/// is longer than `MAX_REQUEST`.
fn read_request(stream: &TcpStream) -> io::Result<Option<Vec<u8>>> {
    let mut reader = BufReader::new(stream).take(MAX_REQUEST as u64 + 1);
    let mut line = Vec::new();
    reader.read_until(b'\n', &mut line)?;
    if line.last() == Some(&b'\n') {
        line.pop();
        if line.last() == Some(&b'\r') {
            line.pop();
        }
    } else if line.len() > MAX_REQUEST {
        return Ok(None);
    }
    Ok(Some(line))
}

fn handle(store: &Store, mut stream: TcpStream) -> io::Result<()> {
    stream.set_read_timeout(Some(IO_TIMEOUT))?;
    stream.set_write_timeout(Some(IO_TIMEOUT))?;
    let response = match read_request(&stream) {
        Ok(Some(line)) => answer(store, &line),
        Ok(None) => QueryResponse::error(ErrorCode::BadRequest, format!("request longer than {MAX_REQUEST} bytes")),
        Err(e) => QueryResponse::error(ErrorCode::BadRequest, format!("cannot read request: {e}")),
    };
    let mut out = response.to_line();
    out.push('\n');
    stream.write_all(out.as_bytes())?;
    stream.flush()?;
    let _ = stream.shutdown(std::net::Shutdown::Both);
    Ok(())
}

pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting and waits for the accept loop to end.
    pub fn shutdown(mut self) {
        self.stop_inner();
    }

    /// Blocks for the server's lifetime.
    pub fn join(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    fn stop_inner(&mut self) {
        if let Some(t) = self.thread.take() {
            self.stop.store(true, Ordering::SeqCst);
            // Unblock accept().
            let _ = TcpStream::connect_timeout(&self.addr, Duration::from_secs(1));
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_inner();
    }
}

/// Binds and serves on a background thread, one thread per connection.
pub fn serve(store: Arc<Store>, bind: &str, port: u16) -> io::Result<ServerHandle> {
    let listener = TcpListener::bind((bind, port))?;
    let addr = listener.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let flag = stop.clone();
    let thread = thread::spawn(move || {
        for conn in listener.incoming() {
            if flag.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = conn else { continue };
            let store = store.clone();
            thread::spawn(move || {
                let _ = handle(&store, stream);
            });
        }
    });
    Ok(ServerHandle { addr, stop, thread: Some(thread) })
}
