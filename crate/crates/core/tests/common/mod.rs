//! A scripted HTTP server for exercising fetch paths against known
//! responses. Routes are keyed by (host, path) so one listener can stand
//! in for several loopback hosts at once.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

/// What to send back for one route.
#[derive(Debug, Clone)]
#[allow(dead_code)]
pub enum Reply {
    /// 200 with an HTML body.
    Html(String),
    /// 200 with a plain-text body (robots.txt and the like).
    Text(String),
    /// A bare status line with a one-word body.
    Status(u16),
    /// Accept, read the request, then sit silent for the given time and
    /// close without writing a byte.
    Stall(Duration),
}

pub struct ScriptedServer {
    pub port: u16,
    /// Every request seen, as (host, path), in arrival order.
    log: Arc<Mutex<Vec<(String, String)>>>,
    stop: Arc<AtomicBool>,
    accept_thread: Option<JoinHandle<()>>,
}

impl ScriptedServer {
    /// Binds an ephemeral port on all interfaces and serves the given
    /// routes until dropped. Unknown routes get a 404.
    pub fn start(routes: Vec<(String, String, Reply)>) -> ScriptedServer {
        let table: Arc<HashMap<(String, String), Reply>> = Arc::new(
            routes
                .into_iter()
                .map(|(host, path, reply)| ((host.to_ascii_lowercase(), path), reply))
                .collect(),
        );
        let listener = TcpListener::bind("0.0.0.0:0").expect("bind test server");
        let port = listener.local_addr().unwrap().port();
        listener.set_nonblocking(true).unwrap();

        let log: Arc<Mutex<Vec<(String, String)>>> = Arc::new(Mutex::new(Vec::new()));
        let stop = Arc::new(AtomicBool::new(false));

        let accept_log = Arc::clone(&log);
        let accept_stop = Arc::clone(&stop);
        let accept_thread = thread::spawn(move || {
            while !accept_stop.load(Ordering::Relaxed) {
                match listener.accept() {
                    Ok((stream, _)) => {
                        let table = Arc::clone(&table);
                        let log = Arc::clone(&accept_log);
                        // Connection threads are detached; a stalled
                        // route outliving the test is harmless.
                        thread::spawn(move || handle(stream, &table, &log));
                    }
                    Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                        thread::sleep(Duration::from_millis(3));
                    }
                    Err(_) => break,
                }
            }
        });

        ScriptedServer {
            port,
            log,
            stop,
            accept_thread: Some(accept_thread),
        }
    }

    #[allow(dead_code)]
    pub fn requests(&self) -> Vec<(String, String)> {
        self.log.lock().unwrap().clone()
    }
}

impl Drop for ScriptedServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        if let Some(handle) = self.accept_thread.take() {
            let _ = handle.join();
        }
    }
}

fn handle(mut stream: TcpStream, table: &HashMap<(String, String), Reply>, log: &Mutex<Vec<(String, String)>>) {
    stream.set_read_timeout(Some(Duration::from_secs(5))).ok();
    let Some((host, path)) = read_request(&mut stream) else {
        return;
    };
    log.lock().unwrap().push((host.clone(), path.clone()));

    let reply = table.get(&(host, path)).cloned().unwrap_or(Reply::Status(404));
    match reply {
        Reply::Html(body) => write_response(&mut stream, 200, "OK", "text/html; charset=utf-8", &body),
        Reply::Text(body) => write_response(&mut stream, 200, "OK", "text/plain; charset=utf-8", &body),
        Reply::Status(code) => {
            write_response(&mut stream, code, reason(code), "text/plain", "scripted\n");
        }
        Reply::Stall(wait) => {
            thread::sleep(wait);
        }
    }
}

/// Reads request headers and returns (host lowercased without port, path
/// without query). None when the request is unparseable.
fn read_request(stream: &mut TcpStream) -> Option<(String, String)> {
    let mut buf = Vec::with_capacity(1024);
    let mut chunk = [0u8; 512];
    while !buf.windows(4).any(|w| w == b"\r\n\r\n") {
        match stream.read(&mut chunk) {
            Ok(0) => break,
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
            Err(_) => return None,
        }
        if buf.len() > 16 * 1024 {
            return None;
        }
    }
    let head = String::from_utf8_lossy(&buf);
    let mut lines = head.lines();
    let request_line = lines.next()?;
    let target = request_line.split_whitespace().nth(1)?;
    let path = target.split('?').next().unwrap_or(target).to_string();
    let mut host = String::new();
    for line in lines {
        if let Some(value) = line.strip_prefix("Host:").or_else(|| line.strip_prefix("host:")) {
            host = value.trim().to_ascii_lowercase();
            if let Some((name, _port)) = host.rsplit_once(':') {
                host = name.to_string();
            }
            break;
        }
    }
    Some((host, path))
}

fn write_response(stream: &mut TcpStream, code: u16, reason: &str, content_type: &str, body: &str) {
    let response = format!(
        "HTTP/1.1 {code} {reason}\r\nContent-Type: {content_type}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len(),
    );
    let _ = stream.write_all(response.as_bytes());
    let _ = stream.flush();
}

fn reason(code: u16) -> &'static str {
    match code {
        200 => "OK",
        404 => "Not Found",
        405 => "Method Not Allowed",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Scripted",
    }
}
