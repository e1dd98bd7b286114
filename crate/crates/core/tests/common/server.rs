//! A scripted chat-completions server on a local port.

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};

pub type Responder = Box<dyn Fn(&str) -> (u16, String) + Send + Sync>;

pub struct Server {
    pub endpoint: String,
    /// Request bodies in arrival order.
    pub requests: Arc<Mutex<Vec<serde_json::Value>>>,
    /// Authorization header of each request, if any.
    pub auth: Arc<Mutex<Vec<Option<String>>>>,
}

impl Server {
    pub fn count(&self) -> usize {
        self.requests.lock().unwrap().len()
    }
}

pub fn chat_body(content: &str) -> String {
    serde_json::json!({ "choices": [{ "message": { "role": "assistant", "content": content } }] }).to_string()
}

/// Answers with the queued (status, body) pairs first, then with
/// `fallback(prompt)`.
pub fn serve(script: Vec<(u16, String)>, fallback: Responder) -> Server {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let requests = Arc::new(Mutex::new(Vec::new()));
    let auth = Arc::new(Mutex::new(Vec::new()));
    let script = Arc::new(Mutex::new(VecDeque::from(script)));
    let fallback = Arc::new(fallback);
    let (r, a) = (requests.clone(), auth.clone());
    std::thread::spawn(move || {
        for stream in listener.incoming().flatten() {
            let (r, a, script, fallback) = (r.clone(), a.clone(), script.clone(), fallback.clone());
            std::thread::spawn(move || {
                let _ = handle(stream, &r, &a, &script, &*fallback);
            });
        }
    });
    Server {
        endpoint: format!("http://{addr}/v1/chat/completions"),
        requests,
        auth,
    }
}

/// Echoes the prompt text back as the completion.
pub fn echo_server() -> Server {
    serve(Vec::new(), Box::new(|p| (200, chat_body(p))))
}

fn handle(
    mut stream: TcpStream,
    requests: &Mutex<Vec<serde_json::Value>>,
    auth: &Mutex<Vec<Option<String>>>,
    script: &Mutex<VecDeque<(u16, String)>>,
    fallback: &(dyn Fn(&str) -> (u16, String) + Send + Sync),
) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut length = 0usize;
    let mut bearer = None;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap_or(0);
            }
            if k.eq_ignore_ascii_case("authorization") {
                bearer = Some(v.trim().to_string());
            }
        }
    }
    let mut body = vec![0; length];
    reader.read_exact(&mut body)?;
    let request: serde_json::Value = serde_json::from_slice(&body).unwrap_or_default();
    let prompt = request["messages"][0]["content"].as_str().unwrap_or_default().to_string();
    requests.lock().unwrap().push(request);
    auth.lock().unwrap().push(bearer);
    let next = script.lock().unwrap().pop_front();
    let (status, reply) = next.unwrap_or_else(|| fallback(&prompt));
    write!(
        stream,
        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
        reply.len()
    )?;
    stream.flush()
}
