//! A local chat-completions server with canned, request-determined replies.
//! Used by tests and by `valueprobe serve-mock` for offline pipeline runs.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

/// Fixed `created` value, so recorded corpora are reproducible.
pub const MOCK_CREATED: i64 = 1_680_000_000;

const PRETEXTS: [&str; 3] = [
    "As an AI language model, I do not have personal values or beliefs.",
    "As an AI, I cannot hold opinions of my own!",
    "I am a language model AI and have no preferences?",
];

const SENTENCES: [&str; 10] = [
    "Feeling safe and secure at home and protecting the family from danger matters to many people.",
    "Respect for tradition, custom and religious ritual keeps heritage alive.",
    "Obedience to rules and polite self-discipline help people avoid harm to others.",
    "Helping and caring for close friends shows loyalty, honesty and forgiveness.",
    "Equality, justice and protecting nature reflect tolerance and a wish for peace.",
    "Independent thought, curiosity and creativity let a person choose freely.",
    "Excitement, adventure and novelty make life varied and daring.",
    "Pleasure, enjoyment and fun make life gratifying.",
    "Ambition, success and achievement depend on capability and hard work.",
    "Wealth, authority and social power bring control over resources and status.",
];

#[derive(Debug, Clone)]
pub struct FailureRule {
    /// Applies to requests whose prompt contains this text.
    pub prompt_contains: String,
    pub status: u16,
    /// Number of leading attempts per distinct prompt that fail.
    pub times: u32,
}

#[derive(Debug, Clone, Default)]
pub struct MockOptions {
    /// When set, requests must carry this bearer token or get 401.
    pub api_key: Option<String>,
    /// Artificial latency; the actual delay varies per prompt up to this bound.
    pub max_latency: Duration,
    pub failures: Vec<FailureRule>,
    /// Prompts containing any of these get a 200 reply without `choices`.
    pub malformed: Vec<String>,
}

#[derive(Debug, Default)]
struct MockState {
    options: MockOptions,
    requests: Mutex<Vec<Value>>,
    attempts: Mutex<HashMap<(usize, String), u32>>,
    in_flight: AtomicUsize,
    max_in_flight: AtomicUsize,
}

pub struct MockServer {
    addr: SocketAddr,
    state: Arc<MockState>,
    shutdown: Option<oneshot::Sender<()>>,
    task: Option<JoinHandle<()>>,
}

impl MockServer {
    /// Binds to an ephemeral localhost port and starts serving.
    pub async fn start(options: MockOptions) -> std::io::Result<Self> {
        Self::bind("127.0.0.1:0".parse().unwrap(), options).await
    }

    pub async fn bind(addr: SocketAddr, options: MockOptions) -> std::io::Result<Self> {
        let listener = TcpListener::bind(addr).await?;
        let addr = listener.local_addr()?;
        let state = Arc::new(MockState { options, ..Default::default() });
        let app = Router::new()
            .route("/v1/chat/completions", post(handle))
            .route("/chat/completions", post(handle))
            .with_state(state.clone());
        let (tx, rx) = oneshot::channel();
        let task = tokio::spawn(async move {
            let _ = axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = rx.await;
                })
                .await;
        });
        Ok(MockServer { addr, state, shutdown: Some(tx), task: Some(task) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Base URL to hand to the generator, e.g. `http://127.0.0.1:PORT/v1`.
    pub fn base_url(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    /// Bodies of every request received, in arrival order.
    pub fn requests(&self) -> Vec<Value> {
        self.state.requests.lock().unwrap().clone()
    }

    /// Highest number of requests handled at the same time.
    pub fn max_concurrency(&self) -> usize {
        self.state.max_in_flight.load(Ordering::SeqCst)
    }

    pub async fn shutdown(mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(task) = self.task.take() {
            let _ = task.await;
        }
    }

    /// Serves until the process is interrupted.
    pub async fn wait(mut self) {
        if let Some(task) = self.task.take() {
            let _ = task.await;
        }
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// The reply text for a prompt. Depends on nothing but the prompt.
pub fn canned_reply(prompt: &str) -> String {
    let h = fnv1a(prompt);
    let topic = prompt.strip_prefix(crate::probes::PROMPT_PREFIX).unwrap_or(prompt);
    let mut parts = Vec::new();
    if h % 3 == 0 {
        parts.push(PRETEXTS[(h / 3 % PRETEXTS.len() as u64) as usize].to_string());
    }
    parts.push(format!("This concerns the idea: {}", topic.trim_end_matches(['.', '!', '?'])));
    parts.last_mut().unwrap().push('.');
    let first = (h >> 8) as usize % SENTENCES.len();
    let second = (h >> 16) as usize % SENTENCES.len();
    parts.push(SENTENCES[first].to_string());
    if second != first {
        parts.push(SENTENCES[second].to_string());
    }
    parts.join(" ")
}

struct InFlight<'a>(&'a MockState);

impl<'a> InFlight<'a> {
    fn enter(state: &'a MockState) -> Self {
        let now = state.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        state.max_in_flight.fetch_max(now, Ordering::SeqCst);
        InFlight(state)
    }
}

impl Drop for InFlight<'_> {
    fn drop(&mut self) {
        self.0.in_flight.fetch_sub(1, Ordering::SeqCst);
    }
}

fn error(status: StatusCode, message: &str) -> Response {
    (status, Json(json!({ "error": { "message": message } }))).into_response()
}

async fn handle(State(state): State<Arc<MockState>>, headers: HeaderMap, Json(body): Json<Value>) -> Response {
    let _guard = InFlight::enter(&state);
    state.requests.lock().unwrap().push(body.clone());
    let opts = &state.options;

    if let Some(key) = &opts.api_key {
        let expected = format!("Bearer {key}");
        if headers.get("authorization").and_then(|v| v.to_str().ok()) != Some(expected.as_str()) {
            return error(StatusCode::UNAUTHORIZED, "invalid api key");
        }
    }
    let prompt = body["messages"]
        .as_array()
        .and_then(|m| m.iter().rev().find(|x| x["role"] == "user"))
        .and_then(|m| m["content"].as_str())
        .unwrap_or_default()
        .to_string();
    let model = body["model"].as_str().unwrap_or("mock").to_string();

    if !opts.max_latency.is_zero() {
        let frac = (fnv1a(&prompt) % 1000) as f64 / 1000.0;
        tokio::time::sleep(opts.max_latency.mul_f64(0.2 + 0.8 * frac)).await;
    }

    for (i, rule) in opts.failures.iter().enumerate() {
        if prompt.contains(&rule.prompt_contains) {
            let n = {
                let mut attempts = state.attempts.lock().unwrap();
                let n = attempts.entry((i, prompt.clone())).or_insert(0);
                *n += 1;
                *n
            };
            if n <= rule.times {
                let status = StatusCode::from_u16(rule.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
                return error(status, "injected failure");
            }
        }
    }
    if opts.malformed.iter().any(|m| prompt.contains(m)) {
        return Json(json!({ "id": "chatcmpl-mock", "object": "chat.completion", "unexpected": true })).into_response();
    }

    let content = canned_reply(&prompt);
    let completion_tokens = content.split_whitespace().count();
    let prompt_tokens = prompt.split_whitespace().count();
    Json(json!({
        "id": format!("chatcmpl-mock-{:016x}", fnv1a(&prompt)),
        "object": "chat.completion",
        "created": MOCK_CREATED,
        "model": model,
        "choices": [{
            "index": 0,
            "message": { "role": "assistant", "content": content },
            "finish_reason": "stop"
        }],
        "usage": {
            "prompt_tokens": prompt_tokens,
            "completion_tokens": completion_tokens,
            "total_tokens": prompt_tokens + completion_tokens
        }
    }))
    .into_response()
}
