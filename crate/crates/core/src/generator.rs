//! Collecting model responses to a probe set from an OpenAI-compatible
//! chat-completions endpoint.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Duration;

use futures::stream::{self, StreamExt};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::probes::{clean_response, ProbeKind, ProbeSet};

/// Environment variable holding the endpoint credential.
pub const API_KEY_ENV: &str = "VALUEPROBE_API_KEY";
pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";

#[derive(Debug, thiserror::Error)]
pub enum GenerationError {
    #[error("invalid generation config: {0}")]
    Config(String),
    #[error("endpoint rejected the credential (HTTP {status}): {body}")]
    Auth { status: u16, body: String },
    #[error("HTTP client setup failed: {0}")]
    Client(#[from] reqwest::Error),
    #[error("writing corpus: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    /// Delay before the first retry; doubles on each further attempt.
    #[serde(with = "millis")]
    pub base_delay: Duration,
    #[serde(with = "millis")]
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay: Duration::from_secs(1),
            max_delay: Duration::from_secs(60),
        }
    }
}

impl RetryPolicy {
    /// Backoff before retry number `retry` (1-based), with up to 25% jitter.
    pub fn delay(&self, retry: u32) -> Duration {
        let exp = self.base_delay.saturating_mul(1u32 << (retry.saturating_sub(1)).min(20));
        let capped = exp.min(self.max_delay);
        let jitter: f64 = rand::rng().random_range(0.0..0.25);
        capped.mul_f64(1.0 + jitter)
    }
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub model: String,
    pub max_tokens: u32,
    pub temperature: f64,
    pub top_p: f64,
    pub runs_per_prompt: u32,
    pub base_url: String,
    pub max_in_flight: usize,
    #[serde(with = "millis")]
    pub request_timeout: Duration,
    pub retry: RetryPolicy,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            model: "gpt-3.5-turbo".into(),
            max_tokens: 300,
            temperature: 1.0,
            top_p: 1.0,
            runs_per_prompt: 5,
            base_url: DEFAULT_BASE_URL.into(),
            max_in_flight: 4,
            request_timeout: Duration::from_secs(120),
            retry: RetryPolicy::default(),
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<(), GenerationError> {
        let bad = |m: &str| Err(GenerationError::Config(m.into()));
        if self.model.trim().is_empty() {
            return bad("model must not be empty");
        }
        if self.max_tokens == 0 {
            return bad("max_tokens must be positive");
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be a finite value >= 0");
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return bad("top_p must lie in (0, 1]");
        }
        if self.runs_per_prompt == 0 {
            return bad("runs_per_prompt must be positive");
        }
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be positive");
        }
        if self.retry.max_attempts == 0 {
            return bad("retry.max_attempts must be positive");
        }
        if !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://")) {
            return bad("base_url must be an http(s) URL");
        }
        Ok(())
    }

    pub fn request_params(&self) -> RequestParams {
        RequestParams {
            model: self.model.clone(),
            max_tokens: self.max_tokens,
            temperature: self.temperature,
            top_p: self.top_p,
        }
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestParams {
    pub model: String,
    pub max_tokens: u32,
    pub temperature: f64,
    pub top_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
    pub total_tokens: Option<u64>,
}

/// One line of a corpus file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub probe_kind: ProbeKind,
    pub fine_type_id: String,
    pub prompt_index: usize,
    pub prompt_text: String,
    pub run_index: u32,
    pub status: RecordStatus,
    pub raw_text: String,
    pub cleaned_text: String,
    /// Model name reported by the endpoint.
    pub model: Option<String>,
    pub request: RequestParams,
    /// Server-side `created` time (Unix seconds).
    pub timestamp: Option<i64>,
    pub finish_reason: Option<String>,
    pub usage: Option<Usage>,
    pub attempts: u32,
    pub error: Option<String>,
    /// Response body kept for failed records.
    pub payload: Option<String>,
}

impl ResponseRecord {
    pub fn is_ok(&self) -> bool {
        self.status == RecordStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedRequest {
    pub prompt_index: usize,
    pub run_index: u32,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub prompts: usize,
    pub requested: usize,
    pub succeeded: usize,
    pub failed: usize,
    pub failures: Vec<FailedRequest>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("corpus line {line}: {message}")]
pub struct CorpusError {
    pub line: usize,
    pub message: String,
}

pub fn parse_corpus(source: &str) -> Result<Vec<ResponseRecord>, CorpusError> {
    source
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CorpusError { line: i + 1, message: e.to_string() })
        })
        .collect()
}

pub fn write_record<W: Write>(out: &mut W, record: &ResponseRecord) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")
}

/// Holds out-of-order results until every earlier index has arrived.
#[derive(Debug)]
pub struct ReorderBuffer<T> {
    next: usize,
    pending: BTreeMap<usize, T>,
}

impl<T> Default for ReorderBuffer<T> {
    fn default() -> Self {
        ReorderBuffer { next: 0, pending: BTreeMap::new() }
    }
}

impl<T> ReorderBuffer<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accepts item `index` and returns every item now releasable, in order.
    pub fn push(&mut self, index: usize, item: T) -> Vec<T> {
        assert!(index >= self.next && !self.pending.contains_key(&index), "index {index} pushed twice");
        self.pending.insert(index, item);
        let mut ready = Vec::new();
        while let Some(item) = self.pending.remove(&self.next) {
            ready.push(item);
            self.next += 1;
        }
        ready
    }

    pub fn pending(&self) -> usize {
        self.pending.len()
    }
}

enum Attempt {
    Done(Value),
    Retry(String),
    Permanent { error: String, payload: Option<String> },
    Auth { status: u16, body: String },
}

async fn attempt(client: &reqwest::Client, url: &str, key: &str, body: &Value) -> Attempt {
    let resp = match client.post(url).bearer_auth(key).json(body).send().await {
        Ok(r) => r,
        Err(e) => return Attempt::Retry(format!("request failed: {e}")),
    };
    let status = resp.status();
    let text = match resp.text().await {
        Ok(t) => t,
        Err(e) => return Attempt::Retry(format!("reading response: {e}")),
    };
    match status.as_u16() {
        200..=299 => match serde_json::from_str::<Value>(&text) {
            Ok(v) => Attempt::Done(v),
            Err(e) => Attempt::Permanent { error: format!("malformed response: {e}"), payload: Some(text) },
        },
        s @ (401 | 403) => Attempt::Auth { status: s, body: text },
        s @ (408 | 429 | 500..=599) => Attempt::Retry(format!("HTTP {s}")),
        s => Attempt::Permanent { error: format!("HTTP {s}"), payload: Some(text) },
    }
}

struct Job<'a> {
    kind: ProbeKind,
    prompt_index: usize,
    run_index: u32,
    fine_type_id: &'a str,
    prompt_text: &'a str,
}

async fn run_job(
    client: &reqwest::Client,
    config: &GenerationConfig,
    key: &str,
    job: Job<'_>,
) -> Result<ResponseRecord, GenerationError> {
    let body = json!({
        "model": config.model,
        "messages": [{ "role": "user", "content": job.prompt_text }],
        "max_tokens": config.max_tokens,
        "temperature": config.temperature,
        "top_p": config.top_p,
    });
    let url = config.endpoint();
    let mut record = ResponseRecord {
        probe_kind: job.kind,
        fine_type_id: job.fine_type_id.to_string(),
        prompt_index: job.prompt_index,
        prompt_text: job.prompt_text.to_string(),
        run_index: job.run_index,
        status: RecordStatus::Failed,
        raw_text: String::new(),
        cleaned_text: String::new(),
        model: None,
        request: config.request_params(),
        timestamp: None,
        finish_reason: None,
        usage: None,
        attempts: 0,
        error: None,
        payload: None,
    };
    loop {
        record.attempts += 1;
        match attempt(client, &url, key, &body).await {
            Attempt::Done(v) => {
                fill_from_response(&mut record, v);
                return Ok(record);
            }
            Attempt::Auth { status, body } => return Err(GenerationError::Auth { status, body }),
            Attempt::Permanent { error, payload } => {
                record.error = Some(error);
                record.payload = payload;
                return Ok(record);
            }
            Attempt::Retry(error) => {
                if record.attempts >= config.retry.max_attempts {
                    record.error = Some(format!("{error} after {} attempts", record.attempts));
                    return Ok(record);
                }
                log::warn!(
                    "prompt {} run {}: {error}; retrying",
                    job.prompt_index,
                    job.run_index
                );
                tokio::time::sleep(config.retry.delay(record.attempts)).await;
            }
        }
    }
}

fn fill_from_response(record: &mut ResponseRecord, v: Value) {
    let choice = &v["choices"][0];
    let Some(content) = choice["message"]["content"].as_str() else {
        record.error = Some("malformed response: no choices[0].message.content".into());
        record.payload = Some(v.to_string());
        return;
    };
    record.status = RecordStatus::Ok;
    record.raw_text = content.to_string();
    record.cleaned_text = clean_response(content);
    record.model = v["model"].as_str().map(str::to_string);
    record.timestamp = v["created"].as_i64();
    record.finish_reason = choice["finish_reason"].as_str().map(str::to_string);
    record.usage = v.get("usage").and_then(|u| serde_json::from_value(u.clone()).ok());
}

/// Sends every prompt `runs_per_prompt` times and writes one record per
/// request to `sink`, ordered by prompt then run regardless of completion
/// order. Failed requests are written as failed records. An authentication
/// rejection aborts the run.
pub async fn run_probes<W: Write>(
    probes: &ProbeSet,
    config: &GenerationConfig,
    api_key: &str,
    sink: &mut W,
) -> Result<CorpusSummary, GenerationError> {
    config.validate()?;
    let client = reqwest::Client::builder().timeout(config.request_timeout).build()?;
    let runs = config.runs_per_prompt;
    let jobs = probes.prompts.iter().enumerate().flat_map(|(pi, p)| {
        (0..runs).map(move |r| Job {
            kind: probes.kind,
            prompt_index: pi,
            run_index: r,
            fine_type_id: &p.fine_type_id,
            prompt_text: &p.text,
        })
    });
    let mut completions = stream::iter(jobs.enumerate())
        .map(|(seq, job)| {
            let client = &client;
            async move { (seq, run_job(client, config, api_key, job).await) }
        })
        .buffer_unordered(config.max_in_flight);

    let mut summary = CorpusSummary { prompts: probes.prompts.len(), ..Default::default() };
    let mut reorder = ReorderBuffer::new();
    while let Some((seq, result)) = completions.next().await {
        let record = result?;
        for rec in reorder.push(seq, record) {
            summary.requested += 1;
            if rec.is_ok() {
                summary.succeeded += 1;
            } else {
                summary.failed += 1;
                summary.failures.push(FailedRequest {
                    prompt_index: rec.prompt_index,
                    run_index: rec.run_index,
                    error: rec.error.clone().unwrap_or_default(),
                });
            }
            write_record(sink, &rec)?;
        }
    }
    sink.flush()?;
    Ok(summary)
}
