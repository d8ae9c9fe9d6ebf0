use std::time::Duration;

use valueprobe::generator::{parse_corpus, run_probes, GenerationConfig, GenerationError, RecordStatus, RetryPolicy};
use valueprobe::mock::{FailureRule, MockOptions, MockServer};
use valueprobe::probes::{build_probes, clean_response, ProbeKind, ValueSpec, PROMPT_PREFIX};

const KEY: &str = "test-key";

fn spec() -> ValueSpec {
    ValueSpec::from_json(include_str!("../../../data/valuespec.example.json")).unwrap()
}

fn config(base_url: String) -> GenerationConfig {
    GenerationConfig {
        base_url,
        max_in_flight: 6,
        retry: RetryPolicy {
            max_attempts: 5,
            base_delay: Duration::from_millis(5),
            max_delay: Duration::from_millis(40),
        },
        ..Default::default()
    }
}

async fn generate(kind: ProbeKind, opts: MockOptions) -> (Vec<u8>, Result<valueprobe::CorpusSummary, GenerationError>, MockServer) {
    let server = MockServer::start(opts).await.unwrap();
    let probes = build_probes(&spec(), kind).unwrap();
    let mut out = Vec::new();
    let res = run_probes(&probes, &config(server.base_url()), KEY, &mut out).await;
    (out, res, server)
}

#[tokio::test]
async fn record_counts_per_probe_kind() {
    for (kind, expected) in [(ProbeKind::Item, 285), (ProbeKind::Definition, 95), (ProbeKind::Name, 95)] {
        let (out, res, server) = generate(kind, MockOptions::default()).await;
        let summary = res.unwrap();
        assert_eq!((summary.requested, summary.succeeded, summary.failed), (expected, expected, 0));
        let records = parse_corpus(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(records.len(), expected);
        assert_eq!(server.requests().len(), expected);
        server.shutdown().await;
    }
}

#[tokio::test]
async fn requests_carry_sampling_parameters_and_no_system_message() {
    let (_, res, server) = generate(ProbeKind::Name, MockOptions::default()).await;
    res.unwrap();
    for body in server.requests() {
        assert_eq!(body["model"], "gpt-3.5-turbo");
        assert_eq!(body["max_tokens"], 300);
        assert_eq!(body["temperature"], 1.0);
        assert_eq!(body["top_p"], 1.0);
        let msgs = body["messages"].as_array().unwrap();
        assert_eq!(msgs.len(), 1);
        assert_eq!(msgs[0]["role"], "user");
        assert!(msgs[0]["content"].as_str().unwrap().starts_with(PROMPT_PREFIX));
    }
}

#[tokio::test]
async fn records_are_ordered_by_prompt_then_run() {
    let opts = MockOptions { max_latency: Duration::from_millis(15), ..Default::default() };
    let (out, res, server) = generate(ProbeKind::Definition, opts).await;
    res.unwrap();
    let records = parse_corpus(std::str::from_utf8(&out).unwrap()).unwrap();
    let keys: Vec<(usize, u32)> = records.iter().map(|r| (r.prompt_index, r.run_index)).collect();
    let expected: Vec<(usize, u32)> = (0..19).flat_map(|p| (0..5).map(move |r| (p, r))).collect();
    assert_eq!(keys, expected);
    let c = server.max_concurrency();
    assert!(c <= 6, "max concurrency {c}");
    assert!(c > 1, "requests were never concurrent");
}

#[tokio::test]
async fn cleaned_text_is_derived_from_raw_text() {
    let (out, res, _server) = generate(ProbeKind::Item, MockOptions::default()).await;
    res.unwrap();
    let records = parse_corpus(std::str::from_utf8(&out).unwrap()).unwrap();
    let mut stripped = 0;
    for r in &records {
        assert_eq!(r.cleaned_text, clean_response(&r.raw_text));
        if r.cleaned_text != r.raw_text {
            stripped += 1;
            assert!(!r.cleaned_text.contains("AI"));
        }
    }
    assert!(stripped > 0);
}

#[tokio::test]
async fn transient_failures_are_retried() {
    let opts = MockOptions {
        failures: vec![
            FailureRule { prompt_contains: "Hedonism".into(), status: 429, times: 2 },
            FailureRule { prompt_contains: "Stimulation".into(), status: 503, times: 1 },
        ],
        ..Default::default()
    };
    let (out, res, _server) = generate(ProbeKind::Name, opts).await;
    let summary = res.unwrap();
    assert_eq!(summary.failed, 0);
    let records = parse_corpus(std::str::from_utf8(&out).unwrap()).unwrap();
    let retried: Vec<u32> = records.iter().filter(|r| r.fine_type_id == "Hedonism").map(|r| r.attempts).collect();
    // the failure counter is per prompt, so the first requests to arrive absorb it
    assert_eq!(retried.iter().map(|a| a - 1).sum::<u32>(), 2);
}

#[tokio::test]
async fn exhausted_retries_are_recorded_not_dropped() {
    let opts = MockOptions {
        failures: vec![FailureRule { prompt_contains: "Achievement".into(), status: 500, times: 1000 }],
        ..Default::default()
    };
    let (out, res, _server) = generate(ProbeKind::Name, opts).await;
    let summary = res.unwrap();
    assert_eq!((summary.requested, summary.failed), (95, 5));
    let records = parse_corpus(std::str::from_utf8(&out).unwrap()).unwrap();
    for r in records.iter().filter(|r| r.fine_type_id == "Achievement") {
        assert_eq!(r.status, RecordStatus::Failed);
        assert_eq!(r.attempts, 5);
        assert!(r.error.as_deref().unwrap().contains("HTTP 500"));
    }
}

#[tokio::test]
async fn malformed_responses_keep_the_payload() {
    let opts = MockOptions { malformed: vec!["Tradition".into()], ..Default::default() };
    let (out, res, _server) = generate(ProbeKind::Name, opts).await;
    assert_eq!(res.unwrap().failed, 5);
    let records = parse_corpus(std::str::from_utf8(&out).unwrap()).unwrap();
    let bad = records.iter().find(|r| r.fine_type_id == "Tradition").unwrap();
    assert_eq!(bad.attempts, 1);
    assert!(bad.payload.as_deref().unwrap().contains("unexpected"));
}

#[tokio::test]
async fn bad_credential_aborts() {
    let server = MockServer::start(MockOptions { api_key: Some("right".into()), ..Default::default() }).await.unwrap();
    let probes = build_probes(&spec(), ProbeKind::Name).unwrap();
    let mut out = Vec::new();
    let err = run_probes(&probes, &config(server.base_url()), "wrong", &mut out).await.unwrap_err();
    assert!(matches!(err, GenerationError::Auth { status: 401, .. }));
}

#[tokio::test]
async fn empty_probe_set_gives_empty_corpus() {
    let server = MockServer::start(MockOptions::default()).await.unwrap();
    let probes = valueprobe::probes::ProbeSet { kind: ProbeKind::Item, prompts: vec![] };
    let mut out = Vec::new();
    let s = run_probes(&probes, &config(server.base_url()), KEY, &mut out).await.unwrap();
    assert_eq!((s.requested, s.succeeded, s.failed), (0, 0, 0));
    assert!(out.is_empty());
}

#[tokio::test]
async fn output_is_byte_identical_across_runs() {
    let opts = MockOptions { max_latency: Duration::from_millis(5), ..Default::default() };
    let (a, _, _s1) = generate(ProbeKind::Item, opts.clone()).await;
    let (b, _, _s2) = generate(ProbeKind::Item, opts).await;
    assert_eq!(a, b);
}
