//! Chat-completion client with a content-addressed disk cache.
//!
//! [`Provider::complete`] checks the cache, then waits for a concurrency slot
//! and a rate-limit token before calling the backend. Transient failures
//! (429, 5xx, timeouts, connection errors) are retried with exponentially
//! growing, fully jittered delays. The backend is either an OpenAI-style HTTP
//! endpoint or [`MockBackend`], which fabricates well-formed replies offline.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::prompt::{PromptKind, PromptText};

pub const API_KEY_ENV: &str = "PARASYNTH_API_KEY";
pub const DEFAULT_CACHE_DIR: &str = ".parasynth-cache";

#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    #[error("invalid provider config: {0}")]
    Config(String),
    #[error("request rejected with HTTP {status}: {body}")]
    Permanent { status: u16, body: String },
    #[error("gave up after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("model returned an empty completion")]
    EmptyCompletion,
    #[error("malformed response: {0}")]
    Protocol(String),
    #[error("cache {path}: {source}")]
    Cache {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ProviderError {
    /// Errors that count towards the permanent-failure budget of a run.
    pub fn is_permanent(&self) -> bool {
        matches!(
            self,
            ProviderError::Permanent { .. }
                | ProviderError::RetriesExhausted { .. }
                | ProviderError::EmptyCompletion
                | ProviderError::Protocol(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub base_url: String,
    pub model: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub request_timeout: Duration,
    pub max_retries: u32,
    pub max_concurrency: usize,
    /// `None` means unlimited.
    pub requests_per_minute: Option<u32>,
    pub backoff_base: Duration,
    pub backoff_cap: Duration,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-3.5-turbo".into(),
            temperature: 1.0,
            max_output_tokens: 512,
            request_timeout: Duration::from_secs(60),
            max_retries: 5,
            max_concurrency: 4,
            requests_per_minute: None,
            backoff_base: Duration::from_secs(1),
            backoff_cap: Duration::from_secs(60),
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), ProviderError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(ProviderError::Config(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if self.max_concurrency == 0 {
            return Err(ProviderError::Config("max_concurrency must be at least 1".into()));
        }
        if self.max_output_tokens == 0 {
            return Err(ProviderError::Config("max_output_tokens must be positive".into()));
        }
        if self.requests_per_minute == Some(0) {
            return Err(ProviderError::Config("requests_per_minute must be positive".into()));
        }
        if self.model.trim().is_empty() {
            return Err(ProviderError::Config("model must be set".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResult {
    pub prompt: PromptText,
    pub raw_text: String,
    pub model: String,
    pub cached: bool,
    pub attempts: u32,
}

/// SHA-256 over model, temperature, token limit and prompt text. Each field is
/// length-prefixed so no two field tuples share an encoding.
pub fn cache_key(config: &ProviderConfig, prompt: &PromptText) -> String {
    let mut h = Sha256::new();
    for field in [
        config.model.as_bytes(),
        &config.temperature.to_bits().to_le_bytes(),
        &config.max_output_tokens.to_le_bytes(),
        prompt.text.as_bytes(),
    ] {
        h.update((field.len() as u64).to_le_bytes());
        h.update(field);
    }
    hex::encode(h.finalize())
}

/// One file per key; contents are the raw reply bytes.
#[derive(Debug, Clone)]
pub struct DiskCache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl DiskCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ProviderError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| ProviderError::Cache {
            path: dir.clone(),
            source,
        })?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(key)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.path_for(key))
            .ok()
            .filter(|s| !s.trim().is_empty())
    }

    pub fn put(&self, key: &str, text: &str) -> Result<(), ProviderError> {
        let tmp = self.dir.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let err = |source| ProviderError::Cache {
            path: tmp.clone(),
            source,
        };
        let mut f = fs::File::create(&tmp).map_err(err)?;
        f.write_all(text.as_bytes()).map_err(err)?;
        f.sync_all().map_err(err)?;
        drop(f);
        fs::rename(&tmp, self.path_for(key)).map_err(err)
    }
}

/// Failure of a single request attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttemptError {
    Transient(String),
    Permanent { status: u16, body: String },
    Protocol(String),
}

pub trait Backend: Send + Sync {
    fn send(&self, config: &ProviderConfig, prompt: &PromptText) -> Result<String, AttemptError>;

    /// Whether requests leave the process (and so are rate limited).
    fn is_remote(&self) -> bool {
        true
    }
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    temperature: f64,
    max_tokens: u32,
    messages: [ChatMessage<'a>; 1],
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatReplyMessage,
}

#[derive(Deserialize)]
struct ChatReplyMessage {
    #[serde(default)]
    content: Option<String>,
}

/// JSON body POSTed to `{base_url}/chat/completions`.
pub fn request_body(config: &ProviderConfig, prompt: &PromptText) -> serde_json::Value {
    serde_json::to_value(ChatRequest {
        model: &config.model,
        temperature: config.temperature,
        max_tokens: config.max_output_tokens,
        messages: [ChatMessage {
            role: "user",
            content: &prompt.text,
        }],
    })
    .expect("request serializes")
}

pub struct HttpBackend {
    client: reqwest::blocking::Client,
    api_key: Option<String>,
}

impl HttpBackend {
    /// Reads the bearer token from [`API_KEY_ENV`] when set.
    pub fn new(config: &ProviderConfig) -> Result<Self, ProviderError> {
        let api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        Self::with_api_key(config, api_key)
    }

    pub fn with_api_key(config: &ProviderConfig, api_key: Option<String>) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.request_timeout)
            .build()
            .map_err(|e| ProviderError::Config(e.to_string()))?;
        Ok(Self { client, api_key })
    }
}

impl Backend for HttpBackend {
    fn send(&self, config: &ProviderConfig, prompt: &PromptText) -> Result<String, AttemptError> {
        let url = format!("{}/chat/completions", config.base_url.trim_end_matches('/'));
        let mut req = self.client.post(&url).json(&request_body(config, prompt));
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| AttemptError::Transient(e.to_string()))?;
        let status = resp.status();
        let body = resp.text().map_err(|e| AttemptError::Transient(e.to_string()))?;
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(AttemptError::Transient(format!("HTTP {}: {body}", status.as_u16())));
        }
        if !status.is_success() {
            return Err(AttemptError::Permanent {
                status: status.as_u16(),
                body,
            });
        }
        let parsed: ChatResponse =
            serde_json::from_str(&body).map_err(|e| AttemptError::Protocol(e.to_string()))?;
        let choice = parsed
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| AttemptError::Protocol("response has no choices".into()))?;
        Ok(choice.message.content.unwrap_or_default())
    }
}

/// Offline stand-in that answers every prompt deterministically.
#[derive(Debug, Default, Clone, Copy)]
pub struct MockBackend;

impl Backend for MockBackend {
    fn send(&self, _config: &ProviderConfig, prompt: &PromptText) -> Result<String, AttemptError> {
        Ok(mock_reply(prompt))
    }

    fn is_remote(&self) -> bool {
        false
    }
}

/// Counting semaphore bounding requests in flight.
struct Slots {
    free: Mutex<usize>,
    cv: Condvar,
}

struct SlotGuard<'a>(&'a Slots);

impl Slots {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> SlotGuard<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.cv.wait(free).unwrap();
        }
        *free -= 1;
        SlotGuard(self)
    }
}

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap() += 1;
        self.0.cv.notify_one();
    }
}

/// Token bucket refilled at `per_minute / 60` tokens per second.
pub struct RateLimiter {
    per_second: f64,
    burst: f64,
    state: Mutex<(f64, Instant)>,
}

impl RateLimiter {
    pub fn new(per_minute: u32, burst: usize) -> Self {
        let burst = burst.max(1) as f64;
        Self {
            per_second: f64::from(per_minute) / 60.0,
            burst,
            state: Mutex::new((burst, Instant::now())),
        }
    }

    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut state = self.state.lock().unwrap();
                let now = Instant::now();
                let (tokens, last) = &mut *state;
                *tokens = (*tokens + now.duration_since(*last).as_secs_f64() * self.per_second).min(self.burst);
                *last = now;
                if *tokens >= 1.0 {
                    *tokens -= 1.0;
                    return;
                }
                (1.0 - *tokens) / self.per_second
            };
            std::thread::sleep(Duration::from_secs_f64(wait));
        }
    }
}

pub struct Provider {
    config: ProviderConfig,
    backend: Box<dyn Backend>,
    cache: Option<DiskCache>,
    limiter: Option<RateLimiter>,
    slots: Slots,
    in_flight: AtomicUsize,
    peak_in_flight: AtomicUsize,
    cache_hits: AtomicUsize,
    calls: AtomicUsize,
}

impl Provider {
    pub fn new(
        config: ProviderConfig,
        backend: Box<dyn Backend>,
        cache: Option<DiskCache>,
    ) -> Result<Self, ProviderError> {
        config.validate()?;
        let limiter = match config.requests_per_minute {
            Some(rpm) if backend.is_remote() => Some(RateLimiter::new(rpm, config.max_concurrency)),
            _ => None,
        };
        Ok(Self {
            slots: Slots::new(config.max_concurrency),
            config,
            backend,
            cache,
            limiter,
            in_flight: AtomicUsize::new(0),
            peak_in_flight: AtomicUsize::new(0),
            cache_hits: AtomicUsize::new(0),
            calls: AtomicUsize::new(0),
        })
    }

    pub fn mock(config: ProviderConfig, cache: Option<DiskCache>) -> Result<Self, ProviderError> {
        Self::new(config, Box::new(MockBackend), cache)
    }

    pub fn http(config: ProviderConfig, cache: Option<DiskCache>) -> Result<Self, ProviderError> {
        let backend = HttpBackend::new(&config)?;
        Self::new(config, Box::new(backend), cache)
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    pub fn cache_hits(&self) -> usize {
        self.cache_hits.load(Ordering::Relaxed)
    }

    /// Number of `complete` calls so far, hits included.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn peak_in_flight(&self) -> usize {
        self.peak_in_flight.load(Ordering::Relaxed)
    }

    fn backoff(&self, retry: u32) -> Duration {
        let ceiling = self
            .config
            .backoff_base
            .saturating_mul(2u32.saturating_pow(retry))
            .min(self.config.backoff_cap);
        ceiling.mul_f64(rand::rng().random::<f64>())
    }

    pub fn complete(&self, prompt: &PromptText) -> Result<CompletionResult, ProviderError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let key = cache_key(&self.config, prompt);
        if let Some(text) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(CompletionResult {
                prompt: prompt.clone(),
                raw_text: text,
                model: self.config.model.clone(),
                cached: true,
                attempts: 0,
            });
        }

        let _slot = self.slots.acquire();
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak_in_flight.fetch_max(now, Ordering::SeqCst);
        let result = self.attempt_loop(prompt);
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        let (raw_text, attempts) = result?;

        if let Some(cache) = &self.cache {
            cache.put(&key, &raw_text)?;
        }
        Ok(CompletionResult {
            prompt: prompt.clone(),
            raw_text,
            model: self.config.model.clone(),
            cached: false,
            attempts,
        })
    }

    fn attempt_loop(&self, prompt: &PromptText) -> Result<(String, u32), ProviderError> {
        let mut attempts = 0u32;
        loop {
            attempts += 1;
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            match self.backend.send(&self.config, prompt) {
                Ok(text) if text.trim().is_empty() => return Err(ProviderError::EmptyCompletion),
                Ok(text) => return Ok((text, attempts)),
                Err(AttemptError::Permanent { status, body }) => {
                    return Err(ProviderError::Permanent { status, body })
                }
                Err(AttemptError::Protocol(msg)) => return Err(ProviderError::Protocol(msg)),
                Err(AttemptError::Transient(msg)) => {
                    if attempts > self.config.max_retries {
                        return Err(ProviderError::RetriesExhausted { attempts, last: msg });
                    }
                    let delay = self.backoff(attempts - 1);
                    log::warn!(
                        "pair {}: attempt {attempts} failed ({msg}); retrying in {delay:?}",
                        prompt.pair_id
                    );
                    std::thread::sleep(delay);
                }
            }
        }
    }
}

/// Uncached mock completion.
pub fn mock_complete(prompt: &PromptText) -> CompletionResult {
    CompletionResult {
        prompt: prompt.clone(),
        raw_text: mock_reply(prompt),
        model: "mock".into(),
        cached: false,
        attempts: 1,
    }
}

const SYNONYMS: &[(&str, &str)] = &[
    ("Kredit", "Darlehen"),
    ("möchten", "wollen"),
    ("haben", "bekommen"),
    ("viel", "hoch"),
    ("Geld", "Kapital"),
    ("starten", "beginnen"),
    ("etwa", "ungefähr"),
    ("대출을", "융자를"),
    ("원하세요?", "바라세요?"),
    ("얼마정도", "얼마쯤"),
    ("정도", "쯤"),
    ("싶습니다.", "원합니다."),
    ("loan", "credit"),
    ("want", "wish"),
    ("money", "funds"),
];

fn synonym(token: &str) -> Option<&'static str> {
    SYNONYMS.iter().find_map(|&(a, b)| {
        if token == a {
            Some(b)
        } else if token == b {
            Some(a)
        } else {
            None
        }
    })
}

/// One rewritten form of `sentence`, distinct from it and from `taken`.
fn mock_variant(sentence: &str, rng: &mut ChaCha8Rng, ordinal: usize, taken: &[String]) -> String {
    let mut tokens: Vec<String> = sentence.split_whitespace().map(str::to_string).collect();
    for t in tokens.iter_mut() {
        if let Some(s) = synonym(t) {
            if rng.random_bool(0.5) {
                *t = s.to_string();
            }
        }
    }
    if tokens.len() > 1 {
        let i = rng.random_range(0..tokens.len() - 1);
        tokens.swap(i, i + 1);
    }
    let mut candidate = tokens.join(" ");
    let mut attempt = 0;
    while candidate == sentence || taken.contains(&candidate) || candidate.is_empty() {
        attempt += 1;
        if attempt < 8 && tokens.len() > 1 {
            tokens.shuffle(rng);
            candidate = tokens.join(" ");
        } else {
            candidate = format!("{sentence} ({ordinal})");
            break;
        }
    }
    candidate
}

fn prompt_seed(text: &str) -> u64 {
    let digest = Sha256::digest(text.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Reply the mock backend gives for `prompt`.
///
/// Variant prompts get a numbered list of `n` rewrites. Story prompts get `n`
/// story lines, a blank line, then `n` translation lines.
pub fn mock_reply(prompt: &PromptText) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(prompt_seed(&prompt.text));
    let sentence = prompt.embedded_sentence().trim();
    let n = prompt.strategy.n();
    let mut variants: Vec<String> = Vec::with_capacity(n);
    for k in 1..=n {
        let v = mock_variant(sentence, &mut rng, k, &variants);
        variants.push(v);
    }
    match prompt.strategy.kind() {
        PromptKind::ParaphraseSrc | PromptKind::ParaphraseTgt | PromptKind::MultiTarget => variants
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{}. {v}", i + 1))
            .collect::<Vec<_>>()
            .join("\n"),
        PromptKind::Storytelling => {
            let translations: Vec<String> = variants
                .iter()
                .map(|v| v.split_whitespace().rev().collect::<Vec<_>>().join(" "))
                .collect();
            format!("{}\n\n{}", variants.join("\n"), translations.join("\n"))
        }
    }
}
