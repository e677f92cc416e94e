#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::{Arc, OnceLock};

use chrono::{DateTime, TimeZone, Utc};
use moments_api::config::{ApiConfig, AuthMode};
use moments_api::{startup, AppState};
use moments_core::bundled::data_dir;
use moments_core::models::ModelSet;
use moments_core::taxonomy::ValueTaxonomy;
use moments_core::trainer::harness::{train_all, DataLayout, HarnessConfig};
use serde_json::Value;

/// Models trained once per test binary and saved to a shared directory.
pub fn model_dir() -> &'static Path {
    static DIR: OnceLock<(tempfile::TempDir, ModelSet)> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let models =
            train_all(&DataLayout::new(&data_dir()), &ValueTaxonomy::default(), &HarnessConfig::with_seed(7)).unwrap();
        models.save_dir(dir.path()).unwrap();
        (dir, models)
    })
    .0
    .path()
}

/// Wednesday 2026-06-10 12:00 UTC.
pub fn start_time() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2026, 6, 10, 12, 0, 0).unwrap()
}

pub fn config(data: &Path, mode: AuthMode) -> ApiConfig {
    let mut c = ApiConfig {
        data_dir: data.to_path_buf(),
        model_dir: model_dir().to_path_buf(),
        notification_interval_secs: 0,
        ..ApiConfig::default()
    };
    c.auth.mode = mode;
    c.external.mock_file = Some(data_dir().join("corpus/polarity_external_mock.jsonl"));
    c.external.mock_default_score = 0.2;
    c
}

pub struct TestServer {
    pub base: String,
    pub clock: Arc<AtomicI64>,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl TestServer {
    pub fn start(config: ApiConfig) -> Self {
        let clock = Arc::new(AtomicI64::new(start_time().timestamp()));
        let journal = startup::build_journal(&config).unwrap();
        let c = clock.clone();
        let state = AppState::new(journal, config)
            .with_clock(Arc::new(move || Utc.timestamp_opt(c.load(Ordering::SeqCst), 0).unwrap()));
        let (tx, rx) = tokio::sync::oneshot::channel::<()>();
        let (addr_tx, addr_rx) = std::sync::mpsc::channel();
        let thread = std::thread::spawn(move || {
            let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build().unwrap();
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
                addr_tx.send(listener.local_addr().unwrap()).unwrap();
                moments_api::serve_on(listener, state, async {
                    let _ = rx.await;
                })
                .await
                .unwrap();
            });
        });
        let addr = addr_rx.recv().unwrap();
        Self { base: format!("http://{addr}"), clock, shutdown: Some(tx), thread: Some(thread) }
    }

    pub fn set_time(&self, t: DateTime<Utc>) {
        self.clock.store(t.timestamp(), Ordering::SeqCst);
    }

    pub fn client(&self) -> Client {
        Client::new(&self.base, None)
    }

    pub fn stop(mut self) {
        self.shutdown_now();
    }

    fn shutdown_now(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            t.join().unwrap();
        }
    }
}

impl Drop for TestServer {
    fn drop(&mut self) {
        self.shutdown_now();
    }
}

#[derive(Clone)]
pub struct Client {
    base: String,
    token: Option<String>,
    agent: ureq::Agent,
}

pub struct Reply {
    pub status: u16,
    pub body: Value,
    pub raw: String,
}

impl Reply {
    pub fn code(&self) -> &str {
        self.body["error"]["code"].as_str().unwrap_or("")
    }
}

impl Client {
    pub fn new(base: &str, token: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder().http_status_as_error(false).max_idle_connections(0).build().into();
        Self { base: base.to_string(), token, agent }
    }

    pub fn with_token(&self, token: &str) -> Self {
        Self::new(&self.base, Some(token.to_string()))
    }

    pub fn send(&self, method: &str, path: &str, body: Option<Value>) -> Reply {
        let url = format!("{}{}", self.base, path);
        let mut req = ureq::http::Request::builder().method(method).uri(&url);
        if let Some(t) = &self.token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        let resp = match body {
            Some(b) => {
                let req = req.header("content-type", "application/json").body(b.to_string()).unwrap();
                self.agent.run(req)
            }
            None => self.agent.run(req.body(()).unwrap()),
        }
        .unwrap();
        let status = resp.status().as_u16();
        let raw = resp.into_body().read_to_string().unwrap();
        let body = serde_json::from_str(&raw).unwrap_or(Value::Null);
        Reply { status, body, raw }
    }

    pub fn get(&self, path: &str) -> Reply {
        self.send("GET", path, None)
    }

    pub fn post(&self, path: &str, body: Value) -> Reply {
        self.send("POST", path, Some(body))
    }

    pub fn login(&self, user: &str, password: &str) -> Client {
        let r = self.post("/sessions", serde_json::json!({ "user_id": user, "password": password }));
        assert_eq!(r.status, 201, "{}", r.raw);
        self.with_token(r.body["token"].as_str().unwrap())
    }
}

pub fn tag_names(view: &Value) -> Vec<String> {
    view["effective_tags"].as_array().unwrap().iter().map(|t| t["value"].as_str().unwrap().to_string()).collect()
}

pub fn data_path(p: &str) -> PathBuf {
    data_dir().join(p)
}
