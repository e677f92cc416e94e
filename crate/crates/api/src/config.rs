//! Service configuration: one TOML file plus `MOMENTS_*` environment
//! overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("environment variable {var}: {message}")]
    Env { var: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuthMode {
    /// Bearer tokens from `POST /sessions`.
    Token,
    /// No authentication; every request acts as `demo_user`.
    Demo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AuthConfig {
    pub mode: AuthMode,
    pub demo_user: String,
    pub session_ttl_minutes: i64,
    /// user id → hex SHA-256 of the password.
    pub users: BTreeMap<String, String>,
}

impl Default for AuthConfig {
    fn default() -> Self {
        Self {
            mode: AuthMode::Token,
            demo_user: "demo".into(),
            session_ttl_minutes: 12 * 60,
            users: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExternalMode {
    /// Scores from `mock_file`, `mock_default_score` for unknown texts.
    Mock,
    Http,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExternalConfig {
    pub mode: ExternalMode,
    pub url: Option<String>,
    pub timeout_ms: u64,
    pub mock_file: Option<PathBuf>,
    pub mock_default_score: f64,
}

impl Default for ExternalConfig {
    fn default() -> Self {
        Self {
            mode: ExternalMode::Mock,
            url: None,
            timeout_ms: 2000,
            mock_file: None,
            mock_default_score: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ApiConfig {
    pub bind: String,
    pub port: u16,
    /// Holds the journal file.
    pub data_dir: PathBuf,
    /// Holds the three model bundles.
    pub model_dir: PathBuf,
    /// Lexicon TOML files; bundled lexicons when unset.
    pub lexicon_dir: Option<PathBuf>,
    /// Prompt, article and pool files; bundled content when unset.
    pub content_dir: Option<PathBuf>,
    pub default_timezone: Tz,
    pub seed: u64,
    /// Answer `POST /moments` before annotation finishes.
    pub async_annotation: bool,
    /// Seconds between notification checks; 0 disables them.
    pub notification_interval_secs: u64,
    pub auth: AuthConfig,
    pub external: ExternalConfig,
}

impl Default for ApiConfig {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1".into(),
            port: 8080,
            data_dir: PathBuf::from("var"),
            model_dir: PathBuf::from("models"),
            lexicon_dir: None,
            content_dir: None,
            default_timezone: chrono_tz::UTC,
            seed: 7,
            async_annotation: false,
            notification_interval_secs: 60,
            auth: AuthConfig::default(),
            external: ExternalConfig::default(),
        }
    }
}

fn env_parse<T: std::str::FromStr>(var: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Env {
        var: var.to_string(),
        message: e.to_string(),
    })
}

impl ApiConfig {
    pub fn parse(doc: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(doc)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let doc = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&doc)
    }

    /// Applies overrides from `vars` (normally `std::env::vars()`).
    pub fn apply_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), ConfigError> {
        for (k, v) in vars {
            match k.as_str() {
                "MOMENTS_BIND" => self.bind = v,
                "MOMENTS_PORT" => self.port = env_parse(&k, &v)?,
                "MOMENTS_DATA_DIR" => self.data_dir = v.into(),
                "MOMENTS_MODEL_DIR" => self.model_dir = v.into(),
                "MOMENTS_LEXICON_DIR" => self.lexicon_dir = Some(v.into()),
                "MOMENTS_CONTENT_DIR" => self.content_dir = Some(v.into()),
                "MOMENTS_TIMEZONE" => self.default_timezone = env_parse(&k, &v)?,
                "MOMENTS_SEED" => self.seed = env_parse(&k, &v)?,
                "MOMENTS_AUTH_MODE" => {
                    self.auth.mode = match v.as_str() {
                        "token" => AuthMode::Token,
                        "demo" => AuthMode::Demo,
                        _ => {
                            return Err(ConfigError::Env {
                                var: k,
                                message: "expected token or demo".into(),
                            })
                        }
                    }
                }
                "MOMENTS_EXTERNAL_URL" => {
                    self.external.url = Some(v);
                    self.external.mode = ExternalMode::Http;
                }
                "MOMENTS_EXTERNAL_MODE" => {
                    self.external.mode = match v.as_str() {
                        "mock" => ExternalMode::Mock,
                        "http" => ExternalMode::Http,
                        "off" => ExternalMode::Off,
                        _ => {
                            return Err(ConfigError::Env {
                                var: k,
                                message: "expected mock, http or off".into(),
                            })
                        }
                    }
                }
                "MOMENTS_MOCK_FILE" => self.external.mock_file = Some(v.into()),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn journal_path(&self) -> PathBuf {
        self.data_dir.join(moments_core::store::JOURNAL_FILE)
    }
}
