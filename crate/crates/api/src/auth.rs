//! Bearer-token sessions.

use std::collections::HashMap;
use std::sync::Mutex;

use chrono::{DateTime, Duration, Utc};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::AuthConfig;
use crate::error::ApiError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiSession {
    pub user_id: String,
    pub token: String,
    pub expires_at: DateTime<Utc>,
}

pub fn password_hash(password: &str) -> String {
    hex::encode(Sha256::digest(password.as_bytes()))
}

#[derive(Default)]
pub struct Sessions {
    live: Mutex<HashMap<String, ApiSession>>,
}

impl Sessions {
    /// Checks the password against the configured hash and issues a token.
    pub fn login(&self, auth: &AuthConfig, user: &str, password: &str, now: DateTime<Utc>) -> Result<ApiSession, ApiError> {
        let ok = auth.users.get(user).is_some_and(|h| h.eq_ignore_ascii_case(&password_hash(password)));
        if !ok {
            return Err(ApiError::new("bad_credentials", "unknown user or wrong password"));
        }
        let mut bytes = [0u8; 32];
        rand::thread_rng().fill_bytes(&mut bytes);
        let session = ApiSession {
            user_id: user.to_string(),
            token: hex::encode(bytes),
            expires_at: now + Duration::minutes(auth.session_ttl_minutes),
        };
        let mut live = self.live.lock().unwrap_or_else(|e| e.into_inner());
        live.retain(|_, s| s.expires_at > now);
        live.insert(session.token.clone(), session.clone());
        Ok(session)
    }

    pub fn resolve(&self, token: &str, now: DateTime<Utc>) -> Result<String, ApiError> {
        let mut live = self.live.lock().unwrap_or_else(|e| e.into_inner());
        match live.get(token) {
            None => Err(ApiError::new("unauthenticated", "unknown token")),
            Some(s) if s.expires_at <= now => {
                live.remove(token);
                Err(ApiError::new("session_expired", "session expired; log in again"))
            }
            Some(s) => Ok(s.user_id.clone()),
        }
    }

    pub fn logout(&self, token: &str) {
        self.live.lock().unwrap_or_else(|e| e.into_inner()).remove(token);
    }
}
