//! Keypad service: one decoding session per id, driven over local HTTP.
//!
//! ```text
//! POST /session               {"lang": "hi"}      -> {"session_id": "1"}
//! POST /session/{id}/key      {"key": 7}          -> {"event", "emitted", "text"}
//! GET  /session/{id}                              -> {"session_id", "text", "pending"}
//! ```

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use braille_core::app::{EventKind, KeypadSession};
use braille_core::decode::{Decoder, Language, MappingTable};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

pub struct ServiceState {
    default_lang: Language,
    default_grade: Option<u8>,
    decoders: Mutex<HashMap<(Language, u8), Arc<Decoder>>>,
    sessions: Mutex<HashMap<String, KeypadSession>>,
    next_id: AtomicU64,
}

impl ServiceState {
    pub fn new(default_lang: Language, default_grade: Option<u8>) -> Self {
        Self {
            default_lang,
            default_grade,
            decoders: Mutex::new(HashMap::new()),
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    fn decoder(&self, lang: Language, grade: u8) -> Result<Arc<Decoder>, String> {
        let mut cache = self.decoders.lock().expect("decoder cache lock");
        if let Some(d) = cache.get(&(lang, grade)) {
            return Ok(d.clone());
        }
        let d = Arc::new(Decoder::shipped(lang, grade).map_err(|e| e.to_string())?);
        cache.insert((lang, grade), d.clone());
        Ok(d)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewSession {
    lang: Option<Language>,
    grade: Option<u8>,
}

#[derive(Debug, Deserialize)]
struct KeyPress {
    key: i64,
}

#[derive(Debug, Serialize)]
struct KeyReply {
    event: EventKind,
    emitted: String,
    text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

fn fail(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn create_session(State(state): State<Arc<ServiceState>>, body: Option<Json<NewSession>>) -> Response {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let lang = req.lang.unwrap_or(state.default_lang);
    let grade = req
        .grade
        .or(if lang == state.default_lang { state.default_grade } else { None })
        .unwrap_or_else(|| MappingTable::default_grade(lang));
    let decoder = match state.decoder(lang, grade) {
        Ok(d) => d,
        Err(e) => return fail(StatusCode::BAD_REQUEST, e),
    };
    let id = state.next_id.fetch_add(1, Ordering::Relaxed).to_string();
    state
        .sessions
        .lock()
        .expect("session lock")
        .insert(id.clone(), KeypadSession::new(decoder));
    (StatusCode::CREATED, Json(json!({ "session_id": id, "lang": lang.code(), "grade": grade }))).into_response()
}

async fn press_key(
    State(state): State<Arc<ServiceState>>,
    Path(id): Path<String>,
    press: Result<Json<KeyPress>, JsonRejection>,
) -> Response {
    let press = match press {
        Ok(Json(p)) => p,
        Err(e) => return fail(e.status(), e.body_text()),
    };
    let mut sessions = state.sessions.lock().expect("session lock");
    let Some(session) = sessions.get_mut(&id) else {
        return fail(StatusCode::NOT_FOUND, format!("no session {id}"));
    };
    let event = match u8::try_from(press.key) {
        Ok(k) => session.feed(k),
        Err(_) => session.reject(press.key),
    };
    Json(KeyReply {
        event: event.kind,
        emitted: event.text,
        text: session.text().to_string(),
        detail: event.detail,
    })
    .into_response()
}

async fn read_session(State(state): State<Arc<ServiceState>>, Path(id): Path<String>) -> Response {
    let sessions = state.sessions.lock().expect("session lock");
    match sessions.get(&id) {
        Some(s) => Json(json!({ "session_id": id, "text": s.text(), "pending": s.pending() })).into_response(),
        None => fail(StatusCode::NOT_FOUND, format!("no session {id}")),
    }
}

/// Routes of the service. Anything else is served from `static_dir` when
/// one is given.
pub fn router(state: Arc<ServiceState>, static_dir: Option<PathBuf>) -> Router {
    let app = Router::new()
        .route("/session", post(create_session))
        .route("/session/:id", get(read_session))
        .route("/session/:id/key", post(press_key))
        .with_state(state);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}
