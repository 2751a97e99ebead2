//! Scorer plugins: child processes speaking line-delimited JSON.
//!
//! The first line a plugin writes must be the handshake
//! `{"protocol": "vulntrace-scorer", "version": 1}`. Each request
//! `{"id", "query", "candidates"}` is answered by `{"id", "scores"}`.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use vulntrace_core::eval::SentenceClassifier;
use vulntrace_core::trace::{check_scores, Scorer, ScorerError};
use vulntrace_core::EntityLabel;

pub const PROTOCOL: &str = "vulntrace-scorer";
pub const VERSION: u64 = 1;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Serialize)]
struct Request<'a> {
    id: u64,
    query: &'a str,
    candidates: &'a [&'a str],
}

#[derive(Debug, Deserialize)]
struct Response {
    id: u64,
    #[serde(default)]
    scores: Option<Vec<f64>>,
    #[serde(default)]
    error: Option<String>,
}

#[derive(Debug, Deserialize)]
struct Handshake {
    protocol: String,
    version: u64,
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    next_id: u64,
}

/// One plugin process; requests are serialized through a mutex.
pub struct PluginScorer {
    name: String,
    timeout: Duration,
    channel: Mutex<Channel>,
}

impl std::fmt::Debug for PluginScorer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PluginScorer").field("name", &self.name).field("timeout", &self.timeout).finish_non_exhaustive()
    }
}

fn unavailable(msg: impl Into<String>) -> ScorerError {
    ScorerError::Unavailable(msg.into())
}

impl PluginScorer {
    pub fn spawn(program: &Path) -> Result<Self, ScorerError> {
        Self::spawn_with_timeout(program, DEFAULT_TIMEOUT)
    }

    pub fn spawn_with_timeout(program: &Path, timeout: Duration) -> Result<Self, ScorerError> {
        let mut child = Command::new(program)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| unavailable(format!("cannot start plugin {}: {e}", program.display())))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut channel = Channel { child, stdin, lines: rx, next_id: 0 };
        let first = read_line(&mut channel, timeout).map_err(|e| unavailable(format!("handshake failed: {e}")))?;
        let hs: Handshake = serde_json::from_str(&first)
            .map_err(|e| unavailable(format!("handshake failed: `{first}` is not a handshake: {e}")))?;
        if hs.protocol != PROTOCOL || hs.version != VERSION {
            return Err(unavailable(format!(
                "handshake failed: plugin speaks {} version {}, expected {PROTOCOL} version {VERSION}",
                hs.protocol, hs.version
            )));
        }
        let name = program.file_name().map_or_else(|| "plugin".into(), |n| n.to_string_lossy().into_owned());
        Ok(PluginScorer { name, timeout, channel: Mutex::new(channel) })
    }
}

fn read_line(ch: &mut Channel, timeout: Duration) -> Result<String, String> {
    loop {
        match ch.lines.recv_timeout(timeout) {
            Ok(Ok(line)) if line.trim().is_empty() => continue,
            Ok(Ok(line)) => return Ok(line),
            Ok(Err(e)) => return Err(format!("read error: {e}")),
            Err(RecvTimeoutError::Timeout) => return Err(format!("no output within {timeout:?}")),
            Err(RecvTimeoutError::Disconnected) => {
                let mut status = None;
                for _ in 0..50 {
                    status = ch.child.try_wait().ok().flatten();
                    if status.is_some() {
                        break;
                    }
                    std::thread::sleep(Duration::from_millis(10));
                }
                return Err(match status {
                    Some(s) => format!("plugin exited ({s})"),
                    None => "plugin closed its output".into(),
                });
            }
        }
    }
}

impl Scorer for PluginScorer {
    fn name(&self) -> &str {
        &self.name
    }

    fn score_pool(&self, query: &str, candidates: &[&str]) -> Result<Vec<f64>, ScorerError> {
        let mut ch = self.channel.lock().map_err(|_| unavailable("plugin channel poisoned"))?;
        ch.next_id += 1;
        let id = ch.next_id;
        let mut line = serde_json::to_string(&Request { id, query, candidates }).expect("request serializes");
        line.push('\n');
        ch.stdin
            .write_all(line.as_bytes())
            .and_then(|_| ch.stdin.flush())
            .map_err(|e| unavailable(format!("cannot write request: {e}")))?;
        let reply = read_line(&mut ch, self.timeout).map_err(unavailable)?;
        let resp: Response =
            serde_json::from_str(&reply).map_err(|e| unavailable(format!("malformed response `{reply}`: {e}")))?;
        if resp.id != id {
            return Err(unavailable(format!("response id {} does not match request id {id}", resp.id)));
        }
        if let Some(err) = resp.error {
            return Err(unavailable(format!("plugin error: {err}")));
        }
        let scores = resp.scores.ok_or_else(|| unavailable("response has no scores"))?;
        check_scores(candidates.len(), scores)
    }
}

impl Drop for PluginScorer {
    fn drop(&mut self) {
        if let Ok(ch) = self.channel.get_mut() {
            let _ = ch.child.kill();
            let _ = ch.child.wait();
        }
    }
}

/// Sentence classification over the scorer protocol: the candidates are
/// the three labels and a label is predicted iff its score is positive.
pub struct PluginClassifier {
    scorer: PluginScorer,
}

impl PluginClassifier {
    pub const CANDIDATES: [&'static str; 3] = ["VT", "AF", "CP"];

    pub fn new(scorer: PluginScorer) -> Self {
        PluginClassifier { scorer }
    }
}

impl SentenceClassifier for PluginClassifier {
    fn classify(&self, text: &str, entity: EntityLabel) -> Result<bool, ScorerError> {
        let scores = self.scorer.score_pool(text, &Self::CANDIDATES)?;
        let idx = Self::CANDIDATES.iter().position(|c| *c == entity.as_str()).expect("label candidate");
        Ok(scores[idx] > 0.0)
    }
}

/// `VULNTRACE_PLUGIN` wins over the command-line path.
pub fn resolve_plugin_path(flag: Option<&Path>) -> Option<PathBuf> {
    std::env::var_os("VULNTRACE_PLUGIN").filter(|v| !v.is_empty()).map(PathBuf::from).or_else(|| flag.map(Path::to_path_buf))
}
