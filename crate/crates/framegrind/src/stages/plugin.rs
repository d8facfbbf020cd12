//! External stage plugins: child processes speaking a line-oriented
//! protocol over stdin/stdout, so detectors or classifiers written in any
//! language can replace the built-in stages.
//!
//! Protocol (version 1):
//! - plugin greets once on startup: `HELLO framegrind-plugin/1 <role>`
//!   with role `detector`, `classifier` or `landmarker`
//! - host sends `FRAME <id> <width> <height> <channels>` followed by
//!   exactly `width*height*channels` raw pixel bytes
//! - plugin answers one of
//!   `FACES <n>` plus n lines `x y w h`,
//!   `SMILE <p>`,
//!   `LANDMARKS <n>` plus n lines `x y`,
//!   or `ERR <message>` to fail that frame only
//!
//! Every read is bounded by a timeout; a plugin that stalls or exits takes
//! down only its own stage (frames get abandoned, not the pipeline).

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use thiserror::Error;

use crate::geometry::{ImageBuffer, Point2};

use super::{parse_face_line, FaceBox};

pub const PLUGIN_PROTOCOL: &str = "framegrind-plugin/1";
pub const DEFAULT_PLUGIN_TIMEOUT_MS: u64 = 2000;

#[derive(Debug, Error)]
pub enum PluginError {
    #[error("plugin timed out after {0} ms")]
    Timeout(u64),
    #[error("plugin protocol error: {0}")]
    Protocol(String),
    #[error("plugin exited: {0}")]
    Exit(String),
    #[error("plugin reported error: {0}")]
    Remote(String),
    #[error("plugin io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PluginRole {
    Detector,
    Classifier,
    Landmarker,
}

impl std::str::FromStr for PluginRole {
    type Err = PluginError;
    fn from_str(s: &str) -> Result<Self, PluginError> {
        match s {
            "detector" => Ok(Self::Detector),
            "classifier" => Ok(Self::Classifier),
            "landmarker" => Ok(Self::Landmarker),
            other => Err(PluginError::Protocol(format!("unknown role {other:?}"))),
        }
    }
}

/// How to launch one plugin process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PluginSpec {
    pub command: String,
    pub args: Vec<String>,
    pub timeout_ms: u64,
}

impl PluginSpec {
    pub fn new(command: impl Into<String>, args: Vec<String>) -> Self {
        Self {
            command: command.into(),
            args,
            timeout_ms: DEFAULT_PLUGIN_TIMEOUT_MS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PluginResponse {
    Faces(Vec<FaceBox>),
    Smile(f64),
    Landmarks(Vec<Point2>),
}

/// One live plugin process. Each pipeline worker owns its own client;
/// clients are never shared between threads.
pub struct PluginClient {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    role: PluginRole,
    timeout: Duration,
    timeout_ms: u64,
}

impl PluginClient {
    /// Launches the process and performs the HELLO handshake.
    pub fn spawn(spec: &PluginSpec) -> Result<Self, PluginError> {
        let mut child = Command::new(&spec.command)
            .args(&spec.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take().expect("stdin was piped");
        let stdout = child.stdout.take().expect("stdout was piped");

        // dedicated reader thread so every receive can be time-bounded
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });

        let mut client = Self {
            child,
            stdin,
            lines: rx,
            role: PluginRole::Detector,
            timeout: Duration::from_millis(spec.timeout_ms),
            timeout_ms: spec.timeout_ms,
        };
        let hello = client.read_line()?;
        let toks: Vec<&str> = hello.split_whitespace().collect();
        match toks.as_slice() {
            ["HELLO", proto, role] if *proto == PLUGIN_PROTOCOL => {
                client.role = role.parse()?;
            }
            _ => {
                return Err(PluginError::Protocol(format!(
                    "bad handshake line {hello:?}"
                )))
            }
        }
        Ok(client)
    }

    pub fn role(&self) -> PluginRole {
        self.role
    }

    /// Sends one frame and reads the plugin's verdict.
    pub fn request(
        &mut self,
        frame_id: u64,
        img: &ImageBuffer,
    ) -> Result<PluginResponse, PluginError> {
        writeln!(
            self.stdin,
            "FRAME {frame_id} {} {} {}",
            img.width(),
            img.height(),
            img.channels()
        )?;
        self.stdin.write_all(img.data())?;
        self.stdin.flush()?;

        let line = self.read_line()?;
        let (verb, rest) = line.split_once(' ').unwrap_or((line.as_str(), ""));
        match verb {
            "FACES" => {
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| PluginError::Protocol(format!("bad count in {line:?}")))?;
                let mut faces = Vec::with_capacity(n);
                for _ in 0..n {
                    let fl = self.read_line()?;
                    faces.push(
                        parse_face_line(&fl).map_err(|e| PluginError::Protocol(e.to_string()))?,
                    );
                }
                Ok(PluginResponse::Faces(faces))
            }
            "SMILE" => {
                let p: f64 = rest
                    .trim()
                    .parse()
                    .map_err(|_| PluginError::Protocol(format!("bad probability in {line:?}")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(PluginError::Protocol(format!(
                        "probability {p} outside [0, 1]"
                    )));
                }
                Ok(PluginResponse::Smile(p))
            }
            "LANDMARKS" => {
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| PluginError::Protocol(format!("bad count in {line:?}")))?;
                let mut pts = Vec::with_capacity(n);
                for _ in 0..n {
                    let pl = self.read_line()?;
                    let mut it = pl.split_whitespace().map(|t| t.parse::<f64>());
                    match (it.next(), it.next(), it.next()) {
                        (Some(Ok(x)), Some(Ok(y)), None) => pts.push(Point2::new(x, y)),
                        _ => {
                            return Err(PluginError::Protocol(format!(
                                "bad landmark line {pl:?}"
                            )))
                        }
                    }
                }
                Ok(PluginResponse::Landmarks(pts))
            }
            "ERR" => Err(PluginError::Remote(rest.trim().to_string())),
            _ => Err(PluginError::Protocol(format!(
                "unexpected response {line:?}"
            ))),
        }
    }

    fn read_line(&mut self) -> Result<String, PluginError> {
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(PluginError::Io(e)),
            Err(RecvTimeoutError::Timeout) => Err(PluginError::Timeout(self.timeout_ms)),
            Err(RecvTimeoutError::Disconnected) => {
                let status = self
                    .child
                    .try_wait()
                    .ok()
                    .flatten()
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| "stdout closed".to_string());
                Err(PluginError::Exit(status))
            }
        }
    }
}

impl Drop for PluginClient {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
