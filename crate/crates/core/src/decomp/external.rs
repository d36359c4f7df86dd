//! Adapter for decompilers that run as separate programs.
//!
//! The command template has `{input}` replaced by the path of a file holding
//! the class in textual bytecode form and is run through `sh -c`. Standard
//! output is the decompiled source.

use std::io::Read;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use crate::vm::{to_text, BytecodeClass};

pub const DEFAULT_TIMEOUT_SECS: u64 = 60;

/// Runs an external decompiler. `None` on nonzero exit, empty output,
/// spawn failure or timeout.
pub fn run(template: &str, bc: &BytecodeClass, timeout_secs: u64) -> Option<String> {
    let dir = tempfile::tempdir().ok()?;
    let file_name = format!("{}.mjc", bc.name.replace('.', "_"));
    let path = dir.path().join(file_name);
    std::fs::write(&path, to_text(bc)).ok()?;
    run_on_file(template, &path.to_string_lossy(), Duration::from_secs(timeout_secs))
}

pub fn run_on_file(template: &str, input: &str, timeout: Duration) -> Option<String> {
    let cmd = template.replace("{input}", input);
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .ok()?;
    let mut stdout = child.stdout.take()?;
    let reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let deadline = Instant::now() + timeout;
    let status = loop {
        match child.try_wait() {
            Ok(Some(s)) => break Some(s),
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                break None;
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(5)),
            Err(_) => break None,
        }
    };
    let status = status?;
    // A killed shell may leave a grandchild holding the pipe open; the
    // reader is only joined after a normal exit.
    let out = reader.join().ok()?;
    if !status.success() {
        return None;
    }
    let text = String::from_utf8(out).ok()?;
    (!text.trim().is_empty()).then_some(text)
}
