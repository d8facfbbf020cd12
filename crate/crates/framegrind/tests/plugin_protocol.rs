//! Wire-protocol tests for external stage plugins, exercised against small
//! Python processes that speak (or deliberately violate) the protocol.

use framegrind::geometry::ImageBuffer;
use framegrind::stages::plugin::{PluginClient, PluginError, PluginResponse, PluginRole, PluginSpec};
use framegrind::stages::FaceBox;

/// Launch an inline Python script as a plugin with a short timeout so the
/// failure tests stay fast.
fn spawn_python(script: &str, timeout_ms: u64) -> Result<PluginClient, PluginError> {
    let mut spec = PluginSpec::new("python3", vec!["-c".to_string(), script.to_string()]);
    spec.timeout_ms = timeout_ms;
    PluginClient::spawn(&spec)
}

/// A plugin body that answers every frame with the same literal response
/// block after consuming the frame's pixel bytes.
fn canned_responder(role: &str, response: &str) -> String {
    // JSON string literals are valid Python string literals
    let response = serde_json::to_string(response).unwrap();
    format!(
        r#"
import sys
inp = sys.stdin.buffer
out = sys.stdout
out.write("HELLO framegrind-plugin/1 {role}\n")
out.flush()
while True:
    header = inp.readline()
    if not header:
        break
    _, fid, w, h, c = header.split()
    inp.read(int(w) * int(h) * int(c))
    out.write({response})
    out.flush()
"#
    )
}

fn test_frame() -> ImageBuffer {
    ImageBuffer::filled(16, 12, 1, 128)
}

#[test]
fn detector_plugin_round_trip() {
    let script = canned_responder("detector", "FACES 1\n10 10 50 50\n");
    let mut client = spawn_python(&script, 5000).unwrap();
    assert_eq!(client.role(), PluginRole::Detector);
    let response = client.request(1, &test_frame()).unwrap();
    assert_eq!(
        response,
        PluginResponse::Faces(vec![FaceBox::new(10, 10, 50, 50)])
    );
    // the client stays usable for further frames
    let again = client.request(2, &test_frame()).unwrap();
    assert_eq!(
        again,
        PluginResponse::Faces(vec![FaceBox::new(10, 10, 50, 50)])
    );
}

#[test]
fn classifier_plugin_round_trip() {
    let script = canned_responder("classifier", "SMILE 0.75\n");
    let mut client = spawn_python(&script, 5000).unwrap();
    assert_eq!(client.role(), PluginRole::Classifier);
    assert_eq!(
        client.request(1, &test_frame()).unwrap(),
        PluginResponse::Smile(0.75)
    );
}

#[test]
fn landmarker_plugin_round_trip() {
    let script = canned_responder("landmarker", "LANDMARKS 2\n1.5 2.5\n3 4\n");
    let mut client = spawn_python(&script, 5000).unwrap();
    assert_eq!(client.role(), PluginRole::Landmarker);
    match client.request(1, &test_frame()).unwrap() {
        PluginResponse::Landmarks(pts) => {
            assert_eq!(pts.len(), 2);
            assert_eq!((pts[0].x, pts[0].y), (1.5, 2.5));
            assert_eq!((pts[1].x, pts[1].y), (3.0, 4.0));
        }
        other => panic!("expected landmarks, got {other:?}"),
    }
}

#[test]
fn plugin_sees_exact_frame_dimensions() {
    // echoes the FRAME header back through the ERR channel
    let script = r#"
import sys
inp = sys.stdin.buffer
out = sys.stdout
out.write("HELLO framegrind-plugin/1 detector\n")
out.flush()
header = inp.readline().split()
inp.read(int(header[2]) * int(header[3]) * int(header[4]))
out.write("ERR " + b" ".join(header).decode() + "\n")
out.flush()
"#;
    let mut client = spawn_python(script, 5000).unwrap();
    let img = ImageBuffer::filled(7, 5, 3, 0);
    match client.request(42, &img) {
        Err(PluginError::Remote(msg)) => assert_eq!(msg, "FRAME 42 7 5 3"),
        other => panic!("expected remote error echo, got {other:?}"),
    }
}

#[test]
fn stalled_plugin_times_out() {
    let script = r#"
import sys, time
sys.stdout.write("HELLO framegrind-plugin/1 classifier\n")
sys.stdout.flush()
time.sleep(60)
"#;
    let mut client = spawn_python(script, 300).unwrap();
    match client.request(1, &test_frame()) {
        Err(PluginError::Timeout(ms)) => assert_eq!(ms, 300),
        other => panic!("expected timeout, got {other:?}"),
    }
}

#[test]
fn malformed_response_is_a_protocol_error() {
    let script = canned_responder("classifier", "BANANA 1\n");
    let mut client = spawn_python(&script, 5000).unwrap();
    match client.request(1, &test_frame()) {
        Err(PluginError::Protocol(msg)) => assert!(msg.contains("BANANA"), "{msg}"),
        other => panic!("expected protocol error, got {other:?}"),
    }
}

#[test]
fn out_of_range_probability_is_a_protocol_error() {
    let script = canned_responder("classifier", "SMILE 1.5\n");
    let mut client = spawn_python(&script, 5000).unwrap();
    match client.request(1, &test_frame()) {
        Err(PluginError::Protocol(msg)) => assert!(msg.contains("1.5"), "{msg}"),
        other => panic!("expected protocol error, got {other:?}"),
    }
}

#[test]
fn err_response_fails_only_that_frame() {
    let script = r#"
import sys
inp = sys.stdin.buffer
out = sys.stdout
out.write("HELLO framegrind-plugin/1 classifier\n")
out.flush()
first = True
while True:
    header = inp.readline()
    if not header:
        break
    _, fid, w, h, c = header.split()
    inp.read(int(w) * int(h) * int(c))
    out.write("ERR no face visible\n" if first else "SMILE 0.5\n")
    out.flush()
    first = False
"#;
    let mut client = spawn_python(script, 5000).unwrap();
    match client.request(1, &test_frame()) {
        Err(PluginError::Remote(msg)) => assert_eq!(msg, "no face visible"),
        other => panic!("expected remote error, got {other:?}"),
    }
    // the next frame still succeeds
    assert_eq!(
        client.request(2, &test_frame()).unwrap(),
        PluginResponse::Smile(0.5)
    );
}

#[test]
fn bad_handshake_is_rejected() {
    let script = r#"
import sys
sys.stdout.write("HOWDY not-a-plugin\n")
sys.stdout.flush()
"#;
    match spawn_python(script, 2000) {
        Err(PluginError::Protocol(msg)) => assert!(msg.contains("HOWDY"), "{msg}"),
        other => panic!(
            "expected protocol error, got {:?}",
            other.map(|_| "client")
        ),
    }
}

#[test]
fn unknown_role_is_rejected() {
    let script = r#"
import sys
sys.stdout.write("HELLO framegrind-plugin/1 barista\n")
sys.stdout.flush()
"#;
    match spawn_python(script, 2000) {
        Err(PluginError::Protocol(msg)) => assert!(msg.contains("barista"), "{msg}"),
        other => panic!(
            "expected protocol error, got {:?}",
            other.map(|_| "client")
        ),
    }
}

#[test]
fn plugin_exit_is_reported_as_exit() {
    let script = r#"
import sys
sys.stdout.write("HELLO framegrind-plugin/1 classifier\n")
sys.stdout.flush()
"#;
    let mut client = spawn_python(script, 5000).unwrap();
    // script ends right after the handshake; the next read hits EOF
    match client.request(1, &test_frame()) {
        Err(PluginError::Exit(_)) => {}
        other => panic!("expected exit error, got {other:?}"),
    }
}

#[test]
fn truncated_faces_block_is_an_error() {
    // announces 2 boxes but sends only 1, then stalls
    let script = r#"
import sys, time
inp = sys.stdin.buffer
out = sys.stdout
out.write("HELLO framegrind-plugin/1 detector\n")
out.flush()
header = inp.readline().split()
inp.read(int(header[2]) * int(header[3]) * int(header[4]))
out.write("FACES 2\n1 2 3 4\n")
out.flush()
time.sleep(60)
"#;
    let mut client = spawn_python(script, 300).unwrap();
    match client.request(1, &test_frame()) {
        Err(PluginError::Timeout(_)) => {}
        other => panic!("expected timeout on missing box line, got {other:?}"),
    }
}
