use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::{Shutdown, TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use ogp::format::Format;
use ogp::repo::{
    client_get, client_list, serve, ClientError, ErrorCode, FaultPoint, QueryResponse, ResponseStatus, ServerHandle,
    Store, StoreError, STORABLE,
};
use proptest::prelude::Rng;
use proptest::test_runner::{RngAlgorithm, TestRng};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), target).unwrap();
        }
    }
}

fn store_copy() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("store");
    copy_dir(&fixtures().join("store"), &root);
    (dir, root)
}

fn live() -> (Arc<Store>, ServerHandle) {
    let store = Arc::new(Store::open(fixtures().join("store")).unwrap());
    let handle = serve(store.clone(), "127.0.0.1", 0).unwrap();
    (store, handle)
}

fn raw_exchange(addr: &str, bytes: &[u8]) -> String {
    let mut s = TcpStream::connect(addr).unwrap();
    s.set_read_timeout(Some(Duration::from_secs(15))).unwrap();
    s.write_all(bytes).unwrap();
    let _ = s.shutdown(Shutdown::Write);
    let mut all = String::new();
    let mut r = BufReader::new(s);
    loop {
        let mut line = String::new();
        if r.read_line(&mut line).unwrap() == 0 {
            break;
        }
        all.push_str(&line);
    }
    all
}

#[test]
fn fixture_store_lists_three() {
    let store = Store::open(fixtures().join("store")).unwrap();
    assert_eq!(store.ids(), ["GEO0001", "GEO0002", "GEO0003"]);
}

#[test]
fn store_get_semantics() {
    let store = Store::open(fixtures().join("store")).unwrap();
    let gcl = fs::read_to_string(fixtures().join("store/problems/GEO0001/problem.gcl")).unwrap();
    assert_eq!(store.get("GEO0001", Format::Gcl).unwrap(), (Format::Gcl, gcl));
    let fof = fs::read_to_string(fixtures().join("store/problems/GEO0002/problem.fof")).unwrap();
    assert_eq!(store.get("GEO0002", Format::Gcl).unwrap(), (Format::Fof, fof));
    assert!(matches!(store.get("GEO9999", Format::Fof), Err(StoreError::NotFound(_))));
}

#[test]
fn validation_errors_name_the_record() {
    let (_d, root) = store_copy();
    fs::remove_file(root.join("problems/GEO0002/problem.fof")).unwrap();
    let err = Store::open(&root).unwrap_err();
    assert!(err.to_string().contains("GEO0002"), "{err}");

    let (_d, root) = store_copy();
    fs::write(root.join("manifest.json"), "{\"problems\": [").unwrap();
    assert!(matches!(Store::open(&root), Err(StoreError::CorruptManifest(_))));

    let (_d, root) = store_copy();
    fs::remove_file(root.join("problems/GEO0001/problem.gcl")).unwrap();
    assert!(Store::open(&root).unwrap_err().to_string().contains("GEO0001"));
}

fn files(pairs: &[(Format, PathBuf)]) -> BTreeMap<Format, PathBuf> {
    pairs.iter().cloned().collect()
}

#[test]
fn ingest_adds_and_validates() {
    let (dir, root) = store_copy();
    let store = Store::open(&root).unwrap();
    let f = fixtures();
    let meta = store
        .ingest(
            "GEO0004",
            "midline, both formats",
            &files(&[(Format::Fof, f.join("fof/midline.fof")), (Format::Gcl, f.join("dialects/midline.gcl"))]),
            false,
        )
        .unwrap();
    assert_eq!(meta.formats, [Format::Fof, Format::Gcl]);
    let reopened = Store::open(&root).unwrap();
    assert_eq!(reopened.ids().len(), 4);
    assert_eq!(reopened.record("GEO0004").unwrap().content.len(), 2);

    let err = store.ingest("GEO0005", "", &files(&[(Format::Gcl, f.join("dialects/midline.gcl"))]), false).unwrap_err();
    assert!(matches!(err, StoreError::MissingFof));

    let bad = dir.path().join("broken.gcl");
    fs::write(&bad, "point A\nmidpoint M A\n").unwrap();
    let err = store
        .ingest("GEO0005", "", &files(&[(Format::Fof, f.join("fof/midline.fof")), (Format::Gcl, bad.clone())]), false)
        .unwrap_err();
    assert!(err.to_string().contains("broken.gcl"), "{err}");

    let err = store.ingest("GEO0001", "", &files(&[(Format::Fof, f.join("fof/midline.fof"))]), false).unwrap_err();
    assert!(matches!(err, StoreError::Exists(_)));
    let created = store.record("GEO0001").unwrap().meta.created;
    let meta = store.ingest("GEO0001", "replaced", &files(&[(Format::Fof, f.join("fof/midline.fof"))]), true).unwrap();
    assert_eq!(meta.created, created);
    assert_eq!(Store::open(&root).unwrap().get("GEO0001", Format::Gcl).unwrap().0, Format::Fof);
    assert!(matches!(
        store.ingest("GEO12", "", &files(&[(Format::Fof, f.join("fof/midline.fof"))]), false),
        Err(StoreError::BadId(_))
    ));
}

#[test]
fn interrupted_ingest_keeps_prior_manifest() {
    for fault in [FaultPoint::AfterStaging, FaultPoint::BeforeManifestRename] {
        let (_d, root) = store_copy();
        let before = fs::read(root.join("manifest.json")).unwrap();
        let store = Store::open(&root).unwrap();
        let f = fixtures();
        let err = store
            .ingest_with_fault("GEO0004", "t", &files(&[(Format::Fof, f.join("fof/midline.fof"))]), fault)
            .unwrap_err();
        assert!(matches!(err, StoreError::Injected));
        assert_eq!(fs::read(root.join("manifest.json")).unwrap(), before);
        let reopened = Store::open(&root).unwrap();
        assert_eq!(reopened.ids(), ["GEO0001", "GEO0002", "GEO0003"]);
        // A later ingest of the same id still succeeds.
        reopened.ingest("GEO0004", "t", &files(&[(Format::Fof, f.join("fof/midline.fof"))]), false).unwrap();
    }
}

#[test]
fn server_matches_store_for_every_pair() {
    let (store, handle) = live();
    let ep = handle.addr().to_string();
    for id in store.ids().iter().map(String::as_str).chain(["GEO9999"]) {
        for format in Format::ALL {
            let direct = store.get(id, format);
            let remote = client_get(&ep, id, format, Duration::from_secs(5));
            match (direct, remote) {
                (Ok(a), Ok(b)) => assert_eq!(a, b, "{id} {format}"),
                (Err(StoreError::NotFound(_)), Err(ClientError::Server { code: ErrorCode::NotFound, .. })) => {}
                (a, b) => panic!("{id} {format}: {a:?} vs {b:?}"),
            }
        }
    }
    assert_eq!(client_list(&ep, Duration::from_secs(5)).unwrap(), store.ids());
    let (f, _) = client_get(&ep, "GEO0002", Format::Jgex, Duration::from_secs(5)).unwrap();
    assert_eq!(f, Format::Fof);
    assert!(STORABLE.contains(&f));
    handle.shutdown();
}

#[test]
fn exact_hit_is_byte_identical() {
    let (_store, handle) = live();
    let raw = raw_exchange(&handle.addr().to_string(), b"{\"op\":\"get\",\"id\":\"GEO0001\",\"format\":\"gcl\"}\n");
    let resp: QueryResponse = serde_json::from_str(raw.trim_end()).unwrap();
    let stored = fs::read(fixtures().join("store/problems/GEO0001/problem.gcl")).unwrap();
    assert_eq!(resp.content.unwrap().as_bytes(), stored.as_slice());
    assert_eq!(resp.format, Some(Format::Gcl));
}

#[test]
fn malformed_requests_get_bad_request() {
    let (_store, handle) = live();
    let raw = raw_exchange(&handle.addr().to_string(), b"not json\n");
    assert!(raw.starts_with(r#"{"status":"error","code":"bad_request""#), "{raw}");
    assert_eq!(raw.lines().count(), 1);
    let raw = raw_exchange(&handle.addr().to_string(), b"{\"op\":\"list\"}\n");
    let resp: QueryResponse = serde_json::from_str(raw.trim_end()).unwrap();
    assert_eq!(resp.ids.unwrap(), ["GEO0001", "GEO0002", "GEO0003"]);
    // No newline and an immediate close still yields a response.
    let raw = raw_exchange(&handle.addr().to_string(), b"{\"op\":\"list\"}");
    assert!(raw.starts_with(r#"{"status":"ok""#));
    let raw = raw_exchange(&handle.addr().to_string(), &vec![b'x'; 70_000]);
    assert!(raw.contains("bad_request"));
}

#[test]
fn fuzzed_lines_each_get_one_response() {
    let (_store, handle) = live();
    let addr = handle.addr().to_string();
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let templates: [&[u8]; 6] = [
        br#"{"op":"get","id":"GEO0001","format":"gcl"}"#,
        br#"{"op":"list"}"#,
        br#"{"op":"get","id":"GEO0002"}"#,
        br#"{"op":"get","id":"GEO9999","format":"fof"}"#,
        br#"[1,2,{"op":null}]"#,
        b"",
    ];
    for i in 0..1000u32 {
        let mut line: Vec<u8> = match i % 3 {
            0 => (0..rng.next_u32() % 200).map(|_| rng.next_u32() as u8).collect(),
            _ => {
                let mut t = templates[(rng.next_u32() as usize) % templates.len()].to_vec();
                for _ in 0..(rng.next_u32() % 4) {
                    if t.is_empty() {
                        t.push(rng.next_u32() as u8);
                    } else {
                        let pos = rng.next_u32() as usize % t.len();
                        match rng.next_u32() % 3 {
                            0 => t[pos] = rng.next_u32() as u8,
                            1 => {
                                t.remove(pos);
                            }
                            _ => t.insert(pos, rng.next_u32() as u8),
                        }
                    }
                }
                t
            }
        };
        line.retain(|&b| b != b'\n');
        line.push(b'\n');
        let raw = raw_exchange(&addr, &line);
        let lines: Vec<&str> = raw.lines().collect();
        assert_eq!(lines.len(), 1, "request {i}: {:?} -> {raw:?}", String::from_utf8_lossy(&line));
        let resp: QueryResponse = serde_json::from_str(lines[0]).unwrap_or_else(|e| panic!("request {i}: {e}: {raw}"));
        match resp.status {
            ResponseStatus::Ok => assert!(resp.content.is_some_and(|c| !c.is_empty()) || resp.ids.is_some()),
            ResponseStatus::Error => assert!(resp.code.is_some() && resp.message.is_some()),
        }
    }
}

#[test]
fn fifty_concurrent_clients() {
    let (store, handle) = live();
    let ep = handle.addr().to_string();
    let expected: Vec<_> = (0..50)
        .map(|k| {
            let id = store.ids()[k % 3].clone();
            let format = Format::ALL[k % Format::ALL.len()];
            (id.clone(), format, store.get(&id, format).unwrap())
        })
        .collect();
    let barrier = Arc::new(std::sync::Barrier::new(50));
    let threads: Vec<_> = expected
        .into_iter()
        .map(|(id, format, want)| {
            let ep = ep.clone();
            let barrier = barrier.clone();
            thread::spawn(move || {
                barrier.wait();
                let got = client_get(&ep, &id, format, Duration::from_secs(10)).unwrap();
                assert_eq!(got, want);
            })
        })
        .collect();
    for t in threads {
        t.join().unwrap();
    }
}

#[test]
fn server_down_is_a_transport_error() {
    let port = {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let start = Instant::now();
    let err = client_get(&format!("127.0.0.1:{port}"), "GEO0001", Format::Fof, Duration::from_secs(2)).unwrap_err();
    assert!(matches!(err, ClientError::Transport { .. }), "{err}");
    assert!(start.elapsed() < Duration::from_secs(3));
}

#[test]
fn daemon_binary_serves_and_ingests() {
    let (_d, root) = store_copy();
    let bin = env!("CARGO_BIN_EXE_ogp-repod");
    let out = std::process::Command::new(bin)
        .args(["--root", root.to_str().unwrap(), "ingest", "--id", "GEO0007", "--file"])
        .arg(format!("fof={}", fixtures().join("fof/varignon.fof").display()))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut child = std::process::Command::new(bin)
        .args(["--root", root.to_str().unwrap(), "--port", "0"])
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on ").unwrap().to_string();
    let ids = client_list(&addr, Duration::from_secs(5));
    child.kill().unwrap();
    child.wait().unwrap();
    assert_eq!(ids.unwrap(), ["GEO0001", "GEO0002", "GEO0003", "GEO0007"]);
}
