//! Cache-first retrieval of Hecke eigenvalue records over HTTP. Every
//! record that leaves this module has passed [`HeckeEigenvalueSource::validate`];
//! cache hits never open a connection, and cache files are only replaced
//! atomically. Corrupt cache entries are quarantined in place rather than
//! silently deleted.

use super::{FormKind, HeckeEigenvalueSource};
use crate::error::{Error, Result};
use once_cell::sync::Lazy;
use serde::Deserialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub api_base_url: String,
    pub maass_query_path: String,
    pub newform_query_path: String,
    pub zeros_query_path: String,
    pub cache_dir: PathBuf,
    pub offline: bool,
}

impl ClientConfig {
    pub fn new(api_base_url: impl Into<String>, cache_dir: impl Into<PathBuf>) -> Self {
        ClientConfig {
            api_base_url: api_base_url.into(),
            maass_query_path: "/maass".into(),
            newform_query_path: "/newforms".into(),
            zeros_query_path: "/zeros".into(),
            cache_dir: cache_dir.into(),
            offline: false,
        }
    }

    /// LOWLYING_CACHE_DIR when set, otherwise a directory under the system
    /// temp dir.
    pub fn cache_dir_from_env() -> PathBuf {
        match std::env::var_os("LOWLYING_CACHE_DIR") {
            Some(d) => PathBuf::from(d),
            None => std::env::temp_dir().join("lowlying-cache"),
        }
    }
}

#[derive(Deserialize)]
struct WireForm {
    label: String,
    kind: FormKind,
    spectral_parameter: f64,
    sign: i8,
    coefficients: Vec<f64>,
    #[serde(default)]
    zeros: Vec<f64>,
}

#[derive(Deserialize)]
struct FormsResponse {
    forms: Vec<WireForm>,
    /// true when the family has no further members past what was returned
    #[serde(default)]
    exhausted: bool,
}

#[derive(Deserialize)]
struct ZerosResponse {
    zeros: Vec<f64>,
}

#[derive(serde::Serialize, Deserialize)]
struct Manifest {
    labels: Vec<String>,
    exhausted: bool,
}

/// At most two requests in flight, at least half a second between request
/// starts, process-wide.
struct Gate {
    permits: Mutex<u32>,
    cv: Condvar,
}

static GATE: Lazy<Gate> = Lazy::new(|| Gate {
    permits: Mutex::new(2),
    cv: Condvar::new(),
});
static LAST_START: Lazy<Mutex<Option<Instant>>> = Lazy::new(|| Mutex::new(None));
static HTTP: Lazy<reqwest::blocking::Client> = Lazy::new(|| {
    reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(30))
        .build()
        .expect("default TLS stack is available")
});

struct GatePermit;

impl GatePermit {
    fn acquire() -> GatePermit {
        let mut permits = GATE.permits.lock().expect("gate lock");
        while *permits == 0 {
            permits = GATE.cv.wait(permits).expect("gate lock");
        }
        *permits -= 1;
        GatePermit
    }
}

impl Drop for GatePermit {
    fn drop(&mut self) {
        *GATE.permits.lock().expect("gate lock") += 1;
        GATE.cv.notify_one();
    }
}

fn pace() {
    let mut last = LAST_START.lock().expect("pacing lock");
    if let Some(t) = *last {
        let spacing = Duration::from_millis(500);
        let elapsed = t.elapsed();
        if elapsed < spacing {
            std::thread::sleep(spacing - elapsed);
        }
    }
    *last = Some(Instant::now());
}

/// GET with up to three attempts; connection failures and 5xx responses
/// back off 250ms/1s, anything else fails immediately.
fn get_json<T: serde::de::DeserializeOwned>(url: &str) -> Result<T> {
    let _permit = GatePermit::acquire();
    let mut last_err = String::new();
    for attempt in 0..3 {
        if attempt > 0 {
            std::thread::sleep(Duration::from_millis(250 * 4u64.pow(attempt - 1)));
        }
        pace();
        match HTTP.get(url).send() {
            Err(e) => last_err = format!("{url}: {e}"),
            Ok(resp) => {
                let status = resp.status();
                if status.is_server_error() {
                    last_err = format!("{url}: status {status}");
                    continue;
                }
                if !status.is_success() {
                    return Err(Error::Network(format!("{url}: status {status}")));
                }
                let body = resp
                    .bytes()
                    .map_err(|e| Error::Network(format!("{url}: {e}")))?;
                return serde_json::from_slice(&body)
                    .map_err(|e| Error::Schema(format!("{url}: {e}")));
            }
        }
    }
    Err(Error::Network(format!("3 attempts failed, last: {last_err}")))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn iso_from_unix(secs: u64) -> String {
    let (days, rem) = (secs / 86400, secs % 86400);
    let (hh, mm, ss) = (rem / 3600, rem % 3600 / 60, rem % 60);
    // Gregorian date from day number, era by era
    let z = days as i64 + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + i64::from(m <= 2);
    format!("{y:04}-{m:02}-{d:02}T{hh:02}:{mm:02}:{ss:02}Z")
}

fn iso_now() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default()
        .as_secs();
    iso_from_unix(secs)
}

fn query_dir(cfg: &ClientConfig, kind: FormKind, level: u64, n_max: usize) -> PathBuf {
    let key = format!("{kind:?}|{level}|{n_max}");
    cfg.cache_dir.join(format!("{:016x}", fnv1a(key.as_bytes())))
}

fn atomic_write(dir: &Path, path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .map_err(|e| Error::Io(e.error))
        .map(|_| ())
}

fn quarantine(path: &Path) {
    let mut q = path.as_os_str().to_owned();
    q.push(".quarantined");
    let _ = fs::rename(path, PathBuf::from(q));
}

/// None means the entry was unusable (missing, unparseable, or invalid);
/// unusable files on disk are quarantined as a side effect.
fn load_cached(path: &Path, n_max: usize) -> Option<HeckeEigenvalueSource> {
    let bytes = fs::read(path).ok()?;
    let parsed: HeckeEigenvalueSource = match serde_json::from_slice(&bytes) {
        Ok(p) => p,
        Err(_) => {
            quarantine(path);
            return None;
        }
    };
    if parsed.validate().is_err() || (parsed.coverage() as usize) < n_max {
        quarantine(path);
        return None;
    }
    Some(parsed)
}

/// Fetch up to `count` validated eigenvalue records of one kind and level,
/// each carrying at least `n_max` coefficients. Results come from the
/// on-disk cache whenever it can satisfy the call; the cache is keyed by
/// (kind, level, n_max) with one JSON file per label.
pub fn fetch_forms(
    cfg: &ClientConfig,
    kind: FormKind,
    level: u64,
    count: usize,
    n_max: usize,
) -> Result<Vec<HeckeEigenvalueSource>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if level < 1 {
        return Err(Error::Domain("level must be at least 1".into()));
    }
    if n_max < 1 {
        return Err(Error::Domain("coefficient reach must be at least 1".into()));
    }
    let dir = query_dir(cfg, kind, level, n_max);
    let manifest_path = dir.join("manifest.json");

    if let Ok(bytes) = fs::read(&manifest_path) {
        if let Ok(man) = serde_json::from_slice::<Manifest>(&bytes) {
            if man.labels.len() >= count || man.exhausted {
                let take = man.labels.len().min(count);
                let mut out = Vec::with_capacity(take);
                let mut intact = true;
                for label in &man.labels[..take] {
                    match load_cached(&dir.join(format!("{label}.json")), n_max) {
                        Some(src) => out.push(src),
                        None => {
                            intact = false;
                            break;
                        }
                    }
                }
                if intact {
                    return Ok(out);
                }
            }
        } else {
            quarantine(&manifest_path);
        }
    }

    if cfg.offline {
        return Err(Error::Network(format!(
            "offline, and the cache does not hold {count} forms for kind {kind:?}, \
             level {level}, n_max {n_max}"
        )));
    }

    let path = match kind {
        FormKind::Maass => &cfg.maass_query_path,
        FormKind::Holomorphic => &cfg.newform_query_path,
    };
    let url = format!(
        "{}{}?level={}&count={}&n_max={}",
        cfg.api_base_url, path, level, count, n_max
    );
    let resp: FormsResponse = get_json(&url)?;
    let mut out = Vec::with_capacity(resp.forms.len());
    for wf in resp.forms.into_iter().take(count) {
        if wf.kind != kind {
            return Err(Error::Schema(format!(
                "form {} is {:?}, query asked for {kind:?}",
                wf.label, wf.kind
            )));
        }
        if wf.coefficients.len() < n_max {
            return Err(Error::Schema(format!(
                "form {} arrived with {} coefficients, {n_max} requested",
                wf.label,
                wf.coefficients.len()
            )));
        }
        let zeros = if wf.zeros.is_empty() && !cfg.zeros_query_path.is_empty() {
            let zurl = format!(
                "{}{}?label={}",
                cfg.api_base_url, cfg.zeros_query_path, wf.label
            );
            get_json::<ZerosResponse>(&zurl)?.zeros
        } else {
            wf.zeros
        };
        let src = HeckeEigenvalueSource {
            label: wf.label,
            kind,
            spectral_parameter: wf.spectral_parameter,
            sign: wf.sign,
            coefficients: wf.coefficients,
            zeros,
            fetched_at: iso_now(),
        };
        src.validate()?;
        out.push(src);
    }

    fs::create_dir_all(&dir)?;
    for src in &out {
        let path = dir.join(format!("{}.json", src.label));
        // an intact existing entry keeps its bytes (and fetch timestamp)
        if load_cached(&path, n_max).is_some() {
            continue;
        }
        let bytes = serde_json::to_vec_pretty(src).map_err(|e| Error::Schema(e.to_string()))?;
        atomic_write(&dir, &path, &bytes)?;
    }
    let manifest = Manifest {
        labels: out.iter().map(|s| s.label.clone()).collect(),
        exhausted: resp.exhausted || out.len() < count,
    };
    let bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Schema(e.to_string()))?;
    atomic_write(&dir, &manifest_path, &bytes)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmfdb::synthetic_source;
    use std::io::{BufRead, BufReader};
    use std::net::TcpListener;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    fn wire_json(srcs: &[HeckeEigenvalueSource], exhausted: bool) -> String {
        let forms: Vec<serde_json::Value> = srcs
            .iter()
            .map(|s| {
                serde_json::json!({
                    "label": s.label,
                    "kind": "maass",
                    "spectral_parameter": s.spectral_parameter,
                    "sign": s.sign,
                    "coefficients": s.coefficients,
                    "zeros": (1..=12).map(|k| k as f64).collect::<Vec<f64>>(),
                })
            })
            .collect();
        serde_json::json!({ "forms": forms, "exhausted": exhausted }).to_string()
    }

    /// One-shot HTTP fixture: serves `body` to every request, counts hits.
    fn spawn_fixture(body: String) -> (String, Arc<AtomicUsize>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let hits = Arc::new(AtomicUsize::new(0));
        let hits2 = hits.clone();
        std::thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(mut stream) = stream else { continue };
                hits2.fetch_add(1, Ordering::SeqCst);
                let mut reader = BufReader::new(&mut stream);
                let mut line = String::new();
                loop {
                    line.clear();
                    match reader.read_line(&mut line) {
                        Ok(0) | Err(_) => break,
                        Ok(_) if line.trim_end().is_empty() => break,
                        Ok(_) => {}
                    }
                }
                let resp = format!(
                    "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                    body.len(),
                    body
                );
                use std::io::Write as _;
                let _ = stream.write_all(resp.as_bytes());
            }
        });
        (format!("http://{addr}"), hits)
    }

    fn test_config(base: &str, dir: &Path) -> ClientConfig {
        let mut cfg = ClientConfig::new(base, dir);
        cfg.zeros_query_path.clear(); // fixtures carry zeros inline
        cfg
    }

    #[test]
    fn count_zero_never_needs_data() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = ClientConfig::new("http://127.0.0.1:9", tmp.path());
        cfg.offline = true;
        assert!(fetch_forms(&cfg, FormKind::Maass, 1, 0, 100).unwrap().is_empty());
    }

    #[test]
    fn offline_cache_miss_is_a_network_error() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = ClientConfig::new("http://127.0.0.1:9", tmp.path());
        cfg.offline = true;
        match fetch_forms(&cfg, FormKind::Maass, 1, 1, 50) {
            Err(Error::Network(_)) => {}
            other => panic!("expected a network error, got {other:?}"),
        }
    }

    #[test]
    fn second_fetch_is_byte_identical_and_never_reconnects() {
        let a = synthetic_source("1.0.a", 50);
        let b = synthetic_source("1.0.b", 50);
        let (base, hits) = spawn_fixture(wire_json(&[a, b], true));
        let tmp = tempfile::tempdir().unwrap();
        let cfg = test_config(&base, tmp.path());

        let first = fetch_forms(&cfg, FormKind::Maass, 1, 2, 50).unwrap();
        assert_eq!(first.len(), 2);
        assert_eq!(hits.load(Ordering::SeqCst), 1);

        let dir = query_dir(&cfg, FormKind::Maass, 1, 50);
        let file = dir.join("1.0.a.json");
        let bytes_before = fs::read(&file).unwrap();

        let second = fetch_forms(&cfg, FormKind::Maass, 1, 2, 50).unwrap();
        assert_eq!(hits.load(Ordering::SeqCst), 1, "cache hit must not connect");
        assert_eq!(fs::read(&file).unwrap(), bytes_before);
        assert_eq!(second[0].label, first[0].label);
        assert_eq!(second[0].coefficients, first[0].coefficients);
        assert_eq!(second[0].fetched_at, first[0].fetched_at);

        // a smaller count under the same key is still a pure cache hit
        let one = fetch_forms(&cfg, FormKind::Maass, 1, 1, 50).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(hits.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn invariant_violations_in_the_payload_are_rejected() {
        let mut bad = synthetic_source("1.0.z", 40);
        bad.coefficients[0] = 1.5;
        let (base, _hits) = spawn_fixture(wire_json(&[bad], true));
        let tmp = tempfile::tempdir().unwrap();
        let cfg = test_config(&base, tmp.path());
        match fetch_forms(&cfg, FormKind::Maass, 1, 1, 40) {
            Err(Error::Invariant(_)) => {}
            other => panic!("expected an invariant rejection, got {other:?}"),
        }
    }

    #[test]
    fn corrupt_cache_entries_are_quarantined_and_refetched() {
        let a = synthetic_source("5.1.a", 30);
        let (base, hits) = spawn_fixture(wire_json(&[a], true));
        let tmp = tempfile::tempdir().unwrap();
        let cfg = test_config(&base, tmp.path());

        fetch_forms(&cfg, FormKind::Maass, 5, 1, 30).unwrap();
        assert_eq!(hits.load(Ordering::SeqCst), 1);

        let dir = query_dir(&cfg, FormKind::Maass, 5, 30);
        let file = dir.join("5.1.a.json");
        fs::write(&file, b"{ this is not a record").unwrap();

        let again = fetch_forms(&cfg, FormKind::Maass, 5, 1, 30).unwrap();
        assert_eq!(again.len(), 1);
        assert_eq!(hits.load(Ordering::SeqCst), 2, "corruption forces a refetch");
        let mut quarantined = file.as_os_str().to_owned();
        quarantined.push(".quarantined");
        assert!(PathBuf::from(quarantined).exists());
        assert!(file.exists(), "replacement entry was written back");
    }

    #[test]
    fn timestamps_render_as_utc_dates() {
        assert_eq!(iso_from_unix(0), "1970-01-01T00:00:00Z");
        assert_eq!(iso_from_unix(951_827_696), "2000-02-29T12:34:56Z");
    }
}
