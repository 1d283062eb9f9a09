//! Text cache for subgroup lattices.
//!
//! ```text
//! burnside-lattice v1 k=<k>
//! <id>|<order>|<normalizer order>|generators=<cycles>;<cycles>|<label>
//! leq: <L> <H> <H> ...
//! n: <L> <H> <n>
//! checksum: <FNV-1a 64 of all preceding bytes>
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use symbif_core::burnside::{build_lattice, ClassRecord, SubgroupLattice};
use symbif_core::perm::Perm;

pub const FORMAT_VERSION: &str = "v1";
const MAGIC: &str = "burnside-lattice";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("unsupported cache header {0:?}")]
    Version(String),
    #[error("checksum mismatch: stored {stored:016x}, computed {computed:016x}")]
    Checksum { stored: u64, computed: u64 },
    #[error("malformed cache line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error(transparent)]
    Core(#[from] symbif_core::Error),
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn serialize_lattice(lattice: &SubgroupLattice) -> String {
    let mut s = format!("{MAGIC} {FORMAT_VERSION} k={}\n", lattice.k());
    for c in lattice.classes() {
        let gens: Vec<String> = c.generators.iter().map(Perm::to_cycle_string).collect();
        s.push_str(&format!("{}|{}|{}|generators={}|{}\n", c.id, c.order, c.normalizer_order, gens.join(";"), c.label));
    }
    let m = lattice.len();
    for l in 0..m {
        let above: Vec<String> = (0..m).filter(|&h| lattice.leq(l, h)).map(|h| h.to_string()).collect();
        s.push_str(&format!("leq: {l} {}\n", above.join(" ")));
    }
    for l in 0..m {
        for h in 0..m {
            let n = lattice.n(l, h);
            if n > 0 {
                s.push_str(&format!("n: {l} {h} {n}\n"));
            }
        }
    }
    let sum = fnv1a64(s.as_bytes());
    s.push_str(&format!("checksum: {sum}\n"));
    s
}

fn bad(line: usize, reason: impl Into<String>) -> CacheError {
    CacheError::Format { line: line + 1, reason: reason.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, CacheError> {
    tok.trim().parse().map_err(|_| bad(line, format!("bad {what} {tok:?}")))
}

pub fn load_lattice(text: &str) -> Result<SubgroupLattice, CacheError> {
    let body_end = text.trim_end_matches('\n').rfind('\n').map(|i| i + 1).ok_or_else(|| bad(0, "missing checksum"))?;
    let (body, tail) = text.split_at(body_end);
    let stored: u64 = tail
        .trim()
        .strip_prefix("checksum:")
        .ok_or_else(|| bad(body.lines().count(), "missing checksum line"))?
        .trim()
        .parse()
        .map_err(|_| bad(body.lines().count(), "bad checksum"))?;
    let header = body.lines().next().unwrap_or_default();
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) || parts.next() != Some(FORMAT_VERSION) {
        return Err(CacheError::Version(header.to_string()));
    }
    let computed = fnv1a64(body.as_bytes());
    if computed != stored {
        return Err(CacheError::Checksum { stored, computed });
    }
    let k: u32 = parts.next().and_then(|t| t.strip_prefix("k=")).ok_or_else(|| bad(0, "missing k")).and_then(|t| parse_num(t, 0, "k"))?;
    let mut records = Vec::new();
    let mut leq_pairs = Vec::new();
    let mut n_triples = Vec::new();
    for (idx, line) in body.lines().enumerate().skip(1) {
        if let Some(rest) = line.strip_prefix("leq:") {
            let ids: Vec<usize> = rest.split_whitespace().map(|t| parse_num(t, idx, "class id")).collect::<Result<_, _>>()?;
            let (&l, above) = ids.split_first().ok_or_else(|| bad(idx, "empty leq line"))?;
            leq_pairs.extend(above.iter().map(|&h| (l, h)));
        } else if let Some(rest) = line.strip_prefix("n:") {
            let t: Vec<&str> = rest.split_whitespace().collect();
            if t.len() != 3 {
                return Err(bad(idx, "n line needs L H n"));
            }
            n_triples.push((parse_num(t[0], idx, "class id")?, parse_num(t[1], idx, "class id")?, parse_num(t[2], idx, "count")?));
        } else {
            let f: Vec<&str> = line.splitn(5, '|').collect();
            if f.len() != 5 {
                return Err(bad(idx, "class line needs 5 fields"));
            }
            let id: usize = parse_num(f[0], idx, "class id")?;
            if id != records.len() {
                return Err(bad(idx, format!("class id {id} out of sequence")));
            }
            let gens = f[3].strip_prefix("generators=").ok_or_else(|| bad(idx, "missing generators="))?;
            let generators = gens
                .split(';')
                .filter(|g| !g.is_empty())
                .map(|g| Perm::parse_cycles(k as usize, g).map_err(CacheError::from))
                .collect::<Result<Vec<_>, _>>()?;
            records.push(ClassRecord {
                order: parse_num(f[1], idx, "order")?,
                normalizer_order: parse_num(f[2], idx, "normalizer order")?,
                generators,
                label: f[4].to_string(),
            });
        }
    }
    Ok(SubgroupLattice::from_parts(k, &records, &leq_pairs, &n_triples)?)
}

/// Where a lattice came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeOrigin {
    Built,
    Loaded(PathBuf),
    /// Built after the cache file failed to load; the reason is kept.
    Rebuilt(PathBuf, String),
}

pub fn cache_path(dir: &Path, k: u32) -> PathBuf {
    dir.join(format!("burnside-lattice-k{k}.txt"))
}

/// Default cache directory: `$XDG_CACHE_HOME/symbif` or `$HOME/.cache/symbif`.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Some(x) = std::env::var_os("XDG_CACHE_HOME").filter(|v| !v.is_empty()) {
        return Some(PathBuf::from(x).join("symbif"));
    }
    std::env::var_os("HOME").filter(|v| !v.is_empty()).map(|h| PathBuf::from(h).join(".cache").join("symbif"))
}

/// Loads the lattice from `dir` if a valid cache exists, else builds and stores it.
/// A failed write is not an error; the lattice is still returned.
pub fn obtain_lattice(k: u32, dir: Option<&Path>) -> Result<(SubgroupLattice, LatticeOrigin), symbif_core::Error> {
    let Some(dir) = dir else {
        return Ok((build_lattice(k)?, LatticeOrigin::Built));
    };
    let path = cache_path(dir, k);
    let mut failure = None;
    if let Ok(text) = fs::read_to_string(&path) {
        match load_lattice(&text) {
            Ok(l) if l.k() == k => return Ok((l, LatticeOrigin::Loaded(path))),
            Ok(l) => failure = Some(format!("cache holds k = {}", l.k())),
            Err(e) => failure = Some(e.to_string()),
        }
    }
    let lattice = build_lattice(k)?;
    if fs::create_dir_all(dir).is_ok() {
        let tmp = path.with_extension("tmp");
        if fs::write(&tmp, serialize_lattice(&lattice)).is_ok() {
            let _ = fs::rename(&tmp, &path);
        }
    }
    let origin = match failure {
        Some(reason) => LatticeOrigin::Rebuilt(path, reason),
        None => LatticeOrigin::Built,
    };
    Ok((lattice, origin))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_identical() {
        for k in [4, 5] {
            let l = build_lattice(k).unwrap();
            let text = serialize_lattice(&l);
            let back = load_lattice(&text).unwrap();
            assert_eq!(serialize_lattice(&back), text);
            assert_eq!(back.len(), l.len());
        }
    }

    #[test]
    fn rejects_tampering() {
        let text = serialize_lattice(&build_lattice(4).unwrap());
        let tampered = text.replacen("|24|", "|12|", 1);
        assert!(matches!(load_lattice(&tampered), Err(CacheError::Checksum { .. })));
        let old = text.replacen("v1", "v0", 1);
        assert!(matches!(load_lattice(&old), Err(CacheError::Version(_))));
        assert!(load_lattice("").is_err());
    }

    #[test]
    fn consistent_but_wrong_orders_fail_validation() {
        let text = serialize_lattice(&build_lattice(4).unwrap());
        let body_end = text.trim_end_matches('\n').rfind('\n').unwrap() + 1;
        let body = text[..body_end].replacen("1|2|", "1|3|", 1);
        let forged = format!("{body}checksum: {}\n", fnv1a64(body.as_bytes()));
        assert!(matches!(load_lattice(&forged), Err(CacheError::Core(_))));
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
    }
}
