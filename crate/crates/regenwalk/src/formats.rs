//! On-disk formats. CSV files are UTF-8, comma separated, with a header row
//! and LF line endings; floats use Rust's shortest round-trip representation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use regenwalk_core::enumerate::{CountTable, WalkClass};
use regenwalk_core::renewal::StepLaw;
use regenwalk_core::sampler::Skeleton;
use regenwalk_core::stats::Ensemble;
use regenwalk_core::{FrameSplit, LatticeSite};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

const CACHE_MAGIC: &[u8; 8] = b"RGWCOUNT";
const CACHE_VERSION: u32 = 1;

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn read_file(path: &Path, command: &'static str) -> CliResult<Vec<u8>> {
    match fs::read(path) {
        Ok(b) => Ok(b),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(CliError::MissingInput {
            path: path.to_path_buf(),
            command,
        }),
        Err(e) => Err(CliError::io(path, e)),
    }
}

fn read_text(path: &Path, command: &'static str) -> CliResult<String> {
    String::from_utf8(read_file(path, command)?).map_err(|_| CliError::format(path, "not UTF-8"))
}

/// Binary count cache, all integers little endian:
/// magic, version u32, d u8, class u8, L u32, endpoint count u64, then per
/// endpoint in increasing order `d` i64 coordinates and `L + 1` u128 counts.
pub fn encode_count_cache(table: &CountTable) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.push(table.dim() as u8);
    out.push(table.class().tag());
    out.extend_from_slice(&(table.cutoff() as u32).to_le_bytes());
    out.extend_from_slice(&(table.num_endpoints() as u64).to_le_bytes());
    for (site, row) in table.iter() {
        for c in site.coords() {
            out.extend_from_slice(&c.to_le_bytes());
        }
        for c in row {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.at..self.at + n)?;
        self.at += n;
        Some(s)
    }

    fn array<const N: usize>(&mut self) -> Option<[u8; N]> {
        self.take(N).map(|s| s.try_into().expect("length checked"))
    }
}

pub fn decode_count_cache(bytes: &[u8], path: &Path) -> CliResult<CountTable> {
    let truncated = || CliError::format(path, "truncated count cache");
    let mut c = Cursor { bytes, at: 0 };
    if c.take(8) != Some(CACHE_MAGIC.as_slice()) {
        return Err(CliError::format(path, "not a count cache"));
    }
    let version = u32::from_le_bytes(c.array().ok_or_else(truncated)?);
    if version != CACHE_VERSION {
        return Err(CliError::format(path, format!("unsupported cache version {version}")));
    }
    let dim = c.array::<1>().ok_or_else(truncated)?[0] as usize;
    let class = WalkClass::from_tag(c.array::<1>().ok_or_else(truncated)?[0])
        .ok_or_else(|| CliError::format(path, "unknown walk class"))?;
    let cutoff = u32::from_le_bytes(c.array().ok_or_else(truncated)?) as usize;
    let endpoints = u64::from_le_bytes(c.array().ok_or_else(truncated)?);
    let mut counts = BTreeMap::new();
    let mut coords = vec![0i64; dim];
    for _ in 0..endpoints {
        for x in coords.iter_mut() {
            *x = i64::from_le_bytes(c.array().ok_or_else(truncated)?);
        }
        let row = (0..=cutoff)
            .map(|_| c.array().map(u128::from_le_bytes).ok_or_else(truncated))
            .collect::<CliResult<Vec<u128>>>()?;
        counts.insert(LatticeSite::new(&coords)?, row);
    }
    if c.at != bytes.len() {
        return Err(CliError::format(path, "trailing bytes in count cache"));
    }
    Ok(CountTable::from_parts(dim, cutoff, class, counts)?)
}

pub fn read_count_cache(path: &Path) -> CliResult<CountTable> {
    decode_count_cache(&read_file(path, "enumerate")?, path)
}

pub fn cache_name(class: WalkClass) -> String {
    format!("counts_{}.bin", class.name())
}

/// `x1..xd,N,count` for every nonzero count.
pub fn count_csv(table: &CountTable) -> String {
    let mut s = String::new();
    for k in 1..=table.dim() {
        let _ = write!(s, "x{k},");
    }
    s.push_str("N,count\n");
    for (site, row) in table.iter() {
        for (len, &c) in row.iter().enumerate().filter(|(_, &c)| c != 0) {
            for x in site.coords() {
                let _ = write!(s, "{x},");
            }
            let _ = writeln!(s, "{len},{c}");
        }
    }
    s
}

/// `N,c_N,root` with `root = c_N^{1/N}`, empty at `N = 0`.
pub fn totals_csv(counts: &[u128], roots: &[Option<f64>]) -> String {
    let mut s = String::from("N,c_N,root\n");
    for (n, (c, r)) in counts.iter().zip(roots).enumerate() {
        match r {
            Some(r) => {
                let _ = writeln!(s, "{n},{c},{r}");
            }
            None => {
                let _ = writeln!(s, "{n},{c},");
            }
        }
    }
    s
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StepEntry {
    pub t: i64,
    pub y: Vec<i64>,
    pub p: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StepLawFile {
    pub d: usize,
    pub beta: f64,
    #[serde(rename = "L")]
    pub cutoff: usize,
    pub m_hat: f64,
    pub tail_mass: f64,
    pub normalization_error: f64,
    pub mean_advance: f64,
    pub transverse_variance: f64,
    pub renewal_variance: f64,
    pub steps: Vec<StepEntry>,
    pub config: ExperimentConfig,
}

impl StepLawFile {
    pub fn new(law: &StepLaw, config: &ExperimentConfig) -> Self {
        Self {
            d: law.dim(),
            beta: law.beta(),
            cutoff: law.cutoff(),
            m_hat: law.m_hat(),
            tail_mass: law.tail_mass(),
            normalization_error: (law.total_mass() - 1.0).abs(),
            mean_advance: law.mean_advance(),
            transverse_variance: law.transverse_variance(),
            renewal_variance: law.renewal_variance(),
            steps: law
                .steps()
                .iter()
                .map(|(x, p)| StepEntry {
                    t: x.t(),
                    y: x.y().to_vec(),
                    p: *p,
                })
                .collect(),
            config: config.clone(),
        }
    }

    pub fn to_law(&self) -> regenwalk_core::Result<StepLaw> {
        let steps = self
            .steps
            .iter()
            .map(|s| Ok((FrameSplit::new(s.t, &s.y)?, s.p)))
            .collect::<regenwalk_core::Result<Vec<_>>>()?;
        StepLaw::from_parts(self.d, self.beta, self.cutoff, self.m_hat, self.tail_mass, steps)
    }
}

pub fn read_step_law(path: &Path) -> CliResult<StepLaw> {
    let text = read_text(path, "calibrate")?;
    let file: StepLawFile =
        serde_json::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))?;
    Ok(file.to_law()?)
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable");
    v.push(b'\n');
    v
}

fn transverse_header(prefix: &str, ydim: usize) -> String {
    (1..=ydim).map(|k| format!(",{prefix}_{k}")).collect()
}

/// `replicate,k,step_index,t,y_1..` with `k` the number of increments and
/// `step_index` running from 1 to `k`.
pub fn skeleton_csv(skeletons: &[Skeleton], ydim: usize) -> String {
    let mut s = format!("replicate,k,step_index,t{}\n", transverse_header("y", ydim));
    for (r, sk) in skeletons.iter().enumerate() {
        let k = sk.len();
        for (i, x) in sk.increments().iter().enumerate() {
            let _ = write!(s, "{r},{k},{},{}", i + 1, x.t());
            for c in x.y() {
                let _ = write!(s, ",{c}");
            }
            s.push('\n');
        }
    }
    s
}

fn parse<T: std::str::FromStr>(field: Option<&str>, path: &Path, line: usize) -> CliResult<T> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| CliError::format(path, format!("bad field on line {line}")))
}

pub fn read_skeleton_csv(path: &Path) -> CliResult<Vec<Skeleton>> {
    let text = read_text(path, "sample")?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::format(path, "empty file"))?;
    let ydim = header.split(',').count().checked_sub(4).filter(|&d| d >= 1).ok_or_else(|| {
        CliError::format(path, "expected columns replicate,k,step_index,t,y_1..")
    })?;
    let mut out = Vec::new();
    let mut current: Vec<FrameSplit> = Vec::new();
    let mut current_rep = 0usize;
    let mut y = vec![0i64; ydim];
    for (i, line) in lines.enumerate() {
        let no = i + 2;
        let mut f = line.split(',');
        let rep: usize = parse(f.next(), path, no)?;
        let _k: usize = parse(f.next(), path, no)?;
        let _idx: usize = parse(f.next(), path, no)?;
        let t: i64 = parse(f.next(), path, no)?;
        for c in y.iter_mut() {
            *c = parse(f.next(), path, no)?;
        }
        if rep != current_rep {
            if rep != current_rep + 1 {
                return Err(CliError::format(path, format!("replicates out of order on line {no}")));
            }
            out.push(Skeleton::new(std::mem::take(&mut current))?);
            current_rep = rep;
        }
        current.push(FrameSplit::new(t, &y)?);
    }
    if !current.is_empty() {
        out.push(Skeleton::new(current)?);
    }
    Ok(out)
}

/// `replicate,t,Y_1..` for each replicate and grid time.
pub fn process_csv(ensemble: &Ensemble) -> String {
    let ydim = ensemble.transverse_dim();
    let mut s = format!("replicate,t{}\n", transverse_header("Y", ydim));
    for r in 0..ensemble.replicas() {
        for (g, t) in ensemble.grid().iter().enumerate() {
            let _ = write!(s, "{r},{t}");
            for c in 0..ydim {
                let _ = write!(s, ",{}", ensemble.value(r, g, c));
            }
            s.push('\n');
        }
    }
    s
}

pub fn read_process_csv(path: &Path, n: i64, seed: u64, law_id: String) -> CliResult<Ensemble> {
    let text = read_text(path, "sample")?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::format(path, "empty file"))?;
    let ydim = header
        .split(',')
        .count()
        .checked_sub(2)
        .filter(|&d| d >= 1)
        .ok_or_else(|| CliError::format(path, "expected columns replicate,t,Y_1.."))?;
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let no = i + 2;
        let mut f = line.split(',');
        let rep: usize = parse(f.next(), path, no)?;
        let t: f64 = parse(f.next(), path, no)?;
        if rep == 0 {
            grid.push(t);
        } else if grid.get(i % grid.len().max(1)) != Some(&t) {
            return Err(CliError::format(path, format!("grid mismatch on line {no}")));
        }
        for _ in 0..ydim {
            values.push(parse::<f64>(f.next(), path, no)?);
        }
    }
    Ok(Ensemble::new(n, grid, ydim, values, seed, law_id)?)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: ExperimentConfig,
    pub files: Vec<ManifestEntry>,
}

/// Files written by one command, recorded with their hashes in
/// `<command>.manifest.json` next to them.
pub struct OutputSet<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    files: Vec<ManifestEntry>,
}

impl<'a> OutputSet<'a> {
    pub fn new(command: &'static str, config: &'a ExperimentConfig) -> Self {
        Self {
            command,
            config,
            files: Vec::new(),
        }
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        write_file(&self.config.path(name), bytes)?;
        self.files.push(ManifestEntry {
            file: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn finish(self) -> CliResult<Vec<String>> {
        let names = self.files.iter().map(|f| f.file.clone()).collect();
        let manifest = Manifest {
            command: self.command.to_string(),
            config: self.config.clone(),
            files: self.files,
        };
        write_file(
            &self.config.path(&format!("{}.manifest.json", self.command)),
            &to_json(&manifest),
        )?;
        Ok(names)
    }
}
