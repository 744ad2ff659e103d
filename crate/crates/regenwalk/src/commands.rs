use std::fmt::Write as _;

use serde::Serialize;

use regenwalk_core::enumerate::{
    enumerate_counts, exact_conditioned_skeleton_law, product_skeleton_law, SkeletonLaw, WalkClass,
};
use regenwalk_core::renewal::{step_law_from_table, StepLaw};
use regenwalk_core::sampler::{
    default_box_radius, dp_partition, renewal_skeleton_law, sample_ensemble, sample_skeleton,
    ExhaustiveWalkSampler, Skeleton, MAX_LEAKAGE,
};
use regenwalk_core::stats::{
    bridge_kernel, empirical_covariance, fit_bridge_covariance, gap_statistic, ks_marginal,
    mean_path, shrinking_statistic,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::formats::{
    cache_name, count_csv, encode_count_cache, read_count_cache, read_process_csv,
    read_skeleton_csv, read_step_law, sha256_hex, skeleton_csv, process_csv, to_json, totals_csv,
    OutputSet, StepLawFile,
};

pub const STEP_LAW_FILE: &str = "step_law.json";
pub const ORACLE_TOLERANCE: f64 = 1e-12;
pub const REL_RMS_THRESHOLD: f64 = 0.10;
pub const KS_P_THRESHOLD: f64 = 0.01;
/// Largest `n` the exhaustive oracle accepts, per dimension.
pub fn oracle_max_n(d: usize) -> i64 {
    match d {
        2 => 6,
        3 => 4,
        _ => 3,
    }
}

/// Runs `f` on a pool of `config.threads` workers (0: rayon's default).
pub fn with_pool<T: Send>(
    config: &ExperimentConfig,
    f: impl FnOnce() -> CliResult<T> + Send,
) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(f)
}

/// Seed of the ensemble at distance `n`, so that ensembles at different `n`
/// use unrelated streams.
pub fn ensemble_seed(seed: u64, n: i64) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn skeleton_file(n: i64) -> String {
    format!("skeletons_n{n}.csv")
}

pub fn process_file(n: i64) -> String {
    format!("process_n{n}.csv")
}

pub fn cmd_enumerate(config: &ExperimentConfig) -> CliResult<Vec<String>> {
    let mut out = OutputSet::new("enumerate", config);
    for class in [WalkClass::All, WalkClass::Bridge, WalkClass::IrreducibleBridge] {
        let table = enumerate_counts(config.d, config.cutoff, class)?;
        out.write(&cache_name(class), &encode_count_cache(&table))?;
        out.write(&format!("counts_{}.csv", class.name()), count_csv(&table).as_bytes())?;
        if class == WalkClass::All {
            let totals = table.total_counts()?;
            out.write("totals.csv", totals_csv(&totals.counts, &totals.roots).as_bytes())?;
        }
    }
    out.finish()
}

pub fn cmd_calibrate(config: &ExperimentConfig) -> CliResult<Vec<String>> {
    let path = config.path(&cache_name(WalkClass::IrreducibleBridge));
    let irr = read_count_cache(&path)?;
    if irr.dim() != config.d || irr.cutoff() != config.cutoff {
        return Err(CliError::Config(format!(
            "{} holds d = {}, L = {} but the config asks for d = {}, L = {}",
            path.display(),
            irr.dim(),
            irr.cutoff(),
            config.d,
            config.cutoff
        )));
    }
    let law = step_law_from_table(&irr, config.beta)?;
    let mut out = OutputSet::new("calibrate", config);
    out.write(STEP_LAW_FILE, &to_json(&StepLawFile::new(&law, config)))?;
    out.finish()
}

fn load_law(config: &ExperimentConfig) -> CliResult<(StepLaw, String)> {
    let path = config.path(STEP_LAW_FILE);
    let law = read_step_law(&path)?;
    if law.dim() != config.d {
        return Err(CliError::Config(format!(
            "{} is for d = {}, config has d = {}",
            path.display(),
            law.dim(),
            config.d
        )));
    }
    let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
    Ok((law, sha256_hex(&bytes)[..16].to_string()))
}

#[derive(Serialize)]
struct SampleSummary<'a> {
    n: i64,
    replicas: usize,
    seed: u64,
    law_id: &'a str,
    box_radius: i64,
    leakage: f64,
    mean_increments: f64,
    config: &'a ExperimentConfig,
}

pub fn cmd_sample(config: &ExperimentConfig) -> CliResult<Vec<String>> {
    let (law, law_id) = load_law(config)?;
    let ydim = config.d - 1;
    let mut out = OutputSet::new("sample", config);
    for &n in &config.n {
        let radius = config.box_radius.unwrap_or_else(|| default_box_radius(&law, n));
        let partition = dp_partition(&law, n, radius)?;
        if !(partition.leakage() < MAX_LEAKAGE) {
            return Err(CliError::Threshold(format!(
                "box radius {radius} leaks {:e} of the conditioned mass at n = {n} (limit {MAX_LEAKAGE:e})",
                partition.leakage()
            )));
        }
        let seed = ensemble_seed(config.seed, n);
        let (skeletons, ensemble) =
            sample_ensemble(&partition, seed, config.replicas, &config.grid, &law_id)?;
        if let Some(bad) = skeletons.iter().position(|s| s.n() != n) {
            return Err(CliError::Threshold(format!("replicate {bad} does not end at distance {n}")));
        }
        let summary = SampleSummary {
            n,
            replicas: config.replicas,
            seed,
            law_id: &law_id,
            box_radius: radius,
            leakage: partition.leakage(),
            mean_increments: skeletons.iter().map(Skeleton::len).sum::<usize>() as f64
                / skeletons.len() as f64,
            config,
        };
        out.write(&skeleton_file(n), skeleton_csv(&skeletons, ydim).as_bytes())?;
        out.write(&process_file(n), process_csv(&ensemble).as_bytes())?;
        out.write(&format!("sample_n{n}.json"), &to_json(&summary))?;
    }
    out.finish()
}

#[derive(Debug, Serialize)]
pub struct FitRow {
    pub n: i64,
    pub sigma2_hat: f64,
    pub rel_rms: f64,
}

#[derive(Debug, Serialize)]
pub struct KsRow {
    pub n: i64,
    pub t: f64,
    pub stat: f64,
    pub p: f64,
}

#[derive(Debug, Serialize)]
pub struct GapRow {
    pub n: i64,
    pub fraction: f64,
}

#[derive(Debug, Serialize)]
pub struct ShrinkRow {
    pub n: i64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Serialize)]
pub struct MeanRow {
    pub n: i64,
    pub t: f64,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    /// Fit at the largest `n`.
    pub sigma2_hat: f64,
    pub rel_rms: f64,
    pub renewal_variance: f64,
    pub fits: Vec<FitRow>,
    pub ks: Vec<KsRow>,
    pub gap: Vec<GapRow>,
    pub gap_non_increasing: bool,
    pub shrink: Vec<ShrinkRow>,
    pub mean_path: Vec<MeanRow>,
    pub config: ExperimentConfig,
}

fn csv_rows<T>(header: &str, rows: &[T], mut line: impl FnMut(&mut String, &T)) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        line(&mut s, r);
        s.push('\n');
    }
    s
}

pub fn analyze(config: &ExperimentConfig) -> CliResult<(Report, Vec<(i64, String)>)> {
    let (law, law_id) = load_law(config)?;
    let mut ns = config.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut fits = Vec::new();
    let mut ks = Vec::new();
    let mut gap = Vec::new();
    let mut means = Vec::new();
    let mut covariances = Vec::new();
    for &n in &ns {
        let ensemble = read_process_csv(
            &config.path(&process_file(n)),
            n,
            ensemble_seed(config.seed, n),
            law_id.clone(),
        )?;
        let skeletons = read_skeleton_csv(&config.path(&skeleton_file(n)))?;
        let cov = empirical_covariance(&ensemble)?;
        let grid = ensemble.grid().to_vec();
        let fit = fit_bridge_covariance(&cov, &grid)?;
        for &t in &grid {
            let r = ks_marginal(&ensemble, t, fit.sigma2_hat)?;
            ks.push(KsRow {
                n,
                t,
                stat: r.statistic,
                p: r.p_value,
            });
        }
        let mp = mean_path(&ensemble)?;
        for (g, &t) in grid.iter().enumerate() {
            means.push(MeanRow {
                n,
                t,
                mean: mp.mean[g],
                se: mp.standard_error[g],
            });
        }
        gap.push(GapRow {
            n,
            fraction: gap_statistic(&skeletons, n),
        });
        let mut c = String::from("i,j,s,t,cov,fit,residual\n");
        for &(i, j, res) in &fit.residuals {
            let (s, t) = (grid[i], grid[j]);
            let _ = writeln!(
                c,
                "{i},{j},{s},{t},{},{},{res}",
                cov.get(i, j),
                fit.sigma2_hat * bridge_kernel(s, t)
            );
        }
        covariances.push((n, c));
        fits.push(FitRow {
            n,
            sigma2_hat: fit.sigma2_hat,
            rel_rms: fit.rel_rms,
        });
    }
    let gap_non_increasing = gap.windows(2).all(|w| w[1].fraction <= w[0].fraction);

    let mut shrink = Vec::new();
    for &n in &config.shrink_n {
        if n as usize > config.cutoff || n > oracle_max_n(config.d) {
            return Err(CliError::Config(format!(
                "shrink distance {n} needs n <= L and n <= {}",
                oracle_max_n(config.d)
            )));
        }
        let sampler = ExhaustiveWalkSampler::new(config.d, n, config.beta, config.cutoff)?;
        let seed = ensemble_seed(config.seed ^ 0x5348_5249_4e4b, n);
        let stats = (0..config.shrink_samples)
            .map(|r| {
                let walk = sampler.sample(seed, r as u64);
                let sk = Skeleton::of_walk(&walk)?;
                shrinking_statistic(&walk, &sk, n)
            })
            .collect::<regenwalk_core::Result<Vec<f64>>>()?;
        if !stats.is_empty() {
            shrink.push(ShrinkRow {
                n,
                mean: stats.iter().sum::<f64>() / stats.len() as f64,
                max: stats.iter().copied().fold(0.0, f64::max),
            });
        }
    }

    let last = fits.last().expect("n is non-empty");
    let report = Report {
        sigma2_hat: last.sigma2_hat,
        rel_rms: last.rel_rms,
        renewal_variance: law.renewal_variance(),
        fits,
        ks,
        gap,
        gap_non_increasing,
        shrink,
        mean_path: means,
        config: config.clone(),
    };
    Ok((report, covariances))
}

pub fn cmd_analyze(config: &ExperimentConfig, check: bool) -> CliResult<Vec<String>> {
    let (report, covariances) = analyze(config)?;
    let mut out = OutputSet::new("analyze", config);
    out.write("report.json", &to_json(&report))?;
    out.write(
        "fit.csv",
        csv_rows("n,sigma2_hat,rel_rms", &report.fits, |s, r| {
            let _ = write!(s, "{},{},{}", r.n, r.sigma2_hat, r.rel_rms);
        })
        .as_bytes(),
    )?;
    out.write(
        "ks.csv",
        csv_rows("n,t,stat,p", &report.ks, |s, r| {
            let _ = write!(s, "{},{},{},{}", r.n, r.t, r.stat, r.p);
        })
        .as_bytes(),
    )?;
    out.write(
        "gap.csv",
        csv_rows("n,fraction", &report.gap, |s, r| {
            let _ = write!(s, "{},{}", r.n, r.fraction);
        })
        .as_bytes(),
    )?;
    out.write(
        "shrink.csv",
        csv_rows("n,mean,max", &report.shrink, |s, r| {
            let _ = write!(s, "{},{},{}", r.n, r.mean, r.max);
        })
        .as_bytes(),
    )?;
    out.write(
        "mean_path.csv",
        csv_rows("n,t,mean,se", &report.mean_path, |s, r| {
            let _ = write!(s, "{},{},{},{}", r.n, r.t, r.mean, r.se);
        })
        .as_bytes(),
    )?;
    for (n, c) in &covariances {
        out.write(&format!("covariance_n{n}.csv"), c.as_bytes())?;
    }
    let files = out.finish()?;
    if check {
        let mut failed = Vec::new();
        for f in &report.fits {
            if f.rel_rms > REL_RMS_THRESHOLD {
                failed.push(format!("rel_rms {} > {REL_RMS_THRESHOLD} at n = {}", f.rel_rms, f.n));
            }
        }
        for k in report.ks.iter().filter(|k| (k.t - 0.5).abs() < 1e-12) {
            if k.p <= KS_P_THRESHOLD {
                failed.push(format!("KS p = {:e} at t = 0.5, n = {}", k.p, k.n));
            }
        }
        if !report.gap_non_increasing {
            failed.push("gap fractions increase with n".into());
        }
        if !failed.is_empty() {
            return Err(CliError::Threshold(failed.join("; ")));
        }
    }
    Ok(files)
}

#[derive(Debug, Serialize)]
pub struct OracleRow {
    pub n: i64,
    pub skeletons: usize,
    pub max_abs_difference: f64,
    pub exhaustive_total: f64,
    pub product_total: f64,
    pub sampler_replicas: usize,
    /// TV distance between sampled frequencies and the renewal law the sampler targets.
    pub sampler_tv_renewal: f64,
    /// TV distance between sampled frequencies and the exhaustive law.
    pub sampler_tv_exhaustive: f64,
    /// TV distance between the renewal law and the exhaustive law.
    pub renewal_tv_exhaustive: f64,
}

#[derive(Debug, Serialize)]
struct OracleReport<'a> {
    rows: &'a [OracleRow],
    config: &'a ExperimentConfig,
}

pub fn skeleton_label(s: &Skeleton) -> String {
    let parts: Vec<String> = s
        .increments()
        .iter()
        .map(|x| {
            let y: Vec<String> = x.y().iter().map(i64::to_string).collect();
            format!("({};{})", x.t(), y.join(";"))
        })
        .collect();
    parts.join(" ")
}

/// Empirical law of `replicas` backward-sampled skeletons.
pub fn sampled_law(law: &StepLaw, n: i64, replicas: usize, seed: u64) -> CliResult<SkeletonLaw> {
    use rayon::prelude::*;
    let partition = dp_partition(law, n, default_box_radius(law, n))?;
    let draws = (0..replicas)
        .into_par_iter()
        .map(|r| sample_skeleton(&partition, seed, r as u64))
        .collect::<regenwalk_core::Result<Vec<Skeleton>>>()?;
    let mut counts = std::collections::BTreeMap::new();
    for s in draws {
        *counts.entry(s).or_insert(0usize) += 1;
    }
    Ok(SkeletonLaw {
        n,
        probabilities: counts
            .into_iter()
            .map(|(s, c)| (s, c as f64 / replicas as f64))
            .collect(),
    })
}

pub fn cmd_oracle(config: &ExperimentConfig) -> CliResult<Vec<String>> {
    let limit = oracle_max_n(config.d);
    if let Some(&n) = config.n.iter().find(|&&n| n > limit || n as usize > config.cutoff) {
        return Err(CliError::Config(format!(
            "oracle needs n <= {limit} and n <= L; got n = {n}"
        )));
    }
    let irr = enumerate_counts(config.d, config.cutoff, WalkClass::IrreducibleBridge)?;
    let law = step_law_from_table(&irr, config.beta)?;
    let mut out = OutputSet::new("oracle", config);
    let mut rows = Vec::new();
    for &n in &config.n {
        let exact = exact_conditioned_skeleton_law(config.d, n, config.beta, config.cutoff)?;
        let product = product_skeleton_law(&irr, n, config.beta)?;
        let renewal = renewal_skeleton_law(&law, n, 1e-15)?;
        let sampled = sampled_law(&law, n, config.replicas, ensemble_seed(config.seed, n))?;
        let mut csv = String::from("skeleton,exhaustive,product,renewal,sampled\n");
        let mut keys: Vec<&Skeleton> = exact.probabilities.keys().collect();
        keys.extend(renewal.probabilities.keys().filter(|s| !exact.probabilities.contains_key(*s)));
        keys.sort();
        for s in keys {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                skeleton_label(s),
                exact.probability(s),
                product.probability(s),
                renewal.probability(s),
                sampled.probability(s)
            );
        }
        out.write(&format!("oracle_n{n}.csv"), csv.as_bytes())?;
        rows.push(OracleRow {
            n,
            skeletons: exact.len(),
            max_abs_difference: exact.max_abs_difference(&product),
            exhaustive_total: exact.total(),
            product_total: product.total(),
            sampler_replicas: config.replicas,
            sampler_tv_renewal: sampled.total_variation(&renewal),
            sampler_tv_exhaustive: sampled.total_variation(&exact),
            renewal_tv_exhaustive: renewal.total_variation(&exact),
        });
    }
    out.write("oracle.json", &to_json(&OracleReport { rows: &rows, config }))?;
    let files = out.finish()?;
    if let Some(bad) = rows.iter().find(|r| !(r.max_abs_difference <= ORACLE_TOLERANCE)) {
        return Err(CliError::Threshold(format!(
            "exhaustive and product skeleton laws differ by {:e} at n = {}",
            bad.max_abs_difference, bad.n
        )));
    }
    Ok(files)
}
