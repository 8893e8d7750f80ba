//! Batch front end behind the `contgibbs` binary.
//!
//! Every file written here carries the master seed and a schema version,
//! and reruns with identical arguments produce byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Discrete, Poisson};

use crate::bonds::{sample_bonds, BondFile, BondSet};
use crate::error::{Error, Result};
use crate::particles::{Configuration, ConfigurationFile, Norm, Window};
use crate::potentials::ModelSpec;
use crate::rng::{rng_stream, substream};
use crate::sampler::{boundary_ring, run_chain_detailed, GibbsParams};
use crate::stats::{count_histogram, counts_in, histogram, pair_distances, spin_counts, PairFilter};
use crate::transform::{inverse_of, inverse_transform, transform_particles, Direction, TaperParams, TransformFile};
use crate::verify::{
    check_density_identity, check_good_trend, check_invariance_statistical, check_lekrit_toy, check_transform_suite,
    DensityConfig, GoodTrendConfig, InvarianceConfig, SuiteReport, TransformSuiteConfig, NEGATIVE_CONTROL_TILT,
};

pub const CLI_SCHEMA_VERSION: u32 = 1;
const SAMPLES_KIND: &str = "contgibbs-samples";
const BONDS_KIND: &str = "contgibbs-bonds";
/// The only environment variable read: overrides `--out`.
pub const OUT_ENV: &str = "CONTGIBBS_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "contgibbs", version, about = "Continuum Gibbs sampling, deformed translations and their checks")]
pub struct Cli {
    /// Model file (JSON); the Widom–Rowlinson model with r₀ = 1, z = 0.2 when omitted.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the Gibbs chain and write JSON-lines samples plus a manifest.
    Sample(SampleArgs),
    /// Apply the deformed translation to one configuration.
    Transform(TransformArgs),
    /// Run a verification suite; exits 1 when a check fails.
    Verify(VerifyArgs),
    /// Count, pair-distance and spin statistics of a samples file.
    Stats(StatsArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SampleArgs {
    /// Half-width r of the window Λ_r.
    #[arg(long, default_value_t = 4.0)]
    pub window: f64,
    #[arg(long, default_value_t = 1000)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 100)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub thinning: usize,
    /// Overrides the model's activity.
    #[arg(long)]
    pub activity: Option<f64>,
    /// Width of a Poisson boundary ring outside the window; none when omitted.
    #[arg(long)]
    pub boundary_width: Option<f64>,
    /// Also sample a bond set per configuration into bonds.jsonl.
    #[arg(long)]
    pub bonds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum DirectionArg {
    Fwd,
    Bwd,
    Inv,
}

#[derive(Args, Debug, Clone)]
pub struct TransformArgs {
    /// Configuration JSON, or a samples file together with --index.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Bond file (JSON or bonds.jsonl); bonds are sampled when omitted.
    #[arg(long)]
    pub bonds: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Fwd)]
    pub direction: DirectionArg,
    /// "tau,R,n,nprime,delta".
    #[arg(long, default_value = "0.5,2,6,1,0.25")]
    pub taper: String,
    /// Also invert the result and report the largest position error.
    #[arg(long)]
    pub round_trip: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lekrit,
    Transform,
    Density,
    Invariance,
    GoodTrend,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Run the negative control of the density or invariance suite.
    #[arg(long)]
    pub negative_control: bool,
    /// Overrides the suite's sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// "tau,R,n,nprime,delta" for the transform and density suites.
    #[arg(long)]
    pub taper: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct StatsArgs {
    /// A samples file written by `sample`.
    #[arg(long)]
    pub samples: PathBuf,
    /// Half-widths of the centred count regions.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub regions: Vec<f64>,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    /// Upper end of the pair-distance histogram.
    #[arg(long, default_value_t = 4.0)]
    pub max_distance: f64,
}

/// First line of a JSON-lines file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonlHeader {
    pub kind: String,
    pub schema_version: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleLine {
    pub index: usize,
    #[serde(flatten)]
    pub configuration: ConfigurationFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BondLine {
    pub index: usize,
    #[serde(flatten)]
    pub bonds: BondFile,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub seed: u64,
    pub git_describe: String,
    pub model: ModelSpec,
    pub parameters: SampleArgs,
    pub samples: usize,
    pub samples_sha256: String,
    pub acceptance: [f64; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformOutput {
    pub seed: u64,
    pub taper: String,
    pub bonds_sampled: bool,
    #[serde(flatten)]
    pub result: TransformFile,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTrip {
    pub schema_version: u32,
    pub seed: u64,
    pub max_position_error: f64,
}

pub fn default_model() -> ModelSpec {
    ModelSpec::widom_rowlinson(1.0, 0.2)
}

fn load_model(path: Option<&Path>) -> Result<ModelSpec> {
    path.map_or_else(|| Ok(default_model()), ModelSpec::load)
}

fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let p = dir.join(name);
    fs::write(&p, contents)?;
    Ok(p)
}

fn jsonl<T: Serialize>(header: &JsonlHeader, rows: &[T]) -> Result<String> {
    let mut s = serde_json::to_string(header)?;
    s.push('\n');
    for r in rows {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

/// Runs the chain; writes `samples.jsonl`, `manifest.json` and, on
/// request, `bonds.jsonl`.
pub fn cmd_sample(model: &ModelSpec, args: &SampleArgs, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    let window = Window::new(args.window)?;
    let pot = model.potential()?;
    let mut gp = GibbsParams::new(pot.clone(), args.activity.unwrap_or(model.activity), window);
    gp.sweeps = args.sweeps;
    gp.burn_in = args.burn_in;
    gp.thinning = args.thinning;
    if let Some(w) = args.boundary_width {
        gp.boundary = boundary_ring(window, w, gp.activity, &pot, &mut rng_stream(seed, "cli/boundary"))?;
    }
    gp.validate()?;
    let dec = if args.bonds { Some(model.build()?) } else { None };
    let run = run_chain_detailed(&gp, &mut rng_stream(seed, "cli/chain"))?;
    let header = |kind: &str| JsonlHeader { kind: kind.into(), schema_version: CLI_SCHEMA_VERSION, seed };
    let lines: Vec<SampleLine> = run
        .samples
        .iter()
        .enumerate()
        .map(|(index, c)| SampleLine { index, configuration: c.into() })
        .collect();
    let text = jsonl(&header(SAMPLES_KIND), &lines)?;
    let mut files = vec![write(out, "samples.jsonl", &text)?];
    if let Some(dec) = &dec {
        let rows = run
            .samples
            .iter()
            .enumerate()
            .map(|(index, c)| {
                let b = sample_bonds(c, dec, &window, &mut substream(seed, "cli/bonds", index as u64));
                Ok(BondLine { index, bonds: BondFile::new(c, &b)? })
            })
            .collect::<Result<Vec<_>>>()?;
        files.push(write(out, "bonds.jsonl", &jsonl(&header(BONDS_KIND), &rows)?)?);
    }
    let d = &run.diagnostics;
    let rate = |k: usize| if d.proposed[k] == 0 { 0.0 } else { d.accepted[k] as f64 / d.proposed[k] as f64 };
    let manifest = Manifest {
        schema_version: CLI_SCHEMA_VERSION,
        seed,
        git_describe: git_describe(),
        model: model.clone(),
        parameters: args.clone(),
        samples: run.samples.len(),
        samples_sha256: sha256_hex(text.as_bytes()),
        acceptance: [rate(0), rate(1), rate(2)],
    };
    files.push(write(out, "manifest.json", &serde_json::to_string_pretty(&manifest)?)?);
    Ok(files)
}

/// Splits a JSON-lines file into its header and body lines, or returns
/// `None` when the file is a single JSON document.
fn read_jsonl(text: &str, kind: &str) -> Result<Option<(JsonlHeader, Vec<String>)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let Some(first) = lines.next() else { return Err(Error::EmptySamples) };
    match serde_json::from_str::<JsonlHeader>(first) {
        Ok(h) if h.kind == kind => {
            if h.schema_version != CLI_SCHEMA_VERSION {
                return Err(Error::Schema {
                    field: "schema_version".into(),
                    message: format!("expected {CLI_SCHEMA_VERSION}, got {}", h.schema_version),
                });
            }
            Ok(Some((h, lines.map(str::to_string).collect())))
        }
        Ok(h) => Err(Error::Schema { field: "kind".into(), message: format!("expected {kind}, got {}", h.kind) }),
        Err(_) => Ok(None),
    }
}

fn line_error(line: usize, e: serde_json::Error) -> Error {
    Error::Schema { field: format!("line {line}"), message: e.to_string() }
}

/// All configurations of a samples file with the seed that produced them.
pub fn read_samples(path: &Path) -> Result<(u64, Vec<Configuration>)> {
    let text = fs::read_to_string(path)?;
    let Some((h, lines)) = read_jsonl(&text, SAMPLES_KIND)? else {
        return Err(Error::Schema { field: "line 1".into(), message: "missing samples header".into() });
    };
    let configs = lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let s: SampleLine = serde_json::from_str(l).map_err(|e| line_error(i + 2, e))?;
            s.configuration.try_into()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((h.seed, configs))
}

fn read_configuration(path: &Path, index: usize) -> Result<Configuration> {
    let text = fs::read_to_string(path)?;
    match read_jsonl(&text, SAMPLES_KIND)? {
        None => Configuration::from_json(&text),
        Some((_, lines)) => {
            let l = lines.get(index).ok_or_else(|| {
                Error::Parameter(format!("index {index} out of range for {} samples", lines.len()))
            })?;
            let s: SampleLine = serde_json::from_str(l).map_err(|e| line_error(index + 2, e))?;
            s.configuration.try_into()
        }
    }
}

fn read_bonds(path: &Path, index: usize, config: &Configuration) -> Result<BondSet> {
    let text = fs::read_to_string(path)?;
    let file = match read_jsonl(&text, BONDS_KIND)? {
        None => serde_json::from_str::<BondFile>(&text)?,
        Some((_, lines)) => {
            let l = lines.get(index).ok_or_else(|| Error::Parameter(format!("no bond line {index}")))?;
            serde_json::from_str::<BondLine>(l).map_err(|e| line_error(index + 2, e))?.bonds
        }
    };
    file.bonds_for(config)
}

/// Writes `transform.json`, `transform.csv` and, with `--round-trip`,
/// `round_trip.json`. Returns the files and the round-trip error.
pub fn cmd_transform(model: &ModelSpec, args: &TransformArgs, seed: u64, out: &Path) -> Result<(Vec<PathBuf>, Option<f64>)> {
    let dec = model.build()?;
    let params = TaperParams::parse(&args.taper, &dec)?;
    let config = read_configuration(&args.config, args.index)?;
    let bonds = match &args.bonds {
        Some(p) => read_bonds(p, args.index, &config)?,
        None => sample_bonds(&config, &dec, &config.window(), &mut rng_stream(seed, "cli/transform-bonds")),
    };
    let ps = config.to_vec();
    let result = match args.direction {
        DirectionArg::Fwd => transform_particles(&ps, config.interior().len(), &bonds, &params.with_direction(Direction::Forward), &dec)?,
        DirectionArg::Bwd => transform_particles(&ps, config.interior().len(), &bonds, &params.with_direction(Direction::Backward), &dec)?,
        DirectionArg::Inv => {
            let mut r = inverse_transform(&ps, &bonds, &params.with_direction(Direction::Forward), &dec)?;
            r.interior_len = config.interior().len();
            r
        }
    };
    let output = TransformOutput { seed, taper: args.taper.clone(), bonds_sampled: args.bonds.is_none(), result: result.to_file() };
    let mut files = vec![write(out, "transform.json", &serde_json::to_string_pretty(&output)?)?];
    let mut csv = format!("# contgibbs transform schema_version={CLI_SCHEMA_VERSION} seed={seed}\nindex,radius,t_map\n");
    for (i, (p, t)) in ps.iter().zip(&result.t_map).enumerate() {
        csv.push_str(&format!("{i},{},{}\n", p.radius(), t));
    }
    files.push(write(out, "transform.csv", &csv)?);
    let mut error = None;
    if args.round_trip {
        let back = match args.direction {
            DirectionArg::Inv => transform_particles(&result.particles, result.interior_len, &bonds, &params.with_direction(Direction::Forward), &dec)?,
            _ => inverse_of(&result, &params, &dec)?,
        };
        let e = back
            .particles
            .iter()
            .zip(&ps)
            .map(|(a, b)| (a.x[0] - b.x[0]).abs().max((a.x[1] - b.x[1]).abs()))
            .fold(0.0, f64::max);
        let rt = RoundTrip { schema_version: CLI_SCHEMA_VERSION, seed, max_position_error: e };
        files.push(write(out, "round_trip.json", &serde_json::to_string_pretty(&rt)?)?);
        error = Some(e);
    }
    Ok((files, error))
}

fn with_taper<T>(spec: &Option<String>, dec: &crate::potentials::DecomposedPotential, mut set: impl FnMut(&TaperParams) -> T) -> Result<Option<T>> {
    spec.as_ref().map(|s| TaperParams::parse(s, dec).map(|p| set(&p))).transpose()
}

/// Runs one suite, or lekrit, transform, density and invariance for
/// `all`. Writes `report-<suite>.json` and `.txt` per suite.
pub fn cmd_verify(model: &ModelSpec, args: &VerifyArgs, seed: u64, out: &Path) -> Result<(Vec<PathBuf>, Vec<SuiteReport>)> {
    let suites: Vec<Suite> = match args.suite {
        Suite::All => vec![Suite::Lekrit, Suite::Transform, Suite::Density, Suite::Invariance],
        s => vec![s],
    };
    let dec = model.build()?;
    let mut reports = Vec::new();
    for s in suites {
        let r = match s {
            Suite::Lekrit => {
                let mut r = check_lekrit_toy(&[0.25; 4], &[2, 0, 3, 1], seed)?;
                for c in &mut r.checks {
                    c.name = format!("uniform_4_cycle/{}", c.name);
                }
                let mut push = |name: &str, mu: &[f64], perm: &[usize]| -> Result<()> {
                    for mut c in check_lekrit_toy(mu, perm, seed)?.checks {
                        c.name = format!("{name}/{}", c.name);
                        r.push(c);
                    }
                    Ok(())
                };
                push("three_cycle", &[0.5, 0.3, 0.2], &[1, 2, 0])?;
                push("identity", &[0.5, 0.3, 0.2], &[0, 1, 2])?;
                r
            }
            Suite::Transform => {
                let mut cfg = TransformSuiteConfig::default();
                with_taper(&args.taper, &dec, |p| {
                    (cfg.tau, cfg.r_inner, cfg.n_outer, cfg.n_prime, cfg.delta) = (p.tau, p.r_inner, p.n_outer, p.n_prime, p.delta)
                })?;
                if let Some(n) = args.samples {
                    cfg.samples = n;
                }
                check_transform_suite(model, &cfg, seed)?
            }
            Suite::Density => {
                let mut cfg = DensityConfig { negative_control: args.negative_control, ..Default::default() };
                with_taper(&args.taper, &dec, |p| {
                    (cfg.tau, cfg.r_inner, cfg.n_outer, cfg.n_prime, cfg.delta) = (p.tau, p.r_inner, p.n_outer, p.n_prime, p.delta)
                })?;
                if let Some(n) = args.samples {
                    cfg.samples = n;
                }
                check_density_identity(model, &cfg, seed)?
            }
            Suite::Invariance => {
                let mut cfg = InvarianceConfig::default();
                if args.negative_control {
                    cfg.birth_tilt = NEGATIVE_CONTROL_TILT;
                }
                if let Some(n) = args.samples {
                    cfg.samples = n;
                }
                check_invariance_statistical(model, &cfg, seed)?
            }
            Suite::GoodTrend => {
                let mut cfg = GoodTrendConfig::default();
                if let Some(n) = args.samples {
                    cfg.samples = n;
                }
                check_good_trend(model, &cfg, seed)?
            }
            Suite::All => unreachable!(),
        };
        reports.push(r);
    }
    let mut files = Vec::new();
    for r in &reports {
        files.push(write(out, &format!("report-{}.json", r.suite), &r.to_json()?)?);
        files.push(write(out, &format!("report-{}.txt", r.suite), &r.to_text())?);
    }
    Ok((files, reports))
}

fn csv_header(kind: &str, seed: u64, columns: &str) -> String {
    format!("# contgibbs {kind} schema_version={CLI_SCHEMA_VERSION} seed={seed}\n{columns}\n")
}

/// Writes `counts.csv`, `pairs.csv` and `spins.csv` for a samples file.
pub fn cmd_stats(model: &ModelSpec, args: &StatsArgs, out: &Path) -> Result<Vec<PathBuf>> {
    let (seed, samples) = read_samples(&args.samples)?;
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if args.bins == 0 || !(args.max_distance > 0.0) {
        return Err(Error::Parameter("bins and max distance must be positive".into()));
    }
    let spins = model.spins as usize;
    let norm: Norm = model.norm;
    let mut counts = csv_header("counts", seed, "region,k,samples,fraction,poisson_pmf");
    let mut spin_csv = csv_header("spins", seed, "region,spin,count,fraction");
    for &r in &args.regions {
        let region = Window::new(r)?;
        let c = counts_in(&samples, &region);
        let mean = c.iter().sum::<usize>() as f64 / c.len() as f64;
        let pois = if mean > 0.0 { Some(Poisson::new(mean).map_err(|e| Error::Parameter(e.to_string()))?) } else { None };
        for (k, &h) in count_histogram(&c).iter().enumerate() {
            let pmf = pois.as_ref().map_or(if k == 0 { 1.0 } else { 0.0 }, |p| p.pmf(k as u64));
            counts.push_str(&format!("{r},{k},{h},{},{pmf}\n", h as f64 / c.len() as f64));
        }
        let sc = spin_counts(&samples, &region, spins);
        let total: u64 = sc.iter().sum();
        for (s, &n) in sc.iter().enumerate() {
            let f = if total == 0 { 0.0 } else { n as f64 / total as f64 };
            spin_csv.push_str(&format!("{r},{s},{n},{f}\n"));
        }
    }
    let outer = Window::new(args.regions.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE))?;
    let mut hists = Vec::new();
    for f in [PairFilter::All, PairFilter::Like, PairFilter::Unlike] {
        let d: Vec<f64> = samples.iter().flat_map(|s| pair_distances(s, &outer, f, &norm)).collect();
        hists.push(histogram(&d, 0.0, args.max_distance, args.bins));
    }
    let mut pairs = csv_header("pairs", seed, "bin_lo,bin_hi,all,like,unlike");
    let w = args.max_distance / args.bins as f64;
    for b in 0..args.bins {
        pairs.push_str(&format!("{},{},{},{},{}\n", b as f64 * w, (b + 1) as f64 * w, hists[0][b], hists[1][b], hists[2][b]));
    }
    Ok(vec![write(out, "counts.csv", &counts)?, write(out, "pairs.csv", &pairs)?, write(out, "spins.csv", &spin_csv)?])
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        // a pool that is already set up keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let out = std::env::var_os(OUT_ENV).map_or_else(|| cli.out.clone(), PathBuf::from);
    let model = load_model(cli.model.as_deref())?;
    let stdout = std::io::stdout();
    let mut o = stdout.lock();
    match &cli.command {
        Command::Sample(a) => {
            for f in cmd_sample(&model, a, cli.seed, &out)? {
                let _ = writeln!(o, "wrote {}", f.display());
            }
            Ok(EXIT_OK)
        }
        Command::Transform(a) => {
            let (files, err) = cmd_transform(&model, a, cli.seed, &out)?;
            for f in files {
                let _ = writeln!(o, "wrote {}", f.display());
            }
            if let Some(e) = err {
                let _ = writeln!(o, "round trip max position error {e:e}");
            }
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let (files, reports) = cmd_verify(&model, a, cli.seed, &out)?;
            for r in &reports {
                let _ = write!(o, "{}", r.to_text());
            }
            for f in files {
                let _ = writeln!(o, "wrote {}", f.display());
            }
            Ok(if reports.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Stats(a) => {
            for f in cmd_stats(&model, a, &out)? {
                let _ = writeln!(o, "wrote {}", f.display());
            }
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bonds::configuration_hash;

    fn tmp(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("contgibbs-cli-{}-{name}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    fn sample_args(sweeps: usize) -> SampleArgs {
        SampleArgs { window: 3.0, sweeps, burn_in: 10, thinning: 1, activity: None, boundary_width: None, bonds: true }
    }

    #[test]
    fn zero_sweeps_give_an_empty_samples_file_and_a_manifest() {
        let d = tmp("empty");
        cmd_sample(&default_model(), &sample_args(0), 3, &d).unwrap();
        let text = fs::read_to_string(d.join("samples.jsonl")).unwrap();
        assert_eq!(text.lines().count(), 1);
        let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["seed"], 3);
        assert_eq!(m["samples"], 0);
        let (_, s) = read_samples(&d.join("samples.jsonl")).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn sampling_is_byte_identical_under_a_seed() {
        let (a, b) = (tmp("det-a"), tmp("det-b"));
        cmd_sample(&default_model(), &sample_args(20), 5, &a).unwrap();
        cmd_sample(&default_model(), &sample_args(20), 5, &b).unwrap();
        for f in ["samples.jsonl", "bonds.jsonl"] {
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
        }
        let (seed, s) = read_samples(&a.join("samples.jsonl")).unwrap();
        assert_eq!(seed, 5);
        assert!(s.iter().any(|c| !c.is_empty()));
    }

    #[test]
    fn transform_reads_samples_and_checks_bond_hashes() {
        let d = tmp("transform");
        cmd_sample(&default_model(), &sample_args(5), 2, &d).unwrap();
        let args = TransformArgs {
            config: d.join("samples.jsonl"),
            index: 3,
            bonds: Some(d.join("bonds.jsonl")),
            direction: DirectionArg::Fwd,
            taper: "0.5,1,3,1,0.25".into(),
            round_trip: true,
        };
        let (_, err) = cmd_transform(&default_model(), &args, 2, &d.join("t")).unwrap();
        assert!(err.unwrap() < 1e-9);
        let csv = fs::read_to_string(d.join("t/transform.csv")).unwrap();
        assert!(csv.starts_with("# contgibbs transform schema_version=1 seed=2\nindex,radius,t_map\n"));
        let wrong = TransformArgs { index: 4, bonds: Some(d.join("bonds.jsonl")), ..args.clone() };
        let bonds3 = fs::read_to_string(d.join("bonds.jsonl")).unwrap();
        let line3 = bonds3.lines().nth(4).unwrap();
        fs::write(d.join("one-bond.json"), serde_json::to_string(&serde_json::from_str::<BondLine>(line3).unwrap().bonds).unwrap()).unwrap();
        let mismatch = TransformArgs { bonds: Some(d.join("one-bond.json")), ..wrong };
        let c3 = read_configuration(&d.join("samples.jsonl"), 3).unwrap();
        let c4 = read_configuration(&d.join("samples.jsonl"), 4).unwrap();
        if configuration_hash(&c3).unwrap() != configuration_hash(&c4).unwrap() {
            assert!(matches!(cmd_transform(&default_model(), &mismatch, 2, &d.join("t2")), Err(Error::HashMismatch { .. })));
        }
    }

    #[test]
    fn outer_and_inner_cases_of_the_csv() {
        let d = tmp("cases");
        let w = Window::new(50.0).unwrap();
        let outer = Configuration::new(w, vec![crate::Particle::new(20.0, 1.0, 0), crate::Particle::new(-9.0, 30.0, 1)], vec![]).unwrap();
        fs::create_dir_all(&d).unwrap();
        fs::write(d.join("outer.json"), outer.to_json().unwrap()).unwrap();
        let args = TransformArgs {
            config: d.join("outer.json"),
            index: 0,
            bonds: None,
            direction: DirectionArg::Fwd,
            taper: "0.5,2,6,1,0.25".into(),
            round_trip: false,
        };
        cmd_transform(&default_model(), &args, 0, &d).unwrap();
        let t: Vec<f64> = fs::read_to_string(d.join("transform.csv")).unwrap().lines().skip(2).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(t, vec![0.0, 0.0]);
        let inner = Configuration::new(w, vec![crate::Particle::new(0.2, 0.0, 0), crate::Particle::new(-0.5, 0.3, 0)], vec![]).unwrap();
        fs::write(d.join("inner.json"), inner.to_json().unwrap()).unwrap();
        cmd_transform(&default_model(), &TransformArgs { config: d.join("inner.json"), ..args }, 0, &d).unwrap();
        let t: Vec<f64> = fs::read_to_string(d.join("transform.csv")).unwrap().lines().skip(2).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(t, vec![0.5, 0.5]);
    }

    #[test]
    fn stats_are_deterministic_and_reject_empty_files() {
        let d = tmp("stats");
        cmd_sample(&default_model(), &SampleArgs { window: 3.0, ..sample_args(50) }, 8, &d).unwrap();
        let a = StatsArgs { samples: d.join("samples.jsonl"), regions: vec![1.0, 2.0], bins: 20, max_distance: 2.0 };
        cmd_stats(&default_model(), &a, &d.join("s1")).unwrap();
        cmd_stats(&default_model(), &a, &d.join("s2")).unwrap();
        for f in ["counts.csv", "pairs.csv", "spins.csv"] {
            assert_eq!(fs::read(d.join("s1").join(f)).unwrap(), fs::read(d.join("s2").join(f)).unwrap());
        }
        // unlike pairs never come closer than r₀ = 1
        let pairs = fs::read_to_string(d.join("s1/pairs.csv")).unwrap();
        for l in pairs.lines().skip(2) {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            if v[1] <= 1.0 {
                assert_eq!(v[4], 0.0, "{l}");
            }
        }
        let e = tmp("stats-empty");
        cmd_sample(&default_model(), &sample_args(0), 8, &e).unwrap();
        let a = StatsArgs { samples: e.join("samples.jsonl"), ..a };
        assert!(matches!(cmd_stats(&default_model(), &a, &e), Err(Error::EmptySamples)));
    }

    #[test]
    fn exit_codes() {
        let d = tmp("exit");
        let out = d.to_str().unwrap();
        assert_eq!(run(["contgibbs", "--out", out, "verify", "--suite", "lekrit"]), EXIT_OK);
        assert_eq!(run(["contgibbs", "--out", out, "verify", "--suite", "nonsense"]), EXIT_USAGE);
        fs::create_dir_all(&d).unwrap();
        fs::write(d.join("bad.json"), "{\"schema_version\": 1, \"norm\": 3}").unwrap();
        let bad = d.join("bad.json");
        assert_eq!(run(["contgibbs", "--model", bad.to_str().unwrap(), "--out", out, "verify", "--suite", "lekrit"]), EXIT_USAGE);
        let neg = run([
            "contgibbs", "--out", out, "verify", "--suite", "density", "--negative-control", "--samples", "20000",
        ]);
        assert_eq!(neg, EXIT_CHECK_FAILED);
    }
}
