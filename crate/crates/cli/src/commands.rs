use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use monadforge_core::certify::{
    certify_monad, certify_simplicity, certify_stability, CertifyOptions, Certificate, Status,
};
use monadforge_core::cohom::{euler_characteristic, exterior_power, line_cohomology, Cohomology};
use monadforge_core::exec;
use monadforge_core::monad::{LineBundleSum, MonadDescriptor, Profile};
use monadforge_core::oracle::{h0_wedge_kernel, Elimination, OracleOutcome};
use monadforge_core::picard::{SpaceSpec, Twist};

use crate::config::InstanceConfig;
use crate::report::{exit_code, markdown, RunReport, ToolInfo};
use crate::{CliError, Command, MatrixFormat, RunFlags, SEED_ENV};

pub fn dispatch(cmd: Command, out: &mut dyn io::Write) -> Result<i32, CliError> {
    match cmd {
        Command::Certify {
            config,
            out: dest,
            report,
            timing,
            flags,
        } => certify(&config, dest.as_deref(), report.as_deref(), timing, &flags, out),
        Command::Cohomology { n, twist, q } => cohomology(n, &twist, q, out),
        Command::Matrices {
            config,
            format,
            out: dest,
            profile,
        } => matrices(&config, format, dest.as_deref(), profile, out),
        Command::Sections {
            config,
            twist,
            q,
            flags,
        } => sections(&config, &twist, q, &flags, out),
        Command::CertifyGrid {
            out: dest,
            report,
            flags,
        } => certify_grid(dest.as_deref(), report.as_deref(), &flags, out),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &mut dyn io::Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

/// Reads a config and applies flag and environment overrides.
pub fn load_config(path: &Path, flags: &RunFlags) -> Result<(InstanceConfig, String), CliError> {
    let bytes = read(path)?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| CliError::Config {
        field: "config".into(),
        msg: "not valid UTF-8".into(),
    })?;
    let mut cfg = InstanceConfig::parse(&text)?;
    if let Some(p) = flags.profile {
        cfg.profile = Some(p);
    }
    if let Some(p) = flags.prime {
        cfg.prime = p;
    }
    if let Some(s) = env_seed()?.or(flags.seed) {
        cfg.seed = s;
    }
    if let Some(t) = flags.trials {
        cfg.trials = t;
    }
    if let Some(q) = flags.max_q {
        cfg.max_q = Some(q);
    }
    if let Some(b) = flags.budget {
        cfg.budget = b;
    }
    cfg.validate()?;
    Ok((cfg, digest))
}

/// Monad, stability and simplicity certificates in pipeline order.
pub fn certify_all(md: &MonadDescriptor, opts: &CertifyOptions, prime: u64) -> Result<Vec<Certificate>, CliError> {
    let monad = certify_monad(md, opts, prime)?;
    let stability = certify_stability(md, &monad, opts)?;
    let simplicity = certify_simplicity(md, &stability)?;
    Ok(vec![monad, stability, simplicity])
}

fn overall(certs: &[Certificate]) -> Status {
    certs.iter().map(|c| c.status).max().unwrap_or(Status::Inconclusive)
}

fn certify(
    config: &Path,
    out: Option<&Path>,
    report: Option<&Path>,
    timing: bool,
    flags: &RunFlags,
    sink: &mut dyn io::Write,
) -> Result<i32, CliError> {
    let (cfg, digest) = load_config(config, flags)?;
    let md = cfg.descriptor()?;
    let start = Instant::now();
    let certs = exec::with_jobs(flags.jobs, || certify_all(&md, &cfg.options(), cfg.prime))?;
    let elapsed = start.elapsed().as_millis() as u64;
    let status = overall(&certs);
    let run = RunReport {
        tool: ToolInfo::current(),
        input_sha256: digest,
        config: cfg,
        status,
        certificates: certs,
        timing_ms: timing.then_some(elapsed),
    };
    let text = run.to_json();
    match out {
        Some(p) => write(p, &text)?,
        None => emit(sink, &text)?,
    }
    if let Some(p) = report {
        let value: Value = serde_json::from_str(&text).expect("own output parses");
        write(p, &markdown(&value))?;
    }
    Ok(exit_code(status))
}

fn parse_twist(text: &str, space: &SpaceSpec) -> Result<Twist, CliError> {
    let t = Twist::parse(text).map_err(CliError::Usage)?;
    space.check_twist(&t)?;
    Ok(t)
}

fn cohomology(n: Vec<u32>, twist: &str, q: Option<usize>, sink: &mut dyn io::Write) -> Result<i32, CliError> {
    let space = SpaceSpec::new(n)?;
    let t = parse_twist(twist, &space)?;
    let top = space.total_dim() as usize;
    let degrees: Vec<usize> = match q {
        Some(q) if q > top => return Err(CliError::Usage(format!("q = {q} exceeds dim X = {top}"))),
        Some(q) => vec![q],
        None => (0..=top).collect(),
    };
    let mut out = format!("space {space}\ntwist {t}\n");
    for q in degrees {
        let _ = writeln!(out, "h^{q} = {}", line_cohomology(&space, &t, q)?);
    }
    let chi = euler_characteristic(&space, &LineBundleSum::single(t, 1))?;
    let _ = writeln!(out, "chi = {chi}");
    emit(sink, &out)?;
    Ok(0)
}

fn matrices(
    config: &Path,
    format: MatrixFormat,
    out: Option<&Path>,
    profile: Option<Profile>,
    sink: &mut dyn io::Write,
) -> Result<i32, CliError> {
    let flags = RunFlags {
        profile,
        ..Default::default()
    };
    let (cfg, _) = load_config(config, &flags)?;
    let md = cfg.descriptor()?;
    let (ext, a, b) = match format {
        MatrixFormat::Txt => ("txt", md.a_mat.to_dump(), md.b_mat.to_dump()),
        MatrixFormat::Csv => ("csv", md.a_mat.to_csv(), md.b_mat.to_csv()),
    };
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
            write(&dir.join(format!("a_mat.{ext}")), &a)?;
            write(&dir.join(format!("b_mat.{ext}")), &b)?;
        }
        None => emit(sink, &(a + &b))?,
    }
    Ok(0)
}

fn sections(
    config: &Path,
    twist: &str,
    q: usize,
    flags: &RunFlags,
    sink: &mut dyn io::Write,
) -> Result<i32, CliError> {
    let (cfg, _) = load_config(config, flags)?;
    let md = cfg.descriptor()?;
    let b = parse_twist(twist, &md.space)?;
    let rank_k = (md.middle.rank() - md.target.rank()) as usize;
    if q == 0 || q > rank_k {
        return Err(CliError::Usage(format!("q = {q} outside 1..={rank_k} (rank K = {rank_k})")));
    }
    let wedge = exterior_power(&md.middle, q as u64)?.twisted(&b);
    let ambient = Cohomology::global().h0_sum(&md.space, &wedge)?;
    let mut text = format!("h0(wedge^{q} K {b})\n");
    let code = if ambient.bits() == 0 {
        let _ = writeln!(text, "path: ambient\nambient h0: 0\nh0 = 0");
        0
    } else {
        let outcome = exec::with_jobs(flags.jobs, || h0_wedge_kernel(&md, q, &b, &cfg.options().oracle))?;
        let _ = writeln!(text, "ambient h0: {ambient}");
        match outcome {
            OracleOutcome::Computed(k) => {
                let field = match k.method {
                    Elimination::Rational => "rational".to_string(),
                    Elimination::Modular { p } => format!("mod {p}"),
                };
                let _ = writeln!(
                    text,
                    "path: elimination ({field}{})\ndomain: {}\ncodomain: {}\nrank: {}\nh0 = {}",
                    if k.probabilistic() { ", upper bound" } else { "" },
                    k.domain,
                    k.codomain,
                    k.rank,
                    k.kernel
                );
                if k.probabilistic() {
                    2
                } else {
                    0
                }
            }
            OracleOutcome::TooLarge { domain, budget } => {
                let _ = writeln!(text, "path: undecided\ndomain: {domain} exceeds budget {budget}");
                2
            }
        }
    };
    emit(sink, &text)?;
    Ok(code)
}

/// The acceptance grid `s <= 2, n_i <= 2, alpha_i <= 2, k <= 2`; the
/// homogeneous profile only exists for `s = 1`.
pub fn grid_instances(profile: Option<Profile>) -> Vec<InstanceConfig> {
    let mut shapes: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    for n in 1..=2 {
        for a in 1..=2 {
            shapes.push((vec![n], vec![a]));
        }
    }
    for n in [[1, 1], [1, 2], [2, 1], [2, 2]] {
        for a in [[1, 1], [1, 2], [2, 1], [2, 2]] {
            shapes.push((n.to_vec(), a.to_vec()));
        }
    }
    let profiles = match profile {
        Some(p) => vec![p],
        None => vec![Profile::Paper, Profile::Homogeneous],
    };
    let mut out = Vec::new();
    for p in profiles {
        for (n, alpha) in &shapes {
            if p == Profile::Homogeneous && n.len() != 1 {
                continue;
            }
            for k in 1..=2 {
                let text = json!({"s": n.len(), "n": n, "alpha": alpha, "k": k, "profile": p}).to_string();
                out.push(InstanceConfig::parse(&text).expect("grid instance is valid"));
            }
        }
    }
    out
}

fn certify_grid(
    out: Option<&Path>,
    report: Option<&Path>,
    flags: &RunFlags,
    sink: &mut dyn io::Write,
) -> Result<i32, CliError> {
    let base = InstanceConfig::parse(r#"{"s":1,"n":[1],"alpha":[1],"k":1}"#).expect("valid");
    let mut rows = Vec::new();
    let mut worst = Status::Verified;
    for mut cfg in grid_instances(flags.profile) {
        cfg.prime = flags.prime.unwrap_or(base.prime);
        cfg.seed = env_seed()?.or(flags.seed).unwrap_or(base.seed);
        cfg.trials = flags.trials.unwrap_or(base.trials);
        cfg.budget = flags.budget.unwrap_or(base.budget);
        cfg.max_q = flags.max_q;
        cfg.validate()?;
        let md = cfg.descriptor()?;
        let certs = exec::with_jobs(flags.jobs, || certify_all(&md, &cfg.options(), cfg.prime))?;
        let status = overall(&certs);
        worst = worst.max(status);
        rows.push(json!({
            "s": cfg.s,
            "n": cfg.n,
            "alpha": cfg.alpha,
            "k": cfg.k,
            "profile": cfg.profile(),
            "monad": certs[0].status,
            "stability": certs[1].status,
            "simplicity": certs[2].status,
            "status": status,
        }));
    }
    let summary = json!({ "tool": ToolInfo::current(), "status": worst, "instances": rows });
    if let Some(p) = out {
        write(p, &(serde_json::to_string_pretty(&summary).expect("serializes") + "\n"))?;
    }
    let mut md = String::from("| s | n | alpha | k | profile | monad | stability | simplicity |\n|---|---|---|---|---|---|---|---|\n");
    for r in summary["instances"].as_array().into_iter().flatten() {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            r["s"], r["n"], r["alpha"], r["k"],
            r["profile"].as_str().unwrap_or_default(),
            r["monad"].as_str().unwrap_or_default(),
            r["stability"].as_str().unwrap_or_default(),
            r["simplicity"].as_str().unwrap_or_default(),
        );
    }
    match report {
        Some(p) => write(p, &md)?,
        None => emit(sink, &md)?,
    }
    Ok(exit_code(worst))
}
