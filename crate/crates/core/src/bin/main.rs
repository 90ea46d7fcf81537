use std::io::{self, Write};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use biproj_apn::apn::{apn_naive_verdict, apn_projective, to_truth_table};
use biproj_apn::biproj::{is_rootless, BiprojectivePair, ProjectivePolynomial};
use biproj_apn::classify::{classify_family, cross_family_sweep, Judge, Policy, Verdict, SWEEP_FAMILIES};
use biproj_apn::equivalence::centralizer::primitive_prime;
use biproj_apn::equivalence::{centralizer_search, orbit_and_stabilizer};
use biproj_apn::family::{enumerate_params, make_family, FamilyParams, FamilyTag};
use biproj_apn::walsh::{extended_walsh_spectrum, is_classical, three_to_one_check};
use biproj_apn::{Error, FieldCtx, FieldElement};

#[derive(Parser)]
#[command(name = "biproj-apn", version, about = "APN tests, Walsh spectra, equivalence and classification of biprojective APN functions")]
struct Cli {
    /// extension degree of the field M = GF(2^m)
    #[arg(long, global = true)]
    m: Option<u32>,
    /// defining polynomial in hex, e.g. 0x25
    #[arg(long, global = true, value_parser = parse_hex)]
    poly: Option<u64>,
    /// JSON output
    #[arg(long, global = true)]
    json: bool,
    /// CSV output where the command has tabular results
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,
    /// worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// seed for sampled runs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the APN property of family instances
    ApnCheck {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = Method::Projective)]
        method: Method,
    },
    /// Extended Walsh spectrum and image profile
    Walsh {
        #[command(flatten)]
        target: Target,
    },
    /// Decide equivalence of two instances
    Equiv {
        /// family spec or pair text of the first function
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
    /// Orbit and stabilizer of a projective polynomial
    Orbit {
        /// p1,p2,p3,p4 in hex or decimal; `u` stands for the least value leaving the polynomial rootless
        #[arg(long)]
        poly_coeffs: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Centralizer of the Z subgroup
    Centralizer {
        #[command(flatten)]
        target: Target,
    },
    /// Classify every instance of a family
    Enumerate {
        #[arg(long, value_parser = parse_tag)]
        family: FamilyTag,
    },
    /// Cross-family inequivalence sweep
    Sweep {
        /// comma separated family names; all families by default
        #[arg(long, value_delimiter = ',', value_parser = parse_tag)]
        families: Option<Vec<FamilyTag>>,
    },
    /// Field parameters
    FieldInfo,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Naive,
    Projective,
    Both,
}

#[derive(Args)]
struct Target {
    /// gold, carlet, taniguchi, zp, f1, f2 or f4
    #[arg(long, value_parser = parse_tag)]
    family: Option<FamilyTag>,
    /// restrict to this exponent k
    #[arg(long)]
    k: Option<u32>,
    /// a single instance such as f4:k=1,B=0x5,a=0x1
    #[arg(long)]
    spec: Option<String>,
    /// a raw pair, `m=.. k=.. l=.. c0=.. c1=.. poly=..`
    #[arg(long)]
    pair: Option<String>,
    /// every valid parameter tuple instead of the first
    #[arg(long)]
    all_params: bool,
    /// a seeded random sample of this many tuples
    #[arg(long)]
    sample: Option<usize>,
}

fn parse_hex(s: &str) -> Result<u64, String> {
    let t = s.trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(t, 16).map_err(|e| e.to_string())
}

fn parse_tag(s: &str) -> Result<FamilyTag, String> {
    s.parse::<FamilyTag>().map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SearchFailed(_) => Failure::Violation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

struct Env {
    m: Option<u32>,
    poly: Option<u64>,
    json: bool,
    csv: bool,
    seed: u64,
}

impl Env {
    fn ctx(&self) -> Result<Arc<FieldCtx>, Failure> {
        let m = self.m.ok_or_else(|| Failure::Usage("--m is required".into()))?;
        Ok(match self.poly {
            Some(p) => FieldCtx::with_poly(m, p)?,
            None => FieldCtx::new(m)?,
        })
    }

    fn print(&self, value: &serde_json::Value, text: impl FnOnce() -> String) {
        let body = if self.json { serde_json::to_string_pretty(value).unwrap_or_default() } else { text() };
        let _ = writeln!(io::stdout().lock(), "{body}");
    }
}

/// Resolves a target into labelled pairs.
fn targets(env: &Env, t: &Target) -> Result<Vec<(String, BiprojectivePair)>, Failure> {
    if let Some(text) = &t.pair {
        let p = BiprojectivePair::from_text(text)?;
        return Ok(vec![(p.to_text(), p)]);
    }
    let ctx = env.ctx()?;
    if let Some(spec) = &t.spec {
        let inst = make_family(&ctx, FamilyParams::parse(spec)?)?;
        return Ok(vec![(inst.params.to_string(), inst.pair)]);
    }
    let tag = t.family.ok_or_else(|| Failure::Usage("one of --family, --spec or --pair is required".into()))?;
    let mut params: Vec<FamilyParams> =
        enumerate_params(&ctx, tag)?.into_iter().filter(|p| t.k.map_or(true, |k| p.k() == k)).collect();
    if let Some(n) = t.sample {
        let mut rng = ChaCha8Rng::seed_from_u64(env.seed);
        params = params.choose_multiple(&mut rng, n).copied().collect();
    } else if !t.all_params {
        params.truncate(1);
    }
    if params.is_empty() {
        return Err(Failure::Usage(format!("no {} instances match at m = {}", tag.name(), ctx.m())));
    }
    params.into_iter().map(|p| Ok((p.to_string(), make_family(&ctx, p)?.pair))).collect()
}

fn resolve_one(env: &Env, s: &str) -> Result<(String, BiprojectivePair), Failure> {
    let t = if s.contains("c0=") {
        Target { family: None, k: None, spec: None, pair: Some(s.into()), all_params: false, sample: None }
    } else {
        Target { family: None, k: None, spec: Some(s.into()), pair: None, all_params: false, sample: None }
    };
    Ok(targets(env, &t)?.remove(0))
}

fn apn_check(env: &Env, target: &Target, method: Method) -> Outcome {
    let items = targets(env, target)?;
    let mut rows = Vec::new();
    let mut ok = true;
    for (label, pair) in &items {
        let (naive, proj) = match method {
            Method::Naive => (Some(apn_naive_verdict(&to_truth_table(pair)?)), None),
            Method::Projective => (None, Some(apn_projective(pair))),
            Method::Both => (Some(apn_naive_verdict(&to_truth_table(pair)?)), Some(apn_projective(pair))),
        };
        let apn = naive.unwrap_or(true) && proj.unwrap_or(true);
        ok &= apn && (naive.is_none() || proj.is_none() || naive == proj);
        let mut row = json!({ "params": label, "apn": apn });
        if let (Some(a), Some(b)) = (naive, proj) {
            row["naive"] = json!(a);
            row["projective"] = json!(b);
        }
        rows.push(row);
    }
    if env.csv {
        let mut w = csv::Writer::from_writer(io::stdout());
        let _ = w.write_record(["params", "apn"]);
        for r in &rows {
            let _ = w.write_record([r["params"].as_str().unwrap_or(""), &r["apn"].to_string()]);
        }
        let _ = w.flush();
    } else {
        env.print(&json!(rows), || {
            rows.iter().map(|r| format!("{} apn={}", r["params"].as_str().unwrap_or(""), r["apn"])).collect::<Vec<_>>().join("\n")
        });
    }
    Ok(ok)
}

fn walsh(env: &Env, target: &Target) -> Outcome {
    let mut rows = Vec::new();
    for (label, pair) in targets(env, target)? {
        let table = to_truth_table(&pair)?;
        let spec = extended_walsh_spectrum(&table)?;
        rows.push(json!({
            "params": label,
            "spectrum": spec.to_json(),
            "classical": is_classical(&spec),
            "three_to_one": three_to_one_check(&table),
        }));
    }
    env.print(&json!(rows), || {
        rows.iter()
            .map(|r| {
                let vals: Vec<String> = r["spectrum"]["values"]
                    .as_array()
                    .map(|a| a.iter().map(|v| format!("{}:{}", v["abs_w"], v["count"])).collect())
                    .unwrap_or_default();
                format!(
                    "{} |W|: {{{}}} classical={} three_to_one={}",
                    r["params"].as_str().unwrap_or(""),
                    vals.join(", "),
                    r["classical"],
                    r["three_to_one"]
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    });
    Ok(true)
}

fn equiv(env: &Env, first: &str, second: &str) -> Outcome {
    let (la, a) = resolve_one(env, first)?;
    let (lb, b) = resolve_one(env, second)?;
    if a.ctx != b.ctx {
        return Err(Failure::Usage("the two functions live in different fields".into()));
    }
    let judge = Judge::new(vec![a, b], Policy::default());
    let v = judge.decide(0, 1)?;
    let witness = v.witness.as_ref().map(|w| w.to_text());
    env.print(&json!({ "first": la, "second": lb, "verdict": v.verdict, "witness": witness }), || {
        let mut s = format!("{la} vs {lb}: {}", v.verdict.name());
        if let Some(w) = &witness {
            s.push('\n');
            s.push_str(w.trim_end());
        }
        s
    });
    Ok(true)
}

fn orbit(env: &Env, coeffs: &str, k: u32) -> Outcome {
    let ctx = env.ctx()?;
    let tokens: Vec<&str> = coeffs.split(',').map(str::trim).collect();
    if tokens.len() != 4 {
        return Err(Failure::Usage("--poly-coeffs needs four entries".into()));
    }
    let parse = |t: &str| -> Result<Option<FieldElement>, Failure> {
        if t == "u" {
            return Ok(None);
        }
        let v = if t.starts_with("0x") { parse_hex(t) } else { t.parse::<u64>().map_err(|e| e.to_string()) };
        let v = v.map_err(Failure::Usage)?;
        Ok(Some(ctx.element(v as u32)?))
    };
    let shape: Vec<Option<FieldElement>> = tokens.iter().map(|t| parse(t)).collect::<Result<_, _>>()?;
    let fill = |u: FieldElement| [0, 1, 2, 3].map(|i| shape[i].unwrap_or(u));
    let u = ctx
        .elements()
        .find(|&u| is_rootless(&ctx, k, &fill(u)))
        .ok_or_else(|| Failure::Usage("no value of u leaves the polynomial rootless".into()))?;
    let p = fill(u);
    let f = ProjectivePolynomial::new(ctx.clone(), k, p)?;
    let (orbit, stab) = orbit_and_stabilizer(&f)?;
    let coeffs: Vec<String> = p.iter().map(|c| format!("{:#x}", c.0)).collect();
    env.print(&json!({ "coeffs": coeffs, "u": format!("{:#x}", u.0), "orbit": orbit, "stabilizer": stab }), || {
        format!("({}) u={:#x}: orbit {orbit}, stabilizer {stab}", coeffs.join(","), u.0)
    });
    Ok(true)
}

fn centralizer(env: &Env, target: &Target) -> Outcome {
    let mut rows = Vec::new();
    for (label, pair) in targets(env, target)? {
        let r = centralizer_search(&pair)?;
        rows.push(json!({ "params": label, "report": r }));
    }
    env.print(&json!(rows), || {
        rows.iter()
            .map(|r| {
                format!(
                    "{}: index {} order {} classes {} condition (C) {}",
                    r["params"].as_str().unwrap_or(""),
                    r["report"]["index"],
                    r["report"]["order"],
                    r["report"]["class_counts"],
                    r["report"]["condition_c"]
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    });
    Ok(true)
}

fn enumerate(env: &Env, tag: FamilyTag) -> Outcome {
    let ctx = env.ctx()?;
    let r = classify_family(&ctx, tag, &Policy::default())?;
    if env.csv {
        r.write_csv(io::stdout())?;
    } else {
        let mut v = r.to_json();
        v["classes_detail"] = v["classes"].take();
        v["classes"] = json!(r.class_count);
        env.print(&v, || {
            let mut s = format!(
                "{} m={}: {} instances, {} anchors, {} classes, {} undecided",
                r.family, r.m, r.instance_count, r.anchor_count, r.class_count, r.undecided
            );
            for c in &r.classes {
                s.push_str(&format!("\n  class {}: {} ({} instances)", c.id, c.representative, c.size));
            }
            if let Some(b) = &r.bounds {
                s.push_str(&format!("\n  bounds [{}, {}] within={}", b.lower, b.upper, b.within));
            }
            for n in &r.notes {
                s.push_str(&format!("\n  note: {n}"));
            }
            s
        });
    }
    Ok(r.bounds.as_ref().map_or(true, |b| b.within || !b.hypothesis_holds))
}

fn sweep(env: &Env, families: &[FamilyTag]) -> Outcome {
    let ctx = env.ctx()?;
    let r = cross_family_sweep(&ctx, families, &Policy::default())?;
    // Carlet and Zhou-Pott collapse for even m; any other merge is unexpected
    let unexpected = r.pairs.iter().any(|p| {
        let fams = [&r.representatives[p.a].family, &r.representatives[p.b].family];
        p.verdict == Verdict::Equivalent && !(fams.contains(&&"carlet".to_string()) && fams.contains(&&"zp".to_string()))
    });
    if env.csv {
        r.write_csv(io::stdout())?;
    } else {
        env.print(&r.to_json(), || {
            let mut s = format!(
                "m={}: {} representatives, {} cross pairs, {} equivalent, {} undecided",
                r.m,
                r.representatives.len(),
                r.pairs.len(),
                r.equivalences,
                r.undecided
            );
            for (k, v) in &r.verdict_counts {
                s.push_str(&format!("\n  {k}: {v}"));
            }
            for p in r.pairs.iter().filter(|p| p.verdict == Verdict::Equivalent) {
                s.push_str(&format!("\n  {} ~ {}", r.representatives[p.a].params, r.representatives[p.b].params));
            }
            for n in &r.notes {
                s.push_str(&format!("\n  note: {n}"));
            }
            s
        });
    }
    Ok(!unexpected)
}

fn field_info(env: &Env) -> Outcome {
    let ctx = env.ctx()?;
    let m = ctx.m();
    let cubes = ctx.nonzero().filter(|&a| ctx.is_cube(a).unwrap_or(false)).count();
    let subfields: Vec<u32> = (1..=m).filter(|d| m % d == 0).collect();
    let v = json!({
        "m": m,
        "poly": format!("{:#x}", ctx.poly()),
        "size": ctx.size(),
        "order": ctx.order(),
        "generator": format!("{:#x}", ctx.generator().0),
        "nonzero_cubes": cubes,
        "subfield_degrees": subfields,
        "primitive_prime": primitive_prime(m),
    });
    env.print(&v, || {
        format!(
            "GF(2^{m}) poly {:#x}, generator {:#x}, {} nonzero cubes, subfields {:?}, primitive prime {:?}",
            ctx.poly(),
            ctx.generator().0,
            cubes,
            subfields,
            primitive_prime(m)
        )
    });
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let env = Env { m: cli.m, poly: cli.poly, json: cli.json, csv: cli.csv, seed: cli.seed };
    let out = match &cli.cmd {
        Cmd::ApnCheck { target, method } => apn_check(&env, target, *method),
        Cmd::Walsh { target } => walsh(&env, target),
        Cmd::Equiv { first, second } => equiv(&env, first, second),
        Cmd::Orbit { poly_coeffs, k } => orbit(&env, poly_coeffs, *k),
        Cmd::Centralizer { target } => centralizer(&env, target),
        Cmd::Enumerate { family } => enumerate(&env, *family),
        Cmd::Sweep { families } => sweep(&env, families.as_deref().unwrap_or(&SWEEP_FAMILIES)),
        Cmd::FieldInfo => field_info(&env),
    };
    let _ = io::stdout().flush();
    match out {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
