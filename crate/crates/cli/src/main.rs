//! `adl`: experiment runner. JSON report on stdout (or CSV with `--csv`),
//! human summary on stderr. Exit codes: 0 pass, 1 fail, 2 usage error.

use adl_core::folcheck::{parse_formula, unipotent_congruence_family, DefinableFamily, Env, Evaluator};
use adl_core::gclsets::{coverage_profile, gcl, tripling, AdjointSpace, Ladder, LadderOutcome, LieAlgVec, SaturationOutcome};
use adl_core::interpretation::RingEncoding;
use adl_core::matgroups::{group_from_spec, parse_element, parse_int_rows};
use adl_core::quadforms::{good_triple, main_idea_delta, orbit_cover, so_group, witt_index, GoodTriple, OrthogonalGroup, QuadForm};
use adl_core::suite::{run_suite, Check, ClaimKind, DEFAULT_SEED};
use adl_core::wordwidth::{parse_word, word_width};
use adl_core::{Error, GroupTable, RingSpec};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

const SCHEMA_VERSION: u32 = 1;
/// Extensions larger than this are summarized rather than listed.
const LIST_LIMIT: usize = 1000;

#[derive(Parser)]
#[command(name = "adl", version, about = "Finite-model experiments for definability in matrix groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Emit the checks as CSV instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
    /// Include wall time in the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    /// Largest group order that will be enumerated.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    max_group_order: usize,
    /// Budget on quantifier assignments and exhaustive pair checks.
    #[arg(long, global = true, default_value_t = 1_000_000_000)]
    max_assignments: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check decode(enc_add) and decode(enc_mul) against ring arithmetic.
    VerifyEncoding {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Random pairs when the ring is infinite or too large.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Bound on |a|, |b| for sampled integer pairs.
        #[arg(long, default_value_t = 1_000_000)]
        bound: i64,
    },
    /// Evaluate a sentence, or the definable set of a formula's free variables.
    ModelCheck {
        #[arg(long)]
        group: String,
        /// Formula text, or a path to a file containing it.
        #[arg(long)]
        formula: String,
        /// Constant binding `name=element`; repeatable.
        #[arg(long = "const", value_name = "NAME=ELEM")]
        consts: Vec<String>,
        /// Free variables to solve for, in order (default: all unbound names).
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
    },
    /// Slices of a uniformly definable family, deduplicated.
    DefinableFamily {
        #[arg(long)]
        group: String,
        #[arg(long, required_unless_present = "builtin")]
        formula: Option<String>,
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        objects: Vec<String>,
        #[arg(long = "const", value_name = "NAME=ELEM")]
        consts: Vec<String>,
        /// Built-in family: `unipotent-congruence`.
        #[arg(long)]
        builtin: Option<String>,
    },
    /// Sizes of gcl(alpha)^k up to the fixpoint.
    GclCoverage {
        #[arg(long)]
        group: String,
        #[arg(long)]
        alpha: String,
    },
    /// |S^3| versus |S| for S = gcl(alpha).
    Tripling {
        #[arg(long)]
        group: String,
        #[arg(long)]
        alpha: String,
    },
    /// Least c with gcl(g)^(|Z|·3) ⊇ G[p^(n+c)] in SL_2(zmod:p^k).
    Ladder {
        #[arg(long)]
        group: String,
        #[arg(long)]
        element: String,
        #[arg(long)]
        n: u32,
    },
    /// Adjoint-orbit sumset saturation in sl_n(F_p).
    Sumset {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u32,
        /// Trace-zero matrix `[[..],..]`; omit to run every orbit.
        #[arg(long)]
        x: Option<String>,
    },
    /// Witt index of a quadratic form.
    Witt {
        #[arg(long)]
        form: String,
        #[arg(long)]
        field: String,
    },
    /// Search for a good-triple witness; with --beta/--gamma also build delta.
    GoodTriple {
        #[arg(long)]
        form: String,
        #[arg(long)]
        field: String,
        #[arg(long)]
        a1: String,
        #[arg(long)]
        a2: String,
        #[arg(long, required_unless_present = "gamma")]
        a3: Option<String>,
        #[arg(long, requires = "gamma")]
        beta: Option<String>,
        #[arg(long, requires = "beta")]
        gamma: Option<String>,
    },
    /// Coverage curve N -> |gcl(alpha)^N·a| / |G·a| in SO of a form.
    OrbitCover {
        #[arg(long)]
        form: String,
        #[arg(long)]
        field: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
    /// Image size and width of a word map.
    WordWidth {
        #[arg(long)]
        group: String,
        #[arg(long)]
        word: String,
    },
    /// Run an acceptance suite: appendix, gcl, quadform, words or all.
    Suite { name: String },
}

#[derive(Serialize)]
struct Report {
    schema_version: u32,
    experiment: String,
    inputs: Value,
    seed: u64,
    passed: bool,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_s: Option<f64>,
}

type Outcome = Result<(Value, Vec<Check>), Error>;

fn usage(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn group(spec: &str, g: &Global) -> Result<GroupTable, Error> {
    group_from_spec(spec, g.max_group_order)
}

fn field_prime(text: &str) -> Result<u64, Error> {
    let r: RingSpec = text.parse()?;
    match r.modulus() {
        Some(p) if r.is_field() => Ok(p),
        _ => Err(usage(format!("`{text}` is not a finite prime field"))),
    }
}

fn parse_vector(text: &str, f: &QuadForm) -> Result<Vec<u64>, Error> {
    let v = text
        .split(',')
        .map(|x| x.trim().parse::<i64>().map(|v| v.rem_euclid(f.p as i64) as u64).map_err(|_| Error::Syntax { pos: 0, msg: format!("bad vector entry `{x}`") }))
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() != f.n {
        return Err(usage(format!("vector `{text}` has {} entries, the form has dimension {}", v.len(), f.n)));
    }
    Ok(v)
}

fn read_formula(text: &str) -> Result<String, Error> {
    match std::fs::read_to_string(text) {
        Ok(s) => Ok(s),
        Err(_) if std::path::Path::new(text).extension().is_some_and(|e| e == "fol") => Err(usage(format!("cannot read formula file `{text}`"))),
        Err(_) => Ok(text.to_string()),
    }
}

fn bind_consts(g: &GroupTable, consts: &[String]) -> Result<Env, Error> {
    consts
        .iter()
        .map(|c| {
            let (name, elem) = c.split_once('=').ok_or_else(|| usage(format!("constant `{c}` must look like name=element")))?;
            Ok((name.trim().to_string(), parse_element(g, elem)?))
        })
        .collect()
}

fn verify_encoding(ring: &str, n: usize, samples: u64, bound: i64, gl: &Global) -> Outcome {
    let r: RingSpec = ring.parse()?;
    let enc = RingEncoding::<BigInt>::new(&r, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(gl.seed);
    let pairs: Vec<(BigInt, BigInt)>;
    let sampled;
    match r.modulus() {
        Some(m) if (m as u128) * (m as u128) <= gl.max_assignments as u128 => {
            sampled = false;
            pairs = (0..m).flat_map(|a| (0..m).map(move |b| (BigInt::from(a), BigInt::from(b)))).collect();
        }
        Some(m) => {
            sampled = true;
            pairs = (0..samples).map(|_| (BigInt::from(rng.gen_range(0..m)), BigInt::from(rng.gen_range(0..m)))).collect();
        }
        None => {
            sampled = true;
            pairs = (0..samples).map(|_| (BigInt::from(rng.gen_range(-bound..=bound)), BigInt::from(rng.gen_range(-bound..=bound)))).collect();
        }
    }
    let mut failures = Vec::new();
    for (a, b) in &pairs {
        let (x, y) = (enc.encode(a), enc.encode(b));
        let sum = enc.add(&x, &y)?.decode();
        let prod = enc.mul(&x, &y)?.decode();
        if sum != r.add(a, b) || prod != r.mul(a, b) {
            failures.push(json!({"a": a.to_string(), "b": b.to_string(), "sum": sum.to_string(), "product": prod.to_string()}));
        }
    }
    let inputs = json!({"ring": r.to_string(), "n": n});
    let check = Check::new(
        format!("decode(enc_add) = a+b and decode(enc_mul) = ab over {r}"),
        ClaimKind::PaperAssertion,
        failures.is_empty(),
        json!({"pairs": pairs.len(), "sampled": sampled, "failures": failures.iter().take(10).collect::<Vec<_>>()}),
    );
    Ok((inputs, vec![check]))
}

fn format_env(g: &GroupTable, env: &Env) -> Value {
    env.iter().map(|(k, &v)| (k.clone(), Value::String(g.format_element(v)))).collect::<serde_json::Map<_, _>>().into()
}

fn format_tuples(g: &GroupTable, set: &[Vec<u32>]) -> Value {
    set.iter().take(LIST_LIMIT).map(|t| t.iter().map(|&x| g.format_element(x)).collect::<Vec<_>>()).collect()
}

fn model_check(spec: &str, formula: &str, consts: &[String], vars: &[String], gl: &Global) -> Outcome {
    let g = group(spec, gl)?;
    let text = read_formula(formula)?;
    let f = parse_formula(text.trim())?;
    let env = bind_consts(&g, consts)?;
    let vars: Vec<String> = if vars.is_empty() { f.free_names().into_iter().filter(|n| !env.contains_key(n)).collect() } else { vars.to_vec() };
    let ev = Evaluator::with_budget(&g, gl.max_assignments);
    let inputs = json!({"group": g.label(), "order": g.order(), "formula": f.to_string(), "constants": format_env(&g, &env), "vars": vars});
    let details = if vars.is_empty() {
        json!({"holds": ev.evaluate(&f, &env)?, "assignments": ev.used()})
    } else {
        let vr: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let set = ev.definable_set(&f, &vr, &env)?;
        json!({"size": set.len(), "truncated": set.len() > LIST_LIMIT, "extension": format_tuples(&g, &set), "assignments": ev.used()})
    };
    Ok((inputs, vec![Check::observation("model check", details)]))
}

#[allow(clippy::too_many_arguments)]
fn definable_family(spec: &str, formula: Option<&str>, params: &[String], objects: &[String], consts: &[String], builtin: Option<&str>, gl: &Global) -> Outcome {
    let g = group(spec, gl)?;
    let (fam, env, domain) = match builtin {
        Some("unipotent-congruence") => {
            let (fam, env, dom) = unipotent_congruence_family(&g)?;
            (fam, env, Some(dom))
        }
        Some(other) => return Err(usage(format!("unknown built-in family `{other}`"))),
        None => {
            let text = read_formula(formula.unwrap_or_default())?;
            let p: Vec<&str> = params.iter().map(|s| s.as_str()).collect();
            let o: Vec<&str> = objects.iter().map(|s| s.as_str()).collect();
            if p.is_empty() || o.is_empty() {
                return Err(usage("--params and --objects are required with --formula"));
            }
            (DefinableFamily::new(&p, &o, parse_formula(text.trim())?)?, bind_consts(&g, consts)?, None)
        }
    };
    let ev = Evaluator::with_budget(&g, gl.max_assignments);
    let slices = ev.family_slices(&fam, &env, domain.as_deref())?;
    let classes: Vec<Value> = slices
        .classes
        .iter()
        .map(|c| json!({"representative": c.representative.iter().map(|&x| g.format_element(x)).collect::<Vec<_>>(), "parameters": c.parameters, "size": c.extension.len()}))
        .collect();
    let inputs = json!({"group": g.label(), "params": fam.params, "objects": fam.objects, "formula": fam.formula.to_string(), "builtin": builtin});
    let details = json!({"parameter_tuples": slices.slice_of.len(), "distinct_slices": classes.len(), "slices": classes});
    Ok((inputs, vec![Check::observation("family slices", details)]))
}

fn gcl_coverage(spec: &str, alpha: &str, gl: &Global) -> Outcome {
    let g = group(spec, gl)?;
    let a = parse_element(&g, alpha)?;
    let prof = coverage_profile(&g, a)?;
    let inputs = json!({"group": g.label(), "alpha": g.format_element(a)});
    Ok((
        inputs,
        vec![
            Check::new("gcl fixpoint equals the normal closure", ClaimKind::PaperAssertion, true, json!({"fixpoint_size": prof.fixpoint.len()})),
            Check::observation("coverage profile", json!({"sizes": prof.sizes, "fixpoint_n": prof.fixpoint_n, "group_order": g.order()})),
        ],
    ))
}

fn tripling_cmd(spec: &str, alpha: &str, gl: &Global) -> Outcome {
    let g = group(spec, gl)?;
    let a = parse_element(&g, alpha)?;
    let t = tripling(&g, &gcl(&g, a))?;
    let ok = t.size_cubed == g.order() || t.size_cubed > t.size;
    Ok((json!({"group": g.label(), "alpha": g.format_element(a)}), vec![Check::new("S^3 = G or |S^3| > |S|", ClaimKind::PaperAssertion, ok, serde_json::to_value(&t).unwrap_or(Value::Null))]))
}

fn ladder_cmd(spec: &str, element: &str, n: u32, gl: &Global) -> Outcome {
    let g = group(spec, gl)?;
    let x = parse_element(&g, element)?;
    let r = Ladder::new(&g)?.constant(x, n)?;
    let ok = matches!(r.outcome, LadderOutcome::Found { .. });
    Ok((json!({"group": g.label(), "element": g.format_element(x), "n": n}), vec![Check::new("finite ladder constant exists", ClaimKind::FiniteAnalog, ok, serde_json::to_value(&r).unwrap_or(Value::Null))]))
}

fn sumset_cmd(n: usize, p: u32, x: Option<&str>) -> Outcome {
    let space = AdjointSpace::new(n, p)?;
    let sats = match x {
        Some(text) => vec![space.saturate(&LieAlgVec::from_rows(p, &parse_int_rows(text)?)?)?],
        None => space.saturate_all()?,
    };
    let full = sats.iter().all(|s| matches!(s.outcome, SaturationOutcome::Full { .. }));
    let max_k = sats.iter().filter_map(|s| s.k()).max();
    let inputs = json!({"n": n, "p": p, "x": x});
    Ok((
        inputs,
        vec![
            Check::new("orbit sumsets saturate to the whole Lie algebra", ClaimKind::PaperAssertion, full, json!({"orbits": sats.len()})),
            Check::observation("saturation steps", json!({"max_k": max_k, "reference_bound": 4 * (n * n - 1), "results": sats})),
        ],
    ))
}

fn witt_cmd(form: &str, field: &str) -> Outcome {
    let f = QuadForm::parse(form, field_prime(field)?)?;
    let w = witt_index(&f)?;
    Ok((json!({"form": f.to_string(), "p": f.p}), vec![Check::observation("Witt index", json!({"witt_index": w, "dimension": f.n}))]))
}

fn so_for(form: &str, field: &str, gl: &Global) -> Result<OrthogonalGroup, Error> {
    let f = QuadForm::parse(form, field_prime(field)?)?;
    so_group(&f, gl.max_group_order)
}

#[allow(clippy::too_many_arguments)]
fn good_triple_cmd(form: &str, field: &str, a1: &str, a2: &str, a3: Option<&str>, beta: Option<&str>, gamma: Option<&str>, gl: &Global) -> Outcome {
    let g = so_for(form, field, gl)?;
    let f = &g.form;
    let (v1, v2) = (parse_vector(a1, f)?, parse_vector(a2, f)?);
    let mut inputs = json!({"form": f.to_string(), "p": f.p, "so_order": g.order(), "a1": v1, "a2": v2});
    let mut checks = Vec::new();
    match (beta, gamma) {
        (Some(b), Some(c)) => {
            let (b, c) = (parse_element(&g.table, b)?, parse_element(&g.table, c)?);
            let (t2, t3) = (g.apply(b, &v2), g.apply(c, &v1));
            inputs["beta"] = json!(g.table.format_element(b));
            inputs["gamma"] = json!(g.table.format_element(c));
            let r = good_triple(&g, &v1, &t2, &t3)?;
            checks.push(Check::observation("good triple (a1, beta a2, gamma a1)", serde_json::to_value(&r).unwrap_or(Value::Null)));
            if let GoodTriple::Good(w) = r {
                let d = main_idea_delta(&g, &v1, &v2, b, c, &w);
                checks.push(Check::new("delta(a1) = a2", ClaimKind::PaperAssertion, d.is_ok(), json!({"delta": d.as_ref().map(|&d| g.table.format_element(d)).ok()})));
            }
        }
        _ => {
            let v3 = parse_vector(a3.unwrap_or_default(), f)?;
            inputs["a3"] = json!(v3);
            let r = good_triple(&g, &v1, &v2, &v3)?;
            checks.push(Check::observation("good triple", serde_json::to_value(&r).unwrap_or(Value::Null)));
        }
    }
    Ok((inputs, checks))
}

fn orbit_cover_cmd(form: &str, field: &str, alpha: &str, a: &str, max_n: usize, gl: &Global) -> Outcome {
    let g = so_for(form, field, gl)?;
    let v = parse_vector(a, &g.form)?;
    let al = parse_element(&g.table, alpha)?;
    let c = orbit_cover(&g, al, &v, max_n)?;
    let inputs = json!({"form": g.form.to_string(), "p": g.form.p, "so_order": g.order(), "alpha": g.table.format_element(al), "a": v, "max_n": max_n});
    Ok((inputs, vec![Check::observation("orbit coverage", serde_json::to_value(&c).unwrap_or(Value::Null))]))
}

fn word_width_cmd(spec: &str, word: &str, gl: &Global) -> Outcome {
    let g = group(spec, gl)?;
    let w = parse_word(word)?;
    let r = word_width(&g, &w, gl.max_assignments)?;
    let inputs = json!({"group": g.label(), "order": g.order(), "word": w.to_string()});
    Ok((
        inputs,
        vec![
            Check::new("stable power of the symmetrized image is a subgroup", ClaimKind::PaperAssertion, true, json!({"closure_size": r.closure_size})),
            Check::observation("word width", json!({"image_size": r.image_size, "width": r.width, "closure_size": r.closure_size, "sizes": r.sizes, "silly": w.is_silly()})),
        ],
    ))
}

fn suite_cmd(name: &str, gl: &Global) -> Outcome {
    let reports = run_suite(name, gl.seed)?;
    let checks = reports
        .into_iter()
        .map(|r| {
            let hard: Vec<ClaimKind> = r.checks.iter().map(|c| c.claim_kind).filter(|k| *k != ClaimKind::Observation).collect();
            let kind = if !hard.is_empty() && hard.iter().all(|k| *k == ClaimKind::FiniteAnalog) { ClaimKind::FiniteAnalog } else { ClaimKind::PaperAssertion };
            Check::new(format!("C{} {}", r.id, r.title), kind, r.passed, json!({"checks": r.checks}))
        })
        .collect();
    Ok((json!({"suite": name}), checks))
}

fn run(cmd: &Cmd, gl: &Global) -> Outcome {
    match cmd {
        Cmd::VerifyEncoding { ring, n, samples, bound } => verify_encoding(ring, *n, *samples, *bound, gl),
        Cmd::ModelCheck { group, formula, consts, vars } => model_check(group, formula, consts, vars, gl),
        Cmd::DefinableFamily { group, formula, params, objects, consts, builtin } => {
            definable_family(group, formula.as_deref(), params, objects, consts, builtin.as_deref(), gl)
        }
        Cmd::GclCoverage { group, alpha } => gcl_coverage(group, alpha, gl),
        Cmd::Tripling { group, alpha } => tripling_cmd(group, alpha, gl),
        Cmd::Ladder { group, element, n } => ladder_cmd(group, element, *n, gl),
        Cmd::Sumset { n, p, x } => sumset_cmd(*n, *p, x.as_deref()),
        Cmd::Witt { form, field } => witt_cmd(form, field),
        Cmd::GoodTriple { form, field, a1, a2, a3, beta, gamma } => good_triple_cmd(form, field, a1, a2, a3.as_deref(), beta.as_deref(), gamma.as_deref(), gl),
        Cmd::OrbitCover { form, field, alpha, a, max_n } => orbit_cover_cmd(form, field, alpha, a, *max_n, gl),
        Cmd::WordWidth { group, word } => word_width_cmd(group, word, gl),
        Cmd::Suite { name } => suite_cmd(name, gl),
    }
}

fn experiment_name(cmd: &Cmd) -> String {
    let name = match cmd {
        Cmd::VerifyEncoding { .. } => "verify-encoding",
        Cmd::ModelCheck { .. } => "model-check",
        Cmd::DefinableFamily { .. } => "definable-family",
        Cmd::GclCoverage { .. } => "gcl-coverage",
        Cmd::Tripling { .. } => "tripling",
        Cmd::Ladder { .. } => "ladder",
        Cmd::Sumset { .. } => "sumset",
        Cmd::Witt { .. } => "witt",
        Cmd::GoodTriple { .. } => "good-triple",
        Cmd::OrbitCover { .. } => "orbit-cover",
        Cmd::WordWidth { .. } => "word-width",
        Cmd::Suite { name } => return format!("suite:{name}"),
    };
    name.to_string()
}

/// Input errors map to exit code 2, everything else to 1.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. } | Error::Invalid(_) | Error::Unsupported(_) | Error::Unbound(_) | Error::RingMismatch | Error::Precondition(_) | Error::NotAUnit(_) => 2,
        _ => 1,
    }
}

fn write_csv(report: &Report) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(["experiment", "label", "claim_kind", "passed", "details"])?;
    for c in &report.checks {
        let kind = serde_json::to_value(c.claim_kind)?;
        w.write_record([report.experiment.as_str(), c.label.as_str(), kind.as_str().unwrap_or_default(), if c.passed { "true" } else { "false" }, &c.details.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("ADL_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| usage(format!("ADL_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Invariant(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("adl: {e}");
        return ExitCode::from(2);
    }
    let name = experiment_name(&cli.cmd);
    let start = Instant::now();
    let (inputs, checks) = match run(&cli.cmd, &cli.global) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("adl {name}: error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    let passed = checks.iter().all(|c| c.passed || c.claim_kind == ClaimKind::Observation);
    let report = Report {
        schema_version: SCHEMA_VERSION,
        experiment: name.clone(),
        inputs,
        seed: cli.global.seed,
        passed,
        checks,
        wall_time_s: cli.global.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let written = if cli.global.csv {
        write_csv(&report).map_err(|e| e.to_string())
    } else {
        serde_json::to_string_pretty(&report)
            .map_err(|e| e.to_string())
            .and_then(|s| writeln!(std::io::stdout().lock(), "{s}").map_err(|e| e.to_string()))
    };
    if let Err(e) = written {
        eprintln!("adl {name}: cannot write report: {e}");
        return ExitCode::from(1);
    }
    eprintln!("adl {name}: {}", if passed { "PASS" } else { "FAIL" });
    for c in &report.checks {
        let kind = serde_json::to_value(c.claim_kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        eprintln!("  [{}] {} ({kind})", if c.passed { "pass" } else { "FAIL" }, c.label);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
