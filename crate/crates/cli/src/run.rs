use std::io::{self, BufReader};
use std::net::TcpListener;
use std::time::Instant;

use hidden_power::idtest::{self, TestVerdict};
use hidden_power::interp::{self, InterpConfig};
use hidden_power::oracle::{self, LocalOracle, PowerOracle, RemoteOracle};
use hidden_power::report::{self, Format};
use hidden_power::{stats, Error, FieldCtx, MonicPoly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::{
    ExperimentArgs, ExperimentKind, FieldArgs, IdtestArgs, IdtestMode, InterpMode, InterpolateArgs, ServeArgs,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Parameter problems are usage errors; everything else is a failed run.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NotPrime(_)
        | Error::ModulusTooLarge(_)
        | Error::ExponentDoesNotDivide { .. }
        | Error::ZeroExponent
        | Error::OutOfDomain { .. }
        | Error::DuplicateNode(_)
        | Error::BadPolynomial(_)
        | Error::ExponentTooLarge(_)
        | Error::OracleMismatch(..)
        | Error::BudgetExceedsField { .. }
        | Error::DegenerateBudget
        | Error::InvalidParameter(_)
        | Error::DegreeOverflow { .. }
        | Error::SearchTooLarge(..)
        | Error::FieldTooLarge(_)
        | Error::BudgetTooLarge(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

pub fn print_json(doc: &Value) {
    println!("{}", serde_json::to_string(doc).expect("json value serializes"));
}

/// Prints `{"command": .., "error": ..}` and returns the exit code.
pub fn fail(command: &str, err: &Error) -> u8 {
    eprintln!("{command}: {err}");
    print_json(&json!({ "command": command, "error": err.to_string() }));
    exit_code(err)
}

fn field(args: &FieldArgs) -> Result<FieldCtx, Error> {
    FieldCtx::new(args.p, args.e)
}

fn open_remote(ctx: &FieldCtx, addr: &str) -> Result<Box<dyn PowerOracle>, Error> {
    let remote = RemoteOracle::connect(addr)?;
    let got = remote.field();
    if got != *ctx {
        return Err(Error::OracleMismatch(ctx.p(), ctx.e(), got.p(), got.e()));
    }
    Ok(Box::new(remote))
}

fn open_local(ctx: &FieldCtx, coeffs: &str) -> Result<Box<dyn PowerOracle>, Error> {
    Ok(Box::new(LocalOracle::new(*ctx, MonicPoly::parse(ctx, coeffs)?)?))
}

fn poly_json(f: &MonicPoly) -> Value {
    serde_json::to_value(f).expect("polynomial serializes")
}

pub fn interpolate(args: &InterpolateArgs) -> u8 {
    match interpolate_doc(args) {
        Ok((doc, code)) => {
            print_json(&doc);
            code
        }
        Err(err) => fail("interpolate", &err),
    }
}

fn interpolate_doc(args: &InterpolateArgs) -> Result<(Value, u8), Error> {
    let ctx = field(&args.field)?;
    let oracle = match (&args.oracle, &args.hidden) {
        (Some(addr), _) => open_remote(&ctx, addr)?,
        (None, Some(coeffs)) => {
            let hidden = MonicPoly::parse(&ctx, coeffs)?;
            if hidden.degree() != args.d {
                return Err(Error::InvalidParameter(format!(
                    "--hidden has degree {} but --d is {}",
                    hidden.degree(),
                    args.d
                )));
            }
            Box::new(LocalOracle::new(ctx, hidden)?) as Box<dyn PowerOracle>
        }
        (None, None) => return Err(Error::InvalidParameter("one of --oracle or --hidden is required".into())),
    };
    let mut doc = Map::new();
    doc.insert("command".into(), json!("interpolate"));
    doc.insert("p".into(), json!(ctx.p()));
    doc.insert("e".into(), json!(ctx.e()));
    doc.insert("d".into(), json!(args.d));
    doc.insert("seed".into(), json!(args.seed));
    let start = Instant::now();
    let code = match args.mode {
        InterpMode::Naive => {
            doc.insert("mode".into(), json!("naive"));
            let f = interp::naive_interpolate(&oracle, args.d)?;
            eprintln!("naive: recovered {f} with {} queries", oracle.query_count());
            doc.insert("candidate".into(), poly_json(&f));
            doc.insert("queries_used".into(), json!(oracle.query_count()));
            doc.insert("verified".into(), json!(true));
            EXIT_OK
        }
        InterpMode::Randomized => {
            doc.insert("mode".into(), json!("randomized"));
            doc.insert("epsilon".into(), json!(args.epsilon));
            let mut cfg = InterpConfig::new(args.d, args.epsilon, args.seed);
            cfg.t_factor = args.t_factor;
            let res = interp::randomized_interpolate(&oracle, &cfg)?;
            eprintln!(
                "randomized: {} after {} round(s), {} queries, verified={}",
                res.candidate, res.rounds_used, res.queries_used, res.verified
            );
            doc.insert("candidate".into(), poly_json(&res.candidate));
            doc.insert("rounds".into(), json!(res.rounds_used));
            doc.insert("test_set_size".into(), json!(res.test_set_size));
            doc.insert("queries_used".into(), json!(res.queries_used));
            doc.insert("skipped_roots".into(), json!(res.skipped_roots));
            doc.insert("search_space".into(), json!(res.search_space));
            doc.insert("candidates_tried".into(), json!(res.candidates_tried));
            doc.insert("verified".into(), json!(res.verified));
            if res.verified {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
    };
    doc.insert("wall_time_ms".into(), json!(start.elapsed().as_millis() as u64));
    Ok((Value::Object(doc), code))
}

pub fn idtest(args: &IdtestArgs) -> u8 {
    match idtest_doc(args) {
        Ok(doc) => {
            print_json(&doc);
            EXIT_OK
        }
        Err(err) => fail("idtest", &err),
    }
}

fn idtest_budget(args: &IdtestArgs, ctx: &FieldCtx) -> Result<(u64, Value), Error> {
    if let Some(h) = args.h {
        return Ok((h, json!({ "source": "h", "h": h })));
    }
    if let Some(delta) = args.delta {
        let b = idtest::small_e_budget(ctx.e(), args.d, delta, args.c_d, Some(ctx.p()))?;
        let mut v = serde_json::to_value(b).expect("budget serializes");
        v["source"] = json!("delta");
        return Ok((b.h, v));
    }
    if let Some(eps) = args.epsilon {
        let b = idtest::medium_e_budget(ctx.e(), args.d, eps, Some(ctx.p()))?;
        let mut v = serde_json::to_value(b).expect("budget serializes");
        v["source"] = json!("epsilon");
        return Ok((b.h, v));
    }
    let h = idtest::exhaustive_budget(args.d, ctx.e());
    Ok((h, json!({ "source": "exhaustive", "h": h })))
}

fn idtest_doc(args: &IdtestArgs) -> Result<Value, Error> {
    let ctx = field(&args.field)?;
    let source = |coeffs: &Option<String>, addr: Option<&String>, name: &str| -> Result<Box<dyn PowerOracle>, Error> {
        match (addr, coeffs) {
            (Some(a), _) => open_remote(&ctx, a),
            (None, Some(c)) => open_local(&ctx, c),
            (None, None) => Err(Error::InvalidParameter(format!("no oracle for {name}: pass --{name} or --oracle"))),
        }
    };
    let of = source(&args.f, args.oracle.first(), "f")?;
    let mut doc = Map::new();
    doc.insert("command".into(), json!("idtest"));
    doc.insert("p".into(), json!(ctx.p()));
    doc.insert("e".into(), json!(ctx.e()));
    doc.insert("d".into(), json!(args.d));
    doc.insert("seed".into(), json!(args.seed));

    let (verdict, og): (TestVerdict, Option<Box<dyn PowerOracle>>) = match args.mode {
        IdtestMode::Prefix => {
            doc.insert("mode".into(), json!("prefix"));
            let og = source(&args.g, args.oracle.get(1), "g")?;
            let (h, budget) = idtest_budget(args, &ctx)?;
            doc.insert("budget".into(), budget);
            (idtest::prefix_test(&of, &og, h)?, Some(og))
        }
        IdtestMode::Random => {
            doc.insert("mode".into(), json!("random"));
            doc.insert("trials".into(), json!(args.trials));
            let og = source(&args.g, args.oracle.get(1), "g")?;
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (idtest::randomized_test(&of, &og, args.trials, &mut rng)?, Some(og))
        }
        IdtestMode::KnownG => {
            doc.insert("mode".into(), json!("known-g"));
            let coeffs = args.g.as_ref().ok_or_else(|| Error::InvalidParameter("known-g mode needs --g".into()))?;
            let g = MonicPoly::parse(&ctx, coeffs)?;
            let (h, budget) = idtest_budget(args, &ctx)?;
            doc.insert("budget".into(), budget);
            (idtest::known_g_test(&of, &g, h)?, None)
        }
    };
    eprintln!("idtest: {verdict:?}");
    doc.insert("verdict".into(), serde_json::to_value(verdict).expect("verdict serializes"));
    let mut used = Map::new();
    used.insert("f".into(), json!(of.query_count()));
    if let Some(og) = og {
        used.insert("g".into(), json!(og.query_count()));
    }
    doc.insert("queries_used".into(), Value::Object(used));
    Ok(Value::Object(doc))
}

pub fn serve(args: &ServeArgs) -> u8 {
    match serve_inner(args) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("serve-oracle: {err}");
            exit_code(&err)
        }
    }
}

fn serve_inner(args: &ServeArgs) -> Result<(), Error> {
    let ctx = field(&args.field)?;
    let hidden = MonicPoly::parse(&ctx, &args.poly)?;
    let oracle = LocalOracle::new(ctx, hidden)?;
    let io_err = |e: io::Error| Error::Transport(e.to_string());
    if args.stdio {
        let stdin = io::stdin();
        oracle::serve(&oracle, BufReader::new(stdin.lock()), io::stdout().lock()).map_err(io_err)?;
    } else {
        let addr = args.listen.as_deref().expect("clap enforces --listen or --stdio");
        let listener = TcpListener::bind(addr).map_err(io_err)?;
        eprintln!("listening on {}", listener.local_addr().map_err(io_err)?);
        oracle::serve_tcp(&oracle, &listener, args.max_connections).map_err(io_err)?;
    }
    eprintln!("served {} queries", oracle.query_count());
    Ok(())
}

pub fn experiment(args: &ExperimentArgs) -> u8 {
    match experiment_doc(args) {
        Ok(out) => {
            print!("{out}");
            EXIT_OK
        }
        Err(err) => fail("experiment", &err),
    }
}

fn kind_name(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Coincidence => "coincidence",
        ExperimentKind::Fraction => "fraction",
        ExperimentKind::Equiv => "equiv",
        ExperimentKind::ProductSet => "product-set",
    }
}

#[derive(serde::Serialize)]
struct FractionRow {
    p: u64,
    e: u64,
    d: usize,
    f: String,
    g: String,
    count: u64,
    fraction: hidden_power::Ratio,
    at_least_one_third: bool,
}

#[derive(serde::Serialize)]
struct EquivRow {
    p: u64,
    e: u64,
    d: usize,
    f: String,
    g: String,
    equivalent: bool,
}

fn experiment_doc(args: &ExperimentArgs) -> Result<String, Error> {
    let ctx = field(&args.field)?;
    let pairs: Vec<(MonicPoly, MonicPoly)> = match (&args.f, &args.g) {
        (Some(f), Some(g)) => vec![(MonicPoly::parse(&ctx, f)?, MonicPoly::parse(&ctx, g)?)],
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..args.trials)
                .map(|_| (MonicPoly::random(&ctx, args.d, &mut rng), MonicPoly::random(&ctx, args.d, &mut rng)))
                .collect()
        }
    };
    let rows: Vec<Value> = match args.kind {
        ExperimentKind::Coincidence => {
            pairs.iter().map(|(f, g)| stats::coincidence_count(f, g, &ctx).map(to_value)).collect::<Result<_, _>>()?
        }
        ExperimentKind::Fraction => pairs
            .iter()
            .map(|(f, g)| {
                let r = stats::coincidence_count(f, g, &ctx)?;
                let fraction = stats::distinguishing_fraction(f, g, &ctx)?;
                Ok(to_value(FractionRow {
                    p: r.p,
                    e: r.e,
                    d: r.d,
                    f: r.f,
                    g: r.g,
                    count: r.count,
                    fraction,
                    at_least_one_third: 3 * (r.p - r.count) >= r.p,
                }))
            })
            .collect::<Result<_, Error>>()?,
        ExperimentKind::Equiv => pairs
            .iter()
            .map(|(f, g)| {
                Ok(to_value(EquivRow {
                    p: ctx.p(),
                    e: ctx.e(),
                    d: f.degree().max(g.degree()),
                    f: f.to_list_string(),
                    g: g.to_list_string(),
                    equivalent: stats::equiv_bruteforce(f, g, &ctx)?,
                }))
            })
            .collect::<Result<_, Error>>()?,
        ExperimentKind::ProductSet => {
            let h = args.h.ok_or_else(|| Error::InvalidParameter("product-set needs --h".into()))?;
            let nu = args.nu.ok_or_else(|| Error::InvalidParameter("product-set needs --nu".into()))?;
            pairs
                .iter()
                .map(|(f, g)| stats::product_set_size(f, g, h, nu, &ctx).map(to_value))
                .collect::<Result<_, _>>()?
        }
    };
    eprintln!("experiment {}: {} row(s)", kind_name(args.kind), rows.len());
    match args.format {
        Format::Json => {
            let doc = json!({
                "command": "experiment",
                "kind": kind_name(args.kind),
                "p": ctx.p(),
                "e": ctx.e(),
                "d": args.d,
                "seed": args.seed,
                "trials": pairs.len(),
                "reports": rows,
            });
            Ok(format!("{}\n", serde_json::to_string(&doc).expect("json serializes")))
        }
        Format::Csv => report::emit_value_rows(&rows),
    }
}

fn to_value<T: serde::Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}
