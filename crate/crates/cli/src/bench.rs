//! Grid runs of randomized interpolation, one row per `(p, e, d)` cell.

use std::time::Instant;

use hidden_power::interp::{self, InterpConfig};
use hidden_power::report::{self, Format};
use hidden_power::{Error, FieldCtx, LocalOracle, MonicPoly, PowerOracle};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::run::{fail, EXIT_OK, EXIT_USAGE};
use crate::BenchArgs;

/// `wall_ms` is last so determinism checks can drop the final column.
#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub p: u64,
    pub e: u64,
    pub d: usize,
    pub status: String,
    pub search_space: Option<u64>,
    pub trials: usize,
    pub rounds: Option<usize>,
    pub test_set_size: Option<usize>,
    pub queries_used: u64,
    pub verified: usize,
    pub exact: usize,
    pub wall_ms: u64,
}

fn run_cell(p: u64, e: u64, d: usize, args: &BenchArgs, rng: &mut ChaCha8Rng) -> Result<BenchRow, Error> {
    let ctx = FieldCtx::new(p, e)?;
    let mut row = BenchRow {
        p,
        e,
        d,
        status: "ok".into(),
        search_space: interp::search_space(e, d),
        trials: args.trials,
        rounds: None,
        test_set_size: None,
        queries_used: 0,
        verified: 0,
        exact: 0,
        wall_ms: 0,
    };
    let start = Instant::now();
    for _ in 0..args.trials {
        let hidden = MonicPoly::random(&ctx, d, rng);
        let oracle = LocalOracle::new(ctx, hidden.clone())?;
        let cfg = InterpConfig::new(d, args.epsilon, rng.next_u64());
        let res = interp::randomized_interpolate(&oracle, &cfg)?;
        row.rounds = Some(res.rounds_used);
        row.test_set_size = Some(res.test_set_size);
        row.queries_used += oracle.query_count();
        row.verified += res.verified as usize;
        row.exact += (res.candidate == hidden) as usize;
    }
    row.wall_ms = start.elapsed().as_millis() as u64;
    Ok(row)
}

pub fn bench(args: &BenchArgs) -> u8 {
    let cells = args.p.len() * args.e.len() * args.d.len();
    if cells > args.max_cells {
        return fail("bench", &Error::InvalidParameter(format!("grid has {cells} cells, limit is {}", args.max_cells)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut rows = Vec::with_capacity(cells);
    for &p in &args.p {
        for &e in &args.e {
            for &d in &args.d {
                let row = run_cell(p, e, d, args, &mut rng).unwrap_or_else(|err| BenchRow {
                    p,
                    e,
                    d,
                    status: err.to_string(),
                    search_space: interp::search_space(e, d),
                    trials: args.trials,
                    rounds: None,
                    test_set_size: None,
                    queries_used: 0,
                    verified: 0,
                    exact: 0,
                    wall_ms: 0,
                });
                eprintln!("bench p={p} e={e} d={d}: {}", row.status);
                rows.push(row);
            }
        }
    }
    let out = match args.format {
        Format::Csv => report::emit_reports(&rows, Format::Csv),
        Format::Json => Ok(format!("{}\n", serde_json::json!({ "command": "bench", "seed": args.seed, "rows": rows }))),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(err) => {
            eprintln!("bench: {err}");
            EXIT_USAGE
        }
    }
}
