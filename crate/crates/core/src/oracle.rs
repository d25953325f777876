//! Power oracles: the only view algorithms get of a hidden polynomial.
//!
//! An oracle answers `x -> f(x)^e` for residues `x` of its field and counts
//! every answered query. [`LocalOracle`] holds the polynomial in-process,
//! [`RemoteOracle`] talks to a [`serve`] loop over newline-delimited JSON:
//!
//! ```text
//! server -> {"p":"13","e":"3"}      announced once per connection
//! client -> {"x":"2"}
//! server -> {"y":"1"}
//! client -> {"x":"13"}
//! server -> {"error":"out_of_domain"}
//! ```
//!
//! Residues travel as decimal strings. A malformed line is answered with
//! `{"error":"parse"}` and the connection stays open.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Felt, FieldCtx};
use crate::poly::MonicPoly;

/// Black-box access to `x -> f(x)^e` over the prime field of [`Self::field`].
pub trait PowerOracle: Send + Sync {
    /// The prime and exponent this oracle answers for.
    fn field(&self) -> FieldCtx;

    /// `f(x)^e`. Rejects anything that is not a residue mod `p`.
    fn query(&self, x: u64) -> Result<Felt>;

    /// Number of queries answered so far.
    fn query_count(&self) -> u64;
}

impl<O: PowerOracle + ?Sized> PowerOracle for &O {
    fn field(&self) -> FieldCtx {
        (**self).field()
    }
    fn query(&self, x: u64) -> Result<Felt> {
        (**self).query(x)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

impl<O: PowerOracle + ?Sized> PowerOracle for Box<O> {
    fn field(&self) -> FieldCtx {
        (**self).field()
    }
    fn query(&self, x: u64) -> Result<Felt> {
        (**self).query(x)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

/// `f(x)^e` computed directly.
#[inline]
pub fn power_value(ctx: &FieldCtx, f: &MonicPoly, x: Felt) -> Felt {
    ctx.pow(f.eval(ctx, x), ctx.e())
}

/// An oracle holding its hidden polynomial in memory.
#[derive(Debug)]
pub struct LocalOracle {
    ctx: FieldCtx,
    hidden: MonicPoly,
    count: AtomicU64,
}

impl LocalOracle {
    pub fn new(ctx: FieldCtx, hidden: MonicPoly) -> Result<Self> {
        hidden.validate(&ctx)?;
        Ok(LocalOracle { ctx, hidden, count: AtomicU64::new(0) })
    }

    /// Reveals the hidden polynomial. Meant for tests and reports only.
    pub fn hidden(&self) -> &MonicPoly {
        &self.hidden
    }
}

impl PowerOracle for LocalOracle {
    fn field(&self) -> FieldCtx {
        self.ctx
    }

    fn query(&self, x: u64) -> Result<Felt> {
        let x = self.ctx.felt(x)?;
        self.count.fetch_add(1, Ordering::Relaxed);
        Ok(power_value(&self.ctx, &self.hidden, x))
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

/// First line sent by the server on every connection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Announce {
    pub p: String,
    pub e: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRequest {
    pub x: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QueryResponse {
    Value { y: String },
    Error { error: String },
}

pub const ERR_PARSE: &str = "parse";
pub const ERR_OUT_OF_DOMAIN: &str = "out_of_domain";

fn write_frame<W: Write, T: Serialize>(w: &mut W, frame: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *w, frame)?;
    w.write_all(b"\n")?;
    w.flush()
}

/// Answers one request line.
pub fn respond(oracle: &LocalOracle, line: &str) -> QueryResponse {
    let Ok(req) = serde_json::from_str::<QueryRequest>(line) else {
        return QueryResponse::Error { error: ERR_PARSE.into() };
    };
    if req.x.is_empty() || !req.x.bytes().all(|b| b.is_ascii_digit()) {
        return QueryResponse::Error { error: ERR_PARSE.into() };
    }
    // All-digit strings that overflow u64 are certainly not residues.
    let Ok(x) = req.x.parse::<u64>() else {
        return QueryResponse::Error { error: ERR_OUT_OF_DOMAIN.into() };
    };
    match oracle.query(x) {
        Ok(y) => QueryResponse::Value { y: y.to_string() },
        Err(_) => QueryResponse::Error { error: ERR_OUT_OF_DOMAIN.into() },
    }
}

/// Serves one connection until the peer closes it.
pub fn serve<R: BufRead, W: Write>(oracle: &LocalOracle, reader: R, mut writer: W) -> io::Result<()> {
    let ctx = oracle.field();
    write_frame(&mut writer, &Announce { p: ctx.p().to_string(), e: ctx.e().to_string() })?;
    for line in reader.lines() {
        let line = line?;
        write_frame(&mut writer, &respond(oracle, line.trim_end_matches('\r')))?;
    }
    Ok(())
}

/// Accepts connections one at a time, stopping after `max_connections` if
/// given. Queries are counted across connections by `oracle`.
pub fn serve_tcp(oracle: &LocalOracle, listener: &TcpListener, max_connections: Option<usize>) -> io::Result<()> {
    if max_connections == Some(0) {
        return Ok(());
    }
    for (i, stream) in listener.incoming().enumerate() {
        let stream = stream?;
        let reader = BufReader::new(stream.try_clone()?);
        // A client dropping mid-session is not a server failure.
        if let Err(err) = serve(oracle, reader, &stream) {
            if err.kind() != io::ErrorKind::BrokenPipe && err.kind() != io::ErrorKind::ConnectionReset {
                return Err(err);
            }
        }
        if max_connections.is_some_and(|m| i + 1 >= m) {
            break;
        }
    }
    Ok(())
}

struct Channel {
    reader: Box<dyn BufRead + Send>,
    writer: Box<dyn Write + Send>,
}

/// Client side of the JSON-lines protocol.
pub struct RemoteOracle {
    ctx: FieldCtx,
    channel: Mutex<Channel>,
    count: AtomicU64,
}

impl std::fmt::Debug for RemoteOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteOracle").field("ctx", &self.ctx).field("count", &self.count).finish_non_exhaustive()
    }
}

fn transport(err: io::Error) -> Error {
    Error::Transport(err.to_string())
}

impl RemoteOracle {
    pub fn connect<A: ToSocketAddrs>(addr: A) -> Result<Self> {
        let stream = TcpStream::connect(addr).map_err(transport)?;
        stream.set_nodelay(true).map_err(transport)?;
        let reader = BufReader::new(stream.try_clone().map_err(transport)?);
        Self::from_io(reader, stream)
    }

    /// Uses an arbitrary byte channel, e.g. a child process's stdio.
    pub fn from_io<R, W>(reader: R, writer: W) -> Result<Self>
    where
        R: BufRead + Send + 'static,
        W: Write + Send + 'static,
    {
        let mut channel = Channel { reader: Box::new(reader), writer: Box::new(writer) };
        let line = read_line(&mut channel.reader)?;
        let hello: Announce =
            serde_json::from_str(&line).map_err(|err| Error::Protocol(format!("bad announce {line:?}: {err}")))?;
        let p = parse_decimal(&hello.p)?;
        let e = parse_decimal(&hello.e)?;
        let ctx = FieldCtx::new(p, e)?;
        Ok(RemoteOracle { ctx, channel: Mutex::new(channel), count: AtomicU64::new(0) })
    }
}

fn read_line(reader: &mut Box<dyn BufRead + Send>) -> Result<String> {
    let mut line = String::new();
    let n = reader.read_line(&mut line).map_err(transport)?;
    if n == 0 {
        return Err(Error::Transport("connection closed".into()));
    }
    Ok(line.trim_end().to_string())
}

fn parse_decimal(s: &str) -> Result<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Protocol(format!("not a decimal residue: {s:?}")));
    }
    s.parse().map_err(|_| Error::Protocol(format!("residue out of range: {s:?}")))
}

impl PowerOracle for RemoteOracle {
    fn field(&self) -> FieldCtx {
        self.ctx
    }

    fn query(&self, x: u64) -> Result<Felt> {
        let mut ch = self.channel.lock().expect("oracle channel poisoned");
        write_frame(&mut ch.writer, &QueryRequest { x: x.to_string() }).map_err(transport)?;
        let line = read_line(&mut ch.reader)?;
        let resp: QueryResponse =
            serde_json::from_str(&line).map_err(|err| Error::Protocol(format!("bad response {line:?}: {err}")))?;
        match resp {
            QueryResponse::Value { y } => {
                let y = self
                    .ctx
                    .felt(parse_decimal(&y)?)
                    .map_err(|_| Error::Protocol(format!("response {y} is not a residue")))?;
                self.count.fetch_add(1, Ordering::Relaxed);
                Ok(y)
            }
            QueryResponse::Error { error } if error == ERR_OUT_OF_DOMAIN => {
                Err(Error::OutOfDomain { value: x, p: self.ctx.p() })
            }
            QueryResponse::Error { error } => Err(Error::Protocol(format!("server error {error:?}"))),
        }
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn oracle(coeffs: &str) -> LocalOracle {
        let ctx = FieldCtx::new(13, 3).unwrap();
        LocalOracle::new(ctx, MonicPoly::parse(&ctx, coeffs).unwrap()).unwrap()
    }

    #[test]
    fn query_examples() {
        let o = oracle("[1]");
        assert_eq!(o.query(2).unwrap(), Felt::ONE);
        assert_eq!(o.query(12).unwrap(), Felt::ZERO);
        assert_eq!(o.query(13), Err(Error::OutOfDomain { value: 13, p: 13 }));
        assert_eq!(o.query(2).unwrap(), o.query(2).unwrap());
    }

    #[test]
    fn query_count_examples() {
        let o = oracle("[1]");
        assert_eq!(o.query_count(), 0);
        for x in 0..5 {
            o.query(x).unwrap();
        }
        assert_eq!(o.query_count(), 5);
        let h = 7;
        for x in 0..h {
            o.query(x).unwrap();
        }
        assert_eq!(o.query_count(), 5 + h);
        // rejected queries are not served
        let _ = o.query(99);
        assert_eq!(o.query_count(), 12);
    }

    #[test]
    fn counter_is_shared_across_threads() {
        let o = oracle("[1,2]");
        std::thread::scope(|s| {
            for _ in 0..4 {
                s.spawn(|| {
                    for x in 0..13 {
                        o.query(x).unwrap();
                    }
                });
            }
        });
        assert_eq!(o.query_count(), 52);
    }

    #[test]
    fn local_matches_direct_evaluation_exhaustively() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for p in [13u64, 61, 1009, 9973] {
            for e in [1u64, 2, 3, 4, 6, 12].into_iter().filter(|e| (p - 1) % e == 0) {
                let ctx = FieldCtx::new(p, e).unwrap();
                let f = MonicPoly::random(&ctx, 3, &mut rng);
                let o = LocalOracle::new(ctx, f.clone()).unwrap();
                for x in 0..p {
                    // independent route: expanded sum of powers, then repeated multiplication
                    let xf = Felt::ONE;
                    let xv = ctx.felt(x).unwrap();
                    let mut fx = Felt::ZERO;
                    let mut xk = xf;
                    for c in f.to_dense() {
                        fx = ctx.add(fx, ctx.mul(c, xk));
                        xk = ctx.mul(xk, xv);
                    }
                    let want = (0..e).fold(Felt::ONE, |acc, _| ctx.mul(acc, fx));
                    assert_eq!(o.query(x).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn serve_examples() {
        let o = oracle("[1]");
        let input = "{\"x\":\"2\"}\n{\"x\":\"13\"}\nnot json\n{\"x\":\"-1\"}\n{\"x\":\"99999999999999999999999\"}\n{\"y\":\"1\"}\n";
        let mut out = Vec::new();
        serve(&o, Cursor::new(input), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines,
            vec![
                r#"{"p":"13","e":"3"}"#,
                r#"{"y":"1"}"#,
                r#"{"error":"out_of_domain"}"#,
                r#"{"error":"parse"}"#,
                r#"{"error":"parse"}"#,
                r#"{"error":"out_of_domain"}"#,
                r#"{"error":"parse"}"#,
            ]
        );
        assert_eq!(o.query_count(), 1);
    }

    #[test]
    fn remote_over_tcp_matches_local() {
        let local = oracle("[5,7]");
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::scope(|s| {
            s.spawn(|| serve_tcp(&local, &listener, Some(1)).unwrap());
            let remote = RemoteOracle::connect(addr).unwrap();
            assert_eq!(remote.field(), local.field());
            let reference = oracle("[5,7]");
            for x in 0..13 {
                assert_eq!(remote.query(x).unwrap(), reference.query(x).unwrap());
            }
            assert_eq!(remote.query(13), Err(Error::OutOfDomain { value: 13, p: 13 }));
            assert_eq!(remote.query_count(), 13);
        });
        assert_eq!(local.query_count(), 13);
    }

    #[test]
    fn remote_rejects_bad_announce() {
        let err = RemoteOracle::from_io(Cursor::new("{\"p\":\"15\",\"e\":\"2\"}\n"), Vec::new()).unwrap_err();
        assert_eq!(err, Error::NotPrime(15));
        let err = RemoteOracle::from_io(Cursor::new("hello\n"), Vec::new()).unwrap_err();
        assert!(matches!(err, Error::Protocol(_)));
        let err = RemoteOracle::from_io(Cursor::new(""), Vec::new()).unwrap_err();
        assert!(matches!(err, Error::Transport(_)));
    }
}
