//! LOBSTER message / orderbook parsing and the order-disbalance series.
//!
//! A LOBSTER day comes as two header-less CSV files of equal row count:
//!
//! * `message`: `time,type,order_id,size,price,direction`
//! * `orderbook`: `AskPrice1,AskSize1,BidPrice1,BidSize1,...` for `depth` levels
//!
//! Prices are integers (dollar price × 10000) and sizes are share counts; both
//! stay integral here so the disbalance is exact.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Series, SeriesKind, SeriesMeta};

pub const DEFAULT_DEPTH: usize = 10;

/// Seconds after midnight, kept as integer nanoseconds plus the number of
/// fractional digits the source used, so rows re-serialize verbatim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EventTime {
    pub nanos: u64,
    pub frac_digits: u8,
}

impl EventTime {
    pub fn from_nanos(nanos: u64) -> Self {
        EventTime {
            nanos,
            frac_digits: 9,
        }
    }

    pub fn seconds(&self) -> f64 {
        self.nanos as f64 * 1e-9
    }

    fn parse(s: &str) -> Option<EventTime> {
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int.is_empty() || frac.len() > 9 {
            return None;
        }
        if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let secs: u64 = int.parse().ok()?;
        let mut nanos: u64 = 0;
        for b in frac.bytes() {
            nanos = nanos * 10 + u64::from(b - b'0');
        }
        nanos *= 10u64.pow(9 - frac.len() as u32);
        Some(EventTime {
            nanos: secs.checked_mul(1_000_000_000)?.checked_add(nanos)?,
            frac_digits: frac.len() as u8,
        })
    }
}

impl fmt::Display for EventTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let secs = self.nanos / 1_000_000_000;
        let frac = self.nanos % 1_000_000_000;
        if self.frac_digits == 0 {
            return write!(f, "{secs}");
        }
        let scaled = frac / 10u64.pow(9 - u32::from(self.frac_digits));
        write!(
            f,
            "{secs}.{scaled:0width$}",
            width = usize::from(self.frac_digits)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventType {
    Submission = 1,
    Cancellation = 2,
    Deletion = 3,
    ExecutionVisible = 4,
    ExecutionHidden = 5,
    Cross = 6,
    Halt = 7,
}

impl EventType {
    pub fn from_code(code: i64) -> Option<EventType> {
        Some(match code {
            1 => EventType::Submission,
            2 => EventType::Cancellation,
            3 => EventType::Deletion,
            4 => EventType::ExecutionVisible,
            5 => EventType::ExecutionHidden,
            6 => EventType::Cross,
            7 => EventType::Halt,
            _ => return None,
        })
    }

    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Buy,
    Sell,
}

impl Direction {
    pub fn sign(self) -> i8 {
        match self {
            Direction::Buy => 1,
            Direction::Sell => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LobEvent {
    pub time: EventTime,
    pub event_type: EventType,
    pub order_id: i64,
    pub size: i64,
    pub price: i64,
    pub direction: Direction,
}

impl LobEvent {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.time,
            self.event_type.code(),
            self.order_id,
            self.size,
            self.price,
            self.direction.sign()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub ask_price: i64,
    pub ask_size: i64,
    pub bid_price: i64,
    pub bid_size: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookSnapshot {
    pub levels: Vec<Level>,
}

impl BookSnapshot {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn bid_volume(&self) -> i64 {
        self.levels.iter().map(|l| l.bid_size).sum()
    }

    pub fn ask_volume(&self) -> i64 {
        self.levels.iter().map(|l| l.ask_size).sum()
    }

    /// Total bid volume minus total ask volume over all levels.
    pub fn disbalance(&self) -> i64 {
        self.bid_volume() - self.ask_volume()
    }

    /// Ask prices strictly increase and bid prices strictly decrease across
    /// occupied levels. Padding levels (size 0) are skipped.
    pub fn is_well_ordered(&self) -> bool {
        let asks: Vec<i64> = self
            .levels
            .iter()
            .filter(|l| l.ask_size > 0)
            .map(|l| l.ask_price)
            .collect();
        let bids: Vec<i64> = self
            .levels
            .iter()
            .filter(|l| l.bid_size > 0)
            .map(|l| l.bid_price)
            .collect();
        asks.windows(2).all(|w| w[0] < w[1]) && bids.windows(2).all(|w| w[0] > w[1])
    }

    pub fn to_csv_row(&self) -> String {
        let mut out = String::new();
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{},{},{},{}",
                l.ask_price, l.ask_size, l.bid_price, l.bid_size
            ));
        }
        out
    }
}

fn parse_int(field: &str, what: &str, origin: &str, line: usize) -> Result<i64> {
    field.trim().parse::<i64>().map_err(|_| Error::Parse {
        origin: origin.to_string(),
        line,
        msg: format!("unparsable {what}: {field:?}"),
    })
}

/// Parses message rows from any reader. `origin` labels errors.
pub fn parse_messages_from<R: Read>(reader: R, origin: &str) -> Result<Vec<LobEvent>> {
    let mut events = Vec::new();
    let mut last_time: Option<EventTime> = None;
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                origin: origin.to_string(),
                line: lineno,
                msg: format!("expected 6 columns, found {}", fields.len()),
            });
        }
        let time = EventTime::parse(fields[0].trim()).ok_or_else(|| Error::Parse {
            origin: origin.to_string(),
            line: lineno,
            msg: format!("unparsable time: {:?}", fields[0]),
        })?;
        if let Some(prev) = last_time {
            if time.nanos < prev.nanos {
                return Err(Error::Parse {
                    origin: origin.to_string(),
                    line: lineno,
                    msg: "time decreases".to_string(),
                });
            }
        }
        last_time = Some(time);

        let code = parse_int(fields[1], "event type", origin, lineno)?;
        let event_type = EventType::from_code(code).ok_or_else(|| Error::Parse {
            origin: origin.to_string(),
            line: lineno,
            msg: format!("event type {code} outside 1..7"),
        })?;
        let order_id = parse_int(fields[2], "order id", origin, lineno)?;
        let size = parse_int(fields[3], "size", origin, lineno)?;
        if size < 0 {
            return Err(Error::Parse {
                origin: origin.to_string(),
                line: lineno,
                msg: format!("negative size {size}"),
            });
        }
        let price = parse_int(fields[4], "price", origin, lineno)?;
        let direction = match parse_int(fields[5], "direction", origin, lineno)? {
            1 => Direction::Buy,
            -1 => Direction::Sell,
            other => {
                return Err(Error::Parse {
                    origin: origin.to_string(),
                    line: lineno,
                    msg: format!("direction must be 1 or -1, found {other}"),
                })
            }
        };
        events.push(LobEvent {
            time,
            event_type,
            order_id,
            size,
            price,
            direction,
        });
    }
    if events.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(events)
}

pub fn parse_messages(path: &Path) -> Result<Vec<LobEvent>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_messages_from(file, &path.display().to_string())
}

/// Parses orderbook rows with `depth` levels (4 × depth columns each).
pub fn parse_orderbook_from<R: Read>(
    reader: R,
    depth: usize,
    origin: &str,
) -> Result<Vec<BookSnapshot>> {
    if depth == 0 {
        return Err(Error::param("depth must be at least 1"));
    }
    let expected = 4 * depth;
    let mut snaps = Vec::new();
    let mut buf: Vec<i64> = Vec::with_capacity(expected);
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        buf.clear();
        for field in line.split(',') {
            buf.push(parse_int(field, "book field", origin, lineno)?);
        }
        if buf.len() != expected {
            return Err(Error::Parse {
                origin: origin.to_string(),
                line: lineno,
                msg: format!(
                    "expected {expected} columns for depth {depth}, found {}",
                    buf.len()
                ),
            });
        }
        let levels: Vec<Level> = buf
            .chunks_exact(4)
            .map(|c| Level {
                ask_price: c[0],
                ask_size: c[1],
                bid_price: c[2],
                bid_size: c[3],
            })
            .collect();
        if let Some(l) = levels.iter().find(|l| l.ask_size < 0 || l.bid_size < 0) {
            return Err(Error::Parse {
                origin: origin.to_string(),
                line: lineno,
                msg: format!("negative size ({}, {})", l.ask_size, l.bid_size),
            });
        }
        snaps.push(BookSnapshot { levels });
    }
    if snaps.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(snaps)
}

pub fn parse_orderbook(path: &Path, depth: usize) -> Result<Vec<BookSnapshot>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_orderbook_from(file, depth, &path.display().to_string())
}

pub fn write_messages(path: &Path, events: &[LobEvent]) -> Result<()> {
    let mut text = String::with_capacity(events.len() * 48);
    for e in events {
        text.push_str(&e.to_csv_row());
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_orderbook(path: &Path, snapshots: &[BookSnapshot]) -> Result<()> {
    let mut text = String::new();
    for s in snapshots {
        text.push_str(&s.to_csv_row());
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Exact integer disbalance per snapshot.
pub fn disbalance_values(snapshots: &[BookSnapshot]) -> Vec<i64> {
    snapshots.iter().map(BookSnapshot::disbalance).collect()
}

/// Order-disbalance event series X(j) = Σ_k (bid_k − ask_k).
pub fn build_disbalance(snapshots: &[BookSnapshot], meta: SeriesMeta) -> Result<Series> {
    if snapshots.is_empty() {
        return Err(Error::EmptyInput);
    }
    let values = disbalance_values(snapshots)
        .into_iter()
        .map(|v| v as f64)
        .collect();
    Ok(Series::new(values, SeriesKind::Empirical, meta))
}

/// First differences Y(i) = X(i+1) − X(i).
pub fn increments(series: &Series) -> Result<Series> {
    if series.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: series.len(),
        });
    }
    let values = series.values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(series.derive(values, SeriesKind::Increments, "increments"))
}

/// Concatenates per-day increment series. Increments are never formed across
/// a day boundary, so overnight jumps do not show up.
pub fn join_daily(days: &[Series]) -> Result<Series> {
    let first = days.first().ok_or(Error::EmptyInput)?;
    let ticker = &first.meta.ticker;
    let mut values = Vec::with_capacity(days.iter().map(Series::len).sum());
    let mut prev_date: Option<&String> = None;
    for day in days {
        if &day.meta.ticker != ticker {
            return Err(Error::TickerMismatch {
                expected: ticker.clone(),
                found: day.meta.ticker.clone(),
            });
        }
        if let (Some(prev), Some(cur)) = (prev_date, day.meta.date_start.as_ref()) {
            if cur < prev {
                return Err(Error::param(format!(
                    "daily series out of order: {cur} after {prev}"
                )));
            }
        }
        if day.meta.date_end.is_some() {
            prev_date = day.meta.date_end.as_ref();
        }
        values.extend_from_slice(&day.values);
    }
    if days.len() == 1 {
        return Ok(first.clone());
    }
    let mut meta = first.meta.clone();
    meta.date_end = days.last().and_then(|d| d.meta.date_end.clone());
    meta.provenance
        .push(format!("join_daily({} days)", days.len()));
    Ok(Series::new(values, first.kind, meta))
}
