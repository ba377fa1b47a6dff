#![allow(dead_code)]

use std::path::Path;

use flsm_core::lob::{
    write_messages, write_orderbook, BookSnapshot, Direction, EventTime, EventType, Level, LobEvent,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A plausible random book: level-1 sizes wander, deeper levels are fixed.
pub fn random_day(n: usize, depth: usize, seed: u64) -> (Vec<LobEvent>, Vec<BookSnapshot>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut bid, mut ask) = (500i64, 500i64);
    let mut events = Vec::with_capacity(n);
    let mut book = Vec::with_capacity(n);
    for i in 0..n {
        let size = rng.random_range(1..=200);
        let buy = rng.random::<bool>();
        if buy {
            bid = (bid + if rng.random::<bool>() { size } else { -size }).max(1);
        } else {
            ask = (ask + if rng.random::<bool>() { size } else { -size }).max(1);
        }
        events.push(LobEvent {
            time: EventTime::from_nanos(34_200_000_000_000 + i as u64 * 1_000_000),
            event_type: EventType::Submission,
            order_id: i as i64 + 1,
            size,
            price: 1_000_000,
            direction: if buy { Direction::Buy } else { Direction::Sell },
        });
        let levels = (0..depth as i64)
            .map(|k| Level {
                ask_price: 1_000_100 + 100 * k,
                ask_size: if k == 0 { ask } else { 100 + k },
                bid_price: 999_900 - 100 * k,
                bid_size: if k == 0 { bid } else { 100 + 2 * k },
            })
            .collect();
        book.push(BookSnapshot { levels });
    }
    (events, book)
}

/// Writes LOBSTER-named message/orderbook pairs for each date.
pub fn write_lobster(dir: &Path, ticker: &str, dates: &[&str], n: usize, depth: usize) {
    for (i, date) in dates.iter().enumerate() {
        let (events, book) = random_day(n, depth, 1000 + i as u64);
        let stem = format!("{ticker}_{date}_34200000_57600000");
        write_messages(&dir.join(format!("{stem}_message_{depth}.csv")), &events).unwrap();
        write_orderbook(&dir.join(format!("{stem}_orderbook_{depth}.csv")), &book).unwrap();
    }
}
