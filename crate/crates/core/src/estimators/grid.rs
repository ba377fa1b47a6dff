/// Scales ⌊2^{j/2}⌋ for j ≥ 2, deduplicated, up to `max_scale` inclusive.
pub fn geometric_grid(max_scale: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut j = 2u32;
    loop {
        let n = 2f64.powf(f64::from(j) / 2.0).floor() as usize;
        if n > max_scale {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
        j += 1;
    }
    out
}

/// Fewest blocks (AVE) or segments (Higuchi) per scale. With only a handful
/// the largest scales dominate the regression with noise and pull H down.
const MIN_PIECES: usize = 64;

/// At least `MIN_PIECES` pieces per scale, relaxed to `loose` pieces when
/// the series is too short to give 4 scales.
fn capped_grid(n: usize, loose: usize, max_scale: Option<usize>) -> Vec<usize> {
    let user = max_scale.unwrap_or(usize::MAX);
    let strict = geometric_grid((n / MIN_PIECES).min(user));
    if strict.len() >= 4 {
        strict
    } else {
        geometric_grid((n / loose).min(user))
    }
}

/// AVE block sizes for a series of length `n`, optionally capped at
/// `max_scale`.
pub fn ave_block_grid(n: usize, max_scale: Option<usize>) -> Vec<usize> {
    capped_grid(n, 8, max_scale)
}

/// Higuchi strides for a path of length `n`; short paths keep ⌊(n−1)/k⌋ ≥ 4.
pub fn higuchi_window_grid(n: usize, max_scale: Option<usize>) -> Vec<usize> {
    capped_grid(n.saturating_sub(1), 4, max_scale)
}

/// Up to `count` distinct log-spaced integer lags in `[lo, hi]`.
pub fn log_spaced_lags(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if lo == 0 || hi < lo || count == 0 {
        return Vec::new();
    }
    if count == 1 || hi == lo {
        return vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .map(|k| k.clamp(lo, hi))
        .collect();
    out.dedup();
    out
}
