//! Fixed-point rendering and the window CSV layout.

use std::io::Write;

use rezeta::scan::NegativeWindow;
use rug::{Float, Integer, Rational};

pub const CSV_HEADER: [&str; 5] = ["t_min", "re_zeta_min", "t_start", "t_end", "length"];

/// `x` rounded to `places` decimals, halves away from zero, computed from
/// the exact binary value. A negative value that rounds to zero keeps its
/// sign so a window minimum never prints as non-negative.
pub fn fixed(x: f64, places: u32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    round_exact(Rational::from_f64(x).expect("finite"), x < 0.0, places)
}

/// [`fixed`] for an MPFR value.
pub fn fixed_float(x: &Float, places: u32) -> String {
    match x.to_rational() {
        Some(q) => round_exact(q, x.is_sign_negative(), places),
        None => x.to_string(),
    }
}

fn round_exact(exact: Rational, negative: bool, places: u32) -> String {
    let scaled = exact * Integer::from(Integer::u_pow_u(10, places));
    let n = Integer::from(scaled.round_ref());
    let digits = n.abs().to_string();
    let p = places as usize;
    let padded = format!("{digits:0>width$}", width = p + 1);
    let (int, frac) = padded.split_at(padded.len() - p);
    let sign = if negative { "-" } else { "" };
    if p == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// One CSV row per window, four decimals.
pub fn write_windows_csv<W: Write>(out: W, windows: &[NegativeWindow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for win in windows {
        w.write_record([
            fixed(win.t_min, 4),
            fixed(win.min_value, 4),
            fixed(win.t_start, 4),
            fixed(win.t_end, 4),
            fixed(win.length, 4),
        ])?;
    }
    w.flush()?;
    Ok(())
}
