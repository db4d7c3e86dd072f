//! Seeded random test points. Each check draws from its own ChaCha stream so
//! adding points to one check never shifts another.

use laplace_growth::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STREAM_PRODUCT: u64 = 1;
pub const STREAM_INVERSION: u64 = 2;
pub const STREAM_SPLITTING: u64 = 3;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` points uniform in area on `r_lo <= |z| <= r_hi`.
pub fn annulus(seed: u64, stream: u64, n: usize, r_lo: f64, r_hi: f64) -> Vec<Complex64> {
    let mut rng = rng(seed, stream);
    (0..n)
        .map(|_| {
            let r = (r_lo * r_lo + (r_hi * r_hi - r_lo * r_lo) * rng.gen::<f64>()).sqrt();
            let theta = std::f64::consts::TAU * rng.gen::<f64>();
            Complex64::from_polar(r, theta)
        })
        .collect()
}

/// `n` points uniform in area on `|z| <= radius`.
pub fn disk(seed: u64, stream: u64, n: usize, radius: f64) -> Vec<Complex64> {
    annulus(seed, stream, n, 0.0, radius)
}

/// Parse `a+bi`, `a-bi`, `a`, `bi`, `i` (also with `j`).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number '{text}'");
    if s.is_empty() {
        return Err(bad());
    }
    let real = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return Ok(Complex64::new(real(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(p) => (&body[..p], &body[p..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => real(t)?,
    };
    Ok(Complex64::new(real(re)?, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_literals() {
        let c = Complex64::new;
        assert_eq!(parse_complex("1+0i").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("-3.5-2i").unwrap(), c(-3.5, -2.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2.5j").unwrap(), c(0.0, 2.5));
        assert_eq!(parse_complex("1e-3+2e1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_complex("-1e+2-i").unwrap(), c(-100.0, -1.0));
        assert_eq!(parse_complex(" 1 + 2i ").unwrap(), c(1.0, 2.0));
        assert!(parse_complex("").is_err());
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn points_stay_in_range_and_repeat() {
        let a = disk(7, STREAM_SPLITTING, 200, 8.0);
        assert!(a.iter().all(|z| z.norm() <= 8.0));
        assert_eq!(a, disk(7, STREAM_SPLITTING, 200, 8.0));
        assert_ne!(a[..5], disk(7, STREAM_INVERSION, 5, 8.0)[..]);
        let b = annulus(7, STREAM_PRODUCT, 200, 1.0, 50.0);
        assert!(b.iter().all(|z| (1.0..=50.0 + 1e-12).contains(&z.norm())));
    }
}
