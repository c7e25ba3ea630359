//! Wall-clock comparison of the direct and FFT convolution engines.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_bayes::par;
use spectral_bayes::spectral::convolve;
use spectral_bayes::{Engine, Mode};

use crate::commands::{emit_text, summary_sink};
use crate::error::CliError;
use crate::BenchArgs;

pub const DEFAULT_SEED: u64 = 42;
pub const MIN_REPEATS: usize = 5;
pub const MIN_SIZE: usize = 33;
/// Above this size the direct engine needs `--force`.
pub const DIRECT_LIMIT: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRecord {
    pub n: usize,
    pub engine: Engine,
    /// Median seconds per call.
    pub wall_time: f64,
    pub repeats: usize,
}

pub fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var("HB_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Contract(format!("HB_SEED must be a non-negative integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn parse_sizes(text: &str) -> Result<Vec<usize>, CliError> {
    let sizes = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Contract(format!("cannot read size {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(bad) = sizes.iter().find(|&&n| n < MIN_SIZE || n % 2 == 0) {
        return Err(CliError::Contract(format!("sizes must be odd and at least {MIN_SIZE}, got {bad}")));
    }
    Ok(sizes)
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let k = (n - 1) / 2;
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[k] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
    for j in 1..=k {
        let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        v[k + j] = z;
        v[k - j] = z.conj();
    }
    v
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

fn time_engine(a: &[Complex64], b: &[Complex64], engine: Engine, repeats: usize) -> Result<f64, CliError> {
    // warm-up, discarded
    convolve(a, b, Mode::Padded, engine)?;
    let mut samples = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t = Instant::now();
        std::hint::black_box(convolve(a, b, Mode::Padded, engine)?);
        samples.push(t.elapsed().as_secs_f64().max(1e-9));
    }
    Ok(median(samples))
}

/// Least-squares slope of `ln t` against `ln N`; `None` below two points.
pub fn scaling_exponent(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

pub fn measure(sizes: &[usize], repeats: usize, force: bool, seed: u64) -> Result<(Vec<BenchRecord>, Vec<usize>), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for &n in sizes {
        let a = random_hermitian(&mut rng, n);
        let b = random_hermitian(&mut rng, n);
        for engine in [Engine::Direct, Engine::Fft] {
            if engine == Engine::Direct && n > DIRECT_LIMIT && !force {
                skipped.push(n);
                continue;
            }
            records.push(BenchRecord {
                n,
                engine,
                wall_time: time_engine(&a, &b, engine, repeats)?,
                repeats,
            });
        }
    }
    Ok((records, skipped))
}

fn engine_name(e: Engine) -> &'static str {
    match e {
        Engine::Direct => "direct",
        Engine::Fft => "fft",
    }
}

pub fn run(a: &BenchArgs) -> Result<(), CliError> {
    let sizes = parse_sizes(&a.sizes)?;
    if a.repeats < MIN_REPEATS {
        return Err(CliError::Contract(format!("--repeats must be at least {MIN_REPEATS}")));
    }
    let seed = seed_from_env()?;
    let (records, skipped) = if a.parallel {
        measure(&sizes, a.repeats, a.force, seed)?
    } else {
        par::single_threaded(|| measure(&sizes, a.repeats, a.force, seed))?
    };

    let mut csv = String::from("N,engine,wall_time,repeats\n");
    for r in &records {
        csv.push_str(&format!("{},{},{:e},{}\n", r.n, engine_name(r.engine), r.wall_time, r.repeats));
    }
    emit_text(a.out.as_deref(), &csv)?;

    let mut sink = summary_sink(a.out.is_some());
    let mut say = |s: String| writeln!(sink, "{s}").map_err(CliError::from);
    for n in skipped {
        say(format!("skipped: direct engine at N = {n} (above {DIRECT_LIMIT}; pass --force)"))?;
    }
    let series = |engine: Engine| -> Vec<(usize, f64)> {
        records.iter().filter(|r| r.engine == engine).map(|r| (r.n, r.wall_time)).collect()
    };
    let fft = scaling_exponent(&series(Engine::Fft));
    let direct = scaling_exponent(&series(Engine::Direct));
    if fft.is_some() || direct.is_some() {
        let show = |e: Option<f64>| e.map_or("n/a".to_string(), |v| format!("{v:.3}"));
        say(format!("exponents: fft={} direct={}", show(fft), show(direct)))?;
    }
    Ok(())
}
