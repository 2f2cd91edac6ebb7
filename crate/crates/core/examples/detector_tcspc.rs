//! Two uncorrelated detector streams: accidental coincidences against the
//! analytic rate, a correlation histogram and a tag-file round trip.

use homsim::interference::accidental_rate;
use homsim::tcspc::{
    correlation_histogram, count_coincidences, decode_tags, encode_tags, simulate_detection,
    DetectorConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poisson_times(rate_hz: f64, duration_s: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut t = 0.0;
    let mut out = Vec::new();
    loop {
        t += -(1.0 - rng.random::<f64>()).ln() / (rate_hz * 1e-12);
        if t >= duration_s * 1e12 {
            return out;
        }
        out.push(t);
    }
}

fn main() -> homsim::Result<()> {
    let duration_s = 500.0;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = poisson_times(1e4, duration_s, &mut rng);
    let b = poisson_times(1e4, duration_s, &mut rng);
    let det = DetectorConfig {
        efficiency: 1.0,
        dark_rate_hz: 0.0,
        jitter_fwhm_ps: 50.0,
        dead_time_ns: 10.0,
    };
    let [ta, tb] = simulate_detection([&a, &b], [&det, &det], duration_s, 11)?;
    let c = count_coincidences(&ta, &tb, 256.0, duration_s)?;
    let r1 = ta.len() as f64 / duration_s;
    let r2 = tb.len() as f64 / duration_s;
    println!(
        "singles {r1:.0} / {r2:.0} Hz, accidentals {} in {duration_s} s = {:.4} Hz (analytic {:.4} Hz)",
        c.count,
        c.rate_hz,
        accidental_rate(r1, r2, 256.0)
    );

    let h = correlation_histogram(&ta, &tb, 1000, 10_000)?;
    println!("correlation histogram, 1 ns bins:");
    for (centre, n) in h.bin_centres_ps().zip(&h.counts) {
        println!("  {centre:8.0} ps  {n}");
    }

    let head = &ta[..1000];
    let bytes = encode_tags(head);
    assert_eq!(decode_tags(&bytes, "memory")?, head);
    println!("tag file: {} tags -> {} bytes", head.len(), bytes.len());
    Ok(())
}
