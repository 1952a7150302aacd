//! Quantize and entropy-code a Laplacian-like symbol stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ragft::coding::{quantize, rlgr_decode, rlgr_encode};

fn main() -> ragft::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let values: Vec<f64> = (0..100_000)
        .map(|i| {
            let u: f64 = rng.random_range(-0.5..0.5);
            let scale = if i % 10 == 0 { 40.0 } else { 2.0 };
            -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
        })
        .collect();
    for step in [0.5, 1.0, 4.0, 16.0, 64.0] {
        let symbols = quantize(&values, step)?;
        let bytes = rlgr_encode(&symbols);
        assert_eq!(rlgr_decode(&bytes, symbols.len())?, symbols);
        let zeros = symbols.iter().filter(|s| **s == 0).count();
        println!(
            "step {step:>5}: {:.3} bits/symbol, {:.1}% zeros",
            bytes.len() as f64 * 8.0 / symbols.len() as f64,
            100.0 * zeros as f64 / symbols.len() as f64
        );
    }
    Ok(())
}
