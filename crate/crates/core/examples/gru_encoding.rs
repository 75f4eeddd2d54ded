//! Feeds a noisy observation stream through the fixed GRU encoder and shows
//! that batch and incremental encodings agree.
//!
//! cargo run --release --example gru_encoding

use quadlab::rng::seeded;
use quadlab::GruEncoder;
use rand::Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = seeded(7);
    let mut enc = GruEncoder::new(14, 32, 7)?;
    let stream: Vec<Vec<f64>> = (0..100).map(|_| (0..14).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();

    let batch = enc.encode(&stream)?;
    enc.reset();
    let mut widest: f64 = 0.0;
    for (k, obs) in stream.iter().enumerate() {
        let h = enc.step(obs)?;
        widest = h.iter().fold(widest, |m, v| m.max(v.abs()));
        if k % 20 == 0 {
            let head: Vec<String> = h.iter().take(4).map(|v| format!("{v:+.3}")).collect();
            println!("step {k:>3}  h[..4] = [{}]", head.join(", "));
        }
    }
    let diff = batch.iter().zip(enc.hidden()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("batch vs incremental max |diff| = {diff:e}");
    println!("largest |h| seen = {widest:.4}");
    println!("z = hidden ++ obs has {} entries", enc.hidden_dim() + enc.input_dim());
    Ok(())
}
