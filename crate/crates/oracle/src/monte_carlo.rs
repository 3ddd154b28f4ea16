//! Monte Carlo frame simulator with i.i.d. bit errors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chiplink::ecc_model::{effective_codewords, FrameConfig, RsCode};

use crate::OracleError;

#[derive(Clone, Debug, PartialEq)]
pub struct SimStats {
    pub trials: u64,
    /// Whole codewords simulated per frame, `ceil(D / K)`.
    pub codewords_per_frame: u32,
    /// The analytic model's fractional codeword count `D / K`.
    pub effective_codewords: f64,
    pub blocks: u64,
    pub block_failures: u64,
    pub p_blk_fail: f64,
    pub p_blk_fail_se: f64,
    pub frame_failures: u64,
    pub p_frame_fail: f64,
    pub p_frame_fail_se: f64,
}

impl SimStats {
    /// Note on how the integer codeword count brackets the analytic model.
    pub fn pro_rating_note(&self) -> String {
        format!(
            "frames simulated with {} whole codewords; the analytic model uses {:.4}, so the empirical frame-fail rate upper-brackets it",
            self.codewords_per_frame, self.effective_codewords
        )
    }
}

fn se(p: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        (p * (1.0 - p) / n as f64).sqrt()
    }
}

/// Draws `trials` frames of `ceil(D/K)` codewords. Bit errors are placed by
/// geometric gaps, grouped into `m`-bit symbols, and a codeword fails when
/// more than `t` symbols are hit.
pub fn simulate_frames(
    p_pre: f64,
    code: RsCode,
    frame: &FrameConfig,
    trials: u64,
    seed: u64,
) -> Result<SimStats, OracleError> {
    if !(0.0..=1.0).contains(&p_pre) {
        return Err(OracleError::Domain { name: "p_pre", value: p_pre });
    }
    let b_eff: f64 = effective_codewords(code, frame);
    let per_frame = b_eff.ceil() as u32;
    let m = code.symbol_bits() as u64;
    let n = code.n() as u64;
    let bits = n * m;
    let t = code.t() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ln_q = (-p_pre).ln_1p();

    let mut block_failures = 0u64;
    let mut frame_failures = 0u64;
    let mut hit = vec![false; n as usize];
    for _ in 0..trials {
        let mut frame_failed = false;
        for _ in 0..per_frame {
            let symbols_hit = if p_pre == 0.0 {
                0
            } else if p_pre == 1.0 {
                n
            } else {
                hit.iter_mut().for_each(|h| *h = false);
                let mut count = 0u64;
                let mut pos: u64 = 0;
                loop {
                    // gap until the next errored bit
                    let u: f64 = 1.0 - rng.random::<f64>();
                    let gap = (u.ln() / ln_q).floor();
                    if gap >= (bits - pos) as f64 {
                        break;
                    }
                    pos += gap as u64;
                    let s = (pos / m) as usize;
                    if !hit[s] {
                        hit[s] = true;
                        count += 1;
                    }
                    pos += 1;
                    if pos >= bits {
                        break;
                    }
                }
                count
            };
            if symbols_hit > t {
                block_failures += 1;
                frame_failed = true;
            }
        }
        frame_failures += u64::from(frame_failed);
    }

    let blocks = trials * u64::from(per_frame);
    let p_blk = if blocks == 0 { 0.0 } else { block_failures as f64 / blocks as f64 };
    let p_frame = if trials == 0 { 0.0 } else { frame_failures as f64 / trials as f64 };
    Ok(SimStats {
        trials,
        codewords_per_frame: per_frame,
        effective_codewords: b_eff,
        blocks,
        block_failures,
        p_blk_fail: p_blk,
        p_blk_fail_se: se(p_blk, blocks),
        frame_failures,
        p_frame_fail: p_frame,
        p_frame_fail_se: se(p_frame, trials),
    })
}
