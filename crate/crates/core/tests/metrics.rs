use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revisp::metrics::{gaussian_taps, psnr, ssim, SSIM_K1, SSIM_K2, SSIM_SIGMA, SSIM_WINDOW};
use revisp::PackedRaw;

fn random_raw(rng: &mut ChaCha8Rng, h: usize, w: usize) -> PackedRaw {
    PackedRaw::new(h, w, (0..h * w * 4).map(|_| rng.random()).collect()).unwrap()
}

/// Direct per-window SSIM with weighted moments computed from scratch.
fn naive_ssim(a: &PackedRaw, b: &PackedRaw) -> f64 {
    let g = gaussian_taps(SSIM_WINDOW, SSIM_SIGMA);
    let (c1, c2) = (SSIM_K1 * SSIM_K1, SSIM_K2 * SSIM_K2);
    let (oh, ow) = (a.height() - SSIM_WINDOW + 1, a.width() - SSIM_WINDOW + 1);
    let mut per_channel = 0.0;
    for c in 0..4 {
        let mut acc = 0.0;
        for y0 in 0..oh {
            for x0 in 0..ow {
                let (mut mx, mut my) = (0.0, 0.0);
                for i in 0..SSIM_WINDOW {
                    for j in 0..SSIM_WINDOW {
                        let wt = g[i] * g[j];
                        mx += wt * a.get(y0 + i, x0 + j, c);
                        my += wt * b.get(y0 + i, x0 + j, c);
                    }
                }
                let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
                for i in 0..SSIM_WINDOW {
                    for j in 0..SSIM_WINDOW {
                        let wt = g[i] * g[j];
                        let dx = a.get(y0 + i, x0 + j, c) - mx;
                        let dy = b.get(y0 + i, x0 + j, c) - my;
                        vx += wt * dx * dx;
                        vy += wt * dy * dy;
                        cov += wt * dx * dy;
                    }
                }
                acc += (2.0 * mx * my + c1) * (2.0 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            }
        }
        per_channel += acc / (oh * ow) as f64;
    }
    per_channel / 4.0
}

#[test]
fn ssim_matches_naive_window_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..8 {
        let (h, w) = (11 + i * 2, 13 + i);
        let a = random_raw(&mut rng, h, w);
        // Correlated partner so SSIM is not near zero.
        let b = PackedRaw::new(
            h,
            w,
            a.as_slice()
                .iter()
                .map(|v| (0.8 * v + 0.2 * rng.random::<f64>()).clamp(0.0, 1.0))
                .collect(),
        )
        .unwrap();
        let fast = ssim(&a, &b).unwrap();
        let slow = naive_ssim(&a, &b);
        assert!((fast - slow).abs() < 1e-6, "{fast} vs {slow}");
    }
}

#[test]
fn ssim_of_self_is_one_and_psnr_offset_is_twenty() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_raw(&mut rng, 16, 16);
    assert_eq!(ssim(&a, &a).unwrap(), 1.0);
    let lo = PackedRaw::new(16, 16, a.as_slice().iter().map(|v| v * 0.8).collect()).unwrap();
    let hi = PackedRaw::new(16, 16, lo.as_slice().iter().map(|v| v + 0.1).collect()).unwrap();
    assert_eq!(format!("{:.2}", psnr(&lo, &hi).unwrap()), "20.00");
}
