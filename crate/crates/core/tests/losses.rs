use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revisp::losses::{
    clipped_l1_loss, color_loss, combined_loss, hard_log_loss, l1, log_l2_loss, matrix_loss, mse, LossInputs,
    LossWeights, TdmfPaths, Team,
};
use revisp::metrics::{ssim_view, ImageView};
use revisp::raw::{dihedral_packed, quantize12};
use revisp::{ColorTransform, DihedralIndex, PackedRaw};

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..1.0)).collect()
}

fn random_ccm(rng: &mut ChaCha8Rng) -> ColorTransform {
    let mut m = [[0.0; 3]; 3];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = if r == c { rng.random_range(0.8..1.5) } else { rng.random_range(-0.3..0.3) };
        }
    }
    ColorTransform::new(m).unwrap()
}

#[test]
fn hard_log_at_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let x = random_vec(&mut rng, 64);
    let v = hard_log_loss(&x, &x).unwrap();
    assert!((v - -(1.0f64 + 1e-6).ln()).abs() < 1e-12, "{v}");
}

#[test]
fn published_constants() {
    let w = LossWeights::PUBLISHED;
    assert_eq!((w.w_ssim, w.w_hardlog), (0.05, 0.1));
    assert_eq!((w.lambda_l1, w.lambda_color, w.lambda_m), (1.0, 0.001, 0.1));
    assert_eq!((w.lambda1, w.lambda2), (1.0, 1.0));
    assert_eq!((w.tau1, w.tau2), (0.2, 0.5));
    assert_eq!(LossWeights::default(), w);
}

#[test]
fn combined_losses_equal_weighted_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let w = LossWeights::PUBLISHED;
    let (h, wd) = (14, 12);
    for _ in 0..10 {
        let p = random_vec(&mut rng, h * wd * 4);
        let t = random_vec(&mut rng, h * wd * 4);
        let pv = ImageView::new(h, wd, 4, &p).unwrap();
        let tv = ImageView::new(h, wd, 4, &t).unwrap();
        let (m_pred, m_true) = (random_ccm(&mut rng), random_ccm(&mut rng));
        let direct = random_vec(&mut rng, p.len());
        let gamma_input = random_vec(&mut rng, p.len());
        let inverse_gamma = random_vec(&mut rng, p.len());
        let inputs = LossInputs {
            pred: pv,
            target: tv,
            matrices: Some((&m_pred, &m_true)),
            paths: Some(TdmfPaths {
                direct: &direct,
                gamma_input: &gamma_input,
                inverse_gamma: &inverse_gamma,
                gamma: 2.2,
            }),
        };

        let ulite = l1(&p, &t).unwrap() + 0.001 * color_loss(&p, &t).unwrap() + 0.1 * matrix_loss(&m_pred, &m_true);
        let unaf = mse(&p, &t).unwrap() + 0.05 * (1.0 - ssim_view(pv, tv).unwrap()) + 0.1 * hard_log_loss(&p, &t).unwrap();
        let gar = l1(&p, &t).unwrap() + mse(&p, &t).unwrap();
        let dual = log_l2_loss(&p, &t).unwrap() + clipped_l1_loss(&p, &t).unwrap();
        let inv_t: Vec<f64> = t.iter().map(|y| y.powf(1.0 / 2.2)).collect();
        let tdmf = l1(&direct, &t).unwrap()
            + l1(&gamma_input, &t).unwrap()
            + l1(&inverse_gamma, &inv_t).unwrap()
            + l1(&p, &t).unwrap();

        for (team, expected) in [
            (Team::ULite, ulite),
            (Team::Unafnet, unaf),
            (Team::Gar2net, gar),
            (Team::DualRaw, dual),
            (Team::Tdmf, tdmf),
        ] {
            let got = combined_loss(team, &inputs, &w).unwrap();
            assert!((got - expected).abs() < 1e-12, "{team}: {got} vs {expected}");
        }
    }
}

#[test]
fn pointwise_losses_are_dihedral_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (h, w) = (13, 16);
    let p = quantize12(&PackedRaw::new(h, w, random_vec(&mut rng, h * w * 4)).unwrap());
    let t = quantize12(&PackedRaw::new(h, w, random_vec(&mut rng, h * w * 4)).unwrap());
    let base = [
        l1(p.as_slice(), t.as_slice()).unwrap(),
        mse(p.as_slice(), t.as_slice()).unwrap(),
        color_loss(p.as_slice(), t.as_slice()).unwrap(),
        hard_log_loss(p.as_slice(), t.as_slice()).unwrap(),
        log_l2_loss(p.as_slice(), t.as_slice()).unwrap(),
    ];
    let s0 = revisp::metrics::ssim(&p, &t).unwrap();
    for tr in DihedralIndex::all() {
        let (pt, tt) = (dihedral_packed(&p, tr), dihedral_packed(&t, tr));
        let got = [
            l1(pt.as_slice(), tt.as_slice()).unwrap(),
            mse(pt.as_slice(), tt.as_slice()).unwrap(),
            color_loss(pt.as_slice(), tt.as_slice()).unwrap(),
            hard_log_loss(pt.as_slice(), tt.as_slice()).unwrap(),
            log_l2_loss(pt.as_slice(), tt.as_slice()).unwrap(),
        ];
        assert_eq!(got, base, "transform {}", tr.index());
        let s = revisp::metrics::ssim(&pt, &tt).unwrap();
        assert!((s - s0).abs() <= 1e-6, "ssim {s} vs {s0}");
    }
}
