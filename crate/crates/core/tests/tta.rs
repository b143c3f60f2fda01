use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revisp::model::AffineMap;
use revisp::raw::{dihedral_packed, dihedral_rgb, quantize12_sample};
use revisp::tta::{predict_tta, transformed_cfa, TtaMode};
use revisp::{DihedralIndex, PackedRaw, Predictor, ReverseModel, RgbImage};

fn model() -> ReverseModel {
    ReverseModel::new(
        vec![1.0, 2.2, 2.4],
        vec![
            AffineMap {
                a: [[0.8, 0.1, 0.0], [0.05, 0.85, 0.05], [0.0, 0.1, 0.75]],
                b: [0.01, 0.0, 0.02],
            },
            AffineMap {
                a: [[0.9, -0.05, 0.05], [0.0, 0.8, 0.1], [0.1, 0.0, 0.85]],
                b: [0.0, 0.02, 0.01],
            },
            AffineMap {
                a: [[1.1, 0.0, -0.1], [0.0, 1.0, 0.0], [-0.1, 0.05, 1.05]],
                b: [0.0, 0.0, 0.0],
            },
        ],
        vec![0.5, 0.3, 0.2],
    )
    .unwrap()
}

fn random_rgb(rng: &mut ChaCha8Rng, h: usize, w: usize) -> RgbImage {
    RgbImage::new(h, w, (0..h * w * 3).map(|_| rng.random()).collect()).unwrap()
}

/// The 8-way composition written out step by step: predict each transformed
/// image in its transformed layout, undo the transform, average, quantize.
fn scripted_dihedral8(m: &ReverseModel, img: &RgbImage) -> PackedRaw {
    let (ph, pw) = (img.height() / 2, img.width() / 2);
    let mut sum = vec![0.0; ph * pw * 4];
    for t in DihedralIndex::all() {
        let timg = dihedral_rgb(img, t);
        let lin = m.predict_linear_cfa(&timg, transformed_cfa(t)).unwrap();
        let packed = PackedRaw::new(timg.height() / 2, timg.width() / 2, lin).unwrap();
        let back = dihedral_packed(&packed, t.inverse());
        for (s, v) in sum.iter_mut().zip(back.as_slice()) {
            *s += v;
        }
    }
    PackedRaw::new(ph, pw, sum.iter().map(|s| quantize12_sample(s / 8.0)).collect()).unwrap()
}

#[test]
fn none_is_bit_identical_to_predict() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = model();
    for _ in 0..5 {
        let img = random_rgb(&mut rng, 18, 26);
        assert_eq!(predict_tta(&m, &img, TtaMode::None).unwrap(), m.predict(&img).unwrap());
    }
}

#[test]
fn dihedral8_matches_scripted_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let m = model();
    for _ in 0..5 {
        let img = random_rgb(&mut rng, 20, 14);
        let got = predict_tta(&m, &img, TtaMode::Dihedral8).unwrap();
        let want = scripted_dihedral8(&m, &img);
        let worst = got
            .to_codes()
            .iter()
            .zip(want.to_codes())
            .map(|(a, b)| a.abs_diff(b))
            .max()
            .unwrap();
        assert!(worst <= 1, "{worst} codes apart");
    }
}

#[test]
fn pointwise_model_tta_stays_close_to_plain_predict() {
    // The model acts per pixel, so every transform predicts the same values
    // and averaging only perturbs the last bit.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = model();
    let img = random_rgb(&mut rng, 16, 16);
    let plain = m.predict(&img).unwrap().to_codes();
    for mode in [TtaMode::Flip2, TtaMode::Dihedral8] {
        let tta = predict_tta(&m, &img, mode).unwrap().to_codes();
        assert!(plain.iter().zip(&tta).all(|(a, b)| a.abs_diff(*b) <= 1), "{mode}");
    }
}
