use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::isp::srgb_decode;
use crate::raw::{PackedRaw, RgbImage, RGGB_COLOR, RGGB_SITES};

/// Aligned training patch: an `s × s` packed RAW crop and the `2s × 2s`
/// sRGB crop covering the same sensor area.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchPair {
    pub rgb: RgbImage,
    pub raw: PackedRaw,
    /// Brightness bin assigned by [`stratified_sample`].
    pub stratum: usize,
}

impl PatchPair {
    pub fn new(rgb: RgbImage, raw: PackedRaw) -> Result<Self> {
        rgb.check_paired(&raw)?;
        Ok(PatchPair {
            rgb,
            raw,
            stratum: 0,
        })
    }

    /// Mean packed-RAW value, the stratification variable.
    pub fn luminance(&self) -> f64 {
        self.raw.mean()
    }
}

/// One RAW sample paired with the decoded RGB pixel at the same sensor site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x_lin: [f64; 3],
    /// Output colour: 0 = R, 1 = G, 2 = B.
    pub color: u8,
    pub y: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleSet {
    samples: Vec<Sample>,
}

impl SampleSet {
    pub fn from_pairs(pairs: &[PatchPair]) -> Result<Self> {
        let mut samples = Vec::new();
        for p in pairs {
            p.rgb.check_paired(&p.raw)?;
            for i in 0..p.raw.height() {
                for j in 0..p.raw.width() {
                    for (ch, (dy, dx)) in RGGB_SITES.into_iter().enumerate() {
                        samples.push(Sample {
                            x_lin: p.rgb.pixel(2 * i + dy, 2 * j + dx).map(srgb_decode),
                            color: RGGB_COLOR[ch] as u8,
                            y: p.raw.get(i, j, ch),
                        });
                    }
                }
            }
        }
        Ok(SampleSet { samples })
    }

    pub fn from_samples(samples: Vec<Sample>) -> Self {
        SampleSet { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter()
    }

    pub fn as_slice(&self) -> &[Sample] {
        &self.samples
    }
}

fn bin_of(luma: f64, bins: usize) -> usize {
    ((luma.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1)
}

/// Per-bin selection counts.
///
/// Every bin is asked for `⌊n/bins⌋`, the first `n mod bins` bins for one
/// more. A bin that cannot meet its share gives everything it has, and the
/// shortfall is handed out one at a time, round-robin, over the bins with
/// spare candidates ordered by candidate count (ties by bin index).
fn bin_quotas(available: &[usize], n: usize) -> Vec<usize> {
    let bins = available.len();
    let mut take: Vec<usize> = (0..bins)
        .map(|b| (n / bins + usize::from(b < n % bins)).min(available[b]))
        .collect();
    let mut deficit = n - take.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..bins).collect();
    order.sort_by(|&a, &b| available[b].cmp(&available[a]).then(a.cmp(&b)));
    while deficit > 0 {
        let mut progressed = false;
        for &b in &order {
            if deficit == 0 {
                break;
            }
            if take[b] < available[b] {
                take[b] += 1;
                deficit -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    take
}

/// Indices chosen by [`stratified_sample`], grouped by bin.
pub fn stratified_indices(lumas: &[f64], n: usize, bins: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if lumas.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if bins == 0 || n < bins {
        return Err(Error::InvalidArgument(format!(
            "stratified sampling needs n >= bins >= 1, got n={n} bins={bins}"
        )));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); bins];
    for (i, &l) in lumas.iter().enumerate() {
        members[bin_of(l, bins)].push(i);
    }
    let available: Vec<usize> = members.iter().map(Vec::len).collect();
    let quotas = bin_quotas(&available, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for (b, (idx, q)) in members.iter().zip(quotas).enumerate() {
        if q == 0 {
            continue;
        }
        for pick in index::sample(&mut rng, idx.len(), q) {
            out.push((b, idx[pick]));
        }
    }
    Ok(out)
}

/// Draws up to `n` patches spread evenly over `bins` equal-width brightness
/// bins of `[0, 1]`, using mean packed-RAW value as brightness.
pub fn stratified_sample(pairs: &[PatchPair], n: usize, bins: usize, seed: u64) -> Result<Vec<PatchPair>> {
    let lumas: Vec<f64> = pairs.iter().map(PatchPair::luminance).collect();
    Ok(stratified_indices(&lumas, n, bins, seed)?
        .into_iter()
        .map(|(b, i)| PatchPair {
            stratum: b,
            ..pairs[i].clone()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(level: f64) -> PatchPair {
        PatchPair::new(
            RgbImage::filled(2, 2, [level; 3]).unwrap(),
            PackedRaw::new(1, 1, vec![level; 4]).unwrap(),
        )
        .unwrap()
    }

    fn counts(sel: &[PatchPair], bins: usize) -> Vec<usize> {
        let mut c = vec![0; bins];
        for p in sel {
            c[p.stratum] += 1;
        }
        c
    }

    #[test]
    fn uniform_pool_splits_evenly() {
        let pool: Vec<PatchPair> = (0..400).map(|i| pair((i as f64 + 0.5) / 400.0)).collect();
        let sel = stratified_sample(&pool, 100, 4, 7).unwrap();
        assert_eq!(counts(&sel, 4), vec![25, 25, 25, 25]);
        for p in &sel {
            assert_eq!(bin_of(p.luminance(), 4), p.stratum);
        }
    }

    #[test]
    fn empty_top_bin_redistributes_round_robin() {
        // Bin candidate counts 60 / 50 / 40 / 0.
        let mut pool = Vec::new();
        for (bin, count) in [(0, 60), (1, 50), (2, 40)] {
            for i in 0..count {
                pool.push(pair(0.25 * bin as f64 + 0.2 * (i as f64 + 0.5) / count as f64));
            }
        }
        let sel = stratified_sample(&pool, 100, 4, 3).unwrap();
        // Base 25 each; the 25 missing from the top bin go out round-robin
        // over bins 0,1,2 (fullest first): 9, 8, 8.
        assert_eq!(counts(&sel, 4), vec![34, 33, 33, 0]);
    }

    #[test]
    fn quota_simulation() {
        assert_eq!(bin_quotas(&[100, 100, 100, 100], 10), vec![3, 3, 2, 2]);
        assert_eq!(bin_quotas(&[1, 0, 100, 5], 12), vec![1, 0, 6, 5]);
        assert_eq!(bin_quotas(&[2, 2], 10), vec![2, 2]);
    }

    #[test]
    fn deterministic_per_seed() {
        let pool: Vec<PatchPair> = (0..300).map(|i| pair((i % 97) as f64 / 97.0)).collect();
        let a = stratified_sample(&pool, 50, 5, 42).unwrap();
        let b = stratified_sample(&pool, 50, 5, 42).unwrap();
        assert_eq!(a, b);
        let c = stratified_sample(&pool, 50, 5, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(stratified_sample(&[], 10, 2, 0), Err(Error::EmptyDataset)));
        let pool = vec![pair(0.5)];
        assert!(stratified_sample(&pool, 1, 2, 0).is_err());
        assert!(stratified_sample(&pool, 1, 0, 0).is_err());
    }

    #[test]
    fn sample_set_pairs_co_sited_pixels() {
        let mut rgb = vec![0.0; 4 * 4 * 3];
        // mark the G2 site (1, 0) of packed pixel (0, 0)
        rgb[(1 * 4) * 3..(1 * 4) * 3 + 3].copy_from_slice(&[1.0, 0.5, 0.0]);
        let p = PatchPair::new(
            RgbImage::new(4, 4, rgb).unwrap(),
            PackedRaw::new(2, 2, (0..16).map(|v| v as f64 / 16.0).collect()).unwrap(),
        )
        .unwrap();
        let set = SampleSet::from_pairs(&[p]).unwrap();
        assert_eq!(set.len(), 16);
        let g2 = set.as_slice()[2];
        assert_eq!(g2.color, 1);
        assert_eq!(g2.y, 2.0 / 16.0);
        assert_eq!(g2.x_lin, [1.0, srgb_decode(0.5), 0.0]);
    }
}
