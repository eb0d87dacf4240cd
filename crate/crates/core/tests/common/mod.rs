#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use taf_core::{EmbeddingArm, MatrixUnit, TafPresentation};

/// Random valid presentation: `depth` levels, at most `max_summands` per level,
/// level-1 sizes in `1..=max_size`.
pub fn random_presentation<R: Rng>(rng: &mut R, depth: usize, max_summands: usize, max_size: usize) -> TafPresentation {
    let mut levels =
        vec![(0..rng.gen_range(1..=max_summands)).map(|_| rng.gen_range(1..=max_size)).collect::<Vec<_>>()];
    let mut arms = Vec::new();
    for level in 1..depth {
        let sources = levels[level - 1].clone();
        let targets = rng.gen_range(1..=max_summands);
        let mut pairs: Vec<(usize, usize)> = (0..sources.len()).map(|s| (s, rng.gen_range(0..targets))).collect();
        for t in 0..targets {
            if !pairs.iter().any(|&(_, x)| x == t) {
                pairs.push((rng.gen_range(0..sources.len()), t));
            }
        }
        if rng.gen_bool(0.5) {
            pairs.push((rng.gen_range(0..sources.len()), rng.gen_range(0..targets)));
        }
        let mut sizes = vec![0; targets];
        for t in 0..targets {
            let into: Vec<usize> = (0..pairs.len()).filter(|&i| pairs[i].1 == t).collect();
            let mut slots: Vec<usize> =
                into.iter().flat_map(|&i| std::iter::repeat_n(i, sources[pairs[i].0])).collect();
            slots.shuffle(rng);
            sizes[t] = slots.len();
            for &i in &into {
                let injection = slots.iter().enumerate().filter(|(_, &x)| x == i).map(|(pos, _)| pos + 1).collect();
                arms.push(EmbeddingArm { level, source: pairs[i].0, target: t, injection });
            }
        }
        levels.push(sizes);
    }
    TafPresentation::new(levels, arms, None).expect("generated presentation")
}

pub fn random_unit<R: Rng>(rng: &mut R, p: &TafPresentation, level: usize) -> MatrixUnit {
    let s = rng.gen_range(0..p.summand_count(level));
    let n = p.size(level, s);
    let k = rng.gen_range(1..=n);
    let l = rng.gen_range(k..=n);
    MatrixUnit::new(level, s, k, l)
}
