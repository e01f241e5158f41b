//! Strength-mixing measurements over butterfly edges.
//!
//! All dispersion statistics are population statistics (divide by N).

use std::collections::BTreeMap;

use crate::butterfly::count_butterflies;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Partition};
use crate::stream::{fold_snapshots, sample_timeline, segment_bursts, StreamLog, VertexId};

/// Four-region embedding of a strength-difference distribution, split at
/// `mu`, `mu + sigma` and `mu + 2 sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FVector {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
}

impl FVector {
    pub fn as_array(&self) -> [f64; 4] {
        [self.f1, self.f2, self.f3, self.f4]
    }

    /// Strength assortativity localization factor, `f1 - 0.5`.
    pub fn localization_factor(&self) -> f64 {
        localization_factor(self)
    }
}

pub fn localization_factor(f: &FVector) -> f64 {
    f.f1 - 0.5
}

/// Mean, coefficient of variation and excess kurtosis of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentStats {
    pub mean: f64,
    pub cv: f64,
    pub excess_kurtosis: f64,
    pub n: usize,
}

/// Population moments, with the ratios that are undefined for the sample
/// left as `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Describe {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub cv: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

pub fn describe(values: &[f64]) -> Option<Describe> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in values {
        let d2 = (x - mean) * (x - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    let var = m2 / n;
    let std = var.sqrt();
    let constant = values.iter().all(|&x| x == values[0]);
    Some(Describe {
        n: values.len(),
        mean,
        std: if constant { 0.0 } else { std },
        cv: (mean != 0.0).then(|| if constant { 0.0 } else { std / mean }),
        excess_kurtosis: (!constant && var > 0.0).then(|| (m4 / n) / (var * var) - 3.0),
    })
}

pub fn moments(values: &[f64]) -> Result<MomentStats> {
    if values.len() < 2 {
        return Err(Error::Domain(format!(
            "moments need at least 2 samples, got {}",
            values.len()
        )));
    }
    let d = describe(values).expect("nonempty");
    let excess_kurtosis = d
        .excess_kurtosis
        .ok_or(Error::Undefined("excess kurtosis of a zero-variance sample"))?;
    let cv =
        d.cv.ok_or(Error::Undefined("coefficient of variation of a zero-mean sample"))?;
    Ok(MomentStats {
        mean: d.mean,
        cv,
        excess_kurtosis,
        n: d.n,
    })
}

pub fn f_vector(deltas: &[f64]) -> Result<FVector> {
    if deltas.is_empty() {
        return Err(Error::Domain("F vector of an empty sample".into()));
    }
    let d = describe(deltas).expect("nonempty");
    if d.std == 0.0 {
        return Ok(FVector {
            f1: 1.0,
            f2: 0.0,
            f3: 0.0,
            f4: 0.0,
        });
    }
    let (b1, b2, b3) = (d.mean, d.mean + d.std, d.mean + 2.0 * d.std);
    let mut counts = [0usize; 4];
    for &x in deltas {
        let region = if x <= b1 {
            0
        } else if x <= b2 {
            1
        } else if x <= b3 {
            2
        } else {
            3
        };
        counts[region] += 1;
    }
    let n = deltas.len() as f64;
    Ok(FVector {
        f1: counts[0] as f64 / n,
        f2: counts[1] as f64 / n,
        f3: counts[2] as f64 / n,
        f4: counts[3] as f64 / n,
    })
}

fn endpoint_strengths<'a, I>(g: &BipartiteGraph, edges: I) -> Result<Vec<(u64, u64)>>
where
    I: IntoIterator<Item = &'a (VertexId, VertexId)>,
{
    edges
        .into_iter()
        .map(|&(i, j)| {
            if !g.contains_edge(i, j) {
                return Err(Error::MissingEdge { i, j });
            }
            Ok((g.strength(Partition::I, i), g.strength(Partition::J, j)))
        })
        .collect()
}

/// `|S_i - S_j|` for each listed edge, using the graph's strengths.
pub fn strength_deltas<'a, I>(g: &BipartiteGraph, edges: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a (VertexId, VertexId)>,
{
    Ok(endpoint_strengths(g, edges)?
        .into_iter()
        .map(|(si, sj)| si.abs_diff(sj) as f64)
        .collect())
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Domain("paired samples differ in length".into()));
    }
    if xs.len() < 2 {
        return Err(Error::Domain("correlation needs at least 2 pairs".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("correlation with a zero-variance coordinate"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation of endpoint strengths over the listed edges.
pub fn pearson_assortativity<'a, I>(g: &BipartiteGraph, edges: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a (VertexId, VertexId)>,
{
    let pairs = endpoint_strengths(g, edges)?;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
    pearson(&xs, &ys)
}

/// Nearest-neighbor average strength as a function of strength, pooled over
/// both partitions. Isolated vertices are skipped.
pub fn knn_average_strength(g: &BipartiteGraph) -> BTreeMap<u64, f64> {
    let mut classes: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for p in [Partition::I, Partition::J] {
        for v in g.vertices(p) {
            let deg = g.degree(p, v.id);
            if deg == 0 {
                continue;
            }
            let sum: u64 = g.neighbors(p, v.id).map(|n| g.strength(p.other(), n)).sum();
            let e = classes.entry(v.strength).or_default();
            e.0 += sum as f64 / deg as f64;
            e.1 += 1;
        }
    }
    classes.into_iter().map(|(s, (acc, n))| (s, acc / n as f64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub n_bursts: usize,
    /// Records in the snapshot prefix.
    pub edges: usize,
    pub butterflies: u64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSeries {
    pub points: Vec<RatePoint>,
    pub mean: f64,
    pub std: f64,
}

/// Butterflies per record at `k` evenly spaced burst counts.
pub fn butterfly_rate_series(stream: &StreamLog, k: usize) -> Result<RateSeries> {
    let bursts = segment_bursts(stream.records());
    let points = sample_timeline(bursts.len(), k)?;
    let mut out = Vec::with_capacity(k);
    fold_snapshots(stream.records(), &bursts, &points, |n_bursts, prefix, g| {
        let butterflies = count_butterflies(g);
        out.push(RatePoint {
            n_bursts,
            edges: prefix.len(),
            butterflies,
            rate: butterflies as f64 / prefix.len() as f64,
        });
    })?;
    let rates: Vec<f64> = out.iter().map(|p| p.rate).collect();
    let d = describe(&rates).expect("k >= 1");
    Ok(RateSeries {
        points: out,
        mean: d.mean,
        std: d.std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::butterfly::butterfly_edge_set;
    use crate::stream::Sgr;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp1};

    fn weighted(edges: &[(u32, u32, u8)]) -> BipartiteGraph {
        let mut g = BipartiteGraph::new();
        for &(i, j, w) in edges {
            g.apply_add(&Sgr::new(i, j, w, 0));
        }
        g
    }

    fn k22(w00: u8) -> BipartiteGraph {
        weighted(&[(0, 0, w00), (0, 1, 1), (1, 0, 1), (1, 1, 1)])
    }

    #[test]
    fn deltas_on_uniform_k22() {
        let g = k22(1);
        let edges = butterfly_edge_set(&g);
        assert_eq!(strength_deltas(&g, &edges).unwrap(), vec![0.0; 4]);
        assert!(strength_deltas(&g, &[]).unwrap().is_empty());
    }

    #[test]
    fn deltas_with_one_heavy_edge() {
        let g = k22(5);
        assert_eq!(g.strength(Partition::I, 0), 6);
        assert_eq!(g.strength(Partition::J, 1), 2);
        let mut d = strength_deltas(&g, &butterfly_edge_set(&g)).unwrap();
        d.sort_by(f64::total_cmp);
        assert_eq!(d, vec![0.0, 0.0, 4.0, 4.0]);
    }

    #[test]
    fn deltas_reject_foreign_edges() {
        let g = k22(1);
        assert!(matches!(
            strength_deltas(&g, &[(3, 3)]),
            Err(Error::MissingEdge { i: 3, j: 3 })
        ));
    }

    #[test]
    fn f_vector_examples() {
        let f = f_vector(&[2.0; 7]).unwrap();
        assert_eq!(f.as_array(), [1.0, 0.0, 0.0, 0.0]);
        // mu = 2.5, sigma = sqrt(18.75); boundaries 2.5, 6.83, 11.16
        let f = f_vector(&[0.0, 0.0, 0.0, 10.0]).unwrap();
        assert_eq!(f.as_array(), [0.75, 0.0, 0.25, 0.0]);
        assert!(f_vector(&[]).is_err());
        // non-representable mean must still put equal values in F1
        assert_eq!(f_vector(&[0.1; 3]).unwrap().f1, 1.0);
    }

    #[test]
    fn localization_factor_examples() {
        let f = |f1: f64| FVector {
            f1,
            f2: 1.0 - f1,
            f3: 0.0,
            f4: 0.0,
        };
        assert!((localization_factor(&f(0.67)) - 0.17).abs() < 1e-12);
        assert_eq!(localization_factor(&f(0.5)), 0.0);
        assert_eq!(localization_factor(&f(1.0)), 0.5);
    }

    #[test]
    fn moments_of_one_to_five() {
        let m = moments(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(m.mean, 3.0);
        assert!((m.cv - 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!((m.excess_kurtosis - (6.8 / 4.0 - 3.0)).abs() < 1e-12);
        assert_eq!(m.n, 5);
    }

    #[test]
    fn moments_errors() {
        assert!(matches!(moments(&[4.0, 4.0, 4.0]), Err(Error::Undefined(_))));
        assert!(matches!(moments(&[-1.0, 1.0]), Err(Error::Undefined(_))));
        assert!(moments(&[1.0]).is_err());
    }

    #[test]
    fn exponential_sample_moments() {
        // Exp(1): CV = 1, excess kurtosis = 6
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let xs: Vec<f64> = (0..100_000).map(|_| Exp1.sample(&mut rng)).collect();
        let m = moments(&xs).unwrap();
        assert!((m.cv - 1.0).abs() < 0.02, "cv {}", m.cv);
        assert!((m.excess_kurtosis - 6.0).abs() < 0.5, "y2 {}", m.excess_kurtosis);
    }

    #[test]
    fn pearson_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&xs, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((pearson(&xs, &[7.0, 9.0, 11.0, 13.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(pearson(&xs, &[1.0; 4]), Err(Error::Undefined(_))));
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn pearson_on_graph_strengths() {
        // disjoint edges: endpoint strength pairs (5,5), (1,1), (3,3)
        let g = weighted(&[(0, 0, 5), (1, 1, 1), (2, 2, 3)]);
        let edges = [(0, 0), (1, 1), (2, 2)];
        assert!((pearson_assortativity(&g, &edges).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            pearson_assortativity(&k22(1), &butterfly_edge_set(&k22(1))),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn knn_examples() {
        let knn = knn_average_strength(&k22(1));
        assert_eq!(knn.into_iter().collect::<Vec<_>>(), vec![(2, 2.0)]);

        // one strong center, three weak leaves
        let star = weighted(&[(0, 0, 5), (1, 0, 5), (2, 0, 5)]);
        let knn = knn_average_strength(&star);
        assert_eq!(knn.get(&5), Some(&15.0));
        assert_eq!(knn.get(&15), Some(&5.0));

        assert!(knn_average_strength(&BipartiteGraph::new()).is_empty());
    }

    #[test]
    fn butterfly_free_stream_has_zero_rates() {
        let s: StreamLog = (0..10).map(|t| Sgr::new(t, t, 1, t as u64)).collect();
        let series = butterfly_rate_series(&s, 5).unwrap();
        assert_eq!(series.points.len(), 5);
        assert!(series.points.iter().all(|p| p.rate == 0.0));
        assert_eq!(series.mean, 0.0);
    }

    proptest! {
        #[test]
        fn f_vector_sums_to_one(xs in proptest::collection::vec(0.0f64..1e4, 1..200)) {
            let f = f_vector(&xs).unwrap();
            prop_assert!((f.as_array().iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(f.as_array().iter().all(|&x| x >= 0.0));
            let rs = f.localization_factor();
            prop_assert!((-0.5..=0.5).contains(&rs));
        }

        #[test]
        fn f_vector_scale_invariant(xs in proptest::collection::vec(0u32..1000, 1..200), c in 1u32..64) {
            let a: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
            let b: Vec<f64> = xs.iter().map(|&x| (x * c) as f64).collect();
            prop_assert_eq!(f_vector(&a).unwrap(), f_vector(&b).unwrap());
        }

        #[test]
        fn moments_scale(xs in proptest::collection::vec(1.0f64..100.0, 2..100), c in 0.1f64..50.0) {
            prop_assume!(describe(&xs).unwrap().std > 1e-6);
            let ys: Vec<f64> = xs.iter().map(|x| x * c).collect();
            let (a, b) = (moments(&xs).unwrap(), moments(&ys).unwrap());
            prop_assert!((b.mean - a.mean * c).abs() <= 1e-9 * b.mean.abs().max(1.0));
            prop_assert!((a.cv - b.cv).abs() < 1e-9);
            prop_assert!((a.excess_kurtosis - b.excess_kurtosis).abs() < 1e-6);
        }

        #[test]
        fn pearson_affine_invariant(
            pairs in proptest::collection::vec((0.0f64..100.0, 0.0f64..100.0), 3..60),
            a in 0.1f64..10.0, b in -50.0f64..50.0, c in 0.1f64..10.0, d in -50.0f64..50.0,
        ) {
            let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            prop_assume!(describe(&xs).unwrap().std > 1e-3 && describe(&ys).unwrap().std > 1e-3);
            let r = pearson(&xs, &ys).unwrap();
            let xs2: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let ys2: Vec<f64> = ys.iter().map(|y| c * y + d).collect();
            prop_assert!((r - pearson(&xs2, &ys2).unwrap()).abs() < 1e-9);
        }
    }
}
