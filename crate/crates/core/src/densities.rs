//! The four lower-density functionals over integer index sets and sector
//! regions. All of them report a liminf proxy through the shared tail-window
//! rule, with +∞ as an explicit sentinel for divergent trajectories.

use crate::error::{Error, Result};
use crate::geometry::{measure_intersect, Region};
use crate::growth::GrowthMap;
use crate::proxy::{liminf_proxy, TrendVerdict};
use serde::{Deserialize, Serialize};

/// Ratio floor under which a trajectory is treated as tending to zero.
pub const POSITIVE_THRESHOLD: f64 = 1e-6;

/// A finite prefix of a subset of ℕ, with the horizon it was enumerated to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    indices: Vec<u64>,
    horizon: u64,
}

impl IndexSet {
    /// `indices` must be sorted, distinct, positive, and ≤ `horizon`.
    pub fn new(indices: Vec<u64>, horizon: u64) -> Result<Self> {
        if indices.first().is_some_and(|&f| f == 0) {
            return Err(Error::Argument("index sets contain positive integers only".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("indices must be sorted and distinct".into()));
        }
        if indices.last().is_some_and(|&l| l > horizon) {
            return Err(Error::Argument(format!(
                "largest index exceeds the horizon {horizon}"
            )));
        }
        Ok(IndexSet { indices, horizon })
    }

    pub fn naturals(horizon: u64) -> Self {
        IndexSet { indices: (1..=horizon).collect(), horizon }
    }

    /// Enumerate `f(1), f(2), …` while the values stay within the horizon.
    pub fn from_fn(f: impl Fn(u64) -> u64, horizon: u64) -> Result<Self> {
        let mut indices = Vec::new();
        let mut k = 1;
        loop {
            let v = f(k);
            if v > horizon {
                break;
            }
            indices.push(v);
            k += 1;
        }
        IndexSet::new(indices, horizon)
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// `|A ∩ [1, bound]|`.
    pub fn count_leq(&self, bound: f64) -> usize {
        self.indices.partition_point(|&x| (x as f64) <= bound)
    }
}

/// A sampled lower-density trajectory with its liminf proxy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityEstimate {
    /// Tail-window minimum; `f64::INFINITY` for divergent trajectories. Use
    /// [`DensityEstimate::finite_value`] before arithmetic.
    #[serde(with = "sentinel")]
    pub value: f64,
    pub verdict: TrendVerdict,
    /// (abscissa, ratio) samples.
    pub trajectory: Vec<(f64, f64)>,
    pub horizon: f64,
}

/// Serialize non-finite proxies as strings so the sentinel survives JSON.
mod sentinel {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else {
            s.serialize_str("inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Tag(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Num(v) => v,
            Raw::Tag(t) if t == "inf" => f64::INFINITY,
            Raw::Tag(_) => f64::NAN,
        })
    }
}

impl DensityEstimate {
    fn from_trajectory(trajectory: Vec<(f64, f64)>, horizon: f64) -> Self {
        let ratios: Vec<f64> = trajectory.iter().map(|&(_, r)| r).collect();
        let proxy = liminf_proxy(&ratios, POSITIVE_THRESHOLD);
        DensityEstimate { value: proxy.value, verdict: proxy.verdict, trajectory, horizon }
    }

    pub fn finite_value(&self) -> Option<f64> {
        if self.value.is_finite() { Some(self.value) } else { None }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("abscissa,ratio\n");
        for (a, r) in &self.trajectory {
            out.push_str(&format!("{a},{r}\n"));
        }
        out
    }
}

/// Shared window counter: ratio `|A ∩ [1, m_n]| / n` for `n ≤ n_max`.
fn window_density(a: &IndexSet, m: &[f64], n_max: usize) -> Result<DensityEstimate> {
    if n_max < 8 {
        return Err(Error::Argument("need n_max ≥ 8 for the liminf proxy".into()));
    }
    if m.len() < n_max {
        return Err(Error::Argument(format!(
            "window sequence has {} entries but n_max is {n_max}",
            m.len()
        )));
    }
    let top = m[..n_max].iter().copied().fold(0.0f64, f64::max);
    if (a.horizon() as f64) < top {
        return Err(Error::Horizon(format!(
            "window reaches {top} but the index set is only enumerated to {}; counts would be censored",
            a.horizon()
        )));
    }
    let trajectory = (1..=n_max)
        .map(|n| (n as f64, a.count_leq(m[n - 1]) as f64 / n as f64))
        .collect();
    Ok(DensityEstimate::from_trajectory(trajectory, n_max as f64))
}

/// Lower q-density: counting windows `[1, n^q]`.
pub fn lower_q_density(a: &IndexSet, q: f64, n_max: usize) -> Result<DensityEstimate> {
    if q < 1.0 {
        return Err(Error::Argument(format!("exponent q must be ≥ 1, got {q}")));
    }
    let m: Vec<f64> = (1..=n_max).map(|n| (n as f64).powf(q)).collect();
    window_density(a, &m, n_max)
}

/// Lower (m_n)-density: counting windows `[1, m_n]` for a caller-supplied
/// window sequence (usually `GrowthMap::m_seq`).
pub fn lower_mn_density(a: &IndexSet, m: &[f64], n_max: usize) -> Result<DensityEstimate> {
    window_density(a, m, n_max)
}

fn region_density(
    a: &Region,
    radius_at: impl Fn(f64) -> f64,
    needed: f64,
    t_max: f64,
    t_step: f64,
) -> Result<DensityEstimate> {
    if t_max <= 0.0 || t_step <= 0.0 {
        return Err(Error::Argument("t_max and t_step must be positive".into()));
    }
    let points = (t_max / t_step).floor() as usize;
    if points < 8 {
        return Err(Error::Argument("need ≥ 8 trajectory points for the liminf proxy".into()));
    }
    if !a.is_empty() && a.extent + 1e-9 < needed {
        return Err(Error::Truncation { needed, have: a.extent });
    }
    let trajectory = (1..=points)
        .map(|i| {
            let t = i as f64 * t_step;
            (t, measure_intersect(a, radius_at(t)) / t)
        })
        .collect();
    Ok(DensityEstimate::from_trajectory(trajectory, t_max))
}

/// Lower f-density of a region: `m(A ∩ Δ_{f(t)}) / t` on a uniform t grid.
///
/// For 2-D sectors the measure grows like area and the ratio can diverge; the
/// +∞ sentinel reports that rather than renormalizing.
pub fn lower_f_density(
    a: &Region,
    f: &GrowthMap,
    t_max: f64,
    t_step: f64,
) -> Result<DensityEstimate> {
    region_density(a, |t| f.eval(t), f.eval(t_max), t_max, t_step)
}

/// Lower density with windows `Δ_{t^q}` exactly (no +1 shift).
pub fn lower_qc_density(a: &Region, q: f64, t_max: f64, t_step: f64) -> Result<DensityEstimate> {
    if q < 1.0 {
        return Err(Error::Argument(format!("exponent q must be ≥ 1, got {q}")));
    }
    region_density(a, |t| t.powf(q), t_max.powf(q), t_max, t_step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::truncate;
    use crate::geometry::Sector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn index_set_rejects_bad_input() {
        assert!(IndexSet::new(vec![0, 1], 5).is_err());
        assert!(IndexSet::new(vec![3, 2], 5).is_err());
        assert!(IndexSet::new(vec![2, 2], 5).is_err());
        assert!(IndexSet::new(vec![2, 9], 5).is_err());
        assert!(IndexSet::new(vec![], 5).is_ok());
    }

    #[test]
    fn naturals_have_density_one() {
        let a = IndexSet::naturals(100);
        let est = lower_q_density(&a, 1.0, 100).unwrap();
        assert_eq!(est.verdict, TrendVerdict::Positive);
        assert_eq!(est.value, 1.0);
        assert!(est.trajectory.iter().all(|&(_, r)| r == 1.0));
    }

    #[test]
    fn squares_have_q2_density_one() {
        // |{k²} ∩ [1, n²]| = n exactly, so every ratio is exactly 1.
        let a = IndexSet::from_fn(|k| k * k, 10_000).unwrap();
        let est = lower_q_density(&a, 2.0, 100).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.verdict, TrendVerdict::Positive);
    }

    #[test]
    fn evens_have_density_half() {
        let a = IndexSet::from_fn(|k| 2 * k, 10_000).unwrap();
        let est = lower_q_density(&a, 1.0, 10_000).unwrap();
        assert!((est.value - 0.5).abs() < 1e-3, "value {}", est.value);
        assert_eq!(est.verdict, TrendVerdict::Positive);
    }

    #[test]
    fn q1_matches_identity_windows_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let indices: Vec<u64> = (1..=2000).filter(|_| rng.gen::<f64>() < 0.4).collect();
        let a = IndexSet::new(indices, 2000).unwrap();
        let via_q = lower_q_density(&a, 1.0, 2000).unwrap();
        let m: Vec<f64> = (1..=2000).map(|n| n as f64).collect();
        let via_m = lower_mn_density(&a, &m, 2000).unwrap();
        assert_eq!(via_q.trajectory, via_m.trajectory);
        assert_eq!(via_q.value.to_bits(), via_m.value.to_bits());
    }

    #[test]
    fn square_windows_on_squares_give_one() {
        let a = IndexSet::from_fn(|k| k * k, 10_000).unwrap();
        let m: Vec<f64> = (1..=100).map(|n| (n * n) as f64).collect();
        let est = lower_mn_density(&a, &m, 100).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn exponential_windows_diverge_with_sentinel() {
        let a = IndexSet::naturals(1 << 16);
        let m: Vec<f64> = (1..=16).map(|n| (1u64 << n) as f64).collect();
        let est = lower_mn_density(&a, &m, 16).unwrap();
        assert_eq!(est.verdict, TrendVerdict::Divergent);
        assert!(est.value.is_infinite());
        assert!(est.finite_value().is_none());
    }

    #[test]
    fn window_larger_than_horizon_is_rejected() {
        let a = IndexSet::naturals(50);
        let err = lower_q_density(&a, 2.0, 10).unwrap_err();
        assert!(matches!(err, Error::Horizon(_)), "got {err:?}");
    }

    #[test]
    fn subsets_never_have_larger_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let b_idx: Vec<u64> = (1..=1500).filter(|_| rng.gen::<f64>() < 0.5).collect();
            let a_idx: Vec<u64> = b_idx.iter().copied().filter(|_| rng.gen::<f64>() < 0.6).collect();
            let b = IndexSet::new(b_idx, 1500).unwrap();
            let a = IndexSet::new(a_idx, 1500).unwrap();
            let eb = lower_q_density(&b, 1.0, 1500).unwrap();
            let ea = lower_q_density(&a, 1.0, 1500).unwrap();
            for (pa, pb) in ea.trajectory.iter().zip(&eb.trajectory) {
                assert!(pa.1 <= pb.1 + 1e-15);
            }
            assert!(ea.value <= eb.value + 1e-15);
        }
    }

    #[test]
    fn full_half_line_affine_density_is_one() {
        let region = truncate(Sector::half_line(), 201.0, 0.1).unwrap();
        let f = GrowthMap::Affine;
        let est = lower_f_density(&region, &f, 200.0, 1.0).unwrap();
        assert_eq!(est.verdict, TrendVerdict::Positive);
        assert!((est.value - 1.0).abs() < 0.02, "value {}", est.value);
    }

    #[test]
    fn empty_region_has_density_zero() {
        let region = Region::from_intervals_1d(&[], 0.1, 1e6).unwrap();
        let f = GrowthMap::Affine;
        let est = lower_f_density(&region, &f, 100.0, 1.0).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.verdict, TrendVerdict::ZeroTrend);
    }

    fn spaced_intervals(shift: f64, extent: f64) -> Region {
        let mut iv = Vec::new();
        let mut k = 1.0f64;
        while k * k + shift + 1.0 <= extent {
            iv.push((k * k + shift, k * k + shift + 1.0));
            k += 1.0;
        }
        Region::from_intervals_1d(&iv, 0.05, extent).unwrap()
    }

    #[test]
    fn unit_intervals_after_squares_have_f_density_one() {
        // ⋃ [k²+1, k²+2] against windows of radius t²+1: about t unit
        // intervals fit, so the ratio tends to 1.
        let region = spaced_intervals(1.0, 40_001.0);
        let f = GrowthMap::polynomial(2.0).unwrap();
        let est = lower_f_density(&region, &f, 200.0, 2.0).unwrap();
        assert_eq!(est.verdict, TrendVerdict::Positive);
        assert!((est.value - 1.0).abs() < 0.05, "value {}", est.value);
    }

    #[test]
    fn qc_full_half_line_q1_is_one_q2_diverges() {
        let region = truncate(Sector::half_line(), 100.0, 0.5).unwrap();
        let one = lower_qc_density(&region, 1.0, 100.0, 1.0).unwrap();
        assert_eq!(one.verdict, TrendVerdict::Positive);
        assert!((one.value - 1.0).abs() < 0.02);

        let region = truncate(Sector::half_line(), 10_000.0, 0.5).unwrap();
        let two = lower_qc_density(&region, 2.0, 100.0, 1.0).unwrap();
        assert_eq!(two.verdict, TrendVerdict::Divergent);
        assert!(two.value.is_infinite());
    }

    #[test]
    fn qc_unit_intervals_after_squares_give_one() {
        let region = spaced_intervals(0.0, 10_000.0);
        let est = lower_qc_density(&region, 2.0, 100.0, 1.0).unwrap();
        assert_eq!(est.verdict, TrendVerdict::Positive);
        assert!((est.value - 1.0).abs() < 0.05, "value {}", est.value);
    }

    #[test]
    fn f_and_qc_windows_differ_by_at_most_the_shift() {
        // f(t) = t^q + 1 vs t^q: the trajectories differ by at most the
        // measure caught in the shift band, ≤ (1 + 2·resolution)/t.
        let region = spaced_intervals(1.0, 40_001.0);
        let f = GrowthMap::polynomial(2.0).unwrap();
        let ef = lower_f_density(&region, &f, 180.0, 2.0).unwrap();
        let eq = lower_qc_density(&region, 2.0, 180.0, 2.0).unwrap();
        for (a, b) in ef.trajectory.iter().zip(&eq.trajectory) {
            assert_eq!(a.0, b.0);
            let bound = (1.0 + 2.0 * 0.05) / a.0;
            assert!((a.1 - b.1).abs() <= bound + 1e-12, "t={} diff={}", a.0, (a.1 - b.1).abs());
        }
    }

    #[test]
    fn truncation_smaller_than_last_window_is_rejected() {
        let region = truncate(Sector::half_line(), 50.0, 0.5).unwrap();
        let err = lower_qc_density(&region, 2.0, 100.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }), "got {err:?}");
    }

    #[test]
    fn estimate_exports_csv_and_json() {
        let a = IndexSet::naturals(64);
        let m: Vec<f64> = (1..=16).map(|n| (1u64 << n).min(64) as f64).collect();
        let est = lower_mn_density(&a, &m, 16).unwrap();
        let csv = est.to_csv();
        assert!(csv.starts_with("abscissa,ratio\n"));
        assert_eq!(csv.lines().count(), 17);

        let divergent = lower_mn_density(
            &IndexSet::naturals(1 << 16),
            &(1..=16).map(|n| (1u64 << n) as f64).collect::<Vec<_>>(),
            16,
        )
        .unwrap();
        let js = serde_json::to_string(&divergent).unwrap();
        assert!(js.contains("\"divergent\""));
        assert!(js.contains("\"inf\""));
        let back: DensityEstimate = serde_json::from_str(&js).unwrap();
        assert!(back.value.is_infinite());
    }
}
