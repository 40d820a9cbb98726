use std::io::Write;

use serde::{Deserialize, Serialize};

/// Bin centers `−1.0, −0.9, …, 1.0`.
pub const HISTOGRAM_BINS: usize = 21;

/// Bin of `z`: `[z_n − 0.05, z_n + 0.05)`, with the outer bins closed at ±1.
pub fn bin_index(z: f64) -> usize {
    let x = ((z + 1.0) * 10.0 + 0.5).floor();
    x.clamp(0.0, (HISTOGRAM_BINS - 1) as f64) as usize
}

/// Counts of reconstructed `z` values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnwindHistogram {
    counts: Vec<u64>,
}

impl UnwindHistogram {
    pub fn new() -> Self {
        UnwindHistogram { counts: vec![0; HISTOGRAM_BINS] }
    }

    #[inline]
    pub fn record(&mut self, z: f64) {
        self.counts[bin_index(z)] += 1;
    }

    pub fn merge(&mut self, other: &UnwindHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn center(i: usize) -> f64 {
        // integer tenths keep the centers exact in decimal output
        (i as f64 - 10.0) / 10.0
    }

    pub fn count_at(&self, z_center: f64) -> u64 {
        self.counts[bin_index(z_center)]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["z_center", "count"])?;
        for (i, c) in self.counts.iter().enumerate() {
            w.write_record([format!("{:.1}", Self::center(i)), c.to_string()])?;
        }
        w.flush()
    }

    /// `(z_center, count)` pairs.
    pub fn bins(&self) -> Vec<(f64, u64)> {
        self.counts.iter().enumerate().map(|(i, &c)| (Self::center(i), c)).collect()
    }
}
