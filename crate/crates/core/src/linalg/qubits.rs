//! Multi-qubit state vectors and partial traces.
//!
//! Basis convention: qubit 0 is the most significant bit of a basis index.
//! For `n` qubits, qubit `q` lives at bit position `n - 1 - q`.

use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

#[inline]
pub(crate) fn qubit_mask(num_qubits: usize, q: usize) -> usize {
    1 << (num_qubits - 1 - q)
}

fn check_indices(indices: &[usize], num_qubits: usize) -> Result<()> {
    for (pos, &q) in indices.iter().enumerate() {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if indices[..pos].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// Pure state of `n` qubits as `2^n` amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiQubitVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl MultiQubitVector {
    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if num_qubits == 0 || amplitudes.len() != 1usize << num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                num_qubits
            )));
        }
        Ok(MultiQubitVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Tensor product of single-qubit kets, qubit 0 first.
    pub fn product(kets: &[[Complex64; 2]]) -> Result<Self> {
        if kets.is_empty() {
            return Err(Error::InvalidArgument("no qubits".into()));
        }
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for ket in kets {
            let mut next = Vec::with_capacity(amps.len() * 2);
            for &a in &amps {
                next.push(a * ket[0]);
                next.push(a * ket[1]);
            }
            amps = next;
        }
        Self::from_amplitudes(kets.len(), amps)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a 4×4 gate to qubits `(qa, qb)`; the gate's basis is `|qa qb>`.
    ///
    /// Amplitudes are updated in place over the paired indices.
    pub fn apply_two_qubit(&mut self, gate: &CMatrix, qa: usize, qb: usize) -> Result<()> {
        if gate.rows() != 4 || gate.cols() != 4 {
            return Err(Error::DimensionMismatch("two-qubit gate must be 4x4".into()));
        }
        check_indices(&[qa, qb], self.num_qubits)?;
        let ma = qubit_mask(self.num_qubits, qa);
        let mb = qubit_mask(self.num_qubits, qb);
        let g = gate.as_slice();
        for i in 0..self.amplitudes.len() {
            if i & (ma | mb) != 0 {
                continue;
            }
            let idx = [i, i | mb, i | ma, i | ma | mb];
            let v = idx.map(|k| self.amplitudes[k]);
            for (r, &k) in idx.iter().enumerate() {
                let row = &g[4 * r..4 * r + 4];
                self.amplitudes[k] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
            }
        }
        Ok(())
    }

    /// Full density matrix `|ψ><ψ|`. Only sensible for a handful of qubits.
    pub fn density(&self) -> CMatrix {
        CMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// Reduced density matrix of `keep` (in the given order), computed
    /// directly from amplitudes without forming the global density matrix.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<CMatrix> {
        check_indices(keep, self.num_qubits)?;
        if keep.is_empty() {
            return Err(Error::InvalidArgument("empty keep list".into()));
        }
        let n = self.num_qubits;
        let masks: Vec<usize> = keep.iter().map(|&q| qubit_mask(n, q)).collect();
        let keep_mask: usize = masks.iter().sum();
        let dim = 1usize << keep.len();

        // sub-index for each kept pattern
        let embed = |a: usize| -> usize {
            masks
                .iter()
                .enumerate()
                .filter(|(pos, _)| a & (1 << (keep.len() - 1 - pos)) != 0)
                .map(|(_, &m)| m)
                .sum()
        };
        let offsets: Vec<usize> = (0..dim).map(embed).collect();

        let mut rho = CMatrix::zeros(dim, dim);
        for rest in 0..self.amplitudes.len() {
            if rest & keep_mask != 0 {
                continue;
            }
            for a in 0..dim {
                let psi_a = self.amplitudes[rest | offsets[a]];
                if psi_a == ZERO {
                    continue;
                }
                for b in 0..dim {
                    rho[(a, b)] += psi_a * self.amplitudes[rest | offsets[b]].conj();
                }
            }
        }
        Ok(rho)
    }
}

/// Partial trace of an `n`-qubit density matrix, keeping `keep` in the given order.
pub fn partial_trace(rho: &CMatrix, keep: &[usize]) -> Result<CMatrix> {
    let dim = rho.rows();
    if !rho.is_square() || !dim.is_power_of_two() || dim < 2 {
        return Err(Error::DimensionMismatch(format!(
            "density matrix must be 2^n x 2^n, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let n = dim.trailing_zeros() as usize;
    check_indices(keep, n)?;
    if keep.is_empty() {
        return Err(Error::InvalidArgument("empty keep list".into()));
    }
    let k = keep.len();
    let masks: Vec<usize> = keep.iter().map(|&q| qubit_mask(n, q)).collect();
    let keep_mask: usize = masks.iter().sum();
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|a| {
            (0..k)
                .filter(|pos| a & (1 << (k - 1 - pos)) != 0)
                .map(|pos| masks[pos])
                .sum()
        })
        .collect();

    let sub = 1usize << k;
    let mut out = CMatrix::zeros(sub, sub);
    for rest in 0..dim {
        if rest & keep_mask != 0 {
            continue;
        }
        for a in 0..sub {
            for b in 0..sub {
                out[(a, b)] += rho[(rest | offsets[a], rest | offsets[b])];
            }
        }
    }
    Ok(out)
}
