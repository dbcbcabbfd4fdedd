use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::{apply_circuit, Circuit};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSpectrum {
    /// Pooled half-chain eigenvalues times `2^{n/2}`, ascending.
    pub samples: Vec<f64>,
    /// Kolmogorov-Smirnov distance to the ratio-1 Marchenko-Pastur law.
    pub ks: f64,
}

/// CDF of the density `sqrt(4/x - 1) / (2 pi)` on `(0, 4]`.
pub fn mp_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 4.0 {
        1.0
    } else {
        let pi = std::f64::consts::PI;
        2.0 / pi * (x.sqrt() / 2.0).asin() + (x * (4.0 - x)).sqrt() / (2.0 * pi)
    }
}

/// `sup |F_n - F|` for ascending `sorted` samples.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Half-chain entanglement spectra of `n_samples` circuits with every slot
/// drawn uniformly from `[0, 2 pi)`; sample `k` uses stream `k` of the seed.
pub fn entanglement_spectrum(
    circuit: &Circuit,
    n_samples: usize,
    seed: u64,
) -> Result<EntanglementSpectrum> {
    let n = circuit.n_qubits;
    if n % 2 != 0 {
        return Err(Error::invalid(
            "n",
            format!("half-chain cut needs an even qubit count, got {n}"),
        ));
    }
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "must be at least 1"));
    }
    let keep: Vec<usize> = (0..n / 2).collect();
    let scale = (1usize << (n / 2)) as f64;
    let initial = circuit.initial()?;
    let per_sample: Vec<Vec<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let p: Vec<f64> = (0..circuit.n_params)
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect();
            let psi = apply_circuit(circuit, &p, &initial)?;
            Ok(psi.reduced_density(&keep)?.eigenvalues())
        })
        .collect::<Result<_>>()?;
    let mut samples: Vec<f64> = per_sample
        .into_iter()
        .flatten()
        .map(|x| x * scale)
        .collect();
    samples.sort_by(f64::total_cmp);
    let ks = ks_distance(&samples, mp_cdf);
    Ok(EntanglementSpectrum { samples, ks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_matches_quadrature() {
        let dens = |x: f64| (4.0 / x - 1.0).sqrt() / (2.0 * std::f64::consts::PI);
        // Midpoint rule after x = u^2 removes the endpoint singularity.
        let m = 200_000;
        let b = 1.7f64.sqrt();
        let h = b / m as f64;
        let q: f64 = (0..m)
            .map(|k| {
                let u = (k as f64 + 0.5) * h;
                2.0 * u * dens(u * u) * h
            })
            .sum();
        assert!((q - mp_cdf(1.7)).abs() < 1e-8, "{q} vs {}", mp_cdf(1.7));
        assert_eq!(mp_cdf(4.0), 1.0);
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let v: Vec<f64> = (0..1000).map(|k| (k as f64 + 0.5) / 1000.0).collect();
        assert!((ks_distance(&v, |x| x) - 0.0005).abs() < 1e-12);
    }
}
