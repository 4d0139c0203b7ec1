use crate::tb_model::params::TwoCenterIntegrals;
use crate::{Complex, Error, Result};

/// Orbital-pair couplings `(orbital on A | H | orbital on B)` in order `s, px, py, pz`
/// for a bond pointing from A to B along unit vector `d`.
pub fn slater_koster_block(integrals: &TwoCenterIntegrals, d: [f64; 3]) -> Result<[[f64; 4]; 4]> {
    let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParams(format!(
            "direction cosines must have unit norm, got {norm}"
        )));
    }
    let mut block = [[0.0; 4]; 4];
    block[0][0] = integrals.ss_sigma;
    for a in 0..3 {
        block[0][a + 1] = d[a] * integrals.sp_sigma;
        block[a + 1][0] = -d[a] * integrals.ps_sigma;
        for b in 0..3 {
            let delta = if a == b { 1.0 } else { 0.0 };
            block[a + 1][b + 1] =
                d[a] * d[b] * integrals.pp_sigma + (delta - d[a] * d[b]) * integrals.pp_pi;
        }
    }
    Ok(block)
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn pauli(k: usize) -> [[Complex; 2]; 2] {
    let o = Complex::new(0.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    match k {
        0 => [[o, one], [one, o]],
        1 => [[o, -i], [i, o]],
        _ => [[one, o], [o, -one]],
    }
}

/// On-site spin-orbit coupling `λ L·S = (λ/2) L·σ` on the p manifold.
///
/// Indexed by `spin·4 + orbital`; s-orbital rows and columns are zero. In the
/// Cartesian p basis `(L_k)_{αβ} = -i ε_{kαβ}`. Eigenvalues are `λ/2` (×4, j = 3/2)
/// and `-λ` (×2, j = 1/2).
pub fn soc_block(lambda: f64) -> [[Complex; 8]; 8] {
    let mut block = [[Complex::new(0.0, 0.0); 8]; 8];
    if lambda == 0.0 {
        return block;
    }
    for s in 0..2 {
        for sp in 0..2 {
            for a in 0..3 {
                for b in 0..3 {
                    let mut v = Complex::new(0.0, 0.0);
                    for k in 0..3 {
                        let eps = levi_civita(k, a, b);
                        if eps != 0.0 {
                            v += Complex::new(0.0, -eps) * pauli(k)[s][sp];
                        }
                    }
                    block[s * 4 + a + 1][sp * 4 + b + 1] = v * (lambda / 2.0);
                }
            }
        }
    }
    block
}
