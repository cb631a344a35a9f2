//! Amplitude loading with uniformly controlled rotations.
//!
//! Real targets cost at most `2^n - 2` CNOTs; complex targets add a diagonal
//! built from uniformly controlled `Rz` gates for at most as many again.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};

const ANGLE_EPS: f64 = 1e-14;

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Rotations `rot(α_c)` on `target`, selected by the value `c` of qubits
/// `target+1 ..= target+k` (bit `b` of `c` is qubit `target+1+b`).
fn multiplexed(c: &mut Circuit, target: usize, alphas: &[f64], rot: fn(usize, f64) -> Gate) {
    let k = alphas.len().trailing_zeros() as usize;
    let size = alphas.len();
    let thetas: Vec<f64> = (0..size)
        .map(|i| {
            let g = gray(i);
            alphas
                .iter()
                .enumerate()
                .map(|(j, a)| {
                    if (j & g).count_ones().is_multiple_of(2) {
                        *a
                    } else {
                        -*a
                    }
                })
                .sum::<f64>()
                / size as f64
        })
        .collect();
    if thetas[1..].iter().all(|t| t.abs() < ANGLE_EPS) {
        if thetas[0].abs() >= ANGLE_EPS {
            c.push(rot(target, thetas[0]));
        }
        return;
    }
    for (i, &theta) in thetas.iter().enumerate() {
        if theta.abs() >= ANGLE_EPS {
            c.push(rot(target, theta));
        }
        let bit = if i + 1 == size {
            k - 1
        } else {
            (i + 1).trailing_zeros() as usize
        };
        c.push(Gate::cx(target + 1 + bit, target));
    }
}

/// Circuit mapping `|0…0⟩` exactly onto `target`, global phase included.
pub fn build_state_prep(target: &[Complex64]) -> Result<Circuit> {
    let dim = target.len();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: dim.next_power_of_two().max(1),
            found: dim,
        });
    }
    let norm = target.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm));
    }
    let n = dim.trailing_zeros() as usize;
    let mut c = Circuit::new(n);
    let real = target.iter().all(|a| a.im.abs() < 1e-14);

    // subtree weights, level by level from the most significant qubit
    for t in (0..n).rev() {
        let k = n - 1 - t;
        let alphas: Vec<f64> = (0..1usize << k)
            .map(|cv| {
                let base = cv << (t + 1);
                if t == 0 && real {
                    return 2.0 * target[base | 1].re.atan2(target[base].re);
                }
                let weight = |bit: usize| -> f64 {
                    (0..1usize << t)
                        .map(|low| target[base | (bit << t) | low].norm_sqr())
                        .sum::<f64>()
                        .sqrt()
                };
                2.0 * weight(1).atan2(weight(0))
            })
            .collect();
        multiplexed(&mut c, t, &alphas, Gate::ry);
    }

    if !real {
        let mut phases: Vec<f64> = target.iter().map(|a| a.arg()).collect();
        for t in 0..n {
            let pairs = phases.len() / 2;
            let alphas: Vec<f64> = (0..pairs).map(|p| phases[2 * p + 1] - phases[2 * p]).collect();
            multiplexed(&mut c, t, &alphas, Gate::rz);
            phases = (0..pairs).map(|p| (phases[2 * p] + phases[2 * p + 1]) / 2.0).collect();
        }
        if phases[0].abs() >= ANGLE_EPS {
            c.push(Gate::global_phase(phases[0]));
        }
    }
    Ok(c)
}
