//! Dense-matrix verification of the Majorana and braid-group algebra on
//! small Fock spaces. Every residual here is an algebraic identity and
//! should sit at machine precision; callers pick the tolerance.

use crate::clifford::{braid_unitary, gamma_action, Exchange, FockSpace};
use crate::linalg::CMatrix;
use crate::{Error, Result};
use num_complex::Complex64;

/// Measured residual of one named identity, maximized over all instances
/// of that identity in the space it was checked on.
#[derive(Debug, Clone, Copy)]
pub struct AlgebraCheck {
    pub name: &'static str,
    pub residual: f64,
}

fn gamma_matrix(space: FockSpace, k: usize) -> CMatrix {
    let dim = space.dim();
    let mut m = CMatrix::zeros(dim);
    for col in 0..dim {
        let (row, coeff) = gamma_action(k, col);
        m[(row, col)] = coeff;
    }
    m
}

/// Total fermion parity (-1)^(number of occupied modes), diagonal.
fn parity_matrix(space: FockSpace) -> CMatrix {
    let dim = space.dim();
    let mut m = CMatrix::zeros(dim);
    for b in 0..dim {
        let sign = if (b as u32).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        m[(b, b)] = Complex64::new(sign, 0.0);
    }
    m
}

/// Check the full operator algebra on `n_modes` Dirac modes: Majorana
/// hermiticity, involution and anticommutation, unitarity and the power
/// relations of every exchange, the Yang-Baxter and far-commutation braid
/// relations on adjacent generators, and conservation of total parity.
///
/// Needs at least two modes so that the braid relations have room.
pub fn verify_majorana_algebra(n_modes: usize) -> Result<Vec<AlgebraCheck>> {
    if n_modes < 2 {
        return Err(Error::InvalidParameter("algebra suite needs n_modes >= 2"));
    }
    let space = FockSpace::new(n_modes)?;
    let dim = space.dim();
    let n_maj = 2 * n_modes;
    let id = CMatrix::identity(dim);
    let minus_id = id.scale(Complex64::new(-1.0, 0.0));

    let gammas: Vec<CMatrix> = (1..=n_maj).map(|k| gamma_matrix(space, k)).collect();
    let gamma = |k: usize| &gammas[k - 1];

    let mut hermiticity: f64 = 0.0;
    let mut squared: f64 = 0.0;
    for g in &gammas {
        hermiticity = hermiticity.max(g.distance(&g.adjoint()));
        squared = squared.max(g.mul(g).distance(&id));
    }

    let mut anticommutation: f64 = 0.0;
    for i in 1..=n_maj {
        for j in (i + 1)..=n_maj {
            let ab = gamma(i).mul(gamma(j));
            let ba = gamma(j).mul(gamma(i));
            anticommutation = anticommutation.max(ab.add(&ba).norm());
        }
    }

    // Every exchange, both chiralities: unitary, order eight, parity-even.
    let parity = parity_matrix(space);
    let mut unitarity: f64 = 0.0;
    let mut fourth_power: f64 = 0.0;
    let mut eighth_power: f64 = 0.0;
    let mut parity_conservation: f64 = 0.0;
    for i in 1..=n_maj {
        for j in (i + 1)..=n_maj {
            for sign in [1i8, -1] {
                let b = braid_unitary(space, &Exchange::new(i, j, sign)?)?.matrix;
                unitarity = unitarity.max(b.adjoint().mul(&b).distance(&id));
                let b2 = b.mul(&b);
                let b4 = b2.mul(&b2);
                fourth_power = fourth_power.max(b4.distance(&minus_id));
                eighth_power = eighth_power.max(b4.mul(&b4).distance(&id));
                parity_conservation =
                    parity_conservation.max(b.mul(&parity).distance(&parity.mul(&b)));
            }
        }
    }

    // Adjacent-generator braid relations.
    let gen: Vec<CMatrix> = (1..n_maj)
        .map(|i| Ok(braid_unitary(space, &Exchange::new(i, i + 1, 1)?)?.matrix))
        .collect::<Result<_>>()?;
    let mut yang_baxter: f64 = 0.0;
    for w in gen.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        yang_baxter = yang_baxter.max(a.mul(b).mul(a).distance(&b.mul(a).mul(b)));
    }
    let mut far_commutation: f64 = 0.0;
    for i in 0..gen.len() {
        for j in (i + 2)..gen.len() {
            let (a, b) = (&gen[i], &gen[j]);
            far_commutation = far_commutation.max(a.mul(b).distance(&b.mul(a)));
        }
    }

    Ok(vec![
        AlgebraCheck {
            name: "gamma_hermiticity",
            residual: hermiticity,
        },
        AlgebraCheck {
            name: "gamma_squared_identity",
            residual: squared,
        },
        AlgebraCheck {
            name: "gamma_anticommutation",
            residual: anticommutation,
        },
        AlgebraCheck {
            name: "braid_unitarity",
            residual: unitarity,
        },
        AlgebraCheck {
            name: "braid_fourth_power_is_minus_identity",
            residual: fourth_power,
        },
        AlgebraCheck {
            name: "braid_eighth_power_is_identity",
            residual: eighth_power,
        },
        AlgebraCheck {
            name: "yang_baxter",
            residual: yang_baxter,
        },
        AlgebraCheck {
            name: "far_commutation",
            residual: far_commutation,
        },
        AlgebraCheck {
            name: "total_parity_conservation",
            residual: parity_conservation,
        },
    ])
}

/// Run the suite on every space from two modes up to `max_modes` and keep
/// the worst residual per identity.
pub fn verify_majorana_algebra_up_to(max_modes: usize) -> Result<Vec<AlgebraCheck>> {
    let mut merged: Vec<AlgebraCheck> = Vec::new();
    for n in 2..=max_modes.max(2) {
        let checks = verify_majorana_algebra(n)?;
        if merged.is_empty() {
            merged = checks;
        } else {
            for (m, c) in merged.iter_mut().zip(checks) {
                debug_assert_eq!(m.name, c.name);
                m.residual = m.residual.max(c.residual);
            }
        }
    }
    Ok(merged)
}
