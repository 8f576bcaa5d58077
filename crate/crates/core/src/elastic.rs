//! Linear elastic solver for the frame under a lateral load pattern.
//!
//! Axial and shear deformabilities are neglected: every node of a floor
//! shares one horizontal translation (beams are inextensible) and columns are
//! inextensible (no vertical motion), leaving one translation per floor plus
//! one rotation per joint. Joint rotations are kept as explicit DOFs; the
//! systems are tiny, so a dense direct solve is used.

use crate::error::ElasticError;
use crate::frame::{FrameSpec, LateralLoadPattern};
use crate::linalg::DenseMat;

/// Result of [`solve_elastic`].
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticSolution {
    /// Horizontal translation per floor, m.
    pub floor_displacements: Vec<f64>,
    /// Joint rotations, rad, counterclockwise positive; `[storey][column]`.
    pub joint_rotations: Vec<Vec<f64>>,
    /// Control-node displacement: the top-floor translation, m.
    pub u_e: f64,
    /// Lateral stiffness sum(F_i) / u_e, kN/m.
    pub k_e: f64,
    /// Floor displacements normalized so the top floor equals 1.
    pub shape: Vec<f64>,
    /// Lateral stiffness condensed onto the floor translations, kN/m;
    /// `condensed[i][j]` couples floors i+1 and j+1.
    pub condensed_stiffness: Vec<Vec<f64>>,
}

impl ElasticSolution {
    /// Fundamental mode of the condensed lateral system under the given
    /// floor masses (kN*s^2/m), normalized so the top floor equals 1.
    /// Computed by inverse iteration on `K x = w^2 M x`.
    pub fn fundamental_mode(&self, masses: &[f64]) -> Result<Vec<f64>, ElasticError> {
        let n = self.floor_displacements.len();
        assert_eq!(masses.len(), n, "one mass per floor");
        if n == 1 {
            return Ok(vec![1.0]);
        }
        let mut k = DenseMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                k.set(i, j, self.condensed_stiffness[i][j]);
            }
        }
        let mut x = vec![1.0; n];
        for _ in 0..500 {
            let rhs: Vec<f64> = x.iter().zip(masses).map(|(xi, mi)| xi * mi).collect();
            let mut y = k.solve(&rhs)?;
            let top = y[n - 1];
            for v in y.iter_mut() {
                *v /= top;
            }
            let delta = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            x = y;
            if delta <= 1e-12 {
                break;
            }
        }
        Ok(x)
    }
}

/// DOF layout: floor translations first, then joint rotations storey-major.
struct DofMap {
    n_f: usize,
    n_c: usize,
}

impl DofMap {
    fn translation(&self, storey: usize) -> usize {
        storey - 1
    }
    fn rotation(&self, storey: usize, column: usize) -> usize {
        self.n_f + (storey - 1) * self.n_c + (column - 1)
    }
    fn len(&self) -> usize {
        self.n_f * (1 + self.n_c)
    }
}

/// Local bending stiffness of a prismatic member for DOFs
/// (w_A, theta_A, w_B, theta_B), w transverse.
fn bending_stiffness(ei: f64, l: f64) -> [[f64; 4]; 4] {
    let k = ei / (l * l * l);
    [
        [12.0 * k, 6.0 * k * l, -12.0 * k, 6.0 * k * l],
        [6.0 * k * l, 4.0 * k * l * l, -6.0 * k * l, 2.0 * k * l * l],
        [-12.0 * k, -6.0 * k * l, 12.0 * k, -6.0 * k * l],
        [6.0 * k * l, 2.0 * k * l * l, -6.0 * k * l, 4.0 * k * l * l],
    ]
}

/// Scatters a member's local stiffness into the global matrix. Each local
/// DOF maps to an optional global DOF with a sign factor; constrained DOFs
/// map to `None`.
fn scatter(k: &mut DenseMat, local: &[[f64; 4]; 4], map: &[Option<(usize, f64)>; 4]) {
    for (a, row) in local.iter().enumerate() {
        let Some((ga, fa)) = map[a] else { continue };
        for (b, &v) in row.iter().enumerate() {
            let Some((gb, fb)) = map[b] else { continue };
            k.add(ga, gb, v * fa * fb);
        }
    }
}

fn assemble(frame: &FrameSpec) -> (DofMap, DenseMat) {
    let dofs = DofMap {
        n_f: frame.n_storeys(),
        n_c: frame.n_columns(),
    };
    let mut k = DenseMat::zeros(dofs.len());
    // Columns: transverse axis points against global x, so w = -u.
    for i in 1..=frame.n_storeys() {
        let h = frame.storey_height(i);
        for j in 1..=frame.n_columns() {
            let ei = frame.column_props(i, j).flexural_rigidity();
            let local = bending_stiffness(ei, h);
            let below = if i == 1 {
                [None, None]
            } else {
                [
                    Some((dofs.translation(i - 1), -1.0)),
                    Some((dofs.rotation(i - 1, j), 1.0)),
                ]
            };
            let map = [
                below[0],
                below[1],
                Some((dofs.translation(i), -1.0)),
                Some((dofs.rotation(i, j), 1.0)),
            ];
            scatter(&mut k, &local, &map);
        }
    }
    // Beams: both ends restrained vertically, only rotations remain.
    for i in 1..=frame.n_storeys() {
        for j in 1..=frame.n_bays() {
            let ei = frame.beam_props(i, j).flexural_rigidity();
            let local = bending_stiffness(ei, frame.bay_length(j));
            let map = [
                None,
                Some((dofs.rotation(i, j), 1.0)),
                None,
                Some((dofs.rotation(i, j + 1), 1.0)),
            ];
            scatter(&mut k, &local, &map);
        }
    }
    (dofs, k)
}

/// Solves the frame under the lateral pattern.
pub fn solve_elastic(
    frame: &FrameSpec,
    pattern: &LateralLoadPattern,
) -> Result<ElasticSolution, ElasticError> {
    assert_eq!(
        pattern.forces.len(),
        frame.n_storeys(),
        "one lateral force per floor"
    );
    let (dofs, k) = assemble(frame);
    let mut f = vec![0.0; dofs.len()];
    for (i, &force) in pattern.forces.iter().enumerate() {
        f[dofs.translation(i + 1)] = force;
    }
    let u = k.solve(&f)?;

    let n_f = frame.n_storeys();
    let n_c = frame.n_columns();
    let floor_displacements: Vec<f64> = (1..=n_f).map(|i| u[dofs.translation(i)]).collect();
    let joint_rotations: Vec<Vec<f64>> = (1..=n_f)
        .map(|i| (1..=n_c).map(|j| u[dofs.rotation(i, j)]).collect())
        .collect();
    let u_e = floor_displacements[n_f - 1];
    let k_e = pattern.total() / u_e;
    let shape: Vec<f64> = floor_displacements.iter().map(|d| d / u_e).collect();

    // Static condensation of the rotations: K_cc = K_uu - K_ut K_tt^-1 K_tu.
    let n_r = n_f * n_c;
    let mut k_tt = DenseMat::zeros(n_r);
    for a in 0..n_r {
        for b in 0..n_r {
            k_tt.set(a, b, k.at(n_f + a, n_f + b));
        }
    }
    let rhs: Vec<Vec<f64>> = (0..n_f)
        .map(|col| (0..n_r).map(|a| k.at(n_f + a, col)).collect())
        .collect();
    let x = k_tt.solve_multi(&rhs)?;
    let condensed_stiffness: Vec<Vec<f64>> = (0..n_f)
        .map(|i| {
            (0..n_f)
                .map(|j| {
                    let coupling: f64 = (0..n_r).map(|a| k.at(i, n_f + a) * x[j][a]).sum();
                    k.at(i, j) - coupling
                })
                .collect()
        })
        .collect();

    Ok(ElasticSolution {
        floor_displacements,
        joint_rotations,
        u_e,
        k_e,
        shape,
        condensed_stiffness,
    })
}
