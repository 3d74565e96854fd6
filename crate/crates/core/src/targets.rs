//! Ground-truth soft-target construction.
//!
//! Targets are built in two steps: an optional *horizontal* redistribution
//! over the leaf classes (uniform smoothing or LCA-based soft labels),
//! followed by an optional *vertical* redistribution along the ancestral
//! path of every leaf carrying mass, controlled by a dilution parameter
//! `d`. Each step of the vertical pass deposits a `d` fraction of the
//! incoming mass at the current node and forwards the rest to its parent;
//! whatever reaches the root is kept as separately bookkept remainder
//! mass. The per-class results are precomputed into an `n x N` row-stochastic
//! [`TargetMatrix`] so a batch lookup is a plain row gather.

use std::io::Write;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use thiserror::Error;

use crate::taxonomy::{Mode, Taxonomy, TaxonomyError};

/// Tolerance for "sums to one" checks on leaf distributions.
const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TargetError {
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error("epsilon {0} out of range [0, 1)")]
    EpsilonRange(f64),
    #[error("dilution {0} out of range (0, 1]")]
    DilutionRange(f64),
    #[error("beta {0} must be positive and finite")]
    BetaRange(f64),
    #[error("leaf distribution sums to {0}, expected 1")]
    Unnormalized(f64),
    #[error("leaf distribution has {got} entries, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("taxonomy is in DAG mode; use the DAG-aware smoothing")]
    DagInput,
}

/// How the soft target for each leaf class is constructed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetScheme {
    /// One-hot at the true leaf.
    OneHot,
    /// Mix of the one-hot target and a uniform distribution over leaves.
    UniformSmooth { epsilon: f64 },
    /// One-hot followed by ancestral smoothing with dilution `d`.
    Ancestral { dilution: f64 },
    /// Uniform smoothing followed by ancestral smoothing.
    AncestralWithUniform { epsilon: f64, dilution: f64 },
    /// Soft labels decaying exponentially with LCA height, leaves only.
    LcaSoft { beta: f64 },
}

impl TargetScheme {
    pub fn name(&self) -> &'static str {
        match self {
            TargetScheme::OneHot => "one_hot",
            TargetScheme::UniformSmooth { .. } => "uniform_smooth",
            TargetScheme::Ancestral { .. } => "ancestral",
            TargetScheme::AncestralWithUniform { .. } => "ancestral_with_uniform",
            TargetScheme::LcaSoft { .. } => "lca_soft",
        }
    }

    /// Schemes whose mass stays entirely on the leaves.
    pub fn is_leaf_only(&self) -> bool {
        matches!(
            self,
            TargetScheme::OneHot | TargetScheme::UniformSmooth { .. } | TargetScheme::LcaSoft { .. }
        )
    }

    pub fn validate(&self) -> Result<(), TargetError> {
        match *self {
            TargetScheme::OneHot => Ok(()),
            TargetScheme::UniformSmooth { epsilon } => check_epsilon(epsilon),
            TargetScheme::Ancestral { dilution } => check_dilution(dilution),
            TargetScheme::AncestralWithUniform { epsilon, dilution } => {
                check_epsilon(epsilon)?;
                check_dilution(dilution)
            }
            TargetScheme::LcaSoft { beta } => {
                if beta > 0.0 && beta.is_finite() {
                    Ok(())
                } else {
                    Err(TargetError::BetaRange(beta))
                }
            }
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<(), TargetError> {
    if (0.0..1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(TargetError::EpsilonRange(epsilon))
    }
}

fn check_dilution(dilution: f64) -> Result<(), TargetError> {
    if dilution > 0.0 && dilution <= 1.0 {
        Ok(())
    } else {
        Err(TargetError::DilutionRange(dilution))
    }
}

fn require_leaf(t: &Taxonomy, leaf: usize) -> Result<(), TargetError> {
    if t.is_leaf(leaf) {
        Ok(())
    } else {
        Err(TaxonomyError::NotALeaf(t.node_id(leaf).to_string()).into())
    }
}

/// One-hot distribution over the leaf classes.
pub fn one_hot(t: &Taxonomy, leaf: usize) -> Result<Array1<f64>, TargetError> {
    require_leaf(t, leaf)?;
    let mut p = Array1::zeros(t.num_leaves());
    p[leaf] = 1.0;
    Ok(p)
}

/// Uniform label smoothing: `(1 - eps) * one_hot + eps / n` over the leaves.
pub fn uniform_smooth(t: &Taxonomy, leaf: usize, epsilon: f64) -> Result<Array1<f64>, TargetError> {
    check_epsilon(epsilon)?;
    require_leaf(t, leaf)?;
    let n = t.num_leaves();
    let mut p = Array1::from_elem(n, epsilon / n as f64);
    p[leaf] += 1.0 - epsilon;
    Ok(p)
}

/// Soft labels over leaves with mass proportional to `exp(-beta * h)` where
/// `h` is the LCA height between each leaf and the true leaf. Tree mode only.
pub fn lca_soft_labels(t: &Taxonomy, leaf: usize, beta: f64) -> Result<Array1<f64>, TargetError> {
    TargetScheme::LcaSoft { beta }.validate()?;
    require_leaf(t, leaf)?;
    let n = t.num_leaves();
    let mut p = Array1::zeros(n);
    for c in 0..n {
        let h = t.lca_height(c, leaf)?;
        p[c] = (-beta * h as f64).exp();
    }
    let total = p.sum();
    p.mapv_inplace(|x| x / total);
    Ok(p)
}

/// A single soft-target row over the `N` indexed nodes, plus the remainder
/// mass assigned to the virtual root.
#[derive(Clone, Debug)]
pub struct TargetRow {
    pub row: Array1<f64>,
    pub root_mass: f64,
}

fn check_leaf_distribution(t: &Taxonomy, p: ArrayView1<f64>) -> Result<(), TargetError> {
    if p.len() != t.num_leaves() {
        return Err(TargetError::LengthMismatch {
            got: p.len(),
            expected: t.num_leaves(),
        });
    }
    let sum = p.sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(TargetError::Unnormalized(sum));
    }
    Ok(())
}

/// Ancestral smoothing on a tree: each leaf `c` with mass `p(c)` deposits
/// `d * (1-d)^j * p(c)` at the `j`-th node of its root path and the
/// remainder at the virtual root; contributions sum at shared ancestors.
pub fn ancestral_smooth(
    t: &Taxonomy,
    leaf_dist: ArrayView1<f64>,
    dilution: f64,
) -> Result<TargetRow, TargetError> {
    if t.mode() == Mode::Dag {
        return Err(TargetError::DagInput);
    }
    check_dilution(dilution)?;
    check_leaf_distribution(t, leaf_dist)?;

    let mut row = Array1::zeros(t.num_nodes());
    let mut root_mass = 0.0;
    for (leaf, &mass) in leaf_dist.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let path = &t.ancestral_paths(leaf)?[0];
        let mut deposited = 0.0;
        for (j, &node) in path.nodes.iter().enumerate() {
            let share = dilution * (1.0 - dilution).powi(j as i32) * mass;
            row[node] += share;
            deposited += share;
        }
        root_mass += mass - deposited;
    }
    Ok(TargetRow { row, root_mass })
}

/// Ancestral smoothing over all leaf-to-root paths of a DAG. The mass
/// leaving a node with `k` parents is split into `k` equal shares, so the
/// total is partitioned rather than duplicated; on a tree every split
/// factor is 1 and the result matches [`ancestral_smooth`].
pub fn ancestral_smooth_dag(
    t: &Taxonomy,
    leaf_dist: ArrayView1<f64>,
    dilution: f64,
) -> Result<TargetRow, TargetError> {
    check_dilution(dilution)?;
    check_leaf_distribution(t, leaf_dist)?;

    let mut row = Array1::zeros(t.num_nodes());
    let mut root_mass = 0.0;
    for (leaf, &mass) in leaf_dist.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        for path in &t.ancestral_paths(leaf)? {
            // split[m] = prod_{j<m} 1/|P(b_j)|: the fraction of the leaf's
            // outgoing mass that travels this path up to node b_m.
            let mut split = 1.0;
            let mut attenuation = 1.0; // (1-d)^m
            for (m, &node) in path.nodes.iter().enumerate() {
                row[node] += dilution * attenuation * split * mass;
                split /= path.parent_counts[m] as f64;
                attenuation *= 1.0 - dilution;
            }
            root_mass += attenuation * split * mass;
        }
    }
    Ok(TargetRow { row, root_mass })
}

/// Precomputed soft targets: row `i` is the target distribution over the
/// `N` indexed nodes for leaf class `i`; `root_mass[i]` is the remainder
/// held by the virtual root, so every row plus its remainder sums to one.
#[derive(Clone, Debug)]
pub struct TargetMatrix {
    rows: Array2<f64>,
    root_mass: Array1<f64>,
    scheme: TargetScheme,
}

impl TargetMatrix {
    /// Build the full per-class target matrix for a scheme.
    pub fn build(t: &Taxonomy, scheme: &TargetScheme) -> Result<Self, TargetError> {
        scheme.validate()?;
        let n = t.num_leaves();
        let total = t.num_nodes();
        let mut rows = Array2::zeros((n, total));
        let mut root_mass = Array1::zeros(n);
        for leaf in 0..n {
            let horizontal = match *scheme {
                TargetScheme::OneHot | TargetScheme::Ancestral { .. } => one_hot(t, leaf)?,
                TargetScheme::UniformSmooth { epsilon }
                | TargetScheme::AncestralWithUniform { epsilon, .. } => {
                    uniform_smooth(t, leaf, epsilon)?
                }
                TargetScheme::LcaSoft { beta } => lca_soft_labels(t, leaf, beta)?,
            };
            match *scheme {
                TargetScheme::Ancestral { dilution }
                | TargetScheme::AncestralWithUniform { dilution, .. } => {
                    let smoothed = match t.mode() {
                        Mode::Tree => ancestral_smooth(t, horizontal.view(), dilution)?,
                        Mode::Dag => ancestral_smooth_dag(t, horizontal.view(), dilution)?,
                    };
                    rows.row_mut(leaf).assign(&smoothed.row);
                    root_mass[leaf] = smoothed.root_mass;
                }
                _ => {
                    rows.row_mut(leaf)
                        .slice_mut(ndarray::s![..n])
                        .assign(&horizontal);
                }
            }
        }
        Ok(TargetMatrix {
            rows,
            root_mass,
            scheme: *scheme,
        })
    }

    pub fn scheme(&self) -> &TargetScheme {
        &self.scheme
    }

    pub fn num_classes(&self) -> usize {
        self.rows.nrows()
    }

    pub fn num_nodes(&self) -> usize {
        self.rows.ncols()
    }

    pub fn row(&self, leaf: usize) -> ArrayView1<f64> {
        self.rows.row(leaf)
    }

    pub fn root_mass(&self, leaf: usize) -> f64 {
        self.root_mass[leaf]
    }

    /// The `n x n` leaf block (all of the mass, for leaf-only schemes).
    pub fn leaf_block(&self) -> ArrayView2<f64> {
        let n = self.num_classes();
        self.rows.slice(ndarray::s![.., ..n])
    }

    /// True when no row places mass on internal nodes or the root.
    pub fn is_leaf_only(&self) -> bool {
        let n = self.num_classes();
        self.root_mass.iter().all(|&m| m == 0.0)
            && self.rows.slice(ndarray::s![.., n..]).iter().all(|&x| x == 0.0)
    }

    /// CSV export for auditing: a header of node identifiers plus a
    /// `__root__` column; row `i` is the target row for leaf class `i`.
    pub fn write_csv<W: Write>(&self, t: &Taxonomy, mut w: W) -> std::io::Result<()> {
        let header: Vec<&str> = (0..t.num_nodes()).map(|i| t.node_id(i)).collect();
        writeln!(w, "{},__root__", header.join(","))?;
        for leaf in 0..self.num_classes() {
            for v in self.rows.row(leaf) {
                write!(w, "{v},")?;
            }
            writeln!(w, "{}", self.root_mass[leaf])?;
        }
        Ok(())
    }
}
