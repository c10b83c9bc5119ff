//! Quantum designs, design-structured measurements and the moment quantities
//! that turn power sums of outcome probabilities into functions of `tr ρ^s`.
//!
//! Qubit designs are stored as Bloch vectors; the squared overlap of two
//! pure qubit states is `(1 + n_j·n_k)/2`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::ProbabilityVector;
use crate::error::{Error, Result};

const STATE_TOLERANCE: f64 = 1e-12;
const UNIT_TOLERANCE: f64 = 1e-12;
const RESOLUTION_TOLERANCE: f64 = 1e-9;
const PROBABILITY_SUM_TOLERANCE: f64 = 1e-10;

/// Density operator of a `d`-level system.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    /// Qubit with Bloch vector `r`, `|r| ≤ 1`.
    Bloch([f64; 3]),
    Matrix(DMatrix<Complex64>),
}

impl QuantumState {
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let norm = dot(&r, &r).sqrt();
        if !norm.is_finite() || norm > 1.0 + STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("Bloch vector of length {norm}")));
        }
        Ok(Self::Bloch(r))
    }

    /// Qubit state with eigenvalues `(1-λ, λ)`, Bloch vector along `+z`.
    pub fn from_min_eigenvalue(lambda: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&lambda) {
            return Err(Error::DomainError {
                value: lambda,
                domain: "[0, 1/2]",
            });
        }
        Ok(Self::Bloch([0.0, 0.0, 1.0 - 2.0 * lambda]))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        if d == 2 {
            Self::Bloch([0.0; 3])
        } else {
            Self::Matrix(DMatrix::identity(d, d) / Complex64::new(d as f64, 0.0))
        }
    }

    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() < 2 {
            return Err(Error::InvalidState("matrix is not square of size >= 2".into()));
        }
        let asymmetry = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asymmetry > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian (defect {asymmetry})")));
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > STATE_TOLERANCE || trace.im.abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace}")));
        }
        let state = Self::Matrix(m);
        let min = state.eigenvalues()[0];
        if min < -STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Bloch(_) => 2,
            Self::Matrix(m) => m.nrows(),
        }
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        match self {
            Self::Bloch(r) => {
                let half = |x: f64, y: f64| Complex64::new(x / 2.0, y / 2.0);
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[half(1.0 + r[2], 0.0), half(r[0], -r[1]), half(r[0], r[1]), half(1.0 - r[2], 0.0)],
                )
            }
            Self::Matrix(m) => m.clone(),
        }
    }

    /// Eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self {
            Self::Bloch(r) => {
                let len = dot(r, r).sqrt();
                vec![(1.0 - len) / 2.0, (1.0 + len) / 2.0]
            }
            Self::Matrix(m) => {
                let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
                eig.sort_by(f64::total_cmp);
                eig
            }
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn purity(&self) -> f64 {
        match self {
            Self::Bloch(r) => (1.0 + dot(r, r)) / 2.0,
            Self::Matrix(_) => self.eigenvalues().iter().map(|x| x * x).sum(),
        }
    }

    /// `tr ρ^s` for `s = 1..=t`.
    pub fn moments(&self, t: usize) -> MomentVector {
        let eig: Vec<f64> = self.eigenvalues().into_iter().map(|x| x.max(0.0)).collect();
        MomentVector::from_eigenvalues(&eig, t)
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Power sums `tr ρ^s`, `s = 1..=t`, of a `d`-dimensional state.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    dim: usize,
    values: Vec<f64>,
}

impl MomentVector {
    /// `values[k]` is `tr ρ^(k+1)`.
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionError(format!("dimension {dim}")));
        }
        if values.is_empty() || (values[0] - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState("first moment must equal 1".into()));
        }
        for (k, &v) in values.iter().enumerate() {
            let s = k + 1;
            let lo = (dim as f64).powi(1 - s as i32);
            let bad_range = !(v.is_finite() && v >= lo * (1.0 - 1e-12) && v <= 1.0 + 1e-12);
            let increasing = k > 0 && v > values[k - 1] * (1.0 + 1e-12);
            if bad_range || increasing {
                return Err(Error::InvalidState(format!("tr rho^{s} = {v} is infeasible")));
            }
        }
        Ok(Self { dim, values })
    }

    pub fn from_eigenvalues(eigenvalues: &[f64], t: usize) -> Self {
        Self {
            dim: eigenvalues.len(),
            values: (1..=t)
                .map(|s| eigenvalues.iter().map(|x| x.powi(s as i32)).sum())
                .collect(),
        }
    }

    pub fn pure(dim: usize, t: usize) -> Self {
        Self {
            dim,
            values: vec![1.0; t],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest order available.
    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, s: usize) -> f64 {
        self.values[s - 1]
    }
}

/// `tr(ρ^{⊗s} P_sym)`, the complete homogeneous symmetric polynomial of
/// degree `s` in the eigenvalues, from the power sums by Newton's recursion.
pub fn moments_to_hsym(m: &MomentVector, s: usize) -> Result<f64> {
    if s > m.order() {
        return Err(Error::InsufficientMoments {
            requested: s,
            available: m.order(),
        });
    }
    let mut h = vec![1.0; s + 1];
    for j in 1..=s {
        h[j] = (1..=j).map(|k| m.get(k) * h[j - k]).sum::<f64>() / j as f64;
    }
    Ok(h[s])
}

/// `t!(d-1)!/(d+t-1)!`, the inverse dimension of the symmetric subspace.
pub fn dd(t: usize, d: usize) -> BigRational {
    let mut binom = BigInt::one();
    for k in 0..t {
        binom = binom * BigInt::from(d + k) / BigInt::from(k + 1);
    }
    BigRational::new(BigInt::one(), binom)
}

fn dd_f64(t: usize, d: usize) -> f64 {
    dd(t, d).to_f64().unwrap_or(0.0)
}

/// How a design's coordinates were obtained; decides the verification tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignOrigin {
    Exact,
    Optimized,
}

impl DesignOrigin {
    pub fn tolerance(self) -> f64 {
        match self {
            DesignOrigin::Exact => 1e-9,
            DesignOrigin::Optimized => 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DesignPoints {
    Bloch(Vec<[f64; 3]>),
    Vectors(Vec<DVector<Complex64>>),
}

/// `K` unit vectors forming a `t`-design, optionally split into `M` POVMs of
/// `ℓ` elements each.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumDesign {
    name: String,
    dim: usize,
    strength: usize,
    points: DesignPoints,
    partition: Option<Vec<Vec<usize>>>,
    origin: DesignOrigin,
}

impl QuantumDesign {
    pub fn from_bloch(
        name: &str,
        strength: usize,
        points: Vec<[f64; 3]>,
        partition: Option<Vec<Vec<usize>>>,
        origin: DesignOrigin,
    ) -> Result<Self> {
        for p in &points {
            if (dot(p, p).sqrt() - 1.0).abs() > UNIT_TOLERANCE {
                return Err(Error::InvalidDesign(format!("{p:?} is not a unit vector")));
            }
        }
        Self::build(name, 2, strength, DesignPoints::Bloch(points), partition, origin)
    }

    pub fn from_vectors(
        name: &str,
        strength: usize,
        vectors: Vec<DVector<Complex64>>,
        partition: Option<Vec<Vec<usize>>>,
        origin: DesignOrigin,
    ) -> Result<Self> {
        let dim = vectors.first().map_or(0, |v| v.len());
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionError("vectors of different lengths".into()));
            }
            if (v.norm() - 1.0).abs() > UNIT_TOLERANCE {
                return Err(Error::InvalidDesign("vector is not normalized".into()));
            }
        }
        Self::build(name, dim, strength, DesignPoints::Vectors(vectors), partition, origin)
    }

    fn build(
        name: &str,
        dim: usize,
        strength: usize,
        points: DesignPoints,
        partition: Option<Vec<Vec<usize>>>,
        origin: DesignOrigin,
    ) -> Result<Self> {
        let design = Self {
            name: name.to_string(),
            dim,
            strength,
            points,
            partition,
            origin,
        };
        if design.is_empty() || dim < 2 || strength == 0 {
            return Err(Error::InvalidDesign("empty design".into()));
        }
        design.check_partition()?;
        Ok(design)
    }

    fn check_partition(&self) -> Result<()> {
        let Some(groups) = &self.partition else {
            return Ok(());
        };
        let ell = groups.first().map_or(0, Vec::len);
        let mut seen = vec![false; self.len()];
        for g in groups {
            if g.len() != ell || ell == 0 {
                return Err(Error::InvalidDesign("groups of unequal size".into()));
            }
            for &k in g {
                if k >= seen.len() || std::mem::replace(&mut seen[k], true) {
                    return Err(Error::InvalidDesign(format!("index {k} misplaced in partition")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidDesign("partition does not cover all vectors".into()));
        }
        for g in groups {
            let mut sum = DMatrix::<Complex64>::zeros(self.dim, self.dim);
            for &k in g {
                let v = self.vector(k);
                sum += &v * v.adjoint();
            }
            sum *= Complex64::new(self.dim as f64 / ell as f64, 0.0);
            let defect = (sum - DMatrix::identity(self.dim, self.dim))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if defect > RESOLUTION_TOLERANCE {
                return Err(Error::InvalidDesign(format!(
                    "group {g:?} misses the identity by {defect}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn origin(&self) -> DesignOrigin {
        self.origin
    }

    pub fn points(&self) -> &DesignPoints {
        &self.points
    }

    /// Number of vectors `K`.
    pub fn len(&self) -> usize {
        match &self.points {
            DesignPoints::Bloch(p) => p.len(),
            DesignPoints::Vectors(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bloch_points(&self) -> Option<&[[f64; 3]]> {
        match &self.points {
            DesignPoints::Bloch(p) => Some(p),
            DesignPoints::Vectors(_) => None,
        }
    }

    pub fn partition(&self) -> Option<&[Vec<usize>]> {
        self.partition.as_deref()
    }

    /// The POVMs: the partition if present, otherwise one group of all `K`.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        match &self.partition {
            Some(g) => g.clone(),
            None => vec![(0..self.len()).collect()],
        }
    }

    /// Outcomes per POVM, `ℓ`.
    pub fn outcomes_per_group(&self) -> usize {
        self.partition.as_ref().map_or(self.len(), |g| g[0].len())
    }

    /// Number of POVMs, `M`.
    pub fn group_count(&self) -> usize {
        self.partition.as_ref().map_or(1, Vec::len)
    }

    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        match &self.points {
            DesignPoints::Bloch(p) => bloch_to_spinor(&p[k]),
            DesignPoints::Vectors(v) => v[k].clone(),
        }
    }

    /// `|⟨φ_j|φ_k⟩|²`.
    pub fn overlap_sq(&self, j: usize, k: usize) -> f64 {
        match &self.points {
            DesignPoints::Bloch(p) => (1.0 + dot(&p[j], &p[k])) / 2.0,
            DesignPoints::Vectors(v) => v[j].dotc(&v[k]).norm_sqr(),
        }
    }

    /// `⟨φ_k|ρ|φ_k⟩`.
    pub fn expectation(&self, k: usize, rho: &QuantumState) -> f64 {
        match (&self.points, rho) {
            (DesignPoints::Bloch(p), QuantumState::Bloch(r)) => (1.0 + dot(&p[k], r)) / 2.0,
            _ => {
                let v = self.vector(k);
                (v.adjoint() * rho.matrix() * &v)[(0, 0)].re
            }
        }
    }
}

fn bloch_to_spinor(n: &[f64; 3]) -> DVector<Complex64> {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    DVector::from_vec(vec![
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ])
}

/// `(1/K²) Σ_{j,k} |⟨φ_j|φ_k⟩|^{2t}`.
pub fn frame_potential(design: &QuantumDesign, t: usize) -> f64 {
    let k = design.len();
    let row = |j: usize| -> f64 { (0..k).map(|i| design.overlap_sq(j, i).powi(t as i32)).sum() };
    let total: f64 = if k >= 256 {
        (0..k).into_par_iter().map(row).sum()
    } else {
        (0..k).map(row).sum()
    };
    total / (k * k) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignCheck {
    pub is_design: bool,
    /// Frame potential minus its lower bound `Dd(t, d)`.
    pub defect: f64,
    pub tolerance: f64,
}

/// Checks the design property at the declared strength.
pub fn verify_design(design: &QuantumDesign) -> DesignCheck {
    verify_design_at(design, design.strength())
}

/// Checks whether `design` is a `t`-design by comparing its frame potential
/// against the minimum `Dd(t, d)` attained exactly by `t`-designs.
pub fn verify_design_at(design: &QuantumDesign, t: usize) -> DesignCheck {
    let defect = frame_potential(design, t) - dd_f64(t, design.dim());
    let tolerance = design.origin().tolerance();
    DesignCheck {
        is_design: defect.abs() <= tolerance,
        defect,
        tolerance,
    }
}

/// Outcome distributions `p_j = (d/ℓ)⟨φ_j|ρ|φ_j⟩`, one per POVM.
pub fn povm_probabilities(design: &QuantumDesign, rho: &QuantumState) -> Result<Vec<ProbabilityVector>> {
    if design.dim() != rho.dim() {
        return Err(Error::DimensionError(format!(
            "design in dimension {} and state in dimension {}",
            design.dim(),
            rho.dim()
        )));
    }
    let scale = design.dim() as f64 / design.outcomes_per_group() as f64;
    design
        .groups()
        .iter()
        .map(|g| {
            let probs: Vec<f64> = g
                .iter()
                .map(|&k| (scale * design.expectation(k, rho)).max(0.0))
                .collect();
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
                return Err(Error::InvalidDesign(format!(
                    "POVM probabilities sum to {total}"
                )));
            }
            ProbabilityVector::new(probs.into_iter().map(|p| p / total).collect())
        })
        .collect()
}

/// `β̄_ℓ^(s) = ℓ^{1-s} d^s Dd(s,d) tr(ρ^{⊗s} P_sym)` with `ℓ` the POVM size
/// when `per_group`, else `K`.
pub fn beta_bar(design: &QuantumDesign, rho: &QuantumState, s: usize, per_group: bool) -> Result<f64> {
    if design.dim() != rho.dim() {
        return Err(Error::DimensionError(format!(
            "design in dimension {} and state in dimension {}",
            design.dim(),
            rho.dim()
        )));
    }
    beta_bar_from_moments(design, &rho.moments(s.max(1)), s, per_group)
}

pub fn beta_bar_from_moments(design: &QuantumDesign, m: &MomentVector, s: usize, per_group: bool) -> Result<f64> {
    if !(2..=design.strength()).contains(&s) {
        return Err(Error::DegreeOutOfRange {
            degree: s,
            min: 2,
            max: design.strength(),
        });
    }
    let outcomes = if per_group {
        design.outcomes_per_group()
    } else {
        design.len()
    } as f64;
    let d = design.dim() as f64;
    Ok(outcomes.powi(1 - s as i32) * d.powi(s as i32) * dd_f64(s, design.dim()) * moments_to_hsym(m, s)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinDesign {
    Octahedron,
    Icosahedron,
    Icosidodecahedron,
    McLarenSnubCube,
    Mub3,
}

impl BuiltinDesign {
    pub const ALL: [BuiltinDesign; 5] = [
        BuiltinDesign::Octahedron,
        BuiltinDesign::Icosahedron,
        BuiltinDesign::Icosidodecahedron,
        BuiltinDesign::McLarenSnubCube,
        BuiltinDesign::Mub3,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            BuiltinDesign::Octahedron => "octahedron",
            BuiltinDesign::Icosahedron => "icosahedron",
            BuiltinDesign::Icosidodecahedron => "icosidodecahedron",
            BuiltinDesign::McLarenSnubCube => "mclaren_snub_cube",
            BuiltinDesign::Mub3 => "mub3",
        }
    }
}

impl fmt::Display for BuiltinDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BuiltinDesign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.tag() == s)
            .ok_or_else(|| Error::UnknownDesign(s.to_string()))
    }
}

const GOLDEN: f64 = 1.618_033_988_749_895;

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let n = dot(&v, &v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cyclic(v: [f64; 3]) -> [[f64; 3]; 3] {
    [v, [v[2], v[0], v[1]], [v[1], v[2], v[0]]]
}

fn signs(v: [f64; 3]) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for mask in 0..8 {
        let w: [f64; 3] = std::array::from_fn(|i| if mask >> i & 1 == 1 { -v[i] } else { v[i] });
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

fn octahedron_points() -> Vec<[f64; 3]> {
    vec![
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
    ]
}

fn icosahedron_points() -> Vec<[f64; 3]> {
    signs([0.0, 1.0, GOLDEN])
        .into_iter()
        .flat_map(cyclic)
        .map(normalized)
        .collect()
}

fn icosidodecahedron_points() -> Vec<[f64; 3]> {
    let mut pts: Vec<[f64; 3]> = signs([0.0, 0.0, 1.0]).into_iter().flat_map(cyclic).collect();
    pts.extend(
        signs([0.5, GOLDEN / 2.0, GOLDEN * GOLDEN / 2.0])
            .into_iter()
            .flat_map(cyclic)
            .map(normalized),
    );
    pts
}

pub fn builtin_design(which: BuiltinDesign) -> Result<QuantumDesign> {
    let exact = |name, t, pts, partition| QuantumDesign::from_bloch(name, t, pts, partition, DesignOrigin::Exact);
    match which {
        BuiltinDesign::Octahedron => exact("octahedron", 3, octahedron_points(), None),
        BuiltinDesign::Mub3 => exact(
            "mub3",
            3,
            octahedron_points(),
            Some(vec![vec![0, 1], vec![2, 3], vec![4, 5]]),
        ),
        BuiltinDesign::Icosahedron => exact("icosahedron", 5, icosahedron_points(), None),
        BuiltinDesign::Icosidodecahedron => exact("icosidodecahedron", 5, icosidodecahedron_points(), None),
        BuiltinDesign::McLarenSnubCube => find_snub_cube_design(),
    }
}

/// The 24 rotations of the cube: signed permutation matrices with determinant +1.
pub fn chiral_octahedral_group() -> Vec<[[f64; 3]; 3]> {
    const PERMS: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([1, 0, 2], -1.0),
        ([0, 2, 1], -1.0),
        ([2, 1, 0], -1.0),
    ];
    let mut out = Vec::with_capacity(24);
    for (perm, parity) in PERMS {
        for mask in 0..8u32 {
            let sign_product = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            if parity * sign_product < 0.0 {
                continue;
            }
            let mut m = [[0.0; 3]; 3];
            for (row, &col) in perm.iter().enumerate() {
                m[row][col] = if mask >> row & 1 == 1 { -1.0 } else { 1.0 };
            }
            out.push(m);
        }
    }
    out
}

fn orbit(seed: [f64; 3]) -> Vec<[f64; 3]> {
    chiral_octahedral_group()
        .iter()
        .map(|m| std::array::from_fn(|i| dot(&m[i], &seed)))
        .collect()
}

fn seed_direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn orbit_defect(theta: f64, phi: f64, t: usize) -> f64 {
    let pts = orbit(seed_direction(theta, phi));
    let k = pts.len();
    let mut total = 0.0;
    for a in &pts {
        for b in &pts {
            total += ((1.0 + dot(a, b)) / 2.0).powi(t as i32);
        }
    }
    total / (k * k) as f64 - dd_f64(t, 2)
}

/// Vertices of the regular snub cube, an orbit of the cube's rotation group.
pub fn regular_snub_cube() -> Result<QuantumDesign> {
    // tribonacci constant, real root of x^3 = x^2 + x + 1
    let r = 33f64.sqrt();
    let xi = (1.0 + (19.0 + 3.0 * r).cbrt() + (19.0 - 3.0 * r).cbrt()) / 3.0;
    let base = [1.0, 1.0 / xi, xi];
    let even = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
    let odd = [[1, 0, 2], [0, 2, 1], [2, 1, 0]];
    let mut pts = Vec::with_capacity(24);
    for (perms, want_odd_plus) in [(even, false), (odd, true)] {
        for perm in perms {
            for mask in 0..8u32 {
                let plus = 3 - mask.count_ones();
                if (plus % 2 == 1) != want_odd_plus {
                    continue;
                }
                let v: [f64; 3] =
                    std::array::from_fn(|i| if mask >> i & 1 == 1 { -base[perm[i]] } else { base[perm[i]] });
                pts.push(normalized(v));
            }
        }
    }
    QuantumDesign::from_bloch("regular_snub_cube", 3, pts, None, DesignOrigin::Exact)
}

struct OrbitPotential;

impl CostFunction for OrbitPotential {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(orbit_defect(p[0], p[1], 7))
    }
}

const SNUB_RESTARTS: usize = 64;
const SNUB_SEED: u64 = 0x5eed_c0be;

fn min_separation(pts: &[[f64; 3]]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
            best = best.min(dot(&d, &d).sqrt());
        }
    }
    best
}

fn search_snub_cube() -> Result<QuantumDesign> {
    let mut rng = ChaCha8Rng::seed_from_u64(SNUB_SEED);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..SNUB_RESTARTS {
        let theta = rng.gen_range(0.0..std::f64::consts::PI);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let simplex = vec![vec![theta, phi], vec![theta + 0.1, phi], vec![theta, phi + 0.1]];
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-17)
            .map_err(|e| Error::ConvergenceFailure(e.to_string()))?;
        let result = Executor::new(OrbitPotential, solver)
            .configure(|state| state.max_iters(2000))
            .run()
            .map_err(|e| Error::ConvergenceFailure(e.to_string()))?;
        let state = result.state();
        let (Some(param), cost) = (state.best_param.clone(), state.best_cost) else {
            continue;
        };
        // Seeds on a rotation axis give repeated points.
        if min_separation(&orbit(seed_direction(param[0], param[1]))) < 1e-3 {
            continue;
        }
        if best.as_ref().map_or(true, |(c, _)| cost.abs() < c.abs()) {
            best = Some((cost, param));
        }
    }
    let Some((defect, param)) = best else {
        return Err(Error::ConvergenceFailure("no nondegenerate orbit found".into()));
    };
    if defect.abs() > DesignOrigin::Optimized.tolerance() {
        return Err(Error::ConvergenceFailure(format!("best defect {defect:e}")));
    }
    QuantumDesign::from_bloch(
        "mclaren_snub_cube",
        7,
        orbit(seed_direction(param[0], param[1])),
        None,
        DesignOrigin::Optimized,
    )
}

/// A 24-point qubit 7-design obtained by deforming the snub cube: the orbit
/// of one direction under the cube's rotations, with the direction chosen to
/// minimise the order-7 frame potential. Computed once per process.
pub fn find_snub_cube_design() -> Result<QuantumDesign> {
    static CACHE: OnceLock<Result<QuantumDesign>> = OnceLock::new();
    CACHE.get_or_init(search_snub_cube).clone()
}

/// Bloch components as CSV rows `k,nx,ny,nz`.
pub fn export_csv(design: &QuantumDesign) -> Result<String> {
    let pts = design
        .bloch_points()
        .ok_or_else(|| Error::DimensionError("export needs a qubit design".into()))?;
    let mut out = String::from("k,nx,ny,nz\n");
    for (k, p) in pts.iter().enumerate() {
        out.push_str(&format!("{k},{:.16e},{:.16e},{:.16e}\n", p[0], p[1], p[2]));
    }
    Ok(out)
}
