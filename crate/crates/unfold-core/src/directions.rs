//! Residue-based stability of parameter directions.
//!
//! A compact-like node with polynomial field `P` is unstable in the
//! direction `(λ, μ)` when `λ^e μ P(w) ∂/∂w` has a subset of singular points
//! whose residues sum to `r` with `2πi r / (λ^e μ)` real and nonzero, which
//! is the line `e·arg λ + arg μ ≡ arg r + π/2 (mod π)` on the torus.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::algebra::{residue, roots, ComplexPoly, ALGEBRAIC_TOL};
use crate::error::{Error, Result};
use crate::num::{angle_dist, cis, wrap, C64, I};
use crate::splitting::{locate, NodeKind, SplitNode, SplittingTree};

/// Subset-sum enumeration is capped at this many singular points.
pub const MAX_SINGULAR_POINTS: usize = 12;
/// Threshold for "real and nonzero" in the stability test.
pub const STABILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueProfile {
    /// `(singular point, residue of 1/P there)`.
    pub residues: Vec<(C64, C64)>,
    /// Nonzero residue sums over nonempty subsets of singular points.
    pub subset_sums: Vec<C64>,
}

pub fn residue_profile(p: &ComplexPoly) -> Result<ResidueProfile> {
    let rs = roots(p, ALGEBRAIC_TOL)?;
    if rs.len() > MAX_SINGULAR_POINTS {
        return Err(Error::InvalidInput(
            "too many singular points for subset enumeration".into(),
        ));
    }
    let residues = rs
        .iter()
        .map(|r| Ok((r.value, residue(p, r.value, r.multiplicity, ALGEBRAIC_TOL)?)))
        .collect::<Result<Vec<_>>>()?;
    let n = residues.len();
    let subset_sums = (1u32..(1 << n))
        .map(|mask| {
            residues
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, (_, r))| *r)
                .sum::<C64>()
        })
        .filter(|s| s.norm() > STABILITY_TOL)
        .collect();
    Ok(ResidueProfile {
        residues,
        subset_sums,
    })
}

/// Whether `P ∂/∂w` is stable: no subset residue sum `S` with
/// `2πi S ∈ ℝ ∖ {0}` within `tol`.
pub fn in_x_infinity(p: &ComplexPoly, tol: f64) -> Result<bool> {
    let prof = residue_profile(p)?;
    Ok(prof.subset_sums.iter().all(|s| {
        let v = *s * C64::new(0.0, TAU);
        !(v.im.abs() < tol && v.norm() > tol)
    }))
}

/// The torus line `level·arg λ + arg μ ≡ offset (mod π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnstableCurve {
    pub level: u32,
    pub offset: f64,
}

impl UnstableCurve {
    /// Angular distance (mod π) of `(λ, μ)` from the curve.
    pub fn distance(&self, lambda_arg: f64, mu_arg: f64) -> f64 {
        angle_dist(self.level as f64 * lambda_arg + mu_arg, self.offset, PI)
    }
}

fn push_offset(out: &mut Vec<f64>, th: f64) {
    if out.iter().all(|&o| angle_dist(o, th, PI) > 1e-12) {
        out.push(th);
    }
}

/// Unstable curves of a compact-like node, one per distinct offset class.
pub fn unstable_curves(node: &SplitNode) -> Result<Vec<UnstableCurve>> {
    let p = node
        .poly_field
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("unstable curves of a non compact-like node".into()))?;
    let prof = residue_profile(p)?;
    let mut offsets = Vec::new();
    for s in &prof.subset_sums {
        push_offset(&mut offsets, wrap(s.arg() + FRAC_PI_2, PI));
    }
    offsets.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    Ok(offsets
        .into_iter()
        .map(|offset| UnstableCurve {
            level: node.e,
            offset,
        })
        .collect())
}

/// Singular directions of one level, kept as offset classes so that the
/// rotation by `π/e` is an exact index shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSet {
    pub level: u32,
    /// Offsets `θ` of the level's unstable curves, in `[0, π)`.
    pub offsets: Vec<f64>,
}

impl SingularSet {
    /// Angle of the `m`-th direction of class `c`: `(θ_c − π/2 + mπ)/e`.
    pub fn angle(&self, class: usize, m: i64) -> f64 {
        (self.offsets[class] - FRAC_PI_2 + m as f64 * PI) / self.level as f64
    }

    /// All directions as angles in `[0, 2π)`.
    pub fn angles(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for c in 0..self.offsets.len() {
            for m in 0..2 * self.level as i64 {
                out.push(wrap(self.angle(c, m), TAU));
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        out
    }

    /// Index form `(class, m mod 2e)` of the rotation of direction `(c, m)` by `π/e`.
    pub fn rotate_index(&self, class: usize, m: i64) -> (usize, i64) {
        (class, (m + 1).rem_euclid(2 * self.level as i64))
    }

    pub fn distance(&self, arg: f64) -> f64 {
        self.angles()
            .iter()
            .map(|&a| angle_dist(arg, a, TAU))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeCurves {
    pub beta: Vec<C64>,
    pub level: u32,
    pub curves: Vec<UnstableCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionAtlas {
    /// `ẽ_1 < … < ẽ_q̃`.
    pub levels: Vec<u32>,
    pub singular: Vec<SingularSet>,
    pub nodes: Vec<NodeCurves>,
}

impl DirectionAtlas {
    pub fn level_index(&self, e: u32) -> Option<usize> {
        self.levels.iter().position(|&l| l == e)
    }

    /// Every unstable curve of a given level.
    pub fn curves_at(&self, level: u32) -> impl Iterator<Item = &UnstableCurve> + '_ {
        self.nodes
            .iter()
            .filter(move |n| n.level == level)
            .flat_map(|n| n.curves.iter())
    }
}

pub fn direction_atlas(tree: &SplittingTree) -> Result<DirectionAtlas> {
    let mut nodes = Vec::new();
    for c in tree.compact_nodes() {
        nodes.push(NodeCurves {
            beta: c.beta.clone(),
            level: c.e,
            curves: unstable_curves(c)?,
        });
    }
    let mut levels: Vec<u32> = nodes
        .iter()
        .filter(|n| !n.curves.is_empty())
        .map(|n| n.level)
        .collect();
    levels.sort_unstable();
    levels.dedup();
    let singular = levels
        .iter()
        .map(|&level| {
            let mut offsets = Vec::new();
            for n in nodes.iter().filter(|n| n.level == level) {
                for c in &n.curves {
                    push_offset(&mut offsets, c.offset);
                }
            }
            offsets.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
            SingularSet { level, offsets }
        })
        .collect();
    Ok(DirectionAtlas {
        levels,
        singular,
        nodes,
    })
}

/// Admissible tuple `Λ = (λ_1, …, λ_q̃)` with its half-width `υ_Λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleTuple {
    pub lambdas: Vec<C64>,
    pub upsilon: f64,
}

impl AdmissibleTuple {
    /// Validates `λ_k ∉ Ξ̃^k` and the nesting of the arcs `I_k(λ_k, 0)`, and
    /// picks `υ_Λ` as a quarter of the smallest angular clearance, so that
    /// the linear angle functions of [`build_aleph`] stay admissible.
    pub fn new(atlas: &DirectionAtlas, lambdas: Vec<C64>) -> Result<Self> {
        if lambdas.len() != atlas.levels.len() {
            return Err(Error::InvalidInput(
                "one direction per level is required".into(),
            ));
        }
        let mut clearance = FRAC_PI_4;
        for (k, (lam, set)) in lambdas.iter().zip(&atlas.singular).enumerate() {
            let d = set.distance(lam.arg());
            if d < 1e-9 {
                return Err(Error::InvalidInput(
                    "direction lies on a singular direction".into(),
                ));
            }
            clearance = clearance.min(d);
            if k + 1 < lambdas.len() {
                let ek = atlas.levels[k] as f64;
                let en = atlas.levels[k + 1] as f64;
                let off = angle_dist(lambdas[k + 1].arg(), lam.arg(), TAU);
                let slack = FRAC_PI_2 / ek - FRAC_PI_2 / en - off;
                if slack < -1e-12 {
                    return Err(Error::InvalidInput(
                        "arcs of consecutive levels are not nested".into(),
                    ));
                }
                if slack > 1e-12 {
                    clearance = clearance.min(slack);
                }
            }
        }
        Ok(AdmissibleTuple {
            lambdas,
            upsilon: clearance / 4.0,
        })
    }

    /// Arc `I_k(λ_k, υ)` as `(start, end)` angles.
    pub fn arc(&self, atlas: &DirectionAtlas, k: usize, upsilon: f64) -> (f64, f64) {
        let a = self.lambdas[k].arg();
        let h = FRAC_PI_2 / atlas.levels[k] as f64 + upsilon;
        (a - h, a + h)
    }
}

/// Angle functions `θ̃_j` on an arc of parameter directions, sampled
/// piecewise linearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiDirection {
    pub arc: (f64, f64),
    pub levels: Vec<u32>,
    /// Per level, `(arg λ', θ̃)` samples with increasing abscissae.
    pub samples: Vec<Vec<(f64, f64)>>,
}

impl MultiDirection {
    /// Constant `i` on every level.
    pub fn constant(levels: Vec<u32>, arc: (f64, f64)) -> Self {
        let samples = levels
            .iter()
            .map(|_| vec![(arc.0, FRAC_PI_2), (arc.1, FRAC_PI_2)])
            .collect();
        MultiDirection {
            arc,
            levels,
            samples,
        }
    }

    /// Brings `a` into the arc modulo `2π` if possible.
    fn unwrap_arg(&self, a: f64) -> Option<f64> {
        let shifted = self.arc.0 + wrap(a - self.arc.0, TAU);
        (shifted <= self.arc.1 + 1e-12).then_some(shifted.min(self.arc.1))
    }

    pub fn theta(&self, level_idx: usize, lambda_arg: f64) -> Option<f64> {
        let a = self.unwrap_arg(lambda_arg)?;
        let s = &self.samples[level_idx];
        let k = s.partition_point(|&(u, _)| u <= a).clamp(1, s.len() - 1);
        let (u0, t0) = s[k - 1];
        let (u1, t1) = s[k];
        let f = if u1 > u0 { (a - u0) / (u1 - u0) } else { 0.0 };
        Some(t0 + f * (t1 - t0))
    }

    /// `μ̃` for a level value, or `i` for levels outside the atlas.
    pub fn mu_for_level(&self, e: u32, lambda_arg: f64) -> Option<C64> {
        match self.levels.iter().position(|&l| l == e) {
            Some(k) => self.theta(k, lambda_arg).map(cis),
            None => self.unwrap_arg(lambda_arg).map(|_| I),
        }
    }
}

const SAMPLES_PER_LEVEL: usize = 65;

/// Stable multi-direction on `λ e^{i[−υ_Λ, υ_Λ]}` varying on levels `1..=k`
/// and frozen above.
///
/// Varying levels use `θ̃_j(a) = π/2 − s_j (a − arg λ_j)` with `s_j` just
/// below `ẽ_j`, which keeps `ẽ_j a + θ̃_j(a)` within a small drift of its
/// value at `λ_j`, hence off every unstable offset. Frozen levels take the
/// constant in `[π/4, 3π/4]` farthest from the offsets swept by the arc.
pub fn build_aleph(
    atlas: &DirectionAtlas,
    tuple: &AdmissibleTuple,
    lambda: C64,
    k: usize,
) -> Result<MultiDirection> {
    let q = atlas.levels.len();
    let ups = tuple.upsilon;
    let a = lambda.arg();
    let arc = (a - ups, a + ups);
    if q == 0 {
        return Ok(MultiDirection::constant(Vec::new(), arc));
    }
    if k > q {
        return Err(Error::InvalidInput("level index out of range".into()));
    }
    if k > 0 {
        let (s, e) = tuple.arc(atlas, k - 1, ups);
        let aa = s + wrap(a - s, TAU);
        if aa > e + 1e-12 {
            return Err(Error::InvalidInput(
                "base direction outside I_k(λ_k, υ_Λ)".into(),
            ));
        }
    }
    let mut samples = Vec::with_capacity(q);
    for j in 0..q {
        let e = atlas.levels[j] as f64;
        let grid = (0..SAMPLES_PER_LEVEL)
            .map(|i| arc.0 + (arc.1 - arc.0) * i as f64 / (SAMPLES_PER_LEVEL - 1) as f64);
        if j < k {
            let aj = tuple.lambdas[j].arg();
            let half = FRAC_PI_2 / e + 2.0 * ups;
            let slope = FRAC_PI_2 / half * (1.0 - 1e-3);
            let lane: Vec<(f64, f64)> = grid
                .map(|u| {
                    let d = crate::num::wrap_pi(u - aj);
                    (u, FRAC_PI_2 - slope * d)
                })
                .collect();
            samples.push(lane);
        } else {
            let c = frozen_constant(atlas, atlas.levels[j], arc)?;
            samples.push(grid.map(|u| (u, c)).collect());
        }
    }
    Ok(MultiDirection {
        arc,
        levels: atlas.levels.clone(),
        samples,
    })
}

fn frozen_constant(atlas: &DirectionAtlas, level: u32, arc: (f64, f64)) -> Result<f64> {
    let e = level as f64;
    let clearance = |c: f64| {
        atlas
            .curves_at(level)
            .map(|cv| {
                // distance of θ_c − c from the swept interval e·[a0, a1] mod π
                let target = wrap(cv.offset - c - e * arc.0, PI);
                let width = e * (arc.1 - arc.0);
                if target <= width {
                    0.0
                } else {
                    (target - width).min(PI - target)
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    let (best, gap) = (0..=2000)
        .map(|i| FRAC_PI_4 + FRAC_PI_2 * i as f64 / 2000.0)
        .map(|c| (c, clearance(c)))
        .fold(
            (FRAC_PI_2, -1.0),
            |acc, cur| if cur.1 > acc.1 { cur } else { acc },
        );
    if gap <= 1e-9 {
        return Err(Error::InvalidInput(
            "no admissible frozen direction on this arc".into(),
        ));
    }
    Ok(best)
}

/// Smooth cutoff equal to 1 up to 1.25 and 0 from 1.75.
pub fn cutoff(s: f64) -> f64 {
    if s <= 1.25 {
        1.0
    } else if s >= 1.75 {
        0.0
    } else {
        let t = (s - 1.25) / 0.5;
        1.0 - t * t * (3.0 - 2.0 * t)
    }
}

/// Value of the multi-direction attached to a node: `i` on the root
/// exterior, the level's `μ̃` on compact-like nodes, and the enclosing
/// compact-like value on the exteriors below them.
fn base_value(aleph: &MultiDirection, node: &SplitNode, lambda_arg: f64) -> Option<C64> {
    if node.kind == NodeKind::Exterior && node.beta.len() == 1 {
        return aleph.unwrap_arg(lambda_arg).map(|_| I);
    }
    // exteriors below a compact-like node share its exponent, hence its level
    aleph.mu_for_level(node.e, lambda_arg)
}

/// The interpolated direction `ℵ*` at `(x, y)`.
pub fn aleph_star(aleph: &MultiDirection, tree: &SplittingTree, x: C64, y: C64) -> Result<C64> {
    let loc = locate(tree, x, y)?;
    let node = loc.node;
    let la = x.arg();
    let outside = || Error::InvalidInput("arg x outside the arc of the multi-direction".into());
    let base = base_value(aleph, node, la).ok_or_else(outside)?;
    if node.kind == NodeKind::CompactLike || node.is_terminal() || x.norm() == 0.0 {
        return Ok(base);
    }
    let inner = aleph
        .mu_for_level(node.children[0].e, la)
        .ok_or_else(outside)?;
    let s = loc.t.norm() / (node.radii.rho * x.norm());
    let dtheta = (inner / base).arg();
    Ok(base * cis(dtheta * cutoff(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FixedCurveSet, Var};
    use crate::num::{ONE, ZERO};
    use crate::splitting::{build_splitting, RadiiConfig, VectorFieldUnfolding};

    fn p(c: &[C64]) -> ComplexPoly {
        ComplexPoly::new(c.to_vec(), Var::W)
    }

    fn two_lines() -> SplittingTree {
        let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 1), (&[ZERO, ONE], 1)]).unwrap();
        let f = VectorFieldUnfolding::with_constant_unit(ONE, curves).unwrap();
        build_splitting(
            &f,
            RadiiConfig {
                delta: 0.05,
                epsilon: 0.5,
            },
        )
        .unwrap()
    }

    #[test]
    fn stability_examples() {
        assert!(in_x_infinity(&p(&[ZERO, ZERO, ONE]), STABILITY_TOL).unwrap());
        assert!(in_x_infinity(&p(&[ZERO, -ONE, ONE]), STABILITY_TOL).unwrap());
        assert!(!in_x_infinity(&p(&[ZERO, -I, I]), STABILITY_TOL).unwrap());
    }

    #[test]
    fn offsets_of_w_w_minus_1() {
        let tree = two_lines();
        let c = unstable_curves(tree.compact_nodes()[0]).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0].offset - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(c[0].level, 1);
    }

    #[test]
    fn double_point_has_no_unstable_curve() {
        let prof = residue_profile(&p(&[ZERO, ZERO, ONE])).unwrap();
        assert!(prof.subset_sums.is_empty());
    }

    #[test]
    fn scaling_rotates_offsets() {
        let base = residue_profile(&p(&[ZERO, -ONE, ONE])).unwrap();
        let c = cis(0.7);
        let scaled = residue_profile(&p(&[ZERO, -c, c])).unwrap();
        for (a, b) in base.subset_sums.iter().zip(&scaled.subset_sums) {
            assert!(angle_dist(b.arg(), a.arg() - 0.7, TAU) < 1e-12);
        }
    }

    #[test]
    fn atlas_of_two_lines() {
        let atlas = direction_atlas(&two_lines()).unwrap();
        assert_eq!(atlas.levels, vec![1]);
        let angles = atlas.singular[0].angles();
        assert_eq!(angles.len(), 2);
        assert!(angles[0].abs() < 1e-12 && (angles[1] - PI).abs() < 1e-12);
    }

    #[test]
    fn empty_atlas_gives_constant_i() {
        let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 2)]).unwrap();
        let f = VectorFieldUnfolding::with_constant_unit(ONE, curves).unwrap();
        let tree = build_splitting(&f, RadiiConfig::default()).unwrap();
        let atlas = direction_atlas(&tree).unwrap();
        assert!(atlas.levels.is_empty());
        let t = AdmissibleTuple::new(&atlas, Vec::new()).unwrap();
        let m = build_aleph(&atlas, &t, ONE, 0).unwrap();
        let v = aleph_star(&m, &tree, C64::new(0.0, 0.0), C64::new(0.1, 0.0)).unwrap();
        assert_eq!(v, I);
    }

    #[test]
    fn linear_angle_function_avoids_the_offset() {
        let tree = two_lines();
        let atlas = direction_atlas(&tree).unwrap();
        let lam = cis(FRAC_PI_4);
        let t = AdmissibleTuple::new(&atlas, vec![lam]).unwrap();
        let m = build_aleph(&atlas, &t, lam, 1).unwrap();
        assert!((m.theta(0, FRAC_PI_4).unwrap() - FRAC_PI_2).abs() < 1e-12);
        let curve = atlas.nodes[0].curves[0];
        for i in 0..=1000 {
            let a = m.arc.0 + (m.arc.1 - m.arc.0) * i as f64 / 1000.0;
            let th = m.theta(0, a).unwrap();
            assert!(th > 0.0 && th < PI);
            assert!(curve.distance(a, th) > 1e-3);
        }
        let t0 = m.theta(0, m.arc.0).unwrap();
        let t1 = m.theta(0, m.arc.1).unwrap();
        assert!(t0 > t1);
    }

    #[test]
    fn singular_direction_is_not_admissible() {
        let atlas = direction_atlas(&two_lines()).unwrap();
        assert!(AdmissibleTuple::new(&atlas, vec![ONE]).is_err());
    }

    #[test]
    fn cutoff_ends() {
        assert_eq!(cutoff(1.0), 1.0);
        assert_eq!(cutoff(1.25), 1.0);
        assert_eq!(cutoff(2.0), 0.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn aleph_star_on_the_collar() {
        let tree = two_lines();
        let atlas = direction_atlas(&tree).unwrap();
        let lam = cis(FRAC_PI_4);
        let t = AdmissibleTuple::new(&atlas, vec![lam]).unwrap();
        let m = build_aleph(&atlas, &t, lam, 1).unwrap();
        let x = lam * 0.01;
        let rho = tree.root.radii.rho;
        let mu_c = m.mu_for_level(1, FRAC_PI_4).unwrap();
        let at_glass = aleph_star(&m, &tree, x, x * rho * 1.0001).unwrap();
        assert!((at_glass - mu_c).norm() < 1e-12);
        let far = aleph_star(&m, &tree, x, x * rho * 2.0).unwrap();
        assert!((far - I).norm() < 1e-15);
        let mid = aleph_star(&m, &tree, x, x * rho * 1.5).unwrap();
        assert!(mid.im > 0.0);
    }
}
