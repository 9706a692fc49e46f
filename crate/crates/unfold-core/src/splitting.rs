//! Recursive dynamical splitting of an unfolding of vector fields.
//!
//! A node's seed `|t| ≤ η` is cut by the substitution `t = x w` into an
//! exterior annulus `ρ|x| ≤ |t| ≤ η`, a compact-like set `|w| ≤ ρ` minus
//! small disks around the distinct slopes, and one child seed per slope in
//! the coordinate `t' = w − ζ`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::algebra::{BiSeries, ComplexPoly, FixedCurve, FixedCurveSet, Var};
use crate::error::{Error, Result};
use crate::num::{cpowi, C64, ONE, ZERO};

/// Working truncation order for units; inputs are polynomial so this only
/// has to exceed their degree after the substitutions.
const UNIT_ORDER: u32 = 48;
/// Two slopes closer than this are the same label.
pub const SLOPE_TOL: f64 = 1e-10;

/// `X = x^e · u(x, t) · Π (t − γ_j(x))^{s_j} ∂/∂t` with all `γ_j(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFieldUnfolding {
    pub unit: BiSeries,
    pub curves: FixedCurveSet,
    pub x_exponent: u32,
}

impl VectorFieldUnfolding {
    pub fn new(unit: BiSeries, curves: FixedCurveSet, x_exponent: u32) -> Result<Self> {
        if unit.get(0, 0).norm() < 1e-14 {
            return Err(Error::InvalidInput(
                "unit must not vanish at the origin".into(),
            ));
        }
        Ok(VectorFieldUnfolding {
            unit,
            curves,
            x_exponent,
        })
    }

    /// Field with constant unit `c`.
    pub fn with_constant_unit(c: C64, curves: FixedCurveSet) -> Result<Self> {
        Self::new(BiSeries::constant(c, UNIT_ORDER), curves, 0)
    }

    /// `ν = Σ s_j − 1`.
    pub fn nu(&self) -> u32 {
        self.curves.nu()
    }

    /// Value of the coefficient of `∂/∂t` at `(x, t)`.
    pub fn eval(&self, x: C64, t: C64) -> C64 {
        cpowi(x, self.x_exponent) * self.unit.eval(x, t) * self.curves.eval(x, t)
    }

    /// The coefficient as a polynomial in `t` at fixed `x`.
    pub fn poly_at(&self, x: C64) -> ComplexPoly {
        let mut p = self.unit.at_x(x).scale(cpowi(x, self.x_exponent));
        for (g, m) in self.curves.points_at(x) {
            let lin = ComplexPoly::new(vec![-g, ONE], Var::Y);
            for _ in 0..m {
                p = &p * &lin;
            }
        }
        p
    }

    /// The coefficient as a series, `x^e u F`.
    pub fn series(&self, order: u32) -> BiSeries {
        let xe = BiSeries::from_terms(order, [((self.x_exponent, 0), ONE)]);
        &(&xe * &self.unit.truncate(order)) * &self.curves.product(order)
    }
}

/// Field carried by a node in its adapted coordinate. Factors of
/// compact-like nodes need not pass through the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptedField {
    pub x_exponent: u32,
    pub unit: BiSeries,
    pub factors: Vec<FixedCurve>,
}

impl AdaptedField {
    pub fn eval(&self, x: C64, t: C64) -> C64 {
        self.factors.iter().fold(
            cpowi(x, self.x_exponent) * self.unit.eval(x, t),
            |acc, f| acc * cpowi(t - f.gamma.eval(x), f.multiplicity),
        )
    }

    pub fn unit_at_origin(&self) -> C64 {
        self.unit.get(0, 0)
    }

    /// `Σ s_j − 1`.
    pub fn nu(&self) -> u32 {
        self.factors.iter().map(|f| f.multiplicity).sum::<u32>() - 1
    }
}

/// Affine chart `t = (y − shift(x)) / x^power` of a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptedCoord {
    pub shift: ComplexPoly,
    pub power: u32,
}

impl AdaptedCoord {
    pub fn to_local(&self, x: C64, y: C64) -> C64 {
        (y - self.shift.eval(x)) / cpowi(x, self.power)
    }

    pub fn to_y(&self, x: C64, t: C64) -> C64 {
        self.shift.eval(x) + cpowi(x, self.power) * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// Exterior set of a seed; terminal when it carries a single fixed curve.
    Exterior,
    CompactLike,
}

/// Radii of a node, each in the node's own coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRadii {
    /// Seed radius `η` (exterior nodes).
    pub eta: f64,
    /// Magnifying-glass radius `ρ` (non-terminal exterior and compact-like nodes).
    pub rho: f64,
    /// Child seed radii `η_{β,ζ}`, one per slope (compact-like nodes).
    pub child_eta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitNode {
    pub beta: Vec<C64>,
    pub kind: NodeKind,
    pub field: AdaptedField,
    pub coord: AdaptedCoord,
    /// Exterior exponent `e`.
    pub e: u32,
    /// Interior exponent `ι`.
    pub iota: u32,
    pub nu: u32,
    pub radii: NodeRadii,
    pub children: Vec<SplitNode>,
    /// `v(0,0) Π (w − ζ)^{s}` at `λ = 1` (compact-like nodes).
    pub poly_field: Option<ComplexPoly>,
}

impl SplitNode {
    pub fn is_terminal(&self) -> bool {
        self.kind == NodeKind::Exterior && self.children.is_empty()
    }

    /// Distinct slopes of a compact-like node with grouped multiplicities.
    pub fn slopes(&self) -> Vec<(C64, u32)> {
        group_slopes(&self.field.factors)
    }
}

/// Radii controlling the splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiiConfig {
    /// Parameter radius `δ`.
    pub delta: f64,
    /// Root seed radius `ε`.
    pub epsilon: f64,
}

impl Default for RadiiConfig {
    fn default() -> Self {
        RadiiConfig {
            delta: 0.1,
            epsilon: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingTree {
    pub root: SplitNode,
    pub nu0: u32,
    pub radii: RadiiConfig,
}

/// Result of [`locate`].
#[derive(Debug, Clone, Copy)]
pub struct Located<'a> {
    pub node: &'a SplitNode,
    /// Adapted coordinate `t` (or `w` on compact-like nodes).
    pub t: C64,
}

impl SplittingTree {
    /// All nodes in depth-first order.
    pub fn nodes(&self) -> Vec<&SplitNode> {
        fn walk<'a>(n: &'a SplitNode, out: &mut Vec<&'a SplitNode>) {
            out.push(n);
            for c in &n.children {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    /// Compact-like nodes `C_1, …, C_q` in depth-first order.
    pub fn compact_nodes(&self) -> Vec<&SplitNode> {
        self.nodes()
            .into_iter()
            .filter(|n| n.kind == NodeKind::CompactLike)
            .collect()
    }
}

fn group_slopes(factors: &[FixedCurve]) -> Vec<(C64, u32)> {
    let mut out: Vec<(C64, u32)> = Vec::new();
    for f in factors {
        let z = f.gamma.coeff(0);
        match out.iter_mut().find(|(s, _)| (*s - z).norm() < SLOPE_TOL) {
            Some(entry) => entry.1 += f.multiplicity,
            None => out.push((z, f.multiplicity)),
        }
    }
    out
}

/// `u(x, x·(w + ζ))` as a series in `(x, w)`.
fn rescale_unit(u: &BiSeries, zeta: C64) -> BiSeries {
    let order = u.order();
    let mut out = BiSeries::zero(order);
    for ((i, j), c) in u.terms() {
        // x^i (x(w + ζ))^j = x^{i+j} Σ_k C(j,k) ζ^{j−k} w^k
        let mut binom = 1.0;
        for k in 0..=j {
            out.add_term((i + j, k), c * binom * cpowi(zeta, j - k));
            binom = binom * (j - k) as f64 / (k + 1) as f64;
        }
    }
    out
}

/// Sufficient test that `u` has no zero on the polydisk `|x| ≤ δ, |t| ≤ η`:
/// `Σ |c_{ij}| δ^i η^j` over non-constant terms stays below `|u(0,0)|`.
fn unit_nonvanishing(u: &BiSeries, delta: f64, eta: f64) -> bool {
    let tail: f64 = u
        .terms()
        .filter(|&(k, _)| k != (0, 0))
        .map(|((i, j), c)| {
            c.norm() * crate::num::powi(delta, i as i32) * crate::num::powi(eta, j as i32)
        })
        .sum();
    tail < u.get(0, 0).norm()
}

/// Builds the splitting tree of `field` under `radii`.
pub fn build_splitting(field: &VectorFieldUnfolding, radii: RadiiConfig) -> Result<SplittingTree> {
    if !(radii.delta > 0.0 && radii.epsilon > 0.0) {
        return Err(Error::InvalidInput("radii must be positive".into()));
    }
    let adapted = AdaptedField {
        x_exponent: field.x_exponent,
        unit: field.unit.truncate(UNIT_ORDER),
        factors: field.curves.curves().to_vec(),
    };
    let coord = AdaptedCoord {
        shift: ComplexPoly::zero(Var::X),
        power: 0,
    };
    if !unit_nonvanishing(&adapted.unit, radii.delta, radii.epsilon) {
        return Err(Error::RadiiTooLarge { depth: 0 });
    }
    let root = build_exterior(vec![ZERO], adapted, coord, radii.epsilon, radii.delta, 0)?;
    Ok(SplittingTree {
        nu0: root.nu,
        root,
        radii,
    })
}

fn build_exterior(
    beta: Vec<C64>,
    field: AdaptedField,
    coord: AdaptedCoord,
    eta: f64,
    delta: f64,
    depth: usize,
) -> Result<SplitNode> {
    let nu = field.nu();
    let e = field.x_exponent;
    if field.factors.len() == 1 {
        return Ok(SplitNode {
            beta,
            kind: NodeKind::Exterior,
            field,
            coord,
            e,
            iota: e,
            nu,
            radii: NodeRadii {
                eta,
                rho: 0.0,
                child_eta: Vec::new(),
            },
            children: Vec::new(),
            poly_field: None,
        });
    }

    // t = x w: t − γ_j(x) = x (w − γ_j(x)/x)
    let factors: Vec<FixedCurve> = field
        .factors
        .iter()
        .map(|f| FixedCurve {
            gamma: ComplexPoly::new(f.gamma.coeffs().iter().skip(1).copied().collect(), Var::X),
            multiplicity: f.multiplicity,
        })
        .collect();
    let ec = e + nu;
    let c_unit = rescale_unit(&field.unit, ZERO);
    let c_field = AdaptedField {
        x_exponent: ec,
        unit: c_unit.clone(),
        factors: factors.clone(),
    };
    let c_coord = AdaptedCoord {
        shift: coord.shift.clone(),
        power: coord.power + 1,
    };
    let slopes = group_slopes(&factors);
    let max_slope = slopes.iter().fold(0.0f64, |m, (s, _)| m.max(s.norm()));
    let rho = 4.0 * (max_slope + 1.0);
    let min_gap = slopes
        .iter()
        .enumerate()
        .flat_map(|(a, (sa, _))| {
            slopes[a + 1..]
                .iter()
                .map(move |(sb, _)| (*sa - *sb).norm())
        })
        .fold(f64::INFINITY, f64::min);
    let child_eta_value = if min_gap.is_finite() {
        0.25 * min_gap
    } else {
        crate::num::powi(0.5, depth as i32 + 1)
    };

    let poly_field = slopes.iter().fold(
        ComplexPoly::constant(c_unit.get(0, 0), Var::W),
        |acc, &(z, m)| {
            let lin = ComplexPoly::new(vec![-z, ONE], Var::W);
            (0..m).fold(acc, |a, _| &a * &lin)
        },
    );

    let mut children = Vec::with_capacity(slopes.len());
    for &(zeta, _) in &slopes {
        // unit of the child: u(x, x(t' + ζ)) Π_{other slopes} (t' + ζ − γ_k(x))^{s_k}
        let mut unit = rescale_unit(&field.unit, zeta);
        let mut own = Vec::new();
        for f in &factors {
            let shifted = &f.gamma - &ComplexPoly::constant(zeta, Var::X);
            if (f.gamma.coeff(0) - zeta).norm() < SLOPE_TOL {
                let mut c = shifted.coeffs().to_vec();
                if let Some(c0) = c.first_mut() {
                    *c0 = ZERO;
                }
                own.push(FixedCurve {
                    gamma: ComplexPoly::new(c, Var::X),
                    multiplicity: f.multiplicity,
                });
            } else {
                // the factor must stay away from zero on the child seed
                let tail: f64 = shifted
                    .coeffs()
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| c.norm() * crate::num::powi(delta, i as i32))
                    .sum();
                if shifted.coeff(0).norm() - tail <= child_eta_value {
                    return Err(Error::RadiiTooLarge { depth: depth + 1 });
                }
                let lin = &BiSeries::y(UNIT_ORDER) - &BiSeries::from_poly_x(&shifted, UNIT_ORDER);
                unit = &unit * &lin.pow(f.multiplicity);
            }
        }
        let mut child_beta = beta.clone();
        child_beta.push(zeta);
        let child_coord = AdaptedCoord {
            shift: &coord.shift + &shift_monomial(zeta, coord.power + 1),
            power: coord.power + 1,
        };
        let child_field = AdaptedField {
            x_exponent: ec,
            unit,
            factors: own,
        };
        children.push(build_exterior(
            child_beta,
            child_field,
            child_coord,
            child_eta_value,
            delta,
            depth + 1,
        )?);
    }

    let compact = SplitNode {
        beta: beta.clone(),
        kind: NodeKind::CompactLike,
        field: c_field,
        coord: c_coord,
        e: ec,
        iota: ec,
        nu,
        radii: NodeRadii {
            eta: 0.0,
            rho,
            child_eta: vec![child_eta_value; slopes.len()],
        },
        children,
        poly_field: Some(poly_field),
    };

    Ok(SplitNode {
        beta,
        kind: NodeKind::Exterior,
        field,
        coord,
        e,
        iota: ec,
        nu,
        radii: NodeRadii {
            eta,
            rho,
            child_eta: Vec::new(),
        },
        children: vec![compact],
        poly_field: None,
    })
}

fn shift_monomial(c: C64, power: u32) -> ComplexPoly {
    let mut v = vec![ZERO; power as usize + 1];
    v[power as usize] = c;
    ComplexPoly::new(v, Var::X)
}

/// `λ^{e} v(0,0) Π (w − ζ)^{s}` of a compact-like node.
pub fn polynomial_field(node: &SplitNode, lambda: C64) -> Result<ComplexPoly> {
    let p = node
        .poly_field
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("polynomial field of a non compact-like node".into()))?;
    Ok(p.scale(cpowi(lambda, node.e)))
}

/// The basic set containing `(x, y)` and the adapted coordinate there.
pub fn locate(tree: &SplittingTree, x: C64, y: C64) -> Result<Located<'_>> {
    if x.norm() >= tree.radii.delta || y.norm() > tree.radii.epsilon {
        return Err(Error::Unlocated { x, y });
    }
    let mut node = &tree.root;
    let mut t = y;
    loop {
        if node.is_terminal() || t.norm() >= node.radii.rho * x.norm() {
            return Ok(Located { node, t });
        }
        let compact = &node.children[0];
        let w = t / x;
        let hit = compact
            .children
            .iter()
            .zip(&compact.radii.child_eta)
            .find(|(c, &eta)| (w - *c.beta.last().unwrap()).norm() < eta);
        match hit {
            Some((child, _)) => {
                t = w - *child.beta.last().unwrap();
                node = child;
            }
            None => {
                return Ok(Located {
                    node: compact,
                    t: w,
                })
            }
        }
    }
}
