//! One function per subcommand. Each reads a validated problem, computes,
//! and writes its artifacts into the output directory.

use std::f64::consts::TAU;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use unfold_core::algebra::{roots, ComplexPoly, ALGEBRAIC_TOL};
use unfold_core::directions::{direction_atlas, in_x_infinity, unstable_curves, STABILITY_TOL};
use unfold_core::fatou::{
    infinitesimal_generator, k_normal_form, FatouConfig, FatouFiber, NormalForm, UnfoldingMap,
};
use unfold_core::flows::{
    detect_homoclinic, escape_radius, integrate, separatrices, FlowOptions, Homoclinic, Trajectory,
};
use unfold_core::invariants::{
    conjugacy_translation, fit_flatness, homogeneous, horn_maps, lavaurs_asymptotics,
    ray_differences, zeta, HornConfig, HornMap, Realization, ZetaValue,
};
use unfold_core::num::cis;
use unfold_core::splitting::{
    build_splitting, polynomial_field, NodeKind, NodeRadii, SplitNode, SplittingTree,
};
use unfold_core::{Error, C64};

use crate::error::CliError;
use crate::output::{sci, Csv, OutDir};
use crate::problem::ProblemFile;
use crate::selftest;

/// Geometric sequence of parameter radii `r0·q^m` along `arg x = angle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub r0: f64,
    pub q: f64,
    pub angle: f64,
}

impl Ray {
    pub fn radii(&self, n: usize) -> Vec<f64> {
        (0..n).map(|m| self.r0 * self.q.powi(m as i32)).collect()
    }

    pub fn direction(&self) -> C64 {
        cis(self.angle)
    }
}

impl std::str::FromStr for Ray {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("\"{t}\": {e}")))
            .collect::<Result<_, _>>()?;
        let [r0, q, angle] = parts[..] else {
            return Err("expected \"r0,q,angle\"".into());
        };
        if !(r0 > 0.0 && q > 0.0 && q < 1.0 && angle.is_finite()) {
            return Err("need r0 > 0 and 0 < q < 1".into());
        }
        Ok(Ray { r0, q, angle })
    }
}

/// Flag values shared by every command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub out: PathBuf,
    pub seed: u64,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub ray: Option<Ray>,
    pub petal: Option<usize>,
    pub levels: Option<Vec<f64>>,
    pub budget: Option<usize>,
}

impl Settings {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Settings {
            out: out.into(),
            seed: 0,
            tol: None,
            grid: None,
            ray: None,
            petal: None,
            levels: None,
            budget: None,
        }
    }

    fn grid_or(&self, default: usize) -> Result<usize, CliError> {
        match self.grid {
            Some(0) => Err(CliError::flag("grid", "must be positive")),
            Some(n) => Ok(n),
            None => Ok(default),
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn fatou_config(p: &ProblemFile, s: &Settings) -> FatouConfig {
    let mut config = FatouConfig::default();
    if let Some(k) = p.options.k {
        config.k = k;
    }
    if let Some(tol) = s.tol {
        config.tol = tol;
    }
    if let Some(b) = s.budget {
        config.budget = b;
    }
    config
}

fn horn_config(p: &ProblemFile, s: &Settings) -> HornConfig {
    let mut config = HornConfig {
        fatou: fatou_config(p, s),
        ..HornConfig::default()
    };
    if let Some(n) = p.options.samples {
        config.samples = n;
    }
    if let Some(m) = p.options.modes {
        config.modes = m;
    }
    config
}

fn option_x(p: &ProblemFile) -> C64 {
    p.options.x.map(C64::from).unwrap_or(c(0.02, 0.0))
}

fn option_lambda(p: &ProblemFile) -> C64 {
    p.options.lambda.map(C64::from).unwrap_or(c(1.0, 0.0))
}

fn option_mu(p: &ProblemFile) -> C64 {
    p.options.mu.map(C64::from).unwrap_or(c(1.0, 0.0))
}

fn tree(p: &ProblemFile, cmd: &'static str) -> Result<SplittingTree, CliError> {
    build_splitting(&p.field()?, p.radii()).map_err(CliError::numerical(cmd))
}

fn normal_form(
    map: &UnfoldingMap,
    config: &FatouConfig,
    cmd: &'static str,
) -> Result<NormalForm, CliError> {
    k_normal_form(map, config.k).map_err(CliError::numerical(cmd))
}

fn parts(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct NodeSummary {
    beta: Vec<C64>,
    kind: NodeKind,
    e: u32,
    iota: u32,
    nu: u32,
    terminal: bool,
    radii: NodeRadii,
    /// Coefficients at `λ = 1`, increasing powers of `w`.
    poly_field: Option<Vec<C64>>,
    children: Vec<NodeSummary>,
}

impl From<&SplitNode> for NodeSummary {
    fn from(n: &SplitNode) -> Self {
        NodeSummary {
            beta: n.beta.clone(),
            kind: n.kind,
            e: n.e,
            iota: n.iota,
            nu: n.nu,
            terminal: n.is_terminal(),
            radii: n.radii.clone(),
            poly_field: n.poly_field.as_ref().map(|p| p.coeffs().to_vec()),
            children: n.children.iter().map(NodeSummary::from).collect(),
        }
    }
}

pub fn split(p: &ProblemFile, s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let tree = tree(p, "split")?;
    #[derive(Serialize)]
    struct Out {
        nu0: u32,
        delta: f64,
        epsilon: f64,
        root: NodeSummary,
    }
    let out = OutDir::create(&s.out)?;
    let path = out.json(
        "split.json",
        &Out {
            nu0: tree.nu0,
            delta: tree.radii.delta,
            epsilon: tree.radii.epsilon,
            root: (&tree.root).into(),
        },
    )?;
    Ok(vec![path])
}

pub fn directions(p: &ProblemFile, s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let tree = tree(p, "directions")?;
    let atlas = direction_atlas(&tree).map_err(CliError::numerical("directions"))?;
    #[derive(Serialize)]
    struct Level {
        level: u32,
        offsets: Vec<f64>,
        /// Singular directions `arg λ` in `[0, 2π)`.
        angles: Vec<f64>,
    }
    #[derive(Serialize)]
    struct Node {
        beta: Vec<C64>,
        level: u32,
        unstable_offsets: Vec<f64>,
    }
    #[derive(Serialize)]
    struct Out {
        levels: Vec<u32>,
        singular: Vec<Level>,
        nodes: Vec<Node>,
    }
    let doc = Out {
        levels: atlas.levels.clone(),
        singular: atlas
            .singular
            .iter()
            .map(|set| Level {
                level: set.level,
                offsets: set.offsets.clone(),
                angles: set.angles(),
            })
            .collect(),
        nodes: atlas
            .nodes
            .iter()
            .map(|n| Node {
                beta: n.beta.clone(),
                level: n.level,
                unstable_offsets: n.curves.iter().map(|u| u.offset).collect(),
            })
            .collect(),
    };
    Ok(vec![OutDir::create(&s.out)?.json("directions.json", &doc)?])
}

/// Polynomial fields of the compact-like nodes at `λ`.
fn compact_fields(
    tree: &SplittingTree,
    lambda: C64,
) -> Result<Vec<(&SplitNode, ComplexPoly)>, Error> {
    tree.compact_nodes()
        .into_iter()
        .map(|n| Ok((n, polynomial_field(n, lambda)?)))
        .collect()
}

fn homoclinic_tag(h: &Homoclinic) -> &'static str {
    match h {
        Homoclinic::Found { .. } => "found",
        Homoclinic::NotFound => "not_found",
        Homoclinic::Indeterminate => "indeterminate",
    }
}

pub fn portrait(p: &ProblemFile, s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let num = || CliError::numerical("portrait");
    let tree = tree(p, "portrait")?;
    let (lambda, mu) = (option_lambda(p), option_mu(p));
    let fields = compact_fields(&tree, lambda).map_err(num())?;
    let n_grid = s.grid_or(8)?;
    let budget = s.budget.unwrap_or(200_000);
    let out = OutDir::create(&s.out)?;
    let mut written = Vec::new();

    #[derive(Serialize)]
    struct Curve {
        kind: &'static str,
        angle: Option<f64>,
        start: C64,
        termination: String,
        end: C64,
        samples: usize,
    }
    #[derive(Serialize)]
    struct Panel {
        beta: Vec<C64>,
        poly: Vec<C64>,
        singular_points: Vec<C64>,
        escape_radius: f64,
        homoclinic: &'static str,
        trajectories: Vec<Curve>,
    }
    #[derive(Serialize)]
    struct Out {
        lambda: C64,
        mu: C64,
        nodes: Vec<Panel>,
    }
    let mut panels = Vec::new();
    for (k, (node, poly)) in fields.iter().enumerate() {
        let r = escape_radius(poly).map_err(num())?;
        let fan = separatrices(poly, mu, r, budget).map_err(num())?;
        let sing: Vec<C64> = roots(poly, ALGEBRAIC_TOL)
            .map_err(num())?
            .iter()
            .map(|z| z.value)
            .collect();
        let homoclinic =
            detect_homoclinic(poly, mu, r, s.tol.unwrap_or(1e-3), Some(budget)).map_err(num())?;

        let mut curves: Vec<(Curve, Trajectory)> = fan
            .directions
            .into_iter()
            .map(|sep| {
                let curve = Curve {
                    kind: match sep.tag {
                        unfold_core::flows::SeparatrixTag::Outbound => "outbound",
                        unfold_core::flows::SeparatrixTag::Inbound => "inbound",
                    },
                    angle: Some(sep.angle),
                    start: sep
                        .trajectory
                        .samples
                        .first()
                        .map(|s| s.1)
                        .unwrap_or_default(),
                    termination: format!("{:?}", sep.trajectory.termination),
                    end: sep.trajectory.end(),
                    samples: sep.trajectory.samples.len(),
                };
                (curve, sep.trajectory)
            })
            .collect();
        // a ring of ordinary trajectories around the singular points, both time directions
        let ring = 0.5 * r / 10.0;
        let grid: Vec<(Curve, Trajectory)> = (0..n_grid)
            .into_par_iter()
            .flat_map_iter(|m| {
                let start = cis(TAU * (m as f64 + 0.5) / n_grid as f64) * ring;
                [false, true]
                    .into_iter()
                    .map(move |backward| (start, backward))
            })
            .map(|(start, backward)| {
                let opts = FlowOptions {
                    escape_radius: Some(r),
                    backward,
                    max_steps: budget,
                    max_arclength: 2.0 * r,
                    ..FlowOptions::default().with_singular(sing.clone())
                };
                let t = integrate(|w| Some(mu * poly.eval(w)), start, &opts);
                let curve = Curve {
                    kind: if backward { "backward" } else { "forward" },
                    angle: None,
                    start,
                    termination: format!("{:?}", t.termination),
                    end: t.end(),
                    samples: t.samples.len(),
                };
                (curve, t)
            })
            .collect();
        curves.extend(grid);

        let mut csv = Csv::new(&["trajectory", "kind", "s", "re_w", "im_w"]);
        for (idx, (curve, t)) in curves.iter().enumerate() {
            for &(time, w) in thin(&t.samples) {
                csv.row(&[
                    idx.into(),
                    curve.kind.into(),
                    time.into(),
                    w.re.into(),
                    w.im.into(),
                ]);
            }
        }
        written.push(out.csv(&format!("portrait_{k}.csv"), csv)?);
        let svg = render_svg(&curves, &sing, r / 10.0);
        written.push(out.write(&format!("portrait_{k}.svg"), svg.as_bytes())?);
        panels.push(Panel {
            beta: node.beta.clone(),
            poly: poly.coeffs().to_vec(),
            singular_points: sing,
            escape_radius: r,
            homoclinic: homoclinic_tag(&homoclinic),
            trajectories: curves.into_iter().map(|c| c.0).collect(),
        });
    }
    written.push(out.json(
        "portrait.json",
        &Out {
            lambda,
            mu,
            nodes: panels,
        },
    )?);
    Ok(written)
}

/// Most samples kept per trajectory in portrait artifacts.
const MAX_SAMPLES: usize = 2000;

fn stride(len: usize) -> usize {
    len.div_ceil(MAX_SAMPLES).max(1)
}

/// Every `stride`-th sample plus the last one.
fn thin(samples: &[(f64, C64)]) -> impl Iterator<Item = &(f64, C64)> {
    let k = stride(samples.len());
    samples
        .iter()
        .enumerate()
        .filter(move |(m, _)| m % k == 0 || *m + 1 == samples.len())
        .map(|(_, s)| s)
}

/// Phase portrait in world coordinates on `[−half, half]²`.
fn render_svg(curves: &[(impl Serialize, Trajectory)], singular: &[C64], half: f64) -> String {
    let mut svg = String::new();
    let w = 2.0 * half;
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"{} {} {} {}\">\n",
        sci(-half),
        sci(-half),
        sci(w),
        sci(w)
    ));
    svg.push_str("<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"1\" vector-effect=\"non-scaling-stroke\">\n");
    let limit = 4.0 * half;
    for (_, t) in curves {
        let pts: Vec<String> = t
            .samples
            .iter()
            .filter(|s| s.1.norm() <= limit)
            .step_by(stride(t.samples.len()))
            .map(|s| format!("{},{}", sci(s.1.re), sci(s.1.im)))
            .collect();
        if pts.len() >= 2 {
            svg.push_str(&format!(
                "<polyline stroke=\"#1f4e79\" vector-effect=\"non-scaling-stroke\" points=\"{}\"/>\n",
                pts.join(" ")
            ));
        }
    }
    let dot = w / 150.0;
    for z in singular {
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#b22222\"/>\n",
            sci(z.re),
            sci(z.im),
            sci(dot)
        ));
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

pub fn stability_sweep(p: &ProblemFile, s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let tree = tree(p, "stability-sweep")?;
    let lambda = option_lambda(p);
    let fields = compact_fields(&tree, lambda).map_err(CliError::numerical("stability-sweep"))?;
    let n = s.grid_or(64)?;
    let tol = s.tol.unwrap_or(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut csv = Csv::new(&[
        "node",
        "mu_angle",
        "distance_to_unstable",
        "in_x_infinity",
        "homoclinic",
    ]);
    for (k, (node, poly)) in fields.iter().enumerate() {
        let angles: Vec<f64> = (0..n)
            .map(|m| TAU * (m as f64 + rng.gen::<f64>()) / n as f64)
            .collect();
        let curves = unstable_curves(node).map_err(CliError::numerical("stability-sweep"))?;
        let r = escape_radius(poly).map_err(CliError::numerical("stability-sweep"))?;
        let rows = angles
            .par_iter()
            .map(|&a| -> Result<(f64, f64, bool, &'static str), Error> {
                let mu = cis(a);
                let stable = in_x_infinity(&poly.scale(mu), STABILITY_TOL)?;
                let h = detect_homoclinic(poly, mu, r, tol, s.budget)?;
                let d = curves
                    .iter()
                    .map(|u| u.distance(lambda.arg(), a))
                    .fold(f64::INFINITY, f64::min);
                Ok((a, d, stable, homoclinic_tag(&h)))
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(CliError::numerical("stability-sweep"))?;
        for (a, d, stable, tag) in rows {
            csv.row(&[
                k.into(),
                a.into(),
                d.into(),
                (stable as usize).into(),
                tag.into(),
            ]);
        }
    }
    Ok(vec![OutDir::create(&s.out)?.csv("stability.csv", csv)?])
}

/// Polar grid around the petal anchor: radii `(0.2..0.9)|anchor|`, angles
/// `arg anchor ± 0.4`.
fn petal_grid(anchor: C64, n: usize) -> Vec<C64> {
    let t = |m: usize| {
        if n == 1 {
            0.5
        } else {
            m as f64 / (n - 1) as f64
        }
    };
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| cis(anchor.arg() + 0.8 * (t(b) - 0.5)) * (anchor.norm() * (0.2 + 0.7 * t(a))))
        .collect()
}

/// Grid points whose orbit leaves the petal or runs into a singular point of
/// the normal form are reported as skipped, not as failures.
fn outside_petal(e: &Error) -> bool {
    matches!(
        e,
        Error::OrbitEscaped { .. } | Error::BudgetExhausted { .. } | Error::NearSingular { .. }
    )
}

struct FiberSetup {
    map: UnfoldingMap,
    nf: NormalForm,
    config: FatouConfig,
    fiber: FatouFiber,
    petal: usize,
}

fn fiber_setup(p: &ProblemFile, s: &Settings, cmd: &'static str) -> Result<FiberSetup, CliError> {
    let map = p.map()?;
    let config = fatou_config(p, s);
    let nf = normal_form(&map, &config, cmd)?;
    let fiber =
        FatouFiber::new(&map, &nf, option_x(p), config).map_err(CliError::numerical(cmd))?;
    let petal = s.petal.unwrap_or(0);
    if petal >= fiber.petals().len() {
        return Err(CliError::flag(
            "petal",
            format!("{} petals available", fiber.petals().len()),
        ));
    }
    Ok(FiberSetup {
        map,
        nf,
        config,
        fiber,
        petal,
    })
}

#[derive(Serialize)]
struct GridMeta {
    x: C64,
    petal: usize,
    anchor: C64,
    orientation: i32,
    points: usize,
    skipped: usize,
}

pub fn fatou(p: &ProblemFile, s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let setup = fiber_setup(p, s, "fatou")?;
    let (fiber, j) = (&setup.fiber, setup.petal);
    let petal = *fiber.petal(j).map_err(CliError::numerical("fatou"))?;
    let ys = petal_grid(petal.anchor, s.grid_or(8)?);
    let rows = ys
        .par_iter()
        .map(|&y| -> Result<Option<(C64, C64, f64)>, Error> {
            let value = |y| match fiber.psi(j, y) {
                Ok(v) => Ok(Some(v.value)),
                Err(e) if outside_petal(&e) => Ok(None),
                Err(e) => Err(e),
            };
            let (Some(v), Some(next)) = (value(y)?, value(fiber.map().apply(y)?)?) else {
                return Ok(None);
            };
            Ok(Some((y, v, (next - v - 1.0).norm())))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::numerical("fatou"))?;
    let mut csv = Csv::new(&["re_y", "im_y", "re_psi", "im_psi", "abel_residual"]);
    for (y, v, res) in rows.iter().flatten() {
        csv.row(&[
            y.re.into(),
            y.im.into(),
            v.re.into(),
            v.im.into(),
            (*res).into(),
        ]);
    }
    let meta = GridMeta {
        x: fiber.x(),
        petal: j,
        anchor: petal.anchor,
        orientation: petal.orientation,
        points: ys.len(),
        skipped: rows.iter().filter(|r| r.is_none()).count(),
    };
    let out = OutDir::create(&s.out)?;
    Ok(vec![
        out.csv("fatou.csv", csv)?,
        out.json("fatou.json", &meta)?,
    ])
}

pub fn lavaurs(p: &ProblemFile, s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let setup = fiber_setup(p, s, "lavaurs")?;
    let (fiber, j) = (&setup.fiber, setup.petal);
    let petal = *fiber.petal(j).map_err(CliError::numerical("lavaurs"))?;
    let ys = petal_grid(petal.anchor, s.grid_or(8)?);
    let rows = ys
        .par_iter()
        .map(|&y| match fiber.lavaurs(j, y) {
            Ok(g) => Ok(Some((y, g))),
            Err(e) if outside_petal(&e) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::numerical("lavaurs"))?;
    let mut csv = Csv::new(&["re_y", "im_y", "re_g", "im_g"]);
    for (y, g) in rows.iter().flatten() {
        csv.row(&[y.re.into(), y.im.into(), g.re.into(), g.im.into()]);
    }
    let meta = GridMeta {
        x: fiber.x(),
        petal: j,
        anchor: petal.anchor,
        orientation: petal.orientation,
        points: ys.len(),
        skipped: rows.iter().filter(|r| r.is_none()).count(),
    };
    let out = OutDir::create(&s.out)?;
    let mut written = vec![
        out.csv("lavaurs.csv", csv)?,
        out.json("lavaurs.json", &meta)?,
    ];

    // along a ray: x⁰ and x¹ coefficients against the formal generator
    if let Some(ray) = s.ray {
        let num = || CliError::numerical("lavaurs");
        let radii = ray.radii(6);
        let pts: Vec<C64> = ys.iter().step_by(3).copied().collect();
        let coeffs = lavaurs_asymptotics(
            &setup.map,
            &setup.nf,
            j,
            ray.direction(),
            &radii,
            &pts,
            setup.config,
        )
        .map_err(num())?;
        let g = infinitesimal_generator(&setup.map).map_err(num())?;
        let (g0, g1) = (g.x_coeff(0), g.x_coeff(1));
        let mut csv = Csv::new(&[
            "re_y", "im_y", "re_g0", "im_g0", "re_g1", "im_g1", "re_gen0", "im_gen0", "re_gen1",
            "im_gen1",
        ]);
        for co in &coeffs {
            let (a, b) = (g0.eval(co.y), g1.eval(co.y));
            csv.row(&[
                co.y.re.into(),
                co.y.im.into(),
                co.g0.re.into(),
                co.g0.im.into(),
                co.g1.re.into(),
                co.g1.im.into(),
                a.re.into(),
                a.im.into(),
                b.re.into(),
                b.im.into(),
            ]);
        }
        written.push(out.csv("lavaurs_asymptotics.csv", csv)?);
    }
    Ok(written)
}

#[derive(Serialize)]
struct HornOut {
    x: C64,
    zeta: ZetaValue,
    /// `a[j][l]`, `l = 0..=modes`, of the ψ̈-normalized horn maps.
    a: Vec<Vec<[f64; 2]>>,
    /// The same after re-basing to the homogeneous system.
    homogeneous_a: Vec<Vec<[f64; 2]>>,
    residuals: HornResiduals,
    maps: Vec<HornMapMeta>,
}

#[derive(Serialize)]
struct HornResiduals {
    zeta_discrepancy: f64,
    periodicity: Vec<f64>,
    uncertainty: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct HornMapMeta {
    petal: usize,
    upsilon: i32,
    height: f64,
    noise_floor: f64,
    reliable: Vec<bool>,
}

fn coeff_table(maps: &[HornMap]) -> Vec<Vec<[f64; 2]>> {
    maps.iter()
        .map(|m| m.coeffs.iter().map(|c| parts(c.value)).collect())
        .collect()
}

fn horn_for(
    map: &UnfoldingMap,
    x: C64,
    config: &HornConfig,
    cmd: &'static str,
) -> Result<(ZetaValue, Vec<HornMap>), CliError> {
    let nf = normal_form(map, &config.fatou, cmd)?;
    let fiber = FatouFiber::new(map, &nf, x, config.fatou).map_err(CliError::numerical(cmd))?;
    let maps = horn_maps(&fiber, config).map_err(CliError::numerical(cmd))?;
    Ok((zeta(&fiber, Some(&maps)), maps))
}

pub fn horn(p: &ProblemFile, s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let config = horn_config(p, s);
    let x = option_x(p);
    let (z, maps) = horn_for(&p.map()?, x, &config, "horn")?;
    let hom = homogeneous(&maps, z.residue_formula);
    let doc = HornOut {
        x,
        zeta: z,
        a: coeff_table(&maps),
        homogeneous_a: coeff_table(&hom),
        residuals: HornResiduals {
            zeta_discrepancy: z.discrepancy,
            periodicity: maps.iter().map(|m| m.periodicity_residual).collect(),
            uncertainty: maps
                .iter()
                .map(|m| m.coeffs.iter().map(|c| c.uncertainty).collect())
                .collect(),
        },
        maps: maps
            .iter()
            .map(|m| HornMapMeta {
                petal: m.petal,
                upsilon: m.upsilon,
                height: m.height,
                noise_floor: m.noise_floor,
                reliable: m.coeffs.iter().map(|c| c.reliable).collect(),
            })
            .collect(),
    };
    Ok(vec![OutDir::create(&s.out)?.json("horn.json", &doc)?])
}

pub fn flatness(p: &ProblemFile, s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let num = || CliError::numerical("flatness");
    let map = p.map()?;
    let config = fatou_config(p, s);
    let nf = normal_form(&map, &config, "flatness")?;
    let ray = s.ray.unwrap_or(Ray {
        r0: 0.2,
        q: 0.1f64.powf(1.0 / 7.0),
        angle: 0.0,
    });
    let radii = ray.radii(s.grid_or(8)?);
    let petal = match s.petal {
        Some(j) => j,
        None => {
            let probe =
                FatouFiber::new(&map, &nf, ray.direction() * radii[0], config).map_err(num())?;
            probe
                .petals()
                .iter()
                .find(|q| q.orientation == 1)
                .map(|q| q.index)
                .unwrap_or(0)
        }
    };
    let w = p.options.w.map(C64::from).unwrap_or(c(2.0, 0.5));
    let nu = map.nu() as f64;
    let levels = s.levels.clone().unwrap_or_else(|| vec![nu]);
    let rays = ray_differences(
        &map,
        &nf,
        petal,
        (Realization::Forward, Realization::Backward),
        ray.direction(),
        &radii,
        w,
        16,
        config,
    )
    .map_err(num())?;
    let outside = rays.outside.len();
    let mut samples = Csv::new(&["re_x", "im_x", "difference"]);
    for smp in &rays.samples {
        samples.row(&[smp.x.re.into(), smp.x.im.into(), smp.difference.into()]);
    }
    let fit = fit_flatness(rays.samples, &levels, levels[0]).map_err(num())?;
    let mut table = Csv::new(&["fit", "exponent", "k", "log_prefactor", "r_squared"]);
    let mut fit_row = |name: &str, f: &unfold_core::invariants::ExponentFit| {
        table.row(&[
            name.into(),
            f.exponent.into(),
            f.k.into(),
            f.log_prefactor.into(),
            f.r_squared.into(),
        ]);
    };
    fit_row("best", &fit.best);
    for cand in &fit.candidates {
        fit_row("candidate", cand);
    }
    #[derive(Serialize)]
    struct Meta {
        petal: usize,
        w: C64,
        predicted_level: f64,
        vacuous: bool,
        outside_overlap: usize,
    }
    let out = OutDir::create(&s.out)?;
    Ok(vec![
        out.csv("flatness_samples.csv", samples)?,
        out.csv("flatness_fit.csv", table)?,
        out.json(
            "flatness.json",
            &Meta {
                petal,
                w,
                predicted_level: fit.predicted_level,
                vacuous: fit.vacuous,
                outside_overlap: outside,
            },
        )?,
    ])
}

pub fn conjugacy(p: &ProblemFile, s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let eta = p.conjugate()?.ok_or_else(|| CliError::Schema {
        location: "options.conjugator".into(),
        message: "the conjugacy command needs a conjugator".into(),
    })?;
    let config = horn_config(p, s);
    let x = option_x(p);
    let homogeneous_at = |m: &UnfoldingMap| -> Result<Vec<HornMap>, CliError> {
        let (z, maps) = horn_for(m, x, &config, "conjugacy")?;
        Ok(homogeneous(&maps, z.residue_formula))
    };
    let (hp, he) = rayon::join(|| homogeneous_at(&p.map()?), || homogeneous_at(&eta));
    let witness = conjugacy_translation(x, &hp?, &he?, s.tol.unwrap_or(1e-5));
    Ok(vec![
        OutDir::create(&s.out)?.json("conjugacy.json", &witness)?
    ])
}

pub fn selftest(s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    #[derive(Serialize)]
    struct Row {
        id: &'static str,
        passed: bool,
        detail: String,
    }
    let outcomes = selftest::run_all(s.seed);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let rows: Vec<Row> = outcomes
        .iter()
        .map(|o| Row {
            id: o.id,
            passed: o.passed,
            detail: o.detail.clone(),
        })
        .collect();
    let path = OutDir::create(&s.out)?.json("selftest.json", &rows)?;
    let failed: Vec<&'static str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    if failed.is_empty() {
        Ok(vec![path])
    } else {
        Err(CliError::SelftestFailed { failed })
    }
}
