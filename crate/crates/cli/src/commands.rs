//! One driver per subcommand. Each returns JSON results, the asserted
//! properties and, for planar scenes, a figure.

use std::f64::consts::{FRAC_PI_3, PI};

use anyhow::{anyhow, bail};
use serde_json::{json, Value};
use spindle_core::bp3::{boundary_structure, graph_report, standardness_and_lattice, NonStandardWitness, Standardness};
use spindle_core::constructions::{
    kp_diameter_example, kp_experiments, kp_random_trials, kp_width_example, maehara_family,
    titeica_check, titeica_random_trials, ContractionPair, KpReport,
};
use spindle_core::diskpoly::{
    build_disk_polygon, dowker_table, extremal_search, DiskPolygonOutcome, FamilyKind, Quantity, Sense, Status,
};
use spindle_core::hull::{es_search, spindle_hull_2d, spindle_hull_contains, spindle_position, SpindleHull2};
use spindle_core::illumination::{find_frame, gauss_image, random_frame_experiment, Illuminator};
use spindle_core::scene::Scene;
use spindle_core::separation::{
    kirchberger_counterexample, kirchberger_verdict, separate_by_unit_sphere, smallest_separating_sphere,
    verify_counterexample, KirchbergerVerdict, SmallestSeparation,
};
use spindle_core::{point, Error, Point, Tolerance};

use crate::report::Assertion;
use crate::svg::Figure;

/// Failure of a driver: bad input (exit 2) or an alarm raised by a check
/// that the theory says cannot fail (exit 1).
#[derive(Debug)]
pub enum CmdError {
    Input(anyhow::Error),
    Alarm(String),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        match e {
            Error::TheoremViolation(m) | Error::ConstructionError(m) => CmdError::Alarm(m),
            other => CmdError::Input(other.into()),
        }
    }
}

impl From<anyhow::Error> for CmdError {
    fn from(e: anyhow::Error) -> Self {
        CmdError::Input(e)
    }
}

pub type CmdResult = std::result::Result<Outcome, CmdError>;

#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub figure: Option<Figure>,
}

/// Flags shared by all subcommands.
#[derive(Debug, Clone)]
pub struct Options {
    pub seed: u64,
    pub tol: Tolerance,
    pub trials: Option<usize>,
    pub dim: Option<usize>,
    pub r: Option<f64>,
    pub n: Option<(usize, usize)>,
    pub setting: Option<String>,
}

/// Parses `a..b` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> anyhow::Result<(usize, usize)> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse()?, b.trim().parse()?),
        None => {
            let v = s.trim().parse()?;
            (v, v)
        }
    };
    if a > b {
        bail!("empty range {s}");
    }
    Ok((a, b))
}

fn pt(p: &Point) -> Value {
    json!(p.as_slice())
}

fn pts(ps: &[Point]) -> Value {
    Value::Array(ps.iter().map(pt).collect())
}

fn need_scene(scene: Option<&Scene>, dims: &[usize]) -> anyhow::Result<Scene> {
    let s = scene.ok_or_else(|| anyhow!("this command needs a scene file"))?;
    if !dims.contains(&s.dim) {
        bail!("scene has dim {}, this command accepts {:?}", s.dim, dims);
    }
    if s.radius != 1.0 {
        bail!("only unit radius scenes are supported, got radius {}", s.radius);
    }
    if s.points.is_empty() {
        bail!("scene has no points");
    }
    Ok(s.clone())
}

/// The generating family of a ball-intersection scene: `centers`, or
/// `points` when no centers are given.
fn family(s: &Scene) -> Vec<Point> {
    if s.centers.is_empty() {
        s.point_list()
    } else {
        s.center_list()
    }
}

pub fn hull2d(scene: Option<&Scene>, o: &Options) -> CmdResult {
    let s = need_scene(scene, &[2])?;
    let x = s.point_list();
    let hull = spindle_hull_2d(&x, &o.tol)?;
    let mut fig = Figure::new();
    for p in &x {
        fig.dot(p, "a");
    }
    let mut assertions = vec![Assertion::new(
        "every input point lies in the hull",
        x.iter().all(|p| hull.contains(p, &o.tol)),
        format!("{} points", x.len()),
    )];
    let results = match &hull {
        SpindleHull2::Boundary(b) => {
            let angles = b.arc_angles();
            for a in &b.arcs {
                fig.arc(&b.vertices[a.from], &b.vertices[a.to], &a.center, 1.0, "hull");
            }
            let longest = angles.iter().cloned().fold(0.0, f64::max);
            assertions.push(Assertion::new(
                "every boundary arc is shorter than a semicircle",
                longest < PI,
                format!("longest arc angle {longest}"),
            ));
            let agree = b
                .vertices
                .iter()
                .map(|v| spindle_hull_contains(&x, v, &o.tol))
                .collect::<spindle_core::Result<Vec<bool>>>()?;
            assertions.push(Assertion::new(
                "hull vertices pass the B[B[X]] membership oracle",
                agree.iter().all(|&a| a),
                format!("{} vertices", b.vertices.len()),
            ));
            json!({
                "kind": "boundary",
                "vertices": pts(&b.vertices),
                "vertex_indices": b.vertex_indices,
                "arcs": b.arcs.iter().zip(&angles).map(|(a, t)| json!({
                    "from": a.from, "to": a.to, "center": pt(&a.center), "angle": t,
                })).collect::<Vec<_>>(),
            })
        }
        SpindleHull2::WholePlane => json!({"kind": "whole-plane"}),
        SpindleHull2::SingleBall(b) => {
            fig.circle(&b.center, b.radius, "hull");
            json!({"kind": "single-ball", "center": pt(&b.center), "radius": b.radius})
        }
    };
    Ok(Outcome {
        results,
        assertions,
        figure: Some(fig),
    })
}

pub fn bp3_structure(scene: Option<&Scene>, o: &Options) -> CmdResult {
    let s = need_scene(scene, &[3])?;
    let p = boundary_structure(&family(&s), &o.tol)?;
    let (v, e, f) = p.counts();
    let on_three = p.vertices.iter().all(|v| v.spheres.len() >= 3);
    let inside = p.edges.iter().all(|e| p.contains(&e.midpoint(), &o.tol));
    Ok(Outcome {
        results: json!({
            "V": v, "E": e, "F": f,
            "seams": p.seams.len(),
            "generators": p.generators,
            "vertices": p.vertices.iter().map(|v| json!({"point": pt(&v.point), "spheres": v.spheres})).collect::<Vec<_>>(),
            "edges": p.edges.iter().map(|e| json!({"spheres": e.spheres, "ends": e.ends, "sweep": e.sweep})).collect::<Vec<_>>(),
            "faces": p.faces.iter().map(|f| json!({"sphere": f.sphere, "vertices": f.vertices, "edges": f.edges, "seam": f.seam})).collect::<Vec<_>>(),
        }),
        assertions: vec![
            Assertion::new("every vertex lies on at least three generating spheres", on_three, ""),
            Assertion::new("every edge midpoint lies in the body", inside, ""),
        ],
        figure: None,
    })
}

pub fn euler_check(scene: Option<&Scene>, o: &Options) -> CmdResult {
    let s = need_scene(scene, &[3])?;
    let p = boundary_structure(&family(&s), &o.tol)?;
    let g = graph_report(&p);
    let mut assertions = Vec::new();
    if g.standard {
        assertions.push(Assertion::new("V - E + F = 2", g.chi == 2, format!("chi = {}", g.chi)));
        assertions.push(Assertion::new(
            "edge graph is simple, planar and 3-connected",
            g.simple && g.planar && g.three_connected,
            format!("simple {}, planar {}, 3-connected {}", g.simple, g.planar, g.three_connected),
        ));
    }
    Ok(Outcome {
        results: json!({
            "V": g.vertices, "E": g.edges, "F": g.faces, "chi": g.chi,
            "standard": g.standard, "simple": g.simple, "connected": g.connected,
            "planar": g.planar, "two_connected": g.two_connected, "three_connected": g.three_connected,
        }),
        assertions,
        figure: None,
    })
}

fn witness_json(w: &NonStandardWitness) -> Value {
    match w {
        NonStandardWitness::SingleBall => json!({"kind": "single-ball"}),
        NonStandardWitness::Seam { spheres } => json!({"kind": "seam", "spheres": spheres}),
        NonStandardWitness::FacePair { faces, edges, vertices } => {
            json!({"kind": "face-pair", "faces": faces, "edges": edges, "vertices": vertices})
        }
        NonStandardWitness::SphereTriple { spheres, vertices } => {
            json!({"kind": "sphere-triple", "spheres": spheres, "vertices": vertices})
        }
        NonStandardWitness::TooFewBalls { count } => json!({"kind": "too-few-balls", "count": count}),
    }
}

pub fn standardness(scene: Option<&Scene>, o: &Options) -> CmdResult {
    let s = need_scene(scene, &[3])?;
    let p = boundary_structure(&family(&s), &o.tol)?;
    Ok(match standardness_and_lattice(&p) {
        Standardness::Standard(l) => Outcome {
            results: json!({
                "standard": true,
                "elements": l.len(),
                "atoms": l.atoms().len(),
            }),
            assertions: vec![
                Assertion::new("the face poset is a lattice", l.is_lattice(), ""),
                Assertion::new("the face lattice is atomic", l.is_atomic(), ""),
            ],
            figure: None,
        },
        Standardness::NonStandard(w) => Outcome {
            results: json!({"standard": false, "witness": witness_json(&w)}),
            assertions: Vec::new(),
            figure: None,
        },
    })
}

fn setting(name: &str) -> anyhow::Result<(FamilyKind, Quantity)> {
    Ok(match name {
        "inscribed-perimeter" => (FamilyKind::Inscribed, Quantity::Perimeter),
        "inscribed-area" => (FamilyKind::Inscribed, Quantity::Area),
        "circumscribed-area" => (FamilyKind::Circumscribed, Quantity::Area),
        "circumscribed-perimeter" => (FamilyKind::Circumscribed, Quantity::Perimeter),
        other => bail!(
            "unknown setting {other}; expected inscribed-perimeter, inscribed-area, circumscribed-area or circumscribed-perimeter"
        ),
    })
}

fn setting_name(kind: FamilyKind, quantity: Quantity) -> &'static str {
    match (kind, quantity) {
        (FamilyKind::Inscribed, Quantity::Perimeter) => "inscribed-perimeter",
        (FamilyKind::Inscribed, Quantity::Area) => "inscribed-area",
        (FamilyKind::Circumscribed, Quantity::Area) => "circumscribed-area",
        (FamilyKind::Circumscribed, Quantity::Perimeter) => "circumscribed-perimeter",
    }
}

/// Smallest gap `|f(n-1) + f(n+1) - 2 f(n)|` accepted as a strict inequality.
pub const DOWKER_MARGIN: f64 = 1e-10;

pub fn dowker(o: &Options) -> CmdResult {
    let r = o.r.unwrap_or(0.5);
    let (lo, hi) = o.n.unwrap_or((4, 8));
    let wanted = match o.setting.as_deref() {
        None | Some("all") => None,
        Some(name) => Some(setting(name)?),
    };
    let rows: Vec<_> = dowker_table(r, lo, hi)?
        .into_iter()
        .filter(|row| wanted.is_none_or(|w| w == (row.kind, row.quantity)))
        .collect();
    let mut assertions = Vec::new();
    for row in &rows {
        let margin = (row.outer_sum - row.twice_middle).abs();
        let name = format!(
            "{} {} at n = {}",
            setting_name(row.kind, row.quantity),
            if row.concave { "concavity" } else { "convexity" },
            row.n
        );
        if row.status == Status::Conjecture {
            continue;
        }
        assertions.push(Assertion::new(
            name,
            row.holds && margin > DOWKER_MARGIN,
            format!("f(n-1) + f(n+1) = {}, 2 f(n) = {}", row.outer_sum, row.twice_middle),
        ));
    }
    Ok(Outcome {
        results: json!({
            "r": r,
            "rows": rows.iter().map(|row| json!({
                "setting": setting_name(row.kind, row.quantity),
                "n": row.n,
                "outer_sum": row.outer_sum,
                "twice_middle": row.twice_middle,
                "margin": (row.outer_sum - row.twice_middle).abs(),
                "inequality": if row.concave { "<" } else { ">" },
                "holds": row.holds,
                "status": format!("{:?}", row.status).to_lowercase(),
            })).collect::<Vec<_>>(),
        }),
        assertions,
        figure: None,
    })
}

/// Largest excess of a searched configuration over the regular member.
pub const EXTREMAL_SLACK: f64 = 1e-6;

pub fn extremal(o: &Options) -> CmdResult {
    let r = o.r.unwrap_or(0.5);
    let (lo, hi) = o.n.unwrap_or((4, 8));
    let name = o.setting.as_deref().unwrap_or("inscribed-perimeter");
    let (kind, quantity) = setting(name)?;
    let sense = match kind {
        FamilyKind::Inscribed => Sense::Max,
        FamilyKind::Circumscribed => Sense::Min,
    };
    let mut rows = Vec::new();
    let mut assertions = Vec::new();
    for n in lo..=hi {
        let res = extremal_search(n, r, kind, quantity, sense, o.seed)?;
        let excess = match sense {
            Sense::Max => res.value - res.regular_value,
            Sense::Min => res.regular_value - res.value,
        };
        assertions.push(Assertion::new(
            format!("{name}: search does not beat the regular {n}-gon"),
            excess <= EXTREMAL_SLACK,
            format!("excess {excess}"),
        ));
        rows.push(json!({
            "n": n, "value": res.value, "regular_value": res.regular_value,
            "deviation": res.deviation, "gaps": res.gaps,
        }));
    }
    Ok(Outcome {
        results: json!({
            "setting": name, "r": r,
            "sense": if sense == Sense::Max { "max" } else { "min" },
            "rows": rows,
        }),
        assertions,
        figure: None,
    })
}

pub fn maehara(o: &Options) -> CmdResult {
    let n = o.dim.unwrap_or(4);
    let fam = maehara_family(n, &o.tol)?;
    let p = &fam.params;
    let rep = &fam.report;
    let worst = rep.leave_one_out_residuals.iter().cloned().fold(0.0, f64::max);
    let mut assertions = vec![
        Assertion::new(
            "any n + 1 spheres share a point",
            worst < 1e-8,
            format!("largest leave-one-out residual {worst}"),
        ),
        Assertion::new(
            "the whole family has no common point",
            rep.min_gap > 1e-6,
            format!("smallest gap {}", rep.min_gap),
        ),
    ];
    if n == 4 {
        assertions.push(Assertion::new(
            "t* = 1/2 for n = 4",
            (p.t_star - 0.5).abs() <= 1e-12,
            format!("t* = {}", p.t_star),
        ));
    }
    Ok(Outcome {
        results: json!({
            "n": n, "m": p.m, "t_star": p.t_star, "g_at_root": p.g_at_root,
            "r": p.r, "d": p.d, "case": format!("{:?}", p.case).to_lowercase(),
            "spheres": fam.spheres.iter().map(|s| json!({"center": pt(&s.center), "radius": s.radius})).collect::<Vec<_>>(),
            "residuals": (0..fam.spheres.len()).map(|i| json!({
                "left_out": i,
                "witness": pt(&fam.witnesses[i]),
                "residual": rep.leave_one_out_residuals[i],
                "gap": rep.left_out_gaps[i],
            })).collect::<Vec<_>>(),
            "min_gap": rep.min_gap,
            "tangency_defect": rep.tangency_defect,
        }),
        assertions,
        figure: None,
    })
}

/// Largest accepted `|circumradius - 1|` for the three second intersections.
pub const TITEICA_TOL: f64 = 1e-9;

pub fn titeica(scene: Option<&Scene>, o: &Options) -> CmdResult {
    if let Some(s) = scene {
        let s = need_scene(Some(s), &[2])?;
        let x = s.point_list();
        if x.len() != 4 {
            return Err(CmdError::Input(anyhow!("expected points c1, c2, c3, p; got {}", x.len())));
        }
        let rep = titeica_check(&x[0], &x[1], &x[2], &x[3], &o.tol)?;
        let mut fig = Figure::new();
        for c in &x[..3] {
            fig.circle(c, 1.0, "a");
        }
        fig.circle(&rep.center, rep.radius, "b");
        for q in [&rep.x, &rep.y, &rep.z, &x[3]] {
            fig.dot(q, "b");
        }
        return Ok(Outcome {
            results: json!({
                "x": pt(&rep.x), "y": pt(&rep.y), "z": pt(&rep.z),
                "center": pt(&rep.center), "radius": rep.radius, "deviation": rep.deviation,
            }),
            assertions: vec![Assertion::new(
                "x, y, z lie on a unit circle",
                rep.deviation <= TITEICA_TOL,
                format!("|R - 1| = {}", rep.deviation),
            )],
            figure: Some(fig),
        });
    }
    let trials = o.trials.unwrap_or(1000);
    let t = titeica_random_trials(trials, o.seed, &o.tol);
    Ok(Outcome {
        results: json!({
            "trials": t.trials, "skipped_degenerate": t.skipped_degenerate, "max_deviation": t.max_deviation,
        }),
        assertions: vec![Assertion::new(
            "x, y, z lie on a unit circle in every trial",
            t.max_deviation <= TITEICA_TOL,
            format!("max |R - 1| = {}", t.max_deviation),
        )],
        figure: None,
    })
}

fn kp_json(rep: &KpReport) -> Value {
    let f = |b: &spindle_core::constructions::BodyFunctionals| {
        json!({"inradius": b.inradius, "circumradius": b.circumradius, "diameter": b.diameter, "width": b.width})
    };
    json!({
        "before": f(&rep.before), "after": f(&rep.after),
        "inradius_delta": rep.inradius_delta, "circumradius_delta": rep.circumradius_delta,
        "diameter_delta": rep.diameter_delta, "width_delta": rep.width_delta,
    })
}

fn draw_disk_polygon(fig: &mut Figure, centers: &[Point], class: &str, tol: &Tolerance) -> spindle_core::Result<()> {
    if let DiskPolygonOutcome::Polygon(p) = build_disk_polygon(centers, tol)? {
        let k = p.vertices.len();
        if k == 0 {
            fig.circle(&p.centers[0], 1.0, class);
        }
        for i in 0..k {
            fig.arc(&p.vertices[i], &p.vertices[(i + 1) % k], &p.centers[p.edges[i]], 1.0, class);
        }
    }
    Ok(())
}

pub fn kneser_poulsen(scene: Option<&Scene>, o: &Options) -> CmdResult {
    if let Some(s) = scene {
        let s = need_scene(Some(s), &[2])?;
        let pair = ContractionPair {
            x: s.point_list(),
            y: s.center_list(),
        };
        pair.verify(&o.tol)?;
        let rep = kp_experiments(&pair, &o.tol)?;
        let mut fig = Figure::new();
        draw_disk_polygon(&mut fig, &pair.x, "a", &o.tol)?;
        draw_disk_polygon(&mut fig, &pair.y, "b", &o.tol)?;
        return Ok(Outcome {
            results: kp_json(&rep),
            assertions: vec![Assertion::new(
                "the inradius does not decrease",
                rep.inradius_ok,
                format!("delta {}", rep.inradius_delta),
            )],
            figure: Some(fig),
        });
    }
    let diameter = kp_experiments(&kp_diameter_example(), &o.tol)?;
    let width = kp_experiments(&kp_width_example(), &o.tol)?;
    let trials = o.trials.unwrap_or(1000);
    let random = kp_random_trials(trials, o.seed, &o.tol)?;
    let eps = o.tol.eps_geom;
    Ok(Outcome {
        results: json!({
            "diameter_example": kp_json(&diameter),
            "width_example": kp_json(&width),
            "random": {
                "trials": random.trials,
                "inradius_failures": random.inradius_failures,
                "min_inradius_delta": random.min_inradius_delta,
                "diameter_decreases": random.diameter_decreases,
                "circumradius_decreases": random.circumradius_decreases,
                "width_decreases": random.width_decreases,
            },
        }),
        assertions: vec![
            Assertion::new(
                "diameter decreases for (0.5, ±pi/3) -> (0.5, ±pi/4)",
                diameter.diameter_delta < -eps,
                format!("delta {}", diameter.diameter_delta),
            ),
            Assertion::new(
                "circumradius decreases for (0.5, ±pi/3) -> (0.5, ±pi/4)",
                diameter.circumradius_delta < -eps,
                format!("delta {}", diameter.circumradius_delta),
            ),
            Assertion::new(
                "minimal width decreases for (0.8, ±pi/10) -> (0.8, 0)",
                width.width_delta < -eps,
                format!(
                    "width {} before, {} after, delta {}",
                    width.before.width, width.after.width, width.width_delta
                ),
            ),
            Assertion::new(
                "the inradius never decreases under random contractions",
                random.inradius_failures == 0,
                format!("{} trials, smallest delta {}", random.trials, random.min_inradius_delta),
            ),
        ],
        figure: None,
    })
}

pub fn illuminate(scene: Option<&Scene>, o: &Options) -> CmdResult {
    let s = need_scene(scene, &[3])?;
    let x = s.point_list();
    let ill = Illuminator::new(&x, &o.tol)?;
    let mut probes: Vec<Point> = ill.body.vertices.iter().map(|v| v.point.clone()).collect();
    probes.extend(ill.body.edges.iter().map(|e| e.midpoint()));
    probes.extend(ill.body.seams.iter().map(|s| s.circle.at(0.0)));
    let widest = probes
        .iter()
        .map(|z| gauss_image(&x, z, &o.tol).map(|g| g.diameter))
        .collect::<spindle_core::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let u = point(&[0.0, 0.0, 1.0]);
    let search = find_frame(&x, &u, &o.tol)?;
    let certified = ill.check(&search.frame).illuminated;
    let trials = o.trials.unwrap_or(500);
    let exp = random_frame_experiment(&x, trials, o.seed, &o.tol)?;
    Ok(Outcome {
        results: json!({
            "V": ill.body.vertices.len(), "E": ill.body.edges.len(), "seams": ill.body.seams.len(),
            "widest_gauss_image": widest,
            "frame": {
                "u": pt(&search.frame.u), "v": pt(&search.frame.v), "w": pt(&search.frame.w),
                "angle": search.angle, "blocked_angles": search.blocked_angles,
            },
            "trials": exp.trials, "successes": exp.successes, "ratio": exp.ratio,
            "counterexamples": exp.counterexamples.iter().map(|c| json!({
                "frame": [pt(&c.frame.u), pt(&c.frame.v), pt(&c.frame.w)],
                "blocked_points": c.witnesses.iter().map(|w| json!({
                    "stratum": format!("{:?}", w.stratum),
                    "point": pt(&w.point),
                    "generators": pts(&w.generators),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
        assertions: vec![
            Assertion::new(
                "Gauss images have spherical diameter at most pi/3",
                widest <= FRAC_PI_3 + 1e-9,
                format!("widest {widest}"),
            ),
            Assertion::new(
                "find_frame returns an illuminating frame",
                certified,
                format!("{} rejected angles", search.blocked_angles.len()),
            ),
            Assertion::new(
                "random frames illuminate",
                exp.successes == exp.trials,
                format!("{} of {}", exp.successes, exp.trials),
            ),
        ],
        figure: None,
    })
}

fn two_sets(s: &Scene) -> anyhow::Result<(Vec<Point>, Vec<Point>)> {
    if s.centers.is_empty() {
        bail!("put the first set in `points` and the second in `centers`");
    }
    Ok((s.point_list(), s.center_list()))
}

pub fn separate(scene: Option<&Scene>, o: &Options) -> CmdResult {
    let s = need_scene(scene, &[2, 3])?;
    let (a, b) = two_sets(&s)?;
    let n = s.dim;
    let eps = o.tol.eps_geom;
    let mut fig = Figure::new();
    for p in &a {
        fig.dot(p, "a");
    }
    for p in &b {
        fig.dot(p, "b");
    }
    let mut assertions = Vec::new();
    let smallest = match smallest_separating_sphere(&a, &b, &o.tol)? {
        SmallestSeparation::Found(sp) => {
            let ball = &sp.result.ball;
            let (inner, outer) = match sp.result.inner_side {
                spindle_core::separation::Side::First => (&a, &b),
                spindle_core::separation::Side::Second => (&b, &a),
            };
            let ok = inner.iter().all(|p| (p - &ball.center).norm() <= ball.radius + 1e3 * eps)
                && outer.iter().all(|p| (p - &ball.center).norm() >= ball.radius - 1e3 * eps);
            assertions.push(Assertion::new("the smallest sphere separates the sets", ok, ""));
            let active = sp.active_a.len() + sp.active_b.len();
            assertions.push(Assertion::new(
                "the active set has at most n + 2 points",
                active <= n + 2,
                format!("{active} active points"),
            ));
            if n == 2 {
                fig.circle(&ball.center, ball.radius, "a");
            }
            json!({
                "found": true, "center": pt(&ball.center), "radius": ball.radius,
                "inner_side": format!("{:?}", sp.result.inner_side).to_lowercase(),
                "active_a": sp.active_a, "active_b": sp.active_b,
            })
        }
        SmallestSeparation::Infeasible { witness_a, witness_b } => {
            json!({"found": false, "witness_a": witness_a, "witness_b": witness_b})
        }
    };
    let unit = match separate_by_unit_sphere(&a, &b, &o.tol) {
        Ok(r) => {
            if n == 2 {
                fig.circle(&r.ball.center, r.ball.radius, "b");
            }
            json!({"separable": true, "center": pt(&r.ball.center), "strict": r.strict})
        }
        Err(Error::NotSeparable(why)) => json!({"separable": false, "reason": why}),
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome {
        results: json!({"smallest": smallest, "unit": unit}),
        assertions,
        figure: (n == 2).then_some(fig),
    })
}

pub fn kirchberger(scene: Option<&Scene>, o: &Options) -> CmdResult {
    let mut assertions = Vec::new();
    let (a, b, constructed) = match scene {
        Some(s) => {
            let s = need_scene(Some(s), &[2, 3])?;
            let (a, b) = two_sets(&s)?;
            (a, b, false)
        }
        None => {
            let ce = kirchberger_counterexample(2, 0.5, 1.1 * 0.25f64.acos() / 6.0)?;
            let verified = verify_counterexample(&ce);
            assertions.push(Assertion::new(
                "the constructed covering verifies",
                verified.is_ok(),
                verified.err().map(|e| e.to_string()).unwrap_or_default(),
            ));
            (ce.a, ce.b, true)
        }
    };
    let verdict = kirchberger_verdict(&a, &b, &o.tol)?;
    let mut fig = Figure::new();
    for p in &a {
        fig.dot(p, "a");
    }
    for p in &b {
        fig.dot(p, "b");
    }
    let results = match &verdict {
        KirchbergerVerdict::SeparableByCapRadius1 { sphere } => {
            fig.circle(&sphere.center, sphere.radius, "a");
            json!({"verdict": "separable", "center": pt(&sphere.center), "radius": sphere.radius})
        }
        KirchbergerVerdict::NotSeparable { witness_a, witness_b } => {
            json!({"verdict": "not-separable", "witness_a": witness_a, "witness_b": witness_b})
        }
        KirchbergerVerdict::CounterexampleWitness { sphere, subset_size } => {
            fig.circle(&sphere.center, sphere.radius, "a");
            json!({
                "verdict": "unit-circle-counterexample", "center": pt(&sphere.center),
                "radius": sphere.radius, "subset_size": subset_size,
            })
        }
    };
    if constructed {
        assertions.push(Assertion::new(
            "small subfamilies are unit-separable but the whole instance is not",
            matches!(verdict, KirchbergerVerdict::CounterexampleWitness { .. }),
            "",
        ));
    }
    Ok(Outcome {
        results: json!({"a": pts(&a), "b": pts(&b), "result": results}),
        assertions,
        figure: (a[0].len() == 2).then_some(fig),
    })
}

pub fn es(scene: Option<&Scene>, o: &Options) -> CmdResult {
    let s = need_scene(scene, &[2])?;
    let x = s.point_list();
    let (lo, hi) = o.n.unwrap_or((3, x.len()));
    let mut rows = Vec::new();
    let mut assertions = Vec::new();
    let mut fig = Figure::new();
    for p in &x {
        fig.dot(p, "a");
    }
    let mut best: Option<Vec<usize>> = None;
    for m in lo..=hi.min(x.len()) {
        let found = es_search(&x, m, &o.tol)?;
        if let Some(sub) = &found {
            let q: Vec<Point> = sub.iter().map(|&i| x[i].clone()).collect();
            assertions.push(Assertion::new(
                format!("the {m}-subset is in spindle convex position"),
                spindle_position(&q, &o.tol)?,
                format!("{sub:?}"),
            ));
            best = Some(sub.clone());
        }
        rows.push(json!({"m": m, "subset": found}));
    }
    if let Some(sub) = &best {
        let q: Vec<Point> = sub.iter().map(|&i| x[i].clone()).collect();
        if let SpindleHull2::Boundary(b) = spindle_hull_2d(&q, &o.tol)? {
            for a in &b.arcs {
                fig.arc(&b.vertices[a.from], &b.vertices[a.to], &a.center, 1.0, "b");
            }
        }
    }
    Ok(Outcome {
        results: json!({"rows": rows, "largest": best}),
        assertions,
        figure: Some(fig),
    })
}
