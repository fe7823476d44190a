//! Built-in test domains.
//!
//! Six families: the unit square, the slit square, a comb with geometrically
//! thickening teeth, a multi-slit domain with four junctions of different
//! multiplicity, a square annulus, and a square with an inward power cusp.

use super::domain::Domain;
use super::primitives::{Point, Rect, Segment};
use crate::Result;

pub fn unit_square() -> Domain {
    Domain::polygon(
        "unit_square",
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ],
        vec![],
        vec![],
    )
    .expect("unit square is valid")
    .with_basepoint(Point::new(0.5, 0.5))
}

/// `(-1,1)^2` minus the closed segment from `(-1/2, 0)` to `(1/2, 0)`.
pub fn slit_square() -> Domain {
    Domain::polygon(
        "slit_square",
        vec![
            Point::new(-1.0, -1.0),
            Point::new(1.0, -1.0),
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
        ],
        vec![],
        vec![Segment::new(Point::new(-0.5, 0.0), Point::new(0.5, 0.0))],
    )
    .expect("slit square is valid")
    .with_basepoint(Point::new(0.0, 0.5))
}

/// Square ring: `(-1,1)^2` minus the closed square `[-0.4, 0.4]^2`.
pub fn annulus() -> Domain {
    Domain::polygon(
        "annulus",
        vec![
            Point::new(-1.0, -1.0),
            Point::new(1.0, -1.0),
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
        ],
        vec![vec![
            Point::new(-0.4, -0.4),
            Point::new(0.4, -0.4),
            Point::new(0.4, 0.4),
            Point::new(-0.4, 0.4),
        ]],
        vec![],
    )
    .expect("annulus is valid")
    .with_basepoint(Point::new(0.0, 0.7))
}

/// Per-tooth geometry of the comb: thickness grows by a factor 2 toward the
/// back wall, gap height shrinks. The final gap (tooth 6) is intentionally
/// thinner than any Whitney cube up to depth 11, so the last chamber is
/// connected in the plane but unresolved by moderate-depth decompositions.
const COMB_ROOM: f64 = 0.015;
const COMB_GAPS: [f64; 6] = [0.2, 0.1, 0.05, 0.027, 0.016, 0.0018];

fn comb_tooth_thickness(i: usize) -> f64 {
    0.012 * (1 << i) as f64
}

/// Comb with `k` teeth hanging from the top edge, each leaving a bottom gap.
/// Supported for `k` in `1..=6`; the geometry constants are sized for
/// decompositions up to depth 10.
pub fn comb_domain(k_teeth: usize) -> Result<Domain> {
    if k_teeth == 0 || k_teeth > 6 {
        return Err(crate::Error::InvalidInput(format!(
            "comb_domain supports 1..=6 teeth, got {k_teeth}"
        )));
    }
    let w = COMB_ROOM;
    let mut verts = vec![Point::new(0.0, 0.0)];
    let mut x = w;
    let mut teeth = Vec::new(); // (xs, xe, gap)
    for i in 1..=k_teeth {
        let xs = x;
        let xe = xs + comb_tooth_thickness(i);
        teeth.push((xs, xe, COMB_GAPS[i - 1]));
        x = xe + w;
    }
    let width = x;
    verts.push(Point::new(width, 0.0));
    verts.push(Point::new(width, 1.0));
    for &(xs, xe, g) in teeth.iter().rev() {
        verts.push(Point::new(xe, 1.0));
        verts.push(Point::new(xe, g));
        verts.push(Point::new(xs, g));
        verts.push(Point::new(xs, 1.0));
    }
    verts.push(Point::new(0.0, 1.0));
    let name = format!("comb_{k_teeth}");
    Ok(Domain::polygon(&name, verts, vec![], vec![])?
        .with_basepoint(Point::new(w / 2.0, w / 2.0)))
}

/// X coordinate of the comb back wall (useful for picking samples on it).
pub fn comb_back_wall_x(k_teeth: usize) -> f64 {
    let mut x = COMB_ROOM;
    for i in 1..=k_teeth {
        x += comb_tooth_thickness(i) + COMB_ROOM;
    }
    x
}

fn dir(theta_deg: f64) -> Point {
    let t = theta_deg.to_radians();
    Point::new(t.cos(), t.sin())
}

/// The four junction points of [`multi_slit`], with their expected number of
/// boundary elements (sectors): 6, 4, 3 and 2.
pub fn multi_slit_junctions() -> [(Point, usize); 4] {
    [
        (Point::new(-1.0, 1.0), 6),
        (Point::new(1.0, 1.0), 4),
        (Point::new(-1.0, -1.0), 3),
        (Point::new(1.0, -1.0), 2),
    ]
}

/// `(-2,2)^2` with slit junctions of multiplicity 6, 4, 3 and 2: three full
/// slits crossing at one point, two crossing at another, a three-armed star,
/// and a point interior to a single slit.
pub fn multi_slit() -> Domain {
    let half = 0.6;
    let mut slits = Vec::new();
    let a = Point::new(-1.0, 1.0);
    for theta in [0.0, 60.0, 120.0] {
        let u = dir(theta) * half;
        slits.push(Segment::new(a - u, a + u));
    }
    let b = Point::new(1.0, 1.0);
    for theta in [0.0, 90.0] {
        let u = dir(theta) * half;
        slits.push(Segment::new(b - u, b + u));
    }
    let c = Point::new(-1.0, -1.0);
    for theta in [90.0, 210.0, 330.0] {
        slits.push(Segment::new(c, c + dir(theta) * half));
    }
    slits.push(Segment::new(
        Point::new(1.0 - half, -1.0),
        Point::new(1.0 + half, -1.0),
    ));
    Domain::polygon(
        "multi_slit",
        vec![
            Point::new(-2.0, -2.0),
            Point::new(2.0, -2.0),
            Point::new(2.0, 2.0),
            Point::new(-2.0, 2.0),
        ],
        vec![],
        slits,
    )
    .expect("multi-slit square is valid")
    .with_basepoint(Point::new(0.0, 0.0))
}

/// Unit square with a power cusp carved in from the left edge, tip at
/// `(0.5, 0.5)`. The notch half-width is `0.25 * s^exponent` at parameter
/// distance `s` from the mouth, sampled as a polyline.
pub fn outward_cusp(exponent: f64) -> Result<Domain> {
    if !(exponent >= 1.0 && exponent.is_finite()) {
        return Err(crate::Error::InvalidInput(format!(
            "cusp exponent must be >= 1, got {exponent}"
        )));
    }
    let m = 24usize;
    let tip = Point::new(0.5, 0.5);
    let curve = |s: f64, up: bool| -> Point {
        let x = 0.5 - 0.5 * s;
        let h = 0.25 * s.powf(exponent);
        Point::new(x, if up { 0.5 + h } else { 0.5 - h })
    };
    let mut verts = vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(0.0, 1.0),
    ];
    // down the upper branch into the notch, around the tip, back out
    for j in (1..=m).rev() {
        let s = (j as f64 / m as f64).powf(1.35);
        verts.push(curve(s, true));
    }
    verts.push(tip);
    for j in 1..=m {
        let s = (j as f64 / m as f64).powf(1.35);
        verts.push(curve(s, false));
    }
    let name = format!("cusp_{exponent}");
    Ok(Domain::polygon(&name, verts, vec![], vec![])?
        .with_basepoint(Point::new(0.75, 0.5)))
}

/// The six standard gallery domains at their default parameters.
pub fn standard_gallery() -> Vec<Domain> {
    vec![
        unit_square(),
        slit_square(),
        comb_domain(6).expect("comb_6 is valid"),
        multi_slit(),
        annulus(),
        outward_cusp(2.0).expect("cusp_2 is valid"),
    ]
}

/// Gallery names accepted by [`by_name`].
pub fn gallery_names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("unit_square", "the open unit square (0,1)^2"),
        ("slit_square", "(-1,1)^2 minus the slit [(-1/2,0),(1/2,0)]"),
        ("comb_<k>", "comb with k teeth (1..=6), e.g. comb_6"),
        ("multi_slit", "square with junctions of multiplicity 6/4/3/2"),
        ("annulus", "square ring (-1,1)^2 minus [-0.4,0.4]^2"),
        ("cusp_<g>", "unit square with a power-g cusp, e.g. cusp_2"),
    ]
}

/// Look up a gallery domain by name ("comb_4", "cusp_2.5", ...).
pub fn by_name(name: &str) -> Result<Domain> {
    match name {
        "unit_square" => Ok(unit_square()),
        "slit_square" => Ok(slit_square()),
        "multi_slit" => Ok(multi_slit()),
        "annulus" => Ok(annulus()),
        _ => {
            if let Some(k) = name.strip_prefix("comb_") {
                let k: usize = k
                    .parse()
                    .map_err(|_| crate::Error::InvalidInput(format!("bad comb name {name:?}")))?;
                return comb_domain(k);
            }
            if let Some(g) = name.strip_prefix("cusp_") {
                let g: f64 = g
                    .parse()
                    .map_err(|_| crate::Error::InvalidInput(format!("bad cusp name {name:?}")))?;
                return outward_cusp(g);
            }
            Err(crate::Error::InvalidInput(format!(
                "unknown gallery domain {name:?}"
            )))
        }
    }
}

/// Bounding rectangle of the comb chamber behind the last tooth (between the
/// final gap and the back wall), handy for tests.
pub fn comb_last_chamber(k_teeth: usize) -> Rect {
    let back = comb_back_wall_x(k_teeth);
    Rect::new(Point::new(back - COMB_ROOM, 0.0), Point::new(back, 1.0))
}
