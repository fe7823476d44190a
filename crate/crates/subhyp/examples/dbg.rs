use subhyp::alpha_boundary::*;
use subhyp::geometry::{gallery, Point};
use subhyp::metrics::AlphaParam;
use subhyp::whitney::WhitneyDecomposition;

fn main() {
    let d = gallery::slit_square();
    let w = WhitneyDecomposition::build(&d, 8).unwrap();
    let ab = AlphaBoundary::build(&d, &w, AlphaParam::new(0.5).unwrap(),
        &AlphaBoundaryConfig::default()).unwrap();
    let q = 1964usize;
    let c = &w.cubes()[q];
    println!("cube {q}: center {:?} r {} anchor {:?} face {}", c.cube.center, c.cube.radius, c.anchor, c.anchor_face);
    let el = ab.omega_for_cube(q).unwrap();
    println!("omega: id {} anchor {:?} face {} sample {}", el.id, el.anchor, el.face, el.sample);
    let s = &ab.samples()[el.sample];
    println!("sample point {:?} elements {:?} seg {}", s.point, s.element_ids, s.segment);
    for &e in &s.element_ids {
        let ee = ab.element(e).unwrap();
        let cl = ee.finest_cluster();
        let side_y: Vec<f64> = cl.cubes.iter().take(4).map(|&c| w.cubes()[c as usize].cube.center.y).collect();
        println!("  element {e}: face {} cluster size {} sample ys {:?}", ee.face, cl.cubes.len(), side_y);
    }
    println!("sided visible: {}", d.is_q_visible_sided(&c.cube, el.anchor, el.face));
    println!("point visible: {}", d.is_q_visible(&c.cube, el.anchor));
    println!("alpha visible: {}", ab.is_alpha_q_visible(&d, &w, el.id, &c.cube));

    let cfg = AlphaBoundaryConfig { extra_samples: vec![Point::new(-0.2,0.0), Point::new(0.0,0.0), Point::new(0.3,0.0)], ..Default::default() };
    let ab_a = AlphaBoundary::build(&d, &w, AlphaParam::new(2.0/3.0).unwrap(), &cfg).unwrap();
    let ab_b = AlphaBoundary::build(&d, &w, AlphaParam::new(0.5).unwrap(), &cfg).unwrap();
    for x in [-0.2f64, 0.0, 0.3] {
        let from_b = ab_b.elements_at(Point::new(x, 0.0), 1e-6);
        for &eb in &from_b {
            let elb = ab_b.element(eb).unwrap();
            let ea = project_beta_to_alpha(&ab_a, &ab_b, &w, eb).unwrap();
            let ela = ab_a.element(ea).unwrap();
            let rep = elb.representative(&w, 99);
            println!("x={x} beta el {eb} side {:?} rep {} (cy {:.4}) -> alpha el {ea} side {:?}",
                elb.face.side, rep, w.cubes()[rep].cube.center.y, ela.face.side);
        }
    }
}
