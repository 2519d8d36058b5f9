#![allow(dead_code)]

use bergkern::{Complex64, CurveShape, PlanarDomain};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Tilted ellipse with two circular holes.
pub fn triply_connected(nodes: Option<usize>) -> PlanarDomain {
    let outer = CurveShape::Ellipse {
        center: c(0.0, 0.0),
        semi_major: 1.2,
        semi_minor: 1.0,
        angle: 0.2,
    };
    let holes = vec![
        CurveShape::Circle {
            center: c(-0.45, 0.0),
            radius: 0.18,
        },
        CurveShape::Circle {
            center: c(0.4, 0.15),
            radius: 0.15,
        },
    ];
    PlanarDomain::smooth_with_nodes(outer, holes, nodes).unwrap()
}

pub fn unit_annulus() -> PlanarDomain {
    PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap()
}

pub fn punctured_disk() -> PlanarDomain {
    PlanarDomain::punctured_disk(c(0.0, 0.0), 1.0, vec![c(0.3, 0.2)]).unwrap()
}
