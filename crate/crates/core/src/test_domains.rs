//! Shared fixtures for unit tests.

use num_complex::Complex64;

use crate::geometry::{CurveShape, PlanarDomain};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Tilted ellipse with two circular holes.
pub fn triply_connected() -> PlanarDomain {
    triply_connected_with_nodes(None)
}

pub fn triply_connected_with_nodes(nodes: Option<usize>) -> PlanarDomain {
    PlanarDomain::smooth_with_nodes(
        CurveShape::Ellipse {
            center: c(0.0, 0.0),
            semi_major: 1.2,
            semi_minor: 1.0,
            angle: 0.2,
        },
        vec![
            CurveShape::Circle {
                center: c(-0.45, 0.0),
                radius: 0.18,
            },
            CurveShape::Circle {
                center: c(0.4, 0.15),
                radius: 0.15,
            },
        ],
        nodes,
    )
    .unwrap()
}

/// The annulus `0.5 < |z| < 1` built from generic curves, so no closed form
/// is used.
pub fn annulus_as_smooth() -> PlanarDomain {
    PlanarDomain::smooth(
        CurveShape::Circle {
            center: c(0.0, 0.0),
            radius: 1.0,
        },
        vec![CurveShape::Circle {
            center: c(0.0, 0.0),
            radius: 0.5,
        }],
    )
    .unwrap()
}
