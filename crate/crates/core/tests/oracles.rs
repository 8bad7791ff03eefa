mod common;

use common::{fd_scalar_curvature, warped};

#[test]
fn oracle_reproduces_round_sphere_products() {
    // S^2(1) x R: R = 2; h = sin s on S^3: R = 6
    let cyl = fd_scalar_curvature(warped(|_| 1.0), [0.3, 1.1, 0.2], 1e-3);
    assert!((cyl - 2.0).abs() < 1e-7, "{cyl}");
    let sphere = fd_scalar_curvature(warped(f64::sin), [0.9, 1.1, 0.2], 1e-3);
    assert!((sphere - 6.0).abs() < 1e-6, "{sphere}");
}
