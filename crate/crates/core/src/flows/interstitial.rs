use super::FlowError;
use crate::geometry::{Disc, FundamentalDomain};

/// Largest ratio whose disc fits in a hole of the hexagonal packing,
/// `2/sqrt(3) - 1`.
pub fn r8() -> f64 {
    2.0 / 3f64.sqrt() - 1.0
}

const SLACK: f64 = 1e-9;

/// Hexagonal packing of unit discs with small discs of radius `r` added in
/// both holes of the cell. In each hole the small discs sit on a triangular
/// lattice of pitch `2r` centered at the hole center, keeping those at
/// distance at least `1 + r` from the three unit discs around the hole.
pub fn interstitial(r: f64) -> Result<(FundamentalDomain, f64), FlowError> {
    if !(r > 0.0 && r <= r8()) {
        return Err(FlowError::Domain(format!("interstitial packing needs 0 < r <= r8, got {r}")));
    }
    let s3 = 3f64.sqrt();
    let mut discs = vec![Disc::new(0.0, 0.0, 1.0).expect("unit disc")];
    // the two holes: an upward and a downward triangle of unit centers
    let holes =
        [([1.0, 1.0 / s3], [[0.0, 0.0], [2.0, 0.0], [1.0, s3]]), ([2.0, 2.0 / s3], [[2.0, 0.0], [1.0, s3], [3.0, s3]])];
    for (center, tri) in holes {
        let k = (1.0 / r).ceil() as i64 + 1;
        for i in -k..=k {
            for j in -k..=k {
                let x = center[0] + 2.0 * r * i as f64 + r * j as f64;
                let y = center[1] + r * s3 * j as f64;
                if inside(&tri, [x, y]) && tri.iter().all(|c| (x - c[0]).hypot(y - c[1]) >= 1.0 + r - SLACK) {
                    discs.push(Disc::new(x, y, r).expect("r > 0"));
                }
            }
        }
    }
    let domain = FundamentalDomain::new([2.0, 0.0], [1.0, s3], discs).expect("hexagonal cell");
    let density = domain.density();
    Ok((domain, density))
}

fn inside(tri: &[[f64; 2]; 3], p: [f64; 2]) -> bool {
    let side = |a: [f64; 2], b: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let s = [side(tri[0], tri[1]), side(tri[1], tri[2]), side(tri[2], tri[0])];
    s.iter().all(|&v| v > 0.0) || s.iter().all(|&v| v < 0.0)
}
