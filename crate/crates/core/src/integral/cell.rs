//! Closed-form integrals of `z / |z|^n` over axis-aligned boxes, n = 2, 3.

/// `ln(z + r)` without cancellation when `z < 0`; `rest2 = r² - z²`.
fn ln_z_plus_r(z: f64, r: f64, rest2: f64) -> f64 {
    if z >= 0.0 {
        (z + r).ln()
    } else {
        (rest2 / (r - z)).ln()
    }
}

/// Antiderivative in (a, b) of `a / (a² + b²)`.
fn g2(a: f64, b: f64) -> f64 {
    let r2 = a * a + b * b;
    let mut t = -b;
    if b != 0.0 {
        t += 0.5 * b * r2.ln();
    }
    if a != 0.0 {
        t += a * (b / a).atan();
    }
    t
}

/// `∫_{[a1,b1]×[a2,b2]} z1 / |z|²`, with the origin at most on a corner.
fn rect2(a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    g2(b1, b2) - g2(a1, b2) - g2(b1, a2) + g2(a1, a2)
}

/// Corner function whose mixed (y, z) difference gives `-∫∫ x / r³ dy dz` up to sign.
fn h3(x: f64, y: f64, z: f64) -> f64 {
    let r = (x * x + y * y + z * z).sqrt();
    let mut t = 0.0;
    if y != 0.0 {
        t += y * ln_z_plus_r(z, r, x * x + y * y);
    }
    if z != 0.0 {
        t += z * ln_z_plus_r(y, r, x * x + z * z);
    }
    if x != 0.0 {
        t -= x * (y * z / (x * r)).atan();
    }
    t
}

/// `∫_{box} z1 / |z|³`, with the origin at most on a corner.
fn box3(lo: [f64; 3], hi: [f64; 3]) -> f64 {
    let j = |x: f64| h3(x, hi[1], hi[2]) - h3(x, lo[1], hi[2]) - h3(x, hi[1], lo[2]) + h3(x, lo[1], lo[2]);
    -(j(hi[0]) - j(lo[0]))
}

fn split_at_zero(lo: f64, hi: f64) -> ([(f64, f64); 2], usize) {
    if lo < 0.0 && hi > 0.0 {
        ([(lo, 0.0), (0.0, hi)], 2)
    } else {
        ([(lo, hi), (0.0, 0.0)], 1)
    }
}

/// `∫_{[lo,hi]} z / |z|^n dz` componentwise for `n = lo.len()` in {2, 3}.
/// Boxes straddling a coordinate plane are split there so that the weak
/// singularity only ever sits on a corner of a piece.
pub fn kernel_box_integral(lo: &[f64], hi: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    match lo.len() {
        2 => {
            let (sx, nx) = split_at_zero(lo[0], hi[0]);
            let (sy, ny) = split_at_zero(lo[1], hi[1]);
            for &(x0, x1) in &sx[..nx] {
                for &(y0, y1) in &sy[..ny] {
                    out[0] += rect2(x0, x1, y0, y1);
                    out[1] += rect2(y0, y1, x0, x1);
                }
            }
        }
        3 => {
            let (sx, nx) = split_at_zero(lo[0], hi[0]);
            let (sy, ny) = split_at_zero(lo[1], hi[1]);
            let (sz, nz) = split_at_zero(lo[2], hi[2]);
            for &(x0, x1) in &sx[..nx] {
                for &(y0, y1) in &sy[..ny] {
                    for &(z0, z1) in &sz[..nz] {
                        out[0] += box3([x0, y0, z0], [x1, y1, z1]);
                        out[1] += box3([y0, x0, z0], [y1, x1, z1]);
                        out[2] += box3([z0, x0, y0], [z1, x1, y1]);
                    }
                }
            }
        }
        n => panic!("kernel_box_integral supports n = 2, 3 (got {n})"),
    }
    out
}
