//! Reference phantoms, grids and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use conical_radon::phantom::{Bump, PhantomSpec};
use conical_radon::{Axis, ConeSinogramGrid, Dim, Point, VolumeGrid};

pub fn reference2() -> PhantomSpec {
    PhantomSpec::new(Dim::Two, vec![Bump::mollifier(Point::new2(0.0, 2.0), 1.0, 1.0)]).unwrap()
}

pub fn reference3() -> PhantomSpec {
    PhantomSpec::new(Dim::Three, vec![Bump::mollifier(Point::new3(0.0, 0.0, 2.0), 1.0, 1.0)]).unwrap()
}

pub fn volume2(n: usize) -> VolumeGrid {
    VolumeGrid::new(Dim::Two, vec![Axis::new(-1.05, 1.05, n).unwrap()], Axis::new(0.95, 3.05, n).unwrap()).unwrap()
}

pub fn volume3(n: usize) -> VolumeGrid {
    let x = Axis::new(-1.05, 1.05, n).unwrap();
    VolumeGrid::new(Dim::Three, vec![x, x], Axis::new(0.95, 3.05, n).unwrap()).unwrap()
}

pub fn sinogram2(u_half: f64, nu: usize, theta: (f64, f64), nt: usize) -> ConeSinogramGrid {
    ConeSinogramGrid::new(
        Dim::Two,
        vec![Axis::new(-u_half, u_half, nu).unwrap()],
        Axis::new(theta.0, theta.1, nt).unwrap(),
    )
    .unwrap()
}

pub fn sinogram3(u_half: f64, nu: usize, theta: (f64, f64), nt: usize) -> ConeSinogramGrid {
    let u = Axis::new(-u_half, u_half, nu).unwrap();
    ConeSinogramGrid::new(Dim::Three, vec![u, u], Axis::new(theta.0, theta.1, nt).unwrap()).unwrap()
}

/// Unit-height mollifier of radius `radius`, written out independently of the crate.
pub fn mollifier(dist2: f64, radius: f64) -> f64 {
    let r2 = dist2 / (radius * radius);
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule on [a, b].
pub fn integrate(a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>), g: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            total += w * 0.5 * h * g(mid + 0.5 * h * x);
        }
    }
    total
}

/// Unit-height gaussian of width `sigma`, cut off at `radius`.
pub fn truncated_gaussian(dist2: f64, sigma: f64, radius: f64) -> f64 {
    if dist2 >= radius * radius {
        0.0
    } else {
        (-dist2 / (2.0 * sigma * sigma)).exp()
    }
}

/// Cone integral of a single mollifier (center `(cx, cy)`, radius `radius`) in
/// two dimensions.
pub fn cone_oracle_2d(cx: f64, cy: f64, radius: f64, u: f64, theta: f64, p: f64) -> f64 {
    cone_oracle_2d_profile(cx, cy, radius, &|d2| mollifier(d2, radius), u, theta, p)
}

/// Cone integral in two dimensions of a radial bump given by `profile` of the
/// squared distance to `(cx, cy)`, supported in the ball of radius `radius`.
/// Each of the two rays is integrated only across its chord through the ball.
pub fn cone_oracle_2d_profile(
    cx: f64,
    cy: f64,
    radius: f64,
    profile: &dyn Fn(f64) -> f64,
    u: f64,
    theta: f64,
    p: f64,
) -> f64 {
    let rule = gauss_legendre(20);
    let (st, ct) = theta.sin_cos();
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        // |(u - cx) + sign s st, s ct - cy|^2 = R^2, quadratic in s.
        let a0 = u - cx;
        let b = 2.0 * (sign * a0 * st - cy * ct);
        let c = a0 * a0 + cy * cy - radius * radius;
        let disc = b * b - 4.0 * c;
        if disc <= 0.0 {
            continue;
        }
        let s0 = ((-b - disc.sqrt()) / 2.0).max(0.0);
        let s1 = (-b + disc.sqrt()) / 2.0;
        total += integrate(s0, s1, 200, &rule, |s| {
            let dx = u + sign * s * st - cx;
            let dy = s * ct - cy;
            s.powf(-p) * profile(dx * dx + dy * dy)
        });
    }
    total
}

/// Three-dimensional cone integral of a mollifier centred at `(c0, c1, cy)`.
pub fn cone_oracle_3d(center: [f64; 3], radius: f64, u: [f64; 2], theta: f64, p: f64) -> f64 {
    cone_oracle_3d_profile(center, radius, &|d2| mollifier(d2, radius), u, theta, p)
}

/// Three-dimensional cone integral of a radial bump: Gauss–Legendre in s over
/// the heights that meet the ball, and in the circle angle over the arc that
/// lies inside the ball's slice.
pub fn cone_oracle_3d_profile(
    center: [f64; 3],
    radius: f64,
    profile: &dyn Fn(f64) -> f64,
    u: [f64; 2],
    theta: f64,
    p: f64,
) -> f64 {
    let rule = gauss_legendre(20);
    let (st, ct) = theta.sin_cos();
    let (ox, oy) = (center[0] - u[0], center[1] - u[1]);
    let dist = (ox * ox + oy * oy).sqrt();
    let mid = oy.atan2(ox);
    let s_lo = (center[2] - radius) / ct;
    let s_hi = (center[2] + radius) / ct;
    integrate(s_lo, s_hi, 120, &rule, |s| {
        let rho = s * st;
        let dy = s * ct - center[2];
        let disk2 = radius * radius - dy * dy;
        if disk2 <= 0.0 {
            return 0.0;
        }
        let disk = disk2.sqrt();
        if (rho - dist).abs() >= disk {
            return 0.0;
        }
        let (lo, hi) = if rho + dist <= disk || dist == 0.0 {
            (0.0, 2.0 * PI)
        } else {
            let c = ((rho * rho + dist * dist - disk2) / (2.0 * rho * dist)).clamp(-1.0, 1.0);
            let half = c.acos();
            (mid - half, mid + half)
        };
        let ring = integrate(lo, hi, 24, &rule, |phi| {
            let x0 = u[0] + rho * phi.cos() - center[0];
            let x1 = u[1] + rho * phi.sin() - center[1];
            profile(x0 * x0 + x1 * x1 + dy * dy)
        });
        s.powf(-p) * rho * ring
    })
}

/// `J_0` from its power series, independent of the crate's evaluation.
pub fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..400 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}
