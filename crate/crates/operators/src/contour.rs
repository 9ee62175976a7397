use std::f64::consts::PI;

/// Star-shaped closed curve `rho(t) = base_radius * (1 + amplitude * cos(lobes * t))`, counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub base_radius: f64,
    pub amplitude: f64,
    pub lobes: u32,
}

/// Trapezoidal-rule discretization of a contour at equispaced parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub theta: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    /// Outward unit normals.
    pub normals: Vec<[f64; 2]>,
    /// Quadrature weights `h * |x'(theta)|`.
    pub weights: Vec<f64>,
    pub curvature: Vec<f64>,
}

/// The five-lobed star used by the boundary integral experiments.
pub fn default_contour() -> Contour {
    Contour::star(0.15, 5)
}

impl Contour {
    pub fn circle(radius: f64) -> Self {
        Self {
            base_radius: radius,
            amplitude: 0.0,
            lobes: 0,
        }
    }

    pub fn star(amplitude: f64, lobes: u32) -> Self {
        Self {
            base_radius: 1.0,
            amplitude,
            lobes,
        }
    }

    /// `rho`, `rho'`, `rho''` at `t`.
    fn radius(&self, t: f64) -> (f64, f64, f64) {
        let k = self.lobes as f64;
        let a = self.base_radius * self.amplitude;
        let (s, c) = (k * t).sin_cos();
        (self.base_radius + a * c, -a * k * s, -a * k * k * c)
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        let (r, _, _) = self.radius(t);
        let (s, c) = t.sin_cos();
        [r * c, r * s]
    }

    pub fn derivative(&self, t: f64) -> [f64; 2] {
        let (r, dr, _) = self.radius(t);
        let (s, c) = t.sin_cos();
        [dr * c - r * s, dr * s + r * c]
    }

    pub fn second_derivative(&self, t: f64) -> [f64; 2] {
        let (r, dr, ddr) = self.radius(t);
        let (s, c) = t.sin_cos();
        [ddr * c - 2.0 * dr * s - r * c, ddr * s + 2.0 * dr * c - r * s]
    }

    pub fn speed(&self, t: f64) -> f64 {
        let [dx, dy] = self.derivative(t);
        dx.hypot(dy)
    }

    pub fn normal(&self, t: f64) -> [f64; 2] {
        let [dx, dy] = self.derivative(t);
        let len = dx.hypot(dy);
        [dy / len, -dx / len]
    }

    /// Signed curvature; positive on convex arcs.
    pub fn curvature(&self, t: f64) -> f64 {
        let [dx, dy] = self.derivative(t);
        let [ddx, ddy] = self.second_derivative(t);
        (dx * ddy - dy * ddx) / dx.hypot(dy).powi(3)
    }

    pub fn discretize(&self, n: usize) -> Discretization {
        let h = 2.0 * PI / n as f64;
        let theta: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        Discretization {
            points: theta.iter().map(|&t| self.point(t)).collect(),
            normals: theta.iter().map(|&t| self.normal(t)).collect(),
            weights: theta.iter().map(|&t| h * self.speed(t)).collect(),
            curvature: theta.iter().map(|&t| self.curvature(t)).collect(),
            theta,
        }
    }
}

impl Discretization {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_geometry() {
        let c = Contour::circle(2.0);
        for &t in &[0.0, 0.7, 3.0] {
            let p = c.point(t);
            assert!((p[0].hypot(p[1]) - 2.0).abs() < 1e-15);
            assert!((c.curvature(t) - 0.5).abs() < 1e-15);
            let n = c.normal(t);
            assert!((n[0] - p[0] / 2.0).abs() < 1e-15 && (n[1] - p[1] / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let c = default_contour();
        let h = 1e-5;
        for &t in &[0.1, 1.3, 4.0] {
            let (p0, p1) = (c.point(t - h), c.point(t + h));
            let d = c.derivative(t);
            let (d0, d1) = (c.derivative(t - h), c.derivative(t + h));
            let dd = c.second_derivative(t);
            for k in 0..2 {
                assert!(((p1[k] - p0[k]) / (2.0 * h) - d[k]).abs() < 1e-8);
                assert!(((d1[k] - d0[k]) / (2.0 * h) - dd[k]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn closed_curve() {
        let c = default_contour();
        let (a, b) = (c.point(0.0), c.point(2.0 * PI));
        assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
    }
}
