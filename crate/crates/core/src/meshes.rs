//! Invariant meshes: uniform and log-spaced time grids, solution layers,
//! and the Lagrangian mass-coordinate grid construction.

use crate::error::{Error, Result};

/// Strictly increasing time nodes `t_0 < t_1 < … < t_k`, `t_0 = 0` for the
/// generated meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMesh {
    pub times: Vec<f64>,
}

impl TimeMesh {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "time mesh must be strictly increasing with at least two nodes".into(),
            ));
        }
        Ok(TimeMesh { times })
    }

    pub fn steps(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// One time slice of a discrete solution.
///
/// `x` is strictly increasing; `s` and `rho` are present only for
/// mass-coordinate runs (`rho[i]` is the density of the interval to the
/// right of node `i`; its last entry duplicates the previous interval).
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub s: Option<Vec<f64>>,
    pub rho: Option<Vec<f64>>,
}

impl Layer {
    pub fn new(t: f64, x: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        let layer = Layer {
            t,
            x,
            u,
            s: None,
            rho: None,
        };
        layer.validate()?;
        Ok(layer)
    }

    pub fn with_mass(mut self, s: Vec<f64>, rho: Option<Vec<f64>>) -> Result<Self> {
        self.s = Some(s);
        self.rho = rho;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.u.len() {
            return Err(Error::LayerMismatch(format!(
                "{} nodes vs {} values",
                self.x.len(),
                self.u.len()
            )));
        }
        if self.x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DomainError("layer nodes are not increasing".into()));
        }
        if let Some(s) = &self.s {
            if s.len() != self.x.len() {
                return Err(Error::LayerMismatch("mass coordinate length".into()));
            }
        }
        if let Some(rho) = &self.rho {
            if rho.len() != self.x.len() {
                return Err(Error::LayerMismatch("density length".into()));
            }
            if rho.iter().any(|&r| r <= 0.0) {
                return Err(Error::DomainError("nonpositive density in layer".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Uniform time mesh `t_n = n T / k` on `[0, T]`.
pub fn uniform_time(t_end: f64, k: usize) -> Result<TimeMesh> {
    if t_end <= 0.0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "uniform_time needs T > 0 and k >= 1, got T={t_end}, k={k}"
        )));
    }
    TimeMesh::new((0..=k).map(|n| n as f64 * t_end / k as f64).collect())
}

/// Invariant log-spaced time mesh for the exponential heat coefficient
/// with a constant source:
///
/// ```text
/// t_n = δ ln(1 + (n/k)(e^{δT} - 1)),    n = 0..k .
/// ```
///
/// Maps to a uniform grid under `t̄ = δ(e^{δt} - 1)`.
pub fn log_time_meth22(delta: f64, t_end: f64, k: usize) -> Result<TimeMesh> {
    check_delta(delta)?;
    if t_end <= 0.0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "log_time_meth22 needs T > 0 and k >= 1, got T={t_end}, k={k}"
        )));
    }
    let e = (delta * t_end).exp() - 1.0;
    let mut times: Vec<f64> = (0..=k)
        .map(|n| delta * (1.0 + n as f64 / k as f64 * e).ln())
        .collect();
    times[0] = 0.0;
    times[k] = t_end;
    TimeMesh::new(times)
}

/// Invariant log-spaced time mesh for the power coefficient with a linear
/// source:
///
/// ```text
/// t_n = (δ/σ) ln(1 + (n/k)(e^{δσT} - 1)),    n = 0..k .
/// ```
///
/// Maps to a uniform grid under `t̄ = (δ/σ)(e^{δσt} - 1)`.
pub fn log_time_meth32(delta: f64, sigma: f64, t_end: f64, k: usize) -> Result<TimeMesh> {
    check_delta(delta)?;
    if sigma == 0.0 {
        return Err(Error::InvalidParameter("meth32 needs sigma != 0".into()));
    }
    if t_end <= 0.0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "log_time_meth32 needs T > 0 and k >= 1, got T={t_end}, k={k}"
        )));
    }
    let e = (delta * sigma * t_end).exp() - 1.0;
    let mut times: Vec<f64> = (0..=k)
        .map(|n| delta / sigma * (1.0 + n as f64 / k as f64 * e).ln())
        .collect();
    times[0] = 0.0;
    times[k] = t_end;
    TimeMesh::new(times)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta == 1.0 || delta == -1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "delta must be +1 or -1, got {delta}"
        )))
    }
}

/// Build the initial layer of a mass-coordinate run.
///
/// Starting from `x_0 = x_left`, each subsequent node solves the
/// trapezoidal relation
///
/// ```text
/// (x_{i+1} - x_i)/h_s = (1/2)(1/u0(x_i) + 1/u0(x_{i+1})),
/// ```
///
/// so the s-grid `s_i = i h_s` is uniform while the x-grid adapts to the
/// initial profile.  `u0` must be positive on the generated range.
pub fn init_mass_mesh(
    u0: &dyn Fn(f64) -> f64,
    x_left: f64,
    h_s: f64,
    count: usize,
) -> Result<Layer> {
    if h_s <= 0.0 || count < 2 {
        return Err(Error::InvalidParameter(format!(
            "init_mass_mesh needs h_s > 0 and count >= 2, got h_s={h_s}, count={count}"
        )));
    }
    let check_pos = |x: f64| -> Result<f64> {
        let v = u0(x);
        if v <= 0.0 || !v.is_finite() {
            return Err(Error::NonpositiveDensity { x, value: v });
        }
        Ok(v)
    };

    let mut x = Vec::with_capacity(count);
    let mut u = Vec::with_capacity(count);
    x.push(x_left);
    u.push(check_pos(x_left)?);
    for i in 1..count {
        let xi = x[i - 1];
        let ui = u[i - 1];
        // root of g(d) = d/h_s - (1/u(x_i) + 1/u(x_i + d))/2 in d > 0
        let g = |d: f64| -> Result<f64> {
            Ok(d / h_s - 0.5 * (1.0 / ui + 1.0 / check_pos(xi + d)?))
        };
        let d = solve_step(&g, h_s / ui)?;
        x.push(xi + d);
        u.push(check_pos(xi + d)?);
    }
    let s = (0..count).map(|i| i as f64 * h_s).collect();
    let rho = u.clone();
    Layer::new(0.0, x, u)?.with_mass(s, Some(rho))
}

/// Safeguarded bracket-growth bisection/Newton-free solve of a scalar
/// increasing-root problem to 1e-12.
fn solve_step(g: &dyn Fn(f64) -> Result<f64>, guess: f64) -> Result<f64> {
    let mut lo = guess;
    let mut step = 0;
    while g(lo)? > 0.0 {
        lo *= 0.5;
        step += 1;
        if step > 200 {
            return Err(Error::DomainError("mass-mesh bracket collapse".into()));
        }
    }
    let mut hi = guess.max(lo * 2.0);
    step = 0;
    while g(hi)? < 0.0 {
        hi *= 2.0;
        step += 1;
        if step > 200 {
            return Err(Error::DomainError("mass-mesh bracket blow-up".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_time_nodes() {
        let m = uniform_time(1.0, 4).unwrap();
        assert_eq!(m.times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = uniform_time(2.0, 1).unwrap();
        assert_eq!(m.times, vec![0.0, 2.0]);
        let m = uniform_time(1.0, 3).unwrap();
        let st = m.steps();
        assert!(st.iter().all(|&s| (s - st[0]).abs() < 1e-15));
    }

    #[test]
    fn meth22_endpoints_and_interior() {
        for &delta in &[1.0, -1.0] {
            let m = log_time_meth22(delta, 0.7, 5).unwrap();
            assert_eq!(m.times[0], 0.0);
            assert!((m.times[5] - 0.7).abs() < 1e-15);
        }
        // Direct evaluation at δ=1, T=ln2, k=2, n=1 gives ln(3/2).
        let m = log_time_meth22(1.0, 2.0f64.ln(), 2).unwrap();
        assert!((m.times[1] - 1.5f64.ln()).abs() < 1e-15, "{}", m.times[1]);
    }

    #[test]
    fn meth32_endpoints_and_interior() {
        let m = log_time_meth32(1.0, 2.0, 1.0, 2).unwrap();
        assert_eq!(m.times[0], 0.0);
        assert!((m.times[2] - 1.0).abs() < 1e-15);
        let expect = 0.5 * (1.0 + 0.5 * (2.0f64.exp() - 1.0)).ln();
        assert!((m.times[1] - expect).abs() < 1e-15);
    }

    #[test]
    fn meth22_maps_to_uniform_under_ch22_time_map() {
        for &delta in &[1.0, -1.0] {
            let m = log_time_meth22(delta, 1.0, 50).unwrap();
            let image: Vec<f64> = m
                .times
                .iter()
                .map(|&t| delta * ((delta * t).exp() - 1.0))
                .collect();
            let d0 = image[1] - image[0];
            for w in image.windows(2) {
                assert!(((w[1] - w[0]) - d0).abs() <= 1e-12 * d0.abs());
            }
        }
    }

    #[test]
    fn meth32_maps_to_uniform_under_ch32_time_map() {
        for &(delta, sigma) in &[(1.0, 2.0), (-1.0, 1.0), (1.0, -4.0 / 3.0)] {
            let m = log_time_meth32(delta, sigma, 1.0, 37).unwrap();
            let image: Vec<f64> = m
                .times
                .iter()
                .map(|&t| delta / sigma * ((delta * sigma * t).exp() - 1.0))
                .collect();
            let d0 = image[1] - image[0];
            for w in image.windows(2) {
                assert!(((w[1] - w[0]) - d0).abs() <= 1e-12 * d0.abs());
            }
        }
    }

    #[test]
    fn mass_mesh_constant_profiles() {
        let layer = init_mass_mesh(&|_| 1.0, 0.0, 0.1, 11).unwrap();
        for (i, w) in layer.x.windows(2).enumerate() {
            assert!((w[1] - w[0] - 0.1).abs() < 1e-12, "i={i}");
        }
        let layer = init_mass_mesh(&|_| 2.0, 0.0, 0.1, 11).unwrap();
        for w in layer.x.windows(2) {
            assert!((w[1] - w[0] - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_mesh_linear_profile_first_step() {
        // First step solves d/h_s = (1 + 1/(1+d))/2; bisection oracle.
        let layer = init_mass_mesh(&|x| 1.0 + x, 0.0, 0.1, 3).unwrap();
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid / 0.1 - 0.5 * (1.0 + 1.0 / (1.0 + mid)) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!((layer.x[1] - oracle).abs() < 1e-10, "{} vs {oracle}", layer.x[1]);
        assert!((layer.x[1] - 0.0954).abs() < 5e-4);
    }

    #[test]
    fn mass_mesh_relation_holds_at_every_pair() {
        let u0 = |x: f64| 1.0 + 0.5 * (x * 1.3).sin().powi(2);
        let layer = init_mass_mesh(&u0, -1.0, 0.2, 15).unwrap();
        for i in 0..14 {
            let lhs = (layer.x[i + 1] - layer.x[i]) / 0.2;
            let rhs = 0.5 * (1.0 / u0(layer.x[i]) + 1.0 / u0(layer.x[i + 1]));
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn nonpositive_profile_is_rejected() {
        let r = init_mass_mesh(&|x| 1.0 - x, 0.0, 0.5, 10);
        assert!(matches!(r, Err(Error::NonpositiveDensity { .. })));
    }
}
