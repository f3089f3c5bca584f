//! Closed-form reference solutions and oracles.
//!
//! The centerpiece is the fundamental-solution family of the linear heat
//! equation: on the dilating mesh `x_i = x_i⁰ (t + t0)/t0` the explicit
//! moving-mesh model reproduces it *exactly*, which makes the family a
//! machine-precision regression oracle for the whole moving-mesh pipeline.
//! Superposed kernels with their mixed trajectories cover the
//! superposition experiments, and the reduced system of the
//! time-translation subalgebra provides the optimal-system check.

use crate::error::{Error, Result};

/// One member of the fundamental-solution family,
/// `u(x,t) = C (t0/(t+t0))^{1/2} exp(-(x-a)²/(4(t+t0)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSolution {
    pub c: f64,
    pub t0: f64,
    /// Center; the printed family is the `a = 0` member.
    pub a: f64,
}

impl KernelSolution {
    pub fn new(c: f64, t0: f64, a: f64) -> Result<Self> {
        if c <= 0.0 || t0 <= 0.0 {
            return Err(Error::InvalidParameter(
                "kernel needs C > 0 and t0 > 0".into(),
            ));
        }
        Ok(KernelSolution { c, t0, a })
    }

    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        if t <= -self.t0 {
            return Err(Error::DomainError(format!(
                "kernel value needs t > -t0, got t={t}"
            )));
        }
        let w = t + self.t0;
        Ok(self.c * (self.t0 / w).sqrt() * (-(x - self.a) * (x - self.a) / (4.0 * w)).exp())
    }

    /// Node trajectory of the invariant mesh: dilation about the center.
    pub fn mesh_at(&self, x0: &[f64], t: f64) -> Vec<f64> {
        let f = (t + self.t0) / self.t0;
        x0.iter().map(|&x| self.a + (x - self.a) * f).collect()
    }

    /// Trajectory velocity `dx/dt = (x - a)/(t + t0)`.
    pub fn trajectory_velocity(&self, t: f64, x: f64) -> f64 {
        (x - self.a) / (t + self.t0)
    }
}

/// `kernel_value` as a free function mirroring the library naming.
pub fn kernel_value(k: &KernelSolution, t: f64, x: f64) -> Result<f64> {
    k.value(t, x)
}

/// Image of initial nodes under the kernel's dilating mesh.
pub fn kernel_mesh(k: &KernelSolution, x0: &[f64], t: f64) -> Vec<f64> {
    k.mesh_at(x0, t)
}

/// Weighted pair of kernels, `U = α U₁ + β U₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperposedKernels {
    pub alpha: f64,
    pub beta: f64,
    pub k1: KernelSolution,
    pub k2: KernelSolution,
}

impl SuperposedKernels {
    pub fn new(alpha: f64, beta: f64, k1: KernelSolution, k2: KernelSolution) -> Result<Self> {
        if alpha < 0.0 || beta < 0.0 || (alpha == 0.0 && beta == 0.0) {
            return Err(Error::InvalidParameter(
                "superposition weights must be nonnegative, not both zero".into(),
            ));
        }
        Ok(SuperposedKernels { alpha, beta, k1, k2 })
    }

    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.alpha * self.k1.value(t, x)? + self.beta * self.k2.value(t, x)?)
    }

    /// Velocity of the mixed trajectory: the convex combination of the
    /// component velocities weighted by their share of the amplitude,
    /// equal to `-2 ∂ₓ ln(αU₁ + βU₂)`.
    pub fn trajectory_rhs(&self, t: f64, x: f64) -> Result<f64> {
        let w1 = self.alpha * self.k1.value(t, x)?;
        let w2 = self.beta * self.k2.value(t, x)?;
        let total = w1 + w2;
        if total <= 0.0 {
            return Err(Error::DomainError(
                "superposition trajectory: vanishing denominator".into(),
            ));
        }
        Ok((w1 * self.k1.trajectory_velocity(t, x) + w2 * self.k2.trajectory_velocity(t, x))
            / total)
    }
}

pub fn superposition_trajectory_rhs(sp: &SuperposedKernels, t: f64, x: f64) -> Result<f64> {
    sp.trajectory_rhs(t, x)
}

/// Integrate the mixed-trajectory equation with classical RK4 on a fixed
/// step; the oracle for the moving-mesh node paths.
pub fn integrate_trajectory(
    sp: &SuperposedKernels,
    x0: f64,
    t_end: f64,
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    let h = t_end / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0;
    let mut t = 0.0;
    out.push((t, x));
    for _ in 0..steps {
        let k1 = sp.trajectory_rhs(t, x)?;
        let k2 = sp.trajectory_rhs(t + 0.5 * h, x + 0.5 * h * k1)?;
        let k3 = sp.trajectory_rhs(t + 0.5 * h, x + 0.5 * h * k2)?;
        let k4 = sp.trajectory_rhs(t + h, x + h * k3)?;
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        out.push((t, x));
    }
    Ok(out)
}

/// Which node the reduced drift lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Y3Branch {
    MinusHMinus,
    Zero,
    PlusHPlus,
}

impl Y3Branch {
    fn dx(&self, h_minus: f64, h_plus: f64) -> f64 {
        match self {
            Y3Branch::MinusHMinus => -h_minus,
            Y3Branch::Zero => 0.0,
            Y3Branch::PlusHPlus => h_plus,
        }
    }
}

/// Residuals of the reduced system of the time-translation subalgebra
/// `∂t + c u ∂u`: solutions of the moving model of the form
/// `u = e^{ct} f(x)` on a uniform time mesh, projected back onto the grid
/// by restricting the drift to `Δx ∈ {-h⁻, 0, h⁺}`.
///
/// `f` supplies the profile at `x - h⁻`, `x`, `x + h⁺`; returns the
/// defects of the drift equation and the amplitude equation.
pub fn reduced_y3_residuals(
    f_minus: f64,
    f_center: f64,
    f_plus: f64,
    h_minus: f64,
    h_plus: f64,
    c: f64,
    tau: f64,
    branch: Y3Branch,
) -> Result<(f64, f64)> {
    if f_minus <= 0.0 || f_center <= 0.0 || f_plus <= 0.0 {
        return Err(Error::DomainError("reduced system needs positive f".into()));
    }
    if tau <= 0.0 || h_minus <= 0.0 || h_plus <= 0.0 {
        return Err(Error::DomainError("reduced system needs positive steps".into()));
    }
    let dx = branch.dx(h_minus, h_plus);
    let f_dx = match branch {
        Y3Branch::MinusHMinus => f_minus,
        Y3Branch::Zero => f_center,
        Y3Branch::PlusHPlus => f_plus,
    };
    let hsum = h_plus + h_minus;
    let lp = (f_plus / f_center).ln();
    let lm = (f_minus / f_center).ln();
    let r1 = dx - 2.0 * tau / hsum * (-(h_minus / h_plus) * lp + (h_plus / h_minus) * lm);
    let r2 = (f_center / f_dx).powi(2) * (-2.0 * c * tau - 0.5 * dx * dx / tau).exp()
        - (1.0 - 4.0 * tau / hsum * (lp / h_plus + lm / h_minus));
    Ok((r1, r2))
}

/// Facts about the optimal system of one-dimensional subalgebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimalSystemOp {
    /// Space translation: constant solutions on a static mesh.
    Y1,
    /// Pure amplitude scaling: no invariant solutions exist.
    Y2,
    /// Time translation combined with amplitude growth.
    Y3,
    Y4,
    Y5,
    Y6,
}

impl OptimalSystemOp {
    pub fn has_invariant_solution(&self) -> bool {
        !matches!(self, OptimalSystemOp::Y2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_normalization_and_symmetry() {
        let k = KernelSolution::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(k.value(0.0, 0.0).unwrap(), 1.0);
        let left = k.value(0.7, -1.3).unwrap();
        let right = k.value(0.7, 1.3).unwrap();
        assert!((left - right).abs() < 1e-16);
        // direct evaluation at (t,x) = (1,2)
        let v = k.value(1.0, 2.0).unwrap();
        let expect = 0.5f64.sqrt() * (-0.5f64).exp();
        assert!((v - expect).abs() < 1e-15);
        assert!((v - 0.4288819).abs() < 1e-7);
    }

    #[test]
    fn kernel_mesh_dilates() {
        let k = KernelSolution::new(1.0, 1.0, 0.0).unwrap();
        let x0 = [-1.0, 0.3, 2.0];
        assert_eq!(k.mesh_at(&x0, 0.0), x0.to_vec());
        let doubled = k.mesh_at(&x0, 1.0);
        for (a, b) in x0.iter().zip(&doubled) {
            assert!((2.0 * a - b).abs() < 1e-15);
        }
        let x = k.mesh_at(&[0.3], 0.5);
        assert!((x[0] - 0.45).abs() < 1e-15);
    }

    #[test]
    fn kernel_satisfies_heat_equation() {
        // high-order finite differencing of u_t - u_xx at random points
        let k = KernelSolution::new(1.3, 0.8, 0.4).unwrap();
        let pts = [(0.2, 0.5), (1.0, -0.7), (2.3, 1.9)];
        for &(t, x) in &pts {
            let e = 1e-4;
            let u_t = (k.value(t + e, x).unwrap() - k.value(t - e, x).unwrap()) / (2.0 * e)
                - (k.value(t + 2.0 * e, x).unwrap() - 2.0 * k.value(t + e, x).unwrap()
                    + 2.0 * k.value(t - e, x).unwrap()
                    - k.value(t - 2.0 * e, x).unwrap())
                    / (12.0 * e)
                    * 2.0; // 4th-order central first derivative
            let u_t4 = (-k.value(t + 2.0 * e, x).unwrap() + 8.0 * k.value(t + e, x).unwrap()
                - 8.0 * k.value(t - e, x).unwrap()
                + k.value(t - 2.0 * e, x).unwrap())
                / (12.0 * e);
            let _ = u_t;
            let u_xx = (-k.value(t, x + 2.0 * e).unwrap() + 16.0 * k.value(t, x + e).unwrap()
                - 30.0 * k.value(t, x).unwrap()
                + 16.0 * k.value(t, x - e).unwrap()
                - k.value(t, x - 2.0 * e).unwrap())
                / (12.0 * e * e);
            assert!((u_t4 - u_xx).abs() < 1e-6, "defect {:e}", (u_t4 - u_xx).abs());
        }
    }

    #[test]
    fn single_kernel_trajectory_velocity() {
        let k1 = KernelSolution::new(1.0, 1.0, 2.0).unwrap();
        let k2 = KernelSolution::new(1.0, 1.0, -5.0).unwrap();
        let sp = SuperposedKernels::new(1.0, 0.0, k1, k2).unwrap();
        let v = sp.trajectory_rhs(0.5, 3.0).unwrap();
        assert!((v - (3.0 - 2.0) / (0.5 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn symmetric_superposition_is_stationary_at_origin() {
        let k1 = KernelSolution::new(1.0, 10.0, -8.0).unwrap();
        let k2 = KernelSolution::new(1.0, 10.0, 8.0).unwrap();
        let sp = SuperposedKernels::new(1.0, 1.0, k1, k2).unwrap();
        assert!(sp.trajectory_rhs(0.0, 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn trajectory_matches_log_derivative() {
        // dx/dt = -2 u_x/u, checked by central differencing of ln U
        let k1 = KernelSolution::new(1.0, 10.0, -8.0).unwrap();
        let k2 = KernelSolution::new(1.0, 10.0, 8.0).unwrap();
        let sp = SuperposedKernels::new(1.0, 1.0, k1, k2).unwrap();
        for &(t, x) in &[(0.0, 4.0), (1.5, -2.0), (3.0, 7.5)] {
            let direct = sp.trajectory_rhs(t, x).unwrap();
            let e = 1e-5;
            let dlnu = (sp.value(t, x + e).unwrap().ln() - sp.value(t, x - e).unwrap().ln())
                / (2.0 * e);
            assert!(
                (direct + 2.0 * dlnu).abs() < 1e-8,
                "defect {:e}",
                (direct + 2.0 * dlnu).abs()
            );
        }
    }

    #[test]
    fn reduced_system_constant_profile() {
        // constant f with c = 0 solves both equations on the zero branch
        let (r1, r2) =
            reduced_y3_residuals(2.0, 2.0, 2.0, 0.3, 0.3, 0.0, 0.1, Y3Branch::Zero).unwrap();
        assert!(r1.abs() < 1e-15 && r2.abs() < 1e-15);
        // c ≠ 0 forces a nonzero amplitude defect
        let (_, r2) =
            reduced_y3_residuals(2.0, 2.0, 2.0, 0.3, 0.3, 1.0, 0.1, Y3Branch::Zero).unwrap();
        assert!(((-0.2f64).exp() - 1.0 - r2).abs() < 1e-15);
    }

    #[test]
    fn reduced_system_exponential_profile_is_exact() {
        // branch Δx = h⁺ with h² = 4cτ² carries the traveling exponential
        // profile f = e^{-λ x}, λ = h/(2τ), exactly
        let c = 1.0f64;
        let tau = 0.1;
        let h = 2.0 * tau * c.sqrt();
        let lambda = h / (2.0 * tau);
        let f = |x: f64| (-lambda * x).exp();
        for i in 0..5 {
            let x = i as f64 * h;
            let (r1, r2) = reduced_y3_residuals(
                f(x - h),
                f(x),
                f(x + h),
                h,
                h,
                c,
                tau,
                Y3Branch::PlusHPlus,
            )
            .unwrap();
            assert!(r1.abs() < 1e-13 && r2.abs() < 1e-13, "{r1:e} {r2:e}");
        }
    }

    #[test]
    fn reduced_system_marching_solve_re_substitutes() {
        // seed f_0, root-find f_1 from the amplitude equation, then march
        // the drift recurrence; all interior residuals must vanish
        let c = 1.0f64;
        let tau = 0.1;
        let h = 2.0 * tau * c.sqrt();
        let ratio = (-h * h / tau).exp(); // f_{i+1} = f_{i-1} e^{-h²/τ}
        let f0 = 1.0;
        // scalar solve for f1 via the amplitude equation at node 1
        let g = |f1: f64| {
            let f2 = f0 * ratio;
            reduced_y3_residuals(f0, f1, f2, h, h, c, tau, Y3Branch::PlusHPlus)
                .unwrap()
                .1
        };
        let (mut lo, mut hi) = (1e-3, 1.0);
        assert!(g(lo) * g(hi) < 0.0, "bracket: {} {}", g(lo), g(hi));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) * g(lo) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let f1 = 0.5 * (lo + hi);
        let mut f = vec![f0, f1];
        for i in 2..8 {
            let v = f[i - 2] * ratio;
            f.push(v);
        }
        for i in 1..7 {
            let (r1, r2) = reduced_y3_residuals(
                f[i - 1],
                f[i],
                f[i + 1],
                h,
                h,
                c,
                tau,
                Y3Branch::PlusHPlus,
            )
            .unwrap();
            assert!(r1.abs() < 1e-10 && r2.abs() < 1e-10, "node {i}: {r1:e} {r2:e}");
        }
    }

    #[test]
    fn optimal_system_facts() {
        assert!(OptimalSystemOp::Y1.has_invariant_solution());
        assert!(!OptimalSystemOp::Y2.has_invariant_solution());
        assert!(OptimalSystemOp::Y3.has_invariant_solution());
    }
}
