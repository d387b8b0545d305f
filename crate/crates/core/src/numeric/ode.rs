//! Dormand-Prince 5(4) integration of a scalar ODE `y' = f(t, y)`.

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible step relative to `max(1, |t|)`.
    pub min_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            min_step: 1e-14,
        }
    }
}

/// Why [`advance`] stopped before reaching its target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stall {
    /// Step size fell below the floor; the solution is not resolvable past `t`.
    StepCollapse { t: f64, y: f64 },
    /// The right-hand side produced a non-finite value past `t`.
    NonFinite { t: f64, y: f64 },
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Difference between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates from `(t0, y0)` to `t1`, starting with step `h`. On success
/// returns `y(t1)` and the last accepted step size (a good guess for the
/// next call).
pub fn advance<F: Fn(f64, f64) -> f64>(
    f: &F,
    t0: f64,
    y0: f64,
    t1: f64,
    h: f64,
    tol: Tolerances,
) -> Result<(f64, f64), Stall> {
    let mut t = t0;
    let mut y = y0;
    let mut h = h.min(t1 - t0).max(0.0);
    let mut last_ok = h;
    let mut k = [0.0; 7];
    k[0] = f(t, y);
    if !k[0].is_finite() {
        return Err(Stall::NonFinite { t, y });
    }

    while t < t1 {
        let floor = tol.min_step * t.abs().max(1.0);
        if h < floor {
            return Err(Stall::StepCollapse { t, y });
        }
        if t + h > t1 {
            h = t1 - t;
        }
        let mut finite = true;
        for s in 1..7 {
            let incr: f64 = (0..s).map(|j| A[s][j] * k[j]).sum();
            k[s] = f(t + C[s] * h, y + h * incr);
            if !k[s].is_finite() {
                finite = false;
                break;
            }
        }
        if !finite {
            h *= 0.25;
            continue;
        }
        let y_new = y + h * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let err = (h * (0..7).map(|j| E[j] * k[j]).sum::<f64>()).abs();
        let scale = tol.atol + tol.rtol * y.abs().max(y_new.abs());
        let ratio = err / scale;
        if ratio <= 1.0 {
            t = if t1 - (t + h) < floor { t1 } else { t + h };
            y = y_new;
            k[0] = k[6];
            last_ok = h;
            let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).min(5.0) };
            h *= grow;
        } else {
            h *= (0.9 * ratio.powf(-0.2)).max(0.1);
        }
    }
    Ok((y, last_ok))
}
