use num_complex::Complex64;

/// Exact flow over time `dt` of the longitudinal pair `(a_k, mu_k)` under
/// `a' = -i w mu`, `mu' = -i w a - nu |k|^2 mu` with `w = |k| / eps`.
/// `eps = inf` decouples the pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagator {
    pub matrix: [[Complex64; 2]; 2],
}

impl Propagator {
    pub fn apply(&self, a: Complex64, mu: Complex64) -> (Complex64, Complex64) {
        let m = &self.matrix;
        (m[0][0] * a + m[0][1] * mu, m[1][0] * a + m[1][1] * mu)
    }

    pub fn compose(&self, other: &Propagator) -> Propagator {
        let (a, b) = (&self.matrix, &other.matrix);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Propagator { matrix: m }
    }
}

/// `e^{c t} (cosh(sqrt(D) t), sinh(sqrt(D) t) / sqrt(D))` for either sign
/// of `D`, without overflow when `c + sqrt(D) <= 0`.
fn damped_pair(c: f64, disc: f64, t: f64) -> (f64, f64) {
    let x = disc * t * t;
    if x.abs() < 1e-4 {
        // cosh(sqrt x) and sinh(sqrt x)/sqrt x as power series in x
        let (mut ch, mut sh, mut term) = (1.0, 1.0, 1.0);
        for n in 1..8 {
            term *= x / ((2 * n - 1) * (2 * n)) as f64;
            ch += term;
            sh += term / (2 * n + 1) as f64;
        }
        let g = (c * t).exp();
        return (g * ch, g * sh * t);
    }
    if disc > 0.0 {
        let s = disc.sqrt();
        let low = ((c - s) * t).exp();
        let e = (2.0 * s * t).exp_m1();
        (low * (0.5 * e + 1.0), low * e / (2.0 * s))
    } else {
        let w = (-disc).sqrt();
        let g = (c * t).exp();
        (g * (w * t).cos(), g * (w * t).sin() / w)
    }
}

/// Exact exponential of `[[0, -i w], [-i w, -nu k^2]]` over `dt`.
pub fn acoustic_viscous_propagator(kabs: f64, dt: f64, eps: f64, nu: f64) -> Propagator {
    let w = if eps.is_infinite() { 0.0 } else { kabs / eps };
    let p = 0.5 * nu * kabs * kabs;
    // G = -p I + N with N = [[p, -iw], [-iw, -p]], N^2 = (p^2 - w^2) I
    let disc = p * p - w * w;
    let (ch, sh) = damped_pair(-p, disc, dt);
    let off = Complex64::new(0.0, -w * sh);
    Propagator {
        matrix: [
            [Complex64::new(ch + p * sh, 0.0), off],
            [off, Complex64::new(ch - p * sh, 0.0)],
        ],
    }
}

/// Transverse velocity factor `e^{-mu |k|^2 dt}`.
pub fn transverse_factor(kabs: f64, dt: f64, mu: f64) -> f64 {
    (-mu * kabs * kabs * dt).exp()
}
