/// Canonical 1-d β-Hölder drift `L·sign(x−c)|x−c|^β`.
///
/// On either side of `c` the Hölder seminorm is `L`; across `c` it is
/// `2^{1−β}L`, attained at `x − c = c − y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderDrift {
    pub beta: f64,
    pub scale: f64,
    pub center: f64,
}

impl HolderDrift {
    /// `sup |b(x) − b(y)| / |x − y|^β` over the whole line.
    pub fn seminorm(&self) -> f64 {
        (1.0 - self.beta).exp2() * self.scale.abs()
    }
}

pub fn holder_eval(spec: &HolderDrift, x: f64) -> f64 {
    let dx = x - spec.center;
    spec.scale * dx.signum() * dx.abs().powf(spec.beta)
}

/// Lacunary series `(L/C_β) Σ_{k<K} 2^{−kβ} sin(2^k (x−c))`.
///
/// Unlike the canonical power profile, which is smooth away from its
/// center, this function is rough at every scale down to `2^{−K}`. The
/// normalization `C_β = 1/(1 − 2^{β−1}) + 2/(1 − 2^{−β})` bounds its
/// β-Hölder seminorm by `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LacunaryHolder {
    pub beta: f64,
    pub scale: f64,
    pub center: f64,
    pub terms: u32,
}

impl LacunaryHolder {
    pub fn normalization(beta: f64) -> f64 {
        1.0 / (1.0 - (beta - 1.0).exp2()) + 2.0 / (1.0 - (-beta).exp2())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let dx = x - self.center;
        let mut acc = 0.0;
        let mut freq = 1.0;
        let mut amp = 1.0;
        let decay = (-self.beta).exp2();
        for _ in 0..self.terms {
            acc += amp * (freq * dx).sin();
            freq *= 2.0;
            amp *= decay;
        }
        self.scale * acc / Self::normalization(self.beta)
    }

    /// `sup |b|`
    pub fn sup_bound(&self) -> f64 {
        let decay = (-self.beta).exp2();
        let series = (1.0 - decay.powi(self.terms as i32)) / (1.0 - decay);
        self.scale * series / Self::normalization(self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_profile() {
        let h = HolderDrift {
            beta: 0.5,
            scale: 1.0,
            center: 0.0,
        };
        assert_eq!(holder_eval(&h, 4.0), 2.0);
        assert_eq!(holder_eval(&h, 0.0), 0.0);
        assert_eq!(holder_eval(&h, -4.0), -2.0);
        assert!((holder_eval(&h, 1.0) - holder_eval(&h, 0.0)).abs() <= 1.0);
    }

    #[test]
    fn lacunary_bounded() {
        let w = LacunaryHolder {
            beta: 0.4,
            scale: 1.0,
            center: 0.0,
            terms: 16,
        };
        let bound = w.sup_bound();
        for i in 0..10_000 {
            let x = i as f64 * 7e-4;
            assert!(w.eval(x).abs() <= bound);
        }
    }
}
