//! Truncated Taylor arithmetic for carrying derivatives through the
//! three-term recurrences.
//!
//! A jet stores the coefficients `f(a), f'(a), f''(a)/2!, ...` of an
//! expansion about a point. Pushing jets through a polynomial recurrence
//! yields every derivative of the polynomial at that point in one pass,
//! which is how the derivative scalings of the approximate Green's
//! function are measured without finite differencing.

use crate::real::Real;

/// Expansion to order `N - 1`: `c[k]` is the `k`-th Taylor coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<R: Real, const N: usize> {
    pub c: [R; N],
}

impl<R: Real, const N: usize> Jet<R, N> {
    pub fn zero() -> Self {
        Self {
            c: [R::zero(); N],
        }
    }

    pub fn constant(v: R) -> Self {
        let mut c = [R::zero(); N];
        c[0] = v;
        Self { c }
    }

    /// The identity function expanded about `a`.
    pub fn variable(a: R) -> Self {
        let mut c = [R::zero(); N];
        c[0] = a;
        if N > 1 {
            c[1] = R::one();
        }
        Self { c }
    }

    /// `k`-th derivative, undoing the factorial normalisation.
    pub fn derivative(&self, k: usize) -> R {
        let mut f = R::one();
        for j in 2..=k {
            f = f * R::of_u64(j as u64);
        }
        self.c[k] * f
    }

    pub fn scale(mut self, s: R) -> Self {
        for v in &mut self.c {
            *v = *v * s;
        }
        self
    }

    pub fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a += b;
        }
        self
    }

    pub fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a -= b;
        }
        self
    }

    pub fn neg(mut self) -> Self {
        for v in &mut self.c {
            *v = -*v;
        }
        self
    }

    /// Truncated Cauchy product.
    pub fn mul(self, rhs: Self) -> Self {
        let mut out = [R::zero(); N];
        for i in 0..N {
            for j in 0..N - i {
                out[i + j] += self.c[i] * rhs.c[j];
            }
        }
        Self { c: out }
    }

    /// Multiplication by the variable jet `a + eps`, the only product the
    /// recurrences need; cheaper than a full convolution.
    pub fn mul_variable(self, a: R) -> Self {
        let mut out = [R::zero(); N];
        for i in 0..N {
            out[i] += self.c[i] * a;
            if i + 1 < N {
                out[i + 1] += self.c[i];
            }
        }
        Self { c: out }
    }

    /// Series division; the divisor must have a nonzero constant term,
    /// otherwise IEEE division produces infinities that the caller sees.
    pub fn div(self, rhs: Self) -> Self {
        let mut out = [R::zero(); N];
        for k in 0..N {
            let mut acc = self.c[k];
            for j in 0..k {
                acc -= out[j] * rhs.c[k - j];
            }
            out[k] = acc / rhs.c[0];
        }
        Self { c: out }
    }
}

/// Complex-valued jet as two real jets, avoiding a complex scalar
/// requirement on `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexJet<R: Real, const N: usize> {
    pub re: Jet<R, N>,
    pub im: Jet<R, N>,
}

impl<R: Real, const N: usize> ComplexJet<R, N> {
    pub fn new(re: Jet<R, N>, im: Jet<R, N>) -> Self {
        Self { re, im }
    }

    pub fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re.add(rhs.re),
            im: self.im.add(rhs.im),
        }
    }

    pub fn sub(self, rhs: Self) -> Self {
        Self {
            re: self.re.sub(rhs.re),
            im: self.im.sub(rhs.im),
        }
    }

    pub fn mul(self, rhs: Self) -> Self {
        Self {
            re: self.re.mul(rhs.re).sub(self.im.mul(rhs.im)),
            im: self.re.mul(rhs.im).add(self.im.mul(rhs.re)),
        }
    }

    /// `(a+ib)/(c+id)` via the conjugate, with one real series division
    /// by `c^2 + d^2`.
    pub fn div(self, rhs: Self) -> Self {
        let denom = rhs.re.mul(rhs.re).add(rhs.im.mul(rhs.im));
        let num_re = self.re.mul(rhs.re).add(self.im.mul(rhs.im));
        let num_im = self.im.mul(rhs.re).sub(self.re.mul(rhs.im));
        Self {
            re: num_re.div(denom),
            im: num_im.div(denom),
        }
    }

    /// Derivative of the real and imaginary parts at order `k`.
    pub fn derivative(&self, k: usize) -> (R, R) {
        (self.re.derivative(k), self.im.derivative(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type J = Jet<f64, 4>;

    #[test]
    fn polynomial_derivatives_by_jet() {
        // f(x) = x^3 - 2x + 1 at x = 2: f = 5, f' = 10, f'' = 12, f''' = 6
        let x = J::variable(2.0);
        let f = x
            .mul(x)
            .mul(x)
            .sub(x.scale(2.0))
            .add(J::constant(1.0));
        assert_relative_eq!(f.derivative(0), 5.0);
        assert_relative_eq!(f.derivative(1), 10.0);
        assert_relative_eq!(f.derivative(2), 12.0);
        assert_relative_eq!(f.derivative(3), 6.0);
    }

    #[test]
    fn mul_variable_matches_full_product() {
        let x = J::variable(1.5);
        let f = x.mul(x).add(J::constant(3.0));
        let a = f.mul_variable(1.5);
        let b = f.mul(x);
        for k in 0..4 {
            assert_relative_eq!(a.c[k], b.c[k], max_relative = 1e-15);
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let x = J::variable(0.7);
        let f = x.mul(x).add(J::constant(2.0)).mul_variable(0.7);
        let g = x.sub(J::constant(0.2));
        let h = f.mul(g).div(g);
        for k in 0..4 {
            assert_relative_eq!(h.c[k], f.c[k], max_relative = 1e-13);
        }
    }

    #[test]
    fn rational_function_derivatives() {
        // g(x) = 1 / (1 - x) about x = 0: all Taylor coefficients 1.
        let one = J::constant(1.0);
        let g = one.div(one.sub(J::variable(0.0)));
        for k in 0..4 {
            assert_relative_eq!(g.c[k], 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn complex_jet_division() {
        // h(x) = 1 / (x - i) about x = 0. h = i/(1+ ...) expansions:
        // 1/(x-i) = -1/(i - x) = -(1/i)(1/(1 - x/i)) = i (1 + x/i + (x/i)^2 + ...)
        // = i + x - i x^2 - x^3 ...
        let one = ComplexJet::new(J::constant(1.0), J::zero());
        let den = ComplexJet::new(J::variable(0.0), J::constant(-1.0));
        let h = one.div(den);
        let expect_re = [0.0, 1.0, 0.0, -1.0];
        let expect_im = [1.0, 0.0, -1.0, 0.0];
        for k in 0..4 {
            assert_relative_eq!(h.re.c[k], expect_re[k], epsilon = 1e-14);
            assert_relative_eq!(h.im.c[k], expect_im[k], epsilon = 1e-14);
        }
    }

    #[test]
    fn extended_scalar_jets() {
        use crate::dd::DoubleDouble;
        let x: Jet<DoubleDouble, 3> = Jet::variable(DoubleDouble::from_f64(3.0));
        let f = x.mul(x);
        assert_eq!(f.derivative(0).to_f64(), 9.0);
        assert_eq!(f.derivative(1).to_f64(), 6.0);
        assert_eq!(f.derivative(2).to_f64(), 2.0);
    }
}
