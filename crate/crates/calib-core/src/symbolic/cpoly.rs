//! Complex polynomials as real and imaginary part pairs.

use super::Polynomial;

/// A polynomial with complex values, stored as exact real and imaginary
/// parts. Used to transcribe complex ODE right-hand sides into real
/// coordinates without sign slips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CPoly {
    pub re: Polynomial,
    pub im: Polynomial,
}

impl CPoly {
    pub fn new(re: Polynomial, im: Polynomial) -> Self {
        CPoly { re, im }
    }

    pub fn from_real(re: Polynomial) -> Self {
        CPoly {
            re,
            im: Polynomial::zero(),
        }
    }

    /// The coordinate function `z = x_a + i x_b` for variable indices
    /// `a`, `b`.
    pub fn coord_pair(re_var: usize, im_var: usize) -> Self {
        CPoly {
            re: Polynomial::var(re_var),
            im: Polynomial::var(im_var),
        }
    }

    pub fn conj(&self) -> Self {
        CPoly {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        CPoly {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        CPoly {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
        }
    }

    pub fn neg(&self) -> Self {
        CPoly {
            re: -&self.re,
            im: -&self.im,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        CPoly {
            re: &(&self.re * &other.re) - &(&self.im * &other.im),
            im: &(&self.re * &other.im) + &(&self.im * &other.re),
        }
    }

    /// Multiplication by the imaginary unit.
    pub fn mul_i(&self) -> Self {
        CPoly {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    pub fn scale_real(&self, factor: &Polynomial) -> Self {
        CPoly {
            re: &self.re * factor,
            im: &self.im * factor,
        }
    }

    /// `|z|^2` as a real polynomial.
    pub fn modulus_sq(&self) -> Polynomial {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_expands_correctly() {
        // (x0 + i x1)(x2 + i x3) = x0 x2 - x1 x3 + i (x0 x3 + x1 x2)
        let z = CPoly::coord_pair(0, 1);
        let w = CPoly::coord_pair(2, 3);
        let p = z.mul(&w);
        let x = Polynomial::var;
        assert_eq!(p.re, &(&x(0) * &x(2)) - &(&x(1) * &x(3)));
        assert_eq!(p.im, &(&x(0) * &x(3)) + &(&x(1) * &x(2)));
    }

    #[test]
    fn conjugate_product_gives_modulus() {
        let z = CPoly::coord_pair(0, 1);
        let zz = z.mul(&z.conj());
        assert_eq!(zz.re, z.modulus_sq());
        assert!(zz.im.is_zero());
    }

    #[test]
    fn mul_i_rotates() {
        let z = CPoly::coord_pair(0, 1);
        let iz = z.mul_i();
        assert_eq!(iz.re, -&Polynomial::var(1));
        assert_eq!(iz.im, Polynomial::var(0));
        assert_eq!(iz.mul_i(), z.neg());
    }
}
