use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use num_traits::{One, Zero};

/// Scalar field the constructions are generic over.
///
/// `value` projects onto the underlying complex number; pivoting, trimming
/// and collision checks only ever look at it (or at `magnitude`).
pub trait Field:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    fn from_c64(z: Complex64) -> Self;

    fn value(&self) -> Complex64;

    /// Principal-branch power `self^e`.
    fn powc(self, e: Complex64) -> Self;

    /// Size used when trimming; covers every slot of the number.
    fn magnitude(&self) -> f64;

    fn is_finite(&self) -> bool;

    fn from_f64(x: f64) -> Self {
        Self::from_c64(Complex64::new(x, 0.0))
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn scale(self, s: f64) -> Self {
        self * Self::from_f64(s)
    }
}

impl Field for Complex64 {
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn value(&self) -> Complex64 {
        *self
    }
    fn powc(self, e: Complex64) -> Self {
        if self.is_zero() {
            return if e.is_zero() { Complex64::one() } else { Complex64::zero() };
        }
        Complex64::powc(self, e)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Forward-mode dual number over the complex numbers: `val + der·ε`, ε² = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub val: Complex64,
    pub der: Complex64,
}

impl Dual {
    pub fn new(val: Complex64, der: Complex64) -> Self {
        Dual { val, der }
    }

    pub fn constant(val: Complex64) -> Self {
        Dual { val, der: Complex64::zero() }
    }

    pub fn variable(val: Complex64) -> Self {
        Dual { val, der: Complex64::one() }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.val + o.val, self.der + o.der)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.val - o.val, self.der - o.der)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.val * o.val, self.der * o.val + self.val * o.der)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let v = self.val / o.val;
        Dual::new(v, (self.der - v * o.der) / o.val)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.val, -self.der)
    }
}

impl AddAssign for Dual {
    fn add_assign(&mut self, o: Dual) {
        *self = *self + o;
    }
}

impl SubAssign for Dual {
    fn sub_assign(&mut self, o: Dual) {
        *self = *self - o;
    }
}

impl MulAssign for Dual {
    fn mul_assign(&mut self, o: Dual) {
        *self = *self * o;
    }
}

impl DivAssign for Dual {
    fn div_assign(&mut self, o: Dual) {
        *self = *self / o;
    }
}

impl Zero for Dual {
    fn zero() -> Self {
        Dual::constant(Complex64::zero())
    }
    fn is_zero(&self) -> bool {
        self.val.is_zero() && self.der.is_zero()
    }
}

impl One for Dual {
    fn one() -> Self {
        Dual::constant(Complex64::one())
    }
}

impl Field for Dual {
    fn from_c64(z: Complex64) -> Self {
        Dual::constant(z)
    }
    fn value(&self) -> Complex64 {
        self.val
    }
    fn powc(self, e: Complex64) -> Self {
        if self.val.is_zero() {
            return if e.is_zero() { Dual::one() } else { Dual::zero() };
        }
        let v = self.val.powc(e);
        Dual::new(v, e * v / self.val * self.der)
    }
    fn magnitude(&self) -> f64 {
        self.val.norm().max(self.der.norm())
    }
    fn is_finite(&self) -> bool {
        Field::is_finite(&self.val) && Field::is_finite(&self.der)
    }
}
