//! Elementary float functions routed through `std` or `libm`.
//!
//! `core` does not provide the transcendental functions, so every call site
//! in the crate goes through these shims instead of the inherent `f64`
//! methods.

macro_rules! shim {
    ($($name:ident => $libm:ident),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline(always)]
            pub fn $name(x: f64) -> f64 {
                f64::$name(x)
            }

            #[cfg(not(feature = "std"))]
            #[inline(always)]
            pub fn $name(x: f64) -> f64 {
                libm::$libm(x)
            }
        )*
    };
}

shim! {
    sqrt => sqrt,
    exp => exp,
    ln => log,
    ln_1p => log1p,
    sinh => sinh,
    cosh => cosh,
    tanh => tanh,
    asinh => asinh,
    sin => sin,
    cos => cos,
    ceil => ceil,
}

#[inline(always)]
pub fn abs(x: f64) -> f64 {
    // `f64::abs` is not in `core`; go through the bit pattern.
    f64::from_bits(x.to_bits() & !(1u64 << 63))
}

/// Compensated (Kahan) accumulator for modal sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum - self.carry
    }
}
