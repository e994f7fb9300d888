//! Arithmetic in GF(2^k) for 1 <= k <= 16.
//!
//! Elements are stored as `u16` bit patterns of polynomials over GF(2).
//! Each exponent has one fixed reduction polynomial, so every result is
//! reproducible bit for bit. [`mul_shift_reduce`] is the reference
//! multiplication; [`Gf`] adds log/antilog tables that must agree with it.

use std::sync::OnceLock;

use rand::RngCore;

use crate::error::FieldError;

/// A field symbol: the bit pattern of a polynomial of degree < k.
pub type Sym = u16;

/// Largest supported exponent.
pub const MAX_EXPONENT: u32 = 16;

/// Reduction polynomials indexed by k, written as bitmasks of degree k..0.
///
/// k = 2, 3, 4 and 8 are the usual textbook choices (8 is the AES
/// polynomial); the rest are the low-weight primitive polynomials from the
/// standard tables (Lidl and Niederreiter; Peterson and Weldon).
pub const REDUCTION_POLYS: [u32; 17] = [
    0,
    0b11,
    0b111,
    0b1011,
    0b1_0011,
    0b10_0101,
    0b100_0011,
    0b1000_0011,
    0b1_0001_1011,
    0b10_0001_0001,
    0b100_0000_1001,
    0b1000_0000_0101,
    0b1_0000_0101_0011,
    0b10_0000_0001_1011,
    0b100_0100_0100_0011,
    0b1000_0000_0000_0011,
    0b1_0001_0000_0000_1011,
];

/// Exponent and reduction polynomial of a binary extension field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    k: u8,
    reduction_poly: u32,
}

impl FieldSpec {
    pub fn new(k: u32) -> Result<Self, FieldError> {
        if !(1..=MAX_EXPONENT).contains(&k) {
            return Err(FieldError::UnsupportedExponent(k));
        }
        Ok(Self { k: k as u8, reduction_poly: REDUCTION_POLYS[k as usize] })
    }

    /// Field with `q` elements; `q` must be a power of two in `2..=2^16`.
    pub fn from_q(q: u32) -> Result<Self, FieldError> {
        if q < 2 || !q.is_power_of_two() {
            return Err(FieldError::NotPowerOfTwo(q));
        }
        Self::new(q.trailing_zeros())
    }

    pub fn k(self) -> u32 {
        self.k as u32
    }

    pub fn q(self) -> u32 {
        1 << self.k
    }

    pub fn reduction_poly(self) -> u32 {
        self.reduction_poly
    }

    fn mask(self) -> u32 {
        self.q() - 1
    }
}

/// Carry-less multiply followed by reduction modulo the field polynomial.
pub fn mul_shift_reduce(spec: FieldSpec, a: Sym, b: Sym) -> Sym {
    let k = spec.k();
    let poly = spec.reduction_poly();
    let top = 1u32 << k;
    let mut a = a as u32;
    let mut b = b as u32;
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
    }
    acc as Sym
}

/// Table-driven arithmetic context for one field.
#[derive(Debug)]
pub struct Gf {
    spec: FieldSpec,
    generator: Sym,
    log: Vec<u32>,
    exp: Vec<Sym>,
}

static FIELDS: [OnceLock<Gf>; 17] = [const { OnceLock::new() }; 17];

impl Gf {
    /// Builds the tables from scratch. Prefer [`Gf::get`], which caches.
    pub fn build(spec: FieldSpec) -> Self {
        let order = spec.q() - 1;
        let generator = (1..=spec.mask())
            .map(|g| g as Sym)
            .find(|&g| multiplicative_order(spec, g) == order)
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = vec![0 as Sym; 2 * order as usize];
        let mut log = vec![0u32; spec.q() as usize];
        let mut x: Sym = 1;
        for i in 0..order {
            exp[i as usize] = x;
            log[x as usize] = i;
            x = mul_shift_reduce(spec, x, generator);
        }
        for i in order as usize..exp.len() {
            exp[i] = exp[i - order as usize];
        }
        Self { spec, generator, log, exp }
    }

    /// Shared context for GF(2^k).
    pub fn get(k: u32) -> Result<&'static Gf, FieldError> {
        let spec = FieldSpec::new(k)?;
        Ok(FIELDS[k as usize].get_or_init(|| Gf::build(spec)))
    }

    /// Shared context for the field of size `q`.
    pub fn for_q(q: u32) -> Result<&'static Gf, FieldError> {
        Self::get(FieldSpec::from_q(q)?.k())
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn q(&self) -> u32 {
        self.spec.q()
    }

    /// Primitive element used to index the tables.
    pub fn generator(&self) -> Sym {
        self.generator
    }

    #[inline]
    pub fn add(&self, a: Sym, b: Sym) -> Sym {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Sym, b: Sym) -> Sym {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: Sym) -> Result<Sym, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let order = self.q() - 1;
        Ok(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    /// `a / b`; `b` must be nonzero.
    pub fn div(&self, a: Sym, b: Sym) -> Result<Sym, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Uniform draw from the field.
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Sym {
        (rng.next_u32() & self.spec.mask()) as Sym
    }

    /// Dot product of two equal-length slices.
    pub fn dot(&self, a: &[Sym], b: &[Sym]) -> Sym {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| acc ^ self.mul(x, y))
    }

    /// `dst += c * src`, element-wise.
    #[inline]
    pub fn axpy(&self, dst: &mut [Sym], c: Sym, src: &[Sym]) {
        if c == 0 {
            return;
        }
        let lc = self.log[c as usize];
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= self.exp[(lc + self.log[s as usize]) as usize];
            }
        }
    }

    /// `v *= c`, element-wise.
    pub fn scale(&self, v: &mut [Sym], c: Sym) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}

fn multiplicative_order(spec: FieldSpec, g: Sym) -> u32 {
    let mut x = g;
    let mut n = 1;
    while x != 1 {
        x = mul_shift_reduce(spec, x, g);
        n += 1;
        if n > spec.q() {
            return 0;
        }
    }
    n
}

/// A field element tagged with its field, for checked arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: Sym,
    field: FieldSpec,
}

impl FieldElement {
    pub fn new(field: FieldSpec, value: u32) -> Result<Self, FieldError> {
        if value >= field.q() {
            return Err(FieldError::OutOfRange { value, q: field.q() });
        }
        Ok(Self { value: value as Sym, field })
    }

    pub fn zero(field: FieldSpec) -> Self {
        Self { value: 0, field }
    }

    pub fn one(field: FieldSpec) -> Self {
        Self { value: 1, field }
    }

    pub fn value(self) -> Sym {
        self.value
    }

    pub fn field(self) -> FieldSpec {
        self.field
    }

    fn same_field(self, other: Self) -> Result<FieldSpec, FieldError> {
        if self.field == other.field {
            Ok(self.field)
        } else {
            Err(FieldError::Mismatch { left: self.field.q(), right: other.field.q() })
        }
    }
}

pub fn ff_add(a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
    let field = a.same_field(b)?;
    Ok(FieldElement { value: a.value ^ b.value, field })
}

pub fn ff_mul(a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
    let field = a.same_field(b)?;
    Ok(FieldElement { value: mul_shift_reduce(field, a.value, b.value), field })
}

pub fn ff_inv(a: FieldElement) -> Result<FieldElement, FieldError> {
    let gf = Gf::get(a.field.k())?;
    Ok(FieldElement { value: gf.inv(a.value)?, field: a.field })
}

pub fn ff_sample<R: RngCore + ?Sized>(field: FieldSpec, rng: &mut R) -> FieldElement {
    FieldElement { value: (rng.next_u32() & field.mask()) as Sym, field }
}
