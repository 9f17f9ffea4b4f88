//! Exact univariate polynomials and rational functions over ℚ, plus real-root
//! isolation by Sturm sequences.
//!
//! A [`Poly`] is stored as a rational content times a primitive integer
//! polynomial with positive leading coefficient. Products of primitive
//! polynomials are primitive (Gauss), so multiplication never needs a gcd and
//! all heavy lifting happens on `BigInt`s.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar.
pub type BigRat = BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RatPolyError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("evaluation at a pole near y = {approx}")]
    Pole { approx: f64 },
    #[error("leading term of the zero function is undefined")]
    ZeroInput,
    #[error("non-finite evaluation point {0}")]
    NonFinite(f64),
}

fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational from an f64 (every finite double is a dyadic rational).
pub fn rat_from_f64(x: f64) -> Result<BigRat, RatPolyError> {
    BigRat::from_float(x).ok_or(RatPolyError::NonFinite(x))
}

/// Correctly rounded conversion of an exact rational to f64.
pub fn rat_to_f64(x: &BigRat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn gcd_all(c: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for x in c {
        if g.is_one() {
            break;
        }
        g = g.gcd(x);
    }
    g
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Pseudo-remainder of `a` by `b` with a *positive* multiplier, so signs of
/// Sturm-chain members are preserved.
fn int_prem_positive(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = &b[db];
    let lb_abs = lb.abs();
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        // r <- |lb|·r − sgn(lb)·lr·x^{dr−db}·b
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= &lb_abs;
        }
        let f = if lb.is_negative() { -lr } else { lr };
        for (j, bj) in b.iter().enumerate() {
            r[j + shift] -= &f * bj;
        }
        trim(&mut r);
    }
    r
}

fn primitive_part(mut v: Vec<BigInt>) -> Vec<BigInt> {
    trim(&mut v);
    if v.is_empty() {
        return v;
    }
    let g = gcd_all(&v);
    if !g.is_one() {
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
    v
}

/// Exact polynomial over ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    content: BigRat,
    prim: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { content: BigRat::zero(), prim: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRat::one())
    }

    pub fn constant(c: BigRat) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: BigRat, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut prim = vec![BigInt::zero(); k + 1];
        prim[k] = BigInt::one();
        Poly { content: c, prim }
    }

    /// The identity polynomial `y`.
    pub fn y() -> Self {
        Self::monomial(BigRat::one(), 1)
    }

    /// Build from ascending rational coefficients.
    pub fn from_coeffs(coeffs: Vec<BigRat>) -> Self {
        let l = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect();
        Self::from_scaled_ints(BigRat::new(BigInt::one(), l), ints)
    }

    /// Build from ascending integer coefficients.
    pub fn from_ints(ints: Vec<BigInt>) -> Self {
        Self::from_scaled_ints(BigRat::one(), ints)
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::from_ints(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// `scale · Σ ints[i] yⁱ`, normalised.
    fn from_scaled_ints(scale: BigRat, mut ints: Vec<BigInt>) -> Self {
        trim(&mut ints);
        if ints.is_empty() || scale.is_zero() {
            return Self::zero();
        }
        let mut g = gcd_all(&ints);
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for c in ints.iter_mut() {
                *c /= &g;
            }
        }
        Poly { content: scale * BigRat::from_integer(g), prim: ints }
    }

    pub fn is_zero(&self) -> bool {
        self.prim.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.prim.len().checked_sub(1)
    }

    /// Ascending rational coefficients (empty for the zero polynomial).
    pub fn coeffs(&self) -> Vec<BigRat> {
        self.prim.iter().map(|c| &self.content * BigRat::from_integer(c.clone())).collect()
    }

    pub fn coeff(&self, i: usize) -> BigRat {
        self.prim
            .get(i)
            .map(|c| &self.content * BigRat::from_integer(c.clone()))
            .unwrap_or_else(BigRat::zero)
    }

    pub fn leading(&self) -> BigRat {
        self.degree().map(|d| self.coeff(d)).unwrap_or_else(BigRat::zero)
    }

    /// Content and primitive integer part (`self = content · prim`).
    pub fn content_and_primitive(&self) -> (&BigRat, &[BigInt]) {
        (&self.content, &self.prim)
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.leading().is_one()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lc = self.prim.last().unwrap().clone();
        Poly { content: BigRat::new(BigInt::one(), lc), prim: self.prim.clone() }
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        if c.is_zero() || self.is_zero() {
            return Self::zero();
        }
        Poly { content: &self.content * c, prim: self.prim.clone() }
    }

    pub fn neg(&self) -> Self {
        Poly { content: -&self.content, prim: self.prim.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lin_comb(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin_comb(other, true)
    }

    fn lin_comb(&self, other: &Self, subtract: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if subtract { other.neg() } else { other.clone() };
        }
        let (a, b) = (&self.content, &other.content);
        let l = a.denom().lcm(b.denom());
        let fa = a.numer() * (&l / a.denom());
        let mut fb = b.numer() * (&l / b.denom());
        if subtract {
            fb = -fb;
        }
        let g = fa.gcd(&fb);
        let (fa, fb) = (fa / &g, fb / &g);
        let n = self.prim.len().max(other.prim.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.prim.iter().enumerate() {
            out[i] += &fa * c;
        }
        for (i, c) in other.prim.iter().enumerate() {
            out[i] += &fb * c;
        }
        Self::from_scaled_ints(BigRat::new(g, l), out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Poly { content: &self.content * &other.content, prim: int_mul(&self.prim, &other.prim) }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.prim.len() <= 1 {
            return Self::zero();
        }
        let ints: Vec<BigInt> =
            self.prim.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        Self::from_scaled_ints(self.content.clone(), ints)
    }

    /// Exact quotient and remainder over ℚ.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.degree() < d.degree() {
            return (Self::zero(), self.clone());
        }
        let a = self.coeffs();
        let b = d.coeffs();
        let db = b.len() - 1;
        let inv = BigRat::one() / &b[db];
        let mut r = a;
        let mut q = vec![BigRat::zero(); r.len() - db];
        for k in (0..q.len()).rev() {
            let c = &r[k + db] * &inv;
            if !c.is_zero() {
                for (j, bj) in b.iter().enumerate() {
                    r[k + j] -= &c * bj;
                }
            }
            q[k] = c;
        }
        r.truncate(db);
        (Self::from_coeffs(q), Self::from_coeffs(r))
    }

    /// Exact division when `d` is known to divide `self`.
    pub fn div_exact(&self, d: &Self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (q, r) = Self::div_rem_primitive(&self.prim, &d.prim);
        debug_assert!(r, "div_exact: nonzero remainder");
        Poly { content: &self.content / &d.content, prim: q }
    }

    /// Integer division of primitive parts: primitive·primitive = primitive, so an
    /// exact quotient of primitive polynomials has integer coefficients.
    fn div_rem_primitive(a: &[BigInt], b: &[BigInt]) -> (Vec<BigInt>, bool) {
        let db = b.len() - 1;
        let lb = &b[db];
        let mut r = a.to_vec();
        if r.len() <= db {
            return (Vec::new(), r.iter().all(|c| c.is_zero()));
        }
        let mut q = vec![BigInt::zero(); r.len() - db];
        for k in (0..q.len()).rev() {
            let (c, rem) = r[k + db].div_rem(lb);
            if !rem.is_zero() {
                return (q, false);
            }
            if !c.is_zero() {
                for (j, bj) in b.iter().enumerate() {
                    r[k + j] -= &c * bj;
                }
            }
            q[k] = c;
        }
        (q, r.iter().all(|c| c.is_zero()))
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let (mut a, mut b) = if self.prim.len() >= other.prim.len() {
            (self.prim.clone(), other.prim.clone())
        } else {
            (other.prim.clone(), self.prim.clone())
        };
        loop {
            if b.len() == 1 {
                return Self::one();
            }
            let r = primitive_part(int_prem_positive(&a, &b));
            if r.is_empty() {
                return Poly::from_ints(b).monic();
            }
            a = b;
            b = r;
        }
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, y: &BigRat) -> BigRat {
        if self.is_zero() {
            return BigRat::zero();
        }
        let (s, dpow) = horner_int(&self.prim, y.numer(), y.denom());
        &self.content * BigRat::new(s, dpow)
    }

    /// Sign of the polynomial at a rational point.
    pub fn sign_at(&self, y: &BigRat) -> Sign {
        if self.is_zero() {
            return Sign::NoSign;
        }
        let (s, _) = horner_int(&self.prim, y.numer(), y.denom());
        mul_sign(s.sign(), self.content.numer().sign())
    }

    /// Correctly rounded value at a double.
    pub fn eval_f64(&self, y: f64) -> Result<f64, RatPolyError> {
        Ok(rat_to_f64(&self.eval(&rat_from_f64(y)?)))
    }

    /// Squarefree part, monic.
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.div_exact(&g).monic()
    }

    /// Yun squarefree decomposition: pairs (monic squarefree factor, multiplicity).
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0);
        let mut c = fp.div_exact(&a0);
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.monic(), i));
            }
            b = b.div_exact(&a);
            c = d.div_exact(&a);
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }
}

fn mul_sign(a: Sign, b: Sign) -> Sign {
    match (a, b) {
        (Sign::NoSign, _) | (_, Sign::NoSign) => Sign::NoSign,
        (x, y) if x == y => Sign::Plus,
        _ => Sign::Minus,
    }
}

/// Σ cᵢ nⁱ d^{deg−i}, and d^{deg}.
fn horner_int(c: &[BigInt], n: &BigInt, d: &BigInt) -> (BigInt, BigInt) {
    let deg = c.len() - 1;
    let mut acc = c[deg].clone();
    let mut dpow = BigInt::one();
    for k in (0..deg).rev() {
        dpow *= d;
        acc = acc * n + &c[k] * &dpow;
    }
    (acc, dpow)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = if first { format!("{c}") } else if c.is_negative() { format!(" - {}", -c) } else { format!(" + {c}") };
            first = false;
            match i {
                0 => write!(f, "{s}")?,
                1 => write!(f, "({s})*y")?,
                _ => write!(f, "({s})*y^{i}")?,
            }
        }
        Ok(())
    }
}

/// Rational function in canonical form: gcd(num, den) = 1, den monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self, RatPolyError> {
        if den.is_zero() {
            return Err(RatPolyError::ZeroDenominator);
        }
        Ok(Self::normalize_coprime(num.clone(), den.clone(), true))
    }

    fn normalize_coprime(num: Poly, den: Poly, reduce: bool) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if reduce {
            let g = num.gcd(&den);
            if g.degree() == Some(0) { (num, den) } else { (num.div_exact(&g), den.div_exact(&g)) }
        } else {
            (num, den)
        };
        // Move the leading coefficient of den into num.
        let lc = den.leading();
        RatFun { num: num.scale(&(BigRat::one() / &lc)), den: den.monic() }
    }

    /// `num / Π factors`, reducing against each factor in turn; valid whenever
    /// the factors are pairwise coprime or repeated copies of one polynomial.
    pub fn from_factored(mut num: Poly, factors: &[&Poly]) -> Self {
        let mut den = Poly::one();
        for f in factors {
            let g = num.gcd(f);
            if g.degree().unwrap_or(0) > 0 {
                num = num.div_exact(&g);
                den = den.mul(&f.div_exact(&g));
            } else {
                den = den.mul(f);
            }
        }
        Self::normalize_coprime(num, den, false)
    }

    pub fn zero() -> Self {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: BigRat) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `Some(c)` when the function is the constant `c`.
    pub fn as_constant(&self) -> Option<BigRat> {
        (self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0)).then(|| self.num.coeff(0))
    }

    pub fn neg(&self) -> Self {
        RatFun { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFun { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.lin(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.lin(o, true)
    }

    fn lin(&self, o: &Self, subtract: bool) -> Self {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if subtract { o.neg() } else { o.clone() };
        }
        let g = self.den.gcd(&o.den);
        let bg = self.den.div_exact(&g);
        let dg = o.den.div_exact(&g);
        let t1 = self.num.mul(&dg);
        let t2 = o.num.mul(&bg);
        let n = if subtract { t1.sub(&t2) } else { t1.add(&t2) };
        if n.is_zero() {
            return Self::zero();
        }
        // Only factors of g can survive in common.
        let h = n.gcd(&g);
        let (n, g) = if h.degree().unwrap_or(0) > 0 { (n.div_exact(&h), g.div_exact(&h)) } else { (n, g) };
        Self::normalize_coprime(n, bg.mul(&dg).mul(&g), false)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n = self.num.div_exact(&g1).mul(&o.num.div_exact(&g2));
        let d = self.den.div_exact(&g2).mul(&o.den.div_exact(&g1));
        Self::normalize_coprime(n, d, false)
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        self.mul(&Self::from_poly(p.clone()))
    }

    pub fn recip(&self) -> Result<Self, RatPolyError> {
        if self.is_zero() {
            return Err(RatPolyError::ZeroDenominator);
        }
        Ok(Self::normalize_coprime(self.den.clone(), self.num.clone(), false))
    }

    pub fn div(&self, o: &Self) -> Result<Self, RatPolyError> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn derivative(&self) -> Self {
        // (n'd − nd')/d²; with g = gcd(d, d') the result reduces to
        // (n'·(d/g) − n·(d'/g)) / (d·(d/g)).
        let g = self.den.gcd(&self.den.derivative());
        let dg = self.den.div_exact(&g);
        let dpg = self.den.derivative().div_exact(&g);
        let n = self.num.derivative().mul(&dg).sub(&self.num.mul(&dpg));
        Self::from_factored(n, &[&self.den, &dg])
    }

    /// Exact value; errors at poles.
    pub fn eval(&self, y: &BigRat) -> Result<BigRat, RatPolyError> {
        let d = self.den.eval(y);
        if d.is_zero() {
            return Err(RatPolyError::Pole { approx: rat_to_f64(y) });
        }
        Ok(self.num.eval(y) / d)
    }

    /// Correctly rounded value at a double; errors at exact poles.
    pub fn eval_f64(&self, y: f64) -> Result<f64, RatPolyError> {
        let yr = rat_from_f64(y)?;
        if self.den.degree() == Some(0) {
            return Ok(rat_to_f64(&self.num.eval(&yr)));
        }
        let (n, nd) = (&self.num, &self.den);
        let dv = nd.eval(&yr);
        if dv.is_zero() {
            return Err(RatPolyError::Pole { approx: y });
        }
        Ok(rat_to_f64(&(n.eval(&yr) / dv)))
    }

    /// `(c, k)` with f(y) = c·y^k·(1 + O(1/y)) as y → ∞.
    pub fn leading(&self) -> Result<(BigRat, i64), RatPolyError> {
        if self.is_zero() {
            return Err(RatPolyError::ZeroInput);
        }
        let dn = self.num.degree().unwrap() as i64;
        let dd = self.den.degree().unwrap() as i64;
        Ok((self.num.leading() / self.den.leading(), dn - dd))
    }
}

/// Normalize `num/den` into canonical form.
pub fn ratfun_normalize(num: Poly, den: Poly) -> Result<RatFun, RatPolyError> {
    RatFun::new(num, den)
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// A rational interval isolating exactly one distinct real root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBox {
    pub low: BigRat,
    pub high: BigRat,
    pub multiplicity: usize,
}

impl RootBox {
    pub fn midpoint(&self) -> BigRat {
        (&self.low + &self.high) / rat(2, 1)
    }

    pub fn mid_f64(&self) -> f64 {
        rat_to_f64(&self.midpoint())
    }

    pub fn contains(&self, y: &BigRat) -> bool {
        &self.low <= y && y <= &self.high
    }

    pub fn overlaps(&self, o: &RootBox) -> bool {
        self.low <= o.high && o.low <= self.high
    }
}

/// Sturm chain of a squarefree polynomial, kept as primitive integer polynomials.
pub struct SturmChain {
    chain: Vec<Vec<BigInt>>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let p0 = p.content_and_primitive().1.to_vec();
        let mut chain = vec![p0.clone()];
        if p0.len() > 1 {
            let p1 = Poly::from_ints(p0.clone()).derivative();
            let mut a = p0;
            let mut b = p1.content_and_primitive().1.to_vec();
            chain.push(b.clone());
            while b.len() > 1 {
                let r = int_prem_positive(&a, &b);
                let r: Vec<BigInt> = primitive_part(r).into_iter().map(|c| -c).collect();
                if r.is_empty() {
                    break;
                }
                chain.push(r.clone());
                a = b;
                b = r;
            }
        }
        SturmChain { chain }
    }

    fn variations<I: Iterator<Item = Sign>>(signs: I) -> usize {
        let mut last = Sign::NoSign;
        let mut v = 0;
        for s in signs {
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    fn var_at(&self, y: &BigRat) -> usize {
        Self::variations(self.chain.iter().map(|c| horner_int(c, y.numer(), y.denom()).0.sign()))
    }

    fn var_at_inf(&self, positive: bool) -> usize {
        Self::variations(self.chain.iter().map(|c| {
            let s = c.last().unwrap().sign();
            if positive || (c.len() - 1) % 2 == 0 { s } else { -s }
        }))
    }

    /// Number of distinct roots in (a, b].
    pub fn count(&self, a: &BigRat, b: &BigRat) -> usize {
        self.var_at(a).saturating_sub(self.var_at(b))
    }

    pub fn total(&self) -> usize {
        self.var_at_inf(false).saturating_sub(self.var_at_inf(true))
    }
}

fn sign_int(c: &[BigInt], y: &BigRat) -> Sign {
    horner_int(c, y.numer(), y.denom()).0.sign()
}

/// Isolate the distinct real roots of a squarefree polynomial into boxes of
/// width ≤ `width`.
fn isolate_squarefree(f: &Poly, width: &BigRat, mult: usize) -> Vec<RootBox> {
    let sc = SturmChain::new(f);
    let prim = f.content_and_primitive().1.to_vec();
    let total = sc.total();
    if total == 0 {
        return Vec::new();
    }
    // Cauchy bound rounded up to a power of two.
    let lc = prim.last().unwrap().abs();
    let maxc = prim.iter().map(|c| c.abs()).max().unwrap();
    let bound = BigRat::one() + BigRat::new(maxc, lc);
    let mut r = BigRat::one();
    while r < bound {
        r *= rat(2, 1);
    }
    let mut stack = vec![(-r.clone(), r)];
    let mut isolated = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let n = sc.count(&a, &b);
        match n {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let m = (&a + &b) / rat(2, 1);
                stack.push((a, m.clone()));
                stack.push((m, b));
            }
        }
    }
    let half = rat(1, 2);
    let mut boxes: Vec<RootBox> = isolated
        .into_iter()
        .map(|(mut a, mut b)| {
            // Make both ends non-roots, then bisect on sign.
            loop {
                if sign_int(&prim, &b) == Sign::NoSign {
                    return exact_box(&sc, &prim, b, width, mult);
                }
                if sign_int(&prim, &a) != Sign::NoSign {
                    break;
                }
                let m = (&a + &b) * &half;
                if sc.count(&a, &m) == 1 { b = m } else { a = m }
            }
            let sa = sign_int(&prim, &a);
            while &b - &a > *width {
                let m = (&a + &b) * &half;
                let sm = sign_int(&prim, &m);
                if sm == Sign::NoSign {
                    return exact_box(&sc, &prim, m, width, mult);
                }
                if sm == sa { a = m } else { b = m }
            }
            RootBox { low: a, high: b, multiplicity: mult }
        })
        .collect();
    boxes.sort_by(|x, y| x.low.cmp(&y.low));
    boxes
}

fn exact_box(sc: &SturmChain, prim: &[BigInt], r: BigRat, width: &BigRat, mult: usize) -> RootBox {
    let mut d = width / rat(2, 1);
    loop {
        let lo = &r - &d;
        let hi = &r + &d;
        if sign_int(prim, &lo) != Sign::NoSign && sc.count(&lo, &hi) == 1 {
            return RootBox { low: lo, high: hi, multiplicity: mult };
        }
        d /= rat(2, 1);
    }
}

/// Shrink a box known to isolate a root of `f` (squarefree) by bisection.
fn refine_box(f: &Poly, b: &RootBox) -> RootBox {
    let prim = f.content_and_primitive().1;
    let (mut lo, mut hi) = (b.low.clone(), b.high.clone());
    let mid = (&lo + &hi) / rat(2, 1);
    let (slo, smid) = (sign_int(prim, &lo), sign_int(prim, &mid));
    if smid == Sign::NoSign {
        let q = (&hi - &lo) / rat(4, 1);
        return RootBox { low: &mid - &q, high: &mid + &q, multiplicity: b.multiplicity };
    }
    if slo == Sign::NoSign || slo != smid {
        hi = mid;
    } else {
        lo = mid;
    }
    RootBox { low: lo, high: hi, multiplicity: b.multiplicity }
}

/// All distinct real roots of `p`, each isolated in a box of width ≤ `width`,
/// sorted and pairwise disjoint.
pub fn poly_real_roots(p: &Poly, width: &BigRat) -> Vec<RootBox> {
    assert!(!p.is_zero(), "poly_real_roots: zero polynomial");
    let parts = p.squarefree_decomposition();
    let mut tagged: Vec<(usize, RootBox)> = Vec::new();
    for (i, (f, mult)) in parts.iter().enumerate() {
        for b in isolate_squarefree(f, width, *mult) {
            tagged.push((i, b));
        }
    }
    // Boxes from different squarefree factors isolate different roots but may
    // overlap; refine until disjoint.
    loop {
        tagged.sort_by(|x, y| x.1.low.cmp(&y.1.low).then(Ordering::Equal));
        let mut clash = None;
        for k in 1..tagged.len() {
            if tagged[k - 1].1.overlaps(&tagged[k].1) {
                clash = Some(k);
                break;
            }
        }
        match clash {
            None => break,
            Some(k) => {
                for j in [k - 1, k] {
                    let (i, b) = &tagged[j];
                    let nb = refine_box(&parts[*i].0, b);
                    tagged[j].1 = nb;
                }
            }
        }
    }
    tagged.into_iter().map(|(_, b)| b).collect()
}

/// Number of distinct real roots of `p` in the closed interval [lo, hi].
pub fn count_roots_closed(p: &Poly, lo: &BigRat, hi: &BigRat) -> usize {
    if p.is_zero() {
        return usize::MAX;
    }
    if p.degree() == Some(0) {
        return 0;
    }
    let f = p.squarefree();
    let sc = SturmChain::new(&f);
    let at_lo = usize::from(f.sign_at(lo) == Sign::NoSign);
    sc.count(lo, hi) + at_lo
}

/// Ten to a negative integer power, as an exact rational.
pub fn pow10_neg(k: u32) -> BigRat {
    BigRat::new(BigInt::one(), num_traits::pow(BigInt::from(10), k as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRat {
        rat(n, d)
    }

    #[test]
    fn normalize_examples() {
        let f = RatFun::new(Poly::from_i64(&[6, 0, 0, 1]), Poly::from_i64(&[0, 36])).unwrap();
        assert!(f.den().is_monic());
        assert_eq!(f.den(), &Poly::y());
        assert_eq!(f.num().coeffs(), vec![r(1, 6), r(0, 1), r(0, 1), r(1, 36)]);

        let g = RatFun::new(Poly::from_i64(&[0, 0, 2]), Poly::from_i64(&[0, 4])).unwrap();
        assert_eq!(g.num().coeffs(), vec![r(0, 1), r(1, 2)]);
        assert_eq!(g.den(), &Poly::one());

        let z = RatFun::new(Poly::zero(), Poly::from_i64(&[1, 1])).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.den(), &Poly::one());

        assert_eq!(RatFun::new(Poly::one(), Poly::zero()), Err(RatPolyError::ZeroDenominator));
    }

    #[test]
    fn derivative_examples() {
        let f = RatFun::from_poly(Poly::from_coeffs(vec![r(0, 1), r(-1, 6)]));
        assert_eq!(f.derivative().as_constant(), Some(r(-1, 6)));
        let u2 = RatFun::new(Poly::from_i64(&[6, 0, 0, 1]), Poly::from_i64(&[0, 36])).unwrap();
        let expect = RatFun::new(Poly::from_i64(&[-3, 0, 0, 1]), Poly::from_i64(&[0, 0, 18])).unwrap();
        assert_eq!(u2.derivative(), expect);
        assert!(RatFun::constant(r(5, 3)).derivative().is_zero());
    }

    #[test]
    fn eval_examples() {
        let u2 = RatFun::new(Poly::from_i64(&[6, 0, 0, 1]), Poly::from_i64(&[0, 36])).unwrap();
        assert_eq!(u2.eval(&r(1, 1)).unwrap(), r(7, 36));
        assert!(matches!(u2.eval(&r(0, 1)), Err(RatPolyError::Pole { .. })));
        assert_eq!(RatFun::one().eval(&r(-13, 7)).unwrap(), r(1, 1));
        assert_eq!(u2.eval_f64(1.0).unwrap(), 7.0 / 36.0);
    }

    #[test]
    fn roots_examples() {
        let w = pow10_neg(6);
        let b = poly_real_roots(&Poly::from_i64(&[6, 0, 0, 1]), &w);
        assert_eq!(b.len(), 1);
        assert!((b[0].mid_f64() + 6f64.cbrt()).abs() < 1e-6);
        assert!(&b[0].high - &b[0].low <= w);

        let b = poly_real_roots(&Poly::y(), &w);
        assert_eq!(b.len(), 1);
        assert!(b[0].contains(&BigRat::zero()));

        assert!(poly_real_roots(&Poly::from_i64(&[1, 0, 1]), &w).is_empty());
    }

    #[test]
    fn roots_with_multiplicity() {
        // (y-1)^2 (y+2)^3 (y-1/2)
        let p = Poly::from_i64(&[-1, 1]).pow(2).mul(&Poly::from_i64(&[2, 1]).pow(3)).mul(&Poly::from_i64(&[-1, 2]));
        let b = poly_real_roots(&p, &pow10_neg(9));
        let got: Vec<(i64, usize)> = b.iter().map(|b| ((b.mid_f64() * 2.0).round() as i64, b.multiplicity)).collect();
        assert_eq!(got, vec![(-4, 3), (1, 1), (2, 2)]);
    }

    #[test]
    fn leading_examples() {
        let u1 = RatFun::from_poly(Poly::from_coeffs(vec![r(0, 1), r(-1, 6)]));
        assert_eq!(u1.leading().unwrap(), (r(-1, 6), 1));
        let u2 = RatFun::new(Poly::from_i64(&[6, 0, 0, 1]), Poly::from_i64(&[0, 36])).unwrap();
        assert_eq!(u2.leading().unwrap(), (r(1, 36), 2));
        assert_eq!(RatFun::one().leading().unwrap(), (r(1, 1), 0));
        assert_eq!(RatFun::zero().leading(), Err(RatPolyError::ZeroInput));
    }

    #[test]
    fn gcd_basic() {
        let a = Poly::from_i64(&[-1, 1]).mul(&Poly::from_i64(&[3, 0, 2]));
        let b = Poly::from_i64(&[-1, 1]).mul(&Poly::from_i64(&[5, 7]));
        assert_eq!(a.gcd(&b), Poly::from_i64(&[-1, 1]));
        assert_eq!(Poly::from_i64(&[2, 4]).gcd(&Poly::from_i64(&[3])), Poly::one());
    }
}
