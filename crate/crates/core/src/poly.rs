//! Exact polynomials over ℚ(i): dense univariate and sparse bivariate.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{binom_big, parse_rational, rational_to_string, Scalar};

/// Dense univariate polynomial; `coeffs[k]` is the coefficient of x^k and the
/// top coefficient is nonzero (the zero polynomial stores no coefficients).
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        UniPoly::constant(Scalar::one())
    }

    pub fn x() -> Self {
        UniPoly::monomial(1, Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        UniPoly::from_coeffs(vec![c])
    }

    pub fn monomial(k: usize, c: Scalar) -> Self {
        if c.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Scalar::zero(); k + 1];
        coeffs[k] = c;
        UniPoly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    /// Order of vanishing at 0; None for the zero polynomial.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Order of vanishing at a point; None for the zero polynomial.
    pub fn order_at(&self, p: &Scalar) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        self.shift(p).order_at_zero()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Raw derivative d/dx.
    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| &Scalar::from_bigint(k.into()) * c)
            .collect();
        UniPoly::from_coeffs(coeffs)
    }

    /// Divided derivative (1/a!)·d^a/dx^a, the Taylor-coefficient form.
    pub fn divided_derivative(&self, a: usize) -> UniPoly {
        if a == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= a {
            return UniPoly::zero();
        }
        let coeffs = self.coeffs[a..]
            .iter()
            .enumerate()
            .map(|(j, c)| &Scalar::from_bigint(binom_big(j + a, a)) * c)
            .collect();
        UniPoly::from_coeffs(coeffs)
    }

    /// (1/a!)·f^(a)(p).
    pub fn divided_derivative_at(&self, p: &Scalar, a: usize) -> Scalar {
        self.divided_derivative(a).eval(p)
    }

    /// f^(a)(p), the raw derivative value.
    pub fn raw_derivative_at(&self, p: &Scalar, a: usize) -> Scalar {
        &self.divided_derivative_at(p, a) * &Scalar::from_bigint(crate::scalar::factorial_big(a))
    }

    /// f(x + c).
    pub fn shift(&self, c: &Scalar) -> UniPoly {
        let n = self.coeffs.len();
        let coeffs = (0..n).map(|j| self.divided_derivative_at(c, j)).collect();
        UniPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &Scalar) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        UniPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in other.coeffs.iter().enumerate() {
                coeffs[j + k] += &(a * b);
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn pow(&self, k: usize) -> UniPoly {
        let mut acc = UniPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn divrem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree().unwrap();
        let lead_inv = divisor.leading().unwrap().inv();
        let mut rem = self.clone();
        let mut quot = vec![Scalar::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let q = rem.leading().unwrap() * &lead_inv;
            let shiftd = rd - dd;
            quot[shiftd] = q.clone();
            let sub = divisor.mul(&UniPoly::monomial(shiftd, q));
            rem = rem.sub(&sub);
        }
        (UniPoly::from_coeffs(quot), rem)
    }

    pub fn make_monic(&self) -> UniPoly {
        match self.leading() {
            None => UniPoly::zero(),
            Some(l) => self.scale(&l.inv()),
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// True when the polynomial has no repeated roots (gcd with its
    /// derivative is constant). The zero polynomial is not squarefree.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Exact square root in ℚ(i)[x], if the polynomial is a perfect square.
    pub fn sqrt_exact(&self) -> Option<UniPoly> {
        if self.is_zero() {
            return Some(UniPoly::zero());
        }
        let d = self.degree().unwrap();
        if d % 2 != 0 {
            return None;
        }
        let h = d / 2;
        let lead = self.leading().unwrap().sqrt_exact()?;
        // Top-down recurrence: the x^(h+k) coefficient of t² is
        // 2·t_h·t_k + Σ_{k<a<h} t_a·t_{h+k−a}, which determines t_k.
        let mut t = vec![Scalar::zero(); h + 1];
        let two_lead_inv = (&Scalar::from_int(2) * &lead).inv();
        t[h] = lead;
        for k in (0..h).rev() {
            let mut mid = Scalar::zero();
            for a in (k + 1)..h {
                mid += &(&t[a] * &t[h + k - a]);
            }
            t[k] = &(&self.coeff(h + k) - &mid) * &two_lead_inv;
        }
        let root = UniPoly::from_coeffs(t);
        if &root.mul(&root) == self {
            Some(root)
        } else {
            None
        }
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Sparse bivariate polynomial: (deg_x, deg_y) → nonzero coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct BiPoly {
    terms: BTreeMap<(usize, usize), Scalar>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        BiPoly::monomial(0, 0, Scalar::one())
    }

    pub fn monomial(dx: usize, dy: usize, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((dx, dy), c);
        }
        BiPoly { terms }
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = ((usize, usize), Scalar)>) -> Self {
        let mut p = BiPoly::zero();
        for ((dx, dy), c) in pairs {
            p.add_term(dx, dy, c);
        }
        p
    }

    /// The monic-in-y curve y^r + s_1(x)·y^(r−1) + ⋯ + s_r(x).
    pub fn from_sections(r: usize, sections: &[UniPoly]) -> Result<Self> {
        if sections.len() != r {
            return Err(Error::InvalidInput(format!(
                "expected {r} coefficient polynomials, got {}",
                sections.len()
            )));
        }
        let mut p = BiPoly::monomial(0, r, Scalar::one());
        for (idx, s) in sections.iter().enumerate() {
            let mu = idx + 1;
            for (k, c) in s.coeffs().iter().enumerate() {
                p.add_term(k, r - mu, c.clone());
            }
        }
        Ok(p)
    }

    pub fn add_term(&mut self, dx: usize, dy: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((dx, dy)).or_insert_with(Scalar::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&(dx, dy));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, dx: usize, dy: usize) -> Scalar {
        self.terms
            .get(&(dx, dy))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn deg_x(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn deg_y(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.1).max()
    }

    /// Coefficient of y^dy, as a polynomial in x.
    pub fn y_coefficient(&self, dy: usize) -> UniPoly {
        let mut coeffs = vec![];
        for (&(dx, d), c) in &self.terms {
            if d == dy {
                if coeffs.len() <= dx {
                    coeffs.resize(dx + 1, Scalar::zero());
                }
                coeffs[dx] = c.clone();
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// For a monic-in-y curve of y-degree r, the tuple (s_1, …, s_r) with
    /// s_μ the coefficient of y^(r−μ).
    pub fn sections(&self, r: usize) -> Result<Vec<UniPoly>> {
        if self.deg_y() != Some(r) || !self.y_coefficient(r).eval(&Scalar::zero()).is_one()
            || self.y_coefficient(r).degree() != Some(0)
        {
            return Err(Error::InvalidInput(
                "curve is not monic of the stated y-degree".into(),
            ));
        }
        Ok((1..=r).map(|mu| self.y_coefficient(r - mu)).collect())
    }

    pub fn eval(&self, x: &Scalar, y: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (&(dx, dy), c) in &self.terms {
            acc += &(&(c * &x.pow(dx)) * &y.pow(dy));
        }
        acc
    }

    /// Specialize x = x0, leaving a univariate polynomial in y.
    pub fn specialize_x(&self, x0: &Scalar) -> UniPoly {
        let mut coeffs = vec![Scalar::zero(); self.deg_y().map_or(0, |d| d + 1)];
        for (&(dx, dy), c) in &self.terms {
            coeffs[dy] += &(c * &x0.pow(dx));
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// Specialize y = y0, leaving a univariate polynomial in x.
    pub fn specialize_y(&self, y0: &Scalar) -> UniPoly {
        let mut coeffs = vec![Scalar::zero(); self.deg_x().map_or(0, |d| d + 1)];
        for (&(dx, dy), c) in &self.terms {
            coeffs[dx] += &(c * &y0.pow(dy));
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(dx, dy), c) in &other.terms {
            out.add_term(dx, dy, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(ax, ay), a) in &self.terms {
            for (&(bx, by), b) in &other.terms {
                out.add_term(ax + bx, ay + by, a * b);
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> BiPoly {
        if c.is_zero() {
            return BiPoly::zero();
        }
        BiPoly {
            terms: self.terms.iter().map(|(k, a)| (*k, a * c)).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> BiPoly {
        let mut acc = BiPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitute x := x_sub, y := y_sub.
    pub fn substitute(&self, x_sub: &BiPoly, y_sub: &BiPoly) -> BiPoly {
        let mx = self.deg_x().unwrap_or(0);
        let my = self.deg_y().unwrap_or(0);
        let mut xp = Vec::with_capacity(mx + 1);
        xp.push(BiPoly::one());
        for k in 1..=mx {
            let prev = xp[k - 1].clone();
            xp.push(prev.mul(x_sub));
        }
        let mut yp = Vec::with_capacity(my + 1);
        yp.push(BiPoly::one());
        for k in 1..=my {
            let prev = yp[k - 1].clone();
            yp.push(prev.mul(y_sub));
        }
        let mut out = BiPoly::zero();
        for (&(dx, dy), c) in &self.terms {
            let t = xp[dx].mul(&yp[dy]).scale(c);
            out = out.add(&t);
        }
        out
    }

    /// F(x + a, y + b): moves the point (a, b) to the origin.
    pub fn translate(&self, a: &Scalar, b: &Scalar) -> BiPoly {
        let x_sub = BiPoly::from_terms([((1, 0), Scalar::one()), ((0, 0), a.clone())]);
        let y_sub = BiPoly::from_terms([((0, 1), Scalar::one()), ((0, 0), b.clone())]);
        self.substitute(&x_sub, &y_sub)
    }

    /// Raw mixed derivative ∂_x^a ∂_y^u.
    pub fn derivative(&self, a: usize, u: usize) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(dx, dy), c) in &self.terms {
            if dx < a || dy < u {
                continue;
            }
            let f = &Scalar::from_bigint(crate::scalar::falling_big(dx, a))
                * &Scalar::from_bigint(crate::scalar::falling_big(dy, u));
            out.add_term(dx - a, dy - u, c * &f);
        }
        out
    }

    /// Divided mixed derivative (1/(a!·u!))·∂_x^a ∂_y^u.
    pub fn divided_derivative(&self, a: usize, u: usize) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(dx, dy), c) in &self.terms {
            if dx < a || dy < u {
                continue;
            }
            let f = &Scalar::from_bigint(binom_big(dx, a)) * &Scalar::from_bigint(binom_big(dy, u));
            out.add_term(dx - a, dy - u, c * &f);
        }
        out
    }

    /// Largest monomial factor x^ax·y^ay; returns the cofactor and (ax, ay).
    /// The zero polynomial has no cofactor.
    pub fn extract_monomial_cofactor(&self) -> Result<(BiPoly, usize, usize)> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let ax = self.terms.keys().map(|k| k.0).min().unwrap();
        let ay = self.terms.keys().map(|k| k.1).min().unwrap();
        let terms = self
            .terms
            .iter()
            .map(|(&(dx, dy), c)| ((dx - ax, dy - ay), c.clone()))
            .collect();
        Ok((BiPoly { terms }, ax, ay))
    }

    /// Multiplicity at the origin (minimum total degree); None for zero.
    pub fn multiplicity_at_origin(&self) -> Option<usize> {
        self.terms.keys().map(|&(dx, dy)| dx + dy).min()
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&(dx, dy), c) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if dx > 0 {
                write!(f, "x^{dx}")?;
            }
            if dy > 0 {
                write!(f, "y^{dy}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr(usize, usize, String, String);

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for BiPoly {
    /// {"terms": [[deg_x, deg_y, "re", "im"], …]} with terms in (deg_x, deg_y)
    /// order and rational parts as "p/q" strings.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            terms: self
                .terms
                .iter()
                .map(|(&(dx, dy), c)| {
                    TermRepr(
                        dx,
                        dy,
                        rational_to_string(c.re()),
                        rational_to_string(c.im()),
                    )
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BiPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut p = BiPoly::zero();
        for TermRepr(dx, dy, re, im) in repr.terms {
            let re = parse_rational(&re).map_err(de::Error::custom)?;
            let im = parse_rational(&im).map_err(de::Error::custom)?;
            p.add_term(dx, dy, Scalar::new(re, im));
        }
        Ok(p)
    }
}

impl Serialize for UniPoly {
    /// Same schema as the bivariate form, with deg_y = 0 throughout.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            terms: self
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| TermRepr(k, 0, rational_to_string(c.re()), rational_to_string(c.im())))
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UniPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let p = BiPoly::deserialize(deserializer)?;
        if p.deg_y().unwrap_or(0) != 0 {
            return Err(de::Error::custom("expected a univariate polynomial (deg_y = 0)"));
        }
        Ok(p.specialize_y(&Scalar::zero()))
    }
}
