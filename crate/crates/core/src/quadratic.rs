//! Exact arithmetic in a real quadratic field `ℚ(√D)`.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// `x + y·√D` for a fixed positive non-square `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct QuadraticElement {
    pub x: Rational,
    pub y: Rational,
}

impl QuadraticElement {
    pub fn rational(x: Rational) -> Self {
        QuadraticElement { x, y: Rational::zero() }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadraticElement { x: &self.x + &o.x, y: &self.y + &o.y }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadraticElement { x: &self.x - &o.x, y: &self.y - &o.y }
    }

    pub fn mul(&self, o: &Self, d: &Rational) -> Self {
        QuadraticElement { x: &self.x * &o.x + &self.y * &o.y * d, y: &self.x * &o.y + &self.y * &o.x }
    }

    pub fn pow(&self, e: usize, d: &Rational) -> Self {
        let mut out = QuadraticElement::rational(Rational::one());
        for _ in 0..e {
            out = out.mul(self, d);
        }
        out
    }

    pub fn signum(&self, d: &Rational) -> i32 {
        let sx = sign(&self.x);
        let sy = sign(&self.y);
        if sx == sy || sy == 0 {
            return sx;
        }
        if sx == 0 {
            return sy;
        }
        // opposite signs: compare x² with y²·D
        match (&self.x * &self.x).cmp(&(&self.y * &self.y * d)) {
            Ordering::Greater => sx,
            Ordering::Less => sy,
            Ordering::Equal => 0,
        }
    }
}

fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}
