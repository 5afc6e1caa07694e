use num_traits::{Signed, Zero};

use crate::rational::{half, Rational};
use crate::{Error, Result};

/// A point `(x, y, t)` of ℍⁿ with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    pub t: Rational,
}

impl Point {
    pub fn new(x: Vec<Rational>, y: Vec<Rational>, t: Rational) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        Ok(Self { x, y, t })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            x: vec![Rational::zero(); n],
            y: vec![Rational::zero(); n],
            t: Rational::zero(),
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.y).all(Zero::is_zero) && self.t.is_zero()
    }
}

/// `p·q = (x+x', y+y', t+t' + ½ Σ (xⱼy'ⱼ − yⱼx'ⱼ))`.
pub fn group_mul(p: &Point, q: &Point) -> Result<Point> {
    if p.n() != q.n() || p.y.len() != q.y.len() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: q.n(),
        });
    }
    let twist =
        p.x.iter()
            .zip(&q.y)
            .zip(p.y.iter().zip(&q.x))
            .fold(Rational::zero(), |acc, ((xj, yj2), (yj, xj2))| {
                acc + xj * yj2 - yj * xj2
            });
    Ok(Point {
        x: p.x.iter().zip(&q.x).map(|(a, b)| a + b).collect(),
        y: p.y.iter().zip(&q.y).map(|(a, b)| a + b).collect(),
        t: &p.t + &q.t + twist * half(),
    })
}

pub fn group_inverse(p: &Point) -> Point {
    Point {
        x: p.x.iter().map(|v| -v).collect(),
        y: p.y.iter().map(|v| -v).collect(),
        t: -&p.t,
    }
}

/// Anisotropic dilation `δ_λ(x, y, t) = (λx, λy, λ²t)`.
pub fn dilate(lambda: &Rational, p: &Point) -> Result<Point> {
    if !lambda.is_positive() {
        return Err(Error::NonPositiveDilation(lambda.to_string()));
    }
    Ok(Point {
        x: p.x.iter().map(|v| v * lambda).collect(),
        y: p.y.iter().map(|v| v * lambda).collect(),
        t: &p.t * lambda * lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn pt(x: &[i64], y: &[i64], t: (i64, i64)) -> Point {
        Point::new(
            x.iter().map(|&v| int(v)).collect(),
            y.iter().map(|&v| int(v)).collect(),
            rat(t.0, t.1),
        )
        .unwrap()
    }

    #[test]
    fn group_law_example() {
        let p = pt(&[1], &[0], (0, 1));
        let q = pt(&[0], &[1], (0, 1));
        assert_eq!(group_mul(&p, &q).unwrap(), pt(&[1], &[1], (1, 2)));
    }

    #[test]
    fn identity_and_inverse() {
        let p = pt(&[3, -1], &[2, 5], (7, 3));
        let e = Point::identity(2);
        assert_eq!(group_mul(&p, &e).unwrap(), p);
        assert!(group_mul(&p, &group_inverse(&p)).unwrap().is_identity());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let p = pt(&[1], &[1], (0, 1));
        let q = pt(&[1, 2], &[1, 2], (0, 1));
        assert!(matches!(
            group_mul(&p, &q),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Point::new(vec![int(1)], vec![], int(0)).is_err());
    }

    #[test]
    fn dilation_examples() {
        let p = pt(&[1], &[0], (1, 1));
        assert_eq!(dilate(&int(2), &p).unwrap(), pt(&[2], &[0], (4, 1)));
        assert_eq!(dilate(&int(1), &p).unwrap(), p);
        assert!(dilate(&int(0), &p).is_err());
        assert!(dilate(&int(-2), &p).is_err());
    }

    fn arb_point(n: usize) -> impl Strategy<Value = Point> {
        (
            proptest::collection::vec((-20i64..20, 1i64..6), n),
            proptest::collection::vec((-20i64..20, 1i64..6), n),
            (-20i64..20, 1i64..6),
        )
            .prop_map(|(x, y, t)| Point {
                x: x.into_iter().map(|(a, b)| rat(a, b)).collect(),
                y: y.into_iter().map(|(a, b)| rat(a, b)).collect(),
                t: rat(t.0, t.1),
            })
    }

    proptest! {
        #[test]
        fn associative(p in arb_point(2), q in arb_point(2), r in arb_point(2)) {
            let lhs = group_mul(&group_mul(&p, &q).unwrap(), &r).unwrap();
            let rhs = group_mul(&p, &group_mul(&q, &r).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dilation_is_homomorphism(p in arb_point(3), q in arb_point(3), a in 1i64..9, b in 1i64..9) {
            let l = rat(a, b);
            let lhs = dilate(&l, &group_mul(&p, &q).unwrap()).unwrap();
            let rhs = group_mul(&dilate(&l, &p).unwrap(), &dilate(&l, &q).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
