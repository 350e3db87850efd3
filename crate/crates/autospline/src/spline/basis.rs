use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::kraft::BasisFunctionId;
use crate::Q;

/// `N_{0,m}^0(s)` over the integer knots `0..m+1`, from the triangular
/// Cox-de Boor scheme. Degree 0 uses the half-open piece `[0, 1)`.
pub fn cardinal_bspline(m: u32, s: &Q) -> Q {
    let m = m as usize;
    let mut row: Vec<Q> = (0..=m)
        .map(|k| {
            let k = Q::from_integer(k.into());
            if k <= *s && *s < &k + Q::one() {
                Q::one()
            } else {
                Q::zero()
            }
        })
        .collect();
    for p in 1..=m {
        let pq = Q::from_integer(p.into());
        row = (0..=m - p)
            .map(|k| {
                let kq = Q::from_integer(k.into());
                let left = (s - &kq) / &pq * &row[k];
                let right = (&kq + &pq + Q::one() - s) / &pq * &row[k + 1];
                left + right
            })
            .collect();
    }
    row.swap_remove(0)
}

/// `N_{i,m}^l(t) = N_{0,m}^0(2^l t - i)` on the uniform knots `k/2^l`.
pub fn bspline_value(m: u32, level: u32, i: i64, t: &Q) -> Q {
    let s = t * Q::from_integer(BigInt::one() << level) - Q::from_integer(i.into());
    cardinal_bspline(m, &s)
}

/// The tensor product `prod_k N_{i_k,m}^l(x_k)` of a basis function.
pub fn basis_value(f: &BasisFunctionId, x: &[Q]) -> Q {
    f.knot_index().iter().zip(x).map(|(&i, t)| bspline_value(f.degree, f.level(), i, t)).product()
}

/// Every prime up to `m` divides `b`, so the values of degree-`m` basis
/// functions at points of `Z[1/b]` stay in `Z[1/b]`.
pub fn degree_supported(m: u32, b: u32) -> bool {
    (2..=m).filter(|&p| (2..p).all(|q| p % q != 0)).all(|p| b.is_multiple_of(p))
}
