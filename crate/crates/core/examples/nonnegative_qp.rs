//! Nonnegative quadratic programs: enumeration, active set and the rank-one inverse update.

use nalgebra::{DMatrix, DVector};
use sectorlearn::highdim::{kkt_violation, sherman_morrison_step, solve_active_set, solve_enumeration};

fn main() -> sectorlearn::Result<()> {
    let h = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
    let b = DVector::from_vec(vec![1.0, -2.0, 0.5]);
    let (x, set) = solve_enumeration(&h, &b)?;
    let (y, _) = solve_active_set(&h, &b, &[])?;
    println!("enumeration: {:?} active {set:?} kkt {:.1e}", x.as_slice(), kkt_violation(&h, &b, &x));
    println!("active set:  {:?}", y.as_slice());

    let z = DVector::from_vec(vec![0.3, -0.1, 0.7]);
    let sigma = 0.5;
    let updated = sherman_morrison_step(&h.clone().try_inverse().expect("invertible"), &z, sigma)?;
    let direct = (h + &z * z.transpose() / (sigma * sigma)).try_inverse().expect("invertible");
    println!("rank-one inverse drift: {:.2e}", (updated - direct).amax());
    Ok(())
}
