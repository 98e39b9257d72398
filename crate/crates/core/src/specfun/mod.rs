//! Special functions used by the distributions and outage expressions.

pub mod bessel;
pub mod gamma;
pub mod marcum;

pub use bessel::{
    angular_bessel_product, angular_bessel_products, bessel_i, bessel_i_scaled, bessel_j0,
    AngularIntegralSpec,
};
pub use gamma::{
    gamma_fn, incomplete_gamma_pair, ln_gamma, pochhammer, reg_lower_gamma, reg_upper_gamma,
};
pub use marcum::{
    marcum_pair, marcum_q, marcum_q_complement, marcum_q_nonpositive_order, MarcumPair,
};
