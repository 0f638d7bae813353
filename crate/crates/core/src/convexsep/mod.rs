//! Polyhedral upper sets, sums of scaled cones built from them, separating
//! prices, and the range of a partitioned capacity paired with a
//! block-constant density.

mod cone;
mod separation;
mod zonotope;

pub use cone::{
    certificate_point, cone_membership, cone_membership_tol, convexity_probe, random_member, ConeSum, ConeTerm, Membership,
    ProbeVerdict, UpperSet, MEMBER_TOL,
};
pub use separation::{gamma_check, separation_price, GammaReport, Price, Separation};
pub use zonotope::{range_zonotope, realize, Zonotope};
