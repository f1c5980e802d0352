//! Real-argument special functions used by the partial-wave solver.

mod bessel;
mod ddouble;
mod interior;

pub use bessel::{
    bessel_jy, bessel_jy_all_orders, bessel_jy_all_orders_tol, BesselPair, DEFAULT_BESSEL_TOL,
    DEFAULT_ORDER_CAP,
};
pub(crate) use bessel::jy_orders_until_overflow;
pub use interior::{
    ferrers_series_log_derivative, interior_log_derivative, interior_log_derivative_with, interior_profile, legendre_degree,
    order_is_negligible, InteriorMethod, InteriorSolution, SeriesEvaluation, INTERIOR_START,
};
