//! Special functions and analytic accuracy formulas for the large-event tail.

mod model;
pub mod zeta;

pub use model::{
    min_large_events, min_large_events_nolog, min_years, rse_aleno, rse_lennolog, rse_lenori,
    BoundedMoments, LogMoments, Moment, RseReport, TailModel,
};
pub use zeta::hurwitz_zeta;
