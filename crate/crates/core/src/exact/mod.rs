//! Exact arithmetic: Z[v, v^-1], canonical rational functions Q(v), the bar
//! and heart involutions, and Laurent expansions at v = 0.

mod laurent;
mod ratfunc;
mod series;

pub use laurent::IntLaurent;
pub use ratfunc::RatFunc;
pub use series::{
    expand_at_0, in_one_plus_v_z, in_q_of_v_squared, in_v_z_series, in_z_series, series_pairs,
    SeriesView,
};
