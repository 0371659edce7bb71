//! Conformal-block expansion of the plane four-point function.

mod expansion;
pub mod virasoro;

pub use expansion::{
    closed_form_c, expand_g_series, extract_coefficients, g_function, resum_g_series, BlockLabel, CoeffEntry,
    CoeffTable, DEGENERACY_GAP, MAX_PMAX, RESIDUAL_RATIO, RESIDUAL_WINDOW,
};
pub use virasoro::virasoro_block_series;
