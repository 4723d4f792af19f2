//! Recursion-method numerics: Lanczos coefficient sequences, orthogonal
//! polynomials, continued-fraction Green's functions, zero-frequency
//! stitching, and the spectral-smoothness criteria built on top of them.

pub mod cauchy;
pub mod dd;
pub mod error;
pub mod expr;
pub mod fit;
pub mod io;
pub mod jet;
pub mod mobius;
pub mod poly;
pub mod products;
pub mod quadrature;
pub mod real;
pub mod seq;
pub mod smooth;
pub mod special;
pub mod stagger;
pub mod stitch;

pub use cauchy::{cauchy_column, CauchyColumn};
pub use dd::DoubleDouble;
pub use error::{Error, Result};
pub use expr::Expression;
pub use fit::{log_grid, log_power_fit, r_squared, rate_fit, LogPowerFit, RateFit};
pub use io::{format_coeffs, load_coeffs, parse_coeffs, save_coeffs, CoeffFile};
pub use mobius::{descent_green, DescentOptions, GreenEvaluation, TailSeed};
pub use products::{
    convergence_criterion, diffusion_estimate, dirac_delta_test, mp_pi_exact, mp_pi_limit,
    pi_product, spectral_origin, CriterionReport, CriterionVerdict, DeltaReport, DeltaVerdict,
    DiffusionEstimate, ProductScan, ProductTrace, SpectralOrigin,
};
pub use real::Real;
pub use seq::{CoeffSequence, SequenceKind, Tabulated};
pub use smooth::{
    approx_green_jet, christoffel_darboux_check, derivative_scaling, green_jet_trace,
    smoothness_battery, smoothness_criterion, table_first_divergent, BoundednessClass,
    DerivativeScaling, DimensionClass, GreenJet, ScalingFit, ScalingModel, SmoothVerdict,
    SmoothnessCase, SmoothnessVerdict, StaggerSpec,
};
pub use stagger::{
    decompose_stagger, fit_growth, GrowthFit, GrowthModel, StaggerDecomposition,
};
pub use stitch::{
    constant_tail_green, default_horizon, error_bound_finite_im, error_bound_zero_freq,
    stitch_error_series, stitched_green, zero_freq_stitched, BoundKind, ErrorBoundReport,
    ErrorSeriesEstimate, StitchPlan, Terminator,
};

/// Default scalar for coefficient generation and fits.
pub type Scalar = f64;

/// Extended-precision scalar for long products and deep recurrences.
pub type Extended = DoubleDouble;
