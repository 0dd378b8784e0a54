//! Exponential integrals and the adaptive quadrature used as their reference.

mod expint;
mod quad;

pub use expint::{
    exp_integral, exp_integral_asymptotic, exp_integral_eval, exp_integral_quadrature,
    exp_integral_sequence, ExpIntEval, ExpIntMethod,
};
pub use quad::{adaptive_quad, adaptive_quad_with, QuadOptions, QuadResult};
