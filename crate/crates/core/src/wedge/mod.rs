//! Generic submanifolds `Im w = phi(z, zbar, Re w)` of `C^(n+d)`, polyhedral
//! cones and the wedges they span.
//!
//! `psi_tilde` complexifies the `s` variables, so `Psi~(z, s + it)` sweeps a
//! neighbourhood of the edge; [`lemma27_verify`] certifies by sampling that
//! `t` in a subcone lands inside the wedge.

mod cone;
mod lemma;
mod manifold;

pub use cone::{cone_containment_check, Cone, ContainmentReport, CONE_TOL};
pub use lemma::{lemma27_shrink, lemma27_verify, ChartBoxes, Lemma27Report, MIN_BOX_RADIUS, MIN_T_FRACTION};
pub use manifold::{chart_vars, GenericManifold, Wedge, CHART_MAX_ITERS, CHART_TOL};
