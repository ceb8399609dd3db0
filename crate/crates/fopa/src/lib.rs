//! Gaussian-state simulator for cascaded fiber-optical-parametric-amplifier
//! (FOPA) circuits.
//!
//! The crate models multimode Gaussian states by their quadrature mean vector
//! and covariance matrix, applies the symplectic maps of standard optical
//! elements (two-mode squeezers, beam splitters, phase shifts, loss), and
//! derives homodyne noise, signal-to-noise ratios, noise figures and
//! information-transfer coefficients for amplifier circuits with correlated
//! inputs. A line-oriented circuit DSL (`.fopa` files) serves as the
//! interchange format, and a classical Monte-Carlo sampler provides an
//! independent cross-check of every analytic moment.
//!
//! Conventions, fixed crate-wide: the quadrature amplitude is
//! `X(θ) = e^{-iθ} a + e^{iθ} a†` with `x = X(0)`, `p = X(π/2)`; the vacuum
//! has zero mean and unit quadrature variance, so the shot-noise level is 1.

pub mod dsl;
pub mod gaussian;
pub mod mc;
pub mod metrics;
pub mod scenarios;

pub use dsl::{parse, serialize, validate, Circuit, CircuitElement, Diagnostic, Severity};
pub use gaussian::{
    element_symplectic, propagate, simulate, ComboTerm, ElementAction, GaussianError,
    GaussianState, MeasurementRecord, ModeId, QuadratureStats, SqueezerParams,
};
pub use metrics::{from_decibels, to_decibels, GainPair, TapReport};
pub use scenarios::{ImperfectionModel, InputKind, ScenarioConfig, SweepPoint, SweepTrace};
