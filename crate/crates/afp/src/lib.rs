//! Exact-arithmetic toolkit for approximate fixed points of self-maps on
//! convex sets.
//!
//! Everything here computes with arbitrary-precision rationals; there are no
//! floating-point tolerances anywhere in the core. The pieces:
//!
//! * [`vector`], [`seminorm`]: finitely supported rational sequences and the
//!   polyhedral seminorms evaluated on them.
//! * [`lp`]: a small exact simplex solver used for distances to spans.
//! * [`spaces`]: separation probes (pairwise and span-distance variants).
//! * [`domain`], [`maps`]: convex domains, the self-map trait, the builtin
//!   map registry, and piecewise-affine maps loaded from JSON.
//! * [`kkm`]: the combinatorial epsilon-fixed-point finder (covering nets,
//!   subdivision lattices, Sperner-style labeling).
//! * [`affine`]: orbit iteration and Cesaro averaging with an exact residual
//!   identity for affine maps.
//! * [`measure`]: the atoms-plus-diffuse measure model, its forward-shuffle
//!   self-map, and the machine-checked no-fixed-point certificate.
//! * [`delta`]: the chained-triangle set in l1, its closed-form metric,
//!   nearest-point retraction, and displacement/pipeline certification.
//! * [`cli`]: config-driven experiment runner behind the `afp` binary.
//!
//! The `examples/` directory has one runnable walkthrough per capability;
//! start with `cargo run --example cesaro_averaging`.

pub mod rational;
pub mod seminorm;
pub mod vector;

pub mod domain;
pub mod lp;
pub mod measure;
pub mod spaces;
pub mod maps;
pub mod delta;
pub mod affine;
pub mod kkm;
pub mod cli;
