//! Blood-type inheritance algebras and their dynamics.
//!
//! The ABO phenotypes `{O, A, B, AB}` span a 4-dimensional real vector space.
//! Meiosis with gamete competition — a phenotype-A or -B parent contributes
//! the O allele with probability `α`, a phenotype-AB parent contributes the
//! A allele with probability `β` — turns that space into a commutative,
//! non-associative algebra `B(α,β)` whose products are probability
//! distributions over offspring phenotypes. The Mendelian case is
//! `α = 1/4, β = 1/2`.
//!
//! A linear change of basis to `{o, a, b, ab}` produces an isomorphic copy
//! `B'(λ,β)` with `λ = 1 − α` and a much sparser multiplication table, which
//! is the convenient place to do structure theory. This crate builds both
//! tables and implements:
//!
//! - [`dynamics`]: the quadratic evolutionary operator `V` (squaring in the
//!   algebra), allele frequencies, trajectories on the simplex, the
//!   polarization identity, and plenary powers;
//! - [`classify`]: absolute nilpotents, the idempotent census (7 generically,
//!   5 on the degenerate curve `P`), and solvable elements;
//! - [`ideals`]: ideal closures and the four possible ideal lattices;
//! - [`enveloping`]: left-multiplication operators and the associative
//!   matrix algebra they generate (patterns `M0`–`M3`);
//! - [`iso`]: the isomorphism decision `B'(λ,β) ≅ B'(λ',β')` iff `λ' = λ`
//!   and `β' ∈ {β, 1−β}`, with explicit witnesses and a numeric searcher;
//! - [`verify`]: a self-contained checker that exercises each of the above
//!   claims numerically (also exposed as `gbta verify` on the command line).
//!
//! ```
//! use gbta::{Params, Mode};
//! use gbta::algebra::{self, Element};
//!
//! // The Mendelian algebra: alpha = 1/4, beta = 1/2.
//! let p = Params::from_alpha(0.25, 0.5, 1e-9, Mode::Float64).unwrap();
//! let t = algebra::phenotype_table(&p);
//! let a = Element::phenotype([0.0, 1.0, 0.0, 0.0]);
//! let aa = algebra::multiply(&t, &a, &a).unwrap();
//! // A x A offspring: 1/16 O + 15/16 A
//! assert!((aa.coords()[0] - 1.0 / 16.0).abs() < 1e-15);
//! assert!((aa.coords()[1] - 15.0 / 16.0).abs() < 1e-15);
//! ```

pub mod algebra;
pub mod classify;
pub mod cli;
pub mod dynamics;
pub mod enveloping;
pub mod exact;
pub mod ideals;
pub mod iso;
pub mod json;
pub mod linalg;
pub mod params;
pub mod solve;
pub mod verify;

pub use algebra::{Basis, Element, StructureTensor};
pub use dynamics::State;
pub use params::{Mode, PBranch, PMembership, Params, DEFAULT_TOL};
