//! Normalized-gradient optimization that adapts to Hölder smoothness.
//!
//! Any online linear learner with a regret bound becomes a convex optimizer
//! by feeding it normalized gradients and averaging its iterates with weights
//! `1/‖g_t‖`. The resulting rate interpolates between `O(1/√T)` for Lipschitz
//! objectives and `O(1/T)` for smooth ones without knowing the Hölder
//! exponent, and scales with the geometric mean of the local smoothness seen
//! along the trajectory.
//!
//! - [`vector`]: dense vectors and the weighted-average accumulator.
//! - [`problems`]: test functions and smoothness checkers.
//! - [`learners`]: OGD, dual averaging, KT coin betting, AdaGrad-norm.
//! - [`reduction`]: the drivers and all bound compositions.
//! - [`bench`]: experiment harness behind the `normgrad` binary.
//!
//! ```
//! use normgrad::{learners::LearnerConfig, problems::Problem, reduction, vector::Vector};
//!
//! let p = Problem::huber(1.0, Vector::new(vec![0.0, 0.0]).unwrap()).unwrap();
//! let cfg = LearnerConfig::kt(1.0, Vector::new(vec![6.0, -8.0]).unwrap());
//! let run = reduction::run_normalized(&cfg, &p, 512, reduction::DEFAULT_EPS_ZERO).unwrap();
//! let report = reduction::bound_report(&run, &p, &cfg).unwrap();
//! assert!(report.holds());
//! ```

pub mod bench;
pub mod error;
pub mod learners;
pub mod problems;
pub mod reduction;
pub mod vector;

pub use error::{Error, Result};
