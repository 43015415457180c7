//! Dense kernels, seeded random streams and initializers.
//!
//! Every reduction sums in ascending index order so that two routes to the
//! same quantity can be compared exactly.

mod dense;
mod init;
pub mod opcount;
mod rng;

pub use dense::{axpy, dot, gemv, gemv_t_acc, outer_acc, DenseMatrix, DenseVector};
pub use init::{fill_uniform, uniform_sqrtk_init, xavier_bound, xavier_init};
pub use rng::RngStream;
