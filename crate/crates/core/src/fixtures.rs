//! Small reference matrices with known properties.

use crate::RearrangementMatrix;

fn rows(r: &[[f64; 4]; 4]) -> RearrangementMatrix {
    RearrangementMatrix::from_rows(r).expect("fixture is well formed")
}

/// A 4x4 matrix in which every two-block split has countermonotonic sums,
/// yet whose row-sum variance (about 0.04346) is not minimal.
pub fn local_minimum_4x4() -> RearrangementMatrix {
    rows(&[
        [0.0662, 0.2571, 0.0, -0.5842],
        [0.3271, 1.0061, -1.3218, -0.0833],
        [0.6524, -0.6509, -0.0549, 0.2495],
        [1.0826, -0.9444, 0.9248, -0.9263],
    ])
}

/// The same margins as [`local_minimum_4x4`] arranged with zero row sums.
pub fn mixable_4x4() -> RearrangementMatrix {
    rows(&[
        [0.0662, 1.0061, -1.3218, 0.2495],
        [0.3271, 0.2571, 0.0, -0.5842],
        [0.6524, -0.6509, 0.9248, -0.9263],
        [1.0826, -0.9444, -0.0549, -0.0833],
    ])
}

/// A fixed point of the standard RA (every column countermonotonic with the
/// sum of the others) whose `{1,2}|{3,4}` block sums are not countermonotonic.
pub fn ra_fixed_point_4x4() -> RearrangementMatrix {
    rows(&[
        [1.1423, 0.3674, 1.8266, 2.1637],
        [1.9135, 0.9880, 0.5237, 2.0392],
        [2.8994, 0.0377, 1.5924, 1.0061],
        [4.0077, 0.8852, 0.1974, 0.4097],
    ])
}

/// A starting arrangement of the [`local_minimum_4x4`] margins from which the
/// Block RA ends in the positive-variance local minimum.
pub fn start_to_local_minimum() -> RearrangementMatrix {
    rows(&[
        [0.0662, -0.9444, 0.0, -0.5842],
        [0.6524, 1.0061, -0.0549, 0.2495],
        [0.3271, -0.6509, -1.3218, -0.0833],
        [1.0826, 0.2571, 0.9248, -0.9263],
    ])
}

/// A starting arrangement from which the Block RA reaches zero variance.
pub fn start_to_global_minimum() -> RearrangementMatrix {
    rows(&[
        [0.0662, -0.9444, 0.0, -0.5842],
        [0.6524, -0.6509, -0.0549, 0.2495],
        [0.3271, 1.0061, -1.3218, -0.0833],
        [1.0826, 0.2571, 0.9248, -0.9263],
    ])
}

/// An 8x3 matrix of uniform draws: ordered first column, permutations of it
/// in the other two.
pub fn uniform_8x3() -> RearrangementMatrix {
    RearrangementMatrix::from_rows(&[
        [0.0074, 0.8657, 0.8574],
        [0.2957, 0.2957, 0.3569],
        [0.3569, 0.6067, 0.6067],
        [0.4638, 0.8574, 0.4850],
        [0.4850, 0.0074, 0.2957],
        [0.6067, 0.4638, 0.8657],
        [0.8574, 0.4850, 0.4638],
        [0.8657, 0.3569, 0.0074],
    ])
    .expect("fixture is well formed")
}

/// A minimum-variance arrangement of [`uniform_8x3`].
pub fn uniform_8x3_minimum() -> RearrangementMatrix {
    RearrangementMatrix::from_rows(&[
        [0.0074, 0.8657, 0.6067],
        [0.2957, 0.8574, 0.3569],
        [0.3569, 0.2957, 0.8574],
        [0.4638, 0.4638, 0.4850],
        [0.4850, 0.4850, 0.4638],
        [0.6067, 0.0074, 0.8657],
        [0.8574, 0.3569, 0.2957],
        [0.8657, 0.6067, 0.0074],
    ])
    .expect("fixture is well formed")
}
