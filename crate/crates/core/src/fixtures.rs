//! Named presentations used throughout the tests, the acceptance suite and the CLI.

use crate::diagram::{Layout, TafPresentation, TemplateArm};

fn arm(source: usize, target: usize) -> TemplateArm {
    TemplateArm { source, target }
}

/// One summand per level, sizes `2^i`, arms `k -> 2k-1` and `k -> 2k`.
pub fn ref2(depth: usize) -> TafPresentation {
    TafPresentation::from_template(vec![2], vec![arm(0, 0), arm(0, 0)], Layout::Interleave, depth)
        .expect("ref2 template")
}

/// One summand per level, sizes `2^i`, arms `k -> k` and `k -> k + 2^i`.
pub fn std2(depth: usize) -> TafPresentation {
    TafPresentation::from_template(vec![2], vec![arm(0, 0), arm(0, 0)], Layout::Block, depth).expect("std2 template")
}

/// Types `a, b, t` (summands 0, 1, 2) with arms `a->b, b->a, t->t, t->a`.
/// Sizes: `t = 1`, `a_{i+1} = b_i + 1`, `b_{i+1} = a_i`.
pub fn swap(depth: usize) -> TafPresentation {
    TafPresentation::from_template(
        vec![1, 1, 1],
        vec![arm(0, 1), arm(1, 0), arm(2, 2), arm(2, 0)],
        Layout::Block,
        depth,
    )
    .expect("swap template")
}

/// Two disjoint copies of [`ref2`].
pub fn twin_ref2(depth: usize) -> TafPresentation {
    TafPresentation::from_template(
        vec![2, 2],
        vec![arm(0, 0), arm(0, 0), arm(1, 1), arm(1, 1)],
        Layout::Interleave,
        depth,
    )
    .expect("twin template")
}

/// Constant size `n` with the identity embedding at every level.
pub fn constant(n: usize, depth: usize) -> TafPresentation {
    TafPresentation::from_template(vec![n], vec![arm(0, 0)], Layout::Block, depth).expect("constant template")
}

/// The single-level algebra `T_n`.
pub fn tn(n: usize) -> TafPresentation {
    TafPresentation::new(vec![vec![n]], Vec::new(), None).expect("T_n")
}
