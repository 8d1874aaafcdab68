//! Nested-dissection ordering on a tensor grid. The longest axis is cut by
//! a one-node-thick slab; both halves are ordered first, the slab last.
//! A slab of width one separates the halves for every stencil used here,
//! including the diagonal neighbours of mixed derivatives.

const LEAF: usize = 32;

/// Permutation of unknowns, `perm[new] = old`. `slot(lin)` maps a linear
/// grid index to its active-node slot; each node owns `fiber` consecutive
/// unknowns, kept contiguous.
pub fn nested_dissection<F>(shape: &[usize], slot: F, fiber: usize) -> Vec<usize>
where
    F: Fn(usize) -> Option<usize>,
{
    let mut strides = vec![1; shape.len()];
    for d in (0..shape.len().saturating_sub(1)).rev() {
        strides[d] = strides[d + 1] * shape[d + 1];
    }
    let mut nodes = Vec::new();
    let lo = vec![0; shape.len()];
    dissect(&lo, shape, &strides, &mut nodes);
    let mut perm = Vec::with_capacity(nodes.len() * fiber);
    for lin in nodes {
        if let Some(s) = slot(lin) {
            perm.extend(s * fiber..(s + 1) * fiber);
        }
    }
    perm
}

fn dissect(lo: &[usize], hi: &[usize], strides: &[usize], out: &mut Vec<usize>) {
    let ext: Vec<usize> = lo.iter().zip(hi).map(|(a, b)| b.saturating_sub(*a)).collect();
    let size: usize = ext.iter().product();
    if size == 0 {
        return;
    }
    let (axis, &longest) = ext.iter().enumerate().max_by_key(|(i, e)| (**e, usize::MAX - i)).unwrap();
    if size <= LEAF || longest < 3 {
        push_box(lo, hi, strides, out);
        return;
    }
    let mid = lo[axis] + longest / 2;
    let mut left_hi = hi.to_vec();
    left_hi[axis] = mid;
    dissect(lo, &left_hi, strides, out);
    let mut right_lo = lo.to_vec();
    right_lo[axis] = mid + 1;
    dissect(&right_lo, hi, strides, out);
    let mut sep_lo = lo.to_vec();
    let mut sep_hi = hi.to_vec();
    sep_lo[axis] = mid;
    sep_hi[axis] = mid + 1;
    push_box(&sep_lo, &sep_hi, strides, out);
}

fn push_box(lo: &[usize], hi: &[usize], strides: &[usize], out: &mut Vec<usize>) {
    let mut idx = lo.to_vec();
    loop {
        out.push(idx.iter().zip(strides).map(|(i, s)| i * s).sum());
        let mut d = idx.len();
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < hi[d] {
                break;
            }
            idx[d] = lo[d];
        }
    }
}
