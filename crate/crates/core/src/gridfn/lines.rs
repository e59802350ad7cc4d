//! One-dimensional kernels applied along each axis of a row-major array.

use std::collections::VecDeque;

/// Applies `op` to every line of `values` running along `axis`.
pub(crate) fn map_lines<T: Copy + Default>(
    shape: &[usize],
    values: &mut [T],
    axis: usize,
    mut op: impl FnMut(&mut [T]),
) {
    let m = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut buf = vec![T::default(); m];
    for o in 0..outer {
        let base = o * m * stride;
        for inner in 0..stride {
            let start = base + inner;
            if stride == 1 {
                op(&mut values[start..start + m]);
                continue;
            }
            for (i, b) in buf.iter_mut().enumerate() {
                *b = values[start + i * stride];
            }
            op(&mut buf);
            for (i, b) in buf.iter().enumerate() {
                values[start + i * stride] = *b;
            }
        }
    }
}

fn sliding_by(line: &mut [f64], r: usize, keep_back: impl Fn(f64, f64) -> bool) {
    let m = line.len();
    if r == 0 || m < 2 {
        return;
    }
    let input = line.to_vec();
    // Deque of indices whose values are monotone from front to back.
    let mut dq: VecDeque<usize> = VecDeque::with_capacity(m.min(2 * r + 1));
    for j in 0..m + r {
        if j < m {
            while let Some(&b) = dq.back() {
                if keep_back(input[b], input[j]) {
                    break;
                }
                dq.pop_back();
            }
            dq.push_back(j);
        }
        if j >= r {
            let i = j - r;
            while let Some(&f) = dq.front() {
                if f + r < i {
                    dq.pop_front();
                } else {
                    break;
                }
            }
            line[i] = input[*dq.front().expect("window is never empty")];
        }
    }
}

/// In-place running minimum over the window `[i - r, i + r]`, clipped.
pub(crate) fn sliding_min(line: &mut [f64], r: usize) {
    sliding_by(line, r, |back, new| back < new);
}

/// In-place running maximum over the window `[i - r, i + r]`, clipped.
pub(crate) fn sliding_max(line: &mut [f64], r: usize) {
    sliding_by(line, r, |back, new| back > new);
}

/// Turns a histogram into cumulative counts along every axis.
///
/// With `forward` the result at `i` is the sum over all `j <= i`
/// componentwise, otherwise over all `j >= i`.
pub(crate) fn cumulate_axes(shape: &[usize], values: &mut [f64], forward: bool) {
    for axis in 0..shape.len() {
        map_lines(shape, values, axis, |line| {
            if forward {
                for i in 1..line.len() {
                    line[i] += line[i - 1];
                }
            } else {
                for i in (0..line.len().saturating_sub(1)).rev() {
                    line[i] += line[i + 1];
                }
            }
        });
    }
}
