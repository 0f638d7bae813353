//! Seeded generators for random regions, used by the randomized checkers.

use rand::Rng;

use super::{Rect, RectUnion};
use crate::rational::{q, Q};

/// Random coordinate on the grid `{0, 1/den, …, 1}`.
fn coord<R: Rng>(rng: &mut R, den: i64) -> Q {
    q(rng.gen_range(0..=den), den)
}

/// A random rectangle with corners on a `1/den` grid; may be empty.
pub fn rect<R: Rng>(rng: &mut R, den: i64) -> Rect {
    let (a, b) = (coord(rng, den), coord(rng, den));
    let (c, d) = (coord(rng, den), coord(rng, den));
    let (x0, x1) = if a <= b { (a, b) } else { (b, a) };
    let (y0, y1) = if c <= d { (c, d) } else { (d, c) };
    Rect { x0, x1, y0, y1 }
}

/// A union of up to `max_rects` random rectangles.
pub fn rect_union<R: Rng>(rng: &mut R, max_rects: usize, den: i64) -> RectUnion {
    let k = rng.gen_range(1..=max_rects.max(1));
    RectUnion::from_rects((0..k).map(|_| rect(rng, den)).collect())
}

/// A nonempty random union.
pub fn nonempty_rect_union<R: Rng>(rng: &mut R, max_rects: usize, den: i64) -> RectUnion {
    loop {
        let u = rect_union(rng, max_rects, den);
        if !u.is_empty() {
            return u;
        }
    }
}

/// Random subset bitmask of an `n`-atom universe.
pub fn atom_bits<R: Rng>(rng: &mut R, n: usize) -> u64 {
    rng.gen::<u64>() & super::AtomSet::full_mask(n)
}
