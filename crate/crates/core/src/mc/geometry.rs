//! Planar geometry of closed polygons: winding numbers, diameters and the
//! filled-interior (outer boundary) test.

use std::collections::VecDeque;

use crate::{Complex64, Error, Result};

/// Points closer than this to the polygon count as on it.
pub const ON_PATH_TOL: f64 = 1e-12;

/// Axis-aligned bounding box `(min, max)` of a vertex list.
pub fn bounding_box(v: &[Complex64]) -> (Complex64, Complex64) {
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in v {
        lo.re = lo.re.min(p.re);
        lo.im = lo.im.min(p.im);
        hi.re = hi.re.max(p.re);
        hi.im = hi.im.max(p.im);
    }
    (lo, hi)
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Distance from `z` to the segment `[a, b]`.
pub fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let s = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * s)).norm()
}

/// Winding number of the closed polygon `v` (first vertex repeated last or
/// not) around `z`.
pub fn winding_number(v: &[Complex64], z: Complex64) -> Result<i64> {
    let n = v.len();
    if n < 2 {
        return Ok(0);
    }
    let mut total = 0.0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if segment_distance(z, a, b) < ON_PATH_TOL {
            return Err(Error::OnBoundary);
        }
        let (p, q) = (a - z, b - z);
        total += cross(p, q).atan2((p * q.conj()).re);
    }
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
}

/// Convex hull by the monotone chain, counterclockwise without repeats.
pub fn convex_hull(v: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = v.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 1] - hull[hull.len() - 2], p - hull[hull.len() - 2]) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Largest distance between two vertices.
pub fn diameter(v: &[Complex64]) -> f64 {
    let hull = convex_hull(v);
    let mut best: f64 = 0.0;
    for i in 0..hull.len() {
        for j in 0..i {
            best = best.max((hull[i] - hull[j]).norm_sqr());
        }
    }
    best.sqrt()
}

/// Outcome of the filled-interior test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enclosure {
    Inside,
    Outside,
    /// `z` could not be separated from the polygon at the grid resolution.
    Indeterminate,
}

struct Grid {
    origin: Complex64,
    h: f64,
    nx: usize,
    ny: usize,
    wall: Vec<bool>,
}

impl Grid {
    fn new(v: &[Complex64], h: f64) -> Self {
        let (lo, hi) = bounding_box(v);
        let origin = lo - Complex64::new(1.5 * h, 1.5 * h);
        let nx = ((hi.re - origin.re) / h).ceil() as usize + 2;
        let ny = ((hi.im - origin.im) / h).ceil() as usize + 2;
        let mut g = Grid { origin, h, nx, ny, wall: vec![false; nx * ny] };
        let n = v.len();
        for i in 0..n {
            g.rasterize(v[i], v[(i + 1) % n]);
        }
        g
    }

    fn coords(&self, z: Complex64) -> (f64, f64) {
        ((z.re - self.origin.re) / self.h, (z.im - self.origin.im) / self.h)
    }

    fn cell(&self, z: Complex64) -> Option<(usize, usize)> {
        let (x, y) = self.coords(z);
        if x < 0.0 || y < 0.0 {
            return None;
        }
        let (i, j) = (x.floor() as usize, y.floor() as usize);
        (i < self.nx && j < self.ny).then_some((i, j))
    }

    fn mark(&mut self, i: i64, j: i64) {
        if i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny {
            self.wall[j as usize * self.nx + i as usize] = true;
        }
    }

    // Marks every cell the segment passes through (grid traversal); at exact
    // corner crossings both side neighbours are marked as well.
    fn rasterize(&mut self, a: Complex64, b: Complex64) {
        let (x0, y0) = self.coords(a);
        let (x1, y1) = self.coords(b);
        let (mut i, mut j) = (x0.floor() as i64, y0.floor() as i64);
        let (i_end, j_end) = (x1.floor() as i64, y1.floor() as i64);
        let (dx, dy) = (x1 - x0, y1 - y0);
        let step_i: i64 = if dx > 0.0 { 1 } else { -1 };
        let step_j: i64 = if dy > 0.0 { 1 } else { -1 };
        let t_delta_x = if dx != 0.0 { (1.0 / dx).abs() } else { f64::INFINITY };
        let t_delta_y = if dy != 0.0 { (1.0 / dy).abs() } else { f64::INFINITY };
        let mut t_max_x = if dx > 0.0 {
            ((i + 1) as f64 - x0) / dx
        } else if dx < 0.0 {
            (i as f64 - x0) / dx
        } else {
            f64::INFINITY
        };
        let mut t_max_y = if dy > 0.0 {
            ((j + 1) as f64 - y0) / dy
        } else if dy < 0.0 {
            (j as f64 - y0) / dy
        } else {
            f64::INFINITY
        };
        self.mark(i, j);
        let max_steps = (i_end - i).abs() + (j_end - j).abs() + 4;
        for _ in 0..max_steps {
            if i == i_end && j == j_end {
                break;
            }
            if (t_max_x - t_max_y).abs() < 1e-12 {
                self.mark(i + step_i, j);
                self.mark(i, j + step_j);
                i += step_i;
                j += step_j;
                t_max_x += t_delta_x;
                t_max_y += t_delta_y;
            } else if t_max_x < t_max_y {
                i += step_i;
                t_max_x += t_delta_x;
            } else {
                j += step_j;
                t_max_y += t_delta_y;
            }
            self.mark(i, j);
        }
        self.mark(i_end, j_end);
    }

    /// Cells reachable from the grid border through non-wall cells.
    fn exterior(&self) -> Vec<bool> {
        let (nx, ny) = (self.nx, self.ny);
        let mut seen = vec![false; nx * ny];
        let mut queue = VecDeque::new();
        let push = |i: usize, j: usize, seen: &mut Vec<bool>, q: &mut VecDeque<(usize, usize)>| {
            let k = j * nx + i;
            if !self.wall[k] && !seen[k] {
                seen[k] = true;
                q.push_back((i, j));
            }
        };
        for i in 0..nx {
            push(i, 0, &mut seen, &mut queue);
            push(i, ny - 1, &mut seen, &mut queue);
        }
        for j in 0..ny {
            push(0, j, &mut seen, &mut queue);
            push(nx - 1, j, &mut seen, &mut queue);
        }
        while let Some((i, j)) = queue.pop_front() {
            if i > 0 {
                push(i - 1, j, &mut seen, &mut queue);
            }
            if i + 1 < nx {
                push(i + 1, j, &mut seen, &mut queue);
            }
            if j > 0 {
                push(i, j - 1, &mut seen, &mut queue);
            }
            if j + 1 < ny {
                push(i, j + 1, &mut seen, &mut queue);
            }
        }
        seen
    }
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let o = |p: Complex64, q: Complex64, r: Complex64| cross(q - p, r - p);
    let (d1, d2) = (o(c, d, a), o(c, d, b));
    let (d3, d4) = (o(a, b, c), o(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    // touching or collinear cases count as crossing (conservative)
    let tol = 1e-15 * (1.0 + a.norm() + b.norm());
    segment_distance(a, c, d) < tol
        || segment_distance(b, c, d) < tol
        || segment_distance(c, a, b) < tol
        || segment_distance(d, a, b) < tol
}

fn path_blocks(v: &[Complex64], a: Complex64, b: Complex64) -> bool {
    let n = v.len();
    (0..n).any(|i| segments_cross(a, b, v[i], v[(i + 1) % n]))
}

/// Whether `z` lies in the filled interior of the closed polygon `v`, by
/// flood fill from the border of its bounding box on a grid of cell size
/// `h` whose cells crossed by the polygon are walls.
///
/// When `z` sits in a wall cell it is replaced by a nearby point joined to it
/// by a segment that crosses no edge (same face); failing that the grid is
/// refined by 4 up to twice before reporting [`Enclosure::Indeterminate`].
pub fn encloses_outer(v: &[Complex64], z: Complex64, h: f64) -> Result<Enclosure> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("grid step must be > 0, got {h}")));
    }
    let (lo, hi) = bounding_box(v);
    if z.re <= lo.re || z.re >= hi.re || z.im <= lo.im || z.im >= hi.im {
        return Ok(Enclosure::Outside);
    }
    let mut step = h;
    for _ in 0..3 {
        let grid = Grid::new(v, step);
        if let Some(probe) = probe_point(&grid, v, z) {
            let outside = grid.exterior();
            let (i, j) = grid.cell(probe).expect("probe lies inside the grid");
            return Ok(if outside[j * grid.nx + i] { Enclosure::Outside } else { Enclosure::Inside });
        }
        step /= 4.0;
    }
    Ok(Enclosure::Indeterminate)
}

fn probe_point(grid: &Grid, v: &[Complex64], z: Complex64) -> Option<Complex64> {
    let free = |p: Complex64| grid.cell(p).map(|(i, j)| !grid.wall[j * grid.nx + i]).unwrap_or(false);
    if free(z) {
        return Some(z);
    }
    for radius in [0.75, 1.5, 3.0] {
        for k in 0..16 {
            let dir = Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / 8.0 + 0.1);
            let p = z + dir * (radius * grid.h);
            if free(p) && !path_blocks(v, z, p) {
                return Some(p);
            }
        }
    }
    None
}
