//! Dense two-phase simplex for the small exact linear programs in this
//! crate: minimize `c . x` subject to `A x = b`, `x >= 0`, with `b >= 0`.
//!
//! The flow programs it solves are heavily degenerate, so the pivot rule is
//! Dantzig with a permanent switch to Bland's rule once the objective stalls;
//! leaving-variable ties always prefer the numerically larger pivot in
//! Dantzig mode and the smallest basis index in Bland mode.

use crate::error::{Error, Result};

pub struct StandardForm {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows x cols`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

const TOL: f64 = 1e-9;
const STALL_LIMIT: usize = 200;

struct Tableau {
    rows: usize,
    width: usize, // real + artificial + rhs
    t: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.t[r][self.width - 1]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for x in &mut self.t[row] {
            *x /= p;
        }
        for r in 0..self.rows {
            if r != row {
                let f = self.t[r][col];
                if f != 0.0 {
                    let (pr, cr) = if r < row {
                        let (a, b) = self.t.split_at_mut(row);
                        (&b[0], &mut a[r])
                    } else {
                        let (a, b) = self.t.split_at_mut(r);
                        (&a[row], &mut b[0])
                    };
                    for (x, y) in cr.iter_mut().zip(pr.iter()) {
                        *x -= f * y;
                    }
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (x, y) in self.obj.iter_mut().zip(self.t[row].iter()) {
                *x -= f * y;
            }
        }
        self.basis[row] = col;
    }

    /// Runs the simplex loop; columns >= `enter_limit` never enter the basis.
    fn run(&mut self, enter_limit: usize) -> Result<()> {
        let mut bland = false;
        let mut stall = 0usize;
        let mut last = f64::INFINITY;
        loop {
            let col = if bland {
                (0..enter_limit).find(|&j| self.obj[j] < -TOL)
            } else {
                let mut best = None;
                let mut best_val = -TOL;
                for j in 0..enter_limit {
                    if self.obj[j] < best_val {
                        best_val = self.obj[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = col else {
                return Ok(());
            };

            let mut row: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for r in 0..self.rows {
                let a = self.t[r][col];
                if a > TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match row {
                        None => true,
                        Some(prev) => {
                            if ratio < best_ratio - 1e-12 {
                                true
                            } else if ratio > best_ratio + 1e-12 {
                                false
                            } else if bland {
                                self.basis[r] < self.basis[prev]
                            } else {
                                a > self.t[prev][col]
                            }
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        row = Some(r);
                    }
                }
            }
            let Some(row) = row else {
                return Err(Error::input("linear program is unbounded"));
            };
            self.pivot(row, col);

            let value = -self.obj[self.width - 1];
            if value < last - 1e-12 {
                last = value;
                stall = 0;
            } else {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            }
        }
    }
}

pub fn solve(p: &StandardForm) -> Result<LpSolution> {
    assert_eq!(p.a.len(), p.rows * p.cols);
    assert!(p.b.iter().all(|&x| x >= 0.0), "standard form needs b >= 0");
    let width = p.cols + p.rows + 1;
    let mut t = Vec::with_capacity(p.rows);
    for r in 0..p.rows {
        let mut row = vec![0.0; width];
        row[..p.cols].copy_from_slice(&p.a[r * p.cols..(r + 1) * p.cols]);
        row[p.cols + r] = 1.0; // artificial
        row[width - 1] = p.b[r];
        t.push(row);
    }

    // Phase 1: minimize the artificial sum. Reduced cost of column j under
    // the all-artificial basis is -sum_i a[i][j].
    let mut obj = vec![0.0; width];
    for j in 0..width {
        if j < p.cols || j == width - 1 {
            obj[j] = -(0..p.rows).map(|r| t[r][j]).sum::<f64>();
        }
    }
    let mut tab = Tableau {
        rows: p.rows,
        width,
        t,
        obj,
        basis: (p.cols..p.cols + p.rows).collect(),
    };
    tab.run(p.cols)?;
    if -tab.obj[width - 1] > 1e-7 {
        return Err(Error::input("linear program is infeasible"));
    }

    // Drive leftover artificials out of the (degenerate) basis when a real
    // pivot exists; an all-zero row is redundant and can stay.
    for r in 0..tab.rows {
        if tab.basis[r] >= p.cols {
            if let Some(j) = (0..p.cols).find(|&j| tab.t[r][j].abs() > 1e-7) {
                tab.pivot(r, j);
            }
        }
    }

    // Phase 2 objective from the real costs.
    let mut obj = vec![0.0; width];
    obj[..p.cols].copy_from_slice(&p.c);
    for r in 0..tab.rows {
        let cb = if tab.basis[r] < p.cols {
            p.c[tab.basis[r]]
        } else {
            0.0
        };
        if cb != 0.0 {
            for (o, a) in obj.iter_mut().zip(&tab.t[r]) {
                *o -= cb * a;
            }
        }
    }
    // Artificials must not re-enter: give them prohibitive reduced costs.
    obj[p.cols..width - 1].fill(f64::INFINITY);
    tab.obj = obj;
    tab.run(p.cols)?;

    let mut x = vec![0.0; p.cols];
    for r in 0..tab.rows {
        if tab.basis[r] < p.cols {
            x[tab.basis[r]] = tab.rhs(r);
        }
    }
    let value = x.iter().zip(p.c.iter()).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, value })
}
