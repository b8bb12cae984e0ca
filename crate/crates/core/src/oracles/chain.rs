//! Stationary distribution of the backoff chain from its explicit
//! transition matrix.

use nalgebra::{DMatrix, DVector};

use crate::analytic::ChainSolution;
use crate::error::{Error, Result};

const OFF: usize = 0;
const CONNECT: usize = 1;
const DROP: usize = 2;
const HEAD: usize = 3;

fn state(i: u32, k: u32, w_c: u32) -> usize {
    if i == 0 {
        debug_assert_eq!(k, 0);
        HEAD
    } else {
        4 + ((i - 1) * w_c + k) as usize
    }
}

/// Row-stochastic transition matrix over `{off, connect, drop, (0,0),
/// (i,k) for 1 <= i <= m, 0 <= k < W_c}`.
pub fn transition_matrix(p_f: f64, p_on: f64, m: u32, w_c: u32) -> DMatrix<f64> {
    let n = 4 + (m * w_c) as usize;
    let mut p = DMatrix::zeros(n, n);
    p[(OFF, OFF)] = 1.0 - p_on;
    p[(OFF, HEAD)] = p_on;
    p[(CONNECT, OFF)] = 1.0;
    p[(DROP, OFF)] = 1.0;
    for i in 0..=m {
        let from = state(i, 0, w_c);
        p[(from, CONNECT)] += 1.0 - p_f;
        if i < m {
            for k in 0..w_c {
                p[(from, state(i + 1, k, w_c))] += p_f / f64::from(w_c);
            }
        } else {
            p[(from, DROP)] += p_f;
        }
        if i > 0 {
            for k in 1..w_c {
                p[(state(i, k, w_c), state(i, k - 1, w_c))] = 1.0;
            }
        }
    }
    p
}

/// Solves `pi P = pi`, `sum(pi) = 1` by LU decomposition.
pub fn chain_linear_solve(p_f: f64, p_on: f64, m: u32, w_c: u32) -> Result<ChainSolution> {
    if !(0.0..1.0).contains(&p_f) || !(p_on > 0.0 && p_on <= 1.0) || w_c == 0 {
        return Err(Error::InvalidArgument {
            name: "p_f/p_on/w_c",
            value: p_f,
            reason: "need p_f in [0, 1), p_on in (0, 1], w_c >= 1",
        });
    }
    let p = transition_matrix(p_f, p_on, m, w_c);
    let n = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(n, n);
    a.row_mut(n - 1).fill(1.0);
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let pi = a.lu().solve(&rhs).ok_or(Error::SingularSystem)?;

    let mut b = vec![vec![0.0; w_c as usize]; m as usize + 1];
    b[0][0] = pi[HEAD];
    for i in 1..=m {
        for k in 0..w_c {
            b[i as usize][k as usize] = pi[state(i, k, w_c)];
        }
    }
    Ok(ChainSolution {
        b_off: pi[OFF],
        b_connect: pi[CONNECT],
        b_drop: pi[DROP],
        b,
        p_on,
    })
}
