//! Index matrices for the six matrix classes and the candidate numbering.
//!
//! Variable ids and candidate indices are 1-based, as in the printed matrices; a
//! candidate's row in a Gram matrix is `pos - 1` ("slot").

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("order {0} is not supported (need n >= 2)")]
    UnsupportedOrder(usize),
    #[error("pair ({0}, {1}) is not increasing")]
    BadPair(usize, usize),
    #[error("unknown matrix class {0:?}")]
    UnknownClass(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixClass {
    General,
    Tridiagonal,
    BackwardTridiagonal,
    CyclicHankel,
    Hankel,
    Toeplitz,
}

impl MatrixClass {
    pub const ALL: [MatrixClass; 6] = [
        MatrixClass::General,
        MatrixClass::Tridiagonal,
        MatrixClass::BackwardTridiagonal,
        MatrixClass::CyclicHankel,
        MatrixClass::Hankel,
        MatrixClass::Toeplitz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatrixClass::General => "general",
            MatrixClass::Tridiagonal => "tridiagonal",
            MatrixClass::BackwardTridiagonal => "backward-tridiagonal",
            MatrixClass::CyclicHankel => "cyclic-hankel",
            MatrixClass::Hankel => "hankel",
            MatrixClass::Toeplitz => "toeplitz",
        }
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatrixClass {
    type Err = IndexError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase().replace('_', "-");
        let c = match t.as_str() {
            "general" => MatrixClass::General,
            "tridiagonal" | "tri" => MatrixClass::Tridiagonal,
            "backward-tridiagonal" | "backward" => MatrixClass::BackwardTridiagonal,
            "cyclic-hankel" | "cyclic" => MatrixClass::CyclicHankel,
            "hankel" => MatrixClass::Hankel,
            "toeplitz" => MatrixClass::Toeplitz,
            _ => return Err(IndexError::UnknownClass(s.to_string())),
        };
        Ok(c)
    }
}

/// Which variable sits in each matrix cell; `None` is a structural zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexMatrix {
    pub class: MatrixClass,
    pub n: usize,
    pub m: usize,
    pub cells: Vec<Vec<Option<usize>>>,
}

impl IndexMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.cells[i][j]
    }

    /// Occurrence count of every id, μ[id-1].
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut mu = vec![0; self.m];
        for id in self.cells.iter().flatten().flatten() {
            mu[id - 1] += 1;
        }
        mu
    }
}

pub fn build_index_matrix(class: MatrixClass, n: usize) -> Result<IndexMatrix, IndexError> {
    if n < 2 {
        return Err(IndexError::UnsupportedOrder(n));
    }
    let mut cells = vec![vec![None; n]; n];
    let mut counter = 0;
    let mut next = || {
        counter += 1;
        Some(counter)
    };
    for i in 0..n {
        for j in 0..n {
            cells[i][j] = match class {
                MatrixClass::General => Some(i * n + j + 1),
                MatrixClass::Tridiagonal => (i.abs_diff(j) <= 1).then(&mut next).flatten(),
                MatrixClass::BackwardTridiagonal => {
                    ((i + j).abs_diff(n - 1) <= 1).then(&mut next).flatten()
                }
                MatrixClass::CyclicHankel => Some((i + j) % n + 1),
                MatrixClass::Hankel => Some(i + j + 1),
                MatrixClass::Toeplitz => match j.cmp(&i) {
                    std::cmp::Ordering::Greater => Some(j - i),
                    std::cmp::Ordering::Less => Some(n - 1 + (i - j)),
                    std::cmp::Ordering::Equal => None,
                },
            };
        }
    }
    let m = match class {
        MatrixClass::General => n * n,
        MatrixClass::Tridiagonal | MatrixClass::BackwardTridiagonal => 3 * n - 2,
        MatrixClass::CyclicHankel => n,
        MatrixClass::Hankel => 2 * n - 1,
        MatrixClass::Toeplitz => 2 * (n - 1),
    };
    Ok(IndexMatrix { class, n, m, cells })
}

/// pos(i,j) = i + (j−1)(j−2)/2 for 1 ≤ i < j.
pub fn pos_index(i: usize, j: usize) -> Result<usize, IndexError> {
    if i == 0 || i >= j {
        return Err(IndexError::BadPair(i, j));
    }
    Ok(i + (j - 1) * (j - 2) / 2)
}

/// Inverse of `pos_index`.
pub fn decode_pos(k: usize) -> (usize, usize) {
    assert!(k >= 1, "candidate indices start at 1");
    // largest j with (j-1)(j-2)/2 < k
    let mut j = ((((8 * k) as f64).sqrt() + 3.0) / 2.0) as usize + 1;
    while j > 2 && (j - 1) * (j - 2) / 2 >= k {
        j -= 1;
    }
    while j * (j - 1) / 2 < k {
        j += 1;
    }
    (k - (j - 1) * (j - 2) / 2, j)
}

/// z_{a,b} as ± a stored candidate; `None` when a = b.
pub fn normalize_candidate(a: usize, b: usize) -> Option<(usize, i32)> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Some((pos_index(a, b).unwrap(), 1)),
        std::cmp::Ordering::Greater => Some((pos_index(b, a).unwrap(), -1)),
        std::cmp::Ordering::Equal => None,
    }
}

/// The candidate variables over `m` ids with their multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSpace {
    pub m: usize,
    pub size: usize,
    pub mu: Vec<usize>,
}

impl CandidateSpace {
    pub fn new(ind: &IndexMatrix) -> Self {
        CandidateSpace { m: ind.m, size: ind.m * (ind.m - 1) / 2, mu: ind.multiplicities() }
    }

    /// 0-based row of z_{i,j}, i < j.
    pub fn slot(&self, i: usize, j: usize) -> usize {
        pos_index(i, j).unwrap() - 1
    }

    pub fn pair(&self, slot: usize) -> (usize, usize) {
        decode_pos(slot + 1)
    }
}
