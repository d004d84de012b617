use std::fmt;

/// A cell coordinate, 0-based. `Display` prints the 1-based `(row, col)` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    /// Builds a cell from 1-based coordinates.
    ///
    /// Panics if either coordinate is zero.
    pub fn one_based(row: usize, col: usize) -> Self {
        assert!(row >= 1 && col >= 1, "1-based coordinates start at 1");
        Cell::new(row - 1, col - 1)
    }

    pub fn shares_line_with(&self, other: &Cell) -> bool {
        self.row == other.row || self.col == other.col
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row + 1, self.col + 1)
    }
}

/// Dense row-major `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy> SquareMatrix<T> {
    pub fn filled(n: usize, value: T) -> Self {
        SquareMatrix {
            n,
            data: vec![value; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        SquareMatrix { n, data }
    }

    /// Builds a matrix from nested rows; `None` if the rows are not square.
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(SquareMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn at(&self, cell: Cell) -> T {
        self.get(cell.row, cell.col)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.n + col] = value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn col(&self, col: usize) -> impl Iterator<Item = T> + '_ {
        self.data.iter().skip(col).step_by(self.n).copied()
    }

    pub fn col_vec(&self, col: usize) -> Vec<T> {
        self.col(col).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> SquareMatrix<U> {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        SquareMatrix::from_fn(self.n, |r, c| self.get(c, r))
    }
}
