//! Exact integer linear algebra: Smith normal form over arbitrary-precision
//! integers, homology of chain complexes with explicit cycle generators,
//! chain maps and the maps they induce on homology.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("boundary of degree {0} composed with degree {} is nonzero", .0 + 1)]
    BoundarySquareNonzero(usize),
    #[error("boundary matrix of degree {degree} has shape {got:?}, expected {expected:?}")]
    Shape { degree: usize, got: (usize, usize), expected: (usize, usize) },
    #[error("degree {0} is out of range")]
    DegreeOutOfRange(usize),
    #[error("not a chain map in degree {0}")]
    NotAChainMap(usize),
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix literal");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone().into());
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Matrix {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn add_to(&mut self, i: usize, j: usize, x: &BigInt) {
        self.data[i * self.cols + j] += x;
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape());
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Rows `lo..hi`.
    pub fn row_slice(&self, lo: usize, hi: usize) -> Matrix {
        Matrix { rows: hi - lo, cols: self.cols, data: self.data[lo * self.cols..hi * self.cols].to_vec() }
    }

    /// Columns `lo..hi`.
    pub fn col_slice(&self, lo: usize, hi: usize) -> Matrix {
        let mut out = Matrix::zeros(self.rows, hi - lo);
        for i in 0..self.rows {
            for j in lo..hi {
                out.set(i, j - lo, self.get(i, j).clone());
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        for k in 0..self.cols {
            let x = &self.data[j * self.cols + k];
            if !x.is_zero() {
                let y = c * x;
                self.data[i * self.cols + k] += y;
            }
        }
    }

    /// col_i += c * col_j
    fn add_col(&mut self, i: usize, j: usize, c: &BigInt) {
        for k in 0..self.rows {
            let x = &self.data[k * self.cols + j];
            if !x.is_zero() {
                let y = c * x;
                self.data[k * self.cols + i] += y;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let x = std::mem::take(&mut self.data[i * self.cols + k]);
            self.data[i * self.cols + k] = -x;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for k in 0..self.rows {
            let x = std::mem::take(&mut self.data[k * self.cols + j]);
            self.data[k * self.cols + j] = -x;
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal with each
/// nonzero entry dividing the next. Inverses are kept for change of basis.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
    pub u_inv: Matrix,
    pub v_inv: Matrix,
    pub rank: usize,
}

impl Smith {
    /// Nonzero diagonal entries, all positive.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct Transforms {
    u: Matrix,
    u_inv: Matrix,
    v: Matrix,
    v_inv: Matrix,
}

fn row_add(a: &mut Matrix, t: &mut Option<Transforms>, i: usize, j: usize, c: &BigInt) {
    a.add_row(i, j, c);
    if let Some(t) = t {
        t.u.add_row(i, j, c);
        t.u_inv.add_col(j, i, &-c);
    }
}

fn col_add(a: &mut Matrix, t: &mut Option<Transforms>, i: usize, j: usize, c: &BigInt) {
    a.add_col(i, j, c);
    if let Some(t) = t {
        t.v.add_col(i, j, c);
        t.v_inv.add_row(j, i, &-c);
    }
}

fn row_swap(a: &mut Matrix, t: &mut Option<Transforms>, i: usize, j: usize) {
    a.swap_rows(i, j);
    if let Some(t) = t {
        t.u.swap_rows(i, j);
        t.u_inv.swap_cols(i, j);
    }
}

fn col_swap(a: &mut Matrix, t: &mut Option<Transforms>, i: usize, j: usize) {
    a.swap_cols(i, j);
    if let Some(t) = t {
        t.v.swap_cols(i, j);
        t.v_inv.swap_rows(i, j);
    }
}

fn row_negate(a: &mut Matrix, t: &mut Option<Transforms>, i: usize) {
    a.negate_row(i);
    if let Some(t) = t {
        t.u.negate_row(i);
        t.u_inv.negate_col(i);
    }
}

/// Smallest nonzero `|a_ij|` with `i, j ≥ from`, ties broken row-major.
fn smallest_entry(a: &Matrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..a.rows {
        for j in from..a.cols {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                best = Some((i, j));
                if x.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

/// Core elimination. Returns the rank; `a` is left diagonal.
fn reduce(a: &mut Matrix, t: &mut Option<Transforms>) -> usize {
    let mut k = 0;
    while k < a.rows.min(a.cols) {
        let Some((pi, pj)) = smallest_entry(a, k) else { break };
        row_swap(a, t, k, pi);
        col_swap(a, t, k, pj);
        loop {
            // Bring the smallest entry of row k / column k to the pivot.
            let mut best = (k, k);
            for i in k + 1..a.rows {
                let x = a.get(i, k);
                if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                    best = (i, k);
                }
            }
            for j in k + 1..a.cols {
                let x = a.get(k, j);
                if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                    best = (k, j);
                }
            }
            row_swap(a, t, k, best.0);
            col_swap(a, t, k, best.1);
            let p = a.get(k, k).clone();
            let mut dirty = false;
            for i in k + 1..a.rows {
                if a.get(i, k).is_zero() {
                    continue;
                }
                let q = a.get(i, k).div_floor(&p);
                row_add(a, t, i, k, &-q);
                dirty |= !a.get(i, k).is_zero();
            }
            for j in k + 1..a.cols {
                if a.get(k, j).is_zero() {
                    continue;
                }
                let q = a.get(k, j).div_floor(&p);
                col_add(a, t, j, k, &-q);
                dirty |= !a.get(k, j).is_zero();
            }
            if dirty {
                continue;
            }
            // Divisibility: fold in any row with an entry the pivot misses.
            let bad = (k + 1..a.rows).find(|&i| (k + 1..a.cols).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => row_add(a, t, k, i, &BigInt::one()),
                None => break,
            }
        }
        if a.get(k, k).is_negative() {
            row_negate(a, t, k);
        }
        k += 1;
    }
    k
}

pub fn smith_normal_form(m: &Matrix) -> Smith {
    let mut d = m.clone();
    let mut t = Some(Transforms {
        u: Matrix::identity(m.rows),
        u_inv: Matrix::identity(m.rows),
        v: Matrix::identity(m.cols),
        v_inv: Matrix::identity(m.cols),
    });
    let rank = reduce(&mut d, &mut t);
    let t = t.unwrap();
    Smith { u: t.u, d, v: t.v, u_inv: t.u_inv, v_inv: t.v_inv, rank }
}

/// The nonzero invariant factors of `m`, without tracking transforms.
pub fn invariant_factors(m: &Matrix) -> Vec<BigInt> {
    let mut d = m.clone();
    let rank = reduce(&mut d, &mut None);
    (0..rank).map(|i| d.get(i, i).clone()).collect()
}

pub fn rank(m: &Matrix) -> usize {
    invariant_factors(m).len()
}

/// An integer solution of `a · z = b`, if one exists.
pub fn solve_integer(a: &Matrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len());
    let s = smith_normal_form(a);
    let ub = s.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, x) in ub.iter().enumerate() {
        if i < s.rank {
            let (q, r) = x.div_rem(s.d.get(i, i));
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !x.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// Sparse integer vector, zero entries absent.
pub type SparseVec = BTreeMap<usize, BigInt>;

/// The Hermite basis of the lattice spanned by `columns`: one vector per
/// pivot row, pivots positive, and entries in later pivot rows reduced into
/// `[0, pivot)`, so equal lattices give equal bases. Columns arrive one at a
/// time and only the echelon basis is kept, which lets a huge sparse
/// boundary be reduced without ever forming it densely.
pub fn lattice_basis(columns: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut pivots: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for mut v in columns {
        v.retain(|_, c| !c.is_zero());
        while let Some((r, a)) = v.iter().next().map(|(&r, a)| (r, a.clone())) {
            let Some(b) = pivots.get(&r).cloned() else {
                if a.is_negative() {
                    v.values_mut().for_each(|c| *c = -&*c);
                }
                pivots.insert(r, v);
                break;
            };
            let p = &b[&r];
            let (q, rem) = a.div_rem(p);
            if rem.is_zero() {
                v = sparse_combination(&BigInt::one(), &v, &-q, &b);
                continue;
            }
            // [x y; -p/g a/g] is unimodular: b gets the gcd pivot and v
            // loses its entry in row r.
            let e = a.extended_gcd(p);
            let (ag, pg) = (&a / &e.gcd, p / &e.gcd);
            let w = sparse_combination(&e.x, &v, &e.y, &b);
            v = sparse_combination(&pg, &v, &-ag, &b);
            pivots.insert(r, w);
        }
    }
    let rows: Vec<usize> = pivots.keys().copied().collect();
    for (k, &r) in rows.iter().enumerate() {
        let mut b = pivots.remove(&r).expect("pivot row");
        if b[&r].is_negative() {
            b.values_mut().for_each(|c| *c = -&*c);
        }
        // Earlier vectors are the only ones with entries in row r.
        for &s in &rows[..k] {
            let v = pivots.get_mut(&s).expect("pivot row");
            let q = v.get(&r).map_or_else(BigInt::zero, |c| c.div_floor(&b[&r]));
            if !q.is_zero() {
                *v = sparse_combination(&BigInt::one(), v, &-q, &b);
            }
        }
        pivots.insert(r, b);
    }
    pivots.into_values().collect()
}

fn sparse_combination(x: &BigInt, u: &SparseVec, y: &BigInt, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (&i, c) in u {
        *out.entry(i).or_insert_with(BigInt::zero) += x * c;
    }
    for (&i, c) in v {
        *out.entry(i).or_insert_with(BigInt::zero) += y * c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `Z^rank ⊕ Z/t_1 ⊕ ... ⊕ Z/t_k` with `t_i | t_{i+1}` and every `t_i ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn zero() -> HomologyGroup {
        HomologyGroup { rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> HomologyGroup {
        HomologyGroup { rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Group `Z^n / L` for a lattice spanned by the columns of `gens`.
    pub fn quotient(n: usize, gens: &Matrix) -> HomologyGroup {
        let f = invariant_factors(gens);
        HomologyGroup { rank: n - f.len(), torsion: f.into_iter().filter(|d| !d.is_one()).collect() }
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// Finite free chain complex `C_D → ... → C_0`. `boundaries[d]` is the matrix
/// of `∂_d : C_d → C_{d-1}`; `boundaries[0]` has zero rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainComplex {
    pub labels: Vec<Vec<String>>,
    pub boundaries: Vec<Matrix>,
}

impl ChainComplex {
    pub fn new(labels: Vec<Vec<String>>, boundaries: Vec<Matrix>) -> Result<ChainComplex, HomologyError> {
        assert_eq!(labels.len(), boundaries.len(), "one boundary per degree");
        for (d, m) in boundaries.iter().enumerate() {
            let expected = (if d == 0 { 0 } else { labels[d - 1].len() }, labels[d].len());
            if m.shape() != expected {
                return Err(HomologyError::Shape { degree: d, got: m.shape(), expected });
            }
        }
        for d in 1..boundaries.len() {
            if !boundaries[d - 1].mul(&boundaries[d]).is_zero() {
                return Err(HomologyError::BoundarySquareNonzero(d - 1));
            }
        }
        Ok(ChainComplex { labels, boundaries })
    }

    /// Highest represented degree.
    pub fn top(&self) -> usize {
        self.labels.len().saturating_sub(1)
    }

    pub fn size(&self, d: usize) -> usize {
        self.labels.get(d).map_or(0, Vec::len)
    }

    /// `∂_d`, or a zero map past the top degree.
    pub fn boundary(&self, d: usize) -> Matrix {
        match self.boundaries.get(d) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.size(d.wrapping_sub(1)), self.size(d)),
        }
    }

    /// Renders a chain as `a - b + 2c` over the degree-`d` labels.
    pub fn format_chain(&self, d: usize, v: &[BigInt]) -> String {
        format_combination(&self.labels[d], v)
    }
}

pub fn format_combination(labels: &[String], v: &[BigInt]) -> String {
    let mut out = String::new();
    for (label, c) in labels.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let coeff = if mag.is_one() { String::new() } else { mag.to_string() };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&coeff);
        out.push_str(label);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// A homology group together with cycle representatives and the projection
/// from cycles to homology coordinates.
#[derive(Debug, Clone)]
pub struct HomologyBasis {
    pub group: HomologyGroup,
    /// Cycles in `C_d` coordinates, torsion generators first.
    pub generators: Vec<Vec<BigInt>>,
    /// Order of each generator; `None` for free ones.
    pub orders: Vec<Option<BigInt>>,
    /// Kernel basis of `∂_d` as columns.
    pub kernel: Matrix,
    /// Maps a cycle to kernel coordinates.
    to_kernel: Matrix,
    /// Maps kernel coordinates to generator coefficients.
    to_gens: Matrix,
}

impl HomologyBasis {
    /// Coefficients of a cycle on the generators; torsion entries reduced.
    pub fn coordinates(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        let k = self.to_kernel.mul_vec(cycle);
        let mut c = self.to_gens.mul_vec(&k);
        for (x, ord) in c.iter_mut().zip(&self.orders) {
            if let Some(o) = ord {
                *x = x.mod_floor(o);
            }
        }
        c
    }

    /// Express a cycle in kernel-basis coordinates.
    pub fn kernel_coordinates(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        self.to_kernel.mul_vec(cycle)
    }
}

pub fn homology(c: &ChainComplex, d: usize) -> Result<HomologyGroup, HomologyError> {
    if d > c.top() {
        return Err(HomologyError::DegreeOutOfRange(d));
    }
    let r = rank(&c.boundaries[d]);
    let k = c.size(d) - r;
    let next = c.boundary(d + 1);
    let f = invariant_factors(&next);
    Ok(HomologyGroup { rank: k - f.len(), torsion: f.into_iter().filter(|x| !x.is_one()).collect() })
}

/// Kernel basis `K` of `∂_d`, the matrix taking cycles to `K`-coordinates,
/// and the image of `∂_{d+1}` in those coordinates.
struct CycleData {
    kernel: Matrix,
    to_kernel: Matrix,
    image: Matrix,
}

fn cycle_data(c: &ChainComplex, d: usize) -> CycleData {
    let s = smith_normal_form(&c.boundaries[d]);
    let n = c.size(d);
    let kernel = s.v.col_slice(s.rank, n);
    let to_kernel = s.v_inv.row_slice(s.rank, n);
    let image = to_kernel.mul(&c.boundary(d + 1));
    CycleData { kernel, to_kernel, image }
}

pub fn homology_basis(c: &ChainComplex, d: usize) -> Result<HomologyBasis, HomologyError> {
    if d > c.top() {
        return Err(HomologyError::DegreeOutOfRange(d));
    }
    let cd = cycle_data(c, d);
    let k = cd.kernel.cols;
    let s2 = smith_normal_form(&cd.image);
    let mut keep = Vec::new();
    let mut orders = Vec::new();
    for i in 0..k {
        if i < s2.rank {
            let di = s2.d.get(i, i);
            if !di.is_one() {
                keep.push(i);
                orders.push(Some(di.clone()));
            }
        } else {
            keep.push(i);
            orders.push(None);
        }
    }
    let basis = cd.kernel.mul(&s2.u_inv);
    let generators = keep.iter().map(|&i| basis.column(i)).collect();
    let mut to_gens = Matrix::zeros(keep.len(), k);
    for (r, &i) in keep.iter().enumerate() {
        for j in 0..k {
            to_gens.set(r, j, s2.u.get(i, j).clone());
        }
    }
    let group = HomologyGroup {
        rank: orders.iter().filter(|o| o.is_none()).count(),
        torsion: orders.iter().flatten().cloned().collect(),
    };
    Ok(HomologyBasis { group, generators, orders, kernel: cd.kernel, to_kernel: cd.to_kernel, to_gens })
}

/// Degreewise matrices `maps[d] : A_d → B_d`.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    pub maps: Vec<Matrix>,
}

impl ChainMap {
    /// Checks `f ∘ ∂ = ∂ ∘ f` in every degree where both sides are represented.
    pub fn new(source: ChainComplex, target: ChainComplex, maps: Vec<Matrix>) -> Result<ChainMap, HomologyError> {
        for (d, f) in maps.iter().enumerate() {
            if f.shape() != (target.size(d), source.size(d)) {
                return Err(HomologyError::Shape {
                    degree: d,
                    got: f.shape(),
                    expected: (target.size(d), source.size(d)),
                });
            }
            if d >= 1 && d <= source.top() && d <= target.top() {
                let lhs = maps[d - 1].mul(&source.boundaries[d]);
                let rhs = target.boundaries[d].mul(f);
                if lhs != rhs {
                    return Err(HomologyError::NotAChainMap(d));
                }
            }
        }
        Ok(ChainMap { source, target, maps })
    }

    pub fn compose(&self, after: &ChainMap) -> Result<ChainMap, HomologyError> {
        let maps = self.maps.iter().zip(&after.maps).map(|(f, g)| g.mul(f)).collect();
        ChainMap::new(self.source.clone(), after.target.clone(), maps)
    }
}

/// The induced map `H_d(A) → H_d(B)` in the generator bases of
/// [`homology_basis`]; rows index target generators.
pub fn induced_map(f: &ChainMap, d: usize) -> Result<Matrix, HomologyError> {
    let fd = f.maps.get(d).ok_or(HomologyError::DegreeOutOfRange(d))?;
    let ha = homology_basis(&f.source, d)?;
    let hb = homology_basis(&f.target, d)?;
    let cols: Vec<Vec<BigInt>> = ha.generators.iter().map(|z| hb.coordinates(&fd.mul_vec(z))).collect();
    Ok(Matrix::from_columns(hb.generators.len(), &cols))
}

/// `H_d(B) / f_*(H_d(A))`.
pub fn cokernel_on_homology(f: &ChainMap, d: usize) -> Result<HomologyGroup, HomologyError> {
    let fd = f.maps.get(d).ok_or(HomologyError::DegreeOutOfRange(d))?;
    let a = cycle_data(&f.source, d);
    let b = cycle_data(&f.target, d);
    let pushed = b.to_kernel.mul(&fd.mul(&a.kernel));
    Ok(HomologyGroup::quotient(b.kernel.cols, &b.image.hcat(&pushed)))
}

/// A cycle with its order in homology (`None` when free).
pub type Witness = (Vec<BigInt>, Option<BigInt>);

/// Cycles of `B` spanning `H_d(B) / f_*(H_d(A))`: the homology basis of the
/// quotient presentation, pulled back to chains of `B`. Each witness is
/// paired with its order (`None` when free).
pub fn cokernel_witnesses(f: &ChainMap, d: usize) -> Result<Vec<Witness>, HomologyError> {
    let fd = f.maps.get(d).ok_or(HomologyError::DegreeOutOfRange(d))?;
    let a = cycle_data(&f.source, d);
    let b = cycle_data(&f.target, d);
    let rel = b.image.hcat(&b.to_kernel.mul(&fd.mul(&a.kernel)));
    let s = smith_normal_form(&rel);
    let basis = b.kernel.mul(&s.u_inv);
    let mut out = Vec::new();
    for i in 0..b.kernel.cols {
        if i < s.rank {
            let di = s.d.get(i, i);
            if !di.is_one() {
                out.push((basis.column(i), Some(di.clone())));
            }
        } else {
            out.push((basis.column(i), None));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_rows(rows)
    }

    #[test]
    fn snf_small_example() {
        let s = smith_normal_form(&m(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn snf_zero_and_identity() {
        let z = smith_normal_form(&Matrix::zeros(3, 2));
        assert_eq!(z.rank, 0);
        assert!(z.d.is_zero());
        let i = smith_normal_form(&Matrix::identity(3));
        assert_eq!(i.d, Matrix::identity(3));
    }

    #[test]
    fn format_chain_signs() {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let v = vec![BigInt::from(1), BigInt::from(-1), BigInt::from(2)];
        assert_eq!(format_combination(&labels, &v), "a - b + 2c");
        assert_eq!(format_combination(&labels, &[BigInt::zero(), BigInt::zero(), BigInt::zero()]), "0");
    }
}
