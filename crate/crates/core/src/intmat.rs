//! Dense integer matrices with Hermite and Smith normal forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Smith form `u · m · v = diag(d)` with `d[i] | d[i+1]`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub d: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }
    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }
    pub fn diag(d: &[BigInt]) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }
    pub fn scalar(n: usize, c: &BigInt) -> IntMatrix {
        IntMatrix::diag(&vec![c.clone(); n])
    }
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> IntMatrix {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        IntMatrix { rows: r, cols, data }
    }
    pub fn from_cols(cols: Vec<Vec<BigInt>>, rows: usize) -> IntMatrix {
        IntMatrix::from_rows(cols, rows).transpose()
    }
    pub fn from_i64(rows: &[Vec<i64>]) -> IntMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            cols,
        )
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }
    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
    pub fn col(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }
    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.to_i64().expect("entry fits in i64")).collect())
            .collect()
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    /// Row-major entries.
    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }
    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut m = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        m.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        m
    }
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
    pub fn add(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
    pub fn sub(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }
    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }
    pub fn pow(&self, n: u32) -> IntMatrix {
        let mut r = IntMatrix::identity(self.rows);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }
    /// Stack rows of `self` above rows of `o`.
    pub fn vstack(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        IntMatrix { rows: self.rows + o.rows, cols: self.cols, data }
    }
    pub fn hstack(&self, o: &IntMatrix) -> IntMatrix {
        self.transpose().vstack(&o.transpose()).transpose()
    }
    /// The sub-matrix of the given rows.
    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        IntMatrix::from_rows(idx.iter().map(|&r| self.row(r).to_vec()).collect(), self.cols)
    }
    /// Drop all-zero rows.
    pub fn nonzero_rows(&self) -> IntMatrix {
        let idx: Vec<usize> = (0..self.rows).filter(|&r| self.row(r).iter().any(|x| !x.is_zero())).collect();
        self.select_rows(&idx)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
    /// row[dst] += k · row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c] * k;
            self.data[dst * self.cols + c] += v;
        }
    }
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src] * k;
            self.data[r * self.cols + dst] += v;
        }
    }
    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -&self.data[r * self.cols + c];
            self.data[r * self.cols + c] = v;
        }
    }

    /// Row Hermite normal form: echelon with positive pivots, entries above
    /// each pivot reduced into `[0, pivot)`, zero rows last.
    pub fn hnf(&self) -> IntMatrix {
        self.hnf_impl(None)
    }
    /// Returns `(h, u)` with `u` unimodular and `u · self = h`.
    pub fn hnf_with_transform(&self) -> (IntMatrix, IntMatrix) {
        let mut u = IntMatrix::identity(self.rows);
        let h = self.hnf_impl(Some(&mut u));
        (h, u)
    }
    fn hnf_impl(&self, mut u: Option<&mut IntMatrix>) -> IntMatrix {
        let mut h = self.clone();
        let mut r = 0;
        for c in 0..h.cols {
            if r == h.rows {
                break;
            }
            loop {
                // smallest nonzero |entry| in column c at rows >= r
                let best = (r..h.rows)
                    .filter(|&i| !h.get(i, c).is_zero())
                    .min_by(|&a, &b| h.get(a, c).abs().cmp(&h.get(b, c).abs()));
                let Some(best) = best else { break };
                h.swap_rows(r, best);
                if let Some(u) = u.as_deref_mut() {
                    u.swap_rows(r, best);
                }
                let mut done = true;
                for i in r + 1..h.rows {
                    if h.get(i, c).is_zero() {
                        continue;
                    }
                    let q = h.get(i, c).div_floor(h.get(r, c));
                    let k = -q;
                    h.add_row(i, r, &k);
                    if let Some(u) = u.as_deref_mut() {
                        u.add_row(i, r, &k);
                    }
                    if !h.get(i, c).is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if h.get(r, c).is_zero() {
                continue;
            }
            if h.get(r, c).is_negative() {
                h.negate_row(r);
                if let Some(u) = u.as_deref_mut() {
                    u.negate_row(r);
                }
            }
            let piv = h.get(r, c).clone();
            for i in 0..r {
                let q = h.get(i, c).div_floor(&piv);
                if !q.is_zero() {
                    let k = -q;
                    h.add_row(i, r, &k);
                    if let Some(u) = u.as_deref_mut() {
                        u.add_row(i, r, &k);
                    }
                }
            }
            r += 1;
        }
        h
    }

    /// Pivot columns of a matrix already in row echelon form.
    pub fn pivots(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            if let Some(c) = self.row(r).iter().position(|x| !x.is_zero()) {
                out.push(c);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.hnf().nonzero_rows().rows
    }

    /// Smith normal form with transforms.
    pub fn snf(&self) -> Smith {
        let mut a = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let n = self.rows.min(self.cols);
        for t in 0..n {
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..a.rows {
                    for j in t..a.cols {
                        let x = a.get(i, j);
                        if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    return Smith { d: (0..n).map(|i| a.get(i, i).clone()).collect(), u, v };
                };
                a.swap_rows(t, bi);
                u.swap_rows(t, bi);
                a.swap_cols(t, bj);
                v.swap_cols(t, bj);
                let mut clean = true;
                for i in t + 1..a.rows {
                    if a.get(i, t).is_zero() {
                        continue;
                    }
                    let k = -a.get(i, t).div_floor(a.get(t, t));
                    a.add_row(i, t, &k);
                    u.add_row(i, t, &k);
                    clean &= a.get(i, t).is_zero();
                }
                for j in t + 1..a.cols {
                    if a.get(t, j).is_zero() {
                        continue;
                    }
                    let k = -a.get(t, j).div_floor(a.get(t, t));
                    a.add_col(j, t, &k);
                    v.add_col(j, t, &k);
                    clean &= a.get(t, j).is_zero();
                }
                if !clean {
                    continue;
                }
                // divisibility of the remaining block by the pivot
                let piv = a.get(t, t).clone();
                let bad = (t + 1..a.rows).find(|&i| (t + 1..a.cols).any(|j| !a.get(i, j).is_multiple_of(&piv)));
                match bad {
                    Some(i) => {
                        let one = BigInt::one();
                        a.add_row(t, i, &one);
                        u.add_row(t, i, &one);
                    }
                    None => break,
                }
            }
            if a.get(t, t).is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
        }
        Smith { d: (0..n).map(|i| a.get(i, i).clone()).collect(), u, v }
    }

    /// Nonzero invariant factors greater than one, i.e. the torsion of the cokernel
    /// `Z^rows / (column span)`, together with the free rank.
    pub fn cokernel(&self) -> (Vec<BigInt>, usize) {
        let s = self.snf();
        let nonzero = s.d.iter().filter(|d| !d.is_zero()).count();
        let tors = s.d.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
        (tors, self.rows - nonzero)
    }

    /// Saturated basis (as columns) of the right kernel `{x : self·x = 0}`,
    /// in Hermite form on the transposed side.
    pub fn kernel(&self) -> IntMatrix {
        let (h, u) = self.transpose().hnf_with_transform();
        let rank = h.nonzero_rows().rows;
        let k = u.select_rows(&(rank..u.rows).collect::<Vec<_>>());
        k.hnf().nonzero_rows().transpose()
    }

    /// Determinant via fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1).clone()
    }

    /// Leading principal minors (for definiteness checks).
    pub fn leading_minors(&self) -> Vec<BigInt> {
        (1..=self.rows)
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                let sub = self.select_rows(&idx).transpose().select_rows(&idx).transpose();
                sub.det()
            })
            .collect()
    }

    /// Solves `self · x = b` over Q; `None` if inconsistent. Free variables are set to zero.
    pub fn solve_rational(&self, b: &[BigInt]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.rows);
        let (rows, cols) = (self.rows, self.cols);
        let mut a: Vec<Vec<BigRational>> = (0..rows)
            .map(|r| {
                let mut v: Vec<BigRational> = self.row(r).iter().map(|x| BigRational::from_integer(x.clone())).collect();
                v.push(BigRational::from_integer(b[r].clone()));
                v
            })
            .collect();
        let mut piv_cols = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..rows {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in c..=cols {
                        let v = &a[r][j] * &f;
                        a[i][j] -= v;
                    }
                }
            }
            piv_cols.push(c);
            r += 1;
            if r == rows {
                break;
            }
        }
        if (r..rows).any(|i| !a[i][cols].is_zero()) {
            return None;
        }
        let mut x = vec![BigRational::zero(); cols];
        for (i, &c) in piv_cols.iter().enumerate() {
            x[c] = a[i][cols].clone();
        }
        Some(x)
    }

    /// Integer solution of `self · x = b` when the rational solution is unique and integral.
    pub fn solve_integral(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let x = self.solve_rational(b)?;
        if !x.iter().all(|v| v.is_integer()) {
            return None;
        }
        let xi: Vec<BigInt> = x.iter().map(|v| v.to_integer()).collect();
        (self.mul_vec(&xi) == b).then_some(xi)
    }
}

impl IntMatrix {
    /// Some integer `x` with `self · x = b`, if one exists.
    pub fn solve_integral_any(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let (h, u) = self.transpose().hnf_with_transform();
        let rank = h.nonzero_rows().rows;
        let h = h.select_rows(&(0..rank).collect::<Vec<_>>());
        let y = coords_in_echelon(&h, b)?;
        let mut x = vec![BigInt::zero(); self.cols];
        for (r, yr) in y.iter().enumerate() {
            for (xi, ur) in x.iter_mut().zip(u.row(r)) {
                *xi += yr * ur;
            }
        }
        Some(x)
    }

    /// Inverse of a matrix with determinant ±1.
    pub fn inverse_unimodular(&self) -> IntMatrix {
        let n = self.rows;
        let cols = (0..n)
            .map(|j| {
                let mut e = vec![BigInt::zero(); n];
                e[j] = BigInt::one();
                self.solve_integral(&e).expect("unimodular matrix")
            })
            .collect();
        IntMatrix::from_cols(cols, n)
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

/// Coordinates `y` with `y · basis = v` for a basis in row echelon form
/// (e.g. HNF with zero rows removed). `None` if `v` is not in the integer row span.
pub fn coords_in_echelon(basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(basis.cols(), v.len());
    let mut res: Vec<BigInt> = v.to_vec();
    let mut y = Vec::with_capacity(basis.rows());
    for r in 0..basis.rows() {
        let row = basis.row(r);
        let pc = row.iter().position(|x| !x.is_zero())?;
        let (q, rem) = res[pc].div_rem(&row[pc]);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (x, b) in res.iter_mut().zip(row) {
                *x -= &q * b;
            }
        }
        y.push(q);
    }
    res.iter().all(|x| x.is_zero()).then_some(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }
    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_examples() {
        assert_eq!(m(&[vec![2, 0], vec![0, 4]]).snf().d, bi(&[2, 4]));
        assert_eq!(m(&[vec![2, 1], vec![0, 2]]).snf().d, bi(&[1, 4]));
        assert_eq!(IntMatrix::zeros(3, 2).snf().d, bi(&[0, 0]));
        assert_eq!(m(&[vec![4, 0], vec![0, 6]]).snf().d, bi(&[2, 12]));
    }

    #[test]
    fn kernel_is_saturated() {
        // x + 2y + 3z = 0 has a saturated rank-2 kernel
        let k = m(&[vec![1, 2, 3]]).kernel();
        assert_eq!(k.cols(), 2);
        assert!(m(&[vec![1, 2, 3]]).mul(&k).is_zero());
        let (tors, free) = k.cokernel();
        assert!(tors.is_empty());
        assert_eq!(free, 1);
        // 2x - 2y = 0: kernel spanned by (1,1), not (2,2)
        let k = m(&[vec![2, -2]]).kernel();
        assert_eq!(k.col(0), bi(&[1, 1]));
    }

    #[test]
    fn determinant_and_solve() {
        let a = m(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(a.det(), BigInt::from(18));
        let x = a.solve_integral(&bi(&[3, 5, 5])).unwrap();
        assert_eq!(x, bi(&[1, 1, 1]));
        assert_eq!(a.leading_minors(), bi(&[2, 5, 18]));
    }

    #[test]
    fn echelon_coordinates() {
        let b = m(&[vec![2, 1, 0], vec![0, 3, 1]]).hnf().nonzero_rows();
        let v = bi(&[4, 8, 2]);
        let y = coords_in_echelon(&b, &v).unwrap();
        let back: Vec<BigInt> = (0..3).map(|c| (0..2).map(|r| &y[r] * b.get(r, c)).sum()).collect();
        assert_eq!(back, v);
        assert!(coords_in_echelon(&b, &bi(&[1, 0, 0])).is_none());
    }

    // gcd of all k×k minors equals d_1···d_k (independent oracle for 2×2 and 3×3)
    fn minors_gcd(a: &IntMatrix, k: usize) -> BigInt {
        fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            (0..n).flat_map(|i| combos(i, k - 1).into_iter().map(move |mut c| { c.push(i); c })).collect()
        }
        let mut g = BigInt::zero();
        for rs in combos(a.rows(), k) {
            for cs in combos(a.cols(), k) {
                let sub = a.select_rows(&rs).transpose().select_rows(&cs);
                g = g.gcd(&sub.det());
            }
        }
        g
    }

    proptest! {
        #[test]
        fn snf_transform_and_minors(v in proptest::collection::vec(-9i64..10, 9), r in 1usize..4, c in 1usize..4) {
            let rows: Vec<Vec<i64>> = (0..r).map(|i| (0..c).map(|j| v[i * 3 + j]).collect()).collect();
            let a = m(&rows);
            let s = a.snf();
            let mut d = IntMatrix::zeros(r, c);
            for (i, x) in s.d.iter().enumerate() {
                d.set(i, i, x.clone());
            }
            prop_assert_eq!(s.u.mul(&a).mul(&s.v), d.clone());
            prop_assert!(s.u.det().abs().is_one());
            prop_assert!(s.v.det().abs().is_one());
            for i in 1..s.d.len() {
                prop_assert!(s.d[i].is_zero() || (!s.d[i - 1].is_zero() && s.d[i].is_multiple_of(&s.d[i - 1])));
            }
            let mut prod = BigInt::one();
            for k in 1..=s.d.len() {
                prod *= &s.d[k - 1];
                prop_assert_eq!(minors_gcd(&a, k), prod.abs());
            }
            // idempotent
            prop_assert_eq!(d.snf().d, s.d.clone());
        }

        #[test]
        fn hnf_properties(v in proptest::collection::vec(-20i64..21, 12), r in 1usize..5) {
            let rows: Vec<Vec<i64>> = (0..r).map(|i| (0..3).map(|j| v[i * 3 + j]).collect()).collect();
            let a = m(&rows);
            let (h, u) = a.hnf_with_transform();
            prop_assert_eq!(u.mul(&a), h.clone());
            prop_assert!(u.det().abs().is_one());
            prop_assert_eq!(h.hnf(), h.clone());
            let piv = h.pivots();
            for (row, &c) in piv.iter().enumerate() {
                prop_assert!(h.get(row, c).is_positive());
                for above in 0..row {
                    prop_assert!(!h.get(above, c).is_negative() && h.get(above, c) < h.get(row, c));
                }
            }
            if r == 3 {
                prop_assert_eq!(h.det().abs(), a.det().abs());
            }
            let k = a.kernel();
            prop_assert!(a.mul(&k).is_zero());
            prop_assert_eq!(k.cols() + a.rank(), 3);
        }
    }
}
