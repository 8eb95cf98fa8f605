//! The DeVore binary measurement matrix, kept implicit.
//!
//! Column `j` is the indicator of the graph of a polynomial a_j over F_q:
//! it has a single 1 in each of the q row blocks, at row `l*q + a_j(l)`.
//! Nothing dense is ever stored; the decoder only reads column supports,
//! which cost O(q) each to compute.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{checked_pow, eval_digits, PrimeField, MAX_DEGREE_BOUND};
use crate::vector::SparseVector;

/// Implicit q^2 x n binary matrix with polynomial-graph columns.
///
/// Every column has exactly q ones and two distinct columns share at most
/// r-1 of them, because distinct polynomials of degree < r agree on at most
/// r-1 points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeVoreMatrix {
    field: PrimeField,
    r: usize,
    n: usize,
}

/// The q row indices where a column is 1, strictly increasing, one per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSupport {
    rows: Vec<usize>,
}

impl ColumnSupport {
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }
}

/// How `verify_main_assumption` picks column pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// All n(n-1)/2 pairs; refused above `EXHAUSTIVE_LIMIT` columns.
    Exhaustive,
    /// `pairs` random distinct pairs from a seeded generator.
    Sampled { pairs: usize, seed: u64 },
}

/// Columns allowed in exhaustive pair verification (O(n^2 q) cost guard).
pub const EXHAUSTIVE_LIMIT: usize = 2_000;

/// Outcome of a pairwise inner-product check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub pairs_checked: usize,
    pub max_inner_product: usize,
    /// Pairs (j, t, inner product) exceeding r-1.
    pub violations: Vec<(usize, usize, usize)>,
}

/// Outcome of brute-force expansion measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    pub sets_checked: usize,
    /// min over all |S| <= K of |N(S)| / (q |S|).
    pub min_ratio: f64,
    pub worst_set: Vec<usize>,
}

impl DeVoreMatrix {
    pub fn new(q: u64, r: usize, n: usize) -> Result<Self> {
        let field = PrimeField::new(q)?;
        if !(2..=MAX_DEGREE_BOUND).contains(&r) {
            return Err(Error::OutOfRange {
                what: "degree bound r",
                value: r as u64,
                limit: MAX_DEGREE_BOUND as u64,
            });
        }
        let max_cols = checked_pow(q, r);
        if n == 0 || (n as u128) > max_cols {
            return Err(Error::OutOfRange {
                what: "column count n",
                value: n as u64,
                limit: max_cols.min(u64::MAX as u128) as u64,
            });
        }
        Ok(DeVoreMatrix { field, r, n })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.field.modulus()
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of rows, m = q^2.
    #[inline]
    pub fn rows(&self) -> usize {
        let q = self.field.modulus() as usize;
        q * q
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Base-q digits of a column index, little-endian, into a stack buffer.
    #[inline]
    pub(crate) fn digits_of(&self, j: usize) -> [u64; MAX_DEGREE_BOUND] {
        let q = self.field.modulus();
        let mut digits = [0u64; MAX_DEGREE_BOUND];
        let mut rest = j as u64;
        for d in digits.iter_mut().take(self.r) {
            *d = rest % q;
            rest /= q;
        }
        digits
    }

    /// Writes the support rows of column `j` into `out` (length q).
    #[inline]
    pub(crate) fn fill_support(&self, j: usize, out: &mut [usize]) {
        let q = self.field.modulus();
        let digits = self.digits_of(j);
        let coeffs = &digits[..self.r];
        for (l, slot) in out.iter_mut().enumerate() {
            let x = l as u64;
            *slot = (x * q + eval_digits(coeffs, x, q)) as usize;
        }
    }

    /// Gathers the q measurements touching column `j` into `out`.
    #[inline]
    pub(crate) fn fill_reduced(&self, j: usize, y: &[f64], out: &mut [f64]) {
        let q = self.field.modulus();
        let digits = self.digits_of(j);
        let coeffs = &digits[..self.r];
        for (l, slot) in out.iter_mut().enumerate() {
            let x = l as u64;
            let row = (x * q + eval_digits(coeffs, x, q)) as usize;
            *slot = y[row];
        }
    }

    /// The q rows where column `j` is 1 (row `l*q + a_j(l)` for each l).
    pub fn column_support(&self, j: usize) -> Result<ColumnSupport> {
        self.check_col(j)?;
        let mut rows = vec![0usize; self.q() as usize];
        self.fill_support(j, &mut rows);
        Ok(ColumnSupport { rows })
    }

    /// y = Ax by scattering each entry into its q support rows; O(||x||_0 q).
    pub fn encode(&self, x: &SparseVector) -> Result<Vec<f64>> {
        if x.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.n,
            });
        }
        let q = self.q() as usize;
        let mut y = vec![0.0f64; self.rows()];
        let mut rows = vec![0usize; q];
        for &(j, v) in &x.entries {
            self.fill_support(j, &mut rows);
            for &row in &rows {
                y[row] += v;
            }
        }
        Ok(y)
    }

    /// Number of shared support rows of columns `j` and `t`; equals the
    /// number of points where their polynomials agree.
    pub fn column_inner_product(&self, j: usize, t: usize) -> Result<usize> {
        self.check_col(j)?;
        self.check_col(t)?;
        let q = self.q();
        let dj = self.digits_of(j);
        let dt = self.digits_of(t);
        let (cj, ct) = (&dj[..self.r], &dt[..self.r]);
        let count = (0..q)
            .filter(|&x| eval_digits(cj, x, q) == eval_digits(ct, x, q))
            .count();
        Ok(count)
    }

    /// Checks that distinct columns never share more than r-1 rows.
    ///
    /// Zero violations are expected for any correctly built matrix; the check
    /// is a regression net, so the default caller should prefer sampling.
    pub fn verify_main_assumption(&self, mode: VerifyMode) -> Result<VerifyReport> {
        self.verify_with(mode, |j, t| self.column_inner_product(j, t).unwrap())
    }

    fn verify_with<F>(&self, mode: VerifyMode, ip: F) -> Result<VerifyReport>
    where
        F: Fn(usize, usize) -> usize,
    {
        let bound = self.r - 1;
        let mut report = VerifyReport {
            pairs_checked: 0,
            max_inner_product: 0,
            violations: Vec::new(),
        };
        let check = |j: usize, t: usize, report: &mut VerifyReport| {
            let v = ip(j, t);
            report.pairs_checked += 1;
            report.max_inner_product = report.max_inner_product.max(v);
            if v > bound {
                report.violations.push((j, t, v));
            }
        };
        match mode {
            VerifyMode::Exhaustive => {
                if self.n > EXHAUSTIVE_LIMIT {
                    return Err(Error::SizeGuard(format!(
                        "exhaustive pair check needs n <= {EXHAUSTIVE_LIMIT}, got {}",
                        self.n
                    )));
                }
                for j in 0..self.n {
                    for t in (j + 1)..self.n {
                        check(j, t, &mut report);
                    }
                }
            }
            VerifyMode::Sampled { pairs, seed } => {
                if self.n < 2 {
                    return Err(Error::InvalidParameter(
                        "sampled verification needs at least two columns".into(),
                    ));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..pairs {
                    let j = rng.gen_range(0..self.n);
                    let mut t = rng.gen_range(0..self.n - 1);
                    if t >= j {
                        t += 1;
                    }
                    check(j, t, &mut report);
                }
            }
        }
        Ok(report)
    }

    /// Expansion defect beta = (r-1)(h-1)/q for input sets of size up to h.
    /// The column graph is then an (h, 1-beta)-expander.
    pub fn expander_beta(&self, h: usize) -> Result<f64> {
        if h == 0 {
            return Err(Error::InvalidParameter("set size h must be >= 1".into()));
        }
        let q = self.q();
        // h < q/(r-1) + 1, i.e. (h-1)(r-1) < q, otherwise beta >= 1.
        if ((h - 1) * (self.r - 1)) as u64 >= q {
            return Err(Error::InvalidParameter(format!(
                "h = {h} too large: requires (h-1)(r-1) < q = {q}"
            )));
        }
        Ok(((self.r - 1) * (h - 1)) as f64 / q as f64)
    }

    /// Enumerates every input set S with |S| <= k_max and measures
    /// min |N(S)| / (q |S|). Tiny instances only.
    pub fn verify_expansion_bruteforce(&self, k_max: usize) -> Result<ExpansionReport> {
        if k_max == 0 || k_max > self.n {
            return Err(Error::InvalidParameter(format!(
                "set size bound {k_max} out of range for n = {}",
                self.n
            )));
        }
        let total: u128 = (1..=k_max).map(|k| binomial(self.n, k)).sum();
        if total > 1_000_000 {
            return Err(Error::SizeGuard(format!(
                "{total} candidate sets exceed the 10^6 enumeration budget"
            )));
        }
        let q = self.q() as usize;
        let words = self.rows().div_ceil(64);
        let supports: Vec<Vec<usize>> = (0..self.n)
            .map(|j| self.column_support(j).unwrap().rows).collect();

        let mut report = ExpansionReport {
            sets_checked: 0,
            min_ratio: f64::INFINITY,
            worst_set: Vec::new(),
        };
        let mut bitset = vec![0u64; words];
        let mut set = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            set.clear();
            set.extend(0..k);
            loop {
                bitset.iter_mut().for_each(|w| *w = 0);
                for &j in &set {
                    for &row in &supports[j] {
                        bitset[row / 64] |= 1u64 << (row % 64);
                    }
                }
                let neighbors: u32 = bitset.iter().map(|w| w.count_ones()).sum();
                let ratio = neighbors as f64 / (q * k) as f64;
                report.sets_checked += 1;
                if ratio < report.min_ratio {
                    report.min_ratio = ratio;
                    report.worst_set = set.clone();
                }
                if !next_combination(&mut set, self.n) {
                    break;
                }
            }
        }
        Ok(report)
    }

    /// Upper bound (k-1)(r-1)/q on the RIP constant of order k for the
    /// column-normalized matrix A' = A / sqrt(q).
    pub fn rip_constant_bound(&self, k: usize) -> f64 {
        assert!(k >= 1, "RIP order must be at least 1");
        ((k - 1) * (self.r - 1)) as f64 / self.q() as f64
    }

    /// CSV export: header `# devore q=<q> r=<r> n=<n>`, then one line per
    /// column `j,v_1,...,v_q` listing its support rows.
    pub fn write_support_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# devore q={} r={} n={}", self.q(), self.r, self.n)?;
        let mut rows = vec![0usize; self.q() as usize];
        let mut line = String::new();
        for j in 0..self.n {
            self.fill_support(j, &mut rows);
            line.clear();
            line.push_str(&j.to_string());
            for &row in &rows {
                line.push(',');
                line.push_str(&row.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    #[inline]
    fn check_col(&self, j: usize) -> Result<()> {
        if j >= self.n {
            return Err(Error::OutOfRange {
                what: "column index",
                value: j as u64,
                limit: (self.n - 1) as u64,
            });
        }
        Ok(())
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Advances `set` to the next k-combination of 0..n in lexicographic order.
fn next_combination(set: &mut [usize], n: usize) -> bool {
    let k = set.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if set[i] < n - k + i {
            set[i] += 1;
            for j in (i + 1)..k {
                set[j] = set[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::poly_to_index;
    use crate::field::Poly;
    use std::collections::HashSet;

    // Dense oracle built straight from the definition: entry (row (i, val), col a)
    // is 1 iff a(i) = val, with a(i) evaluated by summing powers (not Horner).
    fn dense_matrix(q: u64, r: usize, n: usize) -> Vec<Vec<u8>> {
        let m = (q * q) as usize;
        let mut mat = vec![vec![0u8; n]; m];
        for j in 0..n {
            // digits by naive repeated division
            let mut digits = Vec::new();
            let mut rest = j as u64;
            for _ in 0..r {
                digits.push(rest % q);
                rest /= q;
            }
            for i in 0..q {
                let mut val = 0u64;
                let mut xpow = 1u64;
                for &c in &digits {
                    val = (val + c * xpow) % q;
                    xpow = (xpow * i) % q;
                }
                mat[(i * q + val) as usize][j] = 1;
            }
        }
        mat
    }

    #[test]
    fn support_of_known_polynomial() {
        // a(x) = 1 + 2x + x^2 + x^3 over F_3 -> ones at rows 1, 5, 8.
        let mat = DeVoreMatrix::new(3, 4, 81).unwrap();
        let field = PrimeField::new(3).unwrap();
        let a = Poly::new(vec![1, 2, 1, 1], &field).unwrap();
        let j = poly_to_index(&a, &field) as usize;
        let support = mat.column_support(j).unwrap();
        assert_eq!(support.rows(), &[1, 5, 8]);

        // zero polynomial sits at the start of every block
        let z = mat.column_support(0).unwrap();
        assert_eq!(z.rows(), &[0, 3, 6]);
    }

    #[test]
    fn support_structure_one_per_block() {
        for (q, r) in [(3u64, 2usize), (5, 3), (7, 2)] {
            let n = checked_pow(q, r) as usize;
            let mat = DeVoreMatrix::new(q, r, n).unwrap();
            for j in 0..n {
                let s = mat.column_support(j).unwrap();
                assert_eq!(s.rows().len(), q as usize);
                for (l, &row) in s.rows().iter().enumerate() {
                    let block = l as u64;
                    assert!(row as u64 >= block * q && (row as u64) < (block + 1) * q);
                }
                assert!(s.rows().windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn supports_match_dense_oracle() {
        let (q, r, n) = (5u64, 3usize, 125usize);
        let mat = DeVoreMatrix::new(q, r, n).unwrap();
        let dense = dense_matrix(q, r, n);
        for j in [0usize, 1, 7, 60, 124] {
            let s = mat.column_support(j).unwrap();
            let oracle: Vec<usize> = (0..mat.rows()).filter(|&row| dense[row][j] == 1).collect();
            assert_eq!(s.rows(), oracle.as_slice(), "column {j}");
        }
    }

    #[test]
    fn encode_matches_dense_multiply() {
        let (q, r, n) = (5u64, 3usize, 125usize);
        let mat = DeVoreMatrix::new(q, r, n).unwrap();
        let dense = dense_matrix(q, r, n);
        let x = SparseVector::new(n, vec![(7, 2.5), (93, -1.25)]).unwrap();
        let y = mat.encode(&x).unwrap();
        let xd = x.to_dense();
        for (row, dr) in dense.iter().enumerate() {
            let want: f64 = dr
                .iter()
                .zip(xd.iter())
                .map(|(&a, &v)| a as f64 * v)
                .sum();
            assert_eq!(y[row], want, "row {row}");
        }

        // zero vector and canonical basis vector
        let y0 = mat.encode(&SparseVector::zero(n)).unwrap();
        assert!(y0.iter().all(|&v| v == 0.0));
        let ej = SparseVector::new(n, vec![(42, 1.0)]).unwrap();
        let yj = mat.encode(&ej).unwrap();
        let s = mat.column_support(42).unwrap();
        for row in 0..mat.rows() {
            let expect = if s.rows().contains(&row) { 1.0 } else { 0.0 };
            assert_eq!(yj[row], expect);
        }

        let bad = SparseVector::new(100, vec![(3, 1.0)]).unwrap();
        assert!(mat.encode(&bad).is_err());
    }

    #[test]
    fn inner_products_bounded() {
        let mat = DeVoreMatrix::new(3, 2, 9).unwrap();
        for j in 0..9 {
            assert_eq!(mat.column_inner_product(j, j).unwrap(), 3);
            for t in 0..9 {
                if t != j {
                    assert!(mat.column_inner_product(j, t).unwrap() <= 1);
                }
            }
        }
        let mat = DeVoreMatrix::new(5, 3, 125).unwrap();
        for j in [0usize, 3, 17, 80] {
            for t in [1usize, 44, 99, 124] {
                if j != t {
                    assert!(mat.column_inner_product(j, t).unwrap() <= 2);
                }
            }
        }
    }

    #[test]
    fn verify_exhaustive_clean_matrix() {
        let mat = DeVoreMatrix::new(3, 2, 9).unwrap();
        let report = mat.verify_main_assumption(VerifyMode::Exhaustive).unwrap();
        assert_eq!(report.pairs_checked, 36);
        assert_eq!(report.max_inner_product, 1);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn verify_detects_duplicated_column() {
        let mat = DeVoreMatrix::new(3, 2, 9).unwrap();
        // pretend column 5 is a duplicate of column 2
        let remap = |j: usize| if j == 5 { 2 } else { j };
        let report = mat
            .verify_with(VerifyMode::Exhaustive, |j, t| {
                mat.column_inner_product(remap(j), remap(t)).unwrap()
            })
            .unwrap();
        assert_eq!(report.max_inner_product, 3);
        assert!(report.violations.contains(&(2, 5, 3)));
    }

    #[test]
    fn verify_guards_and_sampling() {
        let mat = DeVoreMatrix::new(29, 3, 20_000).unwrap();
        assert!(matches!(
            mat.verify_main_assumption(VerifyMode::Exhaustive),
            Err(Error::SizeGuard(_))
        ));
        let report = mat
            .verify_main_assumption(VerifyMode::Sampled {
                pairs: 10_000,
                seed: 7,
            })
            .unwrap();
        assert_eq!(report.pairs_checked, 10_000);
        assert!(report.max_inner_product <= 2);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn beta_examples() {
        let mat29 = DeVoreMatrix::new(29, 3, 841).unwrap();
        assert_eq!(mat29.expander_beta(1).unwrap(), 0.0);
        assert_eq!(mat29.expander_beta(12).unwrap(), 22.0 / 29.0);
        // h = 16 gives (h-1)(r-1) = 30 >= q, the first rejected value
        assert_eq!(mat29.expander_beta(15).unwrap(), 28.0 / 29.0);
        assert!(mat29.expander_beta(16).is_err());

        // planner-sized matrix: h = 2k with k = 6 keeps beta just under 1/4
        let mat89 = DeVoreMatrix::new(89, 3, 20_000).unwrap();
        let beta = mat89.expander_beta(12).unwrap();
        assert_eq!(beta, 22.0 / 89.0);
        assert!(beta <= 0.25 && 0.25 - beta < 0.003);
    }

    #[test]
    fn expansion_bruteforce_small() {
        let mat = DeVoreMatrix::new(5, 2, 25).unwrap();
        let single = mat.verify_expansion_bruteforce(1).unwrap();
        assert_eq!(single.min_ratio, 1.0);
        assert_eq!(single.sets_checked, 25);

        let pairs = mat.verify_expansion_bruteforce(2).unwrap();
        let beta = mat.expander_beta(2).unwrap();
        assert!(pairs.min_ratio >= 1.0 - beta - 1e-12);
        assert_eq!(pairs.sets_checked, 25 + 300);

        // second implementation: neighbor sets via HashSet union
        let mat3 = DeVoreMatrix::new(3, 2, 9).unwrap();
        let report = mat3.verify_expansion_bruteforce(2).unwrap();
        let mut min_ratio = f64::INFINITY;
        for j in 0..9usize {
            for t in 0..9usize {
                if t <= j {
                    continue;
                }
                let mut set: HashSet<usize> = HashSet::new();
                set.extend(mat3.column_support(j).unwrap().rows());
                set.extend(mat3.column_support(t).unwrap().rows());
                min_ratio = min_ratio.min(set.len() as f64 / 6.0);
            }
        }
        for j in 0..9usize {
            let single = mat3.column_support(j).unwrap().rows().len() as f64 / 3.0;
            min_ratio = min_ratio.min(single);
        }
        assert_eq!(report.min_ratio, min_ratio);

        assert!(matches!(
            DeVoreMatrix::new(29, 3, 20_000)
                .unwrap()
                .verify_expansion_bruteforce(4),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn rip_bound_values() {
        let mat = DeVoreMatrix::new(29, 3, 841).unwrap();
        assert_eq!(mat.rip_constant_bound(1), 0.0);
        assert_eq!(mat.rip_constant_bound(6), 10.0 / 29.0);
    }

    #[test]
    fn csv_export_format() {
        let mat = DeVoreMatrix::new(3, 2, 4).unwrap();
        let mut buf = Vec::new();
        mat.write_support_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# devore q=3 r=2 n=4");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "0,0,3,6");
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), 4);
        }
    }

    #[test]
    fn constructor_validation() {
        assert!(DeVoreMatrix::new(4, 3, 10).is_err());
        assert!(DeVoreMatrix::new(3, 1, 3).is_err());
        assert!(DeVoreMatrix::new(3, 2, 10).is_err()); // n > q^r
        assert!(DeVoreMatrix::new(3, 2, 9).is_ok());
    }
}
