use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Poly, Var};
use crate::error::{Error, Result};

/// Sparse matrix of polynomials. Only nonzero entries are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    /// `c * I` padded to `rows x cols`.
    pub fn scalar(rows: usize, cols: usize, c: i64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            m.set(i, i, Poly::monomial(c, super::Monomial::one()));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            for (j, p) in row.into_iter().enumerate() {
                m.set(i, j, p);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Stores `p` at `(r, c)`, removing the entry when `p` is zero.
    ///
    /// Panics on out-of-range indices.
    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        if p.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), p);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&Poly> {
        self.entries.get(&(r, c))
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Poly)> {
        self.entries.iter().map(|(&(r, c), p)| (r, c, p))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero entries of column `c`, by row.
    pub fn column(&self, c: usize) -> Vec<(usize, &Poly)> {
        self.entries
            .iter()
            .filter(|((_, cc), _)| *cc == c)
            .map(|(&(r, _), p)| (r, p))
            .collect()
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> + '_ {
        self.entries.values().flat_map(Poly::variables)
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        // Index the right factor by row so each left entry meets only its partners.
        let mut by_row: Vec<Vec<(usize, &Poly)>> = vec![Vec::new(); other.rows];
        for (&(r, c), p) in &other.entries {
            by_row[r].push((c, p));
        }
        let mut acc: BTreeMap<(usize, usize), Poly> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            for &(j, b) in &by_row[k] {
                let slot = acc.entry((i, j)).or_default();
                *slot = slot.add(&a.mul(b));
            }
        }
        acc.retain(|_, p| !p.is_zero());
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            entries: acc,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} plus {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (&(r, c), p) in &other.entries {
            let sum = out.get(r, c).map_or_else(|| p.clone(), |q| q.add(p));
            out.set(r, c, sum);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(k, p)| (*k, p.neg())).collect(),
        }
    }

    /// Stacks `blocks` vertically; all must share a column count.
    pub fn vstack(blocks: &[Self]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut out = Self::zeros(blocks.iter().map(|b| b.rows).sum(), cols);
        let mut offset = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::DimensionMismatch("vstack column counts differ".into()));
            }
            for (&(r, c), p) in &b.entries {
                out.entries.insert((r + offset, c), p.clone());
            }
            offset += b.rows;
        }
        Ok(out)
    }

    /// Concatenates `blocks` horizontally; all must share a row count.
    pub fn hstack(blocks: &[Self]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let mut out = Self::zeros(rows, blocks.iter().map(|b| b.cols).sum());
        let mut offset = 0;
        for b in blocks {
            if b.rows != rows {
                return Err(Error::DimensionMismatch("hstack row counts differ".into()));
            }
            for (&(r, c), p) in &b.entries {
                out.entries.insert((r, c + offset), p.clone());
            }
            offset += b.cols;
        }
        Ok(out)
    }

    /// Text dump: a `# rows cols` header, then one `r c polynomial` line per
    /// nonzero entry in row-major order.
    pub fn to_dump(&self) -> String {
        let mut s = format!("# {} {}\n", self.rows, self.cols);
        for (&(r, c), p) in &self.entries {
            let _ = writeln!(s, "{r} {c} {p}");
        }
        s
    }

    pub fn from_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (rows, cols) = loop {
            let (no, line) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: "missing header".into(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let header = line.strip_prefix('#').ok_or(Error::Parse {
                line: no + 1,
                msg: "expected '# rows cols' header".into(),
            })?;
            break parse_pair(header, no + 1)?;
        };
        let mut m = Self::zeros(rows, cols);
        for (no, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.splitn(3, ' ');
            let (r, c, p) = match (parts.next(), parts.next(), parts.next()) {
                (Some(r), Some(c), Some(p)) => (r, c, p),
                _ => {
                    return Err(Error::Parse {
                        line: no + 1,
                        msg: "expected 'r c polynomial'".into(),
                    })
                }
            };
            m.insert_parsed(r, c, p, no + 1)?;
        }
        Ok(m)
    }

    /// CSV dump with header `row,col,polynomial`; the header's first line
    /// carries the shape as `# rows cols`.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# {} {}\nrow,col,polynomial\n", self.rows, self.cols);
        for (&(r, c), p) in &self.entries {
            let _ = writeln!(s, "{r},{c},{p}");
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (no, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty input".into(),
        })?;
        let shape = header.strip_prefix('#').ok_or(Error::Parse {
            line: no + 1,
            msg: "expected '# rows cols' header".into(),
        })?;
        let (rows, cols) = parse_pair(shape, no + 1)?;
        let mut m = Self::zeros(rows, cols);
        for (no, line) in lines {
            if line.trim().is_empty() || line == "row,col,polynomial" {
                continue;
            }
            let mut parts = line.splitn(3, ',');
            let (r, c, p) = match (parts.next(), parts.next(), parts.next()) {
                (Some(r), Some(c), Some(p)) => (r, c, p),
                _ => {
                    return Err(Error::Parse {
                        line: no + 1,
                        msg: "expected 'row,col,polynomial'".into(),
                    })
                }
            };
            m.insert_parsed(r, c, p, no + 1)?;
        }
        Ok(m)
    }

    fn insert_parsed(&mut self, r: &str, c: &str, p: &str, line: usize) -> Result<()> {
        let err = |msg: String| Error::Parse { line, msg };
        let r: usize = r.parse().map_err(|_| err(format!("bad row {r:?}")))?;
        let c: usize = c.parse().map_err(|_| err(format!("bad column {c:?}")))?;
        if r >= self.rows || c >= self.cols {
            return Err(err(format!("entry ({r},{c}) outside {}x{}", self.rows, self.cols)));
        }
        let poly: Poly = p.parse().map_err(err)?;
        self.set(r, c, poly);
        Ok(())
    }
}

fn parse_pair(s: &str, line: usize) -> Result<(usize, usize)> {
    let mut it = s.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(r)), Some(Ok(c)), None) => Ok((r, c)),
        _ => Err(Error::Parse {
            line,
            msg: format!("bad shape {s:?}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(j: u32) -> Poly {
        Poly::var(Var::x(1, j))
    }

    fn y(j: u32) -> Poly {
        Poly::var(Var::y(1, j))
    }

    #[test]
    fn composition_of_sample_row_and_column_vanishes() {
        let row = PolyMatrix::from_rows(vec![vec![y(1), y(0), x(1).neg(), x(0).neg()]]).unwrap();
        let col = PolyMatrix::from_rows(vec![vec![x(0)], vec![x(1)], vec![y(0)], vec![y(1)]]).unwrap();
        let prod = row.mat_mul(&col).unwrap();
        assert_eq!((prod.rows(), prod.cols()), (1, 1));
        assert!(prod.is_zero());
    }

    #[test]
    fn scalar_identity_and_single_product() {
        let m = PolyMatrix::from_rows(vec![vec![x(0), y(1)], vec![Poly::zero(), x(1)]]).unwrap();
        assert_eq!(PolyMatrix::scalar(2, 2, 1).mat_mul(&m).unwrap(), m);
        let a = PolyMatrix::from_rows(vec![vec![x(0)]]).unwrap();
        assert_eq!(a.mat_mul(&a).unwrap().get(0, 0), Some(&x(0).pow(2)));
    }

    #[test]
    fn dimension_mismatch() {
        let a = PolyMatrix::zeros(2, 3);
        assert!(matches!(a.mat_mul(&a), Err(Error::DimensionMismatch(_))));
        assert!(a.add(&PolyMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let m = PolyMatrix::from_rows(vec![
            vec![y(1).pow(2), Poly::zero()],
            vec![x(0).neg(), x(1).mul(&y(0))],
        ])
        .unwrap();
        let dump = m.to_dump();
        assert_eq!(dump, "# 2 2\n0 0 +1·y1_1^2\n1 0 -1·x1_0^1\n1 1 +1·x1_1^1·y1_0^1\n");
        let back = PolyMatrix::from_dump(&dump).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_dump(), dump);
        let csv = m.to_csv();
        assert_eq!(PolyMatrix::from_csv(&csv).unwrap(), m);
    }

    #[test]
    fn dump_rejects_garbage() {
        assert!(PolyMatrix::from_dump("").is_err());
        assert!(PolyMatrix::from_dump("# 1 1\n0 5 +1").is_err());
        assert!(PolyMatrix::from_dump("# 1 1\n0 0 1").is_err());
        assert!(PolyMatrix::from_dump("1 1\n").is_err());
    }
}
