//! Dimension tables and the collapsed grading.
//!
//! Gradings are reported in the convention pinned by the anchor values
//! κ(unknot) = −1, κ(H+) = 0, κ(H−) = −4 with v = i − j: relative to the
//! common published tables both gradings are negated.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// Bigraded dimensions over ℚ: (i, j) -> dim.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct BigradedDims {
    dims: BTreeMap<(i32, i32), usize>,
}

impl BigradedDims {
    pub fn new() -> BigradedDims {
        BigradedDims::default()
    }

    pub fn from_pairs(pairs: &[(i32, i32, usize)]) -> BigradedDims {
        let mut out = BigradedDims::new();
        for &(i, j, d) in pairs {
            out.add(i, j, d);
        }
        out
    }

    pub fn add(&mut self, i: i32, j: i32, dim: usize) {
        if dim == 0 {
            return;
        }
        *self.dims.entry((i, j)).or_insert(0) += dim;
    }

    pub fn get(&self, i: i32, j: i32) -> usize {
        self.dims.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i32, i32), usize)> + '_ {
        self.dims.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// The table of the mirror link: (i, j) -> (-i, -j).
    pub fn mirrored(&self) -> BigradedDims {
        let mut out = BigradedDims::new();
        for (&(i, j), &d) in &self.dims {
            out.add(-i, -j, d);
        }
        out
    }
}

impl fmt::Display for BigradedDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&(i, j), &d) in &self.dims {
            writeln!(f, "{} {} {}", i, j, d)?;
        }
        Ok(())
    }
}

/// Dimensions along the collapsed grading v = i − j.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CollapsedHomology {
    dims: BTreeMap<i32, usize>,
}

impl CollapsedHomology {
    pub fn dim(&self, v: i32) -> usize {
        self.dims.get(&v).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, usize)> + '_ {
        self.dims.iter().map(|(&k, &v)| (k, v))
    }

    pub fn support(&self) -> Vec<i32> {
        self.dims.keys().copied().collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    /// κ = min{v : dim > 0}; None when the support is empty.
    pub fn kappa(&self) -> Option<i32> {
        self.dims.keys().next().copied()
    }
}

impl fmt::Display for CollapsedHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&v, &d) in &self.dims {
            writeln!(f, "{} {}", v, d)?;
        }
        Ok(())
    }
}

/// Sum dims along v = i − j.
pub fn collapse(h: &BigradedDims) -> CollapsedHomology {
    let mut dims: BTreeMap<i32, usize> = BTreeMap::new();
    for ((i, j), d) in h.iter() {
        *dims.entry(i - j).or_insert(0) += d;
    }
    CollapsedHomology { dims }
}

/// Laurent polynomial with integer coefficients in one variable q.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, i64>,
}

impl LaurentPoly {
    pub fn add_term(&mut self, power: i32, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let c = self.coeffs.entry(power).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.coeffs.remove(&power);
        }
    }

    pub fn coeff(&self, power: i32) -> i64 {
        self.coeffs.get(&power).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.coeffs.iter().map(|(&p, &c)| (p, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// q -> q^{-1}.
    pub fn inverted(&self) -> LaurentPoly {
        let mut out = LaurentPoly::default();
        for (&p, &c) in &self.coeffs {
            out.add_term(-p, c);
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&p, &c) in &self.coeffs {
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            let a = c.abs();
            match (a, p) {
                (_, 0) => write!(f, "{}", a)?,
                (1, 1) => write!(f, "q")?,
                (1, _) => write!(f, "q^{}", p)?,
                (_, 1) => write!(f, "{}q", a)?,
                (_, _) => write!(f, "{}q^{}", a, p)?,
            }
        }
        Ok(())
    }
}

/// Alternating sum over i of the quantum-graded dimensions.
pub fn graded_euler_char(h: &BigradedDims) -> LaurentPoly {
    let mut out = LaurentPoly::default();
    for ((i, j), d) in h.iter() {
        let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
        out.add_term(j, sign * d as i64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapse_and_kappa() {
        // unknot table in the reported convention
        let h = BigradedDims::from_pairs(&[(0, -1, 1), (0, 1, 1)]);
        let c = collapse(&h);
        assert_eq!(c.kappa(), Some(-1));
        assert_eq!(c.dim(1), 1);
        assert_eq!(c.dim(-1), 1);
        assert_eq!(c.total_dim(), 2);
    }

    #[test]
    fn empty_kappa_is_none() {
        let c = collapse(&BigradedDims::new());
        assert_eq!(c.kappa(), None);
    }

    #[test]
    fn mirror_negates_table() {
        let h = BigradedDims::from_pairs(&[(0, 0, 1), (0, -2, 1), (-2, -4, 1), (-2, -6, 1)]);
        let m = h.mirrored();
        assert_eq!(m.get(2, 6), 1);
        assert_eq!(m.get(0, 2), 1);
        assert_eq!(collapse(&h).kappa(), Some(0));
        assert_eq!(collapse(&m).kappa(), Some(-4));
    }

    #[test]
    fn euler_char_display_and_inversion() {
        let h = BigradedDims::from_pairs(&[(0, -1, 1), (0, 1, 1)]);
        let e = graded_euler_char(&h);
        assert_eq!(e.coeff(1), 1);
        assert_eq!(e.coeff(-1), 1);
        assert_eq!(e.to_string(), "q^-1 + q");
        assert_eq!(e.inverted(), e);
        let mut p = LaurentPoly::default();
        p.add_term(3, -2);
        p.add_term(0, 1);
        assert_eq!(p.to_string(), "1 - 2q^3");
    }
}
