//! Lattice expressions such as `U(3)+U^2+A2(-1)^2+(-2)`.
//!
//! ```text
//! expr    := term ('+' term)*
//! term    := primary postfix*
//! primary := ATOM | '(' INT ')' | '(' expr ')'
//! postfix := '(' INT ')'      rescale
//!          | '^' INT          repeat
//!          | '*'              dual (rational until rescaled)
//! ATOM    := U | A1 | A2 | A4 | E6 | E8 | L17 | K7 | K19 | H5
//! ```
//! Root lattices are positive definite; write `E8(-1)` for the negative one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::LatticeError;
use crate::lattice::GramLattice;
use crate::matrix::{integral, Matrix};

type QMat = Vec<Vec<BigRational>>;

pub fn parse_lattice_expr(text: &str) -> Result<GramLattice, LatticeError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(p.err("empty expression"));
    }
    let q = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.err("unexpected trailing input"));
    }
    let g = integral(&q).ok_or(LatticeError::NonIntegralResult)?;
    Ok(GramLattice::new(g)?.named(text.trim()))
}

pub fn atom_gram(name: &str) -> Option<Matrix> {
    let m = match name {
        "U" => Matrix::from_i64(&[&[0, 1], &[1, 0]]),
        "A1" => Matrix::from_i64(&[&[2]]),
        "A2" => cartan_a(2),
        "A4" => cartan_a(4),
        "E6" => cartan_e(6),
        "E8" => cartan_e(8),
        "L17" => Matrix::from_i64(&[&[-2, 1, 0, 1], &[1, -2, 0, 0], &[0, 0, -2, 1], &[1, 0, 1, -4]]),
        "K7" => Matrix::from_i64(&[&[-4, 1], &[1, -2]]),
        "K19" => Matrix::from_i64(&[&[-10, 1], &[1, -2]]),
        "H5" => Matrix::from_i64(&[&[2, 1], &[1, -2]]),
        _ => return None,
    };
    Some(m)
}

fn cartan_a(n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = BigInt::from(2);
        if i + 1 < n {
            m[(i, i + 1)] = BigInt::from(-1);
            m[(i + 1, i)] = BigInt::from(-1);
        }
    }
    m
}

// Bourbaki labelling: chain 1-3-4-...-n, node 2 attached to node 4.
fn cartan_e(n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    let mut edges = vec![(0, 2), (1, 3)];
    for i in 2..n - 1 {
        edges.push((i, i + 1));
    }
    for i in 0..n {
        m[(i, i)] = BigInt::from(2);
    }
    for (a, b) in edges {
        m[(a, b)] = BigInt::from(-1);
        m[(b, a)] = BigInt::from(-1);
    }
    m
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> LatticeError {
        LatticeError::ParseError { pos: self.pos, msg: msg.to_string() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<QMat, LatticeError> {
        let mut blocks = vec![self.term()?];
        loop {
            self.skip_ws();
            if self.peek() == Some(b'+') {
                self.pos += 1;
                blocks.push(self.term()?);
            } else {
                break;
            }
        }
        Ok(block_diag(&blocks))
    }

    fn term(&mut self) -> Result<QMat, LatticeError> {
        self.skip_ws();
        let mut m = self.primary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'(') => {
                    let start = self.pos;
                    self.pos += 1;
                    let k = self.int()?;
                    self.expect(b')')?;
                    if k.is_zero() {
                        self.pos = start;
                        return Err(self.err("rescale by zero"));
                    }
                    let kq = BigRational::from_integer(k);
                    m = m.into_iter().map(|r| r.into_iter().map(|x| x * &kq).collect()).collect();
                }
                Some(b'^') => {
                    self.pos += 1;
                    let start = self.pos;
                    let k = self.int()?;
                    let k: usize = k.try_into().map_err(|_| LatticeError::ParseError {
                        pos: start,
                        msg: "bad repetition count".into(),
                    })?;
                    if k == 0 {
                        return Err(LatticeError::ParseError { pos: start, msg: "repetition count 0".into() });
                    }
                    m = block_diag(&vec![m; k]);
                }
                Some(b'*') => {
                    let at = self.pos;
                    self.pos += 1;
                    m = invert(&m).ok_or(LatticeError::ParseError { pos: at, msg: "dual of degenerate form".into() })?;
                }
                _ => break,
            }
        }
        Ok(m)
    }

    fn primary(&mut self) -> Result<QMat, LatticeError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let save = self.pos;
                if let Ok(n) = self.int() {
                    self.skip_ws();
                    if self.peek() == Some(b')') {
                        self.pos += 1;
                        if n.is_zero() {
                            return Err(LatticeError::ParseError { pos: save, msg: "rank-1 form (0)".into() });
                        }
                        return Ok(vec![vec![BigRational::from_integer(n)]]);
                    }
                }
                self.pos = save;
                let m = self.expr()?;
                self.expect(b')')?;
                Ok(m)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let g = atom_gram(name).ok_or(LatticeError::ParseError {
                    pos: start,
                    msg: format!("unknown lattice {name}"),
                })?;
                Ok(g.to_rational())
            }
            _ => Err(self.err("expected a lattice")),
        }
    }

    fn int(&mut self) -> Result<BigInt, LatticeError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn expect(&mut self, c: u8) -> Result<(), LatticeError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }
}

fn block_diag(blocks: &[QMat]) -> QMat {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut out = vec![vec![BigRational::zero(); n]; n];
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                out[off + i][off + j] = x.clone();
            }
        }
        off += b.len();
    }
    out
}

fn invert(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut a: QMat = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, piv);
        let inv = BigRational::one() / &a[c][c];
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn det_abs(s: &str) -> BigInt {
        parse_lattice_expr(s).unwrap().det().abs()
    }

    #[test]
    fn atom_determinants() {
        assert_eq!(det_abs("E6"), BigInt::from(3));
        assert_eq!(det_abs("E8"), BigInt::from(1));
        assert_eq!(det_abs("A4"), BigInt::from(5));
        assert_eq!(det_abs("L17"), BigInt::from(17));
        assert_eq!(det_abs("K7"), BigInt::from(7));
        assert_eq!(det_abs("K19"), BigInt::from(19));
        assert_eq!(det_abs("H5"), BigInt::from(5));
    }

    #[test]
    fn e8_signs() {
        assert_eq!(parse_lattice_expr("E8").unwrap().signature(), (8, 0));
        assert_eq!(parse_lattice_expr("E8(-1)").unwrap().signature(), (0, 8));
    }

    #[test]
    fn sums_and_repeats() {
        let l = parse_lattice_expr("U(3)+U^2+A2^2").unwrap();
        assert_eq!(l.rank(), 10);
        assert_eq!(l.det().abs(), BigInt::from(81));
        assert_eq!(parse_lattice_expr("U(5)+U^2+(-10)").unwrap().rank(), 7);
        assert_eq!(parse_lattice_expr("(-2)").unwrap().gram(), &Matrix::from_i64(&[&[-2]]));
        assert_eq!(parse_lattice_expr("(U+A2)^2").unwrap().rank(), 8);
    }

    #[test]
    fn dual_rescaled_atoms() {
        let l = parse_lattice_expr("E6(-1)*(3)").unwrap();
        assert_eq!(l.rank(), 6);
        assert_eq!(l.det().abs(), BigInt::from(243));
        let l = parse_lattice_expr("A4(-1)*(5)").unwrap();
        assert_eq!(l.det().abs(), BigInt::from(125));
        assert_eq!(parse_lattice_expr("A2*"), Err(LatticeError::NonIntegralResult));
    }

    #[test]
    fn parse_errors_have_positions() {
        assert!(matches!(parse_lattice_expr("U+Q7"), Err(LatticeError::ParseError { pos: 2, .. })));
        assert!(matches!(parse_lattice_expr("U+"), Err(LatticeError::ParseError { pos: 2, .. })));
        assert!(matches!(parse_lattice_expr("U(3"), Err(LatticeError::ParseError { .. })));
        assert!(matches!(parse_lattice_expr(""), Err(LatticeError::ParseError { pos: 0, .. })));
        assert!(matches!(parse_lattice_expr("U)"), Err(LatticeError::ParseError { pos: 1, .. })));
    }
}
