//! Torsion-free cohomology lattices of quotients built from invariant lattices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{LatticeError, QuotientError};
use crate::lattice::{orthogonal_blocks, GramLattice};
use crate::matrix::{integral, log_p, Matrix};
use crate::snf::kernel_rows;

/// New basis rows in invariant-lattice coordinates, some of them divided by p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueSpec {
    pub transform: Matrix,
    pub divided: Vec<bool>,
}

impl GlueSpec {
    /// The transform may have |det| > 1 when a sub-basis is divided as a whole;
    /// only nondegeneracy is required.
    pub fn new(transform: Matrix, divided: Vec<bool>) -> Result<Self, QuotientError> {
        if !transform.is_square() || divided.len() != transform.nrows() {
            return Err(QuotientError::GlueShape);
        }
        if transform.det().is_zero() {
            return Err(QuotientError::Lattice(LatticeError::DependentRows));
        }
        Ok(GlueSpec { transform, divided })
    }

    pub fn identity(n: usize) -> Self {
        GlueSpec { transform: Matrix::identity(n), divided: vec![false; n] }
    }

    pub fn divided_count(&self) -> usize {
        self.divided.iter().filter(|&&d| d).count()
    }
}

/// L^∨(p): the middle cohomology of the quotient modulo torsion.
pub fn quotient_middle_lattice(l: &GramLattice, p: u64) -> Result<GramLattice, QuotientError> {
    let disc = l.discriminant_group();
    let a = disc
        .p_elementary_rank(p)
        .ok_or_else(|| LatticeError::NotPElementary { p, group: disc.to_string() })?;
    let found = log_p(&l.det().abs(), p).map(|e| e as usize).unwrap_or(usize::MAX);
    if found != a {
        return Err(QuotientError::DiscrMismatch { expected: a, found });
    }
    let out = l.dual_rescaled(p)?;
    let e = log_p(&out.det().abs(), p).map(|e| e as usize).unwrap_or(usize::MAX);
    if e != l.rank() - a {
        return Err(QuotientError::DiscrMismatch { expected: l.rank() - a, found: e });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientResult {
    #[serde(serialize_with = "ser_lattice")]
    pub lattice: GramLattice,
    #[serde(serialize_with = "ser_rational")]
    pub scale: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub fujiki_constant: BigRational,
}

fn ser_lattice<S: serde::Serializer>(l: &GramLattice, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = l.gram().row_vecs().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn content(q: &[Vec<BigRational>]) -> BigRational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for x in q.iter().flatten() {
        num = num.gcd(x.numer());
        den = den.lcm(x.denom());
    }
    BigRational::new(num, den)
}

/// λ > 0 with λ·Q integral of content 1, and C = 3p³/λ².
pub fn fujiki_scale(p: u64, q: &[Vec<BigRational>]) -> Result<(BigRational, BigRational), QuotientError> {
    let c = content(q);
    if c.is_zero() {
        return Err(QuotientError::NoIntegralScale);
    }
    let lambda = c.recip();
    let p3 = BigInt::from(3u64 * p * p * p);
    let fujiki = BigRational::from_integer(p3) / (&lambda * &lambda);
    Ok((lambda, fujiki))
}

/// Beauville–Bogomolov lattice of the quotient: λ·G_T[i][j]/p^(d_i+d_j).
pub fn bb_quotient(l: &GramLattice, p: u64, glue: &GlueSpec) -> Result<QuotientResult, QuotientError> {
    let n = l.rank();
    if glue.transform.ncols() != n || glue.transform.nrows() != n {
        return Err(QuotientError::GlueShape);
    }
    let pb = BigInt::from(p);
    let tg = &glue.transform * l.gram();
    for (i, &d) in glue.divided.iter().enumerate() {
        if d && tg.row(i).iter().any(|x| !x.is_multiple_of(&pb)) {
            return Err(QuotientError::GlueNotInDual(i));
        }
    }
    let gt = l.gram().congruence(&glue.transform);
    let raw: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = glue.divided[i] as u32 + glue.divided[j] as u32;
                    BigRational::new(gt[(i, j)].clone(), pb.pow(e))
                })
                .collect()
        })
        .collect();
    let (lambda, fujiki) = fujiki_scale(p, &raw)?;
    let scaled: Vec<Vec<BigRational>> = raw.iter().map(|r| r.iter().map(|x| x * &lambda).collect()).collect();
    let g = integral(&scaled).ok_or(QuotientError::NoIntegralScale)?;
    let lattice = GramLattice::new(g)?;
    Ok(QuotientResult { lattice, scale: lambda, fujiki_constant: fujiki })
}

/// Divides every class of the p-part of A_L: the new basis spans
/// {x ∈ L : x·L ⊂ pZ} and every row is divided.
pub fn auto_glue(l: &GramLattice, p: u64) -> Result<GlueSpec, QuotientError> {
    let n = l.rank();
    let pb = BigInt::from(p);
    // (x, y) with G·x = p·y
    let mut wide = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            wide[(i, j)] = l.gram()[(i, j)].clone();
        }
        wide[(i, n + i)] = -pb.clone();
    }
    let ker = kernel_rows(&wide);
    let xs: Vec<Vec<BigInt>> = ker.row_vecs().into_iter().map(|r| r[..n].to_vec()).collect();
    let mut gens = Matrix::identity(n).scale(&pb);
    if !xs.is_empty() {
        gens = gens.vstack(&Matrix::from_row_vecs(xs, n));
    }
    let basis = gens.row_hnf();
    GlueSpec::new(basis, vec![true; n])
}

/// One compared quantity: found vs expected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub what: String,
    pub found: String,
    pub expected: String,
    pub pass: bool,
}

impl Check {
    pub fn new(what: &str, found: impl ToString, expected: impl ToString) -> Self {
        let (found, expected) = (found.to_string(), expected.to_string());
        Check { what: what.to_string(), pass: found == expected, found, expected }
    }

    pub fn flag(what: &str, pass: bool, found: impl ToString, expected: impl ToString) -> Self {
        Check { what: what.to_string(), found: found.to_string(), expected: expected.to_string(), pass }
    }
}

fn block_lattices(l: &GramLattice) -> Vec<GramLattice> {
    orthogonal_blocks(l.gram())
        .into_iter()
        .map(|idx| GramLattice::new(l.gram().submatrix(&idx, &idx)).expect("blocks of a nondegenerate form"))
        .collect()
}

fn format_form(g: &[[BigInt; 2]; 2]) -> String {
    format!("[[{},{}],[{},{}]]", g[0][0], g[0][1], g[1][0], g[1][1])
}

/// Searches a basis (v, w) of an indefinite binary lattice with the target Gram.
pub fn binary_isometry(from: &GramLattice, to: &GramLattice, bound: i64) -> Option<[[i64; 2]; 2]> {
    let g = from.gram().to_i64_rows()?;
    let t = to.gram().to_i64_rows()?;
    if g.len() != 2 || t.len() != 2 {
        return None;
    }
    let q = |x: i64, y: i64| g[0][0] * x * x + 2 * g[0][1] * x * y + g[1][1] * y * y;
    let b = |u: (i64, i64), v: (i64, i64)| g[0][0] * u.0 * v.0 + g[0][1] * (u.0 * v.1 + u.1 * v.0) + g[1][1] * u.1 * v.1;
    let box_iter = || (-bound..=bound).flat_map(move |x| (-bound..=bound).map(move |y| (x, y)));
    let firsts: Vec<(i64, i64)> = box_iter().filter(|&(x, y)| q(x, y) == t[0][0]).collect();
    let seconds: Vec<(i64, i64)> = box_iter().filter(|&(x, y)| q(x, y) == t[1][1]).collect();
    for &v in &firsts {
        for &w in &seconds {
            if (v.0 * w.1 - v.1 * w.0).abs() == 1 && b(v, w) == t[0][1] {
                return Some([[v.0, v.1], [w.0, w.1]]);
            }
        }
    }
    None
}

/// Compares a computed lattice with the expected one: rank, |det|, signature,
/// discriminant group, then rank-2 blocks up to isometry (Gauss reduction for
/// definite blocks, an explicit basis change for indefinite ones).
pub fn compare_lattices(found: &GramLattice, expected: &GramLattice, exact: bool) -> Vec<Check> {
    let mut out = vec![
        Check::new("rank", found.rank(), expected.rank()),
        Check::new("|det|", found.det().abs(), expected.det().abs()),
        Check::new("signature", format!("{:?}", found.signature()), format!("{:?}", expected.signature())),
        Check::new("discriminant group", found.discriminant_group(), expected.discriminant_group()),
        Check::new("parity", if found.is_even() { "even" } else { "odd" }, if expected.is_even() { "even" } else { "odd" }),
    ];
    let fb = block_lattices(found);
    let eb = block_lattices(expected);
    let mut fr: Vec<usize> = fb.iter().map(|b| b.rank()).collect();
    let mut er: Vec<usize> = eb.iter().map(|b| b.rank()).collect();
    fr.sort_unstable();
    er.sort_unstable();
    out.push(Check::new("block ranks", format!("{fr:?}"), format!("{er:?}")));
    if fr == er {
        let f2: Vec<&GramLattice> = fb.iter().filter(|b| b.rank() == 2).collect();
        let mut e2: Vec<Option<&GramLattice>> = eb.iter().filter(|b| b.rank() == 2).map(Some).collect();
        for f in f2 {
            let label = match f.binary_reduce() {
                Ok(r) => format_form(&r),
                Err(_) => format!("{:?}", f.gram().to_i64_rows().unwrap_or_default()),
            };
            let hit = e2.iter().position(|e| {
                e.is_some_and(|e| match (f.binary_reduce(), e.binary_reduce()) {
                    (Ok(a), Ok(b)) => a == b,
                    (Err(_), Err(_)) => f.det() == e.det() && binary_isometry(f, e, 40).is_some(),
                    _ => false,
                })
            });
            match hit {
                Some(i) => {
                    e2[i] = None;
                    out.push(Check::flag("rank-2 block", true, &label, "matched"));
                }
                None => out.push(Check::flag("rank-2 block", false, &label, "no isometric expected block")),
            }
        }
    }
    if exact {
        let fg = found.gram().to_i64_rows().map(|r| format!("{r:?}")).unwrap_or_default();
        let eg = expected.gram().to_i64_rows().map(|r| format!("{r:?}")).unwrap_or_default();
        out.push(Check::new("Gram", fg, eg));
    }
    out
}
