//! Concrete, exactly evaluable functors from a free-module category over a
//! finite ring into finite-dimensional vector spaces over a prime field.
//!
//! A functor is an object-dimension map together with an arrow map sending
//! matrices over the source ring to matrices over the target field. The
//! functor laws are enforced by testing (a spot check at build time and
//! property tests), not assumed by construction, so user-supplied evaluation
//! tables are admissible too.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::ring::RingSpec;
use crate::table::FunctorTable;

/// Textual descriptor of a built-in functor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FunctorSpec {
    /// Linearization `M -> F_p[Hom(Omega, M)]`; basis = the points of `A^n`.
    U,
    /// Kernel of the split augmentation `U(M) -> U(0)`.
    RedU,
    /// Tensor square; needs source arithmetic equal to the target field.
    T2,
    /// Tensor cube; same constraint as `T2`.
    T3,
    /// Symmetric square, basis `e_i e_j` with `i <= j`.
    S2,
    /// Exterior square, defined in every characteristic as the quotient of
    /// the tensor square by the span of all `x (x) x`; basis `e_i ^ e_j`,
    /// `i < j`.
    L2,
    /// The zero functor.
    Zero,
    Sum(Box<FunctorSpec>, Box<FunctorSpec>),
    Red(Box<FunctorSpec>),
    /// A user-supplied evaluation table (not produced by the parser).
    Table,
}

impl fmt::Display for FunctorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorSpec::U => write!(f, "U"),
            FunctorSpec::RedU => write!(f, "RedU"),
            FunctorSpec::T2 => write!(f, "T2"),
            FunctorSpec::T3 => write!(f, "T3"),
            FunctorSpec::S2 => write!(f, "S2"),
            FunctorSpec::L2 => write!(f, "L2"),
            FunctorSpec::Zero => write!(f, "Zero"),
            FunctorSpec::Sum(a, b) => write!(f, "Sum({a},{b})"),
            FunctorSpec::Red(a) => write!(f, "Red({a})"),
            FunctorSpec::Table => write!(f, "Table"),
        }
    }
}

impl FromStr for FunctorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("Sum(").and_then(|r| r.strip_suffix(')')) {
            let (a, b) = split_top_level(inner)
                .ok_or_else(|| Error::Parse(format!("Sum needs two arguments in `{s}`")))?;
            return Ok(FunctorSpec::Sum(Box::new(a.parse()?), Box::new(b.parse()?)));
        }
        if let Some(inner) = s.strip_prefix("Red(").and_then(|r| r.strip_suffix(')')) {
            return Ok(FunctorSpec::Red(Box::new(inner.parse()?)));
        }
        match s {
            "U" => Ok(FunctorSpec::U),
            "RedU" => Ok(FunctorSpec::RedU),
            "T2" => Ok(FunctorSpec::T2),
            "T3" => Ok(FunctorSpec::T3),
            "S2" => Ok(FunctorSpec::S2),
            "L2" => Ok(FunctorSpec::L2),
            "Zero" => Ok(FunctorSpec::Zero),
            _ => Err(Error::Parse(format!("unknown functor descriptor `{s}`"))),
        }
    }
}

/// Splits `a,b` at the top-level comma, respecting nested parentheses.
fn split_top_level(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

#[derive(Clone, Debug)]
enum Kind {
    U,
    Tensor(u32),
    Sym2,
    Ext2,
    Zero,
    Sum(Box<Functor>, Box<Functor>),
    Red(Box<Functor>),
    Table(Arc<FunctorTable>),
}

/// An exactly evaluable functor: dimensions per arity plus an arrow map.
#[derive(Clone, Debug)]
pub struct Functor {
    spec: FunctorSpec,
    source: RingSpec,
    target: RingSpec,
    kind: Kind,
}

impl Functor {
    /// Builds a functor from its descriptor and checks the functor laws on a
    /// handful of random arrow pairs before handing it out.
    pub fn build(spec: &FunctorSpec, ring: RingSpec, field: RingSpec) -> Result<Functor> {
        let f = Functor::assemble(spec, ring, field)?;
        f.spot_check_laws()?;
        Ok(f)
    }

    fn assemble(spec: &FunctorSpec, ring: RingSpec, field: RingSpec) -> Result<Functor> {
        if !field.is_field() {
            return Err(Error::Incompatible(format!("target {field} is not a field")));
        }
        let same_arith = || -> Result<()> {
            if !ring.same_arithmetic(&field) {
                return Err(Error::Incompatible(format!(
                    "{spec} needs the source ring to share arithmetic with the target field; got {ring} and {field}"
                )));
            }
            Ok(())
        };
        let kind = match spec {
            FunctorSpec::U => Kind::U,
            FunctorSpec::RedU => {
                let inner = Functor::assemble(&FunctorSpec::U, ring, field)?;
                Kind::Red(Box::new(inner))
            }
            FunctorSpec::T2 => {
                same_arith()?;
                Kind::Tensor(2)
            }
            FunctorSpec::T3 => {
                same_arith()?;
                Kind::Tensor(3)
            }
            FunctorSpec::S2 => {
                same_arith()?;
                Kind::Sym2
            }
            FunctorSpec::L2 => {
                same_arith()?;
                Kind::Ext2
            }
            FunctorSpec::Zero => Kind::Zero,
            FunctorSpec::Sum(a, b) => {
                let fa = Functor::assemble(a, ring, field)?;
                let fb = Functor::assemble(b, ring, field)?;
                Kind::Sum(Box::new(fa), Box::new(fb))
            }
            FunctorSpec::Red(a) => {
                let inner = Functor::assemble(a, ring, field)?;
                Kind::Red(Box::new(inner))
            }
            FunctorSpec::Table => {
                return Err(Error::Incompatible(
                    "table functors are built from a FunctorTable, not a descriptor".into(),
                ))
            }
        };
        Ok(Functor { spec: spec.clone(), source: ring, target: field, kind })
    }

    /// Wraps a validated evaluation table.
    pub fn from_table(table: FunctorTable) -> Result<Functor> {
        let f = Functor {
            spec: FunctorSpec::Table,
            source: table.ring(),
            target: table.field(),
            kind: Kind::Table(Arc::new(table)),
        };
        f.spot_check_laws()?;
        Ok(f)
    }

    pub fn spec(&self) -> &FunctorSpec {
        &self.spec
    }

    pub fn source(&self) -> RingSpec {
        self.source
    }

    pub fn target(&self) -> RingSpec {
        self.target
    }

    /// Dimension of the value at `Omega^n`.
    pub fn obj(&self, n: usize) -> Result<usize> {
        match &self.kind {
            Kind::U => {
                let m = self.source.modulus();
                let d = m.checked_pow(n as u32).ok_or_else(|| {
                    Error::Guard(format!("|A|^{n} overflows with |A| = {m}"))
                })?;
                usize::try_from(d).map_err(|_| Error::Guard(format!("|A|^{n} is out of range")))
            }
            Kind::Tensor(d) => Ok(n.pow(*d)),
            Kind::Sym2 => Ok(n * (n + 1) / 2),
            Kind::Ext2 => Ok(n * n.saturating_sub(1) / 2),
            Kind::Zero => Ok(0),
            Kind::Sum(a, b) => Ok(a.obj(n)? + b.obj(n)?),
            Kind::Red(inner) => Ok(inner.obj(n)? - inner.obj(0)?),
            Kind::Table(t) => t.obj(n),
        }
    }

    /// The arrow map: an `obj(rows) x obj(cols)` matrix over the target field.
    pub fn apply(&self, arrow: &ExactMatrix) -> Result<ExactMatrix> {
        if arrow.ring() != self.source {
            return Err(Error::RingMismatch(arrow.ring(), self.source));
        }
        match &self.kind {
            Kind::U => self.apply_u(arrow),
            Kind::Tensor(2) => {
                let a = reinterpret(arrow, self.target);
                a.kron(&a)
            }
            Kind::Tensor(3) => {
                let a = reinterpret(arrow, self.target);
                a.kron(&a)?.kron(&a)
            }
            Kind::Tensor(_) => unreachable!("only squares and cubes are constructed"),
            Kind::Sym2 => self.apply_sym2(arrow),
            Kind::Ext2 => self.apply_ext2(arrow),
            Kind::Zero => Ok(ExactMatrix::zeros(self.target, 0, 0)),
            Kind::Sum(a, b) => {
                let ma = a.apply(arrow)?;
                let mb = b.apply(arrow)?;
                ExactMatrix::block_diag(&[&ma, &mb])
            }
            Kind::Red(inner) => {
                let bn = inner.reduced_basis(arrow.cols())?;
                let bm = inner.reduced_basis(arrow.rows())?;
                let image = inner.apply(arrow)?.mul(&bn)?;
                ExactMatrix::solve_in_basis(&bm, &image)?.ok_or_else(|| {
                    Error::Invariant("arrow map left the reduced subspace".into())
                })
            }
            Kind::Table(t) => t.apply(arrow),
        }
    }

    /// Names of the chosen basis vectors at arity `n`; documentation only.
    pub fn basis_labels(&self, n: usize) -> Result<Vec<String>> {
        match &self.kind {
            Kind::U => Ok(points(self.source.modulus(), n)
                .map(|v| format!("({})", join(&v)))
                .collect()),
            Kind::Tensor(d) => Ok(tuples(n, *d as usize)
                .map(|t| t.iter().map(|i| format!("e{}", i + 1)).collect::<Vec<_>>().join("⊗"))
                .collect()),
            Kind::Sym2 => Ok(sym_pairs(n).map(|(i, j)| format!("e{}e{}", i + 1, j + 1)).collect()),
            Kind::Ext2 => Ok(ext_pairs(n).map(|(i, j)| format!("e{}∧e{}", i + 1, j + 1)).collect()),
            Kind::Zero => Ok(Vec::new()),
            Kind::Sum(a, b) => {
                let mut l = a.basis_labels(n)?;
                l.extend(b.basis_labels(n)?.into_iter().map(|s| format!("{s}'")));
                Ok(l)
            }
            Kind::Red(inner) => {
                // Columns of the reduced basis, spelled in the inner basis.
                let basis = inner.reduced_basis(n)?;
                let inner_labels = inner.basis_labels(n)?;
                Ok((0..basis.cols())
                    .map(|c| {
                        let terms: Vec<String> = basis
                            .column(c)
                            .iter()
                            .enumerate()
                            .filter(|(_, &v)| v != 0)
                            .map(|(i, &v)| format!("{v}·{}", inner_labels[i]))
                            .collect();
                        terms.join("+")
                    })
                    .collect())
            }
            Kind::Table(t) => Ok((0..t.obj(n)?).map(|i| format!("b{}", i + 1)).collect()),
        }
    }

    fn apply_u(&self, arrow: &ExactMatrix) -> Result<ExactMatrix> {
        let m = self.source.modulus();
        let rows = self.obj(arrow.rows())?;
        let cols = self.obj(arrow.cols())?;
        let mut out = ExactMatrix::zeros(self.target, rows, cols);
        for (idx, v) in points(m, arrow.cols()).enumerate() {
            let mut w = vec![0u64; arrow.rows()];
            for (r, slot) in w.iter_mut().enumerate() {
                let mut acc = 0u64;
                for (c, &vc) in v.iter().enumerate() {
                    acc = (acc + self.source.mul(arrow.get(r, c), vc)) % m;
                }
                *slot = acc;
            }
            out.set(point_index(m, &w), idx, 1);
        }
        Ok(out)
    }

    fn apply_sym2(&self, arrow: &ExactMatrix) -> Result<ExactMatrix> {
        let field = self.target;
        let (m, n) = (arrow.rows(), arrow.cols());
        let rows_basis: Vec<(usize, usize)> = sym_pairs(m).collect();
        let cols_basis: Vec<(usize, usize)> = sym_pairs(n).collect();
        let mut out = ExactMatrix::zeros(field, rows_basis.len(), cols_basis.len());
        let a = |r: usize, c: usize| field.normalize_u64(arrow.get(r, c));
        for (cj, &(i, j)) in cols_basis.iter().enumerate() {
            for (ri, &(k, l)) in rows_basis.iter().enumerate() {
                let v = if k == l {
                    field.mul(a(k, i), a(k, j))
                } else {
                    field.add(field.mul(a(k, i), a(l, j)), field.mul(a(l, i), a(k, j)))
                };
                out.set(ri, cj, v);
            }
        }
        Ok(out)
    }

    fn apply_ext2(&self, arrow: &ExactMatrix) -> Result<ExactMatrix> {
        let field = self.target;
        let (m, n) = (arrow.rows(), arrow.cols());
        let rows_basis: Vec<(usize, usize)> = ext_pairs(m).collect();
        let cols_basis: Vec<(usize, usize)> = ext_pairs(n).collect();
        let mut out = ExactMatrix::zeros(field, rows_basis.len(), cols_basis.len());
        let a = |r: usize, c: usize| field.normalize_u64(arrow.get(r, c));
        for (cj, &(i, j)) in cols_basis.iter().enumerate() {
            for (ri, &(k, l)) in rows_basis.iter().enumerate() {
                let v = field.sub(field.mul(a(k, i), a(l, j)), field.mul(a(l, i), a(k, j)));
                out.set(ri, cj, v);
            }
        }
        Ok(out)
    }

    /// Canonical basis of the reduced part: the column-echelon basis of
    /// `1 - F(0 -> n) F(n -> 0)`, the complement of the constant part.
    fn reduced_basis(&self, arity: usize) -> Result<ExactMatrix> {
        let to_zero = ExactMatrix::zeros(self.source, 0, arity);
        let from_zero = ExactMatrix::zeros(self.source, arity, 0);
        let pi = self.apply(&to_zero)?;
        let iota = self.apply(&from_zero)?;
        let id = ExactMatrix::identity(self.target, self.obj(arity)?);
        let q = id.sub(&iota.mul(&pi)?)?;
        q.column_echelon_basis()
    }

    /// Verifies `F(id) = id` and `F(ab) = F(a)F(b)` on a few random pairs.
    fn spot_check_laws(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1abf);
        for n in 0..=2usize {
            let id = ExactMatrix::identity(self.source, n);
            let fid = self.apply(&id)?;
            if !fid.is_identity() {
                return Err(Error::Invariant(format!(
                    "{}: F(id_{n}) is not the identity",
                    self.spec
                )));
            }
        }
        for _ in 0..5 {
            let (m, k, n) = (
                rng.gen_range(1..=2usize),
                rng.gen_range(1..=2usize),
                rng.gen_range(1..=2usize),
            );
            let a = random_matrix(&mut rng, self.source, m, k);
            let b = random_matrix(&mut rng, self.source, k, n);
            let lhs = self.apply(&a.mul(&b)?)?;
            let rhs = self.apply(&a)?.mul(&self.apply(&b)?)?;
            if lhs != rhs {
                return Err(Error::Invariant(format!(
                    "{}: F(ab) != F(a)F(b) on a sampled pair",
                    self.spec
                )));
            }
        }
        Ok(())
    }
}

fn reinterpret(m: &ExactMatrix, ring: RingSpec) -> ExactMatrix {
    let entries = m.entries().iter().map(|&e| e as i64).collect();
    ExactMatrix::new(ring, m.rows(), m.cols(), entries).expect("shape is preserved")
}

pub(crate) fn random_matrix<R: Rng>(rng: &mut R, ring: RingSpec, rows: usize, cols: usize) -> ExactMatrix {
    let entries = (0..rows * cols).map(|_| rng.gen_range(0..ring.modulus()) as i64).collect();
    ExactMatrix::new(ring, rows, cols, entries).expect("shape is consistent")
}

/// All points of `A^n` in mixed-radix order, first coordinate most
/// significant.
pub(crate) fn points(m: u64, n: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = m.pow(n as u32);
    (0..total).map(move |idx| {
        let mut v = vec![0u64; n];
        let mut rest = idx;
        for slot in v.iter_mut().rev() {
            *slot = rest % m;
            rest /= m;
        }
        v
    })
}

pub(crate) fn point_index(m: u64, v: &[u64]) -> usize {
    let mut idx = 0u64;
    for &c in v {
        idx = idx * m + c % m;
    }
    idx as usize
}

fn tuples(n: usize, d: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(d as u32);
    (0..total).map(move |idx| {
        let mut t = vec![0usize; d];
        let mut rest = idx;
        for slot in t.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        t
    })
}

fn sym_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i..n).map(move |j| (i, j)))
}

fn ext_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// A natural transformation between two built-in functors, given by one
/// matrix per arity.
#[derive(Clone, Debug)]
pub struct NatTransform {
    pub name: String,
    pub source: Functor,
    pub target: Functor,
}

/// The supported families: `sym` is the quotient `T2 -> S2`, `alt` the
/// quotient `T2 -> L2`, and `id` is the identity transformation of any
/// functor with itself. Naturality is verified on random arrows before the
/// transformation is handed out.
pub fn nat_transform(name: &str, f: &Functor, g: &Functor) -> Result<NatTransform> {
    let short = name.split(':').next().unwrap_or(name).trim();
    let ok = match short {
        "sym" => f.spec() == &FunctorSpec::T2 && g.spec() == &FunctorSpec::S2,
        "alt" => f.spec() == &FunctorSpec::T2 && g.spec() == &FunctorSpec::L2,
        "id" => f.spec() == g.spec(),
        _ => return Err(Error::Unsupported(format!("unknown transformation `{name}`"))),
    };
    if !ok || f.target() != g.target() || f.source() != g.source() {
        return Err(Error::Unsupported(format!(
            "`{short}` does not connect {} to {}",
            f.spec(),
            g.spec()
        )));
    }
    let nt = NatTransform { name: short.to_string(), source: f.clone(), target: g.clone() };
    let mut rng = ChaCha8Rng::seed_from_u64(0x2bad);
    for _ in 0..5 {
        let (m, n) = (rng.gen_range(1..=3usize), rng.gen_range(1..=3usize));
        let a = random_matrix(&mut rng, f.source(), m, n);
        if !nt.naturality_holds(&a)? {
            return Err(Error::Invariant(format!("`{short}` failed naturality on a sample")));
        }
    }
    Ok(nt)
}

impl NatTransform {
    /// The component at arity `n`, a `G(n) x F(n)` matrix.
    pub fn at(&self, n: usize) -> Result<ExactMatrix> {
        let field = self.source.target();
        let rows = self.target.obj(n)?;
        let cols = self.source.obj(n)?;
        let mut out = ExactMatrix::zeros(field, rows, cols);
        if self.name == "id" {
            return Ok(ExactMatrix::identity(field, rows));
        }
        let col_basis: Vec<(usize, usize)> = tuples(n, 2).map(|t| (t[0], t[1])).collect();
        match self.name.as_str() {
            "sym" => {
                let row_basis: Vec<(usize, usize)> = sym_pairs(n).collect();
                for (cj, &(i, j)) in col_basis.iter().enumerate() {
                    let key = (i.min(j), i.max(j));
                    let ri = row_basis.iter().position(|&p| p == key).expect("pair exists");
                    out.set(ri, cj, 1);
                }
            }
            "alt" => {
                let row_basis: Vec<(usize, usize)> = ext_pairs(n).collect();
                for (cj, &(i, j)) in col_basis.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let key = (i.min(j), i.max(j));
                    let ri = row_basis.iter().position(|&p| p == key).expect("pair exists");
                    let v = if i < j { 1 } else { field.neg(1) };
                    out.set(ri, cj, v);
                }
            }
            _ => unreachable!("constructor restricts the name"),
        }
        Ok(out)
    }

    /// `eta_m F(a) = G(a) eta_n` for `a : Omega^n -> Omega^m`.
    pub fn naturality_holds(&self, arrow: &ExactMatrix) -> Result<bool> {
        let lhs = self.at(arrow.rows())?.mul(&self.source.apply(arrow)?)?;
        let rhs = self.target.apply(arrow)?.mul(&self.at(arrow.cols())?)?;
        Ok(lhs == rhs)
    }
}
