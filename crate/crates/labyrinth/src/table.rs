//! User-supplied functors given as finite evaluation tables.
//!
//! A table lists the images of a generating set of arrows. Loading closes the
//! table under composition: whenever both factors of a product are present,
//! the image of the product is added (or, if already present, checked for
//! consistency). Tables whose entries contradict the functor laws are
//! rejected with a witness.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ExactMatrix, MatrixJson};
use crate::ring::RingSpec;

const MAX_TABLE_ENTRIES: usize = 8192;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct ArrowKey {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl ArrowKey {
    fn of(m: &ExactMatrix) -> Self {
        ArrowKey { rows: m.rows(), cols: m.cols(), entries: m.entries().to_vec() }
    }
}

#[derive(Clone, Debug)]
pub struct FunctorTable {
    ring: RingSpec,
    field: RingSpec,
    obj: Vec<usize>,
    entries: BTreeMap<ArrowKey, (ExactMatrix, ExactMatrix)>, // arrow, image
}

impl FunctorTable {
    pub fn new(
        ring: RingSpec,
        field: RingSpec,
        obj: Vec<usize>,
        generators: Vec<(ExactMatrix, ExactMatrix)>,
    ) -> Result<Self> {
        if !field.is_field() {
            return Err(Error::Incompatible(format!("table target {field} is not a field")));
        }
        let mut table = FunctorTable { ring, field, obj, entries: BTreeMap::new() };
        for (arrow, image) in generators {
            table.insert_checked(arrow, image)?;
        }
        for n in 0..table.obj.len() {
            let id = ExactMatrix::identity(ring, n);
            let fid = ExactMatrix::identity(field, table.obj[n]);
            table.insert_checked(id, fid)?;
        }
        table.close()?;
        Ok(table)
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn field(&self) -> RingSpec {
        self.field
    }

    pub fn obj(&self, n: usize) -> Result<usize> {
        self.obj
            .get(n)
            .copied()
            .ok_or_else(|| Error::Guard(format!("table covers arities < {}, asked for {n}", self.obj.len())))
    }

    pub fn apply(&self, arrow: &ExactMatrix) -> Result<ExactMatrix> {
        if arrow.ring() != self.ring {
            return Err(Error::RingMismatch(arrow.ring(), self.ring));
        }
        self.entries
            .get(&ArrowKey::of(arrow))
            .map(|(_, image)| image.clone())
            .ok_or_else(|| {
                Error::Unsupported(format!(
                    "arrow {}x{} not covered by the functor table",
                    arrow.rows(),
                    arrow.cols()
                ))
            })
    }

    fn insert_checked(&mut self, arrow: ExactMatrix, image: ExactMatrix) -> Result<()> {
        let (m, n) = (arrow.rows(), arrow.cols());
        let expect = (self.obj(m)?, self.obj(n)?);
        if (image.rows(), image.cols()) != expect {
            return Err(Error::Dim(format!(
                "image of a {m}x{n} arrow must be {}x{}, got {}x{}",
                expect.0,
                expect.1,
                image.rows(),
                image.cols()
            )));
        }
        if image.ring() != self.field {
            return Err(Error::RingMismatch(image.ring(), self.field));
        }
        match self.entries.get(&ArrowKey::of(&arrow)) {
            Some((_, old)) if *old != image => Err(Error::Invariant(
                "conflicting images for one arrow in the functor table".into(),
            )),
            Some(_) => Ok(()),
            None => {
                if self.entries.len() >= MAX_TABLE_ENTRIES {
                    return Err(Error::Guard(format!(
                        "functor table closure exceeds {MAX_TABLE_ENTRIES} entries"
                    )));
                }
                self.entries.insert(ArrowKey::of(&arrow), (arrow, image));
                Ok(())
            }
        }
    }

    /// Closes the table under composition, checking the law `F(ab)=F(a)F(b)`
    /// wherever the product is already tabulated.
    fn close(&mut self) -> Result<()> {
        loop {
            let snapshot: Vec<(ExactMatrix, ExactMatrix)> =
                self.entries.values().cloned().collect();
            let before = self.entries.len();
            for (a, fa) in &snapshot {
                for (b, fb) in &snapshot {
                    if a.cols() != b.rows() {
                        continue;
                    }
                    let ab = a.mul(b)?;
                    let fab = fa.mul(fb)?;
                    self.insert_checked(ab, fab)?;
                }
            }
            if self.entries.len() == before {
                return Ok(());
            }
        }
    }
}

/// Wire format for a functor table.
#[derive(Serialize, Deserialize)]
pub struct FunctorTableJson {
    pub ring: RingSpec,
    pub field: RingSpec,
    pub obj: Vec<usize>,
    /// Keys are `"RxC:e1,e2,..."` over the source ring.
    pub generators: BTreeMap<String, MatrixJson>,
}

fn arrow_key_string(m: &ExactMatrix) -> String {
    let body: Vec<String> = m.entries().iter().map(u64::to_string).collect();
    format!("{}x{}:{}", m.rows(), m.cols(), body.join(","))
}

fn parse_arrow_key(ring: RingSpec, key: &str) -> Result<ExactMatrix> {
    let (shape, body) = key
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("arrow key `{key}`: expected `RxC:entries`")))?;
    let (r, c) = shape
        .split_once('x')
        .ok_or_else(|| Error::Parse(format!("arrow key `{key}`: bad shape")))?;
    let rows: usize = r.parse().map_err(|_| Error::Parse(format!("arrow key `{key}`")))?;
    let cols: usize = c.parse().map_err(|_| Error::Parse(format!("arrow key `{key}`")))?;
    let entries: Vec<i64> = if body.is_empty() {
        Vec::new()
    } else {
        body.split(',')
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("arrow key `{key}`"))))
            .collect::<Result<_>>()?
    };
    ExactMatrix::new(ring, rows, cols, entries)
}

impl FunctorTable {
    pub fn to_json(&self) -> FunctorTableJson {
        let generators = self
            .entries
            .values()
            .map(|(arrow, image)| (arrow_key_string(arrow), MatrixJson::from(image)))
            .collect();
        FunctorTableJson { ring: self.ring, field: self.field, obj: self.obj.clone(), generators }
    }

    pub fn from_json(j: FunctorTableJson) -> Result<Self> {
        let mut generators = Vec::new();
        for (key, image) in j.generators {
            let arrow = parse_arrow_key(j.ring, &key)?;
            generators.push((arrow, ExactMatrix::try_from(image)?));
        }
        FunctorTable::new(j.ring, j.field, j.obj, generators)
    }

    /// Tabulates a built-in functor on every arrow between arities up to
    /// `max_arity`. Only sensible for tiny rings.
    pub fn tabulate(f: &crate::functor::Functor, max_arity: usize) -> Result<Self> {
        let ring = f.source();
        let mut generators = Vec::new();
        let mut obj = Vec::new();
        for n in 0..=max_arity {
            obj.push(f.obj(n)?);
        }
        for m in 0..=max_arity {
            for n in 0..=max_arity {
                let count = ring.modulus().pow((m * n) as u32);
                if count > 4096 {
                    return Err(Error::Guard(format!(
                        "tabulating {count} arrows of shape {m}x{n} is past the guard"
                    )));
                }
                for idx in 0..count {
                    let mut entries = Vec::with_capacity(m * n);
                    let mut rest = idx;
                    for _ in 0..m * n {
                        entries.push((rest % ring.modulus()) as i64);
                        rest /= ring.modulus();
                    }
                    let arrow = ExactMatrix::new(ring, m, n, entries)?;
                    let image = f.apply(&arrow)?;
                    generators.push((arrow, image));
                }
            }
        }
        FunctorTable::new(ring, f.target(), obj, generators)
    }
}
