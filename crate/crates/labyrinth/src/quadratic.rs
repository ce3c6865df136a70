//! The degree-two specialization: the generator mazes I, T, P, H, E between
//! the one- and two-element sets, their multiplication table, the ten axioms
//! of the truncated category, and the extraction of quadratic data from a
//! quadratic functor.
//!
//! Every law is checked along two independent routes: once as an identity of
//! canonical maze combinations after truncation at two passages, and once as
//! an exact matrix identity after evaluation through a quadratic functor
//! (where mazes with more than two passages die on their own because the
//! third cross-effect vanishes).
//!
//! Two rows of the source table are famously shaky and are handled
//! empirically rather than assumed: the second summand of `H(x)P` is printed
//! once with `T` and once with `I`, and the row for `T(g,d)H(x)` omits the
//! swap that its own axioms force. Each printed variant is evaluated and
//! reported next to the corrected one; nothing is silently repaired.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::crosseffects::{ce_dim, degree, CeBasis, Degree};
use crate::error::{Error, Result};
use crate::functor::Functor;
use crate::matrix::ExactMatrix;
use crate::maze::{normalize, MazeSum};
use crate::phi::Phi;
use crate::ring::RingSpec;
use crate::sets::IndexSet;

const MAX_PASSAGES: usize = 8;
const TRUNCATION: usize = 2;

/// Tags of the generator mazes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GenTag {
    /// `I(e)`: the scalar loop on the one-element set.
    IScalar,
    /// `I(a,b)`: the diagonal maze on the two-element set.
    IPair,
    /// `T(g,d)`: the crossed maze on the two-element set.
    T,
    /// `P(z,h)`: two passages merging into one target vertex.
    P,
    /// `H(x)`: two passages emanating from one source vertex.
    H,
    /// `E(w)`: two parallel loops on the one-element set.
    E,
}

fn one() -> IndexSet {
    IndexSet::numeric(1)
}

fn two() -> IndexSet {
    IndexSet::numeric(2)
}

/// Builds a generator maze as a normalized combination; zero parameters give
/// the zero morphism.
pub fn generator(tag: GenTag, params: &[i64], ring: RingSpec) -> Result<MazeSum> {
    let named = |passages: &[(&str, &str, i64)]| -> Vec<(String, String, i64)> {
        passages.iter().map(|&(t, f, l)| (t.to_string(), f.to_string(), l)).collect()
    };
    let expect = |n: usize| -> Result<()> {
        if params.len() != n {
            return Err(Error::Dim(format!(
                "{tag:?} takes {n} parameters, got {}",
                params.len()
            )));
        }
        Ok(())
    };
    match tag {
        GenTag::IScalar => {
            expect(1)?;
            normalize(ring, &one(), &one(), &named(&[("1", "1", params[0])]))
        }
        GenTag::IPair => {
            expect(2)?;
            normalize(ring, &two(), &two(), &named(&[("1", "1", params[0]), ("2", "2", params[1])]))
        }
        GenTag::T => {
            expect(2)?;
            normalize(ring, &two(), &two(), &named(&[("2", "1", params[0]), ("1", "2", params[1])]))
        }
        GenTag::P => {
            expect(2)?;
            normalize(ring, &one(), &two(), &named(&[("1", "1", params[0]), ("1", "2", params[1])]))
        }
        GenTag::H => {
            expect(2)?;
            normalize(ring, &two(), &one(), &named(&[("1", "1", params[0]), ("2", "1", params[1])]))
        }
        GenTag::E => {
            expect(2)?;
            normalize(ring, &one(), &one(), &named(&[("1", "1", params[0]), ("1", "1", params[1])]))
        }
    }
}

/// The spanning system of the hom-set between the one- and two-element
/// objects, enumerated over the finite ring. Entries whose parameters kill a
/// passage come out as the zero morphism.
pub fn laby2_hom_basis(
    ring: RingSpec,
    from: usize,
    to: usize,
) -> Result<Vec<(String, MazeSum)>> {
    let mut out = Vec::new();
    let mut push = |tag: GenTag, params: Vec<u64>| -> Result<()> {
        let signed: Vec<i64> = params.iter().map(|&x| x as i64).collect();
        let name = format!("{:?}({})", tag, params.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
        out.push((name, generator(tag, &signed, ring)?));
        Ok(())
    };
    match (from, to) {
        (1, 1) => {
            for e in ring.elements() {
                push(GenTag::IScalar, vec![e])?;
            }
            for w1 in ring.elements() {
                for w2 in ring.elements() {
                    push(GenTag::E, vec![w1, w2])?;
                }
            }
        }
        (2, 1) => {
            for z in ring.elements() {
                for h in ring.elements() {
                    push(GenTag::P, vec![z, h])?;
                }
            }
        }
        (1, 2) => {
            for x1 in ring.elements() {
                for x2 in ring.elements() {
                    push(GenTag::H, vec![x1, x2])?;
                }
            }
        }
        (2, 2) => {
            for a in ring.elements() {
                for b in ring.elements() {
                    push(GenTag::IPair, vec![a, b])?;
                }
            }
            for g in ring.elements() {
                for d in ring.elements() {
                    push(GenTag::T, vec![g, d])?;
                }
            }
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "hom-sets are spanned only between the objects [1] and [2]; got [{from}] -> [{to}]"
            )))
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The multiplication table and the ten axioms
// ---------------------------------------------------------------------------

/// One relation to check: two composable factors and the stated result.
struct LawInstance {
    lhs_outer: MazeSum,
    lhs_inner: MazeSum,
    rhs: MazeSum,
}

struct Law {
    name: &'static str,
    params: usize,
    /// Printed in the source but inconsistent with the rest of the system;
    /// reported, not required to hold.
    disputed: bool,
}

const LAWS: &[Law] = &[
    Law { name: "I(e)I(e') = I(ee')", params: 2, disputed: false },
    Law { name: "I(a,b)I(a',b') = I(aa',bb')", params: 4, disputed: false },
    Law { name: "I(a,b)T(g,d) = T(bg,ad)", params: 4, disputed: false },
    Law { name: "T(g,d)I(a,b) = T(ga,db)", params: 4, disputed: false },
    Law { name: "T(g,d)T(g',d') = I(dg',gd')", params: 4, disputed: false },
    Law { name: "I(a,b)H(x) = H((a+b)x)", params: 4, disputed: false },
    Law { name: "T(g,d)H(x) = H((d+g)sx)", params: 4, disputed: false },
    Law { name: "T(g,d)H(x) = H((d+g)x) [printed]", params: 4, disputed: true },
    Law { name: "P(z,h)I(a,b) = P(za,hb)", params: 4, disputed: false },
    Law { name: "P(z,h)T(g,d) = P(hg,zd)", params: 4, disputed: false },
    Law { name: "H(x)I(e) = H(xe)", params: 3, disputed: false },
    Law { name: "I(e)E(w) = E((e+e)w)", params: 3, disputed: false },
    Law { name: "E(w)I(e) = E(we)", params: 3, disputed: false },
    Law { name: "E(w)E(w') = E((r1w+r2w)w') + E((r2w+r1w)w')", params: 4, disputed: false },
    Law { name: "H(x)E(w) = H((r1x+r2x)w) + H((r1x+r2x)sw)", params: 4, disputed: false },
    Law { name: "H(x)P(z,h) = I(r1xz,r2xh) + T(r2xz,r1xh)", params: 4, disputed: false },
    Law { name: "E(w)P(z,h) = P(r1wz,r2wh) + P(r2wz,r1wh)", params: 4, disputed: false },
    Law { name: "E(w)P(z,h) = P(r1wz,r2wh) + P(r2wz,r1xh) [printed, x unbound]", params: 4, disputed: true },
    Law { name: "P(z,h)H(x) = E((z+h)x)", params: 4, disputed: false },
    Law { name: "I(e)P(z,h) = P(ez,eh)", params: 3, disputed: false },
];

fn law_instance(idx: usize, p: &[u64], ring: RingSpec) -> Result<LawInstance> {
    let m = |a: u64, b: u64| ring.mul(a, b) as i64;
    let gen = |tag: GenTag, params: &[i64]| generator(tag, params, ring);
    let (lhs_outer, lhs_inner, rhs) = match idx {
        0 => (
            gen(GenTag::IScalar, &[p[0] as i64])?,
            gen(GenTag::IScalar, &[p[1] as i64])?,
            gen(GenTag::IScalar, &[m(p[0], p[1])])?,
        ),
        1 => (
            gen(GenTag::IPair, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::IPair, &[p[2] as i64, p[3] as i64])?,
            gen(GenTag::IPair, &[m(p[0], p[2]), m(p[1], p[3])])?,
        ),
        2 => (
            gen(GenTag::IPair, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::T, &[p[2] as i64, p[3] as i64])?,
            gen(GenTag::T, &[m(p[1], p[2]), m(p[0], p[3])])?,
        ),
        3 => (
            gen(GenTag::T, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::IPair, &[p[2] as i64, p[3] as i64])?,
            gen(GenTag::T, &[m(p[0], p[2]), m(p[1], p[3])])?,
        ),
        4 => (
            gen(GenTag::T, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::T, &[p[2] as i64, p[3] as i64])?,
            gen(GenTag::IPair, &[m(p[1], p[2]), m(p[0], p[3])])?,
        ),
        5 => (
            gen(GenTag::IPair, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::H, &[p[2] as i64, p[3] as i64])?,
            gen(GenTag::H, &[m(p[0], p[2]), m(p[1], p[3])])?,
        ),
        // T(g,d)H(x): the swap forced by T(g,d) = T I(g,d) and TH(x) = H(sx).
        6 => (
            gen(GenTag::T, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::H, &[p[2] as i64, p[3] as i64])?,
            gen(GenTag::H, &[m(p[1], p[3]), m(p[0], p[2])])?,
        ),
        // The same row as printed, without the swap.
        7 => (
            gen(GenTag::T, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::H, &[p[2] as i64, p[3] as i64])?,
            gen(GenTag::H, &[m(p[1], p[2]), m(p[0], p[3])])?,
        ),
        8 => (
            gen(GenTag::P, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::IPair, &[p[2] as i64, p[3] as i64])?,
            gen(GenTag::P, &[m(p[0], p[2]), m(p[1], p[3])])?,
        ),
        9 => (
            gen(GenTag::P, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::T, &[p[2] as i64, p[3] as i64])?,
            gen(GenTag::P, &[m(p[1], p[2]), m(p[0], p[3])])?,
        ),
        10 => (
            gen(GenTag::H, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::IScalar, &[p[2] as i64])?,
            gen(GenTag::H, &[m(p[0], p[2]), m(p[1], p[2])])?,
        ),
        11 => (
            gen(GenTag::IScalar, &[p[0] as i64])?,
            gen(GenTag::E, &[p[1] as i64, p[2] as i64])?,
            gen(GenTag::E, &[m(p[0], p[1]), m(p[0], p[2])])?,
        ),
        12 => (
            gen(GenTag::E, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::IScalar, &[p[2] as i64])?,
            gen(GenTag::E, &[m(p[0], p[2]), m(p[1], p[2])])?,
        ),
        13 => {
            let first = gen(GenTag::E, &[m(p[0], p[2]), m(p[1], p[3])])?;
            let second = gen(GenTag::E, &[m(p[1], p[2]), m(p[0], p[3])])?;
            (
                gen(GenTag::E, &[p[0] as i64, p[1] as i64])?,
                gen(GenTag::E, &[p[2] as i64, p[3] as i64])?,
                first.add(&second)?,
            )
        }
        14 => {
            let first = gen(GenTag::H, &[m(p[0], p[2]), m(p[1], p[3])])?;
            let second = gen(GenTag::H, &[m(p[0], p[3]), m(p[1], p[2])])?;
            (
                gen(GenTag::H, &[p[0] as i64, p[1] as i64])?,
                gen(GenTag::E, &[p[2] as i64, p[3] as i64])?,
                first.add(&second)?,
            )
        }
        15 => {
            let first = gen(GenTag::IPair, &[m(p[0], p[2]), m(p[1], p[3])])?;
            let second = gen(GenTag::T, &[m(p[1], p[2]), m(p[0], p[3])])?;
            (
                gen(GenTag::H, &[p[0] as i64, p[1] as i64])?,
                gen(GenTag::P, &[p[2] as i64, p[3] as i64])?,
                first.add(&second)?,
            )
        }
        16 | 17 => {
            // With the unbound `x` of the printed row read as `w`, both rows
            // coincide; the disputed row keeps its printed name.
            let first = gen(GenTag::P, &[m(p[0], p[2]), m(p[1], p[3])])?;
            let second = gen(GenTag::P, &[m(p[1], p[2]), m(p[0], p[3])])?;
            (
                gen(GenTag::E, &[p[0] as i64, p[1] as i64])?,
                gen(GenTag::P, &[p[2] as i64, p[3] as i64])?,
                first.add(&second)?,
            )
        }
        18 => (
            gen(GenTag::P, &[p[0] as i64, p[1] as i64])?,
            gen(GenTag::H, &[p[2] as i64, p[3] as i64])?,
            gen(GenTag::E, &[m(p[0], p[2]), m(p[1], p[3])])?,
        ),
        19 => (
            gen(GenTag::IScalar, &[p[0] as i64])?,
            gen(GenTag::P, &[p[1] as i64, p[2] as i64])?,
            gen(GenTag::P, &[m(p[0], p[1]), m(p[0], p[2])])?,
        ),
        _ => return Err(Error::Unsupported(format!("no law {idx}"))),
    };
    Ok(LawInstance { lhs_outer, lhs_inner, rhs })
}

struct Axiom {
    name: &'static str,
    params: usize,
    disputed: bool,
}

const AXIOMS: &[Axiom] = &[
    Axiom { name: "I(e)I(e') = I(ee')", params: 2, disputed: false },
    Axiom { name: "I(a,b)I(a',b') = I(aa',bb')", params: 4, disputed: false },
    Axiom { name: "I(a,b)T = TI(b,a)", params: 2, disputed: false },
    Axiom { name: "T^2 = I(1,1)", params: 0, disputed: false },
    Axiom { name: "I(e)P = PI(e,e)", params: 1, disputed: false },
    Axiom { name: "PT = P", params: 0, disputed: false },
    Axiom { name: "H(x)I(e) = H(xe)", params: 3, disputed: false },
    Axiom { name: "TH(x) = H(sx)", params: 2, disputed: false },
    Axiom { name: "I(a,b)H(x) = H((a+b)x)", params: 4, disputed: false },
    Axiom { name: "H(x)P = I(r1x,r2x) + T(r2x,r1x)", params: 2, disputed: false },
    Axiom { name: "H(x)P = I(r1x,r2x) + I(r2x,r1x) [printed]", params: 2, disputed: true },
];

fn axiom_instance(idx: usize, p: &[u64], ring: RingSpec) -> Result<LawInstance> {
    let m = |a: u64, b: u64| ring.mul(a, b) as i64;
    let gen = |tag: GenTag, params: &[i64]| generator(tag, params, ring);
    let t = gen(GenTag::T, &[1, 1])?;
    let pp = gen(GenTag::P, &[1, 1])?;
    let inst = match idx {
        0 | 1 | 6 | 8 => {
            // shared with the multiplication table
            let law = match idx {
                0 => 0,
                1 => 1,
                6 => 10,
                _ => 5,
            };
            return law_instance(law, p, ring);
        }
        2 => LawInstance {
            lhs_outer: gen(GenTag::IPair, &[p[0] as i64, p[1] as i64])?,
            lhs_inner: t.clone(),
            rhs: t.compose(&gen(GenTag::IPair, &[p[1] as i64, p[0] as i64])?, MAX_PASSAGES)?
                .truncate(TRUNCATION),
        },
        3 => LawInstance {
            lhs_outer: t.clone(),
            lhs_inner: t.clone(),
            rhs: gen(GenTag::IPair, &[1, 1])?,
        },
        4 => LawInstance {
            lhs_outer: gen(GenTag::IScalar, &[p[0] as i64])?,
            lhs_inner: pp.clone(),
            rhs: pp
                .compose(&gen(GenTag::IPair, &[p[0] as i64, p[0] as i64])?, MAX_PASSAGES)?
                .truncate(TRUNCATION),
        },
        5 => LawInstance { lhs_outer: pp.clone(), lhs_inner: t.clone(), rhs: pp.clone() },
        7 => LawInstance {
            lhs_outer: t.clone(),
            lhs_inner: gen(GenTag::H, &[p[0] as i64, p[1] as i64])?,
            rhs: gen(GenTag::H, &[p[1] as i64, p[0] as i64])?,
        },
        9 => {
            let first = gen(GenTag::IPair, &[p[0] as i64, p[1] as i64])?;
            let second = gen(GenTag::T, &[p[1] as i64, p[0] as i64])?;
            LawInstance {
                lhs_outer: gen(GenTag::H, &[p[0] as i64, p[1] as i64])?,
                lhs_inner: pp.clone(),
                rhs: first.add(&second)?,
            }
        }
        10 => {
            let first = gen(GenTag::IPair, &[p[0] as i64, p[1] as i64])?;
            let second = gen(GenTag::IPair, &[p[1] as i64, p[0] as i64])?;
            LawInstance {
                lhs_outer: gen(GenTag::H, &[p[0] as i64, p[1] as i64])?,
                lhs_inner: pp.clone(),
                rhs: first.add(&second)?,
            }
        }
        _ => return Err(Error::Unsupported(format!("no axiom {idx}"))),
    };
    let _ = m;
    Ok(inst)
}

/// Result of one relation checked along both routes over every parameter
/// tuple of the ring. On failure the witness carries the parameters and the
/// two mismatching matrices.
#[derive(Clone, Debug, Serialize)]
pub struct LawRow {
    pub name: String,
    /// Part of the verified system; disputed rows are reported only.
    pub required: bool,
    pub maze_pass: bool,
    pub eval_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl LawRow {
    pub fn holds(&self) -> bool {
        self.maze_pass && self.eval_pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadLawReport {
    pub functor: String,
    pub ring: RingSpec,
    pub laws: Vec<LawRow>,
    pub axioms: Vec<LawRow>,
    /// Verdict on the `H(x)P` second-summand discrepancy.
    pub qm2_resolution: String,
    /// True when evaluating a truncated composite always matched evaluating
    /// the full composite.
    pub truncation_invisible: bool,
}

impl QuadLawReport {
    /// All required rows hold along both routes.
    pub fn pass(&self) -> bool {
        self.laws.iter().chain(&self.axioms).filter(|r| r.required).all(LawRow::holds)
            && self.truncation_invisible
    }
}

fn param_tuples(ring: RingSpec, arity: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        for tuple in &out {
            for e in ring.elements() {
                let mut t = tuple.clone();
                t.push(e);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn check_relation<F>(
    name: &str,
    required: bool,
    arity: usize,
    ring: RingSpec,
    phi: &Phi,
    truncation_ok: &mut bool,
    build: F,
) -> Result<LawRow>
where
    F: Fn(&[u64]) -> Result<LawInstance>,
{
    let mut row = LawRow {
        name: name.to_string(),
        required,
        maze_pass: true,
        eval_pass: true,
        witness: None,
    };
    for tuple in param_tuples(ring, arity) {
        let inst = build(&tuple)?;
        let composite = inst.lhs_outer.compose(&inst.lhs_inner, MAX_PASSAGES)?;
        let truncated = composite.truncate(TRUNCATION);
        let maze_ok = truncated == inst.rhs.truncate(TRUNCATION);
        let full_eval = phi.eval(&composite)?.matrix;
        let rhs_eval = phi.eval(&inst.rhs)?.matrix;
        let eval_ok = full_eval == rhs_eval;
        if phi.eval(&truncated)?.matrix != full_eval {
            *truncation_ok = false;
        }
        if (!maze_ok || !eval_ok) && row.witness.is_none() {
            row.witness = Some(serde_json::json!({
                "params": tuple,
                "lhs": full_eval,
                "rhs": rhs_eval,
                "lhs_terms": composite,
                "rhs_terms": inst.rhs,
            }));
        }
        row.maze_pass &= maze_ok;
        row.eval_pass &= eval_ok;
    }
    Ok(row)
}

/// Checks the whole multiplication table and the ten axioms for one quadratic
/// functor, exhaustively over the ring's parameter tuples.
pub fn law_table_check(f: &Functor) -> Result<QuadLawReport> {
    require_quadratic(f)?;
    let ring = f.source();
    if ring.modulus() > 5 {
        return Err(Error::Guard(format!(
            "exhaustive law checking over {ring} enumerates too many tuples"
        )));
    }
    let phi = Phi::new(f);
    let mut truncation_ok = true;
    let mut laws = Vec::new();
    for (idx, law) in LAWS.iter().enumerate() {
        laws.push(check_relation(
            law.name,
            !law.disputed,
            law.params,
            ring,
            &phi,
            &mut truncation_ok,
            |p| law_instance(idx, p, ring),
        )?);
    }
    let mut axioms = Vec::new();
    for (idx, axiom) in AXIOMS.iter().enumerate() {
        axioms.push(check_relation(
            axiom.name,
            !axiom.disputed,
            axiom.params,
            ring,
            &phi,
            &mut truncation_ok,
            |p| axiom_instance(idx, p, ring),
        )?);
    }
    let table_variant = &axioms[9];
    let printed_variant = &axioms[10];
    let qm2_resolution = format!(
        "table variant (second summand T) {}; printed variant (second summand I) {} as canonical sums and {} under evaluation by this functor",
        if table_variant.holds() { "holds along both routes" } else { "fails" },
        if printed_variant.maze_pass { "agrees" } else { "differs" },
        if printed_variant.eval_pass { "is invisible" } else { "fails" },
    );
    Ok(QuadLawReport {
        functor: f.spec().to_string(),
        ring,
        laws,
        axioms,
        qm2_resolution,
        truncation_invisible: truncation_ok,
    })
}

fn require_quadratic(f: &Functor) -> Result<()> {
    match degree(f, 4, 4096)? {
        Degree::Is(2) => Ok(()),
        d => Err(Error::Incompatible(format!(
            "quadratic analysis needs a functor of degree 2, found {d:?}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Extraction of quadratic data
// ---------------------------------------------------------------------------

/// The quadratic data of a functor: its two cross-effects with the involution
/// `T`, the transfer `P`, the family `H`, and the scalar actions on both.
pub struct QuadData {
    pub m_e: CeBasis,
    pub m_ee: CeBasis,
    pub t: ExactMatrix,
    pub p: ExactMatrix,
    pub h: BTreeMap<(u64, u64), ExactMatrix>,
    pub i_act: BTreeMap<u64, ExactMatrix>,
    pub ii_act: BTreeMap<(u64, u64), ExactMatrix>,
    ring: RingSpec,
    field: RingSpec,
}

/// Extracts the quadratic data of a quadratic functor with vanishing value at
/// the zero object (reduce first otherwise).
pub fn extract(f: &Functor) -> Result<QuadData> {
    require_quadratic(f)?;
    if ce_dim(f, 0)? != 0 {
        return Err(Error::Incompatible(
            "the value at the zero object must vanish; extract the reduction instead".into(),
        ));
    }
    let ring = f.source();
    let phi = Phi::new(f);
    let m_e = (*phi.basis(1)?).clone();
    let m_ee = (*phi.basis(2)?).clone();
    let t = phi.eval(&generator(GenTag::T, &[1, 1], ring)?)?.matrix;
    let p = phi.eval(&generator(GenTag::P, &[1, 1], ring)?)?.matrix;
    let mut h = BTreeMap::new();
    for x1 in ring.elements() {
        for x2 in ring.elements() {
            let v = phi.eval(&generator(GenTag::H, &[x1 as i64, x2 as i64], ring)?)?.matrix;
            h.insert((x1, x2), v);
        }
    }
    let mut i_act = BTreeMap::new();
    for e in ring.elements() {
        i_act.insert(e, phi.eval(&generator(GenTag::IScalar, &[e as i64], ring)?)?.matrix);
    }
    let mut ii_act = BTreeMap::new();
    for a in ring.elements() {
        for b in ring.elements() {
            let v = phi.eval(&generator(GenTag::IPair, &[a as i64, b as i64], ring)?)?.matrix;
            ii_act.insert((a, b), v);
        }
    }
    Ok(QuadData { m_e, m_ee, t, p, h, i_act, ii_act, ring, field: f.target() })
}

impl QuadData {
    /// The structural identities of the quadratic data, each as a named exact
    /// check. All of them must hold for an honest quadratic functor.
    pub fn verify(&self) -> Result<Vec<(String, bool)>> {
        let mut rows = Vec::new();
        let id_ee = ExactMatrix::identity(self.field, self.m_ee.dim());
        rows.push(("T^2 = id".to_string(), self.t.mul(&self.t)? == id_ee));
        rows.push(("PT = P".to_string(), self.p.mul(&self.t)? == self.p));
        let mut mult = true;
        for (&a, ia) in &self.i_act {
            for (&b, ib) in &self.i_act {
                let ab = self.ring.mul(a, b);
                mult &= ia.mul(ib)? == self.i_act[&ab];
            }
        }
        rows.push(("I-action is multiplicative".to_string(), mult));
        let mut sym = true;
        for (&(a, b), m) in &self.ii_act {
            sym &= m.mul(&self.t)? == self.t.mul(&self.ii_act[&(b, a)])?;
        }
        rows.push(("II(a,b) T = T II(b,a)".to_string(), sym));
        let mut transfer = true;
        for (&e, ie) in &self.i_act {
            transfer &= self.p.mul(&self.ii_act[&(e, e)])? == ie.mul(&self.p)?;
        }
        rows.push(("P II(e,e) = I(e) P".to_string(), transfer));
        let mut h_scalar = true;
        for (&(x1, x2), hx) in &self.h {
            for (&e, ie) in &self.i_act {
                let scaled = &self.h[&(self.ring.mul(x1, e), self.ring.mul(x2, e))];
                h_scalar &= hx.mul(ie)? == *scaled;
            }
        }
        rows.push(("H(xe) = H(x) I(e)".to_string(), h_scalar));
        let h11p = self.h[&(1, 1)].mul(&self.p)?;
        let id_plus_t = id_ee.add(&self.t)?;
        rows.push(("H(1,1) P = id + T".to_string(), h11p == id_plus_t));
        let php = self.p.mul(&self.h[&(1, 1)])?.mul(&self.p)?;
        rows.push(("PHP = 2P".to_string(), php == self.p.scale(2)));
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::FunctorSpec;
    use crate::matrix::ExactMatrix;
    use crate::maze::{from_structured, StructuredMaze};

    fn f3() -> RingSpec {
        RingSpec::fp(3).unwrap()
    }

    fn build(spec: &str, ring: RingSpec, field: RingSpec) -> Functor {
        Functor::build(&spec.parse::<FunctorSpec>().unwrap(), ring, field).unwrap()
    }

    #[test]
    fn identity_generator_is_the_identity_maze() {
        let id = generator(GenTag::IPair, &[1, 1], f3()).unwrap();
        assert_eq!(id, MazeSum::identity(f3(), &two()));
    }

    #[test]
    fn twist_squares_to_identity() {
        let t = generator(GenTag::T, &[1, 1], f3()).unwrap();
        let tt = t.compose(&t, 8).unwrap();
        assert_eq!(tt, generator(GenTag::IPair, &[1, 1], f3()).unwrap());
    }

    #[test]
    fn zero_parameters_kill_generators() {
        let e = generator(GenTag::E, &[1, 0], f3()).unwrap();
        assert!(e.is_zero());
        let h = generator(GenTag::H, &[0, 2], f3()).unwrap();
        assert!(h.is_zero());
    }

    // The labeled realizations are forced by the structured presentations;
    // this pins them once and for all.
    #[test]
    fn generators_match_their_structured_presentations() {
        let ring = RingSpec::zmod(4).unwrap();
        let diag = |a: i64, b: i64| {
            ExactMatrix::from_rows(ring, &[vec![a, 0], vec![0, b]]).unwrap()
        };
        let column = |a: i64, b: i64| ExactMatrix::from_rows(ring, &[vec![a], vec![b]]).unwrap();
        let cases: Vec<(GenTag, Vec<i64>, StructuredMaze)> = vec![
            (
                GenTag::IPair,
                vec![2, 3],
                StructuredMaze::new(ring, two(), two(), two(), vec![0, 1], vec![0, 1], diag(2, 3))
                    .unwrap(),
            ),
            (
                GenTag::T,
                vec![2, 3],
                StructuredMaze::new(ring, two(), two(), two(), vec![1, 0], vec![0, 1], diag(2, 3))
                    .unwrap(),
            ),
            (
                GenTag::P,
                vec![2, 3],
                StructuredMaze::new(ring, one(), two(), two(), vec![0, 0], vec![0, 1], diag(2, 3))
                    .unwrap(),
            ),
            (
                GenTag::H,
                vec![2, 3],
                StructuredMaze::new(ring, two(), two(), one(), vec![0, 1], vec![0, 0], column(2, 3))
                    .unwrap(),
            ),
            (
                GenTag::IScalar,
                vec![3],
                StructuredMaze::new(
                    ring,
                    one(),
                    one(),
                    one(),
                    vec![0],
                    vec![0],
                    ExactMatrix::from_rows(ring, &[vec![3]]).unwrap(),
                )
                .unwrap(),
            ),
            (
                GenTag::E,
                vec![2, 3],
                StructuredMaze::new(ring, one(), two(), one(), vec![0, 0], vec![0, 0], column(2, 3))
                    .unwrap(),
            ),
        ];
        for (tag, params, structured) in cases {
            assert_eq!(
                generator(tag, &params, ring).unwrap(),
                from_structured(&structured).unwrap(),
                "{tag:?}"
            );
        }
    }

    #[test]
    fn hom_basis_slots() {
        let over_z2 = RingSpec::zmod(2).unwrap();
        let slot = laby2_hom_basis(over_z2, 1, 2).unwrap();
        assert_eq!(slot.len(), 4, "one entry per parameter vector");
        let nonzero: Vec<&String> =
            slot.iter().filter(|(_, m)| !m.is_zero()).map(|(n, _)| n).collect();
        assert_eq!(nonzero, vec!["H(1,1)"], "zero components kill the rest");
        let loops = laby2_hom_basis(over_z2, 1, 1).unwrap();
        assert!(loops.iter().any(|(n, _)| n.starts_with("IScalar")));
        assert!(loops.iter().any(|(n, _)| n.starts_with("E")));
        assert!(laby2_hom_basis(over_z2, 1, 3).is_err());
    }

    #[test]
    fn law_table_for_the_tensor_square() {
        let t2 = build("T2", f3(), f3());
        let report = law_table_check(&t2).unwrap();
        assert!(report.pass(), "required rows hold: {:#?}", report
            .laws
            .iter()
            .chain(&report.axioms)
            .filter(|r| r.required && !r.holds())
            .collect::<Vec<_>>());
        // The printed second summand of H(x)P fails on the tensor square.
        let printed = report.axioms.iter().find(|r| r.name.contains("[printed]")).unwrap();
        assert!(!printed.holds());
        assert!(report.qm2_resolution.contains("holds"));
        // The printed T(g,d)H(x) row fails at maze level.
        let printed_th = report.laws.iter().find(|r| r.name.contains("[printed]")).unwrap();
        assert!(!printed_th.maze_pass);
    }

    #[test]
    fn law_table_for_the_symmetric_square() {
        let s2 = build("S2", f3(), f3());
        let report = law_table_check(&s2).unwrap();
        assert!(report.pass());
    }

    #[test]
    fn non_quadratic_functors_are_rejected() {
        let u = build("U", RingSpec::zmod(2).unwrap(), RingSpec::fp(2).unwrap());
        assert!(law_table_check(&u).is_err());
        assert!(extract(&u).is_err());
    }

    #[test]
    fn extraction_from_the_tensor_square() {
        let t2 = build("T2", f3(), f3());
        let data = extract(&t2).unwrap();
        assert_eq!(data.m_ee.dim(), 2);
        let swap = ExactMatrix::from_rows(f3(), &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(data.t, swap);
        for (name, ok) in data.verify().unwrap() {
            assert!(ok, "{name}");
        }
    }

    #[test]
    fn extraction_from_the_exterior_square() {
        let l2 = build("L2", f3(), f3());
        let data = extract(&l2).unwrap();
        assert_eq!(data.m_e.dim(), 0);
        assert_eq!(data.m_ee.dim(), 1);
        assert_eq!((data.p.rows(), data.p.cols()), (0, 1));
        assert_eq!((data.h[&(1, 1)].rows(), data.h[&(1, 1)].cols()), (1, 0));
        for (name, ok) in data.verify().unwrap() {
            assert!(ok, "{name}");
        }
    }
}
