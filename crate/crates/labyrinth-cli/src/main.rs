//! `laby`: JSON in/out for mazes and evaluation requests, plus seeded
//! verification suites with machine-readable reports.
//!
//! Exit codes: 0 when every check passes, 1 when some check fails (the first
//! failing witness is serialized into the report), 2 for usage errors, bad
//! input, or guard violations. Reports are byte-identical across runs with
//! the same configuration.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use labyrinth::arrows;
use labyrinth::crosseffects::{self, Degree};
use labyrinth::error::Error;
use labyrinth::functor::{Functor, FunctorSpec};
use labyrinth::matrix::ExactMatrix;
use labyrinth::maze::{self, Maze, MazeSum, MazeSumJson, Passage};
use labyrinth::phi::Phi;
use labyrinth::quadratic;
use labyrinth::report::{CheckRow, Status};
use labyrinth::ring::RingSpec;
use labyrinth::sample::{Sampler, RNG_ALGORITHM};
use labyrinth::sets::IndexSet;

const REPORT_FORMAT: u32 = 1;

#[derive(Parser)]
#[command(name = "laby", version, about = "Exact maze calculus and functor verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Built-in functor descriptor, e.g. U, RedU, T2, S2, L2, Sum(S2,L2).
    #[arg(long, default_value = "U")]
    functor: String,
    /// Source ring, `zmod:m` or `fp:p`; defaults to the field.
    #[arg(long)]
    ring: Option<String>,
    /// Target field, `fp:p`.
    #[arg(long, default_value = "fp:2")]
    field: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Largest endpoint-set size (and degree-search bound).
    #[arg(long = "max-size", default_value_t = 3)]
    max_size: usize,
    /// Passage bound per maze entering a composition.
    #[arg(long = "max-passages", default_value_t = 8)]
    max_passages: usize,
    /// Ambient dimension guard: no value larger than this is materialized.
    #[arg(long = "max-dim", default_value_t = 512)]
    max_dim: usize,
    #[arg(short = 'i', long = "input")]
    input: Option<PathBuf>,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compose two maze combinations (first ∘ second) and print the result.
    Compose {
        left: PathBuf,
        right: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        #[arg(long = "max-passages", default_value_t = 8)]
        max_passages: usize,
    },
    /// Evaluate a maze between cross-effect bases.
    Eval(Common),
    /// Cross-effect dimensions and their internal consistency.
    Ce(Common),
    /// Polynomial-degree detection with profile coherence.
    Degree(Common),
    /// The composition formula for deviations on seeded samples.
    Devform(Common),
    /// Evaluation identities: composition axioms, splitting rewrites,
    /// functoriality.
    Axioms(Common),
    /// Reconstruction of the functor from its maze evaluations.
    Roundtrip(Common),
    /// The quadratic law table, the ten axioms, and extracted data.
    Quad(Common),
}

#[derive(Serialize, Clone)]
struct RunConfig {
    ring: RingSpec,
    field: RingSpec,
    functor: String,
    seed: u64,
    samples: usize,
    max_set_size: usize,
    max_passages: usize,
    max_dim: usize,
}

#[derive(Serialize)]
struct Report {
    version: &'static str,
    format: u32,
    rng: &'static str,
    config: RunConfig,
    checks: Vec<CheckRow>,
    status: Status,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn run(cli: Cli) -> Result<ExitCode, AnyError> {
    match cli.cmd {
        Cmd::Compose { left, right, output, max_passages } => {
            let p = read_maze_sum(&left)?;
            let q = read_maze_sum(&right)?;
            let out = p.compose(&q, max_passages)?;
            write_json(&output, &serde_json::to_value(&out)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Eval(common) => cmd_eval(common),
        Cmd::Ce(common) => {
            let ctx = Context::new(&common)?;
            finish(&common, &ctx, ce_checks(&ctx)?)
        }
        Cmd::Degree(common) => {
            let ctx = Context::new(&common)?;
            finish(&common, &ctx, degree_checks(&ctx)?)
        }
        Cmd::Devform(common) => {
            let ctx = Context::new(&common)?;
            finish(&common, &ctx, devform_checks(&ctx)?)
        }
        Cmd::Axioms(common) => {
            let ctx = Context::new(&common)?;
            finish(&common, &ctx, axiom_checks(&ctx)?)
        }
        Cmd::Roundtrip(common) => {
            let ctx = Context::new(&common)?;
            finish(&common, &ctx, roundtrip_checks(&ctx)?)
        }
        Cmd::Quad(common) => {
            let ctx = Context::new(&common)?;
            finish(&common, &ctx, quad_checks(&ctx)?)
        }
    }
}

struct Context {
    functor: Functor,
    config: RunConfig,
}

impl Context {
    fn new(common: &Common) -> Result<Context, AnyError> {
        let field: RingSpec = common.field.parse()?;
        let ring: RingSpec = match &common.ring {
            Some(r) => r.parse()?,
            None => field,
        };
        let spec: FunctorSpec = common.functor.parse()?;
        let functor = Functor::build(&spec, ring, field)?;
        let config = RunConfig {
            ring,
            field,
            functor: spec.to_string(),
            seed: common.seed,
            samples: common.samples,
            max_set_size: common.max_size,
            max_passages: common.max_passages,
            max_dim: common.max_dim,
        };
        if config.max_set_size == 0 || config.max_passages == 0 || config.max_dim == 0 {
            return Err(Box::new(Error::Guard("bounds must be positive".into())));
        }
        Ok(Context { functor, config })
    }

    fn guard_arity(&self, arity: usize) -> Result<(), AnyError> {
        let dim = self.functor.obj(arity)?;
        if dim > self.config.max_dim {
            return Err(Box::new(Error::Guard(format!(
                "value at arity {arity} has dimension {dim} > {}",
                self.config.max_dim
            ))));
        }
        Ok(())
    }
}

fn finish(common: &Common, ctx: &Context, checks: Vec<CheckRow>) -> Result<ExitCode, AnyError> {
    let status = Status::of(checks.iter().all(|c| c.status.is_pass()));
    let report = Report {
        version: env!("CARGO_PKG_VERSION"),
        format: REPORT_FORMAT,
        rng: RNG_ALGORITHM,
        config: ctx.config.clone(),
        checks,
        status,
    };
    write_json(&common.output, &serde_json::to_value(&report)?)?;
    Ok(if status.is_pass() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn write_json(path: &Option<PathBuf>, value: &Value) -> Result<(), AnyError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_to_string(path: &PathBuf) -> Result<String, AnyError> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn read_maze_sum(path: &PathBuf) -> Result<MazeSum, AnyError> {
    let text = read_to_string(path)?;
    let json: MazeSumJson = serde_json::from_str(&text)?;
    Ok(json.normalize()?)
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct EvalRequest {
    functor: String,
    ring: RingSpec,
    field: RingSpec,
    maze: maze::MazeJson,
}

fn cmd_eval(common: Common) -> Result<ExitCode, AnyError> {
    let input = common.input.clone().unwrap_or_else(|| PathBuf::from("-"));
    let text = read_to_string(&input)?;
    let value: Value = serde_json::from_str(&text)?;
    let (functor, sum) = if value.get("functor").is_some() {
        let req: EvalRequest = serde_json::from_value(value)?;
        let spec: FunctorSpec = req.functor.parse()?;
        let f = Functor::build(&spec, req.ring, req.field)?;
        (f, req.maze.normalize()?)
    } else {
        let ctx = Context::new(&common)?;
        let mj: maze::MazeJson = serde_json::from_value(value)?;
        (ctx.functor, mj.normalize()?)
    };
    let phi = Phi::with_guard(&functor, common.max_dim);
    let out = phi.eval(&sum)?;
    let body = json!({
        "matrix": out.matrix,
        "source_dim": out.matrix.cols(),
        "target_dim": out.matrix.rows(),
    });
    write_json(&common.output, &body)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// ce / degree
// ---------------------------------------------------------------------------

fn ce_checks(ctx: &Context) -> Result<Vec<CheckRow>, AnyError> {
    let f = &ctx.functor;
    let kmax = ctx.config.max_set_size;
    for k in 0..=kmax {
        ctx.guard_arity(k)?;
    }
    let mut checks = Vec::new();
    let dims: Vec<usize> =
        (0..=kmax).map(|k| crosseffects::ce_dim(f, k)).collect::<Result<_, _>>()?;
    checks.push(
        CheckRow::pass("ce-dims", json!({"functor": ctx.config.functor, "kmax": kmax}))
            .with_data(json!({ "dims": dims })),
    );
    for k in 0..=kmax {
        let parts = vec![1usize; k];
        let ce = crosseffects::ce_basis(f, &parts)?;
        let kernel = crosseffects::retraction_kernel(f, &parts)?;
        let mut ok = ce.dim() == kernel.cols();
        for c in 0..kernel.cols() {
            ok &= ExactMatrix::coords_in_span(&ce.basis, &kernel.column(c))?.is_some();
        }
        for c in 0..ce.basis.cols() {
            ok &= ExactMatrix::coords_in_span(&kernel, &ce.basis.column(c))?.is_some();
        }
        checks.push(row_bool("ce-image-kernel", json!({ "rank": k }), ok, || {
            json!({"idempotent_rank": ce.dim(), "kernel_rank": kernel.cols()})
        }));
        let dec = crosseffects::decomposition(f, k)?;
        let total: usize = dec.block_dims.iter().sum();
        checks.push(row_bool("ce-decomposition", json!({ "rank": k }), total == f.obj(k)?, || {
            json!({"block_dims": dec.block_dims, "ambient": 0})
        }));
    }
    Ok(checks)
}

fn degree_checks(ctx: &Context) -> Result<Vec<CheckRow>, AnyError> {
    let f = &ctx.functor;
    let nmax = ctx.config.max_set_size;
    for k in 0..=nmax + 1 {
        ctx.guard_arity(k)?;
    }
    let deg = crosseffects::degree(f, nmax, ctx.config.max_dim)?;
    let mut checks = Vec::new();
    let data = match deg {
        Degree::Is(n) => json!({ "degree": n }),
        Degree::Exceeds(n) => json!({ "exceeds": n }),
    };
    checks.push(
        CheckRow::pass("degree", json!({"functor": ctx.config.functor, "nmax": nmax}))
            .with_data(data),
    );
    // Coherence in both directions: the value on a k-element set vanishes
    // exactly when k exceeds the reported degree (within the window).
    let phi = Phi::new(f);
    let profile = phi.annihilation_profile(nmax + 1, ctx.config.max_dim)?;
    let coherent = match deg {
        Degree::Is(n) => profile
            .iter()
            .enumerate()
            .all(|(k, &d)| if k > n { d == 0 } else { k == 0 || d > 0 || k <= n }),
        Degree::Exceeds(_) => profile[nmax + 1] != 0,
    } && match deg {
        // the last nonzero entry is exactly the degree (a zero functor has
        // none and degree zero)
        Degree::Is(n) => profile.iter().rposition(|&d| d != 0).unwrap_or(0) == n,
        Degree::Exceeds(_) => true,
    };
    checks.push(row_bool(
        "annihilation-profile",
        json!({"nmax": nmax + 1}),
        coherent,
        || json!({ "profile": profile }),
    ));
    Ok(checks)
}

// ---------------------------------------------------------------------------
// devform
// ---------------------------------------------------------------------------

fn devform_checks(ctx: &Context) -> Result<Vec<CheckRow>, AnyError> {
    let f = &ctx.functor;
    let ring = f.source();
    let mut checks = Vec::new();
    for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let mut sampler = Sampler::new(ctx.config.seed ^ ((m as u64) << 8 | n as u64));
        let mut pass = true;
        let mut witness = None;
        for _ in 0..ctx.config.samples {
            let target_arity = sampler.size(1, 2);
            let mut alphas = Vec::with_capacity(m);
            for _ in 0..m {
                let w = sampler.size(1, 2);
                alphas.push(sampler.matrix(ring, target_arity, w));
            }
            let alpha_total: usize = alphas.iter().map(ExactMatrix::cols).sum();
            let mut betas = Vec::with_capacity(n);
            for _ in 0..n {
                let w = sampler.size(1, 2);
                betas.push(sampler.matrix(ring, alpha_total, w));
            }
            let beta_total: usize = betas.iter().map(ExactMatrix::cols).sum();
            ctx.guard_arity(alpha_total)?;
            ctx.guard_arity(beta_total)?;
            let out = crosseffects::deviation_formula_check(f, &alphas, &betas)?;
            if !out.pass {
                pass = false;
                witness = Some(json!({
                    "alphas": alphas, "betas": betas,
                    "lhs": out.lhs, "rhs": out.rhs,
                }));
                break;
            }
        }
        let params = json!({"m": m, "n": n, "samples": ctx.config.samples});
        checks.push(match witness {
            None if pass => CheckRow::pass("dev-formula", params),
            w => CheckRow::fail("dev-formula", params, w.unwrap_or(Value::Null)),
        });
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------
// axioms
// ---------------------------------------------------------------------------

fn axiom_checks(ctx: &Context) -> Result<Vec<CheckRow>, AnyError> {
    let f = &ctx.functor;
    let ring = f.source();
    let phi = Phi::with_guard(f, ctx.config.max_dim);
    let max_set = ctx.config.max_set_size;
    for k in 0..=max_set {
        ctx.guard_arity(k)?;
    }
    let seed = ctx.config.seed;
    let mut checks = Vec::new();

    checks.push(sampled_row(ctx, "phi-functoriality", seed, |sampler| {
        let (p, q) = sampler.composable_pair(ring, max_set);
        let out = phi.functoriality_check(&p, &q, 4)?;
        Ok(if out.pass {
            None
        } else {
            Some(json!({"p": p, "q": q, "lhs": out.lhs, "rhs": out.rhs}))
        })
    })?);
    checks.push(identity_neutrality_row(ctx, &phi, seed ^ 1)?);
    checks.push(contraction_row(ctx, &phi, seed ^ 2)?);
    checks.push(extension_row(ctx, &phi, seed ^ 3)?);
    checks.push(pullback_row(ctx, &phi, seed ^ 4)?);
    checks.push(zero_structure_row(ctx, &phi, seed ^ 5)?);
    checks.push(split_row(ctx, &phi, seed ^ 6, false)?);
    checks.push(split_row(ctx, &phi, seed ^ 7, true)?);
    checks.push(well_defined_row(ctx, &phi, seed ^ 8)?);
    Ok(checks)
}

fn row_bool<W: FnOnce() -> Value>(name: &str, params: Value, ok: bool, witness: W) -> CheckRow {
    if ok {
        CheckRow::pass(name, params)
    } else {
        CheckRow::fail(name, params, witness())
    }
}

/// Runs one sampled check until `samples` instances completed. Samples whose
/// evaluation trips a size guard are skipped (deterministically — the
/// sampler state advances identically either way); everything else must
/// pass. Returns a failing row when the witness budget of attempts runs out.
fn sampled_row<F>(ctx: &Context, name: &str, seed: u64, mut body: F) -> Result<CheckRow, AnyError>
where
    F: FnMut(&mut Sampler) -> Result<Option<Value>, Error>,
{
    let samples = ctx.config.samples;
    let mut sampler = Sampler::new(seed);
    let mut done = 0usize;
    let mut skipped = 0usize;
    let mut attempts = 0usize;
    let mut witness = None;
    while done < samples && attempts < samples.saturating_mul(50).max(50) {
        attempts += 1;
        match body(&mut sampler) {
            Ok(None) => done += 1,
            Ok(Some(w)) => {
                witness = Some(w);
                break;
            }
            Err(Error::Guard(_)) => skipped += 1,
            Err(e) => return Err(Box::new(e)),
        }
    }
    let params = json!({"samples": done, "skipped": skipped});
    Ok(match witness {
        None if done == samples => CheckRow::pass(name, params),
        Some(w) => CheckRow::fail(name, params, w),
        None => CheckRow::fail(
            name,
            params,
            json!({"reason": "not enough samples fit within the size guards"}),
        ),
    })
}

fn identity_neutrality_row(ctx: &Context, phi: &Phi, seed: u64) -> Result<CheckRow, AnyError> {
    let ring = ctx.functor.source();
    let max_set = ctx.config.max_set_size;
    let max_passages = ctx.config.max_passages;
    sampled_row(ctx, "identity-neutrality", seed, |sampler| {
        let m = sampler.maze(ring, max_set);
        let s = MazeSum::from_maze(m.clone());
        let left = MazeSum::identity(ring, m.target()).compose(&s, max_passages)?;
        let right = s.compose(&MazeSum::identity(ring, m.source()), max_passages)?;
        if left != s || right != s {
            return Ok(Some(json!({ "maze": s })));
        }
        let id_eval = phi.eval(&MazeSum::identity(ring, m.target()))?;
        if !id_eval.matrix.is_identity() {
            return Ok(Some(json!({"set_size": m.target().len()})));
        }
        Ok(None)
    })
}

/// Builds the contraction maze of a surjection `f : Y -> X` by positions.
fn contraction_maze(ring: RingSpec, target: &IndexSet, f: &[usize]) -> Maze {
    let passages =
        f.iter().enumerate().map(|(y, &fy)| Passage { to: fy, from: y, label: 1 }).collect();
    Maze::normalized(ring, target.clone(), IndexSet::numeric(f.len()), passages)
        .expect("a surjection covers both sides")
}

/// Builds the extension maze of a surjection `f : X -> Y` with one nonzero
/// label per element of `X`.
fn extension_maze(ring: RingSpec, source: &IndexSet, f: &[usize], labels: &[u64]) -> Maze {
    let passages = f
        .iter()
        .enumerate()
        .map(|(x, &fx)| Passage { to: x, from: fx, label: labels[x] })
        .collect();
    Maze::normalized(ring, IndexSet::numeric(f.len()), source.clone(), passages)
        .expect("a surjection covers both sides")
}

fn contraction_row(ctx: &Context, phi: &Phi, seed: u64) -> Result<CheckRow, AnyError> {
    let ring = ctx.functor.source();
    let max_set = ctx.config.max_set_size;
    let max_passages = ctx.config.max_passages;
    sampled_row(ctx, "contraction-composition", seed, |sampler| {
        let nx = sampler.size(1, max_set);
        let ny = sampler.size(nx, max_set);
        let nz = sampler.size(ny, max_set);
        let x = IndexSet::numeric(nx);
        let y = IndexSet::numeric(ny);
        let f = sampler.surjection(ny, nx);
        let g = sampler.surjection(nz, ny);
        let con_f = MazeSum::from_maze(contraction_maze(ring, &x, &f));
        let con_g = MazeSum::from_maze(contraction_maze(ring, &y, &g));
        let fg: Vec<usize> = g.iter().map(|&z| f[z]).collect();
        let expected = MazeSum::from_maze(contraction_maze(ring, &x, &fg));
        let composed = con_f.compose(&con_g, max_passages)?;
        let maze_ok = composed == expected;
        let eval_ok = phi.eval(&con_f)?.matrix.mul(&phi.eval(&con_g)?.matrix)?
            == phi.eval(&expected)?.matrix;
        Ok(if maze_ok && eval_ok { None } else { Some(json!({"f": f, "g": g})) })
    })
}

fn extension_row(ctx: &Context, phi: &Phi, seed: u64) -> Result<CheckRow, AnyError> {
    let ring = ctx.functor.source();
    let max_set = ctx.config.max_set_size;
    let max_passages = ctx.config.max_passages;
    sampled_row(ctx, "extension-composition", seed, |sampler| {
        let nz = sampler.size(1, max_set);
        let ny = sampler.size(nz, max_set);
        let nx = sampler.size(ny, max_set);
        let y = IndexSet::numeric(ny);
        let z = IndexSet::numeric(nz);
        let f = sampler.surjection(nx, ny);
        let g = sampler.surjection(ny, nz);
        let a: Vec<u64> = (0..nx).map(|_| sampler.nonzero_residue(ring)).collect();
        let b: Vec<u64> = (0..ny).map(|_| sampler.nonzero_residue(ring)).collect();
        let ext_f = MazeSum::from_maze(extension_maze(ring, &y, &f, &a));
        let ext_g = MazeSum::from_maze(extension_maze(ring, &z, &g, &b));
        let gf: Vec<usize> = f.iter().map(|&y| g[y]).collect();
        let prod: Vec<u64> = (0..nx).map(|x| ring.mul(a[x], b[f[x]])).collect();
        let mut expected = MazeSum::zero(ring, z.clone(), IndexSet::numeric(nx));
        if let Some(mz) = Maze::normalized(
            ring,
            IndexSet::numeric(nx),
            z.clone(),
            gf.iter()
                .enumerate()
                .map(|(x, &gfx)| Passage { to: x, from: gfx, label: prod[x] })
                .collect(),
        ) {
            expected.add_term(mz, 1)?;
        }
        let composed = ext_f.compose(&ext_g, max_passages)?;
        let maze_ok = composed == expected;
        let eval_ok = phi.eval(&ext_f)?.matrix.mul(&phi.eval(&ext_g)?.matrix)?
            == phi.eval(&expected)?.matrix;
        Ok(if maze_ok && eval_ok {
            None
        } else {
            Some(json!({"f": f, "g": g, "labels_a": a, "labels_b": b}))
        })
    })
}

/// Extension followed by contraction expands into the sum over covering
/// subsets of the pullback; built here independently and compared.
fn pullback_row(ctx: &Context, phi: &Phi, seed: u64) -> Result<CheckRow, AnyError> {
    let ring = ctx.functor.source();
    let max_passages = ctx.config.max_passages;
    sampled_row(ctx, "pullback-expansion", seed, |sampler| {
        let ny = sampler.size(1, 2);
        let nx = sampler.size(ny, 3);
        let nz = sampler.size(ny, 3);
        let y = IndexSet::numeric(ny);
        let f = sampler.surjection(nx, ny); // extension structure X -> Y
        let g = sampler.surjection(nz, ny); // contraction Z -> Y
        let labels: Vec<u64> = (0..nx).map(|_| sampler.nonzero_residue(ring)).collect();
        let ext = MazeSum::from_maze(extension_maze(ring, &y, &f, &labels));
        let con = MazeSum::from_maze(contraction_maze(ring, &y, &g));
        let lhs = ext.compose(&con, max_passages)?;

        let pullback: Vec<(usize, usize)> = (0..nx)
            .flat_map(|x| (0..nz).map(move |z| (x, z)))
            .filter(|&(x, z)| f[x] == g[z])
            .collect();
        let mut rhs = MazeSum::zero(ring, IndexSet::numeric(nz), IndexSet::numeric(nx));
        for members in crosseffects::covering_subsets(nx, nz, &pullback) {
            let passages: Vec<Passage> = members
                .iter()
                .map(|&(x, z)| Passage { to: x, from: z, label: labels[x] })
                .collect();
            if let Some(mz) =
                Maze::normalized(ring, IndexSet::numeric(nx), IndexSet::numeric(nz), passages)
            {
                rhs.add_term(mz, 1)?;
            }
        }
        let maze_ok = lhs == rhs;
        let eval_ok = phi.eval(&lhs)?.matrix == phi.eval(&rhs)?.matrix;
        Ok(if maze_ok && eval_ok { None } else { Some(json!({"f": f, "g": g, "labels": labels})) })
    })
}

/// A structure map hitting a proper subset of the target evaluates to zero:
/// zero one passage label and check the ambient evaluation vanishes on the
/// cross-effect.
fn zero_structure_row(ctx: &Context, phi: &Phi, seed: u64) -> Result<CheckRow, AnyError> {
    let ring = ctx.functor.source();
    let max_set = ctx.config.max_set_size;
    sampled_row(ctx, "zero-structure-vanishes", seed, |sampler| {
        let m = sampler.maze(ring, max_set);
        let st = maze::to_structured(&m);
        let mut alpha = st.alpha.clone();
        let kill = sampler.size(0, st.middle.len() - 1);
        alpha.set(kill, st.g[kill], 0);
        // Evaluate the would-be maze directly from the formula.
        let columns: Result<Vec<ExactMatrix>, Error> = st
            .f
            .iter()
            .map(|&fy| arrows::injection(ring, &st.target, st.target.name(fy)))
            .collect();
        let ambient =
            crosseffects::deviate(&ctx.functor, &columns?)?.mul(&ctx.functor.apply(&alpha)?)?;
        let src = phi.basis(st.source.len())?;
        let image = ambient.mul(&src.basis)?;
        Ok(if image.is_zero() {
            None
        } else {
            Some(json!({"maze": MazeSum::from_maze(m), "killed_passage": kill}))
        })
    })
}

fn split_row(ctx: &Context, phi: &Phi, seed: u64, generalized: bool) -> Result<CheckRow, AnyError> {
    let ring = ctx.functor.source();
    let max_set = ctx.config.max_set_size;
    let name = if generalized { "generalized-split-invariance" } else { "passage-split-invariance" };
    sampled_row(ctx, name, seed, |sampler| {
        let m = sampler.maze(ring, max_set);
        let idx = sampler.size(0, m.passages().len() - 1);
        let label = m.passages()[idx].label;
        let rewritten = if generalized {
            let a = sampler.residue(ring);
            let b = sampler.residue(ring);
            let c = ring.sub(ring.sub(label, a), b);
            maze::gen_split(&m, idx, &[a as i64, b as i64, c as i64])?
        } else {
            let a = sampler.residue(ring);
            let b = ring.sub(label, a);
            maze::split_passage(&m, idx, a as i64, b as i64)?
        };
        let lhs = phi.eval_maze(&m)?.matrix;
        let rhs = phi.eval(&rewritten)?.matrix;
        Ok(if lhs == rhs {
            None
        } else {
            Some(json!({"maze": MazeSum::from_maze(m), "passage": idx}))
        })
    })
}

fn well_defined_row(ctx: &Context, phi: &Phi, seed: u64) -> Result<CheckRow, AnyError> {
    let ring = ctx.functor.source();
    let max_set = ctx.config.max_set_size;
    sampled_row(ctx, "extension-well-defined", seed, |sampler| {
        let m = sampler.maze(ring, max_set);
        Ok(if phi.well_defined_check(&m)? {
            None
        } else {
            Some(json!({"maze": MazeSum::from_maze(m)}))
        })
    })
}

// ---------------------------------------------------------------------------
// roundtrip
// ---------------------------------------------------------------------------

fn roundtrip_checks(ctx: &Context) -> Result<Vec<CheckRow>, AnyError> {
    let f = &ctx.functor;
    let ring = f.source();
    let phi = Phi::with_guard(f, ctx.config.max_dim);
    let mut checks = Vec::new();
    for (m, n) in [(1usize, 1usize), (2, 2), (3, 2)] {
        ctx.guard_arity(m)?;
        ctx.guard_arity(n)?;
        let mut sampler = Sampler::new(ctx.config.seed ^ ((m as u64) << 16 | n as u64));
        let mut ok = true;
        let mut witness = None;
        for _ in 0..ctx.config.samples {
            let alpha = sampler.matrix(ring, m, n);
            let out = phi.roundtrip_check(&alpha)?;
            if !out.pass {
                ok = false;
                witness = Some(json!({"alpha": alpha, "direct": out.direct, "rebuilt": out.rebuilt}));
                break;
            }
        }
        checks.push(row_bool(
            "roundtrip",
            json!({"rows": m, "cols": n, "samples": ctx.config.samples}),
            ok,
            || witness.unwrap_or(Value::Null),
        ));
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------
// quad
// ---------------------------------------------------------------------------

fn quad_checks(ctx: &Context) -> Result<Vec<CheckRow>, AnyError> {
    let report = quadratic::law_table_check(&ctx.functor)?;
    let mut checks = Vec::new();
    for row in report.laws.iter().chain(&report.axioms) {
        let params = json!({"maze_route": row.maze_pass, "eval_route": row.eval_pass});
        if row.required {
            checks.push(row_bool("quad-law", json!({"law": row.name}), row.holds(), || {
                json!({"witness": row.witness, "maze_route": row.maze_pass, "eval_route": row.eval_pass})
            }));
        } else {
            // Disputed rows are reported as observations, not requirements.
            checks.push(
                CheckRow::pass("quad-disputed-law", json!({"law": row.name})).with_data(params),
            );
        }
    }
    checks.push(row_bool(
        "quad-truncation-invisible",
        json!({"functor": ctx.config.functor}),
        report.truncation_invisible,
        || Value::Null,
    ));
    checks.push(
        CheckRow::pass("qm2-resolution", json!({"functor": ctx.config.functor}))
            .with_data(json!({ "verdict": report.qm2_resolution })),
    );
    let data = quadratic::extract(&ctx.functor)?;
    for (name, ok) in data.verify()? {
        checks.push(row_bool("quad-data", json!({ "identity": name }), ok, || Value::Null));
    }
    Ok(checks)
}
