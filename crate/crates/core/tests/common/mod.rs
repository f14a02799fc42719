//! Shared helpers for the integration tests: an independent numeric
//! contraction oracle, random generators, and a finite-difference
//! curvature pipeline.

#![allow(dead_code, clippy::needless_range_loop)]

use std::cell::RefCell;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tensorcas::notation::{parse_expression, split_statements};
use tensorcas::properties::Position;
use tensorcas::{Expr, Index, Property, Registry, Variance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn p(s: &str) -> Expr {
    parse_expression(s).unwrap_or_else(|e| panic!("parse {s:?}: {e}"))
}

pub fn script(name: &str) -> String {
    let path = format!("{}/scripts/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn statements(name: &str) -> Vec<String> {
    split_statements(&script(name))
        .into_iter()
        .map(|(_, s)| s)
        .collect()
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// How a head's components are computed from other heads.
#[derive(Clone, Debug)]
pub enum Def {
    /// `X_{ab} = ∂_a Y_b - ∂_b Y_a`
    Curl(String),
    /// `X_a = Y_a + Z_a + ...`
    Sum(Vec<String>),
}

/// Evaluates index expressions numerically in `dim` dimensions with a
/// constant diagonal metric `diag(-1, 1, 1, ...)`.
///
/// Every head gets pseudo-random trigonometric-polynomial components with
/// integer wave vectors, so derivatives are exact and integrals over the
/// periodic box are computed exactly by the trapezoid rule.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub dim: usize,
    pub seed: u64,
    pub point: Vec<f64>,
    pub grid: usize,
    antisym: BTreeSet<String>,
    sym: BTreeSet<String>,
    defs: BTreeMap<String, Def>,
    constants: BTreeSet<String>,
    /// Field replaced by `field + eps * accent(field)`.
    shift: Option<(String, String, f64)>,
    waves: Rc<RefCell<WaveCache>>,
}

/// `a cos(k.x + phase)`
#[derive(Clone, Debug)]
struct Wave {
    k: Vec<f64>,
    a: f64,
    phase: f64,
}

type Env = BTreeMap<String, usize>;
type WaveCache = HashMap<(String, Vec<usize>), Rc<Vec<Wave>>>;

impl Oracle {
    pub fn new(dim: usize, seed: u64) -> Self {
        let mut r = rng(seed ^ 0x5eed);
        let point = (0..dim).map(|_| r.gen_range(0.0..2.0 * PI)).collect();
        Oracle {
            dim,
            seed,
            point,
            grid: 8,
            antisym: BTreeSet::new(),
            sym: BTreeSet::new(),
            defs: BTreeMap::new(),
            constants: BTreeSet::new(),
            shift: None,
            waves: Rc::default(),
        }
    }

    pub fn antisymmetric(mut self, head: &str) -> Self {
        self.antisym.insert(head.to_string());
        self
    }

    pub fn symmetric(mut self, head: &str) -> Self {
        self.sym.insert(head.to_string());
        self
    }

    /// Index-free symbol whose derivatives vanish.
    pub fn constant(mut self, name: &str) -> Self {
        self.constants.insert(name.to_string());
        self
    }

    pub fn define(mut self, head: &str, def: Def) -> Self {
        self.defs.insert(head.to_string(), def);
        self
    }

    pub fn shifted(&self, field: &str, accent: &str, eps: f64) -> Self {
        let mut o = self.clone();
        o.shift = Some((field.to_string(), accent.to_string(), eps));
        o
    }

    fn eta(&self, a: usize) -> f64 {
        if a == 0 {
            -1.0
        } else {
            1.0
        }
    }

    fn waves(&self, head: &str, comp: &[usize]) -> Rc<Vec<Wave>> {
        let key = (head.to_string(), comp.to_vec());
        if let Some(w) = self.waves.borrow().get(&key) {
            return w.clone();
        }
        let mut h = DefaultHasher::new();
        (self.seed, head, comp).hash(&mut h);
        let mut r = rng(h.finish());
        let w: Rc<Vec<Wave>> = Rc::new(
            (0..3)
                .map(|_| Wave {
                    k: (0..self.dim).map(|_| r.gen_range(-1..=1) as f64).collect(),
                    a: r.gen_range(-1.0..1.0),
                    phase: r.gen_range(0.0..2.0 * PI),
                })
                .collect(),
        );
        self.waves.borrow_mut().insert(key, w.clone());
        w
    }

    /// One raw component with all-lower slots and derivatives `ds`.
    fn raw(&self, head: &str, comp: &[usize], ds: &[usize], x: &[f64]) -> f64 {
        self.waves(head, comp)
            .iter()
            .map(|w| {
                let arg = w.phase + w.k.iter().zip(x).map(|(k, x)| k * x).sum::<f64>();
                let pre: f64 = ds.iter().map(|d| w.k[*d]).product();
                w.a * pre * (arg + ds.len() as f64 * PI / 2.0).cos()
            })
            .sum()
    }

    fn component(&self, head: &str, comp: &[usize], ds: &[usize], x: &[f64]) -> f64 {
        if let Some((field, accent, eps)) = &self.shift {
            if head == field {
                let base = self.unshifted(head, comp, ds, x);
                return base + eps * self.unshifted(&format!("{accent}:{field}"), comp, ds, x);
            }
        }
        self.unshifted(head, comp, ds, x)
    }

    fn unshifted(&self, head: &str, comp: &[usize], ds: &[usize], x: &[f64]) -> f64 {
        let with = |extra: usize| {
            let mut d = ds.to_vec();
            d.push(extra);
            d
        };
        match self.defs.get(head) {
            Some(Def::Curl(of)) => {
                let (a, b) = (comp[0], comp[1]);
                return self.component(of, &[b], &with(a), x)
                    - self.component(of, &[a], &with(b), x);
            }
            Some(Def::Sum(parts)) => {
                return parts.iter().map(|q| self.component(q, comp, ds, x)).sum();
            }
            None => {}
        }
        if self.constants.contains(head) {
            return if ds.is_empty() {
                self.raw(head, comp, ds, &vec![0.0; self.dim])
            } else {
                0.0
            };
        }
        if comp.len() == 2 && (self.antisym.contains(head) || self.sym.contains(head)) {
            let sign = if self.antisym.contains(head) {
                -1.0
            } else {
                1.0
            };
            let swapped = [comp[1], comp[0]];
            return self.raw(head, comp, ds, x) + sign * self.raw(head, &swapped, ds, x);
        }
        self.raw(head, comp, ds, x)
    }

    fn slots(&self, indices: &[Index], env: &Env) -> (Vec<usize>, f64) {
        let mut factor = 1.0;
        let comp = indices
            .iter()
            .map(|i| {
                let v = env[&i.name];
                if i.variance == Variance::Upper {
                    factor *= self.eta(v);
                }
                v
            })
            .collect();
        (comp, factor)
    }

    /// Index names at one term level with their multiplicities; nested
    /// sums and integrals contribute their free names once.
    fn level_counts(e: &Expr, out: &mut BTreeMap<String, usize>) {
        match e {
            Expr::Atom { indices, .. } => {
                for i in indices {
                    *out.entry(i.name.clone()).or_default() += 1;
                }
            }
            Expr::Deriv { indices, arg } => {
                for i in indices {
                    *out.entry(i.name.clone()).or_default() += 1;
                }
                Self::level_counts(arg, out);
            }
            Expr::Accent { arg, .. } | Expr::Func { arg, .. } => Self::level_counts(arg, out),
            Expr::Pow { base, .. } => Self::level_counts(base, out),
            Expr::Prod(fs) => fs.iter().for_each(|f| Self::level_counts(f, out)),
            Expr::Sum(_) | Expr::Integral { .. } => {
                for n in Self::free_names(e) {
                    *out.entry(n).or_default() += 1;
                }
            }
            _ => {}
        }
    }

    pub fn free_names(e: &Expr) -> Vec<String> {
        let first = match e {
            Expr::Sum(ts) => &ts[0],
            Expr::Integral { body, .. } => return Self::free_names(body),
            other => other,
        };
        if let Expr::Sum(_) | Expr::Integral { .. } = first {
            return Self::free_names(first);
        }
        let mut counts = BTreeMap::new();
        Self::level_counts(first, &mut counts);
        counts
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(n, _)| n)
            .collect()
    }

    fn assignments(&self, names: &[String], env: &Env) -> Vec<Env> {
        let mut out = vec![env.clone()];
        for n in names {
            out = out
                .into_iter()
                .flat_map(|e| {
                    (0..self.dim).map(move |v| {
                        let mut e = e.clone();
                        e.insert(n.clone(), v);
                        e
                    })
                })
                .collect();
        }
        out
    }

    fn term(&self, e: &Expr, env: &Env, ds: &[usize], x: &[f64]) -> f64 {
        let mut counts = BTreeMap::new();
        Self::level_counts(e, &mut counts);
        let dummies: Vec<String> = counts
            .into_iter()
            .filter(|(n, c)| *c == 2 && !env.contains_key(n))
            .map(|(n, _)| n)
            .collect();
        self.assignments(&dummies, env)
            .iter()
            .map(|env| self.node(e, env, ds, x))
            .sum()
    }

    fn node(&self, e: &Expr, env: &Env, ds: &[usize], x: &[f64]) -> f64 {
        match e {
            Expr::Num(q) => {
                if ds.is_empty() {
                    q.to_f64().unwrap()
                } else {
                    0.0
                }
            }
            Expr::Atom { name, indices } => {
                let (comp, f) = self.slots(indices, env);
                f * self.component(name, &comp, ds, x)
            }
            Expr::Accent { name, arg } => match &**arg {
                Expr::Atom {
                    name: head,
                    indices,
                } => {
                    let (comp, f) = self.slots(indices, env);
                    f * self.component(&format!("{name}:{head}"), &comp, ds, x)
                }
                other => panic!("oracle: accent over {other:?}"),
            },
            Expr::Deriv { indices, arg } => {
                let (more, f) = self.slots(indices, env);
                let mut all = ds.to_vec();
                all.extend(more);
                f * self.node(arg, env, &all, x)
            }
            Expr::Sum(ts) => ts.iter().map(|t| self.term(t, env, ds, x)).sum(),
            Expr::Prod(fs) => self.leibniz(fs, env, ds, x),
            Expr::Pow { base, exp } if ds.is_empty() => self
                .node(base, env, ds, x)
                .powf(exp.as_num().unwrap().to_f64().unwrap()),
            Expr::Integral { body, .. } => {
                assert!(ds.is_empty(), "oracle: derivative of an integral");
                let n = self.grid;
                let cell = (2.0 * PI / n as f64).powi(self.dim as i32);
                let mut total = 0.0;
                for k in 0..n.pow(self.dim as u32) {
                    let pt: Vec<f64> = (0..self.dim)
                        .map(|d| 2.0 * PI * ((k / n.pow(d as u32)) % n) as f64 / n as f64)
                        .collect();
                    total += self.term(body, env, &[], &pt);
                }
                total * cell
            }
            other => panic!("oracle: unsupported node {other:?}"),
        }
    }

    fn leibniz(&self, fs: &[Expr], env: &Env, ds: &[usize], x: &[f64]) -> f64 {
        let n = fs.len();
        let mut total = 0.0;
        for code in 0..n.pow(ds.len() as u32) {
            let mut parts = vec![Vec::new(); n];
            for (j, d) in ds.iter().enumerate() {
                parts[(code / n.pow(j as u32)) % n].push(*d);
            }
            total += fs
                .iter()
                .zip(&parts)
                .map(|(f, d)| self.node(f, env, d, x))
                .product::<f64>();
        }
        total
    }

    /// Values at every assignment of the free index names, in sorted
    /// name order.
    pub fn values(&self, e: &Expr) -> (Vec<String>, Vec<f64>) {
        let free = Self::free_names(e);
        let vals = self
            .assignments(&free, &Env::new())
            .iter()
            .map(|env| self.term(e, env, &[], &self.point.clone()))
            .collect();
        (free, vals)
    }

    /// `d/de expr[field + e accent(field)]` at zero, by a six-point
    /// stencil that is exact for polynomials of degree six in `e`.
    pub fn directional(&self, e: &Expr, field: &str, accent: &str) -> (Vec<String>, Vec<f64>) {
        let h = 0.1;
        let w = [
            (-3.0, -1.0),
            (-2.0, 9.0),
            (-1.0, -45.0),
            (1.0, 45.0),
            (2.0, -9.0),
            (3.0, 1.0),
        ];
        let mut acc: Option<(Vec<String>, Vec<f64>)> = None;
        for (s, c) in w {
            let (names, v) = self.shifted(field, accent, s * h).values(e);
            match &mut acc {
                None => acc = Some((names, v.iter().map(|x| c * x / (60.0 * h)).collect())),
                Some((_, a)) => a
                    .iter_mut()
                    .zip(&v)
                    .for_each(|(a, x)| *a += c * x / (60.0 * h)),
            }
        }
        acc.unwrap()
    }

    /// Panics with context unless both sides agree numerically.
    pub fn assert_agree(&self, what: &str, a: &Expr, b: &Expr, tol: f64) {
        if let Err(msg) = self.agree(a, b, tol) {
            panic!("{what}: {msg}\n  before: {a:?}\n  after:  {b:?}");
        }
    }

    pub fn agree(&self, a: &Expr, b: &Expr, tol: f64) -> Result<(), String> {
        let (na, va) = self.values(a);
        if b.is_zero() {
            return match va.iter().find(|v| !close(**v, 0.0, tol)) {
                Some(v) => Err(format!("expected zero, got {v}")),
                None => Ok(()),
            };
        }
        let (nb, vb) = self.values(b);
        compare(&na, &va, &nb, &vb, tol)
    }
}

pub fn compare(
    na: &[String],
    va: &[f64],
    nb: &[String],
    vb: &[f64],
    tol: f64,
) -> Result<(), String> {
    if na != nb {
        return Err(format!("free indices differ: {na:?} vs {nb:?}"));
    }
    for (x, y) in va.iter().zip(vb) {
        if !close(*x, *y, tol) {
            return Err(format!("values differ: {x} vs {y}"));
        }
    }
    Ok(())
}

/// Index names used by the random-term generator.
pub const NAMES: [&str; 8] = [
    "mu", "nu", "rho", "sigma", "lambda", "kappa", "alpha", "beta",
];

/// Registry for random terms: free-position Greek indices, `F`
/// antisymmetric, `S` symmetric.
pub fn random_registry() -> Registry {
    let mut r = Registry::default();
    let names: Vec<String> = NAMES.iter().map(|s| s.to_string()).collect();
    r.declare_indices(&names, Position::Free, None).unwrap();
    r.declare_coordinate("x");
    r.attach(&p(r"F_{\mu\nu}"), Property::AntiSymmetric)
        .unwrap();
    r.attach(&p(r"S_{\mu\nu}"), Property::Symmetric).unwrap();
    r
}

pub fn random_oracle(seed: u64) -> Oracle {
    Oracle::new(3, seed)
        .antisymmetric("F")
        .symmetric("S")
        .constant("c")
}

const HEADS: [(&str, usize); 7] = [
    ("A", 1),
    ("B", 1),
    ("C", 1),
    ("F", 2),
    ("S", 2),
    ("W", 2),
    ("T", 3),
];

/// A random index-consistent monomial using the given free indices and
/// `dummies` contracted pairs drawn from names not in `avoid`.
pub fn random_term(
    r: &mut ChaCha8Rng,
    free: &[Index],
    dummies: usize,
    avoid: &BTreeSet<String>,
) -> Expr {
    let pool: Vec<&str> = NAMES
        .iter()
        .copied()
        .filter(|n| !avoid.contains(*n) && !free.iter().any(|i| i.name == *n))
        .collect();
    let chosen: Vec<&str> = pool.choose_multiple(r, dummies).copied().collect();
    let mut slots: Vec<Index> = free.to_vec();
    for d in chosen {
        let (a, b) = if r.gen_bool(0.5) {
            (Index::upper(d), Index::lower(d))
        } else {
            (Index::lower(d), Index::upper(d))
        };
        slots.push(a);
        slots.push(b);
    }
    slots.shuffle(r);
    let mut factors = vec![Expr::num(*[1i64, -1, 2, -3].choose(r).unwrap())];
    if r.gen_bool(0.2) {
        factors.push(Expr::symbol("c"));
    }
    while !slots.is_empty() {
        let deriv = slots.len() >= 2 && r.gen_bool(0.25);
        let room = slots.len() - usize::from(deriv);
        let fitting: Vec<_> = HEADS.iter().filter(|(_, k)| *k <= room).collect();
        let (head, rank) = **fitting.choose(r).unwrap();
        let mut take: Vec<Index> = slots.drain(..rank + usize::from(deriv)).collect();
        let atom = Expr::tensor(head, take.split_off(usize::from(deriv)));
        factors.push(if deriv { Expr::deriv(take, atom) } else { atom });
    }
    Expr::product(factors)
}

/// A random term with at most six slots.
pub fn random_small_term(r: &mut ChaCha8Rng) -> Expr {
    let dummies = r.gen_range(0..=3);
    let nfree = r.gen_range(0..=(6 - 2 * dummies).min(2));
    let names: Vec<&str> = NAMES.choose_multiple(r, nfree).copied().collect();
    let free: Vec<Index> = names
        .iter()
        .map(|n| {
            if r.gen_bool(0.5) {
                Index::upper(*n)
            } else {
                Index::lower(*n)
            }
        })
        .collect();
    random_term(r, &free, dummies, &BTreeSet::new())
}

/// Free index slots of a generated term.
pub fn free_slots(term: &Expr) -> Vec<Index> {
    let names = Oracle::free_names(term);
    let mut out = Vec::new();
    collect_slots(term, &mut out);
    out.retain(|i| names.contains(&i.name));
    out
}

fn collect_slots(e: &Expr, out: &mut Vec<Index>) {
    match e {
        Expr::Atom { indices, .. } => out.extend(indices.iter().cloned()),
        Expr::Deriv { indices, arg } => {
            out.extend(indices.iter().cloned());
            collect_slots(arg, out);
        }
        Expr::Prod(fs) => fs.iter().for_each(|f| collect_slots(f, out)),
        _ => {}
    }
}

/// Fourth-order central difference of `f` along coordinate `k`.
fn fd<T: Copy + Default>(
    f: &dyn Fn([f64; 2]) -> T,
    at: [f64; 2],
    k: usize,
    h: f64,
    comb: &dyn Fn(&[T; 4], f64) -> T,
) -> T {
    let shift = |s: f64| {
        let mut a = at;
        a[k] += s * h;
        f(a)
    };
    comb(&[shift(2.0), shift(1.0), shift(-1.0), shift(-2.0)], h)
}

fn stencil(v: [f64; 4], h: f64) -> f64 {
    (-v[0] + 8.0 * v[1] - 8.0 * v[2] + v[3]) / (12.0 * h)
}

/// Numeric Christoffel symbols `Γ^a_{bc}` of a diagonal metric by
/// central differences; coordinates are `(θ, φ)`.
pub fn numeric_christoffel(
    g: &dyn Fn(&[f64; 2]) -> [f64; 2],
    at: [f64; 2],
    h: f64,
) -> [[[f64; 2]; 2]; 2] {
    let metric = |x: [f64; 2]| g(&x);
    let dg = |k: usize| -> [f64; 2] {
        fd(&metric, at, k, h, &|v, h| {
            [0, 1].map(|i| stencil([v[0][i], v[1][i], v[2][i], v[3][i]], h))
        })
    };
    let gd = g(&at);
    let d = [dg(0), dg(1)];
    // d[k][i] = ∂_k g_{ii}
    let dgm = |k: usize, i: usize, j: usize| if i == j { d[k][i] } else { 0.0 };
    let mut out = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                out[a][b][c] = 0.5 / gd[a] * (dgm(c, a, b) + dgm(b, a, c) - dgm(a, b, c));
            }
        }
    }
    out
}

/// Numeric Riemann tensor `R^a_{bcd}` from finite differences of the
/// numeric Christoffel symbols.
pub fn numeric_riemann(g: &dyn Fn(&[f64; 2]) -> [f64; 2], at: [f64; 2]) -> [[[[f64; 2]; 2]; 2]; 2] {
    let inner = 1e-4;
    let gam = numeric_christoffel(g, at, inner);
    let christ = |x: [f64; 2]| numeric_christoffel(g, x, inner);
    let dgam = |k: usize| {
        fd(&christ, at, k, 1e-3, &|v, h| {
            let mut out = [[[0.0; 2]; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        out[i][j][l] = stencil(
                            [v[0][i][j][l], v[1][i][j][l], v[2][i][j][l], v[3][i][j][l]],
                            h,
                        );
                    }
                }
            }
            out
        })
    };
    let d = [dgam(0), dgam(1)];
    let mut out = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for e in 0..2 {
                    let mut v = d[c][a][b][e] - d[e][a][b][c];
                    for k in 0..2 {
                        v += gam[a][k][c] * gam[k][b][e] - gam[a][k][e] * gam[k][b][c];
                    }
                    out[a][b][c][e] = v;
                }
            }
        }
    }
    out
}

/// A random scalar expression in `r` and `θ` that is finite for
/// `θ ∈ (0.2, 1.3)`, `r ∈ (0.5, 3)`.
pub fn random_scalar(r: &mut ChaCha8Rng, depth: u32) -> String {
    const POSITIVE: [&str; 5] = [
        "r",
        r"\sin(\theta)",
        r"\cos(\theta)",
        r"(r + \theta)",
        "(1 + r**2)",
    ];
    if depth == 0 {
        return match r.gen_range(0..4) {
            0 => "r".to_string(),
            1 => r"\theta".to_string(),
            2 => format!("{}", r.gen_range(1..=4)),
            _ => "1/2".to_string(),
        };
    }
    let sub = |r: &mut ChaCha8Rng| random_scalar(r, depth - 1);
    match r.gen_range(0..8) {
        0 => format!("{} + {}", sub(r), sub(r)),
        1 => format!("{} - ({})", sub(r), sub(r)),
        2 => format!("({}) ({})", sub(r), sub(r)),
        3 => format!(
            "{}**({})",
            POSITIVE.choose(r).unwrap(),
            [-2, -1, 2, 3].choose(r).unwrap()
        ),
        4 => format!("({})**2", sub(r)),
        5 => format!(r"\sin({})", sub(r)),
        6 => format!(r"\cos({})", sub(r)),
        _ => [r"\tan(\theta)", r"\log(r)", r"\log(1 + r**2)"]
            .choose(r)
            .unwrap()
            .to_string(),
    }
}

pub fn point(theta: f64, r: f64) -> tensorcas::PointF64 {
    [("theta".to_string(), theta), ("r".to_string(), r)].into()
}

/// Entries of the component table on the right of `lhs = {...}`.
pub fn table(e: &Expr) -> BTreeMap<Vec<String>, Expr> {
    let c = match e {
        Expr::Equation(_, r) => match &**r {
            Expr::Components(c) => c,
            other if other.is_zero() => return BTreeMap::new(),
            other => panic!("not a component table: {other:?}"),
        },
        Expr::Components(c) => c,
        other => panic!("not a component table: {other:?}"),
    };
    c.entries
        .iter()
        .map(|x| (x.values.clone(), x.value.clone()))
        .collect()
}

/// Coordinate position in the numeric pipeline.
pub fn coord(name: &str) -> usize {
    match name {
        "theta" => 0,
        "varphi" => 1,
        other => panic!("unknown coordinate {other}"),
    }
}

/// Session after running the sphere script.
pub fn sphere_session() -> tensorcas::session::Session {
    let mut s = tensorcas::session::Session::default();
    s.run_script(&script("sphere.tc")).unwrap();
    s
}

/// Compares symbolic Christoffel and Riemann tables with the numeric
/// pipeline for the diagonal metric `g`, at `(θ, r)`.
pub fn check_curvature(
    gamma: &Expr,
    riemann: &Expr,
    g: &dyn Fn(&[f64; 2]) -> [f64; 2],
    theta: f64,
    r: f64,
    tol: f64,
) -> Result<(), String> {
    let at = point(theta, r);
    let num = |e: &Expr| tensorcas::kernel::eval(e, &at).map_err(|err| err.to_string());
    let gt = table(gamma);
    let want_g = numeric_christoffel(g, [theta, 0.3], 1e-4);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let key: Vec<String> = [a, b, c]
                    .iter()
                    .map(|i| ["theta", "varphi"][*i].to_string())
                    .collect();
                let got = gt.get(&key).map(&num).transpose()?.unwrap_or(0.0);
                if !close(got, want_g[a][b][c], tol) {
                    return Err(format!(
                        "Gamma{key:?} at ({theta}, {r}): {got} vs {}",
                        want_g[a][b][c]
                    ));
                }
            }
        }
    }
    let rt = table(riemann);
    let want_r = numeric_riemann(g, [theta, 0.3]);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    let key: Vec<String> = [a, b, c, d]
                        .iter()
                        .map(|i| ["theta", "varphi"][*i].to_string())
                        .collect();
                    let got = rt.get(&key).map(&num).transpose()?.unwrap_or(0.0);
                    if !close(got, want_r[a][b][c][d], tol) {
                        return Err(format!(
                            "R{key:?} at ({theta}, {r}): {got} vs {}",
                            want_r[a][b][c][d]
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Linear combinations of `c x^n` with `x`-free coefficients.
pub fn random_integrand(g: &mut impl Rng) -> String {
    let exps = ["-3", "-1", "-1/2", "0", "1/2", "1", "2", "5/3"];
    let coeffs = ["3/2", "r", r"\sin(\theta)", "(-2 r**2)", "1"];
    (0..g.gen_range(1..=3))
        .map(|_| {
            format!(
                "{} x**({})",
                coeffs.choose(g).unwrap(),
                exps.choose(g).unwrap()
            )
        })
        .collect::<Vec<_>>()
        .join(" + ")
}
