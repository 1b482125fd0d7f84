//! Multistart damped Newton over a user-chosen split of fixed and free
//! quantities.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constraints::{feasibility_at, residuals_at, FeasibilityReport};
use crate::elliptic::EllipticParameter;
use crate::error::{Error, Result};
use crate::families::{descriptor, Coefficients, FamilyId};
use crate::models::ModelParams;
use crate::symalg::derived_system;
use crate::vars::{Assignment, Var};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Target for the residual sup-norm.
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 200,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub x: Vec<f64>,
    pub norm: f64,
    pub iterations: usize,
    /// Some iterate had a numerically singular Jacobian and the step came
    /// from the truncated pseudo-inverse.
    pub singular: bool,
}

fn sup(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn l2(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Forward-difference Jacobian, step `1e-7·(1 + |vᵢ|)` rounded to a power
/// of two so that `vᵢ + h` is exact.
fn jacobian<F: Fn(&[f64]) -> Vec<f64>>(f: &F, x: &[f64], r0: &[f64]) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(r0.len(), x.len());
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = (1e-7 * (1.0 + x[i].abs())).log2().round().exp2();
        xp[i] = x[i] + h;
        let r = f(&xp);
        for (k, (a, b)) in r.iter().zip(r0).enumerate() {
            j[(k, i)] = (a - b) / h;
        }
        xp[i] = x[i];
    }
    j
}

/// Relative threshold below which the smallest singular value marks the
/// Jacobian as singular.
pub const SINGULAR_RATIO: f64 = 1e-5;

/// Gauss-Newton step `−J⁺r` and whether `J` was singular.
fn newton_step(j: DMatrix<f64>, r: &[f64]) -> Option<(Vec<f64>, bool)> {
    let svd = j.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let singular = smin < SINGULAR_RATIO * smax.max(1.0);
    let cutoff = smax * 1e-14;
    let rhs = DVector::from_column_slice(r);
    let step = svd.solve(&rhs, cutoff).ok()?;
    Some((step.iter().map(|x| -x).collect(), singular))
}

/// Damped Newton (Gauss-Newton when there are more residuals than unknowns)
/// with step halving. Succeeds once `‖f‖∞ < tol`.
pub fn solve_square_system<F>(f: F, start: &[f64], opts: &SolveOptions) -> Result<Root>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = start.to_vec();
    let mut r = f(&x);
    if r.len() < x.len() {
        return Err(Error::InconsistentSpec(format!(
            "{} unknowns but only {} equations",
            x.len(),
            r.len()
        )));
    }
    let mut singular = false;
    let fail = |iterations, r: &[f64], x: Vec<f64>| Error::NoConvergence {
        iterations,
        norm: sup(r),
        best: x,
    };
    for it in 0..=opts.max_iterations {
        if !r.iter().all(|v| v.is_finite()) {
            return Err(fail(it, &r, x));
        }
        if sup(&r) < opts.tol {
            return Ok(Root {
                norm: sup(&r),
                x,
                iterations: it,
                singular,
            });
        }
        if it == opts.max_iterations {
            break;
        }
        let Some((dx, sing)) = newton_step(jacobian(&f, &x, &r), &r) else {
            return Err(fail(it, &r, x));
        };
        singular |= sing;
        let n0 = l2(&r);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xt: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + t * d).collect();
            let rt = f(&xt);
            if rt.iter().all(|v| v.is_finite()) && l2(&rt) < n0 {
                accepted = Some((xt, rt));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((xt, rt)) => {
                x = xt;
                r = rt;
            }
            None => return Err(fail(it, &r, x)),
        }
    }
    Err(fail(opts.max_iterations, &r, x))
}

/// Default half-width of the start box for each free name.
pub const DEFAULT_BOX: (f64, f64) = (-5.0, 5.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSpec {
    pub family: FamilyId,
    pub fixed: BTreeMap<Var, f64>,
    pub free: Vec<Var>,
    /// Start interval per free name; missing names use [`DEFAULT_BOX`].
    #[serde(default)]
    pub initial_box: BTreeMap<Var, (f64, f64)>,
    pub restarts: usize,
    pub seed: u64,
}

impl SolveSpec {
    pub fn new(family: FamilyId) -> Self {
        SolveSpec {
            family,
            fixed: BTreeMap::new(),
            free: Vec::new(),
            initial_box: BTreeMap::new(),
            restarts: 32,
            seed: 0,
        }
    }

    pub fn fix(mut self, v: Var, value: f64) -> Self {
        self.fixed.insert(v, value);
        self
    }

    pub fn free(mut self, vars: &[Var]) -> Self {
        self.free = vars.to_vec();
        self
    }

    pub fn bounds(mut self, v: Var, lo: f64, hi: f64) -> Self {
        self.initial_box.insert(v, (lo, hi));
        self
    }

    pub fn restarts(mut self, n: usize) -> Self {
        self.restarts = n;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// More equations than free names: roots are found in least squares.
    pub fn is_least_squares(&self) -> bool {
        self.free.len() < descriptor(self.family).equation_count
    }

    fn interval(&self, v: Var) -> (f64, f64) {
        self.initial_box.get(&v).copied().unwrap_or(DEFAULT_BOX)
    }

    /// Checks the fixed/free split.
    ///
    /// A symbol counts as referenced when it occurs in a term of the family's
    /// system that does not vanish under the fixed zero values, so `H_z = 0`
    /// releases the field couplings.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentSpec(msg));
        if self.free.is_empty() {
            return bad("no free names".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.free {
            if !seen.insert(*v) {
                return bad(format!("`{}` listed twice as free", v.name()));
            }
            if self.fixed.contains_key(v) {
                return bad(format!("`{}` is both fixed and free", v.name()));
            }
            if *v == Var::M {
                return bad("m must be fixed".into());
            }
        }
        let model_vars = self.family.model().parameters();
        for v in self.fixed.keys().chain(&self.free) {
            if !v.is_coefficient() && !model_vars.contains(v) {
                return bad(format!("`{}` is not a parameter of {}", v.name(), self.family.model()));
            }
        }
        for (v, x) in &self.fixed {
            if !x.is_finite() {
                return bad(format!("`{}` fixed to a non-finite value", v.name()));
            }
        }
        let m = self
            .fixed
            .get(&Var::M)
            .ok_or_else(|| Error::InconsistentSpec("m must be fixed".into()))?;
        EllipticParameter::new(*m).map_err(|e| Error::InconsistentSpec(e.to_string()))?;
        let eqs = descriptor(self.family).equation_count;
        if self.free.len() > eqs {
            return bad(format!("{} free names but only {eqs} equations", self.free.len()));
        }
        for (lo, hi) in self.initial_box.values() {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return bad(format!("bad start interval [{lo}, {hi}]"));
            }
        }
        let covered = |v: Var| self.fixed.contains_key(&v) || self.free.contains(&v);
        let killed = |v: Var| self.fixed.get(&v) == Some(&0.0);
        for p in derived_system(self.family).polys() {
            for (e, _) in p.terms() {
                let vars: Vec<Var> = Var::ALL.iter().copied().filter(|v| e[v.index()] > 0).collect();
                if vars.iter().any(|&v| killed(v)) {
                    continue;
                }
                if let Some(v) = vars.into_iter().find(|&v| !covered(v)) {
                    return bad(format!("`{}` is neither fixed nor free", v.name()));
                }
            }
        }
        Ok(())
    }

    fn base(&self) -> Assignment {
        let mut a = Assignment::new();
        for (v, x) in &self.fixed {
            a.set(*v, *x);
        }
        a
    }

    fn assignment(&self, x: &[f64]) -> Assignment {
        let mut a = self.base();
        for (v, val) in self.free.iter().zip(x) {
            a.set(*v, *val);
        }
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    /// Root found, nontrivial, every predicate satisfied.
    Converged,
    /// Root found, nontrivial, some predicate violated.
    Infeasible,
    /// Root found but trivial (`A = B = 0`) or with vanishing `D`.
    Degenerate,
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: SolveSpec,
    pub restart: usize,
    pub least_squares: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub family: FamilyId,
    pub status: Status,
    pub params: ModelParams,
    pub coeffs: Coefficients,
    pub constraint_max: f64,
    /// Collocation residual, filled by the verifier.
    pub pde_max: Option<f64>,
    pub feasibility: FeasibilityReport,
    pub derived_ratios: BTreeMap<String, f64>,
    /// The record's `B → −B` image is also among the roots.
    pub symmetry_orbit: bool,
    pub singular_jacobian: bool,
    pub iterations: usize,
    pub provenance: Provenance,
}

impl SolutionRecord {
    pub fn assignment(&self) -> Assignment {
        let mut a = self.params.to_assignment();
        self.coeffs.write_into(&mut a);
        a
    }

    pub fn is_converged(&self) -> bool {
        self.status == Status::Converged
    }

    /// Record built from a known configuration rather than a solve.
    pub fn from_assignment(family: FamilyId, a: &Assignment) -> Result<Self> {
        let spec = SolveSpec::new(family).restarts(0);
        build_record(family, a, 0, 0, false, &spec)
    }
}

/// Amplitudes and scales below this count as trivial. Residuals are
/// quadratic in them, so a 1e-12 residual only resolves them to about 1e-6.
pub const TRIVIAL_AMPLITUDE: f64 = 1e-6;

fn build_record(
    family: FamilyId,
    a: &Assignment,
    restart: usize,
    iterations: usize,
    singular: bool,
    spec: &SolveSpec,
) -> Result<SolutionRecord> {
    let mut a = *a;
    a.set(Var::D, a.get(Var::D).abs());
    let constraint_max = sup(&residuals_at(family, &a));
    let feasibility = feasibility_at(family, &a);
    let trivial = a.get(Var::A).abs() < TRIVIAL_AMPLITUDE && a.get(Var::B).abs() < TRIVIAL_AMPLITUDE;
    let sech_h_bad = family == FamilyId::Mix1X && !(a.get(Var::H) > -1.0);
    let status = if trivial || a.get(Var::D) < TRIVIAL_AMPLITUDE || sech_h_bad {
        Status::Degenerate
    } else if feasibility.is_feasible() {
        Status::Converged
    } else {
        Status::Infeasible
    };
    // Degenerate roots may violate the coefficient domain; keep them
    // representable with a nominal D.
    let mut ca = a;
    if !(ca.get(Var::D) > 0.0) {
        ca.set(Var::D, f64::MIN_POSITIVE);
    }
    let coeffs = Coefficients::from_assignment(family, &ca)?;
    let params = ModelParams::from_assignment(family.model(), &a);
    let mut derived_ratios = BTreeMap::new();
    let unknowns = &descriptor(family).unknowns;
    if unknowns.contains(&Var::F) && a.get(Var::A).abs() > TRIVIAL_AMPLITUDE {
        derived_ratios.insert("F/A".to_string(), a.get(Var::F) / a.get(Var::A));
    }
    if unknowns.contains(&Var::G) && a.get(Var::B).abs() > TRIVIAL_AMPLITUDE {
        derived_ratios.insert("G/B".to_string(), a.get(Var::G) / a.get(Var::B));
    }
    Ok(SolutionRecord {
        family,
        status,
        params,
        coeffs,
        constraint_max,
        pde_max: None,
        feasibility,
        derived_ratios,
        symmetry_orbit: false,
        singular_jacobian: singular,
        iterations,
        provenance: Provenance {
            spec: spec.clone(),
            restart,
            least_squares: spec.is_least_squares(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Diagnostic {
    /// Predicates violated by the roots found (or by the best iterate when
    /// no root was found).
    FeasibilityViolation { predicates: Vec<String>, records: usize },
    /// `best_norm` is absent when every failed restart diverged.
    NoConvergence { restarts: usize, best_norm: Option<f64> },
    Degenerate { records: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub records: Vec<SolutionRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

impl SolveOutcome {
    pub fn converged(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.records.iter().filter(|r| r.is_converged())
    }
}

fn close(x: &[f64], y: &[f64], rel: f64) -> bool {
    let scale = sup(x).max(sup(y)).max(1.0);
    x.iter().zip(y).all(|(a, b)| (a - b).abs() <= rel * scale)
}

/// Relative ∞-distance under which two roots are the same.
pub const DEDUP_TOL: f64 = 1e-8;

/// Multistart solve. Starts are drawn from the seed before any work runs,
/// so the output does not depend on scheduling.
pub fn solve_family(spec: &SolveSpec) -> Result<SolveOutcome> {
    solve_family_with(spec, &SolveOptions::default())
}

pub fn solve_family_with(spec: &SolveSpec, opts: &SolveOptions) -> Result<SolveOutcome> {
    spec.validate()?;
    let family = spec.family;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let starts: Vec<Vec<f64>> = (0..spec.restarts)
        .map(|_| {
            spec.free
                .iter()
                .map(|&v| {
                    let (lo, hi) = spec.interval(v);
                    if lo == hi {
                        lo
                    } else {
                        rng.random_range(lo..hi)
                    }
                })
                .collect()
        })
        .collect();

    let residual = |x: &[f64]| residuals_at(family, &spec.assignment(x));
    let results: Vec<Result<Root>> = starts
        .par_iter()
        .map(|s| solve_square_system(residual, s, opts))
        .collect();

    let mut roots = Vec::new();
    let mut failures = 0;
    let mut best_fail: Option<(f64, Vec<f64>)> = None;
    for (k, res) in results.into_iter().enumerate() {
        match res {
            Ok(mut root) => {
                if let Some(i) = spec.free.iter().position(|&v| v == Var::D) {
                    root.x[i] = root.x[i].abs();
                }
                roots.push((k, root));
            }
            Err(Error::NoConvergence { norm, best, .. }) => {
                failures += 1;
                if best_fail.as_ref().is_none_or(|(n, _)| norm < *n) {
                    best_fail = Some((norm, best));
                }
            }
            Err(e) => return Err(e),
        }
    }

    roots.sort_by(|a, b| {
        a.1.x
            .iter()
            .zip(&b.1.x)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    let mut unique: Vec<(usize, Root)> = Vec::new();
    for (k, root) in roots {
        if !unique.iter().any(|(_, u)| close(&u.x, &root.x, DEDUP_TOL)) {
            unique.push((k, root));
        }
    }

    let mut records = unique
        .iter()
        .map(|(k, root)| build_record(family, &spec.assignment(&root.x), *k, root.iterations, root.singular, spec))
        .collect::<Result<Vec<_>>>()?;

    // Flag B → −B images.
    let key = |r: &SolutionRecord, flip: bool| {
        let c = &r.coeffs;
        let b = if flip { -c.b } else { c.b };
        let mut v = vec![c.a, b, c.d, c.f, c.g, c.h.unwrap_or(0.0)];
        v.extend(Var::ALL.iter().filter(|x| !x.is_coefficient()).map(|&x| r.params.get(x).unwrap_or(0.0)));
        v
    };
    let flags: Vec<bool> = records
        .iter()
        .map(|r| {
            r.coeffs.b.abs() > TRIVIAL_AMPLITUDE
                && records.iter().any(|o| close(&key(o, false), &key(r, true), DEDUP_TOL))
        })
        .collect();
    for (r, f) in records.iter_mut().zip(flags) {
        r.symmetry_orbit = f;
    }

    records.sort_by(|a, b| {
        let ka = [a.coeffs.a, a.coeffs.b, a.coeffs.d, a.coeffs.f, a.coeffs.g, a.coeffs.h.unwrap_or(0.0)];
        let kb = [b.coeffs.a, b.coeffs.b, b.coeffs.d, b.coeffs.f, b.coeffs.g, b.coeffs.h.unwrap_or(0.0)];
        ka.iter()
            .zip(&kb)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.provenance.restart.cmp(&b.provenance.restart))
    });

    let mut diagnostics = Vec::new();
    let mut violated: Vec<String> = Vec::new();
    let mut note = |rep: &FeasibilityReport| {
        for v in &rep.violated {
            if !violated.contains(&v.name) {
                violated.push(v.name.clone());
            }
        }
    };
    for r in &records {
        note(&r.feasibility);
    }
    if records.is_empty() {
        if let Some((_, best)) = &best_fail {
            note(&feasibility_at(family, &spec.assignment(best)));
        }
    }
    let bad_records = records.iter().filter(|r| !r.feasibility.is_feasible()).count();
    if !violated.is_empty() {
        diagnostics.push(Diagnostic::FeasibilityViolation {
            predicates: violated,
            records: bad_records,
        });
    }
    let degenerate = records.iter().filter(|r| r.status == Status::Degenerate).count();
    if degenerate > 0 {
        diagnostics.push(Diagnostic::Degenerate { records: degenerate });
    }
    if failures > 0 {
        diagnostics.push(Diagnostic::NoConvergence {
            restarts: failures,
            best_norm: best_fail.map(|(n, _)| n).filter(|n| n.is_finite()),
        });
    }
    Ok(SolveOutcome { records, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::reductions::zero_field_ratio;

    #[test]
    fn affine_in_one_iteration() {
        let c = [1.5, -2.0, 0.25];
        let root = solve_square_system(
            |v: &[f64]| v.iter().zip(&c).map(|(a, b)| a - b).collect(),
            &[0.0; 3],
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(root.iterations, 1);
        assert!(close(&root.x, &c, 1e-12));
    }

    #[test]
    fn double_root_flags_singularity() {
        let root = solve_square_system(|v: &[f64]| vec![v[0] * v[0]], &[1.0], &SolveOptions::default()).unwrap();
        assert!(root.x[0].abs() < 1e-6);
        assert!(root.singular);
    }

    #[test]
    fn no_convergence_reports_best() {
        let err = solve_square_system(|v: &[f64]| vec![v[0] * v[0] + 1.0], &[1.0], &SolveOptions::default())
            .unwrap_err();
        match err {
            Error::NoConvergence { norm, best, .. } => {
                assert!(norm >= 1.0);
                assert_eq!(best.len(), 1);
            }
            e => panic!("{e:?}"),
        }
    }

    fn s2_spec(m: f64) -> SolveSpec {
        SolveSpec::new(FamilyId::SymII)
            .fix(Var::Hz, 0.0)
            .fix(Var::M, m)
            .fix(Var::Alpha1, -1.0)
            .fix(Var::Beta1, 1.0)
            .fix(Var::Beta2, 1.0)
            .fix(Var::Gamma, 2.0)
            .free(&[Var::A, Var::B, Var::D, Var::F, Var::Alpha2])
            .restarts(48)
            .seed(7)
    }

    #[test]
    fn zero_field_branch_is_found() {
        let out = solve_family(&s2_spec(0.5)).unwrap();
        let x = zero_field_ratio(0.5);
        assert!(out.converged().any(|r| (r.derived_ratios["F/A"] - x).abs() < 1e-10), "{out:#?}");
        assert!(out.converged().all(|r| r.constraint_max < 1e-12));
    }

    #[test]
    fn determinism() {
        let a = serde_json::to_string(&solve_family(&s2_spec(0.75)).unwrap()).unwrap();
        let b = serde_json::to_string(&solve_family(&s2_spec(0.75)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spec_validation() {
        let s = s2_spec(0.5);
        assert!(s.validate().is_ok());
        let mut t = s.clone();
        t.fixed.remove(&Var::Alpha1);
        assert!(matches!(t.validate(), Err(Error::InconsistentSpec(_))));
        let t = s.clone().fix(Var::A, 1.0);
        assert!(t.validate().is_err());
        let t = s.clone().fix(Var::Eta, 1.0);
        assert!(t.validate().is_err());
        let mut t = s.clone();
        t.fixed.remove(&Var::Hz);
        assert!(t.validate().is_err());
        let t = s.free(&[Var::A, Var::B, Var::D, Var::F, Var::Alpha2, Var::Rho1, Var::Rho2, Var::Rho3]);
        assert!(t.validate().is_err());
    }
}
