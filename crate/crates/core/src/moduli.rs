//! Scores, emptiness checks and the component criterion for genus-0 stable
//! maps and quasimaps to a toric target.
//!
//! For a decorated tree `G`, `i_G` is the total jump of `h^0(L_rho)` over the
//! value on a smooth curve and `d_G = i_G - #E(G)`. A stratum is a component
//! when it is nonempty and `d_G >= d_G'` for every contraction `G'` of `G`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nodalcoh::{self, h0_line};
use crate::stratcone::{self, ClosureOrder, Stratum};
use crate::toricfan::{self, CurveClass, IrreducibleClasses, Membership, Target, ToricBasis, ToricError};
use crate::treegen::{self, canonical_form, CanonicalKey, DecoratedTree, Mode};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeScore {
    pub i_g: i64,
    pub d_g: i64,
    pub h0_per_ray: Vec<usize>,
    pub h1_per_ray: Vec<usize>,
}

pub fn score_tree(t: &DecoratedTree, basis: &ToricBasis) -> TreeScore {
    let beta = t.beta();
    let mut h0_per_ray = Vec::with_capacity(basis.num_rays());
    let mut h1_per_ray = Vec::with_capacity(basis.num_rays());
    let (mut i_g, mut i_from_h1) = (0i64, 0i64);
    for rho in 0..basis.num_rays() {
        let dr = basis.divisor_class_of_ray(rho).expect("ray in range");
        let total = beta.dot(dr);
        let coh = nodalcoh::cohomology(&t.degree_tree(|c| c.dot(dr)));
        let smooth_h0 = h0_line(total) as i64;
        let smooth_h1 = smooth_h0 - total - 1;
        i_g += coh.h0 as i64 - smooth_h0;
        i_from_h1 += coh.h1 as i64 - smooth_h1;
        h0_per_ray.push(coh.h0);
        h1_per_ray.push(coh.h1);
    }
    assert_eq!(i_g, i_from_h1, "h0 and h1 offsets disagree for {t:?}");
    TreeScore { i_g, d_g: i_g - t.num_edges() as i64, h0_per_ray, h1_per_ray }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emptiness {
    Empty,
    Passed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// A vertex class is not the class of an irreducible curve.
    R1,
    /// A section is forced to vanish on a component not contained in the divisor.
    R2,
    /// A component is forced into divisors that share no cone.
    R3,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmptinessVerdict {
    pub status: Emptiness,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rule: Option<Rule>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ray: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vertex: Option<usize>,
    /// Set when a vertex class could not be certified irreducible.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub unknown_irreducibility: bool,
}

impl EmptinessVerdict {
    fn passed(unknown: bool) -> Self {
        EmptinessVerdict {
            status: Emptiness::Passed,
            rule: None,
            ray: None,
            vertex: None,
            unknown_irreducibility: unknown,
        }
    }

    fn empty(rule: Rule, ray: Option<usize>, vertex: usize) -> Self {
        EmptinessVerdict {
            status: Emptiness::Empty,
            rule: Some(rule),
            ray,
            vertex: Some(vertex),
            unknown_irreducibility: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.status == Emptiness::Empty
    }

    pub fn label(&self) -> String {
        match (self.status, self.rule) {
            (Emptiness::Passed, _) if self.unknown_irreducibility => "passed?".into(),
            (Emptiness::Passed, _) => "passed".into(),
            (Emptiness::Empty, Some(r)) => format!("empty:{r}"),
            (Emptiness::Empty, None) => "empty".into(),
        }
    }
}

/// Vertices whose component must map into `D_rho`, or the first vertex that
/// would have to map into `D_rho` without being able to.
fn forced_into_divisor(t: &DecoratedTree, basis: &ToricBasis, rho: usize) -> Result<BTreeSet<usize>, usize> {
    let dr = basis.divisor_class_of_ray(rho).expect("ray in range");
    let cone = basis.divisor_curve_cone(rho).expect("ray in range");
    let deg: Vec<i64> = t.classes().iter().map(|c| c.dot(dr)).collect();
    let adj = t.adjacency();
    let mut forced: BTreeSet<usize> = (0..t.num_vertices()).filter(|&v| deg[v] < 0).collect();
    loop {
        let mut changed = false;
        for v in 0..t.num_vertices() {
            if forced.contains(&v) {
                continue;
            }
            let hits = adj[v].iter().filter(|w| forced.contains(w)).count() as i64;
            if hits == 0 {
                continue;
            }
            if t.class(v).is_zero() {
                forced.insert(v);
                changed = true;
            } else if hits > deg[v] {
                if !cone.contains(t.class(v)) {
                    return Err(v);
                }
                forced.insert(v);
                changed = true;
            }
        }
        if !changed {
            return Ok(forced);
        }
    }
}

/// Necessary conditions for the stratum of `t` to be nonempty.
///
/// `Empty` is certified by one of the rules; `Passed` only means no rule fired.
pub fn nonempty_status(t: &DecoratedTree, target: &Target, mode: Mode) -> EmptinessVerdict {
    let basis = &target.basis;
    let mut unknown = false;
    if mode == Mode::Maps {
        for v in 0..t.num_vertices() {
            match target.irreducible.membership(basis, t.class(v)) {
                Membership::Reducible => return EmptinessVerdict::empty(Rule::R1, None, v),
                Membership::Unknown => unknown = true,
                Membership::Irreducible => {}
            }
        }
    }
    let mut in_divisors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); t.num_vertices()];
    for rho in 0..basis.num_rays() {
        match forced_into_divisor(t, basis, rho) {
            Ok(f) => {
                for v in f {
                    in_divisors[v].insert(rho);
                }
            }
            Err(v) => return EmptinessVerdict::empty(Rule::R2, Some(rho), v),
        }
    }
    for (v, rays) in in_divisors.iter().enumerate() {
        if !basis.fan().spans_cone(rays) {
            return EmptinessVerdict::empty(Rule::R3, rays.iter().next().copied(), v);
        }
    }
    EmptinessVerdict::passed(unknown)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeStatus {
    Component,
    Dominated,
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeReport {
    pub id: String,
    pub key: CanonicalKey,
    pub tree: DecoratedTree,
    pub decomposition: Vec<CurveClass>,
    pub num_edges: usize,
    pub score: TreeScore,
    pub verdict: EmptinessVerdict,
    pub status: TreeStatus,
    pub component: bool,
    /// `d_G - d_G0`.
    pub offset: i64,
    /// Contractions `G'` of `G` with `d_G' > d_G`, if any.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub dominated_by: Vec<CanonicalKey>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub schema: u32,
    pub mode: Mode,
    pub beta: CurveClass,
    pub n: usize,
    /// Source of the irreducible-class data used for vertex classes.
    pub irreducible_classes: String,
    pub max_parts: usize,
    pub trees: Vec<TreeReport>,
    pub components: Vec<CanonicalKey>,
    /// Standard expected dimension of the main component (not part of the criterion).
    pub main_dimension: i64,
}

impl ComponentReport {
    pub fn tree(&self, key: &CanonicalKey) -> Option<&TreeReport> {
        self.trees.iter().find(|t| &t.key == key)
    }

    pub fn component_trees(&self) -> impl Iterator<Item = &TreeReport> {
        self.trees.iter().filter(|t| t.component)
    }
}

#[derive(Debug, Error)]
pub enum ModuliError {
    #[error("moduli space empty for n < 2")]
    QuasimapMarks,
    #[error("curve class {0} is zero or not effective")]
    BadBeta(CurveClass),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error("component test failed: {0}")]
    Strat(#[from] stratcone::StratError),
    #[error("cannot build thread pool: {0}")]
    Threads(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Overrides the bound on the number of nonzero vertices.
    pub max_parts: Option<usize>,
    /// Worker threads; falls back to `MODCOMP_THREADS`, then to rayon's default.
    pub threads: Option<usize>,
}

impl RunOptions {
    pub fn with_threads(threads: usize) -> Self {
        RunOptions { threads: Some(threads), ..Default::default() }
    }

    fn resolved_threads(&self) -> Option<usize> {
        self.threads
            .or_else(|| std::env::var("MODCOMP_THREADS").ok().and_then(|v| v.trim().parse().ok()))
            .filter(|&t| t > 0)
    }
}

/// Nonzero classes allowed on vertices of trees of class `beta`.
pub fn vertex_classes(target: &Target, beta: &CurveClass, mode: Mode) -> Result<Vec<CurveClass>, ToricError> {
    let below = target.basis.effective_classes_below(beta)?;
    Ok(match mode {
        Mode::Maps => below
            .into_iter()
            .filter(|c| target.irreducible.membership(&target.basis, c) != Membership::Reducible)
            .collect(),
        Mode::Quasimaps => below,
    })
}

pub fn irreducible_components(
    target: &Target,
    beta: &CurveClass,
    n: usize,
    mode: Mode,
    options: &RunOptions,
) -> Result<ComponentReport, ModuliError> {
    if mode == Mode::Quasimaps && n < 2 {
        return Err(ModuliError::QuasimapMarks);
    }
    target.basis.check_class(beta)?;
    if beta.is_zero() || !target.basis.is_effective(beta) {
        return Err(ModuliError::BadBeta(beta.clone()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = options.resolved_threads() {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| ModuliError::Threads(e.to_string()))?;
    pool.install(|| compute(target, beta, n, mode, options))
}

fn compute(
    target: &Target,
    beta: &CurveClass,
    n: usize,
    mode: Mode,
    options: &RunOptions,
) -> Result<ComponentReport, ModuliError> {
    let basis = &target.basis;
    let max_parts = match options.max_parts {
        Some(m) => m,
        None => toricfan::max_parts_bound(basis, beta)
            .ok_or_else(|| ToricError::Internal("no positive grading on the Mori cone".into()))?,
    };
    let classes = vertex_classes(target, beta, mode)?;
    let trees = treegen::enumerate_trees(beta, n, &classes, mode, max_parts);
    let keys: Vec<CanonicalKey> = trees.par_iter().map(canonical_form).collect();

    let closures: Vec<Vec<DecoratedTree>> = trees.par_iter().map(treegen::contraction_closure).collect();
    let mut unique: BTreeMap<CanonicalKey, DecoratedTree> = BTreeMap::new();
    for (k, t) in keys.iter().zip(&trees) {
        unique.entry(k.clone()).or_insert_with(|| t.clone());
    }
    let mut closure_keys: Vec<Vec<CanonicalKey>> = Vec::with_capacity(trees.len());
    for cl in &closures {
        let mut ks = Vec::with_capacity(cl.len());
        for c in cl {
            let k = canonical_form(c);
            unique.entry(k.clone()).or_insert_with(|| c.clone());
            ks.push(k);
        }
        closure_keys.push(ks);
    }
    let scored: BTreeMap<CanonicalKey, TreeScore> =
        unique.par_iter().map(|(k, t)| (k.clone(), score_tree(t, basis))).collect::<Vec<_>>().into_iter().collect();

    let strata: Vec<Stratum<CanonicalKey>> =
        unique.iter().map(|(k, t)| Stratum::new(k.clone(), scored[k].i_g, t.num_edges() as i64)).collect();
    let order = ClosureOrder::new(
        keys.iter().zip(&closure_keys).flat_map(|(k, cl)| cl.iter().map(move |c| (k.clone(), c.clone()))),
    );
    let d_ok = stratcone::component_strata(&strata, &order)?;
    let generic = stratcone::generic_stratum(&strata)?.id.clone();
    let d0 = scored[&generic].d_g;

    let verdicts: Vec<EmptinessVerdict> = trees.par_iter().map(|t| nonempty_status(t, target, mode)).collect();

    let mut reports = Vec::with_capacity(trees.len());
    for (idx, (t, key)) in trees.iter().zip(&keys).enumerate() {
        let score = scored[key].clone();
        let verdict = verdicts[idx].clone();
        let dominated_by: Vec<CanonicalKey> =
            closure_keys[idx].iter().filter(|c| scored[*c].d_g > score.d_g).cloned().collect();
        let passes_d = d_ok.contains(key);
        debug_assert_eq!(passes_d, dominated_by.is_empty());
        let component = passes_d && !verdict.is_empty();
        let status = if verdict.is_empty() {
            TreeStatus::Empty
        } else if component {
            TreeStatus::Component
        } else {
            TreeStatus::Dominated
        };
        reports.push(TreeReport {
            id: format!("T{idx}"),
            key: key.clone(),
            tree: t.clone(),
            decomposition: t.decomposition(),
            num_edges: t.num_edges(),
            offset: score.d_g - d0,
            score,
            verdict,
            status,
            component,
            dominated_by,
        });
    }
    let components = reports.iter().filter(|r| r.component).map(|r| r.key.clone()).collect();
    Ok(ComponentReport {
        schema: 1,
        mode,
        beta: beta.clone(),
        n,
        irreducible_classes: match mode {
            Mode::Maps => target.irreducible.label().to_string(),
            Mode::Quasimaps => "all-effective".to_string(),
        },
        max_parts,
        trees: reports,
        components,
        main_dimension: standard_main_dimension(basis, beta, n),
    })
}

/// `dim X + sum_rho beta . D_rho + n - 3`.
pub fn standard_main_dimension(basis: &ToricBasis, beta: &CurveClass, n: usize) -> i64 {
    basis.dim() as i64 + basis.degrees(beta).iter().sum::<i64>() + n as i64 - 3
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDimension {
    pub key: CanonicalKey,
    pub offset: i64,
    pub dimension: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub main_dimension: i64,
    /// True when the main dimension comes from the expected-dimension formula
    /// rather than caller-supplied `b` and `f`.
    pub derived: bool,
    pub components: Vec<ComponentDimension>,
}

/// Absolute dimensions of the components. With `base = Some((b, f))` the main
/// dimension is `b + f`; otherwise the expected dimension stored in the report.
pub fn dimension_report(report: &ComponentReport, base: Option<(i64, i64)>) -> DimensionReport {
    let (main_dimension, derived) = match base {
        Some((b, f)) => (stratcone::stratum_dimension(b, f, 0), false),
        None => (report.main_dimension, true),
    };
    DimensionReport {
        main_dimension,
        derived,
        components: report
            .component_trees()
            .map(|t| ComponentDimension { key: t.key.clone(), offset: t.offset, dimension: main_dimension + t.offset })
            .collect(),
    }
}

/// Convenience for callers holding only a basis: built-in irreducible tables apply.
pub fn target_for(basis: ToricBasis) -> Target {
    let irreducible = IrreducibleClasses::resolve(&basis, None);
    Target { basis, irreducible, names: Default::default() }
}
