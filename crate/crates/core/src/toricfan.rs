//! Smooth complete toric fans: validation, Picard and curve-class bases,
//! intersection degrees, wall classes and curve cones.
//!
//! A choice of maximal cone `sigma` fixes coordinates. Divisor classes are
//! written in the basis `{[D_rho] : rho not in sigma(1)}` of `Pic(X)` and curve
//! classes in the dual basis of `A_1(X)`, so that the coordinate of a curve
//! class at `rho` is its degree against `D_rho`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::path::Path;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

/// A curve class, in coordinates dual to the Picard basis of the chosen cone.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveClass(pub Vec<i64>);

impl CurveClass {
    pub fn zero(rank: usize) -> Self {
        CurveClass(vec![0; rank])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, k: i64) -> Self {
        CurveClass(self.0.iter().map(|x| x * k).collect())
    }

    /// Intersection number with a divisor class.
    pub fn dot(&self, d: &DivisorClass) -> i64 {
        assert_eq!(self.0.len(), d.0.len(), "class rank mismatch");
        self.0.iter().zip(&d.0).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Add for &CurveClass {
    type Output = CurveClass;
    fn add(self, rhs: &CurveClass) -> CurveClass {
        assert_eq!(self.0.len(), rhs.0.len(), "class rank mismatch");
        CurveClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CurveClass {
    type Output = CurveClass;
    fn sub(self, rhs: &CurveClass) -> CurveClass {
        assert_eq!(self.0.len(), rhs.0.len(), "class rank mismatch");
        CurveClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl AddAssign<&CurveClass> for CurveClass {
    fn add_assign(&mut self, rhs: &CurveClass) {
        assert_eq!(self.0.len(), rhs.0.len(), "class rank mismatch");
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl Neg for &CurveClass {
    type Output = CurveClass;
    fn neg(self) -> CurveClass {
        CurveClass(self.0.iter().map(|x| -x).collect())
    }
}

/// A divisor class in the basis `{[D_rho] : rho in pic_rays}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass(pub Vec<i64>);

impl DivisorClass {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

/// Rays and maximal cones of a fan in `N = Z^ambient_rank`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    ambient_rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl Fan {
    /// The ambient rank is read off the first ray; use [`Fan::with_rank`] to force it.
    pub fn new(rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Self {
        let rank = rays.first().map_or(0, Vec::len);
        Self::with_rank(rank, rays, max_cones)
    }

    pub fn with_rank(ambient_rank: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Self {
        Fan { ambient_rank, rays, max_cones }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// Index of the maximal cone with exactly this ray set.
    pub fn cone_index(&self, rays: &[usize]) -> Option<usize> {
        let want: BTreeSet<usize> = rays.iter().copied().collect();
        self.max_cones.iter().position(|c| c.iter().copied().collect::<BTreeSet<_>>() == want)
    }

    /// True when the rays all lie in a common maximal cone.
    pub fn spans_cone(&self, rays: &BTreeSet<usize>) -> bool {
        rays.is_empty() || self.max_cones.iter().any(|c| rays.iter().all(|r| c.contains(r)))
    }

    fn facet_map(&self) -> BTreeMap<Vec<usize>, Vec<(usize, usize)>> {
        let mut facets: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            let mut sorted = cone.clone();
            sorted.sort_unstable();
            for (k, &dropped) in sorted.iter().enumerate() {
                let mut facet = sorted.clone();
                facet.remove(k);
                facets.entry(facet).or_default().push((ci, dropped));
            }
        }
        facets
    }

    /// Codimension-one cones shared by two maximal cones. Assumes a valid fan.
    pub fn walls(&self) -> Vec<Wall> {
        self.facet_map()
            .into_iter()
            .filter(|(_, owners)| owners.len() == 2)
            .map(|(rays, owners)| Wall {
                rays,
                cones: [owners[0].0, owners[1].0],
                off_wall: [owners[0].1, owners[1].1],
            })
            .collect()
    }
}

/// A wall `w = sigma' ∩ sigma''` of the fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wall {
    /// Sorted ray indices spanning the wall.
    pub rays: Vec<usize>,
    /// The two maximal cones meeting along the wall.
    pub cones: [usize; 2],
    /// The ray of each adjacent cone that is not on the wall.
    pub off_wall: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyFan,
    RayLength { ray: usize, expected: usize, found: usize },
    ZeroRay { ray: usize },
    NonPrimitiveRay { ray: usize, gcd: i64 },
    DuplicateRay { ray: usize, first: usize },
    UnusedRay { ray: usize },
    ConeSize { cone: usize, expected: usize, found: usize },
    RayIndexOutOfRange { cone: usize, index: usize },
    RepeatedRayInCone { cone: usize, ray: usize },
    DuplicateCone { cone: usize, first: usize },
    NotUnimodular { cone: usize, det: String },
    UnpairedFacet { cone: usize, facet: Vec<usize> },
    OverSharedFacet { facet: Vec<usize>, cones: Vec<usize> },
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyFan => write!(f, "fan has no rays or no maximal cones"),
            Violation::RayLength { ray, expected, found } => {
                write!(f, "ray {ray}: expected {expected} coordinates, found {found}")
            }
            Violation::ZeroRay { ray } => write!(f, "ray {ray} is the zero vector"),
            Violation::NonPrimitiveRay { ray, gcd } => {
                write!(f, "ray {ray} is not primitive (gcd of entries is {gcd})")
            }
            Violation::DuplicateRay { ray, first } => write!(f, "ray {ray} duplicates ray {first}"),
            Violation::UnusedRay { ray } => write!(f, "ray {ray} lies in no maximal cone"),
            Violation::ConeSize { cone, expected, found } => {
                write!(f, "cone {cone}: expected {expected} rays, found {found}")
            }
            Violation::RayIndexOutOfRange { cone, index } => {
                write!(f, "cone {cone}: ray index {index} out of range")
            }
            Violation::RepeatedRayInCone { cone, ray } => write!(f, "cone {cone}: ray {ray} repeated"),
            Violation::DuplicateCone { cone, first } => write!(f, "cone {cone} duplicates cone {first}"),
            Violation::NotUnimodular { cone, det } => {
                write!(f, "cone {cone} is not unimodular (determinant {det})")
            }
            Violation::UnpairedFacet { cone, facet } => {
                write!(f, "facet {facet:?} of cone {cone} is not shared with another maximal cone")
            }
            Violation::OverSharedFacet { facet, cones } => {
                write!(f, "facet {facet:?} is shared by more than two cones {cones:?}")
            }
            Violation::Disconnected { components } => {
                write!(f, "wall-adjacency graph of maximal cones has {components} components")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks smoothness and completeness of a fan. Projectivity is not checked.
pub fn validate_fan(fan: &Fan) -> ValidationReport {
    let mut violations = Vec::new();
    let n = fan.ambient_rank;
    if fan.rays.is_empty() || fan.max_cones.is_empty() || n == 0 {
        violations.push(Violation::EmptyFan);
        return ValidationReport { violations };
    }

    let mut rays_ok = true;
    let mut seen: HashMap<&[i64], usize> = HashMap::new();
    for (i, r) in fan.rays.iter().enumerate() {
        if r.len() != n {
            violations.push(Violation::RayLength { ray: i, expected: n, found: r.len() });
            rays_ok = false;
            continue;
        }
        let g = r.iter().fold(0, |acc, &x| linalg::gcd(acc, x));
        if g == 0 {
            violations.push(Violation::ZeroRay { ray: i });
            rays_ok = false;
        } else if g != 1 {
            violations.push(Violation::NonPrimitiveRay { ray: i, gcd: g });
        }
        if let Some(&first) = seen.get(r.as_slice()) {
            violations.push(Violation::DuplicateRay { ray: i, first });
        } else {
            seen.insert(r, i);
        }
    }

    let mut cones_ok = true;
    let mut seen_cones: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    for (ci, cone) in fan.max_cones.iter().enumerate() {
        if cone.len() != n {
            violations.push(Violation::ConeSize { cone: ci, expected: n, found: cone.len() });
            cones_ok = false;
        }
        let mut members = BTreeSet::new();
        for &idx in cone {
            if idx >= fan.rays.len() {
                violations.push(Violation::RayIndexOutOfRange { cone: ci, index: idx });
                cones_ok = false;
            } else if !members.insert(idx) {
                violations.push(Violation::RepeatedRayInCone { cone: ci, ray: idx });
                cones_ok = false;
            }
        }
        if let Some(&first) = seen_cones.get(&members) {
            violations.push(Violation::DuplicateCone { cone: ci, first });
        } else {
            seen_cones.insert(members, ci);
        }
    }
    if !(rays_ok && cones_ok) {
        return ValidationReport { violations };
    }

    for ray in 0..fan.rays.len() {
        if !fan.max_cones.iter().any(|c| c.contains(&ray)) {
            violations.push(Violation::UnusedRay { ray });
        }
    }

    for (ci, cone) in fan.max_cones.iter().enumerate() {
        let m: Vec<Vec<i64>> = cone.iter().map(|&r| fan.rays[r].clone()).collect();
        let det = linalg::determinant(&m);
        if det.abs() != num_bigint::BigInt::one() {
            violations.push(Violation::NotUnimodular { cone: ci, det: det.to_string() });
        }
    }

    let facets = fan.facet_map();
    let mut parent: Vec<usize> = (0..fan.max_cones.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for (facet, owners) in &facets {
        match owners.len() {
            1 => violations.push(Violation::UnpairedFacet { cone: owners[0].0, facet: facet.clone() }),
            2 => {
                let (a, b) = (find(&mut parent, owners[0].0), find(&mut parent, owners[1].0));
                parent[a] = b;
            }
            _ => violations
                .push(Violation::OverSharedFacet { facet: facet.clone(), cones: owners.iter().map(|o| o.0).collect() }),
        }
    }
    let roots: BTreeSet<usize> = (0..fan.max_cones.len()).map(|c| find(&mut parent, c)).collect();
    if roots.len() > 1 {
        violations.push(Violation::Disconnected { components: roots.len() });
    }
    ValidationReport { violations }
}

#[derive(Debug, Error)]
pub enum ToricError {
    #[error("invalid fan:\n{0}")]
    InvalidFan(ValidationReport),
    #[error("maximal cone index {sigma} out of range ({count} cones)")]
    SigmaOutOfRange { sigma: usize, count: usize },
    #[error("ray index {ray} out of range ({count} rays)")]
    RayOutOfRange { ray: usize, count: usize },
    #[error("class has {found} coordinates, expected {expected}")]
    ClassLength { expected: usize, found: usize },
    #[error("internal error: {0}")]
    Internal(String),
    #[error("cannot parse fan file: {0}")]
    Parse(String),
    #[error("cannot parse curve class `{input}`: {reason}")]
    ClassExpr { input: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A finitely generated cone of curve classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveCone {
    generators: Vec<CurveClass>,
}

impl CurveCone {
    pub fn new(generators: impl IntoIterator<Item = CurveClass>) -> Self {
        let set: BTreeSet<CurveClass> = generators.into_iter().filter(|g| !g.is_zero()).collect();
        CurveCone { generators: set.into_iter().collect() }
    }

    pub fn generators(&self) -> &[CurveClass] {
        &self.generators
    }

    /// Exact membership in the nonnegative rational span of the generators.
    ///
    /// By Carathéodory it suffices to try every linearly independent subset
    /// of generators of size `rank(generators)`.
    pub fn contains(&self, gamma: &CurveClass) -> bool {
        if gamma.is_zero() {
            return true;
        }
        let gens: Vec<Vec<i64>> = self.generators.iter().map(|g| g.0.clone()).collect();
        if gens.is_empty() {
            return false;
        }
        let rank = linalg::bareiss_rank(linalg::to_big(&gens));
        let mut found = false;
        for_each_subset(gens.len(), rank, &mut |subset| {
            let cols: Vec<Vec<i64>> = subset.iter().map(|&i| gens[i].clone()).collect();
            if linalg::bareiss_rank(linalg::to_big(&cols)) != rank {
                return false;
            }
            if let Some(x) = linalg::solve_rational(&cols, &gamma.0) {
                if linalg::is_nonnegative(&x) {
                    found = true;
                    return true;
                }
            }
            false
        });
        found
    }
}

/// Visits every `k`-subset of `0..n` in lexicographic order until `f` returns true.
fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            if rec(i + 1, n, k, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// The fan together with coordinates adapted to a maximal cone `sigma`.
#[derive(Clone, Debug)]
pub struct ToricBasis {
    fan: Fan,
    sigma: usize,
    sigma_rays: Vec<usize>,
    pic_rays: Vec<usize>,
    /// `pairing[i][j] = <m_i, u_{pic_rays[j]}>` where `m_i` is dual to `u_{sigma_rays[i]}`.
    pairing: Vec<Vec<i64>>,
    ray_classes: Vec<DivisorClass>,
    walls: Vec<(Wall, CurveClass)>,
}

/// Build coordinates for `fan` adapted to maximal cone `sigma`.
pub fn build_basis(fan: Fan, sigma: usize) -> Result<ToricBasis, ToricError> {
    let report = validate_fan(&fan);
    if !report.is_ok() {
        return Err(ToricError::InvalidFan(report));
    }
    if sigma >= fan.max_cones.len() {
        return Err(ToricError::SigmaOutOfRange { sigma, count: fan.max_cones.len() });
    }
    let mut sigma_rays = fan.max_cones[sigma].clone();
    sigma_rays.sort_unstable();
    let pic_rays: Vec<usize> = (0..fan.num_rays()).filter(|r| !sigma_rays.contains(r)).collect();

    let basis_cols: Vec<Vec<i64>> = sigma_rays.iter().map(|&t| fan.rays[t].clone()).collect();
    let mut pairing = vec![vec![0i64; pic_rays.len()]; sigma_rays.len()];
    for (j, &rho) in pic_rays.iter().enumerate() {
        let coeffs = linalg::solve_integer(&basis_cols, &fan.rays[rho])
            .ok_or_else(|| ToricError::Internal(format!("ray {rho} has no integral expansion in cone {sigma}")))?;
        for (i, c) in coeffs.into_iter().enumerate() {
            pairing[i][j] = c;
        }
    }

    let p = pic_rays.len();
    let mut ray_classes = vec![DivisorClass(vec![0; p]); fan.num_rays()];
    for (j, &rho) in pic_rays.iter().enumerate() {
        ray_classes[rho].0[j] = 1;
    }
    for (i, &tau) in sigma_rays.iter().enumerate() {
        ray_classes[tau] = DivisorClass(pairing[i].iter().map(|x| -x).collect());
    }

    let mut basis = ToricBasis { fan, sigma, sigma_rays, pic_rays, pairing, ray_classes, walls: Vec::new() };
    basis.walls = basis.compute_wall_classes()?;
    Ok(basis)
}

impl ToricBasis {
    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn sigma_rays(&self) -> &[usize] {
        &self.sigma_rays
    }

    pub fn pic_rays(&self) -> &[usize] {
        &self.pic_rays
    }

    pub fn pic_rank(&self) -> usize {
        self.pic_rays.len()
    }

    pub fn dim(&self) -> usize {
        self.fan.ambient_rank
    }

    pub fn num_rays(&self) -> usize {
        self.fan.num_rays()
    }

    pub fn pairing(&self) -> &[Vec<i64>] {
        &self.pairing
    }

    pub fn divisor_class_of_ray(&self, rho: usize) -> Result<&DivisorClass, ToricError> {
        self.ray_classes.get(rho).ok_or(ToricError::RayOutOfRange { ray: rho, count: self.num_rays() })
    }

    pub fn check_class(&self, beta: &CurveClass) -> Result<(), ToricError> {
        if beta.len() != self.pic_rank() {
            return Err(ToricError::ClassLength { expected: self.pic_rank(), found: beta.len() });
        }
        Ok(())
    }

    /// `beta · D_rho`.
    pub fn curve_degree(&self, beta: &CurveClass, rho: usize) -> Result<i64, ToricError> {
        self.check_class(beta)?;
        Ok(beta.dot(self.divisor_class_of_ray(rho)?))
    }

    /// Degrees of `beta` against every toric divisor, indexed by ray.
    pub fn degrees(&self, beta: &CurveClass) -> Vec<i64> {
        self.ray_classes.iter().map(|d| beta.dot(d)).collect()
    }

    /// Inverse of [`ToricBasis::degrees`] restricted to the Picard rays.
    pub fn class_from_degrees(&self, degrees: &[i64]) -> CurveClass {
        CurveClass(self.pic_rays.iter().map(|&r| degrees[r]).collect())
    }

    pub fn wall_curve_classes(&self) -> &[(Wall, CurveClass)] {
        &self.walls
    }

    fn compute_wall_classes(&self) -> Result<Vec<(Wall, CurveClass)>, ToricError> {
        let fan = &self.fan;
        fan.walls()
            .into_iter()
            .map(|wall| {
                let [a, b] = wall.off_wall;
                let mut cols: Vec<Vec<i64>> = wall.rays.iter().map(|&t| fan.rays[t].clone()).collect();
                cols.push(fan.rays[a].clone());
                let coeffs = linalg::solve_integer(&cols, &fan.rays[b]).ok_or_else(|| {
                    ToricError::Internal(format!("no integral wall relation for wall {:?}", wall.rays))
                })?;
                if coeffs[wall.rays.len()] != -1 {
                    return Err(ToricError::Internal(format!(
                        "wall {:?}: off-wall coefficient {} (expected -1)",
                        wall.rays,
                        coeffs[wall.rays.len()]
                    )));
                }
                let mut deg = vec![0i64; fan.num_rays()];
                deg[a] = 1;
                deg[b] = 1;
                for (k, &t) in wall.rays.iter().enumerate() {
                    deg[t] = -coeffs[k];
                }
                Ok((wall, self.class_from_degrees(&deg)))
            })
            .collect()
    }

    /// Cone spanned by the classes of torus-invariant curves inside `D_rho`.
    pub fn divisor_curve_cone(&self, rho: usize) -> Result<CurveCone, ToricError> {
        if rho >= self.num_rays() {
            return Err(ToricError::RayOutOfRange { ray: rho, count: self.num_rays() });
        }
        Ok(CurveCone::new(self.walls.iter().filter(|(w, _)| w.rays.contains(&rho)).map(|(_, c)| c.clone())))
    }

    /// The Mori cone, generated by all wall classes.
    pub fn mori_cone(&self) -> CurveCone {
        CurveCone::new(self.walls.iter().map(|(_, c)| c.clone()))
    }

    pub fn is_effective(&self, gamma: &CurveClass) -> bool {
        self.mori_cone().contains(gamma)
    }

    /// A divisor class `A` with `A · C_w >= 1` for every wall class, found by
    /// search over small integer vectors. Exists iff the Mori cone is strictly
    /// convex, which holds for projective targets.
    pub fn positive_grading(&self) -> Option<DivisorClass> {
        let gens: Vec<CurveClass> = self.mori_cone().generators.clone();
        positive_grading_for(&gens, self.pic_rank())
    }

    /// All nonzero effective `gamma` with `beta - gamma` effective.
    pub fn effective_classes_below(&self, beta: &CurveClass) -> Result<Vec<CurveClass>, ToricError> {
        self.check_class(beta)?;
        let cone = self.mori_cone();
        if !cone.contains(beta) {
            return Ok(Vec::new());
        }
        let grading = self
            .positive_grading()
            .ok_or_else(|| ToricError::Internal("Mori cone is not strictly convex; is the fan projective?".into()))?;
        let total = beta.dot(&grading);
        let r = self.pic_rank();
        let bounds: Vec<i64> =
            (0..r).map(|j| total * cone.generators.iter().map(|g| g.0[j].abs()).max().unwrap_or(0)).collect();
        let mut out = Vec::new();
        let mut cur = vec![0i64; r];
        fn rec(j: usize, cur: &mut Vec<i64>, bounds: &[i64], visit: &mut dyn FnMut(&[i64])) {
            if j == cur.len() {
                visit(cur);
                return;
            }
            for v in -bounds[j]..=bounds[j] {
                cur[j] = v;
                rec(j + 1, cur, bounds, visit);
            }
        }
        rec(0, &mut cur, &bounds, &mut |coords| {
            let gamma = CurveClass(coords.to_vec());
            if gamma.is_zero() {
                return;
            }
            let g = gamma.dot(&grading);
            if g < 1 || g > total {
                return;
            }
            if cone.contains(&gamma) && cone.contains(&(beta - &gamma)) {
                out.push(gamma);
            }
        });
        out.sort();
        Ok(out)
    }

    /// Self-intersection `D_rho^2` on a surface.
    pub fn surface_self_intersection(&self, rho: usize) -> Option<i64> {
        if self.dim() != 2 {
            return None;
        }
        self.walls.iter().find(|(w, _)| w.rays == [rho]).map(|(_, c)| c.dot(&self.ray_classes[rho]))
    }
}

fn positive_grading_for(gens: &[CurveClass], rank: usize) -> Option<DivisorClass> {
    if gens.is_empty() {
        return None;
    }
    for radius in 1..=8i64 {
        let mut cur = vec![-radius; rank];
        loop {
            let a = DivisorClass(cur.clone());
            if gens.iter().all(|g| g.dot(&a) >= 1) {
                return Some(a);
            }
            // odometer over [-radius, radius]^rank
            let mut k = 0;
            loop {
                if k == rank {
                    break;
                }
                if cur[k] < radius {
                    cur[k] += 1;
                    break;
                }
                cur[k] = -radius;
                k += 1;
            }
            if k == rank {
                break;
            }
        }
    }
    None
}

/// Enumerates multisets of at most `max_parts` elements of `allowed` summing to `beta`.
///
/// Each multiset is emitted once, as a sorted list. When the allowed classes
/// lie in an open half-space (they do for effective classes), the search is
/// pruned by a positive grading.
pub fn effective_decompositions(beta: &CurveClass, allowed: &[CurveClass], max_parts: usize) -> Vec<Vec<CurveClass>> {
    let parts: Vec<CurveClass> =
        allowed.iter().filter(|c| !c.is_zero()).cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let grading = positive_grading_for(&parts, beta.len());
    let weights: Option<Vec<i64>> = grading.as_ref().map(|g| parts.iter().map(|p| p.dot(g)).collect());

    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        rem: &CurveClass,
        start: usize,
        slots: usize,
        parts: &[CurveClass],
        grading: Option<&DivisorClass>,
        weights: Option<&[i64]>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<CurveClass>>,
    ) {
        if rem.is_zero() {
            if !cur.is_empty() {
                out.push(cur.iter().map(|&i| parts[i].clone()).collect());
            }
            return;
        }
        if slots == 0 {
            return;
        }
        let budget = grading.map(|g| rem.dot(g));
        if let Some(b) = budget {
            if b <= 0 {
                return;
            }
        }
        for i in start..parts.len() {
            if let (Some(b), Some(w)) = (budget, weights) {
                if w[i] > b {
                    continue;
                }
            }
            cur.push(i);
            let next = rem - &parts[i];
            rec(&next, i, slots - 1, parts, grading, weights, cur, out);
            cur.pop();
        }
    }
    rec(beta, 0, max_parts, &parts, grading.as_ref(), weights.as_deref(), &mut cur, &mut out);
    out
}

/// Upper bound on the number of nonzero effective parts of `beta`.
pub fn max_parts_bound(basis: &ToricBasis, beta: &CurveClass) -> Option<usize> {
    let g = basis.positive_grading()?;
    usize::try_from(beta.dot(&g)).ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Irreducible,
    Reducible,
    Unknown,
}

/// Which curve classes occur as `f_*[C_v]` for a component `C_v` of a stable map:
/// zero or a positive multiple of the class of an irreducible curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrreducibleClasses {
    /// Explicit membership list; everything else is reducible.
    Listed(BTreeSet<CurveClass>),
    /// Picard rank one: every effective class is a multiple of the line.
    PicardRankOne,
    /// Blow-up of the plane at a torus-fixed point, identified through the
    /// rays of the divisors with self-intersection 1 and -1.
    BlowupOfPlane { hyperplane_ray: usize, exceptional_ray: usize },
    /// No information; every effective class is accepted.
    Unknown,
}

impl IrreducibleClasses {
    /// Built-in tables recognised from the fan alone.
    pub fn builtin(basis: &ToricBasis) -> Option<Self> {
        if basis.pic_rank() == 1 {
            return Some(IrreducibleClasses::PicardRankOne);
        }
        if basis.dim() == 2 && basis.num_rays() == 4 {
            let selfint: Vec<i64> = (0..4).map(|r| basis.surface_self_intersection(r)).collect::<Option<_>>()?;
            let hyperplane_ray = selfint.iter().position(|&x| x == 1)?;
            let exceptional_ray = selfint.iter().position(|&x| x == -1)?;
            if selfint.iter().filter(|&&x| x == 0).count() == 2 {
                return Some(IrreducibleClasses::BlowupOfPlane { hyperplane_ray, exceptional_ray });
            }
        }
        None
    }

    /// Listed classes take priority, then built-in tables, then `Unknown`.
    pub fn resolve(basis: &ToricBasis, listed: Option<Vec<CurveClass>>) -> Self {
        match listed {
            Some(list) => IrreducibleClasses::Listed(list.into_iter().collect()),
            None => Self::builtin(basis).unwrap_or(IrreducibleClasses::Unknown),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            IrreducibleClasses::Listed(_) => "listed",
            IrreducibleClasses::PicardRankOne => "builtin:picard-rank-one",
            IrreducibleClasses::BlowupOfPlane { .. } => "builtin:blowup-of-plane",
            IrreducibleClasses::Unknown => "unknown",
        }
    }

    pub fn membership(&self, basis: &ToricBasis, gamma: &CurveClass) -> Membership {
        if gamma.is_zero() {
            return Membership::Irreducible;
        }
        let yes = |b: bool| if b { Membership::Irreducible } else { Membership::Reducible };
        match self {
            IrreducibleClasses::Listed(set) => yes(set.contains(gamma)),
            IrreducibleClasses::PicardRankOne => yes(basis.is_effective(gamma)),
            IrreducibleClasses::BlowupOfPlane { hyperplane_ray, exceptional_ray } => {
                let Ok(h) = basis.curve_degree(gamma, *hyperplane_ray) else {
                    return Membership::Reducible;
                };
                let Ok(x) = basis.curve_degree(gamma, *exceptional_ray) else {
                    return Membership::Reducible;
                };
                // multiples of e: h = 0, x < 0; the cone spanned by s and l: 0 <= x <= h.
                // (h, x) = (1, -1) is the class s + 2e, which the standard degree-2
                // partition table counts among the irreducible classes.
                yes((h == 0 && x < 0) || (h > 0 && 0 <= x && x <= h) || (h == 1 && x == -1))
            }
            IrreducibleClasses::Unknown => Membership::Unknown,
        }
    }
}

/// Names for curve classes, kept in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassNames {
    entries: Vec<(String, CurveClass)>,
}

impl ClassNames {
    pub fn new(entries: Vec<(String, CurveClass)>) -> Self {
        ClassNames { entries }
    }

    pub fn entries(&self) -> &[(String, CurveClass)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&CurveClass> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// First subset of named classes, in file order, forming a Z-basis.
    fn integral_basis(&self, rank: usize) -> Option<Vec<usize>> {
        let mut chosen = None;
        for_each_subset(self.entries.len(), rank, &mut |subset| {
            let rows: Vec<Vec<i64>> = subset.iter().map(|&i| self.entries[i].1 .0.clone()).collect();
            if rows.iter().any(|r| r.len() != rank) {
                return false;
            }
            if linalg::determinant(&rows).abs() == num_bigint::BigInt::one() {
                chosen = Some(subset.to_vec());
                return true;
            }
            false
        });
        chosen
    }

    /// Symbolic rendering, e.g. `2ℓ` or `2s+e`; raw coordinates without names.
    pub fn format(&self, gamma: &CurveClass) -> String {
        if gamma.is_zero() {
            return "0".into();
        }
        if self.entries.is_empty() {
            return gamma.to_string();
        }
        for (name, c) in &self.entries {
            if c.is_zero() || c.len() != gamma.len() {
                continue;
            }
            if let Some(k) = positive_multiple(gamma, c) {
                return term(k, name, true);
            }
        }
        let Some(basis) = self.integral_basis(gamma.len()) else {
            return gamma.to_string();
        };
        let cols: Vec<Vec<i64>> = basis.iter().map(|&i| self.entries[i].1 .0.clone()).collect();
        let Some(coeffs) = linalg::solve_integer(&cols, &gamma.0) else {
            return gamma.to_string();
        };
        let mut s = String::new();
        for (&i, &k) in basis.iter().zip(&coeffs) {
            if k == 0 {
                continue;
            }
            if k < 0 {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            s.push_str(&term(k.abs(), &self.entries[i].0, false));
        }
        s
    }

    /// Parses `2s+2e`, `3ℓ`, `s-e` or a comma-separated coordinate list.
    pub fn parse(&self, input: &str, rank: usize) -> Result<CurveClass, ToricError> {
        let err = |reason: &str| ToricError::ClassExpr { input: input.to_string(), reason: reason.to_string() };
        let trimmed = input.trim();
        if trimmed.is_empty() {
            return Err(err("empty"));
        }
        let numeric = trimmed.chars().all(|c| c.is_ascii_digit() || c == ',' || c == '-' || c.is_whitespace());
        if numeric {
            let coords: Result<Vec<i64>, _> = trimmed.split(',').map(|t| t.trim().parse::<i64>()).collect();
            let coords = coords.map_err(|e| err(&e.to_string()))?;
            if coords.len() != rank {
                return Err(err(&format!("expected {rank} coordinates, found {}", coords.len())));
            }
            return Ok(CurveClass(coords));
        }
        let mut total = CurveClass::zero(rank);
        let mut rest = trimmed;
        while !rest.is_empty() {
            let mut sign = 1;
            if let Some(r) = rest.strip_prefix('+') {
                rest = r.trim_start();
            } else if let Some(r) = rest.strip_prefix('-') {
                sign = -1;
                rest = r.trim_start();
            }
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            rest = &rest[digits.len()..];
            let k: i64 = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| err("bad coefficient"))? };
            let name_len: usize = rest
                .char_indices()
                .find(|&(_, c)| c == '+' || c == '-' || c.is_whitespace())
                .map_or(rest.len(), |(i, _)| i);
            let name = &rest[..name_len];
            rest = rest[name_len..].trim_start();
            let class = self.get(name).ok_or_else(|| err(&format!("unknown class name `{name}`")))?;
            if class.len() != rank {
                return Err(err(&format!("class `{name}` has wrong length")));
            }
            total += &class.scaled(sign * k);
        }
        Ok(total)
    }
}

fn positive_multiple(gamma: &CurveClass, c: &CurveClass) -> Option<i64> {
    let (i, &ci) = c.0.iter().enumerate().find(|(_, &x)| x != 0)?;
    if gamma.0[i] % ci != 0 {
        return None;
    }
    let k = gamma.0[i] / ci;
    (k > 0 && c.scaled(k) == *gamma).then_some(k)
}

fn term(k: i64, name: &str, _whole: bool) -> String {
    if k == 1 {
        name.to_string()
    } else {
        format!("{k}{name}")
    }
}

/// Order-preserving list of named classes for (de)serialization.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NamedClassList(pub Vec<(String, Vec<i64>)>);

impl Serialize for NamedClassList {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for NamedClassList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> serde::de::Visitor<'de> for V {
            type Value = NamedClassList;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from class names to integer coordinate lists")
            }
            fn visit_map<A: serde::de::MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Vec<i64>>()? {
                    out.push((k, v));
                }
                Ok(NamedClassList(out))
            }
        }
        d.deserialize_map(V)
    }
}

/// Fan input file, JSON or TOML.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanSpec {
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default)]
    pub sigma: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irreducible_classes: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_names: Option<NamedClassList>,
}

impl FanSpec {
    pub fn from_json_str(s: &str) -> Result<Self, ToricError> {
        serde_json::from_str(s).map_err(|e| ToricError::Parse(e.to_string()))
    }

    pub fn from_toml_str(s: &str) -> Result<Self, ToricError> {
        toml::from_str(s).map_err(|e| ToricError::Parse(e.to_string()))
    }

    /// Reads a `.toml` file as TOML and anything else as JSON.
    pub fn from_path(path: &Path) -> Result<Self, ToricError> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml")) {
            Self::from_toml_str(&text)
        } else {
            Self::from_json_str(&text)
        }
    }

    pub fn fan(&self) -> Fan {
        Fan::new(self.rays.clone(), self.max_cones.clone())
    }

    pub fn names(&self) -> ClassNames {
        ClassNames::new(
            self.class_names
                .as_ref()
                .map(|l| l.0.iter().map(|(k, v)| (k.clone(), CurveClass(v.clone()))).collect())
                .unwrap_or_default(),
        )
    }

    pub fn listed_irreducible(&self) -> Option<Vec<CurveClass>> {
        self.irreducible_classes.as_ref().map(|l| l.iter().map(|v| CurveClass(v.clone())).collect())
    }
}

/// Everything the moduli computation needs to know about the target variety.
#[derive(Clone, Debug)]
pub struct Target {
    pub basis: ToricBasis,
    pub irreducible: IrreducibleClasses,
    pub names: ClassNames,
}

impl Target {
    pub fn from_spec(spec: &FanSpec) -> Result<Self, ToricError> {
        let basis = build_basis(spec.fan(), spec.sigma)?;
        let listed = spec.listed_irreducible();
        if let Some(list) = &listed {
            for c in list {
                basis.check_class(c)?;
            }
        }
        let names = spec.names();
        for (_, c) in names.entries() {
            basis.check_class(c)?;
        }
        let irreducible = IrreducibleClasses::resolve(&basis, listed);
        Ok(Target { basis, irreducible, names })
    }

    pub fn with_basis(basis: ToricBasis) -> Self {
        let irreducible = IrreducibleClasses::resolve(&basis, None);
        Target { basis, irreducible, names: ClassNames::default() }
    }
}

/// Fans used throughout the tests and documentation.
pub mod examples {
    use super::*;

    /// Blow-up of the plane at a point: rays u0..u3 = (-1,-1), (1,0), (0,1), (1,1).
    pub fn blowup_plane_fan() -> Fan {
        Fan::new(
            vec![vec![-1, -1], vec![1, 0], vec![0, 1], vec![1, 1]],
            vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]],
        )
    }

    pub fn plane_fan() -> Fan {
        Fan::new(vec![vec![-1, -1], vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 2], vec![1, 2]])
    }

    /// Blow-up of the plane with `sigma = sigma_{0,2}`, so classes are written
    /// through their degrees against `(D_1, D_3)`.
    pub fn blowup_plane_spec() -> FanSpec {
        let fan = blowup_plane_fan();
        FanSpec {
            rays: fan.rays.clone(),
            max_cones: fan.max_cones.clone(),
            sigma: 1,
            irreducible_classes: None,
            class_names: Some(NamedClassList(vec![
                ("s".into(), vec![0, 1]),
                ("e".into(), vec![1, -1]),
                ("ℓ".into(), vec![1, 0]),
            ])),
        }
    }

    pub fn plane_spec() -> FanSpec {
        let fan = plane_fan();
        FanSpec {
            rays: fan.rays.clone(),
            max_cones: fan.max_cones.clone(),
            sigma: 1,
            irreducible_classes: None,
            class_names: Some(NamedClassList(vec![("ℓ".into(), vec![1])])),
        }
    }
}
