//! Full-dimensional polytopes `{x : ⟨u_i, x⟩ ≤ c_i}` with primitive integer
//! normals and rational offsets.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::{inverse, kernel_line, rank, solve, subsets, Q};
use crate::error::{Error, Result};
use crate::poly::{parse_rational, rational_to_f64};

/// The halfspace `⟨u, x⟩ ≤ c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub u: Vec<i64>,
    pub c: BigRational,
}

impl Facet {
    pub fn new(u: Vec<i64>, c: BigRational) -> Self {
        Self { u, c }
    }

    pub fn integer(u: Vec<i64>, c: i64) -> Self {
        Self::new(u, BigRational::from_integer(c.into()))
    }

    fn normal(&self) -> Vec<Q> {
        self.u.iter().map(|&v| Q::from_integer(v.into())).collect()
    }

    fn value(&self, x: &[Q]) -> Q {
        self.u.iter().zip(x).fold(Q::zero(), |acc, (&u, xi)| acc + xi * Q::from_integer(u.into()))
    }
}

/// A bounded, nonempty, full-dimensional polytope. Construction validates
/// the facets and caches the exact vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HPolytopeSpec", into = "HPolytopeSpec")]
pub struct HPolytope {
    n: usize,
    facets: Vec<Facet>,
    vertices: Vec<Vec<BigRational>>,
}

impl HPolytope {
    pub fn new(n: usize, facets: Vec<Facet>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Geometry("dimension must be at least 1".into()));
        }
        for (i, f) in facets.iter().enumerate() {
            if f.u.len() != n {
                return Err(Error::Geometry(format!(
                    "facet {i} has a normal of length {} in dimension {n}",
                    f.u.len()
                )));
            }
            let g = f.u.iter().fold(0i64, |g, &v| g.gcd(&v));
            if g != 1 {
                return Err(Error::Geometry(format!("facet {i} normal {:?} is not primitive (gcd {g})", f.u)));
            }
        }
        let normals: Vec<Vec<Q>> = facets.iter().map(Facet::normal).collect();
        if facets.len() <= n || rank(&normals) < n {
            return Err(Error::Geometry("polyhedron is unbounded".into()));
        }
        // A pointed recession cone {d : U d ≤ 0} other than {0} has an
        // extreme ray cut out by n-1 independent facet normals.
        for subset in subsets(facets.len(), n - 1) {
            let rows: Vec<Vec<Q>> = subset.iter().map(|&i| normals[i].clone()).collect();
            let Some(d) = kernel_line(&rows, n) else { continue };
            let neg: Vec<Q> = d.iter().map(|v| -v).collect();
            for dir in [d, neg] {
                if facets.iter().all(|f| !f.value(&dir).is_positive()) {
                    return Err(Error::Geometry(format!(
                        "polyhedron is unbounded along {:?}",
                        dir.iter().map(rational_to_f64).collect::<Vec<_>>()
                    )));
                }
            }
        }
        let vertices = enumerate_vertices(n, &facets);
        if vertices.is_empty() {
            return Err(Error::Geometry("polytope is empty".into()));
        }
        let diffs: Vec<Vec<Q>> =
            vertices[1..].iter().map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect()).collect();
        if rank(&diffs) < n {
            return Err(Error::Geometry("polytope is not full-dimensional".into()));
        }
        Ok(Self { n, facets, vertices })
    }

    /// `[0, 1]^n`.
    pub fn cube(n: usize) -> Self {
        let mut facets = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = -1;
            facets.push(Facet::integer(e.clone(), 0));
            e[i] = 1;
            facets.push(Facet::integer(e, 1));
        }
        Self::new(n, facets).expect("unit cube is a valid polytope")
    }

    /// `{x ≥ 0, Σ x_i ≤ size}`.
    pub fn simplex(n: usize, size: i64) -> Result<Self> {
        let mut facets: Vec<Facet> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = -1;
                Facet::integer(e, 0)
            })
            .collect();
        facets.push(Facet::integer(vec![1; n], size));
        Self::new(n, facets)
    }

    pub fn standard_simplex(n: usize) -> Self {
        Self::simplex(n, 1).expect("standard simplex is a valid polytope")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Exact vertices in lexicographic order.
    pub fn vertices(&self) -> &[Vec<BigRational>] {
        &self.vertices
    }

    pub fn vertices_f64(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| v.iter().map(rational_to_f64).collect()).collect()
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().flatten().all(|c| c.is_integer())
    }

    /// Smallest positive `c_i - ⟨u_i, v⟩` over vertices `v` and facets `i`.
    pub fn min_slack(&self) -> f64 {
        self.vertices
            .iter()
            .flat_map(|v| self.facets.iter().map(move |f| &f.c - f.value(v)))
            .filter(|s| s.is_positive())
            .map(|s| rational_to_f64(&s))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.facets.iter().all(|f| f.value(x) <= f.c)
    }

    /// Integer points of `N P`, lexicographically sorted.
    pub fn lattice_points(&self, n_dil: u64) -> Result<Vec<Vec<i64>>> {
        let scale = Q::from_integer(BigInt::from(n_dil));
        let to_i64 = |q: BigInt| {
            q.to_i64().ok_or_else(|| Error::Domain(format!("dilation {n_dil} overflows 64-bit coordinates")))
        };
        let mut lo = Vec::with_capacity(self.n);
        let mut hi = Vec::with_capacity(self.n);
        for j in 0..self.n {
            let (min, max) = self.vertices.iter().fold((None::<&Q>, None::<&Q>), |(lo, hi), v| {
                let x = &v[j];
                (Some(lo.map_or(x, |l| if x < l { x } else { l })), Some(hi.map_or(x, |h| if x > h { x } else { h })))
            });
            lo.push(to_i64((min.expect("vertices exist") * &scale).ceil().to_integer())?);
            hi.push(to_i64((max.expect("vertices exist") * &scale).floor().to_integer())?);
        }
        let bounds: Vec<i64> =
            self.facets.iter().map(|f| to_i64((&f.c * &scale).floor().to_integer())).collect::<Result<_>>()?;
        let facets = &self.facets;
        let inside = |k: &[i64]| {
            facets.iter().zip(&bounds).all(|(f, &b)| f.u.iter().zip(k).map(|(&u, &x)| u * x).sum::<i64>() <= b)
        };
        let n = self.n;
        let slabs: Vec<Vec<Vec<i64>>> = (lo[0]..=hi[0])
            .into_par_iter()
            .map(|first| {
                let mut out = Vec::new();
                let mut k = lo.clone();
                k[0] = first;
                loop {
                    if inside(&k) {
                        out.push(k.clone());
                    }
                    // odometer over coordinates 1..n
                    let mut j = n;
                    loop {
                        j -= 1;
                        if j == 0 {
                            return out;
                        }
                        if k[j] < hi[j] {
                            k[j] += 1;
                            break;
                        }
                        k[j] = lo[j];
                    }
                }
            })
            .collect();
        Ok(slabs.into_iter().flatten().collect())
    }

    /// The image of `P` under `x ↦ A x` for a unimodular integer matrix `A`.
    pub fn transform_unimodular(&self, a: &[Vec<i64>]) -> Result<Self> {
        let n = self.n;
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::Domain(format!("expected a {n}x{n} matrix")));
        }
        let aq: Vec<Vec<Q>> = a.iter().map(|r| r.iter().map(|&v| Q::from_integer(v.into())).collect()).collect();
        let inv = inverse(&aq).ok_or_else(|| Error::Domain("matrix is singular".into()))?;
        if inv.iter().flatten().any(|v| !v.is_integer()) {
            return Err(Error::Domain("matrix is not unimodular".into()));
        }
        // ⟨u, A⁻¹ x'⟩ = ⟨A⁻ᵀ u, x'⟩
        let facets = self
            .facets
            .iter()
            .map(|f| {
                let u = (0..n)
                    .map(|j| {
                        let s = (0..n).fold(Q::zero(), |acc, i| acc + &inv[i][j] * Q::from_integer(f.u[i].into()));
                        s.to_integer().to_i64().expect("small integer normal")
                    })
                    .collect();
                Facet::new(u, f.c.clone())
            })
            .collect();
        Self::new(n, facets)
    }
}

fn enumerate_vertices(n: usize, facets: &[Facet]) -> Vec<Vec<Q>> {
    let mut set = BTreeSet::new();
    for subset in subsets(facets.len(), n) {
        let a: Vec<Vec<Q>> = subset.iter().map(|&i| facets[i].normal()).collect();
        let b: Vec<Q> = subset.iter().map(|&i| facets[i].c.clone()).collect();
        if let Some(x) = solve(&a, &b) {
            if facets.iter().all(|f| f.value(&x) <= f.c) {
                set.insert(x);
            }
        }
    }
    set.into_iter().collect()
}

/// Offsets may be written as JSON numbers or as `"p/q"` / decimal strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RationalValue {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FacetSpec {
    u: Vec<i64>,
    c: RationalValue,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HPolytopeSpec {
    n: usize,
    facets: Vec<FacetSpec>,
}

impl TryFrom<HPolytopeSpec> for HPolytope {
    type Error = Error;

    fn try_from(spec: HPolytopeSpec) -> Result<Self> {
        let facets = spec
            .facets
            .into_iter()
            .map(|f| {
                let c = match f.c {
                    RationalValue::Int(v) => BigRational::from_integer(v.into()),
                    RationalValue::Text(s) => parse_rational(&s)?,
                };
                Ok(Facet::new(f.u, c))
            })
            .collect::<Result<_>>()?;
        HPolytope::new(spec.n, facets)
    }
}

impl From<HPolytope> for HPolytopeSpec {
    fn from(p: HPolytope) -> Self {
        HPolytopeSpec {
            n: p.n,
            facets: p
                .facets
                .into_iter()
                .map(|f| FacetSpec {
                    u: f.u,
                    c: RationalValue::Text(if f.c.denom().is_one() {
                        f.c.numer().to_string()
                    } else {
                        f.c.to_string()
                    }),
                })
                .collect(),
        }
    }
}
