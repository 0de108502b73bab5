//! Finite ultrametric spaces as trees of balls: pseudodifferential operators
//! and their wavelet eigenbases, diffusion with drift on an energy landscape,
//! Parisi matrices, and convolution of densities on `Z/p^M`.
//!
//! Leaves are points, internal nodes are balls and `sup(x, y)` is the lowest
//! common ancestor. A tree PDO acts as
//!
//! ```text
//! (Df)(x) = Σ_{y≠x} T(sup(x,y)) (f(x) − f(y)) ν(y)
//! ```

use crate::error::{invalid, Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Nested description of a tree, as read from and written to JSON.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TreeSpec {
    /// Required on leaves; on internal nodes it defaults to the children's sum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TreeSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub measure: f64,
    pub kernel: Option<f64>,
    pub energy: Option<f64>,
    pub label: Option<String>,
    /// Leaves below this node, as positions in leaf order.
    pub leaves: Range<usize>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Values on the leaves, in leaf order.
pub type TreeFunction = Vec<Complex64>;

/// Nodes are stored in preorder, so the root is node 0 and every subtree's
/// leaves are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct UltrametricTree {
    nodes: Vec<Node>,
    leaves: Vec<usize>,
}

impl UltrametricTree {
    pub fn from_spec(spec: &TreeSpec) -> Result<Self> {
        let mut tree = Self { nodes: Vec::new(), leaves: Vec::new() };
        tree.push(spec, None)?;
        Ok(tree)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: TreeSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }

    fn push(&mut self, spec: &TreeSpec, parent: Option<usize>) -> Result<usize> {
        let id = self.nodes.len();
        let first = self.leaves.len();
        self.nodes.push(Node {
            parent,
            children: Vec::new(),
            measure: 0.0,
            kernel: spec.kernel,
            energy: spec.energy,
            label: spec.label.clone(),
            leaves: first..first,
        });
        if spec.children.is_empty() {
            let m = spec.measure.ok_or_else(|| invalid(format!("leaf {} has no measure", first)))?;
            if !(m > 0.0 && m.is_finite()) {
                return Err(invalid(format!("leaf {first} has measure {m}; leaf measures must be positive")));
            }
            self.leaves.push(id);
            self.nodes[id].measure = m;
            self.nodes[id].leaves = first..first + 1;
            return Ok(id);
        }
        if spec.children.len() < 2 {
            return Err(invalid("an internal node needs at least two children"));
        }
        let mut total = 0.0;
        for child in &spec.children {
            let c = self.push(child, Some(id))?;
            total += self.nodes[c].measure;
            self.nodes[id].children.push(c);
        }
        if let Some(m) = spec.measure {
            if (m - total).abs() > 1e-9 * total.max(1.0) {
                return Err(invalid(format!("node measure {m} differs from the children's total {total}")));
            }
        }
        self.nodes[id].measure = total;
        self.nodes[id].leaves = first..self.leaves.len();
        Ok(id)
    }

    pub fn to_spec(&self) -> TreeSpec {
        self.spec_of(0)
    }

    fn spec_of(&self, id: usize) -> TreeSpec {
        let n = &self.nodes[id];
        TreeSpec {
            measure: Some(n.measure),
            kernel: n.kernel,
            energy: n.energy,
            label: n.label.clone(),
            children: n.children.iter().map(|&c| self.spec_of(c)).collect(),
        }
    }

    /// A random tree with `2..=max_leaves` leaves, total measure 1, kernels in
    /// `(0, 2]`, leaf energies in `[0, 1)` and transition energies in `[1, 2)`.
    pub fn random(rng: &mut impl Rng, max_leaves: usize) -> Result<Self> {
        if max_leaves < 2 {
            return Err(invalid("a random tree needs room for two leaves"));
        }
        fn grow(rng: &mut impl Rng, k: usize) -> TreeSpec {
            if k == 1 {
                return TreeSpec {
                    measure: Some(rng.random_range(0.05..1.0)),
                    energy: Some(rng.random_range(0.0..1.0)),
                    ..Default::default()
                };
            }
            let m = rng.random_range(2..=k.min(4));
            // split k into m positive parts
            let mut cuts: Vec<usize> = rand::seq::index::sample(rng, k - 1, m - 1).into_iter().map(|c| c + 1).collect();
            cuts.sort_unstable();
            cuts.push(k);
            let mut prev = 0;
            let children = cuts
                .into_iter()
                .map(|c| {
                    let part = c - prev;
                    prev = c;
                    grow(rng, part)
                })
                .collect();
            TreeSpec {
                kernel: Some(rng.random_range(0.0..2.0) + f64::EPSILON),
                energy: Some(rng.random_range(1.0..2.0)),
                children,
                ..Default::default()
            }
        }
        let k = rng.random_range(2..=max_leaves);
        let mut spec = grow(rng, k);
        fn total(s: &TreeSpec) -> f64 {
            if s.children.is_empty() { s.measure.unwrap() } else { s.children.iter().map(total).sum() }
        }
        fn rescale(s: &mut TreeSpec, f: f64) {
            if let Some(m) = s.measure.as_mut() {
                *m *= f;
            }
            s.children.iter_mut().for_each(|c| rescale(c, f));
        }
        let t = total(&spec);
        rescale(&mut spec, 1.0 / t);
        Self::from_spec(&spec)
    }

    pub fn root(&self) -> usize {
        0
    }
    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }
    /// Node id of the leaf at position `i`.
    pub fn leaf(&self, i: usize) -> usize {
        self.leaves[i]
    }
    pub fn leaf_measures(&self) -> Vec<f64> {
        self.leaves.iter().map(|&l| self.nodes[l].measure).collect()
    }
    pub fn internal_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.nodes[i].is_leaf())
    }

    /// The smallest ball containing leaves `a` and `b`.
    pub fn sup(&self, a: usize, b: usize) -> usize {
        let mut n = self.leaves[a];
        while !self.nodes[n].leaves.contains(&b) {
            n = self.nodes[n].parent.expect("the root contains every leaf");
        }
        n
    }

    fn kernel(&self, id: usize) -> Result<f64> {
        self.nodes[id].kernel.ok_or_else(|| Error::Precondition(format!("node {id} has no kernel value")))
    }

    fn energy(&self, id: usize) -> Result<f64> {
        self.nodes[id].energy.ok_or_else(|| Error::Precondition(format!("node {id} has no energy")))
    }
}

/// `(Df)(x) = Σ_{y≠x} T(sup(x,y)) (f(x) − f(y)) ν(y)`.
pub fn pdo_apply(tree: &UltrametricTree, f: &[Complex64]) -> Result<TreeFunction> {
    if f.len() != tree.leaf_count() {
        return Err(Error::ShapeMismatch(format!("{} values for {} leaves", f.len(), tree.leaf_count())));
    }
    let kernels: Vec<Option<f64>> = tree
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| if n.is_leaf() { Ok(None) } else { tree.kernel(i).map(Some) })
        .collect::<Result<_>>()?;
    // ∫ f dν over every ball
    let mut mass = vec![Complex64::default(); tree.nodes.len()];
    for (i, &l) in tree.leaves.iter().enumerate() {
        let mut n = Some(l);
        let w = f[i] * tree.nodes[l].measure;
        while let Some(id) = n {
            mass[id] += w;
            n = tree.nodes[id].parent;
        }
    }
    Ok((0..tree.leaf_count())
        .map(|i| {
            let mut acc = Complex64::default();
            let mut below = tree.leaves[i];
            while let Some(j) = tree.nodes[below].parent {
                let t = kernels[j].unwrap();
                let ring_measure = tree.nodes[j].measure - tree.nodes[below].measure;
                acc += (f[i] * ring_measure - (mass[j] - mass[below])) * t;
                below = j;
            }
            acc
        })
        .collect())
}

/// A wavelet attached to ball `node`, constant on each of its maximal subballs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeWavelet {
    pub node: usize,
    pub j: usize,
    pub values: Vec<f64>,
}

/// For each internal node with `m` children, `m − 1` functions orthonormal in
/// `L²(ν)`, obtained by Gram–Schmidt from the child indicators after the
/// indicator of the node itself. The children are taken in tree order.
pub fn tree_wavelets(tree: &UltrametricTree) -> Vec<TreeWavelet> {
    let internal: Vec<usize> = tree.internal_nodes().collect();
    internal.par_iter().flat_map_iter(|&id| node_wavelets(tree, id)).collect()
}

fn node_wavelets(tree: &UltrametricTree, id: usize) -> Vec<TreeWavelet> {
    let node = &tree.nodes[id];
    let w: Vec<f64> = node.children.iter().map(|&c| tree.nodes[c].measure).collect();
    let m = w.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&w).map(|((x, y), v)| x * y * v).sum::<f64>();
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0 / node.measure.sqrt(); m]];
    for i in 0..m - 1 {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    basis
        .into_iter()
        .skip(1)
        .enumerate()
        .map(|(j, coef)| {
            let mut values = vec![0.0; tree.leaf_count()];
            for (&c, a) in node.children.iter().zip(&coef) {
                values[tree.nodes[c].leaves.clone()].iter_mut().for_each(|v| *v = *a);
            }
            TreeWavelet { node: id, j, values }
        })
        .collect()
}

/// `λ_I = T(I) ν(I) + Σ_{J>I} T(J) ν(S(J,I))`, where `S(J,I)` is `J` minus its
/// maximal subball containing `I`.
pub fn tree_eigenvalue(tree: &UltrametricTree, node: usize) -> Result<f64> {
    let n = tree.nodes.get(node).ok_or_else(|| invalid(format!("no node {node}")))?;
    if n.is_leaf() {
        return Err(invalid(format!("node {node} is a leaf")));
    }
    let mut lambda = tree.kernel(node)? * n.measure;
    let mut below = node;
    while let Some(j) = tree.nodes[below].parent {
        lambda += tree.kernel(j)? * (tree.nodes[j].measure - tree.nodes[below].measure);
        below = j;
    }
    Ok(lambda)
}

/// Generator of `∂f/∂t + L f = 0` for ν-densities `f` on the leaves:
///
/// ```text
/// (Lf)(x) = Σ_y e^{−βE(sup)}/ν(sup) [e^{βE(x)} f(x) − e^{βE(y)} f(y)] ν(y)
/// ```
pub fn drift_generator(tree: &UltrametricTree, beta: f64) -> Result<DMatrix<f64>> {
    let n = tree.leaf_count();
    let nu = tree.leaf_measures();
    let drift: Vec<f64> = tree.leaves.iter().map(|&l| tree.energy(l).map(|e| (beta * e).exp())).collect::<Result<_>>()?;
    let mut barrier = vec![0.0; tree.nodes.len()];
    for id in tree.internal_nodes() {
        barrier[id] = (-beta * tree.energy(id)?).exp() / tree.nodes[id].measure;
    }
    let mut l = DMatrix::zeros(n, n);
    for x in 0..n {
        let mut diag = 0.0;
        for y in (0..n).filter(|&y| y != x) {
            let k = barrier[tree.sup(x, y)] * nu[y];
            diag += k;
            l[(x, y)] = -k * drift[y];
        }
        l[(x, x)] = diag * drift[x];
    }
    Ok(l)
}

/// The equilibrium ν-density `e^{−βE(x)} / Σ_y e^{−βE(y)} ν(y)`.
pub fn gibbs_density(tree: &UltrametricTree, beta: f64) -> Result<Vec<f64>> {
    let w: Vec<f64> = tree.leaves.iter().map(|&l| tree.energy(l).map(|e| (-beta * e).exp())).collect::<Result<_>>()?;
    let z: f64 = w.iter().zip(tree.leaf_measures()).map(|(a, v)| a * v).sum();
    Ok(w.into_iter().map(|a| a / z).collect())
}

/// `Q_ab = q(|a − b|_p)` on indices `0..p^M`, where `q[k]` is the value at
/// norm `p^{-k}` and the diagonal is zero.
pub fn parisi_matrix(q: &[f64], p: u64, m: u32) -> Result<DMatrix<f64>> {
    crate::padic::check_prime(p)?;
    if (q.len() as u32) < m {
        return Err(invalid(format!("q is given at {} norm values, {m} are needed", q.len())));
    }
    let size = usize::try_from(p.checked_pow(m).filter(|&s| s <= 1 << 14).ok_or_else(|| {
        Error::ResolutionOverflow(format!("{p}^{m} indices"))
    })?)
    .unwrap();
    let p = p as usize;
    Ok(DMatrix::from_fn(size, size, |a, b| {
        if a == b {
            return 0.0;
        }
        let mut d = a.abs_diff(b);
        let mut k = 0;
        while d % p == 0 {
            d /= p;
            k += 1;
        }
        q[k]
    }))
}

/// `Q_ab = q(sup(a, b))` over the leaves, with `q` read from the node kernels.
pub fn parisi_matrix_tree(tree: &UltrametricTree) -> Result<DMatrix<f64>> {
    let n = tree.leaf_count();
    let mut out = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in (0..n).filter(|&b| b != a) {
            out[(a, b)] = tree.kernel(tree.sup(a, b))?;
        }
    }
    Ok(out)
}

/// Digit reversal of `0..p^M`; listing indices in this order makes the balls of
/// `Z/p^M` contiguous.
pub fn monna_order(p: u64, m: u32) -> Vec<usize> {
    let p = p as usize;
    (0..p.pow(m))
        .map(|i| {
            let (mut i, mut r) = (i, 0);
            for _ in 0..m {
                r = r * p + i % p;
                i /= p;
            }
            r
        })
        .collect()
}

/// Probability density on `Z_p` with respect to Haar measure, constant on the
/// cosets `a + p^M Z_p`, indexed by `a ∈ 0..p^M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZpDensity {
    p: u64,
    m: u32,
    values: Vec<f64>,
}

impl ZpDensity {
    pub fn new(p: u64, m: u32, values: Vec<f64>) -> Result<Self> {
        crate::padic::check_prime(p)?;
        let size = p.checked_pow(m).filter(|&s| s <= 1 << 20).ok_or_else(|| Error::ResolutionOverflow(format!("{p}^{m} cosets")))?;
        if values.len() as u64 != size {
            return Err(Error::ShapeMismatch(format!("{} values for {size} cosets", values.len())));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("density values must be finite and nonnegative"));
        }
        let mass = values.iter().sum::<f64>() / size as f64;
        if (mass - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("total mass {mass}, not 1")));
        }
        Ok(Self { p, m, values })
    }

    /// Normalises nonnegative weights per coset into a density.
    pub fn from_weights(p: u64, m: u32, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("weights must have positive total"));
        }
        let scale = weights.len() as f64 / total;
        Self::new(p, m, weights.iter().map(|w| w * scale).collect())
    }

    pub fn uniform(p: u64, m: u32) -> Result<Self> {
        let size = p.checked_pow(m).ok_or_else(|| Error::ResolutionOverflow(format!("{p}^{m}")))? as usize;
        Self::new(p, m, vec![1.0; size])
    }

    pub fn point_mass(p: u64, m: u32, a: usize) -> Result<Self> {
        let size = p.checked_pow(m).ok_or_else(|| Error::ResolutionOverflow(format!("{p}^{m}")))? as usize;
        if a >= size {
            return Err(invalid(format!("coset {a} out of range")));
        }
        let mut v = vec![0.0; size];
        v[a] = size as f64;
        Self::new(p, m, v)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn resolution(&self) -> u32 {
        self.m
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest `r` with the support inside `p^r Z_p`.
    pub fn support_exponent(&self) -> u32 {
        let p = self.p as usize;
        let mut r = self.m;
        for (a, _) in self.values.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            let mut k = 0;
            let mut a = a;
            while k < self.m && a % p == 0 {
                a /= p;
                k += 1;
            }
            r = r.min(k);
        }
        r
    }

    /// Whether the density is constant on cosets of `p^s Z_p`.
    pub fn is_constant_at(&self, s: u32) -> bool {
        if s > self.m {
            return false;
        }
        let block = self.p.pow(s) as usize;
        self.values.iter().enumerate().all(|(a, v)| *v == self.values[a % block])
    }

    /// `sup_x |f(x) − p^r 1_{p^r Z_p}(x)|`.
    pub fn distance_to_uniform(&self, r: u32) -> f64 {
        let step = self.p.pow(r) as usize;
        let level = self.p.pow(r) as f64;
        self.values
            .iter()
            .enumerate()
            .map(|(a, v)| (v - if a % step == 0 { level } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }
}

/// Density of the sum of independent variables: convolution over `Z/p^M`.
pub fn convolve(d1: &ZpDensity, d2: &ZpDensity) -> Result<ZpDensity> {
    if d1.p != d2.p || d1.m != d2.m {
        return Err(Error::ShapeMismatch(format!(
            "densities at p^M = {}^{} and {}^{}",
            d1.p, d1.m, d2.p, d2.m
        )));
    }
    let n = d1.values.len();
    let mut out = vec![0.0; n];
    for (a, &x) in d1.values.iter().enumerate().filter(|(_, x)| **x != 0.0) {
        for (b, &y) in d2.values.iter().enumerate() {
            out[(a + b) % n] += x * y;
        }
    }
    out.iter_mut().for_each(|v| *v /= n as f64);
    Ok(ZpDensity { p: d1.p, m: d1.m, values: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `sup |p_{S_n} − D^{-1} 1_D|`.
    pub distance: f64,
    /// `D · distance`, the deviation in units of the uniform level.
    pub scaled: f64,
    pub bound: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `D = p^{-r}`.
    pub support_exp: u32,
    /// `Δ = p^{-s}`.
    pub constancy_exp: u32,
    pub rate: f64,
    pub rows: Vec<ConvergenceRow>,
    pub violations: usize,
    pub monotone: bool,
}

/// Distance of the `n`-fold self-convolution to the uniform density on the
/// support ball, against `(D/Δ − 1) e^{−λn}` with `λ = (Δ/D)³/3`.
///
/// The bound is invariant under rescaling the ball while the sup-distance
/// scales like `1/D`, so the comparison uses `D · distance`. For `D = 1` the
/// two coincide.
///
/// `D = p^{-r}` must be the smallest ball around 0 holding the support and
/// `Δ = p^{-s} < D` a scale on which `d` is constant.
pub fn convergence_report(d: &ZpDensity, r: u32, s: u32, n_max: usize) -> Result<ConvergenceReport> {
    let support = d.support_exponent();
    if support != r {
        return Err(Error::Precondition(format!(
            "the smallest ball holding the support has radius p^-{support}, not p^-{r}"
        )));
    }
    if s <= r || s > d.m {
        return Err(Error::Precondition(format!(
            "constancy radius p^-{s} must lie strictly inside the support radius p^-{r} and at or above the resolution p^-{}",
            d.m
        )));
    }
    if !d.is_constant_at(s) {
        return Err(Error::Precondition(format!("density is not constant on cosets of p^{s} Z_p")));
    }
    let ratio = (d.p as f64).powi(s as i32 - r as i32);
    let rate = ratio.powi(-3) / 3.0;
    let mut rows = Vec::with_capacity(n_max);
    let mut current = d.clone();
    for n in 1..=n_max {
        if n > 1 {
            current = convolve(&current, d)?;
        }
        let distance = current.distance_to_uniform(r);
        let scaled = distance * (d.p as f64).powi(-(r as i32));
        let bound = (ratio - 1.0) * (-rate * n as f64).exp();
        rows.push(ConvergenceRow { n, distance, scaled, bound, violated: scaled > bound * (1.0 + 1e-12) });
    }
    let violations = rows.iter().filter(|r| r.violated).count();
    let monotone = rows.windows(2).all(|w| w[1].distance <= w[0].distance * (1.0 + 1e-12) + 1e-15);
    Ok(ConvergenceReport { support_exp: r, constancy_exp: s, rate, rows, violations, monotone })
}
