//! Lattice polyhedra `V` and index polytopes `H`, the Dirichlet-multinomial
//! type weight on `V`, and the counting statements relating the two.
//!
//! Points are stored in graded lexicographic order (by coordinate sum, then
//! lexicographically); matrix rows and serialized output follow that order.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{binomial, binomial_count, factorial, pochhammer, pochhammer_int, rat, MultiIndex, Rational};

/// Validated `(d, N, l)` triple: `1 <= l_i <= N` and `l_i + l_j >= N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DomainSpec {
    d: usize,
    #[serde(rename = "N")]
    n: u32,
    ell: Vec<u32>,
}

pub fn check_admissible(d: usize, n: u32, ell: &[u32]) -> Result<DomainSpec> {
    if d == 0 {
        return Err(Error::OutOfRange("dimension d must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::OutOfRange("N must be at least 1".into()));
    }
    if ell.len() != d + 1 {
        return Err(Error::OutOfRange(format!(
            "expected {} entries in l, got {}",
            d + 1,
            ell.len()
        )));
    }
    if let Some((i, &l)) = ell.iter().enumerate().find(|(_, &l)| l < 1 || l > n) {
        return Err(Error::OutOfRange(format!(
            "l_{} = {l} must satisfy 1 <= l_i <= N = {n}",
            i + 1
        )));
    }
    for i in 0..=d {
        for j in i + 1..=d {
            if ell[i] + ell[j] < n {
                return Err(Error::Inadmissible { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(DomainSpec { d, n, ell: ell.to_vec() })
}

impl DomainSpec {
    /// The full discrete simplex `V_N^d` (every `l_i = N`).
    pub fn simplex(d: usize, n: u32) -> Result<DomainSpec> {
        check_admissible(d, n, &vec![n; d + 1])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ell(&self) -> &[u32] {
        &self.ell
    }

    /// `|l|`.
    pub fn ell_total(&self) -> i64 {
        self.ell.iter().map(|&l| l as i64).sum()
    }

    /// `|l^j| = l_j + ... + l_{d+1}` (1-based; zero past the end).
    pub fn ell_suffix(&self, j: usize) -> i64 {
        if j == 0 || j > self.d + 1 {
            return 0;
        }
        self.ell[j - 1..].iter().map(|&l| l as i64).sum()
    }

    /// Pairs `(i, j)` (1-based) on a degenerate face, `l_i + l_j = N`.
    pub fn degenerate_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..=self.d {
            for j in i + 1..=self.d {
                if self.ell[i] + self.ell[j] == self.n {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    pub fn ell_rational(&self) -> Vec<Rational> {
        self.ell.iter().map(|&l| rat(l as i64)).collect()
    }

    /// Homogeneous coordinates `(x_1, ..., x_d, N - |x|)`.
    pub fn homogeneous(&self, x: &[u32]) -> Vec<i64> {
        let mut h: Vec<i64> = x.iter().map(|&v| v as i64).collect();
        h.push(self.n as i64 - h.iter().sum::<i64>());
        h
    }

    pub fn contains_point(&self, x: &[u32]) -> bool {
        if x.len() != self.d {
            return false;
        }
        let s: u64 = x.iter().map(|&v| v as u64).sum();
        x.iter().zip(&self.ell).all(|(&xi, &li)| xi <= li)
            && s <= self.n as u64
            && s + self.ell[self.d] as u64 >= self.n as u64
    }

    /// Membership in `H`: all of `nu_j <= l_j`,
    /// `nu_j + 2|nu^{j+1}| <= |l^{j+1}|`, `|nu| <= |l| - N`, `|nu| <= N`.
    pub fn contains_index(&self, nu: &[u32]) -> bool {
        if nu.len() != self.d {
            return false;
        }
        let total: i64 = nu.iter().map(|&v| v as i64).sum();
        if total > self.n as i64 || total > self.ell_total() - self.n as i64 {
            return false;
        }
        let mut suffix = 0i64;
        for j in (1..=self.d).rev() {
            let v = nu[j - 1] as i64;
            if v > self.ell[j - 1] as i64 || v + 2 * suffix > self.ell_suffix(j + 1) {
                return false;
            }
            suffix += v;
        }
        true
    }

    /// Spec with `l'_i = l_{perm[i]}` (0-based permutation of `0..=d`).
    pub fn permuted(&self, perm: &[usize]) -> DomainSpec {
        let ell = perm.iter().map(|&p| self.ell[p]).collect();
        DomainSpec { d: self.d, n: self.n, ell }
    }
}

/// Enumerated `V_{l,N}^d` with a point-to-ordinal index.
#[derive(Clone, Debug)]
pub struct LatticeDomain {
    spec: DomainSpec,
    points: Vec<MultiIndex>,
    index: HashMap<Vec<u32>, usize>,
}

impl LatticeDomain {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn points(&self) -> &[MultiIndex] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, x: &[u32]) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Ordinal of a homogeneous point, `None` when it leaves `V`.
    pub fn index_of_homogeneous(&self, xh: &[i64]) -> Option<usize> {
        let d = self.spec.d;
        if xh[..d].iter().any(|&v| v < 0) {
            return None;
        }
        let key: Vec<u32> = xh[..d].iter().map(|&v| v as u32).collect();
        let idx = self.index_of(&key)?;
        (xh[d] == self.spec.n as i64 - key.iter().map(|&v| v as i64).sum::<i64>()).then_some(idx)
    }
}

/// Enumerated `H_{l,N}^d`.
#[derive(Clone, Debug)]
pub struct IndexSet {
    spec: DomainSpec,
    indices: Vec<MultiIndex>,
    index: HashMap<Vec<u32>, usize>,
}

impl IndexSet {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index_of(&self, nu: &[u32]) -> Option<usize> {
        self.index.get(nu).copied()
    }
}

fn graded_lex(mut pts: Vec<MultiIndex>) -> (Vec<MultiIndex>, HashMap<Vec<u32>, usize>) {
    pts.sort_by(|a, b| a.total().cmp(&b.total()).then_with(|| a.0.cmp(&b.0)));
    let index = pts.iter().enumerate().map(|(i, p)| (p.0.clone(), i)).collect();
    (pts, index)
}

// V: recurse over x_1..x_d; prune on the running sum.
fn scan_v(spec: &DomainSpec, emit: &mut dyn FnMut(&[u32])) {
    fn rec(spec: &DomainSpec, cur: &mut Vec<u32>, sum: u32, emit: &mut dyn FnMut(&[u32])) {
        let i = cur.len();
        if i == spec.d {
            if sum + spec.ell[spec.d] >= spec.n {
                emit(cur);
            }
            return;
        }
        let ub = spec.ell[i].min(spec.n - sum);
        for v in 0..=ub {
            cur.push(v);
            rec(spec, cur, sum + v, emit);
            cur.pop();
        }
    }
    rec(spec, &mut Vec::with_capacity(spec.d), 0, emit);
}

// Upper bound for nu_j given the suffix sum s = |nu^{j+1}|; every defining
// inequality of H is an upper bound on nu_j once the suffix is fixed.
fn h_bound(spec: &DomainSpec, j: usize, s: i64) -> i64 {
    let n = spec.n as i64;
    (spec.ell[j - 1] as i64)
        .min(spec.ell_suffix(j + 1) - 2 * s)
        .min(n - s)
        .min(spec.ell_total() - n - s)
}

fn scan_h(spec: &DomainSpec, emit: &mut dyn FnMut(&[u32])) {
    fn rec(spec: &DomainSpec, j: usize, cur: &mut Vec<u32>, s: i64, emit: &mut dyn FnMut(&[u32])) {
        if j == 0 {
            emit(cur);
            return;
        }
        let ub = h_bound(spec, j, s);
        for v in 0..=ub.max(-1) {
            cur[j - 1] = v as u32;
            rec(spec, j - 1, cur, s + v, emit);
        }
        cur[j - 1] = 0;
    }
    let mut cur = vec![0u32; spec.d];
    rec(spec, spec.d, &mut cur, 0, emit);
}

pub fn enumerate_v(spec: &DomainSpec) -> LatticeDomain {
    let mut pts = Vec::new();
    scan_v(spec, &mut |x| pts.push(MultiIndex(x.to_vec())));
    let (points, index) = graded_lex(pts);
    LatticeDomain { spec: spec.clone(), points, index }
}

pub fn enumerate_h(spec: &DomainSpec) -> IndexSet {
    let mut pts = Vec::new();
    scan_h(spec, &mut |nu| pts.push(MultiIndex(nu.to_vec())));
    let (indices, index) = graded_lex(pts);
    IndexSet { spec: spec.clone(), indices, index }
}

/// `|V|` without materializing points.
pub fn count_v(spec: &DomainSpec) -> u64 {
    let mut c = 0u64;
    scan_v(spec, &mut |_| c += 1);
    c
}

/// `|H|` without materializing points; the innermost coordinate is counted
/// as an interval.
pub fn count_h(spec: &DomainSpec) -> u64 {
    fn rec(spec: &DomainSpec, j: usize, s: i64) -> u64 {
        let ub = h_bound(spec, j, s);
        if ub < 0 {
            return 0;
        }
        if j == 1 {
            return ub as u64 + 1;
        }
        (0..=ub).map(|v| rec(spec, j - 1, s + v)).sum()
    }
    rec(spec, spec.d, 0)
}

/// `binom(N+d, d) - sum_i binom(N - l_i + d - 1, d)`.
pub fn count_v_formula(spec: &DomainSpec) -> BigInt {
    let d = spec.d as i64;
    let n = spec.n as i64;
    let mut total = binomial_count(n + d, d as u64);
    for &l in &spec.ell {
        total -= binomial_count(n - l as i64 + d - 1, d as u64);
    }
    total
}

/// The weight `H_{l,N}(x)` for arbitrary rational `l` (`x_{d+1} = N - |x|`).
pub fn weight_generic(ell: &[Rational], n: u32, x: &[u32]) -> Result<Rational> {
    let d = x.len();
    let total: u32 = x.iter().sum();
    if total > n || ell.len() != d + 1 {
        return Err(Error::PointOutsideDomain(x.to_vec()));
    }
    let ell_sum: Rational = ell.iter().sum();
    let norm = pochhammer(&-ell_sum, n);
    if norm.is_zero() {
        return Err(Error::DenominatorPole { k: n });
    }
    let mut w = Rational::from_integer(factorial(n)) / norm;
    let mut coords: Vec<u32> = x.to_vec();
    coords.push(n - total);
    for (xi, li) in coords.iter().zip(ell) {
        w *= pochhammer(&-li.clone(), *xi) / Rational::from_integer(factorial(*xi));
    }
    Ok(w)
}

pub fn weight(spec: &DomainSpec, x: &[u32]) -> Result<Rational> {
    if !spec.contains_point(x) {
        return Err(Error::PointOutsideDomain(x.to_vec()));
    }
    let xh: Vec<u32> = spec.homogeneous(x).into_iter().map(|v| v as u32).collect();
    weight_homogeneous(&spec.ell, spec.n, &xh)
}

/// Weight evaluated from homogeneous coordinates `(x_1, ..., x_{d+1})` with
/// `|x| = N`; symmetric in the simultaneous action on `(x_i, l_i)`.
/// For integer `l` this is `prod binom(l_i, x_i) / binom(|l|, N)`.
pub fn weight_homogeneous(ell: &[u32], n: u32, xh: &[u32]) -> Result<Rational> {
    let total: u32 = xh.iter().sum();
    if total != n || xh.len() != ell.len() || xh.iter().zip(ell).any(|(x, l)| x > l) {
        return Err(Error::PointOutsideDomain(xh.to_vec()));
    }
    let ell_sum: i64 = ell.iter().map(|&l| l as i64).sum();
    let mut num = BigInt::one();
    for (&xi, &li) in xh.iter().zip(ell) {
        num *= binomial(li as i64, xi as u64)?;
    }
    Ok(Rational::new(num, binomial(ell_sum, n as u64)?))
}

fn require_d2(spec: &DomainSpec) -> Result<()> {
    if spec.d != 2 {
        return Err(Error::WrongDimension { expected: 2, got: spec.d });
    }
    Ok(())
}

/// Column counts `v(nu_1) = |V ∩ {x_1 = nu_1}|` for `nu_1 = 0..=l_1` (d = 2),
/// closed form checked against a direct count.
pub fn heights_v(spec: &DomainSpec) -> Result<Vec<u32>> {
    require_d2(spec)?;
    let (n, l) = (spec.n as i64, &spec.ell);
    let closed: Vec<u32> = (0..=l[0] as i64)
        .map(|c| {
            let hi = (l[1] as i64).min(n - c);
            let lo = (n - l[2] as i64 - c).max(0);
            (hi - lo + 1).max(0) as u32
        })
        .collect();
    let mut counted = vec![0u32; l[0] as usize + 1];
    scan_v(spec, &mut |x| counted[x[0] as usize] += 1);
    if closed != counted {
        return Err(Error::InternalConsistency(format!(
            "V heights disagree: closed {closed:?} vs counted {counted:?}"
        )));
    }
    Ok(closed)
}

/// Height function of `H` (d = 2) from the min-of-five closed form, checked
/// against a direct column count.
pub fn heights_h(spec: &DomainSpec) -> Result<Vec<u32>> {
    let closed = heights_h_closed(spec)?;
    let counted = heights_h_counted(spec)?;
    if closed != counted {
        return Err(Error::InternalConsistency(format!(
            "H heights disagree: closed {closed:?} vs counted {counted:?}"
        )));
    }
    Ok(closed)
}

pub fn heights_h_closed(spec: &DomainSpec) -> Result<Vec<u32>> {
    require_d2(spec)?;
    let (n, l) = (spec.n as i64, &spec.ell);
    let (l1, l2, l3) = (l[0] as i64, l[1] as i64, l[2] as i64);
    Ok((0..=l1)
        .map(|c| {
            let m = l2
                .min(l3)
                .min((l2 + l3 - c).div_euclid(2))
                .min(l1 + l2 + l3 - n - c)
                .min(n - c);
            (m + 1).max(0) as u32
        })
        .collect())
}

pub fn heights_h_counted(spec: &DomainSpec) -> Result<Vec<u32>> {
    require_d2(spec)?;
    let mut counted = vec![0u32; spec.ell[0] as usize + 1];
    scan_h(spec, &mut |nu| counted[nu[0] as usize] += 1);
    Ok(counted)
}

/// The multiset the three-part partition of `{0..l_1}` predicts for both
/// height functions: `min(l_2,l_3)+1` on `S_1`; each of
/// `min(l_2,l_3)+1-i`, `i = 1..|S_2|/2`, twice on `S_2`; and
/// `max(l_2+l_3-N, N-l_1) - i`, `i = 0..|S_3|`, once on `S_3`.
pub fn partition_multiset(spec: &DomainSpec) -> Result<Vec<u32>> {
    require_d2(spec)?;
    let (n, l) = (spec.n as i64, &spec.ell);
    let (l1, l2, l3) = (l[0] as i64, l[1] as i64, l[2] as i64);
    let (lo, hi) = (l2.min(l3), l2.max(l3));
    let s1 = (l2 - l3).abs() + 1;
    let s2 = 2 * (n - hi).min(l1 + lo - n);
    let s3 = (2 * n - l1 - l2 - l3).abs();
    let top3 = (l2 + l3 - n).max(n - l1);
    let mut out = Vec::new();
    out.extend(std::iter::repeat_n(lo + 1, s1 as usize));
    for i in 1..=s2 / 2 {
        out.push(lo + 1 - i);
        out.push(lo + 1 - i);
    }
    for i in 0..s3 {
        out.push(top3 - i);
    }
    if out.iter().any(|&v| v < 0) {
        return Err(Error::InternalConsistency(format!("negative height predicted for {spec:?}")));
    }
    let mut out: Vec<u32> = out.into_iter().map(|v| v as u32).collect();
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShuffleReport {
    pub v: Vec<u32>,
    pub h: Vec<u32>,
    pub shuffle: bool,
    /// `tau` with `v[tau[i]] == h[i]`.
    pub permutation: Option<Vec<usize>>,
    pub partition_v: bool,
    pub partition_h: bool,
}

impl ShuffleReport {
    pub fn holds(&self) -> bool {
        self.shuffle && self.partition_v && self.partition_h
    }
}

pub fn verify_shuffle(spec: &DomainSpec) -> Result<ShuffleReport> {
    let v = heights_v(spec)?;
    let h = heights_h(spec)?;
    let mut used = vec![false; v.len()];
    let mut tau = Vec::with_capacity(h.len());
    for &hv in &h {
        match (0..v.len()).find(|&k| !used[k] && v[k] == hv) {
            Some(k) => {
                used[k] = true;
                tau.push(k);
            }
            None => break,
        }
    }
    let shuffle = tau.len() == h.len() && v.len() == h.len();
    let predicted = partition_multiset(spec)?;
    let sorted = |xs: &[u32]| {
        let mut s = xs.to_vec();
        s.sort_unstable();
        s
    };
    Ok(ShuffleReport {
        partition_v: sorted(&v) == predicted,
        partition_h: sorted(&h) == predicted,
        permutation: shuffle.then_some(tau),
        shuffle,
        v,
        h,
    })
}

/// d = 3 analogue (report only): heights over the projection onto
/// `x_3 = 0`, compared as multisets.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectionHeights {
    pub v: Vec<((u32, u32), u32)>,
    pub h: Vec<((u32, u32), u32)>,
    pub multisets_equal: bool,
}

pub fn projection_heights_d3(spec: &DomainSpec) -> Result<ProjectionHeights> {
    if spec.d != 3 {
        return Err(Error::WrongDimension { expected: 3, got: spec.d });
    }
    let mut v: HashMap<(u32, u32), u32> = HashMap::new();
    scan_v(spec, &mut |x| *v.entry((x[0], x[1])).or_default() += 1);
    let mut h: HashMap<(u32, u32), u32> = HashMap::new();
    scan_h(spec, &mut |nu| *h.entry((nu[0], nu[1])).or_default() += 1);
    let mut v: Vec<_> = v.into_iter().collect();
    let mut h: Vec<_> = h.into_iter().collect();
    v.sort_unstable();
    h.sort_unstable();
    let mut vs: Vec<u32> = v.iter().map(|p| p.1).collect();
    let mut hs: Vec<u32> = h.iter().map(|p| p.1).collect();
    vs.sort_unstable();
    hs.sort_unstable();
    Ok(ProjectionHeights { multisets_equal: vs == hs, v, h })
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaStep {
    pub k: usize,
    pub ell_lower: Vec<u32>,
    pub count_upper: u64,
    pub count_lower: u64,
    pub expected: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseCase {
    pub ell: Vec<u32>,
    pub count: u64,
    pub formula: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CountingReport {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u32,
    pub steps: Vec<LemmaStep>,
    pub base_cases: Vec<BaseCase>,
}

impl CountingReport {
    pub fn holds(&self) -> bool {
        self.steps.iter().all(|s| s.holds) && self.base_cases.iter().all(|b| b.holds)
    }

    pub fn instances(&self) -> usize {
        self.steps.len() + self.base_cases.len()
    }
}

/// Checks the counting lemmas on one parameter vector `l` (d >= 3).
///
/// With `l_1 = ... = l_{k-1} = N` and `l_k < N` (k <= d-1), raising `l_k`
/// by one adds exactly `binom(N - l_k + d - 2, d - 1)` points to `H`.
/// When `l_1 = ... = l_{d-1} = N`, `|H|` is compared with the two-term
/// closed form.
pub fn verify_counting_lemmas(d: usize, n: u32, ell: &[u32]) -> Result<CountingReport> {
    if d < 3 {
        return Err(Error::WrongDimension { expected: 3, got: d });
    }
    let lower = check_admissible(d, n, ell)?;
    let mut report = CountingReport { d, n, ..Default::default() };
    let lead = ell.iter().take_while(|&&l| l == n).count();
    let k = lead + 1;
    if k < d && ell[k - 1] < n {
        let mut up = ell.to_vec();
        up[k - 1] += 1;
        let upper = check_admissible(d, n, &up)?;
        let (cu, cl) = (count_h(&upper), count_h(&lower));
        let expected = crate::exact::binomial(n as i64 - ell[k - 1] as i64 + d as i64 - 2, (d - 1) as u64)?
            .to_u64()
            .unwrap_or(u64::MAX);
        report.steps.push(LemmaStep {
            k,
            ell_lower: ell.to_vec(),
            count_upper: cu,
            count_lower: cl,
            expected,
            holds: cu >= cl && cu - cl == expected,
        });
    }
    if lead >= d - 1 {
        let count = count_h(&lower);
        let (n64, d64) = (n as i64, d as i64);
        let formula = binomial_count(n64 + d64, d as u64)
            - binomial_count(n64 - ell[d - 1] as i64 + d64 - 1, d as u64)
            - binomial_count(n64 - ell[d] as i64 + d64 - 1, d as u64);
        let formula = formula.to_u64().unwrap_or(u64::MAX);
        report.base_cases.push(BaseCase { ell: ell.to_vec(), count, formula, holds: count == formula });
    }
    Ok(report)
}

/// Every admissible parameter vector that exercises a lemma step or a base
/// case, for `N <= n_max`.
pub fn counting_lemma_sweep(d: usize, n_max: u32) -> Result<CountingReport> {
    if d < 3 {
        return Err(Error::WrongDimension { expected: 3, got: d });
    }
    let mut total = CountingReport { d, n: n_max, ..Default::default() };
    for n in 1..=n_max {
        for spec in admissible_specs(d, n) {
            let ell = spec.ell();
            let lead = ell.iter().take_while(|&&l| l == n).count();
            let relevant = (lead < d - 1 && ell[lead] < n) || lead >= d - 1;
            if !relevant {
                continue;
            }
            let r = verify_counting_lemmas(d, n, ell)?;
            total.steps.extend(r.steps);
            total.base_cases.extend(r.base_cases);
        }
    }
    Ok(total)
}

/// All admissible specs for fixed `(d, N)`, lexicographic in `l`.
pub fn admissible_specs(d: usize, n: u32) -> Vec<DomainSpec> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d + 1);
    fn rec(d: usize, n: u32, cur: &mut Vec<u32>, out: &mut Vec<DomainSpec>) {
        if cur.len() == d + 1 {
            out.push(DomainSpec { d, n, ell: cur.clone() });
            return;
        }
        let lo = cur.iter().map(|&l| n - l).max().unwrap_or(0).max(1);
        for l in lo..=n {
            cur.push(l);
            rec(d, n, cur, out);
            cur.pop();
        }
    }
    rec(d, n, &mut cur, &mut out);
    out
}

/// Corollary generators of the vanishing ideal: `(-x_i)_{l_i+1}`,
/// `(-x_{d+1})_{l_{d+1}+1}` with `x_{d+1} = N - |x|`, and the products
/// `(-x_1)_{nu_1} ... (-x_d)_{nu_d}` for `|nu| = N + 1`; true iff all of them
/// vanish at every point of `V`.
pub fn ideal_generators_vanish(spec: &DomainSpec) -> bool {
    let d = spec.d;
    let n = spec.n;
    let mut top = Vec::new();
    let mut cur = vec![0u32; d];
    fn compositions(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            compositions(i + 1, left - v, cur, out);
        }
    }
    compositions(0, n + 1, &mut cur, &mut top);
    let mut ok = true;
    scan_v(spec, &mut |x| {
        if !ok {
            return;
        }
        let xh = spec.homogeneous(x);
        for (i, &xi) in xh.iter().enumerate() {
            if !pochhammer_int(-xi, spec.ell[i] + 1).is_zero() {
                ok = false;
                return;
            }
        }
        for nu in &top {
            let mut prod = BigInt::one();
            for (xi, &k) in x.iter().zip(nu) {
                prod *= pochhammer_int(-(*xi as i64), k);
            }
            if !prod.is_zero() {
                ok = false;
                return;
            }
        }
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn spec(d: usize, n: u32, ell: &[u32]) -> DomainSpec {
        check_admissible(d, n, ell).unwrap()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn admissibility_examples() {
        let s = spec(2, 3, &[2, 2, 2]);
        assert!(s.degenerate_pairs().is_empty());
        assert_eq!(check_admissible(2, 6, &[3, 5, 2]), Err(Error::Inadmissible { i: 1, j: 3 }));
        let s = spec(2, 6, &[4, 4, 2]);
        assert_eq!(s.degenerate_pairs(), vec![(1, 3), (2, 3)]);
        assert!(matches!(check_admissible(2, 3, &[0, 3, 3]), Err(Error::OutOfRange(_))));
        assert!(matches!(check_admissible(2, 3, &[4, 3, 3]), Err(Error::OutOfRange(_))));
        assert!(matches!(check_admissible(2, 3, &[3, 3]), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn enumerate_small_hexagon() {
        let s = spec(2, 3, &[2, 2, 2]);
        let v = enumerate_v(&s);
        let mut got: Vec<Vec<u32>> = v.points().iter().map(|p| p.0.clone()).collect();
        got.sort();
        assert_eq!(got, vec![vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![1, 2], vec![2, 0], vec![2, 1]]);
        // graded lexicographic order
        assert_eq!(v.points()[0], mi(&[0, 1]));
        assert_eq!(v.points()[1], mi(&[1, 0]));
        assert_eq!(count_v_formula(&s), BigInt::from(7));

        let h = enumerate_h(&s);
        let mut got: Vec<Vec<u32>> = h.indices().iter().map(|p| p.0.clone()).collect();
        got.sort();
        assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1]]);
    }

    #[test]
    fn brute_force_v_matches_scan() {
        // oracle: full grid scan against the three defining constraints
        let s = spec(2, 3, &[2, 2, 2]);
        let mut brute = Vec::new();
        for a in 0..=3u32 {
            for b in 0..=3u32 {
                if a <= 2 && b <= 2 && a + b <= 3 && a + b >= 1 {
                    brute.push(vec![a, b]);
                }
            }
        }
        let mut got: Vec<Vec<u32>> = enumerate_v(&s).points().iter().map(|p| p.0.clone()).collect();
        got.sort();
        assert_eq!(got, brute);
    }

    #[test]
    fn truncated_tetrahedron_instance() {
        let s = spec(3, 10, &[6, 7, 5, 8]);
        assert_eq!(enumerate_v(&s).len(), 217);
        assert_eq!(enumerate_h(&s).len(), 217);
        assert_eq!(count_h(&s), 217);
        assert_eq!(count_v_formula(&s), BigInt::from(217));
    }

    #[test]
    fn full_simplex_count() {
        for d in 1..=4 {
            for n in 1..=6 {
                let s = DomainSpec::simplex(d, n).unwrap();
                let want = crate::exact::binomial((n as usize + d) as i64, d as u64).unwrap();
                assert_eq!(count_v_formula(&s), want);
                assert_eq!(BigInt::from(enumerate_v(&s).len()), want);
            }
        }
    }

    #[test]
    fn counts_agree_exhaustive_small() {
        for d in 1..=4 {
            for n in 1..=6 {
                for s in admissible_specs(d, n) {
                    let v = count_v(&s);
                    assert_eq!(BigInt::from(v), count_v_formula(&s), "{s:?}");
                    assert_eq!(count_h(&s), v, "{s:?}");
                    assert!(enumerate_h(&s).indices().contains(&mi(&vec![0; d])));
                }
            }
        }
    }

    #[test]
    fn weight_examples() {
        let s = spec(2, 3, &[2, 2, 2]);
        assert_eq!(weight(&s, &[1, 1]).unwrap(), ratio(2, 5));
        assert_eq!(weight(&s, &[1, 0]).unwrap(), ratio(1, 10));
        assert_eq!(weight(&s, &[0, 0]), Err(Error::PointOutsideDomain(vec![0, 0])));
        let total: Rational = enumerate_v(&s).points().iter().map(|x| weight(&s, x).unwrap()).sum();
        assert_eq!(total, rat(1));
    }

    #[test]
    fn weight_is_positive_and_normalized() {
        for d in 1..=3 {
            for n in 1..=5 {
                for s in admissible_specs(d, n) {
                    let mut total = rat(0);
                    for x in enumerate_v(&s).points() {
                        let w = weight(&s, x).unwrap();
                        assert!(num_traits::Signed::is_positive(&w));
                        assert_eq!(w, weight_homogeneous(s.ell(), n, &s.homogeneous(x).iter().map(|&v| v as u32).collect::<Vec<_>>()).unwrap());
                        total += w;
                    }
                    assert_eq!(total, rat(1), "{s:?}");
                }
            }
        }
    }

    #[test]
    fn reference_height_functions() {
        let s = spec(2, 9, &[7, 6, 7]);
        // the reference sequences occur with v and h exchanged
        assert_eq!(heights_v(&s).unwrap(), vec![5, 6, 7, 7, 6, 5, 4, 3]);
        assert_eq!(heights_h(&s).unwrap(), vec![7, 7, 6, 6, 5, 5, 4, 3]);
        let r = verify_shuffle(&s).unwrap();
        assert!(r.holds());
        let tau = r.permutation.unwrap();
        for (i, &t) in tau.iter().enumerate() {
            assert_eq!(r.v[t], r.h[i]);
        }
        assert_eq!(heights_v(&spec(3, 4, &[3, 3, 3, 3])), Err(Error::WrongDimension { expected: 2, got: 3 }));
    }

    #[test]
    fn shuffle_exhaustive() {
        for n in 1..=15 {
            for s in admissible_specs(2, n) {
                let r = verify_shuffle(&s).unwrap();
                assert!(r.shuffle, "{s:?}");
                assert!(r.partition_v && r.partition_h, "{s:?} {r:?}");
            }
        }
        assert!(verify_shuffle(&spec(2, 6, &[4, 4, 2])).unwrap().holds());
        assert!(verify_shuffle(&spec(2, 3, &[2, 2, 2])).unwrap().holds());
    }

    #[test]
    fn counting_lemma_examples() {
        // k = 1: l = (3, 5, 4, 4), N = 5 -> binom(5 - 3 + 1, 2) = 3
        let r = verify_counting_lemmas(3, 5, &[3, 5, 4, 4]).unwrap();
        assert_eq!(r.steps.len(), 1);
        assert_eq!(r.steps[0].k, 1);
        assert_eq!(r.steps[0].expected, 3);
        assert!(r.holds());
        // k = 2 step with l_1 = N
        let r = verify_counting_lemmas(3, 5, &[5, 3, 4, 4]).unwrap();
        assert_eq!(r.steps[0].k, 2);
        assert_eq!(r.steps[0].expected, 3);
        assert!(r.holds());
        // l_1 = l_2 = N: only the base case applies
        let r = verify_counting_lemmas(3, 5, &[5, 5, 3, 4]).unwrap();
        assert!(r.steps.is_empty());
        assert_eq!(r.base_cases.len(), 1);
        assert!(r.holds());
        assert!(matches!(verify_counting_lemmas(2, 5, &[5, 5, 5]), Err(Error::WrongDimension { .. })));
    }

    #[test]
    fn ideal_generators() {
        assert!(ideal_generators_vanish(&spec(2, 3, &[2, 2, 2])));
        for d in 1..=3 {
            for n in 1..=5 {
                for s in admissible_specs(d, n) {
                    assert!(ideal_generators_vanish(&s), "{s:?}");
                }
            }
        }
    }
}
