//! Truncated Heisenberg Fock modules in an orthonormal color frame.
//!
//! A module of dimension `d` at cutoff `E` has the basis of `d`-colored
//! partitions of total size at most `E`. The color-`j` mode `v_j(-m)` appends
//! a part `m`, `v_j(m)` for `m > 0` removes one (with factor `m` times the
//! multiplicity), and `v_j(0)` is the `j`-th weight coordinate.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::dot;
use crate::report::{Check, Report, Witness};
use crate::scalar::{RealScalar, Scalar};

pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("basis would need {needed} states, above the budget of {budget}")]
    CutoffTooLarge { needed: usize, budget: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Chiral,
    Antichiral,
}

/// Parts per color, each list descending.
pub type State = Vec<Vec<u32>>;

#[derive(Debug)]
pub struct FockBasis {
    pub colors: usize,
    pub cutoff: usize,
    states: Vec<State>,
    energies: Vec<usize>,
    index: HashMap<State, usize>,
    grade_start: Vec<usize>,
}

fn partitions(n: u32, max: u32, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
    if n == 0 {
        out.push(cur.clone());
        return;
    }
    for p in (1..=max.min(n)).rev() {
        cur.push(p);
        partitions(n - p, p, out, cur);
        cur.pop();
    }
}

fn partitions_of(n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    partitions(n, n, &mut out, &mut Vec::new());
    out
}

/// Number of `d`-colored partitions of `0..=e`, by the standard recurrence.
pub fn colored_partition_counts(d: usize, e: usize) -> Vec<u128> {
    // coefficients of Π (1 - q^n)^{-d}
    let mut c = vec![0u128; e + 1];
    c[0] = 1;
    for _ in 0..d {
        for n in 1..=e {
            for k in n..=e {
                c[k] += c[k - n];
            }
        }
    }
    c
}

impl FockBasis {
    pub fn new(colors: usize, cutoff: usize, budget: usize) -> Result<Self, FockError> {
        let needed: u128 = colored_partition_counts(colors, cutoff).iter().sum();
        if needed > budget as u128 {
            return Err(FockError::CutoffTooLarge { needed: needed.min(usize::MAX as u128) as usize, budget });
        }
        let parts: Vec<Vec<Vec<u32>>> = (0..=cutoff as u32).map(partitions_of).collect();
        let mut states = Vec::new();
        let mut energies = Vec::new();
        let mut grade_start = Vec::new();
        for n in 0..=cutoff {
            grade_start.push(states.len());
            let mut grade: Vec<State> = Vec::new();
            colored(colors, n, &parts, &mut Vec::new(), &mut grade);
            grade.sort();
            energies.extend(std::iter::repeat(n).take(grade.len()));
            states.extend(grade);
        }
        grade_start.push(states.len());
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(FockBasis { colors, cutoff, states, energies, index, grade_start })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &State {
        &self.states[i]
    }

    pub fn energy(&self, i: usize) -> usize {
        self.energies[i]
    }

    pub fn index_of(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn grade(&self, n: usize) -> std::ops::Range<usize> {
        self.grade_start[n]..self.grade_start[n + 1]
    }

    pub fn grade_dimensions(&self) -> Vec<usize> {
        (0..=self.cutoff).map(|n| self.grade(n).len()).collect()
    }

    /// Number of parts in state `i`.
    pub fn particle_number(&self, i: usize) -> usize {
        self.states[i].iter().map(Vec::len).sum()
    }

    /// Indices with energy at most `e`.
    pub fn window(&self, e: i64) -> std::ops::Range<usize> {
        if e < 0 {
            return 0..0;
        }
        let e = (e as usize).min(self.cutoff);
        0..self.grade_start[e + 1]
    }

    /// `v_j(a)` on basis state `i`, without the zero-mode case.
    fn apply(&self, j: usize, a: i64, i: usize) -> Option<(usize, u64)> {
        let s = &self.states[i];
        if a < 0 {
            let m = (-a) as u32;
            if self.energies[i] + m as usize > self.cutoff {
                return None;
            }
            let mut t = s.clone();
            let pos = t[j].iter().position(|&p| p < m).unwrap_or(t[j].len());
            t[j].insert(pos, m);
            Some((self.index[&t], 1))
        } else {
            let m = a as u32;
            let k = s[j].iter().filter(|&&p| p == m).count() as u64;
            if k == 0 {
                return None;
            }
            let mut t = s.clone();
            let pos = t[j].iter().position(|&p| p == m).expect("part present");
            t[j].remove(pos);
            Some((self.index[&t], m as u64 * k))
        }
    }
}

fn colored(d: usize, n: usize, parts: &[Vec<Vec<u32>>], cur: &mut State, out: &mut Vec<State>) {
    if d == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if cur.len() == d - 1 {
        let mut s = cur.clone();
        s.push(Vec::new());
        for p in &parts[n] {
            s[d - 1] = p.clone();
            out.push(s.clone());
        }
        return;
    }
    for k in 0..=n {
        for p in &parts[k] {
            cur.push(p.clone());
            colored(d, n - k, parts, cur, out);
            cur.pop();
        }
    }
}

/// `M(1, λ)` truncated at cutoff `E`, with `weight` the coordinates of `λ`.
#[derive(Clone, Debug)]
pub struct FockModule<F> {
    pub side: Side,
    pub basis: Arc<FockBasis>,
    pub weight: Vec<F>,
    gram: Vec<F>,
}

pub fn build_module<F: RealScalar>(d: usize, weight: Vec<F>, cutoff: usize) -> Result<FockModule<F>, FockError> {
    build_module_with(Side::Chiral, d, weight, cutoff, DEFAULT_STATE_BUDGET)
}

pub fn build_module_with<F: RealScalar>(
    side: Side,
    d: usize,
    weight: Vec<F>,
    cutoff: usize,
    budget: usize,
) -> Result<FockModule<F>, FockError> {
    let basis = Arc::new(FockBasis::new(d, cutoff, budget)?);
    Ok(FockModule::on_basis(side, basis, weight))
}

impl<F: RealScalar> FockModule<F> {
    /// A module sharing an existing basis.
    pub fn on_basis(side: Side, basis: Arc<FockBasis>, weight: Vec<F>) -> Self {
        assert_eq!(weight.len(), basis.colors);
        let gram = pushed_norms(&basis);
        FockModule { side, basis, weight, gram }
    }

    pub fn dim(&self) -> usize {
        self.basis.colors
    }

    pub fn cutoff(&self) -> usize {
        self.basis.cutoff
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `⟨s, s⟩` for basis state `s`; distinct basis states are orthogonal.
    pub fn norm_squared(&self, i: usize) -> F {
        self.gram[i].clone()
    }

    /// Gram block of grade `n` (diagonal).
    pub fn gram_block(&self, n: usize) -> Vec<Vec<F>> {
        let r = self.basis.grade(n);
        r.clone()
            .map(|i| r.clone().map(|j| if i == j { self.gram[i].clone() } else { F::zero() }).collect())
            .collect()
    }

    /// `‖v‖²` of a vector given as sparse coefficients.
    pub fn vector_norm_squared(&self, v: &[(usize, F)]) -> F {
        v.iter().fold(F::zero(), |s, (i, c)| s + self.gram[*i].clone() * c.clone() * c.clone())
    }

    /// `(α, λ)`.
    pub fn zero_mode(&self, alpha: &[F]) -> F {
        dot(alpha, &self.weight)
    }

    /// Same module data with a different weight.
    pub fn with_weight(&self, weight: Vec<F>) -> Self {
        FockModule { side: self.side, basis: self.basis.clone(), weight, gram: self.gram.clone() }
    }
}

/// Norms from `⟨Ω,Ω⟩ = 1` by moving the leading creator across as an
/// annihilator: `⟨v(-m)u, s⟩ = ⟨u, v(m)s⟩`.
fn pushed_norms<F: RealScalar>(b: &FockBasis) -> Vec<F> {
    let mut out: Vec<F> = Vec::with_capacity(b.len());
    for i in 0..b.len() {
        let s = b.state(i);
        let Some(j) = s.iter().position(|p| !p.is_empty()) else {
            out.push(F::one());
            continue;
        };
        let m = s[j][0] as i64;
        let (u, c) = b.apply(j, m, i).expect("part present");
        out.push(out[u].clone() * F::from_int(c as i64));
    }
    out
}

// ---------------------------------------------------------------------------
// Operators

/// A sparse operator on a truncated basis. Matrix elements in columns with
/// energy `<= cutoff - band` equal those of the untruncated operator.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedOperator<F> {
    /// Smallest and largest energy change among the components.
    pub min_shift: i64,
    pub max_shift: i64,
    pub band: usize,
    cols: Vec<Vec<(usize, F)>>,
}

impl<F: Scalar> GradedOperator<F> {
    pub fn zero(n: usize, shift: i64) -> Self {
        GradedOperator { min_shift: shift, max_shift: shift, band: 0, cols: vec![Vec::new(); n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| F::one()).collect())
    }

    pub fn diagonal(d: Vec<F>) -> Self {
        let cols = d
            .into_iter()
            .enumerate()
            .map(|(i, x)| if x.is_zero() { vec![] } else { vec![(i, x)] })
            .collect();
        GradedOperator { min_shift: 0, max_shift: 0, band: 0, cols }
    }

    /// A homogeneous operator from its columns.
    pub fn from_columns(shift: i64, band: usize, cols: Vec<Vec<(usize, F)>>) -> Self {
        let mut op = GradedOperator { min_shift: shift, max_shift: shift, band, cols };
        op.normalize();
        op
    }

    fn normalize(&mut self) {
        for c in self.cols.iter_mut() {
            c.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, F)> = Vec::with_capacity(c.len());
            for (r, v) in c.drain(..) {
                match merged.last_mut() {
                    Some((lr, lv)) if *lr == r => *lv = lv.clone() + v,
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            *c = merged;
        }
    }

    pub fn size(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, F)] {
        &self.cols[j]
    }

    pub fn entry(&self, i: usize, j: usize) -> F {
        self.cols[j]
            .binary_search_by_key(&i, |e| e.0)
            .map(|k| self.cols[j][k].1.clone())
            .unwrap_or_else(|_| F::zero())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.min_shift == self.max_shift
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    fn combine(&self, o: &Self, s: F) -> Self {
        assert_eq!(self.size(), o.size());
        let cols = self
            .cols
            .iter()
            .zip(&o.cols)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.extend(b.iter().map(|(r, v)| (*r, s.clone() * v.clone())));
                c
            })
            .collect();
        let mut out = GradedOperator {
            min_shift: self.min_shift.min(o.min_shift),
            max_shift: self.max_shift.max(o.max_shift),
            band: self.band.max(o.band),
            cols,
        };
        out.normalize();
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, F::one())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, -F::one())
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut out = self.clone();
        for c in out.cols.iter_mut() {
            for e in c.iter_mut() {
                e.1 = e.1.clone() * s.clone();
            }
        }
        out.normalize();
        out
    }

    /// `self ∘ other`. The band is the smallest one guaranteed by the factors:
    /// `other` must be exact on the column and `self` on its image.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.size(), other.size());
        let cols = other
            .cols
            .par_iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, F> = BTreeMap::new();
                for (k, b) in col {
                    for (i, a) in &self.cols[*k] {
                        let v = a.clone() * b.clone();
                        let e = acc.entry(*i).or_insert_with(F::zero);
                        *e = e.clone() + v;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        let band = (other.band as i64).max(self.band as i64 + other.max_shift).max(0) as usize;
        GradedOperator {
            min_shift: self.min_shift + other.min_shift,
            max_shift: self.max_shift + other.max_shift,
            band,
            cols,
        }
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.compose(o).sub(&o.compose(self))
    }

    /// Applies the operator to a sparse vector.
    pub fn apply(&self, v: &[(usize, F)]) -> Vec<(usize, F)> {
        let mut acc: BTreeMap<usize, F> = BTreeMap::new();
        for (k, b) in v {
            for (i, a) in &self.cols[*k] {
                let e = acc.entry(*i).or_insert_with(F::zero);
                *e = e.clone() + a.clone() * b.clone();
            }
        }
        acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> GradedOperator<G> {
        let mut out = GradedOperator {
            min_shift: self.min_shift,
            max_shift: self.max_shift,
            band: self.band,
            cols: self.cols.iter().map(|c| c.iter().map(|(i, v)| (*i, f(v))).collect()).collect(),
        };
        out.normalize();
        out
    }

    pub fn with_band(mut self, band: usize) -> Self {
        self.band = band;
        self
    }

    /// First `(row, column)` where the two differ, over columns with energy
    /// `<= cutoff - max(band)`.
    pub fn diff_on_window(&self, o: &Self, basis: &FockBasis) -> Option<(usize, usize)> {
        self.diff_on_window_margin(o, basis, 0)
    }

    pub fn diff_on_window_margin(&self, o: &Self, basis: &FockBasis, margin: usize) -> Option<(usize, usize)> {
        let band = self.band.max(o.band) + margin;
        let w = basis.window(basis.cutoff as i64 - band as i64);
        w.into_iter().find_map(|j| {
            let (a, b) = (&self.cols[j], &o.cols[j]);
            let mut ia = a.iter().peekable();
            let mut ib = b.iter().peekable();
            loop {
                match (ia.peek(), ib.peek()) {
                    (None, None) => return None,
                    (Some(x), None) => return Some((x.0, j)),
                    (None, Some(y)) => return Some((y.0, j)),
                    (Some(x), Some(y)) => {
                        if x.0 < y.0 {
                            if !x.1.is_negligible() {
                                return Some((x.0, j));
                            }
                            ia.next();
                        } else if y.0 < x.0 {
                            if !y.1.is_negligible() {
                                return Some((y.0, j));
                            }
                            ib.next();
                        } else {
                            if !x.1.approx_eq(&y.1) {
                                return Some((x.0, j));
                            }
                            ia.next();
                            ib.next();
                        }
                    }
                }
            }
        })
    }

    /// Number of columns inside the validity window.
    pub fn window_len(&self, basis: &FockBasis) -> usize {
        basis.window(basis.cutoff as i64 - self.band as i64).len()
    }
}

fn color_mode<F: RealScalar>(m: &FockModule<F>, j: usize, a: i64) -> GradedOperator<F> {
    let b = &m.basis;
    if a == 0 {
        return GradedOperator::identity(b.len()).scale(&m.weight[j]);
    }
    let cols = (0..b.len())
        .map(|i| b.apply(j, a, i).map(|(t, c)| vec![(t, F::from_int(c as i64))]).unwrap_or_default())
        .collect();
    GradedOperator::from_columns(-a, (-a).max(0) as usize, cols)
}

/// `α(m) = Σ α_j v_j(m)`; the zero mode acts as `(α, λ)`.
pub fn mode_operator<F: RealScalar>(m: &FockModule<F>, alpha: &[F], mode: i64) -> GradedOperator<F> {
    assert_eq!(alpha.len(), m.dim());
    let n = m.len();
    if mode == 0 {
        return GradedOperator::identity(n).scale(&m.zero_mode(alpha));
    }
    let mut out = GradedOperator::zero(n, -mode).with_band((-mode).max(0) as usize);
    for (j, aj) in alpha.iter().enumerate() {
        if !aj.is_zero() {
            out = out.add(&color_mode(m, j, mode).scale(aj));
        }
    }
    out
}

/// `L_m = ½ Σ_j Σ_k :v_j(m-k) v_j(k):`, annihilators to the right.
pub fn sugawara<F: RealScalar>(m: &FockModule<F>, mode: i64) -> GradedOperator<F> {
    let b = &m.basis;
    let e = b.cutoff as i64;
    let half = F::from_rational(&crate::scalar::rat(1, 2));
    let cols: Vec<Vec<(usize, F)>> = (0..b.len())
        .into_par_iter()
        .map(|i| {
            let mut acc: BTreeMap<usize, F> = BTreeMap::new();
            let mut push = |t: usize, c: F| {
                let x = acc.entry(t).or_insert_with(F::zero);
                *x = x.clone() + c;
            };
            for j in 0..b.colors {
                let w = &m.weight[j];
                for k in -(e + mode.abs())..=(e + mode.abs()) {
                    let (lo, hi) = if k <= mode - k { (k, mode - k) } else { (mode - k, k) };
                    let step = |a: i64, src: usize| -> Option<(usize, F)> {
                        if a == 0 {
                            (!w.is_zero()).then(|| (src, w.clone()))
                        } else {
                            b.apply(j, a, src).map(|(t, c)| (t, F::from_int(c as i64)))
                        }
                    };
                    let Some((t1, c1)) = step(hi, i) else { continue };
                    let Some((t2, c2)) = step(lo, t1) else { continue };
                    push(t2, half.clone() * c1 * c2);
                }
            }
            acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
        })
        .collect();
    GradedOperator::from_columns(-mode, (-mode).max(0) as usize, cols)
}

/// `(-1)^{#parts}` on each basis state.
pub fn parity_operator<F: RealScalar>(m: &FockModule<F>) -> GradedOperator<F> {
    GradedOperator::diagonal(
        (0..m.len())
            .map(|i| if m.basis.particle_number(i) % 2 == 0 { F::one() } else { -F::one() })
            .collect(),
    )
}

/// `α(f) = Σ f_m α(m)` for a finitely supported coefficient map.
pub fn smear_field<F: RealScalar, C: Scalar>(
    m: &FockModule<F>,
    alpha: &[F],
    coeffs: &BTreeMap<i64, C>,
    lift: impl Fn(&F) -> C,
) -> GradedOperator<C> {
    let n = m.len();
    let mut out: Option<GradedOperator<C>> = None;
    for (&k, f) in coeffs {
        assert!(k.unsigned_abs() as usize <= m.cutoff(), "test function not band-limited to the cutoff");
        if f.is_zero() {
            continue;
        }
        let term = mode_operator(m, alpha, k).map(&lift).scale(f);
        out = Some(match out {
            None => term,
            Some(o) => o.add(&term),
        });
    }
    out.unwrap_or_else(|| GradedOperator::zero(n, 0))
}

/// `(α,β) Σ_m m f_m g_{-m}`.
pub fn smeared_commutator_constant<C: Scalar>(pairing: &C, f: &BTreeMap<i64, C>, g: &BTreeMap<i64, C>) -> C {
    f.iter()
        .filter_map(|(&k, fk)| g.get(&-k).map(|gk| C::from_int(k) * fk.clone() * gk.clone()))
        .fold(C::zero(), |s, t| s + t)
        * pairing.clone()
}

fn state_label(b: &FockBasis, i: usize) -> String {
    let parts: Vec<String> = b
        .state(i)
        .iter()
        .map(|p| p.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", parts.join("|"))
}

pub fn window_witness(b: &FockBasis, (r, c): (usize, usize)) -> Witness {
    Witness::new()
        .with("row", state_label(b, r))
        .with("column", state_label(b, c))
}

fn unit<F: Scalar>(d: usize, j: usize) -> Vec<F> {
    (0..d).map(|i| if i == j { F::one() } else { F::zero() }).collect()
}

/// Heisenberg, `[L_m, α(n)]`, Virasoro and adjointness relations on the
/// validity window, for modes `|m|, |n| <= max_mode`.
pub fn verify_algebra_relations<F: RealScalar>(m: &FockModule<F>, max_mode: i64) -> Report {
    let mut rep = Report::new("fock");
    let b = &*m.basis;
    let d = m.dim();
    let n = m.len();
    let id = GradedOperator::<F>::identity(n);
    let modes: Vec<i64> = (-max_mode..=max_mode).collect();
    let cache_l: BTreeMap<i64, GradedOperator<F>> =
        (-2 * max_mode..=2 * max_mode).map(|k| (k, sugawara(m, k))).collect();
    let cache_a: BTreeMap<(usize, i64), GradedOperator<F>> = (0..d)
        .flat_map(|j| (-2 * max_mode..=2 * max_mode).map(move |k| (j, k)))
        .map(|(j, k)| ((j, k), mode_operator(m, &unit(d, j), k)))
        .collect();

    let pairs: Vec<(i64, i64)> = modes.iter().flat_map(|&a| modes.iter().map(move |&c| (a, c))).collect();

    // [v_i(p), v_j(q)] = p δ_{ij} δ_{p,-q}
    let heis = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .flat_map(|(i, j)| pairs.iter().map(move |&(p, q)| (i, j, p, q)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .find_map_first(|(i, j, p, q)| {
            let lhs = cache_a[&(i, p)].commutator(&cache_a[&(j, q)]);
            let rhs = if i == j && p == -q { id.scale(&F::from_int(p)) } else { GradedOperator::zero(n, 0) };
            lhs.diff_on_window(&rhs, b).map(|w| {
                window_witness(b, w)
                    .with("colors", format!("({i},{j})"))
                    .with("modes", format!("({p},{q})"))
            })
        });
    rep.push(Check::from_witness("heisenberg", "heisenberg", heis));

    // [L_p, v_j(q)] = -q v_j(p+q)
    let lj = (0..d)
        .flat_map(|j| pairs.iter().map(move |&(p, q)| (j, p, q)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .find_map_first(|(j, p, q)| {
            let lhs = cache_l[&p].commutator(&cache_a[&(j, q)]);
            let rhs = cache_a[&(j, p + q)].scale(&F::from_int(-q));
            lhs.diff_on_window(&rhs, b).map(|w| {
                window_witness(b, w).with("color", j).with("modes", format!("({p},{q})"))
            })
        });
    rep.push(Check::from_witness("L-current", "sugawara", lj));

    // [L_p, L_q] = (p-q) L_{p+q} + d/12 p(p²-1) δ_{p,-q}
    let vir = pairs.par_iter().find_map_first(|&(p, q)| {
        let lhs = cache_l[&p].commutator(&cache_l[&q]);
        let mut rhs = cache_l[&(p + q)].scale(&F::from_int(p - q));
        if p + q == 0 {
            let c = F::from_rational(&crate::scalar::rat((d as i128) * (p * (p * p - 1)) as i128, 12));
            rhs = rhs.add(&id.scale(&c));
        }
        lhs.diff_on_window(&rhs, b).map(|w| window_witness(b, w).with("modes", format!("({p},{q})")))
    });
    rep.push(Check::from_witness("virasoro", "virasoro", vir));

    // ⟨u, A v⟩ = ⟨A* u, v⟩ with v_j(p)* = v_j(-p), L_p* = L_{-p}
    let adj_pair = |a: &GradedOperator<F>, astar: &GradedOperator<F>| -> Option<(usize, usize)> {
        let w = b.window(b.cutoff as i64 - a.band.max(astar.band) as i64);
        for v in w.clone() {
            for u in w.clone() {
                let l = m.norm_squared(u) * a.entry(u, v);
                let r = m.norm_squared(v) * astar.entry(v, u);
                if !l.approx_eq(&r) {
                    return Some((u, v));
                }
            }
        }
        None
    };
    let adj = (0..d)
        .flat_map(|j| modes.iter().map(move |&p| (j, p)))
        .find_map(|(j, p)| {
            adj_pair(&cache_a[&(j, p)], &cache_a[&(j, -p)])
                .map(|w| window_witness(b, w).with("color", j).with("mode", p))
        })
        .or_else(|| {
            modes.iter().find_map(|&p| {
                adj_pair(&cache_l[&p], &cache_l[&-p]).map(|w| window_witness(b, w).with("virasoro-mode", p))
            })
        });
    rep.push(Check::from_witness("adjoint", "adjoint", adj));

    if max_mode >= 2 && m.weight.iter().all(Scalar::is_zero) {
        let c = cache_l[&2].commutator(&cache_l[&-2]).entry(0, 0);
        let want = F::from_rational(&crate::scalar::rat(d as i128, 2));
        let w = (!c.approx_eq(&want)).then(|| Witness::new().with("vacuum-expectation", &c).with("expected", &want));
        rep.push(Check::from_witness("central-term", "virasoro", w));
    }
    rep
}

/// Squares of both sides of `‖α(m)Ψ‖ <= ‖α‖ (|m|+1) ‖(L_0+1)Ψ‖` on basis
/// states of the validity window.
pub fn energy_bound_violation<F: RealScalar>(m: &FockModule<F>, alpha: &[F], mode: i64) -> Option<Witness> {
    let a = mode_operator(m, alpha, mode);
    let l0 = sugawara(m, 0);
    let norm_a = dot(alpha, alpha);
    let k = F::from_int(mode.abs() + 1);
    let b = &*m.basis;
    b.window(b.cutoff as i64 - a.band as i64).find_map(|i| {
        let lhs = m.vector_norm_squared(a.column(i));
        let shifted: Vec<(usize, F)> = l0
            .add(&GradedOperator::identity(m.len()))
            .column(i)
            .to_vec();
        let rhs = norm_a.clone() * k.clone() * k.clone() * m.vector_norm_squared(&shifted);
        (lhs.to_f64() > rhs.to_f64() * (1.0 + 1e-12))
            .then(|| Witness::new().with("state", state_label(b, i)).with("mode", mode).with("lhs2", &lhs).with("rhs2", &rhs))
    })
}

pub fn verify_energy_bounds<F: RealScalar>(m: &FockModule<F>, alphas: &[Vec<F>], max_mode: i64) -> Report {
    let mut rep = Report::new("fock");
    let w = alphas
        .iter()
        .flat_map(|a| (-max_mode..=max_mode).map(move |k| (a, k)))
        .find_map(|(a, k)| energy_bound_violation(m, a, k));
    rep.push(Check::from_witness("energy-bound", "energy-bound", w));
    rep
}

/// `V² = 1`, `V α(m) V = -α(m)` and `V L_m V = L_m - 2 λ(m)` (`m ≠ 0`).
pub fn verify_parity<F: RealScalar>(m: &FockModule<F>, max_mode: i64) -> Report {
    let mut rep = Report::new("fock");
    let b = &*m.basis;
    let v = parity_operator(m);
    let id = GradedOperator::identity(m.len());
    rep.push(Check::from_witness(
        "parity-square",
        "parity",
        v.compose(&v).diff_on_window(&id, b).map(|w| window_witness(b, w)),
    ));
    let d = m.dim();
    let odd = (0..d)
        .flat_map(|j| (-max_mode..=max_mode).filter(|&k| k != 0).map(move |k| (j, k)))
        .find_map(|(j, k)| {
            let a = mode_operator(m, &unit(d, j), k);
            v.compose(&a).compose(&v).diff_on_window(&a.scale(&-F::one()), b).map(|w| window_witness(b, w).with("mode", k))
        });
    rep.push(Check::from_witness("parity-current", "parity", odd));
    let even = (-max_mode..=max_mode).find_map(|k| {
        let l = sugawara(m, k);
        let want = if k == 0 {
            l.clone()
        } else {
            l.sub(&mode_operator(m, &m.weight, k).scale(&F::from_int(2)))
        };
        v.compose(&l).compose(&v).diff_on_window(&want, b).map(|w| window_witness(b, w).with("mode", k))
    });
    rep.push(Check::from_witness("parity-virasoro", "parity", even));
    rep
}
