//! Symbolic extremal index and multiplicity distribution.
//!
//! Near each maximal point `xi_i` every nested set `U^(k)` is a ball centred
//! at `xi_i`. Its radius follows
//!
//! ```text
//! rho_i^(0)   = eps_i(u)
//! rho_i^(k+1) = min(rho_i^(k), max_e rho_e^(k) / |(f^lag)'(xi_i)|)
//! ```
//!
//! where `e` runs over the points reached from `xi_i` after `1 <= lag <= q`
//! steps (for periodic base points the list is extended cyclically with
//! `m_{i+N} = m_i + p`). Radii are kept as exact scale classes, so the
//! limits defining `theta` and `pi(k)` reduce to ratios of dominant
//! coefficients.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::qselect::default_q;
use super::scale::{shape_class, Decay, ScaleClass, ScaleSum};
use crate::dynamics::map::PiecewiseMap;
use crate::error::{EvtError, Result};
use crate::observables::ObservableSpec;
use crate::real::rational_powi;

/// Relation of the pulled-back ball `f^-(m_j - m_i)(U(xi_j))` to `U(xi_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    /// The pullback lies strictly inside `U(xi_i)`.
    Inside,
    /// The pullback strictly contains `U(xi_i)`.
    Contains,
    /// Different orbits.
    Disjoint,
    /// Same class and constant: cannot be certified either way.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContainmentEntry {
    pub i: usize,
    /// Extended index inside the group (`j >= N` wraps to the next period).
    pub j: u64,
    pub lag: u64,
    pub pullback: ScaleClass,
    pub relation: Containment,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupTheta {
    pub weight: BigRational,
    pub theta: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EIResult {
    pub theta: BigRational,
    pub q: u64,
    /// Symbolic `mu(A^(0))`.
    pub numerator: ScaleSum,
    /// Symbolic `mu(U)`.
    pub denominator: ScaleSum,
    /// Per-point contribution to the numerator.
    pub numerator_terms: Vec<ScaleSum>,
    /// Per-point `mu(U(xi_i))`.
    pub denominator_terms: Vec<ScaleClass>,
    pub dominant_class: Decay,
    /// `I_1`: points whose ball shrinks to a smaller non-empty ball.
    pub index_set: Vec<usize>,
    /// `j_i` for every point (extended index inside its group).
    pub successors: Vec<Option<u64>>,
    pub groups: Vec<GroupTheta>,
    pub containment: Vec<ContainmentEntry>,
}

/// `pi(k) = block[(k - start) mod period] * ratio^((k - start) div period)`
/// for `k >= start`, restricted to one orbit group.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricTail {
    pub group: usize,
    pub start: usize,
    pub period: usize,
    pub ratio: BigRational,
    pub block: Vec<BigRational>,
    /// `j_{i,k+period} - j_{i,k}` on the recurrent points.
    pub index_shift: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityResult {
    /// `pi(1..=K)`.
    pub pi: Vec<BigRational>,
    pub tails: Vec<GeometricTail>,
    /// `I_k` for `k = 1..=K`.
    pub index_sets: Vec<Vec<usize>>,
    /// `j_{i,k}` for `k = 1..=K`.
    pub successor_indices: Vec<Vec<Option<u64>>>,
    /// `sum_k pi(k)`, summed in closed form.
    pub total: Option<BigRational>,
    /// `sum_k k pi(k)`, summed in closed form.
    pub mean: Option<BigRational>,
    pub dominant_class: Decay,
    group_terms: Vec<Vec<BigRational>>,
    normaliser: BigRational,
}

impl MultiplicityResult {
    /// `pi(k)` for any `k >= 1`, using the closed-form tails past the
    /// computed range.
    pub fn pi_at(&self, k: usize) -> Option<BigRational> {
        if k == 0 {
            return None;
        }
        let mut acc = BigRational::zero();
        for (g, terms) in self.group_terms.iter().enumerate() {
            if k <= terms.len() {
                acc += &terms[k - 1];
                continue;
            }
            match self.tails.iter().find(|t| t.group == g) {
                Some(t) if k >= t.start => {
                    let off = k - t.start;
                    let v = &t.block[off % t.period] * rational_powi(&t.ratio, (off / t.period) as i64);
                    acc += v;
                }
                Some(_) => return None,
                None if self.group_finite(g) => {}
                None => return None,
            }
        }
        Some(acc / &self.normaliser)
    }

    fn group_finite(&self, g: usize) -> bool {
        self.group_terms[g].last().map_or(true, |v| v.is_zero())
            && !self.tails.iter().any(|t| t.group == g)
    }
}

struct PointData {
    class: ScaleClass,
    density: BigRational,
    group: usize,
    local: usize,
}

struct Partner {
    target: usize,
    cycle: u64,
    lag: u64,
    lambda: BigRational,
}

struct GroupData {
    members: Vec<usize>,
    period: Option<u64>,
}

struct Model {
    points: Vec<PointData>,
    groups: Vec<GroupData>,
    partners: Vec<Vec<Partner>>,
    q: u64,
}

fn build_model(spec: &ObservableSpec, map: &PiecewiseMap, q: u64) -> Result<Model> {
    if !map.is_affine() {
        return Err(EvtError::Unsupported(
            "closed-form extremal index needs piecewise-affine branches; use the oracle".into(),
        ));
    }
    let mut points = Vec::new();
    let mut top: Option<BigRational> = None;
    let mut family: Option<Decay> = None;
    for p in spec.points() {
        let (class, d) = shape_class(&p.shape)?;
        if let Some(prev) = &family {
            prev.compare(&class.decay)?;
        }
        family = Some(class.decay.clone());
        if let Some(d) = d {
            if let Some(t) = &top {
                if *t != d {
                    return Err(EvtError::InconsistentEndpoints(
                        "bounded shapes with different maxima".into(),
                    ));
                }
            }
            top = Some(d);
        }
        points.push(PointData {
            class,
            density: p.density.clone(),
            group: p.group,
            local: 0,
        });
    }
    let mut groups: Vec<GroupData> = spec
        .groups()
        .iter()
        .map(|g| GroupData { members: Vec::new(), period: g.period })
        .collect();
    for (i, p) in spec.points().iter().enumerate() {
        let g = &mut groups[p.group];
        points[i].local = g.members.len();
        g.members.push(i);
    }

    let mut lambda_cache: HashMap<(usize, u64), BigRational> = HashMap::new();
    let mut lambda = |i: usize, lag: u64| -> Result<BigRational> {
        if let Some(v) = lambda_cache.get(&(i, lag)) {
            return Ok(v.clone());
        }
        let d = map.derivative_product(&spec.points()[i].location, lag)?;
        let v = d
            .exact()
            .cloned()
            .ok_or_else(|| EvtError::Unsupported("derivative product is not exact".into()))?;
        lambda_cache.insert((i, lag), v.clone());
        Ok(v)
    };

    let mut partners = Vec::with_capacity(points.len());
    for (i, p) in spec.points().iter().enumerate() {
        let g = &groups[p.group];
        let mut list = Vec::new();
        for c in 0.. {
            let base = match g.period {
                Some(per) => per * c,
                None if c == 0 => 0,
                None => break,
            };
            if base > p.offset + q {
                break;
            }
            for &t in &g.members {
                let m_e = spec.points()[t].offset + base;
                if m_e <= p.offset {
                    continue;
                }
                let lag = m_e - p.offset;
                if lag > q {
                    continue;
                }
                list.push(Partner { target: t, cycle: c, lag, lambda: lambda(i, lag)? });
            }
        }
        partners.push(list);
    }
    Ok(Model { points, groups, partners, q })
}

/// One step of the radius recursion.
struct Step {
    rho: Vec<Option<ScaleClass>>,
    /// Extended index of the ball each radius was pulled back from.
    origin: Vec<u64>,
    /// Strictly shrinking, non-empty balls.
    shrunk: Vec<usize>,
}

fn ext_index(model: &Model, point: usize, cycle: u64) -> u64 {
    let g = &model.groups[model.points[point].group];
    model.points[point].local as u64 + g.members.len() as u64 * cycle
}

fn advance(model: &Model, rho: &[Option<ScaleClass>], origin: &[u64]) -> Result<Step> {
    let n = rho.len();
    let mut next = Vec::with_capacity(n);
    let mut next_origin = Vec::with_capacity(n);
    let mut shrunk = Vec::new();
    for i in 0..n {
        let Some(cur) = &rho[i] else {
            next.push(None);
            next_origin.push(origin[i]);
            continue;
        };
        let mut best: Option<(ScaleClass, u64)> = None;
        for pt in &model.partners[i] {
            let Some(r) = &rho[pt.target] else { continue };
            let cand = r.scaled(&pt.lambda.recip());
            let g_len = model.groups[model.points[i].group].members.len() as u64;
            let cand_origin = origin[pt.target] + g_len * pt.cycle;
            match &best {
                None => best = Some((cand, cand_origin)),
                Some((b, _)) => {
                    if cand.compare(b)? == Ordering::Greater {
                        best = Some((cand, cand_origin));
                    }
                }
            }
        }
        match best {
            None => {
                next.push(None);
                next_origin.push(origin[i]);
            }
            Some((b, b_origin)) => match b.compare(cur)? {
                Ordering::Less => {
                    next.push(Some(b));
                    next_origin.push(b_origin);
                    shrunk.push(i);
                }
                Ordering::Greater => {
                    next.push(Some(cur.clone()));
                    next_origin.push(origin[i]);
                }
                Ordering::Equal => {
                    if b_origin != origin[i] {
                        return Err(EvtError::Indeterminate {
                            i,
                            j: b_origin as usize,
                            detail: format!(
                                "pulled-back radius {b} equals the current radius; R3 unverifiable"
                            ),
                        });
                    }
                    next.push(Some(cur.clone()));
                    next_origin.push(origin[i]);
                }
            },
        }
    }
    Ok(Step { rho: next, origin: next_origin, shrunk })
}

fn measure(model: &Model, rho: &[Option<ScaleClass>], group: Option<usize>) -> ScaleSum {
    let mut s = ScaleSum::new();
    let two = BigRational::from_integer(2.into());
    for (i, r) in rho.iter().enumerate() {
        if group.is_some_and(|g| model.points[i].group != g) {
            continue;
        }
        if let Some(r) = r {
            s.add_class(&r.scaled(&(&two * &model.points[i].density)));
        }
    }
    s
}

struct Trace {
    rho: Vec<Vec<Option<ScaleClass>>>,
    origin: Vec<Vec<u64>>,
    shrunk: Vec<Vec<usize>>,
}

fn trace(model: &Model, steps: usize) -> Result<Trace> {
    let rho0: Vec<Option<ScaleClass>> = model.points.iter().map(|p| Some(p.class.clone())).collect();
    let origin0: Vec<u64> = (0..model.points.len()).map(|i| ext_index(model, i, 0)).collect();
    let mut t = Trace { rho: vec![rho0], origin: vec![origin0], shrunk: vec![Vec::new()] };
    for _ in 0..steps {
        let k = t.rho.len() - 1;
        let s = advance(model, &t.rho[k], &t.origin[k])?;
        t.rho.push(s.rho);
        t.origin.push(s.origin);
        t.shrunk.push(s.shrunk);
    }
    Ok(t)
}

fn containment_table(model: &Model) -> Result<Vec<ContainmentEntry>> {
    let mut out = Vec::new();
    for (i, pd) in model.points.iter().enumerate() {
        let g = &model.groups[pd.group];
        let n = g.members.len() as u64;
        let last = match g.period {
            Some(_) => n + pd.local as u64,
            None => n - 1,
        };
        for j in pd.local as u64 + 1..=last {
            let t = g.members[(j % n) as usize];
            let cycle = j / n;
            let Some(partner) = model.partners[i].iter().find(|p| p.target == t && p.cycle == cycle) else {
                continue;
            };
            let (lag, lambda) = (partner.lag, partner.lambda.clone());
            let pullback = model.points[t].class.scaled(&lambda.recip());
            let relation = classify(&pullback, &pd.class)?;
            out.push(ContainmentEntry { i, j, lag, pullback, relation });
        }
    }
    Ok(out)
}

/// Relation between `U(xi_i)` and the pullback of `U(xi_j)`; `j` may run up
/// to `N + i` for periodic base points.
pub fn pullback_containment(spec: &ObservableSpec, map: &PiecewiseMap, i: usize, j: u64) -> Result<Containment> {
    let pts = spec.points();
    if i >= pts.len() {
        return Err(EvtError::invalid(format!("point index {i} out of range")));
    }
    let gi = pts[i].group;
    let members: Vec<usize> = (0..pts.len()).filter(|&t| pts[t].group == gi).collect();
    let n = members.len() as u64;
    let local = members.iter().position(|&t| t == i).unwrap() as u64;
    if j < n && pts[j as usize].group != gi {
        return Err(EvtError::invalid("index j must address a point of the same orbit"));
    }
    if !spec.is_correlated() && j < n && j as usize != i && pts[j as usize].group != gi {
        return Ok(Containment::Disjoint);
    }
    let period = spec.groups()[gi].period;
    if j <= local || (period.is_none() && j >= n) || (period.is_some() && j > n + local) {
        return Err(EvtError::invalid(format!("pair ({i}, {j}) is not an admissible pullback pair")));
    }
    let t = members[(j % n) as usize];
    let lag = pts[t].offset + period.unwrap_or(0) * (j / n) - pts[i].offset;
    let lambda = map
        .derivative_product(&pts[i].location, lag)?
        .exact()
        .cloned()
        .ok_or_else(|| EvtError::Unsupported("derivative product is not exact".into()))?;
    let (ci, _) = shape_class(&pts[i].shape)?;
    let (cj, _) = shape_class(&pts[t].shape)?;
    classify(&cj.scaled(&lambda.recip()), &ci)
}

fn classify(pullback: &ScaleClass, own: &ScaleClass) -> Result<Containment> {
    Ok(match pullback.compare(own)? {
        Ordering::Less => Containment::Inside,
        Ordering::Greater => Containment::Contains,
        Ordering::Equal => Containment::Indeterminate,
    })
}

fn ratio_at(num: &ScaleSum, den: &ScaleSum, d: &Decay) -> BigRational {
    num.coeff(d) / den.coeff(d)
}

/// `theta` with `q` from the default rule.
pub fn analytic_theta(spec: &ObservableSpec, map: &PiecewiseMap) -> Result<EIResult> {
    analytic_theta_q(spec, map, default_q(spec))
}

pub fn analytic_theta_q(spec: &ObservableSpec, map: &PiecewiseMap, q: u64) -> Result<EIResult> {
    let model = build_model(spec, map, q)?;
    let containment = containment_table(&model)?;
    let t = trace(&model, 1)?;
    let u0 = measure(&model, &t.rho[0], None);
    let u1 = measure(&model, &t.rho[1], None);
    let a0 = u0.sub(&u1);
    let (dom, _) = u0
        .dominant()
        .ok_or_else(|| EvtError::invalid("exceedance set is empty"))?;
    let dom = dom.clone();
    let theta = ratio_at(&a0, &u0, &dom);

    let two = BigRational::from_integer(2.into());
    let mut numerator_terms = Vec::new();
    let mut denominator_terms = Vec::new();
    for (i, p) in model.points.iter().enumerate() {
        let w = &two * &p.density;
        let mut s = ScaleSum::new();
        s.add_class(&p.class.scaled(&w));
        if let Some(r) = &t.rho[1][i] {
            s = s.sub(&{
                let mut x = ScaleSum::new();
                x.add_class(&r.scaled(&w));
                x
            });
        }
        numerator_terms.push(s);
        denominator_terms.push(p.class.scaled(&w));
    }
    let successors = (0..model.points.len())
        .map(|i| {
            (t.origin[1][i] != t.origin[0][i] || t.rho[1][i].is_none())
                .then_some(t.origin[1][i])
                .filter(|_| t.rho[1][i].is_some())
        })
        .collect();

    let mut groups = Vec::new();
    for g in 0..model.groups.len() {
        let gu0 = measure(&model, &t.rho[0], Some(g));
        let gu1 = measure(&model, &t.rho[1], Some(g));
        let ga0 = gu0.sub(&gu1);
        let weight = gu0.coeff(&dom) / u0.coeff(&dom);
        let theta_g = match gu0.dominant() {
            Some((d, _)) => ratio_at(&ga0, &gu0, d),
            None => BigRational::zero(),
        };
        groups.push(GroupTheta { weight, theta: theta_g });
    }

    Ok(EIResult {
        theta,
        q: model.q,
        numerator: a0,
        denominator: u0,
        numerator_terms,
        denominator_terms,
        dominant_class: dom,
        index_set: t.shrunk[1].clone(),
        successors,
        groups,
        containment,
    })
}

/// `pi(k)` for `k <= k_max` with `q` from the default rule.
pub fn analytic_multiplicity(spec: &ObservableSpec, map: &PiecewiseMap, k_max: usize) -> Result<MultiplicityResult> {
    analytic_multiplicity_q(spec, map, default_q(spec), k_max)
}

/// Number of recursion steps used to certify geometric tails.
const TAIL_WINDOW: usize = 6;

pub fn analytic_multiplicity_q(
    spec: &ObservableSpec,
    map: &PiecewiseMap,
    q: u64,
    k_max: usize,
) -> Result<MultiplicityResult> {
    if k_max == 0 {
        return Err(EvtError::invalid("multiplicity cutoff must be at least 1"));
    }
    let model = build_model(spec, map, q)?;
    let max_n = model.groups.iter().map(|g| g.members.len()).max().unwrap_or(1);
    let max_period = 4 * max_n;
    let work = k_max.max(max_period * (TAIL_WINDOW + 2) + 2 * max_n + 8);
    let t = trace(&model, work + 1)?;

    let mu_u: Vec<ScaleSum> = t.rho.iter().map(|r| measure(&model, r, None)).collect();
    let a0 = mu_u[0].sub(&mu_u[1]);
    let (dom, norm) = a0
        .dominant()
        .map(|(d, c)| (d.clone(), c.clone()))
        .ok_or_else(|| EvtError::invalid("mu(A^(0)) vanishes; multiplicity undefined"))?;

    // Unnormalised pi contributions per group, k = 1..=work.
    let mut group_terms = Vec::with_capacity(model.groups.len());
    for g in 0..model.groups.len() {
        let mu_g: Vec<BigRational> = t
            .rho
            .iter()
            .map(|r| measure(&model, r, Some(g)).coeff(&dom))
            .collect();
        let a_g: Vec<BigRational> = (0..=work).map(|k| &mu_g[k] - &mu_g[k + 1]).collect();
        let terms: Vec<BigRational> = (1..=work).map(|k| &a_g[k - 1] - &a_g[k]).collect();
        group_terms.push(terms);
    }

    let mut tails = Vec::new();
    let mut total = Some(BigRational::zero());
    let mut mean = Some(BigRational::zero());
    for (g, terms) in group_terms.iter().enumerate() {
        let last_nonzero = terms.iter().rposition(|v| !v.is_zero());
        let finite = match last_nonzero {
            None => true,
            Some(idx) => idx + 1 + TAIL_WINDOW * max_period < terms.len(),
        };
        if finite {
            for (k, v) in terms.iter().enumerate() {
                total = total.map(|s| s + v);
                mean = mean.map(|s| s + v * BigRational::from_integer((k as i64 + 1).into()));
            }
            continue;
        }
        match detect_tail(terms, max_period) {
            Some((start, period, ratio)) => {
                let block: Vec<BigRational> = terms[start - 1..start - 1 + period].to_vec();
                let one = BigRational::one();
                let om = &one - &ratio;
                for k in 1..start {
                    let v = &terms[k - 1];
                    total = total.map(|s| s + v);
                    mean = mean.map(|s| s + v * BigRational::from_integer((k as i64).into()));
                }
                let s_r = BigRational::from_integer((period as i64).into());
                for (off, v) in block.iter().enumerate() {
                    let k = BigRational::from_integer(((start + off) as i64).into());
                    total = total.map(|s| s + v / &om);
                    mean = mean.map(|s| s + v * (&k / &om + &s_r * &ratio / (&om * &om)));
                }
                let index_shift = shift_pattern(&model, &t, g, start, period);
                tails.push(GeometricTail { group: g, start, period, ratio, block, index_shift });
            }
            None => {
                total = None;
                mean = None;
            }
        }
    }

    let pi: Vec<BigRational> = (1..=k_max)
        .map(|k| {
            group_terms
                .iter()
                .map(|terms| terms[k - 1].clone())
                .fold(BigRational::zero(), |a, b| a + b)
                / &norm
        })
        .collect();
    let index_sets = t.shrunk[1..=k_max].to_vec();
    let successor_indices = (1..=k_max)
        .map(|k| {
            (0..model.points.len())
                .map(|i| t.rho[k][i].as_ref().map(|_| t.origin[k][i]))
                .collect()
        })
        .collect();
    let scale = |v: BigRational| v / &norm;
    Ok(MultiplicityResult {
        pi,
        tails,
        index_sets,
        successor_indices,
        total: total.map(scale),
        mean: mean.map(scale),
        dominant_class: dom,
        group_terms,
        normaliser: norm,
    })
}

/// Smallest `(period, start)` with `terms[k + period] = r * terms[k]` on the
/// whole computed range past `start`, `0 < r < 1`.
fn detect_tail(terms: &[BigRational], max_period: usize) -> Option<(usize, usize, BigRational)> {
    let n = terms.len();
    for period in 1..=max_period {
        for start in 1..n {
            if start + period * (TAIL_WINDOW + 1) > n {
                break;
            }
            let base = &terms[start - 1..start - 1 + period];
            let Some(pivot) = base.iter().position(|v| !v.is_zero()) else { continue };
            let ratio = &terms[start - 1 + period + pivot] / &base[pivot];
            if !(ratio.is_positive() && ratio < BigRational::one()) {
                continue;
            }
            let ok = (start - 1..n - period).all(|k| terms[k + period] == &ratio * &terms[k]);
            if ok {
                return Some((start, period, ratio));
            }
        }
    }
    None
}

/// Common `j_{i,k+period} - j_{i,k}` of the points still carrying a ball.
fn shift_pattern(model: &Model, t: &Trace, g: usize, start: usize, period: usize) -> Option<u64> {
    let members = &model.groups[g].members;
    let last = t.rho.len() - 1;
    let mut shift = None;
    for k in start..=last.saturating_sub(period) {
        for &i in members {
            if t.rho[k][i].is_none() || t.rho[k + period][i].is_none() {
                continue;
            }
            let d = t.origin[k + period][i].checked_sub(t.origin[k][i])?;
            match shift {
                None => shift = Some(d),
                Some(s) if s != d => return None,
                _ => {}
            }
        }
    }
    shift
}

/// `sum_i alpha_i theta_i` for uncorrelated maxima.
pub fn theta_mixed_uncorrelated(weights_and_thetas: &[(f64, f64)]) -> Result<f64> {
    let sum: f64 = weights_and_thetas.iter().map(|(a, _)| a).sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(EvtError::WeightSum { sum });
    }
    Ok(weights_and_thetas.iter().map(|(a, t)| a * t).sum())
}

/// Exact variant of [`theta_mixed_uncorrelated`].
pub fn theta_mixed_uncorrelated_exact(weights_and_thetas: &[(BigRational, BigRational)]) -> Result<BigRational> {
    let sum = weights_and_thetas
        .iter()
        .fold(BigRational::zero(), |acc, (a, _)| acc + a);
    if !sum.is_one() {
        return Err(EvtError::WeightSum { sum: crate::real::rational_to_f64(&sum) });
    }
    Ok(weights_and_thetas
        .iter()
        .fold(BigRational::zero(), |acc, (a, t)| acc + a * t))
}
