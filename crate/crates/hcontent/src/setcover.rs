//! Weighted set cover: greedy upper bound and depth-first branch and bound.
//!
//! Lower bounds come from a dual-feasible price vector (each uncovered element
//! pays `w(S)/|S ∩ U|` for its cheapest set) combined with an optional
//! instance-specific bound supplied by the caller.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n_elems: usize,
    /// Sorted element lists.
    pub sets: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
    /// All weights are integers, so bounds may be rounded up.
    pub integral: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub chosen: Vec<usize>,
    pub upper: f64,
    pub lower: f64,
    pub optimal: bool,
    pub nodes: u64,
    pub root_dual: f64,
}

type Bits = Vec<u64>;

fn bits_from(elems: &[usize], words: usize) -> Bits {
    let mut b = vec![0u64; words];
    for &e in elems {
        b[e / 64] |= 1 << (e % 64);
    }
    b
}

fn count(b: &[u64]) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn iter_bits(b: &[u64]) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            }
        })
    })
}

impl Instance {
    pub fn coverable(&self) -> bool {
        let mut hit = vec![false; self.n_elems];
        for s in &self.sets {
            for &e in s {
                hit[e] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    pub fn cost(&self, chosen: &[usize]) -> f64 {
        chosen.iter().map(|&i| self.weights[i]).sum()
    }

    pub fn covers(&self, chosen: &[usize]) -> bool {
        let mut hit = vec![false; self.n_elems];
        for &i in chosen {
            for &e in &self.sets[i] {
                hit[e] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }
}

/// Indices of sets that survive duplicate and dominance removal.
///
/// A set is dropped when another set covers a superset of its elements at no
/// greater weight; ties keep the lower index.
pub fn undominated(inst: &Instance, max_pairs: usize) -> Vec<usize> {
    let words = inst.n_elems.div_ceil(64).max(1);
    let mut by_key: BTreeMap<&Vec<usize>, usize> = BTreeMap::new();
    for (i, s) in inst.sets.iter().enumerate() {
        if s.is_empty() {
            continue;
        }
        by_key
            .entry(s)
            .and_modify(|j| {
                if inst.weights[i] < inst.weights[*j] {
                    *j = i;
                }
            })
            .or_insert(i);
    }
    let mut keep: Vec<usize> = by_key.into_values().collect();
    keep.sort_unstable();
    if keep.len() * keep.len() > max_pairs {
        return keep;
    }
    let bits: Vec<Bits> = keep.iter().map(|&i| bits_from(&inst.sets[i], words)).collect();
    let sizes: Vec<usize> = keep.iter().map(|&i| inst.sets[i].len()).collect();
    let mut alive = vec![true; keep.len()];
    for a in 0..keep.len() {
        for b in 0..keep.len() {
            if a == b || !alive[b] || sizes[b] < sizes[a] {
                continue;
            }
            let (wa, wb) = (inst.weights[keep[a]], inst.weights[keep[b]]);
            if wb <= wa && is_subset(&bits[a], &bits[b]) && (sizes[b] > sizes[a] || wb < wa) {
                alive[a] = false;
                break;
            }
        }
    }
    keep.into_iter()
        .zip(alive)
        .filter_map(|(i, a)| a.then_some(i))
        .collect()
}

/// Best-ratio greedy cover followed by redundant-set removal. `None` if uncoverable.
pub fn greedy(inst: &Instance) -> Option<Vec<usize>> {
    if !inst.coverable() {
        return None;
    }
    let words = inst.n_elems.div_ceil(64).max(1);
    let bits: Vec<Bits> = inst.sets.iter().map(|s| bits_from(s, words)).collect();
    let mut unc = bits_from(&(0..inst.n_elems).collect::<Vec<_>>(), words);
    let mut chosen = Vec::new();
    while count(&unc) > 0 {
        let mut best: Option<(f64, usize)> = None;
        for (i, b) in bits.iter().enumerate() {
            let c = and_count(b, &unc);
            if c == 0 {
                continue;
            }
            let r = inst.weights[i] / c as f64;
            if best.is_none_or(|(br, _)| r < br) {
                best = Some((r, i));
            }
        }
        let (_, i) = best?;
        chosen.push(i);
        for (u, b) in unc.iter_mut().zip(&bits[i]) {
            *u &= !b;
        }
    }
    prune_redundant(inst, &mut chosen);
    Some(chosen)
}

/// Drops chosen sets (heaviest first) whose elements the others already cover.
pub fn prune_redundant(inst: &Instance, chosen: &mut Vec<usize>) {
    let mut order: Vec<usize> = (0..chosen.len()).collect();
    order.sort_by(|&a, &b| {
        inst.weights[chosen[b]]
            .partial_cmp(&inst.weights[chosen[a]])
            .unwrap()
            .then(b.cmp(&a))
    });
    let mut alive = vec![true; chosen.len()];
    let mut mult = vec![0usize; inst.n_elems];
    for &i in chosen.iter() {
        for &e in &inst.sets[i] {
            mult[e] += 1;
        }
    }
    for k in order {
        let s = &inst.sets[chosen[k]];
        if s.iter().all(|&e| mult[e] > 1) {
            alive[k] = false;
            for &e in s {
                mult[e] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    for (k, &i) in chosen.iter().enumerate() {
        if alive[k] {
            out.push(i);
        }
    }
    *chosen = out;
}

struct Search<'a> {
    inst: &'a Instance,
    bits: Vec<Bits>,
    elem_sets: Vec<Vec<usize>>,
    extra: &'a dyn Fn(usize) -> f64,
    best: f64,
    best_set: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl Search<'_> {
    fn dual_bound(&self, unc: &[u64]) -> f64 {
        let counts: Vec<usize> = self.bits.iter().map(|b| and_count(b, unc)).collect();
        let mut total = 0.0;
        for e in iter_bits(unc) {
            let mut y = f64::INFINITY;
            for &s in &self.elem_sets[e] {
                let v = self.inst.weights[s] / counts[s] as f64;
                if v < y {
                    y = v;
                }
            }
            total += y;
        }
        total
    }

    fn bound(&self, unc: &[u64]) -> f64 {
        let b = self.dual_bound(unc).max((self.extra)(count(unc)));
        if self.inst.integral {
            (b - 1e-7).ceil()
        } else {
            b
        }
    }

    fn run(&mut self, unc: Bits, cost: f64, chosen: &mut Vec<usize>) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        if count(&unc) == 0 {
            if cost < self.best - 1e-12 {
                self.best = cost;
                self.best_set = chosen.clone();
            }
            return;
        }
        let slack = if self.inst.integral { 0.5 } else { 1e-12 * self.best.abs().max(1.0) };
        if cost + self.bound(&unc) >= self.best - slack {
            return;
        }
        let e = iter_bits(&unc)
            .min_by_key(|&e| (self.elem_sets[e].len(), e))
            .expect("non-empty");
        let mut cands: Vec<(f64, usize)> = self.elem_sets[e]
            .iter()
            .map(|&s| (self.inst.weights[s] / and_count(&self.bits[s], &unc) as f64, s))
            .collect();
        cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for (_, s) in cands {
            let w = self.inst.weights[s];
            if cost + w >= self.best - slack {
                continue;
            }
            let next: Bits = unc.iter().zip(&self.bits[s]).map(|(u, b)| u & !b).collect();
            chosen.push(s);
            self.run(next, cost + w, chosen);
            chosen.pop();
            if self.aborted {
                return;
            }
        }
    }
}

/// Exact minimum-weight cover within a node budget.
///
/// `extra(k)` must be a valid lower bound for covering any `k` uncovered
/// elements; `root_lower` is an additional bound valid for the whole instance.
pub fn solve(
    inst: &Instance,
    budget: u64,
    extra: &dyn Fn(usize) -> f64,
    root_lower: f64,
) -> Option<Outcome> {
    let start = greedy(inst)?;
    let words = inst.n_elems.div_ceil(64).max(1);
    let bits: Vec<Bits> = inst.sets.iter().map(|s| bits_from(s, words)).collect();
    let mut elem_sets = vec![Vec::new(); inst.n_elems];
    for (i, s) in inst.sets.iter().enumerate() {
        for &e in s {
            elem_sets[e].push(i);
        }
    }
    let upper0 = inst.cost(&start);
    let mut search = Search {
        inst,
        bits,
        elem_sets,
        extra,
        best: upper0,
        best_set: start,
        nodes: 0,
        budget,
        aborted: false,
    };
    let all = bits_from(&(0..inst.n_elems).collect::<Vec<_>>(), words);
    let root_dual = search.dual_bound(&all);
    let mut root = root_dual.max(extra(inst.n_elems)).max(root_lower);
    if inst.integral {
        root = (root - 1e-7).ceil();
    }
    let optimal;
    if root >= search.best - if inst.integral { 0.5 } else { 1e-12 * search.best.max(1.0) } {
        optimal = true;
    } else {
        let mut chosen = Vec::new();
        search.run(all, 0.0, &mut chosen);
        optimal = !search.aborted;
    }
    let mut chosen = search.best_set.clone();
    chosen.sort_unstable();
    let upper = inst.cost(&chosen);
    Some(Outcome {
        lower: if optimal { upper } else { root.min(upper) },
        upper,
        optimal,
        chosen,
        nodes: search.nodes,
        root_dual,
    })
}

/// Exhaustive search over all subsets; only for tiny instances.
pub fn brute_force(inst: &Instance) -> Option<(f64, Vec<usize>)> {
    let k = inst.sets.len();
    assert!(k <= 20, "brute force is limited to 20 sets");
    let mut best: Option<(f64, Vec<usize>)> = None;
    for mask in 0u32..(1 << k) {
        let chosen: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        if inst.covers(&chosen) {
            let c = inst.cost(&chosen);
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, chosen));
            }
        }
    }
    best
}
