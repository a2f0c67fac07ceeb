//! Multi-indices with finite support and finite multi-index sets.
//!
//! A multi-index assigns a nonnegative exponent to every dimension
//! `1, 2, 3, …`, with only finitely many nonzero entries. Sets of
//! multi-indices carry the combinatorial structure used throughout the
//! crate: lower (downward-closed) sets, anchored sets, and the hyperbolic
//! cross `{ν : Π_{k: ν_k≠0} (ν_k + 1) ≤ n, ν_k = 0 for k ≥ n}`, which
//! contains every anchored set of cardinality at most `n`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum MultiIndexError {
    #[error("index set is not lower: {0} is missing a predecessor")]
    NotLower(MultiIndex),
    #[error("norms length {found} does not match index set cardinality {expected}")]
    NormsLengthMismatch { expected: usize, found: usize },
    #[error("malformed multi-index text {0:?}")]
    ParseError(String),
}

/// A finitely supported exponent vector. Dimensions are 1-based; only
/// nonzero exponents are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    entries: BTreeMap<u32, u32>,
}

impl MultiIndex {
    /// The zero multi-index (empty support).
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit vector `e_dim`.
    pub fn unit(dim: u32) -> Self {
        assert!(dim >= 1, "dimensions are 1-based");
        let mut entries = BTreeMap::new();
        entries.insert(dim, 1);
        Self { entries }
    }

    /// Builds a multi-index from `(dimension, exponent)` pairs. Zero
    /// exponents are dropped; duplicate dimensions are summed.
    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Self {
        let mut entries = BTreeMap::new();
        for (dim, exp) in pairs {
            assert!(dim >= 1, "dimensions are 1-based");
            if exp > 0 {
                *entries.entry(dim).or_insert(0) += exp;
            }
        }
        Self { entries }
    }

    /// Builds a multi-index from a dense exponent vector for dimensions
    /// `1..=exps.len()`.
    pub fn from_dense(exps: &[u32]) -> Self {
        Self::from_pairs(
            exps.iter()
                .enumerate()
                .map(|(i, &e)| (i as u32 + 1, e)),
        )
    }

    pub fn exponent(&self, dim: u32) -> u32 {
        self.entries.get(&dim).copied().unwrap_or(0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.entries.iter().map(|(&d, &e)| (d, e))
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    /// `‖ν‖_0`, the number of nonzero entries.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// `‖ν‖_1`, the total degree.
    pub fn total_degree(&self) -> u64 {
        self.entries.values().map(|&e| e as u64).sum()
    }

    /// Largest dimension in the support, or 0 for the zero index.
    pub fn max_dim(&self) -> u32 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns `Some(j)` when the index equals `e_j`.
    pub fn as_unit(&self) -> Option<u32> {
        if self.entries.len() == 1 {
            let (&d, &e) = self.entries.iter().next().unwrap();
            if e == 1 {
                return Some(d);
            }
        }
        None
    }

    /// Componentwise `self ≤ other`.
    pub fn leq(&self, other: &Self) -> bool {
        self.pairs().all(|(d, e)| e <= other.exponent(d))
    }

    pub fn plus_unit(&self, dim: u32) -> Self {
        let mut out = self.clone();
        *out.entries.entry(dim).or_insert(0) += 1;
        out
    }

    /// `ν − e_dim`, or `None` when `ν_dim = 0`.
    pub fn minus_unit(&self, dim: u32) -> Option<Self> {
        let mut out = self.clone();
        match out.entries.get_mut(&dim) {
            Some(e) if *e > 1 => {
                *e -= 1;
            }
            Some(_) => {
                out.entries.remove(&dim);
            }
            None => return None,
        }
        Some(out)
    }

    /// `Π_{k: ν_k ≠ 0} (ν_k + 1)`, the product defining the hyperbolic cross.
    pub fn support_weight(&self) -> u64 {
        self.entries
            .values()
            .fold(1u64, |acc, &e| acc.saturating_mul(e as u64 + 1))
    }

    /// Text form: space-separated `dim:exp` pairs; empty for the zero index.
    pub fn to_text(&self) -> String {
        self.pairs()
            .map(|(d, e)| format!("{d}:{e}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_text(line: &str) -> Result<Self, MultiIndexError> {
        let mut entries = BTreeMap::new();
        for tok in line.split_whitespace() {
            let (d, e) = tok
                .split_once(':')
                .ok_or_else(|| MultiIndexError::ParseError(line.to_string()))?;
            let d: u32 = d
                .parse()
                .map_err(|_| MultiIndexError::ParseError(line.to_string()))?;
            let e: u32 = e
                .parse()
                .map_err(|_| MultiIndexError::ParseError(line.to_string()))?;
            if d == 0 || e == 0 || entries.insert(d, e).is_some() {
                return Err(MultiIndexError::ParseError(line.to_string()));
            }
        }
        Ok(Self { entries })
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}", self.to_text())
        }
    }
}

/// Graded order, then lexicographic on the `(dim, exp)` pair list with
/// higher exponents of earlier dimensions first. Total, deterministic.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let mut a = self.pairs();
                let mut b = other.pairs();
                loop {
                    match (a.next(), b.next()) {
                        (None, None) => return Ordering::Equal,
                        (None, Some(_)) => return Ordering::Less,
                        (Some(_), None) => return Ordering::Greater,
                        (Some((da, ea)), Some((db, eb))) => {
                            let c = da.cmp(&db).then(eb.cmp(&ea));
                            if c != Ordering::Equal {
                                return c;
                            }
                        }
                    }
                }
            })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite set of distinct multi-indices with deterministic iteration
/// order (graded, then lexicographic). The order defines the column
/// layout of coefficient vectors and sketch operators.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSet {
    members: Vec<MultiIndex>,
}

impl IndexSet {
    pub fn from_members(mut members: Vec<MultiIndex>) -> Self {
        members.sort();
        members.dedup();
        Self { members }
    }

    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.members.iter()
    }

    pub fn contains(&self, nu: &MultiIndex) -> bool {
        self.position(nu).is_some()
    }

    /// Position of `nu` in the deterministic ordering.
    pub fn position(&self, nu: &MultiIndex) -> Option<usize> {
        self.members.binary_search(nu).ok()
    }

    /// Sorted union of the supports of all members.
    pub fn active_dims(&self) -> Vec<u32> {
        let mut dims: Vec<u32> = self
            .members
            .iter()
            .flat_map(|nu| nu.support().collect::<Vec<_>>())
            .collect();
        dims.sort_unstable();
        dims.dedup();
        dims
    }

    /// Largest exponent appearing in dimension `dim` over all members.
    pub fn max_degree_in_dim(&self, dim: u32) -> u32 {
        self.members
            .iter()
            .map(|nu| nu.exponent(dim))
            .max()
            .unwrap_or(0)
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.members.iter().all(|nu| other.contains(nu))
    }

    /// One multi-index per line in `dim:exp` text form; an empty line
    /// stands for the zero index.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for nu in &self.members {
            out.push_str(&nu.to_text());
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, MultiIndexError> {
        let mut members = Vec::new();
        for line in text.lines() {
            members.push(MultiIndex::parse_text(line)?);
        }
        Ok(Self::from_members(members))
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a MultiIndex;
    type IntoIter = std::slice::Iter<'a, MultiIndex>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// The hyperbolic cross `{ν : Π_{k:ν_k≠0}(ν_k+1) ≤ n, ν_k = 0 for k ≥ n}`.
///
/// Generated by depth-first search over dimensions `1..n` with product
/// pruning, so only members are ever visited. For `n = 1` the dimension
/// cutoff alone forces the zero index.
pub fn hyperbolic_cross(n: usize) -> IndexSet {
    assert!(n >= 1, "hyperbolic cross requires n >= 1");
    let mut members = Vec::new();
    let mut stack = Vec::new();
    dfs_cross(n as u64, 1, 1, &mut stack, &mut members);
    IndexSet::from_members(members)
}

fn dfs_cross(
    n: u64,
    first_dim: u32,
    product: u64,
    stack: &mut Vec<(u32, u32)>,
    out: &mut Vec<MultiIndex>,
) {
    out.push(MultiIndex::from_pairs(stack.iter().copied()));
    for dim in first_dim..n as u32 {
        let mut exp = 1u32;
        while product * (exp as u64 + 1) <= n {
            stack.push((dim, exp));
            dfs_cross(n, dim + 1, product * (exp as u64 + 1), stack, out);
            stack.pop();
            exp += 1;
        }
    }
}

/// True iff the set is closed under componentwise `≤`. Checking the
/// immediate predecessors `ν − e_k` suffices.
pub fn is_lower(set: &IndexSet) -> bool {
    set.iter().all(|nu| {
        nu.support()
            .all(|k| set.contains(&nu.minus_unit(k).unwrap()))
    })
}

/// True iff the set is lower and `e_j ∈ S` implies `e_1, …, e_j ∈ S`.
pub fn is_anchored(set: &IndexSet) -> bool {
    if !is_lower(set) {
        return false;
    }
    let unit_dims: Vec<u32> = set.iter().filter_map(|nu| nu.as_unit()).collect();
    let max_unit = unit_dims.iter().copied().max().unwrap_or(0);
    (1..=max_unit).all(|j| set.contains(&MultiIndex::unit(j)))
}

/// Minimal monotone majorant `z̃_i = sup_{j ≥ i} |z_j|` of a finitely
/// supported sequence (trailing zeros implied).
pub fn monotone_majorant(z: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; z.len()];
    let mut running = 0.0f64;
    for i in (0..z.len()).rev() {
        running = running.max(z[i].abs());
        out[i] = running;
    }
    out
}

/// Minimal anchored majorant of a family of block norms over a lower set.
///
/// For `ν` not a unit vector, `c̃_ν = sup{‖c_µ‖ : µ ≥ ν}`; for `ν = e_j`,
/// `c̃_{e_j} = sup{‖c_µ‖ : µ ≥ e_i for some i ≥ j}`. Suprema run over the
/// given finite set; `norms[i]` is the norm of the block at position `i`
/// in the set's ordering.
pub fn anchored_majorant(set: &IndexSet, norms: &[f64]) -> Result<Vec<f64>, MultiIndexError> {
    if norms.len() != set.len() {
        return Err(MultiIndexError::NormsLengthMismatch {
            expected: set.len(),
            found: norms.len(),
        });
    }
    if let Some(nu) = set.iter().find(|nu| {
        nu.support()
            .any(|k| !set.contains(&nu.minus_unit(k).unwrap()))
    }) {
        return Err(MultiIndexError::NotLower(nu.clone()));
    }
    let out = set
        .iter()
        .map(|nu| {
            let sup = |pred: &dyn Fn(&MultiIndex) -> bool| {
                set.iter()
                    .zip(norms)
                    .filter(|(mu, _)| pred(mu))
                    .map(|(_, &n)| n)
                    .fold(0.0f64, f64::max)
            };
            match nu.as_unit() {
                // µ ≥ e_i for some i ≥ j iff µ has support in a dimension ≥ j
                Some(j) => sup(&|mu: &MultiIndex| mu.max_dim() >= j),
                None => sup(&|mu: &MultiIndex| nu.leq(mu)),
            }
        })
        .collect();
    Ok(out)
}

/// Grows a random anchored set of the requested size by repeatedly adding
/// a uniformly chosen element of the anchored frontier. Test surrogate
/// for "all anchored sets": exhaustive enumeration explodes, seeded
/// random growth gives probabilistic coverage.
pub fn random_anchored_set<R: Rng>(target_size: usize, rng: &mut R) -> IndexSet {
    assert!(target_size >= 1);
    let mut members = vec![MultiIndex::zero()];
    while members.len() < target_size {
        let set = IndexSet::from_members(members.clone());
        let frontier = anchored_frontier(&set);
        if frontier.is_empty() {
            break;
        }
        let pick = rng.gen_range(0..frontier.len());
        members.push(frontier[pick].clone());
    }
    IndexSet::from_members(members)
}

/// Elements whose addition keeps the set anchored.
pub fn anchored_frontier(set: &IndexSet) -> Vec<MultiIndex> {
    let max_unit = set
        .iter()
        .filter_map(|nu| nu.as_unit())
        .max()
        .unwrap_or(0);
    let mut cands = Vec::new();
    for nu in set.iter() {
        for dim in 1..=nu.max_dim().max(max_unit) + 1 {
            let cand = nu.plus_unit(dim);
            if set.contains(&cand) {
                continue;
            }
            let lower_ok = cand
                .support()
                .all(|k| set.contains(&cand.minus_unit(k).unwrap()));
            let anchor_ok = match cand.as_unit() {
                Some(j) => j == max_unit + 1,
                None => true,
            };
            if lower_ok && anchor_ok {
                cands.push(cand);
            }
        }
    }
    let mut out = IndexSet::from_members(cands);
    std::mem::take(&mut out.members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mi(pairs: &[(u32, u32)]) -> MultiIndex {
        MultiIndex::from_pairs(pairs.iter().copied())
    }

    /// Independent enumeration of the cross over the dense bounding box
    /// `[0, n-1]^{n-1}`, recursing on a quotient budget.
    fn box_enumeration(n: u64) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let dims = (n - 1) as usize;
        let mut cur = vec![0u32; dims];
        fn rec(d: usize, budget: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if d == cur.len() {
                out.push(cur.clone());
                return;
            }
            let mut e = 0u32;
            loop {
                let factor = e as u64 + 1;
                if factor > budget {
                    break;
                }
                cur[d] = e;
                rec(d + 1, budget / factor, cur, out);
                e += 1;
            }
            cur[d] = 0;
        }
        if dims == 0 {
            out.push(Vec::new());
        } else {
            rec(0, n, &mut cur, &mut out);
        }
        out
    }

    #[test]
    fn cross_n1_is_zero_only() {
        let s = hyperbolic_cross(1);
        assert_eq!(s.len(), 1);
        assert!(s.members()[0].is_zero());
    }

    #[test]
    fn cross_n3_members() {
        let s = hyperbolic_cross(3);
        let expected = IndexSet::from_members(vec![
            MultiIndex::zero(),
            MultiIndex::unit(1),
            MultiIndex::unit(2),
            mi(&[(1, 2)]),
            mi(&[(2, 2)]),
        ]);
        assert_eq!(s, expected);
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn cross_matches_box_enumeration_up_to_12() {
        for n in 1..=12u64 {
            let s = hyperbolic_cross(n as usize);
            let brute: Vec<MultiIndex> = box_enumeration(n)
                .iter()
                .map(|v| MultiIndex::from_dense(v))
                .collect();
            let brute = IndexSet::from_members(brute);
            assert_eq!(s, brute, "n = {n}");
        }
    }

    #[test]
    fn cross_cardinality_bound() {
        // |Λ| ≤ e · n^(2 + log(n−1)/log 2) for n ≥ 2
        for n in 2..=20usize {
            let card = hyperbolic_cross(n).len() as f64;
            let expo = 2.0 + ((n - 1) as f64).ln() / 2f64.ln();
            let bound = std::f64::consts::E * (n as f64).powf(expo);
            assert!(card <= bound, "n = {n}: {card} > {bound}");
        }
    }

    #[test]
    fn cross_is_anchored() {
        for n in 1..=12 {
            assert!(is_anchored(&hyperbolic_cross(n)));
        }
    }

    #[test]
    fn lower_and_anchored_predicates() {
        let zero_e1 = IndexSet::from_members(vec![MultiIndex::zero(), MultiIndex::unit(1)]);
        assert!(is_lower(&zero_e1));
        assert!(is_anchored(&zero_e1));

        let e1_only = IndexSet::from_members(vec![MultiIndex::unit(1)]);
        assert!(!is_lower(&e1_only));

        let zero_e1_e2 = IndexSet::from_members(vec![
            MultiIndex::zero(),
            MultiIndex::unit(1),
            MultiIndex::unit(2),
        ]);
        assert!(is_anchored(&zero_e1_e2));

        // e2 without e1 is lower but not anchored
        let zero_e2 = IndexSet::from_members(vec![MultiIndex::zero(), MultiIndex::unit(2)]);
        assert!(is_lower(&zero_e2));
        assert!(!is_anchored(&zero_e2));
    }

    #[test]
    fn random_downward_closures_are_lower_and_break_when_punctured() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            // downward closure of a few random seeds
            let mut members = vec![MultiIndex::zero()];
            for _ in 0..3 {
                let seed = mi(&[
                    (rng.gen_range(1..4), rng.gen_range(1..4)),
                    (rng.gen_range(1..4), rng.gen_range(0..3)),
                ]);
                close_downward(&seed, &mut members);
            }
            let set = IndexSet::from_members(members.clone());
            assert!(is_lower(&set));

            // deleting an interior (non-maximal, nonzero) element breaks it
            let interior: Vec<&MultiIndex> = set
                .iter()
                .filter(|nu| {
                    !nu.is_zero() && set.iter().any(|mu| nu.leq(mu) && *nu != mu)
                })
                .collect();
            if let Some(victim) = interior.first() {
                let punctured = IndexSet::from_members(
                    set.iter().filter(|nu| nu != victim).cloned().collect(),
                );
                assert!(!is_lower(&punctured));
            }
        }
    }

    fn close_downward(nu: &MultiIndex, out: &mut Vec<MultiIndex>) {
        if out.contains(nu) {
            return;
        }
        out.push(nu.clone());
        for k in nu.support().collect::<Vec<_>>() {
            close_downward(&nu.minus_unit(k).unwrap(), out);
        }
    }

    #[test]
    fn grown_anchored_sets_are_anchored() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let size = rng.gen_range(1..=12);
            let s = random_anchored_set(size, &mut rng);
            assert_eq!(s.len(), size);
            assert!(is_anchored(&s));
        }
    }

    #[test]
    fn anchored_sets_contained_in_cross() {
        // containment property behind the search-space construction
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=8usize {
            let cross = hyperbolic_cross(n);
            for _ in 0..200 {
                let size = rng.gen_range(1..=n);
                let s = random_anchored_set(size, &mut rng);
                assert!(s.is_subset_of(&cross), "size {size} not in cross {n}");
            }
        }
    }

    #[test]
    fn majorant_examples() {
        assert_eq!(
            monotone_majorant(&[1.0, 0.5, 0.8, 0.1]),
            vec![1.0, 0.8, 0.8, 0.1]
        );
        let noninc = [3.0, 2.0, 2.0, 0.5];
        assert_eq!(monotone_majorant(&noninc), noninc.to_vec());
    }

    #[test]
    fn majorant_matches_tail_sup_oracle_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let z: Vec<f64> = (0..rng.gen_range(1..30))
                .map(|_| rng.gen_range(-2.0..2.0))
                .collect();
            let maj = monotone_majorant(&z);
            // O(n^2) tail-sup oracle
            let oracle: Vec<f64> = (0..z.len())
                .map(|i| z[i..].iter().map(|x| x.abs()).fold(0.0, f64::max))
                .collect();
            assert_eq!(maj, oracle);
            assert_eq!(monotone_majorant(&maj), maj);
            for (m, x) in maj.iter().zip(&z) {
                assert!(*m >= x.abs());
            }
        }
    }

    #[test]
    fn anchored_majorant_example() {
        let set = IndexSet::from_members(vec![
            MultiIndex::zero(),
            MultiIndex::unit(1),
            MultiIndex::unit(2),
            mi(&[(1, 1), (2, 1)]),
        ]);
        // norms listed in the set's deterministic order: 0, e1, e2, e1+e2
        let norms = [1.0, 0.2, 0.5, 0.3];
        let maj = anchored_majorant(&set, &norms).unwrap();
        assert_eq!(maj, vec![1.0, 0.5, 0.5, 0.3]);
    }

    #[test]
    fn anchored_majorant_all_equal_norms_is_constant() {
        let set = hyperbolic_cross(4);
        let norms = vec![0.7; set.len()];
        let maj = anchored_majorant(&set, &norms).unwrap();
        assert!(maj.iter().all(|&x| x == 0.7));
    }

    #[test]
    fn anchored_majorant_rejects_non_lower() {
        let set = IndexSet::from_members(vec![MultiIndex::unit(2)]);
        assert!(matches!(
            anchored_majorant(&set, &[1.0]),
            Err(MultiIndexError::NotLower(_))
        ));
    }

    #[test]
    fn anchored_majorant_matches_definition_scan_on_random_lower_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            // random 2-D lower set: staircase profile
            let w = rng.gen_range(1..6u32);
            let mut members = Vec::new();
            let mut height: i64 = rng.gen_range(1..6);
            for d1 in 0..=w {
                for d2 in 0..=height {
                    members.push(mi(&[(1, d1), (2, d2 as u32)]));
                }
                height = (height - rng.gen_range(0..3i64)).max(0);
            }
            let set = IndexSet::from_members(members);
            let norms: Vec<f64> = (0..set.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let maj = anchored_majorant(&set, &norms).unwrap();

            // brute-force per-definition scan
            for (i, nu) in set.iter().enumerate() {
                let expect = match nu.as_unit() {
                    Some(j) => set
                        .iter()
                        .zip(&norms)
                        .filter(|(mu, _)| (1..=mu.max_dim()).rev().any(|d| {
                            d >= j && MultiIndex::unit(d).leq(mu)
                        }))
                        .map(|(_, &n)| n)
                        .fold(0.0f64, f64::max),
                    None => set
                        .iter()
                        .zip(&norms)
                        .filter(|(mu, _)| nu.leq(mu))
                        .map(|(_, &n)| n)
                        .fold(0.0f64, f64::max),
                };
                assert!((maj[i] - expect).abs() < 1e-14, "at {nu}");
            }

            // anchored-monotone: µ ≥ ν within the set implies c̃_µ ≤ c̃_ν
            for (i, nu) in set.iter().enumerate() {
                for (j, mu) in set.iter().enumerate() {
                    if nu.leq(mu) {
                        assert!(maj[j] <= maj[i] + 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn ordering_is_graded_and_deterministic() {
        let s = hyperbolic_cross(4);
        let degrees: Vec<u64> = s.iter().map(|nu| nu.total_degree()).collect();
        let mut sorted = degrees.clone();
        sorted.sort();
        assert_eq!(degrees, sorted);
        assert!(s.members()[0].is_zero());
        assert_eq!(s.members()[1], MultiIndex::unit(1));
    }

    #[test]
    fn text_round_trip() {
        let s = hyperbolic_cross(5);
        let text = s.to_text();
        let back = IndexSet::parse_text(&text).unwrap();
        assert_eq!(s, back);
        assert!(text.starts_with('\n'), "zero index is an empty line");
    }
}
