//! Involutions and subsets of small index sets.

/// A self-inverse permutation, stored as transpositions plus fixed points.
///
/// Pairs are `(a, b)` with `a < b`, sorted by `a`; fixed points are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Involution {
    pub pairs: Vec<(usize, usize)>,
    pub fixed: Vec<usize>,
}

impl Involution {
    pub fn identity(domain: &[usize]) -> Self {
        let mut fixed = domain.to_vec();
        fixed.sort_unstable();
        Involution { pairs: Vec::new(), fixed }
    }

    pub fn is_fixed_point_free(&self) -> bool {
        self.fixed.is_empty()
    }

    /// Image of `i`, or `None` if `i` is outside the domain.
    pub fn apply(&self, i: usize) -> Option<usize> {
        for &(a, b) in &self.pairs {
            if a == i {
                return Some(b);
            }
            if b == i {
                return Some(a);
            }
        }
        self.fixed.contains(&i).then_some(i)
    }

    pub fn domain(&self) -> Vec<usize> {
        let mut d: Vec<usize> =
            self.pairs.iter().flat_map(|&(a, b)| [a, b]).chain(self.fixed.iter().copied()).collect();
        d.sort_unstable();
        d
    }
}

fn sorted(a: &[usize]) -> Vec<usize> {
    let mut v = a.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn involutions_rec(rest: &[usize], allow_fixed: bool, cur: &mut Involution, out: &mut Vec<Involution>) {
    let Some((&first, tail)) = rest.split_first() else {
        out.push(cur.clone());
        return;
    };
    if allow_fixed {
        cur.fixed.push(first);
        involutions_rec(tail, allow_fixed, cur, out);
        cur.fixed.pop();
    }
    for (i, &partner) in tail.iter().enumerate() {
        let mut remaining = tail.to_vec();
        remaining.remove(i);
        cur.pairs.push((first, partner));
        involutions_rec(&remaining, allow_fixed, cur, out);
        cur.pairs.pop();
    }
}

/// Perfect matchings of `a`. The empty set has exactly one, the identity.
pub fn fixed_point_free_involutions(a: &[usize]) -> Vec<Involution> {
    let a = sorted(a);
    let mut out = Vec::new();
    if a.len() % 2 == 1 {
        return out;
    }
    involutions_rec(&a, false, &mut Involution::identity(&[]), &mut out);
    out
}

/// Every self-inverse permutation of `a`.
pub fn all_involutions(a: &[usize]) -> Vec<Involution> {
    let a = sorted(a);
    let mut out = Vec::new();
    involutions_rec(&a, true, &mut Involution::identity(&[]), &mut out);
    out
}

/// All `2^|a|` subsets, in order of the binary counter over sorted `a`.
pub fn subsets(a: &[usize]) -> Vec<Vec<usize>> {
    let a = sorted(a);
    assert!(a.len() < usize::BITS as usize, "index set too large");
    (0..1usize << a.len())
        .map(|mask| a.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn telephone(n: usize) -> usize {
        let mut t = vec![1usize, 1];
        for k in 2..=n {
            t.push(t[k - 1] + (k - 1) * t[k - 2]);
        }
        t[n]
    }

    #[test]
    fn small_matchings() {
        let m = fixed_point_free_involutions(&[1, 2, 3, 4]);
        let pairs: Vec<_> = m.iter().map(|i| i.pairs.clone()).collect();
        assert_eq!(pairs, vec![vec![(1, 2), (3, 4)], vec![(1, 3), (2, 4)], vec![(1, 4), (2, 3)]]);
        assert!(fixed_point_free_involutions(&[1, 2, 3]).is_empty());
        let empty = fixed_point_free_involutions(&[]);
        assert_eq!(empty, vec![Involution::identity(&[])]);
    }

    #[test]
    fn counts() {
        for m in 0..=6 {
            let dbl: usize = (1..2 * m).step_by(2).product();
            let a: Vec<usize> = (1..=2 * m).collect();
            assert_eq!(fixed_point_free_involutions(&a).len(), dbl);
        }
        for n in 0..=10 {
            let a: Vec<usize> = (1..=n).collect();
            assert_eq!(all_involutions(&a).len(), telephone(n));
        }
        assert_eq!(all_involutions(&[1, 2, 3]).len(), 4);
    }

    #[test]
    fn subset_histogram() {
        assert_eq!(subsets(&[]), vec![Vec::<usize>::new()]);
        assert_eq!(subsets(&[5, 9]).len(), 4);
        let mut h = [0; 4];
        for s in subsets(&[1, 2, 3]) {
            h[s.len()] += 1;
        }
        assert_eq!(h, [1, 3, 3, 1]);
    }

    proptest! {
        #[test]
        fn involutions_square_to_identity(n in 0usize..8) {
            let a: Vec<usize> = (0..n).map(|i| 3 * i + 1).collect();
            let all = all_involutions(&a);
            for inv in &all {
                prop_assert_eq!(inv.domain(), a.clone());
                for &i in &a {
                    let j = inv.apply(i).unwrap();
                    prop_assert_eq!(inv.apply(j), Some(i));
                }
                for w in inv.pairs.windows(2) {
                    prop_assert!(w[0].0 < w[1].0);
                }
            }
            for m in fixed_point_free_involutions(&a) {
                prop_assert!(all.contains(&m));
            }
            let mut uniq = all.clone();
            uniq.dedup();
            prop_assert_eq!(uniq.len(), all.len());
        }
    }
}
