//! Exact 0/1 knapsack by dynamic programming over integer capacity.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::OrderId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    pub id: OrderId,
    pub weight_kg: u32,
    /// Whole dollars, at least 1.
    pub value: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnapsackResult {
    /// Selected ids in ascending order.
    pub selected: Vec<OrderId>,
    pub value: u64,
}

/// Maximizes total value subject to total weight `<= capacity_kg`.
///
/// Among optimal selections the one whose ascending id sequence is
/// lexicographically smallest is returned. Items are sorted by id, the table
/// is filled from the last item backwards, and the reconstruction takes each
/// item in id order whenever taking it is still optimal.
pub fn knapsack(items: &[Item], capacity_kg: u32) -> KnapsackResult {
    let mut items: Vec<Item> = items.iter().copied().filter(|it| it.weight_kg <= capacity_kg).collect();
    items.sort_by_key(|it| it.id);
    if items.is_empty() {
        return KnapsackResult::default();
    }
    let total: u64 = items.iter().map(|it| u64::from(it.weight_kg)).sum();
    let cap = total.min(u64::from(capacity_kg)) as usize;
    let n = items.len();
    let words = (cap + 1).div_ceil(64);
    // take[k] bit w: taking item k is optimal for the suffix k.. at capacity w.
    let mut take = vec![0u64; n * words];
    let mut best = vec![0u64; cap + 1];
    for k in (0..n).rev() {
        let w = items[k].weight_kg as usize;
        let v = items[k].value;
        let row = &mut take[k * words..(k + 1) * words];
        for c in (w..=cap).rev() {
            let with = best[c - w] + v;
            if with >= best[c] {
                row[c / 64] |= 1 << (c % 64);
                best[c] = with;
            }
        }
    }
    let value = best[cap];
    let mut selected = Vec::new();
    let mut c = cap;
    for (k, it) in items.iter().enumerate() {
        if take[k * words + c / 64] >> (c % 64) & 1 == 1 {
            selected.push(it.id);
            c -= it.weight_kg as usize;
        }
    }
    KnapsackResult { selected, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(spec: &[(u32, u32, u64)]) -> Vec<Item> {
        spec.iter().map(|&(id, w, v)| Item { id: OrderId(id), weight_kg: w, value: v }).collect()
    }

    /// Subset enumeration; ties go to the lexicographically smallest id sequence.
    fn brute(items: &[Item], cap: u32) -> KnapsackResult {
        let mut sorted = items.to_vec();
        sorted.sort_by_key(|it| it.id);
        let mut best: Option<(u64, Vec<OrderId>)> = None;
        for mask in 0u32..(1 << sorted.len()) {
            let chosen: Vec<&Item> = (0..sorted.len()).filter(|i| mask >> i & 1 == 1).map(|i| &sorted[i]).collect();
            let w: u64 = chosen.iter().map(|it| u64::from(it.weight_kg)).sum();
            if w > u64::from(cap) {
                continue;
            }
            let v: u64 = chosen.iter().map(|it| it.value).sum();
            let ids: Vec<OrderId> = chosen.iter().map(|it| it.id).collect();
            let better = match &best {
                None => true,
                Some((bv, bids)) => v > *bv || (v == *bv && ids < *bids),
            };
            if better {
                best = Some((v, ids));
            }
        }
        let (value, selected) = best.unwrap();
        KnapsackResult { selected, value }
    }

    #[test]
    fn classic_instance() {
        let r = knapsack(&items(&[(1, 10, 60), (2, 20, 100), (3, 30, 120)]), 50);
        assert_eq!(r.value, 220);
        assert_eq!(r.selected, vec![OrderId(2), OrderId(3)]);
        assert_eq!(r, brute(&items(&[(1, 10, 60), (2, 20, 100), (3, 30, 120)]), 50));
    }

    #[test]
    fn empty_and_oversized() {
        assert_eq!(knapsack(&[], 100), KnapsackResult::default());
        assert_eq!(knapsack(&items(&[(1, 101, 5)]), 100), KnapsackResult::default());
        assert_eq!(knapsack(&items(&[(1, 10, 5)]), 0), KnapsackResult::default());
    }

    #[test]
    fn ties_prefer_smaller_ids() {
        let r = knapsack(&items(&[(5, 10, 7), (2, 10, 7), (9, 10, 7)]), 20);
        assert_eq!(r.selected, vec![OrderId(2), OrderId(5)]);
    }

    proptest::proptest! {
        #[test]
        fn matches_enumeration(
            spec in proptest::collection::vec((1u32..60, 1u64..40), 0..12),
            cap in 0u32..200,
        ) {
            let its: Vec<Item> = spec.iter().enumerate()
                .map(|(i, &(w, v))| Item { id: OrderId(i as u32 * 7 % 13 + 100 * (i as u32 / 13)), weight_kg: w, value: v })
                .collect();
            let dp = knapsack(&its, cap);
            let bf = brute(&its, cap);
            proptest::prop_assert_eq!(dp, bf);
        }
    }
}
