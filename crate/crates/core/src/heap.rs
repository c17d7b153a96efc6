//! Addressable binary min-heap over dense item ids `0..n`.

/// Min-heap of item ids keyed by `K`, with a position index so that any
/// item's key can be changed in place.
#[derive(Debug, Clone)]
pub struct IndexedMinHeap<K> {
    heap: Vec<usize>,
    pos: Vec<usize>,
    keys: Vec<K>,
}

const ABSENT: usize = usize::MAX;

impl<K: Ord + Copy> IndexedMinHeap<K> {
    /// Heapifies all items `0..keys.len()` in O(n).
    pub fn from_keys(keys: Vec<K>) -> Self {
        let n = keys.len();
        let mut h = Self {
            heap: (0..n).collect(),
            pos: (0..n).collect(),
            keys,
        };
        for i in (0..n / 2).rev() {
            h.sift_down(i);
        }
        h
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.pos[item] != ABSENT
    }

    pub fn key(&self, item: usize) -> K {
        self.keys[item]
    }

    pub fn peek(&self) -> Option<(usize, K)> {
        self.heap.first().map(|&i| (i, self.keys[i]))
    }

    pub fn pop(&mut self) -> Option<(usize, K)> {
        let top = *self.heap.first()?;
        let last = self.heap.len() - 1;
        self.swap(0, last);
        self.heap.pop();
        self.pos[top] = ABSENT;
        if !self.heap.is_empty() {
            self.sift_down(0);
        }
        Some((top, self.keys[top]))
    }

    /// Sets the key of `item`, re-inserting it if it had been popped.
    pub fn update(&mut self, item: usize, key: K) {
        let old = self.keys[item];
        self.keys[item] = key;
        let p = self.pos[item];
        if p == ABSENT {
            self.heap.push(item);
            let p = self.heap.len() - 1;
            self.pos[item] = p;
            self.sift_up(p);
        } else if key < old {
            self.sift_up(p);
        } else if key > old {
            self.sift_down(p);
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a]] = a;
        self.pos[self.heap[b]] = b;
    }

    fn less(&self, a: usize, b: usize) -> bool {
        self.keys[self.heap[a]] < self.keys[self.heap[b]]
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.less(i, parent) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && self.less(r, l) { r } else { l };
            if !self.less(child, i) {
                break;
            }
            self.swap(i, child);
            i = child;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pops_in_order() {
        let mut h = IndexedMinHeap::from_keys(vec![5, 3, 9, 1, 7]);
        let order: Vec<_> = std::iter::from_fn(|| h.pop()).map(|(i, _)| i).collect();
        assert_eq!(order, vec![3, 1, 0, 4, 2]);
    }

    #[test]
    fn update_and_reinsert() {
        let mut h = IndexedMinHeap::from_keys(vec![5, 3, 9]);
        h.update(2, 0);
        assert_eq!(h.peek(), Some((2, 0)));
        assert_eq!(h.pop(), Some((2, 0)));
        assert!(!h.contains(2));
        h.update(1, 10);
        assert_eq!(h.peek(), Some((0, 5)));
        h.update(2, 4);
        assert_eq!(h.pop(), Some((2, 4)));
    }

    proptest! {
        #[test]
        fn matches_linear_scan(
            keys in prop::collection::vec(0i32..50, 1..40),
            ops in prop::collection::vec((0usize..40, 0i32..50), 0..80),
        ) {
            let n = keys.len();
            let mut h = IndexedMinHeap::from_keys(keys.iter().enumerate().map(|(i, &k)| (k, i)).collect());
            let mut model: Vec<(i32, usize)> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
            for (item, k) in ops {
                let item = item % n;
                h.update(item, (k, item));
                model[item] = (k, item);
                let expect = model.iter().copied().min().unwrap();
                prop_assert_eq!(h.peek().map(|(_, key)| key), Some(expect));
            }
        }
    }
}
