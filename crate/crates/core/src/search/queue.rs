use std::cmp::Ordering;

/// Dense index of a discovered state inside one planner.
pub type NodeId = u32;

const ABSENT: u32 = u32::MAX;

/// How entries with equal keys are ordered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Smaller heuristic value first, then the most recent insertion first.
    #[default]
    LowHLifo,
    /// Smaller heuristic value first, then the oldest insertion first.
    LowHFifo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueueEntry {
    pub key: f64,
    pub h: f64,
    pub seq: u64,
    pub node: NodeId,
}

impl QueueEntry {
    /// Total order used by the queue: `Less` pops first.
    pub fn cmp_with(&self, other: &QueueEntry, tie: TieBreak) -> Ordering {
        self.key.total_cmp(&other.key).then_with(|| self.h.total_cmp(&other.h)).then_with(|| match tie {
            TieBreak::LowHLifo => other.seq.cmp(&self.seq),
            TieBreak::LowHFifo => self.seq.cmp(&other.seq),
        })
    }
}

/// Binary min-heap with a position index so entries can be updated or removed
/// in place (decrease-key).
#[derive(Clone, Debug)]
pub struct IndexedHeap {
    heap: Vec<QueueEntry>,
    pos: Vec<u32>,
    tie: TieBreak,
}

impl IndexedHeap {
    pub fn new(tie: TieBreak) -> Self {
        IndexedHeap { heap: Vec::new(), pos: Vec::new(), tie }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn peek(&self) -> Option<&QueueEntry> {
        self.heap.first()
    }

    pub fn min_key(&self) -> Option<f64> {
        self.heap.first().map(|e| e.key)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.pos.get(node as usize).is_some_and(|&p| p != ABSENT)
    }

    pub fn get(&self, node: NodeId) -> Option<&QueueEntry> {
        match self.pos.get(node as usize) {
            Some(&p) if p != ABSENT => Some(&self.heap[p as usize]),
            _ => None,
        }
    }

    pub fn entries(&self) -> &[QueueEntry] {
        &self.heap
    }

    /// Inserts `entry`, or replaces the existing entry for the same node.
    pub fn push_or_update(&mut self, entry: QueueEntry) {
        let idx = entry.node as usize;
        if idx >= self.pos.len() {
            self.pos.resize(idx + 1, ABSENT);
        }
        match self.pos[idx] {
            ABSENT => {
                let at = self.heap.len();
                self.heap.push(entry);
                self.pos[idx] = at as u32;
                self.sift_up(at);
            }
            p => {
                let at = p as usize;
                let old = std::mem::replace(&mut self.heap[at], entry);
                if entry.cmp_with(&old, self.tie) == Ordering::Less {
                    self.sift_up(at);
                } else {
                    self.sift_down(at);
                }
            }
        }
    }

    pub fn pop(&mut self) -> Option<QueueEntry> {
        if self.heap.is_empty() {
            return None;
        }
        Some(self.remove_at(0))
    }

    pub fn remove(&mut self, node: NodeId) -> Option<QueueEntry> {
        match self.pos.get(node as usize) {
            Some(&p) if p != ABSENT => Some(self.remove_at(p as usize)),
            _ => None,
        }
    }

    pub fn clear(&mut self) {
        for e in &self.heap {
            self.pos[e.node as usize] = ABSENT;
        }
        self.heap.clear();
    }

    /// Replaces the whole content, then restores heap order in `O(n)`.
    pub fn rebuild(&mut self, entries: Vec<QueueEntry>) {
        self.clear();
        self.heap = entries;
        for (i, e) in self.heap.iter().enumerate() {
            let idx = e.node as usize;
            if idx >= self.pos.len() {
                self.pos.resize(idx + 1, ABSENT);
            }
            debug_assert_eq!(self.pos[idx], ABSENT, "duplicate node in rebuild");
            self.pos[idx] = i as u32;
        }
        for i in (0..self.heap.len() / 2).rev() {
            self.sift_down(i);
        }
    }

    fn remove_at(&mut self, at: usize) -> QueueEntry {
        let last = self.heap.len() - 1;
        self.swap(at, last);
        let out = self.heap.pop().expect("non-empty");
        self.pos[out.node as usize] = ABSENT;
        if at < self.heap.len() {
            self.sift_down(at);
            self.sift_up(at);
        }
        out
    }

    fn less(&self, a: usize, b: usize) -> bool {
        self.heap[a].cmp_with(&self.heap[b], self.tie) == Ordering::Less
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a].node as usize] = a as u32;
        self.pos[self.heap[b].node as usize] = b as u32;
    }

    fn sift_up(&mut self, mut at: usize) {
        while at > 0 {
            let parent = (at - 1) / 2;
            if !self.less(at, parent) {
                break;
            }
            self.swap(at, parent);
            at = parent;
        }
    }

    fn sift_down(&mut self, mut at: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * at + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && self.less(r, l) { r } else { l };
            if !self.less(child, at) {
                break;
            }
            self.swap(at, child);
            at = child;
        }
    }

    /// Heap-order and index consistency. Used by invariant checking.
    pub fn check_structure(&self) -> Result<(), String> {
        for (i, e) in self.heap.iter().enumerate() {
            if self.pos.get(e.node as usize) != Some(&(i as u32)) {
                return Err(format!("node {} at slot {i} has stale position", e.node));
            }
            if i > 0 && self.less(i, (i - 1) / 2) {
                return Err(format!("heap order violated at slot {i}"));
            }
        }
        let indexed = self.pos.iter().filter(|&&p| p != ABSENT).count();
        if indexed != self.heap.len() {
            return Err(format!("{indexed} indexed nodes but {} entries", self.heap.len()));
        }
        Ok(())
    }
}
