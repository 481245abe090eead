use std::fmt;
use std::hash::Hash;

/// Identifier of the action that produced a successor. Its meaning is owned by
/// the domain (grid direction, primitive index, ...).
pub type ActionId = u32;

/// Largest number of non-anchor resolutions a domain may declare.
pub const MAX_RESOLUTIONS: usize = 31;

/// A small set over resolution indices `0..=MAX_RESOLUTIONS`.
///
/// Index 0 is the anchor; `1` is the finest real resolution. The same type is
/// used for "which lattices does this state live on" and for per-state closed
/// flags.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ResolutionSet(u32);

impl ResolutionSet {
    pub const EMPTY: ResolutionSet = ResolutionSet(0);

    pub fn single(res: usize) -> Self {
        debug_assert!(res <= MAX_RESOLUTIONS);
        ResolutionSet(1 << res)
    }

    /// `{1, ..., n}`
    pub fn all_up_to(n: usize) -> Self {
        debug_assert!(n <= MAX_RESOLUTIONS);
        ResolutionSet(((1u64 << (n + 1)) - 2) as u32)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, res: usize) -> bool {
        res <= MAX_RESOLUTIONS && self.0 & (1 << res) != 0
    }

    pub fn insert(&mut self, res: usize) {
        debug_assert!(res <= MAX_RESOLUTIONS);
        self.0 |= 1 << res;
    }

    pub fn remove(&mut self, res: usize) {
        self.0 &= !(1 << res);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: ResolutionSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..=MAX_RESOLUTIONS).filter(move |r| bits & (1 << r) != 0)
    }
}

impl FromIterator<usize> for ResolutionSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = ResolutionSet::EMPTY;
        for r in iter {
            set.insert(r);
        }
        set
    }
}

impl fmt::Debug for ResolutionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// One outgoing edge of the implicit graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Successor<S> {
    pub state: S,
    pub cost: f64,
    pub action: ActionId,
}

/// Implicit multi-resolution graph.
///
/// Resolutions are indexed `1` (finest) to `num_resolutions()` (coarsest).
/// Resolution `0` is the anchor, whose action space is the union of all the
/// others; [`Domain::anchor_successors`] provides it and should not normally
/// be overridden.
///
/// Implementations must be read-only so a single domain can serve several
/// planners at once.
pub trait Domain {
    type State: Copy + Eq + Hash + Ord + fmt::Debug;

    fn num_resolutions(&self) -> usize;

    /// In bounds and collision free.
    fn is_valid(&self, state: &Self::State) -> bool;

    /// The lattices `state` lies on. Never empty for a reachable state.
    fn resolutions_of(&self, state: &Self::State) -> ResolutionSet;

    /// Appends the collision-free successors of `state` under the action space
    /// of resolution `res` (`1..=num_resolutions()`). Callers guarantee
    /// `res ∈ resolutions_of(state)`. Edge costs are finite and non-negative.
    fn successors(&self, state: &Self::State, res: usize, out: &mut Vec<Successor<Self::State>>);

    /// Union action space: the concatenation of `successors(state, r)` for
    /// every `r` in `resolutions_of(state)`, in ascending `r`.
    fn anchor_successors(&self, state: &Self::State, out: &mut Vec<Successor<Self::State>>) {
        for r in self.resolutions_of(state).iter() {
            self.successors(state, r, out);
        }
    }
}

impl<D: Domain + ?Sized> Domain for &D {
    type State = D::State;

    fn num_resolutions(&self) -> usize {
        (**self).num_resolutions()
    }

    fn is_valid(&self, state: &Self::State) -> bool {
        (**self).is_valid(state)
    }

    fn resolutions_of(&self, state: &Self::State) -> ResolutionSet {
        (**self).resolutions_of(state)
    }

    fn successors(&self, state: &Self::State, res: usize, out: &mut Vec<Successor<Self::State>>) {
        (**self).successors(state, res, out)
    }

    fn anchor_successors(&self, state: &Self::State, out: &mut Vec<Successor<Self::State>>) {
        (**self).anchor_successors(state, out)
    }
}

/// Restricts a domain to one of its resolutions, presenting it as a
/// single-resolution domain. Used to build the single-resolution baselines
/// ("ARA* (Low)" and friends).
#[derive(Clone, Copy, Debug)]
pub struct SingleResolution<D> {
    inner: D,
    res: usize,
}

impl<D: Domain> SingleResolution<D> {
    pub fn new(inner: D, res: usize) -> Self {
        assert!((1..=inner.num_resolutions()).contains(&res), "resolution {res} outside 1..={}", inner.num_resolutions());
        SingleResolution { inner, res }
    }

    pub fn inner(&self) -> &D {
        &self.inner
    }

    /// Resolution of the wrapped domain that is exposed as resolution 1.
    pub fn resolution(&self) -> usize {
        self.res
    }
}

impl<D: Domain> Domain for SingleResolution<D> {
    type State = D::State;

    fn num_resolutions(&self) -> usize {
        1
    }

    fn is_valid(&self, state: &Self::State) -> bool {
        self.inner.is_valid(state) && self.inner.resolutions_of(state).contains(self.res)
    }

    fn resolutions_of(&self, state: &Self::State) -> ResolutionSet {
        if self.inner.resolutions_of(state).contains(self.res) {
            ResolutionSet::single(1)
        } else {
            ResolutionSet::EMPTY
        }
    }

    fn successors(&self, state: &Self::State, res: usize, out: &mut Vec<Successor<Self::State>>) {
        debug_assert_eq!(res, 1);
        self.inner.successors(state, self.res, out);
    }
}
