use crate::hypercube::{BooleanFunction, Configuration, Ternary};

/// Incremental evaluation along a sequence of single-coordinate updates.
///
/// `load` resets the state from a full configuration. `toggle(i, now_plus)`
/// reports that coordinate `i` has just changed and now reads `+1` iff
/// `now_plus`. After any sequence of calls, `value()` equals a fresh
/// evaluation on the current configuration.
pub trait IncrementalSession: Send {
    fn load(&mut self, c: &Configuration) -> Ternary;

    fn toggle(&mut self, i: usize, now_plus: bool) -> Ternary;

    fn value(&self) -> Ternary;
}

/// Fallback session: keeps its own copy and re-evaluates after every update.
pub struct RecomputeSession<'a, F: BooleanFunction + ?Sized> {
    f: &'a F,
    state: Configuration,
    value: Ternary,
}

impl<'a, F: BooleanFunction + ?Sized> RecomputeSession<'a, F> {
    pub fn new(f: &'a F) -> Self {
        RecomputeSession { f, state: Configuration::all_minus(f.arity()), value: Ternary::Zero }
    }
}

impl<F: BooleanFunction + ?Sized> IncrementalSession for RecomputeSession<'_, F> {
    fn load(&mut self, c: &Configuration) -> Ternary {
        self.state.clone_from(c);
        self.value = self.f.eval(&self.state);
        self.value
    }

    fn toggle(&mut self, i: usize, now_plus: bool) -> Ternary {
        self.state.set(i, now_plus);
        self.value = self.f.eval(&self.state);
        self.value
    }

    fn value(&self) -> Ternary {
        self.value
    }
}
