use crate::error::Result;
use crate::hypercube::function::check_arity;
use crate::hypercube::{BooleanFunction, Configuration};

/// Coordinates whose flip changes `f(c)`. For ternary functions any change
/// of value counts (e.g. `0 -> 1`).
pub fn pivotal_set(f: &dyn BooleanFunction, c: &Configuration) -> Result<Vec<usize>> {
    check_arity(f, c)?;
    let mut work = c.clone();
    Ok(pivotal_set_unchecked(f, &mut work))
}

/// Number of pivotal coordinates; same cost as [`pivotal_set`] without the allocation.
pub fn pivotal_count(f: &dyn BooleanFunction, c: &Configuration) -> Result<usize> {
    check_arity(f, c)?;
    let mut work = c.clone();
    let base = f.eval(&work);
    let mut count = 0;
    for i in 0..work.len() {
        work.toggle(i);
        if f.eval(&work) != base {
            count += 1;
        }
        work.toggle(i);
    }
    Ok(count)
}

/// Flips each coordinate of `work` in turn and restores it afterwards.
pub(crate) fn pivotal_set_unchecked(f: &dyn BooleanFunction, work: &mut Configuration) -> Vec<usize> {
    let base = f.eval(work);
    let mut out = Vec::new();
    for i in 0..work.len() {
        work.toggle(i);
        if f.eval(work) != base {
            out.push(i);
        }
        work.toggle(i);
    }
    out
}
