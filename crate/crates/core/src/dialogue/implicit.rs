use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{IntentSlots, SlotName};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImplicitError {
    #[error("departure_city cannot be hidden")]
    DepartureHidden,
    #[error("cannot hide every slot")]
    AllHidden,
}

/// Copy of `explicit` with the `hide` slots unfilled.
pub fn make_implicit(explicit: &IntentSlots, hide: &BTreeSet<SlotName>) -> Result<IntentSlots, ImplicitError> {
    if hide.len() == SlotName::ALL.len() {
        return Err(ImplicitError::AllHidden);
    }
    if hide.contains(&SlotName::DepartureCity) {
        return Err(ImplicitError::DepartureHidden);
    }
    let mut out = explicit.clone();
    for s in hide {
        out.unfill(*s);
    }
    Ok(out)
}

/// Seeded choice of 2 to 6 slots to hide, never the departure city.
pub fn sample_hidden(seed: u64) -> BTreeSet<SlotName> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<SlotName> = SlotName::ALL.into_iter().filter(|s| *s != SlotName::DepartureCity).collect();
    pool.shuffle(&mut rng);
    let k = rng.gen_range(2..=6);
    pool.into_iter().take(k).collect()
}

/// Implicit variant with a seeded hidden set, returned alongside it.
pub fn make_implicit_sampled(explicit: &IntentSlots, seed: u64) -> (IntentSlots, BTreeSet<SlotName>) {
    let hide = sample_hidden(seed);
    let out = make_implicit(explicit, &hide).expect("sampled sets are valid");
    (out, hide)
}
