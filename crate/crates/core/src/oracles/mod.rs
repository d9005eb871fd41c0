//! Word-problem deciders, independent of any automaton construction.

mod combinators;
mod ht;
mod mealy;
mod vf;

use crate::alphabet::{Alphabet, Letter};

pub use combinators::{
    oracle_direct_product, oracle_finite_extension, oracle_free_product, oracle_rewritten, oracle_wreath,
    DirectProductOracle, FiniteExtensionOracle, FreeProductOracle, RewrittenOracle, SharedOracle, WreathOracle,
};
pub use ht::{format_ht_word, parse_ht_word, validate_antichain, HtElement, HtOracle, HtWord};
pub use mealy::{
    apply_directed, apply_finitary, generator_to_mealy, mealy_is_identity, mealy_product, BoundedOracle,
    DirectedAutomorphism, FinitaryAutomorphism, Generator, MealyMachine, OffSpine,
};
pub use vf::{free_reduce, NormalForm, RewriteEntry, VirtuallyFreeData, VirtuallyFreeOracle};

/// Decides triviality of words over a fixed inverse-closed alphabet.
pub trait GroupOracle: Send + Sync {
    fn alphabet(&self) -> &Alphabet;

    /// True iff `w` represents the identity.
    fn is_trivial(&self, w: &[Letter]) -> bool;
}

impl<T: GroupOracle + ?Sized> GroupOracle for Box<T> {
    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        (**self).is_trivial(w)
    }
}

impl<T: GroupOracle + ?Sized> GroupOracle for std::sync::Arc<T> {
    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        (**self).is_trivial(w)
    }
}

/// Free group on the alphabet's letter pairs (involutions become order 2).
#[derive(Clone, Debug)]
pub struct FreeOracle {
    alphabet: Alphabet,
}

impl FreeOracle {
    pub fn new(alphabet: Alphabet) -> Self {
        Self { alphabet }
    }
}

impl GroupOracle for FreeOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        free_reduce(&self.alphabet, w).is_empty()
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_rank_two() {
        let a = Alphabet::with_case_inverses(&["a", "b"]).unwrap();
        let o = FreeOracle::new(a.clone());
        let w = |s: &str| a.parse_word(s).unwrap();
        assert!(o.is_trivial(&w("aA")));
        assert!(o.is_trivial(&w("abBA")));
        assert!(!o.is_trivial(&w("abA")));
        assert_eq!(free_reduce(&a, &w("abA")), w("abA"));
        laws::check_group_laws(&o, 8, 500, 1);
    }
}

#[cfg(test)]
#[allow(unused_imports)]
pub(crate) mod fixtures {
    pub use super::combinators::tests::{free2, integers, z2, z2_oracle};
    pub use super::ht::tests::{leaf_swap, shift, two_generator};
    pub use super::mealy::tests::{grigorchuk, grigorchuk_generators, root_swap};
    pub use super::vf::tests::dihedral;
}
