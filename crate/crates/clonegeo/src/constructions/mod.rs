//! Builders and predicates for the clone constructions the engine verifies:
//! product-expanded groups on `Z_{np^2}` ([`zmod`]), the one-point absorbing
//! extension of a constantive Mal'cev clone ([`oplus`]), the three-element
//! algebras generated by the `g_i` indicator operations ([`janov`]), and the
//! restriction-defined extension clone on a carrier with one fresh element
//! ([`phi`]).

pub mod janov;
pub mod oplus;
pub mod phi;
pub mod zmod;

pub use janov::{build_janov, d_set, enumerate_f, enumerate_f_prime, g_table, in_f, in_f_prime, JanovSpec};
pub use oplus::{
    build_b0, build_oplus, check_extend_restriction, check_fprop, dot_table, oplus_lift,
    restrict_to_base, OplusSpec,
};
pub use phi::{enumerate_phi_layer, phi_closure, phi_closure_with, phi_membership};
pub use zmod::{
    build_q, build_zmod_expansion, enumerate_cd_tables, enumerate_cd_tables_with, is_absorbing,
    monomial_shape_ok, Monomial,
    ModExpansionSpec,
};

use crate::error::Result;
use crate::tables::{OpTable, PointSet};

/// The graph of an i-ary operation as an (i+1)-ary point set: one point
/// `(x_1, ..., x_i, f(x))` per input tuple.
pub fn graph_of(f: &OpTable) -> Result<PointSet> {
    let carrier = f.carrier();
    let size = carrier.size();
    let mut set = PointSet::empty(carrier, f.arity() + 1)?;
    for (rank, &value) in f.values().iter().enumerate() {
        set.insert_rank(rank * size + value as usize);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::{rank_tuple, Carrier};

    #[test]
    fn graph_pairs_inputs_with_outputs() {
        let c3 = Carrier::new(3).unwrap();
        let g2 = g_table(2).unwrap();
        let graph = graph_of(&g2).unwrap();
        assert_eq!(graph.len(), 9);
        assert_eq!(graph.arity(), 3);
        assert!(graph.contains(rank_tuple(c3, &[1, 2, 1]).unwrap()));
        assert!(!graph.contains(rank_tuple(c3, &[1, 1, 1]).unwrap()));
    }
}

