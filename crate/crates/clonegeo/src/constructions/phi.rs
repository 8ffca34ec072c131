//! The extension clone on a carrier enlarged by one fresh element whose
//! members are exactly the operations restricting to base clone members on
//! base tuples. Its algebraic sets are determined by their base part, which
//! gives the closed-form closure below; the full per-arity member
//! enumeration is kept for exhaustive cross-checks at tiny sizes.

use std::collections::BTreeSet;

use crate::engine::Layer;
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::geometry::closure_with;
use crate::tables::{Carrier, OpTable, PointSet};

use super::oplus::{base_tuple_ranks, restrict_to_base};

const PHI_ENUMERATION_CAP: usize = 1 << 22;

/// Membership: the restriction to base tuples is a base layer member.
/// Values on tuples containing the fresh element are unconstrained.
pub fn phi_membership(f: &OpTable, base_layer: &Layer) -> Result<bool> {
    if f.carrier().size() != base_layer.carrier().size() + 1 {
        return Err(Error::mismatch(
            "operation carrier must extend the base layer carrier by one element",
        ));
    }
    if f.arity() != base_layer.arity() {
        return Err(Error::mismatch(format!(
            "operation of arity {} against a base layer of arity {}",
            f.arity(),
            base_layer.arity()
        )));
    }
    match restrict_to_base(f)? {
        Some(restriction) => Ok(base_layer.contains(&restriction)),
        None => Ok(false),
    }
}

/// Every n-ary member of the extension clone: one table per base layer
/// member and per assignment of values to the off-base tuples. Guarded by a
/// cap; meant for two-element bases at arity two.
pub fn enumerate_phi_layer(base_layer: &Layer) -> Result<Vec<OpTable>> {
    let base_size = base_layer.carrier().size();
    let expanded = Carrier::new(base_size + 1)?;
    let n = base_layer.arity();
    let universe = expanded.tuple_count(n)?;
    let base_count = base_layer.carrier().tuple_count(n)?;
    let off_count = universe - base_count;

    let mut assignments: usize = 1;
    for _ in 0..off_count {
        assignments = assignments
            .checked_mul(expanded.size())
            .filter(|&a| a.saturating_mul(base_layer.len().max(1)) <= PHI_ENUMERATION_CAP)
            .ok_or(Error::Budget {
                context: "extension layer enumeration",
                size: 0,
                limit: PHI_ENUMERATION_CAP,
            })?;
    }

    let embedded: Vec<(usize, usize)> = base_tuple_ranks(base_size, n).collect();
    let mut is_base_rank = vec![false; universe];
    for &(_, big) in &embedded {
        is_base_rank[big] = true;
    }
    let off_ranks: Vec<usize> = (0..universe).filter(|&r| !is_base_rank[r]).collect();

    let mut out: BTreeSet<OpTable> = BTreeSet::new();
    for member in base_layer.members() {
        let mut table = vec![0u8; universe];
        for &(base_rank, big) in &embedded {
            table[big] = member.values()[base_rank];
        }
        for assignment in 0..assignments {
            let mut a = assignment;
            for &r in &off_ranks {
                table[r] = (a % expanded.size()) as u8;
                a /= expanded.size();
            }
            let entries: Vec<usize> = table.iter().map(|&v| v as usize).collect();
            out.insert(OpTable::new(expanded, n, &entries)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// Closure of a set over the extension clone, in closed form: the base part
/// closes under the base layer, the off-base part is carried along
/// unchanged. Equals the agreement-characterization closure over the fully
/// enumerated extension layer.
pub fn phi_closure(base_layer: &Layer, b: &PointSet) -> Result<PointSet> {
    phi_closure_with(base_layer, b, ExecMode::default())
}

pub fn phi_closure_with(base_layer: &Layer, b: &PointSet, mode: ExecMode) -> Result<PointSet> {
    let base_size = base_layer.carrier().size();
    if b.carrier().size() != base_size + 1 {
        return Err(Error::mismatch(
            "point set carrier must extend the base layer carrier by one element",
        ));
    }
    let n = base_layer.arity();
    if b.arity() != n {
        return Err(Error::mismatch(format!(
            "point set of arity {} against a base layer of arity {}",
            b.arity(),
            n
        )));
    }

    let mut base_part = PointSet::empty(base_layer.carrier(), n)?;
    let embedded: Vec<(usize, usize)> = base_tuple_ranks(base_size, n).collect();
    for &(base_rank, big) in &embedded {
        if b.contains_rank(big) {
            base_part.insert_rank(base_rank);
        }
    }
    let closed_base = closure_with(base_layer, &base_part, mode)?.closure;

    let mut out = b.clone();
    for &(base_rank, big) in &embedded {
        if closed_base.contains_rank(base_rank) {
            out.insert_rank(big);
        } else {
            out.remove_rank(big);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{generate_layer, Budget, CloneSpec};

    fn xor_layer(n: usize) -> Layer {
        let c2 = Carrier::new(2).unwrap();
        let mut spec = CloneSpec::new(c2, false);
        spec.add_generator("xor", OpTable::new(c2, 2, &[0, 1, 1, 0]).unwrap())
            .unwrap();
        generate_layer(&spec, n, &Budget::default()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let layer = xor_layer(2);
        let c3 = Carrier::new(3).unwrap();
        // extend xor by arbitrary off-base values
        let lifted = OpTable::from_fn(c3, 2, |t| {
            if t[0] < 2 && t[1] < 2 {
                t[0] ^ t[1]
            } else {
                2
            }
        })
        .unwrap();
        assert!(phi_membership(&lifted, &layer).unwrap());

        // restriction AND is not an xor term
        let alien = OpTable::from_fn(c3, 2, |t| {
            if t[0] < 2 && t[1] < 2 {
                t[0] & t[1]
            } else {
                0
            }
        })
        .unwrap();
        assert!(!phi_membership(&alien, &layer).unwrap());

        // fresh-element values on a base tuple disqualify
        let leaky = OpTable::from_fn(c3, 2, |t| if t == [0, 0] { 2 } else { 0 }).unwrap();
        assert!(!phi_membership(&leaky, &layer).unwrap());
    }

    #[test]
    fn member_count_formula() {
        let layer = xor_layer(2);
        let members = enumerate_phi_layer(&layer).unwrap();
        // |C^(2)| * 3^(9-4)
        assert_eq!(members.len(), 4 * 243);
        for m in &members {
            assert!(phi_membership(&m, &layer).unwrap());
        }
    }

    #[test]
    fn closure_of_full_space_is_full() {
        let layer = xor_layer(2);
        let c3 = Carrier::new(3).unwrap();
        let full = PointSet::full(c3, 2).unwrap();
        assert!(phi_closure(&layer, &full).unwrap().is_full());
    }

    #[test]
    fn fixed_points_are_the_sets_with_closed_base_part() {
        let layer = xor_layer(2);
        let c2 = Carrier::new(2).unwrap();
        let c3 = Carrier::new(3).unwrap();
        // base part {(0,0),(1,1)} is the equalizer of the two projections
        let diag = PointSet::from_points(c3, 2, [[0, 0], [1, 1], [2, 0]]).unwrap();
        assert_eq!(phi_closure(&layer, &diag).unwrap(), diag);

        // base part {(0,1)} is not xor-closed: its closure gains points
        let off = PointSet::from_points(c3, 2, [[0, 1], [2, 2]]).unwrap();
        let closed = phi_closure(&layer, &off).unwrap();
        assert_ne!(closed, off);
        assert!(off.is_subset_of(&closed).unwrap());
        let base_layer_closure = crate::geometry::closure(
            &layer,
            &PointSet::from_points(c2, 2, [[0, 1]]).unwrap(),
        )
        .unwrap()
        .closure;
        for p in closed.points() {
            if p.iter().all(|&x| x < 2) {
                assert!(base_layer_closure
                    .contains(crate::tables::rank_tuple(c2, &p).unwrap()));
            }
        }
    }
}
