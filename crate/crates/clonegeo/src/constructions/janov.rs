//! Three-element algebras generated by indicator operations of the
//! almost-constant tuple families `D_m`, together with the ambient function
//! families `F` and `F'` that bound their clones.
//!
//! On `Z = {0,1,2}`, `D_m` consists of the `m` tuples with a single 1 and
//! 2 everywhere else; `g_i` is the indicator of `D_i`. `F` collects the
//! 0/1-valued operations whose 1-preimage sits inside `D_n`, and `F'` closes
//! `F` under inessential arguments and adds the projections.

use std::collections::BTreeSet;

use crate::engine::CloneSpec;
use crate::error::{Error, Result};
use crate::tables::{rank_tuple, Carrier, OpTable, PointSet};

pub fn z_carrier() -> Carrier {
    Carrier::new(3).expect("three elements")
}

/// Generator indices for the algebra; every index is at least 2. The empty
/// set presents the projections-only clone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JanovSpec {
    indices: BTreeSet<usize>,
}

impl JanovSpec {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&bad) = indices.iter().find(|&&i| i < 2) {
            return Err(Error::domain(format!(
                "generator index {bad} must be at least 2"
            )));
        }
        Ok(JanovSpec { indices })
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }
}

/// The m-tuple family with one coordinate 1 and the rest 2; empty for m = 1.
pub fn d_set(m: usize) -> Result<PointSet> {
    if m == 0 {
        return Err(Error::domain("tuple length must be positive"));
    }
    let carrier = z_carrier();
    let mut set = PointSet::empty(carrier, m)?;
    if m == 1 {
        return Ok(set);
    }
    for pos in 0..m {
        let mut tuple = vec![2usize; m];
        tuple[pos] = 1;
        set.insert_rank(rank_tuple(carrier, &tuple)?.rank);
    }
    Ok(set)
}

/// The i-ary indicator of `D_i`: value 1 on its members, 0 elsewhere.
pub fn g_table(i: usize) -> Result<OpTable> {
    if i < 2 {
        return Err(Error::domain("indicator index must be at least 2"));
    }
    let carrier = z_carrier();
    let d = d_set(i)?;
    OpTable::from_fn(carrier, i, |t| {
        let rank = rank_tuple(carrier, t).expect("in-range tuple").rank;
        usize::from(d.contains_rank(rank))
    })
}

/// Presentation on three elements generated by the chosen indicators;
/// not constantive.
pub fn build_janov(spec: &JanovSpec) -> Result<CloneSpec> {
    let mut out = CloneSpec::new(z_carrier(), false);
    for i in spec.indices() {
        out.add_generator(format!("g{i}"), g_table(i)?)?;
    }
    Ok(out)
}

/// Membership in `F`: all values in {0,1} and the 1-preimage inside `D_n`.
pub fn in_f(f: &OpTable) -> Result<bool> {
    if f.carrier() != z_carrier() {
        return Err(Error::domain("the family F lives on the 3-element carrier"));
    }
    let d = d_set(f.arity())?;
    for (rank, &v) in f.values().iter().enumerate() {
        match v {
            0 => {}
            1 => {
                if !d.contains_rank(rank) {
                    return Ok(false);
                }
            }
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Membership in `F'`: a projection, or a member of `F` up to inessential
/// arguments. The latter is decided by restricting to the essential
/// coordinates (filling the dropped ones arbitrarily) and testing `F`;
/// constants restrict to a unary table, so only the constant 0 passes.
pub fn in_f_prime(f: &OpTable) -> Result<bool> {
    if f.carrier() != z_carrier() {
        return Err(Error::domain("the family F' lives on the 3-element carrier"));
    }
    if f.as_projection().is_some() {
        return Ok(true);
    }
    let essential = f.essential_coordinates();
    let restricted = restrict_to_positions(f, &essential)?;
    in_f(&restricted)
}

/// Table of `f` as a function of the listed 1-based positions only, with
/// every dropped position pinned to 0. Only meaningful when `f` does not
/// depend on the dropped positions; an empty list yields a unary constant.
fn restrict_to_positions(f: &OpTable, positions: &[usize]) -> Result<OpTable> {
    let carrier = f.carrier();
    if positions.is_empty() {
        return OpTable::constant(carrier, f.values()[0] as usize);
    }
    OpTable::from_fn(carrier, positions.len(), |short| {
        let mut full = vec![0usize; f.arity()];
        for (slot, &pos) in positions.iter().enumerate() {
            full[pos - 1] = short[slot];
        }
        f.eval(&full).expect("in-range tuple")
    })
}

/// All members of `F` at arity n: one indicator per subset of `D_n`.
pub fn enumerate_f(n: usize) -> Result<Vec<OpTable>> {
    if n == 0 {
        return Err(Error::domain("arity must be positive"));
    }
    let carrier = z_carrier();
    let d_ranks: Vec<usize> = d_set(n)?.iter_ranks().collect();
    let len = carrier.tuple_count(n)?;
    let mut out = Vec::with_capacity(1 << d_ranks.len());
    for mask in 0u32..(1 << d_ranks.len()) {
        let mut entries = vec![0usize; len];
        for (bit, &rank) in d_ranks.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                entries[rank] = 1;
            }
        }
        out.push(OpTable::new(carrier, n, &entries)?);
    }
    out.sort();
    Ok(out)
}

/// All members of `F'` at arity n, enumerated directly from the definition:
/// the projections plus every extension of an `F` member along an increasing
/// choice of argument positions. Kept independent of [`in_f_prime`] as a
/// cross-check.
pub fn enumerate_f_prime(n: usize) -> Result<Vec<OpTable>> {
    if n == 0 {
        return Err(Error::domain("arity must be positive"));
    }
    let carrier = z_carrier();
    let mut set: BTreeSet<OpTable> = BTreeSet::new();
    for k in 1..=n {
        set.insert(OpTable::projection(carrier, n, k)?);
    }
    for mask in 1u32..(1 << n) {
        let positions: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| i + 1).collect();
        for g in enumerate_f(positions.len())? {
            let extension = OpTable::from_fn(carrier, n, |t| {
                let short: Vec<usize> = positions.iter().map(|&p| t[p - 1]).collect();
                g.eval(&short).expect("in-range tuple")
            })?;
            set.insert(extension);
        }
    }
    Ok(set.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_set_examples() {
        assert!(d_set(1).unwrap().is_empty());
        let d2 = d_set(2).unwrap();
        assert_eq!(d2.points(), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(d_set(4).unwrap().len(), 4);
        assert!(d_set(0).is_err());
    }

    #[test]
    fn g_tables() {
        let g2 = g_table(2).unwrap();
        // value 1 exactly at the ranks of (1,2) and (2,1)
        let mut expected = vec![0usize; 9];
        expected[5] = 1;
        expected[7] = 1;
        assert_eq!(
            g2.values().iter().map(|&v| v as usize).collect::<Vec<_>>(),
            expected
        );
        let g3 = g_table(3).unwrap();
        assert_eq!(g3.eval(&[2, 2, 1]).unwrap(), 1);
        assert_eq!(g3.eval(&[2, 2, 2]).unwrap(), 0);
        assert!(g_table(1).is_err());
    }

    #[test]
    fn g2_essential_coordinates() {
        // flipping (1,2) to (0,2) changes the value, and symmetrically
        let g2 = g_table(2).unwrap();
        assert_eq!(g2.essential_coordinates(), vec![1, 2]);
    }

    #[test]
    fn minor_of_g2_swaps_arguments() {
        let g2 = g_table(2).unwrap();
        let swapped = g2.minor(&[2, 1], 2).unwrap();
        assert_eq!(swapped.eval(&[2, 1]).unwrap(), 1);
    }

    #[test]
    fn spec_validation() {
        assert!(JanovSpec::new([1, 2]).is_err());
        let spec = JanovSpec::new([3, 2]).unwrap();
        assert_eq!(spec.indices().collect::<Vec<_>>(), vec![2, 3]);
        let clone_spec = build_janov(&spec).unwrap();
        assert_eq!(clone_spec.generators().len(), 2);
        assert!(!clone_spec.constantive());
        assert!(build_janov(&JanovSpec::new([]).unwrap())
            .unwrap()
            .generators()
            .is_empty());
    }

    #[test]
    fn f_membership_examples() {
        for i in [2, 3, 4] {
            assert!(in_f(&g_table(i).unwrap()).unwrap());
        }
        for arity in 1..=3 {
            let zero = OpTable::filled(z_carrier(), arity, 0).unwrap();
            assert!(in_f(&zero).unwrap());
        }
        let one_binary = OpTable::filled(z_carrier(), 2, 1).unwrap();
        assert!(!in_f(&one_binary).unwrap());
        let two_valued = OpTable::filled(z_carrier(), 2, 2).unwrap();
        assert!(!in_f(&two_valued).unwrap());
        let p1 = OpTable::projection(z_carrier(), 2, 1).unwrap();
        assert!(!in_f(&p1).unwrap());
        assert!(in_f_prime(&p1).unwrap());
    }

    #[test]
    fn f_prime_enumeration_counts() {
        // arity 2: two projections, constant 0, the two singleton
        // indicators and g_2 itself
        assert_eq!(enumerate_f_prime(2).unwrap().len(), 6);
        assert_eq!(enumerate_f(2).unwrap().len(), 4);
        assert_eq!(enumerate_f(1).unwrap().len(), 1);
    }

    #[test]
    fn f_prime_predicate_agrees_with_enumeration() {
        // exhaust all unary and binary tables on Z
        for n in 1..=2 {
            let members: BTreeSet<OpTable> = enumerate_f_prime(n).unwrap().into_iter().collect();
            let carrier = z_carrier();
            let len = carrier.tuple_count(n).unwrap();
            let total = 3usize.pow(len as u32);
            for code in 0..total {
                let mut entries = Vec::with_capacity(len);
                let mut c = code;
                for _ in 0..len {
                    entries.push(c % 3);
                    c /= 3;
                }
                let table = OpTable::new(carrier, n, &entries).unwrap();
                assert_eq!(
                    in_f_prime(&table).unwrap(),
                    members.contains(&table),
                    "disagreement at arity {n} on {table:?}"
                );
            }
        }
        // at arity 3 and 4 the table space is huge: check the enumerated
        // members are accepted and random tables agree both ways
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_c10e);
        for n in 3..=4 {
            let members: BTreeSet<OpTable> = enumerate_f_prime(n).unwrap().into_iter().collect();
            for m in &members {
                assert!(in_f_prime(m).unwrap());
            }
            let carrier = z_carrier();
            let len = carrier.tuple_count(n).unwrap();
            for _ in 0..300 {
                let entries: Vec<usize> = (0..len).map(|_| rng.random_range(0..3)).collect();
                let table = OpTable::new(carrier, n, &entries).unwrap();
                assert_eq!(in_f_prime(&table).unwrap(), members.contains(&table));
            }
        }
    }
}
