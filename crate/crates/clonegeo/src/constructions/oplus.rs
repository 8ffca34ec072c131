//! One-point extension of a constantive clone: every base operation is
//! lifted to return a fresh absorbing element off the base tuples, and a
//! binary product glues the two halves together. The extension stays
//! constantive, and its members restrict on base tuples either to the
//! constant absorbing value or to a base clone member.
//!
//! The fresh element is always the appended index `|A|`; the distinguished
//! base element playing the unit of the product is a parameter.

use crate::engine::{CloneSpec, Layer};
use crate::error::{Error, Result};
use crate::tables::{Carrier, OpTable, PointSet};

/// Extension parameters: a constantive base presentation plus the base
/// element acting as the unit of the glue product.
#[derive(Clone, Debug)]
pub struct OplusSpec {
    base: CloneSpec,
    one: usize,
}

impl OplusSpec {
    pub fn new(base: CloneSpec, one: usize) -> Result<Self> {
        if !base.constantive() {
            return Err(Error::domain(
                "the extension requires a constantive base presentation",
            ));
        }
        if one >= base.carrier().size() {
            return Err(Error::domain(format!(
                "unit element {one} out of range for carrier of size {}",
                base.carrier().size()
            )));
        }
        Ok(OplusSpec { base, one })
    }

    pub fn base(&self) -> &CloneSpec {
        &self.base
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn expanded_carrier(&self) -> Carrier {
        Carrier::new(self.base.carrier().size() + 1).expect("one more element fits")
    }

    /// Index of the appended absorbing element.
    pub fn absorbing_element(&self) -> usize {
        self.base.carrier().size()
    }

    /// The construction's guarantees are stated for base carriers with at
    /// least 4 elements; smaller bases still build but reports should carry
    /// this flag.
    pub fn hypothesis_violated(&self) -> bool {
        self.base.carrier().size() < 4
    }
}

/// Walk the base-size tuple ranks of an expanded-carrier table. Yields
/// `(base_rank, expanded_rank)` pairs.
pub(crate) fn base_tuple_ranks(
    base_size: usize,
    arity: usize,
) -> impl Iterator<Item = (usize, usize)> {
    let expanded = base_size + 1;
    let count = base_size.pow(arity as u32);
    (0..count).map(move |base_rank| {
        let mut big = 0usize;
        let mut r = base_rank;
        let mut scale = 1usize;
        for _ in 0..arity {
            big += (r % base_size) * scale;
            r /= base_size;
            scale *= expanded;
        }
        (base_rank, big)
    })
}

/// Lift a base operation: agree with it on base tuples, return the appended
/// element everywhere else.
pub fn oplus_lift(f: &OpTable) -> Result<OpTable> {
    let base_size = f.carrier().size();
    let expanded = Carrier::new(base_size + 1)?;
    OpTable::from_fn(expanded, f.arity(), |t| {
        if t.iter().all(|&x| x < base_size) {
            f.eval(t).expect("base tuple")
        } else {
            base_size
        }
    })
}

/// The binary glue product on the expanded carrier: base pairs map to the
/// appended element, the appended pair maps to the unit, and mixed pairs
/// return their base component.
pub fn dot_table(base_carrier: Carrier, one: usize) -> Result<OpTable> {
    if one >= base_carrier.size() {
        return Err(Error::domain(format!(
            "unit element {one} out of range for carrier of size {}",
            base_carrier.size()
        )));
    }
    let base_size = base_carrier.size();
    let expanded = Carrier::new(base_size + 1)?;
    OpTable::from_fn(expanded, 2, |t| {
        let (x, y) = (t[0], t[1]);
        match (x < base_size, y < base_size) {
            (true, true) => base_size,
            (false, false) => one,
            (true, false) => x,
            (false, true) => y,
        }
    })
}

/// Presentation of the extension clone: the lifted generators, the glue
/// product, and all constants.
pub fn build_oplus(spec: &OplusSpec) -> Result<CloneSpec> {
    let expanded = spec.expanded_carrier();
    let mut out = CloneSpec::new(expanded, true);
    for g in spec.base().generators() {
        out.add_generator(format!("{}_oplus", g.name), oplus_lift(&g.op)?)?;
    }
    out.add_generator("dot", dot_table(spec.base().carrier(), spec.one())?)?;
    Ok(out)
}

/// Restriction of an expanded-carrier operation to base tuples, as a table
/// over the base carrier; `None` if some base tuple maps to the appended
/// element.
pub fn restrict_to_base(f: &OpTable) -> Result<Option<OpTable>> {
    let expanded = f.carrier().size();
    if expanded < 2 {
        return Err(Error::domain("expanded carrier needs at least 2 elements"));
    }
    let base_size = expanded - 1;
    let base_carrier = Carrier::new(base_size)?;
    let mut entries = Vec::with_capacity(base_size.pow(f.arity() as u32));
    for (_, big) in base_tuple_ranks(base_size, f.arity()) {
        let v = f.values()[big] as usize;
        if v >= base_size {
            return Ok(None);
        }
        entries.push(v);
    }
    Ok(Some(OpTable::new(base_carrier, f.arity(), &entries)?))
}

/// Restriction shape: on base tuples the operation is either constantly the
/// appended element or a member of the base layer.
pub fn check_fprop(f: &OpTable, base_layer: &Layer) -> Result<bool> {
    let expanded = f.carrier().size();
    if base_layer.carrier().size() + 1 != expanded {
        return Err(Error::mismatch(
            "base layer carrier does not match the expanded carrier",
        ));
    }
    if base_layer.arity() != f.arity() {
        return Err(Error::mismatch(format!(
            "operation of arity {} against a base layer of arity {}",
            f.arity(),
            base_layer.arity()
        )));
    }
    let base_size = expanded - 1;
    let absorbed = base_tuple_ranks(base_size, f.arity())
        .all(|(_, big)| f.values()[big] as usize == base_size);
    if absorbed {
        return Ok(true);
    }
    match restrict_to_base(f)? {
        Some(restriction) => Ok(base_layer.contains(&restriction)),
        None => Ok(false),
    }
}

/// Zero set dichotomy on base tuples: the set of base tuples mapped to the
/// appended element is empty or everything.
pub fn check_extend_restriction(f: &OpTable) -> Result<bool> {
    let expanded = f.carrier().size();
    if expanded < 2 {
        return Err(Error::domain("expanded carrier needs at least 2 elements"));
    }
    let base_size = expanded - 1;
    let mut any = false;
    let mut all = true;
    for (_, big) in base_tuple_ranks(base_size, f.arity()) {
        if f.values()[big] as usize == base_size {
            any = true;
        } else {
            all = false;
        }
    }
    Ok(!any || all)
}

/// Pad a base point set into the expanded carrier and union every tuple
/// containing the appended element.
pub fn build_b0(b: &PointSet, expanded: Carrier) -> Result<PointSet> {
    let base_size = b.carrier().size();
    if expanded.size() != base_size + 1 {
        return Err(Error::mismatch(
            "expanded carrier must have exactly one more element",
        ));
    }
    let k = b.arity();
    let mut out = PointSet::empty(expanded, k)?;
    // everything outside the base block
    let universe = expanded.tuple_count(k)?;
    for rank in 0..universe {
        let mut r = rank;
        let mut off_base = false;
        for _ in 0..k {
            if r % expanded.size() == base_size {
                off_base = true;
                break;
            }
            r /= expanded.size();
        }
        if off_base {
            out.insert_rank(rank);
        }
    }
    for (base_rank, big) in base_tuple_ranks(base_size, k) {
        if b.contains_rank(base_rank) {
            out.insert_rank(big);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{generate_layer, sample_term, Budget};
    use crate::tables::rank_tuple;
    use rand::SeedableRng;

    fn z4_group_spec() -> CloneSpec {
        let c4 = Carrier::new(4).unwrap();
        let mut spec = CloneSpec::new(c4, true);
        spec.add_generator("add", OpTable::from_fn(c4, 2, |t| (t[0] + t[1]) % 4).unwrap())
            .unwrap();
        spec.add_generator("neg", OpTable::from_fn(c4, 1, |t| (4 - t[0]) % 4).unwrap())
            .unwrap();
        spec.add_generator("zero", OpTable::constant(c4, 0).unwrap())
            .unwrap();
        spec
    }

    #[test]
    fn spec_requires_constantive_base() {
        let c4 = Carrier::new(4).unwrap();
        let bare = CloneSpec::new(c4, false);
        assert!(OplusSpec::new(bare, 0).is_err());
        let spec = OplusSpec::new(z4_group_spec(), 1).unwrap();
        assert!(!spec.hypothesis_violated());
        assert_eq!(spec.absorbing_element(), 4);
        assert_eq!(spec.expanded_carrier().size(), 5);
    }

    #[test]
    fn dot_cases() {
        let c4 = Carrier::new(4).unwrap();
        let one = 1;
        let dot = dot_table(c4, one).unwrap();
        let e = 4;
        assert_eq!(dot.eval(&[e, e]).unwrap(), one);
        for x in 0..4 {
            assert_eq!(dot.eval(&[x, e]).unwrap(), x);
            assert_eq!(dot.eval(&[e, x]).unwrap(), x);
            for y in 0..4 {
                assert_eq!(dot.eval(&[x, y]).unwrap(), e);
            }
        }
        assert!(dot_table(c4, 4).is_err());
    }

    #[test]
    fn lift_agrees_on_base_and_absorbs_elsewhere() {
        let base = z4_group_spec();
        let add = base.generators()[0].op.clone();
        let lifted = oplus_lift(&add).unwrap();
        assert_eq!(lifted.carrier().size(), 5);
        assert_eq!(lifted.eval(&[3, 2]).unwrap(), 1);
        assert_eq!(lifted.eval(&[4, 2]).unwrap(), 4);
        assert_eq!(lifted.eval(&[0, 4]).unwrap(), 4);
    }

    #[test]
    fn fprop_holds_for_generators_and_dot() {
        let base = z4_group_spec();
        let budget = Budget::default();
        let layer2 = generate_layer(&base, 2, &budget).unwrap();
        let spec = OplusSpec::new(base.clone(), 0).unwrap();
        let extension = build_oplus(&spec).unwrap();
        for g in extension.generators() {
            if g.op.arity() == 2 {
                assert!(check_fprop(&g.op, &layer2).unwrap(), "{}", g.name);
            }
        }
        // dot restricted to base pairs is constantly the appended element
        let dot = dot_table(base.carrier(), 0).unwrap();
        assert!(restrict_to_base(&dot).unwrap().is_none());
        assert!(check_fprop(&dot, &layer2).unwrap());
    }

    #[test]
    fn extend_restriction_examples() {
        let base = z4_group_spec();
        let add_lifted = oplus_lift(&base.generators()[0].op).unwrap();
        assert!(check_extend_restriction(&add_lifted).unwrap());
        let c5 = Carrier::new(5).unwrap();
        let const_e = OpTable::constant(c5, 4).unwrap();
        assert!(check_extend_restriction(&const_e).unwrap());
        // half-absorbed restriction violates the dichotomy
        let bad = OpTable::from_fn(c5, 1, |t| if t[0] == 0 { 4 } else { 0 }).unwrap();
        assert!(!check_extend_restriction(&bad).unwrap());
    }

    #[test]
    fn sampled_extension_terms_satisfy_both_shape_lemmas() {
        let base = z4_group_spec();
        let budget = Budget::default();
        let layer3 = generate_layer(&base, 3, &budget).unwrap();
        let spec = OplusSpec::new(base, 0).unwrap();
        let extension = build_oplus(&spec).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_c10e);
        for _ in 0..500 {
            let term = sample_term(&extension, 3, 4, &mut rng).unwrap();
            assert!(check_fprop(&term, &layer3).unwrap());
            assert!(check_extend_restriction(&term).unwrap());
        }
    }

    #[test]
    fn b0_counting() {
        let c4 = Carrier::new(4).unwrap();
        let c5 = Carrier::new(5).unwrap();
        let s = crate::constructions::zmod::ModExpansionSpec::new(2, 1, 2).unwrap();
        let q = crate::constructions::zmod::build_q(&s, 3).unwrap();
        assert_eq!(q.len(), 37);
        let b0 = build_b0(&q, c5).unwrap();
        assert_eq!(b0.len(), 37 + (125 - 64));

        let empty = PointSet::empty(c4, 3).unwrap();
        assert_eq!(build_b0(&empty, c5).unwrap().len(), 125 - 64);
        let full = PointSet::full(c4, 3).unwrap();
        assert_eq!(build_b0(&full, c5).unwrap().len(), 125);

        // re-ranked base points land on the embedded coordinates
        let b = PointSet::from_points(c4, 2, [[3, 1]]).unwrap();
        let lifted = build_b0(&b, c5).unwrap();
        assert!(lifted.contains(rank_tuple(c5, &[3, 1]).unwrap()));
        assert!(!lifted.contains(rank_tuple(c5, &[2, 1]).unwrap()));
    }
}
