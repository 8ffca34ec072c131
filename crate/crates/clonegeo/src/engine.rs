//! Generator presentations of clones and per-arity layer generation.
//!
//! The n-ary part of a generated clone is the least set of n-ary tables
//! containing the projections (and the constants, for constantive
//! presentations) that is closed under superposition with the generators.
//! [`generate_layer`] computes it as a fixed point; [`term_oracle`] is a
//! deliberately naive enumeration of bounded-height composition trees kept
//! as an independent cross-check.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::tables::{Carrier, OpTable};

/// Generators with arity above this would make the superposition pass
/// intractable anyway.
const MAX_GENERATOR_ARITY: usize = 8;

const ORACLE_TABLE_CAP: usize = 1 << 17;
const ORACLE_WORK_CAP: usize = 1 << 26;

/// A named generator of a clone presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedOp {
    pub name: String,
    pub op: OpTable,
}

/// A clone presented by its carrier, a list of named generators and a
/// constantive flag. When the flag is set every unary constant is an
/// implicit generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CloneSpec {
    carrier: Carrier,
    constantive: bool,
    generators: Vec<NamedOp>,
}

impl CloneSpec {
    pub fn new(carrier: Carrier, constantive: bool) -> Self {
        CloneSpec {
            carrier,
            constantive,
            generators: Vec::new(),
        }
    }

    pub fn add_generator(&mut self, name: impl Into<String>, op: OpTable) -> Result<()> {
        let name = name.into();
        if op.carrier() != self.carrier {
            return Err(Error::mismatch(format!(
                "generator {name} lives on a different carrier"
            )));
        }
        if self.generators.iter().any(|g| g.name == name) {
            return Err(Error::domain(format!("duplicate generator name {name}")));
        }
        self.generators.push(NamedOp { name, op });
        Ok(())
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn constantive(&self) -> bool {
        self.constantive
    }

    pub fn generators(&self) -> &[NamedOp] {
        &self.generators
    }

    /// Hex digest of the canonical serialization; used as a cache key.
    pub fn digest(&self) -> String {
        crate::formats::spec_digest(self)
    }
}

/// Resource limits for layer generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_layer_size: usize,
    pub max_arity: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_layer_size: 1 << 20,
            max_arity: 4,
        }
    }
}

/// The complete n-ary part of a generated clone: deduplicated tables in
/// canonical (lexicographic) order. Frozen layers are immutable and freely
/// shareable across threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    carrier: Carrier,
    arity: usize,
    members: Vec<OpTable>,
}

impl Layer {
    /// Freeze an arbitrary family of same-shape tables into a layer-like
    /// value (deduplicated, canonically sorted). Used for function families
    /// that are not presented by generators.
    pub fn from_tables(
        carrier: Carrier,
        arity: usize,
        tables: impl IntoIterator<Item = OpTable>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for t in tables {
            if t.carrier() != carrier {
                return Err(Error::mismatch("layer member on a different carrier"));
            }
            if t.arity() != arity {
                return Err(Error::mismatch("layer member of a different arity"));
            }
            set.insert(t);
        }
        Ok(Layer {
            carrier,
            arity,
            members: set.into_iter().collect(),
        })
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in canonical order.
    pub fn members(&self) -> &[OpTable] {
        &self.members
    }

    pub fn contains(&self, f: &OpTable) -> bool {
        self.position(f).is_some()
    }

    pub fn position(&self, f: &OpTable) -> Option<usize> {
        if f.carrier() != self.carrier || f.arity() != self.arity {
            return None;
        }
        self.members.binary_search(f).ok()
    }
}

/// Membership by table lookup; the arity must match the layer.
pub fn layer_contains(layer: &Layer, f: &OpTable) -> Result<bool> {
    if f.carrier() != layer.carrier() {
        return Err(Error::mismatch("operation on a different carrier"));
    }
    if f.arity() != layer.arity() {
        return Err(Error::mismatch(format!(
            "operation of arity {} against a layer of arity {}",
            f.arity(),
            layer.arity()
        )));
    }
    Ok(layer.contains(f))
}

/// Classes of one generator argument position. Two elements fall in the same
/// class iff swapping them in that position never changes the generator's
/// value; compositions therefore depend only on the operands' class
/// signatures, which keeps high-arity generators tractable.
struct PositionClasses {
    kernel: Vec<u8>,
    by_sig: HashMap<Vec<u8>, usize>,
    reps: Vec<usize>,
    old_count: usize,
}

struct GenState {
    table: OpTable,
    positions: Vec<PositionClasses>,
}

fn argument_kernel(g: &OpTable, pos: usize) -> Vec<u8> {
    let size = g.carrier().size();
    let m = g.arity();
    let stride = size.pow((m - 1 - pos) as u32);
    let table = g.values();
    let equivalent = |a: usize, b: usize| {
        for r in 0..table.len() {
            if (r / stride) % size != a {
                continue;
            }
            if table[r] != table[r - a * stride + b * stride] {
                return false;
            }
        }
        true
    };
    let mut class_of = vec![0u8; size];
    let mut reps: Vec<usize> = Vec::new();
    'elems: for a in 0..size {
        for (ci, &r) in reps.iter().enumerate() {
            if equivalent(a, r) {
                class_of[a] = ci as u8;
                continue 'elems;
            }
        }
        class_of[a] = reps.len() as u8;
        reps.push(a);
    }
    class_of
}

pub fn generate_layer(spec: &CloneSpec, n: usize, budget: &Budget) -> Result<Layer> {
    generate_layer_with(spec, n, budget, ExecMode::default())
}

/// Least fixed point of superposition with the generators, starting from the
/// projections, the constants (if constantive) and the arity-n minors of the
/// generators.
pub fn generate_layer_with(
    spec: &CloneSpec,
    n: usize,
    budget: &Budget,
    mode: ExecMode,
) -> Result<Layer> {
    if n == 0 {
        return Err(Error::domain("layers must have positive arity"));
    }
    if n > budget.max_arity {
        return Err(Error::ArityCap {
            requested: n,
            limit: budget.max_arity,
        });
    }
    let carrier = spec.carrier();
    let size = carrier.size();
    for g in spec.generators() {
        if g.op.arity() > MAX_GENERATOR_ARITY {
            return Err(Error::domain(format!(
                "generator {} has arity {}, beyond the supported maximum {MAX_GENERATOR_ARITY}",
                g.name,
                g.op.arity()
            )));
        }
    }

    let mut members: Vec<OpTable> = Vec::new();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();

    let push = |members: &mut Vec<OpTable>, seen: &mut HashSet<Vec<u8>>, t: OpTable| {
        if seen.insert(t.values().to_vec()) {
            members.push(t);
        }
    };

    for k in 1..=n {
        push(&mut members, &mut seen, OpTable::projection(carrier, n, k)?);
    }
    if spec.constantive() {
        for c in carrier.elements() {
            push(&mut members, &mut seen, OpTable::filled(carrier, n, c)?);
        }
    }
    for g in spec.generators() {
        let k = g.op.arity();
        let combos = carrier_pow(n, k)?;
        let mut sigma = vec![1usize; k];
        for _ in 0..combos {
            push(&mut members, &mut seen, g.op.minor(&sigma, n)?);
            for slot in (0..k).rev() {
                sigma[slot] += 1;
                if sigma[slot] <= n {
                    break;
                }
                sigma[slot] = 1;
            }
        }
    }
    check_budget(members.len(), budget)?;

    let mut gens: Vec<GenState> = spec
        .generators()
        .iter()
        .map(|g| GenState {
            positions: (0..g.op.arity())
                .map(|pos| PositionClasses {
                    kernel: argument_kernel(&g.op, pos),
                    by_sig: HashMap::new(),
                    reps: Vec::new(),
                    old_count: 0,
                })
                .collect(),
            table: g.op.clone(),
        })
        .collect();

    let mut assimilated = 0usize;
    loop {
        for gs in &mut gens {
            for pc in &mut gs.positions {
                pc.old_count = pc.reps.len();
                for idx in assimilated..members.len() {
                    let sig: Vec<u8> = members[idx]
                        .values()
                        .iter()
                        .map(|&v| pc.kernel[v as usize])
                        .collect();
                    let next = pc.reps.len();
                    pc.by_sig.entry(sig).or_insert_with(|| {
                        pc.reps.push(idx);
                        next
                    });
                }
            }
        }
        assimilated = members.len();

        let mut novel: BTreeSet<Vec<u8>> = BTreeSet::new();
        for gs in &gens {
            let m = gs.table.arity();
            let lists: Vec<&[usize]> = gs.positions.iter().map(|pc| pc.reps.as_slice()).collect();
            let olds: Vec<usize> = gs.positions.iter().map(|pc| pc.old_count).collect();
            let mut strides = vec![1usize; m];
            for j in (0..m - 1).rev() {
                strides[j] = strides[j + 1] * lists[j + 1].len();
            }
            let total = strides[0] * lists[0].len();
            let g_table = gs.table.values();
            let members_ref = &members;
            let seen_ref = &seen;
            let found = exec::fold_indices(
                mode,
                total,
                BTreeSet::new,
                |mut acc: BTreeSet<Vec<u8>>, t| {
                    let mut all_old = true;
                    let mut arg: [&[u8]; MAX_GENERATOR_ARITY] = [&[]; MAX_GENERATOR_ARITY];
                    for j in 0..m {
                        let c = (t / strides[j]) % lists[j].len();
                        if c >= olds[j] {
                            all_old = false;
                        }
                        arg[j] = members_ref[lists[j][c]].values();
                    }
                    if all_old {
                        return acc;
                    }
                    let len = arg[0].len();
                    let mut out = Vec::with_capacity(len);
                    for r in 0..len {
                        let mut idx = 0usize;
                        for a in arg.iter().take(m) {
                            idx = idx * size + a[r] as usize;
                        }
                        out.push(g_table[idx]);
                    }
                    if !seen_ref.contains(&out) {
                        acc.insert(out);
                    }
                    acc
                },
                |mut a, b| {
                    a.extend(b);
                    a
                },
            );
            novel.extend(found);
        }

        let mut added = false;
        for t in novel {
            if seen.insert(t.clone()) {
                members.push(OpTable::from_raw(carrier, n, t));
                added = true;
            }
        }
        check_budget(members.len(), budget)?;
        if !added {
            break;
        }
    }

    members.sort();
    Ok(Layer {
        carrier,
        arity: n,
        members,
    })
}

fn carrier_pow(base: usize, exp: usize) -> Result<usize> {
    let mut out: usize = 1;
    for _ in 0..exp {
        out = out
            .checked_mul(base)
            .ok_or_else(|| Error::domain("minor map space too large"))?;
    }
    Ok(out)
}

fn check_budget(len: usize, budget: &Budget) -> Result<()> {
    if len > budget.max_layer_size {
        return Err(Error::Budget {
            context: "layer generation",
            size: len,
            limit: budget.max_layer_size,
        });
    }
    Ok(())
}

/// True iff `d` is ternary and satisfies `d(a,b,b) = d(b,b,a) = a` for all
/// `a, b`; checked exhaustively over all pairs.
pub fn is_malcev(d: &OpTable) -> bool {
    if d.arity() != 3 {
        return false;
    }
    let size = d.carrier().size();
    for a in 0..size {
        for b in 0..size {
            let abb = d.eval_rank((a * size + b) * size + b);
            let bba = d.eval_rank((b * size + b) * size + a);
            if abb != a || bba != a {
                return false;
            }
        }
    }
    true
}

/// The canonically first Mal'cev member of the ternary layer, if any.
pub fn find_malcev(spec: &CloneSpec, budget: &Budget) -> Result<Option<OpTable>> {
    let layer = generate_layer(spec, 3, budget)?;
    Ok(layer.members().iter().find(|d| is_malcev(d)).cloned())
}

/// True iff every unary constant occurs in the unary layer.
pub fn is_constantive_layer(spec: &CloneSpec, budget: &Budget) -> Result<bool> {
    let layer = generate_layer(spec, 1, budget)?;
    for c in spec.carrier().elements() {
        if !layer.contains(&OpTable::constant(spec.carrier(), c)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All tables realized by composition trees of height at most `depth` whose
/// internal nodes are generators and whose leaves are projections (plus
/// constants for constantive presentations).
///
/// This is the slow cross-validation oracle: it enumerates trees directly
/// and shares no machinery with [`generate_layer`] beyond table
/// composition. Sized for small instances (carrier size <= 3, arity <= 3,
/// depth <= 4); larger requests fail with a budget error once the internal
/// caps are hit.
pub fn term_oracle(spec: &CloneSpec, n: usize, depth: usize) -> Result<Vec<OpTable>> {
    if n == 0 {
        return Err(Error::domain("terms must have positive arity"));
    }
    let carrier = spec.carrier();
    let mut current: BTreeSet<OpTable> = BTreeSet::new();
    for k in 1..=n {
        current.insert(OpTable::projection(carrier, n, k)?);
    }
    if spec.constantive() {
        for c in carrier.elements() {
            current.insert(OpTable::filled(carrier, n, c)?);
        }
    }
    for _ in 0..depth {
        let snapshot: Vec<OpTable> = current.iter().cloned().collect();
        let before = current.len();
        for g in spec.generators() {
            let m = g.op.arity();
            let combos = snapshot
                .len()
                .checked_pow(m as u32)
                .filter(|&c| c <= ORACLE_WORK_CAP)
                .ok_or(Error::Budget {
                    context: "term oracle",
                    size: snapshot.len(),
                    limit: ORACLE_WORK_CAP,
                })?;
            let mut pick = vec![0usize; m];
            for _ in 0..combos {
                let args: Vec<&OpTable> = pick.iter().map(|&i| &snapshot[i]).collect();
                current.insert(g.op.compose_refs(&args)?);
                if current.len() > ORACLE_TABLE_CAP {
                    return Err(Error::Budget {
                        context: "term oracle",
                        size: current.len(),
                        limit: ORACLE_TABLE_CAP,
                    });
                }
                for slot in (0..m).rev() {
                    pick[slot] += 1;
                    if pick[slot] < snapshot.len() {
                        break;
                    }
                    pick[slot] = 0;
                }
            }
        }
        if current.len() == before {
            break; // saturated: deeper trees realize nothing new
        }
    }
    Ok(current.into_iter().collect())
}

/// Run the oracle until one extra round realizes nothing new.
pub fn term_oracle_saturated(spec: &CloneSpec, n: usize) -> Result<Vec<OpTable>> {
    term_oracle(spec, n, 64)
}

/// Evaluate one random composition tree of height at most `depth` over the
/// presentation's generators; leaves are projections and, for constantive
/// presentations, constants. Deterministic for a fixed seed.
pub fn sample_term<R: rand::Rng>(
    spec: &CloneSpec,
    arity: usize,
    depth: usize,
    rng: &mut R,
) -> Result<OpTable> {
    if arity == 0 {
        return Err(Error::domain("terms must have positive arity"));
    }
    let leaf = |rng: &mut R| -> Result<OpTable> {
        if spec.constantive() && rng.random_bool(0.3) {
            let c = rng.random_range(0..spec.carrier().size());
            OpTable::filled(spec.carrier(), arity, c)
        } else {
            let k = rng.random_range(1..=arity);
            OpTable::projection(spec.carrier(), arity, k)
        }
    };
    if depth == 0 || spec.generators().is_empty() || rng.random_bool(0.25) {
        return leaf(rng);
    }
    let g = &spec.generators()[rng.random_range(0..spec.generators().len())];
    let args = (0..g.op.arity())
        .map(|_| sample_term(spec, arity, depth - 1, rng))
        .collect::<Result<Vec<_>>>()?;
    g.op.compose(&args)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::rank_tuple;

    fn carrier(size: usize) -> Carrier {
        Carrier::new(size).unwrap()
    }

    pub(crate) fn xor_spec() -> CloneSpec {
        let c2 = carrier(2);
        let mut spec = CloneSpec::new(c2, false);
        spec.add_generator("xor", OpTable::new(c2, 2, &[0, 1, 1, 0]).unwrap())
            .unwrap();
        spec
    }

    fn meet_spec() -> CloneSpec {
        let c2 = carrier(2);
        let mut spec = CloneSpec::new(c2, false);
        spec.add_generator("and", OpTable::new(c2, 2, &[0, 0, 0, 1]).unwrap())
            .unwrap();
        spec
    }

    fn lattice_spec() -> CloneSpec {
        let c2 = carrier(2);
        let mut spec = CloneSpec::new(c2, false);
        spec.add_generator("and", OpTable::new(c2, 2, &[0, 0, 0, 1]).unwrap())
            .unwrap();
        spec.add_generator("or", OpTable::new(c2, 2, &[0, 1, 1, 1]).unwrap())
            .unwrap();
        spec
    }

    #[test]
    fn xor_layers_match_oracle_expectations() {
        // Oracle first: the frozen expectations below were computed by
        // term_oracle, which enumerates composition trees directly.
        let spec = xor_spec();
        let budget = Budget::default();

        let oracle1 = term_oracle_saturated(&spec, 1).unwrap();
        let c2 = carrier(2);
        let identity = OpTable::projection(c2, 1, 1).unwrap();
        let zero = OpTable::constant(c2, 0).unwrap();
        assert_eq!(oracle1.len(), 2);
        assert!(oracle1.contains(&identity) && oracle1.contains(&zero));

        let layer1 = generate_layer(&spec, 1, &budget).unwrap();
        assert_eq!(layer1.members(), oracle1.as_slice());

        let oracle2 = term_oracle_saturated(&spec, 2).unwrap();
        assert_eq!(oracle2.len(), 4);
        let layer2 = generate_layer(&spec, 2, &budget).unwrap();
        assert_eq!(layer2.members(), oracle2.as_slice());
        assert!(layer2.contains(&OpTable::new(c2, 2, &[0, 1, 1, 0]).unwrap()));
        assert!(layer2.contains(&OpTable::filled(c2, 2, 0).unwrap()));
    }

    #[test]
    fn empty_spec_layer_is_projections() {
        let spec = CloneSpec::new(carrier(3), false);
        let layer = generate_layer(&spec, 2, &Budget::default()).unwrap();
        assert_eq!(layer.len(), 2);
        assert!(layer.contains(&OpTable::projection(carrier(3), 2, 1).unwrap()));
        assert!(layer.contains(&OpTable::projection(carrier(3), 2, 2).unwrap()));
    }

    #[test]
    fn layer_is_a_fixed_point_and_minor_closed() {
        for spec in [xor_spec(), lattice_spec()] {
            let layer = generate_layer(&spec, 2, &Budget::default()).unwrap();
            // one more superposition pass adds nothing
            for g in spec.generators() {
                let m = g.op.arity();
                let mut pick = vec![0usize; m];
                loop {
                    let args: Vec<OpTable> =
                        pick.iter().map(|&i| layer.members()[i].clone()).collect();
                    assert!(layer.contains(&g.op.compose(&args).unwrap()));
                    let mut done = true;
                    for slot in (0..m).rev() {
                        pick[slot] += 1;
                        if pick[slot] < layer.len() {
                            done = false;
                            break;
                        }
                        pick[slot] = 0;
                    }
                    if done {
                        break;
                    }
                }
            }
            // minor-closed within the arity
            let n = layer.arity();
            for f in layer.members() {
                for code in 0..n.pow(n as u32) {
                    let mut sigma = Vec::with_capacity(n);
                    let mut c = code;
                    for _ in 0..n {
                        sigma.push(c % n + 1);
                        c /= n;
                    }
                    assert!(layer.contains(&f.minor(&sigma, n).unwrap()));
                }
            }
        }
    }

    #[test]
    fn layer_contains_checks_arity() {
        let spec = xor_spec();
        let layer = generate_layer(&spec, 2, &Budget::default()).unwrap();
        let p1 = OpTable::projection(carrier(2), 2, 1).unwrap();
        assert!(layer_contains(&layer, &p1).unwrap());
        let unary = OpTable::projection(carrier(2), 1, 1).unwrap();
        assert!(layer_contains(&layer, &unary).is_err());
    }

    #[test]
    fn budget_and_arity_cap_errors() {
        let spec = xor_spec();
        let tiny = Budget {
            max_layer_size: 2,
            max_arity: 4,
        };
        match generate_layer(&spec, 2, &tiny) {
            Err(Error::Budget { size, limit, .. }) => {
                assert!(size > limit);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        let capped = Budget {
            max_layer_size: 1 << 20,
            max_arity: 2,
        };
        assert!(matches!(
            generate_layer(&spec, 3, &capped),
            Err(Error::ArityCap {
                requested: 3,
                limit: 2
            })
        ));
    }

    #[test]
    fn malcev_examples() {
        let c3 = carrier(3);
        // x - y + z on Z_3 is its own Mal'cev witness
        let mut spec = CloneSpec::new(c3, false);
        let d = OpTable::from_fn(c3, 3, |t| (t[0] + 2 * t[1] + t[2]) % 3).unwrap();
        spec.add_generator("d", d.clone()).unwrap();
        assert_eq!(find_malcev(&spec, &Budget::default()).unwrap(), Some(d));

        // the clone of + on Z_3 contains exactly one Mal'cev table: x+2y+z
        let mut plus = CloneSpec::new(c3, false);
        plus.add_generator("add", OpTable::from_fn(c3, 2, |t| (t[0] + t[1]) % 3).unwrap())
            .unwrap();
        let found = find_malcev(&plus, &Budget::default()).unwrap().unwrap();
        let expected = OpTable::from_fn(c3, 3, |t| (t[0] + 2 * t[1] + t[2]) % 3).unwrap();
        assert!(is_malcev(&found));
        assert_eq!(found, expected);

        // the meet semilattice has none
        assert_eq!(find_malcev(&meet_spec(), &Budget::default()).unwrap(), None);
    }

    #[test]
    fn constantive_detection() {
        let budget = Budget::default();
        let mut flagged = CloneSpec::new(carrier(2), true);
        flagged
            .add_generator("xor", OpTable::new(carrier(2), 2, &[0, 1, 1, 0]).unwrap())
            .unwrap();
        assert!(is_constantive_layer(&flagged, &budget).unwrap());

        // constant 1 is not an xor term
        assert!(!is_constantive_layer(&xor_spec(), &budget).unwrap());

        let c4 = carrier(4);
        let mut group = CloneSpec::new(c4, true);
        group
            .add_generator("add", OpTable::from_fn(c4, 2, |t| (t[0] + t[1]) % 4).unwrap())
            .unwrap();
        group
            .add_generator("neg", OpTable::from_fn(c4, 1, |t| (4 - t[0]) % 4).unwrap())
            .unwrap();
        group.add_generator("zero", OpTable::constant(c4, 0).unwrap()).unwrap();
        assert!(is_constantive_layer(&group, &budget).unwrap());
    }

    #[test]
    fn oracle_depth_zero_and_monotonicity() {
        let spec = xor_spec();
        let depth0 = term_oracle(&spec, 2, 0).unwrap();
        assert_eq!(depth0.len(), 2); // both projections, no constants

        let mut flagged = CloneSpec::new(carrier(2), true);
        flagged
            .add_generator("xor", OpTable::new(carrier(2), 2, &[0, 1, 1, 0]).unwrap())
            .unwrap();
        assert_eq!(term_oracle(&flagged, 2, 0).unwrap().len(), 4);

        let mut previous = depth0;
        for depth in 1..=4 {
            let next = term_oracle(&spec, 2, depth).unwrap();
            let prev_set: BTreeSet<_> = previous.iter().cloned().collect();
            let next_set: BTreeSet<_> = next.iter().cloned().collect();
            assert!(prev_set.is_subset(&next_set));
            previous = next;
        }
        assert_eq!(term_oracle(&spec, 2, 2).unwrap().len(), 4);
    }

    #[test]
    fn oracle_equivalence_for_lattice_clone() {
        let spec = lattice_spec();
        let budget = Budget::default();
        for n in 1..=3 {
            let layer = generate_layer(&spec, n, &budget).unwrap();
            let oracle = term_oracle_saturated(&spec, n).unwrap();
            assert_eq!(layer.members(), oracle.as_slice());
        }
    }

    #[test]
    fn generation_is_deterministic_across_modes() {
        let spec = lattice_spec();
        let budget = Budget::default();
        let seq = generate_layer_with(&spec, 3, &budget, ExecMode::Sequential).unwrap();
        let par = generate_layer_with(&spec, 3, &budget, ExecMode::Parallel).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn malcev_identities_hold_exhaustively() {
        let c4 = carrier(4);
        let d = OpTable::from_fn(c4, 3, |t| (t[0] + 4 - t[1] + t[2]) % 4).unwrap();
        assert!(is_malcev(&d));
        for a in 0..4 {
            for b in 0..4 {
                let abb = rank_tuple(c4, &[a, b, b]).unwrap();
                assert_eq!(d.eval_rank(abb.rank), a);
            }
        }
        let not_malcev = OpTable::filled(c4, 3, 0).unwrap();
        assert!(!is_malcev(&not_malcev));
    }
}
