//! Algebraic closure over a frozen layer and derived geometry queries.
//!
//! A point `a` lies in the closure of `X` iff every pair of layer members
//! that agree on `X` also agree at `a`. Grouping the layer by its
//! restriction-to-`X` signature turns that quantifier into one agreement
//! mask per group; [`closure_via_equalizers`] recomputes the same set as a
//! meet of equalizers and is kept deliberately naive as an independent
//! second route.

use std::collections::HashMap;

use crate::engine::{generate_layer_with, Budget, CloneSpec, Layer};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::tables::{agree_on, equalizer, OpTable, PointSet, TupleRank};

/// Closure of a point set together with grouping statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureResult {
    pub closure: PointSet,
    /// Number of distinct restriction-to-input signatures in the layer.
    pub class_count: usize,
    pub layer_size: usize,
}

/// Which side of an equivalence test a witness belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    /// An equalizer of one layer whose closure under the other is strictly
    /// larger.
    pub set: PointSet,
    /// The side for which `set` is algebraic.
    pub algebraic_for: Side,
}

/// Outcome of a per-arity equivalence test. The verdict is only about the
/// recorded arity; clones may still differ at other arities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub arity: usize,
    pub equal: bool,
    pub witness: Option<EquivalenceWitness>,
}

fn check_layer_set(layer: &Layer, x: &PointSet) -> Result<()> {
    if layer.carrier() != x.carrier() {
        return Err(Error::mismatch("point set on a different carrier"));
    }
    if layer.arity() != x.arity() {
        return Err(Error::mismatch(format!(
            "point set of arity {} against a layer of arity {}",
            x.arity(),
            layer.arity()
        )));
    }
    Ok(())
}

fn restriction_signature(member: &OpTable, ranks: &[usize]) -> Vec<u8> {
    ranks.iter().map(|&r| member.values()[r]).collect()
}

/// Group layer members by their value sequence over `x` (in rank order);
/// members agree on `x` exactly when they share a group.
fn signature_classes(layer: &Layer, ranks: &[usize], mode: ExecMode) -> Vec<Vec<usize>> {
    let sigs = exec::map_indices(mode, layer.len(), |i| {
        restriction_signature(&layer.members()[i], ranks)
    });
    let mut classes: HashMap<&[u8], Vec<usize>> = HashMap::new();
    for (i, sig) in sigs.iter().enumerate() {
        classes.entry(sig.as_slice()).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort_by_key(|class| class[0]);
    out
}

pub fn closure(layer: &Layer, x: &PointSet) -> Result<ClosureResult> {
    closure_with(layer, x, ExecMode::default())
}

/// Least algebraic superset of `x` at the layer's arity: a point passes iff
/// inside every restriction class all members share one value there.
pub fn closure_with(layer: &Layer, x: &PointSet, mode: ExecMode) -> Result<ClosureResult> {
    check_layer_set(layer, x)?;
    let ranks: Vec<usize> = x.iter_ranks().collect();
    let classes = signature_classes(layer, &ranks, mode);

    let universe = x.universe_size();
    let full = PointSet::full(layer.carrier(), layer.arity())?;
    let members = layer.members();
    let result = exec::fold_indices(
        mode,
        classes.len(),
        || full.clone(),
        |mut acc: PointSet, ci| {
            let class = &classes[ci];
            let head = members[class[0]].values();
            for &mi in &class[1..] {
                let other = members[mi].values();
                for r in 0..universe {
                    if head[r] != other[r] {
                        acc.remove_rank(r);
                    }
                }
            }
            acc
        },
        |mut a, b| {
            a.intersect_with(&b).expect("same shape");
            a
        },
    );

    Ok(ClosureResult {
        closure: result,
        class_count: classes.len(),
        layer_size: layer.len(),
    })
}

pub fn closure_via_equalizers(layer: &Layer, x: &PointSet) -> Result<PointSet> {
    closure_via_equalizers_with(layer, x, ExecMode::default())
}

/// The meet of all equalizers of layer pairs that contain `x`. Agrees with
/// [`closure`] by construction; the implementation iterates the pairs
/// literally so the two routes stay independent.
pub fn closure_via_equalizers_with(
    layer: &Layer,
    x: &PointSet,
    mode: ExecMode,
) -> Result<PointSet> {
    check_layer_set(layer, x)?;
    let members = layer.members();
    let count = members.len();
    let full = PointSet::full(layer.carrier(), layer.arity())?;
    if count == 0 {
        return Ok(full);
    }
    let pair_count = count * (count - 1) / 2;
    let result = exec::fold_indices(
        mode,
        pair_count,
        || full.clone(),
        |mut acc: PointSet, p| {
            let (i, j) = unflatten_pair(p, count);
            let f = &members[i];
            let g = &members[j];
            if agree_on(f, g, x).expect("validated shapes") {
                let eq = equalizer(f, g).expect("validated shapes");
                acc.intersect_with(&eq).expect("same shape");
            }
            acc
        },
        |mut a, b| {
            a.intersect_with(&b).expect("same shape");
            a
        },
    );
    Ok(result)
}

/// Index the strictly upper triangle of a `count x count` grid.
fn unflatten_pair(p: usize, count: usize) -> (usize, usize) {
    // row i contributes count-1-i pairs; walk rows.
    let mut i = 0usize;
    let mut remaining = p;
    loop {
        let row = count - 1 - i;
        if remaining < row {
            return (i, i + 1 + remaining);
        }
        remaining -= row;
        i += 1;
    }
}

pub fn is_algebraic(layer: &Layer, x: &PointSet) -> Result<bool> {
    Ok(closure(layer, x)?.closure == *x)
}

/// The canonically first pair of layer members that agree on `x` and differ
/// at `a`; `None` iff `a` lies in the closure of `x`. Pairs are ordered by
/// the (i, j) positions of the members in canonical layer order.
pub fn separating_pair(
    layer: &Layer,
    x: &PointSet,
    a: TupleRank,
) -> Result<Option<(OpTable, OpTable)>> {
    check_layer_set(layer, x)?;
    if a.arity != layer.arity() {
        return Err(Error::mismatch(format!(
            "point of arity {} against a layer of arity {}",
            a.arity,
            layer.arity()
        )));
    }
    if a.rank >= x.universe_size() {
        return Err(Error::domain("point rank out of range"));
    }
    if x.contains_rank(a.rank) {
        return Err(Error::domain(
            "separating pairs are only defined for points outside the input set",
        ));
    }
    let ranks: Vec<usize> = x.iter_ranks().collect();
    let classes = signature_classes(layer, &ranks, ExecMode::default());
    let members = layer.members();
    let mut best: Option<(usize, usize)> = None;
    for class in &classes {
        'outer: for (slot, &i) in class.iter().enumerate() {
            let vi = members[i].values()[a.rank];
            for &j in &class[slot + 1..] {
                if members[j].values()[a.rank] != vi {
                    let candidate = (i, j);
                    if best.is_none_or(|b| candidate < b) {
                        best = Some(candidate);
                    }
                    break 'outer; // later i in this class cannot beat this one
                }
            }
        }
    }
    Ok(best.map(|(i, j)| (members[i].clone(), members[j].clone())))
}

pub fn alg_equal_at_arity(
    spec_c: &CloneSpec,
    spec_d: &CloneSpec,
    n: usize,
    budget: &Budget,
) -> Result<EquivalenceVerdict> {
    alg_equal_at_arity_with(spec_c, spec_d, n, budget, ExecMode::default())
}

/// Decide whether two clones have the same algebraic sets at arity `n`.
///
/// Sound and complete at a fixed arity on a finite carrier: every algebraic
/// set is a meet of equalizers and closure systems are meet-closed, so the
/// geometries coincide iff every equalizer of one layer is closed under the
/// other, both ways. On failure the first violating equalizer (in canonical
/// pair order) is returned as the witness.
pub fn alg_equal_at_arity_with(
    spec_c: &CloneSpec,
    spec_d: &CloneSpec,
    n: usize,
    budget: &Budget,
    mode: ExecMode,
) -> Result<EquivalenceVerdict> {
    if spec_c.carrier() != spec_d.carrier() {
        return Err(Error::mismatch("clone presentations on different carriers"));
    }
    let layer_c = generate_layer_with(spec_c, n, budget, mode)?;
    let layer_d = generate_layer_with(spec_d, n, budget, mode)?;

    if let Some(set) = first_unclosed_equalizer(&layer_c, &layer_d, mode)? {
        return Ok(EquivalenceVerdict {
            arity: n,
            equal: false,
            witness: Some(EquivalenceWitness {
                set,
                algebraic_for: Side::First,
            }),
        });
    }
    if let Some(set) = first_unclosed_equalizer(&layer_d, &layer_c, mode)? {
        return Ok(EquivalenceVerdict {
            arity: n,
            equal: false,
            witness: Some(EquivalenceWitness {
                set,
                algebraic_for: Side::Second,
            }),
        });
    }
    Ok(EquivalenceVerdict {
        arity: n,
        equal: true,
        witness: None,
    })
}

/// First equalizer of `from` (in canonical pair order, duplicates skipped)
/// that is not closed under `under`.
fn first_unclosed_equalizer(
    from: &Layer,
    under: &Layer,
    mode: ExecMode,
) -> Result<Option<PointSet>> {
    let members = from.members();
    let mut tested: std::collections::HashSet<PointSet> = std::collections::HashSet::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let eq = equalizer(&members[i], &members[j])?;
            if eq.is_full() || !tested.insert(eq.clone()) {
                continue;
            }
            let closed = closure_with(under, &eq, mode)?.closure == eq;
            if !closed {
                return Ok(Some(eq));
            }
        }
    }
    Ok(None)
}
