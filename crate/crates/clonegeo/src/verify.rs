//! Named verification cases: each one reproduces a finite separation or
//! shape statement exhaustively at desk scale and reports a
//! machine-readable verdict with reproducing evidence.
//!
//! The case names are the CLI surface of `clonegeo verify`. Every runner is
//! deterministic for a fixed seed; a failing verdict always carries the
//! first counterexample found.

use std::collections::BTreeSet;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::constructions::{
    build_b0, build_janov, build_oplus, build_q, build_zmod_expansion, check_extend_restriction,
    check_fprop, d_set, enumerate_cd_tables_with, enumerate_f, enumerate_f_prime,
    enumerate_phi_layer, g_table, graph_of, in_f_prime, is_absorbing, phi_closure_with,
    JanovSpec, ModExpansionSpec, OplusSpec,
};
use crate::engine::{
    generate_layer_with, is_malcev, sample_term, term_oracle, Budget, CloneSpec, Layer,
};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::formats::{OpTableFile, PointSetFile};
use crate::geometry::{alg_equal_at_arity_with, closure_with, is_algebraic, separating_pair};
use crate::tables::{rank_tuple, zeta, tau, delta, nabla, star, Carrier, OpTable, PointSet};

pub const DEFAULT_SEED: u64 = 0x5eed_c10e;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "budget-exceeded")]
    BudgetExceeded,
    #[serde(rename = "not-found-within-budget")]
    NotFoundWithinBudget,
}

/// Outcome of one verification case. Wall time is attached only on request
/// so that default reports stay byte-identical across runs.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct RunReport {
    pub case: String,
    pub parameters: Value,
    pub verdict: Verdict,
    pub evidence: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Shared knobs for every case runner.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub budget: Budget,
    pub mode: ExecMode,
    pub include_timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            budget: Budget::default(),
            mode: ExecMode::default(),
            include_timing: false,
        }
    }
}

/// A verification case with its parameters. Defaults reproduce the stock
/// desk-scale instances.
#[derive(Clone, Debug, PartialEq)]
pub enum VerifyCase {
    /// Absorbing-polynomial census over the monomial span of the expanded
    /// group, plus containment of the generated layers in the span.
    Lemma4 { p: usize, n: usize, d: usize, k: usize },
    /// Separation of two expanded groups at one arity via the zero-padded
    /// tuple set and its closure.
    Thm3 { p: usize, n: usize, i: usize, l: usize },
    /// Restriction-shape checks on seeded random terms of the one-point
    /// extension, plus a bounded search for a Mal'cev member.
    Lemma56 {
        arity: usize,
        depth: usize,
        count: usize,
        seed: u64,
        one: usize,
        malcev_depth: usize,
    },
    /// Lifted separating pairs for every point outside the padded set.
    Prop8 { one: usize },
    /// Shape facts about the indicator families F and F'.
    Lemma9 { max_arity: usize },
    /// Closure of F' under the five clone operations.
    Lemma10 { max_arity: usize },
    /// Shape of generated indicator-clone layers against F'.
    Lemma11 { max_arity: usize },
    /// Graph-set algebraicity matrix over subsets of the index set, plus
    /// pairwise per-arity separation.
    Prop12 { indices: Vec<usize> },
    /// Exhaustive agreement of the closed-form extension closure with the
    /// agreement-characterization closure over the enumerated layer.
    Eq21 { base: Option<CloneSpec> },
}

impl VerifyCase {
    pub fn name(&self) -> &'static str {
        match self {
            VerifyCase::Lemma4 { .. } => "lemma4",
            VerifyCase::Thm3 { .. } => "thm3",
            VerifyCase::Lemma56 { .. } => "lemma5-6",
            VerifyCase::Prop8 { .. } => "prop8",
            VerifyCase::Lemma9 { .. } => "lemma9",
            VerifyCase::Lemma10 { .. } => "lemma10",
            VerifyCase::Lemma11 { .. } => "lemma11",
            VerifyCase::Prop12 { .. } => "prop12",
            VerifyCase::Eq21 { .. } => "eq21",
        }
    }

    pub fn parameters(&self) -> Value {
        match self {
            VerifyCase::Lemma4 { p, n, d, k } => json!({"p": p, "n": n, "d": d, "k": k}),
            VerifyCase::Thm3 { p, n, i, l } => json!({"p": p, "n": n, "i": i, "l": l}),
            VerifyCase::Lemma56 {
                arity,
                depth,
                count,
                seed,
                one,
                malcev_depth,
            } => json!({
                "base": "pol-z4-group",
                "arity": arity,
                "depth": depth,
                "count": count,
                "seed": seed,
                "one": one,
                "malcev_depth": malcev_depth,
            }),
            VerifyCase::Prop8 { one } => json!({"p": 2, "n": 1, "i": 2, "l": 3, "one": one}),
            VerifyCase::Lemma9 { max_arity } => json!({"max_arity": max_arity}),
            VerifyCase::Lemma10 { max_arity } => json!({"max_arity": max_arity}),
            VerifyCase::Lemma11 { max_arity } => json!({"max_arity": max_arity}),
            VerifyCase::Prop12 { indices } => json!({"indices": indices}),
            VerifyCase::Eq21 { base } => match base {
                Some(spec) => json!({"base": "custom", "digest": spec.digest()}),
                None => json!({"base": "builtin: xor and meet"}),
            },
        }
    }

    pub fn default_lemma4() -> Self {
        VerifyCase::Lemma4 {
            p: 2,
            n: 1,
            d: 2,
            k: 3,
        }
    }

    pub fn default_thm3() -> Self {
        VerifyCase::Thm3 {
            p: 2,
            n: 1,
            i: 2,
            l: 3,
        }
    }

    pub fn default_lemma56() -> Self {
        VerifyCase::Lemma56 {
            arity: 3,
            depth: 4,
            count: 10_000,
            seed: DEFAULT_SEED,
            one: 0,
            malcev_depth: 2,
        }
    }

    pub fn default_prop8() -> Self {
        VerifyCase::Prop8 { one: 0 }
    }

    pub fn default_lemma9() -> Self {
        VerifyCase::Lemma9 { max_arity: 4 }
    }

    pub fn default_lemma10() -> Self {
        VerifyCase::Lemma10 { max_arity: 3 }
    }

    pub fn default_lemma11() -> Self {
        VerifyCase::Lemma11 { max_arity: 4 }
    }

    pub fn default_prop12() -> Self {
        VerifyCase::Prop12 { indices: vec![2, 3] }
    }

    pub fn default_eq21() -> Self {
        VerifyCase::Eq21 { base: None }
    }

    pub fn all_defaults() -> Vec<VerifyCase> {
        vec![
            VerifyCase::default_lemma4(),
            VerifyCase::default_thm3(),
            VerifyCase::default_lemma56(),
            VerifyCase::default_prop8(),
            VerifyCase::default_lemma9(),
            VerifyCase::default_lemma10(),
            VerifyCase::default_lemma11(),
            VerifyCase::default_prop12(),
            VerifyCase::default_eq21(),
        ]
    }
}

/// Run one case and package the outcome.
pub fn run(case: &VerifyCase, options: &RunOptions) -> RunReport {
    let started = std::time::Instant::now();
    let outcome = dispatch(case, options);
    let (verdict, evidence) = match outcome {
        Ok((verdict, evidence)) => (verdict, evidence),
        Err(Error::Budget {
            context,
            size,
            limit,
        }) => (
            Verdict::BudgetExceeded,
            json!({"error": format!("{context} exceeded budget"), "size": size, "limit": limit}),
        ),
        Err(Error::ArityCap { requested, limit }) => (
            Verdict::BudgetExceeded,
            json!({"error": "arity cap", "requested": requested, "limit": limit}),
        ),
        Err(e) => (Verdict::Fail, json!({"error": e.to_string()})),
    };
    RunReport {
        case: case.name().to_string(),
        parameters: case.parameters(),
        verdict,
        evidence,
        wall_time_ms: options
            .include_timing
            .then(|| started.elapsed().as_millis() as u64),
    }
}

fn dispatch(case: &VerifyCase, options: &RunOptions) -> Result<(Verdict, Value)> {
    match case {
        VerifyCase::Lemma4 { p, n, d, k } => run_lemma4(*p, *n, *d, *k, options),
        VerifyCase::Thm3 { p, n, i, l } => run_thm3(*p, *n, *i, *l, options),
        VerifyCase::Lemma56 {
            arity,
            depth,
            count,
            seed,
            one,
            malcev_depth,
        } => run_lemma56(*arity, *depth, *count, *seed, *one, *malcev_depth, options),
        VerifyCase::Prop8 { one } => run_prop8(*one, options),
        VerifyCase::Lemma9 { max_arity } => run_lemma9(*max_arity),
        VerifyCase::Lemma10 { max_arity } => run_lemma10(*max_arity),
        VerifyCase::Lemma11 { max_arity } => run_lemma11(*max_arity, options),
        VerifyCase::Prop12 { indices } => run_prop12(indices, options),
        VerifyCase::Eq21 { base } => run_eq21(base.as_ref(), options),
    }
}

fn fail(evidence: Value) -> Result<(Verdict, Value)> {
    Ok((Verdict::Fail, evidence))
}

fn pass(evidence: Value) -> Result<(Verdict, Value)> {
    Ok((Verdict::Pass, evidence))
}

/// The constantive group presentation on Z_4 used by the extension cases.
pub fn z4_group_spec() -> CloneSpec {
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

pub fn xor_spec() -> CloneSpec {
    let c2 = Carrier::new(2).unwrap();
    let mut spec = CloneSpec::new(c2, false);
    spec.add_generator("xor", OpTable::new(c2, 2, &[0, 1, 1, 0]).unwrap())
        .unwrap();
    spec
}

pub fn meet_spec() -> CloneSpec {
    let c2 = Carrier::new(2).unwrap();
    let mut spec = CloneSpec::new(c2, false);
    spec.add_generator("and", OpTable::new(c2, 2, &[0, 0, 0, 1]).unwrap())
        .unwrap();
    spec
}

fn run_lemma4(p: usize, n: usize, d: usize, k: usize, options: &RunOptions) -> Result<(Verdict, Value)> {
    let spec = ModExpansionSpec::new(p, n, d)?;
    let tables = enumerate_cd_tables_with(&spec, k, options.mode)?;
    let zero_table = OpTable::filled(spec.carrier(), k, 0)?;
    let absorbing: Vec<&OpTable> = tables
        .iter()
        .filter(|t| is_absorbing(t, 0).expect("zero is in range"))
        .collect();
    let census_ok = absorbing.len() == 1 && *absorbing[0] == zero_table;
    if !census_ok {
        let extras: Vec<OpTableFile> = absorbing
            .iter()
            .filter(|t| ***t != zero_table)
            .take(3)
            .map(|t| OpTableFile::from_op(t))
            .collect();
        return fail(json!({
            "absorbing_count": absorbing.len(),
            "unexpected_absorbing": extras,
        }));
    }

    // the generated layers embed in the monomial span at low arities
    let clone_spec = build_zmod_expansion(&spec)?;
    let mut layer_counts = Vec::new();
    for arity in 1..=2usize.min(k) {
        let layer = generate_layer_with(&clone_spec, arity, &options.budget, options.mode)?;
        let span_tables = enumerate_cd_tables_with(&spec, arity, options.mode)?;
        let span: BTreeSet<&OpTable> = span_tables.iter().collect();
        for member in layer.members() {
            if !span.contains(member) {
                return fail(json!({
                    "missing_from_span": OpTableFile::from_op(member),
                    "arity": arity,
                }));
            }
        }
        layer_counts.push(json!({
            "arity": arity,
            "layer": layer.len(),
            "span": span_tables.len(),
        }));
    }

    pass(json!({
        "span_size": tables.len(),
        "absorbing_tables": [OpTableFile::from_op(&zero_table)],
        "layers_contained": layer_counts,
    }))
}

fn run_thm3(p: usize, n: usize, i: usize, l: usize, options: &RunOptions) -> Result<(Verdict, Value)> {
    if !(2..=l).contains(&i) || i >= l {
        return Err(Error::domain("the case needs l > i >= 2"));
    }
    let small = ModExpansionSpec::new(p, n, i)?;
    let large = ModExpansionSpec::new(p, n, l)?;
    let q = build_q(&small, l)?;
    let carrier = small.carrier();

    let spec_i = build_zmod_expansion(&small)?;
    let layer_i = generate_layer_with(
        &spec_i,
        l,
        &Budget {
            max_arity: l.max(options.budget.max_arity),
            ..options.budget
        },
        options.mode,
    )?;
    let closure_i = closure_with(&layer_i, &q, options.mode)?;
    if !closure_i.closure.is_full() {
        return fail(json!({
            "closure_under_small_full": false,
            "closure_size": closure_i.closure.len(),
            "universe": q.universe_size(),
        }));
    }

    let spec_l = build_zmod_expansion(&large)?;
    let layer_l = generate_layer_with(
        &spec_l,
        l,
        &Budget {
            max_arity: l.max(options.budget.max_arity),
            ..options.budget
        },
        options.mode,
    )?;
    let closure_l = closure_with(&layer_l, &q, options.mode)?;
    let ones = rank_tuple(carrier, &vec![1; l])?;
    if closure_l.closure.contains(ones) {
        return fail(json!({
            "all_ones_in_large_closure": true,
            "closure_size": closure_l.closure.len(),
        }));
    }

    let pair = separating_pair(&layer_l, &q, ones)?;
    let Some((f, g)) = pair else {
        return fail(json!({"separating_pair": "missing"}));
    };
    // expected pair: the scaled product and the zero constant, in canonical order
    let np = large.np();
    let m = large.modulus();
    let fl = OpTable::from_fn(carrier, l, |t| t.iter().fold(np, |acc, &x| acc * x % m))?;
    let zero = OpTable::filled(carrier, l, 0)?;
    let expected: BTreeSet<&OpTable> = [&fl, &zero].into_iter().collect();
    let got: BTreeSet<&OpTable> = [&f, &g].into_iter().collect();
    if expected != got {
        return fail(json!({
            "separating_pair": [OpTableFile::from_op(&f), OpTableFile::from_op(&g)],
            "expected": [OpTableFile::from_op(&fl), OpTableFile::from_op(&zero)],
        }));
    }

    pass(json!({
        "closure_under_small_full": true,
        "small_layer": layer_i.len(),
        "large_layer": layer_l.len(),
        "large_closure_size": closure_l.closure.len(),
        "all_ones_excluded": true,
        "separating_pair": [OpTableFile::from_op(&f), OpTableFile::from_op(&g)],
    }))
}

#[allow(clippy::too_many_arguments)]
fn run_lemma56(
    arity: usize,
    depth: usize,
    count: usize,
    seed: u64,
    one: usize,
    malcev_depth: usize,
    options: &RunOptions,
) -> Result<(Verdict, Value)> {
    let base = z4_group_spec();
    let base_layer = generate_layer_with(&base, arity, &options.budget, options.mode)?;
    let oplus = OplusSpec::new(base, one)?;
    let extension = build_oplus(&oplus)?;

    // sample terms in parallel: each index derives its own stream
    let failures = exec::fold_indices(
        options.mode,
        count,
        Vec::new,
        |mut acc: Vec<(usize, &'static str, OpTable)>, idx| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let term = sample_term(&extension, arity, depth, &mut rng).expect("sampling is total");
            if !check_fprop(&term, &base_layer).expect("matching shapes") {
                acc.push((idx, "restriction-shape", term));
            } else if !check_extend_restriction(&term).expect("matching shapes") {
                acc.push((idx, "zero-set-dichotomy", term));
            }
            acc
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    let mut failures = failures;
    failures.sort_by_key(|(idx, _, _)| *idx);
    if let Some((idx, what, term)) = failures.first() {
        return fail(json!({
            "violations": failures.len(),
            "first_violation": {"index": idx, "check": what, "term": OpTableFile::from_op(term)},
        }));
    }

    // bounded search for a Mal'cev member among extension terms
    let malcev = match term_oracle(&extension, 3, malcev_depth) {
        Ok(tables) => match tables.iter().find(|t| is_malcev(t)) {
            Some(found) => json!({"status": "found", "op": OpTableFile::from_op(found)}),
            None => json!({"status": "not-found-within-budget", "depth": malcev_depth}),
        },
        Err(Error::Budget { .. }) => json!({"status": "not-found-within-budget", "depth": malcev_depth}),
        Err(e) => return Err(e),
    };

    pass(json!({
        "terms": count,
        "violations": 0,
        "hypothesis_ok": !oplus.hypothesis_violated(),
        "extension_constantive": extension.constantive(),
        "malcev_search": malcev,
    }))
}

fn run_prop8(one: usize, options: &RunOptions) -> Result<(Verdict, Value)> {
    // base clone: the expanded group with the ternary product on Z_4
    let spec3 = ModExpansionSpec::new(2, 1, 3)?;
    let base = build_zmod_expansion(&spec3)?;
    let budget = Budget {
        max_arity: options.budget.max_arity.max(3),
        ..options.budget
    };
    let layer = generate_layer_with(&base, 3, &budget, options.mode)?;
    let q = build_q(&spec3, 3)?;
    let b = closure_with(&layer, &q, options.mode)?.closure;

    let oplus = OplusSpec::new(base, one)?;
    let expanded = oplus.expanded_carrier();
    let b0 = build_b0(&b, expanded)?;

    let outside: Vec<usize> = b0.complement().iter_ranks().collect();
    let mut pairs = Vec::new();
    for &big_rank in &outside {
        // points outside the padded set are base tuples outside the base set
        let point = crate::tables::unrank_tuple(
            expanded,
            crate::tables::TupleRank {
                arity: 3,
                rank: big_rank,
            },
        );
        debug_assert!(point.iter().all(|&x| x < 4));
        let base_rank = rank_tuple(oplus.base().carrier(), &point)?;
        let Some((f1, f2)) = separating_pair(&layer, &b, base_rank)? else {
            return fail(json!({"point": point, "base_pair": "missing"}));
        };
        let p1 = crate::constructions::oplus_lift(&f1)?;
        let p2 = crate::constructions::oplus_lift(&f2)?;
        let agree = b0
            .iter_ranks()
            .all(|r| p1.values()[r] == p2.values()[r]);
        let differ = p1.values()[big_rank] != p2.values()[big_rank];
        if !agree || !differ {
            return fail(json!({
                "point": point,
                "lifted_pair_agrees_on_b0": agree,
                "lifted_pair_differs_at_point": differ,
                "pair": [OpTableFile::from_op(&p1), OpTableFile::from_op(&p2)],
            }));
        }
        pairs.push(json!({
            "point": point,
            "pair": [OpTableFile::from_op(&f1), OpTableFile::from_op(&f2)],
        }));
    }

    pass(json!({
        "base_set_size": b.len(),
        "padded_set_size": b0.len(),
        "points_checked": outside.len(),
        "lifted_pairs": pairs,
    }))
}

fn run_lemma9(max_arity: usize) -> Result<(Verdict, Value)> {
    for n in 1..=max_arity {
        for f in enumerate_f(n)? {
            let ess = f.essential_coordinates();
            // essentially at-most-unary members are the constant zero
            if ess.len() <= 1 && f.constant_value() != Some(0) {
                return fail(json!({"item": 1, "arity": n, "table": OpTableFile::from_op(&f)}));
            }
            // nonconstant members depend on every argument
            if f.constant_value().is_none() && (ess.len() != n || n < 2) {
                return fail(json!({"item": 2, "arity": n, "table": OpTableFile::from_op(&f)}));
            }
        }
        for f in enumerate_f_prime(n)? {
            if f.essential_arity() == 1 && f.as_projection().is_none() {
                return fail(json!({"item": 3, "arity": n, "table": OpTableFile::from_op(&f)}));
            }
        }
    }
    // minors of F members land in F', and F' is minor-closed
    let mut minor_checks = 0usize;
    for l in 1..=max_arity {
        for g in enumerate_f(l)? {
            for n in 1..=max_arity {
                for sigma in all_maps(l, n) {
                    let m = g.minor(&sigma, n)?;
                    minor_checks += 1;
                    if !in_f_prime(&m)? {
                        return fail(json!({"item": 4, "table": OpTableFile::from_op(&m)}));
                    }
                }
            }
        }
    }
    for k in 1..=max_arity {
        for f in enumerate_f_prime(k)? {
            for n in 1..=max_arity {
                for sigma in all_maps(k, n) {
                    let m = f.minor(&sigma, n)?;
                    minor_checks += 1;
                    if !in_f_prime(&m)? {
                        return fail(json!({"item": 5, "table": OpTableFile::from_op(&m)}));
                    }
                }
            }
        }
    }
    pass(json!({"max_arity": max_arity, "minor_checks": minor_checks, "violations": 0}))
}

fn all_maps(from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = to.pow(from as u32);
    for code in 0..total {
        let mut sigma = Vec::with_capacity(from);
        let mut c = code;
        for _ in 0..from {
            sigma.push(c % to + 1);
            c /= to;
        }
        out.push(sigma);
    }
    out
}

fn run_lemma10(max_arity: usize) -> Result<(Verdict, Value)> {
    let mut families = Vec::new();
    for n in 1..=max_arity {
        families.push(enumerate_f_prime(n)?);
    }
    let mut checks = 0usize;
    for family in &families {
        for f in family {
            for (name, image) in [
                ("zeta", zeta(f)),
                ("tau", tau(f)),
                ("delta", delta(f)),
                ("nabla", nabla(f)),
            ] {
                checks += 1;
                if !in_f_prime(&image)? {
                    return fail(json!({
                        "operation": name,
                        "input": OpTableFile::from_op(f),
                        "image": OpTableFile::from_op(&image),
                    }));
                }
            }
        }
    }
    for f_family in &families {
        for f in f_family {
            for g_family in &families {
                for g in g_family {
                    let image = star(f, g)?;
                    checks += 1;
                    if !in_f_prime(&image)? {
                        return fail(json!({
                            "operation": "star",
                            "f": OpTableFile::from_op(f),
                            "g": OpTableFile::from_op(g),
                            "image": OpTableFile::from_op(&image),
                        }));
                    }
                }
            }
        }
    }
    pass(json!({"max_arity": max_arity, "closure_checks": checks, "violations": 0}))
}

fn run_lemma11(max_arity: usize, options: &RunOptions) -> Result<(Verdict, Value)> {
    let index_families: Vec<Vec<usize>> = vec![vec![], vec![2], vec![3], vec![2, 3]];
    let mut layer_sizes = Vec::new();
    for indices in &index_families {
        let spec = build_janov(&JanovSpec::new(indices.iter().copied())?)?;
        for k in 1..=max_arity {
            let layer = generate_layer_with(&spec, k, &options.budget, options.mode)?;
            layer_sizes.push(json!({"indices": indices, "arity": k, "size": layer.len()}));
            for g in layer.members() {
                if !in_f_prime(g)? {
                    return fail(json!({
                        "check": "layer member outside F'",
                        "indices": indices,
                        "table": OpTableFile::from_op(g),
                    }));
                }
                if let Some(v) = g.constant_value() {
                    if v != 0 {
                        return fail(json!({
                            "check": "nonzero constant in layer",
                            "indices": indices,
                            "table": OpTableFile::from_op(g),
                        }));
                    }
                    continue;
                }
                let ess = g.essential_coordinates();
                if ess.len() == 1 {
                    if g.as_projection().is_none() {
                        return fail(json!({
                            "check": "essentially unary member is not a projection",
                            "indices": indices,
                            "table": OpTableFile::from_op(g),
                        }));
                    }
                    continue;
                }
                // depends on >= 2 arguments: never 2-valued, vanishes off
                // the almost-constant family on its essential coordinates
                let dl = d_set(ess.len())?;
                for (rank, &v) in g.values().iter().enumerate() {
                    if v == 2 {
                        return fail(json!({
                            "check": "value 2 in a branching member",
                            "indices": indices,
                            "table": OpTableFile::from_op(g),
                        }));
                    }
                    let tuple = crate::tables::unrank_tuple(
                        g.carrier(),
                        crate::tables::TupleRank {
                            arity: g.arity(),
                            rank,
                        },
                    );
                    let projected: Vec<usize> = ess.iter().map(|&i| tuple[i - 1]).collect();
                    let in_dl = dl.contains(rank_tuple(g.carrier(), &projected)?);
                    if !in_dl && v != 0 {
                        return fail(json!({
                            "check": "nonzero value off the indicator family",
                            "indices": indices,
                            "table": OpTableFile::from_op(g),
                        }));
                    }
                }
            }
        }
    }
    pass(json!({"layers": layer_sizes, "violations": 0}))
}

fn run_prop12(indices: &[usize], options: &RunOptions) -> Result<(Verdict, Value)> {
    let base = JanovSpec::new(indices.iter().copied())?;
    let all: Vec<usize> = base.indices().collect();

    // every subset of the index set versus every index
    let mut subsets: Vec<Vec<usize>> = vec![vec![]];
    for &i in &all {
        let mut grown = subsets.clone();
        for s in &mut grown {
            s.push(i);
        }
        subsets.extend(grown);
    }
    subsets.sort();
    subsets.dedup();

    let mut matrix = Vec::new();
    for subset in &subsets {
        let spec = build_janov(&JanovSpec::new(subset.iter().copied())?)?;
        for &i in &all {
            let layer = generate_layer_with(&spec, i + 1, &options.budget, options.mode)?;
            let graph = graph_of(&g_table(i)?)?;
            let algebraic = is_algebraic(&layer, &graph)?;
            let expected = subset.contains(&i);
            if algebraic != expected {
                return fail(json!({
                    "indices": subset,
                    "i": i,
                    "algebraic": algebraic,
                    "expected": expected,
                }));
            }
            matrix.push(json!({"indices": subset, "i": i, "algebraic": algebraic}));
        }
    }

    // pairwise separation at some arity <= max(i)+1
    let mut pairwise = Vec::new();
    for a in 0..subsets.len() {
        for b in a + 1..subsets.len() {
            let spec_a = build_janov(&JanovSpec::new(subsets[a].iter().copied())?)?;
            let spec_b = build_janov(&JanovSpec::new(subsets[b].iter().copied())?)?;
            let mut separated_at = None;
            for arity in 2..=options.budget.max_arity {
                let verdict =
                    alg_equal_at_arity_with(&spec_a, &spec_b, arity, &options.budget, options.mode)?;
                if !verdict.equal {
                    separated_at = Some(arity);
                    break;
                }
            }
            let Some(arity) = separated_at else {
                return fail(json!({
                    "left": subsets[a],
                    "right": subsets[b],
                    "separated": false,
                }));
            };
            pairwise.push(json!({
                "left": subsets[a],
                "right": subsets[b],
                "separating_arity": arity,
            }));
        }
    }

    pass(json!({"matrix": matrix, "pairwise": pairwise}))
}

fn run_eq21(base: Option<&CloneSpec>, options: &RunOptions) -> Result<(Verdict, Value)> {
    let bases: Vec<(String, CloneSpec)> = match base {
        Some(spec) => vec![("custom".to_string(), spec.clone())],
        None => vec![
            ("xor".to_string(), xor_spec()),
            ("meet".to_string(), meet_spec()),
        ],
    };
    let mut evidence = Vec::new();
    for (name, spec) in bases {
        if spec.carrier().size() != 2 {
            return Err(Error::domain(
                "the exhaustive check is sized for two-element bases",
            ));
        }
        let base_layer = generate_layer_with(&spec, 2, &options.budget, options.mode)?;
        let phi_members = enumerate_phi_layer(&base_layer)?;
        let expanded = Carrier::new(3)?;
        let phi_layer = Layer::from_tables(expanded, 2, phi_members)?;
        let universe = expanded.tuple_count(2)?;
        let subsets = 1usize << universe;

        let disagreement = exec::fold_indices(
            options.mode,
            subsets,
            || None,
            |acc: Option<usize>, mask| {
                if acc.is_some() {
                    return acc;
                }
                let mut b = PointSet::empty(expanded, 2).expect("small universe");
                for r in 0..universe {
                    if mask & (1 << r) != 0 {
                        b.insert_rank(r);
                    }
                }
                let closed_form =
                    phi_closure_with(&base_layer, &b, ExecMode::Sequential).expect("shapes match");
                let reference =
                    closure_with(&phi_layer, &b, ExecMode::Sequential).expect("shapes match");
                if closed_form != reference.closure {
                    Some(mask)
                } else {
                    None
                }
            },
            |a, b| match (a, b) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
        );
        if let Some(mask) = disagreement {
            let mut b = PointSet::empty(expanded, 2)?;
            for r in 0..universe {
                if mask & (1 << r) != 0 {
                    b.insert_rank(r);
                }
            }
            return fail(json!({
                "base": name,
                "subset": PointSetFile::from_points(&b),
            }));
        }
        evidence.push(json!({
            "base": name,
            "subsets_checked": subsets,
            "extension_layer_size": phi_layer.len(),
        }));
    }
    pass(json!({"bases": evidence}))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_deterministic_without_timing() {
        let options = RunOptions::default();
        let case = VerifyCase::default_lemma9();
        let a = serde_json::to_string(&run(&case, &options)).unwrap();
        let b = serde_json::to_string(&run(&case, &options)).unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("wall_time_ms"));
    }

    #[test]
    fn timing_is_attached_on_request() {
        let options = RunOptions {
            include_timing: true,
            ..RunOptions::default()
        };
        let report = run(&VerifyCase::default_lemma9(), &options);
        assert!(report.wall_time_ms.is_some());
    }

    #[test]
    fn budget_errors_become_budget_verdicts() {
        let options = RunOptions {
            budget: Budget {
                max_layer_size: 1,
                max_arity: 4,
            },
            ..RunOptions::default()
        };
        let report = run(&VerifyCase::default_prop12(), &options);
        assert_eq!(report.verdict, Verdict::BudgetExceeded);
    }

    #[test]
    fn case_names_are_stable() {
        let names: Vec<&str> = VerifyCase::all_defaults().iter().map(|c| c.name()).collect();
        assert_eq!(
            names,
            vec![
                "lemma4", "thm3", "lemma5-6", "prop8", "lemma9", "lemma10", "lemma11", "prop12",
                "eq21"
            ]
        );
    }
}
