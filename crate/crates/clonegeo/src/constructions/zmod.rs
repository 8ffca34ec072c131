//! Expanded groups on `Z_{np^2}`: the group operations together with the
//! scaled d-fold product `f_d(x_1..x_d) = np * x_1 * ... * x_d (mod np^2)`,
//! plus the monomial machinery used to audit which polynomials the
//! expansion can express.

use std::collections::BTreeSet;

use crate::engine::CloneSpec;
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::tables::{Carrier, OpTable, PointSet};

/// Combined coefficient-space cap for [`enumerate_cd_tables`].
const CD_ENUMERATION_CAP: usize = 1 << 22;

/// Parameters of the expansion: a prime `p`, a factor `n`, and the arity
/// `d >= 2` of the scaled product. The carrier is `Z_{np^2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModExpansionSpec {
    p: usize,
    n: usize,
    d: usize,
}

fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= p {
        if p % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl ModExpansionSpec {
    pub fn new(p: usize, n: usize, d: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::domain("the factor n must be positive"));
        }
        if d < 2 {
            return Err(Error::domain("the product arity d must be at least 2"));
        }
        Carrier::new(n * p * p)?;
        Ok(ModExpansionSpec { p, n, d })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn modulus(&self) -> usize {
        self.n * self.p * self.p
    }

    /// The scale factor `np`; it squares to zero in the carrier.
    pub fn np(&self) -> usize {
        self.n * self.p
    }

    pub fn carrier(&self) -> Carrier {
        Carrier::new(self.modulus()).expect("validated at construction")
    }
}

/// The constantive presentation of the expanded group: addition, negation,
/// the zero constant and the scaled d-fold product.
pub fn build_zmod_expansion(spec: &ModExpansionSpec) -> Result<CloneSpec> {
    let m = spec.modulus();
    let carrier = spec.carrier();
    let mut clone_spec = CloneSpec::new(carrier, true);
    clone_spec.add_generator(
        "add",
        OpTable::from_fn(carrier, 2, |t| (t[0] + t[1]) % m)?,
    )?;
    clone_spec.add_generator("neg", OpTable::from_fn(carrier, 1, |t| (m - t[0]) % m)?)?;
    clone_spec.add_generator("zero", OpTable::constant(carrier, 0)?)?;
    let np = spec.np();
    clone_spec.add_generator(
        "fd",
        OpTable::from_fn(carrier, spec.d, |t| {
            t.iter().fold(np, |acc, &x| (acc * x) % m)
        })?,
    )?;
    Ok(clone_spec)
}

/// True iff `f` maps every tuple containing `zero` to `zero`.
pub fn is_absorbing(f: &OpTable, zero: usize) -> Result<bool> {
    if zero >= f.carrier().size() {
        return Err(Error::domain(format!(
            "element {zero} out of range for carrier of size {}",
            f.carrier().size()
        )));
    }
    let size = f.carrier().size();
    let arity = f.arity();
    for (rank, &value) in f.values().iter().enumerate() {
        let mut r = rank;
        let mut has_zero = false;
        for _ in 0..arity {
            if r % size == zero {
                has_zero = true;
                break;
            }
            r /= size;
        }
        if has_zero && value as usize != zero {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A monomial `a * x_{i_1}^{e_1} ... x_{i_r}^{e_r}` over the carrier, with
/// pairwise distinct 1-based variables and positive exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    coefficient: usize,
    exponents: Vec<(usize, u32)>,
}

impl Monomial {
    pub fn new(coefficient: usize, mut exponents: Vec<(usize, u32)>) -> Result<Self> {
        exponents.sort_by_key(|&(v, _)| v);
        for pair in exponents.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::domain("monomial variables must be distinct"));
            }
        }
        for &(v, e) in &exponents {
            if v == 0 {
                return Err(Error::domain("monomial variables are 1-based"));
            }
            if e == 0 {
                return Err(Error::domain("monomial exponents must be positive"));
            }
        }
        Ok(Monomial {
            coefficient,
            exponents,
        })
    }

    pub fn coefficient(&self) -> usize {
        self.coefficient
    }

    pub fn exponents(&self) -> &[(usize, u32)] {
        &self.exponents
    }

    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().map(|&(_, e)| e).sum()
    }

    /// The k-ary table of the monomial over the carrier of `spec`.
    pub fn table(&self, spec: &ModExpansionSpec, k: usize) -> Result<OpTable> {
        let m = spec.modulus();
        for &(v, _) in &self.exponents {
            if v > k {
                return Err(Error::domain(format!(
                    "monomial uses variable {v} beyond arity {k}"
                )));
            }
        }
        OpTable::from_fn(spec.carrier(), k, |t| {
            let mut acc = self.coefficient % m;
            for &(v, e) in &self.exponents {
                for _ in 0..e {
                    acc = acc * t[v - 1] % m;
                }
            }
            acc
        })
    }
}

/// Shape admitted for polynomial monomials of the expansion: a bare
/// constant, a linear single variable with any coefficient, or a total
/// degree between 2 and d with the coefficient divisible by `np`.
pub fn monomial_shape_ok(monomial: &Monomial, spec: &ModExpansionSpec) -> bool {
    let r = monomial.exponents.len();
    if r == 0 {
        return true;
    }
    if r == 1 && monomial.exponents[0].1 == 1 {
        return true;
    }
    let degree = monomial.total_degree() as usize;
    (2..=spec.d).contains(&degree) && (monomial.coefficient % spec.np()) == 0
}

/// All distinct k-ary tables arising as sums of shape-admissible monomials
/// in the variables `x_1..x_k`; a superset of the expansion's k-ary
/// polynomials. Feasible for carrier 4 with `d = 2`, `k <= 3`; larger
/// coefficient spaces fail with a budget error.
pub fn enumerate_cd_tables(spec: &ModExpansionSpec, k: usize) -> Result<Vec<OpTable>> {
    enumerate_cd_tables_with(spec, k, ExecMode::default())
}

pub fn enumerate_cd_tables_with(
    spec: &ModExpansionSpec,
    k: usize,
    mode: ExecMode,
) -> Result<Vec<OpTable>> {
    if k == 0 {
        return Err(Error::domain("arity must be positive"));
    }
    let m = spec.modulus();
    let np = spec.np();
    let carrier = spec.carrier();
    let len = carrier.tuple_count(k)?;

    // multi-indices of total degree 2..=d over k variables
    let mut high: Vec<Vec<u32>> = Vec::new();
    let mut stack = vec![vec![]];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == k {
            let total: u32 = prefix.iter().sum();
            if (2..=spec.d as u32).contains(&total) {
                high.push(prefix);
            }
            continue;
        }
        let used: u32 = prefix.iter().sum();
        for e in 0..=(spec.d as u32).saturating_sub(used) {
            let mut next = prefix.clone();
            next.push(e);
            stack.push(next);
        }
    }
    high.sort();

    // coefficient space: constant (m) x linear (m^k) x high-degree (np per index)
    let mut combos: usize = m;
    for _ in 0..k {
        combos = combos
            .checked_mul(m)
            .filter(|&c| c <= CD_ENUMERATION_CAP)
            .ok_or(Error::Budget {
                context: "polynomial enumeration",
                size: 0,
                limit: CD_ENUMERATION_CAP,
            })?;
    }
    for _ in 0..high.len() {
        combos = combos
            .checked_mul(np)
            .filter(|&c| c <= CD_ENUMERATION_CAP)
            .ok_or(Error::Budget {
                context: "polynomial enumeration",
                size: 0,
                limit: CD_ENUMERATION_CAP,
            })?;
    }

    // per-rank value tables of x_i and of each high-degree power product
    let linear_tables: Vec<OpTable> = (1..=k)
        .map(|i| OpTable::projection(carrier, k, i))
        .collect::<Result<_>>()?;
    let high_tables: Vec<OpTable> = high
        .iter()
        .map(|alpha| {
            let exponents: Vec<(usize, u32)> = alpha
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e > 0)
                .map(|(i, &e)| (i + 1, e))
                .collect();
            Monomial::new(1, exponents)?.table(spec, k)
        })
        .collect::<Result<_>>()?;

    let distinct = exec::fold_indices(
        mode,
        combos,
        BTreeSet::new,
        |mut acc: BTreeSet<Vec<u8>>, combo| {
            let mut rest = combo;
            let constant = rest % m;
            rest /= m;
            let mut table = vec![constant as u8; len];
            for lt in &linear_tables {
                let a = rest % m;
                rest /= m;
                if a != 0 {
                    for (slot, &v) in table.iter_mut().zip(lt.values()) {
                        *slot = ((*slot as usize + a * v as usize) % m) as u8;
                    }
                }
            }
            for ht in &high_tables {
                let b = (rest % np) * np % m;
                rest /= np;
                if b != 0 {
                    for (slot, &v) in table.iter_mut().zip(ht.values()) {
                        *slot = ((*slot as usize + b * v as usize) % m) as u8;
                    }
                }
            }
            acc.insert(table);
            acc
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );

    Ok(distinct
        .into_iter()
        .map(|t| OpTable::new(carrier, k, &t.iter().map(|&v| v as usize).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?)
}

/// The l-tuples over the carrier with at least one zero coordinate.
pub fn build_q(spec: &ModExpansionSpec, l: usize) -> Result<PointSet> {
    if l < 2 {
        return Err(Error::domain("the tuple length l must be at least 2"));
    }
    let carrier = spec.carrier();
    let size = carrier.size();
    let mut set = PointSet::empty(carrier, l)?;
    let universe = carrier.tuple_count(l)?;
    for rank in 0..universe {
        let mut r = rank;
        for _ in 0..l {
            if r % size == 0 {
                set.insert_rank(rank);
                break;
            }
            r /= size;
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::rank_tuple;

    fn spec(p: usize, n: usize, d: usize) -> ModExpansionSpec {
        ModExpansionSpec::new(p, n, d).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ModExpansionSpec::new(4, 1, 2).is_err());
        assert!(ModExpansionSpec::new(2, 0, 2).is_err());
        assert!(ModExpansionSpec::new(2, 1, 1).is_err());
        assert_eq!(spec(2, 1, 2).modulus(), 4);
        assert_eq!(spec(3, 2, 5).modulus(), 18);
        assert_eq!(spec(2, 1, 3).np(), 2);
    }

    #[test]
    fn product_generator_values() {
        let s = spec(2, 1, 2);
        let clone_spec = build_zmod_expansion(&s).unwrap();
        let fd = &clone_spec
            .generators()
            .iter()
            .find(|g| g.name == "fd")
            .unwrap()
            .op;
        assert_eq!(fd.eval(&[1, 1]).unwrap(), 2);
        assert_eq!(fd.eval(&[3, 3]).unwrap(), 2);

        let s3 = spec(2, 1, 3);
        let clone_spec3 = build_zmod_expansion(&s3).unwrap();
        let f3 = &clone_spec3
            .generators()
            .iter()
            .find(|g| g.name == "fd")
            .unwrap()
            .op;
        assert_eq!(f3.eval(&[1, 1, 1]).unwrap(), 2);
        assert!(clone_spec3.constantive());
    }

    #[test]
    fn absorbing_examples() {
        let s = spec(2, 1, 3);
        let clone_spec = build_zmod_expansion(&s).unwrap();
        let by_name = |name: &str| {
            clone_spec
                .generators()
                .iter()
                .find(|g| g.name == name)
                .unwrap()
                .op
                .clone()
        };
        assert!(is_absorbing(&by_name("fd"), 0).unwrap());
        assert!(!is_absorbing(&by_name("add"), 0).unwrap());
        assert!(is_absorbing(&by_name("zero"), 0).unwrap());
        assert!(is_absorbing(&by_name("fd"), 9).is_err());
    }

    #[test]
    fn monomial_shapes() {
        let s = spec(2, 1, 2);
        let quadratic = Monomial::new(2, vec![(1, 1), (2, 1)]).unwrap();
        assert!(monomial_shape_ok(&quadratic, &s));
        let unscaled = Monomial::new(1, vec![(1, 1), (2, 1)]).unwrap();
        assert!(!monomial_shape_ok(&unscaled, &s));
        let linear = Monomial::new(3, vec![(1, 1)]).unwrap();
        assert!(monomial_shape_ok(&linear, &s));
        let constant = Monomial::new(3, vec![]).unwrap();
        assert!(monomial_shape_ok(&constant, &s));
        let cubic = Monomial::new(2, vec![(1, 2), (2, 1)]).unwrap();
        assert!(!monomial_shape_ok(&cubic, &s)); // degree 3 > d = 2

        assert!(Monomial::new(1, vec![(1, 1), (1, 2)]).is_err());
        assert!(Monomial::new(1, vec![(0, 1)]).is_err());
        assert!(Monomial::new(1, vec![(1, 0)]).is_err());
    }

    #[test]
    fn monomial_tables() {
        let s = spec(2, 1, 2);
        let m = Monomial::new(2, vec![(1, 1), (2, 1)]).unwrap();
        let t = m.table(&s, 2).unwrap();
        assert_eq!(t.eval(&[1, 1]).unwrap(), 2);
        assert_eq!(t.eval(&[3, 3]).unwrap(), 2);
        assert_eq!(t.eval(&[0, 3]).unwrap(), 0);
        assert!(m.table(&s, 1).is_err());
    }

    #[test]
    fn cd_enumeration_at_unary_contains_quadratic_span() {
        let s = spec(2, 1, 2);
        let tables = enumerate_cd_tables(&s, 1).unwrap();
        // every c + a*x + 2b*x^2 must occur
        for c in 0..4 {
            for a in 0..4 {
                for b in 0..2 {
                    let expected = OpTable::from_fn(s.carrier(), 1, |t| {
                        (c + a * t[0] + 2 * b * t[0] * t[0]) % 4
                    })
                    .unwrap();
                    assert!(tables.contains(&expected));
                }
            }
        }
    }

    #[test]
    fn cd_enumeration_guards_against_explosion() {
        let s = spec(2, 1, 3);
        // d = 3 at arity 3 needs 2^16 high-degree coefficients: over the cap
        assert!(matches!(
            enumerate_cd_tables(&s, 3),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn q_counts() {
        let s = spec(2, 1, 2);
        assert_eq!(build_q(&s, 3).unwrap().len(), 37);
        assert_eq!(build_q(&s, 2).unwrap().len(), 7);
        let q3 = build_q(&s, 3).unwrap();
        assert!(!q3.contains(rank_tuple(s.carrier(), &[1, 1, 1]).unwrap()));
        assert!(build_q(&s, 1).is_err());
    }
}
