//! Finite carriers, ranked tuples, packed operation tables and the point
//! sets they act on.
//!
//! Tuples over a carrier of size `s` are ranked base-`s` with the leftmost
//! coordinate most significant; every table in the crate is laid out in that
//! rank order, which makes table files bit-exact across runs. Elements are
//! anonymous indices `0..s`. Argument positions in the public API are
//! 1-based, matching the usual convention for projections and minors.

use crate::error::{Error, Result};

/// Carriers are capped so table entries fit in a byte.
const MAX_CARRIER: usize = 255;

/// A finite carrier set; its elements are the indices `0..size`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Carrier {
    size: usize,
}

impl Carrier {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::domain("carrier must have at least one element"));
        }
        if size > MAX_CARRIER {
            return Err(Error::domain(format!(
                "carrier size {size} exceeds supported maximum {MAX_CARRIER}"
            )));
        }
        Ok(Carrier { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    /// `size^arity`, the number of tuples of the given arity.
    pub fn tuple_count(&self, arity: usize) -> Result<usize> {
        let mut count: usize = 1;
        for _ in 0..arity {
            count = count
                .checked_mul(self.size)
                .ok_or_else(|| Error::domain("tuple space too large to index"))?;
        }
        Ok(count)
    }
}

/// The rank of a tuple in `A^arity`, i.e. its index in rank order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TupleRank {
    pub arity: usize,
    pub rank: usize,
}

/// Rank a tuple of element indices. The leftmost coordinate is most
/// significant: `rank = sum elements[i] * size^(n-1-i)`.
pub fn rank_tuple(carrier: Carrier, elements: &[usize]) -> Result<TupleRank> {
    if elements.is_empty() {
        return Err(Error::domain("tuples must have positive arity"));
    }
    let mut rank: usize = 0;
    for &e in elements {
        if e >= carrier.size() {
            return Err(Error::domain(format!(
                "element {e} out of range for carrier of size {}",
                carrier.size()
            )));
        }
        rank = rank * carrier.size() + e;
    }
    Ok(TupleRank {
        arity: elements.len(),
        rank,
    })
}

/// Invert [`rank_tuple`].
pub fn unrank_tuple(carrier: Carrier, at: TupleRank) -> Vec<usize> {
    let mut out = vec![0usize; at.arity];
    let mut r = at.rank;
    for i in (0..at.arity).rev() {
        out[i] = r % carrier.size();
        r /= carrier.size();
    }
    out
}

/// A finitary operation on a finite carrier, stored as its full value table
/// in rank order. Constants are unary; arity is always positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpTable {
    carrier: Carrier,
    arity: usize,
    table: Vec<u8>,
}

impl std::fmt::Debug for OpTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "OpTable(size {}, arity {}, {:?})",
            self.carrier.size(),
            self.arity,
            self.table
        )
    }
}

impl OpTable {
    /// Build a table from explicit entries, validating length and range.
    pub fn new(carrier: Carrier, arity: usize, entries: &[usize]) -> Result<Self> {
        if arity == 0 {
            return Err(Error::domain("operations must have positive arity"));
        }
        let expected = carrier.tuple_count(arity)?;
        if entries.len() != expected {
            return Err(Error::domain(format!(
                "table has {} entries, expected {expected}",
                entries.len()
            )));
        }
        let mut table = Vec::with_capacity(entries.len());
        for &v in entries {
            if v >= carrier.size() {
                return Err(Error::domain(format!(
                    "table value {v} out of range for carrier of size {}",
                    carrier.size()
                )));
            }
            table.push(v as u8);
        }
        Ok(OpTable {
            carrier,
            arity,
            table,
        })
    }

    /// Build a table by evaluating a function on every tuple in rank order.
    pub fn from_fn(
        carrier: Carrier,
        arity: usize,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::domain("operations must have positive arity"));
        }
        let len = carrier.tuple_count(arity)?;
        let mut tuple = vec![0usize; arity];
        let mut table = Vec::with_capacity(len);
        for _ in 0..len {
            let v = f(&tuple);
            if v >= carrier.size() {
                return Err(Error::domain(format!(
                    "operation value {v} out of range for carrier of size {}",
                    carrier.size()
                )));
            }
            table.push(v as u8);
            // advance the tuple in rank order
            for i in (0..arity).rev() {
                tuple[i] += 1;
                if tuple[i] < carrier.size() {
                    break;
                }
                tuple[i] = 0;
            }
        }
        Ok(OpTable {
            carrier,
            arity,
            table,
        })
    }

    pub(crate) fn from_raw(carrier: Carrier, arity: usize, table: Vec<u8>) -> Self {
        debug_assert_eq!(carrier.tuple_count(arity).unwrap(), table.len());
        OpTable {
            carrier,
            arity,
            table,
        }
    }

    /// The k-th n-ary projection (1-based): value at every tuple is its k-th
    /// coordinate.
    pub fn projection(carrier: Carrier, arity: usize, k: usize) -> Result<Self> {
        if k == 0 || k > arity {
            return Err(Error::domain(format!(
                "projection index {k} out of range 1..={arity}"
            )));
        }
        OpTable::from_fn(carrier, arity, |t| t[k - 1])
    }

    /// The unary constant operation with the given value.
    pub fn constant(carrier: Carrier, value: usize) -> Result<Self> {
        OpTable::filled(carrier, 1, value)
    }

    /// A constant table of arbitrary arity.
    pub fn filled(carrier: Carrier, arity: usize, value: usize) -> Result<Self> {
        if value >= carrier.size() {
            return Err(Error::domain(format!(
                "constant value {value} out of range for carrier of size {}",
                carrier.size()
            )));
        }
        let len = carrier.tuple_count(arity)?;
        if arity == 0 {
            return Err(Error::domain("operations must have positive arity"));
        }
        Ok(OpTable {
            carrier,
            arity,
            table: vec![value as u8; len],
        })
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The raw value table in rank order.
    pub fn values(&self) -> &[u8] {
        &self.table
    }

    pub fn eval_rank(&self, rank: usize) -> usize {
        self.table[rank] as usize
    }

    pub fn eval(&self, args: &[usize]) -> Result<usize> {
        if args.len() != self.arity {
            return Err(Error::mismatch(format!(
                "expected {} arguments, got {}",
                self.arity,
                args.len()
            )));
        }
        let at = rank_tuple(self.carrier, args)?;
        Ok(self.eval_rank(at.rank))
    }

    /// Superposition: `result(x) = self(args[0](x), ..., args[m-1](x))`.
    /// All arguments must share the carrier and a common arity.
    pub fn compose(&self, args: &[OpTable]) -> Result<OpTable> {
        if args.len() != self.arity {
            return Err(Error::mismatch(format!(
                "composition needs {} inner operations, got {}",
                self.arity,
                args.len()
            )));
        }
        let inner_arity = args[0].arity;
        for a in args {
            if a.carrier != self.carrier {
                return Err(Error::mismatch("composition operands on different carriers"));
            }
            if a.arity != inner_arity {
                return Err(Error::mismatch("inner operations have unequal arities"));
            }
        }
        let len = args[0].table.len();
        let size = self.carrier.size();
        let mut table = Vec::with_capacity(len);
        for r in 0..len {
            let mut idx = 0usize;
            for a in args {
                idx = idx * size + a.table[r] as usize;
            }
            table.push(self.table[idx]);
        }
        Ok(OpTable {
            carrier: self.carrier,
            arity: inner_arity,
            table,
        })
    }

    pub(crate) fn compose_refs(&self, args: &[&OpTable]) -> Result<OpTable> {
        if args.len() != self.arity {
            return Err(Error::mismatch(format!(
                "composition needs {} inner operations, got {}",
                self.arity,
                args.len()
            )));
        }
        let inner_arity = args[0].arity;
        for a in args {
            if a.carrier != self.carrier || a.arity != inner_arity {
                return Err(Error::mismatch("composition operand mismatch"));
            }
        }
        let len = args[0].table.len();
        let size = self.carrier.size();
        let mut table = Vec::with_capacity(len);
        for r in 0..len {
            let mut idx = 0usize;
            for a in args {
                idx = idx * size + a.table[r] as usize;
            }
            table.push(self.table[idx]);
        }
        Ok(OpTable {
            carrier: self.carrier,
            arity: inner_arity,
            table,
        })
    }

    /// The minor `f_sigma` of arity `arity`: `f_sigma(x_1..x_n) =
    /// f(x_sigma(1), ..., x_sigma(k))`. `sigma` maps 1-based argument
    /// positions of `f` to 1-based positions in `1..=arity`.
    pub fn minor(&self, sigma: &[usize], arity: usize) -> Result<OpTable> {
        if sigma.len() != self.arity {
            return Err(Error::domain(format!(
                "minor map has {} entries, expected {}",
                sigma.len(),
                self.arity
            )));
        }
        if arity == 0 {
            return Err(Error::domain("operations must have positive arity"));
        }
        for &s in sigma {
            if s == 0 || s > arity {
                return Err(Error::domain(format!(
                    "minor map value {s} out of range 1..={arity}"
                )));
            }
        }
        let size = self.carrier.size();
        let len = self.carrier.tuple_count(arity)?;
        let mut table = Vec::with_capacity(len);
        let mut tuple = vec![0usize; arity];
        for _ in 0..len {
            let mut idx = 0usize;
            for &s in sigma {
                idx = idx * size + tuple[s - 1];
            }
            table.push(self.table[idx]);
            for i in (0..arity).rev() {
                tuple[i] += 1;
                if tuple[i] < size {
                    break;
                }
                tuple[i] = 0;
            }
        }
        Ok(OpTable {
            carrier: self.carrier,
            arity,
            table,
        })
    }

    /// 1-based positions the operation genuinely depends on: position `i`
    /// is essential iff changing only the i-th argument can change the value.
    pub fn essential_coordinates(&self) -> Vec<usize> {
        let size = self.carrier.size();
        let mut essential = Vec::new();
        for pos in 0..self.arity {
            let stride = size.pow((self.arity - 1 - pos) as u32);
            let mut depends = false;
            'scan: for r in 0..self.table.len() {
                let digit = (r / stride) % size;
                if digit != 0 {
                    continue; // compare each block against its digit-0 sibling once
                }
                let base = self.table[r];
                for alt in 1..size {
                    if self.table[r + alt * stride] != base {
                        depends = true;
                        break 'scan;
                    }
                }
            }
            if depends {
                essential.push(pos + 1);
            }
        }
        essential
    }

    pub fn essential_arity(&self) -> usize {
        self.essential_coordinates().len()
    }

    /// `Some(k)` iff this table equals the k-th projection (1-based).
    pub fn as_projection(&self) -> Option<usize> {
        for k in 1..=self.arity {
            if let Ok(p) = OpTable::projection(self.carrier, self.arity, k) {
                if p.table == self.table {
                    return Some(k);
                }
            }
        }
        None
    }

    /// `Some(value)` iff the table is constant.
    pub fn constant_value(&self) -> Option<usize> {
        let first = self.table[0];
        if self.table.iter().all(|&v| v == first) {
            Some(first as usize)
        } else {
            None
        }
    }
}

fn check_same_shape(f: &OpTable, g: &OpTable) -> Result<()> {
    if f.carrier != g.carrier {
        return Err(Error::mismatch("operations on different carriers"));
    }
    if f.arity != g.arity {
        return Err(Error::mismatch(format!(
            "operations of different arities ({} vs {})",
            f.arity, g.arity
        )));
    }
    Ok(())
}

/// The set of tuples where two same-arity operations agree.
pub fn equalizer(f: &OpTable, g: &OpTable) -> Result<PointSet> {
    check_same_shape(f, g)?;
    let mut set = PointSet::empty(f.carrier, f.arity)?;
    for r in 0..f.table.len() {
        if f.table[r] == g.table[r] {
            set.insert_rank(r);
        }
    }
    Ok(set)
}

/// True iff `f` and `g` coincide on every member of `x`.
pub fn agree_on(f: &OpTable, g: &OpTable, x: &PointSet) -> Result<bool> {
    check_same_shape(f, g)?;
    if x.carrier() != f.carrier || x.arity() != f.arity {
        return Err(Error::mismatch("point set does not match the operations"));
    }
    Ok(x.iter_ranks().all(|r| f.table[r] == g.table[r]))
}

// The five standard clone operations. For unary operands the argument
// manipulations are the identity by convention.

/// Cyclic shift of arguments: `(zeta f)(x1..xn) = f(x2..xn, x1)`.
pub fn zeta(f: &OpTable) -> OpTable {
    if f.arity == 1 {
        return f.clone();
    }
    let n = f.arity;
    let mut sigma = Vec::with_capacity(n);
    sigma.push(n);
    sigma.extend(1..n);
    f.minor(&sigma, n).expect("cyclic shift is a valid minor")
}

/// Swap of the first two arguments.
pub fn tau(f: &OpTable) -> OpTable {
    if f.arity == 1 {
        return f.clone();
    }
    let n = f.arity;
    let mut sigma: Vec<usize> = (1..=n).collect();
    sigma.swap(0, 1);
    f.minor(&sigma, n).expect("transposition is a valid minor")
}

/// Identification of the first two arguments, lowering the arity by one.
pub fn delta(f: &OpTable) -> OpTable {
    if f.arity == 1 {
        return f.clone();
    }
    let n = f.arity;
    let mut sigma = Vec::with_capacity(n);
    sigma.push(1);
    sigma.extend(1..n);
    f.minor(&sigma, n - 1).expect("diagonal is a valid minor")
}

/// A dummy first argument, raising the arity by one.
pub fn nabla(f: &OpTable) -> OpTable {
    let n = f.arity;
    let sigma: Vec<usize> = (2..=n + 1).collect();
    f.minor(&sigma, n + 1).expect("dummy argument is a valid minor")
}

/// Composition in the first argument:
/// `(f * g)(x1..x_{m+n-1}) = f(g(x1..xm), x_{m+1}..x_{m+n-1})`.
pub fn star(f: &OpTable, g: &OpTable) -> Result<OpTable> {
    if f.carrier != g.carrier {
        return Err(Error::mismatch("operations on different carriers"));
    }
    let n = f.arity;
    let m = g.arity;
    let target = m + n - 1;
    let mut args = Vec::with_capacity(n);
    let g_sigma: Vec<usize> = (1..=m).collect();
    args.push(g.minor(&g_sigma, target)?);
    for j in 2..=n {
        args.push(OpTable::projection(f.carrier, target, m + j - 1)?);
    }
    f.compose(&args)
}

/// A subset of `A^n`, stored as a bitset over tuple ranks.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    carrier: Carrier,
    arity: usize,
    universe: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for PointSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "PointSet(size {}, arity {}, {} of {} points)",
            self.carrier.size(),
            self.arity,
            self.len(),
            self.universe
        )
    }
}

impl PointSet {
    pub fn empty(carrier: Carrier, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::domain("point sets must have positive arity"));
        }
        let universe = carrier.tuple_count(arity)?;
        Ok(PointSet {
            carrier,
            arity,
            universe,
            bits: vec![0; universe.div_ceil(64)],
        })
    }

    pub fn full(carrier: Carrier, arity: usize) -> Result<Self> {
        let mut set = PointSet::empty(carrier, arity)?;
        for b in &mut set.bits {
            *b = u64::MAX;
        }
        set.clear_tail();
        Ok(set)
    }

    pub fn from_points<P: AsRef<[usize]>>(
        carrier: Carrier,
        arity: usize,
        points: impl IntoIterator<Item = P>,
    ) -> Result<Self> {
        let mut set = PointSet::empty(carrier, arity)?;
        for p in points {
            let p = p.as_ref();
            if p.len() != arity {
                return Err(Error::domain(format!(
                    "point of length {} in a set of arity {arity}",
                    p.len()
                )));
            }
            let at = rank_tuple(carrier, p)?;
            set.insert_rank(at.rank);
        }
        Ok(set)
    }

    fn clear_tail(&mut self) {
        let tail = self.universe % 64;
        if tail != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn insert_rank(&mut self, rank: usize) {
        assert!(rank < self.universe, "rank out of range");
        self.bits[rank / 64] |= 1 << (rank % 64);
    }

    pub fn remove_rank(&mut self, rank: usize) {
        assert!(rank < self.universe, "rank out of range");
        self.bits[rank / 64] &= !(1 << (rank % 64));
    }

    pub fn contains_rank(&self, rank: usize) -> bool {
        rank < self.universe && self.bits[rank / 64] & (1 << (rank % 64)) != 0
    }

    pub fn contains(&self, at: TupleRank) -> bool {
        at.arity == self.arity && self.contains_rank(at.rank)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn iter_ranks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&r| self.contains_rank(r))
    }

    /// Member tuples in rank order.
    pub fn points(&self) -> Vec<Vec<usize>> {
        self.iter_ranks()
            .map(|r| {
                unrank_tuple(
                    self.carrier,
                    TupleRank {
                        arity: self.arity,
                        rank: r,
                    },
                )
            })
            .collect()
    }

    fn check_compatible(&self, other: &PointSet) -> Result<()> {
        if self.carrier != other.carrier || self.arity != other.arity {
            return Err(Error::mismatch("point sets of different shapes"));
        }
        Ok(())
    }

    pub fn union_with(&mut self, other: &PointSet) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(())
    }

    pub fn intersect_with(&mut self, other: &PointSet) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
        Ok(())
    }

    pub fn complement(&self) -> PointSet {
        let mut out = self.clone();
        for b in &mut out.bits {
            *b = !*b;
        }
        out.clear_tail();
        out
    }

    pub fn is_subset_of(&self, other: &PointSet) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0))
    }
}
