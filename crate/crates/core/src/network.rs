//! Configurations, Boolean maps and their asynchronous iterations.
//!
//! A configuration of `n` components is stored as an integer whose most
//! significant of the `n` low bits is component 1, so that `0b1000` with
//! `n = 4` is the configuration `x_1 = 1, x_2 = x_3 = x_4 = 0`. Component
//! indices are 1-based everywhere in the public API.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Largest supported number of components.
pub const MAX_COMPONENTS: usize = 16;

/// Bit mask of component `i` (1-based) in an `n`-component configuration.
#[inline]
pub fn component_mask(n: usize, i: usize) -> u32 {
    debug_assert!((1..=n).contains(&i));
    1 << (n - i)
}

fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_COMPONENTS).contains(&n) {
        Ok(())
    } else {
        Err(invalid(format!(
            "component count {n} outside [1, {MAX_COMPONENTS}]"
        )))
    }
}

fn check_index(n: usize, i: usize) -> Result<()> {
    if (1..=n).contains(&i) {
        Ok(())
    } else {
        Err(invalid(format!("component index {i} outside [1, {n}]")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    n: u8,
    bits: u32,
}

impl Configuration {
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        check_n(n)?;
        if u64::from(bits) >= 1u64 << n {
            return Err(invalid(format!(
                "configuration {bits} does not fit {n} bits"
            )));
        }
        Ok(Self { n: n as u8, bits })
    }

    /// Parses a string of `'0'`/`'1'` characters, `x_1` first.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let s = s.trim();
        check_n(s.len())?;
        let mut bits = 0u32;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(Error::Parse(format!("unexpected bit character {other:?}")))
                    }
                };
        }
        Self::new(s.len(), bits)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Value of component `i` (1-based).
    pub fn component(&self, i: usize) -> Result<bool> {
        check_index(self.n(), i)?;
        Ok(self.bits & component_mask(self.n(), i) != 0)
    }

    pub fn flipped(&self, i: usize) -> Result<Self> {
        check_index(self.n(), i)?;
        Ok(Self {
            n: self.n,
            bits: self.bits ^ component_mask(self.n(), i),
        })
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.n())
    }
}

/// Hamming distance between two configurations of the same size.
pub fn hamming(x: Configuration, y: Configuration) -> Result<u32> {
    if x.n != y.n {
        return Err(invalid(format!(
            "hamming distance between {} and {} components",
            x.n, y.n
        )));
    }
    Ok((x.bits ^ y.bits).count_ones())
}

/// A map `f: B^n -> B^n` stored as its truth table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BooleanMap {
    n: usize,
    table: Vec<u32>,
}

impl BooleanMap {
    pub fn new(n: usize, table: Vec<u32>) -> Result<Self> {
        check_n(n)?;
        if table.len() != 1 << n {
            return Err(invalid(format!(
                "truth table has {} entries, expected {}",
                table.len(),
                1usize << n
            )));
        }
        if let Some(bad) = table.iter().find(|&&y| u64::from(y) >= 1u64 << n) {
            return Err(invalid(format!("image {bad} does not fit {n} bits")));
        }
        Ok(Self { n, table })
    }

    /// Builds the map from a closure over raw configuration integers.
    pub fn from_fn(n: usize, f: impl Fn(u32) -> u32) -> Result<Self> {
        check_n(n)?;
        Self::new(n, (0..1u32 << n).map(f).collect())
    }

    /// The negation map `x -> !x`.
    pub fn negation(n: usize) -> Result<Self> {
        check_n(n)?;
        let full = ((1u64 << n) - 1) as u32;
        Ok(Self {
            n,
            table: (0..1u32 << n).map(|x| full - x).collect(),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            table: (0..1u32 << n).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of configurations, `2^n`.
    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn into_table(self) -> Vec<u32> {
        self.table
    }

    #[inline]
    pub fn image(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    pub fn eval(&self, x: Configuration) -> Result<Configuration> {
        self.check_config(x)?;
        Ok(Configuration {
            n: x.n,
            bits: self.image(x.bits),
        })
    }

    /// `f_i(x)` on a raw configuration.
    #[inline]
    pub fn component_at(&self, i: usize, x: u32) -> bool {
        self.image(x) & component_mask(self.n, i) != 0
    }

    /// Asynchronous update of component `i` on a raw configuration,
    /// without bounds checks beyond debug assertions.
    #[inline]
    pub fn update_raw(&self, i: usize, x: u32) -> u32 {
        let mask = component_mask(self.n, i);
        (x & !mask) | (self.image(x) & mask)
    }

    /// `F_f(i, x)`: replaces component `i` of `x` by `f_i(x)`.
    pub fn apply_async(&self, i: usize, x: Configuration) -> Result<Configuration> {
        check_index(self.n, i)?;
        self.check_config(x)?;
        Ok(Configuration {
            n: x.n,
            bits: self.update_raw(i, x.bits),
        })
    }

    /// `f^alpha`: the `(n-1)`-component map obtained by freezing the last
    /// component to `alpha` and dropping the last output.
    pub fn restrict(&self, alpha: bool) -> Result<BooleanMap> {
        if self.n < 2 {
            return Err(invalid("restriction needs at least two components"));
        }
        let table = (0..1u32 << (self.n - 1))
            .map(|x| self.image((x << 1) | u32::from(alpha)) >> 1)
            .collect();
        Ok(BooleanMap {
            n: self.n - 1,
            table,
        })
    }

    /// Relabels components. With `P` moving component `i` to position
    /// `perm[i-1]`, returns `P . f . P^-1`.
    pub fn permute_components(&self, perm: &[usize]) -> Result<BooleanMap> {
        let p = Permutation::new(self.n, perm)?;
        let mut table = vec![0u32; self.size()];
        for x in 0..self.size() as u32 {
            table[p.apply(x) as usize] = p.apply(self.image(x));
        }
        Ok(BooleanMap { n: self.n, table })
    }

    fn check_config(&self, x: Configuration) -> Result<()> {
        if x.n() != self.n {
            return Err(invalid(format!(
                "configuration has {} components, map has {}",
                x.n(),
                self.n
            )));
        }
        Ok(())
    }
}

/// A permutation of component positions, applied to raw configurations.
#[derive(Clone, Debug)]
pub(crate) struct Permutation {
    n: usize,
    target: Vec<usize>,
}

impl Permutation {
    pub(crate) fn new(n: usize, perm: &[usize]) -> Result<Self> {
        if perm.len() != n {
            return Err(invalid(format!(
                "permutation of length {} for {n} components",
                perm.len()
            )));
        }
        let mut seen = vec![false; n + 1];
        for &p in perm {
            if !(1..=n).contains(&p) || seen[p] {
                return Err(invalid(format!("{perm:?} is not a permutation of 1..={n}")));
            }
            seen[p] = true;
        }
        Ok(Self {
            n,
            target: perm.to_vec(),
        })
    }

    pub(crate) fn apply(&self, x: u32) -> u32 {
        let mut y = 0;
        for (i, &t) in self.target.iter().enumerate() {
            if x & component_mask(self.n, i + 1) != 0 {
                y |= component_mask(self.n, t);
            }
        }
        y
    }
}

impl fmt::Display for BooleanMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, y) in self.table.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{y}")?;
        }
        Ok(())
    }
}

impl FromStr for BooleanMap {
    type Err = Error;

    /// Parses a comma-separated list of `2^n` decimal images.
    fn from_str(s: &str) -> Result<Self> {
        let table = s
            .trim()
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad truth-table entry {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let len = table.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Parse(format!(
                "truth table length {len} is not a power of two >= 2"
            )));
        }
        BooleanMap::new(len.trailing_zeros() as usize, table)
    }
}

/// Finite prefix of a strategy: the sequence of components to update.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    n: usize,
    terms: Vec<usize>,
}

impl Strategy {
    pub fn new(n: usize, terms: Vec<usize>) -> Result<Self> {
        check_n(n)?;
        if let Some(&bad) = terms.iter().find(|&&t| !(1..=n).contains(&t)) {
            return Err(invalid(format!("strategy term {bad} outside [1, {n}]")));
        }
        Ok(Self { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[usize] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The shift: drops the first term.
    pub fn shifted(&self) -> Option<Strategy> {
        self.terms.split_first().map(|(_, rest)| Strategy {
            n: self.n,
            terms: rest.to_vec(),
        })
    }
}

/// A point `(s, x)` of the phase space, with `s` truncated to a finite prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StatePoint {
    pub strategy: Strategy,
    pub config: Configuration,
}

impl StatePoint {
    pub fn new(strategy: Strategy, config: Configuration) -> Result<Self> {
        if strategy.n() != config.n() {
            return Err(invalid(format!(
                "strategy over {} components, configuration over {}",
                strategy.n(),
                config.n()
            )));
        }
        Ok(Self { strategy, config })
    }
}

/// One step of `G_f`: shift the strategy and update the component it names.
pub fn gf_step(f: &BooleanMap, point: &StatePoint) -> Result<StatePoint> {
    let head = *point
        .strategy
        .terms()
        .first()
        .ok_or(Error::StrategyExhausted)?;
    let config = f.apply_async(head, point.config)?;
    Ok(StatePoint {
        strategy: point.strategy.shifted().expect("nonempty strategy"),
        config,
    })
}

/// Asynchronous orbit `[x^0, ..., x^T]` with `x^{t+1} = F_f(s_t, x^t)`.
pub fn iterate(f: &BooleanMap, x0: Configuration, s: &Strategy) -> Result<Vec<Configuration>> {
    if s.n() != f.n() {
        return Err(invalid("strategy and map disagree on component count"));
    }
    let mut orbit = Vec::with_capacity(s.len() + 1);
    let mut x = x0;
    orbit.push(x);
    for &i in s.terms() {
        x = f.apply_async(i, x)?;
        orbit.push(x);
    }
    Ok(orbit)
}

/// Distance between strategy prefixes: `(9/n) * sum |s_t - s'_t| / 10^(t+1)`.
///
/// Computed on the stored prefixes of length `L`; the contribution of the
/// unseen tails is below `10^-L`.
pub fn strategy_distance(s: &Strategy, t: &Strategy) -> Result<f64> {
    if s.n() != t.n() {
        return Err(invalid("strategies over different component counts"));
    }
    if s.len() != t.len() {
        return Err(invalid(format!(
            "strategy prefixes of lengths {} and {}",
            s.len(),
            t.len()
        )));
    }
    let mut scale = 0.1;
    let mut sum = 0.0;
    for (&a, &b) in s.terms().iter().zip(t.terms()) {
        sum += a.abs_diff(b) as f64 * scale;
        scale /= 10.0;
    }
    Ok(9.0 / s.n() as f64 * sum)
}

/// `d(X, Y) = d_H(x, y) + d_S(s, s')`; the integer part is the Hamming term.
pub fn distance(a: &StatePoint, b: &StatePoint) -> Result<f64> {
    Ok(f64::from(hamming(a.config, b.config)?) + strategy_distance(&a.strategy, &b.strategy)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: &str) -> Configuration {
        Configuration::from_bit_str(s).unwrap()
    }

    const F5: &str = "14, 15, 12, 13, 10, 11, 9, 8, 6, 7, 5, 4, 3, 2, 1, 0";
    const F12: &str = "14, 15, 13, 12, 11, 10, 8, 9, 7, 6, 4, 5, 2, 3, 1, 0";

    #[test]
    fn apply_async_examples() {
        let neg = BooleanMap::negation(2).unwrap();
        assert_eq!(neg.apply_async(1, cfg("00")).unwrap(), cfg("10"));

        let id = BooleanMap::identity(3).unwrap();
        for i in 1..=3 {
            assert_eq!(id.apply_async(i, cfg("101")).unwrap(), cfg("101"));
        }

        // f(0000) = 14 = 1110, so f_4(0000) = 0 and x_4 stays 0.
        let f5: BooleanMap = F5.parse().unwrap();
        assert_eq!(f5.apply_async(4, cfg("0000")).unwrap(), cfg("0000"));
        assert_eq!(f5.apply_async(1, cfg("0000")).unwrap(), cfg("1000"));
    }

    #[test]
    fn apply_async_rejects_bad_index() {
        let neg = BooleanMap::negation(2).unwrap();
        assert!(matches!(
            neg.apply_async(0, cfg("00")),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            neg.apply_async(3, cfg("00")),
            Err(Error::InvalidArgument(_))
        ));
        assert!(neg.apply_async(1, cfg("000")).is_err());
    }

    #[test]
    fn apply_async_touches_only_one_component() {
        for n in 1..=3usize {
            let size = 1u32 << n;
            // every map for n <= 2, a slice of them for n = 3
            let total: u64 = (size as u64).pow(size);
            let step = (total / 4096).max(1);
            let mut code = 0u64;
            while code < total {
                let mut c = code;
                let table: Vec<u32> = (0..size)
                    .map(|_| {
                        let v = (c % size as u64) as u32;
                        c /= size as u64;
                        v
                    })
                    .collect();
                let f = BooleanMap::new(n, table).unwrap();
                for x in 0..size {
                    for i in 1..=n {
                        let y = f.update_raw(i, x);
                        assert_eq!((x ^ y) & !component_mask(n, i), 0);
                        assert_eq!(y & component_mask(n, i) != 0, f.component_at(i, x));
                    }
                }
                code += step;
            }
        }
    }

    #[test]
    fn gf_step_examples() {
        let neg = BooleanMap::negation(1).unwrap();
        let p = StatePoint::new(Strategy::new(1, vec![1, 1]).unwrap(), cfg("0")).unwrap();
        let q = gf_step(&neg, &p).unwrap();
        assert_eq!(q.strategy.terms(), &[1]);
        assert_eq!(q.config, cfg("1"));
        let r = gf_step(&neg, &q).unwrap();
        assert_eq!(r.config, cfg("0"));
        assert!(matches!(gf_step(&neg, &r), Err(Error::StrategyExhausted)));

        let id = BooleanMap::identity(2).unwrap();
        let p = StatePoint::new(Strategy::new(2, vec![2, 1, 2]).unwrap(), cfg("10")).unwrap();
        let q = gf_step(&id, &p).unwrap();
        assert_eq!(q.strategy.terms(), &[1, 2]);
        assert_eq!(q.config, cfg("10"));
    }

    #[test]
    fn iterate_examples() {
        let neg = BooleanMap::negation(2).unwrap();
        let s = Strategy::new(2, vec![1, 2]).unwrap();
        assert_eq!(
            iterate(&neg, cfg("00"), &s).unwrap(),
            vec![cfg("00"), cfg("10"), cfg("11")]
        );
        let empty = Strategy::new(2, vec![]).unwrap();
        assert_eq!(iterate(&neg, cfg("01"), &empty).unwrap(), vec![cfg("01")]);

        let f12: BooleanMap = F12.parse().unwrap();
        let s = Strategy::new(4, vec![1]).unwrap();
        assert_eq!(
            iterate(&f12, cfg("0000"), &s).unwrap(),
            vec![cfg("0000"), cfg("1000")]
        );
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(cfg("0000"), cfg("1111")).unwrap(), 4);
        assert_eq!(hamming(cfg("0110"), cfg("0110")).unwrap(), 0);
        assert_eq!(hamming(cfg("1010"), cfg("0010")).unwrap(), 1);
        assert!(hamming(cfg("10"), cfg("010")).is_err());
    }

    #[test]
    fn strategy_distance_examples() {
        let s = Strategy::new(2, vec![1, 2, 2]).unwrap();
        assert_eq!(strategy_distance(&s, &s).unwrap(), 0.0);
        let a = Strategy::new(2, vec![1]).unwrap();
        let b = Strategy::new(2, vec![2]).unwrap();
        assert!((strategy_distance(&a, &b).unwrap() - 0.45).abs() < 1e-15);
        let c = Strategy::new(2, vec![1, 2]).unwrap();
        assert!(strategy_distance(&a, &c).is_err());
    }

    #[test]
    fn distance_examples() {
        let s = Strategy::new(4, vec![1, 3, 4]).unwrap();
        let x = StatePoint::new(s.clone(), cfg("0000")).unwrap();
        assert_eq!(distance(&x, &x).unwrap(), 0.0);
        let y = StatePoint::new(s, cfg("0110")).unwrap();
        assert_eq!(distance(&x, &y).unwrap(), 2.0);
    }

    #[test]
    fn restrict_examples() {
        let neg = BooleanMap::negation(2).unwrap();
        for alpha in [false, true] {
            assert_eq!(
                neg.restrict(alpha).unwrap(),
                BooleanMap::negation(1).unwrap()
            );
        }
        let id = BooleanMap::identity(3).unwrap();
        assert_eq!(id.restrict(true).unwrap(), BooleanMap::identity(2).unwrap());
        let f5: BooleanMap = F5.parse().unwrap();
        assert_eq!(f5.restrict(false).unwrap().size(), 8);
        assert_eq!(f5.restrict(true).unwrap().size(), 8);
        assert!(BooleanMap::negation(1).unwrap().restrict(false).is_err());
    }

    #[test]
    fn restricted_negation_is_negation() {
        for n in 2..=MAX_COMPONENTS {
            let neg = BooleanMap::negation(n).unwrap();
            let smaller = BooleanMap::negation(n - 1).unwrap();
            assert_eq!(neg.restrict(false).unwrap(), smaller);
            assert_eq!(neg.restrict(true).unwrap(), smaller);
        }
    }

    #[test]
    fn constructors() {
        assert_eq!(BooleanMap::negation(4).unwrap().table()[0], 15);
        assert_eq!(BooleanMap::identity(2).unwrap().table(), &[0, 1, 2, 3]);
        let neg = BooleanMap::negation(1).unwrap();
        for x in 0..2 {
            assert_eq!(neg.image(neg.image(x)), x);
        }
        assert!(BooleanMap::negation(0).is_err());
        assert!(BooleanMap::identity(17).is_err());
        assert!(BooleanMap::new(2, vec![0, 1, 2]).is_err());
        assert!(BooleanMap::new(2, vec![0, 1, 2, 4]).is_err());
    }

    #[test]
    fn text_format() {
        let f: BooleanMap = F5.parse().unwrap();
        assert_eq!(f.n(), 4);
        assert_eq!(f.to_string(), F5);
        let g: BooleanMap = "2,3 ,1,  0\n".parse().unwrap();
        assert_eq!(g.table(), &[2, 3, 1, 0]);
        assert!("1, 0, 2".parse::<BooleanMap>().is_err());
        assert!("1, x".parse::<BooleanMap>().is_err());
        assert!("0".parse::<BooleanMap>().is_err());
    }

    #[test]
    fn configuration_parsing() {
        let x = cfg("1011");
        assert_eq!(x.bits(), 11);
        assert_eq!(x.to_string(), "1011");
        assert!(x.component(1).unwrap());
        assert!(!x.component(2).unwrap());
        assert!(Configuration::from_bit_str("10a").is_err());
        assert!(Configuration::from_bit_str("").is_err());
        assert!(Configuration::new(2, 4).is_err());
    }

    #[test]
    fn permutation_roundtrip() {
        let f: BooleanMap = F5.parse().unwrap();
        let p = [2, 4, 1, 3];
        let inv = [3, 1, 4, 2];
        let g = f.permute_components(&p).unwrap();
        assert_eq!(g.permute_components(&inv).unwrap(), f);
        assert!(f.permute_components(&[1, 1, 2, 3]).is_err());
    }
}
