//! Local rules of one-dimensional cellular automata.
//!
//! A rule is a radius `r` and a full lookup table over neighborhoods of
//! `2r+1` cells. Neighborhoods are indexed lexicographically with the leftmost
//! cell most significant, which makes the table of an elementary rule the
//! binary expansion of its Wolfram code.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{checked_pow, Budget};
use crate::error::{Error, Result};
use crate::iterated::IterTable;
use crate::word::Word;

/// Largest state count representable in a table entry.
pub const MAX_STATES: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleTable {
    states: usize,
    radius: usize,
    table: Vec<u8>,
}

impl RuleTable {
    /// Elementary rule from its Wolfram code.
    pub fn eca(code: u32) -> Result<Self> {
        if code > 255 {
            return Err(Error::invalid(format!(
                "Wolfram code {code} is outside 0..=255"
            )));
        }
        let table = (0..8).map(|i| ((code >> i) & 1) as u8).collect();
        Ok(RuleTable {
            states: 2,
            radius: 1,
            table,
        })
    }

    /// General rule; the table is checked for length and entry range.
    pub fn new(states: usize, radius: usize, table: Vec<u8>) -> Result<Self> {
        if !(2..=MAX_STATES).contains(&states) {
            return Err(Error::invalid(format!(
                "state count {states} is outside 2..={MAX_STATES}"
            )));
        }
        let expected = checked_pow(states, 2 * radius + 1);
        if expected != table.len() as u128 {
            return Err(Error::TableLength {
                expected: usize::try_from(expected).unwrap_or(usize::MAX),
                got: table.len(),
            });
        }
        if let Some(index) = table.iter().position(|&e| usize::from(e) >= states) {
            return Err(Error::StateOutOfRange {
                index,
                value: u32::from(table[index]),
                states,
            });
        }
        Ok(RuleTable {
            states,
            radius,
            table,
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// Neighborhood width `2r+1`.
    pub fn width(&self) -> usize {
        2 * self.radius + 1
    }

    /// Window length `2rn+1` read by the `n`-th iterate.
    pub fn window(&self, n: usize) -> usize {
        2 * self.radius * n + 1
    }

    /// True for two states and radius one.
    pub fn is_elementary(&self) -> bool {
        self.states == 2 && self.radius == 1
    }

    /// Wolfram code, for elementary rules.
    pub fn wolfram_code(&self) -> Option<u32> {
        self.is_elementary().then(|| {
            self.table
                .iter()
                .enumerate()
                .map(|(i, &b)| u32::from(b) << i)
                .sum()
        })
    }

    /// Value on a neighborhood given by its table index.
    #[inline]
    pub fn lookup(&self, neighborhood: usize) -> u8 {
        self.table[neighborhood]
    }

    /// Value on an explicit neighborhood of `2r+1` cells.
    pub fn apply(&self, cells: &[u8]) -> u8 {
        debug_assert_eq!(cells.len(), self.width());
        let s = self.states;
        self.table[cells
            .iter()
            .fold(0usize, |acc, &c| acc * s + usize::from(c))]
    }

    /// One synchronous step on a finite word: the output has `2r` fewer cells
    /// and its `j`-th cell is the rule applied to `w[j..=j+2r]`.
    pub fn step_word(&self, w: &Word) -> Result<Word> {
        w.check_states(self.states)?;
        if w.len() < self.width() {
            return Err(Error::invalid(format!(
                "word of length {} is shorter than the neighborhood width {}",
                w.len(),
                self.width()
            )));
        }
        Ok(Word::new(self.step_cells(w.symbols())))
    }

    pub(crate) fn step_cells(&self, cells: &[u8]) -> Vec<u8> {
        cells
            .windows(self.width())
            .map(|nb| self.apply(nb))
            .collect()
    }

    /// `f^n(w)` for a window of exactly `2rn+1` cells.
    pub fn iterate(&self, n: usize, w: &Word) -> Result<u8> {
        self.check_window(n, w)?;
        let mut cells = w.symbols().to_vec();
        for _ in 0..n {
            cells = self.step_cells(&cells);
        }
        Ok(cells[0])
    }

    /// `f^n(w)` evaluated by the recursive definition
    /// `f^n(z) = f^{n-1}(f(z_{-rn..-rn+2r}), ..., f(z_{rn-2r..rn}))`.
    pub fn iterate_recursive(&self, n: usize, w: &Word) -> Result<u8> {
        self.check_window(n, w)?;
        fn go(rule: &RuleTable, n: usize, cells: &[u8]) -> u8 {
            if n == 1 {
                return rule.apply(cells);
            }
            let inner: Vec<u8> = (0..cells.len() - 2 * rule.radius)
                .map(|j| rule.apply(&cells[j..j + rule.width()]))
                .collect();
            go(rule, n - 1, &inner)
        }
        Ok(go(self, n, w.symbols()))
    }

    fn check_window(&self, n: usize, w: &Word) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("iteration count must be at least 1"));
        }
        if w.len() != self.window(n) {
            return Err(Error::invalid(format!(
                "iterate {n} reads {} cells, got a word of length {}",
                self.window(n),
                w.len()
            )));
        }
        w.check_states(self.states)
    }

    pub fn symmetry(&self, variant: Symmetry) -> Result<RuleTable> {
        match variant {
            Symmetry::Reflex => Ok(self.reflex()),
            Symmetry::Conjugate => self.conjugate(),
            Symmetry::ReflexConjugate => self.conjugate().map(|c| c.reflex()),
        }
    }

    fn reflex(&self) -> RuleTable {
        let w = self.width();
        let table = (0..self.table.len())
            .map(|i| {
                let nb = Word::from_index(i as u64, w, self.states).reversed();
                self.table[nb.index(self.states) as usize]
            })
            .collect();
        RuleTable {
            table,
            ..self.clone()
        }
    }

    fn conjugate(&self) -> Result<RuleTable> {
        if self.states != 2 {
            return Err(Error::unsupported(
                "conjugation is defined for two-state rules only",
            ));
        }
        // Complementing every cell of a neighborhood complements its index.
        let last = self.table.len() - 1;
        let table = (0..self.table.len())
            .map(|i| 1 - self.table[last - i])
            .collect();
        Ok(RuleTable {
            table,
            ..self.clone()
        })
    }

    /// Coordinates `k ∈ -rn..=rn` on which `f^n` depends, by exhaustive flip
    /// testing over all windows.
    pub fn dependent_cells(&self, n: usize, budget: Budget) -> Result<Vec<i64>> {
        let table = IterTable::build(self, n, budget)?;
        let len = table.window();
        let s = self.states;
        let values = table.values();
        let center = (len / 2) as i64;
        let mut deps = Vec::new();
        for pos in 0..len {
            let stride = checked_pow(s, len - 1 - pos) as usize;
            let block = stride * s;
            // Index of a window whose cell `pos` is zero, plus digit*stride.
            let depends = (0..values.len() / block).any(|hi| {
                (0..stride).any(|lo| {
                    let base = hi * block + lo;
                    let v0 = values[base];
                    (1..s).any(|d| values[base + d * stride] != v0)
                })
            });
            if depends {
                deps.push(pos as i64 - center);
            }
        }
        Ok(deps)
    }

    /// Classifies the rule as XOR-linear, affine or neither.
    pub fn detect_linearity(&self) -> Result<LinearityCertificate> {
        if self.states != 2 {
            return Err(Error::unsupported(
                "linearity is checked for XOR on two states only",
            ));
        }
        let offset = self.table[0];
        let is_linear = |shift: u8| {
            let t = &self.table;
            (0..t.len())
                .all(|u| (0..t.len()).all(|v| t[u ^ v] ^ shift == (t[u] ^ shift) ^ (t[v] ^ shift)))
        };
        let kind = if offset == 0 && is_linear(0) {
            LinearityKind::XorLinear
        } else if is_linear(offset) {
            LinearityKind::Affine
        } else {
            LinearityKind::None
        };
        Ok(LinearityCertificate {
            kind,
            offset: if kind == LinearityKind::Affine {
                offset
            } else {
                0
            },
        })
    }

    /// The rule `u ↦ f(u) ⊕ f(0…0)`.
    pub fn linear_part(&self) -> Result<RuleTable> {
        if self.states != 2 {
            return Err(Error::unsupported("linear part needs two states"));
        }
        let offset = self.table[0];
        Ok(RuleTable {
            table: self.table.iter().map(|&v| v ^ offset).collect(),
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Reflex,
    Conjugate,
    ReflexConjugate,
}

impl Symmetry {
    pub const ALL: [Symmetry; 3] = [
        Symmetry::Reflex,
        Symmetry::Conjugate,
        Symmetry::ReflexConjugate,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearityKind {
    XorLinear,
    Affine,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearityCertificate {
    pub kind: LinearityKind,
    /// Image of the all-zero neighborhood for affine rules, otherwise 0.
    pub offset: u8,
}

impl LinearityCertificate {
    pub fn is_linear_or_affine(&self) -> bool {
        self.kind != LinearityKind::None
    }
}

/// The orbit of an elementary rule under reflex and conjugation.
pub fn orbit(code: u32) -> Result<Vec<u32>> {
    let rule = RuleTable::eca(code)?;
    let mut codes = vec![code];
    for sym in Symmetry::ALL {
        let c = rule.symmetry(sym)?.wolfram_code().expect("elementary");
        if !codes.contains(&c) {
            codes.push(c);
        }
    }
    codes.sort_unstable();
    Ok(codes)
}

/// Minimum code of the orbit and the orbit size (1, 2 or 4).
pub fn canonical_code(code: u32) -> Result<(u32, usize)> {
    let codes = orbit(code)?;
    Ok((codes[0], codes.len()))
}

/// Canonical representatives of all elementary rules, ascending.
pub fn canonical_codes() -> Vec<u32> {
    (0..256)
        .filter(|&c| canonical_code(c).map(|(k, _)| k == c).unwrap_or(false))
        .collect()
}

/// Text form: `eca:<code>` for elementary rules, otherwise
/// `rule:<states>:<radius>:<hex table>` with each entry written as a
/// fixed-width lowercase hex number.
impl fmt::Display for RuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(code) = self.wolfram_code() {
            return write!(f, "eca:{code}");
        }
        let digits = hex_digits(self.states);
        write!(f, "rule:{}:{}:", self.states, self.radius)?;
        for &e in &self.table {
            write!(f, "{e:0digits$x}")?;
        }
        Ok(())
    }
}

fn hex_digits(states: usize) -> usize {
    if states <= 16 {
        1
    } else {
        2
    }
}

impl FromStr for RuleTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(code) = s.strip_prefix("eca:") {
            let code: u32 = code
                .parse()
                .map_err(|_| Error::invalid(format!("bad Wolfram code in `{s}`")))?;
            return RuleTable::eca(code);
        }
        let Some(rest) = s.strip_prefix("rule:") else {
            return Err(Error::invalid(format!(
                "rule `{s}` is neither `eca:<code>` nor `rule:<states>:<radius>:<hex>`"
            )));
        };
        let mut parts = rest.splitn(3, ':');
        let (Some(states), Some(radius), Some(hex)) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::invalid(format!("rule `{s}` has missing fields")));
        };
        let states: usize = states
            .parse()
            .map_err(|_| Error::invalid(format!("bad state count in `{s}`")))?;
        let radius: usize = radius
            .parse()
            .map_err(|_| Error::invalid(format!("bad radius in `{s}`")))?;
        if !(2..=MAX_STATES).contains(&states) {
            return Err(Error::invalid(format!("state count {states} out of range")));
        }
        let digits = hex_digits(states);
        if !hex.is_ascii() || hex.len() % digits != 0 {
            return Err(Error::invalid(format!("malformed hex table in `{s}`")));
        }
        let table = hex
            .as_bytes()
            .chunks(digits)
            .map(|chunk| {
                let text = std::str::from_utf8(chunk).expect("ascii");
                if text.bytes().any(|b| b.is_ascii_uppercase()) {
                    return Err(Error::invalid("hex table must be lowercase"));
                }
                u8::from_str_radix(text, 16)
                    .map_err(|_| Error::invalid(format!("bad hex entry `{text}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        RuleTable::new(states, radius, table)
    }
}

impl Serialize for RuleTable {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RuleTable {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    /// Bit extractor written independently of the table layout.
    fn eca_value(code: u32, a: u8, b: u8, c: u8) -> u8 {
        let pos = (a as u32) * 4 + (b as u32) * 2 + c as u32;
        ((code >> pos) & 1) as u8
    }

    #[test]
    fn eca_178_matches_displayed_table() {
        let r = RuleTable::eca(178).unwrap();
        assert_eq!(r.table(), &[0, 1, 0, 0, 1, 1, 0, 1]);
        assert_eq!(r.apply(&[0, 0, 1]), 1);
        assert_eq!(r.apply(&[0, 1, 0]), 0);
    }

    #[test]
    fn eca_0_and_170() {
        let zero = RuleTable::eca(0).unwrap();
        assert!(zero.table().iter().all(|&v| v == 0));
        let shift = RuleTable::eca(170).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    assert_eq!(shift.apply(&[a, b, c]), c);
                    assert_eq!(shift.apply(&[a, b, c]), eca_value(170, a, b, c));
                }
            }
        }
    }

    #[test]
    fn eca_rejects_large_code() {
        assert!(RuleTable::eca(256).is_err());
    }

    #[test]
    fn make_rule_checks() {
        let r = RuleTable::new(2, 1, vec![0, 1, 0, 0, 1, 1, 0, 1]).unwrap();
        assert_eq!(r, RuleTable::eca(178).unwrap());
        let id = RuleTable::new(2, 0, vec![0, 1]).unwrap();
        assert_eq!(id.iterate(3, &w("1")).unwrap(), 1);
        assert!(RuleTable::new(4, 1, vec![0; 64]).is_ok());
        assert_eq!(
            RuleTable::new(4, 1, vec![0; 63]).unwrap_err(),
            Error::TableLength {
                expected: 64,
                got: 63
            }
        );
        let mut t = vec![0u8; 8];
        t[5] = 2;
        assert_eq!(
            RuleTable::new(2, 1, t).unwrap_err(),
            Error::StateOutOfRange {
                index: 5,
                value: 2,
                states: 2
            }
        );
    }

    #[test]
    fn step_word_examples() {
        let r178 = RuleTable::eca(178).unwrap();
        assert_eq!(r178.step_word(&w("01010")).unwrap(), w("010"));
        let r0 = RuleTable::eca(0).unwrap();
        assert_eq!(r0.step_word(&w("110101")).unwrap(), w("0000"));
        let r170 = RuleTable::eca(170).unwrap();
        // Each output is the right neighbor: windows 011 and 110.
        assert_eq!(r170.step_word(&w("0110")).unwrap(), w("10"));
        assert!(r170.step_word(&w("01")).is_err());
    }

    #[test]
    fn iterate_examples() {
        let r178 = RuleTable::eca(178).unwrap();
        assert_eq!(r178.iterate(1, &w("010")).unwrap(), 0);
        assert_eq!(r178.iterate(2, &w("01010")).unwrap(), 0);
        let r0 = RuleTable::eca(0).unwrap();
        assert_eq!(r0.iterate(3, &w("1111111")).unwrap(), 0);
        assert!(r178.iterate(2, &w("0101")).is_err());
        assert!(r178.iterate(0, &w("0")).is_err());
    }

    #[test]
    fn reflex_of_110_is_124() {
        let r = RuleTable::eca(110).unwrap();
        // Renumber by enumerating neighborhoods by hand.
        let mut code = 0u32;
        for a in 0..2u8 {
            for b in 0..2u8 {
                for c in 0..2u8 {
                    code |= u32::from(eca_value(110, c, b, a)) << (4 * a + 2 * b + c);
                }
            }
        }
        assert_eq!(code, 124);
        let reflex = r.symmetry(Symmetry::Reflex).unwrap();
        assert_eq!(reflex.wolfram_code(), Some(124));
    }

    #[test]
    fn conjugate_of_zero_is_255() {
        let r = RuleTable::eca(0).unwrap();
        assert_eq!(
            r.symmetry(Symmetry::Conjugate).unwrap().wolfram_code(),
            Some(255)
        );
        let multi = RuleTable::new(3, 0, vec![0, 1, 2]).unwrap();
        assert!(matches!(
            multi.symmetry(Symmetry::Conjugate),
            Err(Error::Unsupported(_))
        ));
        // Reflex is defined for any state count.
        assert_eq!(multi.symmetry(Symmetry::Reflex).unwrap(), multi);
    }

    #[test]
    fn symmetries_commute_and_are_involutions() {
        for code in 0..256 {
            let r = RuleTable::eca(code).unwrap();
            let refl = r.symmetry(Symmetry::Reflex).unwrap();
            let conj = r.symmetry(Symmetry::Conjugate).unwrap();
            assert_eq!(refl.symmetry(Symmetry::Reflex).unwrap(), r);
            assert_eq!(conj.symmetry(Symmetry::Conjugate).unwrap(), r);
            assert_eq!(
                refl.symmetry(Symmetry::Conjugate).unwrap(),
                conj.symmetry(Symmetry::Reflex).unwrap()
            );
            assert_eq!(
                r.symmetry(Symmetry::ReflexConjugate).unwrap(),
                conj.symmetry(Symmetry::Reflex).unwrap()
            );
        }
    }

    #[test]
    fn eighty_eight_classes() {
        let canon = canonical_codes();
        assert_eq!(canon.len(), 88);
        let total: usize = canon.iter().map(|&c| canonical_code(c).unwrap().1).sum();
        assert_eq!(total, 256);
        assert_eq!(canonical_code(204).unwrap().0, 204);
        for code in 0..256 {
            let (k, _) = canonical_code(code).unwrap();
            assert_eq!(canonical_code(k).unwrap().0, k);
        }
    }

    #[test]
    fn dependent_cells_examples() {
        let budget = Budget::default();
        for n in 1..=4 {
            let shift = RuleTable::eca(170).unwrap();
            assert_eq!(shift.dependent_cells(n, budget).unwrap(), vec![n as i64]);
            let zero = RuleTable::eca(0).unwrap();
            assert!(zero.dependent_cells(n, budget).unwrap().is_empty());
            let id = RuleTable::eca(204).unwrap();
            assert_eq!(id.dependent_cells(n, budget).unwrap(), vec![0]);
        }
        let r = RuleTable::eca(110).unwrap();
        assert!(r
            .dependent_cells(20, Budget::new(1 << 20))
            .unwrap_err()
            .is_resource());
    }

    #[test]
    fn linearity_examples() {
        let kind = |c| RuleTable::eca(c).unwrap().detect_linearity().unwrap();
        assert_eq!(kind(90).kind, LinearityKind::XorLinear);
        assert_eq!(kind(150).kind, LinearityKind::XorLinear);
        assert_eq!(
            kind(105),
            LinearityCertificate {
                kind: LinearityKind::Affine,
                offset: 1
            }
        );
        assert_eq!(kind(110).kind, LinearityKind::None);
        assert_eq!(kind(0).kind, LinearityKind::XorLinear);
        // A witness pair for rule 110.
        let t = RuleTable::eca(110).unwrap();
        let found = (0..8).any(|u| (0..8).any(|v| t.lookup(u ^ v) != t.lookup(u) ^ t.lookup(v)));
        assert!(found);
        let multi = RuleTable::new(3, 0, vec![0, 1, 2]).unwrap();
        assert!(multi.detect_linearity().is_err());
    }

    #[test]
    fn text_form_round_trips() {
        for s in [
            "eca:0",
            "eca:178",
            "rule:2:0:01",
            "rule:3:0:210",
            "rule:2:2:01101001011010010110100101101001",
        ] {
            let r: RuleTable = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        // A non-canonical spelling of an elementary rule prints canonically.
        let r: RuleTable = "rule:2:1:01001101".parse().unwrap();
        assert_eq!(r.to_string(), "eca:178");
        let big = RuleTable::new(17, 0, (0..17).collect()).unwrap();
        assert_eq!(big.to_string().parse::<RuleTable>().unwrap(), big);
        for bad in [
            "eca:300",
            "eca:x",
            "rule:2:1:0100110",
            "rule:2:1:0100110A",
            "foo",
            "rule:1:0:0",
        ] {
            assert!(bad.parse::<RuleTable>().is_err(), "{bad}");
        }
    }
}
