//! Exact two-qubit Pauli algebra and the observable structures built from it.
//!
//! A Pauli operator on two qubits is stored as a pair of 2-bit vectors: bit
//! `q` of `x` (resp. `z`) is set when qubit `q` carries an X (resp. Z) part.
//! Qubit 0 is the left tensor factor. The Hermitian operator for the bits
//! `(x, z)` on one qubit is I, X, Z or Y = iXZ, so every non-identity Pauli
//! here squares to the identity. Products carry an exact phase in {±1, ±i}.

use std::fmt;
use std::ops::{Mul, Neg};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Dense index of an observable inside an [`ObservableStructure`].
pub type ObsId = usize;

/// A measurement outcome, a context parity, or a sign on a group element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_symbol(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn product<I: IntoIterator<Item = Sign>>(signs: I) -> Sign {
        signs.into_iter().fold(Sign::Plus, |acc, s| acc * s)
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A power of the imaginary unit, `i^k` with `k` in `0..4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i32) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    /// `Some(sign)` for the real phases ±1.
    pub fn as_sign(self) -> Option<Sign> {
        match self.0 {
            0 => Some(Sign::Plus),
            2 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl From<Sign> for Phase {
    fn from(s: Sign) -> Phase {
        match s {
            Sign::Plus => Phase::ONE,
            Sign::Minus => Phase::MINUS_ONE,
        }
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

/// A two-qubit Pauli operator without phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pauli {
    x: u8,
    z: u8,
}

impl Pauli {
    pub const IDENTITY: Pauli = Pauli { x: 0, z: 0 };

    pub fn from_bits(x: u8, z: u8) -> Pauli {
        Pauli { x: x & 0b11, z: z & 0b11 }
    }

    /// Builds `σ_first ⊗ σ_second` from single-qubit letters `I`, `X`, `Y`, `Z`.
    pub fn from_letters(first: char, second: char) -> Option<Pauli> {
        let bits = |c: char| match c.to_ascii_uppercase() {
            'I' | '0' => Some((0u8, 0u8)),
            'X' => Some((1, 0)),
            'Y' => Some((1, 1)),
            'Z' => Some((0, 1)),
            _ => None,
        };
        let (x0, z0) = bits(first)?;
        let (x1, z1) = bits(second)?;
        Some(Pauli { x: x0 | (x1 << 1), z: z0 | (z1 << 1) })
    }

    /// All 16 two-qubit Paulis, identity first.
    pub fn all() -> impl Iterator<Item = Pauli> {
        (0..16u8).map(|i| Pauli::from_bits(i & 0b11, i >> 2))
    }

    pub fn x_bits(self) -> u8 {
        self.x
    }

    pub fn z_bits(self) -> u8 {
        self.z
    }

    pub fn is_identity(self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Single-qubit letter on qubit `q` (0 or 1).
    pub fn letter(self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones().is_multiple_of(2)
    }

    /// Exact operator product `self · other = phase · result`.
    pub fn product(self, other: Pauli) -> (Pauli, Phase) {
        let mut exponent = 0i32;
        for q in 0..2 {
            let (x1, z1) = (((self.x >> q) & 1) as i32, ((self.z >> q) & 1) as i32);
            let (x2, z2) = (((other.x >> q) & 1) as i32, ((other.z >> q) & 1) as i32);
            exponent += match (x1, z1) {
                (0, 0) => 0,
                (1, 1) => z2 - x2,
                (1, 0) => z2 * (2 * x2 - 1),
                _ => x2 * (1 - 2 * z2),
            };
        }
        (Pauli { x: self.x ^ other.x, z: self.z ^ other.z }, Phase::from_exponent(exponent))
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter(0), self.letter(1))
    }
}

/// Exact product of two Paulis with phase.
pub fn pauli_product(p: Pauli, q: Pauli) -> (Pauli, Phase) {
    p.product(q)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Observable {
    pub pauli: Pauli,
    pub label: String,
}

/// Three pairwise-compatible observables and the required product of their outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Context {
    pub members: [ObsId; 3],
    pub parity: Sign,
}

impl Context {
    pub fn contains(&self, id: ObsId) -> bool {
        self.members.contains(&id)
    }

    pub fn position(&self, id: ObsId) -> Option<usize> {
        self.members.iter().position(|&m| m == id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StructureKind {
    /// The 3×3 square of nine observables and six contexts.
    Pm,
    /// All 15 non-identity two-qubit Paulis with 15 contexts.
    Extended15,
}

impl StructureKind {
    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Pm => "pm",
            StructureKind::Extended15 => "extended15",
        }
    }

    pub fn structure(self) -> &'static ObservableStructure {
        static PM: OnceLock<ObservableStructure> = OnceLock::new();
        static EXT: OnceLock<ObservableStructure> = OnceLock::new();
        match self {
            StructureKind::Pm => PM.get_or_init(build_pm_square),
            StructureKind::Extended15 => EXT.get_or_init(build_extended_square),
        }
    }
}

impl std::str::FromStr for StructureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm" => Ok(StructureKind::Pm),
            "extended15" => Ok(StructureKind::Extended15),
            other => Err(Error::UnknownStructure(other.to_string())),
        }
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of observables together with its parity-labeled contexts.
///
/// Compatibility is derived from commutation when the structure is built
/// and stored as one bitmask per observable.
#[derive(Clone, Debug)]
pub struct ObservableStructure {
    name: String,
    observables: Vec<Observable>,
    contexts: Vec<Context>,
    compat: Vec<u32>,
}

impl ObservableStructure {
    /// Builds a structure, normalizing context member order and checking
    /// that every context is a commuting trio whose product is `parity · 𝟙`.
    pub fn new(
        name: impl Into<String>,
        observables: Vec<Observable>,
        contexts: Vec<Context>,
    ) -> Result<ObservableStructure> {
        let n = observables.len();
        if n > 32 {
            return Err(Error::Invariant("at most 32 observables are supported".into()));
        }
        if observables.iter().any(|o| o.pauli.is_identity()) {
            return Err(Error::IdentityObservable);
        }
        let mut normalized = Vec::with_capacity(contexts.len());
        for ctx in contexts {
            let mut members = ctx.members;
            members.sort_unstable();
            if members.iter().any(|&m| m >= n) {
                return Err(Error::ObservableOutOfRange(*members.iter().max().unwrap()));
            }
            if members[0] == members[1] || members[1] == members[2] {
                return Err(Error::Invariant("context members must be distinct".into()));
            }
            let paulis = members.map(|m| observables[m].pauli);
            let (product, phase) = fold_product(&paulis);
            if !product.is_identity() || phase.as_sign() != Some(ctx.parity) {
                return Err(Error::Invariant(format!(
                    "context {:?} multiplies to {phase}·{product}, not {}𝟙",
                    members.map(|m| observables[m].label.as_str()),
                    ctx.parity
                )));
            }
            normalized.push(Context { members, parity: ctx.parity });
        }
        let compat = observables
            .iter()
            .map(|o| {
                observables
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| o.pauli.commutes_with(p.pauli))
                    .fold(0u32, |mask, (j, _)| mask | (1 << j))
            })
            .collect();
        Ok(ObservableStructure { name: name.into(), observables, contexts: normalized, compat })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn observable(&self, id: ObsId) -> &Observable {
        &self.observables[id]
    }

    pub fn pauli(&self, id: ObsId) -> Pauli {
        self.observables[id].pauli
    }

    pub fn label(&self, id: ObsId) -> &str {
        &self.observables[id].label
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    /// Observable lookup by label; Greek letters are accepted for the square.
    pub fn id_of(&self, label: &str) -> Option<ObsId> {
        let label = match label {
            "α" => "alpha",
            "β" => "beta",
            "γ" => "gamma",
            other => other,
        };
        self.observables.iter().position(|o| o.label == label)
    }

    pub fn compatible(&self, a: ObsId, b: ObsId) -> bool {
        self.compat[a] & (1 << b) != 0
    }

    /// Bitmask of observables compatible with `a` (including `a`).
    pub fn compat_mask(&self, a: ObsId) -> u32 {
        self.compat[a]
    }

    pub fn contexts_containing(&self, id: ObsId) -> impl Iterator<Item = usize> + '_ {
        self.contexts.iter().enumerate().filter(move |(_, c)| c.contains(id)).map(|(i, _)| i)
    }

    /// Context index whose member set equals `members` (any order).
    pub fn find_context(&self, members: [ObsId; 3]) -> Option<usize> {
        let mut m = members;
        m.sort_unstable();
        self.contexts.iter().position(|c| c.members == m)
    }
}

fn fold_product(paulis: &[Pauli]) -> (Pauli, Phase) {
    paulis.iter().fold((Pauli::IDENTITY, Phase::ONE), |(acc, ph), &p| {
        let (r, f) = acc.product(p);
        (r, ph * f)
    })
}

/// Folds [`pauli_product`] over the members of `ctx`.
pub fn context_product(s: &ObservableStructure, ctx: &Context) -> (Pauli, Phase) {
    fold_product(&ctx.members.map(|m| s.pauli(m)))
}

fn obs(label: &str, letters: &str) -> Observable {
    let mut it = letters.chars();
    let pauli = Pauli::from_letters(it.next().unwrap(), it.next().unwrap()).unwrap();
    Observable { pauli, label: label.to_string() }
}

/// Observables are numbered row by row: `A B C / a b c / alpha beta gamma`.
pub fn build_pm_square() -> ObservableStructure {
    let observables = vec![
        obs("A", "ZI"),
        obs("B", "IZ"),
        obs("C", "ZZ"),
        obs("a", "IX"),
        obs("b", "XI"),
        obs("c", "XX"),
        obs("alpha", "ZX"),
        obs("beta", "XZ"),
        obs("gamma", "YY"),
    ];
    let ctx = |members, parity| Context { members, parity };
    let contexts = vec![
        ctx([0, 1, 2], Sign::Plus),
        ctx([3, 4, 5], Sign::Plus),
        ctx([6, 7, 8], Sign::Plus),
        ctx([0, 3, 6], Sign::Plus),
        ctx([1, 4, 7], Sign::Plus),
        ctx([2, 5, 8], Sign::Minus),
    ];
    ObservableStructure::new("pm", observables, contexts).expect("square is consistent")
}

/// Label of the extended-square observable `σ_k ⊗ σ_l` with `k, l` in `0..4`
/// (0 = identity, 1 = x, 2 = y, 3 = z).
pub fn chi_label(k: usize, l: usize) -> String {
    format!("chi{k}{l}")
}

/// Id of `χ_{kl}` in [`build_extended_square`]; `(0, 0)` is excluded.
pub fn chi_id(k: usize, l: usize) -> ObsId {
    assert!(k < 4 && l < 4 && (k, l) != (0, 0));
    4 * k + l - 1
}

/// The 15 observables `χ_{kl}` in row-major order and their 15 contexts.
pub fn build_extended_square() -> ObservableStructure {
    const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];
    let mut observables = Vec::with_capacity(15);
    for (k, &first) in LETTERS.iter().enumerate() {
        for (l, &second) in LETTERS.iter().enumerate() {
            if (k, l) != (0, 0) {
                observables
                    .push(Observable { pauli: Pauli::from_letters(first, second).unwrap(), label: chi_label(k, l) });
            }
        }
    }
    let mut contexts = Vec::with_capacity(15);
    for k in 1..4 {
        for l in 1..4 {
            contexts.push(Context { members: [chi_id(k, 0), chi_id(k, l), chi_id(0, l)], parity: Sign::Plus });
        }
    }
    let trio = |a: (usize, usize), b: (usize, usize), c: (usize, usize), parity| Context {
        members: [chi_id(a.0, a.1), chi_id(b.0, b.1), chi_id(c.0, c.1)],
        parity,
    };
    contexts.push(trio((1, 1), (2, 3), (3, 2), Sign::Plus));
    contexts.push(trio((1, 2), (2, 1), (3, 3), Sign::Plus));
    contexts.push(trio((1, 3), (2, 2), (3, 1), Sign::Plus));
    contexts.push(trio((1, 1), (2, 2), (3, 3), Sign::Minus));
    contexts.push(trio((1, 2), (2, 3), (3, 1), Sign::Minus));
    contexts.push(trio((1, 3), (2, 1), (3, 2), Sign::Minus));
    ObservableStructure::new("extended15", observables, contexts).expect("extended square is consistent")
}

/// A 3×3 arrangement of observables whose rows and columns are contexts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedSquare {
    pub grid: [[ObsId; 3]; 3],
    /// Context indices: three rows followed by three columns.
    pub contexts: [usize; 6],
}

impl EmbeddedSquare {
    pub fn parity_product(&self, s: &ObservableStructure) -> Sign {
        Sign::product(self.contexts.iter().map(|&c| s.contexts()[c].parity))
    }
}

/// Every square embedded in `s`, deduplicated by its set of six contexts.
pub fn embedded_pm_squares(s: &ObservableStructure) -> Vec<EmbeddedSquare> {
    let ctxs = s.contexts();
    let mask = |c: &Context| c.members.iter().fold(0u32, |m, &o| m | (1 << o));
    let masks: Vec<u32> = ctxs.iter().map(mask).collect();
    let disjoint = |a: usize, b: usize| masks[a] & masks[b] == 0;
    let mut seen: Vec<[usize; 6]> = Vec::new();
    let mut out = Vec::new();
    let m = ctxs.len();
    for r0 in 0..m {
        for r1 in r0 + 1..m {
            for r2 in r1 + 1..m {
                if !(disjoint(r0, r1) && disjoint(r0, r2) && disjoint(r1, r2)) {
                    continue;
                }
                let rows = [r0, r1, r2];
                let cols: Vec<usize> =
                    (0..m).filter(|&c| rows.iter().all(|&r| (masks[r] & masks[c]).count_ones() == 1)).collect();
                for (i, &c0) in cols.iter().enumerate() {
                    for (j, &c1) in cols.iter().enumerate().skip(i + 1) {
                        for &c2 in cols.iter().skip(j + 1) {
                            if !(disjoint(c0, c1) && disjoint(c0, c2) && disjoint(c1, c2)) {
                                continue;
                            }
                            let mut key = [r0, r1, r2, c0, c1, c2];
                            key.sort_unstable();
                            if seen.contains(&key) {
                                continue;
                            }
                            seen.push(key);
                            let cols = [c0, c1, c2];
                            let mut grid = [[0; 3]; 3];
                            for (ri, &r) in rows.iter().enumerate() {
                                for (ci, &c) in cols.iter().enumerate() {
                                    grid[ri][ci] = (masks[r] & masks[c]).trailing_zeros() as usize;
                                }
                            }
                            out.push(EmbeddedSquare { grid, contexts: [r0, r1, r2, c0, c1, c2] });
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_times_z_on_different_qubits() {
        let zi = Pauli::from_letters('Z', 'I').unwrap();
        let iz = Pauli::from_letters('I', 'Z').unwrap();
        assert_eq!(zi.product(iz), (Pauli::from_letters('Z', 'Z').unwrap(), Phase::ONE));
    }

    #[test]
    fn every_pauli_is_an_involution() {
        for p in Pauli::all() {
            assert_eq!(p.product(p), (Pauli::IDENTITY, Phase::ONE));
        }
    }

    #[test]
    fn zz_times_xx_is_minus_yy() {
        let zz = Pauli::from_letters('Z', 'Z').unwrap();
        let xx = Pauli::from_letters('X', 'X').unwrap();
        assert_eq!(zz.product(xx), (Pauli::from_letters('Y', 'Y').unwrap(), Phase::MINUS_ONE));
    }

    #[test]
    fn pm_rows_and_columns() {
        let s = build_pm_square();
        assert_eq!(s.len(), 9);
        assert_eq!(s.contexts().len(), 6);
        let row = s.find_context([0, 1, 2]).unwrap();
        assert_eq!(s.contexts()[row].parity, Sign::Plus);
        let col3 = s.find_context([2, 5, 8]).unwrap();
        assert_eq!(s.contexts()[col3].parity, Sign::Minus);
        assert_eq!(s.contexts().iter().filter(|c| c.parity.is_minus()).count(), 1);
        let (a, b) = (s.id_of("A").unwrap(), s.id_of("b").unwrap());
        assert!(!s.compatible(a, b));
        assert_eq!(s.id_of("γ"), s.id_of("gamma"));
    }

    #[test]
    fn extended_trios() {
        let s = build_extended_square();
        assert_eq!(s.len(), 15);
        assert_eq!(s.contexts().len(), 15);
        let minus = s.find_context([chi_id(1, 1), chi_id(2, 2), chi_id(3, 3)]).unwrap();
        assert_eq!(s.contexts()[minus].parity, Sign::Minus);
        let plus = s.find_context([chi_id(1, 1), chi_id(2, 3), chi_id(3, 2)]).unwrap();
        assert_eq!(s.contexts()[plus].parity, Sign::Plus);
        assert_eq!(s.contexts().iter().filter(|c| c.parity.is_minus()).count(), 3);
        assert_eq!(s.label(chi_id(2, 3)), "chi23");
    }

    #[test]
    fn contexts_fold_to_their_parity() {
        for s in [build_pm_square(), build_extended_square()] {
            for ctx in s.contexts() {
                let (p, ph) = context_product(&s, ctx);
                assert!(p.is_identity());
                assert_eq!(ph.as_sign(), Some(ctx.parity));
            }
        }
    }

    #[test]
    fn bad_context_is_rejected() {
        let s = build_pm_square();
        let err = ObservableStructure::new(
            "bad",
            s.observables().to_vec(),
            vec![Context { members: [2, 5, 8], parity: Sign::Plus }],
        );
        assert!(err.is_err());
    }

    #[test]
    fn embedded_squares() {
        let ext = build_extended_square();
        let squares = embedded_pm_squares(&ext);
        assert_eq!(squares.len(), 10);
        for sq in &squares {
            assert_eq!(sq.parity_product(&ext), Sign::Minus);
            let mut ids: Vec<_> = sq.grid.iter().flatten().copied().collect();
            ids.sort_unstable();
            ids.dedup();
            assert_eq!(ids.len(), 9);
        }
        for c in 0..ext.contexts().len() {
            assert_eq!(squares.iter().filter(|sq| sq.contexts.contains(&c)).count(), 4);
        }
        let pm = build_pm_square();
        let own = embedded_pm_squares(&pm);
        assert_eq!(own.len(), 1);
        assert_eq!(own[0].grid, [[0, 1, 2], [3, 4, 5], [6, 7, 8]]);
    }

    #[test]
    fn compatibility_is_symmetric() {
        for s in [StructureKind::Pm.structure(), StructureKind::Extended15.structure()] {
            for a in 0..s.len() {
                for b in 0..s.len() {
                    assert_eq!(s.compatible(a, b), s.compatible(b, a));
                }
            }
        }
    }
}
